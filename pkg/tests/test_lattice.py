"""Canonical forms, orbits, and neighbor enumeration."""

import itertools

from hypothesis import given, strategies as st

from noble.lattice import (
    canonicalize,
    canonical_ball,
    canonical_neighbors,
    neighbors,
    norm1,
    norm2sq,
    orbit_size,
    pad,
)


def test_canonicalize_examples():
    assert canonicalize((0, -2, 1)) == (2, 1)
    assert canonicalize((0, 0, 0)) == ()
    assert canonicalize((-1, -1)) == (1, 1)
    assert canonicalize((3, 0, 3, -1)) == (3, 3, 1)


@given(st.lists(st.integers(-9, 9), min_size=0, max_size=6))
def test_canonicalize_idempotent(x):
    c = canonicalize(x)
    assert canonicalize(c) == c
    assert all(a >= b for a, b in zip(c, c[1:]))
    assert all(v > 0 for v in c)


@given(st.lists(st.integers(-5, 5), min_size=1, max_size=4))
def test_canonicalize_preserves_norms(x):
    c = canonicalize(x)
    assert norm1(c) == norm1(x)
    assert norm2sq(c) == norm2sq(x)


def brute_orbit(c, d):
    rep = pad(c, d)
    out = set()
    for perm in itertools.permutations(rep):
        for signs in itertools.product((1, -1), repeat=d):
            out.add(tuple(s * v for s, v in zip(signs, perm)))
    return out


def test_orbit_size_matches_brute_force():
    for d in (1, 2, 3):
        for c in canonical_ball(d, 4):
            assert orbit_size(c, d) == len(brute_orbit(c, d)), (c, d)


def test_orbit_sizes_tile_the_ball():
    # canonical orbits partition the set of points with norm1 <= r
    for d, r in ((2, 5), (3, 4)):
        pts = set()
        for x in itertools.product(range(-r, r + 1), repeat=d):
            if norm1(x) <= r:
                pts.add(x)
        total = sum(orbit_size(c, d) if c else 1
                    for c in canonical_ball(d, r))
        assert total == len(pts)


def test_neighbors_and_canonical_neighbors():
    ns = set(neighbors((0, 0), 2))
    assert ns == {(1, 0), (-1, 0), (0, 1), (0, -1)}
    # canonical neighbor multiset is representative-independent
    from collections import Counter
    a = Counter(canonical_neighbors((2, 1), 3))
    rep = (-1, 0, 2)  # another representative of the same orbit
    b = Counter(canonicalize(q) for q in neighbors(rep, 3))
    assert a == b


def test_canonical_ball_counts():
    # number of canonical points with norm1 <= r, d >= r: partitions of
    # 0..r into at most r parts
    assert len(canonical_ball(1, 3)) == 4      # (), (1), (2), (3)
    assert len(canonical_ball(2, 2)) == 4      # (), (1), (2), (1,1)
    assert () in canonical_ball(3, 0)
