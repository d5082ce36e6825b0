"""Walk counting against independent exhaustive oracles and identities."""

from collections import defaultdict
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from noble.lattice import canonical_ball, canonicalize, orbit_size
from noble.walks import (
    WALK_CLASSES,
    build_table,
    count_walks,
    nbw_directed_count,
    srw_step_mass,
    total_walks,
)


# ---------------------------------------------------------------------------
# independent oracle: raw depth-first enumeration over concrete points
# ---------------------------------------------------------------------------

def dfs_oracle(d, max_n, walk_class):
    """Endpoint tallies per length by brute-force path enumeration."""
    out = [defaultdict(int) for _ in range(max_n + 1)]
    origin = (0,) * d
    out[0][origin] = 1
    steps = []
    for i in range(d):
        for s in (1, -1):
            steps.append((i, s))
    visited = {origin}
    bonds = set()

    def rec(pt, last, n):
        if n == max_n:
            return
        for i, s in steps:
            if walk_class == "non-backtracking" and last == (i, -s):
                continue
            q = pt[:i] + (pt[i] + s,) + pt[i + 1:]
            if walk_class == "self-avoiding" and q in visited:
                continue
            if walk_class == "bond-avoiding":
                bond = (pt, q) if pt < q else (q, pt)
                if bond in bonds:
                    continue
                bonds.add(bond)
            out[n + 1][q] += 1
            if walk_class == "self-avoiding":
                visited.add(q)
            rec(q, (i, s), n + 1)
            if walk_class == "self-avoiding":
                visited.discard(q)
            elif walk_class == "bond-avoiding":
                bonds.discard((pt, q) if pt < q else (q, pt))

    rec(origin, None, 0)
    return out


@pytest.mark.parametrize("walk_class", WALK_CLASSES)
@pytest.mark.parametrize("d", [1, 2])
def test_oracle_small_dims(d, walk_class):
    max_n = 7
    oracle = dfs_oracle(d, max_n, walk_class)
    table = build_table(d, walk_class, max_n)
    for n in range(max_n + 1):
        folded = defaultdict(int)
        for x, v in oracle[n].items():
            folded[canonicalize(x)] += v
        for c in canonical_ball(d, n):
            size = orbit_size(c, d) if c else 1
            assert folded.get(c, 0) == table.count(n, c) * size, (n, c)


def test_oracle_d3_short():
    # full d=3 sweep to n=8 lives in the acceptance suite; spot-check n<=5
    for walk_class in WALK_CLASSES:
        oracle = dfs_oracle(3, 5, walk_class)
        table = build_table(3, walk_class, 5)
        for n in range(6):
            folded = defaultdict(int)
            for x, v in oracle[n].items():
                folded[canonicalize(x)] += v
            for c in canonical_ball(3, n):
                size = orbit_size(c, 3) if c else 1
                assert folded.get(c, 0) == table.count(n, c) * size


# ---------------------------------------------------------------------------
# exact identities
# ---------------------------------------------------------------------------

def test_mass_identities_small():
    for d in (1, 2, 3, 5):
        simple = build_table(d, "simple", 8)
        nbw = build_table(d, "non-backtracking", 8)
        for n in range(9):
            assert simple.total(n) == (2 * d) ** n
            if n >= 1:
                assert nbw.total(n) == 2 * d * (2 * d - 1) ** (n - 1)


def test_spec_point_examples():
    assert count_walks(2, "simple", 2, (0, 0)) == 4
    assert count_walks(4, "non-backtracking", 2, (0,) * 4) == 0
    assert count_walks(2, "non-backtracking", 4, (0, 0)) == 8
    assert count_walks(2, "bond-avoiding", 2, (0, 0)) == 0
    assert count_walks(1, "simple", 4, (0,)) == 6
    assert count_walks(3, "simple", 2, (1, 1, 0)) == 2
    for walk_class in WALK_CLASSES:
        assert count_walks(3, walk_class, 0, (0, 0, 0)) == 1


def test_known_self_avoiding_series_d2_d3():
    # published Z^2 and Z^3 self-avoiding walk counts
    z2 = [4, 12, 36, 100, 284, 780, 2172, 5916]
    z3 = [6, 30, 150, 726, 3534, 16926, 81390, 387966]
    for n, v in enumerate(z2, start=1):
        assert total_walks(2, "self-avoiding", n) == v
    for n, v in enumerate(z3, start=1):
        assert total_walks(3, "self-avoiding", n) == v


def test_directed_recursion_schemes():
    d = 2
    table = build_table(d, "non-backtracking", 6)
    directions = (1, -1, 2, -2)

    def shifted(x, direction):
        ax = abs(direction) - 1
        s = 1 if direction > 0 else -1
        return x[:ax] + (x[ax] + s,) + x[ax + 1:]

    for n in range(1, 6):
        for x in [(0, 0), (1, 0), (1, 1), (2, 1), (0, 2), (3, 0)]:
            # summing over the direction of the first step
            total = sum(
                nbw_directed_count(d, n - 1, shifted(x, t), t)
                for t in directions)
            assert total == table.count(n, x)
            # splitting off a single direction
            for t in directions:
                got = (nbw_directed_count(d, n, x, -t)
                       + nbw_directed_count(d, n - 1, shifted(x, t), t))
                assert got == table.count(n, x)


def test_containment_ordering_pointwise():
    # every self-avoiding walk is bond-avoiding, every bond-avoiding walk
    # is non-backtracking, every walk is simple
    for d in (2, 3):
        tables = {w: build_table(d, w, 7) for w in WALK_CLASSES}
        for n in range(8):
            for c in canonical_ball(d, n):
                saw = tables["self-avoiding"].count(n, c)
                baw = tables["bond-avoiding"].count(n, c)
                nbw = tables["non-backtracking"].count(n, c)
                simple = tables["simple"].count(n, c)
                assert saw <= baw <= nbw <= simple, (d, n, c)


def test_srw_step_mass():
    assert srw_step_mass(2, 1, (1, 0)) == Fraction(1, 4)
    assert srw_step_mass(2, 2, (0, 0)) == Fraction(1, 4)
    assert srw_step_mass(5, 0, (0,) * 5) == 1
    assert srw_step_mass(5, 0, (1, 0, 0, 0, 0)) == 0
    # normalization: the l-step distribution sums to one
    for d in (1, 3):
        for l in (1, 2, 3, 4):
            total = sum(
                srw_step_mass(d, l, c) * (orbit_size(c, d) if c else 1)
                for c in canonical_ball(d, l))
            assert total == 1


# ---------------------------------------------------------------------------
# properties
# ---------------------------------------------------------------------------

@given(d=st.integers(1, 4), n=st.integers(0, 6),
       data=st.data())
@settings(max_examples=60, deadline=None)
def test_parity_and_symmetry(d, n, data):
    x = tuple(data.draw(st.integers(-n, n)) for _ in range(d))
    table = build_table(d, "simple", 6)
    v = table.count(n, x)
    if (n - sum(abs(c) for c in x)) % 2 == 1 or sum(abs(c) for c in x) > n:
        assert v == 0
    assert v == table.count(n, canonicalize(x))


@given(d=st.integers(1, 3), n=st.integers(1, 6))
@settings(max_examples=30, deadline=None)
def test_totals_are_class_ordered(d, n):
    assert (total_walks(d, "self-avoiding", n)
            <= total_walks(d, "bond-avoiding", n)
            <= total_walks(d, "non-backtracking", n)
            <= total_walks(d, "simple", n))
