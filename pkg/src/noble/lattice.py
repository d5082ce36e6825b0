"""Lattice points of Z^d modulo the hyperoctahedral symmetry group.

Everything downstream (walk counts, Green's function values, diagram bounds)
is invariant under permuting coordinates and flipping signs, so points are
stored by a canonical orbit representative: absolute values of the coordinates
sorted in non-increasing order, with trailing zeros dropped.  A canonical
point is therefore dimension-free; the ambient dimension only enters through
orbit sizes and neighbor enumeration.
"""

from __future__ import annotations

from math import factorial
from collections import Counter


def canonicalize(x):
    """Canonical orbit representative of a lattice point.

    Accepts any iterable of integers; returns a tuple with absolute values
    sorted non-increasing and trailing zeros removed.  Idempotent.
    """
    t = sorted((abs(int(c)) for c in x), reverse=True)
    while t and t[-1] == 0:
        t.pop()
    return tuple(t)


def pad(c, d):
    """Concrete representative of canonical point ``c`` in Z^d."""
    if len(c) > d:
        raise ValueError(f"canonical point {c} does not fit in dimension {d}")
    return tuple(c) + (0,) * (d - len(c))


def orbit_size(c, d):
    """Number of distinct points of Z^d in the symmetry orbit of ``c``.

    For a canonical point with k nonzero entries the orbit consists of all
    placements of those entries on distinct axes with arbitrary signs:
    d!/((d-k)! prod(mult!)) * 2^k where mult are the multiplicities of the
    distinct nonzero values.
    """
    c = canonicalize(c)
    k = len(c)
    if k > d:
        return 0
    n = factorial(d) // factorial(d - k)
    for m in Counter(c).values():
        n //= factorial(m)
    return n * (1 << k)


def norm1(x):
    return sum(abs(int(c)) for c in x)


def norm2sq(x):
    return sum(int(c) * int(c) for c in x)


def neighbors(x, d):
    """The 2d nearest neighbors of a concrete point of Z^d."""
    x = tuple(x)
    if len(x) != d:
        raise ValueError("point/dimension mismatch")
    for i in range(d):
        for s in (1, -1):
            yield x[:i] + (x[i] + s,) + x[i + 1:]


def canonical_neighbors(c, d):
    """Canonical forms of the 2d neighbors of (a representative of) ``c``.

    Yields canonical tuples with multiplicity; the multiset of canonical
    neighbors is the same for every representative of the orbit.
    """
    rep = pad(c, d)
    for q in neighbors(rep, d):
        yield canonicalize(q)


def orbit(c, d):
    """All concrete points of Z^d in the symmetry orbit of canonical ``c``.

    Distinct placements are generated directly (positions chosen per distinct
    magnitude), so the cost is the orbit size rather than d! permutations.
    """
    from itertools import combinations, product

    rep = canonicalize(c)
    if len(rep) > d:
        raise ValueError(f"point {c} does not fit in dimension {d}")
    groups = sorted(Counter(rep).items())

    def place(free, remaining):
        if not remaining:
            yield ()
            return
        (value, mult), rest = remaining[0], remaining[1:]
        for chosen in combinations(free, mult):
            taken = set(chosen)
            tail_free = tuple(i for i in free if i not in taken)
            for assignment in place(tail_free, rest):
                yield tuple((i, value) for i in chosen) + assignment

    k = len(rep)
    for assignment in place(tuple(range(d)), groups):
        base = [0] * d
        for i, value in assignment:
            base[i] = value
        for signs in product((1, -1), repeat=k):
            q = list(base)
            j = 0
            for i, _ in assignment:
                q[i] *= signs[j]
                j += 1
            yield tuple(q)


def canonical_ball(d, radius):
    """All canonical points x with norm1(x) <= radius in dimension d.

    Enumerated as non-increasing positive integer tuples with at most d
    entries; includes the origin ().
    """
    out = []

    def rec(prefix, remaining, maxval):
        out.append(tuple(prefix))
        if len(prefix) == d:
            return
        for v in range(min(maxval, remaining), 0, -1):
            prefix.append(v)
            rec(prefix, remaining - v, v)
            prefix.pop()

    rec([], radius, radius)
    return out
