"""Exact enumeration of walk counts on Z^d with full symmetry reduction.

Four walk classes are counted, all as exact arbitrary-precision integers
indexed by canonical endpoint:

* simple:            p_n(x), every nearest-neighbor path
* non-backtracking:  b_n(x), no step immediately reversed
* bond-avoiding:     a_n(x), no bond traversed twice (in either direction)
* self-avoiding:     no vertex visited twice

Simple counts satisfy the convolution recursion p_n = sum of p_{n-1} over
neighbors.  Non-backtracking counts are generated by the directed-count
recursions: with b^i_n(x) the number of n-step walks ending at x whose first
step is not to e_i, summing over the direction of the first step gives
b_n(x) = sum_i b^i_{n-1}(x + e_i), and splitting off one direction gives
b_n(x) = b^{-i}_n(x) + b^i_{n-1}(x + e_i).  Eliminating the directed counts
from the two schemes yields the scalar three-term recursion

    b_n(x) = sum_{y ~ x} b_{n-1}(y) - (2d-1) b_{n-2}(x)   (n >= 3)

with b_2(x) = sum_{y ~ x} b_1(y) - 2d delta_{0,x}, used for table builds;
the directed counts themselves are exposed for cross-checks.

The avoiding classes are enumerated once as dimension-free "abstract
patterns": coordinate axes are introduced in order of first use, and the
first use of each axis is in the positive direction.  A pattern using k axes
corresponds to exactly d(d-1)...(d-k+1) * 2^k concrete walks in Z^d, spread
uniformly over the endpoint orbit.  One depth-first pass therefore serves
every dimension at once, which is what makes length-10 enumeration in d >= 11
feasible.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .lattice import (
    canonicalize,
    canonical_neighbors,
    orbit_size,
    pad,
    norm1,
)

WALK_CLASSES = ("simple", "non-backtracking", "bond-avoiding", "self-avoiding")

DEFAULT_MAX_LENGTH = 10


# ---------------------------------------------------------------------------
# symmetric neighbor-sum recursions (simple and non-backtracking)
# ---------------------------------------------------------------------------

def _neighbor_sum(table, d):
    """(sum over neighbors) of a canonical-point table, as a new table."""
    candidates = set()
    for c in table:
        candidates.update(canonical_neighbors(c, d))
    out = {}
    for c in candidates:
        s = 0
        for q in canonical_neighbors(c, d):
            v = table.get(q)
            if v:
                s += v
        if s:
            out[c] = s
    return out


def _simple_tables(d, max_length):
    tables = [{(): 1}]
    for _ in range(max_length):
        tables.append(_neighbor_sum(tables[-1], d))
    return tables


def _nbw_tables(d, max_length):
    tables = [{(): 1}]
    if max_length >= 1:
        tables.append({(1,): 1})
    for n in range(2, max_length + 1):
        nxt = _neighbor_sum(tables[n - 1], d)
        if n == 2:
            prev_weight = 2 * d  # removes the 2d immediate reversals
        else:
            prev_weight = 2 * d - 1
        for c, v in tables[n - 2].items():
            w = nxt.get(c, 0) - prev_weight * v
            if w:
                nxt[c] = w
            elif c in nxt:
                del nxt[c]
        for c, v in nxt.items():
            if v < 0:
                raise AssertionError(
                    f"negative non-backtracking count at n={n}, x={c}")
        tables.append(nxt)
    return tables


def nbw_directed_count(d, n, x, direction, _table=None):
    """Directed count b^i_n(x): n-step non-backtracking walks from 0 to x
    whose first step is not to e_i.

    ``direction`` is a signed axis index in {-d..-1, 1..d}.  Computed from
    the splitting recursion b^i_n(x) = b_n(x) - b^{-i}_{n-1}(x - e_i), which
    burns down to the empty walk.
    """
    if not (1 <= abs(direction) <= d):
        raise ValueError("direction out of range")
    if _table is None:
        _table = build_table(d, "non-backtracking", max(n, 1))
    x = tuple(x)
    if n == 0:
        return 1 if all(c == 0 for c in x) else 0
    axis = abs(direction) - 1
    step = 1 if direction > 0 else -1
    shifted = x[:axis] + (x[axis] - step,) + x[axis + 1:]
    return (_table.count(n, x)
            - nbw_directed_count(d, n - 1, shifted, -direction, _table))


# ---------------------------------------------------------------------------
# avoiding walks via dimension-free abstract patterns
# ---------------------------------------------------------------------------

@lru_cache(maxsize=8)
def abstract_tallies(max_length, kind):
    """Pattern tallies for an avoiding walk class, independent of dimension.

    Returns a tuple over n = 0..max_length of dicts mapping
    (canonical endpoint, axes used) -> number of abstract patterns.
    ``kind`` is "bond-avoiding" or "self-avoiding".
    """
    if kind not in ("bond-avoiding", "self-avoiding"):
        raise ValueError(f"unknown avoiding class {kind!r}")
    by_vertex = kind == "self-avoiding"
    M = max_length
    tallies = [dict() for _ in range(M + 1)]
    tallies[0][((), 0)] = 1
    origin = (0,) * M
    visited_vertices = {origin}
    visited_bonds = set()

    # Explicit stack of (point, axes_used, depth, undo) frames; each frame
    # iterates over admissible next steps.
    def rec(pt, k, n):
        if n == M:
            return
        limit = k + 1 if k < M else k
        for i in range(limit):
            new_axis = i == k
            for s in ((1,) if new_axis else (1, -1)):
                q = pt[:i] + (pt[i] + s,) + pt[i + 1:]
                if by_vertex:
                    if q in visited_vertices:
                        continue
                else:
                    bond = (pt, q) if pt < q else (q, pt)
                    if bond in visited_bonds:
                        continue
                key = (canonicalize(q), k + 1 if new_axis else k)
                nxt = tallies[n + 1]
                nxt[key] = nxt.get(key, 0) + 1
                if by_vertex:
                    visited_vertices.add(q)
                    rec(q, key[1], n + 1)
                    visited_vertices.discard(q)
                else:
                    visited_bonds.add(bond)
                    rec(q, key[1], n + 1)
                    visited_bonds.discard(bond)

    rec(origin, 0, 0)
    return tuple(tallies)


def _falling(d, k):
    r = 1
    for i in range(k):
        r *= d - i
    return r


def _avoiding_tables(d, max_length, kind):
    tallies = abstract_tallies(max_length, kind)
    tables = []
    for n in range(max_length + 1):
        acc = {}
        for (cu, k), npat in tallies[n].items():
            if k > d:
                continue
            acc[cu] = acc.get(cu, 0) + npat * _falling(d, k) * (1 << k)
        out = {}
        for cu, total in acc.items():
            size = orbit_size(cu, d) if cu else 1
            if total % size:
                raise AssertionError(
                    f"orbit fold not integral at n={n}, x={cu}")
            out[cu] = total // size
        tables.append(out)
    return tables


# ---------------------------------------------------------------------------
# public table interface
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WalkCountTable:
    """Per-endpoint exact walk counts for one class, one dimension.

    ``counts[n]`` maps canonical endpoints to the number of n-step walks of
    the class from the origin to that endpoint.  Immutable once built.
    """

    dimension: int
    max_length: int
    walk_class: str
    counts: tuple = field(repr=False)

    def count(self, n, x):
        """Exact count of n-step walks ending at x (any representative)."""
        if not 0 <= n <= self.max_length:
            raise ValueError(
                f"length {n} outside table range 0..{self.max_length}")
        c = canonicalize(x)
        if len(c) > self.dimension:
            raise ValueError(
                f"point {tuple(x)} does not fit in dimension {self.dimension}")
        return self.counts[n].get(c, 0)

    def total(self, n):
        """Total number of n-step walks of the class (orbit-weighted sum)."""
        if not 0 <= n <= self.max_length:
            raise ValueError(
                f"length {n} outside table range 0..{self.max_length}")
        return sum(v * (orbit_size(c, self.dimension) if c else 1)
                   for c, v in self.counts[n].items())

    def support(self, n):
        """Canonical points with nonzero n-step count."""
        return tuple(sorted(self.counts[n]))

    def items(self, n):
        """(canonical point, count) pairs for length n."""
        return tuple(sorted(self.counts[n].items()))


@lru_cache(maxsize=64)
def build_table(d, walk_class, max_length=DEFAULT_MAX_LENGTH):
    """Build the walk-count table for one class up to ``max_length`` steps.

    Deterministic; results are cached per (d, class, M) in process.
    """
    if d < 1:
        raise ValueError("dimension must be >= 1")
    if max_length < 0:
        raise ValueError("max_length must be >= 0")
    if walk_class == "simple":
        tables = _simple_tables(d, max_length)
    elif walk_class == "non-backtracking":
        tables = _nbw_tables(d, max_length)
    elif walk_class in ("bond-avoiding", "self-avoiding"):
        tables = _avoiding_tables(d, max_length, walk_class)
    else:
        raise ValueError(f"unknown walk class {walk_class!r}")
    frozen = tuple(dict(t) for t in tables)
    return WalkCountTable(dimension=d, max_length=max_length,
                          walk_class=walk_class, counts=frozen)


def count_walks(d, walk_class, n, x):
    """Exact number of n-step walks of the class from 0 to x in Z^d."""
    table = build_table(d, walk_class, max(n, DEFAULT_MAX_LENGTH))
    return table.count(n, x)


def total_walks(d, walk_class, n):
    """Total number of n-step walks of the class in Z^d."""
    table = build_table(d, walk_class, max(n, DEFAULT_MAX_LENGTH))
    return table.total(n)


def srw_step_mass(d, l, x):
    """Exact rational D^{*l}(x) = p_l(x) / (2d)^l, the l-step uniform
    nearest-neighbor step distribution."""
    if l == 0:
        return Fraction(1 if norm1(x) == 0 else 0)
    return Fraction(count_walks(d, "simple", l, x), (2 * d) ** l)
