"""Certified upper bounds for percolation diagrams.

This module turns exact bond-avoiding-walk tables and certified lattice
Green's integrals into rigorous upper bounds on the diagrammatic sums that
control the expansion coefficients: two-point functions with step
constraints, bubbles, triangles, squares, pentagons, double connections,
and their ``norm squared``-weighted variants.

The central technique is walk extraction.  A two-point function with an
``at least m steps`` constraint satisfies, for any cutoff M,

    tau_m(x) <= sum_{r=m}^{M-1} p^r a_r(x) + p^M (a_M * tau)(x),

where a_r counts r-step bond-avoiding walks and ``*`` is lattice
convolution.  Chains of such factors (bubbles, triangles, ...) whose legs
occupy pairwise disjoint bonds concatenate into longer bond-avoiding
walks, so closed diagram sums inherit exact walk counts for their short
contributions plus a controlled tail.  Tails are closed in Fourier space:
the walk generating polynomial of the non-backtracking ladder dominates
a_M, and Cauchy-Schwarz against certified integral brackets

    I_{n,l}(x) = int e^{ik.x} D(k)^l / (1 - D(k))^n  d^d k / (2 pi)^d

produces finite certified numbers whenever the dimension is large enough
for the integrals to converge.

All returned values are `Interval` brackets whose upper endpoints are the
claimed certified bounds.  Every bound is monotone non-decreasing in p and
in the assumed constants, and the repulsive (disjoint-bond) variant of a
diagram never exceeds its non-repulsive counterpart.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .intervals import Interval, ONE, ZERO, from_fraction
from .integrals import DivergentIntegralError, QuadratureConfig, green_integral
from .lattice import canonical_neighbors, canonicalize, norm2sq, orbit, orbit_size, pad
from .walks import build_table, srw_step_mass

__all__ = [
    "FAR",
    "ORIGIN",
    "NEIGHBOR",
    "DEFAULT_WEIGHT_KEYS",
    "BoundUnavailableError",
    "StepConstraint",
    "at_least",
    "exactly",
    "DiagramSpec",
    "BootstrapConstants",
    "default_constants",
    "DiagramEnvironment",
]


# ---------------------------------------------------------------------------
# regions and errors
# ---------------------------------------------------------------------------

#: Anchor regions for the weighted supremum set: points with Euclidean norm
#: exceeding one, the origin, and the nearest neighbors of the origin.
FAR = "far"
ORIGIN = "origin"
NEIGHBOR = "neighbor"
_REGIONS = (FAR, ORIGIN, NEIGHBOR)

#: Default members (n, l, region) of the weighted supremum family: the bound
#: c_{n,l,region} * Gamma3 is assumed for the weighted pair sum with n
#: intermediate two-point factors and l exact steps, anchored in the region.
DEFAULT_WEIGHT_KEYS = (
    (0, 0, FAR),
    (1, 0, FAR),
    (1, 1, FAR),
    (1, 2, FAR),
    (1, 3, FAR),
    (1, 6, ORIGIN),
    (1, 6, NEIGHBOR),
)


class BoundUnavailableError(RuntimeError):
    """No certified route exists for the requested bound.

    Raised when every applicable closure (integral bracket, weight
    assumption, self-consistent relation) is either divergent in this
    dimension or not certified below the threshold it needs.  Callers in
    the verification harness treat this as a reported failure, not a crash.
    """


# ---------------------------------------------------------------------------
# step constraints and diagram specifications
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StepConstraint:
    """Length constraint on one diagram leg: at least / exactly `count` bonds."""

    count: int
    exact: bool = False

    def __post_init__(self):
        if not isinstance(self.count, int) or self.count < 0:
            raise ValueError(f"step count must be a non-negative integer, got {self.count!r}")

    def __str__(self):
        return f"{'exactly' if self.exact else 'at least'} {self.count}"


def at_least(m: int) -> StepConstraint:
    return StepConstraint(m, exact=False)


def exactly(m: int) -> StepConstraint:
    return StepConstraint(m, exact=True)


_KIND_LEGS = {
    "two-point": 1,
    "bubble": 2,
    "triangle": 3,
    "square": 4,
    "pentagon": 5,
    "double-connection": 2,
}


@dataclass(frozen=True)
class DiagramSpec:
    """Shape of a simple diagram: kind, one constraint per leg, flavor flags.

    `weight` optionally names the (0-based) leg carrying the squared
    Euclidean norm; weighted evaluation is routed through the dedicated
    weighted bounds rather than the plain chain machinery.  `anchors`
    records whether the free endpoint is summed, supped, or fixed; closed
    Fourier bounds are anchor-uniform, so the field is descriptive.
    """

    kind: str
    constraints: tuple
    repulsive: bool = True
    weight: int | None = None
    anchors: str = "summed"

    def __post_init__(self):
        if self.kind not in _KIND_LEGS:
            raise ValueError(f"unknown diagram kind {self.kind!r}")
        legs = _KIND_LEGS[self.kind]
        if len(self.constraints) != legs:
            raise ValueError(
                f"{self.kind} has {legs} legs, got {len(self.constraints)} constraints")
        for c in self.constraints:
            if not isinstance(c, StepConstraint):
                raise ValueError("constraints must be StepConstraint instances")
        if self.weight is not None and not 0 <= self.weight < legs:
            raise ValueError("weight must name one of the legs")


# ---------------------------------------------------------------------------
# bootstrap constants
# ---------------------------------------------------------------------------

def _fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(value)
    raise TypeError(f"expected a number, got {value!r}")


@dataclass(frozen=True)
class BootstrapConstants:
    """Assumed bounds on the three bootstrap functions.

    gamma1 bounds max{(2d-1)p, c_mu (2d-1) mu_p}; gamma2 bounds the
    normalized Fourier envelope (2d-1)/(2d-2) sup_k [1-D(k)] tau_p(k);
    gamma3, together with the member weights c_{n,l,region}, bounds every
    weighted pair sum in the supremum family.  Derived quantities:
    gamma1_bar(d) dominates 2dp and gamma2_bar(d) dominates
    sup_k [1-D(k)] tau_p(k).
    """

    gamma1: Fraction
    gamma2: Fraction
    gamma3: Fraction
    c_mu: Fraction = Fraction(1001, 1000)
    weights: tuple = ()
    allow_custom_members: bool = False

    def __post_init__(self):
        object.__setattr__(self, "gamma1", _fraction(self.gamma1))
        object.__setattr__(self, "gamma2", _fraction(self.gamma2))
        object.__setattr__(self, "gamma3", _fraction(self.gamma3))
        object.__setattr__(self, "c_mu", _fraction(self.c_mu))
        if not self.gamma1 > 1:
            raise ValueError("gamma1 must exceed 1")
        if not self.gamma2 > 1:
            raise ValueError("gamma2 must exceed 1")
        if not self.gamma3 > 0:
            raise ValueError("gamma3 must be positive")
        if not self.c_mu > 1:
            raise ValueError("c_mu must exceed 1")
        cleaned = []
        for key, value in dict(self.weights).items():
            n, l, region = key
            if region not in _REGIONS:
                raise ValueError(f"unknown weight region {region!r}")
            if not (isinstance(n, int) and isinstance(l, int) and n >= 0 and l >= 0):
                raise ValueError(f"bad weight index {key!r}")
            if key not in DEFAULT_WEIGHT_KEYS and not self.allow_custom_members:
                raise ValueError(
                    f"weight member {key!r} is outside the default family; "
                    "pass allow_custom_members=True to extend it")
            value = _fraction(value)
            if not value > 0:
                raise ValueError(f"weight {key!r} must be positive")
            cleaned.append((key, value))
        cleaned.sort()
        object.__setattr__(self, "weights", tuple(cleaned))

    def weight(self, n: int, l: int, region: str) -> Fraction:
        for key, value in self.weights:
            if key == (n, l, region):
                return value
        raise BoundUnavailableError(
            f"no weight assumed for member (n={n}, l={l}, region={region})")

    def has_weight(self, n: int, l: int, region: str) -> bool:
        return any(key == (n, l, region) for key, _ in self.weights)

    def members(self):
        return tuple(key for key, _ in self.weights)

    def gamma1_bar(self, d: int) -> Fraction:
        return self.gamma1 * Fraction(2 * d, 2 * d - 1)

    def gamma2_bar(self, d: int) -> Fraction:
        return self.gamma2 * Fraction(2 * d - 2, 2 * d - 1)

    def replace(self, **changes) -> "BootstrapConstants":
        data = {
            "gamma1": self.gamma1,
            "gamma2": self.gamma2,
            "gamma3": self.gamma3,
            "c_mu": self.c_mu,
            "weights": self.weights,
            "allow_custom_members": self.allow_custom_members,
        }
        data.update(changes)
        return BootstrapConstants(**data)


#: Baseline member weights at d = 11; default_constants rescales them.
_BASE_WEIGHTS = {
    (0, 0, FAR): Fraction(1, 20),
    (1, 0, FAR): Fraction(3, 10),
    (1, 1, FAR): Fraction(1, 5),
    (1, 2, FAR): Fraction(3, 20),
    (1, 3, FAR): Fraction(1, 10),
    (1, 6, ORIGIN): Fraction(1, 10),
    (1, 6, NEIGHBOR): Fraction(1, 10),
}


def default_constants(d: int) -> BootstrapConstants:
    """Reasonable starting constants for dimension d.

    These are deliberately generous defaults; the optimizer in the
    verification harness tightens them per dimension.
    """
    if d <= 13:
        g1, g2, g3 = Fraction("1.016"), Fraction("1.10"), Fraction(2)
    elif d <= 30:
        g1, g2, g3 = Fraction("1.006"), Fraction("1.035"), Fraction("1.5")
    else:
        g1, g2, g3 = Fraction("1.002"), Fraction("1.01"), Fraction("1.2")
    scale = min(Fraction(1), Fraction(11, d))
    weights = {key: value * scale for key, value in _BASE_WEIGHTS.items()}
    return BootstrapConstants(gamma1=g1, gamma2=g2, gamma3=g3, weights=tuple(weights.items()))


# ---------------------------------------------------------------------------
# walk generating polynomials
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _ladder_polynomial(d: int, n: int):
    """Coefficients (in X = D(k)) of the n-step non-backtracking walk transform.

    With q_0 = 1 and q_1 = 2d X, the counts obey
    q_2 = 2d X q_1 - 2d and q_n = 2d X q_{n-1} - (2d-1) q_{n-2} for n >= 3,
    and the transform of the n-step count table equals q_n(D(k)).  The mass
    identity q_n(1) = 2d (2d-1)^{n-1} pins the recursion.
    """
    if n == 0:
        return (1,)
    if n == 1:
        return (0, 2 * d)
    prev2, prev = (1,), (0, 2 * d)
    for step in range(2, n + 1):
        shifted = (0,) + tuple(2 * d * c for c in prev)
        back = 2 * d if step == 2 else 2 * d - 1
        coeffs = list(shifted)
        for j, c in enumerate(prev2):
            coeffs[j] -= back * c
        prev2, prev = prev, tuple(coeffs)
    return prev


def _poly_square(coeffs):
    out = [0] * (2 * len(coeffs) - 1)
    for i, a in enumerate(coeffs):
        if a == 0:
            continue
        for j, b in enumerate(coeffs):
            if b:
                out[i + j] += a * b
    return tuple(out)


def _imin(a: Interval, b: Interval) -> Interval:
    return Interval(min(a.lo, b.lo), min(a.hi, b.hi))


def _imax(a: Interval, b: Interval) -> Interval:
    return Interval(max(a.lo, b.lo), max(a.hi, b.hi))


def _nonneg(iv: Interval) -> Interval:
    """Intersect a bracket with [0, inf) for quantities known non-negative."""
    return _imax(iv, ZERO)


# ---------------------------------------------------------------------------
# the evaluation environment
# ---------------------------------------------------------------------------

class DiagramEnvironment:
    """Bundles a dimension, a bond weight, constants, and shared caches.

    All diagram bounds are methods on this object.  The bond weight `p`
    may be any non-negative number certified not to exceed
    gamma1_bar / (2d); walk tables are built up to `max_walk_length`
    (the extraction cutoff M), and exact lattice sums iterate concrete
    points only inside radius `exact_radius`, falling back to moment
    bounds beyond it so that high dimensions stay affordable.
    """

    def __init__(self, dimension, p, constants=None, max_walk_length=10,
                 quad_config=None, exact_radius=None):
        if not isinstance(dimension, int) or dimension < 1:
            raise ValueError(f"dimension must be a positive integer, got {dimension!r}")
        self.dimension = dimension
        self.constants = constants if constants is not None else default_constants(dimension)
        if max_walk_length < 2:
            raise ValueError("max_walk_length must be at least 2")
        self.M = max_walk_length
        if isinstance(p, Interval):
            self.p = p
        elif isinstance(p, float):
            self.p = Interval(Fraction(p))
        else:
            self.p = Interval(p)
        if self.p.lo < 0:
            raise ValueError("bond weight p must be non-negative")
        d = dimension
        cap = from_fraction(self.constants.gamma1_bar(d) / (2 * d))
        if not (self.p * (2 * d)).certainly_leq(cap * (2 * d)):
            raise ValueError(
                "bond weight p lies outside (0, gamma1_bar/(2d)]: the assumed "
                "step-weight envelope does not cover it")
        if exact_radius is None:
            exact_radius = 5 if d <= 12 else 4 if d <= 20 else 3 if d <= 32 else 2
        self.exact_radius = exact_radius
        self.quad_config = quad_config if quad_config is not None else QuadratureConfig.default(d)
        self.table = build_table(d, "bond-avoiding", self.M)
        self.warnings = []
        self._green_memo = {}
        self._memo = {}
        self._t_memo = {}
        self._conv_memo = {}
        self._wpair_memo = {}
        self._p_pows = [ONE]

    # -- elementary accessors ------------------------------------------------

    def green(self, n: int, l: int = 0, x=()) -> Interval:
        """Certified bracket of I_{n,l}(x); exact rational when n = 0."""
        key = (n, l, canonicalize(x))
        got = self._green_memo.get(key)
        if got is None:
            got = green_integral(self.dimension, n, l, key[2], self.quad_config)
            self._green_memo[key] = got
        return got

    def p_pow(self, r: int) -> Interval:
        while len(self._p_pows) <= r:
            self._p_pows.append(self._p_pows[-1] * self.p)
        return self._p_pows[r]

    @property
    def two_d_p(self) -> Interval:
        return self.p * (2 * self.dimension)

    @property
    def gamma1_bar(self) -> Interval:
        return from_fraction(self.constants.gamma1_bar(self.dimension))

    @property
    def gamma2_bar(self) -> Interval:
        return from_fraction(self.constants.gamma2_bar(self.dimension))

    @property
    def gamma3(self) -> Interval:
        return from_fraction(self.constants.gamma3)

    def a_count(self, r: int, c) -> int:
        return self.table.count(r, c)

    def a_total(self, r: int) -> int:
        return self.table.total(r)

    def a_closed(self, r: int) -> int:
        return self.table.count(r, ())

    def a_max(self, r: int) -> int:
        return max((count for _, count in self.table.items(r)), default=0)

    def a_moment2(self, r: int) -> int:
        d = self.dimension
        return sum(orbit_size(c, d) * norm2sq(c) * count for c, count in self.table.items(r))

    def a_sq_total(self, r: int) -> int:
        d = self.dimension
        return sum(orbit_size(c, d) * count * count for c, count in self.table.items(r))

    def srw_max(self, n: int) -> Fraction:
        """max_x D^{*n}(x), exact."""
        key = ("srw_max", n)
        got = self._memo.get(key)
        if got is None:
            if n == 0:
                got = Fraction(1)
            else:
                simple = build_table(self.dimension, "simple", n)
                denom = (2 * self.dimension) ** n
                got = max(Fraction(count, denom) for _, count in simple.items(n))
            self._memo[key] = got
        return got

    def _srw_table(self, l: int):
        """The l-step random walk distribution as {canonical point: Fraction}."""
        key = ("srw_table", l)
        got = self._conv_memo.get(key)
        if got is None:
            if l == 0:
                got = {(): Fraction(1)}
            else:
                simple = build_table(self.dimension, "simple", l)
                denom = (2 * self.dimension) ** l
                got = {c: Fraction(count, denom) for c, count in simple.items(l)}
            self._conv_memo[key] = got
        return got

    # -- ladder-polynomial moments ------------------------------------------

    def _q2_coeffs(self):
        key = "q2"
        got = self._memo.get(key)
        if got is None:
            got = _poly_square(_ladder_polynomial(self.dimension, self.M))
            self._memo[key] = got
        return got

    def q_square_moment(self, n: int) -> Interval:
        """Certified bracket of int q_M(D)^2 D^0 / (1-D)^n, by linearity.

        The squared ladder polynomial has non-negative integer
        coefficients, so the sum of coefficient-weighted brackets is an
        exact identity, not an estimate.
        """
        key = ("sq", n)
        got = self._memo.get(key)
        if got is None:
            acc = ZERO
            for j, cj in enumerate(self._q2_coeffs()):
                if cj:
                    acc = acc + self.green(n, j) * cj
            got = acc
            self._memo[key] = got
        return got

    # -- convolution tails ---------------------------------------------------

    def am_tau_sup(self, m: int) -> Interval:
        """Certified sup_x (a_M * tau^{*m})(x), without the p^M prefactor.

        Routes (minimum of all convergent ones):
        k-space Cauchy-Schwarz  sqrt(int q_M^2 tau^2) * sqrt(int tau^{2(m-1)})
        using a_M <= non-backtracking counts, and for small m an x-space
        Cauchy-Schwarz pairing the exact l2 mass of a_M against tau powers.
        """
        key = ("amtau", m)
        got = self._memo.get(key)
        if got is not None:
            return got
        if m < 1:
            raise ValueError("m must be at least 1")
        g2 = self.gamma2_bar
        candidates = []
        try:
            base = (self.q_square_moment(2) * g2 * g2).sqrt()
            if m == 1:
                candidates.append(base)
            else:
                tail = (self.green(2 * (m - 1), 0) * g2 ** (2 * (m - 1))).sqrt()
                candidates.append(base * tail)
        except DivergentIntegralError:
            pass
        if m <= 2:
            try:
                a_l2 = Interval(self.a_sq_total(self.M)).sqrt()
                tau_l2 = (self.green(2 * m, 0) * g2 ** (2 * m)).sqrt()
                candidates.append(a_l2 * tau_l2)
            except DivergentIntegralError:
                pass
        if not candidates:
            raise BoundUnavailableError(
                f"no convergent closure for the order-{m} convolution tail in "
                f"dimension {self.dimension}")
        got = candidates[0]
        for cand in candidates[1:]:
            got = _imin(got, cand)
        got = _nonneg(got)
        self._memo[key] = got
        return got

    def tail_term(self, m: int) -> Interval:
        """p^M (a_M * tau^{*m}) as a uniform-in-x certified bound."""
        return self.p_pow(self.M) * self.am_tau_sup(m)

    def _tail_or_crude(self) -> Interval:
        """Tail for the pointwise table: certified route, else the mass bound."""
        key = "tail1"
        got = self._memo.get(key)
        if got is None:
            crude = self.p_pow(self.M) * self.a_total(self.M)
            try:
                got = _imin(self.tail_term(1), crude)
            except BoundUnavailableError:
                got = crude
            self._memo[key] = got
        return got

    # -- pointwise two-point bounds ------------------------------------------

    def _t(self, c, n: int = 0) -> Interval:
        """Pointwise bound on the two-point function with >= n steps, clamped at 1."""
        key = (c, n)
        got = self._t_memo.get(key)
        if got is None:
            acc = ZERO
            for r in range(n, self.M):
                cnt = self.a_count(r, c)
                if cnt:
                    acc = acc + self.p_pow(r) * cnt
            got = _imin(ONE, _nonneg(acc + self._tail_or_crude()))
            self._t_memo[key] = got
        return got

    def tau_upper(self, x, constraint: StepConstraint = StepConstraint(0)) -> Interval:
        """Certified upper bound on the constrained two-point function at x.

        At-least-m constraints use walk extraction up to the cutoff M plus
        the convolution tail; exactly-m constraints use the step-weight
        domination (2dp)^m D^{*m}(x) and take the minimum with the
        at-least-m value.
        """
        c = canonicalize(x)
        base = self._t(c, constraint.count)
        if not constraint.exact:
            return base
        mass = srw_step_mass(self.dimension, constraint.count, c)
        exact_route = self.two_d_p ** constraint.count * from_fraction(mass)
        return _imin(exact_route, base)

    def tau_point_sup_nonzero(self) -> Interval:
        """Certified sup over x != 0 of the two-point bound table."""
        key = "tsup"
        got = self._memo.get(key)
        if got is None:
            best = self._tail_or_crude()
            seen = set()
            for r in range(1, self.M):
                for c, _ in self.table.items(r):
                    if c == () or c in seen:
                        continue
                    seen.add(c)
                    best = _imax(best, self._t(c, 0))
            got = _imin(ONE, best)
            self._memo[key] = got
        return got

    def tau_offdiag_l2(self) -> Interval:
        """Certified bound on sum_{x != 0} tau(x)^2 via the Fourier envelope."""
        key = "offdiag"
        got = self._memo.get(key)
        if got is None:
            full = self.green(2, 0) * self.gamma2_bar ** 2
            got = _nonneg(full - ONE)
            self._memo[key] = got
        return got

    def cross_sup(self, n: int) -> Interval:
        """Certified sup_z (tau * D^{*n} * tau)(z).

        Splits tau = delta + tau' and uses the exact walk maximum of
        D^{*n}, the pointwise supremum of tau', and the l2 mass of tau'.
        """
        key = ("cross", n)
        got = self._memo.get(key)
        if got is None:
            peak = from_fraction(self.srw_max(n))
            smear = self.tau_point_sup_nonzero() * 2
            got = _nonneg(peak + smear + self.tau_offdiag_l2())
            try:
                crude = self._loop_bound(2, n)
                got = _imin(got, crude)
            except DivergentIntegralError:
                pass
            self._memo[key] = got
        return got

    # -- Fourier loop bounds -------------------------------------------------

    def _ieven(self, n: int, l: int) -> Interval:
        """Certified int |D|^l / (1-D)^n via the even-power majorant."""
        if l % 2 == 0:
            return self.green(n, l)
        return (self.green(n, l - 1) + self.green(n, l + 1)) * Fraction(1, 2)

    def _loop_bound(self, k_tau: int, l: int) -> Interval:
        """Gamma2_bar^k int |D|^l / (1-D)^k, the closed loop envelope."""
        return self.gamma2_bar ** k_tau * self._ieven(k_tau, l)

    def nonrepulsive_bound(self, spec: DiagramSpec) -> Interval:
        """Closed Fourier bound for a diagram without disjointness constraints.

        With k legs and total step count l, the bound is
        gamma1_bar^l gamma2_bar^k I_{k,l}(0), with odd powers of D
        replaced by the even-power majorant |D|^l <= (D^{l-1}+D^{l+1})/2.
        Anchored evaluations share the same value since the closed-form
        bound is uniform in the anchor.
        """
        if spec.repulsive:
            raise ValueError("spec is repulsive; use the chain or named bounds")
        if spec.weight is not None:
            raise ValueError("weighted diagrams are bounded by the weighted_* methods")
        k = _KIND_LEGS[spec.kind]
        l = sum(c.count for c in spec.constraints)
        return self.gamma1_bar ** l * self._loop_bound(k, l)

    # -- closed chains of disjoint legs --------------------------------------

    def _chain_partition(self, legs):
        """Split a closed chain of constrained legs at the extraction cutoff.

        Returns (exact, straddle): exact[j] counts leg-length compositions
        whose total j stays below the cutoff M (these contribute exact walk
        terms p^j a_j), and straddle[m] counts composition prefixes whose
        completion necessarily reaches M bonds, leaving m two-point factors
        after the extracted walk (these contribute p^M (a_M * tau^{*m})).
        """
        M = self.M
        k = len(legs)
        exact = {}
        straddle = {}

        def rec(i, s):
            if i == k:
                exact[s] = exact.get(s, 0) + 1
                return
            trailing = sum(legs[j].count for j in range(i + 1, k))
            m_here = k - i
            c = legs[i]
            if c.exact:
                if s + c.count + trailing <= M - 1:
                    rec(i + 1, s + c.count)
                else:
                    straddle[m_here] = straddle.get(m_here, 0) + 1
                return
            threshold = M - s - trailing
            if threshold <= c.count:
                straddle[m_here] = straddle.get(m_here, 0) + 1
                return
            straddle[m_here] = straddle.get(m_here, 0) + 1
            for r in range(c.count, threshold):
                rec(i + 1, s + r)

        rec(0, 0)
        return exact, straddle

    def chain_bound(self, legs, anchor=(), repulsive: bool = True) -> Interval:
        """Certified bound on a closed chain of constrained two-point legs.

        The chain starts at the origin and ends at `anchor` (a lattice
        point, or the string "sup" for a supremum over endpoints); all
        intermediate vertices are summed.  With disjoint legs the union of
        the legs is a bond-avoiding walk, so short totals contribute exact
        walk counts and long ones the extraction tail; the closed Fourier
        loop bound applies in every case and the minimum is returned.
        """
        legs = tuple(legs)
        if not legs:
            raise ValueError("a chain needs at least one leg")
        L = sum(c.count for c in legs)
        k = len(legs)
        sup_anchor = anchor == "sup"
        c_anchor = None if sup_anchor else canonicalize(anchor)

        candidates = []
        k_free = sum(1 for c in legs if not c.exact)
        try:
            candidates.append(self.gamma1_bar ** L * self._loop_bound(k, L))
        except DivergentIntegralError:
            pass
        if k_free == 0:
            if sup_anchor:
                candidates.append(self.two_d_p ** L * from_fraction(self.srw_max(L)))
            else:
                mass = srw_step_mass(self.dimension, L, c_anchor)
                candidates.append(self.two_d_p ** L * from_fraction(mass))
        elif k_free < k:
            try:
                candidates.append(self.gamma1_bar ** L * self._loop_bound(k_free, L))
            except DivergentIntegralError:
                pass

        if repulsive:
            try:
                exact, straddle = self._chain_partition(legs)
                acc = ZERO
                for j, cnt in sorted(exact.items()):
                    aj = self.a_max(j) if sup_anchor else self.a_count(j, c_anchor)
                    if aj and cnt:
                        acc = acc + self.p_pow(j) * (cnt * aj)
                for m, mult in sorted(straddle.items()):
                    acc = acc + self.tail_term(m) * mult
                candidates.append(acc)
            except BoundUnavailableError:
                pass

        if not candidates:
            raise BoundUnavailableError(
                f"no convergent bound for a {k}-leg chain in dimension {self.dimension}")
        value = candidates[0]
        for cand in candidates[1:]:
            value = _imin(value, cand)
        return _nonneg(value)

    # -- named diagram bounds ------------------------------------------------

    def repulsive_bubble_bound(self, l1: int, l2: int, x) -> Interval:
        """Summed bubble with disjoint legs of at least l1 and l2 steps.

        Three-term extraction: the tail with two remaining factors, the
        tail with one remaining factor (one term per admissible first-leg
        length), and the exact walk terms.  If l1 + l2 >= M the extraction
        window is empty; the closed non-repulsive bound is returned and a
        warning is recorded.
        """
        c = canonicalize(x)
        if l1 + l2 >= self.M:
            self.warnings.append(
                f"bubble constraint l1+l2 = {l1 + l2} >= M = {self.M}: "
                "fell back to the non-repulsive closed bound")
            spec = DiagramSpec("bubble", (at_least(l1), at_least(l2)), repulsive=False)
            return self.nonrepulsive_bound(spec)
        acc = self.tail_term(2) + self.tail_term(1) * (self.M - l1 - l2)
        for s in range(l1, self.M - l2):
            for r in range(l2, self.M - s):
                cnt = self.a_count(r + s, c)
                if cnt:
                    acc = acc + self.p_pow(r + s) * cnt
        return _nonneg(acc)

    def double_connection_bound(self, n: int, x) -> Interval:
        """Pointwise bound on a double connection with both arms >= n steps.

        The two disjoint arms overcount each unordered configuration
        twice, whence the prefactor one half on the extraction terms.
        """
        if n < 1:
            raise ValueError("double connections need n >= 1")
        c = canonicalize(x)
        acc = self.tail_term(2) + self.tail_term(1) * (self.M - 2)
        for r in range(n, self.M):
            for s in range(n, self.M - r):
                cnt = self.a_count(r + s, c)
                if cnt:
                    acc = acc + self.p_pow(r + s) * cnt
        return _nonneg(acc * Fraction(1, 2))

    def double_connection_sum(self, n: int) -> Interval:
        """Certified bound on the double connection summed over all x != 0.

        The union of the two arms is a closed bond-avoiding circuit, so the
        exact part pairs circuit counts against per-split products of open
        walk counts (minimum of both), and the extraction tails carry the
        same one-half overcount factor.
        """
        if n < 1:
            raise ValueError("double connections need n >= 1")
        acc = ZERO
        for j in range(2 * n, self.M):
            closed = self.a_closed(j)
            term = 0
            rows = {}
            for r in range(n, j - n + 1):
                s = j - r
                prod = 0
                row_r = rows.get(r)
                if row_r is None:
                    row_r = dict(self.table.items(r))
                    rows[r] = row_r
                row_s = rows.get(s)
                if row_s is None:
                    row_s = dict(self.table.items(s))
                    rows[s] = row_s
                small, large = (row_r, row_s) if len(row_r) <= len(row_s) else (row_s, row_r)
                for cpt, cnt in small.items():
                    other = large.get(cpt)
                    if other:
                        prod += orbit_size(cpt, self.dimension) * cnt * other
                prod -= row_r.get((), 0) * row_s.get((), 0)
                term += min(closed, prod)
            if term:
                acc = acc + self.p_pow(j) * term
        mult1 = max(self.M - 2 * n, 0)
        acc = acc + self.tail_term(2) + self.tail_term(1) * mult1
        return _nonneg(acc * Fraction(1, 2))

    def weighted_double_connection_sum(self, n: int) -> Interval:
        """Certified bound on sum_x ||x||^2 times the double connection.

        Exact splits weight each circuit by the squared junction norm
        (never more than min(r, s)^2, or the exact per-point second
        moment of the split product).  Tails place the junction either on
        the extracted walk (squared norm at most the squared step index)
        or beyond it, where the triangle inequality
        ||x||^2 <= 2||w||^2 + 2||x-w||^2 routes the two pieces through the
        exact weighted walk table and the weighted pair assumptions.
        """
        if n < 1:
            raise ValueError("double connections need n >= 1")
        d = self.dimension
        acc = ZERO
        for j in range(2 * n, self.M):
            closed = self.a_closed(j)
            term = 0
            rows = {}
            for r in range(n, j - n + 1):
                s = j - r
                row_r = rows.setdefault(r, dict(self.table.items(r)))
                row_s = rows.setdefault(s, dict(self.table.items(s)))
                small, large = (row_r, row_s) if len(row_r) <= len(row_s) else (row_s, row_r)
                wprod = 0
                for cpt, cnt in small.items():
                    other = large.get(cpt)
                    if other:
                        wprod += orbit_size(cpt, d) * norm2sq(cpt) * cnt * other
                term += min(min(r, s) ** 2 * closed, wprod)
            if term:
                acc = acc + self.p_pow(j) * term
        interior_cap = sum(j * j for j in range(n, self.M))
        acc = acc + self.tail_term(1) * interior_cap
        awt = ZERO
        for cpt, cnt in self.table.items(self.M):
            w2 = norm2sq(cpt)
            if w2:
                awt = awt + self._t(cpt, 0) * (orbit_size(cpt, d) * w2 * cnt)
        acc = acc + self.p_pow(self.M) * awt * 2
        acc = acc + self._weighted_tail_bridge() * 2
        return _nonneg(acc * Fraction(1, 2))

    def _weighted_tail_bridge(self) -> Interval:
        """p^M sum_w a_M(w) (weighted pair sum anchored at w), both routes.

        The spectral route differentiates the ladder transform twice and
        pairs it against the certified loop integrals; the assumption
        route spends the weighted pair members by anchor region.
        """
        key = "wbridge"
        got = self._memo.get(key)
        if got is not None:
            return got
        d = self.dimension
        routes = []
        # assumption route: classify the walk endpoint by region.
        try:
            w_origin = self.w_pair_bound(0, ORIGIN)
            w_nbr = self.w_pair_bound(0, NEIGHBOR)
            w_far = self.w_pair_bound(0, FAR)
            closed = self.a_closed(self.M)
            nbr = self.a_count(self.M, (1,)) * 2 * d
            rest = self.a_total(self.M) - closed - nbr
            val = w_origin * closed + w_nbr * nbr + w_far * rest
            routes.append(self.p_pow(self.M) * val)
        except (BoundUnavailableError, DivergentIntegralError):
            pass
        # spectral route: |sum_w ||w||^2 b_M(w) (tau*tau)(w)| via the
        # differentiated ladder transform.
        try:
            q = _ladder_polynomial(d, self.M)
            acc = ZERO
            for j, cj in enumerate(q):
                if cj and j >= 1:
                    acc = acc + self._ieven(2, j) * (j * abs(cj))
            sin_part = ZERO
            for j, cj in enumerate(q):
                if cj and j >= 2:
                    sin_part = sin_part + self._sin_loop(2, j - 2) * (j * (j - 1) * abs(cj))
            total = (acc + sin_part * Fraction(1, d * d)) * self.gamma2_bar ** 2
            routes.append(self.p_pow(self.M) * total)
        except DivergentIntegralError:
            pass
        if not routes:
            raise BoundUnavailableError(
                f"no convergent weighted tail bridge in dimension {d}")
        got = routes[0]
        for r in routes[1:]:
            got = _imin(got, r)
        got = _nonneg(got)
        self._memo[key] = got
        return got

    def _sin_loop(self, n: int, l: int) -> Interval:
        """Certified int |D|^l sum_i sin^2(k_i) / (1-D)^n.

        For even powers the angular factor reduces exactly to a difference
        of brackets at shifted arguments,
        int D^{2a} sin^2(k_1) / (1-D)^n = (I_{n,2a}(0) - I_{n,2a}(2 e_1))/2.
        """
        if l % 2 == 1:
            half = Fraction(1, 2)
            return (self._sin_loop(n, l - 1) + self._sin_loop(n, l + 1)) * half
        base = self.green(n, l) - self.green(n, l, (2,))
        return _nonneg(base * Fraction(self.dimension, 2))

    # -- weighted pair sums and their consumers ------------------------------

    def _kind_of(self, x) -> str:
        c = canonicalize(x)
        if c == ():
            return ORIGIN
        if c == (1,):
            return NEIGHBOR
        return FAR

    def _a_conv_srw(self, r: int, l: int):
        """(a_r * D^{*l}) as {canonical point: Fraction}, exact."""
        key = ("aconv", r, l)
        got = self._conv_memo.get(key)
        if got is not None:
            return got
        d = self.dimension
        tab = {c: Fraction(count) for c, count in self.table.items(r)}
        for _ in range(l):
            out = {}
            targets = set()
            for c in tab:
                targets.add(c)
                targets.update(canonical_neighbors(c, d))
            for c in targets:
                rep = pad(c, d)
                total = Fraction(0)
                for i in range(d):
                    for sign in (1, -1):
                        nb = list(rep)
                        nb[i] += sign
                        val = tab.get(canonicalize(nb))
                        if val is not None:
                            total += val
                if total:
                    out[c] = total / (2 * d)
            tab = out
        self._conv_memo[key] = tab
        return tab

    def _weighted_t_sum(self, tab, anchor_rep, fine: bool) -> Interval:
        """sum_v T(v) ||anchor - v||^2 tau(anchor - v), certified.

        `fine` iterates concrete orbit points against the pointwise table;
        otherwise the exact zeroth and second moments of T are paired with
        the off-origin supremum of the two-point bound.
        """
        d = self.dimension
        if fine:
            acc = ZERO
            for c, val in tab.items():
                if val == 0:
                    continue
                for v in orbit(c, d):
                    u = tuple(a - b for a, b in zip(anchor_rep, v))
                    w2 = sum(ui * ui for ui in u)
                    if w2 == 0:
                        continue
                    acc = acc + self._t(canonicalize(u), 0) * (val * w2)
            return _nonneg(acc)
        m0 = sum(orbit_size(c, d) * val for c, val in tab.items())
        m2 = sum(orbit_size(c, d) * norm2sq(c) * val for c, val in tab.items())
        anchor_norm = sum(a * a for a in anchor_rep)
        bound = self.tau_point_sup_nonzero() * from_fraction(
            Fraction(m2) + Fraction(anchor_norm) * Fraction(m0))
        return _nonneg(bound)

    def w_pair_bound(self, l: int, region: str) -> Interval:
        """Certified weighted pair sum sum_y ||y||^2 tau(y) (tau * D^{*l})(x-y).

        Far anchors spend the assumed member weights directly (possibly
        after smearing down to the deepest far member).  Origin and
        neighbor anchors extract the inner two-point function down to the
        depth-six member: exact short convolutions are paired against the
        pointwise table inside the exact radius and against table moments
        beyond it.
        """
        key = (l, region)
        got = self._wpair_memo.get(key)
        if got is not None:
            return got
        consts = self.constants
        if region == FAR:
            if consts.has_weight(1, l, FAR):
                got = self.gamma3 * from_fraction(consts.weight(1, l, FAR))
            else:
                deepest = max((ll for (n, ll, reg), _ in consts.weights
                               if n == 1 and reg == FAR and ll < l), default=None)
                if deepest is None:
                    raise BoundUnavailableError(
                        f"no far weighted member at or below l = {l}")
                got = self.gamma3 * from_fraction(consts.weight(1, deepest, FAR))
                got = _imax(got, self.w_pair_bound(deepest, ORIGIN))
                got = _imax(got, self.w_pair_bound(deepest, NEIGHBOR))
            self._wpair_memo[key] = got
            return got
        if region not in (ORIGIN, NEIGHBOR):
            raise ValueError(f"unknown region {region!r}")
        depth = 6
        if l > depth:
            raise BoundUnavailableError(
                f"weighted pair sums are only assumed up to {depth} exact steps")
        if l == depth:
            got = self.gamma3 * from_fraction(consts.weight(1, depth, region))
            self._wpair_memo[key] = got
            return got
        anchor_rep = pad((), self.dimension) if region == ORIGIN else pad((1,), self.dimension)
        fine0 = l <= self.exact_radius
        acc = self._weighted_t_sum(self._srw_table(l), anchor_rep, fine0)
        for r in range(1, depth - l):
            fine = (r + l) <= self.exact_radius
            conv = self._a_conv_srw(r, l)
            acc = acc + self._weighted_t_sum(conv, anchor_rep, fine) * self.p_pow(r)
        tail = self.two_d_p ** (depth - l) * self.gamma3 * from_fraction(
            consts.weight(1, depth, region))
        got = _nonneg(acc + tail)
        self._wpair_memo[key] = got
        return got

    def _w_of_kind(self, n: int, kind: str) -> Interval:
        if kind == NEIGHBOR:
            value = self.w_pair_bound(n, NEIGHBOR)
            try:
                value = _imin(value, self.w_pair_bound(n + 1, ORIGIN))
            except BoundUnavailableError:
                pass
            return value
        return self.w_pair_bound(n, kind)

    def w_pair_max(self, n: int) -> Interval:
        """Supremum over every anchor of the weighted pair sum of depth n."""
        value = _imax(self.w_pair_bound(n, FAR), self._w_of_kind(n, NEIGHBOR))
        return _imax(value, self.w_pair_bound(n, ORIGIN))

    def weighted_H(self, n: int, x) -> Interval:
        """Certified bound on the weighted connection diagram anchored at x.

        All three defining configurations reduce, after dropping the
        disjointness constraint and extracting the constrained steps, to
        (2dp)^n times a weighted pair sum of depth n; neighbor anchors
        also use the exact neighbor average, which trades the anchor for
        one more smearing step at the origin.
        """
        if n < 0:
            raise ValueError("n must be non-negative")
        return self.two_d_p ** n * self._w_of_kind(n, self._kind_of(x))

    def weighted_H_sup(self, n: int) -> Interval:
        """Supremum over x != 0 of the weighted connection diagram bound."""
        inner = _imax(self.w_pair_bound(n, FAR), self._w_of_kind(n, NEIGHBOR))
        return self.two_d_p ** n * inner

    def weighted_HD(self, n: int = 1) -> Interval:
        """Certified bound on the norm-weighted double connection sum."""
        return self.weighted_double_connection_sum(n)

    # -- the pivotal-edge weighted diagram -----------------------------------

    def _s_loop_total(self) -> Interval:
        """The four-leg chain with two single-bond legs, closed at the origin."""
        key = "sloop"
        got = self._memo.get(key)
        if got is None:
            legs = (exactly(1), at_least(0), at_least(0), exactly(1))
            got = self.chain_bound(legs, anchor=())
            self._memo[key] = got
        return got

    def _hprime_origin(self) -> Interval:
        """Self-consistent bound at the origin for the pivotal-edge weight.

        The inclusion-exclusion step bounds the single-bond weighted sum by
        the plain two-point weight plus a term that contains the quantity
        being bounded, multiplied by (2dp) sup (tau * D * tau).  When that
        coefficient is certified below one the linear relation is solved;
        otherwise the bound is reported unavailable.
        """
        key = "hprime0"
        got = self._memo.get(key)
        if got is not None:
            return got
        q = self.two_d_p * self.cross_sup(1)
        if not q.strictly_less(ONE):
            raise BoundUnavailableError(
                "pivotal-edge weighted bound: self-consistency coefficient "
                "is not certified below one")
        direct = self.two_d_p * self._w_of_kind(1, ORIGIN)
        trailing = self._s_loop_total() * self.two_d_p * self.w_pair_max(1)
        got = _nonneg((direct + trailing) / (ONE - q))
        self._memo[key] = got
        return got

    def weighted_Hprime(self, n: int, x) -> Interval:
        """Certified bound on the weighted diagram whose weight spans a
        pivotal edge plus a connection, anchored at x.

        The first term extracts the pivotal bond and lands on the plain
        weighted pair sum; the inclusion-exclusion correction couples to
        the self-consistent origin value and to the closed four-leg chain
        with two single-bond legs.
        """
        if n < 1:
            raise ValueError("n must be at least 1")
        kind = self._kind_of(x)
        h0 = self._hprime_origin()
        if n == 1 and kind == ORIGIN:
            return h0
        first = self.two_d_p ** n * self._w_of_kind(n, kind)
        coupling = self.two_d_p ** n * self.cross_sup(n) * h0
        trailing = self._s_loop_total() * self.two_d_p ** n * self.w_pair_max(n)
        return _nonneg(first + coupling + trailing)

    def weighted_Hprime_sup(self, n: int) -> Interval:
        """Supremum over all x of the pivotal-edge weighted diagram bound."""
        h0 = self._hprime_origin()
        far = self.two_d_p ** n * _imax(
            self.w_pair_bound(n, FAR), self._w_of_kind(n, NEIGHBOR))
        coupling = self.two_d_p ** n * self.cross_sup(n) * h0
        trailing = self._s_loop_total() * self.two_d_p ** n * self.w_pair_max(n)
        value = _nonneg(far + coupling + trailing)
        if n == 1:
            value = _imax(value, h0)
        return value

    # -- short named scalars -------------------------------------------------

    def tau3_neighbor(self) -> Interval:
        """Two-point bound at a neighbor with at least three steps."""
        return self._t((1,), 3)

    def theta2(self) -> Interval:
        """Worst two-point bound, >= 2 steps, over the two-sphere at distance 2."""
        return _imax(self._t((2,), 2), self._t((1, 1), 2))

    def theta4(self) -> Interval:
        """Worst two-point bound, >= 4 steps, over the two-sphere at distance 2."""
        return _imax(self._t((2,), 4), self._t((1, 1), 4))

    def vartheta(self) -> Interval:
        """Smeared far bound d^2/((d-1)(d-2)) (D^{*3} * tau_5)(0)."""
        d = self.dimension
        if d < 3:
            raise BoundUnavailableError("the smeared far bound needs d >= 3")
        acc = ZERO
        for c, mass in self._srw_table(3).items():
            acc = acc + self._t(c, 5) * mass
        return _nonneg(acc * Fraction(d * d, (d - 1) * (d - 2)))
