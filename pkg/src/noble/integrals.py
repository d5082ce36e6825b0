"""Certified brackets on simple-random-walk Green's-function integrals.

The central object is

    I_{n,l}(x) = int_{[-pi,pi]^d} e^{i k.x} Dhat(k)^l / (1 - Dhat(k))^n
                 dk / (2 pi)^d,

with Dhat(k) = (1/d) sum_i cos(k_i).  Pure Green's powers are computed from
the one-dimensional Laplace representation

    I_{m,0}(x) = (1/Gamma(m)) int_0^inf t^{m-1} e^{-t}
                 prod_j I_{|x_j|}(t/d) dt,

split into Gauss-Legendre panels on [0, T] with a certified sixth-derivative
error bound, plus a truncation tail that is evaluated (not merely bounded)
through Taylor models of the scaled Bessel factors in 1/t.  Nonzero step
powers l reduce to pure powers through the exact binomial identity
Dhat^l = (1 - (1-Dhat))^l, whose negative-power pieces are finite rational
walk sums; the textbook convolution over the l-step distribution is kept as
an independent cross-check route.

All brackets for the same integral are intersected across calls, so
enlarging a quadrature budget can only ever narrow a returned bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial

from .bessel import (
    scaled_bessel_series,
    scaled_envelope_upper,
    taylor_model,
)
from .intervals import Interval, fsum
from .lattice import canonicalize, orbit
from .walks import build_table, srw_step_mass

DEFAULT_SERIES_TERMS = 10


class DivergentIntegralError(ValueError):
    """Requested critical integral does not converge (2n >= d)."""


class SingularityError(ZeroDivisionError):
    """Evaluation exactly at a pole of a generating function."""


class ResourceBudgetError(RuntimeError):
    """A tolerance was requested that the configured budget cannot meet."""

    def __init__(self, message, achieved_width):
        super().__init__(message)
        self.achieved_width = achieved_width


# ---------------------------------------------------------------------------
# quadrature configuration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QuadratureConfig:
    """Budget knobs for the one-dimensional certified quadrature.

    T = tail_multiple * d is the truncation point; panel_width the uniform
    Gauss panel length; asym_order the Taylor-model order used to evaluate
    the tail; envelope_tail routes the tail through the elementary Bessel
    envelope instead (adequate once d is large, where the tail is
    negligible anyway).
    """

    tail_multiple: int = 16
    panel_width: Fraction = Fraction(1, 10)
    asym_order: int = 16
    envelope_tail: bool = False

    @staticmethod
    def default(d):
        if d <= 13:
            return QuadratureConfig(16, Fraction(1, 10))
        if d <= 30:
            return QuadratureConfig(12, Fraction(1, 6))
        return QuadratureConfig(4, Fraction(1, 4), envelope_tail=True)

    def label(self):
        return (f"T{self.tail_multiple}"
                f"_h{self.panel_width.numerator}-{self.panel_width.denominator}"
                f"_K{self.asym_order}"
                f"_{'env' if self.envelope_tail else 'tm'}")


# ---------------------------------------------------------------------------
# shared per-dimension node tables
# ---------------------------------------------------------------------------

_GAUSS_OFFSET = Interval(Fraction(3, 5)).sqrt()  # node offset scale on [-1,1]
_W_EDGE = Fraction(5, 9)
_W_MID = Fraction(8, 9)


class NodeTable:
    """Gauss nodes, scaled-Bessel rows, and error moments for one (d, cfg).

    Rows are keyed by Bessel order and computed lazily; every integral for
    this dimension recombines the same table, which is what keeps the
    many-integral workload tractable.
    """

    def __init__(self, d, cfg):
        self.d = d
        self.cfg = cfg
        self.T = cfg.tail_multiple * d
        h = cfg.panel_width
        self.n_panels = int(self.T / h)
        if self.n_panels * h != self.T:
            raise ValueError("panel width must divide the truncation point")
        self.h = h
        half = h / 2
        self.panel_left = [i * h for i in range(self.n_panels)]
        nodes = []
        weights = []
        w_edge = Interval(half * _W_EDGE)
        w_mid = Interval(half * _W_MID)
        offset = _GAUSS_OFFSET * half
        for i in range(self.n_panels):
            mid = Interval(i * h + half)
            nodes.extend((mid - offset, mid, mid + offset))
            weights.extend((w_edge, w_mid, w_edge))
        self.nodes = nodes
        self.weights = weights
        self._rows = {}
        self._s0_left = None
        self._moments = {}

    def row(self, nu):
        """Scaled Bessel values e^{-t/d} I_nu(t/d) at every node."""
        if nu not in self._rows:
            d = self.d
            self._rows[nu] = [scaled_bessel_series(nu, t / d)
                              for t in self.nodes]
        return self._rows[nu]

    def s0_left(self):
        """Upper bounds on (e^{-z} I_0(z))^d at panel left endpoints."""
        if self._s0_left is None:
            d = self.d
            vals = []
            for a in self.panel_left:
                if a == 0:
                    vals.append(Interval.exact(1))
                else:
                    vals.append(scaled_bessel_series(0, Interval(a) / d) ** d)
            self._s0_left = vals
        return self._s0_left

    def error_moment(self, e):
        """sum over panels of S0(a_p) * b_p^e, for the f^(6) error bound."""
        if e not in self._moments:
            s0 = self.s0_left()
            h = self.h
            total = Interval.exact(0)
            for p, s in enumerate(s0):
                b = (p + 1) * h
                total = total + s * Interval(b ** e)
            self._moments[e] = total
        return self._moments[e]


@lru_cache(maxsize=16)
def node_table(d, cfg):
    return NodeTable(d, cfg)


# ---------------------------------------------------------------------------
# Taylor-model algebra for the truncation tail
# ---------------------------------------------------------------------------

def _tm_sup(coeffs, v0):
    return fsum(abs(c) * v0 ** q for q, c in enumerate(coeffs))


def _tm_mul(a, b, v0, degree):
    ca, ra = a
    cb, rb = b
    full = [Interval.exact(0)] * (len(ca) + len(cb) - 1)
    for i, x in enumerate(ca):
        for j, y in enumerate(cb):
            full[i + j] = full[i + j] + x * y
    kept = full[:degree + 1]
    overflow = fsum(abs(c) * v0 ** q
                    for q, c in enumerate(full) if q > degree)
    sup_a = _tm_sup(ca, v0)
    sup_b = _tm_sup(cb, v0)
    rem = ra * (sup_b + rb) + rb * sup_a + overflow
    return kept, Interval(0, rem.hi)


def _tm_power(base, n, v0, degree):
    result = ([Interval.exact(1)], Interval.exact(0))
    b = base
    e = n
    while e:
        if e & 1:
            result = _tm_mul(result, b, v0, degree)
        b = _tm_mul(b, b, v0, degree)
        e >>= 1
    return result


def _tail_bracket(table, m, orders):
    """Evaluated enclosure of int_T^inf t^{m-1} prod_j h_{nu_j}(t/d) dt.

    ``orders`` is the full multiset of coordinate Bessel orders (d entries,
    given as {order: multiplicity}).  Taylor models in v = 1/z are combined
    per factor; the polynomial part integrates in closed form and only the
    model remainder widens the result.
    """
    d = table.d
    T = table.T
    cfg = table.cfg
    z0 = Interval(Fraction(T, d))
    v0 = 1 / z0
    degree = cfg.asym_order
    product_tm = ([Interval.exact(1)], Interval.exact(0))
    for nu, mult in sorted(orders.items()):
        eta, rem = taylor_model(nu, z0, cfg.asym_order)
        factor = (list(eta), rem)
        product_tm = _tm_mul(product_tm,
                             _tm_power(factor, mult, v0, degree),
                             v0, degree)
    coeffs, rem = product_tm
    rho = Fraction(d, T)
    rho_half_d = (Interval(rho) ** d).sqrt()
    total = Interval.exact(0)
    rho_pow = Interval.exact(1)
    Tm = Interval(Fraction(T) ** m)
    for r, beta in enumerate(coeffs):
        denom = Fraction(d, 2) + r - m
        total = total + beta * rho_pow / denom
        rho_pow = rho_pow * rho
    total = total * rho_half_d * Tm
    rem_scale = (rem * rho_half_d * Tm / (Fraction(d, 2) - m)).hi
    return total + Interval(-rem_scale, rem_scale)


def _tail_envelope(table, m):
    """Elementary upper bound on the truncation tail (lower bound 0).

    Per factor, e^{-t/d} I_nu(t/d) <= (1 + d/(4T)) sqrt(d/(2 pi t)) for
    t >= T >= d, so the tail is at most
    (1 + d/(4T))^d (d/(2 pi))^{d/2} T^{m-d/2} / (d/2 - m).
    """
    d = table.d
    T = table.T
    if T < d:
        raise ValueError("envelope tail route needs T >= d")
    bump = (1 + Interval(Fraction(d, 4 * T))) ** d
    decay = (Interval(Fraction(d, 1)) / (2 * Interval.pi() * T)) ** d
    upper = bump * decay.sqrt() * Fraction(T) ** m / (Fraction(d, 2) - m)
    return Interval(0, upper.hi)


# ---------------------------------------------------------------------------
# pure Green's powers K_m(x) = I_{m,0}(x)
# ---------------------------------------------------------------------------

_memo = {}


def cached_brackets():
    """Read-only view of the in-process bracket store (for persistence)."""
    return dict(_memo)


def seed_bracket(d, m, x, interval, producer="cache"):
    """Install a previously certified bracket, intersecting with any
    bracket already known in this process."""
    key = (d, m, canonicalize(x))
    if key in _memo:
        interval = interval.intersect(_memo[key][0])
    _memo[key] = (interval, producer)


def k_integral(d, m, x, cfg=None):
    """Certified bracket of I_{m,0}(x) for m >= 1, 2m < d."""
    if m < 1:
        raise ValueError("k_integral handles positive Green's powers only")
    if 2 * m >= d:
        raise DivergentIntegralError(
            f"I_({m},0) diverges in dimension {d} (needs 2n < d)")
    cfg = cfg or QuadratureConfig.default(d)
    cx = canonicalize(x)
    key = (d, m, cx)
    hit = _memo.get(key)
    if hit is not None and hit[1] == cfg.label():
        return hit[0]
    table = node_table(d, cfg)

    # panel sums
    orders = {}
    for v in cx:
        orders[v] = orders.get(v, 0) + 1
    zero_mult = d - len(cx)
    if zero_mult:
        orders[0] = orders.get(0, 0) + zero_mult
    rows = {nu: table.row(nu) for nu in orders}
    acc = Interval.exact(0)
    for idx, (t, w) in enumerate(zip(table.nodes, table.weights)):
        f = t ** (m - 1) if m > 1 else Interval.exact(1)
        for nu, mult in orders.items():
            f = f * rows[nu][idx] ** mult
        acc = acc + w * f
    # certified quadrature error
    h7 = Interval(table.h ** 7)
    err = Interval.exact(0)
    for j in range(min(6, m - 1) + 1):
        fall = 1
        for i in range(j):
            fall *= (m - 1) - i
        if fall == 0:
            continue
        err = err + (comb(6, j) * fall * 2 ** (6 - j)
                     * table.error_moment(m - 1 - j))
    err_hi = (h7 * err / 2016000).hi
    acc = acc + Interval(-err_hi, err_hi)
    # truncation tail
    if cfg.envelope_tail:
        acc = acc + _tail_envelope(table, m)
    else:
        acc = acc + _tail_bracket(table, m, orders)
    bracket = acc / factorial(m - 1)

    # monotone series partial sums are exact lower bounds
    ps = _partial_sum(d, m, cx)
    if Fraction(*bracket.hi.as_integer_ratio()) < ps:
        raise AssertionError(
            f"quadrature bracket fell below the exact partial sum "
            f"for I_({m},0)({cx}) in d={d}")
    # raise the lower endpoint if the exact floor beats it
    floor = Interval(ps)
    if floor.lo > bracket.lo:
        bracket = Interval(floor.lo, bracket.hi)

    if key in _memo:
        bracket = bracket.intersect(_memo[key][0])
    _memo[key] = (bracket, cfg.label())
    return bracket


def _partial_sum(d, m, cx, terms=DEFAULT_SERIES_TERMS):
    """Exact rational sum_{j<=terms} C(j+m-1, m-1) D^{*j}(x)."""
    table = build_table(d, "simple", terms)
    total = Fraction(0)
    for j in range(terms + 1):
        c = table.count(j, cx)
        if c:
            total += comb(j + m - 1, m - 1) * Fraction(c, (2 * d) ** j)
    return total


# ---------------------------------------------------------------------------
# general integrals
# ---------------------------------------------------------------------------

def negative_k(d, m, x):
    """Exact rational I_{-m,0}(x) = sum_u C(m,u)(-1)^u D^{*u}(x), m >= 0."""
    if m < 0:
        raise ValueError("negative_k expects the positive exponent m >= 0")
    cx = canonicalize(x)
    total = Fraction(0)
    for u in range(m + 1):
        mass = srw_step_mass(d, u, cx)
        if mass:
            total += comb(m, u) * (-1) ** u * mass
    return total


def green_integral(d, n, l, x, cfg=None):
    """Certified bracket of I_{n,l}(x).

    The step power is removed exactly: Dhat^l = sum_s C(l,s)(-Rhat)^s with
    Rhat = 1 - Dhat, leaving pure Green's powers I_{n-s,0}; the terms with
    s >= n are finite rational walk sums and contribute no width at all.
    """
    if n < 0 or l < 0:
        raise ValueError("integral powers must be non-negative")
    if n == 0:
        return Interval(srw_step_mass(d, l, x))
    if 2 * n >= d:
        raise DivergentIntegralError(
            f"I_({n},{l}) diverges in dimension {d} (needs 2n < d)")
    cx = canonicalize(x)
    rational = Fraction(0)
    bracket = Interval.exact(0)
    for s in range(l + 1):
        coeff = comb(l, s) * (-1) ** s
        m = n - s
        if m >= 1:
            bracket = bracket + coeff * k_integral(d, m, cx, cfg)
        else:
            rational += coeff * negative_k(d, -m, cx)
    return bracket + Interval(rational)


def green_integral_convolved(d, n, l, x, cfg=None):
    """I_{n,l}(x) through the literal convolution with the l-step
    distribution: sum_y D^{*l}(y) I_{n,0}(x-y), exact rational masses.

    Cross-check route; enumerates the l-step support, so keep l small.
    """
    if n < 1:
        raise ValueError("convolution route needs n >= 1")
    if l == 0:
        return k_integral(d, n, x, cfg)
    step_table = build_table(d, "simple", max(l, DEFAULT_SERIES_TERMS))
    x = tuple(x) + (0,) * (d - len(tuple(x)))
    if len(x) != d:
        raise ValueError("point does not fit in dimension")
    total = Interval.exact(0)
    seen = 0
    for c, count in step_table.items(l):
        mass = Fraction(count, (2 * d) ** l)
        for y in orbit(c, d) if c else [(0,) * d]:
            shifted = tuple(a - b for a, b in zip(x, y))
            total = total + mass * k_integral(d, n, shifted, cfg)
            seen += 1
    return total


def srw_green(x, z, d, terms=DEFAULT_SERIES_TERMS):
    """Bracket of the random-walk generating function C_z(x) = sum p_n(x) z^n
    for 0 <= z <= 1/(2d); the critical point routes to the Green integral."""
    z = Fraction(z)
    if z < 0 or z > Fraction(1, 2 * d):
        raise ValueError(f"z={z} outside [0, 1/{2 * d}]")
    if z == Fraction(1, 2 * d):
        return k_integral(d, 1, x)
    table = build_table(d, "simple", terms)
    cx = canonicalize(x)
    partial = Fraction(0)
    for n in range(terms + 1):
        c = table.count(n, cx)
        if c:
            partial += c * z ** n
    ratio = 2 * d * z
    tail_hi = ratio ** (terms + 1) / (1 - ratio)
    return Interval(partial) + Interval(0, Fraction(tail_hi))


# ---------------------------------------------------------------------------
# non-backtracking generating function
# ---------------------------------------------------------------------------

def dhat(k, d):
    """Fourier transform of the step distribution, (1/d) sum_i cos(k_i)."""
    k = tuple(k)
    if len(k) != d:
        raise ValueError("k/dimension mismatch")
    return math.fsum(math.cos(ki) for ki in k) / d


def nbw_hat(k, z, d):
    """Closed form of the non-backtracking generating function,
    (1 - z^2) / (1 + (2d-1) z^2 - 2 d z Dhat(k))."""
    dk = dhat(k, d)
    denom = 1 + (2 * d - 1) * z * z - 2 * d * z * dk
    if denom == 0:
        raise SingularityError(
            f"non-backtracking generating function pole at k={k}, z={z}")
    return (1 - z * z) / denom


def nbw_critical(x, d, cfg=None):
    """Bracket of the critical non-backtracking two-point function
    B_{1/(2d-1)}(x) = (2d-2)/(2d-1) * I_{1,0}(x)."""
    if d < 3:
        raise DivergentIntegralError(
            "critical non-backtracking values need d >= 3")
    return Fraction(2 * d - 2, 2 * d - 1) * k_integral(d, 1, x, cfg)


def critical_prefactor(d):
    """Exact rational link factor (2d-2)/(2d-1)."""
    return Fraction(2 * d - 2, 2 * d - 1)
