"""Certified enclosures of scaled modified Bessel functions.

Everything is expressed through h_nu(z) = e^{-z} I_nu(z) for integer nu >= 0,
the form in which products over lattice coordinates stay bounded.  Three
certified tools are provided:

* a power-series enclosure with a geometric tail bound, exact at small and
  moderate z (all series terms are positive, so there is no cancellation);
* an asymptotic enclosure built from the integral representation
      h_nu(z) = (2/pi) * int_0^1 T_nu(1-2s^2) e^{-2 z s^2} / sqrt(1-s^2) ds,
  where T_nu is the Chebyshev polynomial; expanding 1/sqrt(1-s^2) to K terms
  and extending the Gaussian moments to infinity gives
      h_nu(z) = sqrt(v) * sum_q eta_q v^q + err(z),       v = 1/z,
  with every dropped piece bounded explicitly (moment correction, series
  remainder split at s^2 = 7/8, Chebyshev bound |T_nu| <= 1);
* the same data repackaged as a Taylor model in v, valid uniformly on
  z >= z0, which lets truncation tails of the Green's-function integrals be
  evaluated semi-analytically instead of merely bounded.

An elementary envelope h_nu(z) <= (1 + 1/(4z))/sqrt(2 pi z) for z >= 1 (and
h_nu <= 1 everywhere) backs the crude tail route used in high dimension.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import comb, factorial

from .intervals import Interval

# ---------------------------------------------------------------------------
# exact coefficient tables
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def chebyshev_shifted(nu):
    """Integer coefficients of A_nu(u) := T_nu(1 - 2u) in powers of u."""
    if nu == 0:
        return (1,)
    if nu == 1:
        return (1, -2)
    a = chebyshev_shifted(nu - 1)
    b = chebyshev_shifted(nu - 2)
    # A_nu = 2(1-2u) A_{nu-1} - A_{nu-2}
    out = [0] * (nu + 1)
    for i, c in enumerate(a):
        out[i] += 2 * c
        out[i + 1] -= 4 * c
    for i, c in enumerate(b):
        out[i] -= c
    return tuple(out)


@lru_cache(maxsize=None)
def _sqrt_recip_coeffs(terms):
    """c_m = C(2m, m)/4^m, the series 1/sqrt(1-x) = sum c_m x^m."""
    return tuple(Fraction(comb(2 * m, m), 4 ** m) for m in range(terms))


@lru_cache(maxsize=None)
def gamma_half_integer(q):
    """Interval for Gamma(q + 1/2) = (2q)! sqrt(pi) / (4^q q!)."""
    return Interval.pi().sqrt() * Fraction(factorial(2 * q),
                                           4 ** q * factorial(q))


# ---------------------------------------------------------------------------
# series route
# ---------------------------------------------------------------------------

def scaled_bessel_series(nu, z):
    """Enclosure of e^{-z} I_nu(z) from the ascending series.

    All terms are positive; truncation is covered by a geometric bound on
    the term ratio, so the result is a true two-sided bracket.
    """
    z = z if isinstance(z, Interval) else Interval(z)
    if z.lo < 0:
        raise ValueError("scaled_bessel_series needs z >= 0")
    half = z * Fraction(1, 2)
    ratio_num = half * half
    term = half ** nu / factorial(nu)
    total = term
    m = 0
    # grow until the geometric tail is negligible at working precision
    while True:
        m += 1
        term = term * ratio_num / (m * (m + nu))
        total = total + term
        q_hi = (ratio_num / ((m + 1) * (m + 1 + nu))).hi
        if q_hi < 0.5 and term.hi < 1e-40 * max(float(total.hi), 1e-300):
            break
        if m > 400:
            raise ArithmeticError(
                f"Bessel series did not converge fast enough at z={z!r}")
    # tail <= next_term / (1 - q)
    q = ratio_num / ((m + 1) * (m + 1 + nu))
    next_term = term * ratio_num / ((m + 1) * (m + 1 + nu))
    tail_hi = (next_term / (Interval(1) - q)).hi
    enclosure = Interval(total.lo, (total + Interval(0, tail_hi)).hi)
    return (enclosure * (-z).exp()).intersect(Interval(0, 1))


# ---------------------------------------------------------------------------
# asymptotic route
# ---------------------------------------------------------------------------

class AsymData:
    """Precomputed coefficient data for one (nu, order) pair."""

    __slots__ = ("nu", "order", "eta", "gamma", "q_max")

    def __init__(self, nu, order):
        self.nu = nu
        self.order = order
        cheb = chebyshev_shifted(nu)
        cs = _sqrt_recip_coeffs(order)
        # gamma_q: coefficients of A_nu(u) * sum_{m<order} c_m u^m
        gamma = [Fraction(0)] * (len(cheb) + order - 1)
        for i, a in enumerate(cheb):
            if a:
                for m, c in enumerate(cs):
                    gamma[i + m] += a * c
        self.gamma = tuple(gamma)
        self.q_max = len(gamma) - 1
        two_over_pi = 2 / Interval.pi()
        self.eta = tuple(
            two_over_pi * gamma_half_integer(q) * g / Fraction(2 ** (q + 1), 1)
            / Interval(2).sqrt()
            for q, g in enumerate(gamma))


@lru_cache(maxsize=None)
def asym_data(nu, order):
    return AsymData(nu, order)


def _asym_error(data, z):
    """Bound on |h_nu(z) - sqrt(v) sum eta_q v^q|, valid pointwise at z >= 1.

    Three pieces: the Gaussian-moment corrections (integration extended past
    s = 1, bounded by the exact incomplete-gamma finite sum), the
    1/sqrt(1-s^2) series remainder split at s^2 = 7/8, and the e^{-2 z s^2}
    mass beyond the split point.  Each piece is decreasing in z for z >= 1,
    and remains decreasing after multiplication by sqrt(z); the Taylor-model
    construction relies on that monotonicity.
    """
    if z.lo < 1:
        raise ValueError("asymptotic error bound needs z >= 1")
    exp_2z = (-2 * z).exp()
    inv_2z = 1 / (2 * z)
    # corr_q = int_1^inf s^{2q} e^{-2 z s^2} ds
    #        <= (1/2) e^{-2z} sum_{i<=q} q!/(q-i)! (2z)^{-i-1}
    moment_corr = Interval.exact(0)
    for q, g in enumerate(data.gamma):
        if not g:
            continue
        falling = 1
        inner = Interval.exact(0)
        power = inv_2z
        for i in range(q + 1):
            inner = inner + falling * power
            falling *= q - i
            power = power * inv_2z
        moment_corr = moment_corr + abs(g) * inner
    moment_corr = moment_corr * exp_2z * Fraction(1, 2)
    K = data.order
    v = 1 / z
    series_rem = (Interval(8).sqrt() * gamma_half_integer(K)
                  * (v * Fraction(1, 2)) ** K * (v * Fraction(1, 2)).sqrt()
                  * Fraction(1, 2))
    split_mass = Interval.pi() * Fraction(1, 2) * (z * Fraction(-7, 4)).exp()
    return (2 / Interval.pi()) * (moment_corr + series_rem + split_mass)


def scaled_bessel_asym(nu, z, order=16):
    """Enclosure of e^{-z} I_nu(z) from the asymptotic expansion."""
    z = z if isinstance(z, Interval) else Interval(z)
    data = asym_data(nu, order)
    if z.lo < 1:
        raise ValueError("asymptotic route needs z >= 1")
    v = 1 / z
    total = Interval.exact(0)
    for q in range(data.q_max, -1, -1):
        total = total * v + data.eta[q]
    value = total * v.sqrt()
    err = _asym_error(data, z).hi
    return (value + Interval(-err, err)).intersect(Interval(0, 1))


def scaled_bessel(nu, z, series_cutoff=16, order=16):
    """Enclosure of e^{-z} I_nu(z), routed by the size of z."""
    z = z if isinstance(z, Interval) else Interval(z)
    if z.hi <= series_cutoff:
        return scaled_bessel_series(nu, z)
    return scaled_bessel_asym(nu, z, order)


# ---------------------------------------------------------------------------
# envelope and Taylor model
# ---------------------------------------------------------------------------

def scaled_envelope_upper(z):
    """Upper bound on e^{-z} I_nu(z) for any integer nu >= 0.

    (1 + 1/(4z))/sqrt(2 pi z) for z >= 1; the trivial bound 1 otherwise.
    """
    z = z if isinstance(z, Interval) else Interval(z)
    if z.lo < 1:
        return Interval.exact(1)
    return (1 + 1 / (4 * z)) / (2 * Interval.pi() * z).sqrt()


def taylor_model(nu, z0, order=16):
    """Taylor model of h_nu: coefficients (eta_q) and remainder bound rem
    with  h_nu(z) = sqrt(v) * (sum_q eta_q v^q + rho(v)),  |rho| <= rem,
    uniformly for z >= z0 (v = 1/z in (0, 1/z0]).

    rho(v) = err(z)/sqrt(v) = err(z) sqrt(z); each error piece times sqrt(z)
    is decreasing in z (documented in _asym_error), so evaluating at z0
    bounds the supremum.
    """
    z0 = z0 if isinstance(z0, Interval) else Interval(z0)
    data = asym_data(nu, order)
    rem = (_asym_error(data, z0) * z0.sqrt()).hi
    return data.eta, Interval(0, rem)
