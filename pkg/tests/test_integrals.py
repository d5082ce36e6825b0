"""Certified lattice Green's function integrals.

Covers the quadrature engine, the binomial step-power reduction, the
convolution cross-check, truncation tails, and the generating-function
helpers built on top of them.
"""

import math
from fractions import Fraction

import pytest

from noble.integrals import (
    DivergentIntegralError,
    QuadratureConfig,
    SingularityError,
    _partial_sum,
    dhat,
    green_integral,
    green_integral_convolved,
    k_integral,
    nbw_critical,
    nbw_hat,
    negative_k,
    seed_bracket,
    srw_green,
)
from noble.intervals import Interval
from noble.lattice import canonical_ball, orbit
from noble.walks import build_table, count_walks, srw_step_mass

WATSON = Fraction(15163860592, 10 ** 10)  # 10-digit reference value


def frac_bounds(iv):
    return iv.to_fractions()


# -- pure Green's powers ----------------------------------------------------

def test_watson_constant_bracket():
    w = k_integral(3, 1, ())
    lo, hi = frac_bounds(w)
    assert w.width() <= 1e-6
    assert lo <= WATSON <= hi + Fraction(1, 10 ** 10)


def test_translation_consistency_dim3():
    # Delta G = delta_0: G(0) - 1 equals G(e1) exactly in the limit; the
    # brackets must overlap
    g0 = k_integral(3, 1, ())
    g1 = k_integral(3, 1, (1,))
    shifted = g0 - Interval.exact(1)
    assert max(shifted.lo, g1.lo) <= min(shifted.hi, g1.hi)


@pytest.mark.parametrize("m", (1, 2, 3, 4))
def test_dim11_width_budget(m):
    w = k_integral(11, m, ())
    assert w.width() <= 1e-8, w.width()


def test_partial_sums_are_lower_bounds():
    for m in (1, 2, 3):
        for x in ((), (1,), (1, 1), (2,)):
            w = k_integral(11, m, x)
            lo, _ = frac_bounds(w)
            ps = _partial_sum(11, m, x)
            assert lo >= ps - Fraction(1, 10 ** 30)


def test_monotone_in_dimension():
    prev = None
    for d in range(7, 21):
        w = k_integral(d, 1, ())
        if prev is not None:
            assert w.hi < prev.lo
        prev = w


def test_divergence_guard():
    with pytest.raises(DivergentIntegralError):
        k_integral(3, 2, ())
    with pytest.raises(DivergentIntegralError):
        k_integral(5, 3, (1,))


def test_never_widen_finer_config():
    base = k_integral(9, 1, (1, 1))
    finer = QuadratureConfig(tail_multiple=16, panel_width=Fraction(1, 12))
    again = k_integral(9, 1, (1, 1), finer)
    assert base.lo <= again.lo and again.hi <= base.hi


def test_seeded_bracket_conflict_detected():
    # a seeded bracket disjoint from the computed one must raise
    k_integral(7, 1, (2, 1))
    with pytest.raises(ValueError):
        seed_bracket(7, 1, (2, 1), Interval(100, 101), producer="test")


# -- general integrals ------------------------------------------------------

def test_negative_powers_exact():
    assert negative_k(2, 0, ()) == 1
    assert negative_k(2, 1, ()) == 1
    assert negative_k(2, 1, (1,)) == Fraction(-1, 4)
    # I_{-2,0}(0) = sum_u C(2,u)(-1)^u D^{*u}(0) = 1 + D^{*2}(0)
    assert negative_k(2, 2, ()) == 1 + srw_step_mass(2, 2, ())


def test_zero_power_is_step_mass():
    assert green_integral(11, 0, 3, (1,)).contains(srw_step_mass(11, 3, (1,)))


@pytest.mark.parametrize("key", [(1, 1, ()), (1, 2, (1,)), (2, 1, (1, 1)),
                                 (1, 0, (2,))])
def test_convolution_identity_fast(key):
    n, l, x = key
    a = green_integral(11, n, l, x)
    b = green_integral_convolved(11, n, l, x)
    assert max(a.lo, b.lo) <= min(a.hi, b.hi)


@pytest.mark.slow
def test_convolution_identity_deep():
    a = green_integral(11, 3, 6, ())
    b = green_integral_convolved(11, 3, 6, ())
    assert max(a.lo, b.lo) <= min(a.hi, b.hi)


# -- generating functions ---------------------------------------------------

def test_srw_green_at_zero_fugacity():
    assert srw_green((1, 2, 0), Fraction(0), 3).contains(0)
    assert srw_green((0, 0, 0), Fraction(0), 3).contains(1)


def test_srw_green_subcritical_oracle():
    z = Fraction(1, 8)
    tbl = build_table(2, "simple", 40)
    partial = sum(tbl.count(n, ()) * z ** n for n in range(41))
    tail = (4 * z) ** 41 / (1 - 4 * z)
    g = srw_green((0, 0), z, 2, terms=40)
    lo, hi = frac_bounds(g)
    assert lo <= partial <= hi
    assert hi <= partial + tail + Fraction(1, 10 ** 25)


def test_srw_green_critical_routes_to_integral():
    g = srw_green((0,) * 5, Fraction(1, 10), 5)
    w = k_integral(5, 1, ())
    assert max(g.lo, w.lo) <= min(g.hi, w.hi)


def test_srw_green_out_of_domain():
    with pytest.raises(ValueError):
        srw_green((0, 0), Fraction(1, 3), 2)


def test_nbw_hat_values():
    # z=0 gives 1 for every k
    assert nbw_hat((0.3, -1.2), Fraction(0), 2) == 1.0
    # closed form at the antipodal point: Dhat = -1
    val = nbw_hat((math.pi, math.pi), Fraction(1, 3), 2)
    assert abs(val - (1 - Fraction(1, 9)) / (1 + Fraction(3, 9) + Fraction(4, 3))) < 1e-12


def test_nbw_hat_singularity():
    with pytest.raises(SingularityError):
        nbw_hat((0.0, 0.0), Fraction(1, 3), 2)


def test_nbw_hat_against_walk_series():
    # subcritical z: x-space Fourier partial sums converge geometrically
    z = Fraction(1, 4)
    k = (math.pi, math.pi)
    total = 1.0
    for n in range(1, 13):
        s = 0.0
        for c in canonical_ball(2, n):
            cnt = count_walks(2, "non-backtracking", n, c)
            if cnt:
                for y in orbit(c, 2):
                    s += cnt * math.cos(k[0] * y[0] + k[1] * y[1])
        total += float(z) ** n * s
    tail = sum(4 * 3 ** (n - 1) * float(z) ** n for n in range(13, 400))
    assert abs(nbw_hat(k, z, 2) - total) <= tail + 1e-9


def test_nbw_hat_at_critical_point_partial_sums():
    # at z = 1/(2d-1) the mass tail bound is no longer summable, so the
    # truncated Fourier series is only required to sit within that
    # (infinite) allowance; pairs of partial sums straddle the closed form
    z = Fraction(1, 3)
    k = (math.pi, math.pi)
    closed = nbw_hat(k, z, 2)
    partials = []
    total = 1.0
    for n in range(1, 13):
        s = 0.0
        for c in canonical_ball(2, n):
            cnt = count_walks(2, "non-backtracking", n, c)
            if cnt:
                for y in orbit(c, 2):
                    s += cnt * math.cos(k[0] * y[0] + k[1] * y[1])
        total += float(z) ** n * s
        partials.append(total)
    straddle = [(a, b) for a, b in zip(partials, partials[1:])
                if min(a, b) - 1e-9 <= closed <= max(a, b) + 1e-9]
    assert straddle, partials


def test_nbw_critical_prefactor_and_watson():
    from noble.integrals import critical_prefactor
    assert critical_prefactor(11) == Fraction(20, 21)
    assert critical_prefactor(3) == Fraction(4, 5)
    w = nbw_critical((), 3)
    lo, hi = frac_bounds(w)
    assert lo <= Fraction(4, 5) * WATSON <= hi + Fraction(1, 10 ** 9)


def test_dhat_basics():
    assert abs(dhat((0.0, 0.0), 2) - 1.0) < 1e-15
    assert abs(dhat((math.pi, math.pi), 2) + 1.0) < 1e-15
    assert abs(dhat((math.pi / 2,) * 4, 4)) < 1e-15
