import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from magsobolev.errors import BoundaryFluxError, DomainError
from magsobolev.period_integrals import M
from magsobolev.profile import gamma_max
from magsobolev.solver import (
    Regime,
    classify,
    mu_constant,
    normalize_flux,
    oval_solution,
    sharp_constant,
    solve_gamma,
    threshold_flux,
)

import mp_oracle


def constant_formula(q, alpha):
    return float((2 * mp.pi) ** (mp.mpf(1) / 2 - mp.mpf(1) / q) * abs(alpha))


def test_constant_regime_q4():
    res = sharp_constant(4.0, 0.3)
    assert res.regime is Regime.CONSTANT
    assert res.detail is None
    assert res.mu == pytest.approx(0.47497004612584784, rel=1e-14)


@settings(max_examples=100, deadline=None)
@given(alpha=st.floats(-1e6, 1e6))
def test_normalize_flux_range_and_period(alpha):
    a = normalize_flux(alpha)
    assert -0.5 < a <= 0.5
    # alpha - a is an integer (up to rounding of large alpha)
    assert abs((alpha - a) - round(alpha - a)) <= 1e-9 * max(1.0, abs(alpha))


def test_normalize_flux_half():
    assert normalize_flux(-0.5) == 0.5
    assert normalize_flux(1.5) == 0.5
    assert normalize_flux(2.3) == pytest.approx(0.3)
    with pytest.raises(DomainError):
        normalize_flux(math.inf)


def test_classify_threshold():
    q = 4.0
    a = threshold_flux(q)
    assert a == pytest.approx(1 / math.sqrt(6))
    assert classify(q, a) is Regime.CRITICAL
    assert classify(q, a - 1e-6) is Regime.CONSTANT
    assert classify(q, a + 1e-6) is Regime.BROKEN
    assert sharp_constant(q, a).mu == pytest.approx(constant_formula(q, a), rel=1e-14)


def test_mu_constant_rejects_broken_regime():
    with pytest.raises(DomainError):
        mu_constant(4.0, 0.45)


@pytest.mark.parametrize("q,alpha", [(4.0, 0.45), (3.0, 0.48), (6.0, 0.42)])
def test_gamma_solves_flux_equation(q, alpha):
    g = solve_gamma(q, alpha)
    assert 0.0 < g < gamma_max(q)
    assert M(g, q) == pytest.approx(2 * math.pi * alpha, abs=1e-10)


def test_solve_gamma_domain_errors():
    with pytest.raises(DomainError):
        solve_gamma(4.0, 0.3)
    with pytest.raises(BoundaryFluxError):
        solve_gamma(4.0, 0.5)


def _mp_mu(q, alpha):
    """mu from the oval formulas evaluated entirely in mpmath."""
    target = 2 * mp.pi * alpha
    gmax = mp_oracle.gamma_max(q)
    lo, hi = mp.mpf("1e-8") * gmax, gmax * (1 - mp.mpf("1e-8"))
    for _ in range(60):
        mid = mp.sqrt(lo * hi)
        if mp_oracle.M(mid, q) > target:
            lo = mid
        else:
            hi = mid
    g = (lo + hi) / 2
    k = 1 + mp.mpf(2) / q
    s = (q / mp.mpf(2) * g * k ** (q / mp.mpf(2) + 1)) ** (mp.mpf(2) / q)
    p = 2 * mp.pi * k / mp_oracle.P(g, q)
    lam = s / p**2
    return float(mp.sqrt((2 * mp.pi) ** (1 - mp.mpf(2) / q) * lam))


@pytest.mark.slow
def test_mu_against_mpmath_pipeline():
    q, alpha = 4.0, 0.45
    mp.mp.dps = 20
    try:
        ref = _mp_mu(q, alpha)
    finally:
        mp.mp.dps = 50
    assert sharp_constant(q, alpha).mu == pytest.approx(ref, rel=1e-9)


@pytest.mark.parametrize("q,alpha", [(4.0, 0.45), (4.0, 0.49), (3.0, 0.48), (6.0, 0.42)])
def test_strictly_below_constant_branch(q, alpha):
    res = sharp_constant(q, alpha)
    assert res.regime is Regime.BROKEN
    assert res.mu < constant_formula(q, alpha) - 1e-6


def test_mu_symmetric_and_periodic_in_alpha():
    base = sharp_constant(4.0, 0.45).mu
    assert sharp_constant(4.0, -0.45).mu == pytest.approx(base, rel=1e-13)
    assert sharp_constant(4.0, 1.45).mu == pytest.approx(base, rel=1e-13)
    assert sharp_constant(4.0, -0.45).detail.a < 0.0


def test_mu_nondecreasing_in_flux():
    alphas = np.linspace(0.01, 0.499, 40)
    mus = [sharp_constant(4.0, a).mu for a in alphas]
    assert np.all(np.diff(mus) > 0.0)


def test_oval_solution_first_integral_at_turning_points():
    q = 4.0
    sol = sharp_constant(q, 0.45).detail
    for r in (sol.r1, sol.r2):
        # r' = 0 at the turning points: a^2/r^2 + (2 lam / q) r^q = 2c
        assert sol.a**2 / r**2 + 2 * sol.lam / q * r**q == pytest.approx(2 * sol.c, rel=1e-12)
    assert sol.c == pytest.approx(sol.lam * (0.5 + 1 / q))
    assert sol.r1 < 1.0 < sol.r2


def test_boundary_flux():
    with pytest.raises(BoundaryFluxError):
        sharp_constant(4.0, 0.5)
    edge = sharp_constant(4.0, 0.5, extrapolate=True)
    assert edge.regime is Regime.BROKEN and edge.detail is None
    inner = sharp_constant(4.0, 0.4999).mu
    assert inner < edge.mu < constant_formula(4.0, 0.5)
    # extrapolated value agrees with a direct evaluation deep in the limit
    direct = oval_solution(4.0, 1e-24 * gamma_max(4.0)).mu
    assert edge.mu == pytest.approx(direct, rel=1e-9)


def test_invalid_q():
    with pytest.raises(DomainError):
        sharp_constant(2.0, 0.3)
