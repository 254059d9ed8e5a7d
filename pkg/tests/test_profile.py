import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from magsobolev.errors import DomainError
from magsobolev.profile import (
    ProblemParams,
    bracket_roots,
    critical_point,
    eval_f,
    eval_f_derivs,
    f_at_critical,
    gamma_max,
    oval_shape,
)

import mp_oracle


@pytest.mark.parametrize("q", [2.5, 3.0, 4.0, 6.0, 10.0, 12.0])
def test_gamma_max_against_mpmath(q):
    assert gamma_max(q) == pytest.approx(float(mp_oracle.gamma_max(q)), rel=1e-15)


def test_gamma_max_q4():
    # 2/6 * (3/2)^-2 = 4/27
    assert gamma_max(4.0) == pytest.approx(4.0 / 27.0, rel=1e-15)


@pytest.mark.parametrize("q", [3.0, 4.0, 10.0])
def test_critical_point_is_stationary(q):
    g = 0.4 * gamma_max(q)
    t0 = critical_point(g, q)
    d1, d2, _ = eval_f_derivs(t0, g, q)
    assert abs(d1) < 1e-14
    assert d2 < 0.0
    assert f_at_critical(t0, q) == pytest.approx(eval_f(t0, g, q), rel=1e-13)


def test_derivatives_by_finite_differences():
    q, g, t, h = 4.0, 0.05, 2.3, 1e-5
    d1, d2, d3 = eval_f_derivs(t, g, q)
    fd1 = (eval_f(t + h, g, q) - eval_f(t - h, g, q)) / (2 * h)
    fd2 = (eval_f(t + h, g, q) - 2 * eval_f(t, g, q) + eval_f(t - h, g, q)) / h**2
    d2p, d2m = eval_f_derivs(t + h, g, q)[1], eval_f_derivs(t - h, g, q)[1]
    assert d1 == pytest.approx(fd1, rel=1e-9)
    assert d2 == pytest.approx(fd2, rel=1e-4)
    assert d3 == pytest.approx((d2p - d2m) / (2 * h), rel=1e-8)


@pytest.mark.parametrize("q", [2.5, 4.0, 10.0])
@pytest.mark.parametrize("frac", [1e-9, 1e-4, 0.2, 0.7, 1.0 - 1e-6])
def test_roots_against_mpmath(q, frac):
    g = frac * gamma_max(q)
    t1, t2 = bracket_roots(g, q)
    m1, m0, m2 = mp_oracle.roots(g, q)
    assert t1 == pytest.approx(float(m1), rel=1e-12)
    assert t2 == pytest.approx(float(m2), rel=1e-12)


def test_roots_tiny_gamma_series():
    q, g = 4.0, 1e-14
    t1, t2 = bracket_roots(g, q)
    assert t1 == pytest.approx(1.0 + g, rel=1e-15)
    assert t2 == pytest.approx(g ** (-2.0 / q), rel=1e-6)


def test_roots_degenerate_limit_is_symmetric():
    q = 4.0
    g = gamma_max(q) * (1.0 - 1e-12)
    s = oval_shape(g, q)
    assert s.t1 < s.t0 < s.t2
    assert (s.t0 - s.t1) == pytest.approx(s.t2 - s.t0, rel=1e-3)


@settings(max_examples=60, deadline=None)
@given(q=st.floats(2.1, 14.0), frac=st.floats(1e-6, 1.0 - 1e-6))
def test_roots_bracket_positive_region(q, frac):
    g = frac * gamma_max(q)
    s = oval_shape(g, q)
    assert 1.0 < s.t1 < s.t0 < s.t2
    mids = np.linspace(s.t1, s.t2, 9)[1:-1]
    assert np.all(eval_f(mids, g, q) > 0.0)
    assert eval_f(s.t1 * (1 - 1e-9), g, q) < 0.0
    assert eval_f(s.t2 * (1 + 1e-9), g, q) < 0.0


@pytest.mark.parametrize("gamma", [0.0, -1.0, 4.0 / 27.0, 0.2, math.nan])
def test_gamma_out_of_range(gamma):
    with pytest.raises(DomainError):
        oval_shape(gamma, 4.0)


@pytest.mark.parametrize("q", [2.0, 1.0, math.inf, math.nan])
def test_q_out_of_range(q):
    with pytest.raises(DomainError):
        gamma_max(q)
    with pytest.raises(DomainError):
        ProblemParams(q, 0.3)


def test_problem_params_threshold():
    p = ProblemParams(4.0, 0.5)
    assert p.threshold == pytest.approx(1.5)
