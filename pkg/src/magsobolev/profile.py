"""Dimensionless profile f(t) = t - gamma*t**(q/2+1) - 1 and its roots.

Every non-constant minimizer travels along an oval in the (r, r') phase
plane.  After rescaling r**2 to the variable t, the oval is described by the
positive part of ``f`` between its two roots ``t1 < t2``; ``t0`` is the
unique critical point in between.  ``gamma`` indexes the ovals and the oval
shrinks to a point at ``gamma_max(q)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DomainError

ROOT_RTOL = 1e-13
DEGENERATE_RTOL = 1e-10
TINY_GAMMA = 1e-10
_MAX_ROOT_ITERS = 200


@dataclass(frozen=True)
class ProblemParams:
    """Exponent ``q`` and flux ``alpha`` of one embedding problem."""

    q: float
    alpha: float

    def __post_init__(self):
        check_q(self.q)
        if not math.isfinite(self.alpha):
            raise DomainError(f"alpha must be finite, got {self.alpha!r}")

    @property
    def threshold(self) -> float:
        """(q+2)*alpha**2; symmetry breaks when this exceeds 1."""
        return (self.q + 2.0) * self.alpha**2


@dataclass(frozen=True)
class OvalShape:
    """Phase-plane data of one oval: roots t1 < t2 of f and critical point t0."""

    gamma: float
    q: float
    t1: float
    t0: float
    t2: float

    @property
    def width(self) -> float:
        return self.t2 - self.t1


def check_q(q):
    if not (math.isfinite(q) and q > 2.0):
        raise DomainError(f"exponent q must satisfy 2 < q < inf, got {q!r}")


def check_gamma(gamma, q):
    check_q(q)
    gmax = gamma_max(q)
    if not (0.0 < gamma < gmax):
        raise DomainError(f"gamma={gamma!r} outside (0, gamma_max={gmax!r}) for q={q!r}")


def _check_t(t):
    t = np.asarray(t, dtype=float)
    if np.any(~(t > 0.0)):
        raise DomainError("profile is only defined for t > 0")
    return t


def _scalar_or_array(x):
    return float(x) if np.ndim(x) == 0 else x


def eval_f(t, gamma, q):
    """Evaluate f(t) = t - gamma*t**(q/2+1) - 1 (vectorized in ``t``)."""
    t = _check_t(t)
    return _scalar_or_array(t - gamma * t ** (0.5 * q + 1.0) - 1.0)


def eval_f_derivs(t, gamma, q):
    """Return ``(f', f'', f''')`` at ``t``."""
    t = _check_t(t)
    half = 0.5 * q
    tp = t ** (half - 2.0)
    d1 = 1.0 - 0.5 * gamma * (q + 2.0) * tp * t * t
    d2 = -0.25 * gamma * q * (q + 2.0) * tp * t
    d3 = -0.125 * gamma * q * (q + 2.0) * (q - 2.0) * tp
    return _scalar_or_array(d1), _scalar_or_array(d2), _scalar_or_array(d3)


def gamma_max(q):
    """Largest admissible oval parameter; the oval degenerates to t = (q+2)/q."""
    check_q(q)
    return 2.0 / (q + 2.0) * (1.0 + 2.0 / q) ** (-0.5 * q)


def critical_point(gamma, q):
    """Unique zero t0 of f'; f(t0) > 0 for gamma inside the admissible range."""
    check_gamma(gamma, q)
    return (2.0 / (gamma * (q + 2.0))) ** (2.0 / q)


def f_at_critical(t0, q):
    """f(t0) using gamma*t0**(q/2) = 2/(q+2); avoids evaluating gamma*t0**(q/2+1)."""
    return t0 * q / (q + 2.0) - 1.0


def _hybrid_root(fun, dfun, lo, hi, rtol=ROOT_RTOL, x0=None):
    """Newton iteration safeguarded by a sign-change bracket [lo, hi]."""
    flo, fhi = fun(lo), fun(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if np.sign(flo) == np.sign(fhi):
        raise ConvergenceError(f"no sign change on bracket [{lo!r}, {hi!r}]")
    x = 0.5 * (lo + hi) if x0 is None or not (lo < x0 < hi) else x0
    for _ in range(_MAX_ROOT_ITERS):
        fx = fun(x)
        if fx == 0.0:
            return x
        if np.sign(fx) == np.sign(flo):
            lo, flo = x, fx
        else:
            hi = x
        dfx = dfun(x)
        step = fx / dfx if dfx != 0.0 else np.inf
        x_new = x - step
        if not (lo < x_new < hi):
            x_new = 0.5 * (lo + hi)
            step = x - x_new
        if abs(step) <= rtol * abs(x_new) or hi - lo <= rtol * abs(x_new):
            return x_new
        x = x_new
    raise ConvergenceError(
        f"root refinement did not converge: bracket [{lo!r}, {hi!r}], last iterate {x!r}"
    )


def bracket_roots(gamma, q):
    """Roots ``(t1, t2)`` of f with 1 < t1 < t0 < t2 < gamma**(-2/q).

    Uses bisection-safeguarded Newton on each side of t0.  Within
    ``DEGENERATE_RTOL`` of gamma_max the double-root conditioning makes Newton
    useless and the local quadratic model around t0 is returned instead.
    """
    t0 = critical_point(gamma, q)
    f0 = f_at_critical(t0, q)
    if f0 <= 0.0:
        raise DomainError(f"f(t0) = {f0!r} is not positive; gamma too close to gamma_max")
    _, f2_0, _ = eval_f_derivs(t0, gamma, q)
    half_width = math.sqrt(-2.0 * f0 / f2_0)
    if gamma_max(q) - gamma < DEGENERATE_RTOL * gamma_max(q):
        return t0 - half_width, t0 + half_width

    # f(t) = 0  <=>  log(gamma) + (q/2) log(t) - log(1 - 1/t) = 0; this form
    # stays well conditioned when t2 ~ gamma**(-2/q) exceeds 1/eps
    log_gamma = math.log(gamma)

    def fun(t):
        if t <= 1.0:
            return math.inf
        return log_gamma + 0.5 * q * math.log(t) - math.log1p(-1.0 / t)

    def dfun(t):
        return 0.5 * q / t - 1.0 / (t * (t - 1.0))

    upper = 2.0 * gamma ** (-2.0 / q)
    if gamma < TINY_GAMMA:
        # t1 - 1 = gamma + p gamma**2 + O(gamma**3), p = q/2 + 1
        t1 = 1.0 + gamma / (1.0 - (0.5 * q + 1.0) * gamma)
    else:
        t1 = _hybrid_root(fun, dfun, 1.0, t0, x0=t0 - half_width)
    t2 = _hybrid_root(fun, dfun, t0, upper, x0=t0 + half_width)
    return t1, t2


def oval_shape(gamma, q):
    """Assemble the :class:`OvalShape` for ``gamma``."""
    t0 = critical_point(gamma, q)
    t1, t2 = bracket_roots(gamma, q)
    return OvalShape(gamma=float(gamma), q=float(q), t1=t1, t0=t0, t2=t2)
