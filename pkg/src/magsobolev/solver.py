"""Sharp constant mu_q(alpha): regime classification and the phase-plane solve.

For (q+2) alpha**2 <= 1 the constant function is optimal and
``mu = (2 pi)**(1/2 - 1/q) |alpha|``.  Above the threshold the minimizer's
modulus runs around an oval; the oval parameter gamma solves
``M(gamma) = 2 pi |alpha|`` and the half-period condition fixes the
remaining scale, from which ``mu**2 = (2 pi)**(1 - 2/q) lambda``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .errors import BoundaryFluxError, ConvergenceError, DomainError
from .period_integrals import DEFAULT_CONFIG, QuadratureConfig, M, P
from .profile import check_gamma, check_q, gamma_max, oval_shape

CRITICAL_TOL = 1e-12
DEFAULT_TOL = 1e-10
MAX_BISECTIONS = 200
EXTRAPOLATION_FRACTIONS = (1e-4, 1e-5, 1e-6)
_SMALLEST_GAMMA_FRACTION = 1e-100


class Regime(str, enum.Enum):
    CONSTANT = "constant"
    CRITICAL = "critical"
    BROKEN = "symmetry_broken"


@dataclass(frozen=True)
class OvalSolution:
    """Symmetry-broken solution: oval parameter, first integrals, modulus range, mu.

    ``a`` is the angular momentum r**2 phi', ``lam`` the multiplier of the
    L_q constraint, ``c`` the energy constant, ``r1 < 1 < r2`` the extreme
    values of |u|.
    """

    gamma: float
    a: float
    lam: float
    c: float
    r1: float
    r2: float
    mu: float

    def as_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class SharpConstant:
    mu: float
    regime: Regime
    detail: Optional[OvalSolution] = None


def normalize_flux(alpha_raw):
    """Reduce the flux to [-1/2, 1/2] modulo integers; -1/2 maps to +1/2."""
    if not math.isfinite(alpha_raw):
        raise DomainError(f"alpha must be finite, got {alpha_raw!r}")
    alpha = alpha_raw - math.floor(alpha_raw + 0.5)
    if alpha == -0.5:
        alpha = 0.5
    return alpha


def classify(q, alpha):
    check_q(q)
    excess = (q + 2.0) * alpha * alpha - 1.0
    if abs(excess) <= CRITICAL_TOL:
        return Regime.CRITICAL
    return Regime.BROKEN if excess > 0.0 else Regime.CONSTANT


def threshold_flux(q):
    """Flux 1/sqrt(q+2) at which symmetry breaks."""
    check_q(q)
    return 1.0 / math.sqrt(q + 2.0)


def mu_constant(q, alpha):
    check_q(q)
    if classify(q, alpha) is Regime.BROKEN:
        raise DomainError(
            f"constant minimizer is not optimal for q={q!r}, alpha={alpha!r}: (q+2) alpha^2 > 1"
        )
    return (2.0 * math.pi) ** (0.5 - 1.0 / q) * abs(alpha)


def solve_gamma(q, alpha, tol=DEFAULT_TOL, cfg: QuadratureConfig = DEFAULT_CONFIG):
    """Unique gamma in (0, gamma_max) with M(gamma) = 2 pi |alpha|.

    M decreases strictly from pi (gamma -> 0) to 2 pi / sqrt(q+2)
    (gamma -> gamma_max), so plain bisection is safe.  Midpoints are
    geometric while the bracket spans more than a factor two, because the
    root moves towards 0 extremely fast as |alpha| -> 1/2.
    """
    check_q(q)
    target = 2.0 * math.pi * abs(alpha)
    if abs(alpha) >= 0.5:
        raise BoundaryFluxError(
            f"|alpha| = {abs(alpha)!r}: 2 pi |alpha| >= pi is the unattained gamma -> 0 limit of M"
        )
    if target <= 2.0 * math.pi / math.sqrt(q + 2.0):
        raise DomainError(
            f"no oval solves M(gamma) = {target!r} for q={q!r}: (q+2) alpha^2 <= 1"
        )
    gmax = gamma_max(q)
    hi = gmax
    lo = 1e-12 * gmax
    while M(lo, q, cfg) <= target:
        hi = lo
        lo *= 1e-12
        if lo < _SMALLEST_GAMMA_FRACTION * gmax:
            raise ConvergenceError(f"flux {alpha!r} too close to 1/2: root below gamma={lo!r}")
    for _ in range(MAX_BISECTIONS):
        mid = math.sqrt(lo * hi) if hi > 2.0 * lo else 0.5 * (lo + hi)
        resid = M(mid, q, cfg) - target
        if abs(resid) <= tol:
            return mid
        if resid > 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 4.0 * np.finfo(float).eps * hi:
            break
    raise ConvergenceError(
        f"bisection for gamma stalled in [{lo!r}, {hi!r}] with residual {resid!r} > tol={tol!r}"
    )


def recover_scales(q, gamma, cfg: QuadratureConfig = DEFAULT_CONFIG, sign=1.0):
    """First integrals ``(a, lam, c)`` of the oval with parameter ``gamma``.

    a**2 / lam follows from undoing t = (lam/a**2)(1 + 2/q) r**2, and a / lam
    from requiring the rising half of the oval to take x-length pi.
    """
    check_gamma(gamma, q)
    k = 1.0 + 2.0 / q
    s = (0.5 * q * gamma * k ** (0.5 * q + 1.0)) ** (2.0 / q)
    p = 2.0 * math.pi * k / P(gamma, q, cfg)
    a = math.copysign(s / p, sign)
    lam = s / (p * p)
    c = lam * (0.5 + 1.0 / q)
    return a, lam, c


def modulus_range(q, gamma):
    """``(r1, r2)``: min and max of |u| on the oval."""
    shape = oval_shape(gamma, q)
    k = 1.0 + 2.0 / q
    s = (0.5 * q * gamma * k ** (0.5 * q + 1.0)) ** (2.0 / q)
    return math.sqrt(s * shape.t1 / k), math.sqrt(s * shape.t2 / k)


def mu_from_lambda(q, lam):
    return math.sqrt((2.0 * math.pi) ** (1.0 - 2.0 / q) * lam)


def oval_solution(q, gamma, sign=1.0, cfg: QuadratureConfig = DEFAULT_CONFIG):
    a, lam, c = recover_scales(q, gamma, cfg, sign)
    r1, r2 = modulus_range(q, gamma)
    return OvalSolution(gamma=gamma, a=a, lam=lam, c=c, r1=r1, r2=r2, mu=mu_from_lambda(q, lam))


def _boundary_extrapolation(q, cfg):
    # mu(gamma) - mu(0+) = O(h) with h = (gamma/gamma_max)**(2/q) (corrections
    # scale like 1/t2); quadratic extrapolation in h from h = 1e-4, 1e-5, 1e-6.
    gmax = gamma_max(q)
    h = np.array(EXTRAPOLATION_FRACTIONS)
    mus = np.array([oval_solution(q, hk ** (0.5 * q) * gmax, cfg=cfg).mu for hk in h])
    coeffs = np.polyfit(h, mus, 2)
    return float(coeffs[-1])


def sharp_constant(q, alpha, tol=DEFAULT_TOL, cfg: QuadratureConfig = DEFAULT_CONFIG,
                   extrapolate=False):
    """Sharp constant mu_q(alpha) for any real flux.

    Returns a :class:`SharpConstant`; ``detail`` holds the
    :class:`OvalSolution` in the symmetry-broken regime.  At |alpha| = 1/2
    no interior oval exists and :class:`BoundaryFluxError` is raised unless
    ``extrapolate`` is set, in which case the gamma -> 0 limit of mu is
    extrapolated (``detail`` is then None).
    """
    check_q(q)
    alpha = normalize_flux(alpha)
    regime = classify(q, alpha)
    if regime is not Regime.BROKEN:
        return SharpConstant(mu=mu_constant(q, alpha), regime=regime)
    if abs(alpha) == 0.5:
        if not extrapolate:
            raise BoundaryFluxError(
                "|alpha| = 1/2 has no interior oval; pass extrapolate=True for the gamma -> 0 limit"
            )
        return SharpConstant(mu=_boundary_extrapolation(q, cfg), regime=regime)
    gamma = solve_gamma(q, alpha, tol, cfg)
    sol = oval_solution(q, gamma, sign=math.copysign(1.0, alpha), cfg=cfg)
    return SharpConstant(mu=sol.mu, regime=regime, detail=sol)
