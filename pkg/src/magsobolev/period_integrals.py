"""Period integrals over one oval and the analytic derivative of the flux integral.

The integrals all have inverse square-root singularities at the roots
t1, t2 of f.  Writing ``f = (t - t1)(t2 - t) g`` with ``g > 0`` smooth and
substituting ``t = c - w cos(theta)`` (c, w the midpoint and half width)
turns ``dt / sqrt((t - t1)(t2 - t))`` into ``d theta``, so the integrands
become smooth even functions of theta and Gauss-Chebyshev nodes integrate
them spectrally.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.fft import dct

from .errors import ConvergenceError, DomainError
from .profile import (
    OvalShape,
    check_gamma,
    eval_f,
    eval_f_derivs,
    f_at_critical,
    gamma_max,
    oval_shape,
)

SMALL_GAMMA_RTOL = 1e-4
_MAX_DOUBLINGS = 6


@dataclass(frozen=True)
class QuadratureConfig:
    """Node counts for the oval quadratures.

    ``tol`` is the relative change allowed when the Chebyshev node count is
    doubled; a larger change raises :class:`ConvergenceError` after
    ``_MAX_DOUBLINGS`` attempts.
    """

    n_nodes: int = 128
    n_legendre: int = 96
    tol: float = 1e-11

    def __post_init__(self):
        if self.n_nodes < 16 or self.n_legendre < 16:
            raise DomainError("n_nodes and n_legendre must be at least 16")
        if not self.tol > 0.0:
            raise DomainError("tol must be positive")


DEFAULT_CONFIG = QuadratureConfig()


def _shape(gamma, q):
    check_gamma(gamma, q)
    return oval_shape(gamma, q)


@lru_cache(maxsize=32)
def _cheb_theta(n):
    return (np.arange(n) + 0.5) * np.pi / n


@lru_cache(maxsize=32)
def _legendre(n):
    return np.polynomial.legendre.leggauss(n)


def _t_of_theta(shape: OvalShape, theta):
    mid = 0.5 * (shape.t1 + shape.t2)
    half = 0.5 * (shape.t2 - shape.t1)
    return mid - half * np.cos(theta)


def root_quotient(v, root, gamma, q):
    """f(root + v) / v for a root of f, free of cancellation for small v.

    f(root + v) = v - gamma root**p expm1(p log1p(v / root)) with p = q/2 + 1,
    since f(root) = 0.
    """
    v = np.asarray(v, dtype=float)
    p = 0.5 * q + 1.0
    scale = gamma * math.exp(p * math.log(root))
    small = np.abs(v) < 1e-300
    vs = np.where(small, 1.0, v)
    out = 1.0 - scale * np.expm1(p * np.log1p(vs / root)) / vs
    return np.where(small, 1.0 - scale * p / root, out)


def smooth_factor(t, shape: OvalShape):
    """g(t) = f(t) / ((t - t1)(t2 - t)) on [t1, t2].

    f is expanded about the nearer root through :func:`root_quotient`, so
    g keeps full relative accuracy right up to both endpoints.
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    t1, t2, q = shape.t1, shape.t2, shape.q
    left = t <= shape.t0
    g = np.empty_like(t)
    g[left] = root_quotient(t[left] - t1, t1, shape.gamma, q) / (t2 - t[left])
    g[~left] = -root_quotient(t[~left] - t2, t2, shape.gamma, q) / (t[~left] - t1)
    return g


def _theta_integrand(kind, theta, shape):
    t = _t_of_theta(shape, theta)
    g = smooth_factor(t, shape)
    if kind == "M":
        return 1.0 / (t * np.sqrt(g))
    return 1.0 / np.sqrt(g)


def _chebyshev_integral(kind, shape, cfg):
    n = cfg.n_nodes
    prev = None
    for _ in range(_MAX_DOUBLINGS + 1):
        vals = _theta_integrand(kind, _cheb_theta(n), shape)
        cur = math.pi * float(np.mean(vals))
        if prev is not None and abs(cur - prev) <= cfg.tol * abs(cur):
            return cur
        prev = cur
        n *= 2
    raise ConvergenceError(
        f"{kind} integral not converged at gamma={shape.gamma!r}, q={shape.q!r}: "
        f"last two estimates differ by {abs(cur - prev)!r}"
    )


def _graded_panels(length):
    """Panel edges on [0, length] doubling in size away from 0."""
    edges = [0.0]
    w = min(1.0, length)
    while edges[-1] + w < length:
        edges.append(edges[-1] + w)
        w *= 2.0
    edges.append(length)
    return np.array(edges)


def _split_integral(kind, shape, cfg):
    """Integral split at t0 with u = sqrt(t - t1) and u = sqrt(t2 - t) halves.

    Used for small gamma where t2 ~ gamma**(-2/q) is huge and g varies over
    many orders of magnitude along the oval.
    """
    x, w = _legendre(cfg.n_legendre)
    t1, t0, t2, gamma, q = shape.t1, shape.t0, shape.t2, shape.gamma, shape.q
    total = 0.0
    for side in (1, 2):
        span = math.sqrt(t0 - t1) if side == 1 else math.sqrt(t2 - t0)
        edges = _graded_panels(span)
        for lo, hi in zip(edges[:-1], edges[1:]):
            u = 0.5 * (hi - lo) * x + 0.5 * (hi + lo)
            if side == 1:
                t = t1 + u * u
                ratio = root_quotient(u * u, t1, gamma, q)
            else:
                t = t2 - u * u
                ratio = -root_quotient(-u * u, t2, gamma, q)
            vals = 2.0 / np.sqrt(ratio)
            if kind == "M":
                vals = vals / t
            total += 0.5 * (hi - lo) * float(np.dot(w, vals))
    return float(total)


def _integral(kind, gamma, q, cfg):
    shape = _shape(gamma, q)
    if gamma < SMALL_GAMMA_RTOL * gamma_max(q):
        return _split_integral(kind, shape, cfg)
    return _chebyshev_integral(kind, shape, cfg)


def M(gamma, q, cfg: QuadratureConfig = DEFAULT_CONFIG):
    """Flux integral: integral over (t1, t2) of dt / (t sqrt(f(t)))."""
    return _integral("M", gamma, q, cfg)


def P(gamma, q, cfg: QuadratureConfig = DEFAULT_CONFIG):
    """Period integral: integral over (t1, t2) of dt / sqrt(f(t))."""
    return _integral("P", gamma, q, cfg)


def cosine_coefficients(kind, shape: OvalShape, n):
    """Cosine-series coefficients in theta of the M or P integrand.

    The integrand equals ``c[0] + sum_k c[k] cos(k theta)`` up to spectral
    accuracy; its integral from 0 to theta is therefore
    ``c[0] theta + sum_k c[k] sin(k theta) / k``.
    """
    vals = _theta_integrand(kind, _cheb_theta(n), shape)
    c = dct(vals, type=2) / n
    c[0] *= 0.5
    return c


def theta_of_t(t, shape: OvalShape):
    """Inverse of t = mid - half cos(theta)."""
    mid = 0.5 * (shape.t1 + shape.t2)
    half = 0.5 * (shape.t2 - shape.t1)
    return np.arccos(np.clip((mid - np.asarray(t, dtype=float)) / half, -1.0, 1.0))


def integrate_series(c, theta):
    """Antiderivative from 0 of a cosine series at ``theta``."""
    theta = np.asarray(theta, dtype=float)
    k = np.arange(1, len(c))
    return c[0] * theta + np.sin(np.multiply.outer(theta, k)) @ (c[1:] / k)


def partial_X(gamma, q, t, cfg: QuadratureConfig = DEFAULT_CONFIG):
    """Partial period integral from t1 to ``t`` of ds / sqrt(f(s))."""
    shape = _shape(gamma, q)
    t_arr = np.asarray(t, dtype=float)
    if np.any((t_arr < shape.t1) | (t_arr > shape.t2)):
        raise DomainError(f"t must lie in [t1, t2] = [{shape.t1!r}, {shape.t2!r}]")
    c = cosine_coefficients("P", shape, cfg.n_nodes)
    out = integrate_series(c, theta_of_t(t_arr, shape))
    return float(out) if np.ndim(out) == 0 else out


# ---------------------------------------------------------------------------
# analytic derivative of M


def psi(t, gamma, q):
    """Psi = f'**2 - 2 f f''."""
    f = eval_f(t, gamma, q)
    d1, d2, _ = eval_f_derivs(t, gamma, q)
    return d1 * d1 - 2.0 * f * d2


def beta_choice(shape: OvalShape):
    """The negative beta that makes H_beta vanish at t0."""
    gamma, q, t0 = shape.gamma, shape.q, shape.t0
    f0 = f_at_critical(t0, q)
    if not f0 > 0.0:
        raise DomainError(f"f(t0) = {f0!r} must be positive")
    _, d2, _ = eval_f_derivs(t0, gamma, q)
    return -q * (q - 2.0) * t0 ** (0.5 * q - 2.0) / (12.0 * f0 * d2 * d2)


def h_beta(t, gamma, q, beta):
    """H_beta = beta (3 f'^2 f'' + 2 f f' f''' - 6 f f''^2) - q (q-2) t^(q/2-2) / 2."""
    f = eval_f(t, gamma, q)
    d1, d2, d3 = eval_f_derivs(t, gamma, q)
    t = np.asarray(t, dtype=float)
    poly = 3.0 * d1 * d1 * d2 + 2.0 * f * d1 * d3 - 6.0 * f * d2 * d2
    return beta * poly - 0.5 * q * (q - 2.0) * t ** (0.5 * q - 2.0)


def h_beta_factored(t, gamma, q, beta):
    """H_beta through the auxiliary polynomial h: q t^(q/2-2) (beta gamma (q+2) h / 16 - (q-2)/2)."""
    h, _, _ = h_family(t, gamma, q)
    t = np.asarray(t, dtype=float)
    return q * t ** (0.5 * q - 2.0) * (beta * gamma * (q + 2.0) * h / 16.0 - 0.5 * (q - 2.0))


def mprime_integrand(t, shape: OvalShape, beta=None):
    """sqrt(f) f' H_beta / Psi**2, the integrand of the M' identity."""
    gamma, q = shape.gamma, shape.q
    if beta is None:
        beta = beta_choice(shape)
    f = np.maximum(eval_f(t, gamma, q), 0.0)
    d1, _, _ = eval_f_derivs(t, gamma, q)
    ps = psi(t, gamma, q)
    return np.sqrt(f) * d1 * h_beta(t, gamma, q, beta) / (ps * ps)


def M_prime_analytic(gamma, q, cfg: QuadratureConfig = DEFAULT_CONFIG):
    """dM/dgamma from the H_beta identity.

    With t = mid - w cos(theta) we have sqrt(f) dt = w**2 sin(theta)**2 sqrt(g)
    d theta, so the integrand is smooth in theta and Gauss-Legendre on
    [0, pi] converges spectrally.
    """
    shape = _shape(gamma, q)
    beta = beta_choice(shape)
    x, w = _legendre(cfg.n_legendre)
    theta = 0.5 * math.pi * (x + 1.0)
    t = _t_of_theta(shape, theta)
    half = 0.5 * shape.width
    g = smooth_factor(t, shape)
    d1, _, _ = eval_f_derivs(t, gamma, q)
    ps = psi(t, gamma, q)
    vals = (half * np.sin(theta)) ** 2 * np.sqrt(g) * d1 * h_beta(t, gamma, q, beta) / (ps * ps)
    return 0.5 * math.pi * float(np.dot(w, vals))


def h_family(t, gamma, q):
    """Auxiliary polynomial h(t) and its first two derivatives.

    h'' is evaluated through h'' = -gamma q (q+1)(q-2)(q+2) t^(q/2-2) f(t).
    """
    t = np.asarray(t, dtype=float)
    if np.any(~(t > 0.0)):
        raise DomainError("h is only defined for t > 0")
    half = 0.5 * q
    th = t**half
    h = (
        4.0 * (q - 2.0)
        - 4.0 * (q + 1.0) * t
        - 4.0 * gamma * (q + 1.0) * (q - 2.0) * th * t
        + 4.0 * gamma * (q + 2.0) * (q + 1.0) * th
        + gamma**2 * (q + 2.0) * (q - 2.0) * t ** (q + 1.0)
    )
    dh = (
        -4.0 * (q + 1.0)
        - 4.0 * gamma * (q + 1.0) * (q - 2.0) * (half + 1.0) * th
        + 4.0 * gamma * (q + 2.0) * (q + 1.0) * half * th / t
        + gamma**2 * (q + 2.0) * (q - 2.0) * (q + 1.0) * t**q
    )
    d2h = -gamma * q * (q + 1.0) * (q - 2.0) * (q + 2.0) * t ** (half - 2.0) * eval_f(t, gamma, q)
    if np.ndim(h) == 0:
        return float(h), float(dh), float(d2h)
    return h, dh, d2h


def h_prime_closed_form(t1, q):
    """-(q+1)(q t1 - (q+2))**2 / t1**2, the value of h' at the left root."""
    return -(q + 1.0) * (q * t1 - (q + 2.0)) ** 2 / t1**2
