"""Sampling the non-constant minimizer u(x) = r(x) exp(i(phi(x) - alpha x)).

Along the rising half of the oval x, r and phi are explicit functions of
the oval variable t:

    x(t)   = |a| / (2 lam (1 + 2/q)) * int_{t1}^{t} ds / sqrt(f(s))
    r(t)   = sqrt(a**2 t / (lam (1 + 2/q)))
    phi(t) = sign(a) / 2 * int_{t1}^{t} ds / (s sqrt(f(s)))

Both integrals are cosine series in theta (t = mid - w cos theta), so x(theta)
can be inverted on a uniform x-grid by Newton's method to full accuracy.
The falling half follows from r(2 pi - x) = r(x).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConvergenceError, DomainError
from .period_integrals import cosine_coefficients, integrate_series
from .profile import oval_shape
from .solver import OvalSolution, mu_constant

_SERIES_START = 128
_SERIES_MAX = 1 << 16
_NEWTON_ITERS = 60


@dataclass(frozen=True)
class Residuals:
    """Self-consistency diagnostics of a sampled minimizer.

    ``energy`` is the integral of r'**2 + a**2/r**2, which should equal
    2 pi lam; ``energy_rel_error`` is its relative deviation.
    """

    norm_residual: float
    flux_residual: float
    ode_residual: float
    energy: float
    energy_rel_error: float
    first_integral_drift: float

    def as_dict(self):
        return dict(self.__dict__)


@dataclass
class MinimizerSample:
    x: np.ndarray
    r: np.ndarray
    theta: np.ndarray
    a: float
    lam: float
    mu: float
    residuals: Residuals | None = field(default=None)

    @property
    def u(self):
        return self.r * np.exp(1j * self.theta)


def phase(sample: MinimizerSample, alpha):
    """Unwrapped phase phi = theta + alpha x."""
    return sample.theta + alpha * sample.x


def _series(kind, shape):
    n = _SERIES_START
    while True:
        c = cosine_coefficients(kind, shape, n)
        tail = np.max(np.abs(c[-n // 8:]))
        if tail <= 1e-15 * abs(c[0]) or n >= _SERIES_MAX:
            return c
        n *= 2


def _eval_cos_series(c, theta):
    k = np.arange(len(c))
    return np.cos(np.multiply.outer(theta, k)) @ c


def _invert_x(cP, x_targets):
    """theta in [0, pi] with X(theta) = x for X(theta) = int_0^theta G / c0."""
    c0 = cP[0]
    lo = np.zeros_like(x_targets)
    hi = np.full_like(x_targets, math.pi)
    theta = x_targets.copy()
    for _ in range(_NEWTON_ITERS):
        val = integrate_series(cP, theta) / c0 - x_targets
        lo = np.where(val < 0.0, theta, lo)
        hi = np.where(val > 0.0, theta, hi)
        step = val / (_eval_cos_series(cP, theta) / c0)
        new = theta - step
        outside = (new <= lo) | (new >= hi)
        new = np.where(outside, 0.5 * (lo + hi), new)
        done = np.max(np.abs(new - theta)) <= 1e-15
        theta = new
        if done:
            return theta
    raise ConvergenceError("inversion of x(theta) did not converge")


def sample_minimizer(sol: OvalSolution, q, alpha, n=512):
    """Sample u on the uniform grid x_j = 2 pi j / n, j = 0..n.

    The grid starts at the minimum of |u| (r(0) = r(2 pi) = r1, r(pi) = r2);
    ``theta`` is the unwrapped argument of u with theta(0) = 0.
    """
    if sol is None:
        raise DomainError("constant regime: use constant_sample for the trivial minimizer")
    if n < 16 or n % 2:
        raise DomainError(f"n must be an even integer >= 16, got {n!r}")
    shape = oval_shape(sol.gamma, q)
    cP = _series("P", shape)
    cM = _series("M", shape)

    half = n // 2
    x = 2.0 * math.pi * np.arange(n + 1) / n
    th = _invert_x(cP, x[: half + 1])
    th[0], th[-1] = 0.0, math.pi
    mid = 0.5 * (shape.t1 + shape.t2)
    w = 0.5 * (shape.t2 - shape.t1)
    t = mid - w * np.cos(th)
    k = 1.0 + 2.0 / q
    s = sol.a * sol.a / sol.lam
    r_rise = np.sqrt(s * t / k)
    phi_rise = math.copysign(0.5, sol.a) * integrate_series(cM, th)

    r = np.concatenate([r_rise, r_rise[-2::-1]])
    phi_top = phi_rise[-1]
    phi = np.concatenate([phi_rise, 2.0 * phi_top - phi_rise[-2::-1]])
    theta = phi - alpha * x
    sample = MinimizerSample(x=x, r=r, theta=theta, a=sol.a, lam=sol.lam, mu=sol.mu)
    sample.residuals = residuals(sample, q, alpha)
    return sample


def constant_sample(q, alpha, n=512):
    """The constant minimizer u = 1 of the subcritical regime."""
    x = 2.0 * math.pi * np.arange(n + 1) / n
    sample = MinimizerSample(
        x=x, r=np.ones_like(x), theta=np.zeros_like(x), a=float(alpha),
        lam=float(alpha) ** 2, mu=mu_constant(q, alpha),
    )
    sample.residuals = residuals(sample, q, alpha)
    return sample


def spectral_derivative(values):
    """Derivative of a 2 pi-periodic grid function (last point excluded)."""
    n = len(values)
    k = np.fft.rfftfreq(n, d=1.0 / n)
    if n % 2 == 0:
        k[-1] = 0.0
    return np.fft.irfft(1j * k * np.fft.rfft(values), n)


def residuals(sample: MinimizerSample, q, alpha):
    """Normalization, flux, ODE, energy and first-integral diagnostics.

    Integrals use the rectangle rule on the periodic grid (spectrally
    accurate); r' is spectral, while the ODE residual uses second
    differences and skips two points next to x = 0, pi, 2 pi.
    """
    r = sample.r[:-1]
    n = len(r)
    dx = 2.0 * math.pi / n
    a, lam = sample.a, sample.lam
    norm_int = float(np.sum(r**q) * dx)
    flux_int = float(np.sum(a / r**2) * dx)
    dr = spectral_derivative(r)
    energy = float(np.sum(dr**2 + a * a / r**2) * dx)

    d2r = (np.roll(r, -1) - 2.0 * r + np.roll(r, 1)) / dx**2
    ode = -d2r + a * a / r**3 - lam * r ** (q - 1.0)
    keep = np.ones(n, dtype=bool)
    for centre in (0, n // 2):
        for off in (-2, -1, 0, 1, 2):
            keep[(centre + off) % n] = False
    ode_res = float(np.max(np.abs(ode[keep]))) if np.any(keep) else 0.0

    two_c = lam * (1.0 + 2.0 / q)
    first = dr**2 + a * a / r**2 + (2.0 * lam / q) * r**q
    drift = float(np.max(np.abs(first - two_c)) / two_c) if two_c > 0 else 0.0
    target_energy = 2.0 * math.pi * lam
    return Residuals(
        norm_residual=abs(norm_int - 2.0 * math.pi),
        flux_residual=abs(flux_int - 2.0 * math.pi * alpha),
        ode_residual=ode_res,
        energy=energy,
        energy_rel_error=abs(energy - target_energy) / target_energy if target_energy else abs(energy),
        first_integral_drift=drift,
    )


CSV_HEADER = ("x", "r", "theta", "re_u", "im_u")


def write_csv(path, x, r, theta):
    """Write a sampled profile as CSV with 17 significant digits."""
    u = r * np.exp(1j * np.asarray(theta))
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for row in zip(x, r, theta, u.real, u.imag):
            writer.writerow(["%.17g" % v for v in row])


def read_csv(path):
    """Read a profile CSV back into a dict of arrays keyed by column name."""
    data = np.genfromtxt(path, delimiter=",", names=True)
    return {name: np.asarray(data[name]) for name in CSV_HEADER}
