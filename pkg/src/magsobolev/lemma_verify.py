"""Numerical certificates for the flux integral M_q(gamma).

Checks that M decreases on (0, gamma_max), that its analytic derivative
matches finite differences, that M tends to 2 pi / sqrt(q+2) at the
degenerate oval, and the pointwise sign pattern of H_beta, Psi, h'' and the
derivative integrand.  Every check returns the raw numbers it looked at and
raises :class:`VerificationError` (with those numbers attached) on failure.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import DomainError, VerificationError
from .period_integrals import (
    DEFAULT_CONFIG,
    QuadratureConfig,
    M,
    M_prime_analytic,
    beta_choice,
    h_beta,
    h_family,
    h_prime_closed_form,
    mprime_integrand,
    psi,
)
from .profile import check_gamma, check_q, eval_f_derivs, gamma_max, oval_shape

FD_REL_TOL = 1e-4
FD_EDGE_FRACTION = 1e-3
LIMIT_EPSILONS = (1e-4, 1e-6, 1e-8)
LIMIT_REL_TOL = 1e-5
H_PRIME_REL_TOL = 1e-9
H_AT_T0_TOL = 1e-10
INTEGRAND_TOL = 1e-12


@dataclass(frozen=True)
class ScanRow:
    gamma: float
    M: float
    M_prime_analytic: float
    M_prime_fd: float
    t1: float
    t2: float


def fd_derivative(gamma, q, cfg: QuadratureConfig = DEFAULT_CONFIG, rel_step=1e-6):
    """Central difference of M with step rel_step * gamma_max, kept inside (0, gamma_max)."""
    gmax = gamma_max(q)
    h = min(rel_step * gmax, 0.5 * gamma, 0.5 * (gmax - gamma))
    return (M(gamma + h, q, cfg) - M(gamma - h, q, cfg)) / (2.0 * h)


def monotonicity_scan(q, n_grid=200, cfg: QuadratureConfig = DEFAULT_CONFIG,
                      fd_rel_tol=FD_REL_TOL, check=True):
    """Rows at gamma_k = gamma_max k / (n_grid + 1), k = 1..n_grid.

    With ``check`` set, raises on the first row where M fails to decrease,
    either derivative estimate is non-negative, or (away from the ends of the
    gamma range) the two derivative estimates differ by more than
    ``fd_rel_tol``.
    """
    check_q(q)
    if n_grid < 1:
        raise DomainError("n_grid must be positive")
    gmax = gamma_max(q)
    rows = []
    for k in range(1, n_grid + 1):
        g = gmax * k / (n_grid + 1)
        shape = oval_shape(g, q)
        rows.append(ScanRow(
            gamma=g, M=M(g, q, cfg), M_prime_analytic=M_prime_analytic(g, q, cfg),
            M_prime_fd=fd_derivative(g, q, cfg), t1=shape.t1, t2=shape.t2,
        ))
    if check:
        check_scan(rows, q, fd_rel_tol)
    return rows


def check_scan(rows, q, fd_rel_tol=FD_REL_TOL):
    gmax = gamma_max(q)
    for i, row in enumerate(rows):
        where = {"row": i, **asdict(row)}
        if i and not row.M < rows[i - 1].M:
            raise VerificationError(f"M not strictly decreasing at row {i}", where)
        if not row.M_prime_analytic < 0.0:
            raise VerificationError(f"analytic M' not negative at row {i}", where)
        if not row.M_prime_fd < 0.0:
            raise VerificationError(f"finite-difference M' not negative at row {i}", where)
        interior = FD_EDGE_FRACTION * gmax <= row.gamma <= (1.0 - FD_EDGE_FRACTION) * gmax
        rel = abs(row.M_prime_analytic - row.M_prime_fd) / abs(row.M_prime_analytic)
        if interior and rel > fd_rel_tol:
            raise VerificationError(
                f"analytic and finite-difference M' differ by {rel:.3e} at row {i}", where
            )


@dataclass(frozen=True)
class LimitCheck:
    measured: float
    expected: float
    rel_err: float
    raw: dict = field(default_factory=dict)


def limit_check(q, cfg: QuadratureConfig = DEFAULT_CONFIG, rel_tol=LIMIT_REL_TOL):
    """M at gamma = (1 - eps) gamma_max, extrapolated to eps = 0, against 2 pi / sqrt(q+2)."""
    check_q(q)
    gmax = gamma_max(q)
    eps = np.array(LIMIT_EPSILONS)
    vals = np.array([M((1.0 - e) * gmax, q, cfg) for e in eps])
    measured = float(np.polyfit(eps, vals, 2)[-1])
    expected = 2.0 * math.pi / math.sqrt(q + 2.0)
    rel = abs(measured - expected) / expected
    raw = {f"M(1-{e:g})": float(v) for e, v in zip(eps, vals)}
    out = LimitCheck(measured=measured, expected=expected, rel_err=rel, raw=raw)
    if rel > rel_tol:
        raise VerificationError(f"limit of M off by {rel:.3e} at q={q}", asdict(out))
    return out


def h_prime_identity_check(gamma, q, rel_tol=H_PRIME_REL_TOL):
    """Relative gap between h'(t1) and -(q+1)(q t1 - (q+2))**2 / t1**2.

    Near gamma_max both sides vanish; the gap is then measured against the
    size 4(q+1) of the individual terms of h' instead.
    """
    check_gamma(gamma, q)
    t1 = oval_shape(gamma, q).t1
    _, dh, _ = h_family(t1, gamma, q)
    closed = h_prime_closed_form(t1, q)
    scale = max(abs(closed), 1e-6 * 4.0 * (q + 1.0))
    rel = abs(dh - closed) / scale
    if rel > rel_tol:
        raise VerificationError(
            f"h'(t1) identity off by {rel:.3e}",
            {"gamma": gamma, "q": q, "t1": t1, "h_prime": dh, "closed_form": closed},
        )
    return rel


@dataclass
class SignReport:
    gamma: float
    q: float
    beta: float
    h_beta_at_t0: float
    passed: bool
    failures: list
    t: list
    h_beta: list
    psi: list
    h_second: list
    integrand: list

    def to_dict(self):
        return asdict(self)


def sign_structure_check(gamma, q, n_pts=101, raise_on_failure=True):
    """Sample the M' identity's ingredients on Chebyshev extreme points of [t1, t2]."""
    check_gamma(gamma, q)
    shape = oval_shape(gamma, q)
    beta = beta_choice(shape)
    j = np.arange(n_pts)
    mid, w = 0.5 * (shape.t1 + shape.t2), 0.5 * shape.width
    t = mid - w * np.cos(math.pi * j / (n_pts - 1))
    t[0], t[-1] = shape.t1, shape.t2
    hb = h_beta(t, gamma, q, beta)
    ps = psi(t, gamma, q)
    _, _, h2 = h_family(t, gamma, q)
    integrand = mprime_integrand(t, shape, beta)
    hb0 = float(h_beta(shape.t0, gamma, q, beta))
    d1_t1, _, _ = eval_f_derivs(shape.t1, gamma, q)

    failures = []
    if abs(hb0) > H_AT_T0_TOL:
        failures.append(f"H_beta(t0) = {hb0:.3e}")
    if beta >= 0.0:
        failures.append(f"beta = {beta:.3e} is not negative")
    away = np.abs(t - shape.t0) > 1e-8 * shape.width
    left, right = (t < shape.t0) & away, (t > shape.t0) & away
    for idx in np.flatnonzero(left & ~(hb < 0.0)):
        failures.append(f"H_beta >= 0 left of t0 at t={t[idx]!r}")
    for idx in np.flatnonzero(right & ~(hb > 0.0)):
        failures.append(f"H_beta <= 0 right of t0 at t={t[idx]!r}")
    for idx in np.flatnonzero(~(ps > 0.0)):
        failures.append(f"Psi <= 0 at t={t[idx]!r}")
    if abs(ps[0] - d1_t1**2) > 1e-12 * d1_t1**2:
        failures.append("Psi(t1) != f'(t1)^2")
    inner = slice(1, -1)
    for idx in np.flatnonzero(~(h2[inner] < 0.0)):
        failures.append(f"h'' >= 0 at t={t[inner][idx]!r}")
    for idx in np.flatnonzero(integrand > INTEGRAND_TOL):
        failures.append(f"integrand > 0 at t={t[idx]!r}")

    report = SignReport(
        gamma=float(gamma), q=float(q), beta=float(beta), h_beta_at_t0=hb0,
        passed=not failures, failures=failures, t=t.tolist(), h_beta=hb.tolist(),
        psi=ps.tolist(), h_second=h2.tolist(), integrand=integrand.tolist(),
    )
    if failures and raise_on_failure:
        raise VerificationError(failures[0], report.to_dict())
    return report


SCAN_HEADER = ("gamma", "M", "Mprime_analytic", "Mprime_fd", "t1", "t2")


def write_scan_csv(rows, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SCAN_HEADER)
        for row in rows:
            writer.writerow(["%.17g" % v for v in (row.gamma, row.M, row.M_prime_analytic,
                                                    row.M_prime_fd, row.t1, row.t2)])


def verify_all(qs=(2.5, 3.0, 4.0, 6.0, 10.0), n_grid=200, n_gamma=20):
    """Run every certificate for each q; returns a JSON-ready report (never raises)."""
    report = {}
    for q in qs:
        entry = {}
        gmax = gamma_max(q)
        gammas = [gmax * k / (n_gamma + 1) for k in range(1, n_gamma + 1)]
        try:
            rows = monotonicity_scan(q, n_grid)
            entry["monotonicity"] = {"passed": True, "M_first": rows[0].M, "M_last": rows[-1].M}
        except VerificationError as exc:
            entry["monotonicity"] = {"passed": False, "error": str(exc), "details": exc.details}
        try:
            entry["limit"] = {"passed": True, **asdict(limit_check(q))}
        except VerificationError as exc:
            entry["limit"] = {"passed": False, "error": str(exc), "details": exc.details}
        signs = [sign_structure_check(g, q, raise_on_failure=False) for g in gammas]
        entry["sign_structure"] = {
            "passed": all(r.passed for r in signs),
            "failures": {r.gamma: r.failures for r in signs if r.failures},
        }
        errs = []
        for g in gammas:
            try:
                errs.append(h_prime_identity_check(g, q))
            except VerificationError as exc:
                errs.append(float("inf"))
        entry["h_prime_identity"] = {"passed": max(errs) <= H_PRIME_REL_TOL, "max_rel_err": max(errs)}
        report[str(q)] = entry
    return report


def write_json(report, path):
    with open(path, "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True, default=float)
