"""Command-line front end.

Exit codes: 0 ok, 1 usage, 2 domain error, 3 convergence error,
4 verification failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import __version__
from .errors import ConvergenceError, DomainError, VerificationError
from .lemma_verify import check_scan, monotonicity_scan, write_scan_csv
from .oracle import DEFAULT_SEED, OracleConfig, count_maxima, minimize_rayleigh, second_order_margin
from .period_integrals import QuadratureConfig
from .profile import check_q, gamma_max
from .reconstruct import constant_sample, sample_minimizer, write_csv
from .solver import DEFAULT_TOL, Regime, normalize_flux, sharp_constant, threshold_flux

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_CONVERGENCE, EXIT_VERIFY = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _quad_cfg(args):
    return QuadratureConfig(n_nodes=args.n_nodes, n_legendre=args.n_legendre)


def _envelope(command, params, result, diagnostics):
    return {"command": command, "params": params, "result": result,
            "diagnostics": diagnostics, "version": __version__}


def _solution_fields(res):
    out = {"regime": res.regime.value, "mu": res.mu}
    if res.detail is not None:
        d = res.detail
        out.update({"gamma": d.gamma, "a": d.a, "lambda": d.lam, "c": d.c, "r1": d.r1, "r2": d.r2})
    return out


def cmd_solve(args):
    cfg = _quad_cfg(args)
    res = sharp_constant(args.q, args.alpha, tol=args.tol, cfg=cfg, extrapolate=args.extrapolate)
    diagnostics = {"tol": args.tol, "n_nodes": cfg.n_nodes, "n_legendre": cfg.n_legendre,
                   "alpha_normalized": normalize_flux(args.alpha)}
    if args.extrapolate and res.detail is None and res.regime is Regime.BROKEN:
        diagnostics["extrapolated"] = True
    return _envelope("solve", {"q": args.q, "alpha": args.alpha}, _solution_fields(res), diagnostics), EXIT_OK


def cmd_scan(args):
    rows = monotonicity_scan(args.q, args.n, _quad_cfg(args), check=False)
    out = args.out or f"scan_q{args.q:g}.csv"
    try:
        write_scan_csv(rows, out)
    except OSError as exc:
        raise UsageError(f"cannot write {out}: {exc}") from exc
    result = {"rows": len(rows), "out": out,
              "M_first": rows[0].M, "M_last": rows[-1].M}
    diagnostics = {"fd_rel_tol": args.fd_tol, "n_nodes": args.n_nodes, "n_legendre": args.n_legendre}
    code = EXIT_OK
    try:
        check_scan(rows, args.q, args.fd_tol)
        result["passed"] = True
    except VerificationError as exc:
        result["passed"] = False
        diagnostics["failure"] = str(exc)
        code = EXIT_VERIFY
    return _envelope("scan", {"q": args.q, "n": args.n}, result, diagnostics), code


def cmd_minimizer(args):
    alpha = normalize_flux(args.alpha)
    res = sharp_constant(args.q, alpha, tol=args.tol, cfg=_quad_cfg(args))
    diagnostics = {"tol": args.tol}
    if res.detail is None:
        sample = constant_sample(args.q, alpha, args.n)
        diagnostics["warning"] = "constant regime: the minimizer is u = 1"
    else:
        sample = sample_minimizer(res.detail, args.q, alpha, args.n)
    out = args.out or f"minimizer_q{args.q:g}_a{alpha:g}.csv"
    try:
        write_csv(out, sample.x, sample.r, sample.theta)
    except OSError as exc:
        raise UsageError(f"cannot write {out}: {exc}") from exc
    result = {**_solution_fields(res), "n": args.n, "out": out,
              "r_min": float(sample.r.min()), "r_max": float(sample.r.max()),
              "residuals": sample.residuals.as_dict(),
              "two_pi_lambda": 2.0 * math.pi * sample.lam}
    return _envelope("minimizer", {"q": args.q, "alpha": args.alpha, "n": args.n}, result, diagnostics), EXIT_OK


def cmd_verify(args):
    alpha = normalize_flux(args.alpha)
    res = sharp_constant(args.q, alpha, tol=args.tol, cfg=_quad_cfg(args))
    ocfg = OracleConfig(n=args.n, seed=args.seed)
    orc = minimize_rayleigh(args.q, alpha, ocfg)
    gap = abs(orc.mu_est - res.mu) / res.mu if res.mu else abs(orc.mu_est)
    margin = second_order_margin(args.q, alpha)
    if args.out:
        try:
            write_csv(args.out, orc.x, abs(orc.u_best), _unwrapped_arg(orc.u_best))
        except OSError as exc:
            raise UsageError(f"cannot write {args.out}: {exc}") from exc
    result = {"regime": res.regime.value, "mu_solver": res.mu, "mu_oracle": orc.mu_est,
              "relative_gap": gap, "second_order_margin": margin,
              "oracle_start": orc.start, "oracle_maxima": count_maxima(abs(orc.u_best))}
    diagnostics = {"gap_tol": args.gap_tol, "seed": args.seed, "n": args.n,
                   "grad_tol": ocfg.grad_tol, "starts": list(ocfg.starts),
                   "runs": orc.runs}
    code = EXIT_OK if gap <= args.gap_tol else EXIT_VERIFY
    return _envelope("verify", {"q": args.q, "alpha": args.alpha}, result, diagnostics), code


def _unwrapped_arg(u):
    th = np.unwrap(np.angle(u))
    return th - th[0]


def cmd_threshold(args):
    check_q(args.q)
    result = {"alpha_star": threshold_flux(args.q), "gamma_max": gamma_max(args.q)}
    return _envelope("threshold", {"q": args.q}, result, {}), EXIT_OK


def build_parser():
    parser = _Parser(prog="magsobolev", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, alpha=True):
        p.add_argument("--q", type=float, required=True, help="exponent q > 2")
        if alpha:
            p.add_argument("--alpha", type=float, required=True, help="flux (any real)")
        p.add_argument("--json", action="store_true", help="emit one JSON object")
        p.add_argument("--n-nodes", type=int, default=QuadratureConfig.n_nodes)
        p.add_argument("--n-legendre", type=int, default=QuadratureConfig.n_legendre)

    p = sub.add_parser("solve", help="sharp constant mu_q(alpha)")
    common(p)
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--extrapolate", action="store_true",
                   help="at |alpha| = 1/2 return the gamma -> 0 limit instead of failing")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("scan", help="tabulate M, M' on a gamma grid (CSV)")
    common(p, alpha=False)
    p.add_argument("--n", type=int, default=200)
    p.add_argument("--out")
    p.add_argument("--fd-tol", type=float, default=1e-4)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("minimizer", help="sample the minimizer u(x) (CSV)")
    common(p)
    p.add_argument("--n", type=int, default=512)
    p.add_argument("--out")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.set_defaults(func=cmd_minimizer)

    p = sub.add_parser("verify", help="cross-check against direct minimization")
    common(p)
    p.add_argument("--n", type=int, default=512)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--gap-tol", type=float, default=1e-4)
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--out", help="write the oracle minimizer as CSV")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("threshold", help="symmetry-breaking flux and gamma_max")
    common(p, alpha=False)
    p.set_defaults(func=cmd_threshold)
    return parser


def _flatten(prefix, value, out):
    if isinstance(value, dict):
        for k, v in value.items():
            _flatten(f"{prefix}.{k}" if prefix else k, v, out)
    else:
        out.append((prefix, value))


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return str(v)


def emit(envelope, as_json, stream=None):
    stream = stream or sys.stdout
    if as_json:
        stream.write(json.dumps(envelope, sort_keys=True) + "\n")
        return
    pairs = []
    _flatten("", envelope["result"], pairs)
    stream.write(f"# {envelope['command']} {json.dumps(envelope['params'], sort_keys=True)}\n")
    for k, v in pairs:
        stream.write(f"{k}={_fmt(v)}\n")
    diag = []
    _flatten("", envelope["diagnostics"], diag)
    for k, v in diag:
        stream.write(f"# {k}={_fmt(v)}\n")


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        envelope, code = args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except ConvergenceError as exc:
        print(f"convergence error: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except VerificationError as exc:
        print(f"verification failure: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    emit(envelope, args.json)
    return code


if __name__ == "__main__":
    sys.exit(main())
