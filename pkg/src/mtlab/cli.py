"""Command-line entry point: scans and checks with CSV/JSON output.

Every subcommand is deterministic: re-running with the same flags writes
byte-identical data files (fixed grids, fixed summation orders, no RNG).
Numbers are rendered with 17 significant digits.

Exit codes: 0 success, 2 configuration error (bad flags or parameters),
3 numerical failure (integration, quadrature or root finding did not
converge), 4 assertion failure (a computed value missed its target).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

import numpy as np

from . import analysis, linearized, maximizer, perturbations, profiles, quadrature
from .perturbations import family_by_name
from .radial_ode import IntegrationError, NoCrossingError
from .shooting import EventNotReachedError, shoot, to_json as shot_to_json

__all__ = ["main"]

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_ASSERTION = 4


class AssertionFailure(RuntimeError):
    """A computed value missed its documented target."""


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _write(args, text: str) -> None:
    if args.output is None:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        with open(args.output, "w", newline="") as fh:
            fh.write(text)


def _family(args) -> perturbations.PerturbationSpec:
    params = {}
    for key in ("a", "p", "q", "R"):
        val = getattr(args, key, None)
        if val is not None:
            params[key] = val
    return family_by_name(args.family, **params)


def _add_family_flags(p: argparse.ArgumentParser, default: str = "trivial"):
    p.add_argument("--family", default=default,
                   choices=["trivial", "log-power", "oscillating",
                            "inverse-square"],
                   help="perturbation family (default: %(default)s)")
    p.add_argument("--a", type=float, default=None, help="amplitude")
    p.add_argument("--p", type=float, default=None, help="power (> 2)")
    p.add_argument("--q", type=float, default=None, help="log power")
    p.add_argument("--R", type=float, default=None, help="cutoff radius")


def cmd_profiles(args) -> int:
    rs = np.exp(np.linspace(np.log(args.r_min), np.log(args.r_max), args.n))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    cols = ["eta0", "w0", "zeta0", "psi", "psi0", "xi"]
    w.writerow(["r"] + cols)
    for r in rs:
        w.writerow([_fmt(r)] + [_fmt(float(getattr(profiles, c)(r)))
                                for c in cols])
    _write(args, buf.getvalue())
    return EXIT_OK


def cmd_tables(args) -> int:
    tables = quadrature.integral_tables(tol=args.tol)
    target = -6.0 - np.pi ** 2 / 3.0
    combo = quadrature.z0_slope_combination(tables)
    if abs(combo - target) > 1e-6:
        raise AssertionFailure(
            f"z0 slope combination {combo!r} misses {target!r} by more than 1e-6")
    _write(args, quadrature.tables_to_csv(tables))
    return EXIT_OK


def cmd_beta(args) -> int:
    sol = linearized.solve_linearized(linearized.source_z0, r_max=args.r_max)
    slope_ode, spread = linearized.extract_log_slope(sol)
    slope_int = quadrature.beta_from_source(linearized.source_z0)
    closed = -6.0 - np.pi ** 2 / 3.0
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["route", "beta", "error_estimate"])
    w.writerow(["ode_tail", _fmt(slope_ode), _fmt(spread)])
    w.writerow(["weighted_integral", _fmt(slope_int), _fmt(1e-10)])
    w.writerow(["closed_form", _fmt(closed), _fmt(0.0)])
    _write(args, buf.getvalue())
    if abs(slope_ode - slope_int) > spread + 1e-6:
        raise AssertionFailure(
            f"slope routes disagree: ode {slope_ode!r} vs integral {slope_int!r}")
    return EXIT_OK


def cmd_shoot(args) -> int:
    sol = shoot(args.mu, _family(args), tol=args.tol)
    if args.format == "json":
        _write(args, shot_to_json(sol))
    else:
        c = args.mu ** 4 * (sol.energy_total - 4.0 * np.pi)
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["mu", "log_R", "log_lambda", "E", "c",
                    "energy_inner", "energy_outer"])
        w.writerow([_fmt(sol.mu), _fmt(sol.log_R), _fmt(sol.log_lambda),
                    _fmt(sol.energy_total), _fmt(c),
                    _fmt(sol.energy_inner), _fmt(sol.energy_outer)])
        _write(args, buf.getvalue())
    return EXIT_OK


def cmd_scan(args) -> int:
    mus = np.linspace(args.mu_from, args.mu_to, args.steps)
    scan = analysis.energy_scan(mus, _family(args), tol=args.tol)
    _write(args, analysis.scan_to_csv(scan))
    if scan.failures:
        raise IntegrationError(
            "scan failed at mu = " + ", ".join(f"{m:g}" for m in scan.failures))
    return EXIT_OK


def cmd_residuals(args) -> int:
    spec = _family(args)
    reports = [analysis.residual_hierarchy(mu, spec) for mu in args.mu]
    _write(args, analysis.residuals_to_csv(reports))
    return EXIT_OK


def cmd_branch(args) -> int:
    mus = np.linspace(args.mu_from, args.mu_to, args.steps)
    scan = analysis.branch_scan(
        mus, _family(args), lambda_queries=args.level or (),
        level_fractions=args.level_fraction or ())
    if args.format == "json":
        _write(args, analysis.branch_summary_json(scan))
    else:
        _write(args, analysis.branch_to_csv(scan))
    return EXIT_OK


def cmd_maximize(args) -> int:
    if not (0.0 < args.alpha < 4.0 * np.pi):
        raise ValueError("alpha must lie in (0, 4 pi)")
    res = maximizer.maximize_subcritical(
        args.alpha, _family(args), n_nodes=args.n_nodes,
        max_iter=args.max_iter)
    if not res.converged:
        raise IntegrationError(
            f"ascent still improving after {res.iterations} iterations")
    bound = maximizer.pointwise_moser_bound(res)
    if not bound.holds:
        raise AssertionFailure(
            f"pointwise bound violated at r = {bound.first_violation_r!r}")
    _write(args, maximizer.result_to_json(res))
    return EXIT_OK


def cmd_check_h(args) -> int:
    spec = _family(args)
    reports = perturbations.check_conditions(spec, t_max=args.t_max)
    lines = [f"{name}: {rep.verdict}" for name, rep in reports.items()]
    sys.stdout.write("\n".join(lines) + "\n")
    if args.output is not None:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "t_sq_h", "t4_modulus"])
        r1, r2 = reports["condh1"], reports["condh2"]
        for i, t in enumerate(r1.t_values):
            w.writerow([_fmt(t), _fmt(r1.q_values[i]), _fmt(r2.q_values[i])])
        with open(args.output, "w", newline="") as fh:
            fh.write(buf.getvalue())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="mtlab",
        description="Radial critical points of the perturbed Moser-Trudinger "
                    "functional: profiles, shooting, scans and checks.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("profiles", help="closed-form profile tables")
    p.add_argument("--r-min", type=float, default=1e-3)
    p.add_argument("--r-max", type=float, default=1e6)
    p.add_argument("--n", type=int, default=200)
    p.set_defaults(func=cmd_profiles)

    p = sub.add_parser("tables", help="weighted integral tables")
    p.add_argument("--tol", type=float, default=1e-10)
    p.set_defaults(func=cmd_tables)

    p = sub.add_parser("beta", help="z0 log-slope by two independent routes")
    p.add_argument("--r-max", type=float, default=1e6)
    p.set_defaults(func=cmd_beta)

    p = sub.add_parser("shoot", help="single shot at center value mu")
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--tol", type=float, default=1e-11)
    p.add_argument("--format", choices=["csv", "json"], default="json")
    _add_family_flags(p)
    p.set_defaults(func=cmd_shoot)

    p = sub.add_parser("scan", help="energy coefficient scan over mu")
    p.add_argument("--mu-from", type=float, required=True)
    p.add_argument("--mu-to", type=float, required=True)
    p.add_argument("--steps", type=int, default=7)
    p.add_argument("--tol", type=float, default=1e-11)
    _add_family_flags(p)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("residuals", help="profile-hierarchy residuals")
    p.add_argument("--mu", type=float, nargs="+", required=True)
    _add_family_flags(p)
    p.set_defaults(func=cmd_residuals)

    p = sub.add_parser("branch", help="energy branch E(mu) and level roots")
    p.add_argument("--mu-from", type=float, default=1.5)
    p.add_argument("--mu-to", type=float, default=9.0)
    p.add_argument("--steps", type=int, default=31)
    p.add_argument("--level", dest="level", type=float, action="append",
                   metavar="LAMBDA", help="absolute level Lambda (repeatable)")
    p.add_argument("--level-fraction", type=float, action="append",
                   metavar="F",
                   help="level 4 pi + F (Lambda* - 4 pi) (repeatable)")
    p.add_argument("--format", choices=["csv", "json"], default="json")
    _add_family_flags(p)
    p.set_defaults(func=cmd_branch)

    p = sub.add_parser("maximize", help="constrained functional maximization")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--n-nodes", type=int, default=4096)
    p.add_argument("--max-iter", type=int, default=400)
    _add_family_flags(p)
    p.set_defaults(func=cmd_maximize)

    p = sub.add_parser("check-h", help="tail-condition checks on h")
    p.add_argument("--t-max", type=float, default=1e6)
    _add_family_flags(p, default="log-power")
    p.set_defaults(func=cmd_check_h)

    for p in sub.choices.values():
        p.add_argument("--output", default=None, metavar="PATH",
                       help="write data file here instead of stdout")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, KeyError, TypeError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (IntegrationError, NoCrossingError, EventNotReachedError,
            quadrature.TailBoundError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except AssertionFailure as exc:
        print(f"assertion failure: {exc}", file=sys.stderr)
        return EXIT_ASSERTION


if __name__ == "__main__":
    sys.exit(main())
