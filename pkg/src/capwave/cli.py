"""Command-line front end.

Subcommands: verify | spectrum | continue | profile | limit-check.  Flags can
also come from a JSON config file (--config PATH); explicit flags win.  All
outputs are UTF-8 and byte-deterministic for a fixed configuration.

Exit codes: 0 success, 1 usage/config error, 2 tolerance failure, 3 solver
failure (partial branch saved).  CAPWAVE_SEED is reserved but unused; every
algorithm here is deterministic.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import crapper, geometry
from .continuation import (
    DEFAULT_MAX_ITER,
    DEFAULT_TOL,
    DepthMode,
    StepUnderflowError,
    continue_branch,
)
from .linearization import INJECTIVITY_TOL, dG_matrix, jacobian_fd, recurrence_scan
from .operators import WaveParams, bernoulli_b, residual_G, residual_inf, theta_of, wavenumber_k
from .serialization import (
    branch_csv_text,
    branch_to_dict,
    dumps_fixed,
    profile_csv_text,
    profile_svg_text,
    solution_from_dict,
    write_json,
)
from .spectral import DegenerateMetricError

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_TOLERANCE = 2
EXIT_SOLVER = 3


class CliError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def __init__(self, *args, **kwargs):
        kwargs.setdefault("allow_abbrev", False)  # --g must not match --grid
        super().__init__(*args, **kwargs)

    def error(self, message):
        raise CliError(message)


def _add_config(p):
    p.add_argument("--config", type=str, default=None,
                   help="JSON file providing defaults for any flag")


def _add_constants(p):
    # only the commands that leave scaled variables need dimensional constants
    p.add_argument("--g", type=float, default=None, help="gravity (default 9.81)")
    p.add_argument("--sigma", type=float, default=None,
                   help="surface tension coefficient (default 0.074)")


def build_parser():
    top = _Parser(prog="capwave",
                  description="Steady capillary-gravity waves in the conformal "
                              "formulation: verification, spectra, continuation.")
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="check the explicit pure-capillary family")
    p.add_argument("--A", type=float, default=None, help="family parameter in (-1, 1)")
    p.add_argument("--grid", type=int, default=None, help="collocation points (default 512)")
    p.add_argument("--out", type=str, default=None, help="JSON report path")
    _add_config(p)

    p = sub.add_parser("spectrum", help="linearisation spectrum along the family")
    p.add_argument("--A-values", type=str, default=None,
                   help="comma-separated parameters (default 0.1..0.9)")
    p.add_argument("--M", type=int, default=None, help="sine modes kept (default 64)")
    p.add_argument("--out-json", type=str, default=None)
    p.add_argument("--out-csv", type=str, default=None)
    p.add_argument("--jobs", type=int, default=None, help="parallel grid cells (default 1)")
    _add_config(p)

    p = sub.add_parser("continue", help="continue the solution sheet in (alpha, beta)")
    p.add_argument("--A", type=float, default=None, help="starting parameter (nonzero)")
    p.add_argument("--alpha-start", type=float, default=None, help="default 0")
    p.add_argument("--alpha-max", type=float, default=None, help="default 0.05")
    p.add_argument("--steps", type=int, default=None, help="alpha steps (default 10)")
    p.add_argument("--beta-max", type=float, default=None,
                   help="sweep beta rows up to this value (row-major 2-D grid)")
    p.add_argument("--beta-steps", type=int, default=None)
    p.add_argument("--h", type=float, default=None, help="conformal depth (default infinite)")
    p.add_argument("--gamma", type=float, default=None, help="constant vorticity (default 0)")
    p.add_argument("--M", type=int, default=None, help="cosine modes (default 128)")
    p.add_argument("--grid", type=int, default=None)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--max-iter", type=int, default=None)
    p.add_argument("--out-json", type=str, default=None)
    p.add_argument("--out-csv", type=str, default=None)
    p.add_argument("--svg-dir", type=str, default=None, help="one profile SVG per step")
    _add_config(p)
    _add_constants(p)

    p = sub.add_parser("profile", help="surface curve of a stored solution")
    p.add_argument("--input", type=str, default=None, help="solution JSON")
    p.add_argument("--out-csv", type=str, default=None)
    p.add_argument("--out-svg", type=str, default=None)
    p.add_argument("--repeats", type=int, default=None, help="periods drawn (default 1)")
    _add_config(p)

    p = sub.add_parser("limit-check", help="finite-depth residual decay towards the deep limit")
    p.add_argument("--A", type=float, default=None, help="default 0.5")
    p.add_argument("--gamma", type=float, default=None, help="default 1")
    p.add_argument("--h", type=float, default=None, help="default 2")
    p.add_argument("--alphas", type=str, default=None, help="default 1e-2,1e-3,1e-4")
    p.add_argument("--grid", type=int, default=None)
    p.add_argument("--out", type=str, default=None)
    _add_config(p)
    _add_constants(p)
    return top


def _merge_config(args):
    cfg = {}
    if getattr(args, "config", None):
        try:
            with open(args.config, encoding="utf-8") as fh:
                cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise CliError(f"cannot read config {args.config}: {exc}")
        if not isinstance(cfg, dict):
            raise CliError("config file must hold a JSON object")
    for key, val in cfg.items():
        dest = key.replace("-", "_")
        if not hasattr(args, dest):
            raise CliError(f"unknown config key {key!r}")
        if getattr(args, dest) is None:
            setattr(args, dest, val)
    return args


def _default(args, name, value):
    if getattr(args, name) is None:
        setattr(args, name, value)


def _check_A(A):
    if not abs(A) < 1.0:
        raise CliError(f"parameter A must satisfy |A| < 1, got {A}")


# -- verify ---------------------------------------------------------------------


def cmd_verify(args):
    _default(args, "A", 0.5)
    _default(args, "grid", 512)
    _default(args, "out", None)
    _check_A(args.A)
    A, n = args.A, args.grid
    checks = {}

    def record(name, value, tol):
        checks[name] = {"value": value, "tolerance": tol, "pass": bool(value < tol)}

    record("identity_residual", crapper.verify_identity(A, n),
           1e-12 if abs(A) <= 0.75 else 1e-11)
    w = crapper.crapper_wave(A, n)
    beta = crapper.beta_of(A)
    params = WaveParams(alpha=0.0, beta=beta)
    record("residual_inf_norm", residual_inf(params, w).norm_inf(), 1e-9)
    record("bernoulli_deviation", abs(bernoulli_b(0.0, w) - 1.0), 1e-11)
    if A != 0.0:
        theta = crapper.crapper_theta(A, n)
        record("residual_G_norm", residual_G(beta, theta).norm_inf(), 1e-10)
        record("theta_route_mismatch",
               float(np.max(np.abs(theta_of(w).samples - theta.samples))), 1e-10)
    report = {"command": "verify", "A": A, "n_grid": n, "beta": beta,
              "checks": checks, "passed": all(c["pass"] for c in checks.values())}
    text = dumps_fixed(report) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    sys.stdout.write(text)
    return EXIT_OK if report["passed"] else EXIT_TOLERANCE


# -- spectrum ---------------------------------------------------------------------


def _spectrum_row(A, M):
    scan = recurrence_scan(A, M)
    beta = crapper.beta_of(A)
    n_grid = max(256, 4 * M, crapper.min_grid(A))
    theta = crapper.crapper_theta(A, n_grid)
    fd = jacobian_fd(lambda th: residual_G(beta, th), theta, M, basis_in="sine")
    an = dG_matrix(A, M, n_grid)
    mismatch = float(np.linalg.norm(fd.entries - an.entries)
                     / np.linalg.norm(an.entries))
    consistent = (scan.verdict == "injective") == (scan.sigma_min > INJECTIVITY_TOL)
    return {"A": A, "sigma_min": scan.sigma_min, "verdict": scan.verdict,
            "kernel": scan.kernel_description, "fd_mismatch": mismatch,
            "a1_coefficient": scan.a1_coefficient, "a2_coefficient": scan.a2_coefficient,
            "consistent": consistent}


def cmd_spectrum(args):
    _default(args, "M", 64)
    _default(args, "jobs", 1)
    if args.A_values is None:
        values = [round(0.1 * i, 10) for i in range(1, 10)]
    else:
        try:
            values = [float(v) for v in args.A_values.split(",") if v.strip()]
        except ValueError as exc:
            raise CliError(f"bad --A-values: {exc}")
    for A in values:
        _check_A(A)
    if args.jobs > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(lambda A: _spectrum_row(A, args.M), values))
    else:
        rows = [_spectrum_row(A, args.M) for A in values]
    passed = all(r["consistent"] and r["fd_mismatch"] <= 1e-4 for r in rows)
    report = {"command": "spectrum", "M": args.M, "rows": rows, "passed": passed}
    if args.out_json:
        write_json(args.out_json, report)
    if args.out_csv:
        cols = ("A", "sigma_min", "verdict", "kernel", "fd_mismatch",
                "a1_coefficient", "a2_coefficient", "consistent")
        lines = [",".join(cols)]
        for r in rows:
            lines.append(",".join(_fmt_cell(r[c]) for c in cols))
        with open(args.out_csv, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")
    sys.stdout.write(dumps_fixed(report) + "\n")
    return EXIT_OK if passed else EXIT_TOLERANCE


def _fmt_cell(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return "nan" if math.isnan(v) else "%.17g" % v
    return str(v)


# -- continue ----------------------------------------------------------------------


def _build_schedule(args, beta0):
    alphas = list(np.linspace(args.alpha_start, args.alpha_max, args.steps + 1))
    if args.beta_steps and args.beta_steps > 1:
        if args.beta_max is None:
            raise CliError("--beta-steps needs --beta-max")
        betas = list(np.linspace(beta0, args.beta_max, args.beta_steps))
    else:
        betas = [beta0]
    schedule = []
    for row, b in enumerate(betas):
        row_alphas = alphas if row % 2 == 0 else list(reversed(alphas))
        for a in row_alphas:  # serpentine keeps consecutive targets adjacent
            if not schedule or schedule[-1] != (a, b):
                schedule.append((a, b))
    return schedule


def cmd_continue(args):
    _default(args, "A", 0.3)
    _default(args, "alpha_start", 0.0)
    _default(args, "alpha_max", 0.05)
    _default(args, "steps", 10)
    _default(args, "gamma", 0.0)
    _default(args, "tol", DEFAULT_TOL)
    _default(args, "max_iter", DEFAULT_MAX_ITER)
    _default(args, "g", 9.81)
    _default(args, "sigma", 0.074)
    _default(args, "out_json", "branch.json")
    _default(args, "out_csv", "branch.csv")
    _check_A(args.A)
    if args.A == 0.0:
        raise CliError("continuation cannot start at A = 0 (singular Jacobian)")
    if args.alpha_start > 0.0:
        raise CliError("--alpha-start must be <= 0 (the pure-capillary curve)")
    if args.h is None and args.gamma != 0.0:
        raise CliError("--gamma needs a finite depth --h (deep water is irrotational)")
    depth = DepthMode.infinite() if args.h is None else DepthMode.finite(args.h, args.gamma)
    beta0 = crapper.beta_of(args.A)
    schedule = _build_schedule(args, beta0)
    code = EXIT_OK
    try:
        branch = continue_branch(args.A, schedule, depth=depth, M=args.M,
                                 n_grid=args.grid, tol=args.tol, max_iter=args.max_iter,
                                 g=args.g, sigma=args.sigma)
    except StepUnderflowError as exc:
        sys.stderr.write(f"capwave continue: {exc}\n")
        branch = exc.branch
        code = EXIT_SOLVER
    write_json(args.out_json, branch_to_dict(branch))
    with open(args.out_csv, "w", encoding="utf-8") as fh:
        fh.write(branch_csv_text(branch))
    if args.svg_dir:
        os.makedirs(args.svg_dir, exist_ok=True)
        for i, sol in enumerate(branch.solutions):
            curve, crossings = _solution_curve(sol)
            path = os.path.join(args.svg_dir, f"step_{i:04d}.svg")
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(profile_svg_text(curve.x, curve.y, crossings))
    sys.stdout.write(dumps_fixed({"command": "continue", "accepted": len(branch.solutions),
                                  "attempts": len(branch.step_history),
                                  "out_json": args.out_json, "out_csv": args.out_csv}) + "\n")
    return code


def _solution_curve(sol, n_points=None):
    p = sol.params
    if p.alpha > 0.0:
        k = wavenumber_k(p.alpha, p.beta, p.g, p.sigma)
        d = None if sol.depth.is_infinite else sol.depth.h * k
    else:
        k, d = 1.0, None
    n_points = n_points or max(geometry.GEOMETRY_POINTS, sol.w.n_grid)
    curve = geometry.surface_profile(sol.w, k, d=d, n_points=n_points)
    return curve, geometry.check_injective(curve).crossings


# -- profile -----------------------------------------------------------------------


def cmd_profile(args):
    _default(args, "repeats", 1)
    if not args.input:
        raise CliError("profile needs --input SOLUTION.json")
    try:
        with open(args.input, encoding="utf-8") as fh:
            sol = solution_from_dict(json.load(fh))
    except (OSError, json.JSONDecodeError, KeyError, ValueError) as exc:
        raise CliError(f"cannot load solution {args.input}: {exc}")
    # CSV at the stored grid so the profile round-trips losslessly
    curve_csv, _ = _solution_curve(sol, n_points=sol.w.n_grid)
    curve, crossings = _solution_curve(sol)
    if args.out_csv:
        with open(args.out_csv, "w", encoding="utf-8") as fh:
            fh.write(profile_csv_text(curve_csv.x, curve_csv.y))
    if args.out_svg:
        reps = max(1, args.repeats)
        xs, ys = [], []
        for r in range(reps):
            xs.append(curve.x + r * curve.period)
            ys.append(curve.y)
        x = np.concatenate(xs)
        y = np.concatenate(ys)
        marks = np.concatenate([crossings + np.array([r * curve.period, 0.0])
                                for r in range(reps)]) if len(crossings) else crossings
        with open(args.out_svg, "w", encoding="utf-8") as fh:
            fh.write(profile_svg_text(x, y, marks))
    sys.stdout.write(dumps_fixed({"command": "profile", "input": args.input,
                                  "points": len(curve_csv.x),
                                  "injective": bool(len(crossings) == 0),
                                  "crossings": int(len(crossings))}) + "\n")
    return EXIT_OK


# -- limit-check ---------------------------------------------------------------------


def cmd_limit_check(args):
    from .operators import residual_fd  # local import keeps module list tidy

    _default(args, "A", 0.5)
    _default(args, "gamma", 1.0)
    _default(args, "h", 2.0)
    _default(args, "alphas", "1e-2,1e-3,1e-4")
    _default(args, "grid", 512)
    _default(args, "g", 9.81)
    _default(args, "sigma", 0.074)
    _check_A(args.A)
    try:
        alphas = [float(v) for v in args.alphas.split(",") if v.strip()]
    except ValueError as exc:
        raise CliError(f"bad --alphas: {exc}")
    if any(a <= 0 for a in alphas):
        raise CliError("--alphas must be positive (the limit is taken from above)")
    A, n = args.A, args.grid
    w = crapper.crapper_wave(A, n)
    beta = crapper.beta_of(A)
    base = residual_inf(WaveParams(alpha=0.0, beta=beta, g=args.g, sigma=args.sigma), w)
    diffs = []
    for a in alphas:
        p = WaveParams(alpha=a, beta=beta, g=args.g, sigma=args.sigma,
                       gamma=args.gamma, h=args.h)
        diffs.append((residual_fd(p, w) - base).norm_inf())
    p0 = WaveParams(alpha=0.0, beta=beta, g=args.g, sigma=args.sigma,
                    gamma=args.gamma, h=args.h)
    exact_zero = (residual_fd(p0, w) - base).norm_inf()
    decreasing = all(b < a for a, b in zip(diffs, diffs[1:]))
    report = {"command": "limit-check", "A": A, "gamma": args.gamma, "h": args.h,
              "n_grid": n, "alphas": alphas, "differences": diffs,
              "strictly_decreasing": decreasing,
              "zero_at_nonpositive_alpha": bool(exact_zero == 0.0),
              "passed": bool(decreasing and exact_zero == 0.0)}
    text = dumps_fixed(report) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    sys.stdout.write(text)
    return EXIT_OK if report["passed"] else EXIT_TOLERANCE


# -- entry -------------------------------------------------------------------------


_DISPATCH = {"verify": cmd_verify, "spectrum": cmd_spectrum, "continue": cmd_continue,
             "profile": cmd_profile, "limit-check": cmd_limit_check}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _merge_config(args)
        return _DISPATCH[args.command](args)
    except CliError as exc:
        sys.stderr.write(f"capwave: {exc}\n")
        return EXIT_USAGE
    except (ValueError, DegenerateMetricError) as exc:
        sys.stderr.write(f"capwave: {exc}\n")
        return EXIT_USAGE


def console_main():
    raise SystemExit(main())


if __name__ == "__main__":
    raise SystemExit(main())
