"""Command line interface.

Subcommands:
    constants   family constants for one dimension
    curve       Frechet function and derivative on a radius grid
    mean        intrinsic mean of points read from a CSV file
    simulate    Monte Carlo grid of mean-convergence experiments
    rate        log-log rate fits of a simulate CSV
    clt         cube-rescaled limit-law check at the critical weight

Global flags (per subcommand): --seed, --threads, --out, --format.
Tabular subcommands default to CSV; rate and clt default to JSON.
Thread count falls back to the SMEARY_THREADS environment variable, then
to the CPU count; the flag wins.  Output bytes depend only on the seed and
the command arguments, never on the thread count.

Exit codes: 0 success, 2 invalid input or arguments, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from .errors import (
    ContractViolationError,
    CutLocusError,
    DegenerateDataError,
    DomainError,
    RootBracketError,
    SeriesTruncationError,
    SmearyError,
)
from .family import SmearyFamily, alpha_crit, c_m, gamma_m, sphere_volume
from .frechet import FrechetCurve
from .harness import (
    GridConfig,
    SimulationRecord,
    clt_cube_check,
    estimate_rate,
    log_spaced_sizes,
    run_grid,
    sigma_theoretical,
)
from .solver import SolverOptions, karcher_mean

DEFAULT_SEED = 20180214

SIMULATE_COLUMNS = (
    "m",
    "beta",
    "alpha",
    "n",
    "reps",
    "V",
    "stderr_V",
    "mean_iterations",
    "nonconverged",
    "seed",
)

CURVE_COLUMNS = ("delta", "G_minus_G0", "Gprime", "terms_used")

CONSTANTS_COLUMNS = (
    "m",
    "v_m",
    "v_m_plus_1",
    "gamma",
    "alpha_crit",
    "alpha_crit_2dp",
    "c",
)

RATE_COLUMNS = (
    "m",
    "beta",
    "slope",
    "slope_stderr",
    "intercept",
    "residual_rms",
    "implied_smeariness_order",
    "window_low",
    "window_high",
    "n_points",
)


def _fmt(x) -> str:
    """Repr-based float formatting; the shortest round-trip form."""
    return repr(float(x))


def _emit(text: str, out) -> None:
    data = text if text.endswith("\n") else text + "\n"
    if out in (None, "-"):
        sys.stdout.write(data)
    else:
        Path(out).write_text(data, encoding="ascii")


def _csv(rows) -> str:
    return "\n".join(",".join(row) for row in rows) + "\n"


def _json(payload) -> str:
    return json.dumps(payload, indent=2) + "\n"


def _parse_float_list(text: str, what: str):
    try:
        values = tuple(float(tok) for tok in text.split(",") if tok.strip() != "")
    except ValueError as exc:
        raise ContractViolationError(f"could not parse {what} list {text!r}") from exc
    if not values:
        raise ContractViolationError(f"{what} list is empty")
    return values


def _resolve_threads(args) -> int:
    if args.threads is not None:
        value = args.threads
    else:
        env = os.environ.get("SMEARY_THREADS")
        if env is None:
            value = os.cpu_count() or 1
        else:
            try:
                value = int(env)
            except ValueError as exc:
                raise ContractViolationError(
                    f"SMEARY_THREADS must be an integer, got {env!r}"
                ) from exc
    if value < 1:
        raise ContractViolationError("thread count must be >= 1")
    return value


def cmd_constants(args) -> int:
    m = args.dim
    if m < 2:
        raise ContractViolationError("--dim must be >= 2")
    row = {
        "m": m,
        "v_m": sphere_volume(m),
        "v_m_plus_1": sphere_volume(m + 1),
        "gamma": gamma_m(m),
        "alpha_crit": alpha_crit(m),
        "alpha_crit_2dp": format(alpha_crit(m), ".2f"),
        "c": c_m(m),
    }
    if args.format == "json":
        _emit(_json({"schema_version": "1", "constants": row}), args.out)
    else:
        table = [
            CONSTANTS_COLUMNS,
            (
                str(row["m"]),
                _fmt(row["v_m"]),
                _fmt(row["v_m_plus_1"]),
                _fmt(row["gamma"]),
                _fmt(row["alpha_crit"]),
                row["alpha_crit_2dp"],
                _fmt(row["c"]),
            ),
        ]
        _emit(_csv(table), args.out)
    return 0


def _family_from_args(args) -> SmearyFamily:
    if args.alpha is not None:
        return SmearyFamily(args.dim, args.alpha)
    return SmearyFamily.from_beta(args.dim, args.beta)


def cmd_curve(args) -> int:
    family = _family_from_args(args)
    if not 0.0 < args.dmax < math.pi:
        raise DomainError("--dmax must lie in (0, pi)")
    if args.steps < 1:
        raise ContractViolationError("--steps must be >= 1")
    if not 0.0 < args.tol < 1.0:
        raise ContractViolationError("--tol must lie in (0, 1)")
    deltas = np.linspace(0.0, args.dmax, args.steps + 1)
    curve = FrechetCurve.compute(family, deltas, tol=args.tol)
    if args.format == "json":
        payload = {
            "schema_version": "1",
            "m": family.m,
            "alpha": family.alpha,
            "beta": family.beta,
            "tol": curve.tol,
            "delta": [float(d) for d in curve.deltas],
            "G_minus_G0": [float(v) for v in curve.values],
            "Gprime": [float(g) for g in curve.grads],
            "terms_used": [int(t) for t in curve.truncation_terms],
        }
        _emit(_json(payload), args.out)
    else:
        table = [CURVE_COLUMNS]
        for d, v, g, t in zip(
            curve.deltas, curve.values, curve.grads, curve.truncation_terms
        ):
            table.append((_fmt(d), _fmt(v), _fmt(g), str(int(t))))
        _emit(_csv(table), args.out)
    return 0


def _load_points(path: str) -> np.ndarray:
    try:
        raw = Path(path).read_text()
    except OSError as exc:
        raise ContractViolationError(f"cannot read {path}: {exc}") from exc
    rows = []
    width = None
    for lineno, line in enumerate(raw.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        try:
            row = [float(tok) for tok in stripped.replace(",", " ").split()]
        except ValueError as exc:
            raise ContractViolationError(
                f"{path}:{lineno}: not a numeric row"
            ) from exc
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise ContractViolationError(
                f"{path}:{lineno}: expected {width} columns, found {len(row)}"
            )
        rows.append(row)
    if not rows:
        raise ContractViolationError(f"{path}: no data rows")
    if width < 2:
        raise ContractViolationError(f"{path}: need at least 2 coordinates per row")
    return np.array(rows, dtype=np.float64)


def cmd_mean(args) -> int:
    X = _load_points(args.infile)
    opts = SolverOptions(step_tol=args.step_tol, max_iter=args.max_iter)
    res = karcher_mean(X, opts)
    coords = [float(v) for v in res.mean.coords]
    if args.format == "json":
        payload = {
            "schema_version": "1",
            "mean": coords,
            "iterations": res.iterations,
            "final_step": res.final_step,
            "converged": res.converged,
            "frechet_value": res.frechet_value,
            "antipodal_skips": res.antipodal_skips,
            "degenerate_init": res.degenerate_init,
        }
        _emit(_json(payload), args.out)
    else:
        header = tuple(f"x{i}" for i in range(len(coords))) + (
            "iterations",
            "final_step",
            "converged",
            "frechet_value",
            "antipodal_skips",
        )
        row = tuple(_fmt(v) for v in coords) + (
            str(res.iterations),
            _fmt(res.final_step),
            str(int(res.converged)),
            _fmt(res.frechet_value),
            str(res.antipodal_skips),
        )
        _emit(_csv([header, row]), args.out)
    return 0


def _simulate_rows(records) -> list:
    rows = [SIMULATE_COLUMNS]
    for r in records:
        rows.append(
            (
                str(r.m),
                _fmt(r.beta),
                _fmt(r.alpha),
                str(r.n),
                str(r.reps),
                _fmt(r.V),
                _fmt(r.stderr_V),
                _fmt(r.mean_iterations),
                str(r.nonconverged_count),
                str(r.seed),
            )
        )
    return rows


def cmd_simulate(args) -> int:
    betas = _parse_float_list(args.betas, "beta")
    sizes = log_spaced_sizes(args.nmin, args.nmax, args.per_decade)
    solver = SolverOptions(step_tol=args.step_tol, max_iter=args.max_iter)
    config = GridConfig(
        m=args.dim,
        betas=betas,
        sample_sizes=sizes,
        reps=args.reps,
        seed=args.seed,
        solver=solver,
    )
    records = run_grid(config, workers=_resolve_threads(args))
    for r in records:
        if r.flagged:
            print(
                f"note: cell beta={r.beta:g} n={r.n} had "
                f"{r.nonconverged_count}/{r.reps} replications at the "
                "iteration cap",
                file=sys.stderr,
            )
    if args.format == "json":
        payload = {
            "schema_version": "1",
            "config": {
                "m": config.m,
                "betas": list(config.betas),
                "sample_sizes": list(config.sample_sizes),
                "reps": config.reps,
                "seed": config.seed,
                "solver": {
                    "step_tol": config.solver.step_tol,
                    "max_iter": config.solver.max_iter,
                    "step_size": config.solver.step_size,
                },
            },
            "records": [
                {
                    "m": r.m,
                    "beta": r.beta,
                    "alpha": r.alpha,
                    "n": r.n,
                    "reps": r.reps,
                    "V": r.V,
                    "stderr_V": r.stderr_V,
                    "mean_iterations": r.mean_iterations,
                    "nonconverged": r.nonconverged_count,
                    "seed": r.seed,
                }
                for r in records
            ],
        }
        _emit(_json(payload), args.out)
    else:
        _emit(_csv(_simulate_rows(records)), args.out)
    return 0


def _read_simulate_csv(path: str) -> list:
    try:
        raw = Path(path).read_text()
    except OSError as exc:
        raise ContractViolationError(f"cannot read {path}: {exc}") from exc
    lines = [ln for ln in raw.splitlines() if ln.strip()]
    if not lines:
        raise ContractViolationError(f"{path}: empty file")
    header = tuple(tok.strip() for tok in lines[0].split(","))
    if header != SIMULATE_COLUMNS:
        raise ContractViolationError(
            f"{path}: expected header {','.join(SIMULATE_COLUMNS)}"
        )
    records = []
    for lineno, line in enumerate(lines[1:], start=2):
        toks = [tok.strip() for tok in line.split(",")]
        if len(toks) != len(SIMULATE_COLUMNS):
            raise ContractViolationError(
                f"{path}:{lineno}: expected {len(SIMULATE_COLUMNS)} fields"
            )
        try:
            records.append(
                SimulationRecord(
                    m=int(toks[0]),
                    beta=float(toks[1]),
                    alpha=float(toks[2]),
                    n=int(toks[3]),
                    reps=int(toks[4]),
                    V=float(toks[5]),
                    stderr_V=float(toks[6]),
                    mean_iterations=float(toks[7]),
                    nonconverged_count=int(toks[8]),
                    seed=int(toks[9]),
                )
            )
        except ValueError as exc:
            raise ContractViolationError(f"{path}:{lineno}: bad field") from exc
    if not records:
        raise ContractViolationError(f"{path}: no data rows")
    return records


def _parse_window(text):
    if text is None:
        return None
    parts = text.split(":")
    if len(parts) != 2:
        raise ContractViolationError("--window must look like NLOW:NHIGH")
    try:
        lo, hi = float(parts[0]), float(parts[1])
    except ValueError as exc:
        raise ContractViolationError("--window bounds must be numeric") from exc
    if not 0 < lo <= hi:
        raise ContractViolationError("--window must satisfy 0 < NLOW <= NHIGH")
    return (lo, hi)


def cmd_rate(args) -> int:
    records = _read_simulate_csv(args.infile)
    window = _parse_window(args.window)
    groups = {}
    for r in records:
        groups.setdefault((r.m, r.beta), []).append(r)
    out_rows = []
    for (m, beta) in sorted(groups):
        est = estimate_rate(groups[(m, beta)], window=window)
        out_rows.append(
            {
                "m": m,
                "beta": beta,
                "slope": est.slope,
                "slope_stderr": est.slope_stderr,
                "intercept": est.intercept,
                "residual_rms": est.residual_rms,
                "implied_smeariness_order": est.implied_smeariness_order,
                "window_low": est.window[0],
                "window_high": est.window[1],
                "n_points": est.n_points,
            }
        )
    if args.format == "csv":
        table = [RATE_COLUMNS]
        for row in out_rows:
            table.append(
                (
                    str(row["m"]),
                    _fmt(row["beta"]),
                    _fmt(row["slope"]),
                    _fmt(row["slope_stderr"]),
                    _fmt(row["intercept"]),
                    _fmt(row["residual_rms"]),
                    _fmt(row["implied_smeariness_order"]),
                    _fmt(row["window_low"]),
                    _fmt(row["window_high"]),
                    str(row["n_points"]),
                )
            )
        _emit(_csv(table), args.out)
    else:
        _emit(_json({"schema_version": "1", "estimates": out_rows}), args.out)
    return 0


def cmd_clt(args) -> int:
    opts = SolverOptions(step_tol=args.step_tol, max_iter=args.max_iter)
    check = clt_cube_check(args.dim, args.n, args.reps, args.seed, options=opts)
    sigma = None
    if args.sigma_draws > 0:
        sigma = sigma_theoretical(args.dim, mc_draws=args.sigma_draws, seed=args.seed)
    if args.format == "csv":
        cols = (
            "m",
            "n",
            "reps",
            "component",
            "mean",
            "mean_stderr",
            "skewness",
            "skewness_stderr",
            "variance",
            "diag_ratio",
            "max_offdiag_corr",
            "excluded",
            "seed",
        )
        table = [cols]
        for i in range(check.m):
            table.append(
                (
                    str(check.m),
                    str(check.n),
                    str(check.reps),
                    str(i),
                    _fmt(check.mean[i]),
                    _fmt(check.mean_stderr[i]),
                    _fmt(check.skewness[i]),
                    _fmt(check.skewness_stderr[i]),
                    _fmt(check.cov[i, i]),
                    _fmt(check.diag_ratio),
                    _fmt(check.max_offdiag_corr),
                    str(check.excluded),
                    str(check.seed),
                )
            )
        _emit(_csv(table), args.out)
    else:
        payload = {
            "schema_version": "1",
            "m": check.m,
            "n": check.n,
            "reps": check.reps,
            "seed": check.seed,
            "mean": [float(v) for v in check.mean],
            "mean_stderr": [float(v) for v in check.mean_stderr],
            "cov": [[float(v) for v in row] for row in check.cov],
            "diag_ratio": check.diag_ratio,
            "max_offdiag_corr": check.max_offdiag_corr,
            "skewness": [float(v) for v in check.skewness],
            "skewness_stderr": [float(v) for v in check.skewness_stderr],
            "excluded": check.excluded,
        }
        if sigma is not None:
            payload["sigma_theoretical"] = [
                [float(v) for v in row] for row in sigma
            ]
        _emit(_json(payload), args.out)
    return 0


def _common_parser(default_format: str) -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--seed", type=int, default=DEFAULT_SEED, help="master RNG seed"
    )
    common.add_argument(
        "--threads",
        type=int,
        default=None,
        help="worker processes (default: SMEARY_THREADS env, then CPU count)",
    )
    common.add_argument("--out", default="-", help="output file path, - for stdout")
    common.add_argument(
        "--format",
        choices=("csv", "json"),
        default=default_format,
        help=f"output format (default {default_format})",
    )
    return common


def build_parser() -> argparse.ArgumentParser:
    tabular = _common_parser("csv")
    record = _common_parser("json")

    parser = argparse.ArgumentParser(
        prog="smeary",
        description="Smeary location mixtures on hyperspheres: analytics, "
        "intrinsic means, and Monte Carlo rate experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser(
        "constants", parents=[tabular], help="family constants for one dimension"
    )
    p.add_argument("--dim", type=int, default=2, help="sphere dimension m >= 2")
    p.set_defaults(func=cmd_constants)

    p = sub.add_parser(
        "curve", parents=[tabular], help="Frechet function on a radius grid"
    )
    p.add_argument("--dim", type=int, default=2, help="sphere dimension")
    group = p.add_mutually_exclusive_group()
    group.add_argument(
        "--beta", type=float, default=0.0, help="offset from the critical weight"
    )
    group.add_argument("--alpha", type=float, default=None, help="mixture weight")
    p.add_argument("--dmax", type=float, default=3.0, help="largest radius, < pi")
    p.add_argument("--steps", type=int, default=120, help="grid intervals")
    p.add_argument(
        "--tol", type=float, default=1e-12, help="relative series tolerance"
    )
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser(
        "mean", parents=[tabular], help="intrinsic mean of points from a CSV file"
    )
    p.add_argument("--in", dest="infile", required=True, help="points file")
    p.add_argument("--step-tol", type=float, default=1e-10)
    p.add_argument("--max-iter", type=int, default=10000)
    p.set_defaults(func=cmd_mean)

    p = sub.add_parser(
        "simulate", parents=[tabular], help="Monte Carlo convergence grid"
    )
    p.add_argument("--dim", type=int, default=2, help="sphere dimension")
    p.add_argument(
        "--betas",
        default="-0.2,-0.1,-0.05,-0.02,0,0.02,0.05,0.1",
        help="comma-separated offsets from the critical weight",
    )
    p.add_argument("--nmin", type=int, default=30, help="smallest sample size")
    p.add_argument("--nmax", type=int, default=100000, help="largest sample size")
    p.add_argument(
        "--per-decade", type=int, default=4, help="sample sizes per decade"
    )
    p.add_argument("--reps", type=int, default=200, help="replications per cell")
    p.add_argument("--step-tol", type=float, default=1e-10)
    p.add_argument("--max-iter", type=int, default=10000)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser(
        "rate", parents=[record], help="log-log rate fits of a simulate CSV"
    )
    p.add_argument("--in", dest="infile", required=True, help="simulate CSV")
    p.add_argument(
        "--window", default=None, help="inclusive sample-size window NLOW:NHIGH"
    )
    p.set_defaults(func=cmd_rate)

    p = sub.add_parser(
        "clt", parents=[record], help="cube-rescaled limit-law check"
    )
    p.add_argument("--dim", type=int, default=2, help="sphere dimension")
    p.add_argument("--n", type=int, default=10000, help="sample size per replication")
    p.add_argument("--reps", type=int, default=500, help="replications")
    p.add_argument(
        "--sigma-draws",
        type=int,
        default=100000,
        help="Monte Carlo draws for the theoretical covariance, 0 to skip",
    )
    p.add_argument("--step-tol", type=float, default=1e-10)
    p.add_argument("--max-iter", type=int, default=10000)
    p.set_defaults(func=cmd_clt)

    return parser


def _normalize_argv(argv):
    """Join '--betas <list>' into '--betas=<list>'.

    Lists of offsets usually start with a minus sign, which argparse would
    otherwise read as the start of another flag.
    """
    argv = list(sys.argv[1:] if argv is None else argv)
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok == "--betas" and i + 1 < len(argv):
            out.append(f"--betas={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(_normalize_argv(argv))
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 2
    try:
        return args.func(args)
    except (ContractViolationError, DomainError, DegenerateDataError) as exc:
        print(f"smeary: error: {exc}", file=sys.stderr)
        return 2
    except (CutLocusError, SeriesTruncationError, RootBracketError) as exc:
        print(f"smeary: numerical failure: {exc}", file=sys.stderr)
        return 3
    except SmearyError as exc:
        print(f"smeary: numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
