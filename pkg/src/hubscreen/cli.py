"""Command-line entry point: ``hubscreen screen|calibrate|simulate|waterfall``.

Exit codes: 0 success, 2 usage or validation error, 3 numeric degeneracy.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from . import __version__
from .errors import HubScreenError, NumericDegeneracy, ValidationError
from .io import (
    IngestOptions,
    MissingPolicy,
    Orientation,
    ReportBundle,
    fmt_float,
    load_matrix,
    load_report,
    summary_text,
    trajectory_csv,
    waterfall_csv,
    write_report,
)
from .screen import screen
from .sim import SimSpec, run_monte_carlo
from .special import cap_probability_P0
from .stats import (
    Mode,
    PhiConvention,
    ScreeningParams,
    critical_threshold,
    expected_hub_count,
    fwer,
    xi_rate,
)
from .waterfall import build_waterfall, trajectory
from .zscore import score_matrix

EXIT_OK, EXIT_USAGE, EXIT_DEGENERATE = 0, 2, 3

_MODES = {"corr": Mode.CORRELATION, "parcor": Mode.PARTIAL_CORRELATION}


def _unit_interval(s: str) -> float:
    x = float(s)
    if not 0.0 <= x <= 1.0:
        raise argparse.ArgumentTypeError(f"{s} is not in [0, 1]")
    return x


def _positive_int(s: str) -> int:
    x = int(s)
    if x < 1:
        raise argparse.ArgumentTypeError(f"{s} must be a positive integer")
    return x


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hubscreen", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("screen", help="screen a data matrix for hub variables")
    s.add_argument("--input", required=True)
    s.add_argument("--mode", choices=sorted(_MODES), default="parcor")
    s.add_argument("--rho-star", type=_unit_interval, required=True)
    s.add_argument("--delta-max", type=_positive_int, default=None)
    s.add_argument("--phi-convention", choices=[c.value for c in PhiConvention], default="poisson")
    s.add_argument("--J", type=float, default=1.0)
    s.add_argument("--out", required=True)
    s.add_argument("--threads", type=_positive_int, default=1)
    s.add_argument("--engine", choices=["exact", "range"], default="exact")
    s.add_argument("--delimiter", default=",")
    s.add_argument("--no-header", action="store_true")
    s.add_argument("--variables-as-rows", action="store_true")
    s.add_argument("--drop-missing", action="store_true", help="drop columns with missing cells")

    c = sub.add_parser("calibrate", help="critical thresholds and rate tables (no data)")
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--p", type=int, required=True)
    c.add_argument("--delta-max", type=_positive_int, default=1)
    c.add_argument("--J", type=float, default=1.0)
    c.add_argument("--phi-convention", choices=[c.value for c in PhiConvention], default="poisson")
    c.add_argument("--grid-step", type=float, default=0.01)
    c.add_argument("--grid-halfwidth", type=float, default=0.05)

    m = sub.add_parser("simulate", help="Monte Carlo check of the null approximations")
    m.add_argument("--model", choices=["identity", "block", "elliptical"], default="identity")
    m.add_argument("--n", type=int, required=True)
    m.add_argument("--p", type=int, required=True)
    m.add_argument("--k", type=int, default=0)
    m.add_argument("--block-rho", type=float, default=0.0)
    m.add_argument("--dof", type=float, default=0.0)
    m.add_argument("--rho", type=float, required=True)
    m.add_argument("--delta", type=_positive_int, default=1)
    m.add_argument("--trials", type=_positive_int, default=1)
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("--mode", choices=sorted(_MODES), default="corr")
    m.add_argument("--J", type=float, default=1.0)
    m.add_argument("--threads", type=_positive_int, default=1)

    w = sub.add_parser("waterfall", help="re-emit waterfall curves or one trajectory as CSV")
    w.add_argument("--report", required=True)
    w.add_argument("--vertex", default=None, help="variable label")
    return ap


def cmd_screen(args) -> int:
    opts = IngestOptions(
        delimiter=args.delimiter,
        has_header=not args.no_header,
        orientation=Orientation.VARIABLES_AS_ROWS if args.variables_as_rows else Orientation.SAMPLES_AS_ROWS,
        missing_policy=MissingPolicy.DROP_COLUMNS if args.drop_missing else MissingPolicy.FAIL,
    )
    t0 = time.perf_counter()
    loaded = load_matrix(args.input, opts)
    X = loaded.data
    mode = _MODES[args.mode]
    params = ScreeningParams(
        n=X.n, p=X.p, J=args.J, mode=mode, phi_convention=PhiConvention(args.phi_convention)
    )
    Z = score_matrix(X, mode.value)
    report = screen(
        Z, args.rho_star, params, engine=args.engine, threads=args.threads, delta_max=args.delta_max
    )
    elapsed = time.perf_counter() - t0
    bundle = ReportBundle(
        report,
        build_waterfall(report),
        provenance={
            "input": {"path": str(args.input), "sha256": loaded.sha256, "dropped_columns": loaded.dropped},
            "engine": args.engine,
            "threads": args.threads,
            "seconds": round(elapsed, 3),
        },
    )
    write_report(bundle, args.out)
    sys.stdout.write(summary_text(report))
    return EXIT_OK


def cmd_calibrate(args) -> int:
    conv = PhiConvention(args.phi_convention)
    out = sys.stdout
    for delta in range(1, args.delta_max + 1):
        try:
            rc = critical_threshold(args.p, args.n, delta, args.J, conv)
        except ValidationError as e:
            out.write(f"rho_c[delta={delta}] undefined: {e}\n")
            continue
        out.write(f"rho_c[delta={delta}] = {rc:.4f}  ({fmt_float(rc)})\n")
        lo = max(args.grid_step, rc - args.grid_halfwidth)
        hi = min(1.0, rc + args.grid_halfwidth)
        grid = np.round(np.arange(lo, hi + 1e-12, args.grid_step), 10)
        out.write("rho\tP0\txi\tE[N]\tFWER\n")
        for r in grid:
            params = ScreeningParams(args.n, args.p, delta, float(r), args.J, phi_convention=conv)
            xi, _ = xi_rate(params)
            out.write(
                f"{r:.4f}\t{cap_probability_P0(float(r), args.n):.6e}\t{xi:.6e}\t"
                f"{expected_hub_count(params).binomial:.6e}\t{fwer(params):.6f}\n"
            )
    return EXIT_OK


def cmd_simulate(args) -> int:
    spec = SimSpec(
        n=args.n, p=args.p, seed=args.seed, model=args.model, k=args.k,
        block_rho=args.block_rho, dof=args.dof, trials=args.trials,
    )
    res = run_monte_carlo(spec, args.rho, args.delta, _MODES[args.mode], J=args.J, workers=args.threads)
    json.dump(res.to_dict(), sys.stdout, indent=2)
    sys.stdout.write("\n")
    return EXIT_OK


def cmd_waterfall(args) -> int:
    report = load_report(args.report)
    if args.vertex is None:
        sys.stdout.write(waterfall_csv(build_waterfall(report)))
    else:
        sys.stdout.write(trajectory_csv(trajectory(report, args.vertex)))
    return EXIT_OK


_COMMANDS = {
    "screen": cmd_screen,
    "calibrate": cmd_calibrate,
    "simulate": cmd_simulate,
    "waterfall": cmd_waterfall,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except NumericDegeneracy as e:
        print(f"hubscreen: numeric degeneracy: {e}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (HubScreenError, ValueError, OSError) as e:
        print(f"hubscreen: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
