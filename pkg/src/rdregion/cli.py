"""Command-line front end: model files in, region tables and reports out.

Commands:

* check      — validate a model file, report tree-structure residuals and
               (when channels are present) the conditional-vs-marginal rate
               identity residuals; exit 1 if any residual exceeds --tol.
* region     — trace the rate frontier at a distortion target; CSV out.
* simulate   — Monte Carlo run of the binning scheme; JSON report with the
               analytic bounds alongside, so inside/outside-region status is
               self-documenting.
* wyner-ziv  — single-source-with-side-information rate-distortion sweep for
               a two-variable model; CSV out, with the closed-form column
               when the binary-symmetric-Hamming shortcut applies.

Exit codes: 0 success, 1 assertion/threshold failure, 2 input/config error.
All outputs are deterministic given (inputs, flags, seed); floats are printed
with six significant digits.  --plot renders a figure next to the delimited
output; the CSV/JSON remains the contract.  RD_REGION_THREADS overrides
--threads; the default is machine parallelism.
"""

from __future__ import annotations

import argparse
import csv
import io
import os
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import RdRegionError
from .modelio import ModelFile, format_float, load_model_file, report_json
from .optimizer import OBJECTIVES, SearchConfig, trace_frontier
from .region import RateTriple, inner_bound, verify_rate_identities
from .simulate import (
    TYPICALITY_ROBUST,
    TYPICALITY_WEAK,
    TypicalityParams,
    resolve_binning,
    run_binning_trials,
)
from .sources import (
    DistortionMeasure,
    SourceModel,
    TestChannelTriple,
    bsc_matrix,
    check_tree_structure,
    hamming_distortion,
    test_channel,
)
from .wynerziv import (
    binary_closed_form,
    closed_form_parameters,
    wyner_ziv_reduction,
)

_TREE_RESIDUAL_NAMES = {
    "x1_rest_given_z": "X1 independent of (X2, X3, F) given Z",
    "x2_rest_given_z": "X2 independent of (X1, X3, F) given Z",
    "x3_rest_given_f": "X3 independent of (X1, X2, Z) given F",
    "x1_x2_given_z": "X1 independent of X2 given Z",
    "x12_x3_given_zf": "(X1, X2) independent of X3 given (Z, F)",
}


def _parse_floats(text: str, what: str, count: int | None = None) -> tuple[float, ...]:
    try:
        vals = tuple(float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"{what} must be comma-separated numbers, got {text!r}")
    if count is not None and len(vals) != count:
        raise argparse.ArgumentTypeError(f"{what} needs {count} comma-separated values, got {text!r}")
    return vals


def _triple(what: str):
    def parse(text: str) -> tuple[float, float, float]:
        v = _parse_floats(text, what, 3)
        return (v[0], v[1], v[2])
    return parse


def _int_triple(what: str):
    def parse(text: str) -> tuple[int, int, int]:
        parts = text.split(",")
        if len(parts) != 3 or not all(p.strip().isdigit() for p in parts):
            raise argparse.ArgumentTypeError(f"{what} needs 3 comma-separated integers, got {text!r}")
        return (int(parts[0]), int(parts[1]), int(parts[2]))
    return parse


def _distortion_grid(text: str) -> tuple[float, ...]:
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise argparse.ArgumentTypeError(
                f"--distortion-grid range form is start:stop:step, got {text!r}"
            )
        try:
            start, stop, step = (float(p) for p in parts)
        except ValueError:
            raise argparse.ArgumentTypeError(f"--distortion-grid has a non-number in {text!r}")
        if step <= 0 or stop < start:
            raise argparse.ArgumentTypeError(f"--distortion-grid range {text!r} is empty")
        n = int(round((stop - start) / step))
        levels = tuple(round(start + i * step, 9) for i in range(n + 1))
        return tuple(d for d in levels if d <= stop + 1e-12)
    return _parse_floats(text, "--distortion-grid")


def _resolve_threads(flag_value: int | None) -> int:
    env = os.environ.get("RD_REGION_THREADS")
    if env is not None:
        if not env.isdigit() or int(env) < 1:
            raise RdRegionError(f"RD_REGION_THREADS must be a positive integer, got {env!r}")
        return int(env)
    if flag_value is not None:
        return flag_value
    return os.cpu_count() or 1


def _write_text(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _plot_path(args: argparse.Namespace) -> str | None:
    """Resolve --plot: explicit path, or <out>.png when --plot is bare."""
    if args.plot is None:
        return None
    if args.plot != "":
        return args.plot
    if args.out == "-":
        raise RdRegionError("--plot needs a path when output goes to stdout")
    return str(Path(args.out).with_suffix(".png"))


def _measures_for(mf: ModelFile, model: SourceModel) -> tuple[DistortionMeasure, ...]:
    out = []
    for i in (1, 2, 3):
        name = f"X{i}"
        out.append(mf.distortions.get(name) or hamming_distortion(model.alphabet(name)))
    return tuple(out)


def _channels_from_arg(arg: str | None, mf: ModelFile, model: SourceModel) -> TestChannelTriple:
    if arg is None:
        if mf.channels is None:
            raise RdRegionError(
                "no test channels: pass --channels or add a 'channels' block to the model file"
            )
        return mf.channels
    if arg.startswith("bsc:"):
        probs = _parse_floats(arg[4:], "--channels bsc list", 3)
        chans = []
        for m, p in zip((1, 2, 3), probs):
            alpha = model.alphabet(f"X{m}")
            if alpha.size != 2:
                raise RdRegionError(
                    f"--channels bsc needs binary sources; X{m} has {alpha.size} symbols"
                )
            chans.append(test_channel(m, alpha, bsc_matrix(p)))
        return TestChannelTriple(chans[0], chans[1], chans[2])
    other = load_model_file(arg)
    if other.channels is None:
        raise RdRegionError(f"model file {arg} has no 'channels' block")
    return other.channels


# ---------------------------------------------------------------------------
# check
# ---------------------------------------------------------------------------

def cmd_check(args: argparse.Namespace) -> int:
    mf = load_model_file(args.model)
    model = mf.source_model()
    tol = args.tol

    tree_res = check_tree_structure(model, tol=tol)
    violations = [
        f"{_TREE_RESIDUAL_NAMES[k]} (residual {format_float(v)})"
        for k, v in tree_res.items() if v > tol
    ]

    report: dict = {
        "schema_version": 1,
        "tol": tol,
        "tree_structure": dict(tree_res),
        "violations": violations,
    }

    worst = max(tree_res.values())
    if mf.channels is not None:
        identities = verify_rate_identities(model, mf.channels)
        residuals = {k: v for k, v in identities.items()
                     if k.endswith("_residual") or k.startswith("markov_")}
        report["rate_identities"] = identities
        worst = max(worst, max(residuals.values()))
        for k, v in residuals.items():
            if v > tol:
                report["violations"].append(f"rate identity {k} (residual {format_float(v)})")

    report["max_residual"] = worst
    report["pass"] = worst <= tol
    _write_text(args.out, report_json(report))
    return 0 if report["pass"] else 1


# ---------------------------------------------------------------------------
# region
# ---------------------------------------------------------------------------

def cmd_region(args: argparse.Namespace) -> int:
    mf = load_model_file(args.model)
    model = mf.source_model()
    cfg = SearchConfig(
        distortion_targets=args.distortion,
        w_alphabet_sizes=args.w_sizes,
        grid_step=args.grid_step,
        refine_iters=args.refine_iters,
        objective=args.objective,
        threads=_resolve_threads(args.threads),
    )
    measures = _measures_for(mf, model)
    points = trace_frontier(model, cfg, measures)

    if args.w_sizes is not None:
        w_sizes = args.w_sizes
    elif points:
        w_sizes = tuple(c.out_axis.size for c in points[0].channels.channels)
    else:
        w_sizes = tuple(model.alphabet(f"X{i}").size + 1 for i in (1, 2, 3))
    x_sizes = tuple(model.alphabet(f"X{i}").size for i in (1, 2, 3))

    header = ["D1", "D2", "D3", "R1", "R2", "R3", "sum_rate", "bound_form"]
    for m in (1, 2, 3):
        for i in range(x_sizes[m - 1]):
            for j in range(w_sizes[m - 1]):
                header.append(f"w{m}_{i}_{j}")

    records = []
    for pt in points:
        params = tuple(
            float(v)
            for m in (1, 2, 3)
            for v in np.asarray(pt.channels.channels[m - 1].rows).reshape(-1)
        )
        key = (pt.rates.total, pt.rates.r1, pt.rates.r2, pt.rates.r3) + params
        records.append((key, pt, params))
    records.sort(key=lambda r: r[0])

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for _, pt, params in records:
        row = [format_float(v) for v in pt.distortions]
        row += [format_float(v) for v in (pt.rates.r1, pt.rates.r2, pt.rates.r3, pt.rates.total)]
        row.append(pt.bound_form)
        row += [format_float(v) for v in params]
        writer.writerow(row)
    _write_text(args.out, buf.getvalue())

    if not points:
        print(
            f"warning: no channel on the step-{args.grid_step:g} grid meets "
            f"distortion targets {args.distortion}; wrote header only",
            file=sys.stderr,
        )
    plot_to = _plot_path(args)
    if plot_to:
        from .plotting import plot_frontier

        rows = [{"R1": pt.rates.r1, "R2": pt.rates.r2, "R3": pt.rates.r3}
                for _, pt, _ in records]
        plot_frontier(rows, args.distortion, plot_to)
    return 0


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------

def cmd_simulate(args: argparse.Namespace) -> int:
    mf = load_model_file(args.model)
    model = mf.source_model()
    channels = _channels_from_arg(args.channels, mf, model)
    params = TypicalityParams(epsilon=args.epsilon, n=args.n)
    scheme = resolve_binning(args.n, args.rates, args.rates_prime)

    report = run_binning_trials(
        model, channels, args.rates, args.rates_prime, params,
        trials=args.trials, seed=args.seed, typicality=args.typicality,
        threads=_resolve_threads(args.threads),
    )

    bounds = inner_bound(model, channels)
    margins = {
        "r1": args.rates[0] - bounds.r1,
        "r2": args.rates[1] - bounds.r2,
        "r3": args.rates[2] - bounds.r3,
        "r12": args.rates[0] + args.rates[1] - bounds.r12,
        "r13": args.rates[0] + args.rates[2] - bounds.r13,
        "r23": args.rates[1] + args.rates[2] - bounds.r23,
        "r123": sum(args.rates) - bounds.r123,
    }
    doc = {
        "schema_version": 1,
        "config": {
            "model": mf.name,
            "n": args.n,
            "epsilon": args.epsilon,
            "trials": args.trials,
            "seed": args.seed,
            "typicality": args.typicality,
            "rates": list(args.rates),
            "rates_prime": list(args.rates_prime),
            "codebook_bits": list(scheme.word_bits),
            "bin_bits": list(scheme.bin_bits),
            "codebook_words": list(scheme.word_counts),
            "bins": list(scheme.bin_counts),
        },
        "report": {
            "trials": report.trials,
            "event1_count": report.event1_count,
            "event2_count": report.event2_count,
            "event3_count": report.event3_count,
            "decode_failures": report.decode_failures,
            "success_count": report.success_count,
            "empirical_distortions": (list(report.empirical_distortions)
                                      if report.empirical_distortions is not None else None),
            "per_class_rates": report.per_class_rates,
        },
        "analytic": {
            "bounds": bounds.as_dict(),
            "rates_inside_region": bounds.satisfied_by(RateTriple(*args.rates)),
            "margins": margins,
        },
    }
    _write_text(args.out, report_json(doc))
    plot_to = _plot_path(args)
    if plot_to:
        from .plotting import plot_simulation

        plot_simulation(report.per_class_rates, plot_to)
    return 0


# ---------------------------------------------------------------------------
# wyner-ziv
# ---------------------------------------------------------------------------

def cmd_wyner_ziv(args: argparse.Namespace) -> int:
    mf = load_model_file(args.model)
    p_xy = mf.two_variable_joint()
    x_name = p_xy.names[0]
    measure = mf.distortions.get(x_name) or hamming_distortion(p_xy.axes[0])
    cfg = SearchConfig(
        distortion_targets=(0.0, 0.0, 0.0),
        w_alphabet_sizes=(args.w_size, args.w_size, args.w_size),
        grid_step=args.grid_step,
        threads=_resolve_threads(args.threads),
    )
    pairs = wyner_ziv_reduction(p_xy, measure, cfg, args.distortion_grid)

    p = closed_form_parameters(p_xy, measure)
    closed = binary_closed_form(p) if p is not None else None

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["D", "R", "closed_form_R"] if closed else ["D", "R"])
    for d, r in pairs:
        row = [format_float(d), format_float(r)]
        if closed:
            row.append(format_float(closed.rate(d)))
        writer.writerow(row)
    _write_text(args.out, buf.getvalue())

    if not pairs:
        print("warning: no distortion level is reachable on this grid; wrote header only",
              file=sys.stderr)
    plot_to = _plot_path(args)
    if plot_to:
        from .plotting import plot_rate_distortion

        cf = ([(d, closed.rate(d)) for d, _ in pairs] if closed else None)
        plot_rate_distortion(pairs, cf, plot_to)
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rdregion",
        description="Rate-distortion regions for three separately encoded "
                    "correlated sources with decoder side information.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_check = sub.add_parser("check", help="validate a model and its structural identities")
    p_check.add_argument("model", help="model JSON path")
    p_check.add_argument("--tol", type=float, default=1e-9,
                         help="residual tolerance (default 1e-9)")
    p_check.add_argument("--out", default="-", help="output path (default stdout)")
    p_check.set_defaults(func=cmd_check)

    p_region = sub.add_parser("region", help="trace the rate frontier at a distortion target")
    p_region.add_argument("model", help="model JSON path")
    p_region.add_argument("--distortion", type=_triple("--distortion"), required=True,
                          metavar="D1,D2,D3", help="per-source distortion ceilings")
    p_region.add_argument("--grid-step", type=float, default=0.05,
                          help="channel grid resolution (default 0.05)")
    p_region.add_argument("--w-sizes", type=_int_triple("--w-sizes"), default=None,
                          metavar="K1,K2,K3",
                          help="auxiliary alphabet sizes (default |X_i|+1)")
    p_region.add_argument("--objective", choices=OBJECTIVES, default="min_sum_rate")
    p_region.add_argument("--refine-iters", type=int, default=0,
                          help="dyadic refinement rounds after the sweep (default 0)")
    p_region.add_argument("--threads", type=int, default=None)
    p_region.add_argument("--out", default="-", help="CSV path (default stdout)")
    p_region.add_argument("--plot", nargs="?", const="", default=None, metavar="PNG",
                          help="also render the frontier scatter (default <out>.png)")
    p_region.set_defaults(func=cmd_region)

    p_sim = sub.add_parser("simulate", help="Monte Carlo run of the binning scheme")
    p_sim.add_argument("model", help="model JSON path")
    p_sim.add_argument("--channels", default=None,
                       help="'bsc:p1,p2,p3', a JSON path with a channels block, "
                            "or omit to use the model file's channels")
    p_sim.add_argument("--n", type=int, required=True, help="blocklength")
    p_sim.add_argument("--rates", type=_triple("--rates"), required=True,
                       metavar="R1,R2,R3", help="bin rates (bits/symbol)")
    p_sim.add_argument("--rates-prime", type=_triple("--rates-prime"), required=True,
                       metavar="R1',R2',R3'", help="codebook rates (bits/symbol)")
    p_sim.add_argument("--epsilon", type=float, required=True, help="typicality slack")
    p_sim.add_argument("--trials", type=int, required=True)
    p_sim.add_argument("--seed", type=int, required=True)
    p_sim.add_argument("--typicality", choices=(TYPICALITY_WEAK, TYPICALITY_ROBUST),
                       default=TYPICALITY_WEAK,
                       help="joint-typicality test used operationally (default weak)")
    p_sim.add_argument("--threads", type=int, default=None)
    p_sim.add_argument("--out", default="-", help="JSON path (default stdout)")
    p_sim.add_argument("--plot", nargs="?", const="", default=None, metavar="PNG",
                       help="also render the outcome bar chart (default <out>.png)")
    p_sim.set_defaults(func=cmd_simulate)

    p_wz = sub.add_parser("wyner-ziv",
                          help="rate-distortion sweep for a two-variable model")
    p_wz.add_argument("model", help="two-variable model JSON path")
    p_wz.add_argument("--distortion-grid", type=_distortion_grid, default=None,
                      metavar="A:B:STEP|D1,D2,...",
                      help="distortion levels (default: 0.01 steps up to the zero-rate point)")
    p_wz.add_argument("--grid-step", type=float, default=0.01,
                      help="channel grid resolution (default 0.01)")
    p_wz.add_argument("--w-size", type=int, default=3,
                      help="auxiliary alphabet size (default 3)")
    p_wz.add_argument("--threads", type=int, default=None)
    p_wz.add_argument("--out", default="-", help="CSV path (default stdout)")
    p_wz.add_argument("--plot", nargs="?", const="", default=None, metavar="PNG",
                      help="also render the rate-distortion curve (default <out>.png)")
    p_wz.set_defaults(func=cmd_wyner_ziv)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except RdRegionError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
