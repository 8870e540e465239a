"""Command-line front end: design tables, evaluation reports, simulations.

Every command writes one machine-readable data file (CSV or JSON) plus a
``<output>.manifest.json`` sidecar recording the resolved configuration,
seed, tool version and a UTC timestamp.  Data files contain no timestamp,
so a re-run with the same arguments reproduces them byte for byte; the
sidecar is the only thing that differs.

Exit codes: 0 success, 2 usage error, 3 input parse error, 4 resource
limit exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from datetime import datetime, timezone
from typing import Sequence

from . import __version__
from .core import AngleSet
from .designs import SCHEME_ALIASES, SCHEMES, build_design, baseline_semicircle, design_optimal
from .search import MinimaxSearchConfig, ResourceLimitError, minimax_grid_search, worst_subset
from .simulate import (
    EstimationScenario,
    RssScenario,
    ring_positions,
    simulate_monitoring,
    simulate_worst_case_mse,
)

OUTPUT_DIR_ENV = "SENSEDESIGN_OUTPUT_DIR"


class InputParseError(Exception):
    """Malformed input file; carries the offending line number."""

    def __init__(self, path: str, line: int, message: str):
        super().__init__(f"{path}, line {line}: {message}")
        self.path = path
        self.line = line


def fmt_cell(value) -> str:
    """CSV cell rendering; floats keep full round-trip precision."""
    if isinstance(value, float):
        if math.isinf(value):
            return "+inf" if value > 0 else "-inf"
        return repr(value)
    if isinstance(value, (tuple, list)):
        return ";".join(str(v) for v in value)
    return str(value)


def sanitize_json(value):
    if isinstance(value, float):
        if math.isinf(value):
            return "+inf" if value > 0 else "-inf"
        return value
    if isinstance(value, dict):
        return {k: sanitize_json(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [sanitize_json(v) for v in value]
    return value


def write_atomic(path: str, data: str) -> None:
    parent = os.path.dirname(path) or "."
    os.makedirs(parent, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=parent, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def render_csv(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt_cell(v) for v in row])
    return buf.getvalue()


def render_json(obj) -> str:
    return json.dumps(sanitize_json(obj), indent=2, allow_nan=False) + "\n"


def resolve_output(name: str, explicit: str | None) -> str:
    if explicit:
        return explicit
    return os.path.join(os.environ.get(OUTPUT_DIR_ENV, "."), name)


def write_manifest(output_path: str, command: str, config: dict, seed: int | None) -> None:
    manifest = {
        "command": command,
        "config": sanitize_json(config),
        "seed": seed,
        "tool_version": __version__,
        "timestamp_utc": datetime.now(timezone.utc).isoformat(),
    }
    write_atomic(output_path + ".manifest.json", json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def read_angle_file(path: str) -> AngleSet:
    """Angle list from a CSV file with an ``angle_rad`` column."""
    try:
        fh = open(path, encoding="utf-8", newline="")
    except OSError as exc:
        raise InputParseError(path, 0, f"cannot open file: {exc}") from exc
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise InputParseError(path, 1, "empty file; expected a header with angle_rad") from None
        names = [h.strip() for h in header]
        if "angle_rad" not in names:
            raise InputParseError(path, 1, f"no angle_rad column in header {names}")
        col = names.index("angle_rad")
        values = []
        for line_no, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if col >= len(row):
                raise InputParseError(path, line_no, f"row has no column {col + 1}")
            text = row[col].strip()
            try:
                value = float(text)
            except ValueError:
                raise InputParseError(path, line_no, f"could not parse {text!r} as angle_rad") from None
            if not math.isfinite(value):
                raise InputParseError(path, line_no, f"angle_rad must be finite, got {text!r}")
            values.append(value)
    if not values:
        raise InputParseError(path, 1, "no angle rows in file")
    return AngleSet(values)


def parse_float_list(text: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def parse_pair(text: str) -> tuple[float, float]:
    parts = parse_float_list(text)
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected two comma-separated numbers, got {text!r}")
    return parts[0], parts[1]


# ---------------------------------------------------------------------------
# subcommands


def cmd_design(args) -> int:
    design = build_design(args.n, args.scheme)
    rows = [
        (i, a, r, math.cos(r), math.sin(r))
        for i, (a, r) in enumerate(zip(design.angles, design.raw))
    ]
    header = ["index", "angle_rad", "angle_rad_raw", "x", "y"]
    config = {"n": args.n, "scheme": args.scheme, "format": args.format}
    if args.format == "csv":
        payload = render_csv(header, rows)
    else:
        payload = render_json(
            {
                "command": "design",
                "n": args.n,
                "scheme": args.scheme,
                "angles": [dict(zip(header, row)) for row in rows],
            }
        )
    path = resolve_output(f"design_n{args.n}_{args.scheme}.{args.format}", args.output)
    write_atomic(path, payload)
    write_manifest(path, "design", {**config, "output": path}, seed=None)
    print(f"wrote {path} ({len(rows)} angles)")
    return 0


def evaluation_report(angles: AngleSet, k: int, source: str) -> dict:
    report = worst_subset(angles, k)
    s = report.summary
    return {
        "command": "evaluate",
        "input": source,
        "n": angles.n,
        "k": k,
        "worst_subset": list(report.worst_subset.indices),
        "pair_cosine_sum": s.pair_cosine_sum,
        "lambda_min": s.lambda_min,
        "lambda_max": s.lambda_max,
        "gram_condition": s.gram_condition,
        "matrix_condition": s.matrix_condition,
        "subsets_evaluated": report.subsets_evaluated,
    }


def cmd_evaluate(args) -> int:
    if bool(args.angles_file) == bool(args.n):
        print("evaluate needs exactly one of --angles-file or --n", file=sys.stderr)
        return 2
    if args.angles_file:
        angles = read_angle_file(args.angles_file)
        source = args.angles_file
        stem = os.path.splitext(os.path.basename(args.angles_file))[0]
        default_name = f"evaluate_{stem}.{args.format}"
    else:
        angles = build_design(args.n, args.scheme)
        source = f"{args.scheme}(n={args.n})"
        default_name = f"evaluate_n{args.n}_{args.scheme}.{args.format}"
    if not 1 <= args.k <= angles.n:
        print(f"--k must lie in [1, {angles.n}], got {args.k}", file=sys.stderr)
        return 2
    report = evaluation_report(angles, args.k, source)
    if args.format == "json":
        payload = render_json(report)
    else:
        keys = [k for k in report if k != "command"]
        payload = render_csv(keys, [[report[k] for k in keys]])
    path = resolve_output(default_name, args.output)
    write_atomic(path, payload)
    write_manifest(
        path,
        "evaluate",
        {
            "angles_file": args.angles_file,
            "n": args.n,
            "scheme": args.scheme,
            "k": args.k,
            "format": args.format,
            "output": path,
        },
        seed=None,
    )
    print(json.dumps(sanitize_json(report), indent=2))
    print(f"wrote {path}")
    return 0


def cmd_verify(args) -> int:
    if args.n_min < 3 or args.n_max < args.n_min:
        print(f"need 3 <= n-min <= n-max, got {args.n_min}..{args.n_max}", file=sys.stderr)
        return 2
    header = [
        "n",
        "optimal_objective",
        "optimal_gram_condition",
        "semicircle_objective",
        "semicircle_gram_condition",
        "circle_objective",
        "circle_gram_condition",
        "grid_objective",
        "grid_minus_optimal",
    ]
    rows = []
    for n in range(args.n_min, args.n_max + 1):
        per_scheme = {}
        for scheme in ("optimal_auto", "baseline_semicircle", "baseline_circle"):
            report = worst_subset(build_design(n, scheme), args.k)
            per_scheme[scheme] = report
        row = [n]
        for scheme in ("optimal_auto", "baseline_semicircle", "baseline_circle"):
            report = per_scheme[scheme]
            row += [report.objective, report.summary.gram_condition]
        if n <= args.grid_max_n:
            config = MinimaxSearchConfig(
                n=n,
                k=args.k,
                grid_points_per_angle=args.grid_points,
                refine_iterations=args.refine_iterations,
            )
            _, grid_report = minimax_grid_search(config)
            row += [grid_report.objective, grid_report.objective - per_scheme["optimal_auto"].objective]
        else:
            row += ["", ""]
        rows.append(row)
        print(f"n={n}: optimal objective {per_scheme['optimal_auto'].objective:.6f}")
    if args.format == "csv":
        payload = render_csv(header, rows)
    else:
        payload = render_json(
            {"command": "verify", "rows": [dict(zip(header, r)) for r in rows]}
        )
    path = resolve_output(f"verify_n{args.n_min}-{args.n_max}.{args.format}", args.output)
    write_atomic(path, payload)
    write_manifest(
        path,
        "verify",
        {
            "n_min": args.n_min,
            "n_max": args.n_max,
            "k": args.k,
            "grid_max_n": args.grid_max_n,
            "grid_points": args.grid_points,
            "refine_iterations": args.refine_iterations,
            "format": args.format,
            "output": path,
        },
        seed=None,
    )
    print(f"wrote {path}")
    return 0


def cmd_simulate_estimation(args) -> int:
    if args.n_min < 3 or args.n_max < args.n_min:
        print(f"need 3 <= n-min <= n-max, got {args.n_min}..{args.n_max}", file=sys.stderr)
        return 2
    header = ["n", "design", "worst_subset", "mse", "std_error", "expected_mse"]
    rows = []
    for n in range(args.n_min, args.n_max + 1):
        for label, angles in (("optimal", design_optimal(n)), ("semicircle", baseline_semicircle(n))):
            scenario = EstimationScenario(
                angles=angles,
                k=args.k,
                signal=args.signal,
                noise_std=args.noise_std,
                trials=args.trials,
                seed=args.seed,
            )
            result = simulate_worst_case_mse(scenario)
            rows.append(
                [
                    n,
                    label,
                    result.report.worst_subset.indices,
                    result.mse,
                    result.std_error,
                    result.expected_mse,
                ]
            )
    if args.format == "csv":
        payload = render_csv(header, rows)
    else:
        payload = render_json(
            {"command": "simulate-estimation", "rows": [dict(zip(header, r)) for r in rows]}
        )
    path = resolve_output(f"estimation_n{args.n_min}-{args.n_max}.{args.format}", args.output)
    write_atomic(path, payload)
    write_manifest(
        path,
        "simulate-estimation",
        {
            "n_min": args.n_min,
            "n_max": args.n_max,
            "k": args.k,
            "signal": list(args.signal),
            "noise_std": args.noise_std,
            "trials": args.trials,
            "seed": args.seed,
            "format": args.format,
            "output": path,
        },
        seed=args.seed,
    )
    print(f"wrote {path} ({len(rows)} rows)")
    return 0


def cmd_simulate_monitoring(args) -> int:
    if args.n < 3:
        print(f"--n must be at least 3, got {args.n}", file=sys.stderr)
        return 2
    header = ["snr_db", "design", "noise_std", "mse", "std_error", "mse_db", "worst_subset"]
    rows = []
    metadata = {}
    for label, angles in (("optimal", design_optimal(args.n)), ("semicircle", baseline_semicircle(args.n))):
        scenario = RssScenario(
            sensor_positions=ring_positions(angles, args.radius, args.source),
            source=args.source,
            sensor_radius=args.radius,
            amplitude=args.amplitude,
            path_loss=args.path_loss,
            trials=args.trials,
            seed=args.seed,
        )
        result = simulate_monitoring(scenario, args.snr, trials=args.trials)
        metadata[label] = result.metadata
        for point in result.points:
            rows.append(
                [
                    point.snr_db,
                    label,
                    point.noise_std,
                    point.mse,
                    point.std_error,
                    point.mse_db,
                    point.worst_subset,
                ]
            )
    rows.sort(key=lambda r: (r[0], r[1]))
    if args.format == "csv":
        payload = render_csv(header, rows)
    else:
        payload = render_json(
            {
                "command": "simulate-monitoring",
                "metadata": metadata,
                "rows": [dict(zip(header, r)) for r in rows],
            }
        )
    path = resolve_output(f"monitoring_n{args.n}.{args.format}", args.output)
    write_atomic(path, payload)
    write_manifest(
        path,
        "simulate-monitoring",
        {
            "n": args.n,
            "snr": list(args.snr),
            "trials": args.trials,
            "seed": args.seed,
            "radius": args.radius,
            "amplitude": args.amplitude,
            "path_loss": args.path_loss,
            "source": list(args.source),
            "format": args.format,
            "output": path,
            "metadata": metadata,
        },
        seed=args.seed,
    )
    print(f"wrote {path} ({len(rows)} rows)")
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sensedesign",
        description="Design and evaluate planar sensing directions by their worst-case conditioning.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)
    scheme_choices = list(SCHEMES) + sorted(SCHEME_ALIASES)

    p = sub.add_parser("design", help="emit a closed-form angle placement")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--scheme", default="optimal_auto", choices=scheme_choices)
    p.add_argument("--output")
    p.add_argument("--format", default="csv", choices=["csv", "json"])
    p.set_defaults(func=cmd_design)

    p = sub.add_parser("evaluate", help="worst-subset spectral report for a design or angle file")
    p.add_argument("--angles-file")
    p.add_argument("--n", type=int)
    p.add_argument("--scheme", default="optimal_auto", choices=scheme_choices)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--output")
    p.add_argument("--format", default="json", choices=["csv", "json"])
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("verify", help="closed-form designs vs baselines vs grid search")
    p.add_argument("--n-min", type=int, default=3)
    p.add_argument("--n-max", type=int, default=15)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--grid-max-n", type=int, default=5)
    p.add_argument("--grid-points", type=int, default=180)
    p.add_argument("--refine-iterations", type=int, default=200)
    p.add_argument("--output")
    p.add_argument("--format", default="csv", choices=["csv", "json"])
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("simulate-estimation", help="worst-subset recovery MSE versus n")
    p.add_argument("--n-min", type=int, default=3)
    p.add_argument("--n-max", type=int, default=15)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--signal", type=parse_pair, default=(9.0, 9.0))
    p.add_argument("--noise-std", type=float, default=1.0)
    p.add_argument("--trials", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output")
    p.add_argument("--format", default="csv", choices=["csv", "json"])
    p.set_defaults(func=cmd_simulate_estimation)

    p = sub.add_parser("simulate-monitoring", help="localization MSE versus SNR on ring placements")
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--snr", type=parse_float_list, default=[0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0])
    p.add_argument("--trials", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--radius", type=float, default=1.0)
    p.add_argument("--amplitude", type=float, default=1.0)
    p.add_argument("--path-loss", type=float, default=2.0)
    p.add_argument("--source", type=parse_pair, default=(0.0, 0.0))
    p.add_argument("--output")
    p.add_argument("--format", default="csv", choices=["csv", "json"])
    p.set_defaults(func=cmd_simulate_monitoring)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 3
    except ResourceLimitError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return 4
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
