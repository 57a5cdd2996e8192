"""Command-line surface: corrupt, eval, sweep, synth, plot.

Every run prints the fully resolved configuration before doing any work, is
deterministic given --seed, and never lets --threads change an output byte.
Exit codes: 0 success, 1 I/O or data error, 2 usage error.

A JSON --config file may pre-set any flag (keys are the flag names with
dashes turned into underscores); explicit command-line flags win.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .core import CorruptionKind, CorruptionSpec, SeedPolicy, Severity
from .dataio import (
    DEFAULT_LAYOUT,
    DataFormatError,
    LayoutConfig,
    read_dataset,
    read_detections,
    read_report,
    write_dataset,
    write_manifest,
    write_report,
)
from .evaluation import EvalConfig, EvalReport, rows_from_results, stratify
from .pipeline import corrupt_sequence
from .svgplot import render_report_charts
from .synth import (
    EXPERIMENT_DETECTOR_PARAMS,
    PseudoDetectorParams,
    SceneParams,
    generate_dataset,
    run_degradation_experiment,
)

CORRUPTION_NAMES = [k.value for k in CorruptionKind]
GRID_GROUPS = {
    "all": list(CorruptionKind),
    "lidar": [CorruptionKind.LIDAR_GAUSSIAN, CorruptionKind.CUTOUT, CorruptionKind.CROSSTALK,
              CorruptionKind.DENSITY_DECREASE, CorruptionKind.FOV_LOSS],
    "camera": [CorruptionKind.CAMERA_GAUSSIAN, CorruptionKind.FOG, CorruptionKind.SUNLIGHT],
    "cross": [CorruptionKind.SPATIAL_MISALIGN, CorruptionKind.TEMPORAL_MISALIGN_CAMERA,
              CorruptionKind.TEMPORAL_MISALIGN_LIDAR],
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="robust3d",
        description="Sensor-corruption synthesis and stratified AP evaluation "
                    "for 3D person detection.",
    )
    parser.add_argument("--seed", type=int, default=0, help="global random seed")
    parser.add_argument("--threads", type=int, default=1,
                        help="worker threads; never changes any output byte")
    parser.add_argument("--config", default=None,
                        help="JSON file pre-setting any flag; explicit flags override")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("corrupt", help="materialize a corrupted copy of a dataset")
    p.add_argument("--input", help="input dataset root")
    p.add_argument("--output", help="output dataset root")
    p.add_argument("--corruption", choices=CORRUPTION_NAMES)
    p.add_argument("--severity", type=int, choices=[1, 2, 3])
    p.add_argument("--layout-config", default=None, help="dataset layout JSON")

    p = sub.add_parser("eval", help="evaluate detections against a dataset")
    p.add_argument("--gt", help="ground-truth dataset root")
    p.add_argument("--detections", help="detections JSONL file")
    p.add_argument("--iou", default="0.3,0.5", help="comma-separated IoU thresholds")
    p.add_argument("--strata", choices=["none", "distance", "occlusion", "combined"],
                   default="none")
    p.add_argument("--out", default=None, help="report path (default: CSV to stdout)")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--layout-config", default=None)

    p = sub.add_parser("sweep", help="corruption-grid sweep with the pseudo-detector")
    p.add_argument("--input", help="dataset root")
    p.add_argument("--detector", choices=["pseudo"], default="pseudo")
    p.add_argument("--grid", default="all",
                   help="all | lidar | camera | cross | comma-list of corruption names")
    p.add_argument("--out", help="report CSV path")
    p.add_argument("--strata", choices=["none", "distance", "occlusion", "combined"],
                   default="none")
    p.add_argument("--detector-min-points", type=int,
                   default=EXPERIMENT_DETECTOR_PARAMS.min_points_to_detect)
    p.add_argument("--detector-jitter", type=float,
                   default=EXPERIMENT_DETECTOR_PARAMS.jitter_sigma_m)
    p.add_argument("--layout-config", default=None)

    p = sub.add_parser("synth", help="generate a synthetic dataset")
    p.add_argument("--frames", type=int, default=20, help="frames per sequence")
    p.add_argument("--sequences", type=int, default=1)
    p.add_argument("--persons", default="4..10", help="person count range a..b")
    p.add_argument("--out", help="output dataset root")

    p = sub.add_parser("plot", help="render SVG charts from a report CSV")
    p.add_argument("--report", help="report CSV path")
    p.add_argument("--out", help="output directory (or a .svg path for the first chart)")

    return parser


def _apply_config_file(parser: argparse.ArgumentParser, argv: list[str]) -> list[str]:
    """Pre-parse --config and install its values as parser defaults."""
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config", default=None)
    known, _ = pre.parse_known_args(argv)
    if known.config:
        try:
            obj = json.loads(Path(known.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            parser.error(f"cannot read config file {known.config}: {exc}")
        if not isinstance(obj, dict):
            parser.error(f"config file {known.config} must hold a JSON object")
        values = {k.replace("-", "_"): v for k, v in obj.items()}
        # install each key only on the parser that owns the flag; otherwise a
        # subparser default would clobber a value the main parser just parsed
        subparsers = parser._subparsers._group_actions[0].choices.values()  # type: ignore[union-attr]
        for target in (parser, *subparsers):
            owned = {a.dest for a in target._actions}
            target.set_defaults(**{k: v for k, v in values.items() if k in owned})
    return argv


def _print_resolved(args: argparse.Namespace) -> None:
    resolved = {k: v for k, v in sorted(vars(args).items())}
    print("resolved config: " + json.dumps(resolved, default=str))


def _load_sequences(root: str, layout: LayoutConfig):
    """Dataset as ordered sequences (temporal corruptions need the grouping)."""
    by_seq: dict[str, list] = {}
    for frame in read_dataset(root, layout, strict=True):
        by_seq.setdefault(frame.sequence_id, []).append(frame)
    return [sorted(v, key=lambda f: f.index_in_sequence) for _, v in sorted(by_seq.items())]


def _layout_from_args(args) -> LayoutConfig:
    if getattr(args, "layout_config", None):
        return LayoutConfig.from_file(args.layout_config)
    return DEFAULT_LAYOUT


def _require(args, parser, *names) -> None:
    missing = [n for n in names if getattr(args, n, None) in (None, "")]
    if missing:
        parser.error("missing required flags: " + ", ".join("--" + n.replace("_", "-") for n in missing))


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_corrupt(args, parser) -> int:
    _require(args, parser, "input", "output", "corruption", "severity")
    layout = _layout_from_args(args)
    spec = CorruptionSpec(CorruptionKind(args.corruption), Severity.from_level(args.severity))
    policy = SeedPolicy(args.seed)
    sequences = _load_sequences(args.input, layout)
    if not sequences:
        print(f"error: no frames found under {args.input}", file=sys.stderr)
        return 1

    def work(seq):
        return corrupt_sequence(seq, spec, policy)

    with ThreadPoolExecutor(max_workers=max(1, args.threads)) as pool:
        corrupted = list(pool.map(work, sequences))

    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    write_dataset(corrupted, out, layout)
    write_manifest(out / "manifest.json", spec.kind.value, spec.severity.level,
                   args.seed, source=str(args.input))
    n = sum(len(s) for s in corrupted)
    print(f"wrote {n} corrupted frames to {out}")
    return 0


def _parse_thresholds(text: str, parser) -> tuple[float, ...]:
    try:
        values = tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        parser.error(f"--iou expects comma-separated numbers, got {text!r}")
    if not values or any(not 0.0 < v < 1.0 for v in values):
        parser.error(f"--iou thresholds must lie in (0, 1), got {text!r}")
    return values


def cmd_eval(args, parser) -> int:
    _require(args, parser, "gt", "detections")
    layout = _layout_from_args(args)
    cfg = EvalConfig(iou_thresholds=_parse_thresholds(args.iou, parser))
    frames = list(read_dataset(args.gt, layout, strict=True))
    detections = read_detections(args.detections)
    results = stratify(frames, detections, cfg, strata=args.strata)
    report = EvalReport(cfg.iou_thresholds, tuple(rows_from_results(results, cfg)))
    if args.out:
        write_report(report, args.out, format=args.format)
        print(f"wrote report with {len(report.rows)} rows to {args.out}")
    else:
        write_report(report, sys.stdout, format="csv")
    return 0


def _parse_grid(text: str, parser) -> list[CorruptionKind]:
    if text in GRID_GROUPS:
        return GRID_GROUPS[text]
    kinds = []
    for name in text.split(","):
        name = name.strip()
        if not name:
            continue
        try:
            kinds.append(CorruptionKind(name))
        except ValueError:
            parser.error(
                f"unknown corruption {name!r}; valid: {', '.join(CORRUPTION_NAMES)}")
    if not kinds:
        parser.error("--grid resolved to an empty corruption list")
    return kinds


def cmd_sweep(args, parser) -> int:
    _require(args, parser, "input", "out")
    layout = _layout_from_args(args)
    grid = _parse_grid(args.grid, parser)
    sequences = _load_sequences(args.input, layout)
    if not sequences:
        print(f"error: no frames found under {args.input}", file=sys.stderr)
        return 1
    detector = PseudoDetectorParams(
        min_points_to_detect=args.detector_min_points,
        jitter_sigma_m=args.detector_jitter,
    )
    with ThreadPoolExecutor(max_workers=max(1, args.threads)) as pool:
        report = run_degradation_experiment(
            sequences, grid=grid, detector=detector, seed=args.seed,
            strata=args.strata, map_fn=pool.map,
        )
    write_report(report, args.out, format="csv")
    print(f"wrote sweep report with {len(report.rows)} rows to {args.out}")
    return 0


def _parse_person_range(text: str, parser) -> tuple[int, int]:
    try:
        if ".." in text:
            a, b = text.split("..", 1)
            lo, hi = int(a), int(b)
        else:
            lo = hi = int(text)
    except ValueError:
        parser.error(f"--persons expects 'a..b' or a single integer, got {text!r}")
    if lo < 0 or hi < lo:
        parser.error(f"--persons range is invalid: {text!r}")
    return lo, hi


def cmd_synth(args, parser) -> int:
    _require(args, parser, "out")
    if args.frames < 1 or args.sequences < 1:
        parser.error("--frames and --sequences must be at least 1")
    persons = _parse_person_range(args.persons, parser)
    params = SceneParams(person_count_range=persons)
    dataset = generate_dataset(params, args.sequences, args.frames, args.seed)
    write_dataset(dataset, args.out)
    n = sum(len(s) for s in dataset)
    print(f"wrote {n} synthetic frames ({args.sequences} sequences) to {args.out}")
    return 0


def cmd_plot(args, parser) -> int:
    _require(args, parser, "report", "out")
    report = read_report(args.report, format="csv")
    charts = render_report_charts(report)
    if not charts:
        print("error: report has no data rows to plot", file=sys.stderr)
        return 1
    out = Path(args.out)
    if out.suffix == ".svg":
        names = sorted(charts)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(charts[names[0]])
        for name in names[1:]:
            (out.parent / f"{out.stem}_{name}.svg").write_text(charts[name])
    else:
        out.mkdir(parents=True, exist_ok=True)
        for name, svg in sorted(charts.items()):
            (out / f"{name}.svg").write_text(svg)
    print(f"wrote {len(charts)} chart(s) to {out}")
    return 0


_COMMANDS = {
    "corrupt": cmd_corrupt,
    "eval": cmd_eval,
    "sweep": cmd_sweep,
    "synth": cmd_synth,
    "plot": cmd_plot,
}


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _build_parser()
    _apply_config_file(parser, argv)
    args = parser.parse_args(argv)
    _print_resolved(args)
    try:
        return _COMMANDS[args.command](args, parser)
    except (DataFormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
