"""Command-line surface: synthesize data, train, classify, sweep, report.

Every command is deterministic given its flags and --seed (wall-clock timings
excluded).  Reports go to stdout (or --out) in CSV or JSON; progress notes
and summaries go to stderr; failures print one `error: ...` line on stderr
and exit nonzero.
"""

from __future__ import annotations

import argparse
import json
import sys

from .datasets import load_csv, make_synthetic, save_csv
from .pipeline import Model, PipelineConfig, classify_dataset, footprint, train
from .sweeps import AXES, SweepSpec, degradation_table, run_sweep


def _add_config_flags(p: argparse.ArgumentParser, infer_channels: bool = False):
    p.add_argument("--dim", type=int, default=10000, help="hypervector dimension")
    p.add_argument(
        "--channels",
        type=int,
        default=None if infer_channels else 4,
        help="channel count" + (" (default: inferred from the dataset)" if infer_channels else ""),
    )
    p.add_argument("--levels", type=int, default=22, help="quantization levels")
    p.add_argument("--min", type=float, default=0.0, help="smallest input value")
    p.add_argument("--max", type=float, default=21.0, help="largest input value")
    p.add_argument("--ngram", type=int, default=1, help="temporal window length")
    p.add_argument("--seed", type=int, default=1, help="seed for all derived vectors")
    p.add_argument("--workers", type=int, default=1, help="parallel worker count")


def _add_output_flags(p: argparse.ArgumentParser):
    p.add_argument("--out", default=None, help="output path (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv",
                   help="report format")


def _config(args, channels: int | None = None) -> PipelineConfig:
    return PipelineConfig(
        dim=args.dim,
        channels=args.channels if args.channels is not None else channels,
        levels=args.levels,
        vmin=args.min,
        vmax=args.max,
        ngram=args.ngram,
        seed=args.seed,
        workers=args.workers,
    )


def _int_list(text: str) -> tuple[int, ...]:
    try:
        values = tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise ValueError(f"expected comma-separated integers, got {text!r}") from None
    if not values:
        raise ValueError("expected at least one integer")
    return values


def _emit(text: str, out: str | None):
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="") as f:
            f.write(text)


# ---------------------------------------------------------------------------
# Commands


def cmd_synth(args) -> int:
    trials = make_synthetic(
        args.classes,
        args.channels,
        args.length,
        args.trials,
        args.noise,
        args.seed,
        levels=args.levels,
        vmin=args.min,
        vmax=args.max,
    )
    if args.out is None:
        save_csv(trials, sys.stdout)
    else:
        save_csv(trials, args.out)
        print(
            f"wrote {len(trials)} trials ({args.classes} classes) to {args.out}",
            file=sys.stderr,
        )
    return 0


def cmd_train(args) -> int:
    dataset = load_csv(args.dataset)
    config = _config(args, channels=dataset[0].channels)
    model = train(config, dataset, args.train_frac, args.split_seed)
    model.save(args.out)
    for entry in model.am.entries:
        print(f"class {entry.label}: {entry.total} training windows")
    print(f"model written to {args.out}")
    return 0


def cmd_classify(args) -> int:
    model = Model.load(args.model)
    dataset = load_csv(args.dataset)
    results = classify_dataset(model, dataset, workers=args.workers)
    hits = sum(r.label == t.label for r, t in zip(results, dataset))
    accuracy = hits / len(dataset)

    pred_labels = list(model.am.labels)
    true_labels = list(pred_labels)
    for t in dataset:
        if t.label not in true_labels:
            true_labels.append(t.label)
    confusion = {tl: {pl: 0 for pl in pred_labels} for tl in true_labels}
    for trial, result in zip(dataset, results):
        confusion[trial.label][result.label] += 1

    if args.format == "json":
        obj = {
            "accuracy": accuracy,
            "classLabels": pred_labels,
            "trials": [
                {
                    "index": i,
                    "label": t.label,
                    "predicted": r.label,
                    "correct": r.label == t.label,
                    "distances": list(r.distances),
                }
                for i, (t, r) in enumerate(zip(dataset, results))
            ],
            "confusion": {
                tl: confusion[tl] for tl in true_labels
            },
        }
        _emit(json.dumps(obj, indent=2) + "\n", args.out)
    else:
        lines = ["trial,label,predicted,correct"]
        for i, (t, r) in enumerate(zip(dataset, results)):
            lines.append(f"{i},{t.label},{r.label},{int(r.label == t.label)}")
        _emit("\n".join(lines) + "\n", args.out)
    corner = "true\\pred"
    width = max(len(name) for name in true_labels + pred_labels + [corner])
    print("confusion matrix (rows true, columns predicted):", file=sys.stderr)
    header = " ".join([f"{corner:>{width}}"] + [f"{p:>{width}}" for p in pred_labels])
    print(header, file=sys.stderr)
    for tl in true_labels:
        row = " ".join(
            [f"{tl:>{width}}"] + [f"{confusion[tl][pl]:>{width}}" for pl in pred_labels]
        )
        print(row, file=sys.stderr)
    print(f"accuracy: {accuracy:.4f} ({hits}/{len(dataset)} trials)", file=sys.stderr)
    return 0


def cmd_sweep(args) -> int:
    baseline = _config(args, channels=4)
    spec = SweepSpec(
        axis=args.axis,
        values=_int_list(args.values),
        repetitions=args.reps,
        baseline=baseline,
        windows=args.windows,
        data_seed=args.seed,
    )
    report = run_sweep(spec)
    for value, message in report.errors:
        print(f"error: {args.axis}={value}: {message}", file=sys.stderr)
    if args.format == "json":
        obj = {
            "axis": report.axis,
            "windows": report.windows,
            "wallTimeRSquared": report.wall_time_r_squared,
            "rows": [
                {
                    "axisValue": r.axis_value,
                    "medianWallTime": r.median_wall_time,
                    "opCount": r.op_count,
                    "footprintBytes": r.footprint_bytes,
                    "throughputWindowsPerSec": r.throughput_windows_per_sec,
                    "latencyMsPerWindow": r.latency_ms_per_window,
                }
                for r in report.rows
            ],
            "errors": [
                {"axisValue": v, "message": m} for v, m in report.errors
            ],
        }
        _emit(json.dumps(obj, indent=2) + "\n", args.out)
    else:
        _emit(report.to_csv(), args.out)
    for r in report.rows:
        print(
            f"{args.axis}={r.axis_value}: {r.latency_ms_per_window:.3f} ms/window"
            f" (10 ms budget)",
            file=sys.stderr,
        )
    print(
        f"wall-time R^2 vs {args.axis}: {report.wall_time_r_squared:.4f}",
        file=sys.stderr,
    )
    return 0


def cmd_degradation(args) -> int:
    dataset = load_csv(args.dataset)
    baseline = _config(args, channels=dataset[0].channels)
    rows = degradation_table(
        dataset, _int_list(args.dims), baseline, args.train_frac, args.split_seed
    )
    if args.format == "json":
        obj = [{"dim": r.dim, "accuracy": r.accuracy} for r in rows]
        _emit(json.dumps(obj, indent=2) + "\n", args.out)
    else:
        lines = ["dimension,accuracy"]
        lines += [f"{r.dim},{r.accuracy:.4f}" for r in rows]
        _emit("\n".join(lines) + "\n", args.out)
    return 0


def cmd_footprint(args) -> int:
    config = _config(args, channels=4)
    parts = footprint(config, args.classes)
    if args.format == "json":
        _emit(json.dumps(parts, indent=2) + "\n", args.out)
    else:
        lines = ["component,bytes"]
        lines += [f"{key},{value}" for key, value in parts.items()]
        _emit("\n".join(lines) + "\n", args.out)
    return 0


# ---------------------------------------------------------------------------
# Parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hdckit",
        description="Binary hypervector classification toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a labeled synthetic dataset CSV")
    p.add_argument("--classes", type=int, default=5, help="number of classes")
    p.add_argument("--trials", type=int, default=10, help="trials per class")
    p.add_argument("--length", type=int, default=1500, help="samples per trial")
    p.add_argument("--noise", type=float, default=0.0,
                   help="Gaussian noise standard deviation on the value scale")
    _add_config_flags(p)
    _add_output_flags(p)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("train", help="train a model from a dataset CSV")
    p.add_argument("dataset", help="dataset CSV path")
    p.add_argument("--train-frac", type=float, default=0.25,
                   help="leading fraction of each class used for training")
    p.add_argument("--split-seed", type=int, default=None,
                   help="shuffle the dataset order before splitting")
    _add_config_flags(p, infer_channels=True)
    p.add_argument("--out", required=True, help="model file path")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("classify", help="classify a dataset CSV against a model")
    p.add_argument("model", help="model file path")
    p.add_argument("dataset", help="dataset CSV path")
    p.add_argument("--workers", type=int, default=None,
                   help="parallel worker count (default: model config)")
    _add_output_flags(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("sweep", help="scalability sweep over one axis")
    p.add_argument("--axis", choices=AXES, required=True)
    p.add_argument("--values", required=True,
                   help="comma-separated strictly increasing axis values")
    p.add_argument("--reps", type=int, default=5, help="timing repetitions")
    p.add_argument("--windows", type=int, default=512,
                   help="windows classified per measurement")
    _add_config_flags(p)
    _add_output_flags(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("degradation", help="accuracy vs dimension table")
    p.add_argument("dataset", help="dataset CSV path")
    p.add_argument("--dims", required=True, help="comma-separated dimensions")
    p.add_argument("--train-frac", type=float, default=0.25)
    p.add_argument("--split-seed", type=int, default=None)
    _add_config_flags(p, infer_channels=True)
    _add_output_flags(p)
    p.set_defaults(func=cmd_degradation)

    p = sub.add_parser("footprint", help="closed-form memory footprint report")
    p.add_argument("--classes", type=int, default=5, help="trained class count")
    _add_config_flags(p)
    _add_output_flags(p)
    p.set_defaults(func=cmd_footprint)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except BrokenPipeError:
        return 1
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
