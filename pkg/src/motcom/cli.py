"""Command-line interface: ``motcom compute | rank | plot``.

Flags can also be supplied through a JSON config file (--config) whose keys
mirror the long flag names with underscores; explicit flags override file
values.  The ONNX model path falls back to the MOTCOM_MODEL environment
variable.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

from .combine import MeanKind, Weights
from .errors import MotcomError
from .ingest import TargetFilter
from .motion import DEFAULT_ALPHA_SET, MotionConfig
from .occlusion import OcclusionMode
from .report import RunConfig, cmd_compute, cmd_plot, cmd_rank
from .visual import DEFAULT_RATIO_SET, VisualConfig


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="motcom",
        description="Complexity scores for multi-object tracking sequences "
        "and rank-based evaluation against tracker performance.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    compute = sub.add_parser("compute", help="score sequences under dataset roots")
    compute.add_argument("--data", action="append", default=None, metavar="ROOT",
                         help="dataset root (repeatable); sequences are subdirectories with gt/gt.txt")
    compute.add_argument("--config", type=Path, default=None,
                         help="JSON config file mirroring these flags")
    compute.add_argument("--out", default=None, metavar="DIR", help="output directory")
    compute.add_argument("--include", action="append", default=None, metavar="GLOB",
                         help="only sequences matching this glob (repeatable)")
    compute.add_argument("--exclude", action="append", default=None, metavar="GLOB",
                         help="skip sequences matching this glob (repeatable)")
    compute.add_argument("--no-vcom", action="store_true", default=None,
                         help="skip the visual score (no images needed); the combined "
                              "score then averages the remaining sub-metrics")
    compute.add_argument("--backend", choices=["test", "onnx"], default=None,
                         help="embedding backend (default: onnx when a model is set, else test)")
    compute.add_argument("--model", default=None, metavar="PATH",
                         help="ONNX model path (default: $MOTCOM_MODEL)")
    compute.add_argument("--threads", type=int, default=None, metavar="N",
                         help="worker threads for sequence-level parallelism")
    compute.add_argument("--weights", default=None, metavar="O,M,V",
                         help="comma-separated sub-metric weights (default 1,1,1)")
    compute.add_argument("--mean", choices=[k.value for k in MeanKind], default=None,
                         help="mean kind for combining sub-metrics")
    compute.add_argument("--occlusion", choices=[m.value for m in OcclusionMode], default=None,
                         help="use annotated visibility when present, or always recompute")
    compute.add_argument("--beta", type=int, default=None, metavar="N",
                         help="temporal step size for the motion score")
    compute.add_argument("--classes", default=None, metavar="ID[,ID...]",
                         help="target class ids (default: 1)")
    compute.add_argument("--cache", action="store_true", default=None,
                         help="persist embeddings under <out>/cache/")

    rank_cmd = sub.add_parser("rank", help="compare metric rankings against tracker scores")
    rank_cmd.add_argument("--reports", type=Path, required=True, help="summary.csv from compute")
    rank_cmd.add_argument("--scores", type=Path, required=True,
                          help="tracker scores CSV (wide or long form)")
    rank_cmd.add_argument("--metric", default="hota", help="score column to rank by")
    rank_cmd.add_argument("--columns", default=None, metavar="COL[,COL...]",
                          help="metric columns to evaluate (default: all complete columns)")
    rank_cmd.add_argument("--out", type=Path, default=None, help="output directory")

    plot = sub.add_parser("plot", help="scatter plots of metrics against tracker scores")
    plot.add_argument("--reports", type=Path, required=True, help="summary.csv from compute")
    plot.add_argument("--scores", type=Path, required=True, help="tracker scores CSV")
    plot.add_argument("--out", type=Path, required=True, help="output directory for SVGs")
    plot.add_argument("--metric", action="append", default=None,
                      help="score column to plot against (repeatable; default: all)")
    return parser


def _load_config_file(path: Optional[Path]) -> dict:
    if path is None:
        return {}
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise MotcomError(f"cannot read config file {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise MotcomError(f"config file {path} must hold a JSON object")
    return data


def _pick(flag_value, file_value, default):
    if flag_value is not None:
        return flag_value
    if file_value is not None:
        return file_value
    return default


def _parse_weights(raw) -> Weights:
    if isinstance(raw, (list, tuple)):
        parts = [float(v) for v in raw]
    else:
        parts = [float(v) for v in str(raw).split(",")]
    if len(parts) != 3:
        raise MotcomError(f"--weights needs exactly 3 values, got {len(parts)}")
    return Weights(*parts)


def _parse_classes(raw) -> frozenset[int]:
    if isinstance(raw, (list, tuple)):
        return frozenset(int(v) for v in raw)
    return frozenset(int(v) for v in str(raw).split(","))


def _run_config_from_args(args: argparse.Namespace) -> RunConfig:
    file_cfg = _load_config_file(args.config)
    data = _pick(args.data, file_cfg.get("data"), None)
    if not data:
        raise MotcomError("at least one dataset root is required (--data)")
    model = _pick(args.model, file_cfg.get("model"), os.environ.get("MOTCOM_MODEL"))
    backend = _pick(args.backend, file_cfg.get("backend"), "onnx" if model else "test")
    weights_raw = _pick(args.weights, file_cfg.get("weights"), None)
    classes_raw = _pick(args.classes, file_cfg.get("classes"), None)
    no_vcom = _pick(args.no_vcom, file_cfg.get("no_vcom"), False)
    threads = int(_pick(args.threads, file_cfg.get("threads"), 1))
    if threads < 1:
        raise MotcomError(f"--threads must be >= 1, got {threads}")

    target_filter = TargetFilter()
    if classes_raw is not None:
        target_filter = TargetFilter(included_class_ids=_parse_classes(classes_raw))

    return RunConfig(
        data_roots=[Path(d) for d in data],
        include=list(_pick(args.include, file_cfg.get("include"), ["*"])),
        exclude=list(_pick(args.exclude, file_cfg.get("exclude"), [])),
        target_filter=target_filter,
        motion=MotionConfig(
            beta=int(_pick(args.beta, file_cfg.get("beta"), 1)),
            alpha_set=DEFAULT_ALPHA_SET,
        ),
        visual=VisualConfig(ratio_set=DEFAULT_RATIO_SET),
        weights=_parse_weights(weights_raw) if weights_raw is not None else Weights(),
        mean_kind=str(_pick(args.mean, file_cfg.get("mean"), MeanKind.ARITHMETIC.value)),
        occlusion_mode=str(
            _pick(args.occlusion, file_cfg.get("occlusion"), OcclusionMode.PREFER_ANNOTATED.value)
        ),
        backend_name=str(backend),
        model_path=Path(model) if model else None,
        vcom_enabled=not bool(no_vcom),
        out_dir=Path(_pick(args.out, file_cfg.get("out"), "motcom_out")),
        threads=threads,
        use_cache=bool(_pick(args.cache, file_cfg.get("cache"), False)),
    )


def main(argv: Sequence[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "compute":
            cfg = _run_config_from_args(args)
            reports = cmd_compute(cfg)
            failures = [r for r in reports if r.error is not None]
            for r in reports:
                if r.error is None:
                    print(f"{r.name}: motcom={r.score.motcom:.4f}")
                else:
                    print(f"{r.name}: FAILED ({r.error})", file=sys.stderr)
            print(f"wrote {cfg.out_dir}/summary.csv and {cfg.out_dir}/report.json")
            return 1 if failures else 0
        if args.command == "rank":
            columns = args.columns.split(",") if args.columns else None
            cmd_rank(args.reports, args.scores, columns, args.metric, args.out)
            return 0
        if args.command == "plot":
            written = cmd_plot(args.reports, args.scores, args.out, args.metric)
            print(f"wrote {len(written)} SVG files to {args.out}")
            return 0
    except MotcomError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    raise AssertionError(f"unhandled command {args.command!r}")


if __name__ == "__main__":
    sys.exit(main())
