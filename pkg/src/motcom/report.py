"""Batch orchestration over datasets and report emission.

``cmd_compute`` walks dataset roots, scores every sequence, and writes a
versioned ``report.json`` (full intermediates for explainability) plus a
flat ``summary.csv``.  ``cmd_rank`` compares the summary's metric columns
against tracker scores with footrule distances and a rank-correlation
matrix; ``cmd_plot`` renders scatter plots for each metric/score pair.

Sequences are computed in parallel with a bounded worker pool; results are
merged in name order so output files do not depend on scheduling.  Failures
are isolated per sequence and listed in the report instead of aborting the
run.
"""

from __future__ import annotations

import csv
import fnmatch
import json
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional, Sequence

from .combine import MeanKind, MotcomScore, Weights, combine
from .embed import EmbeddingBackend, onnx_backend, test_backend
from .errors import ValidationError
from .ingest import TargetFilter, load_sequence
from .motion import MotionConfig, MotionReport, compute_mcom
from .occlusion import OcclusionMode, OcclusionReport, compute_ocom
from .ranking import (
    ASCENDING_IS_SIMPLE,
    RankComparison,
    ScoredSequences,
    compare_rankings,
    load_tracker_scores,
    rank,
    spearman_rho,
)
from .svgplot import scatter_svg
from .visual import VisualConfig, VisualReport, compute_vcom

SCHEMA_VERSION = 1
SUMMARY_COLUMNS = ("name", "tracks", "density", "ocom", "mcom", "vcom", "motcom")


@dataclass
class RunConfig:
    """Everything a batch run needs; mirrors the CLI flags one-to-one."""

    data_roots: list[Path]
    include: list[str] = field(default_factory=lambda: ["*"])
    exclude: list[str] = field(default_factory=list)
    target_filter: TargetFilter = TargetFilter()
    motion: MotionConfig = MotionConfig()
    visual: VisualConfig = VisualConfig()
    weights: Weights = Weights()
    mean_kind: str = MeanKind.ARITHMETIC.value
    occlusion_mode: str = OcclusionMode.PREFER_ANNOTATED.value
    backend_name: str = "test"
    model_path: Optional[Path] = None
    vcom_enabled: bool = True
    out_dir: Path = Path("motcom_out")
    threads: int = 1
    use_cache: bool = False

    def make_backend(self) -> EmbeddingBackend:
        if self.backend_name == "test":
            return test_backend()
        if self.backend_name == "onnx":
            if self.model_path is None:
                raise ValidationError("the onnx backend requires a model path")
            return onnx_backend(self.model_path)
        raise ValidationError(f"unknown backend {self.backend_name!r}")


@dataclass
class SequenceReport:
    """Scores and intermediates for one sequence, or the failure that stopped it."""

    name: str
    frame_count: int = 0
    track_count: int = 0
    density: float = 0.0
    occlusion: Optional[OcclusionReport] = None
    motion: Optional[MotionReport] = None
    visual: Optional[VisualReport] = None
    score: Optional[MotcomScore] = None
    timings: dict[str, float] = field(default_factory=dict)
    error: Optional[str] = None


def discover_sequences(cfg: RunConfig) -> list[Path]:
    """Sequence directories (containing gt/gt.txt) under the dataset roots.

    Raises:
        ValidationError: no sequence matches the include/exclude globs.
    """
    found: dict[str, Path] = {}
    for root in cfg.data_roots:
        root = Path(root)
        if (root / "gt" / "gt.txt").exists():
            candidates = [root]
        else:
            candidates = sorted(p for p in root.iterdir() if p.is_dir()) if root.is_dir() else []
        for seq_dir in candidates:
            if not (seq_dir / "gt" / "gt.txt").exists():
                continue
            name = seq_dir.name
            if not any(fnmatch.fnmatch(name, pat) for pat in cfg.include):
                continue
            if any(fnmatch.fnmatch(name, pat) for pat in cfg.exclude):
                continue
            found[name] = seq_dir
    if not found:
        raise ValidationError(
            f"no sequences found under {[str(r) for r in cfg.data_roots]}"
        )
    return [found[name] for name in sorted(found)]


def compute_sequence_report(
    seq_dir: Path, cfg: RunConfig, backend: EmbeddingBackend
) -> SequenceReport:
    """Score a single sequence; exceptions surface to the caller."""
    timings: dict[str, float] = {}
    start = time.perf_counter()
    seq = load_sequence(seq_dir, cfg.target_filter)
    tracks = seq.target_tracks(cfg.target_filter)
    total_states = sum(len(states) for states in tracks.values())
    density = total_states / len(seq.frames) if seq.frames else 0.0
    timings["load_s"] = time.perf_counter() - start

    start = time.perf_counter()
    occ = compute_ocom(seq, cfg.target_filter, cfg.occlusion_mode)
    timings["ocom_s"] = time.perf_counter() - start

    start = time.perf_counter()
    mot = compute_mcom(seq, cfg.target_filter, cfg.motion)
    timings["mcom_s"] = time.perf_counter() - start

    vis: Optional[VisualReport] = None
    if cfg.vcom_enabled:
        start = time.perf_counter()
        visual_cfg = cfg.visual
        if cfg.use_cache and visual_cfg.cache_path is None:
            cache_path = Path(cfg.out_dir) / "cache" / f"{seq.name}.npz"
            visual_cfg = VisualConfig(
                ratio_set=visual_cfg.ratio_set, blur=visual_cfg.blur, cache_path=cache_path
            )
        vis = compute_vcom(seq, cfg.target_filter, visual_cfg, backend)
        timings["vcom_s"] = time.perf_counter() - start

    score = combine(
        occ.ocom, mot.mcom, vis.vcom if vis is not None else None, cfg.weights, cfg.mean_kind
    )
    return SequenceReport(
        name=seq.name,
        frame_count=len(seq.frames),
        track_count=len(tracks),
        density=density,
        occlusion=occ,
        motion=mot,
        visual=vis,
        score=score,
        timings=timings,
    )


def cmd_compute(cfg: RunConfig) -> list[SequenceReport]:
    """Score every sequence and write report.json plus summary.csv.

    Per-sequence failures do not abort the run; they come back as reports
    with ``error`` set and are listed under ``failures`` in report.json.
    """
    seq_dirs = discover_sequences(cfg)
    backend = cfg.make_backend() if cfg.vcom_enabled else test_backend()

    def worker(seq_dir: Path) -> SequenceReport:
        try:
            return compute_sequence_report(seq_dir, cfg, backend)
        except Exception as exc:  # isolate sequence failures
            return SequenceReport(name=seq_dir.name, error=f"{type(exc).__name__}: {exc}")

    if cfg.threads > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            reports = list(pool.map(worker, seq_dirs))
    else:
        reports = [worker(d) for d in seq_dirs]
    reports.sort(key=lambda r: r.name)

    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    _write_summary_csv(out_dir / "summary.csv", reports)
    _write_report_json(out_dir / "report.json", cfg, backend, reports)
    return reports


def _csv_cell(value: Optional[float]) -> str:
    return "" if value is None else repr(value)


def _write_summary_csv(path: Path, reports: Sequence[SequenceReport]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SUMMARY_COLUMNS)
        for r in reports:
            if r.error is not None:
                writer.writerow([r.name, "", "", "", "", "", ""])
                continue
            writer.writerow(
                [
                    r.name,
                    r.track_count,
                    _csv_cell(r.density),
                    _csv_cell(r.occlusion.ocom if r.occlusion else None),
                    _csv_cell(r.motion.mcom if r.motion else None),
                    _csv_cell(r.visual.vcom if r.visual else None),
                    _csv_cell(r.score.motcom if r.score else None),
                ]
            )


def _occlusion_json(occ: OcclusionReport) -> dict:
    per_state: dict[str, dict[str, float]] = {}
    for (frame, track_id), value in sorted(occ.per_state_occlusion.items()):
        per_state.setdefault(str(frame), {})[str(track_id)] = value
    return {
        "value": occ.ocom,
        "source": occ.source,
        "per_object_mean": {str(k): v for k, v in sorted(occ.per_object_mean.items())},
        "per_state_occlusion": per_state,
    }


def _motion_json(mot: MotionReport) -> dict:
    return {
        "value": mot.mcom,
        "mean_relative_error": mot.mean_relative_error,
        "evaluated_term_count": mot.evaluated_term_count,
        "state_count": mot.state_count,
        "mean_relative_error_literal": mot.mean_relative_error_literal,
        "per_track_terms": {
            str(k): [list(term) for term in terms]
            for k, terms in sorted(mot.per_track_terms.items())
        },
    }


def _visual_json(vis: VisualReport) -> dict:
    return {
        "value": vis.vcom,
        "per_frame_mean_fdr": {str(k): v for k, v in sorted(vis.per_frame_mean_fdr.items())},
        "skipped_targets": vis.skipped_targets,
    }


def _report_json_payload(
    cfg: RunConfig, backend: EmbeddingBackend, reports: Sequence[SequenceReport]
) -> dict:
    sequences = []
    failures = []
    for r in reports:
        if r.error is not None:
            failures.append({"name": r.name, "error": r.error})
            continue
        sequences.append(
            {
                "name": r.name,
                "frame_count": r.frame_count,
                "track_count": r.track_count,
                "density": r.density,
                "ocom": _occlusion_json(r.occlusion) if r.occlusion else None,
                "mcom": _motion_json(r.motion) if r.motion else None,
                "vcom": _visual_json(r.visual) if r.visual else None,
                "motcom": {
                    "value": r.score.motcom,
                    "mean_kind": r.score.mean_kind,
                    "partial": r.score.partial,
                }
                if r.score
                else None,
                "timings": r.timings,
            }
        )
    return {
        "schema_version": SCHEMA_VERSION,
        "config": {
            "weights": {
                "ocom": cfg.weights.w_ocom,
                "mcom": cfg.weights.w_mcom,
                "vcom": cfg.weights.w_vcom,
            },
            "mean_kind": cfg.mean_kind,
            "occlusion_mode": str(
                cfg.occlusion_mode.value
                if isinstance(cfg.occlusion_mode, OcclusionMode)
                else cfg.occlusion_mode
            ),
            "beta": cfg.motion.beta,
            "alpha_count": len(cfg.motion.alpha_set),
            "ratio_count": len(cfg.visual.ratio_set),
            "blur_kernel_size": cfg.visual.blur.kernel_size,
            "blur_sigma": cfg.visual.blur.sigma,
            "backend": backend.name if cfg.vcom_enabled else None,
            "vcom_enabled": cfg.vcom_enabled,
            "included_classes": sorted(cfg.target_filter.included_class_ids),
        },
        "sequences": sequences,
        "failures": failures,
    }


def _write_report_json(
    path: Path, cfg: RunConfig, backend: EmbeddingBackend, reports: Sequence[SequenceReport]
) -> None:
    payload = _report_json_payload(cfg, backend, reports)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def load_summary_metrics(path: Path | str) -> dict[str, ScoredSequences]:
    """Read summary.csv back into per-metric ranking inputs (ascending = simple).

    Columns with missing values are dropped with a warning so partial runs
    (e.g. skipped visual scores) still rank on what they have.
    """
    path = Path(path)
    with open(path, "r", encoding="utf-8-sig", newline="") as fh:
        reader = csv.DictReader(fh)
        rows = [row for row in reader if row.get("name")]
    # rows of failed sequences carry a name and nothing else; drop them
    rows = [
        row for row in rows
        if any((row.get(c) or "").strip() for c in SUMMARY_COLUMNS[1:])
    ]
    if not rows:
        raise ValidationError(f"{path}: no sequence rows")
    metrics: dict[str, ScoredSequences] = {}
    for column in SUMMARY_COLUMNS[1:]:
        values = []
        complete = True
        for row in rows:
            cell = (row.get(column) or "").strip()
            if not cell:
                complete = False
                break
            values.append((row["name"], float(cell)))
        if not complete:
            warnings.warn(f"{path}: column {column!r} has missing values, skipped")
            continue
        metrics[column] = ScoredSequences(tuple(values), ASCENDING_IS_SIMPLE)
    return metrics


def _score_columns(path: Path) -> list[str]:
    with open(path, "r", encoding="utf-8-sig", newline="") as fh:
        header = next(csv.reader(fh))
    return [c.strip().lower() for c in header if c.strip().lower() not in ("sequence", "tracker")]


def cmd_rank(
    reports_csv: Path | str,
    scores_csv: Path | str,
    metric_columns: Sequence[str] | None = None,
    score_column: str = "hota",
    out_dir: Path | str | None = None,
) -> dict[str, RankComparison]:
    """Compare complexity metric rankings against a tracker-score ranking.

    Writes rank_table.csv (per metric: n, total FD, mean FD, NFD) and
    correlation_matrix.csv (rank correlation between every metric column and
    every score column), and prints the table in "mean (NFD)" convention.

    Raises:
        ValidationError: no overlapping sequence names between the files.
    """
    reports_csv = Path(reports_csv)
    scores_csv = Path(scores_csv)
    out_dir = Path(out_dir) if out_dir is not None else reports_csv.parent
    out_dir.mkdir(parents=True, exist_ok=True)

    metrics = load_summary_metrics(reports_csv)
    if metric_columns:
        unknown = [c for c in metric_columns if c not in metrics]
        if unknown:
            raise ValidationError(f"metric columns not in {reports_csv}: {unknown}")
        metrics = {c: metrics[c] for c in metric_columns}
    reference = load_tracker_scores(scores_csv, score_column)

    metric_names = {n for scored in metrics.values() for n, _ in scored.entries}
    shared = metric_names & {n for n, _ in reference.entries}
    if len(shared) < 2:
        raise ValidationError(
            f"need at least 2 overlapping sequences, got {sorted(shared)}"
        )

    comparisons: dict[str, RankComparison] = {}
    lines = [f"{'metric':<12} {'n':>3} {'FD':>5} {'mean FD (NFD)':>16}"]
    for name, scored in metrics.items():
        comparison = compare_rankings(scored.restricted_to(shared), reference)
        comparisons[name] = comparison
        lines.append(
            f"{name:<12} {comparison.n:>3} {comparison.fd:>5} "
            f"{comparison.mean_fd:>10.2f} ({comparison.nfd:.2f})"
        )
    print("\n".join(lines))

    with open(out_dir / "rank_table.csv", "w", encoding="utf-8", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["metric", "n", "fd", "mean_fd", "nfd"])
        for name, comparison in comparisons.items():
            writer.writerow(
                [name, comparison.n, comparison.fd, repr(comparison.mean_fd), repr(comparison.nfd)]
            )

    _write_correlation_matrix(out_dir / "correlation_matrix.csv", metrics, scores_csv, shared)
    return comparisons


def _write_correlation_matrix(
    path: Path,
    metrics: Mapping[str, ScoredSequences],
    scores_csv: Path,
    shared: set[str],
) -> None:
    columns: dict[str, dict[str, float]] = {}
    for name, scored in metrics.items():
        columns[name] = dict(scored.restricted_to(shared).entries)
    for column in _score_columns(scores_csv):
        scored = load_tracker_scores(scores_csv, column)
        columns[column] = dict(scored.restricted_to(shared).entries)

    names = sorted(shared)
    order = list(columns)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([""] + order)
        for row_key in order:
            row: list[str] = [row_key]
            for col_key in order:
                xs = [columns[row_key][n] for n in names]
                ys = [columns[col_key][n] for n in names]
                try:
                    row.append(repr(spearman_rho(xs, ys)))
                except ValidationError:
                    row.append("")
            writer.writerow(row)


def cmd_plot(
    reports_csv: Path | str,
    scores_csv: Path | str,
    out_dir: Path | str,
    score_columns: Sequence[str] | None = None,
) -> list[Path]:
    """Write scatter SVGs for every (metric, score) pair.

    Each pair produces a value-vs-value plot and a rank-vs-rank variant.
    Metric columns with missing values are skipped with a warning.
    """
    reports_csv = Path(reports_csv)
    scores_csv = Path(scores_csv)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    metrics = load_summary_metrics(reports_csv)
    wanted_scores = list(score_columns) if score_columns else _score_columns(scores_csv)

    written: list[Path] = []
    for score_name in wanted_scores:
        reference = load_tracker_scores(scores_csv, score_name)
        ref_values = dict(reference.entries)
        for metric_name, scored in metrics.items():
            shared = sorted({n for n, _ in scored.entries} & set(ref_values))
            if len(shared) < 2:
                warnings.warn(
                    f"skipping plot {metric_name} vs {score_name}: "
                    f"{len(shared)} overlapping sequences"
                )
                continue
            metric_values = dict(scored.entries)
            points = [(metric_values[n], ref_values[n]) for n in shared]
            svg = scatter_svg(
                points,
                xlabel=metric_name,
                ylabel=score_name,
                title=f"{metric_name} vs {score_name}",
                labels=shared,
            )
            value_path = out_dir / f"{metric_name}_vs_{score_name}.svg"
            value_path.write_text(svg, encoding="utf-8")
            written.append(value_path)

            metric_ranks = rank(scored.restricted_to(set(shared)))
            ref_ranks = rank(reference.restricted_to(set(shared)))
            rank_points = [
                (float(metric_ranks[n]), float(ref_ranks[n])) for n in shared
            ]
            rank_svg = scatter_svg(
                rank_points,
                xlabel=f"{metric_name} rank (simple to complex)",
                ylabel=f"{score_name} rank (simple to complex)",
                title=f"{metric_name} vs {score_name} (ranks)",
                labels=shared,
            )
            rank_path = out_dir / f"{metric_name}_vs_{score_name}_ranks.svg"
            rank_path.write_text(rank_svg, encoding="utf-8")
            written.append(rank_path)
    return written
