"""Scoring, the with/without-selection comparison report, and plot data."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import ConfigError, EmptyInput, FingerprintMismatch, LengthMismatch
from .ga import EvolutionTrace
from .selector import SelectionResult


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    @property
    def accuracy(self) -> float:
        return (self.tp + self.tn) / self.total


def score(
    predictions: Sequence[int], labels: Sequence[int]
) -> tuple[float, ConfusionMatrix]:
    """Accuracy plus exact confusion counts."""
    predictions = np.asarray(predictions, dtype=np.int64)
    labels = np.asarray(labels, dtype=np.int64)
    if predictions.shape != labels.shape:
        raise LengthMismatch("predictions and labels differ in length")
    if predictions.size == 0:
        raise EmptyInput("nothing to score")
    matrix = ConfusionMatrix(
        tp=int(np.sum((predictions == 1) & (labels == 1))),
        fp=int(np.sum((predictions == 1) & (labels == 0))),
        tn=int(np.sum((predictions == 0) & (labels == 0))),
        fn=int(np.sum((predictions == 0) & (labels == 1))),
    )
    return matrix.accuracy, matrix


@dataclass(frozen=True)
class BaselineRun:
    """Full-feature classifier scored on the same reporting split."""

    accuracy: float
    confusion: ConfusionMatrix
    feature_count: int
    cost: float
    dataset_fingerprint: str
    report_seed: int


@dataclass(frozen=True)
class ReportRow:
    condition: str
    original_feature_count: int
    selected_count: int
    accuracy: float
    cost: float


@dataclass(frozen=True)
class ComparisonReport:
    rows: tuple[ReportRow, ReportRow]
    dataset_fingerprint: str


def build_report(
    baseline: BaselineRun, selected: SelectionResult
) -> ComparisonReport:
    """Two-row comparison: without selection vs with selection."""
    if baseline.dataset_fingerprint != selected.provenance.dataset_fingerprint:
        raise FingerprintMismatch(
            "baseline and selection were computed on different datasets"
        )
    report_plan = selected.provenance.fitness.resolved_report_plan()
    if baseline.report_seed != report_plan.seed:
        raise FingerprintMismatch(
            "baseline and selection used different reporting splits"
        )
    n_original = baseline.feature_count
    rows = (
        ReportRow("without selection", n_original, n_original,
                  baseline.accuracy, baseline.cost),
        ReportRow("with selection", n_original, sum(selected.best_mask),
                  selected.accuracy, selected.cost),
    )
    return ComparisonReport(rows, baseline.dataset_fingerprint)


def format_report(report: ComparisonReport) -> str:
    """Human-readable table; accuracies as percentages with one decimal."""
    lines = [
        f"{'condition':<20} {'features':>8} {'selected':>8} "
        f"{'accuracy':>9} {'cost':>8}",
    ]
    for row in report.rows:
        lines.append(
            f"{row.condition:<20} {row.original_feature_count:>8} "
            f"{row.selected_count:>8} {100 * row.accuracy:>8.1f}% "
            f"{row.cost:>8.2f}"
        )
    return "\n".join(lines)


def emit_plot_data(
    report: ComparisonReport, trace: EvolutionTrace, out_dir: str | Path
) -> tuple[Path, Path]:
    """Write the cost-comparison series and the per-generation fitness series.

    Both files are deterministic for identical inputs.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    cost_path = out_dir / "cost_series.csv"
    with open(cost_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["series", "label", "value"])
        writer.writerow(["cost", "full", repr(report.rows[0].cost)])
        writer.writerow(["cost", "selected", repr(report.rows[1].cost)])
    trace_path = out_dir / "fitness_trace.csv"
    with open(trace_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["generation", "best_fitness", "mean_fitness"])
        for row in trace:
            writer.writerow(
                [row.generation, repr(row.best_fitness), repr(row.mean_fitness)]
            )
    return cost_path, trace_path


# --- files -------------------------------------------------------------------


def baseline_to_dict(baseline: BaselineRun) -> dict:
    return {
        "accuracy": baseline.accuracy,
        "confusion": {
            "tp": baseline.confusion.tp,
            "fp": baseline.confusion.fp,
            "tn": baseline.confusion.tn,
            "fn": baseline.confusion.fn,
        },
        "feature_count": baseline.feature_count,
        "cost": baseline.cost,
        "dataset_fingerprint": baseline.dataset_fingerprint,
        "report_seed": baseline.report_seed,
    }


def baseline_from_dict(d: dict) -> BaselineRun:
    return BaselineRun(
        accuracy=d["accuracy"],
        confusion=ConfusionMatrix(**d["confusion"]),
        feature_count=d["feature_count"],
        cost=d["cost"],
        dataset_fingerprint=d["dataset_fingerprint"],
        report_seed=d["report_seed"],
    )


def save_baseline(baseline: BaselineRun, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(baseline_to_dict(baseline), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_baseline(path: str | Path) -> BaselineRun:
    with open(path, encoding="utf-8") as fh:
        try:
            payload = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: not valid JSON: {exc}") from exc
    try:
        return baseline_from_dict(payload)
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"{path}: malformed baseline file: {exc}") from exc


def save_report(report: ComparisonReport, path: str | Path) -> None:
    payload = {
        "dataset_fingerprint": report.dataset_fingerprint,
        "rows": [
            {
                "condition": r.condition,
                "original_feature_count": r.original_feature_count,
                "selected_count": r.selected_count,
                "accuracy": r.accuracy,
                "cost": r.cost,
            }
            for r in report.rows
        ],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
