"""Accuracy and support-weighted precision/recall/F1 over combined labels.

Per-class precision and recall come from the 4x4 confusion matrix (rows gold,
columns predicted); weighted averages use gold-class supports as weights, so
weighted recall always equals accuracy for single-label evaluation. Zero
denominators yield 0 and are tallied in the report's warning counters.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from typing import TextIO

from .dataset import Dataset, SamplingSpec, subsample
from .errors import EmptyInput, EmptyMatrix, LengthMismatch
from .inference import Scorer, classify
from .prompts import PromptTemplate, Verbalizer
from .rules import LABELS, NUM_CLASSES, CombinedLabel

GRID_CSV_HEADER = ["cell", "accuracy", "precision_w", "recall_w", "f1_w"]


@dataclass
class ConfusionMatrix:
    counts: list[list[int]] = field(
        default_factory=lambda: [[0] * NUM_CLASSES for _ in range(NUM_CLASSES)]
    )

    def add(self, gold: int, pred: int) -> None:
        self.counts[gold][pred] += 1

    def total(self) -> int:
        return sum(sum(row) for row in self.counts)

    def merge(self, other: "ConfusionMatrix") -> None:
        for g in LABELS:
            for p in LABELS:
                self.counts[g][p] += other.counts[g][p]


@dataclass(frozen=True)
class ClassReport:
    precision: float
    recall: float
    f1: float
    support: int


@dataclass(frozen=True)
class EvalReport:
    accuracy: float
    precision_w: float
    recall_w: float
    f1_w: float
    per_class: tuple[ClassReport, ...]
    n: int
    warnings: dict[str, int]

    def as_dict(self, digits: int = 4) -> dict:
        return {
            "accuracy": round(self.accuracy, digits),
            "precision_w": round(self.precision_w, digits),
            "recall_w": round(self.recall_w, digits),
            "f1_w": round(self.f1_w, digits),
            "per_class": [
                {
                    "precision": round(c.precision, digits),
                    "recall": round(c.recall, digits),
                    "f1": round(c.f1, digits),
                    "support": c.support,
                }
                for c in self.per_class
            ],
            "n": self.n,
            "warnings": dict(self.warnings),
        }

    def to_json(self, digits: int = 4) -> str:
        return json.dumps(self.as_dict(digits))


def _as_int_label(label: CombinedLabel | int) -> int:
    return label.value if isinstance(label, CombinedLabel) else int(label)


def confusion(
    golds: list[CombinedLabel | int], preds: list[CombinedLabel | int]
) -> ConfusionMatrix:
    if len(golds) != len(preds):
        raise LengthMismatch(f"{len(golds)} gold labels vs {len(preds)} predictions")
    if not golds:
        raise EmptyInput("cannot build a confusion matrix from zero samples")
    cm = ConfusionMatrix()
    for gold, pred in zip(golds, preds):
        cm.add(_as_int_label(gold), _as_int_label(pred))
    return cm


def weighted_metrics(cm: ConfusionMatrix) -> EvalReport:
    total = cm.total()
    if total == 0:
        raise EmptyMatrix("confusion matrix holds no samples")
    warnings = {"zero_division_precision": 0, "zero_division_recall": 0, "zero_division_f1": 0}
    per_class = []
    accuracy = sum(cm.counts[c][c] for c in LABELS) / total
    precision_w = f1_w = 0.0
    true_positive_total = 0
    for c in LABELS:
        tp = cm.counts[c][c]
        fp = sum(cm.counts[g][c] for g in LABELS) - tp
        fn = sum(cm.counts[c][p] for p in LABELS) - tp
        support = tp + fn
        if tp + fp > 0:
            precision = tp / (tp + fp)
        else:
            precision = 0.0
            warnings["zero_division_precision"] += 1
        if support > 0:
            recall = tp / support
        else:
            recall = 0.0
            warnings["zero_division_recall"] += 1
        if precision + recall > 0:
            f1 = 2 * precision * recall / (precision + recall)
        else:
            f1 = 0.0
            warnings["zero_division_f1"] += 1
        per_class.append(ClassReport(precision=precision, recall=recall, f1=f1, support=support))
        weight = support / total
        precision_w += precision * weight
        f1_w += f1 * weight
        true_positive_total += tp
    # recall_i * weight_i cancels to TP_i / total, so the gold-support-weighted
    # recall is exactly the trace ratio; computing it that way keeps the
    # recall_w == accuracy identity exact in floating point
    recall_w = true_positive_total / total
    return EvalReport(
        accuracy=accuracy,
        precision_w=precision_w,
        recall_w=recall_w,
        f1_w=f1_w,
        per_class=tuple(per_class),
        n=total,
        warnings=warnings,
    )


def evaluate_predictions(
    golds: list[CombinedLabel | int], preds: list[CombinedLabel | int]
) -> EvalReport:
    return weighted_metrics(confusion(golds, preds))


def evaluate_run(
    scorer: Scorer,
    template: PromptTemplate,
    verbalizer: Verbalizer,
    ds: Dataset,
    aggregate: str = "max",
) -> tuple[EvalReport, dict[str, EvalReport]]:
    """Classify every sample; returns the overall report plus one per project."""
    if not len(ds):
        raise EmptyInput("cannot evaluate an empty dataset")
    golds: list[int] = []
    preds: list[int] = []
    by_project: dict[str, tuple[list[int], list[int]]] = {}
    for sample in ds.samples:
        prediction = classify(scorer, template, verbalizer, sample.code, aggregate=aggregate)
        golds.append(sample.label)
        preds.append(prediction.label.value)
        bucket = by_project.setdefault(sample.project, ([], []))
        bucket[0].append(sample.label)
        bucket[1].append(prediction.label.value)
    report = evaluate_predictions(golds, preds)
    project_reports = {
        project: evaluate_predictions(g, p) for project, (g, p) in sorted(by_project.items())
    }
    return report, project_reports


def run_grid(
    scorer: Scorer,
    templates: dict[str, PromptTemplate],
    verbalizers: dict[str, Verbalizer],
    ds: Dataset,
) -> dict[str, EvalReport]:
    """One report per template x verbalizer cell (P1-V1 ... P3-V2 layout)."""
    grid: dict[str, EvalReport] = {}
    for t_name, template in templates.items():
        for v_name, verbalizer in verbalizers.items():
            report, _ = evaluate_run(scorer, template, verbalizer, ds)
            grid[f"{t_name}-{v_name}"] = report
    return grid


def write_grid_csv(grid: dict[str, EvalReport], out: TextIO, digits: int = 4) -> None:
    writer = csv.writer(out)
    writer.writerow(GRID_CSV_HEADER)
    for cell, report in grid.items():
        writer.writerow([
            cell,
            f"{report.accuracy:.{digits}f}",
            f"{report.precision_w:.{digits}f}",
            f"{report.recall_w:.{digits}f}",
            f"{report.f1_w:.{digits}f}",
        ])


def run_small_sample(
    scorer: Scorer,
    spec: SamplingSpec,
    train: Dataset,
    test: Dataset,
    template: PromptTemplate,
    verbalizer: Verbalizer,
    template_spec: str | None = None,
) -> dict[int, EvalReport]:
    """Evaluate on a fixed test set after training on subsets of each size.

    Size 0 is the zero-shot scenario and never issues a training call. Scorers
    without a ``fit`` method (oracle, hash) are evaluated as-is for every size.
    """
    subsets = subsample(train, spec)
    results: dict[int, EvalReport] = {}
    for size in spec.sizes:
        subset = subsets[size]
        if size > 0 and hasattr(scorer, "fit"):
            _fit_scorer(scorer, subset, verbalizer, template_spec)
        report, _ = evaluate_run(scorer, template, verbalizer, test)
        results[size] = report
    return results


def _fit_scorer(scorer, subset: Dataset, verbalizer: Verbalizer, template_spec: str | None):
    from .inference import RemoteScorer

    if isinstance(scorer, RemoteScorer):
        mapping = {str(label): list(words) for label, words in verbalizer.classes}
        scorer.fit(subset, template_spec or "", mapping)
    else:
        scorer.fit(subset)
