"""Confusion matrices against true labels, and the accuracy/error metric.

Accuracy is the fraction of counted records whose cluster's dominant class
matches their own: ``sum_i max_j counts[i][j] / total``. The per-cluster
maximum is taken independently, so two clusters may share a dominant
class. Error is ``1 - accuracy``. The denominator is the records counted
in the matrix; outlier records are excluded unless explicitly included,
and the report carries coverage so both views stay recoverable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import BadInputError, MetricUndefinedError
from .groupmodel import OUTLIER_TOKEN


@dataclass(frozen=True)
class ConfusionMatrix:
    """Cluster-by-class counts. Row order: ascending cluster ids, with an
    optional OUTLIER row last; column order: ascending class tokens."""

    counts: tuple[tuple[int, ...], ...]
    cluster_ids: tuple[int | str, ...]
    class_tokens: tuple[str, ...]
    n_records: int

    @property
    def total(self) -> int:
        return sum(sum(row) for row in self.counts)


@dataclass(frozen=True)
class EvalReport:
    accuracy: float
    error: float
    covered: int
    total_records: int

    @property
    def coverage(self) -> float:
        return self.covered / self.total_records if self.total_records else 0.0


def confusion(labels: Sequence[int | None], truth: Sequence[str],
              include_outliers: bool = False) -> ConfusionMatrix:
    """Count records per (cluster, class) pair.

    ``labels`` holds a cluster id per record, with ``None`` marking an
    outlier. Outliers are dropped unless ``include_outliers`` is set, in
    which case they form a dedicated OUTLIER row after the cluster rows.
    """
    if len(labels) != len(truth):
        raise BadInputError(f"{len(labels)} labels vs {len(truth)} truth values")
    class_tokens = tuple(sorted(set(truth)))
    class_index = {token: j for j, token in enumerate(class_tokens)}
    cluster_ids: list[int | str] = sorted({c for c in labels if c is not None})
    has_outliers = include_outliers and any(c is None for c in labels)
    if has_outliers:
        cluster_ids.append(OUTLIER_TOKEN)
    row_index = {c: i for i, c in enumerate(cluster_ids)}
    counts = [[0] * len(class_tokens) for _ in cluster_ids]
    for cluster, token in zip(labels, truth):
        if cluster is None:
            if not has_outliers:
                continue
            cluster = OUTLIER_TOKEN
        counts[row_index[cluster]][class_index[token]] += 1
    return ConfusionMatrix(
        counts=tuple(tuple(row) for row in counts),
        cluster_ids=tuple(cluster_ids),
        class_tokens=class_tokens,
        n_records=len(labels),
    )


def accuracy_error(matrix: ConfusionMatrix) -> EvalReport:
    """Accuracy and error of a confusion matrix over its counted records."""
    total = matrix.total
    if total == 0:
        raise MetricUndefinedError("accuracy is undefined on an empty confusion matrix")
    dominant = sum(max(row) for row in matrix.counts)
    accuracy = dominant / total
    return EvalReport(
        accuracy=accuracy,
        error=1.0 - accuracy,
        covered=total,
        total_records=matrix.n_records,
    )


def report_lines(matrix: ConfusionMatrix, report: EvalReport) -> list[str]:
    """Tab-separated text form: class header, count rows, then the metrics."""
    lines = ["cluster\t" + "\t".join(matrix.class_tokens)]
    for cluster, row in zip(matrix.cluster_ids, matrix.counts):
        lines.append(f"{cluster}\t" + "\t".join(str(v) for v in row))
    lines.append(f"error\t{report.error:.3f}")
    lines.append(f"accuracy\t{report.accuracy:.3f}")
    lines.append(f"coverage\t{report.covered}/{report.total_records}")
    return lines


def report_record(matrix: ConfusionMatrix, report: EvalReport) -> dict:
    """Machine-readable form with full-precision metric values."""
    return {
        "clusters": list(matrix.cluster_ids),
        "classes": list(matrix.class_tokens),
        "counts": [list(row) for row in matrix.counts],
        "accuracy": report.accuracy,
        "error": report.error,
        "coverage": {"covered": report.covered, "total": report.total_records},
    }
