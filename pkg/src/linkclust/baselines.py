"""Comparison algorithms: batch k-modes and the one-pass squeezer.

Both are deterministic functions of the table's record order and their
single parameter, so a benchmark run never needs repetition. Tokens are
encoded per column in first-appearance order, which makes every stated
tie-break (lowest cluster index, earliest-observed value, earliest-created
cluster) a plain argmin/argmax over the codes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import CategoricalTable
from .errors import BadConfigError, EmptyInputError, ThresholdNotFoundError


@dataclass(frozen=True)
class KModesConfig:
    k: int
    max_iters: int = 100

    def __post_init__(self):
        if self.k < 1:
            raise BadConfigError(f"k must be >= 1, got {self.k}")
        if self.max_iters < 1:
            raise BadConfigError(f"max_iters must be >= 1, got {self.max_iters}")


@dataclass(frozen=True)
class SqueezerConfig:
    threshold: float

    def __post_init__(self):
        if self.threshold < 0:
            raise BadConfigError(f"threshold must be >= 0, got {self.threshold}")


def _encode(table: CategoricalTable) -> np.ndarray:
    """Per-column integer codes assigned in first-appearance order.

    Code 0 of a column is its first-observed token, so the smallest code
    among tied candidates is the one observed earliest in record order.
    """
    codes = np.empty((table.n, table.r), dtype=np.int64)
    for j in range(table.r):
        seen: dict[str, int] = {}
        for i, row in enumerate(table.records):
            codes[i, j] = seen.setdefault(row[j], len(seen))
    return codes


def kmodes(table: CategoricalTable, config: KModesConfig) -> list[int]:
    """Batch k-modes: 1-based cluster labels per record.

    Modes start from the first k distinct records. Each pass reassigns
    every record to the mode with the fewest attribute mismatches (ties:
    lowest cluster index), then recomputes each mode attribute-wise as the
    most frequent value among members (ties: value observed earliest in
    record order; an empty cluster keeps its previous mode). Stops when an
    assignment pass changes nothing or after ``max_iters`` passes.
    """
    if table.n == 0:
        raise EmptyInputError("k-modes needs a nonempty table")
    codes = _encode(table)
    distinct: list[np.ndarray] = []
    seen_rows: set[tuple[int, ...]] = set()
    for i in range(table.n):
        key = tuple(codes[i])
        if key not in seen_rows:
            seen_rows.add(key)
            distinct.append(codes[i])
            if len(distinct) == config.k:
                break
    if len(distinct) < config.k:
        raise BadConfigError(
            f"k={config.k} exceeds the {len(seen_rows)} distinct records")
    modes = np.stack(distinct)

    assignment = None
    for _ in range(config.max_iters):
        distances = (codes[:, None, :] != modes[None, :, :]).sum(axis=2)
        new_assignment = distances.argmin(axis=1)  # first minimum: lowest cluster wins ties
        if assignment is not None and np.array_equal(new_assignment, assignment):
            break
        assignment = new_assignment
        for c in range(config.k):
            members = codes[assignment == c]
            if len(members) == 0:
                continue  # keep the previous mode
            for j in range(table.r):
                counts = np.bincount(members[:, j])
                modes[c, j] = counts.argmax()  # first maximum: earliest-observed value
    return [int(c) + 1 for c in assignment]


def squeezer(table: CategoricalTable, config: SqueezerConfig) -> list[int]:
    """One-pass clustering: 1-based cluster labels per record.

    The first record founds cluster 1. Each later record joins the cluster
    maximizing the summed per-attribute support fraction
    ``sum_j |{u in C : u_j = t_j}| / |C|`` when that maximum clears the
    threshold (ties: earliest-created cluster); otherwise it founds a new
    cluster. The similarity is bounded by the attribute count r.
    """
    if table.n == 0:
        raise EmptyInputError("squeezer needs a nonempty table")
    codes = _encode(table)
    width = int(codes.max()) + 1
    column_index = np.arange(table.r)
    counts: list[np.ndarray] = []  # per cluster: (r, width) value-support counts
    sizes: list[int] = []
    labels: list[int] = []
    for i in range(table.n):
        row = codes[i]
        best_cluster = -1
        best_sim = -1.0
        for c in range(len(counts)):
            sim = counts[c][column_index, row].sum() / sizes[c]
            if sim > best_sim:
                best_cluster, best_sim = c, sim
        if best_cluster >= 0 and best_sim >= config.threshold:
            counts[best_cluster][column_index, row] += 1
            sizes[best_cluster] += 1
            labels.append(best_cluster + 1)
        else:
            matrix = np.zeros((table.r, width), dtype=np.int64)
            matrix[column_index, row] = 1
            counts.append(matrix)
            sizes.append(1)
            labels.append(len(counts))
    return labels


def find_threshold_for_k(table: CategoricalTable, k_target: int) -> float:
    """Smallest grid threshold (multiples of r/20 from 0 to r) giving exactly
    ``k_target`` squeezer clusters.

    The cluster count is not monotone in the threshold, so the grid is
    scanned in ascending order and the first hit wins; no hit raises
    :class:`ThresholdNotFoundError`.
    """
    if k_target < 1:
        raise BadConfigError(f"k_target must be >= 1, got {k_target}")
    for i in range(21):
        threshold = table.r * (i / 20.0)
        labels = squeezer(table, SqueezerConfig(threshold))
        if max(labels) == k_target:
            return threshold
    raise ThresholdNotFoundError(
        f"no grid threshold yields exactly {k_target} clusters")
