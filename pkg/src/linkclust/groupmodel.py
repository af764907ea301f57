"""Generative link-group model: charts, link scoring, and move deltas.

A chart is a binary entity-by-group membership structure; entities may sit
in any number of groups. Each link is explained either as fully random
("innocent") or as generated by one group: every slot of the link draws a
group member uniformly, except that with probability ``p_noise`` the slot
is a uniform draw from all entities instead. A link's score is the best
(log-probability) explanation; the chart's score is the sum over links.

Group branches carry a ``log(1 - p_innocent) - log(K)`` head so that the
innocent and group explanations are comparable probabilities; the ``1/K``
group-pick factor is constant across groups and never changes which group
wins. Impossible events score ``-inf``; sums involving ``-inf`` stay
``-inf`` and never produce NaN.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BadConfigError, BadInputError, InvalidMoveError
from .transform import Link, LinkDataset

NEG_INF = float("-inf")

#: Explanation code for the fully-random branch; groups are 1..K.
INNOCENT = 0

#: Text used for unassigned entities in exports.
OUTLIER_TOKEN = "OUTLIER"


@dataclass(frozen=True)
class LinkModelParams:
    """Probability a link is fully random, and per-slot noise probability."""

    p_innocent: float = 0.1
    p_noise: float = 0.1

    def __post_init__(self):
        if not 0.0 <= self.p_innocent <= 1.0:
            raise BadConfigError(f"p_innocent must be in [0, 1], got {self.p_innocent}")
        if not 0.0 <= self.p_noise <= 1.0:
            raise BadConfigError(f"p_noise must be in [0, 1], got {self.p_noise}")


@dataclass(frozen=True)
class Move:
    """One membership toggle: add or remove entity ``entity`` in group ``group``."""

    entity: int
    group: int
    add: bool


class Chart:
    """Sparse binary membership of entities (1..n_entities) in groups (1..n_groups).

    Backed by a dense uint8 matrix with row 0 and column 0 unused, plus a
    per-group size array kept consistent with it. Entities may belong to
    zero, one, or several groups.
    """

    __slots__ = ("n_entities", "n_groups", "_matrix", "_sizes")

    def __init__(self, n_entities: int, n_groups: int):
        if n_entities < 1 or n_groups < 1:
            raise BadConfigError("chart needs at least one entity and one group")
        self.n_entities = n_entities
        self.n_groups = n_groups
        self._matrix = np.zeros((n_entities + 1, n_groups + 1), dtype=np.uint8)
        self._sizes = np.zeros(n_groups + 1, dtype=np.int64)

    @classmethod
    def from_groups(cls, n_entities: int, groups) -> "Chart":
        """Build a chart from an iterable of entity-id collections, one per group."""
        groups = [set(g) for g in groups]
        chart = cls(n_entities, len(groups))
        for k, members in enumerate(groups, start=1):
            for e in members:
                chart.add(e, k)
        return chart

    def _check(self, entity: int, group: int):
        if not 1 <= entity <= self.n_entities:
            raise InvalidMoveError(f"entity {entity} outside 1..{self.n_entities}")
        if not 1 <= group <= self.n_groups:
            raise InvalidMoveError(f"group {group} outside 1..{self.n_groups}")

    def has(self, entity: int, group: int) -> bool:
        self._check(entity, group)
        return bool(self._matrix[entity, group])

    def add(self, entity: int, group: int) -> None:
        if self.has(entity, group):
            raise InvalidMoveError(f"entity {entity} already in group {group}")
        self._matrix[entity, group] = 1
        self._sizes[group] += 1

    def remove(self, entity: int, group: int) -> None:
        if not self.has(entity, group):
            raise InvalidMoveError(f"entity {entity} not in group {group}")
        self._matrix[entity, group] = 0
        self._sizes[group] -= 1

    def group_size(self, group: int) -> int:
        return int(self._sizes[group])

    @property
    def group_sizes(self) -> tuple[int, ...]:
        return tuple(int(s) for s in self._sizes[1:])

    def group_members(self, group: int) -> list[int]:
        """Ascending entity ids of one group."""
        return [int(e) for e in np.flatnonzero(self._matrix[:, group])]

    def entity_groups(self, entity: int) -> list[int]:
        """Ascending group indices holding ``entity``."""
        return [int(k) for k in np.flatnonzero(self._matrix[entity, :])]

    def memberships(self):
        """All (entity, group) pairs, entity-major."""
        rows, cols = np.nonzero(self._matrix)
        return [(int(e), int(k)) for e, k in zip(rows, cols)]

    def copy(self) -> "Chart":
        clone = Chart(self.n_entities, self.n_groups)
        clone._matrix[:] = self._matrix
        clone._sizes[:] = self._sizes
        return clone

    def __eq__(self, other):
        return (
            isinstance(other, Chart)
            and self.n_entities == other.n_entities
            and self.n_groups == other.n_groups
            and np.array_equal(self._matrix, other._matrix)
        )

    def __repr__(self):
        return f"Chart(n_entities={self.n_entities}, n_groups={self.n_groups}, sizes={self.group_sizes})"


@dataclass(frozen=True)
class ClusteringResult:
    """Hard per-entity assignment: cluster index 1..K, or ``None`` for outliers."""

    assignment: tuple[int | None, ...]
    n_groups: int

    @property
    def coverage(self) -> int:
        return sum(1 for c in self.assignment if c is not None)

    def cluster_of(self, entity: int) -> int | None:
        return self.assignment[entity - 1]


# ---------------------------------------------------------------------------
# Reference (per-entity) scoring


def entity_factor(entity: int, group: int, chart: Chart, params: LinkModelParams) -> float:
    """Probability that one slot of a group-``group`` link produced ``entity``."""
    size = chart.group_size(group)
    member = (1.0 - params.p_noise) / size if size > 0 and chart.has(entity, group) else 0.0
    return member + params.p_noise / chart.n_entities


def innocent_log_likelihood(link: Link, n_entities: int, params: LinkModelParams) -> float:
    """Log-probability of the link as a fully random draw."""
    if params.p_innocent <= 0.0:
        return NEG_INF
    return math.log(params.p_innocent) - len(link.members) * math.log(n_entities)


def link_group_log_likelihood(link: Link, group: int, chart: Chart, params: LinkModelParams) -> float:
    """Log-probability of the link's slots under one group, ``-inf`` if impossible."""
    total = 0.0
    for entity in link.members:
        factor = entity_factor(entity, group, chart, params)
        if factor <= 0.0:
            return NEG_INF
        total += math.log(factor)
    return total


def best_explanation(link: Link, chart: Chart, params: LinkModelParams) -> tuple[int, float]:
    """Best explanation of a link: ``(INNOCENT or group index, log-likelihood)``.

    Ties break innocent-first, then lowest group index.
    """
    best_code = INNOCENT
    best = innocent_log_likelihood(link, chart.n_entities, params)
    if params.p_innocent < 1.0:
        head = math.log(1.0 - params.p_innocent) - math.log(chart.n_groups)
        for group in range(1, chart.n_groups + 1):
            value = head + link_group_log_likelihood(link, group, chart, params)
            if value > best:
                best_code, best = group, value
    return best_code, best


# ---------------------------------------------------------------------------
# Vectorized closed form shared by the cache below and the sweep kernel.
# A group branch depends on the link only through (|L ∩ g|, |L|) and on the
# chart only through |g|, which is what makes cheap move deltas possible.


def _group_pick_head(params: LinkModelParams, n_groups: int) -> float:
    if params.p_innocent >= 1.0:
        return NEG_INF
    return math.log(1.0 - params.p_innocent) - math.log(n_groups)


def _slot_logs(size: int, n_entities: int, p_noise: float) -> tuple[float, float]:
    """(log member-slot factor, log noise-slot factor) for a group of ``size``."""
    if p_noise > 0.0:
        log_out = math.log(p_noise / n_entities)
        if size > 0:
            log_in = math.log((1.0 - p_noise) / size + p_noise / n_entities)
        else:
            log_in = log_out
    else:
        log_out = NEG_INF
        log_in = math.log(1.0 / size) if size > 0 else NEG_INF
    return log_in, log_out


def _column_for_group(m: np.ndarray, lengths: np.ndarray, size: int,
                      n_entities: int, p_noise: float, head: float) -> np.ndarray:
    """Branch values for every link against one group of ``size`` members."""
    log_in, log_out = _slot_logs(size, n_entities, p_noise)
    if p_noise > 0.0:
        return m * log_in + (lengths - m) * log_out + head
    if size > 0:
        return np.where(m == lengths, lengths * log_in, NEG_INF) + head
    return np.full(lengths.shape, NEG_INF)


def _innocent_column(lengths: np.ndarray, n_entities: int, p_innocent: float) -> np.ndarray:
    if p_innocent <= 0.0:
        return np.full(lengths.shape, NEG_INF)
    return math.log(p_innocent) + lengths * (-math.log(n_entities))


class ScoredAssignment:
    """Per-link best explanations for a chart, kept current move by move.

    Column 0 of ``branch_values`` is the innocent branch; column k the
    branch of group k. ``explanations[i]`` is the argmax column of link i
    (ties: innocent first, then lowest group), ``best_values[i]`` its
    value, and ``total`` their sum. ``second_values`` holds each row's
    runner-up value so a single changed column can be re-maxed in O(1).

    The structure owns its chart: mutate only through ``commit_move`` (or
    the optimizer's sweeps, which share these arrays).
    """

    def __init__(self, links: LinkDataset, chart: Chart, params: LinkModelParams):
        if chart.n_entities != links.n_entities:
            raise BadInputError(
                f"chart has {chart.n_entities} entities, links have {links.n_entities}")
        self.links = links
        self.chart = chart
        self.params = params
        n_links = links.n_links
        n_entities = links.n_entities
        n_groups = chart.n_groups

        self.link_lengths = np.array([len(link.members) for link in links.links], dtype=np.int64)
        flat: list[int] = []
        offsets = np.zeros(n_entities + 2, dtype=np.int64)
        per_entity: list[list[int]] = [[] for _ in range(n_entities + 1)]
        for row, link in enumerate(links.links):
            for entity in link.members:
                per_entity[entity].append(row)
        for entity in range(1, n_entities + 1):
            offsets[entity] = len(flat)
            flat.extend(per_entity[entity])
        offsets[0] = 0
        offsets[n_entities + 1] = len(flat)
        self._ent_flat = np.array(flat, dtype=np.int64)
        self._ent_off = offsets

        incidence = np.zeros((n_links, n_entities + 1), dtype=np.int64)
        for row, link in enumerate(links.links):
            incidence[row, list(link.members)] = 1
        self.member_counts = incidence @ chart._matrix.astype(np.int64)

        self._head = _group_pick_head(params, n_groups)
        self.branch_values = np.empty((n_links, n_groups + 1), dtype=np.float64)
        self.branch_values[:, 0] = _innocent_column(self.link_lengths, n_entities, params.p_innocent)
        for group in range(1, n_groups + 1):
            self.branch_values[:, group] = _column_for_group(
                self.member_counts[:, group], self.link_lengths, chart.group_size(group),
                n_entities, params.p_noise, self._head)
        self._scratch = np.empty(n_links, dtype=np.float64)
        self._scratch2 = np.empty(n_links, dtype=np.float64)
        self.explanations = np.zeros(n_links, dtype=np.int64)
        self.best_values = np.zeros(n_links, dtype=np.float64)
        self.second_values = np.zeros(n_links, dtype=np.float64)
        self.total = 0.0
        self._refresh_bests()

    @classmethod
    def build(cls, links: LinkDataset, chart: Chart, params: LinkModelParams) -> "ScoredAssignment":
        return cls(links, chart, params)

    def _refresh_bests(self) -> None:
        self.explanations = np.argmax(self.branch_values, axis=1)
        self.best_values = np.ascontiguousarray(np.take_along_axis(
            self.branch_values, self.explanations[:, None], axis=1)[:, 0])
        self.second_values = np.ascontiguousarray(
            np.partition(self.branch_values, -2, axis=1)[:, -2])
        self.total = float(self.best_values.sum())

    def entity_link_rows(self, entity: int) -> np.ndarray:
        """Indices of the links containing ``entity``."""
        return self._ent_flat[self._ent_off[entity]:self._ent_off[entity + 1]]

    def explanation_of(self, index: int) -> int:
        return int(self.explanations[index])

    def _validate_move(self, move: Move) -> None:
        if not 1 <= move.entity <= self.chart.n_entities:
            raise InvalidMoveError(f"entity {move.entity} outside 1..{self.chart.n_entities}")
        if not 1 <= move.group <= self.chart.n_groups:
            raise InvalidMoveError(f"group {move.group} outside 1..{self.chart.n_groups}")
        present = self.chart.has(move.entity, move.group)
        if move.add and present:
            raise InvalidMoveError(f"entity {move.entity} already in group {move.group}")
        if not move.add and not present:
            raise InvalidMoveError(f"entity {move.entity} not in group {move.group}")

    def _propose(self, move: Move) -> tuple[np.ndarray, np.ndarray, int]:
        sign = 1 if move.add else -1
        group = move.group
        new_size = self.chart.group_size(group) + sign
        new_counts = self.member_counts[:, group].copy()
        new_counts[self.entity_link_rows(move.entity)] += sign
        new_column = _column_for_group(
            new_counts, self.link_lengths, new_size,
            self.chart.n_entities, self.params.p_noise, self._head)
        return new_counts, new_column, new_size

    def _new_bests(self, group: int, new_column: np.ndarray) -> np.ndarray:
        # When the changed column held the row max, fall back to the runner-up.
        best_other = np.where(self.explanations == group, self.second_values, self.best_values)
        return np.maximum(new_column, best_other)

    def _delta_against(self, new_bests: np.ndarray) -> float:
        old_inf = bool(np.isinf(self.best_values).any())
        new_inf = bool(np.isinf(new_bests).any())
        if not old_inf and not new_inf:
            return float(new_bests.sum() - self.total)
        if old_inf and new_inf:
            return 0.0
        return math.inf if old_inf else NEG_INF

    def delta_for_move(self, move: Move) -> float:
        """Change in total log-likelihood the move would cause, without applying it."""
        self._validate_move(move)
        _, new_column, _ = self._propose(move)
        return self._delta_against(self._new_bests(move.group, new_column))

    def commit_move(self, move: Move) -> float:
        """Apply the move, update every cache, and return the realized delta."""
        self._validate_move(move)
        new_counts, new_column, _ = self._propose(move)
        delta = self._delta_against(self._new_bests(move.group, new_column))
        self.member_counts[:, move.group] = new_counts
        self.branch_values[:, move.group] = new_column
        if move.add:
            self.chart.add(move.entity, move.group)
        else:
            self.chart.remove(move.entity, move.group)
        self._refresh_bests()
        return delta


def total_log_likelihood(links: LinkDataset, chart: Chart,
                         params: LinkModelParams) -> tuple[float, ScoredAssignment]:
    """Sum of best per-link explanations, plus the cache that tracks them."""
    scored = ScoredAssignment.build(links, chart, params)
    return scored.total, scored


def delta_for_move(move: Move, scored: ScoredAssignment) -> float:
    """Module-level alias of :meth:`ScoredAssignment.delta_for_move`."""
    return scored.delta_for_move(move)


def resolve_chart(chart: Chart, links: LinkDataset, scored: ScoredAssignment) -> ClusteringResult:
    """Collapse a chart into one hard cluster per entity.

    No membership means outlier. A single membership wins outright. With
    several memberships the entity goes to the group explaining the most of
    its links (ties: lowest group index).
    """
    assignment: list[int | None] = []
    explanations = scored.explanations
    for entity in range(1, chart.n_entities + 1):
        groups = chart.entity_groups(entity)
        if not groups:
            assignment.append(None)
        elif len(groups) == 1:
            assignment.append(groups[0])
        else:
            rows = scored.entity_link_rows(entity)
            best_group, best_affinity = groups[0], -1
            for group in groups:
                affinity = int((explanations[rows] == group).sum())
                if affinity > best_affinity:
                    best_group, best_affinity = group, affinity
            assignment.append(best_group)
    return ClusteringResult(tuple(assignment), chart.n_groups)


def format_chart(chart: Chart) -> str:
    """One line per group: ``group TAB id,id,...`` (ascending ids)."""
    lines = []
    for group in range(1, chart.n_groups + 1):
        ids = ",".join(str(e) for e in chart.group_members(group))
        lines.append(f"{group}\t{ids}")
    return "\n".join(lines) + "\n"


def format_clustering(result: ClusteringResult) -> str:
    """One line per entity: ``entity TAB cluster`` or ``entity TAB OUTLIER``."""
    lines = []
    for entity, cluster in enumerate(result.assignment, start=1):
        label = OUTLIER_TOKEN if cluster is None else str(cluster)
        lines.append(f"{entity}\t{label}")
    return "\n".join(lines) + "\n"
