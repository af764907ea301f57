"""Noisy hill climbing over charts, with restarts and a final greedy polish.

A sweep visits every (entity, group) membership toggle once, in a seeded
random order. Improving toggles (delta above the tolerance) always commit;
with probability ``noise_prob`` a visited toggle commits regardless, which
is what lets the search escape local optima. Each restart ends with
noise-free sweeps until no toggle improves, so the returned chart is a
genuine local optimum. Restarts use seeds derived from (seed, restart
index), making serial and concurrent execution produce identical results.

The per-toggle work runs in a compiled kernel over the ScoredAssignment
arrays; it evaluates the resized group's whole branch column, which is the
exact affected set (shrinking a group raises its branch value for every
link that intersects it, not only for links it currently explains).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .dataset import LabeledDataset
from .errors import BadConfigError, BadInputError
from .groupmodel import (
    Chart,
    ClusteringResult,
    LinkModelParams,
    Move,
    ScoredAssignment,
    resolve_chart,
)
from .transform import LinkDataset, to_link_dataset

_SEED_MASK = (1 << 64) - 1
_EMPTY_F8 = np.empty(0, dtype=np.float64)


@dataclass(frozen=True)
class OptimizerConfig:
    """Knobs for :func:`optimize`. ``n_groups`` is the only required field."""

    n_groups: int
    restarts: int = 10
    max_sweeps: int = 200
    noise_prob: float = 0.05
    stale_sweeps_to_stop: int = 3
    improvement_tolerance: float = 1e-12
    seed: int = 0

    def __post_init__(self):
        if self.n_groups < 1:
            raise BadConfigError("n_groups must be >= 1")
        if self.restarts < 1 or self.max_sweeps < 1 or self.stale_sweeps_to_stop < 1:
            raise BadConfigError("restarts, max_sweeps and stale_sweeps_to_stop must be >= 1")
        if not 0.0 <= self.noise_prob < 1.0:
            raise BadConfigError(f"noise_prob must be in [0, 1), got {self.noise_prob}")


@dataclass(frozen=True)
class OptimizeResult:
    chart: Chart
    scored: ScoredAssignment
    log_likelihood: float
    restart_log_likelihoods: tuple[float, ...]
    chosen_restart: int


@dataclass(frozen=True)
class FitResult:
    """End-to-end clustering outcome plus optimizer diagnostics."""

    clustering: ClusteringResult
    chart: Chart
    scored: ScoredAssignment
    log_likelihood: float
    restart_log_likelihoods: tuple[float, ...]
    chosen_restart: int

    @property
    def coverage(self) -> int:
        return self.clustering.coverage


def init_chart(n_entities: int, n_groups: int, rng: np.random.Generator) -> Chart:
    """Start every entity in exactly one uniformly random group."""
    if n_entities < 1 or n_groups < 1:
        raise BadConfigError("init_chart needs n_entities >= 1 and n_groups >= 1")
    chart = Chart(n_entities, n_groups)
    for entity, group in enumerate(rng.integers(1, n_groups + 1, size=n_entities), start=1):
        chart.add(entity, int(group))
    return chart


def seed_chart_from_links(links: LinkDataset, n_groups: int, rng: np.random.Generator) -> Chart:
    """Start each group as the member set of a distinct randomly chosen link.

    A seed link immediately prefers its own group over the innocent branch,
    so the very first sweeps have gradient to follow. At scale this matters:
    from uniform random memberships every large link scores innocent and the
    landscape is locally flat. Groups beyond the link count start empty;
    entities outside every seed start ungrouped.
    """
    if links.n_entities < 1 or n_groups < 1:
        raise BadConfigError("seeding needs n_entities >= 1 and n_groups >= 1")
    chart = Chart(links.n_entities, n_groups)
    picked = rng.choice(links.n_links, size=min(n_groups, links.n_links), replace=False)
    for group, row in enumerate(picked, start=1):
        for entity in links.links[int(row)].members:
            chart.add(entity, group)
    return chart


@njit(cache=True, nogil=True)
def _branch_value(m, length, log_in, log_out, head, p_noise):
    if p_noise > 0.0:
        return m * log_in + (length - m) * log_out + head
    if m == length:
        return length * log_in + head
    return -np.inf


@njit(cache=True, nogil=True)
def _sweep_pass(member_counts, branch_values, best_values, second_values, explanations,
                membership, sizes, lengths, ent_flat, ent_off,
                perm, uniforms, noise_prob, tol,
                n_entities, n_groups, p_noise, head,
                new_col, new_best, trace_codes, trace_deltas):
    """Visit every toggle in ``perm`` once, committing in place. Returns
    (any improving commit, number of commits)."""
    n_links = lengths.shape[0]
    improved = False
    n_commits = 0
    # Running total, split so -inf rows never poison the arithmetic.
    total_finite = 0.0
    inf_count = 0
    for row in range(n_links):
        value = best_values[row]
        if value == -np.inf:
            inf_count += 1
        else:
            total_finite += value
    for t in range(perm.shape[0]):
        code = perm[t]
        entity = code // n_groups + 1
        group = code % n_groups + 1
        adding = membership[entity, group] == 0
        sign = 1 if adding else -1
        size_new = sizes[group] + sign
        if p_noise > 0.0:
            log_out = math.log(p_noise / n_entities)
            if size_new > 0:
                log_in = math.log((1.0 - p_noise) / size_new + p_noise / n_entities)
            else:
                log_in = log_out
        else:
            log_out = -np.inf
            if size_new > 0:
                log_in = math.log(1.0 / size_new)
            else:
                log_in = -np.inf
        # The whole branch column of the resized group, then the entity's own links.
        for row in range(n_links):
            new_col[row] = _branch_value(
                member_counts[row, group], lengths[row], log_in, log_out, head, p_noise)
        for idx in range(ent_off[entity], ent_off[entity + 1]):
            row = ent_flat[idx]
            new_col[row] = _branch_value(
                member_counts[row, group] + sign, lengths[row], log_in, log_out, head, p_noise)
        new_sum = 0.0
        new_inf = 0
        for row in range(n_links):
            if explanations[row] == group:
                other = second_values[row]
            else:
                other = best_values[row]
            nb = new_col[row] if new_col[row] > other else other
            new_best[row] = nb
            if nb == -np.inf:
                new_inf += 1
            else:
                new_sum += nb
        if inf_count == 0 and new_inf == 0:
            delta = new_sum - total_finite
        elif inf_count > 0 and new_inf > 0:
            delta = 0.0
        elif inf_count > 0:
            delta = np.inf
        else:
            delta = -np.inf
        commit = False
        if delta > tol:
            commit = True
            improved = True
        elif noise_prob > 0.0 and uniforms[t] < noise_prob:
            commit = True
        if commit:
            membership[entity, group] = 1 if adding else 0
            sizes[group] = size_new
            for idx in range(ent_off[entity], ent_off[entity + 1]):
                member_counts[ent_flat[idx], group] += sign
            for row in range(n_links):
                branch_values[row, group] = new_col[row]
            total_finite = 0.0
            inf_count = 0
            for row in range(n_links):
                best = branch_values[row, 0]
                arg = 0
                second = -np.inf
                for col in range(1, n_groups + 1):
                    value = branch_values[row, col]
                    if value > best:
                        second = best
                        best = value
                        arg = col
                    elif value > second:
                        second = value
                best_values[row] = best
                second_values[row] = second
                explanations[row] = arg
                if best == -np.inf:
                    inf_count += 1
                else:
                    total_finite += best
            trace_codes[n_commits] = code * 2 + (1 if adding else 0)
            trace_deltas[n_commits] = delta
            n_commits += 1
    return improved, n_commits


def sweep(scored: ScoredAssignment, rng: np.random.Generator, noise_prob: float = 0.0,
          improvement_tolerance: float = 1e-12,
          trace: list[tuple[Move, float]] | None = None) -> bool:
    """One pass over all entity-group toggles in a seeded random order.

    Commits a toggle when its delta exceeds the tolerance, and additionally
    (with probability ``noise_prob`` per visited toggle) regardless of the
    delta. Returns whether any tolerance-exceeding improvement committed.
    Committed moves and their deltas are appended to ``trace`` if given.
    """
    chart = scored.chart
    n_toggles = chart.n_entities * chart.n_groups
    perm = rng.permutation(n_toggles)
    uniforms = rng.random(n_toggles) if noise_prob > 0.0 else _EMPTY_F8
    trace_codes = np.empty(n_toggles, dtype=np.int64)
    trace_deltas = np.empty(n_toggles, dtype=np.float64)
    improved, n_commits = _sweep_pass(
        scored.member_counts, scored.branch_values, scored.best_values,
        scored.second_values, scored.explanations,
        chart._matrix, chart._sizes, scored.link_lengths,
        scored._ent_flat, scored._ent_off,
        perm, uniforms, float(noise_prob), float(improvement_tolerance),
        np.int64(chart.n_entities), np.int64(chart.n_groups),
        float(scored.params.p_noise), float(scored._head),
        scored._scratch, scored._scratch2, trace_codes, trace_deltas)
    scored._refresh_bests()
    if trace is not None:
        for i in range(n_commits):
            packed = int(trace_codes[i])
            code, adding = packed >> 1, bool(packed & 1)
            entity = code // chart.n_groups + 1
            group = code % chart.n_groups + 1
            trace.append((Move(entity, group, adding), float(trace_deltas[i])))
    return bool(improved)


def restart_rng(seed: int, restart: int) -> np.random.Generator:
    """Deterministic per-restart stream derived from (seed, restart index)."""
    return np.random.default_rng([seed & _SEED_MASK, restart])


def run_restart(links: LinkDataset, params: LinkModelParams, config: OptimizerConfig,
                restart: int) -> ScoredAssignment:
    """One complete restart: init, noisy sweeps until stale, greedy polish.

    Even restarts seed groups from links, odd restarts place every entity in
    one uniformly random group; the final log-likelihood picks between the
    two basins. Pure function of its arguments, so restarts may run
    concurrently and be merged afterwards without changing the result.
    """
    rng = restart_rng(config.seed, restart)
    if links.n_links > 0 and restart % 2 == 0:
        chart = seed_chart_from_links(links, config.n_groups, rng)
    else:
        chart = init_chart(links.n_entities, config.n_groups, rng)
    scored = ScoredAssignment.build(links, chart, params)
    if links.n_links == 0:
        return scored  # constant objective: nothing to climb
    sweeps = 0
    stale = 0
    while sweeps < config.max_sweeps and stale < config.stale_sweeps_to_stop:
        improved = sweep(scored, rng, config.noise_prob, config.improvement_tolerance)
        sweeps += 1
        stale = 0 if improved else stale + 1
    while sweep(scored, rng, 0.0, config.improvement_tolerance):
        pass
    return scored


def optimize(links: LinkDataset, params: LinkModelParams, config: OptimizerConfig) -> OptimizeResult:
    """Best chart over all restarts (ties go to the lowest restart index)."""
    if links.n_entities < 1:
        raise BadInputError("optimize needs at least one entity")
    outcomes = [run_restart(links, params, config, i) for i in range(config.restarts)]
    best = 0
    for i in range(1, len(outcomes)):
        if outcomes[i].total > outcomes[best].total:
            best = i
    chosen = outcomes[best]
    return OptimizeResult(
        chart=chosen.chart,
        scored=chosen,
        log_likelihood=chosen.total,
        restart_log_likelihoods=tuple(o.total for o in outcomes),
        chosen_restart=best,
    )


def fit_lcbcdc(data: LabeledDataset, params: LinkModelParams = LinkModelParams(),
               config: OptimizerConfig = OptimizerConfig(n_groups=2)) -> FitResult:
    """Full pipeline: table -> links -> optimized chart -> hard clustering."""
    links = to_link_dataset(data.table)
    opt = optimize(links, params, config)
    clustering = resolve_chart(opt.chart, links, opt.scored)
    return FitResult(
        clustering=clustering,
        chart=opt.chart,
        scored=opt.scored,
        log_likelihood=opt.log_likelihood,
        restart_log_likelihoods=opt.restart_log_likelihoods,
        chosen_restart=opt.chosen_restart,
    )
