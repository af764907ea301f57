"""Optimizer behavior: sweeps, restarts, determinism, local optimality."""

import itertools
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest

import linkclust as lc
from linkclust.hillclimb import seed_chart_from_links

from conftest import random_link_instance, reference_total_ll


def small_instance(seed=3):
    rng = np.random.default_rng(seed)
    links = (
        lc.Link(frozenset({1, 2, 3}), 1, "a"),
        lc.Link(frozenset({4, 5, 6}), 1, "b"),
        lc.Link(frozenset({1, 4}), 2, "c"),
        lc.Link(frozenset({2, 5, 6}), 2, "d"),
    )
    return lc.LinkDataset(6, links), rng


# -- init_chart ---------------------------------------------------------------

def test_init_chart_single_group():
    chart = lc.init_chart(5, 1, np.random.default_rng(0))
    assert chart.group_members(1) == [1, 2, 3, 4, 5]


def test_init_chart_one_membership_each():
    chart = lc.init_chart(40, 4, np.random.default_rng(1))
    for entity in range(1, 41):
        assert len(chart.entity_groups(entity)) == 1
    assert sum(chart.group_sizes) == 40


def test_init_chart_seed_determinism():
    a = lc.init_chart(30, 3, np.random.default_rng(123))
    b = lc.init_chart(30, 3, np.random.default_rng(123))
    assert a == b


def test_init_chart_validates():
    with pytest.raises(lc.BadConfigError):
        lc.init_chart(0, 1, np.random.default_rng(0))


def test_seed_chart_groups_are_link_members(table1_links):
    chart = seed_chart_from_links(table1_links, 2, np.random.default_rng(5))
    member_sets = [set(l.members) for l in table1_links.links]
    for group in (1, 2):
        members = set(chart.group_members(group))
        assert members in member_sets
    again = seed_chart_from_links(table1_links, 2, np.random.default_rng(5))
    assert again == chart


def test_seed_chart_more_groups_than_links(table1_links):
    chart = seed_chart_from_links(table1_links, 8, np.random.default_rng(2))
    filled = [k for k in range(1, 9) if chart.group_size(k) > 0]
    assert len(filled) == 5  # one group per link, the rest empty


# -- sweep ----------------------------------------------------------------------

def polish(scored, rng):
    while lc.sweep(scored, rng, 0.0):
        pass


def test_sweep_at_local_optimum_commits_nothing():
    dataset, _ = small_instance()
    chart = seed_chart_from_links(dataset, 2, np.random.default_rng(0))
    scored = lc.ScoredAssignment.build(dataset, chart, lc.LinkModelParams(0.1, 0.1))
    rng = np.random.default_rng(0)
    polish(scored, rng)
    trace = []
    improved = lc.sweep(scored, rng, 0.0, trace=trace)
    assert improved is False
    assert trace == []


def test_sweep_commits_the_single_improving_toggle():
    # search deterministically for a state with exactly one improving toggle
    # whose commit lands on a local optimum: the sweep must commit exactly it
    dataset = lc.LinkDataset(4, (lc.Link(frozenset({1, 2}), 1, "a"),
                                 lc.Link(frozenset({3, 4}), 1, "b")))
    params = lc.LinkModelParams(0.1, 0.1)
    rng = np.random.default_rng(0)

    def improving_toggles(groups):
        base = reference_total_ll(dataset, groups, 0.1, 0.1)
        moves = []
        for entity, group in itertools.product(range(1, 5), (1, 2)):
            trial = [set(g) for g in groups]
            if entity in trial[group - 1]:
                trial[group - 1].discard(entity)
            else:
                trial[group - 1].add(entity)
            if reference_total_ll(dataset, trial, 0.1, 0.1) - base > 1e-12:
                moves.append((entity, group))
        return moves

    found = None
    for attempt in range(300):
        chart = lc.Chart(4, 2)
        for entity in range(1, 5):
            for group in (1, 2):
                if rng.random() < 0.5:
                    chart.add(entity, group)
        groups = [set(chart.group_members(1)), set(chart.group_members(2))]
        improving = improving_toggles(groups)
        if len(improving) != 1:
            continue
        entity, group = improving[0]
        after = [set(g) for g in groups]
        if entity in after[group - 1]:
            after[group - 1].discard(entity)
        else:
            after[group - 1].add(entity)
        if not improving_toggles(after):
            found = (chart, improving[0])
            break
    assert found is not None, "no suitable single-improving-toggle state found"
    chart, (entity, group) = found
    scored = lc.ScoredAssignment.build(dataset, chart, params)
    trace = []
    improved = lc.sweep(scored, np.random.default_rng(9), 0.0, trace=trace)
    assert improved is True
    assert [(m.entity, m.group) for m, _ in trace] == [(entity, group)]
    assert all(d > 1e-12 for _, d in trace)


def test_greedy_sweep_never_decreases_ll():
    rng = np.random.default_rng(11)
    for _ in range(10):
        dataset, params, chart = random_link_instance(rng)
        scored = lc.ScoredAssignment.build(dataset, chart, params)
        last = scored.total
        for _ in range(5):
            lc.sweep(scored, rng, 0.0)
            assert scored.total >= last - 1e-9
            last = scored.total


def test_noise_zero_commits_strictly_increase():
    rng = np.random.default_rng(21)
    for _ in range(10):
        dataset, params, chart = random_link_instance(rng)
        scored = lc.ScoredAssignment.build(dataset, chart, params)
        trace = []
        while lc.sweep(scored, rng, 0.0, trace=trace):
            pass
        assert all(delta > 1e-12 for _, delta in trace)


# -- optimize --------------------------------------------------------------------

def test_optimize_no_links_returns_restart0_init():
    dataset = lc.LinkDataset(6, ())
    config = lc.OptimizerConfig(n_groups=3, restarts=4, seed=42)
    result = lc.optimize(dataset, lc.LinkModelParams(0.1, 0.1), config)
    assert result.log_likelihood == 0.0
    assert result.chosen_restart == 0
    assert result.restart_log_likelihoods == (0.0, 0.0, 0.0, 0.0)
    expected = lc.init_chart(6, 3, lc.restart_rng(42, 0))
    assert result.chart == expected


def test_optimize_attains_small_exhaustive_optimum():
    dataset, _ = small_instance()
    params = lc.LinkModelParams(0.1, 0.1)
    best = -np.inf
    for bits1 in range(64):
        g1 = {e for e in range(1, 7) if bits1 >> (e - 1) & 1}
        for bits2 in range(64):
            g2 = {e for e in range(1, 7) if bits2 >> (e - 1) & 1}
            best = max(best, reference_total_ll(dataset, [g1, g2], 0.1, 0.1))
    result = lc.optimize(dataset, params, lc.OptimizerConfig(n_groups=2, restarts=20, seed=0))
    assert result.log_likelihood == pytest.approx(best, abs=1e-9)


def test_optimize_result_is_single_toggle_local_optimum(table1_links):
    params = lc.LinkModelParams(0.1, 0.1)
    result = lc.optimize(table1_links, params, lc.OptimizerConfig(n_groups=2, restarts=5, seed=1))
    scored = result.scored
    for entity in range(1, 11):
        for group in (1, 2):
            move = lc.Move(entity, group, add=not result.chart.has(entity, group))
            assert scored.delta_for_move(move) <= 1e-12


def test_optimize_deterministic(table1_links):
    params = lc.LinkModelParams(0.1, 0.1)
    config = lc.OptimizerConfig(n_groups=2, restarts=6, seed=7)
    a = lc.optimize(table1_links, params, config)
    b = lc.optimize(table1_links, params, config)
    assert a.log_likelihood == b.log_likelihood
    assert a.chart == b.chart
    assert a.restart_log_likelihoods == b.restart_log_likelihoods


def test_concurrent_restarts_match_serial(table1_links):
    params = lc.LinkModelParams(0.1, 0.1)
    config = lc.OptimizerConfig(n_groups=2, restarts=8, seed=3)
    serial = lc.optimize(table1_links, params, config)
    with ThreadPoolExecutor(max_workers=4) as pool:
        outcomes = list(pool.map(
            lambda i: lc.run_restart(table1_links, params, config, i), range(config.restarts)))
    best = 0
    for i in range(1, len(outcomes)):
        if outcomes[i].total > outcomes[best].total:
            best = i
    assert best == serial.chosen_restart
    assert outcomes[best].total == serial.log_likelihood
    assert outcomes[best].chart == serial.chart
    assert tuple(o.total for o in outcomes) == serial.restart_log_likelihoods


def test_optimizer_config_validation():
    with pytest.raises(lc.BadConfigError):
        lc.OptimizerConfig(n_groups=0)
    with pytest.raises(lc.BadConfigError):
        lc.OptimizerConfig(n_groups=2, noise_prob=1.0)
    with pytest.raises(lc.BadConfigError):
        lc.OptimizerConfig(n_groups=2, restarts=0)


# -- fit_lcbcdc -------------------------------------------------------------------

def test_fit_pipeline_on_sample(table1):
    data = lc.LabeledDataset(table1)
    fit = lc.fit_lcbcdc(data, lc.LinkModelParams(0.1, 0.1),
                        lc.OptimizerConfig(n_groups=2, restarts=20, seed=0))
    assert len(fit.clustering.assignment) == 10
    assert fit.coverage == fit.clustering.coverage
    assert len(fit.restart_log_likelihoods) == 20
    assert fit.log_likelihood == max(fit.restart_log_likelihoods)


def test_fit_empty_table_errors():
    table = lc.CategoricalTable([], attribute_names=["a", "b"])
    with pytest.raises(lc.EmptyInputError):
        lc.fit_lcbcdc(lc.LabeledDataset(table))


def test_optimize_handles_boundary_params(table1_links):
    # p_innocent/p_noise at 0 or 1 drive branches to -inf; the sweeps must
    # stay NaN-free and the final cache must match a fresh rebuild
    for p_innocent, p_noise in [(0.0, 0.0), (0.0, 0.5), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]:
        params = lc.LinkModelParams(p_innocent, p_noise)
        result = lc.optimize(table1_links, params,
                             lc.OptimizerConfig(n_groups=2, restarts=4, seed=0))
        assert not np.isnan(result.scored.branch_values).any()
        assert not np.isnan(result.log_likelihood)
        rebuilt, _ = lc.total_log_likelihood(table1_links, result.chart, params)
        if np.isinf(rebuilt):
            assert result.log_likelihood == rebuilt
        else:
            assert abs(rebuilt - result.log_likelihood) <= 1e-9 * (1 + abs(rebuilt))


def test_optimize_escapes_all_impossible_state(table1_links):
    # with both branches disabled unless a group covers a link, the search
    # must climb from -inf to a finite full-coverage score
    params = lc.LinkModelParams(p_innocent=0.0, p_noise=0.0)
    result = lc.optimize(table1_links, params, lc.OptimizerConfig(n_groups=2, restarts=4, seed=0))
    assert np.isfinite(result.log_likelihood)
    for index, link in enumerate(table1_links.links):
        group = result.scored.explanation_of(index)
        assert group != lc.INNOCENT
        assert set(link.members) <= set(result.chart.group_members(group))


def test_fit_more_groups_than_entities(table1):
    # legal: surplus groups may stay empty, and empty groups resolve to no members
    data = lc.LabeledDataset(table1)
    fit = lc.fit_lcbcdc(data, lc.LinkModelParams(0.1, 0.1),
                        lc.OptimizerConfig(n_groups=12, restarts=2, seed=0))
    sizes = fit.chart.group_sizes
    assert len(sizes) == 12
    assert all(c is None or 1 <= c <= 12 for c in fit.clustering.assignment)
    empty_groups = {k + 1 for k, size in enumerate(sizes) if size == 0}
    assert not (empty_groups & {c for c in fit.clustering.assignment if c is not None})
