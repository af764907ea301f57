"""Shared fixtures: the 10-record sample table, real-data discovery, and
independent reference implementations used as oracles."""

from __future__ import annotations

import math
import os
from pathlib import Path

import numpy as np
import pytest

import linkclust as lc

TESTS_DIR = Path(__file__).resolve().parent
SAMPLE_CSV = TESTS_DIR / "data" / "sample_table.csv"
DATA_DIR = Path(os.environ.get("LINKCLUST_DATA", TESTS_DIR.parent / "data"))

MUSHROOM_FILE = DATA_DIR / "agaricus-lepiota.data"
CANCER_FILE = DATA_DIR / "breast-cancer-wisconsin.data"


@pytest.fixture(scope="session")
def table1() -> lc.CategoricalTable:
    return lc.load_table(SAMPLE_CSV).table


@pytest.fixture(scope="session")
def table1_links(table1) -> lc.LinkDataset:
    return lc.to_link_dataset(table1)


@pytest.fixture(scope="session")
def warm_kernel(table1_links):
    """Compile the sweep kernel once so timed tests measure runtime, not JIT."""
    lc.optimize(table1_links, lc.LinkModelParams(0.1, 0.1),
                lc.OptimizerConfig(n_groups=2, restarts=1, max_sweeps=2, seed=0))
    return True


def require_mushroom() -> Path:
    if not MUSHROOM_FILE.exists():
        pytest.skip(
            f"mushroom dataset not found at {MUSHROOM_FILE}; "
            "run scripts/fetch_datasets.py on a host with network access "
            "(this sandbox cannot reach archive.ics.uci.edu)")
    return MUSHROOM_FILE


def require_cancer() -> Path:
    if not CANCER_FILE.exists():
        pytest.skip(
            f"cancer dataset not found at {CANCER_FILE}; "
            "run scripts/fetch_datasets.py on a host with network access "
            "(this sandbox cannot reach archive.ics.uci.edu)")
    return CANCER_FILE


def load_mushroom() -> lc.LabeledDataset:
    """8124 records, 22 attributes, class column first, '?' kept as a category."""
    return lc.load_table(require_mushroom(), lc.IngestOptions(class_column="first"))


def cancer_from_raw(text: str) -> lc.LabeledDataset:
    """The cleaned cancer form: id column stripped, rows with '?' dropped, class last."""
    lines = []
    for line in text.splitlines():
        if line.strip():
            lines.append(line.split(",", 1)[1])  # drop the sample id
    return lc.loads_table(
        "\n".join(lines) + "\n",
        lc.IngestOptions(class_column="last", missing_policy=lc.MissingPolicy.DROP_ROW))


def load_cancer() -> lc.LabeledDataset:
    return cancer_from_raw(require_cancer().read_text())


# ---------------------------------------------------------------------------
# Independent oracles. These share no code with the package internals: the
# total is rebuilt from raw membership sets, per link and per branch.


def reference_total_ll(links: lc.LinkDataset, groups: list[set[int]], p_innocent: float,
                       p_noise: float) -> float:
    """Definitional total log-likelihood: per-entity factor products."""
    n = links.n_entities
    k = len(groups)
    total = 0.0
    for link in links.links:
        length = len(link.members)
        if p_innocent > 0.0:
            best = math.log(p_innocent) - length * math.log(n)
        else:
            best = -math.inf
        if p_innocent < 1.0:
            head = math.log(1.0 - p_innocent) - math.log(k)
            for members in groups:
                size = len(members)
                value = head
                for entity in link.members:
                    inside = (1.0 - p_noise) / size if size and entity in members else 0.0
                    factor = inside + p_noise / n
                    if factor <= 0.0:
                        value = -math.inf
                        break
                    value += math.log(factor)
                best = max(best, value)
        total += best
    return total


def reference_total_ll_fast(links: lc.LinkDataset, membership: np.ndarray, p_innocent: float,
                            p_noise: float) -> float:
    """Same quantity, rebuilt from scratch with array math (for long move runs).

    ``membership`` is the (n_entities+1, k+1) 0/1 matrix, row 0 and column 0
    unused. Nothing is reused from any incremental cache.
    """
    n = links.n_entities
    k = membership.shape[1] - 1
    sizes = membership.sum(axis=0)
    total = 0.0
    for link in links.links:
        ids = list(link.members)
        length = len(ids)
        if p_innocent > 0.0:
            best = math.log(p_innocent) - length * math.log(n)
        else:
            best = -math.inf
        if p_innocent < 1.0:
            head = math.log(1.0 - p_innocent) - math.log(k)
            inside = membership[ids, :]  # (length, k+1)
            for g in range(1, k + 1):
                size = int(sizes[g])
                member = (1.0 - p_noise) / size if size else 0.0
                factors = inside[:, g] * member + p_noise / n
                if (factors <= 0.0).any():
                    continue
                best = max(best, head + float(np.log(factors).sum()))
        total += best
    return total


def random_link_instance(rng: np.random.Generator, max_entities: int = 30, max_groups: int = 4):
    """A random (links, params, chart) triple for move-delta property runs."""
    n = int(rng.integers(2, max_entities + 1))
    k = int(rng.integers(1, max_groups + 1))
    links = []
    for i in range(int(rng.integers(1, 13))):
        size = int(rng.integers(1, n + 1))
        members = frozenset(int(x) + 1 for x in rng.choice(n, size=size, replace=False))
        links.append(lc.Link(members, 1, f"v{i}"))
    dataset = lc.LinkDataset(n, tuple(links))
    params = lc.LinkModelParams(float(rng.uniform(0.01, 0.99)), float(rng.uniform(0.01, 0.99)))
    chart = lc.Chart(n, k)
    for entity in range(1, n + 1):
        for group in range(1, k + 1):
            if rng.random() < 0.4:
                chart.add(entity, group)
    return dataset, params, chart


def kmodes_reference(rows: list[tuple[str, ...]], k: int, max_iters: int = 100) -> list[int]:
    """Plain-dict batch k-modes under the stated tie rules (no numpy)."""
    n, r = len(rows), len(rows[0])
    first_seen: list[dict[str, int]] = [{} for _ in range(r)]
    for row in rows:
        for j, tok in enumerate(row):
            first_seen[j].setdefault(tok, len(first_seen[j]))
    modes: list[tuple[str, ...]] = []
    for row in rows:
        if row not in modes:
            modes.append(row)
            if len(modes) == k:
                break
    assert len(modes) == k, "k exceeds distinct rows"
    modes = [list(m) for m in modes]
    assignment: list[int] | None = None
    for _ in range(max_iters):
        new_assignment = []
        for row in rows:
            best_c, best_d = 0, r + 1
            for c in range(k):
                d = sum(1 for j in range(r) if row[j] != modes[c][j])
                if d < best_d:
                    best_c, best_d = c, d
            new_assignment.append(best_c)
        if new_assignment == assignment:
            break
        assignment = new_assignment
        for c in range(k):
            members = [rows[i] for i in range(n) if assignment[i] == c]
            if not members:
                continue
            for j in range(r):
                counts: dict[str, int] = {}
                for row in members:
                    counts[row[j]] = counts.get(row[j], 0) + 1
                best_tok, best_count = None, -1
                for tok, count in counts.items():
                    if count > best_count or (
                            count == best_count and first_seen[j][tok] < first_seen[j][best_tok]):
                        best_tok, best_count = tok, count
                modes[c][j] = best_tok
    return [c + 1 for c in assignment]


def squeezer_reference(rows: list[tuple[str, ...]], threshold: float) -> list[int]:
    """Plain-dict one-pass squeezer under the stated tie rules (no numpy)."""
    r = len(rows[0])
    clusters: list[list[dict[str, int]]] = []
    sizes: list[int] = []
    labels = []
    for row in rows:
        best_c, best_sim = -1, -1.0
        for c in range(len(clusters)):
            sim = sum(clusters[c][j].get(row[j], 0) for j in range(r)) / sizes[c]
            if sim > best_sim:
                best_c, best_sim = c, sim
        if best_c >= 0 and best_sim >= threshold:
            for j in range(r):
                clusters[best_c][j][row[j]] = clusters[best_c][j].get(row[j], 0) + 1
            sizes[best_c] += 1
            labels.append(best_c + 1)
        else:
            clusters.append([{row[j]: 1} for j in range(r)])
            sizes.append(1)
            labels.append(len(clusters))
    return labels
