"""The full benchmark: all three algorithms on one labeled dataset.

Uses the real benchmark files from data/ when present (see
scripts/fetch_datasets.py); otherwise generates a synthetic table with two
planted clusters so the demo always runs. The same thing is available from
the command line:

    linkclust experiment --data data/agaricus-lepiota.data \
        --class-col first --algo all --k 2 --seed 0
"""

import time
from pathlib import Path

import numpy as np

import linkclust as lc

DATA_DIR = Path(__file__).resolve().parent.parent / "data"
MUSHROOM = DATA_DIR / "agaricus-lepiota.data"


def load_benchmark():
    if MUSHROOM.exists():
        print(f"using {MUSHROOM}")
        return lc.load_table(MUSHROOM, lc.IngestOptions(class_column="first"))
    print("real data not found; generating a synthetic planted dataset")
    rng = np.random.default_rng(0)
    prototypes = [[f"a{j}" for j in range(10)], [f"b{j}" for j in range(10)]]
    rows, labels = [], []
    for _ in range(1000):
        side = int(rng.integers(0, 2))
        rows.append([
            f"m{int(rng.integers(0, 4))}_{j}" if rng.random() < 0.15 else prototypes[side][j]
            for j in range(10)
        ])
        labels.append("e" if side == 0 else "p")
    return lc.LabeledDataset(lc.CategoricalTable(rows), tuple(labels))


def evaluate(name, labels, truth):
    matrix = lc.confusion(labels, truth, include_outliers=False)
    report = lc.accuracy_error(matrix)
    print(f"\n{name}")
    for cluster, row in zip(matrix.cluster_ids, matrix.counts):
        print(f"  cluster {cluster}: {row}")
    print(f"  error={report.error:.3f} coverage={report.covered}/{report.total_records}")


data = load_benchmark()
truth = list(data.labels)

started = time.perf_counter()
threshold = lc.find_threshold_for_k(data.table, 2)
evaluate(f"squeezer (threshold {threshold:g})",
         lc.squeezer(data.table, lc.SqueezerConfig(threshold)), truth)
print(f"  [{time.perf_counter() - started:.1f}s]")

started = time.perf_counter()
evaluate("k-modes (k=2)", lc.kmodes(data.table, lc.KModesConfig(k=2)), truth)
print(f"  [{time.perf_counter() - started:.1f}s]")

started = time.perf_counter()
fit = lc.fit_lcbcdc(data, lc.LinkModelParams(0.1, 0.1),
                    lc.OptimizerConfig(n_groups=2, seed=0))
evaluate("link-group clustering (K=2, defaults, seed 0)",
         list(fit.clustering.assignment), truth)
print(f"  log-likelihood {fit.log_likelihood:.0f}, "
      f"chosen restart {fit.chosen_restart} [{time.perf_counter() - started:.1f}s]")
