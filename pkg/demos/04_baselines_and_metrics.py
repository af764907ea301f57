"""The two comparison algorithms and the confusion-matrix metric.

k-modes extends k-means to categorical data: modes are per-attribute most
frequent values, distance is the mismatch count, and iteration alternates
assignment and mode updates. Squeezer reads records once, adding each to
the most similar existing cluster when the similarity clears a threshold.
Both are deterministic given the record order and their one parameter.
"""

import linkclust as lc

SAMPLE = "M,A\nM,B\nF,B\nF,A\nM,C\nF,C\nM,C\nF,C\nF,A\nM,B\n"
table = lc.loads_table(SAMPLE).table

print("k-modes, k=2 (modes start from the first 2 distinct records):")
labels = lc.kmodes(table, lc.KModesConfig(k=2))
for record_id, label in enumerate(labels, start=1):
    print(f"  record {record_id} -> cluster {label}")

print("\nsqueezer, threshold 1.0 (one pass, in record order):")
labels = lc.squeezer(table, lc.SqueezerConfig(threshold=1.0))
print("  labels:", labels)

print("\nthreshold search: smallest grid value giving exactly 2 clusters")
threshold = lc.find_threshold_for_k(table, 2)
print(f"  found threshold {threshold}")

# score a clustering against ground-truth classes
truth = ["male" if row[0] == "M" else "female" for row in table.records]
matrix = lc.confusion(labels, truth)
report = lc.accuracy_error(matrix)
print("\nconfusion matrix rows (cluster x class counts):")
for cluster, row in zip(matrix.cluster_ids, matrix.counts):
    print(f"  cluster {cluster}: {row}")
print(f"accuracy={report.accuracy:.3f} error={report.error:.3f} "
      f"coverage={report.covered}/{report.total_records}")
