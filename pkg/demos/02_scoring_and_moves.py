"""Scoring links against a chart, and evaluating membership moves.

A chart assigns entities to groups (possibly several, possibly none). Each
link is explained either as innocent (fully random) or by one group whose
members fill its slots, with probability p_noise of a random interloper
per slot. The best explanation is a hard max; group size matters because
a member draw has probability (1 - p_noise)/|group| + p_noise/n.
"""

import linkclust as lc

SAMPLE = "M,A\nM,B\nF,B\nF,A\nM,C\nF,C\nM,C\nF,C\nF,A\nM,B\n"
links = lc.to_link_dataset(lc.loads_table(SAMPLE).table)
params = lc.LinkModelParams(p_innocent=0.1, p_noise=0.1)

# score the chart whose groups copy the two attribute-1 classes
chart = lc.Chart.from_groups(10, [{1, 2, 5, 7, 10}, {3, 4, 6, 8, 9}])
total, scored = lc.total_log_likelihood(links, chart, params)
print(f"total log-likelihood: {total:.4f}\n")

for index, link in enumerate(links.links):
    code = scored.explanation_of(index)
    what = "innocent" if code == lc.INNOCENT else f"group {code}"
    print(f"link {link.source_attribute}={link.source_value} "
          f"{sorted(link.members)} -> {what} ({scored.best_values[index]:.3f})")

# evaluating a move without applying it
move = lc.Move(entity=1, group=1, add=False)
delta = scored.delta_for_move(move)
print(f"\nremoving entity 1 from group 1 would change the total by {delta:.4f}")

# committing keeps every cache in sync with a full recomputation
realized = scored.commit_move(move)
fresh_total, _ = lc.total_log_likelihood(links, chart, params)
print(f"after commit: cached={scored.total:.6f} recomputed={fresh_total:.6f}")
assert abs(scored.total - fresh_total) <= 1e-9 * (1 + abs(fresh_total))
