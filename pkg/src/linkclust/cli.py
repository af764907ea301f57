"""Command-line experiment runner.

Subcommands compose through files: ``transform`` emits the link dataset,
``cluster`` emits per-record labels, ``eval`` scores a label file against
a truth column, and ``experiment`` runs the full benchmark and prints a
report shaped like a cluster-by-class table per algorithm (fixed section
order: squeezer, kmodes, lcbcdc).

Reports are byte-identical across runs with the same config and seed;
wall-clock timings therefore go to stderr, never into the report. Exit
codes: 0 success, 1 usage/config/data error, 2 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import __version__
from .baselines import KModesConfig, SqueezerConfig, find_threshold_for_k, kmodes, squeezer
from .dataset import IngestOptions, LabeledDataset, MissingPolicy, load_table
from .errors import BadConfigError, BadInputError, LinkclustError, ThresholdNotFoundError
from .evaluate import accuracy_error, confusion, report_lines, report_record
from .groupmodel import OUTLIER_TOKEN, LinkModelParams
from .hillclimb import OptimizerConfig, fit_lcbcdc
from .transform import format_links, to_link_dataset

_SECTION_ORDER = ("squeezer", "kmodes", "lcbcdc")


class _Parser(argparse.ArgumentParser):
    """argparse variant whose usage errors exit 1 instead of 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _add_data_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--data", required=True, help="delimited input file")
    parser.add_argument("--class-col", default="none",
                        help="class column: first|last|none|1-based index (default none)")
    parser.add_argument("--missing", choices=("keep", "drop"), default="keep",
                        help="missing-value policy: keep as category, or drop the row")
    parser.add_argument("--delimiter", default=",", help="field delimiter (default ,)")
    parser.add_argument("--header", action="store_true", help="first line is a header")


def _add_algo_flags(parser: argparse.ArgumentParser, with_all: bool) -> None:
    choices = ("lcbcdc", "kmodes", "squeezer") + (("all",) if with_all else ())
    parser.add_argument("--algo", required=True, choices=choices)
    parser.add_argument("--k", type=int, help="cluster/group count")
    parser.add_argument("--pi", type=float, default=0.1, help="innocent-link probability")
    parser.add_argument("--pr", type=float, default=0.1, help="noise-entity probability")
    parser.add_argument("--threshold", type=float, help="squeezer similarity threshold")
    parser.add_argument("--target-k", type=int,
                        help="search the threshold grid for this squeezer cluster count")
    parser.add_argument("--restarts", type=int, default=10)
    parser.add_argument("--noise", type=float, default=0.05, help="per-toggle noise probability")
    parser.add_argument("--max-sweeps", type=int, default=200)
    parser.add_argument("--stale-sweeps", type=int, default=3)
    parser.add_argument("--seed", type=int, default=0)


def _add_out_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--format", choices=("tsv", "json"), default="tsv")
    parser.add_argument("--out", help="output path (default: stdout)")


def build_parser() -> _Parser:
    parser = _Parser(prog="linkclust", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"linkclust {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_transform = sub.add_parser("transform", parents=[], help="emit the link dataset")
    _add_data_flags(p_transform)
    p_transform.add_argument("--out", help="output path (default: stdout)")

    p_cluster = sub.add_parser("cluster", help="emit per-record cluster labels")
    _add_data_flags(p_cluster)
    _add_algo_flags(p_cluster, with_all=False)
    p_cluster.add_argument("--out", help="output path (default: stdout)")

    p_eval = sub.add_parser("eval", help="score a label file against the truth column")
    _add_data_flags(p_eval)
    p_eval.add_argument("--labels", required=True, help="label file: record_id TAB cluster")
    p_eval.add_argument("--include-outliers", action="store_true",
                        help="count OUTLIER records as a dedicated row")
    _add_out_flags(p_eval)

    p_exp = sub.add_parser("experiment", help="full benchmark report")
    _add_data_flags(p_exp)
    _add_algo_flags(p_exp, with_all=True)
    _add_out_flags(p_exp)
    return parser


def _ingest_options(args) -> IngestOptions:
    raw = args.class_col
    if raw == "none":
        class_column = None
    elif raw in ("first", "last"):
        class_column = raw
    else:
        try:
            class_column = int(raw)
        except ValueError:
            raise BadConfigError(f"--class-col must be first|last|none|INDEX, got {raw!r}")
    return IngestOptions(
        delimiter=args.delimiter,
        class_column=class_column,
        header=args.header,
        missing_token="?",
        missing_policy=MissingPolicy.DROP_ROW if args.missing == "drop" else MissingPolicy.KEEP_AS_CATEGORY,
    )


def _require_k(args) -> int:
    if args.k is None:
        raise BadConfigError(f"--k is required for --algo {args.algo}")
    return args.k


def _run_algorithm(name: str, data: LabeledDataset, args):
    """Labels (cluster int or None per record) plus a params/diagnostics dict."""
    table = data.table
    if name == "squeezer":
        if args.threshold is not None:
            threshold = args.threshold
        else:
            target = args.target_k if args.target_k is not None else args.k
            if target is None:
                raise BadConfigError("squeezer needs --threshold, --target-k, or --k")
            threshold = find_threshold_for_k(table, target)
        labels = squeezer(table, SqueezerConfig(threshold))
        return labels, {"threshold": threshold}, {}
    if name == "kmodes":
        labels = kmodes(table, KModesConfig(k=_require_k(args)))
        return labels, {"k": args.k}, {}
    fit = fit_lcbcdc(
        data,
        LinkModelParams(p_innocent=args.pi, p_noise=args.pr),
        OptimizerConfig(
            n_groups=_require_k(args),
            restarts=args.restarts,
            max_sweeps=args.max_sweeps,
            noise_prob=args.noise,
            stale_sweeps_to_stop=args.stale_sweeps,
            seed=args.seed,
        ),
    )
    params = {
        "k": args.k, "p_innocent": args.pi, "p_noise": args.pr,
        "restarts": args.restarts, "noise_prob": args.noise, "seed": args.seed,
    }
    diagnostics = {
        "log_likelihood": fit.log_likelihood,
        "chosen_restart": fit.chosen_restart,
        "restart_log_likelihoods": list(fit.restart_log_likelihoods),
        "coverage": fit.coverage,
    }
    return list(fit.clustering.assignment), params, diagnostics


def _label_text(cluster) -> str:
    return OUTLIER_TOKEN if cluster is None else str(cluster)


def _section(name: str, data: LabeledDataset, args) -> dict:
    """One experiment section as a format-independent record."""
    section: dict = {"algorithm": name}
    try:
        labels, params, diagnostics = _run_algorithm(name, data, args)
    except ThresholdNotFoundError as exc:
        section["note"] = f"threshold search failed: {exc}"
        return section
    section["params"] = params
    if diagnostics:
        section["diagnostics"] = diagnostics
    if data.labels is None:
        section["note"] = "no labels; evaluation skipped"
        section["labels"] = [[i, _label_text(c)] for i, c in enumerate(labels, start=1)]
        return section
    matrix = confusion(labels, data.labels, include_outliers=False)
    section["confusion"] = report_record(matrix, accuracy_error(matrix))
    return section


def _section_tsv(section: dict) -> list[str]:
    lines = [f"algorithm\t{section['algorithm']}"]
    for key, value in section.get("params", {}).items():
        lines.append(f"{key}\t{value!r}" if isinstance(value, float) else f"{key}\t{value}")
    diagnostics = section.get("diagnostics", {})
    for key in ("log_likelihood", "chosen_restart"):
        if key in diagnostics:
            value = diagnostics[key]
            lines.append(f"{key}\t{value!r}" if isinstance(value, float) else f"{key}\t{value}")
    if "note" in section:
        lines.append(f"note\t{section['note']}")
    if "confusion" in section:
        record = section["confusion"]
        lines.append("cluster\t" + "\t".join(record["classes"]))
        for cluster, row in zip(record["clusters"], record["counts"]):
            lines.append(f"{cluster}\t" + "\t".join(str(v) for v in row))
        lines.append(f"error\t{record['error']:.3f}")
        lines.append(f"accuracy\t{record['accuracy']:.3f}")
        lines.append(f"coverage\t{record['coverage']['covered']}/{record['coverage']['total']}")
    if "labels" in section:
        lines.append("labels")
        for record_id, label in section["labels"]:
            lines.append(f"{record_id}\t{label}")
    return lines


def _render_report(sections: list[dict], fmt: str) -> str:
    if fmt == "json":
        return json.dumps({"sections": sections}, indent=2) + "\n"
    blocks = ["\n".join(_section_tsv(section)) for section in sections]
    return "\n\n".join(blocks) + "\n"


def _write_output(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _read_labels_file(path: str, n_records: int) -> list[int | None]:
    labels: list[int | None] = [None] * n_records
    seen = [False] * n_records
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise BadInputError(f"labels line {lineno}: expected 'record_id<TAB>cluster'")
            record_id = int(parts[0])
            if not 1 <= record_id <= n_records:
                raise BadInputError(f"labels line {lineno}: record id {record_id} outside 1..{n_records}")
            if seen[record_id - 1]:
                raise BadInputError(f"labels line {lineno}: duplicate record id {record_id}")
            seen[record_id - 1] = True
            labels[record_id - 1] = None if parts[1] == OUTLIER_TOKEN else int(parts[1])
    if not all(seen):
        missing = seen.index(False) + 1
        raise BadInputError(f"labels file is missing record id {missing}")
    return labels


def _cmd_transform(args) -> int:
    data = load_table(args.data, _ingest_options(args))
    _write_output(format_links(to_link_dataset(data.table)), args.out)
    return 0


def _cmd_cluster(args) -> int:
    data = load_table(args.data, _ingest_options(args))
    labels, _, _ = _run_algorithm(args.algo, data, args)
    lines = [f"{i}\t{_label_text(c)}" for i, c in enumerate(labels, start=1)]
    _write_output("\n".join(lines) + "\n", args.out)
    return 0


def _cmd_eval(args) -> int:
    data = load_table(args.data, _ingest_options(args))
    if data.labels is None:
        raise BadConfigError("eval needs a truth column; pass --class-col")
    labels = _read_labels_file(args.labels, data.table.n)
    matrix = confusion(labels, data.labels, include_outliers=args.include_outliers)
    report = accuracy_error(matrix)
    if args.format == "json":
        text = json.dumps({"eval": report_record(matrix, report)}, indent=2) + "\n"
    else:
        text = "\n".join(report_lines(matrix, report)) + "\n"
    _write_output(text, args.out)
    return 0


def _cmd_experiment(args) -> int:
    data = load_table(args.data, _ingest_options(args))
    selected = _SECTION_ORDER if args.algo == "all" else (args.algo,)
    sections = []
    for name in _SECTION_ORDER:
        if name not in selected:
            continue
        started = time.perf_counter()
        sections.append(_section(name, data, args))
        print(f"[time] {name}: {time.perf_counter() - started:.3f}s", file=sys.stderr)
    _write_output(_render_report(sections, args.format), args.out)
    return 0


_COMMANDS = {
    "transform": _cmd_transform,
    "cluster": _cmd_cluster,
    "eval": _cmd_eval,
    "experiment": _cmd_experiment,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except OSError as exc:
        print(f"linkclust: i/o error: {exc}", file=sys.stderr)
        return 2
    except LinkclustError as exc:
        print(f"linkclust: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"linkclust: {exc}", file=sys.stderr)
        return 1


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
