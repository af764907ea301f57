"""Ingestion of delimited categorical data into validated immutable tables.

Tokens are opaque strings throughout; nothing downstream ever coerces them
to numbers. Record ids are 1-based and preserve source order.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence, TextIO

from .errors import BadConfigError, EmptyInputError, MalformedRowError


class MissingPolicy(Enum):
    KEEP_AS_CATEGORY = "keep"
    DROP_ROW = "drop"


@dataclass(frozen=True)
class IngestOptions:
    """Parsing options for :func:`load_table`.

    ``class_column`` is ``None``, ``"first"``, ``"last"``, or a 1-based
    column position counted over the raw file columns.
    """

    delimiter: str = ","
    class_column: int | str | None = None
    header: bool = False
    missing_token: str = "?"
    missing_policy: MissingPolicy = MissingPolicy.KEEP_AS_CATEGORY

    def __post_init__(self):
        if len(self.delimiter) != 1:
            raise BadConfigError(f"delimiter must be a single character, got {self.delimiter!r}")
        if isinstance(self.class_column, str) and self.class_column not in ("first", "last"):
            raise BadConfigError(f"class_column must be 'first', 'last', an index, or None, got {self.class_column!r}")
        if isinstance(self.class_column, int) and self.class_column < 1:
            raise BadConfigError(f"class_column index is 1-based, got {self.class_column}")


class CategoricalTable:
    """Immutable table of categorical records.

    Attributes
    ----------
    records : tuple of token tuples, one per record, each of length ``r``
    attribute_names : tuple of attribute names
    n : record count
    r : attribute count
    domains : per-attribute frozenset of the tokens observed in that column
    """

    __slots__ = ("records", "attribute_names", "n", "r", "domains")

    def __init__(self, records: Iterable[Sequence[str]], attribute_names: Sequence[str] | None = None):
        rows = tuple(tuple(row) for row in records)
        if rows:
            arity = len(rows[0])
            for i, row in enumerate(rows):
                if len(row) != arity:
                    raise MalformedRowError(i + 1, f"expected {arity} tokens, got {len(row)}")
        elif attribute_names is None:
            raise EmptyInputError("cannot build an empty table without attribute names")
        else:
            arity = len(attribute_names)
        if attribute_names is None:
            attribute_names = tuple(f"attr{i}" for i in range(1, arity + 1))
        else:
            attribute_names = tuple(attribute_names)
            if len(attribute_names) != arity:
                raise BadConfigError(f"{len(attribute_names)} attribute names for {arity} columns")
        self.records = rows
        self.attribute_names = attribute_names
        self.n = len(rows)
        self.r = arity
        self.domains = tuple(frozenset(row[j] for row in rows) for j in range(arity))

    def column(self, attribute: int) -> tuple[str, ...]:
        """Tokens of the 1-based ``attribute`` column, in record order."""
        return tuple(row[attribute - 1] for row in self.records)

    def __eq__(self, other):
        return (
            isinstance(other, CategoricalTable)
            and self.records == other.records
            and self.attribute_names == other.attribute_names
        )

    def __hash__(self):
        return hash((self.records, self.attribute_names))

    def __repr__(self):
        return f"CategoricalTable(n={self.n}, r={self.r})"


@dataclass(frozen=True)
class LabeledDataset:
    """A table plus optional per-record class labels (kept out of the attributes)."""

    table: CategoricalTable
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.labels is not None and len(self.labels) != self.table.n:
            raise BadConfigError(f"{len(self.labels)} labels for {self.table.n} records")


def _iter_lines(source: str | Path | TextIO) -> Iterable[str]:
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8") as handle:
            yield from handle
    else:
        yield from source


def _resolve_class_index(class_column: int | str | None, arity: int) -> int | None:
    if class_column is None:
        return None
    if class_column == "first":
        return 0
    if class_column == "last":
        return arity - 1
    index = int(class_column) - 1
    if not 0 <= index < arity:
        raise BadConfigError(f"class_column {class_column} out of range for {arity} columns")
    return index


def load_table(source: str | Path | TextIO, opts: IngestOptions = IngestOptions()) -> LabeledDataset:
    """Parse a delimited character stream into a :class:`LabeledDataset`.

    Blank lines are skipped. Every data row must have the same arity as
    the first one; a shorter or longer row raises :class:`MalformedRowError`
    with its physical line number. With ``missing_policy=DROP_ROW`` a row is
    discarded when any of its fields equals ``missing_token``.
    """
    header_names: list[str] | None = None
    raw_rows: list[tuple[int, list[str]]] = []
    arity: int | None = None
    for lineno, line in enumerate(_iter_lines(source), start=1):
        line = line.rstrip("\r\n")
        if not line.strip():
            continue
        fields = line.split(opts.delimiter)
        if opts.header and header_names is None:
            header_names = fields
            continue
        if arity is None:
            arity = len(fields)
        elif len(fields) != arity:
            raise MalformedRowError(lineno, f"expected {arity} fields, got {len(fields)}")
        raw_rows.append((lineno, fields))
    if arity is None:
        raise EmptyInputError("no data rows in input")
    if header_names is not None and len(header_names) != arity:
        raise MalformedRowError(1, f"header has {len(header_names)} fields, data rows have {arity}")

    class_index = _resolve_class_index(opts.class_column, arity)
    if class_index is not None and arity == 1:
        raise BadConfigError("cannot use the only column as the class column")

    if opts.missing_policy is MissingPolicy.DROP_ROW:
        raw_rows = [(ln, row) for ln, row in raw_rows if opts.missing_token not in row]
        if not raw_rows:
            raise EmptyInputError("every row was dropped by the missing-value policy")

    records = []
    labels: list[str] | None = [] if class_index is not None else None
    for _, fields in raw_rows:
        if class_index is None:
            records.append(fields)
        else:
            labels.append(fields[class_index])
            records.append(fields[:class_index] + fields[class_index + 1 :])

    if header_names is None:
        names = None
    elif class_index is None:
        names = header_names
    else:
        names = header_names[:class_index] + header_names[class_index + 1 :]
    table = CategoricalTable(records, names)
    return LabeledDataset(table, tuple(labels) if labels is not None else None)


def write_table(dataset: LabeledDataset, sink: str | Path | TextIO, delimiter: str = ",") -> None:
    """Write a dataset back out as delimited text, labels (if any) last.

    ``load_table`` with ``class_column="last"`` round-trips the result.
    """
    own = isinstance(sink, (str, Path))
    handle: TextIO = open(sink, "w", encoding="utf-8") if own else sink
    try:
        for i, row in enumerate(dataset.table.records):
            fields = list(row)
            if dataset.labels is not None:
                fields.append(dataset.labels[i])
            handle.write(delimiter.join(fields) + "\n")
    finally:
        if own:
            handle.close()


def attribute_domains(table: CategoricalTable) -> list[set[str]]:
    """Observed token sets per attribute, in attribute order."""
    return [set(domain) for domain in table.domains]


def loads_table(text: str, opts: IngestOptions = IngestOptions()) -> LabeledDataset:
    """Convenience wrapper: parse a table from an in-memory string."""
    return load_table(io.StringIO(text), opts)
