"""Turning a categorical table into a co-occurrence link dataset.

Each attribute partitions the records into equivalence classes (records
sharing the attribute's value). Every class becomes one link: a set of
1-based record ids tagged with its originating attribute and value. Link
order is fixed (attribute-major, then first occurrence of the value) so
downstream runs are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TextIO

from .dataset import CategoricalTable
from .errors import BadAttributeError, BadInputError, EmptyInputError


@dataclass(frozen=True)
class Link:
    """One equivalence class viewed as a set of entity ids."""

    members: frozenset[int]
    source_attribute: int
    source_value: str

    def __len__(self):
        return len(self.members)


@dataclass(frozen=True)
class LinkDataset:
    """An entity universe 1..n_entities plus an ordered list of links."""

    n_entities: int
    links: tuple[Link, ...]

    def __post_init__(self):
        if self.n_entities < 0:
            raise BadInputError("n_entities must be nonnegative")
        for link in self.links:
            if not link.members:
                raise BadInputError("links must be nonempty")
            if min(link.members) < 1 or max(link.members) > self.n_entities:
                raise BadInputError(f"link members outside 1..{self.n_entities}")

    @property
    def n_links(self) -> int:
        return len(self.links)


def equivalence_classes(table: CategoricalTable, attribute: int) -> list[set[int]]:
    """Partition record ids by their value on the 1-based ``attribute``.

    Classes come out in first-occurrence order of the value; two records
    share a class exactly when they agree on the attribute.
    """
    if not 1 <= attribute <= table.r:
        raise BadAttributeError(f"attribute {attribute} out of range 1..{table.r}")
    classes: dict[str, set[int]] = {}
    for record_id, row in enumerate(table.records, start=1):
        classes.setdefault(row[attribute - 1], set()).add(record_id)
    return list(classes.values())


def to_link_dataset(table: CategoricalTable) -> LinkDataset:
    """Emit one link per (attribute, value) pair observed in the table.

    The entity universe is the record ids; every attribute contributes a
    partition of it, so the link count is the sum of the domain sizes.
    """
    if table.n == 0 or table.r == 0:
        raise EmptyInputError("cannot transform an empty table")
    links = []
    for attribute in range(1, table.r + 1):
        seen: dict[str, set[int]] = {}
        for record_id, row in enumerate(table.records, start=1):
            seen.setdefault(row[attribute - 1], set()).add(record_id)
        for value, members in seen.items():
            links.append(Link(frozenset(members), attribute, value))
    return LinkDataset(table.n, tuple(links))


def format_links(dataset: LinkDataset) -> str:
    """Canonical text form: ``attribute TAB value TAB id,id,...`` per link."""
    lines = []
    for link in dataset.links:
        ids = ",".join(str(e) for e in sorted(link.members))
        lines.append(f"{link.source_attribute}\t{link.source_value}\t{ids}")
    return "\n".join(lines) + ("\n" if lines else "")


def write_links(dataset: LinkDataset, sink: TextIO) -> None:
    sink.write(format_links(dataset))
