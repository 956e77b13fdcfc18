"""Categorical training data: loading, validation, and outcome histograms."""

from __future__ import annotations

import csv
import io
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, field
from typing import IO, Union

__all__ = [
    "DatasetError",
    "MissingHeaderError",
    "RaggedRowError",
    "UnknownColumnError",
    "EmptyDataError",
    "EmptyValueError",
    "Row",
    "Dataset",
    "Histogram",
    "histogram",
    "load_csv",
    "dump_csv",
    "builtin_table1",
]


class DatasetError(ValueError):
    """Base class for malformed training data."""


class MissingHeaderError(DatasetError):
    pass


class RaggedRowError(DatasetError):
    def __init__(self, row: int, line: int, expected: int, got: int):
        self.row = row
        self.line = line
        super().__init__(
            f"row {row} (line {line}) has {got} fields, expected {expected}"
        )


class UnknownColumnError(DatasetError):
    def __init__(self, column: str, header: list[str]):
        self.column = column
        super().__init__(f"unknown outcome column {column!r}; header is {header}")


class EmptyDataError(DatasetError):
    pass


class EmptyValueError(DatasetError):
    def __init__(self, row: int, line: int, column: str):
        self.row = row
        self.column = column
        super().__init__(f"row {row} (line {line}) has an empty value in column {column!r}")


@dataclass(frozen=True)
class Row:
    index: int
    values: tuple[str, ...]
    outcome: str


@dataclass(frozen=True)
class Dataset:
    """Immutable table of categorical attribute values plus one outcome column.

    Row ``i`` always lives at ``rows[i]`` and carries ``index == i``.
    """

    attribute_names: tuple[str, ...]
    outcome_name: str
    rows: tuple[Row, ...]

    def __post_init__(self):
        if not self.attribute_names:
            raise DatasetError("dataset needs at least one attribute")
        if len(set(self.attribute_names)) != len(self.attribute_names):
            raise DatasetError(f"duplicate attribute names: {list(self.attribute_names)}")
        if self.outcome_name in self.attribute_names:
            raise DatasetError(f"outcome {self.outcome_name!r} is also an attribute")
        if not self.rows:
            raise EmptyDataError("dataset has no rows")
        width = len(self.attribute_names)
        for i, row in enumerate(self.rows):
            if row.index != i:
                raise DatasetError(f"row at position {i} carries index {row.index}")
            if len(row.values) != width:
                raise DatasetError(
                    f"row {i} has {len(row.values)} values, expected {width}"
                )

    @classmethod
    def from_records(
        cls,
        attribute_names: Iterable[str],
        outcome_name: str,
        records: Iterable[tuple[Iterable[str], str]],
    ) -> "Dataset":
        """Build from ``(values, outcome)`` pairs; indices are assigned densely."""
        rows = tuple(
            Row(i, tuple(values), outcome) for i, (values, outcome) in enumerate(records)
        )
        return cls(tuple(attribute_names), outcome_name, rows)

    def __len__(self) -> int:
        return len(self.rows)

    def __getitem__(self, index: int) -> Row:
        return self.rows[index]

    def __iter__(self) -> Iterator[Row]:
        return iter(self.rows)

    @property
    def num_attributes(self) -> int:
        return len(self.attribute_names)

    def attribute_index(self, name: str) -> int:
        try:
            return self.attribute_names.index(name)
        except ValueError:
            raise KeyError(f"unknown attribute {name!r}") from None

    def outcomes(self) -> list[str]:
        """Sorted distinct outcome tokens."""
        return sorted({row.outcome for row in self.rows})

    def attribute_values(self, attribute: int) -> list[str]:
        return sorted({row.values[attribute] for row in self.rows})

    def subset(self, indices: Iterable[int]) -> "Dataset":
        """New dataset over the given rows, re-indexed from zero."""
        return Dataset.from_records(
            self.attribute_names,
            self.outcome_name,
            ((self.rows[i].values, self.rows[i].outcome) for i in indices),
        )


@dataclass(frozen=True, eq=False)
class Histogram(Mapping):
    """Outcome counts. Only outcomes with a positive count are stored.

    Iteration order is sorted by outcome token.
    """

    _items: tuple[tuple[str, int], ...] = field(default=())

    def __post_init__(self):
        items = tuple(sorted((k, int(v)) for k, v in self._items if v))
        if any(v < 0 for _, v in items):
            raise ValueError("histogram counts must be non-negative")
        keys = [k for k, _ in items]
        if len(set(keys)) != len(keys):
            raise ValueError("duplicate outcome in histogram")
        object.__setattr__(self, "_items", items)
        object.__setattr__(self, "_lookup", dict(items))

    @classmethod
    def of(cls, counts: Mapping[str, int]) -> "Histogram":
        return cls(tuple(counts.items()))

    def __getitem__(self, outcome: str) -> int:
        return self._lookup[outcome]

    def get(self, outcome, default=0):
        return self._lookup.get(outcome, default)

    def __hash__(self) -> int:
        return hash(self._items)

    def __iter__(self):
        return (k for k, _ in self._items)

    def __len__(self) -> int:
        return len(self._items)

    def __add__(self, other: "Histogram") -> "Histogram":
        merged = dict(self._items)
        for key, value in other.items():
            merged[key] = merged.get(key, 0) + value
        return Histogram.of(merged)

    @property
    def total(self) -> int:
        return sum(v for _, v in self._items)

    def as_dict(self) -> dict[str, int]:
        return dict(self._items)

    def __repr__(self) -> str:
        return f"Histogram({self.as_dict()})"


def histogram(dataset: Dataset, indices: Iterable[int]) -> Histogram:
    """Count outcomes over the given row indices."""
    counts: dict[str, int] = {}
    n = len(dataset.rows)
    for i in indices:
        if not 0 <= i < n:
            raise IndexError(f"row index {i} out of range for {n} rows")
        outcome = dataset.rows[i].outcome
        counts[outcome] = counts.get(outcome, 0) + 1
    return Histogram.of(counts)


Source = Union[str, bytes, IO[str], IO[bytes]]


def _read_text(source: Source) -> str:
    if isinstance(source, bytes):
        return source.decode("utf-8")
    if isinstance(source, str):
        return source
    data = source.read()
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    return data


def load_csv(source: Source, outcome_column: str) -> Dataset:
    """Parse a headed, comma-delimited UTF-8 CSV.

    ``source`` may be the CSV text, raw bytes, or an open file (text or
    binary). All columns other than ``outcome_column`` become attributes,
    in header order. Cells are stripped of surrounding whitespace and
    otherwise kept verbatim.
    """
    text = _read_text(source)
    if text.startswith("\ufeff"):
        text = text[1:]
    reader = csv.reader(io.StringIO(text, newline=""))
    header = None
    for raw in reader:
        if raw and any(cell.strip() for cell in raw):
            header = [cell.strip() for cell in raw]
            break
    if header is None:
        raise MissingHeaderError("CSV has no header row")
    if any(not name for name in header):
        raise MissingHeaderError(f"header has an empty column name: {header}")
    if len(set(header)) != len(header):
        raise MissingHeaderError(f"header has duplicate column names: {header}")
    if outcome_column not in header:
        raise UnknownColumnError(outcome_column, header)
    if len(header) < 2:
        raise DatasetError("CSV needs at least one attribute column besides the outcome")

    target = header.index(outcome_column)
    attribute_names = [name for j, name in enumerate(header) if j != target]
    records = []
    for raw in reader:
        if not raw or not any(cell.strip() for cell in raw):
            continue
        row_number = len(records)
        if len(raw) != len(header):
            raise RaggedRowError(row_number, reader.line_num, len(header), len(raw))
        cells = [cell.strip() for cell in raw]
        for name, cell in zip(header, cells):
            if not cell:
                raise EmptyValueError(row_number, reader.line_num, name)
        values = tuple(cell for j, cell in enumerate(cells) if j != target)
        records.append((values, cells[target]))
    if not records:
        raise EmptyDataError("CSV has a header but no data rows")
    return Dataset.from_records(attribute_names, outcome_column, records)


def dump_csv(dataset: Dataset) -> str:
    """Serialize with the outcome as the first column, then the attributes."""
    buf = io.StringIO(newline="")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([dataset.outcome_name, *dataset.attribute_names])
    for row in dataset.rows:
        writer.writerow([row.outcome, *row.values])
    return buf.getvalue()


_TABLE1 = (
    ("t3", "a1", "b0"),
    ("t0", "a1", "b0"),
    ("t0", "a0", "b1"),
    ("t1", "a0", "b1"),
    ("t2", "a1", "b1"),
    ("t2", "a1", "b1"),
    ("t2", "a0", "b0"),
    ("t1", "a0", "b0"),
)


def builtin_table1() -> Dataset:
    """The eight-row worked example: outcomes t0..t3 over Attr A and Attr B."""
    return Dataset.from_records(
        ("Attr A", "Attr B"),
        "Outcome",
        (((a, b), outcome) for outcome, a, b in _TABLE1),
    )
