"""Statistics-table storage: CSV data files with JSON sidecar descriptors.

A descriptor names the table, describes it, and types each column as text,
numeric, or date. Descriptors may exist without data (catalog-only entries
used for table identification). Stores are immutable after loading; the
checksum lets tests assert that query execution never mutated anything.
"""

from __future__ import annotations

import csv
import hashlib
import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from ..model import DataError
from ..retrieval import Document

log = logging.getLogger(__name__)

KINDS = ("text", "numeric", "date")

_TABLE_ID_OK = set("abcdefghijklmnopqrstuvwxyz0123456789_")


@dataclass(frozen=True)
class Column:
    name: str
    kind: str  # text | numeric | date
    n_distinct: int = 0


@dataclass(frozen=True)
class TableDescriptor:
    table_id: str
    name: str
    description: str
    columns: tuple[Column, ...]

    def column(self, name: str) -> Column | None:
        for col in self.columns:
            if col.name == name:
                return col
        return None

    def column_names(self) -> tuple[str, ...]:
        return tuple(col.name for col in self.columns)


@dataclass(frozen=True)
class Table:
    """Descriptor plus parsed rows; numeric cells are float or None, the
    rest are strings."""

    descriptor: TableDescriptor
    rows: tuple[tuple, ...]

    @property
    def table_id(self) -> str:
        return self.descriptor.table_id

    def column_index(self, name: str) -> int:
        for i, col in enumerate(self.descriptor.columns):
            if col.name == name:
                return i
        raise DataError(f"table {self.table_id!r} has no column {name!r}")

    def distinct_values(self, name: str) -> tuple:
        idx = self.column_index(name)
        seen = []
        for row in self.rows:
            value = row[idx]
            if value is not None and value not in seen:
                seen.append(value)
        return tuple(sorted(seen, key=lambda v: (isinstance(v, str), v)))


def _parse_descriptor(path: Path) -> TableDescriptor:
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: invalid JSON: {exc}") from exc
    try:
        table_id = str(raw["table_id"])
        name = str(raw["name"])
        description = str(raw.get("description", ""))
        columns_raw = raw["columns"]
    except KeyError as exc:
        raise DataError(f"{path}: missing descriptor field {exc}") from exc
    if not table_id or not set(table_id) <= _TABLE_ID_OK:
        raise DataError(f"{path}: bad table_id {table_id!r} (lowercase/digits/underscore)")
    columns = []
    seen = set()
    for col in columns_raw:
        cname = str(col["name"])
        kind = str(col["kind"])
        if kind not in KINDS:
            raise DataError(f"{path}: column {cname!r} has unknown kind {kind!r}")
        if cname in seen:
            raise DataError(f"{path}: duplicate column {cname!r}")
        seen.add(cname)
        columns.append(Column(cname, kind, int(col.get("n_distinct", 0))))
    if not columns:
        raise DataError(f"{path}: descriptor has no columns")
    return TableDescriptor(table_id, name, description, tuple(columns))


def _parse_cell(raw: str, column: Column, where: str):
    value = raw.strip()
    if column.kind == "numeric":
        if value == "":
            return None
        try:
            return float(value)
        except ValueError as exc:
            raise DataError(f"{where}: column {column.name!r} expects a number, got {raw!r}") from exc
    return value


def _load_table(descriptor: TableDescriptor, csv_path: Path) -> Table:
    with csv_path.open(encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            return _with_distincts(Table(descriptor, ()))
        expected = list(descriptor.column_names())
        if [h.strip() for h in header] != expected:
            raise DataError(
                f"{csv_path}: header {header!r} does not match descriptor columns {expected!r}"
            )
        rows = []
        for lineno, record in enumerate(reader, start=2):
            if not record or all(not cell.strip() for cell in record):
                continue
            if len(record) != len(expected):
                raise DataError(
                    f"{csv_path}:{lineno}: expected {len(expected)} cells, got {len(record)}"
                )
            rows.append(
                tuple(
                    _parse_cell(cell, col, f"{csv_path}:{lineno}")
                    for cell, col in zip(record, descriptor.columns)
                )
            )
    return _with_distincts(Table(descriptor, tuple(rows)))


def _with_distincts(table: Table) -> Table:
    """Recompute per-column distinct counts from the actual data."""
    columns = tuple(
        Column(col.name, col.kind, len(table.distinct_values(col.name)))
        for col in table.descriptor.columns
    )
    descriptor = TableDescriptor(
        table.descriptor.table_id, table.descriptor.name,
        table.descriptor.description, columns,
    )
    return Table(descriptor, table.rows)


class TableStore:
    """Immutable collection of tables plus catalog-only descriptors."""

    def __init__(self, tables: dict[str, Table], extra_descriptors: dict[str, TableDescriptor]):
        self._tables = dict(tables)
        self._extra = dict(extra_descriptors)

    def table_ids(self) -> tuple[str, ...]:
        return tuple(sorted(self._tables))

    def get_table(self, table_id: str) -> Table:
        table = self._tables.get(table_id)
        if table is None:
            raise DataError(f"no such table: {table_id!r}")
        return table

    def has_table(self, table_id: str) -> bool:
        return table_id in self._tables

    def descriptors(self) -> list[TableDescriptor]:
        """All descriptors, data-backed and catalog-only, sorted by id."""
        merged = {tid: t.descriptor for tid, t in self._tables.items()}
        merged.update({tid: d for tid, d in self._extra.items() if tid not in merged})
        return [merged[tid] for tid in sorted(merged)]

    def checksum(self) -> str:
        payload = []
        for table_id in self.table_ids():
            table = self._tables[table_id]
            payload.append(
                {
                    "id": table_id,
                    "columns": [[c.name, c.kind, c.n_distinct] for c in table.descriptor.columns],
                    "rows": [list(row) for row in table.rows],
                }
            )
        for table_id in sorted(self._extra):
            payload.append({"id": table_id, "catalog_only": True})
        blob = json.dumps(payload, sort_keys=True, ensure_ascii=True)
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def load_store(src_dir: str | Path) -> TableStore:
    """Load every descriptor under src_dir; CSVs sharing the stem carry data.

    A descriptor without a CSV becomes a catalog-only entry: it can be
    identified as relevant but not queried.
    """
    src = Path(src_dir)
    if not src.is_dir():
        raise DataError(f"not a directory: {src}")
    tables: dict[str, Table] = {}
    extra: dict[str, TableDescriptor] = {}
    for json_path in sorted(src.glob("*.json")):
        descriptor = _parse_descriptor(json_path)
        if descriptor.table_id != json_path.stem:
            raise DataError(
                f"{json_path}: table_id {descriptor.table_id!r} must match file stem"
            )
        if descriptor.table_id in tables or descriptor.table_id in extra:
            raise DataError(f"duplicate table_id {descriptor.table_id!r}")
        csv_path = json_path.with_suffix(".csv")
        if csv_path.is_file():
            tables[descriptor.table_id] = _load_table(descriptor, csv_path)
        else:
            extra[descriptor.table_id] = descriptor
            log.info("table %s: descriptor only, no data file", descriptor.table_id)
    return TableStore(tables, extra)


def table_documents(descriptors: Iterable[TableDescriptor]) -> list[Document]:
    """Tables as retrieval documents: name followed by description."""
    docs = []
    for d in descriptors:
        text = d.name if not d.description else f"{d.name}. {d.description}"
        docs.append(Document(id=d.table_id, text=text))
    return docs


def format_value(value) -> str:
    """Canonical cell rendering: floats drop a trailing .0, None is empty."""
    if value is None:
        return ""
    if isinstance(value, float):
        return str(int(value)) if value.is_integer() else repr(value)
    return str(value)
