"""Validated, read-only query plans over statistics tables.

A plan is data, not code: conjunctive filters, a column projection, an
optional aggregation, and a recorded date substitution. Validation pins
every referenced column to the table schema, restricts operators by column
kind, and applies the domain rewrites (national-currency value column,
first-person country resolution, nearest-date substitution). Execution is
a row scan with no write path at all.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, replace
from datetime import date
from typing import Sequence

from ..model import DataError
from .store import Table, format_value

log = logging.getLogger(__name__)

FILTER_OPS = ("equals", "contains", "lte", "gte", "in")
AGG_FUNCS = ("sum", "mean")

DEFAULT_ROW_CAP = 200
DATE_THRESHOLD_YEARS = 5

_YEAR_RE = re.compile(r"^\d{4}$")
_ISO_RE = re.compile(r"^\d{4}-\d{2}-\d{2}$")
_FIRST_PERSON_RE = re.compile(r"\b(we|us|our)\b", re.IGNORECASE)

UNITED_STATES = "United States"


class PlanRejectedError(ValueError):
    """Plan failed validation; the message names the offending part."""


class NoNearbyDataError(PlanRejectedError):
    """A date filter found nothing within the substitution threshold.

    Subclasses PlanRejectedError so generic handling still rejects the
    plan, but the planner converts this case to a NotAvailable outcome."""


@dataclass(frozen=True)
class NotAvailable:
    """Explicit no-data outcome; carried forward instead of a verdict."""

    reason: str


@dataclass(frozen=True)
class Filter:
    column: str
    op: str
    value: object  # scalar, or tuple of scalars for `in`


@dataclass(frozen=True)
class Aggregation:
    func: str  # sum | mean
    group_by: tuple[str, ...] = ()


@dataclass(frozen=True)
class DateSubstitution:
    column: str
    requested: str
    substituted: str


@dataclass(frozen=True)
class QueryPlan:
    table_id: str
    filters: tuple[Filter, ...] = ()
    select_columns: tuple[str, ...] = ()  # empty selects every column
    aggregation: Aggregation | None = None
    date_substitution: DateSubstitution | None = None
    rewrites: tuple[str, ...] = ()  # validator adjustments, for provenance


@dataclass(frozen=True)
class EvidenceFrame:
    table_id: str
    columns: tuple[str, ...]
    rows: tuple[tuple, ...]
    truncated: bool
    provenance: QueryPlan

    def to_tsv(self) -> str:
        lines = ["\t".join(self.columns)]
        for row in self.rows:
            lines.append("\t".join(format_value(v) for v in row))
        return "\n".join(lines)


# --- dates ------------------------------------------------------------------


def _as_year(value) -> int | None:
    if isinstance(value, int):
        return value
    if isinstance(value, float) and float(value).is_integer():
        return int(value)
    if isinstance(value, str) and _YEAR_RE.match(value.strip()):
        return int(value.strip())
    return None


def _as_date(value) -> date | None:
    if isinstance(value, date):
        return value
    year = _as_year(value)
    if year is not None:
        return date(year, 1, 1)
    if isinstance(value, str) and _ISO_RE.match(value.strip()):
        try:
            return date.fromisoformat(value.strip())
        except ValueError:
            return None
    return None


def nearest_available_date(
    requested, available: Sequence, threshold_years: int = DATE_THRESHOLD_YEARS
):
    """Closest available date value, ties to the earlier one.

    Year-valued data compares in whole years, full dates in days. Distance
    beyond the threshold, or an empty set, returns None (data unavailable).
    The return value is always drawn from `available`, never invented.
    """
    req_year = _as_year(requested)
    years = [(v, _as_year(v)) for v in available]
    if req_year is not None and years and all(y is not None for _, y in years):
        best = min(years, key=lambda pair: (abs(pair[1] - req_year), pair[1]))
        if abs(best[1] - req_year) > threshold_years:
            return None
        return best[0]

    req_date = _as_date(requested)
    if req_date is None:
        return None
    dated = [(v, _as_date(v)) for v in available]
    dated = [(v, d) for v, d in dated if d is not None]
    if not dated:
        return None
    best_value, best_date = min(
        dated, key=lambda pair: (abs((pair[1] - req_date).days), pair[1])
    )
    if abs((best_date - req_date).days) > round(threshold_years * 365.25):
        return None
    return best_value


# --- validation -------------------------------------------------------------


def _check_column(table: Table, name: str, where: str) -> None:
    if table.descriptor.column(name) is None:
        raise PlanRejectedError(
            f"{where} references column {name!r}, which does not exist in"
            f" table {table.table_id!r}"
        )


def _national_currency_present(table: Table) -> bool:
    col = table.descriptor.column("unit_of_measure")
    if col is None or col.kind != "text":
        return False
    return any(
        "national currency" in str(v).lower()
        for v in table.distinct_values("unit_of_measure")
    )


def validate_plan(plan: QueryPlan, table: Table, claim_text: str = "") -> QueryPlan:
    """Check the plan against the schema and apply the domain rewrites.

    Raises PlanRejectedError with the offending column or operator. Date
    equals-filters whose value is missing from the column substitute the
    nearest available date (recorded on the plan); nothing within the
    threshold raises NoNearbyDataError.
    """
    if plan.table_id != table.table_id:
        raise PlanRejectedError(
            f"plan targets table {plan.table_id!r} but was validated against"
            f" {table.table_id!r}"
        )
    rewrites = list(plan.rewrites)

    select = list(plan.select_columns)
    for name in select:
        _check_column(table, name, "select")
    # National-currency data carries a converted column; use it for values.
    if (
        "value" in select
        and table.descriptor.column("USD_value") is not None
        and _national_currency_present(table)
    ):
        select = ["USD_value" if name == "value" else name for name in select]
        rewrites.append("select value -> USD_value (national-currency unit)")

    filters = []
    date_substitution = plan.date_substitution
    for f in plan.filters:
        _check_column(table, f.column, "filter")
        column = table.descriptor.column(f.column)
        if f.op not in FILTER_OPS:
            raise PlanRejectedError(f"unknown filter op {f.op!r}")
        if f.op == "contains" and column.kind != "text":
            raise PlanRejectedError(
                f"contains only applies to text columns, {f.column!r} is {column.kind}"
            )
        if f.op in ("lte", "gte") and column.kind == "text":
            raise PlanRejectedError(
                f"{f.op} only applies to numeric or date columns, {f.column!r} is text"
            )
        if f.op == "in" and not isinstance(f.value, (list, tuple)):
            raise PlanRejectedError(f"in-filter on {f.column!r} needs a list of values")

        if column.kind == "date" and f.op == "equals":
            available = table.distinct_values(f.column)
            if not _date_present(f.value, available):
                nearest = nearest_available_date(f.value, available)
                if nearest is None:
                    raise NoNearbyDataError(
                        f"no {f.column!r} value near {format_value(f.value)}"
                    )
                date_substitution = DateSubstitution(
                    column=f.column,
                    requested=format_value(f.value),
                    substituted=format_value(nearest),
                )
                rewrites.append(
                    f"date {format_value(f.value)} -> nearest available {format_value(nearest)}"
                )
                f = Filter(f.column, f.op, nearest)
        filters.append(f)

    # First-person claims are about the United States; widen country filters
    # that would otherwise exclude it.
    if claim_text and _FIRST_PERSON_RE.search(claim_text):
        filters, widened = _ensure_united_states(table, filters)
        if widened:
            rewrites.append("country filter widened to include United States")

    aggregation = plan.aggregation
    if aggregation is not None:
        if aggregation.func not in AGG_FUNCS:
            raise PlanRejectedError(f"unknown aggregation function {aggregation.func!r}")
        for name in aggregation.group_by:
            _check_column(table, name, "group-by")

    return replace(
        plan,
        filters=tuple(filters),
        select_columns=tuple(select),
        aggregation=aggregation,
        date_substitution=date_substitution,
        rewrites=tuple(rewrites),
    )


def _date_present(value, available: Sequence) -> bool:
    rendered = format_value(value).strip()
    return any(format_value(v).strip() == rendered for v in available)


def _ensure_united_states(table: Table, filters: list[Filter]):
    if table.descriptor.column("country") is None:
        return filters, False
    out = []
    widened = False
    for f in filters:
        if f.column == "country" and f.op == "equals":
            if str(f.value).strip().lower() != UNITED_STATES.lower():
                out.append(Filter("country", "in", (f.value, UNITED_STATES)))
                widened = True
                continue
        elif f.column == "country" and f.op == "in":
            values = tuple(f.value)
            if not any(str(v).strip().lower() == UNITED_STATES.lower() for v in values):
                out.append(Filter("country", "in", values + (UNITED_STATES,)))
                widened = True
                continue
        out.append(f)
    return out, widened


# --- execution --------------------------------------------------------------


def _text_eq(cell, value) -> bool:
    return str(cell).strip().lower() == str(value).strip().lower()


def _numeric(value) -> float | None:
    if value is None:
        return None
    try:
        return float(value)
    except (TypeError, ValueError):
        return None


def _matches(cell, f: Filter, kind: str) -> bool:
    if cell is None:
        return False
    if f.op == "equals":
        if kind == "numeric":
            v = _numeric(f.value)
            return v is not None and float(cell) == v
        return _text_eq(cell, f.value)
    if f.op == "contains":
        return str(f.value).strip().lower() in str(cell).lower()
    if f.op == "in":
        return any(_matches(cell, Filter(f.column, "equals", v), kind) for v in f.value)
    if f.op in ("lte", "gte"):
        if kind == "numeric":
            left, right = _numeric(cell), _numeric(f.value)
        else:  # date columns compare chronologically
            left, right = _as_date(cell), _as_date(f.value)
        if left is None or right is None:
            return False
        return left <= right if f.op == "lte" else left >= right
    raise PlanRejectedError(f"unknown filter op {f.op!r}")


def execute_plan(table: Table, plan: QueryPlan, row_cap: int = DEFAULT_ROW_CAP) -> EvidenceFrame:
    """Run a validated plan: filter, project, optionally aggregate, truncate.

    Filters are conjunctive. Aggregation applies after filtering: numeric
    selected columns are reduced per group (or globally with no group-by),
    ignoring missing cells. The store is never written.
    """
    if row_cap < 1:
        raise DataError(f"row cap must be >= 1, got {row_cap}")
    kinds = {c.name: c.kind for c in table.descriptor.columns}

    kept = []
    for row in table.rows:
        ok = True
        for f in plan.filters:
            idx = table.column_index(f.column)
            if not _matches(row[idx], f, kinds[f.column]):
                ok = False
                break
        if ok:
            kept.append(row)

    select = plan.select_columns or table.descriptor.column_names()
    indices = [table.column_index(name) for name in select]
    projected = [tuple(row[i] for i in indices) for row in kept]

    if plan.aggregation is not None:
        columns, projected = _aggregate(select, projected, kinds, plan.aggregation)
    else:
        columns = tuple(select)

    truncated = len(projected) > row_cap
    if truncated:
        log.info(
            "table %s: %d rows truncated to %d", table.table_id, len(projected), row_cap
        )
        projected = projected[:row_cap]
    return EvidenceFrame(
        table_id=table.table_id,
        columns=columns,
        rows=tuple(projected),
        truncated=truncated,
        provenance=plan,
    )


def _aggregate(
    select: Sequence[str],
    rows: list[tuple],
    kinds: dict[str, str],
    agg: Aggregation,
) -> tuple[tuple[str, ...], list[tuple]]:
    group_cols = [c for c in agg.group_by if c in select]
    value_cols = [c for c in select if kinds[c] == "numeric" and c not in agg.group_by]
    if not value_cols:
        raise PlanRejectedError(
            "aggregation needs at least one selected numeric column outside the group-by"
        )
    gi = [list(select).index(c) for c in group_cols]
    vi = [list(select).index(c) for c in value_cols]

    groups: dict[tuple, list[list[float]]] = {}
    order: list[tuple] = []
    for row in rows:
        key = tuple(row[i] for i in gi)
        if key not in groups:
            groups[key] = [[] for _ in vi]
            order.append(key)
        for slot, i in enumerate(vi):
            value = _numeric(row[i])
            if value is not None:
                groups[key][slot].append(value)

    def reduce(values: list[float]):
        if not values:
            return None
        total = sum(values)
        return total if agg.func == "sum" else total / len(values)

    out_columns = tuple(group_cols) + tuple(f"{agg.func}_{c}" for c in value_cols)
    # missing group values sort first, ahead of any real value
    ordered = sorted(order, key=lambda k: tuple((v is not None, v) for v in k))
    out_rows = [key + tuple(reduce(slots) for slots in groups[key]) for key in ordered]
    return out_columns, out_rows
