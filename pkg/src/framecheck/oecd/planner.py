"""Two-stage chat planning over statistics tables.

The first stage picks a table and drafts a broad read-only query; the
second narrows the executed result to the rows and columns that bear on
the claim. Provider replies are JSON plans, validated before execution;
one repair round-trip re-prompts with the validator's reason.
"""

from __future__ import annotations

import json
import logging
import re
from enum import Enum

from ..gateway import Gateway
from ..model import Claim
from .query import (
    Aggregation,
    EvidenceFrame,
    Filter,
    NoNearbyDataError,
    NotAvailable,
    PlanRejectedError,
    QueryPlan,
    validate_plan,
)
from .schema_doc import SchemaDoc
from .store import TableStore

log = logging.getLogger(__name__)

PREVIEW_ROWS = 10


class PlanStage(Enum):
    RETRIEVE = "retrieve"
    CLEAN = "clean"


_PLAN_SHAPE = (
    '{{"table_id": "...", '
    '"filters": [{{"column": "...", "op": "equals|contains|lte|gte|in", "value": ...}}], '
    '"select_columns": ["..."], '
    '"aggregation": {{"function": "sum|mean", "group_by": ["..."]}} or null, '
    '"not_available": false}}'
)

_RETRIEVE_PROMPT = """\
You are preparing a database query to gather evidence for fact-checking a claim.

Claim: {claim}

Candidate tables:
{schemas}

Choose the single most relevant table and describe one read-only query over it \
as a JSON object of this shape:
{shape}

Rules:
- Interpret first-person references in the claim ("we", "us", "our") as the United States.
- Do not filter on the country column yet; narrowing to specific countries happens in a later step.
- If the table has a unit_of_measure column with national-currency values, select the USD_value column instead of value.
- If the claim names a date the table does not have, filter on the nearest date the table does have.
- Keep every column needed to judge the claim in select_columns.
- The query must only read data; never modify the database.
- If no candidate table can answer the claim, reply {{"not_available": true, "reason": "..."}}.

Reply with only the JSON object.
"""

_CLEAN_PROMPT = """\
You are refining evidence for fact-checking a claim. A first query already ran; \
narrow its result to just the rows and columns that bear on the claim.

Claim: {claim}

Table:
{schema}

First query result ({n_rows} rows{truncated_note}), first {n_preview} shown as \
tab-separated values:
{preview}

Describe one refined read-only query over the same table as a JSON object of \
this shape:
{shape}

Rules:
- Interpret first-person references in the claim ("we", "us", "our") as the United States.
- Now filter the country column down to the countries the claim is about.
- Filter date columns to the single most relevant date; if the exact date is absent, use the nearest one present.
- Where the claim allows it, leave at most one value per non-numeric column.
- Drop columns that do not bear on the claim.
- The query must only read data; never modify the database.
- If the data cannot support checking the claim, reply {{"not_available": true, "reason": "..."}}.

Reply with only the JSON object.
"""

_REPAIR_SUFFIX = """\


Your previous reply was rejected: {reason}
Reply again with only a corrected JSON object.
"""

_OP_ALIASES = {
    "equals": "equals", "eq": "equals", "=": "equals", "==": "equals",
    "contains": "contains", "like": "contains",
    "lte": "lte", "<=": "lte", "le": "lte",
    "gte": "gte", ">=": "gte", "ge": "gte",
    "in": "in",
}


def _strip_code_fences(text: str) -> str:
    stripped = text.strip()
    if stripped.startswith("```"):
        stripped = re.sub(r"^```[a-zA-Z]*\s*", "", stripped)
        stripped = re.sub(r"\s*```$", "", stripped)
    return stripped.strip()


def _parse_reply(reply: str, offered_ids: set[str]) -> QueryPlan | NotAvailable:
    """Provider JSON to a QueryPlan; malformed shapes raise PlanRejectedError."""
    try:
        data = json.loads(_strip_code_fences(reply))
    except json.JSONDecodeError as exc:
        raise PlanRejectedError(f"reply is not valid JSON ({exc})") from exc
    if not isinstance(data, dict):
        raise PlanRejectedError("reply must be a JSON object")
    if data.get("not_available"):
        return NotAvailable(reason=str(data.get("reason", "no data available")))

    table_id = str(data.get("table_id", ""))
    if table_id not in offered_ids:
        raise PlanRejectedError(
            f"table_id {table_id!r} is not one of the offered tables"
            f" ({', '.join(sorted(offered_ids))})"
        )

    filters = []
    for raw in data.get("filters") or []:
        if not isinstance(raw, dict):
            raise PlanRejectedError("each filter must be an object")
        op = _OP_ALIASES.get(str(raw.get("op", "")).strip().lower())
        if op is None:
            raise PlanRejectedError(f"unknown filter op {raw.get('op')!r}")
        value = raw.get("value")
        if op == "in":
            if not isinstance(value, list):
                raise PlanRejectedError("in-filter value must be a list")
            value = tuple(value)
        filters.append(Filter(column=str(raw.get("column", "")), op=op, value=value))

    select = [str(c) for c in data.get("select_columns") or []]

    agg_raw = data.get("aggregation")
    aggregation = None
    if isinstance(agg_raw, dict):
        func = str(agg_raw.get("function", "")).strip().lower()
        if func and func != "none":
            aggregation = Aggregation(
                func=func,
                group_by=tuple(str(c) for c in agg_raw.get("group_by") or []),
            )

    return QueryPlan(
        table_id=table_id,
        filters=tuple(filters),
        select_columns=tuple(select),
        aggregation=aggregation,
    )


def _result_preview(frame: EvidenceFrame) -> tuple[int, str, str]:
    lines = frame.to_tsv().splitlines()
    preview = "\n".join(lines[: PREVIEW_ROWS + 1])  # header + rows
    note = ", truncated" if frame.truncated else ""
    return len(frame.rows), preview, note


def build_prompt(
    claim: Claim,
    stage: PlanStage,
    schemas: list[SchemaDoc],
    prior_result: EvidenceFrame | None = None,
) -> str:
    if stage is PlanStage.RETRIEVE:
        return _RETRIEVE_PROMPT.format(
            claim=claim.text,
            schemas="\n".join(doc.rendered for doc in schemas),
            shape=_PLAN_SHAPE,
        )
    if prior_result is None:
        raise ValueError("clean stage requires the retrieve-stage result")
    if len(schemas) != 1:
        raise ValueError("clean stage takes exactly the chosen table's schema")
    n_rows, preview, note = _result_preview(prior_result)
    return _CLEAN_PROMPT.format(
        claim=claim.text,
        schema=schemas[0].rendered,
        n_rows=n_rows,
        truncated_note=note,
        n_preview=min(n_rows, PREVIEW_ROWS),
        preview=preview,
        shape=_PLAN_SHAPE,
    )


def plan_query(
    gateway: Gateway,
    claim: Claim,
    stage: PlanStage,
    schemas: list[SchemaDoc],
    store: TableStore,
    prior_result: EvidenceFrame | None = None,
) -> QueryPlan | NotAvailable:
    """Ask the provider for a stage plan and validate it against the store.

    Invalid output gets one repair round-trip carrying the rejection
    reason; a second rejection raises. A declared or derived absence of
    usable data returns NotAvailable rather than raising.
    """
    offered = {doc.table_id for doc in schemas if store.has_table(doc.table_id)}
    if not offered:
        return NotAvailable(reason="no offered table has ingested data")
    prompt = build_prompt(claim, stage, schemas, prior_result)

    reply = gateway.complete(prompt)
    try:
        return _validated(reply, offered, store, claim)
    except NoNearbyDataError as exc:
        return NotAvailable(reason=str(exc))
    except PlanRejectedError as exc:
        log.info("claim %s: %s plan rejected (%s); repairing", claim.id, stage.value, exc)
        reply = gateway.complete(prompt + _REPAIR_SUFFIX.format(reason=exc))
        try:
            return _validated(reply, offered, store, claim)
        except NoNearbyDataError as exc2:
            return NotAvailable(reason=str(exc2))


def _validated(
    reply: str, offered: set[str], store: TableStore, claim: Claim
) -> QueryPlan | NotAvailable:
    parsed = _parse_reply(reply, offered)
    if isinstance(parsed, NotAvailable):
        return parsed
    table = store.get_table(parsed.table_id)
    return validate_plan(parsed, table, claim_text=claim.text)
