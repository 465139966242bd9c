"""Statistics-table evidence: storage, schema docs, query planning, execution."""

from .planner import PlanStage, build_prompt, plan_query
from .query import (
    Aggregation,
    DateSubstitution,
    EvidenceFrame,
    Filter,
    NoNearbyDataError,
    NotAvailable,
    PlanRejectedError,
    QueryPlan,
    execute_plan,
    nearest_available_date,
    validate_plan,
)
from .schema_doc import (
    SchemaDoc,
    column_samples,
    render_schema_doc,
    schema_doc_for,
    select_sample_values,
)
from .store import (
    Column,
    Table,
    TableDescriptor,
    TableStore,
    format_value,
    load_store,
    table_documents,
)

__all__ = [
    "Aggregation",
    "Column",
    "DateSubstitution",
    "EvidenceFrame",
    "Filter",
    "NoNearbyDataError",
    "NotAvailable",
    "PlanRejectedError",
    "PlanStage",
    "QueryPlan",
    "SchemaDoc",
    "Table",
    "TableDescriptor",
    "TableStore",
    "build_prompt",
    "column_samples",
    "execute_plan",
    "format_value",
    "load_store",
    "nearest_available_date",
    "plan_query",
    "render_schema_doc",
    "schema_doc_for",
    "select_sample_values",
    "table_documents",
    "validate_plan",
]
