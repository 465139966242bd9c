"""End-to-end claim checking: parse, route by evoked frame, gather evidence,
and synthesize a verdict.

Voting claims resolve the agent to a member, rank bills against the issue,
look up recorded positions, classify each vote's bearing on the claim, and
weigh them into a verdict. Statistics claims rank tables, run the two-stage
query planner, and verify against the executed rows. Every stage writes
into the result's provenance so a report can be audited offline.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import yaml

from .catalog import FrameCatalog, load_catalog
from .congress import (
    CongressStore,
    MemberNotFoundError,
    ingest_congress,
    lookup_votes,
    match_bills,
)
from .congress import match_agent as congress_match_agent
from .fsp import (
    ChatStructuredBackend,
    FspParseError,
    LexicalBackend,
    ParserBackend,
    parse_claim,
)
from .gateway import (
    Gateway,
    GatewayError,
    ProviderConfig,
    ProviderKind,
    scripted_gateway,
    stub_embed_gateway,
)
from .model import Claim, DataError, ParsedClaim, Verdict, claim_to_dict, frame_to_dict
from .oecd.planner import PlanStage, plan_query
from .oecd.query import (
    EvidenceFrame,
    NotAvailable,
    PlanRejectedError,
    QueryPlan,
    execute_plan,
)
from .oecd.schema_doc import schema_doc_for
from .oecd.store import TableStore, load_store, table_documents
from .retrieval import (
    Bm25Backend,
    EmbeddingBackend,
    Query,
    QueryRepresentation,
    RetrievalError,
    RetrievalResult,
    StubEmbeddingBackend,
    build_query,
    retrieve_top_k,
)
from .verification import (
    MAX_BILLS_PER_VERDICT,
    VerificationError,
    VoteEvidence,
    aggregate_vote_verdict,
    align_claim_bill,
    build_aggregate_prompt,
    build_alignment_prompt,
    build_oecd_prompt,
    verify_oecd,
)

log = logging.getLogger(__name__)

DEFAULT_VOTE_K = 10
DEFAULT_OECD_K = 5


class Route(Enum):
    VOTE = "vote"
    OECD = "oecd"
    UNROUTABLE = "unroutable"


# Stage names in pipeline order; CLI exit codes build on this ordering.
STAGES = ("parse", "agent", "retrieve", "votes", "align", "plan", "execute", "verify")


class StageError(RuntimeError):
    """A pipeline stage failed; carries the stage name and partial result."""

    def __init__(self, stage: str, message: str, partial: "FactCheckResult | None" = None):
        super().__init__(f"stage {stage}: {message}")
        self.stage = stage
        self.partial = partial


@dataclass
class PipelineConfig:
    frame_catalog: Path | None = None
    congress_dir: Path | None = None
    congress_db: str = ":memory:"
    oecd_dir: Path | None = None
    vote_k: int = DEFAULT_VOTE_K
    oecd_k: int = DEFAULT_OECD_K
    vote_backend: str = "bm25"  # bm25 | stub | embed
    oecd_backend: str = "stub"
    representation: QueryRepresentation = QueryRepresentation.FRAME_ELEMENTS
    parser_backend: str = "lexical"  # lexical | chat
    stem: bool = False
    seed: int = 0
    row_cap: int = 200
    include_bill_summary: bool = True
    chat_provider: ProviderConfig | None = None
    embed_provider: ProviderConfig | None = None

    def __post_init__(self):
        if self.vote_k < 1 or self.oecd_k < 1:
            raise DataError("K must be >= 1 for both domains")
        for name, value in (("vote", self.vote_backend), ("oecd", self.oecd_backend)):
            if value not in ("bm25", "stub", "embed"):
                raise DataError(f"unknown {name} retrieval backend {value!r}")
        if self.parser_backend not in ("lexical", "chat"):
            raise DataError(f"unknown parser backend {self.parser_backend!r}")


def _provider_from_dict(raw: dict, base: Path) -> ProviderConfig | None:
    kind = str(raw.get("kind", "")).strip().lower()
    if kind in ("", "none"):
        return None
    if kind == "scripted":
        transcript = raw.get("transcript")
        if not transcript:
            raise DataError("scripted provider needs a transcript path")
        return ProviderConfig(
            kind=ProviderKind.SCRIPTED_REPLAY,
            model_name=str(raw.get("model", "")) or _transcript_model(base / transcript),
            transcript_path=str(base / transcript),
        )
    if kind == "stub":
        return ProviderConfig(kind=ProviderKind.DETERMINISTIC_STUB, model_name="stub")
    if kind in ("remote", "remote-chat"):
        return ProviderConfig(
            kind=ProviderKind.REMOTE_CHAT,
            model_name=str(raw["model"]),
            endpoint=str(raw["endpoint"]),
            api_key_env=str(raw.get("api_key_env", "FRAMECHECK_API_KEY")),
            rate_limit=float(raw.get("rate_limit", 0.0)),
            cache_dir=str(base / raw["cache_dir"]) if raw.get("cache_dir") else None,
        )
    if kind == "remote-embed":
        return ProviderConfig(
            kind=ProviderKind.REMOTE_EMBED,
            model_name=str(raw["model"]),
            endpoint=str(raw["endpoint"]),
            api_key_env=str(raw.get("api_key_env", "FRAMECHECK_API_KEY")),
            rate_limit=float(raw.get("rate_limit", 0.0)),
            cache_dir=str(base / raw["cache_dir"]) if raw.get("cache_dir") else None,
        )
    raise DataError(f"unknown provider kind {kind!r}")


def _transcript_model(path: Path) -> str:
    import json

    try:
        meta = json.loads(Path(path).read_text(encoding="utf-8")).get("metadata", {})
        return str(meta.get("model", "scripted"))
    except (OSError, ValueError):
        return "scripted"


def load_config(
    path: str | Path,
    providers_path: str | Path | None = None,
    seed: int | None = None,
) -> PipelineConfig:
    """Read the YAML pipeline config; relative paths resolve beside the file."""
    config_path = Path(path)
    try:
        raw = yaml.safe_load(config_path.read_text(encoding="utf-8")) or {}
    except OSError as exc:
        raise DataError(f"cannot read config {config_path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise DataError(f"config {config_path} must be a mapping")
    base = config_path.parent

    def resolve(key: str) -> Path | None:
        value = raw.get(key)
        if not value:
            return None
        p = Path(value)
        return p if p.is_absolute() else base / p

    providers = raw.get("providers") or {}
    if providers_path is not None:
        providers_file = Path(providers_path)
        loaded = yaml.safe_load(providers_file.read_text(encoding="utf-8")) or {}
        if not isinstance(loaded, dict):
            raise DataError(f"providers file {providers_file} must be a mapping")
        providers = loaded
        providers_base = providers_file.parent
    else:
        providers_base = base

    k = raw.get("k") or {}
    backends = raw.get("retrieval_backend") or {}
    representation = QueryRepresentation(str(raw.get("query_representation", "fe")))
    config = PipelineConfig(
        frame_catalog=resolve("frame_catalog"),
        congress_dir=resolve("congress_dir"),
        congress_db=str(raw.get("congress_db", ":memory:")),
        oecd_dir=resolve("oecd_dir"),
        vote_k=int(k.get("vote", DEFAULT_VOTE_K)),
        oecd_k=int(k.get("oecd", DEFAULT_OECD_K)),
        vote_backend=str(backends.get("vote", "bm25")),
        oecd_backend=str(backends.get("oecd", "stub")),
        representation=representation,
        parser_backend=str(raw.get("parser_backend", "lexical")),
        stem=bool(raw.get("stem", False)),
        seed=int(raw.get("seed", 0)),
        row_cap=int(raw.get("row_cap", 200)),
        include_bill_summary=bool(raw.get("include_bill_summary", True)),
        chat_provider=_provider_from_dict(providers.get("chat") or {}, providers_base),
        embed_provider=_provider_from_dict(providers.get("embed") or {}, providers_base),
    )
    if seed is not None:
        config.seed = seed
    return config


@dataclass
class FactCheckResult:
    claim: Claim
    route: Route
    parsed: ParsedClaim | None = None
    verdict: Verdict | None = None
    vote_evidence: tuple[VoteEvidence, ...] = ()
    table_evidence: tuple[EvidenceFrame, ...] = ()
    evidence_available: bool = True
    unavailable_reason: str = ""
    provenance: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {
            "claim": claim_to_dict(self.claim),
            "route": self.route.value,
            "frames": [frame_to_dict(f) for f in self.parsed.frames] if self.parsed else [],
            "verdict": None,
            "evidence_available": self.evidence_available,
            "unavailable_reason": self.unavailable_reason,
            "provenance": self.provenance,
        }
        if self.verdict is not None:
            out["verdict"] = {
                "label": self.verdict.label.value,
                "explanation": self.verdict.explanation,
                "evidence_refs": list(self.verdict.evidence_refs),
            }
        if self.vote_evidence:
            out["vote_evidence"] = [
                {
                    "bill_id": ev.bill.bill_id,
                    "title": ev.bill.title,
                    "position": ev.position,
                    "alignment": ev.alignment.label.value,
                    "alignment_explanation": ev.alignment.explanation,
                }
                for ev in self.vote_evidence
            ]
        if self.table_evidence:
            out["table_evidence"] = [
                {
                    "table_id": frame.table_id,
                    "columns": list(frame.columns),
                    "rows": [list(row) for row in frame.rows],
                    "truncated": frame.truncated,
                    "plan": _plan_to_dict(frame.provenance),
                }
                for frame in self.table_evidence
            ]
        return out


def _plan_to_dict(plan: QueryPlan) -> dict:
    out = {
        "table_id": plan.table_id,
        "filters": [
            {"column": f.column, "op": f.op,
             "value": list(f.value) if isinstance(f.value, tuple) else f.value}
            for f in plan.filters
        ],
        "select_columns": list(plan.select_columns),
        "aggregation": None,
        "rewrites": list(plan.rewrites),
    }
    if plan.aggregation is not None:
        out["aggregation"] = {
            "function": plan.aggregation.func,
            "group_by": list(plan.aggregation.group_by),
        }
    if plan.date_substitution is not None:
        out["date_substitution"] = {
            "column": plan.date_substitution.column,
            "requested": plan.date_substitution.requested,
            "substituted": plan.date_substitution.substituted,
        }
    return out


def route_claim(parsed: ParsedClaim) -> Route:
    """Vote frame wins; any other catalog frame goes to statistics; else unroutable."""
    names = {frame.frame_name for frame in parsed.frames}
    if "Vote" in names:
        return Route.VOTE
    if names:
        return Route.OECD
    return Route.UNROUTABLE


def vote_issue_query(parsed: ParsedClaim) -> Query:
    """Bill-ranking query: the first Vote frame's Issue element, else the claim."""
    for frame in parsed.frames:
        if frame.frame_name != "Vote":
            continue
        fe = frame.elements.get("Issue")
        if fe is not None and fe.text.strip():
            return Query(
                text=fe.text,
                representation=QueryRepresentation.FRAME_ELEMENTS,
                source_frame="Vote",
                used_elements=("Issue",),
            )
    return Query(
        text=parsed.claim.text,
        representation=QueryRepresentation.FULL_CLAIM,
        fell_back=True,
    )


def first_agent_surface(parsed: ParsedClaim) -> str | None:
    """The first Vote frame's Agent element; additional agents are logged."""
    surfaces = [
        frame.elements["Agent"].text
        for frame in parsed.frames
        if frame.frame_name == "Vote" and "Agent" in frame.elements
    ]
    if not surfaces:
        return None
    if len(surfaces) > 1:
        log.info("claim %s: multiple agents %s, using the first", parsed.claim.id, surfaces)
    return surfaces[0]


class Pipeline:
    """Loaded stores, catalog, and providers, reusable across claims."""

    def __init__(self, config: PipelineConfig):
        self.config = config
        self.catalog: FrameCatalog = load_catalog(config.frame_catalog)
        self.congress: CongressStore | None = (
            ingest_congress(config.congress_dir, config.congress_db)
            if config.congress_dir
            else None
        )
        self.tables: TableStore | None = (
            load_store(config.oecd_dir) if config.oecd_dir else None
        )
        self.chat: Gateway | None = (
            Gateway(config.chat_provider) if config.chat_provider else None
        )
        self.embed: Gateway | None = (
            Gateway(config.embed_provider) if config.embed_provider else None
        )
        if config.parser_backend == "chat":
            if self.chat is None:
                raise DataError("chat parser backend needs a chat provider")
            self.parser: ParserBackend = ChatStructuredBackend(self.chat)
        else:
            self.parser = LexicalBackend()

    # --- shared helpers -----------------------------------------------------

    def _require_chat(self, stage: str, partial: FactCheckResult) -> Gateway:
        if self.chat is None:
            raise StageError(stage, "no chat provider configured", partial)
        return self.chat

    def _backend(self, kind: str, docs):
        if kind == "bm25":
            return Bm25Backend(docs, stem=self.config.stem)
        if kind == "stub":
            return StubEmbeddingBackend()
        if self.embed is None:
            raise DataError("embed retrieval backend needs an embed provider")
        return EmbeddingBackend(self.embed)

    def parse(self, claim: Claim) -> ParsedClaim:
        return parse_claim(self.parser, self.catalog, claim)

    # --- routes -------------------------------------------------------------

    def check(self, claim: Claim) -> FactCheckResult:
        result = FactCheckResult(claim=claim, route=Route.UNROUTABLE)
        try:
            parsed = self.parse(claim)
        except (FspParseError, GatewayError) as exc:
            raise StageError("parse", str(exc), result) from exc
        result.parsed = parsed
        result.provenance["parse"] = {
            "backend": self.parser.name,
            "frames": [frame_to_dict(f) for f in parsed.frames],
        }

        result.route = route_claim(parsed)
        if result.route is Route.UNROUTABLE:
            result.evidence_available = False
            result.unavailable_reason = "no catalog frame evoked"
            return result
        if result.route is Route.VOTE:
            return self._check_vote(result)
        return self._check_oecd(result)

    def _check_vote(self, result: FactCheckResult) -> FactCheckResult:
        claim, parsed = result.claim, result.parsed
        if self.congress is None:
            raise StageError("retrieve", "no congress store configured", result)

        surface = first_agent_surface(parsed)
        if surface is None:
            raise StageError("agent", "no Agent element extracted", result)
        try:
            member = congress_match_agent(self.congress, surface)
        except MemberNotFoundError as exc:
            raise StageError("agent", str(exc), result) from exc
        result.provenance["agent"] = {
            "surface": surface,
            "bioguide_id": member.bioguide_id,
            "full_name": member.full_name,
        }

        query = vote_issue_query(parsed)
        docs = self.congress.bill_documents(self.config.include_bill_summary)
        try:
            backend = self._backend(self.config.vote_backend, docs)
            ranking = match_bills(
                self.congress, query, k=self.config.vote_k, backend=backend,
                include_summary=self.config.include_bill_summary,
            )
        except (RetrievalError, DataError) as exc:
            raise StageError("retrieve", str(exc), result) from exc
        result.provenance["query"] = _query_to_dict(query)
        result.provenance["retrieval"] = _ranking_to_list(ranking)

        votes = lookup_votes(self.congress, member, ranking.ids())
        result.provenance["votes"] = [
            {"bill_id": v.bill_id, "rollcall_id": v.rollcall_id, "position": v.position}
            for v in votes
        ]
        voted = [v for v in votes if v.position is not None][:MAX_BILLS_PER_VERDICT]
        if not voted:
            result.evidence_available = False
            result.unavailable_reason = "no recorded votes among retrieved bills"
            return result

        gateway = self._require_chat("align", result)
        evidence = []
        digests = []
        for vote in voted:
            bill = self.congress.get_bill(vote.bill_id)
            try:
                alignment = align_claim_bill(gateway, claim, bill, vote.position)
            except (VerificationError, GatewayError) as exc:
                raise StageError("align", str(exc), result) from exc
            evidence.append(VoteEvidence(bill=bill, position=vote.position, alignment=alignment))
            digests.append(
                gateway.digest_for(build_alignment_prompt(claim, bill, vote.position))
            )
        result.vote_evidence = tuple(evidence)
        result.provenance["alignments"] = [
            {
                "bill_id": ev.bill.bill_id,
                "position": ev.position,
                "label": ev.alignment.label.value,
                "prompt_digest": digest,
            }
            for ev, digest in zip(evidence, digests)
        ]

        try:
            verdict = aggregate_vote_verdict(gateway, claim, evidence)
        except (VerificationError, GatewayError) as exc:
            raise StageError("verify", str(exc), result) from exc
        result.verdict = verdict
        result.provenance["verdict"] = {
            "prompt_digest": gateway.digest_for(build_aggregate_prompt(claim, evidence)),
            "label": verdict.label.value,
        }
        return result

    def _check_oecd(self, result: FactCheckResult) -> FactCheckResult:
        claim, parsed = result.claim, result.parsed
        if self.tables is None:
            raise StageError("retrieve", "no statistics store configured", result)

        query = build_query(parsed, self.catalog, self.config.representation)
        descriptors = self.tables.descriptors()
        docs = table_documents(descriptors)
        try:
            backend = self._backend(self.config.oecd_backend, docs)
            ranking = retrieve_top_k(backend, docs, query, self.config.oecd_k)
        except (RetrievalError, DataError) as exc:
            raise StageError("retrieve", str(exc), result) from exc
        result.provenance["query"] = _query_to_dict(query)
        result.provenance["retrieval"] = _ranking_to_list(ranking)

        candidates = [tid for tid in ranking.ids() if self.tables.has_table(tid)]
        if not candidates:
            result.evidence_available = False
            result.unavailable_reason = "no ranked table has ingested data"
            return result
        schemas = [
            schema_doc_for(self.tables.get_table(tid), claim.text, seed=self.config.seed)
            for tid in candidates
        ]

        gateway = self._require_chat("plan", result)
        try:
            plan = plan_query(gateway, claim, PlanStage.RETRIEVE, schemas, self.tables)
        except (PlanRejectedError, GatewayError) as exc:
            raise StageError("plan", str(exc), result) from exc
        if isinstance(plan, NotAvailable):
            result.evidence_available = False
            result.unavailable_reason = plan.reason
            result.provenance["plan_retrieve"] = {"not_available": plan.reason}
            return result
        result.provenance["plan_retrieve"] = _plan_to_dict(plan)

        table = self.tables.get_table(plan.table_id)
        try:
            broad = self._execute(table, plan)
        except DataError as exc:
            raise StageError("execute", str(exc), result) from exc

        chosen_schema = [doc for doc in schemas if doc.table_id == plan.table_id]
        try:
            refined_plan = plan_query(
                gateway, claim, PlanStage.CLEAN, chosen_schema, self.tables,
                prior_result=broad,
            )
        except (PlanRejectedError, GatewayError) as exc:
            raise StageError("plan", str(exc), result) from exc
        if isinstance(refined_plan, NotAvailable):
            result.evidence_available = False
            result.unavailable_reason = refined_plan.reason
            result.provenance["plan_clean"] = {"not_available": refined_plan.reason}
            return result
        result.provenance["plan_clean"] = _plan_to_dict(refined_plan)

        try:
            refined = self._execute(
                self.tables.get_table(refined_plan.table_id), refined_plan
            )
        except DataError as exc:
            raise StageError("execute", str(exc), result) from exc
        result.table_evidence = (refined,)

        try:
            verdict = verify_oecd(gateway, claim, [refined])
        except (VerificationError, GatewayError) as exc:
            raise StageError("verify", str(exc), result) from exc
        result.verdict = verdict
        result.provenance["verdict"] = {
            "prompt_digest": gateway.digest_for(build_oecd_prompt(claim, [refined])),
            "label": verdict.label.value,
        }
        return result

    def _execute(self, table, plan: QueryPlan) -> EvidenceFrame:
        return execute_plan(table, plan, row_cap=self.config.row_cap)


def _query_to_dict(query: Query) -> dict:
    return {
        "text": query.text,
        "representation": query.representation.value,
        "source_frame": query.source_frame,
        "used_elements": list(query.used_elements),
        "fell_back": query.fell_back,
    }


def _ranking_to_list(ranking: RetrievalResult) -> list:
    return [{"id": doc_id, "score": score} for doc_id, score in ranking.ranked]


def run_pipeline(config: PipelineConfig, claim_text: str, claim_id: str = "claim-1") -> FactCheckResult:
    """One-shot convenience: build the pipeline and check a single claim."""
    pipeline = Pipeline(config)
    return pipeline.check(Claim(id=claim_id, text=claim_text))
