"""Evaluation suites over gold files: parsing accuracy, retrieval recall,
verdict accuracy, and the corpus frame survey.

Each suite returns an aligned plain-text table plus the same numbers as a
machine-readable dict, so reports can be diffed by eye and consumed by
tooling from one run.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

from .fsp import score_fsp, survey_frames
from .model import (
    Claim,
    EvaluationError,
    GoldRecord,
    ParsedClaim,
    make_parsed_claim,
)
from .pipeline import Pipeline, StageError, vote_issue_query
from .retrieval import (
    Query,
    QueryRepresentation,
    build_query,
    max_possible,
    recall_at_k,
    retrieve_top_k,
)
from .verification import Prediction, naive_verify, score_verification

log = logging.getLogger(__name__)

SUITES = ("fsp", "retrieval", "verify", "survey")


@dataclass(frozen=True)
class EvalReport:
    suite: str
    table: str
    data: dict

    def __str__(self) -> str:
        return self.table


def format_table(headers: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    """Fixed-width columns, two-space gutters, header underline."""
    cells = [list(headers)] + [[str(c) for c in row] for row in rows]
    widths = [max(len(row[i]) for row in cells) for i in range(len(headers))]
    lines = []
    for n, row in enumerate(cells):
        lines.append("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip())
        if n == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def _fmt(value: float) -> str:
    return f"{value:.4f}"


# --- fsp --------------------------------------------------------------------


def eval_fsp(pipeline: Pipeline, gold: Sequence[GoldRecord]) -> EvalReport:
    """Exact-match frame and argument accuracy against gold parses."""
    references = []
    for record in gold:
        if record.gold_frames is None:
            raise EvaluationError(
                f"gold record {record.claim.id!r} has no gold frames; "
                "the fsp suite needs fully annotated records"
            )
        references.append(make_parsed_claim(record.claim, list(record.gold_frames)))
    predictions = [pipeline.parse(record.claim) for record in gold]
    score = score_fsp(predictions, references)
    table = format_table(
        ("backend", "frame_acc", "argument_acc", "n"),
        [(pipeline.parser.name, _fmt(score.frame_accuracy),
          _fmt(score.argument_accuracy), str(score.n_claims))],
    )
    return EvalReport(
        suite="fsp",
        table=table,
        data={
            "backend": pipeline.parser.name,
            "frame_accuracy": score.frame_accuracy,
            "argument_accuracy": score.argument_accuracy,
            "n_claims": score.n_claims,
        },
    )


# --- retrieval --------------------------------------------------------------


def _domain_query(
    pipeline: Pipeline,
    parsed: ParsedClaim,
    domain: str,
    representation: QueryRepresentation,
) -> Query:
    if representation is QueryRepresentation.FULL_CLAIM:
        return Query(text=parsed.claim.text, representation=representation)
    if domain == "vote":
        return vote_issue_query(parsed)
    return build_query(parsed, pipeline.catalog, representation)


def eval_retrieval(
    pipeline: Pipeline,
    gold: Sequence[GoldRecord],
    domain: str,
    representations: Sequence[QueryRepresentation] = (
        QueryRepresentation.FULL_CLAIM,
        QueryRepresentation.FRAME_ELEMENTS,
    ),
) -> EvalReport:
    """Mean recall@K per query representation, with the evidence upper bound."""
    if domain not in ("vote", "oecd"):
        raise EvaluationError(f"unknown retrieval domain {domain!r}")
    if domain == "vote":
        if pipeline.congress is None:
            raise EvaluationError("vote retrieval needs a congress store")
        docs = pipeline.congress.bill_documents(pipeline.config.include_bill_summary)
        k = pipeline.config.vote_k
        backend_kind = pipeline.config.vote_backend
        gold_ids = {r.claim.id: set(r.gold_bill_ids) for r in gold}
    else:
        if pipeline.tables is None:
            raise EvaluationError("statistics retrieval needs a table store")
        from .oecd.store import table_documents

        docs = table_documents(pipeline.tables.descriptors())
        k = pipeline.config.oecd_k
        backend_kind = pipeline.config.oecd_backend
        gold_ids = {r.claim.id: set(r.gold_table_ids) for r in gold}
    for record in gold:
        if not gold_ids[record.claim.id]:
            raise EvaluationError(
                f"gold record {record.claim.id!r} carries no {domain} evidence ids"
            )

    backend = pipeline._backend(backend_kind, docs)
    parses = {record.claim.id: pipeline.parse(record.claim) for record in gold}
    bound = max_possible(list(gold), {doc.id for doc in docs})

    rows = []
    per_repr: dict[str, dict] = {}
    for representation in representations:
        recalls = []
        fallbacks = 0
        for record in gold:
            query = _domain_query(pipeline, parses[record.claim.id], domain, representation)
            fallbacks += int(query.fell_back)
            ranking = retrieve_top_k(backend, docs, query, k)
            recalls.append(recall_at_k(ranking, gold_ids[record.claim.id]))
        mean_recall = sum(recalls) / len(recalls) if recalls else 0.0
        label = "FullClaim" if representation is QueryRepresentation.FULL_CLAIM else "FrameElements"
        rows.append(
            (label, backend.name, str(k), _fmt(mean_recall), _fmt(bound.value), str(len(gold)))
        )
        per_repr[label] = {
            "recall_at_k": mean_recall,
            "per_claim": recalls,
            "fallbacks": fallbacks,
        }
    table = format_table(
        ("representation", "backend", "K", "recall@K", "max_possible", "n"), rows
    )
    return EvalReport(
        suite="retrieval",
        table=table,
        data={
            "domain": domain,
            "backend": backend.name,
            "k": k,
            "representations": per_repr,
            "max_possible": bound.value,
            "n_claims": len(gold),
        },
    )


# --- verify -----------------------------------------------------------------


def eval_verify(
    pipeline: Pipeline,
    gold: Sequence[GoldRecord],
    exclude_no_evidence: bool = True,
    naive: bool = False,
) -> EvalReport:
    """Run the full pipeline per gold claim and score verdicts against gold."""
    predictions = []
    per_claim = []
    for record in gold:
        claim = record.claim
        if naive:
            if pipeline.chat is None:
                raise EvaluationError("naive verification needs a chat provider")
            verdict = naive_verify(pipeline.chat, claim)
            prediction = Prediction(claim_id=claim.id, verdict=verdict, evidence_available=True)
        else:
            try:
                result = pipeline.check(claim)
                prediction = Prediction(
                    claim_id=claim.id,
                    verdict=result.verdict,
                    evidence_available=result.evidence_available,
                )
            except StageError as exc:
                log.warning("claim %s failed at stage %s: %s", claim.id, exc.stage, exc)
                prediction = Prediction(claim_id=claim.id, verdict=None, evidence_available=True)
        predictions.append(prediction)
        per_claim.append(
            {
                "claim_id": claim.id,
                "gold": record.gold_verdict.value,
                "predicted": prediction.verdict.label.value if prediction.verdict else None,
                "evidence_available": prediction.evidence_available,
            }
        )

    report = score_verification(predictions, list(gold), exclude_no_evidence)
    rows = [("accuracy", _fmt(report.accuracy), f"{report.n}")]
    if exclude_no_evidence:
        rows.append(
            ("accuracy w/o Irrelevant", _fmt(report.accuracy_wo_irrelevant),
             f"{report.n - report.n_excluded}")
        )
    table = format_table(("metric", "value", "n"), rows)
    return EvalReport(
        suite="verify",
        table=table,
        data={
            "mode": "naive" if naive else "pipeline",
            "accuracy": report.accuracy,
            "accuracy_wo_irrelevant": report.accuracy_wo_irrelevant,
            "n": report.n,
            "n_excluded": report.n_excluded,
            "n_irrelevant_predictions": report.n_irrelevant_predictions,
            "confusion": {f"{g}|{p}": c for (g, p), c in sorted(report.confusion.items())},
            "per_claim": per_claim,
        },
    )


# --- survey -----------------------------------------------------------------


def eval_survey(pipeline: Pipeline, claims: Sequence[Claim]) -> EvalReport:
    """Frame-distribution survey over a claim corpus."""
    distribution = survey_frames(pipeline.parser, pipeline.catalog, claims)
    rows = [
        (name, str(count))
        for name, count in sorted(
            distribution.counts.items(), key=lambda kv: (-kv[1], kv[0])
        )
    ]
    table = format_table(("frame", "count"), rows)
    summary = (
        f"claims: {distribution.total_claims}"
        f"  avg frames/claim: {distribution.avg_frames_per_claim:.4f}"
        f"  failures: {distribution.n_failures}\n"
    )
    return EvalReport(
        suite="survey",
        table=table + summary,
        data={
            "counts": dict(distribution.counts),
            "total_claims": distribution.total_claims,
            "avg_frames_per_claim": distribution.avg_frames_per_claim,
            "n_failures": distribution.n_failures,
        },
    )
