"""Command-line front end.

Exit codes: 0 success; 1 configuration or data error; 2 claim evokes no
catalog frame (unroutable); 3 and up, pipeline stage failure (3 parse,
4 agent, 5 retrieve, 6 votes, 7 align, 8 plan, 9 execute, 10 verify).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .catalog import CatalogError
from .congress import ingest_congress
from .evalharness import (
    EvalReport,
    eval_fsp,
    eval_retrieval,
    eval_survey,
    eval_verify,
)
from .gateway import GatewayConfigError, GatewayError, TranscriptMissError
from .model import (
    Claim,
    DataError,
    EvaluationError,
    load_claims,
    load_gold_records,
)
from .oecd.planner import PlanStage, plan_query
from .oecd.query import NotAvailable, execute_plan
from .oecd.schema_doc import schema_doc_for
from .oecd.store import load_store
from .pipeline import (
    STAGES,
    FactCheckResult,
    Pipeline,
    PipelineConfig,
    Route,
    StageError,
    _plan_to_dict,
    load_config,
    vote_issue_query,
)
from .retrieval import (
    Query,
    QueryRepresentation,
    build_query,
    retrieve_top_k,
)

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_UNROUTABLE = 2
EXIT_STAGE_BASE = 3


def stage_exit_code(stage: str) -> int:
    try:
        return EXIT_STAGE_BASE + STAGES.index(stage)
    except ValueError:
        return EXIT_STAGE_BASE + len(STAGES)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="framecheck",
        description="Frame-driven fact checking over voting records and statistics tables.",
        epilog=__doc__.split("\n\n")[1],
    )
    parser.add_argument("--config", metavar="PATH", help="pipeline config (YAML)")
    parser.add_argument("--providers", metavar="PATH", help="provider config (YAML)")
    parser.add_argument("--seed", type=int, default=None, help="override the config seed")
    parser.add_argument(
        "--frame-catalog", metavar="PATH", help="override the frame catalog path"
    )
    parser.add_argument(
        "-v", "--verbose", action="count", default=0, help="-v info, -vv debug"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_ingest = sub.add_parser("ingest", help="load a data directory into a store")
    p_ingest.add_argument("domain", choices=("congress", "oecd"))
    p_ingest.add_argument("--src", required=True, metavar="DIR")
    p_ingest.add_argument("--db", default=":memory:", metavar="PATH",
                          help="sqlite path for congress (default in-memory)")

    p_parse = sub.add_parser("parse", help="frame-parse a claim")
    p_parse.add_argument("--claim", required=True)
    p_parse.add_argument("--id", default="claim-1")
    p_parse.add_argument("--json", action="store_true")

    p_retrieve = sub.add_parser("retrieve", help="rank evidence for a claim")
    p_retrieve.add_argument("--claim", required=True)
    p_retrieve.add_argument("--domain", required=True, choices=("vote", "oecd"))
    p_retrieve.add_argument("--k", type=int, default=None)
    p_retrieve.add_argument(
        "--repr", default="fe", choices=("claim", "fe"), dest="representation"
    )

    p_plan = sub.add_parser("plan", help="plan a table query for a claim")
    p_plan.add_argument("--claim", required=True)
    p_plan.add_argument("--table", required=True, metavar="TABLE_ID")
    p_plan.add_argument("--dry-run", action="store_true",
                        help="print the validated plan without executing it")

    p_check = sub.add_parser("check", help="fact-check one claim end to end")
    p_check.add_argument("--claim", required=True)
    p_check.add_argument("--id", default="claim-1")
    p_check.add_argument("--json", action="store_true")

    p_eval = sub.add_parser("eval", help="run an evaluation suite against gold data")
    p_eval.add_argument("suite", choices=("fsp", "retrieval", "verify"))
    p_eval.add_argument("--gold", required=True, metavar="JSONL")
    p_eval.add_argument("--domain", choices=("vote", "oecd"),
                        help="required for the retrieval suite")
    p_eval.add_argument("--wo-irrelevant", action="store_true",
                        help="also report accuracy excluding no-evidence cases")
    p_eval.add_argument("--naive", action="store_true",
                        help="verify from claim text alone (baseline)")
    p_eval.add_argument("--out", metavar="JSON", help="also write the report as JSON")

    p_survey = sub.add_parser("survey", help="frame distribution over a claim corpus")
    p_survey.add_argument("--claims", required=True, metavar="JSONL")
    p_survey.add_argument("--out", metavar="JSON")

    return parser


def _load_pipeline(args) -> Pipeline:
    if args.config:
        config = load_config(args.config, providers_path=args.providers, seed=args.seed)
    else:
        config = PipelineConfig()
        if args.seed is not None:
            config.seed = args.seed
    if args.frame_catalog:
        config.frame_catalog = Path(args.frame_catalog)
    return Pipeline(config)


def _emit_report(report: EvalReport, out: str | None) -> None:
    sys.stdout.write(report.table)
    if out:
        Path(out).write_text(
            json.dumps({"suite": report.suite, "data": report.data}, indent=2,
                       sort_keys=True) + "\n",
            encoding="utf-8",
        )


def _cmd_ingest(args) -> int:
    if args.domain == "congress":
        store = ingest_congress(args.src, args.db)
        counts = store.counts()
        for table in ("members", "bills", "rollcalls", "votes"):
            print(f"{table}: {counts[table]}")
        rejected = store.report.n_rejected()
        if rejected:
            print(f"rejected records: {rejected}")
            for fname, lineno, reason in store.report.rejected:
                print(f"  {fname}:{lineno}: {reason}")
        print(f"checksum: {store.checksum()}")
        return EXIT_OK
    store = load_store(args.src)
    ids = store.table_ids()
    catalog_only = [d.table_id for d in store.descriptors() if d.table_id not in ids]
    print(f"tables with data: {len(ids)}")
    for table_id in ids:
        table = store.get_table(table_id)
        print(f"  {table_id}: {len(table.rows)} rows")
    if catalog_only:
        print(f"catalog-only descriptors: {len(catalog_only)}")
        for table_id in catalog_only:
            print(f"  {table_id}")
    print(f"checksum: {store.checksum()}")
    return EXIT_OK


def _cmd_parse(args, pipeline: Pipeline) -> int:
    claim = Claim(id=args.id, text=args.claim)
    parsed = pipeline.parse(claim)
    if args.json:
        from .model import frame_to_dict

        print(json.dumps([frame_to_dict(f) for f in parsed.frames], indent=2))
        return EXIT_OK
    if not parsed.frames:
        print("(no frames)")
        return EXIT_OK
    for frame in parsed.frames:
        target = frame.target.slice(claim.text)
        print(f"{frame.frame_name}  target={target!r} @ {frame.target.start}")
        for name, fe in sorted(frame.elements.items(), key=lambda kv: kv[1].span.start):
            print(f"  {name}: {fe.text!r}")
    return EXIT_OK


def _cmd_retrieve(args, pipeline: Pipeline) -> int:
    claim = Claim(id="claim-1", text=args.claim)
    parsed = pipeline.parse(claim)
    representation = (
        QueryRepresentation.FULL_CLAIM
        if args.representation == "claim"
        else QueryRepresentation.FRAME_ELEMENTS
    )
    if args.domain == "vote":
        if pipeline.congress is None:
            raise DataError("no congress store configured (set congress_dir in config)")
        docs = pipeline.congress.bill_documents(pipeline.config.include_bill_summary)
        k = args.k or pipeline.config.vote_k
        backend = pipeline._backend(pipeline.config.vote_backend, docs)
        query = (
            vote_issue_query(parsed)
            if representation is QueryRepresentation.FRAME_ELEMENTS
            else Query(text=claim.text, representation=representation)
        )
    else:
        if pipeline.tables is None:
            raise DataError("no statistics store configured (set oecd_dir in config)")
        from .oecd.store import table_documents

        docs = table_documents(pipeline.tables.descriptors())
        k = args.k or pipeline.config.oecd_k
        backend = pipeline._backend(pipeline.config.oecd_backend, docs)
        query = build_query(parsed, pipeline.catalog, representation)
    ranking = retrieve_top_k(backend, docs, query, k)
    print(f"query ({query.representation.value}): {query.text}")
    if query.fell_back:
        print("note: fell back to the full claim (no retrieval elements extracted)")
    for rank, (doc_id, score) in enumerate(ranking.ranked, start=1):
        print(f"{rank:2d}. {doc_id}  {score:.4f}")
    return EXIT_OK


def _cmd_plan(args, pipeline: Pipeline) -> int:
    if pipeline.tables is None:
        raise DataError("no statistics store configured (set oecd_dir in config)")
    if pipeline.chat is None:
        raise DataError("planning needs a chat provider")
    claim = Claim(id="claim-1", text=args.claim)
    table = pipeline.tables.get_table(args.table)
    schema = schema_doc_for(table, claim.text, seed=pipeline.config.seed)
    outcome = plan_query(
        pipeline.chat, claim, PlanStage.RETRIEVE, [schema], pipeline.tables
    )
    if isinstance(outcome, NotAvailable):
        print(f"not available: {outcome.reason}")
        return EXIT_OK
    print(json.dumps(_plan_to_dict(outcome), indent=2))
    if not args.dry_run:
        frame = execute_plan(table, outcome, row_cap=pipeline.config.row_cap)
        print()
        print(frame.to_tsv())
        if frame.truncated:
            print(f"(truncated at {pipeline.config.row_cap} rows)")
    return EXIT_OK


def _print_check_result(result: FactCheckResult) -> None:
    print(f"claim: {result.claim.text}")
    print(f"route: {result.route.value}")
    if result.parsed and result.parsed.frames:
        names = ", ".join(f.frame_name for f in result.parsed.frames)
        print(f"frames: {names}")
    if result.route is Route.UNROUTABLE:
        print(f"unroutable: {result.unavailable_reason}")
        return
    if not result.evidence_available:
        print(f"no evidence: {result.unavailable_reason}")
        return
    for ev in result.vote_evidence:
        print(
            f"evidence: {ev.bill.bill_id} ({ev.bill.title}) vote={ev.position}"
            f" -> {ev.alignment.label.value}"
        )
    for frame in result.table_evidence:
        print(f"evidence: table {frame.table_id}, {len(frame.rows)} rows")
        print(frame.to_tsv())
    if result.verdict is not None:
        print(f"verdict: {result.verdict.label.value}")
        if result.verdict.explanation:
            print(f"explanation: {result.verdict.explanation}")


def _cmd_check(args, pipeline: Pipeline) -> int:
    claim = Claim(id=args.id, text=args.claim)
    result = pipeline.check(claim)
    if args.json:
        print(json.dumps(result.to_dict(), indent=2, sort_keys=True))
    else:
        _print_check_result(result)
    if result.route is Route.UNROUTABLE:
        return EXIT_UNROUTABLE
    return EXIT_OK


def _cmd_eval(args, pipeline: Pipeline) -> int:
    gold = load_gold_records(args.gold)
    if args.suite == "fsp":
        report = eval_fsp(pipeline, gold)
    elif args.suite == "retrieval":
        if not args.domain:
            raise EvaluationError("eval retrieval requires --domain {vote|oecd}")
        report = eval_retrieval(pipeline, gold, args.domain)
    else:
        report = eval_verify(
            pipeline, gold,
            exclude_no_evidence=args.wo_irrelevant,
            naive=args.naive,
        )
    _emit_report(report, args.out)
    return EXIT_OK


def _cmd_survey(args, pipeline: Pipeline) -> int:
    claims = load_claims(args.claims)
    report = eval_survey(pipeline, claims)
    _emit_report(report, args.out)
    return EXIT_OK


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")

    try:
        if args.command == "ingest":
            return _cmd_ingest(args)
        pipeline = _load_pipeline(args)
        if args.command == "parse":
            return _cmd_parse(args, pipeline)
        if args.command == "retrieve":
            return _cmd_retrieve(args, pipeline)
        if args.command == "plan":
            return _cmd_plan(args, pipeline)
        if args.command == "check":
            return _cmd_check(args, pipeline)
        if args.command == "eval":
            return _cmd_eval(args, pipeline)
        if args.command == "survey":
            return _cmd_survey(args, pipeline)
        raise AssertionError(f"unhandled command {args.command}")
    except StageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return stage_exit_code(exc.stage)
    except TranscriptMissError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, CatalogError, EvaluationError, GatewayConfigError,
            GatewayError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
