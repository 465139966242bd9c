#!/usr/bin/env python3
"""Sanity-check the committed fixtures against the properties the tests rely on.

Prints a diagnostic per property and exits nonzero on the first violation.
Run after tools/make_fixtures.py.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

from framecheck.catalog import load_catalog
from framecheck.congress import ingest_congress, issue_query, lookup_votes, match_agent
from framecheck.fsp import LexicalBackend, parse_claim
from framecheck.model import load_gold_records
from framecheck.oecd.store import load_store, table_documents
from framecheck.pipeline import first_agent_surface, route_claim, vote_issue_query, Route
from framecheck.retrieval import (
    Bm25Backend,
    Query,
    QueryRepresentation,
    StubEmbeddingBackend,
    build_query,
    recall_at_k,
    retrieve_top_k,
)

ROOT = Path(__file__).resolve().parents[1]
FIX = ROOT / "tests" / "fixtures"

FAILURES = []


def check(label: str, ok: bool, detail: str = "") -> None:
    mark = "ok  " if ok else "FAIL"
    print(f"[{mark}] {label}" + (f"  ({detail})" if detail else ""))
    if not ok:
        FAILURES.append(label)


def main() -> None:
    catalog = load_catalog()
    backend = LexicalBackend()

    # --- small congress corpus ---
    small = ingest_congress(FIX / "congress_small")
    counts = small.counts()
    check("small counts 6/4/10",
          counts == {"members": 4, "bills": 6, "rollcalls": 10, "votes": 9},
          str(counts))
    docs = small.bill_documents()
    bm25 = Bm25Backend(docs)
    ranking = retrieve_top_k(bm25, docs, issue_query("the bipartisan Violence Against Women Act"), 3)
    check("small VAWA issue query -> s1925-112 top-1",
          ranking.ids()[0] == "s1925-112", str(ranking.ranked))
    rubio = small.get_member("R000595")
    lookups = {v.bill_id: v for v in lookup_votes(small, rubio, ["s744-113", "hr1-115", "s1925-112"])}
    check("small s744 latest non-passage rollcall",
          lookups["s744-113"].rollcall_id == "rc-s744-113-2"
          and lookups["s744-113"].position == "Yea", str(lookups["s744-113"]))
    check("small hr1-115 prefers passage over later recommit",
          lookups["hr1-115"].rollcall_id == "rc-hr1-115-1"
          and lookups["hr1-115"].position == "Yea", str(lookups["hr1-115"]))
    check("small s1925 passage Nay",
          lookups["s1925-112"].rollcall_id == "rc-s1925-112-2"
          and lookups["s1925-112"].position == "Nay", str(lookups["s1925-112"]))

    # --- main congress corpus + agent cases ---
    store = ingest_congress(FIX / "congress")
    counts = store.counts()
    check("main counts", counts == {"members": 16, "bills": 50, "rollcalls": 6, "votes": 4},
          str(counts))
    cases = json.loads((FIX / "agents" / "cases.json").read_text())
    check("agent case count is 25", len(cases) == 25, str(len(cases)))
    n_ok = 0
    for case in cases:
        try:
            got = match_agent(store, case["surface"]).bioguide_id
        except Exception as exc:  # noqa: BLE001 - diagnostic tool
            check(f"agent {case['surface']!r}", False, f"error: {exc}")
            continue
        ok = got == case["bioguide_id"]
        n_ok += ok
        if not ok:
            check(f"agent {case['surface']!r}", False, f"got {got}")
    check("agent cases resolve 25/25", n_ok == len(cases), f"{n_ok}/{len(cases)}")

    # --- vote gold: parsing, routing, and retrieval ---
    vote_gold = load_gold_records(FIX / "gold" / "vote_gold.jsonl")
    docs = store.bill_documents()
    backends = {"bm25": Bm25Backend(docs), "stub": StubEmbeddingBackend()}
    agent_expect = {
        "v1": "R000595", "v2": "G000386", "v3": "S000033", "v4": "C001098",
        "v5": "B000444", "v6": "S000148", "v7": "D000563", "v8": "M000639",
        "v9": "U000039", "v10": "R000595", "v11": "W000817", "v12": "R000615",
        "v13": "K000393", "v14": "S000033", "v15": "D000621", "v16": "C001041",
        "v17": "G000386", "v18": "R000595", "v19": "U000039", "v20": "W000817",
    }
    recalls = {name: {"fe": [], "claim": []} for name in backends}
    for record in vote_gold:
        parsed = parse_claim(backend, catalog, record.claim)
        cid = record.claim.id
        check(f"{cid} routes to vote", route_claim(parsed) is Route.VOTE)
        query = vote_issue_query(parsed)
        check(f"{cid} issue query extracted", not query.fell_back, query.text)
        surface = first_agent_surface(parsed)
        try:
            got = match_agent(store, surface).bioguide_id if surface else None
        except Exception as exc:  # noqa: BLE001
            got = f"error: {exc}"
        check(f"{cid} agent {surface!r}", got == agent_expect[cid], str(got))
        gold_ids = set(record.gold_bill_ids)
        full = Query(text=record.claim.text, representation=QueryRepresentation.FULL_CLAIM)
        for name, sb in backends.items():
            r_fe = recall_at_k(retrieve_top_k(sb, docs, query, 10), gold_ids)
            r_full = recall_at_k(retrieve_top_k(sb, docs, full, 10), gold_ids)
            recalls[name]["fe"].append(r_fe)
            recalls[name]["claim"].append(r_full)
            if r_fe < 1.0 or name == "stub" and r_fe < r_full:
                print(f"    note {cid} [{name}] fe={r_fe:.2f} full={r_full:.2f} "
                      f"gold={sorted(gold_ids)}")
    for name in backends:
        fe = sum(recalls[name]["fe"]) / len(recalls[name]["fe"])
        full = sum(recalls[name]["claim"]) / len(recalls[name]["claim"])
        check(f"vote recall@10 [{name}] fe >= full", fe >= full,
              f"fe={fe:.4f} full={full:.4f}")

    # v1/v2 need their gold bills in the BM25 top-10 for the end-to-end runs
    for cid, gold in (("v1", {"s1925-112"}),
                      ("v2", {"s610-117", "s1301-117", "hr1868-117"})):
        record = next(r for r in vote_gold if r.claim.id == cid)
        parsed = parse_claim(backend, catalog, record.claim)
        ranked = retrieve_top_k(backends["bm25"], docs, vote_issue_query(parsed), 10).ids()
        check(f"{cid} gold bills all in bm25 top-10", gold <= set(ranked), str(ranked))

    # --- statistics tables ---
    tables = load_store(FIX / "oecd")
    descriptors = tables.descriptors()
    check("oecd descriptor count is 12", len(descriptors) == 12, str(len(descriptors)))
    check("oecd data-backed count is 5", len(tables.table_ids()) == 5,
          str(tables.table_ids()))
    oecd_gold = load_gold_records(FIX / "gold" / "oecd_gold.jsonl")
    docs = table_documents(descriptors)
    backends = {"bm25": Bm25Backend(docs), "stub": StubEmbeddingBackend()}
    recalls = {name: {"fe": [], "claim": []} for name in backends}
    for record in oecd_gold:
        parsed = parse_claim(backend, catalog, record.claim)
        cid = record.claim.id
        check(f"{cid} routes to oecd", route_claim(parsed) is Route.OECD,
              str([f.frame_name for f in parsed.frames]))
        query = build_query(parsed, catalog, QueryRepresentation.FRAME_ELEMENTS)
        check(f"{cid} fe query extracted", not query.fell_back,
              f"{query.source_frame}: {query.text!r}")
        gold_ids = set(record.gold_table_ids)
        full = Query(text=record.claim.text, representation=QueryRepresentation.FULL_CLAIM)
        for name, sb in backends.items():
            r_fe = recall_at_k(retrieve_top_k(sb, docs, query, 5), gold_ids)
            r_full = recall_at_k(retrieve_top_k(sb, docs, full, 5), gold_ids)
            recalls[name]["fe"].append(r_fe)
            recalls[name]["claim"].append(r_full)
            if r_fe < 1.0 or name == "stub" and r_fe < r_full:
                print(f"    note {cid} [{name}] fe={r_fe:.2f} full={r_full:.2f} "
                      f"gold={sorted(gold_ids)} query={query.text!r}")
    for name in backends:
        fe = sum(recalls[name]["fe"]) / len(recalls[name]["fe"])
        full = sum(recalls[name]["claim"]) / len(recalls[name]["claim"])
        check(f"oecd recall@5 [{name}] fe >= full", fe >= full,
              f"fe={fe:.4f} full={full:.4f}")

    # oc1 (the end-to-end statistics claim) must rank its table first for both
    # representations so the recorded plan stays on life_expectancy
    record = next(r for r in oecd_gold if r.claim.id == "oc1")
    parsed = parse_claim(backend, catalog, record.claim)
    q = build_query(parsed, catalog, QueryRepresentation.FRAME_ELEMENTS)
    ranked = retrieve_top_k(backends["stub"], docs, q, 5).ids()
    check("oc1 life_expectancy in stub top-5 and data-backed first",
          "life_expectancy" in ranked, str(ranked))

    # --- parse gold ---
    fsp_gold = load_gold_records(FIX / "gold" / "fsp_gold.jsonl")
    check("fsp gold has 4 records with frames",
          len(fsp_gold) == 4 and all(r.gold_frames is not None for r in fsp_gold))

    if FAILURES:
        print(f"\n{len(FAILURES)} failing checks")
        sys.exit(1)
    print("\nall fixture checks passed")


if __name__ == "__main__":
    main()
