"""Congressional voting-record store and the member/bill/vote lookups.

The store ingests JSONL dumps of members, bills, roll calls, and votes into
sqlite. Member matching runs a fixed pipeline: nickname table, person-name
extraction, exact match, substring match, then token-level matching with
formal-name expansions; ambiguity resolves to the member whose latest term
started most recently.
"""

from __future__ import annotations

import hashlib
import json
import logging
import re
import sqlite3
from dataclasses import dataclass, field
from datetime import date
from importlib import resources
from pathlib import Path
from typing import Callable, Sequence

from .model import DataError, Span
from .retrieval import (
    Bm25Backend,
    Document,
    Query,
    QueryRepresentation,
    RetrievalResult,
    SimilarityBackend,
    retrieve_top_k,
)
from .text import HONORIFICS, capitalized_runs, strip_possessive, tokens

log = logging.getLogger(__name__)

MIN_CONGRESS = 93  # electronic roll-call coverage starts here (1973)

_BILL_ID_RE = re.compile(r"^(hr|s|hjres|sjres|hconres|sconres|hres|sres)(\d+)-(\d+)$")
_DATE_RE = re.compile(r"^\d{4}-\d{2}-\d{2}$")

YEA = "Yea"
NAY = "Nay"
PRESENT = "Present"
NOT_VOTING = "Not Voting"

_POSITION_ALIASES = {
    "yea": YEA, "yes": YEA, "aye": YEA, "y": YEA,
    "nay": NAY, "no": NAY, "n": NAY,
    "present": PRESENT,
    "not voting": NOT_VOTING, "notvoting": NOT_VOTING, "absent": NOT_VOTING,
}


def parse_position(raw: str) -> str | None:
    return _POSITION_ALIASES.get(raw.strip().lower())


class MemberNotFoundError(LookupError):
    """No member matched the agent surface at any pipeline stage."""

    def __init__(self, surface: str, tried: Sequence[str]):
        super().__init__(f"no member matches {surface!r} (tried: {', '.join(tried)})")
        self.surface = surface
        self.tried = tuple(tried)


@dataclass(frozen=True)
class Term:
    start: date
    end: date
    chamber: str


@dataclass(frozen=True)
class Member:
    bioguide_id: str
    full_name: str
    preferred_names: tuple[str, ...] = ()
    terms: tuple[Term, ...] = ()

    @property
    def latest_term_start(self) -> date:
        return max(t.start for t in self.terms)


@dataclass(frozen=True)
class Bill:
    bill_id: str
    congress: int
    title: str
    summary: str = ""


@dataclass(frozen=True)
class RollCall:
    rollcall_id: str
    bill_id: str
    date: date
    question: str = ""


@dataclass(frozen=True)
class VoteLookup:
    """A member's position on one bill; position None means no vote recorded."""

    bill_id: str
    rollcall_id: str | None
    position: str | None


@dataclass
class IngestReport:
    counts: dict[str, int] = field(default_factory=dict)
    rejected: list[tuple[str, int, str]] = field(default_factory=list)  # (file, line, reason)

    def n_rejected(self) -> int:
        return len(self.rejected)


_SCHEMA = """
CREATE TABLE members (
    bioguide_id TEXT PRIMARY KEY,
    full_name TEXT NOT NULL,
    preferred_names TEXT NOT NULL,
    terms TEXT NOT NULL,
    latest_term_start TEXT NOT NULL
);
CREATE TABLE bills (
    bill_id TEXT PRIMARY KEY,
    congress INTEGER NOT NULL,
    title TEXT NOT NULL,
    summary TEXT NOT NULL DEFAULT ''
);
CREATE TABLE rollcalls (
    rollcall_id TEXT PRIMARY KEY,
    bill_id TEXT NOT NULL,
    date TEXT NOT NULL,
    question TEXT NOT NULL DEFAULT ''
);
CREATE TABLE votes (
    bioguide_id TEXT NOT NULL,
    rollcall_id TEXT NOT NULL,
    position TEXT NOT NULL,
    PRIMARY KEY (bioguide_id, rollcall_id)
);
CREATE INDEX idx_rollcalls_bill ON rollcalls (bill_id);
"""


class CongressStore:
    """Read interface over the ingested tables. Create via ingest_congress()."""

    def __init__(self, conn: sqlite3.Connection, report: IngestReport):
        self._conn = conn
        self.report = report

    def close(self) -> None:
        self._conn.close()

    def counts(self) -> dict[str, int]:
        out = {}
        for table in ("members", "bills", "rollcalls", "votes"):
            (n,) = self._conn.execute(f"SELECT COUNT(*) FROM {table}").fetchone()
            out[table] = n
        return out

    def bills(self) -> list[Bill]:
        rows = self._conn.execute(
            "SELECT bill_id, congress, title, summary FROM bills ORDER BY bill_id"
        ).fetchall()
        return [Bill(*row) for row in rows]

    def get_bill(self, bill_id: str) -> Bill | None:
        row = self._conn.execute(
            "SELECT bill_id, congress, title, summary FROM bills WHERE bill_id = ?",
            (bill_id,),
        ).fetchone()
        return Bill(*row) if row else None

    def members(self) -> list[Member]:
        rows = self._conn.execute(
            "SELECT bioguide_id, full_name, preferred_names, terms FROM members"
            " ORDER BY bioguide_id"
        ).fetchall()
        return [self._member_from_row(row) for row in rows]

    def get_member(self, bioguide_id: str) -> Member | None:
        row = self._conn.execute(
            "SELECT bioguide_id, full_name, preferred_names, terms FROM members"
            " WHERE bioguide_id = ?",
            (bioguide_id,),
        ).fetchone()
        return self._member_from_row(row) if row else None

    @staticmethod
    def _member_from_row(row) -> Member:
        bioguide_id, full_name, preferred_json, terms_json = row
        terms = tuple(
            Term(date.fromisoformat(t["start"]), date.fromisoformat(t["end"]), t["chamber"])
            for t in json.loads(terms_json)
        )
        return Member(
            bioguide_id=bioguide_id,
            full_name=full_name,
            preferred_names=tuple(json.loads(preferred_json)),
            terms=terms,
        )

    def rollcalls_for_bill(self, bill_id: str) -> list[RollCall]:
        rows = self._conn.execute(
            "SELECT rollcall_id, bill_id, date, question FROM rollcalls"
            " WHERE bill_id = ? ORDER BY date, rollcall_id",
            (bill_id,),
        ).fetchall()
        return [RollCall(r[0], r[1], date.fromisoformat(r[2]), r[3]) for r in rows]

    def vote_position(self, bioguide_id: str, rollcall_id: str) -> str | None:
        row = self._conn.execute(
            "SELECT position FROM votes WHERE bioguide_id = ? AND rollcall_id = ?",
            (bioguide_id, rollcall_id),
        ).fetchone()
        return row[0] if row else None

    def bill_documents(self, include_summary: bool = True) -> list[Document]:
        """Bills as retrieval documents: title, optionally followed by summary."""
        docs = []
        for bill in self.bills():
            text = bill.title
            if include_summary and bill.summary:
                text = f"{bill.title}. {bill.summary}"
            docs.append(Document(id=bill.bill_id, text=text))
        return docs

    def checksum(self) -> str:
        """Content digest over all rows in deterministic order."""
        payload = []
        for table, order in (
            ("members", "bioguide_id"),
            ("bills", "bill_id"),
            ("rollcalls", "rollcall_id"),
            ("votes", "bioguide_id, rollcall_id"),
        ):
            payload.append(
                self._conn.execute(f"SELECT * FROM {table} ORDER BY {order}").fetchall()
            )
        blob = json.dumps(payload, sort_keys=True, ensure_ascii=True)
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def _parse_date(raw: object, what: str) -> date:
    if not isinstance(raw, str) or not _DATE_RE.match(raw):
        raise ValueError(f"{what} must be an ISO date, got {raw!r}")
    return date.fromisoformat(raw)


def _iter_jsonl(path: Path):
    with path.open(encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            if line.strip():
                yield lineno, line


def ingest_congress(src_dir: str | Path, db_path: str | Path = ":memory:") -> CongressStore:
    """Load members/bills/rollcalls/votes JSONL files into a fresh sqlite store.

    Bad records are skipped and reported with file and line, never fatal.
    Missing files mean zero records of that kind. Re-ingesting the same
    directory yields a byte-identical store (checksum-stable).
    """
    src = Path(src_dir)
    if not src.is_dir():
        raise DataError(f"not a directory: {src}")
    conn = sqlite3.connect(str(db_path))
    for table in ("members", "bills", "rollcalls", "votes"):
        conn.execute(f"DROP TABLE IF EXISTS {table}")
    conn.execute("DROP INDEX IF EXISTS idx_rollcalls_bill")
    conn.executescript(_SCHEMA)

    report = IngestReport(counts={"members": 0, "bills": 0, "rollcalls": 0, "votes": 0})

    def reject(fname: str, lineno: int, reason: str) -> None:
        report.rejected.append((fname, lineno, reason))
        log.info("%s:%d rejected: %s", fname, lineno, reason)

    def records(fname: str):
        path = src / fname
        if not path.is_file():
            return
        for lineno, line in _iter_jsonl(path):
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                reject(fname, lineno, f"invalid JSON: {exc}")
                continue
            if not isinstance(record, dict):
                reject(fname, lineno, "record is not an object")
                continue
            yield lineno, record

    for lineno, rec in records("members.jsonl"):
        try:
            bioguide = str(rec["bioguide_id"])
            full_name = str(rec["full_name"]).strip()
            if not bioguide or not full_name:
                raise ValueError("bioguide_id and full_name are required")
            terms_raw = rec.get("terms") or []
            if not terms_raw:
                raise ValueError("at least one term is required")
            terms = []
            for t in terms_raw:
                start = _parse_date(t.get("start"), "term start")
                end = _parse_date(t.get("end"), "term end")
                if end <= start:
                    raise ValueError(f"term end {end} not after start {start}")
                terms.append({"start": t["start"], "end": t["end"],
                              "chamber": str(t.get("chamber", "senate"))})
            preferred = [str(p) for p in rec.get("preferred_names") or []]
            conn.execute(
                "INSERT INTO members VALUES (?, ?, ?, ?, ?)",
                (bioguide, full_name, json.dumps(preferred),
                 json.dumps(terms), max(t["start"] for t in terms)),
            )
            report.counts["members"] += 1
        except sqlite3.IntegrityError:
            reject("members.jsonl", lineno, f"duplicate bioguide_id {rec.get('bioguide_id')!r}")
        except (KeyError, ValueError, TypeError) as exc:
            reject("members.jsonl", lineno, str(exc))

    for lineno, rec in records("bills.jsonl"):
        try:
            bill_id = str(rec["bill_id"]).lower()
            m = _BILL_ID_RE.match(bill_id)
            if not m:
                raise ValueError(f"malformed bill_id {rec['bill_id']!r}")
            congress = int(m.group(3))
            if congress < MIN_CONGRESS:
                raise ValueError(f"congress {congress} predates roll-call coverage")
            title = str(rec["title"]).strip()
            if not title:
                raise ValueError("title is required")
            conn.execute(
                "INSERT INTO bills VALUES (?, ?, ?, ?)",
                (bill_id, congress, title, str(rec.get("summary", ""))),
            )
            report.counts["bills"] += 1
        except sqlite3.IntegrityError:
            reject("bills.jsonl", lineno, f"duplicate bill_id {rec.get('bill_id')!r}")
        except (KeyError, ValueError, TypeError) as exc:
            reject("bills.jsonl", lineno, str(exc))

    for lineno, rec in records("rollcalls.jsonl"):
        try:
            rollcall_id = str(rec["rollcall_id"])
            bill_id = str(rec["bill_id"]).lower()
            when = _parse_date(rec.get("date"), "rollcall date")
            if not rollcall_id:
                raise ValueError("rollcall_id is required")
            conn.execute(
                "INSERT INTO rollcalls VALUES (?, ?, ?, ?)",
                (rollcall_id, bill_id, when.isoformat(), str(rec.get("question", ""))),
            )
            report.counts["rollcalls"] += 1
        except sqlite3.IntegrityError:
            reject("rollcalls.jsonl", lineno, f"duplicate rollcall_id {rec.get('rollcall_id')!r}")
        except (KeyError, ValueError, TypeError) as exc:
            reject("rollcalls.jsonl", lineno, str(exc))

    for lineno, rec in records("votes.jsonl"):
        try:
            bioguide = str(rec["bioguide_id"])
            rollcall_id = str(rec["rollcall_id"])
            position = parse_position(str(rec.get("position", "")))
            if position is None:
                raise ValueError(f"unknown vote position {rec.get('position')!r}")
            conn.execute(
                "INSERT INTO votes VALUES (?, ?, ?)", (bioguide, rollcall_id, position)
            )
            report.counts["votes"] += 1
        except sqlite3.IntegrityError:
            reject("votes.jsonl", lineno,
                   f"duplicate vote for ({rec.get('bioguide_id')!r}, {rec.get('rollcall_id')!r})")
        except (KeyError, ValueError, TypeError) as exc:
            reject("votes.jsonl", lineno, str(exc))

    conn.commit()
    return CongressStore(conn, report)


# --- member matching --------------------------------------------------------


def _load_packaged_json(filename: str) -> dict:
    path = resources.files("framecheck.data") / filename
    return json.loads(path.read_text(encoding="utf-8"))


def default_nickname_map() -> dict[str, str]:
    return {k.lower(): v for k, v in _load_packaged_json("nicknames.json").items()}


def default_preferred_map() -> dict[str, list[str]]:
    return {
        k.lower(): [v.lower() for v in vals]
        for k, vals in _load_packaged_json("preferred_names.json").items()
    }


def extract_person_name(surface: str) -> str | None:
    """Default extractor: the first capitalized-token run, honorifics stripped."""
    runs = capitalized_runs(surface)
    if not runs:
        return None
    span: Span = runs[0]
    run = [t for t in tokens(surface) if span.start <= t.start < span.end]
    # "Florida Sen. Marco Rubio" is a single run; keep what follows the last honorific
    for i in range(len(run) - 1, -1, -1):
        if run[i].text in HONORIFICS:
            run = run[i + 1 :]
            break
    if not run:
        return None
    return surface[run[0].start : strip_possessive(run[-1]).end]


def _normalize(surface: str) -> str:
    cleaned = re.sub(r"[^a-z0-9'\s]", " ", surface.lower().replace("’", "'"))
    return " ".join(cleaned.split())


def _words(text: str) -> set[str]:
    return set(_normalize(text).replace("'", "").split())


def _pick(candidates: list[Member], stage: str, surface: str) -> Member:
    if len(candidates) > 1:
        candidates = sorted(
            candidates, key=lambda m: (m.latest_term_start, m.bioguide_id), reverse=True
        )
        log.info(
            "agent %r ambiguous at stage %s (%d candidates); choosing most recent %s",
            surface, stage, len(candidates), candidates[0].full_name,
        )
    return candidates[0]


def match_agent(
    store: CongressStore,
    surface: str,
    nickname_map: dict[str, str] | None = None,
    preferred_map: dict[str, list[str]] | None = None,
    extractor: Callable[[str], str | None] | None = None,
) -> Member:
    """Resolve an agent surface string to a member record.

    Stages, in order: (1) nickname table lookup, (2) person-name extraction
    from the surface, (3) case-insensitive exact full-name match,
    (4) substring match against full names, (5) all-words match where each
    name token may also match via its formal expansions against the member's
    full and preferred names. First stage with candidates wins; ties go to
    the member whose latest term started most recently.
    """
    nickname_map = default_nickname_map() if nickname_map is None else nickname_map
    preferred_map = default_preferred_map() if preferred_map is None else preferred_map
    extractor = extract_person_name if extractor is None else extractor

    tried = []
    name = surface.strip()

    mapped = nickname_map.get(_normalize(name))
    if mapped is not None:
        name = mapped
        tried.append(f"nickname -> {mapped!r}")
    else:
        tried.append("nickname")
        extracted = extractor(name)
        if extracted:
            name = extracted.strip()
        tried.append(f"extract -> {name!r}")
    if not name:
        raise MemberNotFoundError(surface, tried)

    members = store.members()
    norm = _normalize(name)

    exact = [m for m in members if _normalize(m.full_name) == norm]
    if exact:
        return _pick(exact, "exact", surface)
    tried.append("exact")

    fuzzy = [m for m in members if norm and norm in _normalize(m.full_name)]
    if fuzzy:
        return _pick(fuzzy, "substring", surface)
    tried.append("substring")

    query_words = _words(name)
    if query_words:
        expanded = []
        for member in members:
            target = _words(member.full_name)
            for preferred in member.preferred_names:
                target |= _words(preferred)
            ok = all(
                word in target or any(v in target for v in preferred_map.get(word, ()))
                for word in query_words
            )
            if ok:
                expanded.append(member)
        if expanded:
            return _pick(expanded, "expanded", surface)
    tried.append("expanded")

    raise MemberNotFoundError(surface, tried)


# --- bill and vote lookup ---------------------------------------------------


def match_bills(
    store: CongressStore,
    query: Query,
    k: int = 10,
    backend: SimilarityBackend | None = None,
    include_summary: bool = True,
) -> RetrievalResult:
    """Top-K bills for an issue query; BM25 over title+summary by default."""
    docs = store.bill_documents(include_summary=include_summary)
    if backend is None:
        backend = Bm25Backend(docs)
    return retrieve_top_k(backend, docs, query, k)


def issue_query(issue_text: str) -> Query:
    return Query(text=issue_text, representation=QueryRepresentation.FRAME_ELEMENTS)


def lookup_votes(
    store: CongressStore, member: Member, bill_ids: Sequence[str]
) -> list[VoteLookup]:
    """The member's position on each bill, in input order.

    Among a bill's roll calls, prefer those whose question mentions passage;
    otherwise take the latest by date. A missing vote on the chosen roll
    call is reported as position None, never silently dropped.
    """
    out = []
    for bill_id in bill_ids:
        rollcalls = store.rollcalls_for_bill(bill_id)
        if not rollcalls:
            out.append(VoteLookup(bill_id=bill_id, rollcall_id=None, position=None))
            continue
        passage = [rc for rc in rollcalls if "passage" in rc.question.lower()]
        pool = passage or rollcalls
        chosen = max(pool, key=lambda rc: (rc.date, rc.rollcall_id))
        position = store.vote_position(member.bioguide_id, chosen.rollcall_id)
        out.append(
            VoteLookup(bill_id=bill_id, rollcall_id=chosen.rollcall_id, position=position)
        )
    return out
