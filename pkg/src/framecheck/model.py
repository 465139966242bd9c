"""Core domain types shared across the fact-checking pipeline.

Claims, frame instances with character-offset spans, the verdict scale,
and gold-record dataset IO (newline-delimited JSON, schema version 1).
All types are immutable values and safe to share between workers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import date
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping

SCHEMA_VERSION = 1


class DataError(ValueError):
    """A record violates the dataset schema or a domain invariant."""


class EvaluationError(ValueError):
    """Predictions and gold records cannot be aligned for scoring."""


class VerdictParseError(DataError):
    """A raw verdict string is not on the truth scale."""

    def __init__(self, raw: str):
        super().__init__(f"unrecognized verdict label: {raw!r}")
        self.raw = raw


class VerdictLabel(Enum):
    """Canonical truth scale; PantsOnFire is input-only, Irrelevant is Vote-pipeline-only."""

    TRUE = "True"
    MOSTLY_TRUE = "Mostly True"
    HALF_TRUE = "Half-True"
    MOSTLY_FALSE = "Mostly False"
    FALSE = "False"
    PANTS_ON_FIRE = "Pants on Fire"
    IRRELEVANT = "Irrelevant"


# Five-point scale used for scoring (after consolidation, no Irrelevant).
SCALE_5 = (
    VerdictLabel.TRUE,
    VerdictLabel.MOSTLY_TRUE,
    VerdictLabel.HALF_TRUE,
    VerdictLabel.MOSTLY_FALSE,
    VerdictLabel.FALSE,
)

_LABEL_BY_KEY = {
    "true": VerdictLabel.TRUE,
    "mostly true": VerdictLabel.MOSTLY_TRUE,
    "half true": VerdictLabel.HALF_TRUE,
    "mostly false": VerdictLabel.MOSTLY_FALSE,
    "false": VerdictLabel.FALSE,
    "pants on fire": VerdictLabel.PANTS_ON_FIRE,
    "irrelevant": VerdictLabel.IRRELEVANT,
}


def _normalize_label_key(raw: str) -> str:
    chars = [c if c.isalnum() else " " for c in raw.lower()]
    return " ".join("".join(chars).split())


def parse_verdict_label(raw: str) -> VerdictLabel:
    """Normalize a raw verdict string ("Mostly-True", "mostly true", ...) to the enum."""
    label = _LABEL_BY_KEY.get(_normalize_label_key(raw))
    if label is None:
        raise VerdictParseError(raw)
    return label


def render_verdict_label(label: VerdictLabel) -> str:
    return label.value


def consolidate_verdict(label: VerdictLabel) -> VerdictLabel:
    """Fold the input-only PantsOnFire rating into False; identity elsewhere."""
    if label is VerdictLabel.PANTS_ON_FIRE:
        return VerdictLabel.FALSE
    return label


@dataclass(frozen=True)
class Claim:
    """One claim record as fact-checked."""

    id: str
    text: str
    speaker: str | None = None
    claim_date: date | None = None
    source_url: str | None = None

    def __post_init__(self):
        if not self.text.strip():
            raise DataError(f"claim {self.id!r} has empty text")


@dataclass(frozen=True, order=True)
class Span:
    """Character offsets into a claim's text; start inclusive, end exclusive."""

    start: int
    end: int

    def __post_init__(self):
        if not (0 <= self.start < self.end):
            raise DataError(f"invalid span [{self.start}, {self.end})")

    def slice(self, text: str) -> str:
        return text[self.start : self.end]


@dataclass(frozen=True)
class FrameElement:
    """A realized frame element: its span and the surface text at that span."""

    span: Span
    text: str


@dataclass(frozen=True)
class FrameInstance:
    """An evoked frame: the target (frame-evoking word) plus its realized elements."""

    frame_name: str
    target: Span
    elements: Mapping[str, FrameElement] = field(default_factory=dict)

    def element_text(self, name: str) -> str | None:
        fe = self.elements.get(name)
        return fe.text if fe is not None else None


@dataclass(frozen=True)
class ParsedClaim:
    """A claim plus its frames, ordered by target position in the text."""

    claim: Claim
    frames: tuple[FrameInstance, ...] = ()

    def __post_init__(self):
        starts = [f.target.start for f in self.frames]
        if starts != sorted(starts):
            raise DataError(f"frames of claim {self.claim.id!r} out of target order")
        for frame in self.frames:
            check_frame_spans(self.claim.text, frame)


def check_frame_spans(text: str, frame: FrameInstance) -> None:
    """Assert the span round-trip invariant: text[span] == stored surface for every FE."""
    if frame.target.end > len(text):
        raise DataError(f"target span {frame.target} exceeds text length {len(text)}")
    for name, fe in frame.elements.items():
        if fe.span.end > len(text):
            raise DataError(f"FE {name!r} span {fe.span} exceeds text length {len(text)}")
        actual = fe.span.slice(text)
        if actual != fe.text:
            raise DataError(
                f"FE {name!r} surface {fe.text!r} != text at span {fe.span}: {actual!r}"
            )


def make_parsed_claim(claim: Claim, frames: Iterable[FrameInstance]) -> ParsedClaim:
    """Build a ParsedClaim with frames sorted into target order."""
    ordered = tuple(sorted(frames, key=lambda f: (f.target.start, f.target.end, f.frame_name)))
    return ParsedClaim(claim=claim, frames=ordered)


@dataclass(frozen=True)
class Verdict:
    """A verdict with its free-text explanation and the evidence it cites."""

    label: VerdictLabel
    explanation: str = ""
    evidence_refs: tuple[str, ...] = ()


@dataclass(frozen=True)
class GoldRecord:
    """A manually verified claim: gold verdict plus its evidence identifiers."""

    claim: Claim
    gold_verdict: VerdictLabel
    gold_bill_ids: tuple[str, ...] = ()
    gold_table_ids: tuple[str, ...] = ()
    gold_frames: tuple[FrameInstance, ...] | None = None

    def __post_init__(self):
        if bool(self.gold_bill_ids) == bool(self.gold_table_ids):
            raise DataError(
                f"gold record {self.claim.id!r} must carry exactly one of "
                "bill-id or table-id evidence"
            )


# --- serialization -----------------------------------------------------------


def claim_to_dict(claim: Claim) -> dict:
    out: dict = {"id": claim.id, "text": claim.text}
    if claim.speaker is not None:
        out["speaker"] = claim.speaker
    if claim.claim_date is not None:
        out["claim_date"] = claim.claim_date.isoformat()
    if claim.source_url is not None:
        out["source_url"] = claim.source_url
    return out


def claim_from_dict(d: Mapping) -> Claim:
    claim_date = d.get("claim_date")
    return Claim(
        id=str(d["id"]),
        text=d["text"],
        speaker=d.get("speaker"),
        claim_date=date.fromisoformat(claim_date) if claim_date else None,
        source_url=d.get("source_url"),
    )


def frame_to_dict(frame: FrameInstance) -> dict:
    return {
        "frame_name": frame.frame_name,
        "target": [frame.target.start, frame.target.end],
        "elements": {
            name: {"span": [fe.span.start, fe.span.end], "text": fe.text}
            for name, fe in frame.elements.items()
        },
    }


def frame_from_dict(d: Mapping) -> FrameInstance:
    return FrameInstance(
        frame_name=d["frame_name"],
        target=Span(*d["target"]),
        elements={
            name: FrameElement(span=Span(*fe["span"]), text=fe["text"])
            for name, fe in d.get("elements", {}).items()
        },
    )


def gold_record_to_dict(record: GoldRecord) -> dict:
    out = {
        "schema_version": SCHEMA_VERSION,
        "claim": claim_to_dict(record.claim),
        "gold_verdict": render_verdict_label(record.gold_verdict),
        "gold_bill_ids": list(record.gold_bill_ids),
        "gold_table_ids": list(record.gold_table_ids),
    }
    if record.gold_frames is not None:
        out["gold_frames"] = [frame_to_dict(f) for f in record.gold_frames]
    return out


def gold_record_from_dict(d: Mapping) -> GoldRecord:
    version = d.get("schema_version")
    if version != SCHEMA_VERSION:
        raise DataError(f"unsupported schema_version {version!r} (want {SCHEMA_VERSION})")
    frames = d.get("gold_frames")
    return GoldRecord(
        claim=claim_from_dict(d["claim"]),
        gold_verdict=parse_verdict_label(d["gold_verdict"]),
        gold_bill_ids=tuple(d.get("gold_bill_ids", ())),
        gold_table_ids=tuple(d.get("gold_table_ids", ())),
        gold_frames=tuple(frame_from_dict(f) for f in frames) if frames is not None else None,
    )


def load_gold_records(path: str | Path) -> list[GoldRecord]:
    """Load newline-delimited gold records, enforcing id uniqueness."""
    records = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                record = gold_record_from_dict(json.loads(line))
            except (DataError, KeyError, ValueError) as exc:
                raise DataError(f"{path}:{lineno}: {exc}") from exc
            if record.claim.id in seen:
                raise DataError(f"{path}:{lineno}: duplicate claim id {record.claim.id!r}")
            seen.add(record.claim.id)
            records.append(record)
    return records


def write_gold_records(path: str | Path, records: Iterable[GoldRecord]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(gold_record_to_dict(record), ensure_ascii=False) + "\n")


def load_claims(path: str | Path) -> list[Claim]:
    """Load a bare claim corpus (newline-delimited claim objects)."""
    claims = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                d = json.loads(line)
                claim = claim_from_dict(d.get("claim", d))
            except (DataError, KeyError, ValueError) as exc:
                raise DataError(f"{path}:{lineno}: {exc}") from exc
            if claim.id in seen:
                raise DataError(f"{path}:{lineno}: duplicate claim id {claim.id!r}")
            seen.add(claim.id)
            claims.append(claim)
    return claims
