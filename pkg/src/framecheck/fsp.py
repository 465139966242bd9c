"""Frame-semantic parsing of claims via two interchangeable backends.

The lexical backend fires on catalog lexical units and fills frame elements
with positional heuristics; the chat backend prompts a provider for
structured output. Both feed a common sanitizer that enforces the substring
guarantee (every FE surface is an exact substring of the claim) and the
catalog FE inventories, dropping and counting anything else. Also houses
the exact-match scorer and the corpus-wide frame survey.
"""

from __future__ import annotations

import json
import logging
import re
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Protocol, Sequence

from .catalog import FrameCatalog, lexical_targets
from .gateway import Gateway, GatewayError
from .model import (
    Claim,
    EvaluationError,
    FrameElement,
    FrameInstance,
    ParsedClaim,
    Span,
    make_parsed_claim,
)
from .text import capitalized_runs as _capitalized_runs
from .text import sentence_end as _sentence_end
from .text import tokens as _tokens

log = logging.getLogger(__name__)


class FspParseError(ValueError):
    """Provider output could not be parsed even after the repair pass."""

    def __init__(self, message: str, raw_output: str = ""):
        super().__init__(message)
        self.raw_output = raw_output


class BackendMode(Enum):
    LEXICAL = "lexical"
    CHAT_STRUCTURED = "chat"


@dataclass
class RawFrame:
    """Backend output before sanitization; target/elements may be surface strings."""

    frame_name: str
    target: Span | str
    elements: dict[str, str | tuple[Span, str]] = field(default_factory=dict)


@dataclass
class ParseStats:
    """Counts of provider output dropped by the sanitizer."""

    unknown_frames: int = 0
    bad_targets: int = 0
    unknown_elements: int = 0
    non_substring_elements: int = 0
    repairs: int = 0

    def total_dropped(self) -> int:
        return (
            self.unknown_frames
            + self.bad_targets
            + self.unknown_elements
            + self.non_substring_elements
        )


class ParserBackend(Protocol):
    name: str
    mode: BackendMode

    def raw_parse(self, claim: Claim, catalog: FrameCatalog) -> list[RawFrame]: ...


# --- sanitizer --------------------------------------------------------------


def _find_span(text: str, surface: str) -> Span | None:
    """First occurrence of `surface` in `text` (exact match), as a span."""
    if not surface:
        return None
    idx = text.find(surface)
    if idx < 0:
        return None
    return Span(idx, idx + len(surface))


def _sanitize(
    claim: Claim,
    catalog: FrameCatalog,
    raw_frames: Iterable[RawFrame],
    stats: ParseStats,
) -> list[FrameInstance]:
    frames: list[FrameInstance] = []
    for raw in raw_frames:
        name = catalog.resolve_frame_name(str(raw.frame_name))
        if name is None:
            stats.unknown_frames += 1
            log.info("claim %s: dropping unknown frame %r", claim.id, raw.frame_name)
            continue
        frame_def = catalog.frames[name]

        if isinstance(raw.target, Span):
            target = raw.target
            if target.end > len(claim.text):
                stats.bad_targets += 1
                continue
        else:
            target = _find_span(claim.text, str(raw.target).strip())
            if target is None:
                stats.bad_targets += 1
                log.info("claim %s: target %r not in claim text", claim.id, raw.target)
                continue

        elements: dict[str, FrameElement] = {}
        for fe_name, value in raw.elements.items():
            if fe_name not in frame_def.elements:
                stats.unknown_elements += 1
                log.info("claim %s: dropping FE %r not in frame %r", claim.id, fe_name, name)
                continue
            if isinstance(value, tuple):
                span, surface = value
                if span.end > len(claim.text) or claim.text[span.start : span.end] != surface:
                    stats.non_substring_elements += 1
                    continue
            else:
                surface = str(value)
                if not surface:  # prompts use "" for absent elements
                    continue
                span = _find_span(claim.text, surface)
                if span is None:
                    stats.non_substring_elements += 1
                    log.info("claim %s: FE %r=%r is not a substring", claim.id, fe_name, surface)
                    continue
            elements[fe_name] = FrameElement(span=span, text=surface)

        frames.append(FrameInstance(frame_name=name, target=target, elements=elements))
    return frames


def parse_claim(
    backend: ParserBackend,
    catalog: FrameCatalog,
    claim: Claim,
    first_frame_only: bool = False,
    stats: ParseStats | None = None,
) -> ParsedClaim:
    """Parse one claim; with `first_frame_only`, keep only the earliest-target frame."""
    stats = stats if stats is not None else ParseStats()
    frames = _sanitize(claim, catalog, backend.raw_parse(claim, catalog), stats)
    parsed = make_parsed_claim(claim, frames)
    if first_frame_only and len(parsed.frames) > 1:
        parsed = ParsedClaim(claim=claim, frames=parsed.frames[:1])
    return parsed


# --- lexical backend --------------------------------------------------------

_YEAR_RE = re.compile(r"\b(?:19|20)\d\d\b")
_ORDINAL_RE = re.compile(r"^(?:\d+(?:st|nd|rd|th)|first|second|third|[a-z]+th)$", re.I)
_DEGREE_WORDS = {"way", "far", "much", "slightly", "significantly", "substantially"}


def _nearest_run_before(runs: Sequence[Span], pos: int) -> Span | None:
    best = None
    for span in runs:
        if span.end <= pos:
            best = span
    return best


def _first_run_after(runs: Sequence[Span], pos: int) -> Span | None:
    for span in runs:
        if span.start >= pos:
            return span
    return None


def _trailing_span(text: str, start: int, stop_markers: Sequence[str] = ()) -> Span | None:
    """Span from `start` to the sentence end, optionally cut at the first stop marker."""
    end = _sentence_end(text, start)
    segment = text[start:end]
    for marker in stop_markers:
        idx = segment.find(marker)
        if idx >= 0:
            segment = segment[:idx]
    segment_stripped = segment.strip(" ,")
    if not segment_stripped:
        return None
    lead = len(segment) - len(segment.lstrip(" ,"))
    s = start + lead
    return Span(s, s + len(segment_stripped))


def _fe(text: str, span: Span | None) -> tuple[Span, str] | None:
    if span is None:
        return None
    return (span, span.slice(text))


class LexicalBackend:
    """Deterministic parser: catalog lexical units trigger frames, positional
    heuristics fill the frame elements. Two runs over the same corpus produce
    identical output."""

    name = "lexical"
    mode = BackendMode.LEXICAL

    def raw_parse(self, claim: Claim, catalog: FrameCatalog) -> list[RawFrame]:
        text = claim.text
        runs = _capitalized_runs(text)
        raw_frames: list[RawFrame] = []
        for target, frame_names in lexical_targets(catalog, text):
            for frame_name in frame_names:
                elements = self._extract_elements(text, target, frame_name, runs)
                raw_frames.append(
                    RawFrame(frame_name=frame_name, target=target, elements=elements)
                )
        return raw_frames

    def _extract_elements(
        self, text: str, target: Span, frame_name: str, runs: Sequence[Span]
    ) -> dict:
        handler = {
            "Vote": self._vote,
            "Occupy_rank": self._rank,
            "Occupy_rank_via_superlatives": self._rank,
            "Comparing_two_entities": self._compare_entities,
            "Comparing_at_two_different_points_in_time": self._compare_times,
            "Cause_change_of_position_on_a_scale": self._scale_change,
            "Capability": self._capability,
        }.get(frame_name)
        if handler is None:
            return {}
        elements = handler(text, target, runs)
        return {name: fe for name, fe in elements.items() if fe is not None}

    def _vote(self, text: str, target: Span, runs: Sequence[Span]) -> dict:
        elements: dict = {"Agent": _fe(text, _nearest_run_before(runs, target.start))}
        after = _tokens(text[target.end :])
        position_span = None
        issue_start = target.end
        if after:
            first = after[0]
            if first.text.lower() in ("for", "against"):
                position_span = Span(target.end + first.start, target.end + first.end)
                issue_start = position_span.end
        elements["Position"] = _fe(text, position_span)
        elements["Issue"] = _fe(text, _trailing_span(text, issue_start))
        return elements

    def _rank(self, text: str, target: Span, runs: Sequence[Span]) -> dict:
        rank_start = target.start
        before = [t for t in _tokens(text) if t.end <= target.start]
        # fold a preceding ordinal ("2nd highest") into the Rank span
        if before and _ORDINAL_RE.match(before[-1].text):
            rank_start = before[-1].start
        return {
            "Item": _fe(text, _nearest_run_before(runs, rank_start)),
            "Rank": _fe(text, Span(rank_start, target.end)),
            "Dimension": _fe(
                text,
                _trailing_span(
                    text, target.end,
                    stop_markers=(" in ", " among ", " of all", " of any", " than "),
                ),
            ),
        }

    def _compare_entities(self, text: str, target: Span, runs: Sequence[Span]) -> dict:
        elements: dict = {"Entity_1": _fe(text, _nearest_run_before(runs, target.start))}
        before = [t for t in _tokens(text) if t.end <= target.start]
        if before and before[-1].text.lower() in _DEGREE_WORDS:
            elements["Degree"] = _fe(text, Span(before[-1].start, before[-1].end))
        sentence_end = _sentence_end(text, target.end)
        than_idx = text.find(" than ", target.end, sentence_end)
        if than_idx >= 0:
            criterion = _trailing_span(text, target.end, stop_markers=(" than ",))
            elements["Comparison_criterion"] = _fe(text, criterion)
            elements["Entity_2"] = _fe(text, _first_run_after(runs, than_idx + len(" than ")))
        else:
            elements["Comparison_criterion"] = _fe(
                text, _trailing_span(text, target.end, stop_markers=(" in ", " among "))
            )
        return elements

    def _compare_times(self, text: str, target: Span, runs: Sequence[Span]) -> dict:
        elements: dict = {"Entity": _fe(text, _nearest_run_before(runs, target.start))}
        years = [
            Span(m.start(), m.end())
            for m in _YEAR_RE.finditer(text)
        ]
        if years:
            elements["First_point_in_time"] = _fe(text, years[0])
        if len(years) > 1:
            elements["Second_point_in_time"] = _fe(text, years[1])
        elements["Comparison_criterion"] = _fe(
            text,
            _trailing_span(text, target.end, stop_markers=(" since ", " than ", " in ")),
        )
        return elements

    def _scale_change(self, text: str, target: Span, runs: Sequence[Span]) -> dict:
        elements: dict = {
            "Item": _fe(
                text,
                _trailing_span(
                    text, target.end,
                    stop_markers=(" by ", " when ", " since ", " in ", " from ", " to "),
                ),
            )
        }
        sentence_end = _sentence_end(text, target.end)
        m = re.search(r"\bby\s+([\d.,]+\s*(?:percent|%)?)", text[target.end : sentence_end])
        if m:
            s = target.end + m.start(1)
            elements["Difference"] = _fe(text, Span(s, s + len(m.group(1).rstrip())))
        return elements

    def _capability(self, text: str, target: Span, runs: Sequence[Span]) -> dict:
        event_start = target.end
        after = _tokens(text[target.end :])
        if after and after[0].text.lower() == "to":
            event_start = target.end + after[0].end
        return {
            "Entity": _fe(text, _nearest_run_before(runs, target.start)),
            "Event": _fe(text, _trailing_span(text, event_start)),
        }


# --- chat backend -----------------------------------------------------------

_CHAT_PROMPT = """\
Identify which of the semantic frames listed below are evoked by the claim, \
and extract the frame elements of each evoked frame.

Frames:
{frame_block}

Rules:
- Report only frames from the list above.
- "target" is the single word in the claim that evokes the frame; quote it exactly.
- Frame element values must quote exactly from the claim text.
- Use "" for any frame element that is not present in the claim.
- Respond with only a JSON array, one object per evoked frame, for example:
  [{{"frame": "<frame name>", "target": "<word>", "elements": {{"<element>": "<value>"}}}}]

Claim: {claim}
"""

_REPAIR_SUFFIX = (
    "\n\nYour previous reply could not be parsed as JSON. "
    "Respond again with only the JSON array."
)


def _strip_code_fences(text: str) -> str:
    stripped = text.strip()
    if stripped.startswith("```"):
        stripped = re.sub(r"^```[a-zA-Z]*\s*", "", stripped)
        stripped = re.sub(r"\s*```$", "", stripped)
    return stripped.strip()


class ChatStructuredBackend:
    """Provider-backed parser requesting structured JSON frame output."""

    name = "chat"
    mode = BackendMode.CHAT_STRUCTURED

    def __init__(self, gateway: Gateway, stats: ParseStats | None = None):
        self.gateway = gateway
        self.stats = stats if stats is not None else ParseStats()

    def build_prompt(self, claim: Claim, catalog: FrameCatalog) -> str:
        lines = []
        for frame_def in catalog.frames.values():
            lines.append(f"- {frame_def.name}: {frame_def.definition}")
            lines.append(f"  Elements: {', '.join(frame_def.elements)}")
        return _CHAT_PROMPT.format(frame_block="\n".join(lines), claim=claim.text)

    def raw_parse(self, claim: Claim, catalog: FrameCatalog) -> list[RawFrame]:
        prompt = self.build_prompt(claim, catalog)
        reply = self.gateway.complete(prompt)
        parsed = self._try_parse(reply)
        if parsed is None:
            self.stats.repairs += 1
            reply = self.gateway.complete(prompt + _REPAIR_SUFFIX)
            parsed = self._try_parse(reply)
            if parsed is None:
                raise FspParseError(
                    f"unparseable parser output for claim {claim.id}", raw_output=reply
                )
        return parsed

    def _try_parse(self, reply: str) -> list[RawFrame] | None:
        try:
            data = json.loads(_strip_code_fences(reply))
        except json.JSONDecodeError:
            return None
        if isinstance(data, dict):
            data = data.get("frames", [data])
        if not isinstance(data, list):
            return None
        frames = []
        for item in data:
            if not isinstance(item, dict) or "frame" not in item:
                continue
            elements = item.get("elements") or {}
            if not isinstance(elements, dict):
                elements = {}
            frames.append(
                RawFrame(
                    frame_name=str(item["frame"]),
                    target=str(item.get("target", "")),
                    elements={str(k): str(v) for k, v in elements.items()},
                )
            )
        return frames


# --- scoring ----------------------------------------------------------------


@dataclass(frozen=True)
class FspScore:
    frame_accuracy: float
    argument_accuracy: float
    n_claims: int


def _frame_multiset(parsed: ParsedClaim) -> Counter:
    return Counter(f.frame_name for f in parsed.frames)


def _argument_multiset(parsed: ParsedClaim) -> Counter:
    return Counter(
        (f.frame_name, name, fe.text)
        for f in parsed.frames
        for name, fe in f.elements.items()
    )


def score_fsp(predictions: Sequence[ParsedClaim], gold: Sequence[ParsedClaim]) -> FspScore:
    """Exact-match accuracy on frames and on (frame, element, surface) arguments.

    Claims are aligned by id; frames compare as name multisets, arguments as
    multisets of (frame name, FE name, surface string) triples.
    """
    gold_by_id = {p.claim.id: p for p in gold}
    if len(gold_by_id) != len(gold):
        raise EvaluationError("duplicate claim ids in gold")
    if {p.claim.id for p in predictions} != set(gold_by_id):
        raise EvaluationError("prediction and gold claim ids do not match")
    if not gold:
        return FspScore(frame_accuracy=0.0, argument_accuracy=0.0, n_claims=0)

    frame_hits = 0
    argument_hits = 0
    for pred in predictions:
        ref = gold_by_id[pred.claim.id]
        if _frame_multiset(pred) == _frame_multiset(ref):
            frame_hits += 1
            if _argument_multiset(pred) == _argument_multiset(ref):
                argument_hits += 1
    n = len(gold)
    return FspScore(
        frame_accuracy=frame_hits / n,
        argument_accuracy=argument_hits / n,
        n_claims=n,
    )


# --- survey -----------------------------------------------------------------


@dataclass(frozen=True)
class FrameDistribution:
    """Per-frame prediction counts over a corpus; zero-frame claims count as None."""

    counts: dict[str, int]
    total_claims: int
    avg_frames_per_claim: float
    n_failures: int = 0

    NONE_KEY = "None"


def survey_frames(
    backend: ParserBackend,
    catalog: FrameCatalog,
    corpus: Sequence[Claim],
) -> FrameDistribution:
    """Parse every claim and tally evoked frames; failures are counted, not fatal."""
    counts: dict[str, int] = {name: 0 for name in catalog.frames}
    counts[FrameDistribution.NONE_KEY] = 0
    total_frames = 0
    n_ok = 0
    n_failures = 0
    for claim in corpus:
        try:
            parsed = parse_claim(backend, catalog, claim)
        except (FspParseError, GatewayError) as exc:
            n_failures += 1
            log.warning("survey: claim %s failed: %s", claim.id, exc)
            continue
        n_ok += 1
        if not parsed.frames:
            counts[FrameDistribution.NONE_KEY] += 1
            continue
        for frame in parsed.frames:
            counts[frame.frame_name] = counts.get(frame.frame_name, 0) + 1
            total_frames += 1
    avg = total_frames / n_ok if n_ok else 0.0
    return FrameDistribution(
        counts=counts,
        total_claims=n_ok,
        avg_frames_per_claim=avg,
        n_failures=n_failures,
    )
