"""Verdict synthesis and scoring.

Vote claims: each retrieved bill the member actually voted on is classified
for how the vote bears on the claim, then the classified votes are weighed
into one verdict. Statistics claims: the executed evidence rows go to the
provider as tab-separated text under a strict data-only instruction. A
no-evidence baseline asks for a verdict from the claim alone. Scoring
reports plain accuracy and the variant that excludes claims for which no
relevant evidence existed.
"""

from __future__ import annotations

import json
import logging
import re
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

from .congress import Bill
from .gateway import Gateway
from .model import (
    SCALE_5,
    Claim,
    EvaluationError,
    GoldRecord,
    Verdict,
    VerdictLabel,
    consolidate_verdict,
    parse_verdict_label,
    render_verdict_label,
)
from .oecd.query import EvidenceFrame

log = logging.getLogger(__name__)

MAX_BILLS_PER_VERDICT = 5


class VerificationError(RuntimeError):
    """Provider output unusable after the repair round-trip."""

    def __init__(self, message: str, raw_output: str = ""):
        super().__init__(message)
        self.raw_output = raw_output


class AlignmentLabel(Enum):
    SUPPORTS = "Supports"
    REFUTES = "Refutes"
    INCONCLUSIVE = "Inconclusive"
    IRRELEVANT = "Irrelevant"


@dataclass(frozen=True)
class Alignment:
    label: AlignmentLabel
    explanation: str


@dataclass(frozen=True)
class VoteEvidence:
    bill: Bill
    position: str
    alignment: Alignment


# --- prompt assembly --------------------------------------------------------

_ALIGN_PROMPT = """\
A fact-checker is assessing this claim:

Claim: {claim}

The person named in the claim cast the following vote:

Bill: {title}
Summary: {summary}
Vote: {position}

Decide how this vote bears on the claim. Use exactly one of these labels:
- Supports: the vote backs up what the claim says, directly or indirectly.
- Refutes: the vote contradicts what the claim says, directly or indirectly.
- Inconclusive: the vote concerns the claim's subject but neither backs it up nor contradicts it.
- Irrelevant: the bill has nothing to do with the claim.

Reply with only a JSON object: {{"Label": "<label>", "Explanation": "<why>"}}
"""

_AGGREGATE_PROMPT = """\
A fact-checker is assigning a verdict to this claim based on the person's votes:

Claim: {claim}

Votes under consideration:

{evidence_block}
Weigh these votes together and give the claim exactly one verdict: True, \
Mostly True, Half-True, Mostly False, False, or Irrelevant. Use Irrelevant \
only if none of the votes relate to the claim.

Reply with only a JSON object: {{"Label": "<verdict>", "Explanation": "<why>"}}
"""

_EVIDENCE_ITEM = """\
Bill {index}: {title}
Summary: {summary}
Vote: {position}
Relation to the claim: {label} - {explanation}
"""

_VERDICT_LINE = (
    "Verdict: [False, Mostly False, Half-True, Mostly True, True]; "
    "Explanation: [Your reasoning]"
)

_OECD_PROMPT = """\
Assess the claim strictly against the data below. The verdict must rest on \
this data alone, not on outside knowledge.

Claim: {claim}

{data_block}
Give exactly one verdict. Reply on a single line in this format:
{verdict_line}
"""

_NAIVE_PROMPT = """\
Assess this claim using only what you know; no reference data is provided.

Claim: {claim}

Give exactly one verdict. Reply on a single line in this format:
{verdict_line}
"""

_REPAIR_SUFFIX = """\


Your previous reply did not follow the required format. Reply again exactly \
as instructed.
"""


def _strip_code_fences(text: str) -> str:
    stripped = text.strip()
    if stripped.startswith("```"):
        stripped = re.sub(r"^```[a-zA-Z]*\s*", "", stripped)
        stripped = re.sub(r"\s*```$", "", stripped)
    return stripped.strip()


def _parse_label_json(reply: str) -> tuple[str, str] | None:
    """Extract ("Label", "Explanation") from a JSON-object reply."""
    try:
        data = json.loads(_strip_code_fences(reply))
    except json.JSONDecodeError:
        return None
    if not isinstance(data, dict):
        return None
    by_lower = {str(k).lower(): v for k, v in data.items()}
    label = by_lower.get("label")
    if label is None:
        return None
    return str(label).strip(), str(by_lower.get("explanation", "")).strip()


def _complete_with_repair(gateway: Gateway, prompt: str, parse, what: str):
    reply = gateway.complete(prompt)
    parsed = parse(reply)
    if parsed is None:
        log.info("%s: unparseable reply, repairing", what)
        reply = gateway.complete(prompt + _REPAIR_SUFFIX)
        parsed = parse(reply)
        if parsed is None:
            raise VerificationError(f"{what}: unusable provider output", raw_output=reply)
    return parsed


# --- vote pipeline ----------------------------------------------------------


def build_alignment_prompt(claim: Claim, bill: Bill, position: str) -> str:
    return _ALIGN_PROMPT.format(
        claim=claim.text, title=bill.title, summary=bill.summary, position=position
    )


def align_claim_bill(gateway: Gateway, claim: Claim, bill: Bill, position: str) -> Alignment:
    """Classify how one recorded vote bears on the claim."""

    def parse(reply: str) -> Alignment | None:
        pair = _parse_label_json(reply)
        if pair is None:
            return None
        label_text, explanation = pair
        for label in AlignmentLabel:
            if label.value.lower() == label_text.lower():
                return Alignment(label=label, explanation=explanation)
        return None

    prompt = build_alignment_prompt(claim, bill, position)
    return _complete_with_repair(
        gateway, prompt, parse, f"alignment for claim {claim.id} bill {bill.bill_id}"
    )


VOTE_VERDICTS = (
    VerdictLabel.TRUE,
    VerdictLabel.MOSTLY_TRUE,
    VerdictLabel.HALF_TRUE,
    VerdictLabel.MOSTLY_FALSE,
    VerdictLabel.FALSE,
    VerdictLabel.IRRELEVANT,
)


def build_aggregate_prompt(claim: Claim, evidence: Sequence[VoteEvidence]) -> str:
    items = [
        _EVIDENCE_ITEM.format(
            index=i,
            title=ev.bill.title,
            summary=ev.bill.summary,
            position=ev.position,
            label=ev.alignment.label.value,
            explanation=ev.alignment.explanation,
        )
        for i, ev in enumerate(evidence, start=1)
    ]
    return _AGGREGATE_PROMPT.format(claim=claim.text, evidence_block="\n".join(items))


def aggregate_vote_verdict(
    gateway: Gateway, claim: Claim, evidence: Sequence[VoteEvidence]
) -> Verdict:
    """Weigh the classified votes into one verdict for the claim."""
    if not evidence:
        raise ValueError("vote-verdict aggregation needs at least one evidence item")
    if len(evidence) > MAX_BILLS_PER_VERDICT:
        log.info(
            "claim %s: %d evidence items, keeping top %d by rank",
            claim.id, len(evidence), MAX_BILLS_PER_VERDICT,
        )
        evidence = evidence[:MAX_BILLS_PER_VERDICT]

    def parse(reply: str) -> Verdict | None:
        pair = _parse_label_json(reply)
        if pair is None:
            return None
        label_text, explanation = pair
        try:
            label = parse_verdict_label(label_text)
        except ValueError:
            return None
        if label not in VOTE_VERDICTS:
            return None
        return Verdict(
            label=label,
            explanation=explanation,
            evidence_refs=tuple(ev.bill.bill_id for ev in evidence),
        )

    prompt = build_aggregate_prompt(claim, evidence)
    return _complete_with_repair(
        gateway, prompt, parse, f"verdict aggregation for claim {claim.id}"
    )


# --- statistics pipeline ----------------------------------------------------

_VERDICT_RE = re.compile(
    r"Verdict:\s*\[?\s*([A-Za-z][A-Za-z‐-―' -]*?)\s*\]?\s*[;.]\s*"
    r"Explanation:\s*\[?(.*?)\]?\s*$",
    re.DOTALL,
)


def parse_verdict_line(reply: str) -> Verdict | None:
    """Parse the one-line contract "Verdict: <label>; Explanation: <text>".

    Only the five-step scale is accepted here; anything else is a miss.
    """
    m = _VERDICT_RE.search(reply)
    if m is None:
        return None
    try:
        label = parse_verdict_label(m.group(1))
    except ValueError:
        return None
    if label not in SCALE_5:
        return None
    return Verdict(label=label, explanation=m.group(2).strip())


def build_oecd_prompt(claim: Claim, evidence: Sequence[EvidenceFrame]) -> str:
    blocks = []
    for frame in evidence:
        note = " (truncated)" if frame.truncated else ""
        blocks.append(f"Data from table {frame.table_id}{note}:\n{frame.to_tsv()}\n")
    return _OECD_PROMPT.format(
        claim=claim.text, data_block="\n".join(blocks), verdict_line=_VERDICT_LINE
    )


def verify_oecd(gateway: Gateway, claim: Claim, evidence: Sequence[EvidenceFrame]) -> Verdict:
    """Verdict for a statistics claim from its executed evidence rows."""
    if not evidence:
        raise ValueError(
            "statistics verification needs evidence; mark the case unavailable instead"
        )
    prompt = build_oecd_prompt(claim, evidence)
    verdict = _complete_with_repair(
        gateway, prompt, parse_verdict_line, f"verification for claim {claim.id}"
    )
    return Verdict(
        label=verdict.label,
        explanation=verdict.explanation,
        evidence_refs=tuple(frame.table_id for frame in evidence),
    )


def naive_verify(gateway: Gateway, claim: Claim) -> Verdict:
    """Baseline verdict from the claim text alone (no external data)."""
    prompt = _NAIVE_PROMPT.format(claim=claim.text, verdict_line=_VERDICT_LINE)
    return _complete_with_repair(
        gateway, prompt, parse_verdict_line, f"naive verification for claim {claim.id}"
    )


# --- scoring ----------------------------------------------------------------


@dataclass(frozen=True)
class Prediction:
    """One system output for scoring; verdict None means the stage failed."""

    claim_id: str
    verdict: Verdict | None
    evidence_available: bool = True


@dataclass(frozen=True)
class VerificationReport:
    accuracy: float
    accuracy_wo_irrelevant: float
    n: int
    n_excluded: int
    n_irrelevant_predictions: int
    confusion: dict[tuple[str, str], int] = field(default_factory=dict)  # (gold, predicted)

    def gold_marginals(self) -> Counter:
        out: Counter = Counter()
        for (gold, _), count in self.confusion.items():
            out[gold] += count
        return out

    def predicted_marginals(self) -> Counter:
        out: Counter = Counter()
        for (_, predicted), count in self.confusion.items():
            out[predicted] += count
        return out


def _is_excluded(prediction: Prediction) -> bool:
    """No relevant evidence: nothing retrieved, or everything judged irrelevant."""
    if not prediction.evidence_available:
        return True
    return (
        prediction.verdict is not None
        and prediction.verdict.label is VerdictLabel.IRRELEVANT
    )


def score_verification(
    predictions: Sequence[Prediction],
    gold: Sequence[GoldRecord],
    exclude_no_evidence: bool = True,
) -> VerificationReport:
    """Exact-label accuracy against gold verdicts.

    Gold labels consolidate the harshest step into False before comparison.
    An Irrelevant prediction never matches gold (the gold scale has no such
    label); it is counted separately. With the exclusion flag, claims that
    had no relevant evidence leave the denominator of the second accuracy.
    """
    gold_by_id = {record.claim.id: record for record in gold}
    if len(gold_by_id) != len(gold):
        raise EvaluationError("duplicate claim ids in gold")
    if {p.claim_id for p in predictions} != set(gold_by_id):
        raise EvaluationError("prediction and gold claim ids do not match")
    if not gold:
        raise EvaluationError("cannot score an empty gold set")

    n = len(gold)
    hits = 0
    hits_kept = 0
    n_excluded = 0
    n_irrelevant = 0
    confusion: dict[tuple[str, str], int] = {}
    for prediction in sorted(predictions, key=lambda p: p.claim_id):
        record = gold_by_id[prediction.claim_id]
        gold_label = consolidate_verdict(record.gold_verdict)
        predicted = prediction.verdict.label if prediction.verdict else None
        if predicted is VerdictLabel.IRRELEVANT:
            n_irrelevant += 1
        correct = predicted is gold_label
        hits += int(correct)

        excluded = exclude_no_evidence and _is_excluded(prediction)
        if excluded:
            n_excluded += 1
        else:
            hits_kept += int(correct)

        predicted_name = render_verdict_label(predicted) if predicted else "(none)"
        key = (render_verdict_label(gold_label), predicted_name)
        confusion[key] = confusion.get(key, 0) + 1

    kept = n - n_excluded
    return VerificationReport(
        accuracy=hits / n,
        accuracy_wo_irrelevant=hits_kept / kept if kept else 0.0,
        n=n,
        n_excluded=n_excluded,
        n_irrelevant_predictions=n_irrelevant,
        confusion=confusion,
    )
