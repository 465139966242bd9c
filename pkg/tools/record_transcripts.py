#!/usr/bin/env python3
"""Record the committed provider transcripts and frozen pipeline outputs.

Run after make_fixtures.py. A rule-based chat transport stands in for a
remote provider; the recording gateway writes every request/response pair
to a transcript, then the same runs are replayed through the scripted
provider to prove the transcripts are complete and the outputs stable.

Produces:
  tests/fixtures/transcripts/{vote_golden,oecd_golden,survey}.json
  tests/fixtures/configs/{vote_golden,oecd_golden,survey}.yaml
  tests/fixtures/golden/*.out.json
"""

from __future__ import annotations

import json
import re
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from framecheck.catalog import load_catalog  # noqa: E402
from framecheck.evalharness import eval_survey  # noqa: E402
from framecheck.fsp import ChatStructuredBackend, survey_frames  # noqa: E402
from framecheck.gateway import Gateway, ProviderConfig, ProviderKind  # noqa: E402
from framecheck.model import Claim, load_claims  # noqa: E402
from framecheck.pipeline import Pipeline, PipelineConfig, load_config  # noqa: E402

FIX = ROOT / "tests" / "fixtures"
TRANSCRIPTS = FIX / "transcripts"
CONFIGS = FIX / "configs"
GOLDEN = FIX / "golden"

MODEL = "scripted-v1"

V1 = "Marco Rubio voted against the bipartisan Violence Against Women Act."
V2 = ("Chuck Grassley voted to slash Medicare when voting against the debt "
      "ceiling bill.")
OC1 = "Japan has the 2nd highest life expectancy in the world."
S4 = "The sky over the bay was beautiful last night."
S5 = "Americans work more hours than Germans."
S6 = "Congress cut education spending by 10 percent."
S7 = "Every family can afford basic health coverage."
S8 = "Our taxes went up again this year."


# --- scripted responses -----------------------------------------------------

PARSE = {
    V1: [{"frame": "Vote", "target": "voted",
          "elements": {"Agent": "Marco Rubio", "Position": "against",
                       "Issue": "the bipartisan Violence Against Women Act"}}],
    V2: [{"frame": "Vote", "target": "voted",
          "elements": {"Agent": "Chuck Grassley",
                       "Issue": "to slash Medicare when voting against the "
                                "debt ceiling bill"}},
         # alias form; the sanitizer folds it into the canonical frame name
         {"frame": "Change_position_on_a_scale", "target": "slash",
          "elements": {"Item": "Medicare"}}],
    OC1: [{"frame": "Occupy_rank", "target": "highest",
           "elements": {"Item": "Japan", "Rank": "2nd highest",
                        "Dimension": "life expectancy"}}],
    S4: [],
    S5: [{"frame": "Comparing_two_entities", "target": "more",
          "elements": {"Entity_1": "Americans", "Entity_2": "Germans",
                       "Comparison_criterion": "hours"}}],
    S6: [{"frame": "Cause_change_of_position_on_a_scale", "target": "cut",
          "elements": {"Item": "education spending",
                       "Difference": "10 percent"}}],
    S7: [{"frame": "Capability", "target": "can",
          "elements": {"Entity": "Every family",
                       "Event": "afford basic health coverage"}}],
}

# S8 answers with prose both times, so the parse fails even after repair and
# the survey counts one failure.
BROKEN_PARSE = "I could not find any frames in this claim."

RETRIEVE_PLAN = {
    OC1: {"table_id": "life_expectancy",
          "filters": [{"column": "year", "op": "equals", "value": 2021}],
          "select_columns": ["country", "year", "value"],
          "aggregation": None, "not_available": False},
}

CLEAN_PLAN = {
    OC1: {"table_id": "life_expectancy",
          "filters": [{"column": "year", "op": "equals", "value": 2021}],
          "select_columns": ["country", "value"],
          "aggregation": None, "not_available": False},
}

ALIGN = {
    (V1, "Violence Against Women Reauthorization Act of 2012"): (
        "Supports",
        "A Nay on the reauthorization is a vote against the Violence Against "
        "Women Act, which is what the claim says."),
    (V2, "A bill to increase the statutory debt ceiling of the United States"): (
        "Supports",
        "His Nay was a vote against a debt ceiling increase, the vote the "
        "claim describes."),
    (V2, "Protecting Medicare and American Farmers from Sequester Cuts Act"): (
        "Supports",
        "Voting Nay here was a vote against the debt-limit fast track and "
        "against delaying the Medicare sequester cuts, which is the vote the "
        "claim refers to."),
    (V2, "An Act to prevent across-the-board direct spending cuts"): (
        "Refutes",
        "He voted Yea to suspend the Medicare sequester cuts, the opposite "
        "of voting to slash Medicare."),
}

AGGREGATE = {
    V1: ("True",
         "The recorded Nay on the Violence Against Women Reauthorization Act "
         "matches the claim exactly."),
    V2: ("Mostly False",
         "He did vote against debt ceiling measures, but neither Nay cut "
         "Medicare, and he voted Yea on the act that prevented the Medicare "
         "sequester cuts."),
}

OECD_VERDICT = {
    OC1: ("Verdict: Mostly True; Explanation: In this data Japan's 84.5 years "
          "is the highest life expectancy, not the 2nd highest, so the claim "
          "is accurate except for the exact rank."),
}

_CLAIM_RE = re.compile(r"^Claim: (.*)$", re.MULTILINE)
_BILL_RE = re.compile(r"^Bill: (.*)$", re.MULTILINE)


def respond(config: ProviderConfig, prompt: str, params: dict) -> str:
    """Stand-in transport: answer each pipeline prompt from the tables above."""
    claim = _CLAIM_RE.search(prompt).group(1)
    if prompt.startswith("Identify which of the semantic frames"):
        if claim == S8:
            return BROKEN_PARSE
        return json.dumps(PARSE[claim])
    if prompt.startswith("You are preparing a database query"):
        return json.dumps(RETRIEVE_PLAN[claim])
    if prompt.startswith("You are refining evidence"):
        return json.dumps(CLEAN_PLAN[claim])
    if prompt.startswith("A fact-checker is assessing this claim"):
        title = _BILL_RE.search(prompt).group(1)
        label, why = ALIGN[(claim, title)]
        return json.dumps({"Label": label, "Explanation": why})
    if prompt.startswith("A fact-checker is assigning a verdict"):
        label, why = AGGREGATE[claim]
        return json.dumps({"Label": label, "Explanation": why})
    if prompt.startswith("Assess the claim strictly against the data"):
        return OECD_VERDICT[claim]
    raise AssertionError(f"no scripted response for prompt {prompt[:80]!r}")


def recording_gateway(path: Path) -> Gateway:
    config = ProviderConfig(
        kind=ProviderKind.REMOTE_CHAT, model_name=MODEL, endpoint="local://scripted"
    )
    path.unlink(missing_ok=True)
    return Gateway(config, transport=respond, record_to=path)


def freeze(result, out_name: str) -> None:
    (GOLDEN / out_name).write_text(
        json.dumps(result.to_dict(), indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )


# --- recording runs ---------------------------------------------------------

VOTE_CASES = [
    ("g-rubio", V1, "vote_rubio.out.json"),
    ("g-grassley", V2, "vote_grassley.out.json"),
]


def record_vote() -> None:
    gateway = recording_gateway(TRANSCRIPTS / "vote_golden.json")
    pipeline = Pipeline(PipelineConfig(congress_dir=FIX / "congress"))
    pipeline.chat = gateway
    for claim_id, text, out_name in VOTE_CASES:
        result = pipeline.check(Claim(id=claim_id, text=text))
        freeze(result, out_name)
        print(f"{claim_id}: {result.verdict.label.value}")


def record_oecd() -> None:
    gateway = recording_gateway(TRANSCRIPTS / "oecd_golden.json")
    pipeline = Pipeline(PipelineConfig(oecd_dir=FIX / "oecd"))
    pipeline.chat = gateway
    pipeline.parser = ChatStructuredBackend(gateway)
    result = pipeline.check(Claim(id="g-oecd", text=OC1))
    freeze(result, "oecd_golden.out.json")
    print(f"g-oecd: {result.verdict.label.value}")


def record_survey() -> None:
    gateway = recording_gateway(TRANSCRIPTS / "survey.json")
    backend = ChatStructuredBackend(gateway)
    claims = load_claims(FIX / "claims" / "survey_claims.jsonl")
    dist = survey_frames(backend, load_catalog(None), claims)
    print(
        f"survey: claims={dist.total_claims}"
        f" avg={dist.avg_frames_per_claim} none={dist.counts['None']}"
        f" failures={dist.n_failures}"
    )


# --- replay configs and the replay check ------------------------------------

VOTE_CONFIG = """\
# End-to-end voting-record checks replayed from a committed transcript.
congress_dir: ../congress
parser_backend: lexical
retrieval_backend:
  vote: bm25
k:
  vote: 10
seed: 0
providers:
  chat:
    kind: scripted
    transcript: ../transcripts/vote_golden.json
"""

OECD_CONFIG = """\
# End-to-end statistics check replayed from a committed transcript.
oecd_dir: ../oecd
parser_backend: chat
retrieval_backend:
  oecd: stub
k:
  oecd: 5
seed: 0
providers:
  chat:
    kind: scripted
    transcript: ../transcripts/oecd_golden.json
"""

SURVEY_CONFIG = """\
# Frame-distribution survey with the chat parser replayed from a transcript.
parser_backend: chat
seed: 0
providers:
  chat:
    kind: scripted
    transcript: ../transcripts/survey.json
"""


def write_configs() -> None:
    for name, body in (
        ("vote_golden.yaml", VOTE_CONFIG),
        ("oecd_golden.yaml", OECD_CONFIG),
        ("survey.yaml", SURVEY_CONFIG),
    ):
        (CONFIGS / name).write_text(body, encoding="utf-8")


def freeze_survey_report() -> None:
    pipeline = Pipeline(load_config(CONFIGS / "survey.yaml"))
    claims = load_claims(FIX / "claims" / "survey_claims.jsonl")
    report = eval_survey(pipeline, claims)
    (GOLDEN / "survey_report.out.json").write_text(
        json.dumps({"suite": report.suite, "data": report.data},
                   indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )


def verify_replays() -> None:
    for config_name, cases in (
        ("vote_golden.yaml", VOTE_CASES),
        ("oecd_golden.yaml", [("g-oecd", OC1, "oecd_golden.out.json")]),
    ):
        pipeline = Pipeline(load_config(CONFIGS / config_name))
        for claim_id, text, out_name in cases:
            result = pipeline.check(Claim(id=claim_id, text=text))
            actual = json.dumps(result.to_dict(), indent=2, sort_keys=True) + "\n"
            expected = (GOLDEN / out_name).read_text(encoding="utf-8")
            assert actual == expected, f"replay mismatch for {claim_id}"
    print("replays byte-identical")


def main() -> None:
    for directory in (TRANSCRIPTS, CONFIGS, GOLDEN):
        directory.mkdir(parents=True, exist_ok=True)
    record_vote()
    record_oecd()
    record_survey()
    write_configs()
    freeze_survey_report()
    verify_replays()


if __name__ == "__main__":
    main()
