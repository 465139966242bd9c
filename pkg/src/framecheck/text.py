"""Token, sentence, and capitalized-run helpers shared by the parser and
the member-name extractor."""

from __future__ import annotations

import re
from dataclasses import dataclass

from .model import Span

TOKEN_RE = re.compile(r"[A-Za-z0-9][A-Za-z0-9'’-]*")

HONORIFICS = {
    "Sen", "Senator", "Rep", "Representative", "Gov", "Governor", "President",
    "Congressman", "Congresswoman", "Dr", "Mr", "Mrs", "Ms", "Sens", "Reps",
}

_SENTENCE_END_RE = re.compile(r"[.!?;](?=\s|$)")


@dataclass(frozen=True)
class Token:
    text: str
    start: int
    end: int


def tokens(text: str) -> list[Token]:
    return [Token(m.group(0), m.start(), m.end()) for m in TOKEN_RE.finditer(text)]


def sentence_end(text: str, pos: int) -> int:
    """End offset (exclusive of the terminator) of the sentence containing pos.

    Periods after honorifics or single letters (initials) are not boundaries.
    """
    for m in _SENTENCE_END_RE.finditer(text, pos):
        before = text[: m.start()].rstrip()
        last_word = before.rsplit(None, 1)[-1] if before else ""
        if m.group(0) == "." and (last_word in HONORIFICS or len(last_word) == 1):
            continue
        return m.start()
    return len(text)


def strip_possessive(token: Token) -> Token:
    for suffix in ("'s", "’s"):
        if token.text.endswith(suffix):
            return Token(token.text[: -len(suffix)], token.start, token.end - len(suffix))
    return token


def capitalized_runs(text: str) -> list[Span]:
    """Maximal runs of capitalized tokens, honorifics stripped, possessives trimmed.

    Tokens separated only by spaces or periods (initials) stay in one run.
    """
    runs: list[list[Token]] = []
    current: list[Token] = []
    for token in tokens(text):
        gap_ok = bool(current) and all(
            c in " ." for c in text[current[-1].end : token.start]
        )
        if token.text[0].isupper():
            if current and not gap_ok:
                runs.append(current)
                current = []
            current.append(strip_possessive(token))
        else:
            if current:
                runs.append(current)
                current = []
    if current:
        runs.append(current)

    spans = []
    for run in runs:
        while run and run[0].text in HONORIFICS:
            run = run[1:]
        if run:
            spans.append(Span(run[0].start, run[-1].end))
    return spans
