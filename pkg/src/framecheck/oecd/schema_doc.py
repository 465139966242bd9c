"""Schema rendering for provider prompts: data-definition text plus
representative sample values per column.

Sample selection rule by distinct count: under 5 keeps everything, over
100 takes 10 seeded-random values, anything between takes the 10 values
most similar to the claim text.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, Sequence

from ..gateway import cosine, stub_embedding
from .store import Table, TableDescriptor, format_value

SMALL_COLUMN_MAX = 4  # "fewer than five" distinct values: keep all
LARGE_COLUMN_MIN = 101  # "more than 100": sample instead of ranking
N_SAMPLES = 10


def stub_similarity(claim_text: str) -> Callable[[str], float]:
    """Claim-conditioned scorer over candidate values, offline and stable."""
    claim_vec = stub_embedding(claim_text)

    def score(value_text: str) -> float:
        return cosine(claim_vec, stub_embedding(value_text))

    return score


def select_sample_values(
    values: Sequence,
    claim_text: str,
    seed: int = 0,
    scorer: Callable[[str], float] | None = None,
) -> list:
    """Representative values for one column, ordering deterministic per seed."""
    distinct = list(values)
    n = len(distinct)
    if n <= SMALL_COLUMN_MAX:
        return distinct
    if n >= LARGE_COLUMN_MIN:
        rng = random.Random(seed)
        return rng.sample(distinct, N_SAMPLES)
    scorer = scorer if scorer is not None else stub_similarity(claim_text)
    scored = [(-scorer(format_value(v)), i, v) for i, v in enumerate(distinct)]
    scored.sort()
    return [v for _, _, v in scored[:N_SAMPLES]]


def column_samples(table: Table, claim_text: str, seed: int = 0) -> dict[str, list]:
    return {
        col.name: select_sample_values(
            table.distinct_values(col.name), claim_text, seed=seed
        )
        for col in table.descriptor.columns
    }


@dataclass(frozen=True)
class SchemaDoc:
    table_id: str
    rendered: str


_KIND_DDL = {"text": "TEXT", "numeric": "NUMERIC", "date": "DATE"}


def _render_sample(value, kind: str) -> str:
    rendered = format_value(value)
    return f"'{rendered}'" if kind == "text" else rendered


def render_schema_doc(
    descriptor: TableDescriptor, samples: dict[str, Sequence]
) -> SchemaDoc:
    """Byte-stable rendering: header comment, then one line per column with
    its kind and example values."""
    lines = [f"TABLE {descriptor.table_id} ("]
    if descriptor.description:
        lines.append(f"  -- {descriptor.description}")
    for col in descriptor.columns:
        line = f"  {col.name} {_KIND_DDL[col.kind]}"
        sample = samples.get(col.name, ())
        if sample:
            rendered = ", ".join(_render_sample(v, col.kind) for v in sample)
            line += f"  -- examples: {rendered}"
        lines.append(line)
    lines.append(")")
    return SchemaDoc(table_id=descriptor.table_id, rendered="\n".join(lines) + "\n")


def schema_doc_for(table: Table, claim_text: str, seed: int = 0) -> SchemaDoc:
    return render_schema_doc(table.descriptor, column_samples(table, claim_text, seed=seed))
