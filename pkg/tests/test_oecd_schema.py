"""Schema serialization: sample-value selection regimes and DDL-style rendering."""

import random

import pytest

from framecheck.oecd.schema_doc import (
    LARGE_COLUMN_MIN,
    N_SAMPLES,
    SMALL_COLUMN_MAX,
    schema_doc_for,
    select_sample_values,
    stub_similarity,
)

CLAIM = "Life expectancy in Japan is the highest."


def values(n: int) -> list[str]:
    return [f"v{i:03d} token{i % 7}" for i in range(n)]


def oracle(vals, claim_text, seed):
    """Independent re-derivation of the three selection regimes."""
    if len(vals) <= SMALL_COLUMN_MAX:
        return list(vals)
    if len(vals) < LARGE_COLUMN_MIN:
        scorer = stub_similarity(claim_text)
        ranked = sorted(((-scorer(str(v)), i) for i, v in enumerate(vals)))
        return [vals[i] for _, i in ranked[:N_SAMPLES]]
    return random.Random(seed).sample(list(vals), N_SAMPLES)


class TestSelectionRegimes:
    @pytest.mark.parametrize("n", [3, 4, 5, 50, 100, 101, 150])
    def test_matches_independent_derivation(self, n):
        vals = values(n)
        assert select_sample_values(vals, CLAIM, seed=0) == oracle(vals, CLAIM, 0)

    def test_small_columns_keep_every_value(self):
        vals = values(SMALL_COLUMN_MAX)
        assert select_sample_values(vals, CLAIM) == vals

    def test_mid_columns_rank_by_claim_similarity(self):
        vals = ["life expectancy figure", "unrelated entry", "tax revenue", "japan value",
                "alpha", "beta", "gamma", "delta"]
        got = select_sample_values(vals, "life expectancy in japan", seed=0)
        assert got[0] == "life expectancy figure"
        assert got[1] == "japan value"

    def test_mid_regime_ties_keep_input_order(self):
        vals = [f"same same {i}" for i in range(8)]
        got = select_sample_values(vals, "completely different words", seed=0)
        assert got == vals  # all scores equal, index breaks ties

    def test_large_columns_sample_with_seed(self):
        vals = values(LARGE_COLUMN_MIN)
        first = select_sample_values(vals, CLAIM, seed=3)
        second = select_sample_values(vals, CLAIM, seed=3)
        assert first == second
        assert len(first) == N_SAMPLES
        assert select_sample_values(vals, CLAIM, seed=4) != first

    def test_boundary_constants(self):
        assert SMALL_COLUMN_MAX == 4
        assert LARGE_COLUMN_MIN == 101
        assert N_SAMPLES == 10


class TestRendering:
    def test_rendered_doc_is_byte_stable(self, table_store):
        table = table_store.get_table("hours_worked")
        claim = "Americans work more hours than Germans."
        doc = schema_doc_for(table, claim)
        assert doc.table_id == "hours_worked"
        assert doc.rendered == (
            "TABLE hours_worked (\n"
            "  -- Total hours worked per year divided by the average number of "
            "people in employment, by country and year.\n"
            "  country TEXT  -- examples: 'Canada', 'France', 'Germany', 'Japan', "
            "'Korea', 'Mexico', 'Norway', 'United States'\n"
            "  year DATE  -- examples: 2012, 2016\n"
            "  value NUMERIC  -- examples: 1363, 1375, 1416, 1420, 1472, 1490, "
            "1703, 1713, 1721, 1745\n"
            ")\n"
        )
        assert schema_doc_for(table, claim).rendered == doc.rendered

    def test_text_samples_quoted_numbers_bare(self, table_store):
        doc = schema_doc_for(table_store.get_table("life_expectancy"), CLAIM)
        assert "'Japan'" in doc.rendered
        assert "70.2" in doc.rendered  # numeric examples render unquoted
