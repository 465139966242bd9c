"""Statistics-table store: loading, typing, rendering, checksums."""

import json

import pytest

from framecheck.model import DataError
from framecheck.oecd.store import format_value, load_store, table_documents


class TestLoadStore:
    def test_csv_backed_tables_have_rows(self, table_store):
        assert table_store.table_ids() == (
            "average_wages",
            "health_coverage",
            "hours_worked",
            "life_expectancy",
            "population",
        )
        assert len(table_store.get_table("life_expectancy").rows) == 24

    def test_catalog_only_tables_are_described_but_not_queryable(self, table_store):
        ids = [d.table_id for d in table_store.descriptors()]
        assert len(ids) == 12
        assert "gdp_growth" in ids
        assert not table_store.has_table("gdp_growth")
        with pytest.raises(DataError):
            table_store.get_table("gdp_growth")

    def test_numeric_cells_are_floats_date_cells_are_strings(self, table_store):
        table = table_store.get_table("life_expectancy")
        country, year, value = table.rows[0]
        assert isinstance(country, str)
        assert isinstance(year, str)
        assert isinstance(value, float)

    def test_distinct_values_sorted(self, table_store):
        table = table_store.get_table("life_expectancy")
        countries = table.distinct_values("country")
        assert list(countries) == sorted(countries)
        assert table.distinct_values("year") == ("2019", "2021")

    def test_n_distinct_recomputed_from_data(self, table_store):
        table = table_store.get_table("life_expectancy")
        by_name = {c.name: c for c in table.descriptor.columns}
        assert by_name["year"].n_distinct == 2
        assert by_name["country"].n_distinct == 12

    def test_descriptor_stem_must_match_table_id(self, tmp_path):
        (tmp_path / "alpha.json").write_text(
            json.dumps(
                {
                    "table_id": "beta",
                    "name": "Mismatched",
                    "description": "stem and id disagree",
                    "columns": [{"name": "value", "kind": "numeric"}],
                }
            )
        )
        with pytest.raises(DataError):
            load_store(tmp_path)

    def test_checksum_stable_across_loads(self, fixtures_dir, table_store):
        assert table_store.checksum() == load_store(fixtures_dir / "oecd").checksum()

    def test_checksum_tracks_data(self, tmp_path, fixtures_dir, table_store):
        import shutil

        shutil.copytree(fixtures_dir / "oecd", tmp_path / "oecd")
        csv_path = tmp_path / "oecd" / "life_expectancy.csv"
        csv_path.write_text(csv_path.read_text().replace("84.5", "99.9"))
        assert load_store(tmp_path / "oecd").checksum() != table_store.checksum()


class TestRendering:
    def test_format_value_rules(self):
        assert format_value(None) == ""
        assert format_value(84.0) == "84"
        assert format_value(84.5) == "84.5"
        assert format_value("Japan") == "Japan"

    def test_table_documents_one_per_descriptor(self, table_store):
        docs = table_documents(table_store.descriptors())
        assert len(docs) == 12
        by_id = {d.id: d.text for d in docs}
        assert by_id["life_expectancy"].startswith("Life expectancy at birth.")
