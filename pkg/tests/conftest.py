"""Shared fixtures: fixture-tree paths and session-scoped stores."""

from pathlib import Path

import pytest

from framecheck.catalog import load_catalog
from framecheck.congress import ingest_congress
from framecheck.oecd.store import load_store

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def catalog():
    return load_catalog(None)


@pytest.fixture(scope="session")
def congress_store():
    """Main voting-record fixture: 16 members, 50 bills."""
    return ingest_congress(FIXTURES / "congress")


@pytest.fixture(scope="session")
def congress_small():
    """Compact fixture exercising roll-call selection edge cases."""
    return ingest_congress(FIXTURES / "congress_small")


@pytest.fixture(scope="session")
def table_store():
    return load_store(FIXTURES / "oecd")
