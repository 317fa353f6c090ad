"""The committed fixtures are exactly what make_fixtures.py produces."""
import pytest

from conftest import FIXTURES
from make_fixtures import build

GENERATED = build()


def test_no_stray_fixtures():
    assert {p.name for p in FIXTURES.glob("*.json")} == set(GENERATED)


@pytest.mark.parametrize("name", sorted(GENERATED))
def test_fixture_matches_generator(name):
    assert (FIXTURES / name).read_text(encoding="utf-8") == GENERATED[name]
