import pytest

from qbuchi import automata
from qbuchi.fixtures import fixture_path, golden_path, list_fixtures, load_fixture

from conftest import FIXTURE_NAMES

GOLDEN_FILES = [
    "check_cycle_no_entry.json",
    "decompose_finite_ab.json",
    "decompose_no_entry.json",
    "emptiness_lang_a_prefix.json",
    "emptiness_reject_all.json",
    "run_lang_a_prefix.json",
    "run_lang_ab_cycle.json",
    "run_reject_all.json",
    "run_swap_halt_once.json",
    "trace_lang_a_omega.csv",
    "trace_lang_a_omega.json",
]


def test_fixture_listing():
    assert tuple(list_fixtures()) == FIXTURE_NAMES


def test_fixture_paths_resolve():
    for name in list_fixtures():
        assert fixture_path(name).is_file()
    with pytest.raises(KeyError):
        fixture_path("no_such_fixture")


def test_golden_paths_resolve():
    for name in GOLDEN_FILES:
        assert golden_path(name).is_file()
    with pytest.raises(KeyError):
        golden_path("no_such_golden.json")


@pytest.mark.parametrize("name", FIXTURE_NAMES)
def test_fixtures_load_and_validate(name):
    a = load_fixture(name)
    assert automata.validate(a) == []


@pytest.mark.parametrize("name", FIXTURE_NAMES)
def test_fixture_files_are_canonical(name):
    path = fixture_path(name)
    a = automata.load(str(path))
    assert automata.saves(a) == path.read_text(encoding="utf-8")
