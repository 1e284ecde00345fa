"""Bundled example automata and golden command outputs.

Each automaton ships as a ``.qba`` file under ``data/``; golden files
under ``golden/`` hold the expected byte-exact CLI output used by the
regression tests. ``fixture_path`` resolves a bundled automaton by its
base name, e.g. ``fixture_path("lang_a_prefix")``.
"""
from importlib import resources
from pathlib import Path

from .. import automata


def _data_dir() -> Path:
    return Path(str(resources.files(__name__))) / "data"


def _golden_dir() -> Path:
    return Path(str(resources.files(__name__))) / "golden"


def list_fixtures() -> list[str]:
    return sorted(p.stem for p in _data_dir().glob("*.qba"))


def fixture_path(name: str) -> Path:
    p = _data_dir() / f"{name}.qba"
    if not p.is_file():
        known = ", ".join(list_fixtures())
        raise KeyError(f"no bundled automaton named {name!r} (known: {known})")
    return p


def golden_path(name: str) -> Path:
    p = _golden_dir() / name
    if not p.is_file():
        raise KeyError(f"no golden file named {name!r}")
    return p


def load_fixture(name: str) -> automata.Mmqba:
    return automata.load(fixture_path(name))
