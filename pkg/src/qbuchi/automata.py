"""Automaton types, validation and the on-disk JSON document format.

A measure-many automaton is a tuple of named basis states, an input
alphabet, one unitary per symbol, an initial state and disjoint sets of
accepting and rejecting (halting) states. After every applied unitary the
halting coordinates are measured out and their probability mass
accumulates; the remaining amplitude continues unnormalized.

Documents use the ``.qba`` JSON layout::

    {"type": "mmqba", "states": [...], "alphabet": [...], "initial": "q0",
     "accepting": [...], "rejecting": [...],
     "unitaries": {"a": [[[re, im], ...], ...]}}

Matrices are row-major and entry [s][t] is the amplitude from basis state
t to basis state s. The "#" end-marker unitary is optional and defaults to
the identity; the "$" terminal unitary is required exactly for "mmqfa"
documents.
"""
from __future__ import annotations

import json
import math
import os
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .numerics import DEFAULT_UNITARY_TOL, as_matrix, is_unitary

END_MARKER = "#"
TERMINAL = "$"
RESERVED_SYMBOLS = frozenset({END_MARKER, TERMINAL})
TOL_ENV_VAR = "QBA_TOL"


class AutomatonFormatError(ValueError):
    """Unparseable or structurally invalid automaton document."""

    def __init__(self, message: str, *, path: str | None = None):
        self.path = path
        if path:
            message = f"{path}: {message}"
        super().__init__(message)


class CutpointWarning(UserWarning):
    """Cutpoint lies at or below 1/2, where acceptance guarantees do not hold."""


class Cutpoint(float):
    """Cutpoint probability in (0, 1]; values at or below 1/2 warn."""

    def __new__(cls, value):
        p = float(value)
        if math.isnan(p) or not 0.0 < p <= 1.0:
            raise ValueError(f"cutpoint must lie in (0, 1], got {value!r}")
        if p <= 0.5:
            warnings.warn(
                f"cutpoint {p} is not above 1/2; acceptance guarantees assume p > 1/2",
                CutpointWarning,
                stacklevel=2,
            )
        return super().__new__(cls, p)


def default_tolerance() -> float:
    """Unitarity tolerance, overridable through the QBA_TOL environment variable."""
    raw = os.environ.get(TOL_ENV_VAR)
    if raw is None:
        return DEFAULT_UNITARY_TOL
    try:
        tol = float(raw)
    except ValueError:
        raise ValueError(f"{TOL_ENV_VAR} must be a float, got {raw!r}") from None
    if not tol > 0:
        raise ValueError(f"{TOL_ENV_VAR} must be positive, got {raw!r}")
    return tol


@dataclass(eq=False)
class Mmqba:
    """Measure-many automaton over infinite words (left end marker only)."""

    state_names: list[str]
    alphabet: list[str]
    unitaries: dict[str, np.ndarray]
    initial: int
    accepting: frozenset[int]
    rejecting: frozenset[int]
    end_marker_unitary: np.ndarray | None = None

    kind = "mmqba"

    def __post_init__(self):
        self.accepting = frozenset(int(i) for i in self.accepting)
        self.rejecting = frozenset(int(i) for i in self.rejecting)
        self.unitaries = {s: as_matrix(m) for s, m in self.unitaries.items()}
        if self.end_marker_unitary is not None:
            self.end_marker_unitary = as_matrix(self.end_marker_unitary)

    @property
    def dim(self) -> int:
        return len(self.state_names)

    @property
    def halting(self) -> tuple[int, ...]:
        return tuple(sorted(self.accepting | self.rejecting))

    @property
    def nonhalting(self) -> tuple[int, ...]:
        halt = self.accepting | self.rejecting
        return tuple(i for i in range(self.dim) if i not in halt)

    def unitary_for(self, symbol: str) -> np.ndarray:
        """Transition matrix for a symbol; '#' defaults to the identity."""
        if symbol == END_MARKER:
            if self.end_marker_unitary is not None:
                return self.end_marker_unitary
            return np.eye(self.dim, dtype=np.complex128)
        try:
            return self.unitaries[symbol]
        except KeyError:
            raise KeyError(f"no unitary for symbol {symbol!r}") from None


@dataclass(eq=False)
class Mmqfa(Mmqba):
    """Measure-many automaton over finite words with both end markers."""

    terminal_unitary: np.ndarray = None

    kind = "mmqfa"

    def __post_init__(self):
        super().__post_init__()
        if self.terminal_unitary is None:
            raise ValueError("mmqfa requires a terminal '$' unitary")
        self.terminal_unitary = as_matrix(self.terminal_unitary)

    def unitary_for(self, symbol: str) -> np.ndarray:
        if symbol == TERMINAL:
            return self.terminal_unitary
        return super().unitary_for(symbol)


@dataclass(frozen=True)
class Violation:
    """One failed structural invariant, human-readable."""

    invariant: str
    detail: str

    def __str__(self) -> str:
        return f"{self.invariant}: {self.detail}"


def _check_matrix(name: str, m: np.ndarray, dim: int, tol: float) -> list[Violation]:
    out = []
    if m.shape != (dim, dim):
        out.append(Violation(f"shape(V_{name})", f"expected {dim}x{dim}, got {m.shape[0]}x{m.shape[1]}"))
        return out
    if not np.all(np.isfinite(m)):
        out.append(Violation(f"finite(V_{name})", "matrix contains NaN or Inf entries"))
        return out
    if not is_unitary(m, tol):
        dev = float(np.abs(m.conj().T @ m - np.eye(dim)).max())
        out.append(Violation(f"unitarity(V_{name})", f"max deviation {dev:.3e} exceeds tol {tol:.1e}"))
    return out


def validate(a: Mmqba, tol: float | None = None) -> list[Violation]:
    """Structural invariant check; returns an empty list for a valid automaton."""
    if tol is None:
        tol = default_tolerance()
    out: list[Violation] = []
    dim = a.dim
    if dim == 0:
        out.append(Violation("states", "state set must be nonempty"))
        return out
    if len(set(a.state_names)) != dim:
        out.append(Violation("states", "state names must be distinct"))
    if not a.alphabet:
        out.append(Violation("alphabet", "alphabet must be nonempty"))
    if len(set(a.alphabet)) != len(a.alphabet):
        out.append(Violation("alphabet", "alphabet symbols must be distinct"))
    for sym in a.alphabet:
        if len(sym) != 1:
            out.append(Violation("alphabet", f"symbol {sym!r} is not a single character"))
        elif sym in RESERVED_SYMBOLS:
            out.append(Violation("alphabet", f"symbol {sym!r} is reserved"))
    for idx in sorted(a.accepting | a.rejecting):
        if not 0 <= idx < dim:
            out.append(Violation("halting", f"state index {idx} out of range"))
            return out
    overlap = a.accepting & a.rejecting
    if overlap:
        names = ", ".join(a.state_names[i] for i in sorted(overlap))
        out.append(Violation("disjointness", f"states both accepting and rejecting: {names}"))
    if not 0 <= a.initial < dim:
        out.append(Violation("initial", f"initial index {a.initial} out of range"))
    elif a.initial in a.accepting | a.rejecting:
        out.append(Violation("initial", f"initial state {a.state_names[a.initial]} is halting"))
    missing = [s for s in a.alphabet if s not in a.unitaries]
    for sym in missing:
        out.append(Violation("unitaries", f"missing unitary for symbol {sym!r}"))
    extra = [s for s in a.unitaries if s not in a.alphabet]
    for sym in extra:
        out.append(Violation("unitaries", f"unitary for symbol {sym!r} outside the alphabet"))
    for sym in a.alphabet:
        if sym in a.unitaries:
            out.extend(_check_matrix(sym, a.unitaries[sym], dim, tol))
    if a.end_marker_unitary is not None:
        out.extend(_check_matrix(END_MARKER, a.end_marker_unitary, dim, tol))
    if isinstance(a, Mmqfa):
        out.extend(_check_matrix(TERMINAL, a.terminal_unitary, dim, tol))
    return out


def _expect(cond: bool, message: str, path: str):
    if not cond:
        raise AutomatonFormatError(message, path=path)


def _decode_matrix(raw, dim: int, path: str) -> np.ndarray:
    _expect(isinstance(raw, list) and len(raw) == dim, f"expected {dim} rows", path)
    m = np.zeros((dim, dim), dtype=np.complex128)
    for s, row in enumerate(raw):
        _expect(isinstance(row, list) and len(row) == dim, f"expected {dim} entries", f"{path}[{s}]")
        for t, entry in enumerate(row):
            here = f"{path}[{s}][{t}]"
            _expect(
                isinstance(entry, list) and len(entry) == 2,
                "matrix entry must be a [re, im] pair",
                here,
            )
            re_part, im_part = entry
            _expect(
                isinstance(re_part, (int, float)) and not isinstance(re_part, bool),
                "real part must be a number",
                here,
            )
            _expect(
                isinstance(im_part, (int, float)) and not isinstance(im_part, bool),
                "imaginary part must be a number",
                here,
            )
            m[s, t] = complex(float(re_part), float(im_part))
    return m


def _decode_state_list(raw, names: dict[str, int], path: str) -> frozenset[int]:
    _expect(isinstance(raw, list), "expected a list of state names", path)
    out = set()
    for k, name in enumerate(raw):
        _expect(isinstance(name, str), "state name must be a string", f"{path}[{k}]")
        _expect(name in names, f"unknown state {name!r}", f"{path}[{k}]")
        out.add(names[name])
    return frozenset(out)


def _decode(doc) -> Mmqba:
    _expect(isinstance(doc, dict), "document must be a JSON object", "$")
    required = ["type", "states", "alphabet", "initial", "accepting", "rejecting", "unitaries"]
    for key in required:
        _expect(key in doc, f"missing required key {key!r}", "$")
    unknown = set(doc) - set(required)
    _expect(not unknown, f"unknown keys {sorted(unknown)}", "$")

    kind = doc["type"]
    _expect(kind in ("mmqba", "mmqfa"), f"type must be 'mmqba' or 'mmqfa', got {kind!r}", "type")

    states = doc["states"]
    _expect(isinstance(states, list) and states, "states must be a nonempty list", "states")
    for k, name in enumerate(states):
        _expect(isinstance(name, str) and name, "state name must be a nonempty string", f"states[{k}]")
    _expect(len(set(states)) == len(states), "state names must be distinct", "states")
    names = {name: i for i, name in enumerate(states)}
    dim = len(states)

    alphabet = doc["alphabet"]
    _expect(isinstance(alphabet, list), "alphabet must be a list", "alphabet")
    _expect(len(alphabet) > 0, "alphabet must be nonempty", "alphabet")
    for k, sym in enumerate(alphabet):
        here = f"alphabet[{k}]"
        _expect(isinstance(sym, str), "symbol must be a string", here)
        _expect(len(sym) == 1, f"symbol {sym!r} must be a single character", here)
        _expect(sym not in RESERVED_SYMBOLS, f"symbol {sym!r} is reserved", here)
    _expect(len(set(alphabet)) == len(alphabet), "alphabet symbols must be distinct", "alphabet")

    _expect(isinstance(doc["initial"], str), "initial must be a state name", "initial")
    _expect(doc["initial"] in names, f"unknown initial state {doc['initial']!r}", "initial")
    initial = names[doc["initial"]]

    accepting = _decode_state_list(doc["accepting"], names, "accepting")
    rejecting = _decode_state_list(doc["rejecting"], names, "rejecting")

    raw_unitaries = doc["unitaries"]
    _expect(isinstance(raw_unitaries, dict), "unitaries must be an object", "unitaries")
    allowed = set(alphabet) | {END_MARKER}
    if kind == "mmqfa":
        allowed.add(TERMINAL)
        _expect(TERMINAL in raw_unitaries, "mmqfa requires a '$' unitary", "unitaries")
    for sym in alphabet:
        _expect(sym in raw_unitaries, f"missing unitary for symbol {sym!r}", "unitaries")
    for sym in raw_unitaries:
        _expect(sym in allowed, f"unexpected unitary key {sym!r}", "unitaries")

    unitaries = {
        sym: _decode_matrix(raw_unitaries[sym], dim, f"unitaries.{sym}") for sym in alphabet
    }
    marker = None
    if END_MARKER in raw_unitaries:
        marker = _decode_matrix(raw_unitaries[END_MARKER], dim, f"unitaries.{END_MARKER}")

    common = dict(
        state_names=list(states),
        alphabet=list(alphabet),
        unitaries=unitaries,
        initial=initial,
        accepting=accepting,
        rejecting=rejecting,
        end_marker_unitary=marker,
    )
    if kind == "mmqfa":
        terminal = _decode_matrix(raw_unitaries[TERMINAL], dim, f"unitaries.{TERMINAL}")
        return Mmqfa(terminal_unitary=terminal, **common)
    return Mmqba(**common)


def loads(text: str) -> Mmqba:
    """Parse an automaton document from a JSON string."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise AutomatonFormatError(
            f"parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from None
    return _decode(doc)


def load(path) -> Mmqba:
    """Load an automaton from a ``.qba`` file."""
    return loads(Path(path).read_text(encoding="utf-8"))


def _encode_matrix(m: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def _encode(a: Mmqba) -> dict:
    unitaries = {}
    if a.end_marker_unitary is not None:
        unitaries[END_MARKER] = _encode_matrix(a.end_marker_unitary)
    if isinstance(a, Mmqfa):
        unitaries[TERMINAL] = _encode_matrix(a.terminal_unitary)
    for sym in sorted(a.alphabet):
        unitaries[sym] = _encode_matrix(a.unitaries[sym])
    return {
        "type": a.kind,
        "states": list(a.state_names),
        "alphabet": list(a.alphabet),
        "initial": a.state_names[a.initial],
        "accepting": [a.state_names[i] for i in sorted(a.accepting)],
        "rejecting": [a.state_names[i] for i in sorted(a.rejecting)],
        "unitaries": unitaries,
    }


def saves(a: Mmqba) -> str:
    """Serialize an automaton to its canonical JSON document."""
    return json.dumps(_encode(a), indent=2, ensure_ascii=False) + "\n"


def save(a: Mmqba, path) -> None:
    Path(path).write_text(saves(a), encoding="utf-8")
