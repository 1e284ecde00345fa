"""Total-state evolution, traces, and verdicts for lasso-shaped infinite words.

The total state of a run is the unnormalized non-halting amplitude vector
together with the cumulative probability collected so far in each halting
basis state. One step applies the symbol's unitary, moves the squared
amplitude of every halting coordinate into the cumulative map, and zeroes
those coordinates. Norm is conserved: the non-halting squared norm plus
all cumulative mass stays 1.

A lasso word u v^omega is accepted at cutpoint p when the accepting mass
reaches p (up to a slack epsilon), the rejecting mass provably stays below
p, and accepting visits keep a frequency of at least beta per simulated
cycle repetition. The visit-frequency test is a finite-horizon heuristic
for the infinitely-many-visits clause; it is reported in the verdict so
callers can audit or tighten it. Rejection certificates are sound: once
one holds it holds forever.
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .automata import END_MARKER, Mmqba, Mmqfa, TERMINAL

DEFAULT_MAX_PERIODS = 1024
DEFAULT_EPSILON = 1e-9
DEFAULT_BETA = 0.5
DEFAULT_VISIT_EPS = 1e-12

CERTIFIED = "certified"
LITERAL = "literal"

REASON_CERTIFIED = "all-clauses-certified"
REASON_REJ_REFUTED = "rej-limit-refuted"
REASON_ACC_REFUTED = "acc-limit-refuted"
REASON_HALTED_BELOW = "halted-below-cutpoint"
REASON_BUCHI_REFUTED = "buchi-refuted"
REASON_BUDGET = "budget-exhausted"


class Status(enum.Enum):
    ACCEPTED = "ACCEPTED"
    REJECTED = "REJECTED"
    INCONCLUSIVE = "INCONCLUSIVE"


@dataclass(frozen=True)
class TotalState:
    """Non-halting amplitude plus cumulative halting probability per state index."""

    nonhalt: np.ndarray
    cumulative: dict[int, float]
    step_index: int = 0

    @property
    def nonhalt_norm_sq(self) -> float:
        return float(np.real(np.vdot(self.nonhalt, self.nonhalt)))

    @property
    def halting_total(self) -> float:
        return float(sum(self.cumulative.values()))


@dataclass(frozen=True)
class StepRecord:
    j: int
    symbol: str
    alpha: float
    rho: float
    acc: float
    rej: float
    nonhalt_norm_sq: float


@dataclass(frozen=True)
class LassoWord:
    """Ultimately periodic word: a finite prefix followed by a repeated cycle."""

    prefix: str
    cycle: str

    def __post_init__(self):
        if not self.cycle:
            raise ValueError("lasso cycle must be nonempty")

    def expand(self, periods: int) -> str:
        return self.prefix + self.cycle * periods


@dataclass(frozen=True)
class Verdict:
    status: Status
    acc_lower: float
    rej_lower: float
    rej_upper: float
    visit_count: int
    periods_simulated: int
    reason: str
    beta: float
    epsilon: float
    mode: str
    trace: tuple[StepRecord, ...] | None = None

    def to_dict(self) -> dict:
        return {
            "status": self.status.value,
            "acc_lower": self.acc_lower,
            "rej_lower": self.rej_lower,
            "rej_upper": self.rej_upper,
            "visit_count": self.visit_count,
            "periods_simulated": self.periods_simulated,
            "reason": self.reason,
            "beta": self.beta,
            "epsilon": self.epsilon,
            "mode": self.mode,
        }


@dataclass(frozen=True)
class Trace:
    """Sequence of step records plus the total state after the last one."""

    records: tuple[StepRecord, ...]
    final: TotalState

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def __getitem__(self, i):
        return self.records[i]

    def to_csv(self) -> str:
        return trace_to_csv(self.records)

    def to_json(self) -> str:
        return trace_to_json(self.records)


CSV_HEADER = "j,symbol,alpha,rho,acc,rej,nonhalt_norm_sq"


def _f17(x: float) -> str:
    return format(float(x), ".17g")


def trace_to_csv(records: Sequence[StepRecord]) -> str:
    lines = [CSV_HEADER]
    for r in records:
        lines.append(
            f"{r.j},{r.symbol},{_f17(r.alpha)},{_f17(r.rho)},"
            f"{_f17(r.acc)},{_f17(r.rej)},{_f17(r.nonhalt_norm_sq)}"
        )
    return "\n".join(lines) + "\n"


def trace_to_json(records: Sequence[StepRecord]) -> str:
    # assembled by hand so floats print with .17g, same as the CSV export
    rows = []
    for r in records:
        rows.append(
            "  {"
            f'"acc": {_f17(r.acc)}, '
            f'"alpha": {_f17(r.alpha)}, '
            f'"j": {r.j}, '
            f'"nonhalt_norm_sq": {_f17(r.nonhalt_norm_sq)}, '
            f'"rej": {_f17(r.rej)}, '
            f'"rho": {_f17(r.rho)}, '
            f'"symbol": {json.dumps(r.symbol)}'
            "}"
        )
    if not rows:
        return "[]\n"
    return "[\n" + ",\n".join(rows) + "\n]\n"


def initial_state(a: Mmqba) -> TotalState:
    psi = np.zeros(a.dim, dtype=np.complex128)
    psi[a.initial] = 1.0
    return TotalState(psi, {i: 0.0 for i in a.halting}, 0)


def step(a: Mmqba, ts: TotalState, symbol: str) -> tuple[TotalState, StepRecord]:
    """Apply one symbol to a total state and report the step's increments."""
    psi = a.unitary_for(symbol) @ ts.nonhalt
    cum = dict(ts.cumulative)
    alpha = 0.0
    rho = 0.0
    for i in a.accepting:
        z = psi[i]
        p = z.real * z.real + z.imag * z.imag
        cum[i] += p
        alpha += p
        psi[i] = 0.0
    for i in a.rejecting:
        z = psi[i]
        p = z.real * z.real + z.imag * z.imag
        cum[i] += p
        rho += p
        psi[i] = 0.0
    acc = sum(cum[i] for i in a.accepting)
    rej = sum(cum[i] for i in a.rejecting)
    new = TotalState(psi, cum, ts.step_index + 1)
    rec = StepRecord(
        new.step_index, symbol, alpha, rho, acc, rej, new.nonhalt_norm_sq
    )
    return new, rec


class _Engine:
    """Mutable evolution loop used by the run functions."""

    __slots__ = ("a", "psi", "cum", "acc", "rej", "steps", "acc_idx", "rej_idx")

    def __init__(self, a: Mmqba):
        self.a = a
        self.psi = np.zeros(a.dim, dtype=np.complex128)
        self.psi[a.initial] = 1.0
        self.cum = np.zeros(a.dim, dtype=np.float64)
        self.acc = 0.0
        self.rej = 0.0
        self.steps = 0
        self.acc_idx = np.fromiter(sorted(a.accepting), dtype=np.intp, count=len(a.accepting))
        self.rej_idx = np.fromiter(sorted(a.rejecting), dtype=np.intp, count=len(a.rejecting))

    def apply(self, symbol: str) -> tuple[float, float]:
        psi = self.a.unitary_for(symbol) @ self.psi
        alpha = 0.0
        rho = 0.0
        if self.acc_idx.size:
            amps = psi[self.acc_idx]
            probs = amps.real * amps.real + amps.imag * amps.imag
            self.cum[self.acc_idx] += probs
            alpha = float(probs.sum())
            psi[self.acc_idx] = 0.0
        if self.rej_idx.size:
            amps = psi[self.rej_idx]
            probs = amps.real * amps.real + amps.imag * amps.imag
            self.cum[self.rej_idx] += probs
            rho = float(probs.sum())
            psi[self.rej_idx] = 0.0
        self.psi = psi
        self.acc += alpha
        self.rej += rho
        self.steps += 1
        return alpha, rho

    @property
    def nonhalt_norm_sq(self) -> float:
        return float(np.real(np.vdot(self.psi, self.psi)))

    def record(self, symbol: str, alpha: float, rho: float) -> StepRecord:
        return StepRecord(
            self.steps, symbol, alpha, rho, self.acc, self.rej, self.nonhalt_norm_sq
        )

    def snapshot(self) -> TotalState:
        cum = {i: float(self.cum[i]) for i in self.a.halting}
        return TotalState(self.psi.copy(), cum, self.steps)


def _check_word(a: Mmqba, word: str):
    symbols = set(a.alphabet)
    for ch in word:
        if ch not in symbols:
            raise ValueError(f"symbol {ch!r} is not in the automaton alphabet")


def run_prefix(a: Mmqba, word: str) -> Trace:
    """Apply the end marker once, then every symbol of the finite prefix."""
    _check_word(a, word)
    eng = _Engine(a)
    eng.apply(END_MARKER)
    eng.steps = 0
    records = []
    for sym in word:
        alpha, rho = eng.apply(sym)
        records.append(eng.record(sym, alpha, rho))
    return Trace(tuple(records), eng.snapshot())


def run_mmqfa(a: Mmqfa, word: str) -> tuple[float, float]:
    """Total accept and reject probability of a finite word, end markers included."""
    if not isinstance(a, Mmqfa):
        raise TypeError("run_mmqfa requires an automaton with a terminal unitary")
    _check_word(a, word)
    eng = _Engine(a)
    eng.apply(END_MARKER)
    for sym in word:
        eng.apply(sym)
    eng.apply(TERMINAL)
    return eng.acc, eng.rej


def run_lasso(
    a: Mmqba,
    w: LassoWord,
    p: float,
    *,
    max_periods: int = DEFAULT_MAX_PERIODS,
    epsilon: float = DEFAULT_EPSILON,
    beta: float = DEFAULT_BETA,
    visit_eps: float = DEFAULT_VISIT_EPS,
    mode: str = CERTIFIED,
    record_trace: bool = False,
) -> Verdict:
    """Simulate u v^omega and return a cutpoint verdict with certificates.

    REJECTED is certified: the rejecting mass reached p, or the accepting
    mass can never reach p, or the run halted below p, or no accepting
    visit can ever happen again (no accepting states at all, or the cycle
    map reached an exact fixed point with zero halting flow). ACCEPTED
    combines two sound limit certificates with the heuristic
    visit-frequency test; in literal mode the rejecting clause is checked
    as rej < p without the non-halting tail and the function returns at
    the first success, which reproduces the search algorithm's behavior.
    In certified mode the simulation continues to the budget so the
    reported bounds are tight. epsilon pads the accept test (acc may sit
    epsilon below p) and equally guards the accepting-side refutations,
    which would otherwise misfire at p = 1 where acc + nh rounds a few
    ulps under 1. Verdicts never flip between ACCEPTED and REJECTED when
    the budget grows, except for limits within epsilon of the cutpoint.
    """
    p = float(p)
    if not 0.0 < p <= 1.0:
        raise ValueError(f"cutpoint must lie in (0, 1], got {p!r}")
    if mode not in (CERTIFIED, LITERAL):
        raise ValueError(f"mode must be {CERTIFIED!r} or {LITERAL!r}")
    if max_periods < 1:
        raise ValueError("max_periods must be at least 1")
    if epsilon < 0:
        raise ValueError("epsilon must be nonnegative")
    if not 0.0 < beta <= 1.0:
        raise ValueError("beta must lie in (0, 1]")
    if visit_eps <= 0:
        raise ValueError("visit_eps must be positive")
    _check_word(a, w.prefix + w.cycle)

    eng = _Engine(a)
    eng.apply(END_MARKER)
    eng.steps = 0
    records: list[StepRecord] | None = [] if record_trace else None
    visits = 0
    periods = 0
    accepted = False
    halted = False
    stationary = False
    halt_sq = visit_eps * visit_eps
    no_visits_possible = not a.accepting

    def verdict(status: Status, reason: str) -> Verdict:
        nh = eng.nonhalt_norm_sq
        return Verdict(
            status=status,
            acc_lower=eng.acc,
            rej_lower=eng.rej,
            rej_upper=eng.rej + nh,
            visit_count=visits,
            periods_simulated=periods,
            reason=reason,
            beta=beta,
            epsilon=epsilon,
            mode=mode,
            trace=tuple(records) if records is not None else None,
        )

    if no_visits_possible:
        return verdict(Status.REJECTED, REASON_BUCHI_REFUTED)

    for sym in w.prefix:
        alpha, rho = eng.apply(sym)
        if records is not None:
            records.append(eng.record(sym, alpha, rho))
        if alpha > visit_eps:
            visits += 1
        if eng.rej >= p:
            return verdict(Status.REJECTED, REASON_REJ_REFUTED)
        nh = eng.nonhalt_norm_sq
        if nh <= halt_sq:
            if eng.acc < p - epsilon:
                return verdict(Status.REJECTED, REASON_HALTED_BELOW)
            halted = True
            break
        if eng.acc + nh < p - epsilon:
            return verdict(Status.REJECTED, REASON_ACC_REFUTED)

    for k in range(1, max_periods + 1):
        periods = k
        prev_psi = eng.psi
        prev_acc = eng.acc
        prev_rej = eng.rej
        for sym in w.cycle:
            alpha, rho = eng.apply(sym)
            if records is not None:
                records.append(eng.record(sym, alpha, rho))
            if alpha > visit_eps:
                visits += 1
            if eng.rej >= p:
                return verdict(Status.REJECTED, REASON_REJ_REFUTED)
            nh = eng.nonhalt_norm_sq
            halted_now = nh <= halt_sq
            if halted_now and eng.acc < p - epsilon:
                return verdict(Status.REJECTED, REASON_HALTED_BELOW)
            if not halted_now and eng.acc + nh < p - epsilon:
                return verdict(Status.REJECTED, REASON_ACC_REFUTED)
            if not accepted and eng.acc >= p - epsilon and visits >= beta * k:
                rej_ok = (eng.rej + nh < p) if mode == CERTIFIED else (eng.rej < p)
                if rej_ok:
                    accepted = True
                    if mode == LITERAL:
                        return verdict(Status.ACCEPTED, REASON_CERTIFIED)
            if halted_now:
                halted = True
                break
        if halted:
            break
        if (
            eng.acc == prev_acc
            and eng.rej == prev_rej
            and np.array_equal(eng.psi, prev_psi)
        ):
            # exact fixed point of the cycle map: no future step can differ,
            # so no further accepting visit is possible
            stationary = True
            break

    if accepted:
        return verdict(Status.ACCEPTED, REASON_CERTIFIED)
    if stationary:
        return verdict(Status.REJECTED, REASON_BUCHI_REFUTED)
    return verdict(Status.INCONCLUSIVE, REASON_BUDGET)


CLAUSE_CERTIFIED = "certified"
CLAUSE_POSSIBLE = "possible"
CLAUSE_REFUTED = "refuted"


@dataclass(frozen=True)
class ClauseReport:
    """Finite-horizon status of the three acceptance clauses."""

    buchi_visits: int
    buchi: str
    acc_limit: str
    rej_limit: str

    def to_dict(self) -> dict:
        return {
            "buchi_visits": self.buchi_visits,
            "buchi": self.buchi,
            "acc_limit": self.acc_limit,
            "rej_limit": self.rej_limit,
        }


def check_acceptance_clauses(
    trace: Trace | Sequence[StepRecord],
    p: float,
    visit_eps: float = DEFAULT_VISIT_EPS,
) -> ClauseReport:
    """Classify each acceptance clause as certified, possible, or refuted.

    The visit count and the halting test use visit_eps; pass 0 to count
    every strictly positive accepting amplitude as a visit.
    """
    records = trace.records if isinstance(trace, Trace) else tuple(trace)
    if not records:
        raise ValueError("trace must contain at least one step")
    p = float(p)
    visits = sum(1 for r in records if r.alpha > visit_eps)
    last = records[-1]
    if last.nonhalt_norm_sq <= visit_eps * visit_eps:
        buchi = CLAUSE_REFUTED
    else:
        buchi = CLAUSE_POSSIBLE
    if last.acc >= p:
        acc_limit = CLAUSE_CERTIFIED
    elif last.acc + last.nonhalt_norm_sq < p:
        acc_limit = CLAUSE_REFUTED
    else:
        acc_limit = CLAUSE_POSSIBLE
    if last.rej >= p:
        rej_limit = CLAUSE_REFUTED
    elif last.rej + last.nonhalt_norm_sq < p:
        rej_limit = CLAUSE_CERTIFIED
    else:
        rej_limit = CLAUSE_POSSIBLE
    return ClauseReport(visits, buchi, acc_limit, rej_limit)
