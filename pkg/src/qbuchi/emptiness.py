"""Nonemptiness search over lasso candidates, plus a step-cost benchmark.

The search dovetails deterministically: round r enumerates every pair
(u, v) with |u| <= r and 1 <= |v| <= r in u-major length-then-
lexicographic order and simulates with a period budget of 2^r. Pairs
whose earlier verdict was REJECTED are skipped, since that verdict is a
certificate and cannot flip under a larger budget; INCONCLUSIVE pairs
are re-simulated as the budget doubles. Every (pair, budget) point is
therefore eventually reached and the procedure can only ever answer
NONEMPTY or run out of rounds.
"""
from __future__ import annotations

import enum
import itertools
import time
from dataclasses import dataclass

import numpy as np

from .automata import Mmqba
from .constructions import union
from .semantics import (
    CERTIFIED,
    DEFAULT_BETA,
    DEFAULT_EPSILON,
    DEFAULT_VISIT_EPS,
    LassoWord,
    Status,
    Verdict,
    run_lasso,
)


@dataclass(frozen=True)
class SearchBudget:
    max_rounds: int = 6
    beta: float = DEFAULT_BETA
    epsilon: float = DEFAULT_EPSILON
    visit_eps: float = DEFAULT_VISIT_EPS

    def __post_init__(self):
        if self.max_rounds < 1:
            raise ValueError("max_rounds must be at least 1")
        if not 0.0 < self.beta <= 1.0:
            raise ValueError("beta must lie in (0, 1]")
        if self.epsilon < 0:
            raise ValueError("epsilon must be nonnegative")
        if self.visit_eps <= 0:
            raise ValueError("visit_eps must be positive")


class SearchStatus(enum.Enum):
    NONEMPTY = "NONEMPTY"
    INCONCLUSIVE = "INCONCLUSIVE"


@dataclass(frozen=True)
class SearchResult:
    """Outcome of the dovetailing search.

    candidates_tried counts simulations, including pairs re-simulated
    under a doubled budget in later rounds. rounds_completed is the round
    in which the witness was found, or max_rounds when the search
    exhausted its budget.
    """

    status: SearchStatus
    witness: tuple[LassoWord, Verdict] | None
    candidates_tried: int
    rounds_completed: int


def _words(symbols, min_len: int, max_len: int):
    for length in range(min_len, max_len + 1):
        for tup in itertools.product(symbols, repeat=length):
            yield "".join(tup)


def check_emptiness(
    a: Mmqba,
    p: float,
    budget: SearchBudget | None = None,
    *,
    mode: str = CERTIFIED,
) -> SearchResult:
    """Search for an accepted lasso word; NONEMPTY is reliable, the absence
    of an answer is not (the problem admits no full decision procedure)."""
    if budget is None:
        budget = SearchBudget()
    symbols = sorted(a.alphabet)
    tried = 0
    rejected: set[tuple[str, str]] = set()
    for r in range(1, budget.max_rounds + 1):
        max_periods = 2 ** r
        for u in _words(symbols, 0, r):
            for v in _words(symbols, 1, r):
                if (u, v) in rejected:
                    continue
                w = LassoWord(u, v)
                tried += 1
                verdict = run_lasso(
                    a,
                    w,
                    p,
                    max_periods=max_periods,
                    epsilon=budget.epsilon,
                    beta=budget.beta,
                    visit_eps=budget.visit_eps,
                    mode=mode,
                )
                if verdict.status is Status.ACCEPTED:
                    return SearchResult(SearchStatus.NONEMPTY, (w, verdict), tried, r)
                if verdict.status is Status.REJECTED:
                    rejected.add((u, v))
    return SearchResult(SearchStatus.INCONCLUSIVE, None, tried, budget.max_rounds)


@dataclass(frozen=True)
class TimingReport:
    dims: tuple[int, ...]
    symbols_timed: tuple[int, ...]
    per_symbol_seconds: tuple[float, ...]
    exponent: float

    def to_dict(self) -> dict:
        return {
            "dims": list(self.dims),
            "symbols_timed": list(self.symbols_timed),
            "per_symbol_seconds": list(self.per_symbol_seconds),
            "exponent": self.exponent,
        }


def _kernel_matrices(a: Mmqba) -> dict:
    mats = {}
    for sym in a.alphabet:
        m = a.unitary_for(sym)
        mats[sym] = (m.real.tolist(), m.imag.tolist())
    marker = a.unitary_for("#")
    mats["#"] = (marker.real.tolist(), marker.imag.tolist())
    return mats


def reference_run(a: Mmqba, word) -> tuple[float, float, float]:
    """Simulate with a plain per-element Python kernel.

    Returns (acc, rej, seconds over the word symbols, marker excluded).
    The kernel performs the textbook four multiplications and two
    additions per matrix entry, so its wall time tracks the arithmetic
    operation count instead of vectorized-library overhead; its sums
    must agree with the fast path, which the test suite checks.
    """
    dim = a.dim
    mats = _kernel_matrices(a)
    acc_idx = sorted(a.accepting)
    rej_idx = sorted(a.rejecting)
    xr = [0.0] * dim
    xi = [0.0] * dim
    xr[a.initial] = 1.0
    acc_sum = 0.0
    rej_sum = 0.0

    def apply(sym):
        nonlocal xr, xi, acc_sum, rej_sum
        rows_re, rows_im = mats[sym]
        yr = [0.0] * dim
        yi = [0.0] * dim
        for i in range(dim):
            rre = rows_re[i]
            rim = rows_im[i]
            sr = 0.0
            si = 0.0
            for k in range(dim):
                mr = rre[k]
                mi = rim[k]
                vr = xr[k]
                vi = xi[k]
                sr += mr * vr - mi * vi
                si += mr * vi + mi * vr
            yr[i] = sr
            yi[i] = si
        for i in acc_idx:
            acc_sum += yr[i] * yr[i] + yi[i] * yi[i]
            yr[i] = 0.0
            yi[i] = 0.0
        for i in rej_idx:
            rej_sum += yr[i] * yr[i] + yi[i] * yi[i]
            yr[i] = 0.0
            yi[i] = 0.0
        xr, xi = yr, yi

    apply("#")
    start = time.perf_counter()
    for sym in word:
        apply(sym)
    elapsed = time.perf_counter() - start
    return acc_sum, rej_sum, elapsed


def benchmark_step_cost(a: Mmqba, lengths) -> TimingReport:
    """Time the reference kernel on tensor powers of the automaton.

    lengths gives the number of symbols to simulate at each blowup
    level: level i runs on the (i+1)-fold tensor power, so the state
    dimension grows geometrically while the per-step arithmetic grows
    with its square. With two or more levels the report includes the
    fitted log-log growth exponent of the per-symbol time in the
    dimension; with fewer it is NaN.
    """
    lengths = [int(n) for n in lengths]
    if not lengths:
        raise ValueError("lengths must be nonempty")
    if any(n < 1 for n in lengths):
        raise ValueError("every length must be at least 1")
    symbols = sorted(a.alphabet)
    dims = []
    per_symbol = []
    level = a
    for count in lengths:
        word = list(itertools.islice(itertools.cycle(symbols), count))
        _, _, elapsed = reference_run(level, word)
        dims.append(level.dim)
        per_symbol.append(elapsed / count)
        level = union(level, a)
    if len(lengths) >= 2:
        slope = np.polyfit(np.log(dims), np.log(per_symbol), 1)[0]
        exponent = float(slope)
    else:
        exponent = float("nan")
    return TimingReport(
        dims=tuple(dims),
        symbols_timed=tuple(lengths),
        per_symbol_seconds=tuple(per_symbol),
        exponent=exponent,
    )
