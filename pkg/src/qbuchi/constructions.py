"""Automaton combinators.

All constructions keep unitarity by design: products of unitaries are
unitary and every classical component is realized as a permutation
matrix. Partial permutations are completed by matching the unused
domain indices to the unused target indices in index order; completion
edges are never reachable with nonzero amplitude because they start in
halting states, whose amplitude is measured away in the same step it
arrives.
"""
from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .automata import Mmqba, Mmqfa, RESERVED_SYMBOLS
from .numerics import tensor
from .semantics import LassoWord


def _product_names(names1: Sequence[str], names2: Sequence[str]) -> tuple[str, ...]:
    return tuple(f"({n1},{n2})" for n1 in names1 for n2 in names2)


def union(m1: Mmqba, m2: Mmqba) -> Mmqba:
    """Tensor-product automaton accepting when either component accepts.

    A product basis state is accepting when at least one component is
    accepting, rejecting when both components are rejecting.
    """
    if set(m1.alphabet) != set(m2.alphabet):
        raise ValueError("union requires identical alphabets")
    d2 = m2.dim
    unitaries = {
        sym: tensor(m1.unitary_for(sym), m2.unitary_for(sym)) for sym in m1.alphabet
    }
    end = None
    if m1.end_marker_unitary is not None or m2.end_marker_unitary is not None:
        end = tensor(m1.unitary_for("#"), m2.unitary_for("#"))
    acc1 = m1.accepting
    acc2 = m2.accepting
    rej1 = m1.rejecting
    rej2 = m2.rejecting
    accepting = set()
    rejecting = set()
    for q1 in range(m1.dim):
        for q2 in range(d2):
            idx = q1 * d2 + q2
            if q1 in acc1 or q2 in acc2:
                accepting.add(idx)
            elif q1 in rej1 and q2 in rej2:
                rejecting.add(idx)
    return Mmqba(
        state_names=_product_names(m1.state_names, m2.state_names),
        alphabet=tuple(m1.alphabet),
        unitaries=unitaries,
        initial=m1.initial * d2 + m2.initial,
        accepting=frozenset(accepting),
        rejecting=frozenset(rejecting),
        end_marker_unitary=end,
    )


def empty_automaton(alphabet: Iterable[str]) -> Mmqba:
    """Two-state automaton with identity dynamics that accepts nothing."""
    symbols = tuple(sorted(set(alphabet)))
    if not symbols:
        raise ValueError("alphabet must be nonempty")
    eye = np.eye(2, dtype=np.complex128)
    return Mmqba(
        state_names=("q0", "qr"),
        alphabet=symbols,
        unitaries={sym: eye.copy() for sym in symbols},
        initial=0,
        accepting=frozenset(),
        rejecting=frozenset({1}),
    )


def _complete_permutation(mapping: dict[int, int], dim: int) -> np.ndarray:
    """Permutation matrix extending an injective partial index map; column s
    of the result is the basis vector of the image of s."""
    targets = list(mapping.values())
    if len(set(targets)) != len(targets):
        raise ValueError("partial permutation is not injective")
    free = iter(t for t in range(dim) if t not in set(targets))
    m = np.zeros((dim, dim), dtype=np.complex128)
    for src in range(dim):
        tgt = mapping[src] if src in mapping else next(free)
        m[tgt, src] = 1.0
    return m


def finite_language_mmqfa(words: Iterable[str], alphabet: Iterable[str]) -> Mmqfa:
    """MMQFA accepting exactly the given finite words with probability 1.

    States enumerate every string up to the longest word's length, so the
    read prefix is tracked exactly; longer inputs are rejected during
    reading. Each tracked string gets its own rejecting state and each
    language word its own accepting state, which keeps the halting
    transitions injective. State count is exponential in the longest
    word's length over alphabets with two or more symbols.
    """
    symbols = tuple(sorted(set(alphabet)))
    if not symbols:
        raise ValueError("alphabet must be nonempty")
    for sym in symbols:
        if len(sym) != 1 or sym in RESERVED_SYMBOLS:
            raise ValueError(f"invalid alphabet symbol {sym!r}")
    language = sorted(set(words))
    for w in language:
        for ch in w:
            if ch not in symbols:
                raise ValueError(f"word {w!r} uses symbol {ch!r} outside the alphabet")
    depth = max((len(w) for w in language), default=0)

    nodes = [""]
    level = [""]
    for _ in range(depth):
        level = [s + c for s in level for c in symbols]
        nodes.extend(level)
    node_index = {s: i for i, s in enumerate(nodes)}
    n_nodes = len(nodes)
    reject_of = {s: n_nodes + i for i, s in enumerate(nodes)}
    accept_of = {w: 2 * n_nodes + i for i, w in enumerate(language)}
    dim = 2 * n_nodes + len(language)

    unitaries = {}
    for sym in symbols:
        mapping = {}
        for s in nodes:
            if len(s) < depth:
                mapping[node_index[s]] = node_index[s + sym]
            else:
                mapping[node_index[s]] = reject_of[s]
        unitaries[sym] = _complete_permutation(mapping, dim)
    terminal_map = {}
    for s in nodes:
        if s in accept_of:
            terminal_map[node_index[s]] = accept_of[s]
        else:
            terminal_map[node_index[s]] = reject_of[s]
    terminal = _complete_permutation(terminal_map, dim)

    names = (
        [f"s_{s}" for s in nodes]
        + [f"r_{s}" for s in nodes]
        + [f"acc_{w}" for w in language]
    )
    return Mmqfa(
        state_names=tuple(names),
        alphabet=symbols,
        unitaries=unitaries,
        initial=0,
        accepting=frozenset(accept_of.values()),
        rejecting=frozenset(reject_of.values()),
        terminal_unitary=terminal,
    )


def _normalize_lasso(w: LassoWord) -> LassoWord:
    """Rotate the cycle into the prefix until the prefix no longer ends with
    the cycle's last symbol; the denoted infinite word is unchanged."""
    u, v = w.prefix, w.cycle
    while u and u[-1] == v[-1]:
        v = v[-1] + v[:-1]
        u = u[:-1]
    return LassoWord(u, v)


def restrict_to_lasso(m: Mmqba, w: LassoWord) -> Mmqba:
    """Product with a deterministic matcher so only the given lasso survives.

    The matcher walks the positions of prefix+cycle; any mismatching
    symbol routes its amplitude to a dead state, and every product state
    with a dead matcher component rejects, so the mass of a mismatching
    input is measured away at the mismatch step. On the matching input
    the matcher contributes a factor 1 and the component automaton
    evolves exactly as unrestricted. Each live position gets its own
    dead state so the mismatch transitions stay injective; the lasso is
    first rotated so the advance map has no target collisions.
    """
    alphabet = set(m.alphabet)
    for ch in w.prefix + w.cycle:
        if ch not in alphabet:
            raise ValueError(f"symbol {ch!r} is not in the automaton alphabet")
    norm = _normalize_lasso(w)
    u, v = norm.prefix, norm.cycle
    live = len(u) + len(v)
    expected = u + v
    dim_matcher = 2 * live

    def advance(i: int) -> int:
        return i + 1 if i < live - 1 else len(u)

    matchers = {}
    for sym in m.alphabet:
        mapping = {}
        for i in range(live):
            mapping[i] = advance(i) if expected[i] == sym else live + i
        matchers[sym] = _complete_permutation(mapping, dim_matcher)

    matcher_names = [f"m{i}" for i in range(live)] + [f"d{i}" for i in range(live)]
    dm = m.dim
    unitaries = {sym: tensor(matchers[sym], m.unitary_for(sym)) for sym in m.alphabet}
    end = None
    if m.end_marker_unitary is not None:
        end = tensor(np.eye(dim_matcher, dtype=np.complex128), m.end_marker_unitary)
    accepting = set()
    rejecting = set()
    for k in range(dim_matcher):
        for q in range(dm):
            idx = k * dm + q
            if k < live:
                if q in m.accepting:
                    accepting.add(idx)
                elif q in m.rejecting:
                    rejecting.add(idx)
            else:
                rejecting.add(idx)
    return Mmqba(
        state_names=_product_names(matcher_names, m.state_names),
        alphabet=tuple(m.alphabet),
        unitaries=unitaries,
        initial=m.initial,
        accepting=frozenset(accepting),
        rejecting=frozenset(rejecting),
        end_marker_unitary=end,
    )
