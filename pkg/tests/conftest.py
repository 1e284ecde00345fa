import numpy as np
import pytest

from qbuchi.automata import Mmqba
from qbuchi.fixtures import list_fixtures, load_fixture

FIXTURE_NAMES = (
    "finite_ab",
    "lang_a_omega",
    "lang_a_prefix",
    "lang_aab_cycle",
    "lang_ab_cycle",
    "lang_inf_a",
    "no_entry",
    "reject_all",
    "swap_halt_once",
)


@pytest.fixture(scope="session")
def fixtures():
    return {name: load_fixture(name) for name in list_fixtures()}


def haar_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    """Haar-ish random unitary from the QR decomposition of a complex
    Gaussian matrix, with the R diagonal phase divided out."""
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diagonal(r) / np.abs(np.diagonal(r)))


def make_automaton(unitaries, accepting, rejecting, initial=0, alphabet=None):
    """Inline automaton with states named q0..qN-1."""
    mats = {k: np.asarray(v, dtype=complex) for k, v in unitaries.items()}
    dim = next(iter(mats.values())).shape[0]
    if alphabet is None:
        alphabet = tuple(sorted(mats))
    return Mmqba(
        state_names=tuple(f"q{i}" for i in range(dim)),
        alphabet=tuple(alphabet),
        unitaries=mats,
        initial=initial,
        accepting=frozenset(accepting),
        rejecting=frozenset(rejecting),
    )


def two_block_automaton() -> Mmqba:
    """Five states: a rotation block {q0,q1} that never produces halting
    probability, a rejecting sink q2 nobody reaches, and a leaking block
    {q3} that sends half its mass to the accepting q4 each step. The
    non-halting split is span{q0,q1} against span{q3}."""
    c, s = np.cos(1.0), np.sin(1.0)
    r = 1.0 / np.sqrt(2.0)
    v = np.zeros((5, 5))
    v[0, 0], v[1, 0] = c, s
    v[0, 1], v[1, 1] = -s, c
    v[2, 2] = 1.0
    v[3, 3], v[4, 3] = r, r
    v[3, 4], v[4, 4] = -r, r
    return make_automaton({"a": v}, accepting=[4], rejecting=[2])


def acc_then_rej_automaton() -> Mmqba:
    """Half the mass accepts at step 1, the surviving half rejects at
    step 2. At any cutpoint below 1/2 the literal rejection clause
    (rej < p, ignoring mass still in flight) fires a step before the
    rejection lands, so the literal and certified modes disagree."""
    r = 1.0 / np.sqrt(2.0)
    v = np.zeros((4, 4))
    v[1, 0], v[3, 0] = r, r
    v[0, 1] = 1.0
    v[1, 2], v[3, 2] = r, -r
    v[2, 3] = 1.0
    return make_automaton({"a": v}, accepting=[1], rejecting=[2])
