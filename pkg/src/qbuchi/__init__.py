"""Simulation and analysis toolkit for measure-many quantum automata.

The package covers finite-word runs between end markers, infinite runs
on ultimately periodic (lasso) words with finite-step acceptance and
rejection certificates, structural decomposition of the non-halting
space, product constructions, and a dovetailing nonemptiness search.
"""
from .automata import (
    AutomatonFormatError,
    Cutpoint,
    CutpointWarning,
    END_MARKER,
    Mmqba,
    Mmqfa,
    TERMINAL,
    Violation,
    load,
    loads,
    save,
    saves,
    validate,
)
from .numerics import (
    SubspaceBasis,
    is_unitary,
    null_space,
    projector_from_indices,
    tensor,
)
from .semantics import (
    CERTIFIED,
    ClauseReport,
    DEFAULT_BETA,
    DEFAULT_EPSILON,
    DEFAULT_MAX_PERIODS,
    DEFAULT_VISIT_EPS,
    LITERAL,
    LassoWord,
    Status,
    StepRecord,
    TotalState,
    Trace,
    Verdict,
    check_acceptance_clauses,
    initial_state,
    run_lasso,
    run_mmqfa,
    run_prefix,
    step,
    trace_to_csv,
    trace_to_json,
)
from .analysis import (
    Decomposition,
    DecompositionReport,
    LimitEstimate,
    NoEntryReport,
    decompose_nonhalting,
    estimate_limit,
    is_sigma_cycle_subspace,
    no_entry_check,
    verify_decomposition,
)
from .constructions import (
    empty_automaton,
    finite_language_mmqfa,
    restrict_to_lasso,
    union,
)
from .emptiness import (
    SearchBudget,
    SearchResult,
    SearchStatus,
    TimingReport,
    benchmark_step_cost,
    check_emptiness,
    reference_run,
)

__version__ = "0.1.0"

__all__ = [
    "AutomatonFormatError",
    "CERTIFIED",
    "ClauseReport",
    "Cutpoint",
    "CutpointWarning",
    "Decomposition",
    "DecompositionReport",
    "DEFAULT_BETA",
    "DEFAULT_EPSILON",
    "DEFAULT_MAX_PERIODS",
    "DEFAULT_VISIT_EPS",
    "END_MARKER",
    "LITERAL",
    "LassoWord",
    "LimitEstimate",
    "Mmqba",
    "Mmqfa",
    "NoEntryReport",
    "SearchBudget",
    "SearchResult",
    "SearchStatus",
    "Status",
    "StepRecord",
    "SubspaceBasis",
    "TERMINAL",
    "TimingReport",
    "TotalState",
    "Trace",
    "Verdict",
    "Violation",
    "benchmark_step_cost",
    "check_acceptance_clauses",
    "check_emptiness",
    "decompose_nonhalting",
    "empty_automaton",
    "estimate_limit",
    "finite_language_mmqfa",
    "initial_state",
    "is_sigma_cycle_subspace",
    "is_unitary",
    "load",
    "loads",
    "no_entry_check",
    "null_space",
    "projector_from_indices",
    "reference_run",
    "restrict_to_lasso",
    "run_lasso",
    "run_mmqfa",
    "run_prefix",
    "save",
    "saves",
    "step",
    "tensor",
    "trace_to_csv",
    "trace_to_json",
    "union",
    "validate",
    "verify_decomposition",
]
