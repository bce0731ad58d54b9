"""Cross-modal sequence alignment via relaxed optimal transport.

Thin re-export of the compiled extension. All functions take and return
numpy arrays, lists, and dicts; indices are 0-based throughout.
"""

from ._otmix import (
    Error,
    a_score,
    cost_matrix,
    cross_entropy,
    extract_alignment,
    masses_from_norms,
    mixup,
    modality_gap,
    relaxed_grad,
    run_bench,
    solve_exact,
    solve_relaxed,
    symmetric_kl,
    symmetric_kl_grad,
    synth,
    total_objective,
    window_bounds,
)

__all__ = [
    "Error",
    "a_score",
    "cost_matrix",
    "cross_entropy",
    "extract_alignment",
    "masses_from_norms",
    "mixup",
    "modality_gap",
    "relaxed_grad",
    "run_bench",
    "solve_exact",
    "solve_relaxed",
    "symmetric_kl",
    "symmetric_kl_grad",
    "synth",
    "total_objective",
    "window_bounds",
]
