"""Mixed ambiguous/unambiguous discrimination of three pure states.

Thin wrapper over the compiled ``_core`` module. Matrices come back as
complex numpy arrays; state lists are 2-d arrays with one ket per row.
"""

from ._core import (
    QsdError,
    Scheme,
    brute_force_success,
    build_mixed_general,
    build_mixed_special,
    build_rra,
    build_unambiguous_special,
    build_zero_aux,
    hermitian_eig,
    isometry_completion,
    optimize_unambiguous_special,
    right_classicality_check,
    separable_decomposition,
    simulate,
    states_from_gram,
    sweep,
    theorem21_check,
    theorem31_check,
    xu_max_unambiguous,
    zero_aux_posterior,
)

__all__ = [
    "QsdError",
    "Scheme",
    "brute_force_success",
    "build_mixed_general",
    "build_mixed_special",
    "build_rra",
    "build_unambiguous_special",
    "build_zero_aux",
    "hermitian_eig",
    "isometry_completion",
    "optimize_unambiguous_special",
    "right_classicality_check",
    "separable_decomposition",
    "simulate",
    "states_from_gram",
    "sweep",
    "theorem21_check",
    "theorem31_check",
    "xu_max_unambiguous",
    "zero_aux_posterior",
]
