"""Minimum-rank Gram matrix completion and exact rational SOS certificates.

The heavy lifting lives in the C++ extension module; this package re-exports
its public surface.
"""

from gramsos._core import (
    BenchInstance,
    ConstraintSystem,
    GramsosError,
    HistoryRow,
    MonomialBasis,
    Polynomial,
    SolveResult,
    SolverConfig,
    Variant,
    build_basis,
    build_constraints,
    constraints_from_json,
    expand_square_sum,
    freedom_ratio,
    nuclear_norm,
    random_instance,
    solve,
    sos_certificate,
    threshold,
    verify_certificate,
)

__version__ = "0.1.0"

__all__ = [
    "BenchInstance",
    "ConstraintSystem",
    "GramsosError",
    "HistoryRow",
    "MonomialBasis",
    "Polynomial",
    "SolveResult",
    "SolverConfig",
    "Variant",
    "build_basis",
    "build_constraints",
    "constraints_from_json",
    "expand_square_sum",
    "freedom_ratio",
    "nuclear_norm",
    "random_instance",
    "solve",
    "sos_certificate",
    "threshold",
    "verify_certificate",
]
