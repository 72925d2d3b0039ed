"""Distributed Kaczmarz iteration on trees."""

from ._treekz import (
    Operators,
    OmegaSweep,
    SolveResult,
    System,
    Tree,
    TreekzError,
    ValidationError,
    brute_force_iterate,
    error_simulation,
    example1_eigenvalues,
    example1_optima,
    experiment_csv,
    generate,
    load_problem,
    min_norm_solution,
    omega_sweep,
    operators,
    solve,
    weighted_ls_solution,
)

__all__ = [
    "Operators",
    "OmegaSweep",
    "SolveResult",
    "System",
    "Tree",
    "TreekzError",
    "ValidationError",
    "brute_force_iterate",
    "error_simulation",
    "example1_eigenvalues",
    "example1_optima",
    "experiment_csv",
    "generate",
    "load_problem",
    "min_norm_solution",
    "omega_sweep",
    "operators",
    "solve",
    "weighted_ls_solution",
]
