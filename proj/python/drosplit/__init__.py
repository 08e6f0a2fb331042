"""Solvers for discrete distributionally robust optimization problems."""

from ._core import (
    AmbiguitySet,
    ConvergenceError,
    PreconditionError,
    ProblemInstance,
    couette_solve,
    denoise,
    dual_lp_optimum,
    proj_ambiguity,
    proj_simplex,
    proj_weighted_simplex,
    prox_sup_affine,
    prox_sup_quadratic,
    solve,
    solve_concave_allocation,
)

SOLVERS = ("prox_max", "distributed_fb", "fb_subspaces", "davis_yin")

__all__ = [
    "AmbiguitySet",
    "ConvergenceError",
    "PreconditionError",
    "ProblemInstance",
    "SOLVERS",
    "couette_solve",
    "denoise",
    "dual_lp_optimum",
    "proj_ambiguity",
    "proj_simplex",
    "proj_weighted_simplex",
    "prox_sup_affine",
    "prox_sup_quadratic",
    "solve",
    "solve_concave_allocation",
]
