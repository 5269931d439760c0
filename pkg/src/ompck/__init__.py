"""Orthogonal matching pursuit run for ceil(cK) iterations, with the RIP-based
iteration bounds, exact small-scale restricted isometry constants, trace-level
checks of the supporting inequalities and a Monte Carlo recovery harness."""
from .harness import EnsembleSpec, PhaseGrid, gaussian_matrix, phase_transition, run_trial, sparse_signal
from .linalg import (IncrementalSolver, SingularSupportError, correlations, least_squares_on_support, mat_vec,
                     projection_residual, solver_extend)
from .omp import OmpConfig, OmpTrace, SparseSignal, check_exact_recovery, iteration_budget, omp_run, support_inclusion
from .rip import (RicProfile, emit_bound_curve, exact_ric, min_self_consistent_c, proposed_bound_c, ric_profile,
                  theorem1_condition, zhang_bound_c)

__all__ = [
    "EnsembleSpec", "PhaseGrid", "gaussian_matrix", "phase_transition", "run_trial", "sparse_signal",
    "IncrementalSolver", "SingularSupportError", "correlations", "least_squares_on_support", "mat_vec",
    "projection_residual", "solver_extend",
    "OmpConfig", "OmpTrace", "SparseSignal", "check_exact_recovery", "iteration_budget", "omp_run",
    "support_inclusion",
    "RicProfile", "emit_bound_curve", "exact_ric", "min_self_consistent_c", "proposed_bound_c", "ric_profile",
    "theorem1_condition", "zhang_bound_c",
]
