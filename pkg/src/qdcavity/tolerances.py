"""Numerical tolerances shared by the solvers, checks and tests."""

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    # operator identities on truncation-safe rows
    algebra: float = 1e-12
    hermiticity: float = 1e-12
    commutator: float = 1e-10
    heisenberg: float = 1e-10
    # state-level
    initial_deficit: float = 1e-9
    cutoff_deficit: float = 1e-6
    norm: float = 1e-9
    norm_step: float = 1e-10
    conserved: float = 1e-8
    solver_equivalence: float = 1e-8
    # closed-form vs block solver, measured on the calibration battery
    analytic: float = 1e-8
    # densities
    trace: float = 1e-10
    psd: float = 1e-10
    symmetry: float = 1e-10
    undeformed_limit: float = 1e-3
    # population pattern matching for the structural classifier
    structure: float = 0.02
    custom_normalization: float = 1e-12


TOL = Tolerances()
