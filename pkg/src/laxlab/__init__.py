"""laxlab: algebraic linearization of integrable N-body systems.

Inverse-square (free and confined), inverse-sinh-square and relativistic
particle systems (the latter with an optional periodic perturbation), with
their Lax data, linearizing trace functionals, exact solvers and an
independent ODE oracle.
"""
from .errors import (BranchAmbiguityError, CollisionError, ConfigError, ConvergenceError,
                     IntegrationError, LaxLabError, MatrixOverflowError, PoleError,
                     UnsupportedFamilyError)
from .integrate import IntegratorOptions, Method, Trajectory, fd_derivative, integrate
from .kernels import DEFAULT_BACKEND
from .observables import (ObservableFrame, companion, frame, linear_evolution_matrix,
                          predicted_rates, superintegrals)
from .solver import (AlgebraicSolution, evolve_G, evolve_G_perturbed, make_solution,
                     period_report, spectral_positions)
from .systems import (Family, LaxData, PhaseState, RSCase, SystemSpec, build_lax,
                      eom_rhs, hamiltonian, interaction_f)

__version__ = "0.1.0"

__all__ = [
    "AlgebraicSolution", "BranchAmbiguityError", "CollisionError", "ConfigError",
    "ConvergenceError", "DEFAULT_BACKEND", "Family", "IntegrationError",
    "IntegratorOptions", "LaxData", "LaxLabError", "MatrixOverflowError", "Method",
    "ObservableFrame", "PhaseState", "PoleError", "RSCase", "SystemSpec", "Trajectory",
    "UnsupportedFamilyError", "build_lax", "companion", "eom_rhs", "evolve_G",
    "evolve_G_perturbed", "fd_derivative", "frame", "hamiltonian", "integrate",
    "interaction_f", "linear_evolution_matrix", "make_solution", "period_report",
    "predicted_rates", "spectral_positions", "superintegrals",
]
