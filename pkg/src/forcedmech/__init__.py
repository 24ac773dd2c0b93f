"""Forced mechanics with boundary momenta and non-potential force forms.

The same dynamics is available in four pictures: the variational
principle, the Lagrangian (Euler-Lagrange) equations, Hamilton's
equations and the Poisson-bracket evolution law. Derivatives of the
user-supplied Lagrangian and force form are exact, via hyper-dual
arithmetic.
"""

from .bundles import (
    BaseMismatchError,
    Covector,
    ForceMomentumSample,
    SecondTangent,
    TangentVector,
    TStarTPoint,
    TStarTStarPoint,
    TT2Point,
    TTPoint,
    TTStarPoint,
)
from .expressions import DomainError, ExpressionError, ExpressionSyntaxError, UnknownIdentifierError, parse
from .hamiltonian import NewtonConfig, NoConvergenceError, hamiltonian, legendre_invert
from .integrate import (
    DesiredPath,
    ForceSchedule,
    SampledPath,
    Trajectory,
    boundary_momenta,
    inverse_dynamics,
    simulate_hamiltonian,
    simulate_lagrangian,
)
from .lagrangian import LagrangianSystem, euler_lagrange, legendre, solve_accel
from .linalg import SingularMassMatrixError
from .poisson import evolution_residual, observable, poisson_bracket
from .variational import NonPotentialSystemError, Variation, action, principle_residual

__version__ = "0.1.0"

__all__ = [
    "BaseMismatchError",
    "Covector",
    "DesiredPath",
    "DomainError",
    "ExpressionError",
    "ExpressionSyntaxError",
    "ForceMomentumSample",
    "ForceSchedule",
    "LagrangianSystem",
    "NewtonConfig",
    "NoConvergenceError",
    "NonPotentialSystemError",
    "SampledPath",
    "SecondTangent",
    "SingularMassMatrixError",
    "TStarTPoint",
    "TStarTStarPoint",
    "TT2Point",
    "TTPoint",
    "TTStarPoint",
    "TangentVector",
    "Trajectory",
    "UnknownIdentifierError",
    "Variation",
    "action",
    "boundary_momenta",
    "euler_lagrange",
    "evolution_residual",
    "hamiltonian",
    "inverse_dynamics",
    "legendre",
    "legendre_invert",
    "observable",
    "parse",
    "poisson_bracket",
    "principle_residual",
    "simulate_hamiltonian",
    "simulate_lagrangian",
    "solve_accel",
]
