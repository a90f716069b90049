"""Higher-order reduced mechanics on matrix Lie groups and trivial principal
bundles: Euler-Poincare and Ostrogradsky-Lie-Poisson flows, Wong-type bundle
dynamics with curvature coupling, and a shooting solver for group 2-splines.
"""

from ._kernels import BACKEND as kernel_backend
from .algebra import (
    Chirality,
    GroupElement,
    Inertia,
    LieAlgebraDef,
    algebra_from_json,
    get_algebra,
    pair,
    rn,
    se3,
    so2,
    so3,
)
from .errors import (
    CutLocusError,
    DegeneracyError,
    DimensionError,
    DivergenceError,
    HyperregularityError,
    LieMechError,
    NonconvergenceError,
)
from .models import (
    ReducedHamiltonianModel,
    ReducedLagrangianModel,
    hamiltonian_counterpart,
    quadratic_k3,
    quadratic_k3_hamiltonian,
    rigid_body,
    rigid_body_hamiltonian,
    spline2,
    spline2_hamiltonian,
)
from .solvers import IntegratorConfig, ShootingProblem, fd_jacobian, integrate, shoot_spline

__version__ = "0.1.0"

__all__ = [
    "Chirality",
    "CutLocusError",
    "DegeneracyError",
    "DimensionError",
    "DivergenceError",
    "GroupElement",
    "HyperregularityError",
    "Inertia",
    "IntegratorConfig",
    "LieAlgebraDef",
    "LieMechError",
    "NonconvergenceError",
    "ReducedHamiltonianModel",
    "ReducedLagrangianModel",
    "ShootingProblem",
    "algebra_from_json",
    "fd_jacobian",
    "get_algebra",
    "hamiltonian_counterpart",
    "integrate",
    "kernel_backend",
    "pair",
    "quadratic_k3",
    "quadratic_k3_hamiltonian",
    "rigid_body",
    "rigid_body_hamiltonian",
    "rn",
    "se3",
    "shoot_spline",
    "so2",
    "so3",
    "spline2",
    "spline2_hamiltonian",
    "__version__",
]
