"""McGehee regularization of the planar Hill four-body problem with oblate bodies."""

__version__ = "0.1.0"

from .collision import (
    CollisionManifold,
    EquilibriumPoint,
    ReducedState,
    RegularizabilityReport,
    bifurcation_scan,
    classify_block,
    classify_branch,
    equilibria,
    integral_K,
    on_collision_manifold,
    reduced_field,
)
from .dynamics import CartesianState, hamiltonian, hill_params_from_equilibrium, vector_field
from .equilibrium import (
    OblateBody,
    TriangleConfig,
    lambdas,
    rescale_oblateness,
    side_residual,
    solve_triangle,
)
from .integrator import EventSpec, Trajectory, dense_eval, integrate, integrate_to_collision
from .mcgehee import (
    EnergyLevel,
    McGeheeState,
    energy_residual,
    exponents,
    from_mcgehee,
    physical_time_rate,
    recover_physical_time,
    regularized_field,
    to_mcgehee,
    unscaled_field,
)
from .params import HillParams
