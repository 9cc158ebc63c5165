"""genvi: variational integrators from Type I/II/III generating functions.

Build a discrete Lagrangian or discrete Hamiltonian (by hand, by Taylor
expansion + quadrature, or by averaging over an oscillator arc), turn it
into a symplectic one-step map, and measure what the map does: convergence
order, symplecticity and symmetry defects, adjoint identities, long-run
energy error.
"""

from .core import (
    PerturbedSystem,
    PhaseState,
    ScalarPotential,
    SeparableSystem,
    cubic_oscillator,
    cubic_perturbation,
    energy,
    harmonic_oscillator,
    momentum_to_velocity,
    total_energy,
    velocity_to_momentum,
)
from .genfunc import (
    DiscreteLagrangian,
    DiscreteLeftHamiltonian,
    DiscreteRightHamiltonian,
    OneStepMap,
    adjoint_left,
    adjoint_map,
    adjoint_right,
    compose,
    legendre_minus,
    legendre_plus,
    legendre_right_to_left,
    legendre_step,
    step_map,
    step_type1,
    step_type2,
    step_type3,
    symmetric_compose,
)
from .rootfind import (
    MaxIterExceeded,
    NonFiniteResidual,
    RootfindError,
    SingularJacobian,
    SolveSettings,
    newton_solve,
    newton_solve_full,
)
from .taylor_vi import (
    QuadratureRule,
    TaylorExpansion,
    build_lagrangian_tvi,
    build_left_hamiltonian_tvi,
    build_right_hamiltonian_tvi,
    euler_a,
    euler_b,
    gauss_legendre,
    h_tvi_trapezoid,
    rectangle_end,
    rectangle_initial,
    stormer_verlet,
    trapezoid,
)
from .averaged import (
    AveragedConfig,
    HoBoundaryFlow,
    SingularBvp,
    averaged_hamiltonian_map,
    averaged_hamiltonian_step,
    averaged_lagrangian_map,
    averaged_lagrangian_step,
    averaged_left_hamiltonian,
    averaged_left_hamiltonian_map,
    averaged_lagrangian,
    averaged_right_hamiltonian,
    exact_dh_ho_map,
    exact_dh_ho_step,
    exact_dl_ho_map,
    exact_dl_ho_step,
    ho_bvp,
    ho_exact_flow,
    kick_drift_kick_map,
    kick_drift_kick_step,
)
from .fpu import (
    FpuSystem,
    OscillatoryEnergy,
    fpu_energy,
    imex_map,
    imex_step,
    initial_state,
    oscillatory_energy,
)
from .verify import (
    ConvergenceResult,
    SweepResult,
    adjoint_defect,
    convergence_order,
    energy_error_sweep,
    symmetry_defect,
    symplecticity_defect,
)

__version__ = "0.1.0"
