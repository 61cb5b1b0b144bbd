"""Thermal-bath dynamics for one degree of freedom, classical and quantum.

The package covers the full pipeline: generalized Langevin ensembles, the
friction operators that make the Gibbs state stationary, the master-equation
generators built from them, complete-positivity certificates, and the
thermodynamic bookkeeping (energy, entropy, entropy production and flow,
free energy) along density-matrix trajectories.
"""

from .classical import ClassicalParams, simulate_ensemble, stationary_check
from .config import RunConfig, build_config, load_config
from .friction import (
    FrictionKind,
    bernoulli_series_friction,
    hermitian_friction_pair,
    nonhermitian_friction,
    nonhermitian_friction_closed_form,
    nonhermitian_friction_pair,
    spectral_friction_hermitian,
    sylvester_solve,
)
from .linalg import (
    HermitianEigenSystem,
    commutator,
    anticommutator,
    devec,
    hermitian_eigendecompose,
    left_mult_superop,
    matrix_exponential,
    matrix_function_hermitian,
    right_mult_superop,
    vec,
)
from .liouvillian import (
    LindbladReport,
    ModelKind,
    build_liouvillian,
    choi_matrix,
    choi_min_eigenvalue,
    lindblad_region_check,
    qome_mapping,
)
from .oscillator import (
    OscillatorModel,
    gibbs_state,
    hamiltonian,
    ladder_operators,
    momentum_matrix,
    position_matrix,
)
from .propagate import Trajectory, evolve, mixed_power_law, pure_level, spectral_probe
from .thermo import (
    ThermoDiagnostics,
    ThermoRecord,
    dissipator_part,
    entropy_rates,
    equipartition_residuals,
    free_energy,
    heat_rate,
    relative_entropy,
    von_neumann_entropy,
    work_rate,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
