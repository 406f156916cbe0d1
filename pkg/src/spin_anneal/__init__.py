"""Gain-based annealing solvers for Ising Hamiltonian minimization.

The package bundles a three-dimensional vector spin annealer, four scalar
competitors (coherent Ising machine, its manifold-reduction variant,
momentum Hopfield-Tank, spin-vector Langevin), a BFGS baseline, analytic
circulant benchmark graphs with exact small-instance oracles, energy
landscape analysis, and a seeded statistical benchmark harness.
"""

from .backend import active as active_backend
from .coupling import (
    BoundaryLine,
    CirculantSpec,
    CouplingMatrix,
    circulant_eigenvalues,
    eigenvalue_gap,
    jg_boundaries,
    jg_cyclic,
    jg_reference_energies,
    load_coupling,
    mobius_ladder,
    mobius_thresholds,
    save_coupling,
    sk_instance,
    three_regular_instance,
)
from .errors import DivergenceError, ValidationError
from .ising import (
    brute_force_ground,
    in_orbit,
    ising_energy,
    nearest_hypercube_corner,
    reference_states,
    ring_orbit,
    vector_readout,
)
from .bench import (
    BenchmarkReport,
    SweepSpec,
    grid_search,
    ground_state_probability,
    quality_improvement,
    random_benchmark,
    sweep,
)
from .landscape import (
    CriticalPoint,
    basins,
    find_critical_points,
    find_critical_points_cim,
    phase_map,
    saddle_path_distance,
    visa_hessian,
)
from .solvers import (
    RunResult,
    SolverConfig,
    bfgs_run,
    cim_energy,
    cim_run,
    me_ht_run,
    mr_cim_run,
    run,
    svl_run,
    visa_energy,
    visa_rhs,
    visa_run,
)

__version__ = "0.1.0"
