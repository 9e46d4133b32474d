"""Information lattice, information currents and negativity for boundary-driven free-fermion chains."""
from .chain import (ChainSpec, ReservoirSpec, build_hamiltonian, rates_from_fermi, rates_large_bias,
                    rates_linear_response, uniform_chain, with_bond_defect, with_site_defect)
from .currents import (CurrentLattice, TriangleCurrents, all_triangle_currents, bottom_layer_relation_check,
                       current_lattice, effective_currents, f_matrices, find_shielding_threshold,
                       horizontal_currents, particle_current, particle_current_env, shielding_threshold,
                       site_balance_residual, triangle_currents, vertical_currents)
from .dynamics import check_physicality, default_dt, drift, evolve, solve_ness
from .lattice import (InfoLattice, LatticeCoord, build_info_lattice, reduced_correlation,
                      subsystem_information, total_information)
from .negativity import Bipartition, fermionic_negativity, negativity_quench_series
from .noise import approx_currents, noise_lattice, subsystem_variance, variance_rate, wick_covariance_nn

__all__ = [
    "ChainSpec", "ReservoirSpec", "build_hamiltonian", "rates_from_fermi", "rates_large_bias",
    "rates_linear_response", "uniform_chain", "with_bond_defect", "with_site_defect",
    "CurrentLattice", "TriangleCurrents", "all_triangle_currents", "bottom_layer_relation_check",
    "current_lattice", "effective_currents", "f_matrices", "find_shielding_threshold", "horizontal_currents",
    "particle_current", "particle_current_env", "shielding_threshold", "site_balance_residual",
    "triangle_currents", "vertical_currents",
    "check_physicality", "default_dt", "drift", "evolve", "solve_ness",
    "InfoLattice", "LatticeCoord", "build_info_lattice", "reduced_correlation", "subsystem_information",
    "total_information",
    "Bipartition", "fermionic_negativity", "negativity_quench_series",
    "approx_currents", "noise_lattice", "subsystem_variance", "variance_rate", "wick_covariance_nn",
]
