import warnings

import numpy as np
import pytest
from scipy.linalg import expm

from infolat import (ReservoirSpec, build_hamiltonian, build_info_lattice, evolve, rates_large_bias, uniform_chain,
                     with_site_defect)
from infolat.errors import NumericalError, ValidationError
from infolat.trajectories import (MAX_SITES, StepSizeWarning, annihilation_operators, build_fock_operators,
                                  correlation_from_state, ensemble_correlation, gaussian_density_matrix,
                                  lift_quadratic, mcwf_run, product_state, segment_entropies,
                                  trajectory_info_lattice, trajectory_streams, vacuum)

from conftest import partial_trace_keep, random_correlation, thermal_gaussian, von_neumann_bits


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_canonical_anticommutation(n):
    cs = [c.toarray() for c in annihilation_operators(n)]
    eye = np.eye(2 ** n)
    for i in range(n):
        for j in range(n):
            np.testing.assert_array_equal(cs[i] @ cs[j].conj().T + cs[j].conj().T @ cs[i], eye * (i == j))
            np.testing.assert_array_equal(cs[i] @ cs[j] + cs[j] @ cs[i], 0)


def test_fock_size_limit():
    with pytest.raises(ValidationError):
        annihilation_operators(MAX_SITES + 1)


def test_single_particle_sector_reproduces_hopping_matrix(rng):
    n = 4
    h = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    h = h + h.conj().T
    Hf = lift_quadratic(h, annihilation_operators(n)).toarray()
    basis = [product_state(np.eye(n, dtype=int)[i]) for i in range(n)]
    block = np.array([[np.vdot(basis[i], Hf @ basis[j]) for j in range(n)] for i in range(n)])
    np.testing.assert_allclose(block, h, atol=1e-13)


def test_gaussian_density_matrix_reproduces_correlations(rng):
    n = 4
    C = random_correlation(rng, n, 0.05, 0.95)
    cs = annihilation_operators(n)
    rho = gaussian_density_matrix(C, cs)
    assert np.trace(rho) == pytest.approx(1)
    np.testing.assert_allclose(correlation_from_state(rho, cs), C, atol=1e-12)
    dense = [c.toarray() for c in cs]
    np.testing.assert_allclose(rho, thermal_gaussian(C, dense), atol=1e-10)


def test_product_state_and_vacuum():
    cs = annihilation_operators(3)
    C = correlation_from_state(product_state([1, 0, 1]), cs)
    np.testing.assert_allclose(C, np.diag([1, 0, 1]))
    assert not correlation_from_state(vacuum(3), cs).any()


def test_unitary_trajectory_matches_propagator():
    spec = uniform_chain(4)
    ops = build_fock_operators(spec)
    psi0 = product_state([1, 1, 0, 0])
    ens = mcwf_run(ops.hamiltonian, [], psi0, 0.05, 100, 3, seed=1)
    exact = expm(-1j * 5.0 * ops.hamiltonian.toarray()) @ psi0
    for k in range(3):
        assert abs(np.vdot(exact, ens.final[k])) == pytest.approx(1, abs=1e-12)
    np.testing.assert_allclose(np.linalg.norm(ens.states, axis=-1), 1, atol=1e-12)
    assert not ens.n_jumps.any()


def test_single_site_filling_within_three_sigma():
    g, dt = 1.0, 0.01
    cs = annihilation_operators(1)
    ens = mcwf_run(np.zeros((2, 2)), [np.sqrt(g) * cs[0].T], vacuum(1), dt, 100, 2000, seed=3, sample_every=25)
    for t, states in zip(ens.times, ens.states):
        mean, err = ensemble_correlation(states, cs)
        expected = 1 - np.exp(-g * t)
        assert abs(mean[0, 0].real - expected) <= 3 * err[0, 0].real + 1e-12


def test_rng_determinism_and_stream_independence():
    ops = build_fock_operators(uniform_chain(3), rates_large_bias(3, 1, 0.2))
    a = mcwf_run(ops.hamiltonian, ops.jumps, vacuum(3), 0.05, 600, 5, seed=42)
    b = mcwf_run(ops.hamiltonian, ops.jumps, vacuum(3), 0.05, 600, 5, seed=42)
    c = mcwf_run(ops.hamiltonian, ops.jumps, vacuum(3), 0.05, 600, 9, seed=42)
    np.testing.assert_array_equal(a.states, b.states)
    np.testing.assert_array_equal(a.states, c.states[:, :5])
    d = mcwf_run(ops.hamiltonian, ops.jumps, vacuum(3), 0.05, 600, 5, seed=43)
    assert not np.array_equal(a.states, d.states)
    assert len(trajectory_streams(0, 4)) == 4


def test_jump_probability_guards():
    ops = build_fock_operators(uniform_chain(2), ReservoirSpec([30.0, 0.0], [0.0, 0.0]))
    with pytest.raises(NumericalError):
        mcwf_run(ops.hamiltonian, ops.jumps, vacuum(2), 0.05, 5, 2, seed=0)
    with pytest.warns(StepSizeWarning):
        ens = mcwf_run(ops.hamiltonian, ops.jumps, vacuum(2), 0.01, 5, 2, seed=0)
    assert ens.warnings
    with pytest.raises(ValidationError):
        mcwf_run(ops.hamiltonian, ops.jumps, vacuum(3), 0.01, 5, 2, seed=0)


def test_small_open_chain_tracks_lindblad_evolution():
    n, dt, steps = 3, 0.01, 200
    spec = with_site_defect(uniform_chain(n), 2, 1.0)
    res = rates_large_bias(n, 1.0, 0.3)
    ops = build_fock_operators(spec, res)
    ens = mcwf_run(ops.hamiltonian, ops.jumps, vacuum(n), dt, steps, 2000, seed=9)
    exact = evolve(build_hamiltonian(spec), res, np.zeros((n, n), complex), dt, steps, method="exact").final
    mean, err = ensemble_correlation(ens.final, ops.annihilators)
    z = np.abs(mean.real - exact.real) / np.maximum(err.real, 1e-12)
    z_im = np.abs(mean.imag - exact.imag) / np.maximum(err.imag, 1e-12)
    assert max(z.max(), z_im.max()) < 4.5


def _slater(rng, n, n_particles):
    h = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    h = h + h.conj().T
    cs = annihilation_operators(n)
    psi0 = product_state([1] * n_particles + [0] * (n - n_particles))
    psi = expm(-1j * lift_quadratic(h, cs).toarray()) @ psi0
    return psi, correlation_from_state(psi, cs)


@pytest.mark.parametrize("n,k", [(3, 1), (4, 2), (5, 2)])
def test_slater_segment_entropies_match_gaussian_lattice(n, k):
    rng = np.random.default_rng(n * 10 + k)
    psi, C = _slater(rng, n, k)
    lat = trajectory_info_lattice(psi[None])
    exact = build_info_lattice(C)
    np.testing.assert_allclose(lat.triangle, exact.triangle, atol=1e-9)
    np.testing.assert_allclose(lat.site, exact.site, atol=1e-9)


def test_average_information_exceeds_mixture_information():
    n = 4
    ops = build_fock_operators(with_site_defect(uniform_chain(n), 2, 1.5), rates_large_bias(n, 1, 0.4))
    ens = mcwf_run(ops.hamiltonian, ops.jumps, vacuum(n), 0.05, 200, 64, seed=5)
    states = ens.final
    rho = np.einsum("ki,kj->ij", states, states.conj()) / len(states)
    S = segment_entropies(states, n).mean(axis=0)
    for ell in range(n):
        for jl in range(n - ell):
            keep = list(range(jl, jl + ell + 1))
            mixed = von_neumann_bits(partial_trace_keep(rho, keep, n))
            assert S[ell, jl] <= mixed + 1e-9


def test_trajectory_lattice_accepts_ensemble():
    n = 3
    ops = build_fock_operators(uniform_chain(n), rates_large_bias(n, 1, 0))
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        ens = mcwf_run(ops.hamiltonian, ops.jumps, vacuum(n), 0.05, 40, 4, seed=2, sample_every=10)
    assert ens.states.shape == (5, 4, 8)
    lat = trajectory_info_lattice(ens, sample=2)
    np.testing.assert_allclose(lat.site[~np.isnan(lat.site)].sum(), np.nanmean(lat.triangle[n - 1]), atol=1e-12)
    assert ens.n_sites == n
