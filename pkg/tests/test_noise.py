import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from infolat import build_hamiltonian, rates_large_bias, solve_ness, uniform_chain
from infolat.dynamics import rk4_step
from infolat.errors import ValidationError
from infolat.lattice import cells
from infolat.noise import (KL_PREFACTOR, approx_currents, current_number_covariance, noise_lattice,
                           subsystem_variance, variance_rate, wick_covariance_hop_number, wick_covariance_nn)

from conftest import N3_CLEAN, dense_annihilators, random_correlation, random_system, thermal_gaussian


def expect(rho, op):
    return np.trace(rho @ op)


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_variance_matches_exact_enumeration(n):
    rng = np.random.default_rng(100 + n)
    C = random_correlation(rng, n, 0.05, 0.95)
    cs = dense_annihilators(n)
    rho = thermal_gaussian(C, cs)
    nums = [c.conj().T @ c for c in cs]
    for ell, jl in cells(n):
        NA = sum(nums[jl:jl + ell + 1])
        exact = expect(rho, NA @ NA) - expect(rho, NA) ** 2
        assert subsystem_variance(C[jl:jl + ell + 1, jl:jl + ell + 1]) == pytest.approx(exact.real, abs=1e-8)


@pytest.mark.parametrize("n", [3, 5])
def test_wick_covariances_match_exact_enumeration(n):
    rng = np.random.default_rng(200 + n)
    C = random_correlation(rng, n, 0.05, 0.95)
    H = build_hamiltonian(uniform_chain(n, J=0.8))
    cs = dense_annihilators(n)
    rho = thermal_gaussian(C, cs)
    num = [c.conj().T @ c for c in cs]
    for i in range(n):
        for j in range(n):
            if i != j:
                exact = expect(rho, num[i] @ num[j]) - expect(rho, num[i]) * expect(rho, num[j])
                assert wick_covariance_nn(C, i + 1, j + 1) == pytest.approx(exact.real, abs=1e-8)
    for a in range(n):
        for b in range(n):
            hop = cs[a].conj().T @ cs[b]
            for c in range(n):
                exact = expect(rho, hop @ num[c]) - expect(rho, hop) * expect(rho, num[c])
                assert abs(wick_covariance_hop_number(C, a + 1, b + 1, c + 1) - exact) < 1e-8
    for a in range(n - 1):
        J = H[a, a + 1].real
        cur = 1j * J * (cs[a].conj().T @ cs[a + 1] - cs[a + 1].conj().T @ cs[a])
        for c in range(n):
            exact = expect(rho, cur @ num[c]) - expect(rho, cur) * expect(rho, num[c])
            assert current_number_covariance(H, C, a + 1, c + 1) == pytest.approx(exact.real, abs=1e-8)


def test_n3_oracle_values():
    assert subsystem_variance(N3_CLEAN) == pytest.approx(0.57, abs=1e-14)
    assert wick_covariance_nn(N3_CLEAN, 1, 2) == pytest.approx(-0.04, abs=1e-14)
    with pytest.raises(ValidationError):
        wick_covariance_nn(N3_CLEAN, 2, 2)
    with pytest.raises(ValidationError):
        wick_covariance_nn(N3_CLEAN, 1, 4)


@given(st.integers(2, 7), st.integers(0, 2 ** 31))
@settings(max_examples=30, deadline=None)
def test_variance_additivity_breaks_by_covariances(n, seed):
    rng = np.random.default_rng(seed)
    C = random_correlation(rng, n)
    cut = int(rng.integers(1, n))
    cov = sum(wick_covariance_nn(C, i, j) for i in range(1, cut + 1) for j in range(cut + 1, n + 1))
    lhs = subsystem_variance(C)
    rhs = subsystem_variance(C[:cut, :cut]) + subsystem_variance(C[cut:, cut:]) + 2 * cov
    assert lhs == pytest.approx(rhs, abs=1e-12)


@given(st.integers(1, 7), st.integers(0, 2 ** 31))
@settings(max_examples=30, deadline=None)
def test_variance_bounds(n, seed):
    C = random_correlation(np.random.default_rng(seed), n, 0.0, 1.0)
    lat = noise_lattice(C)
    for ell, jl in cells(n):
        assert -1e-14 <= lat.variance[ell, jl] <= (ell + 1) / 4 + 1e-14


def test_product_state_has_flat_noise_lattice():
    C = np.diag([0.1, 0.9, 0.5, 0.3, 0.7]).astype(complex)
    lat = noise_lattice(C)
    np.testing.assert_allclose(np.nan_to_num(lat.kappa[1:]), 0, atol=1e-15)
    np.testing.assert_allclose(np.nan_to_num(lat.i_appr[1:]), 0, atol=1e-14)
    np.testing.assert_allclose(lat.i_appr[0], 1 - KL_PREFACTOR * np.array([0.09, 0.09, 0.25, 0.21, 0.21]))


def test_noise_lattice_kappa_is_second_difference(rng):
    C = random_correlation(rng, 5)
    lat = noise_lattice(C)
    v = lat.variance
    assert lat.kappa[2, 1] == pytest.approx(v[2, 1] - v[1, 1] - v[1, 2] + v[0, 2])
    assert lat.kappa[1, 3] == pytest.approx(v[1, 3] - v[0, 3] - v[0, 4])


@pytest.mark.parametrize("closed", [False, True])
def test_variance_rate_by_finite_differences(closed):
    rng = np.random.default_rng(31)
    n, dt = 5, 1e-4
    H, res = random_system(rng, n, closed)
    C = random_correlation(rng, n)
    Cp, Cm = rk4_step(H, res, C, dt), rk4_step(H, res, C, -dt)
    for ell, jl in cells(n):
        seg = (jl + 1, jl + ell + 1)
        sl = slice(jl, jl + ell + 1)
        fd = (subsystem_variance(Cp[sl, sl]) - subsystem_variance(Cm[sl, sl])) / (2 * dt)
        assert variance_rate(C, H, res, seg) == pytest.approx(fd, abs=1e-6)


def test_approx_currents_bottom_layer_n3():
    H = build_hamiltonian(uniform_chain(3))
    res = rates_large_bias(3, 1, 0)
    ac = approx_currents(N3_CLEAN, res, H)
    # C_11 = 0.6, C_33 = 0.4, particle current 0.4
    assert ac.right[0, 0] == pytest.approx(KL_PREFACTOR * 0.4 * 0.2)
    assert ac.left[0, 0] == 0 and ac.right[0, 2] == 0
    assert ac.left[0, 2] == pytest.approx(-KL_PREFACTOR * 0.4 * -0.2)
    assert ac.env[0, 0] == pytest.approx(KL_PREFACTOR * -0.4 * 0.2)


def test_approx_currents_upper_layers_use_covariances(rng):
    n = 5
    H, res = random_system(rng, n)
    C = random_correlation(rng, n)
    ac = approx_currents(C, res, H)
    assert ac.left[2, 1] == pytest.approx(2 * KL_PREFACTOR * current_number_covariance(H, C, 1, 4))
    assert ac.right[2, 1] == pytest.approx(-2 * KL_PREFACTOR * current_number_covariance(H, C, 4, 2))
    rates = res.gamma_in + res.gamma_out
    assert ac.env[2, 1] == pytest.approx(-KL_PREFACTOR * (rates[1] + rates[3]) * wick_covariance_nn(C, 2, 4))
    assert ac.left[3, 0] == 0 and ac.right[3, 1] == 0


def test_klich_levitov_quality_on_defect_free_ness():
    # ell=1 approximations on a weakly driven chain follow the exact site values closely
    from infolat import build_info_lattice
    n = 9
    H = build_hamiltonian(uniform_chain(n))
    C = solve_ness(H, rates_large_bias(n, 1, 0.75))
    exact = build_info_lattice(C).site
    appr = noise_lattice(C).i_appr
    bulk = [jl for ell, jl in cells(n) if ell == 1 and 1 <= jl < n - 3]
    for jl in bulk:
        assert appr[1, jl] == pytest.approx(exact[1, jl], rel=0.25)
