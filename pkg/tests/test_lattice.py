import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from infolat import (LatticeCoord, build_hamiltonian, build_info_lattice, rates_large_bias,
                     reduced_correlation, solve_ness, subsystem_information, total_information, uniform_chain)
from infolat.errors import PhysicalityError, ValidationError
from infolat.lattice import cells, coord_of

from conftest import (N3_CLEAN, dense_annihilators, partial_trace_keep, random_correlation, thermal_gaussian,
                      von_neumann_bits)


def test_reduced_correlation_examples():
    np.testing.assert_array_equal(reduced_correlation(N3_CLEAN, [1]), [[0.6]])
    np.testing.assert_array_equal(reduced_correlation(N3_CLEAN, [1, 2, 3]), N3_CLEAN)
    np.testing.assert_array_equal(reduced_correlation(N3_CLEAN, [1, 3]), [[0.6, 0], [0, 0.4]])
    np.testing.assert_array_equal(reduced_correlation(N3_CLEAN, [3, 1]), [[0.4, 0], [0, 0.6]])


@pytest.mark.parametrize("sites", [[], [0], [4], [1, 5]])
def test_reduced_correlation_out_of_range(sites):
    with pytest.raises(ValidationError):
        reduced_correlation(N3_CLEAN, sites)


@pytest.mark.parametrize("c,expected", [(0.5, 0.0), (0.0, 1.0), (1.0, 1.0), (0.6, 0.029049405545331)])
def test_single_site_information(c, expected):
    assert subsystem_information(np.array([[c]])) == pytest.approx(expected, abs=1e-13)


def test_information_rejects_unphysical():
    with pytest.raises(PhysicalityError):
        subsystem_information(np.array([[1.1]]))
    assert subsystem_information(np.array([[1 + 5e-11]])) == pytest.approx(1.0)


def test_singlet_lattice():
    lat = build_info_lattice(np.array([[0.5, -0.5], [-0.5, 0.5]]))
    assert lat[LatticeCoord(0, 2)] == pytest.approx(0, abs=1e-12)
    assert lat[LatticeCoord(0, 4)] == pytest.approx(0, abs=1e-12)
    assert lat[LatticeCoord(1, 3)] == pytest.approx(2, abs=1e-12)


def test_maximally_mixed_lattice_is_zero():
    lat = build_info_lattice(0.5 * np.eye(5))
    assert np.nanmax(np.abs(lat.site)) < 1e-14
    assert np.nanmax(np.abs(lat.triangle)) < 1e-14


def test_clean_ness_information_on_low_layers():
    N = 7
    lat = build_info_lattice(solve_ness(build_hamiltonian(uniform_chain(N)), rates_large_bias(N, 1, 0)))
    higher = np.nansum(np.abs(lat.site[2:]))
    assert lat.layer(1).sum() > 10 * higher
    assert np.nanmax(lat.site[3:]) < 3e-3


def test_total_information_examples():
    assert total_information(np.zeros((4, 4))) == pytest.approx(4)
    assert total_information(0.5 * np.eye(4)) == pytest.approx(0, abs=1e-14)
    assert total_information(N3_CLEAN) == pytest.approx(0.5561438102252758, abs=1e-13)
    lat = build_info_lattice(N3_CLEAN)
    assert lat.triangle_value(LatticeCoord(2, 4)) == pytest.approx(total_information(N3_CLEAN), abs=1e-12)


def test_coordinates_round_trip():
    for ell, jl in cells(6):
        c = coord_of(ell, jl)
        assert c.j_left == jl + 1 and c.j_right == jl + ell + 1
        assert LatticeCoord.from_ends(c.j_left, c.j_right) == c
    with pytest.raises(ValidationError):
        LatticeCoord(1, 4).validate(5)
    with pytest.raises(ValidationError):
        LatticeCoord(2, 4).validate(2)


@given(st.integers(2, 8), st.integers(0, 2 ** 31))
@settings(max_examples=40, deadline=None)
def test_telescoping_and_nonnegativity(n, seed):
    C = random_correlation(np.random.default_rng(seed), n, 0.0, 1.0)
    lat = build_info_lattice(C)
    assert lat.total() == pytest.approx(total_information(C), abs=1e-9)
    assert np.nanmin(lat.site) >= -1e-9


@given(st.integers(2, 8), st.integers(0, 2 ** 31))
@settings(max_examples=25, deadline=None)
def test_pure_gaussian_has_full_information(n, seed):
    rng = np.random.default_rng(seed)
    U, _ = np.linalg.qr(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
    occ = rng.integers(0, 2, n)
    C = (U * occ) @ U.conj().T
    assert total_information(C) == pytest.approx(n, abs=1e-8)


def test_recomputation_matches_stored_values(rng):
    C = random_correlation(rng, 6)
    lat = build_info_lattice(C)
    for c in lat.coords():
        sub = reduced_correlation(C, range(c.j_left, c.j_right + 1))
        assert lat.triangle_value(c) == subsystem_information(sub)


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_segment_information_matches_many_body_state(n):
    rng = np.random.default_rng(100 + n)
    C = random_correlation(rng, n, 0.05, 0.95)
    cs = dense_annihilators(n)
    rho = thermal_gaussian(C, cs)
    lat = build_info_lattice(C)
    for c in lat.coords():
        keep = list(range(c.j_left - 1, c.j_right))
        S = von_neumann_bits(partial_trace_keep(rho, keep, n))
        assert lat.triangle_value(c) == pytest.approx(len(keep) - S, abs=1e-8)
