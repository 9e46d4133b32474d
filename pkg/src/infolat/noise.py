"""Particle-number noise lattice and second-cumulant approximations.

Wick contractions used here (no anomalous terms, C_ab = <c_a^dag c_b>):

    <c_a^dag c_b c_c^dag c_d> = C_ab C_cd + C_ad (delta_bc - C_cb)

so that

    Cov(n_i, n_j)               = delta_ij C_ii - |C_ij|^2
    Cov(c_a^dag c_b, n_c)       = C_ac (delta_bc - C_cb)
    Cov(I_{a->a+1}, n_c)        = i J [Cov(c_a^dag c_{a+1}, n_c) - Cov(c_{a+1}^dag c_a, n_c)]
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chain import ReservoirSpec
from .currents import CurrentLattice, f_matrices, segment_bounds, particle_current, particle_current_env
from .errors import ValidationError
from .lattice import cells, empty_lattice, site_decomposition, triangle_map

KL_PREFACTOR = np.pi ** 2 / (3 * np.log(2))


@dataclass(frozen=True)
class NoiseLattice:
    variance: np.ndarray
    kappa: np.ndarray
    i_appr: np.ndarray

    @property
    def n_sites(self) -> int:
        return self.variance.shape[0]


def subsystem_variance(C_A: np.ndarray) -> float:
    C_A = np.atleast_2d(C_A)
    return float(np.trace(C_A - C_A @ C_A).real)


def noise_lattice(C: np.ndarray) -> NoiseLattice:
    var = triangle_map(np.asarray(C), subsystem_variance)
    kappa = site_decomposition(var)
    i_appr = -KL_PREFACTOR * kappa
    i_appr[0, :] += 1.0
    return NoiseLattice(var, kappa, i_appr)


def _check_site(C: np.ndarray, *sites: int) -> None:
    n = C.shape[0]
    for s in sites:
        if not 1 <= s <= n:
            raise ValidationError(f"site {s} outside 1..{n}")


def wick_covariance_nn(C: np.ndarray, i: int, j: int) -> float:
    """Cov(n_i, n_j) for i != j (1-based)."""
    _check_site(C, i, j)
    if i == j:
        raise ValidationError("use subsystem_variance for i == j")
    return float(-abs(C[i - 1, j - 1]) ** 2)


def wick_covariance_hop_number(C: np.ndarray, a: int, b: int, c: int) -> complex:
    """Cov(c_a^dag c_b, n_c) with the operator order as written (1-based)."""
    _check_site(C, a, b, c)
    a, b, c = a - 1, b - 1, c - 1
    return complex(C[a, c] * ((1.0 if b == c else 0.0) - C[c, b]))


def current_number_covariance(H: np.ndarray, C: np.ndarray, a: int, c: int) -> float:
    """Cov(I_{a->a+1}, n_c) with the current operator on the left (1-based)."""
    J = H[a - 1, a].real
    val = 1j * J * (wick_covariance_hop_number(C, a, a + 1, c) - wick_covariance_hop_number(C, a + 1, a, c))
    return float(val.real)


def approx_currents(C: np.ndarray, res: ReservoirSpec, H: np.ndarray) -> CurrentLattice:
    """Second-cumulant approximation of the effective information currents."""
    n = C.shape[0]
    out = [empty_lattice(n) for _ in range(3)]
    k = KL_PREFACTOR
    rates = res.gamma_in + res.gamma_out
    for ell, jl in cells(n):
        a, b = jl + 1, jl + ell + 1  # 1-based ends
        if ell == 0:
            s = 2 * C[jl, jl].real - 1
            out[0][ell, jl] = -k * particle_current(H, C, a - 1) * s if a > 1 else 0.0
            out[1][ell, jl] = k * particle_current(H, C, a) * s if a < n else 0.0
            out[2][ell, jl] = k * particle_current_env(C, res, a) * s
        else:
            out[0][ell, jl] = 2 * k * current_number_covariance(H, C, a - 1, b) if a > 1 else 0.0
            out[1][ell, jl] = -2 * k * current_number_covariance(H, C, b, a) if b < n else 0.0
            out[2][ell, jl] = -k * (rates[a - 1] + rates[b - 1]) * wick_covariance_nn(C, a, b)
    return CurrentLattice(*out)


def variance_rate(C: np.ndarray, H: np.ndarray, res: ReservoirSpec, A) -> float:
    """d Var(n_A)/dt for the segment A (LatticeCoord or 1-based end pair)."""
    F_L, F_R, F_E = f_matrices(H, res, C, A)
    lo, hi = segment_bounds(A, C.shape[0])
    C_A = C[lo:hi + 1, lo:hi + 1]
    eye = np.eye(hi - lo + 1)
    return float(np.trace((eye - 2 * C_A) @ (1j * F_L + 1j * F_R + F_E)).real)
