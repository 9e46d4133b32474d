"""Information currents on the lattice, particle currents and the shielding threshold.

Triangle currents follow the sign convention that positive values leave the
segment: dI_A/dt = -(I_L + I_R + I_E).
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import bisect

from .chain import ReservoirSpec, build_hamiltonian, rates_large_bias, uniform_chain
from .dynamics import rk4_step, solve_ness
from .errors import DomainError, NumericalError, SingularLogarithm, ValidationError
from .lattice import LatticeCoord, build_info_lattice, cells, empty_lattice

LOG_CLIP = 1e-12
IMAG_TOL = 1e-10


class SingularLogarithmWarning(UserWarning):
    pass


def segment_bounds(A, n_sites: int) -> tuple[int, int]:
    """0-based inclusive (jl, jr) from a LatticeCoord or a 1-based (j_left, j_right) pair."""
    if isinstance(A, LatticeCoord):
        A.validate(n_sites)
        jl, jr = A.j_left, A.j_right
    else:
        jl, jr = (int(v) for v in A)
    if not 1 <= jl <= jr <= n_sites:
        raise ValidationError(f"segment ({jl}, {jr}) outside 1..{n_sites}")
    return jl - 1, jr - 1


def f_matrices(H: np.ndarray, res: ReservoirSpec, C: np.ndarray, A) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    n = C.shape[0]
    if H.shape != C.shape or res.n_sites != n:
        raise ValidationError("dimension mismatch between H, C and reservoirs")
    jl, jr = segment_bounds(A, n)
    a = slice(jl, jr + 1)
    C_A = C[a, a]
    F_L = np.zeros_like(C_A)
    F_R = np.zeros_like(C_A)
    if jl > 0:
        left = slice(0, jl)
        H_la, C_la = H[left, a], C[left, a]
        F_L = H_la.T @ C_la - C_la.conj().T @ H_la.conj()
    if jr < n - 1:
        right = slice(jr + 1, n)
        H_ar, C_ar = H[a, right], C[a, right]
        F_R = H_ar.conj() @ C_ar.conj().T - C_ar @ H_ar.T
    g_in = np.diag(res.gamma_in[a])
    g_tot = np.diag(res.gamma_in[a] + res.gamma_out[a])
    F_E = g_in - 0.5 * (g_tot @ C_A + C_A @ g_tot)
    return F_L, F_R, F_E


def log_odds(C_A: np.ndarray, clip: float = LOG_CLIP) -> tuple[np.ndarray, bool]:
    """log2(C_A (1 - C_A)^-1) via eigendecomposition; also reports whether clipping occurred."""
    w, V = np.linalg.eigh(0.5 * (C_A + C_A.conj().T))
    clipped = bool(np.any(w < clip) or np.any(w > 1 - clip))
    w = np.clip(w, clip, 1 - clip)
    return (V * np.log2(w / (1 - w))) @ V.conj().T, clipped


def triangle_currents(H: np.ndarray, res: ReservoirSpec, C: np.ndarray, A, strict: bool = False
                      ) -> tuple[float, float, float]:
    vals, clipped = _triangle_currents(H, res, C, A)
    if clipped:
        msg = f"segment {A}: eigenvalue at 0 or 1 with nonzero coupling; log clipped at {LOG_CLIP}"
        if strict:
            raise SingularLogarithm(msg)
        warnings.warn(msg, SingularLogarithmWarning, stacklevel=2)
    return vals


def _triangle_currents(H, res, C, A) -> tuple[tuple[float, float, float], bool]:
    F_L, F_R, F_E = f_matrices(H, res, C, A)
    jl, jr = segment_bounds(A, C.shape[0])
    lg, clipped = log_odds(C[jl:jr + 1, jl:jr + 1])
    raw = (-1j * np.sum(F_L * lg.T), -1j * np.sum(F_R * lg.T), -np.sum(F_E * lg.T))
    imag = max(abs(v.imag) for v in raw)
    if imag > IMAG_TOL:
        raise NumericalError(f"segment {A}: current trace has imaginary part {imag:.3e}")
    coupled = max(np.max(np.abs(F)) for F in (F_L, F_R, F_E)) > 1e-14
    return tuple(float(v.real) for v in raw), clipped and coupled


@dataclass(frozen=True)
class TriangleCurrents:
    left: np.ndarray
    right: np.ndarray
    env: np.ndarray
    clipped: np.ndarray = field(repr=False)

    @property
    def n_sites(self) -> int:
        return self.left.shape[0]

    @property
    def unitary(self) -> np.ndarray:
        return self.left + self.right


@dataclass(frozen=True)
class CurrentLattice:
    left: np.ndarray
    right: np.ndarray
    env: np.ndarray

    @property
    def n_sites(self) -> int:
        return self.left.shape[0]

    def at(self, coord: LatticeCoord) -> tuple[float, float, float]:
        coord.validate(self.n_sites)
        k = (coord.ell, coord.j_left - 1)
        return float(self.left[k]), float(self.right[k]), float(self.env[k])


def all_triangle_currents(H: np.ndarray, res: ReservoirSpec, C: np.ndarray) -> TriangleCurrents:
    n = C.shape[0]
    arrs = [empty_lattice(n) for _ in range(3)]
    flags = np.zeros((n, n), dtype=bool)
    for ell, jl in cells(n):
        vals, clipped = _triangle_currents(H, res, C, (jl + 1, jl + ell + 1))
        for arr, v in zip(arrs, vals):
            arr[ell, jl] = v
        flags[ell, jl] = clipped
    if flags.any():
        warnings.warn(f"{int(flags.sum())} segments needed log clipping", SingularLogarithmWarning, stacklevel=2)
    return TriangleCurrents(*arrs, clipped=flags)


def effective_currents(tri: TriangleCurrents) -> CurrentLattice:
    n = tri.n_sites
    out = [empty_lattice(n) for _ in range(3)]

    def get(arr, ell, jl):
        return arr[ell, jl] if ell >= 0 else 0.0

    for ell, jl in cells(n):
        out[0][ell, jl] = tri.left[ell, jl] - get(tri.left, ell - 1, jl)
        out[1][ell, jl] = tri.right[ell, jl] - get(tri.right, ell - 1, jl + 1)
        out[2][ell, jl] = (tri.env[ell, jl] - get(tri.env, ell - 1, jl) - get(tri.env, ell - 1, jl + 1)
                           + get(tri.env, ell - 2, jl + 1))
    return CurrentLattice(*out)


def current_lattice(H: np.ndarray, res: ReservoirSpec, C: np.ndarray) -> tuple[TriangleCurrents, CurrentLattice]:
    tri = all_triangle_currents(H, res, C)
    return tri, effective_currents(tri)


def lattice_outflow(lat: CurrentLattice) -> np.ndarray:
    """Net outflow of each site cell: the right-hand side of the site balance with a minus sign."""
    n = lat.n_sites
    out = empty_lattice(n)
    for ell, jl in cells(n):
        inflow = 0.0
        if ell >= 1:
            inflow = lat.right[ell - 1, jl] + lat.left[ell - 1, jl + 1]
        out[ell, jl] = lat.left[ell, jl] + lat.right[ell, jl] + lat.env[ell, jl] - inflow
    return out


def site_balance_residual(H: np.ndarray, res: ReservoirSpec, C: np.ndarray,
                          lattice: CurrentLattice | None = None, dt: float | None = None) -> np.ndarray:
    """di/dt + (outflow - inflow) per cell.

    With ``dt=None`` the state is taken as stationary (di/dt = 0). Otherwise di/dt
    is a central difference over one RK4 step forward and backward.
    """
    if lattice is None:
        lattice = current_lattice(H, res, C)[1]
    if dt is None:
        didt = 0.0
    else:
        plus = build_info_lattice(rk4_step(H, res, C, dt)).site
        minus = build_info_lattice(rk4_step(H, res, C, -dt)).site
        didt = (plus - minus) / (2 * dt)
    return didt + lattice_outflow(lattice)


@dataclass(frozen=True)
class HorizontalCurrents:
    plus: float
    minus: float
    plus_full: float
    minus_full: float
    plus_triangle: float
    minus_triangle: float

    @property
    def form_mismatch(self) -> float:
        return max(abs(self.plus_full - self.plus_triangle), abs(self.minus_full - self.minus_triangle))


def horizontal_currents(tri: TriangleCurrents, lat: CurrentLattice, n: int) -> HorizontalCurrents:
    """Currents across the vertical lines just right (plus) and left (minus) of site ``n``.

    ``plus``/``minus`` sum the bottom layer and, for ell > 0, only cells that touch
    neither chain end, so dissipative flow along the outer diagonals is left out.
    ``*_full`` include every cell centered at n (even layers) and n +/- 1/2 (odd
    layers); ``*_triangle`` is the same sum in triangle form, where only triangles
    that can emit across the line contribute. The full and triangle forms agree
    for any state.
    """
    N = tri.n_sites
    if not 1 <= n <= N:
        raise ValidationError(f"site {n} outside 1..{N}")
    tot = tri.unitary
    p_t = p_s = m_t = m_s = p_b = m_b = 0.0

    def bulk(ell, jl, jr):
        return ell == 0 or (jl > 1 and jr < N)

    for ell in range(N):
        k = ell // 2
        if ell % 2 == 0:
            jl, jr = n - k, n + k
            if jl < 1 or jr > N:
                continue
            p_t += lat.right[ell, jl - 1]
            m_t += lat.left[ell, jl - 1]
            if bulk(ell, jl, jr):
                p_b += lat.right[ell, jl - 1]
                m_b += lat.left[ell, jl - 1]
            if jr < N:
                p_s += tot[ell, jl - 1]
            if jl > 1:
                m_s += tot[ell, jl - 1]
        else:
            jl, jr = n - k, n + k + 1  # cell at n + 1/2
            if jl >= 1 and jr <= N:
                p_t -= lat.left[ell, jl - 1]
                if bulk(ell, jl, jr):
                    p_b -= lat.left[ell, jl - 1]
                if jl > 1:
                    p_s -= tot[ell, jl - 1]
            jl, jr = n - k - 1, n + k  # cell at n - 1/2
            if jl >= 1 and jr <= N:
                m_t -= lat.right[ell, jl - 1]
                if bulk(ell, jl, jr):
                    m_b -= lat.right[ell, jl - 1]
                if jr < N:
                    m_s -= tot[ell, jl - 1]
    return HorizontalCurrents(p_b, m_b, p_t, m_t, p_s, m_s)


def vertical_currents(lat: CurrentLattice, ell: int) -> float:
    n = lat.n_sites
    if not 0 <= ell < n:
        raise ValidationError(f"layer {ell} outside 0..{n - 1}")
    m = n - ell
    return float(np.sum(lat.left[ell, :m] + lat.right[ell, :m]))


def particle_current(H: np.ndarray, C: np.ndarray, j: int) -> float:
    """Expectation of the bond current j -> j+1 (1-based)."""
    n = C.shape[0]
    if not 1 <= j <= n - 1:
        raise ValidationError(f"bond {j} outside 1..{n - 1}")
    J = H[j - 1, j].real
    return float(-2.0 * J * C[j - 1, j].imag)


def particle_current_env(C: np.ndarray, res: ReservoirSpec, j: int) -> float:
    """Particle current from site j into the environment (1-based)."""
    n = C.shape[0]
    if not 1 <= j <= n:
        raise ValidationError(f"site {j} outside 1..{n}")
    c = C[j - 1, j - 1].real
    return float(res.gamma_out[j - 1] * c - res.gamma_in[j - 1] * (1 - c))


def bond_currents(H: np.ndarray, C: np.ndarray) -> np.ndarray:
    return np.array([particle_current(H, C, j) for j in range(1, C.shape[0])])


def bottom_layer_relation_check(H: np.ndarray, res: ReservoirSpec, C: np.ndarray,
                                tri: TriangleCurrents | None = None) -> np.ndarray:
    """Residuals (N x 3: L, R, E) of the single-site relation between information and particle currents."""
    n = C.shape[0]
    if tri is None:
        tri = all_triangle_currents(H, res, C)
    out = np.zeros((n, 3))
    for s in range(1, n + 1):
        c = float(np.clip(C[s - 1, s - 1].real, LOG_CLIP, 1 - LOG_CLIP))
        lg = np.log2(c / (1 - c))
        into_left = -particle_current(H, C, s - 1) if s > 1 else 0.0
        to_right = particle_current(H, C, s) if s < n else 0.0
        out[s - 1, 0] = tri.left[0, s - 1] - into_left * lg
        out[s - 1, 1] = tri.right[0, s - 1] - to_right * lg
        out[s - 1, 2] = tri.env[0, s - 1] - particle_current_env(C, res, s) * lg
    return out


def shielding_threshold(g: float, J: float) -> float:
    if g <= 0 or J <= 0:
        raise DomainError("g and J must be positive")
    return (np.sqrt(g ** 4 + 4 * J ** 4) - 2 * J ** 2) / g ** 2


def find_shielding_threshold(g: float, J: float, n_sites: int = 3, xtol: float = 1e-8) -> float:
    """delta at which the NESS occupation of the last site crosses 1/2, by bisection."""
    if g <= 0 or J <= 0:
        raise DomainError("g and J must be positive")
    H = build_hamiltonian(uniform_chain(n_sites, J))

    def excess(delta: float) -> float:
        C = solve_ness(H, rates_large_bias(n_sites, g, delta))
        return C[-1, -1].real - 0.5

    return float(bisect(excess, -1 + 1e-9, 1 - 1e-9, xtol=xtol))
