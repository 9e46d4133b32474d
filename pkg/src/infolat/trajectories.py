"""Monte-Carlo wave-function unraveling in the 2^N Fock space (small N).

Basis states are bit strings with site 1 as the most significant qubit.
Fermionic operators carry Jordan-Wigner strings to their left.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.linalg import expm

from .chain import ChainSpec, ReservoirSpec, build_hamiltonian
from .errors import NumericalError, ValidationError
from .lattice import InfoLattice, cells, empty_lattice, site_decomposition

MAX_SITES = 14
DENSE_PROPAGATOR_DIM = 4096
STEP_WARN = 0.1
RNG_BLOCK = 512


class StepSizeWarning(UserWarning):
    pass


@dataclass(frozen=True)
class FockOperators:
    n_sites: int
    annihilators: tuple
    hamiltonian: sp.csr_matrix
    jumps: tuple
    jump_labels: tuple[str, ...] = ()

    @property
    def dim(self) -> int:
        return 2 ** self.n_sites

    def creator(self, j: int) -> sp.csr_matrix:
        return self.annihilators[j - 1].conj().T.tocsr()

    def number(self, j: int) -> sp.csr_matrix:
        c = self.annihilators[j - 1]
        return (c.conj().T @ c).tocsr()


def annihilation_operators(n_sites: int) -> list[sp.csr_matrix]:
    if n_sites > MAX_SITES:
        raise ValidationError(f"Fock space limited to N <= {MAX_SITES}, got {n_sites}")
    eye = sp.identity(2, format="csr")
    z = sp.csr_matrix(np.diag([1.0, -1.0]))
    a = sp.csr_matrix(np.array([[0.0, 1.0], [0.0, 0.0]]))
    ops = []
    for i in range(n_sites):
        m = sp.identity(1, format="csr")
        for j in range(n_sites):
            m = sp.kron(m, z if j < i else (a if j == i else eye), format="csr")
        ops.append(m)
    return ops


def lift_quadratic(h: np.ndarray, cs) -> sp.csr_matrix:
    """sum_ij h_ij c_i^dag c_j as a sparse matrix."""
    n = len(cs)
    dim = cs[0].shape[0]
    out = sp.csr_matrix((dim, dim), dtype=complex)
    for i in range(n):
        ci_dag = cs[i].conj().T
        for j in range(n):
            if h[i, j] != 0:
                out = out + h[i, j] * (ci_dag @ cs[j])
    return out.tocsr()


def build_fock_operators(spec: ChainSpec, res: ReservoirSpec | None = None) -> FockOperators:
    """Many-body Hamiltonian and jump operators sqrt(Gamma_j) c_j^dag, sqrt(gamma_j) c_j."""
    cs = annihilation_operators(spec.n_sites)
    H = lift_quadratic(build_hamiltonian(spec), cs)
    jumps, labels = [], []
    if res is not None:
        if res.n_sites != spec.n_sites:
            raise ValidationError("reservoir size does not match the chain")
        for j in range(spec.n_sites):
            if res.inject[j] > 0:
                jumps.append((np.sqrt(res.inject[j]) * cs[j].conj().T).tocsr())
                labels.append(f"inject_{j + 1}")
            if res.remove[j] > 0:
                jumps.append((np.sqrt(res.remove[j]) * cs[j]).tocsr())
                labels.append(f"remove_{j + 1}")
    return FockOperators(spec.n_sites, tuple(cs), H, tuple(jumps), tuple(labels))


def vacuum(n_sites: int) -> np.ndarray:
    psi = np.zeros(2 ** n_sites, dtype=complex)
    psi[0] = 1.0
    return psi


def product_state(occupations) -> np.ndarray:
    """Fock basis state with the given 0/1 occupations (site 1 first)."""
    occ = [int(o) for o in occupations]
    idx = int("".join(str(o) for o in occ), 2)
    psi = np.zeros(2 ** len(occ), dtype=complex)
    psi[idx] = 1.0
    return psi


def gaussian_density_matrix(C: np.ndarray, cs=None) -> np.ndarray:
    """Dense many-body density matrix of the Gaussian state with correlation matrix C."""
    n = C.shape[0]
    cs = annihilation_operators(n) if cs is None else cs
    nu, V = np.linalg.eigh(0.5 * (C + C.conj().T))
    nu = np.clip(nu, 0.0, 1.0)
    dim = 2 ** n
    rho = np.eye(dim, dtype=complex)
    eye = np.eye(dim)
    for k in range(n):
        b = sum(V[j, k] * cs[j] for j in range(n))
        nk = (b.conj().T @ b).toarray()
        rho = rho @ (nu[k] * nk + (1 - nu[k]) * (eye - nk))
    return rho


def correlation_from_state(state: np.ndarray, cs) -> np.ndarray:
    """C_ij = <c_i^dag c_j> for a state vector or a density matrix."""
    n = len(cs)
    C = np.empty((n, n), dtype=complex)
    if state.ndim == 1:
        amps = [c @ state for c in cs]
        for i in range(n):
            for j in range(n):
                C[i, j] = np.vdot(amps[i], amps[j])
    else:
        for i in range(n):
            for j in range(n):
                C[i, j] = np.trace((cs[i].conj().T @ cs[j]) @ state)
    return C


@dataclass(frozen=True)
class TrajectoryEnsemble:
    n_traj: int
    seed: int
    dt: float
    times: np.ndarray
    states: np.ndarray  # (n_samples, n_traj, dim)
    n_jumps: np.ndarray = field(repr=False)  # per trajectory
    max_jump_probability: float = 0.0
    warnings: tuple[str, ...] = ()

    @property
    def n_sites(self) -> int:
        return int(np.log2(self.states.shape[-1]))

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]


def trajectory_streams(seed: int, n_traj: int) -> list[np.random.Generator]:
    """Independent generators, one per trajectory, fixed by (seed, index)."""
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(n_traj)]


def mcwf_run(H, jumps, psi0: np.ndarray, dt: float, n_steps: int, n_traj: int, seed: int,
             sample_every: int | None = None) -> TrajectoryEnsemble:
    """First-order quantum-jump unraveling with fixed step ``dt``.

    Each step a trajectory jumps with probability dt <L_k^dag L_k> summed over k,
    the channel chosen in proportion to its weight. Otherwise it is propagated
    with exp(-i H_eff dt), H_eff = H - (i/2) sum_k L_k^dag L_k, and renormalized.
    """
    if not dt > 0 or n_steps < 0 or n_traj < 1:
        raise ValidationError("need dt > 0, n_steps >= 0, n_traj >= 1")
    H = sp.csr_matrix(H, dtype=complex)
    dim = H.shape[0]
    psi0 = np.asarray(psi0, dtype=complex)
    if psi0.shape != (dim,):
        raise ValidationError(f"psi0 must have shape ({dim},)")
    norm0 = np.linalg.norm(psi0)
    if norm0 == 0:
        raise ValidationError("psi0 has zero norm")
    jumps = [sp.csr_matrix(L, dtype=complex) for L in jumps]
    decay = sp.csr_matrix((dim, dim), dtype=complex)
    for L in jumps:
        decay = decay + L.conj().T @ L
    h_eff = H - 0.5j * decay
    if dim <= DENSE_PROPAGATOR_DIM:
        K = expm(-1j * dt * h_eff.toarray())
        propagate = lambda psi: K @ psi  # noqa: E731
    else:
        from scipy.sparse.linalg import expm_multiply

        A = (-1j * dt * h_eff).tocsc()
        propagate = lambda psi: expm_multiply(A, psi)  # noqa: E731

    sample_every = n_steps if not sample_every else sample_every
    psi = np.repeat((psi0 / norm0)[:, None], n_traj, axis=1)
    gens = trajectory_streams(seed, n_traj)
    cols = np.arange(n_traj)
    n_jumps = np.zeros(n_traj, dtype=int)
    times, snaps = [0.0], [psi.T.copy()]
    p_max = 0.0
    warned = []
    for step in range(n_steps):
        if step % RNG_BLOCK == 0:
            draws = np.stack([g.random((RNG_BLOCK, 2)) for g in gens], axis=1)
        u = draws[step % RNG_BLOCK]
        if jumps:
            jumped_states = [L @ psi for L in jumps]
            weights = np.stack([np.einsum("ij,ij->j", x.conj(), x).real for x in jumped_states])
            p_tot = dt * weights.sum(axis=0)
            p_step = float(p_tot.max())
            p_max = max(p_max, p_step)
            if p_step > 1:
                raise NumericalError(f"jump probability {p_step:.3f} > 1 at step {step}; reduce dt")
            jump = u[:, 0] < p_tot
        else:
            jump = np.zeros(n_traj, dtype=bool)
        new = propagate(psi)
        if jump.any():
            idx = cols[jump]
            w = weights[:, idx]
            target = u[idx, 1] * w.sum(axis=0)
            k = np.minimum((np.cumsum(w, axis=0) < target).sum(axis=0), len(jumps) - 1)
            for ch in np.unique(k):
                sel = idx[k == ch]
                new[:, sel] = jumped_states[ch][:, sel]
            n_jumps[idx] += 1
        new /= np.linalg.norm(new, axis=0)
        psi = new
        if (step + 1) % sample_every == 0 or step + 1 == n_steps:
            times.append((step + 1) * dt)
            snaps.append(psi.T.copy())
    if p_max > STEP_WARN:
        msg = f"maximum jump probability per step {p_max:.3f} exceeds {STEP_WARN}"
        warnings.warn(msg, StepSizeWarning, stacklevel=2)
        warned.append(msg)
    return TrajectoryEnsemble(n_traj, seed, dt, np.array(times), np.array(snaps), n_jumps, p_max, tuple(warned))


def ensemble_correlation(states: np.ndarray, cs) -> tuple[np.ndarray, np.ndarray]:
    """Trajectory mean of C and its standard error (real and imaginary parts separately).

    ``states`` has shape (n_traj, dim).
    """
    n = len(cs)
    psi = np.asarray(states).T
    amps = [c @ psi for c in cs]
    per = np.empty((n, n, psi.shape[1]), dtype=complex)
    for i in range(n):
        for j in range(n):
            per[i, j] = np.einsum("kt,kt->t", amps[i].conj(), amps[j])
    mean = per.mean(axis=2)
    m = per.shape[2]
    if m > 1:
        err = (per.real.std(axis=2, ddof=1) + 1j * per.imag.std(axis=2, ddof=1)) / np.sqrt(m)
    else:
        err = np.full((n, n), np.nan + 1j * np.nan)
    return mean, err


def segment_entropies(states: np.ndarray, n_sites: int) -> np.ndarray:
    """Von Neumann entropies (bits) of every connected segment for each pure state.

    Returns an array (n_traj, N, N) indexed by (ell, jl). Trajectory states have a
    definite particle number, so the qubit reduced state of a contiguous block
    equals the fermionic reduced state.
    """
    states = np.atleast_2d(states)
    n_traj = states.shape[0]
    out = np.full((n_traj, n_sites, n_sites), np.nan)
    for ell, jl in cells(n_sites):
        m = ell + 1
        t = states.reshape(n_traj, 2 ** jl, 2 ** m, 2 ** (n_sites - jl - m))
        t = np.transpose(t, (0, 2, 1, 3)).reshape(n_traj, 2 ** m, -1)
        s = np.linalg.svd(t, compute_uv=False)
        p = s ** 2
        p = p / p.sum(axis=1, keepdims=True)
        safe = np.where(p > 0, p, 1.0)
        out[:, ell, jl] = -np.sum(np.where(p > 0, p * np.log2(safe), 0.0), axis=1)
    return out


def per_trajectory_site_information(states: np.ndarray, n_sites: int) -> np.ndarray:
    S = segment_entropies(states, n_sites)
    sizes = empty_lattice(n_sites)
    for ell, jl in cells(n_sites):
        sizes[ell, jl] = ell + 1
    tri = sizes[None] - S
    return np.stack([site_decomposition(t) for t in tri]), tri


def trajectory_info_lattice(ensemble: TrajectoryEnsemble | np.ndarray, sample: int = -1) -> InfoLattice:
    """Information lattice averaged over trajectories after the site decomposition."""
    if isinstance(ensemble, TrajectoryEnsemble):
        states, n = ensemble.states[sample], ensemble.n_sites
    else:
        states = np.atleast_2d(ensemble)
        n = int(np.log2(states.shape[-1]))
    site, tri = per_trajectory_site_information(states, n)
    return InfoLattice(tri.mean(axis=0), site.mean(axis=0))
