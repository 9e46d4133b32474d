"""Fermionic negativity between two disjoint site sets of a Gaussian state.

Results are in natural-log units, unlike the information lattice (bits).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chain import ReservoirSpec
from .dynamics import evolve, solve_ness
from .errors import NumericalError, ValidationError

IMAG_TOL = 1e-8
CLIP_TOL = 1e-10


@dataclass(frozen=True)
class Bipartition:
    a1: tuple[int, ...]
    a2: tuple[int, ...]

    def __post_init__(self):
        a1 = tuple(sorted(int(s) for s in self.a1))
        a2 = tuple(sorted(int(s) for s in self.a2))
        if not a1 or not a2:
            raise ValidationError("both regions must be nonempty")
        if set(a1) & set(a2):
            raise ValidationError("regions must be disjoint")
        if len(set(a1)) != len(a1) or len(set(a2)) != len(a2):
            raise ValidationError("repeated sites in a region")
        object.__setattr__(self, "a1", a1)
        object.__setattr__(self, "a2", a2)

    def validate(self, n_sites: int) -> None:
        lo, hi = min(self.a1 + self.a2), max(self.a1 + self.a2)
        if lo < 1 or hi > n_sites:
            raise ValidationError(f"bipartition sites outside 1..{n_sites}")

    @classmethod
    def end_blocks(cls, n_sites: int, width: int) -> "Bipartition":
        return cls(tuple(range(1, width + 1)), tuple(range(n_sites - width + 1, n_sites + 1)))


def _clip(values: np.ndarray, what: str) -> np.ndarray:
    if values.size and (values.min() < -CLIP_TOL or values.max() > 1 + CLIP_TOL):
        raise NumericalError(f"{what} eigenvalues outside [0, 1]: [{values.min():.3e}, {values.max():.3e}]")
    return np.clip(values, 0.0, 1.0)


def fermionic_negativity(C: np.ndarray, part: Bipartition) -> float:
    part.validate(C.shape[0])
    idx = np.array(part.a1 + part.a2) - 1
    n1 = len(part.a1)
    C_A = C[np.ix_(idx, idx)]
    m = len(idx)
    eye = np.eye(m)
    G = 2 * C_A - eye
    Gp = G.astype(complex).copy()
    Gm = G.astype(complex).copy()
    Gp[:n1, n1:] *= 1j
    Gp[n1:, :n1] *= 1j
    Gm[:n1, n1:] *= -1j
    Gm[n1:, :n1] *= -1j
    Gp[n1:, n1:] *= -1
    Gm[n1:, n1:] *= -1
    try:
        Gt = 0.5 * (eye - np.linalg.solve(eye + Gp @ Gm, Gp + Gm))
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"singular matrix in negativity: {exc}") from exc
    lam = np.linalg.eigvals(Gt)
    if np.max(np.abs(lam.imag)) > IMAG_TOL:
        raise NumericalError(f"complex eigenvalue in negativity: {np.max(np.abs(lam.imag)):.3e}")
    # conjugate pairs carry opposite imaginary parts, so using real parts sums them
    lam = _clip(lam.real, "G-tilde")
    mu = _clip(np.linalg.eigvalsh(0.5 * (C_A + C_A.conj().T)), "C_A")
    return float(np.sum(np.log(np.sqrt(lam) + np.sqrt(1 - lam))) + 0.5 * np.sum(np.log(mu ** 2 + (1 - mu) ** 2)))


@dataclass(frozen=True)
class NegativitySeries:
    times: np.ndarray
    values: np.ndarray
    final_state: np.ndarray


def negativity_quench_series(H_pre: np.ndarray | None, res_pre: ReservoirSpec | None,
                             H_post: np.ndarray, res_post: ReservoirSpec, part: Bipartition,
                             dt: float, n_steps: int, sample_every: int = 1,
                             C0: np.ndarray | None = None, method: str = "rk4") -> NegativitySeries:
    """Negativity along the post-quench evolution.

    The initial state is the pre-quench steady state unless ``C0`` is given.
    """
    if C0 is None:
        if H_pre is None or res_pre is None:
            raise ValidationError("either pre-quench generators or C0 are required")
        C0 = solve_ness(H_pre, res_pre)
    traj = evolve(H_post, res_post, C0, dt, n_steps, sample_every=sample_every, method=method)
    vals = np.array([fermionic_negativity(C, part) for C in traj.states])
    return NegativitySeries(traj.times, vals, traj.final)
