"""Lindblad equation of motion for the correlation matrix C_ij = <c_i^dag c_j>."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .chain import ReservoirSpec
from .errors import NonUniqueSteadyState, NumericalError, PhysicalityError, ValidationError

CLIP_TOL = 1e-10


@dataclass(frozen=True)
class PhysicalityReport:
    hermiticity_residual: float
    min_eigenvalue: float
    max_eigenvalue: float
    trace: float

    def ok(self, tol: float = CLIP_TOL) -> bool:
        return (self.hermiticity_residual <= 1e-12 and self.min_eigenvalue >= -tol
                and self.max_eigenvalue <= 1 + tol)


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # (n_snapshots, N, N)

    def __len__(self) -> int:
        return len(self.times)

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]


def _check_dims(H: np.ndarray, res: ReservoirSpec, C: np.ndarray | None = None) -> int:
    n = H.shape[0]
    if H.shape != (n, n) or res.n_sites != n:
        raise ValidationError(f"dimension mismatch: H {H.shape}, reservoirs {res.n_sites}")
    if C is not None and C.shape != (n, n):
        raise ValidationError(f"dimension mismatch: C {C.shape}, H {H.shape}")
    return n


def hermitize(C: np.ndarray) -> np.ndarray:
    return 0.5 * (C + C.conj().T)


def generator_matrix(H: np.ndarray, res: ReservoirSpec) -> np.ndarray:
    """W = i H^T - (Gamma + gamma)/2, so that dC/dt = W C + C W^dag + Gamma."""
    return 1j * H.T - 0.5 * np.diag(res.gamma_in + res.gamma_out)


def drift(H: np.ndarray, res: ReservoirSpec, C: np.ndarray) -> np.ndarray:
    _check_dims(H, res, C)
    W = generator_matrix(H, res)
    out = W @ C + C @ W.conj().T
    out[np.diag_indices_from(out)] += res.gamma_in
    return out


def rk4_step(H: np.ndarray, res: ReservoirSpec, C: np.ndarray, dt: float) -> np.ndarray:
    W = generator_matrix(H, res)
    Wd = W.conj().T
    gin = res.gamma_in
    di = np.diag_indices(C.shape[0])

    def f(X):
        out = W @ X + X @ Wd
        out[di] += gin
        return out

    k1 = f(C)
    k2 = f(C + 0.5 * dt * k1)
    k3 = f(C + 0.5 * dt * k2)
    k4 = f(C + dt * k3)
    return C + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)


def exact_propagator(H: np.ndarray, res: ReservoirSpec, dt: float) -> tuple[np.ndarray, np.ndarray]:
    """(E, Q) with C(t + dt) = E C(t) E^dag + Q exactly.

    E = exp(W dt) and Q = int_0^dt exp(W s) Gamma exp(W^dag s) ds, the latter from
    the block exponential of [[-W, Gamma], [0, W^dag]] (Van Loan).
    """
    n = H.shape[0]
    W = generator_matrix(H, res)
    M = np.zeros((2 * n, 2 * n), dtype=complex)
    M[:n, :n] = -W
    M[:n, n:] = np.diag(res.gamma_in)
    M[n:, n:] = W.conj().T
    F = expm(M * dt)
    E = F[n:, n:].conj().T
    return E, hermitize(E @ F[:n, n:])


def check_physicality(C: np.ndarray) -> PhysicalityReport:
    C = np.asarray(C)
    herm = float(np.max(np.abs(C - C.conj().T))) if C.size else 0.0
    w = np.linalg.eigvalsh(hermitize(C))
    return PhysicalityReport(herm, float(w[0]), float(w[-1]), float(np.trace(C).real))


def project_physical(C: np.ndarray, tol: float = CLIP_TOL, step: int | None = None) -> np.ndarray:
    """Hermitize and clip eigenvalues that stray at most ``tol`` outside [0, 1]."""
    C = hermitize(C)
    w, V = np.linalg.eigh(C)
    if w[0] < -tol or w[-1] > 1 + tol:
        raise PhysicalityError(f"eigenvalues [{w[0]:.3e}, {w[-1]:.3e}] outside [0, 1]", step=step)
    if w[0] < 0 or w[-1] > 1:
        C = hermitize((V * np.clip(w, 0.0, 1.0)) @ V.conj().T)
    return C


def default_dt(J: float, g: float) -> float:
    return 0.05 / max(abs(J), abs(g))


INTEGRATORS = ("rk4", "exact")


def evolve(H: np.ndarray, res: ReservoirSpec, C0: np.ndarray, dt: float, n_steps: int,
           sample_every: int = 1, method: str = "rk4") -> Trajectory:
    """Fixed-step integration. Snapshots at step 0 and every ``sample_every`` steps.

    ``method="rk4"`` is classical fourth-order Runge-Kutta. ``method="exact"`` uses
    the exact one-step map from :func:`exact_propagator`, which keeps C inside
    [0, 1] even next to pure modes (e.g. an empty initial chain), where RK4
    truncation errors of order dt^5 leave the physical set. The last step is
    always stored.
    """
    _check_dims(H, res, C0)
    if not dt > 0:
        raise ValidationError(f"dt must be positive, got {dt}")
    if n_steps < 0 or sample_every < 1:
        raise ValidationError("n_steps must be >= 0 and sample_every >= 1")
    if method not in INTEGRATORS:
        raise ValidationError(f"method must be one of {INTEGRATORS}, got {method!r}")
    if method == "exact":
        E, Q = exact_propagator(H, res, dt)
        Ed = E.conj().T
        step_fn = lambda X: E @ X @ Ed + Q  # noqa: E731
    else:
        step_fn = lambda X: rk4_step(H, res, X, dt)  # noqa: E731
    C = project_physical(np.array(C0, dtype=complex), step=0)
    times = [0.0]
    states = [C.copy()]
    for step in range(1, n_steps + 1):
        C = project_physical(step_fn(C), step=step)
        if step % sample_every == 0 or step == n_steps:
            times.append(step * dt)
            states.append(C.copy())
    return Trajectory(np.array(times), np.array(states))


def solve_ness(H: np.ndarray, res: ReservoirSpec) -> np.ndarray:
    """Stationary C from W C + C W^dag + Gamma = 0 via a dense N^2 x N^2 solve.

    Row-major vectorization: vec(W C) = (W kron I) vec C and
    vec(C W^dag) = (I kron conj(W)) vec C.
    """
    n = _check_dims(H, res)
    rates = res.gamma_in + res.gamma_out
    if not np.any(rates > 0):
        raise NonUniqueSteadyState("all reservoir rates vanish")
    W = generator_matrix(H, res)
    # unique iff no eigenvalue of W sits on the imaginary axis
    slowest = float(np.max(np.linalg.eigvals(W).real))
    scale = float(np.max(np.abs(W))) + 1.0
    if slowest > -1e-14 * scale:
        raise NonUniqueSteadyState(f"generator has a non-decaying mode (max Re = {slowest:.3e})")
    eye = np.eye(n)
    M = np.kron(W, eye) + np.kron(eye, W.conj())
    rhs = -np.diag(res.gamma_in).astype(complex).ravel()
    try:
        C = np.linalg.solve(M, rhs).reshape(n, n)
    except np.linalg.LinAlgError as exc:
        raise NonUniqueSteadyState(str(exc)) from exc
    C = hermitize(C)
    try:
        return project_physical(C)
    except PhysicalityError as exc:
        raise NumericalError(f"steady state is unphysical: {exc}") from exc


def slowest_relaxation_rate(H: np.ndarray, res: ReservoirSpec) -> float:
    """Slowest decay rate of C - C_ness, i.e. 2 min |Re eig W|."""
    W = generator_matrix(H, res)
    return float(-2.0 * np.max(np.linalg.eigvals(W).real))
