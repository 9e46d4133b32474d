import numpy as np
import pytest
from scipy.linalg import expm, logm

from infolat import ChainSpec, ReservoirSpec, build_hamiltonian


def random_correlation(rng, n, lo=0.02, hi=0.98):
    X = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    U, _ = np.linalg.qr(X)
    return (U * rng.uniform(lo, hi, n)) @ U.conj().T


def random_system(rng, n, closed=False):
    spec = ChainSpec(n, rng.uniform(0.5, 1.5, n - 1), rng.normal(size=n))
    if closed:
        res = ReservoirSpec(np.zeros(n), np.zeros(n))
    else:
        res = ReservoirSpec(rng.uniform(0, 1, n), rng.uniform(0, 1, n))
    return build_hamiltonian(spec), res


def dense_annihilators(n):
    """Jordan-Wigner annihilators as dense arrays, written independently of the package."""
    a = np.array([[0.0, 1.0], [0.0, 0.0]])
    z = np.diag([1.0, -1.0])
    out = []
    for i in range(n):
        m = np.eye(1)
        for j in range(n):
            m = np.kron(m, z if j < i else (a if j == i else np.eye(2)))
        out.append(m)
    return out


def thermal_gaussian(C, cs):
    """rho proportional to exp(-sum K_ij c_i^dag c_j) with K = log((1 - C^T) / C^T)."""
    n = C.shape[0]
    K = logm((np.eye(n) - C.T) @ np.linalg.inv(C.T))
    Hq = sum(K[i, j] * cs[i].conj().T @ cs[j] for i in range(n) for j in range(n))
    rho = expm(-Hq)
    return rho / np.trace(rho)


def von_neumann_bits(rho):
    w = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))
    w = w[w > 1e-14]
    return float(-np.sum(w * np.log2(w)))


def partial_trace_keep(rho, keep, n):
    """Qubit partial trace keeping the (sorted) sites ``keep`` (0-based)."""
    t = rho.reshape([2] * (2 * n))
    drop = [k for k in range(n) if k not in keep]
    for count, k in enumerate(sorted(drop, reverse=True)):
        m = n - count
        t = np.trace(t, axis1=k, axis2=k + m)
    d = 2 ** len(keep)
    return t.reshape(d, d)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


N3_CLEAN = np.array([[0.6, -0.2j, 0.0], [0.2j, 0.5, -0.2j], [0.0, 0.2j, 0.4]])
