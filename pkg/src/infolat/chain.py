"""Chain Hamiltonians and boundary reservoir rates.

Sites are 1-based at the public surface (``j0`` arguments, reservoir
attachment points). Arrays are 0-based internally.

Only diagonal rate matrices are supported. A non-diagonal generalization would
replace the two rate vectors in :class:`ReservoirSpec` by Hermitian matrices and
change ``dynamics.drift`` and ``currents.f_matrices`` accordingly.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .errors import DomainError, ValidationError


def _as_tuple(values, length: int, name: str) -> tuple[float, ...]:
    arr = np.asarray(values, dtype=float).ravel()
    if arr.shape != (length,):
        raise ValidationError(f"{name} must have length {length}, got {arr.size}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} contains non-finite entries")
    return tuple(float(v) for v in arr)


@dataclass(frozen=True)
class ChainSpec:
    n_sites: int
    hoppings: tuple[float, ...]
    onsite: tuple[float, ...]

    def __post_init__(self):
        if int(self.n_sites) != self.n_sites or self.n_sites < 2:
            raise ValidationError(f"n_sites must be an integer >= 2, got {self.n_sites}")
        object.__setattr__(self, "n_sites", int(self.n_sites))
        object.__setattr__(self, "hoppings", _as_tuple(self.hoppings, self.n_sites - 1, "hoppings"))
        object.__setattr__(self, "onsite", _as_tuple(self.onsite, self.n_sites, "onsite"))


@dataclass(frozen=True)
class ReservoirSpec:
    inject: tuple[float, ...]
    remove: tuple[float, ...]

    def __post_init__(self):
        inj = np.asarray(self.inject, dtype=float).ravel()
        rem = np.asarray(self.remove, dtype=float).ravel()
        if inj.shape != rem.shape:
            raise ValidationError("inject and remove must have equal length")
        if np.any(inj < 0) or np.any(rem < 0):
            raise DomainError("reservoir rates must be nonnegative")
        object.__setattr__(self, "inject", _as_tuple(inj, inj.size, "inject"))
        object.__setattr__(self, "remove", _as_tuple(rem, rem.size, "remove"))

    @property
    def n_sites(self) -> int:
        return len(self.inject)

    @property
    def gamma_in(self) -> np.ndarray:
        return np.array(self.inject)

    @property
    def gamma_out(self) -> np.ndarray:
        return np.array(self.remove)

    def is_end_coupled(self) -> bool:
        total = self.gamma_in + self.gamma_out
        return bool(np.all(total[1:-1] == 0))

    def max_rate(self) -> float:
        return float(max(max(self.inject), max(self.remove)))


def uniform_chain(n_sites: int, J: float = 1.0, eps: float = 0.0) -> ChainSpec:
    return ChainSpec(n_sites, [J] * (n_sites - 1), [eps] * n_sites)


def with_site_defect(spec: ChainSpec, j0: int, eps: float) -> ChainSpec:
    if not 1 <= j0 <= spec.n_sites:
        raise ValidationError(f"defect site {j0} outside 1..{spec.n_sites}")
    onsite = list(spec.onsite)
    onsite[j0 - 1] = eps
    return ChainSpec(spec.n_sites, spec.hoppings, onsite)


def with_bond_defect(spec: ChainSpec, j0: int, J: float) -> ChainSpec:
    """Set the hopping on bond (j0, j0+1)."""
    if not 1 <= j0 <= spec.n_sites - 1:
        raise ValidationError(f"bond {j0} outside 1..{spec.n_sites - 1}")
    hops = list(spec.hoppings)
    hops[j0 - 1] = J
    return ChainSpec(spec.n_sites, hops, spec.onsite)


def build_hamiltonian(spec: ChainSpec) -> np.ndarray:
    n = spec.n_sites
    H = np.zeros((n, n), dtype=complex)
    H[np.arange(n), np.arange(n)] = spec.onsite
    idx = np.arange(n - 1)
    H[idx, idx + 1] = spec.hoppings
    H[idx + 1, idx] = spec.hoppings
    return H


def _end_rates(n_sites: int, left: tuple[float, float], right: tuple[float, float]) -> ReservoirSpec:
    if n_sites < 2:
        raise ValidationError("n_sites must be >= 2")
    inj = np.zeros(n_sites)
    rem = np.zeros(n_sites)
    inj[0], rem[0] = left
    inj[-1], rem[-1] = right
    return ReservoirSpec(inj, rem)


def rates_large_bias(n_sites: int, g: float, delta: float) -> ReservoirSpec:
    """Injection at site 1 with rate g(1+delta), removal at site N with g(1-delta)."""
    if g <= 0:
        raise DomainError(f"g must be positive, got {g}")
    if abs(delta) >= 1:
        raise DomainError(f"|delta| must be < 1, got {delta}")
    return _end_rates(n_sites, (g * (1 + delta), 0.0), (0.0, g * (1 - delta)))


def rates_linear_response(n_sites: int, g: float, delta: float, phi: float) -> ReservoirSpec:
    if g <= 0:
        raise DomainError(f"g must be positive, got {g}")
    h = 0.5 * g
    left = (h * (1 + delta + phi), h * (1 - delta - phi))
    right = (h * (1 + delta - phi), h * (1 - delta + phi))
    if min(left + right) < 0:
        raise DomainError(f"delta={delta}, phi={phi} give a negative rate")
    return _end_rates(n_sites, left, right)


def fermi(energy: float, mu: float, T: float) -> float:
    if not T > 0:
        raise DomainError(f"temperature must be positive, got {T}")
    return float(expit(-(energy - mu) / T))


def rates_from_fermi(n_sites: int, g_left: float, g_right: float, mu_left: float, mu_right: float,
                     T_left: float, T_right: float, eps_1: float, eps_N: float) -> ReservoirSpec:
    """End reservoirs from lead hybridizations and Fermi factors at the end-site energies.

    Infinite chemical potentials are allowed and give the large-bias limit.
    """
    if g_left < 0 or g_right < 0:
        raise DomainError("hybridizations must be nonnegative")
    f_l = fermi(eps_1, mu_left, T_left)
    f_r = fermi(eps_N, mu_right, T_right)
    return _end_rates(n_sites, (g_left * f_l, g_left * (1 - f_l)), (g_right * f_r, g_right * (1 - f_r)))
