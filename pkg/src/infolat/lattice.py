"""Information lattice of connected segments.

A segment is labeled by its layer ``ell`` (length minus one) and its doubled
midpoint ``n2 = 2n``, so half-integer midpoints stay exact. Internally the
lattice is stored as dense ``(ell, jl)`` arrays with ``jl`` the 0-based left
end; entries outside the triangle are NaN.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator, NamedTuple

import numpy as np

from .errors import PhysicalityError, ValidationError

CLIP_TOL = 1e-10


class LatticeCoord(NamedTuple):
    ell: int
    n2: int

    @property
    def j_left(self) -> int:
        return (self.n2 - self.ell) // 2

    @property
    def j_right(self) -> int:
        return (self.n2 + self.ell) // 2

    @property
    def n(self) -> float:
        return self.n2 / 2

    @classmethod
    def from_ends(cls, j_left: int, j_right: int) -> "LatticeCoord":
        return cls(j_right - j_left, j_left + j_right)

    def validate(self, n_sites: int) -> None:
        if self.ell < 0 or (self.n2 - self.ell) % 2:
            raise ValidationError(f"invalid lattice coordinate {tuple(self)}")
        if not 1 <= self.j_left <= self.j_right <= n_sites:
            raise ValidationError(f"segment {tuple(self)} outside 1..{n_sites}")


def cells(n_sites: int) -> Iterator[tuple[int, int]]:
    """All (ell, jl) pairs in fixed order: by layer, then left to right."""
    for ell in range(n_sites):
        for jl in range(n_sites - ell):
            yield ell, jl


def coord_of(ell: int, jl: int) -> LatticeCoord:
    return LatticeCoord(ell, 2 * jl + 2 + ell)


def index_of(coord: LatticeCoord) -> tuple[int, int]:
    return coord.ell, coord.j_left - 1


def empty_lattice(n_sites: int) -> np.ndarray:
    return np.full((n_sites, n_sites), np.nan)


def site_decomposition(triangle: np.ndarray) -> np.ndarray:
    """i(l, n) = I(l, n) - I(l-1, n-1/2) - I(l-1, n+1/2) + I(l-2, n), with I(l<0) = 0."""
    n = triangle.shape[0]
    out = empty_lattice(n)

    def get(ell, jl):
        return triangle[ell, jl] if ell >= 0 else 0.0

    for ell, jl in cells(n):
        out[ell, jl] = get(ell, jl) - get(ell - 1, jl) - get(ell - 1, jl + 1) + get(ell - 2, jl + 1)
    return out


@dataclass(frozen=True)
class InfoLattice:
    triangle: np.ndarray
    site: np.ndarray

    @property
    def n_sites(self) -> int:
        return self.triangle.shape[0]

    def __getitem__(self, coord: LatticeCoord) -> float:
        coord.validate(self.n_sites)
        return float(self.site[index_of(coord)])

    def triangle_value(self, coord: LatticeCoord) -> float:
        coord.validate(self.n_sites)
        return float(self.triangle[index_of(coord)])

    def coords(self) -> Iterator[LatticeCoord]:
        for ell, jl in cells(self.n_sites):
            yield coord_of(ell, jl)

    def layer(self, ell: int) -> np.ndarray:
        return self.site[ell, : self.n_sites - ell].copy()

    def total(self) -> float:
        return float(np.nansum(self.site))


def reduced_correlation(C: np.ndarray, sites) -> np.ndarray:
    """Submatrix of C on 1-based ``sites`` in the given order."""
    idx = np.asarray(list(sites), dtype=int)
    n = C.shape[0]
    if idx.size == 0:
        raise ValidationError("site set is empty")
    if idx.min() < 1 or idx.max() > n:
        raise ValidationError(f"sites {idx.tolist()} outside 1..{n}")
    idx = idx - 1
    return C[np.ix_(idx, idx)]


def _xlog2x(x: np.ndarray) -> np.ndarray:
    safe = np.where(x > 0, x, 1.0)
    return np.where(x > 0, x * np.log2(safe), 0.0)


def clipped_spectrum(C_A: np.ndarray, tol: float = CLIP_TOL) -> np.ndarray:
    w = np.linalg.eigvalsh(0.5 * (C_A + C_A.conj().T))
    if w.size and (w[0] < -tol or w[-1] > 1 + tol):
        raise PhysicalityError(f"eigenvalues [{w[0]:.3e}, {w[-1]:.3e}] outside [0, 1]")
    return np.clip(w, 0.0, 1.0)


def information_from_spectrum(mu: np.ndarray) -> float:
    return float(mu.size + np.sum(_xlog2x(mu) + _xlog2x(1.0 - mu)))


def subsystem_information(C_A: np.ndarray) -> float:
    """I_A = N_A - S_A in bits."""
    return information_from_spectrum(clipped_spectrum(np.atleast_2d(C_A)))


def total_information(C: np.ndarray) -> float:
    return subsystem_information(C)


def triangle_map(C: np.ndarray, fn: Callable[[np.ndarray], float]) -> np.ndarray:
    n = C.shape[0]
    out = empty_lattice(n)
    for ell, jl in cells(n):
        out[ell, jl] = fn(C[jl:jl + ell + 1, jl:jl + ell + 1])
    return out


def build_info_lattice(C: np.ndarray) -> InfoLattice:
    tri = triangle_map(np.asarray(C), subsystem_information)
    return InfoLattice(tri, site_decomposition(tri))
