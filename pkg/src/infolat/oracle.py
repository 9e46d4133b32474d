"""Closed-form three-site steady states used as an independent reference.

These are written out from the analytic solution and never call the generic
solver.
"""
from __future__ import annotations

import numpy as np

from .errors import DomainError


def _hermitian(c11, c22, c33, c12, c13, c23) -> np.ndarray:
    C = np.array([[c11, c12, c13],
                  [np.conj(c12), c22, c23],
                  [np.conj(c13), np.conj(c23), c33]], dtype=complex)
    return C


def ness_large_bias_n3(g: float, J: float, eps2: float, delta: float) -> np.ndarray:
    if abs(delta) >= 1:
        raise DomainError(f"|delta| must be < 1, got {delta}")
    if g <= 0:
        raise DomainError("g must be positive")
    G1 = g * (1 + delta)
    g3 = g * (1 - delta)
    a = 4 * J ** 2 + G1 * g3
    D = (G1 + g3) * (a ** 2 + 4 * G1 * g3 * eps2 ** 2)
    c11 = 1 - 4 * J ** 2 * g3 * a / D
    c22 = G1 * (a * (4 * J ** 2 + g3 ** 2) + 4 * G1 * g3 * eps2 ** 2) / D
    c33 = (G1 / g3) * (1 - c11)
    c12 = -2j * J * G1 * g3 * (4 * J ** 2 + g3 * (G1 - 2j * eps2)) / D
    c13 = 8j * J ** 2 * G1 * g3 * eps2 / D
    c23 = -2j * J * G1 * g3 * (4 * J ** 2 + G1 * (g3 + 2j * eps2)) / D
    return _hermitian(c11, c22, c33, c12, c13, c23)


def particle_current_n3(g: float, J: float, eps2: float, delta: float) -> float:
    """Steady-state current from the contact balance and from the first bond; both must agree."""
    C = ness_large_bias_n3(g, J, eps2, delta)
    contact = g * (1 + delta) * (1 - C[0, 0].real)
    bond = -2 * J * C[0, 1].imag
    if not np.isclose(contact, bond, rtol=1e-12, atol=1e-14):
        raise AssertionError(f"current forms disagree: {contact} vs {bond}")
    return float(contact)


def ness_linear_response_n3(g: float, J: float, eps2: float, phi: float) -> np.ndarray:
    """Linear-response steady state at delta = 0."""
    d = g ** 2 + 4 * J ** 2 + 2j * g * eps2
    d2 = abs(d) ** 2
    c11 = 0.5 + 0.5 * (1 - 4 * J ** 2 * (g ** 2 + 4 * J ** 2) / d2) * phi
    c12 = -1j * g * J * phi / d
    c23 = -1j * g * J * phi / np.conj(d)
    c13 = 4j * g * J ** 2 * eps2 * phi / d2
    return _hermitian(c11, 0.5, 1 - c11, c12, c13, c23)


def first_order_delta_coefficients(g: float, J: float, eps2: float) -> np.ndarray:
    """dC/d(delta) at delta = 0 from the printed first-order expansion."""
    C0 = ness_large_bias_n3(g, J, eps2, 0.0)
    d = g ** 2 + 4 * J ** 2 + 2j * g * eps2
    d2 = abs(d) ** 2
    c33 = C0[2, 2].real
    dc12 = 2 * J * g ** 2 * eps2 / d2
    dc22 = (16 * J ** 4 - g ** 4 + 4 * g ** 2 * eps2 ** 2) / (2 * d2)
    return _hermitian(c33, dc22, c33, dc12, 0.0, dc12)


def current_expansion_constants(g: float, J: float, eps2: float) -> tuple[float, float, float]:
    d2 = (g ** 2 + 4 * J ** 2) ** 2 + 4 * g ** 2 * eps2 ** 2
    s = g ** 2 + 4 * J ** 2
    A1 = 2 * g * J ** 2 * s / d2
    A2 = g ** 2 * (s + 4 * eps2 ** 2) / (2 * J ** 2 * s)
    A3 = 2 * g * J ** 2 * s / (np.log(2) * (d2 - 2 * J ** 2 * s))
    return A1, A2, A3


def delta_star(g: float, J: float) -> float:
    if g <= 0 or J <= 0:
        raise DomainError("g and J must be positive")
    return float((np.sqrt(g ** 4 + 4 * J ** 4) - 2 * J ** 2) / g ** 2)
