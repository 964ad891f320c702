"""Reduced pair state, Wootters concurrence and the closed-form time evolution.

Basis conventions: the reduced density matrix is stored in the collective
basis {|uu>, |+>, |->, |ll>}; the concurrence is evaluated in the bare product
basis {|uu>, |ul>, |lu>, |ll>} with |+/-> = (|ul> +/- |lu>)/sqrt(2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import CollectiveRates
from .errors import InternalConsistencyError, InvalidArgumentError, InvalidStateError

# Collective -> product basis change (columns are |uu>, |+>, |->, |ll>).
_SQ = 1.0 / math.sqrt(2.0)
_COLLECTIVE_TO_PRODUCT = np.array([
    [1.0, 0.0, 0.0, 0.0],
    [0.0, _SQ, _SQ, 0.0],
    [0.0, _SQ, -_SQ, 0.0],
    [0.0, 0.0, 0.0, 1.0],
])

# sigma_y (x) sigma_y in the product basis.
_YY = np.array([
    [0.0, 0.0, 0.0, -1.0],
    [0.0, 0.0, 1.0, 0.0],
    [0.0, 1.0, 0.0, 0.0],
    [-1.0, 0.0, 0.0, 0.0],
])


@dataclass(frozen=True)
class TwoAtomState:
    """Single-excitation reduced state of the pair in the collective basis."""

    rho: np.ndarray
    c_plus: complex
    c_minus: complex
    t: float = 0.0

    def __post_init__(self) -> None:
        rho = np.asarray(self.rho, dtype=complex)
        if rho.shape != (4, 4):
            raise InvalidStateError(f"rho must be 4x4, got {rho.shape}")
        if abs(np.trace(rho) - 1.0) > 1e-12:
            raise InvalidStateError(f"trace(rho) = {np.trace(rho)} != 1")
        if np.abs(rho - rho.conj().T).max() > 1e-12:
            raise InvalidStateError("rho is not Hermitian")
        if abs(rho[0, 0]) > 1e-12:
            raise InvalidStateError("doubly-excited population must vanish")
        eigs = np.linalg.eigvalsh(rho)
        if eigs.min() < -1e-12:
            raise InvalidStateError(f"rho has negative eigenvalue {eigs.min()}")
        object.__setattr__(self, "rho", rho)


def density_matrix(c_plus: complex, c_minus: complex, t: float = 0.0) -> TwoAtomState:
    """Single-excitation reduced density matrix for amplitudes (C+, C-).

    rho = |C+|^2 |+><+| + |C-|^2 |-><-| + C+ C-* |+><-| + h.c.
          + (1 - |C+|^2 - |C-|^2) |ll><ll|
    """
    c_plus = complex(c_plus)
    c_minus = complex(c_minus)
    norm = abs(c_plus) ** 2 + abs(c_minus) ** 2
    if norm - 1.0 > 1e-9:
        raise InvalidStateError(f"|C+|^2 + |C-|^2 = {norm} exceeds 1")
    norm = min(norm, 1.0)
    rho = np.zeros((4, 4), dtype=complex)
    rho[1, 1] = abs(c_plus) ** 2
    rho[2, 2] = abs(c_minus) ** 2
    rho[1, 2] = c_plus * c_minus.conjugate()
    rho[2, 1] = c_minus * c_plus.conjugate()
    rho[3, 3] = 1.0 - norm
    return TwoAtomState(rho=rho, c_plus=c_plus, c_minus=c_minus, t=t)


def concurrence_wootters(state: TwoAtomState) -> float:
    """Wootters concurrence from the spin-flipped density matrix.

    Eigenvalues of rho (sy x sy) rho* (sy x sy) are extracted from the
    Hermitian symmetrization sqrt(rho) M sqrt(rho); tiny negative round-off
    eigenvalues are clamped to zero before the square roots, and the
    max{0, .} clamp is applied once, after the full lambda combination.
    """
    u = _COLLECTIVE_TO_PRODUCT
    rho = u @ state.rho @ u.T
    flipped = _YY @ rho.conj() @ _YY
    evals, vecs = np.linalg.eigh(rho)
    sqrt_rho = (vecs * np.sqrt(np.clip(evals, 0.0, None))) @ vecs.conj().T
    herm = sqrt_rho @ flipped @ sqrt_rho
    lams = np.sqrt(np.clip(np.linalg.eigvalsh(herm), 0.0, None))
    lams = np.sort(lams)[::-1]
    return float(max(0.0, lams[0] - lams[1] - lams[2] - lams[3]))


def concurrence_closed(rates: CollectiveRates, t: float) -> float:
    """Closed-form concurrence for the initial product state |u_A l_B>.

    C(t) = 1/2 sqrt[(e^{-G+ t} + e^{-G- t})^2 - 4 e^{-2 G t} cos^2(2 d_ab t)],
    clamped at zero against round-off under the radical.
    """
    if t < 0:
        raise InvalidArgumentError(f"t must be >= 0, got {t}")
    ep = math.exp(-rates.gamma_plus * t)
    em = math.exp(-rates.gamma_minus * t)
    envelope = (ep + em) ** 2
    osc = 4.0 * math.exp(-2.0 * rates.gamma * t) * math.cos(2.0 * rates.delta_ab * t) ** 2
    radicand = envelope - osc
    if radicand < 0.0:
        if radicand < -1e-12 * max(envelope, 1.0):
            raise InternalConsistencyError(
                f"negative radicand {radicand} in the closed-form concurrence")
        radicand = 0.0
    return 0.5 * math.sqrt(radicand)


def populations(rates: CollectiveRates, t: float) -> tuple[float, float, float, float]:
    """(p_plus, p_minus, p_sum, p_diff) for the initial product state |u_A l_B>."""
    if t < 0:
        raise InvalidArgumentError(f"t must be >= 0, got {t}")
    p_plus = 0.5 * math.exp(-rates.gamma_plus * t)
    p_minus = 0.5 * math.exp(-rates.gamma_minus * t)
    return p_plus, p_minus, p_plus + p_minus, p_plus - p_minus
