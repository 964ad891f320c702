"""Collective two-atom quantities: rates, shifts, memory kernel, Markovian amplitudes.

All rates and shifts are normalized to the free-space decay rate of a single
atom at the pair's transition frequency; times are in units of its inverse.

Geometry convention: the atoms sit at +r and -r on the z axis with antiparallel
z-oriented dipoles.  The antiparallel product d_A . G . d_B = -d^2 G_zz is
applied exactly once, here, to the cross rate and the cross shift.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import GeometryError, InvalidArgumentError, QuadratureError
from .media import SceneConfig
from .scatter import TruncationPolicy, scattering_green_zz, vacuum_green_zz


@dataclass(frozen=True)
class AtomPair:
    """Two identical atoms at +/- radius on the z axis, dipoles antiparallel along z.

    ``dipole_scale`` rescales the dipole magnitude relative to the one folded
    into the rate normalization; it only affects unnormalized diagnostics
    (the memory kernel scales with its square).
    """

    radius: float
    frequency: float
    dipole_scale: float = 1.0

    def __post_init__(self) -> None:
        if not self.radius > 0:
            raise InvalidArgumentError(f"radius must be > 0, got {self.radius}")
        if not self.frequency > 0:
            raise InvalidArgumentError(f"frequency must be > 0, got {self.frequency}")
        if not self.dipole_scale > 0:
            raise InvalidArgumentError(f"dipole_scale must be > 0, got {self.dipole_scale}")

    @classmethod
    def from_scene(cls, cfg: SceneConfig) -> "AtomPair":
        return cls(radius=cfg.atom_radius, frequency=cfg.atom_frequency)


@dataclass(frozen=True)
class CollectiveRates:
    """Normalized single-atom and collective rates/shifts of the pair."""

    gamma: float
    gamma_ab: float
    delta_ab: float
    delta_scat: float
    gamma_plus: float
    gamma_minus: float
    delta_plus: float
    delta_minus: float
    n_orders: int = 0


def _validate_pair(cfg: SceneConfig, pair: AtomPair) -> None:
    if pair.radius <= cfg.exclusion_radius:
        raise GeometryError(
            f"atoms at radius {pair.radius} are not outside all matter "
            f"(need > {cfg.exclusion_radius})")


def pair_rates(cfg: SceneConfig, pair: AtomPair,
               trunc: TruncationPolicy = TruncationPolicy()) -> CollectiveRates:
    """Collective decay rates and shifts from the total on-axis Green function.

    gamma      = (6 pi / k) Im[G_zz(r, r)]          (vacuum part contributes 1)
    gamma_ab   = -(6 pi / k) Im[G_zz(r, -r)]        (antiparallel-dipole sign)
    delta_scat = (6 pi / k) Re[G_zz^scat(r, r)]     (vacuum self-shift renormalized away)
    delta_ab   = -(6 pi / k) Re[G_zz(r, -r)]
    """
    _validate_pair(cfg, pair)
    omega = pair.frequency
    r = pair.radius
    pref = 6.0 * math.pi / omega
    diag = scattering_green_zz(cfg, r, r, omega, antipodal=False, trunc=trunc)
    cross = scattering_green_zz(cfg, r, r, omega, antipodal=True, trunc=trunc)
    vac_cross = vacuum_green_zz(r, r, omega, antipodal=True)

    gamma = 1.0 + pref * diag.value.imag
    gamma_ab = -pref * (vac_cross.value.imag + cross.value.imag)
    delta_scat = pref * diag.value.real
    delta_ab = -pref * (vac_cross.value.real + cross.value.real)
    return CollectiveRates(
        gamma=gamma,
        gamma_ab=gamma_ab,
        delta_ab=delta_ab,
        delta_scat=delta_scat,
        gamma_plus=gamma + gamma_ab,
        gamma_minus=gamma - gamma_ab,
        delta_plus=delta_scat + delta_ab,
        delta_minus=delta_scat - delta_ab,
        n_orders=max(diag.n_used, cross.n_used),
    )


def pair_shifts(cfg: SceneConfig, pair: AtomPair,
                trunc: TruncationPolicy = TruncationPolicy()) -> tuple[float, float]:
    """(delta_ab, delta_scat) of :func:`pair_rates`, for callers that only need shifts."""
    rates = pair_rates(cfg, pair, trunc)
    return rates.delta_ab, rates.delta_scat


def amplitudes_markov(rates: CollectiveRates, c_plus0: complex, c_minus0: complex,
                      t: float) -> tuple[complex, complex]:
    """Exponential evolution of the symmetric/antisymmetric amplitudes."""
    if t < 0:
        raise InvalidArgumentError(f"t must be >= 0, got {t}")
    c_plus = cmath.exp((-0.5 * rates.gamma_plus + 1j * rates.delta_plus) * t) * c_plus0
    c_minus = cmath.exp((-0.5 * rates.gamma_minus + 1j * rates.delta_minus) * t) * c_minus0
    return c_plus, c_minus


# ---------------------------------------------------------------------------
# Memory kernel (diagnostic; the Markovian path above never uses it).
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QuadratureSpec:
    """Frequency grid for the kernel integral over (0, omega_max].

    ``taper_fraction`` applies a raised-cosine rolloff to the top of the grid
    so the kernel's long-time tail is set by physics, not by the hard cutoff.
    ``rtol`` is the accepted full-vs-half grid resolution mismatch.
    """

    omega_max: float
    n_points: int = 2001
    taper_fraction: float = 0.25
    rtol: float = 0.02

    def __post_init__(self) -> None:
        if not self.omega_max > 0:
            raise InvalidArgumentError(f"omega_max must be > 0, got {self.omega_max}")
        if self.n_points < 33:
            raise InvalidArgumentError(f"n_points must be >= 33, got {self.n_points}")
        if not 0.0 <= self.taper_fraction < 1.0:
            raise InvalidArgumentError("taper_fraction must be in [0, 1)")


def _spectral_density(cfg: SceneConfig, pair: AtomPair, omegas: np.ndarray,
                      which: str, trunc: TruncationPolicy) -> np.ndarray:
    """S(omega) = (omega/omega_a)^3 * Gamma_jj'(omega) / 2 on the grid (0 excluded -> 0)."""
    if which not in ("aa", "ab"):
        raise InvalidArgumentError(f"which must be 'aa' or 'ab', got {which!r}")
    omega_a = pair.frequency
    out = np.zeros(len(omegas))
    for i, w in enumerate(omegas):
        if w <= 0.0:
            continue
        rates = pair_rates(cfg, AtomPair(pair.radius, w, pair.dipole_scale), trunc)
        g = rates.gamma if which == "aa" else rates.gamma_ab
        out[i] = 0.5 * (w / omega_a) ** 3 * g
    return out


def _taper(n: int, fraction: float) -> np.ndarray:
    w = np.ones(n)
    m = int(n * fraction)
    if m > 0:
        ramp = 0.5 * (1.0 + np.cos(np.linspace(0.0, math.pi, m)))
        w[n - m:] = ramp
    return w


def _simpson(values: np.ndarray, h: float) -> complex:
    n = len(values)
    if n % 2 == 0:
        raise InvalidArgumentError("Simpson rule needs an odd number of nodes")
    weights = np.ones(n)
    weights[1:-1:2] = 4.0
    weights[2:-1:2] = 2.0
    return complex(h / 3.0 * np.sum(weights * values))


def _round_nodes(n: int) -> int:
    """Smallest node count >= n with n % 4 == 1, so the half grid stays Simpson-valid."""
    while n % 4 != 1:
        n += 1
    return n


def _kernel_integral(spectrum: np.ndarray, omegas: np.ndarray,
                     phase: np.ndarray) -> complex:
    integrand = spectrum * phase
    return -(1.0 / math.pi) * _simpson(integrand, omegas[1] - omegas[0])


def memory_kernel(cfg: SceneConfig, pair: AtomPair, t_minus_tprime: float,
                  grid: QuadratureSpec, which: str = "aa",
                  trunc: TruncationPolicy = TruncationPolicy()) -> complex:
    """Two-time kernel K_jj'(tau) = -(1/pi) * integral of S(omega) e^{-i(omega-omega_a) tau}.

    Scales with the square of the dipole magnitude.  Raises
    :class:`QuadratureError` when halving the grid resolution moves the result
    by more than ``grid.rtol`` relative.
    """
    if t_minus_tprime < 0:
        raise InvalidArgumentError(f"t_minus_tprime must be >= 0, got {t_minus_tprime}")
    if grid.omega_max < 5.0 * pair.frequency:
        raise InvalidArgumentError(
            f"omega_max={grid.omega_max} must cover at least 5x the atomic frequency")
    n = _round_nodes(grid.n_points)
    omegas = np.linspace(0.0, grid.omega_max, n)
    spectrum = _spectral_density(cfg, pair, omegas, which, trunc) * _taper(n, grid.taper_fraction)
    tau = t_minus_tprime
    phase = np.exp(-1j * (omegas - pair.frequency) * tau)
    full = _kernel_integral(spectrum, omegas, phase)
    half = _kernel_integral(spectrum[::2], omegas[::2], phase[::2])
    scale = max(abs(full), 1e-12)
    if abs(full - half) > grid.rtol * scale:
        raise QuadratureError(
            f"kernel quadrature not converged: |full-half|/|full| = "
            f"{abs(full - half) / scale:.2e} on {n} nodes (omega_max={grid.omega_max})")
    return full * pair.dipole_scale**2


def memory_kernel_time_integral(cfg: SceneConfig, pair: AtomPair, t_max: float,
                                grid: QuadratureSpec, which: str = "aa",
                                trunc: TruncationPolicy = TruncationPolicy()) -> complex:
    """One-sided integral of the kernel over tau in [0, t_max], done analytically in tau.

    In the Markov limit this tends to -Gamma_jj'/2 + i * delta_jj'^(KK), where
    delta^(KK) is the principal-value resummation of the level shift (half the
    resonant Re-G convention used by :func:`pair_rates` for ``delta_ab``).
    """
    if t_max <= 0:
        raise InvalidArgumentError(f"t_max must be > 0, got {t_max}")
    n = _round_nodes(grid.n_points)
    omegas = np.linspace(0.0, grid.omega_max, n)
    spectrum = _spectral_density(cfg, pair, omegas, which, trunc) * _taper(n, grid.taper_fraction)
    detuning = omegas - pair.frequency
    with np.errstate(divide="ignore", invalid="ignore"):
        window = (1.0 - np.exp(-1j * detuning * t_max)) / (1j * detuning)
    window = np.where(np.abs(detuning) < 1e-12, t_max, window)
    full = _kernel_integral(spectrum, omegas, window)
    half = _kernel_integral(spectrum[::2], omegas[::2], window[::2])
    scale = max(abs(full), 1e-12)
    if abs(full - half) > grid.rtol * scale:
        raise QuadratureError(
            f"kernel quadrature not converged: |full-half|/|full| = "
            f"{abs(full - half) / scale:.2e} on {n} nodes (omega_max={grid.omega_max})")
    return full * pair.dipole_scale**2
