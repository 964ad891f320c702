"""Dispersive material models and the scenario description.

Unit system: the oscillator resonance frequency is the frequency unit
(omega_0 = 1), c = 1, so lengths are in c/omega_0 and the atomic decay rates
produced downstream are in units of the free-space rate.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

from .errors import DomainError, GeometryError, InvalidArgumentError

SCENARIOS = ("free_space", "object_only", "cloaked_object")


@dataclass(frozen=True)
class LorentzParams:
    """Single-resonance oscillator parameters, in units of the resonance frequency."""

    omega_p: float = 0.1
    gamma: float = 0.01

    def __post_init__(self) -> None:
        if self.omega_p < 0 or not math.isfinite(self.omega_p):
            raise InvalidArgumentError(f"omega_p must be >= 0, got {self.omega_p}")
        if self.gamma < 0 or not math.isfinite(self.gamma):
            raise InvalidArgumentError(f"gamma must be >= 0, got {self.gamma}")


def lorentz_kappa(params: LorentzParams, omega: float) -> complex:
    """Oscillator dispersion factor kappa(omega) = 1 + omega_p^2 / (1 - omega^2 - i gamma omega).

    The sign convention keeps Im kappa >= 0 for omega > 0 (passive medium).
    """
    if not (omega > 0 and math.isfinite(omega)):
        raise InvalidArgumentError(f"omega must be > 0, got {omega}")
    den = 1.0 - omega * omega - 1j * params.gamma * omega
    if den == 0:
        raise DomainError(
            "dispersion factor has a pole at the undamped resonance (omega = 1, gamma = 0)"
        )
    return 1.0 + params.omega_p**2 / den


@dataclass(frozen=True)
class SceneConfig:
    """Geometry and materials of one scenario.

    All radii are in c/omega_0, frequencies in omega_0.  ``atom_radius`` is the
    common distance of the two atoms from the origin; they sit at +/- r on the
    z axis.
    """

    scenario: str = "free_space"
    r1: float = 3.0
    r2: float = 4.5
    alpha: float = 1.3
    object_radius: float = 3.0
    atom_radius: float = 4.7
    atom_frequency: float = 0.1
    lorentz: LorentzParams = field(default_factory=LorentzParams)

    def __post_init__(self) -> None:
        if self.scenario not in SCENARIOS:
            raise InvalidArgumentError(
                f"scenario must be one of {SCENARIOS}, got {self.scenario!r}"
            )
        for name in ("r1", "r2", "alpha", "object_radius", "atom_radius", "atom_frequency"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v)):
                raise InvalidArgumentError(f"{name} must be finite, got {v!r}")
        if self.atom_frequency <= 0:
            raise InvalidArgumentError(f"atom_frequency must be > 0, got {self.atom_frequency}")
        if self.alpha < 1.0:
            raise InvalidArgumentError(f"alpha must be >= 1, got {self.alpha}")
        if self.scenario == "cloaked_object":
            if not 0 < self.r1 < self.r2:
                raise GeometryError(f"need 0 < r1 < r2, got r1={self.r1}, r2={self.r2}")
            if self.object_radius != self.r1:
                raise GeometryError(
                    "cloaked_object requires object_radius == r1 "
                    f"(got {self.object_radius} != {self.r1})"
                )
            if self.atom_radius <= self.r2:
                raise GeometryError(
                    f"atoms must sit outside the shell: atom_radius={self.atom_radius} <= r2={self.r2}"
                )
        elif self.scenario == "object_only":
            if self.object_radius <= 0:
                raise GeometryError(f"object_radius must be > 0, got {self.object_radius}")
            if self.atom_radius <= self.object_radius:
                raise GeometryError(
                    "atoms must sit outside the object: "
                    f"atom_radius={self.atom_radius} <= object_radius={self.object_radius}"
                )
        else:  # free_space
            if self.atom_radius <= 0:
                raise GeometryError(f"atom_radius must be > 0, got {self.atom_radius}")

    @property
    def exclusion_radius(self) -> float:
        """Smallest radius outside all matter."""
        if self.scenario == "cloaked_object":
            return self.r2
        if self.scenario == "object_only":
            return self.object_radius
        return 0.0


@dataclass(frozen=True)
class CloakTensors:
    eps_r: complex
    eps_t: complex
    mu_r: complex
    mu_t: complex


def cloak_tensors(cfg: SceneConfig, r: float, omega: float) -> CloakTensors:
    """Anisotropic shell profile of the linear radial map, times the dispersion factor.

    eps_t = mu_t = r2/(r2-r1) * kappa; eps_r = mu_r = eps_t * ((r-r1)/r)^2.
    """
    if not cfg.r1 <= r <= cfg.r2:
        raise DomainError(f"r={r} outside the shell [{cfg.r1}, {cfg.r2}]")
    kappa = lorentz_kappa(cfg.lorentz, omega)
    t = cfg.r2 / (cfg.r2 - cfg.r1) * kappa
    radial = t * ((r - cfg.r1) / r) ** 2
    return CloakTensors(eps_r=radial, eps_t=t, mu_r=radial, mu_t=t)


def object_params(cfg: SceneConfig, omega: float) -> tuple[complex, complex]:
    """Impedance-matched object material: eps = mu = alpha * kappa(omega)."""
    kappa = lorentz_kappa(cfg.lorentz, omega)
    value = cfg.alpha * kappa
    return value, value


def _passive_sqrt(z: complex) -> complex:
    """Square root on the branch with Im >= 0 (and Re >= 0 when purely real)."""
    root = cmath.sqrt(z)
    if root.imag < 0 or (root.imag == 0 and root.real < 0):
        root = -root
    return root


@dataclass(frozen=True)
class Wavenumbers:
    k1: float
    kt: complex
    k3: complex


def wavenumbers(cfg: SceneConfig, omega: float) -> Wavenumbers:
    """Exterior, shell and object wavenumbers at omega (c = 1, so k1 = omega).

    ``kt`` uses the tangential shell parameters; with the shifted radial
    argument of the shell basis, kt*(r - r1) equals the mapped-ball phase.
    """
    if not (omega > 0 and math.isfinite(omega)):
        raise InvalidArgumentError(f"omega must be > 0, got {omega}")
    k1 = omega
    if cfg.scenario == "cloaked_object":
        tensors = cloak_tensors(cfg, cfg.r2, omega)
        kt = omega * _passive_sqrt(tensors.eps_t * tensors.mu_t)
    else:
        kt = complex(omega)
    if cfg.scenario == "free_space":
        k3 = complex(omega)
    else:
        eps, mu = object_params(cfg, omega)
        k3 = omega * _passive_sqrt(eps * mu)
    return Wavenumbers(k1=k1, kt=kt, k3=k3)
