"""Layered-sphere scattering: interface ladder, mode coefficients and Green functions.

Normalization: all Green values are reported in the convention where the
normalized single-atom decay rate is (6 pi / k) * Im G_zz, i.e. the vacuum
coincidence limit of Im G_zz is k / 6 pi.

The printed boundary-coefficient recipe this ladder descends from cannot be
evaluated literally; the coefficients here are rederived from continuity of
tangential E and H at each interface.  For each polarization the outer
interface contributes four subdeterminants (N0, N1, D0, D1) and the inner
interface one reflection R, combined exactly as

    B = -(T_F1 * R_F1 + T_F1 * R_F2) / (T_F1 + T_P1)

with T_F1 = D0, R_F1 = N0/D0, R_F2 = R*N1/D0, T_P1 = R*D1, which is the
closed two-interface elimination B = -(N0 + R*N1)/(D0 + R*D1).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace
from typing import Mapping

import numpy as np

from . import specfun
from .errors import (
    GeometryError,
    InvalidArgumentError,
    NumericalDegeneracyError,
    TruncationError,
)
from .media import SceneConfig, cloak_tensors, object_params, wavenumbers

_DENOM_FLOOR = 1e-300


@dataclass(frozen=True)
class TruncationPolicy:
    """Series truncation: extend past the size-parameter estimate until
    ``consecutive`` successive terms fall below ``tol`` times the partial sum."""

    tol: float = 1e-10
    n_max: int = 1024
    consecutive: int = 3

    def __post_init__(self) -> None:
        if not self.tol > 0:
            raise InvalidArgumentError(f"tol must be > 0, got {self.tol}")
        if self.n_max < 1:
            raise InvalidArgumentError(f"n_max must be >= 1, got {self.n_max}")
        if self.consecutive < 1:
            raise InvalidArgumentError(f"consecutive must be >= 1, got {self.consecutive}")


def wiscombe_order(x: float) -> int:
    """Classic size-parameter truncation estimate for Mie-type series."""
    x = abs(x)
    return int(math.ceil(x + 4.05 * x ** (1.0 / 3.0) + 10.0))


@dataclass(frozen=True)
class ModeCoefficients:
    """Scattering coefficients of one multipole order.

    ``bm``/``bn`` multiply the outgoing TE (H) and TM (V) waves of the
    scattered dyad; ``ladder`` holds the eight interface coefficients they
    were assembled from, ``eta1`` the (unit) exterior wave impedance that
    cancels in the assembly but is kept inspectable.
    """

    order: int
    bm: complex
    bn: complex
    ladder: Mapping[str, complex]
    eta1: complex = 1.0 + 0.0j


@dataclass(frozen=True)
class GreenValue:
    """One dyadic zz Green-function value plus series diagnostics."""

    value: complex
    part: str
    n_used: int = 0
    tail_estimate: float = 0.0


class _Kahan:
    """Compensated complex accumulator; deterministic for ascending-order sums."""

    __slots__ = ("total", "carry")

    def __init__(self) -> None:
        self.total = 0.0 + 0.0j
        self.carry = 0.0 + 0.0j

    def add(self, value: complex) -> None:
        value = value + self.carry
        new_total = self.total + value
        self.carry = value - (new_total - self.total)
        self.total = new_total


@dataclass(frozen=True)
class _Region:
    """Radial function tables of one interface side: z_n, h_n and Riccati
    derivatives at the side's argument, plus the k/mu impedance factor.

    Both polarizations carry k/mu; TE attaches it to the Riccati-derivative
    row of the continuity system, TM to the function row.
    """

    j: np.ndarray
    h: np.ndarray | None
    dj: np.ndarray
    dh: np.ndarray | None
    g: complex


def _region(nmax: int, argument: complex, k: complex, mu: complex,
            outgoing: bool = True) -> _Region:
    j = specfun.spherical_jn_all(nmax, argument)
    dj = specfun.riccati_derivative_all(nmax, argument, "bessel")
    h = dh = None
    if outgoing:
        h = specfun.spherical_hn1_all(nmax, argument)
        dh = specfun.riccati_derivative_all(nmax, argument, "hankel1")
    return _Region(j=j, h=h, dj=dj, dh=dh, g=k / mu)


def _subdets_te(n: int, outer: _Region, inner: _Region) -> tuple[complex, complex, complex, complex]:
    """Outer-interface subdeterminants for the TE (H) polarization."""
    g1, g2 = outer.g, inner.g
    n0 = g2 * inner.dj[n] * outer.j[n] - g1 * inner.j[n] * outer.dj[n]
    n1 = g2 * inner.dh[n] * outer.j[n] - g1 * inner.h[n] * outer.dj[n]
    d0 = g2 * inner.dj[n] * outer.h[n] - g1 * inner.j[n] * outer.dh[n]
    d1 = g2 * inner.dh[n] * outer.h[n] - g1 * inner.h[n] * outer.dh[n]
    return n0, n1, d0, d1


def _subdets_tm(n: int, outer: _Region, inner: _Region) -> tuple[complex, complex, complex, complex]:
    """TM (V) polarization: the k/mu factor moves to the function row."""
    g1, g2 = outer.g, inner.g
    n0 = g2 * inner.j[n] * outer.dj[n] - g1 * inner.dj[n] * outer.j[n]
    n1 = g2 * inner.h[n] * outer.dj[n] - g1 * inner.dh[n] * outer.j[n]
    d0 = g2 * inner.j[n] * outer.dh[n] - g1 * inner.dj[n] * outer.h[n]
    d1 = g2 * inner.h[n] * outer.dh[n] - g1 * inner.dh[n] * outer.h[n]
    return n0, n1, d0, d1


def _inner_reflection_te(n: int, shell: _Region, core: _Region) -> complex:
    g2, g3 = shell.g, core.g
    num = g2 * shell.dj[n] * core.j[n] - g3 * shell.j[n] * core.dj[n]
    den = g2 * shell.dh[n] * core.j[n] - g3 * shell.h[n] * core.dj[n]
    return -num / den


def _inner_reflection_tm(n: int, shell: _Region, core: _Region) -> complex:
    g2, g3 = shell.g, core.g
    num = g2 * shell.j[n] * core.dj[n] - g3 * shell.dj[n] * core.j[n]
    den = g2 * shell.h[n] * core.dj[n] - g3 * shell.dh[n] * core.j[n]
    return -num / den


class _SceneLadder:
    """Mode-coefficient table for one (scene, omega) pair, computed lazily in n."""

    def __init__(self, cfg: SceneConfig, omega: float):
        self.cfg = cfg
        self.omega = float(omega)
        self._coeffs: list[ModeCoefficients] = []
        self._nmax = -1

    def _build(self, nmax: int) -> None:
        cfg, omega = self.cfg, self.omega
        kw = wavenumbers(cfg, omega)
        if cfg.scenario == "cloaked_object":
            # Shifted-argument shell basis: the linear radial map sends the
            # inner shell boundary to its coordinate origin, where the regular
            # and outgoing families degenerate; matching a finite core field
            # there forces the inner reflection (and the core amplitude) to
            # zero, so only the outer interface scatters.
            tensors = cloak_tensors(cfg, cfg.r2, omega)
            outer = _region(nmax, kw.k1 * cfg.r2, kw.k1, 1.0)
            shell = _region(nmax, kw.kt * (cfg.r2 - cfg.r1), kw.kt, tensors.mu_t)
            r_te = np.zeros(nmax + 1, dtype=complex)
            r_tm = np.zeros(nmax + 1, dtype=complex)
        elif cfg.scenario == "object_only":
            radius = cfg.object_radius
            eps, mu = object_params(cfg, omega)
            outer = _region(nmax, kw.k1 * radius, kw.k1, 1.0)
            shell = _region(nmax, kw.k1 * radius, kw.k1, 1.0)
            core = _region(nmax, kw.k3 * radius, kw.k3, mu, outgoing=False)
            r_te = np.array([0j] + [_inner_reflection_te(n, shell, core) for n in range(1, nmax + 1)])
            r_tm = np.array([0j] + [_inner_reflection_tm(n, shell, core) for n in range(1, nmax + 1)])
        else:  # free_space
            zero = {k: 0j for k in ("t_f1_h", "t_p1_h", "r_f1_h", "r_f2_h",
                                    "t_f1_v", "t_p1_v", "r_f1_v", "r_f2_v")}
            self._coeffs = [ModeCoefficients(order=n, bm=0j, bn=0j, ladder=dict(zero))
                            for n in range(nmax + 1)]
            self._nmax = nmax
            return

        coeffs: list[ModeCoefficients] = []
        for n in range(nmax + 1):
            if n == 0:
                coeffs.append(ModeCoefficients(order=0, bm=0j, bn=0j, ladder={}))
                continue
            entry: dict[str, complex] = {}
            bs: dict[str, complex] = {}
            for pol, subdets, r_inner in (("h", _subdets_te, r_te), ("v", _subdets_tm, r_tm)):
                n0, n1, d0, d1 = subdets(n, outer, shell)
                r = r_inner[n]
                t_f1 = d0
                t_p1 = r * d1
                den = t_f1 + t_p1
                if not (abs(den) > _DENOM_FLOOR) or not cmath.isfinite(den):
                    raise NumericalDegeneracyError(
                        f"degenerate ladder denominator at order n={n}, omega={omega}",
                        order=n, omega=omega)
                r_f1 = n0 / d0
                r_f2 = r * n1 / d0
                b = -(t_f1 * r_f1 + t_f1 * r_f2) / den
                if not cmath.isfinite(b):
                    raise NumericalDegeneracyError(
                        f"non-finite mode coefficient at order n={n}, omega={omega}",
                        order=n, omega=omega)
                entry.update({f"t_f1_{pol}": t_f1, f"t_p1_{pol}": t_p1,
                              f"r_f1_{pol}": r_f1, f"r_f2_{pol}": r_f2})
                bs[pol] = b
            coeffs.append(ModeCoefficients(order=n, bm=bs["h"], bn=bs["v"], ladder=entry))
        self._coeffs = coeffs
        self._nmax = nmax

    def upto(self, nmax: int) -> list[ModeCoefficients]:
        if nmax > self._nmax:
            self._build(max(nmax, 2 * self._nmax if self._nmax > 0 else nmax))
        return self._coeffs[: nmax + 1]


def coefficient_ladder(cfg: SceneConfig, omega: float, n: int) -> ModeCoefficients:
    """TE/TM scattering coefficients and the interface ladder at order n."""
    if n < 1:
        raise InvalidArgumentError(f"order must be >= 1, got {n}")
    if not omega > 0:
        raise InvalidArgumentError(f"omega must be > 0, got {omega}")
    return _SceneLadder(cfg, omega).upto(n)[n]


def vacuum_green_zz(r: float, r_prime: float, omega: float, antipodal: bool = False) -> GreenValue:
    """Closed-form free-space zz dyadic component for on-axis points.

    Separation d is r + r' for antipodal points and |r - r'| otherwise.  At
    d = 0 the real part diverges (returned as inf); the imaginary part is the
    coincidence limit k / 6 pi.
    """
    if r <= 0 or r_prime <= 0:
        raise InvalidArgumentError("radii must be > 0")
    if not omega > 0:
        raise InvalidArgumentError(f"omega must be > 0, got {omega}")
    k = omega
    d = r + r_prime if antipodal else abs(r - r_prime)
    if d == 0.0:
        return GreenValue(value=complex(math.inf, k / (6.0 * math.pi)), part="vacuum")
    kd = k * d
    value = k / (2.0 * math.pi) * cmath.exp(1j * kd) * (1.0 / kd**3 - 1j / kd**2)
    return GreenValue(value=value, part="vacuum")


def _check_exterior(cfg: SceneConfig, *radii: float) -> None:
    bound = cfg.exclusion_radius
    for r in radii:
        if r <= bound:
            raise GeometryError(f"point at radius {r} is not outside all matter (> {bound})")


def scattering_green_zz(cfg: SceneConfig, r: float, r_prime: float, omega: float,
                        antipodal: bool = False,
                        trunc: TruncationPolicy = TruncationPolicy()) -> GreenValue:
    """Modal series for the scattering part of the on-axis zz Green function.

    Per order the term is (i k / 4 pi) n(n+1)(2n+1) B_N (h_n(kr)/kr)(h_n(kr')/kr'),
    with the parity factor (-1)^n applied per order when the source sits on the
    opposite side of the z axis.  Terms are summed in ascending n with
    compensated summation.
    """
    _check_exterior(cfg, r, r_prime)
    if not omega > 0:
        raise InvalidArgumentError(f"omega must be > 0, got {omega}")
    if cfg.scenario == "free_space":
        return GreenValue(value=0j, part="scattering")
    k = omega
    base = wiscombe_order(k * max(r, r_prime))
    ladder = _SceneLadder(cfg, omega)
    acc = _Kahan()
    small_streak = 0
    n_used = 0
    last_terms: list[float] = []
    n = 1
    hr = hrp = None
    table_n = -1
    while n <= trunc.n_max:
        if n > table_n:
            table_n = max(base, 2 * table_n if table_n > 0 else base)
            table_n = max(table_n, n)
            coeffs = ladder.upto(table_n)
            hr = specfun.spherical_hn1_all(table_n, k * r)
            hrp = specfun.spherical_hn1_all(table_n, k * r_prime)
        bn = coeffs[n].bn
        term = (1j * k / (4.0 * math.pi)) * n * (n + 1) * (2 * n + 1) * bn \
            * (hr[n] / (k * r)) * (hrp[n] / (k * r_prime))
        if antipodal and n % 2 == 1:
            term = -term
        acc.add(term)
        n_used = n
        mag = abs(term)
        last_terms.append(mag)
        if len(last_terms) > 4:
            last_terms.pop(0)
        scale = max(abs(acc.total), 1e-280)
        if n >= base and mag < trunc.tol * scale:
            small_streak += 1
            if small_streak >= trunc.consecutive:
                break
        else:
            small_streak = 0
        n += 1
    else:
        tail = _tail_bound(last_terms)
        raise TruncationError(
            f"series not converged within n_max={trunc.n_max} "
            f"(tail estimate {tail:.3e})", n_max=trunc.n_max, tail_estimate=tail)
    tail = _tail_bound(last_terms)
    return GreenValue(value=acc.total, part="scattering", n_used=n_used, tail_estimate=tail)


def _tail_bound(last_terms: list[float]) -> float:
    """Geometric overestimate of the dropped remainder from the last few terms."""
    if not last_terms:
        return 0.0
    tail = last_terms[-1]
    ratios = [b / a for a, b in zip(last_terms, last_terms[1:]) if a > 0]
    rho = min(0.9, max(ratios) if ratios else 0.5)
    return tail * rho / (1.0 - rho) + tail


def total_green_zz(cfg: SceneConfig, r: float, r_prime: float, omega: float,
                   antipodal: bool = False,
                   trunc: TruncationPolicy = TruncationPolicy()) -> GreenValue:
    """Vacuum plus scattering zz Green value."""
    vac = vacuum_green_zz(r, r_prime, omega, antipodal)
    scat = scattering_green_zz(cfg, r, r_prime, omega, antipodal, trunc)
    return GreenValue(value=vac.value + scat.value, part="total",
                      n_used=scat.n_used, tail_estimate=scat.tail_estimate)


# ---------------------------------------------------------------------------
# Full dyadic evaluation at general exterior positions.
# ---------------------------------------------------------------------------


def _spherical_frame(vec: np.ndarray) -> tuple[float, float, float, np.ndarray, np.ndarray, np.ndarray]:
    x, y, z = float(vec[0]), float(vec[1]), float(vec[2])
    r = math.sqrt(x * x + y * y + z * z)
    if r == 0:
        raise InvalidArgumentError("position must not be the origin")
    theta = math.acos(max(-1.0, min(1.0, z / r)))
    phi = math.atan2(y, x)
    st, ct = math.sin(theta), math.cos(theta)
    sp, cp = math.sin(phi), math.cos(phi)
    rhat = np.array([st * cp, st * sp, ct])
    that = np.array([ct * cp, ct * sp, -st])
    phat = np.array([-sp, cp, 0.0])
    return r, theta, phi, rhat, that, phat


def _angular_tables(nmax: int, theta: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """P_n^m(cos theta), dP_n^m/dtheta and m P_n^m/sin theta for n,m <= nmax."""
    P = np.zeros((nmax + 1, nmax + 1))
    dP = np.zeros((nmax + 1, nmax + 1))
    mPs = np.zeros((nmax + 1, nmax + 1))
    x = math.cos(theta)
    s = math.sin(theta)
    if abs(s) < 1e-12:
        sign = 1.0 if x > 0 else -1.0
        for n in range(nmax + 1):
            P[n, 0] = 1.0 if x > 0 else (-1.0) ** n
            if n >= 1:
                half = n * (n + 1) / 2.0
                pol = half if x > 0 else (-1.0) ** n * half
                dP[n, 1] = pol
                mPs[n, 1] = pol * sign
        return P, dP, mPs
    for m in range(nmax + 1):
        col = specfun.legendre_pnm_all(nmax, m, x)
        for n in range(m, nmax + 1):
            P[n, m] = col[n - m]
    for m in range(nmax + 1):
        for n in range(max(m, 1), nmax + 1):
            pn1 = P[n - 1, m] if n - 1 >= m else 0.0
            dP[n, m] = (n * x * P[n, m] - (n + m) * pn1) / s
            mPs[n, m] = m * P[n, m] / s
    return P, dP, mPs


def _vector_waves(n: int, m: int, rho: complex, zn: complex, dzn: complex,
                  P: np.ndarray, dP: np.ndarray, mPs: np.ndarray,
                  phi: float, rhat: np.ndarray, that: np.ndarray, phat: np.ndarray,
                  ) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Cartesian M/N vector wave functions (even and odd) of one (n, m)."""
    cm, sm = math.cos(m * phi), math.sin(m * phi)
    m_even = -mPs[n, m] * sm * zn * that - dP[n, m] * cm * zn * phat
    m_odd = mPs[n, m] * cm * zn * that - dP[n, m] * sm * zn * phat
    radial = n * (n + 1) / rho * zn * P[n, m]
    n_even = radial * cm * rhat + dzn * (dP[n, m] * cm * that - mPs[n, m] * sm * phat)
    n_odd = radial * sm * rhat + dzn * (dP[n, m] * sm * that + mPs[n, m] * cm * phat)
    return m_even, m_odd, n_even, n_odd


def scattering_green_general(cfg: SceneConfig, r_vec, r_prime_vec, omega: float,
                             trunc: TruncationPolicy = TruncationPolicy()) -> np.ndarray:
    """Full 3x3 scattering dyad from the outgoing vector-wave expansion.

    Both points must lie outside all matter.  On-axis z-oriented configurations
    reduce to :func:`scattering_green_zz`; for a source reflected through the
    origin the zz element equals minus the ``antipodal`` series value, which is
    the sign convention the collective-rate pipeline folds into its
    antiparallel-dipole product.
    """
    r_vec = np.asarray(r_vec, dtype=float)
    r_prime_vec = np.asarray(r_prime_vec, dtype=float)
    r, theta, phi, rhat, that, phat = _spherical_frame(r_vec)
    rp, thetap, phip, rphat, tphat, pphat = _spherical_frame(r_prime_vec)
    _check_exterior(cfg, r, rp)
    if not omega > 0:
        raise InvalidArgumentError(f"omega must be > 0, got {omega}")
    if cfg.scenario == "free_space":
        return np.zeros((3, 3), dtype=complex)

    k = omega
    base = wiscombe_order(k * max(r, rp))
    nmax = trunc.n_max
    ladder = _SceneLadder(cfg, omega)

    table_n = base
    coeffs = ladder.upto(table_n)
    h_r = specfun.spherical_hn1_all(table_n, k * r)
    dh_r = specfun.riccati_derivative_all(table_n, k * r, "hankel1")
    h_rp = specfun.spherical_hn1_all(table_n, k * rp)
    dh_rp = specfun.riccati_derivative_all(table_n, k * rp, "hankel1")
    P1, dP1, mPs1 = _angular_tables(table_n, theta)
    P2, dP2, mPs2 = _angular_tables(table_n, thetap)

    total = np.zeros((3, 3), dtype=complex)
    small_streak = 0
    n = 1
    while n <= nmax:
        if n > table_n:
            table_n = min(max(2 * table_n, n), nmax)
            coeffs = ladder.upto(table_n)
            h_r = specfun.spherical_hn1_all(table_n, k * r)
            dh_r = specfun.riccati_derivative_all(table_n, k * r, "hankel1")
            h_rp = specfun.spherical_hn1_all(table_n, k * rp)
            dh_rp = specfun.riccati_derivative_all(table_n, k * rp, "hankel1")
            P1, dP1, mPs1 = _angular_tables(table_n, theta)
            P2, dP2, mPs2 = _angular_tables(table_n, thetap)
        inc = np.zeros((3, 3), dtype=complex)
        bm, bn = coeffs[n].bm, coeffs[n].bn
        for m in range(0, n + 1):
            norm = (2.0 - (1.0 if m == 0 else 0.0)) * (2 * n + 1) / (n * (n + 1)) \
                * math.exp(math.lgamma(n - m + 1) - math.lgamma(n + m + 1))
            me1, mo1, ne1, no1 = _vector_waves(
                n, m, k * r, h_r[n], dh_r[n], P1, dP1, mPs1, phi, rhat, that, phat)
            me2, mo2, ne2, no2 = _vector_waves(
                n, m, k * rp, h_rp[n], dh_rp[n], P2, dP2, mPs2, phip, rphat, tphat, pphat)
            inc += norm * (bm * (np.outer(me1, me2) + np.outer(mo1, mo2))
                           + bn * (np.outer(ne1, ne2) + np.outer(no1, no2)))
        inc *= 1j * k / (4.0 * math.pi)
        total += inc
        scale = max(float(np.abs(total).max()), 1e-280)
        if n >= base and float(np.abs(inc).max()) < trunc.tol * scale:
            small_streak += 1
            if small_streak >= trunc.consecutive:
                break
        else:
            small_streak = 0
        n += 1
    else:
        raise TruncationError(
            f"dyadic series not converged within n_max={nmax}",
            n_max=nmax, tail_estimate=float(np.abs(inc).max()))
    return total
