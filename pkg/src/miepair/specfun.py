"""Spherical Bessel/Hankel functions of complex argument and associated Legendre functions.

These are the radial and angular ingredients of every multipole expansion in the
package.  Conventions:

* ``riccati_derivative`` returns (1/rho) d[rho z_n(rho)]/d rho, the combination that
  enters tangential-field continuity at spherical interfaces.
* Associated Legendre functions carry no Condon-Shortley phase, matching the
  real (cos m phi / sin m phi) harmonic convention used by the vector wave
  functions in :mod:`miepair.scatter`.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError, SingularArgumentError

# Rescaling threshold for the downward recurrence; keeps unnormalized iterates
# inside the float64 range without touching their ratios.
_RESCALE = 1e250


@dataclass(frozen=True)
class RadialFunctions:
    """Bundle of j_n, h_n^(1) and their Riccati derivative combinations at one argument."""

    order: int
    argument: complex
    jn: complex
    hn1: complex
    d_jn: complex
    d_hn1: complex


def _check_rho(rho: complex) -> complex:
    rho = complex(rho)
    if not (math.isfinite(rho.real) and math.isfinite(rho.imag)):
        raise InvalidArgumentError(f"argument must be finite, got {rho!r}")
    return rho


def _check_order(n: int) -> int:
    if n < 0:
        raise InvalidArgumentError(f"order must be >= 0, got {n}")
    return int(n)


def spherical_jn_all(nmax: int, rho: complex) -> np.ndarray:
    """j_0(rho) .. j_nmax(rho) by downward (Miller) recurrence.

    Downward recursion is the stable direction for j_n; the unnormalized
    sequence is pinned afterwards against the closed forms for j_0/j_1,
    whichever is larger in magnitude (j_0 alone can sit on a zero).
    """
    nmax = _check_order(nmax)
    rho = _check_rho(rho)
    if rho == 0:
        out = np.zeros(nmax + 1, dtype=complex)
        out[0] = 1.0
        return out

    a = abs(rho)
    start = max(nmax, int(a)) + 30 + int(2.0 * math.sqrt(a))
    vals = np.zeros(nmax + 1, dtype=complex)
    jp = 0.0 + 0.0j
    j = 1e-30 + 0.0j
    for k in range(start, 0, -1):
        jm = (2 * k + 1) / rho * j - jp
        jp = j
        j = jm
        if k - 1 <= nmax:
            vals[k - 1] = j
        if abs(j.real) > _RESCALE or abs(j.imag) > _RESCALE:
            j *= 1.0 / _RESCALE
            jp *= 1.0 / _RESCALE
            vals *= 1.0 / _RESCALE

    j0 = cmath.sin(rho) / rho
    j1 = cmath.sin(rho) / rho**2 - cmath.cos(rho) / rho
    if nmax >= 1 and abs(j1) > abs(j0):
        scale = j1 / vals[1]
    else:
        scale = j0 / vals[0]
    vals *= scale
    if nmax >= 0:
        vals[0] = j0
    if nmax >= 1:
        vals[1] = j1
    return vals


def spherical_jn(n: int, rho: complex) -> complex:
    """Spherical Bessel function j_n(rho) for complex rho; j_n(0) is the analytic limit."""
    n = _check_order(n)
    rho = _check_rho(rho)
    if rho == 0:
        return 1.0 + 0.0j if n == 0 else 0.0 + 0.0j
    return complex(spherical_jn_all(n, rho)[n])


def spherical_hn1_all(nmax: int, rho: complex) -> np.ndarray:
    """h_0^(1)(rho) .. h_nmax^(1)(rho) by upward recurrence (stable for Hankel)."""
    nmax = _check_order(nmax)
    rho = _check_rho(rho)
    if rho == 0:
        raise SingularArgumentError("h_n^(1) is singular at rho = 0")
    h = np.zeros(nmax + 1, dtype=complex)
    e = cmath.exp(1j * rho)
    h[0] = -1j * e / rho
    if nmax >= 1:
        h[1] = -e * (rho + 1j) / rho**2
    # Values overflow to inf once (2n-1)!!/|rho|^(n+1) leaves the float64 range.
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(2, nmax + 1):
            h[k] = (2 * k - 1) / rho * h[k - 1] - h[k - 2]
    return h


def spherical_hn1(n: int, rho: complex) -> complex:
    """Spherical Hankel function of the first kind h_n^(1)(rho)."""
    n = _check_order(n)
    rho = _check_rho(rho)
    if rho == 0:
        raise SingularArgumentError("h_n^(1) is singular at rho = 0")
    return complex(spherical_hn1_all(n, rho)[n])


def _riccati_from_table(zvals: np.ndarray, rho: complex) -> np.ndarray:
    """(1/rho) d[rho z_n]/d rho for the whole table, via D_n = z_{n-1} - n z_n / rho."""
    n = np.arange(len(zvals))
    out = np.empty_like(zvals)
    # n = 0 handled by callers from the closed form.
    out[1:] = zvals[:-1] - n[1:] * zvals[1:] / rho
    out[0] = 0.0
    return out


def riccati_derivative(n: int, rho: complex, kind: str = "bessel") -> complex:
    """(1/rho) d[rho z_n(rho)]/d rho with z = j_n ("bessel") or h_n^(1) ("hankel1")."""
    n = _check_order(n)
    rho = _check_rho(rho)
    if rho == 0:
        raise SingularArgumentError("Riccati derivative is singular at rho = 0")
    if kind == "bessel":
        if n == 0:
            return complex(cmath.cos(rho) / rho)
        table = spherical_jn_all(n, rho)
    elif kind == "hankel1":
        if n == 0:
            return complex(cmath.exp(1j * rho) / rho)
        table = spherical_hn1_all(n, rho)
    else:
        raise InvalidArgumentError(f"kind must be 'bessel' or 'hankel1', got {kind!r}")
    return complex(table[n - 1] - n * table[n] / rho)


def riccati_derivative_all(nmax: int, rho: complex, kind: str = "bessel") -> np.ndarray:
    """Vector version of :func:`riccati_derivative` for orders 0..nmax."""
    nmax = _check_order(nmax)
    rho = _check_rho(rho)
    if rho == 0:
        raise SingularArgumentError("Riccati derivative is singular at rho = 0")
    if kind == "bessel":
        table = spherical_jn_all(nmax, rho)
        out = _riccati_from_table(table, rho)
        out[0] = cmath.cos(rho) / rho
    elif kind == "hankel1":
        table = spherical_hn1_all(nmax, rho)
        out = _riccati_from_table(table, rho)
        out[0] = cmath.exp(1j * rho) / rho
    else:
        raise InvalidArgumentError(f"kind must be 'bessel' or 'hankel1', got {kind!r}")
    return out


def radial_functions(n: int, rho: complex) -> RadialFunctions:
    """All four radial ingredients (j, h1 and their Riccati derivatives) at one point."""
    return RadialFunctions(
        order=_check_order(n),
        argument=_check_rho(rho),
        jn=spherical_jn(n, rho),
        hn1=spherical_hn1(n, rho),
        d_jn=riccati_derivative(n, rho, "bessel"),
        d_hn1=riccati_derivative(n, rho, "hankel1"),
    )


# ---------------------------------------------------------------------------
# Associated Legendre functions, no Condon-Shortley phase.
# ---------------------------------------------------------------------------


def _check_legendre_orders(n: int, m: int) -> None:
    if n < 0 or m < 0 or m > n:
        raise InvalidArgumentError(f"need 0 <= m <= n, got n={n}, m={m}")


def legendre_pnm_all(nmax: int, m: int, x: float) -> np.ndarray:
    """P_m^m(x) .. P_nmax^m(x) by upward recurrence in n at fixed m.

    Index i of the result holds P_{m+i}^m; prepend zeros for n < m when a
    dense-in-n table is needed.
    """
    if nmax < m:
        raise InvalidArgumentError(f"need nmax >= m, got nmax={nmax}, m={m}")
    if not -1.0 <= x <= 1.0:
        raise InvalidArgumentError(f"need x in [-1, 1], got {x}")
    s = math.sqrt(max(0.0, 1.0 - x * x))
    # P_m^m = (2m-1)!! s^m, positive by convention (no Condon-Shortley phase).
    pmm = 1.0
    for k in range(1, m + 1):
        pmm *= (2 * k - 1) * s
    out = np.empty(nmax - m + 1)
    out[0] = pmm
    if nmax == m:
        return out
    out[1] = (2 * m + 1) * x * pmm
    for n in range(m + 2, nmax + 1):
        i = n - m
        out[i] = ((2 * n - 1) * x * out[i - 1] - (n + m - 1) * out[i - 2]) / (n - m)
    return out


def legendre_pnm(n: int, m: int, x: float) -> float:
    """Associated Legendre P_n^m(x) without the Condon-Shortley phase."""
    _check_legendre_orders(n, m)
    return float(legendre_pnm_all(n, m, x)[n - m])


def legendre_dtheta(n: int, m: int, theta: float) -> float:
    """d P_n^m(cos theta) / d theta, with analytic limits at theta = 0, pi."""
    _check_legendre_orders(n, m)
    x = math.cos(theta)
    s = math.sin(theta)
    if abs(s) < 1e-12:
        if m == 1:
            half = n * (n + 1) / 2.0
            return half if x > 0 else (-1.0) ** n * half
        return 0.0
    if n == 0:
        return 0.0
    table = legendre_pnm_all(n, m, x)
    pn = table[n - m]
    pn1 = table[n - 1 - m] if n - 1 >= m else 0.0
    return (n * x * pn - (n + m) * pn1) / s


def legendre_pnm_over_sin(n: int, m: int, theta: float) -> float:
    """m P_n^m(cos theta) / sin theta, with analytic limits at theta = 0, pi."""
    _check_legendre_orders(n, m)
    s = math.sin(theta)
    if abs(s) < 1e-12:
        if m == 1:
            half = n * (n + 1) / 2.0
            return half if math.cos(theta) > 0 else (-1.0) ** (n + 1) * half
        return 0.0
    if m == 0:
        return 0.0
    return m * legendre_pnm(n, m, math.cos(theta)) / s
