"""Sine integral and half-period quadrature for sine-weighted integrals.

Integrals of the form  int sin(u) g(u) du  over long ranges are split at the
zeros of sin(u) into half-periods [k pi, (k+1) pi].  For monotone g each
half-period contributes a term of alternating sign, so partial sums can be
accelerated by repeated averaging and bounded by the first omitted term.
"""

from __future__ import annotations

import math

import numpy as np

from .quadrature import gauss_legendre

_HP_NODES = 16
_HP_CHUNK = 65536


def sine_integral(x):
    """Si(x) = int_0^x sin(t)/t dt, vectorised.

    Power series for |x| < 6; beyond that the continued fraction for the
    complex exponential integral E1(ix), evaluated with the modified Lentz
    method, which holds full double precision at the switchover.
    """
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    ax = np.abs(x)
    small = ax < 6.0
    if np.any(small):
        out[small] = _si_series(ax[small])
    if np.any(~small):
        out[~small] = np.array([_si_cf(v) for v in ax[~small]])
    out = np.sign(x) * out
    return out if out.ndim else float(out)


def _si_series(x: np.ndarray) -> np.ndarray:
    # sum_k (-1)^k x^(2k+1) / ((2k+1) (2k+1)!)
    term = x.copy()
    total = x.copy()
    x2 = x * x
    for k in range(1, 60):
        term = -term * x2 / ((2 * k) * (2 * k + 1))
        add = term / (2 * k + 1)
        total += add
        if np.all(np.abs(add) <= 1e-17 * np.abs(total)):
            break
    return total


def _si_cf(x: float) -> float:
    # E1(ix) = e^{-ix} * 1/(1+ix - 1/(3+ix - 4/(5+ix - ...)))
    tiny = 1e-300
    b = complex(1.0, x)
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(2, 10_000):
        a = -float((i - 1) ** 2)
        b += 2.0
        d = 1.0 / (a * d + b)
        c = b + a / c
        delta = c * d
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    h *= complex(math.cos(x), -math.sin(x))
    return math.pi / 2 + h.imag


def halfperiod_areas(g, k_start: int, k_stop: int) -> np.ndarray:
    """int_{k pi}^{(k+1) pi} sin(u) g(u) du for k in [k_start, k_stop).

    ``g`` must be smooth on each half-period (no singularity at k pi).
    """
    x, w = gauss_legendre(_HP_NODES)
    out = np.empty(max(k_stop - k_start, 0))
    for c0 in range(k_start, k_stop, _HP_CHUNK):
        c1 = min(c0 + _HP_CHUNK, k_stop)
        k = np.arange(c0, c1, dtype=float)[:, None]
        u = (k + x[None, :]) * math.pi
        out[c0 - k_start : c1 - k_start] = math.pi * np.sum(w * np.sin(u) * g(u), axis=1)
    return out


def segment_integral(g, a: float, b: float) -> float:
    """int_a^b sin(u) g(u) du for a segment shorter than a half-period."""
    if b <= a:
        return 0.0
    x, w = gauss_legendre(_HP_NODES)
    u = a + (b - a) * x
    return float((b - a) * np.sum(w * np.sin(u) * g(u)))


def alternating_limit(terms: np.ndarray) -> float:
    """Sum of an alternating series with smoothly decreasing magnitudes.

    Partial sums are averaged pairwise until one value is left (Euler's
    transform in its repeated-averaging form).
    """
    s = np.cumsum(np.asarray(terms, dtype=float))
    while s.size > 1:
        s = 0.5 * (s[:-1] + s[1:])
    return float(s[0])


# -- sin(u) u^-gamma on [0, U] -------------------------------------------------

_ACCEL_TERMS = 64
_DIRECT_LIMIT = 200_000  # half-periods summed directly before switching to the tail form


def sin_power_head(gamma: float, U: float) -> float:
    """int_0^U sin(u) u^-gamma du for 0 <= U <= pi, by termwise integration.

    Uses sin u = sum (-1)^k u^(2k+1)/(2k+1)!, which is integrable at u = 0
    for gamma < 2 and converges quickly on the first half-period.
    """
    if U <= 0:
        return 0.0
    u2 = U * U
    term = U ** (2.0 - gamma)  # U^(2k+2-gamma) / (2k+1)! at k = 0
    total = term / (2.0 - gamma)
    for k in range(1, 60):
        term *= -u2 / ((2 * k) * (2 * k + 1))
        add = term / (2 * k + 2 - gamma)
        total += add
        if abs(add) <= 1e-17 * abs(total):
            break
    return total


def sin_power_halfperiods(gamma: float, k_start: int, k_stop: int) -> np.ndarray:
    """Areas of sin(u) u^-gamma over half-periods k in [k_start, k_stop), k_start >= 1."""
    return halfperiod_areas(lambda u: u ** (-gamma), k_start, k_stop)


def sin_power_tail(gamma: float, U: float) -> float:
    """int_U^inf sin(u) u^-gamma du for U >= pi, by acceleration of the remaining half-periods."""
    k = int(U // math.pi)
    partial = segment_integral(lambda u: u ** (-gamma), U, (k + 1) * math.pi)
    return partial + alternating_limit(sin_power_halfperiods(gamma, k + 1, k + 1 + _ACCEL_TERMS))


def sin_power_limit(gamma: float) -> float:
    """int_0^inf sin(u) u^-gamma du (0 < gamma < 2), computed numerically."""
    return sin_power_head(gamma, math.pi) + alternating_limit(
        sin_power_halfperiods(gamma, 1, 1 + _ACCEL_TERMS)
    )


def sin_power_integral(gamma: float, U: float) -> float:
    """int_0^U sin(u) u^-gamma du for U >= 0 and 0 < gamma < 2."""
    if U <= math.pi:
        return sin_power_head(gamma, U)
    k = int(U // math.pi)
    if k > _DIRECT_LIMIT:
        return sin_power_limit(gamma) - sin_power_tail(gamma, U)
    body = math.fsum(sin_power_halfperiods(gamma, 1, k))
    last = segment_integral(lambda u: u ** (-gamma), k * math.pi, U)
    return sin_power_head(gamma, math.pi) + body + last


def halfperiod_bound(gamma: float, U: float) -> float:
    """|area| of the half-period containing U; bounds int_U^V for any V > U."""
    k = int(U // math.pi)
    if k == 0:
        return abs(sin_power_head(gamma, math.pi))
    return abs(float(sin_power_halfperiods(gamma, k, k + 1)[0]))
