"""Fourier analysis of odd spectra: the sign(tau) correlation, total-power convergence, parity.

A 1/f^gamma spectrum continued to negative frequencies as an odd function
has a finite Fourier transform at both ends of the band for 0 < gamma < 2,
even though the even continuation diverges.  The oscillatory integrals are
evaluated between consecutive zeros of the sine with alternating-series
acceleration (see :mod:`qflicker.special`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .special import halfperiod_bound, sin_power_integral, sin_power_limit

ODD_DIVERGENCE_NOTE = "odd continuation does not converge outside 0 < gamma < 2"


def _check_gamma(gamma: float) -> float:
    gamma = float(gamma)
    if not 0.0 < gamma < 2.0:
        raise InputError(f"gamma = {gamma}: {ODD_DIVERGENCE_NOTE}")
    return gamma


@dataclass(frozen=True)
class OddSpectrum:
    """A |f|^-gamma spectrum of amplitude A continued as an odd function of f."""

    A: float
    gamma: float = 1.0

    def __post_init__(self):
        if not (np.isfinite(self.A) and self.A >= 0):
            raise InputError(f"amplitude must be non-negative, got {self.A}")
        _check_gamma(self.gamma)

    def __call__(self, f):
        f = np.asarray(f, dtype=float)
        if np.any(f == 0):
            raise InputError("odd spectrum is singular at f = 0")
        return self.A * np.sign(f) * np.abs(f) ** (-self.gamma)


@dataclass(frozen=True, eq=False)
class SpectrumSeries:
    freq: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        f = np.asarray(self.freq, dtype=float).reshape(-1)
        v = np.asarray(self.values, dtype=complex).reshape(-1)
        if f.shape != v.shape:
            raise InputError("frequency grid and values differ in length")
        if f.size and not np.all(np.diff(f) > 0):
            raise InputError("frequency grid must be strictly increasing")
        object.__setattr__(self, "freq", f)
        object.__setattr__(self, "values", v)


def correlation_from_odd_psd(A: float, tau: float, F: float = math.inf) -> float:
    """Correlation at lag ``tau`` of the odd spectrum -i A / omega limited to |f| < F.

    Finite band: (A/pi) sign(tau) Si(2 pi F |tau|); unlimited band:
    sign(tau) A/2.  The value at tau = 0 is 0.
    """
    if not np.isfinite(A):
        raise InputError(f"amplitude must be finite, got {A}")
    if math.isnan(F) or F <= 0:
        raise InputError(f"band limit must be positive or inf, got {F}")
    if math.isnan(tau):
        raise InputError("tau must be a number")
    if tau == 0:
        return 0.0
    s = math.copysign(1.0, tau)
    if math.isinf(F):
        return s * A / 2.0
    U = 2.0 * math.pi * F * abs(tau)
    return s * A / math.pi * sin_power_integral(1.0, U)


@dataclass(frozen=True)
class ConvergenceReport:
    gamma: float
    tau: float
    F: np.ndarray  # band limits, Hz
    partials: np.ndarray  # I(F) = int_0^F sin(2 pi f tau) f^-gamma df
    tail_bounds: np.ndarray  # bound on |I(G) - I(F)| for every G > F
    limit: float
    verdict: str
    even_low: np.ndarray  # int_{1/F}^{1} f^-gamma df
    even_high: np.ndarray  # int_{1}^{F} f^-gamma df
    even_verdict: str

    @property
    def differences(self) -> np.ndarray:
        return np.diff(self.partials)

    @property
    def bounds_hold(self) -> bool:
        return bool(np.all(np.abs(self.differences) <= self.tail_bounds[:-1] * (1 + 1e-9)))


def _even_growth(gamma: float, F: np.ndarray):
    if gamma == 1.0:
        low = np.log(F)
        high = np.log(F)
        verdict = "logarithmic growth at both ends"
    else:
        low = (F ** (gamma - 1.0) - 1.0) / (gamma - 1.0)
        high = (F ** (1.0 - gamma) - 1.0) / (1.0 - gamma)
        if gamma > 1.0:
            verdict = f"diverges at the low end as F^{gamma - 1:g}"
        else:
            verdict = f"diverges at the high end as F^{1 - gamma:g}"
    return low, high, verdict


def total_power_convergence(
    gamma: float, tau: float, F_sequence, tol: float = 1e-3
) -> ConvergenceReport:
    """Partial integrals of sin(2 pi f tau) f^-gamma up to each band limit.

    The verdict is "convergent" when the remaining tail beyond the last band
    limit is bounded below ``tol`` relative to the limit.  The companion
    even-continuation diagnostic int_{1/F}^F f^-gamma df is reported split
    into its low-end and high-end parts.
    """
    gamma = _check_gamma(gamma)
    if math.isnan(tau) or tau == 0:
        raise InputError("tau must be nonzero")
    F = np.asarray(F_sequence, dtype=float).reshape(-1)
    if F.size == 0 or np.any(F <= 0) or not np.all(np.isfinite(F)):
        raise InputError("band limits must be positive and finite")
    if not np.all(np.diff(F) > 0):
        raise InputError("band limits must be strictly increasing")

    s = math.copysign(1.0, tau)
    k = 2.0 * math.pi * abs(tau)
    scale = s * k ** (gamma - 1.0)  # f = u / k
    U = k * F
    partials = np.array([scale * sin_power_integral(gamma, u) for u in U])
    bounds = np.array([abs(scale) * halfperiod_bound(gamma, u) for u in U])
    limit = scale * sin_power_limit(gamma)

    converged = bounds[-1] <= tol * abs(limit)
    verdict = "convergent" if converged else "not yet converged"
    low, high, even_verdict = _even_growth(gamma, F)
    return ConvergenceReport(gamma, tau, F, partials, bounds, limit, verdict, low, high, even_verdict)


@dataclass(frozen=True, eq=False)
class ParityDecomposition:
    freq: np.ndarray  # positive half of the grid
    even: np.ndarray  # Re{(S(w) + S(-w))/2}
    odd: np.ndarray  # Im{(S(w) - S(-w))/2}
    residual: np.ndarray  # full grid: S - even - i odd

    def reconstruct(self) -> np.ndarray:
        """The input samples on the full grid."""
        model = np.concatenate([self.even[::-1], self.even]) + 1j * np.concatenate(
            [-self.odd[::-1], self.odd]
        )
        return model + self.residual


def psd_parity_decompose(series: SpectrumSeries, rtol: float = 1e-12) -> ParityDecomposition:
    """Split a spectrum on a grid symmetric about 0 into real-even and imaginary-odd parts."""
    f = series.freq
    n = f.size
    if n == 0 or n % 2 or np.any(f == 0):
        raise InputError("parity decomposition needs a symmetric grid excluding 0")
    neg, pos = f[: n // 2], f[n // 2 :]
    if not np.allclose(-neg[::-1], pos, rtol=rtol, atol=0):
        raise InputError("frequency grid is not symmetric about 0")
    S_pos = series.values[n // 2 :]
    S_neg = series.values[: n // 2][::-1]
    even = ((S_pos + S_neg) / 2).real
    odd = ((S_pos - S_neg) / 2).imag
    model = np.concatenate([even[::-1], even]) + 1j * np.concatenate([-odd[::-1], odd])
    return ParityDecomposition(pos, even, odd, series.values - model)
