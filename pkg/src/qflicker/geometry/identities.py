"""Numerical checks of the momentum-space Fourier identities behind the g-factor.

The scalar identity  int d^3p/(2pi)^3 e^{ipx} 4pi/p^2 = 1/|x|  reduces, after
the angular integrals and a regulator e^{-eps p}, to a one-dimensional
oscillatory integral with the closed form (2/(pi r)) arctan(r/eps).  The
vector identity is the gradient of the scalar one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import InputError
from ..quadrature import adaptive_quad
from ..special import alternating_limit, halfperiod_areas

_MAX_HALFPERIODS = 200_000
_TAIL_TERMS = 48
_FD_STEP = 1e-4  # relative central-difference step


@dataclass(frozen=True)
class IdentityCheck:
    numeric: float
    exact: float

    @property
    def difference(self) -> float:
        return self.numeric - self.exact

    @property
    def relative_error(self) -> float:
        return abs(self.difference) / abs(self.exact) if self.exact else abs(self.difference)


@dataclass(frozen=True)
class VectorIdentityCheck:
    numeric: np.ndarray
    exact: np.ndarray

    @property
    def difference(self) -> np.ndarray:
        return self.numeric - self.exact

    @property
    def magnitude(self) -> float:
        return float(np.linalg.norm(self.numeric))

    @property
    def relative_error(self) -> float:
        ref = float(np.linalg.norm(self.exact))
        err = float(np.linalg.norm(self.difference))
        return err / ref if ref else err


def _damped_dirichlet(a: float) -> float:
    """int_0^inf sin(u)/u e^{-a u} du by half-period quadrature, a >= 0."""

    def g(u):
        return np.exp(-a * u) / u

    if a * math.pi > 1.0:
        # decay length shorter than a half-period: integrate out to e^-40 directly
        def damped_sinc(u):
            return np.sinc(u / math.pi) * np.exp(-a * u)

        return adaptive_quad(damped_sinc, 0.0, 40.0 / a, rtol=1e-14, atol=1e-300).value

    # beyond K half-periods the damping factor is below 1e-17
    k_damped = math.ceil(40.0 / (a * math.pi)) if a > 0 else _MAX_HALFPERIODS + 1
    if k_damped <= _MAX_HALFPERIODS:
        return math.fsum(halfperiod_areas(g, 0, k_damped))
    head = math.fsum(halfperiod_areas(g, 0, _MAX_HALFPERIODS))
    tail = halfperiod_areas(g, _MAX_HALFPERIODS, _MAX_HALFPERIODS + _TAIL_TERMS)
    return head + alternating_limit(tail)


def _scalar_numeric(r: float, eps: float) -> float:
    return 2.0 / (math.pi * r) * _damped_dirichlet(eps / r)


def _scalar_exact(r: float, eps: float) -> float:
    return 2.0 / (math.pi * r) * math.atan2(r, eps)


def fourier_identity_scalar(r: float, eps: float) -> IdentityCheck:
    """Regularised 1/r identity; ``eps = inf`` gives the fully damped (0, 0)."""
    r = float(r)
    eps = float(eps)
    if not (math.isfinite(r) and r > 0):
        raise InputError(f"r must be positive and finite, got {r}")
    if math.isnan(eps) or eps <= 0:
        raise InputError(f"regulator eps must be positive, got {eps}")
    if math.isinf(eps):
        return IdentityCheck(0.0, 0.0)
    return IdentityCheck(_scalar_numeric(r, eps), _scalar_exact(r, eps))


def fourier_identity_vector(r_vec, eps: float = 0.0) -> VectorIdentityCheck:
    """x/|x|^3 identity as minus the gradient of the regularised scalar.

    ``eps = 0`` is the unregularised limit.  The numeric value uses central
    differences of the quadrature result; the exact value differentiates the
    arctan closed form, which tends to r_vec/|r_vec|^3 as eps -> 0.
    """
    r_vec = np.asarray(r_vec, dtype=float).reshape(-1)
    if r_vec.shape != (3,) or not np.all(np.isfinite(r_vec)):
        raise InputError("r_vec must be a finite 3-vector")
    eps = float(eps)
    if math.isnan(eps) or eps < 0:
        raise InputError(f"regulator eps must be non-negative, got {eps}")
    r = float(np.linalg.norm(r_vec))
    if r == 0:
        raise InputError("r_vec must be nonzero")
    if math.isinf(eps):
        zero = np.zeros(3)
        return VectorIdentityCheck(zero, zero)

    h = _FD_STEP * r
    if h == 0 or r + h == r or not np.isfinite(1.0 / h):
        raise InputError(f"finite-difference step underflows for |r_vec| = {r}")

    numeric = np.zeros(3)
    for i in range(3):
        step = np.zeros(3)
        step[i] = h
        up = _scalar_numeric(float(np.linalg.norm(r_vec + step)), eps)
        down = _scalar_numeric(float(np.linalg.norm(r_vec - step)), eps)
        numeric[i] = -(up - down) / (2.0 * h)

    # -d/dr [(2/(pi r)) atan(r/eps)]
    radial = 2.0 / math.pi * (math.atan2(r, eps) / r**2 - eps / (r * (eps**2 + r**2)))
    exact = radial * r_vec / r
    return VectorIdentityCheck(numeric, exact)
