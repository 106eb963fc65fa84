"""Carrier mobility from the supported material descriptions.

Numbers are CGS-Gaussian unless they arrive as :class:`Quantity`: mobility
in cm^2/(statV s), conductivity in 1/s, density in 1/cm^3.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .errors import ClampWarning, InputError
from .geometry.regions import Box
from .quantities import (
    CGS,
    CHARGE,
    CODATA,
    CONDUCTIVITY,
    DENSITY,
    LENGTH,
    MASS,
    MOBILITY,
    RESISTANCE,
    TEMPERATURE,
    Quantity,
    as_cgs,
    convert,
)

MIN_LAW_TEMPERATURE = 50.0  # K; below this the 1/T law is not extrapolated


def mobility_from_conductivity(sigma, n, e=None, system: str = CGS) -> Quantity:
    """mu = sigma / (e n)."""
    sigma = as_cgs(sigma, CONDUCTIVITY, "sigma")
    n = as_cgs(n, DENSITY, "n")
    e = CODATA.e if e is None else as_cgs(e, CHARGE, "e")
    if sigma < 0:
        raise InputError(f"conductivity must be non-negative, got {sigma}")
    if not n > 0:
        raise InputError(f"carrier density must be positive, got {n}")
    return convert(Quantity(sigma / (e * n), MOBILITY), system)


def sigma_from_resistance(R, box: Box, system: str = CGS) -> Quantity:
    """Conductivity of a bar measured end to end: l / (R w h)."""
    R = as_cgs(R, RESISTANCE, "R")
    if not R > 0:
        raise InputError(f"resistance must be positive, got {R}")
    if not isinstance(box, Box):
        raise InputError("sigma_from_resistance needs a Box")
    return convert(Quantity(box.l / (R * box.w * box.h), CONDUCTIVITY), system)


# -- mobility specifications ---------------------------------------------------


@dataclass(frozen=True)
class ScalarMobility:
    mu: float

    def __post_init__(self):
        mu = as_cgs(self.mu, MOBILITY, "mu")
        if not (math.isfinite(mu) and mu >= 0):
            raise InputError(f"mobility must be non-negative, got {mu}")
        object.__setattr__(self, "mu", float(mu))


@dataclass(frozen=True, eq=False)
class TensorMobility:
    """Symmetric mobility tensor projected on the field direction."""

    mu: np.ndarray
    direction: np.ndarray

    def __post_init__(self):
        mu = self.mu
        if isinstance(mu, Quantity):
            mu = np.asarray(as_cgs(mu, MOBILITY, "mu"))
        mu = np.asarray(mu, dtype=float)
        n = np.asarray(self.direction, dtype=float).reshape(-1)
        if mu.shape != (3, 3) or not np.all(np.isfinite(mu)):
            raise InputError("mobility tensor must be a finite 3x3 array")
        scale = float(np.max(np.abs(mu))) or 1.0
        if not np.allclose(mu, mu.T, rtol=0, atol=1e-12 * scale):
            raise InputError("mobility tensor must be symmetric")
        if np.min(np.linalg.eigvalsh(mu)) < -1e-12 * scale:
            raise InputError("mobility tensor has a negative eigenvalue")
        if n.shape != (3,) or abs(np.linalg.norm(n) - 1.0) > 1e-9:
            raise InputError(f"field direction must be a unit 3-vector, got {n.tolist()}")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "direction", n)


@dataclass(frozen=True)
class FromConductivity:
    """Mobility derived from the material's conductivity and carrier density."""


@dataclass(frozen=True)
class BulkMetal1OverT:
    """mu(T) = mu_ref * T_ref / T, the bulk-metal phonon-limited law."""

    mu_ref: float
    T_ref: float

    def __post_init__(self):
        mu = as_cgs(self.mu_ref, MOBILITY, "mu_ref")
        T = as_cgs(self.T_ref, TEMPERATURE, "T_ref")
        if not mu >= 0:
            raise InputError(f"reference mobility must be non-negative, got {mu}")
        if not T > 0:
            raise InputError(f"reference temperature must be positive, got {T}")
        object.__setattr__(self, "mu_ref", float(mu))
        object.__setattr__(self, "T_ref", float(T))


MobilitySpec = Union[ScalarMobility, TensorMobility, FromConductivity, BulkMetal1OverT]


@dataclass(frozen=True)
class Material:
    n: float
    m: float
    d: float
    sigma: Optional[float] = None
    mobility: Optional[MobilitySpec] = None
    e: float = field(default=CODATA.e)

    def __post_init__(self):
        for name, dim in (("n", DENSITY), ("m", MASS), ("d", LENGTH), ("e", CHARGE)):
            v = as_cgs(getattr(self, name), dim, name)
            if not (math.isfinite(v) and v > 0):
                raise InputError(f"material {name} must be positive, got {v}")
            object.__setattr__(self, name, float(v))
        if self.sigma is not None:
            s = as_cgs(self.sigma, CONDUCTIVITY, "sigma")
            if not s >= 0:
                raise InputError(f"conductivity must be non-negative, got {s}")
            object.__setattr__(self, "sigma", float(s))
        if self.sigma is None and self.mobility is None:
            raise InputError("material needs a conductivity or a mobility specification")
        if isinstance(self.mobility, FromConductivity) and self.sigma is None:
            raise InputError("FromConductivity mobility requires the material conductivity")

    @property
    def mobility_spec(self) -> MobilitySpec:
        return self.mobility if self.mobility is not None else FromConductivity()


def _law_temperature(spec: BulkMetal1OverT, T: float) -> float:
    if T < MIN_LAW_TEMPERATURE:
        warnings.warn(
            f"1/T mobility law not extrapolated below {MIN_LAW_TEMPERATURE:g} K; "
            f"using the {MIN_LAW_TEMPERATURE:g} K value for T = {T:g} K",
            ClampWarning,
            stacklevel=3,
        )
        return MIN_LAW_TEMPERATURE
    return T


def _mobility(spec: MobilitySpec, T: float, material: Optional[Material]) -> float:
    if isinstance(spec, ScalarMobility):
        return spec.mu
    if isinstance(spec, TensorMobility):
        n = spec.direction
        return float(n @ spec.mu @ n)
    if isinstance(spec, FromConductivity):
        if material is None or material.sigma is None:
            raise InputError("FromConductivity needs a material with a conductivity")
        return mobility_from_conductivity(material.sigma, material.n, material.e).value
    if isinstance(spec, BulkMetal1OverT):
        return spec.mu_ref * spec.T_ref / _law_temperature(spec, T)
    raise InputError(f"unknown mobility specification {spec!r}")


def _temperature(T) -> float:
    T = as_cgs(T, TEMPERATURE, "T")
    if not (math.isfinite(T) and T > 0):
        raise InputError(f"temperature must be positive, got {T}")
    return float(T)


def effective_mobility(
    spec: MobilitySpec, T, material: Optional[Material] = None, system: str = CGS
) -> Quantity:
    """Scalar mobility along the field at temperature ``T``."""
    T = _temperature(T)
    return convert(Quantity(_mobility(spec, T, material), MOBILITY), system)


def mobility_temperature_product(spec: MobilitySpec, T, material: Optional[Material] = None) -> float:
    """mu(T) * T in CGS units (cm^2 K / (statV s)).

    For the 1/T law this is mu_ref * T_ref exactly at every T >= 50 K, which
    is what makes the predicted thick-sample noise temperature independent.
    """
    T = _temperature(T)
    if isinstance(spec, BulkMetal1OverT):
        T_eff = _law_temperature(spec, T)
        if T_eff == T:
            return spec.mu_ref * spec.T_ref
        return spec.mu_ref * spec.T_ref / T_eff * T
    return _mobility(spec, T, material) * T
