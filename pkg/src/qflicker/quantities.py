"""Physical quantities, CGS-Gaussian / SI conversion and constant sets.

Everything downstream computes in CGS-Gaussian units with plain floats.
:class:`Quantity` is used at the boundaries: parsing descriptor files,
reporting results, and converting between the two unit systems.

Dimensions are exponent vectors over (length, mass, time, charge,
temperature).  In the Gaussian system charge is not an independent base
dimension, but keeping a charge slot lets the same vector describe a quantity
in both systems; conversion multiplies by the ratio of base units raised to
each exponent.  That is exact for every quantity defined through charge,
force and energy alone (voltage, field, resistance, conductivity, mobility),
which covers this package.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import numpy as np
import scipy.constants as sc

from .errors import InputError, UnitError

__all__ = [
    "CGS",
    "SI",
    "Dimension",
    "Quantity",
    "ConstantSet",
    "CODATA",
    "PAPER_ROUNDED",
    "CONSTANT_SETS",
    "STATVOLT_PER_VOLT",
    "VOLT_PER_STATVOLT",
    "convert",
    "mobility_to_cgs",
    "from_unit",
    "to_unit",
    "parse_unit",
    "as_cgs",
]

CGS = "CGS"
SI = "SI"
_SYSTEMS = (CGS, SI)

# statcoulomb per coulomb, exact: 10 * c[m/s]
_STATC_PER_C = 10.0 * sc.c
VOLT_PER_STATVOLT = sc.c / 1.0e6  # 299.792458 exactly
STATVOLT_PER_VOLT = 1.0 / VOLT_PER_STATVOLT

# SI base unit -> CGS base unit, per slot (L, M, T, Q, Theta)
_SI_TO_CGS = (100.0, 1000.0, 1.0, _STATC_PER_C, 1.0)
_SLOT_NAMES = ("length", "mass", "time", "charge", "temperature")


class Dimension(tuple):
    """Rational exponent vector over (length, mass, time, charge, temperature)."""

    def __new__(cls, L=0, M=0, T=0, Q=0, K=0):
        return super().__new__(cls, tuple(Fraction(x) for x in (L, M, T, Q, K)))

    def __mul__(self, other: "Dimension") -> "Dimension":
        return Dimension(*(a + b for a, b in zip(self, other)))

    def __truediv__(self, other: "Dimension") -> "Dimension":
        return Dimension(*(a - b for a, b in zip(self, other)))

    def __pow__(self, p) -> "Dimension":
        p = Fraction(p)
        return Dimension(*(a * p for a in self))

    def __repr__(self) -> str:
        parts = [f"{n}^{e}" for n, e in zip(_SLOT_NAMES, self) if e != 0]
        return "Dimension(" + (", ".join(parts) or "dimensionless") + ")"


DIMENSIONLESS = Dimension()
LENGTH = Dimension(L=1)
MASS = Dimension(M=1)
TIME = Dimension(T=1)
CHARGE = Dimension(Q=1)
TEMPERATURE = Dimension(K=1)
ENERGY = Dimension(L=2, M=1, T=-2)
VOLTAGE = ENERGY / CHARGE
FIELD = VOLTAGE / LENGTH
RESISTANCE = VOLTAGE / (CHARGE / TIME)
CONDUCTIVITY = DIMENSIONLESS / (RESISTANCE * LENGTH)
MOBILITY = LENGTH**2 / (VOLTAGE * TIME)
DENSITY = LENGTH**-3
INVERSE_LENGTH = LENGTH**-1
FREQUENCY = TIME**-1
SPECTRAL_DENSITY = VOLTAGE**2 * TIME
VELOCITY = LENGTH / TIME


def _factor_si_to_cgs(dim: Dimension) -> float:
    f = 1.0
    for base, exp, name in zip(_SI_TO_CGS, dim, _SLOT_NAMES):
        if exp == 0:
            continue
        if name == "charge" and exp.denominator != 1:
            raise UnitError(
                f"charge exponent {exp} has no Gaussian counterpart; "
                "only integer charge exponents are convertible"
            )
        f *= base ** float(exp)
    return f


@dataclass(frozen=True)
class Quantity:
    """A value with a dimension, tagged with the unit system it is expressed in.

    Values are in the coherent base units of their system: cm/g/s/statC/K for
    CGS, m/kg/s/C/K for SI.  Arithmetic across systems raises.
    """

    value: Union[float, np.ndarray]
    dimension: Dimension = DIMENSIONLESS
    system: str = CGS

    def __post_init__(self):
        if self.system not in _SYSTEMS:
            raise UnitError(f"unknown unit system {self.system!r}")
        if not isinstance(self.dimension, Dimension):
            object.__setattr__(self, "dimension", Dimension(*self.dimension))

    def _check(self, other: "Quantity") -> None:
        if self.system != other.system:
            raise UnitError(
                f"cannot combine a {self.system} quantity with a {other.system} quantity"
            )

    def __add__(self, other):
        if not isinstance(other, Quantity):
            return NotImplemented
        self._check(other)
        if self.dimension != other.dimension:
            raise UnitError(f"cannot add {self.dimension} and {other.dimension}")
        return Quantity(self.value + other.value, self.dimension, self.system)

    def __sub__(self, other):
        if not isinstance(other, Quantity):
            return NotImplemented
        return self + (-other)

    def __neg__(self):
        return Quantity(-self.value, self.dimension, self.system)

    def __mul__(self, other):
        if isinstance(other, Quantity):
            self._check(other)
            return Quantity(
                self.value * other.value, self.dimension * other.dimension, self.system
            )
        return Quantity(self.value * other, self.dimension, self.system)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Quantity):
            self._check(other)
            return Quantity(
                self.value / other.value, self.dimension / other.dimension, self.system
            )
        return Quantity(self.value / other, self.dimension, self.system)

    def __rtruediv__(self, other):
        return Quantity(other / self.value, DIMENSIONLESS / self.dimension, self.system)

    def __pow__(self, p):
        return Quantity(self.value ** float(p), self.dimension ** Fraction(p), self.system)

    def to(self, system: str) -> "Quantity":
        return convert(self, system)

    def to_unit(self, unit: str) -> float:
        return to_unit(self, unit)


def convert(q: Quantity, target: str) -> Quantity:
    """Express ``q`` in the ``target`` unit system ("CGS" or "SI")."""
    target = target.upper()
    if target not in _SYSTEMS:
        raise UnitError(f"unknown unit system {target!r}")
    if q.system == target:
        return q
    f = _factor_si_to_cgs(q.dimension)
    value = q.value * f if target == CGS else q.value / f
    return Quantity(value, q.dimension, target)


def mobility_to_cgs(mu: float) -> float:
    """cm^2/(V s) -> cm^2/(statV s)."""
    if mu < 0:
        raise InputError(f"mobility must be non-negative, got {mu}")
    return mu * VOLT_PER_STATVOLT


# -- unit strings ------------------------------------------------------------

# name -> (factor to CGS coherent unit, dimension)
_UNITS: dict[str, tuple[float, Dimension]] = {}


def _reg(names, factor, dim):
    for n in names.split():
        _UNITS[n] = (factor, dim)


_reg("1", 1.0, DIMENSIONLESS)
_reg("m", 100.0, LENGTH)
_reg("cm", 1.0, LENGTH)
_reg("mm", 0.1, LENGTH)
_reg("um µm micron", 1e-4, LENGTH)
_reg("nm", 1e-7, LENGTH)
_reg("angstrom Å", 1e-8, LENGTH)
_reg("g", 1.0, MASS)
_reg("kg", 1000.0, MASS)
_reg("m_e", sc.m_e * 1000.0, MASS)
_reg("s", 1.0, TIME)
_reg("ms", 1e-3, TIME)
_reg("us", 1e-6, TIME)
_reg("Hz", 1.0, FREQUENCY)
_reg("kHz", 1e3, FREQUENCY)
_reg("MHz", 1e6, FREQUENCY)
_reg("rad/s", 1.0, FREQUENCY)
_reg("K", 1.0, TEMPERATURE)
_reg("C", _STATC_PER_C, CHARGE)
_reg("statC esu", 1.0, CHARGE)
_reg("V", STATVOLT_PER_VOLT, VOLTAGE)
_reg("mV", 1e-3 * STATVOLT_PER_VOLT, VOLTAGE)
_reg("statV statvolt", 1.0, VOLTAGE)
_reg("V/m", STATVOLT_PER_VOLT / 100.0, FIELD)
_reg("V/cm", STATVOLT_PER_VOLT, FIELD)
_reg("statV/cm", 1.0, FIELD)
_reg("Ohm ohm Ω", _factor_si_to_cgs(RESISTANCE), RESISTANCE)
_reg("S/m 1/(Ohm*m) Ohm^-1*m^-1", _factor_si_to_cgs(CONDUCTIVITY), CONDUCTIVITY)
_reg("S/cm 1/(Ohm*cm) Ohm^-1*cm^-1", 100.0 * _factor_si_to_cgs(CONDUCTIVITY), CONDUCTIVITY)
_reg("cm^-3 1/cm3 1/cm^3", 1.0, DENSITY)
_reg("m^-3 1/m3 1/m^3", 1e-6, DENSITY)
_reg("cm^-1 1/cm", 1.0, INVERSE_LENGTH)
_reg("m^-1 1/m", 0.01, INVERSE_LENGTH)
_reg("cm2/(V*s) cm^2/(V*s) cm2/Vs", VOLT_PER_STATVOLT, MOBILITY)
_reg("m2/(V*s) m^2/(V*s) m2/Vs", 1e4 * VOLT_PER_STATVOLT, MOBILITY)
_reg("cm2/(statV*s) cm^2/(statV*s)", 1.0, MOBILITY)
_reg("cm/s", 1.0, VELOCITY)
_reg("m/s", 100.0, VELOCITY)
_reg("V2/Hz V^2/Hz", STATVOLT_PER_VOLT**2, SPECTRAL_DENSITY)
_reg("statV2*s statV^2*s", 1.0, SPECTRAL_DENSITY)


def parse_unit(unit: str) -> tuple[float, Dimension]:
    """Return (factor to CGS coherent units, dimension) for a unit string."""
    key = re.sub(r"\s+", "", unit)
    try:
        return _UNITS[key]
    except KeyError:
        raise UnitError(f"unknown unit {unit!r}") from None


def from_unit(value, unit: str) -> Quantity:
    """Build a CGS :class:`Quantity` from a value expressed in ``unit``."""
    factor, dim = parse_unit(unit)
    if np.ndim(value):
        return Quantity(np.asarray(value, dtype=float) * factor, dim, CGS)
    return Quantity(float(value) * factor, dim, CGS)


def to_unit(q: Quantity, unit: str) -> float:
    """Numeric value of ``q`` expressed in ``unit``."""
    factor, dim = parse_unit(unit)
    if dim != q.dimension:
        raise UnitError(f"cannot express {q.dimension} in {unit!r} ({dim})")
    return convert(q, CGS).value / factor


def as_cgs(x, dimension: Dimension, name: str = "value") -> float:
    """Accept a plain number (already CGS) or a Quantity; return the CGS number."""
    if isinstance(x, Quantity):
        if x.dimension != dimension:
            raise UnitError(f"{name}: expected {dimension}, got {x.dimension}")
        return convert(x, CGS).value
    return x


# -- constants ---------------------------------------------------------------


@dataclass(frozen=True)
class ConstantSet:
    """Fundamental constants in CGS-Gaussian units.

    The four coefficient fields override the value that would otherwise be
    derived from the primitive constants.  They let a constant set carry
    rounded order-of-magnitude estimates verbatim.
    """

    name: str
    e: float
    hbar: float
    c: float
    k_B: float
    m_e: float
    eta_prefactor_override: float | None = None
    soft_bound_override: float | None = None
    strong_field_override: float | None = None
    thermal_cutoff_override: float | None = None

    @property
    def alpha(self) -> float:
        return self.e**2 / (self.hbar * self.c)

    @property
    def eta_prefactor(self) -> float:
        """eta / (g mu T) with g in 1/cm, mu in cm^2/(statV s), T in K."""
        if self.eta_prefactor_override is not None:
            return self.eta_prefactor_override
        return 2.0 * self.alpha**2 * self.k_B / (3.0 * self.e * self.c)

    @property
    def soft_bound(self) -> float:
        """c^2 hbar / e, the scale mu*U0^2 must stay well below."""
        if self.soft_bound_override is not None:
            return self.soft_bound_override
        return self.c**2 * self.hbar / self.e

    def strong_field_coefficient(self, d: float, m: float) -> float:
        """d m / e: field threshold per omega^2 (statV/cm per (rad/s)^2)."""
        if self.strong_field_override is not None:
            return self.strong_field_override
        return d * m / self.e

    @property
    def thermal_cutoff_per_kelvin(self) -> float:
        """k_B / hbar, the frequency scale per kelvin above which the 1/f form fails."""
        if self.thermal_cutoff_override is not None:
            return self.thermal_cutoff_override
        return self.k_B / self.hbar

    def quantity(self, name: str, system: str = CGS) -> Quantity:
        dims = {
            "e": CHARGE,
            "hbar": ENERGY * TIME,
            "c": VELOCITY,
            "k_B": ENERGY / TEMPERATURE,
            "m_e": MASS,
            "alpha": DIMENSIONLESS,
        }
        if name not in dims:
            raise KeyError(name)
        return convert(Quantity(getattr(self, name), dims[name], CGS), system)


CODATA = ConstantSet(
    name="codata",
    e=sc.e * _STATC_PER_C,
    hbar=sc.hbar * 1e7,
    c=sc.c * 100.0,
    k_B=sc.k * 1e7,
    m_e=sc.m_e * 1000.0,
)

# Rounded values used for back-of-envelope estimates (hbar ~ 1e-27, k ~ 1e-16,
# m ~ 1e-27 g) together with the rounded composite coefficients quoted with them.
PAPER_ROUNDED = ConstantSet(
    name="paper-rounded",
    e=CODATA.e,
    hbar=1e-27,
    c=CODATA.c,
    k_B=1e-16,
    m_e=1e-27,
    eta_prefactor_override=3.4e-22,
    soft_bound_override=1e3,
    strong_field_override=1e-25,
    thermal_cutoff_override=1e11,
)

CONSTANT_SETS = {CODATA.name: CODATA, PAPER_ROUNDED.name: PAPER_ROUNDED}
