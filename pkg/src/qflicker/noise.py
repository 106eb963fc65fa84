"""Flicker-noise coefficient, voltage spectra, the zero-field null result and validity checks.

Everything is evaluated in CGS-Gaussian units.  Plain numbers are taken to
be CGS already (g in 1/cm, mu in cm^2/(statV s), U0 in statV, T in K, f in
Hz); pass a :class:`Quantity` to use other units.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np

from .errors import InputError
from .geometry import LeadPair, QuadratureConfig, Region, VoxelGrid, kernel_integral
from .quantities import (
    CGS,
    CODATA,
    FIELD,
    FREQUENCY,
    INVERSE_LENGTH,
    MASS,
    MOBILITY,
    SI,
    TEMPERATURE,
    VOLT_PER_STATVOLT,
    VOLTAGE,
    ConstantSet,
    as_cgs,
)
from .transport import Material, effective_mobility, mobility_temperature_product

REAL_POSITIVE = "real-positive"
COMPLEX_ODD = "complex-odd"
CONVENTIONS = (REAL_POSITIVE, COMPLEX_ODD)

PASS, WARN, FAIL = "pass", "warn", "fail"
PASS_MARGIN = 0.01
FAIL_MARGIN = 1.0

STRONG_FIELD_NOTE = (
    "strong-field regime: the drift field exceeds the perturbative bound at these "
    "frequencies; the 1/f prediction is still emitted but lies outside the range "
    "where the leading-order expansion in E is controlled"
)


def _positive(x, dim, name) -> float:
    v = as_cgs(x, dim, name)
    if not (np.isfinite(v) and v > 0):
        raise InputError(f"{name} must be positive, got {v}")
    return float(v)


def spectral_unit_factor(system: str) -> float:
    """Multiply statV^2 s by this to express a spectral density in ``system``."""
    system = system.upper()
    if system == SI:
        return VOLT_PER_STATVOLT**2
    if system == CGS:
        return 1.0
    raise InputError(f"unknown unit system {system!r}")


# -- eta and the homogeneous spectrum -------------------------------------------


def eta_coefficient(g, mu, T, constants: ConstantSet = CODATA) -> float:
    """Dimensionless noise amplitude eta = (2 alpha^2 k_B / (3 e c)) g mu T."""
    g = _positive(g, INVERSE_LENGTH, "g")
    mu = _positive(mu, MOBILITY, "mu")
    T = _positive(T, TEMPERATURE, "T")
    return constants.eta_prefactor * g * mu * T


def voltage_psd(eta: float, U0, f, convention: str = REAL_POSITIVE, system: str = SI):
    """Voltage noise spectral density at frequency ``f`` (Hz, scalar or array).

    ``real-positive``: eta U0^2 / (2 pi |f|).
    ``complex-odd``: -i eta U0^2 / omega with omega = 2 pi f, odd in f.
    """
    if convention not in CONVENTIONS:
        raise InputError(f"unknown convention {convention!r}; use one of {CONVENTIONS}")
    if not (np.isfinite(eta) and eta >= 0):
        raise InputError(f"eta must be non-negative, got {eta}")
    U0 = as_cgs(U0, VOLTAGE, "U0")
    if U0 < 0:
        raise InputError(f"bias U0 must be non-negative, got {U0}")
    f_arr = np.asarray(as_cgs(f, FREQUENCY, "f"), dtype=float)
    if np.any(f_arr == 0) or not np.all(np.isfinite(f_arr)):
        raise InputError("frequency must be finite and nonzero (the spectrum has a pole at f = 0)")
    amp = eta * U0 * U0 * spectral_unit_factor(system)
    omega = 2.0 * math.pi * f_arr
    if convention == REAL_POSITIVE:
        out = amp / np.abs(omega)
    else:
        out = -1j * amp / omega
    out = np.asarray(out)
    return out if out.ndim else out[()]


@dataclass(frozen=True)
class NoisePrediction:
    """eta together with the bias it applies to and where the inputs came from."""

    eta: float
    U0: float  # statV
    convention: str = REAL_POSITIVE
    provenance: dict = field(default_factory=dict)

    def spectrum(self, f, system: str = SI):
        return voltage_psd(self.eta, self.U0, f, self.convention, system)

    __call__ = spectrum


def predict(
    g,
    mobility,
    T,
    U0,
    *,
    material: Optional[Material] = None,
    constants: ConstantSet = CODATA,
    convention: str = REAL_POSITIVE,
    sources: Optional[dict] = None,
) -> NoisePrediction:
    """Build a :class:`NoisePrediction` from g, a mobility, T and U0.

    ``mobility`` is a transport specification, evaluated at ``T``, or a
    mobility value.  For the 1/T law the product mu*T is used directly so
    the result is exactly T independent.
    """
    g_val = _positive(g, INVERSE_LENGTH, "g")
    T_val = _positive(T, TEMPERATURE, "T")
    if isinstance(mobility, (int, float)) or hasattr(mobility, "dimension"):
        mu_val = _positive(mobility, MOBILITY, "mu")
        muT = mu_val * T_val
    else:
        mu_val = effective_mobility(mobility, T_val, material).value
        muT = mobility_temperature_product(mobility, T_val, material)
    if not muT > 0:
        raise InputError("mobility must be positive")
    U0_val = as_cgs(U0, VOLTAGE, "U0")
    if U0_val < 0:
        raise InputError(f"bias U0 must be non-negative, got {U0_val}")
    eta = constants.eta_prefactor * g_val * muT
    prov = {
        "g_per_cm": g_val,
        "mu_cgs": mu_val,
        "T_K": T_val,
        "U0_statV": U0_val,
        "constants": constants.name,
    }
    prov.update(sources or {})
    return NoisePrediction(eta, U0_val, convention, prov)


# -- general (inhomogeneous) drift field ---------------------------------------


@dataclass(frozen=True)
class GeneralSpectrum:
    value: complex  # statV^2 s
    error: float
    converged: bool


def general_spectrum(
    region: Region,
    leads: LeadPair,
    drift,
    E,
    T,
    omega: float,
    cfg: Optional[QuadratureConfig] = None,
    constants: ConstantSet = CODATA,
) -> GeneralSpectrum:
    """Spectrum for an arbitrary drift-velocity field v(r) under a homogeneous field E.

        C = -i (2 alpha^2 k_B / (3 e c)) T |x' - x|^2 / (omega Omega)
              * integral (E . v(r)) (1/|r - x| + 1/|r - x'|) d^3r

    ``drift`` is a constant 3-vector (cm/s), a vectorised callable of points
    (N, 3) -> (N, 3), or for a voxel grid an array shaped mask.shape + (3,).
    ``E`` is the field vector in statV/cm.  Homogeneous v = mu E reduces this
    to -i eta U0^2 / omega with eta built from the numeric g.
    """
    T = _positive(T, TEMPERATURE, "T")
    if not (np.isfinite(omega) and omega != 0):
        raise InputError("omega must be finite and nonzero")
    if isinstance(E, (int, float)):
        raise InputError("E must be a 3-vector")
    E = np.asarray(as_cgs(E, FIELD, "E"), dtype=float).reshape(-1)
    if E.shape != (3,):
        raise InputError("E must be a 3-vector")

    weight: Union[None, Callable, np.ndarray]
    scale = 1.0
    if callable(drift):
        def weight(r):
            return np.asarray(drift(r), dtype=float) @ E
    else:
        v = np.asarray(drift, dtype=float)
        if v.shape == (3,):
            weight, scale = None, float(v @ E)
        elif isinstance(region, VoxelGrid) and v.shape == region.mask.shape + (3,):
            weight = v @ E
        else:
            raise InputError(f"drift field has unsupported shape {v.shape}")

    if weight is None and scale == 0.0:
        return GeneralSpectrum(0j, 0.0, True)
    res = kernel_integral(region, leads, weight, cfg)
    sep2 = float(np.sum((leads.xp - leads.x) ** 2))
    pref = constants.eta_prefactor * T * sep2 / (omega * region.volume)
    return GeneralSpectrum(
        -1j * pref * scale * res.value, abs(pref * scale) * res.error, res.converged
    )


# -- zero-field null result ------------------------------------------------------


@dataclass(frozen=True)
class BiasCondition:
    U0: float  # statV
    T: float  # K
    direction: np.ndarray = field(default_factory=lambda: np.array([1.0, 0.0, 0.0]))

    def __post_init__(self):
        U0 = as_cgs(self.U0, VOLTAGE, "U0")
        if not (np.isfinite(U0) and U0 >= 0):
            raise InputError(f"bias U0 must be non-negative, got {U0}")
        n = np.asarray(self.direction, dtype=float).reshape(-1)
        if n.shape != (3,) or abs(np.linalg.norm(n) - 1.0) > 1e-9:
            raise InputError("bias direction must be a unit 3-vector")
        object.__setattr__(self, "U0", float(U0))
        object.__setattr__(self, "T", _positive(self.T, TEMPERATURE, "T"))
        object.__setattr__(self, "direction", n)

    def beta(self, constants: ConstantSet = CODATA) -> float:
        return 1.0 / (constants.k_B * self.T)

    def field_strength(self, leads: LeadPair) -> float:
        """|E| = U0 / |x - x'| in statV/cm."""
        sep = leads.separation
        if sep == 0:
            raise InputError("leads coincide; the field is undefined")
        return self.U0 / sep


@dataclass(frozen=True, eq=False)
class ZeroFieldState:
    q_bar: np.ndarray  # mean momentum, g cm/s
    x0: np.ndarray  # wave-packet centre, cm
    m: float = CODATA.m_e

    def __post_init__(self):
        q = np.asarray(self.q_bar, dtype=float).reshape(-1)
        x0 = np.asarray(self.x0, dtype=float).reshape(-1)
        if q.shape != (3,) or x0.shape != (3,):
            raise InputError("q_bar and x0 must be 3-vectors")
        m = _positive(self.m, MASS, "m")
        object.__setattr__(self, "q_bar", q)
        object.__setattr__(self, "x0", x0)
        object.__setattr__(self, "m", m)


def zero_field_green(
    state: ZeroFieldState, xp, T, omega: float, constants: ConstantSet = CODATA
) -> complex:
    """Zero-field potential correlator -2i e^2 (q.r') / (m^2 beta omega r'^3), r' = x' - x0.

    Evaluated literally in Gaussian units.  It depends on the second lead only.
    """
    rp = np.asarray(xp, dtype=float).reshape(-1) - state.x0
    r = float(np.linalg.norm(rp))
    if r == 0:
        raise InputError("lead coincides with the wave-packet centre (r' = 0)")
    if not (np.isfinite(omega) and omega != 0):
        raise InputError("omega must be finite and nonzero")
    beta = 1.0 / (constants.k_B * _positive(T, TEMPERATURE, "T"))
    return -2j * constants.e**2 * float(state.q_bar @ rp) / (state.m**2 * beta * omega * r**3)


@dataclass(frozen=True)
class ZeroFieldResult:
    value: complex
    intermediates: tuple  # C(x,x), C(x',x'), C(x,x'), C(x',x)

    @property
    def scale(self) -> float:
        return max(abs(c) for c in self.intermediates)

    @property
    def relative(self) -> float:
        s = self.scale
        return abs(self.value) / s if s else abs(self.value)


def zero_field_voltage_psd(
    state: ZeroFieldState, x, xp, T, omega: float, constants: ConstantSet = CODATA
) -> ZeroFieldResult:
    """Voltage spectrum C(x,x) + C(x',x') - C(x,x') - C(x',x) built from the zero-field correlator.

    The correlator C(a, b) does not depend on a, so the combination cancels.
    """
    def C(a, b):
        return zero_field_green(state, b, T, omega, constants)

    cxx, cpp, cxp, cpx = C(x, x), C(xp, xp), C(x, xp), C(xp, x)
    value = cxx + cpp - cxp - cpx
    return ZeroFieldResult(value, (cxx, cpp, cxp, cpx))


# -- validity -------------------------------------------------------------------


@dataclass(frozen=True)
class ValidityEntry:
    name: str
    value: float
    threshold: float
    note: str = ""

    @property
    def margin(self) -> float:
        if self.threshold == 0:
            return math.inf if self.value else 0.0
        return self.value / self.threshold

    @property
    def status(self) -> str:
        m = self.margin
        if not m < FAIL_MARGIN:
            return FAIL
        return PASS if m < PASS_MARGIN else WARN


@dataclass(frozen=True)
class ValidityReport:
    entries: tuple
    window: Optional[tuple]  # (f_lo, f_hi) in Hz inside the requested range, or None
    notes: tuple = ()

    def __getitem__(self, name: str) -> ValidityEntry:
        for e in self.entries:
            if e.name == name:
                return e
        raise KeyError(name)

    @property
    def worst(self) -> str:
        statuses = [e.status for e in self.entries]
        return FAIL if FAIL in statuses else WARN if WARN in statuses else PASS


def validity_report(
    material: Material,
    bias: BiasCondition,
    leads: LeadPair,
    f_range,
    mobility=None,
    constants: ConstantSet = CODATA,
) -> ValidityReport:
    """Check the three small-parameter conditions behind the 1/f result.

    soft bound     mu U0^2 << c^2 hbar / e                (frequency independent)
    strong field   |E| << (d m / e) omega^2               (worst at the lowest f)
    thermal        f << (k_B / hbar) T                    (worst at the highest f)

    ``mobility`` overrides the material's mobility specification (a spec or
    a CGS value).  The trusted window is the part of ``f_range`` where no
    entry fails.
    """
    f = np.abs(np.asarray(f_range, dtype=float).reshape(-1))
    if f.size == 0 or np.any(f == 0) or not np.all(np.isfinite(f)):
        raise InputError("frequency range must contain finite nonzero values")
    f_lo, f_hi = float(f.min()), float(f.max())

    spec = material.mobility_spec if mobility is None else mobility
    if isinstance(spec, (int, float)) or hasattr(spec, "dimension"):
        mu = as_cgs(spec, MOBILITY, "mu")
    else:
        mu = effective_mobility(spec, bias.T, material).value

    soft = ValidityEntry("soft_bound", mu * bias.U0**2, constants.soft_bound)

    try:
        E = bias.field_strength(leads)
    except InputError:
        E = math.inf
    coeff = constants.strong_field_coefficient(material.d, material.m)
    omega_lo = 2.0 * math.pi * f_lo
    strong = ValidityEntry("strong_field", E, coeff * omega_lo**2)
    if strong.status == FAIL:
        strong = ValidityEntry(strong.name, strong.value, strong.threshold, STRONG_FIELD_NOTE)

    cutoff = constants.thermal_cutoff_per_kelvin * bias.T
    thermal = ValidityEntry("thermal", f_hi, cutoff)

    # frequencies where neither f-dependent bound fails
    lo = max(f_lo, math.sqrt(E / coeff) / (2.0 * math.pi) if math.isfinite(E) else math.inf)
    hi = min(f_hi, cutoff)
    window = (lo, hi) if soft.status != FAIL and lo < hi else None

    notes = tuple(e.note for e in (soft, strong, thermal) if e.note)
    return ValidityReport((soft, strong, thermal), window, notes)


# -- Bose factor ------------------------------------------------------------------


@dataclass(frozen=True)
class BoseCheck:
    x: float
    relative_error: float


def bose_approx_error(f, T, constants: ConstantSet = CODATA, angular: bool = False) -> BoseCheck:
    """How well 1/x approximates the Bose factor 1/(e^x - 1) at x = hbar omega / (k_B T).

    ``f`` is in Hz, or in rad/s when ``angular`` is set.  The relative error
    (e^x - 1)/x - 1 is about x/2 for small x.
    """
    f = _positive(f, FREQUENCY, "f")
    T = _positive(T, TEMPERATURE, "T")
    omega = f if angular else 2.0 * math.pi * f
    x = constants.hbar * omega / (constants.k_B * T)
    if x < 1e-3:
        rel = x / 2 + x * x / 6 + x**3 / 24 + x**4 / 120
    else:
        rel = (math.expm1(x) - x) / x
    return BoseCheck(x, rel)
