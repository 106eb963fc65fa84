"""Sample descriptors: JSON files describing a sample, its leads, material, bias and reference data.

A descriptor is validated in two passes: structure against the bundled JSON
schema, then every numeric block against the physical dimension its field
requires.  All values are converted to CGS on ingestion.
"""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional

import jsonschema
import numpy as np

from ..errors import InputError, UnitError
from ..geometry import Ball, Box, LeadPair, Region, VoxelGrid
from ..quantities import (
    CONDUCTIVITY,
    DENSITY,
    FREQUENCY,
    LENGTH,
    MASS,
    MOBILITY,
    RESISTANCE,
    SPECTRAL_DENSITY,
    TEMPERATURE,
    VOLTAGE,
    Dimension,
    parse_unit,
)
from ..transport import (
    BulkMetal1OverT,
    FromConductivity,
    Material,
    MobilitySpec,
    ScalarMobility,
    TensorMobility,
)

SCHEMA_VERSION = 1
BUNDLED = ("voss1981_gold",)


def _data_file(name: str):
    return resources.files("qflicker.workbench").joinpath("data").joinpath(name)


def schema() -> dict:
    return json.loads(_data_file("descriptor.schema.json").read_text())


@dataclass(frozen=True, eq=False)
class SampleDescriptor:
    name: str
    region: Region
    leads: LeadPair
    material: Material
    U0: float  # statV
    direction: np.ndarray
    T: float  # K
    references: tuple = ()  # (f in Hz, C_U in statV^2 s)
    resistance: Optional[float] = None  # CGS, informational
    source: dict = field(default_factory=dict, repr=False)

    def resolved(self) -> dict:
        """CGS values of every input, for run records and comparisons."""
        reg = self.region
        if isinstance(reg, Box):
            geom = {"type": "box", "l": reg.l, "w": reg.w, "h": reg.h}
        elif isinstance(reg, Ball):
            geom = {"type": "ball", "R": reg.R, "center": list(reg.center)}
        else:
            geom = {"type": "voxel", "spacing": reg.spacing, "origin": list(reg.origin),
                    "occupied": int(reg.mask.sum())}
        mob = self.material.mobility
        mob_out = None if mob is None else {"model": type(mob).__name__, **_spec_fields(mob)}
        return {
            "name": self.name,
            "units": "CGS-Gaussian",
            "geometry_cm": geom,
            "leads_cm": {"x": self.leads.x.tolist(), "xp": self.leads.xp.tolist()},
            "material": {
                "n_per_cm3": self.material.n,
                "m_g": self.material.m,
                "d_cm": self.material.d,
                "sigma_per_s": self.material.sigma,
                "mobility": mob_out,
                "resistance_s_per_cm": self.resistance,
            },
            "U0_statV": self.U0,
            "direction": self.direction.tolist(),
            "T_K": self.T,
            "references": [list(r) for r in self.references],
        }


def _spec_fields(spec) -> dict:
    if isinstance(spec, ScalarMobility):
        return {"mu_cgs": spec.mu}
    if isinstance(spec, TensorMobility):
        return {"mu_cgs": spec.mu.tolist(), "direction": spec.direction.tolist()}
    if isinstance(spec, BulkMetal1OverT):
        return {"mu_ref_cgs": spec.mu_ref, "T_ref_K": spec.T_ref}
    return {}


def _factor(units: str, expected: Dimension, where: str) -> float:
    try:
        factor, dim = parse_unit(units)
    except UnitError as exc:
        raise UnitError(f"{where}: {exc}") from None
    if dim != expected:
        raise UnitError(f"{where}: unit {units!r} has dimension {dim}, expected {expected}")
    return factor


def _scalar(block: dict, expected: Dimension, where: str) -> float:
    return float(block["value"]) * _factor(block["units"], expected, where)


def _mobility(block: dict) -> MobilitySpec:
    model = block["model"]
    if model == "scalar":
        return ScalarMobility(block["mu"] * _factor(block["units"], MOBILITY, "material.mobility.units"))
    if model == "tensor":
        f = _factor(block["units"], MOBILITY, "material.mobility.units")
        return TensorMobility(np.asarray(block["mu"], dtype=float) * f, block["direction"])
    if model == "from-conductivity":
        return FromConductivity()
    f = _factor(block["units"], MOBILITY, "material.mobility.units")
    fT = _factor(block["T_units"], TEMPERATURE, "material.mobility.T_units")
    return BulkMetal1OverT(block["mu_ref"] * f, block["T_ref"] * fT)


def _region(block: dict, base: Optional[Path]) -> Region:
    f = _factor(block["units"], LENGTH, "geometry.units")
    kind = block["type"]
    if kind == "box":
        return Box(block["l"] * f, block["w"] * f, block["h"] * f)
    if kind == "ball":
        return Ball(block["R"] * f, tuple(c * f for c in block.get("center", (0, 0, 0))))
    path = Path(block["mask_file"])
    if not path.is_absolute() and base is not None:
        path = base / path
    try:
        mask = np.load(path)
    except OSError as exc:
        raise InputError(f"geometry.mask_file: cannot read {path}: {exc}") from None
    return VoxelGrid(block["spacing"] * f, mask, tuple(o * f for o in block.get("origin", (0, 0, 0))))


def _schema_error(exc: jsonschema.ValidationError) -> InputError:
    where = ".".join(str(p) for p in exc.absolute_path) or "<root>"
    return InputError(f"descriptor field {where}: {exc.message}")


def from_dict(data: dict, base: Optional[Path] = None) -> SampleDescriptor:
    """Validate a descriptor mapping and convert it to a :class:`SampleDescriptor`."""
    mat = data.get("material") if isinstance(data, dict) else None
    if isinstance(mat, dict) and "sigma" not in mat and "mobility" not in mat:
        raise InputError(
            "descriptor field material: needs 'sigma' (conductivity) or 'mobility' (a mobility model)"
        )
    validator = jsonschema.Draft202012Validator(schema())
    errors = list(validator.iter_errors(data))
    if errors:
        raise _schema_error(jsonschema.exceptions.best_match(errors))

    region = _region(data["geometry"], base)
    lf = _factor(data["leads"]["units"], LENGTH, "leads.units")
    leads = LeadPair(np.asarray(data["leads"]["x"]) * lf, np.asarray(data["leads"]["xp"]) * lf)
    leads.check(region)

    mat = data["material"]
    material = Material(
        n=_scalar(mat["n"], DENSITY, "material.n"),
        m=_scalar(mat["m_eff"], MASS, "material.m_eff"),
        d=_scalar(mat["d"], LENGTH, "material.d"),
        sigma=_scalar(mat["sigma"], CONDUCTIVITY, "material.sigma") if "sigma" in mat else None,
        mobility=_mobility(mat["mobility"]) if "mobility" in mat else None,
    )
    resistance = None
    if "resistance" in mat:
        resistance = _scalar(mat["resistance"], RESISTANCE, "material.resistance")

    U0 = _scalar(data["bias"]["U0"], VOLTAGE, "bias.U0")
    if U0 < 0:
        raise InputError("bias.U0: must be non-negative")
    direction = np.asarray(data["bias"].get("direction", (1.0, 0.0, 0.0)), dtype=float)
    if not np.isclose(np.linalg.norm(direction), 1.0, rtol=0, atol=1e-9):
        raise InputError("bias.direction: must be a unit vector")
    T = _scalar(data["temperature"], TEMPERATURE, "temperature")
    if not T > 0:
        raise InputError("temperature: must be positive")

    refs = []
    for i, r in enumerate(data.get("reference", [])):
        f = r["f"] * _factor(r["f_units"], FREQUENCY, f"reference.{i}.f_units")
        c = r["C_U"] * _factor(r["C_U_units"], SPECTRAL_DENSITY, f"reference.{i}.C_U_units")
        refs.append((f, c))

    return SampleDescriptor(
        name=data["name"],
        region=region,
        leads=leads,
        material=material,
        U0=U0,
        direction=direction,
        T=T,
        references=tuple(refs),
        resistance=resistance,
        source=copy.deepcopy(data),
    )


def ingest(path_or_name) -> SampleDescriptor:
    """Load a descriptor from a file path or the name of a bundled dataset."""
    name = str(path_or_name)
    if name in BUNDLED:
        return from_dict(json.loads(_data_file(f"{name}.json").read_text()))
    path = Path(name)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InputError(f"cannot read descriptor {path}: {exc}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"descriptor {path} is not valid JSON: {exc}") from None
    return from_dict(data, base=path.parent)


def emit(desc: SampleDescriptor) -> str:
    """Serialise a descriptor back to JSON text (as written, units preserved)."""
    return json.dumps(desc.source, indent=2, sort_keys=False) + "\n"
