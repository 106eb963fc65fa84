"""Sample regions, lead pairs and quadrature settings.

All lengths are in cm.  Regions expose what both quadrature backends need:
volume, bounding box, a vectorised membership test, a uniform sampler, and
``excision(p)``, which describes the largest ball around ``p`` whose
intersection with the region is known in closed form.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from ..errors import ApplicabilityWarning, InputError

_EDGE = 1e-12  # relative slack for "on the boundary"

_OCTANTS = np.array(
    [[sx, sy, sz] for sx in (-1, 1) for sy in (-1, 1) for sz in (-1, 1)], dtype=float
)


@dataclass(frozen=True)
class Excision:
    """Ball of radius ``rho`` around a lead; ``fraction`` of its volume lies in the region.

    ``approx_error`` bounds the error of treating the fraction as exact
    (nonzero only for curved boundaries).
    """

    rho: float
    fraction: float
    approx_error: float = 0.0

    @property
    def kernel_integral(self) -> float:
        """Integral of 1/|r - p| over the excised part: fraction * 2 pi rho^2."""
        return self.fraction * 2.0 * math.pi * self.rho**2


class Region:
    volume: float

    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    def contains(self, pts: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def sample_uniform(self, rng: np.random.Generator, n: int) -> np.ndarray:
        raise NotImplementedError

    def excision(self, p: np.ndarray, tolerance: float) -> Excision:
        raise NotImplementedError

    def scaled(self, s: float) -> "Region":
        raise NotImplementedError

    @property
    def extent(self) -> float:
        lo, hi = self.bounds()
        return float(np.max(hi - lo))

    def _octant_fraction(self, p: np.ndarray, rho: float) -> float:
        probe = p + 0.5 * rho * _OCTANTS / math.sqrt(3.0)
        return float(np.mean(self.contains(probe)))


@dataclass(frozen=True)
class Box(Region):
    """Rectangular sample occupying [0, l] x [0, w] x [0, h], with l >= w >= h."""

    l: float
    w: float
    h: float

    def __post_init__(self):
        dims = (self.l, self.w, self.h)
        if not all(np.isfinite(dims)) or min(dims) <= 0:
            raise InputError(f"box extents must be positive, got {dims}")
        l, w, h = sorted(dims, reverse=True)
        object.__setattr__(self, "l", float(l))
        object.__setattr__(self, "w", float(w))
        object.__setattr__(self, "h", float(h))

    @property
    def volume(self) -> float:
        return self.l * self.w * self.h

    @property
    def hi(self) -> np.ndarray:
        return np.array([self.l, self.w, self.h])

    def bounds(self):
        return np.zeros(3), self.hi

    def contains(self, pts):
        pts = np.atleast_2d(pts)
        slack = _EDGE * self.l
        return np.all((pts >= -slack) & (pts <= self.hi + slack), axis=-1)

    def sample_uniform(self, rng, n):
        return rng.random((n, 3)) * self.hi

    def excision(self, p, tolerance):
        p = np.asarray(p, dtype=float)
        d = np.concatenate([p, self.hi - p])
        slack = _EDGE * self.l
        positive = d[d > slack]
        if np.any(d < -slack):
            return Excision(0.0, 0.0)
        rho = float(np.min(positive))
        return Excision(rho, self._octant_fraction(p, rho))

    def scaled(self, s):
        return Box(self.l * s, self.w * s, self.h * s)

    def end_face_leads(self) -> "LeadPair":
        return LeadPair(
            [0.0, self.w / 2, self.h / 2], [self.l, self.w / 2, self.h / 2]
        )


@dataclass(frozen=True)
class Ball(Region):
    R: float
    center: tuple = (0.0, 0.0, 0.0)

    def __post_init__(self):
        if not np.isfinite(self.R) or self.R <= 0:
            raise InputError(f"ball radius must be positive, got {self.R}")
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))

    @property
    def volume(self) -> float:
        return 4.0 / 3.0 * math.pi * self.R**3

    @property
    def c(self) -> np.ndarray:
        return np.asarray(self.center)

    def bounds(self):
        return self.c - self.R, self.c + self.R

    def contains(self, pts):
        pts = np.atleast_2d(pts)
        return np.sum((pts - self.c) ** 2, axis=-1) <= (self.R * (1 + _EDGE)) ** 2

    def sample_uniform(self, rng, n):
        v = rng.standard_normal((n, 3))
        v /= np.linalg.norm(v, axis=1, keepdims=True)
        r = self.R * rng.random(n) ** (1.0 / 3.0)
        return self.c + v * r[:, None]

    def excision(self, p, tolerance):
        dist = float(np.linalg.norm(np.asarray(p, dtype=float) - self.c))
        gap = self.R - dist
        if gap > _EDGE * self.R:
            return Excision(gap, 1.0)
        if gap < -_EDGE * self.R:
            return Excision(0.0, 0.0)
        # lead on the sphere: half-ball with the tangent-plane approximation;
        # exact value is pi rho^2 (1 - rho/(3R)), so the error is pi rho^3/(3R)
        rho = 0.1 * tolerance * self.R
        return Excision(rho, 0.5, math.pi * rho**3 / (3.0 * self.R))

    def scaled(self, s):
        return Ball(self.R * s, tuple(s * c for c in self.center))


@dataclass(frozen=True, eq=False)
class VoxelGrid(Region):
    """Union of occupied cubic voxels; voxel (i, j, k) spans origin + [i, i+1) * spacing, etc."""

    spacing: float
    mask: np.ndarray
    origin: tuple = (0.0, 0.0, 0.0)

    def __post_init__(self):
        mask = np.asarray(self.mask, dtype=bool)
        if mask.ndim != 3:
            raise InputError("voxel occupancy mask must be three-dimensional")
        if not np.isfinite(self.spacing) or self.spacing <= 0:
            raise InputError(f"voxel spacing must be positive, got {self.spacing}")
        if not mask.any():
            raise InputError("voxel grid has no occupied voxels (zero volume)")
        object.__setattr__(self, "mask", mask)
        object.__setattr__(self, "origin", tuple(float(o) for o in self.origin))

    @property
    def volume(self) -> float:
        return float(self.mask.sum()) * self.spacing**3

    @property
    def o(self) -> np.ndarray:
        return np.asarray(self.origin)

    def bounds(self):
        return self.o, self.o + np.array(self.mask.shape) * self.spacing

    def voxel_boxes(self) -> tuple[np.ndarray, np.ndarray]:
        """Lower corners (N, 3) of occupied voxels, and their flat indices in C order."""
        idx = np.argwhere(self.mask)
        flat = np.ravel_multi_index(idx.T, self.mask.shape)
        return self.o + idx * self.spacing, flat

    def contains(self, pts):
        pts = np.atleast_2d(pts)
        ijk = np.floor((pts - self.o) / self.spacing).astype(np.int64)
        shape = np.array(self.mask.shape)
        ok = np.all((ijk >= 0) & (ijk < shape), axis=-1)
        out = np.zeros(len(pts), dtype=bool)
        sel = ijk[ok]
        out[ok] = self.mask[sel[:, 0], sel[:, 1], sel[:, 2]]
        # points on the far faces of the grid belong to the last voxel
        edge = ~ok & np.all((ijk >= 0) & (ijk <= shape), axis=-1)
        if edge.any():
            clipped = np.minimum(ijk[edge], shape - 1)
            out[edge] = self.mask[clipped[:, 0], clipped[:, 1], clipped[:, 2]]
        return out

    def sample_uniform(self, rng, n):
        corners, _ = self.voxel_boxes()
        pick = rng.integers(0, len(corners), n)
        return corners[pick] + rng.random((n, 3)) * self.spacing

    def excision(self, p, tolerance):
        p = np.asarray(p, dtype=float)
        u = (p - self.o) / self.spacing
        frac = u - np.floor(u)
        frac = np.where(frac > 1 - _EDGE, 0.0, frac)
        dist = np.where(frac < _EDGE, 1.0, np.minimum(frac, 1.0 - frac)) * self.spacing
        rho = float(np.min(dist))
        return Excision(rho, self._octant_fraction(p, rho))

    def scaled(self, s):
        return VoxelGrid(self.spacing * s, self.mask, tuple(s * o for o in self.origin))


@dataclass(frozen=True)
class LeadPair:
    x: np.ndarray
    xp: np.ndarray

    def __post_init__(self):
        for name in ("x", "xp"):
            v = np.asarray(getattr(self, name), dtype=float).reshape(-1)
            if v.shape != (3,) or not np.all(np.isfinite(v)):
                raise InputError(f"lead {name} must be a finite 3-vector")
            object.__setattr__(self, name, v)

    @property
    def separation(self) -> float:
        return float(np.linalg.norm(self.x - self.xp))

    def swapped(self) -> "LeadPair":
        return LeadPair(self.xp, self.x)

    def scaled(self, s: float) -> "LeadPair":
        return LeadPair(self.x * s, self.xp * s)

    def check(self, region: Region) -> None:
        """Raise if a lead is outside the region's bounding box; warn if outside the region."""
        lo, hi = region.bounds()
        slack = _EDGE * region.extent
        for name, p in (("x", self.x), ("x'", self.xp)):
            if np.any(p < lo - slack) or np.any(p > hi + slack):
                raise InputError(f"lead {name}={p.tolist()} lies outside the sample bounding box")
            if not region.contains(p)[0]:
                warnings.warn(
                    f"lead {name}={p.tolist()} lies outside the sample region",
                    ApplicabilityWarning,
                    stacklevel=3,
                )


METHODS = ("deterministic-adaptive", "monte-carlo")


@dataclass(frozen=True)
class QuadratureConfig:
    method: str = "deterministic-adaptive"
    tolerance: float = 1e-3
    budget: int = 2_000_000
    seed: int = 0

    def __post_init__(self):
        if self.method not in METHODS:
            raise InputError(f"unknown quadrature method {self.method!r}; use one of {METHODS}")
        if not 0 < self.tolerance < 0.5:
            raise InputError(f"tolerance must lie in (0, 0.5), got {self.tolerance}")
        if self.budget < 1000:
            raise InputError(f"sample budget must be at least 1000, got {self.budget}")
