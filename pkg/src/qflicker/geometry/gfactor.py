"""The geometric factor: volume average of the inverse distances to the two leads.

    g = (1/Omega) * integral over the sample of (1/|r - x| + 1/|r - x'|) d^3 r

Two numerical backends are provided.  Both treat the 1/|r - lead| singularity
explicitly instead of relying on sample points never landing on a lead.

``deterministic-adaptive``
    Works in lead-centred spherical coordinates, where the volume element
    r^2 dr cancels the singularity and the radial integral is done in closed
    form (or with fixed Gauss nodes when a weight is present).  A box is cut
    at the lead into corner-anchored sub-boxes, each of which splits into
    three pyramids with apex at the lead; the remaining two angular
    coordinates are integrated adaptively.  Balls use polar angles about the
    lead.  Voxel grids treat voxels touching a lead this way and all other
    voxels with low-order product rules, widening the exact zone until the
    tolerance is met.

``monte-carlo``
    Removes a ball around each lead whose overlap with the region is known in
    closed form, adds its contribution analytically (or by 1/r^2 importance
    sampling when a weight is present), and samples the now bounded remainder
    uniformly.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import partial
from typing import Callable, Optional, Union

import numpy as np

from ..errors import ApplicabilityWarning, ConvergenceWarning, InputError
from ..quadrature import CubatureResult, adaptive_cubature, gauss_legendre
from ..quantities import INVERSE_LENGTH, LENGTH, Quantity, as_cgs
from .regions import Ball, Box, LeadPair, QuadratureConfig, Region, VoxelGrid

Weight = Union[None, Callable[[np.ndarray], np.ndarray], np.ndarray]

_RADIAL_NODES = 8
_MC_BATCH = 1 << 18
_MC_SIGMAS = 3.0  # reported error = 3 standard errors


@dataclass(frozen=True)
class KernelResult:
    """Integral of weight(r) * (1/|r-x| + 1/|r-x'|) over the region."""

    value: float
    error: float
    converged: bool
    n_evals: int
    method: str


@dataclass(frozen=True)
class GFactorResult:
    value: float  # 1/cm
    error: float
    converged: bool
    n_evals: int
    method: str

    @property
    def quantity(self) -> Quantity:
        return Quantity(self.value, INVERSE_LENGTH)

    @property
    def relative_error(self) -> float:
        return self.error / abs(self.value) if self.value else math.inf


def g_factor_analytic(box, w=None, *, cutoff=None) -> Quantity:
    """Slab estimate (2/l) ln(l/cutoff) for leads on the two end faces.

    ``box`` may be a :class:`Box` or the length ``l`` (with ``w`` given).
    The lower cutoff of the 1/x integral defaults to the width.  A warning is
    issued unless h <= w <= l/10.
    """
    if isinstance(box, Box):
        l, w_, h = box.l, box.w, box.h
    else:
        l, w_, h = as_cgs(box, LENGTH, "l"), as_cgs(w, LENGTH, "w"), None
        if w_ is None:
            raise InputError("width is required when l is given as a number")
        if l <= 0 or w_ <= 0:
            raise InputError(f"l and w must be positive, got l={l}, w={w_}")
        if w_ > l:
            l, w_ = w_, l
    c = w_ if cutoff is None else as_cgs(cutoff, LENGTH, "cutoff")
    if c <= 0:
        raise InputError(f"cutoff must be positive, got {c}")
    if (h is not None and h > w_) or w_ > l / 10.0:
        warnings.warn(
            f"slab formula assumes h <= w << l; got l={l:.4g}, w={w_:.4g}, h={h}",
            ApplicabilityWarning,
            stacklevel=2,
        )
    return Quantity(2.0 / l * math.log(l / c), INVERSE_LENGTH)


# -- deterministic backend ---------------------------------------------------


def _pyramid(p, signs, a, k, weight, rtol, atol, max_evals) -> CubatureResult:
    j1, j2 = [j for j in range(3) if j != k]
    A = a[k]
    S, T = math.asinh(a[j1] / A), math.asinh(a[j2] / A)
    tn, tw = gauss_legendre(_RADIAL_NODES)

    def integrand(pts):
        u, v = np.sinh(pts[:, 0]), np.sinh(pts[:, 1])
        base = A * A * np.cosh(pts[:, 0]) * np.cosh(pts[:, 1]) / np.sqrt(1.0 + u * u + v * v)
        if weight is None:
            return 0.5 * base
        offs = np.zeros((len(u), 3))
        offs[:, k] = A
        offs[:, j1] = A * u
        offs[:, j2] = A * v
        offs *= signs
        r = p + tn[None, :, None] * offs[:, None, :]
        fv = weight(r.reshape(-1, 3)).reshape(len(u), _RADIAL_NODES)
        return base * (fv @ (tw * tn))

    return adaptive_cubature(
        integrand, [0.0, 0.0], [S, T], rtol=rtol, atol=atol, max_evals=max_evals
    )


def _sum_pieces(pieces, rtol, max_evals) -> CubatureResult:
    """Integrate a list of ``piece(rtol, atol, max_evals)`` and add them up.

    A single-rule pass first sizes the total, so pieces that are (nearly)
    zero get an absolute tolerance instead of chasing a relative one.  The
    budget is shared out evenly; each piece still gets at least one rule pass.
    """
    sizing = [piece(rtol, 0.0, 0) for piece in pieces]
    rough = math.fsum(abs(r.value) for r in sizing)
    atol = 0.5 * rtol * rough / max(len(pieces), 1)
    spent = sum(r.n_evals for r in sizing)
    share = max((max_evals - spent) // max(len(pieces), 1), 0)
    vals, errs, n, conv = [], [], spent, True
    for piece in pieces:
        res = piece(rtol, atol, share)
        vals.append(res.value)
        errs.append(res.error)
        n += res.n_evals
        conv &= res.converged
    return CubatureResult(math.fsum(vals), math.fsum(errs), n, conv)


def _box_lead_integral(lo, hi, p, weight, rtol, max_evals, slack) -> CubatureResult:
    """Integral of weight(r)/|r - p| over the box [lo, hi]."""
    lo, hi, p = (np.asarray(v, dtype=float) for v in (lo, hi, p))
    inside = np.all(p >= lo - slack) and np.all(p <= hi + slack)
    if not inside:
        def integrand(pts):
            d = np.linalg.norm(pts - p, axis=1)
            return (1.0 if weight is None else weight(pts)) / d

        return adaptive_cubature(
            integrand, lo, hi, rtol=rtol, max_evals=max_evals, orders=(4, 6)
        )

    p = np.clip(p, lo, hi)
    per_axis = []
    for i in range(3):
        segs = [(s, ln) for s, ln in ((-1.0, p[i] - lo[i]), (1.0, hi[i] - p[i])) if ln > slack]
        per_axis.append(segs)
    pieces = [
        (np.array([sx, sy, sz]), np.array([ax, ay, az]))
        for sx, ax in per_axis[0]
        for sy, ay in per_axis[1]
        for sz, az in per_axis[2]
    ]
    pyramids = [
        partial(_pyramid, p, signs, a, k, weight) for signs, a in pieces for k in range(3)
    ]
    return _sum_pieces(pyramids, rtol, max_evals)


def _ball_lead_integral(ball: Ball, p, weight, rtol, max_evals) -> CubatureResult:
    p = np.asarray(p, dtype=float)
    d = p - ball.c
    dn = float(np.linalg.norm(d))
    R = ball.R
    e3 = d / dn if dn > 0 else np.array([0.0, 0.0, 1.0])
    helper = np.array([1.0, 0.0, 0.0]) if abs(e3[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    e1 = np.cross(e3, helper)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(e3, e1)

    def chord(mu):
        b = dn * mu
        disc = b * b - dn * dn + R * R
        root = np.sqrt(np.maximum(disc, 0.0))
        s1 = np.maximum(-b - root, 0.0)
        s2 = np.maximum(-b + root, 0.0)
        hit = disc > 0
        return np.where(hit, s1, 0.0), np.where(hit, s2, 0.0)

    breaks = {-1.0, 0.0, 1.0}
    if dn > R:
        breaks.add(-math.sqrt(1.0 - (R / dn) ** 2))
    breaks = sorted(breaks)
    rn, rw = gauss_legendre(_RADIAL_NODES)

    def radial_integrand(pts):
        s1, s2 = chord(pts[:, 0])
        return math.pi * (s2 * s2 - s1 * s1)

    def weighted_integrand(pts):
        mu, phi = pts[:, 0], pts[:, 1]
        st = np.sqrt(np.maximum(1.0 - mu * mu, 0.0))
        omega = (
            mu[:, None] * e3
            + (st * np.cos(phi))[:, None] * e1
            + (st * np.sin(phi))[:, None] * e2
        )
        s1, s2 = chord(mu)
        r = s1[:, None] + (s2 - s1)[:, None] * rn[None, :]
        pts3 = p + r[:, :, None] * omega[:, None, :]
        fv = weight(pts3.reshape(-1, 3)).reshape(r.shape)
        return (s2 - s1) * np.sum(rw * r * fv, axis=1)

    def segment(m0, m1, rtol, atol, max_evals):
        if weight is None:
            return adaptive_cubature(
                radial_integrand, [m0], [m1], rtol=rtol, atol=atol,
                max_evals=max_evals, orders=(10, 15),
            )
        return adaptive_cubature(
            weighted_integrand, [m0, 0.0], [m1, 2 * math.pi], rtol=rtol, atol=atol,
            max_evals=max_evals,
        )

    segments = [partial(segment, m0, m1) for m0, m1 in zip(breaks[:-1], breaks[1:])]
    return _sum_pieces(segments, rtol, max_evals)


def voxel_kernels(grid: VoxelGrid, points, rtol: float, max_evals: int, weight=None):
    """Per-voxel integrals of sum_p weight(r)/|r - p| over each occupied voxel.

    Returns (values[N], total error, evaluations, converged), in the order of
    :meth:`VoxelGrid.voxel_boxes`.
    """
    corners, _ = grid.voxel_boxes()
    s = grid.spacing
    centers = corners + 0.5 * s
    n_vox = len(corners)
    x2, w2 = gauss_legendre(2)
    x3, w3 = gauss_legendre(3)

    def product_rule(nodes, wts, p):
        g = np.stack(np.meshgrid(nodes, nodes, nodes, indexing="ij"), -1).reshape(-1, 3)
        ww = np.prod(np.stack(np.meshgrid(wts, wts, wts, indexing="ij"), -1).reshape(-1, 3), axis=1)
        pts = corners[:, None, :] + g[None] * s
        fv = 1.0 if weight is None else weight(pts.reshape(-1, 3)).reshape(n_vox, -1)
        return s**3 * np.sum(ww * fv / np.linalg.norm(pts - p, axis=-1), axis=1)

    far_val = np.zeros(n_vox)
    far_err = np.zeros(n_vox)
    gaps = []
    for p in points:
        hi_order = product_rule(x3, w3, p)
        far_val += hi_order
        far_err += np.abs(hi_order - product_rule(x2, w2, p))
        gaps.append(np.linalg.norm(np.maximum(np.maximum(corners - p, p - (corners + s)), 0.0), axis=1))
    gap = np.min(np.stack(gaps), axis=0)

    exact = {}
    n_evals = 27 * n_vox * len(points)
    reach = 1.0
    budget_each = max(max_evals // max(8 * len(points), 1), 0)
    while True:
        near = np.flatnonzero(gap < reach * s)
        for i in near:
            if i in exact:
                continue
            tot, err = 0.0, 0.0
            for p in points:
                res = _box_lead_integral(corners[i], corners[i] + s, p, weight, rtol, budget_each, 1e-12 * s)
                tot += res.value
                err += res.error
                n_evals += res.n_evals
            exact[i] = (tot, err)
        vals = far_val.copy()
        errs = far_err.copy()
        for i, (v, e) in exact.items():
            vals[i], errs[i] = v, e
        total_err = float(np.sum(errs))
        ok = total_err <= rtol * abs(float(np.sum(vals)))
        if ok or len(exact) == n_vox or n_evals >= max_evals:
            return vals, total_err, n_evals, ok
        reach *= 2.0


def _lead_order(leads: LeadPair) -> list[np.ndarray]:
    # fixed order so g(x, x') and g(x', x) are computed bit-identically
    return sorted([leads.x, leads.xp], key=lambda v: tuple(v))


def _deterministic(region, leads, weight, cfg) -> KernelResult:
    pts = _lead_order(leads)
    tol, budget = cfg.tolerance, cfg.budget
    if isinstance(region, VoxelGrid):
        w_arr = None
        if isinstance(weight, np.ndarray):
            # per-voxel constants: integrate the bare kernel per voxel, then weight
            w_arr, weight = weight, None
        vals, err, n, ok = voxel_kernels(region, pts, tol, budget, weight)
        if w_arr is not None:
            _, flat = region.voxel_boxes()
            wv = w_arr.reshape(-1)[flat]
            return KernelResult(
                math.fsum(wv * vals), err * float(np.max(np.abs(wv))), ok, n, cfg.method
            )
        return KernelResult(math.fsum(vals), err, ok, n, cfg.method)
    if isinstance(weight, np.ndarray):
        raise InputError("per-voxel weights require a VoxelGrid region")
    results = []
    for p in pts:
        if isinstance(region, Box):
            lo, hi = region.bounds()
            res = _box_lead_integral(lo, hi, p, weight, tol, budget // 2, 1e-12 * region.l)
        elif isinstance(region, Ball):
            res = _ball_lead_integral(region, p, weight, tol, budget // 2)
        else:
            raise InputError(f"unsupported region type {type(region).__name__}")
        results.append(res)
    value = math.fsum(r.value for r in results)
    return KernelResult(
        value,
        math.fsum(r.error for r in results),
        all(r.converged for r in results),
        sum(r.n_evals for r in results),
        cfg.method,
    )


# -- Monte Carlo backend -----------------------------------------------------


class _Moments:
    """Streaming mean/variance (Chan et al. pairwise merge)."""

    def __init__(self):
        self.n, self.mean, self.m2 = 0, 0.0, 0.0

    def add(self, x: np.ndarray) -> None:
        nb = x.size
        if nb == 0:
            return
        mb = float(np.mean(x))
        m2b = float(np.sum((x - mb) ** 2))
        delta = mb - self.mean
        tot = self.n + nb
        self.mean += delta * nb / tot
        self.m2 += m2b + delta * delta * self.n * nb / tot
        self.n = tot

    @property
    def sem(self) -> float:
        if self.n < 2:
            return math.inf
        return math.sqrt(self.m2 / (self.n - 1) / self.n)


def _monte_carlo(region: Region, leads, weight, cfg) -> KernelResult:
    pts = _lead_order(leads)
    rng = np.random.default_rng(cfg.seed)
    exc = [region.excision(p, cfg.tolerance) for p in pts]
    if isinstance(weight, np.ndarray):
        if not isinstance(region, VoxelGrid):
            raise InputError("per-voxel weights require a VoxelGrid region")
        grid, table = region, weight

        def weight(r):
            ijk = np.floor((r - grid.o) / grid.spacing).astype(np.int64)
            ijk = np.clip(ijk, 0, np.array(grid.mask.shape) - 1)
            return table[ijk[:, 0], ijk[:, 1], ijk[:, 2]]

    analytic = 0.0
    approx_err = 0.0
    balls = []
    for p, e in zip(pts, exc):
        approx_err += e.approx_error
        if e.rho <= 0 or e.fraction == 0:
            continue
        if weight is None:
            analytic += e.kernel_integral
        else:
            balls.append((p, e.rho, _Moments()))

    uniform = _Moments()
    used = 0
    omega = region.volume

    def estimate():
        val = analytic + omega * uniform.mean
        var = (omega * uniform.sem) ** 2
        for _, rho, mom in balls:
            val += mom.mean
            var += mom.sem**2
        return val, _MC_SIGMAS * math.sqrt(var) + approx_err

    batch = min(_MC_BATCH, max(cfg.budget // 8, 500))
    share = 1 + len(balls)
    while True:
        n_u = batch
        r = region.sample_uniform(rng, n_u)
        acc = np.zeros(n_u)
        for p, e in zip(pts, exc):
            d = np.linalg.norm(r - p, axis=1)
            far = d > e.rho
            acc[far] += 1.0 / d[far]
        if weight is not None:
            acc *= weight(r)
        uniform.add(acc)
        used += n_u
        for p, rho, mom in balls:
            v = rng.standard_normal((batch, 3))
            v /= np.linalg.norm(v, axis=1, keepdims=True)
            rr = rho * rng.random(batch)
            q = p + v * rr[:, None]
            est = 4.0 * math.pi * rho * rr * weight(q) * region.contains(q)
            mom.add(est)
            used += batch
        val, err = estimate()
        done = uniform.n >= 2 * batch and err <= cfg.tolerance * abs(val)
        if done or used + share * batch > cfg.budget:
            return KernelResult(val, err, done, used, cfg.method)


# -- public entry points -----------------------------------------------------


def kernel_integral(
    region: Region,
    leads: LeadPair,
    weight: Weight = None,
    cfg: Optional[QuadratureConfig] = None,
) -> KernelResult:
    """Integral over the region of weight(r) * (1/|r - x| + 1/|r - x'|).

    ``weight`` is None (unit weight), a vectorised callable of points (N, 3),
    or, for voxel grids, an array of per-voxel values shaped like the mask.
    """
    cfg = cfg or QuadratureConfig()
    if region.volume <= 0:
        raise InputError("degenerate region: zero volume")
    leads.check(region)
    if cfg.method == "monte-carlo":
        res = _monte_carlo(region, leads, weight, cfg)
    else:
        res = _deterministic(region, leads, weight, cfg)
    if not res.converged:
        warnings.warn(
            f"{cfg.method} quadrature stopped at budget {cfg.budget} with relative error "
            f"{res.error / abs(res.value) if res.value else math.inf:.2e} > {cfg.tolerance:.2e}",
            ConvergenceWarning,
            stacklevel=2,
        )
    return res


def g_factor_numeric(
    region: Region, leads: LeadPair, cfg: Optional[QuadratureConfig] = None
) -> GFactorResult:
    """Geometric factor by quadrature, in 1/cm, with an error estimate."""
    res = kernel_integral(region, leads, None, cfg)
    omega = region.volume
    return GFactorResult(res.value / omega, res.error / omega, res.converged, res.n_evals, res.method)
