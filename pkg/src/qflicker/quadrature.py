"""Adaptive tensor Gauss-Legendre cubature over hyperrectangles.

Each region is integrated with two Gauss-Legendre tensor rules of different
order; the higher-order value is kept and their difference is the error
estimate.  The region with the largest error is bisected along every axis
until the global error meets the tolerance or the evaluation budget runs out.
The final sum is taken over regions in creation order, so results do not
depend on heap ordering details.
"""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np


@dataclass(frozen=True)
class CubatureResult:
    value: float
    error: float
    n_evals: int
    converged: bool


@lru_cache(maxsize=None)
def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights on [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w


@lru_cache(maxsize=None)
def _tensor_rule(n: int, dim: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = gauss_legendre(n)
    grids = np.meshgrid(*([x] * dim), indexing="ij")
    wgrids = np.meshgrid(*([w] * dim), indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=-1)
    wts = np.prod(np.stack([g.ravel() for g in wgrids], axis=-1), axis=-1)
    return pts, wts


def _apply(f, lo, hi, n):
    pts, wts = _tensor_rule(n, lo.size)
    span = hi - lo
    vals = f(lo + pts * span)
    return float(np.dot(wts, vals) * np.prod(span))


def adaptive_cubature(
    f,
    lo,
    hi,
    *,
    rtol: float = 1e-8,
    atol: float = 0.0,
    max_evals: int = 2_000_000,
    orders: tuple[int, int] = (6, 9),
) -> CubatureResult:
    """Integrate a vectorised ``f(points[N, d]) -> values[N]`` over a box.

    ``rtol`` applies to the magnitude of the running total.  When the
    budget is spent the best estimate so far is returned with
    ``converged=False``.
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    dim = lo.size
    n_lo, n_hi = orders
    cost = n_lo**dim + n_hi**dim

    counter = itertools.count()
    values: dict[int, float] = {}
    errors: dict[int, float] = {}
    heap: list = []

    def visit(a, b):
        idx = next(counter)
        v_hi = _apply(f, a, b, n_hi)
        v_lo = _apply(f, a, b, n_lo)
        values[idx] = v_hi
        errors[idx] = abs(v_hi - v_lo)
        heapq.heappush(heap, (-errors[idx], idx, a, b))
        return values[idx], errors[idx]

    visit(lo, hi)
    n_evals = cost
    total = values[0]
    err = errors[0]
    split = 2**dim
    while err > max(atol, rtol * abs(total)):
        if n_evals + split * cost > max_evals:
            break
        _, idx, a, b = heapq.heappop(heap)
        total -= values.pop(idx)
        err -= errors.pop(idx)
        mid = 0.5 * (a + b)
        for corner in itertools.product((0, 1), repeat=dim):
            c = np.array(corner, dtype=bool)
            v, e = visit(np.where(c, mid, a), np.where(c, b, mid))
            total += v
            err += e
        n_evals += split * cost

    total = math.fsum(values[k] for k in sorted(values))
    err = math.fsum(errors.values())
    return CubatureResult(total, err, n_evals, err <= max(atol, rtol * abs(total)))


def adaptive_quad(f, a: float, b: float, **kw) -> CubatureResult:
    """One-dimensional convenience wrapper around :func:`adaptive_cubature`."""

    def g(pts):
        return f(pts[:, 0])

    kw.setdefault("orders", (10, 15))
    return adaptive_cubature(g, [a], [b], **kw)
