"""Sample regions, the geometric factor, and momentum-space Fourier identity checks."""

from .gfactor import (
    GFactorResult,
    KernelResult,
    g_factor_analytic,
    g_factor_numeric,
    kernel_integral,
)
from .identities import fourier_identity_scalar, fourier_identity_vector
from .regions import Ball, Box, Excision, LeadPair, QuadratureConfig, Region, VoxelGrid

__all__ = [
    "Ball",
    "Box",
    "Excision",
    "GFactorResult",
    "KernelResult",
    "LeadPair",
    "QuadratureConfig",
    "Region",
    "VoxelGrid",
    "fourier_identity_scalar",
    "fourier_identity_vector",
    "g_factor_analytic",
    "g_factor_numeric",
    "kernel_integral",
]
