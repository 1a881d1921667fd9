"""Slepian spatial-spectral concentration on the three-dimensional ball."""

from .eigen import (EigenResult, HarmonicCoeffs, angular_shannon,
                    rotate_eigenfunction, shannon_fb, shannon_fl, solve_fb,
                    solve_fl, space_limit)
from .kernels import (C_kernel, E_matrix, FourierBesselBand,
                      FourierLaguerreBand, G_mask_matrix, G_matrix,
                      KernelMatrix, fb_k_weights, kernel_fb_fixed_order,
                      kernel_fl_entry, kernel_fl_mask)
from .regions import (AngularMask, AzimuthallySymmetric, BallPoint,
                      ProductMask, ProductSymmetric, RegionUnion, contains,
                      full_ball, solid_angle, volume)
from .specfun import (QuadratureRule, gauss_laguerre_rule, gauss_legendre_rule,
                      laguerre_K, radial_moment_integral, spherical_bessel_j,
                      spherical_harmonic, wigner_3j, wigner_d_beta)
from .transforms import (SpatialGrid, analysis_fl, analysis_grid,
                         quality_measure, region_energy_grid, slepian_coeffs,
                         synthesis_fb, synthesis_fl, synthesis_fl_grid,
                         truncate_reconstruct)

__all__ = [
    "AngularMask", "AzimuthallySymmetric", "BallPoint", "C_kernel",
    "E_matrix", "EigenResult", "FourierBesselBand", "FourierLaguerreBand",
    "G_mask_matrix", "G_matrix", "HarmonicCoeffs", "KernelMatrix",
    "ProductMask", "ProductSymmetric", "QuadratureRule", "RegionUnion",
    "SpatialGrid", "analysis_fl", "analysis_grid", "angular_shannon",
    "contains", "fb_k_weights", "full_ball", "gauss_laguerre_rule",
    "gauss_legendre_rule", "kernel_fb_fixed_order", "kernel_fl_entry",
    "kernel_fl_mask", "laguerre_K", "quality_measure",
    "radial_moment_integral", "region_energy_grid", "rotate_eigenfunction",
    "shannon_fb", "shannon_fl", "slepian_coeffs", "solid_angle", "solve_fb",
    "solve_fl", "space_limit", "spherical_bessel_j", "spherical_harmonic",
    "synthesis_fb", "synthesis_fl", "synthesis_fl_grid",
    "truncate_reconstruct", "volume", "wigner_3j", "wigner_d_beta",
]

__version__ = "0.1.0"
