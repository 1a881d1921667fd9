"""Transforms on the ball and Slepian-basis representation.

The Fourier-Laguerre analysis/synthesis pair here is exact for band-limited
signals: the radial rule is Gauss-Laguerre with the integrand rewritten as
e^{-r} * [e^{r} f(r) K_p(r) r^2] (a weight-times-polynomial product of
degree <= 2P), the angular rule is Gauss-Legendre in cos(theta) times a
uniform phi grid.  Quadrature exactness is bookkept at grid construction,
not assumed.

Slepian projection: for a band-limited signal h with coefficient vector
h_band and a concentration eigenbasis {f^alpha}, the Slepian coefficients
are h_alpha = <h_band, f^alpha>; truncating the expansion at the Shannon
number keeps a fraction Q(J) of the region energy, with

    Q(J) = sum_{alpha<=J} lam_alpha |h_alpha|^2
         / sum_alpha     lam_alpha |h_alpha|^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import specfun
from .eigen import EigenResult, HarmonicCoeffs
from .kernels import FourierBesselBand, FourierLaguerreBand, fb_k_weights
from .regions import BallPoint


@dataclass(frozen=True)
class SpatialGrid:
    """Separable ball grid: radial nodes x (theta x phi) angular grid.

    radial_weights integrate f -> int f(r) r^2 dr over the radial support;
    angular_weights integrate over solid angle.  `radial_exact_degree` and
    `angular_band` record what the rules are exact for; constructors check
    the declared band against them.
    """

    radial_nodes: np.ndarray
    radial_weights: np.ndarray
    theta_nodes: np.ndarray
    phi_nodes: np.ndarray
    angular_weights: np.ndarray   # per (theta, phi) pixel, flattened C-order
    radial_exact_degree: int      # exact for e^{-r} poly(deg) r^2 integrands
    angular_band: int             # exact for harmonic products below this L

    @property
    def n_points(self) -> int:
        return self.radial_nodes.size * self.theta_nodes.size * self.phi_nodes.size

    def angular_points(self) -> tuple[np.ndarray, np.ndarray]:
        T, P = np.meshgrid(self.theta_nodes, self.phi_nodes, indexing="ij")
        return T.ravel(), P.ravel()


def analysis_grid(band: FourierLaguerreBand, radial_margin: int = 8) -> SpatialGrid:
    """Exact analysis grid for the given band.

    Radial: Gauss-Laguerre with ceil((2P+1)/2) + margin nodes (the product
    K_p K_q r^2 e^{r} is a polynomial of degree 2P, integrated exactly).
    Angular: L Gauss-Legendre colatitudes x 2L azimuths.
    """
    P, L = band.P, band.L
    n_r = math.ceil((2 * P + 1) / 2) + radial_margin
    rule = specfun.gauss_laguerre_rule(n_r)
    r = rule.nodes
    # weights for int f r^2 dr = sum w_i e^{r_i} r_i^2 f(r_i)
    rw = rule.weights * np.exp(r) * r ** 2
    exact_deg = 2 * n_r - 1 - 2   # degree of poly part after the r^2 factor
    if exact_deg < 2 * (P - 1):
        raise ValueError("radial rule too small for the band")
    x, w = np.polynomial.legendre.leggauss(L)
    theta = np.arccos(x[::-1])
    wt = w[::-1]
    n_phi = 2 * L
    phi = 2.0 * math.pi * np.arange(n_phi) / n_phi
    ang_w = np.repeat(wt[:, None], n_phi, axis=1) * (2.0 * math.pi / n_phi)
    return SpatialGrid(r, rw, theta, phi, ang_w.ravel(), exact_deg, L)


def region_energy_grid(region, band) -> SpatialGrid:
    """Grid whose weighted sums give int_R |f|^2 dv for band-limited f.

    Works for ProductSymmetric regions: Gauss-Legendre radial rule on
    [R1, R2], Gauss-Legendre-in-cos(theta) on the colatitude band, uniform
    phi.
    """
    from .regions import ProductSymmetric
    if not isinstance(region, ProductSymmetric) or region.orientation is not None:
        raise TypeError("energy grids are built for unrotated ProductSymmetric regions")
    if isinstance(band, FourierLaguerreBand):
        n_r = 2 * band.P + 16
    else:
        n_r = max(64, math.ceil(4.0 * band.K * region.R2 / math.pi) + 32)
    L = band.L
    rule = specfun.gauss_legendre_rule(n_r, region.R1, region.R2)
    rw = rule.weights * rule.nodes ** 2
    x1, x2 = math.cos(region.theta1), math.cos(region.theta2)
    xs, ws = np.polynomial.legendre.leggauss(L)
    mid, half = 0.5 * (x1 + x2), 0.5 * (x1 - x2)
    theta = np.arccos((mid + half * xs)[::-1])
    wt = (half * ws)[::-1]
    n_phi = 2 * L
    phi = 2.0 * math.pi * np.arange(n_phi) / n_phi
    ang_w = np.repeat(wt[:, None], n_phi, axis=1) * (2.0 * math.pi / n_phi)
    return SpatialGrid(rule.nodes, rw, theta, phi, ang_w.ravel(), 2 * n_r - 3, L)


# ---------------------------------------------------------------------------
# Fourier-Laguerre synthesis / analysis
# ---------------------------------------------------------------------------

def _points_arrays(points) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    if isinstance(points, np.ndarray):
        pts = np.atleast_2d(points)
        return pts[:, 0], pts[:, 1], pts[:, 2]
    r = np.array([p.r for p in points])
    th = np.array([p.theta for p in points])
    ph = np.array([p.phi for p in points])
    return r, th, ph


def synthesis_fl(coeffs: HarmonicCoeffs, points) -> np.ndarray:
    """Evaluate f(r) = sum f_{lmp} K_p(r) Y_{lm}(theta, phi) at points.

    `points` is a list of BallPoint or an (N, 3) array of (r, theta, phi).
    """
    band = coeffs.band
    if not isinstance(band, FourierLaguerreBand):
        raise TypeError("synthesis_fl needs Fourier-Laguerre coefficients")
    r, th, ph = _points_arrays(points)
    P, L = band.P, band.L
    C = coeffs.values.reshape(L * L, P)
    Kt = specfun.laguerre_K_table(P - 1, r)           # (P, N)
    Y = specfun.sph_harm_matrix(L, th, ph)            # (L^2, N)
    return np.einsum("qn,qn->n", Y, C @ Kt)


def synthesis_fl_grid(coeffs: HarmonicCoeffs, grid: SpatialGrid) -> np.ndarray:
    """Synthesis on a separable grid; returns (n_r, n_theta, n_phi) values."""
    band = coeffs.band
    P, L = band.P, band.L
    if grid.angular_band < L:
        raise ValueError("grid angular band below coefficient band")
    C = coeffs.values.reshape(L * L, P)
    Kt = specfun.laguerre_K_table(P - 1, grid.radial_nodes)   # (P, n_r)
    th, ph = grid.angular_points()
    Y = specfun.sph_harm_matrix(L, th, ph)                    # (L^2, n_ang)
    vals = Y.T @ (C @ Kt)                                     # (n_ang, n_r)
    n_t, n_p = grid.theta_nodes.size, grid.phi_nodes.size
    return np.moveaxis(vals.reshape(n_t, n_p, grid.radial_nodes.size), 2, 0)


def analysis_fl(values: np.ndarray, grid: SpatialGrid,
                band: FourierLaguerreBand) -> HarmonicCoeffs:
    """Fourier-Laguerre coefficients f_{lmp} = <f, K_p Y_lm> from grid samples.

    Exact when `values` samples a signal band-limited within `band` and the
    grid's exactness covers it.
    """
    P, L = band.P, band.L
    if grid.angular_band < L:
        raise ValueError(f"grid angular band {grid.angular_band} below L={L}")
    if grid.radial_exact_degree < 2 * (P - 1):
        raise ValueError("grid radial rule is not exact for this band")
    n_r = grid.radial_nodes.size
    vals = np.asarray(values, dtype=complex).reshape(n_r, -1)
    th, ph = grid.angular_points()
    Y = specfun.sph_harm_matrix(L, th, ph)
    ang = (Y.conj() * grid.angular_weights) @ vals.T          # (L^2, n_r)
    Kt = specfun.laguerre_K_table(P - 1, grid.radial_nodes)   # (P, n_r)
    C = ang @ (Kt * grid.radial_weights).T                    # (L^2, P)
    return HarmonicCoeffs(C.reshape(-1), band)


# ---------------------------------------------------------------------------
# Fourier-Bessel synthesis
# ---------------------------------------------------------------------------

def synthesis_fb(coeffs: HarmonicCoeffs, points) -> np.ndarray:
    """Riemann-sum synthesis of discretized Fourier-Bessel coefficients.

    f(r) = sum_{l,m,n} w_n f_{lm}(k_n) X_{lm}(k_n, r), with the same k
    weights used in kernel symmetrization so energy identities transfer to
    the discrete setting.
    """
    band = coeffs.band
    if not isinstance(band, FourierBesselBand):
        raise TypeError("synthesis_fb needs Fourier-Bessel coefficients")
    r, th, ph = _points_arrays(points)
    L, M = band.L, band.M
    ks = band.k_samples
    w = fb_k_weights(band)
    C = coeffs.values.reshape(L * L, M) * w                   # fold weights in
    kr = np.multiply.outer(ks, r)                             # (M, N)
    from scipy.special import spherical_jn
    out = np.zeros(r.size, dtype=complex)
    Y = specfun.sph_harm_matrix(L, th, ph)                    # (L^2, N)
    pref = math.sqrt(2.0 / math.pi)
    for l in range(L):
        Jl = spherical_jn(l, kr) * ks[:, None]                # (M, N)
        rad = C[l * l:(l + 1) * (l + 1), :] @ Jl              # (2l+1, N)
        out += pref * np.einsum("qn,qn->n", Y[l * l:(l + 1) * (l + 1), :], rad)
    return out


# ---------------------------------------------------------------------------
# Slepian representation
# ---------------------------------------------------------------------------

def slepian_coeffs(h: HarmonicCoeffs, basis: EigenResult,
                   count: int | None = None) -> np.ndarray:
    """Slepian coefficients h_alpha = <h, f^alpha> in coefficient space."""
    if h.band != basis.band:
        raise ValueError("signal and basis bands differ")
    return basis.project(h.values, count)


def truncate_reconstruct(h_alpha: np.ndarray, basis: EigenResult,
                         J: int) -> HarmonicCoeffs:
    """Band coefficients of the rank-J truncated Slepian expansion."""
    h_alpha = np.asarray(h_alpha)
    if J < 0 or J > h_alpha.size:
        raise ValueError(f"truncation rank {J} out of range 0..{h_alpha.size}")
    vec = np.zeros(basis.band.size, dtype=complex)
    if J > 0:
        F = basis.vectors(J)
        vec = F @ h_alpha[:J]
    return HarmonicCoeffs(vec, basis.band)


def quality_measure(h_alpha: np.ndarray, basis: EigenResult, J: int) -> float:
    """Region-energy fraction Q(J) captured by the rank-J truncation."""
    h_alpha = np.asarray(h_alpha)
    if J < 0 or J > h_alpha.size:
        raise ValueError(f"truncation rank {J} out of range 0..{h_alpha.size}")
    lam = basis.eigenvalues[:h_alpha.size]
    weights = lam * np.abs(h_alpha) ** 2
    denom = float(weights.sum())
    if denom < 1e-30:
        raise ZeroDivisionError("signal carries no energy inside the region")
    return float(weights[:J].sum()) / denom
