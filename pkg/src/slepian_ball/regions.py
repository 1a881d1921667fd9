"""Spatial concentration regions on the ball.

A region is a (measurable) subset of the ball used to build concentration
kernels.  Supported shapes:

* ProductSymmetric: radial interval x colatitude band, azimuthally
  symmetric about the z-axis, optionally rotated to a new center;
* AzimuthallySymmetric: an (r, theta) indicator sampled on a quadrature
  grid, for shapes with radial-angular coupling;
* ProductMask: arbitrary angular pixel mask x radial interval;
* RegionUnion: disjoint union of unrotated ProductSymmetric members.

Regions are closed sets (boundary points count as inside) and immutable.
Angular masks live on exact-quadrature pixel grids so kernel entries over
masks are computed by exact quadrature of band-limited integrands rather
than approximate pixel sums.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss


@dataclass(frozen=True)
class BallPoint:
    """Point on the ball in spherical coordinates (r, theta, phi)."""

    r: float
    theta: float
    phi: float

    def __post_init__(self):
        if self.r < 0:
            raise ValueError(f"radius must be >= 0, got {self.r}")
        if not (0.0 <= self.theta <= math.pi):
            raise ValueError(f"colatitude must be in [0, pi], got {self.theta}")
        if not (0.0 <= self.phi < 2.0 * math.pi):
            raise ValueError(f"azimuth must be in [0, 2pi), got {self.phi}")

    def cartesian(self) -> np.ndarray:
        st = math.sin(self.theta)
        return self.r * np.array(
            [st * math.cos(self.phi), st * math.sin(self.phi), math.cos(self.theta)]
        )


def _rotation_matrix(theta0: float, phi0: float) -> np.ndarray:
    """R_z(phi0) @ R_y(theta0): carries the +z axis to (theta0, phi0)."""
    ct, st = math.cos(theta0), math.sin(theta0)
    cp, sp = math.cos(phi0), math.sin(phi0)
    ry = np.array([[ct, 0.0, st], [0.0, 1.0, 0.0], [-st, 0.0, ct]])
    rz = np.array([[cp, -sp, 0.0], [sp, cp, 0.0], [0.0, 0.0, 1.0]])
    return rz @ ry


def _to_base_frame(point: BallPoint, orientation) -> BallPoint:
    """Map a point into the unrotated frame of an oriented region."""
    if orientation is None:
        return point
    theta0, phi0 = orientation
    xyz = _rotation_matrix(theta0, phi0).T @ point.cartesian()
    r = float(np.linalg.norm(xyz))
    if r == 0.0:
        return BallPoint(0.0, 0.0, 0.0)
    theta = math.acos(min(1.0, max(-1.0, xyz[2] / r)))
    phi = math.atan2(xyz[1], xyz[0]) % (2.0 * math.pi)
    return BallPoint(r, theta, phi)


# ---------------------------------------------------------------------------
# angular masks
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AngularMask:
    """Pixelized angular region with per-pixel quadrature weights.

    Pixels sit on a Gauss-Legendre (in cos theta) x uniform-phi grid; the
    rule integrates spherical-harmonic products up to combined degree
    2*L_grid - 2 exactly, so kernel entries over the mask are exact
    quadratures of band-limited integrands.
    """

    theta: np.ndarray       # pixel colatitudes, flat
    phi: np.ndarray         # pixel azimuths, flat
    weight: np.ndarray      # quadrature weight per pixel (solid-angle measure)
    indicator: np.ndarray   # 0/1 per pixel
    L_grid: int
    n_theta: int
    n_phi: int

    def __post_init__(self):
        for name in ("theta", "phi", "weight"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        object.__setattr__(self, "indicator", np.asarray(self.indicator, dtype=float))
        npix = self.theta.size
        if not (self.phi.size == self.weight.size == self.indicator.size == npix):
            raise ValueError("mask arrays must have equal length")
        if not np.all((self.indicator == 0.0) | (self.indicator == 1.0)):
            raise ValueError("mask indicator must be binary")
        if not np.all(self.weight > 0):
            raise ValueError("mask weights must be positive")

    @property
    def solid_angle(self) -> float:
        return float(self.weight @ self.indicator)

    @staticmethod
    def full_sphere_grid(L_grid: int, indicator=None) -> "AngularMask":
        """Sphere-wide exact grid; optional indicator(theta, phi) callable or array."""
        x, w = leggauss(L_grid)
        theta_nodes = np.arccos(x[::-1])
        w_nodes = w[::-1]
        n_phi = 2 * L_grid
        phis = 2.0 * math.pi * np.arange(n_phi) / n_phi
        T, P = np.meshgrid(theta_nodes, phis, indexing="ij")
        W = np.repeat(w_nodes[:, None], n_phi, axis=1) * (2.0 * math.pi / n_phi)
        if indicator is None:
            ind = np.ones(T.size)
        elif callable(indicator):
            ind = np.asarray(indicator(T, P), dtype=float).ravel()
        else:
            ind = np.asarray(indicator, dtype=float).ravel()
        return AngularMask(T.ravel(), P.ravel(), W.ravel(), ind,
                           L_grid, L_grid, n_phi)

    @staticmethod
    def band(theta1: float, theta2: float, L_grid: int) -> "AngularMask":
        """Colatitude band encoded as pixels, with weights exact on the band.

        Gauss-Legendre nodes in cos(theta) restricted to [cos t2, cos t1],
        so sums over the mask reproduce band integrals of harmonic products
        exactly (the band-as-mask oracle for G matrices).
        """
        if not (0.0 <= theta1 < theta2 <= math.pi):
            raise ValueError(f"need 0 <= theta1 < theta2 <= pi, got {theta1}, {theta2}")
        x, w = leggauss(L_grid)
        x1, x2 = math.cos(theta1), math.cos(theta2)
        mid, half = 0.5 * (x1 + x2), 0.5 * (x1 - x2)
        xs = mid + half * x
        ws = half * w
        theta_nodes = np.arccos(xs[::-1])
        w_nodes = ws[::-1]
        n_phi = 2 * L_grid
        phis = 2.0 * math.pi * np.arange(n_phi) / n_phi
        T, P = np.meshgrid(theta_nodes, phis, indexing="ij")
        W = np.repeat(w_nodes[:, None], n_phi, axis=1) * (2.0 * math.pi / n_phi)
        return AngularMask(T.ravel(), P.ravel(), W.ravel(), np.ones(T.size),
                           L_grid, L_grid, n_phi)

    def with_indicator(self, indicator) -> "AngularMask":
        if callable(indicator):
            ind = np.asarray(
                indicator(self.theta.reshape(self.n_theta, self.n_phi),
                          self.phi.reshape(self.n_theta, self.n_phi)),
                dtype=float,
            ).ravel()
        else:
            ind = np.asarray(indicator, dtype=float).ravel()
        return AngularMask(self.theta, self.phi, self.weight, ind,
                           self.L_grid, self.n_theta, self.n_phi)

    def nearest_pixel(self, theta: float, phi: float) -> int:
        th = self.theta.reshape(self.n_theta, self.n_phi)
        ph = self.phi.reshape(self.n_theta, self.n_phi)
        i = int(np.argmin(np.abs(th[:, 0] - theta)))
        dphi = np.abs((ph[0, :] - phi + math.pi) % (2.0 * math.pi) - math.pi)
        j = int(np.argmin(dphi))
        return i * self.n_phi + j

    def to_text(self, path):
        rows = np.column_stack([self.theta, self.phi, self.indicator])
        header = f"L_grid={self.L_grid} n_theta={self.n_theta} n_phi={self.n_phi}"
        np.savetxt(path, rows, fmt="%.17g %.17g %d", header=header)

    @staticmethod
    def from_text(path) -> "AngularMask":
        """Load a `theta phi indicator` pixel list written against a known grid.

        The grid geometry is rebuilt from the unique theta rows; pixel
        centers must match a Gauss-Legendre x uniform-phi layout, otherwise
        the weights could not be reconstructed and loading fails.
        """
        data = np.loadtxt(path)
        if data.ndim == 1:
            data = data[None, :]
        theta, phi, ind = data[:, 0], data[:, 1], data[:, 2]
        th_unique = np.unique(theta)
        ph_unique = np.unique(phi)
        n_theta, n_phi = th_unique.size, ph_unique.size
        if n_theta * n_phi != theta.size:
            raise ValueError("mask pixel list is not a full theta x phi grid")
        L_grid = n_theta
        x, w = leggauss(L_grid)
        xs = np.sort(np.cos(th_unique))
        # solve for the cos-theta interval the nodes were generated on
        span = (xs[-1] - xs[0]) / (x[-1] - x[0])
        mid = xs[0] - span * x[0]
        expect = np.sort(mid + span * x)
        if not np.allclose(expect, xs, atol=1e-9):
            raise ValueError("mask theta rows do not match a Gauss-Legendre grid")
        w_nodes = {}
        for xv, wv in zip(mid + span * x, span * w):
            w_nodes[round(math.acos(min(1.0, max(-1.0, xv))), 12)] = wv
        weight = np.array([w_nodes[round(t, 12)] for t in theta]) * (2.0 * math.pi / n_phi)
        order = np.lexsort((phi, theta))
        return AngularMask(theta[order], phi[order], weight[order], ind[order],
                           L_grid, n_theta, n_phi)


# ---------------------------------------------------------------------------
# regions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ProductSymmetric:
    """R = {R1 <= r <= R2} x {theta1 <= theta <= theta2}, all azimuths.

    orientation (theta0, phi0), when set, rotates the region so its
    symmetry axis points along (theta0, phi0).
    """

    R1: float
    R2: float
    theta1: float
    theta2: float
    orientation: tuple[float, float] | None = None

    def __post_init__(self):
        # R1 == R2 is allowed as a degenerate (measure-zero) interval
        if not (0.0 <= self.R1 <= self.R2):
            raise ValueError(f"need 0 <= R1 <= R2, got R1={self.R1}, R2={self.R2}")
        if not (0.0 <= self.theta1 < self.theta2 <= math.pi):
            raise ValueError(
                f"need 0 <= theta1 < theta2 <= pi, got {self.theta1}, {self.theta2}")


@dataclass(frozen=True)
class AzimuthallySymmetric:
    """Region with sampled (r, theta) indicator on a quadrature grid.

    r_weights integrate in dr over [r_nodes[0] neighborhood]; theta weights
    are Gauss-Legendre in cos(theta) (i.e. they integrate sin theta d theta).
    """

    r_nodes: np.ndarray
    r_weights: np.ndarray
    theta_nodes: np.ndarray
    theta_weights: np.ndarray
    indicator: np.ndarray  # shape (n_r, n_theta), binary
    orientation: tuple[float, float] | None = None

    def __post_init__(self):
        for name in ("r_nodes", "r_weights", "theta_nodes", "theta_weights"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        object.__setattr__(self, "indicator", np.asarray(self.indicator, dtype=float))
        if self.indicator.shape != (self.r_nodes.size, self.theta_nodes.size):
            raise ValueError("indicator shape must be (n_r, n_theta)")
        if not np.all((self.indicator == 0.0) | (self.indicator == 1.0)):
            raise ValueError("indicator must be binary")

    @staticmethod
    def from_indicator(fn, R1: float, R2: float, n_r: int = 64,
                       n_theta: int = 64) -> "AzimuthallySymmetric":
        """Sample indicator fn(r, theta) on a GL(r) x GL(cos theta) grid."""
        xr, wr = leggauss(n_r)
        r = 0.5 * (R2 - R1) * xr + 0.5 * (R2 + R1)
        wr = 0.5 * (R2 - R1) * wr
        xt, wt = leggauss(n_theta)
        theta = np.arccos(xt[::-1])
        wt = wt[::-1]
        Rg, Tg = np.meshgrid(r, theta, indexing="ij")
        ind = np.asarray(fn(Rg, Tg), dtype=float)
        return AzimuthallySymmetric(r, wr, theta, wt, ind)


@dataclass(frozen=True)
class ProductMask:
    """Radially independent region: angular pixel mask x radial interval."""

    mask: AngularMask
    R1: float
    R2: float

    def __post_init__(self):
        if not (0.0 <= self.R1 < self.R2):
            raise ValueError(f"need 0 <= R1 < R2, got R1={self.R1}, R2={self.R2}")


@dataclass(frozen=True)
class RegionUnion:
    """Disjoint union of unrotated ProductSymmetric members."""

    members: tuple[ProductSymmetric, ...]

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(self.members))
        if not self.members:
            raise ValueError("union needs at least one member")
        for reg in self.members:
            if not isinstance(reg, ProductSymmetric):
                raise TypeError("union members must be ProductSymmetric regions")
            if reg.orientation is not None:
                raise ValueError("union members must be unrotated")
        for i, a in enumerate(self.members):
            for b in self.members[i + 1:]:
                radial = a.R1 < b.R2 and b.R1 < a.R2
                angular = a.theta1 < b.theta2 and b.theta1 < a.theta2
                if radial and angular:
                    raise ValueError(f"union members overlap: {a} and {b}")


Region = ProductSymmetric | AzimuthallySymmetric | ProductMask | RegionUnion


def full_ball() -> ProductSymmetric:
    return ProductSymmetric(0.0, math.inf, 0.0, math.pi)


# ---------------------------------------------------------------------------
# measure queries
# ---------------------------------------------------------------------------

def solid_angle(region_or_mask) -> float:
    """Solid angle (steradians) of the angular footprint."""
    if isinstance(region_or_mask, AngularMask):
        return region_or_mask.solid_angle
    if isinstance(region_or_mask, ProductMask):
        return region_or_mask.mask.solid_angle
    if isinstance(region_or_mask, ProductSymmetric):
        return 2.0 * math.pi * (math.cos(region_or_mask.theta1)
                                - math.cos(region_or_mask.theta2))
    if isinstance(region_or_mask, RegionUnion):
        return sum(solid_angle(m) for m in region_or_mask.members)
    if isinstance(region_or_mask, AzimuthallySymmetric):
        reg = region_or_mask
        covered = (reg.indicator.max(axis=0) > 0)
        return 2.0 * math.pi * float(reg.theta_weights @ covered)
    raise TypeError(f"unsupported region type {type(region_or_mask)!r}")


def volume(region) -> float:
    """Region volume under the measure r^2 sin(theta) dr dtheta dphi."""
    if isinstance(region, ProductSymmetric):
        radial = (region.R2 ** 3 - region.R1 ** 3) / 3.0
        return radial * solid_angle(region)
    if isinstance(region, ProductMask):
        return (region.R2 ** 3 - region.R1 ** 3) / 3.0 * region.mask.solid_angle
    if isinstance(region, RegionUnion):
        return sum(volume(m) for m in region.members)
    if isinstance(region, AzimuthallySymmetric):
        reg = region
        rad = reg.r_weights * reg.r_nodes ** 2
        return 2.0 * math.pi * float(rad @ reg.indicator @ reg.theta_weights)
    raise TypeError(f"unsupported region type {type(region)!r}")


def contains(region, point: BallPoint) -> bool:
    """Closed-set membership test."""
    if isinstance(region, ProductSymmetric):
        p = _to_base_frame(point, region.orientation)
        return (region.R1 <= p.r <= region.R2
                and region.theta1 <= p.theta <= region.theta2)
    if isinstance(region, ProductMask):
        if not (region.R1 <= point.r <= region.R2):
            return False
        idx = region.mask.nearest_pixel(point.theta, point.phi)
        return bool(region.mask.indicator[idx] > 0)
    if isinstance(region, RegionUnion):
        return any(contains(m, point) for m in region.members)
    if isinstance(region, AzimuthallySymmetric):
        p = _to_base_frame(point, region.orientation)
        if not (region.r_nodes[0] - 1e-12 <= p.r <= region.r_nodes[-1] + 1e-12):
            return False
        i = int(np.argmin(np.abs(region.r_nodes - p.r)))
        j = int(np.argmin(np.abs(region.theta_nodes - p.theta)))
        return bool(region.indicator[i, j] > 0)
    raise TypeError(f"unsupported region type {type(region)!r}")
