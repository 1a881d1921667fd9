"""Concentration eigenproblems: solve, order, normalize; Shannon numbers; duals.

Eigenfunctions are returned in spectral form (coefficient vectors over the
band's index map).  For product regions the Fourier-Laguerre problem
separates into a radial eigenproblem on E and per-order angular problems on
G^m; a combined eigenvalue is the product lam = lam_radial * lam_angular
and the eigenvector is the outer product of the factors, so the full
spectrum is available without ever forming the dense P L^2 kernel.

Eigenvalues are validated against the projection-operator bounds
[-1e-9, 1 + 1e-9] before being clamped to [0, 1]; anything outside fails
the solve.  Ordering is deterministic: lam descending, then signed order m
ascending, then radial index, then angular index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels as ker
from . import specfun
from .kernels import FourierBesselBand, FourierLaguerreBand, SpectralBand, fb_k_weights
from .regions import (AzimuthallySymmetric, ProductMask, ProductSymmetric,
                      RegionUnion)

_CLAMP_TOL = 1e-9
_SPACE_LIMIT_MIN_LAM = 1e-12


@dataclass(frozen=True)
class HarmonicCoeffs:
    """Flat complex coefficient vector over a band's index map."""

    values: np.ndarray
    band: SpectralBand

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        object.__setattr__(self, "values", v)
        if v.shape != (self.band.size,):
            raise ValueError(
                f"coefficient vector has length {v.shape}, band needs {self.band.size}")

    def norm(self) -> float:
        return float(np.linalg.norm(self.values))

    def inner(self, other: "HarmonicCoeffs") -> complex:
        if self.band != other.band:
            raise ValueError("bands differ")
        return complex(np.vdot(other.values, self.values))


@dataclass(frozen=True)
class EigenFunctionInfo:
    lam: float
    m: int | None              # fixed azimuthal order, when the problem has one
    lam_radial: float | None = None
    lam_angular: float | None = None
    block: tuple = field(default=(), repr=False)  # internal factor pointers


class EigenResult:
    """Sorted concentration spectrum plus lazily materialized eigenvectors."""

    def __init__(self, eigenvalues, infos, band, region, shannon,
                 raw_range, materialize, k_weights=None, projector=None):
        self.eigenvalues = np.asarray(eigenvalues, dtype=float)
        self.infos = list(infos)
        self.band = band
        self.region = region
        self.shannon = float(shannon)
        self.raw_eigenvalue_range = raw_range
        self._materialize = materialize
        self._projector = projector
        self.k_weights = k_weights

    def __len__(self) -> int:
        return self.eigenvalues.size

    @property
    def stored(self) -> int:
        """Number of eigenvectors that can be materialized."""
        return sum(1 for info in self.infos if info.block)

    def coeffs(self, alpha: int) -> HarmonicCoeffs:
        """Coefficient vector of the alpha-th eigenfunction (0-based rank)."""
        info = self.infos[alpha]
        if not info.block:
            raise IndexError(f"eigenvector {alpha} was not retained (keep= too small)")
        return HarmonicCoeffs(self._materialize(info), self.band)

    def vectors(self, count: int) -> np.ndarray:
        """First `count` eigenvector columns as a (band.size, count) matrix."""
        return np.column_stack([self.coeffs(a).values for a in range(count)])

    def project(self, values: np.ndarray, count: int | None = None) -> np.ndarray:
        """Inner products <values, f^alpha> for alpha = 0..count-1.

        Factored bases (product and mask regions) project the whole spectrum
        with a couple of small matrix products; block bases fall back to the
        retained eigenvectors.
        """
        values = np.asarray(values, dtype=complex)
        if count is None:
            count = len(self) if self._projector is not None else self.stored
        if self._projector is not None:
            return self._projector(values)[:count]
        return np.array([np.vdot(self.coeffs(a).values, values) for a in range(count)])


def _validate_and_clamp(raw: np.ndarray) -> tuple[np.ndarray, tuple[float, float]]:
    mn, mx = float(raw.min()), float(raw.max())
    if mn < -_CLAMP_TOL or mx > 1.0 + _CLAMP_TOL:
        raise ArithmeticError(
            f"eigenvalue outside projection bounds [-1e-9, 1+1e-9]: min={mn}, max={mx}")
    return np.clip(raw, 0.0, 1.0), (mn, mx)


def _sort_key(entry) -> tuple:
    lam, m, i_rad, i_ang = entry
    return (-lam, 0 if m is None else m, i_rad, i_ang)


def _require_base_frame(region):
    if getattr(region, "orientation", None) is not None:
        raise ValueError(
            "solvers work in the region's base frame; solve the unrotated region "
            "and apply rotate_eigenfunction for oriented results")


# ---------------------------------------------------------------------------
# Fourier-Laguerre solve
# ---------------------------------------------------------------------------

def solve_fl(region, band: FourierLaguerreBand, keep: int | None = None) -> EigenResult:
    """Concentration spectrum of the Fourier-Laguerre kernel for `region`.

    ProductSymmetric regions use the separated E / G^m subproblems
    (eigenvalues are exact products lam_radial * lam_angular); ProductMask
    regions use the E / G_mask factorization; azimuthally symmetric and
    union regions solve dense fixed-order blocks.  Orders m > 0 are
    replicated to -m.
    """
    _require_base_frame(region)
    P, L = band.P, band.L
    if isinstance(region, ProductSymmetric):
        E = ker.E_matrix(P, region.R1, region.R2)
        lam1_raw, U = np.linalg.eigh(E)
        lam1_raw, U = lam1_raw[::-1], U[:, ::-1]
        lam1, _ = _validate_and_clamp(lam1_raw)
        angular = {}
        raw_lo, raw_hi = math.inf, -math.inf
        entries = []
        for m in range(L):
            lam2_raw, V = np.linalg.eigh(
                ker.G_matrix(m, L, region.theta1, region.theta2))
            lam2_raw, V = lam2_raw[::-1], V[:, ::-1]
            lam2, _ = _validate_and_clamp(lam2_raw)
            angular[m] = (lam2, V)
            prods = np.outer(lam1_raw, lam2_raw)
            raw_lo = min(raw_lo, float(prods.min()))
            raw_hi = max(raw_hi, float(prods.max()))
            for j in range(lam2.size):
                for i in range(P):
                    lam = lam1[i] * lam2[j]
                    for ms in ((m,) if m == 0 else (-m, m)):
                        entries.append((lam, ms, i, j))
        entries.sort(key=_sort_key)
        if keep is None:
            keep = len(entries)
        infos = []
        for rank, (lam, ms, i, j) in enumerate(entries):
            lam2 = angular[abs(ms)][0][j]
            infos.append(EigenFunctionInfo(
                lam, ms, lam1[i], lam2,
                block=("prod", ms, i, j) if rank < keep else (),
            ))

        def materialize(info: EigenFunctionInfo) -> np.ndarray:
            _, ms, i, j = info.block
            m_abs = abs(ms)
            vec = np.zeros(band.size, dtype=complex)
            V = angular[m_abs][1]
            for l in range(m_abs, L):
                base = (l * l + l + ms) * P
                vec[base:base + P] = V[l - m_abs, j] * U[:, i]
            return vec

        def projector(values: np.ndarray) -> np.ndarray:
            # factors are real, so <h, f^alpha> is a plain sandwich V^T H U
            H = values.reshape(L * L, P)
            per_ms = {}
            for m in range(L):
                V = angular[m][1]
                rows = [l * l + l + m for l in range(m, L)]
                per_ms[m] = V.T @ H[rows, :] @ U
                if m > 0:
                    rows_n = [l * l + l - m for l in range(m, L)]
                    per_ms[-m] = V.T @ H[rows_n, :] @ U
            out = np.empty(len(entries), dtype=complex)
            for rank, (_, ms, i, j) in enumerate(entries):
                out[rank] = per_ms[ms][j, i]
            return out

        lams = np.array([e[0] for e in entries])
        shannon = shannon_fl(region, band)
        return EigenResult(lams, infos, band, region, shannon,
                           (raw_lo, raw_hi), materialize, projector=projector)

    if isinstance(region, ProductMask):
        fac = ker.kernel_fl_mask(band, region)
        lam1_raw, U = np.linalg.eigh(fac.E)
        lam1_raw, U = lam1_raw[::-1], U[:, ::-1]
        lam1, _ = _validate_and_clamp(lam1_raw)
        lam2_raw, V = np.linalg.eigh(fac.G_angular)
        lam2_raw, V = lam2_raw[::-1], V[:, ::-1]
        lam2, _ = _validate_and_clamp(lam2_raw)
        prods = np.outer(lam1_raw, lam2_raw)
        raw_range = (float(prods.min()), float(prods.max()))
        entries = [
            (lam1[i] * lam2[j], None, i, j)
            for j in range(lam2.size) for i in range(P)
        ]
        entries.sort(key=_sort_key)
        if keep is None:
            keep = len(entries)
        infos = [
            EigenFunctionInfo(lam, None, lam1[i], lam2[j],
                              block=("mask", i, j) if rank < keep else ())
            for rank, (lam, _, i, j) in enumerate(entries)
        ]

        def materialize(info: EigenFunctionInfo) -> np.ndarray:
            _, i, j = info.block
            return np.kron(V[:, j], U[:, i])

        def projector(values: np.ndarray) -> np.ndarray:
            # <h, kron(V_j, U_i)> = (V^H H U)[j, i] with H = values as (L^2, P)
            H = values.reshape(L * L, P)
            S = V.conj().T @ H @ U
            out = np.empty(len(entries), dtype=complex)
            for rank, (_, _, i, j) in enumerate(entries):
                out[rank] = S[j, i]
            return out

        lams = np.array([e[0] for e in entries])
        shannon = shannon_fl(region, band)
        return EigenResult(lams, infos, band, region, shannon, raw_range,
                           materialize, projector=projector)

    if isinstance(region, (AzimuthallySymmetric, RegionUnion)):
        return _solve_fl_blocks(region, band, keep)
    raise TypeError(f"unsupported region type {type(region)!r}")


def _solve_fl_blocks(region, band: FourierLaguerreBand, keep) -> EigenResult:
    """Dense fixed-order FL solve (azimuthally symmetric / union regions)."""
    P, L = band.P, band.L
    blocks = {}
    entries = []
    raw_lo, raw_hi = math.inf, -math.inf
    for m in range(L):
        km = ker.kernel_fl_fixed_order(m, band, region)
        lam_raw, W = np.linalg.eigh(km.matrix)
        lam_raw, W = lam_raw[::-1], W[:, ::-1]
        raw_lo = min(raw_lo, float(lam_raw.min()))
        raw_hi = max(raw_hi, float(lam_raw.max()))
        lam, _ = _validate_and_clamp(lam_raw)
        blocks[m] = W
        for i in range(lam.size):
            for ms in ((m,) if m == 0 else (-m, m)):
                entries.append((lam[i], ms, i, 0))
    entries.sort(key=_sort_key)
    if keep is None:
        keep = len(entries)
    infos = [
        EigenFunctionInfo(lam, ms, None, None,
                          block=("blk", ms, i) if rank < keep else ())
        for rank, (lam, ms, i, _) in enumerate(entries)
    ]

    def materialize(info: EigenFunctionInfo) -> np.ndarray:
        _, ms, i = info.block
        m_abs = abs(ms)
        W = blocks[m_abs]
        vec = np.zeros(band.size, dtype=complex)
        col = W[:, i]
        for l in range(m_abs, L):
            base = (l * l + l + ms) * P
            vec[base:base + P] = col[(l - m_abs) * P:(l - m_abs + 1) * P]
        return vec

    lams = np.array([e[0] for e in entries])
    shannon = shannon_fl(region, band)
    return EigenResult(lams, infos, band, region, shannon,
                       (raw_lo, raw_hi), materialize)


# ---------------------------------------------------------------------------
# Fourier-Bessel solve
# ---------------------------------------------------------------------------

def solve_fb(region, band: FourierBesselBand, keep: int | None = None) -> EigenResult:
    """Concentration spectrum of the discretized Fourier-Bessel kernel.

    Solves the W-symmetrized per-order blocks; eigenvector entries are
    mapped back to coefficient samples f_{lm}(k_n) through W^{-1/2}, so the
    discrete quadrature of sum_lm int |f_lm(k)|^2 dk equals one.
    """
    _require_base_frame(region)
    if not isinstance(region, (ProductSymmetric, AzimuthallySymmetric)):
        raise TypeError(
            "Fourier-Bessel solve supports ProductSymmetric or AzimuthallySymmetric "
            f"regions, got {type(region)!r}")
    L, M = band.L, band.M
    w = fb_k_weights(band)
    blocks = {}
    entries = []
    raw_lo, raw_hi = math.inf, -math.inf
    for m in range(L):
        km = ker.kernel_fb_fixed_order(m, band, region)
        lam_raw, Y = np.linalg.eigh(km.matrix)
        lam_raw, Y = lam_raw[::-1], Y[:, ::-1]
        raw_lo = min(raw_lo, float(lam_raw.min()))
        raw_hi = max(raw_hi, float(lam_raw.max()))
        lam, _ = _validate_and_clamp(lam_raw)
        if keep is not None:
            Y = Y[:, :min(Y.shape[1], keep)].copy()
        blocks[m] = Y
        for i in range(lam.size):
            for ms in ((m,) if m == 0 else (-m, m)):
                entries.append((lam[i], ms, i, 0))
    entries.sort(key=_sort_key)
    if keep is None:
        keep = len(entries)
    infos = []
    for rank, (lam, ms, i, _) in enumerate(entries):
        retained = rank < keep and i < blocks[abs(ms)].shape[1]
        infos.append(EigenFunctionInfo(
            lam, ms, None, None, block=("fb", ms, i) if retained else ()))

    sqrt_w = np.sqrt(w)

    def materialize(info: EigenFunctionInfo) -> np.ndarray:
        _, ms, i = info.block
        m_abs = abs(ms)
        col = blocks[m_abs][:, i]
        vec = np.zeros(band.size, dtype=complex)
        for l in range(m_abs, L):
            base = (l * l + l + ms) * M
            vec[base:base + M] = col[(l - m_abs) * M:(l - m_abs + 1) * M] / sqrt_w
        return vec

    lams = np.array([e[0] for e in entries])
    shannon = shannon_fb(region, band)
    return EigenResult(lams, infos, band, region, shannon,
                       (raw_lo, raw_hi), materialize, k_weights=w)


# ---------------------------------------------------------------------------
# Shannon numbers (trace integrals, no eigen-solve)
# ---------------------------------------------------------------------------

def _radial_energy_sum(P: int, R1: float, R2: float) -> float:
    """sum_p int_{R1}^{R2} K_p(r)^2 r^2 dr  (the radial Shannon number N^P)."""
    if math.isinf(R2):
        if R1 == 0.0:
            return float(P)   # orthonormality on the half line
        rule = specfun.gauss_legendre_rule(2 * P + 16, 0.0, R1)
        Kt = specfun.laguerre_K_table(P - 1, rule.nodes)
        inner = np.sum(rule.weights * rule.nodes ** 2 * Kt ** 2, axis=1)
        return float(P - inner.sum())
    rule = specfun.gauss_legendre_rule(2 * P + 16, R1, R2)
    Kt = specfun.laguerre_K_table(P - 1, rule.nodes)
    return float(np.sum(rule.weights * rule.nodes ** 2 * Kt ** 2))


def shannon_fl(region, band: FourierLaguerreBand) -> float:
    """Fourier-Laguerre Shannon number N = L^2/(4 pi) sum_p int_R K_p^2 dv."""
    P, L = band.P, band.L
    if isinstance(region, ProductSymmetric):
        omega = 2.0 * math.pi * (math.cos(region.theta1) - math.cos(region.theta2))
        return _radial_energy_sum(P, region.R1, region.R2) * L * L / (4.0 * math.pi) * omega
    if isinstance(region, ProductMask):
        return (_radial_energy_sum(P, region.R1, region.R2)
                * L * L / (4.0 * math.pi) * region.mask.solid_angle)
    if isinstance(region, RegionUnion):
        return sum(shannon_fl(m, band) for m in region.members)
    if isinstance(region, AzimuthallySymmetric):
        Kt = specfun.laguerre_K_table(P - 1, region.r_nodes)
        rad = np.sum(Kt ** 2, axis=0) * region.r_weights * region.r_nodes ** 2
        vol_int = 2.0 * math.pi * float(rad @ region.indicator @ region.theta_weights)
        return L * L / (4.0 * math.pi) * vol_int
    raise TypeError(f"unsupported region type {type(region)!r}")


def _fb_trace_radial(K: float, L: int, r: np.ndarray) -> np.ndarray:
    """sum_l (2l+1) [j_l(Kr)^2 - j_{l-1}(Kr) j_{l+1}(Kr)] at the given radii."""
    x = K * r
    J = specfun.spherical_jn_table(L, x)
    Jm1 = specfun.spherical_j_minus1(x)
    out = np.zeros_like(x)
    for l in range(L):
        lower = Jm1 if l == 0 else J[l - 1]
        out += (2 * l + 1) * (J[l] ** 2 - lower * J[l + 1])
    return out


def shannon_fb(region, band: FourierBesselBand) -> float:
    """Fourier-Bessel Shannon number from the analytic k-integrated trace.

    N = K^3/(4 pi^2) int_R dv sum_l (2l+1)(j_l(Kr)^2 - j_{l-1} j_{l+1}),
    with j_{-1}(x) = cos(x)/x supplying the l = 0 term.  No spectral
    discretization enters.
    """
    K, L = band.K, band.L
    pref = K ** 3 / (4.0 * math.pi ** 2)
    if isinstance(region, (ProductSymmetric, ProductMask)):
        R1, R2 = region.R1, region.R2
        if math.isinf(R2):
            return math.inf
        if isinstance(region, ProductSymmetric):
            omega = 2.0 * math.pi * (math.cos(region.theta1) - math.cos(region.theta2))
        else:
            omega = region.mask.solid_angle
        n = max(64, math.ceil(4.0 * K * R2 / math.pi) + 32)
        rule = specfun.gauss_legendre_rule(n, R1, R2)
        integ = np.sum(rule.weights * rule.nodes ** 2
                       * _fb_trace_radial(K, L, rule.nodes))
        return pref * omega * float(integ)
    if isinstance(region, AzimuthallySymmetric):
        rad = (_fb_trace_radial(K, L, region.r_nodes)
               * region.r_weights * region.r_nodes ** 2)
        return pref * 2.0 * math.pi * float(
            rad @ region.indicator @ region.theta_weights)
    if isinstance(region, RegionUnion):
        return sum(shannon_fb(m, band) for m in region.members)
    raise TypeError(f"unsupported region type {type(region)!r}")


def angular_shannon(L: int, theta1: float, theta2: float) -> float:
    """N_L = sum over l < L, |m| <= l of G^m_{l,l} (equals L^2/2 (cos t1 - cos t2))."""
    return ker.G_diag_sum(L, theta1, theta2)


# ---------------------------------------------------------------------------
# space-limited duals and rotation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SpaceLimited:
    """Space-limited dual g = S_R f / sqrt(lam) of a band-limited eigenfunction.

    `coeffs` holds the in-band spectral coefficients sqrt(lam) * f (valid on
    the band only; g itself is band-unlimited).  `evaluate` gives pointwise
    spatial values.
    """

    source: HarmonicCoeffs
    lam: float
    region: object

    @property
    def coeffs(self) -> HarmonicCoeffs:
        return HarmonicCoeffs(math.sqrt(self.lam) * self.source.values,
                              self.source.band)

    def evaluate(self, points) -> np.ndarray:
        from . import transforms
        from .regions import contains
        if isinstance(self.source.band, FourierLaguerreBand):
            vals = transforms.synthesis_fl(self.source, points)
        else:
            raise NotImplementedError("pointwise duals are provided for the "
                                      "Fourier-Laguerre band")
        mask = np.array([contains(self.region, p) for p in points], dtype=float)
        return vals * mask / math.sqrt(self.lam)


def space_limit(f: HarmonicCoeffs, lam: float, region) -> SpaceLimited:
    """Unit-energy space-limited dual of eigenfunction f with eigenvalue lam."""
    if lam < _SPACE_LIMIT_MIN_LAM:
        raise ValueError(f"eigenvalue {lam} below {_SPACE_LIMIT_MIN_LAM}; "
                         "the space-limited dual is not defined")
    return SpaceLimited(f, float(lam), region)


def rotate_eigenfunction(f: HarmonicCoeffs, theta0: float, phi0: float) -> HarmonicCoeffs:
    """Rotate a Fourier-Laguerre coefficient vector by R_z(phi0) R_y(theta0).

    Degree-by-degree Wigner rotation of the angular indices,
    f'_{lmp} = sum_n e^{-i m phi0} d^l_{mn}(theta0) f_{lnp}; the radial
    index is untouched.
    """
    band = f.band
    if not isinstance(band, FourierLaguerreBand):
        raise TypeError("rotation acts on Fourier-Laguerre coefficients")
    P, L = band.P, band.L
    out = np.empty_like(f.values)
    for l in range(L):
        dim = 2 * l + 1
        base = l * l * P
        block = f.values[base:base + dim * P].reshape(dim, P)
        D = np.empty((dim, dim), dtype=complex)
        for im, m in enumerate(range(-l, l + 1)):
            phase = np.exp(-1j * m * phi0)
            for i_n, n in enumerate(range(-l, l + 1)):
                D[im, i_n] = phase * specfun.wigner_d_beta(l, m, n, theta0)
        out[base:base + dim * P] = (D @ block).reshape(dim * P)
    return HarmonicCoeffs(out, band)
