"""Concentration-kernel assembly in the Fourier-Laguerre and Fourier-Bessel domains.

For a region R and a spectral band, the kernel entry is the inner product of
two band basis functions restricted to R.  For product regions the entries
factor into a radial coupling times an angular coupling:

* Fourier-Laguerre:  K_{lmp,l'm'p'} = delta_{mm'} E_{p,p'} G^m_{l,l'}
* Fourier-Bessel:    K_{lm,l'm'}(k,k') = delta_{mm'} C_{l,l'}(k,k') G^m_{l,l'}

with

    E_{p,p'}        = int_{R1}^{R2} r^2 K_p(r) K_{p'}(r) dr
    G^m_{l,l'}      = 2 pi int_{t1}^{t2} sin(t) Ybar_{lm}(t) Ybar_{l'm}(t) dt
    C_{l,l'}(k,k')  = (2/pi) k k' int_{R1}^{R2} r^2 j_l(kr) j_{l'}(k'r) dr.

E has an exact expression through truncated exponential moments, G through
Wigner-3j sums and Legendre differences, and C has closed forms on l = l'
(both k = k' and k != k').  Every analytic path here is mirrored by a plain
quadrature oracle in the test suite.

The continuous Fourier-Bessel spectrum is discretized on uniform samples
k_n = n K / M; quadrature in k uses trapezoid weights (the k = 0 node
carries an identically zero integrand, so the composite trapezoid rule on
[0, K] reduces to weight dk on interior samples and dk/2 at k = K).  A
plain uniform weight dk would bias the spectrum sum at first order in dk
and fail the discretization-independence requirements.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import mpmath as mp

from . import regions as reg_mod
from . import specfun
from .regions import (AngularMask, AzimuthallySymmetric, ProductMask,
                      ProductSymmetric)

# float64 loses ~15 digits to cancellation in the alternating moment sum by
# p+p' ~ 58, so the analytic E path runs in fixed extended precision.
_E_ANALYTIC_DPS = 50
_E_ANALYTIC_MAX_PPSUM = 60


# ---------------------------------------------------------------------------
# spectral bands and index maps
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FourierLaguerreBand:
    """Band limit p < P, l < L; dimension P * L^2."""

    P: int
    L: int

    def __post_init__(self):
        if self.P < 1 or self.L < 1:
            raise ValueError("band limits must be >= 1")

    @property
    def size(self) -> int:
        return self.P * self.L * self.L

    def flat_index(self, l: int, m: int, p: int) -> int:
        if not (0 <= l < self.L and abs(m) <= l and 0 <= p < self.P):
            raise IndexError(f"(l={l}, m={m}, p={p}) outside band P={self.P}, L={self.L}")
        return (l * l + l + m) * self.P + p

    def triple(self, flat: int) -> tuple[int, int, int]:
        lm, p = divmod(flat, self.P)
        l = int(math.isqrt(lm))
        return l, lm - l * l - l, p

    def triples(self):
        for l in range(self.L):
            for m in range(-l, l + 1):
                for p in range(self.P):
                    yield (l, m, p)


@dataclass(frozen=True)
class FourierBesselBand:
    """Band limit k <= K, l < L, with M uniform samples k_n = n K / M."""

    K: float
    L: int
    M: int

    def __post_init__(self):
        if self.K <= 0:
            raise ValueError("K must be positive")
        if self.L < 1 or self.M < 1:
            raise ValueError("band limits must be >= 1")

    @property
    def dk(self) -> float:
        return self.K / self.M

    @property
    def k_samples(self) -> np.ndarray:
        return np.arange(1, self.M + 1) * self.dk

    @property
    def size(self) -> int:
        return self.M * self.L * self.L

    def flat_index(self, l: int, m: int, n: int) -> int:
        """n is the 1-based sample index of k_n = n K / M."""
        if not (0 <= l < self.L and abs(m) <= l and 1 <= n <= self.M):
            raise IndexError(f"(l={l}, m={m}, n={n}) outside band M={self.M}, L={self.L}")
        return (l * l + l + m) * self.M + (n - 1)

    def triple(self, flat: int) -> tuple[int, int, int]:
        lm, n0 = divmod(flat, self.M)
        l = int(math.isqrt(lm))
        return l, lm - l * l - l, n0 + 1


SpectralBand = FourierLaguerreBand | FourierBesselBand


def fb_k_weights(band: FourierBesselBand) -> np.ndarray:
    """Quadrature weights on the k samples: trapezoid on [0, K] with the
    zero-integrand k = 0 node dropped."""
    w = np.full(band.M, band.dk)
    w[-1] = band.dk / 2.0
    return w


@dataclass(frozen=True)
class KernelMatrix:
    """Assembled Hermitian kernel (full band or one fixed order m)."""

    matrix: np.ndarray
    band: SpectralBand
    region: object
    domain: str                  # "FL" or "FB-discretized"
    order: int | None = None     # fixed azimuthal order, if block-assembled
    k_weights: np.ndarray | None = None  # FB symmetrization weights

    def __post_init__(self):
        a = np.asarray(self.matrix)
        herm = np.abs(a - a.conj().T).max()
        scale = max(np.abs(a).max(), 1e-300)
        if herm > 1e-12 * scale:
            raise ValueError(f"kernel is not Hermitian: rel asymmetry {herm / scale:.2e}")

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix).real)


# ---------------------------------------------------------------------------
# radial coupling E
# ---------------------------------------------------------------------------

def _radial_moments_mp(nmax: int, R1: float, R2: float, dps: int) -> list:
    with mp.workdps(dps):
        b = mp.inf if math.isinf(R2) else mp.mpf(R2)
        return [mp.gammainc(n + 1, mp.mpf(R1), b) for n in range(nmax + 1)]


@lru_cache(maxsize=256)
def _laguerre_coeffs_mp(p: int, dps: int) -> tuple:
    """Signed coefficients of L_p^{(2)}: c_j = (-1)^j binom(p+2, p-j)/j! (exact)."""
    with mp.workdps(dps):
        return tuple(
            (-1) ** j * mp.mpf(math.comb(p + 2, p - j)) / mp.factorial(j)
            for j in range(p + 1)
        )


def _e_entry_analytic(p: int, q: int, moments: list, dps: int = _E_ANALYTIC_DPS) -> float:
    cp, cq = _laguerre_coeffs_mp(p, dps), _laguerre_coeffs_mp(q, dps)
    with mp.workdps(dps):
        acc = mp.mpf(0)
        for j in range(p + 1):
            cj = cp[j]
            for j2 in range(q + 1):
                acc += cj * cq[j2] * moments[j + j2 + 2]
        norm = mp.sqrt(mp.mpf((p + 1) * (p + 2)) * mp.mpf((q + 1) * (q + 2)))
        return float(acc / norm)


def _e_entry_quad(p: int, q: int, R1: float, R2: float) -> float:
    rule = specfun.gauss_legendre_rule(2 * max(p, q) + 18, R1, R2)
    Kt = specfun.laguerre_K_table(max(p, q), rule.nodes)
    return float(np.sum(rule.weights * rule.nodes ** 2 * Kt[p] * Kt[q]))


def E_matrix(P: int, R1: float, R2: float) -> np.ndarray:
    """Radial coupling E_{p,p'} = int_{R1}^{R2} r^2 K_p K_{p'} dr, p, p' < P.

    Exact moment expansion (in extended precision, the alternating binomial
    sum is hopeless in float64 at these degrees) up to p+p' = 60; plain
    Gauss-Legendre quadrature above that.  Symmetric with spectrum in [0, 1].
    """
    if P < 1:
        raise ValueError("P must be >= 1")
    if not (R2 > R1 >= 0.0):
        raise ValueError(f"need 0 <= R1 < R2, got R1={R1}, R2={R2}")
    nmax = 2 * (P - 1) + 2
    # quadrature cannot reach an infinite endpoint; scale the working
    # precision with the degree instead (cancellation eats ~p+q/4 digits)
    analytic_all = math.isinf(R2) or 2 * (P - 1) <= _E_ANALYTIC_MAX_PPSUM
    dps = max(_E_ANALYTIC_DPS, 30 + nmax) if math.isinf(R2) else _E_ANALYTIC_DPS
    n_mom = nmax if analytic_all else _E_ANALYTIC_MAX_PPSUM + 2
    moments = _radial_moments_mp(n_mom, R1, R2, dps)
    E = np.empty((P, P))
    for p in range(P):
        for q in range(p, P):
            if analytic_all or p + q <= _E_ANALYTIC_MAX_PPSUM:
                E[p, q] = _e_entry_analytic(p, q, moments, dps)
            else:
                E[p, q] = _e_entry_quad(p, q, R1, R2)
            E[q, p] = E[p, q]
    return E


def E_entry(p: int, q: int, R1: float, R2: float) -> float:
    """Single analytic E entry (moment expansion)."""
    dps = max(_E_ANALYTIC_DPS, 30 + p + q + 2)
    moments = _radial_moments_mp(p + q + 2, R1, R2, dps)
    return _e_entry_analytic(p, q, moments, dps)


# ---------------------------------------------------------------------------
# angular coupling G
# ---------------------------------------------------------------------------

def G_matrix(m: int, L: int, theta1: float, theta2: float) -> np.ndarray:
    """Angular coupling G^m_{l,l'} for l, l' in [m, L-1] over a colatitude band.

    Wigner-3j sum with Legendre differences; the convention P_{-1} == 1
    supplies the j = 0 term.  Symmetric, spectrum in [0, 1], and invariant
    under m -> -m.
    """
    m = abs(m)
    if not (0 <= m < L):
        raise ValueError(f"need 0 <= |m| < L, got m={m}, L={L}")
    if not (0.0 <= theta1 < theta2 <= math.pi):
        raise ValueError(f"need 0 <= theta1 < theta2 <= pi, got {theta1}, {theta2}")
    x1, x2 = math.cos(theta1), math.cos(theta2)
    jmax = 2 * (L - 1) + 1
    P1 = specfun.legendre_P_table(jmax, x1)
    P2 = specfun.legendre_P_table(jmax, x2)

    def pleg(j: int, tab: np.ndarray) -> float:
        return 1.0 if j == -1 else tab[j]

    n = L - m
    G = np.empty((n, n))
    for i, l in enumerate(range(m, L)):
        for i2 in range(i, n):
            l2 = m + i2
            total = 0.0
            for j in range(abs(l - l2), l + l2 + 1):
                c0 = specfun.wigner_3j(l, j, l2, 0, 0, 0)
                if c0 == 0.0:
                    continue
                cm = specfun.wigner_3j(l, j, l2, m, 0, -m)
                bracket = (pleg(j - 1, P2) + pleg(j + 1, P1)
                           - pleg(j + 1, P2) - pleg(j - 1, P1))
                total += c0 * cm * bracket
            val = (-1.0) ** m * math.sqrt((2 * l + 1) * (2 * l2 + 1)) / 2.0 * total
            G[i, i2] = G[i2, i] = val
    return G


def G_diag_sum(L: int, theta1: float, theta2: float) -> float:
    """sum over all (l, m), |m| <= l < L, of G^m_{l,l} (the angular Shannon number)."""
    total = 0.0
    x1, x2 = math.cos(theta1), math.cos(theta2)
    jmax = 2 * (L - 1) + 1
    P1 = specfun.legendre_P_table(jmax, x1)
    P2 = specfun.legendre_P_table(jmax, x2)

    def pleg(j: int, tab: np.ndarray) -> float:
        return 1.0 if j == -1 else tab[j]

    for m in range(L):
        mult = 2.0 if m > 0 else 1.0
        for l in range(m, L):
            s = 0.0
            for j in range(0, 2 * l + 1):
                c0 = specfun.wigner_3j(l, j, l, 0, 0, 0)
                if c0 == 0.0:
                    continue
                cm = specfun.wigner_3j(l, j, l, m, 0, -m)
                bracket = (pleg(j - 1, P2) + pleg(j + 1, P1)
                           - pleg(j + 1, P2) - pleg(j - 1, P1))
                s += c0 * cm * bracket
            total += mult * (-1.0) ** m * (2 * l + 1) / 2.0 * s
    return total


def G_mask_matrix(mask: AngularMask, L: int) -> np.ndarray:
    """Angular mask coupling over all (l, m): Hermitian L^2 x L^2 matrix.

    G_{(lm),(l'm')} = sum_pixels w_i I_i Y_{lm}(pix_i) Y*_{l'm'}(pix_i),
    exact for harmonic products when the mask grid band-limit covers L.
    """
    if mask.L_grid < L:
        raise ValueError(f"mask grid band-limit {mask.L_grid} is below L={L}")
    active = mask.indicator > 0
    Y = specfun.sph_harm_matrix(L, mask.theta[active], mask.phi[active])
    w = mask.weight[active]
    G = (Y * w) @ Y.conj().T
    return 0.5 * (G + G.conj().T)


# ---------------------------------------------------------------------------
# radial Fourier-Bessel coupling C
# ---------------------------------------------------------------------------

def _c_quad_rule(K: float, R1: float, R2: float) -> specfun.QuadratureRule:
    n = max(32, math.ceil(4.0 * K * R2 / math.pi)) + 16
    return specfun.gauss_legendre_rule(n, R1, R2)


def C_kernel(ell: int, ell2: int, k: float, k2: float, R1: float, R2: float) -> float:
    """C_{l,l'}(k,k') = (2/pi) k k' int_{R1}^{R2} r^2 j_l(kr) j_{l'}(k'r) dr.

    Closed forms on l = l' (Lommel cross product for k != k', and the
    T(l,k,R2) - T(l,k,R1) form with T = R^3 (j_l^2 - j_{l-1} j_{l+1}) for
    k = k'); oscillation-resolving Gauss-Legendre otherwise.
    """
    if ell < 0 or ell2 < 0:
        raise ValueError("degrees must be >= 0")
    if k <= 0 or k2 <= 0:
        raise ValueError("wavenumbers must be positive")
    if R1 < 0 or R2 < R1:
        raise ValueError(f"need 0 <= R1 <= R2, got R1={R1}, R2={R2}")
    if R1 == R2:
        return 0.0
    jl = specfun.spherical_bessel_j
    if ell == ell2:
        if k == k2:
            def T(R: float) -> float:
                return R ** 3 * (jl(ell, k * R) ** 2
                                 - jl(ell - 1, k * R) * jl(ell + 1, k * R))
            return k * k / math.pi * (T(R2) - T(R1))

        def bracket(R: float) -> float:
            return R * R * (k2 * jl(ell - 1, k2 * R) * jl(ell, k * R)
                            - k * jl(ell - 1, k * R) * jl(ell, k2 * R))
        return 2.0 * k * k2 / (math.pi * (k * k - k2 * k2)) * (bracket(R2) - bracket(R1))
    rule = _c_quad_rule(max(k, k2), R1, R2)
    r, w = rule.nodes, rule.weights
    from scipy.special import spherical_jn
    integ = np.sum(w * r ** 2 * spherical_jn(ell, k * r) * spherical_jn(ell2, k2 * r))
    return 2.0 / math.pi * k * k2 * float(integ)


def _c_tensor(band: FourierBesselBand, R1: float, R2: float) -> np.ndarray:
    """C[l, n, l', n'] over the full band at the k samples.

    Off-degree blocks by a single vectorized quadrature contraction; the
    l = l' blocks are overwritten with the closed forms.
    """
    L, M = band.L, band.M
    ks = band.k_samples
    rule = _c_quad_rule(band.K, R1, R2)
    r, w = rule.nodes, rule.weights
    J = np.empty((L + 1, M, r.size))
    from scipy.special import spherical_jn
    kr = np.multiply.outer(ks, r)
    for l in range(L + 1):
        J[l] = spherical_jn(l, kr)
    A = (J[:L] * ks[None, :, None]).reshape(L * M, r.size)
    C = (2.0 / math.pi) * ((A * (w * r ** 2)) @ A.T)
    C = C.reshape(L, M, L, M)

    # closed forms on the same-degree blocks
    for l in range(L):
        if l == 0:
            # j_{-1} only ever enters multiplied by R^3 or R^2; at R1 = 0
            # those prefactors vanish, so a zero placeholder is safe.
            jlm1_R1 = specfun.spherical_j_minus1(ks * R1) if R1 > 0 else np.zeros(M)
            jlm1_R2 = specfun.spherical_j_minus1(ks * R2)
        else:
            jlm1_R1 = spherical_jn(l - 1, ks * R1)
            jlm1_R2 = spherical_jn(l - 1, ks * R2)
        jl_R1 = spherical_jn(l, ks * R1)
        jl_R2 = spherical_jn(l, ks * R2)
        jlp1_R1 = spherical_jn(l + 1, ks * R1)
        jlp1_R2 = spherical_jn(l + 1, ks * R2)
        T1 = R1 ** 3 * (jl_R1 ** 2 - jlm1_R1 * jlp1_R1)
        T2 = R2 ** 3 * (jl_R2 ** 2 - jlm1_R2 * jlp1_R2)
        diag = ks ** 2 / math.pi * (T2 - T1)

        def brack(R, jl_R, jlm1_R):
            return R * R * (np.outer(jl_R, ks * jlm1_R)
                            - np.outer(ks * jlm1_R, jl_R))
        num = brack(R2, jl_R2, jlm1_R2)
        if R1 > 0.0:
            num = num - brack(R1, jl_R1, jlm1_R1)
        den = np.subtract.outer(ks ** 2, ks ** 2)
        np.fill_diagonal(den, 1.0)
        block = 2.0 * np.multiply.outer(ks, ks) / (math.pi * den) * num
        np.einsum("ii->i", block)[:] = diag
        C[l, :, l, :] = 0.5 * (block + block.T)
    return C


# ---------------------------------------------------------------------------
# assembled kernels
# ---------------------------------------------------------------------------

def kernel_fb_fixed_order(m: int, band: FourierBesselBand, region) -> KernelMatrix:
    """Symmetrized fixed-order Fourier-Bessel kernel B = W^{1/2} (C o G) W^{1/2}.

    Rows/columns run over (l, n) with l in [m, L-1] (fast index n).  W holds
    the k-sample quadrature weights, so B is symmetric positive semidefinite
    and its eigenvectors map back to coefficient samples via W^{-1/2}.
    """
    m = abs(m)
    if not (0 <= m < band.L):
        raise ValueError(f"need 0 <= |m| < L, got m={m}, L={band.L}")
    w = fb_k_weights(band)
    if isinstance(region, ProductSymmetric):
        C = _c_tensor(band, region.R1, region.R2)
        G = G_matrix(m, band.L, region.theta1, region.theta2)
        nl = band.L - m
        dim = nl * band.M
        Kmat = (C[m:, :, m:, :] * G[:, None, :, None]).reshape(dim, dim)
    elif isinstance(region, AzimuthallySymmetric):
        Kmat = _fb_fixed_order_azim(m, band, region)
        nl = band.L - m
    else:
        raise TypeError(
            "fixed-order FB kernels need a ProductSymmetric or "
            f"AzimuthallySymmetric region, got {type(region)!r}")
    ws = np.sqrt(np.tile(w, nl))
    B = ws[:, None] * Kmat * ws[None, :]
    B = 0.5 * (B + B.T)
    return KernelMatrix(B, band, region, "FB-discretized", order=m, k_weights=w)


def _fb_fixed_order_azim(m: int, band: FourierBesselBand,
                         region: AzimuthallySymmetric) -> np.ndarray:
    """Unweighted fixed-order kernel over an (r, theta) indicator grid."""
    L, M = band.L, band.M
    ks = band.k_samples
    r, wr = region.r_nodes, region.r_weights
    th, wt = region.theta_nodes, region.theta_weights
    from scipy.special import spherical_jn
    kr = np.multiply.outer(ks, r)
    Jl = np.empty((L - m, M, r.size))
    for i, l in enumerate(range(m, L)):
        Jl[i] = spherical_jn(l, kr)
    Pb = specfun.norm_alf_table(L, m, th)           # (L-m, n_theta)
    rad = math.sqrt(2.0 / math.pi) * Jl * ks[None, :, None]   # (L-m, M, n_r)
    # Gram over the grid measure 2 pi * wr * wt * I * r^2
    A = np.einsum("inr,it->inrt", rad, Pb).reshape((L - m) * M, r.size * th.size)
    meas = 2.0 * math.pi * np.outer(wr * r ** 2, wt) * region.indicator
    return (A * meas.ravel()) @ A.T


def kernel_fl_entry(region, band: FourierLaguerreBand,
                    idx: tuple[int, int, int], idx2: tuple[int, int, int]) -> complex:
    """Single Fourier-Laguerre kernel entry int_R Z_{lmp} Z*_{l'm'p'} dv."""
    l, m, p = idx
    l2, m2, p2 = idx2
    band.flat_index(l, m, p)
    band.flat_index(l2, m2, p2)
    if isinstance(region, ProductSymmetric) and region.orientation is None:
        if region.R1 == 0.0 and math.isinf(region.R2) \
                and region.theta1 == 0.0 and region.theta2 == math.pi:
            return complex(float(l == l2 and m == m2 and p == p2))
        if m != m2:
            return 0.0
        e = E_entry(p, p2, region.R1, region.R2) if math.isinf(region.R2) \
            else float(E_matrix(max(p, p2) + 1, region.R1, region.R2)[p, p2])
        g = G_matrix(m, band.L, region.theta1, region.theta2)
        return complex(e * g[l - abs(m), l2 - abs(m)])
    if isinstance(region, ProductMask):
        e = float(E_matrix(max(p, p2) + 1, region.R1, region.R2)[p, p2])
        G = G_mask_matrix(region.mask, band.L)
        return complex(e * G[l * l + l + m, l2 * l2 + l2 + m2])
    if isinstance(region, AzimuthallySymmetric) and region.orientation is None:
        if m != m2:
            return 0.0
        blk = kernel_fl_fixed_order(abs(m), band, region)
        P = band.P
        return complex(blk.matrix[(l - abs(m)) * P + p, (l2 - abs(m)) * P + p2])
    raise TypeError(f"unsupported region type {type(region)!r}")


def kernel_fl_fixed_order(m: int, band: FourierLaguerreBand, region) -> KernelMatrix:
    """Fixed-order Fourier-Laguerre kernel over (l, p), l in [m, L-1]."""
    m = abs(m)
    if not (0 <= m < band.L):
        raise ValueError(f"need 0 <= |m| < L, got m={m}, L={band.L}")
    P, L = band.P, band.L
    if isinstance(region, ProductSymmetric) and region.orientation is None:
        E = E_matrix(P, region.R1, region.R2)
        G = G_matrix(m, L, region.theta1, region.theta2)
        Kmat = np.kron(G, E)
    elif isinstance(region, reg_mod.RegionUnion):
        Kmat = sum(
            np.kron(G_matrix(m, L, s.theta1, s.theta2), E_matrix(P, s.R1, s.R2))
            for s in region.members
        )
    elif isinstance(region, AzimuthallySymmetric) and region.orientation is None:
        r, wr = region.r_nodes, region.r_weights
        th, wt = region.theta_nodes, region.theta_weights
        Kt = specfun.laguerre_K_table(P - 1, r)      # (P, n_r)
        Pb = specfun.norm_alf_table(L, m, th)        # (L-m, n_theta)
        A = np.einsum("it,pr->iprt", Pb, Kt).reshape((L - m) * P, r.size * th.size)
        meas = 2.0 * math.pi * np.outer(wr * r ** 2, wt) * region.indicator
        Kmat = (A * meas.ravel()) @ A.T
    else:
        raise TypeError(f"unsupported region type {type(region)!r}")
    Kmat = 0.5 * (Kmat + Kmat.T)
    return KernelMatrix(Kmat, band, region, "FL", order=m)


@dataclass(frozen=True)
class FactoredKernelFL:
    """Radially independent FL kernel in factored form E (x) G_angular.

    The dense P L^2 x P L^2 product is only materialized on request.
    """

    E: np.ndarray          # (P, P) radial coupling
    G_angular: np.ndarray  # (L^2, L^2) Hermitian angular coupling
    band: FourierLaguerreBand
    region: ProductMask

    def dense(self) -> np.ndarray:
        return np.kron(self.G_angular, self.E)

    @property
    def trace(self) -> float:
        return float(np.trace(self.E).real * np.trace(self.G_angular).real)


def kernel_fl_mask(band: FourierLaguerreBand, region: ProductMask) -> FactoredKernelFL:
    """Factored FL kernel for an angular mask x radial interval region."""
    if region.mask.L_grid < band.L:
        raise ValueError(
            f"mask grid band-limit {region.mask.L_grid} is below L={band.L}")
    E = E_matrix(band.P, region.R1, region.R2)
    G = G_mask_matrix(region.mask, band.L)
    return FactoredKernelFL(E, G, band, region)
