"""Special functions for concentration kernels on the ball.

Everything here is a pure function of its arguments. The conventions match
the rest of the package:

* spherical Bessel ``j_ell`` of the first kind, extended to ``ell = -1``
  by ``j_{-1}(x) = cos(x)/x`` (needed by the ell=0 term of the
  Fourier-Bessel Shannon number and the equal-degree radial closed forms);
* radial Laguerre functions ``K_p(r) = sqrt(p!/(p+2)!) e^{-r/2} L_p^{(2)}(r)``,
  orthonormal under the measure ``r^2 dr`` on the half line;
* orthonormal spherical harmonics with the Condon-Shortley phase carried
  by the associated Legendre recurrence;
* Wigner 3j symbols (Racah single-sum, log-factorials) and real Wigner
  d-matrix elements (Jacobi-polynomial form, stable at large degree).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial.laguerre import laggauss
from numpy.polynomial.legendre import leggauss
from scipy.special import gammaincc, gammaln, spherical_jn


# ---------------------------------------------------------------------------
# quadrature rules
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and positive weights of a fixed quadrature rule.

    kind is either "gauss-legendre-on-interval" (exact for polynomials of
    degree <= 2n-1 on [a, b]) or "gauss-laguerre-weighted" (exact for
    e^{-r} * polynomial of degree <= 2n-1 on the half line).
    """

    nodes: np.ndarray
    weights: np.ndarray
    kind: str

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)
        if nodes.ndim != 1 or nodes.shape != weights.shape:
            raise ValueError("nodes and weights must be 1-d arrays of equal length")
        if not np.all(np.diff(nodes) > 0):
            raise ValueError("quadrature nodes must be strictly increasing")
        if not np.all(weights > 0):
            raise ValueError("quadrature weights must be positive")

    def integrate(self, values: np.ndarray):
        return np.asarray(values) @ self.weights


def gauss_legendre_rule(n: int, a: float, b: float) -> QuadratureRule:
    """Gauss-Legendre rule with n nodes on [a, b]."""
    if n < 1:
        raise ValueError("need at least one node")
    if not (b > a):
        raise ValueError("interval must satisfy b > a")
    x, w = leggauss(n)
    mid, half = 0.5 * (b + a), 0.5 * (b - a)
    return QuadratureRule(mid + half * x, half * w, "gauss-legendre-on-interval")


def gauss_laguerre_rule(n: int) -> QuadratureRule:
    """Gauss-Laguerre rule (weight e^{-r}) with n nodes on [0, inf)."""
    if n < 1:
        raise ValueError("need at least one node")
    x, w = laggauss(n)
    return QuadratureRule(x, w, "gauss-laguerre-weighted")


# ---------------------------------------------------------------------------
# spherical Bessel functions
# ---------------------------------------------------------------------------

def spherical_bessel_j(ell: int, x: float) -> float:
    """Spherical Bessel function of the first kind, j_ell(x).

    ell = -1 uses the analytic continuation j_{-1}(x) = cos(x)/x.
    At x = 0 the series limits apply: j_0(0) = 1, j_ell(0) = 0 for ell >= 1.
    """
    if ell < -1:
        raise ValueError(f"degree must be >= -1, got {ell}")
    if x < 0:
        raise ValueError(f"argument must be >= 0, got {x}")
    if ell == -1:
        return math.inf if x == 0.0 else math.cos(x) / x
    if x == 0.0:
        return 1.0 if ell == 0 else 0.0
    return float(spherical_jn(ell, x))


def spherical_jn_table(lmax: int, x: np.ndarray) -> np.ndarray:
    """j_l(x) for l = 0..lmax over an array of arguments, shape (lmax+1,) + x.shape."""
    x = np.asarray(x, dtype=float)
    out = np.empty((lmax + 1,) + x.shape)
    for l in range(lmax + 1):
        out[l] = spherical_jn(l, x)
    return out


def spherical_j_minus1(x: np.ndarray) -> np.ndarray:
    """j_{-1}(x) = cos(x)/x elementwise (x > 0)."""
    x = np.asarray(x, dtype=float)
    return np.cos(x) / x


# ---------------------------------------------------------------------------
# radial Laguerre basis functions
# ---------------------------------------------------------------------------

def laguerre_poly2_table(pmax: int, r: np.ndarray) -> np.ndarray:
    """Generalized Laguerre polynomials L_p^{(2)}(r) for p = 0..pmax.

    Three-term recurrence (n+1) L_{n+1} = (2n+3-r) L_n - (n+2) L_{n-1};
    stable, unlike the alternating binomial sum which cancels badly for
    p beyond ~20.
    """
    r = np.asarray(r, dtype=float)
    out = np.empty((pmax + 1,) + r.shape)
    out[0] = 1.0
    if pmax >= 1:
        out[1] = 3.0 - r
    for n in range(1, pmax):
        out[n + 1] = ((2 * n + 3 - r) * out[n] - (n + 2) * out[n - 1]) / (n + 1)
    return out


def laguerre_K_table(pmax: int, r: np.ndarray) -> np.ndarray:
    """Orthonormal radial functions K_p(r) for p = 0..pmax over an array."""
    r = np.asarray(r, dtype=float)
    L = laguerre_poly2_table(pmax, r)
    norms = 1.0 / np.sqrt([(p + 1) * (p + 2) for p in range(pmax + 1)])
    return L * np.exp(-r / 2.0) * norms[(slice(None),) + (None,) * r.ndim]


def laguerre_K(p: int, r) -> float | np.ndarray:
    """K_p(r) = sqrt(p!/(p+2)!) e^{-r/2} L_p^{(2)}(r)."""
    if p < 0:
        raise ValueError(f"degree must be >= 0, got {p}")
    scalar = np.isscalar(r)
    val = laguerre_K_table(p, np.atleast_1d(np.asarray(r, dtype=float)))[p]
    return float(val[0]) if scalar else val


# ---------------------------------------------------------------------------
# spherical harmonics
# ---------------------------------------------------------------------------

def norm_alf_table(L: int, m: int, theta: np.ndarray) -> np.ndarray:
    """Fully-normalized associated Legendre values Pbar_{l m}(cos theta).

    Returns shape (L - m,) + theta.shape holding l = m..L-1, where
    Y_{l m}(theta, phi) = Pbar_{l m}(cos theta) e^{i m phi}.  Ascending
    recurrence in l with the normalization applied on the fly; the
    Condon-Shortley phase is carried by the sectoral seed.
    """
    if m < 0 or m >= L:
        raise ValueError(f"order must satisfy 0 <= m < L, got m={m}, L={L}")
    theta = np.asarray(theta, dtype=float)
    x, sx = np.cos(theta), np.sin(theta)
    out = np.empty((L - m,) + theta.shape)
    pmm = np.full(theta.shape, math.sqrt(1.0 / (4.0 * math.pi)))
    for mu in range(1, m + 1):
        pmm = -math.sqrt((2 * mu + 1) / (2.0 * mu)) * sx * pmm
    out[0] = pmm
    p_prev = np.zeros_like(pmm)
    p_cur = pmm
    for l in range(m + 1, L):
        a = math.sqrt((4.0 * l * l - 1.0) / (l * l - m * m))
        b = math.sqrt(((l - 1) ** 2 - m * m) / (4.0 * (l - 1) ** 2 - 1.0))
        p_next = a * (x * p_cur - b * p_prev)
        p_prev, p_cur = p_cur, p_next
        out[l - m] = p_cur
    return out


def spherical_harmonic(ell: int, m: int, theta: float, phi: float) -> complex:
    """Orthonormal spherical harmonic Y_{ell m}(theta, phi), Condon-Shortley phase."""
    if ell < 0 or abs(m) > ell:
        raise ValueError(f"indices must satisfy |m| <= ell, ell >= 0; got ell={ell}, m={m}")
    ma = abs(m)
    pbar = float(norm_alf_table(ell + 1, ma, np.asarray(theta))[ell - ma])
    y = pbar * complex(math.cos(ma * phi), math.sin(ma * phi))
    if m < 0:
        y = (-1) ** ma * y.conjugate()
    return y


def sph_harm_matrix(L: int, theta: np.ndarray, phi: np.ndarray) -> np.ndarray:
    """All Y_{l m} with l < L at given points; shape (L*L, npts).

    Row ordering is flat = l*l + l + m (the package-wide angular ordering).
    """
    theta = np.asarray(theta, dtype=float).ravel()
    phi = np.asarray(phi, dtype=float).ravel()
    out = np.empty((L * L, theta.size), dtype=complex)
    for m in range(L):
        pb = norm_alf_table(L, m, theta)
        e = np.exp(1j * m * phi)
        for l in range(m, L):
            out[l * l + l + m] = pb[l - m] * e
            if m > 0:
                out[l * l + l - m] = (-1) ** m * pb[l - m] * np.conj(e)
    return out


def legendre_P_table(jmax: int, x: float) -> np.ndarray:
    """Legendre polynomials P_j(x) for j = 0..jmax (plain recurrence)."""
    P = np.empty(jmax + 1)
    P[0] = 1.0
    if jmax >= 1:
        P[1] = x
    for j in range(1, jmax):
        P[j + 1] = ((2 * j + 1) * x * P[j] - j * P[j - 1]) / (j + 1)
    return P


# ---------------------------------------------------------------------------
# Wigner symbols
# ---------------------------------------------------------------------------

def _lnf(n: int) -> float:
    return gammaln(n + 1)


@lru_cache(maxsize=200_000)
def wigner_3j(l1: int, l2: int, l3: int, m1: int, m2: int, m3: int) -> float:
    """Wigner 3j symbol; returns 0 outside the selection rules.

    Racah single-sum formula with log-factorials, safe far beyond the
    degree range used by the angular kernels here.
    """
    if m1 + m2 + m3 != 0:
        return 0.0
    if l3 < abs(l1 - l2) or l3 > l1 + l2:
        return 0.0
    if abs(m1) > l1 or abs(m2) > l2 or abs(m3) > l3:
        return 0.0
    if min(l1, l2, l3) < 0:
        return 0.0
    t_min = max(0, l2 - l3 - m1, l1 - l3 + m2)
    t_max = min(l1 + l2 - l3, l1 - m1, l2 + m2)
    if t_max < t_min:
        return 0.0
    pre = 0.5 * (
        _lnf(l1 + l2 - l3) + _lnf(l1 - l2 + l3) + _lnf(-l1 + l2 + l3)
        - _lnf(l1 + l2 + l3 + 1)
        + _lnf(l1 + m1) + _lnf(l1 - m1)
        + _lnf(l2 + m2) + _lnf(l2 - m2)
        + _lnf(l3 + m3) + _lnf(l3 - m3)
    )
    total = 0.0
    for t in range(t_min, t_max + 1):
        lt = (
            _lnf(t) + _lnf(l3 - l2 + t + m1) + _lnf(l3 - l1 + t - m2)
            + _lnf(l1 + l2 - l3 - t) + _lnf(l1 - t - m1) + _lnf(l2 - t + m2)
        )
        total += (-1.0) ** t * math.exp(pre - lt)
    return (-1.0) ** (l1 - l2 - m3) * total


def _jacobi_poly(s: int, a: int, b: int, x: float) -> float:
    """Jacobi polynomial P_s^{(a,b)}(x) by the three-term recurrence."""
    if s == 0:
        return 1.0
    p0 = 1.0
    p1 = 0.5 * (a - b + (a + b + 2) * x)
    for k in range(1, s):
        c1 = 2.0 * (k + 1) * (k + a + b + 1) * (2 * k + a + b)
        c2 = (2 * k + a + b + 1) * (a * a - b * b)
        c3 = (2 * k + a + b) * (2 * k + a + b + 1) * (2 * k + a + b + 2)
        c4 = 2.0 * (k + a) * (k + b) * (2 * k + a + b + 2)
        p0, p1 = p1, ((c2 + c3 * x) * p1 - c4 * p0) / c1
    return p1


def wigner_d_beta(ell: int, m: int, n: int, beta: float) -> float:
    """Real rotation matrix element d^ell_{m n}(beta).

    Jacobi-polynomial form: with mu = |m-n|, nu = |m+n|, s = ell-(mu+nu)/2,

        d = xi * sqrt(s!(s+mu+nu)!/((s+mu)!(s+nu)!))
              * sin(beta/2)^mu cos(beta/2)^nu * P_s^{(mu,nu)}(cos beta),

    xi = (-1)^{m-n} for n < m else 1.  No alternating factorial sums, so
    this stays accurate at large ell (rows orthonormal to ~1e-13 at ell=72).
    """
    if abs(m) > ell or abs(n) > ell:
        raise ValueError(f"need |m|,|n| <= ell; got ell={ell}, m={m}, n={n}")
    if beta == 0.0:
        return 1.0 if m == n else 0.0
    mu, nu = abs(m - n), abs(m + n)
    s = ell - (mu + nu) // 2
    xi = 1.0 if n >= m else (-1.0) ** (m - n)
    lg = 0.5 * (_lnf(s) + _lnf(s + mu + nu) - _lnf(s + mu) - _lnf(s + nu))
    pref = xi * math.exp(lg) * math.sin(beta / 2.0) ** mu * math.cos(beta / 2.0) ** nu
    return pref * _jacobi_poly(s, mu, nu, math.cos(beta))


# ---------------------------------------------------------------------------
# truncated exponential moments
# ---------------------------------------------------------------------------

def _poisson_cdf(j: int, R: float) -> float:
    """P[Poisson(R) <= j] = Q(j+1, R), with the degenerate endpoints."""
    if R == 0.0:
        return 1.0
    if math.isinf(R):
        return 0.0
    return float(gammaincc(j + 1, R))


def _log_poisson_tail(j: int, R: float) -> float:
    """log P[Poisson(R) > j], summed directly in the log domain."""
    if R == 0.0:
        return -math.inf
    logs = []
    a = j + 1
    first = a * math.log(R) - R - _lnf(a)
    logs.append(first)
    while True:
        a += 1
        lt = a * math.log(R) - R - _lnf(a)
        logs.append(lt)
        if lt < first - 45.0 and a > R:
            break
        if a > j + 200000:
            break
    mx = max(logs)
    return mx + math.log(math.fsum(math.exp(t - mx) for t in logs))


def radial_moment_integral(j: int, R1: float, R2: float) -> float:
    """Truncated exponential moment  integral_{R1}^{R2} e^{-r} r^j dr.

    Equals j! * sum_{a<=j} (e^{-R1} R1^a - e^{-R2} R2^a)/a!, i.e. a
    difference of upper incomplete gamma functions.  Evaluated through
    Poisson cumulative probabilities, switching to a log-domain tail sum
    when both CDFs sit near 1 (interval far left of the integrand peak),
    which is where the plain difference cancels.
    """
    if j < 0:
        raise ValueError(f"moment degree must be >= 0, got {j}")
    if not (R2 > R1) or R1 < 0:
        raise ValueError(f"need 0 <= R1 < R2, got R1={R1}, R2={R2}")
    s1, s2 = _poisson_cdf(j, R1), _poisson_cdf(j, R2)
    if s2 > 0.99:
        lt1 = _log_poisson_tail(j, R1)
        lt2 = _log_poisson_tail(j, R2)
        log_d = lt2 + math.log1p(-math.exp(lt1 - lt2)) if lt1 > -math.inf else lt2
    else:
        log_d = math.log(s1 - s2)
    try:
        return math.exp(_lnf(j) + log_d)
    except OverflowError:
        return math.inf  # true value exceeds the float64 range
