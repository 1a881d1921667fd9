"""Acceptance suite: one test per criterion, each printing a PASS line.

Reference configuration: R = {15 <= r <= 25} x {pi/8 <= theta <= 3pi/8},
angular band-limit L = 20, radial degrees 0..30 (Fourier-Laguerre) or
K = 1.4 sampled at dk = 0.02 (Fourier-Bessel).  Reference values:
N_L = 108.24, N^P = 3.72, N_PL = 403.21, FB count 408.33.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
report lines.
"""

import math
import time

import numpy as np
import pytest

import slepian_ball as sb
from slepian_ball import specfun, transforms

T1, T2 = math.pi / 8, 3 * math.pi / 8


def report(criterion: str, detail: str):
    print(f"ACCEPTANCE {criterion}: PASS  ({detail})")


def product_grid_points(grid):
    T, P = np.meshgrid(grid.theta_nodes, grid.phi_nodes, indexing="ij")
    n_r = grid.radial_nodes.size
    return np.column_stack([
        np.repeat(grid.radial_nodes, T.size),
        np.tile(T.ravel(), n_r),
        np.tile(P.ravel(), n_r),
    ])


def region_inner(va, vb, grid):
    n_r = grid.radial_nodes.size
    ang = np.sum(va.reshape(n_r, -1) * np.conj(vb.reshape(n_r, -1))
                 * grid.angular_weights, axis=1)
    return complex(ang @ grid.radial_weights)


def test_c01_angular_shannon_number():
    t0 = time.monotonic()
    n_l = sb.angular_shannon(20, T1, T2)
    elapsed = time.monotonic() - t0
    closed = 20 ** 2 / 2 * (math.cos(T1) - math.cos(T2))
    assert n_l == pytest.approx(108.24, abs=0.01)
    assert n_l == pytest.approx(closed, abs=1e-9)
    assert elapsed < 1.0
    report("C1 angular Shannon number",
           f"N_L = {n_l:.6f}, closed form diff {abs(n_l - closed):.2e}, "
           f"{elapsed:.2f}s")


def test_c02_radial_shannon_number():
    t0 = time.monotonic()
    E = sb.E_matrix(31, 15.0, 25.0)   # radial degrees 0..30
    n_p = float(np.trace(E))
    elapsed = time.monotonic() - t0
    assert n_p == pytest.approx(3.72, abs=0.01)
    assert elapsed < 1.0
    report("C2 radial Shannon number", f"N^P = {n_p:.6f}, {elapsed:.2f}s")


def test_c03_fl_shannon_and_spectrum(ref_fl):
    n_pl = ref_fl.shannon
    total = float(ref_fl.eigenvalues.sum())
    assert n_pl == pytest.approx(403.21, abs=0.5)
    assert total == pytest.approx(n_pl, rel=1e-6)
    assert len(ref_fl) == ref_fl.band.size
    assert ref_fl.elapsed < 60.0
    report("C3 FL Shannon number and spectrum",
           f"N_PL = {n_pl:.4f}, sum(lam) = {total:.4f}, "
           f"{len(ref_fl)} eigenvalues, {ref_fl.elapsed:.1f}s")


def test_c04_fb_shannon_number(ref_region, ref_fb, ref_fb_fine):
    t0 = time.monotonic()
    analytic = sb.shannon_fb(ref_region, ref_fb.band)
    t_analytic = time.monotonic() - t0
    assert analytic == pytest.approx(408.33, abs=0.5)
    s70 = float(ref_fb.eigenvalues.sum())
    s140 = float(ref_fb_fine.eigenvalues.sum())
    assert abs(s70 - analytic) / analytic < 0.01
    assert abs(s140 - s70) / s70 < 0.002
    total_time = ref_fb.elapsed + ref_fb_fine.elapsed + t_analytic
    assert total_time < 300.0
    report("C4 FB Shannon number",
           f"analytic = {analytic:.4f}, sum(dk=0.02) = {s70:.4f} "
           f"({abs(s70 - analytic) / analytic * 100:.3f}%), halving change "
           f"{abs(s140 - s70) / s70 * 100:.4f}%, {total_time:.1f}s")


def test_c05_projection_spectrum_bounds(ref_fl, ref_fb, ref_fb_fine, ref_region):
    ranges = {
        "FL reference": ref_fl.raw_eigenvalue_range,
        "FB dk=0.02": ref_fb.raw_eigenvalue_range,
        "FB dk=0.01": ref_fb_fine.raw_eigenvalue_range,
    }
    # a mask configuration and a small FB configuration add coverage
    mask = sb.AngularMask.band(T1, T2, 12)
    res_m = sb.solve_fl(sb.ProductMask(mask, 15.0, 25.0),
                        sb.FourierLaguerreBand(8, 12), keep=1)
    ranges["FL band mask"] = res_m.raw_eigenvalue_range
    res_s = sb.solve_fb(ref_region, sb.FourierBesselBand(1.0, 8, 40), keep=1)
    ranges["FB small"] = res_s.raw_eigenvalue_range
    for name, (lo, hi) in ranges.items():
        assert lo >= -1e-9, name
        assert hi <= 1 + 1e-9, name
    worst_lo = min(r[0] for r in ranges.values())
    worst_hi = max(r[1] for r in ranges.values())
    report("C5 projection-spectrum bounds",
           f"raw eigenvalues within [{worst_lo:.2e}, 1 + {worst_hi - 1:.2e}] "
           f"over {len(ranges)} configurations")


def test_c06_orthogonality_suite(ref_region, ref_fl):
    n = 20
    band = ref_fl.band
    # coefficient-space orthonormality
    F = ref_fl.vectors(n)
    gram_c = F.conj().T @ F
    err_c = np.abs(gram_c - np.eye(n)).max()
    assert err_c < 1e-12
    # full-domain orthonormality via quadrature
    grid_full = transforms.analysis_grid(band)
    vals_full = [transforms.synthesis_fl_grid(ref_fl.coeffs(a), grid_full).reshape(-1)
                 for a in range(n)]
    err_f = 0.0
    for a in range(n):
        for b in range(a, n):
            ip = region_inner(vals_full[a], vals_full[b], grid_full)
            err_f = max(err_f, abs(ip - (1.0 if a == b else 0.0)))
    assert err_f < 1e-9
    # region orthogonality with eigenvalue weights
    grid_r = transforms.region_energy_grid(ref_region, band)
    vals_r = [transforms.synthesis_fl_grid(ref_fl.coeffs(a), grid_r).reshape(-1)
              for a in range(n)]
    err_r = 0.0
    for a in range(n):
        for b in range(a, n):
            ip = region_inner(vals_r[a], vals_r[b], grid_r)
            expect = ref_fl.eigenvalues[a] if a == b else 0.0
            err_r = max(err_r, abs(ip - expect))
    assert err_r < 1e-8
    report("C6 orthogonality suite",
           f"coefficient {err_c:.2e}, full-domain {err_f:.2e}, region {err_r:.2e}")


def test_c07_duality(ref_region, ref_fl):
    band = ref_fl.band
    grid_r = transforms.region_energy_grid(ref_region, band)
    th, ph = grid_r.angular_points()
    Y = specfun.sph_harm_matrix(band.L, th, ph)
    Kt = specfun.laguerre_K_table(band.P - 1, grid_r.radial_nodes)
    err_scale, err_energy, err_unit = 0.0, 0.0, 0.0
    for a in (0, 1, 5):
        f = ref_fl.coeffs(a)
        lam = ref_fl.eigenvalues[a]
        g = sb.space_limit(f, lam, ref_region)
        # in-band coefficients by direct quadrature of int_R g Z* dv
        vals = transforms.synthesis_fl_grid(f, grid_r).reshape(
            grid_r.radial_nodes.size, -1) / math.sqrt(lam)
        ang = (Y.conj() * grid_r.angular_weights) @ vals.T
        g_quad = (ang @ (Kt * grid_r.radial_weights).T).reshape(-1)
        err_scale = max(err_scale,
                        np.abs(g_quad - math.sqrt(lam) * f.values).max())
        assert np.abs(g.coeffs.values - math.sqrt(lam) * f.values).max() == 0.0
        # in-band spectral energy of the dual equals lam
        err_energy = max(err_energy, abs(g.coeffs.norm() ** 2 - lam))
        # spatial energy of the dual over R equals one
        energy = region_inner(vals.reshape(-1), vals.reshape(-1), grid_r).real
        err_unit = max(err_unit, abs(energy - 1.0))
    assert err_scale < 1e-8
    assert err_energy < 1e-8
    assert err_unit < 1e-8
    report("C7 duality",
           f"g = sqrt(lam) f to {err_scale:.2e}, spectral energy {err_energy:.2e}, "
           f"region energy {err_unit:.2e}")


def test_c08_analytic_vs_quadrature_oracles():
    rng = np.random.default_rng(1234)
    n_draws = 200
    err_e, err_g, err_c = 0.0, 0.0, 0.0
    for trial in range(n_draws):
        kind = trial % 3
        R1 = float(rng.uniform(0.0, 20.0))
        R2 = R1 + float(rng.uniform(0.5, 25.0))
        if kind == 0:
            P = int(rng.integers(2, 31))
            rule = specfun.gauss_legendre_rule(2 * P + 24, R1, R2)
            Kt = specfun.laguerre_K_table(P - 1, rule.nodes)
            Eq = (Kt * (rule.weights * rule.nodes ** 2)) @ Kt.T
            Ea = sb.E_matrix(P, R1, R2)
            err_e = max(err_e, float(np.abs(Ea - Eq).max()))
        elif kind == 1:
            t1 = float(rng.uniform(0.0, 2.0))
            t2 = t1 + float(rng.uniform(0.05, math.pi - t1 - 0.02))
            L = int(rng.integers(1, 21))
            m = int(rng.integers(0, L))
            rule = specfun.gauss_legendre_rule(128, t1, t2)
            Pb = specfun.norm_alf_table(L, m, rule.nodes)
            Gq = 2 * math.pi * (Pb * (rule.weights * np.sin(rule.nodes))) @ Pb.T
            Ga = sb.G_matrix(m, L, t1, t2)
            err_g = max(err_g, float(np.abs(Ga - Gq).max()))
        else:
            from scipy.special import spherical_jn
            l = int(rng.integers(0, 20))
            k = float(rng.uniform(0.02, 2.0))
            k2 = k if trial % 6 == 2 else float(rng.uniform(0.02, 2.0))
            rule = specfun.gauss_legendre_rule(400, R1, R2)
            r = rule.nodes
            cq = 2 / math.pi * k * k2 * float(np.sum(
                rule.weights * r ** 2 * spherical_jn(l, k * r)
                * spherical_jn(l, k2 * r)))
            ca = sb.C_kernel(l, l, k, k2, R1, R2)
            err_c = max(err_c, abs(ca - cq))
    assert err_e < 1e-9
    assert err_g < 1e-9
    assert err_c < 1e-9
    report("C8 analytic-vs-quadrature oracles",
           f"{n_draws} draws: E {err_e:.2e}, G {err_g:.2e}, C {err_c:.2e}")


def test_c09_trivial_region_identities():
    band = sb.FourierLaguerreBand(5, 6)
    res = sb.solve_fl(sb.full_ball(), band)
    err_lam = np.abs(res.eigenvalues - 1.0).max()
    assert err_lam < 1e-10
    assert res.shannon == pytest.approx(band.size, rel=1e-12)
    mask = sb.AngularMask.full_sphere_grid(12)
    G = sb.G_mask_matrix(mask, 12)
    err_g = np.abs(G - np.eye(144)).max()
    assert err_g < 1e-10
    report("C9 trivial-region identities",
           f"full-ball eigenvalues off unity {err_lam:.2e}, N = {res.shannon}, "
           f"full-sphere mask kernel off identity {err_g:.2e}")


def test_c10_sparsity_in_slepian_basis():
    t0 = time.monotonic()
    P = L = 16
    band = sb.FourierLaguerreBand(P, L)
    mask = sb.AngularMask.full_sphere_grid(
        L, indicator=lambda t, p: ((t > 0.9) & (t < 1.3)
                                   & (p > 0.6) & (p < 1.3)).astype(float))
    region = sb.ProductMask(mask, 15.0, 25.0)
    res = sb.solve_fl(region, band)
    J = int(math.floor(res.shannon))
    n_half = int((res.eigenvalues > 0.5).sum())
    F_in = res.vectors(n_half)
    rng = np.random.default_rng(209)
    w = rng.normal(size=band.size) + 1j * rng.normal(size=band.size)
    h_in = F_in @ (F_in.conj().T @ w)
    h_in *= math.sqrt(0.99) / np.linalg.norm(h_in)
    w2 = rng.normal(size=band.size) + 1j * rng.normal(size=band.size)
    h_out = w2 - F_in @ (F_in.conj().T @ w2)
    h_out *= math.sqrt(0.01) / np.linalg.norm(h_out)
    h = sb.HarmonicCoeffs(h_in + h_out, band)
    h_alpha = transforms.slepian_coeffs(h, res)
    q = transforms.quality_measure(h_alpha, res, J)
    assert q >= 0.99
    # unweighted energy fraction below the truncation rank
    frac = float(np.sum(np.abs(h_alpha[:J]) ** 2) / np.sum(np.abs(h_alpha) ** 2))
    assert frac >= 0.95
    idx = int(1.5 * J)
    sl_sorted = np.sort(np.abs(h_alpha))[::-1]
    fl_sorted = np.sort(np.abs(h.values))[::-1]
    sl_ratio = sl_sorted[idx - 1] / sl_sorted[0]
    fl_ratio = fl_sorted[idx - 1] / fl_sorted[0]
    assert sl_ratio < 0.01
    assert fl_ratio >= 0.01
    elapsed = time.monotonic() - t0
    assert elapsed < 120.0
    report("C10 Slepian-basis sparsity",
           f"N = {res.shannon:.2f}, Q({J}) = {q:.5f}, Slepian ratio at "
           f"1.5J = {sl_ratio:.4f}, band-coefficient ratio {fl_ratio:.3f}, "
           f"{elapsed:.1f}s")


def test_c11_rotation(ref_region, rng):
    band = sb.FourierLaguerreBand(8, 10)
    res = sb.solve_fl(ref_region, band, keep=5)
    f = res.coeffs(2)
    lam = res.eigenvalues[2]
    # zero rotation is the identity
    f0 = sb.rotate_eigenfunction(f, 0.0, 0.0)
    err_id = np.abs(f0.values - f.values).max()
    assert err_id < 1e-14
    # norm preservation for a random vector
    c = sb.HarmonicCoeffs(
        rng.normal(size=band.size) + 1j * rng.normal(size=band.size), band)
    c_rot = sb.rotate_eigenfunction(c, 0.8, 2.1)
    err_norm = abs(c_rot.norm() - c.norm())
    assert err_norm < 1e-12
    # concentration covariance under rotation
    th0, ph0 = 0.7, 1.3
    rot = sb.rotate_eigenfunction(f, th0, ph0)
    grid = transforms.region_energy_grid(ref_region, band)
    from slepian_ball.regions import _rotation_matrix
    R = _rotation_matrix(th0, ph0)
    th, ph = grid.angular_points()
    st = np.sin(th)
    xyz = R @ np.stack([st * np.cos(ph), st * np.sin(ph), np.cos(th)])
    th_r = np.arccos(np.clip(xyz[2], -1, 1))
    ph_r = np.mod(np.arctan2(xyz[1], xyz[0]), 2 * math.pi)
    n_r = grid.radial_nodes.size
    pts = np.column_stack([
        np.repeat(grid.radial_nodes, th_r.size),
        np.tile(th_r, n_r), np.tile(ph_r, n_r),
    ])
    vals = transforms.synthesis_fl(rot, pts)
    energy = region_inner(vals, vals, grid).real
    err_cov = abs(energy - lam)
    assert err_cov < 1e-6
    report("C11 rotation",
           f"identity {err_id:.2e}, norm {err_norm:.2e}, "
           f"rotated-region energy off lam by {err_cov:.2e}")


def test_c12_round_trip_and_parseval(rng):
    worst_rt, worst_pv = 0.0, 0.0
    for (P, L) in [(32, 10), (12, 32), (24, 24)]:
        band = sb.FourierLaguerreBand(P, L)
        c = sb.HarmonicCoeffs(
            rng.normal(size=band.size) + 1j * rng.normal(size=band.size), band)
        grid = transforms.analysis_grid(band)
        vals = sb.synthesis_fl_grid(c, grid)
        back = sb.analysis_fl(vals, grid, band)
        worst_rt = max(worst_rt, float(np.abs(back.values - c.values).max()))
        n_r = grid.radial_nodes.size
        energy = float((np.sum(np.abs(vals.reshape(n_r, -1)) ** 2
                               * grid.angular_weights, axis=1)
                        @ grid.radial_weights).real)
        worst_pv = max(worst_pv, abs(energy - c.norm() ** 2) / c.norm() ** 2)
    assert worst_rt < 1e-10
    assert worst_pv < 1e-10
    report("C12 transform round-trip and Parseval",
           f"round-trip {worst_rt:.2e}, energy identity {worst_pv:.2e}")
