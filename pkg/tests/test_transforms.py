"""Transform and Slepian-representation tests."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import slepian_ball as sb
from slepian_ball import transforms
from slepian_ball.kernels import fb_k_weights

T1, T2 = math.pi / 8, 3 * math.pi / 8


def random_coeffs(band, rng):
    return sb.HarmonicCoeffs(
        rng.normal(size=band.size) + 1j * rng.normal(size=band.size), band)


# ---------------------------------------------------------------------------
# Fourier-Laguerre synthesis / analysis
# ---------------------------------------------------------------------------

def test_synthesis_single_coefficient():
    band = sb.FourierLaguerreBand(3, 3)
    vec = np.zeros(band.size, dtype=complex)
    vec[band.flat_index(0, 0, 0)] = 1.0
    c = sb.HarmonicCoeffs(vec, band)
    pts = [sb.BallPoint(2.0, 0.7, 1.1), sb.BallPoint(11.0, 2.0, 0.0)]
    vals = sb.synthesis_fl(c, pts)
    for p, v in zip(pts, vals):
        assert v == pytest.approx(
            sb.laguerre_K(0, p.r) / math.sqrt(4 * math.pi), rel=1e-14)


def test_round_trip_random_band_limited(rng):
    for (P, L) in [(4, 4), (16, 8), (32, 12)]:
        band = sb.FourierLaguerreBand(P, L)
        c = random_coeffs(band, rng)
        grid = transforms.analysis_grid(band)
        vals = sb.synthesis_fl_grid(c, grid)
        back = sb.analysis_fl(vals, grid, band)
        assert np.abs(back.values - c.values).max() < 1e-10


def test_parseval(rng):
    band = sb.FourierLaguerreBand(10, 8)
    c = random_coeffs(band, rng)
    grid = transforms.analysis_grid(band)
    vals = sb.synthesis_fl_grid(c, grid)
    n_r = grid.radial_nodes.size
    energy = float((np.sum(np.abs(vals.reshape(n_r, -1)) ** 2
                           * grid.angular_weights, axis=1) @ grid.radial_weights).real)
    assert energy == pytest.approx(c.norm() ** 2, rel=1e-10)


def test_synthesis_linearity(rng):
    band = sb.FourierLaguerreBand(4, 4)
    x = random_coeffs(band, rng)
    y = random_coeffs(band, rng)
    a, b = 1.7 - 0.3j, -0.4 + 2.2j
    pts = [sb.BallPoint(3.0, 1.0, 2.0), sb.BallPoint(17.0, 0.4, 5.0)]
    lhs = sb.synthesis_fl(
        sb.HarmonicCoeffs(a * x.values + b * y.values, band), pts)
    rhs = a * sb.synthesis_fl(x, pts) + b * sb.synthesis_fl(y, pts)
    assert np.abs(lhs - rhs).max() < 1e-13 * max(1.0, np.abs(rhs).max())


def test_analysis_constant_times_k0():
    band = sb.FourierLaguerreBand(4, 3)
    grid = transforms.analysis_grid(band)
    n_r, n_t, n_p = (grid.radial_nodes.size, grid.theta_nodes.size,
                     grid.phi_nodes.size)
    vals = np.empty((n_r, n_t, n_p), dtype=complex)
    K0 = sb.laguerre_K(0, grid.radial_nodes)
    vals[:] = (K0 / math.sqrt(4 * math.pi))[:, None, None]
    c = sb.analysis_fl(vals, grid, band)
    expect = np.zeros(band.size)
    expect[band.flat_index(0, 0, 0)] = 1.0
    assert np.abs(c.values - expect).max() < 1e-12


def test_analysis_grid_band_mismatch():
    band_small = sb.FourierLaguerreBand(4, 4)
    band_big = sb.FourierLaguerreBand(4, 8)
    grid = transforms.analysis_grid(band_small)
    vals = np.zeros((grid.radial_nodes.size,
                     grid.theta_nodes.size * grid.phi_nodes.size))
    with pytest.raises(ValueError):
        sb.analysis_fl(vals, grid, band_big)


# ---------------------------------------------------------------------------
# Fourier-Bessel synthesis
# ---------------------------------------------------------------------------

def test_fb_synthesis_single_coefficient():
    band = sb.FourierBesselBand(1.2, 3, 8)
    w = fb_k_weights(band)
    n = 4  # interior sample, weight dk
    vec = np.zeros(band.size, dtype=complex)
    vec[band.flat_index(1, 0, n)] = 1.0
    c = sb.HarmonicCoeffs(vec, band)
    p = sb.BallPoint(7.0, 0.9, 0.4)
    k = band.k_samples[n - 1]
    x_val = (math.sqrt(2 / math.pi) * k * sb.spherical_bessel_j(1, k * p.r)
             * sb.spherical_harmonic(1, 0, p.theta, p.phi))
    got = sb.synthesis_fb(c, [p])[0]
    assert got == pytest.approx(w[n - 1] * x_val, rel=1e-13)
    assert w[n - 1] == pytest.approx(band.dk)


def test_fb_synthesis_linearity(rng):
    band = sb.FourierBesselBand(1.0, 3, 6)
    x = random_coeffs(band, rng)
    y = random_coeffs(band, rng)
    pts = [sb.BallPoint(8.0, 1.2, 0.3)]
    a, b = 0.3 + 1.1j, -2.0
    lhs = sb.synthesis_fb(sb.HarmonicCoeffs(a * x.values + b * y.values, band), pts)
    rhs = a * sb.synthesis_fb(x, pts) + b * sb.synthesis_fb(y, pts)
    assert np.abs(lhs - rhs).max() < 1e-13 * max(1.0, np.abs(rhs).max())


# ---------------------------------------------------------------------------
# Slepian projection
# ---------------------------------------------------------------------------

@pytest.fixture(scope="module")
def small_basis():
    region = sb.ProductSymmetric(15.0, 25.0, T1, T2)
    band = sb.FourierLaguerreBand(6, 5)
    return sb.solve_fl(region, band)


def test_project_eigenfunction_gives_unit_vector(small_basis):
    h = small_basis.coeffs(7)
    h_alpha = sb.slepian_coeffs(h, small_basis)
    expect = np.zeros(len(small_basis))
    expect[7] = 1.0
    assert np.abs(h_alpha - expect).max() < 1e-12


def test_projection_energy_identity(small_basis, rng):
    h = random_coeffs(small_basis.band, rng)
    h_alpha = sb.slepian_coeffs(h, small_basis)
    assert np.sum(np.abs(h_alpha) ** 2) == pytest.approx(
        np.sum(np.abs(h.values) ** 2), rel=1e-12)


def test_truncate_full_count_is_exact(small_basis, rng):
    h = random_coeffs(small_basis.band, rng)
    h_alpha = sb.slepian_coeffs(h, small_basis)
    back = sb.truncate_reconstruct(h_alpha, small_basis, len(small_basis))
    assert np.abs(back.values - h.values).max() < 1e-12


def test_truncate_zero_gives_zero(small_basis, rng):
    h_alpha = sb.slepian_coeffs(random_coeffs(small_basis.band, rng), small_basis)
    back = sb.truncate_reconstruct(h_alpha, small_basis, 0)
    assert np.abs(back.values).max() == 0.0


def test_truncate_range_error(small_basis):
    with pytest.raises(ValueError):
        sb.truncate_reconstruct(np.ones(4), small_basis, 5)


def test_quality_full_is_one(small_basis, rng):
    h_alpha = sb.slepian_coeffs(random_coeffs(small_basis.band, rng), small_basis)
    assert sb.quality_measure(h_alpha, small_basis, h_alpha.size) == 1.0


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_quality_monotone(small_basis, seed):
    rng = np.random.default_rng(seed)
    h_alpha = rng.normal(size=len(small_basis)) + 1j * rng.normal(size=len(small_basis))
    qs = [sb.quality_measure(h_alpha, small_basis, j)
          for j in range(0, len(small_basis) + 1, 25)]
    assert all(b >= a - 1e-15 for a, b in zip(qs, qs[1:]))


def test_quality_zero_energy_guard(small_basis):
    with pytest.raises(ZeroDivisionError):
        sb.quality_measure(np.zeros(len(small_basis)), small_basis, 1)


def test_quality_closed_form_matches_spatial_definition(rng):
    # both sides of the identity by quadrature at P = L = 8
    region = sb.ProductSymmetric(15.0, 25.0, T1, T2)
    band = sb.FourierLaguerreBand(8, 8)
    basis = sb.solve_fl(region, band)
    h = random_coeffs(band, rng)
    h_alpha = sb.slepian_coeffs(h, basis)
    J = 40
    q_closed = sb.quality_measure(h_alpha, basis, J)
    grid = transforms.region_energy_grid(region, band)
    trunc = sb.truncate_reconstruct(h_alpha, basis, J)
    vals_J = sb.synthesis_fl_grid(trunc, grid).reshape(grid.radial_nodes.size, -1)
    vals_f = sb.synthesis_fl_grid(h, grid).reshape(grid.radial_nodes.size, -1)

    def region_energy(v):
        return float((np.sum(np.abs(v) ** 2 * grid.angular_weights, axis=1)
                      @ grid.radial_weights).real)

    q_spatial = region_energy(vals_J) / region_energy(vals_f)
    assert q_closed == pytest.approx(q_spatial, abs=1e-6)


def test_band_mismatch_error(small_basis, rng):
    other = sb.FourierLaguerreBand(3, 3)
    h = random_coeffs(other, rng)
    with pytest.raises(ValueError):
        sb.slepian_coeffs(h, small_basis)
