"""Shared fixtures: the reference configuration solved once per session.

The reference setup concentrates in R = {15 <= r <= 25} x {pi/8 <= theta
<= 3pi/8} with angular band-limit L = 20.  Reference values for it:
radial Shannon number 3.7252 (31 radial degrees), angular 108.2392,
combined 403.21; Fourier-Bessel (K = 1.4) 408.33.
"""

import math
import time

import numpy as np
import pytest

import slepian_ball as sb

REF_R1, REF_R2 = 15.0, 25.0
REF_T1, REF_T2 = math.pi / 8.0, 3.0 * math.pi / 8.0


@pytest.fixture(scope="session")
def ref_region():
    return sb.ProductSymmetric(REF_R1, REF_R2, REF_T1, REF_T2)


@pytest.fixture(scope="session")
def ref_fl_band():
    # the reference radial band spans degrees p = 0..30
    return sb.FourierLaguerreBand(31, 20)


@pytest.fixture(scope="session")
def ref_fl(ref_region, ref_fl_band):
    t0 = time.monotonic()
    res = sb.solve_fl(ref_region, ref_fl_band, keep=30)
    res.elapsed = time.monotonic() - t0
    return res


@pytest.fixture(scope="session")
def ref_fb_band():
    return sb.FourierBesselBand(1.4, 20, 70)


@pytest.fixture(scope="session")
def ref_fb(ref_region, ref_fb_band):
    t0 = time.monotonic()
    res = sb.solve_fb(ref_region, ref_fb_band, keep=25)
    res.elapsed = time.monotonic() - t0
    return res


@pytest.fixture(scope="session")
def ref_fb_fine(ref_region):
    band = sb.FourierBesselBand(1.4, 20, 140)
    t0 = time.monotonic()
    res = sb.solve_fb(ref_region, band, keep=1)
    res.elapsed = time.monotonic() - t0
    return res


@pytest.fixture()
def rng():
    return np.random.default_rng(20240814)
