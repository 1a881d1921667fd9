#!/usr/bin/env python3
"""Eigenvalue spectra for the reference region, four panels as CSV.

Panels: (a) Fourier-Bessel spectrum at K = 1.4, dk = 0.02; (b) combined
Fourier-Laguerre spectrum for radial degrees 0..30, L = 20; (c) the radial
factor spectrum; (d) the angular factor spectrum.  Each CSV carries the
rank, the eigenvalue, and the Shannon number in a header comment.

Usage: python scripts/eigen_spectra.py [outdir] [--skip-fb]
"""

import math
import sys
from pathlib import Path

import numpy as np

import slepian_ball as sb

args = [a for a in sys.argv[1:] if not a.startswith("--")]
OUT = Path(args[0]) if args else Path("eigen_spectra_out")
OUT.mkdir(parents=True, exist_ok=True)
skip_fb = "--skip-fb" in sys.argv

region = sb.ProductSymmetric(15.0, 25.0, math.pi / 8, 3 * math.pi / 8)
L = 20


def dump(name, lams, shannon, extra=""):
    rows = [f"# shannon = {shannon:.17g}{extra}", "rank,lambda"]
    rows += [f"{i + 1},{v:.17g}" for i, v in enumerate(lams)]
    (OUT / name).write_text("\n".join(rows) + "\n")
    print(f"{name}: {lams.size} eigenvalues, shannon {shannon:.4f}")


band_fl = sb.FourierLaguerreBand(31, L)
res_fl = sb.solve_fl(region, band_fl, keep=1)
dump("spectrum_fl.csv", res_fl.eigenvalues, res_fl.shannon)

E = sb.E_matrix(band_fl.P, region.R1, region.R2)
lam_rad = np.sort(np.linalg.eigvalsh(E))[::-1]
dump("spectrum_fl_radial.csv", lam_rad, float(np.trace(E)))

lam_ang = []
for m in range(L):
    ev = np.linalg.eigvalsh(sb.G_matrix(m, L, region.theta1, region.theta2))
    mult = 2 if m > 0 else 1
    lam_ang.extend(list(ev) * mult)
lam_ang = np.sort(np.array(lam_ang))[::-1]
dump("spectrum_fl_angular.csv", lam_ang,
     sb.angular_shannon(L, region.theta1, region.theta2))

if not skip_fb:
    band_fb = sb.FourierBesselBand(1.4, L, 70)
    res_fb = sb.solve_fb(region, band_fb, keep=1)
    dump("spectrum_fb.csv", res_fb.eigenvalues, res_fb.shannon,
         extra=f", dk = {band_fb.dk:.17g}")
