#!/usr/bin/env python3
"""Shannon-number curves for the reference region.

Writes two CSVs: the Fourier-Bessel count as a function of the band-limit
K, and the Fourier-Laguerre count as a function of the radial band-limit P,
both at angular band-limit L = 20 over R = [15, 25] x [pi/8, 3pi/8].

Usage: python scripts/shannon_curves.py [outdir]
"""

import math
import sys
from pathlib import Path

import numpy as np

import slepian_ball as sb

OUT = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("shannon_curves_out")
OUT.mkdir(parents=True, exist_ok=True)

region = sb.ProductSymmetric(15.0, 25.0, math.pi / 8, 3 * math.pi / 8)
L = 20

rows = ["K,shannon_fb"]
for K in np.linspace(0.1, 2.0, 39):
    n = sb.shannon_fb(region, sb.FourierBesselBand(float(K), L, 10))
    rows.append(f"{K:.17g},{n:.17g}")
(OUT / "shannon_fb_vs_K.csv").write_text("\n".join(rows) + "\n")

rows = ["P,shannon_fl"]
for P in range(1, 61):
    n = sb.shannon_fl(region, sb.FourierLaguerreBand(P, L))
    rows.append(f"{P},{n:.17g}")
(OUT / "shannon_fl_vs_P.csv").write_text("\n".join(rows) + "\n")

print(f"wrote {OUT}/shannon_fb_vs_K.csv and {OUT}/shannon_fl_vs_P.csv")
