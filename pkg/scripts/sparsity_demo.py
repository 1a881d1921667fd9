#!/usr/bin/env python3
"""Sparse Slepian representation of a concentrated band-limited signal.

Builds a synthetic signal at P = L = 16 concentrated in an angular-patch x
radial-shell region, projects it onto the concentration eigenbasis, and
writes the sorted coefficient-decay curves plus the Q(J) accuracy table.

Usage: python scripts/sparsity_demo.py [outdir]
"""

import json
import math
import sys
from pathlib import Path

import numpy as np

import slepian_ball as sb
from slepian_ball import transforms

OUT = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("sparsity_demo_out")
OUT.mkdir(parents=True, exist_ok=True)

P = L = 16
band = sb.FourierLaguerreBand(P, L)
mask = sb.AngularMask.full_sphere_grid(
    L, indicator=lambda t, p: ((t > 0.9) & (t < 1.3)
                               & (p > 0.6) & (p < 1.3)).astype(float))
region = sb.ProductMask(mask, 15.0, 25.0)
res = sb.solve_fl(region, band)
J = int(math.floor(res.shannon))
n_half = int((res.eigenvalues > 0.5).sum())

rng = np.random.default_rng(209)
F_in = res.vectors(n_half)
w = rng.normal(size=band.size) + 1j * rng.normal(size=band.size)
h_in = F_in @ (F_in.conj().T @ w)
h_in *= math.sqrt(0.99) / np.linalg.norm(h_in)
w2 = rng.normal(size=band.size) + 1j * rng.normal(size=band.size)
h_out = w2 - F_in @ (F_in.conj().T @ w2)
h_out *= math.sqrt(0.01) / np.linalg.norm(h_out)
h = sb.HarmonicCoeffs(h_in + h_out, band)

h_alpha = transforms.slepian_coeffs(h, res)
sl = np.sort(np.abs(h_alpha))[::-1]
fl = np.sort(np.abs(h.values))[::-1]
rows = ["index,abs_fl_sorted,abs_slepian_sorted"]
rows += [f"{i + 1},{fl[i]:.17g},{sl[i]:.17g}" for i in range(band.size)]
(OUT / "decay.csv").write_text("\n".join(rows) + "\n")

q_table = {str(j): transforms.quality_measure(h_alpha, res, j)
           for j in (max(J // 2, 1), J, 2 * J, band.size)}
(OUT / "q.json").write_text(json.dumps(
    {"shannon": res.shannon, "J": J, "n_above_half": n_half, "Q": q_table},
    indent=2) + "\n")

print(f"N = {res.shannon:.2f}, J = {J}, Q(J) = {q_table[str(J)]:.5f}")
print(f"wrote {OUT}/decay.csv and {OUT}/q.json")
