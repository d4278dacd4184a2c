"""Where the zeros of P_n go: counts per arc, stray zeros and an SVG picture.

Writes demos/out/zeros_n30.svg.

Run:  python demos/zero_counts.py
"""

import os

import numpy as np

from arczeros import build_frame, curve_s, equilibrium_check, normalize_arcs, weight_from_split, zero_pipeline
from arczeros.output import svg_figure, write_text
from arczeros.zeros import accumulation_analysis, find_n0, gap_profile

cfg = normalize_arcs((0.6, 1.8, 3.5, 2 * np.pi - 0.6))
fr = build_frame(cfg)
spec = weight_from_split(cfg, factors=[(2.65 - cfg.rotation_psi, 1, -1), (0.0 - cfg.rotation_psi, 1, 1)],
                         split="W=R")

recs = zero_pipeline(fr, spec, range(5, 41))
print("  n  predicted (k1,k2)  observed  strays  Re b / K")
for r in recs[::5]:
    print(f"{r.n:>3}  {(r.predicted.k1, r.predicted.k2)!s:>17}  {r.observed!s:>8}"
          f"  {int(r.classification.strays.sum()):>6}  {r.phase.b.real / fr.K:+.4f}")
print("counts agree from n0 =", find_n0(recs))

# the share of zeros near arc 2 approaches its harmonic measure
row = equilibrium_check(recs[-1:], fr)[0]
print(f"n = {row.n}: share near arc 2 = {row.fraction_strip2:.4f}, omega2 = {row.omega2:.4f}")

acc = accumulation_analysis(recs[15:], fr, spec)
print(f"omega2 rational? {acc.omega2_rational.rational}; median stray distance to S "
      f"{acc.median_distance(20, 29):.1e} (n 20-29), {acc.median_distance(30, 40):.1e} (n 30-40)")
print("largest gap in predicted stray positions:",
      ", ".join(f"N={N}: {g:.1e}" for N, g in gap_profile(fr, spec, decades=(10, 100, 1000))))

# figure in the original orientation
rot = np.exp(1j * cfg.rotation_psi)
z = recs[-11].zeros * rot
arcs = [(0.6, 1.8), (3.5, 2 * np.pi - 0.6)]
svg = svg_figure(arcs, curve=curve_s(fr).samples * rot, zeros=z, masses=[np.exp(2.65j)], title="zeros of P_30")
os.makedirs(os.path.join(os.path.dirname(__file__), "out"), exist_ok=True)
path = os.path.join(os.path.dirname(__file__), "out", "zeros_n30.svg")
write_text(path, svg)
print("wrote", path)
