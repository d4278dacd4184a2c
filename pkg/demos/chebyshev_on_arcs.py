"""Weighted Chebyshev polynomials on two symmetric arcs.

For the quarter-point arcs with the mixed split, tau_nu exists for every
integer nu; half-integer degrees have no such extremal polynomial.

Run:  python demos/chebyshev_on_arcs.py
"""

import numpy as np

from arczeros import build_frame, minimal_tau, normalize_arcs, t_polynomial_existence, weight_from_split
from arczeros.theta_rep import pell_identity

cfg = normalize_arcs((np.pi / 4, 3 * np.pi / 4, 5 * np.pi / 4, 7 * np.pi / 4))
fr, spec = build_frame(cfg), weight_from_split(cfg, split="mixed")

for nu in (0.5, 1, 1.5, 2, 3):
    ex = t_polynomial_existence(nu, fr, spec)
    print(f"nu = {nu:<4} exists = {ex.exists!s:<5} l = {ex.l_nu}")

print("\n nu  endpoint |tau|/sqrt(A) - 1    Pell residual")
for nu in range(1, 6):
    tp = minimal_tau(nu, fr, spec)
    r = np.abs(np.real(tp.tau(cfg.angles))) / np.sqrt(spec.calA(cfg.angles))
    print(f"{nu:>3}  {np.max(np.abs(r - 1)):.1e}                  {pell_identity(tp).residual:.1e}")

# equioscillation: sign changes of tau along the first arc
tp = minimal_tau(4, fr, spec)
phi = np.linspace(cfg.phi1, cfg.phi2, 2001)
t = np.real(tp.tau(phi))
print("\nsign changes of tau_4 on arc 1:", int(np.sum(np.diff(np.sign(t)) != 0)))
print("max |tau_4| on arc 1:", round(float(np.max(np.abs(t) / np.sqrt(spec.calA(phi)))), 10))
