"""Moments of an arc weight, Szego polynomials by Levinson, and their theta form.

The same P_n is built twice: once from the moment sequence and once from
theta functions on the elliptic box. The two agree to many digits.

Run:  python demos/moments_and_polynomials.py
"""

import numpy as np

from arczeros import (build_frame, compute_moments, is_positive_definite, levinson, normalize_arcs,
                      pn_theta, qn_theta, verify_quadratic_identity, weight_from_split)
from arczeros.weights import dps_for_degree, evaluate_f

raw = (0.6, 1.8, 3.5, 2 * np.pi - 0.6)
cfg = normalize_arcs(raw)
fr = build_frame(cfg)
# W = R split, with a mass-producing factor in the upper gap
spec = weight_from_split(cfg, factors=[(2.65 - cfg.rotation_psi, 1, -1), (0.0 - cfg.rotation_psi, 1, 1)],
                         split="W=R")

phi = np.linspace(cfg.phi1, cfg.phi2, 5)[1:-1]
print("weight on arc 1:", np.round(evaluate_f(phi, spec), 6))

N = 25
mt = compute_moments(spec, N + 1, nodes=128, dps=dps_for_degree(N + 1))
print("first moments:", np.round(np.asarray(mt.c[:4], dtype=complex), 8))
print("Toeplitz sections positive definite:", is_positive_definite(mt, N)[0])

lev = levinson(mt, N)
print("reflection coefficients |alpha_k|:", np.round(np.abs(np.asarray(lev.reflection[:8], dtype=complex)), 5))

print("\n  n   max|theta - Levinson| / max|P_n|")
for n in (6, 12, 18, 24):
    theta, rep = pn_theta(n, fr, spec)
    ref = lev.polys[n].coeffs
    print(f"{n:>3}   {np.max(np.abs(theta - ref)) / np.max(np.abs(ref)):.2e}")

# the quadratic identity that ties P_n to its second-kind partner Q_n
n = 12
_, rep = pn_theta(n, fr, spec)
r = verify_quadratic_identity(lev.polys[n], qn_theta(rep), spec)
print(f"\nquadratic identity at n = {n}: residual {r.residual:.1e}, origin ratio {r.origin_ratio:.12f}")
