"""Two arcs on the unit circle and the elliptic box that parametrizes them.

Run:  python demos/geometry_tour.py
"""

import math

import numpy as np

from arczeros import build_frame, capacity, harmonic_measure_omega2, normalize_arcs, phi_inverse, phi_map
from arczeros.geometry import greens_function, robin_limit

# quarter points first, then a lopsided pair
for raw in [(math.pi / 4, 3 * math.pi / 4, 5 * math.pi / 4, 7 * math.pi / 4),
            (0.6, 1.8, 3.5, 2 * math.pi - 0.6)]:
    cfg = normalize_arcs(raw)
    fr = build_frame(cfg)
    print("arcs (rad):", np.round(raw, 4), " rotation psi =", round(cfg.rotation_psi, 6))
    print(f"  k = {fr.modulus.k:.12f}  K = {fr.K:.12f}  K' = {fr.Kp:.12f}")

    # the four corners of the box land on the four endpoints
    corners = np.array([0, 1j * fr.Kp, -fr.K + 1j * fr.Kp, -fr.K])
    print("  corner error:", f"{np.max(np.abs(phi_map(corners, fr) - cfg.endpoints)):.1e}")

    # vertical sides go to the circle, the upper half inside, the lower half outside
    y = fr.Kp * np.linspace(-0.95, 0.95, 9)
    print("  |phi| on Re u = 0:", np.round(np.abs(phi_map(1j * y, fr)), 12))
    u = -fr.K / 3 + 0.5j * fr.Kp
    print(f"  |phi(u)| upper = {abs(phi_map(u, fr)):.4f}, lower = {abs(phi_map(np.conj(u), fr)):.4f}")

    # inverse map round trip
    back = phi_inverse(phi_map(u, fr), fr)[0]
    print(f"  round trip error {abs(back - u):.1e}")

    # potential theory: Green's function vanishes on E, capacity matches the Robin constant
    phi = np.linspace(cfg.phi1, cfg.phi2, 7)[1:-1]
    print("  g on arc 1:", f"{np.max(np.abs(greens_function(np.exp(1j * phi), None, fr))):.1e}")
    print(f"  capacity {capacity(fr):.12f}  exp(-Robin) {math.exp(-robin_limit(fr)):.12f}")
    print(f"  harmonic measure of arc 2: {harmonic_measure_omega2(fr):.12f}")
    print()

# shrinking gaps: the capacity tends to 1, the capacity of the full circle
for g in (0.5, 0.1, 0.01):
    fr = build_frame(normalize_arcs((g / 2, math.pi - g / 2, math.pi + g / 2, 2 * math.pi - g / 2)))
    print(f"gap {g:<5}  capacity {capacity(fr):.8f}")
