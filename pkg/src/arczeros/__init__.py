"""Orthogonal polynomials on two arcs of the unit circle: elliptic-function geometry,
weights with point masses, Levinson and theta-function representations, zero counts."""

from .elliptic import (EllipticModulus, ThetaConfig, complete_elliptic_K, jacobi_sn_cn_dn,
                       theta_H, theta_theta)
from .geometry import (ArcConfiguration, CurveS, EllipticFrame, build_frame, capacity, curve_s,
                       greens_function, harmonic_measure_omega2, modulus_from_cross_ratio,
                       normalize_arcs, phi_inverse, phi_map)
from .orthopoly import (MonicPolynomial, ZeroSet, levinson, orthogonal_polynomial,
                        polynomial_zeros, verify_quadratic_identity)
from .theta_rep import (PhaseSolution, ThetaPolyRep, minimal_tau, pn_theta, qn_theta,
                        solve_phase_system, t_polynomial_existence)
from .weights import (MomentTable, WeightSpec, compute_moments, evaluate_f, is_positive_definite,
                      point_masses, sqrt_R_branch, weight_from_split)
from .zeros import (StripConfig, accumulation_analysis, classify_zeros, equilibrium_check,
                    predicted_counts, zero_pipeline)

__all__ = [
    "ArcConfiguration", "CurveS", "EllipticFrame", "EllipticModulus", "MomentTable", "MonicPolynomial",
    "PhaseSolution", "StripConfig", "ThetaConfig", "ThetaPolyRep", "WeightSpec", "ZeroSet",
    "accumulation_analysis", "build_frame", "capacity", "classify_zeros", "complete_elliptic_K",
    "compute_moments", "curve_s", "equilibrium_check", "evaluate_f", "greens_function",
    "harmonic_measure_omega2", "is_positive_definite", "jacobi_sn_cn_dn", "levinson", "minimal_tau",
    "modulus_from_cross_ratio", "normalize_arcs", "orthogonal_polynomial", "phi_inverse", "phi_map",
    "pn_theta", "point_masses", "polynomial_zeros", "predicted_counts", "qn_theta",
    "solve_phase_system", "sqrt_R_branch", "t_polynomial_existence", "theta_H", "theta_theta",
    "verify_quadratic_identity", "weight_from_split", "zero_pipeline",
]

__version__ = "0.1.0"
