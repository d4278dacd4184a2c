import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.polynomial import polynomial as npoly

from arczeros.orthopoly import (DegenerateFunctionalError, MonicPolynomial, dense_orthogonal,
                                evaluate_by_recursion, levinson, orthogonal_polynomial,
                                polynomial_zeros, szego_discrete, verify_quadratic_identity,
                                zeros_from_reflection)
from arczeros.theta_rep import pn_theta, qn_theta
from arczeros.weights import compute_moments, discretize_functional, weight_from_split

from oracles import gram_schmidt, mp_levinson, mp_roots

rng = np.random.default_rng(5)


def test_degree_zero_and_one(both):
    mt = compute_moments(both.spec, 3)
    assert np.allclose(orthogonal_polynomial(mt, 0).coeffs, [1])
    P1 = orthogonal_polynomial(mt, 1)
    assert np.allclose(P1.coeffs, [-np.conj(mt.c[1]) / mt.c[0], 1], atol=1e-15)


def test_monic_exactly():
    P = MonicPolynomial(np.array([1.0, 2.0, 0.999999]))
    assert P.coeffs[-1] == 1 and P.degree == 2


def test_against_gram_schmidt(both):
    mt = both.moments(11)
    P = levinson(mt, 10).polys[10]
    ref = gram_schmidt(mt.exact, 10, dps=mt.dps + 10)
    assert np.max(np.abs(P.coeffs - ref)) <= 1e-8 * np.max(np.abs(ref))


def test_against_mp_levinson(both):
    mt = both.moments(31)
    lev = levinson(mt, 30)
    ref = mp_levinson(mt.exact, 30, dps=mt.dps)
    for n in (5, 17, 30):
        assert np.max(np.abs(lev.polys[n].coeffs - np.array(ref[n]))) < 1e-12 * np.max(np.abs(ref[n]))


def test_levinson_matches_dense_solve(both):
    mt = compute_moments(both.spec, 12)
    lev = levinson(mt, 8)
    for n in range(1, 9):
        assert np.allclose(lev.polys[n].coeffs, dense_orthogonal(mt, n).coeffs, atol=1e-9)


def test_discrete_szego_matches_at_low_degree(asym):
    d = discretize_functional(asym.spec, nodes=1024)
    a = szego_discrete(d, 10)
    b = levinson(asym.moments(11), 10)
    assert np.allclose(a.reflection, b.reflection, atol=1e-10)


@pytest.mark.parametrize("n", [10, 25, 40])
def test_orthogonality(both, n):
    mt = both.moments(41)
    P = levinson(mt, n).polys[n]
    vals = [abs(sum(P.coeffs[i] * mt[k - i] for i in range(n + 1))) for k in range(n)]
    assert max(vals) <= 1e-9 * mt.c[0].real


def test_norms_decrease_and_stay_positive(both):
    lev = levinson(both.moments(41), 40)
    assert np.all(lev.norms > 0) and np.all(np.diff(lev.norms) <= 0)
    assert np.all(np.abs(lev.reflection) < 1)


def test_degenerate_functional_is_reported(sym):
    mt = compute_moments(weight_from_split(sym.cfg, split="V=R"), 6, normalize_sign=False)
    with pytest.raises(DegenerateFunctionalError):
        levinson(mt, 4)


# --------------------------------------------------------------------------
# zeros
# --------------------------------------------------------------------------

def test_quadratic_roots():
    z = np.sort_complex(polynomial_zeros(MonicPolynomial(np.array([1, 0, 1.0]))).zeros)
    assert np.allclose(z, [-1j, 1j], atol=1e-15)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_roots_recovered(seed):
    r = np.random.default_rng(seed)
    roots = r.uniform(0.2, 0.95, 15) * np.exp(2j * np.pi * r.uniform(size=15))
    # keep the roots separated so they are well conditioned
    if np.min(np.abs(np.subtract.outer(roots, roots)) + np.eye(15)) < 0.15:
        return
    zs = polynomial_zeros(MonicPolynomial(npoly.polyfromroots(roots)), polish=2).zeros
    d = np.abs(np.subtract.outer(zs, roots))
    assert np.max(np.min(d, axis=1)) < 1e-9


def test_roots_against_mpmath(asym):
    lev = levinson(asym.moments(21), 20)
    got = zeros_from_reflection(lev.reflection, 20).zeros
    ref = mp_roots(lev.polys[20].coeffs)
    d = np.abs(np.subtract.outer(got, ref))
    assert np.max(np.min(d, axis=1)) < 1e-9


def test_recursion_evaluates_the_polynomial(asym):
    lev = levinson(asym.moments(16), 15)
    z = rng.standard_normal(6) + 1j * rng.standard_normal(6)
    p, dp = evaluate_by_recursion(lev.reflection, z, 15)
    P = lev.polys[15]
    assert np.allclose(p, P(z), rtol=1e-10)
    assert np.allclose(dp, npoly.polyval(z, npoly.polyder(P.coeffs)), rtol=1e-9)


def test_zeros_strictly_inside_without_masses(sym):
    lev = levinson(sym.moments(41), 40)
    for n in (5, 12, 20, 30, 40):
        z = zeros_from_reflection(lev.reflection, n).zeros
        assert len(z) == n and np.max(np.abs(z)) < 1 - 1e-6


def test_zeros_inside_with_a_mass(asym):
    # the zero attracted by the mass point approaches the circle geometrically
    lev = levinson(asym.moments(41), 40)
    for n in (10, 20, 30):
        z = zeros_from_reflection(lev.reflection, n)
        assert np.all(np.abs(z.zeros) < 1) and np.all(z.residuals < 1e-8)


def test_origin_is_not_a_zero(asym):
    lev = levinson(asym.moments(41), 40)
    assert all(abs(lev.polys[n](0.0)) > 1e-6 for n in range(1, 41))


def test_symmetric_odd_degrees_vanish_at_origin(sym):
    # invariance under z -> -z makes P_n of odd degree an odd polynomial; its zero
    # at the origin is the stray zero predicted on S
    lev = levinson(sym.moments(41), 40)
    for n in range(1, 41):
        v = abs(lev.polys[n](0.0))
        assert (v < 1e-12) if n % 2 else (v > 1e-6)


# --------------------------------------------------------------------------
# quadratic identity with the second-kind partner
# --------------------------------------------------------------------------

@pytest.mark.parametrize("n", [8, 12, 20])
def test_quadratic_identity(both, n):
    P = levinson(both.moments(21), 20).polys[n]
    _, rep = pn_theta(n, both.frame, both.spec)
    rpt = verify_quadratic_identity(P, qn_theta(rep), both.spec)
    assert rpt.residual <= 1e-7 and rpt.low_order <= 1e-7
    assert abs(rpt.origin_ratio - 1) <= 1e-7
    assert all(r <= 1e-7 for r in rpt.mass_residuals)


def test_identity_detects_a_wrong_partner(asym):
    P = levinson(asym.moments(13), 12).polys[12]
    _, rep = pn_theta(12, asym.frame, asym.spec)
    Q = qn_theta(rep).copy()
    Q[1] += 1e-3
    assert verify_quadratic_identity(P, Q, asym.spec).residual > 1e-6
