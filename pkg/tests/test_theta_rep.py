import numpy as np
import pytest

from arczeros.geometry import phi_map
from arczeros.orthopoly import levinson
from arczeros.theta_rep import (ThetaPolyRep, coefficients_from_samples, pn_theta, qn_theta,
                                solve_phase_system)
from arczeros.weights import conformal_points, weight_from_split

rng = np.random.default_rng(3)


def interior_points(fr, n):
    # away from the pole zeta and from the arcs
    u = -fr.K * rng.uniform(0.1, 0.9, n) + 1j * fr.Kp * rng.uniform(-0.9, 0.9, n)
    return u[np.abs(u - fr.zeta) > 0.2 * fr.K]


@pytest.mark.parametrize("n", range(1, 61))
def test_phase_equations(both, n):
    fr, sp = both.frame, both.spec
    if n < sp.a + 2 + sp.v:
        return
    v = conformal_points(sp, fr)
    ph = solve_phase_system(n, fr, sp, v)
    lam = np.array([f.lam for f in sp.factors])
    mult = np.array([f.m for f in sp.factors])
    re = (2 * n + 2 * sp.w - 2 * sp.a - 1) * fr.zeta.real + np.sum(lam * mult * v.real) \
        + ph.delta * ph.b.real
    assert abs(re + ph.l * fr.K) <= 1e-10 * fr.K
    assert ph.delta in (-1, 1)
    assert (ph.l - sp.w2) % 2 == 0
    assert -fr.K < ph.b.real < 0 and -fr.Kp < ph.b.imag <= fr.Kp
    levels = [fr.zeta.imag, fr.zeta.imag + fr.Kp, -fr.zeta.imag, -fr.zeta.imag - fr.Kp]
    assert min(abs(ph.b.imag - x) for x in levels) < 1e-10
    if ph.delta == -1:
        assert ph.b.imag == pytest.approx(fr.zeta.imag + fr.Kp, abs=1e-10)


@pytest.fixture(scope="module")
def sym_w0(sym):
    # all endpoint factors in V: w = 0; the phase system does not need positivity
    return weight_from_split(sym.cfg, split="V=R")


@pytest.mark.parametrize("n", [4, 6, 10, 22])
def test_symmetric_even_degrees_w0(sym, sym_w0, n):
    ph = solve_phase_system(n, sym.frame, sym_w0)
    assert ph.l == n and ph.delta == 1 and ph.b.real == pytest.approx(-sym.frame.K / 2, abs=1e-12)


@pytest.mark.parametrize("n", [5, 7, 11, 23])
def test_symmetric_odd_degrees_w0(sym, sym_w0, n):
    ph = solve_phase_system(n, sym.frame, sym_w0)
    assert ph.l == n - 1 and ph.delta == -1 and ph.b.real == pytest.approx(-sym.frame.K / 2, abs=1e-12)


@pytest.mark.parametrize("n", range(4, 30))
def test_symmetric_mixed_split(sym, n):
    # w = 1 moves X by -K/2: l = n + 1 for even n, l = n for odd n
    ph = solve_phase_system(n, sym.frame, sym.spec)
    assert ph.b.real == pytest.approx(-sym.frame.K / 2, abs=1e-12)
    assert (ph.l, ph.delta) == ((n + 1, 1) if n % 2 == 0 else (n, -1))


def test_m_parity_is_constant(both):
    fr, sp = both.frame, both.spec
    sign = (-1) ** int(round(2 * sp.a)) * sp.F_w(fr.cfg.phi1) * sp.F_w(fr.cfg.phi4)
    for n in range(3, 40):
        assert (-1) ** solve_phase_system(n, fr, sp).m == pytest.approx(sign)


# --------------------------------------------------------------------------
# Psi and Omega
# --------------------------------------------------------------------------

@pytest.mark.parametrize("n", [7, 12])
def test_psi_is_elliptic(both, n):
    rep = ThetaPolyRep.build(n, both.frame, both.spec)
    u = interior_points(both.frame, 30)
    p = rep.psi(u)
    for shift in (2 * both.frame.K, 2j * both.frame.Kp):
        assert np.max(np.abs(rep.psi(u + shift) / p - 1)) < 1e-9


@pytest.mark.parametrize("n", [7, 12])
def test_psi_reciprocal_symmetry(both, n):
    rep = ThetaPolyRep.build(n, both.frame, both.spec)
    u = interior_points(both.frame, 100)
    assert np.max(np.abs(rep.psi(u) * rep.psi(-u) - 1)) < 1e-9


def test_psi_at_first_endpoint(both):
    rep = ThetaPolyRep.build(9, both.frame, both.spec)
    val = rep.psi(np.array([1e-9 + 1e-9j]))[0]
    assert val == pytest.approx(both.spec.F_w(both.frame.cfg.phi1), abs=1e-6)


def test_omega_against_levinson_pointwise(both):
    n = 8
    fr = both.frame
    rep = ThetaPolyRep.build(n, fr, both.spec)
    P = levinson(both.moments(n + 1), n).polys[n]
    u = interior_points(fr, 60)[:50]
    z = phi_map(u, fr)
    sym = 0.5 * (rep.omega(u) + rep.omega(-u))
    ref = P(z)
    assert np.max(np.abs(sym - ref) / np.maximum(np.abs(ref), 1)) < 1e-6


def test_monic_growth_at_infinity(both):
    n = 10
    rep = ThetaPolyRep.build(n, both.frame, both.spec)
    for eps in (1e-4, 1e-6):
        u = both.frame.zeta + eps
        z = phi_map(u, both.frame)
        val = 0.5 * (rep.omega(u) + rep.omega(-u)) / z ** n
        assert abs(val - 1) < 1e-3 * eps / 1e-4


def test_evenness_of_symmetrised_value(asym):
    rep = ThetaPolyRep.build(9, asym.frame, asym.spec)
    u = interior_points(asym.frame, 10)
    s = lambda w: 0.5 * (rep.omega(w) + rep.omega(-w))
    assert np.allclose(s(u), s(-u), rtol=1e-14)


@pytest.mark.parametrize("n", [5, 13, 30])
def test_closed_form_constant(both, n):
    rep = ThetaPolyRep.build(n, both.frame, both.spec)
    assert abs(rep.closed_form_constant() / rep.C - 1) < 1e-6


@pytest.mark.parametrize("n", [6, 9])
def test_partner_degree(both, n):
    _, rep = pn_theta(n, both.frame, both.spec)
    deg = int(round(n + 2 - 2 * both.spec.v))
    wide = coefficients_from_samples(rep.q_at, deg + 6)
    assert np.max(np.abs(wide[deg + 1:])) < 1e-9 * np.max(np.abs(wide))
    assert abs(wide[deg]) > 1e-6
    assert len(qn_theta(rep)) == deg + 1


def test_coefficients_from_samples_exact_on_polynomials():
    c = np.array([1, -2j, 0.5, 3 + 1j])
    f = lambda z: np.polynomial.polynomial.polyval(z, c)
    assert np.allclose(coefficients_from_samples(f, 3), c, atol=1e-14)
