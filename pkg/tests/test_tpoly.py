import math

import numpy as np
import pytest

from arczeros.geometry import build_frame, normalize_arcs
from arczeros.theta_rep import (TPolynomialError, minimal_tau, pell_identity,
                                t_polynomial_existence)
from arczeros.weights import weight_from_split

from conftest import ASYM, QUARTER
from oracles import lp_minimax


@pytest.fixture(scope="module")
def plain():
    cfg = normalize_arcs(QUARTER)
    return build_frame(cfg), weight_from_split(cfg, split="mixed")


@pytest.fixture(scope="module")
def weighted():
    # calA = sin^2(phi/2): a double zero in the gap containing phi = 0
    cfg = normalize_arcs(QUARTER)
    return build_frame(cfg), weight_from_split(cfg, factors=[(0.0, 2, 1)], split="V=R")


def endpoint_ratios(tp):
    sp = tp.spec
    phi = sp.cfg.angles
    return np.abs(tp.tau(phi).real) / np.sqrt(np.abs(sp.calA(phi)))


@pytest.mark.parametrize("nu", range(1, 9))
def test_existence_integer_orders(plain, nu):
    ex = t_polynomial_existence(nu, *plain)
    assert ex.exists and ex.l_nu == 2 * nu and ex.residual < 1e-12


@pytest.mark.parametrize("nu", [0.5, 1.5, 2.5, 3.5])
def test_half_integer_orders_fail(plain, nu):
    # l = 2 nu is odd: the LP oracle confirms no polynomial has all endpoints extremal
    ex = t_polynomial_existence(nu, *plain)
    assert not ex.exists
    with pytest.raises(TPolynomialError):
        minimal_tau(nu, *plain)


def test_irrational_configuration_has_none():
    cfg = normalize_arcs(ASYM)
    fr, sp = build_frame(cfg), weight_from_split(cfg, split="mixed")
    assert not any(t_polynomial_existence(k / 2, fr, sp).exists for k in range(1, 201))


def test_order_must_exceed_a(weighted):
    with pytest.raises(TPolynomialError):
        t_polynomial_existence(1, *weighted)
    with pytest.raises(ValueError):
        t_polynomial_existence(1.3, *weighted)


@pytest.mark.parametrize("nu", [1, 2, 3, 5])
def test_extremal_properties(plain, nu):
    tp = minimal_tau(nu, *plain)
    phi = np.concatenate([np.linspace(math.pi / 4, 3 * math.pi / 4, 300),
                          np.linspace(5 * math.pi / 4, 7 * math.pi / 4, 300)])
    t = tp.tau(phi)
    assert np.max(np.abs(t.imag)) < 1e-10
    assert np.max(np.abs(t.real)) <= 1 + 1e-10
    assert np.all(np.abs(endpoint_ratios(tp) - 1) < 1e-8)


def test_low_orders_in_closed_form(plain):
    phi = np.linspace(math.pi / 4, 3 * math.pi / 4, 11)
    t1 = minimal_tau(1, *plain).tau(phi).real
    ref1 = math.sqrt(2) * np.cos(phi)
    assert np.allclose(t1, ref1, atol=1e-10) or np.allclose(t1, -ref1, atol=1e-10)
    t2 = minimal_tau(2, *plain).tau(phi).real
    ref2 = 2 * (np.cos(2 * phi) + 0.5)
    assert np.allclose(t2, ref2, atol=1e-10) or np.allclose(t2, -ref2, atol=1e-10)


@pytest.mark.parametrize("nu", [1, 2, 3, 4, 6])
def test_pell_identity(plain, nu):
    rep = pell_identity(minimal_tau(nu, *plain))
    assert rep.residual <= 1e-7 and rep.tail < 1e-8 * np.max(np.abs(rep.P))
    assert len(rep.P) == 2 * nu + 1


@pytest.mark.parametrize("nu", [2, 3])
def test_pell_identity_with_weight(weighted, nu):
    tp = minimal_tau(nu, *weighted)
    assert pell_identity(tp).residual <= 1e-7
    assert np.all(np.abs(endpoint_ratios(tp) - 1) < 1e-8)


@pytest.mark.parametrize("nu", [2, 3, 4])
def test_minimal_norm_against_linear_programming(plain, nu):
    tp = minimal_tau(nu, *plain)
    # leading trigonometric coefficient of tau from samples on the full circle
    M = 64
    phi = 2 * math.pi * np.arange(M) / M
    c = np.fft.fft(tp.tau(phi)) / M
    lead = c[nu]
    theta = -np.angle(lead)
    # tau = 2|lead| cos(nu phi - theta) + lower order, sup norm 1 on E
    norm, _, _ = lp_minimax(nu, theta, [(math.pi / 4, 3 * math.pi / 4), (5 * math.pi / 4, 7 * math.pi / 4)])
    assert norm == pytest.approx(1 / (2 * abs(lead)), rel=1e-3)


def test_ellipticity_of_the_theta_quotient(plain):
    fr, _ = plain
    tp = minimal_tau(3, *plain)
    u = np.array([-0.3 + 0.2j, -1.2 - 0.5j]) * fr.K
    assert tp.ellipticity_defect(u) < 1e-9
