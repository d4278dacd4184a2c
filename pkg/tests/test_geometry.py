import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from arczeros.elliptic import jacobi_sn_cn_dn
from arczeros.geometry import (ArcOrderingError, build_frame, capacity, cross_ratio_moduli,
                               curve_s, distance_to_curve, greens_function,
                               harmonic_measure_omega2, normalize_arcs, phi_inverse, phi_map,
                               robin_limit, zeta_sn2_target)

from conftest import ASYM, QUARTER
from oracles import charge_equilibrium

rng = np.random.default_rng(11)


def frame_of(raw):
    return build_frame(normalize_arcs(raw))


def box_points(fr, n, half=None):
    x = -fr.K * rng.uniform(0.02, 0.98, n)
    lo, hi = {None: (-0.98, 0.98), "upper": (0.02, 0.98), "lower": (-0.98, -0.02)}[half]
    return x + 1j * fr.Kp * rng.uniform(lo, hi, n)


def test_normalization_is_symmetric_about_pi():
    cfg = normalize_arcs(ASYM)
    assert cfg.phi1 + cfg.phi4 == pytest.approx(2 * math.pi, abs=1e-14)
    assert np.allclose(cfg.to_original(cfg.endpoints), np.exp(1j * np.array(ASYM)))


def test_rotation_is_reported():
    cfg = normalize_arcs([x + 0.3 for x in QUARTER])
    assert cfg.rotation_psi == pytest.approx(0.3, abs=1e-14)
    assert np.allclose(cfg.angles, QUARTER)


@pytest.mark.parametrize("raw", [(1, 0.5, 2, 3), (0, 1, 2, 7), (0, 1, 1, 2)])
def test_bad_ordering(raw):
    with pytest.raises(ArcOrderingError):
        normalize_arcs(raw)


def test_cross_ratio_quarter_points():
    for raw in (QUARTER, (0, math.pi / 2, math.pi, 3 * math.pi / 2)):
        k2c, k2, kp2 = cross_ratio_moduli(normalize_arcs(raw))
        assert abs(k2c - 0.5) < 1e-14 and k2 == pytest.approx(0.5) and kp2 == pytest.approx(0.5)


def test_complementary_arcs_swap_moduli():
    cfg = normalize_arcs(ASYM)
    _, k2, kp2 = cross_ratio_moduli(cfg)
    _, k2c, kp2c = cross_ratio_moduli(cfg.complementary())
    assert k2c == pytest.approx(kp2, rel=1e-12) and kp2c == pytest.approx(k2, rel=1e-12)


@pytest.mark.parametrize("raw", [QUARTER, ASYM, (0.1, 0.4, 2.0, 5.9)])
def test_corner_correspondence(raw):
    fr = frame_of(raw)
    corners = np.array([0, 1j * fr.Kp, -fr.K + 1j * fr.Kp, -fr.K])
    assert np.max(np.abs(phi_map(corners, fr) - fr.cfg.endpoints)) < 1e-10


@pytest.mark.parametrize("raw", [QUARTER, ASYM])
def test_arc_preimages_are_unimodular(raw):
    fr = frame_of(raw)
    y = fr.Kp * np.linspace(-0.99, 0.99, 101)
    for x in (0.0, -fr.K):
        z = phi_map(x + 1j * y, fr)
        assert np.max(np.abs(np.abs(z) - 1)) < 1e-10
    # Re u = 0 covers the first arc, Re u = -K the second
    assert set(fr.cfg.arc_index(np.angle(phi_map(1j * y, fr)) % (2 * math.pi))) == {1}
    assert set(fr.cfg.arc_index(np.angle(phi_map(-fr.K + 1j * y, fr)) % (2 * math.pi))) == {2}


@pytest.mark.parametrize("raw", [QUARTER, ASYM])
def test_half_assignment(raw):
    fr = frame_of(raw)
    assert np.all(np.abs(phi_map(box_points(fr, 200, "upper"), fr)) < 1)
    assert np.all(np.abs(phi_map(box_points(fr, 200, "lower"), fr)) > 1)


@pytest.mark.parametrize("raw", [QUARTER, ASYM, (0.1, 0.4, 2.0, 5.9)])
def test_round_trip(raw):
    fr = frame_of(raw)
    u = box_points(fr, 500)
    back = phi_inverse(phi_map(u, fr), fr)
    assert np.max(np.abs(back - u)) < 1e-9


def test_inverse_of_infinity_is_zeta():
    fr = frame_of(ASYM)
    assert abs(phi_inverse(np.inf, fr)[0] - fr.zeta) < 1e-12


@pytest.mark.parametrize("raw", [QUARTER, ASYM, (0, 1, 2, 3)])
def test_pole_location(raw):
    fr = frame_of(raw)
    assert -fr.K < fr.zeta.real < 0 and -fr.Kp < fr.zeta.imag < 0
    sn, _, _ = jacobi_sn_cn_dn(fr.zeta, fr.modulus)
    assert abs(sn ** 2 - zeta_sn2_target(fr.cfg)) < 1e-10
    assert abs(phi_map(fr.zeta + 1e-7, fr)) > 1e6


def test_map_is_even_and_periodic():
    fr = frame_of(ASYM)
    u = box_points(fr, 50)
    z = phi_map(u, fr)
    for w in (-u, u + 2 * fr.K, u + 2j * fr.Kp):
        assert np.max(np.abs(phi_map(w, fr) - z) / np.maximum(1, np.abs(z))) < 1e-10


@settings(max_examples=25, deadline=None)
@given(st.lists(st.floats(0.05, 1.5), min_size=4, max_size=4))
def test_round_trip_random_configurations(gaps):
    ang = np.cumsum(gaps)
    if ang[3] - ang[0] > 2 * math.pi - 0.05:
        return
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        fr = frame_of(ang)
    u = fr.K * (-0.5 + 0.3j) + 0.1 * fr.K * rng.standard_normal(5)
    u = np.clip(u.real, -0.95 * fr.K, -0.05 * fr.K) + 1j * np.clip(u.imag, -0.9 * fr.Kp, 0.9 * fr.Kp)
    assert np.max(np.abs(phi_inverse(phi_map(u, fr), fr) - u)) < 1e-8


# --------------------------------------------------------------------------
# potential theory
# --------------------------------------------------------------------------

@pytest.mark.parametrize("raw", [QUARTER, ASYM])
def test_green_vanishes_on_arcs(raw):
    fr = frame_of(raw)
    phi = np.concatenate([np.linspace(fr.cfg.phi1, fr.cfg.phi2, 50)[1:-1],
                          np.linspace(fr.cfg.phi3, fr.cfg.phi4, 50)[1:-1]])
    g = greens_function(np.exp(1j * phi), None, fr)
    assert np.max(np.abs(g)) < 1e-8


def test_green_positive_and_symmetric():
    fr = frame_of(ASYM)
    z = np.array([0.3 + 0.1j, -2.0 + 1.0j, 0.9j])
    assert np.all(greens_function(z, None, fr) > 0)
    a, b = 0.2 - 0.4j, 1.5 + 0.5j
    assert greens_function(a, b, fr) == pytest.approx(greens_function(b, a, fr), rel=1e-10)


def test_green_logarithmic_pole():
    fr = frame_of(ASYM)
    c = 0.1 + 0.2j
    for r in (1e-3, 1e-5):
        g = greens_function(c + r, c, fr)
        # g + log r stays bounded near the pole
        assert abs(g + math.log(r)) < 5


@pytest.mark.parametrize("raw", [QUARTER, ASYM])
def test_capacity_against_robin_limit(raw):
    fr = frame_of(raw)
    assert capacity(fr) == pytest.approx(math.exp(-robin_limit(fr)), rel=1e-8)


def test_symmetric_harmonic_measure_is_half():
    assert abs(harmonic_measure_omega2(frame_of(QUARTER)) - 0.5) < 1e-10


@pytest.mark.parametrize("raw", [QUARTER, ASYM, (0.1, 0.4, 2.0, 5.9)])
def test_equilibrium_against_point_charges(raw):
    fr = frame_of(raw)
    w2, cap = charge_equilibrium(fr.cfg.angles)
    assert harmonic_measure_omega2(fr) == pytest.approx(w2, abs=2e-3)
    assert capacity(fr) == pytest.approx(cap, abs=2e-3)


def test_full_circle_limit():
    g = 1e-3
    raw = (g / 2, math.pi - g / 2, math.pi + g / 2, 2 * math.pi - g / 2)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        fr = frame_of(raw)
    assert abs(capacity(fr) - 1) < 1e-3


def test_complementary_harmonic_measures():
    fr = frame_of(ASYM)
    w2 = harmonic_measure_omega2(fr)
    # mirror image z -> conj(z) keeps each arc's share
    mirror = frame_of(sorted(2 * math.pi - a for a in ASYM))
    assert harmonic_measure_omega2(mirror) == pytest.approx(w2, abs=1e-12) or \
        harmonic_measure_omega2(mirror) == pytest.approx(1 - w2, abs=1e-12)


# --------------------------------------------------------------------------
# curve S
# --------------------------------------------------------------------------

def test_curve_inside_disk_joining_the_arcs():
    fr = frame_of(ASYM)
    cs = curve_s(fr)
    assert np.all(np.abs(cs.samples) < 1)
    ends = phi_map(np.array([0, -fr.K]) + 1j * cs.level, fr)
    assert np.allclose(np.abs(ends), 1, atol=1e-12)
    idx = fr.cfg.arc_index(np.angle(ends) % (2 * math.pi))
    assert list(idx) == [1, 2]


def test_distance_to_curve():
    fr = frame_of(ASYM)
    cs = curve_s(fr)
    t = np.array([-0.37, -0.81]) * fr.K
    on = phi_map(t + 1j * cs.level, fr)
    assert np.max(distance_to_curve(on, fr, cs)) < 1e-10
    assert distance_to_curve(np.array([0.0j]), fr, cs)[0] == pytest.approx(np.min(np.abs(cs.samples)), abs=1e-3)
