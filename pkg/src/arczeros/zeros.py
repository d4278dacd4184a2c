"""Zero counts in the strips next to the two arcs, stray zeros and their accumulation.

Strips are taken in rectangle coordinates: ``S1 = {-eps < Re u < 0}`` borders the
first arc and ``S2 = {-K < Re u < -K + eps}`` the second. Zeros outside both strips
are strays; the free point ``b`` of the phase system predicts the stray position.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .geometry import (EllipticFrame, InversionError, curve_s, distance_to_curve,
                       harmonic_measure_omega2, phi_inverse, phi_map)
from .orthopoly import ZeroSet, levinson, zeros_from_reflection
from .theta_rep import PhaseSolution, solve_phase_system
from .weights import WeightSpec, compute_moments, conformal_points, dps_for_degree


@dataclass(frozen=True)
class StripConfig:
    epsilon: float

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError("strip half-width must be positive")


def default_strips(frame: EllipticFrame, spec: WeightSpec) -> StripConfig:
    """eps = min(K/8, half the distance of the conformal points Re v_j to 0 and -K)."""
    K = frame.K
    eps = K / 8
    v = conformal_points(spec, frame)
    for x in np.real(v):
        eps = min(eps, 0.5 * min(abs(x), abs(x + K)))
    return StripConfig(eps)


def strips_for_phase(strips: StripConfig, phase: PhaseSolution, frame: EllipticFrame,
                     margin: float | None = None) -> StripConfig:
    """Shrink eps until Re b keeps a margin from both strip boundaries."""
    K = frame.K
    margin = K / 50 if margin is None else margin
    eps = strips.epsilon
    x = phase.b.real
    for _ in range(40):
        if abs(x + eps) > margin and abs(x + K - eps) > margin:
            return StripConfig(eps)
        eps *= 0.8
    return StripConfig(eps)


@dataclass(frozen=True)
class CountPrediction:
    n: int
    k1: int
    k2: int
    beta_n: int
    gamma_n: int

    @property
    def strays(self) -> int:
        return self.n - self.k1 - self.k2


def predicted_counts(n: int, phase: PhaseSolution, spec: WeightSpec, frame: EllipticFrame,
                     strips: StripConfig) -> CountPrediction:
    K, eps = frame.K, strips.epsilon
    x = phase.b.real
    beta = int(-eps < x < 0)
    gamma = int(-K < x < -K + eps)
    d = phase.delta
    masses = sum(f.m for f in spec.factors if f.lam == -1)
    # a stray that falls inside a strip is counted there (delta = -1 only)
    k1 = n - 0.5 * (phase.l - beta * (1 - d)) - masses - 0.5 * (1 - d) + spec.w - 0.5 * spec.w1
    k2 = 0.5 * (phase.l + gamma * (1 - d) - spec.w2)
    if abs(k1 - round(k1)) > 1e-9 or abs(k2 - round(k2)) > 1e-9:
        raise ArithmeticError(f"non-integer counts k1={k1}, k2={k2} at n={n}")
    return CountPrediction(n=n, k1=int(round(k1)), k2=int(round(k2)), beta_n=beta, gamma_n=gamma)


@dataclass(frozen=True)
class Classification:
    u: np.ndarray
    strip1: np.ndarray
    strip2: np.ndarray
    strays: np.ndarray
    failed: int = 0

    @property
    def counts(self) -> tuple:
        return int(self.strip1.sum()), int(self.strip2.sum())


def classify_zeros(zeros, frame: EllipticFrame, strips: StripConfig) -> Classification:
    """Split zeros by the real part of their preimage in the box."""
    z = np.asarray(zeros.zeros if isinstance(zeros, ZeroSet) else zeros, dtype=complex)
    u = np.full(z.shape, np.nan + 0j)
    failed = 0
    for i, zi in enumerate(z):
        try:
            u[i] = phi_inverse(zi, frame)[0]
        except InversionError:
            failed += 1
    x = u.real
    s1 = (x > -strips.epsilon) & (x <= 0)
    s2 = (x < -frame.K + strips.epsilon) & (x >= -frame.K)
    return Classification(u=u, strip1=s1, strip2=s2, strays=~(s1 | s2), failed=failed)


# --------------------------------------------------------------------------
# pipeline over a range of degrees
# --------------------------------------------------------------------------

@dataclass
class DegreeRecord:
    n: int
    zeros: np.ndarray
    phase: PhaseSolution
    strips: StripConfig
    predicted: CountPrediction
    observed: tuple
    classification: Classification


def zero_pipeline(frame: EllipticFrame, spec: WeightSpec, ns, strips: StripConfig | None = None,
                  dps: int | None = None, moments=None) -> list:
    """Zeros of P_n from the extended-precision Levinson oracle, classified per n."""
    ns = list(ns)
    nmax = max(ns)
    if moments is None:
        dps = dps_for_degree(nmax) if dps is None else dps
        moments = compute_moments(spec, nmax + 1, nodes=128, dps=dps)
    lev = levinson(moments, nmax)
    base = default_strips(frame, spec) if strips is None else strips
    v = conformal_points(spec, frame)
    out = []
    for n in ns:
        phase = solve_phase_system(n, frame, spec, v)
        st = strips_for_phase(base, phase, frame)
        zs = zeros_from_reflection(lev.reflection, n).zeros
        cls = classify_zeros(zs, frame, st)
        out.append(DegreeRecord(n=n, zeros=zs, phase=phase, strips=st,
                                predicted=predicted_counts(n, phase, spec, frame, st),
                                observed=cls.counts, classification=cls))
    return out


def find_n0(records) -> int | None:
    """Smallest n from which predicted and observed counts agree for every later n."""
    n0 = None
    for rec in sorted(records, key=lambda r: r.n, reverse=True):
        if (rec.predicted.k1, rec.predicted.k2) != rec.observed:
            break
        n0 = rec.n
    return n0


# --------------------------------------------------------------------------
# accumulation of strays
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class RationalCheck:
    rational: bool
    numerator: int = 0
    denominator: int = 0


def detect_rational(x: float, tol: float = 1e-9, quotient_cap: float = 1e6) -> RationalCheck:
    """Continued fractions: a hit is an exact remainder or a partial quotient beyond the cap.

    Denominators are limited to 1/sqrt(tol), beyond which every real number has
    convergents closer than tol and the test would be meaningless.
    """
    qmax = 1.0 / math.sqrt(tol)
    h0, h1, k0, k1 = 0, 1, 1, 0
    r = float(x)
    for _ in range(64):
        a = math.floor(r)
        h0, h1 = h1, a * h1 + h0
        k0, k1 = k1, a * k1 + k0
        if k1 > qmax:
            return RationalCheck(False)
        frac = r - a
        if frac < tol * max(1.0, abs(r)) or abs(x - h1 / k1) < tol / quotient_cap:
            return RationalCheck(True, h1, k1)
        r = 1.0 / frac
        if r > quotient_cap:
            return RationalCheck(True, h1, k1)
    return RationalCheck(False)


def predicted_stray_points(frame: EllipticFrame, spec: WeightSpec, ns) -> np.ndarray:
    """b^(n) for the degrees with delta = -1 (the predicted stray preimages)."""
    v = conformal_points(spec, frame)
    out = []
    for n in ns:
        ph = solve_phase_system(n, frame, spec, v)
        if ph.delta == -1:
            out.append(ph.b)
    return np.array(out)


def max_gap(x: np.ndarray, lo: float, hi: float) -> float:
    pts = np.sort(np.concatenate([[lo], np.clip(x, lo, hi), [hi]]))
    return float(np.max(np.diff(pts)))


@dataclass
class AccumulationReport:
    stray_points: list
    stray_degrees: list
    distances_to_S: list
    mass_point_hits: dict
    omega2: float
    omega2_rational: RationalCheck
    cluster_points: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=complex))
    cluster_distances: list = field(default_factory=list)

    def median_distance(self, lo: int, hi: int) -> float:
        d = [dist for n, dist in zip(self.stray_degrees, self.distances_to_S) if lo <= n <= hi]
        return float(np.median(d)) if d else float("nan")


def accumulation_analysis(records, frame: EllipticFrame, spec: WeightSpec,
                          mass_radius: float = 0.1) -> AccumulationReport:
    """Strays across degrees: distance to S, attraction by the mass points, rationality of omega2.

    A stray within ``mass_radius`` of a mass point is attributed to that mass and
    left out of the distance-to-S statistics.
    """
    masses = [np.exp(1j * f.xi) for f in spec.factors if f.lam == -1]
    curve = curve_s(frame)
    pts, degs = [], []
    hits = {j: [] for j in range(len(masses))}
    for rec in records:
        z = rec.zeros
        for j, zj in enumerate(masses):
            hits[j].append((rec.n, float(np.min(np.abs(z - zj)))))
        for zi in z[rec.classification.strays]:
            if any(abs(zi - zj) < mass_radius for zj in masses):
                continue
            pts.append(complex(zi))
            degs.append(rec.n)
    dist = list(distance_to_curve(np.array(pts), frame, curve)) if pts else []
    w2 = harmonic_measure_omega2(frame)
    rat = detect_rational(w2)
    report = AccumulationReport(stray_points=pts, stray_degrees=degs, distances_to_S=dist,
                                mass_point_hits=hits, omega2=w2, omega2_rational=rat)
    if rat.rational and pts:
        # over one period of n the free point takes finitely many positions
        n_lo = max(degs)
        b = predicted_stray_points(frame, spec, range(n_lo, n_lo + 2 * rat.denominator + 2))
        cluster = np.unique(np.round(phi_map(b, frame), 9)) if len(b) else np.zeros(0, dtype=complex)
        report.cluster_points = cluster
        report.cluster_distances = [float(np.min(np.abs(cluster - p))) if len(cluster) else float("inf")
                                    for p in pts]
    return report


def gap_profile(frame: EllipticFrame, spec: WeightSpec, decades=(10, 100, 1000, 10000)) -> list:
    """Largest gap left by the predicted stray positions Re b^(n), n <= N, inside (-K, 0)."""
    out = []
    n_start = int(math.ceil(spec.a + 2 + spec.v))
    for N in decades:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            b = predicted_stray_points(frame, spec, range(n_start, N + 1))
        out.append((N, max_gap(b.real, -frame.K, 0.0) if len(b) else frame.K))
    return out


@dataclass(frozen=True)
class EquilibriumRow:
    n: int
    fraction_strip2: float
    omega2: float
    deviation: float
    within_bound: bool


def equilibrium_check(records, frame: EllipticFrame) -> list:
    """Share of zeros in the strip of the second arc against omega2; bound 2/n."""
    w2 = harmonic_measure_omega2(frame)
    rows = []
    for rec in records:
        frac = rec.observed[1] / rec.n
        dev = abs(frac - w2)
        rows.append(EquilibriumRow(rec.n, frac, w2, dev, dev <= 2.0 / rec.n))
    return rows
