"""Closed-form representation of the orthogonal polynomials by theta quotients.

On the torus ``C / (2K Z + 2iK' Z)`` the function ``Omega_n(u)`` has poles at
``zeta`` (order n), ``-zeta`` (order a - w) and at the branch points carried by W,
and zeros at ``-conj(zeta)`` (order n - 1 + w - a), at the conformal images
``-+v_j`` of the factor points, and at one free point ``-delta b``. The free point
is fixed by the requirement that the divisor sums to a period; then

    P_n(z) = (Omega_n(u) + Omega_n(-u)) / 2,
    Q_n(z) = W(z) (Omega_n(u) - Omega_n(-u)) / (2 sqrt(R(z))),     z = phi(u).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npoly

from .geometry import EllipticFrame, phi_inverse, phi_map
from .weights import WeightSpec, conformal_points, sqrt_R_branch


class DegeneratePhaseError(ArithmeticError):
    """The free point b lands on the boundary of the box (delta undefined)."""


def branch_points(frame: EllipticFrame) -> np.ndarray:
    """Representatives of the endpoints phi1..phi4 in the closed box."""
    K, Kp = frame.K, frame.Kp
    return np.array([0.0, 1j * Kp, -K + 1j * Kp, -K + 0j])


@dataclass(frozen=True)
class PhaseSolution:
    n: int
    b: complex
    delta: int
    l: int
    m: int
    k: int
    X: float


def _mass_terms(spec: WeightSpec, v: np.ndarray):
    lam = np.array([f.lam for f in spec.factors], dtype=float)
    mult = np.array([f.m for f in spec.factors], dtype=float)
    return lam, mult, complex(np.sum(lam * mult * v)) if len(v) else 0j


def solve_phase_system(n: int, frame: EllipticFrame, spec: WeightSpec,
                       v: np.ndarray | None = None, degenerate_tol: float = 1e-10) -> PhaseSolution:
    """Integers (l, m, k), sign delta and free point b for degree n."""
    K, Kp, zeta = frame.K, frame.Kp, frame.zeta
    v = conformal_points(spec, frame) if v is None else v
    _, _, S = _mass_terms(spec, v)
    a, w = spec.a, spec.w
    X = (2 * n + 2 * w - 2 * a - 1) * zeta.real + S.real
    parity = spec.w2 % 2
    l = int(2 * round((-X / K - parity) / 2) + parity)
    val = -l * K - X
    if abs(val) < degenerate_tol * K or abs(abs(val) - K) < degenerate_tol * K:
        raise DegeneratePhaseError(f"n={n}: free point on the box boundary (Re part {val:.3e})")
    delta = 1 if val < 0 else -1
    re_b = -abs(val)
    # branch points at height K' carried by W shift the imaginary balance
    n_top = sum(1 for i in spec.W_endpoints if i in (2, 3))
    c0 = -zeta.imag - S.imag
    t = c0 - n_top * Kp
    if delta == 1:
        t = t - 2 * Kp * math.ceil((t - Kp) / (2 * Kp))       # (-K', K']
        im_b = t
    else:
        t = t - 2 * Kp * math.floor((t + Kp) / (2 * Kp))      # [-K', K')
        im_b = -t
    m = (c0 - delta * im_b) / Kp
    m_int = int(round(m))
    if abs(m - m_int) > 1e-8:
        raise ArithmeticError(f"non-integer m={m}")
    k = (m_int - n_top) // 2
    return PhaseSolution(n=n, b=complex(re_b, im_b), delta=delta, l=l, m=m_int, k=k, X=X)


@dataclass
class ThetaPolyRep:
    """Omega_n and its derived quantities for one degree."""

    n: int
    frame: EllipticFrame
    spec: WeightSpec
    phase: PhaseSolution
    v: np.ndarray
    C: complex = 1.0

    @classmethod
    def build(cls, n: int, frame: EllipticFrame, spec: WeightSpec) -> "ThetaPolyRep":
        v = conformal_points(spec, frame)
        phase = solve_phase_system(n, frame, spec, v)
        rep = cls(n=n, frame=frame, spec=spec, phase=phase, v=v)
        rep.C = rep._monic_constant()
        return rep

    # divisor ------------------------------------------------------------
    def _zeros_poles(self):
        fr, sp, ph = self.frame, self.spec, self.phase
        zeta = fr.zeta
        aw = int(round(sp.a - sp.w))
        zeros = [(-np.conj(zeta), self.n - 1 - aw), (-ph.delta * ph.b, 1)]
        poles = [(zeta, self.n)]
        poles.append((-zeta, aw))
        for f, vj in zip(sp.factors, self.v):
            zeros.append((-vj if f.lam == 1 else vj, f.m))
        ub = branch_points(fr)
        for i in sp.W_endpoints:
            poles.append((ub[i - 1], 1))
        return zeros, poles

    def log_omega_unscaled(self, u):
        """log of Omega_n / C (branch of the log is irrelevant to callers)."""
        H = self.frame.H
        u = np.asarray(u, dtype=complex)
        zeros, poles = self._zeros_poles()
        out = -1j * np.pi * self.phase.k * u / self.frame.K
        for p, mult in zeros:
            if mult:
                out = out + mult * np.log(H(u - p))
        for p, mult in poles:
            if mult:
                out = out - mult * np.log(H(u - p))
        return out

    def omega(self, u):
        return self.C * np.exp(self.log_omega_unscaled(u))

    @property
    def phase_phi(self) -> float:
        """arg H(zeta)."""
        return float(np.angle(self.frame.H(self.frame.zeta)))

    def closed_form_constant(self) -> complex:
        """C from the explicit product formula (cross-check of the measured value)."""
        fr, sp, ph = self.frame, self.spec, self.phase
        H, zeta, n = fr.H, fr.zeta, self.n
        aw = sp.a - sp.w
        log = 1j * n * (fr.cfg.phi1 + 4 * self.phase_phi)
        log += n * (np.log(H(2j * zeta.imag)) - np.log(H(2 * zeta)))
        log += np.log(H(2 * zeta.real)) - np.log(H(zeta + ph.delta * ph.b))
        log += 1j * np.pi * ph.k * zeta / fr.K
        log += aw * (np.log(H(2 * zeta.real)) + np.log(H(2 * zeta)))
        ub = branch_points(fr)
        for i in sp.W_endpoints:
            log += np.log(H(zeta - ub[i - 1]))
        for f, vj in zip(sp.factors, self.v):
            log -= f.m * np.log(H(zeta + vj) if f.lam == 1 else H(zeta - vj))
        return complex(2.0 * np.exp(log))

    def _monic_constant(self) -> complex:
        # Omega_n(u) ~ 2 phi(u)^n as u -> zeta; read off the ratio on a small circle
        zeta = self.frame.zeta
        eps = 1e-3 * self.frame.K
        u = zeta + eps * np.exp(2j * np.pi * np.arange(8) / 8)
        ratio = np.exp(self.log_omega_unscaled(u) - self.n * np.log(phi_map(u, self.frame)))
        # the remaining terms are O(eps) with zero mean over the circle
        return complex(2.0 / np.mean(ratio))

    # polynomials --------------------------------------------------------
    def _u(self, z):
        return phi_inverse(np.atleast_1d(z), self.frame)

    def p_at(self, z):
        u = self._u(z)
        return 0.5 * (self.omega(u) + self.omega(-u))

    def q_at(self, z):
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        u = self._u(z)
        W = npoly.polyval(z, self.spec.W_poly)
        return 0.5 * (self.omega(u) - self.omega(-u)) * W / sqrt_R_branch(z, self.spec)

    def psi(self, u):
        """W Omega(u)^2 / (z^{n-a-1+w} A g), written as a theta quotient."""
        fr, sp, ph = self.frame, self.spec, self.phase
        H = fr.H
        zeta = fr.zeta
        u = np.asarray(u, dtype=complex)
        e1 = self.n + sp.w - sp.a
        log = -1j * np.pi * ph.m * u / fr.K
        log = log + e1 * (np.log(H(u + zeta)) - np.log(H(u - zeta)))
        log = log + (e1 - 1) * (np.log(H(u + np.conj(zeta))) - np.log(H(u - np.conj(zeta))))
        for f, vj in zip(sp.factors, self.v):
            log = log + f.lam * f.m * (np.log(H(u + vj)) - np.log(H(u - vj)))
        log = log + ph.delta * (np.log(H(u + ph.b)) - np.log(H(u - ph.b)))
        c = (-1) ** int(round(2 * sp.a)) * float(np.round(sp.F_w(fr.cfg.phi1)))
        return c * np.exp(log)


def coefficients_from_samples(func, degree: int, radius: float = 0.9, oversample: int = 2) -> np.ndarray:
    """Ascending coefficients of a polynomial of the given degree from values on a circle."""
    M = oversample * (degree + 1)
    z = radius * np.exp(2j * np.pi * np.arange(M) / M)
    vals = func(z)
    c = np.fft.fft(vals) / M
    c = c[:degree + 1] / radius ** np.arange(degree + 1)
    return c


def pn_theta(n: int, frame: EllipticFrame, spec: WeightSpec, radius: float = 0.9):
    rep = ThetaPolyRep.build(n, frame, spec)
    c = coefficients_from_samples(rep.p_at, n, radius)
    return c, rep


def qn_theta(rep: ThetaPolyRep, radius: float = 0.9):
    deg = int(round(rep.n + 2 - 2 * rep.spec.v))
    return coefficients_from_samples(rep.q_at, max(deg, 0), radius)


# --------------------------------------------------------------------------
# weighted Chebyshev (T-) polynomials on the two arcs
# --------------------------------------------------------------------------

class TPolynomialError(ValueError):
    """No weighted Chebyshev polynomial with all endpoints extremal for this nu."""


@dataclass(frozen=True)
class TExistence:
    exists: bool
    l_nu: int | None
    residual: float


def _check_nu(nu, spec: WeightSpec) -> float:
    nu = float(nu)
    if abs(2 * nu - round(2 * nu)) > 1e-12:
        raise ValueError(f"nu must be a multiple of 1/2, got {nu}")
    if nu <= spec.a:
        raise TPolynomialError(f"nu = {nu} must exceed a = {spec.a}")
    return nu


def t_polynomial_existence(nu, frame: EllipticFrame, spec: WeightSpec, tol: float = 1e-9) -> TExistence:
    """(4 nu - 2a) Re zeta + sum m_j Re v_j = -l K with l a positive even integer.

    An odd l leaves the theta quotient F_{2 nu} antiperiodic in 2iK', so no
    single-valued P + sqrt(R) Q exists.
    """
    nu = _check_nu(nu, spec)
    v = conformal_points(spec, frame)
    x = (4 * nu - 2 * spec.a) * frame.zeta.real
    x += sum(f.m * vj.real for f, vj in zip(spec.factors, v))
    l = int(round(-x / frame.K))
    res = abs(x + l * frame.K) / frame.K
    ok = res < tol and l >= 1 and l % 2 == 0
    return TExistence(exists=bool(ok), l_nu=l if res < tol and l >= 1 else None, residual=float(res))


@dataclass
class TPolynomial:
    """tau_nu(phi) = (M/2)(F(u) + F(-u)) e^{-i nu phi} with e^{i phi} = phi(u)."""

    nu: float
    frame: EllipticFrame
    spec: WeightSpec
    v: np.ndarray
    mu: int
    l_nu: int
    scale: complex = 1.0

    def log_F(self, u):
        fr, sp = self.frame, self.spec
        H, zeta = fr.H, fr.zeta
        u = np.asarray(u, dtype=complex)
        out = 1j * np.pi * self.mu * u / fr.K
        out = out + 2 * self.nu * (np.log(H(u + np.conj(zeta))) - np.log(H(u - zeta)))
        for f, vj in zip(sp.factors, self.v):
            out = out + f.m * np.log(H(u + vj))
        if sp.a:
            out = out - sp.a * (np.log(H(u + zeta)) + np.log(H(u + np.conj(zeta))))
        return out

    def F(self, u):
        return np.exp(self.log_F(u))

    def _u_of_phi(self, phi):
        return phi_inverse(np.exp(1j * np.asarray(phi, dtype=float)), self.frame)

    def tau(self, phi):
        phi = np.atleast_1d(np.asarray(phi, dtype=float))
        u = self._u_of_phi(phi)
        return (self.scale * 0.5 * (self.F(u) + self.F(-u)) * np.exp(-1j * self.nu * phi))

    def sigma_sqrtR(self, phi):
        """sqrt(calR) sigma up to sign: the antisymmetric half on the circle."""
        phi = np.atleast_1d(np.asarray(phi, dtype=float))
        u = self._u_of_phi(phi)
        return self.scale * 0.5 * (self.F(u) - self.F(-u)) * np.exp(-1j * self.nu * phi)

    def P(self, z):
        u = phi_inverse(np.atleast_1d(np.asarray(z, dtype=complex)), self.frame)
        return self.scale * 0.5 * (self.F(u) + self.F(-u))

    def Q(self, z):
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        u = phi_inverse(z, self.frame)
        return self.scale * 0.5 * (self.F(u) - self.F(-u)) / sqrt_R_branch(z, self.spec)

    def ellipticity_defect(self, u) -> float:
        u = np.asarray(u, dtype=complex)
        f0 = self.log_F(u)
        d1 = np.exp(self.log_F(u + 2 * self.frame.K) - f0) - 1
        d2 = np.exp(self.log_F(u + 2j * self.frame.Kp) - f0) - 1
        return float(max(np.max(np.abs(d1)), np.max(np.abs(d2))))


def _arc_grid(spec: WeightSpec, samples: int) -> np.ndarray:
    c = spec.cfg
    t = 0.5 * (1 - np.cos(np.pi * np.arange(samples) / (samples - 1)))
    return np.concatenate([c.phi1 + (c.phi2 - c.phi1) * t, c.phi3 + (c.phi4 - c.phi3) * t])


def minimal_tau(nu, frame: EllipticFrame, spec: WeightSpec, samples: int = 400) -> TPolynomial:
    """The weighted Chebyshev polynomial of degree nu, scaled to max_E |tau/sqrt(calA)| = 1.

    The unimodular constant is fixed by making tau real on E; the integer in the
    exponential factor is sum m_j Im v_j / (2K').
    """
    ex = t_polynomial_existence(nu, frame, spec)
    if not ex.exists:
        raise TPolynomialError(f"no weighted Chebyshev polynomial for nu = {nu} (l = {ex.l_nu})")
    v = conformal_points(spec, frame)
    mu_r = sum(f.m * vj.imag for f, vj in zip(spec.factors, v)) / (2 * frame.Kp)
    mu = int(round(mu_r))
    if abs(mu - mu_r) > 1e-8:
        raise TPolynomialError(f"non-integer exponential index {mu_r}")
    tp = TPolynomial(nu=float(nu), frame=frame, spec=spec, v=v, mu=mu, l_nu=ex.l_nu)
    phi = _arc_grid(spec, samples)
    t = tp.tau(phi)
    # real up to one unimodular constant: pick it from the largest sample
    i = int(np.argmax(np.abs(t)))
    rot = np.exp(-1j * np.angle(t[i]))
    ratio = np.abs((t * rot).real) / np.sqrt(spec.calA(phi))
    tp.scale = rot / float(np.max(ratio))
    return tp


@dataclass(frozen=True)
class PellReport:
    P: np.ndarray
    Q: np.ndarray
    residual: float
    tail: float


def pell_identity(tp: TPolynomial, radius: float = 0.9, samples: int = 256) -> PellReport:
    """Fit P_{2 nu} and Q_{2 nu - 2} from samples and test P^2 - R Q^2 = A z^{2 nu - a} on the circle.

    ``tail`` is the size of the fitted coefficients beyond the nominal degrees,
    which vanishes only if both sides really are polynomials.
    """
    sp = tp.spec
    dP = int(round(2 * tp.nu))
    dQ = dP - 2
    M = max(samples, 4 * (dP + 2))
    P_full = coefficients_from_samples(tp.P, M - 1, radius, oversample=1)
    Q_full = coefficients_from_samples(tp.Q, M - 1, radius, oversample=1) if dQ >= 0 else np.zeros(M)
    tail = max(np.max(np.abs(P_full[dP + 1:M // 2])), np.max(np.abs(Q_full[max(dQ, -1) + 1:M // 2])))
    P, Q = P_full[:dP + 1], Q_full[:max(dQ, 0) + 1]
    z = np.exp(2j * np.pi * (np.arange(97) + 0.5) / 97)
    lhs = npoly.polyval(z, P) ** 2 - npoly.polyval(z, sp.R_poly) * npoly.polyval(z, Q) ** 2
    e = 2 * tp.nu - sp.a
    if abs(e - round(e)) > 1e-12:
        raise TPolynomialError("2 nu - a must be an integer for the polynomial identity")
    rhs = npoly.polyval(z, sp.A_poly) * z ** int(round(e))
    scale = np.max(np.abs(npoly.polyval(z, P))) ** 2
    return PellReport(P=P, Q=Q, residual=float(np.max(np.abs(lhs - rhs)) / scale), tail=float(tail))
