"""Two arcs of the unit circle: conformal map from the rectangle, Green's function,
harmonic measure, capacity and the accumulation curve S.

The rectangle is ``box = {-K < Re u < 0, -K' < Im u <= K'}``. Its upper half maps to
the open unit disk, the lower half to the exterior; ``Re u = 0`` covers the first
arc and ``Re u = -K`` the second.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import elliprf

from .elliptic import (DEFAULT_THETA, EllipticModulus, ThetaConfig, jacobi_sn_cn_dn,
                       sn_squared, theta_H)

TWO_PI = 2.0 * math.pi


class ArcOrderingError(ValueError):
    """The four angles are not strictly increasing within one period."""


class InversionError(ArithmeticError):
    """Numeric inversion of the conformal map failed."""


@dataclass(frozen=True)
class ArcConfiguration:
    """Arc endpoints in working coordinates, where ``phi1 + phi4 = 2 pi``.

    ``rotation_psi`` is the turn that was removed: a point ``z`` of the working
    plane sits at ``exp(i psi) z`` in the caller's coordinates.
    """

    phi1: float
    phi2: float
    phi3: float
    phi4: float
    rotation_psi: float = 0.0

    @property
    def angles(self) -> np.ndarray:
        return np.array([self.phi1, self.phi2, self.phi3, self.phi4])

    @property
    def endpoints(self) -> np.ndarray:
        return np.exp(1j * self.angles)

    def to_original(self, z):
        return np.exp(1j * self.rotation_psi) * np.asarray(z)

    def to_working(self, z):
        return np.exp(-1j * self.rotation_psi) * np.asarray(z)

    def arc_index(self, phi) -> np.ndarray:
        """1 or 2 for angles inside E1 / E2 (closed), 0 elsewhere."""
        t = self.phi1 + np.mod(np.asarray(phi, dtype=float) - self.phi1, TWO_PI)
        out = np.zeros(t.shape, dtype=int)
        out[(t >= self.phi1) & (t <= self.phi2)] = 1
        out[(t >= self.phi3) & (t <= self.phi4)] = 2
        return out

    def complementary(self) -> "ArcConfiguration":
        """The gaps as arcs: (phi2, phi3) and (phi4, phi1 + 2 pi)."""
        return normalize_arcs((self.phi2, self.phi3, self.phi4, self.phi1 + TWO_PI))


def normalize_arcs(raw) -> ArcConfiguration:
    """Turn the circle so that ``phi1 = 2 pi - phi4``."""
    p = [float(x) for x in raw]
    if len(p) != 4:
        raise ArcOrderingError("exactly four angles are required")
    if not (p[0] < p[1] < p[2] < p[3] < p[0] + TWO_PI):
        raise ArcOrderingError(f"angles {p} not strictly increasing within one period")
    psi = 0.5 * (p[0] + p[3]) - math.pi
    q = [x - psi for x in p]
    shift = TWO_PI * math.floor(q[0] / TWO_PI)
    q = [x - shift for x in q]
    psi = math.remainder(psi + shift, TWO_PI)
    return ArcConfiguration(*q, rotation_psi=psi)


def _half_sin(x):
    return math.sin(0.5 * x)


def cross_ratio_moduli(cfg: ArcConfiguration) -> tuple[complex, float, float]:
    """k^2 as the double relation of the endpoints, plus real forms of k^2 and k'^2.

    Chord lengths give the real forms without cancellation; the complex value is
    kept so callers can check it is real.
    """
    z1, z2, z3, z4 = cfg.endpoints
    k2_complex = ((z4 - z1) / (z4 - z2)) / ((z3 - z1) / (z3 - z2))
    f1, f2, f3, f4 = cfg.angles
    den = _half_sin(f4 - f2) * _half_sin(f3 - f1)
    k2 = _half_sin(f4 - f1) * _half_sin(f3 - f2) / den
    kp2 = _half_sin(f4 - f3) * _half_sin(f2 - f1) / den
    return complex(k2_complex), k2, kp2


def modulus_from_cross_ratio(cfg: ArcConfiguration) -> EllipticModulus:
    k2c, k2, kp2 = cross_ratio_moduli(cfg)
    if abs(k2c.imag) > 1e-9 * max(1.0, abs(k2c)) or abs(k2c.real - k2) > 1e-9:
        raise ValueError(f"cross ratio {k2c} is not the real value {k2}; bad configuration")
    return EllipticModulus.from_k2(k2, kp2)


@dataclass(frozen=True)
class EllipticFrame:
    """Everything needed to evaluate the map phi(u) = M(sn^2 u).

    ``M(s) = (e2 s + r e1) / (s + r)`` is the Moebius map sending s = 0, inf, 1, 1/k^2
    to the four endpoints. ``alpha``/``beta`` are the interval endpoints of the
    intermediate two-interval picture; ``a`` is real with sn^2 a = (1 - alpha)/2.
    """

    cfg: ArcConfiguration
    modulus: EllipticModulus
    zeta: complex
    alpha: float
    beta: float
    a: float
    sn_a_sq: float
    tan_half_phi1: float
    mobius_r: complex
    theta: ThetaConfig = DEFAULT_THETA
    beta_forms: tuple = field(default=(), compare=False)

    @property
    def K(self) -> float:
        return self.modulus.K

    @property
    def Kp(self) -> float:
        return self.modulus.K_prime

    @property
    def H(self):
        m, t = self.modulus, self.theta
        return lambda z: theta_H(z, m, t)

    # Moebius pieces -------------------------------------------------------
    def mobius(self, s, s_inv=None):
        e1, e2 = np.exp(1j * self.cfg.phi1), np.exp(1j * self.cfg.phi2)
        r = self.mobius_r
        s = np.asarray(s, dtype=complex)
        if s_inv is None:
            return (e2 * s + r * e1) / (s + r)
        s_inv = np.asarray(s_inv, dtype=complex)
        big = np.abs(s) > 1.0
        with np.errstate(divide="ignore", invalid="ignore"):
            near = (e2 * s + r * e1) / (s + r)
            far = (e2 + r * e1 * s_inv) / (1.0 + r * s_inv)
        return np.where(big, far, near)

    def mobius_inverse(self, z):
        """s (and 1/s) with M(s) = z; each is computed directly to keep accuracy."""
        e1, e2 = np.exp(1j * self.cfg.phi1), np.exp(1j * self.cfg.phi2)
        r = self.mobius_r
        z = np.asarray(z, dtype=complex)
        with np.errstate(divide="ignore", invalid="ignore"):
            s = r * (e1 - z) / (z - e2)
            s_inv = (z - e2) / (r * (e1 - z))
        return s, s_inv


def _asn(x, modulus: EllipticModulus):
    # principal inverse of sn via Carlson's R_F
    x = np.asarray(x, dtype=complex)
    k2 = modulus.k ** 2
    a, b = 1.0 - x * x, 1.0 - k2 * x * x
    # elliprf is undefined on the cut; either side gives a valid preimage up to +-u
    a = np.where((a.imag == 0) & (a.real < 0), a.real + 1e-300j, a)
    b = np.where((b.imag == 0) & (b.real < 0), b.real + 1e-300j, b)
    return x * elliprf(a, b, 1.0)


def fold_to_box(u, K: float, Kp: float):
    """Representative of +-u modulo (2K, 2iK') inside the closed box.

    Returns the folded point and a boolean array telling whether u was negated
    (i.e. whether the original point lies on the second sheet).
    """
    u = np.asarray(u, dtype=complex)
    x = u.real - 2 * K * np.floor((u.real + K) / (2 * K))           # [-K, K)
    y = u.imag - 2 * Kp * np.ceil((u.imag - Kp) / (2 * Kp))        # (-K', K']
    flip = x > 0
    x = np.where(flip, -x, x)
    y = np.where(flip, -y, y)
    y = np.where(y <= -Kp, y + 2 * Kp, y)
    return x + 1j * y, flip


def _inverse_sn2(s, s_inv, modulus: EllipticModulus):
    # u with sn^2 u = s; |s| > 1 solved through sn(u + iK') = 1/(k sn u)
    k = modulus.k
    small = np.abs(s) <= 1.0
    out = np.empty(np.shape(s), dtype=complex)
    if np.any(small):
        out[small] = _asn(np.sqrt(s[small]), modulus)
    if np.any(~small):
        t = np.sqrt(s_inv[~small]) / k
        out[~small] = _asn(t, modulus) - 1j * modulus.K_prime
    return out


def _newton_sn2(u, s, s_inv, modulus: EllipticModulus, steps: int = 3):
    small = np.abs(s) <= 1.0
    for _ in range(steps):
        sn, cn, dn = jacobi_sn_cn_dn(u, modulus)
        d = 2 * sn * cn * dn
        with np.errstate(divide="ignore", invalid="ignore"):
            step_small = (sn * sn - s) / d
            # on the large branch solve 1/sn^2 = s_inv: derivative -2 cn dn / sn^3
            step_big = (1.0 / (sn * sn) - s_inv) / (-2 * cn * dn / sn ** 3)
        step = np.where(small, step_small, step_big)
        ok = np.isfinite(step) & (np.abs(step) < 0.1 * modulus.K)
        u = np.where(ok, u - step, u)
    return u


def build_frame(cfg: ArcConfiguration, theta: ThetaConfig = DEFAULT_THETA) -> EllipticFrame:
    modulus = modulus_from_cross_ratio(cfg)
    f1, f2, f3, f4 = cfg.angles
    e1, e2, e4 = np.exp(1j * f1), np.exp(1j * f2), np.exp(1j * f4)
    r = complex((e4 - e2) / (e1 - e4))
    t = math.tan(0.5 * f1)
    alpha = -t / math.tan(0.5 * f2)
    beta = -t / math.tan(0.5 * f3)
    sn_a_sq = 0.5 * (1.0 - alpha)
    a = float(_asn(math.sqrt(sn_a_sq), modulus).real)
    sa, ca, da = jacobi_sn_cn_dn(a, modulus)
    sKa, _, _ = jacobi_sn_cn_dn(modulus.K + a, modulus)
    beta_forms = (beta, float((2 * ca * ca / (da * da) - 1).real), float((2 * sKa * sKa - 1).real))
    frame = EllipticFrame(cfg=cfg, modulus=modulus, zeta=0j, alpha=alpha, beta=beta, a=a,
                          sn_a_sq=sn_a_sq, tan_half_phi1=t, mobius_r=r, theta=theta,
                          beta_forms=beta_forms)
    zeta = pole_zeta(frame)
    return EllipticFrame(cfg=cfg, modulus=modulus, zeta=zeta, alpha=alpha, beta=beta, a=a,
                         sn_a_sq=sn_a_sq, tan_half_phi1=t, mobius_r=r, theta=theta,
                         beta_forms=beta_forms)


def zeta_sn2_target(cfg: ArcConfiguration) -> complex:
    """sn^2 zeta = sin((phi1 + phi2)/2) exp(i (phi2 - phi1)/2) / sin(phi1)."""
    f1, f2 = cfg.phi1, cfg.phi2
    return complex(math.sin(0.5 * (f1 + f2)) * np.exp(0.5j * (f2 - f1)) / math.sin(f1))


def pole_zeta(frame: EllipticFrame) -> complex:
    """The point of the box mapped to infinity."""
    m = frame.modulus
    s = np.array([-frame.mobius_r])
    u = _inverse_sn2(s, 1.0 / s, m)
    u = _newton_sn2(u, s, 1.0 / s, m)
    u, _ = fold_to_box(u, m.K, m.K_prime)
    zeta = complex(u[0])
    sn, _, _ = jacobi_sn_cn_dn(zeta, m)
    if abs(sn[()] ** 2 - s[0]) > 1e-9 * max(1.0, abs(s[0])):
        raise InversionError("pole zeta did not converge")
    if not (-m.K < zeta.real < 0 and -m.K_prime < zeta.imag < 0):
        raise InversionError(f"zeta={zeta} not in the exterior half of the box")
    return zeta


def phi_map(u, frame: EllipticFrame):
    """z = phi(u); even, with periods 2K and 2iK', simple poles at +-zeta."""
    s, s_inv = sn_squared(u, frame.modulus)
    return frame.mobius(s, s_inv)


def phi_inverse(z, frame: EllipticFrame, tol: float = 1e-9):
    """The unique u in the box with phi(u) = z (z = inf gives zeta)."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    m = frame.modulus
    s, s_inv = frame.mobius_inverse(z)
    inf_mask = ~np.isfinite(z)
    s = np.where(inf_mask, -frame.mobius_r, s)
    s_inv = np.where(inf_mask, -1.0 / frame.mobius_r, s_inv)
    u = _inverse_sn2(s, s_inv, m)
    u = _newton_sn2(u, s, s_inv, m)
    u, _ = fold_to_box(u, m.K, m.K_prime)
    fin = ~inf_mask
    if np.any(fin):
        back = phi_map(u[fin], frame)
        err = np.abs(back - z[fin]) / np.maximum(1.0, np.abs(z[fin]))
        if np.any(~(err <= tol)):
            raise InversionError(f"phi_inverse round trip error {np.nanmax(err):.2e}")
    return u


def harmonic_measure_omega2(frame: EllipticFrame) -> float:
    return -frame.zeta.real / frame.K


def capacity(frame: EllipticFrame) -> float:
    H = frame.H
    z = frame.zeta
    return float(abs(H(2j * z.imag) / H(2 * z)))


def greens_function_u(u, gamma, frame: EllipticFrame):
    """log|H(u + conj(gamma)) / H(u - gamma)| in rectangle coordinates."""
    H = frame.H
    u = np.asarray(u, dtype=complex)
    return np.log(np.abs(H(u + np.conj(gamma)) / H(u - gamma)))


def greens_function(z, c0, frame: EllipticFrame):
    """Green's function of the complement of the arcs with pole at c0 (None = infinity)."""
    u = phi_inverse(z, frame)
    gamma = frame.zeta if c0 is None or not np.isfinite(c0) else complex(phi_inverse(c0, frame)[0])
    g = greens_function_u(u, gamma, frame)
    return g if np.ndim(z) else float(g[0])


def robin_limit(frame: EllipticFrame, delta: float = 1e-4) -> float:
    """lim g(z, inf) - log|z| at infinity, from a symmetric pair u = zeta +- delta.

    The 1/z term of the expansion cancels between the pair, leaving O(delta^2).
    """
    u = frame.zeta + np.array([delta, -delta, 1j * delta, -1j * delta])
    vals = greens_function_u(u, frame.zeta, frame) - np.log(np.abs(phi_map(u, frame)))
    return float(np.mean(vals))


@dataclass(frozen=True)
class CurveS:
    level: float
    t: np.ndarray
    samples: np.ndarray


def curve_s(frame: EllipticFrame, n_samples: int = 512) -> CurveS:
    """Samples of S = phi({Im u = Im zeta + K'}), clustered toward both arcs."""
    K = frame.K
    level = frame.zeta.imag + frame.Kp
    theta = math.pi * (np.arange(n_samples) + 0.5) / n_samples
    t = -0.5 * K - 0.5 * K * np.cos(theta)
    samples = phi_map(t + 1j * level, frame)
    return CurveS(level=level, t=t, samples=samples)


def distance_to_curve(z, frame: EllipticFrame, curve: CurveS | None = None):
    """Distance from points to S: polyline search, then golden-section refinement on t."""
    curve = curve if curve is not None else curve_s(frame)
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    pts = curve.samples
    out = np.empty(z.shape, dtype=float)
    for i, p in enumerate(z):
        j = int(np.argmin(np.abs(pts - p)))
        lo = curve.t[max(j - 1, 0)] if j > 0 else -frame.K
        hi = curve.t[min(j + 1, len(pts) - 1)] if j < len(pts) - 1 else 0.0
        f = lambda t: abs(complex(phi_map(t + 1j * curve.level, frame)) - p)
        gr = 0.5 * (math.sqrt(5) - 1)
        a, b = lo, hi
        c, d = b - gr * (b - a), a + gr * (b - a)
        fc, fd = f(c), f(d)
        for _ in range(60):
            if fc < fd:
                b, d, fd = d, c, fc
                c = b - gr * (b - a)
                fc = f(c)
            else:
                a, c, fc = c, d, fd
                d = a + gr * (b - a)
                fd = f(d)
        out[i] = min(fc, fd, float(np.min(np.abs(pts - p))))
    return out
