"""Complete elliptic integrals, Jacobi elliptic functions and the theta functions H, theta.

Conventions follow Jacobi's notation: ``H(z) = theta_1(pi z / 2K)`` and
``theta(z) = theta_4(pi z / 2K)`` with nome ``q = exp(-pi K'/K)``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np


class EllipticDomainError(ValueError):
    """Raised when a modulus lies outside (0, 1)."""


class PoleProximityError(ArithmeticError):
    """Raised when an evaluation point is too close to a pole."""


class ThetaTruncationError(ArithmeticError):
    """Raised when the retained theta series tail exceeds the tolerance."""


class ConditioningWarning(UserWarning):
    """Large nome: arcs nearly degenerate, downstream inversion ill-conditioned."""


LARGE_NOME = 0.95


def agm(a: float, b: float, tol: float = 1e-16) -> float:
    """Arithmetic-geometric mean of two positive reals."""
    for _ in range(64):
        if abs(a - b) <= tol * a:
            break
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return 0.5 * (a + b)


def complete_elliptic_K(k: float, k_prime: float | None = None) -> float:
    """K(k) = pi / (2 AGM(1, k')).

    ``k_prime`` may be passed when it is known more accurately than
    ``sqrt(1 - k**2)`` (moduli close to 1).
    """
    if not (0.0 < k < 1.0):
        raise EllipticDomainError(f"modulus k={k!r} not in (0, 1)")
    if k_prime is None:
        k_prime = math.sqrt((1.0 - k) * (1.0 + k))
    return math.pi / (2.0 * agm(1.0, k_prime))


@dataclass(frozen=True)
class EllipticModulus:
    k: float
    k_prime: float
    K: float
    K_prime: float
    q: float

    @classmethod
    def from_k2(cls, k2: float, kp2: float | None = None) -> "EllipticModulus":
        """Build from k**2 (and optionally the independently computed k'**2)."""
        if kp2 is None:
            kp2 = 1.0 - k2
        if not (0.0 < k2 < 1.0) or not (0.0 < kp2 < 1.0):
            raise EllipticDomainError(f"k^2={k2!r}, k'^2={kp2!r} not an admissible pair")
        k, kp = math.sqrt(k2), math.sqrt(kp2)
        K = complete_elliptic_K(k, kp)
        Kp = complete_elliptic_K(kp, k)
        q = math.exp(-math.pi * Kp / K)
        if q > LARGE_NOME:
            warnings.warn(f"nome q={q:.4f} > {LARGE_NOME}; arcs nearly degenerate",
                          ConditioningWarning, stacklevel=2)
        return cls(k=k, k_prime=kp, K=K, K_prime=Kp, q=q)

    @classmethod
    def from_k(cls, k: float) -> "EllipticModulus":
        if not (0.0 < k < 1.0):
            raise EllipticDomainError(f"modulus k={k!r} not in (0, 1)")
        return cls.from_k2(k * k, (1.0 - k) * (1.0 + k))

    def complementary(self) -> "EllipticModulus":
        return EllipticModulus(k=self.k_prime, k_prime=self.k, K=self.K_prime,
                               K_prime=self.K, q=math.exp(-math.pi * self.K / self.K_prime))


# --------------------------------------------------------------------------
# Jacobi elliptic functions
# --------------------------------------------------------------------------

def _landen_sequence(k: float, kp: float):
    a, b, c = [1.0], [kp], [k]
    while abs(c[-1]) > 1e-17 * a[-1] and len(a) < 40:
        a_n, b_n = a[-1], b[-1]
        a.append(0.5 * (a_n + b_n))
        c.append(0.5 * (a_n - b_n))
        b.append(math.sqrt(a_n * b_n))
    if len(a) == 1:
        a.append(1.0)
        c.append(0.0)
    return np.array(a), np.array(c)


def _sncndn_real(x: np.ndarray, k: float, kp: float, K: float):
    # descending Landen / AGM scheme, argument first reduced mod 4K
    x = np.asarray(x, dtype=float)
    x = x - 4.0 * K * np.round(x / (4.0 * K))
    a, c = _landen_sequence(k, kp)
    N = len(a) - 1
    phi = (2.0 ** N) * a[N] * x
    for n in range(N, 0, -1):
        phi = 0.5 * (phi + np.arcsin(np.clip(c[n] / a[n] * np.sin(phi), -1.0, 1.0)))
    sn = np.sin(phi)
    cn = np.cos(phi)
    dn = np.sqrt(1.0 - k * k * sn * sn)
    return sn, cn, dn


def jacobi_sn_cn_dn(u, modulus: EllipticModulus, pole_eps: float | None = None):
    """Return (sn u, cn u, dn u) for complex ``u``.

    Real and imaginary parts are handled separately by the Landen scheme and
    recombined with the addition theorem (Jacobi's imaginary transformation on
    the imaginary part). With ``pole_eps`` set, points closer than that to a
    pole ``iK' (mod 2K, 2iK')`` raise :class:`PoleProximityError`; otherwise
    poles evaluate to ``inf``/``nan``.
    """
    u = np.asarray(u, dtype=complex)
    k, kp, K, Kp = modulus.k, modulus.k_prime, modulus.K, modulus.K_prime
    if pole_eps is not None:
        w = u - 1j * Kp
        w = w - 2 * K * np.round(w.real / (2 * K)) - 2j * Kp * np.round(w.imag / (2 * Kp))
        if np.any(np.abs(w) < pole_eps):
            raise PoleProximityError("argument within pole_eps of a pole of sn")
    s, c, d = _sncndn_real(u.real, k, kp, K)
    s1, c1, d1 = _sncndn_real(u.imag, kp, k, Kp)
    den = c1 * c1 + k * k * s * s * s1 * s1
    with np.errstate(divide="ignore", invalid="ignore"):
        sn = (s * d1 + 1j * c * d * s1 * c1) / den
        cn = (c * c1 - 1j * s * d * s1 * d1) / den
        dn = (d * c1 * d1 - 1j * k * k * s * c * s1) / den
    return sn, cn, dn


def sn_squared(u, modulus: EllipticModulus):
    """sn(u)^2 and, separately, 1/sn(u)^2 computed without cancellation near poles.

    Uses sn(u + iK') = 1 / (k sn u) to evaluate the reciprocal directly.
    """
    sn, _, _ = jacobi_sn_cn_dn(u, modulus)
    sn_shift, _, _ = jacobi_sn_cn_dn(np.asarray(u, dtype=complex) + 1j * modulus.K_prime, modulus)
    return sn * sn, (modulus.k * sn_shift) ** 2


# --------------------------------------------------------------------------
# Theta functions
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ThetaConfig:
    """Truncation policy of the q-series for H and theta.

    ``truncation=None`` picks the number of terms from the nome so that the
    first dropped term (after argument reduction) is below ``tolerance * 1e-2``.
    """

    truncation: int | None = None
    tolerance: float = 1e-14

    def terms(self, q: float) -> int:
        if self.truncation is not None:
            return int(self.truncation)
        target = self.tolerance * 1e-2
        # reduced |Im z| <= K' inflates term j by q**-(j+1/2)
        j = 1
        while q ** ((j + 0.5) ** 2 - (j + 0.5)) >= target:
            j += 1
        return j + 1


DEFAULT_THETA = ThetaConfig()


def _tail_bound(q: float, terms: int) -> float:
    j = terms
    return 2.0 * q ** ((j + 0.5) ** 2 - (j + 0.5))


def _reduce(z: np.ndarray, K: float, Kp: float):
    r = np.round(z.real / (2 * K))
    z0 = z - 2 * K * r
    m = np.round(z0.imag / (2 * Kp))
    z1 = z0 - 2j * Kp * m
    return z1, r, m


def _quasi_factor(z1: np.ndarray, m: np.ndarray, modulus: EllipticModulus) -> np.ndarray:
    # f(z1 + 2 m i K') = (-1)^m q^{-m^2} exp(-i pi m z1 / K) f(z1) for f = H, theta
    K, Kp = modulus.K, modulus.K_prime
    log_fac = (np.pi * Kp / K) * m * m - 1j * np.pi * m * z1 / K
    return np.where(m % 2 == 0, 1.0, -1.0) * np.exp(log_fac)


def theta_H(z, modulus: EllipticModulus, cfg: ThetaConfig = DEFAULT_THETA):
    """H(z) = 2 sum_j (-1)^j q^{(j+1/2)^2} sin((2j+1) pi z / 2K)."""
    z = np.asarray(z, dtype=complex)
    K, q = modulus.K, modulus.q
    J = cfg.terms(q)
    if _tail_bound(q, J) > cfg.tolerance:
        raise ThetaTruncationError(f"{J} terms leave tail {_tail_bound(q, J):.2e}")
    z1, r, m = _reduce(z, K, modulus.K_prime)
    x = np.pi * z1 / (2 * K)
    j = np.arange(J)
    coef = 2.0 * (-1.0) ** j * q ** ((j + 0.5) ** 2)
    s = np.sin(np.multiply.outer(x, 2 * j + 1)) @ coef
    sign = np.where(r % 2 == 0, 1.0, -1.0)
    return sign * _quasi_factor(z1, m, modulus) * s


def theta_theta(z, modulus: EllipticModulus, cfg: ThetaConfig = DEFAULT_THETA):
    """theta(z) = 1 + 2 sum_{j>=1} (-1)^j q^{j^2} cos(j pi z / K)."""
    z = np.asarray(z, dtype=complex)
    K, q = modulus.K, modulus.q
    J = cfg.terms(q)
    if _tail_bound(q, J) > cfg.tolerance:
        raise ThetaTruncationError(f"{J} terms leave tail {_tail_bound(q, J):.2e}")
    z1, _, m = _reduce(z, K, modulus.K_prime)
    x = np.pi * z1 / K
    j = np.arange(1, J + 1)
    coef = 2.0 * (-1.0) ** j * q ** (j * j)
    s = 1.0 + np.cos(np.multiply.outer(x, j)) @ coef
    return _quasi_factor(z1, m, modulus) * s


def theta_H_prime0(modulus: EllipticModulus, cfg: ThetaConfig = DEFAULT_THETA) -> float:
    """H'(0), used for residues of theta quotients."""
    K, q = modulus.K, modulus.q
    j = np.arange(cfg.terms(q))
    return float(np.sum(2.0 * (-1.0) ** j * q ** ((j + 0.5) ** 2) * (2 * j + 1)) * np.pi / (2 * K))
