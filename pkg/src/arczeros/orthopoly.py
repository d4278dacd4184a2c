"""Monic orthogonal polynomials of a Hermitian functional on the unit circle, their
zeros, and the quadratic identity that ties ``P_n`` to its second-kind partner.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import mpmath
import numpy as np
from numpy.polynomial import polynomial as npoly

from .elliptic import ConditioningWarning
from .weights import DiscreteFunctional, MomentTable, WeightSpec, sqrt_R_branch


class DegenerateFunctionalError(ArithmeticError):
    """A leading Toeplitz section is singular: the polynomial does not exist."""


@dataclass(frozen=True)
class MonicPolynomial:
    """Polynomial with ascending coefficients and leading coefficient exactly 1."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex).copy()
        c[-1] = 1.0
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, z):
        return npoly.polyval(np.asarray(z, dtype=complex), self.coeffs)

    def reversed(self) -> np.ndarray:
        """Coefficients of z^n conj(P(1/conj z))."""
        return np.conj(self.coeffs[::-1])


@dataclass(frozen=True)
class LevinsonResult:
    polys: list
    reflection: np.ndarray
    norms: np.ndarray


def levinson(moments: MomentTable, n: int, pivot_tol: float = 1e-13) -> LevinsonResult:
    """Szego recursion Phi_{m+1} = z Phi_m - conj(alpha_m) Phi_m^*.

    ``norms[m] = <Phi_m, Phi_m>``; a vanishing norm means a singular section.
    Tables built in extended precision are processed at their own precision.
    """
    if n > moments.N:
        raise ValueError(f"need moments through {n}, have {moments.N}")
    if moments.exact is not None:
        return _levinson_mp(moments, n, pivot_tol)
    c = moments.c
    phi = np.array([1.0 + 0j])
    polys = [MonicPolynomial(phi)]
    kappa = [c[0].real]
    alphas = []
    scale = float(np.max(np.abs(c[:n + 1])))
    for m in range(n):
        if abs(kappa[-1]) <= pivot_tol * scale:
            raise DegenerateFunctionalError(f"section of size {m + 1} is singular")
        # <z Phi_m, 1> = sum_i p_i c_{-(i+1)}
        inner = np.dot(phi, np.conj(c[1:m + 2]))
        abar = inner / kappa[-1]
        star = np.conj(phi[::-1])
        nxt = np.concatenate([[0.0], phi]) - abar * np.concatenate([star, [0.0]])
        kappa.append(kappa[-1] * (1.0 - abs(abar) ** 2))
        alphas.append(np.conj(abar))
        phi = nxt
        polys.append(MonicPolynomial(phi))
    if abs(kappa[-1]) <= pivot_tol * scale:
        raise DegenerateFunctionalError(f"section of size {n + 1} is singular")
    return LevinsonResult(polys=polys, reflection=np.array(alphas), norms=np.array(kappa))


def _levinson_mp(moments: MomentTable, n: int, pivot_tol: float) -> LevinsonResult:
    mp = mpmath
    with mp.workdps(moments.dps):
        c = moments.exact
        scale = max(abs(x) for x in c[:n + 1])
        phi = [mp.mpc(1)]
        kappa = [mp.re(c[0])]
        polys = [MonicPolynomial(np.array([1.0]))]
        alphas = []
        for m in range(n):
            if abs(kappa[-1]) <= pivot_tol * scale:
                raise DegenerateFunctionalError(f"section of size {m + 1} is singular")
            abar = mp.fsum(phi[i] * mp.conj(c[i + 1]) for i in range(m + 1)) / kappa[-1]
            star = [mp.conj(x) for x in reversed(phi)]
            phi = [(phi[i - 1] if i else 0) - abar * (star[i] if i <= m else 0) for i in range(m + 2)]
            kappa.append(kappa[-1] * (1 - abs(abar) ** 2))
            alphas.append(mp.conj(abar))
            polys.append(MonicPolynomial(np.array([complex(x) for x in phi])))
        if abs(kappa[-1]) <= pivot_tol * scale:
            raise DegenerateFunctionalError(f"section of size {n + 1} is singular")
        return LevinsonResult(polys=polys, reflection=np.array([complex(a) for a in alphas]),
                              norms=np.array([float(k) for k in kappa]))


def szego_discrete(functional: DiscreteFunctional, n: int, pivot_tol: float = 1e-13) -> LevinsonResult:
    """Szego recursion with inner products taken on the discretised functional.

    Values of Phi_m and Phi_m^* at the nodes are carried along, so no moment
    matrix is formed; this avoids the exponential ill-conditioning of Toeplitz
    sections for measures supported on arcs.
    """
    z, w = functional.z, functional.w
    v = np.ones_like(z)
    vs = np.ones_like(z)
    phi = np.array([1.0 + 0j])
    polys = [MonicPolynomial(phi)]
    kappa = [float(np.sum(w))]
    scale = float(np.sum(np.abs(w)))
    alphas = []
    for m in range(n):
        if abs(kappa[-1]) <= pivot_tol * scale * max(np.max(np.abs(v)), 1e-300) ** 2:
            raise DegenerateFunctionalError(f"section of size {m + 1} is singular")
        abar = np.sum(w * z * v) / kappa[-1]
        alpha = np.conj(abar)
        v, vs = z * v - abar * vs, vs - alpha * z * v
        star = np.conj(phi[::-1])
        phi = np.concatenate([[0.0], phi]) - abar * np.concatenate([star, [0.0]])
        kappa.append(kappa[-1] * (1.0 - abs(alpha) ** 2))
        alphas.append(alpha)
        polys.append(MonicPolynomial(phi))
    return LevinsonResult(polys=polys, reflection=np.array(alphas), norms=np.array(kappa))


def dense_orthogonal(moments: MomentTable, n: int) -> MonicPolynomial:
    """Solve sum_i c_{k-i} p_i = -c_{k-n}, k < n, directly."""
    if n == 0:
        return MonicPolynomial(np.array([1.0]))
    T = moments.toeplitz(n)
    # row k: L(z^{-k} P) = sum_i p_i c_{k-i}
    A = T[:n, :n].T
    rhs = -T[n, :n]
    cond = np.linalg.cond(A)
    if not np.isfinite(cond) or cond > 1e15:
        raise DegenerateFunctionalError(f"Toeplitz section of size {n} singular (cond {cond:.1e})")
    if cond > 1e12:
        warnings.warn(f"Toeplitz condition number {cond:.1e}", ConditioningWarning, stacklevel=2)
    p = np.linalg.solve(A, rhs)
    return MonicPolynomial(np.concatenate([p, [1.0]]))


def orthogonal_polynomial(moments: MomentTable, n: int, method: str = "levinson") -> MonicPolynomial:
    """Monic P_n with L(z^{-k} P_n) = 0 for k = 0..n-1."""
    if method == "levinson":
        try:
            return levinson(moments, n).polys[n]
        except DegenerateFunctionalError:
            return dense_orthogonal(moments, n)
    if method == "dense":
        return dense_orthogonal(moments, n)
    raise ValueError(f"unknown method {method!r}")


def orthogonality_residuals(P: MonicPolynomial, moments: MomentTable) -> np.ndarray:
    """|L(z^{-k} P)| / sqrt(c_0 <P, P>) for k = 0..n-1."""
    n = P.degree
    vals = np.array([sum(P.coeffs[i] * moments[k - i] for i in range(n + 1)) for k in range(n)])
    norm = abs(sum(P.coeffs[i] * moments[n - i] for i in range(n + 1)))
    return np.abs(vals) / np.sqrt(abs(moments[0]) * max(norm, 1e-300))


@dataclass(frozen=True)
class ZeroSet:
    zeros: np.ndarray
    residuals: np.ndarray
    n: int


def polynomial_zeros(P: MonicPolynomial, polish: int = 1) -> ZeroSet:
    """Companion-matrix eigenvalues followed by Newton polishing."""
    n = P.degree
    if n == 0:
        return ZeroSet(np.zeros(0, dtype=complex), np.zeros(0), 0)
    C = np.zeros((n, n), dtype=complex)
    C[1:, :-1] = np.eye(n - 1)
    C[:, -1] = -P.coeffs[:-1]
    z = np.linalg.eigvals(C)
    d = npoly.polyder(P.coeffs)
    for _ in range(polish):
        f, fp = P(z), npoly.polyval(z, d)
        step = np.where(np.abs(fp) > 0, f / np.where(fp == 0, 1, fp), 0)
        # keep the eigenvalue when a step would not shrink the residual
        cand = z - step
        better = np.abs(P(cand)) <= np.abs(f)
        z = np.where(better, cand, z)
    res = np.abs(P(z)) / np.maximum(1.0, np.abs(z)) ** n
    return ZeroSet(zeros=z, residuals=res, n=n)


def evaluate_by_recursion(alphas, z, n: int | None = None):
    """Phi_n(z) and Phi_n'(z) from reflection coefficients (forward recursion)."""
    n = len(alphas) if n is None else n
    z = np.asarray(z, dtype=complex)
    p, ps = np.ones_like(z), np.ones_like(z)
    dp, dps = np.zeros_like(z), np.zeros_like(z)
    for a in alphas[:n]:
        p, ps, dp, dps = (z * p - np.conj(a) * ps, ps - a * z * p,
                          p + z * dp - np.conj(a) * dps, dps - a * (p + z * dp))
    return p, dp


def hessenberg_matrix(alphas, n: int) -> np.ndarray:
    """n x n Hessenberg matrix whose characteristic polynomial is Phi_n."""
    a = np.asarray(alphas[:n], dtype=complex)
    rho = np.sqrt(1.0 - np.abs(a) ** 2 + 0j)
    prev = np.concatenate([[-1.0], a[:-1]])
    G = np.zeros((n, n), dtype=complex)
    for k in range(n):
        prod = 1.0 + 0j
        for l in range(k, n):
            G[k, l] = -np.conj(a[l]) * prev[k] * prod
            prod *= rho[l]
        if k + 1 < n:
            G[k + 1, k] = rho[k]
    return G


def zeros_from_reflection(alphas, n: int, polish: int = 2) -> ZeroSet:
    """Zeros of Phi_n as Hessenberg eigenvalues, Newton-polished through the recursion."""
    if n == 0:
        return ZeroSet(np.zeros(0, dtype=complex), np.zeros(0), 0)
    z = np.linalg.eigvals(hessenberg_matrix(alphas, n))
    for _ in range(polish):
        f, fp = evaluate_by_recursion(alphas, z, n)
        with np.errstate(divide="ignore", invalid="ignore"):
            cand = z - f / fp
        fc, _ = evaluate_by_recursion(alphas, cand, n)
        z = np.where(np.isfinite(cand) & (np.abs(fc) <= np.abs(f)), cand, z)
    f, _ = evaluate_by_recursion(alphas, z, n)
    return ZeroSet(zeros=z, residuals=np.abs(f) / np.maximum(1.0, np.abs(z)) ** n, n=n)


@dataclass(frozen=True)
class IdentityReport:
    g: np.ndarray
    residual: float
    low_order: float
    mass_residuals: tuple
    origin_ratio: complex


def verify_quadratic_identity(P: MonicPolynomial, Q, spec: WeightSpec) -> IdentityReport:
    """Check W P^2 - V Q^2 = z^{n-a-1+w} A g with deg g <= 1.

    ``Q`` is the coefficient array of the second-kind partner. ``g`` is read off
    the two lowest coefficients that survive the shift; the report also carries
    the side conditions at the mass points and at the origin.
    """
    n = P.degree
    e = int(round(n - spec.a - 1 + spec.w))
    Q = np.asarray(Q, dtype=complex)
    WP2 = npoly.polymul(spec.W_poly, npoly.polymul(P.coeffs, P.coeffs))
    VQ2 = npoly.polymul(spec.V_poly, npoly.polymul(Q, Q))
    D = npoly.polysub(WP2, VQ2)
    scale = max(np.max(np.abs(WP2)), 1e-300)
    A = spec.A_poly
    low = float(np.max(np.abs(D[:e])) / scale) if e > 0 else 0.0
    g0 = D[e] / A[0]
    g1 = (D[e + 1] - g0 * (A[1] if len(A) > 1 else 0.0)) / A[0] if len(D) > e + 1 else 0.0
    g = np.array([g0, g1])
    rhs = np.concatenate([np.zeros(e), npoly.polymul(A, g)])
    resid = float(np.max(np.abs(npoly.polysub(D, rhs))) / scale)
    masses = []
    pnorm = float(np.sum(np.abs(P.coeffs)))
    for f in spec.factors:
        # V Q = lambda sqrt(R) P at z_j, relative to |sqrt(R)| * sum|p_i| since P(z_j)
        # itself tends to zero when a zero of P_n is attracted to z_j
        z = np.exp(1j * f.xi)
        lhs = npoly.polyval(z, spec.V_poly) * npoly.polyval(z, Q)
        sr = complex(sqrt_R_branch(z, spec))
        r = f.lam * sr * P(z)
        masses.append(abs(lhs - r) / max(abs(sr) * pnorm * max(1.0, abs(z)) ** n, 1e-300))
    origin = npoly.polyval(0, spec.V_poly) * Q[0] / (complex(sqrt_R_branch(0.0, spec)) * P(0.0))
    return IdentityReport(g=g, residual=resid, low_order=low, mass_residuals=tuple(masses),
                          origin_ratio=complex(origin))
