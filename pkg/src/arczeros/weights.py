"""Weights on two arcs: trigonometric factors, their polynomial lifts, the branch of
sqrt(R), point masses and the trigonometric moments of the functional.

A weight is ``f = W (-1)^j / (A sqrt|R|)`` on arc ``E_j``, where ``R`` is the product of
the four endpoint factors ``sin((phi - phi_k)/2)`` and ``R = V W`` is split by choosing
which endpoint factors go into ``W``. ``A`` is a product of factors
``sin((phi - xi_j)/2)^{m_j}`` with signs ``lambda_j``; a ``lambda = -1`` factor puts a
point mass at ``exp(i xi_j)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import mpmath
import numpy as np
from numpy.polynomial import polynomial as npoly

from .geometry import TWO_PI, ArcConfiguration, EllipticFrame, fold_to_box, phi_inverse

SPLITS = {"W=R": (1, 2, 3, 4), "V=R": (), "mixed": (2, 4)}


class AdmissibilityError(ValueError):
    """The weight data violate a standing assumption."""


class QuadratureConvergenceError(ArithmeticError):
    """Doubling the quadrature nodes changed the moments by more than the tolerance."""


@dataclass(frozen=True)
class TrigFactor:
    xi: complex
    m: int
    lam: int


def _half_sin(phi, c):
    return np.sin(0.5 * (np.asarray(phi) - c))


def _lift_roots_and_scale(angles):
    # sin((phi - c)/2) = exp(-i phi/2) exp(-i c/2) (z - e^{ic}) / (2i)
    angles = np.asarray(angles, dtype=complex)
    roots = np.exp(1j * angles)
    scale = complex(np.prod(np.exp(-0.5j * angles) / 2j)) if len(angles) else 1.0 + 0j
    return roots, scale


@dataclass(frozen=True)
class WeightSpec:
    """Weight data in working coordinates (see :func:`normalize_arcs`)."""

    cfg: ArcConfiguration
    factors: tuple = ()
    c_A: float = 1.0
    W_endpoints: tuple = (2, 4)

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(
            f if isinstance(f, TrigFactor) else TrigFactor(complex(f[0]), int(f[1]), int(f[2]))
            for f in self.factors))
        object.__setattr__(self, "W_endpoints", tuple(sorted(int(i) for i in self.W_endpoints)))
        check_admissible(self)

    # degrees -------------------------------------------------------------
    @property
    def a(self) -> float:
        return 0.5 * sum(f.m for f in self.factors)

    @property
    def w(self) -> float:
        return 0.5 * len(self.W_endpoints)

    @property
    def v(self) -> float:
        return 2.0 - self.w

    @property
    def w1(self) -> int:
        return sum(1 for i in self.W_endpoints if i in (1, 2))

    @property
    def w2(self) -> int:
        return sum(1 for i in self.W_endpoints if i in (3, 4))

    @property
    def V_endpoints(self) -> tuple:
        return tuple(i for i in (1, 2, 3, 4) if i not in self.W_endpoints)

    @property
    def has_masses(self) -> bool:
        return any(f.lam == -1 for f in self.factors)

    def _angles(self, idx):
        return [self.cfg.angles[i - 1] for i in idx]

    @property
    def A_angles(self) -> list:
        return [f.xi for f in self.factors for _ in range(f.m)]

    # trigonometric polynomials ------------------------------------------
    def calR(self, phi):
        return np.prod([_half_sin(phi, c) for c in self.cfg.angles], axis=0)

    def calW(self, phi):
        phi = np.asarray(phi, dtype=float)
        return np.prod([_half_sin(phi, c) for c in self._angles(self.W_endpoints)] or [np.ones_like(phi)], axis=0)

    def calV(self, phi):
        phi = np.asarray(phi, dtype=float)
        return np.prod([_half_sin(phi, c) for c in self._angles(self.V_endpoints)] or [np.ones_like(phi)], axis=0)

    def calA(self, phi):
        phi = np.asarray(phi, dtype=float)
        out = self.c_A * np.ones(phi.shape, dtype=complex)
        for c in self.A_angles:
            out = out * _half_sin(phi, c)
        # conjugate pairs make the product real
        return out.real

    # polynomial lifts (ascending coefficients) --------------------------
    def _lift(self, angles, const=1.0):
        roots, scale = _lift_roots_and_scale(angles)
        return const * scale * npoly.polyfromroots(roots) if len(roots) else np.array([const * scale])

    @property
    def R_poly(self):
        return self._lift(self.cfg.angles)

    @property
    def W_poly(self):
        return self._lift(self._angles(self.W_endpoints))

    @property
    def V_poly(self):
        return self._lift(self._angles(self.V_endpoints))

    @property
    def A_poly(self):
        return self._lift(self.A_angles, self.c_A)

    def A_j_poly(self, j: int):
        """A with one copy of the j-th factor removed."""
        ang = list(self.A_angles)
        ang.remove(self.factors[j].xi)
        return self._lift(ang, self.c_A)

    def F_w(self, phi):
        """(W^2 - V^2) / (W^2 + V^2) on the circle; +1 at endpoints in V, -1 at those in W."""
        W2, V2 = self.calW(phi) ** 2, self.calV(phi) ** 2
        return (W2 - V2) / (W2 + V2)


def check_admissible(spec: WeightSpec) -> None:
    cfg = spec.cfg
    if not set(spec.W_endpoints) <= {1, 2, 3, 4} or len(set(spec.W_endpoints)) != len(spec.W_endpoints):
        raise AdmissibilityError(f"W endpoints {spec.W_endpoints} must be distinct indices in 1..4")
    if len(spec.W_endpoints) % 2:
        raise AdmissibilityError("W must have an even number of endpoint factors")
    if not np.isfinite(spec.c_A) or spec.c_A <= 0:
        raise AdmissibilityError("c_A must be positive")
    real_xi = []
    pending = []
    for f in spec.factors:
        if f.m < 1 or f.lam not in (-1, 1):
            raise AdmissibilityError(f"factor {f}: need m >= 1 and lambda = +-1")
        if f.lam == -1 and f.m != 1:
            raise AdmissibilityError(f"factor {f}: lambda = -1 requires m = 1")
        if abs(f.xi.imag) < 1e-14:
            real_xi.append(f.xi.real)
        else:
            pending.append(f)
    for f in pending:
        partner = [g for g in pending if abs(g.xi - np.conj(f.xi)) < 1e-12 and g.m == f.m and g.lam == f.lam]
        if not partner:
            raise AdmissibilityError(f"factor {f}: non-real xi needs its conjugate partner")
    if real_xi and np.any(cfg.arc_index(np.array(real_xi)) > 0):
        raise AdmissibilityError("a real xi lies on the arcs")
    if len(set(np.round(np.mod(real_xi, TWO_PI), 12))) != len(real_xi):
        raise AdmissibilityError("factors must have distinct xi (merge multiplicities)")
    if (spec.a - spec.w + 1) < 0 or abs((spec.a - spec.w + 1) - round(spec.a - spec.w + 1)) > 1e-12:
        raise AdmissibilityError(f"a - w + 1 = {spec.a - spec.w + 1} must be a non-negative integer")


def weight_from_split(cfg: ArcConfiguration, factors=(), c_A: float = 1.0,
                      split: str = "mixed", W_endpoints=None) -> WeightSpec:
    if split == "custom":
        if W_endpoints is None:
            raise AdmissibilityError("custom split needs W_endpoints")
        idx = tuple(W_endpoints)
    elif split in SPLITS:
        idx = SPLITS[split]
    else:
        raise AdmissibilityError(f"unknown split {split!r}")
    return WeightSpec(cfg=cfg, factors=tuple(factors), c_A=c_A, W_endpoints=idx)


# --------------------------------------------------------------------------
# sqrt(R): branch cut along the arcs, fixed on the gap (phi2, phi3)
# --------------------------------------------------------------------------

def _sqrt_cut_on_arc(z, a, b, mid):
    # analytic branch of sqrt((z - a)(z - b)) with its cut on the circular arc a..b
    T = (z - a) / (z - b)
    theta = np.angle((mid - a) / (mid - b))
    return (z - b) * np.exp(0.5j * (theta - np.pi)) * np.sqrt(-T * np.exp(-1j * theta))


def _sqrt_R_raw(z, cfg: ArcConfiguration, lead: complex):
    e1, e2, e3, e4 = cfg.endpoints
    m1 = np.exp(0.5j * (cfg.phi1 + cfg.phi2))
    m2 = np.exp(0.5j * (cfg.phi3 + cfg.phi4))
    return np.sqrt(lead) * _sqrt_cut_on_arc(z, e1, e2, m1) * _sqrt_cut_on_arc(z, e3, e4, m2)


def sqrt_R_sign(spec: WeightSpec) -> complex:
    """Unit factor making sqrt(R(e^{i phi})) = -e^{i phi} sqrt(|R|) in the gap (phi2, phi3)."""
    cfg = spec.cfg
    lead = spec.R_poly[-1]
    ph = 0.5 * (cfg.phi2 + cfg.phi3)
    z = np.exp(1j * ph)
    want = -z * math.sqrt(abs(spec.calR(ph)))
    got = _sqrt_R_raw(z, cfg, lead)
    return complex(np.round((want / got).real))


def sqrt_R_branch(z, spec: WeightSpec):
    """sqrt(R(z)) analytic off the arcs, with the gap normalisation above.

    The value is cached on the spec instance for reuse.
    """
    cache = spec.__dict__.setdefault("_cache", {})
    if "sqrtR_sign" not in cache:
        cache["sqrtR_sign"] = sqrt_R_sign(spec)
    z = np.asarray(z, dtype=complex)
    return cache["sqrtR_sign"] * _sqrt_R_raw(z, spec.cfg, spec.R_poly[-1])


def y_of_u(u, spec: WeightSpec, frame: EllipticFrame):
    """sqrt(R(phi(u))) as a function on the torus: the box is the first sheet."""
    from .geometry import phi_map
    folded, flipped = fold_to_box(u, frame.K, frame.Kp)
    val = sqrt_R_branch(phi_map(folded, frame), spec)
    return np.where(flipped, -val, val)


# --------------------------------------------------------------------------
# the weight, masses and moments
# --------------------------------------------------------------------------

def evaluate_f(phi, spec: WeightSpec):
    """W (-1)^j / (A sqrt|R|) on E_j; zero outside the arcs."""
    phi = np.asarray(phi, dtype=float)
    j = spec.cfg.arc_index(phi)
    with np.errstate(divide="ignore", invalid="ignore"):
        val = spec.calW(phi) * np.where(j == 1, -1.0, 1.0) / (np.real(spec.calA(phi)) * np.sqrt(np.abs(spec.calR(phi))))
    return np.where(j > 0, val, 0.0)




def point_masses(spec: WeightSpec):
    """[(z_j, mu_j)] for the lambda = -1 factors.

    ``mu_j`` is the coefficient of ``h(z_j)`` in the discrete part of the functional:
    the residue of ``z^{a-w} W(z) / (i A(z) sqrt(R(z)))`` at ``z = exp(i xi_j)``.
    """
    out = []
    dA = npoly.polyder(spec.A_poly)
    for f in spec.factors:
        if f.lam != -1:
            continue
        z = complex(np.exp(1j * f.xi))
        num = z ** (spec.a - spec.w) * npoly.polyval(z, spec.W_poly)
        den = 1j * npoly.polyval(z, dA) * complex(sqrt_R_branch(z, spec))
        out.append((z, num / den))
    return out


@dataclass(frozen=True)
class MomentTable:
    """c_k = L(z^{-k}) for 0 <= k <= N; c_{-k} = conj(c_k).

    ``sign`` is the overall factor applied so that c_0 > 0. When the table was built
    in extended precision, ``exact`` keeps the mpmath values and ``dps`` their
    working precision.
    """

    c: np.ndarray
    sign: float
    nodes: int
    quadrature_error: float
    masses: tuple = field(default=())
    exact: tuple | None = field(default=None, repr=False)
    dps: int = 0

    def __getitem__(self, k):
        return self.c[k] if k >= 0 else np.conj(self.c[-k])

    @property
    def N(self) -> int:
        return len(self.c) - 1

    def toeplitz(self, n: int) -> np.ndarray:
        """T[i, j] = <z^i, z^j> = c_{j - i} for 0 <= i, j <= n."""
        idx = np.subtract.outer(np.arange(n + 1), np.arange(n + 1))
        full = np.concatenate([np.conj(self.c[:0:-1]), self.c])
        return full[self.N - idx]


def _arc_nodes(lo, hi, nodes):
    t = np.pi * (np.arange(nodes) + 0.5) / nodes
    mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
    return mid + half * np.cos(t), t, half


def _arc_integrand(spec: WeightSpec, j: int, nodes: int):
    # f(phi) dphi with phi = mid + half cos t; endpoint square roots cancel analytically
    cfg = spec.cfg
    lo, hi = (cfg.phi1, cfg.phi2) if j == 1 else (cfg.phi3, cfg.phi4)
    phi, t, half = _arc_nodes(lo, hi, nodes)
    x1 = half * np.cos(0.5 * t) ** 2
    x2 = half * np.sin(0.5 * t) ** 2
    others = [c for c in cfg.angles if c not in (lo, hi)]
    rest = np.abs(np.prod([_half_sin(phi, c) for c in others], axis=0))
    root = 0.5 * np.sqrt(np.sinc(x1 / np.pi) * np.sinc(x2 / np.pi) * rest)
    g = spec.calW(phi) * (-1.0 if j == 1 else 1.0) / (np.real(spec.calA(phi)) * root)
    return phi, g * (np.pi / nodes)


def _ac_moments(spec: WeightSpec, N: int, nodes: int):
    k = np.arange(N + 1)
    total = np.zeros(N + 1, dtype=complex)
    for j in (1, 2):
        phi, wts = _arc_integrand(spec, j, nodes)
        total += np.exp(-1j * np.outer(k, phi)) @ wts
    return total / TWO_PI


def compute_moments(spec: WeightSpec, N: int, nodes: int = 512, tol: float = 1e-12,
                    normalize_sign: bool = True, dps: int | None = None) -> MomentTable:
    """Moments through k = N by Gauss-Chebyshev quadrature on each arc.

    Node count doubles until two successive results agree to ``tol`` relative to
    ``max_k |c_k|`` (at least one doubling is always done). With ``dps`` set the
    whole computation runs in mpmath at that many digits and the tolerance becomes
    ``10**(5 - dps)``.
    """
    if dps is not None:
        return _compute_moments_mp(spec, N, nodes, dps, normalize_sign)
    cur = _ac_moments(spec, N, nodes)
    err = np.inf
    for _ in range(8):
        nxt = _ac_moments(spec, N, 2 * nodes)
        err = float(np.max(np.abs(nxt - cur)) / max(np.max(np.abs(nxt)), 1e-300))
        cur, nodes = nxt, 2 * nodes
        if err <= tol:
            break
    else:
        raise QuadratureConvergenceError(f"moments not converged: {err:.2e}")
    masses = point_masses(spec)
    k = np.arange(N + 1)
    for z, mu in masses:
        cur = cur + mu * z ** (-k)
    sign = 1.0
    if normalize_sign and cur[0].real < 0:
        sign = -1.0
        cur = -cur
    return MomentTable(c=cur, sign=sign, nodes=nodes, quadrature_error=err,
                       masses=tuple((z, sign * mu) for z, mu in masses))


def dps_for_degree(n: int) -> int:
    """Working digits that keep Levinson on arc measures accurate through degree n.

    Rounding in the moments is amplified roughly like 10**(0.4 n) for these
    configurations; the margin keeps about 16 correct digits.
    """
    return int(30 + 0.45 * n)


def _mp_half_sin(phi, c):
    return mpmath.sin((phi - c) / 2)


def _mp_num(x):
    x = complex(x)
    return mpmath.mpc(x) if x.imag else mpmath.mpf(x.real)


def _mp_arc_moments(spec: WeightSpec, N: int, nodes: int):
    mp = mpmath
    ang = [mp.mpf(float(x)) for x in spec.cfg.angles]
    Wi = [ang[i - 1] for i in spec.W_endpoints]
    A_ang = [_mp_num(x) for x in spec.A_angles]
    c = [mp.mpc(0)] * (N + 1)
    for j, (lo, hi) in enumerate(((ang[0], ang[1]), (ang[2], ang[3])), start=1):
        mid, half = (lo + hi) / 2, (hi - lo) / 2
        others = [x for i, x in enumerate(ang) if i not in ((0, 1) if j == 1 else (2, 3))]
        for i in range(nodes):
            t = mp.pi * (i + mp.mpf(1) / 2) / nodes
            phi = mid + half * mp.cos(t)
            x1, x2 = half * mp.cos(t / 2) ** 2, half * mp.sin(t / 2) ** 2
            rest = abs(_mp_half_sin(phi, others[0]) * _mp_half_sin(phi, others[1]))
            root = mp.sqrt(mp.sin(x1) * mp.sin(x2) * rest)
            W = mp.fprod([_mp_half_sin(phi, x) for x in Wi]) if Wi else mp.mpf(1)
            A = spec.c_A * mp.fprod([_mp_half_sin(phi, x) for x in A_ang]) if A_ang else mp.mpf(spec.c_A)
            g = W * (-1 if j == 1 else 1) / (mp.re(A) * root) * half * mp.sin(t) / (2 * nodes)
            e = mp.expj(-phi)
            p = mp.mpc(g)
            for k in range(N + 1):
                c[k] += p
                p *= e
    return c


def _mp_point_masses(spec: WeightSpec):
    # same residue as point_masses, evaluated through the trigonometric forms
    mp = mpmath
    out = []
    ang = [mp.mpf(float(x)) for x in spec.cfg.angles]
    for j, f in enumerate(spec.factors):
        if f.lam != -1:
            continue
        xi = _mp_num(f.xi)
        z = mp.expj(xi)
        W = mp.expj(spec.w * xi) * (mp.fprod([_mp_half_sin(xi, ang[i - 1]) for i in spec.W_endpoints])
                                     if spec.W_endpoints else 1)
        calR = mp.fprod([_mp_half_sin(xi, x) for x in ang])
        sgn = complex(sqrt_R_branch(complex(z), spec)) / complex(mp.expj(xi) * mp.sqrt(abs(calR)))
        sqrtR = int(round(sgn.real)) * mp.expj(xi) * mp.sqrt(abs(calR))
        others = [x for i, x in enumerate(spec.A_angles) if i != sum(g.m for g in spec.factors[:j])]
        Aj = spec.c_A * mp.fprod([mp.expj(-_mp_num(x) / 2) * (z - mp.expj(_mp_num(x))) / 2j
                                  for x in others]) if others else mp.mpf(spec.c_A)
        dA = Aj * mp.expj(-xi / 2) / 2j
        out.append((z, z ** (spec.a - spec.w) * W / (1j * dA * sqrtR)))
    return out


def _compute_moments_mp(spec, N, nodes, dps, normalize_sign):
    with mpmath.workdps(dps):
        tol = mpmath.mpf(10) ** (5 - dps)
        cur = _mp_arc_moments(spec, N, nodes)
        for _ in range(8):
            nxt = _mp_arc_moments(spec, N, 2 * nodes)
            err = max(abs(a - b) for a, b in zip(nxt, cur)) / max(abs(x) for x in nxt)
            cur, nodes = nxt, 2 * nodes
            if err <= tol:
                break
        else:
            raise QuadratureConvergenceError(f"extended-precision moments not converged: {float(err):.2e}")
        masses = _mp_point_masses(spec)
        for z, mu in masses:
            zi = 1 / z
            p = mu
            for k in range(N + 1):
                cur[k] += p
                p *= zi
        sign = 1
        if normalize_sign and cur[0].real < 0:
            sign = -1
            cur = [-x for x in cur]
        c = np.array([complex(x) for x in cur])
        return MomentTable(c=c, sign=float(sign), nodes=nodes, quadrature_error=float(err),
                           masses=tuple((complex(z), sign * complex(mu)) for z, mu in masses),
                           exact=tuple(cur), dps=dps)


@dataclass(frozen=True)
class DiscreteFunctional:
    """Nodes on the unit circle and real weights: L(h) ~ sum_i w_i h(z_i)."""

    z: np.ndarray
    w: np.ndarray
    sign: float


def discretize_functional(spec: WeightSpec, nodes: int = 2048) -> DiscreteFunctional:
    """Gauss-Chebyshev nodes on both arcs plus the point masses, sign-normalised."""
    zs, ws = [], []
    for j in (1, 2):
        phi, wts = _arc_integrand(spec, j, nodes)
        zs.append(np.exp(1j * phi))
        ws.append(wts / TWO_PI)
    for z, mu in point_masses(spec):
        zs.append(np.array([z]))
        ws.append(np.array([mu.real]))
    z, w = np.concatenate(zs), np.concatenate(ws)
    sign = -1.0 if w.sum() < 0 else 1.0
    return DiscreteFunctional(z=z, w=sign * w, sign=sign)


def is_positive_definite(moments: MomentTable, n: int | None = None):
    """(ok, smallest eigenvalue over leading sections, first failing size or None)."""
    n = moments.N if n is None else n
    T = moments.toeplitz(n)
    min_eig = np.inf
    for m in range(1, n + 2):
        e = float(np.linalg.eigvalsh(T[:m, :m]).min())
        min_eig = min(min_eig, e)
        if e <= 0:
            return False, min_eig, m - 1
    return True, min_eig, None


def conformal_points(spec: WeightSpec, frame: EllipticFrame):
    """v_j in the box with phi(v_j) = exp(i xi_j)."""
    if not spec.factors:
        return np.zeros(0, dtype=complex)
    z = np.exp(1j * np.array([f.xi for f in spec.factors]))
    return phi_inverse(z, frame)
