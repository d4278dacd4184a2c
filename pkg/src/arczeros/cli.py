"""Command line front end: ``arczeros <command> --config run.json``."""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys
import traceback
from concurrent.futures import ThreadPoolExecutor

import mpmath
import numpy as np

from . import output as out
from .config import SCHEMA_VERSION, ConfigError, RunConfig, load_config
from .geometry import capacity, curve_s, distance_to_curve, harmonic_measure_omega2
from .orthopoly import levinson, verify_quadratic_identity
from .theta_rep import minimal_tau, pell_identity, pn_theta, qn_theta, t_polynomial_existence
from .weights import (compute_moments, conformal_points, dps_for_degree, is_positive_definite,
                      point_masses)
from .zeros import (StripConfig, accumulation_analysis, equilibrium_check, find_n0,
                    zero_pipeline)

COMMANDS = ("describe", "moments", "orthopoly", "zeros", "verify", "curve", "tpoly")

_MODULES = {
    "elliptic": "elliptic_core", "geometry": "arc_geometry", "weights": "weight_model",
    "orthopoly": "orthopoly_engine", "theta_rep": "theta_representation",
    "zeros": "zero_analysis", "config": "cli_io", "cli": "cli_io", "output": "cli_io",
}


class CheckFailed(RuntimeError):
    pass


def _origin(exc: BaseException) -> str:
    """Name of the library module in which the exception was raised."""
    name = "cli_io"
    for frame in traceback.extract_tb(exc.__traceback__):
        parts = frame.filename.replace("\\", "/").split("/")
        if len(parts) >= 2 and parts[-2] == "arczeros":
            name = _MODULES.get(parts[-1][:-3], name)
    return name


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("ARCZEROS_THREADS", "1")))
    except ValueError:
        return 1


def _pmap(func, items):
    items = list(items)
    if _threads() == 1 or len(items) < 2:
        return [func(x) for x in items]
    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        return list(pool.map(func, items))


# --------------------------------------------------------------------------
# shared helpers
# --------------------------------------------------------------------------

class Context:
    def __init__(self, run: RunConfig):
        self.run = run
        self.cfg, self.frame, self.spec = run.build()
        self.psi = self.cfg.rotation_psi

    def rot(self, z):
        return np.exp(1j * self.psi) * np.asarray(z)

    def moments(self, N: int):
        dps = self.run.dps
        if dps == "auto":
            dps = dps_for_degree(N) if N > 16 else None
        mt = compute_moments(self.spec, N, nodes=self.run.nodes, dps=dps)
        if self.run.perturb:
            mt = perturb_moments(mt, *self.run.perturb)
        return mt

    def masses(self):
        return [np.exp(1j * f.xi) for f in self.spec.factors if f.lam == -1]

    def header(self, command: str) -> dict:
        return {"schema_version": SCHEMA_VERSION, "command": command, "config": self.run.resolved(),
                "rotation_psi": self.psi}

    def path(self, name: str) -> str:
        return os.path.join(out.ensure_dir(self.run.out_dir), name)

    def wants(self, fmt: str) -> bool:
        return fmt in self.run.formats


def perturb_moments(mt, index: int, delta: float):
    """Copy of the table with c_index shifted by delta (and its conjugate partner implied)."""
    if index > mt.N:
        raise ConfigError(f"field 'perturb_moment/index': {index} exceeds the table size {mt.N}")
    c = mt.c.copy()
    c[index] += delta
    exact = mt.exact
    if exact is not None:
        with mpmath.workdps(mt.dps):
            exact = list(exact)
            exact[index] = exact[index] + mpmath.mpf(delta)
            exact = tuple(exact)
    return dataclasses.replace(mt, c=c, exact=exact)


def _require_pd(mt, n: int) -> dict:
    ok, min_eig, bad = is_positive_definite(mt, n)
    if not ok:
        raise CheckFailed(f"[weight_model] functional not positive definite: leading Toeplitz "
                          f"section of size {bad + 1} (indices 0..{bad}) has eigenvalue {min_eig:.3e}")
    return {"positive_definite": True, "min_eigenvalue": min_eig}


def _polish_phase(ph) -> dict:
    return {"n": ph.n, "b": ph.b, "delta": ph.delta, "l": ph.l, "m": ph.m, "k": ph.k, "X": ph.X}


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------

def cmd_describe(ctx: Context) -> int:
    fr, spec = ctx.frame, ctx.spec
    m = fr.modulus
    w2 = harmonic_measure_omega2(fr)
    curve = curve_s(fr)
    rep = ctx.header("describe")
    rep.update({
        "normalized_angles": list(ctx.cfg.angles),
        "k": m.k, "k_prime": m.k_prime, "K": m.K, "K_prime": m.K_prime, "q": m.q,
        "zeta": fr.zeta, "omega1": 1.0 - w2, "omega2": w2, "tau": capacity(fr),
        "curve_S": {"level": curve.level, "start": ctx.rot(curve.samples[0]),
                    "end": ctx.rot(curve.samples[-1])},
        "weight": {"a": spec.a, "w": spec.w, "v": spec.v, "w1": spec.w1, "w2": spec.w2,
                   "W_endpoints": list(spec.W_endpoints),
                   "conformal_points": list(conformal_points(spec, fr)),
                   "point_masses": [{"z": ctx.rot(z), "mass": mu} for z, mu in point_masses(spec)]},
    })
    text = out.dumps(rep)
    sys.stdout.write(text)
    if ctx.wants("json"):
        out.write_text(ctx.path("describe.json"), text)
    if ctx.wants("csv"):
        rows = [("k", m.k), ("k_prime", m.k_prime), ("K", m.K), ("K_prime", m.K_prime), ("q", m.q),
                ("zeta_re", fr.zeta.real), ("zeta_im", fr.zeta.imag), ("omega1", 1.0 - w2),
                ("omega2", w2), ("tau", capacity(fr))]
        out.write_csv(ctx.path("describe.csv"), ["quantity", "value"], rows)
    return 0


def cmd_moments(ctx: Context) -> int:
    N = max(ctx.run.n_values)
    mt = ctx.moments(N)
    ok, min_eig, bad = is_positive_definite(mt, N)
    c = mt.c * np.exp(-1j * np.arange(N + 1) * ctx.psi)
    rep = ctx.header("moments")
    rep.update({"N": N, "moments": list(c), "sign": mt.sign, "nodes": mt.nodes,
                "quadrature_error": mt.quadrature_error, "dps": mt.dps,
                "masses": [{"z": ctx.rot(z), "mass": mu} for z, mu in mt.masses],
                "positive_definite": ok, "min_eigenvalue": min_eig,
                "first_failing_section": None if bad is None else bad + 1})
    if ctx.wants("csv"):
        out.write_csv(ctx.path("moments.csv"), ["k", "re", "im"],
                      [(str(k), x.real, x.imag) for k, x in enumerate(c)])
    if ctx.wants("json"):
        out.write_json(ctx.path("moments.json"), rep)
    print(f"moments c_0..c_{N}: positive definite = {ok}, min eigenvalue {min_eig:.3e}")
    return 0


def cmd_orthopoly(ctx: Context) -> int:
    ns = ctx.run.n_values
    N = max(ns)
    mt = ctx.moments(N + 1)
    _require_pd(mt, N)
    lev = levinson(mt, N)
    rows, per_n = [], []
    for n in ns:
        p = lev.polys[n].coeffs * np.exp(1j * (n - np.arange(n + 1)) * ctx.psi)
        rows += [(str(n), str(k), x.real, x.imag) for k, x in enumerate(p)]
        per_n.append({"n": n, "coefficients": list(p), "norm": lev.norms[n]})
    rep = ctx.header("orthopoly")
    rep.update({"reflection": list(np.asarray(lev.reflection) * np.exp(-1j * np.arange(1, len(lev.reflection) + 1) * ctx.psi)),
                "polynomials": per_n})
    if ctx.wants("csv"):
        out.write_csv(ctx.path("orthopoly.csv"), ["n", "k", "re", "im"], rows)
    if ctx.wants("json"):
        out.write_json(ctx.path("orthopoly.json"), rep)
    print(f"orthogonal polynomials for n in {ns[0]}..{ns[-1]}")
    return 0


def _zero_records(ctx: Context, ns):
    strips = StripConfig(ctx.run.epsilon) if ctx.run.epsilon else None
    mt = ctx.moments(max(ns) + 1)
    _require_pd(mt, max(ns))
    return zero_pipeline(ctx.frame, ctx.spec, ns, strips=strips, moments=mt)


def cmd_zeros(ctx: Context) -> int:
    fr, spec = ctx.frame, ctx.spec
    ns = ctx.run.n_values
    recs = _zero_records(ctx, ns)
    curve = curve_s(fr)
    masses = ctx.masses()
    per_n = []
    zdir = out.ensure_dir(ctx.path("zeros"))
    for rec in recs:
        order = np.lexsort((np.abs(rec.zeros), np.angle(rec.zeros)))
        z = rec.zeros[order]
        cls = rec.classification
        strip = np.where(cls.strip1[order], "1", np.where(cls.strip2[order], "2", "stray"))
        dist = distance_to_curve(z, fr, curve)
        md = (np.min(np.abs(z[:, None] - np.array(masses)[None, :]), axis=1) if masses
              else np.full(len(z), np.nan))
        zo = ctx.rot(z)
        if ctx.wants("csv"):
            rows = [(str(rec.n), str(i), zo[i].real, zo[i].imag, abs(zo[i]), strip[i], dist[i], md[i])
                    for i in range(len(z))]
            out.write_csv(os.path.join(zdir, f"zeros_n{rec.n:03d}.csv"),
                          ["n", "index", "re", "im", "abs", "strip", "dist_to_S", "nearest_mass_dist"], rows)
        if ctx.wants("svg"):
            arcs = [(ctx.cfg.phi1 + ctx.psi, ctx.cfg.phi2 + ctx.psi), (ctx.cfg.phi3 + ctx.psi, ctx.cfg.phi4 + ctx.psi)]
            out.write_text(os.path.join(zdir, f"zeros_n{rec.n:03d}.svg"),
                           out.svg_figure(arcs, ctx.rot(curve.samples), zo, ctx.rot(np.array(masses)),
                                          title=f"zeros of P_{rec.n}"))
        p = rec.predicted
        per_n.append({"n": rec.n, "phase": _polish_phase(rec.phase), "epsilon": rec.strips.epsilon,
                      "predicted": {"k1": p.k1, "k2": p.k2, "beta_n": p.beta_n, "gamma_n": p.gamma_n,
                                    "strays": p.strays},
                      "observed": {"k1": rec.observed[0], "k2": rec.observed[1],
                                   "strays": int(cls.strays.sum())},
                      "match": (p.k1, p.k2) == tuple(rec.observed),
                      "inversion_failures": cls.failed})
    acc = accumulation_analysis(recs, fr, spec)
    eq = equilibrium_check(recs, fr)
    rep = ctx.header("zeros")
    rep.update({"degrees": per_n, "n0": find_n0(recs),
                "omega2": acc.omega2,
                "omega2_rational": {"rational": acc.omega2_rational.rational,
                                    "numerator": acc.omega2_rational.numerator,
                                    "denominator": acc.omega2_rational.denominator},
                "strays": [{"n": n, "z": ctx.rot(z), "dist_to_S": d}
                           for n, z, d in zip(acc.stray_degrees, acc.stray_points, acc.distances_to_S)],
                "equilibrium": [dataclasses.asdict(r) for r in eq]})
    if ctx.wants("json"):
        out.write_json(ctx.path("zeros.json"), rep)
    bad = [d["n"] for d in per_n if not d["match"]]
    print(f"zeros for n in {ns[0]}..{ns[-1]}: count mismatches at {bad if bad else 'none'}; n0 = {rep['n0']}")
    return 0


def cmd_curve(ctx: Context) -> int:
    curve = curve_s(ctx.frame)
    z = ctx.rot(curve.samples)
    rep = ctx.header("curve")
    rep.update({"level": curve.level, "samples": len(z), "start": z[0], "end": z[-1]})
    if ctx.wants("csv"):
        out.write_csv(ctx.path("curve_S.csv"), ["index", "t", "re", "im"],
                      [(str(i), t, x.real, x.imag) for i, (t, x) in enumerate(zip(curve.t, z))])
    if ctx.wants("json"):
        out.write_json(ctx.path("curve_S.json"), rep)
    if ctx.wants("svg"):
        arcs = [(ctx.cfg.phi1 + ctx.psi, ctx.cfg.phi2 + ctx.psi), (ctx.cfg.phi3 + ctx.psi, ctx.cfg.phi4 + ctx.psi)]
        out.write_text(ctx.path("curve_S.svg"), out.svg_figure(arcs, z, (), ctx.rot(np.array(ctx.masses())),
                                                               title="curve S"))
    print(f"curve S at Im u = {curve.level:.6f}, {len(z)} samples")
    return 0


def cmd_tpoly(ctx: Context) -> int:
    fr, spec = ctx.frame, ctx.spec
    tol = ctx.run.tol("pell")

    def one(n):
        nu = n / 2
        ex = t_polynomial_existence(nu, fr, spec)
        row = {"n": n, "nu": nu, "exists": ex.exists, "l_nu": ex.l_nu, "residual": ex.residual}
        if not ex.exists:
            return row, None
        tp = minimal_tau(nu, fr, spec)
        pell = pell_identity(tp)
        ends = np.real(tp.tau(ctx.cfg.angles)) / np.sqrt(spec.calA(ctx.cfg.angles))
        row.update({"mu": tp.mu, "pell_residual": pell.residual, "fit_tail": pell.tail,
                    "endpoint_ratios": list(ends), "pell_ok": pell.residual <= tol,
                    "P": list(pell.P), "Q": list(pell.Q)})
        c = ctx.cfg
        phi = np.concatenate([np.linspace(c.phi1, c.phi2, 101), np.linspace(c.phi3, c.phi4, 101)])
        tau = np.real(tp.tau(phi))
        return row, (phi, tau, tau / np.sqrt(spec.calA(phi)))

    results = _pmap(one, ctx.run.n_values)
    for row, samples in results:
        if samples is not None and ctx.wants("csv"):
            phi, tau, ratio = samples
            out.write_csv(ctx.path(f"tpoly_n{row['n']:03d}.csv"), ["theta", "phi", "tau", "ratio"],
                          [(p + ctx.psi, p, t, r) for p, t, r in zip(phi, tau, ratio)])
        print(f"n = {row['n']} (nu = {row['nu']}): exists = {row['exists']}"
              + (f", Pell residual {row['pell_residual']:.2e}" if row["exists"] else ""))
    rep = ctx.header("tpoly")
    rep["results"] = [r for r, _ in results]
    if ctx.wants("json"):
        out.write_json(ctx.path("tpoly.json"), rep)
    return 0


def cmd_verify(ctx: Context) -> int:
    fr, spec, run = ctx.frame, ctx.spec, ctx.run
    ns = run.n_values
    N = max(ns)
    mt = ctx.moments(N + 1)
    pd = _require_pd(mt, N)
    lev = levinson(mt, N)
    # extended-precision work stays on this thread (mpmath precision is global state)
    recs = {r.n: r for r in zero_pipeline(fr, spec, ns, moments=mt)}

    def one(n):
        checks = []
        theta, rep = pn_theta(n, fr, spec)
        P = lev.polys[n]
        err = float(np.max(np.abs(theta - P.coeffs)) / np.max(np.abs(P.coeffs)))
        checks.append(("theta_vs_levinson", err, run.tol("theta_vs_levinson")))
        q = qn_theta(rep)
        ident = verify_quadratic_identity(P, q, spec)
        tq = run.tol("quadratic_identity")
        checks.append(("quadratic_identity", max(ident.residual, ident.low_order), tq))
        if ident.mass_residuals:
            checks.append(("mass_side_conditions", max(ident.mass_residuals), tq))
        checks.append(("origin_side_condition", abs(ident.origin_ratio - 1.0), tq))
        rec = recs[n]
        mism = 0.0 if (rec.predicted.k1, rec.predicted.k2) == tuple(rec.observed) else 1.0
        checks.append(("zero_counts", mism, 0.5))
        return n, checks, (rec.predicted.k1, rec.predicted.k2), rec.observed

    rows = _pmap(one, ns)
    report = ctx.header("verify")
    items, failing = [], []
    for n, checks, pred, obs in rows:
        for name, val, tol in checks:
            ok = bool(val <= tol)
            items.append({"n": n, "check": name, "value": val, "tolerance": tol, "pass": ok})
            if not ok:
                failing.append(f"n={n}:{name}")
        items.append({"n": n, "check": "counts_detail", "predicted": list(pred), "observed": list(obs)})
    report.update({"positivity": pd, "checks": items, "failing": failing,
                   "verdict": "pass" if not failing else "fail"})
    if ctx.wants("json"):
        out.write_json(ctx.path("verify.json"), report)
    for it in items:
        if "pass" in it:
            print(f"{'PASS' if it['pass'] else 'FAIL'} n={it['n']:3d} {it['check']:24s} "
                  f"{it['value']:.3e} (tol {it['tolerance']:.0e})")
    print(f"verdict: {report['verdict']}")
    return 0 if not failing else 1


_DISPATCH = {"describe": cmd_describe, "moments": cmd_moments, "orthopoly": cmd_orthopoly,
             "zeros": cmd_zeros, "verify": cmd_verify, "curve": cmd_curve, "tpoly": cmd_tpoly}


def _parse_range(text: str):
    try:
        a, b = (int(x) for x in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a:b, got {text!r}") from None
    if b < a:
        raise argparse.ArgumentTypeError(f"empty range {text!r}")
    return tuple(range(a, b + 1))


def _parse_formats(text: str):
    fm = tuple(x.strip() for x in text.split(",") if x.strip())
    bad = [x for x in fm if x not in ("csv", "json", "svg")]
    if bad:
        raise argparse.ArgumentTypeError(f"unknown format(s) {bad}")
    return fm


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="arczeros",
                                description="Orthogonal polynomials on two arcs of the unit circle.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", required=True, help="JSON run configuration")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--n", type=int, help="single degree (for tpoly: the degree 2 nu)")
    g.add_argument("--n-range", type=_parse_range, help="inclusive degree range a:b")
    p.add_argument("--out", help="output directory (overrides the config)")
    p.add_argument("--format", type=_parse_formats, help="comma separated subset of csv,json,svg")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        run = load_config(args.config)
        upd = {}
        if args.n is not None:
            if args.n < 1:
                raise ConfigError("option '--n': must be positive")
            upd["n_values"] = (args.n,)
        if args.n_range is not None:
            upd["n_values"] = args.n_range
        if args.out:
            upd["out_dir"] = args.out
        if args.format:
            upd["formats"] = args.format
        run = dataclasses.replace(run, **upd)
        ctx = Context(run)
        return _DISPATCH[args.command](ctx)
    except CheckFailed as exc:
        sys.stderr.write(f"arczeros: {exc}\n")
        return 1
    except ConfigError as exc:
        sys.stderr.write(f"arczeros: [cli_io] configuration error: {exc}\n")
        return 2
    except OSError as exc:
        sys.stderr.write(f"arczeros: [cli_io] {exc}\n")
        return 2
    except Exception as exc:  # surfaced with the module that raised it
        sys.stderr.write(f"arczeros: [{_origin(exc)}] {type(exc).__name__}: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
