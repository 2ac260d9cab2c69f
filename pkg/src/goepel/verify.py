"""Verification suites producing a machine-readable report.

Every sample i draws its own (tau, point, y, z, y') from an RNG seeded by
(seed, i), so records do not depend on execution order or worker count.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import abel, chain, frame, kummer
from .errors import GoepelError, NearBranchPoint, PoleAtPoint, SingularLocus
from .sampling import SamplerConfig, draw_generic_tau, draw_point, sample_rng


@dataclass(frozen=True)
class RunConfig:
    tau: tuple | None = None
    point: tuple | None = None
    U: tuple | None = None
    eps: float = 1e-12
    tol_alg: float = 1e-9
    tol_fd: float = 1e-6
    h: float = 1e-5
    samples: int = 100
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        for name in ("eps", "tol_alg", "tol_fd", "h"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.samples < 1:
            raise ValueError("samples must be >= 1")


@dataclass
class Record:
    id: str
    eq: str
    residual: float
    tol: float
    passed: bool
    flags: dict = field(default_factory=dict)
    sample: int = 0

    def to_json(self):
        return {
            "id": self.id,
            "eq": self.eq,
            "residual": self.residual,
            "tol": self.tol,
            "pass": self.passed,
            "flags": self.flags,
            "sample": self.sample,
        }


def encode_complex(z):
    z = complex(z)
    return [z.real, z.imag]


class _Collector:
    def __init__(self, sample, cfg: RunConfig):
        self.sample = sample
        self.cfg = cfg
        self.records = []

    def add(self, rid, eq, residual, tol=None, flags=None):
        tol = self.cfg.tol_alg if tol is None else tol
        residual = float(residual)
        ok = bool(math.isfinite(residual) and residual < tol)
        self.records.append(Record(rid, eq, residual, tol, ok, dict(flags or {}), self.sample))


def _rand_small(rng, radius=0.4):
    r = rng.uniform(-radius, radius, size=2)
    return complex(r[0], r[1] * 0.5)


def run_sample(i: int, cfg: RunConfig, sampler: SamplerConfig = SamplerConfig()):
    """All records for sample ``i``; returns (records, tau)."""
    rng = sample_rng(cfg.seed, i)
    tau, ctx = draw_generic_tau(rng, lambda t: abel.prepare(t, 1e-15))
    eps = cfg.eps
    col = _Collector(i, cfg)

    # regular point: off the divisor and away from branch points
    for _ in range(50):
        pt = draw_point(rng, sampler)
        try:
            x0, xp0, _, _ = ctx.x_pair(*pt)
        except PoleAtPoint:
            continue
        if min(ctx.curve.distance_to_branch(x0), ctx.curve.distance_to_branch(xp0)) > 1e-3:
            break

    fr = frame.compute_frame(pt, tau, eps)
    nulls = frame.compute_nulls(tau, eps)
    quad = frame.compute_quad(pt, tau, eps)
    origin = frame.compute_frame((0, 0), tau, eps)

    col.add("dup", "X3^2,X1^2,X2^2,X0^2 = M (null * doubled) for X in P,Q,R,S",
            frame.duplication_residual(fr, nulls, quad))

    A, B = kummer.compute_AB(tau, eps)
    lc = kummer.compute_ga_gb(A, B)
    col.add("linear", "Q1 R1 = ga P1 S1 + gb P2 S2", kummer.goepel_relation_residual(fr, lc))
    checks = kummer.linear_constant_checks(lc, nulls, origin)
    col.add("linear-unit", "ga^2 - gb^2 = 1", checks["ga2-gb2=1"])
    col.add("null-sum", "S3(0) P3(0) = 2(A^2 + B^2)", checks["S3P3=2(A2+B2)"])
    col.add("null-prod", "Q3(0) R3(0) = 4AB", checks["Q3R3=4AB"])
    col.add("gb-sq", "gb^2 = (t^2-u^2-v^2+w^2)(tw-uv) / (2(tu+vw)(tv+uw))", checks["gb2 from nulls"])

    k = ctx.k
    col.add("kummer", "P1^4+S1^4+P2^4+S2^4-2F(..)+2C(..)-2E(..)-4D P1P2S1S2 = 0",
            kummer.kummer_residual(fr, k), flags={"D sign": k.d_sign})
    col.add("kummer-unit", "C^2 - D^2 + E^2 + F^2 - 2CEF = 1", k.identity_residual())
    hud = kummer.hudson_coeffs(origin.P3, origin.S3, origin.P0, origin.S0)
    col.add("hudson", "A1^2 + B1^2 + C1^2 - D1^2 - A1 B1 C1 = 4", abs(hud.identity_value() - 4) / 4)
    match, s = kummer.hudson_kummer_match(hud, k)
    col.add("hudson-match", "(A1, B1, C1, 2 D1) = (2C, -2F, -2E, -4D)", match, flags={"D1 sign": s})

    dc = ctx.dc
    series_res, fd_res = chain.starting_differential_residual(pt, tau, cfg.h, 1e-15, dc)
    col.add("deriv", "P1 dS1 - S1 dP1 = i f (alpha du + gamma dv) -+ i g (beta du + delta dv)", series_res)
    col.add("deriv-fd", "s dp -+ dq/s = phi dmu, psi dnu", fd_res, cfg.tol_fd, {"h": cfg.h})
    fg = chain.fg_values(pt, tau, eps, (A, B))
    col.add("fg", "f = (P3S3 - P0S0)/(2A), g = (P3S3 + P0S0)/(2B)", fg.deviation)

    cc = ctx.cc
    st = chain.compute_pq_state(fr)
    col.add("s-elim", "(1-2Ep^2+p^4)s^2 + (1-2Eq^2+q^4)/s^2 = 2G", chain.s_form_residual(st, k))
    r1, r2, r3 = chain.half_phi_psi_identities(st, cc, -1)
    col.add("phipsi-sum", "(phi^2 + psi^2)/2 = cb(1+p^2q^2) - ca(p^2+q^2) + 2 cc pq", r1)
    col.add("phipsi-prod", "(phi psi)^2 = (G^2 - Delta(p)^2 Delta(q)^2)/(E^2 - 1)", r2)
    col.add("phipsi-diff", "(phi^2 - psi^2)/4 = -(cb1(1+p^2q^2)/2 - cc1 pq)", r3, flags={"sign": -1})
    rp, rm, chosen = chain.sign_discrimination(st, cc)
    decisive = min(rp, rm) / max(rp, rm, 1e-300)
    col.add("phipsi-diff-sign", "sign discrimination for (phi^2 - psi^2)/4", decisive, 1e-3,
            {"chosen": chosen, "res_plus": rp, "res_minus": rm})
    col.add("phipsi-sq", "phi^2, psi^2 as quadratic forms in (1+p^2q^2, p^2+q^2, pq)",
            chain.phi_psi_sq_residual(st, cc))

    y, z = _rand_small(rng), _rand_small(rng)
    col.add("separable", "2G -+ 2 Delta(p)Delta(q) = 2(F+-1) Q(y) Q(z) / (1-y^2z^2)^2",
            chain.separability_residual(y, z, k))
    col.add("phipsi-yz", "phi^2, psi^2 factor into y- and z-quartics", chain.phi_psi_yz_residual(y, z, cc))
    yp = _rand_small(rng)
    _, r_ratio, r_dz = chain.moebius_residual(yp, cc)
    col.add("moebius", "Q(E3,z)/Q(E4,z) = (F-1)/(F+1) Q(E1,y')/Q(E2,y')", r_ratio)
    e1, e2, e3 = cc.e_identities()
    col.add("E-ids", "1-E(E1+E3)+E1E3 = 0, 1-E(E2+E4)+E2E4 = 0, (E-E4)/(E-E3) = (F+1)/(F-1)",
            max(e1, e2, e3))
    try:
        sep = chain.separable_differential_residual(y, yp, cc, k, cfg.h)
        col.add("separated-diff", "dmu, dnu in (p,q) form = separated (y, y') form",
                max(sep.mu, sep.nu), cfg.tol_fd, sep.flags)
    except (GoepelError,) as exc:
        col.add("separated-diff", "dmu, dnu in (p,q) form = separated (y, y') form",
                float("inf"), cfg.tol_fd, {"error": type(exc).__name__})

    col.add("x-fg", "x, x' via f, g factorization = direct forms", abel.fg_route_residual(st.p, st.q, cc))
    forms = abel.symmetric_forms(st.p, st.q, k.E)
    xa, xb = abel.x_from_pq(st.p, st.q, k.E)
    col.add("p22", "x + x' = 2(E(1+p^2q^2) - (p^2+q^2)) / ((E+1)(1+pq)^2)",
            max(abs(xa + xb - forms["sum"]), abs(xa + xb - forms["sum_split"])) / max(abs(xa + xb), 1))
    col.add("p12", "-x x' = -(E-1)/(E+1) + 4(E-1)pq/((E+1)(1+pq)^2)",
            abs(-xa * xb - forms["neg_product"]) / max(abs(xa * xb), 1))
    try:
        dr = abel.differential_residual(pt[0], pt[1], tau, cfg.h, ctx)
        col.add("abel", "dx/sqrt(f5) + dx'/sqrt(f5') = dU1, x dx/sqrt(f5) + x' dx'/sqrt(f5') = dU2",
                max(dr.dU1, dr.dU2), cfg.tol_fd,
                {"sqrt_f5_signs": list(dr.signs), "pairing": ctx.pmap.flags["pairing"],
                 "sigma": ctx.pmap.flags["sigma"]})
    except (NearBranchPoint, SingularLocus, PoleAtPoint) as exc:
        col.add("abel", "dx/sqrt(f5) + dx'/sqrt(f5') = dU1, x dx/sqrt(f5) + x' dx'/sqrt(f5') = dU2",
                float("inf"), cfg.tol_fd, {"error": type(exc).__name__})
    return col.records, tau, pt


def run_verification(cfg: RunConfig) -> dict:
    """Run all suites over ``cfg.samples`` draws; returns the report dict."""
    idx = range(cfg.samples)
    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(lambda i: run_sample(i, cfg), idx))
    else:
        results = [run_sample(i, cfg) for i in idx]
    records = [r for recs, _, _ in results for r in recs]
    taus = [[encode_complex(z) for z in tau.as_tuple()] for _, tau, _ in results]
    points = [[encode_complex(z) for z in pt] for _, _, pt in results]
    passed = sum(r.passed for r in records)
    finite = [r.residual for r in records if math.isfinite(r.residual)]
    summary = {
        "total": len(records),
        "passed": passed,
        "failed": len(records) - passed,
        "max_residual": max(finite) if finite else None,
        "seed": cfg.seed,
        "samples": cfg.samples,
        "tau": taus,
        "points": points,
        "tolerances": {"eps": cfg.eps, "tol_alg": cfg.tol_alg, "tol_fd": cfg.tol_fd, "h": cfg.h},
    }
    return {"records": [r.to_json() for r in records], "summary": summary}


def _json_default(obj):
    if isinstance(obj, complex):
        return encode_complex(obj)
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.complexfloating):
        return encode_complex(obj)
    raise TypeError(f"not serializable: {type(obj)}")


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2, default=_json_default, allow_nan=True) + "\n"
