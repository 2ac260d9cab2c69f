"""Acceptance gate: one test per criterion, each at its stated tolerance.

A verdict line per criterion is printed in the terminal summary.
"""

import time
from functools import lru_cache

import pytest

import reference_values as ref
from goepel import abel, chain, frame, kummer
from goepel.cli import main
from goepel.errors import NearBranchPoint, PoleAtPoint
from goepel.kummer import KummerCoefficients
from goepel.sampling import draw_generic_tau, draw_point, draw_tau, sample_rng
from goepel.theta import Characteristic, theta, theta_partials, validate_riemann
from strategies import close

N_SAMPLES = 100
SEED = 0
criterion = pytest.mark.criterion


@lru_cache(maxsize=None)
def plain_samples():
    """(tau, point) pairs for the theta-level suites."""
    out = []
    for i in range(N_SAMPLES):
        rng = sample_rng(SEED, i)
        out.append((draw_tau(rng), draw_point(rng)))
    return tuple(out)


@lru_cache(maxsize=None)
def chain_samples():
    """(tau, ctx, point) with tau away from the degenerate moduli and point off the divisor."""
    out = []
    for i in range(N_SAMPLES):
        rng = sample_rng(SEED, i)
        tau, ctx = draw_generic_tau(rng, abel.prepare)
        while True:
            pt = draw_point(rng)
            try:
                ctx.pq(*pt)
                break
            except PoleAtPoint:
                continue
        out.append((tau, ctx, pt))
    return tuple(out)


@criterion(1, "duplication suite < 1e-10 over 100 samples in < 10 s")
def test_criterion_01_duplication():
    samples = plain_samples()
    t0 = time.perf_counter()
    worst = 0.0
    for tau, pt in samples:
        res = frame.duplication_residual(frame.compute_frame(pt, tau), frame.compute_nulls(tau),
                                         frame.compute_quad(pt, tau))
        worst = max(worst, res)
    elapsed = time.perf_counter() - t0
    assert worst < 1e-10, worst
    assert elapsed < 10, elapsed


@criterion(2, "linear relation < 1e-10 and ga^2 - gb^2 = 1 within 1e-10")
def test_criterion_02_linear_relation():
    for tau, pt in plain_samples():
        lc = kummer.compute_ga_gb(*kummer.compute_AB(tau))
        assert kummer.goepel_relation_residual(frame.compute_frame(pt, tau), lc) < 1e-10
        assert abs(lc.ga ** 2 - lc.gb ** 2 - 1) < 1e-10


@criterion(3, "Kummer quartic < 1e-9, unit identity within 1e-9, Hudson identity = 4 within 1e-9")
def test_criterion_03_kummer():
    for tau, pt in plain_samples():
        k = kummer.kummer_for_tau(tau)
        assert kummer.kummer_residual(frame.compute_frame(pt, tau), k) < 1e-9
        assert k.identity_residual() < 1e-9
        h = kummer.hudson_coeffs(*kummer.hudson_nulls(tau))
        assert abs(h.identity_value() - 4) < 1e-9


@criterion(4, "derivative relations vs term-wise series to 1e-8, two-route f, g to 1e-10")
def test_criterion_04_derivatives():
    for tau, ctx, pt in chain_samples():
        series, _ = chain.starting_differential_residual(pt, tau, 1e-5, 1e-15, ctx.dc)
        assert series < 1e-8
        assert chain.fg_values(pt, tau, 1e-15, (ctx.dc.A, ctx.dc.B)).deviation < 1e-10


@criterion(5, "chain identities < 1e-9 with the (+1) sign, confirmed by sign discrimination")
def test_criterion_05_chain_identities():
    # Known failure: the series support the (-1) sign in the difference identity.
    worst = {"s-form": 0.0, "sum": 0.0, "product": 0.0, "difference(+1)": 0.0}
    chosen = set()
    for _, ctx, pt in chain_samples():
        st = chain.compute_pq_state(frame.compute_frame(pt, ctx.tau))
        r1, r2, r3 = chain.half_phi_psi_identities(st, ctx.cc, +1)
        worst["s-form"] = max(worst["s-form"], chain.s_form_residual(st, ctx.k))
        worst["sum"] = max(worst["sum"], r1)
        worst["product"] = max(worst["product"], r2)
        worst["difference(+1)"] = max(worst["difference(+1)"], r3)
        chosen.add(chain.sign_discrimination(st, ctx.cc)[2])
    assert max(worst.values()) < 1e-9, worst
    assert chosen == {+1}, chosen


@criterion(6, "separability < 1e-9 over 100 (y, z) per tau; D + 1e-3 raises it above 1e-4")
def test_criterion_06_separability():
    for i, (_, ctx, _) in enumerate(chain_samples()[:5]):
        k = ctx.k
        bad = KummerCoefficients(k.C, k.D + 1e-3, k.E, k.F, k.d_sign)
        rng = sample_rng(SEED + 1, i)
        good = perturbed = 0.0
        for a, b, c, d in rng.uniform(-0.5, 0.5, size=(100, 4)):
            y, z = complex(a, b), complex(c, d)
            good = max(good, chain.separability_residual(y, z, k))
            perturbed = max(perturbed, chain.separability_residual(y, z, bad))
        assert good < 1e-9, good
        assert perturbed > 1e-4, perturbed


@criterion(7, "Moebius quartic ratio < 1e-9; E identities within 1e-10")
def test_criterion_07_moebius():
    for _, ctx, pt in chain_samples():
        yp = 0.7 * pt[0] + 0.4j * pt[1]
        _, r_ratio, _ = chain.moebius_residual(yp, ctx.cc)
        assert r_ratio < 1e-9
        assert max(ctx.cc.e_identities()) < 1e-10


# x - e grows like dU^2 near a branch point e, so a branch distance of 1e-4
# keeps the singularity about 1e-2 away in U, well beyond the largest step
REGULAR_BRANCH_DIST = 1e-4


def _regular_residuals(ctx, rng, n, steps):
    """Residuals at ``n`` regular points: off the theta divisor and away from branch points."""
    out = []
    for _ in range(50 * n):
        pt = draw_point(rng)
        try:
            x, xp, _, _ = ctx.x_pair(*pt)
            if min(ctx.curve.distance_to_branch(x), ctx.curve.distance_to_branch(xp)) < REGULAR_BRANCH_DIST:
                continue
            out.append((pt, [abel.differential_residual(*pt, ctx.tau, h, ctx) for h in steps]))
        except (PoleAtPoint, NearBranchPoint):
            continue
        if len(out) == n:
            return out
    pytest.fail(f"only {len(out)} regular points found")


@criterion(8, "Abelian differentials < 1e-6 at h = 1e-5, O(h^2) ratio in [3.5, 4.5], 5 tau in < 60 s")
def test_criterion_08_capstone():
    t0 = time.perf_counter()
    ratios = []
    for i in range(5):
        rng = sample_rng(SEED + 2, i)
        tau, ctx = draw_generic_tau(rng, abel.prepare)
        # the ratio is measured above the round-off floor of the central difference
        for pt, (r, lo, hi) in _regular_residuals(ctx, rng, 20, (1e-5, 5e-5, 1e-4)):
            assert max(r.dU1, r.dU2) < 1e-6, (tau, pt, r)
            ratios.append(max(hi.dU1, hi.dU2) / max(lo.dU1, lo.dU2))
    elapsed = time.perf_counter() - t0
    assert all(3.5 <= q <= 4.5 for q in ratios), (min(ratios), max(ratios))
    assert elapsed < 60, elapsed


def _char(ch):
    from fractions import Fraction

    return Characteristic(*(Fraction(x).limit_denominator(12) for x in ch))


@criterion(9, "oracle fixtures reproduced to 1e-12")
def test_criterion_09_oracle():
    for block in (ref.CANONICAL, ref.GENERIC):
        tau = validate_riemann(*block["tau"])
        for (ch, pt), want in block["theta"].items():
            assert close(theta(_char(ch), *pt, tau, 1e-15).value, want, 1e-12)
        for (ch, pt, var), want in block["partials"].items():
            dx, dy = theta_partials(_char(ch), *pt, tau, 1e-15)
            assert close(dx if var == "x" else dy, want, 1e-12)
        for got, want in zip(frame.compute_nulls(tau, 1e-15).as_tuple(), block["nulls"]):
            assert close(got, want, 1e-12)
        A, B = kummer.compute_AB(tau, 1e-15)
        assert close(A, block["AB"][0], 1e-12) and close(B, block["AB"][1], 1e-12)
        k = kummer.compute_kummer_coeffs(frame.compute_nulls(tau, 1e-15))
        for name in ("C", "E", "F"):
            assert close(getattr(k, name), block["kummer"][name], 1e-12), name
        assert abs(abs(k.D) - block["kummer"]["absD"]) < 1e-12 * max(block["kummer"]["absD"], 1)
        hn = kummer.hudson_nulls(tau, 1e-15)
        for got, want in zip(hn, block["hudson_nulls"]):
            assert close(got, want, 1e-12)
        h = kummer.hudson_coeffs(*hn)
        for name in ("A1", "B1", "C1", "D1"):
            assert close(getattr(h, name), block["hudson"][name], 1e-12), name
        if "derivative" in block:
            dc = chain.derivative_constants(tau, 1e-15)
            for name, want in block["derivative"].items():
                assert close(getattr(dc, name), want, 1e-12), name
    inv = ref.GENERIC["inversion"]
    ctx = abel.prepare(validate_riemann(*ref.GENERIC["tau"]))
    x, xp, p, q = ctx.x_pair(*inv["uv"])
    assert close(p, inv["p"], 1e-12) and close(q, inv["q"], 1e-12)
    assert close(x + xp, inv["p22"], 1e-12) and close(-x * xp, inv["p12"], 1e-12)


@criterion(10, "verify --seed 0 byte-identical across runs and worker counts")
def test_criterion_10_determinism(tmp_path):
    blobs = []
    for n, workers in enumerate((1, 1, 4)):
        out = tmp_path / f"r{n}.json"
        assert main(["verify", "--seed", "0", "--workers", str(workers), "--out", str(out)]) == 0
        blobs.append(out.read_bytes())
    assert blobs[0] == blobs[1] == blobs[2]
