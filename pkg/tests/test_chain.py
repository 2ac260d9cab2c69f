from functools import lru_cache

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

import reference_values as ref
from goepel import abel
from goepel.chain import (
    G_and_Delta,
    chain_constants,
    compute_pq_state,
    delta,
    delta_product_yz,
    derivative_constants,
    fg_values,
    half_phi_psi_identities,
    moebius_residual,
    phi_psi_sq_residual,
    phi_psi_yz_residual,
    pq_from_yz,
    pq_symmetric_residual,
    quartic,
    root_checks,
    s_form_residual,
    separability_residual,
    separable_differential_residual,
    sign_discrimination,
    starting_differential_residual,
    tangent_form_residual,
    yz_from_pq,
    z_from_yprime,
)
from goepel.errors import BranchInconsistency, DegenerateModuli, PoleAtPoint, SingularLocus
from goepel.frame import compute_frame, compute_nulls
from goepel.kummer import KummerCoefficients, kummer_for_tau
from goepel.theta import validate_riemann
from strategies import close, generic_draw, points, rel, small_complex

seeds = st.integers(0, 10_000)


@lru_cache(maxsize=None)
def ctx_for(seed):
    """Non-degenerate context for a seed (cached: constants depend on tau only)."""
    return generic_draw(seed, lambda t: abel.prepare(t, resolve=False))[1]


def state_at(ctx, pt):
    return compute_pq_state(compute_frame(pt, ctx.tau))


# ---- frame ratios


def test_pole_on_theta_divisor_is_refused(generic_tau):
    fr = compute_frame((0.1, 0.2), generic_tau)
    with pytest.raises(PoleAtPoint):
        compute_pq_state(type(fr)(**{**fr.as_dict(), "P1": 0j}, point=fr.point, tau=fr.tau))


def test_real_frame_gives_real_ratios():
    tau = validate_riemann(0.9j, 1.3j, 0.4j)
    stt = compute_pq_state(compute_frame((0.13, -0.07), tau))
    for z in (stt.p, stt.q, stt.s):
        assert abs(z.imag) < 1e-12 * max(abs(z), 1)


# ---- derivative constants


@pytest.mark.parametrize("block", [ref.CANONICAL, ref.GENERIC], ids=["canonical", "generic"])
def test_derivative_constants_match_oracle(block):
    dc = derivative_constants(validate_riemann(*block["tau"]))
    for name in ("alpha", "beta", "gamma", "delta"):
        assert close(getattr(dc, name), block["derivative"][name], 1e-12), name


@given(seeds)
def test_derivative_constants_series_vs_finite_difference(seed):
    assert ctx_for(seed).dc.fd_agreement < 1e-8


def test_half_characteristic_differences_vanish_at_origin(generic_tau):
    from goepel.chain import _half_diffs

    d1, d2 = _half_diffs(0, 0, generic_tau.doubled(), 1e-15)
    assert abs(d1) < 1e-14 and abs(d2) < 1e-14


@given(seeds, points)
def test_starting_differential(seed, pt):
    ctx = ctx_for(seed)
    try:
        series, fd = starting_differential_residual(pt, ctx.tau, 1e-5, 1e-15, ctx.dc)
    except PoleAtPoint:
        assume(False)
    assert series < 1e-8
    assert fd < 1e-6


def test_starting_differential_rejects_large_step(generic_tau):
    with pytest.raises(ValueError):
        starting_differential_residual((0.1, 0.1), generic_tau, 1e-2)


@given(seeds, points)
def test_fg_two_routes(seed, pt):
    ctx = ctx_for(seed)
    assert fg_values(pt, ctx.tau, 1e-15, (ctx.dc.A, ctx.dc.B)).deviation < 1e-10


def test_fg_at_origin_relates_to_nulls(generic_tau):
    fg = fg_values((0, 0), generic_tau)
    fr = compute_frame((0, 0), generic_tau)
    dc = derivative_constants(generic_tau)
    assert rel(fr.P3 * fr.S3, dc.A * fg.f + dc.B * fg.g) < 1e-10


@given(points)
def test_f_is_even(pt):
    tau = validate_riemann(0.1 + 1j, -0.2 + 1.1j, 0.15 + 0.4j)
    a = fg_values(pt, tau).f
    b = fg_values((-pt[0], -pt[1]), tau).f
    assert rel(a, b) < 1e-12


# ---- G, Delta and s elimination


def test_delta_at_zero():
    assert delta(0, 1.7 + 0.2j) == 1


@given(seeds, points)
def test_s_elimination(seed, pt):
    ctx = ctx_for(seed)
    try:
        stt = state_at(ctx, pt)
    except PoleAtPoint:
        assume(False)
    assert s_form_residual(stt, ctx.k) < 1e-9
    assert tangent_form_residual(stt, ctx.cc) < 1e-9


# ---- chain constants


def test_canonical_tau_is_degenerate(canonical_tau):
    k = kummer_for_tau(canonical_tau)
    with pytest.raises(DegenerateModuli):
        chain_constants(k, compute_nulls(canonical_tau))


@given(seeds)
def test_roots_from_nulls(seed):
    checks = root_checks(ctx_for(seed).cc)
    assert checks["rt^2"] < 1e-10
    assert checks["se^2"] < 1e-10
    assert checks["Delta(alphaE)"] < 1e-10
    assert checks["alphaE*betaE"] < 1e-12


@given(seeds)
def test_alpha_selection_rule(seed):
    a = ctx_for(seed).cc.alphaE
    assert abs(a) <= 1 + 1e-12
    assert a.real >= -1e-12


@given(seeds)
def test_E_identities(seed):
    e1, e2, e3 = ctx_for(seed).cc.e_identities()
    assert max(e1, e2, e3) < 1e-10


def test_m_tends_to_one_for_large_E():
    k = KummerCoefficients(C=3.0, D=0.5, E=1e8, F=2.0)
    cc = chain_constants(k)
    assert abs(cc.m - 1) < 1e-7


def test_principal_roots_flagged(generic_ctx):
    cc = chain_constants(generic_ctx.k)
    assert cc.flags["roots"] == "principal"
    assert abs(abs(cc.rt) - abs(generic_ctx.cc.rt)) < 1e-10 * abs(cc.rt)


# ---- phi, psi identities


@given(seeds, points)
def test_phi_psi_identities(seed, pt):
    ctx = ctx_for(seed)
    try:
        stt = state_at(ctx, pt)
    except PoleAtPoint:
        assume(False)
    r1, r2, r3 = half_phi_psi_identities(stt, ctx.cc, -1)
    assert max(r1, r2, r3) < 1e-9
    assert phi_psi_sq_residual(stt, ctx.cc) < 1e-9


@given(seeds, points)
def test_difference_identity_sign_is_negative(seed, pt):
    ctx = ctx_for(seed)
    try:
        stt = state_at(ctx, pt)
    except PoleAtPoint:
        assume(False)
    rp, rm, chosen = sign_discrimination(stt, ctx.cc)
    assert chosen == -1
    assert rm < 1e-9
    assert rp > 1e-3


def test_difference_identity_at_equal_ratios(generic_ctx):
    cc = generic_ctx.cc
    p = 0.21 - 0.04j
    phi2 = (cc.cb - cc.cb1) * (1 + p ** 4) - cc.ca * 2 * p * p + 2 * (cc.cc + cc.cc1) * p * p
    psi2 = (cc.cb + cc.cb1) * (1 + p ** 4) - cc.ca * 2 * p * p + 2 * (cc.cc - cc.cc1) * p * p
    lhs = (phi2 - psi2) / 4
    assert rel(lhs, -(cc.cb1 * (1 + p ** 4) / 2 - cc.cc1 * p * p)) < 1e-12


# ---- y, z step


@given(small_complex, small_complex)
def test_addition_law_closed_forms(y, z):
    assert pq_symmetric_residual(y, z, 1.3 - 0.2j) < 1e-10


def test_addition_law_at_zero():
    p, q, Dp, Dq = pq_from_yz(0.23 + 0.05j, 0, 1.4)
    assert p == q == 0.23 + 0.05j


@given(small_complex, small_complex)
def test_product_pq(y, z):
    p, q, _, _ = pq_from_yz(y, z, 0.8 + 0.3j)
    scale = max(abs(p) ** 2, abs(q) ** 2, 1e-300)
    assert abs(p * q - (y * y - z * z) / (1 - y * y * z * z)) / scale < 1e-12


@given(small_complex, small_complex)
def test_delta_product_conventions(y, z):
    E = 1.2 + 0.4j
    _, _, Dp, Dq = pq_from_yz(y, z, E)
    plus = delta_product_yz(y, z, E, +1)
    assert rel(Dp * Dq, plus) < 1e-10
    assert rel(delta_product_yz(y, z, E, -1), -plus) < 1e-15


@given(small_complex, small_complex)
def test_inverse_addition_law(y, z):
    E = 1.3 + 0.1j
    try:
        p, q, _, _ = pq_from_yz(y, z, E)
        y2, z2 = yz_from_pq(p, q, E)
    except SingularLocus:
        assume(False)
    p2, q2, _, _ = pq_from_yz(y2, z2, E)
    assert abs(p2 - p) + abs(q2 - q) < 1e-8 * max(abs(p), abs(q), 1)


def test_inverse_picks_z_zero_branch():
    y, z = yz_from_pq(0.3 + 0.1j, 0.3 + 0.1j, 1.5)
    assert abs(z) < 1e-8
    assert abs(y - (0.3 + 0.1j)) < 1e-8


@given(seeds, small_complex, small_complex)
def test_separability(seed, y, z):
    ctx = ctx_for(seed)
    assert separability_residual(y, z, ctx.k) < 1e-9
    assert phi_psi_yz_residual(y, z, ctx.cc) < 1e-9


def test_separability_at_zero(generic_ctx):
    assert separability_residual(0.17 - 0.02j, 0, generic_ctx.k) < 1e-9


def test_separability_sensitive_to_D(generic_ctx):
    k = generic_ctx.k
    bad = KummerCoefficients(k.C, k.D + 1e-3, k.E, k.F, k.d_sign)
    assert separability_residual(0.21 + 0.03j, -0.12 + 0.05j, k) < 1e-9
    assert separability_residual(0.6 + 0.1j, -0.5 + 0.2j, bad) > 1e-4


# ---- y' step


def test_z_at_zero_yprime(generic_ctx):
    z, _ = z_from_yprime(0, generic_ctx.cc.alphaE)
    assert z == generic_ctx.cc.alphaE


@given(seeds, small_complex)
def test_moebius_step(seed, yp):
    cc = ctx_for(seed).cc
    r_sq, r_ratio, r_dz = moebius_residual(yp, cc)
    assert r_sq < 1e-10
    assert r_ratio < 1e-9
    assert r_dz < 1e-10


@given(small_complex)
def test_moebius_derivative_branch(yp):
    assume(abs(yp) > 1e-3)
    alpha = 0.6 - 0.2j
    h = 1e-6
    z, Dz = z_from_yprime(yp, alpha)
    zp, _ = z_from_yprime(yp + h, alpha)
    zm, _ = z_from_yprime(yp - h, alpha)
    E = (alpha ** 2 + alpha ** -2) / 2
    assert rel(((zp - zm) / (2 * h)) / Dz, 1 / delta(yp, E)) < 1e-6


# ---- separated differentials


@given(seeds, small_complex, small_complex)
def test_separated_differentials(seed, y, yp):
    cc = ctx_for(seed).cc
    try:
        res = separable_differential_residual(y, yp, cc, h=1e-5)
    except SingularLocus:
        assume(False)
    assert max(res.mu, res.nu) < 1e-6


def test_swapped_pairing_fails(generic_ctx):
    res = separable_differential_residual(0.2 + 0.03j, -0.15 + 0.04j, generic_ctx.cc, pairing="swapped")
    assert max(res.mu, res.nu) > 1e-2


def test_separated_differentials_second_order(generic_ctx):
    y, yp = 0.2 + 0.03j, -0.15 + 0.04j
    r1 = separable_differential_residual(y, yp, generic_ctx.cc, h=1e-4)
    r2 = separable_differential_residual(y, yp, generic_ctx.cc, h=2e-4)
    assert 3.0 < max(r2.mu, r2.nu) / max(r1.mu, r1.nu) < 5.0


def test_separated_differentials_both_orderings(generic_ctx):
    y, yp = 0.18 - 0.02j, -0.11 + 0.04j
    a = separable_differential_residual(y, yp, generic_ctx.cc)
    b = separable_differential_residual(yp, y, generic_ctx.cc)
    assert max(a.mu, a.nu, b.mu, b.nu) < 1e-6


def test_equal_arguments_are_singular(generic_ctx):
    # y = y' puts q on a root of the quartic
    with pytest.raises(SingularLocus):
        separable_differential_residual(0.18 - 0.02j, 0.18 - 0.02j, generic_ctx.cc)


def test_unknown_pairing(generic_ctx):
    with pytest.raises(ValueError):
        separable_differential_residual(0.1, -0.2, generic_ctx.cc, pairing="other")


def test_quartic_helper():
    assert quartic(1.0, 1.0) == 0
    G, dp, dq = G_and_Delta(0, 0, KummerCoefficients(1.5, 0.1, 1.2, 2.0))
    assert G == 2.0 and dp == dq == 1


def test_branch_inconsistency_carries_flags():
    exc = BranchInconsistency("x", {"R+ sign": -1})
    assert exc.flags == {"R+ sign": -1}
