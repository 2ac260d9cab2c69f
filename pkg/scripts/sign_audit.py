"""Audit of the sign and pairing choices resolved numerically.

For each sampled tau reports:
  * the residual of the (phi^2 - psi^2)/4 relation under each sign,
  * the D1 sign for which the Hudson quartic holds,
  * the period-map candidate scores and the winner.

    python3 scripts/sign_audit.py --taus 10
"""

from __future__ import annotations

import argparse
from collections import Counter
from dataclasses import dataclass

from goepel import abel, chain, frame, kummer
from goepel.errors import PoleAtPoint
from goepel.sampling import draw_generic_tau, draw_point, sample_rng


@dataclass(frozen=True)
class AuditConfig:
    taus: int = 10
    seed: int = 0


def audit_tau(i: int, cfg: AuditConfig) -> dict:
    rng = sample_rng(cfg.seed, i)
    tau, ctx = draw_generic_tau(rng, abel.prepare)
    while True:
        pt = draw_point(rng)
        try:
            ctx.pq(*pt)
            break
        except PoleAtPoint:
            continue
    fr = frame.compute_frame(pt, tau)
    rp, rm, chosen = chain.sign_discrimination(chain.compute_pq_state(fr), ctx.cc)
    h = kummer.hudson_coeffs(*kummer.hudson_nulls(tau))
    hud = {s: kummer.hudson_residual(fr, h, s) for s in (1, -1)}
    return {
        "diff_plus": rp,
        "diff_minus": rm,
        "diff_sign": chosen,
        "hudson_sign": min(hud, key=hud.get),
        "pairing": ctx.pmap.flags["pairing"],
        "sigma": ctx.pmap.flags["sigma"],
        "scores": ctx.pmap.flags["candidates"],
    }


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--taus", type=int, default=AuditConfig.taus)
    parser.add_argument("--seed", type=int, default=AuditConfig.seed)
    args = parser.parse_args()
    cfg = AuditConfig(args.taus, args.seed)
    tally = Counter()
    print(" i   diff(+1)   diff(-1)  sign  D1  pairing/sigma")
    for i in range(cfg.taus):
        r = audit_tau(i, cfg)
        tally[(r["diff_sign"], r["hudson_sign"], r["pairing"])] += 1
        print(f"{i:2d}  {r['diff_plus']:.2e}  {r['diff_minus']:.2e}  {r['diff_sign']:+d}  {r['hudson_sign']:+d}"
              f"  {r['pairing']}/{r['sigma']:+d}")
    print("\n(diff sign, D1 sign, pairing): count")
    for key, n in tally.most_common():
        print(f"  {key}: {n}")


if __name__ == "__main__":
    main()
