"""Finite-difference convergence of the Abelian-differential residual.

For each sampled tau and regular point, evaluates the residual over a
ladder of steps and prints the observed order between neighbouring steps.

    python3 scripts/convergence_study.py --taus 3 --points 5
"""

from __future__ import annotations

import argparse
import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from goepel import abel
from goepel.errors import NearBranchPoint, PoleAtPoint
from goepel.sampling import draw_generic_tau, draw_point, sample_rng


@dataclass(frozen=True)
class StudyConfig:
    taus: int = 3
    points: int = 5
    seed: int = 0
    steps: tuple = (1e-6, 2e-6, 5e-6, 1e-5, 2e-5, 5e-5, 1e-4)
    min_branch_dist: float = 1e-4


def regular_points(ctx, rng, cfg: StudyConfig):
    pts = []
    while len(pts) < cfg.points:
        pt = draw_point(rng)
        try:
            x, xp, _, _ = ctx.x_pair(*pt)
        except PoleAtPoint:
            continue
        if min(ctx.curve.distance_to_branch(x), ctx.curve.distance_to_branch(xp)) > cfg.min_branch_dist:
            pts.append(pt)
    return pts


def run(cfg: StudyConfig) -> dict:
    rows = []
    for i in range(cfg.taus):
        rng = sample_rng(cfg.seed, i)
        tau, ctx = draw_generic_tau(rng, abel.prepare)
        for pt in regular_points(ctx, rng, cfg):
            try:
                res = [abel.differential_residual(*pt, tau, h, ctx) for h in cfg.steps]
            except NearBranchPoint:
                continue
            r = [max(d.dU1, d.dU2) for d in res]
            orders = [math.log(r[k + 1] / r[k]) / math.log(cfg.steps[k + 1] / cfg.steps[k])
                      for k in range(len(r) - 1)]
            rows.append({"tau": i, "point": [str(z) for z in pt], "residuals": r, "orders": orders})
    orders = np.array([row["orders"] for row in rows])
    return {"config": asdict(cfg), "rows": rows,
            "median_order": np.median(orders, axis=0).tolist() if len(rows) else []}


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--taus", type=int, default=StudyConfig.taus)
    parser.add_argument("--points", type=int, default=StudyConfig.points)
    parser.add_argument("--seed", type=int, default=StudyConfig.seed)
    parser.add_argument("--json", action="store_true", help="print the full result as JSON")
    args = parser.parse_args()
    cfg = StudyConfig(taus=args.taus, points=args.points, seed=args.seed)
    out = run(cfg)
    if args.json:
        print(json.dumps(out, indent=2))
        return
    print("step pair            median observed order")
    for k, order in enumerate(out["median_order"]):
        print(f"{cfg.steps[k]:.0e} -> {cfg.steps[k + 1]:.0e}    {order:6.3f}")


if __name__ == "__main__":
    main()
