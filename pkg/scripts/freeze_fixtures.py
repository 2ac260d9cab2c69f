"""Regenerate tests/reference_values.py from the brute-force oracle.

Only the independent oracle in tests/oracle.py is used for the values, so
the frozen numbers never depend on the package under test.

    python3 scripts/freeze_fixtures.py
"""

import argparse
import pathlib
import pprint
import sys

ROOT = pathlib.Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "tests"))

import oracle  # noqa: E402

CANONICAL_TAU = (1j, 1j, 0.5j)
GENERIC_TAU = (0.1 + 1j, -0.2 + 1.1j, 0.15 + 0.4j)
POINTS = ((0j, 0j), (0.13 + 0j, 0.21 + 0j), (0.11 + 0.03j, 0.07 - 0.02j), (0.3 - 0.1j, -0.2 + 0.05j))
EXTRA_CHARS = ((1 / 3, 0, 0, 1 / 2), (1 / 2, -1 / 2, 0, 0), (1, 1, 1, 1), (2, 0, 1, 3), (0.25, 0.75, -0.5, 1))
INTERNAL_POINT = (0.0288 - 0.0403j, 0.0170 - 0.0424j)


def hudson_longhand(ha, hb, hc, hd):
    a2, b2, c2, d2 = ha * ha, hb * hb, hc * hc, hd * hd
    da, db, dc = a2 * d2 - b2 * c2, b2 * d2 - a2 * c2, c2 * d2 - a2 * b2
    A1 = (b2 * b2 + c2 * c2 - a2 * a2 - d2 * d2) / da
    B1 = (a2 * a2 + c2 * c2 - b2 * b2 - d2 * d2) / db
    C1 = (a2 * a2 + b2 * b2 - c2 * c2 - d2 * d2) / dc
    D1 = (ha * hb * hc * hd * (a2 + d2 - b2 - c2) * (b2 + d2 - a2 - c2) * (c2 + d2 - a2 - b2)
          * (a2 + b2 + c2 + d2) / (da * db * dc))
    return A1, B1, C1, D1


def x_pair_longhand(p, q, E):
    """Roots x, x' of the quadratic with the closed-form sum and product."""
    s = 2 * (E * (1 + p * p * q * q) - (p * p + q * q)) / ((E + 1) * (1 + p * q) ** 2)
    prod = (E - 1) / (E + 1) - 4 * (E - 1) * p * q / ((E + 1) * (1 + p * q) ** 2)
    return s, -prod


def block(tau):
    out = {"tau": tau}
    out["theta"] = {}
    for pt in POINTS:
        for name, ch in oracle.FRAME_CHARS.items():
            out["theta"][(ch, pt)] = oracle.brute_theta(*ch, *pt, *tau)
        for ch in EXTRA_CHARS:
            out["theta"][(ch, pt)] = oracle.brute_theta(*ch, *pt, *tau)
    out["partials"] = {
        (ch, pt, var): oracle.brute_theta(*ch, *pt, *tau, deriv=var)
        for pt in (POINTS[0], POINTS[2])
        for ch in (oracle.FRAME_CHARS["P1"], oracle.FRAME_CHARS["Q0"], oracle.FRAME_CHARS["S1"], (1 / 3, 0, 0, 1 / 2))
        for var in ("x", "y")
    }
    nulls = oracle.brute_nulls(tau)
    out["nulls"] = nulls
    out["AB"] = oracle.brute_AB(tau)
    C, D, E, F = oracle.kummer_from_nulls(*nulls)
    out["kummer"] = {"C": C, "absD": abs(D), "E": E, "F": F}
    origin = oracle.brute_frame(0, 0, tau)
    hv = (origin["P3"], origin["S3"], origin["P0"], origin["S0"])
    out["hudson_nulls"] = hv
    out["hudson"] = dict(zip(("A1", "B1", "C1", "D1"), hudson_longhand(*hv)))
    out["derivative"] = dict(zip(("alpha", "beta", "gamma", "delta"), oracle.brute_derivative_constants(tau)))
    return out, E


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default=str(ROOT / "tests" / "reference_values.py"))
    args = ap.parse_args(argv)

    canonical, _ = block(CANONICAL_TAU)
    generic, E = block(GENERIC_TAU)
    fr = oracle.brute_frame(*INTERNAL_POINT, GENERIC_TAU)
    p, q = fr["S1"] / fr["P1"], fr["S2"] / fr["P2"]
    p22, p12 = x_pair_longhand(p, q, E)
    generic["inversion"] = {"uv": INTERNAL_POINT, "p": p, "q": q, "p22": p22, "p12": p12}

    header = (
        '"""Frozen brute-force oracle values (radius {}). Generated by scripts/freeze_fixtures.py."""\n\n'
        .format(oracle.RADIUS)
    )
    body = "CANONICAL = {}\n\nGENERIC = {}\n".format(
        pprint.pformat(canonical, width=110), pprint.pformat(generic, width=110))
    pathlib.Path(args.out).write_text(header + body)
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
