"""Command-line front end.

Every subcommand prints JSON; complex numbers are [re, im] pairs.
Exit codes: 0 ok, 1 verification failure, 2 bad domain, 3 divisor pole,
4 branch inconsistency, 64 usage.
"""

from __future__ import annotations

import argparse
import re
import sys

from . import abel, chain, frame, kummer, verify
from .errors import (
    BranchInconsistency,
    DegenerateModuli,
    GoepelError,
    NearBranchPoint,
    NearZeroDenominator,
    NotInSiegelDomain,
    PoleAtPoint,
    SingularLocus,
    WrongSignConvention,
)
from .theta import Characteristic, theta, validate_riemann

EXIT_OK, EXIT_VERIFY, EXIT_DOMAIN, EXIT_POLE, EXIT_BRANCH, EXIT_USAGE = 0, 1, 2, 3, 4, 64
EXIT_CODES = {
    "NotInSiegelDomain": EXIT_DOMAIN,
    "DegenerateModuli": EXIT_DOMAIN,
    "NearZeroDenominator": EXIT_DOMAIN,
    "PoleAtPoint": EXIT_POLE,
    "NearBranchPoint": EXIT_POLE,
    "SingularLocus": EXIT_POLE,
    "BranchInconsistency": EXIT_BRANCH,
}

CANONICAL_TAU = (1j, 1j, 0.5j)
# (i, i, i/2) has equal nulls u = v, so E = 1 and the curve degenerates;
# inversion commands default to this generic matrix instead
INVERSION_TAU = (0.1 + 1j, -0.2 + 1.1j, 0.15 + 0.4j)

_NUM = r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_COMPLEX_RE = re.compile(rf"^(?:(?P<re>{_NUM})(?P<im>[+-](?:{_NUM})?i)?|(?P<pure>[+-]?(?:{_NUM})?i))$")


def parse_complex(text: str) -> complex:
    """Parse "a+bi", "a", "bi", "i", "-i" into a complex number; "j" works as well."""
    s = text.strip().replace(" ", "").replace("j", "i")
    m = _COMPLEX_RE.match(s)
    if not s or m is None:
        raise argparse.ArgumentTypeError(f"malformed complex literal: {text!r}")
    if m.group("pure") is not None:
        return complex(0, _imag_part(m.group("pure")))
    im = m.group("im")
    return complex(float(m.group("re")), _imag_part(im) if im else 0.0)


def _imag_part(tok: str) -> float:
    body = tok[:-1]
    if body in ("", "+"):
        return 1.0
    if body == "-":
        return -1.0
    return float(body)


def _enc(z):
    z = complex(z)
    return [z.real, z.imag]


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _point(text: str):
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"point must be 'x,y', got {text!r}")
    return tuple(parse_complex(p) for p in parts)


def _char(text: str) -> Characteristic:
    try:
        return Characteristic.parse(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"bad characteristic {text!r}: {exc}") from None


def _positive(text: str) -> float:
    try:
        val = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not val > 0:
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return val


def _count(text: str) -> int:
    try:
        val = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if val < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1: {text!r}")
    return val


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tau11", type=parse_complex, help="default i (generic fixture for invert/residual)")
    common.add_argument("--tau22", type=parse_complex)
    common.add_argument("--tau12", type=parse_complex)
    common.add_argument("--eps", type=_positive, default=1e-12, help="series tolerance")
    common.add_argument("--out", help="write the JSON output to this file")

    p = _Parser(prog="goepel", description="Genus-2 theta functions and the Goepel inversion chain.")
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    e = sub.add_parser("eval", parents=[common], help="evaluate one theta function")
    e.add_argument("--char", type=_char, default=Characteristic(0, 0, 0, 0), help="a,c,b,d (fractions allowed)")
    e.add_argument("--point", type=_point, default=(0j, 0j), help="x,y")

    f = sub.add_parser("frame", parents=[common], help="the 16 frame values at a point")
    f.add_argument("--point", type=_point, default=(0j, 0j))

    sub.add_parser("coeffs", parents=[common], help="derived constants for tau")

    v = sub.add_parser("verify", parents=[common], help="run the identity suites on seeded samples")
    v.add_argument("--tol-alg", type=_positive, default=1e-9)
    v.add_argument("--tol-fd", type=_positive, default=1e-6)
    v.add_argument("--h", type=_positive, default=1e-5)
    v.add_argument("--samples", type=_count, default=100)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--workers", type=_count, default=1)

    for name, text in (("invert", "solve the inversion problem at (U1, U2)"),
                       ("residual", "finite-difference residual of the Abelian sums")):
        s = sub.add_parser(name, parents=[common], help=text)
        s.add_argument("--U1", type=parse_complex, default=0.05 + 0j)
        s.add_argument("--U2", type=parse_complex, default=0.03 + 0j)
        s.add_argument("--h", type=_positive, default=1e-5)
        if name == "residual":
            s.add_argument("--point", type=_point, default=None, help="internal (u,v); overrides U1,U2")
    return p


def _tau(args):
    default = INVERSION_TAU if args.cmd in ("invert", "residual") else CANONICAL_TAU
    vals = [getattr(args, n) for n in ("tau11", "tau22", "tau12")]
    vals = [d if x is None else x for x, d in zip(vals, default)]
    return validate_riemann(*vals)


def cmd_eval(args):
    tau = _tau(args)
    tv = theta(args.char, *args.point, tau, args.eps)
    return {"char": str(args.char), "point": [_enc(z) for z in args.point], "tau": [_enc(z) for z in tau.as_tuple()],
            "value": _enc(tv.value), "abs_err": tv.abs_err, "radius": tv.radius}, EXIT_OK


def cmd_frame(args):
    tau = _tau(args)
    fr = frame.compute_frame(args.point, tau, args.eps)
    return {"point": [_enc(z) for z in args.point], "tau": [_enc(z) for z in tau.as_tuple()],
            "frame": {k: _enc(z) for k, z in fr.as_dict().items()}, "abs_err": fr.abs_err}, EXIT_OK


def cmd_coeffs(args):
    tau = _tau(args)
    out = {"tau": [_enc(z) for z in tau.as_tuple()]}
    nulls = frame.compute_nulls(tau, args.eps)
    out["nulls"] = dict(zip("tuvw", (_enc(z) for z in nulls.as_tuple())))
    A, B = kummer.compute_AB(tau, args.eps)
    lc = kummer.compute_ga_gb(A, B)
    out["linear"] = {n: _enc(getattr(lc, n)) for n in ("A", "B", "ga", "gb")}
    hud = kummer.hudson_coeffs(*kummer.hudson_nulls(tau, args.eps))
    out["hudson"] = {n: _enc(getattr(hud, n)) for n in ("ha", "hb", "hc", "hd", "A1", "B1", "C1", "D1")}
    out["hudson"]["identity"] = _enc(hud.identity_value())
    dc = chain.derivative_constants(tau, 1e-15)
    out["derivative"] = {n: _enc(getattr(dc, n)) for n in ("alpha", "beta", "gamma", "delta")}
    try:
        k = kummer.kummer_for_tau(tau, args.eps)
        out["kummer"] = {n: _enc(getattr(k, n)) for n in "CDEF"}
        out["kummer"]["d_sign"] = k.d_sign
    except NearZeroDenominator as exc:
        out["kummer"] = {"error": str(exc)}
        return out, EXIT_OK
    try:
        cc = chain.chain_constants(k, nulls)
        out["chain"] = {n: _enc(getattr(cc, n)) for n in
                        ("ca", "cb", "cc", "cb1", "cc1", "E1", "E2", "E3", "E4", "m", "m1", "m2", "alphaE", "betaE")}
    except (DegenerateModuli, NearZeroDenominator) as exc:
        out["chain"] = {"error": f"{type(exc).__name__}: {exc}"}
    return out, EXIT_OK


def cmd_verify(args):
    cfg = verify.RunConfig(eps=args.eps, tol_alg=args.tol_alg, tol_fd=args.tol_fd, h=args.h,
                           samples=args.samples, seed=args.seed, workers=args.workers)
    report = verify.run_verification(cfg)
    return report, EXIT_OK if report["summary"]["failed"] == 0 else EXIT_VERIFY


def _ctx(args):
    return abel.prepare(_tau(args), abel.PIPELINE_EPS)


def cmd_invert(args):
    ctx = _ctx(args)
    sol = abel.solve_inversion(args.U1, args.U2, ctx.tau, ctx=ctx)
    try:
        dr = abel.differential_residual(sol.u, sol.v, ctx.tau, args.h, ctx)
        res = {"dU1": dr.dU1, "dU2": dr.dU2, "h": args.h, "sqrt_f5_signs": list(dr.signs)}
    except NearBranchPoint as exc:
        # the solution is still defined; only the differential check is not
        res = {"error": type(exc).__name__, "detail": str(exc), "h": args.h}
    out = {"tau": [_enc(z) for z in ctx.tau.as_tuple()], "U": [_enc(args.U1), _enc(args.U2)],
           "p22": _enc(sol.p22), "p12": _enc(sol.p12), "x": _enc(sol.x), "xprime": _enc(sol.xprime),
           "uv": [_enc(sol.u), _enc(sol.v)], "p": _enc(sol.p), "q": _enc(sol.q),
           "residual": res,
           "period_map": {"pairing": ctx.pmap.flags["pairing"], "sigma": ctx.pmap.flags["sigma"]}}
    return out, EXIT_OK


def cmd_residual(args):
    ctx = _ctx(args)
    if args.point is not None:
        u, v = args.point
    else:
        sol = abel.solve_inversion(args.U1, args.U2, ctx.tau, ctx=ctx)
        u, v = sol.u, sol.v
    dr = abel.differential_residual(u, v, ctx.tau, args.h, ctx)
    return {"tau": [_enc(z) for z in ctx.tau.as_tuple()], "uv": [_enc(u), _enc(v)], "h": args.h,
            "dU1": dr.dU1, "dU2": dr.dU2, "sqrt_f5_signs": list(dr.signs)}, EXIT_OK


COMMANDS = {"eval": cmd_eval, "frame": cmd_frame, "coeffs": cmd_coeffs, "verify": cmd_verify,
            "invert": cmd_invert, "residual": cmd_residual}


def _emit(payload, out_path):
    text = verify.dumps(payload)
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        payload, code = COMMANDS[args.cmd](args)
    except WrongSignConvention as exc:
        print(f"error: sign convention: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except NotInSiegelDomain as exc:
        print(f"error: not in the Siegel domain: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (DegenerateModuli, NearZeroDenominator) as exc:
        print(f"error: degenerate moduli for the inversion chain: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except PoleAtPoint as exc:
        print(f"error: point on the theta divisor: {exc}", file=sys.stderr)
        return EXIT_POLE
    except (NearBranchPoint, SingularLocus) as exc:
        print(f"error: irregular point: {exc}", file=sys.stderr)
        return EXIT_POLE
    except BranchInconsistency as exc:
        print(f"error: branch inconsistency: {exc}", file=sys.stderr)
        return EXIT_BRANCH
    except GoepelError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    _emit(payload, args.out)
    return code


if __name__ == "__main__":
    sys.exit(main())
