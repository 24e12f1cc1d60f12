"""Command-line entry point: ``primecf {eval,cf,qd,verify}``."""
from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import mpmath

from . import contfrac, experiments, moments_qd as mom, sieve as sv, special
from .exceptions import PrimeCFError
from .precision import ENV_DIGITS, PrecisionContext

SIEVE_FUNCTIONS = ("pi", "pi_star", "pi_tilde", "Pi", "pi_s")
SMOOTH_FUNCTIONS = ("li", "Ri", "R", "Ein", "Ei", "E1", "zeta", "prime_zeta", "G", "Hfun")
VERIFY_SUITES = ("all", "expansions", "legendre", "gcurve", "pis", "intervals", "gaps", "identities",
                 "qd", "moments")


@dataclass(frozen=True)
class CliConfig:
    digits: int = 30
    sieve_limit: int = 10**8
    output_dir: Path = Path("primecf-out")
    threads: int = 1

    def __post_init__(self):
        if self.digits < 15:
            raise ValueError(f"--digits must be >= 15, got {self.digits}")
        if self.sieve_limit < 1000:
            raise ValueError(f"--sieve-limit must be >= 1000, got {self.sieve_limit}")

    @property
    def ctx(self) -> PrecisionContext:
        return PrecisionContext(digits=self.digits)


def _int_sci(text: str) -> int:
    """Integer that may be written as 1e8 or 2.5e6."""
    try:
        return int(text)
    except ValueError:
        value = Fraction(text)
        if value.denominator != 1:
            raise argparse.ArgumentTypeError(f"not an integer: {text}")
        return int(value)


def _threads(text: str) -> int:
    if text == "auto":
        return os.cpu_count() or 1
    return int(text)


def _complex(text: str):
    parts = text.split(",")
    if len(parts) == 1:
        return mpmath.mpf(parts[0])
    return mpmath.mpc(parts[0], parts[1])


def _default_digits() -> int:
    raw = os.environ.get(ENV_DIGITS)
    return int(float(raw)) if raw else 30


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--digits", type=_int_sci, default=_default_digits(),
                        help=f"decimal working precision (default 30 or ${ENV_DIGITS})")
    common.add_argument("--sieve-limit", type=_int_sci, default=10**8, help="largest sieved integer")
    common.add_argument("--threads", type=_threads, default=1, help="sieve worker threads or 'auto'")

    p = argparse.ArgumentParser(prog="primecf", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    ev = sub.add_parser("eval", parents=[common], help="evaluate a counting or special function")
    ev.add_argument("function", choices=SIEVE_FUNCTIONS + SMOOTH_FUNCTIONS)
    ev.add_argument("x")
    ev.add_argument("--s", type=_complex, default=mpmath.mpf(0), help="exponent for pi_s, as re[,im]")
    ev.add_argument("--terms", type=int, default=400, help="Maclaurin terms for G and Hfun")

    cf = sub.add_parser("cf", parents=[common], help="print a convergent of a named family")
    cf.add_argument("family", choices=sorted(contfrac.FAMILIES))
    cf.add_argument("--n", type=int, default=1, help="parameter of the prime families")
    cf.add_argument("--depth", type=int, default=4)
    cf.add_argument("--at", default=None, help="value of the expansion variable")

    qd = sub.add_parser("qd", parents=[common], help="qd coefficients of a measure")
    qd.add_argument("measure", choices=("exp-interval", "uniform"))
    qd.add_argument("--s", default="-1")
    qd.add_argument("--t", default="0")
    qd.add_argument("--a", default="-1")
    qd.add_argument("--b", default="0")
    qd.add_argument("--depth", type=int, default=4)

    ve = sub.add_parser("verify", parents=[common], help="run verification suites and write CSVs")
    ve.add_argument("suite", choices=VERIFY_SUITES)
    ve.add_argument("--out", type=Path, default=Path("primecf-out"))
    return p


def _show(value, digits):
    if isinstance(value, (int, Fraction)):
        return str(value)
    return mpmath.nstr(value, digits)


def cmd_eval(args, cfg: CliConfig) -> int:
    ctx = cfg.ctx
    name = args.function
    if name in SIEVE_FUNCTIONS:
        x = mpmath.mpf(args.x)
        if x > cfg.sieve_limit:
            raise PrimeCFError(f"x = {args.x} exceeds --sieve-limit {cfg.sieve_limit}")
        handle = sv.SieveHandle(max(sv.floor_real(x), 2), workers=cfg.threads)
        if name == "pi":
            value = sv.prime_count(x, handle)
        elif name in ("pi_star", "pi_tilde"):
            tally = sv.prime_power_count(x, handle)
            value = tally.pi_star if name == "pi_star" else tally.pi_tilde
        elif name == "Pi":
            value = sv.riemann_prime_count(x, handle, ctx, exact=True)
        else:
            value = sv.power_sum(x, args.s, handle, ctx)
        print(_show(value, cfg.digits))
        return 0
    with ctx.workdps():
        x = mpmath.mpf(args.x)
        fn = {
            "li": lambda: special.li(x, ctx),
            "Ri": lambda: special.ri_gram(x, ctx),
            "R": lambda: special.ri_mobius_truncated(x, ctx),
            "Ein": lambda: special.ein(x, ctx),
            "Ei": lambda: special.ei(x, ctx),
            "E1": lambda: special.e1(x, ctx),
            "zeta": lambda: special.zeta(x, ctx),
            "prime_zeta": lambda: special.prime_zeta(x, ctx),
            "G": lambda: special.mertens_G(x, args.terms, ctx),
            "Hfun": lambda: special.mertens_Hfun(x, args.terms, ctx),
        }[name]
        print(_show(fn(), cfg.digits))
    return 0


def cmd_cf(args, cfg: CliConfig) -> int:
    ctx = cfg.ctx
    factory = contfrac.FAMILIES[args.family]
    fam = factory(args.n) if args.family in ("prime-s", "prime-j") else factory()
    conv = contfrac.convergents(fam, args.depth)[-1].primitive()
    var = fam.variable
    print(f"family: {fam.name} ({fam.form}-form), depth {args.depth}, variable {var}")
    if fam.leading_term:
        print(f"prefactor: {fam.leading_term}")
    name = "t" if var.startswith("1/") else var
    print(f"numerator:   {conv.numerator.format(name)}")
    print(f"denominator: {conv.denominator.format(name)}")
    if var.startswith("1/"):
        print(f"(t = {var})")
    if args.at is not None:
        with ctx.workdps():
            at = mpmath.mpf(args.at)
            value = contfrac.eval_backward(fam, args.depth, at, ctx)
            print(f"value at {args.at}: {mpmath.nstr(value, cfg.digits)}")
    return 0


def cmd_qd(args, cfg: CliConfig) -> int:
    ctx = cfg.ctx
    with ctx.workdps():
        if args.measure == "uniform":
            measure = mom.UniformInterval(Fraction(args.a), Fraction(args.b))
        else:
            measure = mom.ExpDensityInterval(mpmath.mpf(args.s), mpmath.mpf(args.t))
        ms = mom.moments(measure, args.depth, ctx)
        c = mom.qd_scoefficients(ms, args.depth, ctx)
        print(f"measure: {measure}")
        print("z S(z) = c0 + (c1/z)/(1 + (c2/z)/(1 + ...))")
        for k, v in enumerate(c):
            print(f"  c{k} = {_show(v, cfg.digits)}")
        if len(c) >= 3:
            jac = mom.contract_to_jacobi(c, ctx)
            print("z S(z) = a0 + b1/(z + a1 + b2/(z + a2 + ...))")
            print(f"  a0 = {_show(jac.a0, cfg.digits)}")
            for k, (ak, bk) in enumerate(zip(jac.a, jac.b), start=1):
                print(f"  a{k} = {_show(ak, cfg.digits)}   b{k} = {_show(bk, cfg.digits)}")
        if args.measure == "uniform":
            d = mom.s_fraction_coefficients(ms, args.depth, ctx)
            norm = mom.normalize_denominators(d, range(1, len(d) + 1))
            print("S(z) with denominators 1, 2, 3, ...: numerators (times 1/z)")
            print("  " + ", ".join(_show(v, cfg.digits) for v in norm))
    return 0


def cmd_verify(args, cfg: CliConfig) -> int:
    ctx = cfg.ctx
    names = experiments.SUITES if args.suite == "all" else (args.suite,)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    handle = None
    ok = True
    for name in names:
        reports = experiments.run_suite(name, cfg.sieve_limit, ctx, sieve=handle, workers=cfg.threads)
        for rep in reports:
            path = experiments.emit_csv(rep, out / f"{rep.experiment_id}.csv")
            print(f"{rep.summary()}  -> {path}")
            for note in rep.notes:
                print(f"    note: {note}")
            for row in rep.failures():
                print(f"    failed: {row.label} at {row.grid_value}: observed {_show(row.observed, 10)}, "
                      f"reference {_show(row.reference, 10)}, tolerance {_show(row.tolerance, 3)}")
            ok = ok and rep.passed
    return 0 if ok else 1


COMMANDS = {"eval": cmd_eval, "cf": cmd_cf, "qd": cmd_qd, "verify": cmd_verify}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = CliConfig(digits=args.digits, sieve_limit=args.sieve_limit, threads=args.threads,
                        output_dir=getattr(args, "out", Path("primecf-out")))
    except ValueError as exc:
        parser.error(str(exc))
    try:
        return COMMANDS[args.command](args, cfg)
    except (PrimeCFError, ValueError, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
