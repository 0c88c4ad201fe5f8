"""Command-line front end: spot evaluations and verification suites.

Exit codes: 0 success, 1 a check failed, 2 bad configuration or domain error.
"""

from __future__ import annotations

import argparse
import configparser
import sys
from typing import List, Optional, Sequence

from . import arch, special
from .report import SUITES, ConfigError, RunConfig, run_suite

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2

# documented accuracy floors of the special-function module
_FLOORS = {"J": ("abs", 1e-10), "Y": ("abs", 1e-10), "K": ("rel", 1e-13)}


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad flags already; keep the message on stderr
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _floats(text: str) -> List[float]:
    return [float(t) for t in text.replace(",", " ").split()]


def _ints(text: str) -> List[int]:
    return [int(t) for t in text.replace(",", " ").split()]


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="rho-hankel", description="rho-Bessel kernels, Hankel transforms and summation identities")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    b = sub.add_parser("bessel", help="evaluate J, Y or K of real order")
    b.add_argument("--kind", choices=["J", "Y", "K"], required=True)
    b.add_argument("--nu", type=float, required=True)
    b.add_argument("--x", type=float, required=True)

    z = sub.add_parser("zeta", help="evaluate the Riemann zeta function")
    z.add_argument("--s", type=float, required=True)

    k = sub.add_parser("kernel", help="evaluate the real-place kernel K(a, s)")
    k.add_argument("--a", type=float, required=True)
    k.add_argument("--s", type=float, required=True)

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("suite", choices=SUITES)
    v.add_argument("--config", metavar="FILE", help="key = value file; flags override it")
    v.add_argument("--s", type=float, action="append", help="s value (repeatable)")
    v.add_argument("--q", type=int, action="append", help="residue field size (repeatable)")
    v.add_argument("--prime", type=int, action="append", help="prime carrying an override (repeatable)")
    v.add_argument("--tol", type=float)
    v.add_argument("--support", type=float, nargs=2, metavar=("A", "B"))
    v.add_argument("--family", choices=["bump", "gaussian"])
    v.add_argument("--max-n", type=int, dest="max_n")
    v.add_argument("--out", metavar="PATH")
    v.add_argument("--format", choices=["json", "csv"])
    v.add_argument("--figures", metavar="DIR")
    return ap


def load_config(path: str) -> dict:
    """Read a flat key = value file (section headers optional)."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    cp = configparser.ConfigParser()
    try:
        cp.read_string("[run]\n" + text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    raw = {}
    for section in cp.sections():
        raw.update(cp[section])
    out = {}
    try:
        for key, val in raw.items():
            key = key.replace("-", "_")
            if key == "s":
                out["s"] = _floats(val)
            elif key == "q":
                out["q"] = _ints(val)
            elif key in ("prime", "primes"):
                out["primes"] = _ints(val)
            elif key == "tol":
                out["tol"] = float(val)
            elif key == "support":
                vals = _floats(val)
                if len(vals) != 2:
                    raise ConfigError("support needs two numbers")
                out["support"] = tuple(vals)
            elif key == "max_n":
                out["max_n"] = int(val)
            elif key in ("family", "out", "format", "figures"):
                out[key] = val.strip()
            else:
                raise ConfigError(f"unknown config key {key!r}")
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"malformed config value: {exc}") from None
    return out


def config_from_args(args: argparse.Namespace) -> RunConfig:
    values = load_config(args.config) if args.config else {}
    flags = {
        "s": args.s, "q": args.q, "primes": args.prime, "tol": args.tol,
        "support": tuple(args.support) if args.support else None,
        "family": args.family, "max_n": args.max_n, "out": args.out,
        "format": args.format, "figures": args.figures,
    }
    values.update({k: v for k, v in flags.items() if v is not None})
    cfg = RunConfig(**values)
    cfg.validate()
    return cfg


def _cmd_bessel(args) -> int:
    fn = {"J": special.bessel_j, "Y": special.bessel_y, "K": special.bessel_k}[args.kind]
    val = fn(args.nu, args.x)
    kind, floor = _FLOORS[args.kind]
    err = floor if kind == "abs" else floor * abs(val)
    print(f"{args.kind}_{args.nu:g}({args.x:g}) = {val:.15g}  (error <= {err:.1e})")
    return EXIT_OK


def _cmd_zeta(args) -> int:
    val = special.riemann_zeta(args.s).real
    print(f"zeta({args.s:g}) = {val:.15g}  (error <= {1e-14 * max(1.0, abs(val)):.1e})")
    return EXIT_OK


def _cmd_kernel(args) -> int:
    kv = arch.kernel_arch(args.a, arch.ArchParams(args.s))
    print(f"K({args.a:g}, {args.s:g}) = {kv.value:.15g}  [{kv.regime}]  (error <= {1e-10 * max(1.0, abs(kv.value)):.1e})")
    return EXIT_OK


def _cmd_verify(args) -> int:
    cfg = config_from_args(args)
    rep = run_suite(args.suite, cfg)
    text = rep.to_json() if cfg.format == "json" else rep.to_csv()
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    summary = sys.stdout if cfg.out else sys.stderr
    for c in rep.checks:
        err = c.abs_err if c.details.get("measure") == "absolute" or c.rel_err is None else c.rel_err
        shown = "" if err is None else f"  err={err:.2e}"
        print(f"{c.status:8s}{c.name}{shown}", file=summary)
    print(f"{args.suite}: {'ok' if rep.ok else 'FAILED'} in {rep.timing_ms / 1e3:.1f} s", file=summary)
    if cfg.figures:
        from .plots import render

        for path in render(rep, cfg.figures):
            print(f"figure {path}", file=summary)
    return EXIT_OK if rep.ok else EXIT_FAIL


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {"bessel": _cmd_bessel, "zeta": _cmd_zeta, "kernel": _cmd_kernel, "verify": _cmd_verify}
    try:
        return handlers[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except RuntimeError as exc:
        # quadrature or truncation did not settle: the check could not pass
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
