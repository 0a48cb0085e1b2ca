"""Command-line front end: ``starcert {phi,chain,best-mu,certify,suite}``.

Exit codes: 0 success or certified, 1 not certified / no conclusion,
2 bad input. The environment variable ``STARCERT_LADDER_K`` sets the
default ladder depth; ``--ladder-k`` overrides it.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import asdict

from . import __version__
from .argsup import Ladder
from .certify import (
    CERTIFIED,
    Settings,
    certify_theorem1,
    certify_theorem2,
    corollary_csv,
    corollary_table,
    run_suite,
)
from .errors import AdmissibilityError, NoConclusionError, StarcertError
from .params import chain, phi, search_mu
from .series import read_coefficients

ANGLE_KEYS = {"phi", "varphi", "lhs", "phi_mu", "margin", "bound", "sup_quotient_arg", "sup_abs_arg"}


def _fmt(key, value, degrees):
    if isinstance(value, float):
        if degrees and key in ANGLE_KEYS:
            value = math.degrees(value)
        return format(value, ".12g")
    return str(value)


def _plain(d: dict, degrees: bool, prefix: str = "") -> str:
    lines = []
    for key, value in d.items():
        if isinstance(value, dict):
            lines.append(_plain(value, degrees, f"{prefix}{key}."))
        else:
            lines.append(f"{prefix}{key}: {_fmt(key, value, degrees)}")
    return "\n".join(line for line in lines if line)


def _csv(d: dict) -> str:
    flat = {k: v for k, v in d.items() if not isinstance(v, dict)}
    return ",".join(flat) + "\n" + ",".join(repr(v) if isinstance(v, float) else str(v) for v in flat.values())


def emit(d: dict, args) -> None:
    if args.format == "json":
        print(json.dumps(d, indent=2))
    elif args.format == "csv":
        print(_csv(d))
    else:
        print(_plain(d, args.degrees))


def _settings(args, direct=False) -> Settings:
    depth = args.ladder_k
    if depth is None:
        env = os.environ.get("STARCERT_LADDER_K")
        depth = int(env) if env else Ladder().depth
    ladder = Ladder(depth=depth, max_depth=max(depth, Ladder().max_depth))
    return Settings(ladder=ladder, class_tol=getattr(args, "tol_class", 0.0), direct_check=direct)


def cmd_phi(args) -> int:
    emit(asdict(phi(args.mu, args.n)), args)
    return 0


def cmd_chain(args) -> int:
    try:
        result = chain(args.alpha, args.n)
    except AdmissibilityError as exc:
        print(f"no conclusion: {exc}", file=sys.stderr)
        return 1
    d = result.to_dict()
    d["lhs"] = result.lhs
    emit(d, args)
    return 0


def cmd_best_mu(args) -> int:
    try:
        found = search_mu(args.alpha, args.n)
    except (AdmissibilityError, NoConclusionError) as exc:
        print(f"no conclusion: {exc}", file=sys.stderr)
        return 1
    emit({"alpha": args.alpha, "n": args.n, "mu": found.mu, "lhs": found.target, "monotone": found.monotone}, args)
    return 0


def cmd_certify(args) -> int:
    try:
        f = read_coefficients(args.path)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    settings = _settings(args, direct=args.direct)
    if args.alexander:
        _, cert = certify_theorem2(f, args.n, args.mu, settings)
    else:
        cert = certify_theorem1(f, args.n, args.mu, settings)
    emit(cert.to_dict(), args)
    return 0 if cert.verdict == CERTIFIED else 1


def cmd_suite(args) -> int:
    report = run_suite(_settings(args), args.emit_profiles)
    if args.json or args.format == "json":
        print(json.dumps(report, indent=2))
    elif args.format == "csv":
        print(corollary_csv(corollary_table()), end="")
    else:
        for row in report["corollaries"]:
            print(f"{row['name']}: lhs={_fmt('lhs', row['lhs'], args.degrees)} "
                  f"phi={_fmt('phi', row['phi'], args.degrees)} "
                  f"margin={_fmt('margin', row['margin'], args.degrees)} {'pass' if row['passed'] else 'FAIL'}")
        for chk in report["lemma3"]:
            print(f"lemma3 mu={chk['mu']} n={chk['n']}: min|arg h|={_fmt('phi', chk['min_abs_arg'], args.degrees)} "
                  f"phi={_fmt('phi', chk['phi_ref'], args.degrees)} {'pass' if chk['passed'] else 'FAIL'}")
        for ex in report["example1"]:
            print(f"example1 n={ex['n']} alpha={ex['alpha']}: sup={_fmt('bound', ex['sup_quotient'], args.degrees)} "
                  f"bound={_fmt('bound', ex['bound'], args.degrees)} mu={_fmt('mu', ex['mu_theorem'], False)} "
                  f"{'pass' if ex['passed'] else 'FAIL'}")
        print("suite: " + ("pass" if report["passed"] else "FAIL"))
    return 0 if report["passed"] else 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv", "plain"), default=None,
                        help="output format (certify defaults to json, others to plain)")
    common.add_argument("--degrees", action="store_true", help="display angles in degrees (plain output only)")
    common.add_argument("--ladder-k", type=int, default=None, help="ladder depth (overrides STARCERT_LADDER_K)")

    parser = argparse.ArgumentParser(prog="starcert", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"starcert {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("phi", parents=[common], help="admissible angle phi(mu) for order n")
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_phi)

    p = sub.add_parser("chain", parents=[common], help="solve alpha -> beta -> gamma")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_chain)

    p = sub.add_parser("best-mu", parents=[common], help="smallest mu certified by alpha")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_best_mu)

    p = sub.add_parser("certify", parents=[common], help="certify a coefficient file")
    p.add_argument("path")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--mu", type=float, default=None, help="target order (default: smallest admissible)")
    p.add_argument("--direct", action="store_true", help="also measure sup |arg z f'/f| directly")
    p.add_argument("--alexander", action="store_true", help="certify the Alexander transform of the input")
    p.add_argument("--tol-class", dest="tol_class", type=float, nargs="?", const=1e-12, default=0.0,
                   help="tolerance for normalized coefficients (default exact; bare flag means 1e-12)")
    p.set_defaults(func=cmd_certify, default_format="json")

    p = sub.add_parser("suite", parents=[common], help="corollary fixtures, Lemma 3 grid, Example 1 sweep")
    p.add_argument("--json", action="store_true")
    p.add_argument("--emit-profiles", metavar="DIR", default=None)
    p.set_defaults(func=cmd_suite)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.format is None:
        args.format = getattr(args, "default_format", "plain")
    try:
        return args.func(args)
    except StarcertError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
