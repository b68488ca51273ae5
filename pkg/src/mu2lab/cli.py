"""Command-line front end: ``mu2lab <command> [ring flags] [options]``.

Ring flags pick R.  ``--char p`` (or no flag) gives F_q[[π]]; ``--mixed``
gives a totally ramified extension of Z_p with E(u) = u^e − p unless
``--eisenstein FILE`` supplies one.  Models are given by descriptors, see
:func:`parse_descriptor`.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path

from . import breuil_kisin as bk
from . import classify, special_fiber
from .dvr import Dvr, DvrSpec, parse_config, parse_int_list
from .errors import ConfigError, InsufficientPrecision, Mu2Error
from .group_scheme import ModelDescriptor, build_model, presentation_to_json, verify_hopf

SCHEMA = "mu2lab/1"

EXIT_OK, EXIT_MISMATCH, EXIT_CONFIG, EXIT_PRECISION, EXIT_HOPF = 0, 1, 2, 3, 4


# --- ring and descriptor parsing -----------------------------------------

def ring_spec(args) -> DvrSpec:
    mixed = args.mixed or args.eisenstein is not None or args.char == "0"
    if args.char not in (None, "p", "0"):
        raise ConfigError(f"--char takes 'p' or '0', not {args.char!r}")
    if args.mixed and args.char == "p":
        raise ConfigError("--char p and --mixed are exclusive")
    if not mixed:
        return DvrSpec.equal_char(args.p, args.q, args.precision or 32)
    if args.q not in (None, args.p):
        raise ConfigError("mixed characteristic supports q = p only")
    if args.eisenstein is None:
        return DvrSpec.mixed_char(args.p, e=args.e or 1, precision=args.precision or 16)
    path = Path(args.eisenstein)
    if not path.is_file():
        raise ConfigError(f"no such file: {path}")
    text = path.read_text()
    if "=" in text:
        spec = parse_config(text)
        if spec.p != args.p:
            raise ConfigError(f"file is for p={spec.p}, command line says p={args.p}")
        return spec.with_precision(args.precision) if args.precision else spec
    try:
        coeffs = parse_int_list(" ".join(l.split("#", 1)[0] for l in text.splitlines()))
    except ValueError as exc:
        raise ConfigError(f"bad Eisenstein coefficients in {path}") from exc
    return DvrSpec.mixed_char(args.p, coeffs, precision=args.precision or 16)


def _int_list(text: str):
    try:
        return parse_int_list(text)
    except ValueError as exc:
        raise ConfigError(f"expected a list of integers, got {text!r}") from exc


def _parse_inline(text: str) -> dict:
    """``m=2 n=1 a=[0,1] j=1`` → dict; tokens split on whitespace or ';'."""
    out = {}
    for tok in text.replace(";", " ").split():
        if "=" not in tok:
            raise ConfigError(f"descriptor token {tok!r} is not key=value")
        key, val = tok.split("=", 1)
        key = key.strip().lower()
        if key in ("a", "mu", "lam"):
            out[key] = _int_list(val)
        elif key in ("m", "n", "j"):
            out[key] = int(val)
        elif key == "preset":
            out[key] = val
        else:
            raise ConfigError(f"unknown descriptor key {key!r}")
    return out


def parse_descriptor(text: str, dvr: Dvr) -> ModelDescriptor:
    """Build a descriptor from a JSON file path or an inline string.

    Keys: ``m``/``n`` put μ = π^m, λ = π^n; ``mu``/``lam`` give π-adic digit
    lists instead.  ``a`` is the residue mod λ as π-adic digits and F̃ is
    taken in closed form; a JSON file may give raw ``F`` coefficients as
    printed by ``hopf``.  ``j`` defaults to 1.  ``preset=zeta`` asks for
    the model built from a p²-th root of unity in R.
    """
    path = Path(text)
    if text.endswith(".json") or path.is_file():
        if not path.is_file():
            raise ConfigError(f"no such descriptor file: {path}")
        try:
            data = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
    else:
        data = _parse_inline(text)
    j = int(data.get("j", 1))
    if data.get("preset") == "zeta":
        return classify.zeta_model_descriptor(dvr, j)
    if "preset" in data:
        raise ConfigError(f"unknown preset {data['preset']!r}")

    def element(digits_key, power_key):
        if digits_key in data:
            return dvr(list(data[digits_key]))
        if power_key in data:
            return dvr.elem(dvr.pi_power(int(data[power_key])))
        raise ConfigError(f"descriptor needs {power_key} or {digits_key}")

    mu, lam = element("mu", "m"), element("lam", "n")
    if "F" in data:
        return ModelDescriptor(mu, lam, tuple(tuple(c) if isinstance(c, list) else c for c in data["F"]), j % dvr.p)
    if lam.valuation() == float("inf"):
        raise ConfigError("λ must be nonzero")
    return ModelDescriptor.from_residue(mu, lam, tuple(data.get("a", ())), j)


# --- commands --------------------------------------------------------------

def _bounds(args, spec: DvrSpec):
    default = spec.e // (spec.p - 1) if spec.mixed else 0
    mmax = default if args.mmax is None else args.mmax
    nmax = default if args.nmax is None else args.nmax
    if mmax < 0 or nmax < 0:
        raise ConfigError("bounds must be non-negative")
    return mmax, nmax


def cmd_enumerate(args, spec):
    mmax, nmax = _bounds(args, spec)
    table = classify.classification_table(spec, mmax, nmax, args.workers)
    lines = [f"{row['m']:>3} {row['n']:>3} {row['count']:>5}  {row['a']}" for row in table["cells"]]
    text = "  m   n count  a\n" + "\n".join(lines) + f"\ntotal {table['total']}"
    return EXIT_OK, table, text


def cmd_hopf(args, spec):
    dvr = Dvr.of(spec)
    d = parse_descriptor(args.descriptor, dvr)
    h = build_model(d)
    report = verify_hopf(h)
    result = {"presentation": presentation_to_json(h), "verify": report.as_dict(), "ok": report.ok}
    text = f"{h.name}: rank {h.rank}\n" + ("hopf axioms hold" if report.ok else f"failures: {report.failures()}")
    return (EXIT_OK if report.ok else EXIT_HOPF), result, text


def cmd_iso(args, spec):
    dvr = Dvr.of(spec)
    d1, d2 = parse_descriptor(args.first, dvr), parse_descriptor(args.second, dvr)
    iso = classify.iso_test(d1, d2)
    c1, c2 = classify.canonicalize_model(d1), classify.canonicalize_model(d2)
    verdict = "isomorphic" if iso else "not isomorphic"
    return EXIT_OK, {"isomorphic": iso, "canonical": [c1.as_dict(), c2.as_dict()]}, verdict


def cmd_fiber(args, spec):
    dvr = Dvr.of(spec)
    d = parse_descriptor(args.descriptor, dvr)
    fc = special_fiber.classify_fiber(d)
    result = {"fiber": fc.as_dict(), "description": fc.describe()}
    if args.check:
        result["reduction"] = special_fiber.fiber_oracle_agrees(d)
    return EXIT_OK, result, fc.describe()


def cmd_bk(args, spec):
    ring = bk.BKRing.from_spec(spec)
    table = bk.bk_table(ring, args.workers)
    mods = [bk.bk_build_module(t).as_dict() for t in bk.bk_enumerate(ring, args.workers)]
    table["modules"] = mods
    lines = [f"{row['n']:>3} {row['m']:>3} {row['count']:>5}  {row['a']}" for row in table["cells"]]
    text = "  n   m count  a\n" + "\n".join(lines) + f"\ntotal {table['total']}"
    return EXIT_OK, table, text


def cmd_crosscheck(args, spec):
    report = bk.cross_check_counts(spec, args.workers)
    lines = [f"({c['m']},{c['n']}) classify={c['classify']} bk={c['bk']}" + ("" if c["agree"] else "  MISMATCH")
             for c in report.cells]
    lines.append("counts agree" if report.agree else f"{len(report.mismatches)} cell(s) disagree")
    return (EXIT_OK if report.agree else EXIT_MISMATCH), report.as_dict(), "\n".join(lines)


COMMANDS = {
    "enumerate": cmd_enumerate,
    "hopf": cmd_hopf,
    "iso": cmd_iso,
    "fiber": cmd_fiber,
    "bk": cmd_bk,
    "crosscheck": cmd_crosscheck,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("ring")
    g.add_argument("--char", nargs="?", const="p", default=None,
                   help="'p' for equal characteristic (default), '0' for mixed")
    g.add_argument("--mixed", action="store_true", help="mixed characteristic")
    g.add_argument("--p", type=int, required=True)
    g.add_argument("--q", type=int, default=None, help="residue field size (equal characteristic)")
    g.add_argument("--e", type=int, default=None, help="ramification index, E(u) = u^e - p")
    g.add_argument("--eisenstein", metavar="FILE", default=None,
                   help="E(u) coefficients, constant term first, or a key=value ring file")
    g.add_argument("--precision", type=int, default=None)
    o = common.add_argument_group("output")
    o.add_argument("--mmax", type=int, default=None)
    o.add_argument("--nmax", type=int, default=None)
    o.add_argument("--out", metavar="FILE", default=None)
    o.add_argument("--format", choices=("json", "text"), default="json")
    o.add_argument("--workers", type=int, default=1)
    o.add_argument("--seed", type=int, default=0)

    parser = argparse.ArgumentParser(prog="mu2lab", description="Models of μ_{p²} over a d.v.r.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("enumerate", parents=[common], help="classification table")
    sub.add_parser("hopf", parents=[common], help="Hopf presentation of a model").add_argument("descriptor")
    iso = sub.add_parser("iso", parents=[common], help="isomorphism test")
    iso.add_argument("first")
    iso.add_argument("second")
    fib = sub.add_parser("fiber", parents=[common], help="special fiber type")
    fib.add_argument("descriptor")
    fib.add_argument("--check", action="store_true", help="also reduce the presentation mod π")
    sub.add_parser("bk", parents=[common], help="φ-module triples")
    sub.add_parser("crosscheck", parents=[common], help="compare per-cell counts of both classifications")
    return parser


def _emit(args, payload: dict, text: str):
    if args.format == "json":
        out = json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n"
    else:
        out = text + "\n"
    if args.out:
        Path(args.out).write_text(out)
    else:
        sys.stdout.write(out)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    random.seed(args.seed)
    try:
        spec = ring_spec(args)
        code, result, text = COMMANDS[args.command](args, spec)
    except InsufficientPrecision as exc:
        print(f"precision error: {exc}", file=sys.stderr)
        return EXIT_PRECISION
    except (Mu2Error, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    payload = {"schema": SCHEMA, "command": args.command, "ring": spec.describe(), "seed": args.seed, "result": result}
    _emit(args, payload, text)
    return code


if __name__ == "__main__":
    sys.exit(main())
