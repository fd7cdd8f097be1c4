"""Command-line harness: generate sets, compute statistics, certify runs,
print constants tables and empirical-exponent reports.

Exit status contract: 0 = everything checked out; 2 = usage or input error;
3 = a mathematical check failed (bug or counterexample).  All pass/fail
decisions are taken on exact values; decimals appear only in human-facing
columns.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from typing import Optional, Sequence

from . import bounds as bounds_mod
from . import families
from .bounds import (
    Strategy,
    bound_value,
    constants,
    floor_exponent,
    log4_string,
    parse_split_tree,
    psi_dominates_log4,
)
from .certificate import InternalInconsistencyError, certify
from .exactnum import exact_div, format_rational, rational
from .setops import (
    FiniteSet,
    kfold_product,
    kfold_sum,
    productset,
    quotientset,
    read_set_file,
    set_to_json,
)

MAX_CERTIFY_N = 512
MAX_PREDICTED_KA = 10**7


class CliError(Exception):
    def __init__(self, message: str, code: int = 2):
        super().__init__(message)
        self.code = code


def parse_split_flag(text: str) -> Strategy:
    if text in bounds_mod.STRATEGIES:
        return text
    if text.startswith("explicit:"):
        return parse_split_tree(text[len("explicit:"):])
    raise CliError(
        f"--split must be balanced, pow2, dp, or explicit:<tree>, got {text!r}"
    )


def parse_int_range(text: str, what: str) -> list[int]:
    """Comma list of items, each "N" or "LO..HI" (inclusive)."""
    values: set[int] = set()
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        if ".." in item:
            lo_s, _, hi_s = item.partition("..")
            try:
                lo, hi = int(lo_s), int(hi_s)
            except ValueError:
                raise CliError(f"bad {what} item {item!r}") from None
            if hi < lo:
                raise CliError(f"empty {what} range {item!r}")
            values.update(range(lo, hi + 1))
        else:
            try:
                values.add(int(item))
            except ValueError:
                raise CliError(f"bad {what} item {item!r}") from None
    if not values:
        raise CliError(f"empty {what}")
    return sorted(values)


def _family_spec_from_args(args: argparse.Namespace, n: Optional[int] = None):
    """Build a FamilySpec from gen/exponent style flags (or --spec-json)."""
    if getattr(args, "spec_json", None):
        data = json.loads(args.spec_json)
        return families.spec_from_dict(data)
    fam = args.family
    if fam is None:
        raise CliError("either --family or --spec-json is required")
    size = n if n is not None else args.n
    if fam == "ap":
        if size is None:
            raise CliError("--n is required for ap")
        return families.ApSpec(rational(args.start), rational(args.step), size)
    if fam == "gp":
        if size is None:
            raise CliError("--n is required for gp")
        return families.GpSpec(rational(args.start), rational(args.ratio), size)
    if fam == "gp2d":
        n1 = args.n1 if n is None else n
        n2 = args.n2 if n is None else n
        if n1 is None or n2 is None:
            raise CliError("--n1 and --n2 are required for gp2d")
        return families.Gp2dSpec(
            rational(args.start), rational(args.ratio), rational(args.ratio2), n1, n2
        )
    if fam == "random":
        if size is None:
            raise CliError("--size (or --n) is required for random")
        if args.pool_gp_n is not None:
            pool = families.GpSpec(
                rational(args.start), rational(args.ratio), args.pool_gp_n
            )
        else:
            pool = families.RangePool(args.pool_lo, args.pool_hi)
        return families.RandomSubsetSpec(size, args.seed, pool)
    if fam == "union":
        raise CliError("union families are specified via --spec-json")
    raise CliError(f"unknown family {fam!r}")


# --- subcommands -------------------------------------------------------------

def cmd_gen(args: argparse.Namespace) -> int:
    spec = _family_spec_from_args(args)
    a = families.generate(spec)
    text = set_to_json(a)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


def cmd_compute(args: argparse.Namespace) -> int:
    a = read_set_file(args.setfile)
    k = args.k
    if k < 1:
        raise CliError("--k must be >= 1")
    n = len(a)
    product_size = len(productset(a, a))
    quotient_size = len(quotientset(a, a))
    sum_size = len(kfold_sum(a, k))
    prod_size_k = len(kfold_product(a, k))
    doubling = exact_div(product_size, n)
    # |A/A| <= |AA|^2 / |A|, exactly
    ruzsa_ok = quotient_size * n <= product_size * product_size
    doc = {
        "n": n,
        "product_size": product_size,
        "quotient_size": quotient_size,
        "k": k,
        "sum_kfold_size": sum_size,
        "product_kfold_size": prod_size_k,
        "doubling": format_rational(doubling),
        "ruzsa_ok": ruzsa_ok,
    }
    if args.json:
        print(json.dumps(doc, indent=2))
    else:
        print(f"|A|      = {n}")
        print(f"|AA|     = {product_size}")
        print(f"|A/A|    = {quotient_size}")
        print(f"|{k}A|     = {sum_size}")
        print(f"|A^({k})| = {prod_size_k}")
        print(f"M        = {format_rational(doubling)}")
        verdict = "ok" if ruzsa_ok else "FAILED"
        print(
            f"Ruzsa    : |A/A| = {quotient_size} <= |AA|^2/|A| "
            f"= {product_size}^2/{n}: {verdict}"
        )
    return 0 if ruzsa_ok else 3


def cmd_certify(args: argparse.Namespace) -> int:
    a = read_set_file(args.setfile)
    if args.k < 2:
        raise CliError("--k must be >= 2 for certification")
    n = len(a)
    predicted = math.comb(n + args.k - 1, args.k)
    if (n > MAX_CERTIFY_N or predicted > MAX_PREDICTED_KA) and not args.force:
        raise CliError(
            f"refusing n = {n} with predicted |kA| <= {predicted}: "
            f"limits are n <= {MAX_CERTIFY_N} and {MAX_PREDICTED_KA} "
            "predicted sums (rerun with --force)"
        )
    strategy = parse_split_flag(args.split)
    cert = certify(a, args.k, strategy, doubling_override=args.doubling)
    payload = cert.to_json()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(payload)
    if args.json:
        sys.stdout.write(payload)
    else:
        flag = lambda ok: "ok" if ok else "FAILED"
        print(f"set: {cert.n} elements, k = {cert.k} split {cert.k1}+{cert.k2}")
        print(
            f"M = {format_rational(cert.M)}, |A/A| = {cert.quotient_size}, "
            f"threshold = {format_rational(cert.threshold)}"
        )
        print(
            f"popular slopes: m = {cert.m} of {cert.quotient_size}, "
            f"mass = {cert.popular_mass}"
        )
        print(f"blocks: {cert.m}, total size {cert.sum_of_blocks}")
        print(
            f"disjoint: {flag(cert.disjoint_ok)}   "
            f"product-formula: {flag(cert.product_formula_ok)}   "
            f"containment: {flag(cert.containment_ok)}"
        )
        print(
            f"chain: |kA|^2 = {cert.kA_size}^2 >= {cert.sum_of_blocks}: "
            f"{flag(cert.chain_ok)}"
        )
        print(
            f"bound: |kA| = {cert.kA_size} >= "
            f"{cert.theorem_bound.decimal():.6g}: {flag(cert.theorem_holds)}"
        )
        if cert.disjoint_witness is not None:
            p, i, j = cert.disjoint_witness
            print(f"collision witness: {p} in blocks {i} and {j}", file=sys.stderr)
    return 0 if cert.all_checks_pass else 3


def cmd_bounds(args: argparse.Namespace) -> int:
    ks = parse_int_range(args.k_range, "k range")
    strategy = parse_split_flag(args.split)
    rows = []
    for k in ks:
        bc = constants(k, strategy)
        z, floor_psi = floor_exponent(k)
        rows.append(
            {
                "k": k,
                "split": bc.split.render(),
                "psi": format_rational(bc.psi),
                "d": format_rational(bc.d),
                "log2_c": format_rational(bc.c_log2),
                "log4_2k": log4_string(2 * k),
                "log4_k_context": log4_string(k),
                "floor_z": z,
                "floor_psi": format_rational(floor_psi),
                "psi_ge_log4_2k": psi_dominates_log4(bc.psi, k),
            }
        )
    if args.json:
        print(json.dumps(rows, indent=2))
    else:
        header = f"{'k':>5}  {'psi':>8} {'d':>10} {'log2(c)':>10} {'log4(2k)':>9} {'log4(k)*':>9}  split"
        print(header)
        for r in rows:
            print(
                f"{r['k']:>5}  {r['psi']:>8} {r['d']:>10} {r['log2_c']:>10} "
                f"{r['log4_2k']:>9} {r['log4_k_context']:>9}  {r['split']}"
            )
        print("(* context column: exponent of the earlier k-fold bound)")
    return 0


@dataclass(frozen=True)
class ExponentRow:
    n: int
    size: int
    product_size: int
    doubling_str: str
    kfold_size: int
    empirical: Optional[float]
    bound_decimal: float
    holds: bool


def cmd_exponent(args: argparse.Namespace) -> int:
    if args.k < 2:
        raise CliError("--k must be >= 2")
    ns = parse_int_range(args.n_range, "n range")
    strategy = parse_split_flag(args.split)
    bc = constants(args.k, strategy)
    z, floor_psi = floor_exponent(args.k)
    rows = []
    all_hold = True
    for idx, n in enumerate(ns):
        row_args = argparse.Namespace(**vars(args))
        if args.family == "random":
            row_args.seed = args.seed + idx
        spec = _family_spec_from_args(row_args, n=n)
        a = families.generate(spec)
        size = len(a)
        product_size = len(productset(a, a))
        doubling = exact_div(product_size, size)
        ka_size = len(kfold_sum(a, args.k))
        bv = bound_value(bc, size, doubling)
        holds = bv.holds_for(ka_size)
        all_hold = all_hold and holds
        empirical = (
            math.log(ka_size) / math.log(size) if size > 1 else None
        )
        if args.full:
            cert = certify(a, args.k, strategy)
            if cert.kA_size != ka_size or cert.theorem_holds != holds:
                raise InternalInconsistencyError(
                    "exponent-full", f"certificate disagrees with row at n = {n}"
                )
            all_hold = all_hold and cert.all_checks_pass
        rows.append(
            ExponentRow(
                n=n,
                size=size,
                product_size=product_size,
                doubling_str=format_rational(doubling),
                kfold_size=ka_size,
                empirical=empirical,
                bound_decimal=bv.decimal(),
                holds=holds,
            )
        )
    doc = {
        "family": families.spec_to_dict(_family_spec_from_args(args, n=ns[0]))["kind"],
        "k": args.k,
        "psi": format_rational(bc.psi),
        "floor_psi": format_rational(floor_psi),
        "log4_2k": log4_string(2 * args.k),
        "rows": [
            {
                "n": r.n,
                "size": r.size,
                "product_size": r.product_size,
                "doubling": r.doubling_str,
                "kfold_size": r.kfold_size,
                "empirical_exponent": (
                    None if r.empirical is None else f"{r.empirical:.4f}"
                ),
                "bound": f"{r.bound_decimal:.6g}",
                "holds": r.holds,
            }
            for r in rows
        ],
    }
    text = json.dumps(doc, indent=2)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    if args.json or args.out:
        if args.json:
            print(text)
    else:
        print(
            f"family {doc['family']}, k = {args.k}, psi = {doc['psi']}, "
            f"log4(2k) = {doc['log4_2k']}"
        )
        print(
            f"{'n':>5} {'|A|':>6} {'|AA|':>8} {'M':>10} {'|kA|':>9} "
            f"{'exp':>7} {'bound':>12} holds"
        )
        for r in rows:
            emp = "-" if r.empirical is None else f"{r.empirical:.4f}"
            print(
                f"{r.n:>5} {r.size:>6} {r.product_size:>8} {r.doubling_str:>10} "
                f"{r.kfold_size:>9} {emp:>7} {r.bound_decimal:>12.6g} "
                f"{'yes' if r.holds else 'NO'}"
            )
    return 0 if all_hold else 3


# --- parser ------------------------------------------------------------------

def _add_family_flags(p: argparse.ArgumentParser, with_n: bool = True) -> None:
    p.add_argument("--family", choices=["ap", "gp", "gp2d", "random", "union"])
    p.add_argument("--spec-json", help="full family spec as a JSON object")
    p.add_argument("--start", default="1", help="first element (rational)")
    p.add_argument("--step", default="1", help="ap step (rational)")
    p.add_argument("--ratio", default="2", help="gp ratio (rational, != 1)")
    p.add_argument("--ratio2", default="3", help="second gp2d ratio")
    if with_n:
        p.add_argument("--n", type=int, help="number of elements")
        p.add_argument("--n1", type=int, help="gp2d first grid dimension")
        p.add_argument("--n2", type=int, help="gp2d second grid dimension")
        p.add_argument("--size", dest="n", type=int, help="random subset size")
    p.add_argument("--seed", type=int, default=0, help="seed for random families")
    p.add_argument("--pool-lo", type=int, default=1, help="random pool lower end")
    p.add_argument("--pool-hi", type=int, default=200, help="random pool upper end")
    p.add_argument("--pool-gp-n", type=int, help="sample from gp of this length instead")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sumsetlab",
        description="exact sum-set / product-set laboratory with growth certificates",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a set file from a family spec")
    _add_family_flags(p)
    p.add_argument("--out", help="output set file (default: stdout)")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("compute", help="exact statistics of a set file")
    p.add_argument("setfile")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("certify", help="run the block-construction certificate")
    p.add_argument("setfile")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--split", default="balanced",
                   help="balanced | pow2 | dp | explicit:<tree>")
    p.add_argument("--doubling", help="override M with a larger rational")
    p.add_argument("--out", help="write certificate JSON here")
    p.add_argument("--json", action="store_true", help="print certificate JSON")
    p.add_argument("--force", action="store_true", help="skip the size guardrail")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("bounds", help="constants table over a k range")
    p.add_argument("--k-range", required=True, help='e.g. "1..8" or "2,4,8"')
    p.add_argument("--split", default="dp",
                   help="balanced | pow2 | dp | explicit:<tree>")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("exponent", help="empirical-exponent report over a family")
    _add_family_flags(p, with_n=False)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n-range", required=True, help='e.g. "4,8,16,32" or "4..32"')
    p.add_argument("--split", default="balanced",
                   help="balanced | pow2 | dp | explicit:<tree>")
    p.add_argument("--full", action="store_true",
                   help="also run the full certificate per row")
    p.add_argument("--json", action="store_true")
    p.add_argument("--out", help="write the JSON report here")
    p.set_defaults(func=cmd_exponent)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if e.code is not None else 0
    try:
        return args.func(args)
    except CliError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.code
    except InternalInconsistencyError as e:
        print(f"internal inconsistency at step {e.step}: {e}", file=sys.stderr)
        return 3
    except (ValueError, OSError, json.JSONDecodeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


def entry() -> None:
    sys.exit(main())
