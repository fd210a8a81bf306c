"""Command-line front end.

Exit status: 0 positive/reversible, 1 negative/not reversible, 2 inconclusive,
3 input error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import List, Optional, Tuple

from . import families as fa
from .cardinals import decide_reversible, parse_sequence
from .errors import GuardExceeded, InputError, WitnessError
from .families import decide_family, parse_family, validate_merge_witness, validate_strict_pair
from .ordertypes import (ExprSyntaxError, classify_csb_limit, decide_union_reversibility,
                         parse_order_type, parse_otp_family, validate_even_odd_witness)
from .structures import (DEFAULT_GUARD, MorphismKind, components, find_morphisms,
                         is_reversible_bruteforce, parse_structure)
from .wellfounded import certify_by_invariant, is_well_founded, parse_relation, resolve_invariant

POSITIVE, NEGATIVE, INCONCLUSIVE, INPUT_ERROR = 0, 1, 2, 3

Report = Tuple[int, str, List[str]]  # exit status, prose headline, evidence lines


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read file: {exc.strerror}", None, path) from None


def _mapping_lines(key: str, mapping) -> List[str]:
    return [f"{key}:"] + [f"  {x} -> {y}" for x, y in sorted(mapping.items())]


def cmd_check_structure(args) -> Report:
    x = parse_structure(_read(args.file), args.file)
    try:
        res = is_reversible_bruteforce(x, args.guard)
    except GuardExceeded as exc:
        return INCONCLUSIVE, "refused: structure too large for the exhaustive check", [
            "status: inconclusive", f"reason: {exc}"]
    lines = [f"status: {'reversible' if res.reversible else 'not-reversible'}",
             f"condensations: {res.condensations}", f"automorphisms: {res.automorphisms}"]
    if res.reversible:
        return POSITIVE, "every condensation onto itself is an automorphism", lines
    mapping, (a, b) = res.counterexample
    lines += _mapping_lines("condensation", mapping)
    lines.append(f"violating-pair: {a} {b}")
    return NEGATIVE, "found a condensation that is not an automorphism", lines


def cmd_components(args) -> Report:
    x = parse_structure(_read(args.file), args.file)
    blocks = components(x)
    lines = [f"count: {len(blocks)}"] + [f"block: {' '.join(b)}" for b in blocks]
    return POSITIVE, f"{len(blocks)} connectivity component(s)", lines


def cmd_morphisms(args) -> Report:
    x = parse_structure(_read(args.source), args.source)
    y = parse_structure(_read(args.target), args.target)
    kind = MorphismKind(args.kind)
    found = find_morphisms(x, y, kind, None if args.limit == 0 else args.limit)
    lines = [f"kind: {kind.value}", f"count: {len(found)}"]
    for k, f in enumerate(found):
        lines += _mapping_lines(f"mapping.{k}", f)
    status = POSITIVE if found else NEGATIVE
    return status, f"{len(found)} {kind.value}(s) found", lines


def cmd_decide_family(args) -> Report:
    fam = parse_family(_read(args.file), args.file)
    v = decide_family(fam, args.max_parts, args.guard)
    if v.merge is not None:
        validate_merge_witness(fam, v.merge)
    if v.strict_pair is not None:
        validate_strict_pair(fam, v.strict_pair)
    lines = v.to_text().splitlines()
    if v.status == fa.REVERSIBLE:
        return POSITIVE, "the disjoint union is reversible", lines
    if v.status == fa.NOT_REVERSIBLE:
        return NEGATIVE, "the disjoint union is not reversible", lines
    return INCONCLUSIVE, "no decision within the search limits", lines


def cmd_decide_cardinals(args) -> Report:
    seq = parse_sequence(_read(args.file), args.file)
    v = decide_reversible(seq)
    lines = [f"status: {'reversible' if v.reversible else 'not-reversible'}",
             f"reason: {v.reason}"] + v.evidence_lines()
    if v.reversible:
        return POSITIVE, "the cardinal sequence is reversible", lines
    return NEGATIVE, "the cardinal sequence is not reversible", lines


def cmd_classify_otp(args) -> Report:
    text = _read(args.expression[1:]) if args.expression.startswith("@") else args.expression
    try:
        expr = parse_order_type(text.strip())
    except ExprSyntaxError as exc:
        raise InputError(str(exc), None, args.expression) from None
    c = classify_csb_limit(expr)
    lines = c.to_text().splitlines()
    if c.csb_limit:
        return POSITIVE, "CSB of limit type", lines
    if c.definitive:
        return NEGATIVE, "not CSB of limit type", lines
    return INCONCLUSIVE, "not recognised as CSB of limit type (rewriting exhausted)", lines


def cmd_decide_otp_union(args) -> Report:
    fam = parse_otp_family(_read(args.file), args.file)
    v = decide_union_reversibility(fam)
    lines = v.to_text().splitlines()
    if v.reversible:
        return POSITIVE, "the union of chains is reversible", lines
    even, odd = validate_even_odd_witness(v.witness, args.window)
    lines.append(f"validated-window: {args.window} ({even.checked_forward}+{odd.checked_forward} points)")
    return NEGATIVE, "the union of chains is not reversible", lines


def cmd_wf_check(args) -> Report:
    r = parse_relation(_read(args.file), args.file)
    res = is_well_founded(r)
    lines = [f"status: {'well-founded' if res else 'not-well-founded'}"]
    if res.subsets_checked:
        lines.append(f"subsets-checked: {res.subsets_checked}")
    if res:
        return POSITIVE, "no directed cycle", lines
    lines.append("cycle: " + " ".join(map(str, res.cycle)))
    return NEGATIVE, "found a directed cycle", lines


def _looks_like_otp(text: str) -> bool:
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            return line.startswith("otp ")
    return False


def cmd_certify(args) -> Report:
    text = _read(args.file)
    fam = parse_otp_family(text, args.file) if _looks_like_otp(text) else parse_family(text, args.file)
    try:
        theta = resolve_invariant(args.invariant)
        cert = certify_by_invariant(fam, theta)
    except ValueError as exc:
        raise InputError(str(exc), None, args.file) from None
    if cert is None:
        return INCONCLUSIVE, "some invariant fiber is infinite; no certificate (this is not a refutation)", [
            "status: inconclusive", f"invariant: {theta.name}"]
    return POSITIVE, "every invariant fiber is finite", [
        "status: reversible-certified", cert.to_text().strip()]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="revstruct", description=__doc__.splitlines()[0])
    p.add_argument("--format", choices=("text", "structured"), default="text")
    p.add_argument("--quiet", action="store_true", help="omit prose; evidence is always printed")
    sub = p.add_subparsers(dest="command", required=True, metavar="command")

    def add(name, func, help_text):
        sp = sub.add_parser(name, help=help_text)
        sp.set_defaults(func=func)
        return sp

    sp = add("check-structure", cmd_check_structure, "exhaustive reversibility check of a finite structure")
    sp.add_argument("file")
    sp.add_argument("--guard", type=int, default=DEFAULT_GUARD)

    sp = add("components", cmd_components, "connectivity components")
    sp.add_argument("file")

    sp = add("morphisms", cmd_morphisms, "enumerate morphisms between two structures")
    sp.add_argument("source")
    sp.add_argument("target")
    sp.add_argument("--kind", choices=[k.value for k in MorphismKind], default="homomorphism")
    sp.add_argument("--limit", type=int, default=0, help="0 means all")

    sp = add("decide-family", cmd_decide_family, "reversibility of a disjoint union of templates")
    sp.add_argument("file")
    sp.add_argument("--guard", type=int, default=DEFAULT_GUARD)
    sp.add_argument("--max-parts", type=int, default=None)

    sp = add("decide-cardinals", cmd_decide_cardinals, "reversibility of a cardinal sequence")
    sp.add_argument("file")

    sp = add("classify-otp", cmd_classify_otp, "is an order-type expression CSB of limit type")
    sp.add_argument("expression", help="expression text, or @file")

    sp = add("decide-otp-union", cmd_decide_otp_union, "reversibility of a union of CSB chains")
    sp.add_argument("file")
    sp.add_argument("--window", type=int, default=10_000)

    sp = add("wf-check", cmd_wf_check, "well-foundedness of a finite relation")
    sp.add_argument("file")

    sp = add("certify", cmd_certify, "certificate from finite invariant fibers")
    sp.add_argument("file")
    sp.add_argument("--invariant", default="size",
                    help="size, edges, longest-path, theta0, theta1, or a comma list for the diagonal")
    return p


def _validate(args, parser) -> None:
    if getattr(args, "guard", 1) < 1:
        parser.error("--guard must be at least 1")
    mp = getattr(args, "max_parts", None)
    if mp is not None and mp < 2:
        parser.error("--max-parts must be at least 2")
    if getattr(args, "limit", 0) < 0:
        parser.error("--limit must be non-negative")
    if getattr(args, "window", 1) < 1:
        parser.error("--window must be positive")


def run(argv: Optional[List[str]] = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _validate(args, parser)
    except SystemExit as exc:
        return INPUT_ERROR if exc.code else 0
    try:
        status, headline, lines = args.func(args)
    except (InputError, ValueError) as exc:
        if isinstance(exc, WitnessError):
            print(f"error: witness failed re-validation: {exc}", file=err)
        else:
            print(f"error: {exc}", file=err)
        return INPUT_ERROR
    if args.format == "structured":
        out.write(f"command: {args.command}\nexit: {status}\n")
        out.write("".join(line + "\n" for line in lines))
    else:
        if not args.quiet:
            out.write(headline + "\n")
        out.write("".join(line + "\n" for line in lines))
    return status


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
