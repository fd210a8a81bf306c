"""Scattered order-type expressions and CSB linear orders of limit type.

Expressions use natural literals, ``w``, ``+``, ``*``, ``^`` and ``rev(...)``.
They are interpreted as finite sums of blocks (see :mod:`revstruct.blocks`),
rewritten to a fixed point, and read off as a sum of terms

``L(a)``        a limit ordinal a
``Lstar(a)``    its reverse
``Z(t, d)``     w^t * w* + w^d with 1 <= t < d
``Zstar(t, d)`` its reverse
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Sequence, Tuple, Union

from . import blocks as bk
from .blocks import Block, Blocks, RewriteStep, format_blocks, is_omega_power, mirror_blocks
from .cardinals import ALEPH_0, Aleph, format_multiplicity
from .errors import InputError, WitnessError
from .ordinals import OMEGA, ONE, ZERO, Ordinal, OrdinalOverflow


# -- syntax tree ---------------------------------------------------------------------


@dataclass(frozen=True)
class Nat:
    value: int


@dataclass(frozen=True)
class Omega:
    pass


@dataclass(frozen=True)
class Sum:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Prod:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Pow:
    base: "Expr"
    exponent: "Expr"


@dataclass(frozen=True)
class Rev:
    inner: "Expr"


Expr = Union[Nat, Omega, Sum, Prod, Pow, Rev]


class ExprSyntaxError(InputError):
    def __init__(self, message: str, position: int, text: str):
        self.position = position
        self.text = text
        super().__init__(f"{message} at position {position}")


_PUNCT = set("+*^()")


def _tokenize(text: str):
    tokens = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch.isdigit():
            j = i
            while j < len(text) and text[j].isdigit():
                j += 1
            tokens.append(("num", text[i:j], i))
            i = j
        elif text.startswith("rev", i):
            tokens.append(("rev", "rev", i))
            i += 3
        elif ch == "w":
            tokens.append(("w", "w", i))
            i += 1
        elif ch in _PUNCT:
            tokens.append((ch, ch, i))
            i += 1
        else:
            raise ExprSyntaxError(f"unexpected character {ch!r}", i, text)
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def take(self, kind: str):
        tok = self.tokens[self.pos]
        if tok[0] != kind:
            found = "end of input" if tok[0] == "end" else repr(tok[1])
            raise ExprSyntaxError(f"expected {kind!r}, found {found}", tok[2], self.text)
        self.pos += 1
        return tok

    def parse(self) -> Expr:
        e = self.sum()
        self.take("end")
        return e

    def sum(self) -> Expr:
        e = self.prod()
        while self.peek()[0] == "+":
            self.pos += 1
            e = Sum(e, self.prod())
        return e

    def prod(self) -> Expr:
        e = self.power()
        while self.peek()[0] == "*":
            self.pos += 1
            e = Prod(e, self.power())
        return e

    def power(self) -> Expr:
        start = self.peek()[2]
        base = self.atom()
        if self.peek()[0] != "^":
            return base
        self.pos += 1
        at = self.peek()[2]
        exponent = self.power()
        if has_reversal(base):
            raise ExprSyntaxError("the base of a power must be an ordinal", start, self.text)
        if has_reversal(exponent):
            raise ExprSyntaxError("an exponent must be an ordinal", at, self.text)
        return Pow(base, exponent)

    def atom(self) -> Expr:
        kind, value, at = self.peek()
        if kind == "num":
            self.pos += 1
            return Nat(int(value))
        if kind == "w":
            self.pos += 1
            return Omega()
        if kind == "rev":
            self.pos += 1
            self.take("(")
            e = self.sum()
            self.take(")")
            return Rev(e)
        if kind == "(":
            self.pos += 1
            e = self.sum()
            self.take(")")
            return e
        found = "end of input" if kind == "end" else repr(value)
        raise ExprSyntaxError(f"expected a term, found {found}", at, self.text)


def parse_order_type(text: str) -> Expr:
    return _Parser(text).parse()


def has_reversal(e: Expr) -> bool:
    if isinstance(e, Rev):
        return True
    if isinstance(e, (Sum, Prod)):
        return has_reversal(e.left) or has_reversal(e.right)
    if isinstance(e, Pow):
        return has_reversal(e.base) or has_reversal(e.exponent)
    return False


_PREC = {Sum: 1, Prod: 2, Pow: 3}


def format_expr(e: Expr) -> str:
    """Print with the fewest parentheses the grammar allows."""

    def go(e, ctx: int) -> str:
        if isinstance(e, Nat):
            return str(e.value)
        if isinstance(e, Omega):
            return "w"
        if isinstance(e, Rev):
            return f"rev({go(e.inner, 0)})"
        prec = _PREC[type(e)]
        if isinstance(e, Sum):
            s = f"{go(e.left, 1)}+{go(e.right, 2)}"
        elif isinstance(e, Prod):
            s = f"{go(e.left, 2)}*{go(e.right, 3)}"
        else:
            s = f"{go(e.base, 4)}^{go(e.exponent, 3)}"
        return f"({s})" if prec < ctx else s

    return go(e, 0)


# -- reversal ----------------------------------------------------------------------------


def reverse(e: Expr) -> Expr:
    """Reverse an order type, pushing through sums and cancelling double reversal."""
    if isinstance(e, Sum):
        return Sum(reverse(e.right), reverse(e.left))
    if isinstance(e, Rev):
        return push_reversals(e.inner)
    if isinstance(e, Nat):
        return e
    return Rev(e)


def push_reversals(e: Expr) -> Expr:
    """Normal form for reversals along the sum spine; reverse(reverse(e)) equals this."""
    if isinstance(e, Sum):
        return Sum(push_reversals(e.left), push_reversals(e.right))
    if isinstance(e, Rev):
        return reverse(e.inner)
    return e


# -- ordinal values ------------------------------------------------------------------------


class Unsupported(ValueError):
    """The expression denotes an order outside the block language."""


def ordinal_value(e: Expr) -> Ordinal:
    if isinstance(e, Nat):
        return Ordinal.of(e.value)
    if isinstance(e, Omega):
        return OMEGA
    if isinstance(e, Sum):
        return ordinal_value(e.left) + ordinal_value(e.right)
    if isinstance(e, Prod):
        return ordinal_value(e.left) * ordinal_value(e.right)
    if isinstance(e, Pow):
        return ordinal_value(e.base) ** ordinal_value(e.exponent)
    raise Unsupported("a reversed order is not an ordinal")


def ordinal_expr(a: Ordinal) -> Expr:
    """Expression for an ordinal in Cantor normal form."""
    out: Optional[Expr] = None
    for e, c in a.terms:
        if not e:
            term: Expr = Nat(c)
        else:
            base: Expr = Omega() if e == ONE else Pow(Omega(), ordinal_expr(e))
            term = base if c == 1 else Prod(base, Nat(c))
        out = term if out is None else Sum(out, term)
    return out if out is not None else Nat(0)


# -- interpretation as blocks ---------------------------------------------------------------


def interpret(e: Expr) -> Blocks:
    """The order denoted by e as a sum of blocks; raises Unsupported."""
    if not has_reversal(e):
        a = ordinal_value(e)
        return (Block(bk.O, a),) if a else ()
    if isinstance(e, Sum):
        return interpret(e.left) + interpret(e.right)
    if isinstance(e, Rev):
        return mirror_blocks(interpret(e.inner))
    if isinstance(e, Prod):
        return _product(interpret(e.left), interpret(e.right))
    raise Unsupported(f"cannot interpret {format_expr(e)}")


def _product(a: Blocks, b: Blocks) -> Blocks:
    # a * b is the sum of copies of a indexed by b, so it distributes over b
    out: Blocks = ()
    for blk in b:
        out += _times_block(a, blk)
    return out


def _times_block(a: Blocks, blk: Block) -> Blocks:
    if not a:
        return ()
    if blk.kind == bk.O:
        return _times_ordinal(a, blk.param)
    if blk.kind == bk.R:
        return mirror_blocks(_times_ordinal(mirror_blocks(a), blk.param))
    if blk.kind == bk.P:
        return _times_block(_times_ordinal(a, blk.param), Block(bk.R, OMEGA))
    return _times_block(_times_block(a, Block(bk.R, blk.param)), Block(bk.O, OMEGA))


def _times_ordinal(a: Blocks, beta: Ordinal) -> Blocks:
    if beta.is_finite():
        return a * int(beta)
    if len(a) == 1 and a[0].kind == bk.O:
        return (Block(bk.O, a[0].param * beta),)
    lam, n = beta.split_finite()
    if len(a) == 1 and a[0].kind == bk.R and lam.leading_exponent == ONE:
        c = lam.leading_coefficient
        return (Block(bk.PS, a[0].param),) * c + a * n
    raise Unsupported(f"({format_blocks(a)}) * {beta} leaves the block language")


# -- normal sums -----------------------------------------------------------------------------


@dataclass(frozen=True)
class Term:
    kind: str
    params: Tuple[Ordinal, ...]

    def __post_init__(self):
        if self.kind in ("L", "Lstar"):
            (a,) = self.params
            if not a.is_limit():
                raise ValueError(f"{self.kind} needs a limit ordinal, got {a}")
        elif self.kind in ("Z", "Zstar"):
            t, d = self.params
            if not (ONE <= t < d):
                raise ValueError(f"{self.kind} needs 1 <= t < d, got {t}, {d}")
        else:
            raise ValueError(f"unknown term kind {self.kind!r}")

    def __str__(self) -> str:
        return f"{self.kind}({','.join(map(str, self.params))})"

    def blocks(self) -> Blocks:
        if self.kind == "L":
            return (Block(bk.O, self.params[0]),)
        if self.kind == "Lstar":
            return (Block(bk.R, self.params[0]),)
        t, d = self.params
        z = (Block(bk.P, Ordinal.omega_power(t)), Block(bk.O, Ordinal.omega_power(d)))
        return z if self.kind == "Z" else mirror_blocks(z)

    def expr(self) -> Expr:
        if self.kind == "L":
            return ordinal_expr(self.params[0])
        if self.kind == "Lstar":
            return Rev(ordinal_expr(self.params[0]))
        t, d = (ordinal_expr(Ordinal.omega_power(x)) for x in self.params)
        if self.kind == "Z":
            return Sum(Prod(t, Rev(Omega())), d)
        return Sum(Rev(d), Prod(Rev(t), Omega()))


@dataclass(frozen=True)
class LimitNormalSum:
    terms: Tuple[Term, ...]

    def __str__(self) -> str:
        return " + ".join(map(str, self.terms))

    def blocks(self) -> Blocks:
        out: Blocks = ()
        for t in self.terms:
            out += t.blocks()
        return out

    def expr(self) -> Expr:
        out = None
        for t in self.terms:
            out = t.expr() if out is None else Sum(out, t.expr())
        return out


@dataclass(frozen=True)
class Classification:
    csb_limit: bool
    normal_form: Optional[LimitNormalSum]
    reason: str
    definitive: bool = True
    offending: Optional[str] = None
    blocks: Blocks = ()
    steps: Tuple[RewriteStep, ...] = ()

    def to_text(self) -> str:
        lines = [f"csb-limit: {'yes' if self.csb_limit else 'no'}", f"reason: {self.reason}"]
        if self.normal_form is not None:
            lines.append(f"normal-form: {self.normal_form}")
        else:
            lines.append(f"definitive: {'yes' if self.definitive else 'no'}")
        if self.offending:
            lines.append(f"offending: {self.offending}")
        if self.blocks:
            lines.append(f"blocks: {format_blocks(self.blocks)}")
        for s in self.steps:
            lines.append(f"step: {s}")
        return "\n".join(lines) + "\n"


LIMIT_SUM = "finite sum of limit-type terms"
FINITE_SUMMAND = "finite or successor summand"
EMPTY = "empty order"
EXHAUSTED = "rewrite exhaustion"
UNSUPPORTED = "unsupported expression"


def read_normal_form(blocks: Sequence[Block]) -> Tuple[Optional[LimitNormalSum], str, bool, Optional[str]]:
    """Read irreducible blocks as terms: ``(normal_form, reason, definitive, offending)``."""
    if not blocks:
        return None, EMPTY, True, None
    for b in blocks:
        if b.kind in (bk.O, bk.R) and not b.param.is_limit():
            return None, FINITE_SUMMAND, True, str(b)
    terms: List[Term] = []
    i = 0
    while i < len(blocks):
        b = blocks[i]
        nxt = blocks[i + 1] if i + 1 < len(blocks) else None
        if b.kind == bk.P:
            if nxt is not None and nxt.kind == bk.O and is_omega_power(b.param):
                t = b.param.leading_exponent
                d = nxt.param.leading_exponent
                if d > t:
                    head = Ordinal.omega_power(d)
                    terms.append(Term("Z", (t, d)))
                    rest = head.left_subtract(nxt.param)
                    if rest:
                        terms.append(Term("L", (rest,)))
                    i += 2
                    continue
            return None, EXHAUSTED, False, str(b)
        if b.kind == bk.R and nxt is not None and nxt.kind == bk.PS:
            if is_omega_power(nxt.param):
                t = nxt.param.leading_exponent
                d = b.param.leading_exponent
                if d > t:
                    rest = Ordinal.omega_power(d).left_subtract(b.param)
                    if rest:
                        terms.append(Term("Lstar", (rest,)))
                    terms.append(Term("Zstar", (t, d)))
                    i += 2
                    continue
            return None, EXHAUSTED, False, str(nxt)
        if b.kind == bk.PS:
            return None, EXHAUSTED, False, str(b)
        terms.append(Term("L" if b.kind == bk.O else "Lstar", (b.param,)))
        i += 1
    return LimitNormalSum(tuple(terms)), LIMIT_SUM, True, None


def normalize_blocks(blocks: Sequence[Block]):
    return bk.rewrite(blocks)


def classify_csb_limit(e: Union[Expr, str]) -> Classification:
    if isinstance(e, str):
        e = parse_order_type(e)
    try:
        raw = interpret(e)
    except (Unsupported, OrdinalOverflow) as exc:
        return Classification(False, None, UNSUPPORTED, False, str(exc))
    final, steps = bk.rewrite(raw)
    nf, reason, definitive, offending = read_normal_form(final)
    return Classification(nf is not None, nf, reason, definitive, offending, final, tuple(steps))


def normalize_limit_sum(e: Union[Expr, str]) -> Classification:
    """Same as :func:`classify_csb_limit`; kept as the name of the rewriting step."""
    return classify_csb_limit(e)


def format_normal_form(nf: LimitNormalSum) -> str:
    return str(nf)


# -- theta invariants --------------------------------------------------------------------------


def theta_invariants(e: Union[Expr, str]) -> Optional[Tuple[Ordinal, Ordinal]]:
    """Suprema of the ordinals embeddable into the order and into its reverse.

    Supported shapes: an ordinal a, a reversed ordinal rev(b), or rev(b) + a.
    Returns None outside that fragment.
    """
    if isinstance(e, str):
        e = parse_order_type(e)
    beta, alpha = _reversed_then_ordinal(e)
    if beta is None and alpha is None:
        return None
    alpha = alpha if alpha is not None else ZERO
    beta = beta if beta is not None else ZERO
    return _theta(beta, alpha), _theta(alpha, beta)


def _theta(beta: Ordinal, alpha: Ordinal) -> Ordinal:
    # sup of ordinals embeddable in beta* + alpha
    if not alpha.is_finite():
        return alpha
    if not beta.is_finite():
        return OMEGA
    return beta + alpha


def _reversed_then_ordinal(e: Expr):
    if not has_reversal(e):
        return None, ordinal_value(e)
    if isinstance(e, Rev) and not has_reversal(e.inner):
        return ordinal_value(e.inner), None
    if isinstance(e, Sum) and isinstance(e.left, Rev) and not has_reversal(e.left.inner) \
            and not has_reversal(e.right):
        return ordinal_value(e.left.inner), ordinal_value(e.right)
    return None, None


# -- unions of chains -------------------------------------------------------------------------


@dataclass(frozen=True)
class OtpMember:
    source: str
    normal_form: LimitNormalSum
    multiplicity: Union[int, Aleph]

    @property
    def infinite(self) -> bool:
        return isinstance(self.multiplicity, Aleph)


@dataclass(frozen=True)
class OtpFamily:
    members: Tuple[OtpMember, ...]

    def __post_init__(self):
        forms = [str(m.normal_form) for m in self.members]
        if len(set(forms)) != len(forms):
            raise ValueError("normal forms must be pairwise distinct; use OtpFamily.build")

    @classmethod
    def build(cls, items: Iterable[Tuple[Union[str, Expr], Union[int, Aleph]]]) -> "OtpFamily":
        members: List[OtpMember] = []
        for source, mult in items:
            text = source if isinstance(source, str) else format_expr(source)
            c = classify_csb_limit(source)
            if not c.csb_limit:
                raise ValueError(f"{text} is not a CSB order of limit type ({c.reason})")
            for k, m in enumerate(members):
                if str(m.normal_form) == str(c.normal_form):
                    total = ALEPH_0 if m.infinite or isinstance(mult, Aleph) else m.multiplicity + mult
                    members[k] = OtpMember(m.source, m.normal_form, total)
                    break
            else:
                members.append(OtpMember(text, c.normal_form, mult))
        return cls(tuple(members))


def parse_otp_family(text: str, source: Optional[str] = None) -> OtpFamily:
    items = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        words = line.split()
        if words[0] != "otp" or len(words) < 4 or words[-2] != "times":
            raise InputError("expected 'otp <expression> times <n|inf>'", lineno, source)
        expr_text = line[len("otp"):line.rfind("times")].strip()
        mult_text = words[-1]
        if mult_text == "inf":
            mult: Union[int, Aleph] = ALEPH_0
        elif mult_text.isdigit() and int(mult_text) >= 1:
            mult = int(mult_text)
        else:
            raise InputError(f"bad multiplicity {mult_text!r}", lineno, source)
        try:
            expr = parse_order_type(expr_text)
        except ExprSyntaxError as exc:
            raise InputError(f"{exc}", lineno, source) from None
        c = classify_csb_limit(expr)
        if not c.csb_limit:
            raise InputError(f"{expr_text} is not a CSB order of limit type ({c.reason})", lineno, source)
        items.append((expr, mult))
    if not items:
        raise InputError("no members declared", None, source)
    return OtpFamily.build(items)


@dataclass(frozen=True)
class EvenOddWitness:
    """Split one copy into points at even and odd positions of every w- or
    w*-block; both halves are copies of the whole, so two indices merge."""

    member: LimitNormalSum

    def shift_plan(self) -> List[str]:
        return ["f(i0) = i0", "f(i1) = i0", "f(ik) = i(k-1) for k >= 2", "other indices fixed"]

    def maps(self) -> List[str]:
        return ["A0: position n -> 2n in each w- or w*-block",
                "A1: position n -> 2n+1 in each w- or w*-block"]


@dataclass(frozen=True)
class UnionVerdict:
    reversible: bool
    reason: str
    witness: Optional[EvenOddWitness] = None

    def to_text(self) -> str:
        lines = [f"status: {'reversible' if self.reversible else 'not-reversible'}",
                 f"reason: {self.reason}"]
        if self.witness is not None:
            lines.append(f"member: {self.witness.member}")
            lines.extend(f"split: {m}" for m in self.witness.maps())
            lines.extend(f"shift: {s}" for s in self.witness.shift_plan())
        return "\n".join(lines) + "\n"


def decide_union_reversibility(fam: OtpFamily) -> UnionVerdict:
    for m in fam.members:
        if m.infinite:
            return UnionVerdict(False, "an order type occurs infinitely often", EvenOddWitness(m.normal_form))
    return UnionVerdict(True, "finite-to-one sequence of order types")


def validate_even_odd_witness(w: EvenOddWitness, window: int = 10_000):
    from .presentations import check_even_odd_split

    even, odd = check_even_odd_split(w.member.blocks(), window)
    if not even:
        raise WitnessError(f"even half: {even.message}")
    if not odd:
        raise WitnessError(f"odd half: {odd.message}")
    return even, odd


def otp_family_text(fam: OtpFamily) -> str:
    return "".join(f"otp {m.normal_form.expr() and format_expr(m.normal_form.expr())} times "
                   f"{format_multiplicity(m.multiplicity)}\n" for m in fam.members)
