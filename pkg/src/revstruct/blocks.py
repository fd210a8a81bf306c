"""Linear orders as finite sums of blocks, and isomorphism-preserving rewrites.

Four block shapes cover every order the expression language can produce:

``O(a)``   the ordinal a
``R(a)``   the reversed ordinal a*
``P(a)``   a * w*, i.e. copies of a indexed by the negative integers
``Ps(a)``  a* * w, the reverse of ``P(a)``

Every rewrite rule comes with explicit element maps in both directions so
that each application can be checked on computable presentations.
Elements of a block are an ``Ordinal`` for ``O``/``R`` and a pair
``(k, Ordinal)`` for ``P``/``Ps``; elements of a block list are pairs
``(position, element)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, List, Optional, Sequence, Tuple

from .ordinals import ONE, OMEGA, ZERO, Ordinal

O, R, P, PS = "O", "R", "P", "Ps"
_MIRROR = {O: R, R: O, P: PS, PS: P}


@dataclass(frozen=True)
class Block:
    kind: str
    param: Ordinal

    def __post_init__(self):
        if self.kind not in _MIRROR:
            raise ValueError(f"unknown block kind {self.kind!r}")
        object.__setattr__(self, "param", Ordinal.of(self.param))

    def mirror(self) -> "Block":
        return Block(_MIRROR[self.kind], self.param)

    def is_empty(self) -> bool:
        return not self.param

    def __str__(self) -> str:
        return f"{self.kind}({self.param})"


Blocks = Tuple[Block, ...]


def mirror_blocks(blocks: Sequence[Block]) -> Blocks:
    return _mirror_tuple(tuple(blocks))


@lru_cache(maxsize=65536)
def _mirror_tuple(blocks: Blocks) -> Blocks:
    return tuple(b.mirror() for b in reversed(blocks))


def format_blocks(blocks: Sequence[Block]) -> str:
    return " + ".join(map(str, blocks)) if blocks else "0"


# -- ordinal helpers ------------------------------------------------------------


def split_leading(a: Ordinal) -> Tuple[Ordinal, int, Ordinal]:
    """Return ``(e, c, rest)`` with ``a = w^e * c + rest`` and ``rest < w^e``."""
    e, c = a.terms[0]
    return e, c, Ordinal(a.terms[1:])


def split_by_power(x: Ordinal, e: Ordinal) -> Tuple[int, Ordinal]:
    """For x < w^e * c return ``(j, g)`` with ``x = w^e * j + g`` and ``g < w^e``."""
    if x and x.leading_exponent == e:
        return x.leading_coefficient, Ordinal(x.terms[1:])
    return 0, x


def is_omega_power(a: Ordinal) -> bool:
    """a = w^e for some e >= 1."""
    return a.is_power() and bool(a.leading_exponent)


# -- rules ------------------------------------------------------------------------


@dataclass(frozen=True)
class Rule:
    """A local rewrite ``width`` blocks wide.

    ``build`` returns the replacement blocks or None when the rule does not
    apply.  ``forward`` and ``backward`` map local elements between the two
    sides; they receive the before-blocks as context.
    """

    name: str
    width: int
    build: Callable[[Blocks], Optional[Blocks]]
    forward: Callable[[Blocks, Tuple], Tuple]
    backward: Callable[[Blocks, Tuple], Tuple]


def _mirrored(rule: Rule, name: str) -> Rule:
    @lru_cache(maxsize=4096)
    def build(before):
        out = rule.build(mirror_blocks(before))
        return None if out is None else mirror_blocks(out)

    def forward(before, elem):
        mb = mirror_blocks(before)
        after = build(before)
        i, x = elem
        j, y = rule.forward(mb, (len(before) - 1 - i, x))
        return (len(after) - 1 - j, y)

    def backward(before, elem):
        mb = mirror_blocks(before)
        after = build(before)
        j, y = elem
        i, x = rule.backward(mb, (len(after) - 1 - j, y))
        return (len(before) - 1 - i, x)

    return Rule(name, rule.width, build, forward, backward)


# flip: R(n) -> O(n) for finite n

def _flip_build(b):
    (blk,) = b
    if blk.kind == R and blk.param.is_finite():
        return (Block(O, blk.param),)
    return None


def _flip_fwd(b, elem):
    n = int(b[0].param)
    return (0, Ordinal.of(n - 1 - int(elem[1])))


flip_finite_reversed = Rule("flip-finite-reversed", 1, _flip_build, _flip_fwd, _flip_fwd)


# merge: O(a) + O(b) -> O(a + b)

def _merge_build(b):
    x, y = b
    if x.kind == O and y.kind == O:
        return (Block(O, x.param + y.param),)
    return None


def _merge_fwd(b, elem):
    i, g = elem
    return (0, g) if i == 0 else (0, b[0].param + g)


def _merge_bwd(b, elem):
    _, g = elem
    a = b[0].param
    return (0, g) if g < a else (1, a.left_subtract(g))


merge_ordinals = Rule("merge-ordinals", 2, _merge_build, _merge_fwd, _merge_bwd)
merge_reversed = _mirrored(merge_ordinals, "merge-reversed")


# absorb: R(g) + O(n) -> R(g) for infinite g and finite n

def _absorb_fin_build(b):
    x, y = b
    if x.kind == R and not x.param.is_finite() and y.kind == O and y.param.is_finite():
        return (Block(R, x.param),)
    return None


def _absorb_fin_fwd(b, elem):
    n = int(b[1].param)
    i, g = elem
    if i == 1:
        return (0, Ordinal.of(n - 1 - int(g)))
    return (0, Ordinal.of(n) + g)


def _absorb_fin_bwd(b, elem):
    n = int(b[1].param)
    _, g = elem
    if g < n:
        return (1, Ordinal.of(n - 1 - int(g)))
    return (0, Ordinal.of(n).left_subtract(g))


absorb_finite_tail = Rule("absorb-finite-tail", 2, _absorb_fin_build, _absorb_fin_fwd, _absorb_fin_bwd)


# shift: O(a) + R(m + k) -> O(a + k) + R(m) with m infinite limit, k finite > 0

def _shift_build(b):
    x, y = b
    if x.kind != O or y.kind != R:
        return None
    mu, k = y.param.split_finite()
    if k == 0 or not mu:
        return None
    return (Block(O, x.param + k), Block(R, mu))


def _shift_fwd(b, elem):
    a = b[0].param
    mu, k = b[1].param.split_finite()
    i, g = elem
    if i == 0:
        return (0, g)
    if g < mu:
        return (1, g)
    j = int(mu.left_subtract(g))
    return (0, a + (k - 1 - j))


def _shift_bwd(b, elem):
    a = b[0].param
    mu, k = b[1].param.split_finite()
    i, g = elem
    if i == 1:
        return (1, g)
    if g < a:
        return (0, g)
    j = int(a.left_subtract(g))
    return (1, mu + (k - 1 - j))


shift_reversed_head = Rule("shift-reversed-head", 2, _shift_build, _shift_fwd, _shift_bwd)


# absorb: P(w^t) + O(w^t * c + r) -> P(w^t) + O(r)

def _absorb_p_build(b):
    x, y = b
    if x.kind != P or y.kind != O or not is_omega_power(x.param) or not y.param:
        return None
    t = x.param.leading_exponent
    e, c, rest = split_leading(y.param)
    if e != t:
        return None
    return (x, Block(O, rest)) if rest else (x,)


def _absorb_p_fwd(b, elem):
    p = b[0].param
    t = p.leading_exponent
    _, c, rest = split_leading(b[1].param)
    i, x = elem
    if i == 0:
        k, g = x
        return (0, (k + c, g))
    j, g = split_by_power(x, t)
    if j < c:
        return (0, (c - 1 - j, g))
    return (1, (p * c).left_subtract(x))


def _absorb_p_bwd(b, elem):
    p = b[0].param
    _, c, rest = split_leading(b[1].param)
    i, x = elem
    if i == 1:
        return (1, p * c + x)
    k, g = x
    if k >= c:
        return (0, (k - c, g))
    return (1, p * (c - 1 - k) + g)


absorb_power_head = Rule("absorb-power-head", 2, _absorb_p_build, _absorb_p_fwd, _absorb_p_bwd)
absorb_power_tail = _mirrored(absorb_power_head, "absorb-power-tail")


# regroup: P(a) -> P(w^e) + O(rest) for a = w^e * c + rest, or R(w) for finite a

def _regroup_build(b):
    (x,) = b
    if x.kind != P or not x.param or is_omega_power(x.param):
        return None
    if x.param.is_finite():
        return (Block(R, OMEGA),)
    e, c, rest = split_leading(x.param)
    q = Ordinal.omega_power(e)
    return (Block(P, q), Block(O, rest)) if rest else (Block(P, q),)


def _regroup_fwd(b, elem):
    a = b[0].param
    _, (k, x) = elem
    if a.is_finite():
        n = int(a)
        return (0, Ordinal.of(k * n + (n - 1 - int(x))))
    e, c, rest = split_leading(a)
    q = Ordinal.omega_power(e, c)
    if x < q:
        pos = rest + x
        j, g = split_by_power(pos, e)
        return (0, (k * c + (c - 1 - j), g))
    r = q.left_subtract(x)
    if k == 0:
        return (1, r)
    return (0, ((k - 1) * c + (c - 1), r))


def _regroup_bwd(b, elem):
    a = b[0].param
    i, y = elem
    if a.is_finite():
        n = int(a)
        m = int(y)
        return (0, (m // n, Ordinal.of(n - 1 - m % n)))
    e, c, rest = split_leading(a)
    q = Ordinal.omega_power(e, c)
    if i == 1:
        return (0, (0, q + y))
    kk, g = y
    k, j = divmod(kk, c)
    j = c - 1 - j
    pos = Ordinal.omega_power(e, j) + g if j else g
    if pos < rest:
        return (0, (k + 1, q + pos))
    return (0, (k, rest.left_subtract(pos)))


regroup_power_head = Rule("regroup-power-head", 1, _regroup_build, _regroup_fwd, _regroup_bwd)
regroup_power_tail = _mirrored(regroup_power_head, "regroup-power-tail")


RULES: Tuple[Rule, ...] = (
    regroup_power_head,
    regroup_power_tail,
    flip_finite_reversed,
    merge_ordinals,
    merge_reversed,
    absorb_finite_tail,
    shift_reversed_head,
    absorb_power_head,
    absorb_power_tail,
)


@dataclass(frozen=True)
class RewriteStep:
    rule: str
    position: int
    before: Blocks
    after: Blocks

    def __str__(self) -> str:
        return f"{self.rule} at {self.position}: {format_blocks(self.before)} => {format_blocks(self.after)}"


RULES_BY_NAME = {r.name: r for r in RULES}

MAX_STEPS = 100_000


def drop_empty(blocks: Sequence[Block]) -> Blocks:
    return tuple(b for b in blocks if not b.is_empty())


def rewrite(blocks: Sequence[Block]) -> Tuple[Blocks, List[RewriteStep]]:
    """Apply the rules to a fixed point, highest priority and leftmost first."""
    current = drop_empty(blocks)
    steps: List[RewriteStep] = []
    while True:
        if len(steps) > MAX_STEPS:
            raise RuntimeError("rewriting did not terminate")
        for rule in RULES:
            hit = None
            for i in range(len(current) - rule.width + 1):
                before = current[i:i + rule.width]
                after = rule.build(before)
                if after is not None:
                    hit = (i, before, after)
                    break
            if hit is not None:
                i, before, after = hit
                steps.append(RewriteStep(rule.name, i, before, after))
                current = current[:i] + after + current[i + rule.width:]
                break
        else:
            return current, steps


def measure(blocks: Sequence[Block]) -> Tuple:
    """Termination measure; every rule strictly decreases it lexicographically.

    Components: non-power P/Ps blocks, number of blocks, the finite parts
    still sitting at the bottom of R blocks, and finally the multiset of O/R
    parameters (as a descending tuple).  Regrouping lowers the first, merges
    and finite absorption the second, flips and shifts the third, and power
    absorption the last.
    """
    irregular = sum(1 for b in blocks if b.kind in (P, PS) and not is_omega_power(b.param))
    movable = sum(b.param.split_finite()[1] for b in blocks if b.kind == R)
    params = tuple(sorted((b.param for b in blocks if b.kind in (O, R)), reverse=True))
    return (irregular, len(blocks), movable, params)
