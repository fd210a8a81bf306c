"""Computable presentations of block sums on the natural numbers.

Every block sum is enumerated as element 0, 1, 2, ... with a computable
order, so a claimed isomorphism can be tested on the first W elements of
both sides: the forward map must be order-preserving there, and both
round trips must be the identity (which also shows the backward map hits
every index below W).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache, total_ordering
from typing import Callable, List, Optional, Sequence, Tuple

from .blocks import O, P, PS, R, Block, Blocks, RULES_BY_NAME, RewriteStep
from .ordinals import ZERO, Ordinal

DEFAULT_WINDOW = 10_000


# -- pairing -----------------------------------------------------------------------


def pair(a: int, b: int) -> int:
    s = a + b
    return s * (s + 1) // 2 + b


def unpair(z: int) -> Tuple[int, int]:
    s = (math.isqrt(8 * z + 1) - 1) // 2
    b = z - s * (s + 1) // 2
    return s - b, b


def encode_tuple(xs: Sequence[int]) -> int:
    if len(xs) == 1:
        return xs[0]
    return pair(xs[0], encode_tuple(xs[1:]))


def decode_tuple(z: int, k: int) -> Tuple[int, ...]:
    out = []
    for _ in range(k - 1):
        a, z = unpair(z)
        out.append(a)
    out.append(z)
    return tuple(out)


def encode_multiset(ms: Sequence[int]) -> int:
    return sum(1 << (m + i) for i, m in enumerate(sorted(ms)))


def decode_multiset(z: int) -> List[int]:
    out, i, pos = [], 0, 0
    while z:
        if z & 1:
            out.append(pos - i)
            i += 1
        z >>= 1
        pos += 1
    return out


# -- ordinals ----------------------------------------------------------------------


class PowerPresentation:
    """Elements of w^e for e >= 1 (ordinals below w^e)."""

    def __init__(self, e: Ordinal):
        self.e = e
        self.finite_exp = int(e) if e.is_finite() else None
        self.sub = None if self.finite_exp is not None else ordinal_presentation(e)

    def element(self, i: int) -> Ordinal:
        if self.finite_exp is not None:
            k = self.finite_exp
            coeffs = decode_tuple(i, k)
            terms = [(Ordinal.of(k - 1 - j), c) for j, c in enumerate(coeffs) if c]
            return Ordinal(tuple(terms))
        ms = decode_multiset(i)
        counts = {}
        for m in ms:
            eps = self.sub.element(m)
            counts[eps] = counts.get(eps, 0) + 1
        return Ordinal(tuple(sorted(counts.items(), key=lambda t: t[0], reverse=True)))

    def index(self, d: Ordinal) -> int:
        if self.finite_exp is not None:
            k = self.finite_exp
            coeffs = [0] * k
            for ex, c in d.terms:
                coeffs[k - 1 - int(ex)] = c
            return encode_tuple(coeffs)
        ms = []
        for ex, c in d.terms:
            ms.extend([self.sub.index(ex)] * c)
        return encode_multiset(ms)


class OrdinalPresentation:
    """Elements of an ordinal a: finite segments first, then the infinite
    segments w^e taken in turn."""

    def __init__(self, a: Ordinal):
        self.a = a
        self.starts: List[Ordinal] = []
        self.exps: List[Ordinal] = []
        start = ZERO
        for e, c in a.terms:
            piece = Ordinal.omega_power(e)
            for _ in range(c):
                self.starts.append(start)
                self.exps.append(e)
                start = start + piece
        self.finite_segs = [j for j, e in enumerate(self.exps) if not e]
        self.infinite_segs = [j for j, e in enumerate(self.exps) if e]
        self.powers = {e: PowerPresentation(e) for e in set(self.exps) if e}
        self.size = None if self.infinite_segs else len(self.finite_segs)

    def element(self, i: int) -> Ordinal:
        nf = len(self.finite_segs)
        if i < nf:
            return self.starts[self.finite_segs[i]]
        if not self.infinite_segs:
            raise IndexError(i)
        r = i - nf
        m = len(self.infinite_segs)
        j = self.infinite_segs[r % m]
        return self.starts[j] + self.powers[self.exps[j]].element(r // m)

    def _segment(self, g: Ordinal) -> int:
        lo, hi = 0, len(self.starts) - 1
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if self.starts[mid] <= g:
                lo = mid
            else:
                hi = mid - 1
        return lo

    def index(self, g: Ordinal) -> int:
        j = self._segment(g)
        if not self.exps[j]:
            return self.finite_segs.index(j)
        local = self.powers[self.exps[j]].index(self.starts[j].left_subtract(g))
        m = len(self.infinite_segs)
        return len(self.finite_segs) + local * m + self.infinite_segs.index(j)

    def contains(self, g) -> bool:
        return isinstance(g, Ordinal) and g < self.a


@lru_cache(maxsize=4096)
def ordinal_presentation(a: Ordinal) -> OrdinalPresentation:
    return OrdinalPresentation(a)


@total_ordering
class Desc:
    """Sort key reversing the order of the wrapped value."""

    __slots__ = ("v",)

    def __init__(self, v):
        self.v = v

    def __eq__(self, other):
        return self.v == other.v

    def __lt__(self, other):
        return other.v < self.v


# -- blocks and sums -----------------------------------------------------------------


class BlockPresentation:
    def __init__(self, block: Block):
        self.block = block
        self.ord = ordinal_presentation(block.param)
        n = self.ord.size
        if block.kind in (O, R):
            self.size = n
        else:
            self.size = None if block.param else 0

    def element(self, i: int):
        if self.block.kind in (O, R):
            return self.ord.element(i)
        n = self.ord.size
        if n is not None:
            return (i // n, self.ord.element(i % n))
        k, j = unpair(i)
        return (k, self.ord.element(j))

    def index(self, x) -> int:
        if self.block.kind in (O, R):
            return self.ord.index(x)
        k, g = x
        n = self.ord.size
        if n is not None:
            return k * n + self.ord.index(g)
        return pair(k, self.ord.index(g))

    def key(self, x):
        kind = self.block.kind
        if kind == O:
            return x.sort_key
        if kind == R:
            return Desc(x.sort_key)
        k, g = x
        return (-k, g.sort_key) if kind == P else (k, Desc(g.sort_key))

    def contains(self, x) -> bool:
        if self.block.kind in (O, R):
            return self.ord.contains(x)
        return (isinstance(x, tuple) and len(x) == 2 and isinstance(x[0], int)
                and x[0] >= 0 and self.ord.contains(x[1]))


class SumPresentation:
    """Presentation of a finite sum of blocks; elements are ``(position, x)``."""

    def __init__(self, blocks: Sequence[Block]):
        self.blocks = tuple(blocks)
        self.parts = [BlockPresentation(b) for b in self.blocks]
        self.finite = [(i, p) for i, p in enumerate(self.parts) if p.size is not None]
        self.infinite = [i for i, p in enumerate(self.parts) if p.size is None]
        self.offsets = []
        total = 0
        for i, p in self.finite:
            self.offsets.append(total)
            total += p.size
        self.finite_total = total
        self.size = None if self.infinite else total

    def element(self, n: int):
        if n < self.finite_total:
            for (i, p), off in zip(self.finite, self.offsets):
                if n < off + p.size:
                    return (i, p.element(n - off))
        if not self.infinite:
            raise IndexError(n)
        r = n - self.finite_total
        m = len(self.infinite)
        i = self.infinite[r % m]
        return (i, self.parts[i].element(r // m))

    def index(self, elem) -> int:
        i, x = elem
        p = self.parts[i]
        if p.size is not None:
            k = [j for j, _ in self.finite].index(i)
            return self.offsets[k] + p.index(x)
        m = len(self.infinite)
        return self.finite_total + p.index(x) * m + self.infinite.index(i)

    def key(self, elem):
        i, x = elem
        return (i, self.parts[i].key(x))

    def contains(self, elem) -> bool:
        return (isinstance(elem, tuple) and len(elem) == 2 and isinstance(elem[0], int)
                and 0 <= elem[0] < len(self.parts) and self.parts[elem[0]].contains(elem[1]))

    def first(self, window: int):
        bound = window if self.size is None else min(window, self.size)
        return [self.element(n) for n in range(bound)]


# -- the window oracle -------------------------------------------------------------------


@dataclass(frozen=True)
class WindowReport:
    ok: bool
    checked_forward: int
    checked_backward: int
    message: str = ""

    def __bool__(self) -> bool:
        return self.ok


def check_isomorphism(before: Sequence[Block], after: Sequence[Block],
                      phi: Callable, psi: Callable, window: int = DEFAULT_WINDOW) -> WindowReport:
    """Test that phi: before -> after is an order isomorphism with inverse psi
    on the first ``window`` elements of each side."""
    pre, post = SumPresentation(before), SumPresentation(after)
    if (pre.size is None) != (post.size is None) or (pre.size is not None and pre.size != post.size):
        return WindowReport(False, 0, 0, f"sizes differ: {pre.size} vs {post.size}")
    xs = pre.first(window)
    pairs = []
    for x in xs:
        y = phi(x)
        if not post.contains(y):
            return WindowReport(False, len(pairs), 0, f"{x} is sent outside the target: {y}")
        if psi(y) != x:
            return WindowReport(False, len(pairs), 0, f"round trip fails at {x}")
        pairs.append((pre.key(x), post.key(y)))
    pairs.sort(key=lambda kv: kv[0])
    for (_, a), (_, b) in zip(pairs, pairs[1:]):
        if not a < b:
            return WindowReport(False, len(pairs), 0, "forward map is not order-preserving")
    ys = post.first(window)
    for n, y in enumerate(ys):
        x = psi(y)
        if not pre.contains(x) or phi(x) != y:
            return WindowReport(False, len(pairs), n, f"element {y} of the target is not hit")
    return WindowReport(True, len(pairs), len(ys))


_checked_steps: dict = {}


def check_rewrite(step: RewriteStep, window: int = DEFAULT_WINDOW) -> WindowReport:
    """Window-check one rule application; results are cached per instance."""
    key = (step.rule, step.before, window)
    hit = _checked_steps.get(key)
    if hit is not None:
        return hit
    rule = RULES_BY_NAME[step.rule]
    before = step.before
    report = check_isomorphism(before, step.after,
                               lambda x: rule.forward(before, x),
                               lambda y: rule.backward(before, y), window)
    if len(_checked_steps) < 100_000:
        _checked_steps[key] = report
    return report


# -- even/odd split ---------------------------------------------------------------------


def decompose(blocks: Sequence[Block], elem):
    """Split an element into (omega-block label, position in that block)."""
    i, x = elem
    kind = blocks[i].kind
    if kind in (O, R):
        lam, n = x.split_finite()
        return (i, lam), n
    k, g = x
    lam, n = g.split_finite()
    return (i, k, lam), n


def recompose(blocks: Sequence[Block], label, n: int):
    if len(label) == 2:
        i, lam = label
        return (i, lam + n)
    i, k, lam = label
    return (i, (k, lam + n))


def split_map(blocks: Sequence[Block], parity: int):
    def phi(elem):
        label, n = decompose(blocks, elem)
        return recompose(blocks, label, 2 * n + parity)
    return phi


def check_even_odd_split(blocks: Sequence[Block], window: int = DEFAULT_WINDOW) -> Tuple[WindowReport, WindowReport]:
    """Check that n -> 2n and n -> 2n+1 inside every w- or w*-block embed the
    order onto the even and odd halves respectively."""
    pres = SumPresentation(blocks)
    if pres.size is not None:
        bad = WindowReport(False, 0, 0, "a finite order has no even/odd split")
        return bad, bad
    for b in blocks:
        if b.kind in (O, R) and b.param.is_successor():
            bad = WindowReport(False, 0, 0, f"{b} has a finite tail")
            return bad, bad
    xs = pres.first(window)
    reports = []
    for parity in (0, 1):
        phi = split_map(blocks, parity)
        pairs = []
        message = ""
        for x in xs:
            label, n = decompose(blocks, x)
            if recompose(blocks, label, n) != x:
                message = f"decomposition of {x} does not round-trip"
                break
            y = phi(x)
            if not pres.contains(y) or decompose(blocks, y)[1] % 2 != parity:
                message = f"{x} is sent outside the half: {y}"
                break
            pairs.append((pres.key(x), pres.key(y)))
        if not message:
            pairs.sort(key=lambda kv: kv[0])
            if any(not a < b for (_, a), (_, b) in zip(pairs, pairs[1:])):
                message = "split map is not order-preserving"
        hit = 0
        if not message:
            for y in xs:
                label, n = decompose(blocks, y)
                if n % 2 != parity:
                    continue
                x = recompose(blocks, label, (n - parity) // 2)
                if phi(x) != y:
                    message = f"{y} in the half is not hit"
                    break
                hit += 1
        reports.append(WindowReport(not message, len(pairs), hit, message))
    return reports[0], reports[1]
