"""Reversibility of cardinal sequences.

A sequence is given by explicit ``(value, multiplicity)`` entries plus
arithmetic progressions of values, each member occurring a fixed finite
number of times.  The decision follows the numerical-semigroup criterion:
the sequence is reversible iff it is finite-to-one, or all its values are
natural, the set K of values occurring infinitely often is independent, and
gcd(K) divides only finitely many values.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Sequence, Tuple, Union

from .errors import InputError


@dataclass(frozen=True, order=True)
class Aleph:
    """Opaque infinite cardinal aleph_k; no arithmetic is defined on it."""

    index: int = 0

    def __post_init__(self):
        if self.index < 0:
            raise ValueError("aleph index must be non-negative")

    def __str__(self) -> str:
        return f"aleph_{self.index}"


ALEPH_0 = Aleph(0)

Cardinal = Union[int, Aleph]


def _value_key(v: Cardinal):
    return (1, v.index) if isinstance(v, Aleph) else (0, v)


def format_cardinal(v: Cardinal) -> str:
    if isinstance(v, Aleph):
        return "inf" if v == ALEPH_0 else str(v)
    return str(v)


def format_multiplicity(m: Cardinal) -> str:
    return "inf" if isinstance(m, Aleph) else str(m)


def add_multiplicities(a: Cardinal, b: Cardinal) -> Cardinal:
    if isinstance(a, Aleph) or isinstance(b, Aleph):
        return ALEPH_0
    return a + b


@dataclass(frozen=True)
class Progression:
    """Values first + step*n for n = 0, 1, ..., each occurring ``times`` times."""

    first: int
    step: int
    times: int = 1

    def __post_init__(self):
        for name in ("first", "step", "times"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, int) or v < 1:
                raise ValueError(f"progression {name} must be a natural number >= 1")

    def member(self, n: int) -> int:
        return self.first + self.step * n

    def contains(self, value: int) -> bool:
        return value >= self.first and (value - self.first) % self.step == 0

    def __str__(self) -> str:
        return f"progression first {self.first} step {self.step} times {self.times}"


@dataclass(frozen=True)
class CardinalSequence:
    entries: Tuple[Tuple[Cardinal, Cardinal], ...] = ()
    progressions: Tuple[Progression, ...] = ()

    def __post_init__(self):
        seen = set()
        for value, mult in self.entries:
            _check_cardinal(value, "value")
            _check_cardinal(mult, "multiplicity")
            if isinstance(mult, Aleph) and mult != ALEPH_0:
                raise ValueError("the only infinite multiplicity is aleph_0")
            if value in seen:
                raise ValueError(f"value {value} listed twice; use from_pairs to merge")
            seen.add(value)

    @classmethod
    def from_pairs(cls, pairs: Iterable[Tuple[Cardinal, Cardinal]],
                   progressions: Iterable[Progression] = ()) -> "CardinalSequence":
        merged: dict = {}
        for value, mult in pairs:
            merged[value] = add_multiplicities(merged[value], mult) if value in merged else mult
        entries = tuple(sorted(merged.items(), key=lambda vm: _value_key(vm[0])))
        return cls(entries, tuple(progressions))

    def multiplicity(self, value: Cardinal) -> Cardinal:
        total: Cardinal = 0
        for v, m in self.entries:
            if v == value:
                total = add_multiplicities(total, m)
        if isinstance(value, int):
            for p in self.progressions:
                if p.contains(value):
                    total = add_multiplicities(total, p.times)
        return total

    def infinite_values(self) -> List[Cardinal]:
        """Values with multiplicity aleph_0 (only explicit entries can have it)."""
        return [v for v, m in self.entries if isinstance(m, Aleph)]

    def is_finite_to_one(self) -> bool:
        return not self.infinite_values()

    def all_natural(self) -> bool:
        return all(isinstance(v, int) for v, _ in self.entries)

    def to_text(self) -> str:
        lines = [f"value {format_cardinal(v)} times {format_multiplicity(m)}" for v, m in self.entries]
        lines.extend(str(p) for p in self.progressions)
        return "\n".join(lines) + "\n"


def _check_cardinal(v, what: str) -> None:
    if isinstance(v, Aleph):
        return
    if isinstance(v, bool) or not isinstance(v, int) or v < 1:
        raise ValueError(f"{what} must be a natural number >= 1 or an aleph, got {v!r}")


# -- numerical semigroups -------------------------------------------------------


def semigroup_member(n: int, generators: Iterable[int]) -> Optional[Tuple[int, ...]]:
    """A representation of n as a nonempty sum of generators, or None.

    The representation is returned as an ascending tuple of summands.
    """
    gens = sorted(set(generators))
    if n < 1 or not gens:
        return None
    parent = [0] * (n + 1)
    reach = [False] * (n + 1)
    reach[0] = True
    for m in range(1, n + 1):
        for g in gens:
            if g > m:
                break
            if reach[m - g]:
                reach[m] = True
                parent[m] = g
                break
    if not reach[n]:
        return None
    parts = []
    while n:
        parts.append(parent[n])
        n -= parent[n]
    return tuple(sorted(parts))


@dataclass(frozen=True)
class Independence:
    independent: bool
    violator: Optional[int] = None
    representation: Optional[Tuple[int, ...]] = None

    def __bool__(self) -> bool:
        return self.independent


def is_independent(K: Iterable[int]) -> Independence:
    members = sorted(set(K))
    if not members or members[0] < 1:
        raise ValueError("K must be a nonempty set of positive naturals")
    for n in members:
        rep = semigroup_member(n, [k for k in members if k != n])
        if rep is not None:
            return Independence(False, n, rep)
    return Independence(True)


@dataclass(frozen=True)
class GcdEvidence:
    """Progression whose members first_index, first_index + period, ... are divisible by g."""

    g: int
    progression: Progression
    first_index: int
    period: int

    def divisible_members(self, count: int) -> List[int]:
        return [self.progression.member(self.first_index + k * self.period) for k in range(count)]


def gcd_divides_infinitely_many(g: int, seq: CardinalSequence) -> Optional[GcdEvidence]:
    """Evidence that g divides infinitely many values of seq, or None.

    Explicit entries form a finite set, so only progressions matter; the
    congruence first + step*n = 0 (mod g) is solvable iff gcd(step, g)
    divides first, and then it holds on a whole residue class of n.
    """
    if g < 1:
        raise ValueError("g must be positive")
    for p in seq.progressions:
        d = math.gcd(p.step, g)
        if p.first % d:
            continue
        n0 = next(n for n in range(g) if p.member(n) % g == 0)
        return GcdEvidence(g, p, n0, g // d)
    return None


# -- the decision -----------------------------------------------------------------

FINITE_TO_ONE = "finite-to-one"
INDEPENDENT_GCD_OK = "independent-and-gcd-ok"
NOT_ALL_NATURAL = "not-all-natural"
NOT_INDEPENDENT = "K-not-independent"
GCD_DIVIDES = "gcd-divides-infinitely-many"


@dataclass(frozen=True)
class SeqVerdict:
    reversible: bool
    reason: str
    K: Tuple[int, ...] = ()
    gcd: Optional[int] = None
    independence: Optional[Independence] = None
    gcd_evidence: Optional[GcdEvidence] = None
    offending_value: Optional[Cardinal] = None

    def evidence_lines(self) -> List[str]:
        lines = []
        if self.K:
            lines.append("K: " + " ".join(map(str, self.K)))
        if self.gcd is not None:
            lines.append(f"gcd: {self.gcd}")
        if self.offending_value is not None:
            lines.append(f"offending-value: {self.offending_value}")
        ind = self.independence
        if ind is not None and not ind.independent:
            lines.append(f"violator: {ind.violator}")
            lines.append("representation: " + "+".join(map(str, ind.representation)))
        ev = self.gcd_evidence
        if ev is not None:
            lines.append(f"progression: first {ev.progression.first} step {ev.progression.step}")
            lines.append(f"divisible-from-index: {ev.first_index}")
            lines.append(f"period: {ev.period}")
            lines.append("examples: " + " ".join(map(str, ev.divisible_members(3))))
        return lines


def decide_reversible(seq: CardinalSequence) -> SeqVerdict:
    infinite = seq.infinite_values()
    if not infinite:
        return SeqVerdict(True, FINITE_TO_ONE)
    for v, _ in seq.entries:
        if isinstance(v, Aleph):
            return SeqVerdict(False, NOT_ALL_NATURAL, offending_value=v)
    K = tuple(sorted(infinite))
    ind = is_independent(K)
    if not ind:
        return SeqVerdict(False, NOT_INDEPENDENT, K=K, independence=ind)
    g = math.gcd(*K)
    ev = gcd_divides_infinitely_many(g, seq)
    if ev is not None:
        return SeqVerdict(False, GCD_DIVIDES, K=K, gcd=g, independence=ind, gcd_evidence=ev)
    return SeqVerdict(True, INDEPENDENT_GCD_OK, K=K, gcd=g, independence=ind)


# -- file format --------------------------------------------------------------------

_ALEPH_RE = re.compile(r"aleph_(\d+)$")


def parse_cardinal(token: str, *, line: Optional[int] = None, source: Optional[str] = None) -> Cardinal:
    if token in ("inf", "aleph_0"):
        return ALEPH_0
    m = _ALEPH_RE.match(token)
    if m:
        return Aleph(int(m.group(1)))
    if token.isdigit() and int(token) >= 1:
        return int(token)
    raise InputError(f"expected a positive natural, 'inf' or aleph_k, got {token!r}", line, source)


def _parse_nat(token: str, line: int, source: Optional[str]) -> int:
    if token.isdigit() and int(token) >= 1:
        return int(token)
    raise InputError(f"expected a positive natural, got {token!r}", line, source)


def parse_sequence(text: str, source: Optional[str] = None) -> CardinalSequence:
    pairs, progs = [], []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        words = raw.split("#", 1)[0].split()
        if not words:
            continue
        if words[0] == "value":
            if len(words) != 4 or words[2] != "times":
                raise InputError("expected 'value <v> times <m>'", lineno, source)
            value = parse_cardinal(words[1], line=lineno, source=source)
            mult = parse_cardinal(words[3], line=lineno, source=source)
            if isinstance(mult, Aleph) and mult != ALEPH_0:
                raise InputError("the only infinite multiplicity is inf (aleph_0)", lineno, source)
            pairs.append((value, mult))
        elif words[0] == "progression":
            if len(words) != 7 or words[1::2] != ["first", "step", "times"]:
                raise InputError("expected 'progression first <a> step <b> times <c>'", lineno, source)
            if words[6] in ("inf",) or words[6].startswith("aleph"):
                raise InputError("progression multiplicity must be finite", lineno, source)
            progs.append(Progression(*(_parse_nat(words[i], lineno, source) for i in (2, 4, 6))))
        else:
            raise InputError(f"unknown keyword {words[0]!r}", lineno, source)
    return CardinalSequence.from_pairs(pairs, progs)
