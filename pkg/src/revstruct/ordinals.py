"""Cantor normal form arithmetic for ordinals below epsilon_0.

An ordinal is stored as a descending tuple of ``(exponent, coefficient)``
terms where every exponent is itself an :class:`Ordinal`.  The empty tuple is
zero.  Plain ``int`` operands are accepted wherever an ordinal is expected.
"""

from __future__ import annotations

from functools import total_ordering
from typing import Iterator, Tuple, Union

MAX_DEPTH = 48


class OrdinalOverflow(ArithmeticError):
    """Raised when a result would need exponent towers beyond MAX_DEPTH."""


OrdinalLike = Union["Ordinal", int]


@total_ordering
class Ordinal:
    __slots__ = ("terms", "_hash", "_depth", "_key")

    def __init__(self, terms: Tuple[Tuple["Ordinal", int], ...] = ()):
        self.terms = terms
        self._hash = None
        self._key = None
        self._depth = 1 + max((e._depth for e, _ in terms), default=-1) if terms else 0
        if self._depth > MAX_DEPTH:
            raise OrdinalOverflow(f"exponent tower deeper than {MAX_DEPTH}")

    # -- construction -------------------------------------------------------

    @classmethod
    def of(cls, value: OrdinalLike) -> "Ordinal":
        if isinstance(value, Ordinal):
            return value
        if isinstance(value, bool) or not isinstance(value, int):
            raise TypeError(f"cannot interpret {value!r} as an ordinal")
        if value < 0:
            raise ValueError("negative ordinals do not exist")
        if value < len(_SMALL):
            return _SMALL[value]
        return cls(((ZERO, value),))

    @classmethod
    def omega_power(cls, exponent: OrdinalLike, coefficient: int = 1) -> "Ordinal":
        if coefficient < 0:
            raise ValueError("coefficient must be non-negative")
        if coefficient == 0:
            return ZERO
        return cls(((Ordinal.of(exponent), coefficient),))

    # -- predicates and accessors -------------------------------------------

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_finite(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and not self.terms[0][0])

    def is_limit(self) -> bool:
        return bool(self.terms) and bool(self.terms[-1][0])

    def is_successor(self) -> bool:
        return bool(self.terms) and not self.terms[-1][0]

    def __int__(self) -> int:
        if not self.is_finite():
            raise ValueError(f"{self} is infinite")
        return self.terms[0][1] if self.terms else 0

    @property
    def leading_exponent(self) -> "Ordinal":
        if not self.terms:
            raise ValueError("zero has no leading term")
        return self.terms[0][0]

    @property
    def leading_coefficient(self) -> int:
        if not self.terms:
            raise ValueError("zero has no leading term")
        return self.terms[0][1]

    def split_finite(self) -> Tuple["Ordinal", int]:
        """Return ``(limit_part, n)`` with ``self == limit_part + n``."""
        if self.terms and not self.terms[-1][0]:
            return Ordinal(self.terms[:-1]), self.terms[-1][1]
        return self, 0

    def is_power(self) -> bool:
        return len(self.terms) == 1 and self.terms[0][1] == 1

    def height(self) -> int:
        """Nesting depth of exponents: naturals have height 0, omega height 1."""
        if self.is_finite():
            return 0
        return 1 + max(e.height() for e, _ in self.terms)

    # -- comparison ---------------------------------------------------------

    @property
    def sort_key(self) -> tuple:
        """Nested tuple whose lexicographic order is the ordinal order."""
        if self._key is None:
            self._key = tuple((e.sort_key, c) for e, c in self.terms)
        return self._key

    def _cmp(self, other: "Ordinal") -> int:
        if self is other:
            return 0
        a, b = self.sort_key, other.sort_key
        return (a > b) - (a < b)

    def _cmp_terms(self, other: "Ordinal") -> int:
        # direct CNF comparison; kept as a cross-check for sort_key
        for (e1, c1), (e2, c2) in zip(self.terms, other.terms):
            if e1 is not e2:
                k = e1._cmp_terms(e2)
                if k:
                    return k
            if c1 != c2:
                return -1 if c1 < c2 else 1
        return (len(self.terms) > len(other.terms)) - (len(self.terms) < len(other.terms))

    def compare(self, other: OrdinalLike) -> int:
        """Three-way comparison: -1, 0 or 1."""
        return self._cmp(Ordinal.of(other))

    def __eq__(self, other) -> bool:
        if isinstance(other, int) and not isinstance(other, bool):
            if other < 0:
                return False
            other = Ordinal.of(other)
        if not isinstance(other, Ordinal):
            return NotImplemented
        return self.terms == other.terms

    def __lt__(self, other) -> bool:
        if isinstance(other, int) and not isinstance(other, bool):
            if other < 0:
                return False
            other = Ordinal.of(other)
        if not isinstance(other, Ordinal):
            return NotImplemented
        return self.sort_key < other.sort_key

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self.terms) if self.terms else 0
        return self._hash

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other: OrdinalLike) -> "Ordinal":
        other = Ordinal.of(other)
        if not other.terms:
            return self
        e, c = other.terms[0]
        kept = []
        for term in self.terms:
            k = term[0]._cmp(e)
            if k > 0:
                kept.append(term)
            elif k == 0:
                return Ordinal(tuple(kept) + ((e, term[1] + c),) + other.terms[1:])
            else:
                break
        return Ordinal(tuple(kept) + other.terms)

    def __radd__(self, other: OrdinalLike) -> "Ordinal":
        return Ordinal.of(other) + self

    def __mul__(self, other: OrdinalLike) -> "Ordinal":
        other = Ordinal.of(other)
        if not self.terms or not other.terms:
            return ZERO
        e1, c1 = self.terms[0]
        result = ZERO
        for e, c in other.terms:
            if e:
                part = Ordinal(((e1 + e, c),))
            else:
                part = Ordinal(((e1, c1 * c),) + self.terms[1:])
            result = result + part
        return result

    def __rmul__(self, other: OrdinalLike) -> "Ordinal":
        return Ordinal.of(other) * self

    def __pow__(self, other: OrdinalLike) -> "Ordinal":
        other = Ordinal.of(other)
        if not other.terms:
            return ONE
        if not self.terms:
            return ZERO
        if self == ONE:
            return ONE
        limit_part, m = other.split_finite()
        if self.is_finite():
            n = int(self)
            head = Ordinal.omega_power(_divide_by_omega(limit_part)) if limit_part else ONE
            return head * Ordinal.of(n ** m)
        head = Ordinal.omega_power(self.leading_exponent * limit_part) if limit_part else ONE
        for _ in range(m):
            head = head * self
        return head

    def __rpow__(self, other: OrdinalLike) -> "Ordinal":
        return Ordinal.of(other) ** self

    def left_subtract(self, other: OrdinalLike) -> "Ordinal":
        """The unique ``x`` with ``self + x == other``; requires ``self <= other``."""
        other = Ordinal.of(other)
        a, b = self.terms, other.terms
        i = 0
        while i < len(a) and i < len(b) and a[i] == b[i]:
            i += 1
        if i == len(a):
            return Ordinal(b[i:])
        if i == len(b):
            raise ValueError(f"{self} exceeds {other}")
        k = a[i][0]._cmp(b[i][0])
        if k < 0:
            return Ordinal(b[i:])
        if k == 0 and a[i][1] < b[i][1]:
            return Ordinal(((b[i][0], b[i][1] - a[i][1]),) + b[i + 1:])
        raise ValueError(f"{self} exceeds {other}")

    # -- printing -----------------------------------------------------------

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return "+".join(_term_str(e, c) for e, c in self.terms)

    def __repr__(self) -> str:
        return f"Ordinal({self})"

    def __iter__(self) -> Iterator[Tuple["Ordinal", int]]:
        return iter(self.terms)


def _term_str(e: Ordinal, c: int) -> str:
    if not e:
        return str(c)
    if e == ONE:
        base = "w"
    elif e.is_finite() or e == OMEGA:
        base = f"w^{e}"
    else:
        base = f"w^({e})"
    return base if c == 1 else f"{base}*{c}"


def _divide_by_omega(limit: Ordinal) -> Ordinal:
    # limit == omega * q; an exponent e >= omega satisfies 1 + e == e
    terms = []
    for e, c in limit.terms:
        if e.is_finite():
            terms.append((Ordinal.of(int(e) - 1), c))
        else:
            terms.append((e, c))
    return Ordinal(tuple(terms))


ZERO = Ordinal(())
ONE = Ordinal(((ZERO, 1),))
OMEGA = Ordinal(((ONE, 1),))
_SMALL = [ZERO, ONE] + [Ordinal(((ZERO, n),)) for n in range(2, 4096)]


def omega_power(exponent: OrdinalLike, coefficient: int = 1) -> Ordinal:
    return Ordinal.omega_power(exponent, coefficient)


def cnf_arith(a: OrdinalLike, b: OrdinalLike, op: str):
    """Dispatch helper mirroring the four CNF operations by name."""
    a, b = Ordinal.of(a), Ordinal.of(b)
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "pow":
        return a ** b
    if op == "cmp":
        return a.compare(b)
    raise ValueError(f"unknown operation {op!r}")
