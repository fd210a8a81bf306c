"""Finite well-founded relations, monotone invariants and fiber certificates."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple, Union

from .cardinals import ALEPH_0, Aleph, add_multiplicities, format_multiplicity
from .errors import InputError
from .families import StructureFamily
from .ordertypes import OtpFamily, parse_order_type, theta_invariants
from .ordinals import Ordinal
from .structures import BinaryStructure, parse_structure


@dataclass(frozen=True)
class FiniteRelation:
    carrier: Tuple[Any, ...]
    pairs: frozenset

    def __post_init__(self):
        if len(set(self.carrier)) != len(self.carrier):
            raise ValueError("carrier elements must be distinct")
        members = set(self.carrier)
        for a, b in self.pairs:
            if a not in members or b not in members:
                raise ValueError(f"pair ({a}, {b}) leaves the carrier")

    @classmethod
    def of(cls, carrier: Iterable, pairs: Iterable = ()) -> "FiniteRelation":
        return cls(tuple(carrier), frozenset(pairs))

    @classmethod
    def from_structure(cls, x: BinaryStructure) -> "FiniteRelation":
        return cls(tuple(x.nodes), frozenset(x.edges))

    def related(self, a, b) -> bool:
        return (a, b) in self.pairs


def parse_relation(text: str, source: Optional[str] = None) -> FiniteRelation:
    return FiniteRelation.from_structure(parse_structure(text, source))


@dataclass(frozen=True)
class WellFoundedness:
    well_founded: bool
    cycle: Optional[Tuple[Any, ...]] = None
    subsets_checked: int = 0

    def __bool__(self) -> bool:
        return self.well_founded


def find_cycle(r: FiniteRelation) -> Optional[Tuple[Any, ...]]:
    """A directed cycle (a loop counts) as a vertex sequence, or None."""
    succ: Dict[Any, List[Any]] = {v: [] for v in r.carrier}
    for a, b in sorted(r.pairs, key=repr):
        succ[a].append(b)
    state = {v: 0 for v in r.carrier}  # 0 new, 1 on stack, 2 done
    for root in r.carrier:
        if state[root]:
            continue
        path = [root]
        iters = [iter(succ[root])]
        state[root] = 1
        while iters:
            nxt = next(iters[-1], None)
            if nxt is None:
                state[path.pop()] = 2
                iters.pop()
            elif state[nxt] == 1:
                return tuple(path[path.index(nxt):])
            elif state[nxt] == 0:
                state[nxt] = 1
                path.append(nxt)
                iters.append(iter(succ[nxt]))
    return None


def minimal_element(r: FiniteRelation, subset: Iterable) -> Optional[Any]:
    """An element m of subset with no x in subset such that x R m."""
    s = list(subset)
    for m in s:
        if not any((x, m) in r.pairs for x in s):
            return m
    return None


def every_subset_has_minimal(r: FiniteRelation) -> Tuple[bool, int, Optional[Tuple]]:
    count = 0
    for k in range(1, len(r.carrier) + 1):
        for s in combinations(r.carrier, k):
            count += 1
            if minimal_element(r, s) is None:
                return False, count, s
    return True, count, None


SUBSET_CROSSCHECK_LIMIT = 4


def is_well_founded(r: FiniteRelation) -> WellFoundedness:
    cycle = find_cycle(r)
    checked = 0
    if len(r.carrier) <= SUBSET_CROSSCHECK_LIMIT:
        ok, checked, _ = every_subset_has_minimal(r)
        if ok != (cycle is None):
            raise AssertionError("cycle search and subset check disagree")
    return WellFoundedness(cycle is None, cycle, checked)


def product_relation(*rels: FiniteRelation) -> FiniteRelation:
    """a R b iff every coordinate is equal or related and some coordinate is related."""
    if not rels:
        raise ValueError("need at least one relation")
    carrier = tuple(product(*(r.carrier for r in rels)))
    pairs = set()
    # candidates per coordinate: stay put or follow a pair
    steps = []
    for r in rels:
        moves: Dict[Any, List[Tuple[Any, bool]]] = {v: [(v, False)] for v in r.carrier}
        for a, b in r.pairs:
            moves[a].append((b, True))
        steps.append(moves)
    for a in carrier:
        for choice in product(*(steps[k][a[k]] for k in range(len(rels)))):
            if any(flag for _, flag in choice):
                pairs.add((a, tuple(v for v, _ in choice)))
    return FiniteRelation(carrier, frozenset(pairs))


# -- invariants -----------------------------------------------------------------------


def _less(a, b) -> bool:
    return a < b


@dataclass(frozen=True)
class Invariant:
    """A map into a well-founded order; ``below`` is the strict order on values."""

    name: str
    evaluate: Callable[[Any], Any]
    below: Callable[[Any, Any], bool] = _less
    domain: str = "structure"

    def __call__(self, x):
        return self.evaluate(x)

    def at_most(self, a, b) -> bool:
        return a == b or self.below(a, b)


def longest_path(x: BinaryStructure) -> int:
    """Vertices on a longest directed path without repeated vertices."""
    succ = x.out_neighbors
    best = 0

    def dfs(v, seen):
        nonlocal best
        best = max(best, len(seen))
        for w in sorted(succ[v]):
            if w not in seen:
                seen.add(w)
                dfs(w, seen)
                seen.discard(w)

    for v in x.nodes:
        dfs(v, {v})
    return best


def _as_expr(x):
    return parse_order_type(x) if isinstance(x, str) else x


def _theta(k: int):
    def evaluate(x):
        t = theta_invariants(_as_expr(x))
        if t is None:
            raise ValueError(f"theta is undefined on {x}")
        return t[k]
    return evaluate


SIZE = Invariant("size", len)
EDGES = Invariant("edges", lambda x: len(x.edges))
LONGEST_PATH = Invariant("longest-path", longest_path)
THETA0 = Invariant("theta0", _theta(0), domain="order-type")
THETA1 = Invariant("theta1", _theta(1), domain="order-type")

BUILTIN_INVARIANTS = {inv.name: inv for inv in (SIZE, EDGES, LONGEST_PATH, THETA0, THETA1)}


def diagonal_invariant(thetas: Sequence[Invariant]) -> Invariant:
    thetas = tuple(thetas)
    if not thetas:
        raise ValueError("the diagonal of no invariants is undefined")
    domains = {t.domain for t in thetas}
    if len(domains) != 1:
        raise ValueError("invariants must share a domain")

    def evaluate(x):
        return tuple(t.evaluate(x) for t in thetas)

    def below(a, b):
        return (all(t.at_most(u, v) for t, u, v in zip(thetas, a, b))
                and any(t.below(u, v) for t, u, v in zip(thetas, a, b)))

    name = "diag(" + ",".join(t.name for t in thetas) + ")"
    return Invariant(name, evaluate, below, domains.pop())


def resolve_invariant(text: str) -> Invariant:
    """``size``, ``theta0`` or a comma list such as ``theta0,theta1`` for the diagonal."""
    names = [s.strip() for s in text.split(",") if s.strip()]
    unknown = [n for n in names if n not in BUILTIN_INVARIANTS]
    if not names or unknown:
        raise ValueError(f"unknown invariant {text!r}; choose from {', '.join(BUILTIN_INVARIANTS)}")
    if len(names) == 1:
        return BUILTIN_INVARIANTS[names[0]]
    return diagonal_invariant([BUILTIN_INVARIANTS[n] for n in names])


# -- fibers ---------------------------------------------------------------------------------


def format_value(v) -> str:
    if isinstance(v, tuple):
        return "<" + ",".join(format_value(u) for u in v) + ">"
    return str(v)


@dataclass(frozen=True)
class Fiber:
    value: Any
    members: Tuple[str, ...]
    multiplicity: Union[int, Aleph]

    @property
    def infinite(self) -> bool:
        return isinstance(self.multiplicity, Aleph)


Family = Union[StructureFamily, OtpFamily]


def _members(fam: Family):
    if isinstance(fam, StructureFamily):
        return [(t.name, t.structure, t.multiplicity) for t in fam.templates]
    return [(m.source, m.source, m.multiplicity) for m in fam.members]


def invariant_fibers(fam: Family, theta: Invariant) -> List[Fiber]:
    groups: Dict[Any, List] = {}
    order: List[Any] = []
    for name, obj, mult in _members(fam):
        try:
            v = theta.evaluate(obj)
        except (ValueError, TypeError, AttributeError) as exc:
            raise ValueError(f"invariant {theta.name} is undefined on {name}: {exc}") from None
        if v not in groups:
            groups[v] = [[], 0]
            order.append(v)
        groups[v][0].append(name)
        groups[v][1] = add_multiplicities(groups[v][1], mult)
    return [Fiber(v, tuple(groups[v][0]), groups[v][1]) for v in order]


@dataclass(frozen=True)
class FiberCertificate:
    """Every fiber of the invariant has finite total multiplicity."""

    invariant: str
    fibers: Tuple[Tuple[str, int], ...]
    name: str = "finite-invariant-fibers"

    def to_text(self) -> str:
        body = " ".join(f"{v}:{m}" for v, m in self.fibers)
        return f"certificate {self.name} invariant {self.invariant} fibers {body}\n"


def certify_by_invariant(fam: Family, theta: Invariant) -> Optional[FiberCertificate]:
    fibers = invariant_fibers(fam, theta)
    if any(f.infinite for f in fibers):
        return None
    return FiberCertificate(theta.name, tuple((format_value(f.value), f.multiplicity) for f in fibers))


def parse_certificate(text: str) -> FiberCertificate:
    words = text.split()
    if len(words) < 5 or words[0] != "certificate" or words[2] != "invariant" or words[4] != "fibers":
        raise InputError("expected 'certificate <name> invariant <name> fibers <value>:<count> ...'")
    fibers = []
    for tok in words[5:]:
        value, _, count = tok.rpartition(":")
        if not value or not count.isdigit():
            raise InputError(f"bad fiber entry {tok!r}")
        fibers.append((value, int(count)))
    return FiberCertificate(words[3], tuple(fibers), words[1])


def validate_certificate(fam: Family, cert: FiberCertificate) -> None:
    """Recompute the fibers and compare; raises ValueError on mismatch."""
    theta = resolve_invariant(cert.invariant.removeprefix("diag(").removesuffix(")"))
    fresh = certify_by_invariant(fam, theta)
    if fresh is None:
        raise ValueError("some fiber is infinite")
    if sorted(fresh.fibers) != sorted(cert.fibers):
        raise ValueError("fibers do not match the family")
