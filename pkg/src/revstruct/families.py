"""Disjoint unions presented by connected finite templates with multiplicities.

A family lists pairwise non-isomorphic connected templates, each occurring
finitely often or aleph_0 times.  The union of all copies is the structure
whose reversibility is being decided.  Negative answers come with witnesses
that can be re-checked without trusting the search that produced them.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from .cardinals import ALEPH_0, Aleph, CardinalSequence, decide_reversible, format_multiplicity
from .errors import GuardExceeded, InputError, WitnessError
from .structures import (
    DEFAULT_GUARD,
    BinaryStructure,
    MorphismKind,
    are_isomorphic,
    components,
    find_morphisms,
    induced,
    is_chain,
    is_tournament,
    morphism_violation,
    parse_structure,
)

Multiplicity = Union[int, Aleph]

REVERSIBLE = "reversible-certified"
NOT_REVERSIBLE = "not-reversible"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class Template:
    name: str
    structure: BinaryStructure
    multiplicity: Multiplicity

    @property
    def infinite(self) -> bool:
        return isinstance(self.multiplicity, Aleph)

    def __len__(self) -> int:
        return len(self.structure)


@dataclass(frozen=True)
class StructureFamily:
    templates: Tuple[Template, ...]
    merged: Tuple[Tuple[str, str], ...] = ()

    def __post_init__(self):
        if not self.templates:
            raise ValueError("a family needs at least one template")
        names = [t.name for t in self.templates]
        if len(set(names)) != len(names):
            raise ValueError("template names must be unique")
        for t in self.templates:
            if len(components(t.structure)) != 1:
                raise ValueError(f"template {t.name} is not connected")
            m = t.multiplicity
            if isinstance(m, Aleph):
                if m != ALEPH_0:
                    raise ValueError("the only infinite multiplicity is aleph_0")
            elif isinstance(m, bool) or not isinstance(m, int) or m < 1:
                raise ValueError(f"template {t.name}: multiplicity must be >= 1")

    @classmethod
    def build(cls, items: Iterable[Union[Template, Tuple[str, BinaryStructure, Multiplicity]]]) -> "StructureFamily":
        """Create a family, merging isomorphic templates and adding multiplicities."""
        kept: List[Template] = []
        merges = []
        for item in items:
            t = item if isinstance(item, Template) else Template(*item)
            for k, other in enumerate(kept):
                if len(other) == len(t) and are_isomorphic(other.structure, t.structure):
                    m = ALEPH_0 if other.infinite or t.infinite else other.multiplicity + t.multiplicity
                    kept[k] = Template(other.name, other.structure, m)
                    merges.append((t.name, other.name))
                    break
            else:
                kept.append(t)
        return cls(tuple(kept), tuple(merges))

    def __len__(self) -> int:
        return len(self.templates)

    def __iter__(self):
        return iter(self.templates)

    def index(self, name: str) -> int:
        for k, t in enumerate(self.templates):
            if t.name == name:
                return k
        raise KeyError(name)

    def get(self, name: str) -> Template:
        return self.templates[self.index(name)]

    def all_finite(self) -> bool:
        return not any(t.infinite for t in self.templates)

    def all_infinite(self) -> bool:
        return all(t.infinite for t in self.templates)

    def to_text(self) -> str:
        out = []
        for t in self.templates:
            out.append(f"template {t.name} multiplicity {format_multiplicity(t.multiplicity)}")
            out.append(" ".join(["nodes", *t.structure.nodes]))
            out.extend(f"edge {a} {b}" for a, b in t.structure.sorted_edges())
        return "\n".join(out) + "\n"


def parse_family(text: str, source: Optional[str] = None) -> StructureFamily:
    sections: List[Tuple[int, str, Multiplicity, List[str]]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        words = raw.split("#", 1)[0].split()
        if words and words[0] == "template":
            if len(words) != 4 or words[2] != "multiplicity":
                raise InputError("expected 'template <name> multiplicity <n|inf>'", lineno, source)
            mult = words[3]
            if mult == "inf":
                m: Multiplicity = ALEPH_0
            elif mult.isdigit() and int(mult) >= 1:
                m = int(mult)
            else:
                raise InputError(f"bad multiplicity {mult!r}", lineno, source)
            sections.append((lineno, words[1], m, []))
        elif words:
            if not sections:
                raise InputError("structure line before any template header", lineno, source)
            sections[-1][3].append((lineno, raw))
    if not sections:
        raise InputError("no templates declared", None, source)
    items = []
    for lineno, name, m, body in sections:
        if any(name == other[1] for other in sections if other[0] != lineno):
            raise InputError(f"template name {name!r} used twice", lineno, source)
        x = _parse_section(body, source)
        if len(components(x)) != 1:
            raise InputError(f"template {name} is not connected", lineno, source)
        items.append(Template(name, x, m))
    return StructureFamily.build(items)


def _parse_section(body, source):
    # keep original line numbers in error messages
    if not body:
        return parse_structure("", source)
    first = body[0][0]
    lines = [""] * (body[-1][0] - first + 1)
    for lineno, raw in body:
        lines[lineno - first] = raw
    return parse_structure("\n".join(lines), source, line_offset=first - 1)


# -- condensational preorder ----------------------------------------------------------

BELOW, ABOVE, INCOMPARABLE, ISOMORPHIC, UNKNOWN = (
    "strictly-below", "strictly-above", "incomparable", "isomorphic", "unknown")


@dataclass(frozen=True)
class PreorderCell:
    relation: str
    witness: Optional[Mapping[str, str]] = None


@dataclass(frozen=True)
class PreorderMatrix:
    names: Tuple[str, ...]
    cells: Tuple[Tuple[PreorderCell, ...], ...]

    def cell(self, s: str, t: str) -> PreorderCell:
        return self.cells[self.names.index(s)][self.names.index(t)]

    def strictly_below(self) -> List[Tuple[str, str]]:
        return [(s, t) for i, s in enumerate(self.names) for j, t in enumerate(self.names)
                if self.cells[i][j].relation == BELOW]

    def complete(self) -> bool:
        return all(c.relation != UNKNOWN for row in self.cells for c in row)


def condensation_preorder(fam: StructureFamily, guard: int = DEFAULT_GUARD) -> PreorderMatrix:
    rows = []
    for i, s in enumerate(fam.templates):
        row = []
        for j, t in enumerate(fam.templates):
            if len(s) > guard or len(t) > guard:
                row.append(PreorderCell(UNKNOWN))
                continue
            if i == j:
                row.append(PreorderCell(ISOMORPHIC, {v: v for v in s.structure.nodes}))
                continue
            up = find_morphisms(s.structure, t.structure, MorphismKind.CONDENSATION, limit=1)
            down = find_morphisms(t.structure, s.structure, MorphismKind.CONDENSATION, limit=1)
            if up and down:
                # cannot happen for distinct finite templates; kept for safety
                row.append(PreorderCell(ISOMORPHIC, up[0]))
            elif up:
                row.append(PreorderCell(BELOW, up[0]))
            elif down:
                row.append(PreorderCell(ABOVE, down[0]))
            else:
                row.append(PreorderCell(INCOMPARABLE))
        rows.append(tuple(row))
    return PreorderMatrix(tuple(t.name for t in fam.templates), tuple(rows))


@dataclass(frozen=True)
class StrictPair:
    below: str
    above: str
    mapping: Mapping[str, str]


def strict_pair_check(fam: StructureFamily, matrix: Optional[PreorderMatrix] = None,
                      guard: int = DEFAULT_GUARD) -> List[StrictPair]:
    """Pairs S below T in the condensational order with both multiplicities aleph_0."""
    matrix = matrix or condensation_preorder(fam, guard)
    out = []
    for s, t in matrix.strictly_below():
        if fam.get(s).infinite and fam.get(t).infinite:
            out.append(StrictPair(s, t, dict(matrix.cell(s, t).witness)))
    return out


def validate_strict_pair(fam: StructureFamily, pair: StrictPair) -> None:
    s, t = fam.get(pair.below), fam.get(pair.above)
    if not (s.infinite and t.infinite):
        raise WitnessError("both templates of a strict pair must occur aleph_0 times")
    problem = morphism_violation(pair.mapping, s.structure, t.structure, MorphismKind.CONDENSATION)
    if problem:
        raise WitnessError(f"strict pair mapping is not a condensation: {problem}")
    if find_morphisms(t.structure, s.structure, MorphismKind.CONDENSATION, limit=1):
        raise WitnessError(f"{t.name} also condenses onto {s.name}")


# -- merge witnesses --------------------------------------------------------------------

Index = Tuple[str, int]


@dataclass(frozen=True)
class ShiftPlan:
    """Index surjection for a single merge.

    Copies of type T are numbered b_0, b_1, ...; for each consumed part type
    P with k copies used, a_0 .. a_{k-1} go to b_0, a_{n+k} goes to a_n, b_n
    goes to b_{n+1}, and every other index is fixed.
    """

    target: str
    uses: Tuple[Tuple[str, int], ...]

    def use_count(self, name: str) -> int:
        return dict(self.uses).get(name, 0)

    def apply(self, index: Index) -> Index:
        name, n = index
        if name == self.target:
            return (name, n + 1)
        k = self.use_count(name)
        if k:
            return (self.target, 0) if n < k else (name, n - k)
        return index

    def preimage(self, index: Index) -> List[Index]:
        name, n = index
        if name == self.target:
            if n == 0:
                return [(p, i) for p, k in self.uses for i in range(k)]
            return [(name, n - 1)]
        k = self.use_count(name)
        if k:
            return [(name, n + k)]
        return [index]

    def describe(self) -> List[str]:
        lines = []
        for p, k in self.uses:
            lines.append(f"{p}[0..{k - 1}] -> {self.target}[0]")
            lines.append(f"{p}[n+{k}] -> {p}[n]")
        lines.append(f"{self.target}[n] -> {self.target}[n+1]")
        lines.append("other indices fixed")
        return lines


@dataclass(frozen=True)
class MergeBlock:
    part: str
    vertices: Tuple[str, ...]
    mapping: Mapping[str, str]


@dataclass(frozen=True)
class MergeWitness:
    target: str
    blocks: Tuple[MergeBlock, ...]

    @property
    def parts(self) -> Tuple[str, ...]:
        return tuple(b.part for b in self.blocks)

    @property
    def shift_plan(self) -> ShiftPlan:
        counts = Counter(self.parts)
        order = list(dict.fromkeys(self.parts))
        return ShiftPlan(self.target, tuple((p, counts[p]) for p in order))


def _condensation_onto(part: BinaryStructure, target: BinaryStructure, block: Sequence[str]):
    sub = induced(target, block)
    if len(part.edges) > len(sub.edges):
        return None
    found = find_morphisms(part, sub, MorphismKind.CONDENSATION, limit=1)
    return found[0] if found else None


def _merge_for_target(fam: StructureFamily, target: Template, max_parts: Optional[int]):
    candidates = [t for t in fam.templates
                  if t.infinite and t.name != target.name and len(t) < len(target)]
    if not candidates:
        return None
    tnodes = target.structure.nodes
    cap = max_parts if max_parts is not None else len(tnodes)

    def search(remaining: Tuple[str, ...], blocks: List[MergeBlock]):
        if not remaining:
            return list(blocks) if len(blocks) >= 2 else None
        if len(blocks) >= cap:
            return None
        v, rest = remaining[0], remaining[1:]
        for part in candidates:
            size = len(part)
            if size > len(remaining):
                continue
            for others in itertools.combinations(rest, size - 1):
                block = (v, *others)
                f = _condensation_onto(part.structure, target.structure, block)
                if f is None:
                    continue
                blocks.append(MergeBlock(part.name, tuple(sorted(block)), f))
                left = tuple(u for u in rest if u not in others)
                found = search(left, blocks)
                if found:
                    return found
                blocks.pop()
        return None

    found = search(tnodes, [])
    return MergeWitness(target.name, tuple(found)) if found else None


def merge_witness_search(fam: StructureFamily, max_parts: Optional[int] = None,
                         guard: int = DEFAULT_GUARD) -> Optional[MergeWitness]:
    """First single-merge witness, scanning targets in template order.

    Only templates occurring aleph_0 times take part, both as target and as
    parts, so the shift plan always has room to renumber.
    """
    if max_parts is not None and max_parts < 2:
        raise ValueError("max_parts must be at least 2")
    for target in fam.templates:
        if not target.infinite or len(target) > guard:
            continue
        w = _merge_for_target(fam, target, max_parts)
        if w is not None:
            return w
    return None


def _merge_search_complete(fam: StructureFamily, max_parts: Optional[int], guard: int) -> bool:
    for t in fam.templates:
        if not t.infinite:
            continue
        if len(t) > guard:
            return False
        if max_parts is not None and max_parts < len(t):
            return False
    return True


def validate_merge_witness(fam: StructureFamily, w: MergeWitness, window: int = 64) -> None:
    """Re-check every claim of a merge witness; raise WitnessError on failure."""
    try:
        target = fam.get(w.target)
    except KeyError:
        raise WitnessError(f"unknown target template {w.target}") from None
    if len(w.blocks) < 2:
        raise WitnessError("a merge needs at least two parts")
    seen: Dict[str, int] = {}
    for k, block in enumerate(w.blocks):
        try:
            part = fam.get(block.part)
        except KeyError:
            raise WitnessError(f"unknown part template {block.part}") from None
        if block.part == w.target:
            raise WitnessError("the target cannot be one of its own parts")
        if not part.infinite or not target.infinite:
            raise WitnessError(f"{block.part} and {w.target} must both occur aleph_0 times")
        for v in block.vertices:
            if v in seen:
                raise WitnessError(f"vertex {v} lies in blocks {seen[v]} and {k}")
            seen[v] = k
        sub = induced(target.structure, block.vertices)
        problem = morphism_violation(block.mapping, part.structure, sub, MorphismKind.CONDENSATION)
        if problem:
            raise WitnessError(f"block {k}: {problem}")
    if set(seen) != set(target.structure.nodes):
        raise WitnessError("blocks do not cover the target")
    _validate_shift_plan(fam, w, window)


def _validate_shift_plan(fam: StructureFamily, w: MergeWitness, window: int) -> None:
    plan = w.shift_plan
    counts = Counter(w.parts)
    if dict(plan.uses) != dict(counts):
        raise WitnessError("shift plan does not consume exactly the merged parts")

    def valid(index: Index) -> bool:
        name, n = index
        t = fam.get(name)
        return n >= 0 and (t.infinite or n < t.multiplicity)

    universe = []
    for t in fam.templates:
        bound = window if t.infinite else t.multiplicity
        universe.extend((t.name, n) for n in range(bound))
    for idx in universe:
        image = plan.apply(idx)
        if not valid(image):
            raise WitnessError(f"index {idx} is sent outside the family to {image}")
        pre = plan.preimage(idx)
        if not pre:
            raise WitnessError(f"index {idx} is not hit")
        for p in pre:
            if not valid(p) or plan.apply(p) != idx:
                raise WitnessError(f"preimage {p} of {idx} is wrong")
        if idx != (w.target, 0) and len(pre) != 1:
            raise WitnessError(f"index {idx} has {len(pre)} preimages")
    fiber = plan.preimage((w.target, 0))
    if len(fiber) < 2:
        raise WitnessError("shift plan is injective")
    if Counter(name for name, _ in fiber) != counts:
        raise WitnessError("merged fiber does not match the blocks")


# -- tournaments ---------------------------------------------------------------------------


class TournamentError(ValueError):
    def __init__(self, which: str, pair):
        self.pair = pair
        super().__init__(f"{which} is not a tournament: pair ({pair[0]}, {pair[1]})")


def tournament_partition_witness(target: BinaryStructure, parts: Sequence[BinaryStructure]):
    """Partition target into blocks inducing copies of the given tournaments.

    Returns a list of ``(part_index, block, isomorphism)`` or None.
    """
    bad = is_tournament(target)
    if bad is not None:
        raise TournamentError("target", bad)
    for k, p in enumerate(parts):
        bad = is_tournament(p)
        if bad is not None:
            raise TournamentError(f"part {k}", bad)
    if sum(len(p) for p in parts) != len(target):
        raise ValueError("part sizes must add up to the target size")

    def search(remaining, unused, acc):
        if not remaining:
            return list(acc)
        v, rest = remaining[0], remaining[1:]
        tried = []
        for k in unused:
            if any(len(parts[k]) == len(parts[q]) and are_isomorphic(parts[k], parts[q]) for q in tried):
                continue
            tried.append(k)
            for others in itertools.combinations(rest, len(parts[k]) - 1):
                block = (v, *others)
                iso = find_morphisms(parts[k], induced(target, block), MorphismKind.ISOMORPHISM, limit=1)
                if not iso:
                    continue
                acc.append((k, tuple(sorted(block)), iso[0]))
                found = search(tuple(u for u in rest if u not in others),
                               [q for q in unused if q != k], acc)
                if found:
                    return found
                acc.pop()
        return None

    return search(target.nodes, list(range(len(parts))), [])


# -- orbits and fibers ---------------------------------------------------------------------


@dataclass(frozen=True)
class OrbitFiber:
    orbit: Tuple
    fiber: Tuple
    intersection: Tuple

    @property
    def holds(self) -> bool:
        return len(self.intersection) <= 1


def orbit_fiber_check(f: Mapping, j, require_surjective: bool = False) -> OrbitFiber:
    """Forward orbit of j, the fiber over j, and their intersection.

    Any endomap of a finite set is accepted: the bound on the intersection
    does not use surjectivity, and on a finite set a surjective endomap has
    no fiber with two points.  ``require_surjective`` restores the stricter
    precondition.
    """
    domain = set(f)
    for x, y in f.items():
        if y not in domain:
            raise ValueError(f"f({x}) = {y} lies outside the index set")
    if j not in domain:
        raise ValueError(f"{j} is not in the index set")
    if require_surjective and set(f.values()) != domain:
        missing = sorted(domain - set(f.values()), key=repr)
        raise ValueError(f"f is not surjective: {missing[0]!r} has no preimage")
    fiber = tuple(sorted((x for x in f if f[x] == j), key=repr))
    if len(fiber) <= 1:
        raise ValueError(f"the fiber over {j} has {len(fiber)} element(s); at least two are needed")
    orbit, seen, x = [], set(), j
    while x not in seen:
        seen.add(x)
        orbit.append(x)
        x = f[x]
    inter = tuple(sorted((x for x in fiber if x in seen), key=repr))
    return OrbitFiber(tuple(orbit), fiber, inter)


# -- omega* sequences ----------------------------------------------------------------------


@dataclass(frozen=True)
class Certificate:
    name: str
    detail: str


def mono_relation(fam: StructureFamily, guard: int = DEFAULT_GUARD) -> Dict[Tuple[str, str], Optional[bool]]:
    """Whether each template has a monomorphism into each other (None: over guard)."""
    rel = {}
    for s in fam.templates:
        for t in fam.templates:
            if len(s) > guard or len(t) > guard:
                rel[s.name, t.name] = None
            elif s.name == t.name:
                rel[s.name, t.name] = True
            else:
                rel[s.name, t.name] = bool(find_morphisms(s.structure, t.structure,
                                                          MorphismKind.MONOMORPHISM, limit=1))
    return rel


def omega_star_obstruction(fam: StructureFamily, guard: int = DEFAULT_GUARD):
    """A non-trivial omega*-sequence pattern ``(T, S, U)`` if one exists.

    The sequence starts with a copy of T, then a copy of S (S not isomorphic
    to T and S mono-below T), then infinitely many copies of U, which must
    occur aleph_0 times and be mono-below S.  For finite templates such a
    pattern exists iff some omega*-sequence is non-trivial.  Raises
    GuardExceeded when a needed comparison was skipped.
    """
    rel = mono_relation(fam, guard)
    if any(v is None for v in rel.values()):
        raise GuardExceeded(f"a template exceeds the guard of {guard} vertices")
    for t in fam.templates:
        for s in fam.templates:
            if s.name == t.name or not rel[s.name, t.name]:
                continue
            for u in fam.templates:
                if u.infinite and rel[u.name, s.name]:
                    return (t.name, s.name, u.name)
    return None


def omega_star_certificate(fam: StructureFamily, guard: int = DEFAULT_GUARD) -> Optional[Certificate]:
    if fam.all_finite():
        return Certificate("trivial-omega-star-sequences",
                           "finitely many indices, so no injective omega-indexing exists")
    comparable = [(s.name, t.name) for s in fam.templates for t in fam.templates
                  if s.name != t.name and len(s) <= guard and len(t) <= guard
                  and find_morphisms(s.structure, t.structure, MorphismKind.MONOMORPHISM, limit=1)]
    if not comparable and all(len(t) <= guard for t in fam.templates):
        return Certificate("trivial-omega-star-sequences",
                           "no two distinct templates are comparable by monomorphisms")
    try:
        hit = omega_star_obstruction(fam, guard)
    except GuardExceeded:
        return None
    if hit is None:
        return Certificate("trivial-omega-star-sequences",
                           "no template occurring aleph_0 times lies below a strictly smaller pair")
    return None


# -- verdicts ------------------------------------------------------------------------------


@dataclass(frozen=True)
class FamilyVerdict:
    status: str
    evidence: str = "none"
    certificate: Optional[Certificate] = None
    merge: Optional[MergeWitness] = None
    strict_pair: Optional[StrictPair] = None
    notes: Tuple[str, ...] = ()

    def to_text(self) -> str:
        lines = [f"status: {self.status}", f"evidence: {self.evidence}"]
        if self.certificate is not None:
            lines.append(f"certificate: {self.certificate.name}")
            lines.append(f"detail: {self.certificate.detail}")
        if self.strict_pair is not None:
            sp = self.strict_pair
            lines.append(f"below: {sp.below}")
            lines.append(f"above: {sp.above}")
            lines.append("map:")
            lines.extend(f"  {x} -> {y}" for x, y in sorted(sp.mapping.items()))
        if self.merge is not None:
            w = self.merge
            lines.append(f"target: {w.target}")
            lines.append("parts: " + " ".join(w.parts))
            for k, b in enumerate(w.blocks):
                lines.append(f"block.{k}.part: {b.part}")
                lines.append(f"block.{k}.vertices: " + " ".join(b.vertices))
                lines.append(f"block.{k}.map:")
                lines.extend(f"  {x} -> {y}" for x, y in sorted(b.mapping.items()))
            lines.append("shift:")
            lines.extend(f"  {rule}" for rule in w.shift_plan.describe())
        for note in self.notes:
            lines.append(f"note: {note}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "FamilyVerdict":
        fields: List[Tuple[str, str, List[Tuple[str, str]]]] = []
        for lineno, raw in enumerate(text.splitlines(), start=1):
            if raw.startswith("  "):
                if not fields:
                    raise InputError("indented line before any key", lineno)
                fields[-1][2].append((lineno, raw.strip()))
                continue
            key, sep, value = raw.partition(":")
            if not sep:
                raise InputError(f"expected 'key: value', got {raw!r}", lineno)
            fields.append((key, value.strip(), []))

        def mapping(sub):
            out = {}
            for lineno, line in sub:
                x, arrow, y = line.partition(" -> ")
                if not arrow:
                    raise InputError(f"expected 'x -> y', got {line!r}", lineno)
                out[x] = y
            return out

        status = evidence = None
        cert_name = detail = None
        below = above = None
        sp_map = None
        target = None
        blocks: Dict[int, dict] = {}
        shift_lines = None
        notes = []
        for key, value, sub in fields:
            if key == "status":
                status = value
            elif key == "evidence":
                evidence = value
            elif key == "certificate":
                cert_name = value
            elif key == "detail":
                detail = value
            elif key == "below":
                below = value
            elif key == "above":
                above = value
            elif key == "map":
                sp_map = mapping(sub)
            elif key == "target":
                target = value
            elif key == "parts":
                pass
            elif key.startswith("block."):
                _, num, attr = key.split(".")
                b = blocks.setdefault(int(num), {})
                if attr == "part":
                    b["part"] = value
                elif attr == "vertices":
                    b["vertices"] = tuple(value.split())
                elif attr == "map":
                    b["mapping"] = mapping(sub)
                else:
                    raise InputError(f"unknown block attribute {attr!r}")
            elif key == "shift":
                shift_lines = [line for _, line in sub]
            elif key == "note":
                notes.append(value)
            else:
                raise InputError(f"unknown key {key!r}")
        if status is None or evidence is None:
            raise InputError("status and evidence are required")
        cert = Certificate(cert_name, detail or "") if cert_name is not None else None
        sp = StrictPair(below, above, sp_map or {}) if below is not None else None
        merge = None
        if target is not None:
            merge = MergeWitness(target, tuple(
                MergeBlock(blocks[k]["part"], blocks[k]["vertices"], blocks[k]["mapping"])
                for k in sorted(blocks)))
            if shift_lines is not None and shift_lines != merge.shift_plan.describe():
                raise InputError("shift plan lines do not match the merged parts")
        return cls(status, evidence, cert, merge, sp, tuple(notes))


def rich_for_monomorphisms(fam: StructureFamily, guard: int = DEFAULT_GUARD):
    """Check that every subset of the right size of every template is the
    image of a monomorphism from every template of that size.

    Returns None when the family is rich, otherwise ``(source, target, subset)``.
    Raises GuardExceeded for templates over the guard.
    """
    if any(len(t) > guard for t in fam.templates):
        raise GuardExceeded(f"a template exceeds the guard of {guard} vertices")
    for s in fam.templates:
        for t in fam.templates:
            if len(s) > len(t):
                continue
            for subset in itertools.combinations(t.structure.nodes, len(s)):
                if _condensation_onto(s.structure, t.structure, subset) is None:
                    return (s.name, t.name, subset)
    return None


def _cardinal_route(fam: StructureFamily, guard: int) -> Optional[str]:
    if all(is_chain(t.structure) for t in fam.templates):
        return "chain"
    try:
        return "rich" if rich_for_monomorphisms(fam, guard) is None else None
    except GuardExceeded:
        return None


def _cardinal_sizes(fam: StructureFamily) -> CardinalSequence:
    return CardinalSequence.from_pairs((len(t), t.multiplicity) for t in fam.templates)


def decide_family(fam: StructureFamily, max_parts: Optional[int] = None,
                  guard: int = DEFAULT_GUARD) -> FamilyVerdict:
    route = _cardinal_route(fam, guard)
    if route is not None:
        sv = decide_reversible(_cardinal_sizes(fam))
        what = "chain sizes" if route == "chain" else "sizes of a monomorphism-rich family"
        notes = (f"{what} decided by the cardinal criterion: {sv.reason}",
                 *sv.evidence_lines())
        if sv.reversible:
            return FamilyVerdict(REVERSIBLE, "certificate",
                                 Certificate("cardinal-criterion", sv.reason), notes=notes)
        w = merge_witness_search(fam, max_parts, guard)
        return FamilyVerdict(NOT_REVERSIBLE, "merge-witness" if w else "cardinal-criterion",
                             merge=w, notes=notes)

    matrix = condensation_preorder(fam, guard)
    pairs = strict_pair_check(fam, matrix, guard)
    if pairs:
        return FamilyVerdict(NOT_REVERSIBLE, "strict-pair", strict_pair=pairs[0])
    w = merge_witness_search(fam, max_parts, guard)
    if w is not None:
        return FamilyVerdict(NOT_REVERSIBLE, "merge-witness", merge=w)
    if fam.all_finite():
        return FamilyVerdict(REVERSIBLE, "certificate", Certificate(
            "finite-index-set", "finitely many finite components, each reversible"))
    complete = matrix.complete() and _merge_search_complete(fam, max_parts, guard)
    if fam.all_infinite() and complete:
        return FamilyVerdict(REVERSIBLE, "certificate", Certificate(
            "no-strict-pair-no-merge",
            "every class is infinite, no strict condensation pair and no merge exists"))
    cert = omega_star_certificate(fam, guard)
    if cert is not None:
        return FamilyVerdict(REVERSIBLE, "certificate", cert)
    notes = []
    if not complete:
        notes.append("search was limited by the guard or the part bound")
    if not fam.all_infinite():
        notes.append("mixed finite and infinite multiplicities; no single merge found")
    return FamilyVerdict(INCONCLUSIVE, "none", notes=tuple(notes))
