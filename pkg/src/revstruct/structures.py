"""Finite binary structures and morphism search between them."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

from .errors import GuardExceeded, InputError, WitnessError

Pair = Tuple[str, str]
Mapping_ = Dict[str, str]

DEFAULT_GUARD = 9


class MorphismKind(str, Enum):
    HOMOMORPHISM = "homomorphism"
    MONOMORPHISM = "monomorphism"
    EMBEDDING = "embedding"
    CONDENSATION = "condensation"
    ISOMORPHISM = "isomorphism"

    @property
    def injective(self) -> bool:
        return self is not MorphismKind.HOMOMORPHISM

    @property
    def bijective(self) -> bool:
        return self in (MorphismKind.CONDENSATION, MorphismKind.ISOMORPHISM)

    @property
    def strong(self) -> bool:
        """Whether non-edges must also be preserved."""
        return self in (MorphismKind.EMBEDDING, MorphismKind.ISOMORPHISM)


@dataclass(frozen=True)
class BinaryStructure:
    """A finite set of string vertices with one binary relation.

    Vertices are kept sorted lexicographically so every derived ordering
    (search order, serialization) is reproducible.
    """

    nodes: Tuple[str, ...] = ()
    edges: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        nodes = [str(v) for v in self.nodes]
        if len(set(nodes)) != len(nodes):
            dup = next(v for v in nodes if nodes.count(v) > 1)
            raise ValueError(f"duplicate vertex {dup!r}")
        nodes.sort()
        edges = frozenset((str(a), str(b)) for a, b in self.edges)
        carrier = set(nodes)
        for a, b in sorted(edges):
            if a not in carrier or b not in carrier:
                raise ValueError(f"edge ({a}, {b}) leaves the carrier")
        object.__setattr__(self, "nodes", tuple(nodes))
        object.__setattr__(self, "edges", edges)

    def __len__(self) -> int:
        return len(self.nodes)

    @cached_property
    def out_neighbors(self) -> Dict[str, frozenset]:
        out = {v: set() for v in self.nodes}
        for a, b in self.edges:
            out[a].add(b)
        return {v: frozenset(s) for v, s in out.items()}

    @cached_property
    def in_neighbors(self) -> Dict[str, frozenset]:
        inc = {v: set() for v in self.nodes}
        for a, b in self.edges:
            inc[b].add(a)
        return {v: frozenset(s) for v, s in inc.items()}

    def has_edge(self, a: str, b: str) -> bool:
        return (a, b) in self.edges

    def sorted_edges(self) -> List[Pair]:
        return sorted(self.edges)

    def __repr__(self) -> str:
        return f"BinaryStructure(nodes={list(self.nodes)}, edges={self.sorted_edges()})"


def structure(nodes: Iterable, edges: Iterable = ()) -> BinaryStructure:
    return BinaryStructure(tuple(nodes), frozenset(tuple(e) for e in edges))


def chain(n: int, prefix: str = "") -> BinaryStructure:
    """The transitive tournament (strict linear order) on n points."""
    labels = [f"{prefix}{i}" for i in range(n)]
    return structure(labels, [(labels[i], labels[j]) for i in range(n) for j in range(i + 1, n)])


def directed_cycle(n: int) -> BinaryStructure:
    labels = [str(i) for i in range(n)]
    return structure(labels, [(labels[i], labels[(i + 1) % n]) for i in range(n)])


# -- file format -------------------------------------------------------------


def parse_structure(text: str, source: str | None = None, line_offset: int = 0) -> BinaryStructure:
    nodes: List[str] = []
    seen = set()
    edge_lines: List[Tuple[int, str, str]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1 + line_offset):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        words = line.split()
        if words[0] == "nodes":
            for v in words[1:]:
                if v in seen:
                    raise InputError(f"vertex {v!r} declared twice", lineno, source)
                seen.add(v)
                nodes.append(v)
        elif words[0] == "edge":
            if len(words) != 3:
                raise InputError("an edge line needs exactly two vertices", lineno, source)
            edge_lines.append((lineno, words[1], words[2]))
        else:
            raise InputError(f"unknown keyword {words[0]!r}", lineno, source)
    edges = set()
    for lineno, a, b in edge_lines:
        for v in (a, b):
            if v not in seen:
                raise InputError(f"undeclared vertex {v!r}", lineno, source)
        edges.add((a, b))
    return structure(nodes, edges)


def format_structure(x: BinaryStructure) -> str:
    lines = [" ".join(["nodes", *x.nodes])]
    lines.extend(f"edge {a} {b}" for a, b in x.sorted_edges())
    return "\n".join(lines) + "\n"


# -- basic constructions -------------------------------------------------------


class _UnionFind:
    def __init__(self, items):
        self.parent = {v: v for v in items}

    def find(self, v):
        root = v
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[v] != root:
            self.parent[v], v = root, self.parent[v]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


def components(x: BinaryStructure) -> List[Tuple[str, ...]]:
    """Connectivity components, each sorted, listed by their least vertex."""
    uf = _UnionFind(x.nodes)
    for a, b in x.edges:
        uf.union(a, b)
    blocks: Dict[str, List[str]] = {}
    for v in x.nodes:
        blocks.setdefault(uf.find(v), []).append(v)
    return sorted((tuple(b) for b in blocks.values()), key=lambda b: b[0])


def is_connected(x: BinaryStructure) -> bool:
    return len(components(x)) == 1


def induced(x: BinaryStructure, subset: Iterable[str]) -> BinaryStructure:
    keep = set(subset)
    return structure(keep, [(a, b) for a, b in x.edges if a in keep and b in keep])


def complement(x: BinaryStructure) -> BinaryStructure:
    return structure(x.nodes, [(a, b) for a in x.nodes for b in x.nodes if (a, b) not in x.edges])


def disjoint_union(parts: Sequence[BinaryStructure]) -> BinaryStructure:
    """Union of the parts with vertex v of part k renamed to ``k:v``."""
    nodes, edges = [], []
    for k, part in enumerate(parts):
        nodes.extend(f"{k}:{v}" for v in part.nodes)
        edges.extend((f"{k}:{a}", f"{k}:{b}") for a, b in part.edges)
    return structure(nodes, edges)


def relabel(x: BinaryStructure, mapping: Mapping[str, str]) -> BinaryStructure:
    return structure((mapping[v] for v in x.nodes), ((mapping[a], mapping[b]) for a, b in x.edges))


def is_tournament(x: BinaryStructure) -> Optional[Pair]:
    """Return a violating pair, or None when x is a tournament."""
    for v in x.nodes:
        if (v, v) in x.edges:
            return (v, v)
    for a, b in itertools.combinations(x.nodes, 2):
        if ((a, b) in x.edges) == ((b, a) in x.edges):
            return (a, b)
    return None


def is_chain(x: BinaryStructure) -> bool:
    """Transitive tournament, i.e. a strict linear order."""
    if is_tournament(x) is not None:
        return False
    return all((a, c) in x.edges for a, b in x.edges for c in x.out_neighbors[b])


# -- morphisms -----------------------------------------------------------------


def morphism_violation(f: Mapping[str, str], x: BinaryStructure, y: BinaryStructure,
                       kind: MorphismKind) -> Optional[str]:
    """Describe why f is not a morphism of the given kind, or return None.

    This is a direct check of the definitions and does not share code with
    the search below.
    """
    kind = MorphismKind(kind)
    if set(f) != set(x.nodes):
        return "mapping is not defined exactly on the source carrier"
    ycar = set(y.nodes)
    for v, w in f.items():
        if w not in ycar:
            return f"{v} -> {w} leaves the target carrier"
    if kind.injective and len(set(f.values())) != len(f):
        return "mapping is not injective"
    if kind.bijective and set(f.values()) != ycar:
        return "mapping is not onto the target"
    for a, b in sorted(x.edges):
        if (f[a], f[b]) not in y.edges:
            return f"pair ({a}, {b}) is related but ({f[a]}, {f[b]}) is not"
    if kind.strong:
        for a in x.nodes:
            for b in x.nodes:
                if (a, b) not in x.edges and (f[a], f[b]) in y.edges:
                    return f"pair ({a}, {b}) is unrelated but ({f[a]}, {f[b]}) is related"
    return None


def is_morphism(f, x, y, kind) -> bool:
    return morphism_violation(f, x, y, kind) is None


def iter_morphisms(x: BinaryStructure, y: BinaryStructure, kind: MorphismKind) -> Iterator[Mapping_]:
    """Backtracking search with forward checking, in carrier order.

    Mappings come out in lexicographic order of their value sequences
    (values compared by position in y's carrier).
    """
    kind = MorphismKind(kind)
    nx, ny = len(x), len(y)
    if kind.bijective and nx != ny:
        return
    if kind.injective and nx > ny:
        return
    if kind is MorphismKind.CONDENSATION and len(x.edges) > len(y.edges):
        return
    if kind is MorphismKind.ISOMORPHISM and len(x.edges) != len(y.edges):
        return
    if nx == 0:
        yield {}
        return

    xs, ys = x.nodes, y.nodes
    xi = {v: i for i, v in enumerate(xs)}
    yi = {v: i for i, v in enumerate(ys)}
    rel_x = [[False] * nx for _ in range(nx)]
    for a, b in x.edges:
        rel_x[xi[a]][xi[b]] = True
    rel_y = [[False] * ny for _ in range(ny)]
    for a, b in y.edges:
        rel_y[yi[a]][yi[b]] = True
    out_x = [sum(r) for r in rel_x]
    in_x = [sum(rel_x[i][j] for i in range(nx)) for j in range(nx)]
    out_y = [sum(r) for r in rel_y]
    in_y = [sum(rel_y[i][j] for i in range(ny)) for j in range(ny)]

    domains: List[List[int]] = []
    for i in range(nx):
        dom = []
        for j in range(ny):
            if rel_x[i][i] and not rel_y[j][j]:
                continue
            if kind.strong and rel_y[j][j] and not rel_x[i][i]:
                continue
            if kind.injective and (out_x[i] > out_y[j] or in_x[i] > in_y[j]):
                continue
            if kind is MorphismKind.ISOMORPHISM and (out_x[i] != out_y[j] or in_x[i] != in_y[j]):
                continue
            dom.append(j)
        if not dom:
            return
        domains.append(dom)

    assignment = [-1] * nx

    def extend(i: int, doms: List[List[int]]):
        if i == nx:
            yield {xs[k]: ys[assignment[k]] for k in range(nx)}
            return
        for j in doms[i]:
            assignment[i] = j
            new = doms[: i + 1]
            ok = True
            for k in range(i + 1, nx):
                fwd, bwd = rel_x[i][k], rel_x[k][i]
                dom = doms[k]
                if kind.injective or fwd or bwd or kind.strong:
                    filtered = []
                    for t in dom:
                        if kind.injective and t == j:
                            continue
                        if fwd != rel_y[j][t] and (fwd or kind.strong):
                            continue
                        if bwd != rel_y[t][j] and (bwd or kind.strong):
                            continue
                        filtered.append(t)
                    if not filtered:
                        ok = False
                        break
                    dom = filtered
                new.append(dom)
            if ok:
                yield from extend(i + 1, new)
        assignment[i] = -1

    yield from extend(0, domains)


def find_morphisms(x: BinaryStructure, y: BinaryStructure, kind: MorphismKind,
                   limit: Optional[int] = None) -> List[Mapping_]:
    """Up to ``limit`` morphisms of the given kind (all of them when limit is None)."""
    if limit is not None and limit < 1:
        raise ValueError("limit must be at least 1")
    return list(itertools.islice(iter_morphisms(x, y, kind), limit))


def exists_morphism(x, y, kind) -> bool:
    return next(iter_morphisms(x, y, kind), None) is not None


def are_isomorphic(x: BinaryStructure, y: BinaryStructure) -> bool:
    return exists_morphism(x, y, MorphismKind.ISOMORPHISM)


# -- reversibility oracle ------------------------------------------------------


@dataclass(frozen=True)
class ReversibilityCheck:
    reversible: bool
    condensations: int
    automorphisms: int
    counterexample: Optional[Tuple[Mapping_, Pair]] = None


def is_reversible_bruteforce(x: BinaryStructure, guard: int = DEFAULT_GUARD) -> ReversibilityCheck:
    """Enumerate every permutation of the carrier and test Cond(X) = Aut(X)."""
    n = len(x)
    if n > guard:
        raise GuardExceeded(
            f"{n} vertices exceeds the permutation guard of {guard}; "
            "refusing rather than sampling")
    nodes = x.nodes
    idx = {v: i for i, v in enumerate(nodes)}
    edges = [(idx[a], idx[b]) for a, b in sorted(x.edges)]
    rel = set(edges)
    non_edges = [(a, b) for a in range(n) for b in range(n) if (a, b) not in rel]
    conds = autos = 0
    witness = None
    for perm in itertools.permutations(range(n)):
        if not all((perm[a], perm[b]) in rel for a, b in edges):
            continue
        conds += 1
        bad = next(((a, b) for a, b in non_edges if (perm[a], perm[b]) in rel), None)
        if bad is None:
            autos += 1
        elif witness is None:
            mapping = {nodes[i]: nodes[perm[i]] for i in range(n)}
            witness = (mapping, (nodes[bad[0]], nodes[bad[1]]))
    return ReversibilityCheck(witness is None, conds, autos, witness)


# -- condensations between disjoint unions ------------------------------------


@dataclass(frozen=True)
class CondensationDecomposition:
    source_blocks: Tuple[Tuple[str, ...], ...]
    target_blocks: Tuple[Tuple[str, ...], ...]
    index_map: Tuple[int, ...]
    pieces: Tuple[Mapping_, ...]

    def recompose(self) -> Mapping_:
        out: Mapping_ = {}
        for piece in self.pieces:
            out.update(piece)
        return out


def decompose_condensation(f: Mapping[str, str], x: BinaryStructure,
                           y: BinaryStructure) -> CondensationDecomposition:
    """Split a condensation into a component surjection plus monomorphisms."""
    problem = morphism_violation(f, x, y, MorphismKind.CONDENSATION)
    if problem is not None:
        raise WitnessError(f"not a condensation: {problem}")
    xb, yb = components(x), components(y)
    owner = {v: j for j, block in enumerate(yb) for v in block}
    index_map, pieces = [], []
    for block in xb:
        targets = {owner[f[v]] for v in block}
        if len(targets) != 1:
            raise WitnessError(f"component {block} is split across target components")
        j = targets.pop()
        piece = {v: f[v] for v in block}
        problem = morphism_violation(piece, induced(x, block), induced(y, yb[j]),
                                     MorphismKind.MONOMORPHISM)
        if problem is not None:
            raise WitnessError(f"restriction to {block} is not a monomorphism: {problem}")
        index_map.append(j)
        pieces.append(piece)
    for j, block in enumerate(yb):
        images = [set(pieces[i].values()) for i, t in enumerate(index_map) if t == j]
        covered = set().union(*images) if images else set()
        if covered != set(block) or sum(map(len, images)) != len(block):
            raise WitnessError(f"images do not partition target component {j}")
    return CondensationDecomposition(tuple(xb), tuple(yb), tuple(index_map), tuple(pieces))
