import itertools

import pytest
from hypothesis import given, strategies as st

from revstruct.cardinals import ALEPH_0
from revstruct.errors import InputError, WitnessError
from revstruct.families import (
    INCONCLUSIVE, NOT_REVERSIBLE, REVERSIBLE, FamilyVerdict, MergeBlock, MergeWitness, ShiftPlan,
    StrictPair, StructureFamily, Template, TournamentError, condensation_preorder, decide_family,
    merge_witness_search, omega_star_certificate, omega_star_obstruction, orbit_fiber_check,
    parse_family, rich_for_monomorphisms, strict_pair_check, tournament_partition_witness,
    validate_merge_witness, validate_strict_pair,
)
from revstruct.structures import chain, directed_cycle, disjoint_union, is_reversible_bruteforce, structure

INF = ALEPH_0


def sym_cycle(n):
    nodes = [str(i) for i in range(n)]
    edges = set()
    for i in range(n):
        a, b = nodes[i], nodes[(i + 1) % n]
        edges |= {(a, b), (b, a)}
    return structure(nodes, edges)


def complete(n):
    nodes = [str(i) for i in range(n)]
    return structure(nodes, [(a, b) for a in nodes for b in nodes if a != b])


def path(n):
    nodes = [str(i) for i in range(n)]
    return structure(nodes, [(nodes[i], nodes[i + 1]) for i in range(n - 1)])


def fam(*items):
    return StructureFamily.build(items)


# -- file format ---------------------------------------------------------------------


FAMILY_TEXT = """\
# two-cycles and four-cycles
template C2 multiplicity inf
nodes a b
edge a b
edge b a
template C4 multiplicity 3
nodes a b c d
edge a b
edge b c
edge c d
edge d a
"""


def test_parse_family():
    f = parse_family(FAMILY_TEXT)
    assert [t.name for t in f] == ["C2", "C4"]
    assert f.get("C2").multiplicity == INF and f.get("C4").multiplicity == 3
    assert parse_family(f.to_text()) == f


@pytest.mark.parametrize("text, line", [
    ("nodes a\n", 1),
    ("template A multiplicity 0\nnodes a\n", 1),
    ("template A multiplicity inf\nnodes a b\n", 1),
    ("template A multiplicity 1\nnodes a\ntemplate A multiplicity 1\nnodes b\n", 1),
    ("template A multiplicity 1\nnodes a\nedge a z\n", 3),
    ("template A\nnodes a\n", 1),
])
def test_parse_family_errors(text, line):
    with pytest.raises(InputError) as exc:
        parse_family(text, "fam.txt")
    assert exc.value.line == line


def test_build_merges_isomorphic_templates():
    f = fam(("A", chain(2), 2), ("B", chain(2, "x"), 3), ("C", chain(3), INF), ("D", chain(3, "y"), 1))
    assert [(t.name, t.multiplicity) for t in f] == [("A", 5), ("C", INF)]
    assert f.merged == (("B", "A"), ("D", "C"))


def test_template_must_be_connected():
    with pytest.raises(ValueError):
        StructureFamily((Template("E", structure("ab"), 1),))


# -- preorder and strict pairs ----------------------------------------------------------


def test_preorder_path_below_cycle():
    f = fam(("P3", path(3), INF), ("C3", directed_cycle(3), INF))
    m = condensation_preorder(f)
    assert m.cell("P3", "C3").relation == "strictly-below"
    assert m.cell("C3", "P3").relation == "strictly-above"
    assert m.complete()


def test_strict_pair_decides():
    f = fam(("P3", path(3), INF), ("C3", directed_cycle(3), INF))
    v = decide_family(f)
    assert v.status == NOT_REVERSIBLE and v.evidence == "strict-pair"
    validate_strict_pair(f, v.strict_pair)


def test_strict_pair_needs_both_infinite():
    f = fam(("P3", path(3), INF), ("C3", directed_cycle(3), 1))
    assert strict_pair_check(f) == []


def test_tampered_strict_pair_rejected():
    f = fam(("P3", path(3), INF), ("C3", directed_cycle(3), INF))
    good = strict_pair_check(f)[0]
    bad = StrictPair(good.below, good.above, {"0": "0", "1": "0", "2": "2"})
    with pytest.raises(WitnessError):
        validate_strict_pair(f, bad)
    with pytest.raises(WitnessError):
        validate_strict_pair(f, StrictPair(good.above, good.below, good.mapping))


# -- merges -------------------------------------------------------------------------------


def test_two_cycles_merge_into_four_cycle():
    f = fam(("C2", complete(2), INF), ("C4", sym_cycle(4), INF))
    v = decide_family(f)
    assert v.status == NOT_REVERSIBLE and v.merge is not None
    validate_merge_witness(f, v.merge)
    assert v.merge.target == "C4" and v.merge.parts == ("C2", "C2")


def test_two_and_five_cycles_reversible():
    f = fam(("C2", complete(2), INF), ("C5", sym_cycle(5), INF))
    v = decide_family(f)
    assert v.status == REVERSIBLE


def test_complete_graphs_follow_cardinal_rule():
    assert decide_family(fam(("K2", complete(2), INF), ("K5", complete(5), INF))).status == REVERSIBLE
    v = decide_family(fam(("K2", complete(2), INF), ("K4", complete(4), INF)))
    assert v.status == NOT_REVERSIBLE
    validate_merge_witness(fam(("K2", complete(2), INF), ("K4", complete(4), INF)), v.merge)


def test_rich_family_with_finite_target():
    f = fam(("K2", complete(2), INF), ("K4", complete(4), 1))
    assert rich_for_monomorphisms(f) is None
    assert decide_family(f).status == REVERSIBLE


def test_richness():
    # every pair in a 3-cycle spans an edge, but the ends of a 3-path do not
    assert rich_for_monomorphisms(fam(("P2", path(2), INF), ("C3", directed_cycle(3), INF))) is None
    s, t, subset = rich_for_monomorphisms(fam(("P2", path(2), INF), ("P3", path(3), INF)))
    assert (s, t, subset) == ("P2", "P3", ("0", "2"))


def test_merge_search_max_parts():
    f = fam(("K1", structure("a"), INF), ("K3", complete(3), INF))
    assert merge_witness_search(f, max_parts=2) is None
    w = merge_witness_search(f, max_parts=3)
    assert w is not None and len(w.blocks) == 3
    with pytest.raises(ValueError):
        merge_witness_search(f, max_parts=1)


def test_merge_needs_infinite_target():
    f = fam(("C2", complete(2), INF), ("C4", sym_cycle(4), 1))
    assert merge_witness_search(f) is None


def _witness():
    f = fam(("C2", complete(2), INF), ("C4", sym_cycle(4), INF))
    return f, merge_witness_search(f)


def test_tampered_merge_witness_rejected():
    f, w = _witness()
    b0, b1 = w.blocks
    overlapping = MergeWitness(w.target, (b0, MergeBlock(b1.part, b0.vertices, b0.mapping)))
    with pytest.raises(WitnessError):
        validate_merge_witness(f, overlapping)
    with pytest.raises(WitnessError):
        validate_merge_witness(f, MergeWitness(w.target, (b0,)))
    broken = MergeBlock(b1.part, b1.vertices, {k: b1.vertices[0] for k in b1.mapping})
    with pytest.raises(WitnessError):
        validate_merge_witness(f, MergeWitness(w.target, (b0, broken)))


def test_shift_plan_is_a_surjection_with_one_merged_fiber():
    plan = ShiftPlan("T", (("A", 2), ("B", 1)))
    window = 30
    indices = [(n, k) for n in "TAB" for k in range(window)]
    images = {plan.apply(i) for i in indices}
    for i in indices[:window // 2]:
        assert i in images
    assert sorted(plan.preimage(("T", 0))) == [("A", 0), ("A", 1), ("B", 0)]
    for i in indices:
        for p in plan.preimage(i):
            assert plan.apply(p) == i


def test_verdict_text_round_trip():
    f, w = _witness()
    v = decide_family(f)
    assert FamilyVerdict.from_text(v.to_text()) == v
    sp = decide_family(fam(("P3", path(3), INF), ("C3", directed_cycle(3), INF)))
    assert FamilyVerdict.from_text(sp.to_text()) == sp


def test_verdict_from_text_rejects_wrong_shift():
    f, w = _witness()
    text = decide_family(f).to_text().replace("C4[n] -> C4[n+1]", "C4[n] -> C4[n+2]")
    with pytest.raises(InputError):
        FamilyVerdict.from_text(text)


# -- finite families -------------------------------------------------------------------------


def test_finite_index_set():
    v = decide_family(fam(("P3", path(3), 3), ("C3", directed_cycle(3), 4)))
    assert v.status == REVERSIBLE and v.certificate.name == "finite-index-set"


@given(st.lists(st.tuples(st.sampled_from(["p2", "p3", "c3", "k2", "k3"]), st.integers(1, 2)),
                min_size=1, max_size=3))
def test_finite_families_match_brute_force(items):
    shapes = {"p2": path(2), "p3": path(3), "c3": directed_cycle(3), "k2": complete(2), "k3": complete(3)}
    f = fam(*[(f"T{i}", shapes[s], m) for i, (s, m) in enumerate(items)])
    copies = [t.structure for t in f for _ in range(t.multiplicity)]
    if sum(map(len, copies)) > 8:
        return
    assert decide_family(f).status == REVERSIBLE
    assert is_reversible_bruteforce(disjoint_union(copies)).reversible


# -- tournaments -------------------------------------------------------------------------------


def test_tournament_partition():
    out = tournament_partition_witness(chain(4), [chain(2), chain(2)])
    assert out is not None and sorted(k for k, _, _ in out) == [0, 1]
    assert tournament_partition_witness(directed_cycle(3), [chain(1), chain(2)]) is not None


def test_tournament_partition_impossible():
    cyc = directed_cycle(3)
    assert tournament_partition_witness(chain(3), [cyc]) is None


def test_tournament_error_names_pair():
    with pytest.raises(TournamentError) as exc:
        tournament_partition_witness(path(3), [chain(3)])
    assert exc.value.pair == ("0", "2")


# -- orbit and fiber ------------------------------------------------------------------------------


def test_orbit_fiber_example():
    f = {0: 0, 1: 0, 2: 1, 3: 2}
    r = orbit_fiber_check(f, 0)
    assert r.fiber == (0, 1) and r.orbit == (0,) and r.holds


def test_orbit_fiber_preconditions():
    with pytest.raises(ValueError):
        orbit_fiber_check({0: 0, 1: 1}, 0)
    with pytest.raises(ValueError):
        orbit_fiber_check({0: 0, 1: 0}, 0, require_surjective=True)
    with pytest.raises(ValueError):
        orbit_fiber_check({0: 5}, 0)


@given(st.integers(2, 5).flatmap(lambda n: st.tuples(st.just(n), st.lists(st.integers(0, n - 1), min_size=n, max_size=n))))
def test_orbit_meets_fiber_at_most_once(data):
    n, values = data
    f = dict(enumerate(values))
    for j in range(n):
        if values.count(j) >= 2:
            assert orbit_fiber_check(f, j).holds


# -- omega* sequences ------------------------------------------------------------------------------


def test_omega_star_obstruction_found():
    f = fam(("K3", complete(3), 1), ("K2", complete(2), 1), ("K1", structure("a"), INF))
    assert omega_star_obstruction(f) == ("K3", "K2", "K1")
    assert omega_star_certificate(f) is None


def test_omega_star_certificate_incomparable():
    f = fam(("C3", directed_cycle(3), INF), ("K2", complete(2), 1))
    cert = omega_star_certificate(f)
    assert cert is not None and cert.name == "trivial-omega-star-sequences"


def test_inconclusive_reports_notes():
    f = fam(("K3", complete(3), 1), ("P2", path(2), INF), ("C3", directed_cycle(3), 1))
    v = decide_family(f, guard=2)
    assert v.status == INCONCLUSIVE and v.notes
