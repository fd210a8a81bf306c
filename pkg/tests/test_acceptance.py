"""Acceptance criteria, one test each.

Every test prints a single ``[PASS]``/``[FAIL]`` line with its wall time and
fails if the time budget is exceeded.  Run directly with
``python3 tests/test_acceptance.py`` for the summary lines alone.
"""

import functools
import itertools
import random
import sys
import time
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))
from conftest import random_digraph  # noqa: E402

from revstruct.blocks import rewrite
from revstruct.cardinals import (ALEPH_0, CardinalSequence, Progression, decide_reversible,
                                 semigroup_member, NOT_INDEPENDENT)
from revstruct.families import (NOT_REVERSIBLE, REVERSIBLE, StructureFamily, decide_family,
                                orbit_fiber_check, validate_merge_witness)
from revstruct.ordertypes import (Nat, Omega, Pow, Prod, Rev, Sum, classify_csb_limit,
                                  decide_union_reversibility, parse_otp_family,
                                  validate_even_odd_witness)
from revstruct.ordinals import OMEGA, ONE, Ordinal
from revstruct.presentations import check_rewrite
from revstruct.structures import MorphismKind, chain, find_morphisms, is_morphism, is_reversible_bruteforce
from revstruct.wellfounded import FiniteRelation, is_well_founded, product_relation

RESULTS = []


def _emit(line):
    RESULTS.append(line)
    print(line, flush=True)


def criterion(number, budget, title):
    def wrap(fn):
        @functools.wraps(fn)
        def run(*args, **kwargs):
            t0 = time.perf_counter()
            try:
                detail = fn(*args, **kwargs)
            except AssertionError as exc:
                took = time.perf_counter() - t0
                first = str(exc).splitlines()[0] if str(exc) else "assertion failed"
                _emit(f"[FAIL] criterion {number:>2}: {title} ({took:.1f}s / {budget}s) {first}")
                raise
            took = time.perf_counter() - t0
            ok = took < budget
            note = f" {detail}" if detail else ""
            _emit(f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {title} ({took:.1f}s / {budget}s){note}")
            assert ok, f"over time budget: {took:.1f}s >= {budget}s"
        return run
    return wrap


@criterion(1, 60, "finite structures: every condensation onto itself is an automorphism")
def test_criterion_01_finite_reversibility():
    rng = random.Random(2024)
    found = 0
    for _ in range(500):
        x = random_digraph(rng, rng.randint(3, 7))
        conds = find_morphisms(x, x, MorphismKind.CONDENSATION, None)
        assert conds, "identity missing"
        for f in conds:
            assert is_morphism(f, x, x, MorphismKind.ISOMORPHISM), f"non-automorphism {f} on {x}"
        found += len(conds)
        assert is_reversible_bruteforce(x).reversible
    return f"{found} condensations checked"


def _seq(*pairs):
    return CardinalSequence.from_pairs(pairs)


@criterion(2, 1, "cardinal-sequence decider on reference vectors")
def test_criterion_02_cardinal_vectors():
    v = decide_reversible(_seq((2, ALEPH_0), (5, ALEPH_0)))
    assert v.reversible and v.reason == "independent-and-gcd-ok"
    v = decide_reversible(_seq((2, ALEPH_0), (4, ALEPH_0)))
    assert not v.reversible and v.reason == NOT_INDEPENDENT
    assert v.independence.violator == 4 and tuple(v.independence.representation) == (2, 2)
    assert decide_reversible(_seq((1, 5), (2, 7), (ALEPH_0, 3))).reversible
    assert decide_reversible(CardinalSequence.from_pairs([(3, 1)], [Progression(1, 1, 2)])).reversible
    v = decide_reversible(_seq((ALEPH_0, ALEPH_0)))
    assert not v.reversible and v.reason == "not-all-natural"


def _exhaustive_member(n, gens):
    reach = {0}
    for m in range(1, n + 1):
        if any(m - g in reach for g in gens if g <= m):
            reach.add(m)
    return n in reach


@criterion(3, 300, "numerical-semigroup DP agrees with exhaustive search")
def test_criterion_03_semigroup_dp():
    cases = 0
    for size in range(1, 5):
        for K in itertools.combinations(range(1, 21), size):
            for n in range(1, 41):
                rep = semigroup_member(n, K)
                brute = any(sum(c * g for c, g in zip(cs, K)) == n
                            for cs in itertools.product(*(range(n // g + 1) for g in K))) \
                    if size <= 2 else _exhaustive_member(n, K)
                assert (rep is not None) == brute, (n, K)
                if rep is not None:
                    assert sum(rep) == n and all(r in K for r in rep), (n, K, rep)
                cases += 1
    return f"{cases} (n, K) pairs"


@criterion(4, 300, "families of chains agree with the cardinal decider")
def test_criterion_04_chain_families():
    rng = random.Random(7)
    # aleph_0 is drawn half the time; otherwise almost every family is finite-to-one
    mults = [1, 2, 3, 4, 5, 6] + [ALEPH_0] * 6
    counts = {REVERSIBLE: 0, NOT_REVERSIBLE: 0}
    for k in range(50):
        sizes = rng.sample(range(1, 7), rng.randint(1, 4))
        items = [(f"L{s}", chain(s, f"c{s}_"), rng.choice(mults)) for s in sizes]
        fam = StructureFamily.build(items)
        v = decide_family(fam)
        seq = CardinalSequence.from_pairs((len(t), t.multiplicity) for t in fam)
        want = decide_reversible(seq)
        assert v.status == (REVERSIBLE if want.reversible else NOT_REVERSIBLE), (sizes, v.status, want)
        if v.status == NOT_REVERSIBLE:
            assert v.merge is not None, f"no merge witness for {fam.to_text()}"
        if v.merge is not None:
            validate_merge_witness(fam, v.merge)
        counts[v.status] += 1
    return f"{counts[REVERSIBLE]} reversible, {counts[NOT_REVERSIBLE]} not"


@criterion(5, 60, "forward orbit meets a fiber of size >= 2 at most once")
def test_criterion_05_orbit_fiber():
    checked = surjective = 0
    for n in range(1, 7):
        for values in itertools.product(range(n), repeat=n):
            f = dict(enumerate(values))
            if len(set(values)) == n:
                surjective += 1  # bijection: every fiber is a singleton
                continue
            for j in set(values):
                if values.count(j) >= 2:
                    r = orbit_fiber_check(f, j)
                    assert r.holds, (f, j, r)
                    checked += 1
    return f"{checked} (map, fiber) pairs; {surjective} surjections have only singleton fibers"


def _all_relations(n):
    carrier = tuple(range(n))
    pairs = [(a, b) for a in carrier for b in carrier]
    for bits in range(1 << len(pairs)):
        yield FiniteRelation.of(carrier, (p for k, p in enumerate(pairs) if bits >> k & 1))


@criterion(6, 120, "product of cycle-free relations is cycle-free")
def test_criterion_06_product_well_founded():
    # both directions hold for nonempty carriers: a cycle in one factor lifts
    # to the product by holding the other coordinate fixed
    def agrees(a, b):
        return bool(is_well_founded(product_relation(a, b))) == (wf[a] and wf[b])

    small = [r for n in (1, 2) for r in _all_relations(n)]
    three = list(_all_relations(3))
    wf = {r: bool(is_well_founded(r)) for r in small + three}
    pairs = 0
    for a, b in itertools.product(small, repeat=2):
        assert agrees(a, b), (a, b)
        pairs += 1
    acyclic3 = [r for r in three if wf[r]]
    for a, b in itertools.product(acyclic3, repeat=2):
        assert is_well_founded(product_relation(a, b)), (a, b)
    rng = random.Random(11)
    for _ in range(100_000):
        a, b = rng.choice(three), rng.choice(three)
        assert agrees(a, b), (a, b)
    return (f"{pairs} pairs on size <= 2, all {len(acyclic3) ** 2} cycle-free pairs on size 3, "
            f"100000 sampled pairs on size 3")


def _cnf(max_exp, max_coef=3):
    out = []
    for coefs in itertools.product(range(max_coef + 1), repeat=max_exp + 1):
        out.append(Ordinal(tuple((Ordinal.of(max_exp - i), c) for i, c in enumerate(coefs) if c)))
    return out


@criterion(7, 60, "Cantor normal form arithmetic laws")
def test_criterion_07_cnf_laws():
    assert ONE + OMEGA == OMEGA and OMEGA + OMEGA ** 2 == OMEGA ** 2
    assert OMEGA + ONE != OMEGA
    wide = _cnf(3)
    for a in wide:
        for b in wide:
            c = a.compare(b)
            assert c == -b.compare(a) and (c == 0) == (a == b)
            assert (a < b) + (a == b) + (b < a) == 1
            if a.terms and b.terms and a.terms[0][0] < b.terms[-1][0]:
                assert a + b == b
    narrow = _cnf(2)
    for a, b, c in itertools.product(narrow, repeat=3):
        assert (a + b) + c == a + (b + c)
        if a < b and b < c:
            assert a < c
        if a <= b and b <= c:
            assert a <= c
    return f"{len(wide)}^2 pairs, {len(narrow)}^3 triples"


@criterion(8, 1, "limit-type classifier on anchor expressions")
def test_criterion_08_classifier_anchors():
    c = classify_csb_limit("w^2")
    assert c.csb_limit and str(c.normal_form) == "L(w^2)"
    c = classify_csb_limit("w+1")
    assert not c.csb_limit and c.definitive and "successor" in c.reason
    c = classify_csb_limit("w^2*rev(w)+w^5")
    assert c.csb_limit and str(c.normal_form) == "Z(2,5)"
    c = classify_csb_limit("w*rev(w)+1")
    assert not c.csb_limit and c.definitive
    c = classify_csb_limit("w*rev(w)")
    assert c.csb_limit, f"w*rev(w) classified no ({c.reason})"


@criterion(9, 10, "unions of chains: even/odd witness and a finite-to-one family")
def test_criterion_09_union_of_chains():
    v = decide_union_reversibility(parse_otp_family("otp w^2 times inf\n"))
    assert not v.reversible and v.witness is not None
    even, odd = validate_even_odd_witness(v.witness, 10_000)
    assert even.checked_forward == odd.checked_forward == 10_000
    v = decide_union_reversibility(parse_otp_family("otp w times 1\notp w^2 times 1\notp w^3 times 1\n"))
    assert v.reversible


def _rand_ord(r, d):
    if d <= 0 or r.random() < 0.3:
        return r.choice([Nat(r.randint(1, 3)), Omega()])
    k = r.random()
    if k < 0.4:
        return Sum(_rand_ord(r, d - 1), _rand_ord(r, d - 1))
    if k < 0.7:
        return Prod(_rand_ord(r, d - 1), _rand_ord(r, d - 1))
    return Pow(Omega(), r.choice([Nat(r.randint(1, 3)), Omega()]))


def random_expression(r, d):
    """Order-type expression of depth at most d."""
    if d <= 0 or r.random() < 0.2:
        return r.choice([Nat(r.randint(1, 3)), Omega(), Pow(Omega(), Nat(2))])
    k = r.random()
    if k < 0.45:
        return Sum(random_expression(r, d - 1), random_expression(r, d - 1))
    if k < 0.65:
        return Rev(random_expression(r, d - 1))
    if k < 0.85:
        return Prod(random_expression(r, d - 1), _rand_ord(r, 1))
    return _rand_ord(r, d - 1)


@criterion(10, 300, "rewriting terminates, is idempotent, and every step passes the window oracle")
def test_criterion_10_rewrite_sanity():
    r = random.Random(1)
    steps = set()
    reasons = {}
    for _ in range(1000):
        c = classify_csb_limit(random_expression(r, 5))
        reasons[c.reason] = reasons.get(c.reason, 0) + 1
        if c.blocks:
            again, more = rewrite(c.blocks)
            assert again == c.blocks and not more, c.blocks
        if c.normal_form is not None:
            assert classify_csb_limit(c.normal_form.expr()).normal_form == c.normal_form
        steps.update(c.steps)
    for s in sorted(steps, key=repr):
        assert check_rewrite(s, 10_000), s
    return f"{len(steps)} distinct steps; " + ", ".join(f"{k}: {v}" for k, v in sorted(reasons.items()))


if __name__ == "__main__":
    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
