import pytest
from hypothesis import given, strategies as st

from revstruct import blocks as bk
from revstruct.blocks import O, P, PS, R, RULES, Block, RewriteStep, measure, mirror_blocks, rewrite
from revstruct.ordinals import OMEGA, ONE, ZERO, Ordinal, omega_power
from revstruct.presentations import (
    OrdinalPresentation, SumPresentation, check_even_odd_split, check_isomorphism, check_rewrite,
    decode_multiset, decode_tuple, encode_multiset, encode_tuple, pair, unpair,
)

W = OMEGA
WINDOW = 1500

small_ordinal = st.builds(
    lambda c2, c1, c0, big: Ordinal(tuple(t for t in (((W, 1),) if big else ()) + (
        (Ordinal.of(2), c2), (ONE, c1), (ZERO, c0)) if t[1])),
    st.integers(0, 2), st.integers(0, 2), st.integers(0, 3), st.booleans())
positive_ordinal = small_ordinal.filter(bool)
blocks_strategy = st.lists(st.builds(Block, st.sampled_from([O, R, P, PS]), positive_ordinal),
                           min_size=1, max_size=4).map(tuple)


def has_minimum(blocks):
    """Independent invariant: does the sum have a least element?"""
    blocks = [b for b in blocks if b.param]
    if not blocks:
        return False
    b = blocks[0]
    if b.kind == O:
        return True
    if b.kind == P:
        return False
    return b.param.is_successor()


def has_maximum(blocks):
    return has_minimum(mirror_blocks(blocks))


# -- coding helpers ----------------------------------------------------------------------


@given(st.integers(0, 10 ** 6))
def test_pairing_inverse(z):
    assert pair(*unpair(z)) == z


@given(st.lists(st.integers(0, 50), min_size=1, max_size=4))
def test_tuple_coding(xs):
    assert decode_tuple(encode_tuple(xs), len(xs)) == tuple(xs)


@given(st.lists(st.integers(0, 20), max_size=5))
def test_multiset_coding(ms):
    assert sorted(decode_multiset(encode_multiset(ms))) == sorted(ms)


# -- ordinal presentations -----------------------------------------------------------------


@pytest.mark.parametrize("a", [Ordinal.of(5), W, W * 2 + 3, W ** 2, W ** 3 * 2 + W, W ** W, W ** (W + 1) + 4])
def test_presentation_is_a_bijection_onto_the_ordinal(a):
    p = OrdinalPresentation(a)
    n = 3000 if p.size is None else p.size
    elems = [p.element(i) for i in range(n)]
    assert len(set(elems)) == n
    assert all(e < a for e in elems)
    assert all(p.index(e) == i for i, e in enumerate(elems))


def test_presentation_reaches_everything_below_w_squared():
    p = OrdinalPresentation(W ** 2)
    seen = {p.element(i) for i in range(2000)}
    assert all(W * j + k in seen for j in range(10) for k in range(10))


# -- rules ---------------------------------------------------------------------------------------


@pytest.mark.parametrize("rule", RULES, ids=lambda r: r.name)
@given(st.data())
def test_rule_instances_pass_window_oracle(rule, data):
    before = data.draw(st.lists(st.builds(Block, st.sampled_from([O, R, P, PS]), positive_ordinal),
                                min_size=rule.width, max_size=rule.width).map(tuple))
    after = rule.build(before)
    if after is None:
        return
    step = RewriteStep(rule.name, 0, before, after)
    assert check_rewrite(step, WINDOW), step
    assert has_minimum(before) == has_minimum(after)
    assert has_maximum(before) == has_maximum(after)


# concrete instances so every rule is exercised even when random draws miss it
INSTANCES = [
    ("regroup-power-head", (Block(P, W * 2 + 3),)),
    ("regroup-power-head", (Block(P, Ordinal.of(3)),)),
    ("regroup-power-tail", (Block(PS, W ** 2 + W),)),
    ("flip-finite-reversed", (Block(R, Ordinal.of(4)),)),
    ("merge-ordinals", (Block(O, W + 2), Block(O, W ** 2 + 1))),
    ("merge-reversed", (Block(R, W * 3), Block(R, W ** 2 + 1))),
    ("absorb-finite-tail", (Block(R, W ** 2), Block(O, Ordinal.of(3)))),
    ("shift-reversed-head", (Block(O, W), Block(R, W ** 2 + 2))),
    ("absorb-power-head", (Block(P, W ** 2), Block(O, W ** 2 * 3 + W))),
    ("absorb-power-tail", (Block(R, W ** 2 * 2 + 5), Block(PS, W ** 2))),
]


@pytest.mark.parametrize("name, before", INSTANCES, ids=[n for n, _ in INSTANCES])
def test_rule_instance_full_window(name, before):
    rule = bk.RULES_BY_NAME[name]
    after = rule.build(before)
    assert after is not None
    assert check_rewrite(RewriteStep(name, 0, before, after), 10_000)
    assert measure(after) < measure(before)


def test_all_rules_covered():
    assert {n for n, _ in INSTANCES} == {r.name for r in RULES}


@given(blocks_strategy)
def test_rewrite_terminates_and_is_idempotent(blocks):
    final, steps = rewrite(blocks)
    again, more = rewrite(final)
    assert again == final and more == []
    current = bk.drop_empty(blocks)
    for s in steps:
        assert measure(s.after) < measure(s.before)
        i = s.position
        assert current[i:i + len(s.before)] == s.before
        nxt = current[:i] + s.after + current[i + len(s.before):]
        assert measure(nxt) < measure(current)
        current = nxt
    assert current == final


@given(blocks_strategy)
def test_rewrite_steps_pass_oracle(blocks):
    _, steps = rewrite(blocks)
    for s in steps:
        assert check_rewrite(s, WINDOW), s


def test_mirrored_rules_commute_with_mirror():
    for name, before in INSTANCES:
        after = bk.RULES_BY_NAME[name].build(before)
        final_a, _ = rewrite(mirror_blocks(before))
        final_b, _ = rewrite(mirror_blocks(after))
        assert final_a == final_b


# -- negative controls -------------------------------------------------------------------------------


def test_oracle_rejects_a_wrong_map():
    before = (Block(O, W), Block(O, W))
    after = (Block(O, W * 2),)
    swap = lambda x: (0, W + x[1]) if x[0] == 0 else (0, x[1])
    back = lambda y: (1, y[1]) if y[1] < W else (0, W.left_subtract(y[1]))
    assert not check_isomorphism(before, after, swap, back, 500)


def test_point_before_reversed_omega_is_not_absorbed():
    # 1 + w* has a least element and w* does not, so no isomorphism exists
    before = (Block(O, ONE), Block(R, W))
    after = (Block(R, W),)
    assert has_minimum(before) and not has_minimum(after)
    shift = lambda x: (0, Ordinal.of(0)) if x[0] == 0 else (0, x[1] + 1)
    unshift = lambda y: (0, ZERO) if y[1] == 0 else (1, Ordinal.of(int(y[1]) - 1))
    assert not check_isomorphism(before, after, shift, unshift, 500)
    assert rewrite(before)[0] == before


def test_point_after_reversed_omega_is_absorbed():
    final, steps = rewrite((Block(R, W), Block(O, ONE)))
    assert final == (Block(R, W),) and steps[0].rule == "absorb-finite-tail"


# -- even/odd split ------------------------------------------------------------------------------------


@pytest.mark.parametrize("blocks", [
    (Block(O, W ** 2),),
    (Block(P, W ** 2), Block(O, W ** 5)),
    (Block(R, W ** 3), Block(PS, W)),
    (Block(O, W * 2), Block(R, W ** 2)),
], ids=str)
def test_even_odd_halves_are_copies(blocks):
    even, odd = check_even_odd_split(blocks, 5000)
    assert even and odd
