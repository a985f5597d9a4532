import random
from fractions import Fraction

import pytest

from oagfork.errors import ConfigurationError, UsageError
from oagfork.extension_space import (
    INNER_AND_OUTER,
    OUTER_ONLY,
    classify_block,
    gluing_plan,
    space_descriptor,
    weakly_orthogonal,
)
from oagfork.goldens import extension_count_scene, orthogonality_scene
from oagfork.oag_model import SpanHandle

EXT = extension_count_scene()
A_EXT = EXT.span_a()
B_EXT = EXT.span_ab()
ORTH = orthogonality_scene()


def test_singleton_extension_counts():
    # c1 = sqrt2 + eps: its base-Archimedean nature forces the outer choice
    one = classify_block([EXT.named("c1")], A_EXT, B_EXT)
    assert len(one.sub_blocks) == 1
    assert one.sub_blocks[0].invariant_extension_count == 1
    assert one.sub_blocks[0].available == OUTER_ONLY
    assert one.strong_extension_count == 1
    # c2 = eps*sqrt2: both bracketing groups persist, two extensions
    two = classify_block([EXT.named("c2")], A_EXT, B_EXT)
    assert two.sub_blocks[0].invariant_extension_count == 2
    assert two.sub_blocks[0].available == INNER_AND_OUTER
    assert two.strong_extension_count == 2
    assert two.middle_segment == (0,)


def test_pair_block_single_strong_extension():
    pair = classify_block([EXT.named("c1"), EXT.named("c2")], A_EXT, B_EXT)
    # one sub-block (same opened class), the Archimedean member forces outer
    assert len(pair.sub_blocks) == 1
    assert pair.sub_blocks[0].invariant_extension_count == 1
    assert pair.outer_segment == (0,) and pair.middle_segment == ()
    assert pair.strong_extension_count == 1


def test_classify_block_precondition_errors():
    with pytest.raises(UsageError):
        classify_block([], A_EXT, B_EXT)
    with pytest.raises(UsageError):
        classify_block([EXT.named("rt2")], A_EXT, B_EXT)  # not ramified over B
    x = EXT.named("c2")
    with pytest.raises(UsageError):
        classify_block([x, x.scale(2)], A_EXT, B_EXT)  # not separated


def test_gluing_plan_orders():
    two = classify_block([EXT.named("c2")], A_EXT, B_EXT)
    all_inner = gluing_plan(two, inner_middle=1)
    assert all_inner.steps == ((0, "inner"),)
    all_outer = gluing_plan(two, inner_middle=0)
    assert all_outer.steps == ((0, "outer"),)
    with pytest.raises(ConfigurationError):
        gluing_plan(two, inner_middle=7)


def test_gluing_plan_multi_class_order():
    scene = EXT.scene
    # two ramified singletons opening distinct classes within one block:
    # eps and a lower-class companion would need another slot; reuse the
    # orthogonality scene's intermediate class instead
    G = ORTH
    A = G.span_a()
    B = A
    c3 = G.named("c3")
    cls = classify_block([c3], A, B)
    plan = gluing_plan(cls)
    assert [side for _, side in plan.steps] in (["inner"], ["outer"])


def test_weak_orthogonality_golden():
    A = ORTH.span_a()
    assert weakly_orthogonal([ORTH.named("c2")], [ORTH.named("c1")], A)
    assert weakly_orthogonal([ORTH.named("c2")], [ORTH.named("c3")], A)
    assert not weakly_orthogonal([ORTH.named("c2")], [ORTH.named("c2")], A)
    # same level-2 key engineered from one ramified block split in two
    assert not weakly_orthogonal(
        [ORTH.named("c3")], [ORTH.named("c3").scale(2)], A
    )
    with pytest.raises(UsageError):
        weakly_orthogonal([ORTH.named("e1")], [ORTH.named("c1")], A)


def test_space_descriptor_dependent_input_empty():
    from oagfork.goldens import trapped_interval_scene

    T = trapped_interval_scene()
    desc = space_descriptor(
        [T.named("c1")], T.span("u", "c2"), T.span("u", "rt2", "c2")
    )
    assert desc.empty


def test_space_descriptor_two_point_coproduct():
    desc = space_descriptor([EXT.named("c2")], A_EXT, B_EXT)
    assert not desc.empty
    assert desc.factor_count == 1
    factor = desc.factors[0]
    assert len(factor.summands) == 2
    assert all(s.parameter_count == s.parameter_count for s in factor.summands)
    # no Archimedean part: the all-inner summand has no free parameters
    assert min(s.parameter_count for s in factor.summands) == 0
    assert max(s.parameter_count for s in factor.summands) == 1


def test_space_descriptor_pure_archimedean_singleton():
    G = ORTH
    A = G.span_a()
    desc = space_descriptor([G.named("c1")], A, A)
    assert not desc.empty
    assert desc.factor_count == 1
    factor = desc.factors[0]
    assert factor.arch_size == 1 and factor.ram_size == 0
    assert factor.summands[0].parameter_count == 1


def test_space_descriptor_factor_count_matches_blocks():
    desc = space_descriptor(
        [EXT.named("c1"), EXT.named("c2")], A_EXT, B_EXT
    )
    assert not desc.empty
    # both members share one level-1 block over the extension
    assert desc.factor_count == 1
    # pair block: single strong extension, so a single summand
    assert len(desc.factors[0].summands) == 1


def test_classification_invariance_under_representation():
    rng = random.Random(3)
    base = classify_block([EXT.named("c1"), EXT.named("c2")], A_EXT, B_EXT)
    for _ in range(8):
        # invertible rational transform + base translations
        a, b, d = (Fraction(rng.randint(-3, 3)) for _ in range(3))
        m00 = Fraction(rng.choice([1, 2, -1]))
        m11 = Fraction(rng.choice([1, 3, -2]))
        x = EXT.named("c1").scale(m00) + EXT.named("u").scale(a)
        y = (
            EXT.named("c2").scale(m11)
            + EXT.named("c1").scale(b)
            + EXT.named("u").scale(d)
        )
        # keep the pair a separated ramified block: c1 must stay present
        got = classify_block([x, y], A_EXT, B_EXT)
        assert len(got.sub_blocks) == len(base.sub_blocks)
        assert got.strong_extension_count == base.strong_extension_count
        assert [s.invariant_extension_count for s in got.sub_blocks] == [
            s.invariant_extension_count for s in base.sub_blocks
        ]
