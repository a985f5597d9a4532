import random
from fractions import Fraction

import pytest

from oagfork.errors import ConfigurationError
from oagfork.goldens import SQRT2_SPEC, orthogonality_scene
from oagfork.numberfield import FieldSpec
from oagfork.oag_model import (
    AmbientScene,
    ArchClass,
    SpanHandle,
    Slot,
    arch_class,
    arch_classes_of_span,
    compare_elements,
    minimal_residue,
    span_query,
)

G = orthogonality_scene()
SCENE = G.scene


def _rand_element(rng, scene, height=4):
    return scene.element(
        [
            [Fraction(rng.randint(-height, height), rng.randint(1, height)) for _ in range(s.dim)]
            for s in scene.slots
        ]
    )


def test_compare_paper_constants():
    assert compare_elements(G.named("c1"), G.named("c2")) < 0
    assert compare_elements(G.named("c1"), G.named("c1")) == 0


def test_lex_dominance():
    spec = FieldSpec.rationals()
    scene = AmbientScene("dense", (Slot((spec.one(),)),) * 3, spec)
    x = scene.element([(0,), (5,), (0,)])
    y = scene.element([(0,), (0,), (10**6,)])
    assert compare_elements(x, y) > 0


def test_arch_class_examples():
    spec = FieldSpec.rationals()
    scene = AmbientScene("dense", (Slot((spec.one(),)),) * 3, spec)
    x = scene.element([(0,), (3,), (2,)])
    assert arch_class(x) == ArchClass(1)
    assert arch_class(scene.zero()) == ArchClass.zero()
    # the intermediate-class element sits strictly below c2's class
    assert arch_class(G.named("c3")) < arch_class(G.named("c2"))
    assert arch_class(G.named("c3")) > arch_class(G.named("e2"))


def test_class_ordering():
    assert ArchClass.zero() < ArchClass(3) < ArchClass(0)
    assert max(ArchClass(2), ArchClass(1)) == ArchClass(1)


def test_span_query_examples():
    A = G.span_a()
    assert span_query(A, G.named("e1")) == ("member", None)
    status, residue = span_query(A, G.named("c2"))
    assert status == "nonmember" and residue is not None
    # sqrt2-direction against the rational direction of the same slot
    one_dir = SpanHandle(SCENE, [SCENE.unit_vector(0, 0)])
    assert span_query(one_dir, SCENE.unit_vector(0, 1))[0] == "nonmember"


def test_span_query_roundtrip_random():
    rng = random.Random(1)
    for _ in range(40):
        g1, g2 = _rand_element(rng, SCENE), _rand_element(rng, SCENE)
        V = SpanHandle(SCENE, [g1, g2])
        q1, q2 = Fraction(rng.randint(-3, 3)), Fraction(rng.randint(-3, 3))
        assert V.contains(g1.scale(q1) + g2.scale(q2))


def test_arch_classes_of_span_examples():
    x = G.named("c3")
    assert arch_classes_of_span(SpanHandle(SCENE, [x])) == ((arch_class(x), 1),)
    V = SpanHandle(SCENE, [SCENE.unit_vector(0, 0), SCENE.unit_vector(0, 1)])
    assert arch_classes_of_span(V) == ((ArchClass(0), 2),)
    W = SpanHandle(SCENE, [SCENE.unit_vector(0, 0), SCENE.unit_vector(1, 0)])
    assert arch_classes_of_span(W) == ((ArchClass(0), 1), (ArchClass(1), 1))
    assert sum(m for _, m in arch_classes_of_span(W)) <= W.dim


def test_order_compatible_with_addition():
    rng = random.Random(2)
    for _ in range(60):
        x, y, z = (_rand_element(rng, SCENE) for _ in range(3))
        c = compare_elements(x, y)
        assert compare_elements(x + z, y + z) == c
        if c < 0:
            assert x < y
        # strict total order: exactly one of <,=,> holds
        assert sorted([compare_elements(x, y), compare_elements(y, x)]) in (
            [-1, 1],
            [0, 0],
        )


def test_ultrametric_and_strict_case():
    rng = random.Random(3)
    for _ in range(60):
        x, y = _rand_element(rng, SCENE), _rand_element(rng, SCENE)
        assert arch_class(x - y) <= max(arch_class(x), arch_class(y))
        if arch_class(x) < arch_class(y):
            assert arch_class(x + y) == arch_class(y)


def test_same_class_mutually_bounded():
    rng = random.Random(4)
    for _ in range(40):
        x, y = _rand_element(rng, SCENE), _rand_element(rng, SCENE)
        if arch_class(x) != arch_class(y) or x.is_zero():
            continue
        absx = x if x.sign() > 0 else -x
        absy = y if y.sign() > 0 else -y
        n = 1
        while not (absx <= absy.scale(n)):
            n += 1
            assert n < 10_000
        assert absx <= absy.scale(n)


def test_minimal_residue_properties():
    rng = random.Random(5)
    A = G.span_a()
    for _ in range(40):
        x = _rand_element(rng, SCENE)
        r, a = minimal_residue(x, A)
        assert A.contains(a)
        assert (r + a - x).is_zero()
        # minimality: no generator combination lowers the class further
        for b in A.basis:
            for q in (Fraction(1), Fraction(-1), Fraction(1, 2)):
                assert arch_class(r - b.scale(q)) >= arch_class(r)


def test_scene_validation():
    spec = FieldSpec.rationals()
    with pytest.raises(ConfigurationError):
        AmbientScene("dense", (), spec)
    with pytest.raises(ConfigurationError):
        AmbientScene("odd", (Slot((spec.one(),)),), spec)
    with pytest.raises(ConfigurationError):
        # discrete scene must end with the unit slot
        AmbientScene("discrete", (Slot((spec.one(),)), Slot((spec.rational(2),))), spec)
    ok = AmbientScene("discrete", (Slot((spec.one(),)), Slot((spec.one(),))), spec)
    assert not ok.unit().is_zero()
    with pytest.raises(ConfigurationError):
        bad = AmbientScene(
            "dense",
            (Slot((SQRT2_SPEC.one(), SQRT2_SPEC.rational(2))),),
            SQRT2_SPEC,
        )
        bad.sanity_check_independence()


def test_mismatched_scene_error():
    spec = FieldSpec.rationals()
    other = AmbientScene("dense", (Slot((spec.one(),)),), spec)
    with pytest.raises(ConfigurationError):
        compare_elements(G.named("c1"), other.zero())
