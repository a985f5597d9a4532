"""Worked example configurations used by the self-test suite and the
golden tests.  Each builder returns the scene together with the named
elements and the standard parameter spans."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .numberfield import FieldSpec
from .oag_model import AmbientScene, GroupElement, Slot, SpanHandle

SQRT2_SPEC = FieldSpec.make([-2, 0, 1], (1, 2))
# theta = sqrt(2) + sqrt(3); hosts both radicals exactly
SQRT23_SPEC = FieldSpec.make([1, 0, -10, 0, 1], (3, 4))

SQRT2_IN_SQRT23 = (0, Fraction(-9, 2), 0, Fraction(1, 2))  # (theta^3 - 9 theta)/2
SQRT3_IN_SQRT23 = (0, Fraction(11, 2), 0, Fraction(-1, 2))  # (11 theta - theta^3)/2


@dataclass(frozen=True)
class Golden:
    scene: AmbientScene
    elements: dict
    a_names: tuple
    b_names: tuple
    c_names: tuple

    def named(self, name: str) -> GroupElement:
        return self.elements[name]

    def span(self, *names: str) -> SpanHandle:
        return SpanHandle(self.scene, [self.elements[n] for n in names])

    def span_a(self) -> SpanHandle:
        return self.span(*self.a_names)

    def span_ab(self) -> SpanHandle:
        return self.span(*(self.a_names + self.b_names))


def orthogonality_scene() -> Golden:
    """Three-class rational lattice with an extra intermediate class.

    Elements: c1 lives in the radical direction of the least significant
    slot, c2 in the radical direction of the most significant slot, c3 in
    a class strictly between the top two rational classes.
    """
    spec = SQRT2_SPEC
    one = spec.one()
    rt2 = spec.theta()
    scene = AmbientScene(
        kind="dense",
        slots=(Slot((one, rt2)), Slot((one,)), Slot((one,)), Slot((one, rt2))),
        field=spec,
    )
    els = {
        "e1": scene.unit_vector(0, 0),
        "e2": scene.unit_vector(2, 0),
        "e3": scene.unit_vector(3, 0),
        "c1": scene.unit_vector(3, 1),
        "c2": scene.unit_vector(0, 1),
        "c3": scene.unit_vector(1, 0),
    }
    return Golden(scene, els, ("e1", "e2", "e3"), (), ("c1", "c2", "c3"))


def infinitesimal_scene() -> Golden:
    """Dense scene with Delta(c) < Delta(eps) < Delta(1): the base is the
    rationals, the extension adds eps, and c sits below both."""
    spec = FieldSpec.rationals()
    one = spec.one()
    scene = AmbientScene(
        kind="dense",
        slots=(Slot((one,)), Slot((one,)), Slot((one,))),
        field=spec,
    )
    els = {
        "u": scene.unit_vector(0, 0),
        "eps": scene.unit_vector(1, 0),
        "c": scene.unit_vector(2, 0),
    }
    return Golden(scene, els, ("u",), ("eps",), ("c",))


def paired_radicals_scene() -> Golden:
    """c = (sqrt2 + eps, sqrt3 + eps*sqrt2) over base Q, extension
    Q + Q*sqrt2 + Q*sqrt3."""
    spec = SQRT23_SPEC
    one = spec.one()
    rt2 = spec.element(SQRT2_IN_SQRT23)
    rt3 = spec.element(SQRT3_IN_SQRT23)
    scene = AmbientScene(
        kind="dense",
        slots=(Slot((one, rt2, rt3)), Slot((one, rt2))),
        field=spec,
    )
    els = {
        "u": scene.unit_vector(0, 0),
        "rt2": scene.unit_vector(0, 1),
        "rt3": scene.unit_vector(0, 2),
        "c1": scene.element({0: (0, 1, 0), 1: (1, 0)}),
        "c2": scene.element({0: (0, 0, 1), 1: (0, 1)}),
        "eps": scene.unit_vector(1, 0),
        "eps_rt2": scene.unit_vector(1, 1),
    }
    return Golden(scene, els, ("u",), ("rt2", "rt3"), ("c1", "c2"))


def trapped_interval_scene() -> Golden:
    """c1 = sqrt2 + eps with a second element c2 whose class lies strictly
    between Delta(eps) and Delta(1); over the base joined with c2 the
    interval [sqrt2, sqrt2 + c2] traps c1."""
    spec = SQRT2_SPEC
    one = spec.one()
    rt2 = spec.theta()
    scene = AmbientScene(
        kind="dense",
        slots=(Slot((one, rt2)), Slot((one,)), Slot((one,))),
        field=spec,
    )
    els = {
        "u": scene.unit_vector(0, 0),
        "rt2": scene.unit_vector(0, 1),
        "c2": scene.unit_vector(1, 0),
        "eps": scene.unit_vector(2, 0),
        "c1": scene.element({0: (0, 1), 2: (1,)}),
    }
    return Golden(scene, els, ("u",), ("rt2",), ("c1", "c2"))


def extension_count_scene() -> Golden:
    """c1 = sqrt2 + eps and c2 = eps*sqrt2 over base Q, extension
    Q + Q*sqrt2: the singletons have one and two invariant extensions."""
    spec = SQRT2_SPEC
    one = spec.one()
    rt2 = spec.theta()
    scene = AmbientScene(
        kind="dense",
        slots=(Slot((one, rt2)), Slot((one, rt2))),
        field=spec,
    )
    els = {
        "u": scene.unit_vector(0, 0),
        "rt2": scene.unit_vector(0, 1),
        "c1": scene.element({0: (0, 1), 1: (1, 0)}),
        "c2": scene.element({1: (0, 1)}),
        "eps": scene.unit_vector(1, 0),
    }
    return Golden(scene, els, ("u",), ("rt2",), ("c1", "c2"))
