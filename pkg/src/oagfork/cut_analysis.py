"""Unary cut analysis over a parameter span.

For an element d and a span A the cut of d over A is bracketed by two
canonical invariant convex subgroups: `upper` (the largest type-definable
one, an intersection of intervals from above) and `lower` (the smallest
join-definable one, a union of intervals from below, generated by the
stabilizer of the cut).  Both are recorded as descriptors over the finite
chain of scene classes plus a flavor flag; the flag is what separates them
when their class traces coincide.

Two independent routes compute the same data and cross-check each other:
the stabilizer comes from per-class feasibility queries ("is there an
A-point strictly between d and its translate"), while the ramifier and the
residue class come from the greedy descent against the span's echelon
basis.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .errors import UsageError
from .lex_linear import (
    LE,
    LT,
    Atom,
    LinearForm,
    condition_feasible_avoiding,
    expand_atoms,
    feasible,
    interval_meets_span,
    span_point_form,
)
from .oag_model import ArchClass, GroupElement, SpanHandle, arch_class, minimal_residue

TYPE_DEFINABLE = "type_definable"
VEE_DEFINABLE = "vee_definable"

_FLAVOR_RANK = {VEE_DEFINABLE: 0, TYPE_DEFINABLE: 1}


@dataclass(frozen=True)
class ConvexSubgroupDescriptor:
    """A convex subgroup of the ambient, relativized to the scene chain:
    the downward-closed set of scene classes it contains, plus whether it
    is cut out from above (type-definable) or from below (join-definable).
    """

    classes: frozenset
    flavor: str

    def __post_init__(self):
        if self.flavor not in _FLAVOR_RANK:
            raise ValueError(f"unknown flavor {self.flavor!r}")

    def contains_class(self, c: ArchClass) -> bool:
        return c.is_zero or c in self.classes

    def max_class(self) -> Optional[ArchClass]:
        return max(self.classes) if self.classes else None

    def sort_key(self):
        return (len(self.classes), _FLAVOR_RANK[self.flavor])

    def __le__(self, other: "ConvexSubgroupDescriptor") -> bool:
        if self.classes == other.classes:
            return _FLAVOR_RANK[self.flavor] <= _FLAVOR_RANK[other.flavor]
        return self.classes < other.classes

    def __lt__(self, other: "ConvexSubgroupDescriptor") -> bool:
        return self <= other and self != other


def _downward(scene, upto: Optional[ArchClass], *, strict: bool) -> frozenset:
    """Scene classes below the given one (all when upto is None)."""
    chain = scene.arch_chain()
    if upto is None:
        return frozenset(chain)
    if strict:
        return frozenset(c for c in chain if c < upto)
    return frozenset(c for c in chain if c <= upto)


@dataclass(frozen=True)
class CutProfile:
    """The complete unary cut datum of an element over a span."""

    stab_classes: frozenset  # span classes whose translations fix the cut
    upper: ConvexSubgroupDescriptor
    lower: ConvexSubgroupDescriptor
    ramifier: Optional[tuple]  # (anchor: GroupElement, new_class: ArchClass)
    side: Optional[int]  # sign of d - anchor for ramified d
    member: bool = False

    def __post_init__(self):
        if not self.member and not self.lower <= self.upper:
            raise AssertionError("lower convex subgroup exceeds the upper one")

    @property
    def is_ramified(self) -> bool:
        return self.ramifier is not None

    def new_class(self) -> Optional[ArchClass]:
        return self.ramifier[1] if self.ramifier else None


@dataclass(frozen=True)
class CutDescriptor:
    """The cut itself: a span member, a coset of the upper group around
    the element, or one side of the two components the ramifier opens."""

    variant: str  # "member" | "arch_coset" | "ram_component"
    point: GroupElement  # the element (member/arch) or the ramifier anchor
    upper: Optional[ConvexSubgroupDescriptor] = None
    lower: Optional[ConvexSubgroupDescriptor] = None
    side: Optional[int] = None

    def translate(self, a: GroupElement) -> "CutDescriptor":
        return CutDescriptor(self.variant, self.point + a, self.upper, self.lower, self.side)

    def same_cut(self, other: "CutDescriptor") -> bool:
        """Semantic equality: anchors may differ by a harmless translation."""
        if self.variant != other.variant:
            return False
        diff = self.point - other.point
        if self.variant == "member":
            return diff.is_zero()
        if self.upper != other.upper:
            return False
        if self.variant == "arch_coset":
            return self.upper.contains_class(arch_class(diff))
        return (
            self.lower == other.lower
            and self.side == other.side
            and self.lower.contains_class(arch_class(diff))
        )


_profile_cache: dict = {}


def _span_class_representatives(A: SpanHandle):
    """One echelon representative per span class, in chain order."""
    reps = {}
    for b, p in zip(A.basis, A.pivots):
        cls = ArchClass(A.scene.coord_slot(p))
        reps.setdefault(cls, b)
    return reps


def _stab_query(d: GroupElement, A: SpanHandle, rep: GroupElement) -> bool:
    """True when no span point lies strictly between d and d + |rep|."""
    rep_abs = rep if rep.sign() > 0 else -rep
    x = span_point_form("x", A)
    d_form = LinearForm.constant(d)
    upper_form = LinearForm.constant(d + rep_abs)
    return feasible([Atom(d_form - x, LT), Atom(x - upper_form, LT)]) is None


def cut_profile(d: GroupElement, A: SpanHandle) -> CutProfile:
    """Stabilizer classes, the bracketing convex subgroups, and the
    ramification datum of d over span A."""
    key = (d.coords, A)
    cached = _profile_cache.get(key)
    if cached is not None:
        return cached
    scene = d.scene
    span_classes = A.class_set()
    if A.contains(d):
        profile = CutProfile(
            stab_classes=frozenset(span_classes),
            upper=ConvexSubgroupDescriptor(frozenset(), TYPE_DEFINABLE),
            lower=ConvexSubgroupDescriptor(frozenset(), VEE_DEFINABLE),
            ramifier=None,
            side=None,
            member=True,
        )
        _profile_cache[key] = profile
        return profile
    residue, anchor = minimal_residue(d, A)
    nu = arch_class(residue)
    ramified = nu not in span_classes
    stab = frozenset(
        cls for cls, rep in _span_class_representatives(A).items() if _stab_query(d, A, rep)
    )
    expected = frozenset(c for c in span_classes if c < nu)
    if stab != expected:
        raise AssertionError(
            "stabilizer queries disagree with the descent residue; "
            f"queries {sorted(stab)}, residue class {nu}"
        )
    above = sorted(c for c in span_classes if c >= nu)
    mu = above[0] if above else None
    upper = ConvexSubgroupDescriptor(_downward(scene, mu, strict=True), TYPE_DEFINABLE)
    lower = ConvexSubgroupDescriptor(
        _downward(scene, max(stab), strict=False) if stab else frozenset(),
        VEE_DEFINABLE,
    )
    profile = CutProfile(
        stab_classes=stab,
        upper=upper,
        lower=lower,
        ramifier=(anchor, nu) if ramified else None,
        side=residue.sign() if ramified else None,
    )
    _profile_cache[key] = profile
    return profile


def cut_descriptor(d: GroupElement, A: SpanHandle) -> CutDescriptor:
    profile = cut_profile(d, A)
    if profile.member:
        return CutDescriptor("member", d)
    if not profile.is_ramified:
        return CutDescriptor("arch_coset", d, profile.upper, profile.lower)
    anchor, _ = profile.ramifier
    return CutDescriptor("ram_component", anchor, profile.upper, profile.lower, profile.side)


def _side_witness(d: GroupElement, A: SpanHandle, B: SpanHandle, *, below: bool):
    """A span-B point of d's cut over A on the requested side of d, or
    None.  Being in the cut means the closed interval to d avoids span A.
    """
    b = span_point_form("b", B)
    d_form = LinearForm.constant(d)
    if below:
        order = expand_atoms([Atom(b - d_form, LE)])
        meets = interval_meets_span(b, d_form, A)
    else:
        order = expand_atoms([Atom(d_form - b, LE)])
        meets = interval_meets_span(d_form, b, A)
    witness = condition_feasible_avoiding(order, meets)
    if witness is None:
        return None
    return b.value(witness)


def leaning(d: GroupElement, A: SpanHandle, B: SpanHandle):
    """Which side of d the extension's points of the cut live on.

    Returns (verdict, below_point, above_point) with verdict one of
    "left", "right", "both", "trapped":  points on both sides trap the
    element; a side with no witness leaves the element leaning that way;
    no witnesses at all leave it freely movable.
    """
    if not all(B.contains(g) for g in A.basis):
        raise UsageError("leaning requires the base span inside the extension span")
    if A.contains(d):
        raise UsageError("leaning is undefined for members of the base span")
    below = _side_witness(d, A, B, below=True)
    above = _side_witness(d, A, B, below=False)
    if below is not None and above is not None:
        verdict = "trapped"
    elif below is not None:
        verdict = "right"
    elif above is not None:
        verdict = "left"
    else:
        verdict = "both"
    return verdict, below, above


def unary_cut_independent(d: GroupElement, A: SpanHandle, B: SpanHandle):
    """True unless d is trapped between extension points whose interval
    avoids the base span; the failure witness is such an interval."""
    if A.contains(d):
        return True, None
    verdict, below, above = leaning(d, A, B)
    if verdict == "trapped":
        return False, (below, above)
    return True, None


def tuple_cut_independent(Aspan: SpanHandle, Bspan: SpanHandle, Cspan: SpanHandle):
    """The full independence decision at the span level: is there a point
    of the tuple span caught by a closed extension interval that avoids
    the base span?

    Returns (True, None) or (False, (point, lo, hi)).
    """
    if not all(Bspan.contains(g) for g in Aspan.basis):
        raise UsageError("base span must be included in the extension span")
    if not all(Cspan.contains(g) for g in Aspan.basis):
        raise UsageError("base span must be included in the tuple span")
    b1 = span_point_form("b1", Bspan)
    b2 = span_point_form("b2", Bspan)
    pt = span_point_form("pt", Cspan)
    order = expand_atoms([Atom(b1 - pt, LE), Atom(pt - b2, LE)])
    meets = interval_meets_span(b1, b2, Aspan)
    witness = condition_feasible_avoiding(order, meets)
    if witness is None:
        return True, None
    return False, (pt.value(witness), b1.value(witness), b2.value(witness))


def restrict_from_below(desc: ConvexSubgroupDescriptor, D: SpanHandle) -> ConvexSubgroupDescriptor:
    """The join-definable subgroup generated by the span's points inside
    the given group (union of intervals from below)."""
    inside = [c for c in D.class_set() if c in desc.classes]
    classes = _downward(D.scene, max(inside), strict=False) if inside else frozenset()
    return ConvexSubgroupDescriptor(classes, VEE_DEFINABLE)


def restrict_from_above(desc: ConvexSubgroupDescriptor, D: SpanHandle) -> ConvexSubgroupDescriptor:
    """The type-definable subgroup cut out by the span's points outside
    the given group (intersection of intervals from above)."""
    outside = sorted(c for c in D.class_set() if c not in desc.classes)
    upto = outside[0] if outside else None
    return ConvexSubgroupDescriptor(_downward(D.scene, upto, strict=True), TYPE_DEFINABLE)


def profile_cache_clear() -> None:
    _profile_cache.clear()
