"""The computable ambient ordered abelian group.

An ambient configuration ("scene") is a lexicographic stack of finitely
many Archimedean slots, most significant first.  Each slot is a
finite-dimensional Q-vector space embedded in the reals through a list of
declared generators (number-field elements, assumed Q-linearly
independent).  Group elements are rational coordinate vectors per slot;
order is lexicographic by slot, each slot compared through exact sign
determination of the slot value.

Parameter sets are handled as Q-spans with canonical reduced echelon
bases, which makes membership, residues and Archimedean-class bookkeeping
pure rational linear algebra.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .congruence import CongruenceSpec
from .errors import ConfigurationError
from .numberfield import FieldElement, FieldSpec, nf_sign, value_enclosure


@dataclass(frozen=True)
class Slot:
    """One Archimedean component: its declared generators, most to least
    significant slots are ordered by the enclosing scene."""

    generators: tuple  # tuple[FieldElement, ...]

    def __post_init__(self):
        if not self.generators:
            raise ConfigurationError("slot must declare at least one generator")

    @property
    def dim(self) -> int:
        return len(self.generators)


@functools.total_ordering
@dataclass(frozen=True)
class ArchClass:
    """Archimedean class: the leading slot index, or None for zero.

    Classes compare by magnitude scale: the zero class is least, and a
    more significant slot (smaller index) is the larger class.
    """

    slot: Optional[int]

    @staticmethod
    def zero() -> "ArchClass":
        return ArchClass(None)

    @property
    def is_zero(self) -> bool:
        return self.slot is None

    def _key(self):
        return (0, 0) if self.slot is None else (1, -self.slot)

    def __lt__(self, other: "ArchClass") -> bool:
        return self._key() < other._key()

    def __repr__(self):
        return "ArchClass(zero)" if self.slot is None else f"ArchClass(slot={self.slot})"


def _frac_tuple(values: Iterable) -> tuple:
    return tuple(Fraction(v) for v in values)


DENSE = "dense"
DISCRETE = "discrete"


@dataclass(frozen=True)
class AmbientScene:
    """The ambient group template: slots, coefficient field, congruence
    declarations, and the dense/discrete flag.

    In a discrete scene the least significant slot is the unit slot whose
    single generator is the distinguished least positive element; it is
    special only for congruence declarations and parameter presentations,
    Q-spans are taken freely across all slots.
    """

    kind: str
    slots: tuple  # tuple[Slot, ...]
    field: FieldSpec
    congruence: CongruenceSpec = CongruenceSpec()
    n_max_policy: Optional[int] = None

    def __post_init__(self):
        if self.kind not in (DENSE, DISCRETE):
            raise ConfigurationError(f"unknown scene kind {self.kind!r}")
        if not self.slots:
            raise ConfigurationError("scene needs at least one slot")
        for slot in self.slots:
            for g in slot.generators:
                if g.spec != self.field:
                    raise ConfigurationError("slot generator from a foreign field spec")
        if self.kind == DISCRETE:
            unit = self.slots[-1]
            if unit.dim != 1 or not (unit.generators[0] - 1).is_zero():
                raise ConfigurationError(
                    "discrete scene: least significant slot must be the unit slot with generator 1"
                )

    @property
    def n_slots(self) -> int:
        return len(self.slots)

    @property
    def n_coords(self) -> int:
        return sum(s.dim for s in self.slots)

    def slot_offset(self, slot: int) -> int:
        return sum(s.dim for s in self.slots[:slot])

    def coord_slot(self, flat: int) -> int:
        for i, s in enumerate(self.slots):
            if flat < s.dim:
                return i
            flat -= s.dim
        raise IndexError("flat coordinate out of range")

    def arch_chain(self) -> tuple:
        """All scene classes, largest (most significant) first."""
        return tuple(ArchClass(i) for i in range(self.n_slots))

    def element(self, coords) -> "GroupElement":
        """Build an element from {slot_index: coeff_vector} or a full list
        of per-slot coefficient vectors."""
        if isinstance(coords, dict):
            vecs = []
            for i, slot in enumerate(self.slots):
                v = coords.get(i, ())
                v = _frac_tuple(v) + (Fraction(0),) * (slot.dim - len(v))
                if len(v) != slot.dim:
                    raise ConfigurationError(f"slot {i} expects {slot.dim} coefficients")
                vecs.append(v)
        else:
            if len(coords) != self.n_slots:
                raise ConfigurationError("element needs one coefficient vector per slot")
            vecs = []
            for slot, v in zip(self.slots, coords):
                v = _frac_tuple(v)
                if len(v) != slot.dim:
                    raise ConfigurationError("coefficient vector length mismatch")
                vecs.append(v)
        return GroupElement(self, tuple(vecs))

    def zero(self) -> "GroupElement":
        return self.element([[0] * s.dim for s in self.slots])

    def unit(self) -> "GroupElement":
        """The distinguished unit: least positive element in a discrete
        scene, the zero element in a dense one."""
        if self.kind == DISCRETE:
            return self.element({self.n_slots - 1: [1]})
        return self.zero()

    def unit_vector(self, slot: int, gen: int) -> "GroupElement":
        return self.element({slot: [0] * gen + [1]})

    def sanity_check_independence(self, samples: int = 8, seed: int = 0) -> None:
        """Optional authoring-mistake guard: exact sign of a few random
        rational combinations of each slot's generators; an exact zero on a
        nontrivial combination disproves the declared independence."""
        import random

        rng = random.Random(seed)
        for i, slot in enumerate(self.slots):
            if slot.dim == 1:
                if slot.generators[0].is_zero():
                    raise ConfigurationError(f"slot {i} generator is zero")
                continue
            for _ in range(samples):
                coeffs = [Fraction(rng.randint(-9, 9), rng.randint(1, 9)) for _ in range(slot.dim)]
                if all(c == 0 for c in coeffs):
                    continue
                total = self.field.zero()
                for c, g in zip(coeffs, slot.generators):
                    total = total + g.scale(c)
                if total.is_zero():
                    raise ConfigurationError(
                        f"slot {i} generators are rationally dependent (witness {coeffs})"
                    )


@dataclass(frozen=True)
class GroupElement:
    """A point of the ambient template: rational coordinates per slot."""

    scene: AmbientScene
    coords: tuple  # tuple[tuple[Fraction, ...], ...]

    def _check(self, other: "GroupElement") -> None:
        if self.scene != other.scene:
            raise ConfigurationError("elements from different scenes")

    def __add__(self, other: "GroupElement") -> "GroupElement":
        self._check(other)
        return GroupElement(
            self.scene,
            tuple(tuple(a + b for a, b in zip(u, v)) for u, v in zip(self.coords, other.coords)),
        )

    def __sub__(self, other: "GroupElement") -> "GroupElement":
        return self + (-other)

    def __neg__(self) -> "GroupElement":
        return GroupElement(self.scene, tuple(tuple(-a for a in u) for u in self.coords))

    def scale(self, q) -> "GroupElement":
        q = Fraction(q)
        return GroupElement(self.scene, tuple(tuple(q * a for a in u) for u in self.coords))

    def is_zero(self) -> bool:
        return all(a == 0 for u in self.coords for a in u)

    def flat(self) -> tuple:
        return tuple(a for u in self.coords for a in u)

    def slot_value(self, slot: int) -> FieldElement:
        total = self.scene.field.zero()
        for c, g in zip(self.coords[slot], self.scene.slots[slot].generators):
            total = total + g.scale(c)
        return total

    def leading_slot(self) -> Optional[int]:
        for i, u in enumerate(self.coords):
            if any(a != 0 for a in u):
                return i
        return None

    def __lt__(self, other: "GroupElement") -> bool:
        return compare_elements(self, other) < 0

    def __le__(self, other: "GroupElement") -> bool:
        return compare_elements(self, other) <= 0

    def __gt__(self, other: "GroupElement") -> bool:
        return compare_elements(self, other) > 0

    def __ge__(self, other: "GroupElement") -> bool:
        return compare_elements(self, other) >= 0

    def sign(self) -> int:
        lead = self.leading_slot()
        if lead is None:
            return 0
        s = nf_sign(self.slot_value(lead), self.scene.field)
        if s == 0:
            raise ConfigurationError(
                f"declared slot-generator independence violated at slot {lead}"
            )
        return s

    def approx(self, digits: int = 12) -> "list[tuple]":
        """Rational enclosures of the slot values, for reporting only."""
        width = Fraction(1, 10**digits)
        return [value_enclosure(self.slot_value(i), width) for i in range(self.scene.n_slots)]


def compare_elements(x: GroupElement, y: GroupElement) -> int:
    """Lexicographic comparison; -1/0/+1.

    The first slot (most significant) whose coefficient vectors differ
    decides, by the exact sign of the slot-value difference.
    """
    x._check(y)
    for i in range(x.scene.n_slots):
        if x.coords[i] != y.coords[i]:
            s = nf_sign((x - y).slot_value(i), x.scene.field)
            if s == 0:
                raise ConfigurationError(
                    f"declared slot-generator independence violated at slot {i}"
                )
            return s
    return 0


def arch_class(x: GroupElement) -> ArchClass:
    """The Archimedean class: leading nonzero slot, zero class for 0."""
    lead = x.leading_slot()
    return ArchClass(None) if lead is None else ArchClass(lead)


def _echelonize(scene: AmbientScene, vectors: "list[tuple]") -> "tuple[list, list]":
    """Canonical reduced row echelon form over Q on flattened coordinates.

    Slots are processed most significant first, within a slot by generator
    index, so the result is deterministic for a given span.
    """
    rows = [list(v) for v in vectors]
    n = scene.n_coords
    basis: "list[list[Fraction]]" = []
    pivots: "list[int]" = []
    for row in rows:
        for b, p in zip(basis, pivots):
            if row[p] != 0:
                f = row[p]
                row = [a - f * c for a, c in zip(row, b)]
        lead = next((j for j in range(n) if row[j] != 0), None)
        if lead is None:
            continue
        f = row[lead]
        row = [a / f for a in row]
        # reduce previous rows against the new pivot
        for k, (b, p) in enumerate(zip(basis, pivots)):
            if b[lead] != 0:
                basis[k] = [a - b[lead] * c for a, c in zip(b, row)]
        basis.append(row)
        pivots.append(lead)
    order = sorted(range(len(basis)), key=lambda k: pivots[k])
    return [basis[k] for k in order], [pivots[k] for k in order]


class SpanHandle:
    """A Q-span of scene elements with its canonical echelon basis."""

    def __init__(self, scene: AmbientScene, generators: Sequence[GroupElement]):
        for g in generators:
            if g.scene != scene:
                raise ConfigurationError("span generator from a different scene")
        self.scene = scene
        self.generators = tuple(generators)
        basis, pivots = _echelonize(scene, [g.flat() for g in generators])
        self.pivots = tuple(pivots)
        self.basis = tuple(scene.element(_unflatten(scene, row)) for row in basis)

    def __eq__(self, other):
        return (
            isinstance(other, SpanHandle)
            and self.scene == other.scene
            and tuple(b.coords for b in self.basis) == tuple(b.coords for b in other.basis)
        )

    def __hash__(self):
        return hash((self.scene, tuple(b.coords for b in self.basis)))

    @property
    def dim(self) -> int:
        return len(self.basis)

    def residue(self, x: GroupElement) -> GroupElement:
        """x reduced against the echelon basis; zero iff x is in the span."""
        if x.scene != self.scene:
            raise ConfigurationError("element from a different scene")
        row = list(x.flat())
        for b, p in zip(self.basis, self.pivots):
            if row[p] != 0:
                f = row[p]
                row = [a - f * c for a, c in zip(row, b.flat())]
        return self.scene.element(_unflatten(self.scene, row))

    def contains(self, x: GroupElement) -> bool:
        return self.residue(x).is_zero()

    def coordinates(self, x: GroupElement) -> "Optional[list[Fraction]]":
        """Coefficients of x over the echelon basis, or None if outside."""
        row = list(x.flat())
        coeffs = []
        for b, p in zip(self.basis, self.pivots):
            f = row[p]
            coeffs.append(f)
            if f != 0:
                row = [a - f * c for a, c in zip(row, b.flat())]
        if any(a != 0 for a in row):
            return None
        return coeffs

    def join(self, extra: Sequence[GroupElement]) -> "SpanHandle":
        return SpanHandle(self.scene, list(self.generators) + list(extra))

    def arch_classes(self) -> tuple:
        """Achievable leading classes of span members, with multiplicity,
        largest class first (read off the echelon pivot slots)."""
        out = []
        for p in self.pivots:
            cls = ArchClass(self.scene.coord_slot(p))
            if out and out[-1][0] == cls:
                out[-1] = (cls, out[-1][1] + 1)
            else:
                out.append((cls, 1))
        return tuple(out)

    def class_set(self) -> "frozenset[ArchClass]":
        return frozenset(c for c, _ in self.arch_classes())


def _unflatten(scene: AmbientScene, row: Sequence) -> "list[list]":
    out = []
    k = 0
    for s in scene.slots:
        out.append([Fraction(v) for v in row[k : k + s.dim]])
        k += s.dim
    return out


def span_query(V: SpanHandle, x: GroupElement):
    """Exact membership in the Q-span: ('member', None) or
    ('nonmember', residue)."""
    r = V.residue(x)
    if r.is_zero():
        return "member", None
    return "nonmember", r


def arch_classes_of_span(V: SpanHandle) -> tuple:
    return V.arch_classes()


def minimal_residue(x: GroupElement, V: SpanHandle) -> "tuple[GroupElement, GroupElement]":
    """Greedy descent: repeatedly subtract the span element matching the
    residue's leading slot component, while one exists.

    Returns (r, a) with a in V, r = x - a, and r of minimal Archimedean
    class in the coset x + V.  Terminates within one step per slot.
    """
    scene = x.scene
    r = x
    a = scene.zero()
    while True:
        lead = r.leading_slot()
        if lead is None:
            return r, a
        # rows of V vanishing above slot `lead`: those with pivot inside it
        lo = scene.slot_offset(lead)
        hi = lo + scene.slots[lead].dim
        rows = [b for b, p in zip(V.basis, V.pivots) if lo <= p < hi]
        if not rows:
            return r, a
        # solve for the slot component over the candidate rows
        target = list(r.coords[lead])
        combo = scene.zero()
        for b, p in (
            (b, p) for b, p in zip(V.basis, V.pivots) if lo <= p < hi
        ):
            f = target[p - lo]
            if f != 0:
                combo = combo + b.scale(f)
                target = [t - f * c for t, c in zip(target, b.coords[lead])]
        if any(t != 0 for t in target):
            return r, a
        # the subtraction zeroes the whole leading slot, so the class
        # strictly drops; at most one pass per slot
        r = r - combo
        a = a + combo
