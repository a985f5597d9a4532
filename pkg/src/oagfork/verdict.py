"""The master decision: forking/dividing/invariance of a configuration.

The tuple is independent from the extension over the base exactly when

1. every closed interval with extension-span bounds that catches a point
   of the tuple span already catches a base-span point (decided by the
   exact solver over the divisible hulls, with the unit adjoined), and
2. for every declared prime of infinite index, tuple combinations falling
   into the extension lattice modulo every prime power already fall into
   the base lattice (decided by normal forms up to the stabilization
   bound).

Forking, dividing and bounded-orbit verdicts coincide; invariance
additionally needs, at every finite-index prime, the tuple inside the
base lattice modulo all prime powers.  Negative verdicts always carry a
concrete witness: a trapping interval, or an offending combination with
its prime power.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .congruence import (
    KIND_DIVISIBLE,
    KIND_FINITE,
    KIND_INFINITE,
    IntegerLattice,
    finite_index_condition,
    infinite_index_condition,
    member_mod_lN,
    saturate_special,
    stabilization_bound,
)
from .cut_analysis import tuple_cut_independent
from .errors import ConfigurationError, UsageError
from .lex_linear import LE, LT, Atom, LinearForm, feasible, span_point_form
from .oag_model import GroupElement, SpanHandle
from .sceneio import Scene


@dataclass(frozen=True)
class PrimeVerdict:
    l: int
    kind: str
    holds: bool
    witness: Optional[tuple] = None  # (coefficients, N) on failure


@dataclass(frozen=True)
class Verdict:
    forking_independent: bool
    dividing_independent: bool
    bounded_orbit: bool
    invariant: bool
    condition1: bool
    interval_witness: Optional[tuple]  # (point, lo, hi) on failure
    condition2: tuple  # PrimeVerdict per infinite-index prime
    invariance_extra: tuple  # PrimeVerdict per finite-index prime
    notes: tuple = ()

    def __post_init__(self):
        if not (self.forking_independent == self.dividing_independent == self.bounded_orbit):
            raise AssertionError("forking, dividing and bounded-orbit verdicts must agree")
        if self.invariant and not self.forking_independent:
            raise AssertionError("invariance implies independence")
        expected = self.condition1 and all(p.holds for p in self.condition2)
        if self.forking_independent != expected:
            raise AssertionError("independence must equal the conjunction of its conditions")


def decide_cut_independence(scene: Scene, Aspan: SpanHandle, Bspan: SpanHandle, Cspan: SpanHandle):
    """Span-level independence with a trapping-interval witness on failure."""
    for span in (Aspan, Bspan, Cspan):
        if span.scene != scene.ambient:
            raise ConfigurationError("span over a different scene")
    return tuple_cut_independent(Aspan, Bspan, Cspan)


def _residue_lattice(scene: Scene, names: Sequence[str], l: int) -> IntegerLattice:
    p = scene.ambient.congruence.prime(l)
    rows = [list(p.residue(n)) for n in names]
    return IntegerLattice(rows, width=p.width)


def decide_forking(scene: Scene) -> Verdict:
    """Assemble the full verdict for a parsed configuration."""
    ambient = scene.ambient
    unit = scene.unit_names()
    a_names = list(scene.a_names) + list(unit)
    ab_names = list(scene.a_names) + list(scene.b_names) + list(unit)
    Aspan = scene.span_a()
    Bspan = scene.span_ab()
    c = list(scene.c_tuple())
    notes = []

    # reduce to a maximal subtuple rationally free over the base hull
    reduced = []
    acc = Aspan
    for x in c:
        if not acc.contains(x):
            reduced.append(x)
            acc = acc.join([x])
    if len(reduced) < len(c):
        notes.append(f"{len(c) - len(reduced)} tuple members were base-definable")

    Cspan = Aspan.join(reduced)
    condition1, interval_witness = tuple_cut_independent(Aspan, Bspan, Cspan)

    aprime = saturate_special(a_names, ambient.congruence)
    bprime = saturate_special(ab_names, ambient.congruence)
    condition2 = []
    extra = []
    for p in ambient.congruence.primes:
        if p.kind == KIND_DIVISIBLE:
            continue
        C = _residue_lattice(scene, scene.c_names, p.l)
        if p.kind == KIND_INFINITE:
            holds, witness = infinite_index_condition(
                C, aprime.lattice(p.l), bprime.lattice(p.l), p.l, ambient.congruence
            )
            condition2.append(PrimeVerdict(p.l, p.kind, holds, witness))
        else:
            holds = finite_index_condition(C, aprime.lattice(p.l), p.l, ambient.congruence)
            witness = None
            if not holds:
                witness = _finite_witness(C, aprime.lattice(p.l), p.l, ambient.congruence)
            extra.append(PrimeVerdict(p.l, p.kind, holds, witness))

    independent = condition1 and all(v.holds for v in condition2)
    invariant = independent and all(v.holds for v in extra)
    return Verdict(
        forking_independent=independent,
        dividing_independent=independent,
        bounded_orbit=independent,
        invariant=invariant,
        condition1=condition1,
        interval_witness=interval_witness,
        condition2=tuple(condition2),
        invariance_extra=tuple(extra),
        notes=tuple(notes),
    )


def _finite_witness(C: IntegerLattice, aprime: IntegerLattice, l: int, congruence):
    nstar = stabilization_bound(l, C, aprime)
    for N in range(1, nstar + 1):
        for i, row in enumerate(C.rows):
            if not member_mod_lN(row, aprime, l, N, congruence):
                coeffs = tuple(int(i == j) for j in range(len(C.rows)))
                return coeffs, N
    return None


def same_type_over(x: Sequence[GroupElement], y: Sequence[GroupElement], D: SpanHandle) -> bool:
    """Exact order-type equality of two tuples over a span.

    The types differ exactly when some rational combination of one tuple
    is weakly separated from the matching combination of the other by a
    span point; both orientations are checked.
    """
    x, y = list(x), list(y)
    if len(x) != len(y):
        raise UsageError("tuples must have equal length")
    if not x:
        return True
    scene = D.scene
    for first, second in ((x, y), (y, x)):
        fx = LinearForm.make(scene, [(f"f.{i}", g) for i, g in enumerate(first)])
        fy = LinearForm.make(scene, [(f"f.{i}", g) for i, g in enumerate(second)])
        b = span_point_form("b", D)
        atoms = [Atom(fx - b, LE), Atom(b - fy, LE), Atom(fx - fy, LT)]
        if feasible(atoms) is not None:
            return False
    return True
