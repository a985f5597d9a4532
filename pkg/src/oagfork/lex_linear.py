"""Exact decision engine for linear constraints over the lex-ordered ambient.

A group-level constraint compares an affine expression (rational unknowns
with group-element coefficients plus a group constant) against zero in the
lexicographic order.  Satisfiability is decided by expanding every lex
comparison into its finite disjunction of slot sign patterns:

* a strict comparison holds iff some slot is the leading one: all more
  significant slot components vanish (rational equalities, one per slot
  generator) and that slot's value is strictly signed;
* equality holds iff every slot component vanishes.

Each branch is a conjunction of slot-level constraints: rational
equalities and strict inequalities whose coefficients live in the scene's
number field.  Branches are decided by exact Fourier-Motzkin elimination,
with equality pivoting, and a rational witness is recovered by back
substitution.  Strict versus non-strict bookkeeping is exact throughout;
no epsilon perturbation anywhere.

Because lex expansion only ever emits rational equalities plus strict
field inequalities, a branch satisfiable over the reals always admits a
rational witness; the degenerate pinned-irrational case can only arise
from hand-built non-strict slot systems and raises explicitly.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .errors import ConfigurationError, NoRationalWitnessError
from .numberfield import FieldElement, value_enclosure
from .oag_model import AmbientScene, GroupElement, SpanHandle

LT, LE, EQ = "<", "<=", "=="

_NEGATE = {LT: LE, LE: LT}  # not(e rel 0) for the reversed expression


@dataclass(frozen=True)
class LinComb:
    """Slot-level affine expression: sum of coeff*var plus a constant, all
    coefficients in the scene's number field."""

    terms: tuple  # tuple[(str, FieldElement)], sorted by var, structurally nonzero
    const: FieldElement

    @staticmethod
    def make(terms: Iterable, const: FieldElement) -> "LinComb":
        merged: dict = {}
        for v, c in terms:
            merged[v] = merged[v] + c if v in merged else c
        pruned = tuple(
            (v, c) for v, c in sorted(merged.items()) if c.coeffs != ()
        )
        return LinComb(pruned, const)

    def __add__(self, other: "LinComb") -> "LinComb":
        return LinComb.make(self.terms + other.terms, self.const + other.const)

    def __neg__(self) -> "LinComb":
        return LinComb(tuple((v, -c) for v, c in self.terms), -self.const)

    def __sub__(self, other: "LinComb") -> "LinComb":
        return self + (-other)

    def scale(self, f: FieldElement) -> "LinComb":
        return LinComb.make(((v, c * f) for v, c in self.terms), self.const * f)

    def coeff(self, var: str) -> Optional[FieldElement]:
        for v, c in self.terms:
            if v == var:
                return c
        return None

    def drop(self, var: str) -> "LinComb":
        return LinComb(tuple((v, c) for v, c in self.terms if v != var), self.const)

    def variables(self) -> "tuple[str, ...]":
        return tuple(v for v, _ in self.terms)

    def substitute(self, var: str, expr: "LinComb") -> "LinComb":
        c = self.coeff(var)
        if c is None:
            return self
        return self.drop(var) + expr.scale(c)

    def evaluate(self, assignment: dict) -> FieldElement:
        total = self.const
        for v, c in self.terms:
            q = assignment.get(v, Fraction(0))
            if q:
                total = total + c.scale(q)
        return total

    def is_structurally_zero(self) -> bool:
        return not self.terms and self.const.coeffs == ()


@dataclass(frozen=True)
class SlotConstraint:
    """comb rel 0, with rel one of <, <=, ==."""

    comb: LinComb
    rel: str

    def negations(self) -> "tuple[SlotConstraint, ...]":
        if self.rel == EQ:
            return (SlotConstraint(self.comb, LT), SlotConstraint(-self.comb, LT))
        return (SlotConstraint(-self.comb, _NEGATE[self.rel]),)

    def normalized(self) -> "SlotConstraint":
        lead = next((c for _, c in self.comb.terms if c.sign() != 0), None)
        if lead is None:
            lead = self.comb.const if self.comb.const.coeffs != () else None
        if lead is None:
            return self
        s = lead.sign()
        if s == 0:
            # leading coefficient vanishes as a value; drop it and retry
            pruned = LinComb(
                tuple((v, c) for v, c in self.comb.terms if c.sign() != 0),
                self.comb.const,
            )
            if pruned == self.comb:
                return self
            return SlotConstraint(pruned, self.rel).normalized()
        inv = lead.inverse() if s > 0 else (-lead).inverse()
        if self.rel == EQ and s < 0:
            inv = -inv
        return SlotConstraint(self.comb.scale(inv), self.rel)


@dataclass(frozen=True)
class SlotSystem:
    """A conjunction of slot constraints plus the sign-pattern provenance
    of the branch it came from."""

    constraints: tuple  # tuple[SlotConstraint, ...]
    provenance: tuple = ()

    @staticmethod
    def make(constraints: Iterable, provenance: Iterable = ()) -> "SlotSystem":
        seen = []
        keys = set()
        for c in constraints:
            n = c.normalized()
            if n.comb.is_structurally_zero() and n.rel in (LE, EQ):
                continue  # trivially true
            key = (n.comb, n.rel)
            if key not in keys:
                keys.add(key)
                seen.append(n)
        return SlotSystem(tuple(seen), tuple(provenance))

    def variables(self) -> "tuple[str, ...]":
        out: "set[str]" = set()
        for c in self.constraints:
            out.update(c.comb.variables())
        return tuple(sorted(out))

    def and_also(self, other: "SlotSystem") -> "SlotSystem":
        return self.extend(other.constraints, other.provenance, normalized=True)

    def extend(self, news: Iterable, tags: Iterable = (), *, normalized: bool = False) -> "SlotSystem":
        """Conjoin extra constraints, normalizing only the new ones (the
        stored ones already are)."""
        keys = {(c.comb, c.rel) for c in self.constraints}
        out = list(self.constraints)
        for c in news:
            n = c if normalized else c.normalized()
            if n.comb.is_structurally_zero() and n.rel in (LE, EQ):
                continue
            key = (n.comb, n.rel)
            if key not in keys:
                keys.add(key)
                out.append(n)
        return SlotSystem(tuple(out), self.provenance + tuple(tags))


def _ground_ok(c: SlotConstraint) -> Optional[bool]:
    """Truth value of a constraint without variables; None if it has some."""
    if c.comb.terms:
        return None
    s = c.comb.const.sign()
    if c.rel == LT:
        return s < 0
    if c.rel == LE:
        return s <= 0
    return s == 0


def _combine(lower, upper) -> SlotConstraint:
    # lower: v > or >= expr_lo ; upper: v < or <= expr_up
    (lo_expr, lo_strict) = lower
    (up_expr, up_strict) = upper
    rel = LT if (lo_strict or up_strict) else LE
    return SlotConstraint(lo_expr - up_expr, rel)


def _tighten(constraints: "list[SlotConstraint]"):
    """Drop duplicates and constraints dominated by a tighter bound with
    the same variable part; detect ground contradictions.

    Returns (constraints, ok).  Normalized constraints with equal variable
    parts compare by their constants: for inequalities the larger constant
    is the stronger bound (strictness wins ties); two equalities with
    different constants are contradictory.
    """
    out: "dict" = {}
    for c in constraints:
        g = _ground_ok(c)
        if g is True:
            continue
        if g is False:
            return [], False
        n = c.normalized()
        key = (n.comb.terms, n.rel == EQ)
        old = out.get(key)
        if old is None:
            out[key] = n
            continue
        diff = (n.comb.const - old.comb.const).sign()
        if n.rel == EQ:
            if diff != 0:
                return [], False
            continue
        if diff > 0 or (diff == 0 and n.rel == LT):
            out[key] = n
    return list(out.values()), True


def _eliminate(constraints: Sequence[SlotConstraint], variables: Sequence[str]):
    """Fourier-Motzkin with equality pivoting and greedy variable order.

    Returns (remaining constraints, plan, ok) where plan records, per
    eliminated variable, either a substitution or its bound lists, and ok
    is False when a ground contradiction surfaced along the way.  The
    variable picked at each step minimizes the product of its bound counts
    (equality pivots first), which keeps intermediate systems small.
    """
    current, ok = _tighten(list(constraints))
    if not ok:
        return [], [], False
    plan = []
    remaining = sorted(set(variables))
    while remaining:
        counts = {}
        for var in remaining:
            counts[var] = [0, 0, 0]  # equalities, lowers, uppers
        for c in current:
            for var in remaining:
                coeff = c.comb.coeff(var)
                if coeff is None or coeff.sign() == 0:
                    continue
                if c.rel == EQ:
                    counts[var][0] += 1
                elif coeff.sign() > 0:
                    counts[var][2] += 1
                else:
                    counts[var][1] += 1

        def cost(var):
            eq, lo, up = counts[var]
            return (0, 0, var) if eq else (1, lo * up, var)

        var = min(remaining, key=cost)
        remaining.remove(var)
        have, others = [], []
        for c in current:
            coeff = c.comb.coeff(var)
            if coeff is None or coeff.sign() == 0:
                others.append(
                    c if coeff is None else SlotConstraint(c.comb.drop(var), c.rel)
                )
            else:
                have.append(c)
        if not have:
            plan.append(("free", var))
            current = others
            continue
        pivot = next((c for c in have if c.rel == EQ), None)
        if pivot is not None:
            a = pivot.comb.coeff(var)
            expr = pivot.comb.drop(var).scale(-a.inverse())
            plan.append(("subst", var, expr))
            current = others + [
                SlotConstraint(c.comb.substitute(var, expr), c.rel)
                for c in have
                if c is not pivot
            ]
        else:
            lowers, uppers = [], []
            for c in have:
                a = c.comb.coeff(var)
                rest = c.comb.drop(var)
                bound = rest.scale(-a.inverse())
                if a.sign() > 0:  # a*v + rest rel 0  =>  v rel bound (upper)
                    uppers.append((bound, c.rel == LT))
                else:
                    lowers.append((bound, c.rel == LT))
            plan.append(("bounds", var, tuple(lowers), tuple(uppers)))
            current = others + [_combine(lo, up) for lo in lowers for up in uppers]
        current, ok = _tighten(current)
        if not ok:
            return [], plan, False
    return current, plan, True


def fm_eliminate(system: SlotSystem, variables: Iterable[str]) -> SlotSystem:
    """Project the given variables out of the system.

    The result is satisfiable exactly when the input is satisfiable for
    some value of the eliminated variables; projection is exact, with the
    usual strict/non-strict combination bookkeeping.
    """
    vars_ = sorted(set(variables))  # eliminating an absent variable is a no-op
    remaining, _, ok = _eliminate(system.constraints, vars_)
    if not ok:
        zero = system.constraints[0].comb if system.constraints else None
        # encode the contradiction explicitly as 0 < 0
        if zero is None:
            raise ConfigurationError("contradiction without constraints")
        scene_zero = LinComb((), (zero.const - zero.const))
        return SlotSystem.make(
            [SlotConstraint(scene_zero, LT)], system.provenance + ("contradiction",)
        )
    return SlotSystem.make(remaining, system.provenance)


def _simplest_between(lo: Fraction, hi: Fraction) -> Fraction:
    """Simplest rational in the closed interval [lo, hi] (Stern-Brocot)."""
    if lo > hi:
        raise ValueError("empty interval")
    if lo <= 0 <= hi:
        return Fraction(0)
    if hi < 0:
        return -_simplest_between(-hi, -lo)
    # 0 < lo <= hi
    whole = lo.numerator // lo.denominator
    if whole == lo:
        return lo
    if whole + 1 <= hi:
        return Fraction(whole + 1)
    return whole + 1 / _simplest_between(1 / (hi - whole), 1 / (lo - whole))


def _field_to_fraction(e: FieldElement) -> Fraction:
    if e.is_rational_repr():
        return e.as_fraction()
    lo, hi = value_enclosure(e, Fraction(1, 10**40))
    cand = _simplest_between(lo, hi)
    if (e - cand).is_zero():
        return cand
    raise NoRationalWitnessError(
        "system pins a variable to an irrational value; no rational witness"
    )


def _choose_value(lowers, uppers, assignment) -> Fraction:
    """A rational value satisfying all evaluated bounds.

    Prefers zero, then an integer next to the finite bound, then the
    simplest rational strictly between the two bounds.
    """
    lo_val = lo_strict = None
    for expr, strict in lowers:
        v = expr.evaluate(assignment)
        if lo_val is None or (v - lo_val).sign() > 0:
            lo_val, lo_strict = v, strict
        elif (v - lo_val).sign() == 0:
            lo_strict = lo_strict or strict
    up_val = up_strict = None
    for expr, strict in uppers:
        v = expr.evaluate(assignment)
        if up_val is None or (v - up_val).sign() < 0:
            up_val, up_strict = v, strict
        elif (v - up_val).sign() == 0:
            up_strict = up_strict or strict
    if lo_val is None and up_val is None:
        return Fraction(0)
    if lo_val is None:
        l, _ = value_enclosure(up_val, Fraction(1, 2))
        q = Fraction(l.numerator // l.denominator - 1)
        return q
    if up_val is None:
        _, h = value_enclosure(lo_val, Fraction(1, 2))
        return Fraction(-((-h).numerator // (-h).denominator) + 1)
    gap = (up_val - lo_val).sign()
    if gap < 0:
        raise ConfigurationError("inconsistent bounds after elimination")
    if gap == 0:
        if lo_strict or up_strict:
            raise ConfigurationError("strictly pinned interval after elimination")
        return _field_to_fraction(lo_val)
    lo_sign, up_sign = lo_val.sign(), up_val.sign()
    if (lo_sign < 0 or (lo_sign == 0 and not lo_strict)) and (
        up_sign > 0 or (up_sign == 0 and not up_strict)
    ):
        return Fraction(0)
    width = Fraction(1, 4)
    while True:
        _, lh = value_enclosure(lo_val, width)
        uh, _ = value_enclosure(up_val, width)
        if lh < uh:
            # stay strictly inside (lh, uh) so exact rational bounds with
            # strict relations are never hit
            pad = (uh - lh) / 4
            return _simplest_between(lh + pad, uh - pad)
        width /= 4


def system_feasible(system: SlotSystem) -> Optional[dict]:
    """Decide one slot system; a rational witness assignment or None."""
    variables = system.variables()
    remaining, plan, ok = _eliminate(system.constraints, variables)
    if not ok:
        return None
    for c in remaining:
        if _ground_ok(c) is False:
            return None
    assignment: dict = {}
    for step in reversed(plan):
        if step[0] == "free":
            assignment[step[1]] = Fraction(0)
        elif step[0] == "subst":
            assignment[step[1]] = _field_to_fraction(step[2].evaluate(assignment))
        else:
            _, var, lowers, uppers = step
            assignment[var] = _choose_value(lowers, uppers, assignment)
    return assignment


# A Condition is a finite disjunction of slot systems.
Condition = "list[SlotSystem]"


@dataclass(frozen=True)
class LinearForm:
    """Group-level affine expression: rational unknowns scaled by group
    coefficients, plus a group constant."""

    scene: AmbientScene
    terms: tuple  # tuple[(str, GroupElement)], sorted, coefficient nonzero
    const: GroupElement

    @staticmethod
    def constant(x: GroupElement) -> "LinearForm":
        return LinearForm(x.scene, (), x)

    @staticmethod
    def make(scene: AmbientScene, terms: Iterable, const: Optional[GroupElement] = None) -> "LinearForm":
        merged: dict = {}
        for v, g in terms:
            merged[v] = merged[v] + g if v in merged else g
        pruned = tuple((v, g) for v, g in sorted(merged.items()) if not g.is_zero())
        return LinearForm(scene, pruned, const if const is not None else scene.zero())

    def __add__(self, other: "LinearForm") -> "LinearForm":
        if self.scene != other.scene:
            raise ConfigurationError("forms over different scenes")
        return LinearForm.make(self.scene, self.terms + other.terms, self.const + other.const)

    def __neg__(self) -> "LinearForm":
        return LinearForm(
            self.scene, tuple((v, -g) for v, g in self.terms), -self.const
        )

    def __sub__(self, other: "LinearForm") -> "LinearForm":
        return self + (-other)

    def value(self, assignment: dict) -> GroupElement:
        total = self.const
        for v, g in self.terms:
            q = assignment.get(v, Fraction(0))
            if q:
                total = total + g.scale(q)
        return total

    def slot_comb(self, slot: int) -> LinComb:
        return LinComb.make(
            ((v, g.slot_value(slot)) for v, g in self.terms),
            self.const.slot_value(slot),
        )

    def generator_equalities(self, slot: int) -> "list[SlotConstraint]":
        """One rational equality per slot generator: the slot component of
        the form vanishes coordinatewise (sound by the declared rational
        independence of the slot's generators)."""
        field = self.scene.field
        out = []
        for j in range(self.scene.slots[slot].dim):
            comb = LinComb.make(
                ((v, field.rational(g.coords[slot][j])) for v, g in self.terms),
                field.rational(self.const.coords[slot][j]),
            )
            out.append(SlotConstraint(comb, EQ))
        return out


@dataclass(frozen=True)
class Atom:
    """form rel 0 in the lexicographic order."""

    form: LinearForm
    rel: str


def span_point_form(prefix: str, V: SpanHandle) -> LinearForm:
    """A fresh unknown point of the span: one rational coordinate variable
    per echelon basis vector."""
    terms = [(f"{prefix}.{i}", b) for i, b in enumerate(V.basis)]
    return LinearForm.make(V.scene, terms)


def _atom_branches(atom: Atom, tag: str):
    """Branches of one lex atom.

    Canonical order prefers the tightest pattern first: the all-zero
    branch (when the relation is non-strict), then strictness at the least
    significant slot, walking up to the most significant one.  Witnesses
    extracted from the first satisfiable branch are then as close to the
    comparison boundary as the configuration allows.
    """
    scene = atom.form.scene
    branches = []
    if atom.rel in (LE, EQ):
        eqs = []
        for s in range(scene.n_slots):
            eqs.extend(atom.form.generator_equalities(s))
        branches.append((eqs, f"{tag}=0"))
    if atom.rel in (LT, LE):
        strict = []
        prefix: "list[SlotConstraint]" = []
        for s in range(scene.n_slots):
            comb = atom.form.slot_comb(s)
            if not comb.is_structurally_zero():
                strict.append(
                    (
                        prefix + [SlotConstraint(comb, LT)],
                        f"{tag}@slot{s}<0",
                    )
                )
            prefix = prefix + atom.form.generator_equalities(s)
        branches.extend(reversed(strict))
    return branches


def expand_atoms(atoms: Sequence[Atom]) -> "list[SlotSystem]":
    """All slot sign-pattern branches of a conjunction of lex atoms, with
    structurally-contradictory branches pruned early."""
    systems = [SlotSystem.make([], ())]
    for i, atom in enumerate(atoms):
        branches = _atom_branches(atom, f"atom{i}")
        new = []
        for base in systems:
            for constraints, tag in branches:
                cand = base.and_also(SlotSystem.make(constraints, (tag,)))
                if any(_ground_ok(c) is False for c in cand.constraints):
                    continue
                new.append(cand)
        systems = new
        if not systems:
            break
    return systems


def _prepare_negation(condition: "list[SlotSystem]"):
    """Drop infeasible and subsumed systems (a constraint-superset
    system's negation is implied by the subset's) and precompute the
    normalized negation choices per remaining constraint."""
    live = [s for s in condition if system_feasible(s) is not None]
    keysets = [frozenset((c.comb, c.rel) for c in s.constraints) for s in live]
    uniq: "list[SlotSystem]" = []
    seen_sets = []
    for i, s in enumerate(live):
        if any(j != i and keysets[j] < keysets[i] for j in range(len(live))):
            continue
        if keysets[i] in seen_sets:
            continue
        seen_sets.append(keysets[i])
        uniq.append(s)
    return [
        [tuple(n.normalized() for n in c.negations()) for c in s.constraints]
        for s in uniq
    ]


def negate_condition(condition: "list[SlotSystem]") -> "list[SlotSystem]":
    """Negation of a disjunction of systems, distributed back into a
    disjunction of systems.

    Kept tractable by subsumption, skipping systems already negated by the
    accumulated choices, pruning infeasible partial choices, and memoizing
    repeated choice sets.  For satisfiability queries prefer
    :func:`condition_feasible_avoiding`, which fuses the distribution with
    the search and stops at the first witness.
    """
    choice_table = _prepare_negation(condition)
    out: "list[SlotSystem]" = []
    out_keys: "set[frozenset]" = set()
    visited: "set[tuple]" = set()

    def rec(idx: int, acc: "tuple[SlotConstraint, ...]", keys: frozenset):
        state = (idx, keys)
        if state in visited:
            return
        visited.add(state)
        if idx == len(choice_table):
            if keys not in out_keys:
                out_keys.add(keys)
                out.append(SlotSystem(acc, ("negation",)))
            return
        for choices in choice_table[idx]:
            if any((n.comb, n.rel) in keys for n in choices):
                rec(idx + 1, acc, keys)
                return
        for choices in choice_table[idx]:
            for n in choices:
                if _ground_ok(n) is False:
                    continue
                cand = acc + (n,)
                if system_feasible(SlotSystem(cand, ())) is None:
                    continue
                rec(idx + 1, cand, keys | {(n.comb, n.rel)})

    rec(0, (), frozenset())
    return out


def condition_feasible_avoiding(
    positive: "list[SlotSystem]", negated: "list[SlotSystem]"
) -> Optional[dict]:
    """First witness of (some positive system) and (no negated system).

    The negation choices are explored inside the search, one positive
    branch at a time, so the distributed negation is never materialized;
    the first satisfiable leaf in canonical order wins.
    """
    choice_table = _prepare_negation(negated)

    for base in positive:
        if system_feasible(base) is None:
            continue
        visited: "set[tuple]" = set()

        def rec(idx: int, acc: SlotSystem, keys: frozenset):
            state = (idx, keys)
            if state in visited:
                return None
            visited.add(state)
            if idx == len(choice_table):
                return system_feasible(acc)
            for choices in choice_table[idx]:
                if any((n.comb, n.rel) in keys for n in choices):
                    return rec(idx + 1, acc, keys)
            for choices in choice_table[idx]:
                for n in choices:
                    if _ground_ok(n) is False:
                        continue
                    cand = acc.extend([n], (), normalized=True)
                    if system_feasible(cand) is None:
                        continue
                    w = rec(idx + 1, cand, keys | {(n.comb, n.rel)})
                    if w is not None:
                        return w
            return None

        witness = rec(0, base, frozenset())
        if witness is not None:
            return witness
    return None


def condition_and(a: "list[SlotSystem]", b: "list[SlotSystem]") -> "list[SlotSystem]":
    out = []
    for s, t in itertools.product(a, b):
        cand = s.and_also(t)
        if any(_ground_ok(c) is False for c in cand.constraints):
            continue
        out.append(cand)
    return out


def condition_feasible(condition: "list[SlotSystem]") -> Optional[dict]:
    """First satisfiable branch in canonical order, with its witness."""
    for system in condition:
        w = system_feasible(system)
        if w is not None:
            return w
    return None


def feasible(atoms: Sequence[Atom]) -> Optional[dict]:
    """Satisfiability of a conjunction of lex atoms.

    Returns a rational witness assignment (empty for the empty system) or
    None when unsatisfiable.
    """
    if not atoms:
        return {}
    return condition_feasible(expand_atoms(atoms))


def interval_meets_span(b1: LinearForm, b2: LinearForm, V: SpanHandle) -> "list[SlotSystem]":
    """Parametric condition, over the endpoint variables, for the closed
    interval [b1, b2] to contain a span point.

    Built by eliminating the span-coordinate variables from
    {b1 <= a <= b2, a in V}; the caller negates it to express avoidance.
    """
    if b1.scene != V.scene or b2.scene != V.scene:
        raise ConfigurationError("endpoint forms over a different scene")
    a = span_point_form("_mem", V)
    systems = expand_atoms([Atom(b1 - a, LE), Atom(a - b2, LE)])
    member_vars = [v for v, _ in a.terms]
    out = []
    seen = set()
    for system in systems:
        reduced = fm_eliminate(system, member_vars)
        if system_feasible(reduced) is None:
            continue
        key = frozenset((c.comb, c.rel) for c in reduced.constraints)
        if key not in seen:
            seen.add(key)
            out.append(reduced)
    return out
