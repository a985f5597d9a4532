"""Valuation blocks, separatedness, rays, and normal-form bases.

Tuples are partitioned by three nested valuations over a span D: level 1
groups by the upper convex subgroup of the cut, level 2 splits ramified
members below Archimedean ones, level 3 further splits ramified members by
the new class their ramifier opens.  A family is separated at a level when
no rational combination drops below the value of its support; each block's
criterion is pure rational linear algebra:

* ramified level-3 blocks drop iff their rays (the new-class slot
  components of the ramifier residues) are rationally dependent;
* Archimedean blocks drop iff their high-slot coordinate rows are
  dependent modulo the span's projection.

The normalization pipeline rewrites an input tuple, by invertible rational
combinations and span translations, into a basis under normal enumeration
satisfying the five block-separation properties, tracking two ordinal
termination measures along the way.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .cut_analysis import ConvexSubgroupDescriptor, CutProfile, cut_profile
from .errors import UsageError
from .oag_model import (
    ArchClass,
    GroupElement,
    SpanHandle,
    arch_class,
    minimal_residue,
)

ARCH = "arch"
RAM = "ram"

KIND_ARCH = "archimedean"  # Archimedean over base and extension
KIND_TRANSITIONAL = "transitional"  # Archimedean over base, ramified over extension
KIND_RAM = "ramified"  # ramified over the base span
KIND_DEPENDENT = "dependent"  # diagnostic: fell into the extension span


def _class_key(c: Optional[ArchClass]):
    return (2,) if c is None else c._key()


@dataclass(frozen=True)
class BlockKey:
    """Value of one block: the upper subgroup, the ramified/Archimedean
    flag (levels 2, 3) and the opened class (level 3, ramified only)."""

    level: int
    upper: ConvexSubgroupDescriptor
    ram: Optional[bool] = None
    new_class: Optional[ArchClass] = None

    def sort_key(self):
        key = (self.upper.sort_key(),)
        if self.level >= 2:
            key += ((0 if self.ram else 1),)
        if self.level >= 3:
            key += (_class_key(self.new_class) if self.ram else (2,),)
        return key

    def coarsened(self, level: int) -> "BlockKey":
        if level >= self.level:
            return self
        if level == 2:
            return BlockKey(2, self.upper, self.ram)
        return BlockKey(1, self.upper)


@dataclass(frozen=True)
class BlockDecomposition:
    level: int
    blocks: tuple  # tuple[(BlockKey, tuple[int, ...])], sorted by key
    span_members: tuple  # indices of members inside the span (-infinity value)

    def key_of(self, index: int) -> Optional[BlockKey]:
        for key, members in self.blocks:
            if index in members:
                return key
        return None


def _profile_key(profile: CutProfile, level: int) -> BlockKey:
    if level == 1:
        return BlockKey(1, profile.upper)
    if level == 2:
        return BlockKey(2, profile.upper, profile.is_ramified)
    return BlockKey(3, profile.upper, profile.is_ramified, profile.new_class())


def val_blocks(c: Sequence[GroupElement], D: SpanHandle, level: int) -> BlockDecomposition:
    """Group the tuple by the exact level-1/2/3 value of each member over
    the span; members inside the span are reported separately."""
    if level not in (1, 2, 3):
        raise UsageError("level must be 1, 2 or 3")
    keys: dict = {}
    span_members = []
    for i, x in enumerate(c):
        profile = cut_profile(x, D)
        if profile.member:
            span_members.append(i)
            continue
        keys.setdefault(_profile_key(profile, level), []).append(i)
    blocks = tuple(
        (key, tuple(members))
        for key, members in sorted(keys.items(), key=lambda kv: kv[0].sort_key())
    )
    return BlockDecomposition(level, blocks, tuple(span_members))


def rational_left_kernel(rows: "list[tuple]") -> "list[list[Fraction]]":
    """Basis of {v : v * rows = 0} over the rationals."""
    if not rows:
        return []
    width = len(rows[0])
    work = [list(map(Fraction, r)) for r in rows]
    n = len(work)
    transform = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    pivots: "list[tuple[int, int]]" = []  # (column, row index in echelon)
    echelon: "list[int]" = []
    for i in range(n):
        for col, k in pivots:
            if work[i][col] != 0:
                f = work[i][col]
                work[i] = [a - f * b for a, b in zip(work[i], work[k])]
                transform[i] = [a - f * b for a, b in zip(transform[i], transform[k])]
        lead = next((j for j in range(width) if work[i][j] != 0), None)
        if lead is None:
            continue
        f = work[i][lead]
        work[i] = [a / f for a in work[i]]
        transform[i] = [a / f for a in transform[i]]
        pivots.append((lead, i))
        echelon.append(i)
    kernel = []
    used = {k for _, k in pivots}
    for i in range(n):
        if i not in used and not any(work[i]):
            kernel.append(transform[i])
    return kernel


def _proj_classes(scene, pred):
    cols = []
    flat = 0
    for s, slot in enumerate(scene.slots):
        keep = pred(ArchClass(s))
        for _ in range(slot.dim):
            if keep:
                cols.append(flat)
            flat += 1
    return cols


def _project(x: GroupElement, cols) -> tuple:
    flat = x.flat()
    return tuple(flat[j] for j in cols)


def _combo_space(vectors: Sequence[GroupElement], D: SpanHandle, cols) -> "list[list[Fraction]]":
    """Basis of {lam : sum(lam_i * proj(v_i)) in proj(span D)}."""
    if not vectors:
        return []
    if not cols:
        return [[Fraction(int(i == j)) for j in range(len(vectors))] for i in range(len(vectors))]
    rows = [_project(v, cols) for v in vectors] + [_project(b, cols) for b in D.basis]
    kernel = rational_left_kernel(rows)
    return [vec[: len(vectors)] for vec in kernel]


def _echelon_vectors(vectors: "list[list[Fraction]]"):
    basis = []
    pivots = []
    for v in vectors:
        row = list(v)
        for b, p in zip(basis, pivots):
            if row[p] != 0:
                f = row[p]
                row = [a - f * c for a, c in zip(row, b)]
        lead = next((j for j in range(len(row)) if row[j] != 0), None)
        if lead is None:
            continue
        row = [a / row[lead] for a in row]
        basis.append(row)
        pivots.append(lead)
    return basis, pivots


def _fresh_vector(space: "list[list[Fraction]]", sub: "list[list[Fraction]]"):
    """A vector of `space` outside the span of `sub`, reduced and scaled
    to leading coefficient one; None when the spaces coincide."""
    basis, pivots = _echelon_vectors(sub)
    for v in space:
        row = list(v)
        for b, p in zip(basis, pivots):
            if row[p] != 0:
                f = row[p]
                row = [a - f * c for a, c in zip(row, b)]
        lead = next((j for j in range(len(row)) if row[j] != 0), None)
        if lead is not None:
            return [a / row[lead] for a in row]
    return None


def reduction_chain(vectors: Sequence[GroupElement], D: SpanHandle):
    """For each scene class (ascending, with a member sentinel first), the
    space of combinations reducible over the span to at most that class.

    A combination's minimal class over the span is the first chain level
    containing it.
    """
    scene = D.scene
    chain = sorted(scene.arch_chain())
    out = [(None, _combo_space(vectors, D, _proj_classes(scene, lambda c: True)))]
    for cls in chain:
        cols = _proj_classes(scene, lambda c, cls=cls: c > cls)
        out.append((cls, _combo_space(vectors, D, cols)))
    return out


def minimal_class_witness(vectors: Sequence[GroupElement], D: SpanHandle, pred):
    """First combination (ascending by minimal class over D) whose minimal
    class satisfies pred; pred also receives None for span members."""
    chain = reduction_chain(vectors, D)
    prev: "list[list[Fraction]]" = []
    for cls, space in chain:
        fresh = _fresh_vector(space, prev)
        while fresh is not None:
            if pred(cls):
                return cls, fresh
            prev = prev + [fresh]
            fresh = _fresh_vector(space, prev)
        prev = space
    return None, None


def is_separated(c: Sequence[GroupElement], D: SpanHandle, level: int = 3):
    """No member inside the span and no combination dropping below the
    value of its support.  Returns (True, None) or (False, combination).
    """
    c = list(c)
    for i, x in enumerate(c):
        if cut_profile(x, D).member:
            combo = [Fraction(0)] * len(c)
            combo[i] = Fraction(1)
            return False, tuple(combo)
    decomposition = val_blocks(c, D, level)
    for key, members in decomposition.blocks:
        vectors = [c[i] for i in members]
        bad = _block_drop(vectors, key, D)
        if bad is not None:
            combo = [Fraction(0)] * len(c)
            for i, v in zip(members, bad):
                combo[i] = v
            return False, tuple(combo)
    return True, None


def _upper_boundary(upper: ConvexSubgroupDescriptor, scene) -> Optional[ArchClass]:
    outside = sorted(c for c in scene.arch_chain() if c not in upper.classes)
    return outside[0] if outside else None


def _block_drop(vectors, key: BlockKey, D: SpanHandle):
    """A combination of one block strictly dropping in value, or None."""
    scene = D.scene
    mu = _upper_boundary(key.upper, scene)
    if key.level == 3 and key.ram:
        rays = [_ray_vector(v, D, key.new_class) for v in vectors]
        kernel = rational_left_kernel([tuple(r) for r in rays])
        return kernel[0] if kernel else None
    if key.level >= 2 and not key.ram:
        # Archimedean block: a drop is reducibility below the boundary
        cols = _proj_classes(scene, lambda c: mu is None or c >= mu)
        space = _combo_space(vectors, D, cols)
        return _fresh_vector(space, [])
    # level 1, or level 2 ramified: a drop is a strictly smaller upper group
    tau = max((c for c in D.class_set() if c in key.upper.classes), default=None)
    if tau is None:
        return None  # nothing below to drop to (members were handled before)
    cols = _proj_classes(scene, lambda c: c > tau)
    space = _combo_space(vectors, D, cols)
    return _fresh_vector(space, [])


@dataclass(frozen=True)
class RayClass:
    """Positive-scaling class of a block member's leading direction in the
    opened class's slot; first nonzero coordinate scaled to +-1."""

    slot: ArchClass
    direction: tuple

    @staticmethod
    def make(slot: ArchClass, vector: Sequence[Fraction]) -> "RayClass":
        first = next((v for v in vector if v != 0), None)
        if first is None:
            raise UsageError("ray direction must be nonzero")
        scale = Fraction(1) / abs(first)
        return RayClass(slot, tuple(v * scale for v in vector))


def _ray_vector(x: GroupElement, D: SpanHandle, new_class: ArchClass):
    residue, _ = minimal_residue(x, D)
    return residue.coords[new_class.slot]


def pplus_rays(block: Sequence[GroupElement], D: SpanHandle) -> "list[RayClass]":
    """Rays of a ramified level-3 block: the ramifier residues' coordinate
    vectors in the common opened slot, canonicalized; independent of the
    ramifier choice since lower-class corrections are invisible there."""
    profiles = [cut_profile(x, D) for x in block]
    for p in profiles:
        if not p.is_ramified:
            raise UsageError("rays are defined for ramified block members only")
    classes = {p.new_class() for p in profiles}
    if len(classes) != 1:
        raise UsageError("block members open different classes")
    new_class = classes.pop()
    return [RayClass.make(new_class, _ray_vector(x, D, new_class)) for x in block]


def rays_tuple_equal(block1, block2, D1: SpanHandle, D2: SpanHandle) -> bool:
    """Equality of whole ray tuples up to one common positive scaling."""
    v1 = [_ray_vector(x, D1, cut_profile(x, D1).new_class()) for x in block1]
    v2 = [_ray_vector(x, D2, cut_profile(x, D2).new_class()) for x in block2]
    if len(v1) != len(v2):
        return False
    flat1 = [a for v in v1 for a in v]
    flat2 = [a for v in v2 for a in v]
    if len(flat1) != len(flat2):
        return False
    first = next(((a, b) for a, b in zip(flat1, flat2) if a != 0 or b != 0), None)
    if first is None:
        return True
    a0, b0 = first
    if a0 == 0 or b0 == 0 or (a0 > 0) != (b0 > 0):
        return False
    scale = a0 / b0
    return all(a == b * scale for a, b in zip(flat1, flat2))


# --- normal forms ---------------------------------------------------------


@dataclass
class _Tracked:
    """A working element with its provenance: element = sum(row_j * c_j)
    plus the base-span shift."""

    element: GroupElement
    row: "list[Fraction]"  # coefficients over the input tuple
    shift: GroupElement  # base-span translation part


def _combine_tracked(parts, coeffs):
    element = None
    row = None
    shift = None
    for t, q in zip(parts, coeffs):
        if q == 0:
            continue
        if element is None:
            element = t.element.scale(q)
            row = [q * r for r in t.row]
            shift = t.shift.scale(q)
        else:
            element = element + t.element.scale(q)
            row = [a + q * r for a, r in zip(row, t.row)]
            shift = shift + t.shift.scale(q)
    return _Tracked(element, row, shift)


def _tracked_residue(t: _Tracked, span_payloads: "list[_Tracked]", span: SpanHandle) -> _Tracked:
    """Minimal residue against the span, with the provenance carried along.

    Each echelon basis row of the span must come with a payload expressing
    it over the input tuple plus a base-span shift.
    """
    residue, removed = minimal_residue(t.element, span)
    coords = span.coordinates(removed)
    row = list(t.row)
    shift = t.shift
    for q, payload in zip(coords, span_payloads):
        if q == 0:
            continue
        if payload is None:
            raise AssertionError("span row without provenance payload")
        row = [a - q * r for a, r in zip(row, payload.row)]
        shift = shift + payload.shift.scale(-q)
    return _Tracked(residue, row, shift)


@dataclass(frozen=True)
class NormalEntry:
    kind: str
    element: GroupElement
    upper_ext: ConvexSubgroupDescriptor  # level-1 value over the extension span
    new_class_ext: Optional[ArchClass]  # opened class over the extension
    new_class_base: Optional[ArchClass]  # opened class over the base (ramified kind)


@dataclass(frozen=True)
class NormalFormBasis:
    entries: tuple  # tuple[NormalEntry, ...] in canonical enumeration order
    transform: tuple  # rows of the invertible rational matrix
    translations: tuple  # per entry, the base-span shift
    trace: tuple  # ((stage, measure vector), ...)
    diagnostics: tuple = ()

    def elements(self) -> "tuple[GroupElement, ...]":
        return tuple(e.element for e in self.entries)


def _measure_rho(v_parts: "list[_Tracked]", boundary_classes: "list[ArchClass]"):
    counts = [0] * (len(boundary_classes) + 1)
    for t in v_parts:
        cls = arch_class(t.element)
        idx = sum(1 for b in boundary_classes if b <= cls)
        counts[idx] += 1
    return tuple(reversed(counts))


def _measure_g(trans_classes: "list[ArchClass]", boundary_classes: "list[ArchClass]"):
    counts = [0] * (len(boundary_classes) + 1)
    for cls in trans_classes:
        idx = sum(1 for b in boundary_classes if b < cls)
        counts[idx] += 1
    return tuple(reversed(counts))


def _replace_index(parts: "list[_Tracked]", combo) -> int:
    support = [i for i, q in enumerate(combo) if q != 0]
    best = max(support, key=lambda i: (arch_class(parts[i].element), -i))
    return best


def normalize(c: Sequence[GroupElement], A: SpanHandle, B: SpanHandle) -> NormalFormBasis:
    """Rewrite the tuple, by invertible rational combinations and base-span
    translations, into a normal-enumeration basis whose blocks are
    simultaneously separated over the base and the extension spans.

    Runs unconditionally; when the required block properties cannot all be
    achieved (possible only for cut-dependent inputs) the obstruction is
    reported in `diagnostics` rather than raised.
    """
    scene = A.scene
    c = list(c)
    n = len(c)
    # precondition: rationally free over the base span
    acc = A
    for x in c:
        if acc.contains(x):
            raise UsageError("input tuple is not rationally free over the base span")
        acc = acc.join([x])
    diagnostics: "list[str]" = []
    trace: "list[tuple]" = []

    cspan = A.join(c)
    base_classes = A.class_set()
    new_over_base = sorted(cls for cls, _ in cspan.arch_classes() if cls not in base_classes)

    # stage one: lifts of the graded pieces at every class the tuple opens,
    # read off a transform-tracked echelonization of base plus tuple
    tilde: "list[_Tracked]" = []
    work_rows = []
    for b in A.basis:
        work_rows.append(_Tracked(b, [Fraction(0)] * n, b))
    for i, x in enumerate(c):
        row = [Fraction(int(i == j)) for j in range(n)]
        work_rows.append(_Tracked(x, row, scene.zero()))
    echelon_tracked: "list[_Tracked]" = []
    for t in work_rows:
        cur = t
        for e in echelon_tracked:
            pivot = next(j for j, v in enumerate(e.element.flat()) if v != 0)
            f = cur.element.flat()[pivot]
            if f != 0:
                cur = _combine_tracked([cur, e], [Fraction(1), -f])
        if cur.element.is_zero():
            continue
        lead = next(j for j, v in enumerate(cur.element.flat()) if v != 0)
        f = cur.element.flat()[lead]
        cur = _combine_tracked([cur], [Fraction(1) / f])
        echelon_tracked.append(cur)
    echelon_tracked.sort(key=lambda t: next(j for j, v in enumerate(t.element.flat()) if v != 0))
    for t in echelon_tracked:
        if arch_class(t.element) not in base_classes:
            tilde.append(t)

    tilde_span = A.join([t.element for t in tilde])
    tilde_payloads: "list[Optional[_Tracked]]" = []
    for b in tilde_span.basis:
        # payload for each echelon row of the joined span: base rows carry
        # no tuple coefficients, the others are re-derived by coordinates
        if A.contains(b):
            tilde_payloads.append(_Tracked(b, [Fraction(0)] * n, b))
            continue
        expr = _express_over(b, A, [t.element for t in tilde])
        if expr is None:
            tilde_payloads.append(None)
            continue
        shift_part, coeffs = expr
        payload = _combine_tracked(
            [_Tracked(shift_part, [Fraction(0)] * n, shift_part)] + tilde,
            [Fraction(1)] + coeffs,
        )
        tilde_payloads.append(payload)

    # complete the graded lifts to a basis of the tuple span over the base
    v_parts: "list[_Tracked]" = []
    selected = A.join([t.element for t in tilde])
    for i, x in enumerate(c):
        if selected.contains(x):
            continue
        v_parts.append(_Tracked(x, [Fraction(int(i == j)) for j in range(n)], scene.zero()))
        selected = selected.join([x])
    assert len(v_parts) + len(tilde) == n, "tuple must split into graded lifts plus a complement"

    # stage two: make every combination of the complement Archimedean over
    # the base (the first ordinal measure governs termination)
    while True:
        trace.append(("P2", _measure_rho(v_parts, new_over_base)))
        if not v_parts:
            break
        cls, combo = minimal_class_witness(
            [t.element for t in v_parts], A, lambda k: k is not None and k not in base_classes
        )
        if combo is None:
            break
        candidate = _combine_tracked(v_parts, combo)
        corrected = _tracked_residue(candidate, tilde_payloads, tilde_span)
        idx = _replace_index(v_parts, combo)
        v_parts[idx] = corrected
    if len(trace) >= 2:
        for a, b in zip(trace, trace[1:]):
            assert a[1] > b[1], "first termination measure failed to decrease"

    # stage three: per level-1 block over the base, eliminate combinations
    # whose upper group drops
    while True:
        groups: dict = {}
        for i, t in enumerate(v_parts):
            profile = cut_profile(t.element, A)
            groups.setdefault(profile.upper, []).append(i)
        acted = False
        for upper in sorted(groups, key=lambda u: u.sort_key(), reverse=True):
            members = groups[upper]
            mu = _upper_boundary(upper, scene)
            cols = _proj_classes(scene, lambda k: mu is None or k >= mu)
            space = _combo_space([v_parts[i].element for i in members], A, cols)
            fresh = _fresh_vector(space, [])
            if fresh is None:
                continue
            combo = [Fraction(0)] * len(v_parts)
            for i, q in zip(members, fresh):
                combo[i] = q
            candidate = _combine_tracked(v_parts, combo)
            idx = _replace_index(v_parts, combo)
            v_parts[idx] = candidate
            acted = True
            break
        if not acted:
            break

    # stage four: within each block, push extension-ramified combinations
    # out of the Archimedean part
    while True:
        acted = False
        arch_idx = [
            i
            for i, t in enumerate(v_parts)
            if not cut_profile(t.element, B).member and not cut_profile(t.element, B).is_ramified
        ]
        groups = {}
        for i in arch_idx:
            groups.setdefault(cut_profile(v_parts[i].element, A).upper, []).append(i)
        for upper in sorted(groups, key=lambda u: u.sort_key(), reverse=True):
            members = groups[upper]
            cls, fresh = minimal_class_witness(
                [v_parts[i].element for i in members],
                B,
                lambda k: k is None or k not in B.class_set(),
            )
            if fresh is None:
                continue
            combo = [Fraction(0)] * len(v_parts)
            for i, q in zip(members, fresh):
                combo[i] = q
            candidate = _combine_tracked(v_parts, combo)
            if cut_profile(candidate.element, B).member:
                diagnostics.append("combination falls inside the extension span")
            idx = _replace_index(v_parts, combo)
            v_parts[idx] = candidate
            acted = True
            break
        if not acted:
            break

    # stage five: align the opened classes of mixed groups over the
    # extension (second ordinal measure)
    ext_classes = B.class_set()
    cb_span = B.join(c)
    new_over_ext = sorted(cls for cls, _ in cb_span.arch_classes() if cls not in ext_classes)

    def trans_classes():
        out = []
        for t in v_parts:
            p = cut_profile(t.element, B)
            if p.is_ramified:
                out.append(p.new_class())
        return out

    while True:
        trace.append(("P5", _measure_g(trans_classes(), new_over_ext)))
        acted = False
        groups: dict = {}
        for i, t in enumerate(v_parts):
            p = cut_profile(t.element, B)
            if p.is_ramified:
                groups.setdefault((p.upper, p.new_class()), []).append(("v", i))
        for t_i, t in enumerate(tilde):
            pa = cut_profile(t.element, A)
            pb = cut_profile(t.element, B)
            if not pa.is_ramified:
                diagnostics.append("graded lift lost base ramification")
                continue
            upper = pb.upper if pb.is_ramified else pa.upper
            groups.setdefault((upper, pa.new_class()), []).append(("t", t_i))
        for key in sorted(groups, key=lambda k: (k[0].sort_key(), _class_key(k[1]))):
            upper, new_cls = key
            members = groups[key]
            elements = []
            ok = True
            for tag, i in members:
                el = (v_parts if tag == "v" else tilde)[i].element
                p = cut_profile(el, B)
                if p.member or not p.is_ramified or p.new_class() != new_cls:
                    diagnostics.append(
                        "mixed group member disagrees with its enumeration class"
                    )
                    ok = False
                    break
                elements.append(el)
            if not ok:
                continue
            rays = [_ray_vector(el, B, new_cls) for el in elements]
            kernel = rational_left_kernel([tuple(r) for r in rays])
            if not kernel:
                continue
            combo = kernel[0]
            trans_support = [
                (pos, q)
                for pos, ((tag, i), q) in enumerate(zip(members, combo))
                if q != 0 and tag == "v"
            ]
            if not trans_support:
                diagnostics.append("pure graded-lift ray collapse; cannot rewrite")
                continue
            parts = [(v_parts if tag == "v" else tilde)[i] for tag, i in members]
            candidate = _combine_tracked(parts, combo)
            pc = cut_profile(candidate.element, B)
            if pc.member or not pc.is_ramified or not pc.new_class() < new_cls:
                diagnostics.append("ray collapse did not lower the opened class")
                continue
            pos = max(
                trans_support,
                key=lambda pq: (arch_class(parts[pq[0]].element), -pq[0]),
            )[0]
            tag, i = members[pos]
            v_parts[i] = candidate
            acted = True
            break
        if not acted:
            break
    p5_trace = [m for s, m in trace if s == "P5"]
    for a, b in zip(p5_trace, p5_trace[1:]):
        assert a > b, "second termination measure failed to decrease"

    # assemble the canonical enumeration
    entries: "list[tuple]" = []
    for t in v_parts:
        pb = cut_profile(t.element, B)
        pa = cut_profile(t.element, A)
        if pb.member:
            kind = KIND_DEPENDENT
        elif pb.is_ramified:
            kind = KIND_TRANSITIONAL
        else:
            kind = KIND_ARCH
        entries.append(
            (
                NormalEntry(kind, t.element, pb.upper, pb.new_class(), pa.new_class()),
                t,
            )
        )
    for t in tilde:
        pb = cut_profile(t.element, B)
        pa = cut_profile(t.element, A)
        entries.append(
            (
                NormalEntry(KIND_RAM, t.element, pb.upper, pb.new_class(), pa.new_class()),
                t,
            )
        )
    rank = {KIND_ARCH: 0, KIND_TRANSITIONAL: 1, KIND_RAM: 2, KIND_DEPENDENT: 3}
    entries.sort(
        key=lambda et: (
            rank[et[0].kind],
            et[0].upper_ext.sort_key(),
            _class_key(et[0].new_class_ext if et[0].kind != KIND_RAM else et[0].new_class_base),
        )
    )
    transform = tuple(tuple(t.row) for _, t in entries)
    if rational_left_kernel([tuple(r) for r in transform]):
        raise AssertionError("normalization transform must stay invertible")
    return NormalFormBasis(
        entries=tuple(e for e, _ in entries),
        transform=transform,
        translations=tuple(t.shift for _, t in entries),
        trace=tuple(trace),
        diagnostics=tuple(dict.fromkeys(diagnostics)),
    )


def _express_over(x: GroupElement, A: SpanHandle, extras: "list[GroupElement]"):
    """Write x as a base-span element plus a rational combination of the
    extras; None when impossible."""
    joined = A.join(extras)
    if not joined.contains(x):
        return None
    # eliminate the base-span components from both sides, then match
    reduced_extras = [A.residue(e) for e in extras]
    reduced_x = A.residue(x)
    kernel_rows = [tuple(r.flat()) for r in reduced_extras] + [tuple(reduced_x.flat())]
    kern = rational_left_kernel(kernel_rows)
    for vec in kern:
        if vec[-1] != 0:
            coeffs = [-v / vec[-1] for v in vec[:-1]]
            shift = x
            for q, e in zip(coeffs, extras):
                shift = shift + e.scale(-q)
            return shift, coeffs
    return None


def check_normal_form(basis: NormalFormBasis, A: SpanHandle, B: SpanHandle) -> dict:
    """Decide each normal-form property exactly; values are
    (holds, counterexample-or-None)."""
    report: dict = {}
    entries = list(basis.entries)
    elements = [e.element for e in entries]
    scene = A.scene

    # freeness of the lift over the extension span
    free_bad = None
    for i, e in enumerate(entries):
        if cut_profile(e.element, B).member:
            free_bad = ("member", i)
            break
    if free_bad is None and elements:
        space = _combo_space(elements, B, _proj_classes(scene, lambda c: True))
        fresh = _fresh_vector(space, [])
        if fresh is not None:
            free_bad = ("combination", tuple(fresh))
    report["free"] = (free_bad is None, free_bad)

    # P1: per base-ramified group, the opened-slot components are free and
    # each lift lives exactly at its class
    p1_bad = None
    ram_groups: dict = {}
    for i, e in enumerate(entries):
        if e.kind == KIND_RAM:
            ram_groups.setdefault((e.upper_ext, e.new_class_base), []).append(i)
    for (upper, cls), members in ram_groups.items():
        for i in members:
            if arch_class(entries[i].element) != cls:
                p1_bad = ("class", i)
                break
        if p1_bad:
            break
        rows = [tuple(entries[i].element.coords[cls.slot]) for i in members]
        kernel = rational_left_kernel(rows)
        if kernel:
            p1_bad = ("combination", tuple(kernel[0]))
            break
    report["P1"] = (p1_bad is None, p1_bad)

    non_ram = [i for i, e in enumerate(entries) if e.kind in (KIND_ARCH, KIND_TRANSITIONAL)]
    # P2: combinations of the non-ramified part stay Archimedean over base
    cls, combo = minimal_class_witness(
        [elements[i] for i in non_ram], A, lambda k: k is not None and k not in A.class_set()
    )
    report["P2"] = (combo is None, None if combo is None else ("combination", tuple(combo)))

    # P3: per enumeration group, upper value over the base is the group's
    p3_bad = None
    by_upper: dict = {}
    for i in non_ram:
        by_upper.setdefault(entries[i].upper_ext, []).append(i)
    for upper, members in by_upper.items():
        for i in members:
            if cut_profile(elements[i], A).upper != upper:
                p3_bad = ("member", i)
                break
        if p3_bad:
            break
        mu = _upper_boundary(upper, scene)
        cols = _proj_classes(scene, lambda k: mu is None or k >= mu)
        space = _combo_space([elements[i] for i in members], A, cols)
        fresh = _fresh_vector(space, [])
        if fresh is not None:
            p3_bad = ("combination", tuple(fresh))
            break
    report["P3"] = (p3_bad is None, p3_bad)

    # P4: combinations of the doubly-Archimedean part stay Archimedean over
    # the extension
    p4_bad = None
    for upper, members in by_upper.items():
        arch_members = [i for i in members if entries[i].kind == KIND_ARCH]
        cls, combo = minimal_class_witness(
            [elements[i] for i in arch_members],
            B,
            lambda k: k is None or k not in B.class_set(),
        )
        if combo is not None:
            p4_bad = ("combination", tuple(combo))
            break
    report["P4"] = (p4_bad is None, p4_bad)

    # P5: mixed groups are ramified over the extension with the declared
    # class, and their rays are free
    p5_bad = None
    mixed: dict = {}
    for i, e in enumerate(entries):
        if e.kind == KIND_TRANSITIONAL:
            mixed.setdefault((e.upper_ext, e.new_class_ext), []).append(i)
        elif e.kind == KIND_RAM:
            mixed.setdefault((e.upper_ext, e.new_class_base), []).append(i)
    for (upper, cls), members in mixed.items():
        rows = []
        for i in members:
            p = cut_profile(elements[i], B)
            if p.member or not p.is_ramified or p.new_class() != cls:
                p5_bad = ("member", i)
                break
            rows.append(tuple(_ray_vector(elements[i], B, cls)))
        if p5_bad:
            break
        kernel = rational_left_kernel(rows)
        if kernel:
            p5_bad = ("combination", tuple(kernel[0]))
            break
    report["P5"] = (p5_bad is None, p5_bad)
    return report
