"""Classification of the invariant extensions of block types.

A ramified block over the extension span splits into sub-blocks by the
class each member opens.  Whether a sub-block's type admits one or two
invariant extensions over the base is decided by comparing the bracketing
convex subgroups over both spans and spotting base-Archimedean members;
the sub-blocks that can jointly extend the whole block type are exactly
those where an initial segment goes inner and the rest go outer, giving
|J|+1 strong choices with J the undetermined middle segment.

The space of all invariant extensions of a full tuple's type is reported
symbolically: one factor per level-1 block, each a finite coproduct over
the strong ramified choices of a closed type-space descriptor whose
parameter count collects the Archimedean and outer coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .block_theory import is_separated, normalize, val_blocks
from .cut_analysis import cut_profile, tuple_cut_independent
from .errors import ConfigurationError, UsageError
from .oag_model import ArchClass, GroupElement, SpanHandle

OUTER_ONLY = "outer-only"
INNER_ONLY = "inner-only"
INNER_AND_OUTER = "inner-and-outer"


@dataclass(frozen=True)
class SubBlock:
    new_class: ArchClass
    members: tuple  # indices into the block tuple
    available: str  # which invariant extensions the sub-block type admits
    invariant_extension_count: int


@dataclass(frozen=True)
class BlockClassification:
    block_id: str
    kind: str  # "ram" (Archimedean blocks need no segmentation)
    sub_blocks: tuple  # tuple[SubBlock, ...], ascending opened class
    inner_segment: tuple  # indices into sub_blocks
    middle_segment: tuple
    outer_segment: tuple

    @property
    def strong_extension_count(self) -> int:
        return len(self.middle_segment) + 1


def classify_block(block: Sequence[GroupElement], A: SpanHandle, B: SpanHandle) -> BlockClassification:
    """Segment a separated ramified block into forced-inner, free, and
    forced-outer sub-blocks, with per-sub-block extension counts."""
    block = list(block)
    if not block:
        raise UsageError("cannot classify an empty block")
    profiles_b = [cut_profile(x, B) for x in block]
    if any(p.member or not p.is_ramified for p in profiles_b):
        raise UsageError("classification needs a block of extension-ramified points")
    uppers = {p.upper for p in profiles_b}
    lowers = {p.lower for p in profiles_b}
    if len(uppers) != 1 or len(lowers) != 1:
        raise UsageError("classification needs a single level-2 block")
    sep, _ = is_separated(block, B, 3)
    if not sep:
        raise UsageError("classification needs a level-3-separated block")
    independent, _ = tuple_cut_independent(A, B, A.join(block))
    if not independent:
        raise UsageError("classification needs a cut-independent block")
    upper_b = uppers.pop()
    lower_b = lowers.pop()
    profiles_a = [cut_profile(x, A) for x in block]
    h_equal = all(p.lower == lower_b for p in profiles_a)
    g_equal = all(p.upper == upper_b for p in profiles_a)

    groups: dict = {}
    for i, p in enumerate(profiles_b):
        groups.setdefault(p.new_class(), []).append(i)
    order = sorted(groups)
    arch_flags = [
        any(not profiles_a[i].is_ramified for i in groups[cls]) for cls in order
    ]

    sub_blocks = []
    for cls, has_arch in zip(order, arch_flags):
        if g_equal and h_equal and not has_arch:
            available, count = INNER_AND_OUTER, 2
        elif g_equal:
            available, count = OUTER_ONLY, 1
        elif h_equal and not has_arch:
            available, count = INNER_ONLY, 1
        else:
            raise UsageError(
                "no invariant extension available; the block cannot be cut-independent"
            )
        sub_blocks.append(SubBlock(cls, tuple(groups[cls]), available, count))

    n = len(order)
    if not h_equal:
        inner, outer = (), tuple(range(n))
    elif not g_equal:
        inner, outer = tuple(range(n)), ()
    else:
        first_arch = next((k for k, f in enumerate(arch_flags) if f), n)
        inner, outer = (), tuple(range(first_arch, n))
    middle = tuple(k for k in range(n) if k not in inner and k not in outer)
    return BlockClassification(
        block_id="+".join(str(i) for i in range(len(block))),
        kind="ram",
        sub_blocks=tuple(sub_blocks),
        inner_segment=inner,
        middle_segment=middle,
        outer_segment=outer,
    )


@dataclass(frozen=True)
class GluingPlan:
    """Order in which sub-block extensions compose: inner ones by
    ascending opened class, then outer ones descending."""

    steps: tuple  # tuple[(sub_block_index, "inner"|"outer"), ...]


def gluing_plan(classification: BlockClassification, inner_middle: Optional[int] = None) -> GluingPlan:
    """The composition order for one strong choice: all forced-inner
    sub-blocks, an initial segment of the free middle (defaults to all of
    it), then the rest outer."""
    middle = classification.middle_segment
    if inner_middle is None:
        inner_middle = len(middle)
    if not 0 <= inner_middle <= len(middle):
        raise ConfigurationError("middle split out of range")
    inner = list(classification.inner_segment) + list(middle[:inner_middle])
    outer = list(middle[inner_middle:]) + list(classification.outer_segment)
    if inner and outer and max(inner) > min(outer):
        raise ConfigurationError("inner sub-blocks must precede outer ones")
    key = lambda k: classification.sub_blocks[k].new_class
    steps = [(k, "inner") for k in sorted(inner, key=key)]
    steps += [(k, "outer") for k in sorted(outer, key=key, reverse=True)]
    return GluingPlan(tuple(steps))


def weakly_orthogonal(block_i: Sequence[GroupElement], block_j: Sequence[GroupElement], D: SpanHandle) -> bool:
    """Blocks of one decomposition over the span are weakly orthogonal
    exactly when they carry distinct level-2 values."""

    def key(block):
        profiles = [cut_profile(x, D) for x in block]
        if any(p.member for p in profiles):
            raise UsageError("weak orthogonality needs non-member blocks")
        keys = {(p.upper, p.is_ramified) for p in profiles}
        if len(keys) != 1:
            raise UsageError("each block must carry a single level-2 value")
        return keys.pop()

    return key(block_i) != key(block_j)


@dataclass(frozen=True)
class Summand:
    inner_classes: tuple
    outer_classes: tuple
    parameter_count: int


@dataclass(frozen=True)
class Factor:
    arch_size: int
    ram_size: int
    summands: tuple  # tuple[Summand, ...]


@dataclass(frozen=True)
class PrimeFactor:
    l: int
    kind: str  # "point" | "zl_subspace"
    dim: Optional[int] = None


@dataclass(frozen=True)
class SpaceDescriptor:
    empty: bool
    factors: tuple = ()
    prime_factors: tuple = ()

    @property
    def factor_count(self) -> int:
        return len(self.factors)


def space_descriptor(
    c: Sequence[GroupElement],
    A: SpanHandle,
    B: SpanHandle,
    prime_factors: Sequence[PrimeFactor] = (),
) -> SpaceDescriptor:
    """Symbolic description of the space of invariant extensions of the
    tuple's type: empty when cut-dependent, otherwise one factor per
    level-1 block of the normalized basis, each a coproduct over the
    strong ramified choices, with the congruence factors (computed by the
    caller, who owns the residue data) appended."""
    c = list(c)
    independent, _ = tuple_cut_independent(A, B, A.join(c))
    if not independent:
        return SpaceDescriptor(empty=True)
    reduced = []
    acc = A
    for x in c:
        if not acc.contains(x):
            reduced.append(x)
            acc = acc.join([x])
    if not reduced:
        return SpaceDescriptor(empty=False, factors=(), prime_factors=tuple(prime_factors))
    basis = normalize(reduced, A, B)
    elements = list(basis.elements())
    decomposition = val_blocks(elements, B, 1)
    factors = []
    for _, members in decomposition.blocks:
        block = [elements[i] for i in members]
        ram = [x for x in block if cut_profile(x, B).is_ramified]
        arch = [x for x in block if not cut_profile(x, B).is_ramified]
        if not ram:
            factors.append(
                Factor(len(arch), 0, (Summand((), (), len(arch)),))
            )
            continue
        classification = classify_block(ram, A, B)
        summands = []
        middle = classification.middle_segment
        for split in range(len(middle), -1, -1):
            plan_inner = list(classification.inner_segment) + list(middle[:split])
            plan_outer = list(middle[split:]) + list(classification.outer_segment)
            outer_size = sum(
                len(classification.sub_blocks[k].members) for k in plan_outer
            )
            summands.append(
                Summand(
                    tuple(classification.sub_blocks[k].new_class for k in plan_inner),
                    tuple(classification.sub_blocks[k].new_class for k in plan_outer),
                    len(arch) + outer_size,
                )
            )
        factors.append(Factor(len(arch), len(ram), tuple(summands)))
    return SpaceDescriptor(
        empty=False, factors=tuple(factors), prime_factors=tuple(prime_factors)
    )
