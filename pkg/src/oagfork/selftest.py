"""Built-in golden and property suites behind the `selftest` CLI command.

Each item prints one PASS/FAIL line; the runner returns the failure count.
The random-scene generator here is also reused by the test suite's
larger-scale oracle runs.
"""

from __future__ import annotations

import random
from fractions import Fraction

from . import goldens
from .block_theory import check_normal_form, normalize
from .congruence import (
    CongruenceSpec,
    IntegerLattice,
    PrimeSpec,
    infinite_index_condition,
    member_mod_lN,
)
from .cut_analysis import cut_profile, tuple_cut_independent
from .errors import UsageError
from .extension_space import classify_block
from .numberfield import nf_sign
from .oag_model import AmbientScene, ArchClass, Slot, SpanHandle
from .sceneio import Scene
from .verdict import decide_forking


def random_scene(rng: random.Random, *, max_slots: int = 3, max_tuple: int = 3) -> Scene:
    """A small random dense configuration over the square-root-of-two
    field: up to three slots with one or two generators each, short
    parameter lists, coefficient height at most four."""
    spec = goldens.SQRT2_SPEC
    one = spec.one()
    rt2 = spec.theta()
    n_slots = rng.randint(1, max_slots)
    slots = tuple(
        Slot((one, rt2) if rng.random() < 0.5 else (one,)) for _ in range(n_slots)
    )
    ambient = AmbientScene("dense", slots, spec)

    def rand_element():
        coords = []
        for slot in slots:
            vec = [
                Fraction(rng.randint(-4, 4), rng.randint(1, 4)) if rng.random() < 0.6 else Fraction(0)
                for _ in range(slot.dim)
            ]
            coords.append(vec)
        return ambient.element(coords)

    elements = {}
    a_names, b_names, c_names = [], [], []
    for i in range(rng.randint(0, 2)):
        elements[f"a{i}"] = rand_element()
        a_names.append(f"a{i}")
    for i in range(rng.randint(0, 2)):
        elements[f"b{i}"] = rand_element()
        b_names.append(f"b{i}")
    for i in range(rng.randint(1, max_tuple)):
        x = rand_element()
        if x.is_zero():
            x = ambient.unit_vector(rng.randrange(n_slots), 0)
        elements[f"c{i}"] = x
        c_names.append(f"c{i}")
    return Scene(
        ambient=ambient,
        elements=elements,
        a_names=tuple(a_names),
        b_names=tuple(b_names),
        c_names=tuple(c_names),
    )


def random_residue_instance(rng: random.Random, l: int = 2, width: int = 2):
    """Random lattices for the congruence conditions, plus the spec."""
    residues = [
        ("one", tuple(1 if j == 0 else 0 for j in range(width))),
        ("a", tuple(rng.randint(-3, 3) for _ in range(width))),
        ("b", tuple(rng.randint(-3, 3) for _ in range(width))),
    ]
    spec = CongruenceSpec(
        (PrimeSpec(l, "infinite_index", width=width, residues=tuple(residues)),)
    )
    C = IntegerLattice(
        [[rng.randint(-4, 4) for _ in range(width)] for _ in range(rng.randint(1, 2))],
        width=width,
    )
    return spec, C


def _golden_profiles() -> None:
    G = goldens.orthogonality_scene()
    A = G.span_a()
    p1, p2, p3 = (cut_profile(G.named(n), A) for n in ("c1", "c2", "c3"))
    assert p2.upper == p3.upper and p2.lower == p3.lower
    assert not p1.is_ramified and not p2.is_ramified and p3.is_ramified
    assert p3.ramifier[0].is_zero() and p3.ramifier[1] == ArchClass(1)
    assert p1.upper.classes == frozenset() and p1.lower.classes == frozenset()


def _golden_extension_counts() -> None:
    G = goldens.extension_count_scene()
    A, B = G.span_a(), G.span_ab()
    assert classify_block([G.named("c1")], A, B).sub_blocks[0].invariant_extension_count == 1
    assert classify_block([G.named("c2")], A, B).sub_blocks[0].invariant_extension_count == 2
    pair = classify_block([G.named("c1"), G.named("c2")], A, B)
    assert pair.strong_extension_count == 1


def _golden_decisions() -> None:
    inf = goldens.infinitesimal_scene()
    scene = Scene(inf.scene, dict(inf.elements), inf.a_names, inf.b_names, inf.c_names)
    verdict = decide_forking(scene)
    assert verdict.forking_independent and verdict.invariant
    rad = goldens.paired_radicals_scene()
    scene2 = Scene(rad.scene, dict(rad.elements), rad.a_names, rad.b_names, rad.c_names)
    assert decide_forking(scene2).forking_independent
    trap = goldens.trapped_interval_scene()
    ok, witness = tuple_cut_independent(
        trap.span("u", "c2"),
        trap.span("u", "rt2", "c2"),
        trap.span("u", "c2", "c1"),
    )
    assert not ok
    _, lo, hi = witness
    assert lo == trap.named("rt2") and hi == trap.named("rt2") + trap.named("c2")


def _fuzz_decisions(count: int = 12) -> None:
    rng = random.Random(2024)
    for _ in range(count):
        scene = random_scene(rng)
        verdict = decide_forking(scene)
        if not verdict.condition1:
            point, lo, hi = verdict.interval_witness
            assert lo <= point <= hi
            assert not scene.span_a().contains(point)


def _fuzz_congruence(count: int = 15) -> None:
    rng = random.Random(77)
    for _ in range(count):
        spec, C = random_residue_instance(rng)
        from .congruence import saturate_special

        A = saturate_special(["a"], spec).lattice(2)
        B = saturate_special(["a", "b"], spec).lattice(2)
        holds, witness = infinite_index_condition(C, A, B, 2, spec)
        if not holds:
            f, N = witness
            combo = [sum(q * row[j] for q, row in zip(f, C.rows)) for j in range(C.width)]
            assert member_mod_lN(combo, B, 2, N, spec)
            assert not member_mod_lN(combo, A, 2, N, spec)


def _fuzz_signs(count: int = 100) -> None:
    rng = random.Random(5)
    spec = goldens.SQRT23_SPEC
    for _ in range(count):
        e = spec.element(
            [Fraction(rng.randint(-40, 40), rng.randint(1, 20)) for _ in range(4)]
        )
        assert nf_sign(e, spec) == -nf_sign(-e, spec)


def _fuzz_normalize(count: int = 8) -> None:
    rng = random.Random(31)
    done = 0
    while done < count:
        scene = random_scene(rng)
        A = scene.span_a()
        B = scene.span_ab()
        c = []
        acc = A
        for x in scene.c_tuple():
            if not acc.contains(x):
                c.append(x)
                acc = acc.join([x])
        if not c:
            continue
        basis = normalize(c, A, B)
        for stage in ("P2", "P5"):
            seq = [m for s, m in basis.trace if s == stage]
            assert all(a > b for a, b in zip(seq, seq[1:]))
        independent, _ = tuple_cut_independent(A, B, A.join(c))
        if independent:
            report = check_normal_form(basis, A, B)
            assert all(ok for ok, _ in report.values()), report
        done += 1


ITEMS = (
    ("golden-profiles", _golden_profiles),
    ("golden-extension-counts", _golden_extension_counts),
    ("golden-decisions", _golden_decisions),
    ("fuzz-decisions", _fuzz_decisions),
    ("fuzz-congruence", _fuzz_congruence),
    ("fuzz-signs", _fuzz_signs),
    ("fuzz-normalize", _fuzz_normalize),
)


def run(out=print) -> int:
    failures = 0
    for name, item in ITEMS:
        try:
            item()
        except Exception as exc:  # report and continue
            failures += 1
            out(f"FAIL {name}: {exc}")
        else:
            out(f"PASS {name}")
    return failures
