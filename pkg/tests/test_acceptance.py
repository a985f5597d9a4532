"""Acceptance suite: one test per criterion, each printing a PASS line
with its runtime when it completes within budget."""

import itertools
import math
import random
import time
from fractions import Fraction

from _numeric import numeric_sign
from oagfork.block_theory import (
    is_separated,
    normalize,
    pplus_rays,
    rational_left_kernel,
    val_blocks,
)
from oagfork.congruence import (
    CongruenceSpec,
    IntegerLattice,
    PrimeSpec,
    finite_index_condition,
    hermite_smith,
    infinite_index_condition,
    ltype_equal,
    member_mod_lN,
    saturate_special,
    stabilization_bound,
)
from oagfork.cut_analysis import cut_descriptor, cut_profile, tuple_cut_independent
from oagfork.extension_space import classify_block, weakly_orthogonal
from oagfork.goldens import (
    SQRT23_SPEC,
    SQRT2_SPEC,
    extension_count_scene,
    infinitesimal_scene,
    orthogonality_scene,
    paired_radicals_scene,
    trapped_interval_scene,
)
from oagfork.lex_linear import (
    EQ,
    LE,
    LT,
    Atom,
    LinComb,
    LinearForm,
    SlotConstraint,
    SlotSystem,
    feasible,
    fm_eliminate,
    span_point_form,
    system_feasible,
)
from oagfork.numberfield import FieldSpec, nf_sign, poly_mul, poly_trim
from oagfork.oag_model import ArchClass, SpanHandle, arch_class, compare_elements
from oagfork.sceneio import Scene
from oagfork.selftest import random_scene
from oagfork.verdict import decide_forking

Q = FieldSpec.rationals()


def _report(criterion, t0, detail=""):
    dt = time.monotonic() - t0
    print(f"ACCEPT-{criterion} PASS ({dt:.2f}s) {detail}")


def test_criterion_1_golden_block_structure():
    t0 = time.monotonic()
    G = orthogonality_scene()
    A = G.span_a()
    p1 = cut_profile(G.named("c1"), A)
    p2 = cut_profile(G.named("c2"), A)
    p3 = cut_profile(G.named("c3"), A)
    assert p2.upper == p3.upper
    assert p2.lower == p3.lower
    assert p1.upper.classes == frozenset() and p1.upper.flavor == "type_definable"
    assert p1.lower.classes == frozenset() and p1.lower.flavor == "vee_definable"
    assert p3.is_ramified and p3.ramifier[0].is_zero()
    assert not p1.is_ramified and not p2.is_ramified
    assert weakly_orthogonal([G.named("c2")], [G.named("c1")], A)
    assert weakly_orthogonal([G.named("c2")], [G.named("c3")], A)
    dec = val_blocks([G.named("c1"), G.named("c3"), G.named("c2")], A, 2)
    assert [m for _, m in dec.blocks] == [(0,), (1,), (2,)]
    assert time.monotonic() - t0 < 1.0
    _report(1, t0)


def test_criterion_2_invariant_extension_counts():
    t0 = time.monotonic()
    G = extension_count_scene()
    A, B = G.span_a(), G.span_ab()
    one = classify_block([G.named("c1")], A, B)
    two = classify_block([G.named("c2")], A, B)
    assert one.sub_blocks[0].invariant_extension_count == 1
    assert two.sub_blocks[0].invariant_extension_count == 2
    pair = classify_block([G.named("c1"), G.named("c2")], A, B)
    assert pair.strong_extension_count == len(pair.middle_segment) + 1 == 1
    assert time.monotonic() - t0 < 1.0
    _report(2, t0)


def test_criterion_3_golden_decisions():
    t0 = time.monotonic()
    inf = infinitesimal_scene()
    v1 = decide_forking(Scene(inf.scene, dict(inf.elements), inf.a_names, inf.b_names, inf.c_names))
    assert v1.forking_independent and v1.invariant
    rad = paired_radicals_scene()
    v2 = decide_forking(Scene(rad.scene, dict(rad.elements), rad.a_names, rad.b_names, rad.c_names))
    assert v2.forking_independent
    trap = trapped_interval_scene()
    v3 = decide_forking(
        Scene(trap.scene, dict(trap.elements), ("u", "c2"), ("rt2",), ("c1",))
    )
    assert not v3.forking_independent
    _, lo, hi = v3.interval_witness
    assert lo == trap.named("rt2")
    assert hi == trap.named("rt2") + trap.named("c2")
    # the constructed bound sits exactly at the infinitesimal class
    b = rad.named("c1") - rad.named("rt2") + rad.named("rt3")
    assert arch_class(rad.named("c2") - b) == arch_class(rad.named("eps"))
    assert time.monotonic() - t0 < 5.0
    _report(3, t0)


def _comb(coeffs, const=0):
    return LinComb.make([(v, Q.rational(c)) for v, c in coeffs.items()], Q.rational(const))


def _solve_one_var(constraints, var):
    lo = hi = None
    lo_strict = hi_strict = False
    for c in constraints:
        a = c.comb.coeff(var)
        rest = c.comb.drop(var)
        const = rest.const.as_fraction()
        if a is None:
            ok = const < 0 if c.rel == LT else (const <= 0 if c.rel == LE else const == 0)
            if not ok:
                return False
            continue
        af = a.as_fraction()
        bound = Fraction(-const, af)
        if c.rel == EQ:
            if (lo is None or bound >= lo) and (hi is None or bound <= hi):
                lo = hi = bound
                lo_strict = hi_strict = False
            else:
                return False
            continue
        strict = c.rel == LT
        if af > 0 and (hi is None or bound < hi or (bound == hi and strict)):
            hi, hi_strict = bound, strict
        if af < 0 and (lo is None or bound > lo or (bound == lo and strict)):
            lo, lo_strict = bound, strict
    if lo is None or hi is None:
        return True
    if lo < hi:
        return True
    return lo == hi and not (lo_strict or hi_strict)


def test_criterion_4_oracle_equivalence():
    t0 = time.monotonic()
    rng = random.Random(404)
    # projection oracle on random rational systems
    grid = [Fraction(n, d) for d in (1, 2, 4, 8) for n in range(-8, 9)]
    for _ in range(120):
        vars_ = ["v0", "v1", "v2"]
        cons = [
            SlotConstraint(
                _comb(
                    {v: rng.randint(-4, 4) for v in vars_},
                    rng.randint(-4, 4),
                ),
                rng.choice([LT, LE, LE]),
            )
            for _ in range(6)
        ]
        system = SlotSystem.make(cons)
        out = fm_eliminate(system, ["v2"])
        for _ in range(4):
            x0, x1 = rng.choice(grid), rng.choice(grid)
            fixed = SlotSystem.make(
                [
                    SlotConstraint(_comb({"v0": 1}, -x0), EQ),
                    SlotConstraint(_comb({"v1": 1}, -x1), EQ),
                ]
            )
            subbed = []
            for c in system.constraints:
                comb = c.comb.substitute("v0", LinComb.make([], Q.rational(x0)))
                comb = comb.substitute("v1", LinComb.make([], Q.rational(x1)))
                subbed.append(SlotConstraint(comb, c.rel))
            oracle = _solve_one_var(subbed, "v2")
            assert (system_feasible(system.and_also(fixed)) is not None) == oracle
            assert (system_feasible(out.and_also(fixed)) is not None) == oracle

    # full decision procedure on random scenes: witnesses replay exactly,
    # negative verdicts survive a bounded counterexample search
    scenes = 0
    while scenes < 500:
        scene = random_scene(rng)
        A = scene.span_a()
        B = scene.span_ab()
        C = A.join(scene.c_tuple())
        independent, witness = tuple_cut_independent(A, B, C)
        if not independent:
            point, lo, hi = witness
            assert lo <= point <= hi
            assert C.contains(point) and B.contains(lo) and B.contains(hi)
            probe = span_point_form("probe", A)
            lo_f, hi_f = LinearForm.constant(lo), LinearForm.constant(hi)
            assert feasible([Atom(lo_f - probe, LE), Atom(probe - hi_f, LE)]) is None
        else:
            for _ in range(6):
                cand = [
                    sum(
                        (b.scale(Fraction(rng.randint(-2, 2), rng.randint(1, 2))) for b in span.basis),
                        scene.ambient.zero(),
                    )
                    for span in (B, B, C)
                ]
                lo, hi, point = cand
                if lo <= point <= hi:
                    probe = span_point_form("probe", A)
                    meets = feasible(
                        [
                            Atom(LinearForm.constant(lo) - probe, LE),
                            Atom(probe - LinearForm.constant(hi), LE),
                        ]
                    )
                    assert meets is not None
        scenes += 1

    # separatedness vs bounded combination search
    RAD = paired_radicals_scene()
    Bspan = RAD.span_ab()
    names = ["c1", "c2", "eps", "eps_rt2"]
    checked = 0
    while checked < 60:
        block = []
        for _ in range(3):
            x = RAD.scene.zero()
            for nm in names:
                if rng.random() < 0.4:
                    x = x + RAD.named(nm).scale(rng.randint(-2, 2))
            if not x.is_zero():
                block.append(x)
        if len(block) < 2:
            continue
        verdict, combo = is_separated(block, Bspan, 3)
        if not verdict:
            assert combo is not None and any(combo)
            s = RAD.scene.zero()
            for q, x in zip(combo, block):
                s = s + x.scale(q)
            dec = val_blocks(block, Bspan, 3)
            support_keys = {
                dec.key_of(i) for i, q in enumerate(combo) if q != 0
            }
            ps = cut_profile(s, Bspan)
            if not ps.member and None not in support_keys and len(support_keys) == 1:
                key = support_keys.pop()
                s_key = (ps.upper, ps.is_ramified, ps.new_class())
                assert s_key != (key.upper, key.ram, key.new_class)
        else:
            dec = val_blocks(block, Bspan, 3)
            # exhaustive over pairs at height six, sampled over triples
            candidates = list(itertools.product(range(-6, 7), repeat=2))
            pairs = [(i, j) for i in range(len(block)) for j in range(i + 1, len(block))]
            searched = []
            for i, j in pairs:
                for qi, qj in candidates:
                    coeffs = [0] * len(block)
                    coeffs[i], coeffs[j] = qi, qj
                    searched.append(tuple(coeffs))
            for _ in range(80):
                searched.append(tuple(rng.randint(-6, 6) for _ in block))
            for coeffs in searched:
                if not any(coeffs):
                    continue
                keys = {dec.key_of(i) for i, q in enumerate(coeffs) if q != 0}
                if len(keys) != 1 or None in keys:
                    continue
                key = keys.pop()
                s = RAD.scene.zero()
                for q, x in zip(coeffs, block):
                    s = s + x.scale(q)
                ps = cut_profile(s, Bspan)
                assert not ps.member
                s_key = (ps.upper, ps.is_ramified, ps.new_class())
                assert s_key == (key.upper, key.ram, key.new_class)
        checked += 1
    assert time.monotonic() - t0 < 300
    _report(4, t0, f"{scenes} scenes")


def test_criterion_5_termination_measures():
    t0 = time.monotonic()
    rng = random.Random(505)
    runs = 0
    while runs < 200:
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
            assert all(a > b for a, b in zip(seq, seq[1:])), (stage, seq)
        runs += 1
    _report(5, t0, f"{runs} runs")


def _brute_member(x, rows, l, N):
    m = l**N
    for combo in itertools.product(range(m), repeat=len(rows)):
        if all(
            (sum(q * row[j] for q, row in zip(combo, rows)) - x[j]) % m == 0
            for j in range(len(x))
        ):
            return True
    return False


def test_criterion_6_congruence_brute_force():
    t0 = time.monotonic()
    rng = random.Random(606)
    instances = 0
    while instances < 300:
        l = rng.choice([2, 3])
        width = rng.randint(1, 3)
        k = rng.randint(1, 3)
        N = rng.randint(1, 4)
        if (l**N) ** k > 5000:
            N = 1 if k == 3 else 2
        rows = [[rng.randint(-4, 4) for _ in range(width)] for _ in range(k)]
        lat = IntegerLattice(rows, width=width)
        spec = CongruenceSpec(
            (
                PrimeSpec(
                    l,
                    "infinite_index",
                    width=width,
                    residues=(("one", tuple(1 if j == 0 else 0 for j in range(width))),),
                ),
            )
        )
        x = [rng.randint(-4, 4) for _ in range(width)]
        assert member_mod_lN(x, lat, l, N, spec) == _brute_member(x, rows, l, N)
        instances += 1

    # conditions against exhaustive enumeration, plus stabilization checks
    for _ in range(60):
        l = rng.choice([2, 3])
        width = 2
        residues = (
            ("one", (1, 0)),
            ("a", tuple(rng.randint(-2, 2) for _ in range(width))),
            ("b", tuple(rng.randint(-2, 2) for _ in range(width))),
        )
        spec = CongruenceSpec(
            (PrimeSpec(l, "infinite_index", width=width, residues=residues),)
        )
        A = saturate_special(["a"], spec).lattice(l)
        B = saturate_special(["a", "b"], spec).lattice(l)
        C = IntegerLattice(
            [[rng.randint(-3, 3) for _ in range(width)] for _ in range(rng.randint(1, 2))],
            width=width,
        )
        holds, witness = infinite_index_condition(C, A, B, l, spec)
        nstar = stabilization_bound(l, C, A, B)
        if not holds:
            # replay the witness through exhaustive membership checks
            f, N = witness
            combo = [sum(q * row[j] for q, row in zip(f, C.rows)) for j in range(width)]
            assert _brute_member(combo, B.rows, l, N)
            assert not _brute_member(combo, A.rows, l, N)
        else:
            # a bounded search must find no counterexample
            for N in range(1, min(nstar + 2, 4) + 1):
                for f in itertools.product(range(-3, 4), repeat=len(C.rows)):
                    if not any(f):
                        continue
                    combo = [
                        sum(q * row[j] for q, row in zip(f, C.rows)) for j in range(width)
                    ]
                    assert not (
                        _brute_member(combo, B.rows, l, N)
                        and not _brute_member(combo, A.rows, l, N)
                    )
        # stabilization: extending the sweep never flips the verdict
        wide = CongruenceSpec(
            (
                PrimeSpec(
                    l,
                    "infinite_index",
                    width=width,
                    residues=residues,
                    n_max=nstar + 2,
                ),
            )
        )
        holds2, _ = infinite_index_condition(C, A, B, l, wide)
        assert holds2 == holds

    # l-type equality against direct enumeration of integer forms
    for _ in range(40):
        l = 2
        width = 2
        S = IntegerLattice([[1, 0]], width=width)
        spec = CongruenceSpec(
            (PrimeSpec(l, "finite_index", width=width, residues=(("one", (1, 0)),)),)
        )
        x = [tuple(rng.randint(-3, 3) for _ in range(width))]
        y = [tuple(rng.randint(-3, 3) for _ in range(width))]
        got = ltype_equal(x, y, S, l, spec)
        brute = True
        for N in range(1, 5):
            m = l**N
            for f in range(-4, 5):
                if f == 0:
                    continue
                fx = [f * v for v in x[0]]
                fy = [f * v for v in y[0]]
                same_coset = all((a - b) % m == 0 for a, b in zip(fx, fy))
                x_in = _brute_member(fx, S.rows, l, N)
                y_in = _brute_member(fy, S.rows, l, N)
                if not same_coset and (x_in or y_in):
                    brute = False
                    break
            if not brute:
                break
        assert got == brute
        instances += 1
    assert time.monotonic() - t0 < 120
    _report(6, t0, f"{instances} instances")


def test_criterion_7_structural_invariants():
    t0 = time.monotonic()
    rng = random.Random(707)
    ORTH = orthogonality_scene()
    A = ORTH.span_a()
    names = list(ORTH.elements)

    def rand_point(g, pool):
        total = g.scene.zero()
        for nm in pool:
            if rng.random() < 0.6:
                total = total + g.named(nm).scale(Fraction(rng.randint(-3, 3), rng.randint(1, 2)))
        return total

    # ultrametric law and bracketing order
    for _ in range(40):
        x, y = rand_point(ORTH, names), rand_point(ORTH, names)
        if A.contains(x) or A.contains(y) or A.contains(x + y):
            continue
        px, py, ps = (cut_profile(z, A) for z in (x, y, x + y))
        assert ps.upper <= max(px.upper, py.upper, key=lambda u: u.sort_key())
        assert px.lower <= px.upper
        if px.upper < py.upper:
            assert px.upper < py.lower

    # monotone bracketing under independent base extension
    T = trapped_interval_scene()
    At, Bt = T.span("u"), T.span("u", "rt2", "c2")
    from oagfork.cut_analysis import unary_cut_independent

    for _ in range(25):
        d = rand_point(T, list(T.elements))
        if At.contains(d):
            continue
        ok, _ = unary_cut_independent(d, At, Bt)
        if ok:
            pa, pb = cut_profile(d, At), cut_profile(d, Bt)
            assert pa.lower <= pb.lower and pb.upper <= pa.upper

    # translation equivariance of cuts
    for _ in range(25):
        d = rand_point(ORTH, ["c1", "c2", "c3"])
        a = rand_point(ORTH, ["e1", "e2", "e3"])
        if A.contains(d):
            continue
        assert cut_descriptor(d + a, A).same_cut(cut_descriptor(d, A).translate(a))

    # ray freeness matches separatedness on ramified blocks, with the
    # integer lattice rank as an independent oracle
    RAD = paired_radicals_scene()
    Bs = RAD.span_ab()
    for _ in range(25):
        q1, q2, q3, q4 = (rng.randint(-2, 2) for _ in range(4))
        x = RAD.named("eps").scale(q1) + RAD.named("eps_rt2").scale(q2)
        y = RAD.named("eps").scale(q3) + RAD.named("eps_rt2").scale(q4)
        if x.is_zero() or y.is_zero():
            continue
        block = [x, y]
        sep, _ = is_separated(block, Bs, 3)
        rays = pplus_rays(block, Bs)
        scaled = []
        for r in rays:
            denom = 1
            for v in r.direction:
                denom = denom * v.denominator // math.gcd(denom, v.denominator)
            scaled.append([int(v * denom) for v in r.direction])
        rank = hermite_smith(scaled).rank
        assert sep == (rank == len(block))

    # verdict invariance under interdefinable re-presentation
    goldens_scenes = [
        (infinitesimal_scene(), None),
        (paired_radicals_scene(), None),
        (trapped_interval_scene(), (("u", "c2"), ("rt2",), ("c1",))),
    ]
    for g, override in goldens_scenes:
        if override:
            a_names, b_names, c_names = override
        else:
            a_names, b_names, c_names = g.a_names, g.b_names, g.c_names
        base_scene = Scene(g.scene, dict(g.elements), a_names, b_names, c_names)
        base = decide_forking(base_scene).forking_independent
        a_pool = list(a_names)
        c_list = [g.named(n) for n in c_names]
        n = len(c_list)
        for _ in range(100):
            # random invertible triangular transform with a permutation
            perm = list(range(n))
            rng.shuffle(perm)
            coeffs = [[Fraction(0)] * n for _ in range(n)]
            for i in range(n):
                coeffs[i][perm[i]] = Fraction(rng.choice([1, -1, 2, Fraction(1, 2)]))
                for j in range(n):
                    if perm[j] < perm[i]:
                        coeffs[i][j] = Fraction(rng.randint(-2, 2))
            new_c = []
            for i in range(n):
                total = g.scene.zero()
                for j in range(n):
                    if coeffs[i][j]:
                        total = total + c_list[j].scale(coeffs[i][j])
                for nm in a_pool:
                    if rng.random() < 0.3:
                        total = total + g.named(nm).scale(rng.randint(-2, 2))
                new_c.append(total)
            elements = dict(g.elements)
            new_names = []
            for i, x in enumerate(new_c):
                elements[f"t{i}"] = x
                new_names.append(f"t{i}")
            scene = Scene(g.scene, elements, a_names, b_names, tuple(new_names))
            verdict = decide_forking(scene)
            assert verdict.forking_independent == base
            # the equivalence structure is asserted by construction on
            # every verdict; touching the fields keeps that visible here
            assert verdict.dividing_independent == verdict.forking_independent
            assert verdict.bounded_orbit == verdict.forking_independent
            assert not verdict.invariant or verdict.forking_independent
    assert time.monotonic() - t0 < 300
    _report(7, t0)


def test_criterion_8_number_field_soundness():
    t0 = time.monotonic()
    rng = random.Random(808)
    conclusive = 0
    for _ in range(1000):
        spec = SQRT23_SPEC if rng.random() < 0.7 else SQRT2_SPEC
        e = spec.element(
            [
                Fraction(rng.randint(-100, 100), rng.randint(1, 100))
                for _ in range(spec.degree)
            ]
        )
        numeric = numeric_sign(e, digits=50)
        if numeric is not None:
            conclusive += 1
            assert nf_sign(e, spec) == numeric
    reducible = FieldSpec.make([6, 0, -5, 0, 1], (Fraction(7, 5), Fraction(3, 2)))
    for _ in range(60):
        spec = rng.choice([SQRT2_SPEC, SQRT23_SPEC])
        mult = poly_trim([Fraction(rng.randint(-9, 9)) for _ in range(rng.randint(1, 3))])
        planted = spec.element(poly_mul(mult, spec.minpoly))
        assert nf_sign(planted, spec) == 0
        # a factor vanishing at the isolated root of a reducible modulus
        factor = reducible.element([-2, 0, 1])
        scaled = factor.scale(Fraction(rng.randint(1, 9)))
        assert nf_sign(scaled, reducible) == 0
    assert time.monotonic() - t0 < 30
    _report(8, t0, f"{conclusive} conclusive numerics")
