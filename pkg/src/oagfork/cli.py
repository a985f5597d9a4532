"""Command-line interface.

Exit codes: 0 for an independent verdict (or plain success), 1 for a
dependent verdict, 2 for configuration errors.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import selftest
from .block_theory import check_normal_form, normalize, val_blocks
from .congruence import KIND_DIVISIBLE, KIND_FINITE
from .cut_analysis import cut_profile
from .errors import ConfigurationError, OagforkError
from .extension_space import PrimeFactor, space_descriptor
from .sceneio import (
    Scene,
    arch_class_json,
    descriptor_json,
    element_json,
    frac_to_str,
    parse_scene_file,
    profile_json,
    scene_to_text,
)
from .verdict import decide_forking


def _emit(payload, as_json: bool) -> None:
    if as_json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(json.dumps(payload, indent=2, sort_keys=True))


def _verdict_json(verdict) -> dict:
    out = {
        "forking_independent": verdict.forking_independent,
        "dividing_independent": verdict.dividing_independent,
        "bounded_orbit": verdict.bounded_orbit,
        "invariant": verdict.invariant,
        "condition1": verdict.condition1,
        "condition2": [
            {"l": p.l, "kind": p.kind, "holds": p.holds, "witness": _prime_witness(p)}
            for p in verdict.condition2
        ],
        "invariance_extra": [
            {"l": p.l, "kind": p.kind, "holds": p.holds, "witness": _prime_witness(p)}
            for p in verdict.invariance_extra
        ],
        "notes": list(verdict.notes),
    }
    if verdict.interval_witness is not None:
        point, lo, hi = verdict.interval_witness
        out["interval_witness"] = {
            "point": element_json(point),
            "lo": element_json(lo),
            "hi": element_json(hi),
        }
    return out


def _prime_witness(p) -> "dict | None":
    if p.witness is None:
        return None
    coeffs, n = p.witness
    return {"coefficients": list(coeffs), "N": n}


def cmd_decide(args) -> int:
    scene = parse_scene_file(args.scene)
    verdict = decide_forking(scene)
    if args.json:
        _emit(_verdict_json(verdict), True)
    else:
        print("independent" if verdict.forking_independent else "dependent")
        print(f"invariant extension exists: {'yes' if verdict.invariant else 'no'}")
        if verdict.interval_witness is not None:
            point, lo, hi = verdict.interval_witness
            print("trapping interval:")
            for tag, el in (("lo", lo), ("point", point), ("hi", hi)):
                print(f"  {tag}: {element_json(el)}")
        for p in verdict.condition2 + verdict.invariance_extra:
            status = "holds" if p.holds else "fails"
            print(f"prime {p.l} ({p.kind}): {status}")
    return 0 if verdict.forking_independent else 1


def cmd_normalize(args) -> int:
    scene = parse_scene_file(args.scene)
    A = scene.span_a()
    B = scene.span_ab()
    c = []
    acc = A
    for x in scene.c_tuple():
        if not acc.contains(x):
            c.append(x)
            acc = acc.join([x])
    basis = normalize(c, A, B)
    payload = {
        "entries": [
            {
                "kind": e.kind,
                "element": element_json(e.element),
                "upper": descriptor_json(e.upper_ext),
                "new_class_ext": arch_class_json(e.new_class_ext),
                "new_class_base": arch_class_json(e.new_class_base),
            }
            for e in basis.entries
        ],
        "transform": [[frac_to_str(q) for q in row] for row in basis.transform],
        "translations": [element_json(t) for t in basis.translations],
        "trace": [{"stage": s, "measure": list(m)} for s, m in basis.trace],
        "diagnostics": list(basis.diagnostics),
        "check": {
            key: {"holds": ok, "counterexample": _counterexample_json(bad)}
            for key, (ok, bad) in check_normal_form(basis, A, B).items()
        },
    }
    _emit(payload, True)
    return 0


def _counterexample_json(bad):
    if bad is None:
        return None
    kind, data = bad
    if kind == "combination":
        return {"kind": kind, "coefficients": [frac_to_str(q) for q in data]}
    return {"kind": kind, "index": data}


def cmd_blocks(args) -> int:
    scene = parse_scene_file(args.scene)
    span = scene.span_a() if args.base == "A" else scene.span_ab()
    c = scene.c_tuple()
    decomposition = val_blocks(c, span, args.level)
    payload = {
        "level": decomposition.level,
        "base": args.base,
        "span_members": list(decomposition.span_members),
        "blocks": [
            {
                "upper": descriptor_json(key.upper),
                "ramified": key.ram,
                "new_class": arch_class_json(key.new_class),
                "members": list(members),
            }
            for key, members in decomposition.blocks
        ],
    }
    _emit(payload, True)
    return 0


def cmd_witness(args) -> int:
    scene = parse_scene_file(args.scene)
    A = scene.span_a()
    B = scene.span_ab()
    payload = {
        name: {
            "over_A": profile_json(cut_profile(scene.named(name), A)),
            "over_B": profile_json(cut_profile(scene.named(name), B)),
        }
        for name in scene.c_names
    }
    _emit(payload, True)
    return 0


def cmd_extensions(args) -> int:
    scene = parse_scene_file(args.scene)
    verdict = decide_forking(scene)
    if not verdict.forking_independent:
        _emit({"empty": True, "factors": [], "prime_factors": []}, True)
        return 1
    prime_factors = []
    reduced_len = len(scene.c_names) - sum(
        1 for note in verdict.notes if "base-definable" in note
    )
    for p in scene.ambient.congruence.primes:
        if p.kind == KIND_DIVISIBLE:
            continue
        if p.kind == KIND_FINITE:
            extra = next(v for v in verdict.invariance_extra if v.l == p.l)
            if extra.holds:
                prime_factors.append(PrimeFactor(p.l, "point"))
            else:
                prime_factors.append(PrimeFactor(p.l, "zl_subspace", reduced_len))
        else:
            prime_factors.append(PrimeFactor(p.l, "point"))
    desc = space_descriptor(
        list(scene.c_tuple()), scene.span_a(), scene.span_ab(), prime_factors
    )
    payload = {
        "empty": desc.empty,
        "factors": [
            {
                "arch_size": f.arch_size,
                "ram_size": f.ram_size,
                "summands": [
                    {
                        "inner_classes": [cls.slot for cls in s.inner_classes],
                        "outer_classes": [cls.slot for cls in s.outer_classes],
                        "parameter_count": s.parameter_count,
                    }
                    for s in f.summands
                ],
            }
            for f in desc.factors
        ],
        "prime_factors": [
            {"l": p.l, "kind": p.kind, "dim": p.dim} for p in desc.prime_factors
        ],
    }
    _emit(payload, True)
    return 0


def cmd_check(args) -> int:
    scene = parse_scene_file(args.scene)
    scene.ambient.sanity_check_independence()
    rebuilt = scene_to_text(scene)
    from .sceneio import parse_scene_text

    again = parse_scene_text(rebuilt)
    if again.c_names != scene.c_names or again.ambient != scene.ambient:
        raise ConfigurationError("scene does not round-trip through serialization")
    print(f"scene ok: {len(scene.ambient.slots)} slots, "
          f"|A|={len(scene.a_names)} |B|={len(scene.b_names)} |c|={len(scene.c_names)}")
    return 0


def cmd_selftest(args) -> int:
    failures = selftest.run()
    print(f"selftest: {len(selftest.ITEMS) - failures}/{len(selftest.ITEMS)} passed")
    return 0 if failures == 0 else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="oagfork",
        description="Exact independence decisions in regular ordered abelian groups.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decide", help="decide forking/dividing/invariance")
    p.add_argument("scene")
    p.add_argument("--json", action="store_true")
    p.add_argument("--verbose", action="store_true")
    p.set_defaults(func=cmd_decide)

    p = sub.add_parser("normalize", help="normal-form basis with transform and trace")
    p.add_argument("scene")
    p.set_defaults(func=cmd_normalize)

    p = sub.add_parser("blocks", help="valuation block decomposition")
    p.add_argument("scene")
    p.add_argument("--level", type=int, choices=(1, 2, 3), default=3)
    p.add_argument("--base", choices=("A", "B"), default="A")
    p.set_defaults(func=cmd_blocks)

    p = sub.add_parser("witness", help="cut profiles of the tuple over both spans")
    p.add_argument("scene")
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("extensions", help="invariant extension space descriptor")
    p.add_argument("scene")
    p.set_defaults(func=cmd_extensions)

    p = sub.add_parser("check", help="validate a scene file")
    p.add_argument("scene")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("selftest", help="run the built-in golden and property suites")
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except OagforkError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"cannot read scene: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
