"""Scene files and report serialization.

A scene file is versioned structured text: bracketed sections, one
``key = value`` entry per line with JSON values, ``#`` comments.  Sections:

* ``[scene]``    version and dense/discrete kind;
* ``[field]``    coefficient field: minpoly (constant term first) and the
  isolating interval;
* ``[slots]``    generator lists per slot, most significant first;
* ``[elements]`` named points, ``{slot_index: coefficient_vector}``;
* ``[A] [B] [c]`` member name lists;
* ``[congruence]`` per-prime residue declarations.

Rationals are serialized as ``"p/q"`` strings everywhere, including in
JSON reports.  In discrete scenes the name ``one`` is reserved for the
distinguished unit and bound automatically.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .congruence import UNIT_NAME, CongruenceSpec, PrimeSpec
from .errors import ConfigurationError
from .numberfield import FieldSpec
from .oag_model import AmbientScene, GroupElement, Slot, SpanHandle

SCENE_VERSION = 1


def frac_to_str(q) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def frac_from(value) -> Fraction:
    if isinstance(value, str):
        return Fraction(value)
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    raise ConfigurationError(f"expected a rational, got {value!r}")


@dataclass(frozen=True)
class Scene:
    """A full configuration: the ambient template, named elements, and the
    three parameter lists."""

    ambient: AmbientScene
    elements: dict
    a_names: tuple
    b_names: tuple
    c_names: tuple
    verbosity: int = 0

    def __post_init__(self):
        for name in self.a_names + self.b_names + self.c_names:
            if name not in self.elements:
                raise ConfigurationError(f"undeclared element {name!r}")

    def named(self, name: str) -> GroupElement:
        return self.elements[name]

    def unit_names(self) -> tuple:
        return (UNIT_NAME,) if self.ambient.kind == "discrete" else ()

    def span_a(self) -> SpanHandle:
        names = self.a_names + self.unit_names()
        return SpanHandle(self.ambient, [self.elements[n] for n in names])

    def span_ab(self) -> SpanHandle:
        names = self.a_names + self.b_names + self.unit_names()
        return SpanHandle(self.ambient, [self.elements[n] for n in names])

    def c_tuple(self) -> tuple:
        return tuple(self.elements[n] for n in self.c_names)


def _parse_sections(text: str) -> dict:
    sections: dict = {}
    current: Optional[str] = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1].strip()
            if current in sections:
                raise ConfigurationError(f"duplicate section [{current}]")
            sections[current] = {}
            continue
        if current is None or "=" not in line:
            raise ConfigurationError(f"line {lineno}: expected 'key = value' inside a section")
        key, _, value = line.partition("=")
        try:
            sections[current][key.strip()] = json.loads(value.strip())
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"line {lineno}: bad JSON value ({exc})") from exc
    return sections


def _field_from(section: dict) -> FieldSpec:
    try:
        minpoly = [frac_from(v) for v in section["minpoly"]]
        lo, hi = (frac_from(v) for v in section["interval"])
    except KeyError as exc:
        raise ConfigurationError(f"field section missing {exc}") from exc
    return FieldSpec.make(minpoly, (lo, hi))


def _congruence_from(section: Optional[dict]) -> CongruenceSpec:
    if not section or "primes" not in section:
        return CongruenceSpec()
    primes = []
    for entry in section["primes"]:
        residues = tuple(
            (name, tuple(int(v) for v in vec))
            for name, vec in sorted(entry.get("residues", {}).items())
        )
        primes.append(
            PrimeSpec(
                l=int(entry["l"]),
                kind=entry["kind"],
                width=int(entry.get("width", 0)),
                residues=residues,
                n_max=entry.get("n_max"),
            )
        )
    return CongruenceSpec(tuple(primes))


def parse_scene_text(text: str) -> Scene:
    sections = _parse_sections(text)
    try:
        meta = sections["scene"]
        version = int(meta["version"])
    except KeyError as exc:
        raise ConfigurationError(f"missing scene metadata: {exc}") from exc
    if version != SCENE_VERSION:
        raise ConfigurationError(f"unsupported scene version {version}")
    kind = meta.get("kind", "dense")
    spec = _field_from(sections.get("field", {"minpoly": ["0", "1"], "interval": ["-1", "1"]}))
    try:
        slot_data = sections["slots"]["slots"]
    except KeyError as exc:
        raise ConfigurationError("missing [slots] section with a 'slots' entry") from exc
    slots = tuple(
        Slot(tuple(spec.element([frac_from(v) for v in gen]) for gen in gens))
        for gens in slot_data
    )
    ambient = AmbientScene(
        kind=kind,
        slots=slots,
        field=spec,
        congruence=_congruence_from(sections.get("congruence")),
        n_max_policy=sections.get("scene", {}).get("n_max"),
    )
    elements = {}
    for name, coords in sections.get("elements", {}).items():
        if name == UNIT_NAME:
            raise ConfigurationError(f"element name {UNIT_NAME!r} is reserved for the unit")
        elements[name] = ambient.element(
            {int(k): [frac_from(v) for v in vec] for k, vec in coords.items()}
        )
    if ambient.kind == "discrete":
        elements[UNIT_NAME] = ambient.unit()
    member = lambda sect: tuple(sections.get(sect, {}).get("members", ()))
    scene = Scene(
        ambient=ambient,
        elements=elements,
        a_names=member("A"),
        b_names=member("B"),
        c_names=member("c"),
    )
    _validate_congruence(scene)
    return scene


def _validate_congruence(scene: Scene) -> None:
    cong = scene.ambient.congruence
    for p in cong.primes:
        if p.kind == "divisible":
            continue
        for name, _ in p.residues:
            if name != UNIT_NAME and name not in scene.elements:
                raise ConfigurationError(f"residue for undeclared element {name!r}")
        if scene.ambient.kind == "discrete":
            expected = (1,) + (0,) * (p.width - 1)
            if p.residue(UNIT_NAME) != expected:
                raise ConfigurationError(
                    f"prime {p.l}: the unit residue must be the first coordinate vector"
                )


def parse_scene_file(path) -> Scene:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_scene_text(handle.read())


def scene_to_text(scene: Scene) -> str:
    ambient = scene.ambient
    lines = ["[scene]", f"version = {SCENE_VERSION}", f'kind = "{ambient.kind}"', ""]
    lines += [
        "[field]",
        "minpoly = " + json.dumps([frac_to_str(v) for v in ambient.field.minpoly]),
        "interval = " + json.dumps([frac_to_str(v) for v in ambient.field.interval]),
        "",
    ]
    slots = [
        [[frac_to_str(v) for v in gen.coeffs] if gen.coeffs else ["0/1"] for gen in slot.generators]
        for slot in ambient.slots
    ]
    lines += ["[slots]", "slots = " + json.dumps(slots), ""]
    lines.append("[elements]")
    for name, el in sorted(scene.elements.items()):
        if name == UNIT_NAME:
            continue
        coords = {
            str(i): [frac_to_str(v) for v in vec]
            for i, vec in enumerate(el.coords)
            if any(v != 0 for v in vec)
        }
        lines.append(f"{name} = " + json.dumps(coords))
    lines.append("")
    for sect, names in (("A", scene.a_names), ("B", scene.b_names), ("c", scene.c_names)):
        lines += [f"[{sect}]", "members = " + json.dumps(list(names)), ""]
    cong = ambient.congruence
    if cong.primes:
        entries = []
        for p in cong.primes:
            entry = {"l": p.l, "kind": p.kind}
            if p.kind != "divisible":
                entry["width"] = p.width
                entry["residues"] = {name: list(vec) for name, vec in p.residues}
            if p.n_max is not None:
                entry["n_max"] = p.n_max
            entries.append(entry)
        lines += ["[congruence]", "primes = " + json.dumps(entries), ""]
    return "\n".join(lines)


# --- JSON report helpers ---------------------------------------------------


def element_json(x: GroupElement) -> dict:
    return {
        str(i): [frac_to_str(v) for v in vec]
        for i, vec in enumerate(x.coords)
        if any(v != 0 for v in vec)
    }


def arch_class_json(c) -> Optional[int]:
    return None if c is None or c.is_zero else c.slot


def descriptor_json(desc) -> dict:
    return {
        "classes": sorted(k.slot for k in desc.classes),
        "flavor": desc.flavor,
    }


def profile_json(profile) -> dict:
    out = {
        "member": profile.member,
        "stabilizer_classes": sorted(k.slot for k in profile.stab_classes),
        "upper": descriptor_json(profile.upper),
        "lower": descriptor_json(profile.lower),
        "ramified": profile.is_ramified,
    }
    if profile.is_ramified:
        anchor, cls = profile.ramifier
        out["ramifier"] = element_json(anchor)
        out["new_class"] = cls.slot
        out["side"] = profile.side
    return out
