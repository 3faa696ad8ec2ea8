"""Readers and writers: facet lists, poset/sheaf/map/Morse JSON, complex JSON
and the figure-style text rendering."""

from __future__ import annotations

import json

from .errors import InputError
from .field import PrimeField
from .matrix import InjectiveComplex, LabeledMatrix
from .poset import MonotoneMap, Poset, SimplicialComplex
from .sheaf import Sheaf


def read_facets_text(text: str) -> SimplicialComplex:
    """One facet per line, whitespace-separated vertex ids, '#' comments."""
    facets = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        verts = line.split()
        if not verts:
            raise InputError(f"line {lineno}: empty facet")
        facets.append(verts)
    if not facets:
        raise InputError("no facets found")
    return SimplicialComplex.from_facets(facets)


def poset_to_json(poset: Poset) -> dict:
    return {"elements": list(poset.elements), "covers": [list(c) for c in poset.covers]}


def poset_from_json(data: dict) -> Poset:
    try:
        return Poset.from_covers(
            [str(e) for e in data["elements"]],
            [(str(a), str(b)) for a, b in data["covers"]],
        )
    except KeyError as missing:
        raise InputError(f"poset JSON missing key {missing}") from None


def map_from_json(data: dict, source: Poset, target: Poset) -> MonotoneMap:
    try:
        assignment = {str(k): str(v) for k, v in data["assignment"].items()}
    except KeyError:
        raise InputError("map JSON missing 'assignment'") from None
    return MonotoneMap(source, target, assignment)


def vertex_map_from_json(
    data: dict, source: SimplicialComplex, target: SimplicialComplex
) -> MonotoneMap:
    try:
        assignment = {str(k): str(v) for k, v in data["assignment"].items()}
    except KeyError:
        raise InputError("map JSON missing 'assignment'") from None
    return MonotoneMap.simplicial(source, target, assignment)


def sheaf_from_json(data: dict, poset: Poset, field: PrimeField) -> Sheaf:
    """{"stalks": {"elem": dim}, "maps": {"a<b": [[...]]}}; omitted maps are zero."""
    stalks = {str(k): int(v) for k, v in data.get("stalks", {}).items()}
    maps = {}
    for key, mat in data.get("maps", {}).items():
        if "<" not in key:
            raise InputError(f"restriction key {key!r} is not of the form 'a<b'")
        a, b = key.split("<", 1)
        if (a, b) not in set(poset.covers):
            raise InputError(f"restriction key {key!r} is not a cover relation")
        maps[(a, b)] = mat
    return Sheaf(poset, field, stalks, maps)


def sheaf_to_json(sheaf: Sheaf) -> dict:
    maps = {}
    for (a, b), mat in sheaf.restriction.items():
        if any(any(row) for row in mat):
            maps[f"{a}<{b}"] = mat
    return {
        "stalks": {e: d for e, d in sheaf.stalk_dim.items() if d},
        "maps": maps,
    }


def matrix_to_json(m: LabeledMatrix) -> dict:
    return {
        "cols": list(m.col_labels),
        "rows": [
            {"label": lab, "entries": {str(j): v for j, v in row.items()}}
            for lab, row in zip(m.row_labels, m.rows)
        ],
    }


def matrix_from_json(data: dict, poset: Poset, field: PrimeField) -> LabeledMatrix:
    m = LabeledMatrix(poset, field, [str(c) for c in data["cols"]])
    for row in data["rows"]:
        m.add_row(str(row["label"]), {int(j): int(v) for j, v in row["entries"].items()})
    return m


def complex_to_json(complex_: InjectiveComplex) -> dict:
    return {
        "field": complex_.field.p,
        "degree_offset": complex_.degree_offset,
        "poset": poset_to_json(complex_.poset),
        "matrices": [matrix_to_json(m) for m in complex_.matrices],
    }


def complex_from_json(data: dict) -> InjectiveComplex:
    try:
        field = PrimeField(int(data["field"]))
        poset = poset_from_json(data["poset"])
        matrices = [matrix_from_json(m, poset, field) for m in data["matrices"]]
        offset = int(data.get("degree_offset", 0))
    except KeyError as missing:
        raise InputError(f"complex JSON missing key {missing}") from None
    complex_ = InjectiveComplex(poset, field, matrices, offset)
    complex_.validate().raise_if_failed()
    return complex_


def morse_from_json(data: dict, domain: Poset):
    """{"levels": {"elem": "levelName"}, "order": ["levelName", ...]}"""
    from .morse import MorseFunction

    try:
        levels = {str(k): str(v) for k, v in data["levels"].items()}
        order = [str(x) for x in data["order"]]
    except KeyError as missing:
        raise InputError(f"morse JSON missing key {missing}") from None
    for e in domain.elements:
        if e not in levels:
            raise InputError(f"morse JSON missing level for element {e!r}")
    return MorseFunction.from_levels(domain, levels, order)


def render_complex_text(complex_: InjectiveComplex) -> str:
    """All differentials in the figure style plus the multiplicity table."""
    parts = [render_multiplicity_table(complex_)]
    for d in complex_.degrees:
        m = complex_.matrix(d)
        if m.nrows == 0:
            continue
        parts.append(m.print_text(title=f"eta^{d}"))
    return "\n\n".join(parts)


def render_multiplicity_table(complex_: InjectiveComplex) -> str:
    table = complex_.multiplicities()
    if not table:
        return "(zero complex)"
    lines = []
    for d in sorted(table):
        counts = table[d]
        order = {e: i for i, e in enumerate(complex_.poset.elements)}
        pieces = [
            f"[{lab}]" + (f"^{n}" if n > 1 else "")
            for lab, n in sorted(counts.items(), key=lambda kv: order[kv[0]])
        ]
        lines.append(f"degree {d}: " + " + ".join(pieces))
    return "\n".join(lines)


def dumps(data: dict) -> str:
    return json.dumps(data, indent=2, ensure_ascii=False, sort_keys=True)
