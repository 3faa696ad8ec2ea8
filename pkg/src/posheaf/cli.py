"""Command-line front end.

Subcommands: `resolve` (minimal or order-complex resolutions of constant
sheaves, and of sheaf JSON inputs), `functor` (the four derived functors) and
`morse` (critical elements, Betti tables and verification).

Exit codes: 0 success, 1 input error, 2 verification failure, 3 size-cap
refusal.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

from . import io as pio
from .errors import InputError, SizeCapExceeded
from .field import PrimeField
from .matrix import InjectiveComplex
from .poset import LocallyClosedSet, Poset, SimplicialComplex, star_subposet
from .resolution import (
    minimal_resolution_constant,
    minimal_resolution_sheaf,
    order_complex_resolution,
)
from .sheaf import constant_sheaf
from .derived import (
    peel,
    proper_pullback,
    proper_pushforward,
    pullback,
    pushforward,
)
from .morse import betti_table, critical_elements, morse_inequalities, verify_morse_theorem

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_VERIFICATION = 2
EXIT_SIZE_CAP = 3


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, "r", encoding="utf-8") as handle:
        return handle.read()


def _load_poset_input(path: str, star: str | None, max_elements: int) -> Poset:
    """A facets file (.txt or anything non-JSON) or a poset JSON file."""
    text = _read(path)
    stripped = text.lstrip()
    if stripped.startswith("{"):
        poset = pio.poset_from_json(json.loads(text))
        if star is not None:
            raise InputError("--star applies to simplicial complex inputs only")
    else:
        complex_ = pio.read_facets_text(text)
        if star is not None:
            face = _face_lookup(complex_, star)
            poset = star_subposet(complex_, face)
        else:
            poset = complex_.face_poset
    if len(poset) > max_elements:
        raise SizeCapExceeded(
            f"input has {len(poset)} elements, above --max-elements={max_elements}"
        )
    return poset


def _face_lookup(complex_: SimplicialComplex, requested: str) -> str:
    from .poset import face_name

    if requested in complex_.face_poset.index:
        return requested
    tokens = requested.split(",") if "," in requested else list(requested)
    name = face_name(tokens)
    if name in complex_.face_poset.index:
        return name
    raise InputError(f"face {requested!r} not in the complex")


def _emit_complex(complex_: InjectiveComplex, fmt: str):
    if fmt == "json":
        print(pio.dumps(pio.complex_to_json(complex_)))
    else:
        print(pio.render_complex_text(complex_))


def cmd_resolve(args) -> int:
    field = PrimeField(args.field)
    poset = _load_poset_input(args.input, args.star, args.max_elements)
    if args.sheaf:
        sheaf = pio.sheaf_from_json(json.loads(_read(args.sheaf)), poset, field)
        report = sheaf.validate()
        if not report.ok:
            print(f"invalid sheaf: {report.first_violation}", file=sys.stderr)
            return EXIT_INPUT
    else:
        sheaf = None
    if args.method == "order-complex":
        target = sheaf if sheaf is not None else constant_sheaf(poset, field)
        resolution = order_complex_resolution(target)
        if args.peel:
            resolution = peel(resolution)
    elif sheaf is not None:
        resolution = minimal_resolution_sheaf(sheaf)
    else:
        resolution = minimal_resolution_constant(poset, field)
    _emit_complex(resolution, args.format)
    return EXIT_OK


def _load_complex(path: str) -> InjectiveComplex:
    return pio.complex_from_json(json.loads(_read(path)))


def cmd_functor(args) -> int:
    complex_ = _load_complex(args.complex)
    if args.kind in ("push", "pull"):
        if not args.map:
            raise InputError(f"functor {args.kind} needs --map")
        map_data = json.loads(_read(args.map))
        if args.kind == "push":
            source = complex_.poset
            target = (
                pio.poset_from_json(json.loads(_read(args.target_poset)))
                if args.target_poset
                else _image_poset(source, map_data)
            )
            f = pio.map_from_json(map_data, source, target)
            result = pushforward(f, complex_)
        else:
            if not args.source_poset:
                raise InputError("functor pull needs --source-poset")
            source = pio.poset_from_json(json.loads(_read(args.source_poset)))
            f = pio.map_from_json(map_data, source, complex_.poset)
            result = pullback(f, complex_)
    elif args.kind in ("shriek-push", "shriek-pull"):
        if not args.set:
            raise InputError(f"functor {args.kind} needs --set")
        members = [s for s in args.set.split(",") if s]
        if args.kind == "shriek-pull":
            zset = LocallyClosedSet(complex_.poset, members)
            result = proper_pullback(zset, complex_)
        else:
            if not args.ambient:
                raise InputError("functor shriek-push needs --ambient")
            ambient = pio.poset_from_json(json.loads(_read(args.ambient)))
            zset = LocallyClosedSet(ambient, members)
            result = proper_pushforward(zset, complex_)
    else:
        raise InputError(f"unknown functor kind {args.kind!r}")
    _emit_complex(result, args.format)
    return EXIT_OK


def _image_poset(source: Poset, map_data: dict) -> Poset:
    assignment = {str(k): str(v) for k, v in map_data.get("assignment", {}).items()}
    names = []
    for e in source.elements:
        img = assignment.get(e, e)
        if img not in names:
            names.append(img)
    pairs = [
        (assignment.get(a, a), assignment.get(b, b))
        for a, b in source.covers
        if assignment.get(a, a) != assignment.get(b, b)
    ]
    return Poset.from_leq_pairs(names, pairs)


def cmd_morse(args) -> int:
    complex_ = _load_complex(args.complex)
    mf = pio.morse_from_json(json.loads(_read(args.morse)), complex_.poset)
    crit = {
        variant: critical_elements(mf, complex_, variant)
        for variant in ("shriek", "star")
    }
    tables = {
        (direction, variant): betti_table(
            mf, complex_, direction, variant, jobs=args.jobs
        )
        for direction in ("sublevel", "superlevel")
        for variant in ("shriek", "star")
    }
    if args.format == "csv":
        _print_morse_csv(mf, crit, tables)
    else:
        _print_morse_text(mf, crit, tables)
    if args.verify:
        theorem = verify_morse_theorem(mf, complex_)
        failures = list(theorem.violations)
        for variant in ("shriek", "star"):
            report = morse_inequalities(mf, complex_, variant)
            failures += [f"{variant}: {v}" for v in report.violations]
        if failures:
            for line in failures:
                print(f"VIOLATION {line}", file=sys.stderr)
            return EXIT_VERIFICATION
        print(f"verified: {theorem.checks} Morse comparisons, inequalities hold")
    return EXIT_OK


def _row_text(row: dict[int, int], degrees: list[int]) -> str:
    return ",".join(str(row.get(d, 0)) for d in degrees)


def _table_degrees(tables) -> list[int]:
    degs = set()
    for table in tables.values():
        for row in table.values():
            degs |= set(row)
    if not degs:
        return [0]
    return list(range(min(degs), max(degs) + 1))


def _print_morse_text(mf, crit, tables):
    degrees = _table_degrees(tables)
    print("critical elements:")
    for variant in ("shriek", "star"):
        marks = " ".join(x if x in crit[variant] else "-" for x in mf.total_order)
        print(f"  {variant:>7}: {marks}")
    for (direction, variant), table in tables.items():
        print(f"{direction} {variant} (dims in degrees {degrees}):")
        width = max(len(x) for x in mf.total_order)
        for x in mf.total_order:
            print(f"  {x:>{width}}  {_row_text(table[x], degrees)}")


def _print_morse_csv(mf, crit, tables):
    degrees = _table_degrees(tables)
    writer = csv.writer(sys.stdout)
    writer.writerow(["table", "level", "critical"] + [f"H{d}" for d in degrees])
    for variant in ("shriek", "star"):
        for x in mf.total_order:
            writer.writerow(
                [f"critical-{variant}", x, int(x in crit[variant])]
                + ["" for _ in degrees]
            )
    for (direction, variant), table in tables.items():
        for x in mf.total_order:
            writer.writerow(
                [f"{direction}-{variant}", x, int(x in crit[variant])]
                + [table[x].get(d, 0) for d in degrees]
            )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="posheaf",
        description="Injective resolutions and derived functors on finite posets",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    resolve = sub.add_parser("resolve", help="minimal injective resolution")
    resolve.add_argument("input", help="facets file or poset JSON ('-' for stdin)")
    resolve.add_argument("--sheaf", help="sheaf JSON (default: constant sheaf)")
    resolve.add_argument(
        "--method", choices=("inductive", "order-complex"), default="inductive"
    )
    resolve.add_argument("--field", type=int, default=2, help="prime modulus (default 2)")
    resolve.add_argument("--format", choices=("text", "json"), default="text")
    resolve.add_argument("--star", help="restrict to the star of a face, relabeled")
    resolve.add_argument(
        "--peel", action="store_true", help="minimize an order-complex resolution"
    )
    resolve.add_argument("--max-elements", type=int, default=10_000)
    resolve.set_defaults(func=cmd_resolve)

    functor = sub.add_parser("functor", help="derived functors of a complex")
    functor.add_argument(
        "kind", choices=("push", "pull", "shriek-push", "shriek-pull")
    )
    functor.add_argument("complex", help="complex JSON ('-' for stdin)")
    functor.add_argument("--map", help="map JSON with an 'assignment' object")
    functor.add_argument("--source-poset", help="poset JSON for the pull source")
    functor.add_argument("--target-poset", help="poset JSON for the push target")
    functor.add_argument("--set", help="comma-separated locally closed set")
    functor.add_argument("--ambient", help="poset JSON for shriek-push")
    functor.add_argument("--format", choices=("text", "json"), default="text")
    functor.set_defaults(func=cmd_functor)

    morse = sub.add_parser("morse", help="Morse tables for a complex")
    morse.add_argument("complex", help="complex JSON ('-' for stdin)")
    morse.add_argument("morse", help="morse JSON with levels and order")
    morse.add_argument("--format", choices=("text", "csv"), default="text")
    morse.add_argument(
        "--verify",
        action="store_true",
        help="check the Morse theorem and inequalities; exit 2 on violation",
    )
    morse.add_argument("--jobs", type=int, default=1, help="parallel Betti levels")
    morse.set_defaults(func=cmd_morse)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SizeCapExceeded as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_SIZE_CAP
    except (InputError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
