"""Supports, discrete microsupport, Morse functions on posets, critical
elements, the dimension-level Morse theorem checks, Morse inequalities, and
the compactly supported cochain oracle for generator multiplicities.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field

from .errors import InputError
from .matrix import InjectiveComplex, _sparse_rank
from .poset import LocallyClosedSet, MonotoneMap, Poset, SimplicialComplex
from .resolution import cohomology_sheaf_dims, is_minimal
from .derived import hypercohomology, proper_pullback, proper_pushforward, pullback


# -- supports ---------------------------------------------------------------


def supp_shriek(complex_: InjectiveComplex) -> set[str]:
    """Elements whose indecomposable summand appears somewhere; the complex
    must be minimal for this to agree with the !-support."""
    if not is_minimal(complex_):
        raise InputError("supp^! via multiplicities requires a minimal complex")
    out = set()
    for counts in complex_.multiplicities().values():
        out.update(counts)
    return out


def supp_star(complex_: InjectiveComplex) -> set[str]:
    """Elements with a nonzero stalkwise cohomology dimension."""
    out = set()
    for per_element in cohomology_sheaf_dims(complex_).values():
        out.update(per_element)
    return out


# -- microsupport -------------------------------------------------------------


def restrict_star(zset: LocallyClosedSet, complex_: InjectiveComplex) -> InjectiveComplex:
    """Ri_Z^*: pullback along the inclusion of the restricted poset."""
    inclusion = MonotoneMap.inclusion(zset.restricted_poset(), zset.ambient)
    return pullback(inclusion, complex_)


def in_microsupport_star(zset: LocallyClosedSet, complex_: InjectiveComplex) -> bool:
    """Z is in the *-microsupport iff the extension by zero of the restriction
    has nonzero hypercohomology."""
    restricted = restrict_star(zset, complex_)
    extended = proper_pushforward(zset, restricted)
    return bool(hypercohomology(extended))


def in_microsupport_shriek(zset: LocallyClosedSet, complex_: InjectiveComplex) -> bool:
    return bool(hypercohomology(proper_pullback(zset, complex_)))


def star_microsupport_dims(zset, complex_):
    return hypercohomology(proper_pushforward(zset, restrict_star(zset, complex_)))


def shriek_microsupport_dims(zset, complex_):
    return hypercohomology(proper_pullback(zset, complex_))


# -- Morse functions ------------------------------------------------------------


class MorseFunction:
    """An order preserving map to a poset of levels with a chosen refinement.

    `total_order` lists the level elements from lowest to highest and must
    refine the level poset's order; every fiber must be locally closed in the
    domain.
    """

    def __init__(self, f: MonotoneMap, total_order: list[str]):
        self.map = f
        self.total_order = list(total_order)
        pos = {x: k for k, x in enumerate(self.total_order)}
        if sorted(pos) != sorted(f.target.elements):
            raise InputError("total order must enumerate the level poset")
        for a, b in f.target.covers:
            if pos[a] >= pos[b]:
                raise InputError(f"total order does not refine the level order at {a} < {b}")
        self.position = pos
        self.fibers = {x: set() for x in self.total_order}
        for e in f.source.elements:
            self.fibers[f(e)].add(e)
        for x, fiber in self.fibers.items():
            if fiber and not f.source.is_locally_closed(fiber):
                raise InputError(f"fiber of level {x!r} is not locally closed")

    @classmethod
    def from_levels(cls, domain: Poset, levels: dict, order: list[str]) -> "MorseFunction":
        """Build from an element -> level-name dict and the level order."""
        order = [str(x) for x in order]
        for e in domain.elements:
            if e not in levels:
                raise InputError(f"no level assigned to element {e!r}")
        pairs = []
        for a, b in domain.covers:
            la, lb = str(levels[a]), str(levels[b])
            if la != lb:
                pairs.append((la, lb))
        target = Poset.from_leq_pairs(order, pairs)
        f = MonotoneMap(domain, target, {e: str(levels[e]) for e in domain.elements})
        return cls(f, order)

    def sublevel(self, x: str) -> set[str]:
        cut = self.position[x]
        return {
            e
            for e in self.map.source.elements
            if self.position[self.map(e)] <= cut
        }

    def superlevel(self, x: str) -> set[str]:
        cut = self.position[x]
        return {
            e
            for e in self.map.source.elements
            if self.position[self.map(e)] >= cut
        }

    def fiber_set(self, x: str) -> LocallyClosedSet:
        return LocallyClosedSet(self.map.source, self.fibers[x])


def critical_elements(
    mf: MorseFunction, complex_: InjectiveComplex, variant: str
) -> set[str]:
    """Level elements whose fiber lies in the chosen discrete microsupport."""
    test = {
        "star": in_microsupport_star,
        "shriek": in_microsupport_shriek,
    }[variant]
    out = set()
    for x in mf.total_order:
        if not mf.fibers[x]:
            continue
        if test(mf.fiber_set(x), complex_):
            out.add(x)
    return out


def betti_table(
    mf: MorseFunction,
    complex_: InjectiveComplex,
    direction: str,
    variant: str,
    jobs: int = 1,
) -> dict[str, dict[int, int]]:
    """Hypercohomology dimensions of sub/superlevel restrictions per level.

    direction 'sublevel' uses closed sets {f <= x}; 'superlevel' uses open
    sets {f >= x}.  variant 'shriek' restricts by submatrices, 'star' by the
    cylinder pullback; on open sets the two agree.
    """
    levels = list(mf.total_order)

    def row(x):
        members = mf.sublevel(x) if direction == "sublevel" else mf.superlevel(x)
        if not members:
            return {}
        zset = LocallyClosedSet(mf.map.source, members)
        if variant == "shriek":
            return hypercohomology(proper_pullback(zset, complex_))
        return hypercohomology(restrict_star(zset, complex_))

    if jobs > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(row, levels))
        return dict(zip(levels, rows))
    return {x: row(x) for x in levels}


@dataclass
class MorseTheoremReport:
    violations: list[str] = dataclass_field(default_factory=list)
    checks: int = 0

    @property
    def ok(self) -> bool:
        return not self.violations


def verify_morse_theorem(mf: MorseFunction, complex_: InjectiveComplex) -> MorseTheoremReport:
    """Dimension-level check of the three Morse isomorphism families.

    Between consecutive levels a < b of the total order:
      - sublevel-! rows at a and b agree unless b is !-critical,
      - sublevel-* rows at a and b agree unless b is *-critical,
      - superlevel-* rows at a and b agree unless a is !-critical
        (the restriction drops the fiber of a).
    The boundary rows (empty sublevel before the first level, empty superlevel
    after the last) are included in the comparison.
    """
    report = MorseTheoremReport()
    crit_shriek = critical_elements(mf, complex_, "shriek")
    crit_star = critical_elements(mf, complex_, "star")
    sub_shriek = betti_table(mf, complex_, "sublevel", "shriek")
    sub_star = betti_table(mf, complex_, "sublevel", "star")
    super_star = betti_table(mf, complex_, "superlevel", "star")
    levels = mf.total_order

    def compare(kind, x, row_a, row_b):
        report.checks += 1
        if row_a != row_b:
            report.violations.append(
                f"{kind}: rows differ across non-critical level {x} ({row_a} vs {row_b})"
            )

    prev_shriek: dict[int, int] = {}
    prev_star: dict[int, int] = {}
    for x in levels:
        if x not in crit_shriek:
            compare("sublevel-shriek", x, prev_shriek, sub_shriek[x])
        if x not in crit_star:
            compare("sublevel-star", x, prev_star, sub_star[x])
        prev_shriek, prev_star = sub_shriek[x], sub_star[x]
    for k, x in enumerate(levels):
        nxt = super_star[levels[k + 1]] if k + 1 < len(levels) else {}
        if x not in crit_shriek:
            compare("superlevel-star", x, super_star[x], nxt)
    return report


@dataclass
class MorseInequalityReport:
    violations: list[str] = dataclass_field(default_factory=list)
    euler_total: int = 0
    euler_critical_sum: int = 0
    rows: list[tuple[int, int, int]] = dataclass_field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def morse_inequalities(
    mf: MorseFunction, complex_: InjectiveComplex, variant: str
) -> MorseInequalityReport:
    """Alternating partial-sum inequalities and the Euler equality.

    For every truncation level, the signed partial sum of the global
    hypercohomology dimensions is bounded by the corresponding sum over
    critical fibers; the full alternating sums agree.
    """
    report = MorseInequalityReport()
    total = hypercohomology(complex_)
    fibers = {}
    for x in critical_elements(mf, complex_, variant):
        zset = mf.fiber_set(x)
        if variant == "shriek":
            fibers[x] = shriek_microsupport_dims(zset, complex_)
        else:
            fibers[x] = star_microsupport_dims(zset, complex_)
    degrees = set(total)
    for dims in fibers.values():
        degrees |= set(dims)
    if not degrees:
        report.euler_total = 0
        report.euler_critical_sum = 0
        return report
    lo, hi = min(degrees), max(degrees)
    for ell in range(lo - 1, hi + 2):
        lhs = sum((-1) ** (ell - j) * total.get(j, 0) for j in range(lo, ell + 1))
        rhs = sum(
            (-1) ** (ell - j) * dims.get(j, 0)
            for dims in fibers.values()
            for j in range(lo, ell + 1)
        )
        report.rows.append((ell, lhs, rhs))
        if lhs > rhs:
            report.violations.append(f"partial sums at level {ell}: {lhs} > {rhs}")
    report.euler_total = sum((-1) ** j * v for j, v in total.items())
    report.euler_critical_sum = sum(
        (-1) ** j * v for dims in fibers.values() for j, v in dims.items()
    )
    if report.euler_total != report.euler_critical_sum:
        report.violations.append(
            f"Euler equality fails: {report.euler_total} != {report.euler_critical_sum}"
        )
    return report


# -- compactly supported cochain oracle ------------------------------------------


def compact_support_cohomology(
    simplicial: SimplicialComplex, open_set, p: int = 2
) -> dict[int, int]:
    """Cohomology of the cochain complex spanned by the simplices in an upward
    closed set of faces, with the simplicial (signed) coboundary.

    This is the independent oracle: the multiplicity of [s] in degree d of the
    minimal resolution of the constant sheaf equals the (d + dim s)-dimension
    computed here for the open star of s.
    """
    from .field import PrimeField
    from .poset import signed_incidence_simplices

    field = PrimeField(p)
    poset = simplicial.face_poset
    members = set(open_set)
    if not poset.is_open(members):
        raise InputError("the oracle needs an upward closed (open) set of faces")
    by_dim: dict[int, list[str]] = {}
    for name in poset.elements:
        if name in members:
            by_dim.setdefault(simplicial.dim(name), []).append(name)
    if not by_dim:
        return {}
    lo, hi = min(by_dim), max(by_dim)
    ranks = {}
    for d in range(lo, hi + 1):
        cols = by_dim.get(d, [])
        rows = by_dim.get(d + 1, [])
        col_pos = {name: j for j, name in enumerate(cols)}
        matrix = []
        for upper in rows:
            entries = {}
            uface = simplicial.face_of[upper]
            for v in uface:
                lower = uface - {v}
                lname = simplicial.name_of.get(lower)
                if lname in col_pos:
                    sign = signed_incidence_simplices(uface, v)
                    entries[col_pos[lname]] = sign % p
            matrix.append({k: v for k, v in entries.items() if v})
        ranks[d] = _sparse_rank(field, matrix)
    out = {}
    for d in range(lo, hi + 1):
        h = len(by_dim.get(d, [])) - ranks.get(d, 0) - ranks.get(d - 1, 0)
        if h:
            out[d] = h
    return out


def multiplicity_oracle(simplicial: SimplicialComplex, face: str, p: int = 2) -> dict[int, int]:
    """Expected multiplicities m^d(face) for the constant sheaf: compactly
    supported cohomology of the open star, shifted by the face dimension."""
    star = simplicial.face_poset.star(face)
    dims = compact_support_cohomology(simplicial, star, p)
    shift = simplicial.dim(face)
    return {d - shift: v for d, v in dims.items() if v}
