"""Derived-category operations on complexes of labeled matrices: peeling to
the minimal complex, the four derived functors, mapping cones, hypercohomology,
morphism-space dimensions and dualization.

Equality of derived objects is always meant up to isomorphism, so comparisons
go through multiplicity tables and stalkwise cohomology dimensions, never raw
entries.
"""

from __future__ import annotations

from .errors import InputError, SizeCapExceeded
from .field import PrimeField
from .matrix import InjectiveComplex, LabeledMatrix, _sparse_rank
from .poset import LocallyClosedSet, MonotoneMap, mapping_cylinder
from .resolution import _make_exact_inplace, cohomology_sheaf_dims

HOM_SYSTEM_VARIABLE_CAP = 20_000


# -- peeling -------------------------------------------------------------------


def peel(complex_: InjectiveComplex, _scan_order=None) -> InjectiveComplex:
    """Split off all 0 -> [pi] -> [pi] -> 0 summands, returning the minimal
    complex quasi-isomorphic to the input.

    Each pivot in a same-label diagonal block is cleared with allowed row and
    column operations (mirrored on the neighbor matrices), after which its row
    and column split off and are deleted.  The output's multiplicity table is
    independent of the scan order.
    """
    ms = [m.copy() for m in complex_.matrices]
    field = complex_.field

    def diagonal_entry(m: LabeledMatrix):
        for i, row_lab in enumerate(m.row_labels):
            for j, v in m.rows[i].items():
                if m.col_labels[j] == row_lab:
                    return i, j, v
        return None

    order = list(_scan_order) if _scan_order is not None else list(range(len(ms)))
    progress = True
    while progress:
        progress = False
        for k in order:
            m = ms[k]
            while True:
                hit = diagonal_entry(m)
                if hit is None:
                    break
                progress = True
                i, j, c = hit
                prev_m = ms[k - 1] if k > 0 else None
                next_m = ms[k + 1] if k + 1 < len(ms) else None
                _clear_pivot(field, m, prev_m, next_m, i, j, c)
                _delete_pivot(m, prev_m, next_m, i, j)
    return InjectiveComplex(complex_.poset, field, ms, complex_.degree_offset).trimmed()


def _clear_pivot(field: PrimeField, m, prev_m, next_m, i, j, c):
    p = field.p
    inv = field.inv(c)
    # clear column j using row i; rows meeting a pi-labeled column are labeled
    # <= pi, so the row addition is allowed
    for i2 in range(m.nrows):
        if i2 != i and j in m.rows[i2]:
            f = (m.rows[i2][j] * inv) % p
            _add_row_into(p, m.rows, i, i2, -f)
            if next_m is not None:
                _add_col_into(p, next_m.rows, i2, i, f)
    # clear row i using column j; columns meeting a pi-labeled row are labeled
    # >= pi, so the column addition is allowed
    for j2 in list(m.rows[i]):
        if j2 != j:
            f = (m.rows[i][j2] * inv) % p
            _add_col_into(p, m.rows, j, j2, -f)
            if prev_m is not None:
                _add_row_into(p, prev_m.rows, j2, j, f)


def _add_row_into(p, rows, src, dest, scalar):
    s = scalar % p
    if not s:
        return
    target = rows[dest]
    for col, v in rows[src].items():
        new = (target.get(col, 0) + s * v) % p
        if new:
            target[col] = new
        else:
            target.pop(col, None)


def _add_col_into(p, rows, src, dest, scalar):
    s = scalar % p
    if not s:
        return
    for row in rows:
        if src in row:
            new = (row.get(dest, 0) + s * row[src]) % p
            if new:
                row[dest] = new
            else:
                row.pop(dest, None)


def _delete_pivot(m, prev_m, next_m, i, j):
    # composition zero forces the split-off row/column in the neighbors to
    # vanish, so deleting them preserves the complex
    if prev_m is not None and prev_m.rows[j]:
        raise AssertionError("peel invariant violated: nonzero row feeding a pivot")
    if next_m is not None and any(i in r for r in next_m.rows):
        raise AssertionError("peel invariant violated: nonzero column above a pivot")
    _delete_row(m, i)
    _delete_col(m, j)
    if prev_m is not None:
        _delete_row(prev_m, j)
    if next_m is not None:
        _delete_col(next_m, i)


def _delete_row(m: LabeledMatrix, i: int):
    del m.rows[i]
    del m.row_labels[i]


def _delete_col(m: LabeledMatrix, j: int):
    del m.col_labels[j]
    for k, row in enumerate(m.rows):
        m.rows[k] = {(col - 1 if col > j else col): v for col, v in row.items() if col != j}


# -- derived functors ----------------------------------------------------------


def pushforward(f: MonotoneMap, complex_: InjectiveComplex) -> InjectiveComplex:
    """Rf_*: relabel every row/column label through f, then peel."""
    if complex_.poset != f.source:
        raise InputError("complex does not live on the map's source")
    relabeled = [m.relabel(f.assignment, poset=f.target) for m in complex_.matrices]
    pushed = InjectiveComplex(f.target, complex_.field, relabeled, complex_.degree_offset)
    return peel(pushed)


def pullback(f: MonotoneMap, complex_: InjectiveComplex) -> InjectiveComplex:
    """Rf^*: build an exact mapping-cone complex over the mapping cylinder by
    seeding each degree with the negated rows of the next differential and
    making it exact over the source; keep the source-labeled part.  The output
    is minimal by construction."""
    if complex_.poset != f.target:
        raise InputError("complex does not live on the map's target")
    field = complex_.field
    if complex_.is_empty():
        return InjectiveComplex.empty(f.source, field)
    cyl, inc_src, inc_tgt = mapping_cylinder(f)
    ms = complex_.matrices
    off = complex_.degree_offset
    top = off + len(ms) - 1
    relabeled = [m.relabel(inc_tgt.assignment, poset=cyl) for m in ms]
    src_order = [inc_src(e) for e in f.source.linear_extension]

    gammas: dict[int, LabeledMatrix] = {
        off - 2: LabeledMatrix(cyl, field, [], relabeled[0].col_labels)
    }
    d = off - 1
    safety = len(ms) + cyl.height + 4
    while True:
        prev = gammas[d - 1]
        gamma = LabeledMatrix(cyl, field, prev.row_labels)
        if off <= d + 1 <= top:
            source = relabeled[d + 1 - off]
            for lab, row in zip(source.row_labels, source.rows):
                gamma.row_labels.append(lab)
                gamma.rows.append({j: field.neg(v) for j, v in row.items()})
        for element in reversed(src_order):
            _make_exact_inplace(prev, gamma, element)
        gammas[d] = gamma
        if not gamma.rows and d >= top:
            break
        d += 1
        if d - off > safety:
            raise AssertionError("pullback construction did not terminate")

    back = {inc_src(e): e for e in f.source.elements}
    result = [
        gammas[dd].submatrix(back.keys(), back.keys()).relabel(back, poset=f.source)
        for dd in range(off - 1, d + 1)
    ]
    return InjectiveComplex(f.source, field, result, off - 1).trimmed()


def proper_pushforward(zset: LocallyClosedSet, complex_: InjectiveComplex) -> InjectiveComplex:
    """R(i_Z)_!: extend by zero and force exactness over the closure boundary,
    in non-increasing order."""
    ambient = zset.ambient
    field = complex_.field
    if set(complex_.poset.elements) != set(zset.members):
        raise InputError("complex does not live on the locally closed set")
    if complex_.is_empty():
        return InjectiveComplex.empty(ambient, field)
    ms = complex_.matrices
    off = complex_.degree_offset
    top = off + len(ms) - 1
    lifted = [m.rebind(ambient) for m in ms]
    position = {e: k for k, e in enumerate(ambient.linear_extension)}
    boundary = sorted(zset.boundary(), key=position.__getitem__)

    deltas: dict[int, LabeledMatrix] = {
        off - 1: LabeledMatrix(ambient, field, [], lifted[0].col_labels)
    }
    d = off
    safety = len(ms) + ambient.height + 4
    while True:
        prev = deltas[d - 1]
        delta = LabeledMatrix(ambient, field, prev.row_labels)
        if off <= d <= top:
            source = lifted[d - off]
            for lab, row in zip(source.row_labels, source.rows):
                delta.row_labels.append(lab)
                delta.rows.append(dict(row))
        for element in reversed(boundary):
            _make_exact_inplace(prev, delta, element)
        deltas[d] = delta
        if not delta.rows and d >= top:
            break
        d += 1
        if d - off > safety:
            raise AssertionError("proper pushforward did not terminate")
    result = [deltas[dd] for dd in range(off, d + 1)]
    return InjectiveComplex(ambient, field, result, off).trimmed()


def proper_pullback(zset: LocallyClosedSet, complex_: InjectiveComplex) -> InjectiveComplex:
    """Ri_Z^!: per-degree submatrices on the Z-labeled rows and columns.
    Minimality is preserved."""
    if complex_.poset != zset.ambient:
        raise InputError("complex does not live on the ambient poset")
    sub_poset = zset.restricted_poset()
    members = set(zset.members)
    out = [m.submatrix(members, members).rebind(sub_poset) for m in complex_.matrices]
    sub = InjectiveComplex(sub_poset, complex_.field, out, complex_.degree_offset)
    return _close_tail(sub).trimmed()


def _close_tail(complex_: InjectiveComplex) -> InjectiveComplex:
    """Append a zero differential if the last matrix still has rows."""
    ms = list(complex_.matrices)
    if ms and ms[-1].nrows:
        ms.append(LabeledMatrix(complex_.poset, complex_.field, ms[-1].row_labels))
    return InjectiveComplex(complex_.poset, complex_.field, ms, complex_.degree_offset)


# -- hypercohomology and Euler characteristics ----------------------------------


def hypercohomology(complex_: InjectiveComplex) -> dict[int, int]:
    """Dimensions of the derived pushforward to a point: per degree,
    columns - rank - previous rank, labels forgotten.  Zero entries omitted."""
    out = {}
    prev_rank = 0
    for d in complex_.degrees:
        m = complex_.matrix(d)
        r = m.rank()
        h = m.ncols - r - prev_rank
        if h:
            out[d] = h
        prev_rank = r
    return out


def euler_characteristic(complex_: InjectiveComplex) -> int:
    return sum((-1) ** d * complex_.matrix(d).ncols for d in complex_.degrees)


# -- mapping cones ---------------------------------------------------------------


class ComplexMorphism:
    """A degreewise labeled-matrix map between complexes on one poset."""

    def __init__(self, source: InjectiveComplex, target: InjectiveComplex, components: dict):
        if source.poset != target.poset:
            raise InputError("complexes live on different posets")
        self.source = source
        self.target = target
        self.components = dict(components)

    @classmethod
    def identity(cls, complex_: InjectiveComplex) -> "ComplexMorphism":
        comps = {}
        for d in complex_.degrees:
            labels = complex_.term(d)
            m = LabeledMatrix(complex_.poset, complex_.field, labels, labels)
            for i in range(len(labels)):
                m.rows[i][i] = 1
            comps[d] = m
        return cls(complex_, complex_, comps)

    @classmethod
    def zero(cls, source: InjectiveComplex, target: InjectiveComplex) -> "ComplexMorphism":
        return cls(source, target, {})

    def component(self, d: int) -> LabeledMatrix:
        m = self.components.get(d)
        if m is not None:
            return m
        return LabeledMatrix(
            self.source.poset,
            self.source.field,
            self.source.term(d),
            self.target.term(d),
        )

    def validate(self):
        from .matrix import ValidationReport

        issues = []
        degrees = sorted(set(self.source.degrees) | set(self.target.degrees))
        for d in degrees:
            alpha_d = self.component(d)
            if (
                alpha_d.col_labels != self.source.term(d)
                or alpha_d.row_labels != self.target.term(d)
            ):
                issues.append(f"component {d} has mismatched labels")
                continue
            bad = alpha_d.validate()
            if bad:
                issues.extend(f"component {d}: {msg}" for msg in bad)
                continue
            eta = self.source.matrix(d)
            delta = self.target.matrix(d)
            if eta is None or delta is None:
                continue
            if self.component(d + 1).multiply(eta) != delta.multiply(alpha_d):
                issues.append(f"square at degree {d} does not commute")
        return ValidationReport(issues)


def mapping_cone(alpha: ComplexMorphism) -> InjectiveComplex:
    """C^d = F^{d+1} (+) G^d with differential ((-eta^{d+1}, 0), (alpha^{d+1}, delta^d))."""
    alpha.validate().raise_if_failed()
    F, G = alpha.source, alpha.target
    poset, field = F.poset, F.field
    lows, highs = [], []
    if not F.is_empty():
        lows.append(F.degree_offset - 1)
        highs.append(F.degrees[-1] - 1)
    if not G.is_empty():
        lows.append(G.degree_offset)
        highs.append(G.degrees[-1])
    if not lows:
        return InjectiveComplex.empty(poset, field)
    ms = []
    for d in range(min(lows), max(highs) + 1):
        f_cols, g_cols = F.term(d + 1), G.term(d)
        cone = LabeledMatrix(poset, field, f_cols + g_cols)
        eta = F.matrix(d + 1)
        delta = G.matrix(d)
        a = alpha.component(d + 1)
        for i, lab in enumerate(F.term(d + 2)):
            cone.row_labels.append(lab)
            cone.rows.append(
                {j: field.neg(v) for j, v in eta.rows[i].items()} if eta is not None else {}
            )
        shift = len(f_cols)
        for i, lab in enumerate(G.term(d + 1)):
            row = dict(a.rows[i]) if i < a.nrows else {}
            if delta is not None:
                for j, v in delta.rows[i].items():
                    row[j + shift] = v
            cone.row_labels.append(lab)
            cone.rows.append(row)
        ms.append(cone)
    out = InjectiveComplex(poset, field, ms, min(lows))
    return _close_tail(out).trimmed()


# -- morphism spaces --------------------------------------------------------------


def hom_space_dims(
    I: InjectiveComplex,
    J: InjectiveComplex,
    variable_cap: int = HOM_SYSTEM_VARIABLE_CAP,
) -> tuple[int, int, int]:
    """(dim morphisms, dim null-homotopic morphisms, dim derived hom).

    Degreewise maps alpha^d are unknowns constrained to the label order and to
    commute with the differentials; the null-homotopic subspace is the image
    of h -> (delta^{d-1} h^d + h^{d+1} eta^d).  Refuses systems above
    `variable_cap` unknowns.
    """
    if I.poset != J.poset:
        raise InputError("complexes live on different posets")
    field, poset = I.field, I.poset
    p = field.p
    degrees = sorted(set(I.degrees) | set(J.degrees))
    if not degrees:
        return (0, 0, 0)

    alpha_vars: dict[tuple[int, int, int], int] = {}
    for d in degrees:
        for i, row_lab in enumerate(J.term(d)):
            for j, col_lab in enumerate(I.term(d)):
                if poset.leq(row_lab, col_lab):
                    alpha_vars[(d, i, j)] = len(alpha_vars)
    h_vars: dict[tuple[int, int, int], int] = {}
    for d in degrees:
        for i, row_lab in enumerate(J.term(d - 1)):
            for j, col_lab in enumerate(I.term(d)):
                if poset.leq(row_lab, col_lab):
                    h_vars[(d, i, j)] = len(h_vars)
    if len(alpha_vars) + len(h_vars) > variable_cap:
        raise SizeCapExceeded(
            f"morphism system has {len(alpha_vars) + len(h_vars)} unknowns, "
            f"above the cap of {variable_cap}"
        )

    # commutativity: (alpha^{d+1} eta^d - delta^d alpha^d)[r, c] = 0
    constraints = []
    for d in degrees:
        eta = I.matrix(d)
        delta = J.matrix(d)
        for r in range(len(J.term(d + 1))):
            for c in range(len(I.term(d))):
                coeffs: dict[int, int] = {}
                if eta is not None:
                    for k in range(eta.nrows):
                        v = eta.rows[k].get(c, 0)
                        if v:
                            var = alpha_vars.get((d + 1, r, k))
                            if var is not None:
                                coeffs[var] = (coeffs.get(var, 0) + v) % p
                if delta is not None and r < delta.nrows:
                    for k, v in delta.rows[r].items():
                        var = alpha_vars.get((d, k, c))
                        if var is not None:
                            coeffs[var] = (coeffs.get(var, 0) - v) % p
                coeffs = {k: v for k, v in coeffs.items() if v}
                if coeffs:
                    constraints.append(coeffs)
    morphism_dim = len(alpha_vars) - _sparse_rank(field, constraints)

    # null-homotopic subspace = image of T(h)^d = delta^{d-1} h^d + h^{d+1} eta^d,
    # measured by the rank of T (columns indexed by h variables)
    columns: list[dict[int, int]] = [dict() for _ in range(len(h_vars))]
    out_index: dict[tuple[int, int, int], int] = {}
    for d in degrees:
        eta = I.matrix(d)
        delta_prev = J.matrix(d - 1)
        for r in range(len(J.term(d))):
            for c in range(len(I.term(d))):
                out = out_index.setdefault((d, r, c), len(out_index))
                if delta_prev is not None and r < delta_prev.nrows:
                    for k, v in delta_prev.rows[r].items():
                        var = h_vars.get((d, k, c))
                        if var is not None:
                            columns[var][out] = (columns[var].get(out, 0) + v) % p
                if eta is not None:
                    for k in range(eta.nrows):
                        v = eta.rows[k].get(c, 0)
                        if v:
                            var = h_vars.get((d + 1, r, k))
                            if var is not None:
                                columns[var][out] = (columns[var].get(out, 0) + v) % p
    columns = [{k: v for k, v in col.items() if v} for col in columns]
    null_homotopic_dim = _sparse_rank(field, columns)
    return morphism_dim, null_homotopic_dim, morphism_dim - null_homotopic_dim


# -- dualization -------------------------------------------------------------------


def dualize(complex_: InjectiveComplex) -> InjectiveComplex:
    """Transpose every matrix and reverse the order: a projective resolution
    datum on the opposite poset, with degrees negated."""
    opp = complex_.poset.opposite()
    if complex_.is_empty():
        return InjectiveComplex.empty(opp, complex_.field)
    ms = [m.transpose(poset=opp) for m in reversed(complex_.matrices)]
    ms.append(LabeledMatrix(opp, complex_.field, complex_.matrices[0].col_labels))
    offset = -(complex_.degree_offset + len(complex_.matrices))
    return InjectiveComplex(opp, complex_.field, ms, offset).trimmed()


# -- consistency checks --------------------------------------------------------------


def pullback_via_proper_check(f: MonotoneMap, complex_: InjectiveComplex) -> bool:
    """Verify Rf^* C = (Rp^! Rl_! C)[shift by one] at the level of multiplicity
    tables and stalkwise cohomology dimensions."""
    lhs = pullback(f, complex_)
    cyl, inc_src, inc_tgt = mapping_cylinder(f)
    target_side = LocallyClosedSet(cyl, [inc_tgt(e) for e in f.target.elements])
    target_sub = target_side.restricted_poset()
    lifted = [
        m.relabel(inc_tgt.assignment, poset=target_sub) for m in complex_.matrices
    ]
    on_target = InjectiveComplex(target_sub, complex_.field, lifted, complex_.degree_offset)
    extended = proper_pushforward(target_side, on_target)
    source_side = LocallyClosedSet(cyl, [inc_src(e) for e in f.source.elements])
    restricted = proper_pullback(source_side, extended)
    back = {inc_src(e): e for e in f.source.elements}
    renamed = [m.relabel(back, poset=f.source) for m in restricted.matrices]
    rhs = InjectiveComplex(
        f.source, complex_.field, renamed, restricted.degree_offset
    ).shifted(1)
    return same_derived_object(lhs, rhs)


def same_derived_object(a: InjectiveComplex, b: InjectiveComplex) -> bool:
    """Equality test used throughout: multiplicity tables and stalkwise
    cohomology dimensions agree."""
    ta = {d: dict(c) for d, c in a.multiplicities().items()}
    tb = {d: dict(c) for d, c in b.multiplicities().items()}
    if ta != tb:
        return False
    return cohomology_sheaf_dims(a) == cohomology_sheaf_dims(b)
