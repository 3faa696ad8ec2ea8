"""Minimal injective resolutions.

The core routine adds rows to the current matrix at one element so that the
stalk sequence becomes exact there; running it over all elements in a
non-increasing order and iterating over degrees yields the minimal
resolution.  The constant-sheaf bootstrap seeds the process with a column of
ones under a virtual top element; general sheaves seed it with the stalk
images of the minimal hull inclusion.
"""

from __future__ import annotations

import math

from .errors import InputError
from .field import PrimeField
from .matrix import (
    IncrementalRowBasis,
    InjectiveComplex,
    LabeledMatrix,
    image_complement_rows,
)
from .poset import Poset, SimplicialComplex, chain_tuple, order_complex, signed_incidence
from .sheaf import Sheaf, injective_hull


def make_exact(eta_prev: LabeledMatrix, eta_cur: LabeledMatrix, element: str) -> LabeledMatrix:
    """Extend eta_cur by new rows labeled `element` so that the stalk sequence
    at it is exact in the middle.  Returns a new matrix; inputs unchanged."""
    if eta_prev.row_labels != eta_cur.col_labels:
        raise InputError("columns of the current matrix must match rows of the previous")
    out = eta_cur.copy()
    _make_exact_inplace(eta_prev, out, element)
    return out


def _make_exact_inplace(eta_prev: LabeledMatrix, eta_cur: LabeledMatrix, element: str) -> int:
    """In-place MakeExact; returns the number of rows added."""
    field = eta_cur.field
    star_bits = eta_cur.poset.up_bits(element)
    idx = eta_cur.poset.index
    # rows of eta_prev labeled in the star carry the stalk coordinates; their
    # global row indices equal eta_cur's global column indices
    stalk_prev_rows = [
        i for i, lab in enumerate(eta_prev.row_labels) if (star_bits >> idx[lab]) & 1
    ]
    stalk_matrix = [eta_prev.rows[i] for i in stalk_prev_rows]
    complement = image_complement_rows(field, stalk_matrix)

    screen = IncrementalRowBasis(field)
    for i, lab in enumerate(eta_cur.row_labels):
        if (star_bits >> idx[lab]) & 1:
            screen.add(eta_cur.rows[i])
    added = 0
    for vector in complement:
        global_row = {stalk_prev_rows[pos]: v for pos, v in vector.items()}
        if screen.add(global_row):
            eta_cur.row_labels.append(element)
            eta_cur.rows.append(global_row)
            added += 1
    return added


def resolution_step(eta_prev: LabeledMatrix, elements=None) -> LabeledMatrix:
    """One degree of the resolution: start from an empty matrix over the rows
    of eta_prev and run MakeExact over `elements` (default: the whole poset)
    in non-increasing order."""
    poset = eta_prev.poset
    eta_next = LabeledMatrix(poset, eta_prev.field, eta_prev.row_labels)
    order = elements if elements is not None else poset.linear_extension
    for element in reversed(list(order)):
        _make_exact_inplace(eta_prev, eta_next, element)
    return eta_next


def _iterate_resolution(seed: LabeledMatrix, elements, poset: Poset, field: PrimeField,
                        max_steps: int) -> list[LabeledMatrix]:
    matrices = []
    current = seed
    for _ in range(max_steps):
        nxt = resolution_step(current, elements)
        matrices.append(nxt)
        if not nxt.rows:
            break
        current = nxt
    else:
        raise AssertionError("resolution did not terminate within the length bound")
    return matrices


def minimal_resolution_constant(poset: Poset, field: PrimeField | None = None) -> InjectiveComplex:
    """Minimal injective resolution of the constant sheaf, via the virtual-top
    seed (a column of ones over the maximal elements)."""
    field = field or PrimeField(2)
    if not len(poset):
        return InjectiveComplex.empty(poset, field)
    extended, top = poset.with_virtual_top()
    seed = LabeledMatrix(extended, field, [top])
    for m in poset.maximal_elements():
        seed.add_row(m, {0: 1})
    matrices = _iterate_resolution(
        seed, poset.linear_extension, extended, field, poset.height + 3
    )
    rebound = [m.rebind(poset) for m in matrices]
    return InjectiveComplex(poset, field, rebound, 0).trimmed()


def minimal_resolution_sheaf(sheaf: Sheaf) -> InjectiveComplex:
    """Minimal injective resolution of a sheaf: hull seed plus iterated steps.

    Degree 0 consumes only the stalk images of the hull inclusion, supplied
    per element; later degrees are the plain resolution step.
    """
    poset, field = sheaf.poset, sheaf.field
    if not len(poset):
        return InjectiveComplex.empty(poset, field)
    alpha, seed = injective_hull(sheaf)
    hull_labels = seed.matrices[0].col_labels
    coord_index = {}
    for i, lab in enumerate(hull_labels):
        coord_index.setdefault(lab, []).append(i)

    def alpha_image_rows(element: str) -> list[dict[int, int]]:
        """Columns of alpha(element) as sparse vectors over hull coordinates."""
        coords = [i for i, lab in enumerate(hull_labels) if poset.leq(element, lab)]
        mat = alpha.components[element]
        columns = []
        for c in range(sheaf.stalk_dim[element]):
            col = {coords[r]: mat[r][c] for r in range(len(coords)) if mat[r][c]}
            columns.append(col)
        return columns

    eta0 = LabeledMatrix(poset, field, hull_labels)
    for element in reversed(poset.linear_extension):
        _make_exact_against_image(alpha_image_rows(element), eta0, element)
    matrices = [eta0]
    if eta0.rows:
        matrices += _iterate_resolution(
            eta0, poset.linear_extension, poset, field, poset.height + 3
        )
    return InjectiveComplex(poset, field, matrices, 0).trimmed()


def _make_exact_against_image(image_columns, eta_cur: LabeledMatrix, element: str) -> int:
    """MakeExact variant whose previous-map image is given explicitly as sparse
    column vectors over eta_cur's global column indices."""
    field = eta_cur.field
    star_bits = eta_cur.poset.up_bits(element)
    idx = eta_cur.poset.index
    stalk_cols = [
        j for j, lab in enumerate(eta_cur.col_labels) if (star_bits >> idx[lab]) & 1
    ]
    pos_of = {j: pos for pos, j in enumerate(stalk_cols)}
    # transpose the image columns into the row format image_complement_rows expects:
    # conceptually we reduce the matrix whose columns span im(alpha(element));
    # its rows are indexed by the stalk coordinates
    rows = [dict() for _ in stalk_cols]
    for c, col in enumerate(image_columns):
        for j, v in col.items():
            rows[pos_of[j]][c] = v
    complement = image_complement_rows(field, rows)
    screen = IncrementalRowBasis(field)
    for i, lab in enumerate(eta_cur.row_labels):
        if (star_bits >> idx[lab]) & 1:
            screen.add(eta_cur.rows[i])
    added = 0
    for vector in complement:
        global_row = {stalk_cols[pos]: v for pos, v in vector.items()}
        if screen.add(global_row):
            eta_cur.row_labels.append(element)
            eta_cur.rows.append(global_row)
            added += 1
    return added


def order_complex_resolution(sheaf: Sheaf) -> InjectiveComplex:
    """The non-inductive resolution indexed by chains of the poset.

    The degree-d term has one summand [first element]^{F(last element)} per
    chain of length d+1; differentials combine the signed incidence of chains
    with the sheaf restriction to the appended last element.  Generally not
    minimal.
    """
    sheaf.validate().raise_if_failed()
    poset, field = sheaf.poset, sheaf.field
    if not len(poset):
        return InjectiveComplex.empty(poset, field)
    complex_, _t = order_complex(poset)
    chains_by_dim: dict[int, list[tuple[str, ...]]] = {}
    for face in complex_.faces:
        chain = chain_tuple(poset, face)
        chains_by_dim.setdefault(len(chain) - 1, []).append(chain)
    top_dim = max(chains_by_dim)
    for d in chains_by_dim:
        chains_by_dim[d].sort(key=lambda ch: tuple(poset.index[e] for e in ch))
    chain_sets = {d: set(chains) for d, chains in chains_by_dim.items()}

    def summands(d):
        out = []
        for chain in chains_by_dim.get(d, []):
            for m in range(sheaf.stalk_dim[chain[-1]]):
                out.append((chain, m))
        return out

    matrices = []
    for d in range(top_dim + 1):
        cols = summands(d)
        rows = summands(d + 1)
        col_pos = {key: j for j, key in enumerate(cols)}
        mat = LabeledMatrix(poset, field, [chain[0] for chain, _ in cols])
        row_entries = [dict() for _ in rows]
        for i, (upper, mi) in enumerate(rows):
            for drop in range(len(upper)):
                lower = upper[:drop] + upper[drop + 1:]
                if lower not in chain_sets.get(d, ()):
                    continue
                sign = signed_incidence(poset, lower, upper, modulus=field.p)
                if not sign:
                    continue
                restriction = sheaf.restriction_map(lower[-1], upper[-1])
                for mj in range(sheaf.stalk_dim[lower[-1]]):
                    v = (sign * restriction[mi][mj]) % field.p
                    if v:
                        j = col_pos[(lower, mj)]
                        row_entries[i][j] = (row_entries[i].get(j, 0) + v) % field.p
        for i, (upper, _mi) in enumerate(rows):
            mat.row_labels.append(upper[0])
            mat.rows.append({j: v for j, v in row_entries[i].items() if v})
        matrices.append(mat)
    return InjectiveComplex(poset, field, matrices, 0).trimmed()


def is_minimal(complex_: InjectiveComplex) -> bool:
    """True iff every same-label diagonal block of every matrix is zero."""
    for m in complex_.matrices:
        for i, row_lab in enumerate(m.row_labels):
            for j in m.rows[i]:
                if m.col_labels[j] == row_lab:
                    return False
    return True


def multiplicities(complex_: InjectiveComplex):
    return complex_.multiplicities()


def cohomology_sheaf_dims(complex_: InjectiveComplex) -> dict[int, dict[str, int]]:
    """dim H^d at every element: stalk kernel minus previous stalk rank.
    Only nonzero entries are reported."""
    out: dict[int, dict[str, int]] = {}
    ranks: dict[tuple[int, str], int] = {}
    for d in complex_.degrees:
        m = complex_.matrix(d)
        for e in complex_.poset.elements:
            stalk_dim = len(m.stalk_col_indices(e))
            if not stalk_dim:
                continue
            r_here = _stalk_rank(m, e, ranks, d)
            prev = complex_.matrix(d - 1)
            r_prev = _stalk_rank(prev, e, ranks, d - 1) if prev is not None else 0
            h = stalk_dim - r_here - r_prev
            if h:
                out.setdefault(d, {})[e] = h
    return out


def _stalk_rank(m: LabeledMatrix, e: str, cache, d) -> int:
    key = (d, e)
    if key not in cache:
        from .matrix import _sparse_rank

        rows = [m.rows[i] for i in m.stalk_row_indices(e)]
        cache[key] = _sparse_rank(m.field, rows)
    return cache[key]


def star_generators(simplicial: SimplicialComplex, face: str, degree: int, resolution=None) -> int:
    """m^j(St s): generators of the constant sheaf's minimal resolution over a star."""
    if resolution is None:
        resolution = minimal_resolution_constant(simplicial.face_poset)
    table = resolution.multiplicities()
    star = simplicial.face_poset.star(face)
    return sum(table.get(degree, {}).get(e, 0) for e in star)


def star_complexity(simplicial: SimplicialComplex, face: str, degree: int, resolution=None):
    """Generators over a star per star element: m^j(St s) / #St s."""
    from fractions import Fraction

    total = star_generators(simplicial, face, degree, resolution)
    return Fraction(total, len(simplicial.face_poset.star(face)))


def star_complexity_bound(simplicial: SimplicialComplex, face: str, degree: int) -> int:
    star = simplicial.face_poset.star(face)
    d = max(simplicial.dim(t) for t in star) - simplicial.dim(face)
    return math.comb(d, degree) if 0 <= degree <= d else 0
