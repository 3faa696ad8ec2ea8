"""Poset-labeled sparse matrices over GF(p) and complexes thereof.

A labeled matrix represents a natural transformation between direct sums of
indecomposable injective sheaves: columns are the domain summands, rows the
codomain summands, and an entry in a row labeled ``s`` and a column labeled
``p`` can be nonzero only if ``s <= p``.  Rows are stored sparsely as
``column index -> nonzero value`` dicts, so extracting the stalk map at an
element is just a row selection.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from .errors import InputError, OperationNotAllowed
from .field import PrimeField
from .poset import Poset


class LabeledMatrix:
    def __init__(self, poset: Poset, field: PrimeField, col_labels, row_labels=None, rows=None):
        self.poset = poset
        self.field = field
        self.col_labels: list[str] = list(col_labels)
        self.row_labels: list[str] = list(row_labels or [])
        self.rows: list[dict[int, int]] = [dict(r) for r in rows] if rows else [
            {} for _ in self.row_labels
        ]
        if len(self.rows) != len(self.row_labels):
            raise InputError("row count does not match row labels")

    # -- basics --------------------------------------------------------------

    @property
    def nrows(self) -> int:
        return len(self.row_labels)

    @property
    def ncols(self) -> int:
        return len(self.col_labels)

    def copy(self) -> "LabeledMatrix":
        return LabeledMatrix(self.poset, self.field, self.col_labels, self.row_labels, self.rows)

    def entry(self, i: int, j: int) -> int:
        return self.rows[i].get(j, 0)

    def is_zero(self) -> bool:
        return all(not r for r in self.rows)

    def __eq__(self, other):
        return (
            isinstance(other, LabeledMatrix)
            and other.field == self.field
            and other.col_labels == self.col_labels
            and other.row_labels == self.row_labels
            and other.rows == self.rows
        )

    def __repr__(self):
        return f"<LabeledMatrix {self.nrows}x{self.ncols} over GF({self.field.p})>"

    def add_row(self, label: str, entries: dict[int, int]) -> None:
        """Append a row (builder used single-threaded inside the algorithms)."""
        p = self.field.p
        clean = {j: v % p for j, v in entries.items() if v % p}
        for j in clean:
            if not self.poset.leq(label, self.col_labels[j]):
                raise InputError(
                    f"entry ({label}, {self.col_labels[j]}) violates the label order"
                )
        self.row_labels.append(label)
        self.rows.append(clean)

    def validate(self) -> list[str]:
        issues = []
        p = self.field.p
        for lab in self.row_labels + self.col_labels:
            if lab not in self.poset.index:
                issues.append(f"label {lab!r} not in poset")
                return issues
        for i, row in enumerate(self.rows):
            for j, v in row.items():
                if not 0 < v < p:
                    issues.append(f"entry ({i},{j}) = {v} not a reduced nonzero scalar")
                if not (0 <= j < self.ncols):
                    issues.append(f"entry ({i},{j}) out of range")
                elif not self.poset.leq(self.row_labels[i], self.col_labels[j]):
                    issues.append(
                        f"nonzero entry in row {self.row_labels[i]},"
                        f" column {self.col_labels[j]}: labels not ordered"
                    )
        return issues

    # -- submatrices and products ---------------------------------------------

    def submatrix(self, row_set, col_set) -> "LabeledMatrix":
        """Keep rows/columns whose labels lie in the given sets, preserving order."""
        row_set = set(row_set)
        col_set = set(col_set)
        keep_cols = [j for j, lab in enumerate(self.col_labels) if lab in col_set]
        col_pos = {j: k for k, j in enumerate(keep_cols)}
        keep_rows = [i for i, lab in enumerate(self.row_labels) if lab in row_set]
        out = LabeledMatrix(
            self.poset,
            self.field,
            [self.col_labels[j] for j in keep_cols],
            [self.row_labels[i] for i in keep_rows],
        )
        for k, i in enumerate(keep_rows):
            out.rows[k] = {col_pos[j]: v for j, v in self.rows[i].items() if j in col_pos}
        return out

    def stalk_row_indices(self, element: str) -> list[int]:
        bits = self.poset.up_bits(element)
        idx = self.poset.index
        return [i for i, lab in enumerate(self.row_labels) if (bits >> idx[lab]) & 1]

    def stalk_col_indices(self, element: str) -> list[int]:
        bits = self.poset.up_bits(element)
        idx = self.poset.index
        return [j for j, lab in enumerate(self.col_labels) if (bits >> idx[lab]) & 1]

    def stalk_matrix(self, element: str) -> list[list[int]]:
        """Dense stalk map at an element: rows/cols are the star-labeled ones."""
        rows = self.stalk_row_indices(element)
        cols = self.stalk_col_indices(element)
        pos = {j: k for k, j in enumerate(cols)}
        out = [[0] * len(cols) for _ in rows]
        for k, i in enumerate(rows):
            for j, v in self.rows[i].items():
                out[k][pos[j]] = v
        return out

    def multiply(self, other: "LabeledMatrix") -> "LabeledMatrix":
        """self @ other (self's columns must match other's rows, order included)."""
        if self.col_labels != other.row_labels:
            raise InputError("label sequences do not match for multiplication")
        p = self.field.p
        out = LabeledMatrix(self.poset, self.field, other.col_labels, self.row_labels)
        for i, row in enumerate(self.rows):
            acc: dict[int, int] = {}
            for k, v in row.items():
                for j, w in other.rows[k].items():
                    acc[j] = (acc.get(j, 0) + v * w) % p
            out.rows[i] = {j: v for j, v in acc.items() if v}
        return out

    def transpose(self, poset: Poset | None = None) -> "LabeledMatrix":
        """Transpose, swapping row and column labels (used on the opposite poset)."""
        target = poset or self.poset
        out = LabeledMatrix(target, self.field, self.row_labels, self.col_labels)
        for i, row in enumerate(self.rows):
            for j, v in row.items():
                out.rows[j][i] = v
        return out

    def relabel(self, rename, poset: Poset | None = None) -> "LabeledMatrix":
        """Apply a label substitution (e.g. a pushforward); entries unchanged."""
        f = rename if callable(rename) else rename.__getitem__
        out = LabeledMatrix(
            poset or self.poset,
            self.field,
            [f(lab) for lab in self.col_labels],
            [f(lab) for lab in self.row_labels],
            self.rows,
        )
        return out

    def rebind(self, poset: Poset) -> "LabeledMatrix":
        """Attach to another poset carrying the same element names."""
        return LabeledMatrix(poset, self.field, self.col_labels, self.row_labels, self.rows)

    def scale(self, c: int) -> "LabeledMatrix":
        p = self.field.p
        out = self.copy()
        out.rows = [
            {j: (v * c) % p for j, v in row.items() if (v * c) % p} for row in self.rows
        ]
        return out

    # -- rank and orthogonal complements --------------------------------------

    def rank(self) -> int:
        return _sparse_rank(self.field, self.rows)

    # -- row and column operations ---------------------------------------------

    def apply_op(self, op: "MatrixOp") -> "LabeledMatrix":
        out = self.copy()
        op.check(out)
        op.apply(out)
        return out

    def print_text(self, title: str = "", zero: str = "·") -> str:
        """Figure-style rendering: first row column labels, first column row labels."""
        header = [title] + list(self.col_labels)
        body = []
        for i, lab in enumerate(self.row_labels):
            body.append(
                [lab] + [str(self.rows[i][j]) if j in self.rows[i] else zero
                         for j in range(self.ncols)]
            )
        table = [header] + body
        widths = [max(len(r[c]) for r in table) for c in range(len(header))] if header else []
        lines = ["  ".join(cell.rjust(w) for cell, w in zip(row, widths)) for row in table]
        return "\n".join(lines)


@dataclass
class RowAdd:
    """row[dest] += scalar * row[src]; requires label(dest) <= label(src)."""

    src: int
    dest: int
    scalar: int

    def check(self, m: LabeledMatrix):
        if self.src == self.dest:
            raise OperationNotAllowed("source and destination rows coincide")
        if not m.poset.leq(m.row_labels[self.dest], m.row_labels[self.src]):
            raise OperationNotAllowed(
                f"cannot add row labeled {m.row_labels[self.src]} into row labeled "
                f"{m.row_labels[self.dest]}"
            )

    def apply(self, m: LabeledMatrix):
        _row_add(m.field, m.rows, self.src, self.dest, self.scalar)

    def inverse(self, field: PrimeField) -> "RowAdd":
        return RowAdd(self.src, self.dest, field.neg(self.scalar))


@dataclass
class ColAdd:
    """col[dest] += scalar * col[src]; requires label(src) <= label(dest)."""

    src: int
    dest: int
    scalar: int

    def check(self, m: LabeledMatrix):
        if self.src == self.dest:
            raise OperationNotAllowed("source and destination columns coincide")
        if not m.poset.leq(m.col_labels[self.src], m.col_labels[self.dest]):
            raise OperationNotAllowed(
                f"cannot add column labeled {m.col_labels[self.src]} into column labeled "
                f"{m.col_labels[self.dest]}"
            )

    def apply(self, m: LabeledMatrix):
        _col_add(m.field, m.rows, self.src, self.dest, self.scalar)

    def inverse(self, field: PrimeField) -> "ColAdd":
        return ColAdd(self.src, self.dest, field.neg(self.scalar))


@dataclass
class RowScale:
    row: int
    scalar: int

    def check(self, m: LabeledMatrix):
        if m.field.normalize(self.scalar) == 0:
            raise OperationNotAllowed("scaling by zero")

    def apply(self, m: LabeledMatrix):
        p = m.field.p
        m.rows[self.row] = {
            j: (v * self.scalar) % p for j, v in m.rows[self.row].items() if (v * self.scalar) % p
        }

    def inverse(self, field: PrimeField) -> "RowScale":
        return RowScale(self.row, field.inv(self.scalar))


@dataclass
class ColScale:
    col: int
    scalar: int

    def check(self, m: LabeledMatrix):
        if m.field.normalize(self.scalar) == 0:
            raise OperationNotAllowed("scaling by zero")

    def apply(self, m: LabeledMatrix):
        p = m.field.p
        for row in m.rows:
            if self.col in row:
                v = (row[self.col] * self.scalar) % p
                if v:
                    row[self.col] = v
                else:
                    del row[self.col]

    def inverse(self, field: PrimeField) -> "ColScale":
        return ColScale(self.col, field.inv(self.scalar))


@dataclass
class RowSwap:
    a: int
    b: int

    def check(self, m: LabeledMatrix):
        pass

    def apply(self, m: LabeledMatrix):
        m.rows[self.a], m.rows[self.b] = m.rows[self.b], m.rows[self.a]
        m.row_labels[self.a], m.row_labels[self.b] = m.row_labels[self.b], m.row_labels[self.a]

    def inverse(self, field: PrimeField) -> "RowSwap":
        return RowSwap(self.a, self.b)


@dataclass
class ColSwap:
    a: int
    b: int

    def check(self, m: LabeledMatrix):
        pass

    def apply(self, m: LabeledMatrix):
        for row in m.rows:
            va, vb = row.pop(self.a, None), row.pop(self.b, None)
            if vb is not None:
                row[self.a] = vb
            if va is not None:
                row[self.b] = va
        m.col_labels[self.a], m.col_labels[self.b] = m.col_labels[self.b], m.col_labels[self.a]

    def inverse(self, field: PrimeField) -> "ColSwap":
        return ColSwap(self.a, self.b)


MatrixOp = RowAdd | ColAdd | RowScale | ColScale | RowSwap | ColSwap


def row_op(m: LabeledMatrix, kind: str, i: int, j: int | None = None, scalar: int = 1):
    """Allowed elementary row operation, returning a new matrix.

    kinds: 'add' (row i += scalar * row j), 'scale' (row i *= scalar),
    'swap' (rows i, j).
    """
    if kind == "add":
        return m.apply_op(RowAdd(src=j, dest=i, scalar=scalar))
    if kind == "scale":
        return m.apply_op(RowScale(row=i, scalar=scalar))
    if kind == "swap":
        return m.apply_op(RowSwap(a=i, b=j))
    raise InputError(f"unknown row operation {kind!r}")


def col_op(m: LabeledMatrix, kind: str, i: int, j: int | None = None, scalar: int = 1):
    """Allowed elementary column operation, returning a new matrix."""
    if kind == "add":
        return m.apply_op(ColAdd(src=j, dest=i, scalar=scalar))
    if kind == "scale":
        return m.apply_op(ColScale(col=i, scalar=scalar))
    if kind == "swap":
        return m.apply_op(ColSwap(a=i, b=j))
    raise InputError(f"unknown column operation {kind!r}")


def _row_add(field: PrimeField, rows, src: int, dest: int, scalar: int):
    p = field.p
    s = scalar % p
    if not s:
        return
    target = rows[dest]
    for j, v in rows[src].items():
        new = (target.get(j, 0) + s * v) % p
        if new:
            target[j] = new
        else:
            target.pop(j, None)


def _col_add(field: PrimeField, rows, src: int, dest: int, scalar: int):
    p = field.p
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


def _sparse_rank(field: PrimeField, rows) -> int:
    """Rank by the deterministic leftmost-pivot, first-row-wins reduction."""
    pivots: dict[int, dict[int, int]] = {}
    rank = 0
    for row in rows:
        current = dict(row)
        reduced = _reduce_against(field, current, pivots)
        if reduced:
            lead = min(reduced)
            inv = field.inv(reduced[lead])
            pivots[lead] = {j: (v * inv) % field.p for j, v in reduced.items()}
            rank += 1
    return rank


def _reduce_against(field: PrimeField, row: dict[int, int], pivots: dict[int, dict[int, int]]):
    p = field.p
    current = {j: v % p for j, v in row.items() if v % p}
    while current:
        lead = min(current)
        piv = pivots.get(lead)
        if piv is None:
            return current
        f = current[lead]
        for j, v in piv.items():
            new = (current.get(j, 0) - f * v) % p
            if new:
                current[j] = new
            else:
                current.pop(j, None)
    return current


def image_complement_rows(field: PrimeField, stalk_rows: list[dict[int, int]]):
    """Basis of the orthogonal complement of the column space of a stalk matrix.

    `stalk_rows` are the rows of eta^{d-1}(pi) keyed by global column indices.
    Row-reduces the matrix with an augmented identity; the identity rows that
    end with a zero matrix row span (im)^perp.  Coordinates of the output
    vectors refer to stalk row positions (0-based).
    """
    p = field.p
    n = len(stalk_rows)
    reduced: list[dict[int, int]] = []
    witness: list[dict[int, int]] = []
    pivot_of: dict[int, int] = {}
    complement = []
    for i in range(n):
        current = {j: v % p for j, v in stalk_rows[i].items() if v % p}
        u = {i: 1}
        while current:
            lead = min(current)
            k = pivot_of.get(lead)
            if k is None:
                break
            f = current[lead]
            for j, v in reduced[k].items():
                new = (current.get(j, 0) - f * v) % p
                if new:
                    current[j] = new
                else:
                    current.pop(j, None)
            for j, v in witness[k].items():
                new = (u.get(j, 0) - f * v) % p
                if new:
                    u[j] = new
                else:
                    u.pop(j, None)
        if current:
            lead = min(current)
            inv = field.inv(current[lead])
            pivot_of[lead] = len(reduced)
            reduced.append({j: (v * inv) % p for j, v in current.items()})
            witness.append({j: (v * inv) % p for j, v in u.items()})
        else:
            complement.append(u)
    return complement


class IncrementalRowBasis:
    """Row space accumulator used for the linear-independence screen."""

    def __init__(self, field: PrimeField):
        self.field = field
        self.pivots: dict[int, dict[int, int]] = {}

    def add(self, row: dict[int, int]) -> bool:
        """Insert if independent from the current span; returns True if added."""
        reduced = _reduce_against(self.field, row, self.pivots)
        if not reduced:
            return False
        lead = min(reduced)
        inv = self.field.inv(reduced[lead])
        self.pivots[lead] = {j: (v * inv) % self.field.p for j, v in reduced.items()}
        return True


# -- complexes ----------------------------------------------------------------


class InjectiveComplex:
    """A bounded complex of injective sheaves as composable labeled matrices.

    ``matrices[i]`` is the differential out of the term in degree
    ``degree_offset + i``; its columns name that term's indecomposable
    summands.  The last matrix has no rows (the complex ends), and
    consecutive matrices satisfy rows == next columns and compose to zero.
    """

    def __init__(self, poset: Poset, field: PrimeField, matrices, degree_offset: int = 0):
        self.poset = poset
        self.field = field
        self.matrices: list[LabeledMatrix] = list(matrices)
        self.degree_offset = degree_offset

    @classmethod
    def empty(cls, poset: Poset, field: PrimeField) -> "InjectiveComplex":
        return cls(poset, field, [], 0)

    @classmethod
    def single_term(cls, poset, field, labels, degree: int = 0) -> "InjectiveComplex":
        return cls(poset, field, [LabeledMatrix(poset, field, labels)], degree)

    def is_empty(self) -> bool:
        return not self.matrices

    @property
    def degrees(self) -> range:
        return range(self.degree_offset, self.degree_offset + len(self.matrices))

    def matrix(self, d: int) -> LabeledMatrix | None:
        i = d - self.degree_offset
        if 0 <= i < len(self.matrices):
            return self.matrices[i]
        return None

    def term(self, d: int) -> list[str]:
        m = self.matrix(d)
        return list(m.col_labels) if m is not None else []

    def multiplicities(self) -> dict[int, Counter]:
        table = {}
        for d in self.degrees:
            counts = Counter(self.term(d))
            if counts:
                table[d] = counts
        return table

    def total_summands(self) -> int:
        return sum(m.ncols for m in self.matrices)

    def copy(self) -> "InjectiveComplex":
        return InjectiveComplex(
            self.poset, self.field, [m.copy() for m in self.matrices], self.degree_offset
        )

    def shifted(self, k: int) -> "InjectiveComplex":
        """Degree shift: term(d) of the result equals term(d + k) of self."""
        return InjectiveComplex(self.poset, self.field, self.matrices, self.degree_offset - k)

    def trimmed(self) -> "InjectiveComplex":
        ms = list(self.matrices)
        off = self.degree_offset
        while ms and ms[0].ncols == 0:
            head = ms.pop(0)
            off += 1
            if not ms and head.row_labels:
                ms = [LabeledMatrix(self.poset, self.field, head.row_labels)]
        while ms and ms[-1].ncols == 0 and ms[-1].nrows == 0:
            ms.pop()
        if not ms:
            return InjectiveComplex.empty(self.poset, self.field)
        return InjectiveComplex(self.poset, self.field, ms, off)

    def validate(self) -> "ValidationReport":
        issues = []
        for d, m in zip(self.degrees, self.matrices):
            for msg in m.validate():
                issues.append(f"matrix at degree {d}: {msg}")
            if m.poset is not self.poset and m.poset != self.poset:
                issues.append(f"matrix at degree {d} bound to a different poset")
            if m.field != self.field:
                issues.append(f"matrix at degree {d} over a different field")
        for i in range(len(self.matrices) - 1):
            a, b = self.matrices[i], self.matrices[i + 1]
            if a.row_labels != b.col_labels:
                issues.append(
                    f"rows of degree {self.degree_offset + i} do not match columns of "
                    f"degree {self.degree_offset + i + 1}"
                )
            elif not b.multiply(a).is_zero():
                issues.append(
                    f"composition at degree {self.degree_offset + i} is nonzero"
                )
        if self.matrices and self.matrices[-1].nrows:
            issues.append("last matrix has rows; complex is not closed off")
        return ValidationReport(issues)

    def __eq__(self, other):
        return (
            isinstance(other, InjectiveComplex)
            and other.field == self.field
            and other.degree_offset == self.degree_offset
            and other.matrices == self.matrices
            and other.poset == self.poset
        )


class ValidationReport:
    def __init__(self, issues):
        self.issues = list(issues)

    @property
    def ok(self) -> bool:
        return not self.issues

    @property
    def first_violation(self) -> str | None:
        return self.issues[0] if self.issues else None

    def raise_if_failed(self):
        if self.issues:
            raise InputError("; ".join(self.issues))

    def __bool__(self):
        return self.ok

    def __repr__(self):
        return "ValidationReport(ok)" if self.ok else f"ValidationReport({self.issues!r})"
