import random
from itertools import combinations

import pytest

from posheaf.errors import InputError, OperationNotAllowed
from posheaf.matrix import (
    IncrementalRowBasis,
    InjectiveComplex,
    LabeledMatrix,
    col_op,
    image_complement_rows,
    row_op,
)
from posheaf.poset import SimplicialComplex

from conftest import GF2, GF3, random_labeled_matrix, random_poset


@pytest.fixture(scope="module")
def tetra_matrices():
    """Tetrahedron on vertices 1..4 with explicit hand-written differentials."""
    sc = SimplicialComplex.from_facets(combinations("1234", 3))
    poset = sc.face_poset
    eta0 = LabeledMatrix(poset, GF2, ["234", "134", "124", "123"])
    for lab, entries in [
        ("34", {0: 1, 1: 1}),
        ("24", {0: 1, 2: 1}),
        ("23", {0: 1, 3: 1}),
        ("14", {1: 1, 2: 1}),
        ("13", {1: 1, 3: 1}),
        ("12", {2: 1, 3: 1}),
    ]:
        eta0.add_row(lab, entries)
    eta1 = LabeledMatrix(poset, GF2, ["34", "24", "23", "14", "13", "12"])
    for lab, entries in [
        ("4", {0: 1, 1: 1, 3: 1}),
        ("3", {0: 1, 2: 1, 4: 1}),
        ("2", {1: 1, 2: 1, 5: 1}),
        ("1", {3: 1, 4: 1, 5: 1}),
    ]:
        eta1.add_row(lab, entries)
    eta2 = LabeledMatrix(poset, GF2, ["4", "3", "2", "1"])
    return poset, eta0, eta1, eta2


class TestSubmatrix:
    def test_empty(self, tetra_matrices):
        poset, eta0, _, _ = tetra_matrices
        sub = eta0.submatrix(set(), set())
        assert sub.nrows == 0 and sub.ncols == 0

    def test_full(self, tetra_matrices):
        poset, eta0, _, _ = tetra_matrices
        assert eta0.submatrix(poset.elements, poset.elements) == eta0

    def test_star_block_is_stalk(self, tetra_matrices):
        poset, eta0, _, _ = tetra_matrices
        stalk = eta0.stalk_matrix("12")
        assert stalk == [[1, 1]]  # one row (12), columns 124, 123

    def test_star_complement_block_vanishes(self):
        rng = random.Random(2)
        for _ in range(40):
            p = random_poset(rng)
            m = random_labeled_matrix(rng, p, GF3)
            tau = rng.choice(p.elements)
            star = p.star(tau)
            rest = set(p.elements) - star
            assert m.submatrix(star, rest).is_zero()


class TestMultiply:
    def test_multiply_by_zero(self, tetra_matrices):
        poset, eta0, eta1, _ = tetra_matrices
        zero = LabeledMatrix(poset, GF2, eta1.row_labels)
        zero.add_row("1", {})
        assert zero.multiply(eta1).is_zero()

    def test_known_compositions_vanish(self, tetra_matrices):
        _, eta0, eta1, _ = tetra_matrices
        assert eta1.multiply(eta0).is_zero()

    def test_label_mismatch(self, tetra_matrices):
        poset, eta0, eta1, _ = tetra_matrices
        with pytest.raises(InputError):
            eta0.multiply(eta1)

    def test_stalk_restriction_property(self):
        rng = random.Random(9)

        def dense_mult(field, a, b, b_ncols):
            out = [[0] * b_ncols for _ in a]
            for i, row in enumerate(a):
                for k, v in enumerate(row):
                    if v:
                        for j in range(b_ncols):
                            out[i][j] = (out[i][j] + v * b[k][j]) % field.p
            return out

        cases = 0
        while cases < 200:
            p = random_poset(rng)
            field = rng.choice((GF2, GF3))
            m = random_labeled_matrix(rng, p, field)
            n = LabeledMatrix(p, field, list(m.row_labels))
            for lab in (rng.choice(p.elements) for _ in range(rng.randint(0, 3))):
                entries = {
                    j: rng.randint(1, field.p - 1)
                    for j, col in enumerate(n.col_labels)
                    if p.leq(lab, col) and rng.random() < 0.7
                }
                n.add_row(lab, entries)
            product = n.multiply(m)
            assert not product.validate()
            tau = rng.choice(p.elements)
            expected = dense_mult(
                field,
                n.stalk_matrix(tau),
                m.stalk_matrix(tau),
                len(m.stalk_col_indices(tau)),
            )
            assert product.stalk_matrix(tau) == expected
            cases += 1


class TestRank:
    def test_zero_matrix(self, tetra_matrices):
        poset, _, _, eta2 = tetra_matrices
        m = LabeledMatrix(poset, GF2, ["123"])
        m.add_row("1", {})
        assert m.rank() == 0

    def test_tetra_matrices_rank(self, tetra_matrices):
        _, eta0, eta1, _ = tetra_matrices
        assert eta0.rank() == 3
        assert eta1.rank() == 3

    def test_star_example_rank(self, simplex_star):
        # eta^0 of the 4-simplex example, rows as printed (8x6, signs mod 2)
        eta0 = LabeledMatrix(simplex_star, GF2, ["234", "235", "245", "345", "6", "7"])
        rows = [
            ("23", {0: 1, 1: 1}),
            ("24", {0: 1, 2: 1}),
            ("25", {1: 1, 2: 1}),
            ("34", {0: 1, 3: 1}),
            ("35", {1: 1, 3: 1}),
            ("45", {2: 1, 3: 1}),
            ("∅", {3: 1, 4: 1}),
            ("∅", {4: 1, 5: 1}),
        ]
        for lab, entries in rows:
            eta0.add_row(lab, entries)
        assert eta0.rank() == 5


class TestImageComplement:
    def test_identity(self):
        rows = [{0: 1}, {1: 1}]
        assert image_complement_rows(GF2, rows) == []

    def test_ones_column(self):
        # the map k -> k^2 with matrix (1, 1)^T: complement generated by (1, 1)
        rows = [{0: 1}, {0: 1}]
        basis = image_complement_rows(GF2, rows)
        assert basis == [{0: 1, 1: 1}]

    def test_zero_map(self):
        rows = [{}, {}, {}]
        basis = image_complement_rows(GF3, rows)
        assert basis == [{0: 1}, {1: 1}, {2: 1}]

    def test_spans_left_kernel(self):
        rng = random.Random(21)
        from posheaf.linalg import rank as dense_rank

        for _ in range(60):
            field = rng.choice((GF2, GF3))
            nrows = rng.randint(0, 5)
            ncols = rng.randint(0, 4)
            rows = [
                {
                    j: rng.randint(1, field.p - 1)
                    for j in range(ncols)
                    if rng.random() < 0.5
                }
                for _ in range(nrows)
            ]
            rows = [{j: v for j, v in r.items() if v} for r in rows]
            basis = image_complement_rows(field, rows)
            dense = [[r.get(j, 0) for j in range(ncols)] for r in rows]
            r = dense_rank(field, dense)
            assert len(basis) == nrows - r
            for vec in basis:
                for j in range(ncols):
                    dot = sum(vec.get(i, 0) * dense[i][j] for i in range(nrows))
                    assert dot % field.p == 0


class TestRowColOps:
    def test_swap_always_legal(self, tetra_matrices):
        _, eta0, _, _ = tetra_matrices
        swapped = row_op(eta0, "swap", 0, 1)
        assert swapped.row_labels[0] == "24" and swapped.row_labels[1] == "34"

    def test_illegal_row_add(self, simplex_star):
        m = LabeledMatrix(simplex_star, GF2, ["234"])
        m.add_row("∅", {0: 1})
        m.add_row("23", {0: 1})
        # adding the bottom-labeled row into the 23-labeled row is not allowed
        with pytest.raises(OperationNotAllowed):
            row_op(m, "add", 1, 0)

    def test_legal_row_add_downward(self, simplex_star):
        m = LabeledMatrix(simplex_star, GF2, ["234"])
        m.add_row("234", {0: 1})
        m.add_row("23", {0: 1})
        added = row_op(m, "add", 1, 0)  # row labeled 234 into row labeled 23
        assert added.rows[1] == {}

    def test_ops_invertible(self):
        rng = random.Random(31)
        from posheaf.matrix import ColAdd, ColScale, ColSwap, RowAdd, RowScale, RowSwap

        for _ in range(60):
            p = random_poset(rng)
            field = rng.choice((GF2, GF3))
            m = random_labeled_matrix(rng, p, field, max_cols=4, max_rows=4)
            ops = []
            if m.nrows >= 2:
                pairs = [
                    (i, j)
                    for i in range(m.nrows)
                    for j in range(m.nrows)
                    if i != j and p.leq(m.row_labels[j], m.row_labels[i])
                ]
                if pairs:
                    src, dest = rng.choice(pairs)
                    ops.append(RowAdd(src=src, dest=dest, scalar=rng.randint(1, field.p - 1)))
                ops.append(RowSwap(0, m.nrows - 1))
            if m.nrows:
                ops.append(RowScale(0, rng.randint(1, field.p - 1)))
            if m.ncols >= 2:
                pairs = [
                    (i, j)
                    for i in range(m.ncols)
                    for j in range(m.ncols)
                    if i != j and p.leq(m.col_labels[i], m.col_labels[j])
                ]
                if pairs:
                    src, dest = rng.choice(pairs)
                    ops.append(ColAdd(src=src, dest=dest, scalar=rng.randint(1, field.p - 1)))
                ops.append(ColSwap(0, m.ncols - 1))
            ops.append(ColScale(0, rng.randint(1, field.p - 1)))
            current = m
            for op in ops:
                stepped = current.apply_op(op)
                back = stepped.apply_op(op.inverse(field))
                assert back == current
                current = stepped


class TestValidateComplex:
    def test_empty_valid(self, tetra_matrices):
        poset, _, _, _ = tetra_matrices
        assert InjectiveComplex.empty(poset, GF2).validate().ok

    def test_known_complex_valid(self, tetra_matrices):
        poset, eta0, eta1, eta2 = tetra_matrices
        complex_ = InjectiveComplex(poset, GF2, [eta0, eta1, eta2])
        assert complex_.validate().ok

    def test_flipped_entry_reported(self, tetra_matrices):
        poset, eta0, eta1, eta2 = tetra_matrices
        broken = eta1.copy()
        del broken.rows[0][0]  # drop a legal entry: composition no longer zero
        report = InjectiveComplex(poset, GF2, [eta0, broken, eta2]).validate()
        assert not report.ok
        assert "composition" in report.first_violation

    def test_mismatched_labels_reported(self, tetra_matrices):
        poset, eta0, eta1, eta2 = tetra_matrices
        shuffled = eta1.copy()
        shuffled.col_labels = list(reversed(shuffled.col_labels))
        report = InjectiveComplex(poset, GF2, [eta0, shuffled, eta2]).validate()
        assert not report.ok

    def test_label_order_violation_reported(self, tetra_matrices):
        poset, eta0, _, _ = tetra_matrices
        bad = eta0.copy()
        bad.rows[0][2] = 1  # row 34 against column 124: 34 is not below 124
        assert any("not ordered" in msg for msg in bad.validate())


class TestRendering:
    def test_round_trip_json(self, tetra_matrices):
        import json

        from posheaf.io import complex_from_json, complex_to_json, dumps

        poset, eta0, eta1, eta2 = tetra_matrices
        complex_ = InjectiveComplex(poset, GF2, [eta0, eta1, eta2])
        data = json.loads(dumps(complex_to_json(complex_)))
        again = complex_from_json(data)
        assert again == complex_

    def test_text_layout(self, tetra_matrices):
        _, eta0, _, _ = tetra_matrices
        text = eta0.print_text("eta0")
        lines = text.splitlines()
        assert lines[0].split() == ["eta0", "234", "134", "124", "123"]
        assert lines[1].split() == ["34", "1", "1", "·", "·"]
