"""Sheaves of finite-dimensional GF(p) vector spaces on a finite poset.

Restriction matrices are stored only on cover relations; a general
restriction is composed along one canonical cover path (well defined by
functoriality, which `validate` checks).  The minimal injective hull follows
the maximal-vector construction.
"""

from __future__ import annotations

from . import linalg
from .errors import InputError
from .field import PrimeField
from .matrix import InjectiveComplex, ValidationReport
from .poset import Poset


class Sheaf:
    def __init__(self, poset: Poset, field: PrimeField, stalk_dim: dict, restriction: dict):
        """`restriction` maps cover pairs (a, b) to dim F(b) x dim F(a) matrices.

        Missing covers default to zero matrices.
        """
        self.poset = poset
        self.field = field
        self.stalk_dim = {e: int(stalk_dim.get(e, 0)) for e in poset.elements}
        p = field.p
        self.restriction = {}
        for a, b in poset.covers:
            mat = restriction.get((a, b))
            if mat is None:
                mat = linalg.zeros(self.stalk_dim[b], self.stalk_dim[a])
            else:
                mat = [[x % p for x in row] for row in mat]
                if len(mat) != self.stalk_dim[b] or any(
                    len(row) != self.stalk_dim[a] for row in mat
                ):
                    raise InputError(
                        f"restriction {a}<{b} has shape "
                        f"{len(mat)}x{len(mat[0]) if mat else 0}, expected "
                        f"{self.stalk_dim[b]}x{self.stalk_dim[a]}"
                    )
            self.restriction[(a, b)] = mat
        for key in restriction:
            if key not in self.restriction:
                raise InputError(f"restriction given for non-cover pair {key}")
        self._map_cache: dict[tuple[str, str], list[list[int]]] = {}

    @classmethod
    def constant(cls, poset: Poset, field: PrimeField) -> "Sheaf":
        return cls(
            poset,
            field,
            {e: 1 for e in poset.elements},
            {cov: [[1]] for cov in poset.covers},
        )

    @classmethod
    def injective(cls, poset: Poset, field: PrimeField, multiplicities: dict) -> "Sheaf":
        """The direct sum of indecomposables with the given label multiplicities."""
        summands = []
        for lab in poset.elements:
            summands += [lab] * int(multiplicities.get(lab, 0))
        dims = {
            e: sum(1 for lab in summands if poset.leq(e, lab)) for e in poset.elements
        }
        restriction = {}
        for a, b in poset.covers:
            above_a = [lab for lab in summands if poset.leq(a, lab)]
            above_b = {lab_i for lab_i, lab in enumerate(above_a) if poset.leq(b, lab)}
            mat = linalg.zeros(dims[b], dims[a])
            r = 0
            for i, lab in enumerate(above_a):
                if i in above_b:
                    mat[r][i] = 1
                    r += 1
            restriction[(a, b)] = mat
        return cls(poset, field, dims, restriction)

    def restriction_map(self, a: str, b: str) -> list[list[int]]:
        """F(a <= b), composing cover restrictions along one canonical path."""
        if a == b:
            return linalg.identity(self.stalk_dim[a])
        key = (a, b)
        cached = self._map_cache.get(key)
        if cached is not None:
            return cached
        if not self.poset.leq(a, b):
            raise InputError(f"{a} is not below {b}")
        step = next(
            t for (s, t) in self.poset.covers if s == a and self.poset.leq(t, b)
        )
        mat = self.restriction[(a, step)]
        if step != b:
            mat = linalg.matmul(self.field, self.restriction_map(step, b), mat)
        self._map_cache[key] = mat
        return mat

    def validate(self) -> ValidationReport:
        """Functoriality across all length-2 cover paths; first failing triple wins."""
        covers_from: dict[str, list[str]] = {}
        for a, b in self.poset.covers:
            covers_from.setdefault(a, []).append(b)
        for a in self.poset.elements:
            seen: dict[str, tuple[str, list[list[int]]]] = {}
            for b in covers_from.get(a, []):
                for c in covers_from.get(b, []):
                    composite = linalg.matmul(
                        self.field, self.restriction[(b, c)], self.restriction[(a, b)]
                    )
                    if c in seen:
                        b0, reference = seen[c]
                        if reference != composite:
                            return ValidationReport(
                                [
                                    f"functoriality fails between {a} and {c}: paths via "
                                    f"{b0} and {b} disagree"
                                ]
                            )
                    else:
                        seen[c] = (b, composite)
        return ValidationReport([])

    def maximal_vectors(self, element: str) -> list[list[int]]:
        """Row basis of M_F(pi) = intersection of cover-restriction kernels."""
        if element not in self.poset.index:
            raise InputError(f"unknown element {element!r}")
        stacked = []
        for a, b in self.poset.covers:
            if a == element:
                stacked += self.restriction[(a, b)]
        if not stacked:
            return linalg.identity(self.stalk_dim[element])
        return linalg.nullspace(self.field, stacked, ncols=self.stalk_dim[element])

    def support(self) -> list[str]:
        return [e for e in self.poset.elements if self.stalk_dim[e]]


class NaturalTransformation:
    """A componentwise linear map between two sheaves on the same poset."""

    def __init__(self, source: Sheaf, target: Sheaf, components: dict):
        if source.poset != target.poset:
            raise InputError("source and target live on different posets")
        self.source = source
        self.target = target
        p = source.field.p
        self.components = {}
        for e in source.poset.elements:
            mat = components.get(e)
            if mat is None:
                mat = linalg.zeros(target.stalk_dim[e], source.stalk_dim[e])
            else:
                mat = [[x % p for x in row] for row in mat]
            self.components[e] = mat

    def validate(self) -> ValidationReport:
        issues = []
        field = self.source.field
        for a, b in self.source.poset.covers:
            left = linalg.matmul(field, self.target.restriction[(a, b)], self.components[a])
            right = linalg.matmul(field, self.components[b], self.source.restriction[(a, b)])
            if left != right:
                issues.append(f"naturality square fails on {a} < {b}")
        return ValidationReport(issues)

    def is_injective(self) -> bool:
        field = self.source.field
        return all(
            linalg.rank(field, self.components[e]) == self.source.stalk_dim[e]
            for e in self.source.poset.elements
        )


def constant_sheaf(poset: Poset, field: PrimeField | None = None) -> Sheaf:
    return Sheaf.constant(poset, field or PrimeField(2))


def injective_hull(sheaf: Sheaf) -> tuple[NaturalTransformation, InjectiveComplex]:
    """Minimal injective hull F -> I0 = sum over pi of [pi]^{dim M_F(pi)}.

    Returns the inclusion as a natural transformation into the hull
    (materialized as a sheaf) and the one-term complex on the hull's labels.
    """
    sheaf.validate().raise_if_failed()
    poset, field = sheaf.poset, sheaf.field
    maximal = {e: sheaf.maximal_vectors(e) for e in poset.elements}
    hull_mult = {e: len(maximal[e]) for e in poset.elements}
    hull = Sheaf.injective(poset, field, hull_mult)
    projections = {e: _maximal_projection(field, maximal[e], sheaf.stalk_dim[e])
                   for e in poset.elements}
    components = {}
    for sigma in poset.elements:
        blocks = []
        for tau in poset.elements:
            if hull_mult[tau] and poset.leq(sigma, tau):
                blocks += linalg.matmul(
                    field, projections[tau], sheaf.restriction_map(sigma, tau)
                )
        components[sigma] = blocks or linalg.zeros(0, sheaf.stalk_dim[sigma])
    alpha = NaturalTransformation(sheaf, hull, components)
    seed_labels = [lab for lab in poset.elements for _ in range(hull_mult[lab])]
    seed = InjectiveComplex.single_term(poset, field, seed_labels)
    return alpha, seed


def _maximal_projection(field, max_basis, dim):
    """Projection matrix onto M_F(tau) coordinates, in a basis completing the
    row-reduced maximal basis (the non-maximal part maps to 0)."""
    if not max_basis:
        return linalg.zeros(0, dim)
    full = linalg.complete_basis(field, max_basis, dim)
    inv = linalg.inverse(field, linalg.transpose(full))
    return inv[: len(max_basis)]


def hom_dim_injective(i_decomposition: dict, j_decomposition: dict, poset: Poset) -> int:
    """dim Hom(I, J) for injectives given as label -> multiplicity tables."""
    total = 0
    for pi, p_mult in i_decomposition.items():
        for sigma, s_mult in j_decomposition.items():
            if poset.leq(sigma, pi):
                total += p_mult * s_mult
    return total
