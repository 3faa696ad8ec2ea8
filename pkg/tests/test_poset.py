import random
from itertools import combinations

import pytest

from posheaf.errors import InputError
from posheaf.poset import (
    LocallyClosedSet,
    MonotoneMap,
    Poset,
    SimplicialComplex,
    chain_tuple,
    face_name,
    mapping_cylinder,
    order_complex,
    signed_incidence,
    skeleton_of_simplex,
    star_subposet,
)

from conftest import random_poset


def brute_star(complex_, face):
    """Oracle: supersets by direct enumeration."""
    base = complex_.face_of[face]
    return {name for name, f in complex_.face_of.items() if base <= f}


def brute_closure(poset, members):
    return {e for e in poset.elements if any(poset.leq(e, s) for s in members)}


class TestFromFacets:
    def test_path_graph(self):
        sc = SimplicialComplex.from_facets([[0, 1], [1, 2]])
        assert sorted(sc.face_poset.elements) == ["0", "01", "1", "12", "2"]
        assert sc.face_poset.height == 1

    def test_tetrahedron_skeleton(self):
        sc = SimplicialComplex.from_facets(combinations("0123", 3))
        assert len(sc.faces) == 14
        assert sc.face_poset.height == 2

    def test_extra_edges_complex(self):
        facets = ["".join(c) for c in combinations("01234", 4)] + ["15", "16"]
        sc = SimplicialComplex.from_facets(facets)
        # 5 + 2 vertices, 10 + 2 edges, 10 triangles, 5 tetrahedra
        assert len(sc.faces) == 7 + 12 + 10 + 5
        assert "15" in sc.face_poset.index and "16" in sc.face_poset.index

    def test_empty_facet_rejected(self):
        with pytest.raises(InputError):
            SimplicialComplex.from_facets([[]])

    def test_deterministic_order(self):
        sc = SimplicialComplex.from_facets(["21", "13"])
        dims = [sc.dim(e) for e in sc.face_poset.elements]
        assert dims == sorted(dims)


class TestStarClosure:
    def test_star_of_maximal(self, tetra):
        assert tetra.face_poset.star("123") == {"123"}

    def test_star_of_edge(self):
        sc = SimplicialComplex.from_facets(combinations("1234", 3))
        assert sc.face_poset.star("12") == brute_star(sc, "12") == {"12", "123", "124"}

    def test_star_matches_superset_enumeration(self):
        facets = ["".join(c) for c in combinations("01234", 4)] + ["15", "16"]
        sc = SimplicialComplex.from_facets(facets)
        for face in ("4", "1", "15", "012"):
            assert sc.face_poset.star(face) == brute_star(sc, face)
        assert sc.face_poset.star("4") == {
            "4", "04", "14", "24", "34",
            "014", "024", "034", "124", "134", "234",
            "0124", "0134", "0234", "1234",
        }

    def test_closure_single_min(self):
        p = Poset.from_covers(["a", "b"], [("a", "b")])
        assert p.closure(["a"]) == {"a"}

    def test_closure_sphere_pair(self, sphere_wedge):
        lam = sphere_wedge["lambda"].face_poset
        assert lam.closure(["4", "24"]) == {"4", "24", "2"}

    def test_closure_everything(self, tetra):
        p = tetra.face_poset
        assert p.closure(p.elements) == set(p.elements)

    def test_star_closure_random(self):
        rng = random.Random(7)
        for _ in range(25):
            p = random_poset(rng)
            e = rng.choice(p.elements)
            star = p.star(e)
            assert p.closure(star) >= star
            assert p.closure(star) & star == star
            members = set(rng.sample(p.elements, rng.randint(1, len(p))))
            assert p.closure(members) == brute_closure(p, members)
            assert p.closure(p.closure(members)) == p.closure(members)


class TestLocallyClosed:
    def test_singleton(self, tetra):
        assert tetra.face_poset.is_locally_closed({"12"})

    def test_sphere_pair(self, sphere_wedge):
        assert sphere_wedge["lambda"].face_poset.is_locally_closed({"4", "24"})

    def test_gap_is_not_convex(self, tetra):
        # 01 sits strictly between 0 and 012 but is excluded
        assert not tetra.face_poset.is_locally_closed({"0", "012"})

    def test_construct_rejects_non_convex(self, tetra):
        with pytest.raises(InputError):
            LocallyClosedSet(tetra.face_poset, {"0", "012"})

    def test_matches_open_in_closure(self):
        rng = random.Random(13)
        for _ in range(30):
            p = random_poset(rng)
            members = set(rng.sample(p.elements, rng.randint(1, len(p))))
            closure = p.closure(members)
            sub = p.restrict(closure)
            assert p.is_locally_closed(members) == sub.is_open(members)


class TestLinearExtension:
    def test_topological(self):
        rng = random.Random(5)
        for _ in range(20):
            p = random_poset(rng)
            assert not p.validate()
            pos = {e: i for i, e in enumerate(p.linear_extension)}
            for a, b in p.covers:
                assert pos[a] < pos[b]

    def test_height(self, tetra):
        assert tetra.face_poset.height == 2

    def test_antisymmetry_rejected(self):
        with pytest.raises(InputError):
            Poset.from_covers(["a", "b"], [("a", "b"), ("b", "a")])


class TestMappingCylinder:
    def test_collapse_to_point(self, tetra):
        point = Poset.from_covers(["pt"], [])
        f = MonotoneMap.constant(tetra.face_poset, point, "pt")
        cyl, inc_src, inc_tgt = mapping_cylinder(f)
        assert len(cyl) == len(tetra.face_poset) + 1
        top = inc_tgt("pt")
        assert all(cyl.leq(inc_src(e), top) for e in tetra.face_poset.elements)

    def test_identity_doubles(self):
        p = Poset.from_covers(["a", "b"], [("a", "b")])
        cyl, inc_src, inc_tgt = mapping_cylinder(MonotoneMap.identity(p))
        assert len(cyl) == 4
        for e in p.elements:
            assert cyl.leq(inc_src(e), inc_tgt(e))

    def test_star_union_lemma(self):
        # poset Pi = (a <= b, c), Lambda = diamond a'<=b',c'<=d'
        pi = Poset.from_covers(["a", "b", "c"], [("a", "b"), ("a", "c")])
        lam = Poset.from_covers(
            ["a'", "b'", "c'", "d'"],
            [("a'", "b'"), ("a'", "c'"), ("b'", "d'"), ("c'", "d'")],
        )
        f = MonotoneMap(pi, lam, {"a": "a'", "b": "b'", "c": "c'"})
        cyl, inc_src, inc_tgt = mapping_cylinder(f)
        star_a = cyl.star(inc_src("a"))
        assert star_a == {inc_src(x) for x in ("a", "b", "c")} | {
            inc_tgt(x) for x in ("a'", "b'", "c'", "d'")
        }

    def test_star_union_random(self):
        rng = random.Random(23)
        from conftest import random_monotone_map

        for _ in range(20):
            src = random_poset(rng, 6)
            tgt = random_poset(rng, 6)
            f = random_monotone_map(rng, src, tgt)
            if f is None:
                continue
            cyl, inc_src, inc_tgt = mapping_cylinder(f)
            for e in src.elements:
                expected = {inc_src(x) for x in src.star(e)} | {
                    inc_tgt(x) for x in tgt.star(f(e))
                }
                assert cyl.star(inc_src(e)) == expected

    def test_name_collision_renamed(self):
        p = Poset.from_covers(["a"], [])
        f = MonotoneMap.identity(p)
        cyl, inc_src, inc_tgt = mapping_cylinder(f)
        assert inc_src("a") != inc_tgt("a")
        assert len(set(cyl.elements)) == 2


class TestOrderComplex:
    def test_point(self):
        p = Poset.from_covers(["x"], [])
        k, t = order_complex(p)
        assert len(k.faces) == 1
        assert t("x") == "x"

    def test_chain(self):
        p = Poset.from_covers(["a", "b"], [("a", "b")])
        k, t = order_complex(p)
        assert {face_name(f) for f in k.faces} == {"a", "b", "ab"}
        assert t("ab") == "b"

    def test_tetra_subdivision_counts(self, tetra):
        k, t = order_complex(tetra.face_poset)
        by_dim = {}
        for f in k.faces:
            by_dim[len(f) - 1] = by_dim.get(len(f) - 1, 0) + 1
        assert by_dim == {0: 14, 1: 36, 2: 24}
        # terminal map is order preserving and hits top simplices
        for f in k.faces:
            chain = chain_tuple(tetra.face_poset, f)
            assert t(k.name_of[f]) == chain[-1]

    def test_maximal_chains_are_top_simplices(self):
        rng = random.Random(3)
        for _ in range(10):
            p = random_poset(rng, 6)
            k, _ = order_complex(p)
            top = {frozenset(f) for f in k.faces if len(f) - 1 == p.height}
            assert top, "every poset has a maximal chain"


class TestSignedIncidence:
    def test_drop_middle(self):
        p = Poset.from_covers(["a", "b", "c"], [("a", "b"), ("b", "c")])
        assert signed_incidence(p, ("a", "c"), ("a", "b", "c")) == -1

    def test_unrelated(self):
        p = Poset.from_covers(["a", "b", "c"], [("a", "b"), ("b", "c")])
        assert signed_incidence(p, ("a",), ("b", "c")) == 0

    def test_double_composition_vanishes(self):
        rng = random.Random(11)
        posets = [random_poset(rng, 8) for _ in range(6)]
        tetra = skeleton_of_simplex(3, 2).face_poset
        posets.append(tetra)
        for p in posets:
            k, _ = order_complex(p)
            chains = [chain_tuple(p, f) for f in k.faces]
            for sigma in chains:
                for gamma in chains:
                    if len(gamma) != len(sigma) + 2:
                        continue
                    total = sum(
                        signed_incidence(p, sigma, tau) * signed_incidence(p, tau, gamma)
                        for tau in chains
                        if len(tau) == len(sigma) + 1
                    )
                    assert total == 0


class TestStarSubposet:
    def test_relabeled_star(self, simplex_star):
        assert len(simplex_star) == 17
        assert "∅" in simplex_star.index
        assert simplex_star.leq("∅", "234")
        assert simplex_star.star("4") == {"4", "24", "34", "45", "234", "245", "345"}

    def test_monotone_map_rejects_non_monotone(self):
        p = Poset.from_covers(["a", "b"], [("a", "b")])
        q = Poset.from_covers(["x", "y"], [("x", "y")])
        with pytest.raises(InputError):
            MonotoneMap(p, q, {"a": "y", "b": "x"})
