"""Finite posets with the Alexandrov topology, simplicial complexes as face
posets, monotone maps, locally closed subsets, mapping cylinders and order
complexes.

Elements are opaque strings.  Reachability is precomputed once as per-element
up-set bitsets (python ints), which makes `star`, `closure` and submatrix
extraction cheap; everything is immutable after construction.
"""

from __future__ import annotations

from itertools import combinations

from .errors import InputError


class Poset:
    """A finite poset.

    Attributes
    ----------
    elements : list[str]
        element ids in input order (dense indices = list positions)
    covers : list[tuple[str, str]]
        pairs (a, b) with a covered by b
    linear_extension : list[str]
        deterministic topological order: sorted by (longest chain strictly
        below, input position)
    height : int
        longest chain length (number of strict steps)
    """

    def __init__(self, elements, leq_bits, covers):
        self.elements = list(elements)
        self.index = {e: i for i, e in enumerate(self.elements)}
        if len(self.index) != len(self.elements):
            raise InputError("duplicate element ids")
        self._up = leq_bits  # up[i] = bitset of {j : elements[i] <= elements[j]}
        self.covers = covers
        self._down = [0] * len(self.elements)
        for i in range(len(self.elements)):
            bits = self._up[i]
            while bits:
                low = bits & -bits
                self._down[low.bit_length() - 1] |= 1 << i
                bits ^= low
        self._height_below = self._compute_heights()
        order = sorted(range(len(self.elements)), key=lambda i: (self._height_below[i], i))
        self.linear_extension = [self.elements[i] for i in order]
        self.height = max(self._height_below, default=0)

    # -- construction -------------------------------------------------------

    @classmethod
    def from_covers(cls, elements, covers) -> "Poset":
        elements = list(elements)
        index = {e: i for i, e in enumerate(elements)}
        if len(index) != len(elements):
            raise InputError("duplicate element ids")
        n = len(elements)
        up = [1 << i for i in range(n)]
        cover_pairs = []
        succ = [[] for _ in range(n)]
        for a, b in covers:
            if a not in index or b not in index:
                raise InputError(f"cover ({a}, {b}) uses unknown element")
            if a == b:
                raise InputError(f"cover ({a}, {b}) is reflexive")
            succ[index[a]].append(index[b])
            cover_pairs.append((a, b))
        # transitive closure in reverse topological attempt; iterate to fixpoint
        changed = True
        while changed:
            changed = False
            for i in range(n):
                acc = up[i]
                for j in succ[i]:
                    acc |= up[j]
                if acc != up[i]:
                    up[i] = acc
                    changed = True
        for i in range(n):
            for j in range(n):
                if i != j and (up[i] >> j) & 1 and (up[j] >> i) & 1:
                    raise InputError(
                        f"relation is not antisymmetric: {elements[i]} and {elements[j]}"
                    )
        return cls(elements, up, cover_pairs)

    @classmethod
    def from_leq_pairs(cls, elements, leq_pairs) -> "Poset":
        """Build from an arbitrary relation; reflexive-transitive closure is taken."""
        elements = list(elements)
        index = {e: i for i, e in enumerate(elements)}
        if len(index) != len(elements):
            raise InputError("duplicate element ids")
        n = len(elements)
        up = [1 << i for i in range(n)]
        for a, b in leq_pairs:
            if a not in index or b not in index:
                raise InputError(f"relation ({a}, {b}) uses unknown element")
            up[index[a]] |= 1 << index[b]
        changed = True
        while changed:
            changed = False
            for i in range(n):
                acc = up[i]
                bits = up[i]
                while bits:
                    low = bits & -bits
                    acc |= up[low.bit_length() - 1]
                    bits ^= low
                if acc != up[i]:
                    up[i] = acc
                    changed = True
        for i in range(n):
            for j in range(i + 1, n):
                if (up[i] >> j) & 1 and (up[j] >> i) & 1:
                    raise InputError(
                        f"relation is not antisymmetric: {elements[i]} and {elements[j]}"
                    )
        covers = cls._covers_from_up(elements, up)
        return cls(elements, up, covers)

    @staticmethod
    def _covers_from_up(elements, up):
        n = len(elements)
        covers = []
        for i in range(n):
            strict = up[i] & ~(1 << i)
            for j in _bit_indices(strict):
                if not any(
                    (up[k] >> j) & 1 for k in _bit_indices(strict & ~(1 << j))
                ):
                    covers.append((elements[i], elements[j]))
        return covers

    def _compute_heights(self):
        n = len(self.elements)
        below = [0] * n
        order = sorted(range(n), key=lambda i: bin(self._down[i]).count("1"))
        for i in order:
            h = 0
            bits = self._down[i] & ~(1 << i)
            for j in _bit_indices(bits):
                h = max(h, below[j] + 1)
            below[i] = h
        return below

    # -- queries ------------------------------------------------------------

    def __len__(self):
        return len(self.elements)

    def __contains__(self, e):
        return e in self.index

    def __iter__(self):
        return iter(self.elements)

    def __eq__(self, other):
        return (
            isinstance(other, Poset)
            and other.elements == self.elements
            and other._up == self._up
        )

    def __hash__(self):
        return hash((tuple(self.elements), tuple(self._up)))

    def leq(self, a: str, b: str) -> bool:
        return (self._up[self.index[a]] >> self.index[b]) & 1 == 1

    def up_bits(self, e: str) -> int:
        return self._up[self.index[e]]

    def down_bits(self, e: str) -> int:
        return self._down[self.index[e]]

    def bits_of(self, members) -> int:
        bits = 0
        for e in members:
            bits |= 1 << self.index[e]
        return bits

    def elements_of(self, bits: int) -> list[str]:
        return [self.elements[i] for i in _bit_indices(bits)]

    def star(self, e: str) -> set[str]:
        """St e = {t : e <= t}; open in the Alexandrov topology."""
        if e not in self.index:
            raise InputError(f"unknown element {e!r}")
        return set(self.elements_of(self._up[self.index[e]]))

    def closure(self, members) -> set[str]:
        """Downward closure of a set of elements."""
        bits = 0
        for e in members:
            if e not in self.index:
                raise InputError(f"unknown element {e!r}")
            bits |= self._down[self.index[e]]
        return set(self.elements_of(bits))

    def star_of_set(self, members) -> set[str]:
        bits = 0
        for e in members:
            bits |= self._up[self.index[e]]
        return set(self.elements_of(bits))

    def is_locally_closed(self, members) -> bool:
        """True iff the set is order-convex (equivalently, open in its closure)."""
        mem = set(members)
        bits = self.bits_of(mem)
        for e in mem:
            i = self.index[e]
            # every element between e and an upper member must be a member
            above_members = self._up[i] & bits
            for j in _bit_indices(above_members):
                between = self._up[i] & self._down[j]
                if between & ~bits:
                    return False
        return True

    def maximal_elements(self) -> list[str]:
        return [e for e in self.elements if self._up[self.index[e]] == 1 << self.index[e]]

    def is_open(self, members) -> bool:
        bits = self.bits_of(members)
        return all(self._up[i] & ~bits == 0 for i in _bit_indices(bits))

    def opposite(self) -> "Poset":
        n = len(self.elements)
        up = [self._down[i] for i in range(n)]
        covers = [(b, a) for a, b in self.covers]
        return Poset(list(self.elements), up, covers)

    def restrict(self, members) -> "Poset":
        """Induced sub-poset on the given members (kept in ambient element order)."""
        mem = set(members)
        for e in mem:
            if e not in self.index:
                raise InputError(f"unknown element {e!r}")
        sub_elements = [e for e in self.elements if e in mem]
        pairs = [
            (a, b)
            for a in sub_elements
            for b in sub_elements
            if a != b and self.leq(a, b)
        ]
        return Poset.from_leq_pairs(sub_elements, pairs)

    def with_virtual_top(self, name: str | None = None) -> tuple["Poset", str]:
        """The poset with one extra element above everything (internal helper)."""
        top = name or "__top__"
        while top in self.index:
            top += "_"
        n = len(self.elements)
        up = [self._up[i] | (1 << n) for i in range(n)] + [1 << n]
        covers = list(self.covers) + [(m, top) for m in self.maximal_elements()]
        return Poset(self.elements + [top], up, covers), top

    def validate(self) -> list[str]:
        """Check the poset invariants; returns a list of violations (empty if ok)."""
        issues = []
        n = len(self.elements)
        for i in range(n):
            if not (self._up[i] >> i) & 1:
                issues.append(f"leq not reflexive at {self.elements[i]}")
        for i in range(n):
            for j in _bit_indices(self._up[i]):
                if self._up[j] & ~self._up[i]:
                    issues.append(
                        f"leq not transitive at {self.elements[i]} <= {self.elements[j]}"
                    )
        closure = Poset.from_leq_pairs(self.elements, self.covers)
        if closure._up != self._up:
            issues.append("covers do not generate leq")
        pos = {e: k for k, e in enumerate(self.linear_extension)}
        for a, b in self.covers:
            if pos[a] >= pos[b]:
                issues.append(f"linear extension violates {a} < {b}")
        return issues


def _bit_indices(bits: int):
    while bits:
        low = bits & -bits
        yield low.bit_length() - 1
        bits ^= low


# -- simplicial complexes ---------------------------------------------------


def _vertex_key(v: str):
    return (len(v), v)


def face_name(vertices) -> str:
    toks = sorted((str(v) for v in vertices), key=_vertex_key)
    if all(len(t) == 1 for t in toks):
        return "".join(toks)
    return ",".join(toks)


class SimplicialComplex:
    """An abstract simplicial complex together with its face poset.

    Faces are nonempty vertex sets; the face poset is ordered by inclusion and
    its elements are named by the sorted vertex tokens (e.g. ``013``).
    """

    def __init__(self, faces: list[frozenset]):
        self.faces = sorted(
            set(faces), key=lambda f: (len(f), tuple(sorted((str(v) for v in f), key=_vertex_key)))
        )
        for f in self.faces:
            if not f:
                raise InputError("empty face")
        self.vertices = sorted({str(v) for f in self.faces for v in f}, key=_vertex_key)
        self.name_of = {f: face_name(f) for f in self.faces}
        self.face_of = {name: f for f, name in self.name_of.items()}
        if len(self.face_of) != len(self.faces):
            raise InputError("face names collide; use distinct vertex ids")
        face_set = set(self.faces)
        covers = []
        for f in self.faces:
            if len(f) == 1:
                continue
            for v in sorted((str(x) for x in f), key=_vertex_key):
                sub = frozenset(x for x in f if str(x) != v)
                if sub not in face_set:
                    raise InputError(f"face {face_name(f)} is missing its subset {face_name(sub)}")
                covers.append((self.name_of[sub], self.name_of[f]))
        self.face_poset = Poset.from_covers([self.name_of[f] for f in self.faces], covers)

    @classmethod
    def from_facets(cls, facets) -> "SimplicialComplex":
        faces = set()
        for facet in facets:
            facet = frozenset(str(v) for v in facet)
            if not facet:
                raise InputError("empty facet")
            for k in range(1, len(facet) + 1):
                for sub in combinations(sorted(facet, key=_vertex_key), k):
                    faces.add(frozenset(sub))
        return cls(sorted(faces, key=lambda f: (len(f), tuple(sorted(f, key=_vertex_key)))))

    def dim(self, name: str) -> int:
        return len(self.face_of[name]) - 1

    def dimension(self) -> int:
        return max((len(f) - 1 for f in self.faces), default=-1)

    def simplices_of_dim(self, d: int) -> list[str]:
        return [self.name_of[f] for f in self.faces if len(f) == d + 1]


def skeleton_of_simplex(n: int, d: int) -> SimplicialComplex:
    """The d-skeleton of the n-simplex on vertices 0..n."""
    verts = [str(i) for i in range(n + 1)]
    return SimplicialComplex.from_facets(combinations(verts, min(d, n) + 1))


def star_subposet(complex_: SimplicialComplex, face: str, empty_name: str = "∅") -> Poset:
    """The star of a face as a poset, relabeled by dropping the face's vertices.

    The face itself becomes `empty_name`.  Matches the usual link-with-cone
    description of a star.
    """
    base = complex_.face_of[face]
    poset = complex_.face_poset
    members = sorted(poset.star(face), key=poset.index.__getitem__)

    def relabel(name):
        rest = complex_.face_of[name] - base
        return face_name(rest) if rest else empty_name

    new_names = {m: relabel(m) for m in members}
    pairs = [
        (new_names[a], new_names[b])
        for a in members
        for b in members
        if a != b and poset.leq(a, b)
    ]
    return Poset.from_leq_pairs([new_names[m] for m in members], pairs)


# -- monotone maps and cylinders --------------------------------------------


class MonotoneMap:
    """An order preserving map between posets, stored as an element dict."""

    def __init__(self, source: Poset, target: Poset, assignment: dict):
        self.source = source
        self.target = target
        self.assignment = dict(assignment)
        for e in source.elements:
            if e not in self.assignment:
                raise InputError(f"assignment missing element {e!r}")
            if self.assignment[e] not in target.index:
                raise InputError(f"assignment hits unknown target {self.assignment[e]!r}")
        for a, b in source.covers:
            if not target.leq(self.assignment[a], self.assignment[b]):
                raise InputError(
                    f"map is not order preserving on {a} < {b}: "
                    f"{self.assignment[a]} !<= {self.assignment[b]}"
                )

    def __call__(self, e: str) -> str:
        return self.assignment[e]

    @classmethod
    def identity(cls, poset: Poset) -> "MonotoneMap":
        return cls(poset, poset, {e: e for e in poset.elements})

    @classmethod
    def constant(cls, source: Poset, target: Poset, value: str) -> "MonotoneMap":
        return cls(source, target, {e: value for e in source.elements})

    @classmethod
    def inclusion(cls, source: Poset, target: Poset) -> "MonotoneMap":
        return cls(source, target, {e: e for e in source.elements})

    @classmethod
    def simplicial(
        cls, source: SimplicialComplex, target: SimplicialComplex, vertex_map: dict
    ) -> "MonotoneMap":
        """Extend a vertex map to the face posets; vertices not listed map to
        themselves."""
        vm = {str(k): str(v) for k, v in vertex_map.items()}
        assignment = {}
        for f in source.faces:
            image = frozenset(vm.get(str(v), str(v)) for v in f)
            name = face_name(image)
            if name not in target.face_poset.index:
                raise InputError(f"image face {name} not in target complex")
            assignment[source.name_of[f]] = name
        return cls(source.face_poset, target.face_poset, assignment)


class LocallyClosedSet:
    """An order-convex subset of an ambient poset."""

    def __init__(self, ambient: Poset, members):
        self.ambient = ambient
        self.members = frozenset(members)
        for e in self.members:
            if e not in ambient.index:
                raise InputError(f"unknown element {e!r}")
        if not ambient.is_locally_closed(self.members):
            raise InputError("set is not locally closed (order convexity fails)")

    def restricted_poset(self) -> Poset:
        return self.ambient.restrict(self.members)

    def closure(self) -> set[str]:
        return self.ambient.closure(self.members)

    def boundary(self) -> set[str]:
        return self.closure() - self.members


def mapping_cylinder(f: MonotoneMap) -> tuple[Poset, MonotoneMap, MonotoneMap]:
    """The mapping cylinder of f with the two inclusions (source, target).

    Elements keep their names; on a name collision between source and target
    the source copy is renamed.
    """
    src, tgt = f.source, f.target
    taken = set(tgt.elements)
    src_name = {}
    for e in src.elements:
        name = e
        while name in taken:
            name = name + "'"
        src_name[e] = name
        taken.add(name)
    elements = [src_name[e] for e in src.elements] + list(tgt.elements)
    pairs = [(src_name[a], src_name[b]) for a, b in src.covers]
    pairs += list(tgt.covers)
    pairs += [(src_name[e], f(e)) for e in src.elements]
    cyl = Poset.from_leq_pairs(elements, pairs)
    inc_src = MonotoneMap(src, cyl, src_name)
    inc_tgt = MonotoneMap(tgt, cyl, {e: e for e in tgt.elements})
    return cyl, inc_src, inc_tgt


# -- order complex ----------------------------------------------------------


def order_complex(poset: Poset) -> tuple[SimplicialComplex, MonotoneMap]:
    """The complex of strictly increasing chains, with the terminal-element map.

    Chain vertices are named by the poset's elements; a chain is the face on
    its member set, so faces of the order complex are exactly the chains.
    """
    chains = [frozenset([e]) for e in poset.elements]
    frontier = [(e,) for e in poset.elements]
    while frontier:
        new_frontier = []
        for chain in frontier:
            last = chain[-1]
            for e in poset.elements:
                if e != last and poset.leq(last, e):
                    ext = chain + (e,)
                    chains.append(frozenset(ext))
                    new_frontier.append(ext)
        frontier = new_frontier
    complex_ = SimplicialComplex(chains)
    terminal = {
        complex_.name_of[face]: chain_tuple(poset, face)[-1] for face in complex_.faces
    }
    t = MonotoneMap(complex_.face_poset, poset, terminal)
    return complex_, t


def chain_tuple(poset: Poset, chain_members) -> tuple[str, ...]:
    """Sort chain members into increasing order."""
    return tuple(
        sorted(
            chain_members,
            key=lambda e: (poset._height_below[poset.index[e]], poset.index[e]),
        )
    )


def signed_incidence_simplices(upper_face: frozenset, dropped_vertex: str) -> int:
    """Coboundary sign for a simplex and one of its facets: (-1)^i for the
    position of the dropped vertex in the sorted vertex list."""
    verts = sorted((str(v) for v in upper_face), key=_vertex_key)
    i = verts.index(str(dropped_vertex))
    return -1 if i % 2 else 1


def signed_incidence(poset: Poset, lower, upper, modulus: int | None = None) -> int:
    """[sigma:tau] for chains: (-1)^i when upper drops index i to give lower, else 0."""
    low = chain_tuple(poset, lower)
    up = chain_tuple(poset, upper)
    if len(up) != len(low) + 1 or not set(low) <= set(up):
        return 0
    drop = next(i for i, e in enumerate(up) if e not in set(low))
    if tuple(e for i, e in enumerate(up) if i != drop) != low:
        return 0
    sign = -1 if drop % 2 else 1
    return sign % modulus if modulus else sign
