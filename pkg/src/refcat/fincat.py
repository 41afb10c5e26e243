"""Finite categories, functors and natural transformations as index tables.

Objects and morphisms are dense integer indices in insertion order.  All
enumerations iterate in index order, which is what makes every construction
in this package reproducible byte-for-byte.  Composition is total on
composable pairs; asking for a non-composable composite is a structural
error, never a silent None.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterator, Sequence


class StructuralError(Exception):
    """Malformed data: bad index, missing table entry, wrong arity.

    Distinct from a law violation, which is a *finding* reported by a
    validator on structurally well-formed data.
    """


class SizeGuardExceeded(Exception):
    """A derived construction would exceed its size guard."""

    def __init__(self, message: str, estimate: int, guard: int):
        super().__init__(f"{message}: estimated {estimate} > guard {guard}")
        self.estimate = estimate
        self.guard = guard


@dataclass
class Violation:
    law: str
    detail: str

    def __str__(self) -> str:
        return f"{self.law}: {self.detail}"


@dataclass
class ValidationReport:
    subject: str
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, law: str, detail: str) -> None:
        self.violations.append(Violation(law, detail))

    def __str__(self) -> str:
        if self.ok:
            return f"{self.subject}: ok"
        lines = [f"{self.subject}: {len(self.violations)} violation(s)"]
        lines += [f"  {v}" for v in self.violations]
        return "\n".join(lines)


class FinCategory:
    """A finite category given by explicit tables.

    `compose` may be a dict over composable pairs or a callable; derived
    categories (products, functor categories) use a callable with a memo so
    large tables are never materialized eagerly.  Semantically the table is
    total on composable pairs either way.
    """

    def __init__(
        self,
        name: str,
        objects: Sequence[str],
        morphisms: Sequence[tuple[str, int, int]],
        identity: Sequence[int],
        compose: dict[tuple[int, int], int] | Callable[[int, int], int],
    ):
        self.name = name
        self.objects = tuple(objects)
        self.mor_names = tuple(m[0] for m in morphisms)
        self.mor_dom = tuple(m[1] for m in morphisms)
        self.mor_cod = tuple(m[2] for m in morphisms)
        self.identity = tuple(identity)
        if isinstance(compose, dict):
            self._compose_table: dict[tuple[int, int], int] | None = compose
            self._compose_fn: Callable[[int, int], int] | None = None
        else:
            self._compose_table = None
            self._compose_fn = compose
        self._compose_memo: dict[tuple[int, int], int] = {}
        self._check_indices()
        self._hom: dict[tuple[int, int], tuple[int, ...]] = {}
        self._mor_out: dict[int, tuple[int, ...]] = {}
        self._mor_in: dict[int, tuple[int, ...]] = {}
        self._build_hom_index()

    def _check_indices(self) -> None:
        n_obj, n_mor = len(self.objects), len(self.mor_names)
        if len(self.identity) != n_obj:
            raise StructuralError(f"{self.name}: identity table has wrong length")
        for i in range(n_mor):
            if not (0 <= self.mor_dom[i] < n_obj and 0 <= self.mor_cod[i] < n_obj):
                raise StructuralError(f"{self.name}: morphism {i} has endpoint out of range")
        for a, e in enumerate(self.identity):
            if not (0 <= e < n_mor):
                raise StructuralError(f"{self.name}: identity of object {a} out of range")

    def _build_hom_index(self) -> None:
        buckets: dict[tuple[int, int], list[int]] = {}
        out: dict[int, list[int]] = {}
        inc: dict[int, list[int]] = {}
        for i in range(self.n_morphisms):
            buckets.setdefault((self.mor_dom[i], self.mor_cod[i]), []).append(i)
            out.setdefault(self.mor_dom[i], []).append(i)
            inc.setdefault(self.mor_cod[i], []).append(i)
        self._hom = {k: tuple(v) for k, v in buckets.items()}
        self._mor_out = {k: tuple(v) for k, v in out.items()}
        self._mor_in = {k: tuple(v) for k, v in inc.items()}

    @property
    def n_objects(self) -> int:
        return len(self.objects)

    @property
    def n_morphisms(self) -> int:
        return len(self.mor_names)

    def dom(self, f: int) -> int:
        return self.mor_dom[f]

    def cod(self, f: int) -> int:
        return self.mor_cod[f]

    def id_of(self, a: int) -> int:
        return self.identity[a]

    def is_identity(self, f: int) -> bool:
        return self.identity[self.mor_dom[f]] == f

    def object_name(self, a: int) -> str:
        return self.objects[a]

    def morphism_name(self, f: int) -> str:
        return self.mor_names[f]

    def validate(self) -> ValidationReport:
        return validate_category(self)

    def hom(self, a: int, b: int) -> tuple[int, ...]:
        return self._hom.get((a, b), ())

    def mor_out(self, a: int) -> tuple[int, ...]:
        return self._mor_out.get(a, ())

    def mor_in(self, b: int) -> tuple[int, ...]:
        return self._mor_in.get(b, ())

    def compose(self, f: int, g: int) -> int:
        """Diagrammatic composite f;g, defined when cod(f) = dom(g)."""
        if self.mor_cod[f] != self.mor_dom[g]:
            raise StructuralError(
                f"{self.name}: compose({self.mor_names[f]}, {self.mor_names[g]}) is not composable"
            )
        if self._compose_table is not None:
            try:
                return self._compose_table[(f, g)]
            except KeyError:
                raise StructuralError(
                    f"{self.name}: missing composite {self.mor_names[f]};{self.mor_names[g]}"
                ) from None
        h = self._compose_memo.get((f, g))
        if h is None:
            h = self._compose_fn(f, g)
            self._compose_memo[(f, g)] = h
        return h

    def compose_many(self, *fs: int) -> int:
        out = fs[0]
        for f in fs[1:]:
            out = self.compose(out, f)
        return out

    def composable_pairs(self) -> Iterator[tuple[int, int]]:
        for b in range(self.n_objects):
            for f in self.mor_in(b):
                for g in self.mor_out(b):
                    yield (f, g)

    def __repr__(self) -> str:
        return f"FinCategory({self.name}: {self.n_objects} objects, {self.n_morphisms} morphisms)"


def validate_category(cat: FinCategory) -> ValidationReport:
    """Exhaustively check identity, endpoint and associativity laws."""
    report = ValidationReport(f"category {cat.name}")
    for a in range(cat.n_objects):
        e = cat.id_of(a)
        if cat.dom(e) != a or cat.cod(e) != a:
            report.add("identity-endpoints", f"id of {cat.objects[a]} is not an endomorphism")
    for f, g in cat.composable_pairs():
        try:
            h = cat.compose(f, g)
        except StructuralError as exc:
            report.add("composition-totality", str(exc))
            continue
        if cat.dom(h) != cat.dom(f) or cat.cod(h) != cat.cod(g):
            report.add(
                "composition-endpoints",
                f"{cat.mor_names[f]};{cat.mor_names[g]} = {cat.mor_names[h]} has wrong endpoints",
            )
    for f in range(cat.n_morphisms):
        left = cat.compose(cat.id_of(cat.dom(f)), f)
        right = cat.compose(f, cat.id_of(cat.cod(f)))
        if left != f:
            report.add("left-identity", f"id;{cat.mor_names[f]} = {cat.mor_names[left]}")
        if right != f:
            report.add("right-identity", f"{cat.mor_names[f]};id = {cat.mor_names[right]}")
    # Associativity over all composable triples.
    for b in range(cat.n_objects):
        for f in cat.mor_in(b):
            for g in cat.mor_out(b):
                fg = cat.compose(f, g)
                for h in cat.mor_out(cat.cod(g)):
                    if cat.compose(fg, h) != cat.compose(f, cat.compose(g, h)):
                        report.add(
                            "associativity",
                            f"({cat.mor_names[f]};{cat.mor_names[g]});{cat.mor_names[h]} != "
                            f"{cat.mor_names[f]};({cat.mor_names[g]};{cat.mor_names[h]})",
                        )
    return report


@dataclass(eq=False)
class FunctorData:
    """A functor as object and morphism index tables."""

    name: str
    source: FinCategory
    target: FinCategory
    object_map: tuple[int, ...]
    morphism_map: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.object_map) != self.source.n_objects:
            raise StructuralError(f"functor {self.name}: object map has wrong length")
        if len(self.morphism_map) != self.source.n_morphisms:
            raise StructuralError(f"functor {self.name}: morphism map has wrong length")
        for x in self.object_map:
            if not (0 <= x < self.target.n_objects):
                raise StructuralError(f"functor {self.name}: object image out of range")
        for x in self.morphism_map:
            if not (0 <= x < self.target.n_morphisms):
                raise StructuralError(f"functor {self.name}: morphism image out of range")

    def obj(self, a: int) -> int:
        return self.object_map[a]

    def mor(self, f: int) -> int:
        return self.morphism_map[f]

    def table(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        return (self.object_map, self.morphism_map)


def validate_functor(F: FunctorData) -> ValidationReport:
    report = ValidationReport(f"functor {F.name}")
    S, T = F.source, F.target
    for f in range(S.n_morphisms):
        g = F.mor(f)
        if T.dom(g) != F.obj(S.dom(f)) or T.cod(g) != F.obj(S.cod(f)):
            report.add("endpoints", f"image of {S.mor_names[f]} has wrong endpoints")
    for a in range(S.n_objects):
        if F.mor(S.id_of(a)) != T.id_of(F.obj(a)):
            report.add("identities", f"image of id_{S.objects[a]} is not an identity")
    for f, g in S.composable_pairs():
        ff, gg = F.mor(f), F.mor(g)
        if T.cod(ff) != T.dom(gg):
            continue  # endpoint violation already recorded above
        if F.mor(S.compose(f, g)) != T.compose(ff, gg):
            report.add("composition", f"image of {S.mor_names[f]};{S.mor_names[g]} breaks")
    return report


def identity_functor(cat: FinCategory) -> FunctorData:
    return FunctorData(
        f"id[{cat.name}]",
        cat,
        cat,
        tuple(range(cat.n_objects)),
        tuple(range(cat.n_morphisms)),
    )


def compose_functors(F: FunctorData, G: FunctorData) -> FunctorData:
    """Diagrammatic composite: apply F, then G."""
    if F.target is not G.source and F.target.name != G.source.name:
        raise StructuralError(f"compose_functors: {F.name} then {G.name} do not meet")
    return FunctorData(
        f"{F.name};{G.name}",
        F.source,
        G.target,
        tuple(G.obj(x) for x in F.object_map),
        tuple(G.mor(x) for x in F.morphism_map),
    )


def functors_equal(F: FunctorData, G: FunctorData) -> bool:
    return F.object_map == G.object_map and F.morphism_map == G.morphism_map


@dataclass(eq=False)
class NatTransData:
    """A natural transformation as a component table indexed by source objects."""

    name: str
    source_functor: FunctorData
    target_functor: FunctorData
    components: tuple[int, ...]

    def component(self, a: int) -> int:
        return self.components[a]


def validate_nat_trans(theta: NatTransData) -> ValidationReport:
    report = ValidationReport(f"nat-trans {theta.name}")
    F, G = theta.source_functor, theta.target_functor
    A, C = F.source, F.target
    if len(theta.components) != A.n_objects:
        report.add("arity", "component table has wrong length")
        return report
    for a in range(A.n_objects):
        comp = theta.components[a]
        if C.dom(comp) != F.obj(a) or C.cod(comp) != G.obj(a):
            report.add("endpoints", f"component at {A.objects[a]} has wrong endpoints")
            return report
    for f in range(A.n_morphisms):
        a, b = A.dom(f), A.cod(f)
        lhs = C.compose(F.mor(f), theta.components[b])
        rhs = C.compose(theta.components[a], G.mor(f))
        if lhs != rhs:
            report.add("naturality", f"square at {A.mor_names[f]} does not commute")
    return report


def opposite(cat: FinCategory) -> FinCategory:
    """Same object and morphism indices, arrows reversed."""
    morphisms = [
        (cat.mor_names[i], cat.mor_cod[i], cat.mor_dom[i]) for i in range(cat.n_morphisms)
    ]
    return FinCategory(
        f"{cat.name}^op",
        cat.objects,
        morphisms,
        cat.identity,
        lambda f, g, _c=cat: _c.compose(g, f),
    )


def terminal_category() -> FinCategory:
    return FinCategory("1", ("*",), (("id", 0, 0),), (0,), {(0, 0): 0})


def discrete_category(names: Sequence[str]) -> FinCategory:
    morphisms = [(f"id_{n}", i, i) for i, n in enumerate(names)]
    compose = {(i, i): i for i in range(len(names))}
    return FinCategory(f"disc({','.join(names)})", names, morphisms, tuple(range(len(names))), compose)


class ProductCategory(FinCategory):
    """Product category with pair indices decodable via divmod."""

    def __init__(self, left: FinCategory, right: FinCategory):
        self.left = left
        self.right = right
        objects = [
            f"({left.objects[i]},{right.objects[j]})"
            for i in range(left.n_objects)
            for j in range(right.n_objects)
        ]
        morphisms = []
        for f in range(left.n_morphisms):
            for g in range(right.n_morphisms):
                morphisms.append(
                    (
                        f"({left.mor_names[f]},{right.mor_names[g]})",
                        left.dom(f) * right.n_objects + right.dom(g),
                        left.cod(f) * right.n_objects + right.cod(g),
                    )
                )
        identity = [
            left.id_of(i) * right.n_morphisms + right.id_of(j)
            for i in range(left.n_objects)
            for j in range(right.n_objects)
        ]

        def compose(m1: int, m2: int) -> int:
            f1, g1 = divmod(m1, right.n_morphisms)
            f2, g2 = divmod(m2, right.n_morphisms)
            return left.compose(f1, f2) * right.n_morphisms + right.compose(g1, g2)

        super().__init__(f"{left.name}x{right.name}", objects, morphisms, identity, compose)

    def pair_obj(self, a: int, b: int) -> int:
        return a * self.right.n_objects + b

    def split_obj(self, x: int) -> tuple[int, int]:
        return divmod(x, self.right.n_objects)

    def pair_mor(self, f: int, g: int) -> int:
        return f * self.right.n_morphisms + g

    def split_mor(self, m: int) -> tuple[int, int]:
        return divmod(m, self.right.n_morphisms)


def product(left: FinCategory, right: FinCategory) -> ProductCategory:
    return ProductCategory(left, right)


def _enumerate_functors(A: FinCategory, C: FinCategory, guard: int) -> list[FunctorData]:
    """All functors A -> C by backtracking, in lexicographic table order."""
    estimate = C.n_objects ** A.n_objects if A.n_objects else 1
    if estimate > guard:
        raise SizeGuardExceeded(f"functors {A.name} -> {C.name}", estimate, guard)
    non_id = [f for f in range(A.n_morphisms) if not A.is_identity(f)]
    found: list[FunctorData] = []

    def assign_morphisms(obj_map: tuple[int, ...], idx: int, mor_map: dict[int, int]) -> None:
        if idx == len(non_id):
            full = []
            for f in range(A.n_morphisms):
                if A.is_identity(f):
                    full.append(C.id_of(obj_map[A.dom(f)]))
                else:
                    full.append(mor_map[f])
            # Composition closure checked on the completed table.
            cand = FunctorData(f"F{len(found)}", A, C, obj_map, tuple(full))
            for f, g in A.composable_pairs():
                if cand.mor(A.compose(f, g)) != C.compose(cand.mor(f), cand.mor(g)):
                    return
            found.append(cand)
            if len(found) > guard:
                raise SizeGuardExceeded(f"functors {A.name} -> {C.name}", len(found), guard)
            return
        f = non_id[idx]
        for img in C.hom(obj_map[A.dom(f)], obj_map[A.cod(f)]):
            mor_map[f] = img
            assign_morphisms(obj_map, idx + 1, mor_map)
            del mor_map[f]

    def assign_objects(pos: int, acc: list[int]) -> None:
        if pos == A.n_objects:
            assign_morphisms(tuple(acc), 0, {})
            return
        for img in range(C.n_objects):
            acc.append(img)
            assign_objects(pos + 1, acc)
            acc.pop()

    assign_objects(0, [])
    return found


def _nat_trans_between(F: FunctorData, G: FunctorData) -> list[tuple[int, ...]]:
    """All natural transformation component tables F => G, lexicographic."""
    A, C = F.source, F.target
    out: list[tuple[int, ...]] = []

    def extend(a: int, acc: list[int]) -> None:
        if a == A.n_objects:
            out.append(tuple(acc))
            return
        for comp in C.hom(F.obj(a), G.obj(a)):
            ok = True
            for f in range(A.n_morphisms):
                x, y = A.dom(f), A.cod(f)
                if y == a and x < a:
                    if C.compose(F.mor(f), comp) != C.compose(acc[x], G.mor(f)):
                        ok = False
                        break
                if x == a and y < a:
                    if C.compose(comp, G.mor(f)) != C.compose(F.mor(f), acc[y]):
                        ok = False
                        break
                if x == a and y == a:
                    if C.compose(comp, G.mor(f)) != C.compose(F.mor(f), comp):
                        ok = False
                        break
            if ok:
                acc.append(comp)
                extend(a + 1, acc)
                acc.pop()

    extend(0, [])
    return out


@dataclass(eq=False)
class FunctorCategory:
    """The category [A, C] together with decoders for its objects and morphisms."""

    cat: FinCategory
    functors: list[FunctorData]
    # morphism index -> (source functor index, target functor index, components)
    nat_tags: list[tuple[int, int, tuple[int, ...]]]
    functor_index: dict[tuple[tuple[int, ...], tuple[int, ...]], int]
    nat_index: dict[tuple[int, int, tuple[int, ...]], int]

    def find_functor(self, F: FunctorData) -> int:
        key = (F.object_map, F.morphism_map)
        if key not in self.functor_index:
            raise StructuralError(f"functor {F.name} is not an object of {self.cat.name}")
        return self.functor_index[key]

    def find_nat(self, src: int, tgt: int, components: tuple[int, ...]) -> int:
        key = (src, tgt, components)
        if key not in self.nat_index:
            raise StructuralError(f"no such natural transformation in {self.cat.name}")
        return self.nat_index[key]


def functor_category(A: FinCategory, C: FinCategory, size_guard: int = 10000) -> FunctorCategory:
    """Materialize [A, C]: objects are functors, morphisms natural transformations."""
    functors = _enumerate_functors(A, C, size_guard)
    objects = [f"F{i}" for i in range(len(functors))]
    morphisms: list[tuple[str, int, int]] = []
    nat_tags: list[tuple[int, int, tuple[int, ...]]] = []
    identity: list[int] = [-1] * len(functors)
    for i, F in enumerate(functors):
        for j, G in enumerate(functors):
            for comps in _nat_trans_between(F, G):
                idx = len(morphisms)
                morphisms.append((f"n{idx}", i, j))
                nat_tags.append((i, j, comps))
                if i == j and comps == tuple(C.id_of(F.obj(a)) for a in range(A.n_objects)):
                    identity[i] = idx
    nat_index = {tag: k for k, tag in enumerate(nat_tags)}

    def compose(m1: int, m2: int) -> int:
        i, j, c1 = nat_tags[m1]
        j2, k, c2 = nat_tags[m2]
        comps = tuple(C.compose(c1[a], c2[a]) for a in range(A.n_objects))
        return nat_index[(i, k, comps)]

    cat = FinCategory(f"[{A.name},{C.name}]", objects, morphisms, identity, compose)
    functor_index = {(F.object_map, F.morphism_map): i for i, F in enumerate(functors)}
    return FunctorCategory(cat, functors, nat_tags, functor_index, nat_index)


def curry_functor(F: FunctorData, size_guard: int = 10000) -> tuple[FunctorData, FunctorCategory]:
    """Curry F: A x B -> C into A -> [B, C].

    The source of F must be a ProductCategory.  Returns the curried functor
    together with the materialized functor category it lands in.
    """
    prod = F.source
    if not isinstance(prod, ProductCategory):
        raise StructuralError(f"curry_functor: source of {F.name} is not a product")
    A, B, C = prod.left, prod.right, F.target
    fc = functor_category(B, C, size_guard)
    obj_map = []
    for a in range(A.n_objects):
        slice_obj = tuple(F.obj(prod.pair_obj(a, b)) for b in range(B.n_objects))
        slice_mor = tuple(
            F.mor(prod.pair_mor(A.id_of(a), g)) for g in range(B.n_morphisms)
        )
        obj_map.append(fc.find_functor(FunctorData(f"{F.name}({A.objects[a]},-)", B, C, slice_obj, slice_mor)))
    mor_map = []
    for f in range(A.n_morphisms):
        comps = tuple(F.mor(prod.pair_mor(f, B.id_of(b))) for b in range(B.n_objects))
        mor_map.append(fc.find_nat(obj_map[A.dom(f)], obj_map[A.cod(f)], comps))
    curried = FunctorData(f"curry({F.name})", A, fc.cat, tuple(obj_map), tuple(mor_map))
    return curried, fc


def uncurry_functor(G: FunctorData, fc: FunctorCategory, A: FinCategory, B: FinCategory) -> FunctorData:
    """Inverse of curry_functor, used for round-trip checks."""
    C = fc.functors[0].target if fc.functors else None
    prod = product(A, B)
    obj_map = []
    for x in range(prod.n_objects):
        a, b = prod.split_obj(x)
        obj_map.append(fc.functors[G.obj(a)].obj(b))
    mor_map = []
    for m in range(prod.n_morphisms):
        f, g = prod.split_mor(m)
        a2 = A.cod(f)
        _, _, comps = fc.nat_tags[G.mor(f)]
        # Naturality makes the two evaluation orders agree; use G(f) then G(a2)(g).
        first = comps[B.dom(g)]
        second = fc.functors[G.obj(a2)].mor(g)
        mor_map.append(C.compose(first, second))
    return FunctorData(f"uncurry({G.name})", prod, C, tuple(obj_map), tuple(mor_map))
