"""Presheaves of sets over finite categories, with pushforward along functors.

A presheaf assigns a finite set of named elements to every object and a
function *backwards* along every morphism.  Pullback along a functor is
precomposition; pushforward is a pointwise colimit computed by saturating
the zig-zag relation with a union-find.  The natural-family enumerator at
the bottom is shared by every higher construction in the package
(derivation bijections, residuals, dualizers).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable

from .fincat import (
    FinCategory,
    FunctorData,
    FunctorCategory,
    ProductCategory,
    StructuralError,
    ValidationReport,
    functor_category,
    product,
    terminal_category,
)


class Presheaf:
    """Contravariant set-valued functor on a finite category.

    `action[f]` maps element indices at cod(f) to element indices at dom(f).
    `payloads`, when present, carries opaque per-element data (for example
    the natural families that make up a dualized presheaf); it never takes
    part in equality or validation.
    """

    def __init__(
        self,
        name: str,
        base: FinCategory,
        elements: tuple[tuple[str, ...], ...],
        action: tuple[tuple[int, ...], ...],
        payloads: tuple[tuple[object, ...], ...] | None = None,
    ):
        self.name = name
        self.base = base
        self.elements = elements
        self.action = action
        self.payloads = payloads
        if len(elements) != base.n_objects:
            raise StructuralError(f"presheaf {name}: element table has wrong length")
        if len(action) != base.n_morphisms:
            raise StructuralError(f"presheaf {name}: action table has wrong length")
        for f in range(base.n_morphisms):
            if len(action[f]) != len(elements[base.cod(f)]):
                raise StructuralError(
                    f"presheaf {name}: action at {base.mor_names[f]} has wrong arity"
                )
            for v in action[f]:
                if not (0 <= v < len(elements[base.dom(f)])):
                    raise StructuralError(
                        f"presheaf {name}: action at {base.mor_names[f]} hits a bad index"
                    )

    def size(self, a: int) -> int:
        return len(self.elements[a])

    def total_elements(self) -> int:
        return sum(len(e) for e in self.elements)

    def support(self) -> tuple[int, ...]:
        return tuple(a for a in range(self.base.n_objects) if self.elements[a])

    def apply(self, f: int, x: int) -> int:
        return self.action[f][x]

    def is_thin(self) -> bool:
        return all(len(e) <= 1 for e in self.elements)

    def __repr__(self) -> str:
        return f"Presheaf({self.name} over {self.base.name}, {self.total_elements()} elements)"


def validate_presheaf(phi: Presheaf) -> ValidationReport:
    """Identity and contravariant composition laws, checked exhaustively."""
    report = ValidationReport(f"presheaf {phi.name}")
    base = phi.base
    for a in range(base.n_objects):
        e = base.id_of(a)
        if phi.action[e] != tuple(range(phi.size(a))):
            report.add("identity-action", f"action of id_{base.objects[a]} is not the identity")
    for f, g in base.composable_pairs():
        c = base.cod(g)
        if not phi.elements[c]:
            continue
        fg = base.compose(f, g)
        for x in range(phi.size(c)):
            if phi.apply(fg, x) != phi.apply(f, phi.apply(g, x)):
                report.add(
                    "contravariance",
                    f"action of {base.mor_names[f]};{base.mor_names[g]} disagrees at element {x}",
                )
                break
    return report


def representable(cat: FinCategory, b: int, name: str | None = None) -> Presheaf:
    """The presheaf a |-> hom(a, b) with action by precomposition."""
    elements = tuple(
        tuple(cat.mor_names[m] for m in cat.hom(a, b)) for a in range(cat.n_objects)
    )
    positions = [
        {m: k for k, m in enumerate(cat.hom(a, b))} for a in range(cat.n_objects)
    ]
    action = []
    for f in range(cat.n_morphisms):
        a, a2 = cat.dom(f), cat.cod(f)
        action.append(tuple(positions[a][cat.compose(f, g)] for g in cat.hom(a2, b)))
    return Presheaf(name or f"y({cat.objects[b]})", cat, elements, tuple(action))


def unit_psh() -> tuple[Presheaf, FinCategory]:
    one = terminal_category()
    return Presheaf("I", one, (("*",),), ((0,),)), one


def pull_psh(F: FunctorData, psi: Presheaf, name: str | None = None) -> Presheaf:
    """Precompose psi with F; elements keep their names."""
    if psi.base is not F.target:
        raise StructuralError(f"pull_psh: {psi.name} does not live over the target of {F.name}")
    A = F.source
    elements = tuple(psi.elements[F.obj(a)] for a in range(A.n_objects))
    action = tuple(psi.action[F.mor(f)] for f in range(A.n_morphisms))
    payloads = None
    if psi.payloads is not None:
        payloads = tuple(psi.payloads[F.obj(a)] for a in range(A.n_objects))
    return Presheaf(name or f"pull[{F.name}]({psi.name})", A, elements, action, payloads)


class _UnionFind:
    def __init__(self) -> None:
        self.parent: dict = {}

    def add(self, x) -> None:
        if x not in self.parent:
            self.parent[x] = x

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x, y) -> None:
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            # Keep the lexicographically least node as root so representatives
            # are canonical without a separate pass.
            if ry < rx:
                rx, ry = ry, rx
            self.parent[ry] = rx


@dataclass(eq=False)
class PushResult:
    """Pushforward presheaf plus the coend bookkeeping.

    `class_of` maps a generating pair to its element: keys are
    (source object a, morphism h: b -> F(a), element x of phi(a)) and values
    are element indices at b = dom(h).  `reps` lists one canonical generating
    node per element, per base object.  `unit` gives the canonical
    derivation component phi(a) -> pushed(F(a)): x |-> class of (a, id, x).
    """

    presheaf: Presheaf
    class_of: dict[tuple[int, int, int], int]
    reps: tuple[tuple[tuple[int, int, int], ...], ...]
    unit: tuple[tuple[int, ...], ...]


def push_psh_full(F: FunctorData, phi: Presheaf, name: str | None = None) -> PushResult:
    if phi.base is not F.source:
        raise StructuralError(f"push_psh: {phi.name} does not live over the source of {F.name}")
    A, B = F.source, F.target
    support = phi.support()
    uf = _UnionFind()
    nodes_at: dict[int, list[tuple[int, int, int]]] = {b: [] for b in range(B.n_objects)}
    for a in support:
        fa = F.obj(a)
        for b in range(B.n_objects):
            for h in B.hom(b, fa):
                for x in range(phi.size(a)):
                    node = (a, h, x)
                    uf.add(node)
                    nodes_at[b].append(node)
    for u in range(A.n_morphisms):
        a, a2 = A.dom(u), A.cod(u)
        if not phi.elements[a2]:
            continue
        fu = F.mor(u)
        fa = F.obj(a)
        for b in range(B.n_objects):
            for h in B.hom(b, fa):
                hu = B.compose(h, fu)
                for x2 in range(phi.size(a2)):
                    uf.union((a2, hu, x2), (a, h, phi.apply(u, x2)))
    # Canonical representative of each class is its least node.
    reps_at: dict[int, list[tuple[int, int, int]]] = {}
    class_of: dict[tuple[int, int, int], int] = {}
    elements: list[tuple[str, ...]] = []
    for b in range(B.n_objects):
        reps = sorted({uf.find(n) for n in nodes_at[b]})
        reps_at[b] = reps
        index = {r: i for i, r in enumerate(reps)}
        for n in nodes_at[b]:
            class_of[n] = index[uf.find(n)]
        names = tuple(
            f"{B.mor_names[h]}.{phi.elements[a][x]}" for (a, h, x) in reps
        )
        elements.append(names)
    action: list[tuple[int, ...]] = []
    for k in range(B.n_morphisms):
        b2, b = B.dom(k), B.cod(k)
        row = []
        for a, h, x in reps_at[b]:
            row.append(class_of[(a, B.compose(k, h), x)])
        # Well-definedness: every member of a class must land in the same class.
        for n in nodes_at[b]:
            a, h, x = n
            if class_of[(a, B.compose(k, h), x)] != row[class_of[n]]:
                raise StructuralError(
                    f"push_psh: action of {B.mor_names[k]} is not well defined on classes"
                )
        action.append(tuple(row))
    pushed = Presheaf(
        name or f"push[{F.name}]({phi.name})", B, tuple(elements), tuple(action)
    )
    unit = tuple(
        tuple(class_of[(a, B.id_of(F.obj(a)), x)] for x in range(phi.size(a)))
        if phi.elements[a]
        else ()
        for a in range(A.n_objects)
    )
    reps = tuple(tuple(reps_at[b]) for b in range(B.n_objects))
    return PushResult(pushed, class_of, reps, unit)


def push_psh(F: FunctorData, phi: Presheaf, name: str | None = None) -> Presheaf:
    return push_psh_full(F, phi, name).presheaf


def push_transpose(
    pr: PushResult,
    F: FunctorData,
    psi: Presheaf,
    theta: tuple[tuple[int, ...], ...],
    name: str = "transpose",
) -> PshDerivation:
    """Factor a derivation theta : phi =>_F psi through the pushforward.

    Returns the unique vertical kappa : push_F(phi) => psi with
    unit ; kappa = theta, computed on canonical class representatives and
    then verified: kappa must be natural and must reproduce theta exactly,
    otherwise theta was not natural to begin with."""
    B = psi.base
    comps = []
    for b in range(B.n_objects):
        row = []
        for (a, h, x) in pr.reps[b]:
            row.append(psi.apply(h, theta[a][x]))
        comps.append(tuple(row))
    kappa = PshDerivation(name, pr.presheaf, psi, None, tuple(comps))
    rep = validate_psh_derivation(kappa)
    if not rep.ok:
        raise StructuralError(f"push_transpose: {rep.violations[0]}")
    for a in range(len(pr.unit)):
        for x, cls in enumerate(pr.unit[a]):
            if comps[F.obj(a)][cls] != theta[a][x]:
                raise StructuralError(
                    "push_transpose: factoring does not reproduce the derivation"
                )
    return kappa


def opcartesian_factoring_check(
    pr: PushResult,
    F: FunctorData,
    phi: Presheaf,
    test_codomains: Iterable[Presheaf],
) -> tuple[bool, str | None]:
    """Brute-force universal property of the canonical derivation
    phi =>_F push_F(phi): for each test codomain omega over the target base,
    postcomposition with the unit must biject vertical derivations
    push_F(phi) => omega with derivations phi =>_F omega."""
    pushed = pr.presheaf
    for omega in test_codomains:
        down = natural_families(phi, omega, F)
        vert = natural_families(pushed, omega, None)
        seen = set()
        down_set = {d for d in down}
        for v in vert:
            composite = tuple(
                tuple(v[F.obj(a)][cls] for cls in pr.unit[a])
                for a in range(phi.base.n_objects)
            )
            if composite not in down_set:
                return (False, f"factoring through {omega.name} leaves the image")
            if composite in seen:
                return (False, f"two factorings through {omega.name} collide")
            seen.add(composite)
        if len(seen) != len(down):
            return (
                False,
                f"{len(down)} derivations into {omega.name} but {len(seen)} factorings",
            )
    return (True, None)


def cartesian_factoring_check(
    theta: PshDerivation,
    test_domains: Iterable[Presheaf],
) -> tuple[bool, str | None]:
    """Brute-force universal property of a derivation theta : psi0 =>_F omega:
    for each test domain phi over the source base, precomposition with theta
    must biject vertical derivations phi => psi0 with derivations
    phi =>_F omega."""
    psi0, omega, F = theta.source, theta.target, theta.functor
    for phi in test_domains:
        down = natural_families(phi, omega, F)
        vert = natural_families(phi, psi0, None)
        seen = set()
        down_set = {d for d in down}
        for v in vert:
            composite = tuple(
                tuple(theta.components[a][y] for y in v[a])
                for a in range(phi.base.n_objects)
            )
            if composite not in down_set:
                return (False, f"factoring from {phi.name} leaves the image")
            if composite in seen:
                return (False, f"two factorings from {phi.name} collide")
            seen.add(composite)
        if len(seen) != len(down):
            return (
                False,
                f"{len(down)} derivations from {phi.name} but {len(seen)} factorings",
            )
    return (True, None)


def tensor_psh(
    phi: Presheaf, psi: Presheaf, prod: ProductCategory | None = None, name: str | None = None
) -> tuple[Presheaf, ProductCategory]:
    """External product over the product base."""
    if prod is None:
        prod = product(phi.base, psi.base)
    elements = []
    for x in range(prod.n_objects):
        a, b = prod.split_obj(x)
        elements.append(
            tuple(
                f"{ex}*{ey}" for ex in phi.elements[a] for ey in psi.elements[b]
            )
        )
    action = []
    for m in range(prod.n_morphisms):
        f, g = prod.split_mor(m)
        a, b = phi.base.cod(f), psi.base.cod(g)
        w = psi.size(b)
        w_dom = psi.size(psi.base.dom(g))
        row = []
        for x in range(phi.size(a)):
            for y in range(w):
                row.append(phi.apply(f, x) * w_dom + psi.apply(g, y))
        action.append(tuple(row))
    return (
        Presheaf(name or f"({phi.name}x{psi.name})", prod, tuple(elements), tuple(action)),
        prod,
    )


def natural_families(
    phi: Presheaf, psi: Presheaf, F: FunctorData | None = None
) -> list[tuple[tuple[int, ...], ...]]:
    """All families t_a: phi(a) -> psi(F a) natural in a, i.e. derivations
    phi => pull_F(psi).  F = None means both presheaves share a base.

    Returned component tables are indexed by phi's base objects; objects
    outside phi's support get the empty tuple.  Enumeration is by
    backtracking over support objects in index order with incremental
    naturality pruning, with a closed-form fast path when every element set
    involved has at most one element.
    """
    A = phi.base
    if F is None:
        if psi.base is not A:
            raise StructuralError("natural_families: presheaves live over different bases")
        f_obj = lambda a: a
        f_mor = lambda u: u
    else:
        if F.source is not A or psi.base is not F.target:
            raise StructuralError("natural_families: functor does not connect the presheaves")
        f_obj = F.obj
        f_mor = F.mor
    support = phi.support()
    if not support:
        return [tuple(() for _ in range(A.n_objects))]
    thin = all(phi.size(a) == 1 for a in support) and all(
        psi.size(f_obj(a)) <= 1 for a in support
    )
    if thin:
        if all(psi.size(f_obj(a)) == 1 for a in support):
            table = tuple((0,) if phi.elements[a] else () for a in range(A.n_objects))
            return [table]
        return []
    pos = {a: k for k, a in enumerate(support)}
    # Constraints grouped by the backtracking step at which they close.
    constraints: list[list[tuple[int, int, int]]] = [[] for _ in support]
    for u in range(A.n_morphisms):
        a, a2 = A.dom(u), A.cod(u)
        if not phi.elements[a2]:
            continue
        constraints[max(pos[a], pos[a2])].append((u, a, a2))
    choices: list[list[tuple[int, ...]]] = []
    for a in support:
        m = psi.size(f_obj(a))
        if m == 0:
            return []
        choices.append(list(itertools.product(range(m), repeat=phi.size(a))))
    out: list[tuple[tuple[int, ...], ...]] = []
    assigned: dict[int, tuple[int, ...]] = {}

    def ok(step: int) -> bool:
        for u, a, a2 in constraints[step]:
            ta, ta2 = assigned[a], assigned[a2]
            fu = f_mor(u)
            for x2 in range(phi.size(a2)):
                if ta[phi.apply(u, x2)] != psi.apply(fu, ta2[x2]):
                    return False
        return True

    def extend(step: int) -> None:
        if step == len(support):
            out.append(
                tuple(assigned[a] if a in assigned else () for a in range(A.n_objects))
            )
            return
        a = support[step]
        for cand in choices[step]:
            assigned[a] = cand
            if ok(step):
                extend(step + 1)
        del assigned[a]

    extend(0)
    return out


def psh_derivations(
    phi: Presheaf, F: FunctorData, psi: Presheaf
) -> list[tuple[tuple[int, ...], ...]]:
    """Derivations phi -> psi over F, as natural component tables."""
    return natural_families(phi, psi, F)


@dataclass(eq=False)
class PshDerivation:
    """A derivation between presheaves: base functor plus component tables."""

    name: str
    source: Presheaf
    target: Presheaf
    functor: FunctorData | None  # None means vertical (identity on a shared base)
    components: tuple[tuple[int, ...], ...]

    def apply(self, a: int, x: int) -> int:
        return self.components[a][x]


def validate_psh_derivation(d: PshDerivation) -> ValidationReport:
    report = ValidationReport(f"psh-derivation {d.name}")
    phi, psi = d.source, d.target
    A = phi.base
    f_obj = (lambda a: a) if d.functor is None else d.functor.obj
    f_mor = (lambda u: u) if d.functor is None else d.functor.mor
    for a in range(A.n_objects):
        if len(d.components[a]) != phi.size(a):
            report.add("arity", f"component at {A.objects[a]} has wrong arity")
            return report
        for v in d.components[a]:
            if not (0 <= v < psi.size(f_obj(a))):
                report.add("range", f"component at {A.objects[a]} out of range")
                return report
    for u in range(A.n_morphisms):
        a, a2 = A.dom(u), A.cod(u)
        fu = f_mor(u)
        for x2 in range(phi.size(a2)):
            if d.components[a][phi.apply(u, x2)] != psi.apply(fu, d.components[a2][x2]):
                report.add("naturality", f"square at {A.mor_names[u]} fails")
                break
    return report


def vertical_iso_psh(
    phi: Presheaf, psi: Presheaf
) -> tuple[tuple[tuple[int, ...], ...], tuple[tuple[int, ...], ...]] | None:
    """Search for a natural isomorphism over the identity base functor.

    Returns mutually inverse component tables, or None after exhausting the
    search space.  Objects are visited in ascending element count so size
    mismatches and sparse objects prune immediately; the witness found first
    under that fixed order is the canonical one.
    """
    A = phi.base
    if psi.base is not A:
        raise StructuralError("vertical_iso_psh: different bases")
    for a in range(A.n_objects):
        if phi.size(a) != psi.size(a):
            return None
    support = sorted(phi.support(), key=lambda a: (phi.size(a), a))
    if not support:
        empty = tuple(() for _ in range(A.n_objects))
        return (empty, empty)
    thin = all(phi.size(a) == 1 for a in support)
    if thin:
        table = tuple((0,) if phi.elements[a] else () for a in range(A.n_objects))
        cand = PshDerivation("iso?", phi, psi, None, table)
        if validate_psh_derivation(cand).ok:
            return (table, table)
        return None
    pos = {a: k for k, a in enumerate(support)}
    constraints: list[list[tuple[int, int, int]]] = [[] for _ in support]
    for u in range(A.n_morphisms):
        a, a2 = A.dom(u), A.cod(u)
        if not phi.elements[a2]:
            continue
        constraints[max(pos[a], pos[a2])].append((u, a, a2))
    assigned: dict[int, tuple[int, ...]] = {}

    def ok(step: int) -> bool:
        for u, a, a2 in constraints[step]:
            ta, ta2 = assigned[a], assigned[a2]
            for x2 in range(phi.size(a2)):
                if ta[phi.apply(u, x2)] != psi.apply(u, ta2[x2]):
                    return False
        return True

    def extend(step: int):
        if step == len(support):
            return {a: v for a, v in assigned.items()}
        a = support[step]
        for perm in itertools.permutations(range(phi.size(a))):
            assigned[a] = perm
            if ok(step):
                res = extend(step + 1)
                if res is not None:
                    return res
        del assigned[a]
        return None

    res = extend(0)
    if res is None:
        return None
    fwd = tuple(res.get(a, ()) for a in range(A.n_objects))
    inv = []
    for a in range(A.n_objects):
        row = [0] * len(fwd[a])
        for x, y in enumerate(fwd[a]):
            row[y] = x
        inv.append(tuple(row))
    return (fwd, tuple(inv))


def is_vertical_iso(components: tuple[tuple[int, ...], ...], phi: Presheaf, psi: Presheaf) -> bool:
    """Is this specific vertical derivation a pointwise bijection?  A natural
    pointwise bijection has a natural inverse, so this decides isomorphy of
    the canonical comparison maps."""
    for a in range(phi.base.n_objects):
        if phi.size(a) != psi.size(a):
            return False
        if len(set(components[a])) != phi.size(a):
            return False
    d = PshDerivation("cmp", phi, psi, None, components)
    return validate_psh_derivation(d).ok


def residual_psh(
    side: str,
    phi: Presheaf,
    omega: Presheaf,
    size_guard: int = 10000,
) -> tuple[Presheaf, FunctorCategory]:
    """The closed-structure residual: over [A, C], a functor F is sent to the
    set of natural families phi(a) -> omega(F a).  `side` records which
    tensor argument the residual is adjoint to; left and right share the
    same pointwise formula."""
    if side not in ("left", "right"):
        raise StructuralError(f"residual_psh: bad side {side!r}")
    fc = functor_category(phi.base, omega.base, size_guard)
    elements: list[tuple[str, ...]] = []
    family_index: list[dict[tuple[tuple[int, ...], ...], int]] = []
    payloads: list[tuple[object, ...]] = []
    for i, F in enumerate(fc.functors):
        fams = natural_families(phi, omega, F)
        elements.append(tuple(f"t{i}.{k}" for k in range(len(fams))))
        family_index.append({fam: k for k, fam in enumerate(fams)})
        payloads.append(tuple(fams))
    action: list[tuple[int, ...]] = []
    for m in range(fc.cat.n_morphisms):
        i, j, comps = fc.nat_tags[m]
        row = []
        for fam in payloads[j]:
            moved = tuple(
                tuple(omega.apply(comps[a], v) for v in fam[a])
                for a in range(phi.base.n_objects)
            )
            row.append(family_index[i][moved])
        action.append(tuple(row))
    name = f"res_{side[0]}({phi.name},{omega.name})"
    return (
        Presheaf(name, fc.cat, tuple(elements), tuple(action), tuple(payloads)),
        fc,
    )
