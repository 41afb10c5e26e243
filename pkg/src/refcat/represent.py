"""Slices, coslices, and the two presheaf presentations of a refinement system.

A refinement system t : D -> T has, for every base object B, a category of
refinements sitting over B (the relative slice) and dually one of
refinements sitting under it (the relative coslice, built here as a slice
of the opposite system).  Every refinement Q then presents itself as the
presheaf of derivations into Q over the slice, and every P as the presheaf
of derivations out of P over the coslice.  This module builds those
presentations, certifies that they are fully faithful, checks the
factorizations through pointed categories and through the comma category,
and transports monoidal structure on t into Day-style structure on the
slices.

All constructions are cached on the RefinementSystem instance, which is
load-bearing: presheaf pullback requires base categories to be identical
objects, not merely isomorphic copies.
"""

from __future__ import annotations

from dataclasses import dataclass

from .fincat import (
    FinCategory,
    FunctorCategory,
    FunctorData,
    ProductCategory,
    SizeGuardExceeded,
    StructuralError,
    ValidationReport,
    compose_functors,
    product,
)
from .psh import (
    Presheaf,
    PshDerivation,
    cartesian_factoring_check,
    is_vertical_iso,
    opcartesian_factoring_check,
    psh_derivations,
    push_psh_full,
    push_transpose,
    pull_psh,
    representable,
    residual_psh,
    tensor_psh,
    validate_psh_derivation,
)
from .refsys import (
    MonoidalRefinementSystem,
    RefinementSystem,
    RefSysMorphism,
    _is_cartesian,
    find_left_residual,
    find_pullback,
    find_pushforward,
    find_right_residual,
    left_curry,
    right_curry,
)
from .reports import CheckReport


# ---------------------------------------------------------------------------
# Relative slices and coslices


@dataclass(eq=False)
class SliceCategory:
    """Refinements arranged over one base object.

    Objects are tagged (P, c) with P a D-object and c : t(P) -> B;
    morphisms are tagged (alpha, src, tgt) where alpha : P_src -> P_tgt is
    a derivation over some e with c_src = e ; c_tgt.  Built on the opposite
    system the same structure reads as the coslice under B: tags become
    (R, d : B -> t(R)) and morphism direction reverses in D.
    """

    sys: RefinementSystem
    base_obj: int
    cat: FinCategory
    obj_tags: tuple[tuple[int, int], ...]
    mor_tags: tuple[tuple[int, int, int], ...]
    obj_index: dict[tuple[int, int], int]
    mor_index: dict[tuple[int, int, int], int]

    def obj_name(self, i: int) -> str:
        return self.cat.objects[i]

    def mor_name(self, k: int) -> str:
        return self.cat.mor_names[k]


def _build_slice(sys: RefinementSystem, B: int) -> SliceCategory:
    D, T, t = sys.D, sys.T, sys.t
    obj_tags: list[tuple[int, int]] = []
    for P in range(D.n_objects):
        for c in T.hom(sys.shape(P), B):
            obj_tags.append((P, c))
    obj_index = {tag: i for i, tag in enumerate(obj_tags)}
    obj_names = [f"({D.objects[P]},{T.mor_names[c]})" for (P, c) in obj_tags]

    mor_tags: list[tuple[int, int, int]] = []
    for si, (P1, c1) in enumerate(obj_tags):
        for ti, (P2, c2) in enumerate(obj_tags):
            for alpha in D.hom(P1, P2):
                if T.compose(t.mor(alpha), c2) == c1:
                    mor_tags.append((alpha, si, ti))
    mor_index = {tag: k for k, tag in enumerate(mor_tags)}
    morphisms = [
        (f"{D.mor_names[alpha]}#{si}->{ti}", si, ti) for (alpha, si, ti) in mor_tags
    ]
    identity = [mor_index[(D.identity[P], i, i)] for i, (P, _c) in enumerate(obj_tags)]

    def comp(f: int, g: int, _mt=mor_tags, _mi=mor_index, _D=D) -> int:
        a1, s, _ = _mt[f]
        a2, _, u = _mt[g]
        return _mi[(_D.compose(a1, a2), s, u)]

    cat = FinCategory(
        f"slice({sys.name},{T.objects[B]})", obj_names, morphisms, identity, comp
    )
    return SliceCategory(sys, B, cat, tuple(obj_tags), tuple(mor_tags), obj_index, mor_index)


def slice_of(sys: RefinementSystem, B: int) -> SliceCategory:
    """The relative slice over the T-object B, cached per system."""
    cache = sys.__dict__.setdefault("_slice_cache", {})
    if B not in cache:
        cache[B] = _build_slice(sys, B)
    return cache[B]


def coslice_of(sys: RefinementSystem, A: int) -> SliceCategory:
    """The relative coslice under A: the slice of the opposite system.

    Object tags (R, d) read d : A -> t(R) in the original base, and a
    morphism tagged (gamma, src, tgt) is a D-morphism R_tgt -> R_src."""
    return slice_of(sys.op(), A)


def slice_action(sys: RefinementSystem, e: int) -> FunctorData:
    """Postcomposition with e as a functor between slices, cached."""
    cache = sys.__dict__.setdefault("_slice_action_cache", {})
    if e not in cache:
        T = sys.T
        S1 = slice_of(sys, T.dom(e))
        S2 = slice_of(sys, T.cod(e))
        omap = tuple(S2.obj_index[(P, T.compose(c, e))] for (P, c) in S1.obj_tags)
        mmap = tuple(
            S2.mor_index[(alpha, omap[s], omap[u])] for (alpha, s, u) in S1.mor_tags
        )
        cache[e] = FunctorData(
            f"slice[{T.mor_names[e]}]", S1.cat, S2.cat, omap, mmap
        )
    return cache[e]


def coslice_action(sys: RefinementSystem, e: int) -> FunctorData:
    """Precomposition with e as a functor between coslices (contravariant:
    e : A1 -> A2 yields a functor from the coslice under A2 to the one
    under A1)."""
    return slice_action(sys.op(), e)


# ---------------------------------------------------------------------------
# Positive and negative representations


def pos_rep(sys: RefinementSystem, Q: int) -> Presheaf:
    """The presheaf of derivations into Q over the slice of t(Q).

    Elements at (P, c) are the derivations of (P, c, Q), carried as
    payloads; morphisms act by precomposition.  The representing slice
    object (Q, id) is stored on the presheaf as `rep_obj`."""
    cache = sys.__dict__.setdefault("_pos_rep_cache", {})
    if Q not in cache:
        D = sys.D
        S = slice_of(sys, sys.shape(Q))
        elements = []
        payloads = []
        pos: list[dict[int, int]] = []
        for (P, c) in S.obj_tags:
            ders = sys.derivations(P, c, Q)
            elements.append(tuple(D.mor_names[d] for d in ders))
            payloads.append(tuple(ders))
            pos.append({d: k for k, d in enumerate(ders)})
        action = []
        for (alpha, s, u) in S.mor_tags:
            action.append(
                tuple(pos[s][D.compose(alpha, sigma)] for sigma in payloads[u])
            )
        psh = Presheaf(
            f"rep({D.objects[Q]})",
            S.cat,
            tuple(elements),
            tuple(action),
            tuple(payloads),
        )
        psh.rep_obj = S.obj_index[(Q, sys.T.identity[sys.shape(Q)])]
        cache[Q] = psh
    return cache[Q]


def neg_rep(sys: RefinementSystem, P: int) -> Presheaf:
    """The presheaf of derivations out of P over the coslice of t(P):
    elements at (d, R) are derivations of (P, d, R), acting by
    postcomposition.  Computed as the positive representation of the
    opposite system, sharing all indices."""
    return pos_rep(sys.op(), P)


def pos_rep_derivation(sys: RefinementSystem, sigma: int, name: str | None = None) -> PshDerivation:
    """Postcomposition with a derivation sigma : Q1 -> Q2 over c, as a
    presheaf derivation rep(Q1) => rep(Q2) over the slice functor of c."""
    D = sys.D
    Q1, Q2, c = D.dom(sigma), D.cod(sigma), sys.t.mor(sigma)
    phi, psi = pos_rep(sys, Q1), pos_rep(sys, Q2)
    F = slice_action(sys, c)
    S1 = slice_of(sys, sys.shape(Q1))
    comps = []
    for i in range(len(S1.obj_tags)):
        j = F.obj(i)
        pos = {tau: k for k, tau in enumerate(psi.payloads[j])}
        comps.append(tuple(pos[D.compose(tau, sigma)] for tau in phi.payloads[i]))
    return PshDerivation(
        name or f"post[{D.mor_names[sigma]}]", phi, psi, F, tuple(comps)
    )


def neg_rep_derivation(sys: RefinementSystem, sigma: int, name: str | None = None) -> PshDerivation:
    """Precomposition with sigma : P1 -> P2 over c, as a presheaf derivation
    rep(P2) => rep(P1) over the coslice functor of c."""
    return pos_rep_derivation(sys.op(), sigma, name)


def representation_ff_check(
    sys: RefinementSystem,
    variance: str = "both",
    max_judgments: int | None = None,
) -> CheckReport:
    """Soundness and completeness of the representations: for every
    judgment (Q1, c, Q2), postcomposition maps the derivation set
    bijectively onto the presheaf derivations rep(Q1) => rep(Q2) over the
    slice functor of c (dually for the negative side)."""
    rep = CheckReport(
        f"representation-ff[{sys.name}]",
        "derivations biject with presheaf derivations between representations",
    )
    directions = {"positive": [False], "negative": [True], "both": [False, True]}[variance]
    for use_op in directions:
        s = sys.op() if use_op else sys
        side = "neg" if use_op else "pos"
        count = 0
        for (Q1, c, Q2) in s.judgments():
            if max_judgments is not None and count >= max_judgments:
                rep.record_skip(f"{side}: judgment budget {max_judgments} reached")
                break
            count += 1
            ders = s.derivations(Q1, c, Q2)
            phi, psi = pos_rep(s, Q1), pos_rep(s, Q2)
            F = slice_action(s, c)
            fams = psh_derivations(phi, F, psi)
            fam_set = set(fams)
            images = set()
            bad = None
            for sigma in ders:
                key = pos_rep_derivation(s, sigma).components
                if key not in fam_set:
                    bad = f"image of {s.D.mor_names[sigma]} is not a natural family"
                    break
                images.add(key)
            if bad is None and len(images) != len(ders):
                bad = "postcomposition is not injective"
            if bad is None and len(fams) != len(ders):
                bad = f"{len(ders)} derivations but {len(fams)} natural families"
            rep.check(
                bad is None,
                f"{side} {s.judgment_name(Q1, c, Q2)}: {bad}",
            )
    return rep.done()


# ---------------------------------------------------------------------------
# Factorization through pointed categories and through the comma category


@dataclass(eq=False)
class CommaSystem:
    """The comma category of t over its base, as a refinement system.

    Objects are tagged (Q, c) with c any base morphism out of t(Q);
    morphisms are tagged (alpha, e, src, tgt) with c_src ; e = t(alpha) ;
    c_tgt.  The projection onto the e-component is the system's shape."""

    sys: RefinementSystem
    obj_tags: tuple[tuple[int, int], ...]
    mor_tags: tuple[tuple[int, int, int, int], ...]
    obj_index: dict[tuple[int, int], int]
    mor_index: dict[tuple[int, int, int, int], int]
    embed: RefSysMorphism


def comma_system(base: RefinementSystem, size_guard: int = 60000) -> CommaSystem:
    """Materialize the comma category of t over T with its cod projection,
    plus the vertical embedding P |-> (P, id)."""
    D, T, t = base.D, base.T, base.t
    obj_tags = [
        (Q, c)
        for Q in range(D.n_objects)
        for c in range(T.n_morphisms)
        if T.dom(c) == base.shape(Q)
    ]
    if len(obj_tags) > size_guard:
        raise SizeGuardExceeded("comma category objects", len(obj_tags), size_guard)
    obj_index = {tag: i for i, tag in enumerate(obj_tags)}
    obj_names = [f"({D.objects[Q]},{T.mor_names[c]})" for (Q, c) in obj_tags]

    mor_tags: list[tuple[int, int, int, int]] = []
    for si, (Q1, c1) in enumerate(obj_tags):
        for ti, (Q2, c2) in enumerate(obj_tags):
            for alpha in D.hom(Q1, Q2):
                lhs = T.compose(t.mor(alpha), c2)
                for e in T.hom(T.cod(c1), T.cod(c2)):
                    if T.compose(c1, e) == lhs:
                        mor_tags.append((alpha, e, si, ti))
                        if len(mor_tags) > size_guard:
                            raise SizeGuardExceeded(
                                "comma category morphisms", len(mor_tags), size_guard
                            )
    mor_index = {tag: k for k, tag in enumerate(mor_tags)}
    morphisms = [
        (f"({D.mor_names[alpha]},{T.mor_names[e]})#{si}->{ti}", si, ti)
        for (alpha, e, si, ti) in mor_tags
    ]
    identity = [
        mor_index[(D.identity[Q], T.identity[T.cod(c)], i, i)]
        for i, (Q, c) in enumerate(obj_tags)
    ]

    def comp(f: int, g: int, _mt=mor_tags, _mi=mor_index) -> int:
        a1, e1, s, _ = _mt[f]
        a2, e2, _, u = _mt[g]
        return _mi[(D.compose(a1, a2), T.compose(e1, e2), s, u)]

    cat = FinCategory(f"comma({base.name})", obj_names, morphisms, identity, comp)
    shape = FunctorData(
        f"cod[{base.name}]",
        cat,
        T,
        tuple(T.cod(c) for (_Q, c) in obj_tags),
        tuple(e for (_a, e, _s, _t) in mor_tags),
    )
    comma = RefinementSystem(f"comma({base.name})", shape)
    embed = RefSysMorphism(
        "unit-section",
        base,
        comma,
        FunctorData(
            "into-comma",
            D,
            cat,
            tuple(obj_index[(Q, T.identity[base.shape(Q)])] for Q in range(D.n_objects)),
            tuple(
                mor_index[
                    (
                        a,
                        t.mor(a),
                        obj_index[(D.dom(a), T.identity[base.shape(D.dom(a))])],
                        obj_index[(D.cod(a), T.identity[base.shape(D.cod(a))])],
                    )
                ]
                for a in range(D.n_morphisms)
            ),
        ),
        FunctorData("id-base", T, T, tuple(range(T.n_objects)), tuple(range(T.n_morphisms))),
    )
    return CommaSystem(comma, tuple(obj_tags), tuple(mor_tags), obj_index, mor_index, embed)


def _factorization_one_side(sys: RefinementSystem, rep: CheckReport, side: str, size_guard: int) -> None:
    D, T = sys.D, sys.T

    # The representation presheaves are representable: at each refinement,
    # the hom presheaf of the slice at the point (Q, id) has the same
    # tables as rep(Q) under the evident identification of slice morphisms
    # into the point with derivations.
    for Q in range(D.n_objects):
        phi = pos_rep(sys, Q)
        S = slice_of(sys, sys.shape(Q))
        point = phi.rep_obj
        bad = None
        trans: list[dict[int, int]] = []
        for i in range(len(S.obj_tags)):
            homs = S.cat.hom(i, point)
            if len(homs) != phi.size(i):
                bad = f"{S.obj_name(i)}: {len(homs)} point morphisms vs {phi.size(i)} derivations"
                break
            table = {}
            pos = {d: k for k, d in enumerate(phi.payloads[i])}
            for m in homs:
                alpha = S.mor_tags[m][0]
                if alpha not in pos:
                    bad = f"{S.mor_name(m)} is not a derivation into {D.objects[Q]}"
                    break
                table[m] = pos[alpha]
            if bad is not None or len(set(table.values())) != len(homs):
                bad = bad or f"point morphisms at {S.obj_name(i)} collapse"
                break
            trans.append(table)
        if bad is None:
            for f in range(S.cat.n_morphisms):
                i, j = S.cat.dom(f), S.cat.cod(f)
                for m in S.cat.hom(j, point):
                    if trans[i][S.cat.compose(f, m)] != phi.apply(f, trans[j][m]):
                        bad = f"precomposition with {S.mor_name(f)} disagrees"
                        break
                if bad is not None:
                    break
        rep.check(bad is None, f"{side} representability of {D.objects[Q]}: {bad}")

    # Comma route: the cod projection is an opfibration, the vertical
    # embedding is a morphism of systems, and fiber transport along each
    # base morphism has the same tables as the slice action.
    try:
        cs = comma_system(sys, size_guard)
    except SizeGuardExceeded as exc:
        rep.record_skip(f"{side} comma route: {exc}")
        return
    vrep = cs.sys.validate()
    rep.check(vrep.ok, f"{side} comma system invalid:\n{vrep}")
    mrep = cs.embed.validate()
    rep.check(mrep.ok, f"{side} comma embedding invalid:\n{mrep}")

    comma = cs.sys
    failed_obj = None
    for e in range(T.n_morphisms):
        if T.is_identity(e):
            continue
        B1, B2 = T.dom(e), T.cod(e)
        S1, S2 = slice_of(sys, B1), slice_of(sys, B2)
        F = slice_action(sys, e)
        bad = None
        for i, (P, c) in enumerate(S1.obj_tags):
            src = cs.obj_index[(P, c)]
            tgt = cs.obj_index[(P, T.compose(c, e))]
            ell = cs.mor_index.get((D.identity[P], e, src, tgt))
            if ell is None or not _is_cartesian(comma.op(), e, src, tgt, ell):
                bad = f"canonical lift of {S1.obj_name(i)} along {T.mor_names[e]} is not opcartesian"
                break
            if cs.obj_tags[tgt] != S2.obj_tags[F.obj(i)]:
                bad = f"transport of {S1.obj_name(i)} disagrees with the slice action"
                break
        if bad is None:
            for k, (alpha, s, u) in enumerate(S1.mor_tags):
                src_s = cs.obj_index[S1.obj_tags[s]]
                src_u = cs.obj_index[S1.obj_tags[u]]
                ell_s = cs.mor_index[(D.identity[S1.obj_tags[s][0]], e, src_s, cs.obj_index[S2.obj_tags[F.obj(s)]])]
                ell_u = cs.mor_index[(D.identity[S1.obj_tags[u][0]], e, src_u, cs.obj_index[S2.obj_tags[F.obj(u)]])]
                v = cs.mor_index[(alpha, T.identity[B1], src_s, src_u)]
                composite = comma.D.compose(v, ell_u)
                idB2 = T.identity[B2]
                transported = None
                for w in comma.derivations(cs.obj_index[S2.obj_tags[F.obj(s)]], idB2, cs.obj_index[S2.obj_tags[F.obj(u)]]):
                    if comma.D.compose(ell_s, w) == composite:
                        transported = w
                        break
                want = S2.mor_tags[F.mor(k)]
                got = None if transported is None else cs.mor_tags[transported]
                if got is None or got[0] != want[0]:
                    bad = f"transport of {S1.mor_name(k)} along {T.mor_names[e]} disagrees with the slice action"
                    break
        if not rep.check(bad is None, f"{side} comma transport: {bad}"):
            failed_obj = e
            break
    if failed_obj is None and all(T.is_identity(e) for e in range(T.n_morphisms)):
        rep.record_skip(f"{side} comma transport: base has only identities")


def factorization_check(sys: RefinementSystem, size_guard: int = 60000) -> CheckReport:
    """The positive representation factors through the slice points and
    through the comma category, and dually for the negative one.

    Checks, for each side: (i) each rep(Q) is the hom presheaf of its
    point, table for table; (ii) the comma projection is a valid system
    whose canonical lifts are opcartesian; (iii) fiber transport along
    every base morphism reproduces the slice action tables."""
    rep = CheckReport(
        f"factorization[{sys.name}]",
        "representations factor through slice points and comma transport",
    )
    _factorization_one_side(sys, rep, "pos", size_guard)
    _factorization_one_side(sys.op(), rep, "neg", size_guard)
    return rep.done()


# ---------------------------------------------------------------------------
# Preservation of pullbacks (and pushforwards, contravariantly)


def preservation_check(sys: RefinementSystem) -> CheckReport:
    """Certified pullbacks become isomorphisms of positive representations;
    certified pushforwards become isomorphisms of negative representations
    onto pullbacks.  The one-way comparison out of the pushed positive
    representation is always constructed; its invertibility is recorded as
    a note, not asserted."""
    rep = CheckReport(
        f"preservation[{sys.name}]",
        "representations preserve certified lifts as vertical isomorphisms",
    )
    T = sys.T
    ops = sys.op()
    one_way_iso = 0
    one_way_total = 0
    for c in range(T.n_morphisms):
        if T.is_identity(c):
            continue
        A, B = T.dom(c), T.cod(c)
        for Q in sys.fiber(B):
            cert = find_pullback(sys, c, Q)
            if cert is None:
                rep.record_skip(
                    f"no pullback of {sys.D.objects[Q]} along {T.mor_names[c]}"
                )
                continue
            comparison = pos_rep_derivation(sys, cert.structural)
            pulled = pull_psh(slice_action(sys, c), pos_rep(sys, Q))
            rep.check(
                is_vertical_iso(comparison.components, pos_rep(sys, cert.result), pulled),
                f"rep({sys.D.objects[cert.result]}) is not pulled rep({sys.D.objects[Q]}) along {T.mor_names[c]}",
            )
        for P in sys.fiber(A):
            cert = find_pushforward(sys, c, P)
            if cert is None:
                rep.record_skip(
                    f"no pushforward of {sys.D.objects[P]} along {T.mor_names[c]}"
                )
                continue
            comparison = neg_rep_derivation(sys, cert.structural)
            pulled = pull_psh(coslice_action(sys, c), neg_rep(sys, P))
            rep.check(
                is_vertical_iso(comparison.components, neg_rep(sys, cert.result), pulled),
                f"negative rep of {sys.D.objects[cert.result]} is not pulled along {T.mor_names[c]}",
            )
            # One-way comparison on the positive side: push the positive
            # representation and factor the postcomposition derivation
            # through it.
            F = slice_action(sys, c)
            pr = push_psh_full(F, pos_rep(sys, P))
            theta = pos_rep_derivation(sys, cert.structural)
            kappa = push_transpose(pr, F, pos_rep(sys, cert.result), theta.components)
            one_way_total += 1
            if is_vertical_iso(kappa.components, pr.presheaf, pos_rep(sys, cert.result)):
                one_way_iso += 1
            rep.record_pass()
    if one_way_total:
        rep.note(
            f"one-way comparison into the pushed positive representation is "
            f"invertible in {one_way_iso}/{one_way_total} instances"
        )
    return rep.done()


# ---------------------------------------------------------------------------
# Monoidal structure on slices


@dataclass(eq=False)
class MonoidObject:
    """A monoid in the base of a monoidal refinement system: an object W
    with multiplication p : W (x) W -> W, and optionally a unit morphism
    from the tensor unit.  Laws are validated, never assumed."""

    mrs: MonoidalRefinementSystem
    W: int
    p: int
    unit_mor: int | None = None

    def validate(self) -> ValidationReport:
        T = self.mrs.sys.T
        mon = self.mrs.mon_base
        report = ValidationReport(f"monoid {T.objects[self.W]}")
        if T.dom(self.p) != mon.tobj(self.W, self.W) or T.cod(self.p) != self.W:
            report.add("endpoints", "multiplication has wrong endpoints")
            return report
        idw = T.identity[self.W]
        lhs = T.compose(mon.tmor(self.p, idw), self.p)
        rhs = T.compose(mon.tmor(idw, self.p), self.p)
        if lhs != rhs:
            report.add("associativity", "p is not associative")
        if self.unit_mor is not None:
            u = self.unit_mor
            if T.dom(u) != mon.unit or T.cod(u) != self.W:
                report.add("unit endpoints", "unit morphism has wrong endpoints")
                return report
            if mon.tobj(mon.unit, self.W) != self.W or mon.tobj(self.W, mon.unit) != self.W:
                report.add("strict unit", "tensor unit is not strict at W")
                return report
            if T.compose(mon.tmor(u, idw), self.p) != idw:
                report.add("left unit", "unit law (u (x) id) ; p = id fails")
            if T.compose(mon.tmor(idw, u), self.p) != idw:
                report.add("right unit", "unit law (id (x) u) ; p = id fails")
        return report


def m_functor(mrs: MonoidalRefinementSystem, B1: int, B2: int) -> tuple[FunctorData, ProductCategory]:
    """Tensor-of-tags functor from the product of two slices into the slice
    of the tensor, cached together with its product base."""
    cache = mrs.__dict__.setdefault("_m_cache", {})
    key = (B1, B2)
    if key not in cache:
        sys = mrs.sys
        S1, S2 = slice_of(sys, B1), slice_of(sys, B2)
        S12 = slice_of(sys, mrs.mon_base.tobj(B1, B2))
        prod = product(S1.cat, S2.cat)
        omap = []
        for x in range(prod.n_objects):
            i, j = prod.split_obj(x)
            (P, c), (Q, d) = S1.obj_tags[i], S2.obj_tags[j]
            omap.append(
                S12.obj_index[(mrs.mon_ref.tobj(P, Q), mrs.mon_base.tmor(c, d))]
            )
        mmap = []
        for m in range(prod.n_morphisms):
            f, g = prod.split_mor(m)
            (a1, s1, t1), (a2, s2, t2) = S1.mor_tags[f], S2.mor_tags[g]
            mmap.append(
                S12.mor_index[
                    (
                        mrs.mon_ref.tmor(a1, a2),
                        omap[prod.pair_obj(s1, s2)],
                        omap[prod.pair_obj(t1, t2)],
                    )
                ]
            )
        T = sys.T
        F = FunctorData(
            f"m[{T.objects[B1]},{T.objects[B2]}]",
            prod,
            S12.cat,
            tuple(omap),
            tuple(mmap),
        )
        cache[key] = (F, prod)
    return cache[key]


def m_derivation(mrs: MonoidalRefinementSystem, P: int, Q: int) -> PshDerivation:
    """The tensor derivation rep(P) x rep(Q) => rep(P (x) Q) over the
    tensor-of-tags functor: a pair of derivations maps to their tensor."""
    sys = mrs.sys
    D = sys.D
    phiP, phiQ = pos_rep(sys, P), pos_rep(sys, Q)
    F, prod = m_functor(mrs, sys.shape(P), sys.shape(Q))
    box, _ = tensor_psh(phiP, phiQ, prod)
    target = pos_rep(sys, mrs.mon_ref.tobj(P, Q))
    comps = []
    for x in range(prod.n_objects):
        i, j = prod.split_obj(x)
        pos = {d: k for k, d in enumerate(target.payloads[F.obj(x)])}
        row = []
        for sigma in phiP.payloads[i]:
            for tau in phiQ.payloads[j]:
                row.append(pos[mrs.mon_ref.tmor(sigma, tau)])
        comps.append(tuple(row))
    return PshDerivation(
        f"m[{D.objects[P]},{D.objects[Q]}]", box, target, F, tuple(comps)
    )


def _strict_left_residual(mrs: MonoidalRefinementSystem, P: int, R: int):
    """Residual data (XD, plugD, XT, plugT) for P \\ R with the refinement
    residual lying strictly over the base residual, or None."""
    t = mrs.sys.t
    resT = find_left_residual(mrs.mon_base, t.obj(P), t.obj(R))
    if resT is None:
        return None
    resD = find_left_residual(mrs.mon_ref, P, R)
    if resD is None:
        return None
    XD, plugD = resD
    XT, plugT = resT
    if t.obj(XD) != XT or t.mor(plugD) != plugT:
        return None
    return (XD, plugD, XT, plugT)


def _strict_right_residual(mrs: MonoidalRefinementSystem, Q: int, R: int):
    t = mrs.sys.t
    resT = find_right_residual(mrs.mon_base, t.obj(Q), t.obj(R))
    if resT is None:
        return None
    resD = find_right_residual(mrs.mon_ref, Q, R)
    if resD is None:
        return None
    YD, plugD = resD
    YT, plugT = resT
    if t.obj(YD) != YT or t.mor(plugD) != plugT:
        return None
    return (YD, plugD, YT, plugT)


def _curry_into(
    fc: FunctorCategory,
    prod: ProductCategory,
    F: FunctorData,
    param_cat: FinCategory,
    arg: str,
    name: str,
) -> FunctorData:
    """Curry F : prod -> C along one argument, landing in the materialized
    functor category fc = [other factor, C].  arg names which factor is
    the parameter: "second" keeps the left factor as the functor domain."""
    C = F.target
    if arg == "second":
        fixed = prod.left

        def obj_of(pi: int, j: int) -> int:
            return F.obj(prod.pair_obj(j, pi))

        def mor_of(pi: int, f: int) -> int:
            return F.mor(prod.pair_mor(f, param_cat.id_of(pi)))

        def nat_of(g: int, j: int) -> int:
            return F.mor(prod.pair_mor(fixed.id_of(j), g))

    elif arg == "first":
        fixed = prod.right

        def obj_of(pi: int, j: int) -> int:
            return F.obj(prod.pair_obj(pi, j))

        def mor_of(pi: int, f: int) -> int:
            return F.mor(prod.pair_mor(param_cat.id_of(pi), f))

        def nat_of(g: int, j: int) -> int:
            return F.mor(prod.pair_mor(g, fixed.id_of(j)))

    else:
        raise StructuralError(f"_curry_into: bad arg {arg!r}")

    omap = []
    for pi in range(param_cat.n_objects):
        G = FunctorData(
            f"{name}@{param_cat.objects[pi]}",
            fixed,
            C,
            tuple(obj_of(pi, j) for j in range(fixed.n_objects)),
            tuple(mor_of(pi, f) for f in range(fixed.n_morphisms)),
        )
        omap.append(fc.find_functor(G))
    mmap = []
    for g in range(param_cat.n_morphisms):
        comps = tuple(nat_of(g, j) for j in range(fixed.n_objects))
        mmap.append(fc.find_nat(omap[param_cat.dom(g)], omap[param_cat.cod(g)], comps))
    return FunctorData(name, param_cat, fc.cat, tuple(omap), tuple(mmap))


def _comparison_components(
    mrs: MonoidalRefinementSystem,
    lhs: Presheaf,
    carrier,
    phi: Presheaf,
    omega: Presheaf,
    res: Presheaf,
    curryF: FunctorData,
    plugD: int,
    order: str,
):
    """Components of the canonical comparison from lhs into the pullback of
    the residual presheaf along curryF.

    An element sigma of lhs at i becomes the family sending tau in phi(a)
    to (tau (x) carrier(sigma)) ; plugD (order "left"), or with the tensor
    flipped (order "right"); the family is then located among the stored
    natural families at the functor curryF(i).  Returns (components, None)
    or (None, failure message)."""
    D = mrs.sys.D
    tmor = mrs.mon_ref.tmor
    omega_pos = [
        {d: k for k, d in enumerate(omega.payloads[o])}
        for o in range(omega.base.n_objects)
    ]
    fam_pos: dict[int, dict] = {}
    comps = []
    for i in range(lhs.base.n_objects):
        Gi = curryF.obj(i)
        if Gi not in fam_pos:
            fam_pos[Gi] = {fam: k for k, fam in enumerate(res.payloads[Gi])}
        row = []
        for sigma in lhs.payloads[i]:
            sig = carrier(sigma)
            fam = []
            for a in range(phi.base.n_objects):
                vals = []
                for tau in phi.payloads[a]:
                    if order == "left":
                        der = D.compose(tmor(tau, sig), plugD)
                    else:
                        der = D.compose(tmor(sig, tau), plugD)
                    o = _curry_obj_image(mrs, res, Gi, a)
                    pos = omega_pos[o].get(der)
                    if pos is None:
                        return (
                            None,
                            f"canonical image of {D.mor_names[sigma]} misses the residual at {phi.base.objects[a]}",
                        )
                    vals.append(pos)
                fam.append(tuple(vals))
            k = fam_pos[Gi].get(tuple(fam))
            if k is None:
                return (
                    None,
                    f"canonical image of {D.mor_names[sigma]} is not a natural family",
                )
            row.append(k)
        comps.append(tuple(row))
    return (tuple(comps), None)


def _curry_obj_image(mrs, res, Gi, a):
    # res lives over a functor category; its decoder is stashed by the
    # callers below so the comparison can evaluate functors pointwise.
    return res._fc.functors[Gi].obj(a)


def genday_check(
    mrs: MonoidalRefinementSystem,
    P: int,
    Q: int,
    R: int,
    size_guard: int = 20000,
) -> CheckReport:
    """Day-style embedding on slices for one triple of refinements.

    (a) pushing the external tensor of rep(P) and rep(Q) along the
        tensor-of-tags functor gives rep(P (x) Q), with the tensor
        derivation certified opcartesian by the brute-force oracle;
    (b) rep(P \\ R) is the pullback of the presheaf residual along the
        currying of tensor-then-plug, with the comparison certified
        cartesian;
    (c) mirror image for the right residual R / Q.

    Clauses (b) and (c) require the residuals to exist with the refinement
    residual lying strictly over the base one; otherwise they are skipped
    with the unmet hypothesis as the reason."""
    sys = mrs.sys
    D, T, t = sys.D, sys.T, sys.t
    nm = D.objects
    rep = CheckReport(
        f"genday[{nm[P]},{nm[Q]},{nm[R]}]",
        "slice representation strongly preserves tensor and residuals",
    )

    # (a) tensor clause
    md = m_derivation(mrs, P, Q)
    vrep = validate_psh_derivation(md)
    rep.check(vrep.ok, f"(a) tensor derivation invalid:\n{vrep}")
    F = md.functor
    target = md.target
    pr = push_psh_full(F, md.source)
    kappa = push_transpose(pr, F, target, md.components)
    rep.check(
        is_vertical_iso(kappa.components, pr.presheaf, target),
        f"(a) pushed tensor of rep({nm[P]}), rep({nm[Q]}) is not rep({nm[mrs.mon_ref.tobj(P, Q)]})",
    )
    codomains = [representable(target.base, o) for o in range(target.base.n_objects)]
    codomains.append(target)
    codomains.append(pr.presheaf)
    ok, why = opcartesian_factoring_check(pr, F, md.source, codomains)
    rep.check(ok, f"(a) tensor derivation is not opcartesian: {why}")

    # (b) left residual clause
    resL = _strict_left_residual(mrs, P, R)
    if resL is None:
        rep.record_skip(f"(b) no strict left residual for ({nm[P]}, {nm[R]})")
    else:
        _genday_residual_clause(mrs, rep, "(b)", P, R, resL, "left", size_guard)

    # (c) right residual clause
    resR = _strict_right_residual(mrs, Q, R)
    if resR is None:
        rep.record_skip(f"(c) no strict right residual for ({nm[Q]}, {nm[R]})")
    else:
        _genday_residual_clause(mrs, rep, "(c)", Q, R, resR, "right", size_guard)
    return rep.done()


def _genday_residual_clause(mrs, rep, label, P, R, resdata, side, size_guard):
    sys = mrs.sys
    D = sys.D
    nm = D.objects
    XD, plugD, XT, plugT = resdata
    lhs = pos_rep(sys, XD)
    phi = pos_rep(sys, P)
    omega = pos_rep(sys, R)
    SX = slice_of(sys, XT)

    if side == "left":
        Fm, prod = m_functor(mrs, sys.shape(P), XT)
        arg = "second"
    else:
        Fm, prod = m_functor(mrs, XT, sys.shape(P))
        arg = "first"
    plugged = compose_functors(Fm, slice_action(sys, plugT))

    try:
        res, fc = residual_psh(side, phi, omega, size_guard)
    except SizeGuardExceeded as exc:
        rep.record_skip(f"{label} residual presheaf skipped: {exc}")
        return
    res._fc = fc
    curryF = _curry_into(fc, prod, plugged, SX.cat, arg, f"costr{label}")
    order = "left" if side == "left" else "right"
    comps, why = _comparison_components(
        mrs, lhs, lambda s: s, phi, omega, res, curryF, plugD, order
    )
    if comps is None:
        rep.record_fail(f"{label} {why}")
        return
    pulled = pull_psh(curryF, res)
    rep.check(
        is_vertical_iso(comps, lhs, pulled),
        f"{label} rep({nm[XD]}) is not the pulled residual of rep({nm[P]}), rep({nm[R]})",
    )
    theta = PshDerivation(f"costr{label}", lhs, res, curryF, comps)
    vrep = validate_psh_derivation(theta)
    rep.check(vrep.ok, f"{label} comparison derivation invalid:\n{vrep}")
    domains = [representable(SX.cat, o) for o in range(SX.cat.n_objects)]
    domains.append(lhs)
    ok, why = cartesian_factoring_check(theta, domains)
    rep.check(ok, f"{label} comparison is not cartesian: {why}")


# ---------------------------------------------------------------------------
# Fiberwise tensor and residuals over a monoid object


def fiber_tensor(mrs: MonoidalRefinementSystem, mo: MonoidObject, P: int, Q: int):
    """P (x)_W Q as the certified pushforward of the refinement tensor
    along the multiplication, or None when it does not exist."""
    return find_pushforward(mrs.sys, mo.p, mrs.mon_ref.tobj(P, Q))


def _multiplication_curry(mrs: MonoidalRefinementSystem, mo: MonoidObject, side: str):
    """The currying of the multiplication through the base residual:
    (X, plug, curry) with curry : W -> X, or None."""
    mon = mrs.mon_base
    if side == "left":
        found = find_left_residual(mon, mo.W, mo.W)
        if found is None:
            return None
        X, plug = found
        return (X, plug, left_curry(mon, mo.p, mo.W, mo.W, X, plug))
    found = find_right_residual(mon, mo.W, mo.W)
    if found is None:
        return None
    X, plug = found
    return (X, plug, right_curry(mon, mo.p, mo.W, mo.W, X, plug))


def fiber_residual_left(mrs: MonoidalRefinementSystem, mo: MonoidObject, P: int, R: int):
    """The fiber residual P -o_W R: the pullback along the left currying of
    the multiplication of the strict refinement residual, or None when any
    hypothesis is unmet."""
    data = _multiplication_curry(mrs, mo, "left")
    strict = _strict_left_residual(mrs, P, R)
    if data is None or strict is None:
        return None
    _X, _plug, lam = data
    return find_pullback(mrs.sys, lam, strict[0])


def fiber_residual_right(mrs: MonoidalRefinementSystem, mo: MonoidObject, Q: int, R: int):
    data = _multiplication_curry(mrs, mo, "right")
    strict = _strict_right_residual(mrs, Q, R)
    if data is None or strict is None:
        return None
    _X, _plug, rho = data
    return find_pullback(mrs.sys, rho, strict[0])


def monoid_lax_check(
    mrs: MonoidalRefinementSystem,
    mo: MonoidObject,
    size_guard: int = 20000,
) -> CheckReport:
    """The slice representation restricted to the fiber of a monoid.

    For every pair of refinements of W: the coercion from the Day tensor
    of representations into the representation of the fiber tensor exists
    (its invertibility is recorded, not asserted).  For every pair with
    the residual hypotheses met: the representation of the fiber residual
    is isomorphic to the fiber residual of representations."""
    sys = mrs.sys
    D, T = sys.D, sys.T
    nm = D.objects
    rep = CheckReport(
        f"monoid-lax[{T.objects[mo.W]}]",
        "representation of a monoid fiber is lax monoidal and preserves residuals",
    )
    vrep = mo.validate()
    rep.check(vrep.ok, f"monoid laws fail:\n{vrep}")
    if not vrep.ok:
        return rep.done()

    fib = sys.fiber(mo.W)
    Fm, prod = m_functor(mrs, mo.W, mo.W)
    Fday = compose_functors(Fm, slice_action(sys, mo.p))

    iso_count = 0
    coercion_total = 0
    for P in fib:
        for Q in fib:
            tc = fiber_tensor(mrs, mo, P, Q)
            if tc is None:
                rep.record_skip(f"no fiber tensor for ({nm[P]}, {nm[Q]})")
                continue
            md = m_derivation(mrs, P, Q)
            after = pos_rep_derivation(sys, tc.structural)
            comps = tuple(
                tuple(after.components[Fm.obj(x)][v] for v in md.components[x])
                for x in range(prod.n_objects)
            )
            target = pos_rep(sys, tc.result)
            pr = push_psh_full(Fday, md.source)
            try:
                kappa = push_transpose(pr, Fday, target, comps)
            except StructuralError as exc:
                rep.record_fail(f"coercion at ({nm[P]}, {nm[Q]}): {exc}")
                continue
            rep.record_pass()
            coercion_total += 1
            if is_vertical_iso(kappa.components, pr.presheaf, target):
                iso_count += 1
    if coercion_total:
        rep.note(f"coercion invertible in {iso_count}/{coercion_total} instances")

    for side, mate in (("left", fiber_residual_left), ("right", fiber_residual_right)):
        data = _multiplication_curry(mrs, mo, side)
        for P in fib:
            for R in fib:
                cert = mate(mrs, mo, P, R)
                if cert is None:
                    rep.record_skip(
                        f"{side} residual hypotheses unmet for ({nm[P]}, {nm[R]})"
                    )
                    continue
                strict = (
                    _strict_left_residual(mrs, P, R)
                    if side == "left"
                    else _strict_right_residual(mrs, P, R)
                )
                XD, plugD, _XT, _plugT = strict
                lhs = pos_rep(sys, cert.result)
                phi = pos_rep(sys, P)
                omega = pos_rep(sys, R)
                try:
                    res, fc = residual_psh(side, phi, omega, size_guard)
                except SizeGuardExceeded as exc:
                    rep.record_skip(f"{side} residual presheaf skipped: {exc}")
                    continue
                res._fc = fc
                arg = "second" if side == "left" else "first"
                curryW = _curry_into(
                    fc, prod, Fday, slice_of(sys, mo.W).cat, arg, f"day-curry-{side}"
                )
                ell = cert.structural
                order = "left" if side == "left" else "right"
                comps, why = _comparison_components(
                    mrs,
                    lhs,
                    lambda s, _e=ell, _D=D: _D.compose(s, _e),
                    phi,
                    omega,
                    res,
                    curryW,
                    plugD,
                    order,
                )
                if comps is None:
                    rep.record_fail(f"{side} residual at ({nm[P]}, {nm[R]}): {why}")
                    continue
                pulled = pull_psh(curryW, res)
                rep.check(
                    is_vertical_iso(comps, lhs, pulled),
                    f"rep of {side} fiber residual at ({nm[P]}, {nm[R]}) is not the presheaf fiber residual",
                )
    return rep.done()
