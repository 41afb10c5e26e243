"""The category of judgments, derivation presheaf, brackets, and duals.

Judgments of a refinement system form a category whose morphisms transform
a derivation of one judgment into a derivation of another by composing on
both sides; derivations themselves then form a presheaf on it.  Pairing a
slice with a coslice via base composition (the bracket) lets every
presheaf over a slice be dualized into one over the coslice and back, by
a direct end formula: the dual at a point collects the natural families
of derivations the presheaf can be mapped into.  The checks in this
module verify that the two representations of a refinement are each
other's duals, that dualization interacts with push and pull the way
one-sided image constructions demand, and that pushforwards and fiber
tensors are recovered from their negative encodings up to double
dualization.

Duals are computed pointwise over the indexing slice or coslice; the
functor-category route through the residual presheaf is kept behind an
optional cross-check flag because it is exponential in general.
"""

from __future__ import annotations

from dataclasses import dataclass

from .fincat import (
    FinCategory,
    FunctorData,
    SizeGuardExceeded,
    StructuralError,
    compose_functors,
    product,
)
from .psh import (
    Presheaf,
    natural_families,
    psh_derivations,
    pull_psh,
    push_psh,
    residual_psh,
    tensor_psh,
    vertical_iso_psh,
)
from .refsys import MonoidalRefinementSystem, RefinementSystem, find_pushforward
from .reports import CheckReport
from .represent import (
    MonoidObject,
    _curry_into,
    coslice_action,
    coslice_of,
    fiber_tensor,
    m_functor,
    neg_rep,
    pos_rep,
    slice_action,
    slice_of,
)


# ---------------------------------------------------------------------------
# The category of judgments and its derivation presheaf


@dataclass(eq=False)
class JudgmentCategory:
    """All judgments of a system as a category.

    A morphism (P1,c1,Q1) -> (P2,c2,Q2) is a pair (beta : P1 -> P2,
    gamma : Q2 -> Q1) of D-morphisms with c1 = t(beta) ; c2 ; t(gamma);
    it sends a derivation of the target judgment to beta ; sigma ; gamma.
    """

    sys: RefinementSystem
    cat: FinCategory
    obj_tags: tuple[tuple[int, int, int], ...]
    mor_tags: tuple[tuple[int, int, int, int], ...]
    obj_index: dict[tuple[int, int, int], int]
    mor_index: dict[tuple[int, int, int, int], int]
    der: Presheaf


def judgment_category(sys: RefinementSystem, size_guard: int = 200000) -> JudgmentCategory:
    """Materialize the judgment category with its derivation presheaf,
    cached on the system after the first successful build."""
    if "_jdg_cache" in sys.__dict__:
        return sys.__dict__["_jdg_cache"]
    D, T, t = sys.D, sys.T, sys.t
    obj_tags = tuple(sys.judgments())
    if len(obj_tags) > size_guard:
        raise SizeGuardExceeded("judgment objects", len(obj_tags), size_guard)
    obj_index = {tag: i for i, tag in enumerate(obj_tags)}
    obj_names = [sys.judgment_name(P, c, Q) for (P, c, Q) in obj_tags]

    # Morphisms are enumerated by their derivation pair, not by object
    # pairs: the base leg of the source judgment is determined.
    mor_tags: list[tuple[int, int, int, int]] = []
    for beta in range(D.n_morphisms):
        P1, P2 = D.dom(beta), D.cod(beta)
        e = t.mor(beta)
        for gamma in range(D.n_morphisms):
            Q2, Q1 = D.dom(gamma), D.cod(gamma)
            ep = t.mor(gamma)
            for c2 in T.hom(sys.shape(P2), sys.shape(Q2)):
                c1 = T.compose(e, T.compose(c2, ep))
                si = obj_index[(P1, c1, Q1)]
                ti = obj_index[(P2, c2, Q2)]
                mor_tags.append((beta, gamma, si, ti))
                if len(mor_tags) > size_guard:
                    raise SizeGuardExceeded(
                        "judgment morphisms", len(mor_tags), size_guard
                    )
    mor_index = {tag: k for k, tag in enumerate(mor_tags)}
    morphisms = [
        (f"({D.mor_names[b]},{D.mor_names[g]})#{si}->{ti}", si, ti)
        for (b, g, si, ti) in mor_tags
    ]
    identity = [
        mor_index[(D.identity[P], D.identity[Q], i, i)]
        for i, (P, _c, Q) in enumerate(obj_tags)
    ]

    def comp(f: int, g: int, _mt=mor_tags, _mi=mor_index, _D=D) -> int:
        b1, g1, s, _ = _mt[f]
        b2, g2, _, u = _mt[g]
        return _mi[(_D.compose(b1, b2), _D.compose(g2, g1), s, u)]

    cat = FinCategory(f"jdg({sys.name})", obj_names, morphisms, identity, comp)

    elements = []
    payloads = []
    pos: list[dict[int, int]] = []
    for (P, c, Q) in obj_tags:
        ders = sys.derivations(P, c, Q)
        elements.append(tuple(D.mor_names[d] for d in ders))
        payloads.append(tuple(ders))
        pos.append({d: k for k, d in enumerate(ders)})
    action = []
    for (beta, gamma, si, ti) in mor_tags:
        action.append(
            tuple(
                pos[si][D.compose(beta, D.compose(sigma, gamma))]
                for sigma in payloads[ti]
            )
        )
    der = Presheaf(
        f"der({sys.name})", cat, tuple(elements), tuple(action), tuple(payloads)
    )
    jdg = JudgmentCategory(sys, cat, obj_tags, tuple(mor_tags), obj_index, mor_index, der)
    sys.__dict__["_jdg_cache"] = jdg
    return jdg


def der_presheaf(sys: RefinementSystem, size_guard: int = 200000) -> Presheaf:
    """The derivation presheaf over the judgment category."""
    return judgment_category(sys, size_guard).der


def bracket(sys: RefinementSystem, B: int, size_guard: int = 200000) -> FunctorData:
    """The pairing functor slice x coslice -> judgments over one base
    object, sending ((P,c),(d,R)) to (P, c;d, R).  The product base is
    stashed on the functor as `prod`."""
    cache = sys.__dict__.setdefault("_bracket_cache", {})
    if B not in cache:
        jdg = judgment_category(sys, size_guard)
        T = sys.T
        S, Cs = slice_of(sys, B), coslice_of(sys, B)
        prod = product(S.cat, Cs.cat)
        omap = []
        for x in range(prod.n_objects):
            i, j = prod.split_obj(x)
            (P, c) = S.obj_tags[i]
            (R, d) = Cs.obj_tags[j]
            omap.append(jdg.obj_index[(P, T.compose(c, d), R)])
        mmap = []
        for m in range(prod.n_morphisms):
            f, g = prod.split_mor(m)
            (alpha, s1, t1) = S.mor_tags[f]
            (gamma, s2, t2) = Cs.mor_tags[g]
            mmap.append(
                jdg.mor_index[
                    (
                        alpha,
                        gamma,
                        omap[prod.pair_obj(s1, s2)],
                        omap[prod.pair_obj(t1, t2)],
                    )
                ]
            )
        F = FunctorData(
            f"cut[{T.objects[B]}]", prod, jdg.cat, tuple(omap), tuple(mmap)
        )
        F.prod = prod
        cache[B] = F
    return cache[B]


def extranat_check(sys: RefinementSystem, size_guard: int = 200000) -> CheckReport:
    """For every base morphism c : A -> B, acting on the slice side before
    pairing equals acting on the coslice side: (slice(c) x id);cut_B and
    (id x coslice(c));cut_A agree as functor tables on slice(A) x
    coslice(B).  Holds by associativity of base composition; verified
    entry by entry."""
    rep = CheckReport(
        f"extranat[{sys.name}]",
        "bracket pairing is balanced over every base morphism",
    )
    T = sys.T
    try:
        judgment_category(sys, size_guard)
    except SizeGuardExceeded as exc:
        rep.record_skip(f"judgment category skipped: {exc}")
        return rep.done()
    for c in range(T.n_morphisms):
        A, B = T.dom(c), T.cod(c)
        SA, CsB = slice_of(sys, A), coslice_of(sys, B)
        cutA, cutB = bracket(sys, A), bracket(sys, B)
        Fsl = slice_action(sys, c)
        Fco = coslice_action(sys, c)
        prodA, prodB = cutA.prod, cutB.prod
        bad = None
        for i in range(SA.cat.n_objects):
            for j in range(CsB.cat.n_objects):
                lhs = cutB.obj(prodB.pair_obj(Fsl.obj(i), j))
                rhs = cutA.obj(prodA.pair_obj(i, Fco.obj(j)))
                if lhs != rhs:
                    bad = f"objects disagree at ({SA.obj_name(i)}, {CsB.obj_name(j)})"
                    break
            if bad:
                break
        if bad is None:
            for f in range(SA.cat.n_morphisms):
                for g in range(CsB.cat.n_morphisms):
                    lhs = cutB.mor(prodB.pair_mor(Fsl.mor(f), g))
                    rhs = cutA.mor(prodA.pair_mor(f, Fco.mor(g)))
                    if lhs != rhs:
                        bad = f"morphisms disagree at ({SA.mor_name(f)}, {CsB.mor_name(g)})"
                        break
                if bad:
                    break
        rep.check(bad is None, f"{T.mor_names[c]}: {bad}")
    return rep.done()


# ---------------------------------------------------------------------------
# Dualization by the direct end formula


def _cut_presheaf(sys: RefinementSystem, B: int, fixed: str, idx: int) -> tuple[Presheaf, list[dict[int, int]]]:
    """Derivation sets (P, c;d, R) with one side of the bracket fixed.

    fixed="coslice": the coslice point idx is fixed; result lives over the
    slice with precomposition action.  fixed="slice": mirror image.  Also
    returns per-object position dicts for the derivation payloads.
    Cached per system: these tables are shared by every dualization over
    the same base object."""
    cache = sys.__dict__.setdefault("_cut_psh_cache", {})
    key = (B, fixed, idx)
    if key in cache:
        return cache[key]
    D, T = sys.D, sys.T
    S, Cs = slice_of(sys, B), coslice_of(sys, B)
    if fixed == "coslice":
        base, tags = S, S.obj_tags
        (R, d) = Cs.obj_tags[idx]
        sets = [
            sys.derivations(P, T.compose(c, d), R) for (P, c) in tags
        ]
        name = f"cut(-,{Cs.obj_name(idx)})"
    else:
        base, tags = Cs, Cs.obj_tags
        (P, c) = S.obj_tags[idx]
        sets = [
            sys.derivations(P, T.compose(c, d), R) for (R, d) in tags
        ]
        name = f"cut({S.obj_name(idx)},-)"
    pos = [{x: k for k, x in enumerate(s)} for s in sets]
    action = []
    for (m, s, u) in base.mor_tags:
        if fixed == "coslice":
            action.append(tuple(pos[s][D.compose(m, x)] for x in sets[u]))
        else:
            action.append(tuple(pos[s][D.compose(x, m)] for x in sets[u]))
    psh = Presheaf(
        name,
        base.cat,
        tuple(tuple(D.mor_names[x] for x in s) for s in sets),
        tuple(action),
        tuple(tuple(s) for s in sets),
    )
    cache[key] = (psh, pos)
    return psh, pos


def dual_left(
    sys: RefinementSystem,
    B: int,
    phi: Presheaf,
    cross_check: bool = False,
    size_guard: int = 10000,
) -> Presheaf:
    """The left dual of a presheaf over the slice of B: at a coslice point
    (d,R), the natural families sending phi(P,c) into derivations
    (P, c;d, R); coslice morphisms act by postcomposing every value.

    With cross_check the dual is recomputed by pulling the residual
    presheaf of derivations back along the curried bracket and compared
    elementwise; that route materializes a functor category and is the
    only place the size guard can fire."""
    D = sys.D
    S, Cs = slice_of(sys, B), coslice_of(sys, B)
    if phi.base is not S.cat:
        raise StructuralError(
            f"dual_left: {phi.name} does not live over the slice of {sys.T.objects[B]}"
        )
    cuts = [_cut_presheaf(sys, B, "coslice", j) for j in range(Cs.cat.n_objects)]
    fams_at = [natural_families(phi, psi) for (psi, _pos) in cuts]
    fam_index = [{fam: k for k, fam in enumerate(fams)} for fams in fams_at]
    elements = tuple(
        tuple(f"s{j}.{k}" for k in range(len(fams_at[j])))
        for j in range(Cs.cat.n_objects)
    )
    action = []
    for mk, (gamma, s, u) in enumerate(Cs.mor_tags):
        psi_u, _ = cuts[u]
        _, pos_s = cuts[s]
        row = []
        for fam in fams_at[u]:
            moved = tuple(
                tuple(
                    pos_s[i][D.compose(psi_u.payloads[i][v], gamma)] for v in fam[i]
                )
                for i in range(S.cat.n_objects)
            )
            k = fam_index[s].get(moved)
            if k is None:
                raise StructuralError(
                    f"dual_left: moved family not natural along {Cs.mor_name(mk)}"
                )
            row.append(k)
        action.append(tuple(row))
    out = Presheaf(
        f"dualL({phi.name})",
        Cs.cat,
        elements,
        tuple(action),
        tuple(tuple(fams) for fams in fams_at),
    )
    if cross_check:
        _dual_cross_check(sys, B, phi, out, "left", size_guard)
    return out


def dual_right(
    sys: RefinementSystem,
    B: int,
    psi: Presheaf,
    cross_check: bool = False,
    size_guard: int = 10000,
) -> Presheaf:
    """The right dual of a presheaf over the coslice of B: at a slice
    point (P,c), the natural families sending psi(d,R) into derivations
    (P, c;d, R); slice morphisms act by precomposing every value."""
    D = sys.D
    S, Cs = slice_of(sys, B), coslice_of(sys, B)
    if psi.base is not Cs.cat:
        raise StructuralError(
            f"dual_right: {psi.name} does not live over the coslice of {sys.T.objects[B]}"
        )
    cuts = [_cut_presheaf(sys, B, "slice", i) for i in range(S.cat.n_objects)]
    fams_at = [natural_families(psi, chi) for (chi, _pos) in cuts]
    fam_index = [{fam: k for k, fam in enumerate(fams)} for fams in fams_at]
    elements = tuple(
        tuple(f"s{i}.{k}" for k in range(len(fams_at[i])))
        for i in range(S.cat.n_objects)
    )
    action = []
    for mk, (alpha, s, u) in enumerate(S.mor_tags):
        chi_u, _ = cuts[u]
        _, pos_s = cuts[s]
        row = []
        for fam in fams_at[u]:
            moved = tuple(
                tuple(
                    pos_s[j][D.compose(alpha, chi_u.payloads[j][v])] for v in fam[j]
                )
                for j in range(Cs.cat.n_objects)
            )
            k = fam_index[s].get(moved)
            if k is None:
                raise StructuralError(
                    f"dual_right: moved family not natural along {S.mor_name(mk)}"
                )
            row.append(k)
        action.append(tuple(row))
    out = Presheaf(
        f"dualR({psi.name})",
        S.cat,
        elements,
        tuple(action),
        tuple(tuple(fams) for fams in fams_at),
    )
    if cross_check:
        _dual_cross_check(sys, B, psi, out, "right", size_guard)
    return out


def _dual_cross_check(sys, B, inp, out, side, size_guard):
    """Recompute a dual through the residual presheaf over the functor
    category and the curried bracket, and compare elementwise."""
    jdg = judgment_category(sys, size_guard)
    cut = bracket(sys, B, size_guard)
    S, Cs = slice_of(sys, B), coslice_of(sys, B)
    res, fc = residual_psh(side, inp, jdg.der, size_guard)
    if side == "left":
        curry = _curry_into(fc, cut.prod, cut, Cs.cat, "second", "lambda-cut")
    else:
        curry = _curry_into(fc, cut.prod, cut, S.cat, "first", "rho-cut")
    crossed = pull_psh(curry, res)
    for j in range(out.base.n_objects):
        if crossed.payloads[j] != out.payloads[j]:
            raise StructuralError(
                f"dual ({side}): direct end disagrees with the residual route at "
                f"{out.base.objects[j]}"
            )


# ---------------------------------------------------------------------------
# The dual adjunction


def _unit_components(phi: Presheaf, dl: Presheaf, drdl: Presheaf):
    """Components of phi => dual_right(dual_left(phi)): an element u maps
    to the family evaluating every left-dual family at u.  Mirrored, the
    same shape computes psi => dual_left(dual_right(psi)).  Returns
    (table, None) or (None, failure)."""
    comps = []
    for i in range(phi.base.n_objects):
        fam_pos = {fam: k for k, fam in enumerate(drdl.payloads[i])}
        row = []
        for upos in range(phi.size(i)):
            table = tuple(
                tuple(fam[i][upos] for fam in dl.payloads[j])
                for j in range(dl.base.n_objects)
            )
            k = fam_pos.get(table)
            if k is None:
                return None, f"unit misses a family at {phi.base.objects[i]}"
            row.append(k)
        comps.append(tuple(row))
    return tuple(comps), None


def _restrict_dual(v_comps, dl_target: Presheaf, dl_source: Presheaf):
    """Dualization is contravariant on vertical maps: a vertical
    v : phi => phi' restricts families of phi' to families of phi.
    Returns the component table dl(phi') => dl(phi), or None."""
    comps = []
    for j in range(dl_source.base.n_objects):
        fam_pos = {fam: k for k, fam in enumerate(dl_target.payloads[j])}
        row = []
        for fam in dl_source.payloads[j]:
            moved = tuple(
                tuple(fam[i][v_comps[i][u]] for u in range(len(v_comps[i])))
                for i in range(len(v_comps))
            )
            k = fam_pos.get(moved)
            if k is None:
                return None
            row.append(k)
        comps.append(tuple(row))
    return tuple(comps)


def dual_adjunction_check(
    sys: RefinementSystem,
    B: int,
    extra_pos: tuple[Presheaf, ...] = (),
    extra_neg: tuple[Presheaf, ...] = (),
    size_guard: int = 200000,
) -> CheckReport:
    """The two dualizers are adjoint on the right: a subtyping into a
    right dual, a subtyping into a left dual, and a bracket-compatible
    pairing are equivalent data.  Checked on representables plus any
    supplied presheaves; additionally the unit into the double dual
    exists for every input and the triangle composite on the left dual
    is the identity."""
    rep = CheckReport(
        f"dual-adjunction[{sys.name}@{sys.T.objects[B]}]",
        "dualization is a contravariant adjunction between slice and coslice presheaves",
    )
    pool_pos = [pos_rep(sys, Q) for Q in sys.fiber(B)] + list(extra_pos)
    pool_neg = [neg_rep(sys, P) for P in sys.fiber(B)] + list(extra_neg)

    jdg = None
    cut = None
    try:
        jdg = judgment_category(sys, size_guard)
        cut = bracket(sys, B, size_guard)
    except SizeGuardExceeded as exc:
        rep.record_skip(f"pairing clause skipped: {exc}")

    duals_l = [dual_left(sys, B, phi) for phi in pool_pos]
    duals_r = [dual_right(sys, B, psi) for psi in pool_neg]

    for pi, phi in enumerate(pool_pos):
        for qi, psi in enumerate(pool_neg):
            e1 = bool(natural_families(phi, duals_r[qi]))
            e2 = bool(natural_families(psi, duals_l[pi]))
            agree = e1 == e2
            detail = (
                f"phi={phi.name} psi={psi.name}: into-right-dual {e1}, into-left-dual {e2}"
            )
            if jdg is not None:
                box, _ = tensor_psh(phi, psi, cut.prod)
                e3 = bool(psh_derivations(box, cut, jdg.der))
                agree = agree and e2 == e3
                detail += f", pairing {e3}"
            rep.check(agree, detail)

    for pi, phi in enumerate(pool_pos):
        dl = duals_l[pi]
        drdl = dual_right(sys, B, dl)
        eta, why = _unit_components(phi, dl, drdl)
        rep.check(eta is not None, f"unit at {phi.name}: {why}")
        if eta is None:
            continue
        # Triangle: dl(phi) => dl(dr(dl(phi))) => dl(phi) is the identity,
        # where the first leg is the unit of the mirrored adjunction and
        # the second is dualization applied to the unit at phi.
        dldrdl = dual_left(sys, B, drdl)
        eps, why = _unit_components(dl, drdl, dldrdl)
        rep.check(eps is not None, f"mirrored unit at {dl.name}: {why}")
        if eps is None:
            continue
        back = _restrict_dual(eta, dl, dldrdl)
        if back is None:
            rep.record_fail(f"restriction along the unit of {phi.name} is not natural")
            continue
        bad = None
        for j in range(dl.base.n_objects):
            for v in range(dl.size(j)):
                if back[j][eps[j][v]] != v:
                    bad = f"triangle composite moves an element at {dl.base.objects[j]}"
                    break
            if bad:
                break
        rep.check(bad is None, f"{phi.name}: {bad}")
    return rep.done()


# ---------------------------------------------------------------------------
# The duality theorem


def duality_check(sys: RefinementSystem, Q: int, size_guard: int = 200000) -> CheckReport:
    """The two representations of a refinement determine each other by
    dualization: the negative one is the left dual of the positive one
    and the positive one is the right dual of the negative one.  When the
    judgment category fits the guard, the representations are first
    re-derived by pulling the derivation presheaf back along the two
    curried bracket sections."""
    D, T = sys.D, sys.T
    B = sys.shape(Q)
    rep = CheckReport(
        f"duality[{sys.name}:{D.objects[Q]}]",
        "positive and negative representations are two duals of one refinement",
    )
    S, Cs = slice_of(sys, B), coslice_of(sys, B)
    phi, psi = pos_rep(sys, Q), neg_rep(sys, Q)

    try:
        jdg = judgment_category(sys, size_guard)
        cut = bracket(sys, B, size_guard)
        prod = cut.prod
        j0 = Cs.obj_index[(Q, T.identity[B])]
        kQ = FunctorData(
            f"cut(-,{Cs.obj_name(j0)})",
            S.cat,
            jdg.cat,
            tuple(cut.obj(prod.pair_obj(i, j0)) for i in range(S.cat.n_objects)),
            tuple(
                cut.mor(prod.pair_mor(f, Cs.cat.id_of(j0)))
                for f in range(S.cat.n_morphisms)
            ),
        )
        pulled = pull_psh(kQ, jdg.der)
        rep.check(
            vertical_iso_psh(phi, pulled) is not None,
            f"rep({D.objects[Q]}) is not the derivation presheaf along its point section",
        )
        if pulled.payloads == phi.payloads:
            rep.note("positive section pullback agrees with rep tables exactly")
        i0 = S.obj_index[(Q, T.identity[B])]
        vQ = FunctorData(
            f"cut({S.obj_name(i0)},-)",
            Cs.cat,
            jdg.cat,
            tuple(cut.obj(prod.pair_obj(i0, j)) for j in range(Cs.cat.n_objects)),
            tuple(
                cut.mor(prod.pair_mor(S.cat.id_of(i0), g))
                for g in range(Cs.cat.n_morphisms)
            ),
        )
        pulled = pull_psh(vQ, jdg.der)
        rep.check(
            vertical_iso_psh(psi, pulled) is not None,
            f"negative rep({D.objects[Q]}) is not the derivation presheaf along its point section",
        )
        if pulled.payloads == psi.payloads:
            rep.note("negative section pullback agrees with rep tables exactly")
    except SizeGuardExceeded as exc:
        rep.record_skip(f"section sub-steps skipped: {exc}")

    dl = dual_left(sys, B, phi)
    rep.check(
        vertical_iso_psh(psi, dl) is not None,
        f"negative rep({D.objects[Q]}) is not the left dual of the positive one",
    )
    dr = dual_right(sys, B, psi)
    rep.check(
        vertical_iso_psh(phi, dr) is not None,
        f"positive rep({D.objects[Q]}) is not the right dual of the negative one",
    )
    return rep.done()


# ---------------------------------------------------------------------------
# Duals against push and pull


def notpush_check(
    sys: RefinementSystem,
    c: int,
    phi: Presheaf,
    psi: Presheaf | None = None,
) -> CheckReport:
    """How dualization converts pushes to pulls across a base morphism
    c : A -> B, for phi over the slice of A (and a companion psi over the
    coslice of B, defaulting to the left dual of the pushed phi):

    (1) pulling the left dual back equals the left dual of the push (iso);
    (2) mirror image for right duals of coslice presheaves (iso);
    (3),(4) the corresponding composites around the squares admit one-way
    comparisons whose invertibility is recorded per instance, never
    asserted."""
    T = sys.T
    A, B = T.dom(c), T.cod(c)
    rep = CheckReport(
        f"notpush[{sys.name}:{T.mor_names[c]}:{phi.name}]",
        "dualization exchanges push and pull across a base morphism",
    )
    if phi.base is not slice_of(sys, A).cat:
        raise StructuralError(f"notpush_check: {phi.name} must live over the slice of {T.objects[A]}")
    pushed = push_psh(slice_action(sys, c), phi)
    dl_pushed = dual_left(sys, B, pushed)
    lhs = pull_psh(coslice_action(sys, c), dual_left(sys, A, phi))
    rep.check(
        vertical_iso_psh(lhs, dl_pushed) is not None,
        "pulled left dual differs from left dual of the push",
    )

    if psi is None:
        psi = dl_pushed
    pushed_n = push_psh(coslice_action(sys, c), psi)
    dr_pushed = dual_right(sys, A, pushed_n)
    lhs2 = pull_psh(slice_action(sys, c), dual_right(sys, B, psi))
    rep.check(
        vertical_iso_psh(lhs2, dr_pushed) is not None,
        "pulled right dual differs from right dual of the push",
    )

    # One-way composites around the same squares.
    one = push_psh(coslice_action(sys, c), dl_pushed)
    fams = natural_families(one, dual_left(sys, A, phi))
    rep.check(bool(fams), "no comparison from the pushed left dual of the push")
    back = natural_families(dual_left(sys, A, phi), one)
    rep.note(
        f"converse comparison {'exists' if back else 'absent'}; "
        f"iso {'yes' if vertical_iso_psh(one, dual_left(sys, A, phi)) else 'no'}"
    )

    two = push_psh(slice_action(sys, c), dr_pushed)
    fams = natural_families(two, dual_right(sys, B, psi))
    rep.check(bool(fams), "no comparison from the pushed right dual of the push")
    back = natural_families(dual_right(sys, B, psi), two)
    rep.note(
        f"mirror converse {'exists' if back else 'absent'}; "
        f"iso {'yes' if vertical_iso_psh(two, dual_right(sys, B, psi)) else 'no'}"
    )
    return rep.done()


def negative_encoding_check(sys: RefinementSystem, c: int, P: int) -> CheckReport:
    """A pushforward is recovered from negative data in two ways: the
    right dual of the pulled negative representation, and the double dual
    of the pushed positive representation.  The single push itself need
    not be isomorphic to the representation of the pushforward; its
    status is recorded as a note."""
    D, T = sys.D, sys.T
    rep = CheckReport(
        f"negative-encoding[{sys.name}:{T.mor_names[c]}:{D.objects[P]}]",
        "pushforward representation is recovered by dualizing negative data",
    )
    cert = find_pushforward(sys, c, P)
    if cert is None:
        rep.record_skip(f"no pushforward of {D.objects[P]} along {T.mor_names[c]}")
        return rep.done()
    B = T.cod(c)
    target = pos_rep(sys, cert.result)

    pulled = pull_psh(coslice_action(sys, c), neg_rep(sys, P))
    rep.check(
        vertical_iso_psh(target, dual_right(sys, B, pulled)) is not None,
        f"right dual of pulled negative rep({D.objects[P]}) is not rep({D.objects[cert.result]})",
    )

    pushed = push_psh(slice_action(sys, c), pos_rep(sys, P))
    rep.check(
        vertical_iso_psh(target, dual_right(sys, B, dual_left(sys, B, pushed)))
        is not None,
        f"double dual of pushed rep({D.objects[P]}) is not rep({D.objects[cert.result]})",
    )
    rep.note(
        "single push isomorphic to the pushforward representation: "
        + ("yes" if vertical_iso_psh(pushed, target) else "no")
    )
    return rep.done()


def notnottensor_check(
    mrs: MonoidalRefinementSystem, mo: MonoidObject, P: int, Q: int
) -> CheckReport:
    """The fiber tensor over a monoid is recovered from its Day tensor of
    representations up to double dualization, even where the Day tensor
    itself is only laxly comparable."""
    sys = mrs.sys
    D, T = sys.D, sys.T
    rep = CheckReport(
        f"notnot-tensor[{T.objects[mo.W]}:{D.objects[P]},{D.objects[Q]}]",
        "fiber tensor representation is the double dual of the Day tensor",
    )
    cert = fiber_tensor(mrs, mo, P, Q)
    if cert is None:
        rep.record_skip(f"no fiber tensor for ({D.objects[P]}, {D.objects[Q]})")
        return rep.done()
    Fm, prod = m_functor(mrs, mo.W, mo.W)
    Fday = compose_functors(Fm, slice_action(sys, mo.p))
    box, _ = tensor_psh(pos_rep(sys, P), pos_rep(sys, Q), prod)
    day = push_psh(Fday, box)
    target = pos_rep(sys, cert.result)
    rep.check(
        vertical_iso_psh(target, dual_right(sys, mo.W, dual_left(sys, mo.W, day)))
        is not None,
        f"double dual of the Day tensor is not rep({D.objects[cert.result]})",
    )
    rep.note(
        "Day tensor isomorphic to the fiber tensor representation: "
        + ("yes" if vertical_iso_psh(day, target) else "no")
    )
    return rep.done()
