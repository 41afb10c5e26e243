"""Slices, representations, and the transfer checks, against hand oracles.

Hoare-side expectations come from the frozen transition table in conftest.
Linear-context expectations come from a brute-force proof counter that only
reads the rule declarations, never the built category.
"""

from refcat.fincat import compose_functors, functors_equal, validate_category, validate_functor
from refcat.psh import validate_psh_derivation
from refcat.refsys import fully_faithful_check
from refcat.represent import (
    comma_system,
    coslice_action,
    coslice_of,
    factorization_check,
    fiber_tensor,
    genday_check,
    m_derivation,
    m_functor,
    monoid_lax_check,
    neg_rep,
    neg_rep_derivation,
    pos_rep,
    pos_rep_derivation,
    preservation_check,
    representation_ff_check,
    slice_action,
    slice_of,
)
from tests.conftest import HOARE_FN, image_oracle, pred_set

STATES = ("s0", "s1")


def composite_command(c1, c2):
    """Name of the transformer 'do c1 then c2' in the frozen table."""
    fn = {s: HOARE_FN[c2][HOARE_FN[c1][s]] for s in STATES}
    return next(n for n, m in HOARE_FN.items() if m == fn)


def test_hoare_slice_matches_the_composition_oracle(hoare):
    S = slice_of(hoare, 0)
    assert validate_category(S.cat).ok
    assert S.cat.n_objects == 16  # every (predicate, command) pair
    expected = 0
    for P, c in S.obj_tags:
        for P2, c2 in S.obj_tags:
            Pn, P2n = hoare.D.objects[P], hoare.D.objects[P2]
            cn, c2n = hoare.T.mor_names[c], hoare.T.mor_names[c2]
            for d in HOARE_FN:
                if composite_command(d, c2n) == cn and image_oracle(d, pred_set(Pn)) <= pred_set(P2n):
                    expected += 1
    assert S.cat.n_morphisms == expected


def test_slice_action_respects_composition(hoare):
    for e1 in range(hoare.T.n_morphisms):
        for e2 in range(hoare.T.n_morphisms):
            two_steps = compose_functors(slice_action(hoare, e1), slice_action(hoare, e2))
            one_step = slice_action(hoare, hoare.T.compose(e1, e2))
            assert functors_equal(two_steps, one_step)
    for e in range(hoare.T.n_morphisms):
        assert validate_functor(coslice_action(hoare, e)).ok


def test_hoare_coslice_shape(hoare):
    C = coslice_of(hoare, 0)
    assert validate_category(C.cat).ok
    assert C.cat.n_objects == 16


def test_pos_rep_sizes_are_derivable_judgments(hoare):
    for Q, Qname in enumerate(hoare.D.objects):
        phi = pos_rep(hoare, Q)
        S = slice_of(hoare, hoare.shape(Q))
        for o, (P, c) in enumerate(S.obj_tags):
            holds = image_oracle(hoare.T.mor_names[c], pred_set(hoare.D.objects[P])) <= pred_set(Qname)
            assert phi.size(o) == (1 if holds else 0)


def test_neg_rep_sizes_are_derivable_judgments(hoare):
    for P, Pname in enumerate(hoare.D.objects):
        psi = neg_rep(hoare, P)
        C = coslice_of(hoare, hoare.shape(P))
        assert psi.base.n_objects == C.cat.n_objects
        for o, (Q, c) in enumerate(C.obj_tags):
            holds = image_oracle(hoare.T.mor_names[c], pred_set(Pname)) <= pred_set(hoare.D.objects[Q])
            assert psi.size(o) == (1 if holds else 0)


def test_representation_is_fully_faithful_on_hoare(hoare):
    for variance in ("positive", "negative", "both"):
        rep = representation_ff_check(hoare, variance=variance)
        assert rep.ok and rep.failed == 0 and rep.passed > 0


def test_rep_derivations_validate(hoare):
    for sigma in range(hoare.D.n_morphisms):
        for build in (pos_rep_derivation, neg_rep_derivation):
            d = build(hoare, sigma)
            assert validate_psh_derivation(d).ok, (build.__name__, sigma)


def test_linctx_slice_over_the_singleton_shape_is_the_context_category(linctx):
    # each context has exactly one map to the one-position shape, so the
    # slice reproduces the context category on the nose
    S = slice_of(linctx, 1)
    assert S.cat.n_objects == linctx.D.n_objects == 35
    assert S.cat.n_morphisms == linctx.D.n_morphisms == 124
    assert sorted(P for P, _ in S.obj_tags) == list(range(35))


def test_linctx_coslice_counts_pointed_contexts(linctx):
    mc, trunc, ctx_index, u_index = linctx.__dict__["linctx_data"]
    points = sum(len(ctx) for ctx in ctx_index)
    assert points == 4 * 1 + 10 * 2 + 20 * 3 == 84
    C = coslice_of(linctx, 1)
    assert C.cat.n_objects == points


def proofs_between(mc, sources, target):
    """Number of declared rules with the given source multiset and target."""
    key = tuple(sorted(sources))
    return sum(
        1
        for mm in mc.multimorphisms
        if tuple(sorted(mm.source)) == key and mm.target == target
    )


def context_morphism_count(mc, src, tgt):
    """Brute force over position assignments; reads only the declarations."""
    total = 0
    for bits in range(len(tgt) ** len(src) if tgt else (1 if not src else 0)):
        u = []
        x = bits
        for _ in range(len(src)):
            u.append(x % len(tgt))
            x //= len(tgt)
        count = 1
        for j, tf in enumerate(tgt):
            srcs = [src[i] for i in range(len(src)) if u[i] == j]
            count *= proofs_between(mc, srcs, tf)
        total += count
    if not tgt:
        total = 1 if not src else 0  # only the empty assignment, needing no rules
        for _ in src:
            total = 0
    return total


def test_pointed_negative_representation_counts(linctx):
    # a pointed context (X, j) supports exactly (proofs into the pointed
    # formula) x (closed proofs of the rest), one factor per position
    mc, trunc, ctx_index, u_index = linctx.__dict__["linctx_data"]
    formulas = mc.formulas
    for F in formulas:
        P = linctx.D.objects.index(f"[{F}]")
        psi = neg_rep(linctx, P)
        C = coslice_of(linctx, 1)
        assert psi.base.n_objects == C.cat.n_objects
        for o, (X, c) in enumerate(C.obj_tags):
            uname = linctx.T.mor_names[c]
            j = int(uname.split("[", 1)[1].rstrip("]"))
            ctx = linctx.D.objects[X].strip("[]")
            parts = tuple(ctx.split(",")) if ctx else ()
            rest = parts[:j] + parts[j + 1 :]
            want = proofs_between(mc, (F,), parts[j])
            for g in rest:
                want *= proofs_between(mc, (), g)
            assert psi.size(o) == want, (F, parts, j)
    # spot total for the first formula per the product formula above
    psi = neg_rep(linctx, linctx.D.objects.index("[A]"))
    assert psi.total_elements() == 3


def test_preservation_counts(hoare, linctx):
    ph = preservation_check(hoare)
    assert ph.ok and (ph.passed, ph.failed, ph.skipped) == (36, 0, 0)
    assert any("4/12" in n for n in ph.notes)
    pl = preservation_check(linctx)
    assert pl.ok and (pl.passed, pl.failed, pl.skipped) == (161, 0, 1669)
    assert any("36/45" in n for n in pl.notes)


def test_factorization_counts(hoare, linctx):
    fh = factorization_check(hoare)
    assert fh.ok and (fh.passed, fh.failed, fh.skipped) == (18, 0, 0)
    fl = factorization_check(linctx)
    assert fl.ok and (fl.passed, fl.failed, fl.skipped) == (70, 0, 2)
    assert all("comma" in r for r in fl.skip_reasons)


def test_comma_system_embedding(hoare):
    cs = comma_system(hoare)
    assert len(cs.obj_tags) == 16
    rep = fully_faithful_check(cs.embed)
    assert rep.ok and rep.failed == 0


def test_fiber_tensor_is_the_meet(collapse):
    names = collapse.mrs.sys.D.objects
    for mo in collapse.monoids:
        fib = collapse.mrs.sys.fiber(mo.W)
        for P in fib:
            for Q in fib:
                cert = fiber_tensor(collapse.mrs, mo, P, Q)
                want = pred_set(names[P]) & pred_set(names[Q])
                assert pred_set(names[cert.result]) == want


def test_genday_on_the_strict_lattice_has_no_skips(ident):
    n = ident.mrs.sys.D.n_objects
    mo = {m.W: m for m in ident.monoids}
    total_failed = total_skipped = 0
    for P in range(n):
        for Q in range(n):
            for R in range(n):
                rep = genday_check(ident.mrs, P, Q, R)
                total_failed += rep.failed
                total_skipped += rep.skipped
    assert total_failed == 0 and total_skipped == 0


def test_genday_on_the_collapse_documents_its_skips(collapse):
    n = collapse.mrs.sys.D.n_objects
    total_failed = total_skipped = 0
    for P in range(n):
        for Q in range(n):
            for R in range(n):
                rep = genday_check(collapse.mrs, P, Q, R)
                total_failed += rep.failed
                total_skipped += rep.skipped
    assert total_failed == 0
    assert total_skipped == 16  # residuals over the collapsed shape are lax


def test_monoid_lax_counts(collapse, ident):
    got = {}
    for mo in collapse.monoids:
        rep = monoid_lax_check(collapse.mrs, mo)
        got[collapse.mrs.sys.T.objects[mo.W]] = (rep.passed, rep.failed, rep.skipped)
    assert got == {"c0": (11, 0, 2), "c1": (2, 0, 2), "c2": (4, 0, 0)}
    for mo in ident.monoids:
        rep = monoid_lax_check(ident.mrs, mo)
        assert (rep.failed, rep.skipped) == (0, 0)


def test_m_functor_and_m_derivation_validate(collapse):
    T = collapse.mrs.sys.T
    F, prod = m_functor(collapse.mrs, 0, 1)
    assert validate_functor(F).ok
    d = m_derivation(collapse.mrs, 1, 2)
    assert validate_psh_derivation(d).ok
