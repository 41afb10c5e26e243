"""Refinement systems: judgments, lifts against independent oracles, laws."""

import pytest
from hypothesis import given, settings, strategies as st

from refcat.fincat import identity_functor
from refcat.fixtures import (
    collapse_lattice_fixture,
    random_refsys,
)
from refcat.refsys import (
    RefSysMorphism,
    find_left_residual,
    find_pullback,
    find_pushforward,
    find_right_residual,
    fully_faithful_check,
    is_fibration,
    is_opfibration,
    pullpush_laws_check,
)
from tests.conftest import HOARE_FN, image_oracle, pred_name, pred_set, preimage_oracle


def test_hoare_shape_and_judgments(hoare):
    assert hoare.D.n_objects == 4
    assert hoare.T.n_morphisms == 4
    triples = list(hoare.judgments())
    assert len(triples) == 4 * 4 * 4
    # thin system: a judgment holds iff the image lands inside the target
    for P, c, Q in triples:
        ders = hoare.derivations(P, c, Q)
        expect = image_oracle(hoare.T.mor_names[c], pred_set(hoare.D.objects[P]))
        holds = expect <= pred_set(hoare.D.objects[Q])
        assert (len(ders) == 1) == holds
        assert len(ders) <= 1


def test_every_pushforward_is_the_image(hoare):
    for c, cname in enumerate(hoare.T.mor_names):
        for P, Pname in enumerate(hoare.D.objects):
            cert = find_pushforward(hoare, c, P)
            assert cert is not None, (cname, Pname)
            assert cert.direction == "pushforward"
            assert hoare.D.objects[cert.result] == pred_name(image_oracle(cname, pred_set(Pname)))
            assert cert.tests > 0


def test_every_pullback_is_the_preimage(hoare):
    for c, cname in enumerate(hoare.T.mor_names):
        for Q, Qname in enumerate(hoare.D.objects):
            cert = find_pullback(hoare, c, Q)
            assert cert is not None, (cname, Qname)
            assert cert.direction == "pullback"
            assert hoare.D.objects[cert.result] == pred_name(preimage_oracle(cname, pred_set(Qname)))
            assert cert.tests > 0


def test_lifts_are_adjoint_across_all_judgments(hoare):
    # push(c,P) refines into Q exactly when P refines into pull(c,Q)
    for c in range(hoare.T.n_morphisms):
        for P in range(hoare.D.n_objects):
            push = find_pushforward(hoare, c, P).result
            for Q in range(hoare.D.n_objects):
                pull = find_pullback(hoare, c, Q).result
                lhs = hoare.derivable(push, hoare.T.id_of(0), Q)
                rhs = hoare.derivable(P, hoare.T.id_of(0), pull)
                assert lhs == rhs


def test_hoare_is_a_bifibration(hoare):
    ok_fib, missing = is_fibration(hoare)
    assert ok_fib and not missing
    ok_opf, missing = is_opfibration(hoare)
    assert ok_opf and not missing


def test_pullpush_laws(hoare):
    rep = pullpush_laws_check(hoare)
    assert rep.ok and rep.failed == 0
    assert rep.passed > 0


def test_op_is_an_involution_on_tables(hoare):
    opop = hoare.op().op()
    assert opop.D.mor_dom == hoare.D.mor_dom
    assert opop.D.mor_cod == hoare.D.mor_cod
    assert opop.T.mor_dom == hoare.T.mor_dom
    for f, g in hoare.D.composable_pairs():
        assert opop.D.compose(f, g) == hoare.D.compose(f, g)


def test_op_swaps_lift_directions(hoare):
    op = hoare.op()
    for c in range(hoare.T.n_morphisms):
        for P in range(hoare.D.n_objects):
            push = find_pushforward(hoare, c, P)
            pull_in_op = find_pullback(op, c, P)
            assert pull_in_op is not None
            assert pull_in_op.result == push.result


def test_vertical_iso_is_reflexive_only_here(hoare):
    # the predicate order is a poset, so distinct refinements are never isomorphic
    for P in range(hoare.D.n_objects):
        for Q in range(hoare.D.n_objects):
            pair = hoare.vertical_iso(P, Q)
            assert (pair is not None) == (P == Q)


def test_identity_morphism_is_fully_faithful(hoare):
    m = RefSysMorphism(
        "id", hoare, hoare, identity_functor(hoare.D), identity_functor(hoare.T)
    )
    rep = fully_faithful_check(m)
    assert rep.ok and rep.failed == 0


def test_monoidal_validation_on_the_lattice_fixture(collapse):
    rep = collapse.mrs.validate()
    assert rep.ok, [v.detail for v in rep.violations]


def test_residuals_match_set_implication(collapse):
    # on a powerset with meet as tensor, both residuals are relative complement
    mon = collapse.mrs.mon_ref
    names = collapse.mrs.sys.D.objects
    full = pred_set(names[mon.unit])

    def imp(a, c):
        return pred_name((full - a) | c)

    for a, aname in enumerate(names):
        for c, cname in enumerate(names):
            want = imp(pred_set(aname), pred_set(cname))
            left = find_left_residual(mon, a, c)
            right = find_right_residual(mon, a, c)
            assert left is not None and names[left[0]] == want
            assert right is not None and names[right[0]] == want


@given(st.integers(min_value=0, max_value=4000))
@settings(max_examples=25, deadline=None)
def test_random_systems_validate_and_satisfy_lift_laws(seed):
    sys = random_refsys(seed)
    assert sys.validate().ok
    rep = pullpush_laws_check(sys)
    assert rep.ok, rep.counterexample


def test_random_generation_is_deterministic():
    a, b = random_refsys(7), random_refsys(7)
    assert a.D.mor_names == b.D.mor_names
    assert a.T.mor_names == b.T.mor_names
    assert a.t.object_map == b.t.object_map
    assert a.t.morphism_map == b.t.morphism_map
