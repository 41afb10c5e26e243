"""The shipped example systems, checked against side computations.

The monoid closure oracle below is a set-based fixed point, a different
algorithm from the worklist the builder uses; agreement of the two is the
point of the test.
"""

import pytest
from hypothesis import given, strategies as st

from refcat.fincat import StructuralError, validate_category
from refcat.fixtures import (
    HoareSpec,
    MultiMorphism,
    MulticategorySpec,
    RandomBounds,
    TensorDecl,
    TruncationParams,
    bang_system,
    build_hoare,
    build_lattice,
    build_linctx,
    chain_lattice,
    default_linear_spec,
    fin_skeleton,
    hoare_sp,
    hoare_wp,
    multicompose,
    powerset_lattice,
    random_refsys,
    tensorL_check,
    validate_multicategory,
)
from refcat.refsys import adjunction_check, is_fibration, is_opfibration, lapp_check, rapp_check
from tests.conftest import HOARE_FN, image_oracle, preimage_oracle
from tests.test_represent import context_morphism_count

STATES = ("s0", "s1")


def closure_oracle(states, generator_maps):
    """All state transformers generated under composition, as a set."""
    idfn = tuple(states)
    gens = [tuple(g[s] for s in states) for g in generator_maps]
    known = {idfn}
    while True:
        new = {
            tuple(g[states.index(f[i])] for i in range(len(states)))
            for f in known
            for g in gens
        } - known
        if not new:
            return known
        known |= new


def default_spec():
    return HoareSpec(
        states=STATES,
        generators={
            "swap": {"s0": "s1", "s1": "s0"},
            "set0": {"s0": "s0", "s1": "s0"},
        },
    )


def behavior(spec, c):
    """Recover a command's transformer from strongest postconditions."""
    out = []
    for s in spec.states:
        img = hoare_sp(spec, c, {s})
        assert len(img) == 1
        out.append(next(iter(img)))
    return tuple(out)


def test_monoid_closure_matches_the_fixed_point_oracle(hoare):
    spec = default_spec()
    oracle = closure_oracle(STATES, spec.generators.values())
    assert hoare.T.n_morphisms == len(oracle) == 4
    assert {behavior(spec, c) for c in hoare.T.mor_names} == oracle
    # and the frozen table in conftest is that same closure
    assert {tuple(m[s] for s in STATES) for m in HOARE_FN.values()} == oracle


def test_three_state_rotation_closure():
    spec = HoareSpec(
        states=("a", "b", "c"),
        generators={"rot": {"a": "b", "b": "c", "c": "a"}},
    )
    sys = build_hoare(spec)
    assert sys.T.n_morphisms == len(closure_oracle(spec.states, spec.generators.values())) == 3
    assert sys.D.n_objects == 8  # all subsets
    assert is_fibration(sys)[0] and is_opfibration(sys)[0]


def test_closure_bound_is_enforced():
    with pytest.raises(StructuralError):
        build_hoare(
            HoareSpec(
                states=STATES,
                generators=default_spec().generators,
                closure_bound=2,
            )
        )


def test_sp_wp_match_image_and_preimage(hoare):
    spec = default_spec()
    preds = [frozenset(), frozenset({"s0"}), frozenset({"s1"}), frozenset(STATES)]
    for c in HOARE_FN:
        for P in preds:
            assert hoare_sp(spec, c, P) == image_oracle(c, P)
            assert hoare_wp(spec, c, P) == preimage_oracle(c, P)


@given(
    st.sampled_from(sorted(HOARE_FN)),
    st.frozensets(st.sampled_from(STATES)),
    st.frozensets(st.sampled_from(STATES)),
)
def test_sp_wp_are_adjoint(c, P, Q):
    spec = default_spec()
    assert (hoare_sp(spec, c, P) <= Q) == (P <= hoare_wp(spec, c, Q))


def test_hoare_derivations_are_thin(hoare):
    for P, c, Q in hoare.judgments():
        assert len(hoare.derivations(P, c, Q)) <= 1


def test_multicategory_validation():
    mc = default_linear_spec()
    assert validate_multicategory(mc).ok
    no_ids = MulticategorySpec(mc.formulas, mc.multimorphisms, {"A": "1A"}, dict(mc.compose), mc.tensors)
    rep = validate_multicategory(no_ids)
    assert not rep.ok and all(v.law == "identities" for v in rep.violations)
    bad_table = MulticategorySpec(
        mc.formulas, mc.multimorphisms, dict(mc.identities), dict(mc.compose),
        (TensorDecl("A", "B", "A*B", {"pair": "1A"}),),
    )
    rep = validate_multicategory(bad_table)
    assert not rep.ok and any(v.law == "tensor bijection" for v in rep.violations)


def test_multicompose_identity_cases_and_typing():
    mc = default_linear_spec()
    assert multicompose(mc, "pair", ("1A", "1B")) == "pair"
    assert multicompose(mc, "1T", ("pair",)) == "pair"
    with pytest.raises(StructuralError):
        multicompose(mc, "pair", ("1A", "k"))


def test_truncation_rejects_wide_rules():
    wide = MulticategorySpec(
        ("X",),
        (MultiMorphism("1X", ("X",), "X"), MultiMorphism("quad", ("X",) * 4, "X")),
        {"X": "1X"},
        {},
        (),
    )
    with pytest.raises(StructuralError):
        build_linctx(wide, TruncationParams(K=3))


def test_fin_skeleton_counts():
    T = fin_skeleton(3)
    assert T.n_objects == 4
    assert T.n_morphisms == sum(n ** m for m in range(4) for n in range(4)) == 60
    assert validate_category(T).ok


def test_linctx_shape_counts(linctx):
    mc, trunc, ctx_index, u_index = linctx.__dict__["linctx_data"]
    # multisets of size <= 3 over 4 formulas
    assert linctx.D.n_objects == 1 + 4 + 10 + 20 == 35
    # morphism total agrees with the brute-force proof counter
    names = {v: k for k, v in ctx_index.items()}
    total = 0
    for a in range(linctx.D.n_objects):
        for b in range(linctx.D.n_objects):
            src = tuple(mc.formulas[i] for i in names[a])
            tgt = tuple(mc.formulas[i] for i in names[b])
            total += context_morphism_count(mc, src, tgt)
    assert linctx.D.n_morphisms == total == 124


def test_tensor_left_rule_report(linctx):
    rep = tensorL_check(linctx, "A", "B")
    assert rep.ok and (rep.passed, rep.failed, rep.skipped) == (5, 0, 0)
    assert "negative encoding: 2/2 clauses" in rep.notes
    assert "at ([A*B],1>1[0]): single push has 0 elements, the representation has 1" in rep.notes


def test_lattice_builders_and_their_refusals():
    ps = powerset_lattice(("a", "b"))
    assert ps.elements == ("{}", "{a}", "{b}", "{a,b}")
    ch = chain_lattice(3)
    assert ch.elements == ("c0", "c1", "c2")
    with pytest.raises(StructuralError, match="monotone"):
        build_lattice(ps, ch, {"{}": "c0", "{a}": "c2", "{b}": "c0", "{a,b}": "c0"})
    with pytest.raises(StructuralError, match="meet"):
        build_lattice(ps, ch, {"{}": "c0", "{a}": "c1", "{b}": "c1", "{a,b}": "c2"})
    with pytest.raises(StructuralError, match="top"):
        build_lattice(ps, ch, {"{}": "c0", "{a}": "c0", "{b}": "c0", "{a,b}": "c0"})
    with pytest.raises(StructuralError, match="total"):
        build_lattice(ps, ch, {"{}": "c0"})


def test_collapse_fixture_structure(collapse):
    sys = collapse.mrs.sys
    assert sys.t.object_map == (0, 0, 1, 2)
    assert collapse.mrs.validate().ok
    # collapsing {a} under {b} kills both lift directions
    assert not is_fibration(sys)[0]
    assert not is_opfibration(sys)[0]
    tops = [m for m in collapse.monoids if m.unit_mor is not None]
    assert len(tops) == 1 and sys.T.objects[tops[0].W] == "c2"
    for m in collapse.monoids:
        assert sys.T.is_identity(m.p)  # meets are idempotent


def test_identity_fixture_is_a_bifibration(ident):
    sys = ident.mrs.sys
    assert is_fibration(sys)[0] and is_opfibration(sys)[0]
    assert ident.mrs.validate().ok


def test_galois_adjunction_counts(galois):
    rep = adjunction_check(galois)
    assert rep.ok and (rep.passed, rep.failed, rep.skipped) == (23, 0, 0)
    r = rapp_check(galois)
    assert r.ok and (r.passed, r.failed, r.skipped) == (123, 0, 0)
    l = lapp_check(galois)
    assert l.ok and (l.passed, l.failed, l.skipped) == (158, 0, 1)


def test_random_generation_envelope():
    bounds = RandomBounds()
    for seed in range(60):
        sys = random_refsys(seed)
        assert sys.validate().ok
        assert sys.T.n_objects <= bounds.t_objects
        assert sys.D.n_objects <= bounds.d_objects
    with pytest.raises(StructuralError, match="no valid system"):
        random_refsys(0, RandomBounds(hom=0, retries=3))


def test_bang_system_is_a_bifibration(hoare):
    b = bang_system(hoare.D)
    assert b.validate().ok
    assert b.T.n_objects == 1
    assert is_fibration(b)[0] and is_opfibration(b)[0]
    assert len(b.fiber(0)) == hoare.D.n_objects
