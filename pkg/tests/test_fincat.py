"""Category/functor plumbing: law validation, duals, products, functor categories."""

import pytest
from hypothesis import given, strategies as st

from refcat.fincat import (
    FinCategory,
    FunctorData,
    NatTransData,
    StructuralError,
    compose_functors,
    curry_functor,
    discrete_category,
    functor_category,
    functors_equal,
    identity_functor,
    opposite,
    product,
    terminal_category,
    uncurry_functor,
    validate_category,
    validate_functor,
    validate_nat_trans,
)


def walking_arrow():
    return FinCategory(
        "2",
        ["a", "b"],
        [("id_a", 0, 0), ("id_b", 1, 1), ("f", 0, 1)],
        [0, 1],
        {(0, 0): 0, (1, 1): 1, (0, 2): 2, (2, 1): 2},
    )


def chain_category(n):
    """Total order on n objects; hom(i,j) is a point iff i <= j."""
    objs = [f"c{i}" for i in range(n)]
    mors = []
    index = {}
    for i in range(n):
        for j in range(i, n):
            index[(i, j)] = len(mors)
            mors.append((f"c{i}<=c{j}", i, j))
    comp = {}
    for (i, j), f in index.items():
        for (j2, k), g in index.items():
            if j2 == j:
                comp[(f, g)] = index[(i, k)]
    ident = [index[(i, i)] for i in range(n)]
    return FinCategory(f"chain{n}", objs, mors, ident, comp)


def test_walking_arrow_validates():
    assert validate_category(walking_arrow()).ok


def test_terminal_and_discrete():
    t = terminal_category()
    assert t.n_objects == 1 and t.n_morphisms == 1
    assert validate_category(t).ok
    d = discrete_category(["x", "y", "z"])
    assert d.n_morphisms == 3
    assert all(d.is_identity(m) for m in range(3))
    assert validate_category(d).ok


def test_nonassociative_table_rejected():
    # One object, morphisms e, g, h with g;g = h, g;h = g, h;g = g, h;h = h.
    # Then (g;g);g = h;g = g but g;(g;g) = g;h = g ... so force a clash at
    # (h;h);g vs h;(h;g): set h;h = g instead.
    comp = {
        (0, 0): 0, (0, 1): 1, (0, 2): 2,
        (1, 0): 1, (2, 0): 2,
        (1, 1): 2, (1, 2): 1, (2, 1): 1, (2, 2): 1,
    }
    cat = FinCategory("skew", ["x"], [("e", 0, 0), ("g", 0, 0), ("h", 0, 0)], [0], comp)
    rep = validate_category(cat)
    assert not rep.ok
    assert any(v.law == "associativity" for v in rep.violations)


def test_identity_law_violation_detected():
    # id;g deliberately wrong
    comp = {(0, 0): 0, (0, 1): 0, (1, 0): 1, (1, 1): 1}
    cat = FinCategory("badid", ["x"], [("e", 0, 0), ("g", 0, 0)], [0], comp)
    rep = validate_category(cat)
    assert not rep.ok
    assert any("identity" in v.law for v in rep.violations)


def test_missing_composite_raises():
    bad = FinCategory("gap", ["a"], [("id", 0, 0), ("g", 0, 0)], [0],
                      {(0, 0): 0, (0, 1): 1, (1, 0): 1})
    with pytest.raises(StructuralError):
        validate_category(bad)


def test_opposite_is_involutive():
    c = chain_category(3)
    op = opposite(c)
    assert validate_category(op).ok
    for m in range(c.n_morphisms):
        assert op.dom(m) == c.cod(m) and op.cod(m) == c.dom(m)
    opop = opposite(op)
    assert opop.mor_dom == c.mor_dom and opop.mor_cod == c.mor_cod
    # composition agrees with the original after swapping the pair
    for f, g in c.composable_pairs():
        assert op.compose(g, f) == c.compose(f, g)


def test_product_category_counts_and_laws():
    a, b = walking_arrow(), chain_category(3)
    p = product(a, b)
    assert p.n_objects == a.n_objects * b.n_objects
    assert p.n_morphisms == a.n_morphisms * b.n_morphisms
    assert validate_category(p).ok


def test_functor_category_over_terminal_recovers_target():
    c = chain_category(3)
    fc = functor_category(terminal_category(), c)
    assert len(fc.functors) == c.n_objects
    assert len(fc.nat_tags) == c.n_morphisms


def test_functors_out_of_walking_arrow_are_morphisms():
    c = chain_category(4)
    fc = functor_category(walking_arrow(), c)
    assert len(fc.functors) == c.n_morphisms


def test_validate_functor_catches_bad_morphism_image():
    a = walking_arrow()
    F = FunctorData("untwist", a, a, (0, 1), (0, 1, 0))  # sends f to id_a
    rep = validate_functor(F)
    assert not rep.ok


def test_compose_functors_and_identity():
    a = walking_arrow()
    c = chain_category(3)
    F = FunctorData("pick01", a, c, (0, 1), (c.id_of(0), c.id_of(1),
                                             c.hom(0, 1)[0]))
    assert validate_functor(F).ok
    assert functors_equal(compose_functors(identity_functor(a), F), F)
    assert functors_equal(compose_functors(F, identity_functor(c)), F)
    with pytest.raises(StructuralError):
        compose_functors(F, F)  # endpoints do not line up


def test_nat_trans_validation():
    a = walking_arrow()
    c = chain_category(3)
    F = FunctorData("low", a, c, (0, 1), (c.id_of(0), c.id_of(1), c.hom(0, 1)[0]))
    G = FunctorData("high", a, c, (1, 2), (c.id_of(1), c.id_of(2), c.hom(1, 2)[0]))
    theta = NatTransData("up", F, G, (c.hom(0, 1)[0], c.hom(1, 2)[0]))
    assert validate_nat_trans(theta).ok
    bad = NatTransData("skew", F, G, (c.hom(0, 2)[0], c.hom(1, 2)[0]))
    assert not validate_nat_trans(bad).ok


def test_curry_uncurry_roundtrip():
    a = walking_arrow()
    p = product(terminal_category(), a)
    # second projection
    F = FunctorData("snd", p, a,
                    tuple(p.split_obj(o)[1] for o in range(p.n_objects)),
                    tuple(p.split_mor(m)[1] for m in range(p.n_morphisms)))
    assert validate_functor(F).ok
    G, fc = curry_functor(F)
    back = uncurry_functor(G, fc, terminal_category(), a)
    assert functors_equal(back, F)


@given(st.integers(min_value=1, max_value=6))
def test_chain_categories_validate_with_expected_size(n):
    c = chain_category(n)
    assert validate_category(c).ok
    assert c.n_morphisms == n * (n + 1) // 2
