"""Presheaf tables: validation, Kan extension along a functor, factoring certificates.

The pushforward-to-a-point tests use an independent union-find oracle over the
category of elements, so the quotient computed by push_psh is checked against a
second implementation rather than against itself.
"""

import pytest
from hypothesis import given, strategies as st

from refcat.fincat import FinCategory, FunctorData, SizeGuardExceeded, terminal_category
from refcat.psh import (
    Presheaf,
    PshDerivation,
    cartesian_factoring_check,
    natural_families,
    opcartesian_factoring_check,
    psh_derivations,
    pull_psh,
    push_psh,
    push_psh_full,
    push_transpose,
    representable,
    residual_psh,
    unit_psh,
    validate_presheaf,
    validate_psh_derivation,
    vertical_iso_psh,
)
from tests.test_fincat import chain_category, walking_arrow


def chain_presheaf(base, sizes, steps):
    """Presheaf on a chain from one transition map per consecutive pair.

    steps[k] maps elements at object k+1 to elements at object k; every other
    action row is the forced composite, so functoriality holds by construction.
    """
    n = base.n_objects
    elements = tuple(tuple(f"e{a}_{i}" for i in range(sizes[a])) for a in range(n))
    action = []
    for m in range(base.n_morphisms):
        i, j = base.dom(m), base.cod(m)
        row = list(range(sizes[j]))
        for k in range(j - 1, i - 1, -1):
            row = [steps[k][x] for x in row]
        action.append(tuple(row))
    return Presheaf("stepwise", base, elements, tuple(action))


def to_point(base):
    t = terminal_category()
    return FunctorData("!", base, t, (0,) * base.n_objects, (0,) * base.n_morphisms)


def components_oracle(phi):
    """Connected components of the category of elements, by union-find."""
    base = phi.base
    parent = {}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x, y):
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[rx] = ry

    for a in range(base.n_objects):
        for i in range(phi.size(a)):
            parent[(a, i)] = (a, i)
    for m in range(base.n_morphisms):
        d, c = base.dom(m), base.cod(m)
        for e in range(phi.size(c)):
            union((c, e), (d, phi.apply(m, e)))
    return len({find(x) for x in parent})


@pytest.fixture()
def sample():
    """Presheaf on chain3 with sizes 2,1,3; one element at the bottom is isolated."""
    base = chain_category(3)
    phi = chain_presheaf(base, [2, 1, 3], [[0], [0, 0, 0]])
    assert validate_presheaf(phi).ok
    return base, phi


def test_representable_is_thin_on_a_chain():
    base = chain_category(3)
    for b in range(3):
        h = representable(base, b)
        assert validate_presheaf(h).ok
        assert [h.size(a) for a in range(3)] == [1 if a <= b else 0 for a in range(3)]


def test_validate_catches_identity_breaking_action():
    base = walking_arrow()
    phi = Presheaf(
        "twist", base,
        (("x0", "x1"), ("y",)),
        ((1, 0), (0,), (0,)),  # id_a swaps the fiber
    )
    rep = validate_presheaf(phi)
    assert not rep.ok
    assert any("identity" in v.law for v in rep.violations)


def test_validate_catches_composition_breaking_action():
    base = chain_category(3)
    phi = chain_presheaf(base, [2, 2, 2], [[0, 1], [0, 1]])
    rows = list(phi.action)
    # overwrite the long edge so it disagrees with the two short ones
    long_edge = next(
        m for m in range(base.n_morphisms) if base.dom(m) == 0 and base.cod(m) == 2
    )
    rows[long_edge] = (1, 0)
    bad = Presheaf("skewed", base, phi.elements, tuple(rows))
    rep = validate_presheaf(bad)
    assert not rep.ok
    assert any(v.law == "contravariance" for v in rep.violations)


def test_yoneda_family_counts(sample):
    # families out of a representable are classified by the fiber at its object
    base, phi = sample
    for a in range(3):
        fams = natural_families(representable(base, a), phi)
        assert len(fams) == phi.size(a)


def test_push_to_point_matches_component_oracle(sample):
    base, phi = sample
    assert components_oracle(phi) == 2  # {x1} is not hit by any action
    pushed = push_psh(to_point(base), phi)
    assert pushed.total_elements() == 2

    h = representable(base, 2)
    assert components_oracle(h) == 1
    assert push_psh(to_point(base), h).total_elements() == 1


def test_push_along_identity_like_collapse():
    # collapsing chain3 onto the walking arrow keeps fiberwise data intact
    base = chain_category(3)
    arr = walking_arrow()
    fmap = []
    for m in range(base.n_morphisms):
        i, j = base.dom(m), base.cod(m)
        oi, oj = (0 if i <= 1 else 1), (0 if j <= 1 else 1)
        fmap.append(arr.id_of(oi) if oi == oj else 2)
    F = FunctorData("fold", base, arr, (0, 0, 1), tuple(fmap))
    phi = chain_presheaf(base, [2, 1, 3], [[0], [0, 0, 0]])
    psi = Presheaf("target", arr, (("u0", "u1"), ("v0", "v1")), ((0, 1), (0, 1), (0, 0)))
    lhs = psh_derivations(phi, F, psi)
    rhs = natural_families(push_psh(F, phi), psi)
    hat = natural_families(phi, pull_psh(F, psi))
    assert len(lhs) == len(rhs) == len(hat)


def test_opcartesian_certificate(sample):
    base, phi = sample
    arr = walking_arrow()
    F = FunctorData(
        "fold", base, arr, (0, 0, 1),
        tuple(
            arr.id_of(0) if base.cod(m) <= 1
            else (arr.id_of(1) if base.dom(m) == 2 else 2)
            for m in range(base.n_morphisms)
        ),
    )
    pr = push_psh_full(F, phi)
    pool = [representable(arr, 0), representable(arr, 1), pr.presheaf,
            Presheaf("flat", arr, (("w",), ("z",)), ((0,), (0,), (0,)))]
    ok, why = opcartesian_factoring_check(pr, F, phi, pool)
    assert ok, why


def test_cartesian_certificate(sample):
    base, phi = sample
    arr = walking_arrow()
    F = FunctorData(
        "fold", base, arr, (0, 0, 1),
        tuple(
            arr.id_of(0) if base.cod(m) <= 1
            else (arr.id_of(1) if base.dom(m) == 2 else 2)
            for m in range(base.n_morphisms)
        ),
    )
    psi = Presheaf("target", arr, (("u0", "u1"), ("v0", "v1")), ((0, 1), (0, 1), (0, 0)))
    pulled = pull_psh(F, psi)
    counit = PshDerivation(
        "counit", pulled, psi, F,
        tuple(tuple(range(pulled.size(a))) for a in range(base.n_objects)),
    )
    assert validate_psh_derivation(counit).ok
    pool = [phi, representable(base, 0), representable(base, 2), pulled]
    ok, why = cartesian_factoring_check(counit, pool)
    assert ok, why


def test_push_transpose_is_a_valid_derivation(sample):
    base, phi = sample
    F = to_point(base)
    pr = push_psh_full(F, phi)
    point = Presheaf("pt2", F.target, (("p", "q"),), ((0, 1),))
    thetas = psh_derivations(phi, F, point)
    assert thetas  # the two components can land on p or q independently
    for theta in thetas:
        kappa = push_transpose(pr, F, point, theta)
        assert validate_psh_derivation(kappa).ok
        assert kappa.source is pr.presheaf and kappa.target is point
    # transposition is injective, and every vertical family arises this way
    assert len(thetas) == len(natural_families(pr.presheaf, point))


def test_vertical_iso_found_and_refused(sample):
    base, phi = sample
    renamed = Presheaf("renamed", base,
                       tuple(tuple(f"r{i}" for i in range(len(es))) for es in phi.elements),
                       phi.action)
    pair = vertical_iso_psh(phi, renamed)
    assert pair is not None
    smaller = representable(base, 0)
    assert vertical_iso_psh(phi, smaller) is None


def test_residual_over_a_point_is_a_function_space():
    point, base = unit_psh()
    phi = Presheaf("two", base, (("a", "b"),), ((0, 1),))
    omega = Presheaf("three", base, (("x", "y", "z"),), ((0, 1, 2),))
    for side in ("left", "right"):
        res, _ = residual_psh(side, phi, omega)
        assert res.total_elements() == 3 ** 2


def test_residual_size_guard():
    # the guard bounds the functor category the residual is indexed by
    small, big = chain_category(2), chain_category(3)
    phi = representable(small, 1)
    omega = representable(big, 2)
    with pytest.raises(SizeGuardExceeded):
        residual_psh("left", phi, omega, size_guard=2)


@given(
    st.lists(st.integers(min_value=1, max_value=3), min_size=2, max_size=4),
    st.data(),
)
def test_stepwise_presheaves_push_like_the_oracle(sizes, data):
    base = chain_category(len(sizes))
    steps = [
        [data.draw(st.integers(0, sizes[k] - 1)) for _ in range(sizes[k + 1])]
        for k in range(len(sizes) - 1)
    ]
    phi = chain_presheaf(base, sizes, steps)
    assert validate_presheaf(phi).ok
    pushed = push_psh(to_point(base), phi)
    assert pushed.total_elements() == components_oracle(phi)
