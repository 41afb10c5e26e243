"""Concrete refinement systems to verify things on.

Four families: Hoare logic over a finite state space (predicates over a
one-object transformer monoid), truncated linear contexts over a finite
multicategory (multisets of formulas over the skeleton of finite sets),
monotone lattice maps as posetal monoidal systems (with every element a
monoid via idempotent meet, and a Galois connection lifted to a full
adjunction of systems), and a seeded random generator for property tests.

All builders are deterministic: element orders come from the input data,
never from hashing.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

from .fincat import (
    FinCategory,
    FunctorData,
    NatTransData,
    StructuralError,
    ValidationReport,
    compose_functors,
    identity_functor,
)
from .psh import push_psh
from .refsys import (
    MonoidalRefinementSystem,
    MonoidalStructure,
    RefinementSystem,
    RefSysAdjunction,
    RefSysMorphism,
    find_pushforward,
)
from .reports import CheckReport
from .represent import MonoidObject, pos_rep, slice_action, slice_of


def _raise_if_invalid(report: ValidationReport) -> None:
    if not report.ok:
        first = report.violations[0]
        raise StructuralError(f"{report.subject}: {first.law}: {first.detail}")


# ---------------------------------------------------------------------------
# Hoare logic over a finite state space


@dataclass
class HoareSpec:
    """A finite state space with named commands.

    `generators` maps command names to total functions on states (as
    dicts state -> state).  `predicates` defaults to all subsets; a
    listed sublattice restricts the refinement side.  The transformer
    monoid is closed by construction, bounded by `closure_bound`.
    """

    states: tuple[str, ...]
    generators: dict[str, dict[str, str]]
    predicates: tuple[tuple[str, ...], ...] | None = None
    closure_bound: int = 64


def _transformer_monoid(spec: HoareSpec) -> tuple[list[str], list[tuple[int, ...]], dict[tuple[int, ...], int]]:
    """Close the generators under composition.

    Elements are function tables (tuples over state indices); names are
    `id`, the generator names, then `left;gen` in discovery order."""
    n = len(spec.states)
    if len(set(spec.states)) != n:
        raise StructuralError("duplicate state names")
    sidx = {s: i for i, s in enumerate(spec.states)}
    names: list[str] = ["id"]
    funcs: list[tuple[int, ...]] = [tuple(range(n))]
    index: dict[tuple[int, ...], int] = {funcs[0]: 0}
    gens: list[tuple[str, tuple[int, ...]]] = []
    for gname in sorted(spec.generators):
        table = spec.generators[gname]
        if set(table) != set(spec.states):
            raise StructuralError(f"command {gname} is not total on the states")
        func = tuple(sidx[table[s]] for s in spec.states)
        gens.append((gname, func))
        if func not in index:
            index[func] = len(funcs)
            names.append(gname)
            funcs.append(func)
    frontier = list(range(1, len(funcs)))
    while frontier:
        fresh: list[int] = []
        for i in frontier:
            for gname, g in gens:
                comp = tuple(g[x] for x in funcs[i])
                if comp not in index:
                    if len(funcs) >= spec.closure_bound:
                        raise StructuralError(
                            f"transformer monoid exceeds the closure bound {spec.closure_bound}"
                        )
                    index[comp] = len(funcs)
                    names.append(f"{names[i]};{gname}")
                    funcs.append(comp)
                    fresh.append(index[comp])
        frontier = fresh
    return names, funcs, index


def _predicate_list(spec: HoareSpec) -> list[frozenset[int]]:
    sidx = {s: i for i, s in enumerate(spec.states)}
    if spec.predicates is None:
        n = len(spec.states)
        return [
            frozenset(i for i in range(n) if mask >> i & 1)
            for mask in range(1 << n)
        ]
    preds = []
    for p in spec.predicates:
        if not set(p) <= set(spec.states):
            raise StructuralError(f"predicate {p} mentions unknown states")
        preds.append(frozenset(sidx[s] for s in p))
    if len(set(preds)) != len(preds):
        raise StructuralError("duplicate predicates listed")
    return preds


def _predicate_name(spec: HoareSpec, pred: frozenset[int]) -> str:
    return "{" + ",".join(s for i, s in enumerate(spec.states) if i in pred) + "}"


def build_hoare(spec: HoareSpec) -> RefinementSystem:
    """Predicates over the transformer monoid.

    T has one object carrying the closed command monoid; D has the
    predicates, with exactly one morphism (P, c) -> Q when c maps P into
    Q.  The projection forgets the predicates.  The resulting system is
    thin, a fibration, and an opfibration."""
    names, funcs, _ = _transformer_monoid(spec)
    compose_t = {}
    findex = {f: i for i, f in enumerate(funcs)}
    for i, f in enumerate(funcs):
        for j, g in enumerate(funcs):
            compose_t[(i, j)] = findex[tuple(g[x] for x in f)]
    T = FinCategory(
        "W",
        ("W",),
        tuple((nm, 0, 0) for nm in names),
        (0,),
        compose_t,
    )
    preds = _predicate_list(spec)
    pnames = [_predicate_name(spec, p) for p in preds]
    mor_tags: list[tuple[int, int, int]] = []  # (P, c, Q)
    mors: list[tuple[str, int, int]] = []
    mindex: dict[tuple[int, int, int], int] = {}
    for Pi, P in enumerate(preds):
        for Qi, Q in enumerate(preds):
            for c, f in enumerate(funcs):
                if frozenset(f[x] for x in P) <= Q:
                    mindex[(Pi, c, Qi)] = len(mors)
                    mors.append((f"{names[c]}:{pnames[Pi]}>{pnames[Qi]}", Pi, Qi))
                    mor_tags.append((Pi, c, Qi))
    identity = [mindex[(Pi, 0, Pi)] for Pi in range(len(preds))]
    compose_d = {}
    for i, (Pi, c1, Qi) in enumerate(mor_tags):
        for j, (Pj, c2, Rj) in enumerate(mor_tags):
            if Qi == Pj:
                compose_d[(i, j)] = mindex[(Pi, compose_t[(c1, c2)], Rj)]
    D = FinCategory("Pred", tuple(pnames), tuple(mors), tuple(identity), compose_d)
    t = FunctorData(
        "hoare",
        D,
        T,
        (0,) * len(preds),
        tuple(tag[1] for tag in mor_tags),
    )
    sys = RefinementSystem("hoare", t)
    _raise_if_invalid(sys.validate())
    sys.__dict__["hoare_data"] = (spec, tuple(names), tuple(funcs), tuple(preds))
    return sys


def _resolve_command(spec: HoareSpec, c) -> tuple[int, ...]:
    sidx = {s: i for i, s in enumerate(spec.states)}
    if isinstance(c, dict):
        return tuple(sidx[c[s]] for s in spec.states)
    names, funcs, _ = _transformer_monoid(spec)
    try:
        return funcs[names.index(c)]
    except ValueError:
        raise StructuralError(f"unknown command {c!r}") from None


def hoare_sp(spec: HoareSpec, c, P) -> frozenset[str]:
    """Strongest postcondition: the image of P under the command.

    `c` is a command name from the closure (or an explicit state map),
    `P` an iterable of state names."""
    func = _resolve_command(spec, c)
    sidx = {s: i for i, s in enumerate(spec.states)}
    return frozenset(spec.states[func[sidx[s]]] for s in P)


def hoare_wp(spec: HoareSpec, c, Q) -> frozenset[str]:
    """Weakest precondition: the preimage of Q under the command."""
    func = _resolve_command(spec, c)
    target = {s for s in Q}
    return frozenset(
        s for i, s in enumerate(spec.states) if spec.states[func[i]] in target
    )


def default_hoare_spec() -> HoareSpec:
    """Two states with a swap and a reset; the closed monoid has four
    commands and the predicate lattice has four elements."""
    return HoareSpec(
        states=("s0", "s1"),
        generators={
            "swap": {"s0": "s1", "s1": "s0"},
            "set0": {"s0": "s0", "s1": "s0"},
        },
    )


# ---------------------------------------------------------------------------
# Truncated linear contexts over a multicategory


@dataclass(frozen=True)
class MultiMorphism:
    """A rule with a multiset of source formulas and one target formula.
    Sources are canonicalized: sorted by formula declaration order."""

    name: str
    source: tuple[str, ...]
    target: str


@dataclass
class TensorDecl:
    """A declared tensor A (x) B with its left-introduction bijection:
    `table` maps each rule consuming both A and B to the rule consuming
    A (x) B instead, and must be a bijection between those two rule sets."""

    left: str
    right: str
    tensor: str
    table: dict[str, str]


@dataclass
class MulticategorySpec:
    """Formulas, rules, and explicit multicomposition tables.

    `identities` names the identity rule of each formula.  `compose` is
    keyed by (outer rule, inner rules aligned to the outer source
    positions); instances where every inner is an identity, or the outer
    is, are composed automatically and need no table entry.  Laws are
    validated exhaustively over the defined instances.
    """

    formulas: tuple[str, ...]
    multimorphisms: tuple[MultiMorphism, ...]
    identities: dict[str, str]
    compose: dict[tuple[str, tuple[str, ...]], str] = field(default_factory=dict)
    tensors: tuple[TensorDecl, ...] = ()

    def rule(self, name: str) -> MultiMorphism:
        for mm in self.multimorphisms:
            if mm.name == name:
                return mm
        raise StructuralError(f"unknown multimorphism {name!r}")


def _formula_key(mc: MulticategorySpec):
    order = {f: i for i, f in enumerate(mc.formulas)}
    return lambda name: order[name]


def multicompose(mc: MulticategorySpec, outer: str, inners: tuple[str, ...]) -> str:
    """Compose one rule with a family of rules, one per source position.

    Identity cases are resolved automatically; everything else must be
    in the declared table."""
    out = mc.rule(outer)
    if len(inners) != len(out.source):
        raise StructuralError(
            f"multicomposition {outer}({','.join(inners)}) has the wrong arity"
        )
    ids = set(mc.identities.values())
    for pos, inner in enumerate(inners):
        if mc.rule(inner).target != out.source[pos]:
            raise StructuralError(
                f"multicomposition {outer}({','.join(inners)}) is ill-typed at position {pos}"
            )
    if all(i in ids for i in inners):
        return outer
    if outer in ids:
        return inners[0]
    key = (outer, tuple(inners))
    if key in mc.compose:
        return mc.compose[key]
    raise StructuralError(f"missing multicomposition {outer}({','.join(inners)})")


def _sorted_with_perm(seq, key):
    """Stable sort returning (sorted values, original positions)."""
    order = sorted(range(len(seq)), key=lambda i: (key(seq[i]), i))
    return tuple(seq[i] for i in order), tuple(order)


def validate_multicategory(mc: MulticategorySpec) -> ValidationReport:
    report = ValidationReport(subject="multicategory")
    if len(set(mc.formulas)) != len(mc.formulas):
        report.add("naming", "duplicate formulas")
        return report
    names = [mm.name for mm in mc.multimorphisms]
    if len(set(names)) != len(names):
        report.add("naming", "duplicate multimorphism names")
        return report
    fkey = _formula_key(mc)
    for mm in mc.multimorphisms:
        if mm.target not in mc.formulas or not set(mm.source) <= set(mc.formulas):
            report.add("typing", f"{mm.name} mentions unknown formulas")
            return report
        if tuple(sorted(mm.source, key=fkey)) != mm.source:
            report.add(
                "canonical form",
                f"{mm.name} source is not sorted in formula order",
            )
    for X in mc.formulas:
        if X not in mc.identities:
            report.add("identities", f"no identity declared for {X}")
            continue
        one = mc.rule(mc.identities[X])
        if one.source != (X,) or one.target != X:
            report.add("identities", f"identity of {X} has the wrong type")
    if report.violations:
        return report

    ids = set(mc.identities.values())
    for (outer, inners), res in mc.compose.items():
        out = mc.rule(outer)
        if len(inners) != len(out.source):
            report.add("composition typing", f"{outer}({','.join(inners)}) has the wrong arity")
            continue
        bad = False
        for pos, inner in enumerate(inners):
            if mc.rule(inner).target != out.source[pos]:
                report.add(
                    "composition typing",
                    f"{outer}({','.join(inners)}) is ill-typed at position {pos}",
                )
                bad = True
        if bad:
            continue
        comp = mc.rule(res)
        merged = tuple(
            sorted((f for i in inners for f in mc.rule(i).source), key=fkey)
        )
        if comp.target != out.target or comp.source != merged:
            report.add(
                "composition typing",
                f"{outer}({','.join(inners)}) = {res} has the wrong type",
            )
        if all(i in ids for i in inners) and res != outer:
            report.add("identity law", f"{outer}({','.join(inners)}) must be {outer}")
        if outer in ids and res != inners[0]:
            report.add("identity law", f"{outer}({','.join(inners)}) must be {inners[0]}")
    if report.violations:
        return report

    # associativity over every instance whose composites are all defined
    by_target: dict[str, list[str]] = {}
    for mm in mc.multimorphisms:
        by_target.setdefault(mm.target, []).append(mm.name)
    for g in mc.multimorphisms:
        inner_choices = [by_target.get(X, []) for X in g.source]
        for fs in itertools.product(*inner_choices):
            try:
                h = multicompose(mc, g.name, fs)
            except StructuralError:
                continue
            flat = [f for fn in fs for f in mc.rule(fn).source]
            _, perm = _sorted_with_perm(flat, fkey)
            offsets = []
            at = 0
            for fn in fs:
                offsets.append(at)
                at += len(mc.rule(fn).source)
            deep_choices = [by_target.get(X, []) for X in flat]
            for es in itertools.product(*deep_choices):
                try:
                    inner_first = tuple(
                        multicompose(
                            mc,
                            fn,
                            tuple(es[offsets[i] + k] for k in range(len(mc.rule(fn).source))),
                        )
                        for i, fn in enumerate(fs)
                    )
                    lhs = multicompose(mc, g.name, inner_first)
                    rhs = multicompose(mc, h, tuple(es[p] for p in perm))
                except StructuralError:
                    continue
                if lhs != rhs:
                    report.add(
                        "associativity",
                        f"{g.name} over ({','.join(fs)}) then ({','.join(es)}): "
                        f"{lhs} != {rhs}",
                    )

    for decl in mc.tensors:
        for f in (decl.left, decl.right, decl.tensor):
            if f not in mc.formulas:
                report.add("tensor declaration", f"unknown formula {f}")
                return report
        def _count(source, f):
            return sum(1 for x in source if x == f)
        need = 2 if decl.left == decl.right else 1
        domain = [
            mm.name
            for mm in mc.multimorphisms
            if _count(mm.source, decl.left) >= need and _count(mm.source, decl.right) >= 1
        ]
        codomain = [
            mm.name for mm in mc.multimorphisms if decl.tensor in mm.source
        ]
        if sorted(decl.table) != sorted(domain):
            report.add(
                "tensor bijection",
                f"table domain is not the rules consuming ({decl.left},{decl.right})",
            )
            continue
        if sorted(set(decl.table.values())) != sorted(codomain) or len(
            set(decl.table.values())
        ) != len(decl.table):
            report.add(
                "tensor bijection",
                f"table is not a bijection onto the rules consuming {decl.tensor}",
            )
            continue
        for src_name, dst_name in decl.table.items():
            src, dst = mc.rule(src_name), mc.rule(dst_name)
            reduced = list(src.source)
            reduced.remove(decl.left)
            reduced.remove(decl.right)
            reduced.append(decl.tensor)
            if dst.target != src.target or dst.source != tuple(
                sorted(reduced, key=fkey)
            ):
                report.add(
                    "tensor bijection",
                    f"{src_name} -> {dst_name} does not replace "
                    f"({decl.left},{decl.right}) by {decl.tensor}",
                )
    return report


@dataclass(frozen=True)
class TruncationParams:
    """Finiteness bounds: K caps context sizes, and the optional morphism
    cap aborts construction instead of building a huge category."""

    K: int = 3
    max_morphisms: int | None = None


def fin_skeleton(K: int) -> FinCategory:
    """The skeleton of finite sets up to size K: objects 0..K, morphisms
    all functions, written as image tuples."""
    objects = tuple(str(n) for n in range(K + 1))
    mors: list[tuple[str, int, int]] = []
    index: dict[tuple[int, int, tuple[int, ...]], int] = {}
    for m in range(K + 1):
        for n in range(K + 1):
            for u in itertools.product(range(n), repeat=m):
                index[(m, n, u)] = len(mors)
                mors.append((f"{m}>{n}[{','.join(map(str, u))}]", m, n))
    identity = tuple(index[(m, m, tuple(range(m)))] for m in range(K + 1))
    tags = list(index)

    def comp(i: int, j: int) -> int:
        m, n, u = tags[i]
        n2, p, v = tags[j]
        return index[(m, p, tuple(v[x] for x in u))]

    return FinCategory(f"Fin<={K}", objects, tuple(mors), identity, comp)


def build_linctx(mc: MulticategorySpec, trunc: TruncationParams) -> RefinementSystem:
    """Contexts of at most K formulas over the finite-set skeleton.

    A morphism Delta -> Gamma is a function u between the positions
    together with one rule per Gamma-position, consuming the formulas u
    sends there; composition multicomposes the rule families.  The
    projection keeps u and the context sizes.  All category laws are
    re-validated after construction.
    """
    sub = validate_multicategory(mc)
    _raise_if_invalid(sub)
    K = trunc.K
    for mm in mc.multimorphisms:
        if len(mm.source) > K:
            raise StructuralError(
                f"multimorphism {mm.name} needs a context of size {len(mm.source)} > K={K}"
            )
    fidx = {f: i for i, f in enumerate(mc.formulas)}
    contexts: list[tuple[int, ...]] = []
    for size in range(K + 1):
        contexts.extend(
            itertools.combinations_with_replacement(range(len(mc.formulas)), size)
        )
    ctx_index = {c: i for i, c in enumerate(contexts)}
    ctx_names = tuple(
        "[" + ",".join(mc.formulas[f] for f in ctx) + "]" for ctx in contexts
    )
    T = fin_skeleton(K)
    u_index: dict[tuple[int, int, tuple[int, ...]], int] = {}
    for k, nm in enumerate(T.mor_names):
        m, n = T.dom(k), T.cod(k)
        body = nm.split("[", 1)[1][:-1]
        u = tuple(int(x) for x in body.split(",")) if body else ()
        u_index[(m, n, u)] = k

    # rules indexed by (source multiset, target), in declaration order
    by_type: dict[tuple[tuple[int, ...], int], list[int]] = {}
    for k, mm in enumerate(mc.multimorphisms):
        key = (tuple(fidx[f] for f in mm.source), fidx[mm.target])
        by_type.setdefault(key, []).append(k)

    mors: list[tuple[str, int, int]] = []
    tags: list[tuple[int, int, tuple[int, ...], tuple[int, ...]]] = []
    mindex: dict[tuple[int, int, tuple[int, ...], tuple[int, ...]], int] = {}
    for di, delta in enumerate(contexts):
        for gi, gamma in enumerate(contexts):
            for u in itertools.product(range(len(gamma)), repeat=len(delta)):
                choice = []
                for j, tgt in enumerate(gamma):
                    src = tuple(sorted(delta[i] for i in range(len(delta)) if u[i] == j))
                    choice.append(by_type.get((src, tgt), []))
                for fam in itertools.product(*choice):
                    tag = (di, gi, u, fam)
                    mindex[tag] = len(mors)
                    uname = T.mor_names[u_index[(len(delta), len(gamma), u)]]
                    fname = ",".join(mc.multimorphisms[k].name for k in fam)
                    mors.append((f"{uname}|{fname}", di, gi))
                    tags.append(tag)
                    if (
                        trunc.max_morphisms is not None
                        and len(mors) > trunc.max_morphisms
                    ):
                        raise StructuralError(
                            f"context category exceeds the morphism cap "
                            f"{trunc.max_morphisms}"
                        )
    identity = []
    for di, delta in enumerate(contexts):
        u = tuple(range(len(delta)))
        fam = tuple(
            by_type[((f,), f)][
                [mc.multimorphisms[k].name for k in by_type[((f,), f)]].index(
                    mc.identities[mc.formulas[f]]
                )
            ]
            for f in delta
        )
        identity.append(mindex[(di, di, u, fam)])

    mm_names = [mm.name for mm in mc.multimorphisms]
    name_to_mm = {nm: k for k, nm in enumerate(mm_names)}

    def comp(i: int, j: int) -> int:
        di, gi, u, fam = tags[i]
        gi2, ti, v, gam = tags[j]
        gamma, theta = contexts[gi], contexts[ti]
        w = tuple(v[x] for x in u)
        out_fam = []
        for k in range(len(theta)):
            js = sorted(
                (j2 for j2 in range(len(gamma)) if v[j2] == k),
                key=lambda j2: (gamma[j2], j2),
            )
            inners = tuple(mm_names[fam[j2]] for j2 in js)
            out_fam.append(name_to_mm[multicompose(mc, mm_names[gam[k]], inners)])
        return mindex[(di, ti, w, tuple(out_fam))]

    D = FinCategory("Ctx", ctx_names, tuple(mors), tuple(identity), comp)
    t = FunctorData(
        "size",
        D,
        T,
        tuple(len(c) for c in contexts),
        tuple(u_index[(len(contexts[di]), len(contexts[gi]), u)] for (di, gi, u, _) in tags),
    )
    sys = RefinementSystem("linctx", t)
    _raise_if_invalid(sys.validate())
    sys.__dict__["linctx_data"] = (mc, trunc, ctx_index, u_index)
    return sys


def default_linear_spec() -> MulticategorySpec:
    """Four formulas, six rules: identities, pairing into the tensor, and
    a closed constant.  The tensor bijection sends pairing to the tensor
    identity."""
    return MulticategorySpec(
        formulas=("A", "B", "A*B", "C"),
        multimorphisms=(
            MultiMorphism("1A", ("A",), "A"),
            MultiMorphism("1B", ("B",), "B"),
            MultiMorphism("1T", ("A*B",), "A*B"),
            MultiMorphism("1C", ("C",), "C"),
            MultiMorphism("pair", ("A", "B"), "A*B"),
            MultiMorphism("k", (), "C"),
        ),
        identities={"A": "1A", "B": "1B", "A*B": "1T", "C": "1C"},
        compose={},
        tensors=(TensorDecl("A", "B", "A*B", {"pair": "1T"}),),
    )


def tensorL_check(sys: RefinementSystem, A: str, B: str) -> CheckReport:
    """The declared tensor agrees with the pushforward of the two-formula
    context along 2 -> 1, its double dual recovers it, and a single
    pushforward of the positive side does not: at the context [A*B] the
    pushed set is empty while the positive representation is not."""
    from .duality import negative_encoding_check

    if "linctx_data" not in sys.__dict__:
        raise StructuralError("tensorL_check needs a system built by build_linctx")
    mc, trunc, ctx_index, u_index = sys.__dict__["linctx_data"]
    decl = None
    for d in mc.tensors:
        if {d.left, d.right} == {A, B}:
            decl = d
            break
    if decl is None:
        raise StructuralError(f"missing tensor declaration for ({A},{B})")
    report = CheckReport(
        name=f"tensorL:{A},{B}",
        statement="the declared tensor is the pushforward of the paired "
        "context along 2 -> 1 and is recovered by double dualization, "
        "while one pushforward alone is not isomorphic to it",
    )
    fidx = {f: i for i, f in enumerate(mc.formulas)}
    pair_ctx = ctx_index[tuple(sorted((fidx[A], fidx[B])))]
    tens_ctx = ctx_index[(fidx[decl.tensor],)]
    mu = u_index[(2, 1, (0, 0))]
    cert = find_pushforward(sys, mu, pair_ctx)
    report.check(cert is not None, "no pushforward of the paired context")
    if cert is None:
        return report.done()
    same = cert.result == tens_ctx or sys.vertical_iso(cert.result, tens_ctx) is not None
    report.check(
        same,
        f"pushforward lands at {sys.D.object_name(cert.result)}, "
        f"not {sys.D.object_name(tens_ctx)}",
    )
    sub = negative_encoding_check(sys, mu, pair_ctx)
    report.check(sub.ok, sub.counterexample or "negative encoding failed")
    report.note(f"negative encoding: {sub.passed}/{sub.attempted} clauses")

    S1 = slice_of(sys, 1)
    x = S1.obj_index[(tens_ctx, sys.T.id_of(1))]
    pushed = push_psh(slice_action(sys, mu), pos_rep(sys, pair_ctx))
    direct = pos_rep(sys, tens_ctx)
    report.check(
        pushed.size(x) == 0,
        f"pushed set at {S1.obj_name(x)} has {pushed.size(x)} elements",
    )
    report.check(
        direct.size(x) >= 1,
        f"positive representation at {S1.obj_name(x)} is empty",
    )
    report.note(
        f"at {S1.obj_name(x)}: single push has {pushed.size(x)} elements, "
        f"the representation has {direct.size(x)}"
    )
    return report.done()


# ---------------------------------------------------------------------------
# Lattice maps as posetal monoidal systems


@dataclass(frozen=True)
class LatticeSpec:
    """A finite meet-semilattice with top, as elements and the full order
    relation (pairs (x, y) with x <= y, reflexive and transitive)."""

    name: str
    elements: tuple[str, ...]
    leq: frozenset[tuple[str, str]]


def powerset_lattice(atoms: tuple[str, ...]) -> LatticeSpec:
    elems = []
    sets = []
    for mask in range(1 << len(atoms)):
        members = tuple(a for i, a in enumerate(atoms) if mask >> i & 1)
        sets.append(frozenset(members))
        elems.append("{" + ",".join(members) + "}")
    leq = frozenset(
        (elems[i], elems[j])
        for i in range(len(elems))
        for j in range(len(elems))
        if sets[i] <= sets[j]
    )
    return LatticeSpec(f"P({','.join(atoms)})", tuple(elems), leq)


def chain_lattice(n: int, prefix: str = "c") -> LatticeSpec:
    elems = tuple(f"{prefix}{i}" for i in range(n))
    leq = frozenset((elems[i], elems[j]) for i in range(n) for j in range(i, n))
    return LatticeSpec(f"chain{n}", elems, leq)


def _lattice_tables(spec: LatticeSpec):
    """Index the order, compute binary meets and the top element.
    Rejects non-posets and posets without meets or top."""
    idx = {e: i for i, e in enumerate(spec.elements)}
    n = len(spec.elements)
    leq = [[False] * n for _ in range(n)]
    for x, y in spec.leq:
        leq[idx[x]][idx[y]] = True
    for i in range(n):
        if not leq[i][i]:
            raise StructuralError(f"{spec.name}: order not reflexive at {spec.elements[i]}")
        for j in range(n):
            if leq[i][j] and leq[j][i] and i != j:
                raise StructuralError(f"{spec.name}: order not antisymmetric")
            for k in range(n):
                if leq[i][j] and leq[j][k] and not leq[i][k]:
                    raise StructuralError(f"{spec.name}: order not transitive")
    meet = {}
    for i in range(n):
        for j in range(n):
            lower = [k for k in range(n) if leq[k][i] and leq[k][j]]
            best = [k for k in lower if all(leq[m][k] for m in lower)]
            if len(best) != 1:
                raise StructuralError(
                    f"{spec.name}: no meet of {spec.elements[i]} and {spec.elements[j]}"
                )
            meet[(i, j)] = best[0]
    tops = [i for i in range(n) if all(leq[j][i] for j in range(n))]
    if len(tops) != 1:
        raise StructuralError(f"{spec.name}: no top element")
    return idx, leq, meet, tops[0]


def _lattice_category(spec: LatticeSpec):
    idx, leq, meet, top = _lattice_tables(spec)
    n = len(spec.elements)
    mors = []
    mindex = {}
    for i in range(n):
        for j in range(n):
            if leq[i][j]:
                mindex[(i, j)] = len(mors)
                mors.append((f"{spec.elements[i]}<={spec.elements[j]}", i, j))
    identity = tuple(mindex[(i, i)] for i in range(n))
    compose = {}
    for (i, j), f in mindex.items():
        for (j2, k), g in mindex.items():
            if j == j2:
                compose[(f, g)] = mindex[(i, k)]
    cat = FinCategory(spec.name, spec.elements, tuple(mors), identity, compose)
    return cat, idx, mindex, meet, top


def _meet_monoid(cat: FinCategory, mindex, meet, top) -> MonoidalStructure:
    mor_tensor = {}
    for (i, j), f in mindex.items():
        for (k, l), g in mindex.items():
            mor_tensor[(f, g)] = mindex[(meet[(i, k)], meet[(j, l)])]
    return MonoidalStructure(cat, top, dict(meet), mor_tensor)


@dataclass(eq=False)
class LatticeSystem:
    """A monotone meet-preserving map as a monoidal refinement system,
    with every element carrying its idempotent-meet monoid structure."""

    mrs: MonoidalRefinementSystem
    monoids: tuple[MonoidObject, ...]
    src: LatticeSpec
    tgt: LatticeSpec
    ref_index: dict[str, int]
    base_index: dict[str, int]
    ref_mors: dict[tuple[int, int], int]
    base_mors: dict[tuple[int, int], int]

    @property
    def sys(self) -> RefinementSystem:
        return self.mrs.sys

    def ref_mor(self, x: str, y: str) -> int:
        return self.ref_mors[(self.ref_index[x], self.ref_index[y])]

    def base_mor(self, x: str, y: str) -> int:
        return self.base_mors[(self.base_index[x], self.base_index[y])]


def build_lattice(src: LatticeSpec, tgt: LatticeSpec, t_map: dict[str, str]) -> LatticeSystem:
    """A lattice map as a refinement system with meet as tensor.

    The map must be monotone and preserve binary meets and the top
    element, so the projection is strict monoidal.  Residuals, where the
    target lattice has them, are found by search, and every element is a
    monoid object through its idempotent meet."""
    D, didx, dmors, dmeet, dtop = _lattice_category(src)
    T, tidx, tmors, tmeet, ttop = _lattice_category(tgt)
    if sorted(t_map) != sorted(src.elements):
        raise StructuralError("t_map is not total on the source lattice")
    obj_map = []
    for e in src.elements:
        if t_map[e] not in tidx:
            raise StructuralError(f"t_map sends {e} outside the target lattice")
        obj_map.append(tidx[t_map[e]])
    for (i, j), _ in dmors.items():
        if (obj_map[i], obj_map[j]) not in tmors:
            raise StructuralError(
                f"t_map is not monotone at {src.elements[i]} <= {src.elements[j]}"
            )
    for (i, j), m in dmeet.items():
        if tmeet[(obj_map[i], obj_map[j])] != obj_map[m]:
            raise StructuralError(
                f"t_map does not preserve the meet of {src.elements[i]} "
                f"and {src.elements[j]}"
            )
    if obj_map[dtop] != ttop:
        raise StructuralError("t_map does not preserve the top element")
    mor_map = tuple(
        tmors[(obj_map[i], obj_map[j])] for (i, j) in dmors
    )
    t = FunctorData(f"{src.name}->{tgt.name}", D, T, tuple(obj_map), mor_map)
    sys = RefinementSystem(f"{src.name}/{tgt.name}", t)
    mrs = MonoidalRefinementSystem(sys, _meet_monoid(D, dmors, dmeet, dtop), _meet_monoid(T, tmors, tmeet, ttop))
    _raise_if_invalid(mrs.validate())
    monoids = tuple(
        MonoidObject(
            mrs,
            W,
            tmors[(W, W)],
            tmors[(ttop, W)] if W == ttop else None,
        )
        for W in range(T.n_objects)
    )
    for mo in monoids:
        _raise_if_invalid(mo.validate())
    return LatticeSystem(mrs, monoids, src, tgt, didx, tidx, dmors, tmors)


def collapse_lattice_fixture() -> LatticeSystem:
    """The two-atom powerset collapsed onto a three-chain: counts atoms,
    except that the first atom is invisible."""
    return build_lattice(
        powerset_lattice(("a", "b")),
        chain_lattice(3),
        {"{}": "c0", "{a}": "c0", "{b}": "c1", "{a,b}": "c2"},
    )


def identity_lattice_fixture(atoms: tuple[str, ...] = ("a", "b")) -> LatticeSystem:
    """A powerset over itself: every hypothesis holds strictly."""
    spec = powerset_lattice(atoms)
    return build_lattice(spec, spec, {e: e for e in spec.elements})


def _poset_functor(name: str, src: FinCategory, src_mors, tgt: FinCategory, tgt_mors, obj_map) -> FunctorData:
    back_s = {v: k for k, v in src_mors.items()}
    mor_map = []
    for f in range(src.n_morphisms):
        i, j = back_s[f]
        key = (obj_map[i], obj_map[j])
        if key not in tgt_mors:
            raise StructuralError(f"{name} is not monotone")
        mor_map.append(tgt_mors[key])
    return FunctorData(name, src, tgt, tuple(obj_map), tuple(mor_map))


def galois_fixture() -> RefSysAdjunction:
    """A Galois connection between the collapse system and the identity
    two-chain system, lifted to an adjunction of refinement systems.

    The left adjoint truncates (zero stays low, everything else goes
    high); the right adjoint picks the largest element sent low or high.
    Units and counits are the order witnesses."""
    s = collapse_lattice_fixture()
    e = build_lattice(chain_lattice(2), chain_lattice(2), {"c0": "c0", "c1": "c1"})
    sD, sT = s.sys.D, s.sys.T
    eD, eT = e.sys.D, e.sys.T

    f_t_obj = [e.base_index[x] for x in ("c0", "c1", "c1")]
    F_T = _poset_functor("F_T", sT, s.base_mors, eT, e.base_mors, f_t_obj)
    f_d_obj = [f_t_obj[s.sys.shape(P)] for P in range(sD.n_objects)]
    F_D = _poset_functor("F_D", sD, s.ref_mors, eD, e.ref_mors, f_d_obj)

    g_t_obj = [s.base_index[x] for x in ("c0", "c2")]
    G_T = _poset_functor("G_T", eT, e.base_mors, sT, s.base_mors, g_t_obj)
    g_d_obj = [s.ref_index[x] for x in ("{a}", "{a,b}")]
    G_D = _poset_functor("G_D", eD, e.ref_mors, sD, s.ref_mors, g_d_obj)

    left = RefSysMorphism("F", s.sys, e.sys, F_D, F_T)
    right = RefSysMorphism("G", e.sys, s.sys, G_D, G_T)

    unit_ref = NatTransData(
        "eta",
        identity_functor(sD),
        compose_functors(F_D, G_D),
        tuple(s.ref_mors[(P, g_d_obj[f_d_obj[P]])] for P in range(sD.n_objects)),
    )
    counit_ref = NatTransData(
        "eps",
        compose_functors(G_D, F_D),
        identity_functor(eD),
        tuple(e.ref_mors[(f_d_obj[g_d_obj[R]], R)] for R in range(eD.n_objects)),
    )
    unit_base = NatTransData(
        "eta0",
        identity_functor(sT),
        compose_functors(F_T, G_T),
        tuple(s.base_mors[(X, g_t_obj[f_t_obj[X]])] for X in range(sT.n_objects)),
    )
    counit_base = NatTransData(
        "eps0",
        compose_functors(G_T, F_T),
        identity_functor(eT),
        tuple(e.base_mors[(f_t_obj[g_t_obj[Y]], Y)] for Y in range(eT.n_objects)),
    )
    return RefSysAdjunction(
        name="galois",
        left=left,
        right=right,
        unit_ref=unit_ref,
        counit_ref=counit_ref,
        unit_base=unit_base,
        counit_base=counit_base,
    )


# ---------------------------------------------------------------------------
# Seeded random systems


@dataclass(frozen=True)
class RandomBounds:
    """Bounds for the generator; the defaults keep every derived
    construction exhaustively checkable."""

    t_objects: int = 3
    d_objects: int = 6
    hom: int = 3
    carrier: int = 3
    generators: int = 3
    retries: int = 80


def _close_concrete(n_obj, carriers, seeds, hom_bound):
    """Close a set of concrete arrows under composition.

    Arrows are (dom, cod, data) where data composes associatively by
    construction; returns None when a hom-set overflows the bound."""
    arrows: list[tuple[int, int, tuple]] = []
    index: dict[tuple[int, int, tuple], int] = {}
    hom_count: dict[tuple[int, int], int] = {}

    def add(a, b, data):
        key = (a, b, data)
        if key in index:
            return None
        if hom_count.get((a, b), 0) >= hom_bound:
            return False
        index[key] = len(arrows)
        arrows.append(key)
        hom_count[(a, b)] = hom_count.get((a, b), 0) + 1
        return index[key]

    for a in range(n_obj):
        if add(a, a, tuple(range(carriers[a]))) is False:
            return None
    for a, b, data in seeds:
        if add(a, b, data) is False:
            return None
    frontier = list(range(len(arrows)))
    while frontier:
        fresh = []
        snapshot = len(arrows)
        for i in frontier:
            for j in range(snapshot):
                for f, g in ((arrows[i], arrows[j]), (arrows[j], arrows[i])):
                    if f[1] != g[0]:
                        continue
                    comp = tuple(g[2][x] for x in f[2])
                    got = add(f[0], g[1], comp)
                    if got is False:
                        return None
                    if got is not None:
                        fresh.append(got)
        frontier = fresh
    compose = {}
    for i, f in enumerate(arrows):
        for j, g in enumerate(arrows):
            if f[1] == g[0]:
                compose[(i, j)] = index[(f[0], g[1], tuple(g[2][x] for x in f[2]))]
    return arrows, index, compose


def _try_random(rng: random.Random, bounds: RandomBounds):
    nt = rng.randint(1, bounds.t_objects)
    t_car = [rng.randint(1, bounds.carrier) for _ in range(nt)]
    seeds = []
    for _ in range(rng.randint(0, bounds.generators)):
        a, b = rng.randrange(nt), rng.randrange(nt)
        seeds.append((a, b, tuple(rng.randrange(t_car[b]) for _ in range(t_car[a]))))
    closed = _close_concrete(nt, t_car, seeds, bounds.hom)
    if closed is None:
        return None
    t_arrows, t_index, t_compose = closed
    T = FinCategory(
        "T",
        tuple(f"X{a}" for a in range(nt)),
        tuple((f"t{i}", a, b) for i, (a, b, _) in enumerate(t_arrows)),
        tuple(t_index[(a, a, tuple(range(t_car[a])))] for a in range(nt)),
        t_compose,
    )

    nd = rng.randint(1, bounds.d_objects)
    shape = [rng.randrange(nt) for _ in range(nd)]
    d_car = [rng.randint(1, bounds.carrier) for _ in range(nd)]
    d_seeds = []
    for _ in range(rng.randint(0, bounds.generators)):
        P, Q = rng.randrange(nd), rng.randrange(nd)
        over = T.hom(shape[P], shape[Q])
        if not over:
            continue
        u = over[rng.randrange(len(over))]
        e = tuple(rng.randrange(d_car[Q]) for _ in range(d_car[P]))
        d_seeds.append((P, Q, (u, e)))

    # arrows carry their base morphism; composition pairs the base
    # composite with the function composite, so laws hold by construction
    arrows: list[tuple[int, int, tuple]] = []
    index: dict[tuple[int, int, tuple], int] = {}
    hom_count: dict[tuple[int, int], int] = {}

    def add(P, Q, data):
        key = (P, Q, data)
        if key in index:
            return None
        if hom_count.get((P, Q), 0) >= bounds.hom:
            return False
        index[key] = len(arrows)
        arrows.append(key)
        hom_count[(P, Q)] = hom_count.get((P, Q), 0) + 1
        return index[key]

    for P in range(nd):
        if add(P, P, (T.id_of(shape[P]), tuple(range(d_car[P])))) is False:
            return None
    for P, Q, data in d_seeds:
        if add(P, Q, data) is False:
            return None
    frontier = list(range(len(arrows)))
    while frontier:
        fresh = []
        snapshot = len(arrows)
        for i in frontier:
            for j in range(snapshot):
                for f, g in ((arrows[i], arrows[j]), (arrows[j], arrows[i])):
                    if f[1] != g[0]:
                        continue
                    data = (
                        T.compose(f[2][0], g[2][0]),
                        tuple(g[2][1][x] for x in f[2][1]),
                    )
                    got = add(f[0], g[1], data)
                    if got is False:
                        return None
                    if got is not None:
                        fresh.append(got)
        frontier = fresh
    compose = {}
    for i, f in enumerate(arrows):
        for j, g in enumerate(arrows):
            if f[1] == g[0]:
                compose[(i, j)] = index[
                    (f[0], g[1], (T.compose(f[2][0], g[2][0]), tuple(g[2][1][x] for x in f[2][1])))
                ]
    D = FinCategory(
        "D",
        tuple(f"P{P}" for P in range(nd)),
        tuple((f"d{i}", P, Q) for i, (P, Q, _) in enumerate(arrows)),
        tuple(index[(P, P, (T.id_of(shape[P]), tuple(range(d_car[P]))))] for P in range(nd)),
        compose,
    )
    t = FunctorData(
        "proj",
        D,
        T,
        tuple(shape),
        tuple(data[0] for (_, _, data) in arrows),
    )
    return RefinementSystem("random", t)


def random_refsys(seed: int, bounds: RandomBounds | None = None) -> RefinementSystem:
    """A small random refinement system, deterministic in the seed.

    Both categories are built as concrete categories (objects carry
    finite sets, morphisms carry functions) closed under composition, so
    associativity is inherited; the projection forgets the extra data.
    Samples whose hom-sets overflow the bounds are rejected and redrawn."""
    bounds = bounds or RandomBounds()
    rng = random.Random(seed)
    for _ in range(bounds.retries):
        sys = _try_random(rng, bounds)
        if sys is None:
            continue
        report = sys.validate()
        if report.ok:
            return sys
    raise StructuralError(
        f"no valid system within {bounds.retries} draws for seed {seed}"
    )


def bang_system(cat: FinCategory, name: str | None = None) -> RefinementSystem:
    """A category over the point: refinements of a single shape.

    Slices of the result are the category again and judgments are plain
    hom-sets, so presheaf-level facts can be compared against their
    unrefined counterparts."""
    pt = FinCategory("pt", ("*",), (("id*", 0, 0),), (0,), {(0, 0): 0})
    t = FunctorData(
        f"!{cat.name}",
        cat,
        pt,
        (0,) * cat.n_objects,
        (0,) * cat.n_morphisms,
    )
    return RefinementSystem(name or f"bang({cat.name})", t)
