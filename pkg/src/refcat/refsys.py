"""Refinement systems: functors t : D -> T read as type systems.

An object P of D with t(P) = A is a refinement of A, written P |- A.
A judgment (P, c, Q) asks whether the T-morphism c : t(P) -> t(Q) carries
P into Q; a derivation of it is a D-morphism alpha : P -> Q with
t(alpha) = c.  Everything downstream (representations, duality) is
computed from the derivation index built here.
"""

from __future__ import annotations

from dataclasses import dataclass

from .fincat import (
    FinCategory,
    FunctorData,
    NatTransData,
    StructuralError,
    ValidationReport,
    compose_functors,
    identity_functor,
    opposite,
    validate_functor,
    validate_nat_trans,
)
from .reports import CheckReport


class RefinementSystem:
    """A functor t : D -> T with an eager index of derivations by judgment."""

    def __init__(self, name: str, t: FunctorData):
        self.name = name
        self.t = t
        self.D = t.source
        self.T = t.target
        # derivations[(P, c, Q)] = sorted tuple of D-morphism indices alpha
        # with dom alpha = P, cod alpha = Q, t(alpha) = c.
        index: dict[tuple[int, int, int], list[int]] = {}
        for a in range(self.D.n_morphisms):
            key = (self.D.dom(a), t.mor(a), self.D.cod(a))
            index.setdefault(key, []).append(a)
        self._derivations = {k: tuple(sorted(v)) for k, v in index.items()}
        fibers: dict[int, list[int]] = {A: [] for A in range(self.T.n_objects)}
        for P in range(self.D.n_objects):
            fibers[t.obj(P)].append(P)
        self._fibers = {A: tuple(v) for A, v in fibers.items()}
        self._op: RefinementSystem | None = None

    def __repr__(self) -> str:
        return f"RefinementSystem({self.name}: {self.D.name} -> {self.T.name})"

    def shape(self, P: int) -> int:
        """The T-object refined by P."""
        return self.t.obj(P)

    def fiber(self, A: int) -> tuple[int, ...]:
        """All refinements of the T-object A, in object index order."""
        return self._fibers[A]

    def valid_judgment(self, P: int, c: int, Q: int) -> bool:
        return self.T.dom(c) == self.shape(P) and self.T.cod(c) == self.shape(Q)

    def derivations(self, P: int, c: int, Q: int) -> tuple[int, ...]:
        """All derivations of the judgment (P, c, Q), in morphism index order."""
        if not self.valid_judgment(P, c, Q):
            raise StructuralError(
                f"{self.name}: ({self.D.object_name(P)}, {self.T.morphism_name(c)}, "
                f"{self.D.object_name(Q)}) is not a judgment"
            )
        return self._derivations.get((P, c, Q), ())

    def derivable(self, P: int, c: int, Q: int) -> bool:
        return len(self.derivations(P, c, Q)) > 0

    def subtypings(self, P: int, Q: int) -> tuple[int, ...]:
        """Derivations over the identity; these witness P <= Q in the fiber."""
        A = self.shape(P)
        if self.shape(Q) != A:
            return ()
        return self.derivations(P, self.T.identity[A], Q)

    def judgments(self):
        """All valid judgments (P, c, Q), derivable or not, in index order."""
        for P in range(self.D.n_objects):
            A = self.shape(P)
            for Q in range(self.D.n_objects):
                B = self.shape(Q)
                for c in self.T.hom(A, B):
                    yield (P, c, Q)

    def judgment_name(self, P: int, c: int, Q: int) -> str:
        return (
            f"{self.D.object_name(P)} ={self.T.morphism_name(c)}=> "
            f"{self.D.object_name(Q)}"
        )

    def compose_derivations(self, alpha: int, beta: int) -> int:
        return self.D.compose(alpha, beta)

    def vertical_iso(self, P: int, Q: int) -> tuple[int, int] | None:
        """A pair (alpha, beta) of mutually inverse derivations over the
        identity, or None.  First pair in index order."""
        if self.shape(P) != self.shape(Q):
            return None
        idP = self.D.identity[P]
        idQ = self.D.identity[Q]
        for alpha in self.subtypings(P, Q):
            for beta in self.subtypings(Q, P):
                if (
                    self.D.compose(alpha, beta) == idP
                    and self.D.compose(beta, alpha) == idQ
                ):
                    return (alpha, beta)
        return None

    def op(self) -> "RefinementSystem":
        """The opposite system t^op : D^op -> T^op.

        Object and morphism indices are shared with self, so certificates
        and counterexamples transport across without renaming.
        """
        if self._op is None:
            Dop = opposite(self.D)
            Top = opposite(self.T)
            top = FunctorData(
                name=f"{self.t.name}^op",
                source=Dop,
                target=Top,
                object_map=self.t.object_map,
                morphism_map=self.t.morphism_map,
            )
            self._op = RefinementSystem(f"{self.name}^op", top)
            self._op._op = self
        return self._op

    def validate(self) -> ValidationReport:
        report = ValidationReport(subject=f"refinement system {self.name}")
        for sub in (
            self.D.validate(),
            self.T.validate(),
            validate_functor(self.t),
        ):
            report.violations.extend(sub.violations)
        return report


# ---------------------------------------------------------------------------
# cartesian / opcartesian lifts


@dataclass
class LiftCertificate:
    """Witness that a derivation is a (op)cartesian lift.

    For direction "pullback": `structural` is ell : result -> subject over c,
    and every derivation (P, d;c, subject) factors uniquely as sigma ; ell
    with sigma over d.  For "pushforward": `structural` is ell : subject ->
    result over c, factoring on the other side.  `tests` counts the
    factoring problems that were solved during certification.
    """

    system: RefinementSystem
    direction: str  # "pullback" | "pushforward"
    c: int
    subject: int
    result: int
    structural: int
    tests: int

    def replay(self) -> bool:
        """Re-run the universal property from scratch."""
        if self.direction == "pullback":
            return _is_cartesian(
                self.system, self.c, self.subject, self.result, self.structural
            )
        ops = self.system.op()
        return _is_cartesian(ops, self.c, self.subject, self.result, self.structural)


def _is_cartesian(sys: RefinementSystem, c: int, Q: int, P0: int, ell: int) -> bool:
    """Does ell : P0 -> Q over c satisfy the universal property of a
    cartesian lift?  Checked as: for every (P, d) with d : t(P) -> dom c,
    postcomposition with ell is a bijection
    derivations(P, d, P0) -> derivations(P, d;c, Q)."""
    return _cartesian_tests(sys, c, Q, P0, ell) is not None


def _cartesian_tests(
    sys: RefinementSystem, c: int, Q: int, P0: int, ell: int
) -> int | None:
    T = sys.T
    A = T.dom(c)
    tests = 0
    for P in range(sys.D.n_objects):
        X = sys.shape(P)
        for d in T.hom(X, A):
            dc = T.compose(d, c)
            betas = sys.derivations(P, dc, Q)
            sigmas = sys.derivations(P, d, P0)
            if len(sigmas) != len(betas):
                return None
            hit = set()
            for sigma in sigmas:
                composite = sys.D.compose(sigma, ell)
                if composite in hit:
                    return None  # not injective
                hit.add(composite)
            if hit != set(betas):
                return None  # not surjective
            tests += len(betas)
    return tests


def find_pullback(sys: RefinementSystem, c: int, Q: int) -> LiftCertificate | None:
    """Search the fiber over dom c for a cartesian lift of c at Q.

    Candidates are scanned in (object index, derivation index) order, so
    the certificate returned is deterministic.
    """
    T = sys.T
    if T.cod(c) != sys.shape(Q):
        raise StructuralError(
            f"{sys.name}: {sys.D.object_name(Q)} does not refine the codomain "
            f"of {T.morphism_name(c)}"
        )
    A = T.dom(c)
    for P0 in sys.fiber(A):
        for ell in sys.derivations(P0, c, Q):
            tests = _cartesian_tests(sys, c, Q, P0, ell)
            if tests is not None:
                return LiftCertificate(
                    system=sys,
                    direction="pullback",
                    c=c,
                    subject=Q,
                    result=P0,
                    structural=ell,
                    tests=tests,
                )
    return None


def find_pushforward(sys: RefinementSystem, c: int, P: int) -> LiftCertificate | None:
    """Opcartesian lift of c at P, found by running the cartesian search in
    the opposite system.  Indices are shared, so the certificate reads
    directly as a pushforward witness in `sys`."""
    if sys.T.dom(c) != sys.shape(P):
        raise StructuralError(
            f"{sys.name}: {sys.D.object_name(P)} does not refine the domain "
            f"of {sys.T.morphism_name(c)}"
        )
    cert_op = find_pullback(sys.op(), c, P)
    if cert_op is None:
        return None
    return LiftCertificate(
        system=sys,
        direction="pushforward",
        c=c,
        subject=P,
        result=cert_op.result,
        structural=cert_op.structural,
        tests=cert_op.tests,
    )


def is_fibration(sys: RefinementSystem) -> tuple[bool, list[tuple[int, int]]]:
    """True when every (c, Q) with Q refining cod c has a pullback.
    Returns the list of missing pairs."""
    missing = []
    for c in range(sys.T.n_morphisms):
        for Q in sys.fiber(sys.T.cod(c)):
            if find_pullback(sys, c, Q) is None:
                missing.append((c, Q))
    return (not missing, missing)


def is_opfibration(sys: RefinementSystem) -> tuple[bool, list[tuple[int, int]]]:
    missing = []
    for c in range(sys.T.n_morphisms):
        for P in sys.fiber(sys.T.dom(c)):
            if find_pushforward(sys, c, P) is None:
                missing.append((c, P))
    return (not missing, missing)


class _LiftCache:
    """Memoised lift searches for one system."""

    def __init__(self, sys: RefinementSystem):
        self.sys = sys
        self.pulls: dict[tuple[int, int], LiftCertificate | None] = {}
        self.pushes: dict[tuple[int, int], LiftCertificate | None] = {}

    def pull(self, c: int, Q: int) -> LiftCertificate | None:
        key = (c, Q)
        if key not in self.pulls:
            self.pulls[key] = find_pullback(self.sys, c, Q)
        return self.pulls[key]

    def push(self, c: int, P: int) -> LiftCertificate | None:
        key = (c, P)
        if key not in self.pushes:
            self.pushes[key] = find_pushforward(self.sys, c, P)
        return self.pushes[key]


def pullpush_laws_check(sys: RefinementSystem) -> CheckReport:
    """Functoriality and monotonicity of pullback and pushforward.

    Whenever both sides exist: pulling along d then c agrees with pulling
    along d;c up to vertical iso, identities pull to the same type up to
    vertical iso, pulling preserves subtyping; dually for pushing.
    Instances where a needed lift does not exist are skipped, since the
    laws only speak about types the system can actually form.
    """
    report = CheckReport(
        name="pull-push-laws",
        statement="pullbacks and pushforwards compose, respect identities, "
        "and are monotone in the subject",
    )
    cache = _LiftCache(sys)
    T = sys.T

    def nm(P):
        return sys.D.object_name(P)

    def nc(c):
        return T.morphism_name(c)

    # identity laws
    for A in range(T.n_objects):
        idA = T.identity[A]
        for Q in sys.fiber(A):
            cert = cache.pull(idA, Q)
            if cert is None:
                report.record_skip("identity pullback missing")
                continue
            report.check(
                sys.vertical_iso(cert.result, Q) is not None,
                f"pull along id_{T.object_name(A)} of {nm(Q)} gave "
                f"{nm(cert.result)}, not iso to {nm(Q)}",
            )
            cert2 = cache.push(idA, Q)
            if cert2 is None:
                report.record_skip("identity pushforward missing")
                continue
            report.check(
                sys.vertical_iso(cert2.result, Q) is not None,
                f"push along id_{T.object_name(A)} of {nm(Q)} gave "
                f"{nm(cert2.result)}, not iso to {nm(Q)}",
            )

    # composition laws
    for d in range(T.n_morphisms):
        for c in T.mor_out(T.cod(d)):
            dc = T.compose(d, c)
            for Q in sys.fiber(T.cod(c)):
                inner = cache.pull(c, Q)
                whole = cache.pull(dc, Q)
                if inner is None or whole is None:
                    report.record_skip("composite pullback instance missing")
                else:
                    outer = cache.pull(d, inner.result)
                    if outer is None:
                        report.record_skip("composite pullback instance missing")
                    else:
                        report.check(
                            sys.vertical_iso(whole.result, outer.result) is not None,
                            f"pull {nc(d)};{nc(c)} of {nm(Q)}: {nm(whole.result)} "
                            f"vs staged {nm(outer.result)}",
                        )
            for P in sys.fiber(T.dom(d)):
                inner = cache.push(d, P)
                whole = cache.push(dc, P)
                if inner is None or whole is None:
                    report.record_skip("composite pushforward instance missing")
                else:
                    outer = cache.push(c, inner.result)
                    if outer is None:
                        report.record_skip("composite pushforward instance missing")
                    else:
                        report.check(
                            sys.vertical_iso(whole.result, outer.result) is not None,
                            f"push {nc(d)};{nc(c)} of {nm(P)}: {nm(whole.result)} "
                            f"vs staged {nm(outer.result)}",
                        )

    # monotonicity
    for c in range(T.n_morphisms):
        B = T.cod(c)
        A = T.dom(c)
        for Q1 in sys.fiber(B):
            for Q2 in sys.fiber(B):
                if not sys.subtypings(Q1, Q2):
                    continue
                c1 = cache.pull(c, Q1)
                c2 = cache.pull(c, Q2)
                if c1 is None or c2 is None:
                    report.record_skip("monotonicity pullback instance missing")
                    continue
                report.check(
                    bool(sys.subtypings(c1.result, c2.result)),
                    f"{nm(Q1)} <= {nm(Q2)} but pull_{nc(c)} results "
                    f"{nm(c1.result)} !<= {nm(c2.result)}",
                )
        for P1 in sys.fiber(A):
            for P2 in sys.fiber(A):
                if not sys.subtypings(P1, P2):
                    continue
                c1 = cache.push(c, P1)
                c2 = cache.push(c, P2)
                if c1 is None or c2 is None:
                    report.record_skip("monotonicity pushforward instance missing")
                    continue
                report.check(
                    bool(sys.subtypings(c1.result, c2.result)),
                    f"{nm(P1)} <= {nm(P2)} but push_{nc(c)} results "
                    f"{nm(c1.result)} !<= {nm(c2.result)}",
                )
    return report.done()


# ---------------------------------------------------------------------------
# morphisms of refinement systems


@dataclass
class RefSysMorphism:
    """A pair of functors (on_ref : D -> D', on_base : T -> T') commuting
    with the projections: t' . on_ref == on_base . t."""

    name: str
    source: RefinementSystem
    target: RefinementSystem
    on_ref: FunctorData
    on_base: FunctorData

    def validate(self) -> ValidationReport:
        report = ValidationReport(subject=f"refinement-system morphism {self.name}")
        report.violations.extend(validate_functor(self.on_ref).violations)
        report.violations.extend(validate_functor(self.on_base).violations)
        s, t = self.source, self.target
        for P in range(s.D.n_objects):
            lhs = t.shape(self.on_ref.obj(P))
            rhs = self.on_base.obj(s.shape(P))
            if lhs != rhs:
                report.add(
                    "projection square",
                    f"square broken at object {s.D.object_name(P)}: "
                    f"{t.T.object_name(lhs)} != {t.T.object_name(rhs)}"
                )
        for a in range(s.D.n_morphisms):
            lhs = t.t.mor(self.on_ref.mor(a))
            rhs = self.on_base.mor(s.t.mor(a))
            if lhs != rhs:
                report.add(
                    "projection square",
                    f"square broken at morphism {s.D.morphism_name(a)}: "
                    f"{t.T.morphism_name(lhs)} != {t.T.morphism_name(rhs)}"
                )
        return report

    def op(self) -> "RefSysMorphism":
        sop, top = self.source.op(), self.target.op()
        return RefSysMorphism(
            name=f"{self.name}^op",
            source=sop,
            target=top,
            on_ref=FunctorData(
                name=f"{self.on_ref.name}^op",
                source=sop.D,
                target=top.D,
                object_map=self.on_ref.object_map,
                morphism_map=self.on_ref.morphism_map,
            ),
            on_base=FunctorData(
                name=f"{self.on_base.name}^op",
                source=sop.T,
                target=top.T,
                object_map=self.on_base.object_map,
                morphism_map=self.on_base.morphism_map,
            ),
        )


def fully_faithful_check(m: RefSysMorphism) -> CheckReport:
    """Does m act bijectively on derivations, judgment by judgment?

    For every source judgment (P, c, Q), applying on_ref must map its
    derivation set bijectively onto derivations of (on_ref P, on_base c,
    on_ref Q) in the target.
    """
    report = CheckReport(
        name=f"fully-faithful:{m.name}",
        statement="the morphism restricts to a bijection on each derivation set",
    )
    s, t = m.source, m.target
    for (P, c, Q) in s.judgments():
        src = s.derivations(P, c, Q)
        tgt = t.derivations(m.on_ref.obj(P), m.on_base.mor(c), m.on_ref.obj(Q))
        image = sorted(m.on_ref.mor(a) for a in src)
        if len(set(image)) == len(src) and set(image) == set(tgt):
            report.record_pass()
        else:
            report.record_fail(
                f"judgment {s.judgment_name(P, c, Q)}: {len(src)} derivations map "
                f"to {len(set(image))} distinct images out of {len(tgt)} in target"
            )
    return report.done()


# ---------------------------------------------------------------------------
# adjunctions of refinement systems


@dataclass
class RefSysAdjunction:
    """An adjunction living over an adjunction.

    left : s -> e and right : e -> s are refinement-system morphisms;
    unit_ref / counit_ref are the unit and counit of the D-level adjunction,
    unit_base / counit_base of the T-level one, and the projections send
    the former onto the latter componentwise.
    """

    name: str
    left: RefSysMorphism
    right: RefSysMorphism
    unit_ref: NatTransData
    counit_ref: NatTransData
    unit_base: NatTransData
    counit_base: NatTransData

    @property
    def s(self) -> RefinementSystem:
        return self.left.source

    @property
    def e(self) -> RefinementSystem:
        return self.left.target

    def op(self) -> "RefSysAdjunction":
        """The opposite adjunction: right^op becomes the left adjoint.
        Components keep their indices, only their direction flips."""
        lop = self.right.op()
        rop = self.left.op()
        s_op = lop.source  # = e.op()
        t_op = lop.target  # = s.op()
        unit_ref = NatTransData(
            name=f"{self.counit_ref.name}^op",
            source_functor=identity_functor(s_op.D),
            target_functor=compose_functors(lop.on_ref, rop.on_ref),
            components=self.counit_ref.components,
        )
        counit_ref = NatTransData(
            name=f"{self.unit_ref.name}^op",
            source_functor=compose_functors(rop.on_ref, lop.on_ref),
            target_functor=identity_functor(t_op.D),
            components=self.unit_ref.components,
        )
        unit_base = NatTransData(
            name=f"{self.counit_base.name}^op",
            source_functor=identity_functor(s_op.T),
            target_functor=compose_functors(lop.on_base, rop.on_base),
            components=self.counit_base.components,
        )
        counit_base = NatTransData(
            name=f"{self.unit_base.name}^op",
            source_functor=compose_functors(rop.on_base, lop.on_base),
            target_functor=identity_functor(t_op.T),
            components=self.unit_base.components,
        )
        return RefSysAdjunction(
            name=f"{self.name}^op",
            left=lop,
            right=rop,
            unit_ref=unit_ref,
            counit_ref=counit_ref,
            unit_base=unit_base,
            counit_base=counit_base,
        )


def adjunction_check(adj: RefSysAdjunction) -> CheckReport:
    """Structural validity of an adjunction of refinement systems: both
    morphisms commute with the projections, units and counits are natural,
    the triangle identities hold at both levels, and the projections send
    the refined unit and counit onto the base ones."""
    report = CheckReport(
        name=f"adjunction:{adj.name}",
        statement="adjunction data is natural, satisfies the triangle laws, "
        "and projects onto the base adjunction",
    )
    s, e = adj.s, adj.e
    F_D, F_T = adj.left.on_ref, adj.left.on_base
    G_D, G_T = adj.right.on_ref, adj.right.on_base

    for sub in (adj.left.validate(), adj.right.validate()):
        report.check(sub.ok, "\n".join(str(v) for v in sub.violations) or "morphism invalid")
    for nt in (adj.unit_ref, adj.counit_ref, adj.unit_base, adj.counit_base):
        sub = validate_nat_trans(nt)
        report.check(sub.ok, f"{nt.name}: " + ("\n".join(str(v) for v in sub.violations) or "invalid"))

    # triangle laws, refined level: F[eta_P] ; eps_{F P} = id and
    # eta_{G e} ; G[eps_e] = id
    for P in range(s.D.n_objects):
        lhs = e.D.compose(
            F_D.mor(adj.unit_ref.components[P]),
            adj.counit_ref.components[F_D.obj(P)],
        )
        report.check(
            lhs == e.D.identity[F_D.obj(P)],
            f"triangle (left, refined) fails at {s.D.object_name(P)}",
        )
    for R in range(e.D.n_objects):
        lhs = s.D.compose(
            adj.unit_ref.components[G_D.obj(R)],
            G_D.mor(adj.counit_ref.components[R]),
        )
        report.check(
            lhs == s.D.identity[G_D.obj(R)],
            f"triangle (right, refined) fails at {e.D.object_name(R)}",
        )
    # triangle laws, base level
    for X in range(s.T.n_objects):
        lhs = e.T.compose(
            F_T.mor(adj.unit_base.components[X]),
            adj.counit_base.components[F_T.obj(X)],
        )
        report.check(
            lhs == e.T.identity[F_T.obj(X)],
            f"triangle (left, base) fails at {s.T.object_name(X)}",
        )
    for Y in range(e.T.n_objects):
        lhs = s.T.compose(
            adj.unit_base.components[G_T.obj(Y)],
            G_T.mor(adj.counit_base.components[Y]),
        )
        report.check(
            lhs == s.T.identity[G_T.obj(Y)],
            f"triangle (right, base) fails at {e.T.object_name(Y)}",
        )
    # projection conditions: t(eta_P) = eta_{t P}, b(eps_R) = eps_{b R}
    for P in range(s.D.n_objects):
        report.check(
            s.t.mor(adj.unit_ref.components[P])
            == adj.unit_base.components[s.shape(P)],
            f"unit of {s.D.object_name(P)} does not project onto the base unit",
        )
    for R in range(e.D.n_objects):
        report.check(
            e.t.mor(adj.counit_ref.components[R])
            == adj.counit_base.components[e.shape(R)],
            f"counit of {e.D.object_name(R)} does not project onto the base counit",
        )
    return report.done()


def rapp_check(adj: RefSysAdjunction, max_instances: int | None = None) -> CheckReport:
    """Right adjoints preserve pullbacks, verified constructively.

    For every base morphism c and every refinement Q of its codomain that
    has a pullback c*Q in e, the check (a) certifies G(c*Q) as a pullback
    of G(Q) along G(c) in s, with G applied to the certified lift as the
    structural witness, and (b) replays, step by step, the two conversion
    chains that establish the universal property from the adjunction laws:
    one showing every beta factors through the transposed rule, one showing
    the factorisation is unique.  Each chain step is an equality of
    morphisms and is recorded separately.
    """
    report = CheckReport(
        name=f"rapp:{adj.name}",
        statement="the right adjoint maps certified pullbacks to certified "
        "pullbacks, with the factorisation given by transposition",
    )
    s, e = adj.s, adj.e
    F_D, F_T = adj.left.on_ref, adj.left.on_base
    G_D, G_T = adj.right.on_ref, adj.right.on_base
    eta, eps = adj.unit_ref, adj.counit_ref
    eta_b, eps_b = adj.unit_base, adj.counit_base
    Tb, Tt = e.T, s.T
    instances = 0

    for c in range(Tb.n_morphisms):
        A, B = Tb.dom(c), Tb.cod(c)
        for Q in e.fiber(B):
            cert = find_pullback(e, c, Q)
            if cert is None:
                report.record_skip("no pullback in the target system")
                continue
            if max_instances is not None and instances >= max_instances:
                report.record_skip("instance budget reached")
                continue
            instances += 1
            cQ = cert.result
            ell = cert.structural

            def transpose_down(x: int, y: int) -> int | None:
                """Unique u : dom(x) -> cQ over y with u ; ell = x."""
                found = None
                for u in e.derivations(e.D.dom(x), y, cQ):
                    if e.D.compose(u, ell) == x:
                        if found is not None:
                            return None  # not unique: certificate is broken
                        found = u
                return found

            # (a) G of the certificate is itself a certificate
            GcQ = G_D.obj(cQ)
            Gell = G_D.mor(ell)
            Gc = G_T.mor(c)
            tests = _cartesian_tests(s, Gc, G_D.obj(Q), GcQ, Gell)
            report.check(
                tests is not None,
                f"G({e.D.object_name(cQ)}) with G(lift) is not a pullback of "
                f"G({e.D.object_name(Q)}) along {Tt.morphism_name(Gc)}",
            )
            if tests is None:
                continue

            # (b) conversion chains, over all test derivations in s
            GA, GQ = G_T.obj(A), G_D.obj(Q)
            for P in range(s.D.n_objects):
                X = s.shape(P)
                for d in Tt.hom(X, GA):
                    # base-level conversions used implicitly by the chains
                    conv1_lhs = Tb.compose(
                        Tb.compose(F_T.mor(d), F_T.mor(Gc)), eps_b.components[B]
                    )
                    conv1_rhs = Tb.compose(
                        Tb.compose(F_T.mor(d), eps_b.components[A]), c
                    )
                    report.check(
                        conv1_lhs == conv1_rhs,
                        f"base conversion (counit naturality) fails at "
                        f"d={Tt.morphism_name(d)}, c={Tb.morphism_name(c)}",
                    )
                    conv2 = Tt.compose(
                        Tt.compose(eta_b.components[X], G_T.mor(F_T.mor(d))),
                        G_T.mor(eps_b.components[A]),
                    )
                    report.check(
                        conv2 == d,
                        f"base conversion (unit naturality + triangle) fails at "
                        f"d={Tt.morphism_name(d)}",
                    )
                    y_base = Tb.compose(F_T.mor(d), eps_b.components[A])

                    dGc = Tt.compose(d, Gc)
                    for beta in s.derivations(P, dGc, GQ):
                        # beta-chain: the transposed rule followed by G(lift)
                        # converts back to beta.
                        x = e.D.compose(F_D.mor(beta), eps.components[Q])
                        report.check(
                            e.t.mor(x) == conv1_rhs,
                            "transposed derivation lies over the wrong base morphism",
                        )
                        u = transpose_down(x, y_base)
                        if not report.check(
                            u is not None,
                            f"no unique factoring for transposed "
                            f"{s.D.morphism_name(beta)}",
                        ):
                            continue
                        r_beta = s.D.compose(eta.components[P], G_D.mor(u))
                        report.check(
                            s.t.mor(r_beta) == d,
                            f"transposed rule for {s.D.morphism_name(beta)} "
                            f"is not over d={Tt.morphism_name(d)}",
                        )
                        v1 = s.D.compose(r_beta, Gell)
                        v4 = s.D.compose(
                            eta.components[P], G_D.mor(e.D.compose(u, ell))
                        )
                        report.check(
                            v1 == v4,
                            "functoriality step of the beta-chain fails",
                        )
                        report.check(
                            e.D.compose(u, ell) == x,
                            "replay of the target-system factoring fails",
                        )
                        v6 = s.D.compose(
                            s.D.compose(eta.components[P], G_D.mor(F_D.mor(beta))),
                            G_D.mor(eps.components[Q]),
                        )
                        report.check(
                            v1 == v6,
                            "substitution step of the beta-chain fails",
                        )
                        report.check(
                            v6 == beta,
                            f"beta-chain does not close: naturality+triangle "
                            f"fails at {s.D.morphism_name(beta)}",
                        )

                    for sigma in s.derivations(P, d, GcQ):
                        # eta-chain: transposing sigma ; G(lift) recovers sigma.
                        y = e.D.compose(F_D.mor(sigma), eps.components[cQ])
                        w2 = s.D.compose(eta.components[P], G_D.mor(y))
                        report.check(
                            w2 == sigma,
                            f"unit-recovery step fails at {s.D.morphism_name(sigma)}",
                        )
                        report.check(
                            transpose_down(e.D.compose(y, ell), y_base) == y,
                            "re-transposing the unfolded derivation moves it",
                        )
                        lhs = e.D.compose(eps.components[cQ], ell)
                        rhs = e.D.compose(
                            F_D.mor(G_D.mor(ell)), eps.components[Q]
                        )
                        report.check(
                            lhs == rhs,
                            "counit naturality at the lift fails",
                        )
                        beta_sigma = s.D.compose(sigma, Gell)
                        report.check(
                            F_D.mor(beta_sigma)
                            == e.D.compose(F_D.mor(sigma), F_D.mor(Gell)),
                            "functor distribution step fails",
                        )
                        x2 = e.D.compose(F_D.mor(beta_sigma), eps.components[Q])
                        u2 = transpose_down(x2, y_base)
                        if not report.check(
                            u2 is not None,
                            "no unique factoring in the eta-chain",
                        ):
                            continue
                        r2 = s.D.compose(eta.components[P], G_D.mor(u2))
                        report.check(
                            r2 == sigma,
                            f"eta-chain does not close at {s.D.morphism_name(sigma)}",
                        )
    return report.done()


def lapp_check(adj: RefSysAdjunction, max_instances: int | None = None) -> CheckReport:
    """Left adjoints preserve pushforwards: the same statement as
    rapp_check applied to the opposite adjunction, where pushforwards
    become pullbacks and the left adjoint becomes the right one."""
    report = rapp_check(adj.op(), max_instances=max_instances)
    report.name = f"lapp:{adj.name}"
    report.statement = (
        "the left adjoint maps certified pushforwards to certified "
        "pushforwards, with the factorisation given by transposition"
    )
    return report


# ---------------------------------------------------------------------------
# monoidal structure


@dataclass
class MonoidalStructure:
    """Strict monoidal structure on a finite category: a unit object and
    total tensor tables on objects and morphisms.  Strictness means the
    tables are literally associative and unital, which validate() checks.
    """

    cat: FinCategory
    unit: int
    obj_tensor: dict[tuple[int, int], int]
    mor_tensor: dict[tuple[int, int], int]

    def tobj(self, a: int, b: int) -> int:
        return self.obj_tensor[(a, b)]

    def tmor(self, f: int, g: int) -> int:
        return self.mor_tensor[(f, g)]

    def validate(self) -> ValidationReport:
        report = ValidationReport(subject=f"monoidal structure on {self.cat.name}")
        cat = self.cat
        n = cat.n_objects
        for a in range(n):
            for b in range(n):
                if (a, b) not in self.obj_tensor:
                    report.add(
                        "tensor totality",
                        f"object tensor missing at "
                        f"({cat.object_name(a)}, {cat.object_name(b)})"
                    )
        for f in range(cat.n_morphisms):
            for g in range(cat.n_morphisms):
                if (f, g) not in self.mor_tensor:
                    report.add(
                        "tensor totality",
                        f"morphism tensor missing at "
                        f"({cat.morphism_name(f)}, {cat.morphism_name(g)})"
                    )
        if report.violations:
            return report
        for a in range(n):
            if self.tobj(self.unit, a) != a or self.tobj(a, self.unit) != a:
                report.add("tensor unit", f"unit law fails at object {cat.object_name(a)}")
            for b in range(n):
                for c in range(n):
                    if self.tobj(self.tobj(a, b), c) != self.tobj(a, self.tobj(b, c)):
                        report.add(
                            "tensor associativity",
                            f"object associativity fails at "
                            f"({cat.object_name(a)}, {cat.object_name(b)}, "
                            f"{cat.object_name(c)})"
                        )
        for f in range(cat.n_morphisms):
            fg = self.tmor(f, cat.identity[self.unit])
            gf = self.tmor(cat.identity[self.unit], f)
            if fg != f or gf != f:
                report.add("tensor unit", f"unit law fails at morphism {cat.morphism_name(f)}")
        # endpoints and functoriality of the tensor
        for f in range(cat.n_morphisms):
            for g in range(cat.n_morphisms):
                h = self.tmor(f, g)
                if cat.dom(h) != self.tobj(cat.dom(f), cat.dom(g)) or cat.cod(
                    h
                ) != self.tobj(cat.cod(f), cat.cod(g)):
                    report.add(
                        "tensor endpoints",
                        f"tensor endpoints wrong at "
                        f"({cat.morphism_name(f)}, {cat.morphism_name(g)})"
                    )
        for a in range(n):
            for b in range(n):
                if self.tmor(cat.identity[a], cat.identity[b]) != cat.identity[
                    self.tobj(a, b)
                ]:
                    report.add(
                        "tensor identities",
                        f"tensor of identities fails at "
                        f"({cat.object_name(a)}, {cat.object_name(b)})"
                    )
        for f1 in range(cat.n_morphisms):
            for f2 in cat.mor_out(cat.cod(f1)):
                for g1 in range(cat.n_morphisms):
                    for g2 in cat.mor_out(cat.cod(g1)):
                        lhs = self.tmor(cat.compose(f1, f2), cat.compose(g1, g2))
                        rhs = cat.compose(self.tmor(f1, g1), self.tmor(f2, g2))
                        if lhs != rhs:
                            report.add(
                                "tensor interchange",
                                f"interchange fails at ({cat.morphism_name(f1)};"
                                f"{cat.morphism_name(f2)}, {cat.morphism_name(g1)};"
                                f"{cat.morphism_name(g2)})"
                            )
                            return report  # one witness is enough, this is O(m^4)
        return report


def find_left_residual(
    mon: MonoidalStructure, a: int, c: int
) -> tuple[int, int] | None:
    """The left residual of a and c: an object x with a plug morphism
    a (x) x -> c such that u |-> (id_a (x) u) ; plug is a bijection
    hom(b, x) -> hom(a (x) b, c) for every object b.  Returns the first
    certified (x, plug) pair in index order, or None."""
    cat = mon.cat
    ida = cat.identity[a]
    for x in range(cat.n_objects):
        for plug in cat.hom(mon.tobj(a, x), c):
            if all(
                _bijective_by_composite(
                    cat,
                    [(u, cat.compose(mon.tmor(ida, u), plug)) for u in cat.hom(b, x)],
                    cat.hom(mon.tobj(a, b), c),
                )
                for b in range(cat.n_objects)
            ):
                return (x, plug)
    return None


def find_right_residual(
    mon: MonoidalStructure, b: int, c: int
) -> tuple[int, int] | None:
    """The right residual of b and c: an object x with plug : x (x) b -> c
    such that u |-> (u (x) id_b) ; plug is a bijection hom(a, x) ->
    hom(a (x) b, c) for every a."""
    cat = mon.cat
    idb = cat.identity[b]
    for x in range(cat.n_objects):
        for plug in cat.hom(mon.tobj(x, b), c):
            if all(
                _bijective_by_composite(
                    cat,
                    [(u, cat.compose(mon.tmor(u, idb), plug)) for u in cat.hom(a, x)],
                    cat.hom(mon.tobj(a, b), c),
                )
                for a in range(cat.n_objects)
            ):
                return (x, plug)
    return None


def _bijective_by_composite(
    cat: FinCategory, pairs: list[tuple[int, int]], target: tuple[int, ...]
) -> bool:
    images = [img for _, img in pairs]
    return len(set(images)) == len(images) and set(images) == set(target)


def left_curry(
    mon: MonoidalStructure, p: int, a: int, b: int, x: int, plug: int
) -> int:
    """Transpose p : a (x) b -> c through a certified left residual (x, plug
    : a (x) x -> c): the unique u : b -> x with (id_a (x) u) ; plug = p.
    The decomposition (a, b) of dom(p) must be supplied; tensor tables are
    not injective in general."""
    cat = mon.cat
    found = None
    for u in cat.hom(b, x):
        if cat.compose(mon.tmor(cat.identity[a], u), plug) == p:
            if found is not None:
                raise StructuralError("left residual transpose is not unique")
            found = u
    if found is None:
        raise StructuralError(
            f"no left-residual transpose for {cat.morphism_name(p)}"
        )
    return found


def right_curry(
    mon: MonoidalStructure, p: int, a: int, b: int, x: int, plug: int
) -> int:
    """Transpose p : a (x) b -> c through a certified right residual (x,
    plug : x (x) b -> c): the unique u : a -> x with (u (x) id_b) ; plug = p."""
    cat = mon.cat
    found = None
    for u in cat.hom(a, x):
        if cat.compose(mon.tmor(u, cat.identity[b]), plug) == p:
            if found is not None:
                raise StructuralError("right residual transpose is not unique")
            found = u
    if found is None:
        raise StructuralError(
            f"no right-residual transpose for {cat.morphism_name(p)}"
        )
    return found


@dataclass
class MonoidalRefinementSystem:
    """A refinement system whose projection is a strict monoidal functor."""

    sys: RefinementSystem
    mon_ref: MonoidalStructure  # on D
    mon_base: MonoidalStructure  # on T

    def validate(self) -> ValidationReport:
        report = self.sys.validate()
        report.violations.extend(self.mon_ref.validate().violations)
        report.violations.extend(self.mon_base.validate().violations)
        t = self.sys.t
        for P in range(self.sys.D.n_objects):
            for Q in range(self.sys.D.n_objects):
                lhs = t.obj(self.mon_ref.tobj(P, Q))
                rhs = self.mon_base.tobj(t.obj(P), t.obj(Q))
                if lhs != rhs:
                    report.add(
                        "monoidal projection",
                        f"projection not monoidal at objects "
                        f"({self.sys.D.object_name(P)}, {self.sys.D.object_name(Q)})"
                    )
        for f in range(self.sys.D.n_morphisms):
            for g in range(self.sys.D.n_morphisms):
                lhs = t.mor(self.mon_ref.tmor(f, g))
                rhs = self.mon_base.tmor(t.mor(f), t.mor(g))
                if lhs != rhs:
                    report.add(
                        "monoidal projection",
                        f"projection not monoidal at morphisms "
                        f"({self.sys.D.morphism_name(f)}, "
                        f"{self.sys.D.morphism_name(g)})"
                    )
        if t.obj(self.mon_ref.unit) != self.mon_base.unit:
            report.add("monoidal projection", "projection does not preserve the monoidal unit")
        return report
