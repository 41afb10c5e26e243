"""Batch command line: load systems, query them, run verification suites.

Exit codes: 0 all checks pass, 1 a check failed, 2 usage or load error.
Output is canonical: identical workspace and command give identical bytes.
"""

from __future__ import annotations

import argparse
import sys as _sys

from . import fixtures as fx
from . import textio
from .duality import (
    dual_left,
    dual_right,
    duality_check,
    negative_encoding_check,
    notnottensor_check,
)
from .fincat import SizeGuardExceeded, StructuralError
from .refsys import RefinementSystem, adjunction_check, find_pullback, find_pushforward, rapp_check
from .reports import CheckReport
from .represent import (
    coslice_of,
    factorization_check,
    neg_rep,
    pos_rep,
    preservation_check,
    representation_ff_check,
    slice_of,
)
from .textio import LoadError, Workspace

SUITES = (
    "laws",
    "ff",
    "preservation",
    "factorization",
    "genday",
    "duality",
    "negative-encoding",
    "notnot-tensor",
    "rapp",
    "all",
)


class UsageError(Exception):
    pass


def _resolve_obj(cat, name: str, what: str) -> int:
    try:
        return list(cat.objects).index(name)
    except ValueError:
        raise UsageError(f"unknown {what} {name!r} in {cat.name}") from None


def _resolve_mor(cat, name: str, what: str) -> int:
    try:
        return list(cat.mor_names).index(name)
    except ValueError:
        raise UsageError(f"unknown {what} {name!r} in {cat.name}") from None


def _system_entry(ws: Workspace, name: str | None) -> tuple[str, RefinementSystem]:
    try:
        s = ws.the_system(name)
    except KeyError as exc:
        raise UsageError(str(exc).strip("'\"")) from None
    for key, value in ws.systems.items():
        if value is s:
            return key, s
    raise UsageError("no systems loaded")


def _merge_reports(name: str, statement: str, reports) -> CheckReport:
    """Fold per-instance reports into one order-canonical report."""
    out = CheckReport(name, statement)
    for rep in reports:
        out.attempted += rep.attempted
        out.passed += rep.passed
        out.failed += rep.failed
        out.skipped += rep.skipped
        if out.counterexample is None and rep.counterexample is not None:
            out.counterexample = f"{rep.name}: {rep.counterexample}"
        for reason in rep.skip_reasons:
            if reason not in out.skip_reasons:
                out.skip_reasons.append(reason)
        for note in rep.notes:
            out.note(f"{rep.name}: {note}")
    return out.done()


def _laws_report(s: RefinementSystem) -> CheckReport:
    rep = CheckReport(
        f"laws[{s.name}]",
        "identity, associativity, endpoint, and projection tables are lawful",
    )
    v = s.validate()
    if v.ok:
        rep.record_pass()
    else:
        rep.record_fail("\n".join(str(x) for x in v.violations))
    return rep.done()


def _skip_report(name: str, statement: str, reason: str) -> CheckReport:
    rep = CheckReport(name, statement)
    rep.record_skip(reason)
    return rep.done()


def _genday_suite(ws: Workspace, key: str, s: RefinementSystem, size_guard: int) -> list[CheckReport]:
    from .represent import genday_check

    if key not in ws.monoidal:
        return [
            _skip_report(
                f"genday[{s.name}]",
                "pushing paired representations forward preserves tensors, "
                "residuals, and their units",
                "no monoidal structure declared for this system",
            )
        ]
    mrs = ws.monoidal[key]
    n = s.D.n_objects
    reports = [
        genday_check(mrs, P, Q, R, size_guard=size_guard)
        for P in range(n)
        for Q in range(n)
        for R in range(n)
    ]
    return [
        _merge_reports(
            f"genday[{s.name}]",
            "pushing paired representations forward preserves tensors, "
            "residuals, and their units, over all object triples",
            reports,
        )
    ]


def _duality_suite(s: RefinementSystem, size_guard: int, cross_check: bool) -> list[CheckReport]:
    reports = [duality_check(s, Q, size_guard=size_guard) for Q in range(s.D.n_objects)]
    out = [
        _merge_reports(
            f"duality[{s.name}]",
            "the positive and negative representations of every refinement "
            "are each other's duals",
            reports,
        )
    ]
    if cross_check:
        cross = CheckReport(
            f"dual-cross[{s.name}]",
            "the pointwise dualizers agree with the residual-presheaf route",
        )
        for Q in range(s.D.n_objects):
            B = s.shape(Q)
            try:
                dual_left(s, B, pos_rep(s, Q), cross_check=True, size_guard=size_guard)
                dual_right(s, B, neg_rep(s, Q), cross_check=True, size_guard=size_guard)
            except SizeGuardExceeded as exc:
                cross.record_skip(str(exc))
            else:
                cross.record_pass()
        out.append(cross.done())
    return out


def _negenc_suite(s: RefinementSystem, size_guard: int) -> list[CheckReport]:
    if "linctx_data" in s.__dict__:
        mc = s.__dict__["linctx_data"][0]
        if not mc.tensors:
            return [
                _skip_report(
                    f"negative-encoding[{s.name}]",
                    "pushforwards are recovered from negative data",
                    "no tensor declarations in the multicategory",
                )
            ]
        return [fx.tensorL_check(s, d.left, d.right) for d in mc.tensors]
    reports = []
    for c in range(s.T.n_morphisms):
        for P in s.fiber(s.T.dom(c)):
            if find_pushforward(s, c, P) is None:
                continue
            reports.append(negative_encoding_check(s, c, P))
    if not reports:
        return [
            _skip_report(
                f"negative-encoding[{s.name}]",
                "pushforwards are recovered from negative data",
                "no pushforwards exist in this system",
            )
        ]
    return [
        _merge_reports(
            f"negative-encoding[{s.name}]",
            "every pushforward is recovered from negative data, both as a "
            "dual of a pulled negative representation and as a double dual "
            "of the pushed positive one",
            reports,
        )
    ]


def _notnot_suite(ws: Workspace, key: str, s: RefinementSystem) -> list[CheckReport]:
    if key not in ws.monoids:
        return [
            _skip_report(
                f"notnot-tensor[{s.name}]",
                "fiber tensors are recovered from Day tensors up to double "
                "dualization",
                "no monoid objects declared for this system",
            )
        ]
    reports = []
    for mo in ws.monoids[key]:
        for P in s.fiber(mo.W):
            for Q in s.fiber(mo.W):
                reports.append(notnottensor_check(ws.monoidal[key], mo, P, Q))
    return [
        _merge_reports(
            f"notnot-tensor[{s.name}]",
            "fiber tensors over every monoid are recovered from Day tensors "
            "up to double dualization",
            reports,
        )
    ]


def _rapp_suite(ws: Workspace, key: str, s: RefinementSystem) -> list[CheckReport]:
    adj = None
    for name, cand in ws.adjunctions.items():
        if cand.s is s or cand.e is s or name == key:
            adj = cand
            break
    if adj is None:
        return [
            _skip_report(
                f"rapp[{s.name}]",
                "right adjoints preserve certified pullbacks",
                "no adjunction declared for this system",
            )
        ]
    return [adjunction_check(adj), rapp_check(adj)]


def run_suite(
    ws: Workspace,
    system: str | None,
    suite: str,
    size_guard: int = 200000,
    cross_check: bool = False,
) -> list[CheckReport]:
    """All reports of one verification suite, in canonical order."""
    key, s = _system_entry(ws, system)
    if suite == "laws":
        return [_laws_report(s)]
    if suite == "ff":
        return [representation_ff_check(s)]
    if suite == "preservation":
        return [preservation_check(s)]
    if suite == "factorization":
        return [factorization_check(s)]
    if suite == "genday":
        return _genday_suite(ws, key, s, size_guard)
    if suite == "duality":
        return _duality_suite(s, size_guard, cross_check)
    if suite == "negative-encoding":
        return _negenc_suite(s, size_guard)
    if suite == "notnot-tensor":
        return _notnot_suite(ws, key, s)
    if suite == "rapp":
        return _rapp_suite(ws, key, s)
    if suite == "all":
        reports = []
        for sub in SUITES[:-1]:
            reports.extend(run_suite(ws, system, sub, size_guard, cross_check))
        return reports
    raise UsageError(f"unknown suite {suite!r}")


# ---------------------------------------------------------------------------
# Command implementations


def _emit(args, text: str) -> None:
    print(text)


def _cmd_validate(args) -> int:
    ws = textio.load(args.file)
    if args.json:
        summary = {
            "categories": {
                name: {"objects": cat.n_objects, "morphisms": cat.n_morphisms}
                for name, cat in ws.categories.items()
            },
            "functors": {
                name: {"source": F.source.name, "target": F.target.name}
                for name, F in ws.functors.items()
            },
            "systems": {
                name: {
                    "objects": s.D.n_objects,
                    "morphisms": s.D.n_morphisms,
                    "base_objects": s.T.n_objects,
                    "base_morphisms": s.T.n_morphisms,
                }
                for name, s in ws.systems.items()
            },
            "presheaves": {
                name: {"base": phi.base.name, "elements": sum(phi.size(a) for a in range(phi.base.n_objects))}
                for name, phi in ws.presheaves.items()
            },
            "adjunctions": sorted(ws.adjunctions),
        }
        _emit(args, textio.to_json(summary))
        return 0
    lines = []
    for name, cat in ws.categories.items():
        lines.append(f"category {name}: {cat.n_objects} objects, {cat.n_morphisms} morphisms")
    for name, F in ws.functors.items():
        lines.append(f"functor {name}: {F.source.name} -> {F.target.name}")
    for name, s in ws.systems.items():
        lines.append(
            f"refsys {name}: {s.D.n_objects}/{s.D.n_morphisms} over "
            f"{s.T.n_objects}/{s.T.n_morphisms} (objects/morphisms)"
        )
    for name, phi in ws.presheaves.items():
        total = sum(phi.size(a) for a in range(phi.base.n_objects))
        lines.append(f"presheaf {name}: {total} elements over {phi.base.name}")
    for name in ws.adjunctions:
        lines.append(f"adjunction {name}: {ws.adjunctions[name].s.name} <-> {ws.adjunctions[name].e.name}")
    lines.append("ok")
    _emit(args, "\n".join(lines))
    return 0


def _cmd_derive(args) -> int:
    ws = textio.load(args.file)
    _, s = _system_entry(ws, args.system)
    P = _resolve_obj(s.D, args.P, "refinement")
    Q = _resolve_obj(s.D, args.Q, "refinement")
    c = _resolve_mor(s.T, args.c, "base morphism")
    if s.T.dom(c) != s.shape(P) or s.T.cod(c) != s.shape(Q):
        raise UsageError(
            f"judgment ({args.P}, {args.c}, {args.Q}) is ill-formed: "
            f"{args.c} : {s.T.objects[s.T.dom(c)]} -> {s.T.objects[s.T.cod(c)]}"
        )
    ders = s.derivations(P, c, Q)
    if args.json:
        _emit(args, textio.to_json({"derivations": [s.D.mor_names[a] for a in ders]}))
        return 0
    if not ders:
        _emit(args, "no derivations")
    else:
        _emit(args, "\n".join(s.D.mor_names[a] for a in ders))
    return 0


def _cmd_slice(args, co: bool) -> int:
    ws = textio.load(args.file)
    _, s = _system_entry(ws, args.system)
    B = _resolve_obj(s.T, args.base, "base object")
    S = coslice_of(s, B) if co else slice_of(s, B)
    if args.json:
        _emit(args, textio.to_json(textio.category_to_dict(S.cat)))
        return 0
    lines = [f"{S.cat.name}: {S.cat.n_objects} objects, {S.cat.n_morphisms} morphisms"]
    for i in range(S.cat.n_objects):
        lines.append(f"  obj {S.obj_name(i)}")
    for i in range(S.cat.n_morphisms):
        lines.append(
            f"  mor {S.mor_name(i)} : {S.obj_name(S.cat.dom(i))} -> {S.obj_name(S.cat.cod(i))}"
        )
    _emit(args, "\n".join(lines))
    return 0


def _cmd_represent(args) -> int:
    ws = textio.load(args.file)
    _, s = _system_entry(ws, args.system)
    if args.pos is not None:
        phi = pos_rep(s, _resolve_obj(s.D, args.pos, "refinement"))
    else:
        phi = neg_rep(s, _resolve_obj(s.D, args.neg, "refinement"))
    if args.json:
        _emit(args, textio.to_json(textio.presheaf_to_dict(phi)))
    else:
        _emit(args, textio.render_presheaf(phi))
    return 0


def _cmd_lift(args, direction: str) -> int:
    ws = textio.load(args.file)
    _, s = _system_entry(ws, args.system)
    c = _resolve_mor(s.T, args.c, "base morphism")
    X = _resolve_obj(s.D, args.X, "refinement")
    want = s.T.dom(c) if direction == "pushforward" else s.T.cod(c)
    if s.shape(X) != want:
        raise UsageError(
            f"{args.X} refines {s.T.objects[s.shape(X)]}, "
            f"but {args.c} needs a refinement of {s.T.objects[want]}"
        )
    cert = (
        find_pushforward(s, c, X)
        if direction == "pushforward"
        else find_pullback(s, c, X)
    )
    if args.json:
        payload = None
        if cert is not None:
            payload = {
                "direction": cert.direction,
                "base": s.T.mor_names[cert.c],
                "subject": s.D.objects[cert.subject],
                "result": s.D.objects[cert.result],
                "structural": s.D.mor_names[cert.structural],
                "factoring_tests": cert.tests,
            }
        _emit(args, textio.to_json({direction: payload}))
        return 0
    if cert is None:
        _emit(args, f"no {direction}")
        return 0
    mark = "!" if direction == "pushforward" else "*"
    _emit(
        args,
        f"{direction} {args.c}{mark}{args.X} = {s.D.objects[cert.result]}\n"
        f"  structural {s.D.mor_names[cert.structural]}\n"
        f"  factoring problems solved: {cert.tests}",
    )
    return 0


def _cmd_dual(args) -> int:
    ws = textio.load(args.file)
    _, s = _system_entry(ws, args.system)
    if args.left is not None:
        X = _resolve_obj(s.D, args.left, "refinement")
        out = dual_left(
            s, s.shape(X), pos_rep(s, X), cross_check=args.cross_check, size_guard=args.size_guard
        )
    else:
        X = _resolve_obj(s.D, args.right, "refinement")
        out = dual_right(
            s, s.shape(X), neg_rep(s, X), cross_check=args.cross_check, size_guard=args.size_guard
        )
    if args.json:
        _emit(args, textio.to_json(textio.presheaf_to_dict(out)))
    else:
        _emit(args, textio.render_presheaf(out))
    return 0


def _cmd_verify(args) -> int:
    ws = textio.load(args.file)
    reports = run_suite(ws, args.system, args.suite, args.size_guard, args.cross_check)
    if args.json:
        _emit(args, textio.to_json([r.to_dict() for r in reports]))
    else:
        blocks = [r.render() for r in reports]
        ok = sum(1 for r in reports if r.failed == 0)
        blocks.append(f"suite {args.suite}: {ok}/{len(reports)} reports ok")
        _emit(args, "\n\n".join(blocks))
    return 0 if all(r.failed == 0 for r in reports) else 1


def _cmd_fixtures(args) -> int:
    if args.action != "gen":
        raise UsageError(f"unknown fixtures action {args.action!r}")
    kind = args.name
    if kind not in textio.FIXTURE_KINDS:
        raise UsageError(f"unknown fixture {kind!r} (one of {', '.join(textio.FIXTURE_KINDS)})")
    params = {"seed": args.seed} if kind == "random" else {}
    ws = Workspace()
    textio.build_fixture(ws, kind, kind, params, "generated")
    if args.json:
        payload = {
            "fixture": kind,
            "params": params,
            "systems": {name: textio.system_to_dict(s) for name, s in ws.systems.items()},
        }
        _emit(args, textio.to_json(payload))
        return 0
    lines = [f"# {kind} fixture"]
    param_text = "".join(f" {k}={v}" for k, v in sorted(params.items()))
    lines.append(f"fixture {kind} {kind}{param_text}")
    for name, s in ws.systems.items():
        lines.append("")
        lines.append(f"# expanded: refsys {name}")
        for chunk in textio.render_system(s).splitlines():
            lines.append(f"# {chunk}" if chunk else "#")
    _emit(args, "\n".join(lines))
    return 0


# ---------------------------------------------------------------------------
# Parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit machine-readable JSON")
    common.add_argument("--seed", type=int, default=0, help="seed for generated fixtures")
    common.add_argument(
        "--size-guard",
        dest="size_guard",
        type=int,
        default=200000,
        help="abort derived constructions past this size",
    )
    common.add_argument(
        "--cross-check",
        dest="cross_check",
        action="store_true",
        help="also compute duals through the residual-presheaf route",
    )
    p = argparse.ArgumentParser(
        prog="refcat",
        description="Queries and verification suites for finite refinement systems.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    def with_system(sp):
        sp.add_argument("--system", default=None, help="system name (default: the only one)")
        return sp

    sp = sub.add_parser("validate", parents=[common], help="load a file and report what it defines")
    sp.add_argument("file")

    sp = with_system(sub.add_parser("derive", parents=[common], help="list derivations of a judgment"))
    sp.add_argument("file")
    sp.add_argument("P")
    sp.add_argument("c")
    sp.add_argument("Q")

    sp = with_system(sub.add_parser("slice", parents=[common], help="print the slice over a base object"))
    sp.add_argument("file")
    sp.add_argument("base")

    sp = with_system(sub.add_parser("coslice", parents=[common], help="print the coslice under a base object"))
    sp.add_argument("file")
    sp.add_argument("base")

    sp = with_system(sub.add_parser("represent", parents=[common], help="print a representation presheaf"))
    sp.add_argument("file")
    group = sp.add_mutually_exclusive_group(required=True)
    group.add_argument("--pos", metavar="X", help="positive representation of X")
    group.add_argument("--neg", metavar="X", help="negative representation of X")

    sp = with_system(sub.add_parser("pushforward", parents=[common], help="certify an opcartesian lift"))
    sp.add_argument("file")
    sp.add_argument("c")
    sp.add_argument("X")

    sp = with_system(sub.add_parser("pullback", parents=[common], help="certify a cartesian lift"))
    sp.add_argument("file")
    sp.add_argument("c")
    sp.add_argument("X")

    sp = with_system(sub.add_parser("dual", parents=[common], help="dualize a representation"))
    sp.add_argument("file")
    group = sp.add_mutually_exclusive_group(required=True)
    group.add_argument("--left", metavar="X", help="left dual of the positive representation of X")
    group.add_argument("--right", metavar="X", help="right dual of the negative representation of X")

    sp = with_system(sub.add_parser("verify", parents=[common], help="run a verification suite"))
    sp.add_argument("file")
    sp.add_argument("suite", choices=SUITES)

    sp = sub.add_parser("fixtures", parents=[common], help="emit builder fixtures")
    sp.add_argument("action", choices=("gen",))
    sp.add_argument("name")

    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "validate":
            return _cmd_validate(args)
        if args.command == "derive":
            return _cmd_derive(args)
        if args.command == "slice":
            return _cmd_slice(args, co=False)
        if args.command == "coslice":
            return _cmd_slice(args, co=True)
        if args.command == "represent":
            return _cmd_represent(args)
        if args.command == "pushforward":
            return _cmd_lift(args, "pushforward")
        if args.command == "pullback":
            return _cmd_lift(args, "pullback")
        if args.command == "dual":
            return _cmd_dual(args)
        if args.command == "verify":
            return _cmd_verify(args)
        if args.command == "fixtures":
            return _cmd_fixtures(args)
        raise UsageError(f"unknown command {args.command!r}")
    except (UsageError, LoadError, StructuralError, SizeGuardExceeded, FileNotFoundError) as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return 2


if __name__ == "__main__":
    _sys.exit(main())
