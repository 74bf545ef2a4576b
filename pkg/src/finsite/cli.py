"""Command-line front end: individual checks on documents, derived-site
constructions written back as documents, and the theorem-audit harness.

Exit codes: 0 pass, 1 failed check (counterexample printed), 2 input
error (parse failure, unknown reference, bad arguments).
"""
from __future__ import annotations

import argparse
import json
import os
import sys

from . import audit, cofinal, fibration, locfib, presheaf, sites
from .dsl import Declaration, Document, SiteDecl, parse, serialize, validate
from .errors import FinSiteError
from .fincat import grothendieck_construction
from .instances import Bounds, category_document, enumerate_categories, site_document
from .report import CheckReport


class InputError(Exception):
    pass


def _load(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    result = parse(text)
    if result.diagnostics:
        msgs = "\n".join(str(d) for d in result.diagnostics)
        raise InputError(f"parse errors in {path}:\n{msgs}")
    return result.document


def _need(doc, kind, name, path):
    d = doc.find(kind, name)
    if d is None:
        raise InputError(f"{path} has no {kind} named {name!r}")
    return d.payload


def _emit(report, args, extra=None):
    if getattr(args, "format", "text") == "machine":
        payload = {"check": report.check, "passed": report.passed,
                   "witness": report.witness, "details": report.details}
        if extra:
            payload.update(extra)
        print(json.dumps(payload, sort_keys=True, default=str))
    else:
        status = "PASS" if report.passed else "FAIL"
        print(f"{report.check}: {status}")
        if report.details:
            print(f"  {report.details}")
        if report.witness and not report.passed:
            for k, v in sorted(report.witness.items(), key=lambda kv: kv[0]):
                print(f"  {k}: {v}")
    return 0 if report.passed else 1


def _site_from_args(doc, args, path):
    decl = doc.find("site", args.site)
    if decl is None:
        raise InputError(f"{path} has no site named {args.site!r}")
    return decl.payload.sited


# -- check subcommand ----------------------------------------------------


def cmd_check(args):
    doc = _load(args.document)
    kind = args.kind
    if kind == "topology":
        top = _need(doc, "topology", args.topology, args.document)
        return _emit(sites.is_topology(top), args)
    if kind == "comorphism":
        sited = _site_from_args(doc, args, args.document)
        return _emit(sites.is_comorphism(sited), args)
    if kind == "cover-preserving":
        sited = _site_from_args(doc, args, args.document)
        return _emit(sites.is_cover_preserving(sited), args)
    if kind == "morphism-sites":
        sited = _site_from_args(doc, args, args.document)
        return _emit(sites.is_morphism_of_sites(sited), args)
    if kind == "continuous":
        sited = _site_from_args(doc, args, args.document)
        return _emit(sites.is_continuous(sited), args)
    if kind == "sheaf":
        top = _need(doc, "topology", args.topology, args.document)
        if args.object is None:
            raise InputError("check sheaf needs --object")
        rep = presheaf.yoneda(top.base, args.object)
        return _emit(presheaf.is_sheaf(rep, top), args)
    if kind == "cartesian":
        fun = _need(doc, "functor", args.functor, args.document)
        if args.arrow is None:
            raise InputError("check cartesian needs --arrow")
        return _emit(fibration.is_cartesian(fun, args.arrow), args)
    if kind == "fibration":
        fun = _need(doc, "functor", args.functor, args.document)
        rep = fibration.is_fibration(fun)
        return _emit(rep.report, args)
    if kind == "loccart":
        sited = _site_from_args(doc, args, args.document)
        if args.arrow is None:
            raise InputError("check loccart needs --arrow")
        if args.arrow not in sited.functor.source.arrows:
            raise InputError(f"unknown arrow {args.arrow!r}")
        ls = locfib.LocalSite(sited)
        verdict = ls.loccart(args.arrow)
        ok = verdict.passed and verdict.agree
        report = CheckReport(
            "is_locally_cartesian", ok,
            {"combinatorial": verdict.combinatorial.passed,
             "oracle": verdict.oracle.passed,
             "agree": verdict.agree,
             **({} if ok else {"witness": (verdict.combinatorial.witness
                                           or verdict.oracle.witness)})})
        return _emit(report, args)
    if kind == "locfib":
        sited = _site_from_args(doc, args, args.document)
        return _emit(locfib.is_local_fibration(locfib.LocalSite(sited)), args)
    if kind == "morphism-locfib":
        sited = _site_from_args(doc, args, args.document)
        target_decl = doc.find("site", args.target_site or "")
        if target_decl is None:
            raise InputError("check morphism-locfib needs --target-site")
        fun = _need(doc, "functor", args.functor, args.document)
        tgt = target_decl.payload.sited
        src_ls = locfib.LocalSite(sited)
        tgt_ls = locfib.LocalSite(tgt)
        from .fincat import functor_compose, identity_nat

        if functor_compose(tgt_ls.functor, fun) != src_ls.functor:
            raise InputError(
                "functor does not commute strictly with the projections")
        witness = identity_nat(src_ls.functor)
        return _emit(locfib.is_morphism_of_local_fibrations(
            src_ls, tgt_ls, fun, witness), args)
    if kind == "cofinal":
        sited = _site_from_args(doc, args, args.document)
        if args.arrow is None:
            raise InputError("check cofinal needs --arrow")
        ls = locfib.LocalSite(sited)
        eq = cofinal.loccart_cofinality_equiv(ls, args.arrow)
        ok = eq.consistent and eq.cofinal.passed == eq.loccart.passed
        report = CheckReport(
            "cofinality", eq.cofinal.passed and eq.consistent,
            {"loccart": eq.loccart.passed, "cofinal": eq.cofinal.passed,
             "colimit": eq.colimit.passed, "consistent": eq.consistent})
        return _emit(report, args)
    raise InputError(f"unknown check kind {kind!r}")


# -- constructions --------------------------------------------------------


def cmd_giraud(args):
    doc = _load(args.document)
    fun = _need(doc, "functor", args.fibration, args.document)
    base_top = _need(doc, "topology", args.base, args.document)
    try:
        top = sites.giraud_topology(fun, base_top)
    except FinSiteError as exc:
        raise InputError(f"giraud: {exc}") from None
    name = args.name
    decls = list(doc.declarations)
    decls.append(Declaration("topology", name, top, (1, 1)))
    out = serialize(Document(decls))
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(out)
    else:
        print(out, end="")
    return 0


def cmd_comma_site(args):
    doc = _load(args.document)
    sited = _site_from_args(doc, args, args.document)
    try:
        cs = sites.comma_site(sited)
    except FinSiteError as exc:
        raise InputError(f"comma-site: {exc}") from None
    decls = [
        Declaration("category", "comma", cs.site, (1, 1)),
        Declaration("category", "D0", cs.d_aug.category, (1, 1)),
        Declaration("category", "C0", cs.c_aug.category, (1, 1)),
        Declaration("topology", "K0J0", cs.topology, (1, 1)),
        Declaration("topology", "K0", cs.k0, (1, 1)),
        Declaration("topology", "J0", cs.j0, (1, 1)),
        Declaration("functor", "proj_d", cs.proj_d, (1, 1)),
        Declaration("functor", "proj_c", cs.proj_c, (1, 1)),
        Declaration("functor", "p0", cs.p0, (1, 1)),
        Declaration("site", "comma_proj",
                    SiteDecl("proj_c", "K0J0", "J0", cs.sited_projection()),
                    (1, 1)),
    ]
    out = serialize(Document(decls))
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(out)
    else:
        print(out, end="")
    return 0


def cmd_sheafify(args):
    doc = _load(args.document)
    top = _need(doc, "topology", args.topology, args.document)
    if args.object not in top.base.objects:
        raise InputError(f"unknown object {args.object!r}")
    rep = presheaf.yoneda(top.base, args.object)
    res = presheaf.sheafify(rep, top)
    verdict = presheaf.is_sheaf(res.sheaf, top)
    unit = presheaf.locality_test(res.unit, top, "iso")
    sizes = {o: len(res.sheaf.values[o]) for o in top.base.objects}
    report = CheckReport("sheafify", verdict.passed and unit.passed,
                         {"sizes": sizes, "unit_locally_iso": unit.passed})
    return _emit(report, args)


def cmd_validate(args):
    try:
        with open(args.document, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {args.document}: {exc}") from None
    result = parse(text)
    reports = validate(text)
    bad = [r for r in reports if not r.passed]
    if getattr(args, "format", "text") == "machine":
        print(json.dumps([{
            "check": r.check, "passed": r.passed, "witness": r.witness,
            "details": r.details} for r in reports],
            sort_keys=True, default=str))
    else:
        for r in reports:
            status = "PASS" if r.passed else "FAIL"
            name = r.witness.get("name", "")
            print(f"{r.check} {name}: {status}")
            if not r.passed:
                print(f"  {r.details or r.witness}")
    if result.diagnostics:
        return 2
    return 1 if bad else 0


def cmd_audit(args):
    budget = float(os.environ.get("FINSITE_BUDGET_SECS", args.budget))
    config = audit.AuditConfig(
        suite=args.suite, max_objects=args.max_objects,
        max_arrows=args.max_arrows, max_fiber_objects=args.max_fiber_objects,
        max_topologies=args.max_topologies, seed=args.seed,
        budget_secs=budget, output=args.format, ceiling=args.ceiling)
    if config.suite not in ("all", *audit.SUITES):
        raise InputError(f"unknown suite {config.suite!r}; "
                         f"available: {', '.join(audit.SUITES)}")
    code, results = audit.theorem_audit(config)
    print(audit.render_report(results, args.format))
    return code


def cmd_enumerate(args):
    bounds = Bounds(args.max_objects, args.max_arrows,
                    args.max_fiber_objects, args.max_topologies)
    count = 0
    for ci, cat in enumerate(enumerate_categories(
            bounds.max_objects, bounds.max_arrows)):
        print(serialize(category_document(cat, f"C{ci}")), end="")
        count += 1
        if args.limit and count >= args.limit:
            return 0
    if args.categories_only:
        return 0
    from .instances import enumerate_relative_sites

    for inst in enumerate_relative_sites(bounds, args.seed):
        print(serialize(site_document(inst.rel.site.sited)), end="")
        count += 1
        if args.limit and count >= args.limit:
            return 0
    return 0


def build_parser():
    p = argparse.ArgumentParser(
        prog="finsite",
        description="Finite-site workbench: checks, constructions, audits")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="run a single decision procedure")
    c.add_argument("kind", help="topology | comorphism | cover-preserving | "
                                "morphism-sites | continuous | sheaf | "
                                "cartesian | fibration | loccart | locfib | "
                                "morphism-locfib | cofinal")
    c.add_argument("document")
    c.add_argument("--topology")
    c.add_argument("--site")
    c.add_argument("--functor")
    c.add_argument("--arrow")
    c.add_argument("--object")
    c.add_argument("--target-site")
    c.add_argument("--format", choices=("text", "machine"), default="text")
    c.set_defaults(func=cmd_check)

    g = sub.add_parser("giraud", help="compute a Giraud topology")
    g.add_argument("document")
    g.add_argument("--fibration", required=True)
    g.add_argument("--base", required=True)
    g.add_argument("--name", default="giraud")
    g.add_argument("-o", "--output")
    g.set_defaults(func=cmd_giraud)

    m = sub.add_parser("comma-site", help="build the comma site of a comorphism")
    m.add_argument("document")
    m.add_argument("--site", required=True)
    m.add_argument("-o", "--output")
    m.set_defaults(func=cmd_comma_site)

    s = sub.add_parser("sheafify", help="sheafify a representable presheaf")
    s.add_argument("document")
    s.add_argument("--topology", required=True)
    s.add_argument("--object", required=True)
    s.add_argument("--format", choices=("text", "machine"), default="text")
    s.set_defaults(func=cmd_sheafify)

    v = sub.add_parser("validate", help="validate every block of a document")
    v.add_argument("document")
    v.add_argument("--format", choices=("text", "machine"), default="text")
    v.set_defaults(func=cmd_validate)

    a = sub.add_parser("audit", help="run a theorem-audit suite")
    a.add_argument("--suite", default="all")
    a.add_argument("--max-objects", type=int, default=2)
    a.add_argument("--max-arrows", type=int, default=2)
    a.add_argument("--max-fiber-objects", type=int, default=2)
    a.add_argument("--max-topologies", type=int, default=0)
    a.add_argument("--seed", type=int, default=7)
    a.add_argument("--budget", type=float, default=300.0)
    a.add_argument("--ceiling", type=int, default=1200)
    a.add_argument("--format", choices=("text", "machine"), default="text")
    a.set_defaults(func=cmd_audit)

    e = sub.add_parser("enumerate", help="stream enumerated instance documents")
    e.add_argument("--max-objects", type=int, default=2)
    e.add_argument("--max-arrows", type=int, default=1)
    e.add_argument("--max-fiber-objects", type=int, default=2)
    e.add_argument("--max-topologies", type=int, default=0)
    e.add_argument("--seed", type=int, default=7)
    e.add_argument("--limit", type=int, default=0)
    e.add_argument("--categories-only", action="store_true")
    e.set_defaults(func=cmd_enumerate)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FinSiteError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entry():
    sys.exit(main())
