"""The theorem-audit harness: each acceptance criterion is a suite that
runs its property over enumerated/sampled small instances and reports
one record per (property, instance), with greedy counterexample
shrinking on failure.

Exhaustive mode is used whenever the instance count fits the configured
ceiling; otherwise deterministic seeded sampling is used and the report
says so.  Verdicts, instances and witnesses are deterministic for a
fixed (suite, bounds, seed); timings are informational only.
"""
from __future__ import annotations

import json
import random
import time
from dataclasses import dataclass, field

from . import cofinal, fibration, fixtures, locfib, presheaf, sites
from .dsl import parse, serialize
from .fincat import (
    FinFunctor,
    category_isomorphism,
    grothendieck_construction,
    identity_functor,
    identity_nat,
)
from .instances import (
    Bounds,
    enumerate_categories,
    enumerate_functors,
    enumerate_presheaves,
    enumerate_relative_sites,
    enumerate_topologies,
    shrink_document,
    site_document,
)
from .report import CheckReport


@dataclass
class AuditConfig:
    suite: str = "all"
    max_objects: int = 2
    max_arrows: int = 2
    max_fiber_objects: int = 2
    max_topologies: int = 0
    seed: int = 7
    budget_secs: float = 300.0
    output: str = "text"
    ceiling: int = 1200

    def bounds(self):
        return Bounds(self.max_objects, self.max_arrows,
                      self.max_fiber_objects, self.max_topologies)


@dataclass
class Record:
    prop: str
    instance: str
    verdict: bool
    witness: dict = field(default_factory=dict)
    ms: float = 0.0


@dataclass
class SuiteResult:
    suite: str
    mode: str
    records: list
    elapsed: float
    truncated: bool = False
    counterexamples: list = field(default_factory=list)

    @property
    def checks(self):
        return len(self.records)

    @property
    def failures(self):
        return [r for r in self.records if not r.verdict]

    @property
    def passed(self):
        return not self.failures and not self.truncated


class _Budget:
    def __init__(self, secs):
        self.start = time.monotonic()
        self.secs = secs

    def exceeded(self):
        return time.monotonic() - self.start > self.secs

    def elapsed(self):
        return time.monotonic() - self.start


def _sample(items, config, rng, ceiling=None):
    cap = ceiling if ceiling is not None else config.ceiling
    if len(items) <= cap:
        return list(items), "exhaustive"
    keep = sorted(rng.sample(range(len(items)), cap))
    return [items[i] for i in keep], "sampled"


_rel_cache = {}


def _relative_sites(config):
    key = (config.bounds(), config.seed)
    if key not in _rel_cache:
        _rel_cache[key] = enumerate_relative_sites(config.bounds(), config.seed)
    return _rel_cache[key]


def _rng(config, suite):
    return random.Random(f"{config.seed}:{suite}")


# -- suite implementations ------------------------------------------------


def suite_dual_route(config, budget):
    rng = _rng(config, "dual-route")
    instances, mode = _sample(_relative_sites(config), config, rng)
    records = []
    truncated = False
    for inst in instances:
        if budget.exceeded():
            truncated = True
            break
        for a in inst.rel.groth.total.arrows:
            t0 = time.monotonic()
            v = inst.rel.site.loccart(a)
            records.append(Record(
                "dual-route-agreement", f"{inst.label}:{a}", v.agree,
                {} if v.agree else {
                    "combinatorial": v.combinatorial.passed,
                    "oracle": v.oracle.passed,
                    "witness": v.combinatorial.witness or v.oracle.witness},
                1000 * (time.monotonic() - t0)))
    return SuiteResult("dual-route", mode, records, budget.elapsed(), truncated)


def suite_cartesian_loccart(config, budget):
    rng = _rng(config, "cartesian-loccart")
    instances, mode = _sample(_relative_sites(config), config, rng)
    records = []
    truncated = False
    for inst in instances:
        if budget.exceeded():
            truncated = True
            break
        p = inst.rel.groth.projection
        for a in inst.rel.groth.total.arrows:
            if not fibration.is_cartesian(p, a):
                continue
            t0 = time.monotonic()
            v = inst.rel.site.loccart(a)
            ok = v.combinatorial.passed and v.oracle.passed
            records.append(Record(
                "cartesian-implies-loccart", f"{inst.label}:{a}", ok,
                {} if ok else {"combinatorial": v.combinatorial.witness,
                               "oracle": v.oracle.witness},
                1000 * (time.monotonic() - t0)))
    return SuiteResult("cartesian-loccart", mode, records,
                       budget.elapsed(), truncated)


def _collapse_sites(cat, one):
    to_one = FinFunctor(
        cat, one, {o: one.objects[0] for o in cat.objects},
        {a: one.identity[one.objects[0]] for a in cat.arrows})
    k = sites.canonical_topology(cat)
    yield "id", locfib.local_site(identity_functor(cat), k, k)
    yield "toONE", locfib.local_site(to_one, k, sites.trivial_topology(one))


def suite_canonical_collapse(config, budget):
    rng = _rng(config, "canonical-collapse")
    cats = enumerate_categories(min(config.max_objects, 3), config.max_arrows)
    one = enumerate_categories(1, 0)[0]
    instances, mode = _sample(cats, config, rng)
    records = []
    truncated = False
    for ci, cat in enumerate(instances):
        if budget.exceeded():
            truncated = True
            break
        for tag, ls in _collapse_sites(cat, one):
            for a in cat.arrows:
                t0 = time.monotonic()
                v = ls.loccart(a)
                cart = bool(fibration.is_cartesian(ls.functor, a))
                ok = v.agree and (v.passed == cart)
                records.append(Record(
                    "canonical-collapse", f"c{ci}:{tag}:{a}", ok,
                    {} if ok else {"loccart": v.passed, "cartesian": cart,
                                   "agree": v.agree},
                    1000 * (time.monotonic() - t0)))
    return SuiteResult("canonical-collapse", mode, records,
                       budget.elapsed(), truncated)


def suite_giraud_minimality(config, budget):
    rng = _rng(config, "giraud-minimality")
    seen = set()
    fibs = []
    for inst in _relative_sites(config):
        key = (inst.rel.groth.total, inst.j)
        if key in seen:
            continue
        seen.add(key)
        fibs.append(inst)
    instances, mode = _sample(fibs, config, rng)
    records = []
    truncated = False
    for inst in instances:
        if budget.exceeded():
            truncated = True
            break
        t0 = time.monotonic()
        total = inst.rel.groth.total
        proj = inst.rel.groth.projection
        g = inst.rel.giraud
        sound = sites.is_topology(g)
        com = sites.is_comorphism(sites.SitedFunctor(proj, g, inst.j))
        ok = sound.passed and com.passed
        witness = {}
        sieve_count = sum(len(sites.all_sieves(total, o)) for o in total.objects)
        minimal = True
        if ok and sieve_count <= 8:
            for t in sites.all_topologies(total):
                if t == g or not t <= g:
                    continue
                if sites.is_comorphism(sites.SitedFunctor(proj, t, inst.j)):
                    minimal = False
                    witness = {"smaller_topology": t.encode()}
                    break
        ok = ok and minimal
        if not sound.passed:
            witness = {"topology": sound.witness}
        elif not com.passed:
            witness = {"comorphism": com.witness}
        records.append(Record(
            "giraud-soundness-minimality", inst.label, ok, witness,
            1000 * (time.monotonic() - t0)))
    return SuiteResult("giraud-minimality", mode, records,
                       budget.elapsed(), truncated)


def suite_local_factorization(config, budget):
    rng = _rng(config, "local-factorization")
    instances, mode = _sample(_relative_sites(config), config, rng)
    records = []
    truncated = False
    for inst in instances:
        if budget.exceeded():
            truncated = True
            break
        ls = inst.rel.site
        if not locfib.is_local_fibration(ls):
            continue
        for a in inst.rel.groth.total.arrows:
            t0 = time.monotonic()
            try:
                lf = locfib.local_factorization(ls, a)
                verdict = lf.verify(ls)
                ok = verdict.passed
                witness = {} if ok else verdict.witness
            except Exception as exc:      # SearchExhausted is a failure here
                ok = False
                witness = {"error": str(exc)}
            records.append(Record(
                "local-factorization", f"{inst.label}:{a}", ok, witness,
                1000 * (time.monotonic() - t0)))
    return SuiteResult("local-factorization", mode, records,
                       budget.elapsed(), truncated)


def suite_k_cartesian(config, budget):
    rng = _rng(config, "k-cartesian")
    eligible = []
    for inst in _relative_sites(config):
        if fibration.is_cartesian_fibration(inst.rel.groth.projection):
            eligible.append(inst)
    instances, mode = _sample(eligible, config, rng)
    records = []
    truncated = False
    for inst in instances:
        if budget.exceeded():
            truncated = True
            break
        ls = inst.rel.site
        for a in inst.rel.groth.total.arrows:
            t0 = time.monotonic()
            k_cart = locfib.is_K_cartesian(ls, a)
            loc = ls.loccart(a)
            ok = loc.agree and (k_cart.passed == loc.passed)
            records.append(Record(
                "k-cartesian-equivalence", f"{inst.label}:{a}", ok,
                {} if ok else {"k_cartesian": k_cart.passed,
                               "loccart": loc.passed},
                1000 * (time.monotonic() - t0)))
    return SuiteResult("k-cartesian", mode, records, budget.elapsed(), truncated)


def suite_cofinality(config, budget):
    rng = _rng(config, "cofinality")
    instances, mode = _sample(_relative_sites(config), config, rng,
                              ceiling=max(1, config.ceiling // 4))
    records = []
    truncated = False
    for inst in instances:
        if budget.exceeded():
            truncated = True
            break
        ls = inst.rel.site
        if not locfib.is_local_fibration(ls):
            continue
        for a in inst.rel.groth.total.arrows:
            t0 = time.monotonic()
            eq = cofinal.loccart_cofinality_equiv(ls, a)
            records.append(Record(
                "cofinality-equivalence", f"{inst.label}:{a}", eq.consistent,
                {} if eq.consistent else {
                    "loccart": eq.loccart.passed,
                    "cofinal": eq.cofinal.passed,
                    "colimit": eq.colimit.passed},
                1000 * (time.monotonic() - t0)))
        # fact-category cofinality against the colimit oracle, and the
        # continuous-local-fibration fibration-at-topos-level property
        p = ls.functor
        for d in list(ls.d_cat.objects):
            for f in ls.c_cat.arrows_into(p.obj_map[d]):
                t0 = time.monotonic()
                fact = cofinal.build_fact_category(ls, f, d)
                two = cofinal.is_J_cofinal(fact.projection_to_slice,
                                           fact.slice, ls.j)
                oracle = cofinal.cofinality_colimit_oracle(
                    fact.projection_to_slice, fact.slice, ls.j)
                ok = two.passed == oracle.passed
                records.append(Record(
                    "cofinality-oracle-agreement",
                    f"{inst.label}:{f}@{d}", ok,
                    {} if ok else {"conditions": two.passed,
                                   "oracle": oracle.passed},
                    1000 * (time.monotonic() - t0)))
        if ls.sited.report("continuous"):
            t0 = time.monotonic()
            check = cofinal.topos_level_fibration_check(ls)
            records.append(Record(
                "continuous-locfib-topos-fibration", inst.label, check.passed,
                {} if check else check.witness,
                1000 * (time.monotonic() - t0)))
    return SuiteResult("cofinality", mode, records, budget.elapsed(), truncated)


def _fiber_vertical_arrows(groth, c):
    base = groth.indexed.base
    fib = groth.indexed.fibers[c]
    return [(u, groth.arr_of[(base.identity[c], u, fib.tgt[u])])
            for u in fib.arrows]


def _comparison_pairs(config, rng, cap):
    """Functor instances between relative sites over a common base with
    strictly commuting projections."""
    groups = {}
    for inst in _relative_sites(config):
        groups.setdefault((inst.base, inst.j), []).append(inst)
    pairs = []
    for (base, j), insts in sorted(groups.items(),
                                   key=lambda kv: repr(kv[0][1].encode())):
        for s in insts:
            for t in insts:
                total_s = s.rel.groth.total
                total_t = t.rel.groth.total
                if len(total_s.arrows) * len(total_t.arrows) > 200:
                    continue
                for a in enumerate_functors(total_s, total_t):
                    composed = {o: t.rel.groth.projection.obj_map[a.obj_map[o]]
                                for o in total_s.objects}
                    if composed != s.rel.groth.projection.obj_map:
                        continue
                    composed_a = {
                        m: t.rel.groth.projection.arr_map[a.arr_map[m]]
                        for m in total_s.arrows}
                    if composed_a != s.rel.groth.projection.arr_map:
                        continue
                    pairs.append((s, t, a))
    if len(pairs) > cap:
        keep = sorted(rng.sample(range(len(pairs)), cap))
        pairs = [pairs[i] for i in keep]
        return pairs, "sampled"
    return pairs, "exhaustive"


def suite_comparison_cells(config, budget):
    rng = _rng(config, "comparison-cells")
    pairs, mode = _comparison_pairs(config, rng, config.ceiling // 2)
    records = []
    truncated = False
    for pi, (s, t, a) in enumerate(pairs):
        if budget.exceeded():
            truncated = True
            break
        gs, gt = s.rel.groth, t.rel.groth
        base = gs.indexed.base
        p, p2 = gs.projection, gt.projection
        witness = identity_nat(p)
        cells = {}
        t0 = time.monotonic()
        ok = True
        info = {}
        try:
            for f in base.arrows:
                c_tgt = base.tgt[f]
                for x in gs.indexed.fibers[c_tgt].objects:
                    cell = fibration.comparison_cell(
                        p, p2, a, witness, f, gs.obj_of[(x, c_tgt)],
                        s.rel.cleavage, t.rel.cleavage)
                    cells[(f, x)] = gt.vertical_part(cell.cell)
            # naturality in the fiber variable
            for f in base.arrows:
                c_tgt, c_src = base.tgt[f], base.src[f]
                fib = gs.indexed.fibers[c_tgt]
                fib2_src = gt.indexed.fibers[c_src]
                tr = gs.indexed.transport[f]
                tr2 = gt.indexed.transport[f]
                for u in fib.arrows:
                    x, x2 = fib.src[u], fib.tgt[u]
                    au = gt.vertical_part(a.arr_map[
                        gs.arr_of[(base.identity[c_tgt], u, x2)]])
                    adfu = gt.vertical_part(a.arr_map[
                        gs.arr_of[(base.identity[c_src], tr.arr_map[u],
                                   tr.obj_map[x2])]])
                    lhs = fib2_src.compose(cells[(f, x2)], adfu)
                    rhs = fib2_src.compose(tr2.arr_map[au], cells[(f, x)])
                    if lhs != rhs:
                        ok = False
                        info = {"law": "naturality", "f": f, "u": u}
                        break
                if not ok:
                    break
            # cocycle law over composable base pairs
            if ok:
                for (g, f), gf in base.compose_table.items():
                    for x in gs.indexed.fibers[base.tgt[g]].objects:
                        dgx = gs.indexed.transport[g].obj_map[x]
                        tr2f = gt.indexed.transport[f]
                        lhs = cells[(gf, x)]
                        rhs = gt.indexed.fibers[base.src[f]].compose(
                            tr2f.arr_map[cells[(g, x)]], cells[(f, dgx)])
                        if lhs != rhs:
                            ok = False
                            info = {"law": "cocycle", "g": g, "f": f, "x": x}
                            break
                    if not ok:
                        break
        except Exception as exc:
            ok = False
            info = {"error": str(exc)}
        records.append(Record(
            "comparison-cell-laws", f"{s.label}->{t.label}#{pi}", ok, info,
            1000 * (time.monotonic() - t0)))
    return SuiteResult("comparison-cells", mode, records,
                       budget.elapsed(), truncated)


def suite_criterion_equiv(config, budget):
    rng = _rng(config, "criterion-equiv")
    pairs, mode = _comparison_pairs(config, rng, config.ceiling)
    records = []
    truncated = False
    count = 0
    cap = max(1, config.ceiling // 6)
    for pi, (s, t, a) in enumerate(pairs):
        if budget.exceeded():
            truncated = True
            break
        if count >= cap:
            mode = "sampled"
            break
        sited_a = sites.SitedFunctor(a, s.k, t.k)
        if not sited_a.report("continuous"):
            continue
        ls_s, ls_t = s.rel.site, t.rel.site
        if not (locfib.is_local_fibration(ls_s)
                and locfib.is_local_fibration(ls_t)):
            continue
        count += 1
        witness = identity_nat(s.rel.groth.projection)
        t0 = time.monotonic()
        morph = locfib.is_morphism_of_local_fibrations(ls_s, ls_t, a, witness)
        crit = locfib.comparison_criterion(s.rel, t.rel, sited_a, witness)
        weak = locfib.weak_indexed_conditions(ls_s, ls_t, sited_a, witness)
        ok = morph.passed == crit.passed == weak.passed
        info = {} if ok else {"morphism": morph.passed,
                              "criterion": crit.passed,
                              "weak": weak.passed}
        records.append(Record(
            "criterion-equivalence", f"{s.label}->{t.label}#{pi}", ok, info,
            1000 * (time.monotonic() - t0)))
        mof = fibration.is_morphism_of_fibrations(
            s.rel.groth.projection, t.rel.groth.projection, a, witness)
        if mof.passed:
            ok2 = morph.passed and crit.passed and weak.passed
            records.append(Record(
                "continuous-fibration-morphism-passes",
                f"{s.label}->{t.label}#{pi}", ok2,
                {} if ok2 else {"morphism": morph.passed,
                                "criterion": crit.passed,
                                "weak": weak.passed}, 0.0))
    return SuiteResult("criterion-equiv", mode, records,
                       budget.elapsed(), truncated)


def suite_comma_site(config, budget):
    rng = _rng(config, "comma-site")
    seen = set()
    insts = []
    for inst in _relative_sites(config):
        key = (inst.rel.groth.total, inst.k, inst.j)
        if key not in seen:
            seen.add(key)
            insts.append(("rel", inst.rel.site.sited, inst.label))
    for ci, cat in enumerate(enumerate_categories(
            config.max_objects, config.max_arrows)):
        for ti, top in enumerate(enumerate_topologies(cat)):
            insts.append(("id", sites.SitedFunctor(
                identity_functor(cat), top, top), f"id-c{ci}t{ti}"))
    instances, mode = _sample(insts, config, rng,
                              ceiling=max(1, config.ceiling // 8))
    records = []
    truncated = False
    for kind, sited, label in instances:
        if budget.exceeded():
            truncated = True
            break
        t0 = time.monotonic()
        try:
            cs = sites.comma_site(sited)
            top_ok = sites.is_topology(cs.topology)
            proj_ok = sites.is_comorphism(cs.sited_projection())
            ok = top_ok.passed and proj_ok.passed
            info = {} if ok else {"topology": top_ok.witness,
                                  "projection": proj_ok.witness}
        except Exception as exc:
            ok = False
            info = {"error": str(exc)}
        records.append(Record(
            "comma-site-soundness", f"{kind}:{label}", ok, info,
            1000 * (time.monotonic() - t0)))
    return SuiteResult("comma-site", mode, records, budget.elapsed(), truncated)


def _triplets_for(p, max_size):
    """Small triplets (F, E, alpha) over the functor p."""
    from .presheaf import presheaf_morphisms, restrict_along
    from .sites import Triplet

    d_cat, c_cat = p.source, p.target
    out = []
    for e in enumerate_presheaves(c_cat, max_size):
        restricted = restrict_along(p, e)
        for f in enumerate_presheaves(d_cat, max_size):
            for alpha in presheaf_morphisms(f, restricted):
                out.append(Triplet(f, e, alpha))
    return out


def _triplets_isomorphic(p, t1, t2):
    from .presheaf import presheaf_isos, restrict_along, compose_morphisms, PresheafMorphism

    for i in presheaf_isos(t1.f, t2.f):
        for j in presheaf_isos(t1.e, t2.e):
            jp = PresheafMorphism(
                restrict_along(p, t1.e), restrict_along(p, t2.e),
                {o: dict(j.components[p.obj_map[o]]) for o in p.source.objects})
            lhs = compose_morphisms(jp, t1.alpha)
            rhs = compose_morphisms(t2.alpha, i)
            if lhs == rhs:
                return True
    return False


def suite_correspondence(config, budget):
    one = fixtures.one()
    arr = fixtures.arr()
    gd1 = fixtures.gd1()
    functors = [
        ("ONE", identity_functor(one)),
        ("ARR", identity_functor(arr)),
        ("GD1", gd1.projection),
    ]
    records = []
    truncated = False
    for name, p in functors:
        if budget.exceeded():
            truncated = True
            break
        sited = sites.SitedFunctor(p, sites.trivial_topology(p.source),
                                   sites.trivial_topology(p.target))
        cs = sites.comma_site(sited)
        max_size = 1 if name == "GD1" else 2
        triplets = _triplets_for(p, max_size)
        if name == "GD1":
            triplets = triplets[:24]
        for ti, trip in enumerate(triplets):
            if budget.exceeded():
                truncated = True
                break
            t0 = time.monotonic()
            try:
                sheaf = sites.comma_correspondence(cs, "forward", trip)
                sheaf_ok = presheaf.is_sheaf(sheaf, cs.topology)
                back = sites.comma_correspondence(cs, "backward", sheaf)
                ok = sheaf_ok.passed and _triplets_isomorphic(p, trip, back)
            except Exception as exc:
                ok = False
            records.append(Record(
                "correspondence-roundtrip", f"{name}:t{ti}", ok, {},
                1000 * (time.monotonic() - t0)))
        # sheaf-side round trips: forward(backward(Q)) vs Q on sheaves
        sheaf_pool = []
        if name != "GD1":
            for q in enumerate_presheaves(cs.site, 1):
                if presheaf.is_sheaf(q, cs.topology):
                    sheaf_pool.append(q)
            sheaf_pool = sheaf_pool[:16]
        for qi, q in enumerate(sheaf_pool):
            if budget.exceeded():
                truncated = True
                break
            t0 = time.monotonic()
            try:
                trip = sites.comma_correspondence(cs, "backward", q)
                q2 = sites.comma_correspondence(cs, "forward", trip)
                ok = presheaf.presheaves_isomorphic(q, q2)
            except Exception:
                ok = False
            records.append(Record(
                "correspondence-sheaf-roundtrip", f"{name}:q{qi}", ok, {},
                1000 * (time.monotonic() - t0)))
    return SuiteResult("correspondence", "exhaustive", records,
                       budget.elapsed(), truncated)


def suite_sheafification(config, budget):
    rng = _rng(config, "sheafification")
    cats = enumerate_categories(config.max_objects,
                                min(config.max_arrows, 1))
    work = []
    for ci, cat in enumerate(cats):
        sheaves = enumerate_presheaves(cat, 2)
        for ti, top in enumerate(enumerate_topologies(cat)):
            for pi, p in enumerate(sheaves):
                work.append((f"c{ci}t{ti}p{pi}", cat, top, p))
    instances, mode = _sample(work, config, rng,
                              ceiling=max(1, config.ceiling // 4))
    records = []
    truncated = False
    for label, cat, top, p in instances:
        if budget.exceeded():
            truncated = True
            break
        t0 = time.monotonic()
        try:
            res = presheaf.sheafify(p, top)
            out_sheaf = presheaf.is_sheaf(res.sheaf, top)
            unit_iso = presheaf.locality_test(res.unit, top, "iso")
            ok = out_sheaf.passed and unit_iso.passed
            if ok and presheaf.is_sheaf(p, top):
                ok = res.unit.is_pointwise_iso()
            info = {} if ok else {"sheaf": out_sheaf.passed,
                                  "unit_iso": unit_iso.passed}
        except Exception as exc:
            ok = False
            info = {"error": str(exc)}
        records.append(Record(
            "sheafification", label, ok, info,
            1000 * (time.monotonic() - t0)))
    # locality(iso) against the sheafified-bijection route on morphisms
    cat = cats[min(len(cats) - 1, 3)]
    from .presheaf import presheaf_morphisms

    sheaves = enumerate_presheaves(cat, 1)
    pairs = [(p, q) for p in sheaves for q in sheaves]
    morphs = []
    for p, q in pairs:
        morphs.extend(presheaf_morphisms(p, q))
    tops = enumerate_topologies(cat)
    work2 = [(m, t) for m in morphs for t in tops]
    sampled2, _ = _sample(work2, config, rng, ceiling=max(1, config.ceiling // 4))
    for mi, (m, top) in enumerate(sampled2):
        if budget.exceeded():
            truncated = True
            break
        t0 = time.monotonic()
        loc = presheaf.locality_test(m, top, "iso")
        induced = presheaf.sheafify_map(m, top)
        ok = loc.passed == induced.is_pointwise_iso()
        records.append(Record(
            "locality-vs-sheafified-bijection", f"m{mi}", ok,
            {} if ok else {"locality": loc.passed,
                           "bijection": induced.is_pointwise_iso()},
            1000 * (time.monotonic() - t0)))
    return SuiteResult("sheafification", mode, records,
                       budget.elapsed(), truncated)


def suite_dsl_roundtrip(config, budget):
    rng = _rng(config, "dsl-roundtrip")
    docs = []
    for ci, cat in enumerate(enumerate_categories(
            config.max_objects, config.max_arrows)):
        from .instances import category_document

        docs.append((f"cat{ci}", category_document(cat, "C")))
    for inst in _relative_sites(config)[:40]:
        docs.append((inst.label, site_document(inst.rel.site.sited)))
    instances, mode = _sample(docs, config, rng)
    records = []
    truncated = False
    for label, doc in instances:
        if budget.exceeded():
            truncated = True
            break
        t0 = time.monotonic()
        try:
            text = serialize(doc)
            first = parse(text)
            ok = not first.diagnostics and serialize(first.document) == text
            ok = ok and first.document == doc
        except Exception as exc:
            ok = False
        records.append(Record(
            "dsl-roundtrip", label, ok, {},
            1000 * (time.monotonic() - t0)))
    return SuiteResult("dsl-roundtrip", mode, records,
                       budget.elapsed(), truncated)


SUITES = {
    "dual-route": suite_dual_route,
    "cartesian-loccart": suite_cartesian_loccart,
    "canonical-collapse": suite_canonical_collapse,
    "giraud-minimality": suite_giraud_minimality,
    "local-factorization": suite_local_factorization,
    "k-cartesian": suite_k_cartesian,
    "cofinality": suite_cofinality,
    "comparison-cells": suite_comparison_cells,
    "criterion-equiv": suite_criterion_equiv,
    "comma-site": suite_comma_site,
    "correspondence": suite_correspondence,
    "sheafification": suite_sheafification,
    "dsl-roundtrip": suite_dsl_roundtrip,
}


def _sited_from_document(doc):
    for d in doc.declarations:
        if d.kind == "site":
            return d.payload.sited
    return None


def _doc_property_dual_route(doc):
    sited = _sited_from_document(doc)
    if sited is None:
        return True
    try:
        ls = locfib.LocalSite(sited)
    except Exception:
        return True
    return all(ls.loccart(a).agree for a in ls.d_cat.arrows)


def _doc_property_cartesian_loccart(doc):
    sited = _sited_from_document(doc)
    if sited is None:
        return True
    try:
        ls = locfib.LocalSite(sited)
    except Exception:
        return True
    for a in ls.d_cat.arrows:
        if fibration.is_cartesian(ls.functor, a):
            v = ls.loccart(a)
            if not (v.combinatorial.passed and v.oracle.passed):
                return False
    return True


def _doc_property_local_factorization(doc):
    sited = _sited_from_document(doc)
    if sited is None:
        return True
    try:
        ls = locfib.LocalSite(sited)
    except Exception:
        return True
    if not locfib.is_local_fibration(ls):
        return True
    for a in ls.d_cat.arrows:
        try:
            if not locfib.local_factorization(ls, a).verify(ls):
                return False
        except Exception:
            return False
    return True


def _doc_property_comma_site(doc):
    sited = _sited_from_document(doc)
    if sited is None:
        return True
    try:
        cs = sites.comma_site(sited)
    except Exception:
        return False
    return (sites.is_topology(cs.topology).passed
            and sites.is_comorphism(cs.sited_projection()).passed)


DOC_PROPERTIES = {
    "dual-route": _doc_property_dual_route,
    "cartesian-loccart": _doc_property_cartesian_loccart,
    "local-factorization": _doc_property_local_factorization,
    "comma-site": _doc_property_comma_site,
}


def run_suite(name, config):
    budget = _Budget(config.budget_secs)
    result = SUITES[name](config, budget)
    # minimize counterexamples where the failing instance is a site doc
    prop = DOC_PROPERTIES.get(name)
    for rec in result.failures[:3]:
        label = rec.instance.split(":")[0]
        inst = next((i for i in _relative_sites(config) if i.label == label),
                    None)
        if inst is None:
            continue
        doc = site_document(inst.rel.site.sited)
        if prop is not None:
            doc = shrink_document(doc, lambda d: not prop(d))
        result.counterexamples.append(serialize(doc))
    return result


def theorem_audit(config):
    names = list(SUITES) if config.suite in ("all", "") else [config.suite]
    results = [run_suite(n, config) for n in names]
    ok = all(r.passed for r in results)
    return (0 if ok else 1), results


def render_report(results, fmt="text"):
    if fmt == "machine":
        payload = []
        for r in results:
            for rec in sorted(r.records, key=lambda x: (x.prop, x.instance)):
                payload.append({
                    "suite": r.suite, "mode": r.mode, "property": rec.prop,
                    "instance": rec.instance, "verdict": rec.verdict,
                    "witness": rec.witness, "ms": round(rec.ms, 3)})
        return json.dumps({"records": payload,
                           "counterexamples": sum(
                               (r.counterexamples for r in results), [])},
                          indent=None, sort_keys=True, default=str)
    lines = []
    for r in results:
        props = {}
        for rec in r.records:
            props.setdefault(rec.prop, [0, 0])
            props[rec.prop][0] += 1
            if not rec.verdict:
                props[rec.prop][1] += 1
        status = "PASS" if r.passed else ("TRUNCATED" if r.truncated else "FAIL")
        lines.append(f"[{r.suite}] mode={r.mode} checks={r.checks} "
                     f"elapsed={r.elapsed:.1f}s {status}")
        for prop, (n, bad) in sorted(props.items()):
            lines.append(f"  {prop}: {n - bad}/{n} pass")
        for rec in r.failures[:5]:
            lines.append(f"  FAIL {rec.prop} at {rec.instance}: {rec.witness}")
        for ce in r.counterexamples:
            lines.append("  minimized counterexample:")
            lines.extend("    " + ln for ln in ce.splitlines())
    return "\n".join(lines)
