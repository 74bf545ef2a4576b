"""Deterministic enumeration of small instances (categories up to iso,
topologies, presheaves, functors, indexed categories, relative sites)
with document rendering and greedy shrinking, feeding the audit harness.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

from .dsl import CheckDecl, Declaration, Document, SiteDecl
from .errors import FinSiteError, LawViolation, MalformedTable
from .fincat import (
    FinCategory,
    FinFunctor,
    IndexedCategory,
    grothendieck_construction,
    identity_functor,
)
from .locfib import RelativeSite, relative_site
from .presheaf import FinPresheaf, PresheafMorphism
from .sites import (
    GrothendieckTopology,
    SitedFunctor,
    all_topologies,
    giraud_topology,
    is_topology,
)


@dataclass(frozen=True)
class Bounds:
    max_objects: int = 2
    max_arrows: int = 2
    max_fiber_objects: int = 2
    max_topologies: int = 0      # 0 = all


# -- categories up to isomorphism ---------------------------------------


def _complete_tables(objects, arrows, src, tgt, identity):
    """All composition tables extending the identity laws, by
    backtracking with incremental associativity checks."""
    all_arrows = list(identity.values()) + list(arrows)
    a_src = dict(src)
    a_tgt = dict(tgt)
    for o, i in identity.items():
        a_src[i] = o
        a_tgt[i] = o
    table = {}
    for f in all_arrows:
        table[(f, identity[a_src[f]])] = f
        table[(identity[a_tgt[f]], f)] = f
    free = [
        (f, g) for f in arrows for g in arrows
        if a_tgt[g] == a_src[f]
    ]
    free = [pair for pair in free if pair not in table]

    def candidates(f, g):
        return [h for h in all_arrows
                if a_src[h] == a_src[g] and a_tgt[h] == a_tgt[f]]

    def assoc_ok(t):
        for f in all_arrows:
            for g in all_arrows:
                if a_tgt[g] != a_src[f] or (f, g) not in t:
                    continue
                fg = t[(f, g)]
                for h in all_arrows:
                    if a_tgt[h] != a_src[g] or (g, h) not in t:
                        continue
                    gh = t[(g, h)]
                    left = t.get((fg, h))
                    right = t.get((f, gh))
                    if left is not None and right is not None and left != right:
                        return False
        return True

    def rec(i):
        if i == len(free):
            yield dict(table)
            return
        f, g = free[i]
        for h in candidates(f, g):
            table[(f, g)] = h
            if assoc_ok(table):
                yield from rec(i + 1)
            del table[(f, g)]

    yield from rec(0)


def _canonical_signature(cat):
    objs = list(cat.objects)
    non_id = [a for a in cat.arrows if not cat.is_identity(a)]
    best = None
    for operm in itertools.permutations(range(len(objs))):
        omap = {objs[i]: operm[i] for i in range(len(objs))}
        for aperm in itertools.permutations(range(len(non_id))):
            amap = {non_id[i]: aperm[i] for i in range(len(non_id))}

            def arr_index(a):
                if cat.is_identity(a):
                    return ("i", omap[cat.src[a]])
                return ("a", amap[a])

            sig_arrows = tuple(sorted(
                (amap[a], omap[cat.src[a]], omap[cat.tgt[a]]) for a in non_id))
            sig_comp = tuple(sorted(
                (arr_index(f), arr_index(g), arr_index(h))
                for (f, g), h in cat.compose_table.items()))
            sig = (len(objs), sig_arrows, sig_comp)
            if best is None or sig < best:
                best = sig
    return best


def enumerate_categories(max_objects, max_arrows):
    """All categories with the given bounds, up to isomorphism, in a
    deterministic order."""
    found = []
    seen = set()
    for n in range(1, max_objects + 1):
        objects = [f"o{i}" for i in range(1, n + 1)]
        identity = {o: f"id_{o}" for o in objects}
        for m in range(0, max_arrows + 1):
            arrows = [f"a{i}" for i in range(1, m + 1)]
            for endpoints in itertools.product(
                    itertools.product(objects, repeat=2), repeat=m):
                src = {arrows[i]: endpoints[i][0] for i in range(m)}
                tgt = {arrows[i]: endpoints[i][1] for i in range(m)}
                for table in _complete_tables(objects, arrows, src, tgt, identity):
                    full_src = dict(src)
                    full_tgt = dict(tgt)
                    for o, i in identity.items():
                        full_src[i] = o
                        full_tgt[i] = o
                    try:
                        cat = FinCategory(objects, list(identity.values()) + arrows,
                                          full_src, full_tgt, identity, table)
                    except (MalformedTable, LawViolation):
                        continue
                    sig = _canonical_signature(cat)
                    if sig in seen:
                        continue
                    seen.add(sig)
                    found.append(cat)
    return found


def enumerate_topologies(cat, max_topologies=0, seed=0):
    tops = list(all_topologies(cat))
    if max_topologies and len(tops) > max_topologies:
        rng = random.Random((seed, len(tops)).__repr__())
        keep = set(rng.sample(range(len(tops)), max_topologies))
        keep.add(0)  # trivial topology is always first
        tops = [t for i, t in enumerate(tops) if i in keep]
    return tops


# -- functors and presheaves ---------------------------------------------


def enumerate_functors(a, b):
    """All functors a -> b (exhaustive, validated)."""
    objs = list(a.objects)
    non_id = [x for x in a.arrows if not a.is_identity(x)]
    out = []
    for images in itertools.product(b.objects, repeat=len(objs)):
        omap = dict(zip(objs, images))
        pools = []
        for x in non_id:
            pool = b.hom(omap[a.src[x]], omap[a.tgt[x]])
            if not pool:
                pools = None
                break
            pools.append(pool)
        if pools is None:
            continue
        for choice in itertools.product(*pools):
            amap = dict(zip(non_id, choice))
            for o in objs:
                amap[a.identity[o]] = b.identity[omap[o]]
            try:
                out.append(FinFunctor(a, b, omap, amap))
            except (MalformedTable, LawViolation):
                continue
    return out


def enumerate_presheaves(cat, max_size=2):
    """All presheaves with value sets of at most max_size elements."""
    objs = list(cat.objects)
    non_id = [a for a in cat.arrows if not cat.is_identity(a)]
    out = []
    for sizes in itertools.product(range(max_size + 1), repeat=len(objs)):
        values = {o: tuple(f"{o}_e{i}" for i in range(k))
                  for o, k in zip(objs, sizes)}
        pools = []
        feasible = True
        for a in non_id:
            dom = values[cat.tgt[a]]
            cod = values[cat.src[a]]
            if dom and not cod:
                feasible = False
                break
            maps = [dict(zip(dom, pick))
                    for pick in itertools.product(cod, repeat=len(dom))]
            pools.append(maps)
        if not feasible:
            continue
        for choice in itertools.product(*pools):
            action = dict(zip(non_id, choice))
            for o in objs:
                action[cat.identity[o]] = {x: x for x in values[o]}
            try:
                out.append(FinPresheaf(cat, values, action))
            except FinSiteError:
                continue
    return out


def enumerate_presheaf_morphisms(cat, max_size=2):
    from .presheaf import presheaf_morphisms

    sheaves = enumerate_presheaves(cat, max_size)
    for p in sheaves:
        for q in sheaves:
            yield from presheaf_morphisms(p, q)


# -- indexed categories and relative sites -------------------------------


def _discrete(names):
    ids = {o: f"id_{o}" for o in names}
    return FinCategory(names, ids.values(),
                       {i: o for o, i in ids.items()},
                       {i: o for o, i in ids.items()}, ids,
                       {(i, i): i for i in ids.values()})


def fiber_menu(max_fiber_objects, with_arrow_fiber=True):
    menu = []
    for k in range(1, max_fiber_objects + 1):
        menu.append(_discrete([f"v{i}" for i in range(1, k + 1)]))
    if with_arrow_fiber and max_fiber_objects >= 2:
        menu.append(FinCategory(
            ["v1", "v2"], ["id_v1", "id_v2", "w"],
            {"id_v1": "v1", "id_v2": "v2", "w": "v1"},
            {"id_v1": "v1", "id_v2": "v2", "w": "v2"},
            {"v1": "id_v1", "v2": "id_v2"},
            {("id_v1", "id_v1"): "id_v1", ("id_v2", "id_v2"): "id_v2",
             ("w", "id_v1"): "w", ("id_v2", "w"): "w"}))
    return menu


def enumerate_indexed(base, max_fiber_objects=2, with_arrow_fiber=True):
    """All strict indexed categories over base with fibers from the menu."""
    menu = fiber_menu(max_fiber_objects, with_arrow_fiber)
    objs = list(base.objects)
    non_id = [a for a in base.arrows if not base.is_identity(a)]
    out = []
    for fibs in itertools.product(range(len(menu)), repeat=len(objs)):
        fibers = {o: menu[i] for o, i in zip(objs, fibs)}
        pools = []
        for a in non_id:
            pool = enumerate_functors(fibers[base.tgt[a]], fibers[base.src[a]])
            if not pool:
                pools = None
                break
            pools.append(pool)
        if pools is None:
            continue
        for choice in itertools.product(*pools):
            transport = dict(zip(non_id, choice))
            for o in objs:
                transport[base.identity[o]] = identity_functor(fibers[o])
            try:
                out.append(IndexedCategory(base, fibers, transport))
            except (MalformedTable, LawViolation):
                continue
    return out


@dataclass
class RelSiteInstance:
    base: FinCategory
    indexed: IndexedCategory
    j: GrothendieckTopology
    k: GrothendieckTopology
    rel: RelativeSite
    label: str

    def document(self):
        return relative_site_document(self.rel, self.label)


def enumerate_relative_sites(config_bounds, seed=0, with_arrow_fiber=True):
    """Relative sites over every enumerated base: every base topology,
    every strict indexed category from the fiber menu, and every total
    topology containing the Giraud one (optionally sampled)."""
    b = config_bounds
    out = []
    for ci, base in enumerate(enumerate_categories(b.max_objects, b.max_arrows)):
        for ii, idx in enumerate(enumerate_indexed(
                base, b.max_fiber_objects, with_arrow_fiber)):
            groth = grothendieck_construction(idx)
            for ji, j in enumerate(enumerate_topologies(
                    base, b.max_topologies, seed)):
                gir = giraud_topology(groth.projection, j)
                ks = [k for k in enumerate_topologies(
                    groth.total, 0, seed) if gir <= k]
                if b.max_topologies and len(ks) > b.max_topologies:
                    rng = random.Random((seed, ci, ii, ji).__repr__())
                    keep = set(rng.sample(range(len(ks)), b.max_topologies))
                    ks = [k for i, k in enumerate(ks) if i in keep]
                    if gir not in ks:
                        ks.append(gir)
                for ki, k in enumerate(ks):
                    rel = relative_site(groth, j, k)
                    label = f"c{ci}i{ii}j{ji}k{ki}"
                    out.append(RelSiteInstance(base, idx, j, k, rel, label))
    return out


# -- document rendering ---------------------------------------------------


def category_document(cat, name="C"):
    return Document([Declaration("category", name, cat, (1, 1))])


def site_document(sited, names=("D", "C", "p", "K", "J", "S")):
    dn, cn, pn, kn, jn, sn = names
    decls = [Declaration("category", dn, sited.functor.source, (1, 1),
                         {"base_name": dn})]
    if sited.functor.target != sited.functor.source:
        decls.append(Declaration("category", cn, sited.functor.target, (1, 1)))
    decls.extend([
        Declaration("functor", pn, sited.functor, (1, 1)),
        Declaration("topology", kn, sited.source_topology, (1, 1)),
        Declaration("topology", jn, sited.target_topology, (1, 1)),
        Declaration("site", sn, SiteDecl(pn, kn, jn, sited), (1, 1)),
    ])
    return Document(decls)


def relative_site_document(rel, label="S"):
    sited = rel.site.sited
    return site_document(sited)


def document_text(doc):
    from .dsl import serialize

    return serialize(doc)


# -- shrinking -------------------------------------------------------------


def drop_arrow(cat, arrow):
    """The wide subcategory without one non-identity arrow, when the
    remaining composition table is still closed."""
    if cat.is_identity(arrow):
        return None
    kept = [a for a in cat.arrows if a != arrow]
    table = {}
    for (f, g), h in cat.compose_table.items():
        if arrow in (f, g):
            continue
        if h == arrow:
            return None
        table[(f, g)] = h
    try:
        return FinCategory(cat.objects, kept,
                           {a: cat.src[a] for a in kept},
                           {a: cat.tgt[a] for a in kept},
                           cat.identity, table)
    except (MalformedTable, LawViolation):
        return None


def drop_object(cat, obj):
    kept_objs = [o for o in cat.objects if o != obj]
    if not kept_objs:
        return None
    kept = [a for a in cat.arrows
            if cat.src[a] != obj and cat.tgt[a] != obj]
    table = {}
    for (f, g), h in cat.compose_table.items():
        if f in kept and g in kept:
            if h not in kept:
                return None
            table[(f, g)] = h
    try:
        return FinCategory(kept_objs, kept,
                           {a: cat.src[a] for a in kept},
                           {a: cat.tgt[a] for a in kept},
                           {o: cat.identity[o] for o in kept_objs}, table)
    except (MalformedTable, LawViolation):
        return None


def restrict_topology(j, cat):
    """Restrict covers to a subcategory; None unless still a topology."""
    covers = {}
    kept = set(cat.arrows)
    for o in cat.objects:
        covers[o] = {s.members & kept for s in j.covers.get(o, ())}
    t = GrothendieckTopology(cat, covers)
    return t if is_topology(t) else None


def shrink_document(doc, still_fails):
    """Greedy minimization: drop non-identity arrows, then objects, from
    every category block, rebuilding dependents; keep a variant only when
    the property still fails on it."""
    from .dsl import parse, serialize

    current = doc
    changed = True
    while changed:
        changed = False
        for d in list(current.declarations):
            if d.kind != "category":
                continue
            cat = d.payload
            candidates = [("arrow", a) for a in cat.arrows
                          if not cat.is_identity(a)]
            candidates += [("object", o) for o in cat.objects]
            for kind, item in candidates:
                smaller = (drop_arrow(cat, item) if kind == "arrow"
                           else drop_object(cat, item))
                if smaller is None:
                    continue
                variant = _substitute_category(current, d.name, smaller)
                if variant is None:
                    continue
                text = serialize(variant)
                reparsed = parse(text)
                if reparsed.diagnostics:
                    continue
                if still_fails(reparsed.document):
                    current = reparsed.document
                    changed = True
                    break
            if changed:
                break
    return current


def _substitute_category(doc, name, smaller):
    """Rebuild a document with one category replaced, restricting the
    blocks that reference it; None when a dependent cannot be rebuilt."""
    decls = []
    for d in doc.declarations:
        if d.kind == "category" and d.name == name:
            decls.append(Declaration("category", name, smaller, d.span, d.meta))
        else:
            decls.append(d)
    out = []
    by = {("category", d.name): d.payload for d in decls if d.kind == "category"}
    for d in decls:
        if d.kind == "topology":
            base_name = d.meta.get("base_name")
            base = by.get(("category", base_name))
            if base is None:
                return None
            if base is not d.payload.base and base != d.payload.base:
                t = restrict_topology(d.payload, base)
                if t is None:
                    return None
                d = Declaration("topology", d.name, t, d.span, d.meta)
        elif d.kind == "functor":
            f = d.payload
            sname = d.meta.get("source_name")
            tname = d.meta.get("target_name")
            s_cat = by.get(("category", sname), f.source)
            t_cat = by.get(("category", tname), f.target)
            if s_cat != f.source or t_cat != f.target:
                try:
                    omap = {o: f.obj_map[o] for o in s_cat.objects}
                    amap = {a: f.arr_map[a] for a in s_cat.arrows}
                    if not (set(omap.values()) <= set(t_cat.objects)
                            and set(amap.values()) <= set(t_cat.arrows)):
                        return None
                    d = Declaration("functor", d.name,
                                    FinFunctor(s_cat, t_cat, omap, amap),
                                    d.span, d.meta)
                except (KeyError, MalformedTable, LawViolation):
                    return None
        elif d.kind in ("indexed", "site"):
            # sites re-resolve by name at parse time; keep as-is
            pass
        out.append(d)
    return Document(out)
