"""Sieves, Grothendieck topologies (verification, generation, lattice
enumeration, canonical topology), site roles of functors (comorphism,
cover-preserving, morphism of sites, continuity), the Giraud topology,
the comma-site construction and the trivial-topology sheaf/triplet
correspondence.

Topologies are stored extensionally: covers(c) is the explicit set of
covering sieves, so every check is set membership.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .errors import (
    BaseMismatch,
    NontrivialTopology,
    NotAComorphism,
    NotAFibration,
    TargetMismatch,
)
from .fincat import (
    AugmentedResult,
    CommaResult,
    FinCategory,
    FinFunctor,
    add_free_initial,
    build_comma,
    identity_functor,
)
from .report import CheckReport, failing, passing


@dataclass(frozen=True)
class Sieve:
    """A set of arrows into a fixed object, closed under precomposition."""

    obj: str
    members: frozenset

    def encode(self):
        return (self.obj, tuple(sorted(self.members)))


def maximal_sieve(c, obj):
    return Sieve(obj, frozenset(c.arrows_into(obj)))


def sieve_closure(c, obj, generators):
    """Smallest precomposition-closed set of arrows into obj containing
    the generators."""
    gens = set(generators)
    for f in gens:
        if c.tgt[f] != obj:
            raise TargetMismatch(f"generator {f} does not target {obj}")
    members = set()
    for f in gens:
        for g in c.arrows_into(c.src[f]):
            members.add(c.compose(f, g))
    return Sieve(obj, frozenset(members | gens))


def pullback_sieve(c, s, h):
    """h*(S) = all g with h∘g in S; a sieve on src(h)."""
    if c.tgt[h] != s.obj:
        raise TargetMismatch(f"arrow {h} does not target {s.obj}")
    src = c.src[h]
    return Sieve(src, frozenset(
        g for g in c.arrows_into(src) if c.compose(h, g) in s.members))


def is_closed(c, s):
    for f in s.members:
        for g in c.arrows_into(c.src[f]):
            if c.compose(f, g) not in s.members:
                return False
    return True


_sieve_cache = {}


def all_sieves(c, obj):
    """Every sieve on obj (deduplicated closures of all subsets)."""
    key = (c, obj)
    if key not in _sieve_cache:
        arrows = c.arrows_into(obj)
        found = {frozenset()}
        for r in range(1, len(arrows) + 1):
            for combo in itertools.combinations(arrows, r):
                found.add(sieve_closure(c, obj, combo).members)
        _sieve_cache[key] = tuple(
            Sieve(obj, m) for m in sorted(found, key=lambda m: (len(m), sorted(m))))
    return _sieve_cache[key]


class GrothendieckTopology:
    """Per-object sets of covering sieves.  The axioms are NOT enforced
    on construction; is_topology is the decision procedure."""

    def __init__(self, base, covers):
        self.base = base
        cov = {o: frozenset() for o in base.objects}
        for o, sieves in covers.items():
            if o not in base.objects:
                raise BaseMismatch(f"{o} is not an object of the base")
            entry = set()
            for s in sieves:
                if isinstance(s, Sieve):
                    if s.obj != o:
                        raise TargetMismatch(f"sieve on {s.obj} filed under {o}")
                    entry.add(s)
                else:
                    entry.add(Sieve(o, frozenset(s)))
            cov[o] = frozenset(entry)
        self.covers = cov
        self._encoded = None

    def covering(self, obj):
        return tuple(sorted(self.covers[obj], key=lambda s: s.encode()))

    def is_cover(self, s):
        return s in self.covers[s.obj]

    def encode(self):
        if self._encoded is None:
            self._encoded = tuple(
                (o, tuple(sorted(s.encode() for s in self.covers[o])))
                for o in self.base.objects)
        return self._encoded

    def __eq__(self, other):
        if not isinstance(other, GrothendieckTopology):
            return NotImplemented
        return self.base == other.base and self.encode() == other.encode()

    def __hash__(self):
        return hash(self.encode())

    def __le__(self, other):
        return all(self.covers[o] <= other.covers[o] for o in self.base.objects)

    def __lt__(self, other):
        return self <= other and self != other

    def __repr__(self):
        sizes = {o: len(self.covers[o]) for o in self.base.objects}
        return f"GrothendieckTopology({sizes})"


def trivial_topology(c):
    return GrothendieckTopology(c, {o: [maximal_sieve(c, o)] for o in c.objects})


def maximal_topology(c):
    return GrothendieckTopology(c, {o: all_sieves(c, o) for o in c.objects})


def is_topology(j):
    """Pass, or the first violated axiom (maximality, stability,
    transitivity) with its witness."""
    c = j.base
    for o in c.objects:
        if maximal_sieve(c, o) not in j.covers[o]:
            return failing("is_topology", {
                "axiom": "maximality", "object": o})
    for o in c.objects:
        for s in j.covering(o):
            for h in c.arrows_into(o):
                pulled = pullback_sieve(c, s, h)
                if not j.is_cover(pulled):
                    return failing("is_topology", {
                        "axiom": "stability", "object": o,
                        "sieve": sorted(s.members), "arrow": h,
                        "pullback": sorted(pulled.members),
                        "at": c.src[h]})
    for o in c.objects:
        for s in j.covering(o):
            for r in all_sieves(c, o):
                if j.is_cover(r):
                    continue
                if all(j.is_cover(pullback_sieve(c, r, h)) for h in s.members):
                    return failing("is_topology", {
                        "axiom": "transitivity", "object": o,
                        "sieve": sorted(s.members),
                        "locally_covering": sorted(r.members)})
    return passing("is_topology")


def _close_covers(c, covers):
    """Least fixpoint containing `covers` and closed under the three
    topology axioms (finite lattice, so this terminates)."""
    cov = {o: set(covers.get(o, ())) for o in c.objects}
    for o in c.objects:
        cov[o].add(maximal_sieve(c, o))
    changed = True
    while changed:
        changed = False
        for o in c.objects:
            for s in list(cov[o]):
                for h in c.arrows_into(o):
                    pulled = pullback_sieve(c, s, h)
                    if pulled not in cov[c.src[h]]:
                        cov[c.src[h]].add(pulled)
                        changed = True
        for o in c.objects:
            for r in all_sieves(c, o):
                if r in cov[o]:
                    continue
                for s in list(cov[o]):
                    if all(pullback_sieve(c, r, h) in cov[c.src[h]]
                           for h in s.members):
                        cov[o].add(r)
                        changed = True
                        break
    return GrothendieckTopology(c, cov)


def generate_topology(c, families):
    """Smallest topology whose covers contain the closures of the given
    (object, arrow-set) generating families."""
    covers = {}
    for obj, gens in families:
        covers.setdefault(obj, set()).add(sieve_closure(c, obj, gens))
    return _close_covers(c, covers)


_topology_cache = {}


def all_topologies(c):
    """Every Grothendieck topology on c, enumerated by closing upwards
    from the trivial one in the finite lattice."""
    if c not in _topology_cache:
        start = trivial_topology(c)
        seen = {start.encode(): start}
        queue = [start]
        while queue:
            t = queue.pop()
            for o in c.objects:
                for s in all_sieves(c, o):
                    if t.is_cover(s):
                        continue
                    bigger = _close_covers(
                        c, {ob: set(t.covers[ob]) | ({s} if ob == o else set())
                            for ob in c.objects})
                    if bigger.encode() not in seen:
                        seen[bigger.encode()] = bigger
                        queue.append(bigger)
        _topology_cache[c] = tuple(
            sorted(seen.values(), key=lambda t: t.encode()))
    return _topology_cache[c]


def canonical_topology(c):
    """Covering sieves are those along which every representable
    satisfies the bijective gluing condition, universally (after all
    pullbacks)."""
    from .presheaf import matching_families, yoneda

    representables = {e: yoneda(c, e) for e in c.objects}
    covers = {}
    for o in c.objects:
        good = []
        for s in all_sieves(c, o):
            ok = True
            for h in list(c.arrows_into(o)):
                pulled = pullback_sieve(c, s, h)
                for e in c.objects:
                    families, restriction = matching_families(
                        pulled, representables[e])
                    keys = [fam.key() for fam in restriction.values()]
                    if len(set(keys)) != len(keys):
                        ok = False
                        break
                    if set(keys) != {fam.key() for fam in families}:
                        ok = False
                        break
                if not ok:
                    break
            if ok:
                good.append(s)
        covers[o] = good
    return GrothendieckTopology(c, covers)


# -- sited functors ----------------------------------------------------


@dataclass
class SitedFunctor:
    """A functor with source and target topologies and lazily verified
    role flags (comorphism / cover_preserving / morphism_of_sites /
    continuous); each flag is re-derivable by the corresponding check."""

    functor: FinFunctor
    source_topology: GrothendieckTopology
    target_topology: GrothendieckTopology
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if self.functor.source != self.source_topology.base:
            raise BaseMismatch("source topology not on the functor source")
        if self.functor.target != self.target_topology.base:
            raise BaseMismatch("target topology not on the functor target")

    def report(self, role):
        if role not in self._cache:
            checker = {
                "comorphism": is_comorphism,
                "cover_preserving": is_cover_preserving,
                "morphism_of_sites": is_morphism_of_sites,
                "continuous": is_continuous,
            }[role]
            self._cache[role] = checker(self)
        return self._cache[role]

    @property
    def roles(self):
        return {r: bool(self.report(r)) for r in
                ("comorphism", "cover_preserving", "morphism_of_sites",
                 "continuous")}


def is_comorphism(p):
    """For every object d and J-cover S of p(d), some K-cover of d must
    map into S; the largest candidate is the sieve of arrows whose image
    lies in S."""
    f = p.functor
    d_cat, c_cat = f.source, f.target
    for d in d_cat.objects:
        for s in p.target_topology.covering(f.obj_map[d]):
            lifted = frozenset(
                g for g in d_cat.arrows_into(d) if f.arr_map[g] in s.members)
            if not p.source_topology.is_cover(Sieve(d, lifted)):
                return failing("is_comorphism", {
                    "object": d, "cover": sorted(s.members),
                    "best_lift": sorted(lifted)})
    return passing("is_comorphism")


def is_cover_preserving(p):
    f = p.functor
    for d in f.source.objects:
        for s in p.source_topology.covering(d):
            image = sieve_closure(f.target, f.obj_map[d],
                                  [f.arr_map[g] for g in s.members])
            if not p.target_topology.is_cover(image):
                return failing("is_cover_preserving", {
                    "object": d, "cover": sorted(s.members),
                    "image_sieve": sorted(image.members)})
    return passing("is_cover_preserving")


def is_morphism_of_sites(p):
    """Cover preservation plus the three local flatness conditions
    (generalized elements, pairing, equalizing), each decided through
    the sieve of qualifying arrows."""
    a = p.functor
    c_cat, d_cat = a.source, a.target
    k = p.target_topology
    cp = is_cover_preserving(p)
    if not cp:
        return failing("is_morphism_of_sites",
                       {"condition": "cover_preserving", **cp.witness})
    image_objs = sorted({a.obj_map[c] for c in c_cat.objects})

    def arrows_to_image(e):
        for c in c_cat.objects:
            for w in d_cat.hom(e, a.obj_map[c]):
                yield c, w

    # (1) local generalized elements
    for d in d_cat.objects:
        members = frozenset(
            v for v in d_cat.arrows_into(d)
            if any(True for _ in arrows_to_image(d_cat.src[v])))
        if not k.is_cover(Sieve(d, members)):
            return failing("is_morphism_of_sites", {
                "condition": 1, "object": d, "sieve": sorted(members)})
    # (2) local pairing
    for d in d_cat.objects:
        pairs = [
            (c1, x, c2, y)
            for c1 in c_cat.objects for x in d_cat.hom(d, a.obj_map[c1])
            for c2 in c_cat.objects for y in d_cat.hom(d, a.obj_map[c2])
        ]
        for c1, x, c2, y in pairs:
            members = set()
            for v in d_cat.arrows_into(d):
                e = d_cat.src[v]
                found = False
                for b in c_cat.objects:
                    for w in d_cat.hom(e, a.obj_map[b]):
                        for g in c_cat.hom(b, c1):
                            if d_cat.compose(a.arr_map[g], w) != d_cat.compose(x, v):
                                continue
                            for h in c_cat.hom(b, c2):
                                if d_cat.compose(a.arr_map[h], w) == d_cat.compose(y, v):
                                    found = True
                                    break
                            if found:
                                break
                        if found:
                            break
                    if found:
                        break
                if found:
                    members.add(v)
            if not k.is_cover(Sieve(d, frozenset(members))):
                return failing("is_morphism_of_sites", {
                    "condition": 2, "object": d, "x": x, "y": y,
                    "sieve": sorted(members)})
    # (3) local equalizing
    for d in d_cat.objects:
        for c in c_cat.objects:
            for x in d_cat.hom(d, a.obj_map[c]):
                for c2 in c_cat.objects:
                    for g in c_cat.hom(c, c2):
                        for h in c_cat.hom(c, c2):
                            if g >= h:
                                continue
                            if (d_cat.compose(a.arr_map[g], x)
                                    != d_cat.compose(a.arr_map[h], x)):
                                continue
                            members = set()
                            for v in d_cat.arrows_into(d):
                                e = d_cat.src[v]
                                found = False
                                for b in c_cat.objects:
                                    for w in d_cat.hom(e, a.obj_map[b]):
                                        for kk in c_cat.hom(b, c):
                                            if (d_cat.compose(a.arr_map[kk], w)
                                                    == d_cat.compose(x, v)
                                                    and c_cat.compose(g, kk)
                                                    == c_cat.compose(h, kk)):
                                                found = True
                                                break
                                        if found:
                                            break
                                    if found:
                                        break
                                if found:
                                    members.add(v)
                            if not k.is_cover(Sieve(d, frozenset(members))):
                                return failing("is_morphism_of_sites", {
                                    "condition": 3, "object": d, "x": x,
                                    "parallel": [g, h],
                                    "sieve": sorted(members)})
    return passing("is_morphism_of_sites", {"image_objects": image_objs})


def _sieve_diagram(p, d, s):
    """The diagram over the sieve-category of s sending v: e -> d to the
    representable at p(e), with the comparison legs into y(p(d))."""
    from .presheaf import Diagram, yoneda, yoneda_map

    f = p.functor
    c_cat = f.target
    d_cat = f.source
    nodes = {}
    for v in sorted(s.members):
        nodes[v] = yoneda(c_cat, f.obj_map[d_cat.src[v]])
    edges = []
    for v in sorted(s.members):
        for v2 in sorted(s.members):
            for w in d_cat.hom(d_cat.src[v], d_cat.src[v2]):
                if d_cat.compose(v2, w) != v:
                    continue
                m = yoneda_map(c_cat, f.arr_map[w])
                edges.append((v, v2, m))
    return Diagram(nodes, tuple(edges))


def is_continuous(p):
    """Yoneda-reduced continuity: for every covering sieve of the source,
    the colimit comparison into the representable of the image object is
    locally an isomorphism for the target topology."""
    from .presheaf import (PresheafMorphism, compute_colimit, locality_test,
                           yoneda)

    f = p.functor
    d_cat, c_cat = f.source, f.target
    for d in d_cat.objects:
        target = yoneda(c_cat, f.obj_map[d])
        for s in p.source_topology.covering(d):
            diagram = _sieve_diagram(p, d, s)
            colim = compute_colimit(diagram, base=c_cat)
            comps = {}
            for o in c_cat.objects:
                comps[o] = {}
                for el in colim.presheaf.values[o]:
                    v, g = el[0], el[1]
                    # leg at node v is postcomposition with p(v)
                    rep = colim.class_of[o][el]
                    comps[o][rep] = c_cat.compose(f.arr_map[v], g)
            comparison = PresheafMorphism(colim.presheaf, target, comps)
            verdict = locality_test(comparison, p.target_topology, "iso")
            if not verdict:
                return failing("is_continuous", {
                    "object": d, "cover": sorted(s.members),
                    "comparison": verdict.witness,
                    "reason": verdict.details or verdict.check})
    return passing("is_continuous")


# -- Giraud topology ---------------------------------------------------


def giraud_topology(p, j):
    """Smallest topology on the total category making the fibration a
    comorphism towards (base, J): a sieve covers when its cartesian
    members project to a J-covering family."""
    from .fibration import is_cartesian, is_fibration

    fib = is_fibration(p)
    if not fib.report:
        raise NotAFibration(fib.report.witness)
    total, base = p.source, p.target
    cartesian = {a for a in total.arrows if is_cartesian(p, a)}
    covers = {}
    for o in total.objects:
        good = []
        for s in all_sieves(total, o):
            proj = [p.arr_map[g] for g in s.members if g in cartesian]
            if not proj:
                generated = Sieve(p.obj_map[o], frozenset())
            else:
                generated = sieve_closure(base, p.obj_map[o], proj)
            if j.is_cover(generated):
                good.append(s)
        covers[o] = good
    return GrothendieckTopology(total, covers)


# -- comma site --------------------------------------------------------


def augment_site(c, j):
    """Freely add an initial object and extend the topology with the
    empty sieve covering it (so every sieve on it covers)."""
    aug = add_free_initial(c)
    c0 = aug.category
    covers = {}
    for o in c.objects:
        lifted = set()
        for s in j.covers[o]:
            if s.members:
                lifted.add(sieve_closure(c0, o, s.members))
            else:
                lifted.add(Sieve(o, frozenset()))
        covers[o] = lifted
    covers[aug.initial] = set(all_sieves(c0, aug.initial))
    return aug, GrothendieckTopology(c0, covers)


@dataclass
class CommaSiteResult:
    site: FinCategory
    topology: GrothendieckTopology
    comma: CommaResult
    proj_d: FinFunctor           # comma -> augmented source
    proj_c: FinFunctor           # comma -> augmented target
    p0: FinFunctor               # augmented functor
    d_aug: AugmentedResult
    c_aug: AugmentedResult
    k0: GrothendieckTopology
    j0: GrothendieckTopology

    def sited_projection(self):
        return SitedFunctor(self.proj_c, self.topology, self.j0)


def comma_site(p):
    """Augment both sites with free initial objects, extend the functor,
    build the comma category over the augmented target, and equip it with
    the topology whose covers are sieves covering on both projections."""
    if not p.report("comorphism"):
        raise NotAComorphism(p.report("comorphism").witness)
    f = p.functor
    d_aug, k0 = augment_site(f.source, p.source_topology)
    c_aug, j0 = augment_site(f.target, p.target_topology)
    obj_map = {o: f.obj_map[o] for o in f.source.objects}
    obj_map[d_aug.initial] = c_aug.initial
    arr_map = {a: f.arr_map[a] for a in f.source.arrows}
    arr_map[d_aug.category.identity[d_aug.initial]] = (
        c_aug.category.identity[c_aug.initial])
    for o, b in d_aug.bang.items():
        arr_map[b] = c_aug.bang[f.obj_map[o]]
    p0 = FinFunctor(d_aug.category, c_aug.category, obj_map, arr_map)
    comma = build_comma(p0, identity_functor(c_aug.category))
    cat = comma.category

    covers = {}
    for o in cat.objects:
        d_obj = comma.proj_left.obj_map[o]
        c_obj = comma.proj_right.obj_map[o]
        good = []
        for s in all_sieves(cat, o):
            proj_d_arrows = [comma.proj_left.arr_map[g] for g in s.members]
            proj_c_arrows = [comma.proj_right.arr_map[g] for g in s.members]
            sd = (sieve_closure(d_aug.category, d_obj, proj_d_arrows)
                  if proj_d_arrows else Sieve(d_obj, frozenset()))
            sc = (sieve_closure(c_aug.category, c_obj, proj_c_arrows)
                  if proj_c_arrows else Sieve(c_obj, frozenset()))
            if k0.is_cover(sd) and j0.is_cover(sc):
                good.append(s)
        covers[o] = good
    topology = GrothendieckTopology(cat, covers)
    return CommaSiteResult(cat, topology, comma, comma.proj_left,
                           comma.proj_right, p0, d_aug, c_aug, k0, j0)


# -- trivial-topology correspondence (sheaves <-> triplets) -------------


@dataclass
class Triplet:
    """A presheaf F on D, a presheaf E on C, and alpha: F -> E∘p."""

    f: object                # FinPresheaf on D
    e: object                # FinPresheaf on C
    alpha: object            # PresheafMorphism F -> restrict_along(p, E)


def _extend_presheaf(p, aug):
    """Extend a presheaf to the augmented category with a singleton value
    at the new initial object."""
    from .presheaf import FinPresheaf

    c0 = aug.category
    values = {o: p.values[o] for o in p.base.objects}
    values[aug.initial] = ((),)
    action = {a: dict(p.action[a]) for a in p.base.arrows}
    action[c0.identity[aug.initial]] = {(): ()}
    for o, b in aug.bang.items():
        action[b] = {x: () for x in p.values[o]}
    return FinPresheaf(c0, values, action)


def comma_correspondence(cs, direction, x):
    """Explicit sheaf <-> triplet correspondence at trivial topologies.

    forward: triplet (F, E, alpha) -> the presheaf on the comma site
    whose value at (d, c, u) is the pullback of alpha_d along E(u).
    backward: sheaf Q -> the triplet (Q[-, p(-), 1], Q[0, -, !], alpha_Q)
    with alpha_Q at d given by Q(!_d, 1_{p(d)}).
    """
    from .presheaf import FinPresheaf, PresheafMorphism, restrict_along

    base_d = cs.d_aug.inclusion.source
    base_c = cs.c_aug.inclusion.source
    if (cs.k0 != augment_site(base_d, trivial_topology(base_d))[1]
            or cs.j0 != augment_site(base_c, trivial_topology(base_c))[1]):
        raise NontrivialTopology(
            "correspondence is only specified at trivial topologies")
    cat = cs.site
    p0 = cs.p0

    if direction == "forward":
        f0 = _extend_presheaf(x.f, cs.d_aug)
        e0 = _extend_presheaf(x.e, cs.c_aug)
        alpha0 = {o: dict(x.alpha.components[o]) for o in x.f.base.objects}
        alpha0[cs.d_aug.initial] = {(): ()}
        values = {}
        for o in cat.objects:
            d, c, u = cs.comma.obj_label[o]
            values[o] = [
                (e, xx)
                for e in e0.values[c]
                for xx in f0.values[d]
                if e0.action[u][e] == alpha0[d][xx]
            ]
        action = {}
        for a in cat.arrows:
            m, n = cs.comma.arr_label[a]
            t = cat.tgt[a]
            action[a] = {
                (e, xx): (e0.action[n][e], f0.action[m][xx])
                for (e, xx) in values[t]
            }
        return FinPresheaf(cat, values, action)

    if direction == "backward":
        q = x
        d_cat, c_cat = base_d, base_c
        f_values = {}
        f_action = {}
        for d in d_cat.objects:
            o = cs.comma.obj_of[(d, p0.obj_map[d], c_cat.identity[p0.obj_map[d]])]
            f_values[d] = q.values[o]
        for m in d_cat.arrows:
            d1, d2 = d_cat.src[m], d_cat.tgt[m]
            s_obj = cs.comma.obj_of[(d1, p0.obj_map[d1], c_cat.identity[p0.obj_map[d1]])]
            t_obj = cs.comma.obj_of[(d2, p0.obj_map[d2], c_cat.identity[p0.obj_map[d2]])]
            arrow = _comma_arrow(cs, m, p0.arr_map[m], s_obj, t_obj)
            f_action[m] = {v: q.action[arrow][v] for v in q.values[t_obj]}
        f_pre = FinPresheaf(d_cat, f_values, f_action)

        e_values = {}
        e_action = {}
        zero = cs.d_aug.initial
        for c in c_cat.objects:
            o = cs.comma.obj_of[(zero, c, cs.c_aug.bang[c])]
            e_values[c] = q.values[o]
        for n in c_cat.arrows:
            c1, c2 = c_cat.src[n], c_cat.tgt[n]
            s_obj = cs.comma.obj_of[(zero, c1, cs.c_aug.bang[c1])]
            t_obj = cs.comma.obj_of[(zero, c2, cs.c_aug.bang[c2])]
            arrow = _comma_arrow(cs, cs.d_aug.category.identity[zero], n, s_obj, t_obj)
            e_action[n] = {v: q.action[arrow][v] for v in q.values[t_obj]}
        e_pre = FinPresheaf(c_cat, e_values, e_action)

        alpha_comps = {}
        p_plain = FinFunctor(d_cat, c_cat,
                             {o: p0.obj_map[o] for o in d_cat.objects},
                             {a: p0.arr_map[a] for a in d_cat.arrows})
        for d in d_cat.objects:
            pd = p_plain.obj_map[d]
            s_obj = cs.comma.obj_of[(zero, pd, cs.c_aug.bang[pd])]
            t_obj = cs.comma.obj_of[(d, pd, c_cat.identity[pd])]
            arrow = _comma_arrow(cs, cs.d_aug.bang[d], c_cat.identity[pd],
                                 s_obj, t_obj)
            alpha_comps[d] = {v: q.action[arrow][v] for v in q.values[t_obj]}
        alpha = PresheafMorphism(f_pre, restrict_along(p_plain, e_pre), alpha_comps)
        return Triplet(f_pre, e_pre, alpha)

    raise ValueError(f"unknown direction {direction!r}")


def _comma_arrow(cs, m, n, s_obj, t_obj):
    for a in cs.site.arrows:
        if (cs.site.src[a] == s_obj and cs.site.tgt[a] == t_obj
                and cs.comma.arr_label[a] == (m, n)):
            return a
    raise KeyError((m, n, s_obj, t_obj))
