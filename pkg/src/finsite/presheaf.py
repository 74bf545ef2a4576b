"""Finite-set-valued presheaves: Yoneda, restriction, finite colimits and
pullbacks, matching families, the sheaf condition, plus-construction
sheafification, and the locally-epi/mono/iso tests used as the
topos-level oracle everywhere else.

Element values are opaque hashable data built from strings, ints and
tuples; deterministic ordering is by repr (see fincat.ekey).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .errors import BaseMismatch, TargetMismatch, UnknownObject
from .fincat import FinCategory, FinFunctor, ekey
from .report import CheckReport, failing, passing
from .sites import GrothendieckTopology, Sieve, maximal_sieve, pullback_sieve


class FinPresheaf:
    """A contravariant finite-set-valued functor given by tables.

    values maps each object to a finite set; action maps each arrow
    f: a -> b to a function values[b] -> values[a].
    """

    def __init__(self, base, values, action):
        self.base = base
        self.values = {o: tuple(sorted(vs, key=ekey)) for o, vs in values.items()}
        self.action = {a: dict(m) for a, m in action.items()}
        self._validate()
        self._sets = {o: frozenset(vs) for o, vs in self.values.items()}

    def _validate(self):
        c = self.base
        if set(self.values) != set(c.objects):
            raise BaseMismatch("values not total on objects")
        if set(self.action) != set(c.arrows):
            raise BaseMismatch("action not total on arrows")
        for a, m in self.action.items():
            dom = set(self.values[c.tgt[a]])
            cod = set(self.values[c.src[a]])
            if set(m) != dom or not set(m.values()) <= cod:
                raise BaseMismatch(f"action({a}) is not a map P(tgt) -> P(src)")
        for o in c.objects:
            ident = self.action[c.identity[o]]
            for x in self.values[o]:
                if ident[x] != x:
                    raise BaseMismatch(f"action(id_{o}) not the identity")
        for (f, g), h in c.compose_table.items():
            for x in self.values[c.tgt[f]]:
                if self.action[h][x] != self.action[g][self.action[f][x]]:
                    raise BaseMismatch(f"action not functorial at ({f},{g})")

    def at(self, o):
        return self.values[o]

    def has(self, o, x):
        return x in self._sets[o]

    def __eq__(self, other):
        if not isinstance(other, FinPresheaf):
            return NotImplemented
        return (self.base == other.base and self.values == other.values
                and self.action == other.action)

    def __repr__(self):
        sizes = {o: len(v) for o, v in self.values.items()}
        return f"FinPresheaf({sizes})"


class PresheafMorphism:
    """A natural transformation of presheaves; naturality checked."""

    def __init__(self, source, target, components):
        if source.base != target.base:
            raise BaseMismatch("presheaves over different bases")
        self.source = source
        self.target = target
        self.components = {o: dict(m) for o, m in components.items()}
        self._validate()

    def _validate(self):
        c = self.source.base
        if set(self.components) != set(c.objects):
            raise BaseMismatch("components not total on objects")
        for o, m in self.components.items():
            if set(m) != set(self.source.values[o]):
                raise BaseMismatch(f"component at {o} not total")
            for x, y in m.items():
                if not self.target.has(o, y):
                    raise BaseMismatch(f"component at {o} leaves the target")
        for a in c.arrows:
            s, t = c.src[a], c.tgt[a]
            for x in self.source.values[t]:
                left = self.components[s][self.source.action[a][x]]
                right = self.target.action[a][self.components[t][x]]
                if left != right:
                    raise BaseMismatch(f"naturality fails at arrow {a}")

    def apply(self, o, x):
        return self.components[o][x]

    def is_pointwise_iso(self):
        return all(
            len(set(m.values())) == len(m) == len(self.target.values[o])
            for o, m in self.components.items()
        )

    def __eq__(self, other):
        if not isinstance(other, PresheafMorphism):
            return NotImplemented
        return (self.source == other.source and self.target == other.target
                and self.components == other.components)


def compose_morphisms(phi, psi):
    """phi∘psi for psi: P -> Q, phi: Q -> R."""
    if psi.target != phi.source:
        raise TargetMismatch("morphisms not composable")
    return PresheafMorphism(
        psi.source, phi.target,
        {o: {x: phi.components[o][y] for x, y in psi.components[o].items()}
         for o in psi.source.base.objects},
    )


def identity_morphism(p):
    return PresheafMorphism(p, p, {o: {x: x for x in p.values[o]} for o in p.base.objects})


def empty_presheaf(c):
    return FinPresheaf(c, {o: () for o in c.objects}, {a: {} for a in c.arrows})


def terminal_presheaf(c):
    return FinPresheaf(c, {o: ("*",) for o in c.objects},
                       {a: {"*": "*"} for a in c.arrows})


def yoneda(c, obj):
    """The representable presheaf Hom(-, obj) with precomposition action."""
    if obj not in c.objects:
        raise UnknownObject(obj)
    values = {o: c.hom(o, obj) for o in c.objects}
    action = {}
    for a in c.arrows:
        action[a] = {g: c.compose(g, a) for g in values[c.tgt[a]]}
    return FinPresheaf(c, values, action)


def yoneda_map(c, m):
    """The morphism y(src m) -> y(tgt m) given by postcomposition."""
    src, tgt = c.src[m], c.tgt[m]
    return PresheafMorphism(
        yoneda(c, src), yoneda(c, tgt),
        {o: {g: c.compose(m, g) for g in c.hom(o, src)} for o in c.objects},
    )


def restrict_along(a, p):
    """(P ∘ A^op): the presheaf on A's source with values P(A(-))."""
    if p.base != a.target:
        raise BaseMismatch("presheaf not based on the functor's target")
    return FinPresheaf(
        a.source,
        {o: p.values[a.obj_map[o]] for o in a.source.objects},
        {m: dict(p.action[a.arr_map[m]]) for m in a.source.arrows},
    )


def restrict_morphism(a, phi):
    """Whiskering: the morphism P∘A^op -> Q∘A^op induced by phi: P -> Q."""
    return PresheafMorphism(
        restrict_along(a, phi.source), restrict_along(a, phi.target),
        {o: dict(phi.components[a.obj_map[o]]) for o in a.source.objects},
    )


# -- colimits and pullbacks -------------------------------------------


@dataclass(frozen=True)
class Diagram:
    """A finite diagram of presheaves over a common base.

    nodes: node id -> presheaf; edges: (source node, target node,
    morphism) triples.
    """

    nodes: dict
    edges: tuple

    def __post_init__(self):
        bases = {id(p.base): p.base for p in self.nodes.values()}
        if len({b._encode() for b in bases.values()}) > 1:
            raise BaseMismatch("diagram mixes bases")
        for (s, t, m) in self.edges:
            if m.source != self.nodes[s] or m.target != self.nodes[t]:
                raise BaseMismatch(f"edge {s}->{t} endpoints do not match")


@dataclass
class ColimitResult:
    presheaf: FinPresheaf
    cocone: dict             # node id -> PresheafMorphism
    class_of: dict           # object -> {(node, x) -> representative}


def compute_colimit(diagram, base=None):
    """Pointwise colimit: disjoint union of values quotiented by the
    zig-zag closure of the edge images, with the cocone returned."""
    if diagram.nodes:
        base = next(iter(diagram.nodes.values())).base
    elif base is None:
        raise BaseMismatch("empty diagram needs an explicit base")
    node_ids = sorted(diagram.nodes)
    class_of = {}
    values = {}
    for o in base.objects:
        items = [(n, x) for n in node_ids for x in diagram.nodes[n].values[o]]
        parent = {it: it for it in items}

        def find(it):
            while parent[it] != it:
                parent[it] = parent[parent[it]]
                it = parent[it]
            return it

        for (s, t, m) in diagram.edges:
            for x in diagram.nodes[s].values[o]:
                a, b = find((s, x)), find((t, m.components[o][x]))
                if a != b:
                    parent[max(a, b, key=ekey)] = min(a, b, key=ekey)
        groups = {}
        for it in items:
            groups.setdefault(find(it), []).append(it)
        rep = {}
        for root, members in groups.items():
            r = min(members, key=ekey)
            for it in members:
                rep[it] = r
        class_of[o] = rep
        values[o] = sorted(set(rep.values()), key=ekey)

    action = {}
    for a in base.arrows:
        s, t = base.src[a], base.tgt[a]
        action[a] = {}
        for (n, x) in values[t]:
            moved = (n, diagram.nodes[n].action[a][x])
            action[a][(n, x)] = class_of[s][moved]

    colim = FinPresheaf(base, values, action)
    cocone = {}
    for n in node_ids:
        cocone[n] = PresheafMorphism(
            diagram.nodes[n], colim,
            {o: {x: class_of[o][(n, x)] for x in diagram.nodes[n].values[o]}
             for o in base.objects},
        )
    return ColimitResult(colim, cocone, class_of)


@dataclass
class PullbackResult:
    presheaf: FinPresheaf
    proj_left: PresheafMorphism
    proj_right: PresheafMorphism


def compute_pullback(phi, psi):
    """Pointwise fiber product of phi: X -> Z and psi: Y -> Z.

    Elements at each object are the pairs (x, y) with phi(x) = psi(y).
    """
    if phi.target != psi.target:
        raise TargetMismatch("pullback needs a common target")
    base = phi.source.base
    values = {}
    for o in base.objects:
        values[o] = [
            (x, y)
            for x in phi.source.values[o]
            for y in psi.source.values[o]
            if phi.components[o][x] == psi.components[o][y]
        ]
    action = {}
    for a in base.arrows:
        t = base.tgt[a]
        action[a] = {
            (x, y): (phi.source.action[a][x], psi.source.action[a][y])
            for (x, y) in values[t]
        }
    pb = FinPresheaf(base, values, action)
    left = PresheafMorphism(pb, phi.source,
                            {o: {(x, y): x for (x, y) in values[o]} for o in base.objects})
    right = PresheafMorphism(pb, psi.source,
                             {o: {(x, y): y for (x, y) in values[o]} for o in base.objects})
    return PullbackResult(pb, left, right)


# -- matching families and the sheaf condition ------------------------


@dataclass
class MatchingFamily:
    """A compatible assignment of elements along a sieve."""

    sieve: Sieve
    presheaf: FinPresheaf
    assignment: dict         # arrow in sieve -> element of P(src arrow)

    def key(self):
        return tuple(sorted(((a, ekey(x)) for a, x in self.assignment.items())))

    def __eq__(self, other):
        return (self.sieve == other.sieve and self.presheaf == other.presheaf
                and self.assignment == other.assignment)


def matching_families(s, p):
    """All compatible families on the sieve, plus the restriction map
    sending x in P(s.obj) to the family f -> P(f)(x)."""
    c = p.base
    members = sorted(s.members)
    families = []

    def propagate(assign, f, value):
        # setting assign[f] forces assign[f∘g] for every composable g
        stack = [(f, value)]
        while stack:
            g, v = stack.pop()
            if g in assign:
                if assign[g] != v:
                    return False
                continue
            assign[g] = v
            for h in c.arrows_into(c.src[g]):
                comp = c.compose(g, h)
                stack.append((comp, p.action[h][v]))
        return True

    def rec(assign):
        todo = [m for m in members if m not in assign]
        if not todo:
            families.append(MatchingFamily(s, p, dict(assign)))
            return
        f = todo[0]
        for v in p.values[c.src[f]]:
            trial = dict(assign)
            if propagate(trial, f, v):
                rec(trial)

    rec({})
    families.sort(key=lambda fam: fam.key())
    restriction = {}
    for x in p.values.get(s.obj, ()):
        restriction[x] = MatchingFamily(
            s, p, {f: p.action[f][x] for f in members})
    return families, restriction


def is_sheaf(p, j):
    """Pass iff for every covering sieve the restriction map into
    matching families is a bijection."""
    if p.base != j.base:
        raise BaseMismatch("presheaf and topology over different bases")
    for o in p.base.objects:
        for s in j.covering(o):
            families, restriction = matching_families(s, p)
            keys = {}
            for x, fam in restriction.items():
                k = fam.key()
                if k in keys:
                    return failing("is_sheaf", {
                        "object": o, "sieve": sorted(s.members),
                        "reason": "not separated", "elements": [keys[k], ekey(x)]})
                keys[k] = ekey(x)
            family_keys = {fam.key() for fam in families}
            missing = family_keys - set(keys)
            if missing:
                return failing("is_sheaf", {
                    "object": o, "sieve": sorted(s.members),
                    "reason": "family does not glue",
                    "family": sorted(missing)[0]})
            # restriction map must land in the matching families
            extra = set(keys) - family_keys
            if extra:
                return failing("is_sheaf", {
                    "object": o, "sieve": sorted(s.members),
                    "reason": "restriction not compatible"})
    return passing("is_sheaf")


# -- plus construction and sheafification -----------------------------


def _family_encode(sieve_members, assignment):
    return ("pl", tuple(sorted(sieve_members)),
            tuple(sorted(assignment.items(), key=lambda kv: kv[0])))


@dataclass
class PlusResult:
    presheaf: FinPresheaf
    unit: PresheafMorphism
    class_rep: dict          # object -> {(sieve frozenset, family key) -> element}


def plus_construction(p, j):
    """One application of the plus construction: P+(c) is the colimit
    over covering sieves of c (reverse inclusion) of matching families.

    Representatives are canonicalized by the least (sieve, assignment)
    encoding of each equivalence class; two pairs are identified when
    some common covering refinement equalizes them.
    """
    c = p.base
    values = {}
    class_rep = {}
    fams = {}
    for o in c.objects:
        pairs = []
        for s in j.covering(o):
            families, _ = matching_families(s, p)
            for fam in families:
                pairs.append((frozenset(s.members), fam.assignment))
        # union-find over pairs under common-refinement agreement
        idx = list(range(len(pairs)))

        def find(i):
            while idx[i] != i:
                idx[i] = idx[idx[i]]
                i = idx[i]
            return i

        covers_o = [frozenset(s.members) for s in j.covering(o)]
        for i in range(len(pairs)):
            for k in range(i + 1, len(pairs)):
                si, mi = pairs[i]
                sk, mk = pairs[k]
                inter = si & sk
                for t in covers_o:
                    if t <= inter and all(mi[a] == mk[a] for a in t):
                        ri, rk = find(i), find(k)
                        if ri != rk:
                            idx[max(ri, rk)] = min(ri, rk)
                        break
        groups = {}
        for i in range(len(pairs)):
            groups.setdefault(find(i), []).append(i)
        rep_of = {}
        elems = []
        for members in groups.values():
            best = min(_family_encode(pairs[i][0], pairs[i][1]) for i in members)
            for i in members:
                rep_of[(pairs[i][0], tuple(sorted(pairs[i][1].items())))] = best
            elems.append(best)
        class_rep[o] = rep_of
        values[o] = sorted(elems, key=ekey)
        fams[o] = pairs

    def classify(o, sieve_members, assignment):
        return class_rep[o][(frozenset(sieve_members), tuple(sorted(assignment.items())))]

    action = {}
    for a in c.arrows:
        s_o, t_o = c.src[a], c.tgt[a]
        action[a] = {}
        for el in values[t_o]:
            _, members, assign_items = el
            sieve = Sieve(t_o, frozenset(members))
            pulled = pullback_sieve(c, sieve, a)
            assign = dict(assign_items)
            new_assign = {g: assign[c.compose(a, g)] for g in pulled.members}
            action[a][el] = classify(s_o, pulled.members, new_assign)

    plus = FinPresheaf(c, values, action)
    unit_components = {}
    for o in c.objects:
        maxs = maximal_sieve(c, o)
        unit_components[o] = {
            x: classify(o, maxs.members, {f: p.action[f][x] for f in maxs.members})
            for x in p.values[o]
        }
    unit = PresheafMorphism(p, plus, unit_components)
    return PlusResult(plus, unit, class_rep)


def plus_map(phi, j, source_plus=None, target_plus=None):
    """Functoriality of the plus construction on a morphism."""
    sp = source_plus or plus_construction(phi.source, j)
    tp = target_plus or plus_construction(phi.target, j)
    c = phi.source.base
    comps = {}
    for o in c.objects:
        comps[o] = {}
        for el in sp.presheaf.values[o]:
            _, members, assign_items = el
            assign = dict(assign_items)
            pushed = {f: phi.components[c.src[f]][assign[f]] for f in members}
            comps[o][el] = tp.class_rep[o][(frozenset(members),
                                            tuple(sorted(pushed.items())))]
    return PresheafMorphism(sp.presheaf, tp.presheaf, comps)


@dataclass
class SheafifyResult:
    sheaf: FinPresheaf
    unit: PresheafMorphism   # P -> P++
    first: PlusResult
    second: PlusResult


def sheafify(p, j):
    """Plus construction applied twice, with the composite unit."""
    first = plus_construction(p, j)
    second = plus_construction(first.presheaf, j)
    unit = compose_morphisms(second.unit, first.unit)
    return SheafifyResult(second.presheaf, unit, first, second)


def sheafify_map(phi, j):
    """The induced morphism between the sheafifications of source and
    target, computed through two plus-construction steps."""
    s1 = plus_construction(phi.source, j)
    t1 = plus_construction(phi.target, j)
    m1 = plus_map(phi, j, s1, t1)
    s2 = plus_construction(s1.presheaf, j)
    t2 = plus_construction(t1.presheaf, j)
    return plus_map(m1, j, s2, t2)


# -- locality tests ----------------------------------------------------


def locality_test(phi, j, mode):
    """Locally-epi / locally-mono / locally-iso test for a presheaf
    morphism against a topology.

    epi: for every object and every target element, the sieve of arrows
    pulling the element into the image is covering.  mono: for every
    identified pair, the sieve of arrows equalizing it is covering.
    """
    if mode not in ("epi", "mono", "iso"):
        raise ValueError(f"unknown mode {mode!r}")
    c = phi.source.base
    if c != j.base:
        raise BaseMismatch("morphism and topology over different bases")
    if mode in ("epi", "iso"):
        for o in c.objects:
            images = {o2: frozenset(phi.components[o2].values()) for o2 in c.objects}
            for y in phi.target.values[o]:
                members = frozenset(
                    f for f in c.arrows_into(o)
                    if phi.target.action[f][y] in images[c.src[f]]
                )
                if not j.is_cover(Sieve(o, members)):
                    rep = failing("locality_epi", {
                        "object": o, "element": ekey(y),
                        "sieve": sorted(members)})
                    return rep if mode == "epi" else failing(
                        "locality_iso", rep.witness, "not locally epi")
    if mode in ("mono", "iso"):
        for o in c.objects:
            vals = phi.source.values[o]
            for i, x in enumerate(vals):
                for x2 in vals[i + 1:]:
                    if phi.components[o][x] != phi.components[o][x2]:
                        continue
                    members = frozenset(
                        f for f in c.arrows_into(o)
                        if phi.source.action[f][x] == phi.source.action[f][x2]
                    )
                    if not j.is_cover(Sieve(o, members)):
                        rep = failing("locality_mono", {
                            "object": o, "elements": [ekey(x), ekey(x2)],
                            "sieve": sorted(members)})
                        return rep if mode == "mono" else failing(
                            "locality_iso", rep.witness, "not locally mono")
    return passing(f"locality_{mode}")


# -- enumeration helpers (used by tests and the audit harness) ---------


def presheaf_morphisms(p, q):
    """All natural transformations P -> Q (exhaustive backtracking)."""
    c = p.base
    objs = sorted(c.objects)
    results = []

    def consistent(comps):
        for a in c.arrows:
            s, t = c.src[a], c.tgt[a]
            if t not in comps or s not in comps:
                continue
            for x in p.values[t]:
                if comps[s][p.action[a][x]] != q.action[a][comps[t][x]]:
                    return False
        return True

    def rec(i, comps):
        if i == len(objs):
            results.append(PresheafMorphism(p, q, {o: dict(m) for o, m in comps.items()}))
            return
        o = objs[i]
        xs = p.values[o]
        for choice in itertools.product(q.values[o], repeat=len(xs)):
            comps[o] = dict(zip(xs, choice))
            if consistent(comps):
                rec(i + 1, comps)
            del comps[o]

    rec(0, {})
    return results


def presheaf_isos(p, q):
    seen = []
    for o in p.base.objects:
        if len(p.values[o]) != len(q.values[o]):
            return []
    for m in presheaf_morphisms(p, q):
        if m.is_pointwise_iso():
            seen.append(m)
    return seen


def presheaves_isomorphic(p, q):
    return bool(presheaf_isos(p, q))
