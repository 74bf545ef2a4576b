"""Finite categories, functors, natural transformations, and the
constructions (comma, slice, category of elements, Grothendieck
construction, free initial object, connected components) the rest of the
package builds on.

Composition convention: ``compose(f, g)`` is f-after-g and is defined
exactly when ``tgt(g) == src(f)``.  Object and arrow identifiers are
opaque strings; equality of arrows is identifier equality.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

from .errors import (
    LawViolation,
    MalformedTable,
    TargetMismatch,
    UnknownObject,
)


def ekey(value):
    """Deterministic total order key for opaque element values.

    Element values are built from strings, ints and tuples only, so repr
    is stable across processes (no set iteration order leaks in).
    """
    return repr(value)


class FinCategory:
    """A finite category given by explicit tables.

    All laws (totality of composition on composable pairs, identity laws,
    associativity) are checked on construction; instances are immutable
    afterwards.
    """

    def __init__(self, objects, arrows, src, tgt, identity, compose):
        self.objects = tuple(sorted(objects))
        self.arrows = tuple(sorted(arrows))
        self.src = dict(src)
        self.tgt = dict(tgt)
        self.identity = dict(identity)
        self.compose_table = dict(compose)
        self._validate_tables()
        self._validate_laws()
        obj = self.objects
        self._into = {o: tuple(a for a in self.arrows if self.tgt[a] == o) for o in obj}
        self._out = {o: tuple(a for a in self.arrows if self.src[a] == o) for o in obj}
        self._hom = {}
        for a in self.arrows:
            self._hom.setdefault((self.src[a], self.tgt[a]), []).append(a)
        self._hom = {k: tuple(v) for k, v in self._hom.items()}
        self._iso_inverse = None
        self._encoded = None

    # -- validation ---------------------------------------------------

    def _validate_tables(self):
        objset, arrset = set(self.objects), set(self.arrows)
        if len(objset) != len(self.objects):
            raise MalformedTable("duplicate object identifiers")
        if len(arrset) != len(self.arrows):
            raise MalformedTable("duplicate arrow identifiers")
        for table, name in ((self.src, "src"), (self.tgt, "tgt")):
            if set(table) != arrset:
                raise MalformedTable(f"{name} map not total on arrows")
            for a, o in table.items():
                if o not in objset:
                    raise MalformedTable(f"{name}({a}) = {o} is not an object")
        if set(self.identity) != objset:
            raise MalformedTable("identity map not total on objects")
        for o, i in self.identity.items():
            if i not in arrset:
                raise MalformedTable(f"identity({o}) = {i} is not an arrow")
            if self.src[i] != o or self.tgt[i] != o:
                raise MalformedTable(f"identity({o}) = {i} has wrong endpoints")
        for (f, g), h in self.compose_table.items():
            if f not in arrset or g not in arrset:
                raise MalformedTable(f"compose entry ({f},{g}) names unknown arrows")
            if self.tgt[g] != self.src[f]:
                raise MalformedTable(f"compose entry ({f},{g}) is not composable")
            if h not in arrset:
                raise MalformedTable(f"compose({f},{g}) = {h} is not an arrow")
            if self.src[h] != self.src[g] or self.tgt[h] != self.tgt[f]:
                raise MalformedTable(f"compose({f},{g}) = {h} has wrong endpoints")
        for f in self.arrows:
            for g in self.arrows:
                if self.tgt[g] == self.src[f] and (f, g) not in self.compose_table:
                    raise MalformedTable(f"missing composite for composable pair ({f},{g})")

    def _validate_laws(self):
        comp = self.compose_table
        for f in self.arrows:
            if comp[(f, self.identity[self.src[f]])] != f:
                raise LawViolation("identity", (f, self.identity[self.src[f]]))
            if comp[(self.identity[self.tgt[f]], f)] != f:
                raise LawViolation("identity", (self.identity[self.tgt[f]], f))
        for f in self.arrows:
            for g in self.arrows:
                if self.tgt[g] != self.src[f]:
                    continue
                fg = comp[(f, g)]
                for h in self.arrows:
                    if self.tgt[h] != self.src[g]:
                        continue
                    if comp[(fg, h)] != comp[(f, comp[(g, h)])]:
                        raise LawViolation("associativity", (f, g, h))

    # -- basic queries ------------------------------------------------

    def compose(self, f, g):
        """f∘g, defined when tgt(g) == src(f)."""
        return self.compose_table[(f, g)]

    def hom(self, a, b):
        return self._hom.get((a, b), ())

    def arrows_into(self, o):
        return self._into[o]

    def arrows_out_of(self, o):
        return self._out[o]

    def is_identity(self, f):
        return self.identity[self.src[f]] == f

    def _inverse_table(self):
        if self._iso_inverse is None:
            inv = {}
            for f in self.arrows:
                a, b = self.src[f], self.tgt[f]
                for g in self.hom(b, a):
                    if (self.compose(f, g) == self.identity[b]
                            and self.compose(g, f) == self.identity[a]):
                        inv[f] = g
                        break
            self._iso_inverse = inv
        return self._iso_inverse

    def is_iso(self, f):
        return f in self._inverse_table()

    def inverse(self, f):
        return self._inverse_table()[f]

    # -- equality -----------------------------------------------------

    def _encode(self):
        if self._encoded is None:
            self._encoded = (
                self.objects,
                self.arrows,
                tuple(sorted(self.src.items())),
                tuple(sorted(self.tgt.items())),
                tuple(sorted(self.identity.items())),
                tuple(sorted(self.compose_table.items())),
            )
        return self._encoded

    def __eq__(self, other):
        if not isinstance(other, FinCategory):
            return NotImplemented
        return self._encode() == other._encode()

    def __hash__(self):
        return hash(self._encode())

    def __repr__(self):
        return (f"FinCategory({len(self.objects)} objects, "
                f"{len(self.arrows)} arrows)")


def validate_category(raw):
    """Build a FinCategory from raw table data.

    `raw` is a mapping with keys objects, arrows, src, tgt, identity,
    compose.  Raises MalformedTable for dangling identifiers or missing
    composites, LawViolation (with law name and witness) for broken
    identity or associativity laws.
    """
    try:
        return FinCategory(
            raw["objects"], raw["arrows"], raw["src"], raw["tgt"],
            raw["identity"], raw["compose"],
        )
    except KeyError as exc:
        raise MalformedTable(f"missing table {exc.args[0]!r}") from None


class FinFunctor:
    """A functor between finite categories; laws checked on construction."""

    def __init__(self, source, target, obj_map, arr_map):
        self.source = source
        self.target = target
        self.obj_map = dict(obj_map)
        self.arr_map = dict(arr_map)
        self._validate()
        self._encoded = None

    def _validate(self):
        src_c, tgt_c = self.source, self.target
        if set(self.obj_map) != set(src_c.objects):
            raise MalformedTable("object map not total")
        if set(self.arr_map) != set(src_c.arrows):
            raise MalformedTable("arrow map not total")
        for o, im in self.obj_map.items():
            if im not in tgt_c.objects:
                raise MalformedTable(f"obj_map({o}) = {im} is not a target object")
        for a, im in self.arr_map.items():
            if im not in tgt_c.arrows:
                raise MalformedTable(f"arr_map({a}) = {im} is not a target arrow")
            if tgt_c.src[im] != self.obj_map[src_c.src[a]]:
                raise LawViolation("functor-src", a)
            if tgt_c.tgt[im] != self.obj_map[src_c.tgt[a]]:
                raise LawViolation("functor-tgt", a)
        for o in src_c.objects:
            if self.arr_map[src_c.identity[o]] != tgt_c.identity[self.obj_map[o]]:
                raise LawViolation("functor-identity", o)
        for (f, g), h in src_c.compose_table.items():
            if tgt_c.compose(self.arr_map[f], self.arr_map[g]) != self.arr_map[h]:
                raise LawViolation("functor-compose", (f, g))

    def on_obj(self, o):
        return self.obj_map[o]

    def on_arr(self, a):
        return self.arr_map[a]

    def _encode(self):
        if self._encoded is None:
            self._encoded = (
                self.source._encode(), self.target._encode(),
                tuple(sorted(self.obj_map.items())),
                tuple(sorted(self.arr_map.items())),
            )
        return self._encoded

    def __eq__(self, other):
        if not isinstance(other, FinFunctor):
            return NotImplemented
        return self._encode() == other._encode()

    def __hash__(self):
        return hash(self._encode())

    def __repr__(self):
        return f"FinFunctor({self.source!r} -> {self.target!r})"


def identity_functor(c):
    return FinFunctor(c, c, {o: o for o in c.objects}, {a: a for a in c.arrows})


def functor_compose(f, g):
    """f∘g: apply g first. Requires g.target == f.source."""
    if g.target != f.source:
        raise TargetMismatch("functors not composable")
    return FinFunctor(
        g.source, f.target,
        {o: f.obj_map[g.obj_map[o]] for o in g.source.objects},
        {a: f.arr_map[g.arr_map[a]] for a in g.source.arrows},
    )


def is_functor_isomorphism(f):
    """True when the functor is bijective on objects and on arrows."""
    return (len(set(f.obj_map.values())) == len(f.target.objects)
            and len(set(f.arr_map.values())) == len(f.target.arrows))


class NatTransform:
    """A natural transformation between parallel functors; each component
    has the right endpoints and every naturality square commutes."""

    def __init__(self, source, target, components):
        if source.source != target.source or source.target != target.target:
            raise TargetMismatch("functors are not parallel")
        self.source = source
        self.target = target
        self.components = dict(components)
        self._validate()

    def _validate(self):
        dom = self.source.source
        cod = self.source.target
        if set(self.components) != set(dom.objects):
            raise MalformedTable("components not total on objects")
        for o, a in self.components.items():
            if a not in cod.arrows:
                raise MalformedTable(f"component at {o} is not an arrow")
            if cod.src[a] != self.source.obj_map[o] or cod.tgt[a] != self.target.obj_map[o]:
                raise LawViolation("component-endpoints", o)
        for m in dom.arrows:
            a, b = dom.src[m], dom.tgt[m]
            left = cod.compose(self.components[b], self.source.arr_map[m])
            right = cod.compose(self.target.arr_map[m], self.components[a])
            if left != right:
                raise LawViolation("naturality", m)

    def is_iso(self):
        cod = self.source.target
        return all(cod.is_iso(a) for a in self.components.values())

    def __eq__(self, other):
        if not isinstance(other, NatTransform):
            return NotImplemented
        return (self.source == other.source and self.target == other.target
                and self.components == other.components)


def identity_nat(f):
    return NatTransform(f, f, {o: f.target.identity[f.obj_map[o]] for o in f.source.objects})


class IndexedCategory:
    """A strict contravariant functor base^op -> Cat given by tables.

    Transport composes on the nose: transport(id) is the identity functor
    and transport(g∘f) = transport(f)∘transport(g).
    """

    def __init__(self, base, fibers, transport):
        self.base = base
        self.fibers = dict(fibers)
        self.transport = dict(transport)
        self._validate()

    def _validate(self):
        if set(self.fibers) != set(self.base.objects):
            raise MalformedTable("fibers not total on base objects")
        if set(self.transport) != set(self.base.arrows):
            raise MalformedTable("transport not total on base arrows")
        for a, fun in self.transport.items():
            if fun.source != self.fibers[self.base.tgt[a]]:
                raise LawViolation("transport-source", a)
            if fun.target != self.fibers[self.base.src[a]]:
                raise LawViolation("transport-target", a)
        for o in self.base.objects:
            if self.transport[self.base.identity[o]] != identity_functor(self.fibers[o]):
                raise LawViolation("transport-identity", o)
        for (f, g), h in self.base.compose_table.items():
            expected = functor_compose(self.transport[g], self.transport[f])
            if self.transport[h] != expected:
                raise LawViolation("transport-compose", (f, g))

    def __eq__(self, other):
        if not isinstance(other, IndexedCategory):
            return NotImplemented
        return (self.base == other.base and self.fibers == other.fibers
                and self.transport == other.transport)


# -- comma categories ------------------------------------------------


@dataclass
class CommaResult:
    category: FinCategory
    proj_left: FinFunctor
    proj_right: FinFunctor
    obj_label: dict          # comma object -> (a, b, u)
    obj_of: dict             # (a, b, u) -> comma object
    arr_label: dict          # comma arrow -> (m, n)


def build_comma(f, g):
    """The comma category (f/g) for functors f, g with a common target.

    Objects are triples (a, b, u: f(a) -> g(b)); arrows are pairs (m, n)
    making the evident square commute.  Returns the category together
    with the two projections.
    """
    if f.target != g.target:
        raise TargetMismatch("comma requires functors with a common target")
    c = f.target
    labels = []
    for a in f.source.objects:
        for b in g.source.objects:
            for u in c.hom(f.obj_map[a], g.obj_map[b]):
                labels.append((a, b, u))
    labels.sort()
    obj_of = {lab: f"x{i}" for i, lab in enumerate(labels)}
    obj_label = {v: k for k, v in obj_of.items()}
    objects = list(obj_of.values())

    arr_entries = []  # (name, srcobj, tgtobj, m, n)
    arr_of = {}
    identity = {}
    counter = itertools.count()
    for (a1, b1, u1) in labels:
        for (a2, b2, u2) in labels:
            for m in f.source.hom(a1, a2):
                for n in g.source.hom(b1, b2):
                    if c.compose(u2, f.arr_map[m]) != c.compose(g.arr_map[n], u1):
                        continue
                    s, t = obj_of[(a1, b1, u1)], obj_of[(a2, b2, u2)]
                    if s == t and f.source.is_identity(m) and g.source.is_identity(n):
                        name = f"id_{s}"
                        identity[s] = name
                    else:
                        name = f"k{next(counter)}"
                    arr_entries.append((name, s, t, m, n))
                    arr_of[(m, n, s, t)] = name

    src = {name: s for name, s, _, _, _ in arr_entries}
    tgt = {name: t for name, _, t, _, _ in arr_entries}
    arr_label = {name: (m, n) for name, _, _, m, n in arr_entries}
    compose = {}
    for n2, s2, t2, m2, w2 in arr_entries:
        for n1, s1, t1, m1, w1 in arr_entries:
            if t1 != s2:
                continue
            mm = f.source.compose(m2, m1)
            nn = g.source.compose(w2, w1)
            compose[(n2, n1)] = arr_of[(mm, nn, s1, t2)]

    cat = FinCategory(objects, src.keys(), src, tgt, identity, compose)
    proj_left = FinFunctor(
        cat, f.source,
        {o: obj_label[o][0] for o in objects},
        {a: arr_label[a][0] for a in cat.arrows},
    )
    proj_right = FinFunctor(
        cat, g.source,
        {o: obj_label[o][1] for o in objects},
        {a: arr_label[a][1] for a in cat.arrows},
    )
    return CommaResult(cat, proj_left, proj_right, obj_label, obj_of, arr_label)


_POINT = FinCategory(("pt",), ("id_pt",), {"id_pt": "pt"}, {"id_pt": "pt"},
                     {"pt": "id_pt"}, {("id_pt", "id_pt"): "id_pt"})


def point_category():
    return _POINT


def constant_functor(c, obj):
    if obj not in c.objects:
        raise UnknownObject(obj)
    return FinFunctor(_POINT, c, {"pt": obj}, {"id_pt": c.identity[obj]})


@dataclass
class SliceResult:
    category: FinCategory
    apex: str                # the object c being sliced over
    base: FinCategory        # the ambient category
    proj: FinFunctor         # slice -> base
    obj_label: dict          # slice object -> (x, u: x -> c)
    obj_of: dict
    arr_label: dict          # slice arrow -> m


def slice_category(c, obj):
    """The slice C/obj, with its projection to C.

    Objects are arrows u: x -> obj, morphisms are commuting triangles.
    """
    if obj not in c.objects:
        raise UnknownObject(obj)
    labels = sorted((c.src[u], u) for u in c.arrows_into(obj))
    obj_of = {lab: f"s{i}" for i, lab in enumerate(labels)}
    obj_label = {v: k for k, v in obj_of.items()}
    objects = list(obj_of.values())
    arr_entries = []
    arr_of = {}
    identity = {}
    counter = itertools.count()
    for (x1, u1) in labels:
        for (x2, u2) in labels:
            for m in c.hom(x1, x2):
                if c.compose(u2, m) != u1:
                    continue
                s, t = obj_of[(x1, u1)], obj_of[(x2, u2)]
                if s == t and c.is_identity(m):
                    name = f"id_{s}"
                    identity[s] = name
                else:
                    name = f"t{next(counter)}"
                arr_entries.append((name, s, t, m))
                arr_of[(m, s, t)] = name
    src = {n: s for n, s, _, _ in arr_entries}
    tgt = {n: t for n, _, t, _ in arr_entries}
    arr_label = {n: m for n, _, _, m in arr_entries}
    compose = {}
    for n2, s2, t2, m2 in arr_entries:
        for n1, s1, t1, m1 in arr_entries:
            if t1 != s2:
                continue
            compose[(n2, n1)] = arr_of[(c.compose(m2, m1), s1, t2)]
    cat = FinCategory(objects, src.keys(), src, tgt, identity, compose)
    proj = FinFunctor(cat, c,
                      {o: obj_label[o][0] for o in objects},
                      {a: arr_label[a] for a in cat.arrows})
    return SliceResult(cat, obj, c, proj, obj_label, obj_of, arr_label)


@dataclass
class ElementsResult:
    category: FinCategory
    proj: FinFunctor
    obj_label: dict          # elements object -> (c, x)
    obj_of: dict
    arr_label: dict          # elements arrow -> base arrow


def category_of_elements(p):
    """The category of elements of a presheaf.

    Objects are pairs (c, x in P(c)); an arrow (c', x') -> (c, x) is a
    base arrow f: c' -> c with P(f)(x) = x'.
    """
    c = p.base
    labels = []
    for o in c.objects:
        for x in p.values[o]:
            labels.append((o, x))
    labels.sort(key=lambda t: (t[0], ekey(t[1])))
    obj_of = {lab: f"e{i}" for i, lab in enumerate(labels)}
    obj_label = {v: k for k, v in obj_of.items()}
    objects = list(obj_of.values())
    arr_entries = []
    arr_of = {}
    identity = {}
    counter = itertools.count()
    for (o2, x2) in labels:
        for f in c.arrows_into(o2):
            o1 = c.src[f]
            x1 = p.action[f][x2]
            s, t = obj_of[(o1, x1)], obj_of[(o2, x2)]
            if c.is_identity(f):
                name = f"id_{t}"
                identity[t] = name
            else:
                name = f"a{next(counter)}"
            arr_entries.append((name, s, t, f))
            arr_of[(f, t)] = name
    src = {n: s for n, s, _, _ in arr_entries}
    tgt = {n: t for n, _, t, _ in arr_entries}
    arr_label = {n: f for n, _, _, f in arr_entries}
    compose = {}
    for n2, s2, t2, f2 in arr_entries:
        for n1, s1, t1, f1 in arr_entries:
            if t1 != s2:
                continue
            compose[(n2, n1)] = arr_of[(c.compose(f2, f1), t2)]
    cat = FinCategory(objects, src.keys(), src, tgt, identity, compose)
    proj = FinFunctor(cat, c,
                      {o: obj_label[o][0] for o in objects},
                      {a: arr_label[a] for a in cat.arrows})
    return ElementsResult(cat, proj, obj_label, obj_of, arr_label)


# -- Grothendieck construction ---------------------------------------


@dataclass
class GrothResult:
    indexed: IndexedCategory
    total: FinCategory
    projection: FinFunctor
    obj_label: dict          # total object -> (fiber object, base object)
    obj_of: dict             # (fiber object, base object) -> total object
    arr_label: dict          # total arrow -> (f, u, x)  with x the target fiber object
    arr_of: dict             # (f, u, x) -> total arrow
    cleavage_lifts: dict     # (base arrow f, total object over tgt f) -> chosen lift

    def vertical_part(self, arrow):
        """The fiber component u of an arrow (f, u)."""
        return self.arr_label[arrow][1]

    def base_part(self, arrow):
        return self.arr_label[arrow][0]

    def is_vertical(self, arrow):
        return self.indexed.base.is_identity(self.base_label_of(arrow))

    def base_label_of(self, arrow):
        return self.arr_label[arrow][0]


def grothendieck_construction(d):
    """Total category of a strict indexed category, with projection and
    the canonical cleavage marking each (f, 1) as the chosen lift."""
    base = d.base
    labels = []
    for c in base.objects:
        for x in d.fibers[c].objects:
            labels.append((x, c))
    labels.sort(key=lambda t: (t[1], t[0]))
    obj_of = {(x, c): f"{x}__{c}" for (x, c) in labels}
    obj_label = {v: k for k, v in obj_of.items()}
    objects = list(obj_of.values())

    arr_entries = []   # (name, srcobj, tgtobj, f, u, x)
    arr_of = {}
    identity = {}
    for f in base.arrows:
        c1, c2 = base.src[f], base.tgt[f]
        fib1 = d.fibers[c1]
        tr = d.transport[f]
        for x in d.fibers[c2].objects:
            dx = tr.obj_map[x]
            for u in fib1.arrows_into(dx):
                s = obj_of[(fib1.src[u], c1)]
                t = obj_of[(x, c2)]
                if base.is_identity(f) and fib1.is_identity(u):
                    name = f"id_{t}"
                    identity[t] = name
                else:
                    name = f"{f}__{u}__{x}"
                arr_entries.append((name, s, t, f, u, x))
                arr_of[(f, u, x)] = name

    src = {n: s for n, s, _, _, _, _ in arr_entries}
    tgt = {n: t for n, _, t, _, _, _ in arr_entries}
    arr_label = {n: (f, u, x) for n, _, _, f, u, x in arr_entries}
    compose = {}
    for n2, s2, t2, f2, u2, x2 in arr_entries:
        for n1, s1, t1, f1, u1, x1 in arr_entries:
            # n2∘n1 = (f2∘f1, D(f1)(u2)∘u1) targeting x2
            if t1 != s2:
                continue
            f = base.compose(f2, f1)
            fib = d.fibers[base.src[f1]]
            u = fib.compose(d.transport[f1].arr_map[u2], u1)
            compose[(n2, n1)] = arr_of[(f, u, x2)]

    total = FinCategory(objects, src.keys(), src, tgt, identity, compose)
    projection = FinFunctor(total, base,
                            {o: obj_label[o][1] for o in objects},
                            {a: arr_label[a][0] for a in total.arrows})
    cleavage = {}
    for f in base.arrows:
        c1, c2 = base.src[f], base.tgt[f]
        for x in d.fibers[c2].objects:
            dx = d.transport[f].obj_map[x]
            lift = arr_of[(f, d.fibers[c1].identity[dx], x)]
            cleavage[(f, obj_of[(x, c2)])] = lift
    return GrothResult(d, total, projection, obj_label, obj_of, arr_label,
                       arr_of, cleavage)


# -- free initial object ---------------------------------------------


@dataclass
class AugmentedResult:
    category: FinCategory
    initial: str
    inclusion: FinFunctor    # original category -> augmented
    bang: dict               # object of original -> unique arrow 0 -> object


def add_free_initial(c):
    """Freely add an initial object: one fresh object, one arrow into
    every existing object, and nothing into the fresh object."""
    zero = "zero"
    while zero in c.objects:
        zero = "_" + zero
    objects = list(c.objects) + [zero]
    arrows = {a: (c.src[a], c.tgt[a]) for a in c.arrows}
    bang = {}
    for o in c.objects:
        name = f"to_{o}"
        while name in c.arrows:
            name = "_" + name
        bang[o] = name
        arrows[name] = (zero, o)
    idz = f"id_{zero}"
    while idz in c.arrows:
        idz = "_" + idz
    arrows[idz] = (zero, zero)
    src = {a: st[0] for a, st in arrows.items()}
    tgt = {a: st[1] for a, st in arrows.items()}
    identity = dict(c.identity)
    identity[zero] = idz
    compose = dict(c.compose_table)
    compose[(idz, idz)] = idz
    for o, b in bang.items():
        compose[(b, idz)] = b
        compose[(c.identity[o], b)] = b
        for f in c.arrows_out_of(o):
            compose[(f, b)] = bang[c.tgt[f]]
    cat = FinCategory(objects, arrows.keys(), src, tgt, identity, compose)
    incl = FinFunctor(c, cat, {o: o for o in c.objects}, {a: a for a in c.arrows})
    return AugmentedResult(cat, zero, incl, bang)


def connected_components(c):
    """Zig-zag equivalence classes of objects (undirected reachability)."""
    parent = {o: o for o in c.objects}

    def find(o):
        while parent[o] != o:
            parent[o] = parent[parent[o]]
            o = parent[o]
        return o

    for a in c.arrows:
        r1, r2 = find(c.src[a]), find(c.tgt[a])
        if r1 != r2:
            parent[max(r1, r2)] = min(r1, r2)
    classes = {}
    for o in c.objects:
        classes.setdefault(find(o), set()).add(o)
    return tuple(sorted((frozenset(v) for v in classes.values()),
                        key=lambda s: sorted(s)))


# -- isomorphism search ----------------------------------------------


def _object_profile(c, o):
    return (len(c.arrows_into(o)), len(c.arrows_out_of(o)), len(c.hom(o, o)))


def category_isomorphism(c1, c2):
    """An isomorphism (object bijection, arrow bijection) between two
    finite categories, or None.  Exhaustive search with degree pruning;
    instances are tiny by contract."""
    if (len(c1.objects) != len(c2.objects) or len(c1.arrows) != len(c2.arrows)):
        return None
    prof2 = {}
    for o in c2.objects:
        prof2.setdefault(_object_profile(c2, o), []).append(o)

    objs1 = list(c1.objects)

    def extend_objects(i, omap, used):
        if i == len(objs1):
            yield dict(omap)
            return
        o = objs1[i]
        for cand in prof2.get(_object_profile(c1, o), ()):
            if cand in used:
                continue
            omap[o] = cand
            used.add(cand)
            yield from extend_objects(i + 1, omap, used)
            used.discard(cand)
            del omap[o]

    arrs1 = list(c1.arrows)

    def extend_arrows(omap):
        def rec(i, amap, used):
            if i == len(arrs1):
                # functor laws: identities and composition
                for o in c1.objects:
                    if amap[c1.identity[o]] != c2.identity[omap[o]]:
                        return
                for (f, g), h in c1.compose_table.items():
                    if c2.compose(amap[f], amap[g]) != amap[h]:
                        return
                yield dict(amap)
                return
            a = arrs1[i]
            for cand in c2.hom(omap[c1.src[a]], omap[c1.tgt[a]]):
                if cand in used:
                    continue
                amap[a] = cand
                used.add(cand)
                yield from rec(i + 1, amap, used)
                used.discard(cand)
                del amap[a]

        yield from rec(0, {}, set())

    for omap in extend_objects(0, {}, set()):
        for amap in extend_arrows(omap):
            return omap, amap
    return None
