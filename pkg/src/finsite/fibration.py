"""Classical fibration theory on finite data: cartesian arrows and lifts,
fibration and cartesian-fibration checks, vertical-cartesian
factorization, morphisms of fibrations, and the canonical comparison
cells measuring failure to preserve cartesian arrows.

Street generality throughout: a lift of f at d is a cartesian arrow m
into d together with an iso sigma with p(m) = f∘sigma; split cleavages
are the special case sigma = id.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

from .errors import LawViolation, NotAFibration, SearchExhausted
from .fincat import FinCategory, FinFunctor, NatTransform, functor_compose
from .report import CheckReport, failing, passing


def _lift_candidates(p, f, g, h):
    """Arrows h' with p(h') = h and f∘h' = g (f, g into a common target)."""
    d_cat = p.source
    out = []
    for h2 in d_cat.hom(d_cat.src[g], d_cat.src[f]):
        if p.arr_map[h2] == h and d_cat.compose(f, h2) == g:
            out.append(h2)
    return out


def is_cartesian(p, f):
    """Unique-lifting check: for every g into tgt(f) and base arrow h
    with p(f)∘h = p(g), exactly one h' satisfies p(h') = h, f∘h' = g."""
    d_cat, c_cat = p.source, p.target
    d = d_cat.tgt[f]
    for d2 in d_cat.objects:
        for g in d_cat.hom(d2, d):
            for h in c_cat.hom(p.obj_map[d2], p.obj_map[d_cat.src[f]]):
                if c_cat.compose(p.arr_map[f], h) != p.arr_map[g]:
                    continue
                lifts = _lift_candidates(p, f, g, h)
                if len(lifts) != 1:
                    return failing("is_cartesian", {
                        "arrow": f, "from": d2, "g": g, "h": h,
                        "reason": "no lift" if not lifts else "non-unique lift",
                        "lifts": lifts})
    return passing("is_cartesian", {"arrow": f})


def _ordered_arrows(c, arrows):
    """Identities first, then lexicographic: keeps chosen lifts of
    identity arrows equal to identities."""
    return sorted(arrows, key=lambda a: (0 if c.is_identity(a) else 1, a))


def cartesian_lift(p, f, d):
    """Deterministically chosen cartesian lift of the base arrow f at the
    object d over tgt(f): a pair (m, sigma) with m cartesian into d,
    sigma iso, and p(m) = f∘sigma.  None when no lift exists."""
    d_cat, c_cat = p.source, p.target
    if p.obj_map[d] != c_cat.tgt[f]:
        raise LawViolation("lift-target", (f, d))
    for m in _ordered_arrows(d_cat, d_cat.arrows_into(d)):
        src_im = p.obj_map[d_cat.src[m]]
        for sigma in _ordered_arrows(c_cat, c_cat.hom(src_im, c_cat.src[f])):
            if not c_cat.is_iso(sigma):
                continue
            if c_cat.compose(f, sigma) != p.arr_map[m]:
                continue
            if is_cartesian(p, m):
                return m, sigma
    return None


@dataclass
class Cleavage:
    """Chosen cartesian lifts: (base arrow, object over its target) ->
    (cartesian arrow, iso witness sigma)."""

    fibration: FinFunctor
    lifts: dict

    def verify(self):
        p = self.fibration
        c_cat = p.target
        for (f, d), (m, sigma) in self.lifts.items():
            if p.source.tgt[m] != d:
                return failing("cleavage", {"lift": (f, d), "reason": "target"})
            if not c_cat.is_iso(sigma):
                return failing("cleavage", {"lift": (f, d), "reason": "sigma not iso"})
            if c_cat.compose(f, sigma) != p.arr_map[m]:
                return failing("cleavage", {"lift": (f, d), "reason": "projection"})
            if not is_cartesian(p, m):
                return failing("cleavage", {"lift": (f, d), "reason": "not cartesian"})
        return passing("cleavage")


@dataclass
class FibrationReport:
    report: CheckReport
    cleavage: Cleavage | None

    def __bool__(self):
        return self.report.passed


def is_fibration(p):
    """Pass with a full deterministic cleavage, or the first (f, d) pair
    admitting no cartesian lift."""
    d_cat, c_cat = p.source, p.target
    lifts = {}
    for d in d_cat.objects:
        for f in c_cat.arrows_into(p.obj_map[d]):
            found = cartesian_lift(p, f, d)
            if found is None:
                return FibrationReport(
                    failing("is_fibration", {"base_arrow": f, "object": d}),
                    None)
            lifts[(f, d)] = found
    return FibrationReport(passing("is_fibration"), Cleavage(p, lifts))


def cleavage_from_groth(groth):
    """The canonical split cleavage of a Grothendieck construction: the
    chosen lift of f at (x, c) is (f, 1)."""
    p = groth.projection
    base = groth.indexed.base
    lifts = {}
    for (f, d), m in groth.cleavage_lifts.items():
        lifts[(f, d)] = (m, base.identity[base.src[f]])
    return Cleavage(p, lifts)


def unique_lift(p, cart, g, h):
    """The unique h' with p(h') = h and cart∘h' = g, for cart cartesian.
    Raises SearchExhausted if uniqueness fails (internal inconsistency)."""
    lifts = _lift_candidates(p, cart, g, h)
    if len(lifts) != 1:
        raise SearchExhausted(f"expected unique lift, found {lifts}")
    return lifts[0]


def factorize_vertical_cartesian(p, cleavage, g):
    """g = (chosen cartesian lift of p(g)) ∘ (vertical part); the
    vertical part projects to the inverse of the cleavage iso."""
    d_cat, c_cat = p.source, p.target
    d = d_cat.tgt[g]
    m, sigma = cleavage.lifts[(p.arr_map[g], d)]
    v = unique_lift(p, m, g, c_cat.inverse(sigma))
    return v, m


def is_morphism_of_fibrations(p, p2, a, witness):
    """witness must be a natural iso p2∘A ≅ p; pass iff every cartesian
    arrow maps to a cartesian arrow."""
    expected = functor_compose(p2, a)
    if witness.source != expected or witness.target != p:
        raise LawViolation("witness-endpoints", "p2∘A and p expected")
    if not witness.is_iso():
        return failing("is_morphism_of_fibrations", {
            "reason": "witness is not an isomorphism"})
    for f in p.source.arrows:
        if is_cartesian(p, f) and not is_cartesian(p2, a.arr_map[f]):
            return failing("is_morphism_of_fibrations", {
                "arrow": f, "image": a.arr_map[f],
                "reason": "image not cartesian"})
    return passing("is_morphism_of_fibrations")


@dataclass
class ComparisonCell:
    """The comparison cell at (f, x): the vertical part of the image of
    the chosen cartesian lift of f at x, measuring failure of A to be a
    morphism of fibrations at that lift."""

    functor: FinFunctor
    base_arrow: str
    fiber_object: str
    cell: str                # arrow of the target total category
    source_lift: str         # chosen lift m of f at x
    image: str               # A(m)
    target_lift: str         # chosen lift n in the target fibration


def comparison_cell(p, p2, a, witness, f, x, cleavage_src, cleavage_tgt):
    """Factor A(chosen lift of f at x) through the chosen target lift;
    the comparison cell is the unique connecting arrow, vertical up to
    the witness isos."""
    c_cat = p.target
    m, sigma = cleavage_src.lifts[(f, x)]
    xf = p.source.src[m]
    am = a.arr_map[m]
    ax = a.obj_map[x]
    phi_x = witness.components[x]
    phi_xf = witness.components[xf]
    f2 = c_cat.compose(c_cat.inverse(phi_x), f)
    n, tau = cleavage_tgt.lifts[(f2, ax)]
    h = c_cat.compose(c_cat.inverse(tau), c_cat.compose(sigma, phi_xf))
    v = unique_lift(p2, n, am, h)
    return ComparisonCell(a, f, x, v, m, am, n)


def transport_vertical(p, cleavage, f, u):
    """Transport a vertical arrow u (over tgt f) along f using the
    cleavage: the unique vertical filler between the chosen lifts."""
    d_cat, c_cat = p.source, p.target
    y, y2 = d_cat.src[u], d_cat.tgt[u]
    n_y, s_y = cleavage.lifts[(f, y)]
    n_y2, s_y2 = cleavage.lifts[(f, y2)]
    h = c_cat.compose(c_cat.inverse(s_y2), s_y)
    return unique_lift(p, n_y2, d_cat.compose(u, n_y), h)


# -- finite limits ------------------------------------------------------


def terminal_objects(c):
    return tuple(o for o in c.objects
                 if all(len(c.hom(x, o)) == 1 for x in c.objects))


def pullback_cone(c, f, g):
    """A chosen pullback cone (apex, pr1, pr2) of the cospan (f, g), or
    None.  Universality is checked by exhaustive cone enumeration."""
    if c.tgt[f] != c.tgt[g]:
        raise LawViolation("cospan", (f, g))
    a, b = c.src[f], c.src[g]
    cones = []
    for w in c.objects:
        for p1 in c.hom(w, a):
            for p2 in c.hom(w, b):
                if c.compose(f, p1) == c.compose(g, p2):
                    cones.append((w, p1, p2))
    for (w, p1, p2) in cones:
        universal = True
        for (w2, q1, q2) in cones:
            mediating = [m for m in c.hom(w2, w)
                         if c.compose(p1, m) == q1 and c.compose(p2, m) == q2]
            if len(mediating) != 1:
                universal = False
                break
        if universal:
            return (w, p1, p2)
    return None


def has_finite_limits(c):
    """Terminal object plus all binary pullbacks (equivalent to all
    finite limits)."""
    if not terminal_objects(c):
        return failing("has_finite_limits", {"missing": "terminal object"})
    for f in c.arrows:
        for g in c.arrows:
            if c.tgt[f] != c.tgt[g]:
                continue
            if pullback_cone(c, f, g) is None:
                return failing("has_finite_limits", {
                    "missing": "pullback", "cospan": [f, g]})
    return passing("has_finite_limits")


def _is_pullback_cone(c, f, g, w, p1, p2):
    if c.compose(f, p1) != c.compose(g, p2):
        return False
    for w2 in c.objects:
        for q1 in c.hom(w2, c.src[f]):
            for q2 in c.hom(w2, c.src[g]):
                if c.compose(f, q1) != c.compose(g, q2):
                    continue
                mediating = [m for m in c.hom(w2, w)
                             if c.compose(p1, m) == q1 and c.compose(p2, m) == q2]
                if len(mediating) != 1:
                    return False
    return True


def is_cartesian_fibration(p):
    """The total category has finite limits and the projection preserves
    the terminal object and all binary pullbacks."""
    d_cat, c_cat = p.source, p.target
    lims = has_finite_limits(d_cat)
    if not lims:
        return failing("is_cartesian_fibration", lims.witness)
    terms = terminal_objects(d_cat)
    base_terms = terminal_objects(c_cat)
    if p.obj_map[terms[0]] not in base_terms:
        return failing("is_cartesian_fibration", {
            "reason": "terminal not preserved", "object": terms[0]})
    for f in d_cat.arrows:
        for g in d_cat.arrows:
            if d_cat.tgt[f] != d_cat.tgt[g]:
                continue
            w, p1, p2 = pullback_cone(d_cat, f, g)
            if not _is_pullback_cone(c_cat, p.arr_map[f], p.arr_map[g],
                                     p.obj_map[w], p.arr_map[p1], p.arr_map[p2]):
                return failing("is_cartesian_fibration", {
                    "reason": "pullback not preserved", "cospan": [f, g]})
    return passing("is_cartesian_fibration")
