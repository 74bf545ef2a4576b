"""Named fixture categories used throughout the tests and docs.

ONE (one object), ARR (a -> b), PAIR (a => b parallel), TRI (a -> b -> c
with composite), DISC2 (two objects, identities only), GD1 (discrete
two-point fibers over ARR) and GD1V (GD1 with one vertical non-iso arrow
added to the fiber over a).
"""
from __future__ import annotations

from .fincat import FinCategory, FinFunctor, IndexedCategory, grothendieck_construction


def one():
    return FinCategory(
        ["star"], ["id_star"], {"id_star": "star"}, {"id_star": "star"},
        {"star": "id_star"}, {("id_star", "id_star"): "id_star"},
    )


def empty():
    return FinCategory([], [], {}, {}, {}, {})


def arr():
    return FinCategory(
        ["a", "b"], ["id_a", "id_b", "f"],
        {"id_a": "a", "id_b": "b", "f": "a"},
        {"id_a": "a", "id_b": "b", "f": "b"},
        {"a": "id_a", "b": "id_b"},
        {
            ("id_a", "id_a"): "id_a", ("id_b", "id_b"): "id_b",
            ("f", "id_a"): "f", ("id_b", "f"): "f",
        },
    )


def pair():
    return FinCategory(
        ["a", "b"], ["id_a", "id_b", "f", "g"],
        {"id_a": "a", "id_b": "b", "f": "a", "g": "a"},
        {"id_a": "a", "id_b": "b", "f": "b", "g": "b"},
        {"a": "id_a", "b": "id_b"},
        {
            ("id_a", "id_a"): "id_a", ("id_b", "id_b"): "id_b",
            ("f", "id_a"): "f", ("id_b", "f"): "f",
            ("g", "id_a"): "g", ("id_b", "g"): "g",
        },
    )


def tri():
    return FinCategory(
        ["a", "b", "c"], ["id_a", "id_b", "id_c", "f", "g", "gf"],
        {"id_a": "a", "id_b": "b", "id_c": "c", "f": "a", "g": "b", "gf": "a"},
        {"id_a": "a", "id_b": "b", "id_c": "c", "f": "b", "g": "c", "gf": "c"},
        {"a": "id_a", "b": "id_b", "c": "id_c"},
        {
            ("id_a", "id_a"): "id_a", ("id_b", "id_b"): "id_b",
            ("id_c", "id_c"): "id_c",
            ("f", "id_a"): "f", ("id_b", "f"): "f",
            ("g", "id_b"): "g", ("id_c", "g"): "g",
            ("gf", "id_a"): "gf", ("id_c", "gf"): "gf",
            ("g", "f"): "gf",
        },
    )


def disc2():
    return FinCategory(
        ["a", "b"], ["id_a", "id_b"],
        {"id_a": "a", "id_b": "b"}, {"id_a": "a", "id_b": "b"},
        {"a": "id_a", "b": "id_b"},
        {("id_a", "id_a"): "id_a", ("id_b", "id_b"): "id_b"},
    )


def _discrete(names):
    ids = {o: f"id_{o}" for o in names}
    return FinCategory(
        names, ids.values(), {i: o for o, i in ids.items()},
        {i: o for o, i in ids.items()}, ids,
        {(i, i): i for i in ids.values()},
    )


def gd1_indexed():
    """Base ARR; fibers D(b) = {x, y} discrete, D(a) = {xp, yp} discrete;
    transport along f sends x to xp and y to yp."""
    base = arr()
    fib_b = _discrete(["x", "y"])
    fib_a = _discrete(["xp", "yp"])
    tr_f = FinFunctor(fib_b, fib_a, {"x": "xp", "y": "yp"},
                      {"id_x": "id_xp", "id_y": "id_yp"})
    return IndexedCategory(
        base, {"a": fib_a, "b": fib_b},
        {"id_a": _idf(fib_a), "id_b": _idf(fib_b), "f": tr_f},
    )


def gd1():
    return grothendieck_construction(gd1_indexed())


def gd1v_indexed():
    """GD1 with a vertical non-iso u: xp -> yp added to the fiber over a."""
    base = arr()
    fib_b = _discrete(["x", "y"])
    fib_a = FinCategory(
        ["xp", "yp"], ["id_xp", "id_yp", "u"],
        {"id_xp": "xp", "id_yp": "yp", "u": "xp"},
        {"id_xp": "xp", "id_yp": "yp", "u": "yp"},
        {"xp": "id_xp", "yp": "id_yp"},
        {
            ("id_xp", "id_xp"): "id_xp", ("id_yp", "id_yp"): "id_yp",
            ("u", "id_xp"): "u", ("id_yp", "u"): "u",
        },
    )
    tr_f = FinFunctor(fib_b, fib_a, {"x": "xp", "y": "yp"},
                      {"id_x": "id_xp", "id_y": "id_yp"})
    return IndexedCategory(
        base, {"a": fib_a, "b": fib_b},
        {"id_a": _idf(fib_a), "id_b": _idf(fib_b), "f": tr_f},
    )


def gd1v():
    return grothendieck_construction(gd1v_indexed())


def _idf(c):
    return FinFunctor(c, c, {o: o for o in c.objects}, {a: a for a in c.arrows})
