"""Line-oriented text format for categories, topologies, functors,
indexed categories, sites, and check requests.

Grammar sketch (entries separated by newlines or ';', comments with #):

    category NAME { objects: a, b
                    arrow f: a -> b
                    compose f . g = h }
    topology NAME on CAT { trivial | maximal | canonical
                           | giraud of FUNCTOR over TOPOLOGY
                           | cover OBJ with { f, g } ... }
    functor NAME : SRC -> TGT { obj a -> x
                                arr f -> g }
    indexed NAME over CAT { fiber c = FIBCAT
                            transport f = FUNCTOR }
    site NAME { functor p
                source K
                target J }
    check KIND TARGET key=value ...

Identity arrows are synthesized with names id_<object>; compose entries
involving identities are synthesized from the identity laws, and missing
composites are filled only when uniquely derivable by associativity from
the given ones (anything else is an error: silent guessing would hide
modeling mistakes).  Parsing is total: errors are collected as
diagnostics with source spans and the surviving blocks are returned.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import FinSiteError, LawViolation, MalformedTable
from .fincat import FinCategory, FinFunctor, IndexedCategory, functor_compose, identity_functor
from .report import CheckReport, failing, passing
from .sites import (
    GrothendieckTopology,
    SitedFunctor,
    canonical_topology,
    giraud_topology,
    is_topology,
    maximal_topology,
    sieve_closure,
    trivial_topology,
)

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_TOKEN = re.compile(r"->|[A-Za-z_][A-Za-z0-9_]*|[{}():;,.=]|\S")


@dataclass(frozen=True)
class Diagnostic:
    line: int                # 1-based
    col: int                 # 1-based
    code: str                # SyntaxError | UnresolvedReference | SemanticError
    message: str

    def __str__(self):
        return f"{self.line}:{self.col}: {self.code}: {self.message}"


@dataclass
class Declaration:
    kind: str
    name: str
    payload: object
    span: tuple              # (line, col)
    meta: dict = field(default_factory=dict, compare=False)

    def __eq__(self, other):
        if not isinstance(other, Declaration):
            return NotImplemented
        return (self.kind == other.kind and self.name == other.name
                and self.payload == other.payload)


@dataclass
class SiteDecl:
    functor_name: str
    source_name: str
    target_name: str
    sited: SitedFunctor = field(compare=False, default=None)

    def __eq__(self, other):
        if not isinstance(other, SiteDecl):
            return NotImplemented
        return ((self.functor_name, self.source_name, self.target_name)
                == (other.functor_name, other.source_name, other.target_name))


@dataclass(frozen=True)
class CheckDecl:
    check: str
    target: str
    args: tuple              # sorted (key, value) pairs


@dataclass
class Document:
    declarations: list

    def find(self, kind, name):
        for d in self.declarations:
            if d.kind == kind and d.name == name:
                return d
        return None

    def payload(self, kind, name):
        d = self.find(kind, name)
        return d.payload if d else None

    def __eq__(self, other):
        if not isinstance(other, Document):
            return NotImplemented
        return self.declarations == other.declarations


@dataclass
class ParseResult:
    document: Document
    diagnostics: list

    @property
    def ok(self):
        return not self.diagnostics


class _Tokens:
    def __init__(self, text):
        self.items = []      # (value, line, col)
        for ln, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0]
            for m in _TOKEN.finditer(line):
                self.items.append((m.group(), ln, m.start() + 1))
            self.items.append(("\n", ln, len(line) + 1))
        self.pos = 0

    def peek(self):
        return self.items[self.pos] if self.pos < len(self.items) else (None, -1, -1)

    def next(self):
        tok = self.peek()
        if tok[0] is not None:
            self.pos += 1
        return tok

    def skip_newlines(self):
        while self.peek()[0] in ("\n", ";"):
            self.next()

    def at_end(self):
        self.skip_newlines()
        return self.peek()[0] is None


class _ParseError(Exception):
    def __init__(self, line, col, message):
        self.diag = Diagnostic(line, col, "SyntaxError", message)


_KEYWORDS = ("category", "topology", "functor", "indexed", "site", "check")


class _Parser:
    def __init__(self, text):
        self.toks = _Tokens(text)
        self.diagnostics = []
        self.decls = []
        self.check_count = 0

    # -- token helpers

    def expect(self, value):
        tok, ln, col = self.toks.next()
        if tok != value:
            raise _ParseError(ln, col, f"expected {value!r}, found {tok!r}")
        return tok, ln, col

    def ident(self, what="identifier", allow_keywords=False):
        tok, ln, col = self.toks.next()
        if tok is None or not _IDENT.fullmatch(tok) or (
                tok in _KEYWORDS and not allow_keywords):
            raise _ParseError(ln, col, f"expected {what}, found {tok!r}")
        return tok, ln, col

    def sep(self):
        tok, ln, col = self.toks.peek()
        if tok in ("\n", ";"):
            self.toks.skip_newlines()
            return
        if tok == "}":
            return
        raise _ParseError(ln, col, f"expected end of entry, found {tok!r}")

    def recover(self):
        """Skip to after the next top-level '}' or to the next keyword."""
        depth = 0
        while True:
            tok, _, _ = self.toks.peek()
            if tok is None:
                return
            if tok == "{":
                depth += 1
            elif tok == "}":
                self.toks.next()
                if depth <= 1:
                    return
                depth -= 1
                continue
            elif tok in _KEYWORDS and depth == 0:
                return
            self.toks.next()

    def error(self, diag):
        self.diagnostics.append(diag)

    def semantic(self, ln, col, message, code="SemanticError"):
        self.error(Diagnostic(ln, col, code, message))

    # -- reference resolution

    def lookup(self, kind, name, ln, col):
        for d in self.decls:
            if d.kind == kind and d.name == name:
                return d
        self.semantic(ln, col, f"unknown {kind} {name!r}", "UnresolvedReference")
        return None

    # -- top level

    def run(self):
        while not self.toks.at_end():
            tok, ln, col = self.toks.peek()
            try:
                if tok == "category":
                    self.parse_category()
                elif tok == "topology":
                    self.parse_topology()
                elif tok == "functor":
                    self.parse_functor()
                elif tok == "indexed":
                    self.parse_indexed()
                elif tok == "site":
                    self.parse_site()
                elif tok == "check":
                    self.parse_check()
                else:
                    self.toks.next()
                    raise _ParseError(ln, col, f"expected a declaration, found {tok!r}")
            except _ParseError as exc:
                self.error(exc.diag)
                self.recover()
        return ParseResult(Document(self.decls), self.diagnostics)

    def unique_name(self, kind, name, ln, col):
        if any(d.kind == kind and d.name == name for d in self.decls):
            self.semantic(ln, col, f"duplicate {kind} name {name!r}")
            return False
        return True

    # -- category

    def parse_category(self):
        _, ln0, col0 = self.expect("category")
        name, lnn, coln = self.ident("category name")
        self.expect("{")
        self.toks.skip_newlines()
        objects = []
        arrows = {}          # name -> (src, tgt, line, col)
        compose = {}         # (f, g) -> h
        entry_spans = {}
        while True:
            tok, ln, col = self.toks.peek()
            if tok == "}":
                self.toks.next()
                break
            if tok is None:
                raise _ParseError(ln, col, "unterminated category block")
            if tok == "objects":
                self.toks.next()
                self.expect(":")
                while True:
                    o, _, _ = self.ident("object")
                    objects.append(o)
                    if self.toks.peek()[0] == ",":
                        self.toks.next()
                    else:
                        break
                self.sep()
            elif tok == "arrow":
                self.toks.next()
                a, la, ca = self.ident("arrow name")
                self.expect(":")
                s, _, _ = self.ident("source object")
                self.expect("->")
                t, _, _ = self.ident("target object")
                arrows[a] = (s, t)
                entry_spans[a] = (la, ca)
                self.sep()
            elif tok == "compose":
                self.toks.next()
                f, lf, cf = self.ident("arrow")
                self.expect(".")
                g, _, _ = self.ident("arrow")
                self.expect("=")
                h, _, _ = self.ident("arrow")
                compose[(f, g)] = h
                entry_spans[(f, g)] = (lf, cf)
                self.sep()
            else:
                self.toks.next()
                raise _ParseError(ln, col, f"unexpected token {tok!r} in category block")
        if not self.unique_name("category", name, lnn, coln):
            return
        payload = self._build_category(objects, arrows, compose,
                                       entry_spans, (ln0, col0))
        if payload is not None:
            self.decls.append(Declaration("category", name, payload, (ln0, col0)))

    def _build_category(self, objects, arrows, compose, spans, span0):
        ln0, col0 = span0
        objset = set(objects)
        identity = {}
        for o in objects:
            ident = f"id_{o}"
            if ident in arrows:
                if arrows[ident] != (o, o):
                    self.semantic(*spans.get(ident, span0),
                                  message=f"arrow {ident} must be {o} -> {o}")
                    return None
            else:
                arrows = {**arrows, ident: (o, o)}
            identity[o] = ident
        src = {a: st[0] for a, st in arrows.items()}
        tgt = {a: st[1] for a, st in arrows.items()}
        for a, (s, t) in arrows.items():
            for o in (s, t):
                if o not in objset:
                    self.semantic(*spans.get(a, span0),
                                  message=f"arrow {a} references unknown object {o!r}",
                                  code="UnresolvedReference")
                    return None
        for (f, g), h in compose.items():
            for a in (f, g, h):
                if a not in arrows:
                    self.semantic(*spans.get((f, g), span0),
                                  message=f"compose entry references unknown arrow {a!r}",
                                  code="UnresolvedReference")
                    return None
        table = dict(compose)
        # identity laws
        for a, (s, t) in arrows.items():
            for key, val in (((a, identity[s]), a), ((identity[t], a), a)):
                if table.get(key, val) != val:
                    self.semantic(*spans.get(key, span0),
                                  message=f"compose {key[0]} . {key[1]} must be {val}")
                    return None
                table[key] = val
        # associativity-derived composites, to a fixpoint
        changed = True
        while changed:
            changed = False
            for f in arrows:
                for g in arrows:
                    if tgt[g] != src[f] or (f, g) not in table:
                        continue
                    fg = table[(f, g)]
                    for h in arrows:
                        if tgt[h] != src[g]:
                            continue
                        gh = table.get((g, h))
                        left = table.get((fg, h))
                        right = table.get((f, gh)) if gh is not None else None
                        if gh is not None and left is not None and right is None:
                            table[(f, gh)] = left
                            changed = True
                        elif gh is not None and right is not None and left is None:
                            table[(fg, h)] = right
                            changed = True
        missing = [
            (f, g) for f in arrows for g in arrows
            if tgt[g] == src[f] and (f, g) not in table
        ]
        if missing:
            f, g = sorted(missing)[0]
            self.semantic(ln0, col0,
                          f"missing composite {f} . {g} (not derivable)")
            return None
        try:
            return FinCategory(objects, arrows.keys(), src, tgt, identity, table)
        except (MalformedTable, LawViolation) as exc:
            self.semantic(ln0, col0, str(exc))
            return None

    # -- topology

    def parse_topology(self):
        _, ln0, col0 = self.expect("topology")
        name, lnn, coln = self.ident("topology name")
        self.expect("on")
        catname, lc, cc = self.ident("category name")
        self.expect("{")
        self.toks.skip_newlines()
        cat_decl = self.lookup("category", catname, lc, cc)
        clauses = []
        while True:
            tok, ln, col = self.toks.peek()
            if tok == "}":
                self.toks.next()
                break
            if tok is None:
                raise _ParseError(ln, col, "unterminated topology block")
            if tok in ("trivial", "maximal", "canonical"):
                self.toks.next()
                clauses.append((tok,))
                self.sep()
            elif tok == "giraud":
                self.toks.next()
                self.expect("of")
                fname, lf, cf = self.ident("functor name")
                self.expect("over")
                tname, lt, ct = self.ident("topology name")
                clauses.append(("giraud", (fname, lf, cf), (tname, lt, ct)))
                self.sep()
            elif tok == "cover":
                self.toks.next()
                obj, lob, cob = self.ident("object")
                self.expect("with")
                self.expect("{")
                members = []
                while True:
                    t2, l2, c2 = self.toks.peek()
                    if t2 == "}":
                        self.toks.next()
                        break
                    a, _, _ = self.ident("arrow")
                    members.append(a)
                    if self.toks.peek()[0] == ",":
                        self.toks.next()
                clauses.append(("cover", obj, members, (lob, cob)))
                self.sep()
            else:
                self.toks.next()
                raise _ParseError(ln, col, f"unexpected token {tok!r} in topology block")
        if not self.unique_name("topology", name, lnn, coln):
            return
        if cat_decl is None:
            return
        payload = self._build_topology(cat_decl.payload, clauses, (ln0, col0))
        if payload is not None:
            self.decls.append(Declaration(
                "topology", name, payload, (ln0, col0), {"base_name": catname}))

    def _build_topology(self, cat, clauses, span0):
        ln0, col0 = span0
        directives = [c for c in clauses if c[0] != "cover"]
        covers = [c for c in clauses if c[0] == "cover"]
        if directives and covers:
            self.semantic(ln0, col0, "cannot mix cover entries with a directive")
            return None
        if len(directives) > 1:
            self.semantic(ln0, col0, "at most one topology directive allowed")
            return None
        if directives:
            d = directives[0]
            if d[0] == "trivial":
                return trivial_topology(cat)
            if d[0] == "maximal":
                return maximal_topology(cat)
            if d[0] == "canonical":
                return canonical_topology(cat)
            fname, lf, cf = d[1]
            tname, lt, ct = d[2]
            f_decl = self.lookup("functor", fname, lf, cf)
            t_decl = self.lookup("topology", tname, lt, ct)
            if f_decl is None or t_decl is None:
                return None
            functor = f_decl.payload
            over = t_decl.payload
            if functor.source != cat:
                self.semantic(lf, cf,
                              f"giraud functor {fname!r} is not based on this category")
                return None
            if over.base != functor.target:
                self.semantic(lt, ct,
                              f"topology {tname!r} is not on the functor target")
                return None
            try:
                return giraud_topology(functor, over)
            except FinSiteError as exc:
                self.semantic(lf, cf, f"giraud: {exc}")
                return None
        sieve_sets = {}
        for (_, obj, members, (lob, cob)) in covers:
            if obj not in cat.objects:
                self.semantic(lob, cob, f"unknown object {obj!r}",
                              "UnresolvedReference")
                return None
            for a in members:
                if a not in cat.arrows:
                    self.semantic(lob, cob, f"unknown arrow {a!r}",
                                  "UnresolvedReference")
                    return None
                if cat.tgt[a] != obj:
                    self.semantic(lob, cob, f"arrow {a!r} does not target {obj!r}")
                    return None
            sieve_sets.setdefault(obj, set()).add(
                sieve_closure(cat, obj, members))
        return GrothendieckTopology(cat, sieve_sets)

    # -- functor

    def parse_functor(self):
        _, ln0, col0 = self.expect("functor")
        name, lnn, coln = self.ident("functor name")
        self.expect(":")
        sname, ls, cs = self.ident("source category")
        self.expect("->")
        tname, lt, ct = self.ident("target category")
        self.expect("{")
        self.toks.skip_newlines()
        src_decl = self.lookup("category", sname, ls, cs)
        tgt_decl = self.lookup("category", tname, lt, ct)
        obj_map = {}
        arr_map = {}
        while True:
            tok, ln, col = self.toks.peek()
            if tok == "}":
                self.toks.next()
                break
            if tok is None:
                raise _ParseError(ln, col, "unterminated functor block")
            if tok == "obj":
                self.toks.next()
                a, _, _ = self.ident("object")
                self.expect("->")
                b, _, _ = self.ident("object")
                obj_map[a] = b
                self.sep()
            elif tok == "arr":
                self.toks.next()
                a, _, _ = self.ident("arrow")
                self.expect("->")
                b, _, _ = self.ident("arrow")
                arr_map[a] = b
                self.sep()
            else:
                self.toks.next()
                raise _ParseError(ln, col, f"unexpected token {tok!r} in functor block")
        if not self.unique_name("functor", name, lnn, coln):
            return
        if src_decl is None or tgt_decl is None:
            return
        src_cat, tgt_cat = src_decl.payload, tgt_decl.payload
        for o in src_cat.objects:
            ia = src_cat.identity[o]
            if ia not in arr_map and o in obj_map:
                arr_map[ia] = tgt_cat.identity[obj_map[o]]
        try:
            payload = FinFunctor(src_cat, tgt_cat, obj_map, arr_map)
        except (MalformedTable, LawViolation) as exc:
            self.semantic(ln0, col0, f"functor {name!r}: {exc}")
            return
        self.decls.append(Declaration(
            "functor", name, payload, (ln0, col0),
            {"source_name": sname, "target_name": tname}))

    # -- indexed

    def parse_indexed(self):
        _, ln0, col0 = self.expect("indexed")
        name, lnn, coln = self.ident("indexed name")
        self.expect("over")
        bname, lb, cb = self.ident("base category")
        self.expect("{")
        self.toks.skip_newlines()
        base_decl = self.lookup("category", bname, lb, cb)
        fibers = {}
        fiber_names = {}
        transports = {}
        transport_names = {}
        while True:
            tok, ln, col = self.toks.peek()
            if tok == "}":
                self.toks.next()
                break
            if tok is None:
                raise _ParseError(ln, col, "unterminated indexed block")
            if tok == "fiber":
                self.toks.next()
                o, _, _ = self.ident("object")
                self.expect("=")
                cname, lc, cc = self.ident("category name")
                d = self.lookup("category", cname, lc, cc)
                if d is not None:
                    fibers[o] = d.payload
                    fiber_names[o] = cname
                self.sep()
            elif tok == "transport":
                self.toks.next()
                a, _, _ = self.ident("arrow")
                self.expect("=")
                fname, lf, cf = self.ident("functor name")
                d = self.lookup("functor", fname, lf, cf)
                if d is not None:
                    transports[a] = d.payload
                    transport_names[a] = fname
                self.sep()
            else:
                self.toks.next()
                raise _ParseError(ln, col, f"unexpected token {tok!r} in indexed block")
        if not self.unique_name("indexed", name, lnn, coln):
            return
        if base_decl is None:
            return
        base = base_decl.payload
        for o in base.objects:
            ia = base.identity[o]
            if ia not in transports and o in fibers:
                transports[ia] = identity_functor(fibers[o])
        try:
            payload = IndexedCategory(base, fibers, transports)
        except (MalformedTable, LawViolation) as exc:
            self.semantic(ln0, col0, f"indexed {name!r}: {exc}")
            return
        self.decls.append(Declaration(
            "indexed", name, payload, (ln0, col0),
            {"base_name": bname, "fiber_names": fiber_names,
             "transport_names": transport_names}))

    # -- site

    def parse_site(self):
        _, ln0, col0 = self.expect("site")
        name, lnn, coln = self.ident("site name")
        self.expect("{")
        self.toks.skip_newlines()
        refs = {}
        spans = {}
        while True:
            tok, ln, col = self.toks.peek()
            if tok == "}":
                self.toks.next()
                break
            if tok is None:
                raise _ParseError(ln, col, "unterminated site block")
            if tok in ("functor", "source", "target"):
                self.toks.next()
                v, lv, cv = self.ident("name")
                refs[tok] = v
                spans[tok] = (lv, cv)
                self.sep()
            else:
                self.toks.next()
                raise _ParseError(ln, col, f"unexpected token {tok!r} in site block")
        if not self.unique_name("site", name, lnn, coln):
            return
        missing = [k for k in ("functor", "source", "target") if k not in refs]
        if missing:
            self.semantic(ln0, col0, f"site {name!r} is missing {missing}")
            return
        f_decl = self.lookup("functor", refs["functor"], *spans["functor"])
        s_decl = self.lookup("topology", refs["source"], *spans["source"])
        t_decl = self.lookup("topology", refs["target"], *spans["target"])
        if None in (f_decl, s_decl, t_decl):
            return
        try:
            sited = SitedFunctor(f_decl.payload, s_decl.payload, t_decl.payload)
        except FinSiteError as exc:
            self.semantic(ln0, col0, f"site {name!r}: {exc}")
            return
        payload = SiteDecl(refs["functor"], refs["source"], refs["target"], sited)
        self.decls.append(Declaration("site", name, payload, (ln0, col0)))

    # -- check

    def parse_check(self):
        _, ln0, col0 = self.expect("check")
        kind, _, _ = self.ident("check kind", allow_keywords=True)
        target, _, _ = self.ident("check target")
        args = {}
        while True:
            tok, ln, col = self.toks.peek()
            if tok in ("\n", ";", None):
                self.toks.skip_newlines()
                break
            key, lk, ck = self.ident("argument name")
            self.expect("=")
            val, _, _ = self.ident("argument value")
            if key in args:
                self.semantic(lk, ck, f"duplicate argument {key!r}")
            args[key] = val
        name = f"check_{self.check_count:02d}"
        self.check_count += 1
        self.decls.append(Declaration(
            "check", name, CheckDecl(kind, target, tuple(sorted(args.items()))),
            (ln0, col0)))


def parse(text):
    """Parse a document; diagnostics are collected, never raised."""
    return _Parser(text).run()


# -- serialization -------------------------------------------------------


def _category_lines(name, cat):
    lines = [f"category {name} {{"]
    lines.append("  objects: " + ", ".join(cat.objects))
    for a in cat.arrows:
        if cat.is_identity(a) and a == f"id_{cat.src[a]}":
            continue
        lines.append(f"  arrow {a}: {cat.src[a]} -> {cat.tgt[a]}")
    for (f, g) in sorted(cat.compose_table):
        if cat.is_identity(f) or cat.is_identity(g):
            continue
        lines.append(f"  compose {f} . {g} = {cat.compose_table[(f, g)]}")
    lines.append("}")
    return lines


def _name_of(doc, kind, payload):
    for d in doc.declarations:
        if d.kind == kind and d.payload == payload:
            return d.name
    raise MalformedTable(f"document has no {kind} block for {payload!r}")


def _check_identity_names(cat):
    for o in cat.objects:
        if cat.identity[o] != f"id_{o}":
            raise MalformedTable(
                f"identity of {o} must be named id_{o} to serialize")


def serialize(doc):
    """Canonical form: blocks sorted by (kind, name), entries sorted, one
    entry per line; parse∘serialize is the identity on canonical
    documents."""
    out = []
    order = {"category": 0, "topology": 1, "functor": 2, "indexed": 3,
             "site": 4, "check": 5}
    for d in sorted(doc.declarations, key=lambda d: (order[d.kind], d.name)):
        if d.kind == "category":
            _check_identity_names(d.payload)
            out.extend(_category_lines(d.name, d.payload))
        elif d.kind == "topology":
            base_name = _name_of(doc, "category", d.payload.base)
            out.append(f"topology {d.name} on {base_name} {{")
            for o in d.payload.base.objects:
                for s in d.payload.covering(o):
                    inner = ", ".join(sorted(s.members))
                    inner = f" {inner} " if inner else " "
                    out.append(f"  cover {o} with {{{inner}}}")
            out.append("}")
        elif d.kind == "functor":
            f = d.payload
            sname = _name_of(doc, "category", f.source)
            tname = _name_of(doc, "category", f.target)
            _check_identity_names(f.source)
            out.append(f"functor {d.name} : {sname} -> {tname} {{")
            for o in f.source.objects:
                out.append(f"  obj {o} -> {f.obj_map[o]}")
            for a in f.source.arrows:
                if f.source.is_identity(a):
                    continue
                out.append(f"  arr {a} -> {f.arr_map[a]}")
            out.append("}")
        elif d.kind == "indexed":
            ic = d.payload
            bname = _name_of(doc, "category", ic.base)
            out.append(f"indexed {d.name} over {bname} {{")
            for o in ic.base.objects:
                out.append(f"  fiber {o} = "
                           + _name_of(doc, "category", ic.fibers[o]))
            for a in ic.base.arrows:
                if ic.base.is_identity(a):
                    continue
                out.append(f"  transport {a} = "
                           + _name_of(doc, "functor", ic.transport[a]))
            out.append("}")
        elif d.kind == "site":
            s = d.payload
            out.append(f"site {d.name} {{")
            out.append(f"  functor {s.functor_name}")
            out.append(f"  source {s.source_name}")
            out.append(f"  target {s.target_name}")
            out.append("}")
        elif d.kind == "check":
            c = d.payload
            parts = [f"check {c.check} {c.target}"]
            parts.extend(f"{k}={v}" for k, v in c.args)
            out.append(" ".join(parts))
    return "\n".join(out) + "\n"


def validate(doc_or_text):
    """Run the structural law checks on every block and aggregate the
    reports; parse diagnostics surface as failed reports with spans."""
    reports = []
    if isinstance(doc_or_text, str):
        result = parse(doc_or_text)
        for diag in result.diagnostics:
            reports.append(failing(
                "parse", {"line": diag.line, "col": diag.col, "code": diag.code},
                diag.message))
        doc = result.document
    else:
        doc = doc_or_text
    for d in doc.declarations:
        if d.kind == "category":
            reports.append(passing("validate_category", {"name": d.name}))
        elif d.kind == "topology":
            verdict = is_topology(d.payload)
            witness = {"name": d.name, **verdict.witness}
            reports.append(CheckReport("is_topology", verdict.passed, witness,
                                       verdict.details))
        elif d.kind == "functor":
            reports.append(passing("functor_laws", {"name": d.name}))
        elif d.kind == "indexed":
            reports.append(passing("indexed_strictness", {"name": d.name}))
        elif d.kind == "site":
            reports.append(passing("site_references", {"name": d.name}))
    return reports
