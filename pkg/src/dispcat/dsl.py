"""Line-oriented declaration language: parser, elaborator and emitter.

A source is a sequence of blocks ``<kind> <header> ... end`` and one-line
derived declarations ``<kind> <name> = <construction> <args>``.  Every
reference must point to an earlier declaration.  ``#`` starts a comment.
"""
from __future__ import annotations

import dataclasses
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, NamedTuple

from . import displayed as dsp
from . import fibrations as fib
from .compcat import CwA
from .core import (
    FinCat,
    FunctorData,
    Morph,
    NatTransData,
    Presheaf,
    compose_functors,
    identity_functor,
    opposite,
    product,
    representable,
    terminal_functor,
)
from .errors import (
    DispCatError,
    DuplicateName,
    IncompleteTable,
    MalformedInput,
    ParseError,
    UnknownTarget,
    UnresolvedReference,
)
from .limits import STANDARD_SHAPES, Cone, Diagram, Graph
from .univalence import StandardStructure

ID_RE = re.compile(r"[A-Za-z0-9_|.]+")
TOKEN_RE = re.compile(r"->|=>|[:=]|[A-Za-z0-9_|.]+|\S")

KINDS = ("category", "display", "functor", "nattrans", "presheaf", "graph", "diagram", "cone",
         "structure", "cwa")


@dataclass(frozen=True)
class Span:
    file: str
    line: int
    col: int

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.col}"


class Tok(NamedTuple):
    text: str
    span: Span


@dataclass
class Workspace:
    categories: dict[str, FinCat] = field(default_factory=dict)
    displays: dict[str, dsp.DispCat] = field(default_factory=dict)
    functors: dict[str, FunctorData] = field(default_factory=dict)
    nattrans: dict[str, NatTransData] = field(default_factory=dict)
    presheaves: dict[str, Presheaf] = field(default_factory=dict)
    graphs: dict[str, Graph] = field(default_factory=dict)
    diagrams: dict[str, Diagram] = field(default_factory=dict)
    cones: dict[str, tuple[str, Cone]] = field(default_factory=dict)
    structures: dict[str, StandardStructure] = field(default_factory=dict)
    cwas: dict[str, CwA] = field(default_factory=dict)
    spans: dict[tuple[str, str], Span] = field(default_factory=dict)
    order: list[tuple[str, str]] = field(default_factory=list)

    def table(self, kind: str) -> dict:
        return {"category": self.categories, "display": self.displays, "functor": self.functors,
                "nattrans": self.nattrans, "presheaf": self.presheaves, "graph": self.graphs,
                "diagram": self.diagrams, "cone": self.cones, "structure": self.structures,
                "cwa": self.cwas}[kind]

    def get(self, kind: str, name: str):
        t = self.table(kind)
        if name not in t:
            raise UnknownTarget(f"no {kind} named {name!r}")
        return t[name]

    def add(self, kind: str, name: str, value, span: Span) -> None:
        t = self.table(kind)
        if name in t:
            raise DuplicateName(f"{kind} {name!r} already declared at {self.spans[kind, name]}", span)
        t[name] = value
        self.spans[kind, name] = span
        self.order.append((kind, name))

    def category_name(self, c: FinCat) -> str | None:
        for n, v in self.categories.items():
            if v == c:
                return n
        return None


# ----------------------------------------------------------------------------
# lexing

def _lines(text: str, filename: str) -> list[list[Tok]]:
    out = []
    for n, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0]
        toks = [Tok(m.group(), Span(filename, n, m.start() + 1)) for m in TOKEN_RE.finditer(body)]
        if toks:
            out.append(toks)
    return out


def _match(toks: list[Tok], pattern: str) -> list:
    """Match tokens against a pattern of literals, ``ID`` and a trailing ``IDS*``/``IDS+``."""
    parts = pattern.split()
    caps: list = []
    i = 0
    for p in parts:
        if p in ("IDS*", "IDS+"):
            rest = toks[i:]
            for t in rest:
                if not ID_RE.fullmatch(t.text):
                    raise ParseError(f"expected an identifier, found {t.text!r}", t.span)
            if p == "IDS+" and not rest:
                at = toks[-1].span
                raise ParseError(f"expected at least one identifier after {toks[-1].text!r}", at)
            caps.append(rest)
            return caps
        if i >= len(toks):
            raise ParseError(f"line ends early; expected {p!r} (form: {pattern})", toks[-1].span)
        t = toks[i]
        if p == "ID":
            if not ID_RE.fullmatch(t.text):
                raise ParseError(f"expected an identifier, found {t.text!r}", t.span)
            caps.append(t)
        elif t.text != p:
            raise ParseError(f"expected {p!r}, found {t.text!r} (form: {pattern})", t.span)
        i += 1
    if i != len(toks):
        raise ParseError(f"unexpected {toks[i].text!r} (form: {pattern})", toks[i].span)
    return caps


def _optional_over(toks: list[Tok], n: int) -> tuple[list[Tok], list[Tok]]:
    """Split an optional trailing ``over a b ...`` qualifier with ``n`` identifiers."""
    if len(toks) >= n + 1 and toks[-(n + 1)].text == "over":
        return toks[:-(n + 1)], toks[-n:]
    return toks, []


# ----------------------------------------------------------------------------
# elaboration

class _Elaborator:
    def __init__(self, ws: Workspace):
        self.ws = ws

    # -- references --------------------------------------------------------
    def ref(self, kind: str, tok: Tok):
        t = self.ws.table(kind)
        if tok.text not in t:
            raise UnresolvedReference(f"unknown {kind} {tok.text!r}", tok.span)
        return t[tok.text]

    def ref_cat_or_display(self, tok: Tok) -> FinCat:
        if tok.text in self.ws.categories:
            return self.ws.categories[tok.text]
        if tok.text in self.ws.displays:
            return self.ws.displays[tok.text].total.category
        raise UnresolvedReference(f"unknown category or display {tok.text!r}", tok.span)

    @staticmethod
    def obj(c: FinCat, tok: Tok) -> str:
        if tok.text not in c:
            raise UnresolvedReference(f"unknown object {tok.text!r} of {c.name}", tok.span)
        return tok.text

    @staticmethod
    def mor(c: FinCat, tok: Tok) -> Morph:
        if tok.text not in c._mor:
            raise UnresolvedReference(f"unknown morphism {tok.text!r} of {c.name}", tok.span)
        return c._mor[tok.text]

    # -- dispatch ------------------------------------------------------------
    def run(self, lines: list[list[Tok]]) -> None:
        i = 0
        while i < len(lines):
            head = lines[i]
            kind = head[0].text
            if kind not in KINDS:
                raise ParseError(f"expected a declaration ({', '.join(KINDS)}), found {kind!r}", head[0].span)
            if len(head) > 2 and head[2].text == "=":
                self.derived(kind, head)
                i += 1
                continue
            j = i + 1
            while j < len(lines) and not (len(lines[j]) == 1 and lines[j][0].text == "end"):
                if lines[j][0].text in KINDS:
                    raise ParseError(f"block opened at {head[0].span} is missing 'end'", lines[j][0].span)
                j += 1
            if j == len(lines):
                raise ParseError(f"block {kind} is missing 'end'", head[0].span)
            getattr(self, f"block_{kind}")(head, lines[i + 1:j])
            i = j + 1

    # -- category ------------------------------------------------------------
    def block_category(self, head, body) -> None:
        (name,) = _match(head, "category ID")
        objects: list[str] = []
        seen_obj: set[str] = set()
        mors: dict[str, Morph] = {}
        ident: dict[str, str] = {}
        comp_lines: list[tuple[Tok, Tok, Tok]] = []
        for toks in body:
            key = toks[0].text
            if key == "obj":
                (ids,) = _match(toks, "obj IDS+")
                for t in ids:
                    if t.text in seen_obj:
                        raise DuplicateName(f"object {t.text!r} declared twice", t.span)
                    seen_obj.add(t.text)
                    objects.append(t.text)
            elif key == "mor":
                f, a, b = _match(toks, "mor ID : ID -> ID")
                for o in (a, b):
                    if o.text not in seen_obj:
                        raise UnresolvedReference(f"unknown object {o.text!r}", o.span)
                if f.text in mors:
                    raise DuplicateName(f"morphism {f.text!r} declared twice", f.span)
                mors[f.text] = Morph(f.text, a.text, b.text)
            elif key == "ident":
                o, m = _match(toks, "ident ID = ID")
                if o.text not in seen_obj:
                    raise UnresolvedReference(f"unknown object {o.text!r}", o.span)
                if m.text not in mors:
                    raise UnresolvedReference(f"unknown morphism {m.text!r}", m.span)
                ident[o.text] = m.text
            elif key == "comp":
                comp_lines.append(tuple(_match(toks, "comp ID ID = ID")))
            else:
                raise ParseError(f"unexpected {key!r} in category block", toks[0].span)
        identity = {}
        for o in objects:
            if o in ident:
                identity[o] = ident[o]
            else:
                i = f"id_{o}"
                if i in mors:
                    raise DuplicateName(f"morphism {i!r} clashes with the implicit identity of {o}", name.span)
                identity[o] = i
        all_mors = [Morph(identity[o], o, o) for o in objects if o not in ident] + list(mors.values())
        ids = set(identity.values())
        known = {m.id: m for m in all_mors}
        comp: dict[tuple[str, str], str] = {}
        for f, g, h in comp_lines:
            for t in (f, g, h):
                if t.text not in known:
                    raise UnresolvedReference(f"comp refers to unknown morphism {t.text!r}", t.span)
            if (f.text, g.text) in comp:
                raise DuplicateName(f"composite of ({f.text}, {g.text}) given twice", f.span)
            if f.text in ids or g.text in ids:
                unit = g.text if f.text in ids else f.text
                if h.text == unit:
                    continue
            comp[f.text, g.text] = h.text
        for f in all_mors:
            if f.id in ids:
                continue
            for g in all_mors:
                if g.id not in ids and g.src == f.dst and (f.id, g.id) not in comp:
                    raise IncompleteTable(f"category {name.text}: missing comp entry for ({f.id}, {g.id})",
                                          name.span)
        c = FinCat(tuple(objects), tuple(all_mors), identity, comp, name.text)
        self.ws.add("category", name.text, c, name.span)

    # -- display -------------------------------------------------------------
    def block_display(self, head, body) -> None:
        name, base_tok = _match(head, "display ID over ID")
        B: FinCat = self.ref("category", base_tok)
        fibres: dict[str, list[str]] = {c: [] for c in B.objects}
        fams: dict[tuple[str, str, str], list[str]] = {}
        where: dict[tuple[str, str], tuple[str, str]] = {}
        dids: dict[tuple[str, str], str] = {}
        did_lines = []
        comp_lines = []
        for toks in body:
            key = toks[0].text
            if key == "dobj":
                c, ids = _match(toks, "dobj ID : IDS*")
                self.obj(B, c)
                for t in ids:
                    if t.text in fibres[c.text]:
                        raise DuplicateName(f"displayed object {t.text!r} over {c.text} declared twice", t.span)
                    fibres[c.text].append(t.text)
            elif key == "dmor":
                e, x, y, f = _match(toks, "dmor ID : ID -> ID over ID")
                m = self.mor(B, f)
                for o, c in ((x, m.src), (y, m.dst)):
                    if o.text not in fibres[c]:
                        raise UnresolvedReference(f"{o.text!r} is not a displayed object over {c}", o.span)
                if (m.id, e.text) in where:
                    raise DuplicateName(f"displayed morphism {e.text!r} over {m.id} declared twice", e.span)
                where[m.id, e.text] = (x.text, y.text)
                fams.setdefault((m.id, x.text, y.text), []).append(e.text)
            elif key == "did":
                main, over = _optional_over(toks, 1)
                x, e = _match(main, "did ID = ID")
                did_lines.append((x, e, over[0] if over else None))
            elif key == "dcomp":
                main, over = _optional_over(toks, 2)
                e1, e2, h = _match(main, "dcomp ID ID = ID")
                comp_lines.append((e1, e2, h, over))
            else:
                raise ParseError(f"unexpected {key!r} in display block", toks[0].span)

        def locate(tok: Tok, f: Tok | None) -> tuple[str, str]:
            if f is not None:
                self.mor(B, f)
                if (f.text, tok.text) not in where:
                    raise UnresolvedReference(f"no displayed morphism {tok.text!r} over {f.text}", tok.span)
                return f.text, tok.text
            hits = [k for k in where if k[1] == tok.text]
            if not hits:
                raise UnresolvedReference(f"unknown displayed morphism {tok.text!r}", tok.span)
            if len(hits) > 1:
                raise ParseError(f"{tok.text!r} lies over several base morphisms; add 'over f g'", tok.span)
            return hits[0]

        for x, e, c_tok in did_lines:
            if c_tok is not None:
                c = self.obj(B, c_tok)
                if x.text not in fibres[c]:
                    raise UnresolvedReference(f"{x.text!r} is not a displayed object over {c}", x.span)
            else:
                cs = [c for c in B.objects if x.text in fibres[c]]
                if not cs:
                    raise UnresolvedReference(f"unknown displayed object {x.text!r}", x.span)
                if len(cs) > 1:
                    raise ParseError(f"{x.text!r} lies over several objects; add 'over c'", x.span)
                c = cs[0]
            if (c, x.text) in dids:
                raise DuplicateName(f"displayed identity of {x.text} over {c} given twice", x.span)
            i = B.identity[c]
            if (i, e.text) not in where or where[i, e.text] != (x.text, x.text):
                raise MalformedInput(f"{e}: {e.text!r} is not a displayed morphism {x.text} -> {x.text} over {i}")
            dids[c, x.text] = e.text
        for c in B.objects:
            for x in fibres[c]:
                if (c, x) not in dids:
                    i = B.identity[c]
                    fam = fams.get((i, x, x), [])
                    if not fam and (i, f"id_{x}") not in where:
                        # no identity declared at all: create id_<x>
                        fam = fams[i, x, x] = [f"id_{x}"]
                        where[i, f"id_{x}"] = (x, x)
                    if len(fam) != 1:
                        raise IncompleteTable(f"display {name.text}: no 'did' for {x} over {c} and the identity "
                                              f"family has {len(fam)} elements", name.span)
                    dids[c, x] = fam[0]
        did_set = {(B.identity[c], e) for (c, _), e in dids.items()}
        table: dict[tuple[str, str, str, str], str] = {}
        for e1, e2, h, over in comp_lines:
            k1 = locate(e1, over[0] if over else None)
            k2 = locate(e2, over[1] if over else None)
            key = k1 + k2
            if key in table:
                raise DuplicateName(f"displayed composite of ({e1.text}, {e2.text}) given twice", e1.span)
            table[key] = h.text
        out: dict[tuple[str, str], list[tuple[str, str]]] = {}
        for (f, e), (x, y) in where.items():
            out.setdefault((B.src(f), x), []).append((f, e))
        for (f, e), (x, y) in where.items():
            for g, e2 in out.get((B.dst(f), y), ()):
                key = (f, e, g, e2)
                if key in table:
                    continue
                if (g, e2) in did_set:
                    table[key] = e
                elif (f, e) in did_set:
                    table[key] = e2
                else:
                    raise IncompleteTable(f"display {name.text}: missing dcomp entry for ({e} over {f}, "
                                          f"{e2} over {g})", name.span)
        d = dsp.DispCat(B, {c: tuple(v) for c, v in fibres.items()},
                        {k: tuple(v) for k, v in fams.items()}, dids, table, name.text)
        self.ws.add("display", name.text, d, name.span)

    # -- functor and natural transformation ---------------------------------
    def block_functor(self, head, body) -> None:
        name, a, b = _match(head, "functor ID : ID -> ID")
        C, D = self.ref("category", a), self.ref("category", b)
        on_obj: dict[str, str] = {}
        on_mor: dict[str, str] = {}
        for toks in body:
            key = toks[0].text
            if key == "fobj":
                x, y = _match(toks, "fobj ID = ID")
                self.obj(C, x), self.obj(D, y)
                if x.text in on_obj:
                    raise DuplicateName(f"image of {x.text!r} given twice", x.span)
                on_obj[x.text] = y.text
            elif key == "fmor":
                f, g = _match(toks, "fmor ID = ID")
                self.mor(C, f), self.mor(D, g)
                if f.text in on_mor:
                    raise DuplicateName(f"image of {f.text!r} given twice", f.span)
                on_mor[f.text] = g.text
            else:
                raise ParseError(f"unexpected {key!r} in functor block", toks[0].span)
        for o in C.objects:
            if o not in on_obj:
                raise IncompleteTable(f"functor {name.text}: no image for object {o}", name.span)
            on_mor.setdefault(C.identity[o], D.identity.get(on_obj[o], ""))
        for m in C.morphisms:
            if m.id not in on_mor:
                raise IncompleteTable(f"functor {name.text}: no image for morphism {m.id}", name.span)
        self.ws.add("functor", name.text, FunctorData(C, D, on_obj, on_mor, name.text), name.span)

    def block_nattrans(self, head, body) -> None:
        name, f, g = _match(head, "nattrans ID : ID => ID")
        F, G = self.ref("functor", f), self.ref("functor", g)
        comps = {}
        for toks in body:
            c, m = _match(toks, "at ID = ID")
            self.obj(F.dom, c), self.mor(F.cod, m)
            if c.text in comps:
                raise DuplicateName(f"component at {c.text!r} given twice", c.span)
            comps[c.text] = m.text
        for o in F.dom.objects:
            if o not in comps:
                raise IncompleteTable(f"nattrans {name.text}: no component at {o}", name.span)
        self.ws.add("nattrans", name.text, NatTransData(F, G, comps, name.text), name.span)

    # -- presheaf --------------------------------------------------------------
    def block_presheaf(self, head, body) -> None:
        name, base = _match(head, "presheaf ID on ID")
        C = self.ref("category", base)
        sets: dict[str, list[str]] = {c: [] for c in C.objects}
        acts: dict[str, dict[str, str]] = {}
        for toks in body:
            key = toks[0].text
            if key == "pobj":
                c, ids = _match(toks, "pobj ID : IDS*")
                self.obj(C, c)
                for t in ids:
                    if t.text in sets[c.text]:
                        raise DuplicateName(f"element {t.text!r} over {c.text} declared twice", t.span)
                    sets[c.text].append(t.text)
            elif key == "pmor":
                f, e, e2 = _match(toks, "pmor ID : ID -> ID")
                m = self.mor(C, f)
                if e.text not in sets[m.dst]:
                    raise UnresolvedReference(f"{e.text!r} is not an element over {m.dst}", e.span)
                if e2.text not in sets[m.src]:
                    raise UnresolvedReference(f"{e2.text!r} is not an element over {m.src}", e2.span)
                act = acts.setdefault(m.id, {})
                if e.text in act:
                    raise DuplicateName(f"action of {m.id} on {e.text} given twice", e.span)
                act[e.text] = e2.text
            else:
                raise ParseError(f"unexpected {key!r} in presheaf block", toks[0].span)
        for m in C.morphisms:
            if C.is_identity(m.id):
                continue
            for e in sets[m.dst]:
                if e not in acts.get(m.id, {}):
                    raise IncompleteTable(f"presheaf {name.text}: no action of {m.id} on {e}", name.span)
        p = Presheaf.build(C, sets, acts, name.text)
        self.ws.add("presheaf", name.text, p, name.span)

    # -- graphs, diagrams, cones ---------------------------------------------
    def block_graph(self, head, body) -> None:
        (name,) = _match(head, "graph ID")
        nodes: list[str] = []
        edges = []
        for toks in body:
            key = toks[0].text
            if key == "node":
                (ids,) = _match(toks, "node IDS+")
                for t in ids:
                    if t.text in nodes:
                        raise DuplicateName(f"node {t.text!r} declared twice", t.span)
                    nodes.append(t.text)
            elif key == "edge":
                e, a, b = _match(toks, "edge ID : ID -> ID")
                for t in (a, b):
                    if t.text not in nodes:
                        raise UnresolvedReference(f"unknown node {t.text!r}", t.span)
                if any(e.text == x for x, _, _ in edges):
                    raise DuplicateName(f"edge {e.text!r} declared twice", e.span)
                edges.append((e.text, a.text, b.text))
            else:
                raise ParseError(f"unexpected {key!r} in graph block", toks[0].span)
        self.ws.add("graph", name.text, Graph(tuple(nodes), tuple(edges), name.text), name.span)

    def block_diagram(self, head, body) -> None:
        name, g, x = _match(head, "diagram ID : ID in ID")
        G = self.ref("graph", g)
        C = self.ref_cat_or_display(x)
        on_node, on_edge = {}, {}
        for toks in body:
            key = toks[0].text
            if key == "node":
                j, o = _match(toks, "node ID = ID")
                if j.text not in G.nodes:
                    raise UnresolvedReference(f"unknown node {j.text!r}", j.span)
                on_node[j.text] = self.obj(C, o)
            elif key == "edge":
                e, m = _match(toks, "edge ID = ID")
                if e.text not in {k for k, _, _ in G.edges}:
                    raise UnresolvedReference(f"unknown edge {e.text!r}", e.span)
                on_edge[e.text] = self.mor(C, m).id
            else:
                raise ParseError(f"unexpected {key!r} in diagram block", toks[0].span)
        for j in G.nodes:
            if j not in on_node:
                raise IncompleteTable(f"diagram {name.text}: node {j} is not assigned", name.span)
        for e, _, _ in G.edges:
            if e not in on_edge:
                raise IncompleteTable(f"diagram {name.text}: edge {e} is not assigned", name.span)
        dgm = Diagram(G, C, on_node, on_edge, name.text)
        try:
            dgm.check()
        except MalformedInput as exc:
            raise ParseError(str(exc), name.span) from None
        self.ws.add("diagram", name.text, dgm, name.span)

    def block_cone(self, head, body) -> None:
        name, dt = _match(head, "cone ID on ID")
        dgm = self.ref("diagram", dt)
        C = dgm.target
        vertex = None
        legs = {}
        for toks in body:
            key = toks[0].text
            if key == "vertex":
                (v,) = _match(toks, "vertex ID")
                vertex = self.obj(C, v)
            elif key == "leg":
                j, m = _match(toks, "leg ID = ID")
                if j.text not in dgm.shape.nodes:
                    raise UnresolvedReference(f"unknown node {j.text!r}", j.span)
                legs[j.text] = self.mor(C, m).id
            else:
                raise ParseError(f"unexpected {key!r} in cone block", toks[0].span)
        if vertex is None:
            raise IncompleteTable(f"cone {name.text} has no vertex", name.span)
        for j in dgm.shape.nodes:
            if j not in legs:
                raise IncompleteTable(f"cone {name.text}: no leg at {j}", name.span)
        self.ws.add("cone", name.text, (dt.text, Cone(vertex, legs)), name.span)

    # -- structures and CwAs -------------------------------------------------
    def block_structure(self, head, body) -> None:
        name, base = _match(head, "structure ID on ID")
        C = self.ref("category", base)
        P: dict[str, list[str]] = {c: [] for c in C.objects}
        rows = set()
        for toks in body:
            key = toks[0].text
            if key == "struct":
                c, ids = _match(toks, "struct ID : IDS*")
                self.obj(C, c)
                for t in ids:
                    if t.text in P[c.text]:
                        raise DuplicateName(f"structure {t.text!r} over {c.text} declared twice", t.span)
                    P[c.text].append(t.text)
            elif key == "hom":
                f, a, b = _match(toks, "hom ID : ID -> ID")
                m = self.mor(C, f)
                if a.text not in P[m.src]:
                    raise UnresolvedReference(f"{a.text!r} is not a structure over {m.src}", a.span)
                if b.text not in P[m.dst]:
                    raise UnresolvedReference(f"{b.text!r} is not a structure over {m.dst}", b.span)
                rows.add((m.id, a.text, b.text))
            else:
                raise ParseError(f"unexpected {key!r} in structure block", toks[0].span)
        s = StandardStructure.from_table(C, P, rows, name.text)
        self.ws.add("structure", name.text, s, name.span)

    def block_cwa(self, head, body) -> None:
        name, base, ty = _match(head, "cwa ID on ID with ID")
        C = self.ref("category", base)
        Ty = self.ref("presheaf", ty)
        if Ty.base != C:
            raise ParseError(f"presheaf {ty.text} is not over {base.text}", ty.span)
        ext, proj, q = {}, {}, {}
        for toks in body:
            key = toks[0].text
            if key == "ext":
                g, a, o = _match(toks, "ext ID ID = ID")
                self._type(C, Ty, g, a)
                ext[g.text, a.text] = self.obj(C, o)
            elif key == "proj":
                g, a, m = _match(toks, "proj ID ID = ID")
                self._type(C, Ty, g, a)
                proj[g.text, a.text] = self.mor(C, m).id
            elif key == "q":
                f, a, m = _match(toks, "q ID ID = ID")
                mf = self.mor(C, f)
                if a.text not in Ty.sets[mf.dst]:
                    raise UnresolvedReference(f"{a.text!r} is not a type over {mf.dst}", a.span)
                q[f.text, a.text] = self.mor(C, m).id
            else:
                raise ParseError(f"unexpected {key!r} in cwa block", toks[0].span)
        for c in C.objects:
            for a in Ty.sets[c]:
                if (c, a) not in ext or (c, a) not in proj:
                    raise IncompleteTable(f"cwa {name.text}: no extension or projection at ({c}, {a})", name.span)
        for m in C.morphisms:
            for a in Ty.sets[m.dst]:
                if (m.id, a) not in q:
                    if C.is_identity(m.id):
                        q[m.id, a] = C.identity[ext[m.dst, a]]
                    else:
                        raise IncompleteTable(f"cwa {name.text}: no substitution map at ({m.id}, {a})", name.span)
        self.ws.add("cwa", name.text, CwA(C, Ty, ext, proj, q, name.text), name.span)

    def _type(self, C, Ty, g, a):
        self.obj(C, g)
        if a.text not in Ty.sets[g.text]:
            raise UnresolvedReference(f"{a.text!r} is not a type over {g.text}", a.span)

    # -- derived declarations ----------------------------------------------
    def derived(self, kind: str, toks: list[Tok]) -> None:
        name = toks[1]
        if not ID_RE.fullmatch(name.text):
            raise ParseError(f"expected a name, found {name.text!r}", name.span)
        if len(toks) < 4:
            raise ParseError("missing construction after '='", toks[2].span)
        op, args = toks[3], toks[4:]
        table = DERIVED.get(kind, {})
        if op.text not in table:
            raise ParseError(f"unknown {kind} construction {op.text!r}; expected one of "
                             f"{', '.join(sorted(table))}", op.span)
        pattern, build = table[op.text]
        caps = _match([op] + args, f"{op.text} {pattern}".strip())
        try:
            value = build(self, *caps)
        except ParseError:
            raise
        except DispCatError as exc:
            raise ParseError(f"{kind} {name.text}: {exc}", op.span) from None
        value = _rename(value, name.text)
        self.ws.add(kind, name.text, value, name.span)


def _rename(value, name: str):
    if isinstance(value, FinCat):
        return value.renamed(name)
    if isinstance(value, (dsp.DispCat, FunctorData, Presheaf, Graph)):
        return dataclasses.replace(value, name=name)
    return value


def _fibre(e: _Elaborator, d: Tok, c: Tok) -> FinCat:
    D = e.ref("display", d)
    return dsp.fibre_category(D, e.obj(D.base, c))


DERIVED: dict[str, dict[str, tuple[str, Callable]]] = {
    "category": {
        "product": ("ID ID", lambda e, a, b: product(e.ref("category", a), e.ref("category", b))),
        "opposite": ("ID", lambda e, a: opposite(e.ref("category", a))),
        "total": ("ID", lambda e, d: e.ref("display", d).total.category),
        "fibre": ("ID ID", _fibre),
    },
    "display": {
        "slice": ("ID", lambda e, c: dsp.slice_display(e.ref("category", c))),
        "coslice": ("ID", lambda e, c: dsp.coslice_display(e.ref("category", c))),
        "arrow": ("ID", lambda e, c: dsp.arrow_display(e.ref("category", c))),
        "const": ("ID ID", lambda e, c, k: dsp.constant_display(e.ref("category", c), e.ref("category", k))),
        "fullsub": ("ID : IDS*", lambda e, c, ids: dsp.full_sub_display(
            e.ref("category", c), [e.obj(e.ref("category", c), t) for t in ids])),
        "algebra": ("ID", lambda e, f: dsp.endofunctor_algebra_display(e.ref("functor", f))),
        "monad": ("ID ID ID", lambda e, t, m, u: dsp.monad_algebra_display(
            e.ref("functor", t), e.ref("nattrans", m), e.ref("nattrans", u))),
        "reindex": ("ID along ID", lambda e, d, f: dsp.reindex(e.ref("display", d), e.ref("functor", f))),
        "sigma": ("ID ID", lambda e, d, x: dsp.sigma_display(e.ref("display", d), e.ref("display", x))),
        "op": ("ID", lambda e, d: dsp.op_display(e.ref("display", d))),
        "elements": ("ID", lambda e, p: fib.presheaf_to_discrete_fibration(e.ref("presheaf", p))),
        "fromfunctor": ("ID", lambda e, f: dsp.display_from_functor(e.ref("functor", f))),
        "sip": ("ID", lambda e, s: _sip(e.ref("structure", s))),
    },
    "functor": {
        "identity": ("ID", lambda e, c: identity_functor(e.ref("category", c))),
        "pr1": ("ID", lambda e, d: e.ref("display", d).total.projection),
        "terminal": ("ID ID", lambda e, c, one: terminal_functor(e.ref("category", c), e.ref("category", one))),
        "compose": ("ID ID", lambda e, f, g: compose_functors(e.ref("functor", f), e.ref("functor", g))),
    },
    "presheaf": {
        "representable": ("ID ID", lambda e, c, b: representable(e.ref("category", c), e.obj(e.ref("category", c), b))),
        "ofdisplay": ("ID", lambda e, d: fib.discrete_fibration_to_presheaf(e.ref("display", d))),
    },
    "graph": {k.lower(): ("", (lambda g: lambda e: g)(g)) for k, g in STANDARD_SHAPES.items()},
}


def _sip(s: StandardStructure) -> dsp.DispCat:
    from .univalence import sip_to_display
    return sip_to_display(s)


def parse_text(text: str, filename: str = "<string>", ws: Workspace | None = None) -> Workspace:
    ws = ws if ws is not None else Workspace()
    _Elaborator(ws).run(_lines(text, filename))
    return ws


def parse_files(paths: Iterable[str | Path]) -> Workspace:
    """Parse files in order into one workspace; later files may refer to earlier ones."""
    ws = Workspace()
    for p in paths:
        p = Path(p)
        try:
            text = p.read_text(encoding="utf-8")
        except (OSError, UnicodeDecodeError) as exc:
            raise ParseError(f"cannot read {p}: {exc}") from None
        parse_text(text, str(p), ws)
    return ws


# ----------------------------------------------------------------------------
# emission

def _check_ids(ids: Iterable[str]) -> None:
    for i in ids:
        if not ID_RE.fullmatch(i):
            raise MalformedInput(f"{i!r} cannot be written as an identifier")


def _chunks(items: list[str], n: int = 12) -> list[list[str]]:
    return [items[i:i + n] for i in range(0, len(items), n)] or [[]]


def emit_category(c: FinCat, name: str) -> str:
    _check_ids([name, *c.objects, *(m.id for m in c.morphisms)])
    out = [f"category {name}"]
    for chunk in _chunks(list(c.objects)):
        if chunk:
            out.append("  obj " + " ".join(chunk))
    implicit = {o for o in c.objects if c.identity[o] == f"id_{o}"}
    for m in c.morphisms:
        if c.is_identity(m.id) and m.src in implicit and c.identity[m.src] == m.id:
            continue
        out.append(f"  mor {m.id} : {m.src} -> {m.dst}")
    for o in c.objects:
        if o not in implicit:
            out.append(f"  ident {o} = {c.identity[o]}")
    for (f, g), h in sorted(c.comp.items()):
        out.append(f"  comp {f} {g} = {h}")
    out.append("end")
    return "\n".join(out) + "\n"


def emit_display(d: dsp.DispCat, name: str, base_name: str) -> str:
    B = d.base
    _check_ids([name, *(x for _, x in d.objects()), *(e for fam in d.dmorphisms.values() for e in fam)])
    out = [f"display {name} over {base_name}"]
    for c in B.objects:
        out.append(f"  dobj {c} : " + " ".join(d.fibre(c)) if d.fibre(c) else f"  dobj {c} :")
    for u in d.dmors():
        out.append(f"  dmor {u.id} : {u.src} -> {u.dst} over {u.base}")
    for c, x in d.objects():
        out.append(f"  did {x} = {d.did[c, x]} over {c}")
    dids = {(B.identity[c], e) for (c, _), e in d.did.items()}
    for (f, e, g, e2), h in sorted(d.dcomp.items()):
        if (g, e2) in dids and h == e or (f, e) in dids and h == e2:
            continue
        out.append(f"  dcomp {e} {e2} = {h} over {f} {g}")
    out.append("end")
    return "\n".join(out) + "\n"


def emit_functor(F: FunctorData, name: str, dom: str, cod: str) -> str:
    out = [f"functor {name} : {dom} -> {cod}"]
    out += [f"  fobj {o} = {F.on_obj[o]}" for o in F.dom.objects]
    out += [f"  fmor {m.id} = {F.on_mor[m.id]}" for m in F.dom.morphisms if not F.dom.is_identity(m.id)]
    out.append("end")
    return "\n".join(out) + "\n"


def emit_presheaf(p: Presheaf, name: str, base_name: str) -> str:
    C = p.base
    out = [f"presheaf {name} on {base_name}"]
    for c in C.objects:
        out.append(f"  pobj {c} : " + " ".join(p.sets[c]) if p.sets[c] else f"  pobj {c} :")
    for m in C.morphisms:
        if C.is_identity(m.id):
            continue
        for e in p.sets[m.dst]:
            out.append(f"  pmor {m.id} : {e} -> {p.restrict[m.id][e]}")
    out.append("end")
    return "\n".join(out) + "\n"


def emit_structure(s: StandardStructure, name: str, base_name: str) -> str:
    out = [f"structure {name} on {base_name}"]
    for c in s.base.objects:
        out.append(f"  struct {c} : " + " ".join(s.P[c]) if s.P[c] else f"  struct {c} :")
    for f, a, b in sorted(s.table()):
        out.append(f"  hom {f} : {a} -> {b}")
    out.append("end")
    return "\n".join(out) + "\n"


def emit_cwa(w: CwA, name: str, base_name: str, ty_name: str) -> str:
    B = w.base
    out = [f"cwa {name} on {base_name} with {ty_name}"]
    for (g, a), o in w.ext.items():
        out.append(f"  ext {g} {a} = {o}")
    for (g, a), m in w.proj.items():
        out.append(f"  proj {g} {a} = {m}")
    for (f, a), m in w.qmor.items():
        if not B.is_identity(f):
            out.append(f"  q {f} {a} = {m}")
    out.append("end")
    return "\n".join(out) + "\n"


def emit_graph(g: Graph, name: str) -> str:
    out = [f"graph {name}"]
    if g.nodes:
        out.append("  node " + " ".join(g.nodes))
    out += [f"  edge {e} : {s} -> {t}" for e, s, t in g.edges]
    out.append("end")
    return "\n".join(out) + "\n"


def emit_diagram(dgm: Diagram, name: str, graph_name: str, target_name: str) -> str:
    out = [f"diagram {name} : {graph_name} in {target_name}"]
    out += [f"  node {j} = {dgm.on_node[j]}" for j in dgm.shape.nodes]
    out += [f"  edge {e} = {dgm.on_edge[e]}" for e, _, _ in dgm.shape.edges]
    out.append("end")
    return "\n".join(out) + "\n"


class Emitter:
    """Collects declarations, emitting a base category once under a stable name."""

    def __init__(self, ws: Workspace | None = None):
        self.known: dict[str, FinCat] = dict(ws.categories) if ws else {}
        self.parts: list[str] = []
        self.written: set[str] = set()

    def base(self, c: FinCat, hint: str) -> str:
        for n in sorted(self.written):
            if self.known[n] == c:
                return n
        base, k = hint, 1
        while hint in self.written:
            hint, k = f"{base}_{k}", k + 1
        self.parts.append(emit_category(c, hint))
        self.known[hint] = c
        self.written.add(hint)
        return hint

    def display(self, d: dsp.DispCat, name: str) -> None:
        base = self.base(d.base, d.base.name if ID_RE.fullmatch(d.base.name or "") else f"{name}_base")
        self.parts.append(emit_display(d, name, base))

    def presheaf(self, p: Presheaf, name: str) -> None:
        base = self.base(p.base, p.base.name if ID_RE.fullmatch(p.base.name or "") else f"{name}_base")
        self.parts.append(emit_presheaf(p, name, base))

    def text(self) -> str:
        return "\n".join(self.parts)


def emit(items: list[tuple[str, object]]) -> str:
    """Emit categories, displays and presheaves, writing each base category once."""
    em = Emitter()
    for name, obj in items:
        if isinstance(obj, FinCat):
            em.base(obj, name)
        elif isinstance(obj, dsp.DispCat):
            em.display(obj, name)
        elif isinstance(obj, Presheaf):
            em.presheaf(obj, name)
        else:
            raise MalformedInput(f"cannot emit {type(obj).__name__}")
    return em.text()
