"""Finite diagrams over graphs, cones, brute-force limits and creation of limits."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, NamedTuple

from .core import FinCat, is_iso
from .displayed import DispCat
from .errors import InvalidWitness, MalformedInput, NotLimiting, ResourceLimit
from .report import Report, default_bound


@dataclass(frozen=True)
class Graph:
    nodes: tuple[str, ...]
    edges: tuple[tuple[str, str, str], ...] = ()
    name: str = field(default="", compare=False)

    def __post_init__(self):
        if len(set(self.nodes)) != len(self.nodes):
            raise MalformedInput(f"graph {self.name} repeats a node")
        ids = [e for e, _, _ in self.edges]
        if len(set(ids)) != len(ids):
            raise MalformedInput(f"graph {self.name} repeats an edge")
        for e, s, t in self.edges:
            if s not in self.nodes or t not in self.nodes:
                raise MalformedInput(f"edge {e} of {self.name} has an unknown endpoint")


def empty_shape() -> Graph:
    return Graph((), (), "Empty")


def point_shape() -> Graph:
    return Graph(("a",), (), "Point")


def discrete_two() -> Graph:
    return Graph(("a", "b"), (), "Pair")


def cospan_shape() -> Graph:
    return Graph(("a", "b", "c"), (("f", "a", "c"), ("g", "b", "c")), "Cospan")


def parallel_shape() -> Graph:
    return Graph(("a", "b"), (("f", "a", "b"), ("g", "a", "b")), "Parallel")


STANDARD_SHAPES = {g.name: g for g in (empty_shape(), point_shape(), discrete_two(), cospan_shape(),
                                       parallel_shape())}


@dataclass(frozen=True)
class Diagram:
    shape: Graph
    target: FinCat
    on_node: dict[str, str]
    on_edge: dict[str, str]
    name: str = field(default="", compare=False)

    def check(self) -> None:
        for j in self.shape.nodes:
            if j not in self.on_node:
                raise MalformedInput(f"diagram {self.name} has no object at node {j}")
            self.target.check_object(self.on_node[j])
        for e, s, t in self.shape.edges:
            if e not in self.on_edge:
                raise MalformedInput(f"diagram {self.name} has no morphism at edge {e}")
            m = self.target.mor(self.on_edge[e])
            if (m.src, m.dst) != (self.on_node[s], self.on_node[t]):
                raise MalformedInput(f"edge {e} of {self.name} is sent to an ill-typed morphism")


@dataclass(frozen=True)
class Cone:
    vertex: str
    legs: dict[str, str]


@dataclass(frozen=True)
class DispCone:
    base: Cone
    dvertex: str
    dlegs: dict[str, str]


class Square(NamedTuple):
    """``p1 : P -> A``, ``p2 : P -> B`` over the cospan ``f : A -> C <- B : g``."""
    p1: str
    p2: str
    f: str
    g: str


def is_cone(c: FinCat, dgm: Diagram, cone: Cone) -> bool:
    for j in dgm.shape.nodes:
        leg = cone.legs.get(j)
        if leg is None or c.src(leg) != cone.vertex or c.dst(leg) != dgm.on_node[j]:
            return False
    return all(c.compose(cone.legs[s], dgm.on_edge[e]) == cone.legs[t] for e, s, t in dgm.shape.edges)


def cones(c: FinCat, dgm: Diagram, vertex: str) -> Iterator[Cone]:
    """All cones with the given vertex, in lexicographic order of leg tuples."""
    nodes = dgm.shape.nodes
    checks: dict[str, list[tuple[str, str, str]]] = {j: [] for j in nodes}
    pos = {j: i for i, j in enumerate(nodes)}
    for e, s, t in dgm.shape.edges:
        checks[nodes[max(pos[s], pos[t])]].append((e, s, t))
    legs: dict[str, str] = {}

    def go(i: int) -> Iterator[Cone]:
        if i == len(nodes):
            yield Cone(vertex, dict(legs))
            return
        j = nodes[i]
        for m in c.hom(vertex, dgm.on_node[j]):
            legs[j] = m
            if all(c.compose(legs[s], dgm.on_edge[e]) == legs[t] for e, s, t in checks[j]):
                yield from go(i + 1)
        legs.pop(j, None)

    yield from go(0)


def factorisations(c: FinCat, cone: Cone, other: Cone) -> list[str]:
    return [m for m in c.hom(other.vertex, cone.vertex)
            if all(c.compose(m, cone.legs[j]) == other.legs[j] for j in cone.legs)]


def is_limiting(c: FinCat, dgm: Diagram, cone: Cone, bound: int | None = None) -> Report:
    """Every cone factors through ``cone`` by exactly one morphism."""
    bound = default_bound() if bound is None else bound
    dgm.check()
    if not is_cone(c, dgm, cone):
        raise MalformedInput(f"legs at vertex {cone.vertex} do not form a cone")
    r = Report("is-limiting", targets=(dgm.name, cone.vertex))
    seen = 0
    for v in sorted(c.objects):
        for other in cones(c, dgm, v):
            seen += 1
            if seen > bound:
                raise ResourceLimit(f"more than {bound} cones")
            n = len(factorisations(c, cone, other))
            if n != 1:
                return r.fail("factorisation", f"cone at {v} has {n} factorisations through {cone.vertex}",
                              (v,) + tuple(other.legs[j] for j in dgm.shape.nodes))
    return r


def limiting_cones(c: FinCat, dgm: Diagram, bound: int | None = None) -> list[Cone]:
    bound = default_bound() if bound is None else bound
    all_cones = [k for v in sorted(c.objects) for k in cones(c, dgm, v)]
    if len(all_cones) > bound:
        raise ResourceLimit(f"{len(all_cones)} cones exceed bound {bound}")
    out = []
    for k in all_cones:
        if all(len(factorisations(c, k, o)) == 1 for o in all_cones):
            out.append(k)
    return out


def find_limit(c: FinCat, dgm: Diagram, bound: int | None = None) -> Cone | None:
    dgm.check()
    found = limiting_cones(c, dgm, bound)
    return found[0] if found else None


def limit_uniqueness(c: FinCat, dgm: Diagram, bound: int | None = None) -> Report:
    """Any two limiting cones are related by exactly one leg-preserving iso."""
    r = Report("limit-uniqueness", targets=(dgm.name,))
    found = limiting_cones(c, dgm, bound)
    for a in found:
        for b in found:
            isos = [m for m in factorisations(c, b, a) if is_iso(c, m) is not None]
            if len(isos) != 1:
                r.fail("comparison", f"{len(isos)} comparison isos from {a.vertex} to {b.vertex}",
                       (a.vertex, b.vertex))
                return r
    r.details["limiting_cones"] = len(found)
    return r


def cospan_diagram(c: FinCat, f: str, g: str) -> Diagram:
    shape = cospan_shape()
    return Diagram(shape, c, {"a": c.src(f), "b": c.src(g), "c": c.dst(f)}, {"f": f, "g": g}, f"cospan({f},{g})")


def is_pullback(c: FinCat, sq: Square) -> Report:
    if c.dst(sq.f) != c.dst(sq.g):
        raise MalformedInput("the two lower edges of a square must share a target")
    dgm = cospan_diagram(c, sq.f, sq.g)
    if c.compose(sq.p1, sq.f) != c.compose(sq.p2, sq.g):
        raise MalformedInput("square does not commute")
    cone = Cone(c.src(sq.p1), {"a": sq.p1, "b": sq.p2, "c": c.compose(sq.p1, sq.f)})
    r = is_limiting(c, dgm, cone)
    r.command = "is-pullback"
    return r


# ----------------------------------------------------------------------------
# creation of limits

def project_diagram(d: DispCat, dgm: Diagram) -> Diagram:
    t = d.total
    if dgm.target != t.category:
        raise MalformedInput(f"diagram {dgm.name} does not live in the total category of {d.name}")
    return Diagram(dgm.shape, d.base, {j: t.objects[o][0] for j, o in dgm.on_node.items()},
                   {e: t.morphisms[m].base for e, m in dgm.on_edge.items()}, f"pr1({dgm.name})")


def displayed_cones(d: DispCat, dgm: Diagram, lam: Cone) -> list[DispCone]:
    t = d.total
    nodes = dgm.shape.nodes
    out = []
    for dv in sorted(d.fibre(lam.vertex)):
        choices: dict[str, tuple[str, ...]] = {}
        for j in nodes:
            _, x = t.objects[dgm.on_node[j]]
            choices[j] = d.hom(lam.legs[j], dv, x)
        legs: dict[str, str] = {}

        def go(i: int):
            if i == len(nodes):
                out.append(DispCone(lam, dv, dict(legs)))
                return
            j = nodes[i]
            for mu in choices[j]:
                legs[j] = mu
                go(i + 1)
            legs.pop(j, None)

        go(0)
    return [k for k in out if _disp_cone_commutes(d, dgm, k)]


def _disp_cone_commutes(d: DispCat, dgm: Diagram, k: DispCone) -> bool:
    t = d.total
    for e, s, tgt in dgm.shape.edges:
        u = t.morphisms[dgm.on_edge[e]]
        if d.dcomp[k.base.legs[s], k.dlegs[s], u.base, u.id] != k.dlegs[tgt]:
            return False
    return True


def total_cone(d: DispCat, k: DispCone) -> Cone:
    t = d.total
    return Cone(t.obj_id[k.base.vertex, k.dvertex],
                {j: t.mor_id[k.base.legs[j], k.dlegs[j]] for j in k.dlegs})


def creates_limit(d: DispCat, dgm: Diagram, lam: Cone, bound: int | None = None) -> Report:
    dgm.check()
    proj = project_diagram(d, dgm)
    if not is_cone(d.base, proj, lam) or not is_limiting(d.base, proj, lam, bound).passed:
        raise NotLimiting(f"cone at {lam.vertex} is not limiting for the projected diagram")
    r = Report("creates", targets=(d.name, dgm.name, lam.vertex))
    found = displayed_cones(d, dgm, lam)
    r.details["displayed_cones"] = len(found)
    if len(found) != 1:
        kind = "zero" if not found else "multiple"
        return r.fail(f"{kind}-displayed-cones", f"{len(found)} displayed cones over the cone at {lam.vertex}",
                      (lam.vertex,))
    k = found[0]
    tc = total_cone(d, k)
    r.details["witness"] = {"dvertex": k.dvertex, "dlegs": dict(k.dlegs)}
    lim = is_limiting(d.total.category, dgm, tc, bound)
    if not lim.passed:
        return r.fail("not-limiting", f"the unique displayed cone is not limiting in the total: "
                      f"{lim.findings[0].message}", lim.findings[0].witness)
    t = d.total
    projected = Cone(t.objects[tc.vertex][0], {j: t.morphisms[m].base for j, m in tc.legs.items()})
    r.details["projects_exactly"] = projected == lam
    if projected != lam:
        r.fail("projection", "the created limit does not project onto the base cone", (lam.vertex,))
    return r


def enumerate_diagrams(c: FinCat, shape: Graph, bound: int | None = None) -> Iterator[Diagram]:
    bound = default_bound() if bound is None else bound
    nodes = shape.nodes
    count = 0
    for objs in _assignments(len(nodes), sorted(c.objects)):
        on_node = dict(zip(nodes, objs))
        edge_choices = [c.hom(on_node[s], on_node[t]) for _, s, t in shape.edges]
        for mors in _product(edge_choices):
            count += 1
            if count > bound:
                raise ResourceLimit(f"more than {bound} diagrams of shape {shape.name}")
            yield Diagram(shape, c, on_node, {e: m for (e, _, _), m in zip(shape.edges, mors)},
                          f"{shape.name}#{count - 1}")


def _assignments(n: int, items):
    import itertools
    return itertools.product(items, repeat=n)


def _product(choices):
    import itertools
    return itertools.product(*choices)


def creates_limits_of_shape(d: DispCat, shape: Graph, bound: int | None = None) -> Report:
    """Exhaustive: every diagram of the shape in the total, every limiting cone of its projection."""
    r = Report("creates-shape", targets=(d.name, shape.name))
    n_diagrams = n_checked = 0
    cache: dict[tuple, list[Cone]] = {}
    for dgm in enumerate_diagrams(d.total.category, shape, bound):
        n_diagrams += 1
        proj = project_diagram(d, dgm)
        key = (tuple(sorted(proj.on_node.items())), tuple(sorted(proj.on_edge.items())))
        if key not in cache:
            cache[key] = limiting_cones(d.base, proj, bound)
        for lam in cache[key]:
            n_checked += 1
            sub = creates_limit(d, dgm, lam, bound)
            if not sub.passed:
                f = sub.findings[0]
                r.details.update(diagrams=n_diagrams, checked=n_checked)
                return r.fail(f.code, f"{dgm.name} {dict(dgm.on_node)}: {f.message}",
                              tuple(dgm.on_node[j] for j in shape.nodes) + tuple(f.witness))
    r.details.update(diagrams=n_diagrams, checked=n_checked)
    return r


def total_limit_from_creation(d: DispCat, dgm: Diagram, lam: Cone, witness: DispCone,
                              bound: int | None = None) -> Cone:
    """The total cone of a created limit; verifies it is limiting and projects to ``lam``."""
    if witness.base != lam or set(witness.dlegs) != set(dgm.shape.nodes):
        raise InvalidWitness("witness does not lie over the given base cone")
    t = d.total
    for j in dgm.shape.nodes:
        _, x = t.objects[dgm.on_node[j]]
        if witness.dlegs[j] not in d.hom(lam.legs[j], witness.dvertex, x):
            raise InvalidWitness(f"leg at {j} is not over {lam.legs[j]}")
    if not _disp_cone_commutes(d, dgm, witness):
        raise InvalidWitness("witness legs do not form a cone")
    tc = total_cone(d, witness)
    if not is_limiting(t.category, dgm, tc, bound).passed:
        raise InvalidWitness("total cone is not limiting")
    projected = Cone(t.objects[tc.vertex][0], {j: t.morphisms[m].base for j, m in tc.legs.items()})
    if projected != lam:
        raise InvalidWitness("total cone does not project to the base cone")
    return tc


def created_witness(d: DispCat, dgm: Diagram, lam: Cone) -> DispCone:
    """The unique displayed cone, for callers who already know creation holds."""
    found = displayed_cones(d, dgm, lam)
    if len(found) != 1:
        raise InvalidWitness(f"{len(found)} displayed cones over {lam.vertex}")
    return found[0]
