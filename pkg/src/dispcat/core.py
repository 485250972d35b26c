"""Finite categories, functors, natural transformations and presheaves.

Composition is written in diagrammatic order throughout: ``compose(f, g)``
is "f then g".  Identities are part of the morphism list but their
composites are never stored; :meth:`FinCat.compose` closes the table with
the unit rules.
"""
from __future__ import annotations

import dataclasses
import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterable, Iterator, NamedTuple

from .errors import MalformedInput, ResourceLimit, UnknownMorphism, UnknownObject
from .report import Report, default_bound


class Morph(NamedTuple):
    id: str
    src: str
    dst: str


def pair(left: str, right: str) -> str:
    """Naming convention for objects and morphisms built from pairs."""
    return f"{left}|{right}"


@dataclass(frozen=True, eq=False)
class FinCat:
    objects: tuple[str, ...]
    morphisms: tuple[Morph, ...]
    identity: dict[str, str]
    comp: dict[tuple[str, str], str]
    name: str = field(default="", compare=False)

    # -- indexes ---------------------------------------------------------
    @cached_property
    def _mor(self) -> dict[str, Morph]:
        return {m.id: m for m in self.morphisms}

    @cached_property
    def _hom(self) -> dict[tuple[str, str], tuple[str, ...]]:
        h: dict[tuple[str, str], list[str]] = {}
        for m in self.morphisms:
            h.setdefault((m.src, m.dst), []).append(m.id)
        return {k: tuple(sorted(v)) for k, v in h.items()}

    @cached_property
    def _identities(self) -> frozenset[str]:
        return frozenset(self.identity.values())

    @cached_property
    def _objset(self) -> frozenset[str]:
        return frozenset(self.objects)

    @cached_property
    def _out(self) -> dict[str, tuple[str, ...]]:
        out: dict[str, list[str]] = {o: [] for o in self.objects}
        for m in self.morphisms:
            out.setdefault(m.src, []).append(m.id)
        return {k: tuple(sorted(v)) for k, v in out.items()}

    @cached_property
    def _into(self) -> dict[str, tuple[str, ...]]:
        into: dict[str, list[str]] = {o: [] for o in self.objects}
        for m in self.morphisms:
            into.setdefault(m.dst, []).append(m.id)
        return {k: tuple(sorted(v)) for k, v in into.items()}

    # -- queries ---------------------------------------------------------
    def __contains__(self, obj: str) -> bool:
        return obj in self._objset

    def mor(self, f: str) -> Morph:
        try:
            return self._mor[f]
        except KeyError:
            raise UnknownMorphism(f"unknown morphism {f!r} in {self.name or 'category'}") from None

    def src(self, f: str) -> str:
        return self.mor(f).src

    def dst(self, f: str) -> str:
        return self.mor(f).dst

    def check_object(self, c: str) -> str:
        if c not in self._objset:
            raise UnknownObject(f"unknown object {c!r} in {self.name or 'category'}")
        return c

    def hom(self, a: str, b: str) -> tuple[str, ...]:
        return self._hom.get((a, b), ())

    def out_of(self, a: str) -> tuple[str, ...]:
        return self._out.get(a, ())

    def into(self, b: str) -> tuple[str, ...]:
        return self._into.get(b, ())

    def is_identity(self, f: str) -> bool:
        return f in self._identities

    def compose(self, f: str, g: str) -> str:
        """The composite ``f;g``; raises MalformedInput if it is undefined."""
        if f in self._identities:
            return g
        if g in self._identities:
            return f
        try:
            return self.comp[f, g]
        except KeyError:
            raise MalformedInput(f"composite of {f!r} and {g!r} is not defined") from None

    def composable_pairs(self, identities: bool = True) -> Iterator[tuple[str, str]]:
        """All (f, g) with dst f = src g, in lexicographic order."""
        for f in sorted(self._mor):
            if not identities and f in self._identities:
                continue
            for g in self.out_of(self._mor[f].dst):
                if identities or g not in self._identities:
                    yield f, g

    @property
    def non_identity(self) -> list[str]:
        return sorted(m.id for m in self.morphisms if m.id not in self._identities)

    def __eq__(self, other) -> bool:
        # listing order is presentation only
        if not isinstance(other, FinCat):
            return NotImplemented
        return (self._objset == other._objset and set(self.morphisms) == set(other.morphisms)
                and self.identity == other.identity and self.comp == other.comp)

    def __hash__(self) -> int:
        return hash((self._objset, frozenset(self.morphisms)))

    def __repr__(self) -> str:
        return (f"FinCat({self.name or '?'}: {len(self.objects)} objects, "
                f"{len(self.morphisms)} morphisms)")

    # -- construction ----------------------------------------------------
    @classmethod
    def build(cls, objects: Iterable[str], morphisms: Iterable, compose: Callable[[str, str], str] | None = None,
              identity: dict[str, str] | None = None, name: str = "") -> "FinCat":
        """Tabulate a category from a composition function.

        Without ``identity``, identities are generated as ``id_<obj>`` and
        ``morphisms`` must list only the non-identity arrows.  ``compose`` is
        only called on composable pairs of non-identity morphisms.
        """
        objects = tuple(objects)
        mors = [Morph(*m) for m in morphisms]
        if identity is None:
            identity = {o: f"id_{o}" for o in objects}
            mors = [Morph(identity[o], o, o) for o in objects] + mors
        ids = set(identity.values())
        out: dict[str, list[Morph]] = {}
        for m in mors:
            out.setdefault(m.src, []).append(m)
        comp = {}
        for f in mors:
            if f.id in ids:
                continue
            for g in out.get(f.dst, ()):
                if g.id not in ids:
                    comp[f.id, g.id] = compose(f.id, g.id)
        return cls(objects, tuple(mors), dict(identity), comp, name)

    def renamed(self, name: str) -> "FinCat":
        return FinCat(self.objects, self.morphisms, self.identity, self.comp, name)


def _well_formed(c: FinCat) -> None:
    if len(set(c.objects)) != len(c.objects):
        dup = sorted(o for o in set(c.objects) if c.objects.count(o) > 1)
        raise MalformedInput(f"duplicate object ids {dup}")
    seen = set()
    for m in c.morphisms:
        if m.id in seen:
            raise MalformedInput(f"duplicate morphism id {m.id!r}")
        seen.add(m.id)
        for end in (m.src, m.dst):
            if end not in c:
                raise MalformedInput(f"morphism {m.id!r} has unknown endpoint {end!r}")
    if set(c.identity) != set(c.objects):
        missing = sorted(set(c.objects) - set(c.identity)) or sorted(set(c.identity) - set(c.objects))
        raise MalformedInput(f"identity map does not match objects at {missing}")
    for o, i in c.identity.items():
        if i not in seen:
            raise MalformedInput(f"identity of {o!r} is unknown morphism {i!r}")
    for (f, g), h in c.comp.items():
        for x in (f, g, h):
            if x not in seen:
                raise MalformedInput(f"comp entry ({f}, {g}) = {h} references unknown morphism {x!r}")


def check_category_laws(c: FinCat) -> Report:
    """Decide the category axioms by exhaustive enumeration.

    Stops at the first violation; pairs and triples are visited in
    lexicographic order of morphism ids.
    """
    _well_formed(c)
    r = Report("check-category", targets=(c.name,))
    for o in sorted(c.objects):
        i = c.mor(c.identity[o])
        if i.src != o or i.dst != o:
            return r.fail("identity-type", f"identity {i.id} of {o} is {i.src} -> {i.dst}", (o, i.id))
    for f, g in sorted(c.comp):
        if c.is_identity(f) or c.is_identity(g):
            return r.fail("identity-entry", f"comp table lists identity pair ({f}, {g})", (f, g))
        if c.dst(f) != c.src(g):
            return r.fail("extraneous-comp", f"comp defined on non-composable pair ({f}, {g})", (f, g))
    for f, g in c.composable_pairs(identities=False):
        if (f, g) not in c.comp:
            return r.fail("missing-comp", f"composite of ({f}, {g}) is missing", (f, g))
        h = c.mor(c.comp[f, g])
        if h.src != c.src(f) or h.dst != c.dst(g):
            return r.fail("comp-type", f"{f};{g} = {h.id} has type {h.src} -> {h.dst}, "
                          f"expected {c.src(f)} -> {c.dst(g)}", (f, g))
    for f, g in c.composable_pairs(identities=False):
        fg = c.comp[f, g]
        for h in c.out_of(c.dst(g)):
            if c.is_identity(h):
                continue
            left = c.compose(fg, h)
            right = c.compose(f, c.compose(g, h))
            if left != right:
                return r.fail("associativity", f"({f};{g});{h} = {left} but {f};({g};{h}) = {right}",
                              (f, g, h))
    return r


def composition_mutants(c: FinCat) -> Iterator[tuple[tuple[str, str], str, FinCat]]:
    """Every table differing from ``c`` in exactly one composition entry."""
    ids = sorted(m.id for m in c.morphisms)
    for key in sorted(c.comp):
        for other in ids:
            if other != c.comp[key]:
                yield key, other, dataclasses.replace(c, comp={**c.comp, key: other})


def mutation_check(c: FinCat) -> Report:
    """The law checker must reject every single-entry mutation of a lawful table."""
    r = Report("mutations", targets=(c.name,))
    base = check_category_laws(c)
    if not base.passed:
        return r.fail("unlawful-input", base.findings[0].message, base.witness)
    total = 0
    for (f, g), other, mutant in composition_mutants(c):
        total += 1
        if check_category_laws(mutant).passed:
            r.fail("accepted-mutant", f"changing {f};{g} to {other} still passes the laws", (f, g, other))
    r.details.update(composable_pairs=len(c.comp), mutants=total)
    return r


# ----------------------------------------------------------------------------
# functors and natural transformations

@dataclass(frozen=True)
class FunctorData:
    dom: FinCat
    cod: FinCat
    on_obj: dict[str, str]
    on_mor: dict[str, str]
    name: str = field(default="", compare=False)

    def obj(self, c: str) -> str:
        return self.on_obj[c]

    def mor(self, f: str) -> str:
        return self.on_mor[f]

    def __repr__(self) -> str:
        return f"FunctorData({self.name or '?'}: {self.dom.name} -> {self.cod.name})"


@dataclass(frozen=True)
class NatTransData:
    dom: FunctorData
    cod: FunctorData
    components: dict[str, str]
    name: str = field(default="", compare=False)

    def __getitem__(self, c: str) -> str:
        return self.components[c]


def identity_functor(c: FinCat) -> FunctorData:
    return FunctorData(c, c, {o: o for o in c.objects}, {m.id: m.id for m in c.morphisms},
                       f"id[{c.name}]")


def compose_functors(F: FunctorData, G: FunctorData) -> FunctorData:
    """``F`` then ``G``."""
    return FunctorData(F.dom, G.cod, {o: G.on_obj[F.on_obj[o]] for o in F.dom.objects},
                       {m.id: G.on_mor[F.on_mor[m.id]] for m in F.dom.morphisms},
                       f"{F.name};{G.name}")


def functor_from_maps(dom: FinCat, cod: FinCat, on_obj: dict[str, str], on_mor: dict[str, str],
                      name: str = "") -> FunctorData:
    """Fill in identity images, so only non-identity morphisms need listing."""
    full = dict(on_mor)
    for o in dom.objects:
        if o in on_obj:
            full.setdefault(dom.identity[o], cod.identity.get(on_obj[o], ""))
    return FunctorData(dom, cod, dict(on_obj), full, name)


def terminal_category() -> FinCat:
    return FinCat.build(["pt"], [], name="One")


def terminal_functor(c: FinCat, one: FinCat) -> FunctorData:
    (star,) = one.objects
    return FunctorData(c, one, {o: star for o in c.objects},
                       {m.id: one.identity[star] for m in c.morphisms}, f"!{c.name}")


def check_functor_laws(F: FunctorData) -> Report:
    C, D = F.dom, F.cod
    r = Report("check-functor", targets=(F.name,))
    for o in sorted(C.objects):
        if o not in F.on_obj:
            raise MalformedInput(f"functor {F.name} has no image for object {o!r}")
        if F.on_obj[o] not in D:
            raise MalformedInput(f"functor {F.name} sends {o!r} to unknown object {F.on_obj[o]!r}")
    for m in sorted(C.morphisms):
        if m.id not in F.on_mor:
            raise MalformedInput(f"functor {F.name} has no image for morphism {m.id!r}")
        img = D.mor(F.on_mor[m.id])
        if (img.src, img.dst) != (F.on_obj[m.src], F.on_obj[m.dst]):
            return r.fail("endpoints", f"{m.id}: {m.src} -> {m.dst} maps to {img.id}: "
                          f"{img.src} -> {img.dst}, expected {F.on_obj[m.src]} -> {F.on_obj[m.dst]}",
                          (m.id,))
    for o in sorted(C.objects):
        if F.on_mor[C.identity[o]] != D.identity[F.on_obj[o]]:
            return r.fail("identity", f"identity of {o} not preserved", (C.identity[o],))
    for f, g in C.composable_pairs(identities=False):
        lhs = F.on_mor[C.compose(f, g)]
        rhs = D.compose(F.on_mor[f], F.on_mor[g])
        if lhs != rhs:
            return r.fail("composition", f"F({f};{g}) = {lhs} but F{f};F{g} = {rhs}", (f, g))
    return r


def check_nat_trans(alpha: NatTransData) -> Report:
    F, G = alpha.dom, alpha.cod
    C, D = F.dom, F.cod
    r = Report("check-nat-trans", targets=(alpha.name,))
    for o in sorted(C.objects):
        m = D.mor(alpha.components[o])
        if (m.src, m.dst) != (F.on_obj[o], G.on_obj[o]):
            return r.fail("component-type", f"component at {o} has wrong type", (o,))
    for f in C.non_identity:
        a, b = C.src(f), C.dst(f)
        lhs = D.compose(F.on_mor[f], alpha.components[b])
        rhs = D.compose(alpha.components[a], G.on_mor[f])
        if lhs != rhs:
            return r.fail("naturality", f"naturality square at {f} fails: {lhs} != {rhs}", (f,))
    return r


def compose_nat_trans(alpha: NatTransData, beta: NatTransData) -> NatTransData:
    D = alpha.dom.cod
    return NatTransData(alpha.dom, beta.cod,
                        {o: D.compose(alpha.components[o], beta.components[o])
                         for o in alpha.dom.dom.objects})


def whisker_left(F: FunctorData, alpha: NatTransData) -> NatTransData:
    """``F alpha``: components alpha_{F c}."""
    return NatTransData(compose_functors(F, alpha.dom), compose_functors(F, alpha.cod),
                        {o: alpha.components[F.on_obj[o]] for o in F.dom.objects})


def whisker_right(alpha: NatTransData, G: FunctorData) -> NatTransData:
    """``alpha G``: components G(alpha_c)."""
    return NatTransData(compose_functors(alpha.dom, G), compose_functors(alpha.cod, G),
                        {o: G.on_mor[m] for o, m in alpha.components.items()})


def identity_nat_trans(F: FunctorData) -> NatTransData:
    return NatTransData(F, F, {o: F.cod.identity[F.on_obj[o]] for o in F.dom.objects})


# ----------------------------------------------------------------------------
# basic constructions

def opposite(c: FinCat) -> FinCat:
    return FinCat(
        c.objects,
        tuple(Morph(m.id, m.dst, m.src) for m in c.morphisms),
        dict(c.identity),
        {(g, f): h for (f, g), h in c.comp.items()},
        f"{c.name}^op" if not c.name.endswith("^op") else c.name[:-3],
    )


def product(c: FinCat, d: FinCat) -> FinCat:
    objects = [pair(a, b) for a in c.objects for b in d.objects]
    mors = [(pair(f.id, g.id), pair(f.src, g.src), pair(f.dst, g.dst))
            for f in c.morphisms for g in d.morphisms]
    identity = {pair(a, b): pair(c.identity[a], d.identity[b]) for a in c.objects for b in d.objects}
    split = {pair(f.id, g.id): (f.id, g.id) for f in c.morphisms for g in d.morphisms}

    def compose(x, y):
        (f1, g1), (f2, g2) = split[x], split[y]
        return pair(c.compose(f1, f2), d.compose(g1, g2))

    return FinCat.build(objects, mors, compose, identity, name=f"{c.name}x{d.name}")


def product_projections(c: FinCat, d: FinCat, prod: FinCat | None = None) -> tuple[FunctorData, FunctorData]:
    prod = prod or product(c, d)
    p1 = FunctorData(prod, c, {pair(a, b): a for a in c.objects for b in d.objects},
                     {pair(f.id, g.id): f.id for f in c.morphisms for g in d.morphisms}, "pr1")
    p2 = FunctorData(prod, d, {pair(a, b): b for a in c.objects for b in d.objects},
                     {pair(f.id, g.id): g.id for f in c.morphisms for g in d.morphisms}, "pr2")
    return p1, p2


def full_subcategory(c: FinCat, objects: Iterable[str], name: str = "") -> FinCat:
    keep = set(objects)
    for o in keep:
        c.check_object(o)
    mors = tuple(m for m in c.morphisms if m.src in keep and m.dst in keep)
    ids = {m.id for m in mors}
    return FinCat(tuple(o for o in c.objects if o in keep), mors,
                  {o: i for o, i in c.identity.items() if o in keep},
                  {k: v for k, v in c.comp.items() if k[0] in ids and k[1] in ids},
                  name or f"{c.name}|sub")


def relabel(c: FinCat, obj: Callable[[str], str], mor: Callable[[str], str], name: str = "") -> FinCat:
    """Rename objects and morphisms, keeping all structure."""
    return FinCat(
        tuple(obj(o) for o in c.objects),
        tuple(Morph(mor(m.id), obj(m.src), obj(m.dst)) for m in c.morphisms),
        {obj(o): mor(i) for o, i in c.identity.items()},
        {(mor(f), mor(g)): mor(h) for (f, g), h in c.comp.items()},
        name or c.name,
    )


def is_iso(c: FinCat, f: str) -> str | None:
    """The two-sided inverse of ``f``, if any."""
    m = c.mor(f)
    for g in c.hom(m.dst, m.src):
        if c.compose(f, g) == c.identity[m.src] and c.compose(g, f) == c.identity[m.dst]:
            return g
    return None


def isomorphisms(c: FinCat) -> list[tuple[str, str]]:
    """All (iso, inverse) pairs, in lexicographic order."""
    out = []
    for m in sorted(c.morphisms):
        g = is_iso(c, m.id)
        if g is not None:
            out.append((m.id, g))
    return out


# ----------------------------------------------------------------------------
# functor categories

def enumerate_functors(c: FinCat, d: FinCat, bound: int | None = None) -> list[FunctorData]:
    """All functors c -> d, in lexicographic order of (object map, morphism map)."""
    bound = default_bound() if bound is None else bound
    objs = sorted(c.objects)
    mors = c.non_identity
    index = {f: i for i, f in enumerate(mors)}
    # pairs to check once the later of (f, g, f;g) is assigned
    checks: dict[int, list[tuple[str, str, str]]] = {}
    for f, g in c.composable_pairs(identities=False):
        h = c.comp[f, g]
        stage = max(index[f], index[g], index.get(h, -1))
        checks.setdefault(stage, []).append((f, g, h))
    found: list[FunctorData] = []

    for images in itertools.product(sorted(d.objects), repeat=len(objs)):
        on_obj = dict(zip(objs, images))
        on_mor = {c.identity[o]: d.identity[on_obj[o]] for o in objs}

        def extend(i: int) -> Iterator[dict]:
            if i == len(mors):
                yield on_mor
                return
            f = c.mor(mors[i])
            for cand in d.hom(on_obj[f.src], on_obj[f.dst]):
                on_mor[f.id] = cand
                if all(on_mor[h] == d.compose(on_mor[a], on_mor[b]) for a, b, h in checks.get(i, ())):
                    yield from extend(i + 1)
            on_mor.pop(f.id, None)

        for m in extend(0):
            found.append(FunctorData(c, d, dict(on_obj), dict(m), f"F{len(found)}"))
            if len(found) > bound:
                raise ResourceLimit(f"more than {bound} functors {c.name} -> {d.name}")
    return found


def enumerate_nat_trans(F: FunctorData, G: FunctorData) -> list[NatTransData]:
    C, D = F.dom, F.cod
    objs = sorted(C.objects)
    out = []
    for comps in itertools.product(*(D.hom(F.on_obj[o], G.on_obj[o]) for o in objs)):
        alpha = NatTransData(F, G, dict(zip(objs, comps)))
        if check_nat_trans(alpha).passed:
            out.append(alpha)
    return out


@dataclass(frozen=True)
class FunctorCategory:
    category: FinCat
    functors: dict[str, FunctorData]
    transformations: dict[str, NatTransData]


def functor_category(c: FinCat, d: FinCat, bound: int | None = None) -> FunctorCategory:
    """``[c, d]`` with functors named F0, F1, ... in enumeration order."""
    functors = {F.name: F for F in enumerate_functors(c, d, bound)}
    transformations: dict[str, NatTransData] = {}
    mors, identity = [], {}
    for fn, F in functors.items():
        for gn, G in functors.items():
            for k, alpha in enumerate(enumerate_nat_trans(F, G)):
                nid = f"{fn}.{gn}.{k}"
                transformations[nid] = NatTransData(F, G, alpha.components, nid)
                mors.append(Morph(nid, fn, gn))
                if fn == gn and all(alpha.components[o] == d.identity[F.on_obj[o]] for o in c.objects):
                    identity[fn] = nid
    by_components = {(t.dom.name, t.cod.name, tuple(sorted(t.components.items()))): n
                     for n, t in transformations.items()}

    def compose(x, y):
        a, b = transformations[x], transformations[y]
        comps = {o: d.compose(a.components[o], b.components[o]) for o in c.objects}
        return by_components[a.dom.name, b.cod.name, tuple(sorted(comps.items()))]

    cat = FinCat.build(list(functors), mors, compose, identity, name=f"[{c.name},{d.name}]")
    return FunctorCategory(cat, functors, transformations)


# ----------------------------------------------------------------------------
# equivalences

def check_equivalence(F: FunctorData) -> Report:
    """Fully faithful and essentially surjective, decided exhaustively."""
    C, D = F.dom, F.cod
    r = Report("check-equivalence", targets=(F.name,))
    for a in sorted(C.objects):
        for b in sorted(C.objects):
            src = C.hom(a, b)
            images = [F.on_mor[f] for f in src]
            tgt = D.hom(F.on_obj[a], F.on_obj[b])
            if len(set(images)) != len(images):
                r.details.update(faithful=False)
                return r.fail("not-faithful", f"hom({a},{b}) is not mapped injectively", (a, b))
            if set(images) != set(tgt):
                r.details.update(full=False)
                return r.fail("not-full", f"hom({a},{b}) -> hom({F.on_obj[a]},{F.on_obj[b]}) "
                              "is not surjective", (a, b))
    witnesses = {}
    for y in sorted(D.objects):
        for a in sorted(C.objects):
            iso = next((m for m in D.hom(F.on_obj[a], y) if is_iso(D, m) is not None), None)
            if iso is not None:
                witnesses[y] = (a, iso)
                break
        else:
            return r.fail("not-essentially-surjective", f"{y} is not isomorphic to any image object", (y,))
    r.details["witness_isos"] = witnesses
    return r


def isomorphism_of_categories(F: FunctorData) -> bool:
    """Bijective on objects and morphisms (and a functor)."""
    return (check_functor_laws(F).passed
            and len(set(F.on_obj.values())) == len(F.dom.objects) == len(F.cod.objects)
            and len(set(F.on_mor.values())) == len(F.dom.morphisms) == len(F.cod.morphisms))


# ----------------------------------------------------------------------------
# presheaves

@dataclass(frozen=True)
class Presheaf:
    """Contravariant set-valued functor.

    ``restrict[f]`` for ``f: a -> b`` maps elements of ``sets[b]`` to
    elements of ``sets[a]``.
    """
    base: FinCat
    sets: dict[str, tuple[str, ...]]
    restrict: dict[str, dict[str, str]]
    name: str = field(default="", compare=False)

    @classmethod
    def build(cls, base: FinCat, sets: dict, restrict: dict, name: str = "") -> "Presheaf":
        """Fill in identity actions, so only non-identity morphisms need listing."""
        full = {f: dict(v) for f, v in restrict.items()}
        for o in base.objects:
            full.setdefault(base.identity[o], {e: e for e in sets.get(o, ())})
        return cls(base, {o: tuple(sets.get(o, ())) for o in base.objects}, full, name)


def check_presheaf_laws(p: Presheaf) -> Report:
    C = p.base
    r = Report("check-presheaf", targets=(p.name,))
    for o in C.objects:
        if o not in p.sets:
            raise MalformedInput(f"presheaf {p.name} has no set over {o!r}")
        if len(set(p.sets[o])) != len(p.sets[o]):
            raise MalformedInput(f"presheaf {p.name} repeats an element over {o!r}")
    for m in sorted(C.morphisms):
        if m.id not in p.restrict:
            raise MalformedInput(f"presheaf {p.name} has no action for {m.id!r}")
        act = p.restrict[m.id]
        if set(act) != set(p.sets[m.dst]):
            return r.fail("domain", f"action of {m.id} is not defined exactly on P({m.dst})", (m.id,))
        bad = sorted(e for e, v in act.items() if v not in p.sets[m.src])
        if bad:
            return r.fail("codomain", f"action of {m.id} sends {bad[0]} outside P({m.src})", (m.id, bad[0]))
    for o in sorted(C.objects):
        act = p.restrict[C.identity[o]]
        for e in sorted(p.sets[o]):
            if act[e] != e:
                return r.fail("identity", f"identity of {o} moves {e}", (o, e))
    for f, g in C.composable_pairs(identities=False):
        fg = C.compose(f, g)
        for e in sorted(p.sets[C.dst(g)]):
            lhs = p.restrict[fg][e]
            rhs = p.restrict[f][p.restrict[g][e]]
            if lhs != rhs:
                return r.fail("functoriality", f"P({f};{g})({e}) = {lhs} but P{f}(P{g}({e})) = {rhs}",
                              (f, g, e))
    return r


def representable(c: FinCat, b: str, name: str = "") -> Presheaf:
    """``hom(-, b)``: over a the morphisms a -> b, acting by precomposition."""
    c.check_object(b)
    sets = {a: c.hom(a, b) for a in c.objects}
    restrict = {m.id: {e: c.compose(m.id, e) for e in sets[m.dst]} for m in c.morphisms}
    return Presheaf(c, sets, restrict, name or f"y({b})")
