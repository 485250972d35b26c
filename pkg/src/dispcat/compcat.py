"""Comprehension categories and categories with attributes over finite bases."""
from __future__ import annotations

from dataclasses import dataclass, field

from .core import FinCat, Presheaf, check_presheaf_laws, identity_functor
from .displayed import (
    DispCat,
    DispFunctor,
    check_disp_functor,
    check_displayed_laws,
    slice_display,
    slice_element,
    total_functor,
)
from .errors import CwALawFailure, MalformedInput
from .fibrations import Cleaving, element_id, is_cartesian, presheaf_to_discrete_fibration
from .limits import Square, is_pullback
from .report import Report


@dataclass(frozen=True)
class CwA:
    """Types ``Ty``, context extension ``ext``, projections ``proj`` and substitution maps ``qmor``.

    ``qmor[f, A]`` for ``f : G' -> G`` and ``A`` in ``Ty(G)`` is the map
    ``G'.f*A -> G.A`` over ``f``.
    """
    base: FinCat
    Ty: Presheaf
    ext: dict[tuple[str, str], str]
    proj: dict[tuple[str, str], str]
    qmor: dict[tuple[str, str], str]
    name: str = field(default="", compare=False)

    def pull(self, f: str, A: str) -> str:
        return self.Ty.restrict[f][A]


@dataclass(frozen=True)
class ComprehensionCat:
    base: FinCat
    types: DispCat
    cleaving: Cleaving
    chi: DispFunctor
    name: str = field(default="", compare=False)


def _cwa_shape(w: CwA) -> None:
    B = w.base
    if w.Ty.base != B:
        raise MalformedInput(f"types of {w.name} live over a different base")
    for G in B.objects:
        for A in w.Ty.sets[G]:
            if (G, A) not in w.ext or (G, A) not in w.proj:
                raise MalformedInput(f"{w.name} has no extension or projection at ({G}, {A})")
            B.check_object(w.ext[G, A])
            B.mor(w.proj[G, A])
    for m in B.morphisms:
        for A in w.Ty.sets[m.dst]:
            if (m.id, A) not in w.qmor:
                raise MalformedInput(f"{w.name} has no substitution map at ({m.id}, {A})")
            B.mor(w.qmor[m.id, A])


def check_cwa(w: CwA) -> Report:
    """Typing, commuting squares, pullback squares and functoriality in ``f``."""
    B = w.base
    r = Report("cwa", targets=(w.name,))
    law = check_presheaf_laws(w.Ty)
    if not law.passed:
        return r.fail("types", law.findings[0].message, law.findings[0].witness)
    _cwa_shape(w)
    for G in sorted(B.objects):
        for A in w.Ty.sets[G]:
            p = B.mor(w.proj[G, A])
            if (p.src, p.dst) != (w.ext[G, A], G):
                return r.fail("proj-type", f"projection at ({G}, {A}) is not {w.ext[G, A]} -> {G}", (G, A))
    for m in sorted(B.morphisms):
        for A in w.Ty.sets[m.dst]:
            A2 = w.pull(m.id, A)
            q = B.mor(w.qmor[m.id, A])
            if (q.src, q.dst) != (w.ext[m.src, A2], w.ext[m.dst, A]):
                return r.fail("qmor-type", f"substitution map at ({m.id}, {A}) is ill-typed", (m.id, A))
            if B.compose(q.id, w.proj[m.dst, A]) != B.compose(w.proj[m.src, A2], m.id):
                return r.fail("commute", f"square for ({m.id}, {A}) does not commute", (m.id, A))
    for m in sorted(B.morphisms):
        for A in w.Ty.sets[m.dst]:
            sq = Square(w.qmor[m.id, A], w.proj[m.src, w.pull(m.id, A)], w.proj[m.dst, A], m.id)
            pb = is_pullback(B, sq)
            if not pb.passed:
                return r.fail("pullback", f"square for ({m.id}, {A}) is not a pullback: "
                              f"{pb.findings[0].message}", (m.id, A))
    for G in sorted(B.objects):
        for A in w.Ty.sets[G]:
            if w.qmor[B.identity[G], A] != B.identity[w.ext[G, A]]:
                return r.fail("identity", f"substitution along the identity of {G} at {A} is not an identity",
                              (G, A))
    for g, f in B.composable_pairs():
        for A in w.Ty.sets[B.dst(f)]:
            lhs = w.qmor[B.compose(g, f), A]
            rhs = B.compose(w.qmor[g, w.pull(f, A)], w.qmor[f, A])
            if lhs != rhs:
                return r.fail("composition", f"substitution along {g};{f} at {A} is not the composite",
                              (g, f, A))
    return r


def compcat_from_cwa(w: CwA, check: bool = True) -> ComprehensionCat:
    """Types become the elements display; chi sends A to its projection and lifts to squares."""
    if check:
        r = check_cwa(w)
        if not r.passed:
            raise CwALawFailure(r.findings[0].message)
    else:
        _cwa_shape(w)
    B = w.base
    types = presheaf_to_discrete_fibration(w.Ty, f"Ty[{w.name}]")
    sl = slice_display(B)
    lifts = {(m.id, A): (w.pull(m.id, A), element_id(w.pull(m.id, A), A))
             for m in B.morphisms for A in w.Ty.sets[m.dst]}
    on_dobj = {(G, A): w.proj[G, A] for G, A in types.objects()}
    on_dmor = {}
    for u in types.dmors():
        a, b = B.src(u.base), B.dst(u.base)
        on_dmor[u.base, u.id] = slice_element(w.qmor[u.base, u.dst], w.proj[a, u.src], w.proj[b, u.dst])
    chi = DispFunctor(identity_functor(B), types, sl, on_dobj, on_dmor, f"chi[{w.name}]")
    return ComprehensionCat(B, types, Cleaving(lifts, "split"), chi, f"cc({w.name})")


def check_comprehension_cat(cc: ComprehensionCat) -> Report:
    B = cc.base
    r = Report("comprehension", targets=(cc.name,))
    t = check_displayed_laws(cc.types)
    if not t.passed:
        return r.fail("types", t.findings[0].message, t.findings[0].witness)
    for (f, dd), (x, e) in sorted(cc.cleaving.lifts.items()):
        if is_cartesian(cc.types, (f, e)) is None:
            return r.fail("cleaving", f"chosen lift {e} of {f} at {dd} is not cartesian", (f, e))
    for m in B.morphisms:
        for dd in cc.types.fibre(m.dst):
            if (m.id, dd) not in cc.cleaving.lifts:
                return r.fail("cleaving", f"no chosen lift of {m.id} at {dd}", (m.id, dd))
    if cc.chi.base_functor != identity_functor(B):
        return r.fail("chi-base", "comprehension functor is not over the identity")
    if cc.chi.cod != slice_display(B):
        return r.fail("chi-target", "comprehension functor does not land in the slice display")
    law = check_disp_functor(cc.chi)
    if not law.passed:
        return r.fail("chi-functor", law.findings[0].message, law.findings[0].witness)
    sl = cc.chi.cod
    for u in cc.types.dmors():
        if is_cartesian(cc.types, u) is not None and is_cartesian(sl, cc.chi.mor(u)) is None:
            return r.fail("chi-cartesian", f"{u.id} over {u.base} is cartesian but its image is not",
                          tuple(u))
    tot = total_functor(cc.chi)
    p_types, p_slice = cc.types.total.projection, sl.total.projection
    triangle = all(p_slice.on_obj[tot.on_obj[o]] == p_types.on_obj[o] for o in tot.on_obj) and \
        all(p_slice.on_mor[tot.on_mor[m]] == p_types.on_mor[m] for m in tot.on_mor)
    r.details["strict_triangle"] = triangle
    if not triangle:
        r.fail("triangle", "chi does not commute strictly with the projections")
    return r
