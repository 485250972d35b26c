"""Gauntness of categories and displays, structure notions and amnestic functors.

At set level a category is univalent exactly when it is gaunt: no iso joins
distinct objects and the only automorphism that is an iso is the identity.
The implications between these notions are evaluated per instance and reported
as checked implications.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from .core import FinCat, FunctorData, NatTransData, isomorphism_of_categories, isomorphisms
from .displayed import (
    DispCat,
    endofunctor_algebra_display,
    fibre_category,
    make_display,
    monad_algebra_display,
    monad_algebras,
    square,
)
from .errors import NotClosed, NotUnivalentDisplay
from .fibrations import enumerate_cleavings, is_displayed_iso, lift_table
from .report import Report


def is_identity_morphism(c: FinCat, f: str) -> bool:
    m = c.mor(f)
    return m.src == m.dst and c.identity[m.src] == f


def is_univalent_category(c: FinCat) -> Report:
    r = Report("univalence-category", targets=(c.name,))
    for f, g in isomorphisms(c):
        m = c.mor(f)
        if m.src != m.dst:
            return r.fail("iso-between-distinct", f"{f} : {m.src} -> {m.dst} is an iso with inverse {g}",
                          (f, g))
        if not is_identity_morphism(c, f):
            return r.fail("nontrivial-automorphism", f"{f} is an iso {m.src} -> {m.src} other than the identity",
                          (f, g))
    return r


def is_univalent_display(d: DispCat) -> Report:
    """Fibrewise gauntness, cross-checked against displayed isos over identities."""
    r = Report("univalence-display", targets=(d.name,))
    B = d.base
    fibrewise = None
    for c in sorted(B.objects):
        sub = is_univalent_category(fibre_category(d, c))
        if not sub.passed:
            fibrewise = (c,) + tuple(sub.findings[0].witness)
            break
    direct = None
    for c in sorted(B.objects):
        i = B.identity[c]
        for x in sorted(d.fibre(c)):
            for y in sorted(d.fibre(c)):
                isos = [e for e in d.hom(i, x, y) if is_displayed_iso(d, (i, e)) is not None]
                expected = [d.did[c, x]] if x == y else []
                if isos != expected:
                    direct = (c, isos[0] if isos else "", x, y)
                    break
            if direct:
                break
        if direct:
            break
    r.details.update(fibrewise=fibrewise is None, direct=direct is None)
    if (fibrewise is None) != (direct is None):
        return r.fail("disagreement", "fibrewise and direct univalence verdicts differ",
                      fibrewise or direct)
    if fibrewise is not None:
        c, f = fibrewise[0], fibrewise[1]
        r.fail("fibre-not-gaunt", f"fibre over {c} has the non-trivial iso {f}", fibrewise)
    return r


def total_univalence_check(d: DispCat) -> Report:
    """Base univalent and display univalent imply total univalent."""
    r = Report("univalence-total", targets=(d.name,))
    base = is_univalent_category(d.base).passed
    disp = is_univalent_display(d).passed
    total = is_univalent_category(d.total.category)
    r.details.update(base=base, display=disp, total=total.passed, vacuous=not (base and disp))
    if base and disp and not total.passed:
        r.fail("implication", "base and display are univalent but the total is not",
               total.findings[0].witness)
    return r


def unique_cartesian_lifts_check(d: DispCat, bound: int | None = None) -> Report:
    """Over a univalent display, at most one cartesian lift, hence at most one cleaving."""
    u = is_univalent_display(d)
    if not u.passed:
        raise NotUnivalentDisplay(u.findings[0].message)
    r = Report("unique-lifts", targets=(d.name,))
    table = lift_table(d)
    worst = max((len(v) for v in table.values()), default=0)
    weak = all(table.values())
    r.details.update(max_lifts=worst, weak_fibration=weak)
    for (f, dd), v in table.items():
        if len(v) > 1:
            return r.fail("several-lifts", f"{len(v)} cartesian lifts of {f} at {dd}",
                          (f, dd) + tuple(e for _, e in v))
    if weak:
        n = len(enumerate_cleavings(d, table, bound))
        r.details["cleavings"] = n
        if n != 1:
            r.fail("cleavings", f"{n} cleavings of a univalent fibration")
    return r


# ----------------------------------------------------------------------------
# structure identity principle

@dataclass(frozen=True)
class StandardStructure:
    """Structures ``P(c)`` and a structured-morphism predicate ``H(alpha, beta, f)``."""
    base: FinCat
    P: dict[str, tuple[str, ...]]
    H: Callable[[str, str, str], bool] = field(compare=False)
    name: str = field(default="", compare=False)

    def table(self) -> frozenset[tuple[str, str, str]]:
        """All (f, alpha, beta) with H true."""
        B = self.base
        return frozenset((m.id, a, b) for m in B.morphisms for a in self.P.get(m.src, ())
                         for b in self.P.get(m.dst, ()) if self.H(a, b, m.id))

    @classmethod
    def from_table(cls, base: FinCat, P: dict, table, name: str = "") -> "StandardStructure":
        rows = frozenset(table)
        return cls(base, {c: tuple(P.get(c, ())) for c in base.objects},
                   lambda a, b, f: (f, a, b) in rows, name)


def structure_closure(s: StandardStructure) -> Report:
    B = s.base
    r = Report("structure-closure", targets=(s.name,))
    for c in sorted(B.objects):
        for a in s.P.get(c, ()):
            if not s.H(a, a, B.identity[c]):
                return r.fail("identity", f"identity on {c} is not structured at {a}", (B.identity[c], a))
    for f, g in B.composable_pairs():
        for a in s.P.get(B.src(f), ()):
            for b in s.P.get(B.dst(f), ()):
                if not s.H(a, b, f):
                    continue
                for e in s.P.get(B.dst(g), ()):
                    if s.H(b, e, g) and not s.H(a, e, B.compose(f, g)):
                        return r.fail("composition", f"{f} and {g} are structured but {B.compose(f, g)} "
                                      f"is not at ({a}, {e})", (f, g, a, b, e))
    return r


def structure_antisymmetry(s: StandardStructure) -> tuple | None:
    """First pair with alpha <= beta <= alpha but alpha != beta."""
    B = s.base
    for c in sorted(B.objects):
        i = B.identity[c]
        for a in s.P.get(c, ()):
            for b in s.P.get(c, ()):
                if a != b and s.H(a, b, i) and s.H(b, a, i):
                    return (c, a, b)
    return None


def sip_to_display(s: StandardStructure, name: str = "") -> DispCat:
    r = structure_closure(s)
    if not r.passed:
        raise NotClosed(r.findings[0].message)
    return make_display(s.base, s.P, lambda f, a, b: (square(a, b),) if s.H(a, b, f) else (),
                        lambda c, a: square(a, a), lambda u, v: square(u.src, v.dst),
                        name or f"sip({s.name})")


def sip_univalence_check(s: StandardStructure) -> Report:
    """Antisymmetry iff display univalent; with a univalent base the total is univalent."""
    d = sip_to_display(s)
    r = Report("sip", targets=(s.name,))
    anti = structure_antisymmetry(s)
    disp = is_univalent_display(d).passed
    base = is_univalent_category(s.base).passed
    total = is_univalent_category(d.total.category).passed
    r.details.update(standard=anti is None, display_univalent=disp, base_univalent=base,
                     total_univalent=total)
    if anti is not None:
        r.details["antisymmetry_witness"] = list(anti)
        r.notes.append(f"not a standard structure: {anti[1]} and {anti[2]} over {anti[0]} are "
                       "related both ways")
    if (anti is None) != disp:
        r.fail("disagreement", "antisymmetry and display univalence disagree", anti or ())
    if base and disp and not total:
        r.fail("implication", "base and structures univalent but the total is not")
    return r


def algebra_structure(F: FunctorData, algebras: dict[str, tuple[str, ...]] | None = None) -> StandardStructure:
    C = F.dom
    P = algebras or {c: C.hom(F.on_obj[c], c) for c in C.objects}
    return StandardStructure(C, P, lambda a, b, f: C.compose(a, f) == C.compose(F.on_mor[f], b),
                             f"alg({F.name})")


def algebra_display_univalence(F: FunctorData, mu: NatTransData | None = None,
                               eta: NatTransData | None = None) -> Report:
    """Algebra displays are univalent and come from a structure notion."""
    r = Report("algebra-univalence", targets=(F.name,))
    if mu is None:
        d = endofunctor_algebra_display(F)
        s = algebra_structure(F)
        matches = sip_to_display(s) == d
    else:
        d = monad_algebra_display(F, mu, eta)
        P: dict[str, list[str]] = {c: [] for c in F.dom.objects}
        for c, a in monad_algebras(F, mu, eta):
            P[c].append(a)
        s = algebra_structure(F, {c: tuple(v) for c, v in P.items()})
        matches = _matches_monad_display(sip_to_display(s), d)
    u = is_univalent_display(d)
    r.details.update(univalent=u.passed, structure_matches=matches,
                     standard=structure_antisymmetry(s) is None)
    if not matches:
        r.fail("presentation", "the display does not coincide with its structure presentation")
    if not u.passed:
        r.fail("not-univalent", u.findings[0].message, u.findings[0].witness)
    return r


def _matches_monad_display(sip: DispCat, d: DispCat) -> bool:
    ts, td = sip.total, d.total
    on_obj = {k: f"{k}|tt" for k in ts.objects}
    on_mor = {k: f"{k}|tt" for k in ts.morphisms}
    if not set(on_obj.values()) <= set(td.objects) or not set(on_mor.values()) <= set(td.morphisms):
        return False
    return isomorphism_of_categories(FunctorData(ts.category, td.category, on_obj, on_mor))


# ----------------------------------------------------------------------------
# amnestic functors

def is_amnestic(F: FunctorData) -> Report:
    """An iso of the domain is an identity exactly when its image is."""
    r = Report("amnestic", targets=(F.name,))
    for i, _ in isomorphisms(F.dom):
        a, b = is_identity_morphism(F.dom, i), is_identity_morphism(F.cod, F.on_mor[i])
        if a != b:
            return r.fail("identity-reflection", f"{i} is{'' if a else ' not'} an identity but "
                          f"{F.on_mor[i]} is{'' if b else ' not'}", (i, F.on_mor[i]))
    return r


def amnestic_iff_univalent_check(d: DispCat) -> Report:
    r = Report("amnestic-univalent", targets=(d.name,))
    u = is_univalent_display(d).passed
    a = is_amnestic(d.total.projection).passed
    r.details.update(univalent=u, amnestic=a)
    if u != a:
        r.fail("disagreement", f"univalent={u} but amnestic={a}")
    return r
