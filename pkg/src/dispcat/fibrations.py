"""Cartesian morphisms, cleavings, isofibrations and discrete fibrations."""
from __future__ import annotations

from dataclasses import dataclass
from math import prod

from .core import FinCat, Presheaf, check_presheaf_laws, is_iso
from .displayed import (
    DispCat,
    DispFunctor,
    DMor,
    make_display,
    op_display,
    slice_display,
    slice_witness,
)
from .errors import BaseNotIso, BaseNotUnivalent, MalformedInput, NotDiscrete, ResourceLimit
from .report import Report, default_bound


@dataclass(frozen=True)
class CartesianWitness:
    """A cartesian morphism with the unique factorisation for every probe."""
    dmor: DMor
    factorisations: dict[tuple[str, str, str], str]


@dataclass(frozen=True)
class Cleaving:
    """Chosen lifts: ``(f, dd) -> (d', fbar)``."""
    lifts: dict[tuple[str, str], tuple[str, str]]
    kind: str = "general"

    def lift(self, f: str, dd: str) -> tuple[str, str]:
        return self.lifts[f, dd]


@dataclass(frozen=True)
class DispIso:
    dmor: DMor
    inverse: DMor


def _as_dmor(d: DispCat, u) -> DMor:
    if isinstance(u, DMor):
        if u.id not in d.hom(u.base, u.src, u.dst):
            from .errors import UnknownMorphism
            raise UnknownMorphism(f"{u.id!r} is not a displayed morphism over {u.base!r}")
        return u
    f, e = u
    return d.locate(f, e)


def cartesian_probe(d: DispCat, u) -> tuple[CartesianWitness | None, tuple | None, tuple[str, ...]]:
    """Run every probe against ``u``; return (witness, first failing probe, its factorisations)."""
    u = _as_dmor(d, u)
    B = d.base
    c1 = B.src(u.base)
    found = {}
    for g in sorted(B.into(c1)):
        c2 = B.src(g)
        gf = B.compose(g, u.base)
        for x2 in sorted(d.fibre(c2)):
            for hb in d.hom(gf, x2, u.dst):
                cands = tuple(gb for gb in d.hom(g, x2, u.src)
                              if d.dcomp[g, gb, u.base, u.id] == hb)
                if len(cands) != 1:
                    return None, (g, x2, hb), cands
                found[g, x2, hb] = cands[0]
    return CartesianWitness(u, found), None, ()


def is_cartesian(d: DispCat, u) -> CartesianWitness | None:
    return cartesian_probe(d, u)[0]


def cartesian_report(d: DispCat, u) -> Report:
    u = _as_dmor(d, u)
    w, probe, cands = cartesian_probe(d, u)
    r = Report("cartesian", targets=(d.name, u.base, u.id))
    if w is None:
        g, x2, hb = probe
        what = "no factorisation" if not cands else f"{len(cands)} factorisations"
        r.fail("probe", f"probe ({g}, {x2}, {hb}) has {what}", probe + tuple(cands))
    return r


def is_opcartesian(d: DispCat, u, op: DispCat | None = None) -> CartesianWitness | None:
    """Opcartesian in ``d`` means cartesian in the opposite display."""
    u = _as_dmor(d, u)
    op = op or op_display(d)
    return is_cartesian(op, DMor(u.base, u.dst, u.src, u.id))


def cartesian_lifts(d: DispCat, f: str, dd: str) -> list[tuple[str, str, CartesianWitness]]:
    B = d.base
    m = B.mor(f)
    if dd not in d.fibre(m.dst):
        from .errors import UnknownObject
        raise UnknownObject(f"{dd!r} is not over {m.dst!r}")
    out = []
    for x in sorted(d.fibre(m.src)):
        for e in d.hom(f, x, dd):
            w = is_cartesian(d, DMor(f, x, dd, e))
            if w is not None:
                out.append((x, e, w))
    return out


def lift_table(d: DispCat) -> dict[tuple[str, str], list[tuple[str, str]]]:
    """All cartesian lifts for every (f, dd), in lexicographic order."""
    B = d.base
    return {(m.id, dd): [(x, e) for x, e, _ in cartesian_lifts(d, m.id, dd)]
            for m in sorted(B.morphisms) for dd in sorted(d.fibre(m.dst))}


def split_violation(d: DispCat, cl: Cleaving) -> tuple | None:
    """First violation of the two split equations, or None."""
    B = d.base
    for c in sorted(B.objects):
        for dd in sorted(d.fibre(c)):
            if cl.lifts[B.identity[c], dd] != (dd, d.did[c, dd]):
                return ("identity", B.identity[c], dd)
    for f, g in B.composable_pairs():
        for dd in sorted(d.fibre(B.dst(g))):
            x1, gb = cl.lifts[g, dd]
            x2, fb = cl.lifts[f, x1]
            want = (x2, d.dcomp[f, fb, g, gb])
            if cl.lifts[B.compose(f, g), dd] != want:
                return ("composite", f, g, dd)
    return None


def count_cleavings(table: dict[tuple[str, str], list]) -> int:
    """Number of cleavings: every (f, dd) chooses one of its cartesian lifts."""
    return prod(len(v) for v in table.values())


def enumerate_cleavings(d: DispCat, table=None, bound: int | None = None) -> list[Cleaving]:
    import itertools
    bound = default_bound() if bound is None else bound
    table = table if table is not None else lift_table(d)
    n = count_cleavings(table)
    if n > bound:
        raise ResourceLimit(f"{n} cleavings exceed bound {bound}")
    keys = list(table)
    return [Cleaving(dict(zip(keys, choice))) for choice in itertools.product(*(table[k] for k in keys))]


def find_split_cleaving(d: DispCat, table=None, bound: int | None = None) -> tuple[Cleaving | None, bool]:
    """Backtracking search; returns (cleaving or None, exhausted)."""
    bound = default_bound() if bound is None else bound
    B = d.base
    table = table if table is not None else lift_table(d)
    if any(not v for v in table.values()):
        return None, True
    fixed = {}
    for c in B.objects:
        for dd in d.fibre(c):
            fixed[B.identity[c], dd] = (dd, d.did[c, dd])
            if fixed[B.identity[c], dd] not in table[B.identity[c], dd]:
                return None, True
    keys = [k for k in table if k not in fixed]
    constraints: dict[tuple[str, str], list[tuple[str, str, str]]] = {k: [] for k in table}
    triples = [(f, g, dd) for f, g in B.composable_pairs() for dd in d.fibre(B.dst(g))]
    assign = dict(fixed)

    def ok(f, g, dd):
        if (g, dd) not in assign:
            return True
        x1, gb = assign[g, dd]
        if (f, x1) not in assign or (B.compose(f, g), dd) not in assign:
            return True
        x2, fb = assign[f, x1]
        return assign[B.compose(f, g), dd] == (x2, d.dcomp[f, fb, g, gb])

    for t in triples:
        f, g, dd = t
        constraints[g, dd].append(t)
        constraints[B.compose(f, g), dd].append(t)
        for x1 in d.fibre(B.src(g)):
            constraints[f, x1].append(t)
    steps = 0

    def search(i: int) -> bool:
        nonlocal steps
        if i == len(keys):
            return all(ok(*t) for t in triples)
        k = keys[i]
        for choice in table[k]:
            steps += 1
            if steps > bound:
                raise ResourceLimit
            assign[k] = choice
            if all(ok(*t) for t in constraints[k]) and search(i + 1):
                return True
            del assign[k]
        return False

    try:
        found = search(0)
    except ResourceLimit:
        return None, False
    return (Cleaving(dict(assign), "split") if found else None), True


def classify_fibration(d: DispCat, bound: int | None = None, opfibration: bool = True) -> Report:
    """Weak fibration (verdict), canonical cleaving, splitness, opfibration, discreteness."""
    bound = default_bound() if bound is None else bound
    r = Report("fibration", targets=(d.name,))
    table = lift_table(d)
    missing = [k for k, v in table.items() if not v]
    weak = not missing
    r.details["weak_fibration"] = weak
    r.details["lift_counts"] = {f"{f}@{dd}": len(v) for (f, dd), v in table.items()}
    if weak:
        canonical = Cleaving({k: v[0] for k, v in table.items()})
        r.details["canonical_cleaving"] = {f"{f}@{dd}": list(v) for (f, dd), v in canonical.lifts.items()}
        viol = split_violation(d, canonical)
        split, exhausted = find_split_cleaving(d, table, bound)
        r.details["split"] = {
            "fibres_are_sets": True,
            "canonical_is_split": viol is None,
            "canonical_violation": list(viol) if viol else None,
            "split_cleaving_found": split is not None,
            "search_exhausted": exhausted,
        }
        r.details["cleaving_count"] = count_cleavings(table)
        if split is None and not exhausted:
            r.notes.append(f"no split cleaving found (bound {bound})")
    else:
        f, dd = missing[0]
        r.fail("no-cartesian-lift", f"no cartesian lift of {f} at {dd}", (f, dd))
    if opfibration:
        r.details["weak_opfibration"] = all(lift_table(op_display(d)).values())
    r.details["discrete"] = is_discrete_fibration(d).passed
    return r


# ----------------------------------------------------------------------------
# isofibrations

def is_displayed_iso(d: DispCat, u) -> DispIso | None:
    u = _as_dmor(d, u)
    B = d.base
    inv = is_iso(B, u.base)
    if inv is None:
        raise BaseNotIso(f"{u.base} is not an isomorphism of {B.name}")
    a, b = B.src(u.base), B.dst(u.base)
    for e in d.hom(inv, u.dst, u.src):
        v = DMor(inv, u.dst, u.src, e)
        if d.compose(u, v).id == d.did[a, u.src] and d.compose(v, u).id == d.did[b, u.dst]:
            return DispIso(u, v)
    return None


def iso_lift_search(d: DispCat) -> tuple[Cleaving | None, tuple | None]:
    B = d.base
    lifts = {}
    for m in sorted(B.morphisms):
        if is_iso(B, m.id) is None:
            continue
        for dd in sorted(d.fibre(m.dst)):
            hit = None
            for x in sorted(d.fibre(m.src)):
                for e in d.hom(m.id, x, dd):
                    if is_displayed_iso(d, DMor(m.id, x, dd, e)) is not None:
                        hit = (x, e)
                        break
                if hit:
                    break
            if hit is None:
                return None, (m.id, dd)
            lifts[m.id, dd] = hit
    return Cleaving(lifts, "iso"), None


def find_iso_cleaving(d: DispCat) -> Cleaving | None:
    return iso_lift_search(d)[0]


def isofibration_report(d: DispCat) -> Report:
    r = Report("isofibration", targets=(d.name,))
    cl, missing = iso_lift_search(d)
    if cl is None:
        r.fail("no-iso-lift", f"no displayed iso over {missing[0]} into {missing[1]}", missing)
    else:
        r.details["iso_cleaving"] = {f"{f}@{dd}": list(v) for (f, dd), v in cl.lifts.items()}
    return r


def iso_cleaving_from_gaunt_base(d: DispCat) -> Cleaving:
    """Over a gaunt base every iso is an identity; lift it to the displayed identity."""
    from .univalence import is_univalent_category
    B = d.base
    r = is_univalent_category(B)
    if not r.passed:
        raise BaseNotUnivalent(r.findings[0].message)
    lifts = {(B.identity[c], dd): (dd, d.did[c, dd]) for c in B.objects for dd in d.fibre(c)}
    return Cleaving(lifts, "iso")


# ----------------------------------------------------------------------------
# discrete fibrations and presheaves

def is_discrete_fibration(d: DispCat) -> Report:
    B = d.base
    r = Report("discrete", targets=(d.name,))
    lifts = {}
    for m in sorted(B.morphisms):
        for dd in sorted(d.fibre(m.dst)):
            found = [(x, e) for x in sorted(d.fibre(m.src)) for e in d.hom(m.id, x, dd)]
            if len(found) != 1:
                return r.fail("lift-count", f"{len(found)} lifts of {m.id} at {dd}, expected one",
                              (m.id, dd) + tuple(e for _, e in found))
            lifts[m.id, dd] = found[0]
    not_cart = [(f, e) for (f, _), (_, e) in lifts.items() if is_cartesian(d, (f, e)) is None]
    split = split_violation(d, Cleaving(lifts, "discrete"))
    r.details.update(all_lifts_cartesian=not not_cart, split=split is None)
    if not_cart:
        r.fail("not-cartesian", f"lift {not_cart[0][1]} over {not_cart[0][0]} is not cartesian", not_cart[0])
    if split is not None:
        r.fail("not-split", "the induced cleaving violates a split equation", split)
    return r


def element_id(x: str, y: str) -> str:
    return f"{x}.{y}"


def presheaf_to_discrete_fibration(p: Presheaf, name: str = "") -> DispCat:
    """Category of elements, as a display: the unique lift of f at y is restrict(f)(y)."""
    law = check_presheaf_laws(p)
    if not law.passed:
        raise MalformedInput(law.findings[0].message)
    C = p.base

    def hom(f, x, y):
        return (element_id(x, y),) if p.restrict[f][y] == x else ()

    return make_display(C, p.sets, hom, lambda c, x: element_id(x, x),
                        lambda u, v: element_id(u.src, v.dst), name or f"el({p.name})")


def canonical_element_names(d: DispCat) -> DispCat:
    """Rename every morphism of a discrete fibration ``x -> y`` to the element name ``x.y``.

    Hom sets of a discrete fibration have at most one element, so this is an isomorphism
    that is the identity on objects; it is the form the elements construction produces.
    """
    r = is_discrete_fibration(d)
    if not r.passed:
        raise NotDiscrete(r.findings[0].message)
    new = {}
    for (f, x, y), fam in d.dmorphisms.items():
        for e in fam:
            new[f, e] = element_id(x, y)
    return DispCat(d.base, dict(d.dobjects),
                   {k: tuple(new[k[0], e] for e in fam) for k, fam in d.dmorphisms.items()},
                   {(c, x): element_id(x, x) for (c, x) in d.did},
                   {(f, new[f, e], g, new[g, e2]): new[d.base.compose(f, g), h]
                    for (f, e, g, e2), h in d.dcomp.items()}, d.name)


def discrete_fibration_to_presheaf(d: DispCat, name: str = "") -> Presheaf:
    r = is_discrete_fibration(d)
    if not r.passed:
        raise NotDiscrete(r.findings[0].message)
    B = d.base
    restrict = {}
    for m in B.morphisms:
        restrict[m.id] = {dd: next(x for x in d.fibre(m.src) if d.hom(m.id, x, dd))
                          for dd in d.fibre(m.dst)}
    return Presheaf(B, {c: d.fibre(c) for c in B.objects}, restrict, name or f"psh({d.name})")


def presheaf_map_to_disp_functor(p: Presheaf, q: Presheaf, phi: dict[str, dict[str, str]],
                                 dp: DispCat | None = None, dq: DispCat | None = None) -> DispFunctor:
    """A natural map of presheaves as a displayed functor between elements over the identity."""
    from .core import identity_functor
    dp = dp or presheaf_to_discrete_fibration(p)
    dq = dq or presheaf_to_discrete_fibration(q)
    on_dobj = {(c, x): phi[c][x] for c, x in dp.objects()}
    on_dmor = {}
    B = p.base
    for u in dp.dmors():
        on_dmor[u.base, u.id] = element_id(phi[B.src(u.base)][u.src], phi[B.dst(u.base)][u.dst])
    return DispFunctor(identity_functor(B), dp, dq, on_dobj, on_dmor, "phi")


def disp_functor_to_presheaf_map(G: DispFunctor) -> dict[str, dict[str, str]]:
    out: dict[str, dict[str, str]] = {c: {} for c in G.dom.base.objects}
    for (c, x), y in G.on_dobj.items():
        out[c][x] = y
    return out


def check_presheaf_map(p: Presheaf, q: Presheaf, phi: dict[str, dict[str, str]]) -> bool:
    B = p.base
    for m in B.morphisms:
        for y in p.sets[m.dst]:
            if phi[m.src][p.restrict[m.id][y]] != q.restrict[m.id][phi[m.dst][y]]:
                return False
    return True


# ----------------------------------------------------------------------------
# slices: cartesian versus pullback

def cartesian_iff_pullback(c: FinCat, u: DMor, sl: DispCat | None = None) -> Report:
    """``u`` is a slice-display morphism over k from f to g, carrying h with h;g = f;k."""
    from .limits import Square, is_pullback
    sl = sl or slice_display(c)
    if u.id not in sl.hom(u.base, u.src, u.dst):
        raise MalformedInput(f"{u.id!r} is not a morphism of the slice display of {c.name}")
    h = slice_witness(c, u)
    cart = is_cartesian(sl, u) is not None
    pb = is_pullback(c, Square(u.src, h, u.base, u.dst)).passed
    r = Report("cartesian-pullback", targets=(c.name, u.base, u.id))
    r.details.update(cartesian=cart, pullback=pb)
    if cart != pb:
        r.fail("disagreement", f"cartesian={cart} but pullback={pb}", tuple(u))
    return r


__all__ = [
    "CartesianWitness", "Cleaving", "DispIso", "is_cartesian", "cartesian_report", "is_opcartesian",
    "cartesian_lifts", "lift_table", "split_violation", "count_cleavings", "enumerate_cleavings",
    "find_split_cleaving", "classify_fibration", "is_displayed_iso", "find_iso_cleaving",
    "isofibration_report", "iso_cleaving_from_gaunt_base", "is_discrete_fibration",
    "presheaf_to_discrete_fibration", "discrete_fibration_to_presheaf", "canonical_element_names",
    "presheaf_map_to_disp_functor", "disp_functor_to_presheaf_map", "check_presheaf_map",
    "cartesian_iff_pullback",
]
