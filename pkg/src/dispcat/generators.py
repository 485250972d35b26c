"""Random small categories and displays, and the univalence sweep over them."""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from functools import lru_cache

from . import fixtures as fx
from .core import FinCat, FunctorData, enumerate_functors
from .displayed import (
    DispCat,
    constant_display,
    display_from_functor,
    full_sub_display,
    reindex,
)
from .errors import ResourceLimit
from .report import Report
from .univalence import amnestic_iff_univalent_check, total_univalence_check


@dataclass(frozen=True)
class SizeLimits:
    max_objects: int = 4
    max_morphisms: int = 10
    max_fibre: int = 3


def random_preorder(rng: random.Random, lim: SizeLimits = SizeLimits()) -> FinCat:
    """Transitive closure of a random relation; cycles give non-gaunt preorders."""
    while True:
        n = rng.randint(1, lim.max_objects)
        p = rng.choice((0.2, 0.35, 0.5))
        rel = {(i, i) for i in range(n)} | {(i, j) for i in range(n) for j in range(n)
                                            if i != j and rng.random() < p}
        changed = True
        while changed:
            changed = False
            for (a, b), (c, d) in itertools.product(list(rel), repeat=2):
                if b == c and (a, d) not in rel:
                    rel.add((a, d))
                    changed = True
        if len(rel) <= lim.max_morphisms:
            break
    mors = [(f"r{i}_{j}", f"o{i}", f"o{j}") for i, j in sorted(rel) if i != j]
    return FinCat.build([f"o{i}" for i in range(n)], mors,
                        lambda f, g: f"r{f.split('_')[0][1:]}_{g.split('_')[1]}"
                        if f.split('_')[0][1:] != g.split('_')[1] else f"id_o{g.split('_')[1]}",
                        name="Pre")


@lru_cache(maxsize=None)
def small_monoids(max_size: int = 3) -> tuple[FinCat, ...]:
    """Every monoid with at most ``max_size`` elements (labelled tables), as one-object categories."""
    out = []
    for k in range(max_size):
        elems = [f"m{i}" for i in range(k)]
        values = ["id_o"] + elems
        for table in itertools.product(values, repeat=k * k):
            mul = {(elems[i], elems[j]): table[i * k + j] for i in range(k) for j in range(k)}

            def op(x, y, mul=mul):
                if x == "id_o":
                    return y
                if y == "id_o":
                    return x
                return mul[x, y]

            if all(op(op(x, y), z) == op(x, op(y, z)) for x in values for y in values for z in values):
                out.append(FinCat.build(["o"], [(e, "o", "o") for e in elems], lambda f, g, op=op: op(f, g),
                                        name=f"Mon{len(out)}"))
    return tuple(out)


def random_category(rng: random.Random, lim: SizeLimits = SizeLimits()) -> FinCat:
    roll = rng.random()
    if roll < 0.5:
        return random_preorder(rng, lim)
    if roll < 0.7:
        return rng.choice(small_monoids())
    if roll < 0.85:
        return rng.choice([fx.one(), fx.two(), fx.walking_iso(), fx.bz2()])
    while True:
        c = fx.disjoint_union(rng.choice(small_monoids()), random_preorder(rng, lim))
        if len(c.objects) <= lim.max_objects and len(c.morphisms) <= lim.max_morphisms:
            return c


def random_functor(rng: random.Random, dom: FinCat, cod: FinCat, bound: int = 4000) -> FunctorData | None:
    try:
        fs = enumerate_functors(dom, cod, bound)
    except ResourceLimit:
        return None
    return rng.choice(fs) if fs else None


def _fits(d: DispCat, lim: SizeLimits) -> bool:
    return all(len(v) <= lim.max_fibre for v in d.dobjects.values())


def random_display(rng: random.Random, base: FinCat | None = None, lim: SizeLimits = SizeLimits()) -> DispCat:
    """A law-abiding display over a random (or given) base, built from a random construction."""
    base = base or random_category(rng, lim)
    while True:
        kind = rng.choice(("const", "fullsub", "functor", "functor", "reindex"))
        d = None
        if kind == "const":
            k = random_category(rng, SizeLimits(lim.max_fibre, lim.max_morphisms, lim.max_fibre))
            d = constant_display(base, k)
        elif kind == "fullsub":
            d = full_sub_display(base, [o for o in base.objects if rng.random() < 0.6])
        elif kind == "functor":
            e = random_category(rng, lim)
            p = random_functor(rng, e, base)
            d = display_from_functor(p) if p else None
        else:
            other = random_category(rng, lim)
            f = random_functor(rng, base, other)
            if f is not None:
                inner = random_display(rng, other, lim)
                d = reindex(inner, f)
        if d is not None and _fits(d, lim):
            return d


def random_displays(n: int, seed: int = 0, lim: SizeLimits = SizeLimits()) -> list[DispCat]:
    rng = random.Random(seed)
    return [random_display(rng, lim=lim) for _ in range(n)]


def univalence_sweep(displays: list[DispCat], label: str = "random") -> Report:
    """Total-univalence implication and amnestic agreement over many displays."""
    r = Report("univalence-sweep", targets=(label,))
    vacuous = nonvacuous = amnestic_agree = 0
    for i, d in enumerate(displays):
        t = total_univalence_check(d)
        if t.details["vacuous"]:
            vacuous += 1
        else:
            nonvacuous += 1
        if not t.passed:
            r.fail("implication", f"display #{i} ({d.name}): {t.findings[0].message}", (i,))
        a = amnestic_iff_univalent_check(d)
        if a.passed:
            amnestic_agree += 1
        else:
            r.fail("amnestic", f"display #{i} ({d.name}): {a.findings[0].message}", (i,))
    r.details.update(displays=len(displays), vacuous=vacuous, nonvacuous=nonvacuous,
                     amnestic_agreements=amnestic_agree)
    if displays and (vacuous == 0 or nonvacuous == 0):
        r.notes.append("sample lacks vacuous or non-vacuous instances")
    return r
