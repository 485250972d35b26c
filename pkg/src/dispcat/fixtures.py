"""The canonical fixture categories.

Div12 uses the arrow convention ``x -> y`` iff ``x`` divides ``y``, so 1 is
initial, 12 is terminal, products and pullbacks are gcds and coproducts
and pushouts are lcms.
"""
from __future__ import annotations

import itertools
from math import gcd

from .core import FinCat, FunctorData, Presheaf, terminal_category

DIVISORS_12 = (1, 2, 3, 4, 6, 12)


def one() -> FinCat:
    return terminal_category()


def two() -> FinCat:
    return FinCat.build(["a", "b"], [("f", "a", "b")], name="Two")


def walking_iso() -> FinCat:
    table = {("i", "j"): "id_a", ("j", "i"): "id_b"}
    return FinCat.build(["a", "b"], [("i", "a", "b"), ("j", "b", "a")],
                        lambda f, g: table[f, g], name="WIso")


def bz2() -> FinCat:
    return FinCat.build(["o"], [("s", "o", "o")], lambda f, g: "id_o", name="BZ2")


def div_mor(x: int, y: int) -> str:
    return f"id_{x}" if x == y else f"d{x}_{y}"


def divisibility(n: int = 12, name: str | None = None) -> FinCat:
    divs = [d for d in range(1, n + 1) if n % d == 0]
    mors = [(div_mor(x, y), str(x), str(y)) for x in divs for y in divs if x != y and y % x == 0]
    ends = {m: (int(s), int(t)) for m, s, t in mors}
    return FinCat.build([str(d) for d in divs], mors,
                        lambda f, g: div_mor(ends[f][0], ends[g][1]), name=name or f"Div{n}")


def div12() -> FinCat:
    return divisibility(12)


def lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


def div12_monotone(fn, name: str) -> FunctorData:
    """The endofunctor of Div12 given by a divisibility-monotone map."""
    c = div12()
    on_obj = {str(x): str(fn(x)) for x in DIVISORS_12}
    for x in DIVISORS_12:
        for y in DIVISORS_12:
            if y % x == 0 and fn(y) % fn(x) != 0:
                raise ValueError(f"{name} is not monotone at {x} | {y}")
    on_mor = {div_mor(x, y): div_mor(fn(x), fn(y)) for x in DIVISORS_12 for y in DIVISORS_12
              if y % x == 0}
    return FunctorData(c, c, on_obj, on_mor, name)


def fun_id(n: int, m: int, images: tuple[int, ...]) -> str:
    if n == m and images == tuple(range(n)):
        return f"id_s{n}"
    return f"s{n}_s{m}_" + ("".join(map(str, images)) or "e")


def finset(max_size: int = 2, exclude_nontrivial_bijections: bool = False, name: str | None = None) -> FinCat:
    """Sets {}, {0}, ..., {0..max_size-1} and all functions between them.

    With ``exclude_nontrivial_bijections`` the non-identity bijections are
    dropped; the result is closed under composition and gaunt.
    """
    sizes = range(max_size + 1)
    funcs = {}
    for n in sizes:
        for m in sizes:
            for images in itertools.product(range(m), repeat=n):
                if n == m and images == tuple(range(n)):
                    continue
                if exclude_nontrivial_bijections and n == m and len(set(images)) == n:
                    continue
                funcs[fun_id(n, m, images)] = (n, m, images)
    mors = [(k, f"s{n}", f"s{m}") for k, (n, m, _) in funcs.items()]

    def compose(f, g):
        n, _, fi = funcs[f]
        _, k, gi = funcs[g]
        return fun_id(n, k, tuple(gi[i] for i in fi))

    default = "FinSet2" if max_size == 2 and not exclude_nontrivial_bijections else (
        "FinSet2Rigid" if max_size == 2 else f"FinSet{max_size}")
    return FinCat.build([f"s{n}" for n in sizes], mors, compose, name=name or default)


def finset2() -> FinCat:
    return finset(2)


def finset2_rigid() -> FinCat:
    return finset(2, exclude_nontrivial_bijections=True)


def function_table(c: FinCat, f: str) -> tuple[int, ...]:
    """Images of a FinSet morphism, recovered from its id."""
    m = c.mor(f)
    n = int(m.src[1:])
    if c.is_identity(f):
        return tuple(range(n))
    code = f.rsplit("_", 1)[1]
    return () if code == "e" else tuple(int(ch) for ch in code)


def disjoint_union(c: FinCat, d: FinCat, name: str = "") -> FinCat:
    """Coproduct of categories; ids are prefixed ``l.`` and ``r.``."""
    def tag(p, x):
        return f"{p}.{x}"
    objects = [tag("l", o) for o in c.objects] + [tag("r", o) for o in d.objects]
    mors = ([(tag("l", m.id), tag("l", m.src), tag("l", m.dst)) for m in c.morphisms]
            + [(tag("r", m.id), tag("r", m.src), tag("r", m.dst)) for m in d.morphisms])
    identity = {tag("l", o): tag("l", i) for o, i in c.identity.items()}
    identity.update({tag("r", o): tag("r", i) for o, i in d.identity.items()})

    def compose(f, g):
        side, a = f.split(".", 1)
        _, b = g.split(".", 1)
        return tag(side, (c if side == "l" else d).compose(a, b))

    return FinCat.build(objects, mors, compose, identity, name=name or f"{c.name}+{d.name}")


def terminal_presheaf(c: FinCat) -> Presheaf:
    return Presheaf.build(c, {o: ("pt",) for o in c.objects}, {m.id: {"pt": "pt"} for m in c.morphisms},
                          name=f"1[{c.name}]")


def divisor_presheaf() -> Presheaf:
    """Over Div12: P(x) = divisors of x, restricted along a | b by gcd with a."""
    c = div12()
    sets = {str(x): tuple(str(d) for d in DIVISORS_12 if x % d == 0) for x in DIVISORS_12}
    restrict = {div_mor(a, b): {e: str(gcd(int(e), a)) for e in sets[str(b)]}
                for a in DIVISORS_12 for b in DIVISORS_12 if b % a == 0 and a != b}
    return Presheaf.build(c, sets, restrict, name="Divisors")


def all_categories() -> dict[str, FinCat]:
    cats = [one(), two(), walking_iso(), bz2(), div12(), finset2(), finset2_rigid()]
    return {c.name: c for c in cats}


def monotone_endofunctors() -> dict[str, FunctorData]:
    return {
        "Id": div12_monotone(lambda x: x, "Id"),
        "Gcd6": div12_monotone(lambda x: gcd(x, 6), "Gcd6"),
        "Lcm2": div12_monotone(lambda x: lcm(x, 2), "Lcm2"),
        "Const1": div12_monotone(lambda x: 1, "Const1"),
    }


__all__ = [
    "one", "two", "walking_iso", "bz2", "div12", "divisibility", "finset", "finset2",
    "finset2_rigid", "disjoint_union", "terminal_presheaf", "divisor_presheaf",
    "all_categories", "monotone_endofunctors", "div_mor", "function_table", "fun_id",
    "magma_structure", "loose_structure", "magma_id", "div12_cwa", "trivial_cwa", "non_pullback_cwa",
    "parallel_collapse",
]


def magma_id(n: int, table: tuple[int, ...]) -> str:
    return "m" + ("".join(map(str, table)) or "e")


def magma_structure(base: FinCat | None = None):
    """Binary operations on each finite set; structured maps are homomorphisms."""
    from .univalence import StandardStructure
    base = base or finset2_rigid()
    sizes = {o: int(o[1:]) for o in base.objects}
    ops = {}
    P = {}
    for o, n in sizes.items():
        tables = list(itertools.product(range(n), repeat=n * n))
        P[o] = tuple(magma_id(n, t) for t in tables)
        for t in tables:
            ops[o, magma_id(n, t)] = t

    def hom(a: str, b: str, f: str) -> bool:
        m = base.mor(f)
        n, k = sizes[m.src], sizes[m.dst]
        fa, fb = ops[m.src, a], ops[m.dst, b]
        img = function_table(base, f)
        return all(img[fa[x * n + y]] == fb[img[x] * k + img[y]] for x in range(n) for y in range(n))

    return StandardStructure(base, P, hom, f"Magma[{base.name}]")


def loose_structure(base: FinCat | None = None, size: int = 2):
    """Every map preserves every structure; fails antisymmetry once size >= 2."""
    from .univalence import StandardStructure
    base = base or finset2_rigid()
    labels = tuple(f"p{i}" for i in range(size))
    return StandardStructure(base, {o: labels for o in base.objects}, lambda a, b, f: True,
                             f"Loose{size}[{base.name}]")


def div12_cwa():
    """Types over G are divisors A of G; G.A = A, projections and substitutions are divisibility."""
    from .compcat import CwA
    c = div12()
    ty = divisor_presheaf()
    ext, proj, qmor = {}, {}, {}
    for G in DIVISORS_12:
        for A in ty.sets[str(G)]:
            ext[str(G), A] = A
            proj[str(G), A] = div_mor(int(A), G)
    for m in c.morphisms:
        G2 = int(m.src)
        for A in ty.sets[m.dst]:
            qmor[m.id, A] = div_mor(gcd(int(A), G2), int(A))
    return CwA(c, ty, ext, proj, qmor, "DivCwA")


def trivial_cwa(c: FinCat | None = None):
    """Singleton types with G.A = G and identity projections."""
    from .compcat import CwA
    c = c or div12()
    ty = terminal_presheaf(c)
    return CwA(c, ty, {(o, "pt"): o for o in c.objects}, {(o, "pt"): c.identity[o] for o in c.objects},
               {(m.id, "pt"): m.id for m in c.morphisms}, f"TrivialCwA[{c.name}]")


def non_pullback_cwa():
    """Commuting, functorial squares that are not pullbacks: G.A = 1 except over 12."""
    from .compcat import CwA
    c = div12()
    ty = terminal_presheaf(c)
    ext = {G: (12 if G == 12 else 1) for G in DIVISORS_12}
    return CwA(c, ty, {(str(G), "pt"): str(e) for G, e in ext.items()},
               {(str(G), "pt"): div_mor(ext[G], G) for G in DIVISORS_12},
               {(m.id, "pt"): div_mor(ext[int(m.src)], ext[int(m.dst)]) for m in c.morphisms},
               "SquashCwA")


def parallel_collapse():
    """Over Two: an idempotent e on x with e;u = u, so u has two factorisations of itself."""
    from .displayed import DispCat
    c = two()
    return DispCat(
        c,
        {"a": ("x",), "b": ("y",)},
        {("id_a", "x", "x"): ("e", "idx"), ("id_b", "y", "y"): ("idy",), ("f", "x", "y"): ("u",)},
        {("a", "x"): "idx", ("b", "y"): "idy"},
        {("id_a", "idx", "id_a", "idx"): "idx", ("id_a", "idx", "id_a", "e"): "e",
         ("id_a", "e", "id_a", "idx"): "e", ("id_a", "e", "id_a", "e"): "e",
         ("id_a", "idx", "f", "u"): "u", ("id_a", "e", "f", "u"): "u",
         ("f", "u", "id_b", "idy"): "u", ("id_b", "idy", "id_b", "idy"): "idy"},
        "ParallelCollapse",
    )
