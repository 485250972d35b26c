"""Regenerate the shipped declaration files under src/dispcat/corpus.

Tables that are tedious to write by hand (FinSet2, magma structures, the
divisor presheaf, diagrams in total categories) are emitted from the Python
fixtures; everything else is written as derived one-line declarations.
Running this twice produces identical files.
"""
from __future__ import annotations

from pathlib import Path

from dispcat import fixtures as fx
from dispcat.core import NatTransData, compose_functors, identity_functor
from dispcat.displayed import endofunctor_algebra_display, slice_display
from dispcat.dsl import (
    emit_category,
    emit_cwa,
    emit_diagram,
    emit_display,
    emit_functor,
    emit_presheaf,
    emit_structure,
)
from dispcat.fibrations import presheaf_to_discrete_fibration
from dispcat.limits import Diagram, STANDARD_SHAPES

OUT = Path(__file__).resolve().parent.parent / "src" / "dispcat" / "corpus"

HEADER = "# generated by scripts/regen_corpus.py; edit the script, not this file\n\n"

PARALLEL_COLLAPSE = """\
# u is not cartesian: both the identity and the idempotent e factor u through u
display ParallelCollapse over Two
  dobj a : x
  dobj b : y
  dmor idx : x -> x over id_a
  dmor e : x -> x over id_a
  dmor idy : y -> y over id_b
  dmor u : x -> y over f
  did x = idx
  dcomp e e = e
  dcomp e u = u
end
"""


def categories() -> str:
    cats = [fx.one(), fx.two(), fx.walking_iso(), fx.bz2(), fx.div12(), fx.finset2(), fx.finset2_rigid()]
    parts = [emit_category(c, c.name) for c in cats]
    parts.append(emit_category(fx.disjoint_union(fx.two(), fx.two()), "TwoTwo"))
    return HEADER + "\n".join(parts)


def displays() -> str:
    lines = [
        "display Slice_Div12 = slice Div12",
        "display Coslice_Div12 = coslice Div12",
        "display Arrow_Div12 = arrow Div12",
        "display Arrow_Two = arrow Two",
        "display ConstWIso = const Div12 WIso",
        "display ConstTwo = const Two Two",
        "display ConstBZ2 = const One BZ2",
        "display FullSub_Div12 = fullsub Div12 : 1 12",
        "display FullAll_WIso = fullsub WIso : a b",
        "display Slice_Two_Op = op Slice_Two",
        "category Total_ConstTwo = total ConstTwo",
        "display Fam_ConstTwo = slice Total_ConstTwo",
        "display Sigma_ConstTwo = sigma ConstTwo Fam_ConstTwo",
        "category Fibre_Slice_Div12_12 = fibre Slice_Div12 12",
        "functor Pr_ConstWIso = pr1 ConstWIso",
        "functor Bang_WIso = terminal WIso One",
        "display FromBang_WIso = fromfunctor Bang_WIso",
    ]
    # one construction written out in full, to exercise the block form
    explicit = emit_display(slice_display(fx.two()), "Slice_Two", "Two")
    return HEADER + explicit + "\n" + "\n".join(lines) + "\n\n" + PARALLEL_COLLAPSE


def algebras() -> str:
    c = fx.div12()
    parts = []
    ends = fx.monotone_endofunctors()
    for name, F in ends.items():
        parts.append(emit_functor(F, name, "Div12", "Div12"))
    lines = [f"display Alg_{n} = algebra {n}" for n in ends]
    T = ends["Lcm2"]
    mu = NatTransData(compose_functors(T, T), T, {o: c.identity[T.on_obj[o]] for o in c.objects})
    eta = NatTransData(identity_functor(c), T,
                       {o: fx.div_mor(int(o), fx.lcm(int(o), 2)) for o in c.objects})
    monad = [
        "functor Lcm2Lcm2 = compose Lcm2 Lcm2",
        "functor IdDiv12 = identity Div12",
        "functor IdId = compose IdDiv12 IdDiv12",
        "",
        "nattrans Lcm2Mu : Lcm2Lcm2 => Lcm2",
        *[f"  at {o} = {mu.components[o]}" for o in c.objects],
        "end",
        "",
        "nattrans Lcm2Eta : IdDiv12 => Lcm2",
        *[f"  at {o} = {eta.components[o]}" for o in c.objects],
        "end",
        "",
        "nattrans IdMu : IdId => IdDiv12",
        *[f"  at {o} = id_{o}" for o in c.objects],
        "end",
        "",
        "nattrans IdEta : IdDiv12 => IdDiv12",
        *[f"  at {o} = id_{o}" for o in c.objects],
        "end",
        "",
        "display MAlg_Lcm2 = monad Lcm2 Lcm2Mu Lcm2Eta",
        "display MAlg_Id = monad IdDiv12 IdMu IdEta",
        "functor IdWIso = identity WIso",
        "display Alg_IdWIso = algebra IdWIso",
    ]
    return HEADER + "\n".join(parts) + "\n" + "\n".join(lines + [""] + monad) + "\n"


def presheaves() -> str:
    parts = [
        emit_presheaf(fx.divisor_presheaf(), "Divisors", "Div12"),
        emit_presheaf(fx.terminal_presheaf(fx.div12()), "TerminalDiv12", "Div12"),
        emit_presheaf(fx.terminal_presheaf(fx.two()), "TerminalTwo", "Two"),
    ]
    # a discrete fibration written out in the canonical element naming
    explicit = emit_display(presheaf_to_discrete_fibration(fx.divisor_presheaf()), "ElDivisorsExplicit", "Div12")
    lines = [
        "presheaf Yb = representable Two b",
        "presheaf Y12 = representable Div12 12",
        "display El_Divisors = elements Divisors",
        "display El_Yb = elements Yb",
        "display El_TerminalTwo = elements TerminalTwo",
        "presheaf OfElYb = ofdisplay El_Yb",
    ]
    return HEADER + "\n".join(parts) + "\n" + explicit + "\n" + "\n".join(lines) + "\n"


def limits() -> str:
    graphs = [f"graph {n} = {n.lower()}" for n in STANDARD_SHAPES]
    parts = [
        "diagram Prod46 : Pair in Div12\n  node a = 4\n  node b = 6\nend\n",
        "diagram Cospan46 : Cospan in Div12\n  node a = 4\n  node b = 6\n  node c = 12\n"
        "  edge f = d4_12\n  edge g = d6_12\nend\n",
        "diagram Nothing : Empty in Div12\nend\n",
        "diagram NoProduct : Pair in TwoTwo\n  node a = l.a\n  node b = r.a\nend\n",
        "cone Meet46 on Cospan46\n  vertex 2\n  leg a = d2_4\n  leg b = d2_6\n  leg c = d2_12\nend\n",
        "cone Below46 on Cospan46\n  vertex 1\n  leg a = d1_4\n  leg b = d1_6\n  leg c = d1_12\nend\n",
    ]
    alg = endofunctor_algebra_display(fx.monotone_endofunctors()["Gcd6"])
    t = alg.total
    obj = {x: t.obj_id[x, a] for x in ("4", "6", "12") for a in alg.fibre(x)}
    mor = {(m.src, m.dst): m.id for m in t.category.morphisms}
    dgm = Diagram(STANDARD_SHAPES["Cospan"], t.category, {"a": obj["4"], "b": obj["6"], "c": obj["12"]},
                  {"f": mor[obj["4"], obj["12"]], "g": mor[obj["6"], obj["12"]]})
    parts.append(emit_diagram(dgm, "AlgCospan", "Cospan", "Alg_Gcd6"))
    pair = Diagram(STANDARD_SHAPES["Pair"], t.category, {"a": obj["4"], "b": obj["6"]}, {})
    parts.append(emit_diagram(pair, "AlgPair", "Pair", "Alg_Gcd6"))
    return HEADER + "\n".join(graphs) + "\n\n" + "\n".join(parts)


def structures() -> str:
    parts = [
        emit_structure(fx.magma_structure(), "Magma", "FinSet2Rigid"),
        emit_structure(fx.loose_structure(), "Loose2", "FinSet2Rigid"),
    ]
    lines = ["display MagmaDisp = sip Magma", "display Loose2Disp = sip Loose2"]
    return HEADER + "\n".join(parts) + "\n" + "\n".join(lines) + "\n"


def cwas() -> str:
    parts = [
        emit_cwa(fx.div12_cwa(), "DivCwA", "Div12", "Divisors"),
        emit_cwa(fx.trivial_cwa(), "TrivialCwA", "Div12", "TerminalDiv12"),
    ]
    return HEADER + "\n".join(parts)


def squash() -> str:
    return (HEADER + "# commuting, functorial squares that are not pullbacks\n"
            + emit_cwa(fx.non_pullback_cwa(), "SquashCwA", "Div12", "TerminalDiv12"))


FILES = {
    "00_categories.dc": categories,
    "10_displays.dc": displays,
    "20_algebras.dc": algebras,
    "30_presheaves.dc": presheaves,
    "40_limits.dc": limits,
    "50_structures.dc": structures,
    "60_cwa.dc": cwas,
    "counterexamples/squash_cwa.dc": squash,
}


def main() -> None:
    for name, make in FILES.items():
        path = OUT / name
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(make(), encoding="utf-8")
        print(f"wrote {path.relative_to(OUT.parent.parent.parent)}")


if __name__ == "__main__":
    main()
