"""Command-line checker: parse declaration files, validate them, run one analysis.

Every command delegates to a single library operation and prints its Report
(text by default, JSON with ``--json``).  Exit codes: 0 pass, 1 fail, 2 error.
"""
from __future__ import annotations

import argparse
import os
import sys
import time
from pathlib import Path
from typing import Callable

from . import displayed as dsp
from . import fibrations as fib
from . import limits as lim
from . import univalence as uni
from .compcat import _cwa_shape, check_comprehension_cat, check_cwa, compcat_from_cwa
from .core import (
    FinCat,
    check_category_laws,
    check_equivalence,
    check_functor_laws,
    check_nat_trans,
    check_presheaf_laws,
    mutation_check,
)
from .dsl import Emitter, Workspace, parse_files
from .errors import DispCatError, MalformedInput, ParseError, UnknownCommand
from .generators import random_displays, univalence_sweep
from .report import Finding, Report

CORPUS = Path(__file__).resolve().parent / "corpus"
_UNSET = object()


def corpus_files(counterexamples: bool = False) -> list[Path]:
    """The shipped declaration files, in dependency order."""
    files = sorted(CORPUS.glob("*.dc"))
    if counterexamples:
        files += sorted((CORPUS / "counterexamples").glob("*.dc"))
    return files


# ----------------------------------------------------------------------------
# workspace validation

def _law_checks(ws: Workspace) -> list[tuple[str, str, Callable[[], Report]]]:
    out: list[tuple[str, str, Callable[[], Report]]] = []
    for n, c in ws.categories.items():
        out.append(("category", n, lambda c=c: check_category_laws(c)))
    for n, d in ws.displays.items():
        out.append(("display", n, lambda d=d: dsp.check_displayed_laws(d)))
    for n, f in ws.functors.items():
        out.append(("functor", n, lambda f=f: check_functor_laws(f)))
    for n, a in ws.nattrans.items():
        out.append(("nattrans", n, lambda a=a: check_nat_trans(a)))
    for n, p in ws.presheaves.items():
        out.append(("presheaf", n, lambda p=p: check_presheaf_laws(p)))
    for n, dgm in ws.diagrams.items():
        out.append(("diagram", n, lambda dgm=dgm: _diagram_check(dgm)))
    for n, (dn, cone) in ws.cones.items():
        out.append(("cone", n, lambda dn=dn, cone=cone: _cone_check(ws, dn, cone)))
    for n, s in ws.structures.items():
        out.append(("structure", n, lambda s=s: uni.structure_closure(s)))
    for n, w in ws.cwas.items():
        out.append(("cwa", n, lambda w=w: _cwa_structural(w)))
    return out


def _diagram_check(dgm: lim.Diagram) -> Report:
    r = Report("check-diagram", targets=(dgm.name,))
    try:
        dgm.check()
    except MalformedInput as exc:
        r.fail("ill-typed", str(exc))
    return r


def _cone_check(ws: Workspace, dn: str, cone: lim.Cone) -> Report:
    dgm = ws.diagrams[dn]
    r = Report("check-cone", targets=(dn, cone.vertex))
    if not lim.is_cone(dgm.target, dgm, cone):
        r.fail("not-a-cone", f"legs at {cone.vertex} do not form a cone over {dn}", (cone.vertex,))
    return r


def _cwa_structural(w) -> Report:
    """Types and typing of the declared tables; the CwA laws are left to ``compcat``."""
    r = Report("check-cwa", targets=(w.name,))
    law = check_presheaf_laws(w.Ty)
    if not law.passed:
        return r.fail("types", law.findings[0].message, law.witness)
    try:
        _cwa_shape(w)
    except DispCatError as exc:
        r.fail("shape", str(exc))
    return r


def check_workspace(ws: Workspace, mutations: bool = False, min_pairs: int = 3) -> Report:
    """Run every law check; with ``mutations`` also the mutation test on larger tables."""
    r = Report("check", targets=tuple(n for _, n in ws.order))
    counts: dict[str, int] = {}
    for kind, name, run in _law_checks(ws):
        counts[kind] = counts.get(kind, 0) + 1
        try:
            sub = run()
        except DispCatError as exc:
            r.fail("malformed", f"{kind} {name}: {exc}", (name,), str(ws.spans.get((kind, name), "")) or None)
            continue
        if not sub.passed:
            f = sub.findings[0]
            r.fail(f.code, f"{kind} {name}: {f.message}", f.witness, str(ws.spans[kind, name]))
    r.details["checked"] = counts
    if mutations:
        mutated = {}
        for name, c in ws.categories.items():
            if len(c.comp) < min_pairs:
                continue
            m = mutation_check(c)
            mutated[name] = m.details.get("mutants", 0)
            for f in m.findings:
                r.fail(f.code, f"category {name}: {f.message}", f.witness, str(ws.spans["category", name]))
        r.details["mutants"] = mutated
    return r


def _fail_fast(ws: Workspace) -> Report | None:
    r = check_workspace(ws)
    if r.passed:
        return None
    f = r.findings[0]
    err = Report("validate", "error", r.targets)
    err.findings.append(Finding("invalid-workspace", f.message, f.witness, f.span))
    return err


# ----------------------------------------------------------------------------
# commands; each returns a Report and a list of (name, object) to emit

Result = tuple[Report, list[tuple[str, object]]]


def _named(r: Report, *targets: str) -> Report:
    r.targets = tuple(targets)
    return r


def cmd_check(ws, a) -> Result:
    return check_workspace(ws, mutations=a.mutations), []


def cmd_total(ws, a) -> Result:
    d = ws.get("display", a.display)
    t = d.total.category.renamed(f"Total_{a.display}")
    r = check_category_laws(t)
    props = dsp.projection_properties(d)
    r.details.update(objects=len(t.objects), morphisms=len(t.morphisms), projection=props.details)
    return _named(r, a.display), [(t.name, t)]


def cmd_fibre(ws, a) -> Result:
    d = ws.get("display", a.display)
    d.base.check_object(a.at)
    c = dsp.fibre_category(d, a.at)
    c = c.renamed(f"Fibre_{a.display}_{a.at}")
    r = check_category_laws(c)
    r.details.update(objects=list(c.objects), morphisms=len(c.morphisms))
    return _named(r, a.display, a.at), [(c.name, c)]


def cmd_reindex(ws, a) -> Result:
    d = ws.get("display", a.display)
    F = ws.get("functor", a.along)
    e = dsp.reindex(d, F, f"{a.display}_along_{a.along}")
    r = dsp.check_displayed_laws(e)
    r.details.update(objects=len(list(e.objects())), morphisms=len(list(e.dmors())))
    return _named(r, a.display, a.along), [(e.name, e)]


def cmd_sigma(ws, a) -> Result:
    d = ws.get("display", a.display)
    e = ws.get("display", a.family)
    s = dsp.sigma_display(d, e, f"Sigma_{a.display}_{a.family}")
    r = dsp.check_displayed_laws(s)
    r.details.update(objects=len(list(s.objects())), morphisms=len(list(s.dmors())))
    return _named(r, a.display, a.family), [(s.name, s)]


EQUIVALENCE_TARGETS = {"constant": ("category", "fibre"), "sigma": ("display", "family"),
                       "slice": ("category",), "arrow": ("category",)}


def cmd_equivalence(ws, a) -> Result:
    targets = tuple(getattr(a, k) for k in EQUIVALENCE_TARGETS[a.kind])
    if None in targets:
        need = " ".join(f"--{k}" for k in EQUIVALENCE_TARGETS[a.kind])
        raise MalformedInput(f"equivalence --kind {a.kind} needs {need}")
    if a.kind == "constant":
        k = ws.get("category", a.fibre)
        F = dsp.constant_to_product(dsp.constant_display(ws.get("category", a.category), k), k)
    elif a.kind == "sigma":
        d, e = ws.get("display", a.display), ws.get("display", a.family)
        F = dsp.sigma_comparison(d, e, dsp.sigma_display(d, e))
    elif a.kind == "slice":
        c = ws.get("category", a.category)
        F = dsp.slice_comparison(dsp.slice_via_sigma(c), dsp.slice_display(c))
    else:
        c = ws.get("category", a.category)
        F = dsp.arrow_comparison(dsp.arrow_display(c), c)
    r = check_equivalence(F)
    r.details["comparison"] = F.name
    return _named(r, a.kind, *targets), []


def cmd_fibration(ws, a) -> Result:
    return fib.classify_fibration(ws.get("display", a.display), a.bound), []


def cmd_isofibration(ws, a) -> Result:
    return fib.isofibration_report(ws.get("display", a.display)), []


def cmd_discrete(ws, a) -> Result:
    return fib.is_discrete_fibration(ws.get("display", a.display)), []


def cmd_to_presheaf(ws, a) -> Result:
    d = ws.get("display", a.display)
    p = fib.discrete_fibration_to_presheaf(d, f"Presheaf_{a.display}")
    back = fib.presheaf_to_discrete_fibration(p)
    r = Report("to-presheaf", targets=(a.display,))
    again = fib.discrete_fibration_to_presheaf(back, p.name)
    canonical = fib.canonical_element_names(d)
    r.details.update(presheaf_round_trip=again == p, display_round_trip=back == d,
                     canonical_round_trip=back == canonical and back.name == canonical.name,
                     sets={c: list(v) for c, v in p.sets.items()})
    if again != p:
        r.fail("round-trip", "presheaf -> display -> presheaf changed the presheaf")
    if back != canonical:
        r.fail("round-trip", "display -> presheaf -> display differs beyond morphism names")
    if back != d:
        r.notes.append("morphism names differ from the element names; equal after renaming")
    return r, [(p.name, p)]


def cmd_from_presheaf(ws, a) -> Result:
    p = ws.get("presheaf", a.presheaf)
    d = fib.presheaf_to_discrete_fibration(p, f"El_{a.presheaf}")
    r = fib.is_discrete_fibration(d)
    r.command, r.targets = "from-presheaf", (a.presheaf,)
    back = fib.discrete_fibration_to_presheaf(d, p.name)
    r.details["presheaf_round_trip"] = back == p
    r.details["display_round_trip"] = fib.presheaf_to_discrete_fibration(back, d.name) == d
    if back != p:
        r.fail("round-trip", "display -> presheaf does not recover the presheaf")
    return r, [(d.name, d)]


def cmd_cartesian(ws, a) -> Result:
    c = ws.get("category", a.category)
    sl = dsp.slice_display(c)
    r = Report("cartesian", targets=(a.category,))
    counts = {"cartesian": 0, "not_cartesian": 0}
    for u in sl.dmors():
        sub = fib.cartesian_iff_pullback(c, u, sl)
        counts["cartesian" if sub.details["cartesian"] else "not_cartesian"] += 1
        for f in sub.findings:
            r.fail(f.code, f.message, f.witness)
    r.details.update(morphisms=sum(counts.values()), **counts)
    return r, []


def cmd_limits(ws, a) -> Result:
    dgm = ws.get("diagram", a.diagram)
    c = dgm.target
    if a.cone:
        dn, cone = ws.get("cone", a.cone)
        if dn != a.diagram:
            raise MalformedInput(f"cone {a.cone} is declared on {dn}, not {a.diagram}")
        r = lim.is_limiting(c, dgm, cone, a.bound)
        return _named(r, a.diagram, a.cone), []
    r = lim.limit_uniqueness(c, dgm, a.bound)
    r.command, r.targets = "limits", (a.diagram,)
    found = lim.find_limit(c, dgm, a.bound)
    if found is None:
        r.fail("no-limit", f"{a.diagram} has no limit in {c.name}")
    else:
        r.details["limit"] = {"vertex": found.vertex, "legs": dict(found.legs)}
    return r, []


def cmd_creates(ws, a) -> Result:
    d = ws.get("display", a.display)
    if a.shape:
        shape = ws.get("graph", a.shape)
        return lim.creates_limits_of_shape(d, shape, a.bound), []
    if not a.diagram:
        raise MalformedInput("creates needs --diagram or --shape")
    dgm = ws.get("diagram", a.diagram)
    if dgm.target != d.total.category:
        raise MalformedInput(f"diagram {a.diagram} does not live in the total category of {a.display}")
    proj = lim.project_diagram(d, dgm)
    r = Report("creates", targets=(a.display, a.diagram))
    cones = lim.limiting_cones(d.base, proj, a.bound)
    r.details["base_limits"] = len(cones)
    results = []
    for lam in cones:
        sub = lim.creates_limit(d, dgm, lam, a.bound)
        results.append({"vertex": lam.vertex, "verdict": sub.verdict, **sub.details})
        for f in sub.findings:
            r.fail(f.code, f.message, f.witness)
    r.details["cones"] = results
    if not cones:
        r.notes.append("the projected diagram has no limit; creation holds vacuously")
    return r, []


def cmd_univalence(ws, a) -> Result:
    if a.random is not None:
        return univalence_sweep(random_displays(a.random, a.seed), f"random{a.random}@{a.seed}"), []
    if a.category:
        return uni.is_univalent_category(ws.get("category", a.category)), []
    if not a.display:
        raise MalformedInput("univalence needs --display, --category or --random")
    d = ws.get("display", a.display)
    return (uni.total_univalence_check(d) if a.total else uni.is_univalent_display(d)), []


def cmd_lifts(ws, a) -> Result:
    return uni.unique_cartesian_lifts_check(ws.get("display", a.display), a.bound), []


def cmd_sip(ws, a) -> Result:
    return uni.sip_univalence_check(ws.get("structure", a.structure)), []


def cmd_amnestic(ws, a) -> Result:
    if a.functor:
        return uni.is_amnestic(ws.get("functor", a.functor)), []
    if a.random is not None:
        return univalence_sweep(random_displays(a.random, a.seed), f"random{a.random}@{a.seed}"), []
    if not a.display:
        raise MalformedInput("amnestic needs --functor, --display or --random")
    return uni.amnestic_iff_univalent_check(ws.get("display", a.display)), []


def cmd_compcat(ws, a) -> Result:
    w = ws.get("cwa", a.cwa)
    r = check_cwa(w)
    if not r.passed:
        return _named(r, a.cwa), []
    cc = compcat_from_cwa(w, check=False)
    sub = check_comprehension_cat(cc)
    r.command = "compcat"
    r.details["comprehension"] = sub.verdict
    r.details.update(sub.details)
    for f in sub.findings:
        r.fail(f.code, f.message, f.witness)
    return r, [(f"Ty_{a.cwa}", cc.types)]


COMMANDS: dict[str, Callable] = {
    "check": cmd_check, "total": cmd_total, "fibre": cmd_fibre, "reindex": cmd_reindex,
    "sigma": cmd_sigma, "equivalence": cmd_equivalence, "fibration": cmd_fibration,
    "isofibration": cmd_isofibration, "discrete": cmd_discrete, "to-presheaf": cmd_to_presheaf,
    "from-presheaf": cmd_from_presheaf, "cartesian": cmd_cartesian, "limits": cmd_limits,
    "creates": cmd_creates, "univalence": cmd_univalence, "lifts": cmd_lifts, "sip": cmd_sip,
    "amnestic": cmd_amnestic, "compcat": cmd_compcat,
}


# ----------------------------------------------------------------------------
# argument parsing

class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UnknownCommand(message)


def _common(defaults: bool) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    kw = {} if defaults else {"default": argparse.SUPPRESS}
    p.add_argument("--json", action="store_true", help="print the report as JSON", **kw)
    p.add_argument("--bound", type=int, help="resource bound for enumerations", **kw)
    p.add_argument("--emit", metavar="FILE", help="write constructed objects as declarations", **kw)
    p.add_argument("--no-corpus", action="store_true", help="do not load the shipped corpus first", **kw)
    p.add_argument("--counterexamples", action="store_true", help="also load shipped counterexamples", **kw)
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dispcat", description=__doc__.splitlines()[0], parents=[_common(True)])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    common = _common(False)

    def add(name: str, help: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help, parents=[common])
        p.add_argument("files", nargs="*", help="declaration files, read in order")
        return p

    add("check", "law-check every declaration").add_argument(
        "--mutations", action="store_true", help="also reject every single-entry comp mutation")
    add("total", "build and check the total category").add_argument("--display", required=True)
    p = add("fibre", "build and check a fibre category")
    p.add_argument("--display", required=True)
    p.add_argument("--at", required=True)
    p = add("reindex", "reindex a display along a functor")
    p.add_argument("--display", required=True)
    p.add_argument("--along", required=True)
    p = add("sigma", "Sigma of a display over the total of another")
    p.add_argument("--display", required=True)
    p.add_argument("--family", required=True)
    p = add("equivalence", "check a comparison functor is an equivalence")
    p.add_argument("--kind", required=True, choices=("constant", "sigma", "slice", "arrow"))
    for opt in ("--category", "--fibre", "--display", "--family"):
        p.add_argument(opt)
    for name, help in (("fibration", "classify cartesian lifts and cleavings"),
                       ("isofibration", "search for an iso cleaving"),
                       ("discrete", "check for a discrete fibration"),
                       ("to-presheaf", "discrete fibration to presheaf"),
                       ("lifts", "unique cartesian lifts over a univalent display")):
        add(name, help).add_argument("--display", required=True)
    add("from-presheaf", "presheaf to discrete fibration").add_argument("--presheaf", required=True)
    add("cartesian", "cartesian versus pullback on every slice morphism").add_argument(
        "--category", required=True)
    p = add("limits", "find a limit, or check a cone is limiting")
    p.add_argument("--diagram", required=True)
    p.add_argument("--cone")
    p = add("creates", "creation of limits by the projection")
    p.add_argument("--display", required=True)
    p.add_argument("--diagram")
    p.add_argument("--shape")
    p = add("univalence", "univalence of a category or display, or a random sweep")
    p.add_argument("--display")
    p.add_argument("--category")
    p.add_argument("--total", action="store_true", help="check the total-category implication")
    p.add_argument("--random", type=int, metavar="N")
    p.add_argument("--seed", type=int, default=0)
    add("sip", "structure identity principle").add_argument("--structure", required=True)
    p = add("amnestic", "amnestic functors and agreement with univalence")
    p.add_argument("--functor")
    p.add_argument("--display")
    p.add_argument("--random", type=int, metavar="N")
    p.add_argument("--seed", type=int, default=0)
    add("compcat", "CwA laws and the induced comprehension category").add_argument("--cwa", required=True)
    return parser


# ----------------------------------------------------------------------------
# entry point

def run(argv: list[str]) -> tuple[Report, int, str]:
    """Parse ``argv``, execute, and return the report, exit code and rendered output."""
    start = time.perf_counter()
    as_json = "--json" in argv
    saved_bound: object = _UNSET
    try:
        args = build_parser().parse_args(argv)
        as_json = args.json
        if args.command is None:
            raise UnknownCommand("no command given; try --help")
        if args.bound is not None:
            saved_bound = os.environ.get("DISPCAT_BOUND")
            os.environ["DISPCAT_BOUND"] = str(args.bound)
        files = [] if args.no_corpus else corpus_files(args.counterexamples)
        ws = parse_files([*files, *args.files])
        report = None if args.command == "check" else _fail_fast(ws)
        items: list = []
        if report is None:
            report, items = COMMANDS[args.command](ws, args)
        if args.emit and items:
            em = Emitter()
            for name, obj in items:
                if isinstance(obj, FinCat):
                    em.base(obj, name)
                elif isinstance(obj, dsp.DispCat):
                    em.display(obj, name)
                else:
                    em.presheaf(obj, name)
            Path(args.emit).write_text(em.text(), encoding="utf-8")
            report.notes.append(f"wrote {len(items)} declaration(s) to {args.emit}")
    except ParseError as exc:
        report = Report(_command(argv), "error")
        report.findings.append(_finding(exc, str(exc.span) if exc.span else None))
    except DispCatError as exc:
        report = Report(_command(argv), "error")
        report.findings.append(_finding(exc, None))
    finally:
        if saved_bound is not _UNSET:
            if saved_bound is None:
                os.environ.pop("DISPCAT_BOUND", None)
            else:
                os.environ["DISPCAT_BOUND"] = saved_bound
    report.timing = round(time.perf_counter() - start, 4)
    code = {"pass": 0, "fail": 1}.get(report.verdict, 2)
    return report, code, report.to_json() if as_json else report.summary()


def _command(argv: list[str]) -> str:
    return next((a for a in argv if a in COMMANDS), "dispcat")


def _finding(exc: Exception, span: str | None) -> Finding:
    return Finding(type(exc).__name__, str(exc), (), span)


def main(argv: list[str] | None = None) -> int:
    report, code, text = run(sys.argv[1:] if argv is None else argv)
    print(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
