import pytest

from dispcat import fixtures as fx
from dispcat.core import NatTransData, compose_functors, identity_functor, terminal_functor
from dispcat.displayed import constant_display, full_sub_display, slice_display
from dispcat.errors import NotClosed, NotUnivalentDisplay
from dispcat.univalence import (
    StandardStructure,
    algebra_display_univalence,
    amnestic_iff_univalent_check,
    is_amnestic,
    is_univalent_category,
    is_univalent_display,
    sip_to_display,
    sip_univalence_check,
    structure_antisymmetry,
    total_univalence_check,
    unique_cartesian_lifts_check,
)

GAUNT = {"One": True, "Two": True, "WIso": False, "BZ2": False, "Div12": True,
         "FinSet2": False, "FinSet2Rigid": True}


@pytest.mark.parametrize("name,expected", sorted(GAUNT.items()))
def test_category_univalence(name, expected):
    assert is_univalent_category(fx.all_categories()[name]).passed is expected


def test_failure_codes():
    assert is_univalent_category(fx.walking_iso()).findings[0].code == "iso-between-distinct"
    assert is_univalent_category(fx.bz2()).findings[0].code == "nontrivial-automorphism"


def test_constant_display_over_wiso_fibre():
    d = constant_display(fx.div12(), fx.walking_iso())
    r = is_univalent_display(d)
    assert not r.passed
    assert r.details == {"fibrewise": False, "direct": False}
    t = total_univalence_check(d)
    assert t.passed and t.details["vacuous"]
    assert not t.details["total"]


def test_univalent_display_gives_univalent_total():
    for d in (slice_display(fx.div12()), constant_display(fx.div12(), fx.two()),
              full_sub_display(fx.div12(), ["1", "6"])):
        t = total_univalence_check(d)
        assert t.passed
        assert t.details == {"base": True, "display": True, "total": True, "vacuous": False}


def test_unique_lifts():
    r = unique_cartesian_lifts_check(slice_display(fx.div12()))
    assert r.passed
    assert r.details["max_lifts"] == 1 and r.details["cleavings"] == 1
    with pytest.raises(NotUnivalentDisplay):
        unique_cartesian_lifts_check(constant_display(fx.two(), fx.walking_iso()))


def test_magma_structure():
    s = fx.magma_structure()
    # all binary operations on the empty set, a point and a two-element set
    assert [len(s.P[c]) for c in sorted(s.P)] == [1, 1, 16]
    r = sip_univalence_check(s)
    assert r.passed
    assert r.details == {"standard": True, "display_univalent": True, "base_univalent": True,
                         "total_univalent": True}


def test_loose_structure_is_not_standard():
    s = fx.loose_structure()
    assert structure_antisymmetry(s) is not None
    r = sip_univalence_check(s)
    assert r.passed  # the checked biconditional holds
    assert r.details["standard"] is False
    assert r.details["display_univalent"] is False
    assert not is_univalent_display(sip_to_display(s)).passed


def test_unclosed_structure_rejected():
    c = fx.two()
    s = StandardStructure(c, {"a": ("p",), "b": ("q",)}, lambda a, b, f: f != "id_a", "Broken")
    with pytest.raises(NotClosed):
        sip_to_display(s)


@pytest.mark.parametrize("name", ["Id", "Gcd6", "Lcm2", "Const1"])
def test_algebra_displays_univalent(name):
    r = algebra_display_univalence(fx.monotone_endofunctors()[name])
    assert r.passed
    assert r.details == {"univalent": True, "structure_matches": True, "standard": True}


def test_monad_algebra_display_univalent():
    c = fx.div12()
    T = fx.monotone_endofunctors()["Lcm2"]
    mu = NatTransData(compose_functors(T, T), T, {o: c.identity[T.on_obj[o]] for o in c.objects})
    eta = NatTransData(identity_functor(c), T, {o: fx.div_mor(int(o), fx.lcm(int(o), 2)) for o in c.objects})
    r = algebra_display_univalence(T, mu, eta)
    assert r.passed and r.details["structure_matches"]


def test_algebras_over_non_gaunt_base():
    r = algebra_display_univalence(identity_functor(fx.walking_iso()))
    assert r.passed


def test_amnestic():
    assert not is_amnestic(terminal_functor(fx.walking_iso(), fx.one())).passed
    assert is_amnestic(identity_functor(fx.walking_iso())).passed
    assert is_amnestic(slice_display(fx.div12()).total.projection).passed
    assert not is_amnestic(constant_display(fx.div12(), fx.walking_iso()).total.projection).passed


@pytest.mark.parametrize("d", [
    slice_display(fx.div12()),
    constant_display(fx.two(), fx.walking_iso()),
    constant_display(fx.walking_iso(), fx.two()),
    constant_display(fx.one(), fx.bz2()),
    fx.parallel_collapse(),
], ids=["slice", "const-wiso", "over-wiso", "const-bz2", "collapse"])
def test_amnestic_iff_univalent(d):
    r = amnestic_iff_univalent_check(d)
    assert r.passed
    assert r.details["univalent"] == r.details["amnestic"]
