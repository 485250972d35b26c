import dataclasses
import math

import pytest

from dispcat import fixtures as fx
from dispcat.core import (
    FinCat,
    Presheaf,
    check_category_laws,
    check_equivalence,
    check_functor_laws,
    check_nat_trans,
    check_presheaf_laws,
    composition_mutants,
    enumerate_functors,
    enumerate_nat_trans,
    functor_category,
    identity_functor,
    is_iso,
    isomorphism_of_categories,
    isomorphisms,
    mutation_check,
    opposite,
    product,
    representable,
    terminal_functor,
)
from dispcat.errors import MalformedInput, UnknownMorphism, UnknownObject

DIVISORS = (1, 2, 3, 4, 6, 12)


@pytest.mark.parametrize("name", sorted(fx.all_categories()))
def test_fixtures_are_lawful(name):
    assert check_category_laws(fx.all_categories()[name]).passed


def test_div12_shape():
    c = fx.div12()
    assert set(c.objects) == {str(d) for d in DIVISORS}
    pairs = [(a, b) for a in DIVISORS for b in DIVISORS if b % a == 0]
    assert len(c.morphisms) == len(pairs) == 18


def test_composition_is_diagrammatic():
    c = fx.div12()
    assert c.compose("d1_2", "d2_4") == "d1_4"
    assert c.compose("id_2", "d2_4") == "d2_4"
    with pytest.raises(MalformedInput):
        c.compose("d2_4", "d1_2")


def test_unknown_ids_raise():
    c = fx.two()
    with pytest.raises(UnknownObject):
        c.check_object("z")
    with pytest.raises(UnknownMorphism):
        c.mor("nope")


def test_missing_composite_reported():
    c = FinCat.build(["a", "b", "c"], [("f", "a", "b"), ("g", "b", "c"), ("h", "a", "c")],
                     lambda f, g: "h")
    broken = dataclasses.replace(c, comp={})
    r = check_category_laws(broken)
    assert not r.passed
    assert r.findings[0].code == "missing-comp"
    assert r.witness == ("f", "g")


def test_associativity_failure_has_first_triple():
    c = FinCat.build(["a"], [("e", "a", "a"), ("k", "a", "a")],
                     lambda f, g: {("e", "e"): "k", ("e", "k"): "k", ("k", "e"): "e", ("k", "k"): "k"}[f, g])
    r = check_category_laws(c)
    assert r.findings[0].code == "associativity"
    assert r.witness == ("e", "e", "e")


def test_identity_pair_in_table_rejected():
    c = fx.two()
    bad = dataclasses.replace(c, comp={("id_a", "f"): "f"})
    assert check_category_laws(bad).findings[0].code == "identity-entry"


def test_equality_ignores_listing_order():
    c = fx.two()
    shuffled = FinCat(tuple(reversed(c.objects)), tuple(reversed(c.morphisms)), dict(c.identity), dict(c.comp))
    assert shuffled == c
    assert hash(shuffled) == hash(c)


def test_mutations_of_div12_all_rejected():
    r = mutation_check(fx.div12())
    assert r.passed
    # 10 non-identity composable pairs, 17 alternative values each
    assert r.details == {"composable_pairs": 10, "mutants": 170}


def test_mutation_of_bz2_gives_idempotent_monoid():
    # one composable pair only: s;s = s is again a lawful monoid
    (key, other, mutant), = list(composition_mutants(fx.bz2()))
    assert (key, other) == (("s", "s"), "s")
    assert check_category_laws(mutant).passed
    assert not mutation_check(fx.bz2()).passed


def test_opposite_is_involution():
    for c in fx.all_categories().values():
        assert opposite(opposite(c)) == c
        assert check_category_laws(opposite(c)).passed


def test_product_counts():
    p = product(fx.two(), fx.walking_iso())
    assert len(p.objects) == 4
    assert len(p.morphisms) == 3 * 4
    assert check_category_laws(p).passed


def test_isomorphisms():
    assert {f for f, _ in isomorphisms(fx.walking_iso())} == {"id_a", "id_b", "i", "j"}
    assert is_iso(fx.walking_iso(), "i") == "j"
    assert is_iso(fx.two(), "f") is None
    assert {f for f, _ in isomorphisms(fx.div12())} == {f"id_{d}" for d in DIVISORS}


def test_functor_enumeration_counts():
    # Two -> Two: const a, const b, identity
    assert len(enumerate_functors(fx.two(), fx.two())) == 3
    # every pair of objects of WIso is joined by exactly one arrow
    assert len(enumerate_functors(fx.two(), fx.walking_iso())) == 4
    for F in enumerate_functors(fx.two(), fx.div12()):
        assert check_functor_laws(F).passed
    # monotone maps from a 2-chain into the divisor lattice = divisibility pairs
    assert len(enumerate_functors(fx.two(), fx.div12())) == 18


def test_nat_trans_and_functor_category():
    fc = functor_category(fx.two(), fx.two())
    assert len(fc.category.objects) == 3
    assert check_category_laws(fc.category).passed
    ident = identity_functor(fx.two())
    for a in enumerate_nat_trans(ident, ident):
        assert check_nat_trans(a).passed


def test_equivalences():
    one = fx.one()
    assert check_equivalence(terminal_functor(fx.walking_iso(), one)).passed
    assert not isomorphism_of_categories(terminal_functor(fx.walking_iso(), one))
    r = check_equivalence(terminal_functor(fx.two(), one))
    assert not r.passed
    assert isomorphism_of_categories(identity_functor(fx.div12()))


def test_divisor_presheaf():
    p = fx.divisor_presheaf()
    assert check_presheaf_laws(p).passed
    for d in DIVISORS:
        assert len(p.sets[str(d)]) == sum(1 for e in DIVISORS if d % e == 0)
    # restriction along 4 | 12 is gcd with 4
    assert p.restrict["d4_12"]["6"] == str(math.gcd(6, 4))


def test_representable_and_bad_presheaf():
    y = representable(fx.two(), "b")
    assert check_presheaf_laws(y).passed
    assert {k: len(v) for k, v in y.sets.items()} == {"a": 1, "b": 1}
    bad = Presheaf(fx.two(), {"a": ("x", "y"), "b": ("z",)},
                   {"id_a": {"x": "x", "y": "y"}, "id_b": {"z": "z"}, "f": {"z": "q"}})
    assert not check_presheaf_laws(bad).passed
