"""Property tests over randomly generated small categories and displays."""
import random

from hypothesis import given, settings
from hypothesis import strategies as st

from dispcat.core import (
    check_category_laws,
    check_equivalence,
    identity_functor,
    isomorphism_of_categories,
    mutation_check,
    opposite,
)
from dispcat.displayed import (
    check_displayed_laws,
    constant_display,
    constant_to_product,
    fibre_category,
    op_display,
    projection_properties,
    reindex,
)
from dispcat.dsl import emit, parse_text
from dispcat.fibrations import is_cartesian, lift_table
from dispcat.generators import SizeLimits, random_category, random_display, random_preorder
from dispcat.report import Finding, Report
from dispcat.univalence import amnestic_iff_univalent_check, total_univalence_check

seeds = st.integers(min_value=0, max_value=2**32 - 1)
FAST = settings(max_examples=60, deadline=None)


def category(seed):
    return random_category(random.Random(seed))


def display(seed):
    return random_display(random.Random(seed))


@FAST
@given(seeds)
def test_random_categories_are_lawful(seed):
    c = category(seed)
    assert check_category_laws(c).passed
    assert opposite(opposite(c)) == c


@FAST
@given(seeds)
def test_composition_is_associative(seed):
    c = category(seed)
    for f, g in c.composable_pairs():
        for h in c.out_of(c.dst(g)):
            assert c.compose(c.compose(f, g), h) == c.compose(f, c.compose(g, h))


@FAST
@given(seeds)
def test_random_displays_are_lawful(seed):
    d = display(seed)
    assert check_displayed_laws(d).passed
    assert check_category_laws(d.total.category).passed
    assert projection_properties(d).passed
    for c in d.base.objects:
        assert check_category_laws(fibre_category(d, c)).passed


@FAST
@given(seeds)
def test_op_display_is_involution(seed):
    d = display(seed)
    assert op_display(op_display(d)) == d


@FAST
@given(seeds)
def test_reindex_along_identity_keeps_totals_isomorphic(seed):
    d = display(seed)
    r = reindex(d, identity_functor(d.base))
    assert check_displayed_laws(r).passed
    assert len(r.total.category.morphisms) == len(d.total.category.morphisms)


@FAST
@given(seeds, seeds)
def test_constant_total_is_product(s1, s2):
    c = category(s1)
    k = random_category(random.Random(s2), SizeLimits(3, 6, 3))
    F = constant_to_product(constant_display(c, k), k)
    assert isomorphism_of_categories(F)
    assert check_equivalence(F).passed


@FAST
@given(seeds)
def test_emit_parse_round_trip(seed):
    d = display(seed)
    ws = parse_text(emit([("D", d)]))
    assert ws.displays["D"] == d


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_preorder_mutations_rejected(seed):
    c = random_preorder(random.Random(seed))
    if len(c.comp) >= 3:
        assert mutation_check(c).passed


@settings(max_examples=150, deadline=None)
@given(seeds)
def test_total_univalence_implication(seed):
    d = display(seed)
    assert total_univalence_check(d).passed
    assert amnestic_iff_univalent_check(d).passed


@FAST
@given(seeds)
def test_lifts_are_cartesian(seed):
    d = display(seed)
    for (f, _), lifts in lift_table(d).items():
        for _, e in lifts:
            assert is_cartesian(d, (f, e)) is not None


ids = st.text(alphabet="abcxyz019_|.", min_size=1, max_size=6)
findings = st.builds(Finding, ids, st.text(max_size=20), st.lists(ids, max_size=3).map(tuple),
                     st.none() | ids)


@FAST
@given(st.sampled_from(["pass", "fail", "error"]), st.lists(ids, max_size=3), st.lists(findings, max_size=3),
       st.dictionaries(ids, st.integers() | st.booleans() | ids, max_size=4))
def test_report_json_round_trip(verdict, targets, found, details):
    r = Report("cmd", verdict, tuple(targets), list(found), dict(details), ["n"], 0.5)
    back = Report.from_json(r.to_json())
    assert back == r
    assert back.to_json() == r.to_json()
