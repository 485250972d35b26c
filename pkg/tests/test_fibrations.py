import math

import pytest

from dispcat import fixtures as fx
from dispcat.core import check_presheaf_laws, representable
from dispcat.displayed import check_disp_functor, check_displayed_laws, constant_display, coslice_display, \
    full_sub_display, slice_display
from dispcat.errors import BaseNotIso, BaseNotUnivalent, NotDiscrete
from dispcat.fibrations import (
    canonical_element_names,
    cartesian_iff_pullback,
    cartesian_lifts,
    check_presheaf_map,
    classify_fibration,
    count_cleavings,
    discrete_fibration_to_presheaf,
    disp_functor_to_presheaf_map,
    enumerate_cleavings,
    find_iso_cleaving,
    is_cartesian,
    is_discrete_fibration,
    is_displayed_iso,
    is_opcartesian,
    iso_cleaving_from_gaunt_base,
    isofibration_report,
    lift_table,
    presheaf_map_to_disp_functor,
    presheaf_to_discrete_fibration,
)

DIVISORS = (1, 2, 3, 4, 6, 12)


def test_slice_of_div12_is_split_fibration():
    r = classify_fibration(slice_display(fx.div12()))
    assert r.passed
    assert r.details["split"]["canonical_is_split"]
    assert r.details["cleaving_count"] == 1
    assert r.details["weak_opfibration"]
    assert not r.details["discrete"]


def test_slice_of_two_is_fibration():
    # Two has all pullbacks, so its codomain fibration has every cartesian lift
    assert classify_fibration(slice_display(fx.two())).passed


def test_coslice_is_opfibration():
    r = classify_fibration(coslice_display(fx.div12()))
    assert r.details["weak_opfibration"]


def test_parallel_collapse_has_no_lift():
    d = fx.parallel_collapse()
    assert is_cartesian(d, ("f", "u")) is None
    r = classify_fibration(d)
    assert not r.passed
    assert r.findings[0].code == "no-cartesian-lift"
    assert r.witness == ("f", "y")


def test_constant_display_cleavings():
    # every WIso morphism over every base morphism is cartesian: two lifts per (f, target)
    d = constant_display(fx.two(), fx.walking_iso())
    table = lift_table(d)
    assert all(len(v) == 2 for v in table.values())
    assert count_cleavings(table) == 2 ** 6
    assert len(enumerate_cleavings(d, table)) == 64


def test_cartesian_lift_in_slice():
    lifts = cartesian_lifts(slice_display(fx.div12()), "d4_12", "d6_12")
    # the pullback of 6 -> 12 along 4 -> 12 is gcd(4, 6) = 2
    assert [x for x, _, _ in lifts] == ["d2_4"]


def _slice_oracle():
    """Morphisms of the slice display over Div12 and which are pullback squares."""
    total = cart = 0
    for c in DIVISORS:
        for d in DIVISORS:
            if d % c:
                continue
            for x in DIVISORS:
                if c % x:
                    continue
                for y in DIVISORS:
                    if d % y or y % x:
                        continue
                    total += 1
                    cart += x == math.gcd(y, c)
    return total, cart


def test_cartesian_iff_pullback_div12():
    c = fx.div12()
    sl = slice_display(c)
    reports = [cartesian_iff_pullback(c, u, sl) for u in sl.dmors()]
    assert all(r.passed for r in reports)
    total, cart = _slice_oracle()
    assert len(reports) == total
    assert sum(r.details["cartesian"] for r in reports) == cart
    assert 0 < cart < total


def test_cartesian_iff_pullback_two():
    c = fx.two()
    sl = slice_display(c)
    reports = [cartesian_iff_pullback(c, u, sl) for u in sl.dmors()]
    assert all(r.passed for r in reports)
    assert len(reports) == 6
    assert sum(r.details["cartesian"] for r in reports) == 5


def test_opcartesian_in_coslice():
    d = coslice_display(fx.div12())
    found = [u for u in d.dmors() if is_opcartesian(d, u) is not None]
    assert found


def test_isofibrations():
    d = constant_display(fx.div12(), fx.walking_iso())
    assert isofibration_report(d).passed
    assert find_iso_cleaving(d) is not None
    cl = iso_cleaving_from_gaunt_base(d)
    assert cl.lifts["id_6", "b"] == ("b", d.did["6", "b"])
    with pytest.raises(BaseNotUnivalent):
        iso_cleaving_from_gaunt_base(constant_display(fx.walking_iso(), fx.two()))


def test_displayed_iso_needs_base_iso():
    d = slice_display(fx.div12())
    u = next(u for u in d.dmors() if u.base == "d2_4")
    with pytest.raises(BaseNotIso):
        is_displayed_iso(d, u)


def test_divisor_presheaf_round_trip():
    p = fx.divisor_presheaf()
    d = presheaf_to_discrete_fibration(p)
    r = is_discrete_fibration(d)
    assert r.passed and r.details["all_lifts_cartesian"] and r.details["split"]
    back = discrete_fibration_to_presheaf(d, p.name)
    assert back == p
    assert presheaf_to_discrete_fibration(back) == d


def test_representable_round_trip():
    y = representable(fx.div12(), "6")
    d = presheaf_to_discrete_fibration(y)
    assert discrete_fibration_to_presheaf(d, y.name) == y
    assert check_presheaf_laws(y).passed


def test_slice_is_not_discrete():
    d = slice_display(fx.div12())
    assert not is_discrete_fibration(d).passed
    with pytest.raises(NotDiscrete):
        discrete_fibration_to_presheaf(d)


def test_presheaf_maps_correspond_to_displayed_functors():
    p = fx.divisor_presheaf()
    q = fx.terminal_presheaf(fx.div12())
    to_point = {c: {x: "pt" for x in p.sets[c]} for c in p.base.objects}
    assert check_presheaf_map(p, q, to_point)
    G = presheaf_map_to_disp_functor(p, q, to_point)
    assert check_disp_functor(G).passed
    assert disp_functor_to_presheaf_map(G) == to_point
    # the identity map is natural
    ident = {c: {x: x for x in p.sets[c]} for c in p.base.objects}
    assert check_presheaf_map(p, p, ident)
    assert check_disp_functor(presheaf_map_to_disp_functor(p, p, ident)).passed


def test_non_natural_map_rejected():
    p = fx.divisor_presheaf()
    swap = {c: {x: x for x in p.sets[c]} for c in p.base.objects}
    swap["6"] = {"1": "1", "2": "3", "3": "2", "6": "6"}
    assert not check_presheaf_map(p, p, swap)
    assert not check_disp_functor(presheaf_map_to_disp_functor(p, p, swap)).passed


def test_display_round_trip_up_to_morphism_names():
    d = full_sub_display(fx.walking_iso(), ["a", "b"])
    back = presheaf_to_discrete_fibration(discrete_fibration_to_presheaf(d))
    assert back != d
    canon = canonical_element_names(d)
    assert canon == back
    assert check_displayed_laws(canon).passed
    el = presheaf_to_discrete_fibration(fx.divisor_presheaf())
    assert canonical_element_names(el) == el
    with pytest.raises(NotDiscrete):
        canonical_element_names(slice_display(fx.two()))
