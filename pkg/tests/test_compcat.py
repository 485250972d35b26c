import dataclasses

import pytest

from dispcat import fixtures as fx
from dispcat.compcat import check_comprehension_cat, check_cwa, compcat_from_cwa
from dispcat.errors import CwALawFailure


def test_divisor_cwa():
    w = fx.div12_cwa()
    assert check_cwa(w).passed
    cc = compcat_from_cwa(w)
    r = check_comprehension_cat(cc)
    assert r.passed
    assert r.details["strict_triangle"]


def test_divisor_cwa_extension_is_the_type():
    w = fx.div12_cwa()
    # extending context 12 by the type 4 gives 4, projecting along 4 | 12
    assert w.ext["12", "4"] == "4"
    assert w.proj["12", "4"] == "d4_12"
    # substituting 4 along 6 | 12 gives gcd(4, 6) = 2
    assert w.pull("d6_12", "4") == "2"


@pytest.mark.parametrize("base", ["One", "Two", "WIso", "Div12"])
def test_trivial_cwa(base):
    w = fx.trivial_cwa(fx.all_categories()[base])
    assert check_cwa(w).passed
    assert check_comprehension_cat(compcat_from_cwa(w)).passed


def test_non_pullback_cwa_rejected():
    w = fx.non_pullback_cwa()
    r = check_cwa(w)
    assert not r.passed
    assert r.findings[0].code == "pullback"
    with pytest.raises(CwALawFailure):
        compcat_from_cwa(w)
    # building without the check gives a comprehension functor that loses cartesianness
    r2 = check_comprehension_cat(compcat_from_cwa(w, check=False))
    assert r2.findings[0].code == "chi-cartesian"


def test_mutated_substitution_rejected():
    w = fx.div12_cwa()
    # the substitution map along 6 | 12 at 4 must run 2 -> 4; 1 -> 4 has the wrong source
    assert w.qmor["d6_12", "4"] == "d2_4"
    r = check_cwa(dataclasses.replace(w, qmor={**w.qmor, ("d6_12", "4"): "d1_4"}))
    assert r.findings[0].code == "qmor-type"
    assert r.witness == ("d6_12", "4")
