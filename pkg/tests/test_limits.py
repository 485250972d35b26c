import itertools
import math

import pytest

from dispcat import fixtures as fx
from dispcat.displayed import endofunctor_algebra_display, full_sub_display
from dispcat.errors import InvalidWitness, MalformedInput, NotLimiting
from dispcat.limits import (
    STANDARD_SHAPES,
    Cone,
    Diagram,
    DispCone,
    Graph,
    Square,
    cones,
    created_witness,
    creates_limit,
    creates_limits_of_shape,
    discrete_two,
    empty_shape,
    find_limit,
    is_limiting,
    is_pullback,
    limit_uniqueness,
    limiting_cones,
    project_diagram,
    total_limit_from_creation,
)

DIVISORS = (1, 2, 3, 4, 6, 12)


def pair_diagram(c, x, y):
    return Diagram(discrete_two(), c, {"a": x, "b": y}, {})


@pytest.mark.parametrize("x,y", list(itertools.product(DIVISORS, repeat=2)))
def test_products_in_div12_are_gcd(x, y):
    lim = find_limit(fx.div12(), pair_diagram(fx.div12(), str(x), str(y)))
    assert lim.vertex == str(math.gcd(x, y))


def test_terminal_object_is_12():
    c = fx.div12()
    lim = find_limit(c, Diagram(empty_shape(), c, {}, {}))
    assert lim.vertex == "12"
    assert len(limiting_cones(c, Diagram(empty_shape(), c, {}, {}))) == 1


def test_no_product_across_components():
    c = fx.disjoint_union(fx.two(), fx.two())
    assert find_limit(c, pair_diagram(c, "l.a", "r.a")) is None


def test_products_in_wiso_unique_up_to_unique_iso():
    c = fx.walking_iso()
    dgm = pair_diagram(c, "a", "b")
    found = limiting_cones(c, dgm)
    assert {k.vertex for k in found} == {"a", "b"}
    assert limit_uniqueness(c, dgm).passed


def test_pullback_squares():
    c = fx.div12()
    assert is_pullback(c, Square("d2_4", "d2_6", "d4_12", "d6_12")).passed
    assert not is_pullback(c, Square("d1_4", "d1_6", "d4_12", "d6_12")).passed


def test_non_limiting_cone_has_witness():
    c = fx.div12()
    dgm = pair_diagram(c, "4", "6")
    r = is_limiting(c, dgm, Cone("1", {"a": "d1_4", "b": "d1_6"}))
    assert not r.passed
    assert r.witness[0] == "2"


def test_cone_enumeration_counts():
    c = fx.div12()
    dgm = pair_diagram(c, "4", "6")
    # cones with vertex v exist iff v divides gcd(4, 6) = 2
    assert {v for v in c.objects if list(cones(c, dgm, v))} == {"1", "2"}


def test_graph_validation():
    with pytest.raises(MalformedInput):
        Graph(("a", "a"))
    with pytest.raises(MalformedInput):
        Graph(("a",), (("e", "a", "z"),))
    bad = Diagram(discrete_two(), fx.div12(), {"a": "4"}, {})
    with pytest.raises(MalformedInput):
        bad.check()


@pytest.mark.parametrize("functor", ["Id", "Gcd6", "Lcm2", "Const1"])
@pytest.mark.parametrize("shape", sorted(STANDARD_SHAPES))
def test_algebras_create_limits(functor, shape):
    d = endofunctor_algebra_display(fx.monotone_endofunctors()[functor])
    r = creates_limits_of_shape(d, STANDARD_SHAPES[shape])
    assert r.passed, r.summary()
    assert r.details["diagrams"] > 0


def _alg_pair(d, x, y):
    t = d.total
    ox = next(t.obj_id[x, a] for a in d.fibre(x))
    oy = next(t.obj_id[y, a] for a in d.fibre(y))
    return Diagram(discrete_two(), t.category, {"a": ox, "b": oy}, {})


def test_created_limit_projects_exactly():
    d = endofunctor_algebra_display(fx.monotone_endofunctors()["Lcm2"])
    dgm = _alg_pair(d, "4", "6")
    proj = project_diagram(d, dgm)
    lam = find_limit(d.base, proj)
    assert lam.vertex == "2"
    r = creates_limit(d, dgm, lam)
    assert r.passed and r.details["projects_exactly"]
    tc = total_limit_from_creation(d, dgm, lam, created_witness(d, dgm, lam))
    assert d.total.objects[tc.vertex][0] == "2"


def test_creation_needs_limiting_base_cone():
    d = endofunctor_algebra_display(fx.monotone_endofunctors()["Lcm2"])
    dgm = _alg_pair(d, "4", "6")
    with pytest.raises(NotLimiting):
        creates_limit(d, dgm, Cone("1", {"a": "d1_4", "b": "d1_6"}))


def test_bad_witness_rejected():
    d = endofunctor_algebra_display(fx.monotone_endofunctors()["Lcm2"])
    dgm = _alg_pair(d, "4", "6")
    lam = find_limit(d.base, project_diagram(d, dgm))
    good = created_witness(d, dgm, lam)
    with pytest.raises(InvalidWitness):
        total_limit_from_creation(d, dgm, lam, DispCone(lam, good.dvertex, {"a": good.dlegs["a"]}))


def test_full_subcategory_missing_meets_does_not_create():
    # 4 and 6 survive but their meet 2 does not
    d = full_sub_display(fx.div12(), ["4", "6", "12"])
    r = creates_limits_of_shape(d, discrete_two())
    assert not r.passed
    assert r.findings[0].code == "zero-displayed-cones"
