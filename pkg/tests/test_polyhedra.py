import math
from fractions import Fraction as F

import pytest

from charpoly import (DomainError, FSubset, InvalidInputError, LinearForm,
                      contains, delta_L, facets, fsubset_from_points,
                      is_vertex, lambda_measure, point_order_key,
                      poly_of_system, qpoint)

import helpers


def _pts(*pairs):
    return [tuple(F(c) for c in p) for p in pairs]


@pytest.fixture
def poly_f(system_f):
    return poly_of_system(system_f)


@pytest.fixture
def poly_g(system_g):
    return poly_of_system(system_g)


@pytest.fixture
def poly_h(system_h):
    return poly_of_system(system_h)


# ---------------------------------------------------------------------------
# worked examples, frozen
# ---------------------------------------------------------------------------

def test_vertices_of_reference_systems(poly_f, poly_g, poly_h):
    assert poly_f.vertices == tuple(_pts((F(3, 2), 0), (0, F(7, 3))))
    assert poly_g.vertices == tuple(_pts((F(3, 2), 0), (0, F(7, 2))))
    assert poly_h.vertices == tuple(
        _pts((F(3, 2), 0), (1, F(2, 3)), (0, 2)))


def test_facets_of_reference_systems(poly_f, poly_g, poly_h):
    assert [tuple(L.coeffs) for L in poly_f.facets] == [(F(2, 3), F(3, 7))]
    assert [tuple(L.coeffs) for L in poly_g.facets] == [(F(2, 3), F(2, 7))]
    assert [tuple(L.coeffs) for L in poly_h.facets] == [(F(2, 3), F(1, 2))]


def test_axis_parallel_and_one_dimensional_facets():
    p = fsubset_from_points(_pts((0, F(7, 2))))
    assert [tuple(L.coeffs) for L in p.facets] == [(0, F(2, 7))]
    q = fsubset_from_points([(F(1),)])
    assert q.vertices == ((F(1),),)
    assert [tuple(L.coeffs) for L in q.facets] == [(F(1),)]


def test_delta_of_reference_form(poly_f, poly_g, poly_h):
    L = LinearForm((F(2, 3), F(3, 7)))
    assert delta_L(L, poly_f) == 1
    assert delta_L(L, poly_g) == 1
    assert delta_L(L, poly_h) == F(6, 7)
    assert L((1, F(2, 3))) == F(20, 21)


def test_contains(poly_f):
    assert contains(poly_f, (1, 1))          # 2/3 + 3/7 = 23/21 >= 1
    assert contains(poly_f, (F(3, 2), 0))
    assert not contains(poly_f, (1, 0))
    assert not contains(poly_f, (0, 0))


def test_lambda_measure_examples(poly_f, poly_g, poly_h):
    assert lambda_measure(poly_f, poly_f) == 0
    assert lambda_measure(poly_f, poly_h) == F(1, 7)
    assert lambda_measure(poly_g, poly_f) == F(1, 3)
    with pytest.raises(InvalidInputError):
        lambda_measure(poly_f, poly_g)  # poly_g does not contain poly_f


def test_vertex_predicates_and_witness(poly_f, poly_h):
    assert is_vertex(poly_f, (F(3, 2), 0))
    assert not is_vertex(poly_f, (1, 1))
    w = poly_f.vertex_witness((F(3, 2), 0))
    assert w is not None and w((F(3, 2), 0)) == 1
    assert all(w(p) >= 1 for p in poly_f.vertices)
    # a generating point interior to a facet is listed but has no witness
    assert is_vertex(poly_h, (1, F(2, 3)))
    assert (1, F(2, 3)) not in poly_h.extreme_vertices
    assert poly_h.vertex_witness((1, F(2, 3))) is None
    assert poly_h.extreme_vertices == tuple(_pts((F(3, 2), 0), (0, 2)))


def test_vertex_ordering(poly_h):
    keys = [point_order_key(v) for v in poly_h.vertices]
    assert keys == sorted(keys)


def test_round_trip_from_vertices(poly_f, poly_h):
    for p in (poly_f, poly_h):
        assert fsubset_from_points(p.vertices) == p


def test_empty_polyhedron():
    p = fsubset_from_points([], dim=2)
    assert p.is_empty and not p
    assert p.vertices == () and p.extreme_vertices == ()
    assert not contains(p, (0, 0))
    with pytest.raises(DomainError):
        facets(p)
    with pytest.raises(DomainError):
        delta_L(LinearForm((F(1), F(1))), p)


def test_point_validation():
    with pytest.raises(InvalidInputError):
        qpoint(("a",))
    with pytest.raises(InvalidInputError):
        fsubset_from_points([(F(-1), F(0))])
    with pytest.raises(InvalidInputError):
        LinearForm((F(-1), F(0)))


# ---------------------------------------------------------------------------
# duality and membership against the simplex oracle
# ---------------------------------------------------------------------------

def test_facets_certify_membership_random(rng):
    for _ in range(40):
        e = rng.randint(1, 3)
        pts = helpers.random_points(rng, e)
        poly = fsubset_from_points(pts)
        # every facet is valid (>= 1 on all generators) and tight somewhere
        for L in poly.facets:
            values = [L(p) for p in pts]
            assert min(values) == 1
        # H-description and V-description agree on random probes
        for _ in range(8):
            q = tuple(F(rng.randint(0, 14), rng.randint(1, 4))
                      for _ in range(e))
            assert poly.contains(q) == helpers.in_hull_plus_orthant(pts, q)


def test_generators_always_contained_random(rng):
    for _ in range(30):
        e = rng.randint(1, 3)
        pts = helpers.random_points(rng, e)
        poly = fsubset_from_points(pts)
        assert all(poly.contains(p) for p in pts)
        assert all(helpers.in_hull_plus_orthant(pts, v)
                   for v in poly.vertices)


def test_monotonicity_under_extra_points(rng):
    for _ in range(20):
        e = rng.randint(1, 3)
        pts = helpers.random_points(rng, e)
        extra = helpers.random_points(rng, e, count=2)
        small = fsubset_from_points(pts)
        big = fsubset_from_points(pts + extra)
        assert all(big.contains(v) for v in small.vertices)


def test_vertex_witness_properties_random(rng):
    for _ in range(20):
        e = rng.randint(1, 3)
        pts = helpers.random_points(rng, e)
        poly = fsubset_from_points(pts)
        for v in poly.extreme_vertices:
            w = poly.vertex_witness(v)
            if w is None:  # origin, or too few tight facets
                continue
            assert w(v) == 1
            assert all(w(p) > 1 for p in pts if tuple(p) != v)


def test_round_trip_random(rng):
    for _ in range(25):
        e = rng.randint(1, 3)
        pts = helpers.random_points(rng, e)
        poly = fsubset_from_points(pts)
        assert fsubset_from_points(poly.vertices) == poly
        assert helpers.same_fsubset(pts, poly.vertices)


def test_lambda_discreteness(poly_f, poly_h):
    # values land in (1/(beta! alpha!)) Z>=0 where beta bounds vertex
    # denominators of the compared set and alpha the facet coefficient
    # denominators of the reference set
    value = lambda_measure(poly_f, poly_h)
    alpha = max(c.denominator for L in poly_f.facets for c in L.coeffs)
    beta = max(c.denominator for v in poly_h.vertices for c in v)
    scaled = value * math.factorial(beta) * math.factorial(alpha)
    assert scaled.denominator == 1 and scaled >= 0
