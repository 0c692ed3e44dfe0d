from fractions import Fraction as F

import pytest

from charpoly import (DomainError, GradedForm, InvalidInputError, LinearForm,
                      MonomialValuation, effective_form, in_L, in_nu,
                      in_vertex, in_zero, is_effective, parse_poly,
                      poly_of_element, poly_of_pair, poly_of_system, v_L)

import helpers


# ---------------------------------------------------------------------------
# initial forms
# ---------------------------------------------------------------------------

def test_in_zero(system_h):
    f1, h2 = system_h
    assert str(in_zero(f1).poly) == "y1^2"
    assert str(in_zero(h2).poly) == "y2^3"
    assert in_zero(h2).is_pure_y
    assert str(in_zero(h2)) == "Y2^3"


def test_in_vertex(system_h):
    f1, h2 = system_h
    assert str(in_vertex(f1, (F(3, 2), 0)).poly) == "y1^2 + u1^3"
    assert str(in_vertex(h2, (1, F(2, 3))).poly) == "y2^3 + u1^3*u2^2"
    assert str(in_vertex(h2, (0, 2)).poly) == "y2^3 + u2^2*y1^2"
    # a vertex none of whose points appear keeps only the initial form
    assert str(in_vertex(f1, (5, 5)).poly) == "y1^2"


def test_v_L_and_in_L(system_loop):
    g1, g2 = system_loop
    L = effective_form(system_loop)
    assert tuple(L.coeffs) == (F(3),)
    assert v_L(g1, L) == 3 and str(in_L(g1, L).poly) == "y^3"
    assert v_L(g2, L) == 5 and str(in_L(g2, L).poly) == "z^5"
    assert is_effective(L, system_loop)


def test_in_nu(system_loop):
    g1, _ = system_loop
    nu = MonomialValuation(LinearForm((F(1),)), F(1, 2))
    assert str(in_nu(g1, nu).poly) == "y^3"
    # weight check: L(A) + ell*|B|
    assert nu.weight((1,), (4,)) == 3


def test_monomial_valuation_validation():
    with pytest.raises(InvalidInputError):
        MonomialValuation(LinearForm((F(1),)), F(-1))


def test_graded_form_rejects_mixed_degrees(frame_q):
    with pytest.raises(InvalidInputError):
        GradedForm(parse_poly(frame_q, "y1^2 + y1"), None, F(1), F(2))
    with pytest.raises(InvalidInputError):
        GradedForm(parse_poly(frame_q, "u1*y1"), None, F(1), F(1))


# ---------------------------------------------------------------------------
# projected polyhedra
# ---------------------------------------------------------------------------

def test_poly_of_element(system_f):
    f1, f2 = system_f
    assert poly_of_element(f1).vertices == ((F(3, 2), F(0)),)
    assert poly_of_element(f2).vertices == ((F(0), F(7, 3)),)


def test_poly_of_element_requires_y_term(frame_q):
    with pytest.raises(DomainError):
        poly_of_element(parse_poly(frame_q, "u1^2"))


def test_poly_of_system_names_offender(system_f, frame_q):
    with pytest.raises(DomainError, match="generator #2"):
        poly_of_system([system_f[0], parse_poly(frame_q, "u1^2")])
    with pytest.raises(InvalidInputError):
        poly_of_system([])


def test_pair_polyhedron_levels():
    fr = helpers.Frame(("u",), ("y",), helpers.QQ)
    g = parse_poly(fr, "y^2 + u^3")
    assert poly_of_pair([g], 2).vertices == ((F(3, 2),),)
    assert poly_of_pair([g], 1).vertices == ((F(3),),)
    assert poly_of_pair([g], F(3, 2)).vertices == ((F(2),),)
    with pytest.raises(InvalidInputError):
        poly_of_pair([g], 0)
    with pytest.raises(InvalidInputError):
        poly_of_pair([g], 3)  # exceeds ord(g) = 2


def test_pair_polyhedron_scales_like_level(rng):
    # at b = n the pair polyhedron of one generator equals its projection
    for _ in range(20):
        frame = helpers.random_frame(rng)
        g = helpers.random_standard_system(rng, frame, max_gens=1)[0]
        n = min(sum(B) for (A, B) in g.terms if not any(A))
        assert poly_of_pair([g], n) == poly_of_element(g)


def test_effective_form_certifies_itself(rng):
    for _ in range(20):
        frame = helpers.random_frame(rng)
        system = helpers.random_standard_system(rng, frame)
        L = effective_form(system)
        assert is_effective(L, system)
        for g in system:
            n = min(sum(B) for (A, B) in g.terms if not any(A))
            assert v_L(g, L) == n
