import math
from fractions import Fraction as F

import pytest

from charpoly import (Frame, GF, INFINITY, InvalidInputError, DomainError,
                      PolyElement, QQ, exponent_of, field_from_spec,
                      field_spec, grlex_key, order_mod_u, parse_poly,
                      substitute_all_y, substitute_y)

import helpers


# ---------------------------------------------------------------------------
# fields
# ---------------------------------------------------------------------------

def test_rational_kth_roots():
    assert QQ.kth_roots(F(8, 27), 3) == [F(2, 3)]
    assert QQ.kth_roots(F(4, 9), 2) == [F(-2, 3), F(2, 3)]
    assert QQ.kth_roots(F(-8), 3) == [F(-2)]
    assert QQ.kth_roots(F(2), 2) == []
    assert QQ.kth_roots(F(0), 5) == [F(0)]
    assert QQ.kth_roots(F(7), 1) == [F(7)]


def test_prime_field_basics():
    f3 = GF(3)
    assert f3.inv(2) == 2
    assert f3.kth_roots(1, 2) == [1, 2]
    assert f3.kth_roots(2, 2) == []
    assert GF(2).kth_roots(1, 4) == [1]
    with pytest.raises(InvalidInputError):
        GF(4)
    assert GF(5) is GF(5)


def test_field_specs():
    assert field_spec(field_from_spec("Q")) == "Q"
    assert field_spec(field_from_spec("F7")) == "F7"
    with pytest.raises(InvalidInputError):
        field_from_spec("F1")


def test_frame_validation():
    with pytest.raises(InvalidInputError):
        Frame((), ("y",), QQ)
    with pytest.raises(InvalidInputError):
        Frame(("u", "u"), ("y",), QQ)
    with pytest.raises(InvalidInputError):
        Frame(("u",), ("2y",), QQ)
    fr = Frame(("u1",), ("y1", "y2"), QQ)
    assert fr.e == 1 and fr.r == 2


# ---------------------------------------------------------------------------
# grlex
# ---------------------------------------------------------------------------

def test_grlex_order():
    assert grlex_key((2, 0)) < grlex_key((0, 3))
    assert grlex_key((0, 2)) < grlex_key((2, 0))
    assert grlex_key((1, 1)) < grlex_key((2, 0))
    assert sorted([(0, 3), (2, 0), (1, 1)], key=grlex_key) == \
        [(1, 1), (2, 0), (0, 3)]


# ---------------------------------------------------------------------------
# polynomials
# ---------------------------------------------------------------------------

def test_parse_and_print_round_trip(frame_q):
    g = parse_poly(frame_q, "3*y1^2*u2 - 2*u1^3 + y2 - 1/2")
    h = parse_poly(frame_q, str(g))
    assert g == h


def test_parse_errors(frame_q):
    with pytest.raises(InvalidInputError):
        parse_poly(frame_q, "y1 + + u1")
    with pytest.raises(InvalidInputError):
        parse_poly(frame_q, "w^2")
    with pytest.raises(InvalidInputError):
        parse_poly(frame_q, "y1 @ u1")
    with pytest.raises(InvalidInputError):
        parse_poly(frame_q, "y1 / u1")


def test_char_p_coefficients(frame_f2):
    g = parse_poly(frame_f2, "y^2 + y^2")
    assert g.is_zero
    g = parse_poly(frame_f2, "3*y")
    assert g == parse_poly(frame_f2, "y")


def test_multiplication_against_naive_oracle(rng):
    for _ in range(40):
        frame = helpers.random_frame(rng)
        a = helpers.random_standard_system(rng, frame, max_gens=1)[0]
        b = helpers.random_standard_system(rng, frame, max_gens=1)[0]
        expected = helpers.naive_product_terms(a, b)
        assert dict((a * b).terms) == expected


def test_power_matches_repeated_product(frame_q):
    g = parse_poly(frame_q, "y1 + u1^2 - 2")
    assert g ** 1 == g
    assert g ** 3 == g * g * g
    assert g ** 0 == PolyElement.constant(frame_q, 1)


def test_order_and_exponent(frame_q):
    g = parse_poly(frame_q, "y1^2*y2 + y2^3 + u1*y1^5 + u2^4")
    assert order_mod_u(g) == 3
    assert exponent_of(g) == (0, 3)  # grlex-min over the u-free degree-3 terms
    u_only = parse_poly(frame_q, "u1^2 + u1*u2")
    assert order_mod_u(u_only) == INFINITY
    with pytest.raises(DomainError):
        exponent_of(u_only)


def test_substitute_y_shift(frame_q):
    # y1 -> y1 + u1 in y1^2 gives y1^2 + 2 y1 u1 + u1^2
    g = parse_poly(frame_q, "y1^2")
    h = parse_poly(frame_q, "u1")
    assert substitute_y(g, 0, h) == parse_poly(frame_q, "y1^2 + 2*y1*u1 + u1^2")


def test_substitute_y_rewrite_identity_char2():
    # f = y^2 + y^4 + u1^4 + u2^7 equals (y + y^2 + u1^2)^2 + u2^7 exactly.
    fr = Frame(("u1", "u2"), ("y",), GF(2))
    f = parse_poly(fr, "y^2 + y^4 + u1^4 + u2^7")
    z = parse_poly(fr, "y + y^2 + u1^2")
    assert f == z * z + parse_poly(fr, "u2^7")


def test_substitute_all_y(frame_q):
    g = parse_poly(frame_q, "y1*y2 + u1")
    reps = [parse_poly(frame_q, "y1 + 1"), parse_poly(frame_q, "u2^2")]
    assert substitute_all_y(g, reps) == parse_poly(
        frame_q, "y1*u2^2 + u2^2 + u1")


def test_sorted_terms_display_order(frame_q):
    g = parse_poly(frame_q, "u1^3 + y1^2")
    assert str(g) == "y1^2 + u1^3"


def test_scalar_division_in_parser(frame_q):
    g = parse_poly(frame_q, "y1/2")
    assert g == parse_poly(frame_q, "(1/2)*y1")
