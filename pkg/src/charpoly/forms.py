"""Initial forms, weighted valuations, and projected Newton polyhedra.

For g = sum C_{A,B} u^A y^B with n = ord(g mod <u>), the projected
polyhedron of g is the F-subset generated by the points A/(n - |B|) over the
terms with |B| < n.  The various initial forms (in_0, in_L, in_v, in_nu)
pick out the terms that are extremal for the corresponding weighting; they
are returned as `GradedForm` values, which remember that weighting and check
homogeneity against it.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .arith import PolyElement, order_mod_u
from .errors import DomainError, InvalidInputError
from .polyhedra import FSubset, LinearForm, fsubset_from_points


@dataclass(frozen=True)
class GradedForm:
    """A polynomial together with the weighting it is homogeneous for.

    `u_weights is None` means the form must not involve the u-variables at
    all (the K[Y] case); otherwise every term satisfies
    sum(u_weights * A) + y_weight * |B| = value.
    """

    poly: PolyElement
    u_weights: tuple
    y_weight: Fraction
    value: Fraction

    def __post_init__(self):
        if self.u_weights is not None:
            object.__setattr__(self, "u_weights",
                               tuple(Fraction(w) for w in self.u_weights))
        object.__setattr__(self, "y_weight", Fraction(self.y_weight))
        object.__setattr__(self, "value", Fraction(self.value))
        for (A, B) in self.poly.terms:
            if self.u_weights is None:
                if any(A):
                    raise InvalidInputError("graded form has a u-term but no u-weights")
                w = self.y_weight * sum(B)
            else:
                w = (sum((wu * a for wu, a in zip(self.u_weights, A)), Fraction(0))
                     + self.y_weight * sum(B))
            if w != self.value:
                raise InvalidInputError(
                    f"term u^{A} y^{B} has weight {w}, expected {self.value}")

    @property
    def is_pure_y(self) -> bool:
        return all(not any(A) for (A, B) in self.poly.terms)

    def __str__(self):
        return self.poly.to_string(upper=True)


def in_zero(g: PolyElement) -> GradedForm:
    """The lowest-|B| part among the u-free terms of g, as a form in K[Y]."""
    n = order_mod_u(g)
    if n == float("inf"):
        raise DomainError("element lies in <u>, its 0-initial form is undefined")
    terms = {(A, B): c for (A, B), c in g.terms.items()
             if not any(A) and sum(B) == n}
    return GradedForm(PolyElement(g.frame, terms), None, Fraction(1), Fraction(n))


def v_L(g: PolyElement, L: LinearForm) -> Fraction:
    """min over the terms of g of L(A) + |B| (L positive)."""
    if g.is_zero:
        raise DomainError("v_L of the zero polynomial")
    if not L.positive:
        raise InvalidInputError("v_L needs a positive linear form")
    return min(L(A) + sum(B) for (A, B) in g.terms)


def in_L(g: PolyElement, L: LinearForm) -> GradedForm:
    """The sum of the terms of g achieving v_L(g)."""
    v = v_L(g, L)
    terms = {(A, B): c for (A, B), c in g.terms.items()
             if L(A) + sum(B) == v}
    return GradedForm(PolyElement(g.frame, terms), L.coeffs, Fraction(1), v)


def is_effective(L: LinearForm, system) -> bool:
    """Whether in_L(f_i) lies in K[Y] for every generator (no u-term wins)."""
    return all(in_L(f, L).is_pure_y for f in system)


def in_vertex(g: PolyElement, v) -> GradedForm:
    """in_0(g) plus the terms of g whose projected point is exactly v."""
    n = order_mod_u(g)
    if n == float("inf"):
        raise DomainError("element lies in <u>, it has no vertex-initial form")
    v = tuple(Fraction(c) for c in v)
    if len(v) != g.frame.e:
        raise InvalidInputError("vertex dimension does not match the frame")
    terms = {}
    for (A, B), c in g.terms.items():
        nb = sum(B)
        if not any(A) and nb == n:
            terms[(A, B)] = c
        elif nb < n and tuple(Fraction(a, n - nb) for a in A) == v:
            terms[(A, B)] = c
    # weights w with <w, v> = 1 make every kept term have weight n
    norm = sum(c * c for c in v)
    if norm == 0:
        weights = None
    else:
        weights = tuple(c / norm for c in v)
    return GradedForm(PolyElement(g.frame, terms), weights, Fraction(1), Fraction(n))


@dataclass(frozen=True)
class MonomialValuation:
    """Weight ell on every y-variable and L on the u-variables."""

    L: LinearForm
    y_weight: Fraction

    def __post_init__(self):
        object.__setattr__(self, "y_weight", Fraction(self.y_weight))
        if self.y_weight < 0:
            raise InvalidInputError("y-weight of a monomial valuation must be >= 0")

    def weight(self, A, B) -> Fraction:
        return self.L(A) + self.y_weight * sum(B)


def in_nu(g: PolyElement, nu: MonomialValuation) -> GradedForm:
    """The sum of the terms of g of minimal nu-weight."""
    if g.is_zero:
        raise DomainError("in_nu of the zero polynomial")
    w = min(nu.weight(A, B) for (A, B) in g.terms)
    terms = {(A, B): c for (A, B), c in g.terms.items() if nu.weight(A, B) == w}
    return GradedForm(PolyElement(g.frame, terms), nu.L.coeffs, nu.y_weight, w)


# ---------------------------------------------------------------------------
# projected polyhedra
# ---------------------------------------------------------------------------

def _projected_points(g: PolyElement, b: Fraction):
    points = []
    for (A, B) in g.terms:
        nb = sum(B)
        if nb < b:
            points.append(tuple(Fraction(a) / (b - nb) for a in A))
    return points


def poly_of_element(g: PolyElement) -> FSubset:
    """F-subset generated by the points A/(n-|B|), |B| < n = ord(g mod <u>)."""
    n = order_mod_u(g)
    if n == float("inf"):
        raise DomainError("projected polyhedron needs an element outside <u>")
    return fsubset_from_points(_projected_points(g, Fraction(n)), dim=g.frame.e)


def poly_of_system(system) -> FSubset:
    """Smallest F-subset containing the projected polyhedra of all generators."""
    system = list(system)
    if not system:
        raise InvalidInputError("empty generator system")
    frame = system[0].frame
    points = []
    for i, g in enumerate(system):
        n = order_mod_u(g)
        if n == float("inf"):
            raise DomainError(f"generator #{i + 1} lies in <u>")
        points.extend(_projected_points(g, Fraction(n)))
    return fsubset_from_points(points, dim=frame.e)


def poly_of_pair(system, b) -> FSubset:
    """F-subset of the pair (J, b): points A/(b-|B|) over terms with |B| < b."""
    b = Fraction(b)
    if b <= 0:
        raise InvalidInputError("pair level b must be positive")
    system = list(system)
    if not system:
        raise InvalidInputError("empty generator system")
    if any(order_mod_u(g) < b for g in system):
        raise InvalidInputError("pair level b exceeds the order of a generator")
    points = []
    for g in system:
        points.extend(_projected_points(g, b))
    return fsubset_from_points(points, dim=system[0].frame.e)


def effective_form(system) -> LinearForm:
    """A positive form a*(1,..,1) with in_L(f_i) = in_0(f_i) for all i.

    The scale a exceeds (n_i - |B|)/|A| for every u-touching term, which
    forces every such term strictly above the u-free minimum.
    """
    system = list(system)
    if not system:
        raise InvalidInputError("empty generator system")
    e = system[0].frame.e
    best = Fraction(0)
    for g in system:
        n = order_mod_u(g)
        if n == float("inf"):
            raise DomainError("effective form needs generators outside <u>")
        for (A, B) in g.terms:
            if any(A):
                ratio = Fraction(n - sum(B), sum(A))
                if ratio > best:
                    best = ratio
    return LinearForm([best + 1] * e)
