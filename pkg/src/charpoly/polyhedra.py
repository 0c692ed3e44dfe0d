"""Exact F-subsets of the nonnegative orthant in Q^e.

An F-subset is conv(points) + R^e_{>=0} for a finite set of rational points
with nonnegative coordinates.  We keep the generating points (after removing
dominated ones), and compute the facet description lazily through blocking
duality: the facet forms of Delta, normalized so min over Delta equals 1,
are exactly the extreme points of

    D = { a >= 0 : <a, p> >= 1 for every generator p },

and those are enumerated exactly by solving the square systems picked from
tight rows (point rows <a,p> = 1 and axis rows a_i = 0).  All arithmetic is
over Fraction, so membership, vertices, facets, and the Lambda measure are
exact.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations

from . import _linalg
from .errors import DomainError, InternalError, InvalidInputError

_QQFIELD = None


def _field():
    # local import to avoid a cycle at module load
    global _QQFIELD
    if _QQFIELD is None:
        from .arith import QQ
        _QQFIELD = QQ
    return _QQFIELD


def qpoint(coords):
    """Coerce to a tuple of nonnegative Fractions."""
    out = []
    for c in coords:
        try:
            c = Fraction(c)
        except (TypeError, ValueError) as exc:
            raise InvalidInputError(f"bad coordinate {c!r} in point") from exc
        if c < 0:
            raise InvalidInputError(f"negative coordinate {c} in point")
        out.append(c)
    if not out:
        raise InvalidInputError("empty point")
    return tuple(out)


def point_order_key(p):
    """Total order used whenever a 'minimal' point must be picked."""
    return (sum(p),) + tuple(p)


class LinearForm:
    """A semi-positive rational linear form  L(v) = sum a_i v_i."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        coeffs = tuple(Fraction(c) for c in coeffs)
        if not coeffs:
            raise InvalidInputError("empty linear form")
        if any(c < 0 for c in coeffs):
            raise InvalidInputError("linear form coefficients must be >= 0")
        if all(c == 0 for c in coeffs):
            raise InvalidInputError("linear form must not be identically zero")
        object.__setattr__(self, "coeffs", coeffs)

    def __setattr__(self, *_):
        raise AttributeError("LinearForm is immutable")

    @property
    def dim(self):
        return len(self.coeffs)

    @property
    def positive(self):
        return all(c > 0 for c in self.coeffs)

    def __call__(self, point):
        if len(point) != len(self.coeffs):
            raise InvalidInputError("point/form dimension mismatch")
        return sum((a * Fraction(x) for a, x in zip(self.coeffs, point)),
                   Fraction(0))

    def __eq__(self, other):
        return isinstance(other, LinearForm) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"LinearForm({', '.join(str(c) for c in self.coeffs)})"


def _undominated(points):
    """Drop p whenever some other kept point q satisfies q <= p coordinatewise."""
    pts = sorted(set(points), key=point_order_key)
    kept = []
    for p in pts:
        if not any(all(qi <= pi for qi, pi in zip(q, p)) for q in kept):
            kept.append(p)
    return kept


class FSubset:
    """conv(generators) + orthant, with lazy exact facet/vertex data."""

    __hash__ = None

    def __init__(self, points, dim=None):
        pts = [qpoint(p) for p in points]
        if pts:
            d = len(pts[0])
            if any(len(p) != d for p in pts):
                raise InvalidInputError("points of mixed dimension")
            if dim is not None and dim != d:
                raise InvalidInputError("points do not match the stated dimension")
            dim = d
        self.dim = dim
        self.generators = tuple(_undominated(pts))
        self._facets = None
        self._vertices = None

    # -- basic state ---------------------------------------------------------

    @property
    def is_empty(self):
        return not self.generators

    def __bool__(self):
        return not self.is_empty

    # -- H-representation ----------------------------------------------------

    @property
    def facets(self):
        """Facet forms, each normalized so its minimum over the set is 1.

        The implicit orthant constraints v_i >= 0 are never included.  The
        result is empty exactly when the set is the whole orthant (or empty).
        """
        if self._facets is None:
            self._facets = self._compute_facets()
        return self._facets

    def _compute_facets(self):
        if self.is_empty:
            return ()
        e = self.dim
        gens = self.generators
        if any(all(c == 0 for c in p) for p in gens):
            return ()  # origin inside: the set is the whole orthant
        field = _field()
        # rows of the blocker's constraint system: (<p, a> , rhs)
        rows = [(list(p), Fraction(1)) for p in gens]
        rows += [([Fraction(1 if i == t else 0) for t in range(e)], Fraction(0))
                 for i in range(e)]
        found = set()
        for combo in combinations(range(len(rows)), e):
            mat = [rows[i][0] for i in combo]
            rhs = [rows[i][1] for i in combo]
            if _linalg.rank(field, mat) != e:
                continue
            a = _linalg.solve(field, mat, rhs)
            if a is None or any(x < 0 for x in a) or all(x == 0 for x in a):
                continue
            if all(sum(ai * pi for ai, pi in zip(a, p)) >= 1 for p in gens):
                found.add(tuple(a))
        if not found:
            raise InternalError("no facet found for a proper F-subset")
        return tuple(LinearForm(a) for a in sorted(found))

    # -- V-representation ----------------------------------------------------

    @property
    def vertices(self):
        """Generating points lying on at least one facet (minimal V-data)."""
        if self._vertices is None:
            facets = self.facets
            if not facets:
                self._vertices = self.generators
            else:
                self._vertices = tuple(
                    v for v in self.generators
                    if any(L(v) == 1 for L in facets))
        return self._vertices

    def _tight_rows(self, v):
        rows = [list(L.coeffs) for L in self.facets if L(v) == 1]
        n_facets = len(rows)
        for i, c in enumerate(v):
            if c == 0:
                rows.append([Fraction(1 if t == i else 0)
                             for t in range(self.dim)])
        return rows, n_facets

    @property
    def extreme_vertices(self):
        """Vertices at which the tight facet/axis constraints have full rank.

        These are the extremal points of the set in the classical sense; a
        stored vertex not in this list lies on a face spanned by the others.
        """
        out = []
        for v in self.vertices:
            rows, _ = self._tight_rows(v)
            if _linalg.rank(_field(), rows) == self.dim:
                out.append(v)
        return tuple(out)

    # -- predicates / measures -------------------------------------------------

    def contains(self, point):
        if self.is_empty:
            return False
        p = qpoint(point)
        if len(p) != self.dim:
            raise InvalidInputError("point/polyhedron dimension mismatch")
        return all(L(p) >= 1 for L in self.facets)

    def delta(self, L: LinearForm):
        """min of L over the set: attained at a generating point."""
        if self.is_empty:
            raise DomainError("delta_L of an empty F-subset")
        return min(L(p) for p in self.generators)

    def is_vertex(self, point):
        try:
            p = qpoint(point)
        except InvalidInputError:
            return False
        return not self.is_empty and len(p) == self.dim and p in self.vertices

    def vertex_witness(self, v):
        """A positive form uniquely minimized on the set at v, with value 1.

        Built without search: the mean of the facet forms tight at v plus the
        unit forms of the axes tight at v.  Exists exactly for the extremal
        vertices with at least one tight facet; returns None otherwise (in
        particular for a vertex that is a convex combination of others, and
        for the origin, where no form can evaluate to 1).
        """
        if not self.is_vertex(v):
            return None
        v = qpoint(v)
        rows, n_facets = self._tight_rows(v)
        if n_facets == 0 or _linalg.rank(_field(), rows) != self.dim:
            return None
        total = [sum(row[i] for row in rows) for i in range(self.dim)]
        witness = LinearForm([c / n_facets for c in total])
        if not witness.positive or witness(v) != 1:
            raise InternalError("vertex witness construction failed")
        for p in self.generators:
            val = witness(p)
            if val < 1 or (val == 1 and p != v):
                raise InternalError("vertex witness is not uniquely minimal")
        return witness

    def __eq__(self, other):
        if not isinstance(other, FSubset):
            return NotImplemented
        if self.is_empty or other.is_empty:
            return self.is_empty and other.is_empty
        if self.dim != other.dim:
            return False
        return (all(other.contains(p) for p in self.generators)
                and all(self.contains(p) for p in other.generators))

    def __repr__(self):
        if self.is_empty:
            return "FSubset(empty)"
        pts = "; ".join("(" + ",".join(str(c) for c in p) + ")"
                        for p in self.vertices)
        return f"FSubset[{pts}]"


def fsubset_from_points(points, dim=None) -> FSubset:
    return FSubset(points, dim=dim)


def is_vertex(poly: FSubset, point) -> bool:
    return poly.is_vertex(point)


def facets(poly: FSubset):
    if poly.is_empty:
        raise DomainError("facets of an empty F-subset")
    return poly.facets


def delta_L(L: LinearForm, poly: FSubset):
    return poly.delta(L)


def contains(poly: FSubset, point) -> bool:
    return poly.contains(point)


def lambda_measure(poly_o: FSubset, poly_p: FSubset):
    """Sum over the facet forms L_j of poly_o of (1 - delta_{L_j}(poly_p)).

    Requires poly_o and poly_p nonempty with poly_o contained in poly_p; the
    result is a nonnegative rational, zero exactly when every facet form of
    poly_o already has minimum 1 on poly_p.
    """
    if poly_o.is_empty:
        raise DomainError("lambda measure needs a nonempty reference set")
    if poly_p.is_empty or not all(poly_p.contains(g) for g in poly_o.generators):
        raise InvalidInputError("lambda measure requires containment of the "
                                "reference set in the compared set")
    total = Fraction(0)
    for L in poly_o.facets:
        total += 1 - poly_p.delta(L)
    if total < 0:
        raise InternalError("negative lambda measure")
    return total
