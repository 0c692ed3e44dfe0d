"""Directrix, ridge, and basis diagnostics for systems of forms in K[Y].

The ridge of a cone V(F_1..F_m) is computed through its functor of
translations: expanding F(Y+T) and collecting Y-coefficients gives the ideal
cutting out the translations that stabilize the cone; the additive elements
of that ideal (in bounded degree) form a vector space whose minimal
Frobenius-module generators are the ridge generators.  Generators that are
p-th powers of additive polynomials are replaced by their roots, which over
a prime field is a pure relabelling of p-power layers.

The directrix is the span of the degree-one layers of those reduced
generators in characteristic p, and the span of the rows of the Jacobian
coefficient matrix in characteristic zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product

from . import _linalg
from .arith import PolyElement, grlex_key
from .errors import DomainError, InternalError, InvalidInputError
from .forms import GradedForm, effective_form, in_L, in_zero, order_mod_u, v_L
from .polyhedra import LinearForm


def _unwrap(form):
    return form.poly if isinstance(form, GradedForm) else form


def _validate_forms(forms):
    polys = [_unwrap(f) for f in forms]
    if not polys:
        raise InvalidInputError("no input forms")
    frame = polys[0].frame
    for g in polys:
        if g.frame != frame:
            raise InvalidInputError("forms from different frames")
        if g.is_zero:
            raise InvalidInputError("zero form")
        degrees = set()
        for (A, B) in g.terms:
            if any(A):
                raise InvalidInputError("directrix/ridge inputs must lie in K[Y]")
            if not any(B):
                raise InvalidInputError("forms must have no constant term")
            degrees.add(sum(B))
        # mixed degrees are only meaningful for additive polynomials
        # (K-combinations of Y_j^{p^k}), e.g. Y1^p + Y2^{p^2}
        if len(degrees) > 1 and not _is_additive_shaped(g, frame):
            raise InvalidInputError("directrix/ridge inputs must be homogeneous")
    return polys, frame


def _is_additive_shaped(g, frame):
    p = frame.field.characteristic
    if p == 0:
        return False
    for (_, B) in g.terms:
        nonzero = [b for b in B if b]
        if len(nonzero) != 1:
            return False
        k = nonzero[0]
        while k % p == 0:
            k //= p
        if k != 1:
            return False
    return True


def _y_terms(g):
    return {B: c for (A, B), c in g.terms.items()}


def _poly_from_y_terms(frame, terms):
    zero_a = (0,) * frame.e
    return PolyElement._make(frame, {(zero_a, B): c for B, c in terms.items()})


# ---------------------------------------------------------------------------
# directrix
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DirectrixResult:
    linear_forms: tuple
    r_min: int


def _jacobian_rows(polys, frame):
    field = frame.field
    rows = {}
    for g in polys:
        buckets = {}
        for B, c in _y_terms(g).items():
            for j, bj in enumerate(B):
                coeff = field.mul(c, field.from_int(bj))
                if field.is_zero(coeff):
                    continue
                Bd = tuple(b - (1 if t == j else 0) for t, b in enumerate(B))
                vec = buckets.setdefault(Bd, [field.zero] * frame.r)
                vec[j] = field.add(vec[j], coeff)
        for vec in buckets.values():
            rows[tuple(vec)] = vec
    return list(rows.values())


def _forms_from_rows(frame, rows):
    field = frame.field
    basis, _ = _linalg.rref(field, rows)
    out = []
    zero_a = (0,) * frame.e
    for row in basis:
        terms = {}
        for j, c in enumerate(row):
            if not field.is_zero(c):
                B = tuple(1 if t == j else 0 for t in range(frame.r))
                terms[(zero_a, B)] = c
        out.append(PolyElement(frame, terms))
    return tuple(out)


def directrix(forms) -> DirectrixResult:
    """Minimal space of linear forms V with every input inside K[V]."""
    polys, frame = _validate_forms(forms)
    if frame.field.characteristic == 0:
        rows = _jacobian_rows(polys, frame)
    else:
        rr = ridge(forms)
        rows = []
        for g in rr.additive_gens:
            for layer in _layers(g).values():
                rows.append(layer)
    linear = _forms_from_rows(frame, rows)
    return DirectrixResult(linear, len(linear))


# ---------------------------------------------------------------------------
# ridge
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RidgeResult:
    additive_gens: tuple
    d: int


def _hasse_derivatives(g, frame):
    """Positive-degree parts of all Hasse derivatives of g (w.r.t. Y)."""
    field = frame.field
    terms = _y_terms(g)
    maxes = [max(B[j] for B in terms) for j in range(frame.r)]
    results = {}
    for alpha in product(*(range(m + 1) for m in maxes)):
        out = {}
        for B, c in terms.items():
            if any(b < a for b, a in zip(B, alpha)):
                continue
            binom = field.from_int(math.prod(math.comb(b, a)
                                             for b, a in zip(B, alpha)))
            coeff = field.mul(c, binom)
            if field.is_zero(coeff):
                continue
            Bd = tuple(b - a for b, a in zip(B, alpha))
            if not any(Bd):
                continue  # drop the constant term: keep the positive part
            out[Bd] = field.add(out.get(Bd, field.zero), coeff)
        out = {B: c for B, c in out.items() if not field.is_zero(c)}
        if out:
            results[frozenset(out.items())] = out
    return list(results.values())


def _monomials_up_to(r, degree):
    mons = [B for B in product(range(degree + 1), repeat=r)
            if 1 <= sum(B) <= degree]
    mons.sort(key=grlex_key)
    return mons


def _is_p_power_column(B, p, bound):
    nz = [b for b in B if b]
    if len(nz) != 1:
        return False
    q = nz[0]
    while q % p == 0:
        q //= p
    return q == 1


def _layers(g):
    """Split an additive polynomial into maps p^k-layer -> coefficient row."""
    frame = g.frame
    p = frame.field.characteristic
    layers = {}
    for (A, B), c in g.terms.items():
        nz = [(j, b) for j, b in enumerate(B) if b]
        if any(A) or len(nz) != 1:
            raise InternalError("non-additive polynomial in layer split")
        j, b = nz[0]
        k = 0
        while b % p == 0:
            b //= p
            k += 1
        if b != 1:
            raise InternalError("non-additive polynomial in layer split")
        row = layers.setdefault(k, [frame.field.zero] * frame.r)
        row[j] = frame.field.add(row[j], c)
    return layers


def _shift_layers_down(g):
    """The p-th root of an additive polynomial with no degree-one layer."""
    frame = g.frame
    p = frame.field.characteristic
    terms = {}
    for (A, B), c in g.terms.items():
        Bd = tuple(b // p for b in B)
        # over the prime field c^(1/p) = c, so coefficients carry over
        terms[(A, Bd)] = c
    return PolyElement(frame, terms)


def _reduce_additive(g):
    while not g.is_zero and 0 not in _layers(g):
        g = _shift_layers_down(g)
    return g


def _poly_to_vector(g, index):
    vec = [g.frame.field.zero] * len(index)
    for (A, B), c in g.terms.items():
        vec[index[B]] = c
    return vec


def _greedy_generators(frame, candidates, degree_bound):
    """Pick a minimal set whose p-power images span all the candidates."""
    field = frame.field
    p = field.characteristic
    mons = _monomials_up_to(frame.r, degree_bound)
    index = {B: i for i, B in enumerate(mons)}
    covered = []
    chosen = []

    def add_cover(g):
        h = g
        while True:
            covered.append(_poly_to_vector(h, index))
            if p == 0:
                break
            h = h ** p
            if h.total_degree() > degree_bound:
                break

    base_rank = 0
    for g in sorted(candidates, key=lambda h: (h.total_degree(),
                                               sorted(map(grlex_key, _y_terms(h))))):
        vec = _poly_to_vector(g, index)
        if _linalg.rank(field, covered + [vec]) == base_rank:
            continue
        chosen.append(g)
        add_cover(g)
        base_rank = _linalg.rank(field, covered)
    return chosen


def ridge(forms) -> RidgeResult:
    """Minimal additive polynomials sigma with every input inside K[sigma].

    Generators are returned reduced: while a generator is the p-th power of
    an additive polynomial, it is replaced by that root.
    """
    polys, frame = _validate_forms(forms)
    field = frame.field
    p = field.characteristic
    if p == 0:
        rows = _jacobian_rows(polys, frame)
        linear = _forms_from_rows(frame, rows)
        return RidgeResult(linear, len(linear))

    degree_bound = max(g.total_degree() for g in polys)
    ideal_gens = []
    seen = set()
    for g in polys:
        for terms in _hasse_derivatives(g, frame):
            key = frozenset(terms.items())
            if key not in seen:
                seen.add(key)
                ideal_gens.append(terms)

    mons = _monomials_up_to(frame.r, degree_bound)
    index = {B: i for i, B in enumerate(mons)}
    rows = []
    for terms in ideal_gens:
        gdeg = max(sum(B) for B in terms)
        for m in [(0,) * frame.r] + mons:
            if sum(m) + gdeg > degree_bound:
                continue
            vec = [field.zero] * len(mons)
            for B, c in terms.items():
                shifted = tuple(b + t for b, t in zip(B, m))
                vec[index[shifted]] = field.add(vec[index[shifted]], c)
            rows.append(vec)
    basis, _ = _linalg.rref(field, rows)

    # intersect the span with the space of additive polynomials
    additive_cols = [i for i, B in enumerate(mons)
                     if _is_p_power_column(B, p, degree_bound)]
    other_cols = [i for i in range(len(mons)) if i not in set(additive_cols)]
    constraint = [[row[c] for row in basis] for c in other_cols]
    coeff_vectors = (_linalg.nullspace_basis(field, constraint)
                     if constraint else
                     [[field.one if i == t else field.zero
                       for i in range(len(basis))] for t in range(len(basis))])
    additive_vectors = []
    for cv in coeff_vectors:
        combined = [field.zero] * len(mons)
        for ci, row in zip(cv, basis):
            if field.is_zero(ci):
                continue
            for t in range(len(mons)):
                combined[t] = field.add(combined[t], field.mul(ci, row[t]))
        additive_vectors.append(combined)
    additive_basis, _ = _linalg.rref(field, additive_vectors)

    zero_a = (0,) * frame.e
    candidates = [
        PolyElement._make(frame, {(zero_a, mons[t]): c
                                  for t, c in enumerate(row)})
        for row in additive_basis]
    candidates = [g for g in candidates if not g.is_zero]

    chosen = _greedy_generators(frame, candidates, degree_bound)
    reduced = [_reduce_additive(g) for g in chosen]
    reduced = _greedy_generators(frame, reduced, degree_bound)
    return RidgeResult(tuple(reduced), len(reduced))


# ---------------------------------------------------------------------------
# the radical condition
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RidgeDirectrixReport:
    status: str  # "holds" | "fails" | "unknown"
    witness: object
    directrix: DirectrixResult
    ridge: RidgeResult


def check_rid_eq_dir(forms) -> RidgeDirectrixReport:
    """Whether the reduced ridge generators span exactly the directrix.

    Holds when every reduced generator is linear (their span is then the
    directrix by construction); fails with the first nonlinear reduced
    generator as witness.
    """
    polys, frame = _validate_forms(forms)
    rr = ridge(forms)
    dd = directrix(forms)
    if frame.field.characteristic == 0:
        return RidgeDirectrixReport("holds", None, dd, rr)
    nonlinear = [g for g in rr.additive_gens if g.total_degree() > 1]
    if nonlinear:
        return RidgeDirectrixReport("fails", nonlinear[0], dd, rr)
    field = frame.field
    gen_rows = [[_y_terms(g).get(tuple(1 if t == j else 0
                                       for t in range(frame.r)), field.zero)
                 for j in range(frame.r)] for g in rr.additive_gens]
    if _linalg.rank(field, gen_rows) != dd.r_min:
        raise InternalError("linear ridge generators do not span the directrix")
    return RidgeDirectrixReport("holds", None, dd, rr)


# ---------------------------------------------------------------------------
# (u)-standard basis diagnostics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StdBasisReport:
    ok: bool
    reference_form: object
    violations: tuple
    condition1: str  # "checked" | "not-established"
    orders: tuple
    exponents: tuple


def _homogeneous_membership(frame, target_terms, degree, earlier):
    """Whether target lies in the ideal of the earlier forms, in this degree."""
    field = frame.field
    span_rows = []
    mons = [B for B in product(range(degree + 1), repeat=frame.r)
            if sum(B) == degree]
    index = {B: i for i, B in enumerate(mons)}
    for terms, gdeg in earlier:
        shift = degree - gdeg
        if shift < 0:
            continue
        for m in product(range(shift + 1), repeat=frame.r):
            if sum(m) != shift:
                continue
            vec = [field.zero] * len(mons)
            for B, c in terms.items():
                shifted = tuple(b + t for b, t in zip(B, m))
                vec[index[shifted]] = field.add(vec[index[shifted]], c)
            span_rows.append(vec)
    target = [field.zero] * len(mons)
    for B, c in target_terms.items():
        target[index[B]] = c
    return _linalg.in_row_span(field, span_rows, target)


def _spair_condition(frame, initial_forms):
    """Best-effort check that the initial forms pairwise S-reduce to zero."""
    field = frame.field

    def lead(terms):
        return min(terms, key=grlex_key)

    def reduce_to_zero(terms):
        while terms:
            m = lead(terms)
            hit = None
            for other in initial_forms:
                lm = lead(other)
                if all(a >= b for a, b in zip(m, lm)):
                    hit = (other, lm)
                    break
            if hit is None:
                return False
            other, lm = hit
            factor = field.div(terms[m], other[lm])
            shift = tuple(a - b for a, b in zip(m, lm))
            for B, c in other.items():
                tgt = tuple(b + s for b, s in zip(B, shift))
                val = field.sub(terms.get(tgt, field.zero), field.mul(factor, c))
                if field.is_zero(val):
                    terms.pop(tgt, None)
                else:
                    terms[tgt] = val
        return True

    for i in range(len(initial_forms)):
        for j in range(i + 1, len(initial_forms)):
            fi, fj = initial_forms[i], initial_forms[j]
            mi, mj = lead(fi), lead(fj)
            lcm = tuple(max(a, b) for a, b in zip(mi, mj))
            spair = {}
            for B, c in fi.items():
                tgt = tuple(b + l - a for b, l, a in zip(B, lcm, mi))
                coeff = field.div(c, fi[mi])
                spair[tgt] = field.add(spair.get(tgt, field.zero), coeff)
            for B, c in fj.items():
                tgt = tuple(b + l - a for b, l, a in zip(B, lcm, mj))
                coeff = field.div(c, fj[mj])
                spair[tgt] = field.sub(spair.get(tgt, field.zero), coeff)
            spair = {B: c for B, c in spair.items() if not field.is_zero(c)}
            if not reduce_to_zero(spair):
                return "not-established"
    return "checked"


def check_standard_basis(system, L: LinearForm = None) -> StdBasisReport:
    """Diagnose the standard-basis conditions for a generator system.

    Checks, against the reference form L (defaulting to a computed effective
    one): that each in_L(f_i) equals in_0(f_i) inside K[Y]; that the orders
    n_i are nondecreasing; and that no in_0(f_i) lies in the ideal of the
    previous initial forms.  The generation condition for the full graded
    ideal is approximated by an S-pair criterion and reported separately.
    """
    system = list(system)
    if not system:
        raise InvalidInputError("empty generator system")
    frame = system[0].frame
    if L is None:
        L = effective_form(system)
    violations = []
    orders = []
    exponents = []
    initial_forms = []
    for i, g in enumerate(system, start=1):
        n = order_mod_u(g)
        if n == float("inf"):
            raise DomainError(f"generator #{i} lies in <u>")
        orders.append(int(n))
        form = in_zero(g)
        terms = _y_terms(form.poly)
        exponents.append(min(terms, key=grlex_key))
        if v_L(g, L) != n or not in_L(g, L).is_pure_y:
            violations.append(("initial-form-not-effective", i))
        if len(orders) > 1 and orders[-1] < orders[-2]:
            violations.append(("orders-not-nondecreasing", i))
        if initial_forms and _homogeneous_membership(
                frame, terms, orders[-1],
                [(t, d) for t, d in initial_forms]):
            violations.append(("initial-form-in-earlier-ideal", i))
        initial_forms.append((terms, orders[-1]))
    condition1 = _spair_condition(frame, [t for t, _ in initial_forms])
    return StdBasisReport(
        ok=not violations,
        reference_form=L,
        violations=tuple(violations),
        condition1=condition1,
        orders=tuple(orders),
        exponents=tuple(exponents),
    )


def normalized_basis_signature(system):
    """(m, exponents, orders) shared by all 0-normalized standard bases."""
    report = check_standard_basis(system)
    return (len(report.orders), report.exponents, report.orders)
