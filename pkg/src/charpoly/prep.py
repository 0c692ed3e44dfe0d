"""Vertex preparation: normalization, solvability, dissolution, the driver.

The driver walks the vertices of the projected polyhedron in minimal-first
order, normalizes at each vertex (subtracting staircase multiples of earlier
generators), and tries to remove integral vertices by translations
z_j = y_j + lambda_j u^v.  Translation can run along an infinite ray (the
order-2 double-point phenomenon); the driver detects the ray and either
stops with a structured cycle report or escapes through a generalized
substitution z_j = y_j + h_j whose monomials live on the stalled face.

Everything here manipulates exact data; theorem-backed postconditions are
asserted after every normalization and translation, and a violated assertion
raises InternalError rather than continuing with a wrong state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from .arith import (INFINITY, PolyElement, exponent_of, grlex_key,
                    order_mod_u, substitute_all_y, substitute_y)
from .errors import (BudgetExceededError, DomainError, InternalError,
                     InvalidInputError, NotDissolvableError)
from .forms import GradedForm, MonomialValuation, in_nu, in_vertex, in_zero
from .graded import check_rid_eq_dir
from .polyhedra import (FSubset, LinearForm, fsubset_from_points,
                        lambda_measure, point_order_key)
from .forms import poly_of_system


# ---------------------------------------------------------------------------
# budgets and state
# ---------------------------------------------------------------------------

@dataclass
class Budget:
    """Iteration limits; None means 'derive a default from the system'."""

    max_events: int = 64
    normalize_steps: int = None
    dissolve_degree: int = None
    dissolve: bool = True

    def validate(self):
        if self.max_events < 1:
            raise InvalidInputError("budget: max_events must be >= 1")
        if self.normalize_steps is not None and self.normalize_steps < 1:
            raise InvalidInputError("budget: normalize_steps must be >= 1")
        if self.dissolve_degree is not None and self.dissolve_degree < 1:
            raise InvalidInputError("budget: dissolve_degree must be >= 1")

    def norm_steps(self, system) -> int:
        if self.normalize_steps is not None:
            return self.normalize_steps
        n_max = max(int(order_mod_u(g)) for g in system)
        return 10 * len(system) * max(n_max, 1)

    def dissolve_bound(self, system) -> int:
        if self.dissolve_degree is not None:
            return self.dissolve_degree
        n_max = max(int(order_mod_u(g)) for g in system)
        d_max = max(g.total_degree() for g in system)
        return max(2 * n_max, d_max)


@dataclass(frozen=True)
class SolveWitness:
    vertex: tuple      # integral point, as a tuple of ints
    lambdas: tuple     # one scalar per y-variable


@dataclass
class PrepState:
    frame: object
    gens: tuple
    shifts: tuple            # shifts[j]: current y_j = original y_j + shifts[j]
    events: tuple
    status: str
    cycle: tuple = None
    witness: tuple = None    # nonempty-witness point of normalize_empty_case
    lambda_value: Fraction = None
    lambda_trace: tuple = ()

    @property
    def polyhedron(self) -> FSubset:
        return poly_of_system(self.gens)

    def substitutions(self):
        """Map y-name -> shift polynomial (in the original variables)."""
        return {name: s for name, s in zip(self.frame.y_names, self.shifts)
                if not s.is_zero}


# ---------------------------------------------------------------------------
# shared validation helpers
# ---------------------------------------------------------------------------

def _validate_system(system):
    system = [g for g in system]
    if not system:
        raise InvalidInputError("empty generator system")
    frame = system[0].frame
    kept = []
    for g in system:
        if g.frame != frame:
            raise InvalidInputError("generators from different frames")
        if g.is_zero:
            continue
        if order_mod_u(g) == INFINITY:
            raise InvalidInputError("a generator lies in <u>")
        kept.append(g)
    if not kept:
        raise InvalidInputError("no nonzero generators")
    return frame, kept


def _check_exp_order(system):
    exps = [exponent_of(g) for g in system]
    for a, b in zip(exps, exps[1:]):
        if grlex_key(a) >= grlex_key(b):
            raise InvalidInputError(
                "generator exponents must strictly increase in grlex order")
    return exps


def _in_staircase(B, exps):
    return any(all(b >= e for b, e in zip(B, exp)) for exp in exps)


def _integral(v):
    return all(Fraction(c).denominator == 1 for c in v)


# ---------------------------------------------------------------------------
# normalization at a vertex
# ---------------------------------------------------------------------------

def is_normalized_at(system, v):
    """Whether no v-initial form carries a term in an earlier staircase.

    Returns (ok, witnesses), each witness being (i, A, B) with 1-based i.
    """
    frame, system = _validate_system(system)
    exps = _check_exp_order(system)
    witnesses = []
    for i, g in enumerate(system):
        if i == 0:
            continue
        n = order_mod_u(g)
        for (A, B) in in_vertex(g, v).poly.terms:
            if sum(B) <= n and _in_staircase(B, exps[:i]):
                witnesses.append((i + 1, A, B))
    witnesses.sort(key=lambda w: (grlex_key(w[2]), w[0], w[1]))
    return (not witnesses, tuple(witnesses))


def normalize_at_vertex(system, v, max_steps=None):
    """Remove staircase terms from the v-initial forms (one vertex).

    Returns (new_system, multipliers, steps) where multipliers maps (i, j)
    (1-based, j < i) to the accumulated factor x_ij with
    g_i = f_i - sum_j x_ij f_j.  Grlex order of the exponents is required
    and preserved; the polyhedron only shrinks and every extremal vertex
    other than v survives (checked, violation = internal error).
    """
    frame, system = _validate_system(system)
    exps = _check_exp_order(system)
    field = frame.field
    before = poly_of_system(system)
    if max_steps is None:
        max_steps = Budget().norm_steps(system)
    gens = list(system)
    table = {}
    steps = 0
    while True:
        ok, witnesses = is_normalized_at(gens, v)
        if ok:
            break
        if steps >= max_steps:
            raise BudgetExceededError(
                f"normalization at {v} did not settle in {max_steps} steps",
                events=witnesses)
        i1, A, B = witnesses[0]
        i = i1 - 1
        if not any(A) and B == exps[i]:
            raise InvalidInputError(
                "generator exponent lies in an earlier staircase; "
                "reduce the basis first")
        divisors = [j for j in range(i) if all(b >= e for b, e
                                               in zip(B, exps[j]))]
        j = max(divisors, key=lambda t: grlex_key(exps[t]))
        c = gens[i].coefficient(A, B)
        lead = gens[j].coefficient((0,) * frame.e, exps[j])
        factor = field.div(c, lead)
        mult = PolyElement.monomial(frame, A,
                                    tuple(b - e for b, e in zip(B, exps[j])),
                                    factor)
        gens[i] = gens[i] - mult * gens[j]
        key = (i + 1, j + 1)
        table[key] = table.get(key, PolyElement.zero(frame)) + mult
        steps += 1

    after = poly_of_system(gens)
    if not after.is_empty:
        if not all(before.contains(p) for p in after.generators):
            raise InternalError("normalization enlarged the polyhedron")
    vv = tuple(Fraction(c) for c in v)
    for w in before.extreme_vertices:
        if w != vv and w not in after.extreme_vertices:
            raise InternalError(
                f"normalization destroyed the untouched vertex {w}")
    return tuple(gens), table, steps


def vertex_normalize(system, budget: Budget = None) -> PrepState:
    """Normalize at every vertex, minimal-first, until all are clean."""
    budget = budget or Budget()
    budget.validate()
    frame, system = _validate_system(system)
    from .graded import check_standard_basis
    report = check_standard_basis(system)
    if not report.ok:
        raise InvalidInputError(
            f"not a standard basis: {report.violations}")
    gens = list(system)
    events = []
    remaining = budget.norm_steps(gens)
    while True:
        poly = poly_of_system(gens)
        if poly.is_empty:
            break
        dirty = None
        for v in sorted(poly.vertices, key=point_order_key):
            ok, _ = is_normalized_at(gens, v)
            if not ok:
                dirty = v
                break
        if dirty is None:
            break
        if remaining <= 0:
            raise BudgetExceededError(
                "vertex normalization budget exhausted", events=tuple(events))
        new_gens, table, steps = normalize_at_vertex(gens, dirty, remaining)
        remaining -= max(steps, 1)
        gens = list(new_gens)
        events.append({"type": "normalize", "vertex": dirty,
                       "multipliers": {k: str(m) for k, m in table.items()}})
    zero = PolyElement.zero(frame)
    return PrepState(frame, tuple(gens), (zero,) * frame.r,
                     tuple(events), "vertex-normalized")


# ---------------------------------------------------------------------------
# strong normalization for the expected-empty case
# ---------------------------------------------------------------------------

def normalize_empty_case(system, budget: Budget = None) -> PrepState:
    """Drive the full normalization loop, watching for non-termination.

    Subtracts one staircase term per generator per pass; the grlex-minimal
    offender of each generator must strictly increase between passes.  A
    stalled offender with a nonempty stationary polyhedron means the loop
    cannot make progress: the minimal vertex is then returned as a witness
    that the polyhedron cannot be emptied (status "nonempty-witness").  With no
    offenders left the status is "empty-normalized" when the polyhedron is
    indeed empty; a stall that cannot be classified is reported as
    "stalled" rather than guessed at.
    """
    budget = budget or Budget()
    budget.validate()
    frame, system = _validate_system(system)
    exps = _check_exp_order(system)
    field = frame.field
    gens = list(system)
    zero = PolyElement.zero(frame)
    events = []
    trackers = [[] for _ in gens]
    prev_poly = poly_of_system(gens)
    max_passes = budget.norm_steps(gens)

    def finish(status, witness=None):
        return PrepState(frame, tuple(gens), (zero,) * frame.r,
                         tuple(events), status, witness=witness)

    def classify_nonempty():
        poly = poly_of_system(gens)
        if poly.is_empty:
            events.append({"type": "budget-stop", "reason": "stalled-empty"})
            return finish("stalled")
        stationary = poly == prev_poly
        v = min(poly.vertices, key=point_order_key)
        try:
            new_gens, _, _ = normalize_at_vertex(gens, v)
        except (BudgetExceededError, InvalidInputError):
            events.append({"type": "budget-stop",
                           "reason": "witness-vertex-not-normalizable"})
            return finish("stalled")
        gens[:] = list(new_gens)
        check = poly_of_system(gens)
        if check.is_vertex(v):
            events.append({"type": "loop-detected",
                           "offender-traces": [list(t) for t in trackers]})
            if stationary:
                events.append({"type": "polyhedron-stationary",
                               "vertices": list(check.vertices)})
            events.append({"type": "nonempty-witness", "vertex": v})
            return finish("nonempty-witness", witness=v)
        return None  # the suspect vertex dissolved under normalization

    for _ in range(max_passes):
        poly = poly_of_system(gens)
        offended = False
        stalled = False
        for i, g in enumerate(gens):
            n = order_mod_u(g)
            offenders = [(A, B) for (A, B) in g.terms
                         if sum(B) <= n and _in_staircase(B, exps[:i])]
            if not offenders:
                continue
            offended = True
            A, B = min(offenders, key=lambda t: (grlex_key(t[1]), t[0]))
            if not any(A) and B == exps[i]:
                raise InvalidInputError(
                    "generator exponent lies in an earlier staircase; "
                    "reduce the basis first")
            if trackers[i] and grlex_key(B) <= grlex_key(trackers[i][-1]):
                stalled = True
                trackers[i].append(B)
                break
            trackers[i].append(B)
            divisors = [j for j in range(i)
                        if all(b >= e for b, e in zip(B, exps[j]))]
            j = max(divisors, key=lambda t: grlex_key(exps[t]))
            lead = gens[j].coefficient((0,) * frame.e, exps[j])
            mult = PolyElement.monomial(
                frame, A, tuple(b - e for b, e in zip(B, exps[j])),
                field.div(g.coefficient(A, B), lead))
            gens[i] = gens[i] - mult * gens[j]
            events.append({"type": "strong-normalize-step",
                           "generator": i + 1, "term": (A, B)})
        if stalled:
            result = classify_nonempty()
            if result is not None:
                return result
            trackers = [[] for _ in gens]
            prev_poly = poly_of_system(gens)
            continue
        if not offended:
            poly = poly_of_system(gens)
            if poly.is_empty:
                return finish("empty-normalized")
            v = min(poly.vertices, key=point_order_key)
            events.append({"type": "nonempty-witness", "vertex": v})
            return finish("nonempty-witness", witness=v)
        prev_poly = poly_of_system(gens)
    events.append({"type": "budget-stop", "reason": "normalize-passes"})
    return finish("stalled")


# ---------------------------------------------------------------------------
# vertex solvability
# ---------------------------------------------------------------------------

def _solution_family(field, rows, rhs, r):
    """General solution of rows*x = rhs as (particular, nullspace, free)."""
    from . import _linalg
    if not rows:
        identity = [[field.one if i == j else field.zero for i in range(r)]
                    for j in range(r)]
        return [field.zero] * r, identity, list(range(r))
    particular = _linalg.solve(field, rows, rhs)
    if particular is None:
        return None, None, None
    null = _linalg.nullspace_basis(field, rows)
    _, pivots = _linalg.rref(field, rows)
    free = [j for j in range(r) if j not in set(pivots)]
    return particular, null, free


def _root_candidates(field, system, v, j):
    """Scalar candidates for lambda_j from pure-power initial forms."""
    out = []
    for g in system:
        n = int(order_mod_u(g))
        form = in_zero(g).poly
        items = list(form.terms.items())
        if len(items) != 1:
            continue
        (A0, B0), c0 = items[0]
        if B0.count(0) != len(B0) - 1 or B0[j] != n:
            continue
        k_min = None
        for k in range(1, n + 1):
            if not field.is_zero(field.from_int(math.comb(n, k))):
                k_min = k
                break
        if k_min is None:
            continue
        A = tuple(k_min * int(c) for c in v)
        B = tuple((n - k_min) if t == j else 0 for t in range(len(B0)))
        target = g.coefficient(A, B)
        denom = field.mul(field.from_int(math.comb(n, k_min)), c0)
        out.extend(field.kth_roots(field.div(target, denom), k_min))
    out.append(field.zero)
    seen = []
    for x in out:
        if x not in seen:
            seen.append(x)
    return seen


def vertex_solvable(system, v):
    """A verified translation witness removing the vertex v, or None.

    Candidates for lambda come from the linear layer |B| = n_i - 1 of the
    v-initial forms (matching in_0(f)(Y + lambda U^v) against in_v(f));
    coordinates the linear layer leaves free are filled by k-th roots from
    pure-power initial forms (or full enumeration over a small prime
    field).  Every candidate is verified by substitution before being
    returned, so a returned witness is always correct.
    """
    frame, system = _validate_system(system)
    field = frame.field
    r = frame.r
    v = tuple(Fraction(c) for c in v)
    if not _integral(v):
        return None
    vi = tuple(int(c) for c in v)

    rows, rhs = [], []
    for g in system:
        n = int(order_mod_u(g))
        in0 = in_zero(g).poly
        inv = in_vertex(g, v).poly
        layer = {}
        for (A, B), c in inv.terms.items():
            if sum(B) == n - 1:
                layer[B] = c
        touched = set(layer)
        derivative_rows = {}
        for (A0, B0), c in in0.terms.items():
            for j in range(r):
                if B0[j] == 0:
                    continue
                coeff = field.mul(c, field.from_int(B0[j]))
                if field.is_zero(coeff):
                    continue
                Bd = tuple(b - (1 if t == j else 0) for t, b in enumerate(B0))
                row = derivative_rows.setdefault(Bd, [field.zero] * r)
                row[j] = field.add(row[j], coeff)
                touched.add(Bd)
        for B in touched:
            row = derivative_rows.get(B, [field.zero] * r)
            rows.append(row)
            rhs.append(layer.get(B, field.zero))

    particular, null, free = _solution_family(field, rows, rhs, r)
    if particular is None:
        return None

    if free and field.characteristic > 0 and field.p ** len(free) <= 512:
        pools = [[field.from_int(t) for t in range(field.p)] for _ in free]
    else:
        pools = [_root_candidates(field, system, v, j) for j in free]

    def combos(idx, base):
        if idx == len(free):
            yield list(base)
            return
        for x in pools[idx]:
            yield from combos(idx + 1, base + [x])

    count = 0
    for free_vals in combos(0, []):
        count += 1
        if count > 512:
            break
        lam = list(particular)
        for fj, x in zip(free, free_vals):
            delta = field.sub(x, lam[fj])
            if field.is_zero(delta):
                continue
            vec = next(nv for nv in null if not field.is_zero(nv[fj]))
            scale = field.div(delta, vec[fj])
            lam = [field.add(a, field.mul(scale, b)) for a, b in zip(lam, vec)]
        if all(field.is_zero(x) for x in lam):
            continue
        new_gens = _translate(system, vi, lam)
        new_poly = poly_of_system(new_gens)
        if new_poly.is_empty or not new_poly.contains(v):
            return SolveWitness(vi, tuple(lam))
    return None


def _translate(system, vi, lambdas):
    """Apply y_j -> y_j - lambda_j u^v to every generator (z-coordinates)."""
    frame = system[0].frame
    field = frame.field
    out = list(system)
    for j, lam in enumerate(lambdas):
        if field.is_zero(lam):
            continue
        h = PolyElement.monomial(frame, vi, (0,) * frame.r, field.neg(lam))
        out = [substitute_y(g, j, h) for g in out]
    return out


def apply_solution(state: PrepState, w: SolveWitness) -> PrepState:
    """Apply a verified translation witness and assert the theorems."""
    field = state.frame.field
    if all(field.is_zero(x) for x in w.lambdas):
        raise InvalidInputError("identity witness (all lambdas zero)")
    gens, shifts = _apply_witness(state.frame, list(state.gens),
                                  list(state.shifts), w)
    events = state.events + (
        {"type": "solve", "vertex": tuple(Fraction(c) for c in w.vertex),
         "lambdas": tuple(field.format(x) for x in w.lambdas)},)
    return PrepState(state.frame, tuple(gens), tuple(shifts), events,
                     state.status, cycle=state.cycle,
                     witness=state.witness,
                     lambda_value=state.lambda_value,
                     lambda_trace=state.lambda_trace)


def _apply_witness(frame, gens, shifts, w: SolveWitness):
    field = frame.field
    before = poly_of_system(gens)
    new_gens = _translate(gens, w.vertex, w.lambdas)
    after = poly_of_system(new_gens)
    vv = tuple(Fraction(c) for c in w.vertex)
    if not after.is_empty:
        if not all(before.contains(p) for p in after.generators):
            raise InternalError("translation enlarged the polyhedron")
        if after.contains(vv):
            raise InternalError("translation failed to remove its vertex")
    for x in before.extreme_vertices:
        if x != vv and x not in after.extreme_vertices:
            raise InternalError(
                f"translation destroyed the untouched vertex {x}")
    new_shifts = list(shifts)
    for j, lam in enumerate(w.lambdas):
        if not field.is_zero(lam):
            new_shifts[j] = new_shifts[j] + PolyElement.monomial(
                frame, w.vertex, (0,) * frame.r, lam)
    return new_gens, new_shifts


# ---------------------------------------------------------------------------
# generalized dissolution (the completion-free face escape)
# ---------------------------------------------------------------------------

def _term_key(term):
    (A, B), _ = term
    return (sum(A) + sum(B), -sum(B), B, A)


def face_initial_system(state_or_system, L: LinearForm, ell):
    """The nu-initial forms of the system for nu = (L on u, ell on y)."""
    if isinstance(state_or_system, PrepState):
        system = list(state_or_system.gens)
    else:
        system = list(state_or_system)
    frame, system = _validate_system(system)
    if poly_of_system(system).is_empty:
        raise DomainError("face initial system of an empty polyhedron")
    nu = MonomialValuation(L, Fraction(ell))
    return [in_nu(g, nu) for g in system]


def _stalled_face(poly: FSubset, v):
    """Facet of the polyhedron spanned by the other extremal vertices."""
    others = [w for w in poly.extreme_vertices if w != v]
    if others:
        reduced = fsubset_from_points(others, dim=poly.dim)
        facets = reduced.facets
        if facets:
            return min(facets, key=lambda L: (L(v), L.coeffs))
    total = sum(v)
    if total == 0:
        raise InvalidInputError("cannot build a face at the origin")
    return LinearForm([Fraction(1, 1) / total] * len(v))


def _extract_h(frame, g, j, L, ell, bound):
    """Iteratively build h with f = c (y_j + h)^n + (terms off the face)."""
    field = frame.field
    n = int(order_mod_u(g))
    c0 = in_zero(g).poly.coefficient((0,) * frame.e,
                                     tuple(n if t == j else 0
                                           for t in range(frame.r)))
    w_bound = ell * n
    h = PolyElement.zero(frame)
    y_j = PolyElement.variable(frame, frame.y_names[j])
    attempted = []
    for _ in range(bound * (bound + 2) + 4):
        residual = g - (y_j + h) ** n * c0
        offenders = [
            ((A, B), c) for (A, B), c in residual.terms.items()
            if L(A) + ell * sum(B) <= w_bound]
        if not offenders:
            return h, attempted
        (A, B), c = min(offenders, key=_term_key)
        attempted.append((A, B))
        placed = False
        for k in range(1, n + 1):
            binom = field.from_int(math.comb(n, k))
            if field.is_zero(binom):
                continue
            rest = tuple(b - (n - k if t == j else 0)
                         for t, b in enumerate(B))
            if any(x < 0 or x % k for x in rest) or any(a % k for a in A):
                continue
            Bh = tuple(x // k for x in rest)
            Ah = tuple(a // k for a in A)
            roots = field.kth_roots(field.div(c, field.mul(binom, c0)), k)
            if not roots:
                continue
            term = PolyElement.monomial(frame, Ah, Bh, roots[0])
            t_weight = L(Ah) + ell * sum(Bh)
            if t_weight != ell:
                continue
            if not any(Ah) and sum(Bh) == 1:
                raise NotDissolvableError(
                    "face substitution degenerates to a plain variable swap",
                    support=tuple(attempted))
            if sum(Ah) + sum(Bh) > bound:
                raise NotDissolvableError(
                    f"face substitution exceeds the degree budget {bound}",
                    support=tuple(attempted))
            h = h + term
            placed = True
            break
        if not placed:
            raise NotDissolvableError(
                "no face monomial can absorb an offending term",
                support=tuple(attempted))
    raise NotDissolvableError("face substitution did not settle",
                              support=tuple(attempted))


def _rewrite_in_new_variables(frame, g, subs, n, L, ell, bound):
    """Express g as a polynomial in (u, y_j + h_j), all terms off the face."""
    field = frame.field
    w_bound = ell * n
    shifted = {j: PolyElement.variable(frame, frame.y_names[j]) + h
               for j, h in subs.items()}
    residual = g
    out_terms = {}
    while not residual.is_zero:
        (A, B), c = min(residual.terms.items(), key=_term_key)
        if sum(A) + sum(B) > bound:
            raise NotDissolvableError(
                f"rewrite exceeds the degree budget {bound}",
                support=((A, B),))
        if sum(B) < n and L(A) + ell * sum(B) <= w_bound:
            raise NotDissolvableError(
                "rewritten generator would keep a point on the face",
                support=((A, B),))
        out_terms[(A, B)] = c
        piece = PolyElement.monomial(frame, A, (0,) * frame.r, c)
        for j, b in enumerate(B):
            if not b:
                continue
            base = shifted.get(j)
            if base is None:
                base = PolyElement.variable(frame, frame.y_names[j])
            piece = piece * base ** b
        residual = residual - piece
    return PolyElement._make(frame, out_terms)


def _dissolve(frame, gens, shifts, v, budget: Budget):
    poly = poly_of_system(gens)
    vv = tuple(Fraction(c) for c in v)
    if not poly.is_vertex(vv):
        raise InvalidInputError(f"{v} is not a vertex of the polyhedron")
    L = _stalled_face(poly, vv)
    ell = poly.delta(L)
    bound = budget.dissolve_bound(gens)
    field = frame.field

    subs = {}
    attempted = []
    for g in gens:
        n = int(order_mod_u(g))
        form = in_zero(g).poly
        items = list(form.terms.items())
        nz = [(jj, b) for jj, b in enumerate(items[0][0][1]) if b] \
            if len(items) == 1 else []
        if len(items) != 1 or len(nz) != 1 or nz[0][1] != n:
            raise NotDissolvableError(
                "initial form is not a pure power; face solving out of scope",
                support=())
        j = nz[0][0]
        h, tried = _extract_h(frame, g, j, L, ell, bound)
        attempted.extend(tried)
        if j in subs and subs[j] != h:
            raise NotDissolvableError(
                "generators demand conflicting face substitutions",
                support=tuple(attempted))
        subs[j] = h
    subs = {j: h for j, h in subs.items() if not h.is_zero}
    if not subs:
        raise NotDissolvableError("stalled face admits no substitution",
                                  support=tuple(attempted))

    new_gens = []
    for g in gens:
        n = int(order_mod_u(g))
        new_gens.append(_rewrite_in_new_variables(frame, g, subs, n, L,
                                                  ell, bound))
    after = poly_of_system(new_gens)
    if not after.is_empty:
        if after.contains(vv):
            raise NotDissolvableError(
                "substitution failed to remove the stalled vertex",
                support=tuple(attempted))
        if after.delta(L) <= ell:
            raise NotDissolvableError(
                "substitution did not lift the polyhedron off the face",
                support=tuple(attempted))

    new_shifts = list(shifts)
    replacements = [PolyElement.variable(frame, nm) + s
                    for nm, s in zip(frame.y_names, shifts)]
    for j, h in subs.items():
        new_shifts[j] = new_shifts[j] + substitute_all_y(h, replacements)
    info = {"type": "dissolve", "vertex": vv, "face": L.coeffs,
            "ell": ell,
            "substitutions": {frame.y_names[j]: str(h)
                              for j, h in subs.items()}}
    return new_gens, new_shifts, info


def dissolve_generalized(state: PrepState, v, budget: Budget = None) -> PrepState:
    """Escape a stalled face through z_j = y_j + h_j with face-weight h_j."""
    budget = budget or Budget()
    budget.validate()
    gens, shifts, info = _dissolve(state.frame, list(state.gens),
                                   list(state.shifts), v, budget)
    return PrepState(state.frame, tuple(gens), tuple(shifts),
                     state.events + (info,), state.status,
                     cycle=state.cycle, witness=state.witness,
                     lambda_value=state.lambda_value,
                     lambda_trace=state.lambda_trace)


# ---------------------------------------------------------------------------
# basis repair (reduction of dependent initial forms)
# ---------------------------------------------------------------------------

def _initial_membership(frame, gens, i, exps):
    """Multipliers q_j with in_0(g_i) = sum q_j in_0(g_j), or None."""
    from . import _linalg
    from itertools import product as iproduct
    field = frame.field
    n_i = int(order_mod_u(gens[i]))
    target_form = in_zero(gens[i]).poly
    mons = [B for B in iproduct(range(n_i + 1), repeat=frame.r)
            if sum(B) == n_i]
    index = {B: t for t, B in enumerate(mons)}
    rows = []
    tags = []
    for j in range(i):
        n_j = int(order_mod_u(gens[j]))
        shift = n_i - n_j
        if shift < 0:
            continue
        form = in_zero(gens[j]).poly
        for m in iproduct(range(shift + 1), repeat=frame.r):
            if sum(m) != shift:
                continue
            vec = [field.zero] * len(mons)
            for (A, B), c in form.terms.items():
                t = tuple(b + x for b, x in zip(B, m))
                vec[index[t]] = field.add(vec[index[t]], c)
            rows.append(vec)
            tags.append((j, m))
    target = [field.zero] * len(mons)
    for (A, B), c in target_form.terms.items():
        target[index[B]] = c
    coeffs = _linalg.row_span_coefficients(field, rows, target)
    if coeffs is None:
        return None
    lift = {}
    for (j, m), c in zip(tags, coeffs):
        if field.is_zero(c):
            continue
        mono = PolyElement.monomial(frame, (0,) * frame.e, m, c)
        lift[j] = lift.get(j, PolyElement.zero(frame)) + mono
    return lift


def _repair_basis(frame, gens, budget: Budget):
    """Sort by exponent and reduce initial forms lying in earlier ideals."""
    field = frame.field
    events = []
    gens = list(gens)
    rounds = budget.norm_steps(gens)
    for _ in range(rounds):
        alive = [g for g in gens if not g.is_zero]
        if len(alive) < len(gens):
            events.append({"type": "generator-dropped",
                           "count": len(gens) - len(alive)})
        gens = alive
        if not gens:
            raise InvalidInputError("all generators reduced to zero")
        for g in gens:
            if order_mod_u(g) == INFINITY:
                raise InvalidInputError(
                    "a generator reduced into <u>; basis cannot be repaired")
        gens.sort(key=lambda g: grlex_key(exponent_of(g)))
        exps = [exponent_of(g) for g in gens]
        changed = False
        for i in range(1, len(gens)):
            if grlex_key(exps[i]) == grlex_key(exps[i - 1]):
                lead_i = gens[i].coefficient((0,) * frame.e, exps[i])
                lead_p = gens[i - 1].coefficient((0,) * frame.e, exps[i - 1])
                gens[i] = gens[i] - gens[i - 1].scale(
                    field.div(lead_i, lead_p))
                events.append({"type": "reduce-initial-form",
                               "generator": i + 1, "kind": "exponent-tie"})
                changed = True
                break
            lift = _initial_membership(frame, gens, i, exps)
            if lift:
                for j, q in lift.items():
                    gens[i] = gens[i] - q * gens[j]
                events.append({"type": "reduce-initial-form",
                               "generator": i + 1, "kind": "dependent"})
                changed = True
                break
        if not changed:
            _check_exp_order(gens)
            return gens, events
    raise BudgetExceededError("basis repair did not stabilize",
                              events=tuple(events))


# ---------------------------------------------------------------------------
# the preparation driver
# ---------------------------------------------------------------------------

def _zero_support(v):
    return frozenset(i for i, c in enumerate(v) if c == 0)


def _ray_escape(history, v):
    """Two earlier solved vertices sitting under v on the same coordinate ray."""
    support = _zero_support(v)
    matches = [w for w in history
               if w != v and _zero_support(w) == support
               and all(a <= b for a, b in zip(w, v))]
    return tuple(matches[:2]) if len(matches) >= 2 else None


def _signature(gens):
    return tuple(frozenset(g.terms.items()) for g in gens)


def prepare(system, budget: Budget = None) -> PrepState:
    """Normalize and solve vertices minimal-first until none is removable.

    Returns status "prepared" when every remaining vertex is unremovable
    (the polyhedron is then the characteristic one for this frame), or
    "budget-exhausted" with cycle diagnostics when translations run along
    an infinite ray and dissolution is disabled or fails.
    """
    budget = budget or Budget()
    budget.validate()
    frame, gens = _validate_system(system)
    field = frame.field
    events = []
    shifts = [PolyElement.zero(frame)] * frame.r
    snapshots = [(None, poly_of_system(gens))]

    try:
        gens, repair_events = _repair_basis(frame, gens, budget)
    except BudgetExceededError as exc:
        events.extend(exc.events)
        events.append({"type": "budget-stop", "reason": "repair"})
        return PrepState(frame, tuple(gens), tuple(shifts), tuple(events),
                         "budget-exhausted")
    events.extend(repair_events)
    if repair_events:
        snapshots.append((len(events) - 1, poly_of_system(gens)))

    report = check_rid_eq_dir([in_zero(g) for g in gens])
    events.append({"type": "radical-condition", "status": report.status,
                   "witness": str(report.witness) if report.witness else None})

    dismissed = set()
    solved_history = []
    solve_signatures = {}
    pending_cycle = None
    status = None
    cycle = None

    for _ in range(budget.max_events):
        poly = poly_of_system(gens)
        if poly.is_empty:
            status = "prepared"
            break
        candidates = [v for v in poly.vertices if v not in dismissed]
        if not candidates:
            status = "prepared"
            break
        v = min(candidates, key=point_order_key)

        try:
            new_gens, table, _ = normalize_at_vertex(gens, v,
                                                     budget.norm_steps(gens))
        except BudgetExceededError:
            status = "budget-exhausted"
            events.append({"type": "budget-stop", "reason": "normalize",
                           "vertex": v})
            break
        if tuple(new_gens) != tuple(gens):
            gens = list(new_gens)
            events.append({"type": "normalize", "vertex": v,
                           "multipliers": {k: str(m)
                                           for k, m in table.items()}})
            snapshots.append((len(events) - 1, poly_of_system(gens)))
            if not snapshots[-1][1].is_vertex(v):
                continue

        if not _integral(v):
            dismissed.add(v)
            events.append({"type": "vertex-not-solvable", "vertex": v,
                           "reason": "non-integral"})
            continue

        ray = _ray_escape(solved_history, v)
        if ray is None and pending_cycle is not None:
            ray = pending_cycle
        if ray:
            cycle_points = tuple(ray) + (v,)
            if budget.dissolve:
                try:
                    gens, shifts, info = _dissolve(frame, gens, shifts, v,
                                                   budget)
                    events.append(info)
                    snapshots.append((len(events) - 1,
                                      poly_of_system(gens)))
                    pending_cycle = None
                    solved_history = []
                    continue
                except NotDissolvableError as exc:
                    events.append({"type": "dissolve-failed",
                                   "support": exc.support,
                                   "reason": str(exc)})
            status = "budget-exhausted"
            cycle = cycle_points
            events.append({"type": "budget-stop",
                           "reason": "translation-cycle",
                           "cycle": cycle_points})
            break

        witness = vertex_solvable(gens, v)
        if witness is None:
            dismissed.add(v)
            events.append({"type": "vertex-not-solvable", "vertex": v})
            continue
        gens, shifts = _apply_witness(frame, gens, shifts, witness)
        solved_history.append(v)
        events.append({"type": "solve", "vertex": v,
                       "lambdas": tuple(field.format(x)
                                        for x in witness.lambdas)})
        snapshots.append((len(events) - 1, poly_of_system(gens)))
        sig = _signature(gens)
        solve_signatures[sig] = solve_signatures.get(sig, 0) + 1
        if solve_signatures[sig] >= 2:
            pending_cycle = (v,)
    else:
        status = "budget-exhausted"
        events.append({"type": "budget-stop", "reason": "max-events"})

    final_poly = poly_of_system(gens)
    trace = []
    lambda_value = None
    if not final_poly.is_empty:
        for event_idx, snap in snapshots:
            if snap.is_empty:
                continue
            if not all(snap.contains(p) for p in final_poly.generators):
                continue
            value = lambda_measure(final_poly, snap)
            if not trace or value != trace[-1]:
                trace.append(value)
                if event_idx is not None:
                    events[event_idx]["lambda"] = value
        # distance still to go, measured from the very first polyhedron seen
        lambda_value = trace[0] if trace else None

    return PrepState(frame, tuple(gens), tuple(shifts), tuple(events),
                     status, cycle=cycle, lambda_value=lambda_value,
                     lambda_trace=tuple(trace))
