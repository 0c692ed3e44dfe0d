"""Independent oracles and corpus builders for the test suite.

The oracles deliberately avoid the library's own geometry: membership in
conv(P) + orthant is decided by an exact phase-I simplex over Fractions,
and projected points are re-derived directly from term dictionaries.
"""

from __future__ import annotations

import random
from fractions import Fraction

from charpoly import Frame, GF, PolyElement, QQ, grlex_key


# ---------------------------------------------------------------------------
# exact LP membership oracle
# ---------------------------------------------------------------------------

def in_hull_plus_orthant(points, q):
    """Exact test for q in conv(points) + R^e_{>=0} (phase-I simplex).

    Feasibility of  sum(lam_i p_i) + s = q,  sum(lam_i) = 1,  lam, s >= 0,
    solved with Bland's rule so it cannot cycle.
    """
    points = [tuple(Fraction(c) for c in p) for p in points]
    q = tuple(Fraction(c) for c in q)
    if not points:
        return False
    e = len(q)
    k = len(points)
    n = k + e                      # lambda columns then slack columns
    rows = e + 1
    tableau = []
    for i in range(e):
        row = [points[j][i] for j in range(k)]
        row += [Fraction(int(t == i)) for t in range(e)]
        row += [Fraction(int(t == i)) for t in range(rows)]
        row.append(q[i])
        tableau.append(row)
    last = [Fraction(1)] * k + [Fraction(0)] * e
    last += [Fraction(int(t == e)) for t in range(rows)]
    last.append(Fraction(1))
    tableau.append(last)
    basis = [n + i for i in range(rows)]
    ncols = n + rows

    while True:
        costs = []
        for j in range(ncols):
            zj = sum(tableau[i][j] for i in range(rows) if basis[i] >= n)
            cj = Fraction(int(j >= n))
            costs.append(cj - zj)
        enter = next((j for j in range(ncols) if costs[j] < 0), None)
        if enter is None:
            break
        ratios = [(tableau[i][-1] / tableau[i][enter], basis[i], i)
                  for i in range(rows) if tableau[i][enter] > 0]
        if not ratios:
            break
        _, _, leave = min(ratios)
        pivot = tableau[leave][enter]
        tableau[leave] = [x / pivot for x in tableau[leave]]
        for i in range(rows):
            if i != leave and tableau[i][enter] != 0:
                f = tableau[i][enter]
                tableau[i] = [a - f * b
                              for a, b in zip(tableau[i], tableau[leave])]
        basis[leave] = enter
    residue = sum(tableau[i][-1] for i in range(rows) if basis[i] >= n)
    return residue == 0


def same_fsubset(generators_a, generators_b):
    """Double containment of conv(A)+orthant and conv(B)+orthant."""
    if not generators_a or not generators_b:
        return not generators_a and not generators_b
    return (all(in_hull_plus_orthant(generators_b, p) for p in generators_a)
            and all(in_hull_plus_orthant(generators_a, p)
                    for p in generators_b))


# ---------------------------------------------------------------------------
# brute-force projections
# ---------------------------------------------------------------------------

def brute_order(g):
    degs = [sum(B) for (A, B) in g.terms if not any(A)]
    return min(degs) if degs else None


def brute_projection(g, level=None):
    """All points A/(level - |B|) with |B| < level, straight off the terms."""
    n = brute_order(g) if level is None else Fraction(level)
    assert n is not None
    pts = []
    for (A, B) in g.terms:
        if sum(B) < n:
            d = n - sum(B)
            pts.append(tuple(Fraction(a) / d for a in A))
    return pts


def brute_pair_projection(system, b):
    pts = []
    for g in system:
        pts.extend(brute_projection(g, level=b))
    return pts


# ---------------------------------------------------------------------------
# naive polynomial multiplication oracle
# ---------------------------------------------------------------------------

def naive_product_terms(g, h):
    field = g.frame.field
    out = {}
    for (A1, B1), c1 in g.terms.items():
        for (A2, B2), c2 in h.terms.items():
            key = (tuple(a + b for a, b in zip(A1, A2)),
                   tuple(a + b for a, b in zip(B1, B2)))
            out[key] = field.add(out.get(key, field.zero),
                                 field.mul(c1, c2))
    return {k: c for k, c in out.items() if not field.is_zero(c)}


# ---------------------------------------------------------------------------
# random corpora
# ---------------------------------------------------------------------------

FIELDS = (QQ, GF(2), GF(3))


def random_frame(rng: random.Random, field=None):
    e = rng.randint(1, 3)
    r = rng.randint(1, 3)
    field = field if field is not None else rng.choice(FIELDS)
    u = tuple(f"u{i+1}" for i in range(e))
    y = tuple(f"y{j+1}" for j in range(r))
    return Frame(u, y, field)


def _random_coeff(rng, field):
    if field.characteristic == 0:
        return Fraction(rng.randint(1, 5), rng.randint(1, 3))
    return rng.randint(1, field.p - 1)


def _random_exponent(rng, r, degree):
    B = [0] * r
    for _ in range(degree):
        B[rng.randrange(r)] += 1
    return tuple(B)


def random_standard_system(rng: random.Random, frame: Frame,
                           max_gens=4, max_degree=8):
    """A system meeting the preparation preconditions.

    Exponents strictly increase in grlex order and avoid earlier
    staircases; all non-initial terms carry a u-factor so the exponents
    are stable under normalization.
    """
    r, e = frame.r, frame.e
    field = frame.field
    # with a single y-variable any second exponent lands in the staircase
    # of the first, so only one generator is admissible; for small r large
    # antichains are rare, so fall back to fewer generators when sampling
    # stalls
    m = 1 if r == 1 else rng.randint(1, max_gens)
    exps = None
    for m_try in range(m, 0, -1):
        for _ in range(200):
            degrees = sorted(rng.randint(1, 4) for _ in range(m_try))
            attempt = []
            ok = True
            for n in degrees:
                for _ in range(30):
                    B = _random_exponent(rng, r, n)
                    key_ok = all(grlex_key(B) > grlex_key(E)
                                 for E in attempt)
                    stair_ok = not any(all(b >= x for b, x in zip(B, E))
                                       for E in attempt)
                    if key_ok and stair_ok and B not in attempt:
                        attempt.append(B)
                        break
                else:
                    ok = False
                    break
            if ok:
                exps = attempt
                break
        if exps is not None:
            break
    assert exps is not None  # m_try = 1 always succeeds

    gens = []
    for B in exps:
        n = sum(B)
        g = PolyElement.monomial(frame, (0,) * e, B, _random_coeff(rng, field))
        for _ in range(rng.randint(0, 3)):
            da = rng.randint(1, max(1, max_degree - n))
            A = _random_exponent(rng, e, da)
            db = rng.randint(0, min(n + 1, max_degree - da))
            Bt = _random_exponent(rng, r, db)
            g = g + PolyElement.monomial(frame, A, Bt,
                                         _random_coeff(rng, field))
        gens.append(g)
    return gens


def random_points(rng: random.Random, e, count=None):
    count = count if count is not None else rng.randint(1, 6)
    pts = []
    for _ in range(count):
        pts.append(tuple(Fraction(rng.randint(0, 12), rng.randint(1, 4))
                         for _ in range(e)))
    return pts


def random_homogeneous_forms(rng: random.Random, frame: Frame,
                             max_forms=3, max_degree=4):
    """Random homogeneous pure-Y forms (nonzero, no constant term)."""
    out = []
    for _ in range(rng.randint(1, max_forms)):
        d = rng.randint(1, max_degree)
        terms = {}
        for _ in range(rng.randint(1, 4)):
            B = _random_exponent(rng, frame.r, d)
            terms[B] = _random_coeff(rng, frame.field)
        g = PolyElement.zero(frame)
        for B, c in terms.items():
            g = g + PolyElement.monomial(frame, (0,) * frame.e, B, c)
        if not g.is_zero:
            out.append(g)
    if not out:
        out.append(PolyElement.variable(frame, frame.y_names[0]))
    return out


# ---------------------------------------------------------------------------
# normalization / vertex-solving property corpus
# ---------------------------------------------------------------------------

def apply_witness_raw(system, witness):
    """Apply z_j = y_j + lambda_j u^v directly, bypassing the prep driver."""
    from charpoly import substitute_y

    frame = system[0].frame
    field = frame.field
    out = list(system)
    for j, lam in enumerate(witness.lambdas):
        if field.is_zero(lam):
            continue
        shift = PolyElement.monomial(frame, witness.vertex, (0,) * frame.r,
                                     field.neg(lam))
        out = [substitute_y(g, j, shift) for g in out]
    return out


def nlz_solvert_violations(rng: random.Random, count: int):
    """Check the normalize-at-vertex and solvable-vertex conclusions.

    For each random admissible system: normalizing at the minimal vertex
    must (a) leave no offending terms at it, (b) shrink the polyhedron,
    (c) keep every other extremal vertex.  Every solvable vertex found
    afterwards must vanish under its translation with the same two
    preservation properties.  Returns a list of violation descriptions.
    """
    from charpoly import (is_normalized_at, normalize_at_vertex,
                          point_order_key, poly_of_system, vertex_solvable)

    violations = []
    for idx in range(count):
        frame = random_frame(rng)
        system = random_standard_system(rng, frame)
        before = poly_of_system(system)
        if before.is_empty:
            continue
        v = min(before.extreme_vertices, key=point_order_key)
        normalized, _, _ = normalize_at_vertex(system, v)
        ok, witnesses = is_normalized_at(normalized, v)
        if not ok:
            violations.append((idx, "still-not-normalized", witnesses))
            continue
        after = poly_of_system(normalized)
        if not all(before.contains(p) for p in after.generators):
            violations.append((idx, "normalize-enlarged-polyhedron"))
        for x in before.extreme_vertices:
            if x != v and not after.is_empty \
                    and x not in after.extreme_vertices:
                violations.append((idx, "normalize-lost-vertex", x))
        # solvable vertices of the normalized system
        for x in after.extreme_vertices:
            if any(c.denominator != 1 for c in x):
                continue
            renorm, _, _ = normalize_at_vertex(normalized, x)
            w = vertex_solvable(renorm, x)
            if w is None:
                continue
            translated = apply_witness_raw(renorm, w)
            solved = poly_of_system(translated)
            base = poly_of_system(renorm)
            if solved.contains(x):
                violations.append((idx, "solve-kept-vertex", x))
            if not all(base.contains(p) for p in solved.generators):
                violations.append((idx, "solve-enlarged-polyhedron", x))
            for y in base.extreme_vertices:
                if y != x and not solved.is_empty \
                        and y not in solved.extreme_vertices:
                    violations.append((idx, "solve-lost-vertex", y))
    return violations
