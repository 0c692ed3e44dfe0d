"""Exact coefficient fields, variable frames, and sparse bigraded polynomials.

Every computation in this package is exact: rationals are
`fractions.Fraction`, prime-field elements are machine integers reduced mod p.
No floating point appears anywhere; the single float in the API is the
`INFINITY` sentinel returned by `order_mod_u` for elements of <u>.

A polynomial lives in a `Frame`, the marked variable split
(u_1 .. u_e; y_1 .. y_r) over a field K, and is stored as a finite map
(A, B) -> coefficient for the monomial u^A y^B.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from types import MappingProxyType

from .errors import DomainError, InvalidInputError

INFINITY = math.inf  # order of elements of <u> (and of 0) modulo <u>


# ---------------------------------------------------------------------------
# coefficient fields
# ---------------------------------------------------------------------------

class RationalField:
    """The field of rational numbers; values are `fractions.Fraction`."""

    characteristic = 0

    def coerce(self, x):
        if isinstance(x, Fraction):
            return x
        if isinstance(x, int):
            return Fraction(x)
        raise InvalidInputError(f"cannot coerce {x!r} into Q")

    def from_int(self, n: int) -> Fraction:
        return Fraction(n)

    @property
    def zero(self):
        return Fraction(0)

    @property
    def one(self):
        return Fraction(1)

    def is_zero(self, a) -> bool:
        return a == 0

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def inv(self, a):
        if a == 0:
            raise DomainError("division by zero in Q")
        return 1 / a

    def div(self, a, b):
        if b == 0:
            raise DomainError("division by zero in Q")
        return a / b

    def kth_roots(self, a, k: int):
        """All k-th roots of a in Q, smallest first (0, 1, or 2 of them)."""
        if k <= 0:
            raise InvalidInputError("root index must be positive")
        if k == 1:
            return [a]
        if a == 0:
            return [Fraction(0)]
        if a < 0:
            if k % 2 == 0:
                return []
            roots = self.kth_roots(-a, k)
            return [-r for r in roots]
        num = _integer_root(a.numerator, k)
        den = _integer_root(a.denominator, k)
        if num is None or den is None:
            return []
        r = Fraction(num, den)
        return [-r, r] if k % 2 == 0 else [r]

    def format(self, a) -> str:
        return str(a)

    def __repr__(self):
        return "QQ"


def _integer_root(n: int, k: int):
    """Exact integer k-th root of n >= 0, or None if n is not a k-th power."""
    if n < 2:
        return n
    # Newton iteration on integers, seeded above the root.
    x = 1 << -(-n.bit_length() // k)
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            break
        x = y
    while x ** k > n:
        x -= 1
    return x if x ** k == n else None


class PrimeField:
    """Integers modulo a prime p; instances are cached so GF(p) is GF(p)."""

    _instances: dict = {}

    def __new__(cls, p):
        inst = cls._instances.get(p)
        if inst is not None:
            return inst
        if not isinstance(p, int) or p < 2 or any(
                p % q == 0 for q in range(2, math.isqrt(p) + 1)):
            raise InvalidInputError(f"{p!r} is not a prime")
        inst = super().__new__(cls)
        inst.p = p
        inst.characteristic = p
        cls._instances[p] = inst
        return inst

    def coerce(self, x):
        if isinstance(x, int):
            return x % self.p
        if isinstance(x, Fraction):
            return self.mul(x.numerator % self.p, self.inv(x.denominator % self.p))
        raise InvalidInputError(f"cannot coerce {x!r} into F_{self.p}")

    def from_int(self, n: int) -> int:
        return n % self.p

    @property
    def zero(self):
        return 0

    @property
    def one(self):
        return 1 % self.p

    def is_zero(self, a) -> bool:
        return a % self.p == 0

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def neg(self, a):
        return (-a) % self.p

    def inv(self, a):
        if a % self.p == 0:
            raise DomainError(f"division by zero in F_{self.p}")
        return pow(a, self.p - 2, self.p)

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def kth_roots(self, a, k: int):
        """All k-th roots of a in F_p by enumeration (p is small)."""
        if k <= 0:
            raise InvalidInputError("root index must be positive")
        a %= self.p
        return [x for x in range(self.p) if pow(x, k, self.p) == a]

    def pth_root(self, a):
        # Frobenius is the identity on the prime field: a^p = a.
        return a % self.p

    def format(self, a) -> str:
        return str(a % self.p)

    def __repr__(self):
        return f"GF({self.p})"


QQ = RationalField()


def GF(p: int) -> PrimeField:
    return PrimeField(p)


def field_from_spec(spec: str):
    """Parse a field name: "Q", "F2", "F3", ... ."""
    if spec == "Q":
        return QQ
    m = re.fullmatch(r"F(\d+)", spec)
    if m:
        return GF(int(m.group(1)))
    raise InvalidInputError(f"unknown field {spec!r}")


def field_spec(field) -> str:
    return "Q" if field.characteristic == 0 else f"F{field.p}"


# ---------------------------------------------------------------------------
# frames and monomial orders
# ---------------------------------------------------------------------------

_IDENT = re.compile(r"[A-Za-z_][A-Za-z_0-9]*\Z")


@dataclass(frozen=True)
class Frame:
    """The marked variable split (u_1 .. u_e; y_1 .. y_r) over a field."""

    u_names: tuple
    y_names: tuple
    field: object

    def __post_init__(self):
        object.__setattr__(self, "u_names", tuple(self.u_names))
        object.__setattr__(self, "y_names", tuple(self.y_names))
        if not self.u_names or not self.y_names:
            raise InvalidInputError("a frame needs at least one u and one y variable")
        names = self.u_names + self.y_names
        for nm in names:
            if not _IDENT.match(nm):
                raise InvalidInputError(f"bad variable name {nm!r}")
        if len(set(names)) != len(names):
            raise InvalidInputError("duplicate variable names in frame")

    @property
    def e(self) -> int:
        return len(self.u_names)

    @property
    def r(self) -> int:
        return len(self.y_names)

    def __repr__(self):
        u = ",".join(self.u_names)
        y = ",".join(self.y_names)
        return f"Frame({u}; {y} / {self.field!r})"


def grlex_key(B):
    """Sort key realizing the graded-lexicographic order on y-exponents."""
    return (sum(B),) + tuple(B)


def grlex_compare(B1, B2) -> int:
    """-1, 0, or 1 according to the order on (|B|, B_1, ..., B_r)."""
    if len(B1) != len(B2):
        raise InvalidInputError("exponent length mismatch")
    k1, k2 = grlex_key(B1), grlex_key(B2)
    return (k1 > k2) - (k1 < k2)


def grlex_min(exponents):
    return min(exponents, key=grlex_key)


# ---------------------------------------------------------------------------
# sparse polynomials
# ---------------------------------------------------------------------------

def _display_key(item):
    (A, B), _ = item
    # ascending total degree; inside a degree, y-rich monomials first
    return (sum(A) + sum(B), -sum(B), tuple(B), tuple(A))


class PolyElement:
    """A finite sum  sum C_{A,B} u^A y^B  with field coefficients.

    Terms are a map (A, B) -> coefficient with no zero coefficients stored;
    instances are immutable by convention, hashable and comparable.
    """

    __slots__ = ("frame", "_terms", "_hash")

    def __init__(self, frame: Frame, terms: dict):
        self.frame = frame
        self._terms = terms
        self._hash = None

    # -- construction ------------------------------------------------------

    @classmethod
    def _make(cls, frame, terms):
        field = frame.field
        return cls(frame, {k: c for k, c in terms.items() if not field.is_zero(c)})

    @classmethod
    def zero(cls, frame):
        return cls(frame, {})

    @classmethod
    def constant(cls, frame, c):
        c = frame.field.coerce(c)
        A = (0,) * frame.e
        B = (0,) * frame.r
        return cls._make(frame, {(A, B): c})

    @classmethod
    def monomial(cls, frame, A, B, c=1):
        A, B = tuple(A), tuple(B)
        if len(A) != frame.e or len(B) != frame.r:
            raise InvalidInputError("exponent length does not match the frame")
        if any(a < 0 for a in A) or any(b < 0 for b in B):
            raise InvalidInputError("negative exponent")
        return cls._make(frame, {(A, B): frame.field.coerce(c)})

    @classmethod
    def variable(cls, frame, name):
        if name in frame.u_names:
            i = frame.u_names.index(name)
            A = tuple(1 if t == i else 0 for t in range(frame.e))
            return cls.monomial(frame, A, (0,) * frame.r)
        if name in frame.y_names:
            j = frame.y_names.index(name)
            B = tuple(1 if t == j else 0 for t in range(frame.r))
            return cls.monomial(frame, (0,) * frame.e, B)
        raise InvalidInputError(f"unknown variable {name!r}")

    # -- inspection ---------------------------------------------------------

    @property
    def terms(self):
        return MappingProxyType(self._terms)

    @property
    def is_zero(self) -> bool:
        return not self._terms

    def coefficient(self, A, B):
        return self._terms.get((tuple(A), tuple(B)), self.frame.field.zero)

    def sorted_terms(self):
        return sorted(self._terms.items(), key=_display_key)

    def total_degree(self) -> int:
        """Maximal |A| + |B| over the terms; -1 for the zero polynomial."""
        return max((sum(A) + sum(B) for (A, B) in self._terms), default=-1)

    # -- ring operations ----------------------------------------------------

    def _check_same_frame(self, other):
        if self.frame != other.frame:
            raise InvalidInputError("polynomials from different frames")

    def __add__(self, other):
        if not isinstance(other, PolyElement):
            return NotImplemented
        self._check_same_frame(other)
        field = self.frame.field
        terms = dict(self._terms)
        for k, c in other._terms.items():
            terms[k] = field.add(terms.get(k, field.zero), c)
        return PolyElement._make(self.frame, terms)

    def __sub__(self, other):
        if not isinstance(other, PolyElement):
            return NotImplemented
        return self + (-other)

    def __neg__(self):
        field = self.frame.field
        return PolyElement(self.frame,
                           {k: field.neg(c) for k, c in self._terms.items()})

    def scale(self, c):
        """Multiply by a field scalar."""
        field = self.frame.field
        c = field.coerce(c)
        if field.is_zero(c):
            return PolyElement.zero(self.frame)
        return PolyElement(self.frame,
                           {k: field.mul(v, c) for k, v in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, PolyElement):
            return NotImplemented
        self._check_same_frame(other)
        field = self.frame.field
        terms: dict = {}
        for (A1, B1), c1 in self._terms.items():
            for (A2, B2), c2 in other._terms.items():
                k = (tuple(a1 + a2 for a1, a2 in zip(A1, A2)),
                     tuple(b1 + b2 for b1, b2 in zip(B1, B2)))
                prod = field.mul(c1, c2)
                if k in terms:
                    terms[k] = field.add(terms[k], prod)
                else:
                    terms[k] = prod
        return PolyElement._make(self.frame, terms)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            raise InvalidInputError("exponent must be a nonnegative integer")
        result = PolyElement.constant(self.frame, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    # -- comparison / display ------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, PolyElement):
            return NotImplemented
        return self.frame == other.frame and self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.frame, frozenset(self._terms.items())))
        return self._hash

    def _monomial_str(self, A, B, upper=False):
        parts = []
        for name, a in zip(self.frame.u_names, A):
            if a:
                name = name.upper() if upper else name
                parts.append(name if a == 1 else f"{name}^{a}")
        for name, b in zip(self.frame.y_names, B):
            if b:
                name = name.upper() if upper else name
                parts.append(name if b == 1 else f"{name}^{b}")
        return "*".join(parts)

    def to_string(self, upper=False) -> str:
        if not self._terms:
            return "0"
        field = self.frame.field
        chunks = []
        for (A, B), c in self.sorted_terms():
            mon = self._monomial_str(A, B, upper=upper)
            coeff = field.format(c)
            if not mon:
                chunks.append(coeff)
            elif coeff == "1":
                chunks.append(mon)
            elif coeff == "-1":
                chunks.append(f"-{mon}")
            else:
                if "/" in coeff:
                    coeff = f"({coeff})"
                chunks.append(f"{coeff}*{mon}")
        out = " + ".join(chunks)
        return out.replace("+ -", "- ")

    def __str__(self):
        return self.to_string()

    def __repr__(self):
        return f"<poly {self}>"


# ---------------------------------------------------------------------------
# orders, exponents, substitutions
# ---------------------------------------------------------------------------

def order_mod_u(g: PolyElement):
    """min{|B| : C_{0,B} != 0}, or INFINITY when g lies in <u> (or g = 0)."""
    best = None
    for (A, B) in g._terms:
        if any(A):
            continue
        n = sum(B)
        if best is None or n < best:
            best = n
    return INFINITY if best is None else best


def exponent_of(g: PolyElement):
    """The grlex-minimal y-exponent among the terms with A = 0."""
    candidates = [B for (A, B) in g._terms if not any(A)]
    if not candidates:
        raise DomainError("element lies in <u>; it has no exponent")
    return grlex_min(candidates)


def substitute_y(g: PolyElement, j: int, h: PolyElement) -> PolyElement:
    """Replace y_j by y_j + h in g (h in the same frame), exactly.

    This is the binomial-theorem expansion; it is valid even when h itself
    involves y_j (the result is then g evaluated at the ring element y_j + h).
    """
    frame = g.frame
    if not 0 <= j < frame.r:
        raise InvalidInputError("y-variable index out of range")
    if h.frame != frame:
        raise InvalidInputError("substitution polynomial from a different frame")
    if h.is_zero:
        return g
    field = frame.field
    h_pows = {0: PolyElement.constant(frame, 1)}

    def h_power(k):
        if k not in h_pows:
            h_pows[k] = h_power(k - 1) * h
        return h_pows[k]

    result = PolyElement.zero(frame)
    for (A, B), c in g._terms.items():
        m = B[j]
        if m == 0:
            result = result + PolyElement._make(frame, {(A, B): c})
            continue
        for k in range(m + 1):
            binom = field.from_int(math.comb(m, k))
            if field.is_zero(binom):
                continue
            Bk = tuple(b if t != j else m - k for t, b in enumerate(B))
            base = PolyElement._make(frame, {(A, Bk): field.mul(c, binom)})
            result = result + base * h_power(k)
    return result


def substitute_all_y(g: PolyElement, replacements) -> PolyElement:
    """Evaluate g at y_j = replacements[j] (arbitrary polynomials), exactly."""
    frame = g.frame
    replacements = list(replacements)
    if len(replacements) != frame.r:
        raise InvalidInputError("need one replacement per y-variable")
    for h in replacements:
        if h.frame != frame:
            raise InvalidInputError("replacement from a different frame")
    pow_cache = [{0: PolyElement.constant(frame, 1)} for _ in range(frame.r)]

    def var_power(j, k):
        cache = pow_cache[j]
        if k not in cache:
            cache[k] = var_power(j, k - 1) * replacements[j]
        return cache[k]

    result = PolyElement.zero(frame)
    zero_B = (0,) * frame.r
    for (A, B), c in g._terms.items():
        term = PolyElement._make(frame, {(A, zero_B): c})
        for j, b in enumerate(B):
            if b:
                term = term * var_power(j, b)
        result = result + term
    return result


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\S))")


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            break
        num, ident, sym = m.groups()
        if num is not None:
            tokens.append(("int", int(num)))
        elif ident is not None:
            tokens.append(("ident", ident))
        else:
            if sym not in "+-*/^()":
                raise InvalidInputError(f"unexpected character {sym!r} at column {m.start(3) + 1}")
            tokens.append((sym, sym))
        pos = m.end()
    tokens.append(("end", None))
    return tokens


def parse_poly(frame: Frame, text: str) -> PolyElement:
    """Parse an expression with + - * / ^ ( ), integer literals, and the
    frame's variable names.  Division is only by nonzero constants."""
    tokens = _tokenize(text)
    pos = 0

    def peek():
        return tokens[pos][0]

    def take(kind=None):
        nonlocal pos
        tok = tokens[pos]
        if kind is not None and tok[0] != kind:
            raise InvalidInputError(f"expected {kind!r}, found {tok[1]!r} in {text!r}")
        pos += 1
        return tok

    def parse_expr():
        node = parse_term()
        while peek() in ("+", "-"):
            op = take()[0]
            rhs = parse_term()
            node = node + rhs if op == "+" else node - rhs
        return node

    def parse_term():
        node = parse_factor()
        while peek() in ("*", "/"):
            op = take()[0]
            rhs = parse_factor()
            if op == "*":
                node = node * rhs
            else:
                items = list(rhs._terms.items())
                if len(items) != 1 or any(items[0][0][0]) or any(items[0][0][1]):
                    raise InvalidInputError("division only by nonzero constants")
                node = node.scale(frame.field.inv(items[0][1]))
        return node

    def parse_factor():
        if peek() == "-":
            take()
            return -parse_factor()
        node = parse_atom()
        while peek() == "^":
            take()
            exp = take("int")[1]
            node = node ** exp
        return node

    def parse_atom():
        kind, value = tokens[pos]
        if kind == "int":
            take()
            return PolyElement.constant(frame, value)
        if kind == "ident":
            take()
            return PolyElement.variable(frame, value)
        if kind == "(":
            take()
            node = parse_expr()
            take(")")
            return node
        raise InvalidInputError(f"unexpected token {value!r} in {text!r}")

    node = parse_expr()
    if peek() != "end":
        raise InvalidInputError(f"trailing input in {text!r}")
    return node
