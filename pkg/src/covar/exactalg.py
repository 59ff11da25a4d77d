"""Exact arithmetic foundation: sparse multivariate polynomials, rational
functions, and fraction-free matrix algebra.

A polynomial is a finite map from exponent vectors to nonzero coefficients,
over a fixed ordered tuple of named variables.  Coefficients are exact:
``fractions.Fraction`` by default, or elements of a prime field ``GF(p)``
when a :class:`PrimeField` is attached.  Zero coefficients are never stored,
so dict equality is semantic equality.

The monomial order is graded lexicographic with the declared variable order
(total degree first, then the exponent tuple compared left to right).  The
canonical text form lists terms in ascending order under it, e.g.
``x1*x2^2 - x1^2*x2``, with coefficients printed as ``p/q`` integers.
Parsing accepts exactly that grammar.

Matrices over polynomials or rational functions share one class; the
determinant and rank routines use fraction-free (Bareiss) elimination, whose
intermediate divisions are exact over any integral domain.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence, Union


class ExactAlgError(Exception):
    """Base class for errors raised by the exact-arithmetic layer."""


class DimensionError(ExactAlgError):
    """Matrix or vector dimensions do not match the operation."""


class ExactDivisionError(ExactAlgError):
    """An exact polynomial division left a remainder."""


class ParseError(ExactAlgError):
    """Input text does not conform to the canonical grammar."""

    def __init__(self, message: str, position: int | None = None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


# ---------------------------------------------------------------------------
# coefficient fields
# ---------------------------------------------------------------------------


class FpElem:
    """Element of a prime field; supports the same operator set as Fraction."""

    __slots__ = ("field", "val")

    def __init__(self, field: "PrimeField", val: int):
        self.field = field
        self.val = val % field.p

    def _lift(self, other):
        if isinstance(other, FpElem):
            if other.field.p != self.field.p:
                raise ExactAlgError("mixed prime fields")
            return other
        if isinstance(other, int):
            return FpElem(self.field, other)
        if isinstance(other, Fraction):
            return self.field.from_fraction(other)
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        return FpElem(self.field, self.val + other.val)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        return FpElem(self.field, self.val - other.val)

    def __rsub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        return FpElem(self.field, other.val - self.val)

    def __mul__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        return FpElem(self.field, self.val * other.val)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        if other.val == 0:
            raise ZeroDivisionError("division by zero in prime field")
        return FpElem(self.field, self.val * pow(other.val, self.field.p - 2, self.field.p))

    def __rtruediv__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        return other / self

    def __neg__(self):
        return FpElem(self.field, -self.val)

    def __abs__(self):
        return self

    def __eq__(self, other):
        if isinstance(other, FpElem):
            return self.field.p == other.field.p and self.val == other.val
        if isinstance(other, (int, Fraction)):
            lifted = self._lift(other)
            return lifted is not NotImplemented and self.val == lifted.val
        return NotImplemented

    def __hash__(self):
        return hash((self.field.p, self.val))

    def __bool__(self):
        return self.val != 0

    def __str__(self):
        return str(self.val)

    def __repr__(self):
        return f"FpElem({self.val} mod {self.field.p})"


class PrimeField:
    """GF(p) for a prime p; calling the field lifts an int into it."""

    __slots__ = ("p",)

    def __init__(self, p: int):
        if p < 2 or any(p % q == 0 for q in range(2, int(p**0.5) + 1)):
            raise ExactAlgError(f"{p} is not prime")
        self.p = p

    def __call__(self, n: int) -> FpElem:
        return FpElem(self, n)

    @property
    def zero(self) -> FpElem:
        return FpElem(self, 0)

    @property
    def one(self) -> FpElem:
        return FpElem(self, 1)

    def from_fraction(self, q: Fraction) -> FpElem:
        if q.denominator % self.p == 0:
            raise ZeroDivisionError(f"denominator {q.denominator} vanishes mod {self.p}")
        return FpElem(self, q.numerator) / FpElem(self, q.denominator)

    def __eq__(self, other):
        return isinstance(other, PrimeField) and self.p == other.p

    def __hash__(self):
        return hash(("PrimeField", self.p))

    def __repr__(self):
        return f"PrimeField({self.p})"


Coeff = Union[Fraction, FpElem]


def lift_coeff(value, field: PrimeField | None) -> Coeff:
    """Lift an int, Fraction, string, or field element into the coefficient field."""
    if field is None:
        if isinstance(value, Fraction):
            return value
        if isinstance(value, int):
            return Fraction(value)
        if isinstance(value, str):
            return Fraction(value)
        raise ExactAlgError(f"cannot use {value!r} as a rational coefficient")
    if isinstance(value, FpElem):
        if value.field.p != field.p:
            raise ExactAlgError("mixed prime fields")
        return value
    if isinstance(value, int):
        return field(value)
    if isinstance(value, Fraction):
        return field.from_fraction(value)
    if isinstance(value, str):
        return field.from_fraction(Fraction(value))
    raise ExactAlgError(f"cannot use {value!r} as a GF({field.p}) coefficient")


def field_one(field: PrimeField | None) -> Coeff:
    return Fraction(1) if field is None else field.one


def field_zero(field: PrimeField | None) -> Coeff:
    return Fraction(0) if field is None else field.zero


# ---------------------------------------------------------------------------
# polynomials
# ---------------------------------------------------------------------------


def _grlex_key(exps: tuple[int, ...]) -> tuple:
    return (sum(exps), exps)


class Poly:
    """Sparse multivariate polynomial over an exact coefficient field.

    ``vars`` is the ordered tuple of variable names; ``terms`` maps exponent
    tuples (one entry per variable) to nonzero coefficients.  Instances are
    treated as immutable: every operation returns a new polynomial, so shared
    values are safe under concurrent use.

    Binary operations require both operands to live in the same ring (same
    variable tuple and coefficient field); use :meth:`embed` to move a
    polynomial into a larger ring first.
    """

    __slots__ = ("vars", "terms", "field")

    def __init__(self, vars: Sequence[str], terms: Mapping[tuple[int, ...], Coeff] | None = None,
                 field: PrimeField | None = None):
        self.vars = tuple(vars)
        self.field = field
        cleaned: dict[tuple[int, ...], Coeff] = {}
        if terms:
            nv = len(self.vars)
            for exps, coeff in terms.items():
                if len(exps) != nv:
                    raise DimensionError(
                        f"exponent vector {exps} has length {len(exps)}, expected {nv}")
                if coeff:
                    cleaned[tuple(exps)] = coeff
        self.terms = cleaned

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, vars: Sequence[str], field: PrimeField | None = None) -> "Poly":
        return cls(vars, {}, field)

    @classmethod
    def const(cls, value, vars: Sequence[str], field: PrimeField | None = None) -> "Poly":
        c = lift_coeff(value, field)
        if not c:
            return cls(vars, {}, field)
        return cls(vars, {(0,) * len(vars): c}, field)

    @classmethod
    def one(cls, vars: Sequence[str], field: PrimeField | None = None) -> "Poly":
        return cls.const(1, vars, field)

    @classmethod
    def var(cls, name: str, vars: Sequence[str], field: PrimeField | None = None) -> "Poly":
        vars = tuple(vars)
        try:
            idx = vars.index(name)
        except ValueError:
            raise ParseError(f"undeclared variable {name!r}") from None
        exps = [0] * len(vars)
        exps[idx] = 1
        return cls(vars, {tuple(exps): field_one(field)}, field)

    @classmethod
    def gens(cls, vars: Sequence[str], field: PrimeField | None = None) -> list["Poly"]:
        return [cls.var(v, vars, field) for v in vars]

    @classmethod
    def parse(cls, text: str, vars: Sequence[str], field: PrimeField | None = None) -> "Poly":
        return _parse_poly(text, tuple(vars), field)

    # -- queries -----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_value(self) -> Coeff:
        if self.is_zero():
            return field_zero(self.field)
        if not self.is_constant():
            raise ExactAlgError("polynomial is not constant")
        return next(iter(self.terms.values()))

    def total_degree(self) -> int:
        """Total degree; the zero polynomial reports -1."""
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def degree_in(self, name: str) -> int:
        idx = self.vars.index(name)
        if not self.terms:
            return -1
        return max(e[idx] for e in self.terms)

    def support_vars(self) -> set[str]:
        used: set[str] = set()
        for exps in self.terms:
            for name, e in zip(self.vars, exps):
                if e:
                    used.add(name)
        return used

    def leading(self) -> tuple[tuple[int, ...], Coeff]:
        """Leading (exponent, coefficient) under graded lex; error on zero."""
        if not self.terms:
            raise ExactAlgError("zero polynomial has no leading term")
        key = max(self.terms, key=_grlex_key)
        return key, self.terms[key]

    def lc(self) -> Coeff:
        return self.leading()[1]

    def sorted_terms(self) -> list[tuple[tuple[int, ...], Coeff]]:
        """Terms in ascending graded-lex order (the canonical text order)."""
        return sorted(self.terms.items(), key=lambda kv: _grlex_key(kv[0]))

    # -- ring plumbing -----------------------------------------------------

    def _check_ring(self, other: "Poly"):
        if self.vars != other.vars:
            raise DimensionError(
                f"variable mismatch: {self.vars} vs {other.vars}")
        if self.field != other.field:
            raise ExactAlgError("coefficient field mismatch")

    def _lift(self, other):
        if isinstance(other, Poly):
            return other
        if isinstance(other, (int, Fraction, FpElem)):
            return Poly.const(other, self.vars, self.field)
        return None

    def ring_one(self) -> "Poly":
        return Poly.one(self.vars, self.field)

    def ring_zero(self) -> "Poly":
        return Poly.zero(self.vars, self.field)

    def embed(self, new_vars: Sequence[str]) -> "Poly":
        """Reindex into a larger ring; own variables must all be present."""
        new_vars = tuple(new_vars)
        if new_vars == self.vars:
            return self
        try:
            pos = [new_vars.index(v) for v in self.vars]
        except ValueError as exc:
            raise DimensionError(f"target ring is missing a variable: {exc}") from None
        n = len(new_vars)
        terms: dict[tuple[int, ...], Coeff] = {}
        for exps, coeff in self.terms.items():
            out = [0] * n
            for p, e in zip(pos, exps):
                out[p] = e
            terms[tuple(out)] = coeff
        return Poly(new_vars, terms, self.field)

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        self._check_ring(other)
        out = dict(self.terms)
        for exps, coeff in other.terms.items():
            acc = out.get(exps)
            val = coeff if acc is None else acc + coeff
            if val:
                out[exps] = val
            elif acc is not None:
                del out[exps]
        p = Poly.__new__(Poly)
        p.vars, p.terms, p.field = self.vars, out, self.field
        return p

    __radd__ = __add__

    def __neg__(self):
        p = Poly.__new__(Poly)
        p.vars, p.field = self.vars, self.field
        p.terms = {e: -c for e, c in self.terms.items()}
        return p

    def __sub__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, RatFn):
            return NotImplemented
        other = self._lift(other)
        if other is None:
            return NotImplemented
        self._check_ring(other)
        if not self.terms or not other.terms:
            return Poly.zero(self.vars, self.field)
        out: dict[tuple[int, ...], Coeff] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                key = tuple(a + b for a, b in zip(e1, e2))
                acc = out.get(key)
                val = c1 * c2 if acc is None else acc + c1 * c2
                if val:
                    out[key] = val
                elif acc is not None:
                    del out[key]
        p = Poly.__new__(Poly)
        p.vars, p.terms, p.field = self.vars, out, self.field
        return p

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ExactAlgError("polynomial powers must be nonnegative integers")
        result = Poly.one(self.vars, self.field)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def __truediv__(self, other):
        """Exact division; raises :class:`ExactDivisionError` on a remainder."""
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return self.exact_div(other)

    def exact_div(self, divisor: "Poly") -> "Poly":
        divisor = self._lift(divisor)
        self._check_ring(divisor)
        if divisor.is_zero():
            raise ZeroDivisionError("exact division by the zero polynomial")
        if self.is_zero():
            return self
        if divisor.is_constant():
            c = divisor.constant_value()
            return Poly(self.vars, {e: v / c for e, v in self.terms.items()}, self.field)
        rem = dict(self.terms)
        quot: dict[tuple[int, ...], Coeff] = {}
        dk, dc = divisor.leading()
        while rem:
            rk = max(rem, key=_grlex_key)
            qk = tuple(a - b for a, b in zip(rk, dk))
            if any(e < 0 for e in qk):
                raise ExactDivisionError("division leaves a remainder")
            qc = rem[rk] / dc
            quot[qk] = qc
            for e2, c2 in divisor.terms.items():
                key = tuple(a + b for a, b in zip(qk, e2))
                acc = rem.get(key, None)
                val = -qc * c2 if acc is None else acc - qc * c2
                if val:
                    rem[key] = val
                elif acc is not None:
                    del rem[key]
        return Poly(self.vars, quot, self.field)

    def divides(self, other: "Poly") -> bool:
        try:
            other.exact_div(self)
            return True
        except ExactDivisionError:
            return False

    def monic(self) -> "Poly":
        if self.is_zero():
            return self
        c = self.lc()
        if c == field_one(self.field):
            return self
        return Poly(self.vars, {e: v / c for e, v in self.terms.items()}, self.field)

    # -- substitution and evaluation ----------------------------------------

    def subs(self, images: Mapping[str, "Poly | RatFn"], out_vars: Sequence[str] | None = None):
        """Substitute variables by polynomials or rational functions.

        Unmapped variables map to themselves and must exist in the output
        ring; variables that never occur are ignored, so a polynomial can be
        moved into a smaller ring as long as its support fits.  Returns a
        Poly when every image is a Poly, else a RatFn.
        """
        if out_vars is None:
            sample = next(iter(images.values()), None)
            out_vars = sample.vars if sample is not None else self.vars
        out_vars = tuple(out_vars)
        support = self.support_vars()
        table: dict[str, Poly | RatFn] = {}
        rational = False
        for name in support:
            img = images.get(name)
            if img is None:
                img = Poly.var(name, out_vars, self.field)
            elif img.vars != out_vars:
                img = img.embed(out_vars)
            if isinstance(img, RatFn):
                rational = True
            table[name] = img
        if rational:
            table = {k: (v if isinstance(v, RatFn) else RatFn(v, reduce=False))
                     for k, v in table.items()}
            zero = RatFn(Poly.zero(out_vars, self.field))
            one = RatFn(Poly.one(out_vars, self.field))
        else:
            zero = Poly.zero(out_vars, self.field)
            one = Poly.one(out_vars, self.field)
        powers: dict[str, dict[int, object]] = {name: {} for name in table}
        total = zero
        for exps, coeff in self.terms.items():
            term = one * coeff
            for name, e in zip(self.vars, exps):
                if not e:
                    continue
                cache = powers[name]
                if e not in cache:
                    cache[e] = table[name] ** e
                term = term * cache[e]
            total = total + term
        return total

    def eval(self, point: Mapping[str, object] | Sequence[object]) -> Coeff:
        """Exact evaluation at a point; the point must cover all variables."""
        if isinstance(point, Mapping):
            vals = [lift_coeff(point[v], self.field) for v in self.vars]
        else:
            vals = [lift_coeff(v, self.field) for v in point]
            if len(vals) != len(self.vars):
                raise DimensionError("point length does not match variable count")
        total = field_zero(self.field)
        for exps, coeff in self.terms.items():
            term = coeff
            for v, e in zip(vals, exps):
                if e:
                    term = term * v**e
            total = total + term
        return total

    # -- comparison and text -------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, Poly):
            return (self.vars == other.vars and self.field == other.field
                    and self.terms == other.terms)
        if isinstance(other, (int, Fraction, FpElem)):
            lifted = self._lift(other)
            return lifted is not None and self.terms == lifted.terms
        if isinstance(other, RatFn):
            return other.__eq__(self)
        return NotImplemented

    __hash__ = None  # mutable dict inside; polynomials are not hashable

    def __str__(self):
        if not self.terms:
            return "0"
        pieces: list[str] = []
        for exps, coeff in self.sorted_terms():
            factors = []
            for name, e in zip(self.vars, exps):
                if e == 1:
                    factors.append(name)
                elif e > 1:
                    factors.append(f"{name}^{e}")
            c_str = str(coeff)
            negative = c_str.startswith("-")
            if negative:
                c_str = c_str[1:]
            if not factors:
                body = c_str
            elif c_str == "1":
                body = "*".join(factors)
            else:
                body = c_str + "*" + "*".join(factors)
            if not pieces:
                pieces.append("-" + body if negative else body)
            else:
                pieces.append(("- " if negative else "+ ") + body)
        return " ".join(pieces)

    def __repr__(self):
        return f"Poly({str(self)!r})"


# ---------------------------------------------------------------------------
# multivariate gcd: content and primitive part with a primitive remainder
# sequence in the first variable that actually occurs
# ---------------------------------------------------------------------------


def _coeffs_in_var(p: Poly, idx: int) -> dict[int, Poly]:
    """View p as univariate in variable idx; coefficients keep the full ring."""
    buckets: dict[int, dict[tuple[int, ...], Coeff]] = {}
    for exps, coeff in p.terms.items():
        d = exps[idx]
        rest = exps[:idx] + (0,) + exps[idx + 1:]
        buckets.setdefault(d, {})[rest] = coeff
    return {d: Poly(p.vars, t, p.field) for d, t in buckets.items()}


def _content(p: Poly, idx: int) -> Poly:
    coeffs = list(_coeffs_in_var(p, idx).values())
    g = coeffs[0]
    for c in coeffs[1:]:
        g = poly_gcd(g, c)
        if g.is_constant():
            break
    return g.monic()


def _pseudo_rem(a: Poly, b: Poly, idx: int) -> Poly:
    """Pseudo-remainder of a by b as univariate polynomials in variable idx."""
    b_coeffs = _coeffs_in_var(b, idx)
    db = max(b_coeffs)
    lb = b_coeffs[db]
    x = Poly.var(a.vars[idx], a.vars, a.field)
    while not a.is_zero():
        a_coeffs = _coeffs_in_var(a, idx)
        da = max(a_coeffs)
        if da < db:
            break
        la = a_coeffs[da]
        a = lb * a - la * x ** (da - db) * b
    return a


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """Monic gcd via content/primitive-part recursion and a primitive PRS."""
    if a.vars != b.vars or a.field != b.field:
        raise DimensionError("gcd operands live in different rings")
    if a.is_zero():
        return b.monic()
    if b.is_zero():
        return a.monic()
    if a.is_constant() or b.is_constant():
        return Poly.one(a.vars, a.field)
    idx = None
    for i in range(len(a.vars)):
        if any(e[i] for e in a.terms) or any(e[i] for e in b.terms):
            idx = i
            break
    if idx is None:
        return Poly.one(a.vars, a.field)
    da = max(e[idx] for e in a.terms) if a.terms else 0
    db = max(e[idx] for e in b.terms) if b.terms else 0
    if da == 0:
        return poly_gcd(a, _content(b, idx))
    if db == 0:
        return poly_gcd(_content(a, idx), b)
    ca, cb = _content(a, idx), _content(b, idx)
    g = poly_gcd(ca, cb)
    pa, pb = a.exact_div(ca), b.exact_div(cb)
    while not pb.is_zero():
        r = _pseudo_rem(pa, pb, idx)
        pa = pb
        if r.is_zero():
            pb = r
        else:
            pb = r.exact_div(_content(r, idx))
    pa = pa.exact_div(_content(pa, idx))
    return (g * pa).monic()


def poly_lcm(a: Poly, b: Poly) -> Poly:
    if a.is_zero() or b.is_zero():
        return Poly.zero(a.vars, a.field)
    return (a * b).exact_div(poly_gcd(a, b)).monic()


# ---------------------------------------------------------------------------
# rational functions
# ---------------------------------------------------------------------------


class RatFn:
    """Quotient of two polynomials in the same ring.

    The default constructor canonicalizes: the gcd of numerator and
    denominator is removed and the denominator is scaled monic under the
    graded-lex order, so equal fractions have equal parts.  ``reduce=False``
    skips the gcd step (useful for adjugate/determinant pairs kept in their
    shared-denominator shape); equality always goes through cross
    multiplication, so unreduced instances compare correctly.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: Poly | None = None, *, reduce: bool = True):
        if den is None:
            den = Poly.one(num.vars, num.field)
        if not isinstance(num, Poly) or not isinstance(den, Poly):
            raise ExactAlgError("RatFn parts must be polynomials")
        num._check_ring(den)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if num.is_zero():
            den = Poly.one(num.vars, num.field)
        elif reduce:
            g = poly_gcd(num, den)
            if not (g.is_constant()):
                num = num.exact_div(g)
                den = den.exact_div(g)
            c = den.lc()
            if c != field_one(num.field):
                num = num * (field_one(num.field) / c)
                den = den * (field_one(num.field) / c)
        self.num = num
        self.den = den

    # -- constructors --------------------------------------------------------

    @classmethod
    def zero(cls, vars: Sequence[str], field: PrimeField | None = None) -> "RatFn":
        return cls(Poly.zero(vars, field))

    @classmethod
    def one(cls, vars: Sequence[str], field: PrimeField | None = None) -> "RatFn":
        return cls(Poly.one(vars, field))

    @classmethod
    def parse(cls, text: str, vars: Sequence[str], field: PrimeField | None = None) -> "RatFn":
        text = text.strip()
        m = re.fullmatch(r"\(([^()]*)\)\s*/\s*\(([^()]*)\)", text)
        if m:
            return cls(Poly.parse(m.group(1), vars, field),
                       Poly.parse(m.group(2), vars, field))
        return cls(Poly.parse(text, vars, field))

    # -- queries ---------------------------------------------------------------

    @property
    def vars(self) -> tuple[str, ...]:
        return self.num.vars

    @property
    def field(self) -> PrimeField | None:
        return self.num.field

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __bool__(self):
        return bool(self.num)

    def is_poly(self) -> bool:
        return self.den.is_constant()

    def as_poly(self) -> Poly:
        """Return the numerator over a constant denominator as a Poly."""
        reduced = self.reduced()
        if not reduced.den.is_constant():
            raise ExactAlgError(f"{self} is not polynomial")
        return reduced.num.exact_div(reduced.den)

    def reduced(self) -> "RatFn":
        return RatFn(self.num, self.den)

    def support_vars(self) -> set[str]:
        return self.num.support_vars() | self.den.support_vars()

    def ring_one(self) -> "RatFn":
        return RatFn.one(self.vars, self.field)

    def ring_zero(self) -> "RatFn":
        return RatFn.zero(self.vars, self.field)

    def embed(self, new_vars: Sequence[str]) -> "RatFn":
        return RatFn(self.num.embed(new_vars), self.den.embed(new_vars), reduce=False)

    # -- arithmetic --------------------------------------------------------------

    def _lift(self, other) -> "RatFn | None":
        if isinstance(other, RatFn):
            return other
        if isinstance(other, Poly):
            return RatFn(other, reduce=False)
        if isinstance(other, (int, Fraction, FpElem)):
            return RatFn(Poly.const(other, self.vars, self.field), reduce=False)
        return None

    def __add__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        if self.den == other.den:
            return RatFn(self.num + other.num, self.den)
        return RatFn(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFn(-self.num, self.den, reduce=False)

    def __sub__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return RatFn(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        if other.is_zero():
            raise ZeroDivisionError("division by the zero rational function")
        return RatFn(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return other / self

    def exact_div(self, other) -> "RatFn":
        return self / other

    def __pow__(self, n: int):
        if n < 0:
            if self.is_zero():
                raise ZeroDivisionError("negative power of zero")
            return RatFn(self.den**(-n), self.num**(-n))
        return RatFn(self.num**n, self.den**n, reduce=False)

    def __eq__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return self.num * other.den == other.num * self.den

    __hash__ = None

    def subs(self, images: Mapping[str, "Poly | RatFn"], out_vars: Sequence[str] | None = None) -> "RatFn":
        num = self.num.subs(images, out_vars)
        den = self.den.subs(images, out_vars)
        num = num if isinstance(num, RatFn) else RatFn(num, reduce=False)
        den = den if isinstance(den, RatFn) else RatFn(den, reduce=False)
        return num / den

    def eval(self, point: Mapping[str, object] | Sequence[object]) -> Coeff:
        d = self.den.eval(point)
        if not d:
            raise ZeroDivisionError("denominator vanishes at the point")
        return self.num.eval(point) / d

    def __str__(self):
        if self.den.is_constant() and self.den.constant_value() == field_one(self.field):
            return str(self.num)
        return f"({self.num})/({self.den})"

    def __repr__(self):
        return f"RatFn({str(self)!r})"


# ---------------------------------------------------------------------------
# matrices over Poly or RatFn entries
# ---------------------------------------------------------------------------


Entry = Union[Poly, RatFn]


class Matrix:
    """Row-major matrix whose entries all live in one ring (Poly or RatFn).

    Determinant and rank use fraction-free (Bareiss) elimination: every
    division performed is exact, so the routines are valid over the
    polynomial ring itself; over rational-function entries the same code
    runs with ordinary field division.
    """

    __slots__ = ("entries", "rows", "cols")

    def __init__(self, entries: Sequence[Sequence[Entry]]):
        self.entries = [list(row) for row in entries]
        self.rows = len(self.entries)
        self.cols = len(self.entries[0]) if self.rows else 0
        for row in self.entries:
            if len(row) != self.cols:
                raise DimensionError("ragged rows in matrix")

    @classmethod
    def identity(cls, n: int, like: Entry) -> "Matrix":
        one, zero = like.ring_one(), like.ring_zero()
        return cls([[one if i == j else zero for j in range(n)] for i in range(n)])

    @classmethod
    def zero(cls, rows: int, cols: int, like: Entry) -> "Matrix":
        z = like.ring_zero()
        return cls([[z for _ in range(cols)] for _ in range(rows)])

    def __getitem__(self, key: tuple[int, int]) -> Entry:
        return self.entries[key[0]][key[1]]

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        if self.rows != other.rows or self.cols != other.cols:
            return False
        return all(self.entries[i][j] == other.entries[i][j]
                   for i in range(self.rows) for j in range(self.cols))

    __hash__ = None

    def map(self, fn) -> "Matrix":
        return Matrix([[fn(x) for x in row] for row in self.entries])

    def transpose(self) -> "Matrix":
        return Matrix([[self.entries[i][j] for i in range(self.rows)]
                       for j in range(self.cols)])

    def __add__(self, other: "Matrix") -> "Matrix":
        if self.rows != other.rows or self.cols != other.cols:
            raise DimensionError("matrix shapes differ")
        return Matrix([[a + b for a, b in zip(r1, r2)]
                       for r1, r2 in zip(self.entries, other.entries)])

    def __sub__(self, other: "Matrix") -> "Matrix":
        if self.rows != other.rows or self.cols != other.cols:
            raise DimensionError("matrix shapes differ")
        return Matrix([[a - b for a, b in zip(r1, r2)]
                       for r1, r2 in zip(self.entries, other.entries)])

    def __mul__(self, other):
        if isinstance(other, Matrix):
            if self.cols != other.rows:
                raise DimensionError(
                    f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
            out = []
            for i in range(self.rows):
                row = []
                for j in range(other.cols):
                    acc = None
                    for k in range(self.cols):
                        term = self.entries[i][k] * other.entries[k][j]
                        acc = term if acc is None else acc + term
                    row.append(acc)
                out.append(row)
            return Matrix(out)
        return self.scale(other)

    def scale(self, factor) -> "Matrix":
        return Matrix([[x * factor for x in row] for row in self.entries])

    def apply(self, vec: Sequence[Entry]) -> list[Entry]:
        if len(vec) != self.cols:
            raise DimensionError("vector length does not match column count")
        out = []
        for i in range(self.rows):
            acc = None
            for k in range(self.cols):
                term = self.entries[i][k] * vec[k]
                acc = term if acc is None else acc + term
            out.append(acc)
        return out

    def column(self, j: int) -> list[Entry]:
        return [self.entries[i][j] for i in range(self.rows)]

    def embed(self, new_vars: Sequence[str]) -> "Matrix":
        return self.map(lambda x: x.embed(new_vars))

    # -- fraction-free elimination ------------------------------------------

    def det(self) -> Entry:
        """Determinant by Bareiss fraction-free elimination."""
        if self.rows != self.cols:
            raise DimensionError("determinant of a non-square matrix")
        n = self.rows
        if n == 0:
            raise DimensionError("determinant of an empty matrix")
        like = self.entries[0][0]
        one = like.ring_one()
        if n == 1:
            return self.entries[0][0]
        m = [row[:] for row in self.entries]
        sign = 1
        prev = one
        for k in range(n - 1):
            if not m[k][k]:
                for i in range(k + 1, n):
                    if m[i][k]:
                        m[k], m[i] = m[i], m[k]
                        sign = -sign
                        break
                else:
                    return like.ring_zero()
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    m[i][j] = (m[k][k] * m[i][j] - m[i][k] * m[k][j]).exact_div(prev)
                m[i][k] = like.ring_zero()
            prev = m[k][k]
        d = m[n - 1][n - 1]
        return d if sign == 1 else -d

    def adjugate(self) -> "Matrix":
        """Adjugate via signed cofactors; satisfies M*adj(M) = det(M)*I."""
        if self.rows != self.cols:
            raise DimensionError("adjugate of a non-square matrix")
        n = self.rows
        like = self.entries[0][0]
        if n == 1:
            return Matrix([[like.ring_one()]])
        out = [[None] * n for _ in range(n)]
        for i in range(n):
            for j in range(n):
                minor = Matrix([[self.entries[r][c] for c in range(n) if c != j]
                                for r in range(n) if r != i])
                cof = minor.det()
                if (i + j) % 2:
                    cof = -cof
                out[j][i] = cof
        return Matrix(out)

    def _echelon_ff(self) -> tuple[list[list[Entry]], list[int]]:
        """Fraction-free row echelon; returns (rows, pivot column indices)."""
        like = self.entries[0][0] if self.rows else None
        m = [row[:] for row in self.entries]
        pivots: list[int] = []
        r = 0
        prev = like.ring_one() if like is not None else None
        for c in range(self.cols):
            if r >= self.rows:
                break
            pivot_row = None
            for i in range(r, self.rows):
                if m[i][c]:
                    pivot_row = i
                    break
            if pivot_row is None:
                continue
            if pivot_row != r:
                m[r], m[pivot_row] = m[pivot_row], m[r]
            for i in range(r + 1, self.rows):
                for j in range(c + 1, self.cols):
                    m[i][j] = (m[r][c] * m[i][j] - m[i][c] * m[r][j]).exact_div(prev)
                m[i][c] = like.ring_zero()
            prev = m[r][c]
            pivots.append(c)
            r += 1
        return m, pivots

    def rank(self) -> int:
        """Rank over the fraction field of the entry ring."""
        if self.rows == 0 or self.cols == 0:
            return 0
        if all(not x for row in self.entries for x in row):
            return 0
        return len(self._echelon_ff()[1])

    def kernel_vector(self) -> list[RatFn] | None:
        """One kernel vector over the fraction field, or None if full column
        rank.  The last free column carries coefficient 1, earlier free
        columns 0, so the last nonzero coefficient of the output is 1."""
        if self.rows == 0 or self.cols == 0:
            return None
        echelon, pivots = self._echelon_ff()
        if len(pivots) == self.cols:
            return None
        free = [c for c in range(self.cols) if c not in pivots]
        target = free[-1]
        ring_vars = self.entries[0][0].vars
        field = self.entries[0][0].field
        zero = RatFn.zero(ring_vars, field)
        one = RatFn.one(ring_vars, field)
        vec: list[RatFn] = [zero] * self.cols
        vec[target] = one
        lifted = [[x if isinstance(x, RatFn) else RatFn(x, reduce=False) for x in row]
                  for row in echelon]
        for r in range(len(pivots) - 1, -1, -1):
            c = pivots[r]
            acc = zero
            for j in range(c + 1, self.cols):
                if lifted[r][j] and vec[j]:
                    acc = acc + lifted[r][j] * vec[j]
            vec[c] = -acc / lifted[r][c]
        return vec

    def clear_row_denominators(self) -> "Matrix":
        """Scale each row by its common denominator; kernel and rank agree."""
        out = []
        for row in self.entries:
            lifted = [x if isinstance(x, RatFn) else RatFn(x, reduce=False) for x in row]
            l = lifted[0].den.ring_one()
            for x in lifted:
                l = poly_lcm(l, x.den)
            out.append([(x.num * l.exact_div(x.den)) for x in lifted])
        return Matrix(out)

    def __str__(self):
        return "[" + "; ".join(", ".join(str(x) for x in row) for row in self.entries) + "]"

    def __repr__(self):
        return f"Matrix({self.rows}x{self.cols})"


# ---------------------------------------------------------------------------
# scalar matrices (tuples of tuples of field elements)
# ---------------------------------------------------------------------------

QMat = tuple  # tuple of tuples of coefficients


def qmat(rows: Iterable[Iterable], field: PrimeField | None = None) -> QMat:
    return tuple(tuple(lift_coeff(x, field) for x in row) for row in rows)


def qmat_identity(n: int, field: PrimeField | None = None) -> QMat:
    one, zero = field_one(field), field_zero(field)
    return tuple(tuple(one if i == j else zero for j in range(n)) for i in range(n))


def qmat_mul(a: QMat, b: QMat) -> QMat:
    if len(a[0]) != len(b):
        raise DimensionError("scalar matrix shapes do not match")
    bt = list(zip(*b))
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in bt) for row in a)


def qmat_det(a: QMat, field: PrimeField | None = None) -> Coeff:
    n = len(a)
    if any(len(row) != n for row in a):
        raise DimensionError("determinant of a non-square scalar matrix")
    m = [list(row) for row in a]
    det = field_one(field)
    sign = 1
    for k in range(n):
        pivot = None
        for i in range(k, n):
            if m[i][k]:
                pivot = i
                break
        if pivot is None:
            return field_zero(field)
        if pivot != k:
            m[k], m[pivot] = m[pivot], m[k]
            sign = -sign
        for i in range(k + 1, n):
            factor = m[i][k] / m[k][k]
            for j in range(k, n):
                m[i][j] = m[i][j] - factor * m[k][j]
        det = det * m[k][k]
    return det if sign == 1 else -det


def qmat_inv(a: QMat, field: PrimeField | None = None) -> QMat:
    n = len(a)
    ident = qmat_identity(n, field)
    m = [list(row) + list(ident_row) for row, ident_row in zip(a, ident)]
    for k in range(n):
        pivot = None
        for i in range(k, n):
            if m[i][k]:
                pivot = i
                break
        if pivot is None:
            raise ExactAlgError("scalar matrix is singular")
        m[k], m[pivot] = m[pivot], m[k]
        pv = m[k][k]
        m[k] = [x / pv for x in m[k]]
        for i in range(n):
            if i != k and m[i][k]:
                f = m[i][k]
                m[i] = [x - f * y for x, y in zip(m[i], m[k])]
    return tuple(tuple(row[n:]) for row in m)


def qmat_rank(a: Sequence[Sequence[Coeff]]) -> int:
    rows = [list(r) for r in a]
    if not rows:
        return 0
    cols = len(rows[0])
    rank = 0
    r = 0
    for c in range(cols):
        pivot = None
        for i in range(r, len(rows)):
            if rows[i][c]:
                pivot = i
                break
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        for i in range(r + 1, len(rows)):
            if rows[i][c]:
                f = rows[i][c] / rows[r][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        rank += 1
        r += 1
        if r == len(rows):
            break
    return rank


# ---------------------------------------------------------------------------
# canonical-grammar parser
# ---------------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<int>\d+)|(?P<name>[A-Za-z][A-Za-z0-9_]*)|(?P<op>[-+*/^]))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            if text[pos:].strip() == "":
                break
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        if m.lastgroup is not None:
            tokens.append((m.lastgroup, m.group(m.lastgroup), m.start(m.lastgroup)))
        pos = m.end()
    return tokens


def _parse_poly(text: str, vars: tuple[str, ...], field: PrimeField | None) -> Poly:
    tokens = _tokenize(text)
    if not tokens:
        raise ParseError("empty polynomial text")
    pos = 0

    def peek():
        return tokens[pos] if pos < len(tokens) else (None, None, len(text))

    def parse_factor() -> Poly:
        nonlocal pos
        kind, value, at = peek()
        if kind == "int":
            pos += 1
            num = int(value)
            kind2, value2, _ = peek()
            if kind2 == "op" and value2 == "/":
                pos += 1
                kind3, value3, at3 = peek()
                if kind3 != "int":
                    raise ParseError("expected an integer denominator", at3)
                pos += 1
                return Poly.const(Fraction(num, int(value3)), vars, field)
            return Poly.const(num, vars, field)
        if kind == "name":
            pos += 1
            if value not in vars:
                raise ParseError(f"undeclared variable {value!r}", at)
            p = Poly.var(value, vars, field)
            kind2, value2, _ = peek()
            if kind2 == "op" and value2 == "^":
                pos += 1
                kind3, value3, at3 = peek()
                if kind3 != "int":
                    raise ParseError("expected an integer exponent", at3)
                pos += 1
                return p ** int(value3)
            return p
        raise ParseError("expected a coefficient or variable", at)

    def parse_term() -> Poly:
        nonlocal pos
        p = parse_factor()
        while True:
            kind, value, _ = peek()
            if kind == "op" and value == "*":
                pos += 1
                p = p * parse_factor()
            else:
                return p

    total: Poly | None = None
    sign = 1
    kind, value, _ = peek()
    if kind == "op" and value in "+-":
        sign = -1 if value == "-" else 1
        pos += 1
    term = parse_term()
    total = term if sign == 1 else -term
    while pos < len(tokens):
        kind, value, at = peek()
        if kind != "op" or value not in "+-":
            raise ParseError(f"expected '+' or '-', found {value!r}", at)
        pos += 1
        term = parse_term()
        total = total + term if value == "+" else total - term
    return total
