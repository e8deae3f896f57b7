"""Exact arithmetic in the Novikov ring and its truncations.

Scalars are finite sums ``sum c_i T^{e_i}`` with rational exponents
``e_i >= 0`` and coefficients in an exact field (the rationals or a prime
field).  Every scalar carries an energy cutoff ``c``: it lives in
``Lambda_0 / T^c Lambda_0`` and terms with exponent ``>= c`` are dropped.
An infinite cutoff means the scalar is an honest polynomial in ``T`` and
only ring operations (no inversion) are available.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Iterable, Union

INF = math.inf

Exponent = Union[Fraction, float]


def exponent(value) -> Exponent:
    """Coerce ``value`` to an exact exponent (a Fraction or ``INF``)."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        text = value.strip()
        if text in ("inf", "+inf", "oo", "∞"):
            return INF
        return Fraction(text)
    if isinstance(value, float):
        if value == INF:
            return INF
        raise TypeError("floating point exponents are not exact: %r" % value)
    return Fraction(value)


def format_q(value) -> str:
    """Print an exact rational as ``p/q`` (or ``inf``)."""
    if value == INF:
        return "inf"
    if value == -INF:
        return "-inf"
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return "%d/%d" % (value.numerator, value.denominator)


# ---------------------------------------------------------------------------
# coefficient fields


class RationalField:
    """The field of rationals, elements are ``fractions.Fraction``."""

    characteristic = 0

    def __call__(self, value):
        if isinstance(value, FpElement):
            raise TypeError("cannot coerce a prime-field element into QQ")
        if isinstance(value, str):
            return Fraction(value.strip())
        return Fraction(value)

    @property
    def zero(self):
        return Fraction(0)

    @property
    def one(self):
        return Fraction(1)

    def format(self, value) -> str:
        return format_q(value)

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("QQ")

    def __repr__(self):
        return "QQ"


class FpElement:
    __slots__ = ("value", "p")

    def __init__(self, value: int, p: int):
        self.p = p
        self.value = value % p

    def _coerce(self, other):
        if isinstance(other, FpElement):
            if other.p != self.p:
                raise ValueError("prime field mismatch: %d vs %d" % (self.p, other.p))
            return other.value
        if isinstance(other, Fraction):
            return other.numerator * pow(other.denominator, -1, self.p)
        if isinstance(other, int):
            return other
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FpElement(self.value + o, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FpElement(self.value - o, self.p)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FpElement(o - self.value, self.p)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FpElement(self.value * o, self.p)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if o % self.p == 0:
            raise ZeroDivisionError("division by zero in GF(%d)" % self.p)
        return FpElement(self.value * pow(o, -1, self.p), self.p)

    def __rtruediv__(self, other):
        return FpElement(self._coerce(other), self.p) / self

    def __neg__(self):
        return FpElement(-self.value, self.p)

    def __bool__(self):
        return self.value != 0

    def __eq__(self, other):
        if isinstance(other, FpElement):
            return self.p == other.p and self.value == other.value
        if isinstance(other, (int, Fraction)):
            o = self._coerce(other)
            return (o - self.value) % self.p == 0
        return NotImplemented

    def __hash__(self):
        return hash((self.value, self.p))

    def __repr__(self):
        return "GF%d(%d)" % (self.p, self.value)


class PrimeField:
    """The prime field GF(p)."""

    def __init__(self, p: int):
        if p < 2 or any(p % k == 0 for k in range(2, int(p ** 0.5) + 1)):
            raise ValueError("GF(p) needs a prime p, got %r" % p)
        self.p = p
        self.characteristic = p

    def __call__(self, value):
        if isinstance(value, FpElement):
            if value.p != self.p:
                raise ValueError("prime field mismatch")
            return value
        if isinstance(value, str):
            value = Fraction(value.strip())
        if isinstance(value, Fraction):
            if value.denominator % self.p == 0:
                raise ZeroDivisionError("%s has no image in GF(%d)" % (value, self.p))
            return FpElement(value.numerator * pow(value.denominator, -1, self.p), self.p)
        return FpElement(int(value), self.p)

    @property
    def zero(self):
        return FpElement(0, self.p)

    @property
    def one(self):
        return FpElement(1, self.p)

    def format(self, value) -> str:
        return str(value.value)

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("GF", self.p))

    def __repr__(self):
        return "GF(%d)" % self.p


QQ = RationalField()


def GF(p: int) -> PrimeField:
    return PrimeField(p)


def field_from_spec(text: str):
    """Parse ``q`` or ``fp:<p>`` into a coefficient field."""
    text = text.strip().lower()
    if text in ("q", "qq"):
        return QQ
    if text.startswith("fp:"):
        return PrimeField(int(text[3:]))
    raise ValueError("unknown field %r (expected q or fp:<p>)" % text)


# ---------------------------------------------------------------------------
# Novikov scalars


class CutoffMismatch(ValueError):
    pass


class NonUnitError(ArithmeticError):
    pass


class NovikovScalar:
    """Element of ``Lambda_0 / T^cutoff`` with exact rational exponents.

    ``terms`` is a tuple of ``(exponent, coefficient)`` pairs sorted by
    strictly increasing exponent, with no zero coefficients and every
    exponent in ``[0, cutoff)``.  Instances are immutable.
    """

    __slots__ = ("terms", "cutoff", "field")

    def __init__(self, terms: Iterable = (), cutoff=INF, field=QQ):
        cutoff = exponent(cutoff)
        if not cutoff > 0:
            raise ValueError("cutoff must be positive")
        acc = {}
        for e, c in terms:
            e = exponent(e)
            if e < 0:
                raise ValueError("negative exponent %s in Lambda_0" % e)
            if e >= cutoff:
                continue
            acc[e] = acc.get(e, field.zero) + field(c)
        self.terms = tuple((e, acc[e]) for e in sorted(acc) if acc[e])
        self.cutoff = cutoff
        self.field = field

    @classmethod
    def _raw(cls, terms, cutoff, field):
        obj = cls.__new__(cls)
        obj.terms = terms
        obj.cutoff = cutoff
        obj.field = field
        return obj

    # constructors
    @classmethod
    def zero(cls, cutoff=INF, field=QQ):
        return cls((), cutoff, field)

    @classmethod
    def one(cls, cutoff=INF, field=QQ):
        return cls([(0, 1)], cutoff, field)

    @classmethod
    def monomial(cls, e, coeff=1, cutoff=INF, field=QQ):
        """``coeff * T^e`` truncated at ``cutoff``."""
        return cls([(e, coeff)], cutoff, field)

    @classmethod
    def constant(cls, coeff, cutoff=INF, field=QQ):
        return cls([(0, coeff)], cutoff, field)

    def like(self, terms) -> "NovikovScalar":
        """A scalar with the same cutoff and field."""
        return NovikovScalar(terms, self.cutoff, self.field)

    # inspection
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def valuation(self) -> Exponent:
        return self.terms[0][0] if self.terms else INF

    def leading_coefficient(self):
        if not self.terms:
            return self.field.zero
        return self.terms[0][1]

    def coefficient(self, e):
        e = exponent(e)
        for ee, c in self.terms:
            if ee == e:
                return c
        return self.field.zero

    def exponents(self):
        return [e for e, _ in self.terms]

    def is_unit(self) -> bool:
        return bool(self.terms) and self.terms[0][0] == 0

    # arithmetic
    def _check(self, other) -> "NovikovScalar":
        if not isinstance(other, NovikovScalar):
            if isinstance(other, (int, Fraction, FpElement)):
                return NovikovScalar.constant(other, self.cutoff, self.field)
            raise TypeError("cannot combine NovikovScalar with %r" % type(other))
        if other.cutoff != self.cutoff:
            raise CutoffMismatch(
                "cutoff mismatch: %s vs %s" % (format_q(self.cutoff), format_q(other.cutoff))
            )
        if other.field != self.field:
            raise ValueError("coefficient field mismatch: %r vs %r" % (self.field, other.field))
        return other

    def __add__(self, other):
        other = self._check(other)
        acc = dict(self.terms)
        zero = self.field.zero
        for e, c in other.terms:
            acc[e] = acc.get(e, zero) + c
        return NovikovScalar._raw(
            tuple((e, acc[e]) for e in sorted(acc) if acc[e]), self.cutoff, self.field
        )

    __radd__ = __add__

    def __neg__(self):
        return NovikovScalar._raw(tuple((e, -c) for e, c in self.terms), self.cutoff, self.field)

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) - self

    def __mul__(self, other):
        other = self._check(other)
        cut = self.cutoff
        acc = {}
        zero = self.field.zero
        for e1, c1 in self.terms:
            for e2, c2 in other.terms:
                e = e1 + e2
                if e >= cut:
                    # terms are sorted, later e2 only grow
                    break
                acc[e] = acc.get(e, zero) + c1 * c2
        return NovikovScalar._raw(
            tuple((e, acc[e]) for e in sorted(acc) if acc[e]), cut, self.field
        )

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            return self.inv() ** (-n)
        result = NovikovScalar.one(self.cutoff, self.field)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def shift(self, e) -> "NovikovScalar":
        """Multiply by ``T^e`` (``e >= 0``), truncating at the cutoff."""
        e = exponent(e)
        if e == INF:
            return NovikovScalar.zero(self.cutoff, self.field)
        if e < 0:
            raise ValueError("negative shift leaves Lambda_0; use shift_down")
        cut = self.cutoff
        return NovikovScalar._raw(
            tuple((x + e, c) for x, c in self.terms if x + e < cut), cut, self.field
        )

    def shift_down(self, e) -> "NovikovScalar":
        """Divide by ``T^e``; every exponent must be ``>= e``.

        The cutoff drops by ``e`` as well: the quotient is only known
        modulo ``T^(cutoff - e)``.
        """
        e = exponent(e)
        if e == 0:
            return self
        if self.terms and self.terms[0][0] < e:
            raise NonUnitError("T^%s does not divide %s" % (format_q(e), self))
        cut = self.cutoff - e
        if not cut > 0:
            raise ValueError("shift_down by %s leaves nothing below the cutoff" % format_q(e))
        return NovikovScalar._raw(tuple((x - e, c) for x, c in self.terms), cut, self.field)

    def scale(self, coeff) -> "NovikovScalar":
        coeff = self.field(coeff)
        if not coeff:
            return NovikovScalar.zero(self.cutoff, self.field)
        return NovikovScalar._raw(tuple((e, c * coeff) for e, c in self.terms), self.cutoff, self.field)

    def truncate(self, c) -> "NovikovScalar":
        """Drop terms with exponent ``>= c`` but keep the cutoff."""
        c = exponent(c)
        return NovikovScalar._raw(tuple(t for t in self.terms if t[0] < c), self.cutoff, self.field)

    def with_cutoff(self, c) -> "NovikovScalar":
        """Reinterpret the representative at another cutoff."""
        c = exponent(c)
        return NovikovScalar(self.terms, c, self.field)

    def residue(self):
        """Image in the residue field ``Lambda_0 / Lambda_0^+``."""
        return self.coefficient(0)

    def inv(self) -> "NovikovScalar":
        """Inverse of a unit modulo ``T^cutoff`` by geometric series."""
        if not self.is_unit():
            raise NonUnitError("%s is not a unit (valuation %s)" % (self, format_q(self.valuation())))
        a0 = self.terms[0][1]
        inv0 = self.field.one / a0
        if len(self.terms) == 1:
            return NovikovScalar.constant(inv0, self.cutoff, self.field)
        if self.cutoff == INF:
            raise ValueError("inverse of %s needs a finite cutoff" % self)
        # a = a0 (1 + n) with val(n) > 0; 1/a = a0^-1 sum (-n)^k
        n = self.scale(inv0) - 1
        minus_n = -n
        term = NovikovScalar.one(self.cutoff, self.field)
        total = term
        while True:
            term = term * minus_n
            if term.is_zero():
                break
            total = total + term
        return total.scale(inv0)

    def divide_exact(self, other: "NovikovScalar") -> "NovikovScalar":
        """Exact quotient ``self / other`` in ``Lambda_0`` at this cutoff.

        Requires ``val(self) >= val(other)``.  At a finite cutoff this
        always succeeds; at infinite cutoff the unit ratio must be a
        polynomial, otherwise ``ValueError`` is raised.
        """
        other = self._check(other)
        if other.is_zero():
            raise ZeroDivisionError("division by zero scalar")
        if self.is_zero():
            return self
        v = other.valuation()
        dv = self.valuation() - v
        if dv < 0:
            raise NonUnitError("valuation of divisor exceeds dividend")
        unit = other.shift_down(v).with_cutoff(self.cutoff)
        num = self.shift_down(self.valuation()).with_cutoff(self.cutoff)
        if self.cutoff != INF:
            return (num * unit.inv()).shift(dv)
        return _poly_divide(num, unit).shift(dv)

    # comparison / hashing
    def __eq__(self, other):
        if isinstance(other, (int, Fraction, FpElement)):
            other = NovikovScalar.constant(other, self.cutoff, self.field)
        if not isinstance(other, NovikovScalar):
            return NotImplemented
        return self.cutoff == other.cutoff and self.field == other.field and self.terms == other.terms

    def __hash__(self):
        return hash((self.terms, self.cutoff))

    def __repr__(self):
        return "NovikovScalar(%s)" % serialize_scalar(self)

    def __str__(self):
        return format_scalar(self)


def _poly_divide(num: NovikovScalar, den: NovikovScalar) -> NovikovScalar:
    """Exact division of unit-leading polynomials at infinite cutoff."""
    top_num = num.terms[-1][0]
    top_den = den.terms[-1][0]
    if top_num < top_den:
        raise ValueError(
            "unit ratio %s / %s does not terminate; a finite cutoff is required" % (num, den)
        )
    d0 = den.terms[0][1]
    quotient = []
    rem = num
    bound = top_num - top_den
    while rem:
        e, c = rem.terms[0]
        if e > bound:
            raise ValueError(
                "unit ratio %s / %s does not terminate; a finite cutoff is required" % (num, den)
            )
        q = c / d0
        quotient.append((e, q))
        rem = rem - den.shift(e).scale(q)
    return NovikovScalar(quotient, INF, num.field)


# ---------------------------------------------------------------------------
# text form:  c0 + c1*T^(p/q) + ...  [@cutoff p/q | @inf]


def _format_exp(e) -> str:
    e = Fraction(e)
    if e.denominator == 1:
        return "T^%d" % e.numerator if e != 1 else "T"
    return "T^(%s)" % format_q(e)


def format_scalar(a: NovikovScalar) -> str:
    if not a.terms:
        return "0"
    field = a.field
    parts = []
    for e, c in a.terms:
        if isinstance(field, PrimeField):
            neg = False
            cs = field.format(c)
        else:
            neg = c < 0
            cs = format_q(abs(c))
        if e == 0:
            body = cs
        elif cs == "1":
            body = _format_exp(e)
        else:
            body = "%s*%s" % (cs, _format_exp(e))
        parts.append(("-" if neg else "+", body))
    text = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        text += " %s %s" % (sign, body)
    return text


def serialize_scalar(a: NovikovScalar) -> str:
    tag = "@inf" if a.cutoff == INF else "@cutoff %s" % format_q(a.cutoff)
    return "%s %s" % (format_scalar(a), tag)


_TERM = re.compile(
    r"""^(?:(?P<coef>\d+(?:/\d+)?)\s*(?:\*\s*)?)?
        (?:T(?:\s*\^\s*(?:\((?P<pexp>[^)]*)\)|(?P<exp>\d+(?:/\d+)?)))?)?$""",
    re.X,
)


def parse_scalar(text: str, cutoff=None, field=QQ) -> NovikovScalar:
    """Parse the scalar literal grammar.

    ``cutoff`` is used when the literal carries no ``@cutoff``/``@inf``
    annotation (default: infinite).
    """
    body = text.strip()
    m = re.search(r"@\s*(cutoff\s+(?P<c>\S+)|inf)\s*$", body)
    if m:
        cut = INF if m.group("c") is None else exponent(m.group("c"))
        body = body[: m.start()].strip()
    else:
        cut = INF if cutoff is None else exponent(cutoff)
    if not body:
        raise ValueError("empty scalar literal")
    compact = body.replace(" ", "")
    if compact[0] not in "+-":
        compact = "+" + compact
    pieces = re.findall(r"([+-])([^+-]+)", compact)
    if "".join(a + b for a, b in pieces) != compact:
        raise ValueError("cannot parse scalar literal %r" % text)
    pieces = [(-1 if a == "-" else 1, b) for a, b in pieces]
    terms = []
    for sgn, piece in pieces:
        m = _TERM.match(piece.replace(" ", ""))
        if not m or (m.group("coef") is None and "T" not in piece):
            raise ValueError("cannot parse scalar term %r" % piece)
        coef = Fraction(m.group("coef")) if m.group("coef") else Fraction(1)
        if "T" in piece:
            raw = m.group("pexp") or m.group("exp")
            e = Fraction(raw.strip()) if raw else Fraction(1)
        else:
            e = Fraction(0)
        terms.append((e, field(sgn * coef)))
    return NovikovScalar(terms, cut, field)


# ---------------------------------------------------------------------------
# fraction field


class NovikovFieldScalar:
    """Element of the Novikov field known modulo ``T^precision``.

    Exponents may be negative; ``precision`` is absolute (``INF`` for an
    exact finite sum).  ``shift`` and ``body`` expose the factorisation
    ``T^shift * body`` with ``body`` of valuation zero.
    """

    __slots__ = ("terms", "precision", "field")

    def __init__(self, terms: Iterable = (), precision=INF, field=QQ):
        precision = exponent(precision)
        acc = {}
        for e, c in terms:
            e = exponent(e)
            if e >= precision:
                continue
            acc[e] = acc.get(e, field.zero) + field(c)
        self.terms = tuple((e, acc[e]) for e in sorted(acc) if acc[e])
        self.precision = precision
        self.field = field

    @classmethod
    def from_scalar(cls, a: NovikovScalar, shift=0):
        shift = exponent(shift)
        return cls([(e + shift, c) for e, c in a.terms], a.cutoff + shift, a.field)

    @classmethod
    def monomial(cls, e, coeff=1, precision=INF, field=QQ):
        return cls([(e, coeff)], precision, field)

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def shift(self):
        return self.terms[0][0] if self.terms else self.precision

    def valuation(self):
        return self.terms[0][0] if self.terms else INF

    @property
    def body(self) -> NovikovScalar:
        if not self.terms:
            return NovikovScalar.zero(INF, self.field)
        s = self.shift
        return NovikovScalar([(e - s, c) for e, c in self.terms], self.precision - s, self.field)

    def in_filtration(self, level) -> bool:
        """Membership in ``F^level``, the image of ``T^level Lambda_0``."""
        return self.valuation() >= exponent(level)

    def _coerce(self, other):
        if isinstance(other, NovikovFieldScalar):
            if other.field != self.field:
                raise ValueError("coefficient field mismatch")
            return other
        if isinstance(other, NovikovScalar):
            return NovikovFieldScalar.from_scalar(other)
        if isinstance(other, (int, Fraction)):
            return NovikovFieldScalar([(0, other)], INF, self.field)
        raise TypeError("cannot combine NovikovFieldScalar with %r" % type(other))

    def __add__(self, other):
        other = self._coerce(other)
        prec = min(self.precision, other.precision)
        return NovikovFieldScalar(self.terms + other.terms, prec, self.field)

    __radd__ = __add__

    def __neg__(self):
        return NovikovFieldScalar([(e, -c) for e, c in self.terms], self.precision, self.field)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __mul__(self, other):
        other = self._coerce(other)
        prec = min(self.valuation() + other.precision, other.valuation() + self.precision)
        terms = [(e1 + e2, c1 * c2) for e1, c1 in self.terms for e2, c2 in other.terms]
        return NovikovFieldScalar(terms, prec, self.field)

    __rmul__ = __mul__

    def inv(self, precision=None) -> "NovikovFieldScalar":
        """Inverse, exact through the attainable precision.

        An explicit ``precision`` (absolute) is honoured when it does not
        exceed what the input supports.
        """
        if self.is_zero():
            raise ZeroDivisionError("inversion of zero in the Novikov field")
        v = self.valuation()
        attainable = self.precision - 2 * v
        if precision is None:
            precision = attainable
        precision = exponent(precision)
        if precision > attainable:
            raise ValueError("requested precision %s exceeds attainable %s"
                             % (format_q(precision), format_q(attainable)))
        if precision == INF:
            if len(self.terms) != 1:
                raise ValueError("exact inverse of a non-monomial needs a finite precision")
            e, c = self.terms[0]
            return NovikovFieldScalar([(-e, self.field.one / c)], INF, self.field)
        rel = precision + v
        if not rel > 0:
            return NovikovFieldScalar((), precision, self.field)
        body = NovikovScalar([(e - v, c) for e, c in self.terms], rel, self.field)
        return NovikovFieldScalar.from_scalar(body.inv(), -v)

    def truncate(self, precision) -> "NovikovFieldScalar":
        return NovikovFieldScalar(self.terms, min(self.precision, exponent(precision)), self.field)

    def __eq__(self, other):
        if not isinstance(other, NovikovFieldScalar):
            try:
                other = self._coerce(other)
            except TypeError:
                return NotImplemented
        prec = min(self.precision, other.precision)
        a = tuple(t for t in self.terms if t[0] < prec)
        b = tuple(t for t in other.terms if t[0] < prec)
        return a == b

    def __hash__(self):
        return hash(self.terms)

    def __repr__(self):
        text = " + ".join("%s*T^(%s)" % (self.field.format(c), format_q(e)) for e, c in self.terms) or "0"
        return "NovikovFieldScalar(%s mod T^%s)" % (text, format_q(self.precision))
