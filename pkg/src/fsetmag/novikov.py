"""Truncated Novikov series with non-negative rational exponents.

A series is a residue class modulo the ideal of terms with exponent strictly
greater than its cutoff ``L``; the ``q^L`` term itself is kept.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, Mapping, Sequence, Tuple, Union

from .errors import NotInvertibleError, UsageError

Exponent = Fraction
Scalar = Union[int, Fraction]


def exponent(value) -> Fraction:
    """Coerce ``value`` (int, Fraction, or "p/q" string) to a non-negative Fraction."""
    if isinstance(value, str):
        text = value.strip()
        try:
            num, _, den = text.partition("/")
            result = Fraction(int(num), int(den)) if den else Fraction(int(num))
        except (ValueError, ZeroDivisionError) as exc:
            raise UsageError(f"malformed rational {value!r}") from exc
    elif isinstance(value, (int, Fraction)) and not isinstance(value, bool):
        result = Fraction(value)
    else:
        raise UsageError(f"exponent must be an exact rational, got {value!r}")
    if result < 0:
        raise UsageError(f"exponent must be non-negative, got {result}")
    return result


@dataclass(frozen=True, eq=False)
class NSeries:
    cutoff: Fraction
    terms: Tuple[Tuple[Fraction, Fraction], ...]
    exact: bool = False

    def __post_init__(self):
        object.__setattr__(self, "cutoff", exponent(self.cutoff))
        previous = None
        for e, c in self.terms:
            if not isinstance(e, Fraction) or not isinstance(c, Fraction):
                raise UsageError("series terms must hold Fractions")
            if c == 0:
                raise UsageError("zero coefficient stored in series")
            if e < 0 or e > self.cutoff:
                raise UsageError(f"exponent {e} outside [0, {self.cutoff}]")
            if previous is not None and e <= previous:
                raise UsageError("series exponents must be strictly increasing")
            previous = e

    # -- construction -----------------------------------------------------

    @classmethod
    def from_dict(cls, coeffs: Mapping, cutoff, exact: bool = False) -> "NSeries":
        cutoff = exponent(cutoff)
        items = []
        for e, c in coeffs.items():
            e = exponent(e)
            c = Fraction(c)
            if c != 0 and e <= cutoff:
                items.append((e, c))
        items.sort()
        return cls(cutoff, tuple(items), exact)

    @classmethod
    def zero(cls, cutoff) -> "NSeries":
        return cls(exponent(cutoff), (), True)

    @classmethod
    def one(cls, cutoff) -> "NSeries":
        return cls.constant(1, cutoff)

    @classmethod
    def constant(cls, value: Scalar, cutoff) -> "NSeries":
        return cls.from_dict({0: value}, cutoff, exact=True)

    @classmethod
    def monomial(cls, e, coeff: Scalar, cutoff) -> "NSeries":
        """``coeff * q^e``; silently zero when ``e`` exceeds the cutoff."""
        e = exponent(e)
        return cls.from_dict({e: coeff}, cutoff, exact=e <= exponent(cutoff))

    @classmethod
    def polynomial(cls, coeffs: Iterable[Scalar], cutoff, exact: bool = False) -> "NSeries":
        """Integer-exponent series from a coefficient list ``[c0, c1, ...]``."""
        return cls.from_dict(dict(enumerate(coeffs)), cutoff, exact)

    # -- inspection -------------------------------------------------------

    def as_dict(self) -> Dict[Fraction, Fraction]:
        return dict(self.terms)

    def coefficient(self, e) -> Fraction:
        e = exponent(e)
        if e > self.cutoff:
            raise UsageError(f"coefficient at {e} lies beyond cutoff {self.cutoff}")
        for exp, c in self.terms:
            if exp == e:
                return c
        return Fraction(0)

    def coefficients(self) -> list:
        """Dense coefficient list ``[c0, ..., cL]`` for integer-exponent series."""
        if self.cutoff.denominator != 1 or any(e.denominator != 1 for e, _ in self.terms):
            raise UsageError("dense coefficient list needs integer exponents")
        out = [Fraction(0)] * (int(self.cutoff) + 1)
        for e, c in self.terms:
            out[int(e)] = c
        return out

    @property
    def constant_term(self) -> Fraction:
        if self.terms and self.terms[0][0] == 0:
            return self.terms[0][1]
        return Fraction(0)

    def valuation(self):
        """Smallest exponent with a nonzero coefficient, or None for zero."""
        return self.terms[0][0] if self.terms else None

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, NSeries):
            return self.cutoff == other.cutoff and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.terms == NSeries.constant(other, self.cutoff).terms
        return NotImplemented

    def __hash__(self):
        return hash((self.cutoff, self.terms))

    def __repr__(self):
        return f"NSeries({self}, cutoff={self.cutoff})"

    def __str__(self):
        return render(self)

    # -- arithmetic -------------------------------------------------------

    def _coerce(self, other) -> "NSeries":
        if isinstance(other, NSeries):
            if other.cutoff != self.cutoff:
                raise UsageError(f"cutoff mismatch: {self.cutoff} vs {other.cutoff}")
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return NSeries.constant(other, self.cutoff)
        raise UsageError(f"cannot combine a series with {other!r}")

    def __add__(self, other):
        return add(self, self._coerce(other))

    __radd__ = __add__

    def __neg__(self):
        return NSeries(self.cutoff, tuple((e, -c) for e, c in self.terms), self.exact)

    def __sub__(self, other):
        return add(self, -self._coerce(other))

    def __rsub__(self, other):
        return add(self._coerce(other), -self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.scale(other)
        return mul(self, self._coerce(other))

    __rmul__ = __mul__

    def scale(self, factor: Scalar) -> "NSeries":
        factor = Fraction(factor)
        if factor == 0:
            return NSeries.zero(self.cutoff)
        return NSeries(self.cutoff, tuple((e, c * factor) for e, c in self.terms), self.exact)

    def truncate(self, cutoff) -> "NSeries":
        """Reduce to a smaller cutoff."""
        cutoff = exponent(cutoff)
        if cutoff > self.cutoff:
            raise UsageError("cannot raise the cutoff of a truncated series")
        kept = tuple((e, c) for e, c in self.terms if e <= cutoff)
        return NSeries(cutoff, kept, self.exact and len(kept) == len(self.terms))

    def mark_exact(self, exact: bool = True) -> "NSeries":
        return NSeries(self.cutoff, self.terms, exact)

    def negate_variable(self) -> "NSeries":
        """Substitute ``q -> -q``; defined for integer exponents only."""
        out = []
        for e, c in self.terms:
            if e.denominator != 1:
                raise UsageError("q -> -q needs integer exponents")
            out.append((e, -c if e.numerator % 2 else c))
        return NSeries(self.cutoff, tuple(out), self.exact)

    # -- serialization ----------------------------------------------------

    def to_json(self) -> dict:
        return {
            "cutoff": [self.cutoff.numerator, self.cutoff.denominator],
            "terms": [[e.numerator, e.denominator, c.numerator, c.denominator] for e, c in self.terms],
            "exact": self.exact,
        }

    @classmethod
    def from_json(cls, data: dict) -> "NSeries":
        cutoff = Fraction(*data["cutoff"])
        terms = tuple((Fraction(en, ed), Fraction(cn, cd)) for en, ed, cn, cd in data["terms"])
        return cls(cutoff, terms, bool(data.get("exact", False)))


def _trusted(cutoff: Fraction, acc: Dict[Fraction, Fraction], exact: bool) -> NSeries:
    """Build from already-valid data, skipping validation (internal fast path)."""
    out = object.__new__(NSeries)
    object.__setattr__(out, "cutoff", cutoff)
    object.__setattr__(out, "terms", tuple(sorted((e, c) for e, c in acc.items() if c != 0)))
    object.__setattr__(out, "exact", exact)
    return out


def add(a: NSeries, b: NSeries) -> NSeries:
    if a.cutoff != b.cutoff:
        raise UsageError(f"cutoff mismatch: {a.cutoff} vs {b.cutoff}")
    acc = dict(a.terms)
    for e, c in b.terms:
        acc[e] = acc.get(e, 0) + c
    return _trusted(a.cutoff, acc, a.exact and b.exact)


def _accumulate(acc: Dict[Fraction, Fraction], a: NSeries, b: NSeries, cutoff: Fraction) -> bool:
    """Add the truncated product a*b into ``acc``; True if a term was dropped."""
    dropped = False
    for ea, ca in a.terms:
        for eb, cb in b.terms:
            e = ea + eb
            if e > cutoff:
                dropped = True
                break  # b.terms is sorted, the rest are larger too
            acc[e] = acc.get(e, 0) + ca * cb
    return dropped


def mul(a: NSeries, b: NSeries) -> NSeries:
    if a.cutoff != b.cutoff:
        raise UsageError(f"cutoff mismatch: {a.cutoff} vs {b.cutoff}")
    acc: Dict[Fraction, Fraction] = {}
    dropped = _accumulate(acc, a, b, a.cutoff)
    return _trusted(a.cutoff, acc, a.exact and b.exact and not dropped)


def dot(left: Sequence[NSeries], right: Sequence[NSeries], cutoff) -> NSeries:
    """``sum_k left[k] * right[k]``, accumulated in one pass."""
    cutoff = exponent(cutoff)
    acc: Dict[Fraction, Fraction] = {}
    exact = True
    for a, b in zip(left, right):
        if a.cutoff != cutoff or b.cutoff != cutoff:
            raise UsageError("cutoff mismatch in dot product")
        exact = exact and a.exact and b.exact
        if a.terms and b.terms and _accumulate(acc, a, b, cutoff):
            exact = False
    return _trusted(cutoff, acc, exact)


def invert(a: NSeries) -> NSeries:
    """Multiplicative inverse via the geometric series in ``1 - a/c0``."""
    c0 = a.constant_term
    if c0 == 0:
        raise NotInvertibleError("series has no constant term", witness=a)
    unit = NSeries.one(a.cutoff)
    u = unit - a.scale(1 / c0)  # every exponent of u is positive
    result = unit
    power = unit
    while True:
        power = mul(power, u)
        if power.is_zero():
            break
        result = add(result, power)
    inverse = result.scale(1 / c0)
    # The inverse of a constant is exact; otherwise we cannot certify it.
    return inverse.mark_exact(a.exact and len(a.terms) == 1)


def eval_at_one(a: NSeries) -> Fraction:
    if not a.exact:
        raise UsageError("q = 1 is only meaningful for series known to be exact polynomials")
    return sum((c for _, c in a.terms), Fraction(0))


def _format_rational(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _format_power(e: Fraction) -> str:
    if e == 1:
        return "q"
    if e.denominator == 1:
        return f"q^{e.numerator}"
    return f"q^({e.numerator}/{e.denominator})"


def render(a: NSeries) -> str:
    """Human-readable text, e.g. ``3 - 6q + 12q^2`` or ``1/2*q^(1/2)``."""
    if not a.terms:
        return "0"
    parts = []
    for index, (e, c) in enumerate(a.terms):
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        if e == 0:
            body = _format_rational(mag)
        elif mag == 1:
            body = _format_power(e)
        elif mag.denominator == 1:
            body = f"{mag.numerator}{_format_power(e)}"
        else:
            body = f"{_format_rational(mag)}*{_format_power(e)}"
        if index == 0:
            parts.append(("-" if sign == "-" else "") + body)
        else:
            parts.append(f" {sign} {body}")
    return "".join(parts)
