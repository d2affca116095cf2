"""Exact polynomial arithmetic in (x, y) and in z.

BiPoly holds Tutte polynomials with integer coefficients; ZPoly holds their
restriction to the hyperbola (x-1)(y-1)=q, written in z = x+y-2, with exact
rational coefficients. Points of the complex plane are plain ``complex``
values.
"""

from __future__ import annotations

import cmath
import logging
import math
from collections.abc import Iterable, Iterator, Mapping
from enum import StrEnum
from fractions import Fraction
from types import MappingProxyType
from typing import Any

from tutteatlas.errors import (
    EvaluationOverflowError,
    NotSymmetricError,
    SymmetricReductionError,
    ValidationError,
)

logger = logging.getLogger(__name__)

ComplexPoint = complex
Rational = Fraction | int


def complex_point(re: float, im: float = 0.0) -> ComplexPoint:
    """Build a finite complex point."""
    z = complex(re, im)
    if not cmath.isfinite(z):
        raise ValidationError(f"complex point must be finite, got {z!r}")
    return z


class ArithOp(StrEnum):
    """Ring operations understood by :func:`bipoly_arith`."""

    ADD = "add"
    SUB = "sub"
    MUL = "mul"
    SCALAR_MUL = "scalar-mul"


class BiPoly:
    """Sparse bivariate polynomial with integer coefficients."""

    __slots__ = ("_coeffs",)

    def __init__(self, coeffs: Mapping[tuple[int, int], int] | None = None) -> None:
        normalized: dict[tuple[int, int], int] = {}
        for (i, j), c in (coeffs or {}).items():
            if i < 0 or j < 0:
                raise ValidationError(f"negative exponent ({i}, {j})")
            if c:
                normalized[(int(i), int(j))] = int(c)
        self._coeffs = normalized

    @classmethod
    def constant(cls, c: int) -> BiPoly:
        return cls({(0, 0): c})

    @classmethod
    def x(cls) -> BiPoly:
        return cls({(1, 0): 1})

    @classmethod
    def y(cls) -> BiPoly:
        return cls({(0, 1): 1})

    @property
    def coeffs(self) -> Mapping[tuple[int, int], int]:
        return MappingProxyType(self._coeffs)

    def coefficient(self, i: int, j: int) -> int:
        return self._coeffs.get((i, j), 0)

    @property
    def degree_x(self) -> int:
        return max((i for i, _ in self._coeffs), default=-1)

    @property
    def degree_y(self) -> int:
        return max((j for _, j in self._coeffs), default=-1)

    @property
    def total_degree(self) -> int:
        return max((i + j for i, j in self._coeffs), default=-1)

    def is_zero(self) -> bool:
        return not self._coeffs

    def swap(self) -> BiPoly:
        """Exchange the roles of x and y."""
        return BiPoly({(j, i): c for (i, j), c in self._coeffs.items()})

    def is_symmetric(self) -> bool:
        return all(self._coeffs.get((j, i), 0) == c for (i, j), c in self._coeffs.items())

    def evaluate(self, x: Any, y: Any) -> Any:
        """Evaluate at (x, y); works for int, Fraction, float and complex."""
        x_powers = [x**0]
        y_powers = [y**0]
        for _ in range(self.degree_x):
            x_powers.append(x_powers[-1] * x)
        for _ in range(self.degree_y):
            y_powers.append(y_powers[-1] * y)
        total: Any = 0
        for (i, j), c in self._coeffs.items():
            total += c * x_powers[i] * y_powers[j]
        return total

    def _coerce(self, other: BiPoly | int) -> BiPoly:
        return other if isinstance(other, BiPoly) else BiPoly.constant(other)

    def __add__(self, other: BiPoly | int) -> BiPoly:
        result = dict(self._coeffs)
        for key, c in self._coerce(other)._coeffs.items():
            result[key] = result.get(key, 0) + c
        return BiPoly(result)

    __radd__ = __add__

    def __neg__(self) -> BiPoly:
        return BiPoly({key: -c for key, c in self._coeffs.items()})

    def __sub__(self, other: BiPoly | int) -> BiPoly:
        return self + (-self._coerce(other))

    def __rsub__(self, other: int) -> BiPoly:
        return self._coerce(other) - self

    def __mul__(self, other: BiPoly | int) -> BiPoly:
        if not isinstance(other, BiPoly):
            return BiPoly({key: c * other for key, c in self._coeffs.items()})
        result: dict[tuple[int, int], int] = {}
        for (i1, j1), c1 in self._coeffs.items():
            for (i2, j2), c2 in other._coeffs.items():
                key = (i1 + i2, j1 + j2)
                result[key] = result.get(key, 0) + c1 * c2
        return BiPoly(result)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> BiPoly:
        if exponent < 0:
            raise ValidationError("negative powers are not polynomials")
        result = BiPoly.constant(1)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            exponent >>= 1
            if exponent:
                base = base * base
        return result

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int):
            other = BiPoly.constant(other)
        if not isinstance(other, BiPoly):
            return NotImplemented
        return self._coeffs == other._coeffs

    def __hash__(self) -> int:
        return hash(frozenset(self._coeffs.items()))

    def __bool__(self) -> bool:
        return bool(self._coeffs)

    def sorted_terms(self) -> list[tuple[int, int, int]]:
        """Terms ordered by total degree, then x-degree, both descending."""
        return sorted(
            ((i, j, c) for (i, j), c in self._coeffs.items()),
            key=lambda t: (-(t[0] + t[1]), -t[0]),
        )

    def __str__(self) -> str:
        return _format_terms(
            (c, _monomial("x", i) + ("*" if i and j else "") + _monomial("y", j))
            for i, j, c in self.sorted_terms()
        )

    def __repr__(self) -> str:
        return f"BiPoly({self})"

    def to_json(self) -> dict[str, Any]:
        return {
            "var": "xy",
            "terms": [[i, j, str(c)] for i, j, c in self.sorted_terms()],
        }

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> BiPoly:
        if data.get("var") != "xy":
            raise ValidationError(f"expected a bivariate polynomial, got var={data.get('var')!r}")
        coeffs: dict[tuple[int, int], int] = {}
        for i, j, c in data["terms"]:
            coeffs[(int(i), int(j))] = coeffs.get((int(i), int(j)), 0) + int(c)
        return cls(coeffs)


class ZPoly:
    """Dense univariate polynomial in z with rational coefficients.

    ``coeffs[k]`` is the coefficient of z**k; trailing zeros are trimmed so the
    leading coefficient is non-zero unless the polynomial is zero.
    """

    __slots__ = ("_coeffs",)

    def __init__(self, coeffs: Iterable[Rational] = ()) -> None:
        values = [Fraction(c) for c in coeffs]
        while values and values[-1] == 0:
            values.pop()
        self._coeffs: tuple[Fraction, ...] = tuple(values)

    @classmethod
    def constant(cls, c: Rational) -> ZPoly:
        return cls([c])

    @classmethod
    def z(cls) -> ZPoly:
        return cls([0, 1])

    @classmethod
    def linear(cls, shift: Rational) -> ZPoly:
        """The polynomial z + shift."""
        return cls([shift, 1])

    @property
    def coeffs(self) -> tuple[Fraction, ...]:
        return self._coeffs

    @property
    def degree(self) -> int:
        return len(self._coeffs) - 1

    @property
    def leading(self) -> Fraction:
        return self._coeffs[-1] if self._coeffs else Fraction(0)

    def is_zero(self) -> bool:
        return not self._coeffs

    def exact_value(self, t: Rational) -> Fraction:
        result = Fraction(0)
        for c in reversed(self._coeffs):
            result = result * t + c
        return result

    def __iter__(self) -> Iterator[Fraction]:
        return iter(self._coeffs)

    def _coerce(self, other: ZPoly | Rational) -> ZPoly:
        return other if isinstance(other, ZPoly) else ZPoly.constant(other)

    def __add__(self, other: ZPoly | Rational) -> ZPoly:
        rhs = self._coerce(other)._coeffs
        size = max(len(self._coeffs), len(rhs))
        return ZPoly(
            (self._coeffs[k] if k < len(self._coeffs) else 0) + (rhs[k] if k < len(rhs) else 0)
            for k in range(size)
        )

    __radd__ = __add__

    def __neg__(self) -> ZPoly:
        return ZPoly(-c for c in self._coeffs)

    def __sub__(self, other: ZPoly | Rational) -> ZPoly:
        return self + (-self._coerce(other))

    def __rsub__(self, other: Rational) -> ZPoly:
        return self._coerce(other) - self

    def __mul__(self, other: ZPoly | Rational) -> ZPoly:
        if not isinstance(other, ZPoly):
            return ZPoly(c * other for c in self._coeffs)
        if not self._coeffs or not other._coeffs:
            return ZPoly()
        result = [Fraction(0)] * (len(self._coeffs) + len(other._coeffs) - 1)
        for i, a in enumerate(self._coeffs):
            if a:
                for j, b in enumerate(other._coeffs):
                    result[i + j] += a * b
        return ZPoly(result)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> ZPoly:
        if exponent < 0:
            raise ValidationError("negative powers are not polynomials")
        result = ZPoly.constant(1)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            exponent >>= 1
            if exponent:
                base = base * base
        return result

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int | Fraction):
            other = ZPoly.constant(other)
        if not isinstance(other, ZPoly):
            return NotImplemented
        return self._coeffs == other._coeffs

    def __hash__(self) -> int:
        return hash(self._coeffs)

    def __str__(self) -> str:
        return _format_terms(
            (c, _monomial("z", k)) for k, c in reversed(list(enumerate(self._coeffs))) if c
        )

    def __repr__(self) -> str:
        return f"ZPoly({self})"

    def to_json(self) -> dict[str, Any]:
        return {"coeffs": [f"{c.numerator}/{c.denominator}" for c in self._coeffs]}

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> ZPoly:
        return cls(Fraction(str(c)) for c in data["coeffs"])


def _monomial(var: str, power: int) -> str:
    if power == 0:
        return ""
    return var if power == 1 else f"{var}^{power}"


def _format_terms(terms: Iterable[tuple[Rational, str]]) -> str:
    pieces: list[str] = []
    for c, mono in terms:
        sign = "-" if c < 0 else "+"
        magnitude = abs(c)
        if not mono:
            body = str(magnitude)
        elif magnitude == 1:
            body = mono
        else:
            body = f"{magnitude}*{mono}"
        if pieces:
            pieces.append(f"{sign} {body}")
        else:
            pieces.append(body if sign == "+" else f"-{body}")
    return " ".join(pieces) if pieces else "0"


def bipoly_arith(p: BiPoly, q: BiPoly | int, op: ArithOp | str) -> BiPoly:
    """Apply one ring operation; ``q`` is an integer for scalar-mul."""
    op = ArithOp(op)
    if op is ArithOp.SCALAR_MUL:
        if isinstance(q, BiPoly):
            raise ValidationError("scalar-mul expects an integer scalar")
        return p * q
    if not isinstance(q, BiPoly):
        raise ValidationError(f"{op} expects a BiPoly operand")
    if op is ArithOp.ADD:
        return p + q
    if op is ArithOp.SUB:
        return p - q
    return p * q


def is_symmetric(p: BiPoly) -> bool:
    """True iff the coefficient of x^i y^j equals that of x^j y^i."""
    return p.is_symmetric()


def elementary_coefficients(p: BiPoly) -> dict[tuple[int, int], int]:
    """Write a symmetric p as sum of c * e1^a * e2^b with e1 = x+y, e2 = xy.

    Returns ``{(a, b): c}``. The lex-leading term x^i y^j (i >= j) is removed
    by subtracting c * e1^(i-j) * e2^j until nothing remains.
    """
    if not p.is_symmetric():
        raise NotSymmetricError(f"polynomial is not symmetric: {p}")
    remainder = dict(p.coeffs)
    result: dict[tuple[int, int], int] = {}
    while remainder:
        i, j = max(remainder)
        c = remainder[(i, j)]
        if i < j:
            raise SymmetricReductionError(
                f"leading term x^{i} y^{j} has i < j; remainder is not symmetric"
            )
        a, b = i - j, j
        result[(a, b)] = c
        # e1^a * e2^b = sum_k C(a, k) x^(k+b) y^(a-k+b)
        for k in range(a + 1):
            key = (k + b, a - k + b)
            updated = remainder.get(key, 0) - c * math.comb(a, k)
            if updated:
                remainder[key] = updated
            else:
                remainder.pop(key, None)
    return result


def symmetric_to_z(p: BiPoly, q: Rational) -> ZPoly:
    """Restrict a symmetric polynomial to the hyperbola (x-1)(y-1) = q.

    Uses e1 = x+y = z+2 and e2 = xy = z+q+1.
    """
    q = Fraction(q)
    by_b: dict[int, dict[int, int]] = {}
    for (a, b), c in elementary_coefficients(p).items():
        by_b.setdefault(b, {})[a] = c
    if not by_b:
        return ZPoly()

    e2 = ZPoly.linear(q + 1)
    result = ZPoly()
    for b in range(max(by_b), -1, -1):
        result = result * e2 + _shifted(by_b.get(b, {}), 2)
    logger.debug(f"reduced polynomial of total degree {p.total_degree} to degree {result.degree}")
    return result


def _shifted(coeffs: Mapping[int, int], shift: int) -> ZPoly:
    """sum_a c_a (z + shift)^a, by Horner over integers."""
    if not coeffs:
        return ZPoly()
    acc: list[int] = []
    for a in range(max(coeffs), -1, -1):
        # acc <- acc * (z + shift) + c_a
        nxt = [0] * (len(acc) + 1)
        for k, value in enumerate(acc):
            nxt[k] += value * shift
            nxt[k + 1] += value
        nxt[0] += coeffs.get(a, 0)
        acc = nxt
    return ZPoly(acc)


def eval_zpoly(p: ZPoly, z: ComplexPoint) -> ComplexPoint:
    """Horner evaluation in double precision."""
    result = 0j
    for c in reversed(p.coeffs):
        try:
            coefficient = float(c)
        except OverflowError as e:
            raise EvaluationOverflowError(f"coefficient {c} does not fit a double") from e
        result = result * z + coefficient
        if not cmath.isfinite(result):
            raise EvaluationOverflowError(f"non-finite intermediate evaluating at z={z}")
    return result
