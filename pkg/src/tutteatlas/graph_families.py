"""Self-dual graph families: exact recurrences, explicit graphs and spectral forms.

Four families are supported:

* ``triangle-strip``: G_n, a fan of n triangles whose last spoke is doubled;
* ``wheel``: B_n, a hub joined to every vertex of an n-cycle (n >= 1);
* ``cycle-multi``: G_{n,n}, an (n+1)-cycle with one edge of multiplicity n;
* ``counterexample``: the graph C, a 4-cycle with one edge of multiplicity 3.

Every exact polynomial comes from an integer recurrence. Closed forms that
divide or take square roots are only evaluated numerically.
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass
from enum import StrEnum
from fractions import Fraction
from functools import lru_cache

from tutteatlas.eigen import Branch, branch_value
from tutteatlas.errors import (
    EvaluationOverflowError,
    InvalidRangeError,
    UnsupportedFamilyError,
    ZeroOfPartitionError,
)
from tutteatlas.exact_poly import BiPoly, ComplexPoint, Rational, ZPoly, symmetric_to_z
from tutteatlas.tutte_oracle import DEFAULT_MAX_EDGES, Edge, Multigraph

logger = logging.getLogger(__name__)


class FamilyId(StrEnum):
    TRIANGLE_STRIP = "triangle-strip"
    WHEEL = "wheel"
    CYCLE_MULTI = "cycle-multi"
    COUNTEREXAMPLE = "counterexample"


COUNTEREXAMPLE_SIZE = 3

_X = BiPoly.x()
_Y = BiPoly.y()
_XY = _X * _Y
_ONE = BiPoly.constant(1)


def _check_size(family: FamilyId, n: int) -> None:
    minimum = 1 if family is FamilyId.WHEEL else 0
    if n < minimum:
        raise UnsupportedFamilyError(f"{family} needs n >= {minimum}, got {n}")


def family_degree(family: FamilyId, n: int) -> int:
    """Degree in z of the family polynomial."""
    family = FamilyId(family)
    if family is FamilyId.COUNTEREXAMPLE:
        return COUNTEREXAMPLE_SIZE
    _check_size(family, n)
    return n + 1 if family is FamilyId.TRIANGLE_STRIP else n


# ---------------------------------------------------------------------------
# Exact recurrences over BiPoly

_WHEEL_SEEDS = (
    _XY,
    _X**2 + _Y**2 + _XY + _X + _Y,
    _X**3 + _Y**3 + 3 * _X**2 + 3 * _Y**2 + 4 * _XY + 2 * _X + 2 * _Y,
)

_CYCLE_SEEDS = (
    _ONE,
    _X + _Y,
    _X**2 + _Y**2 + _XY + _X + _Y,
    _X**3 + _Y**3 + _X * _Y**2 + _X**2 * _Y + _XY**2 + _X**2 + _Y**2 + _XY + _X + _Y,
)


def _recurrence(family: FamilyId) -> tuple[tuple[BiPoly, ...], tuple[BiPoly, ...]]:
    """Seeds and step coefficients; step k multiplies the term k+1 places back."""
    if family is FamilyId.TRIANGLE_STRIP:
        s = 1 + _X + _Y
        return (_X + _Y, s * s - _XY - s), (s, -_XY)
    if family is FamilyId.WHEEL:
        return _WHEEL_SEEDS, (2 + _X + _Y, -(1 + _X + _Y + _XY), _XY)
    gamma = _XY + _X + _Y + 1
    return _CYCLE_SEEDS, (gamma, -(gamma - 1 + _XY * (1 + _X + _Y)), gamma * _XY, -(_XY**2))


@lru_cache(maxsize=8)
def _bipoly_sequence(family: FamilyId, index: int) -> tuple[BiPoly, ...]:
    seeds, steps = _recurrence(family)
    values = list(seeds[: index + 1])
    while len(values) <= index:
        values.append(sum((c * values[-1 - k] for k, c in enumerate(steps)), BiPoly()))
    return tuple(values)


def triangle_strip_poly(n: int) -> BiPoly:
    """T(G_n) = (1+x+y) T(G_{n-1}) - xy T(G_{n-2}), T(G_0) = x+y."""
    _check_size(FamilyId.TRIANGLE_STRIP, n)
    return _bipoly_sequence(FamilyId.TRIANGLE_STRIP, n)[n]


def triangle_strip_plain_poly(n: int) -> BiPoly:
    """T(Tr_n) for the strip without its doubled spoke, from T(G_n) = T(Tr_n) + y T(G_{n-1})."""
    _check_size(FamilyId.TRIANGLE_STRIP, n)
    previous = triangle_strip_poly(n - 1) if n >= 1 else _ONE
    return triangle_strip_poly(n) - _Y * previous


def wheel_poly(n: int) -> BiPoly:
    """T(B_n) = (2+x+y) T(B_{n-1}) - (1+x+y+xy) T(B_{n-2}) + xy T(B_{n-3})."""
    _check_size(FamilyId.WHEEL, n)
    return _bipoly_sequence(FamilyId.WHEEL, n - 1)[n - 1]


def cycle_multi_poly(n: int) -> BiPoly:
    """T(G_{n,n}) by the four-term recurrence with gamma = xy + x + y + 1."""
    _check_size(FamilyId.CYCLE_MULTI, n)
    return _bipoly_sequence(FamilyId.CYCLE_MULTI, n)[n]


def family_poly(family: FamilyId, n: int = 0) -> BiPoly:
    family = FamilyId(family)
    if family is FamilyId.TRIANGLE_STRIP:
        return triangle_strip_poly(n)
    if family is FamilyId.WHEEL:
        return wheel_poly(n)
    if family is FamilyId.CYCLE_MULTI:
        return cycle_multi_poly(n)
    return cycle_multi_poly(COUNTEREXAMPLE_SIZE)


# ---------------------------------------------------------------------------
# The same recurrences run directly over ZPoly


@lru_cache(maxsize=32)
def _zpoly_sequence(family: FamilyId, n: int, q: Fraction) -> tuple[ZPoly, ...]:
    s = ZPoly.linear(2)  # x + y
    p = ZPoly.linear(q + 1)  # xy
    if family is FamilyId.TRIANGLE_STRIP:
        seeds = [symmetric_to_z(triangle_strip_poly(k), q) for k in range(2)]
        steps = [s + 1, -p]
    elif family is FamilyId.WHEEL:
        # index 0 holds B_1
        seeds = [symmetric_to_z(wheel_poly(k), q) for k in range(1, 4)]
        steps = [s + 2, -(s + p + 1), p]
    else:
        gamma = p + s + 1
        seeds = [symmetric_to_z(cycle_multi_poly(k), q) for k in range(4)]
        steps = [gamma, -(gamma - 1 + p * (s + 1)), gamma * p, -(p * p)]

    values = list(seeds[: n + 1])
    while len(values) <= n:
        values.append(sum((c * values[-1 - k] for k, c in enumerate(steps)), ZPoly()))
    return tuple(values)


def family_zpoly(family: FamilyId, n: int, q: Rational) -> ZPoly:
    """Family polynomial on the hyperbola (x-1)(y-1) = q, built in z directly."""
    family = FamilyId(family)
    q = Fraction(q)
    if family is FamilyId.COUNTEREXAMPLE:
        return symmetric_to_z(family_poly(family), q)
    _check_size(family, n)
    index = n - 1 if family is FamilyId.WHEEL else n
    return _zpoly_sequence(family, index, q)[index]


# ---------------------------------------------------------------------------
# Explicit graphs


def build_family_graph(
    family: FamilyId, n: int = 0, max_edges: int = DEFAULT_MAX_EDGES
) -> Multigraph:
    """Explicit multigraph whose Tutte polynomial is the family polynomial."""
    family = FamilyId(family)
    if family is FamilyId.COUNTEREXAMPLE:
        n = COUNTEREXAMPLE_SIZE
    _check_size(family, n)

    edges: list[Edge] = []
    if family is FamilyId.TRIANGLE_STRIP:
        vertex_count = n + 2
        edges += [Edge(0, i) for i in range(1, n + 2)]
        edges += [Edge(i, i + 1) for i in range(1, n + 1)]
        edges.append(Edge(0, n + 1))
    elif family is FamilyId.WHEEL:
        vertex_count = n + 1
        edges += [Edge(0, i) for i in range(1, n + 1)]
        edges += [Edge(i, i % n + 1) for i in range(1, n + 1)]
    elif n == 0:
        vertex_count = 1
    else:
        vertex_count = n + 1
        edges.append(Edge(0, 1, n))
        edges += [Edge(i, (i + 1) % (n + 1)) for i in range(1, n + 1)]

    graph = Multigraph(vertex_count, tuple(edges))
    if graph.edge_count > max_edges:
        raise UnsupportedFamilyError(
            f"{family} with n={n} has {graph.edge_count} edges, above the bound {max_edges}"
        )
    return graph


def build_plain_strip_graph(n: int) -> Multigraph:
    """Tr_n: the triangle fan of G_n without the doubled spoke."""
    graph = build_family_graph(FamilyId.TRIANGLE_STRIP, n)
    last = graph.edges.index(Edge(0, n + 1, 2))
    edges = list(graph.edges)
    edges[last] = Edge(0, n + 1, 1)
    return Multigraph(graph.vertex_count, tuple(edges))


# ---------------------------------------------------------------------------
# Floating evaluation at arbitrary (x, y)


def _pair_roots(total: complex, product: complex) -> tuple[complex, complex]:
    root = cmath.sqrt(total * total - 4 * product)
    return (total + root) / 2, (total - root) / 2


def closed_form_value(family: FamilyId, n: int, x: complex, y: complex) -> complex:
    """Closed-form value of the family polynomial at (x, y)."""
    family = FamilyId(family)
    if family is FamilyId.COUNTEREXAMPLE:
        family, n = FamilyId.CYCLE_MULTI, COUNTEREXAMPLE_SIZE
    _check_size(family, n)
    try:
        if family is FamilyId.TRIANGLE_STRIP:
            mu1, mu2 = _pair_roots(1 + x + y, x * y)
            alpha = (mu1 - 1) / (mu1 - mu2)
            return complex(alpha * mu1 ** (n + 1) + (1 - alpha) * mu2 ** (n + 1))
        if family is FamilyId.WHEEL:
            mu1, mu2 = _pair_roots(1 + x + y, x * y)
            return complex(x * y - x - y - 1 + mu1**n + mu2**n)
        denominator = (x - 1) * (y - 1)
        return complex(
            ((x * y - x - y) * (x**n + y**n - 1) + (x * y) ** n) / denominator
        )
    except (OverflowError, ZeroDivisionError) as e:
        raise EvaluationOverflowError(f"closed form of {family} failed at n={n}: {e}") from e


def recurrence_value(family: FamilyId, n: int, x: complex, y: complex) -> complex:
    """Run the family recurrence in double precision at (x, y)."""
    family = FamilyId(family)
    if family is FamilyId.COUNTEREXAMPLE:
        family, n = FamilyId.CYCLE_MULTI, COUNTEREXAMPLE_SIZE
    _check_size(family, n)
    s, p = x + y, x * y
    if family is FamilyId.TRIANGLE_STRIP:
        seeds = [complex(triangle_strip_poly(k).evaluate(x, y)) for k in range(2)]
        steps = [s + 1, -p]
        index = n
    elif family is FamilyId.WHEEL:
        seeds = [complex(wheel_poly(k).evaluate(x, y)) for k in range(1, 4)]
        steps = [s + 2, -(s + p + 1), p]
        index = n - 1
    else:
        gamma = p + s + 1
        seeds = [complex(cycle_multi_poly(k).evaluate(x, y)) for k in range(4)]
        steps = [gamma, -(gamma - 1 + p * (s + 1)), gamma * p, -p * p]
        index = n

    values = seeds[: index + 1]
    while len(values) <= index:
        value = sum(c * values[-1 - k] for k, c in enumerate(steps))
        if not cmath.isfinite(value):
            raise EvaluationOverflowError(
                f"recurrence of {family} overflowed at step {len(values)}"
            )
        values.append(value)
    return values[index]


# ---------------------------------------------------------------------------
# Spectral forms on the hyperbola


class CoefficientKind(StrEnum):
    CONSTANT = "constant"
    TRIANGLE_ALPHA = "triangle-alpha"
    TRIANGLE_BETA = "triangle-beta"


@dataclass(frozen=True)
class SpectralTerm:
    """coefficient(z) * lambda_a^branch(z) ** exponent."""

    a: float
    branch: Branch
    kind: CoefficientKind = CoefficientKind.CONSTANT
    constant: float = 0.0

    @property
    def is_vanishing(self) -> bool:
        return self.kind is CoefficientKind.CONSTANT and abs(self.constant) < 1e-15

    def describe(self) -> str:
        if self.kind is CoefficientKind.CONSTANT:
            return f"{self.constant:.17g}"
        if self.kind is CoefficientKind.TRIANGLE_ALPHA:
            return "(l+ - 1)/(l+ - l-)"
        return "(1 - l-)/(l+ - l-)"


def _triangle_coefficients(plus: complex, minus: complex) -> tuple[complex, complex, complex]:
    """alpha, beta and d(alpha)/dz for the a = 1 pair."""
    gap = plus - minus
    if gap == 0:
        raise EvaluationOverflowError(
            "triangle-strip coefficients are singular at a double eigenvalue"
        )
    alpha = (plus - 1) / gap
    dalpha = 2 * (plus - 1) * (1 - minus) / gap**3
    return alpha, 1 - alpha, dalpha


@dataclass(frozen=True)
class SpectralForm:
    """f_n(z) = sum of coefficient * lambda ** (n + exponent_shift) over the terms."""

    family: FamilyId
    q: float
    terms: tuple[SpectralTerm, ...]
    exponent_shift: int = 0

    def exponent(self, n: int) -> int:
        return n + self.exponent_shift

    def eigenvalues(self, z: ComplexPoint) -> list[complex]:
        return [branch_value(t.a, self.q, z, t.branch) for t in self.terms]

    def coefficients(self, z: ComplexPoint) -> list[complex]:
        lambdas = self.eigenvalues(z)
        return self._coefficients(lambdas)[0]

    def _coefficients(self, lambdas: list[complex]) -> tuple[list[complex], list[complex]]:
        """Coefficients and their z-derivatives."""
        values: list[complex] = []
        derivatives: list[complex] = []
        triangle: tuple[complex, complex, complex] | None = None
        for term in self.terms:
            if term.kind is CoefficientKind.CONSTANT:
                values.append(complex(term.constant))
                derivatives.append(0j)
                continue
            if triangle is None:
                plus = lambdas[self._index_of(Branch.PLUS)]
                minus = lambdas[self._index_of(Branch.MINUS)]
                triangle = _triangle_coefficients(plus, minus)
            alpha, beta, dalpha = triangle
            if term.kind is CoefficientKind.TRIANGLE_ALPHA:
                values.append(alpha)
                derivatives.append(dalpha)
            else:
                values.append(beta)
                derivatives.append(-dalpha)
        return values, derivatives

    def _index_of(self, branch: Branch) -> int:
        return next(k for k, t in enumerate(self.terms) if t.branch is branch)

    def evaluate(self, n: int, z: ComplexPoint) -> complex:
        """Direct evaluation; raises EvaluationOverflowError when the value leaves double range."""
        m = self.exponent(n)
        lambdas = self.eigenvalues(z)
        coeffs, _ = self._coefficients(lambdas)
        try:
            value = sum(c * lam**m for c, lam in zip(coeffs, lambdas, strict=True))
        except OverflowError as e:
            raise EvaluationOverflowError(f"spectral evaluation overflowed at n={n}, z={z}") from e
        if not cmath.isfinite(value):
            raise EvaluationOverflowError(f"spectral evaluation overflowed at n={n}, z={z}")
        return complex(value)

    def log_evaluate(self, n: int, z: ComplexPoint) -> complex:
        """Principal logarithm of f_n(z), computed without forming f_n(z).

        With M the largest eigenvalue modulus, ln f = m ln M + Log(sum c (lambda/M)^m),
        which keeps the imaginary part in (-pi, pi].
        """
        m = self.exponent(n)
        lambdas = self.eigenvalues(z)
        scale = max(abs(lam) for lam in lambdas) or 1.0
        coeffs, _ = self._coefficients(lambdas)
        total = sum(c * (lam / scale) ** m for c, lam in zip(coeffs, lambdas, strict=True))
        if total == 0:
            raise ZeroOfPartitionError(f"f_{n} vanishes at z={z}")
        return m * math.log(scale) + cmath.log(total)

    def newton_ratio(self, n: int, z: ComplexPoint) -> complex:
        """f_n(z) / f_n'(z) from the spectral representation.

        Each eigenvalue satisfies lambda' = (lambda - 1) / (lambda - other root).
        Both sums are scaled by M^m, which cancels in the ratio.
        """
        m = self.exponent(n)
        lambdas = self.eigenvalues(z)
        scale = max(abs(lam) for lam in lambdas) or 1.0
        coeffs, dcoeffs = self._coefficients(lambdas)

        value = 0j
        derivative = 0j
        for term, c, dc, lam in zip(self.terms, coeffs, dcoeffs, lambdas, strict=True):
            other = branch_value(term.a, self.q, z, term.branch.opposite)
            dlam = (lam - 1) / (lam - other) if lam != other else 0j
            ratio = lam / scale
            value += c * ratio**m
            derivative += dc * ratio**m
            if m:
                derivative += c * m * ratio ** (m - 1) * dlam / scale
        if derivative == 0 or not cmath.isfinite(derivative):
            raise EvaluationOverflowError(f"spectral derivative unusable at z={z}")
        return value / derivative


def spectral_form(family: FamilyId, q: float) -> SpectralForm:
    """Eigenvalue decomposition of the family on the hyperbola (x-1)(y-1) = q."""
    family = FamilyId(family)
    q = float(q)
    if not q > 1:
        raise InvalidRangeError(f"spectral forms need q > 1, got {q}")
    if family is FamilyId.TRIANGLE_STRIP:
        terms = (
            SpectralTerm(1.0, Branch.PLUS, CoefficientKind.TRIANGLE_ALPHA),
            SpectralTerm(1.0, Branch.MINUS, CoefficientKind.TRIANGLE_BETA),
        )
        return SpectralForm(family, q, terms, exponent_shift=1)
    if family is FamilyId.WHEEL:
        terms = (
            SpectralTerm(q, Branch.MINUS, constant=q - 2),
            SpectralTerm(1.0, Branch.PLUS, constant=1.0),
            SpectralTerm(1.0, Branch.MINUS, constant=1.0),
        )
        form = SpectralForm(family, q, terms)
        if terms[0].is_vanishing:
            logger.info("wheel spectral form at q=2: the lambda_q term has a vanishing coefficient")
        return form
    if family is FamilyId.CYCLE_MULTI:
        terms = (
            SpectralTerm(q, Branch.PLUS, constant=1 / q),
            SpectralTerm(q, Branch.MINUS, constant=(1 - q) / q),
            SpectralTerm(0.0, Branch.PLUS, constant=(q - 1) / q),
            SpectralTerm(0.0, Branch.MINUS, constant=(q - 1) / q),
        )
        return SpectralForm(family, q, terms)
    raise UnsupportedFamilyError("the counterexample graph is a single graph, not a family")
