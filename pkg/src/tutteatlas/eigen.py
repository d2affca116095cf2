"""Eigenvalue branches lambda_a^+-(z) and everything built on their magnitudes.

For a parameter a in [0, q] the two branches are the roots of

    X^2 - (z + 2 + a) X + (z + q + 1) = 0,

so their product is z+q+1 for every a and (lambda^+ - 1)(lambda^- - 1) = q - a.
"""

from __future__ import annotations

import cmath
import logging
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from enum import StrEnum
from typing import TYPE_CHECKING, NamedTuple

from tutteatlas.errors import (
    InvalidRangeError,
    NoUniqueDominantError,
    RealAxisError,
    ValidationError,
    ZeroOfPartitionError,
)
from tutteatlas.exact_poly import ComplexPoint

if TYPE_CHECKING:
    from tutteatlas.graph_families import SpectralForm

logger = logging.getLogger(__name__)

DEFAULT_TIE_TOLERANCE = 1e-9

# ln(1e-300): below this |f_n| counts as a zero of the partition function
_LOG_ZERO_THRESHOLD = -300 * math.log(10)


class Branch(StrEnum):
    PLUS = "+"
    MINUS = "-"

    @property
    def opposite(self) -> Branch:
        return Branch.MINUS if self is Branch.PLUS else Branch.PLUS


@dataclass(frozen=True)
class EigenPair:
    a: float
    q: float
    z: ComplexPoint
    lambda_plus: ComplexPoint
    lambda_minus: ComplexPoint
    n_sign: int
    p_sign: int

    @property
    def roots(self) -> tuple[complex, complex]:
        return self.lambda_plus, self.lambda_minus

    def value(self, branch: Branch) -> complex:
        return self.lambda_plus if branch is Branch.PLUS else self.lambda_minus


def _check_parameters(a: float, q: float) -> None:
    if not q > 1:
        raise InvalidRangeError(f"q must be > 1, got {q}")
    if not 0 <= a <= q:
        raise InvalidRangeError(f"a must lie in [0, q] = [0, {q}], got {a}")


def _sign_selectors(a: float, z: complex) -> tuple[int, int]:
    return (0 if a + z.real > 0 else 1), (0 if z.imag > 0 else 1)


def _principal_roots(a: float, q: float, z: complex) -> tuple[complex, complex]:
    total = z + 2 + a
    product = z + q + 1
    root = cmath.sqrt((z + a) ** 2 - 4 * (q - a))
    plus = (total + root) / 2
    minus = (total - root) / 2
    # recover the smaller root from the product to avoid cancellation
    if abs(plus) >= abs(minus):
        if plus != 0:
            minus = product / plus
    elif minus != 0:
        plus = product / minus
    return plus, minus


def eigen_pair(a: float, q: float, z: ComplexPoint) -> EigenPair:
    """Both roots by the quadratic formula with the principal square root."""
    _check_parameters(a, q)
    z = complex(z)
    plus, minus = _principal_roots(a, q, z)
    n_sign, p_sign = _sign_selectors(a, z)
    return EigenPair(a, q, z, plus, minus, n_sign, p_sign)


def eigen_explicit(a: float, q: float, z: ComplexPoint) -> EigenPair:
    """Real and imaginary parts of both roots from A, B and the sign selectors.

    With c + id = z, A = (a+c)^2 - d^2 - 4(q-a) and B = sqrt(A^2 + 4d^2(a+c)^2):

        lambda^+- = (a+c+2 +- (-1)^n V)/2 + i (d +- (-1)^p U)/2,

    V = sqrt((A+B)/2), U = sqrt((B-A)/2), n = 0 iff a+c > 0, p = 0 iff d > 0.
    """
    _check_parameters(a, q)
    z = complex(z)
    c, d = z.real, z.imag
    if d == 0:
        raise RealAxisError(f"explicit eigenvalue formulas need Im(z) != 0, got z={z}")
    s = a + c
    big_a = s * s - d * d - 4 * (q - a)
    big_b = math.hypot(big_a, 2 * d * s)
    # U * V = |d (a+c)|; take the square root that does not cancel
    uv = abs(d * s)
    if big_a >= 0:
        v_part = math.sqrt((big_a + big_b) / 2)
        u_part = uv / v_part if v_part else 0.0
    else:
        u_part = math.sqrt((big_b - big_a) / 2)
        v_part = uv / u_part
    n_sign, p_sign = _sign_selectors(a, z)
    real_root = (-1) ** n_sign * v_part
    imag_root = (-1) ** p_sign * u_part
    plus = complex((s + 2 + real_root) / 2, (d + imag_root) / 2)
    minus = complex((s + 2 - real_root) / 2, (d - imag_root) / 2)
    return EigenPair(a, q, z, plus, minus, n_sign, p_sign)


def branch_value(a: float, q: float, z: ComplexPoint, branch: Branch) -> complex:
    """lambda_a^branch(z), with lambda_q^+ = z+q+1 and lambda_q^- = 1 fixed for a = q."""
    if a == q:
        return complex(z) + q + 1 if branch is Branch.PLUS else 1 + 0j
    return eigen_pair(a, q, z).value(branch)


class DominantBranch(NamedTuple):
    branch: Branch
    value: complex
    tied: bool


def _relatively_tied(m1: float, m2: float, tolerance: float) -> bool:
    scale = max(m1, m2)
    return scale == 0 or abs(m1 - m2) <= tolerance * scale


def dominant(
    a: float, q: float, z: ComplexPoint, tie_tolerance: float = DEFAULT_TIE_TOLERANCE
) -> DominantBranch:
    """The larger-magnitude branch and whether the two magnitudes tie."""
    plus = branch_value(a, q, z, Branch.PLUS)
    minus = branch_value(a, q, z, Branch.MINUS)
    tied = _relatively_tied(abs(plus), abs(minus), tie_tolerance)
    if abs(minus) > abs(plus):
        return DominantBranch(Branch.MINUS, minus, tied)
    return DominantBranch(Branch.PLUS, plus, tied)


class DominanceTerm(NamedTuple):
    a: float
    branch: Branch
    nonzero: bool = True


class VerdictKind(StrEnum):
    UNIQUE_DOMINANT = "unique"
    DEGENERATE = "degenerate"


@dataclass(frozen=True)
class DominanceVerdict:
    """Unique dominant term index or the set of tied indices, plus the relative gap."""

    kind: VerdictKind
    indices: tuple[int, ...]
    margin: float

    @property
    def is_unique(self) -> bool:
        return self.kind is VerdictKind.UNIQUE_DOMINANT

    @property
    def index(self) -> int:
        if not self.is_unique:
            raise NoUniqueDominantError(f"degenerate dominance among terms {self.indices}")
        return self.indices[0]


def classify_dominance(
    z: ComplexPoint,
    terms: Sequence[DominanceTerm | tuple[float, Branch, bool]],
    q: float,
    tie_tolerance: float = DEFAULT_TIE_TOLERANCE,
) -> DominanceVerdict:
    """Rank |lambda| over the terms flagged non-zero; indices refer to ``terms``."""
    magnitudes: dict[int, float] = {}
    for k, raw in enumerate(terms):
        term = DominanceTerm(*raw)
        if term.nonzero:
            magnitudes[k] = abs(branch_value(term.a, q, z, Branch(term.branch)))
    if not magnitudes:
        raise ValidationError("dominance needs at least one term with a non-zero coefficient")

    ranked = sorted(magnitudes.items(), key=lambda item: item[1], reverse=True)
    top = ranked[0][1]
    if len(ranked) == 1:
        margin = math.inf
    elif top == 0:
        margin = 0.0
    else:
        margin = (top - ranked[1][1]) / top

    if margin > tie_tolerance:
        return DominanceVerdict(VerdictKind.UNIQUE_DOMINANT, (ranked[0][0],), margin)
    tied = tuple(sorted(k for k, m in ranked if _relatively_tied(top, m, tie_tolerance)))
    return DominanceVerdict(VerdictKind.DEGENERATE, tied, margin)


@dataclass(frozen=True)
class DominanceReport:
    """Dominance among represented terms and among every branch of every pair."""

    represented: DominanceVerdict
    represented_terms: tuple[DominanceTerm, ...]
    all_pairs: DominanceVerdict
    all_pair_terms: tuple[DominanceTerm, ...]

    @property
    def readings_disagree(self) -> bool:
        """True when the two readings pick different dominant eigenvalues."""
        if self.represented.is_unique != self.all_pairs.is_unique:
            return True
        if not self.represented.is_unique:
            return False
        chosen = self.represented_terms[self.represented.index]
        other = self.all_pair_terms[self.all_pairs.index]
        return (chosen.a, chosen.branch) != (other.a, other.branch)


def dominance_report(
    form: SpectralForm, z: ComplexPoint, tie_tolerance: float = DEFAULT_TIE_TOLERANCE
) -> DominanceReport:
    coefficients = form.coefficients(z)
    scale = max((abs(c) for c in coefficients), default=0.0)
    represented = tuple(
        DominanceTerm(t.a, t.branch, abs(c) > 1e-15 * max(scale, 1.0))
        for t, c in zip(form.terms, coefficients, strict=True)
    )
    a_values = sorted({t.a for t in form.terms})
    all_pairs = tuple(DominanceTerm(a, b) for a in a_values for b in Branch)
    return DominanceReport(
        represented=classify_dominance(z, represented, form.q, tie_tolerance),
        represented_terms=represented,
        all_pairs=classify_dominance(z, all_pairs, form.q, tie_tolerance),
        all_pair_terms=all_pairs,
    )


class RegionKind(StrEnum):
    IN_RIGHT_REGION = "right"
    IN_LEFT_REGION = "left"
    EXCLUDED = "excluded"


def theorem3_region_check(z: ComplexPoint, a_l: float, a_u: float, q: float) -> RegionKind:
    """Which of the two dominance regions contains z.

    Right: Re(z) > -a_l minus the real segment [-a_l, max(-a_l, -a_u + 2 sqrt(q-a_u))].
    Left: Re(z) < -a_u - 2 minus the real segment [min(-a_u-2, -a_l - 2 sqrt(q-a_l)), -a_u-2].
    """
    if not 0 <= a_l <= a_u <= q:
        raise InvalidRangeError(f"need 0 <= a_l <= a_u <= q, got {a_l}, {a_u}, {q}")
    z = complex(z)
    c, d = z.real, z.imag
    if c > -a_l:
        right_end = max(-a_l, -a_u + 2 * math.sqrt(q - a_u))
        if d == 0 and c <= right_end:
            return RegionKind.EXCLUDED
        return RegionKind.IN_RIGHT_REGION
    if c < -a_u - 2:
        left_end = min(-a_u - 2, -a_l - 2 * math.sqrt(q - a_l))
        if d == 0 and c >= left_end:
            return RegionKind.EXCLUDED
        return RegionKind.IN_LEFT_REGION
    return RegionKind.EXCLUDED


class DegeneracyKind(StrEnum):
    NONE = "none"
    SAME_PAIR = "same-pair"
    CROSS_PAIR = "cross-pair"


def degeneracy_kind(
    form: SpectralForm, z: ComplexPoint, tie_tolerance: float = DEFAULT_TIE_TOLERANCE
) -> DegeneracyKind:
    """Whether a tie of dominant terms is within one pair or between two pairs."""
    report = dominance_report(form, z, tie_tolerance)
    if report.represented.is_unique:
        return DegeneracyKind.NONE
    tied = [report.represented_terms[k] for k in report.represented.indices]
    by_a: dict[float, set[Branch]] = {}
    for term in tied:
        by_a.setdefault(term.a, set()).add(term.branch)
    if any(len(branches) == 2 for branches in by_a.values()):
        return DegeneracyKind.SAME_PAIR
    return DegeneracyKind.CROSS_PAIR


def common_segment(a_values: Iterable[float], q: float) -> tuple[float, float] | None:
    """Intersection of the real segments [-a - 2 sqrt(q-a), -a + 2 sqrt(q-a)]."""
    lo, hi = -math.inf, math.inf
    seen = False
    for a in a_values:
        _check_parameters(a, q)
        half = 2 * math.sqrt(q - a)
        lo, hi = max(lo, -a - half), min(hi, -a + half)
        seen = True
    if not seen or lo > hi:
        return None
    return lo, hi


def isolated_zero_candidates(
    form: SpectralForm,
    points: Iterable[ComplexPoint],
    tie_tolerance: float = DEFAULT_TIE_TOLERANCE,
    coefficient_tolerance: float = 1e-9,
) -> list[complex]:
    """Points with a unique dominant term whose coefficient vanishes there."""
    candidates = []
    for z in points:
        coefficients = form.coefficients(z)
        terms = [DominanceTerm(t.a, t.branch, not t.is_vanishing) for t in form.terms]
        verdict = classify_dominance(z, terms, form.q, tie_tolerance)
        if not verdict.is_unique:
            continue
        scale = max(abs(c) for c in coefficients) or 1.0
        if abs(coefficients[verdict.index]) <= coefficient_tolerance * scale:
            candidates.append(complex(z))
    return candidates


# ---------------------------------------------------------------------------
# Pressure


def pressure(form: SpectralForm, n: int, z: ComplexPoint) -> complex:
    """p_n(z) = Log(f_n(z)) / n on the principal branch."""
    if n < 1:
        raise ValidationError(f"pressure needs n >= 1, got {n}")
    log_value = form.log_evaluate(n, z)
    if log_value.real < _LOG_ZERO_THRESHOLD:
        raise ZeroOfPartitionError(f"|f_{n}(z)| < 1e-300 at z={z}")
    return log_value / n


def pressure_limit(
    form: SpectralForm, z: ComplexPoint, tie_tolerance: float = DEFAULT_TIE_TOLERANCE
) -> complex:
    """Log of the unique dominant represented eigenvalue."""
    report = dominance_report(form, z, tie_tolerance)
    if not report.represented.is_unique:
        raise NoUniqueDominantError(
            f"no unique dominant eigenvalue at z={z} (margin {report.represented.margin:.3g})"
        )
    term = report.represented_terms[report.represented.index]
    value = branch_value(term.a, form.q, z, term.branch)
    if value == 0:
        raise ZeroOfPartitionError(f"dominant eigenvalue vanishes at z={z}")
    return cmath.log(value)


def pressure_error(
    form: SpectralForm, n: int, z: ComplexPoint, tie_tolerance: float = DEFAULT_TIE_TOLERANCE
) -> float:
    """Distance between p_n(z) and its limit.

    Log(f_n)/n and Log(lambda) differ by 2 pi k / n on the imaginary axis for
    some integer k, so the imaginary difference is reduced modulo 2 pi / n.
    """
    difference = pressure(form, n, z) - pressure_limit(form, z, tie_tolerance)
    period = 2 * math.pi / n
    imaginary = math.remainder(difference.imag, period)
    return math.hypot(difference.real, imaginary)


# ---------------------------------------------------------------------------
# Beraha numbers and the L_y = 2, 3 strip characteristic polynomials


def beraha_number(r: int) -> float:
    """b_r = 2 + 2 cos(2 pi / r)."""
    if r < 1:
        raise ValidationError(f"Beraha numbers need r >= 1, got {r}")
    return 2 + 2 * math.cos(2 * math.pi / r)


def beraha_parameters(strip_width: int) -> tuple[float, ...]:
    if strip_width == 2:
        b5 = beraha_number(5)
        return b5, 3 - b5
    if strip_width == 3:
        b7 = beraha_number(7)
        return b7, 2 - math.sqrt(b7), 3 - b7 + math.sqrt(b7)
    raise ValidationError(f"strip width must be 2 or 3, got {strip_width}")


def strip_characteristic_coefficients(strip_width: int, x: complex, y: complex) -> list[complex]:
    """Coefficients, highest power first, of the strip characteristic polynomial.

    The width-3 lambda^3 coefficient carries the constant term 1; without it the
    sextic does not factor over the three Beraha parameters.
    """
    s, p = x + y, x * y
    squares = x * x + y * y
    if strip_width == 2:
        return [1, -(2 * s + 3), squares + 3 * s + 4 * p + 1, -p * (2 * s + 3), p * p]
    if strip_width == 3:
        quartic = 3 * squares + 10 * s + 9 * p + 6
        cubic = x**3 + y**3 + 5 * squares + 9 * p * s + 20 * p + 6 * s + 1
        return [1, -(3 * s + 5), quartic, -cubic, p * quartic, -p * p * (3 * s + 5), p**3]
    raise ValidationError(f"strip width must be 2 or 3, got {strip_width}")


def verify_beraha_factorization(
    strip_width: int, sample_zs: Iterable[ComplexPoint], q: float
) -> float:
    """Largest relative residual of the strip polynomial at lambda_a^+-(z).

    x and y are the a = 0 eigenvalues, i.e. the roots of t^2 - (z+2) t + (z+q+1).
    """
    if not q > 1:
        raise InvalidRangeError(f"q must be > 1, got {q}")
    parameters = beraha_parameters(strip_width)
    worst = 0.0
    for z in sample_zs:
        x, y = eigen_pair(0.0, q, z).roots
        coefficients = strip_characteristic_coefficients(strip_width, x, y)
        for a in parameters:
            # the Beraha parameters may exceed q; the factorization does not need a <= q
            for lam in _principal_roots(a, q, complex(z)):
                value = 0j
                scale = 0.0
                for c in coefficients:
                    value = value * lam + c
                    scale = scale * abs(lam) + abs(c)
                if scale:
                    worst = max(worst, abs(value) / scale)
    logger.debug(f"strip width {strip_width} residual {worst:.3g} at q={q}")
    return worst
