"""Limiting zero sets of the families in the z-plane and the v-plane.

A limit set is a :class:`CurveSet`: a plane tag plus a tuple of pieces. Every
piece can be sampled and can report the Euclidean distance to a point.

The v-plane is related to z by z = sqrt(q) (v + 1/v); :func:`z_to_v` returns
both preimages and every v-plane construction keeps both.
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass, field
from enum import StrEnum
from typing import Protocol

import numpy as np
import numpy.typing as npt

from tutteatlas.eigen import eigen_explicit, eigen_pair
from tutteatlas.errors import InvalidRangeError, UnsupportedFamilyError
from tutteatlas.exact_poly import ComplexPoint
from tutteatlas.graph_families import FamilyId

logger = logging.getLogger(__name__)

DEFAULT_SAMPLES = 256
DEFAULT_MAX_IMAG = 50.0

ComplexArray = npt.NDArray[np.complex128]

_GOLDEN = (math.sqrt(5) - 1) / 2


class Plane(StrEnum):
    Z = "z"
    V = "v"


class Piece(Protocol):
    kind: str

    def sample(self, count: int) -> ComplexArray: ...

    def distance(self, p: ComplexPoint) -> float: ...


@dataclass(frozen=True)
class RealSegment:
    c_min: float
    c_max: float
    kind: str = field(default="segment", init=False)

    def __post_init__(self) -> None:
        if self.c_min > self.c_max:
            raise InvalidRangeError(f"segment bounds out of order: {self.c_min} > {self.c_max}")

    def sample(self, count: int) -> ComplexArray:
        return np.linspace(self.c_min, self.c_max, max(count, 2)).astype(np.complex128)

    def distance(self, p: ComplexPoint) -> float:
        p = complex(p)
        return abs(p - min(max(p.real, self.c_min), self.c_max))


@dataclass(frozen=True)
class Circle:
    center: complex
    radius: float
    kind: str = field(default="circle", init=False)

    def __post_init__(self) -> None:
        if self.radius < 0:
            raise InvalidRangeError(f"circle radius must be >= 0, got {self.radius}")

    def sample(self, count: int) -> ComplexArray:
        if self.radius == 0:
            return np.array([self.center], dtype=np.complex128)
        theta = np.linspace(0.0, 2 * math.pi, max(count, 3), endpoint=False)
        return self.center + self.radius * np.exp(1j * theta)

    def distance(self, p: ComplexPoint) -> float:
        return abs(abs(complex(p) - self.center) - self.radius)


@dataclass(frozen=True)
class Arc:
    """Arc of the circle |v| = radius for theta_min <= arg(v) <= theta_max."""

    radius: float
    theta_min: float
    theta_max: float
    kind: str = field(default="arc", init=False)

    def __post_init__(self) -> None:
        if self.radius < 0 or self.theta_min > self.theta_max:
            raise InvalidRangeError(
                f"invalid arc r={self.radius}, theta in [{self.theta_min}, {self.theta_max}]"
            )

    def sample(self, count: int) -> ComplexArray:
        theta = np.linspace(self.theta_min, self.theta_max, max(count, 2))
        return self.radius * np.exp(1j * theta)

    def distance(self, p: ComplexPoint) -> float:
        p = complex(p)
        if p != 0 and self.theta_min <= cmath.phase(p) <= self.theta_max:
            return abs(abs(p) - self.radius)
        ends = (cmath.rect(self.radius, self.theta_min), cmath.rect(self.radius, self.theta_max))
        return min(abs(p - e) for e in ends)


@dataclass(frozen=True)
class RadialSegment:
    """Points r e^{i theta} with r_min <= r <= r_max."""

    theta: float
    r_min: float
    r_max: float
    kind: str = field(default="radial", init=False)

    def __post_init__(self) -> None:
        if not 0 <= self.r_min <= self.r_max:
            raise InvalidRangeError(f"invalid radial range [{self.r_min}, {self.r_max}]")

    def sample(self, count: int) -> ComplexArray:
        # geometric spacing keeps r and 1/r images equally dense
        if self.r_min > 0:
            r = np.geomspace(self.r_min, self.r_max, max(count, 2))
        else:
            r = np.linspace(self.r_min, self.r_max, max(count, 2))
        return r * cmath.exp(1j * self.theta)

    def distance(self, p: ComplexPoint) -> float:
        direction = cmath.exp(1j * self.theta)
        t = (complex(p) * direction.conjugate()).real
        t = min(max(t, self.r_min), self.r_max)
        return abs(complex(p) - t * direction)


@dataclass(frozen=True)
class Line:
    """The vertical line Re(v) = re, sampled for |Im| <= max_imag."""

    re: float
    max_imag: float = DEFAULT_MAX_IMAG
    kind: str = field(default="line", init=False)

    def sample(self, count: int) -> ComplexArray:
        return self.re + 1j * np.linspace(-self.max_imag, self.max_imag, max(count, 2))

    def distance(self, p: ComplexPoint) -> float:
        return abs(complex(p).real - self.re)


@dataclass(frozen=True)
class PointList:
    """Sampled points; ``connected`` lists are treated as polylines for distances."""

    points: tuple[complex, ...]
    label: str = ""
    connected: bool = False
    kind: str = field(default="points", init=False)

    def sample(self, count: int) -> ComplexArray:
        return np.asarray(self.points, dtype=np.complex128)

    def distance(self, p: ComplexPoint) -> float:
        if not self.points:
            return math.inf
        pts = np.asarray(self.points, dtype=np.complex128)
        p = complex(p)
        nearest = float(np.min(np.abs(pts - p)))
        if not self.connected or len(pts) < 3:
            return nearest
        starts, chords = pts[:-1], np.diff(pts)
        lengths = np.abs(chords)
        # chords far longer than typical spacing are branch jumps, not curve
        usable = (lengths > 0) & (lengths <= 10 * np.median(lengths))
        if not usable.any():
            return nearest
        starts, chords, lengths = starts[usable], chords[usable], lengths[usable]
        t = np.clip(((p - starts) * np.conj(chords)).real / lengths**2, 0.0, 1.0)
        return min(nearest, float(np.min(np.abs(starts + t * chords - p))))


@dataclass(frozen=True)
class ParamCurve:
    """The curve d^2 = -(c+q)^2 (2c+q+4+a) / (2c+q+a) for c_min <= c <= c_max.

    It is the locus where one root of the a-pair lies on the unit circle.
    Writing that root as e^{i alpha} gives the parametrization

        z(alpha) = (e^{i alpha} - 1) - a + (q - a) / (e^{i alpha} - 1),

    with Re z = cos(alpha) - 1 - (q+a)/2, which is used for sampling. The
    curve has a vertical asymptote at c = -(q+a)/2; samples stop at |d| = d_max.
    """

    a: float
    q: float
    c_min: float
    c_max: float
    d_max: float = DEFAULT_MAX_IMAG
    kind: str = field(default="param", init=False)

    def __post_init__(self) -> None:
        if not 0 <= self.a < self.q:
            raise InvalidRangeError(f"cross curve needs 0 <= a < q, got a={self.a}, q={self.q}")
        if self.c_min > self.c_max:
            raise InvalidRangeError(f"curve bounds out of order: {self.c_min} > {self.c_max}")

    def radicand(self, c: float) -> float:
        denominator = 2 * c + self.q + self.a
        if denominator == 0:
            return math.inf
        return -((c + self.q) ** 2) * (2 * c + self.q + 4 + self.a) / denominator

    @property
    def valid_interval(self) -> tuple[float, float] | None:
        """Part of [c_min, c_max] where the radicand is non-negative."""
        lo = max(self.c_min, -(self.q + 4 + self.a) / 2)
        hi = min(self.c_max, -(self.q + self.a) / 2)
        return (lo, hi) if lo <= hi else None

    def point(self, alpha: float) -> complex:
        w = cmath.exp(1j * alpha) - 1
        return w - self.a + (self.q - self.a) / w

    def _points(self, alphas: npt.NDArray[np.float64]) -> ComplexArray:
        w = np.exp(1j * alphas) - 1
        return w - self.a + (self.q - self.a) / w

    def _alpha_for_c(self, c: float) -> float:
        u = c + (self.q + self.a) / 2 + 1
        return math.acos(min(max(u, -1.0), 1.0))

    def _alpha_range(self, capped: bool) -> tuple[float, float] | None:
        valid = self.valid_interval
        if valid is None:
            return None
        lo = self._alpha_for_c(valid[1])
        hi = self._alpha_for_c(valid[0])
        floor = self._alpha_cap() if capped else 1e-9
        lo = max(lo, floor)
        return (lo, hi) if lo <= hi else None

    def _alpha_cap(self) -> float:
        """Smallest alpha near the asymptote with |Im z| <= d_max."""
        # |Im z| behaves like (q - a) / alpha as alpha -> 0
        alphas = np.geomspace(1e-12, math.pi, 2048)
        heights = np.abs(self._points(alphas).imag)
        below = np.nonzero(heights <= self.d_max)[0]
        if len(below) == 0:
            return math.pi
        k = int(below[0])
        if k == 0:
            return float(alphas[0])
        lo, hi = float(alphas[k - 1]), float(alphas[k])
        for _ in range(60):
            mid = (lo + hi) / 2
            if abs(self.point(mid).imag) > self.d_max:
                lo = mid
            else:
                hi = mid
        return hi

    def sample(self, count: int) -> ComplexArray:
        """Upper branch, then the mirrored lower branch, refined where chords are long or bent."""
        bounds = self._alpha_range(capped=True)
        if bounds is None:
            return np.empty(0, dtype=np.complex128)
        half = max(count // 2, 4)
        alphas = np.linspace(bounds[0], bounds[1], half)
        for _ in range(12):
            points = self._points(alphas)
            steps = np.abs(np.diff(points))
            limit = steps.sum() / half
            turning = np.zeros_like(steps)
            if len(points) > 2:
                chords = np.diff(points)
                angles = np.abs(np.angle(chords[1:] / np.where(chords[:-1] == 0, 1, chords[:-1])))
                turning[1:] = angles
            refine = (steps > limit) | (turning > 0.1)
            if not refine.any():
                break
            midpoints = (alphas[:-1] + alphas[1:])[refine] / 2
            alphas = np.sort(np.concatenate([alphas, midpoints]))
        upper = self._points(alphas)
        return np.concatenate([upper, np.conj(upper[::-1])])

    def distance(self, p: ComplexPoint, tolerance: float = 1e-8) -> float:
        """Grid search plus golden-section polish, doubling the grid until stable."""
        bounds = self._alpha_range(capped=False)
        if bounds is None:
            return math.inf
        p = complex(p)
        previous = math.inf
        grid = 1024
        best = math.inf
        for _ in range(6):
            uniform = np.linspace(bounds[0], bounds[1], grid)
            near_asymptote = np.geomspace(bounds[0], max(bounds[1], bounds[0] * 1.0001), grid)
            alphas = np.unique(np.concatenate([uniform, near_asymptote]))
            candidates = []
            # the lower branch mirrors the upper one
            for point in (p, p.conjugate()):
                distances = np.abs(self._points(alphas) - point)
                k = int(np.argmin(distances))
                lo = alphas[max(k - 1, 0)]
                hi = alphas[min(k + 1, len(alphas) - 1)]
                candidates.append(self._golden(point, lo, hi))
            best = min(candidates)
            if abs(previous - best) < tolerance:
                break
            previous = best
            grid *= 2
        return best

    def _golden(self, p: complex, lo: float, hi: float) -> float:
        a, b = lo, hi
        x1 = b - _GOLDEN * (b - a)
        x2 = a + _GOLDEN * (b - a)
        f1, f2 = abs(self.point(x1) - p), abs(self.point(x2) - p)
        for _ in range(100):
            if b - a < 1e-15:
                break
            if f1 < f2:
                b, x2, f2 = x2, x1, f1
                x1 = b - _GOLDEN * (b - a)
                f1 = abs(self.point(x1) - p)
            else:
                a, x1, f1 = x1, x2, f2
                x2 = a + _GOLDEN * (b - a)
                f2 = abs(self.point(x2) - p)
        return min(f1, f2, abs(self.point(lo) - p), abs(self.point(hi) - p))


@dataclass(frozen=True)
class CurveSet:
    plane: Plane
    pieces: tuple[Piece, ...]
    regime: str = ""

    def __add__(self, other: CurveSet) -> CurveSet:
        if other.plane is not self.plane:
            raise InvalidRangeError(f"cannot merge {self.plane}-plane and {other.plane}-plane sets")
        regime = " + ".join(r for r in (self.regime, other.regime) if r)
        return CurveSet(self.plane, self.pieces + other.pieces, regime)

    def sample(self, count: int = DEFAULT_SAMPLES) -> list[tuple[int, ComplexArray]]:
        return [(k, piece.sample(count)) for k, piece in enumerate(self.pieces)]

    def points(self, count: int = DEFAULT_SAMPLES) -> ComplexArray:
        chunks = [points for _, points in self.sample(count)]
        if not chunks:
            return np.empty(0, dtype=np.complex128)
        return np.concatenate(chunks)

    def distance(self, p: ComplexPoint) -> float:
        return curve_distance(p, self)


def curve_distance(p: ComplexPoint, curves: CurveSet) -> float:
    """Smallest distance from p to any piece; inf for an empty set."""
    return min((piece.distance(p) for piece in curves.pieces), default=math.inf)


# ---------------------------------------------------------------------------
# z-plane degeneration curves


def pair_degeneration_curve(a: float, q: float) -> CurveSet:
    """Where |lambda_a^+| = |lambda_a^-|: a real segment, plus a circle when a >= q - 1."""
    if not 0 <= a <= q:
        raise InvalidRangeError(f"a must lie in [0, q], got a={a}, q={q}")
    half = 2 * math.sqrt(q - a)
    pieces: list[Piece] = [RealSegment(-a - half, -a + half)]
    if a >= q - 1:
        pieces.append(Circle(complex(-q - 1, 0), 1 - q + a))
    return CurveSet(Plane.Z, tuple(pieces), "segment+circle" if len(pieces) == 2 else "segment")


def cross_degeneration_curve(
    a: float, q: float, d_max: float = DEFAULT_MAX_IMAG
) -> CurveSet:
    """Where one root of the a-pair has modulus 1 and the other |z+q+1|."""
    curve = ParamCurve(a, q, -(q + 4 + a) / 2, -(q + a) / 2, d_max)
    return CurveSet(Plane.Z, (curve,), "cross")


# ---------------------------------------------------------------------------
# The map to the v-plane


def z_to_v(z: ComplexPoint, q: float) -> tuple[complex, complex]:
    """Both solutions of sqrt(q) (v + 1/v) = z; their product is 1."""
    if not q > 0:
        raise InvalidRangeError(f"q must be > 0, got {q}")
    z = complex(z)
    root_q = math.sqrt(q)
    root = cmath.sqrt(z * z - 4 * q)
    v1 = (z + root) / (2 * root_q)
    v2 = (z - root) / (2 * root_q)
    if abs(v1) >= abs(v2):
        v2 = 1 / v1
    else:
        v1 = 1 / v2
    return v1, v2


def v_to_z(v: ComplexPoint, q: float) -> complex:
    v = complex(v)
    return math.sqrt(q) * (v + 1 / v)


def _radial_root(w: float) -> float:
    """The root r >= 1 of r + 1/r = w, for w >= 2."""
    return (w + math.sqrt(max(w * w - 4, 0.0))) / 2


def _radial_pieces(theta: float, lo: float, hi: float) -> list[Piece]:
    """r and 1/r for r + 1/r in [lo, hi], lo >= 2."""
    r_lo, r_hi = _radial_root(lo), _radial_root(hi)
    if lo <= 2:
        return [RadialSegment(theta, 1 / r_hi, r_hi)]
    return [RadialSegment(theta, 1 / r_hi, 1 / r_lo), RadialSegment(theta, r_lo, r_hi)]


def real_segment_image(c_min: float, c_max: float, q: float) -> CurveSet:
    """F-image of the real segment [c_min, c_max].

    With w = c / sqrt(q) = v + 1/v, the part |w| <= 2 lands on the unit circle
    at 2 cos(theta) = w (with conjugates); w <= -2 lands on the negative real
    axis and w >= 2 on the positive real axis.
    """
    g, h = c_min / math.sqrt(q), c_max / math.sqrt(q)
    pieces: list[Piece] = []
    labels = []

    lo, hi = max(g, -2.0), min(h, 2.0)
    if lo <= hi:
        theta_lo, theta_hi = math.acos(hi / 2), math.acos(lo / 2)
        pieces += [Arc(1.0, theta_lo, theta_hi), Arc(1.0, -theta_hi, -theta_lo)]
        labels.append("arc")
    if g <= -2:
        pieces += _radial_pieces(math.pi, max(-h, 2.0), -g)
        labels.append("radial")
    if h >= 2:
        pieces += _radial_pieces(0.0, max(g, 2.0), h)
        labels.append("radial+")
    return CurveSet(Plane.V, tuple(pieces), "+".join(labels))


def segment_image_in_v(a: float, q: float) -> CurveSet:
    """F-image of [g(a) sqrt(q), h(a) sqrt(q)], g, h = -a/sqrt(q) -+ 2 sqrt(1 - a/q).

    The case split on a against 4(sqrt(q) - 1) and on q against 4 follows from
    where g and h sit relative to -2.
    """
    if not 0 <= a <= q or q < 1:
        raise InvalidRangeError(f"need q >= 1 and 0 <= a <= q, got a={a}, q={q}")
    half = 2 * math.sqrt(q - a)
    image = real_segment_image(-a - half, -a + half, q)
    logger.debug(f"segment image a={a}, q={q}: {image.regime}")
    return image


def _v_pair_from_z(z: complex, q: float) -> tuple[complex, complex]:
    """v = (lambda_0 - 1)/sqrt(q) for both roots of the a = 0 pair, i.e. (x-1)/sqrt(q)."""
    pair = eigen_explicit(0.0, q, z) if z.imag != 0 else eigen_pair(0.0, q, z)
    root_q = math.sqrt(q)
    return (pair.lambda_plus - 1) / root_q, (pair.lambda_minus - 1) / root_q


def circle_image_in_v(a: float, q: float, samples: int = DEFAULT_SAMPLES) -> CurveSet:
    """Both F-branches of the circle C((-q-1, 0), 1-q+a), as point lists."""
    if not q - 1 <= a <= q:
        raise InvalidRangeError(f"circle exists only for a in [q-1, q], got a={a}, q={q}")
    circle = Circle(complex(-q - 1, 0), 1 - q + a)
    plus, minus = [], []
    for z in circle.sample(samples):
        v1, v2 = _v_pair_from_z(complex(z), q)
        plus.append(v1)
        minus.append(v2)
    return CurveSet(
        Plane.V,
        (
            PointList(tuple(plus), "branch+", connected=True),
            PointList(tuple(minus), "branch-", connected=True),
        ),
        "circle-image",
    )


def image_in_v(curves: CurveSet, q: float, samples: int = DEFAULT_SAMPLES) -> CurveSet:
    """Pointwise F-image of a z-plane set, both branches kept."""
    pieces: list[Piece] = []
    for k, points in curves.sample(samples):
        pairs = [z_to_v(z, q) for z in points]
        pieces.append(PointList(tuple(p[0] for p in pairs), f"piece{k}+", connected=True))
        pieces.append(PointList(tuple(p[1] for p in pairs), f"piece{k}-", connected=True))
    return CurveSet(Plane.V, tuple(pieces), "image")


# ---------------------------------------------------------------------------
# Family limit sets


def _triangle_strip_set(q: float, plane: Plane, samples: int) -> CurveSet:
    z_set = pair_degeneration_curve(1.0, q)
    if plane is Plane.Z:
        return z_set
    image = segment_image_in_v(1.0, q)
    if q <= 2:
        image = image + circle_image_in_v(1.0, q, samples)
    return image


def _wheel_set(q: float, plane: Plane, samples: int, d_max: float) -> CurveSet:
    upper = -1 + 2 * math.sqrt(q - 1)
    if q > 5 or q == 2:
        # nothing competes with the a = 1 pair: at q = 2 the lambda_q term vanishes
        lower = -1 - 2 * math.sqrt(q - 1)
        curve = None
    else:
        # the a = 1 pair only dominates the constant term for Re(z) >= -q
        lower = -q
        curve = ParamCurve(1.0, q, -(q + 5) / 2, -q, d_max) if q < 5 else None

    if plane is Plane.Z:
        result = CurveSet(Plane.Z, (RealSegment(lower, upper),), "segment")
        if curve is not None:
            result = result + CurveSet(Plane.Z, (curve,), "cross")
        return result

    result = real_segment_image(lower, upper, q)
    if curve is not None:
        result = result + image_in_v(CurveSet(Plane.Z, (curve,)), q, samples)
    return result


def _cycle_multi_set(q: float, plane: Plane, d_max: float) -> CurveSet:
    if plane is Plane.Z:
        return cross_degeneration_curve(0.0, q, d_max)
    root_q = math.sqrt(q)
    return CurveSet(
        Plane.V,
        (Line(-root_q / 2, d_max), Circle(complex(-1 / root_q, 0), 1 / root_q)),
        "line+circle",
    )


def family_limit_set(
    family: FamilyId,
    q: float,
    plane: Plane | str,
    samples: int = DEFAULT_SAMPLES,
    d_max: float = DEFAULT_MAX_IMAG,
) -> CurveSet:
    """Accumulation set of the family's zeros as n grows."""
    family = FamilyId(family)
    plane = Plane(plane)
    if not q > 1:
        raise InvalidRangeError(f"limit sets need q > 1, got {q}")
    if family is FamilyId.TRIANGLE_STRIP:
        result = _triangle_strip_set(q, plane, samples)
    elif family is FamilyId.WHEEL:
        result = _wheel_set(q, plane, samples, d_max)
    elif family is FamilyId.CYCLE_MULTI:
        result = _cycle_multi_set(q, plane, d_max)
    else:
        raise UnsupportedFamilyError("the counterexample graph has no limit set")
    logger.info(f"{family} limit set at q={q} in the {plane}-plane: {result.regime}")
    return result
