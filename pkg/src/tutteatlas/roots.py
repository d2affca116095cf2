"""Zeros of the finite-n family polynomials and their distance to the limit sets."""

from __future__ import annotations

import asyncio
import logging
import math
import os
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import numpy.typing as npt

from tutteatlas.errors import (
    ComputationError,
    NoConvergenceError,
    UnsupportedFamilyError,
    ValidationError,
)
from tutteatlas.exact_poly import Rational, ZPoly
from tutteatlas.graph_families import FamilyId, family_zpoly, spectral_form
from tutteatlas.limit_sets import (
    DEFAULT_MAX_IMAG,
    CurveSet,
    Plane,
    curve_distance,
    family_limit_set,
    z_to_v,
)

logger = logging.getLogger(__name__)

DEFAULT_MAX_SWEEPS = 1000
DEFAULT_CLUSTER_TOLERANCE = 1e-7
RESIDUAL_BOUND = 1e-8

_GOLDEN_ANGLE = math.pi * (3 - math.sqrt(5))
_EPS = float(np.finfo(float).eps)

NewtonRatio = Callable[[complex], complex]


@dataclass(frozen=True)
class RootSet:
    """Roots with their relative residuals and cluster multiplicities."""

    polynomial_degree: int
    roots: tuple[complex, ...]
    residuals: tuple[float, ...]
    multiplicities: tuple[int, ...]
    converged: bool = True
    sweeps: int = 0

    def __len__(self) -> int:
        return len(self.roots)

    @property
    def max_residual(self) -> float:
        return max(self.residuals, default=0.0)

    def raise_for_convergence(self) -> None:
        """Raise NoConvergenceError carrying this set when the sweep cap was hit
        or a polished residual is above RESIDUAL_BOUND."""
        if not self.converged:
            raise NoConvergenceError(
                f"root iteration for degree {self.polynomial_degree} stopped after "
                f"{self.sweeps} sweeps (max residual {self.max_residual:.3g})",
                partial=self,
            )

    def real_roots(self, tolerance: float = 1e-9) -> list[complex]:
        return [r for r in self.roots if abs(r.imag) <= tolerance * max(1.0, abs(r))]


def _scaled_coefficients(p: ZPoly) -> npt.NDArray[np.float64]:
    """Coefficients divided by the largest magnitude, highest power first."""
    scale = max(abs(c) for c in p.coeffs)
    return np.array([float(c / scale) for c in reversed(p.coeffs)], dtype=np.float64)


def _horner_ratio(
    coeffs: npt.NDArray[np.float64], z: npt.NDArray[np.complex128]
) -> tuple[npt.NDArray[np.complex128], npt.NDArray[np.float64]]:
    """p/p' and the relative residual |p| / sum |a_k||z|^k at every point.

    Points outside the unit disc use the reversed polynomial so no power of z
    is ever formed.
    """
    n = len(coeffs) - 1
    inside = np.abs(z) <= 1
    w = np.where(inside, z, 1 / np.where(z == 0, 1, z))
    ordered_in = coeffs
    ordered_out = coeffs[::-1]

    value = np.zeros_like(z)
    derivative = np.zeros_like(z)
    magnitude = np.zeros(z.shape, dtype=np.float64)
    abs_w = np.abs(w)
    for k in range(n + 1):
        c = np.where(inside, ordered_in[k], ordered_out[k])
        derivative = derivative * w + value
        value = value * w + c
        magnitude = magnitude * abs_w + np.abs(c)

    residual = np.abs(value) / np.where(magnitude == 0, 1, magnitude)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio_in = value / derivative
        # p(z) = z^n r(1/z)  =>  p/p' = z r / (n r - w r')
        ratio_out = z * value / (n * value - w * derivative)
    ratio = np.where(inside, ratio_in, ratio_out)
    ratio = np.where(value == 0, 0, ratio)
    return ratio, residual


def _initial_guesses(
    coeffs: npt.NDArray[np.float64], rng: np.random.Generator
) -> npt.NDArray[np.complex128]:
    """Golden-angle points on a circle with small radial jitter.

    The radius is the geometric mean of the root moduli, |a_0/a_n|^(1/n),
    capped by the Cauchy bound.
    """
    n = len(coeffs) - 1
    leading, constant = abs(coeffs[0]), abs(coeffs[-1])
    cauchy = 1 + float(np.max(np.abs(coeffs[1:]))) / leading
    radius = (constant / leading) ** (1 / n) if constant else 1.0
    radius = min(max(radius, 1e-3), cauchy)
    k = np.arange(n)
    jitter = 1 + 1e-3 * rng.uniform(-1.0, 1.0, n)
    return radius * jitter * np.exp(1j * (k * _GOLDEN_ANGLE + 0.25))


def _cluster_multiplicities(roots: Sequence[complex], tolerance: float) -> tuple[int, ...]:
    parent = list(range(len(roots)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(len(roots)):
        for j in range(i + 1, len(roots)):
            if abs(roots[i] - roots[j]) <= tolerance:
                parent[find(i)] = find(j)
    sizes: dict[int, int] = {}
    for i in range(len(roots)):
        sizes[find(i)] = sizes.get(find(i), 0) + 1
    return tuple(sizes[find(i)] for i in range(len(roots)))


def find_roots(
    p: ZPoly,
    max_sweeps: int = DEFAULT_MAX_SWEEPS,
    cluster_tolerance: float = DEFAULT_CLUSTER_TOLERANCE,
    seed: int | None = None,
    evaluator: NewtonRatio | None = None,
) -> RootSet:
    """All complex roots by Aberth-Ehrlich simultaneous iteration.

    ``evaluator`` optionally supplies p(z)/p'(z) from a better-conditioned
    representation than the expanded coefficients; points where it fails fall
    back to Horner's scheme.
    """
    if p.degree < 1:
        raise ValidationError(f"root finding needs degree >= 1, got {p.degree}")

    degree = p.degree
    zero_roots = next(k for k, c in enumerate(p.coeffs) if c != 0)
    reduced = ZPoly(p.coeffs[zero_roots:])
    coeffs = _scaled_coefficients(reduced)
    if not np.all(np.isfinite(coeffs)):
        raise ComputationError("coefficients are not finite after scaling")

    roots: npt.NDArray[np.complex128] = np.empty(0, dtype=np.complex128)
    converged = True
    sweeps = 0
    if reduced.degree >= 1:
        rng = np.random.default_rng(seed)
        roots = _initial_guesses(coeffs, rng)
        # the evaluator describes p itself, not p with its zero roots divided out
        ratio_source = evaluator if zero_roots == 0 else None
        roots, converged, sweeps = _aberth(coeffs, roots, max_sweeps, ratio_source)
        roots = _polish(coeffs, roots)

    all_roots = np.concatenate([roots, np.zeros(zero_roots, dtype=np.complex128)])
    full = _scaled_coefficients(p)
    _, residuals = _horner_ratio(full, all_roots)
    root_list = tuple(complex(r) for r in all_roots)
    within_bound = bool(np.all(residuals <= RESIDUAL_BOUND))
    result = RootSet(
        polynomial_degree=degree,
        roots=root_list,
        residuals=tuple(float(r) for r in residuals),
        multiplicities=_cluster_multiplicities(root_list, cluster_tolerance),
        converged=converged and within_bound,
        sweeps=sweeps,
    )
    if converged and not within_bound:
        logger.warning(
            f"degree {degree}: iteration settled after {sweeps} sweeps but max residual "
            f"{result.max_residual:.3g} exceeds {RESIDUAL_BOUND:g}"
        )
    elif not converged:
        logger.warning(
            f"degree {degree}: no convergence after {sweeps} sweeps, "
            f"max residual {result.max_residual:.3g}"
        )
    else:
        logger.debug(f"degree {degree}: converged in {sweeps} sweeps")
    return result


def _newton_ratios(
    coeffs: npt.NDArray[np.float64],
    z: npt.NDArray[np.complex128],
    evaluator: NewtonRatio | None,
) -> tuple[npt.NDArray[np.complex128], npt.NDArray[np.float64]]:
    ratio, residual = _horner_ratio(coeffs, z)
    if evaluator is None:
        return ratio, residual
    for i, point in enumerate(z):
        try:
            value = evaluator(complex(point))
        except ArithmeticError:
            continue
        if np.isfinite(value):
            ratio[i] = value
    return ratio, residual


def _aberth(
    coeffs: npt.NDArray[np.float64],
    roots: npt.NDArray[np.complex128],
    max_sweeps: int,
    evaluator: NewtonRatio | None,
) -> tuple[npt.NDArray[np.complex128], bool, int]:
    n = len(roots)
    active = np.ones(n, dtype=bool)
    floor = 4 * _EPS * n
    for sweep in range(1, max_sweeps + 1):
        ratio, residual = _newton_ratios(coeffs, roots, evaluator)
        diff = roots[:, None] - roots[None, :]
        np.fill_diagonal(diff, 1)
        inverse = 1 / diff
        np.fill_diagonal(inverse, 0)
        sums = inverse.sum(axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            delta = ratio / (1 - ratio * sums)
        delta = np.where(np.isfinite(delta), delta, ratio)
        delta = np.where(np.isfinite(delta), delta, 0)
        delta = np.where(active, delta, 0)
        roots = roots - delta

        small = np.abs(delta) <= 1e-14 * np.maximum(1.0, np.abs(roots))
        active &= ~(small | (residual <= floor))
        if not active.any():
            return roots, True, sweep
    return roots, False, max_sweeps


def _polish(
    coeffs: npt.NDArray[np.float64], roots: npt.NDArray[np.complex128], steps: int = 3
) -> npt.NDArray[np.complex128]:
    """A few Newton steps, each kept only where it lowers the residual."""
    _, residual = _horner_ratio(coeffs, roots)
    for _ in range(steps):
        ratio, _ = _horner_ratio(coeffs, roots)
        candidate = roots - np.where(np.isfinite(ratio), ratio, 0)
        _, new_residual = _horner_ratio(coeffs, candidate)
        better = new_residual < residual
        roots = np.where(better, candidate, roots)
        residual = np.where(better, new_residual, residual)
    return roots


def roots_in_v(rs: RootSet, q: float, positive_re: bool = False) -> list[complex]:
    """Both v-preimages of every root, optionally keeping only Re(v) > 0."""
    values = [v for z in rs.roots for v in z_to_v(z, q)]
    if positive_re:
        values = [v for v in values if v.real > 0]
    return values


# ---------------------------------------------------------------------------
# Convergence toward the limit sets


@dataclass(frozen=True)
class ConvergenceRow:
    n: int
    root_count: int
    max_distance: float
    mean_distance: float
    converged: bool
    isolated: tuple[complex, ...] = ()
    outside: int = 0


@dataclass(frozen=True)
class ConvergenceReport:
    family: FamilyId
    q: float
    plane: Plane
    rows: tuple[ConvergenceRow, ...]

    def max_distances(self) -> list[float]:
        return [row.max_distance for row in self.rows]


def exact_q(q: Rational | float) -> Fraction:
    """Exact rational for q; floats go through their shortest decimal repr."""
    if isinstance(q, float):
        return Fraction(repr(q))
    return Fraction(q)


class ConvergenceRunner:
    """Runs one root-finding job per n and measures distances to the limit set.

    With ``window`` set, only points of modulus at most ``window`` enter the
    distance statistics; the rest are counted in ``ConvergenceRow.outside``.
    """

    def __init__(
        self,
        family: FamilyId,
        q: Rational | float,
        plane: Plane | str = Plane.Z,
        samples: int = 2048,
        d_max: float = DEFAULT_MAX_IMAG,
        max_sweeps: int = DEFAULT_MAX_SWEEPS,
        seed: int | None = None,
        threads: int | None = None,
        window: float | None = None,
    ) -> None:
        self.family = FamilyId(family)
        if self.family is FamilyId.COUNTEREXAMPLE:
            raise UnsupportedFamilyError("convergence needs a family, not the counterexample")
        self.q_exact = exact_q(q)
        self.q = float(self.q_exact)
        self.plane = Plane(plane)
        self.max_sweeps = max_sweeps
        self.seed = seed
        self.threads = threads or os.cpu_count() or 1
        if window is not None and not window > 0:
            raise ValidationError(f"window must be positive, got {window}")
        self.window = window
        self.limit_set: CurveSet = family_limit_set(
            self.family, self.q, self.plane, samples=samples, d_max=d_max
        )
        self.form = spectral_form(self.family, self.q)

    def roots_for(self, n: int) -> RootSet:
        polynomial = family_zpoly(self.family, n, self.q_exact)
        return find_roots(
            polynomial,
            max_sweeps=self.max_sweeps,
            seed=self.seed,
            evaluator=lambda z: self.form.newton_ratio(n, z),
        )

    def _points_for(self, rs: RootSet) -> list[complex]:
        if self.plane is Plane.Z:
            return list(rs.roots)
        return roots_in_v(rs, self.q)

    def _distances_sync(self, n: int) -> tuple[RootSet, list[complex], list[float]]:
        """Synchronous helper: roots of f_n and their distances."""
        rs = self.roots_for(n)
        points = self._points_for(rs)
        distances = [curve_distance(p, self.limit_set) for p in points]
        logger.info(
            f"{self.family} q={self.q:g} n={n}: {len(rs)} roots, "
            f"max distance {max(distances, default=0.0):.4g}"
        )
        return rs, points, distances

    async def distances(self, n: int) -> tuple[RootSet, list[complex], list[float]]:
        """Roots and distances for one n (async)."""
        return await asyncio.to_thread(self._distances_sync, n)

    def _rows(
        self,
        n_list: Sequence[int],
        results: Sequence[tuple[RootSet, list[complex], list[float]]],
        isolation_threshold: float,
    ) -> ConvergenceReport:
        rows = []
        previous: list[complex] = []
        for n, (rs, all_points, all_distances) in zip(n_list, results, strict=True):
            pairs = list(zip(all_points, all_distances, strict=True))
            if self.window is not None:
                pairs = [(p, d) for p, d in pairs if abs(p) <= self.window]
            far = [p for p, d in pairs if d > isolation_threshold]
            # a far root counts as isolated when the previous n had one nearby
            isolated = tuple(
                p for p in far if previous and min(abs(p - o) for o in previous) < 1e-3
            )
            kept = [d for p, d in pairs if p not in isolated]
            rows.append(
                ConvergenceRow(
                    n=n,
                    root_count=len(rs),
                    max_distance=max(kept, default=0.0),
                    mean_distance=float(np.mean(kept)) if kept else 0.0,
                    converged=rs.converged,
                    isolated=isolated,
                    outside=len(all_points) - len(pairs),
                )
            )
            previous = far
        return ConvergenceReport(self.family, self.q, self.plane, tuple(rows))

    def report(self, n_list: Sequence[int], isolation_threshold: float = 0.25) -> ConvergenceReport:
        results = [self._distances_sync(n) for n in n_list]
        return self._rows(n_list, results, isolation_threshold)

    async def report_async(
        self, n_list: Sequence[int], isolation_threshold: float = 0.25
    ) -> ConvergenceReport:
        """Same as :meth:`report`, with at most ``threads`` jobs running at once."""
        semaphore = asyncio.Semaphore(self.threads)

        async def guarded(n: int) -> tuple[RootSet, list[complex], list[float]]:
            async with semaphore:
                return await self.distances(n)

        results = await asyncio.gather(*(guarded(n) for n in n_list))
        return self._rows(n_list, results, isolation_threshold)


def convergence_report(
    family: FamilyId,
    q: Rational | float,
    n_list: Sequence[int],
    plane: Plane | str = Plane.Z,
    **options: object,
) -> ConvergenceReport:
    """Max and mean distance from the zeros of f_n to the limit set, per n."""
    if not n_list:
        raise ValidationError("convergence report needs at least one n")
    runner = ConvergenceRunner(family, q, plane, **options)  # type: ignore[arg-type]
    return runner.report(n_list)


async def convergence_report_async(
    family: FamilyId,
    q: Rational | float,
    n_list: Sequence[int],
    plane: Plane | str = Plane.Z,
    **options: object,
) -> ConvergenceReport:
    if not n_list:
        raise ValidationError("convergence report needs at least one n")
    runner = ConvergenceRunner(family, q, plane, **options)  # type: ignore[arg-type]
    return await runner.report_async(n_list)

