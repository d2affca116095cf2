"""Tests for eigenvalue branches, dominance and pressure."""

import math
from itertools import pairwise

import numpy as np
import pytest

from tutteatlas.eigen import (
    Branch,
    DegeneracyKind,
    DominanceTerm,
    RegionKind,
    beraha_number,
    beraha_parameters,
    branch_value,
    classify_dominance,
    common_segment,
    degeneracy_kind,
    dominance_report,
    dominant,
    eigen_explicit,
    eigen_pair,
    isolated_zero_candidates,
    pressure,
    pressure_error,
    pressure_limit,
    strip_characteristic_coefficients,
    theorem3_region_check,
    verify_beraha_factorization,
)
from tutteatlas.errors import (
    InvalidRangeError,
    NoUniqueDominantError,
    RealAxisError,
    ValidationError,
)
from tutteatlas.graph_families import FamilyId, SpectralForm, SpectralTerm, spectral_form


def random_points(seed: int, count: int, radius: float = 8.0) -> list[complex]:
    rng = np.random.default_rng(seed)
    return [complex(*rng.uniform(-radius, radius, 2)) for _ in range(count)]


def cross_point_on_line(form: SpectralForm, imag: float, lo: float, hi: float) -> complex:
    """Bisect Re(z) for |lambda_q^+| = max |lambda_0^+-| along Im(z) = imag."""

    def gap(re: float) -> float:
        z = complex(re, imag)
        pair_zero = max(abs(branch_value(0.0, form.q, z, b)) for b in Branch)
        return abs(branch_value(form.q, form.q, z, Branch.PLUS)) - pair_zero

    assert gap(lo) * gap(hi) < 0
    for _ in range(80):
        mid = (lo + hi) / 2
        if gap(lo) * gap(mid) <= 0:
            hi = mid
        else:
            lo = mid
    return complex((lo + hi) / 2, imag)


class TestEigenPair:
    """Test cases for eigen_pair and eigen_explicit."""

    @pytest.mark.parametrize("a", [0.0, 1.0, 2.5])
    def test_vieta_identities(self, a: float) -> None:
        """Test sum, product and the shifted product of both roots."""
        q = 4.0
        for z in random_points(1, 30):
            pair = eigen_pair(a, q, z)
            plus, minus = pair.roots
            assert plus + minus == pytest.approx(z + 2 + a, abs=1e-10)
            assert plus * minus == pytest.approx(z + q + 1, abs=1e-9)
            assert (plus - 1) * (minus - 1) == pytest.approx(q - a, abs=1e-9)

    def test_explicit_matches_quadratic_formula(self) -> None:
        """Test that both constructions give the same root set."""
        for a, q in ((0.0, 3.0), (1.0, 3.0), (2.0, 9.0)):
            for z in random_points(2, 50):
                if abs(z.imag) < 1e-3:
                    continue
                by_formula = eigen_pair(a, q, z).roots
                explicit = eigen_explicit(a, q, z).roots
                scale = max(abs(v) for v in by_formula)
                best = min(
                    max(abs(by_formula[0] - explicit[0]), abs(by_formula[1] - explicit[1])),
                    max(abs(by_formula[0] - explicit[1]), abs(by_formula[1] - explicit[0])),
                )
                assert best <= 1e-12 * scale

    def test_identities_on_ten_thousand_samples(self) -> None:
        """Test Vieta and the shifted product over random (a, q, z) to 1e-12."""
        rng = np.random.default_rng(40)
        worst = 0.0
        for _ in range(10_000):
            q = rng.uniform(1.05, 10.0)
            a = rng.uniform(0.0, q)
            z = complex(*rng.uniform(-8.0, 8.0, 2))
            plus, minus = eigen_pair(a, q, z).roots
            worst = max(
                worst,
                abs(plus + minus - (z + 2 + a)),
                abs(plus * minus - (z + q + 1)),
                abs((plus - 1) * (minus - 1) - (q - a)),
            )
        assert worst <= 1e-12

    def test_explicit_agrees_on_ten_thousand_samples(self) -> None:
        """Test eigen_explicit against eigen_pair off the real axis to 1e-10."""
        rng = np.random.default_rng(41)
        worst = 0.0
        for _ in range(10_000):
            q = rng.uniform(1.05, 10.0)
            a = rng.uniform(0.0, q)
            z = complex(*rng.uniform(-8.0, 8.0, 2))
            if z.imag == 0:
                continue
            by_formula = eigen_pair(a, q, z).roots
            explicit = eigen_explicit(a, q, z).roots
            scale = max(1.0, *(abs(v) for v in by_formula))
            best = min(
                max(abs(by_formula[0] - explicit[0]), abs(by_formula[1] - explicit[1])),
                max(abs(by_formula[0] - explicit[1]), abs(by_formula[1] - explicit[0])),
            )
            worst = max(worst, best / scale)
        assert worst <= 1e-10

    def test_explicit_sign_selectors(self) -> None:
        """Test that n and p follow the signs of a + Re(z) and Im(z)."""
        pair = eigen_explicit(1.0, 3.0, complex(-4, -2))
        assert (pair.n_sign, pair.p_sign) == (1, 1)
        pair = eigen_explicit(1.0, 3.0, complex(2, 1))
        assert (pair.n_sign, pair.p_sign) == (0, 0)

    def test_explicit_refuses_real_axis(self) -> None:
        """Test that Im(z) = 0 raises RealAxisError."""
        with pytest.raises(RealAxisError):
            eigen_explicit(1.0, 3.0, complex(2, 0))

    def test_parameter_ranges(self) -> None:
        """Test a outside [0, q] and q <= 1."""
        with pytest.raises(InvalidRangeError):
            eigen_pair(4.0, 3.0, 1j)
        with pytest.raises(InvalidRangeError):
            eigen_pair(0.0, 1.0, 1j)

    def test_branch_value_at_a_equals_q(self) -> None:
        """Test lambda_q^+ = z+q+1 and lambda_q^- = 1."""
        z = complex(-1.5, 0.25)
        assert branch_value(3.0, 3.0, z, Branch.PLUS) == z + 4
        assert branch_value(3.0, 3.0, z, Branch.MINUS) == 1

    def test_dominant_branch_far_right(self) -> None:
        """Test that the larger root is reported."""
        result = dominant(1.0, 3.0, complex(10, 1))
        assert not result.tied
        assert abs(result.value) > 10


class TestClassifyDominance:
    """Test cases for classify_dominance."""

    def test_same_pair_tie_on_real_segment(self) -> None:
        """Test that conjugate roots tie for real z inside the segment."""
        terms = [(1.0, Branch.PLUS, True), (1.0, Branch.MINUS, True)]
        verdict = classify_dominance(-1.0, terms, 3.0)
        assert not verdict.is_unique
        assert verdict.indices == (0, 1)
        with pytest.raises(NoUniqueDominantError):
            _ = verdict.index

    def test_unique_with_margin(self) -> None:
        """Test a clear winner."""
        terms = [DominanceTerm(0.0, Branch.PLUS), DominanceTerm(1.0, Branch.PLUS)]
        verdict = classify_dominance(complex(5, 3), terms, 3.0)
        assert verdict.is_unique
        assert verdict.index == 1
        assert verdict.margin > 0

    def test_zero_coefficient_terms_are_skipped(self) -> None:
        """Test that a term flagged zero never dominates."""
        terms = [DominanceTerm(1.0, Branch.PLUS, nonzero=False), DominanceTerm(0.0, Branch.PLUS)]
        verdict = classify_dominance(complex(5, 3), terms, 3.0)
        assert verdict.index == 1
        assert verdict.margin == math.inf

    def test_no_terms_raises(self) -> None:
        """Test that every term being zero is an error."""
        with pytest.raises(ValidationError):
            classify_dominance(1j, [DominanceTerm(0.0, Branch.PLUS, nonzero=False)], 3.0)

    def test_right_and_left_dominance(self) -> None:
        """Test that the largest a wins on the right and the smallest on the left."""
        q = 3.0
        a_values = (0.0, 0.5, 1.0)
        terms = [DominanceTerm(a, b) for a in a_values for b in Branch]
        right = classify_dominance(complex(5, 3), terms, q)
        left = classify_dominance(complex(-8, 2), terms, q)
        assert terms[right.index].a == 1.0
        assert terms[left.index].a == 0.0


class TestRegionCheck:
    """Test cases for theorem3_region_check."""

    @pytest.mark.parametrize(
        ("z", "expected"),
        [
            (complex(1, 0.1), RegionKind.IN_RIGHT_REGION),
            (complex(1, 0), RegionKind.EXCLUDED),
            (complex(2, 0), RegionKind.IN_RIGHT_REGION),
            (complex(-5, 0), RegionKind.IN_LEFT_REGION),
            (complex(-3.2, 0), RegionKind.EXCLUDED),
            (complex(-3.2, 0.5), RegionKind.IN_LEFT_REGION),
            (complex(-1, 4), RegionKind.EXCLUDED),
        ],
    )
    def test_regions(self, z: complex, expected: RegionKind) -> None:
        """Test points around the two regions for a in [0, 1], q = 3."""
        assert theorem3_region_check(z, 0.0, 1.0, 3.0) is expected

    def test_unordered_bounds_raise(self) -> None:
        """Test a_l > a_u."""
        with pytest.raises(InvalidRangeError):
            theorem3_region_check(1j, 2.0, 1.0, 3.0)

    @pytest.mark.parametrize("a_values", [(0.0, 0.5, 1.0), (0.0, 3.0), (1.0, 1.5, 2.0, 2.5)])
    def test_region_winner_matches_classification(self, a_values: tuple[float, ...]) -> None:
        """Test that the largest a wins on the right and the smallest on the left."""
        q = 3.0
        a_l, a_u = a_values[0], a_values[-1]
        terms = [DominanceTerm(a, b) for a in a_values for b in Branch]
        checked = {RegionKind.IN_RIGHT_REGION: 0, RegionKind.IN_LEFT_REGION: 0}
        for z in random_points(12, 400, radius=10.0):
            region = theorem3_region_check(z, a_l, a_u, q)
            if region is RegionKind.EXCLUDED:
                continue
            verdict = classify_dominance(z, terms, q)
            assert verdict.is_unique
            expected = a_u if region is RegionKind.IN_RIGHT_REGION else a_l
            assert terms[verdict.index].a == expected
            checked[region] += 1
        assert all(count > 20 for count in checked.values())


def rectangle_points(
    seed: int, count: int, re_range: tuple[float, float], im_range: tuple[float, float]
) -> list[complex]:
    """Points with Re in re_range and |Im| in im_range, random sign on Im."""
    rng = np.random.default_rng(seed)
    points = []
    for _ in range(count):
        re = rng.uniform(*re_range)
        im = rng.uniform(*im_range) * rng.choice([-1.0, 1.0])
        points.append(complex(re, im))
    return points


class TestMonotonicity:
    """Test cases for the dependence of the dominant modulus on a."""

    A_GRID = np.linspace(0.0, 3.0, 13)

    def _magnitudes(self, z: complex) -> list[float]:
        return [abs(dominant(float(a), 3.0, z).value) for a in self.A_GRID]

    def test_increasing_right_of_the_strip(self) -> None:
        """Test |dominant| non-decreasing in a for Re(z) > -a_l."""
        for z in rectangle_points(20, 200, (0.05, 6.0), (0.1, 6.0)):
            magnitudes = self._magnitudes(z)
            for lower, upper in pairwise(magnitudes):
                assert lower <= upper + 1e-12

    def test_decreasing_left_of_the_strip(self) -> None:
        """Test |dominant| non-increasing in a for Re(z) < -a_u - 2."""
        for z in rectangle_points(21, 200, (-11.0, -5.05), (0.1, 6.0)):
            magnitudes = self._magnitudes(z)
            for lower, upper in pairwise(magnitudes):
                assert upper <= lower + 1e-12


class TestDegeneracy:
    """Test cases for dominance_report, degeneracy_kind and common_segment."""

    def test_same_pair_on_wheel_segment(self) -> None:
        """Test the wheel's a = 1 pair tying at z = 0."""
        form = spectral_form(FamilyId.WHEEL, 3.0)
        assert degeneracy_kind(form, 0j) is DegeneracyKind.SAME_PAIR
        assert degeneracy_kind(form, complex(10, 1)) is DegeneracyKind.NONE

    def test_cross_pair_on_cycle_multi(self) -> None:
        """Test a point where lambda_q^+ ties with the a = 0 pair."""
        form = spectral_form(FamilyId.CYCLE_MULTI, 3.0)
        z = cross_point_on_line(form, 5.0, -5.0, 0.0)
        assert degeneracy_kind(form, z, tie_tolerance=1e-8) is DegeneracyKind.CROSS_PAIR

    def test_readings_agree_far_right(self) -> None:
        """Test that both dominance readings pick the same eigenvalue."""
        form = spectral_form(FamilyId.CYCLE_MULTI, 3.0)
        report = dominance_report(form, complex(6, 2))
        assert not report.readings_disagree

    def test_vanishing_wheel_term_not_represented(self) -> None:
        """Test that at q = 2 only the all-pairs reading sees lambda_q^-."""
        form = spectral_form(FamilyId.WHEEL, 2.0)
        report = dominance_report(form, complex(-3, 0.01))
        assert not report.represented_terms[0].nonzero
        assert report.all_pairs.is_unique
        assert report.readings_disagree

    def test_common_segment(self) -> None:
        """Test the intersection of the real segments."""
        segment = common_segment([0.0, 1.0], 3.0)
        assert segment is not None
        lo, hi = segment
        assert lo == pytest.approx(-2 * math.sqrt(3))
        assert hi == pytest.approx(-1 + 2 * math.sqrt(2))

    def test_common_segment_empty(self) -> None:
        """Test disjoint segments and an empty input."""
        assert common_segment([0.0, 10.0], 10.0) is None
        assert common_segment([], 3.0) is None


class TestIsolatedZeros:
    """Test cases for isolated_zero_candidates."""

    def test_triangle_strip_has_none(self) -> None:
        """Test that alpha and beta never vanish for q > 1."""
        form = spectral_form(FamilyId.TRIANGLE_STRIP, 3.0)
        assert isolated_zero_candidates(form, random_points(4, 100)) == []

    def test_tiny_dominant_coefficient_flagged(self) -> None:
        """Test a dominant term whose coefficient is numerically zero."""
        terms = (
            SpectralTerm(2.0, Branch.PLUS, constant=1e-12),
            SpectralTerm(1.0, Branch.PLUS, constant=1.0),
            SpectralTerm(1.0, Branch.MINUS, constant=1.0),
        )
        form = SpectralForm(FamilyId.WHEEL, 2.0, terms)
        z = complex(5, 1)
        assert isolated_zero_candidates(form, [z]) == [z]


class TestPressure:
    """Test cases for pressure, pressure_limit and pressure_error."""

    def test_wheel_converges(self) -> None:
        """Test the wheel at q = 3, z = 10 for n in 50, 100, 200."""
        form = spectral_form(FamilyId.WHEEL, 3.0)
        for n in (50, 100, 200):
            assert pressure_error(form, n, 10.0) < 1e-10

    def test_triangle_strip_error_decays_like_one_over_n(self) -> None:
        """Test that n times the error tends to |Log(alpha lambda)|."""
        form = spectral_form(FamilyId.TRIANGLE_STRIP, 3.0)
        z = complex(10, 0)
        errors = [pressure_error(form, n, z) for n in (50, 100, 200)]
        assert errors[0] > errors[1] > errors[2]
        lambdas = form.eigenvalues(z)
        coefficients = form.coefficients(z)
        expected = abs(math.log(abs(coefficients[0] * lambdas[0])))
        assert 200 * errors[2] == pytest.approx(expected, rel=1e-9)

    def test_pressure_matches_direct_log(self) -> None:
        """Test p_n against Log(f_n)/n at a complex point."""
        form = spectral_form(FamilyId.CYCLE_MULTI, 4.0)
        z = complex(2, 1.5)
        value = form.evaluate(30, z)
        expected = complex(math.log(abs(value)), np.angle(value)) / 30
        assert pressure(form, 30, z) == pytest.approx(expected, rel=1e-10)

    def test_imaginary_wrap_is_ignored(self) -> None:
        """Test that the error stays small at points where Log(f_n) wraps."""
        form = spectral_form(FamilyId.WHEEL, 3.0)
        assert pressure_error(form, 200, complex(4, 6)) < 1e-6

    def test_limit_needs_unique_dominant(self) -> None:
        """Test pressure_limit on the wheel's real segment."""
        form = spectral_form(FamilyId.WHEEL, 3.0)
        with pytest.raises(NoUniqueDominantError):
            pressure_limit(form, 0j)

    @pytest.mark.parametrize(
        ("family", "a_l"), [(FamilyId.TRIANGLE_STRIP, 1.0), (FamilyId.CYCLE_MULTI, 0.0)]
    )
    def test_error_shrinks_from_100_to_400(self, family: FamilyId, a_l: float) -> None:
        """Test 20 points right of Re(z) = -a_l + 0.5 off the real axis."""
        form = spectral_form(family, 3.0)
        for z in rectangle_points(30, 20, (-a_l + 0.5, 6.0), (0.5, 6.0)):
            coarse = pressure_error(form, 100, z)
            fine = pressure_error(form, 400, z)
            assert fine < 0.02
            assert fine < coarse or coarse < 1e-10

    def test_pressure_needs_positive_n(self) -> None:
        """Test n = 0."""
        form = spectral_form(FamilyId.WHEEL, 3.0)
        with pytest.raises(ValidationError):
            pressure(form, 0, 1j)


class TestBeraha:
    """Test cases for the strip characteristic polynomials."""

    def test_beraha_numbers(self) -> None:
        """Test b_5 = 2.618... and b_4 = 2."""
        assert beraha_number(5) == pytest.approx((3 + math.sqrt(5)) / 2)
        assert beraha_number(4) == pytest.approx(2.0)
        assert beraha_number(6) == pytest.approx(3.0)

    @pytest.mark.parametrize("width", [2, 3])
    def test_factorization_residual(self, width: int) -> None:
        """Test residuals below 1e-6 at q = 2.5."""
        zs = [z for z in random_points(9, 100, radius=5.0) if abs(z.imag) > 1e-6]
        assert verify_beraha_factorization(width, zs, 2.5) < 1e-6

    def test_width_three_parameters(self) -> None:
        """Test the three width-3 parameters."""
        b7 = beraha_number(7)
        assert beraha_parameters(3) == pytest.approx(
            (b7, 2 - math.sqrt(b7), 3 - b7 + math.sqrt(b7))
        )

    def test_leading_coefficients(self) -> None:
        """Test that both polynomials are monic of degree 2 * width."""
        for width in (2, 3):
            coefficients = strip_characteristic_coefficients(width, 1.5 + 1j, 0.5 - 1j)
            assert len(coefficients) == 2 * width + 1
            assert coefficients[0] == 1

    def test_width_three_constant_in_cubic_term(self) -> None:
        """Test that the +1 inside the lambda^3 coefficient is needed for the factorization."""
        q = 2.5

        def residual(coefficients: list[complex], lam: complex) -> float:
            value = np.polyval(coefficients, lam)
            scale = np.polyval(np.abs(coefficients), abs(lam))
            return float(abs(value) / scale)

        with_constant, without_constant = [], []
        for z in (complex(1.5, 0.7), complex(-2.0, 1.2), complex(0.3, -2.5)):
            x, y = eigen_pair(0.0, q, z).roots
            coefficients = strip_characteristic_coefficients(3, x, y)
            dropped = list(coefficients)
            dropped[3] += 1
            for a in beraha_parameters(3):
                for lam in np.roots([1, -(z + 2 + a), z + q + 1]):
                    with_constant.append(residual(coefficients, lam))
                    without_constant.append(residual(dropped, lam))
        assert max(with_constant) < 1e-9
        assert max(without_constant) > 1e-4

    def test_unsupported_width(self) -> None:
        """Test width 4."""
        with pytest.raises(ValidationError):
            beraha_parameters(4)
        with pytest.raises(ValidationError):
            strip_characteristic_coefficients(4, 1j, -1j)
