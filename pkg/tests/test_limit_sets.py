"""Tests for limiting curves in the z- and v-planes."""

import math

import numpy as np
import pytest

from tutteatlas.eigen import Branch, branch_value
from tutteatlas.errors import InvalidRangeError, UnsupportedFamilyError
from tutteatlas.graph_families import FamilyId
from tutteatlas.limit_sets import (
    Arc,
    Circle,
    CurveSet,
    Line,
    ParamCurve,
    Plane,
    PointList,
    RadialSegment,
    RealSegment,
    circle_image_in_v,
    cross_degeneration_curve,
    curve_distance,
    family_limit_set,
    image_in_v,
    pair_degeneration_curve,
    real_segment_image,
    segment_image_in_v,
    v_to_z,
    z_to_v,
)


def pair_magnitudes(a: float, q: float, z: complex) -> tuple[float, float]:
    plus = branch_value(a, q, z, Branch.PLUS)
    minus = branch_value(a, q, z, Branch.MINUS)
    return abs(plus), abs(minus)


class TestPieces:
    """Test cases for the individual curve pieces."""

    def test_segment_distance(self) -> None:
        """Test distances to a real segment."""
        segment = RealSegment(-1.0, 2.0)
        assert segment.distance(complex(0.5, 3)) == pytest.approx(3.0)
        assert segment.distance(complex(5, 4)) == pytest.approx(5.0)

    def test_segment_bounds_checked(self) -> None:
        """Test that c_min > c_max raises."""
        with pytest.raises(InvalidRangeError):
            RealSegment(2.0, 1.0)

    def test_circle_samples_lie_on_circle(self) -> None:
        """Test sampled radii."""
        circle = Circle(complex(-2.2, 0), 0.8)
        points = circle.sample(64)
        assert len(points) == 64
        assert np.allclose(np.abs(points - circle.center), 0.8)
        assert circle.distance(complex(-2.2, 0)) == pytest.approx(0.8)

    def test_arc_distance(self) -> None:
        """Test points inside and outside the angular range."""
        arc = Arc(1.0, 0.0, math.pi / 2)
        assert arc.distance(2.0) == pytest.approx(1.0)
        assert arc.distance(-1.0) == pytest.approx(math.sqrt(2))

    def test_radial_segment(self) -> None:
        """Test sampling and distance for a negative-axis ray piece."""
        ray = RadialSegment(math.pi, 0.5, 2.0)
        points = ray.sample(16)
        assert np.allclose(points.imag, 0, atol=1e-12)
        assert points.real.min() == pytest.approx(-2.0)
        assert ray.distance(complex(-1, 1)) == pytest.approx(1.0)

    def test_line_distance(self) -> None:
        """Test the vertical line."""
        line = Line(-1.5, max_imag=10.0)
        assert line.distance(complex(0.5, 100)) == pytest.approx(2.0)
        assert np.abs(line.sample(5).imag).max() == pytest.approx(10.0)

    def test_connected_points_use_chords(self) -> None:
        """Test polyline distance between samples."""
        polyline = PointList((0j, 1 + 0j, 2 + 0j, 3 + 0j), connected=True)
        scattered = PointList((0j, 1 + 0j, 2 + 0j, 3 + 0j))
        assert polyline.distance(complex(1.5, 0.5)) == pytest.approx(0.5)
        assert scattered.distance(complex(1.5, 0.5)) == pytest.approx(math.sqrt(0.5))

    def test_empty_set_distance_is_infinite(self) -> None:
        """Test curve_distance on no pieces."""
        assert curve_distance(1j, CurveSet(Plane.Z, ())) == math.inf

    def test_merging_planes_checked(self) -> None:
        """Test that z- and v-plane sets do not merge."""
        with pytest.raises(InvalidRangeError):
            _ = CurveSet(Plane.Z, ()) + CurveSet(Plane.V, ())


class TestDegenerationCurves:
    """Test cases for pair and cross degeneration curves."""

    @pytest.mark.parametrize(("a", "q"), [(0.0, 3.0), (1.0, 3.0), (1.0, 1.5), (2.0, 2.5)])
    def test_pair_curve_points_tie(self, a: float, q: float) -> None:
        """Test |lambda^+| = |lambda^-| on every interior sample."""
        curves = pair_degeneration_curve(a, q)
        for k, points in curves.sample(40):
            piece = curves.pieces[k]
            interior = points[1:-1] if piece.kind == "segment" else points
            for z in interior:
                plus, minus = pair_magnitudes(a, q, complex(z))
                assert plus == pytest.approx(minus, rel=1e-9)

    def test_circle_appears_for_large_a(self) -> None:
        """Test the regime switch at a = q - 1."""
        assert pair_degeneration_curve(1.0, 3.0).regime == "segment"
        with_circle = pair_degeneration_curve(1.0, 1.2)
        assert with_circle.regime == "segment+circle"
        circle = with_circle.pieces[1]
        assert isinstance(circle, Circle)
        assert circle.center == complex(-2.2, 0)
        assert circle.radius == pytest.approx(0.8)

    @pytest.mark.parametrize(("a", "q"), [(0.0, 9.0), (1.0, 3.0), (0.5, 2.0)])
    def test_cross_curve_has_unit_root(self, a: float, q: float) -> None:
        """Test that one a-pair root has modulus one along the curve."""
        for z in cross_degeneration_curve(a, q).points(64):
            magnitudes = pair_magnitudes(a, q, complex(z))
            assert min(abs(m - 1) for m in magnitudes) < 1e-9

    @pytest.mark.parametrize("q", [1.5, 3.0, 9.0])
    @pytest.mark.parametrize("a", [0.0, 0.8, 1.3])
    def test_membership_on_grid(self, a: float, q: float) -> None:
        """Test 500 ties on each curve and clear gaps at 500 points away from it."""
        curves = pair_degeneration_curve(a, q)
        for k, points in curves.sample(500):
            interior = points[1:-1] if curves.pieces[k].kind == "segment" else points
            for z in interior:
                plus, minus = pair_magnitudes(a, q, complex(z))
                assert abs(plus - minus) <= 1e-8 * max(plus, minus)

        for z in cross_degeneration_curve(a, q).points(500):
            magnitudes = pair_magnitudes(a, q, complex(z))
            assert min(abs(m - 1) for m in magnitudes) < 1e-8

        rng = np.random.default_rng(50)
        off_curve = 0
        while off_curve < 500:
            z = complex(*rng.uniform(-8.0, 8.0, 2))
            if curves.distance(z) < 0.05:
                continue
            plus, minus = pair_magnitudes(a, q, z)
            assert abs(plus - minus) > 1e-9 * max(plus, minus)
            off_curve += 1

    def test_cross_curve_satisfies_implicit_equation(self) -> None:
        """Test d^2 = -(c+q)^2 (2c+q+4+a) / (2c+q+a) at the samples."""
        curve = ParamCurve(1.0, 3.0, -4.0, -2.0, d_max=20.0)
        for z in curve.sample(64):
            expected = curve.radicand(z.real)
            assert z.imag**2 == pytest.approx(expected, rel=1e-8, abs=1e-10)

    def test_cross_curve_capped(self) -> None:
        """Test that samples stop at |Im z| = d_max."""
        points = cross_degeneration_curve(0.0, 9.0, d_max=30.0).points(128)
        assert np.abs(points.imag).max() <= 30.0 + 1e-6
        assert np.abs(points.imag).max() > 29.0

    def test_cross_curve_needs_a_below_q(self) -> None:
        """Test a = q."""
        with pytest.raises(InvalidRangeError):
            ParamCurve(3.0, 3.0, -5.0, -3.0)

    def test_param_distance_finds_curve_points(self) -> None:
        """Test that a point on the curve has distance zero."""
        curve = ParamCurve(0.0, 9.0, -6.5, -4.5)
        on_curve = curve.point(1.2)
        assert curve.distance(on_curve) < 1e-7
        assert curve.distance(on_curve.conjugate()) < 1e-7
        assert curve.distance(on_curve + 1) > 0.1


class TestVPlaneMap:
    """Test cases for z_to_v, v_to_z and the v-plane images."""

    def test_double_point(self) -> None:
        """Test z = 2 sqrt(q) maps to v = 1 twice."""
        v1, v2 = z_to_v(2 * math.sqrt(5.0), 5.0)
        assert v1 == pytest.approx(1.0)
        assert v2 == pytest.approx(1.0)

    def test_preimages_multiply_to_one(self) -> None:
        """Test v1 * v2 = 1 and the round trip."""
        rng = np.random.default_rng(8)
        for _ in range(50):
            z = complex(*rng.uniform(-10, 10, 2))
            v1, v2 = z_to_v(z, 3.0)
            assert v1 * v2 == pytest.approx(1.0, rel=1e-12)
            assert v_to_z(v1, 3.0) == pytest.approx(z, rel=1e-12, abs=1e-12)
            assert v_to_z(v2, 3.0) == pytest.approx(z, rel=1e-12, abs=1e-12)

    def test_q_must_be_positive(self) -> None:
        """Test q = 0."""
        with pytest.raises(InvalidRangeError):
            z_to_v(1j, 0.0)

    def test_inner_segment_lands_on_unit_circle(self) -> None:
        """Test that a segment inside (-2 sqrt(q), 2 sqrt(q)) maps onto |v| = 1."""
        q = 4.0
        image = real_segment_image(-3.9, 3.9, q)
        assert image.regime == "arc"
        assert np.allclose(np.abs(image.points(64)), 1.0)

    def test_segment_image_regimes(self) -> None:
        """Test the arc-only and arc-plus-ray cases of the a-segment image."""
        assert segment_image_in_v(1.0, 1.5).regime == "arc"
        assert segment_image_in_v(1.0, 9.0).regime == "arc+radial"

    def test_segment_image_contains_mapped_samples(self) -> None:
        """Test that every F-image of a segment sample lies on the v-set."""
        q = 9.0
        image = segment_image_in_v(1.0, q)
        for c in np.linspace(-1 - 2 * math.sqrt(8), -1 + 2 * math.sqrt(8), 40):
            for v in z_to_v(complex(c), q):
                assert image.distance(v) < 1e-9

    def test_circle_image_branches(self) -> None:
        """Test that both circle-image branches map back onto the circle."""
        q = 1.2
        image = circle_image_in_v(1.0, q, samples=32)
        circle = Circle(complex(-q - 1, 0), 1 - q + 1.0)
        for piece in image.pieces:
            for v in piece.sample(0):
                assert circle.distance(v_to_z(complex(v), q)) < 1e-9

    def test_circle_image_needs_large_a(self) -> None:
        """Test a below q - 1."""
        with pytest.raises(InvalidRangeError):
            circle_image_in_v(0.5, 3.0)

    def test_image_keeps_both_branches(self) -> None:
        """Test that image_in_v doubles the piece count."""
        curves = pair_degeneration_curve(1.0, 1.5)
        image = image_in_v(curves, 1.5, samples=16)
        assert image.plane is Plane.V
        assert len(image.pieces) == 2 * len(curves.pieces)


class TestFamilyLimitSet:
    """Test cases for family_limit_set."""

    def test_cycle_multi_v_plane(self) -> None:
        """Test the line Re(v) = -sqrt(q)/2 plus the circle about -1/sqrt(q)."""
        q = 9.0
        curves = family_limit_set(FamilyId.CYCLE_MULTI, q, "v")
        line, circle = curves.pieces
        assert isinstance(line, Line)
        assert line.re == pytest.approx(-1.5)
        assert isinstance(circle, Circle)
        assert circle.center == pytest.approx(-1 / 3)
        assert circle.radius == pytest.approx(1 / 3)

    def test_cycle_multi_planes_agree(self) -> None:
        """Test that the z-plane curve maps into the v-plane set."""
        q = 9.0
        z_set = family_limit_set(FamilyId.CYCLE_MULTI, q, Plane.Z, d_max=20.0)
        v_set = family_limit_set(FamilyId.CYCLE_MULTI, q, Plane.V)
        for z in z_set.points(64):
            for v in z_to_v(complex(z), q):
                assert v_set.distance(v) < 1e-8

    @pytest.mark.parametrize(
        ("family", "q"),
        [
            (FamilyId.TRIANGLE_STRIP, 1.3),
            (FamilyId.TRIANGLE_STRIP, 3.0),
            (FamilyId.TRIANGLE_STRIP, 9.0),
            (FamilyId.WHEEL, 1.3),
            (FamilyId.WHEEL, 2.0),
            (FamilyId.WHEEL, 3.0),
            (FamilyId.WHEEL, 4.5),
            (FamilyId.WHEEL, 9.0),
            (FamilyId.CYCLE_MULTI, 1.3),
            (FamilyId.CYCLE_MULTI, 3.0),
            (FamilyId.CYCLE_MULTI, 9.0),
        ],
    )
    def test_v_set_is_the_image_of_the_z_set(self, family: FamilyId, q: float) -> None:
        """Test both directions of z = sqrt(q)(v + 1/v) between the two planes."""
        samples = 128
        z_set = family_limit_set(family, q, Plane.Z, samples=samples, d_max=10.0)
        v_set = family_limit_set(family, q, Plane.V, samples=samples, d_max=10.0)

        for v in v_set.points(samples):
            v = complex(v)
            if abs(v) < 0.05:
                # v = 0 is the image of z = infinity
                continue
            z = v_to_z(v, q)
            assert z_set.distance(z) < 1e-8 * max(1.0, abs(z))

        for v in image_in_v(z_set, q, samples).points(samples):
            assert v_set.distance(v) < 1e-8 * max(1.0, abs(v))

    @pytest.mark.parametrize("q", [1.3, 2.0, 3.0, 4.5, 9.0])
    @pytest.mark.parametrize("family", [FamilyId.TRIANGLE_STRIP, FamilyId.WHEEL])
    def test_right_half_plane_lies_on_unit_circle(self, family: FamilyId, q: float) -> None:
        """Test that every v-set point with Re(v) >= 0 has |v| = 1."""
        points = family_limit_set(family, q, Plane.V).points(256)
        right = [complex(v) for v in points if v.real >= 0]
        assert right
        for v in right:
            assert abs(abs(v) - 1) < 1e-10

    @pytest.mark.parametrize("q", [1.3, 3.0, 9.0])
    def test_cycle_multi_stays_in_left_half_plane(self, q: float) -> None:
        """Test that the cycle-multi v-set touches Re(v) >= 0 only at v = 0."""
        points = family_limit_set(FamilyId.CYCLE_MULTI, q, Plane.V).points(256)
        assert all(v.real < 1e-12 for v in points)
        touching = [complex(v) for v in points if v.real >= 0]
        assert all(abs(v) < 1e-12 for v in touching)

    def test_triangle_strip_regimes(self) -> None:
        """Test the circle near q = 1.2 and its absence at q = 3."""
        assert family_limit_set(FamilyId.TRIANGLE_STRIP, 1.2, Plane.Z).regime == "segment+circle"
        assert family_limit_set(FamilyId.TRIANGLE_STRIP, 3.0, Plane.Z).regime == "segment"
        v_set = family_limit_set(FamilyId.TRIANGLE_STRIP, 1.2, Plane.V)
        assert "circle-image" in v_set.regime

    def test_wheel_regimes(self) -> None:
        """Test the cross curve below q = 5 and the plain segment above."""
        low = family_limit_set(FamilyId.WHEEL, 3.0, Plane.Z)
        assert low.regime == "segment + cross"
        segment = low.pieces[0]
        assert isinstance(segment, RealSegment)
        assert segment.c_min == pytest.approx(-3.0)
        assert family_limit_set(FamilyId.WHEEL, 6.0, Plane.Z).regime == "segment"

    def test_counterexample_has_no_limit_set(self) -> None:
        """Test that the single graph is refused."""
        with pytest.raises(UnsupportedFamilyError):
            family_limit_set(FamilyId.COUNTEREXAMPLE, 16.0, Plane.Z)

    def test_q_at_most_one_refused(self) -> None:
        """Test q = 1."""
        with pytest.raises(InvalidRangeError):
            family_limit_set(FamilyId.WHEEL, 1.0, Plane.Z)
