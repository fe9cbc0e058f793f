"""Geometry module tests; quadrature oracles computed independently with scipy."""

import numpy as np
import pytest
from scipy.integrate import quad

from curveflow import (
    CurveState,
    DegenerateSegmentError,
    Orientation,
    build_circle,
    build_radial_curve,
    compute_geometry,
    curve_length,
    discrete_curvature,
    dual_lengths,
    enclosed_area,
    load_polyline,
    read_polyline,
    segment_lengths,
    shape_diagnostics,
    write_polyline,
)
from conftest import random_star_curve

UNIT_SQUARE = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]


def radial_speed(u, folds, amplitude):
    """|X'(u)| of the polar graph r(u) = 1 + a*cos(2*folds*pi*u)."""
    w = 2.0 * folds * np.pi
    r = 1.0 + amplitude * np.cos(w * u)
    rp = -amplitude * w * np.sin(w * u)
    return np.sqrt(rp**2 + (2.0 * np.pi * r) ** 2)


def polar_area(folds, amplitude):
    """Independent quadrature of A = 1/2 int r(theta)^2 dtheta."""
    return quad(
        lambda t: 0.5 * (1.0 + amplitude * np.cos(folds * t)) ** 2, 0.0, 2.0 * np.pi,
        limit=400,
    )[0]


def arc_length(folds, amplitude):
    return quad(lambda u: radial_speed(u, folds, amplitude), 0.0, 1.0, limit=400)[0]


class TestCurveState:
    def test_rejects_too_few_nodes(self):
        with pytest.raises(ValueError, match="at least 4"):
            CurveState(np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]))

    def test_rejects_duplicate_consecutive_nodes(self):
        with pytest.raises(ValueError, match="distinct"):
            CurveState(np.array(UNIT_SQUARE + [(0.0, 1.0)]))

    def test_rejects_cyclic_duplicate(self):
        # closure is implied, so repeating the first point is a duplicate
        with pytest.raises(ValueError, match="distinct"):
            CurveState(np.array(UNIT_SQUARE + [(0.0, 0.0)]))

    def test_rejects_non_finite(self):
        nodes = np.array(UNIT_SQUARE)
        nodes[2, 0] = np.nan
        with pytest.raises(ValueError, match="finite"):
            CurveState(nodes)

    def test_rejects_zero_area(self):
        with pytest.raises(ValueError, match="zero signed area"):
            CurveState(np.array([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0], [3.0, 0.0]]))

    def test_immutable(self):
        curve = load_polyline(UNIT_SQUARE)
        assert not curve.nodes.flags.writeable
        with pytest.raises(Exception):
            curve.nodes = np.zeros((4, 2))


class TestBuilders:
    def test_radial_nodes_on_polar_graph(self):
        curve = build_radial_curve(4, 0.4, 200)
        assert curve.node_count == 200
        assert curve.orientation is Orientation.COUNTERCLOCKWISE
        u = np.arange(200) / 200
        radius = np.linalg.norm(curve.nodes, axis=1)
        assert np.allclose(radius, 1.0 + 0.4 * np.cos(8 * np.pi * u), rtol=1e-14)
        assert np.allclose(curve.nodes[0], [1.4, 0.0])

    def test_zero_amplitude_gives_regular_polygon(self):
        curve = build_radial_curve(7, 0.0, 200)
        d = segment_lengths(curve)
        assert np.allclose(d, 2.0 * np.sin(np.pi / 200), rtol=1e-12)

    @pytest.mark.parametrize("amplitude", [1.0, -1.0, 1.5])
    def test_rejects_large_amplitude(self, amplitude):
        with pytest.raises(ValueError, match="amplitude"):
            build_radial_curve(4, amplitude, 100)

    def test_rejects_bad_counts(self):
        with pytest.raises(ValueError):
            build_radial_curve(4, 0.4, 3)
        with pytest.raises(ValueError):
            build_radial_curve(0, 0.4, 100)

    def test_circle_radius(self):
        curve = build_circle(2.5, 128)
        assert np.allclose(np.linalg.norm(curve.nodes, axis=1), 2.5, rtol=1e-14)


class TestPolyline:
    def test_square_ccw(self):
        curve = load_polyline(UNIT_SQUARE)
        assert curve.orientation is Orientation.COUNTERCLOCKWISE

    def test_square_cw(self):
        curve = load_polyline(UNIT_SQUARE[::-1])
        assert curve.orientation is Orientation.CLOCKWISE

    def test_rejects_short_input(self):
        with pytest.raises(ValueError):
            load_polyline(UNIT_SQUARE[:3])

    def test_file_round_trip(self, tmp_path):
        curve = build_radial_curve(5, 0.65, 200)
        path = tmp_path / "five_fold.txt"
        write_polyline(curve, path)
        loaded = read_polyline(path)
        assert np.array_equal(loaded.nodes, curve.nodes)
        assert loaded.orientation is curve.orientation

    def test_comments_and_blanks_ignored(self, tmp_path):
        path = tmp_path / "square.txt"
        path.write_text("# a square\n\n0 0\n1 0\n\n1 1\n# midway comment\n0 1\n")
        curve = read_polyline(path)
        assert curve.node_count == 4

    def test_malformed_line_rejected(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("0 0\n1 0 7\n1 1\n0 1\n")
        with pytest.raises(ValueError, match="bad.txt:2"):
            read_polyline(path)

    def test_non_numeric_rejected(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("0 0\n1 zero\n1 1\n0 1\n")
        with pytest.raises(ValueError, match=":2"):
            read_polyline(path)


class TestSegmentLengths:
    @pytest.mark.parametrize("m", [50, 200])
    def test_regular_polygon_chords(self, m):
        d = segment_lengths(build_circle(1.0, m))
        assert np.allclose(d, 2.0 * np.sin(np.pi / m), rtol=1e-12)

    def test_unit_square(self):
        d = segment_lengths(load_polyline(UNIT_SQUARE))
        assert np.array_equal(d, np.ones(4))

    def test_five_fold_matches_quadrature(self):
        # independent fine-quadrature oracle for the arc length
        curve = build_radial_curve(5, 0.65, 200)
        total = curve_length(segment_lengths(curve))
        oracle = arc_length(5, 0.65)
        assert abs(total - oracle) / oracle <= 1e-3

    def test_degenerate_segment_rejected(self):
        nodes = np.array([(0.0, 0.0), (1e-13, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)])
        curve = CurveState(nodes)
        with pytest.raises(DegenerateSegmentError):
            segment_lengths(curve)

    def test_dual_lengths_sum_to_total(self):
        rng = np.random.default_rng(7)
        curve = random_star_curve(rng)
        d = segment_lengths(curve)
        assert np.isclose(np.sum(dual_lengths(d)), np.sum(d), rtol=1e-13)


class TestDiscreteCurvature:
    @pytest.mark.parametrize("radius", [1.0, 2.5])
    def test_regular_polygon_closed_form(self, radius):
        m = 200
        curve = build_circle(radius, m)
        kappa = discrete_curvature(curve)
        assert np.allclose(kappa, np.cos(np.pi / m) / radius, rtol=1e-10)

    def test_clockwise_flips_sign(self):
        m = 200
        curve = CurveState(build_circle(1.0, m).nodes[::-1])
        kappa = discrete_curvature(curve)
        assert np.allclose(kappa, -np.cos(np.pi / m), rtol=1e-10)

    def test_circle_convergence_is_second_order(self):
        node_counts = np.array([50, 100, 200, 400])
        errors = []
        for m in node_counts:
            kappa = discrete_curvature(build_circle(1.0, int(m)))
            err = np.max(np.abs(kappa - 1.0))
            assert np.isclose(err, 1.0 - np.cos(np.pi / m), rtol=1e-9)
            errors.append(err)
        order = -np.polyfit(np.log(node_counts), np.log(errors), 1)[0]
        assert order >= 1.9

    def test_translation_invariance_bitwise_on_dyadic_grid(self):
        # coordinates and offsets exactly representable, so the additions
        # are exact and the curvature values must match bit for bit
        rng = np.random.default_rng(11)
        base = random_star_curve(rng, node_count=32)
        nodes = np.round(base.nodes * 1024.0) / 1024.0
        curve = CurveState(nodes)
        shifted = CurveState(nodes + np.array([5.0, -3.0]))
        assert np.array_equal(discrete_curvature(curve), discrete_curvature(shifted))

    def test_translation_invariance_general(self):
        curve = build_radial_curve(5, 0.65, 200)
        shifted = CurveState(curve.nodes + np.array([5.0, -3.0]))
        assert np.allclose(
            discrete_curvature(curve), discrete_curvature(shifted), rtol=1e-9, atol=1e-9
        )


class TestAreaAndLength:
    def test_unit_square_area(self):
        assert enclosed_area(load_polyline(UNIT_SQUARE)) == 1.0

    def test_regular_200gon_area(self):
        area = enclosed_area(build_circle(1.0, 200))
        assert np.isclose(area, 100.0 * np.sin(np.pi / 100), rtol=1e-12)
        assert abs(area - 3.14108) < 1e-5

    def test_five_fold_area_matches_quadrature(self):
        curve = build_radial_curve(5, 0.65, 200)
        oracle = polar_area(5, 0.65)
        assert np.isclose(oracle, np.pi * (1 + 0.65**2 / 2), rtol=1e-10)
        assert abs(enclosed_area(curve) - oracle) / oracle <= 3e-3

    def test_unit_square_length(self):
        assert curve_length(segment_lengths(load_polyline(UNIT_SQUARE))) == 4.0

    def test_polygon_perimeter(self):
        for m in (100, 400):
            length = curve_length(segment_lengths(build_circle(1.0, m)))
            assert np.isclose(length, 2 * m * np.sin(np.pi / m), rtol=1e-12)
        assert abs(length - 2 * np.pi) < 1e-4


class TestShapeDiagnostics:
    def test_regular_polygon(self):
        for m in (64, 200):
            diag = shape_diagnostics(build_circle(1.0, m))
            assert np.isclose(diag.isoperimetric_ratio, (m / np.pi) * np.tan(np.pi / m), rtol=1e-12)
            assert diag.isoperimetric_ratio >= 1.0
            assert abs(diag.uniformity_ratio - 1.0) < 1e-12

    def test_unit_square(self):
        diag = shape_diagnostics(load_polyline(UNIT_SQUARE))
        assert np.isclose(diag.isoperimetric_ratio, 4.0 / np.pi, rtol=1e-12)

    def test_five_fold_vs_quadrature(self):
        curve = build_radial_curve(5, 0.65, 200)
        diag = shape_diagnostics(curve)
        oracle = arc_length(5, 0.65) ** 2 / (4 * np.pi * polar_area(5, 0.65))
        assert diag.isoperimetric_ratio > 1.2
        assert abs(diag.isoperimetric_ratio - oracle) / oracle <= 5e-3

    def test_rejects_clockwise(self):
        with pytest.raises(ValueError, match="positive"):
            shape_diagnostics(load_polyline(UNIT_SQUARE[::-1]))


class TestInvariantProperties:
    def test_euclidean_invariance(self):
        from support import check_euclidean_invariance

        rng = np.random.default_rng(101)
        for _ in range(5):
            check_euclidean_invariance(
                random_star_curve(rng), float(rng.uniform(0, 2 * np.pi)), rng.uniform(-5, 5, 2)
            )

    def test_scaling_covariance(self):
        from support import check_scaling_covariance

        rng = np.random.default_rng(103)
        for _ in range(5):
            check_scaling_covariance(random_star_curve(rng), float(rng.uniform(0.1, 10.0)))

    def test_gauss_bonnet(self):
        from support import check_gauss_bonnet

        check_gauss_bonnet()

    def test_orientation_antisymmetry(self):
        from support import check_orientation_antisymmetry

        rng = np.random.default_rng(107)
        for _ in range(5):
            check_orientation_antisymmetry(random_star_curve(rng))


class TestGeometryCache:
    def test_consistent_with_individual_ops(self):
        curve = build_radial_curve(5, 0.65, 200)
        geo = compute_geometry(curve)
        d = segment_lengths(curve)
        assert np.array_equal(geo.d, d)
        assert np.array_equal(geo.dual, dual_lengths(d))
        assert np.array_equal(geo.kappa, discrete_curvature(curve, d))
        assert geo.total_length == curve_length(d)
        assert geo.area == enclosed_area(curve)
        assert not geo.d.flags.writeable
