"""Tests for support sets, convex data, and quadratic forms."""

from __future__ import annotations

import math

import numpy as np
import pytest

from sparse_kacrice import (
    InputError,
    QuadForm,
    SingularFormError,
    SupportSet,
    ball_sphere_constants,
    diameter,
    dual_form,
    ellipsoid_volume,
    exposed_face,
    form_det,
    hull_volume,
    interior_contains,
    support_function,
)

SQUARE = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]


class TestSupportSet:
    def test_basic_attributes(self):
        A = SupportSet([[0.0], [0.5], [1.7]])
        assert A.dim == 1
        assert len(np.asarray(A.points)) == 3

    def test_rejects_duplicates(self):
        with pytest.raises(InputError):
            SupportSet([[0.0], [1.0], [1.0 + 1e-15]])

    def test_rejects_non_finite(self):
        with pytest.raises(InputError):
            SupportSet([[0.0], [math.inf]])
        with pytest.raises(InputError):
            SupportSet([[0.0], [math.nan]])

    def test_rejects_empty(self):
        with pytest.raises(InputError):
            SupportSet(np.zeros((0, 1)))


class TestSupportFunction:
    def test_interval(self):
        A = SupportSet([[0.0], [0.3], [1.0]])
        assert support_function(A, [1.0]) == 1.0
        assert support_function(A, [-1.0]) == 0.0
        assert support_function(A, [2.0]) == 2.0

    def test_square_diagonal(self):
        A = SupportSet(SQUARE)
        assert support_function(A, [1.0, 1.0]) == 2.0

    def test_positive_homogeneity(self):
        rng = np.random.default_rng(0)
        A = SupportSet(rng.normal(size=(6, 2)))
        for _ in range(10):
            u = rng.normal(size=2)
            t = rng.uniform(0.1, 5.0)
            assert support_function(A, t * u) == pytest.approx(
                t * support_function(A, u), rel=1e-12
            )


class TestExposedFace:
    def test_vertex_face(self):
        A = SupportSet([[0.0], [0.3], [1.0]])
        F = exposed_face(A, [1.0])
        assert np.asarray(F.points).tolist() == [[1.0]]

    def test_edge_face(self):
        A = SupportSet(SQUARE)
        F = exposed_face(A, [0.0, 1.0])
        pts = sorted(np.asarray(F.points).tolist())
        assert pts == [[0.0, 1.0], [1.0, 1.0]]

    def test_face_of_face_is_smaller(self):
        A = SupportSet(SQUARE)
        F = exposed_face(A, [1.0, 1.0])
        assert np.asarray(F.points).tolist() == [[1.0, 1.0]]


class TestHullGeometry:
    def test_interval_volume(self):
        assert hull_volume(SupportSet([[0.0], [0.3], [1.0]])) == pytest.approx(1.0)

    def test_square_volume(self):
        assert hull_volume(SupportSet(SQUARE)) == pytest.approx(1.0)

    def test_triangle_volume(self):
        A = SupportSet([[0.0, 0.0], [2.0, 0.0], [0.0, 2.0]])
        assert hull_volume(A) == pytest.approx(2.0)

    def test_degenerate_volume_is_zero(self):
        A = SupportSet([[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]])
        assert hull_volume(A) == 0.0
        assert A.degenerate

    def test_diameter(self):
        assert diameter(SupportSet(SQUARE)) == pytest.approx(math.sqrt(2.0))

    def test_interior_contains(self):
        A = SupportSet(SQUARE)
        assert interior_contains(A, [0.5, 0.5], 1e-9)
        assert not interior_contains(A, [1.0, 0.5], 1e-9)
        assert not interior_contains(A, [1.5, 0.5], 1e-9)

    def test_interior_margin_is_respected(self):
        A = SupportSet([[0.0], [1.0]])
        assert interior_contains(A, [0.05], 1e-3)
        assert not interior_contains(A, [0.05], 0.1)


class TestBallSphereConstants:
    def test_frozen_values(self):
        b1, s1 = ball_sphere_constants(1)
        b2, s2 = ball_sphere_constants(2)
        b3, s3 = ball_sphere_constants(3)
        assert b1 == pytest.approx(2.0)
        assert s1 == pytest.approx(2.0 * math.pi)
        assert b2 == pytest.approx(math.pi)
        assert s2 == pytest.approx(4.0 * math.pi)
        assert b3 == pytest.approx(4.0 * math.pi / 3.0)
        assert s3 == pytest.approx(2.0 * math.pi**2)

    def test_recursion_between_ball_and_sphere(self):
        # s_m = (m+1) b_{m+1}: the sphere bounds the one-higher ball.
        for m in range(1, 6):
            _, s_m = ball_sphere_constants(m)
            b_next, _ = ball_sphere_constants(m + 1)
            assert s_m == pytest.approx((m + 1) * b_next, rel=1e-12)


class TestQuadForm:
    def test_symmetrized_by_construction(self):
        Q = QuadForm([[1.0, 0.5], [0.4, 1.0]])
        np.testing.assert_array_equal(Q.entries, Q.entries.T)
        assert Q.entries[0, 1] == pytest.approx(0.45)

    def test_evaluate(self):
        Q = QuadForm([[2.0, 0.0], [0.0, 3.0]])
        assert Q([1.0, 1.0]) == pytest.approx(5.0)

    def test_det_and_dual(self):
        Q = QuadForm([[0.25]])
        assert form_det(Q) == pytest.approx(0.25)
        assert dual_form(Q).entries[0, 0] == pytest.approx(4.0)

    def test_dual_is_involutive(self):
        rng = np.random.default_rng(3)
        for _ in range(10):
            M = rng.normal(size=(3, 3))
            Q = QuadForm(M @ M.T + 0.5 * np.eye(3))
            back = dual_form(dual_form(Q))
            np.testing.assert_allclose(back.entries, Q.entries, rtol=1e-10)

    def test_singular_dual_raises(self):
        with pytest.raises(SingularFormError):
            dual_form(QuadForm([[1.0, 1.0], [1.0, 1.0]]))

    def test_ellipsoid_volume(self):
        # vol{x : <Q^{-1} x, x> <= 1} = b_m sqrt(det Q)
        Q = QuadForm([[4.0, 0.0], [0.0, 9.0]])
        assert ellipsoid_volume(Q) == pytest.approx(math.pi * 6.0)
