"""Tests for exponential-sum evaluation, moments, and coordinate changes."""

from __future__ import annotations

import math

import numpy as np
import pytest

from sparse_kacrice import (
    DomainError,
    ExpSum,
    InputError,
    asymptotic_moment,
    density,
    density_many,
    evaluate,
    face_metric_limit,
    hessian_check,
    invert_moment,
    kostlan,
    legendre_density,
    potential,
    veronese,
    veronese_pullback_check,
)

TWO_TERM = ExpSum([[0.0], [1.0]])
IRREGULAR = ExpSum([[0.0], [0.5], [1.7]], [1.0, 2.0, 1.0])
SQUARE = kostlan(2, 1)


class TestConstruction:
    def test_default_unit_coefficients(self):
        E = ExpSum([[0.0], [1.0]])
        np.testing.assert_array_equal(np.asarray(E.coeffs), [1.0, 1.0])
        assert E.dim == 1
        assert E.n_terms == 2

    def test_rejects_nonpositive_coefficients(self):
        with pytest.raises(InputError):
            ExpSum([[0.0], [1.0]], [1.0, 0.0])
        with pytest.raises(InputError):
            ExpSum([[0.0], [1.0]], [1.0, -1.0])

    def test_rejects_length_mismatch(self):
        with pytest.raises(InputError):
            ExpSum([[0.0], [1.0]], [1.0])

    def test_json_round_trip(self):
        E = IRREGULAR
        back = ExpSum.from_json(E.to_json())
        np.testing.assert_array_equal(
            np.asarray(back.support.points), np.asarray(E.support.points)
        )
        np.testing.assert_array_equal(np.asarray(back.coeffs), np.asarray(E.coeffs))

    def test_from_json_rejects_garbage(self):
        with pytest.raises(InputError):
            ExpSum.from_json('{"schema": 1, "points": "nope"}')


class TestEvaluate:
    def test_two_term_at_origin(self):
        b = evaluate(TWO_TERM, [0.0])
        assert b.K == pytest.approx(2.0)
        assert b.phi == pytest.approx(0.5 * math.log(2.0))
        np.testing.assert_allclose(b.weights, [0.5, 0.5])
        assert b.mu[0] == pytest.approx(0.5)
        assert b.g.entries[0, 0] == pytest.approx(0.25)
        assert b.density == pytest.approx(1.0 / (2.0 * math.pi))

    def test_two_term_closed_form(self):
        # K = 1 + e^{2x}; g = (1/4) sech^2 x; density = sech(x)/(2 pi)
        for x in (-3.0, -0.7, 0.2, 2.5):
            b = evaluate(TWO_TERM, [x])
            assert b.K == pytest.approx(1.0 + math.exp(2 * x), rel=1e-14)
            assert b.g.entries[0, 0] == pytest.approx(
                0.25 / math.cosh(x) ** 2, rel=1e-13
            )
            assert b.density == pytest.approx(
                1.0 / (2.0 * math.pi * math.cosh(x)), rel=1e-13
            )

    def test_weights_sum_to_one(self):
        rng = np.random.default_rng(1)
        for _ in range(20):
            x = rng.uniform(-4, 4, size=2)
            b = evaluate(SQUARE, x)
            assert math.fsum(b.weights) == pytest.approx(1.0, abs=1e-12)
            assert np.all(b.weights > 0)
            np.testing.assert_allclose(
                b.mu,
                np.asarray(SQUARE.support.points).T @ b.weights,
                atol=1e-12,
            )

    def test_overflow_safe_far_out(self):
        b = evaluate(TWO_TERM, [400.0])
        assert b.K == math.inf  # raw scale overflows by design
        assert math.isfinite(b.phi)
        assert math.isfinite(b.density)
        assert b.mu[0] == pytest.approx(1.0)

    def test_potential_matches_bundle(self):
        for x in (-1.0, 0.3):
            assert potential(IRREGULAR, [x]) == pytest.approx(
                evaluate(IRREGULAR, [x]).phi
            )

    def test_density_many_matches_scalar(self):
        rng = np.random.default_rng(2)
        X = rng.uniform(-3, 3, size=(40, 2))
        batch = density_many(SQUARE, X)
        singles = [density(SQUARE, x) for x in X]
        np.testing.assert_allclose(batch, singles, rtol=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(InputError):
            evaluate(TWO_TERM, [0.0, 0.0])


class TestDerivatives:
    def test_gradient_and_hessian_residuals(self):
        rng = np.random.default_rng(3)
        for E in (TWO_TERM, IRREGULAR, SQUARE):
            for _ in range(5):
                x = rng.uniform(-2, 2, size=E.dim)
                rep = hessian_check(E, x)
                assert rep.grad_residual < 1e-6
                assert rep.hess_residual < 1e-5


class TestMomentInversion:
    def test_round_trip(self):
        rng = np.random.default_rng(4)
        for E in (TWO_TERM, IRREGULAR, SQUARE):
            pts = np.asarray(E.support.points)
            lo, hi = pts.min(axis=0), pts.max(axis=0)
            for _ in range(10):
                p = lo + (hi - lo) * rng.uniform(0.05, 0.95, size=E.dim)
                if E is IRREGULAR:
                    p = np.clip(p, 0.05, 1.65)
                x = invert_moment(E, p)
                np.testing.assert_allclose(evaluate(E, x).mu, p, atol=1e-9)

    def test_two_term_closed_form(self):
        # mu = expit(2x) so x = artanh(2p - 1)
        x = invert_moment(TWO_TERM, [0.99])
        assert x[0] == pytest.approx(math.atanh(0.98), rel=1e-12)

    def test_boundary_rejected(self):
        with pytest.raises(DomainError):
            invert_moment(TWO_TERM, [1.0])
        with pytest.raises(DomainError):
            invert_moment(TWO_TERM, [1.5])


class TestLegendreDensity:
    def test_two_term_midpoint(self):
        assert legendre_density(TWO_TERM, [0.5]) == pytest.approx(math.sqrt(2.0))

    def test_matches_metric_determinant(self):
        rng = np.random.default_rng(5)
        for _ in range(10):
            p = rng.uniform(0.05, 0.95, size=2)
            x = invert_moment(SQUARE, p)
            want = 1.0 / math.sqrt(np.linalg.det(2.0 * evaluate(SQUARE, x).g.entries))
            assert legendre_density(SQUARE, p) == pytest.approx(want, rel=1e-10)

    def test_near_boundary_rejected(self):
        with pytest.raises(DomainError):
            legendre_density(TWO_TERM, [1.0 - 1e-9])


class TestAtInfinity:
    def test_moment_limit_hits_face_barycenter(self):
        assert asymptotic_moment(TWO_TERM, [1.0])[0] == pytest.approx(1.0)
        assert asymptotic_moment(IRREGULAR, [-1.0])[0] == pytest.approx(0.0)
        # diagonal direction exposes the vertex (1, 1)
        np.testing.assert_allclose(asymptotic_moment(SQUARE, [1.0, 1.0]), [1.0, 1.0])
        # vertical direction exposes the top edge; equal coefficients center it
        np.testing.assert_allclose(asymptotic_moment(SQUARE, [0.0, 1.0]), [0.5, 1.0])

    def test_moment_limit_agrees_with_far_evaluation(self):
        u = np.array([0.0, 1.0])
        lim = asymptotic_moment(SQUARE, u)
        far = evaluate(SQUARE, 40.0 * u).mu
        np.testing.assert_allclose(far, lim, atol=1e-12)

    def test_face_metric_limit_vertex_is_zero(self):
        np.testing.assert_allclose(
            face_metric_limit(TWO_TERM, [1.0], [0.0]).entries, [[0.0]]
        )

    def test_face_metric_limit_edge(self):
        # top edge of the unit square behaves like a two-term sum in x1
        got = face_metric_limit(SQUARE, [0.0, 1.0], [0.0, 0.0])
        np.testing.assert_allclose(got.entries, [[0.25, 0.0], [0.0, 0.0]], atol=1e-14)

    def test_face_metric_limit_matches_far_evaluation(self):
        u = np.array([0.0, 1.0])
        y = np.array([0.3, 0.0])
        lim = face_metric_limit(SQUARE, u, y).entries
        far = evaluate(SQUARE, y + 30.0 * u).g.entries
        np.testing.assert_allclose(far, lim, atol=1e-10)


class TestVeronese:
    def test_unit_sphere_image(self):
        rng = np.random.default_rng(6)
        for _ in range(10):
            x = rng.uniform(-3, 3, size=2)
            v = veronese(SQUARE, x)
            assert np.linalg.norm(v) == pytest.approx(1.0, abs=1e-12)
            np.testing.assert_allclose(v**2, evaluate(SQUARE, x).weights, atol=1e-12)

    def test_pullback_matches_metric(self):
        rep = veronese_pullback_check(IRREGULAR, [0.4], 1e-5)
        assert rep.residual < 1e-6
        rep2 = veronese_pullback_check(SQUARE, [0.2, -0.3], 1e-5)
        assert rep2.residual < 1e-6
