"""Tests for product constructions and coefficient systems."""

from __future__ import annotations

import math

import numpy as np
import pytest

from sparse_kacrice import (
    CoeffSystem,
    ExpSum,
    InputError,
    aronszajn,
    aronszajn_power,
    density,
    density_bounds_check,
    evaluate,
    kostlan,
    tensor,
)

A2 = ExpSum([[0.0], [0.7]], [1.0, 2.0])
B3 = ExpSum([[0.1], [1.3], [2.0]], [0.5, 1.0, 1.5])


def _canonical(E):
    pts = np.asarray(E.support.points, dtype=float)
    cfs = np.asarray(E.coeffs, dtype=float)
    order = np.lexsort(pts.T[::-1])
    return pts[order], cfs[order]


class TestTensor:
    def test_shapes(self):
        T = tensor(A2, B3)
        assert T.dim == 2
        assert T.n_terms == 6

    def test_variance_multiplies_on_split_variables(self):
        rng = np.random.default_rng(20)
        T = tensor(A2, B3)
        for _ in range(10):
            x = rng.uniform(-2, 2, size=1)
            y = rng.uniform(-2, 2, size=1)
            want = evaluate(A2, x).K * evaluate(B3, y).K
            got = evaluate(T, np.concatenate([x, y])).K
            assert got == pytest.approx(want, rel=1e-12)

    def test_commutes_up_to_axis_swap(self):
        p1, c1 = _canonical(tensor(A2, B3))
        pts = np.asarray(tensor(B3, A2).support.points, dtype=float)[:, ::-1]
        cfs = np.asarray(tensor(B3, A2).coeffs, dtype=float)
        order = np.lexsort(pts.T[::-1])
        np.testing.assert_allclose(p1, pts[order])
        np.testing.assert_allclose(c1, cfs[order])

    def test_metric_is_block_diagonal(self):
        T = tensor(A2, B3)
        g = evaluate(T, [0.4, -0.2]).g.entries
        assert g[0, 1] == pytest.approx(0.0, abs=1e-14)
        assert g[0, 0] == pytest.approx(evaluate(A2, [0.4]).g.entries[0, 0], rel=1e-12)
        assert g[1, 1] == pytest.approx(evaluate(B3, [-0.2]).g.entries[0, 0], rel=1e-12)


class TestAronszajn:
    def test_variance_multiplies_pointwise(self):
        rng = np.random.default_rng(21)
        P = aronszajn(A2, B3)
        for _ in range(10):
            x = rng.uniform(-2, 2, size=1)
            want = evaluate(A2, x).K * evaluate(B3, x).K
            assert evaluate(P, x).K == pytest.approx(want, rel=1e-12)

    def test_commutative(self):
        p1, c1 = _canonical(aronszajn(A2, B3))
        p2, c2 = _canonical(aronszajn(B3, A2))
        np.testing.assert_allclose(p1, p2)
        np.testing.assert_allclose(c1, c2)

    def test_merges_coincident_sums(self):
        P = aronszajn(A2, A2)
        assert P.n_terms == 3  # {0, 0.7, 1.4}, middle point hit twice
        x = [0.3]
        assert evaluate(P, x).K == pytest.approx(evaluate(A2, x).K ** 2, rel=1e-12)

    def test_merge_tolerance_clusters_near_duplicates(self):
        Ea = ExpSum([[0.0], [1.0]])
        Eb = ExpSum([[0.0], [1.0 + 1e-12]])
        P = aronszajn(Ea, Eb, merge_tol=1e-9)
        assert P.n_terms == 3

    def test_dimension_mismatch(self):
        with pytest.raises(InputError):
            aronszajn(A2, kostlan(2, 1))


class TestAronszajnPower:
    def test_two_point_binomial_shortcut(self):
        P = aronszajn_power(ExpSum([[0.0], [1.0]]), 4)
        assert P.n_terms == 5
        pts, cfs = _canonical(P)
        np.testing.assert_allclose(pts.ravel(), [0.0, 1.0, 2.0, 3.0, 4.0])
        np.testing.assert_allclose(cfs**2, [1.0, 4.0, 6.0, 4.0, 1.0], rtol=1e-12)

    def test_matches_iterated_product(self):
        rng = np.random.default_rng(22)
        for d in (2, 3):
            P = aronszajn_power(B3, d)
            for _ in range(5):
                x = rng.uniform(-1.5, 1.5, size=1)
                want = evaluate(B3, x).K ** d
                assert evaluate(P, x).K == pytest.approx(want, rel=1e-12)

    def test_degree_one_is_identity(self):
        P = aronszajn_power(B3, 1)
        p1, c1 = _canonical(P)
        p0, c0 = _canonical(B3)
        np.testing.assert_allclose(p1, p0)
        np.testing.assert_allclose(c1, c0)

    def test_rejects_bad_degree(self):
        with pytest.raises(InputError):
            aronszajn_power(B3, 0)

    def test_overflow_degree_rejected(self):
        with pytest.raises(InputError):
            aronszajn_power(ExpSum([[0.0], [1.0]]), 3000)


class TestKostlan:
    def test_shapes(self):
        assert kostlan(1, 4).n_terms == 5
        assert kostlan(2, 3).n_terms == 16
        assert kostlan(3, 2).n_terms == 27

    def test_variance_closed_form(self):
        rng = np.random.default_rng(23)
        for m, d in ((1, 3), (2, 2), (3, 2)):
            K = kostlan(m, d)
            for _ in range(5):
                x = rng.uniform(-1, 1, size=m)
                want = float(np.prod((1.0 + np.exp(2.0 * x)) ** d))
                assert evaluate(K, x).K == pytest.approx(want, rel=1e-12)

    def test_equals_tensor_of_one_variable_factors(self):
        p1, c1 = _canonical(kostlan(2, 2))
        p2, c2 = _canonical(tensor(kostlan(1, 2), kostlan(1, 2)))
        np.testing.assert_allclose(p1, p2)
        np.testing.assert_allclose(c1, c2)

    def test_coefficient_system_alias(self):
        assert CoeffSystem is ExpSum

    def test_rejects_bad_arguments(self):
        with pytest.raises(InputError):
            kostlan(0, 2)
        with pytest.raises(InputError):
            kostlan(1, 0)
        with pytest.raises(InputError):
            kostlan(1, 3000)


class TestDensityBounds:
    def test_norm_inequality_holds(self):
        pairs = [
            (ExpSum([[0.0], [1.0]]), B3),
            (kostlan(2, 1), kostlan(2, 2)),
        ]
        for Ea, Eb in pairs:
            for x in (np.zeros(Ea.dim), np.full(Ea.dim, 0.4)):
                rep = density_bounds_check(Ea, Eb, x)
                assert rep.passed
                assert rep.lower_margin >= 0.0
                assert rep.upper_margin >= 0.0

    def test_product_density_between_scaled_factors(self):
        # scalar corollary of the norm inequality at matched evaluation points
        Ea, Eb = ExpSum([[0.0], [1.0]]), B3
        P = aronszajn(Ea, Eb)
        for x in ([-1.0], [0.0], [0.8]):
            da, db, dp = density(Ea, x), density(Eb, x), density(P, x)
            assert dp <= da + db + 1e-12
            assert dp >= max(da, db) / math.sqrt(2.0) - 1e-12

    def test_dimension_mismatch(self):
        with pytest.raises(InputError):
            density_bounds_check(A2, kostlan(2, 1), [0.0])
