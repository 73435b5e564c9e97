"""Tests for expected-zero-count integrals on both coordinate routes."""

from __future__ import annotations

import math

import numpy as np
import pytest

from sparse_kacrice import (
    ConvergenceError,
    ExpSum,
    InputError,
    Quadrature,
    esol_pspace,
    esol_region,
    esol_total,
    kostlan,
    lower_bound_check,
)

TWO_TERM = ExpSum([[0.0], [1.0]])
IRREGULAR = ExpSum([[0.0], [0.5], [1.7]], [1.0, 2.0, 1.0])


class TestQuadratureConfig:
    def test_defaults(self):
        q = Quadrature()
        assert q.scheme == "auto"
        assert q.box == "auto"

    def test_rejects_bad_scheme(self):
        with pytest.raises(InputError):
            Quadrature(scheme="monte-carlo")

    def test_rejects_bad_tolerances(self):
        with pytest.raises(InputError):
            Quadrature(abs_tol=0.0)
        with pytest.raises(InputError):
            Quadrature(rel_tol=-1.0)


class TestTotalOneVariable:
    def test_two_term_closed_form(self):
        r = esol_total(TWO_TERM)
        assert r.route == "x"
        assert r.cells > 0
        assert r.value == pytest.approx(0.5, abs=1e-9)
        assert r.error < 1e-6

    def test_binomial_family_closed_form(self):
        for d in range(1, 5):
            r = esol_total(kostlan(1, d))
            assert r.value == pytest.approx(math.sqrt(d) / 2.0, abs=1e-7)

    def test_irregular_regression(self):
        r = esol_total(IRREGULAR)
        assert r.value == pytest.approx(0.7794992279, abs=1e-6)

    def test_explicit_box_matches_auto(self):
        auto = esol_total(TWO_TERM)
        boxed = esol_total(TWO_TERM, Quadrature(box=[(-40.0, 40.0)]))
        assert boxed.value == pytest.approx(auto.value, abs=1e-9)

    def test_translation_invariance(self):
        shifted = ExpSum([[5.0], [6.0]])
        r = esol_total(shifted)
        assert r.value == pytest.approx(0.5, abs=1e-9)

    def test_dilation_invariance_of_two_point_support(self):
        # a two-point sum has 0 or 1 zeros by sign alone, so the expected
        # count stays 1/2 no matter how far apart the exponents sit
        wide = ExpSum([[0.0], [3.0]])
        r = esol_total(wide)
        assert r.value == pytest.approx(0.5, abs=1e-8)

    def test_degenerate_support_is_zero(self):
        r = esol_total(ExpSum([[2.0]]))
        assert r.value == 0.0
        assert r.cells == 0


class TestTotalTwoVariables:
    def test_unit_square(self):
        r = esol_total(kostlan(2, 1))
        assert r.value == pytest.approx(math.pi / 8.0, rel=1e-8)

    def test_degree_two_square(self):
        r = esol_total(kostlan(2, 2))
        assert r.value == pytest.approx(math.pi / 4.0, rel=1e-8)

    def test_degenerate_planar_support_is_zero(self):
        E = ExpSum([[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]])
        assert esol_total(E).value == 0.0


class TestRegion:
    def test_half_line_splits_symmetric_mass(self):
        r = esol_region(TWO_TERM, [(0.0, 40.0)])
        assert r.value == pytest.approx(0.25, abs=1e-9)

    def test_regions_add_up(self):
        left = esol_region(IRREGULAR, [(-30.0, 0.5)])
        right = esol_region(IRREGULAR, [(0.5, 30.0)])
        total = esol_total(IRREGULAR)
        assert left.value + right.value == pytest.approx(total.value, abs=1e-6)

    def test_quadrant_of_square_ensemble(self):
        r = esol_region(kostlan(2, 1), [(0.0, 30.0), (0.0, 30.0)])
        assert r.value == pytest.approx(math.pi / 32.0, rel=1e-6)


class TestMomentRoute:
    def test_two_term_agrees(self):
        r = esol_pspace(TWO_TERM)
        assert r.route == "p"
        assert r.value == pytest.approx(0.5, abs=1e-4)
        assert abs(r.value - 0.5) <= r.error + 1e-6

    def test_unit_square_agrees(self):
        r = esol_pspace(kostlan(2, 1))
        assert r.value == pytest.approx(math.pi / 8.0, abs=1e-3)

    def test_irregular_agrees_with_native_route(self):
        a = esol_total(IRREGULAR)
        b = esol_pspace(IRREGULAR)
        assert abs(a.value - b.value) < 1e-3

    def test_three_variables_unsupported(self):
        with pytest.raises(InputError):
            esol_pspace(kostlan(3, 1))

    def test_degenerate_support_is_zero(self):
        assert esol_pspace(ExpSum([[2.0]])).value == 0.0


class TestConvergenceFailure:
    def test_unreachable_tolerance_carries_partial_value(self):
        with pytest.raises(ConvergenceError) as info:
            esol_total(TWO_TERM, Quadrature(abs_tol=1e-300, rel_tol=1e-300))
        assert info.value.value == pytest.approx(0.5, abs=1e-6)


class TestLowerBound:
    def test_two_term_frozen_bound(self):
        rep = lower_bound_check(TWO_TERM)
        assert not rep.degenerate
        assert rep.bound == pytest.approx(1.0 / (2.0 * math.pi), rel=1e-12)
        assert rep.strict
        assert rep.esol - rep.esol_error > rep.bound

    def test_unit_square_frozen_bound(self):
        rep = lower_bound_check(kostlan(2, 1))
        assert rep.bound == pytest.approx(1.0 / (16.0 * math.pi), rel=1e-12)
        assert rep.strict

    def test_every_nondegenerate_example_is_strict(self):
        for E in (TWO_TERM, IRREGULAR, kostlan(1, 3), kostlan(2, 2)):
            rep = lower_bound_check(E)
            assert rep.strict, E

    def test_degenerate_support_flagged(self):
        rep = lower_bound_check(ExpSum([[2.0]]))
        assert rep.degenerate
        assert not rep.strict
