"""Tests for the walk-on-spheres Robin estimator and its oracles."""

import math

import numpy as np
import pytest

from hopfsurf.domains import LevelBand, Nemirovskii, translate_domain
from hopfsurf.errors import EvaluationError, InvalidInputError
from hopfsurf.invariants import HopfParams, Numeric, derive_invariants
from hopfsurf.robin import (Ball, ExperimentBudget, HalfSpace, WosConfig,
                            ball_oracle, boundary_behavior_experiment,
                            half_space_from_theta, half_space_oracle,
                            identity_point, kernel, product_half_plane_oracle,
                            psh_spot_check, robin_constant,
                            solvable_from_translate)

P24 = HopfParams(2 + 0j, 4 + 0j)
INV24 = derive_invariants(P24, Numeric())
E = identity_point()


class TestOracles:
    def test_ball(self):
        assert ball_oracle(1.0) == -1.0
        assert ball_oracle(2.0) == -0.25

    def test_half_space(self):
        assert half_space_oracle(1.0) == -0.25
        assert half_space_oracle(0.5) == -1.0

    def test_product_half_plane(self):
        assert product_half_plane_oracle(0.0) == pytest.approx(-0.25)
        assert product_half_plane_oracle(math.pi / 3) == pytest.approx(-1.0)

    def test_kernel_decay(self):
        assert kernel(2.0) == pytest.approx(0.25)


class TestRobinConstant:
    def test_centered_ball_is_exact(self):
        # a walk from the center exits in a single step at radius R
        est = robin_constant(Ball(center=tuple(E), radius=1.0), E, 10_000,
                             12345)
        assert est.lambda_hat == -1.0
        assert est.stderr < 1e-15

    def test_half_space_matches_reflection_oracle(self):
        hs = HalfSpace(normal=(0.0, 0.0, 1.0, 0.0), offset=0.0)
        est = robin_constant(hs, E, 50_000, 12345)
        oracle = half_space_oracle(1.0)
        assert est.stderr < 0.02
        assert abs(est.lambda_hat - oracle) < 3 * est.stderr

    def test_product_half_plane_matches_images_oracle(self):
        theta = math.pi / 3
        est = robin_constant(half_space_from_theta(theta), E, 50_000, 12345)
        assert abs(est.lambda_hat - product_half_plane_oracle(theta)) \
            < 3 * est.stderr

    def test_deterministic_across_shards(self):
        hs = HalfSpace(normal=(0.0, 0.0, 1.0, 0.0), offset=0.0)
        values = {robin_constant(hs, E, 20_000, 777,
                                 config=WosConfig(shards=s)).lambda_hat
                  for s in (1, 2, 5)}
        assert len(values) == 1

    def test_monotone_in_radius(self):
        # larger domain -> larger (less negative) Robin constant
        vals = [robin_constant(Ball(center=tuple(E), radius=r), E, 1000,
                               5).lambda_hat for r in (0.5, 1.0, 2.0, 4.0)]
        assert vals == sorted(vals)

    def test_pole_outside_rejected(self):
        with pytest.raises(EvaluationError):
            robin_constant(Ball(center=tuple(E), radius=1.0),
                           np.array([9.0, 9.0, 9.0, 9.0]), 100, 0)

    def test_screened_ball_matches_ode_oracle(self):
        c = 0.5
        est = robin_constant(Ball(center=tuple(E), radius=1.0), E, 10_000,
                             12345, c_weight=c)
        assert abs(est.lambda_hat - ball_oracle(1.0, c=c)) < 1e-6

    def test_screening_shrinks_the_magnitude(self):
        # killing lowers the exit weight, so the estimated constant moves
        # toward zero as c grows
        assert ball_oracle(1.0) < ball_oracle(1.0, c=0.5) < 0.0


class TestScalingLaw:
    def test_ball_oracle_scales_like_inverse_square(self):
        rng = np.random.default_rng(41)
        for _ in range(10):
            r = rng.uniform(0.3, 3.0)
            assert ball_oracle(r) == pytest.approx(-1.0 / r**2)


class TestBoundaryExperiment:
    def test_nemirovskii_rows_follow_images_law(self):
        spec = Nemirovskii(1.0, 0.0)
        import cmath
        anchors = [(1 + 0j, -cmath.exp(1j * th)) for th in (0.0, 1.0)]
        rows = boundary_behavior_experiment(
            spec, anchors, P24, inv=INV24,
            budget=ExperimentBudget(n_walks=20_000, seed=5))
        for row, th in zip(rows, (0.0, 1.0)):
            assert row.dist_lower == pytest.approx(math.cos(th))
            oracle = product_half_plane_oracle(th)
            assert abs(row.lambda_hat - oracle) < 3 * row.stderr + 1e-9


class TestPshSpotCheck:
    def test_nemirovskii_proxy_is_consistent(self):
        spec = Nemirovskii(1.0, 0.0)
        rep = psh_spot_check(spec, (1 + 0j, -1 + 0j), (0.3 + 0.1j, 0.2 - 0.4j),
                             0.05, 8, P24, inv=INV24,
                             budget=ExperimentBudget(n_walks=4000, seed=5))
        assert rep.consistent

    def test_identical_estimates_give_zero_residual(self):
        # synthetic control: a direction of length zero makes every ring
        # point coincide with the center, so the residual is exactly 0
        spec = Nemirovskii(1.0, 0.0)
        rep = psh_spot_check(spec, (1 + 0j, -1 + 0j), (0j, 0j), 0.05, 6, P24,
                             inv=INV24,
                             budget=ExperimentBudget(n_walks=2000, seed=5))
        assert rep.residual == 0.0
        assert rep.consistent


class TestSolvableAdapter:
    def test_modulus_region_distance_is_safe(self):
        td = translate_domain(LevelBand(0.5, 2.0),
                              (1.3 + 0j, 1.3 ** INV24.rho + 0j),
                              HopfParams(2 + 0j, 3 + 0j),
                              derive_invariants(HopfParams(2 + 0j, 3 + 0j),
                                                Numeric()))
        dom = solvable_from_translate(td)
        rng = np.random.default_rng(43)
        pts = np.column_stack([rng.uniform(0.5, 2.0, 200),
                               rng.uniform(-0.5, 0.5, 200),
                               rng.uniform(0.5, 2.0, 200),
                               rng.uniform(-0.5, 0.5, 200)])
        d = dom.distance(pts)
        inside = td.residual  # scalar residual on C* x C*
        for x, di in zip(pts, d):
            r = inside(complex(x[0], x[1]), complex(x[2], x[3]))
            assert di >= 0.0
            if r >= 0:
                assert di == 0.0
