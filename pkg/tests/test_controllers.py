import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from emoswarm import engine
from emoswarm.controllers import (
    DiffeoParams,
    UniControl,
    coverage_controls,
    coverage_rollout,
    coverage_si,
    goto_goal_si,
    lookahead_velocity,
    saturate,
    si_to_uni,
)
from emoswarm.densities import DensityField
from emoswarm.dynamics import Pose
from emoswarm.geometry import Domain
from emoswarm.metrics import swarm_metrics

from oracles import lookahead_fd_velocity

UNIT = Domain.from_size(1.0, 1.0)
finite = dict(allow_nan=False, allow_infinity=False)


class TestDiffeoParams:
    @pytest.mark.parametrize("l,K", [(0.0, 1.0), (0.1, 0.0), (-1.0, 1.0)])
    def test_invalid(self, l, K):
        with pytest.raises(ValueError):
            DiffeoParams(l, K)


class TestGotoGoal:
    def test_equilibrium(self):
        np.testing.assert_array_equal(goto_goal_si([0.3, 0.4], [0.3, 0.4]), [0.0, 0.0])

    def test_subtraction(self):
        np.testing.assert_array_equal(goto_goal_si([0.0, 0.0], [1.0, 2.0]), [1.0, 2.0])

    def test_exponential_decay(self):
        dt, target = 0.01, np.array([0.7, -0.2])
        p = np.array([0.0, 0.0])
        d0 = np.hypot(*(p - target))
        dist = [d0]
        for _ in range(300):
            p = p + dt * goto_goal_si(p, target)
            dist.append(np.hypot(*(p - target)))
        t = dt * np.arange(301)
        rate = -np.polyfit(t, np.log(dist), 1)[0]
        assert rate == pytest.approx(1.0, rel=0.01)
        assert np.max(np.abs(np.array(dist) / d0 - np.exp(-t))) < 0.01


class TestSiToUni:
    def test_aligned(self):
        cmd = si_to_uni(np.array([1.0, 0.0]), 0.0, DiffeoParams(0.1, 1.0))
        assert (cmd.v, cmd.omega) == pytest.approx((1.0, 0.0))

    def test_pure_rotation(self):
        cmd = si_to_uni(np.array([0.0, 1.0]), 0.0, DiffeoParams(0.1, 1.0))
        assert (cmd.v, cmd.omega) == pytest.approx((0.0, 10.0))

    def test_vectorized(self):
        u = np.random.default_rng(0).normal(size=(7, 2))
        th = np.linspace(-3, 3, 7)
        prm = DiffeoParams(0.2, 1.5)
        both = si_to_uni(u, th, prm)
        for i in range(7):
            one = si_to_uni(u[i], th[i], prm)
            assert (both.v[i], both.omega[i]) == (one.v, one.omega)

    @settings(max_examples=200, deadline=None)
    @given(
        st.floats(-math.pi, math.pi),
        st.floats(-2, 2),
        st.floats(-2, 2),
        st.floats(0.05, 10),
        st.floats(0.005, 2),
    )
    def test_lookahead_identity(self, theta, ux, uy, K, l):
        u = np.array([ux, uy])
        cmd = si_to_uni(u, theta, DiffeoParams(l, K))
        np.testing.assert_allclose(lookahead_velocity(theta, cmd, l), K * u, rtol=0, atol=1e-12 * max(1.0, K * 2))

    def test_lookahead_finite_difference(self):
        rng = np.random.default_rng(3)
        for _ in range(200):
            theta = rng.uniform(-math.pi, math.pi)
            u = rng.uniform(-1, 1, 2)
            K, l = rng.uniform(0.1, 3.0), rng.uniform(0.02, 0.5)
            cmd = si_to_uni(u, theta, DiffeoParams(l, K))
            fd = lookahead_fd_velocity(Pose(0.1, -0.2, theta), UniControl(float(cmd.v), float(cmd.omega)), l)
            np.testing.assert_allclose(fd, K * u, atol=1e-3)

    @settings(max_examples=100, deadline=None)
    @given(
        st.floats(-math.pi, math.pi),
        st.lists(st.floats(-3, 3), min_size=4, max_size=4),
        st.floats(-3, 3),
        st.floats(-3, 3),
    )
    def test_linearity(self, theta, comps, a, b):
        prm = DiffeoParams(0.15, 1.3)
        u1, u2 = np.array(comps[:2]), np.array(comps[2:])
        lhs = si_to_uni(a * u1 + b * u2, theta, prm)
        r1, r2 = si_to_uni(u1, theta, prm), si_to_uni(u2, theta, prm)
        assert lhs.v == pytest.approx(a * r1.v + b * r2.v, abs=1e-12)
        assert lhs.omega == pytest.approx(a * r1.omega + b * r2.omega, abs=1e-10)

    @settings(max_examples=100, deadline=None)
    @given(st.floats(-math.pi, math.pi), st.floats(-2, 2), st.floats(-2, 2), st.floats(0.1, 5), st.floats(0.01, 1))
    def test_gain_scaling(self, theta, ux, uy, K, l):
        u = np.array([ux, uy])
        base = si_to_uni(u, theta, DiffeoParams(l, K))
        double_k = si_to_uni(u, theta, DiffeoParams(l, 2 * K))
        double_l = si_to_uni(u, theta, DiffeoParams(2 * l, K))
        assert double_k.v == 2 * base.v
        assert double_k.omega == pytest.approx(2 * base.omega, rel=1e-15, abs=1e-300)
        assert double_l.v == base.v
        assert double_l.omega == pytest.approx(base.omega / 2, rel=1e-15, abs=1e-300)


class TestCoverage:
    def test_fixed_point(self):
        u = coverage_si([[0.5, 0.5]], 0, DensityField("uniform", UNIT), UNIT)
        np.testing.assert_allclose(u, [0.0, 0.0], atol=1e-12)

    def test_single_robot_pull(self):
        u = coverage_si([[0.2, 0.2]], 0, DensityField("uniform", UNIT), UNIT)
        np.testing.assert_allclose(u, [0.3, 0.3], atol=1e-6)

    def test_kappa_scales(self):
        phi = DensityField("gaussian_center", UNIT)
        p = np.random.default_rng(1).uniform(0.1, 0.9, (5, 2))
        u1, c1 = coverage_controls(p, phi, UNIT, 1.0)
        u3, c3 = coverage_controls(p, phi, UNIT, 3.0)
        np.testing.assert_allclose(u3, 3 * u1)
        np.testing.assert_array_equal(c1, c3)

    def test_bad_kappa(self):
        with pytest.raises(ValueError):
            coverage_controls([[0.5, 0.5]], DensityField("uniform", UNIT), UNIT, 0.0)

    def test_si_matches_batch(self):
        phi = DensityField("boundary", UNIT)
        p = np.random.default_rng(2).uniform(0.1, 0.9, (6, 2))
        u, _ = coverage_controls(p, phi, UNIT)
        np.testing.assert_array_equal(coverage_si(p, 4, phi, UNIT), u[4])

    @pytest.mark.slow
    def test_ten_robots_become_centroidal(self):
        p0 = np.random.default_rng(10).uniform(0.05, 0.95, (10, 2))
        out = coverage_rollout(p0, DensityField("uniform", UNIT), UNIT, 20.0, 0.01)
        assert out["positions"].shape == (2001, 10, 2)
        assert out["gaps"][-1] < 1e-2
        assert np.all(np.diff(out["cost"]) <= 0)

    def test_descent_on_short_rollouts(self):
        for seed in range(3):
            p0 = np.random.default_rng(seed).uniform(0.05, 0.95, (6, 2))
            for kind in ("uniform", "gaussian_center"):
                out = coverage_rollout(p0, DensityField(kind, UNIT), UNIT, 0.5, 0.05)
                assert np.all(np.diff(out["cost"]) <= 0)


class TestSaturate:
    def test_inside_box(self):
        assert saturate(UniControl(0.5, 1.0), 1.0, 2.0) == (0.5, 1.0)

    def test_clamps(self):
        assert saturate(UniControl(3.0, -5.0), 1.0, 2.0) == (1.0, -2.0)

    def test_disabled(self):
        assert saturate(UniControl(3.0, -5.0), None, None) == (3.0, -5.0)

    def test_vectorized_sign_preserved(self):
        out = saturate(UniControl(np.array([-3.0, 0.2]), np.array([9.0, -0.1])), 1.0, 2.0)
        np.testing.assert_array_equal(out.v, [-1.0, 0.2])
        np.testing.assert_array_equal(out.omega, [2.0, -0.1])

    @pytest.mark.parametrize("limits", [(0.0, 1.0), (1.0, -1.0)])
    def test_bad_limits(self, limits):
        with pytest.raises(ValueError):
            saturate(UniControl(1.0, 1.0), *limits)

    def test_tight_limits_slow_anger_down(self):
        loose = engine.default_spec("anger", UNIT).without_saturation()
        tight = engine.apply_overrides(loose, {"v_max": "0.05", "omega_max": "1.0"}, UNIT)
        a = engine.run(loose, 8, UNIT, 2.0, 0.01, 3)
        b = engine.run(tight, 8, UNIT, 2.0, 0.01, 3)
        assert not np.array_equal(a.poses, b.poses)
        assert swarm_metrics(a)[-1]["peak_speed"] > swarm_metrics(b)[-1]["peak_speed"]
        assert np.abs(b.cmds[:, :, 0]).max() <= 0.05
