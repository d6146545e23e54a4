"""Window math, sampling order, rollout exactness, filtering, and critics."""

import math

import numpy as np
import pytest

from oracles import rollout_closed_form

from nudgenav.dwa import (Candidate, CriticWeights, DynamicWindow, OscillationState,
                          dynamic_window, evaluate_candidates, evaluate_critics,
                          filter_free, rollout, sample_controls, single_step)
from nudgenav.geometry import normalize_angle
from nudgenav.planner import GlobalPath
from nudgenav.world import (ControlInput, Costmap, OccupancyGrid,
                            ParameterSet, Pose, inflate)


def flat_costmap(size=60, resolution=0.1):
    cost = np.zeros((size, size), dtype=np.uint8)
    return Costmap(resolution=resolution, origin=Pose(0, 0, 0), cost=cost)


def straight_path(x0=0.0, x1=5.0, y=0.0):
    xs = np.linspace(x0, x1, 101)
    return GlobalPath(np.stack([xs, np.full_like(xs, y)], axis=1))


class TestDynamicWindow:
    def test_from_rest(self):
        p = ParameterSet(v_max=1.0, omega_max=1.0, accel_v=2.0, accel_omega=3.0,
                         window_horizon=0.25)
        w = dynamic_window(ControlInput(0.0, 0.0), p)
        assert (w.v_lo, w.v_hi) == (0.0, 0.5)
        assert (w.omega_lo, w.omega_hi) == (-0.75, 0.75)

    def test_v_clamped_at_limit(self):
        p = ParameterSet()
        w = dynamic_window(ControlInput(1.0, 0.0), p)
        assert w.v_hi == 1.0

    def test_omega_clamped(self):
        p = ParameterSet()
        w = dynamic_window(ControlInput(0.5, 0.9), p)
        assert w.omega_lo == pytest.approx(0.15)
        assert w.omega_hi == 1.0

    def test_reversing_plant_collapses_to_zero(self):
        # Manual reverse: autonomous candidates still never go backwards.
        p = ParameterSet()
        w = dynamic_window(ControlInput(-0.64, 0.0), p)
        assert w.v_lo == 0.0 and w.v_hi == 0.0


class TestSampling:
    def test_even_spacing(self):
        p = ParameterSet(v_samples=11, omega_samples=2)
        window = DynamicWindow(0.0, 0.5, -0.1, 0.1)
        cands = sample_controls(window, p)
        vs = sorted({c.u.v for c in cands})
        diffs = np.diff(vs)
        assert np.allclose(diffs, 0.05, atol=1e-15)
        assert vs[0] == 0.0 and vs[-1] == 0.5

    def test_degenerate_window_collapses(self):
        p = ParameterSet(v_samples=5, omega_samples=3)
        cands = sample_controls(DynamicWindow(0.2, 0.2, -0.1, 0.1), p)
        assert {c.u.v for c in cands} == {0.2}

    def test_count_and_order(self):
        p = ParameterSet(v_samples=11, omega_samples=21)
        cands = sample_controls(DynamicWindow(0.0, 1.0, -1.0, 1.0), p)
        assert len(cands) == 231
        # v-major: the first 21 candidates share the lowest v, omega ascending.
        assert all(c.u.v == 0.0 for c in cands[:21])
        omegas = [c.u.omega for c in cands[:21]]
        assert omegas == sorted(omegas)
        assert cands[21].u.v > 0.0


class TestRollout:
    def test_zero_control_stays_put(self, params):
        start = Pose(1.0, 2.0, 0.5)
        traj = rollout(start, ControlInput(0.0, 0.0), params)
        assert len(traj) == params.rollout_steps() + 1
        assert all(p == start for p in traj)

    def test_straight_line(self, params):
        traj = rollout(Pose(0, 0, 0), ControlInput(1.0, 0.0), params)
        final = traj[-1]
        assert final.x == pytest.approx(1.5, abs=1e-12)
        assert final.y == pytest.approx(0.0, abs=1e-12)

    def test_quarter_circle(self):
        p = ParameterSet(rollout_horizon=math.pi / 2, rollout_step=math.pi / 20)
        traj = rollout(Pose(0, 0, 0), ControlInput(1.0, 1.0), p)
        final = traj[-1]
        assert final.x == pytest.approx(1.0, abs=1e-9)
        assert final.y == pytest.approx(1.0, abs=1e-9)
        assert final.theta == pytest.approx(math.pi / 2, abs=1e-9)

    def test_thousand_random_match_closed_form(self, params):
        rng = np.random.default_rng(1234)
        for _ in range(1000):
            start = Pose(float(rng.uniform(-10, 10)), float(rng.uniform(-10, 10)),
                         float(rng.uniform(-math.pi, math.pi)))
            v = float(rng.uniform(-1, 1))
            omega = float(rng.choice([0.0, 1e-12, 1.0]) if rng.random() < 0.1
                          else rng.uniform(-1, 1))
            traj = rollout(start, ControlInput(v, omega), params)
            oracle = rollout_closed_form(start, v, omega, params.rollout_step,
                                         params.rollout_steps())
            for pose, (ox, oy, oth) in zip(traj, oracle):
                assert abs(pose.x - ox) < 1e-9
                assert abs(pose.y - oy) < 1e-9
                assert abs(normalize_angle(pose.theta - oth)) < 1e-9

    def test_single_step_matches_rollout_prefix(self):
        p = ParameterSet(rollout_step=0.05)
        start = Pose(0.3, 0.4, 0.2)
        u = ControlInput(0.7, -0.5)
        assert single_step(start, u, 0.05) == rollout(start, u, p)[1]


class TestFilterFree:
    def test_empty_costmap_all_feasible(self, params):
        cm = flat_costmap()
        cands = sample_controls(DynamicWindow(0.0, 0.5, -0.5, 0.5), params)
        start = Pose(3.0, 3.0, 0.0)
        for c in cands:
            c.trajectory = rollout(start, c.u, params)
        filter_free(cands, cm, params.footprint(), OscillationState(), params)
        assert all(c.feasible for c in cands)

    def test_wall_ahead_blocks_fast_straight(self, params):
        # Wall half a meter ahead of the robot.
        occ = np.zeros((60, 60), dtype=bool)
        occ[:, 36] = True
        grid = OccupancyGrid(0.1, Pose(0, 0, 0), occ)
        cm = inflate(grid, params.footprint(), params.inflation_radius)
        start = Pose(3.1, 3.0, 0.0)
        window = DynamicWindow(0.0, 0.5, -0.5, 0.5)
        cands = sample_controls(window, params)
        for c in cands:
            c.trajectory = rollout(start, c.u, params)
        filter_free(cands, cm, params.footprint(), OscillationState(), params)
        for c in cands:
            if c.u.v == window.v_hi and c.u.omega == 0.0:
                assert not c.feasible

    def test_zero_candidate_always_feasible(self, params):
        cm = flat_costmap()
        cands = [Candidate(u=ControlInput(0.0, 0.0))]
        cands[0].trajectory = rollout(Pose(1.0, 1.0, 0.0), cands[0].u, params)
        filter_free(cands, cm, params.footprint(), OscillationState(), params)
        assert cands[0].feasible

    def test_feasible_flags_match_pose_oracle(self, params):
        from oracles import braking_stop_poses
        from nudgenav.world import footprint_collides
        occ = np.zeros((60, 60), dtype=bool)
        occ[20:40, 30:33] = True
        grid = OccupancyGrid(0.1, Pose(0, 0, 0), occ)
        cm = inflate(grid, params.footprint(), params.inflation_radius)
        start = Pose(2.4, 3.0, 0.0)
        cands = sample_controls(DynamicWindow(0.0, 1.0, -1.0, 1.0), params)
        for c in cands:
            c.trajectory = rollout(start, c.u, params)
        filter_free(cands, cm, params.footprint(), OscillationState(), params)
        for c in cands:
            hits = any(footprint_collides(p, params.footprint(), cm) for p in c.trajectory)
            first = c.trajectory[1]
            stop = braking_stop_poses(first.x, first.y, first.theta, c.u.v, c.u.omega,
                                      params.dt, params.accel_v, params.accel_omega)
            hits = hits or any(footprint_collides(Pose(x, y, 0.0), params.footprint(), cm)
                               for x, y in stop)
            assert c.feasible == (not hits)
            # Soundness direction on its own: feasible implies collision-free.
            if c.feasible:
                assert not any(footprint_collides(p, params.footprint(), cm)
                               for p in c.trajectory)

    def test_oscillation_bans_opposing_moving_candidates(self, params):
        cm = flat_costmap()
        osc = OscillationState(last_omega_sign=1, distance_since_flip=0.01)
        cands = [Candidate(u=ControlInput(0.5, -0.4)),
                 Candidate(u=ControlInput(0.5, 0.4)),
                 Candidate(u=ControlInput(0.0, -0.4))]
        start = Pose(3.0, 3.0, 0.0)
        for c in cands:
            c.trajectory = rollout(start, c.u, params)
        filter_free(cands, cm, params.footprint(), osc, params)
        assert not cands[0].feasible          # moving, opposing turn
        assert cands[1].feasible              # same direction
        assert cands[2].feasible              # rotation in place is exempt

    def test_oscillation_clears_after_reset_distance(self, params):
        cm = flat_costmap()
        osc = OscillationState(last_omega_sign=1, distance_since_flip=0.06)
        cand = Candidate(u=ControlInput(0.5, -0.4))
        cand.trajectory = rollout(Pose(3.0, 3.0, 0.0), cand.u, params)
        filter_free([cand], cm, params.footprint(), osc, params)
        assert cand.feasible


class TestCritics:
    def test_on_path_at_goal_all_distance_critics_zero(self, params):
        cm = flat_costmap()
        goal = Pose(3.0, 3.0, 0.0)
        path = GlobalPath(np.array([[0.0, 3.0], [3.0, 3.0]]))
        cand = Candidate(u=ControlInput(0.0, 0.0))
        cand.trajectory = rollout(Pose(3.0, 3.0, 0.0), cand.u, params)
        vector, scalar = evaluate_critics(cand, path, goal, cm,
                                          CriticWeights.from_params(params), params)
        assert vector == pytest.approx([0, 0, 0, 0, 0, 0], abs=1e-12)
        assert scalar == 0.0

    def test_path_dist_perpendicular_offset(self, params):
        cm = flat_costmap()
        goal = Pose(5.0, 0.0, 0.0)
        path = straight_path()
        cand = Candidate(u=ControlInput(0.0, 0.0))
        cand.trajectory = rollout(Pose(1.0, 0.4, 0.0), cand.u, params)
        vector, _ = evaluate_critics(cand, path, goal, cm,
                                     CriticWeights.from_params(params), params)
        assert vector[1] == pytest.approx(0.4, abs=1e-12)

    def test_scalar_matches_recomputation(self, params):
        rng = np.random.default_rng(77)
        cm = flat_costmap()
        goal = Pose(4.0, 4.0, 1.0)
        path = straight_path(0.0, 5.0, 4.0)
        weights = CriticWeights.from_params(params)
        warr = weights.as_array()
        for _ in range(100):
            start = Pose(float(rng.uniform(1, 5)), float(rng.uniform(1, 5)),
                         float(rng.uniform(-3, 3)))
            cand = Candidate(u=ControlInput(float(rng.uniform(0, 1)),
                                            float(rng.uniform(-1, 1))))
            cand.trajectory = rollout(start, cand.u, params)
            vector, scalar = evaluate_critics(cand, path, goal, cm, weights, params)
            assert scalar == pytest.approx(float((vector * warr).sum()), abs=1e-12)

    def test_moving_candidates_vetoed_inside_goal_tolerance(self, params):
        cm = flat_costmap()
        goal = Pose(3.0, 3.0, 1.0)
        path = GlobalPath(np.array([[3.0, 3.0]]))
        weights = CriticWeights.from_params(params)
        mover = Candidate(u=ControlInput(0.3, 0.0))
        mover.trajectory = rollout(Pose(3.1, 3.0, 0.0), mover.u, params)
        evaluate_critics(mover, path, goal, cm, weights, params)
        assert not mover.feasible
        spinner = Candidate(u=ControlInput(0.0, 0.5))
        spinner.trajectory = rollout(Pose(3.1, 3.0, 0.0), spinner.u, params)
        vector, _ = evaluate_critics(spinner, path, goal, cm, weights, params)
        assert spinner.feasible
        end = spinner.trajectory[-1]
        assert vector[5] == pytest.approx(abs(normalize_angle(end.theta - goal.theta)), abs=1e-12)

    def test_critics_non_negative(self, params):
        rng = np.random.default_rng(5)
        cm = flat_costmap()
        goal = Pose(4.0, 2.0, 0.5)
        path = straight_path(0.0, 5.0, 2.0)
        weights = CriticWeights.from_params(params)
        for _ in range(50):
            cand = Candidate(u=ControlInput(float(rng.uniform(0, 1)),
                                            float(rng.uniform(-1, 1))))
            cand.trajectory = rollout(Pose(2.0, 2.0, float(rng.uniform(-3, 3))), cand.u, params)
            vector, _ = evaluate_critics(cand, path, goal, cm, weights, params)
            assert (vector >= 0).all()

    def test_weight_scaling_scales_cost(self, params):
        cm = flat_costmap()
        goal = Pose(4.0, 2.0, 0.5)
        path = straight_path(0.0, 5.0, 2.0)
        cand = Candidate(u=ControlInput(0.5, 0.2))
        cand.trajectory = rollout(Pose(2.0, 2.5, 0.3), cand.u, params)
        base = CriticWeights.from_params(params)
        _, s1 = evaluate_critics(cand, path, goal, cm, base, params)
        scaled = CriticWeights(*(3.0 * base.as_array()))
        _, s3 = evaluate_critics(cand, path, goal, cm, scaled, params)
        assert s3 == pytest.approx(3.0 * s1, rel=1e-12)


class TestBatchEquivalence:
    def test_batch_equals_per_candidate_path(self, params):
        # The vectorized pass and the one-at-a-time public ops agree exactly.
        occ = np.zeros((60, 60), dtype=bool)
        occ[28:31, 40:43] = True
        grid = OccupancyGrid(0.1, Pose(0, 0, 0), occ)
        cm = inflate(grid, params.footprint(), params.inflation_radius)
        start = Pose(2.0, 3.0, 0.1)
        current = ControlInput(0.4, 0.2)
        goal = Pose(5.5, 3.0, 0.0)
        path = straight_path(0.0, 5.5, 3.0)
        osc = OscillationState(last_omega_sign=1, distance_since_flip=0.01)
        weights = CriticWeights.from_params(params)

        batch = evaluate_candidates(start, current, cm, path, goal, osc, params, weights)

        window = dynamic_window(current, params)
        cands = sample_controls(window, params)
        for c in cands:
            c.trajectory = rollout(start, c.u, params)
        filter_free(cands, cm, params.footprint(), osc, params)
        for i, c in enumerate(cands):
            assert c.u.v == batch.v[i] and c.u.omega == batch.omega[i]
            if c.feasible:
                vector, scalar = evaluate_critics(c, path, goal, cm, weights, params)
                assert scalar == batch.nav_cost[i]
                assert (vector == batch.critics[i]).all()
            assert c.feasible == batch.feasible[i]
