"""Global planner: optimality vs an independent Dijkstra, safety, scheduling."""

import numpy as np
import pytest

from oracles import dijkstra_cost

from nudgenav.planner import (GlobalPath, NoPathError, ReplanScheduler,
                              path_length, plan, replan_due)
from nudgenav.world import (COST_INSCRIBED, Costmap, Footprint, OccupancyGrid,
                            Pose, footprint_collides, inflate)


def costmap_from_occupancy(occ: np.ndarray, resolution: float = 0.25) -> Costmap:
    cost = np.where(occ, 255, 0).astype(np.uint8)
    return Costmap(resolution=resolution, origin=Pose(0.0, 0.0, 0.0), cost=cost)


def empty_costmap(size: int = 64, resolution: float = 0.25) -> Costmap:
    return costmap_from_occupancy(np.zeros((size, size), dtype=bool), resolution)


def random_connected_query(rng, occ, costmap):
    """Sample a free start/goal pair connected on the same graph."""
    passable = ~occ
    free = np.argwhere(passable)
    if len(free) < 2:
        return None
    start = tuple(free[rng.integers(len(free))])
    # Flood fill with the planner's adjacency rule (no corner cutting).
    h, w = occ.shape
    seen = {start}
    stack = [start]
    while stack:
        r, c = stack.pop()
        for dr in (-1, 0, 1):
            for dc in (-1, 0, 1):
                if dr == dc == 0:
                    continue
                nr, nc = r + dr, c + dc
                if not (0 <= nr < h and 0 <= nc < w) or not passable[nr, nc]:
                    continue
                if dr != 0 and dc != 0 and not (passable[r, nc] and passable[nr, c]):
                    continue
                if (nr, nc) not in seen:
                    seen.add((nr, nc))
                    stack.append((nr, nc))
    reachable = [cell for cell in map(tuple, free) if cell in seen and cell != start]
    if not reachable:
        return None
    goal = reachable[rng.integers(len(reachable))]
    return start, goal


class TestPlan:
    def test_straight_row(self):
        cm = empty_costmap()
        y = cm.cell_center(10, 0)[1]
        start, goal = (cm.cell_center(10, 4)[0], y), (cm.cell_center(10, 24)[0], y)
        path = plan(cm, start, goal)
        assert path_length(path) == pytest.approx(abs(goal[0] - start[0]), abs=1e-9)
        assert np.allclose(path.points[0], start)
        assert np.allclose(path.points[-1], goal)

    def test_goal_in_lethal_cell_raises(self):
        occ = np.zeros((16, 16), dtype=bool)
        occ[8, 8] = True
        cm = costmap_from_occupancy(occ)
        with pytest.raises(NoPathError):
            plan(cm, cm.cell_center(2, 2), cm.cell_center(8, 8))

    def test_disconnected_goal_raises(self):
        occ = np.zeros((16, 16), dtype=bool)
        occ[:, 8] = True  # full wall
        cm = costmap_from_occupancy(occ)
        with pytest.raises(NoPathError):
            plan(cm, cm.cell_center(2, 2), cm.cell_center(2, 14))

    def test_blocked_start_raises_value_error(self):
        occ = np.zeros((16, 16), dtype=bool)
        occ[2, 2] = True
        cm = costmap_from_occupancy(occ)
        with pytest.raises(ValueError):
            plan(cm, cm.cell_center(2, 2), cm.cell_center(10, 10))

    def test_random_maps_match_dijkstra_and_stay_safe(self):
        rng = np.random.default_rng(42)
        done = 0
        while done < 20:
            occ = rng.random((64, 64)) < 0.30
            cm = costmap_from_occupancy(occ)
            query = random_connected_query(rng, occ, cm)
            if query is None:
                continue
            start_cell, goal_cell = query
            start = cm.cell_center(*start_cell)
            goal = cm.cell_center(*goal_cell)
            path = plan(cm, start, goal)
            oracle = dijkstra_cost(cm, start_cell, goal_cell)
            assert oracle is not None
            assert path_length(path) == pytest.approx(oracle, abs=1e-9)
            fp = Footprint(0.1)
            for x, y in path.points:
                assert not footprint_collides(Pose(x, y, 0.0), fp, cm)
            done += 1

    def test_densified_spacing(self):
        cm = empty_costmap()
        path = plan(cm, cm.cell_center(3, 3), cm.cell_center(40, 17))
        deltas = np.diff(path.points, axis=0)
        assert np.hypot(deltas[:, 0], deltas[:, 1]).max() <= cm.resolution + 1e-12

    def test_replan_starts_at_exact_robot_position(self):
        cm = empty_costmap()
        start = (3.1234567, 2.7654321)
        path = plan(cm, start, cm.cell_center(50, 50))
        assert abs(path.points[0][0] - start[0]) < 1e-9
        assert abs(path.points[0][1] - start[1]) < 1e-9

    def test_path_avoids_inflated_cells(self):
        rows = 30
        occ = np.zeros((rows, rows), dtype=bool)
        occ[12:18, 14] = True
        grid = OccupancyGrid(0.1, Pose(0, 0, 0), occ)
        cm = inflate(grid, Footprint(0.3), 0.55)
        path = plan(cm, cm.cell_center(15, 2), cm.cell_center(15, 27))
        for x, y in path.points:
            assert cm.cost_at(x, y) < COST_INSCRIBED


class TestScheduler:
    def test_not_due_at_start_when_just_planned(self):
        assert replan_due(0.0, ReplanScheduler(1.0, last_plan_time=0.0)) is False

    def test_due_at_exact_interval(self):
        assert replan_due(1.0, ReplanScheduler(1.0, last_plan_time=0.0)) is True

    def test_fires_exactly_on_tick_twenty(self):
        sched = ReplanScheduler(1.0, last_plan_time=0.0)
        dt = 0.05
        fired_at = [k for k in range(1, 30) if replan_due(k * dt, sched)]
        assert fired_at[0] == 20

    def test_interval_must_be_positive(self):
        with pytest.raises(ValueError):
            ReplanScheduler(0.0)


class TestPathLength:
    def test_three_four_five(self):
        path = GlobalPath(np.array([[0.0, 0.0], [3.0, 4.0]]))
        assert path_length(path) == pytest.approx(5.0)

    def test_single_point_zero(self):
        assert path_length(GlobalPath(np.array([[1.0, 1.0]]))) == 0.0

    def test_unit_square_loop(self):
        pts = np.array([[0, 0], [1, 0], [1, 1], [0, 1], [0, 0]], dtype=float)
        assert path_length(GlobalPath(pts)) == pytest.approx(4.0)
