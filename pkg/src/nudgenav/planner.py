"""Global planner: length-optimal 8-connected grid search over the costmap.

The planner ignores orientation; it produces a position-space polyline from
the robot to the goal, densified so consecutive points are at most one cell
apart, with the endpoints snapped to the exact query coordinates. Heading is
the controller's business.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np

from .world import COST_INSCRIBED, Costmap

_SQRT2 = math.sqrt(2.0)

# (drow, dcol, unit length); diagonal moves additionally require both
# orthogonal neighbours to be passable so the densified polyline can never
# clip a blocked cell at a shared corner.
_MOVES = (
    (-1, 0, 1.0), (1, 0, 1.0), (0, -1, 1.0), (0, 1, 1.0),
    (-1, -1, _SQRT2), (-1, 1, _SQRT2), (1, -1, _SQRT2), (1, 1, _SQRT2),
)


class NoPathError(RuntimeError):
    """No collision-free path exists to the requested goal."""


@dataclass(frozen=True)
class GlobalPath:
    """Planner output: (n, 2) polyline in meters, first point at the query start."""

    points: np.ndarray
    created_at: float = 0.0

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 1:
            raise ValueError("path needs an (n, 2) point array with n >= 1")
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)


@dataclass
class ReplanScheduler:
    """Fixed-interval replanning clock."""

    interval: float
    last_plan_time: float = -math.inf

    def __post_init__(self):
        if not (self.interval > 0.0):
            raise ValueError("replan interval must be positive")


def replan_due(now: float, scheduler: ReplanScheduler) -> bool:
    return now - scheduler.last_plan_time >= scheduler.interval


def path_length(path: GlobalPath) -> float:
    pts = path.points
    if pts.shape[0] < 2:
        return 0.0
    deltas = np.diff(pts, axis=0)
    return float(np.hypot(deltas[:, 0], deltas[:, 1]).sum())


def plan(costmap: Costmap, start: tuple[float, float], goal: tuple[float, float],
         created_at: float = 0.0) -> GlobalPath:
    """Shortest 8-connected path between the cells containing start and goal.

    Edge weights are euclidean center-to-center distances; cells at or above
    the inscribed cost are excluded. A* with the euclidean heuristic, ties
    expanded in (f, row, col) order for replayable output.

    Raises NoPathError when the goal cell is blocked or disconnected, and
    ValueError when the start cell itself is blocked.
    """
    passable = costmap.cost < COST_INSCRIBED
    h_cells, w_cells = passable.shape
    res = costmap.resolution

    start_cell = costmap.world_to_cell(*start)
    goal_cell = costmap.world_to_cell(*goal)
    if not costmap.in_bounds(*start_cell) or not passable[start_cell]:
        raise ValueError("planner start lies in a blocked or out-of-map cell")
    if not costmap.in_bounds(*goal_cell) or not passable[goal_cell]:
        raise NoPathError("goal lies in a blocked or out-of-map cell")

    if start_cell == goal_cell:
        return GlobalPath(_densify(np.array([start, goal], dtype=float), res), created_at)

    gr, gc = goal_cell
    g = np.full((h_cells, w_cells), np.inf)
    g[start_cell] = 0.0
    parent = np.full((h_cells, w_cells), -1, dtype=np.int64)
    closed = np.zeros((h_cells, w_cells), dtype=bool)

    def heuristic(r: int, c: int) -> float:
        return math.sqrt((r - gr) ** 2 + (c - gc) ** 2) * res

    heap: list[tuple[float, int, int]] = [(heuristic(*start_cell), start_cell[0], start_cell[1])]
    while heap:
        _, r, c = heapq.heappop(heap)
        if closed[r, c]:
            continue
        closed[r, c] = True
        if (r, c) == goal_cell:
            break
        g_here = g[r, c]
        for dr, dc, unit in _MOVES:
            nr, nc = r + dr, c + dc
            if not (0 <= nr < h_cells and 0 <= nc < w_cells) or not passable[nr, nc]:
                continue
            if dr != 0 and dc != 0 and not (passable[r, nc] and passable[nr, c]):
                continue
            tentative = g_here + unit * res
            if tentative < g[nr, nc]:
                g[nr, nc] = tentative
                parent[nr, nc] = r * w_cells + c
                heapq.heappush(heap, (tentative + heuristic(nr, nc), nr, nc))

    if not closed[goal_cell]:
        raise NoPathError("goal is unreachable from the start")

    cells = [goal_cell]
    while cells[-1] != start_cell:
        idx = parent[cells[-1]]
        cells.append((int(idx) // w_cells, int(idx) % w_cells))
    cells.reverse()

    points = np.array([costmap.cell_center(r, c) for r, c in cells], dtype=float)
    points[0] = start
    points[-1] = goal
    return GlobalPath(_densify(points, res), created_at)


def _densify(points: np.ndarray, spacing: float) -> np.ndarray:
    """Subdivide segments so consecutive points are at most `spacing` apart."""
    out = [points[0]]
    for a, b in zip(points[:-1], points[1:]):
        seg = math.hypot(b[0] - a[0], b[1] - a[1])
        n = max(1, math.ceil(seg / spacing - 1e-12))
        for j in range(1, n + 1):
            u = j / n
            out.append((a[0] + u * (b[0] - a[0]), a[1] + u * (b[1] - a[1])))
    return np.array(out, dtype=float)
