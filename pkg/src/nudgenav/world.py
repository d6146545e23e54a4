"""World model: scenario documents, occupancy grids, inflated costmaps, hazard regions.

This module is the shared vocabulary of the stack: poses, velocity commands,
the rasterized environment the controller plans against, and the hazard
regions that are scored against the executed path but deliberately kept out
of the robot's sensing pipeline.

Costmap convention (one byte per cell):
    255  lethal (cell itself occupied)
    254  inscribed: cell center within the footprint radius of a lethal cell,
         so the footprint certainly overlaps an obstacle
  1..253 exponential decay with distance beyond the footprint radius
    0    free (beyond the inflation radius)
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, fields, replace

import numpy as np
from scipy import ndimage

from .geometry import normalize_angle, point_polygon_distance

COST_FREE = 0
COST_DECAY_MAX = 253
COST_INSCRIBED = 254
COST_LETHAL = 255

REGION_KINDS = ("pothole", "scaffolding", "boxes", "cones", "bumpy")

MAP_OCCUPIED = "#"
MAP_FREE = "."


class ScenarioError(ValueError):
    """A scenario document failed to parse or validate."""


@dataclass(frozen=True)
class Pose:
    """Planar configuration (x, y, heading). Heading is kept in (-pi, pi]."""

    x: float
    y: float
    theta: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y) and math.isfinite(self.theta)):
            raise ValueError("pose components must be finite")
        object.__setattr__(self, "theta", normalize_angle(self.theta))

    def position(self) -> tuple[float, float]:
        return (self.x, self.y)

    def distance_to(self, other: "Pose") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)


@dataclass(frozen=True)
class ControlInput:
    """Velocity command: linear v (m/s) and angular omega (rad/s)."""

    v: float
    omega: float

    def __post_init__(self):
        if not (math.isfinite(self.v) and math.isfinite(self.omega)):
            raise ValueError("control components must be finite")


STOP = ControlInput(0.0, 0.0)


@dataclass(frozen=True)
class Footprint:
    """Circular robot footprint."""

    radius: float

    def __post_init__(self):
        if not (self.radius > 0.0):
            raise ValueError("footprint radius must be positive")


class _GridGeometry:
    """Shared world<->cell conversions for grid-backed types."""

    resolution: float
    origin: Pose

    @property
    def height(self) -> int:
        return self._array().shape[0]

    @property
    def width(self) -> int:
        return self._array().shape[1]

    def _array(self) -> np.ndarray:
        raise NotImplementedError

    def world_to_cell(self, x: float, y: float) -> tuple[int, int]:
        """World point to (row, col); may be out of bounds."""
        col = math.floor((x - self.origin.x) / self.resolution)
        row = math.floor((y - self.origin.y) / self.resolution)
        return (row, col)

    def in_bounds(self, row: int, col: int) -> bool:
        return 0 <= row < self.height and 0 <= col < self.width

    def cell_center(self, row: int, col: int) -> tuple[float, float]:
        return (self.origin.x + (col + 0.5) * self.resolution,
                self.origin.y + (row + 0.5) * self.resolution)


@dataclass(frozen=True)
class OccupancyGrid(_GridGeometry):
    """Boolean occupancy raster. Row 0 is the row touching the origin."""

    resolution: float
    origin: Pose
    cells: np.ndarray

    def __post_init__(self):
        if not (self.resolution > 0.0):
            raise ValueError("resolution must be positive")
        if self.origin.theta != 0.0:
            raise ValueError("grid origin must be axis-aligned (theta = 0)")
        cells = np.asarray(self.cells, dtype=bool)
        if cells.ndim != 2 or cells.size == 0:
            raise ValueError("cells must be a non-empty 2-D array")
        cells.flags.writeable = False
        object.__setattr__(self, "cells", cells)

    def _array(self) -> np.ndarray:
        return self.cells


@dataclass(frozen=True)
class Costmap(_GridGeometry):
    """Inflated traversal-cost raster with the byte convention above."""

    resolution: float
    origin: Pose
    cost: np.ndarray

    def __post_init__(self):
        if not (self.resolution > 0.0):
            raise ValueError("resolution must be positive")
        cost = np.asarray(self.cost, dtype=np.uint8)
        if cost.ndim != 2 or cost.size == 0:
            raise ValueError("cost must be a non-empty 2-D array")
        cost.flags.writeable = False
        object.__setattr__(self, "cost", cost)

    def _array(self) -> np.ndarray:
        return self.cost

    def cost_at(self, x: float, y: float) -> int:
        """Cost of the cell containing (x, y); out of bounds reads as lethal."""
        row, col = self.world_to_cell(x, y)
        if not self.in_bounds(row, col):
            return COST_LETHAL
        return int(self.cost[row, col])


@dataclass(frozen=True)
class CircleRegion:
    """Circular region to avoid; passable, untracked by sensing."""

    kind: str
    center_x: float
    center_y: float
    radius: float

    def __post_init__(self):
        if not (self.radius > 0.0):
            raise ValueError("region radius must be positive")

    def distance_to(self, x: float, y: float) -> float:
        return max(0.0, math.hypot(x - self.center_x, y - self.center_y) - self.radius)


@dataclass(frozen=True)
class PolygonRegion:
    """Convex polygonal region to avoid."""

    kind: str
    vertices: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if len(self.vertices) < 3:
            raise ValueError("polygon region needs at least 3 vertices")
        if not _is_convex(self.vertices):
            raise ValueError("polygon region must be convex")

    def distance_to(self, x: float, y: float) -> float:
        return point_polygon_distance(x, y, self.vertices)


RegionToAvoid = CircleRegion | PolygonRegion


def _is_convex(vertices: tuple[tuple[float, float], ...]) -> bool:
    n = len(vertices)
    pos = neg = False
    for i in range(n):
        ax, ay = vertices[i]
        bx, by = vertices[(i + 1) % n]
        cx, cy = vertices[(i + 2) % n]
        cross = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
        if cross > 0.0:
            pos = True
        elif cross < 0.0:
            neg = True
        if pos and neg:
            return False
    return True


@dataclass(frozen=True)
class Waypoint:
    x: float
    y: float
    t: float


@dataclass(frozen=True)
class DynamicObstacle:
    """Disc obstacle following a piecewise-linear waypoint schedule."""

    radius: float
    waypoints: tuple[Waypoint, ...]
    loop: bool = False

    def __post_init__(self):
        if not (self.radius > 0.0):
            raise ValueError("obstacle radius must be positive")
        if not self.waypoints:
            raise ValueError("obstacle needs at least one waypoint")
        times = [w.t for w in self.waypoints]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("waypoint times must be strictly increasing")

    def position_at(self, t: float) -> tuple[float, float]:
        wps = self.waypoints
        if len(wps) == 1:
            return (wps[0].x, wps[0].y)
        t0, t1 = wps[0].t, wps[-1].t
        if self.loop:
            period = t1 - t0
            t = t0 + math.fmod(t - t0, period)
            if t < t0:
                t += period
        if t <= t0:
            return (wps[0].x, wps[0].y)
        if t >= t1:
            return (wps[-1].x, wps[-1].y)
        for a, b in zip(wps, wps[1:]):
            if t <= b.t:
                u = (t - a.t) / (b.t - a.t)
                return (a.x + u * (b.x - a.x), a.y + u * (b.y - a.y))
        return (wps[-1].x, wps[-1].y)


_INT_PARAMS = {"v_samples", "omega_samples"}


@dataclass(frozen=True)
class ParameterSet:
    """Every tunable of the stack, with defaults. All values must be positive.

    Any field can be overridden per scenario (``params`` block) or per run
    (``--param key=value``); the set in force is recorded in trace headers.
    """

    v_max: float = 1.0
    omega_max: float = 1.0
    accel_v: float = 2.0
    accel_omega: float = 3.0
    dt: float = 0.05
    window_horizon: float = 0.25
    v_samples: int = 11
    omega_samples: int = 21
    rollout_horizon: float = 1.5
    rollout_step: float = 0.1
    replan_interval: float = 1.0
    path_align_weight: float = 32.0
    path_dist_weight: float = 32.0
    base_obstacle_weight: float = 0.02
    goal_align_weight: float = 24.0
    goal_dist_weight: float = 24.0
    rotate_to_goal_weight: float = 32.0
    shared_v_weight: float = 400.0
    shared_omega_weight: float = 800.0
    delta: float = 2.0
    goal_tolerance_xy: float = 0.25
    goal_tolerance_theta: float = 0.35
    gesture_span: float = 0.20
    sensor_radius: float = 5.0
    footprint_radius: float = 0.3
    inflation_radius: float = 0.55
    forward_point_distance: float = 0.325
    oscillation_reset_distance: float = 0.05
    max_time: float = 600.0

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise ValueError(f"parameter {f.name} must be a positive finite number")
        if self.v_samples < 2 or self.omega_samples < 2:
            raise ValueError("sample counts must be at least 2")
        if self.inflation_radius < self.footprint_radius:
            raise ValueError("inflation_radius must cover footprint_radius")
        steps = round(self.rollout_horizon / self.rollout_step)
        if steps < 1 or abs(steps * self.rollout_step - self.rollout_horizon) > 1e-9:
            raise ValueError("rollout_step must divide rollout_horizon")

    def with_overrides(self, overrides: dict) -> "ParameterSet":
        known = {f.name for f in fields(self)}
        coerced = {}
        for key, value in overrides.items():
            if key not in known:
                raise ScenarioError(f"unknown parameter: {key}")
            try:
                coerced[key] = int(value) if key in _INT_PARAMS else float(value)
            except (TypeError, ValueError) as exc:
                raise ScenarioError(f"parameter {key} has invalid value {value!r}") from exc
        try:
            return replace(self, **coerced)
        except ValueError as exc:
            raise ScenarioError(str(exc)) from exc

    def rollout_steps(self) -> int:
        return round(self.rollout_horizon / self.rollout_step)

    def footprint(self) -> Footprint:
        return Footprint(self.footprint_radius)

    def header_items(self) -> list[tuple[str, float | int]]:
        return [(f.name, getattr(self, f.name)) for f in fields(self)]


@dataclass(frozen=True)
class Scenario:
    """A fully validated run definition."""

    name: str
    grid: OccupancyGrid
    start: Pose
    goal: Pose
    regions: tuple[RegionToAvoid, ...]
    dynamic_obstacles: tuple[DynamicObstacle, ...]
    params: ParameterSet


def inflate(grid: OccupancyGrid, footprint: Footprint, decay_radius: float) -> Costmap:
    """Build a costmap from an occupancy grid.

    Occupied cells are lethal; cells whose center lies within the footprint
    radius of a lethal cell are inscribed; beyond that, cost decays as
    round(253 * exp(-k (d - r))) with k chosen so the cost is 1 exactly at
    decay_radius, and 0 past it.
    """
    if decay_radius < footprint.radius:
        raise ValueError("decay_radius must be at least the footprint radius")
    occ = grid.cells
    if not occ.any():
        cost = np.zeros(occ.shape, dtype=np.uint8)
    else:
        dist = ndimage.distance_transform_edt(~occ) * grid.resolution
        cost = costs_from_distance(dist, footprint.radius, decay_radius)
    return Costmap(resolution=grid.resolution, origin=grid.origin, cost=cost)


def costs_from_distance(dist: np.ndarray, radius: float, decay_radius: float) -> np.ndarray:
    cost = np.zeros(dist.shape, dtype=np.uint8)
    cost[dist <= radius] = COST_INSCRIBED
    cost[dist == 0.0] = COST_LETHAL
    band = (dist > radius) & (dist <= decay_radius)
    if band.any() and decay_radius > radius:
        k = math.log(COST_DECAY_MAX) / (decay_radius - radius)
        decayed = np.rint(COST_DECAY_MAX * np.exp(-k * (dist[band] - radius)))
        cost[band] = decayed.astype(np.uint8)
    return cost


def footprint_collides(pose: Pose, footprint: Footprint, costmap: Costmap) -> bool:
    """True when the footprint certainly overlaps an obstacle.

    The costmap must have been inflated with the same footprint; the check is
    then a single inscribed-or-worse lookup. Out-of-map poses collide.
    """
    return costmap.cost_at(pose.x, pose.y) >= COST_INSCRIBED


def region_intersects(region: RegionToAvoid, pose: Pose, footprint: Footprint) -> bool:
    """True when the footprint disc overlaps the region (boundary contact counts)."""
    return region.distance_to(pose.x, pose.y) <= footprint.radius


# --- scenario document parsing ------------------------------------------------

def load_scenario(text: str, extra_params: dict | None = None) -> Scenario:
    """Parse and validate a scenario document (JSON).

    Top-level fields: ``map`` (list of equal-length strings of '#'/'.'),
    ``resolution``, ``start``, ``goal``, and optionally ``name``,
    ``regions``, ``dynamic_obstacles`` and ``params``. Row 0 of ``map`` is
    the northernmost row; the grid origin sits at world (0, 0).
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise ScenarioError("scenario document must be a JSON object")

    name = doc.get("name", "scenario")
    grid = _parse_map(doc)
    params = ParameterSet().with_overrides(doc.get("params", {}) or {})
    if extra_params:
        params = params.with_overrides(extra_params)
    start = _parse_pose(doc, "start")
    goal = _parse_pose(doc, "goal")
    regions = tuple(_parse_region(r, i) for i, r in enumerate(doc.get("regions", []) or []))
    obstacles = tuple(_parse_obstacle(o, i) for i, o in enumerate(doc.get("dynamic_obstacles", []) or []))

    costmap = inflate(grid, params.footprint(), params.inflation_radius)
    footprint = params.footprint()
    if footprint_collides(start, footprint, costmap):
        raise ScenarioError("start pose collides with the static map")
    if footprint_collides(goal, footprint, costmap):
        raise ScenarioError("goal pose collides with the static map")

    return Scenario(name=str(name), grid=grid, start=start, goal=goal,
                    regions=regions, dynamic_obstacles=obstacles, params=params)


def load_scenario_file(path: str, extra_params: dict | None = None) -> Scenario:
    with open(path, "r", encoding="utf-8") as fh:
        return load_scenario(fh.read(), extra_params)


def _parse_map(doc: dict) -> OccupancyGrid:
    rows = doc.get("map")
    if not isinstance(rows, list) or not rows or not all(isinstance(r, str) for r in rows):
        raise ScenarioError("field 'map' must be a non-empty list of strings")
    width = len(rows[0])
    if width == 0:
        raise ScenarioError("map rows must be non-empty")
    for i, row in enumerate(rows):
        if len(row) != width:
            raise ScenarioError(f"map row {i} has length {len(row)}, expected {width}")
        bad = set(row) - {MAP_OCCUPIED, MAP_FREE}
        if bad:
            raise ScenarioError(f"map row {i} contains invalid characters: {sorted(bad)}")
    resolution = doc.get("resolution")
    if not isinstance(resolution, (int, float)) or not resolution > 0:
        raise ScenarioError("field 'resolution' must be a positive number")
    height = len(rows)
    cells = np.zeros((height, width), dtype=bool)
    for doc_row, row in enumerate(rows):
        grid_row = height - 1 - doc_row  # document rows read top-down
        cells[grid_row] = [ch == MAP_OCCUPIED for ch in row]
    return OccupancyGrid(resolution=float(resolution), origin=Pose(0.0, 0.0, 0.0), cells=cells)


def _parse_pose(doc: dict, field_name: str) -> Pose:
    raw = doc.get(field_name)
    if not isinstance(raw, dict) or "x" not in raw or "y" not in raw:
        raise ScenarioError(f"field '{field_name}' must be an object with x and y")
    try:
        return Pose(float(raw["x"]), float(raw["y"]), float(raw.get("theta", 0.0)))
    except (TypeError, ValueError) as exc:
        raise ScenarioError(f"field '{field_name}' is invalid: {exc}") from exc


def _parse_region(raw: dict, index: int) -> RegionToAvoid:
    where = f"regions[{index}]"
    if not isinstance(raw, dict):
        raise ScenarioError(f"{where} must be an object")
    kind = raw.get("kind")
    if kind not in REGION_KINDS:
        raise ScenarioError(f"{where}.kind must be one of {REGION_KINDS}")
    rtype = raw.get("type")
    try:
        if rtype == "circle":
            return CircleRegion(kind=kind, center_x=float(raw["x"]), center_y=float(raw["y"]),
                                radius=float(raw["radius"]))
        if rtype == "polygon":
            vertices = tuple((float(v[0]), float(v[1])) for v in raw["vertices"])
            return PolygonRegion(kind=kind, vertices=vertices)
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise ScenarioError(f"{where} is invalid: {exc}") from exc
    raise ScenarioError(f"{where}.type must be 'circle' or 'polygon'")


def _parse_obstacle(raw: dict, index: int) -> DynamicObstacle:
    where = f"dynamic_obstacles[{index}]"
    if not isinstance(raw, dict):
        raise ScenarioError(f"{where} must be an object")
    try:
        waypoints = tuple(Waypoint(float(w["x"]), float(w["y"]), float(w["t"]))
                          for w in raw["waypoints"])
        return DynamicObstacle(radius=float(raw["radius"]), waypoints=waypoints,
                               loop=bool(raw.get("loop", False)))
    except (KeyError, TypeError, ValueError) as exc:
        raise ScenarioError(f"{where} is invalid: {exc}") from exc
