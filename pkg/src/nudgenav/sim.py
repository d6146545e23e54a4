"""Deterministic fixed-step world: plant, sensing, scoring, traces, metrics.

One clock drives everything: control, sensing, and physics all advance at the
same fixed period, and every quantity is a pure function of (scenario, input
script, mode, parameters), so a run is reproducible byte for byte.

Per tick the loop is: sense -> replan if due -> operator update -> goal /
timeout check -> control selection -> record trace row -> plant step.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .control import (Mode, OperatorState, SharedWeights, select_from_batch,
                      update_operator_state)
from .dwa import (CandidateBatch, CriticWeights, OscillationState,
                  evaluate_candidates, single_step)
from .geometry import ang_diff, clamp
from .inputs import InputEvent, events_by_tick
from .planner import GlobalPath, NoPathError, ReplanScheduler, plan, replan_due
from .world import (ControlInput, Costmap, DynamicObstacle,
                    ParameterSet, Pose, Scenario, costs_from_distance,
                    footprint_collides, inflate, region_intersects)

STATUS_RUNNING = "running"
STATUS_GOAL = "goal_reached"
STATUS_TIMEOUT = "timeout"
STATUS_ABORTED = "aborted"

TRACE_COLUMNS = ("t", "x", "y", "theta", "v", "omega", "gamma", "mode",
                 "v_h", "omega_h", "recovery", "regions")


def _fmt(value: float) -> str:
    """Fixed 9-significant-digit decimal formatting for trace stability."""
    out = f"{value:.9g}"
    return "0" if out == "-0" else out


@dataclass(frozen=True)
class TraceRow:
    """One logged control tick."""

    t: float
    pose: Pose
    u: ControlInput
    gamma: int
    mode: str
    u_h: ControlInput
    recovery: bool
    region_ids: tuple[int, ...]

    def as_csv(self) -> str:
        cells = (
            _fmt(self.t), _fmt(self.pose.x), _fmt(self.pose.y), _fmt(self.pose.theta),
            _fmt(self.u.v), _fmt(self.u.omega), str(self.gamma), self.mode,
            _fmt(self.u_h.v), _fmt(self.u_h.omega), "1" if self.recovery else "0",
            ";".join(str(i) for i in self.region_ids),
        )
        return ",".join(cells)


@dataclass
class Metrics:
    """Objective outcomes of a run."""

    status: str
    completion_time: float | None
    regions_not_avoided: int
    collisions: int
    path_length: float
    input_active_time: float

    def as_dict(self) -> dict:
        return {
            "status": self.status,
            "completion_time": self.completion_time,
            "regions_not_avoided": self.regions_not_avoided,
            "collisions": self.collisions,
            "path_length": self.path_length,
            "input_active_time": self.input_active_time,
        }

    def as_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2) + "\n"


@dataclass
class WorldState:
    """Snapshot of the simulated world at one tick."""

    t: float
    robot: Pose
    u_actual: ControlInput
    obstacle_positions: list[tuple[float, float]]
    costmap: Costmap
    path: GlobalPath | None
    operator: OperatorState
    status: str = STATUS_RUNNING
    region_ids: tuple[int, ...] = ()
    recovery: bool = False


def check_goal(robot: Pose, goal: Pose, params: ParameterSet) -> bool:
    """Goal achieved when both position and heading are within tolerance."""
    if robot.distance_to(goal) > params.goal_tolerance_xy:
        return False
    return abs(ang_diff(robot.theta, goal.theta)) <= params.goal_tolerance_theta


class Simulation:
    """One deterministic run of a scenario under a given mode and input script."""

    def __init__(self, scenario: Scenario, mode: Mode,
                 events: list[InputEvent] | None = None):
        self.scenario = scenario
        self.params = scenario.params
        self.mode = mode
        self.footprint = self.params.footprint()
        self.weights = CriticWeights.from_params(self.params)
        self.shared_weights = SharedWeights.from_params(self.params)
        self.static_costmap = inflate(scenario.grid, self.footprint,
                                      self.params.inflation_radius)
        self.scheduler = ReplanScheduler(self.params.replan_interval)
        self.osc = OscillationState()
        self.events = events_by_tick(events or [])
        self.tick_index = 0
        self.path_version = 0
        self.collisions = 0
        self.live_input_ticks = 0
        self._in_contact = False
        self._travelled = 0.0
        self._regions_touched: set[int] = set()
        self.trace: list[TraceRow] = []
        self.last_batch: CandidateBatch | None = None
        op = OperatorState(mode=mode)
        self.world = WorldState(
            t=0.0,
            robot=scenario.start,
            u_actual=ControlInput(0.0, 0.0),
            obstacle_positions=[ob.position_at(0.0) for ob in scenario.dynamic_obstacles],
            costmap=self.static_costmap,
            path=None,
            operator=op,
        )

    # -- sensing ---------------------------------------------------------

    def sense(self) -> Costmap:
        """Costmap visible to the robot right now.

        The static map is always known. Dynamic obstacles appear only while
        within the sensor radius of the robot; regions to avoid never appear.
        """
        visible = [
            (ob, pos) for ob, pos in
            zip(self.scenario.dynamic_obstacles, self.world.obstacle_positions)
            if math.hypot(pos[0] - self.world.robot.x, pos[1] - self.world.robot.y)
            <= self.params.sensor_radius
        ]
        if not visible:
            return self.static_costmap
        cost = self.static_costmap.cost.copy()
        for ob, (ox, oy) in visible:
            self._stamp_obstacle(cost, ob, ox, oy)
        return Costmap(resolution=self.static_costmap.resolution,
                       origin=self.static_costmap.origin, cost=cost)

    def _stamp_obstacle(self, cost: np.ndarray, ob: DynamicObstacle,
                        ox: float, oy: float) -> None:
        """Rasterize one disc obstacle and inflate it into a local window."""
        cm = self.static_costmap
        res = cm.resolution
        reach = ob.radius + self.params.inflation_radius
        r0 = max(0, math.floor((oy - cm.origin.y - reach) / res) - 1)
        r1 = min(cm.height, math.ceil((oy - cm.origin.y + reach) / res) + 1)
        c0 = max(0, math.floor((ox - cm.origin.x - reach) / res) - 1)
        c1 = min(cm.width, math.ceil((ox - cm.origin.x + reach) / res) + 1)
        if r0 >= r1 or c0 >= c1:
            return
        rows = np.arange(r0, r1)
        cols = np.arange(c0, c1)
        cy = cm.origin.y + (rows + 0.5) * res
        cx = cm.origin.x + (cols + 0.5) * res
        dist2 = (cy[:, None] - oy) ** 2 + (cx[None, :] - ox) ** 2
        occ = dist2 <= ob.radius ** 2
        if not occ.any():
            # Sub-cell obstacle: mark the containing cell so it is never invisible.
            row, col = cm.world_to_cell(ox, oy)
            if r0 <= row < r1 and c0 <= col < c1:
                occ[row - r0, col - c0] = True
        if not occ.any():
            return
        dist = ndimage.distance_transform_edt(~occ) * res
        window = costs_from_distance(dist, self.footprint.radius,
                                      self.params.inflation_radius)
        np.maximum(cost[r0:r1, c0:c1], window, out=cost[r0:r1, c0:c1])

    # -- plant -----------------------------------------------------------

    def step(self, command: ControlInput) -> None:
        """Advance the plant one tick toward `command`.

        The plant, not the command, is slew-limited: actual velocities move
        toward the command by at most accel * dt. If the resulting footprint
        would overlap a static or dynamic obstacle the pose is held in place
        and one collision is counted per contact episode.
        """
        p = self.params
        u = self.world.u_actual
        v = u.v + clamp(command.v - u.v, -p.accel_v * p.dt, p.accel_v * p.dt)
        omega = u.omega + clamp(command.omega - u.omega,
                                -p.accel_omega * p.dt, p.accel_omega * p.dt)
        t_next = (self.tick_index + 1) * p.dt
        next_obstacles = [ob.position_at(t_next) for ob in self.scenario.dynamic_obstacles]
        tentative = single_step(self.world.robot, ControlInput(v, omega), p.dt)

        blocked = footprint_collides(tentative, self.footprint, self.static_costmap)
        if not blocked:
            for ob, (ox, oy) in zip(self.scenario.dynamic_obstacles, next_obstacles):
                if math.hypot(tentative.x - ox, tentative.y - oy) <= self.footprint.radius + ob.radius:
                    blocked = True
                    break

        if blocked:
            if not self._in_contact:
                self.collisions += 1
                self._in_contact = True
        else:
            moved = self.world.robot.distance_to(tentative)
            self._travelled += moved
            self.osc.note_travel(moved)
            self.world.robot = tentative
            self._in_contact = False

        self.world.u_actual = ControlInput(v, omega)
        self.world.obstacle_positions = next_obstacles
        self.tick_index += 1
        self.world.t = self.tick_index * p.dt
        self.world.region_ids = self._regions_at(self.world.robot)

    def _regions_at(self, pose: Pose) -> tuple[int, ...]:
        return tuple(i for i, region in enumerate(self.scenario.regions)
                     if region_intersects(region, pose, self.footprint))

    # -- control loop ----------------------------------------------------

    def tick(self, extra_events: list[InputEvent] | None = None) -> WorldState:
        """Run one full control tick; returns the post-step world state."""
        p = self.params
        world = self.world
        if world.status != STATUS_RUNNING:
            return world
        now = self.tick_index * p.dt

        world.costmap = self.sense()

        if replan_due(now, self.scheduler):
            try:
                world.path = plan(world.costmap, (world.robot.x, world.robot.y),
                                  (self.scenario.goal.x, self.scenario.goal.y),
                                  created_at=now)
                self.path_version += 1
            except (NoPathError, ValueError):
                if world.path is None:
                    world.status = STATUS_ABORTED
                    self._record(now)
                    return world
            self.scheduler.last_plan_time = now

        events = list(self.events.get(self.tick_index, ()))
        if extra_events:
            events.extend(extra_events)
        update_operator_state(world.operator, events, now, p)
        if world.operator.button_down or any(e.kind == "button_up" for e in events):
            self.live_input_ticks += 1

        if check_goal(world.robot, self.scenario.goal, p):
            world.status = STATUS_GOAL
            world.recovery = False
            self._record(now)
            return world
        if now >= p.max_time:
            world.status = STATUS_TIMEOUT
            world.recovery = False
            self._record(now)
            return world

        command, recovery = self._select()
        world.recovery = recovery
        self.osc.note_command(command.omega)
        self._record(now)
        self.step(command)
        return world

    def _select(self) -> tuple[ControlInput, bool]:
        world = self.world
        op = world.operator
        if self.mode is Mode.SWITCHING and op.gamma == 1:
            self.last_batch = None
            return op.u_h, False
        batch = evaluate_candidates(world.robot, world.u_actual, world.costmap,
                                    world.path, self.scenario.goal, self.osc,
                                    self.params, self.weights)
        self.last_batch = batch
        if self.mode is Mode.SWITCHING:
            # Gate closed: plain autonomous tracking.
            inactive = OperatorState(mode=self.mode)
            return select_from_batch(batch, inactive, self.shared_weights)
        return select_from_batch(batch, op, self.shared_weights)

    def _record(self, now: float) -> None:
        world = self.world
        row = TraceRow(
            t=now,
            pose=world.robot,
            u=world.u_actual,
            gamma=world.operator.gamma,
            mode=self.mode.value,
            u_h=world.operator.u_h,
            recovery=world.recovery,
            region_ids=self._regions_at(world.robot),
        )
        self._regions_touched.update(row.region_ids)
        self.trace.append(row)

    def run(self) -> tuple[list[TraceRow], Metrics]:
        while self.world.status == STATUS_RUNNING:
            self.tick()
        return self.trace, self.metrics()

    def metrics(self) -> Metrics:
        return Metrics(
            status=self.world.status,
            completion_time=self.world.t if self.world.status == STATUS_GOAL else None,
            regions_not_avoided=len(self._regions_touched),
            collisions=self.collisions,
            path_length=self._travelled,
            input_active_time=self.live_input_ticks * self.params.dt,
        )


def run_scripted(scenario: Scenario, events: list[InputEvent], mode: Mode,
                 max_time: float | None = None) -> tuple[list[TraceRow], Metrics]:
    """Execute a full scripted run; deterministic for identical inputs."""
    if max_time is not None:
        scenario = Scenario(name=scenario.name, grid=scenario.grid,
                            start=scenario.start, goal=scenario.goal,
                            regions=scenario.regions,
                            dynamic_obstacles=scenario.dynamic_obstacles,
                            params=scenario.params.with_overrides({"max_time": max_time}))
    sim = Simulation(scenario, mode, events)
    return sim.run()


def region_accounting(trace: list[TraceRow], regions: tuple) -> int:
    """Distinct regions the footprint ever overlapped during the run."""
    touched: set[int] = set()
    for row in trace:
        touched.update(row.region_ids)
    return len(touched)


def format_trace(trace: list[TraceRow], scenario_name: str, mode: Mode,
                 params: ParameterSet) -> str:
    """Render a trace with its parameter header; byte-stable."""
    lines = [f"# scenario={scenario_name}", f"# mode={mode.value}"]
    for name, value in params.header_items():
        lines.append(f"# {name}={_fmt(float(value)) if isinstance(value, float) else value}")
    lines.append(",".join(TRACE_COLUMNS))
    lines.extend(row.as_csv() for row in trace)
    return "\n".join(lines) + "\n"


def write_trace(path: str, trace: list[TraceRow], scenario_name: str, mode: Mode,
                params: ParameterSet) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_trace(trace, scenario_name, mode, params))


def write_metrics(path: str, metrics: Metrics) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(metrics.as_json())
