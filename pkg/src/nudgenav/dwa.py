"""Sampled-velocity local control: window, rollout, collision filter, critics.

Candidate evaluation is implemented once, as vectorized kernels over the
whole candidate set; the per-candidate functions wrap the same kernels with
singleton batches, so batch and one-at-a-time evaluation agree exactly and
results never depend on evaluation grouping.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import normalize_angles, polyline_distances
from .planner import GlobalPath
from .world import (COST_INSCRIBED, COST_LETHAL, ControlInput, Costmap, Footprint,
                    ParameterSet, Pose)

# Below this |omega| an arc degenerates to a straight line.
OMEGA_STRAIGHT_EPS = 1e-9

CRITIC_NAMES = ("path_align", "path_dist", "base_obstacle",
                "goal_align", "goal_dist", "rotate_to_goal")


@dataclass(frozen=True)
class CriticWeights:
    """Weights of the six trajectory critics."""

    path_align: float = 32.0
    path_dist: float = 32.0
    base_obstacle: float = 0.02
    goal_align: float = 24.0
    goal_dist: float = 24.0
    rotate_to_goal: float = 32.0

    def __post_init__(self):
        for name in CRITIC_NAMES:
            if getattr(self, name) < 0:
                raise ValueError(f"critic weight {name} must be non-negative")

    def as_array(self) -> np.ndarray:
        return np.array([getattr(self, name) for name in CRITIC_NAMES], dtype=float)

    @classmethod
    def from_params(cls, params: ParameterSet) -> "CriticWeights":
        return cls(path_align=params.path_align_weight,
                   path_dist=params.path_dist_weight,
                   base_obstacle=params.base_obstacle_weight,
                   goal_align=params.goal_align_weight,
                   goal_dist=params.goal_dist_weight,
                   rotate_to_goal=params.rotate_to_goal_weight)


@dataclass(frozen=True)
class DynamicWindow:
    """Velocity box reachable within the window horizon."""

    v_lo: float
    v_hi: float
    omega_lo: float
    omega_hi: float

    def __post_init__(self):
        if self.v_lo > self.v_hi or self.omega_lo > self.omega_hi:
            raise ValueError("window bounds must be ordered")


@dataclass
class OscillationState:
    """Tracks the committed turn direction to suppress left/right dithering."""

    last_omega_sign: int = 0
    distance_since_flip: float = 0.0

    def note_command(self, omega: float) -> None:
        sign = 1 if omega > 0.0 else -1 if omega < 0.0 else 0
        if sign != 0 and sign != self.last_omega_sign:
            self.last_omega_sign = sign
            self.distance_since_flip = 0.0

    def note_travel(self, distance: float) -> None:
        self.distance_since_flip += distance


@dataclass
class Candidate:
    """One sampled control with its rollout and scores."""

    u: ControlInput
    trajectory: list[Pose] | None = None
    nav_cost_vector: np.ndarray | None = None
    nav_cost: float = math.inf
    shared_cost: float = 0.0
    total_cost: float = math.inf
    feasible: bool = True


def dynamic_window(current: ControlInput, params: ParameterSet) -> DynamicWindow:
    """Velocity bounds reachable from `current` within the window horizon.

    Autonomous candidates never reverse: the linear range is clamped to
    [0, v_max] even when the plant is currently rolling backwards.
    """
    h = params.window_horizon
    v_hi = min(params.v_max, max(0.0, current.v + params.accel_v * h))
    v_lo = min(v_hi, max(0.0, current.v - params.accel_v * h))
    omega_lo = max(-params.omega_max, current.omega - params.accel_omega * h)
    omega_hi = min(params.omega_max, current.omega + params.accel_omega * h)
    return DynamicWindow(v_lo=v_lo, v_hi=v_hi, omega_lo=omega_lo, omega_hi=omega_hi)


def sample_window(window: DynamicWindow, params: ParameterSet) -> tuple[np.ndarray, np.ndarray]:
    """Uniform v x omega grid over the window, v-major, omega ascending."""
    vs = np.linspace(window.v_lo, window.v_hi, params.v_samples)
    ws = np.linspace(window.omega_lo, window.omega_hi, params.omega_samples)
    return (np.repeat(vs, params.omega_samples), np.tile(ws, params.v_samples))


def sample_controls(window: DynamicWindow, params: ParameterSet) -> list[Candidate]:
    v, omega = sample_window(window, params)
    return [Candidate(u=ControlInput(float(vi), float(wi))) for vi, wi in zip(v, omega)]


def integrate_constant_control(start: Pose, v: np.ndarray, omega: np.ndarray,
                               step: float, steps: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Exact constant-control integration: arcs, or lines for near-zero omega.

    Returns xs, ys, thetas of shape (m, steps + 1) including the start pose.
    Headings are unwrapped (cumulative); normalize when exposing poses. This
    one kernel drives both candidate rollouts and the plant, so a simulated
    step and a rollout step of the same control agree exactly.
    """
    m = v.shape[0]
    xs = np.empty((m, steps + 1))
    ys = np.empty((m, steps + 1))
    ths = np.empty((m, steps + 1))
    xs[:, 0] = start.x
    ys[:, 0] = start.y
    ths[:, 0] = start.theta
    straight = np.abs(omega) < OMEGA_STRAIGHT_EPS
    safe_omega = np.where(straight, 1.0, omega)
    radius = v / safe_omega
    for j in range(1, steps + 1):
        th_prev = ths[:, j - 1]
        th_next = th_prev + omega * step
        sin_prev, cos_prev = np.sin(th_prev), np.cos(th_prev)
        dx = np.where(straight, v * step * cos_prev, radius * (np.sin(th_next) - sin_prev))
        dy = np.where(straight, v * step * sin_prev, -radius * (np.cos(th_next) - cos_prev))
        xs[:, j] = xs[:, j - 1] + dx
        ys[:, j] = ys[:, j - 1] + dy
        ths[:, j] = th_next
    return xs, ys, ths


def single_step(pose: Pose, u: ControlInput, dt: float) -> Pose:
    """Advance one pose by one exact constant-control step of length dt."""
    xs, ys, ths = integrate_constant_control(pose, np.array([u.v]), np.array([u.omega]), dt, 1)
    wrapped = normalize_angles(ths[:, 1])
    return Pose(float(xs[0, 1]), float(ys[0, 1]), float(wrapped[0]))


def rollout_batch(start: Pose, v: np.ndarray, omega: np.ndarray,
                  params: ParameterSet) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Constant-control rollout over the configured horizon for a candidate batch."""
    return integrate_constant_control(start, v, omega, params.rollout_step,
                                      params.rollout_steps())


def rollout(start: Pose, u: ControlInput, params: ParameterSet) -> list[Pose]:
    """Trajectory of one candidate over the rollout horizon (start included)."""
    xs, ys, ths = rollout_batch(start, np.array([u.v]), np.array([u.omega]), params)
    wrapped = normalize_angles(ths[0])
    return [Pose(float(x), float(y), float(th)) for x, y, th in zip(xs[0], ys[0], wrapped)]


def trajectory_cell_costs(xs: np.ndarray, ys: np.ndarray,
                          costmap: Costmap) -> tuple[np.ndarray, np.ndarray]:
    """Per-candidate collision flag and peak cell cost along the trajectory.

    Out-of-map poses read as lethal.
    """
    res = costmap.resolution
    rows = np.floor((ys - costmap.origin.y) / res).astype(np.int64)
    cols = np.floor((xs - costmap.origin.x) / res).astype(np.int64)
    inb = (rows >= 0) & (rows < costmap.height) & (cols >= 0) & (cols < costmap.width)
    costs = np.full(xs.shape, float(COST_LETHAL))
    costs[inb] = costmap.cost[rows[inb], cols[inb]]
    peak = costs.max(axis=1)
    return peak >= COST_INSCRIBED, peak


def braking_poses(x0: np.ndarray, y0: np.ndarray, th0: np.ndarray,
                  v0: np.ndarray, omega0: np.ndarray,
                  params: ParameterSet) -> tuple[np.ndarray, np.ndarray]:
    """Plant-faithful braking continuation from (pose, velocity) to rest.

    Replicates the simulator's slew-limited deceleration step for step, so a
    recovery stop only ever traces poses that were collision-checked when the
    control was selected. Returns xs, ys of shape (m, k); k = 0 at rest.
    """
    dt = params.dt
    dv = params.accel_v * dt
    dw = params.accel_omega * dt
    x = np.array(x0, dtype=float)
    y = np.array(y0, dtype=float)
    th = np.array(th0, dtype=float)
    v = np.array(v0, dtype=float)
    w = np.array(omega0, dtype=float)
    cols_x: list[np.ndarray] = []
    cols_y: list[np.ndarray] = []
    while ((v != 0.0) | (w != 0.0)).any():
        v = np.where(np.abs(v) <= dv, 0.0, v - np.sign(v) * dv)
        w = np.where(np.abs(w) <= dw, 0.0, w - np.sign(w) * dw)
        straight = np.abs(w) < OMEGA_STRAIGHT_EPS
        radius = v / np.where(straight, 1.0, w)
        th_next = th + w * dt
        dx = np.where(straight, v * dt * np.cos(th), radius * (np.sin(th_next) - np.sin(th)))
        dy = np.where(straight, v * dt * np.sin(th), -radius * (np.cos(th_next) - np.cos(th)))
        x = x + dx
        y = y + dy
        th = th_next
        cols_x.append(x.copy())
        cols_y.append(y.copy())
    if not cols_x:
        m = x.shape[0]
        return np.empty((m, 0)), np.empty((m, 0))
    return np.stack(cols_x, axis=1), np.stack(cols_y, axis=1)


def braking_collides(xs: np.ndarray, ys: np.ndarray, ths: np.ndarray,
                     v: np.ndarray, omega: np.ndarray, costmap: Costmap,
                     params: ParameterSet) -> np.ndarray:
    """Whether stopping the plant from the trajectory's first step would hit.

    Feasibility includes this stoppability condition: when the candidate set
    later empties and the controller can only command a stop, the braking arc
    has already been verified collision-free.
    """
    bx, by = braking_poses(xs[:, 1], ys[:, 1], ths[:, 1], v, omega, params)
    if bx.shape[1] == 0:
        return np.zeros(v.shape, dtype=bool)
    collided, _ = trajectory_cell_costs(bx, by, costmap)
    return collided


def oscillation_banned(v: np.ndarray, omega: np.ndarray, osc: OscillationState,
                       params: ParameterSet) -> np.ndarray:
    """Candidates whose turn direction opposes the committed one too early.

    Applies to moving candidates only: rotation in place accumulates no
    travel, so banning it would freeze the robot whenever it must reverse its
    turn direction to align with the goal after stopping.
    """
    if osc.last_omega_sign == 0 or osc.distance_since_flip >= params.oscillation_reset_distance:
        return np.zeros(omega.shape, dtype=bool)
    return (np.sign(omega) == -osc.last_omega_sign) & (v > 0.0)


def filter_free(candidates: list[Candidate], costmap: Costmap, footprint: Footprint,
                osc: OscillationState, params: ParameterSet) -> list[Candidate]:
    """Mark candidates infeasible on collision, unstoppable approach, or
    early counter-turn.

    Trajectories must be populated. An all-infeasible result is legitimate
    and signals recovery downstream.
    """
    if not candidates:
        return candidates
    m = len(candidates)
    steps = len(candidates[0].trajectory)
    xs = np.empty((m, steps))
    ys = np.empty((m, steps))
    ths = np.empty((m, steps))
    for i, cand in enumerate(candidates):
        xs[i] = [p.x for p in cand.trajectory]
        ys[i] = [p.y for p in cand.trajectory]
        ths[i] = [p.theta for p in cand.trajectory]
    collided, _ = trajectory_cell_costs(xs, ys, costmap)
    v = np.array([c.u.v for c in candidates])
    omega = np.array([c.u.omega for c in candidates])
    unstoppable = braking_collides(xs, ys, ths, v, omega, costmap, params)
    banned = oscillation_banned(v, omega, osc, params)
    for cand, dead in zip(candidates, collided | unstoppable | banned):
        if dead:
            cand.feasible = False
    return candidates


def critic_matrix(xs: np.ndarray, ys: np.ndarray, ths: np.ndarray, v: np.ndarray,
                  start: Pose, path_points: np.ndarray, goal: Pose,
                  peak_cost: np.ndarray, params: ParameterSet) -> tuple[np.ndarray, np.ndarray]:
    """The six critic values per candidate, plus a rotate-in-place veto mask.

    Column order matches CRITIC_NAMES. Path and goal distance are measured at
    the trajectory end; the alignment variants probe a point translated
    forward_point_distance along the end heading. Alignment terms vanish once
    the end lies inside the goal tolerance (a probe past the goal carries no
    information). Within goal tolerance of the goal, only rotation in place
    is allowed: moving candidates are vetoed and the heading error is scored.
    """
    end_x, end_y, end_th = xs[:, -1], ys[:, -1], ths[:, -1]
    fwd = params.forward_point_distance
    fwd_x = end_x + fwd * np.cos(end_th)
    fwd_y = end_y + fwd * np.sin(end_th)

    end_pts = np.stack([end_x, end_y], axis=1)
    fwd_pts = np.stack([fwd_x, fwd_y], axis=1)
    j_path_dist = polyline_distances(end_pts, path_points)
    j_path_align = polyline_distances(fwd_pts, path_points)
    j_goal_dist = np.hypot(end_x - goal.x, end_y - goal.y)
    j_goal_align = np.hypot(fwd_x - goal.x, fwd_y - goal.y)

    end_at_goal = j_goal_dist <= params.goal_tolerance_xy
    j_path_align = np.where(end_at_goal, 0.0, j_path_align)
    j_goal_align = np.where(end_at_goal, 0.0, j_goal_align)

    j_obstacle = peak_cost / float(COST_LETHAL)

    near_goal = math.hypot(start.x - goal.x, start.y - goal.y) <= params.goal_tolerance_xy
    if near_goal:
        j_rotate = np.abs(normalize_angles(end_th - goal.theta))
        veto_moving = v > 0.0
    else:
        j_rotate = np.zeros(v.shape)
        veto_moving = np.zeros(v.shape, dtype=bool)

    critics = np.stack([j_path_align, j_path_dist, j_obstacle,
                        j_goal_align, j_goal_dist, j_rotate], axis=1)
    return critics, veto_moving


def evaluate_critics(candidate: Candidate, path: GlobalPath, goal: Pose,
                     costmap: Costmap, weights: CriticWeights,
                     params: ParameterSet) -> tuple[np.ndarray, float]:
    """Score one candidate; returns (critic vector, weighted scalar).

    Also stores both on the candidate and applies the rotate-in-place veto.
    """
    traj = candidate.trajectory
    xs = np.array([[p.x for p in traj]])
    ys = np.array([[p.y for p in traj]])
    ths = np.array([[p.theta for p in traj]])
    v = np.array([candidate.u.v])
    _, peak = trajectory_cell_costs(xs, ys, costmap)
    critics, veto = critic_matrix(xs, ys, ths, v, traj[0], path.points, goal, peak, params)
    vector = critics[0]
    scalar = float((vector * weights.as_array()).sum())
    candidate.nav_cost_vector = vector
    candidate.nav_cost = scalar
    if veto[0]:
        candidate.feasible = False
    return vector, scalar


@dataclass
class CandidateBatch:
    """Vectorized candidate set used by the simulation loop."""

    v: np.ndarray
    omega: np.ndarray
    xs: np.ndarray
    ys: np.ndarray
    thetas: np.ndarray
    feasible: np.ndarray
    critics: np.ndarray
    nav_cost: np.ndarray

    def any_feasible(self) -> bool:
        return bool(self.feasible.any())

    def control(self, index: int) -> ControlInput:
        return ControlInput(float(self.v[index]), float(self.omega[index]))

    def as_candidates(self) -> list[Candidate]:
        out = []
        for i in range(self.v.shape[0]):
            wrapped = normalize_angles(self.thetas[i])
            traj = [Pose(float(x), float(y), float(th))
                    for x, y, th in zip(self.xs[i], self.ys[i], wrapped)]
            out.append(Candidate(u=self.control(i), trajectory=traj,
                                 nav_cost_vector=self.critics[i],
                                 nav_cost=float(self.nav_cost[i]),
                                 feasible=bool(self.feasible[i])))
        return out


def evaluate_candidates(start: Pose, current: ControlInput, costmap: Costmap,
                        path: GlobalPath, goal: Pose, osc: OscillationState,
                        params: ParameterSet, weights: CriticWeights) -> CandidateBatch:
    """Sample, roll out, filter, and score the full candidate set in one pass."""
    window = dynamic_window(current, params)
    v, omega = sample_window(window, params)
    xs, ys, ths = rollout_batch(start, v, omega, params)
    collided, peak = trajectory_cell_costs(xs, ys, costmap)
    unstoppable = braking_collides(xs, ys, ths, v, omega, costmap, params)
    banned = oscillation_banned(v, omega, osc, params)
    critics, veto = critic_matrix(xs, ys, ths, v, start, path.points, goal, peak, params)
    feasible = ~(collided | unstoppable | banned | veto)
    nav_cost = (critics * weights.as_array()).sum(axis=1)
    return CandidateBatch(v=v, omega=omega, xs=xs, ys=ys, thetas=ths,
                          feasible=feasible, critics=critics, nav_cost=nav_cost)
