"""Control selection for the three teleoperation modes.

Two selection families exist:

* autonomous tracking: argmin of the weighted critic cost over the feasible
  candidates;
* shared influence: while operator input is active, the same argmin with an
  added penalty on deviating from the operator's command, so the choice is
  bent toward the human while staying inside the collision-free set;
* switching: operator input bypasses the optimizer entirely and is passed to
  the plant verbatim (including reverse); autonomy resumes on release.

Releases in the shared modes are smoothed by a synthetic straight-ahead
command held for a configurable number of seconds, which avoids an abrupt
rotation back onto the global path.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .dwa import Candidate, CandidateBatch
from .inputs import (GestureSample, InputEvent, StickSample, map_gesture,
                     map_joystick_sj, map_joystick_sw)
from .world import STOP, ControlInput, ParameterSet


class Mode(str, enum.Enum):
    """Teleoperation mode wire names."""

    SWITCHING = "sw"
    SHARED_JOYSTICK = "sj"
    SHARED_GESTURE = "sg"


SHARED_MODES = (Mode.SHARED_JOYSTICK, Mode.SHARED_GESTURE)


@dataclass(frozen=True)
class SharedWeights:
    """Penalty per unit of deviation from the operator command."""

    linear: float = 400.0
    angular: float = 800.0

    def __post_init__(self):
        if self.linear < 0 or self.angular < 0:
            raise ValueError("shared weights must be non-negative")

    @classmethod
    def from_params(cls, params: ParameterSet) -> "SharedWeights":
        return cls(linear=params.shared_v_weight, angular=params.shared_omega_weight)


@dataclass
class OperatorState:
    """Per-tick operator gate: mode, live command, and release smoothing."""

    mode: Mode
    gamma: int = 0
    u_h: ControlInput = STOP
    button_down: bool = False
    pseudo_until: float | None = None
    pseudo_v: float = 0.0
    # Latched raw inputs and release bookkeeping.
    stick: StickSample = field(default_factory=lambda: StickSample(0.0, 0.0))
    hand_x: float = 0.0
    gesture_reference: float | None = None
    pseudo_ticks_left: int = 0


def shared_cost(u: ControlInput, u_h: ControlInput, weights: SharedWeights) -> float:
    """Weighted absolute deviation of a candidate from the operator command."""
    return (weights.linear * abs(u_h.v - u.v)
            + weights.angular * abs(u_h.omega - u.omega))


def _argmin(costs: np.ndarray, feasible: np.ndarray, omega: np.ndarray) -> int | None:
    """Index of the cheapest feasible candidate.

    Ties break toward smaller |omega|, then toward the earlier candidate in
    the documented (v-major, omega ascending) order.
    """
    idx = np.flatnonzero(feasible)
    if idx.size == 0:
        return None
    c = costs[idx]
    best = idx[c == c.min()]
    if best.size > 1:
        a = np.abs(omega[best])
        best = best[a == a.min()]
    return int(best[0])


def select_dwa(candidates: list[Candidate]) -> ControlInput:
    """Pure autonomous selection: argmin of the critic cost.

    An empty or all-infeasible set yields the stop command (recovery).
    """
    costs = np.array([c.nav_cost for c in candidates])
    feasible = np.array([c.feasible for c in candidates], dtype=bool)
    omega = np.array([c.u.omega for c in candidates])
    idx = _argmin(costs, feasible, omega) if candidates else None
    return STOP if idx is None else candidates[idx].u


def select_shared(candidates: list[Candidate], op: OperatorState,
                  weights: SharedWeights) -> ControlInput:
    """Shared selection: operator deviation penalty added while input is live.

    The result always comes from the feasible set, whatever the operator
    asks for; with the gate closed this reduces to select_dwa exactly.
    """
    if op.gamma != 1:
        return select_dwa(candidates)
    for cand in candidates:
        cand.shared_cost = shared_cost(cand.u, op.u_h, weights)
        cand.total_cost = cand.nav_cost + cand.shared_cost
    costs = np.array([c.total_cost for c in candidates])
    feasible = np.array([c.feasible for c in candidates], dtype=bool)
    omega = np.array([c.u.omega for c in candidates])
    idx = _argmin(costs, feasible, omega) if candidates else None
    return STOP if idx is None else candidates[idx].u


def select_switching(candidates: list[Candidate], op: OperatorState) -> ControlInput:
    """Switching selection: live input is passed through unfiltered."""
    if op.gamma == 1:
        return op.u_h
    return select_dwa(candidates)


def select_from_batch(batch: CandidateBatch, op: OperatorState,
                      weights: SharedWeights) -> tuple[ControlInput, bool]:
    """Vectorized shared/autonomous selection; returns (command, recovery)."""
    costs = batch.nav_cost
    if op.gamma == 1:
        costs = costs + (weights.linear * np.abs(op.u_h.v - batch.v)
                         + weights.angular * np.abs(op.u_h.omega - batch.omega))
    idx = _argmin(costs, batch.feasible, batch.omega)
    if idx is None:
        return STOP, True
    return batch.control(idx), False


def pseudo_tick_count(params: ParameterSet) -> int:
    """Ticks of synthetic input held after a release: ceil(delta / dt)."""
    return max(0, math.ceil(params.delta / params.dt - 1e-9))


def update_operator_state(op: OperatorState, events: list[InputEvent], now: float,
                          params: ParameterSet) -> OperatorState:
    """Advance the operator gate by one control tick.

    Events carry this tick's raw input. While the button is held the gate is
    open with the mode's live mapping; the tick that sees the release stays
    live, and in the shared modes the following ceil(delta/dt) ticks hold the
    straight-ahead pseudo command before autonomy resumes. New live input
    cancels an active pseudo phase immediately. The switching mode has no
    pseudo phase: the gate closes on the tick after release.
    """
    released = False
    for event in events:
        if event.kind == "stick":
            op.stick = StickSample(event.p_x, event.p_y, now)
        elif event.kind == "gesture":
            op.hand_x = event.hand_x
        elif event.kind == "button_down":
            if not op.button_down:
                op.button_down = True
                op.gesture_reference = op.hand_x
            op.pseudo_ticks_left = 0
            op.pseudo_until = None
        elif event.kind == "button_up":
            if op.button_down:
                op.button_down = False
                released = True

    if op.button_down:
        op.gamma = 1
        op.u_h = _live_command(op, params)
    elif released:
        # The release tick itself still counts as live input.
        op.gamma = 1
        if op.mode in SHARED_MODES:
            op.pseudo_v = params.v_max
            op.u_h = ControlInput(op.pseudo_v, 0.0)
            op.pseudo_ticks_left = pseudo_tick_count(params)
            op.pseudo_until = now + params.delta
        else:
            op.u_h = _live_command(op, params)
        op.gesture_reference = None
    elif op.pseudo_ticks_left > 0 and op.mode in SHARED_MODES:
        op.gamma = 1
        op.u_h = ControlInput(op.pseudo_v, 0.0)
        op.pseudo_ticks_left -= 1
        if op.pseudo_ticks_left == 0:
            op.pseudo_until = None
    else:
        op.gamma = 0
        op.u_h = STOP
        op.pseudo_until = None
    return op


def _live_command(op: OperatorState, params: ParameterSet) -> ControlInput:
    if op.mode is Mode.SWITCHING:
        return map_joystick_sw(op.stick, params)
    if op.mode is Mode.SHARED_JOYSTICK:
        return map_joystick_sj(op.stick, params)
    sample = GestureSample(hand_x=op.hand_x, reference_x=op.gesture_reference)
    return map_gesture(sample, params)
