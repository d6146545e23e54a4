"""Raw operator input: stick/gesture samples, command mapping, script files."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .geometry import clamp
from .world import ControlInput, ParameterSet

# Stick deflections at or below this magnitude map to zero output.
DEADZONE = 0.1

EVENT_KINDS = ("stick", "gesture", "button_down", "button_up")


class NoReferenceError(RuntimeError):
    """Gesture mapping requested without an active press to anchor it."""


class ScriptError(ValueError):
    """An input script failed to parse."""


@dataclass(frozen=True)
class StickSample:
    """Joystick deflection in [-1, 1] per axis; clamped on ingest."""

    p_x: float
    p_y: float
    t: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "p_x", clamp(float(self.p_x), -1.0, 1.0))
        object.__setattr__(self, "p_y", clamp(float(self.p_y), -1.0, 1.0))


@dataclass(frozen=True)
class GestureSample:
    """Lateral hand position (m) relative to the reference captured at press."""

    hand_x: float
    t: float = 0.0
    reference_x: float | None = None


def _quadratic(p: float, limit: float) -> float:
    """Deadzoned quadratic mapping: 0 inside the deadzone, p^2*sign(p)*limit outside."""
    if abs(p) <= DEADZONE:
        return 0.0
    return math.copysign(p * p * limit, p)


def map_joystick_sw(sample: StickSample, params: ParameterSet) -> ControlInput:
    """Manual-mode stick mapping: both axes drive the robot directly."""
    return ControlInput(_quadratic(sample.p_y, params.v_max),
                        _quadratic(sample.p_x, params.omega_max))


def map_joystick_sj(sample: StickSample, params: ParameterSet) -> ControlInput:
    """Shared-mode stick mapping: full forward speed, stick bends the heading.

    Pinning v to v_max keeps the preference from rewarding rotate-in-place
    candidates.
    """
    return ControlInput(params.v_max, _quadratic(sample.p_x, params.omega_max))


def map_gesture(sample: GestureSample, params: ParameterSet) -> ControlInput:
    """Gesture mapping: normalized lateral hand displacement bends the heading."""
    if sample.reference_x is None:
        raise NoReferenceError("no press active: gesture has no reference position")
    p = clamp((sample.hand_x - sample.reference_x) / params.gesture_span, -1.0, 1.0)
    return ControlInput(params.v_max, _quadratic(p, params.omega_max))


@dataclass(frozen=True)
class InputEvent:
    """One operator event, quantized to a control tick."""

    tick: int
    kind: str
    p_x: float = 0.0
    p_y: float = 0.0
    hand_x: float = 0.0


def quantize_tick(t: float, dt: float) -> int:
    """First control tick at or after time t (events never apply mid-tick)."""
    return max(0, math.ceil(t / dt - 1e-9))


def load_input_script(text: str, dt: float) -> list[InputEvent]:
    """Parse a JSON-lines input script and quantize events to control ticks.

    Each line: {"t": seconds, "kind": "stick"|"gesture"|"button_down"|"button_up",
    "p_x"?: float, "p_y"?: float, "hand_x"?: float}. Events are ordered by
    (tick, line order).
    """
    events: list[tuple[int, int, InputEvent]] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        try:
            raw = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ScriptError(f"line {lineno}: invalid JSON: {exc.msg}") from exc
        if not isinstance(raw, dict):
            raise ScriptError(f"line {lineno}: event must be an object")
        kind = raw.get("kind")
        if kind not in EVENT_KINDS:
            raise ScriptError(f"line {lineno}: kind must be one of {EVENT_KINDS}")
        try:
            t = float(raw["t"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ScriptError(f"line {lineno}: missing or invalid 't'") from exc
        event = InputEvent(
            tick=quantize_tick(t, dt),
            kind=kind,
            p_x=clamp(float(raw.get("p_x", 0.0)), -1.0, 1.0),
            p_y=clamp(float(raw.get("p_y", 0.0)), -1.0, 1.0),
            hand_x=float(raw.get("hand_x", 0.0)),
        )
        events.append((event.tick, lineno, event))
    events.sort(key=lambda item: (item[0], item[1]))
    return [event for _, _, event in events]


def load_input_script_file(path: str, dt: float) -> list[InputEvent]:
    with open(path, "r", encoding="utf-8") as fh:
        return load_input_script(fh.read(), dt)


def events_by_tick(events: list[InputEvent]) -> dict[int, list[InputEvent]]:
    grouped: dict[int, list[InputEvent]] = {}
    for event in events:
        grouped.setdefault(event.tick, []).append(event)
    return grouped
