"""Bundled scenario documents and input scripts."""

from __future__ import annotations

from importlib import resources

from ..inputs import InputEvent, load_input_script
from ..world import Scenario, load_scenario

SAFETY_SUITE = ("open_hall", "corridor_bend", "pillars", "doorway", "slalom",
                "pothole_detour")


def scenario_text(name: str) -> str:
    return resources.files(__package__).joinpath(f"{name}.json").read_text("utf-8")


def load_bundled(name: str, extra_params: dict | None = None) -> Scenario:
    return load_scenario(scenario_text(name), extra_params)


def script_text(name: str) -> str:
    return resources.files(__package__).joinpath("scripts", f"{name}.jsonl").read_text("utf-8")


def load_bundled_script(name: str, dt: float) -> list[InputEvent]:
    return load_input_script(script_text(name), dt)
