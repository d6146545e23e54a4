"""Bundled scenarios stay loadable and autonomously completable."""

import pytest

from nudgenav.control import Mode
from nudgenav.scenarios import SAFETY_SUITE, load_bundled, load_bundled_script
from nudgenav.sim import run_scripted

ALL_BUNDLED = ("open_hall", "corridor_bend", "pillars", "doorway", "slalom",
               "long_hall", "pothole_detour", "crossing_guard")


@pytest.mark.parametrize("name", ALL_BUNDLED)
def test_bundled_scenarios_validate(name):
    scenario = load_bundled(name)
    assert scenario.name == name
    assert scenario.grid.width > 0


def test_safety_suite_is_large_enough():
    assert len(SAFETY_SUITE) >= 5


@pytest.mark.parametrize("name", ALL_BUNDLED)
def test_autonomy_completes_every_bundled_map(name):
    scenario = load_bundled(name)
    _, metrics = run_scripted(scenario, [], Mode.SHARED_JOYSTICK)
    assert metrics.status == "goal_reached"
    assert metrics.collisions == 0


@pytest.mark.parametrize("script", ("detour_sj", "detour_sw", "detour_sg"))
def test_bundled_scripts_parse(script):
    scenario = load_bundled("pothole_detour")
    events = load_bundled_script(script, scenario.params.dt)
    assert events and events[0].tick >= 0
