import json
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from nudgenav.world import ParameterSet, load_scenario


@pytest.fixture
def params():
    return ParameterSet()


def scenario_doc(map_rows, resolution=0.1, start=(1.0, 1.0, 0.0), goal=(2.0, 1.0, 0.0),
                 regions=(), dynamic_obstacles=(), params=None, name="test"):
    """Assemble a scenario document string for inline test worlds."""
    doc = {
        "name": name,
        "resolution": resolution,
        "map": list(map_rows),
        "start": {"x": start[0], "y": start[1], "theta": start[2]},
        "goal": {"x": goal[0], "y": goal[1], "theta": goal[2]},
    }
    if regions:
        doc["regions"] = list(regions)
    if dynamic_obstacles:
        doc["dynamic_obstacles"] = list(dynamic_obstacles)
    if params:
        doc["params"] = dict(params)
    return json.dumps(doc)


def open_box(width_cells=40, height_cells=30, resolution=0.1):
    """Border-walled empty box rows."""
    top = "#" * width_cells
    mid = "#" + "." * (width_cells - 2) + "#"
    return [top] + [mid] * (height_cells - 2) + [top]


@pytest.fixture
def box_scenario():
    text = scenario_doc(open_box(), start=(1.0, 1.5, 0.0), goal=(3.0, 1.5, 0.0),
                        params={"max_time": 30.0})
    return load_scenario(text)
