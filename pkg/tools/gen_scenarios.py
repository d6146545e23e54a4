#!/usr/bin/env python3
"""Regenerate the bundled scenario documents.

Maps are built programmatically so walls stay aligned; run this after
changing any layout and commit the resulting JSON.
"""

from __future__ import annotations

import json
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "src" / "nudgenav" / "scenarios"

# Shared tuning for the small exercise maps: coarse grid, short horizon so the
# plant can always realize the selected candidate within one tick, and a low
# replan rate to keep batch runs quick.
FAST_PARAMS = {
    "window_horizon": 0.05,
    "rollout_step": 0.05,
    "replan_interval": 2.0,
    "omega_samples": 15,
    "max_time": 25.0,
}


def blank(width: int, height: int) -> list[list[str]]:
    rows = [["." for _ in range(width)] for _ in range(height)]
    for c in range(width):
        rows[0][c] = "#"
        rows[height - 1][c] = "#"
    for r in range(height):
        rows[r][0] = "#"
        rows[r][width - 1] = "#"
    return rows


def fill(rows: list[list[str]], r0: int, r1: int, c0: int, c1: int) -> None:
    for r in range(r0, r1):
        for c in range(c0, c1):
            rows[r][c] = "#"


def finish(rows: list[list[str]]) -> list[str]:
    return ["".join(r) for r in reversed(rows)]  # document row 0 is the top


def save(name: str, doc: dict) -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    path = OUT / f"{name}.json"
    path.write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
    print(f"wrote {path}")


def open_hall() -> dict:
    rows = blank(60, 40)  # 6 x 4 m at 0.1
    return {
        "name": "open_hall",
        "resolution": 0.1,
        "map": finish(rows),
        "start": {"x": 1.0, "y": 2.0, "theta": 0.0},
        "goal": {"x": 5.0, "y": 2.0, "theta": 0.0},
        "params": dict(FAST_PARAMS),
    }


def corridor_bend() -> dict:
    rows = blank(60, 60)  # 6 x 6 m, L-shaped free space
    fill(rows, 22, 59, 22, 59)  # block the upper-right quadrant interior
    return {
        "name": "corridor_bend",
        "resolution": 0.1,
        "map": finish(rows),
        "start": {"x": 1.0, "y": 1.0, "theta": 0.0},
        "goal": {"x": 1.2, "y": 5.0, "theta": 1.5707963267948966},
        "params": dict(FAST_PARAMS),
    }


def pillars() -> dict:
    rows = blank(70, 45)  # 7 x 4.5 m with a grid of pillars
    for cx in (20, 35, 50):
        for cy in (14, 30):
            fill(rows, cy - 2, cy + 2, cx - 2, cx + 2)
    return {
        "name": "pillars",
        "resolution": 0.1,
        "map": finish(rows),
        "start": {"x": 0.9, "y": 2.2, "theta": 0.0},
        "goal": {"x": 6.1, "y": 2.2, "theta": 0.0},
        "params": dict(FAST_PARAMS),
    }


def doorway() -> dict:
    rows = blank(60, 40)  # wall across the middle with a 1.2 m opening
    fill(rows, 1, 14, 29, 32)
    fill(rows, 26, 39, 29, 32)
    return {
        "name": "doorway",
        "resolution": 0.1,
        "map": finish(rows),
        "start": {"x": 1.0, "y": 2.0, "theta": 0.0},
        "goal": {"x": 5.0, "y": 2.0, "theta": 0.0},
        "params": dict(FAST_PARAMS),
    }


def slalom() -> dict:
    rows = blank(80, 40)  # two staggered baffles with generous gaps
    fill(rows, 1, 18, 30, 33)
    fill(rows, 22, 39, 52, 55)
    return {
        "name": "slalom",
        "resolution": 0.1,
        "map": finish(rows),
        "start": {"x": 1.0, "y": 2.0, "theta": 0.0},
        "goal": {"x": 7.0, "y": 2.0, "theta": 0.0},
        "params": dict(FAST_PARAMS),
    }


def long_hall() -> dict:
    rows = blank(160, 30)  # 16 x 3 m straightaway for release-timing runs
    return {
        "name": "long_hall",
        "resolution": 0.1,
        "map": finish(rows),
        "start": {"x": 0.8, "y": 1.5, "theta": 0.0},
        "goal": {"x": 15.2, "y": 1.5, "theta": 0.0},
        "params": {"max_time": 30.0},
    }


def pothole_detour() -> dict:
    rows = blank(180, 80)  # 9 x 4 m corridor at 0.05, hazard dead ahead
    return {
        "name": "pothole_detour",
        "resolution": 0.05,
        "map": finish(rows),
        "start": {"x": 0.8, "y": 2.0, "theta": 0.0},
        "goal": {"x": 8.2, "y": 2.0, "theta": 0.0},
        "regions": [
            {"type": "circle", "kind": "pothole", "x": 4.5, "y": 2.0, "radius": 0.5}
        ],
        "params": {
            "window_horizon": 0.05,
            "rollout_step": 0.05,
            "replan_interval": 2.0,
            "omega_samples": 15,
            "max_time": 60.0,
        },
    }


def crossing_guard() -> dict:
    rows = blank(80, 50)  # 8 x 5 m hall with a disc pacing across the middle
    return {
        "name": "crossing_guard",
        "resolution": 0.1,
        "map": finish(rows),
        "start": {"x": 1.0, "y": 2.5, "theta": 0.0},
        "goal": {"x": 7.0, "y": 2.5, "theta": 0.0},
        "dynamic_obstacles": [
            {
                "radius": 0.3,
                "waypoints": [
                    {"x": 4.0, "y": 0.8, "t": 0.0},
                    {"x": 4.0, "y": 4.2, "t": 6.0},
                    {"x": 4.0, "y": 0.8, "t": 12.0},
                ],
                "loop": True,
            }
        ],
        "params": {"max_time": 40.0},
    }


def main() -> None:
    for build in (open_hall, corridor_bend, pillars, doorway, slalom,
                  long_hall, pothole_detour, crossing_guard):
        save(build.__name__, build())


if __name__ == "__main__":
    main()
