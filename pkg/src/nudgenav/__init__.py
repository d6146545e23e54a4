"""Shared-control navigation stack with a deterministic 2D simulator.

A differential-drive robot tracks a periodically replanned global path with a
sampled-velocity local controller; a human can bend the executed trajectory
either by biasing the controller's optimization (shared modes) or by taking
direct control (switching mode). Everything runs on one fixed clock so runs
replay byte for byte.
"""

from .control import (Mode, OperatorState, SharedWeights, select_dwa,
                      select_shared, select_switching, shared_cost,
                      update_operator_state)
from .dwa import (Candidate, CriticWeights, DynamicWindow, OscillationState,
                  dynamic_window, evaluate_critics, filter_free, rollout,
                  sample_controls)
from .inputs import (DEADZONE, GestureSample, InputEvent, NoReferenceError,
                     StickSample, load_input_script, load_input_script_file,
                     map_gesture, map_joystick_sj, map_joystick_sw)
from .planner import (GlobalPath, NoPathError, ReplanScheduler, path_length,
                      plan, replan_due)
from .sim import (Metrics, Simulation, TraceRow, WorldState, check_goal,
                  format_trace, region_accounting, run_scripted, write_metrics,
                  write_trace)
from .world import (ControlInput, Costmap, Footprint, OccupancyGrid,
                    ParameterSet, Pose, RegionToAvoid, Scenario, ScenarioError,
                    footprint_collides, inflate, load_scenario,
                    load_scenario_file, region_intersects)

__version__ = "0.1.0"
