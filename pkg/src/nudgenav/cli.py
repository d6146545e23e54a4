"""Command line entry points: headless scripted runs and the live service."""

from __future__ import annotations

import argparse
import asyncio
import json
import sys

from .control import Mode
from .inputs import ScriptError, load_input_script_file
from .sim import (STATUS_GOAL, STATUS_RUNNING, STATUS_TIMEOUT, Simulation,
                  write_metrics, write_trace)
from .world import ScenarioError, load_scenario_file

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_TIMEOUT = 2


def _parse_params(pairs: list[str]) -> dict:
    overrides = {}
    for pair in pairs:
        key, sep, value = pair.partition("=")
        if not sep or not key:
            raise ScenarioError(f"--param expects key=value, got {pair!r}")
        overrides[key] = value
    return overrides


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nudgenav",
                                     description="Shared-control navigation simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute a scripted run headlessly")
    run.add_argument("--scenario", required=True, help="scenario document path")
    run.add_argument("--mode", required=True, choices=[m.value for m in Mode])
    run.add_argument("--inputs", help="input script (JSON lines); empty when omitted")
    run.add_argument("--trace", help="trace CSV output path")
    run.add_argument("--metrics", help="metrics JSON output path")
    run.add_argument("--param", action="append", default=[], metavar="KEY=VALUE",
                     help="override one parameter (repeatable)")
    run.add_argument("--dump-candidates", help="debug: per-tick candidate JSON lines")

    srv = sub.add_parser("serve", help="serve a live teleoperation session")
    srv.add_argument("--port", type=int, default=8765, help="0 picks a free port")
    srv.add_argument("--host", default="127.0.0.1")
    srv.add_argument("--scenario", required=True)
    srv.add_argument("--mode", default="sj", choices=[m.value for m in Mode])
    srv.add_argument("--tick-rate", default="real", choices=["real", "fast"])
    srv.add_argument("--param", action="append", default=[], metavar="KEY=VALUE")
    srv.add_argument("--record-inputs", help="write received input events here")
    srv.add_argument("--trace", help="trace CSV output path")
    srv.add_argument("--metrics", help="metrics JSON output path")
    return parser


def cli_run(args) -> int:
    try:
        scenario = load_scenario_file(args.scenario, _parse_params(args.param))
        events = (load_input_script_file(args.inputs, scenario.params.dt)
                  if args.inputs else [])
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (ScenarioError, ScriptError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR

    sim = Simulation(scenario, Mode(args.mode), events)
    dump = open(args.dump_candidates, "w", encoding="utf-8") if args.dump_candidates else None
    try:
        while sim.world.status == STATUS_RUNNING:
            sim.tick()
            if (dump is not None and sim.last_batch is not None
                    and sim.world.status == STATUS_RUNNING):
                batch = sim.last_batch
                for i in range(batch.v.shape[0]):
                    dump.write(json.dumps({
                        "t": sim.trace[-1].t, "v": float(batch.v[i]),
                        "omega": float(batch.omega[i]),
                        "feasible": bool(batch.feasible[i]),
                        "nav_cost": float(batch.nav_cost[i]),
                    }, separators=(",", ":")) + "\n")
    finally:
        if dump is not None:
            dump.close()

    metrics = sim.metrics()
    if args.trace:
        write_trace(args.trace, sim.trace, scenario.name, sim.mode, scenario.params)
    if args.metrics:
        write_metrics(args.metrics, metrics)
    print(f"status={metrics.status} t={sim.world.t:.2f}s "
          f"collisions={metrics.collisions} regions={metrics.regions_not_avoided}")
    if metrics.status == STATUS_GOAL:
        return EXIT_OK
    if metrics.status == STATUS_TIMEOUT:
        return EXIT_TIMEOUT
    return EXIT_ERROR


def cli_serve(args) -> int:
    from .service import TelemetryServer

    try:
        scenario = load_scenario_file(args.scenario, _parse_params(args.param))
    except (FileNotFoundError, ScenarioError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    server = TelemetryServer(scenario, Mode(args.mode), host=args.host, port=args.port,
                             tick_rate=args.tick_rate, record_inputs=args.record_inputs,
                             trace_out=args.trace, metrics_out=args.metrics)
    try:
        asyncio.run(server.run())
    except KeyboardInterrupt:
        pass
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "run":
        return cli_run(args)
    return cli_serve(args)


if __name__ == "__main__":
    sys.exit(main())
