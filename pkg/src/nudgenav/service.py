"""Live telemetry service: snapshot streaming and operator input over WebSocket.

One JSON document per message in both directions. The simulation loop and the
network ingress touch each other only through a time-stamped event queue and
immutable snapshot dictionaries: inputs are drained at tick boundaries, never
applied mid-tick, and whatever tick an event lands on is recorded, so a
recorded live session replays headlessly to the identical trace.

The full message schema lives in docs/protocol.md.
"""

from __future__ import annotations

import asyncio
import json
from dataclasses import dataclass

from websockets.asyncio.server import serve

from .control import Mode
from .inputs import InputEvent
from .sim import STATUS_RUNNING, Simulation, write_metrics, write_trace
from .world import (CircleRegion, PolygonRegion, Scenario, ScenarioError,
                    load_scenario)

CLIENT_MESSAGE_TYPES = ("stick", "gesture", "button_down", "button_up",
                        "set_mode", "load_scenario", "start", "pause", "reset")
INPUT_MESSAGE_TYPES = ("stick", "gesture", "button_down", "button_up")


class ProtocolError(ValueError):
    """A client message violated the documented schema."""


def validate_client_message(raw: str | bytes) -> dict:
    """Parse and schema-check one client message; raises ProtocolError."""
    try:
        msg = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ProtocolError(f"invalid JSON: {exc.msg}") from exc
    if not isinstance(msg, dict):
        raise ProtocolError("message must be a JSON object")
    mtype = msg.get("type")
    if mtype not in CLIENT_MESSAGE_TYPES:
        raise ProtocolError(f"unknown message type: {mtype!r}")
    if mtype == "stick":
        for key in ("p_x", "p_y"):
            if not isinstance(msg.get(key), (int, float)):
                raise ProtocolError(f"stick message needs numeric {key}")
    elif mtype == "gesture":
        if not isinstance(msg.get("hand_x"), (int, float)):
            raise ProtocolError("gesture message needs numeric hand_x")
    elif mtype == "set_mode":
        if msg.get("mode") not in (m.value for m in Mode):
            raise ProtocolError("set_mode needs mode sw, sj or sg")
    elif mtype == "load_scenario":
        if not isinstance(msg.get("text"), str):
            raise ProtocolError("load_scenario needs a scenario document in 'text'")
    return msg


def _region_dict(region) -> dict:
    if isinstance(region, CircleRegion):
        return {"type": "circle", "kind": region.kind, "x": region.center_x,
                "y": region.center_y, "radius": region.radius}
    assert isinstance(region, PolygonRegion)
    return {"type": "polygon", "kind": region.kind,
            "vertices": [[x, y] for x, y in region.vertices]}


def scenario_block(scenario: Scenario) -> dict:
    """Static geometry sent once per connection, with the first snapshot."""
    grid = scenario.grid
    rows = []
    for r in range(grid.height - 1, -1, -1):  # northernmost row first
        rows.append("".join("#" if c else "." for c in grid.cells[r]))
    return {
        "name": scenario.name,
        "resolution": grid.resolution,
        "width": grid.width,
        "height": grid.height,
        "map": rows,
        "start": {"x": scenario.start.x, "y": scenario.start.y, "theta": scenario.start.theta},
        "goal": {"x": scenario.goal.x, "y": scenario.goal.y, "theta": scenario.goal.theta},
        "regions": [_region_dict(r) for r in scenario.regions],
        "params": {name: value for name, value in scenario.params.header_items()},
    }


def build_snapshot(sim: Simulation, running: bool, include_path: bool,
                   include_scenario: bool) -> dict:
    """Assemble one snapshot dictionary in canonical field order."""
    world = sim.world
    op = world.operator
    snap = {
        "type": "snapshot",
        "t": world.t,
        "tick": sim.tick_index,
        "status": world.status,
        "mode": sim.mode.value,
        "running": running,
        "robot": {"x": world.robot.x, "y": world.robot.y, "theta": world.robot.theta},
        "u": {"v": world.u_actual.v, "omega": world.u_actual.omega},
        "gamma": op.gamma,
        "u_h": {"v": op.u_h.v, "omega": op.u_h.omega},
        "recovery": world.recovery,
        "path_version": sim.path_version,
        "path_delta": not include_path,
        "obstacles": [
            {"x": x, "y": y, "radius": ob.radius}
            for ob, (x, y) in zip(sim.scenario.dynamic_obstacles, world.obstacle_positions)
        ],
        "regions": [_region_dict(r) for r in sim.scenario.regions],
        "metrics": sim.metrics().as_dict(),
    }
    if include_path:
        pts = world.path.points if world.path is not None else []
        snap["path"] = [[float(x), float(y)] for x, y in pts]
    if include_scenario:
        snap["scenario"] = scenario_block(sim.scenario)
    return snap


def encode_snapshot(sim: Simulation, running: bool = False, include_path: bool = True,
                    include_scenario: bool = False) -> bytes:
    """Serialize a snapshot; decode_snapshot(encode_snapshot(x)) round-trips."""
    return json.dumps(build_snapshot(sim, running, include_path, include_scenario),
                      separators=(",", ":")).encode("utf-8")


def decode_snapshot(data: bytes) -> dict:
    return json.loads(data.decode("utf-8"))


@dataclass
class _Client:
    connection: object
    sent_path_version: int = -1
    greeted: bool = False


class TelemetryServer:
    """Serves one simulation to one driver plus any number of observers."""

    def __init__(self, scenario: Scenario, mode: Mode, host: str = "127.0.0.1",
                 port: int = 8765, tick_rate: str = "real",
                 record_inputs: str | None = None, trace_out: str | None = None,
                 metrics_out: str | None = None):
        if tick_rate not in ("real", "fast"):
            raise ValueError("tick_rate must be 'real' or 'fast'")
        self.scenario = scenario
        self.mode = mode
        self.host = host
        self.port = port
        self.tick_rate = tick_rate
        self.record_inputs = record_inputs
        self.trace_out = trace_out
        self.metrics_out = metrics_out
        self.sim = Simulation(scenario, mode)
        self.running = False
        self.driver = None
        self.bound_port: int | None = None
        self._clients: dict[object, _Client] = {}
        self._pending: list[dict] = []
        self._recorded: list[dict] = []
        self._outputs_written = False
        self._stop = asyncio.Event()

    # -- lifecycle ---------------------------------------------------------

    async def run(self, ready: asyncio.Event | None = None) -> None:
        async with serve(self._handler, self.host, self.port) as server:
            self.bound_port = server.sockets[0].getsockname()[1]
            print(f"listening on ws://{self.host}:{self.bound_port}", flush=True)
            if ready is not None:
                ready.set()
            ticker = asyncio.create_task(self._tick_loop())
            try:
                await self._stop.wait()
            finally:
                ticker.cancel()
                self._write_outputs()

    def stop(self) -> None:
        self._stop.set()

    # -- simulation loop ---------------------------------------------------

    async def _tick_loop(self) -> None:
        dt = self.sim.params.dt
        while True:
            if self.running and self.sim.world.status == STATUS_RUNNING:
                events = self._drain_pending()
                self.sim.tick(events)
                await self._broadcast()
                if self.sim.world.status != STATUS_RUNNING:
                    self.running = False
                    self._write_outputs()
                if self.tick_rate == "real":
                    await asyncio.sleep(dt)
                else:
                    await asyncio.sleep(0)
            else:
                await asyncio.sleep(dt if self.tick_rate == "real" else 0.001)

    def _drain_pending(self) -> list[InputEvent]:
        tick = self.sim.tick_index
        t = tick * self.sim.params.dt
        events = []
        for msg in self._pending:
            event = InputEvent(tick=tick, kind=msg["type"],
                               p_x=float(msg.get("p_x", 0.0)),
                               p_y=float(msg.get("p_y", 0.0)),
                               hand_x=float(msg.get("hand_x", 0.0)))
            events.append(event)
            record = {"t": t, "kind": msg["type"]}
            if msg["type"] == "stick":
                record["p_x"] = event.p_x
                record["p_y"] = event.p_y
            elif msg["type"] == "gesture":
                record["hand_x"] = event.hand_x
            self._recorded.append(record)
        self._pending.clear()
        return events

    def _write_outputs(self) -> None:
        if self._outputs_written:
            return
        self._outputs_written = True
        if self.trace_out:
            write_trace(self.trace_out, self.sim.trace, self.scenario.name,
                        self.mode, self.sim.params)
        if self.metrics_out:
            write_metrics(self.metrics_out, self.sim.metrics())
        if self.record_inputs:
            with open(self.record_inputs, "w", encoding="utf-8", newline="\n") as fh:
                for record in self._recorded:
                    fh.write(json.dumps(record, separators=(",", ":")) + "\n")

    # -- connections ---------------------------------------------------------

    async def _broadcast(self) -> None:
        for client in list(self._clients.values()):
            await self._send_snapshot(client)

    async def _send_snapshot(self, client: _Client) -> None:
        first = not client.greeted
        include_path = first or client.sent_path_version != self.sim.path_version
        data = encode_snapshot(self.sim, running=self.running,
                               include_path=include_path, include_scenario=first)
        try:
            await client.connection.send(data.decode("utf-8"))
        except Exception:
            return
        client.greeted = True
        if include_path:
            client.sent_path_version = self.sim.path_version

    async def _handler(self, connection) -> None:
        client = _Client(connection=connection)
        self._clients[connection] = client
        try:
            await self._send_snapshot(client)
            async for raw in connection:
                await self._handle_message(client, raw)
        finally:
            self._clients.pop(connection, None)
            if self.driver is connection:
                self.driver = None
                if self.sim.world.operator.button_down:
                    # Losing the driver mid-press is an input release.
                    self._pending.append({"type": "button_up"})

    async def _handle_message(self, client: _Client, raw: str | bytes) -> None:
        try:
            msg = validate_client_message(raw)
        except ProtocolError as exc:
            await self._reply(client, {"type": "error", "message": str(exc)})
            return
        mtype = msg["type"]
        if mtype in INPUT_MESSAGE_TYPES:
            if self.driver is None:
                self.driver = client.connection
            if self.driver is not client.connection:
                await self._reply(client, {"type": "error",
                                           "message": "another client is driving"})
                return
            self._pending.append(msg)
            return
        if mtype == "start":
            if self.sim.world.status == STATUS_RUNNING:
                self.running = True
            await self._reply(client, {"type": "ack", "for": "start"})
        elif mtype == "pause":
            self.running = False
            await self._reply(client, {"type": "ack", "for": "pause"})
        elif mtype == "reset":
            self._reset(self.scenario, self.mode)
            await self._reply(client, {"type": "ack", "for": "reset"})
            await self._broadcast_full()
        elif mtype == "set_mode":
            if self.sim.tick_index > 0:
                await self._reply(client, {"type": "error",
                                           "message": "set_mode requires a reset first"})
                return
            self._reset(self.scenario, Mode(msg["mode"]))
            await self._reply(client, {"type": "ack", "for": "set_mode"})
            await self._broadcast_full()
        elif mtype == "load_scenario":
            try:
                scenario = load_scenario(msg["text"])
            except ScenarioError as exc:
                await self._reply(client, {"type": "error", "message": str(exc)})
                return
            self._reset(scenario, self.mode)
            await self._reply(client, {"type": "ack", "for": "load_scenario"})
            await self._broadcast_full()

    def _reset(self, scenario: Scenario, mode: Mode) -> None:
        self.scenario = scenario
        self.mode = mode
        self.sim = Simulation(scenario, mode)
        self.running = False
        self._pending.clear()
        self._recorded.clear()
        self._outputs_written = False

    async def _broadcast_full(self) -> None:
        for client in self._clients.values():
            client.greeted = False
            client.sent_path_version = -1
        await self._broadcast()

    async def _reply(self, client: _Client, payload: dict) -> None:
        try:
            await client.connection.send(json.dumps(payload, separators=(",", ":")))
        except Exception:
            pass
