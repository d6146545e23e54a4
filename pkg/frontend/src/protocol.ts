/** Message schema shared with the telemetry service (docs/protocol.md). */

export type ModeName = "sw" | "sj" | "sg";

export interface PoseMsg {
  x: number;
  y: number;
  theta: number;
}

export interface VelocityMsg {
  v: number;
  omega: number;
}

export interface CircleRegionMsg {
  type: "circle";
  kind: string;
  x: number;
  y: number;
  radius: number;
}

export interface PolygonRegionMsg {
  type: "polygon";
  kind: string;
  vertices: [number, number][];
}

export type RegionMsg = CircleRegionMsg | PolygonRegionMsg;

export interface ObstacleMsg {
  x: number;
  y: number;
  radius: number;
}

export interface MetricsMsg {
  status: string;
  completion_time: number | null;
  regions_not_avoided: number;
  collisions: number;
  path_length: number;
  input_active_time: number;
}

export interface ScenarioMsg {
  name: string;
  resolution: number;
  width: number;
  height: number;
  map: string[];
  start: PoseMsg;
  goal: PoseMsg;
  regions: RegionMsg[];
  params: Record<string, number>;
}

export interface Snapshot {
  type: "snapshot";
  t: number;
  tick: number;
  status: string;
  mode: ModeName;
  running: boolean;
  robot: PoseMsg;
  u: VelocityMsg;
  gamma: 0 | 1;
  u_h: VelocityMsg;
  recovery: boolean;
  path_version: number;
  path_delta: boolean;
  path?: [number, number][];
  obstacles: ObstacleMsg[];
  regions: RegionMsg[];
  metrics: MetricsMsg;
  scenario?: ScenarioMsg;
}

export type ClientMessage =
  | { type: "stick"; p_x: number; p_y: number }
  | { type: "gesture"; hand_x: number }
  | { type: "button_down" }
  | { type: "button_up" }
  | { type: "set_mode"; mode: ModeName }
  | { type: "load_scenario"; text: string }
  | { type: "start" }
  | { type: "pause" }
  | { type: "reset" };

const MODES: ReadonlySet<string> = new Set(["sw", "sj", "sg"]);

function finite(value: unknown): value is number {
  return typeof value === "number" && Number.isFinite(value);
}

/**
 * Validate an outbound message against the documented schema.
 * Returns null when valid, else a description of the violation.
 */
export function validateClientMessage(msg: unknown): string | null {
  if (typeof msg !== "object" || msg === null) {
    return "message must be an object";
  }
  const m = msg as Record<string, unknown>;
  switch (m.type) {
    case "stick":
      if (!finite(m.p_x) || !finite(m.p_y)) return "stick needs numeric p_x and p_y";
      if (Math.abs(m.p_x as number) > 1 || Math.abs(m.p_y as number) > 1) {
        return "stick axes must lie in [-1, 1]";
      }
      return null;
    case "gesture":
      return finite(m.hand_x) ? null : "gesture needs numeric hand_x";
    case "set_mode":
      return MODES.has(m.mode as string) ? null : "set_mode needs mode sw, sj or sg";
    case "load_scenario":
      return typeof m.text === "string" ? null : "load_scenario needs document text";
    case "button_down":
    case "button_up":
    case "start":
    case "pause":
    case "reset":
      return null;
    default:
      return `unknown message type: ${String(m.type)}`;
  }
}

/** Parse a server frame; returns null for non-snapshot frames (acks, errors). */
export function parseSnapshot(raw: string): Snapshot | null {
  let data: unknown;
  try {
    data = JSON.parse(raw);
  } catch {
    throw new Error("server frame is not JSON");
  }
  if (typeof data !== "object" || data === null) {
    throw new Error("server frame is not an object");
  }
  const m = data as Record<string, unknown>;
  if (m.type !== "snapshot") {
    return null;
  }
  for (const key of ["t", "tick", "path_version"]) {
    if (!finite(m[key])) throw new Error(`snapshot missing numeric ${key}`);
  }
  const robot = m.robot as PoseMsg | undefined;
  if (!robot || !finite(robot.x) || !finite(robot.y) || !finite(robot.theta)) {
    throw new Error("snapshot missing robot pose");
  }
  if (m.gamma !== 0 && m.gamma !== 1) {
    throw new Error("snapshot gamma must be 0 or 1");
  }
  return data as Snapshot;
}

export function encodeClientMessage(msg: ClientMessage): string {
  const problem = validateClientMessage(msg);
  if (problem !== null) {
    throw new Error(`refusing to send invalid message: ${problem}`);
  }
  return JSON.stringify(msg);
}
