/** Canvas drawing of the world view. Rendering is a pure function of the
 * view state; there is no simulation logic on the client. */

import { Camera } from "./camera.js";
import { RegionMsg, ScenarioMsg, Snapshot } from "./protocol.js";

/** The subset of CanvasRenderingContext2D the renderer uses (testable). */
export interface Ctx2D {
  fillStyle: string | CanvasGradient | CanvasPattern;
  strokeStyle: string | CanvasGradient | CanvasPattern;
  lineWidth: number;
  globalAlpha: number;
  font: string;
  fillRect(x: number, y: number, w: number, h: number): void;
  beginPath(): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  arc(x: number, y: number, r: number, a0: number, a1: number): void;
  closePath(): void;
  stroke(): void;
  fill(): void;
  fillText(text: string, x: number, y: number): void;
}

export interface ViewState {
  snapshot: Snapshot | null;
  scenario: ScenarioMsg | null;
  path: [number, number][];
  camera: Camera;
  connection: "connecting" | "open" | "closed";
  width: number;
  height: number;
}

const COLORS = {
  background: "#10141a",
  wall: "#4a5568",
  floor: "#1c2430",
  path: "#2ecc40",
  robot: "#4da3ff",
  goal: "#ffd166",
  obstacle: "#8899aa",
  region: "#e65c4f",
  hud: "#e8edf4",
  recovery: "#ff4136",
};

export function render(ctx: Ctx2D, view: ViewState): void {
  ctx.fillStyle = COLORS.background;
  ctx.fillRect(0, 0, view.width, view.height);
  if (view.scenario) {
    drawMap(ctx, view, view.scenario);
    drawRegions(ctx, view, view.scenario.regions);
    drawGoal(ctx, view, view.scenario.goal.x, view.scenario.goal.y);
  }
  const snap = view.snapshot;
  if (snap) {
    drawPath(ctx, view, view.path);
    for (const ob of snap.obstacles) {
      drawDisc(ctx, view, ob.x, ob.y, ob.radius, COLORS.obstacle);
    }
    drawRobot(ctx, view, snap);
  }
  drawHud(ctx, view);
}

function drawMap(ctx: Ctx2D, view: ViewState, scenario: ScenarioMsg): void {
  const res = scenario.resolution;
  const [x0, y0] = view.camera.toScreen(0, scenario.height * res);
  ctx.fillStyle = COLORS.floor;
  ctx.fillRect(x0, y0, view.camera.scale(scenario.width * res),
               view.camera.scale(scenario.height * res));
  ctx.fillStyle = COLORS.wall;
  const cell = view.camera.scale(res) + 0.5;
  scenario.map.forEach((row, docRow) => {
    const top = (scenario.height - docRow) * res;
    for (let col = 0; col < row.length; col++) {
      if (row[col] === "#") {
        const [sx, sy] = view.camera.toScreen(col * res, top);
        ctx.fillRect(sx, sy, cell, cell);
      }
    }
  });
}

function drawPath(ctx: Ctx2D, view: ViewState, path: [number, number][]): void {
  if (path.length < 2) {
    return;
  }
  ctx.strokeStyle = COLORS.path;
  ctx.lineWidth = 3;
  ctx.beginPath();
  const [sx, sy] = view.camera.toScreen(path[0][0], path[0][1]);
  ctx.moveTo(sx, sy);
  for (let i = 1; i < path.length; i++) {
    const [x, y] = view.camera.toScreen(path[i][0], path[i][1]);
    ctx.lineTo(x, y);
  }
  ctx.stroke();
}

function drawRegions(ctx: Ctx2D, view: ViewState, regions: RegionMsg[]): void {
  ctx.globalAlpha = 0.45;
  for (const region of regions) {
    ctx.fillStyle = COLORS.region;
    ctx.beginPath();
    if (region.type === "circle") {
      const [x, y] = view.camera.toScreen(region.x, region.y);
      ctx.arc(x, y, view.camera.scale(region.radius), 0, 2 * Math.PI);
    } else {
      region.vertices.forEach(([vx, vy], i) => {
        const [x, y] = view.camera.toScreen(vx, vy);
        if (i === 0) ctx.moveTo(x, y);
        else ctx.lineTo(x, y);
      });
      ctx.closePath();
    }
    ctx.fill();
  }
  ctx.globalAlpha = 1.0;
}

function drawDisc(ctx: Ctx2D, view: ViewState, x: number, y: number,
                  radius: number, color: string): void {
  ctx.fillStyle = color;
  ctx.beginPath();
  const [sx, sy] = view.camera.toScreen(x, y);
  ctx.arc(sx, sy, view.camera.scale(radius), 0, 2 * Math.PI);
  ctx.fill();
}

function drawGoal(ctx: Ctx2D, view: ViewState, x: number, y: number): void {
  ctx.strokeStyle = COLORS.goal;
  ctx.lineWidth = 2;
  ctx.beginPath();
  const [sx, sy] = view.camera.toScreen(x, y);
  ctx.arc(sx, sy, view.camera.scale(0.25), 0, 2 * Math.PI);
  ctx.stroke();
}

function drawRobot(ctx: Ctx2D, view: ViewState, snap: Snapshot): void {
  const { x, y, theta } = snap.robot;
  const r = 0.3;
  ctx.fillStyle = snap.recovery ? COLORS.recovery : COLORS.robot;
  ctx.beginPath();
  const nose = view.camera.toScreen(x + r * Math.cos(theta), y + r * Math.sin(theta));
  const left = view.camera.toScreen(x + r * Math.cos(theta + 2.5), y + r * Math.sin(theta + 2.5));
  const right = view.camera.toScreen(x + r * Math.cos(theta - 2.5), y + r * Math.sin(theta - 2.5));
  ctx.moveTo(nose[0], nose[1]);
  ctx.lineTo(left[0], left[1]);
  ctx.lineTo(right[0], right[1]);
  ctx.closePath();
  ctx.fill();
}

/** HUD lines as data, so text content is testable without a canvas. */
export function hudLines(view: ViewState): string[] {
  const snap = view.snapshot;
  if (!snap) {
    return [`connection: ${view.connection}`, "waiting for snapshot..."];
  }
  const m = snap.metrics;
  const lines = [
    `t=${snap.t.toFixed(2)}s  mode=${snap.mode}  ${snap.running ? "running" : "paused"}  ${snap.status}`,
    `input ${snap.gamma ? "ACTIVE" : "idle"}  u_h=(${snap.u_h.v.toFixed(2)}, ${snap.u_h.omega.toFixed(2)})`,
    `u=(${snap.u.v.toFixed(2)}, ${snap.u.omega.toFixed(2)})  path v${snap.path_version}`,
    `regions=${m.regions_not_avoided}  collisions=${m.collisions}  dist=${m.path_length.toFixed(1)}m`,
  ];
  if (view.path.length === 0) {
    lines.push("planning...");
  }
  if (snap.recovery) {
    lines.push("!! RECOVERY: no feasible motion, holding !!");
  }
  return lines;
}

function drawHud(ctx: Ctx2D, view: ViewState): void {
  ctx.font = "14px monospace";
  const lines = hudLines(view);
  lines.forEach((line, i) => {
    ctx.fillStyle = line.startsWith("!!") ? COLORS.recovery : COLORS.hud;
    ctx.fillText(line, 12, 22 + 18 * i);
  });
  const snap = view.snapshot;
  if (snap && snap.gamma === 1) {
    ctx.fillStyle = COLORS.goal;
    ctx.fillRect(view.width - 26, 12, 14, 14);
  }
}
