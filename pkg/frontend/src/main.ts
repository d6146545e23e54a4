/** Bootstrap: DOM wiring, the animation loop, and input plumbing. */

import { Camera } from "./camera.js";
import { InputStream, dragToHandX, gamepadButtonHeld, gamepadStick, keyFor,
         stepKeyStick, HeldKeys, KeyStickState } from "./input.js";
import { Connection } from "./net.js";
import { ModeName } from "./protocol.js";
import { Ctx2D, ViewState, render } from "./render.js";

const TICK_MS = 50;

function main(): void {
  const canvas = document.getElementById("view") as HTMLCanvasElement;
  const ctx = canvas.getContext("2d") as unknown as Ctx2D;
  const statusLine = document.getElementById("status") as HTMLElement;

  const view: ViewState = {
    snapshot: null,
    scenario: null,
    path: [],
    camera: new Camera(),
    connection: "closed",
    width: canvas.width,
    height: canvas.height,
  };
  view.camera.resize(canvas.width, canvas.height);

  const connection = new Connection({
    onSnapshot: (snapshot) => { view.snapshot = snapshot; },
    onScenario: (scenario) => {
      view.scenario = scenario;
      view.camera.fit(scenario.width * scenario.resolution,
                      scenario.height * scenario.resolution);
    },
    onPath: (path) => { view.path = path; },
    onStatus: (state) => { view.connection = state; },
    onError: (message) => { statusLine.textContent = message; },
  });

  const stream = new InputStream(TICK_MS, (msg) => connection.send(msg));

  // Keyboard stick synthesis; Space is the input button.
  const held: HeldKeys = { up: false, down: false, left: false, right: false };
  let stick: KeyStickState = { p_x: 0, p_y: 0 };
  window.addEventListener("keydown", (e) => {
    const key = keyFor(e.code);
    if (key) { held[key] = true; e.preventDefault(); }
    if (e.code === "Space") { stream.setButton(true); e.preventDefault(); }
  });
  window.addEventListener("keyup", (e) => {
    const key = keyFor(e.code);
    if (key) held[key] = false;
    if (e.code === "Space") stream.setButton(false);
  });

  // Pointer drag = gesture input while the primary button is held.
  let dragOriginX: number | null = null;
  canvas.addEventListener("pointerdown", (e) => {
    dragOriginX = e.clientX;
    stream.setButton(true);
  });
  window.addEventListener("pointermove", (e) => {
    if (dragOriginX !== null) {
      stream.sample(performance.now(),
                    { type: "gesture", hand_x: dragToHandX(e.clientX - dragOriginX) });
    }
  });
  window.addEventListener("pointerup", () => {
    dragOriginX = null;
    stream.setButton(false);
  });

  for (const mode of ["sw", "sj", "sg"] as ModeName[]) {
    document.getElementById(`mode-${mode}`)?.addEventListener("click", () => {
      connection.send({ type: "set_mode", mode });
    });
  }
  document.getElementById("start")?.addEventListener("click",
    () => connection.send({ type: "start" }));
  document.getElementById("pause")?.addEventListener("click",
    () => connection.send({ type: "pause" }));
  document.getElementById("reset")?.addEventListener("click",
    () => connection.send({ type: "reset" }));
  document.getElementById("connect")?.addEventListener("click", () => {
    const url = (document.getElementById("server") as HTMLInputElement).value;
    connection.connect(url);
  });

  let lastInputSend = 0;
  let lastFrame = performance.now();
  function frame(now: number): void {
    const dt = Math.min(0.1, (now - lastFrame) / 1000);
    lastFrame = now;

    stick = stepKeyStick(stick, held, dt);
    const pads = navigator.getGamepads ? navigator.getGamepads() : [];
    const pad = pads && pads[0];
    if (pad) {
      stick = gamepadStick(pad);
      stream.setButton(gamepadButtonHeld(pad));
    }
    const active = stream.isDown || Math.abs(stick.p_x) > 0.01 || Math.abs(stick.p_y) > 0.01;
    if (active && dragOriginX === null && now - lastInputSend >= TICK_MS) {
      lastInputSend = now;
      stream.sample(now, { type: "stick", p_x: stick.p_x, p_y: stick.p_y });
    }

    render(ctx, view);
    requestAnimationFrame(frame);
  }
  requestAnimationFrame(frame);
}

main();
