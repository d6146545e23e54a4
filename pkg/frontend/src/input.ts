/** Operator input capture: keyboard stick synthesis, pointer-drag gesture,
 * and gamepad polling, reduced to protocol messages at the control rate. */

import { ClientMessage } from "./protocol.js";

/** Pixels of pointer drag per meter of virtual hand travel (documented:
 * 100 px at 500 px/m equals the full 0.2 m gesture span). */
export const PX_PER_METER = 500;

/** Stick ramp speed for held keys, in full deflections per second. */
export const KEY_RAMP_PER_S = 2.5;
/** Decay speed back to center once keys are released. */
export const KEY_DECAY_PER_S = 6.0;

export interface KeyStickState {
  p_x: number;
  p_y: number;
}

export interface HeldKeys {
  up: boolean;
  down: boolean;
  left: boolean;
  right: boolean;
}

/** Advance the synthesized stick one frame: held keys ramp toward full
 * deflection; released axes decay back to center. */
export function stepKeyStick(state: KeyStickState, held: HeldKeys,
                             dtSeconds: number): KeyStickState {
  const ramp = KEY_RAMP_PER_S * dtSeconds;
  const decay = KEY_DECAY_PER_S * dtSeconds;
  const axis = (value: number, pos: boolean, neg: boolean): number => {
    if (pos === neg) {
      // Neither key (or a contradictory pair): decay to center.
      const magnitude = Math.max(0, Math.abs(value) - decay);
      return magnitude === 0 ? 0 : Math.sign(value) * magnitude;
    }
    const target = pos ? 1 : -1;
    return Math.max(-1, Math.min(1, value + target * ramp));
  };
  return {
    p_x: axis(state.p_x, held.right, held.left),
    p_y: axis(state.p_y, held.up, held.down),
  };
}

export function keyFor(code: string): keyof HeldKeys | null {
  switch (code) {
    case "ArrowUp":
    case "KeyW":
      return "up";
    case "ArrowDown":
    case "KeyS":
      return "down";
    case "ArrowLeft":
    case "KeyA":
      return "left";
    case "ArrowRight":
    case "KeyD":
      return "right";
    default:
      return null;
  }
}

/** Pointer drag to lateral hand displacement in meters. */
export function dragToHandX(dxPixels: number): number {
  return dxPixels / PX_PER_METER;
}

export interface GamepadLike {
  axes: ReadonlyArray<number>;
  buttons: ReadonlyArray<{ pressed: boolean }>;
}

export function gamepadStick(pad: GamepadLike): KeyStickState {
  const clamp = (v: number) => Math.max(-1, Math.min(1, v));
  return {
    p_x: clamp(pad.axes[0] ?? 0),
    // Gamepad y-axis points down; forward deflection must be positive.
    p_y: clamp(-(pad.axes[1] ?? 0)),
  };
}

export function gamepadButtonHeld(pad: GamepadLike): boolean {
  return Boolean(pad.buttons[0]?.pressed);
}

/** Tracks button edges and emits at most one sample message per period. */
export class InputStream {
  private buttonDown = false;
  private lastSent = -Infinity;

  constructor(private periodMs: number, private send: (msg: ClientMessage) => void) {}

  setButton(down: boolean): void {
    if (down !== this.buttonDown) {
      this.buttonDown = down;
      this.send({ type: down ? "button_down" : "button_up" });
    }
  }

  get isDown(): boolean {
    return this.buttonDown;
  }

  /** Forward the current sample, rate-limited to the control period. */
  sample(nowMs: number, msg: ClientMessage): void {
    if (nowMs - this.lastSent < this.periodMs) {
      return;
    }
    this.lastSent = nowMs;
    this.send(msg);
  }
}
