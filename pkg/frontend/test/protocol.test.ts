import assert from "node:assert/strict";
import { test } from "node:test";

import { encodeClientMessage, parseSnapshot,
         validateClientMessage } from "../src/protocol.js";

const SNAPSHOT = {
  type: "snapshot",
  t: 0.25,
  tick: 5,
  status: "running",
  mode: "sj",
  running: true,
  robot: { x: 1.0, y: 2.0, theta: 0.1 },
  u: { v: 0.5, omega: 0.0 },
  gamma: 0,
  u_h: { v: 0.0, omega: 0.0 },
  recovery: false,
  path_version: 1,
  path_delta: false,
  path: [[1, 2], [1.5, 2]],
  obstacles: [],
  regions: [],
  metrics: {
    status: "running", completion_time: null, regions_not_avoided: 0,
    collisions: 0, path_length: 0.2, input_active_time: 0,
  },
};

test("valid client messages pass validation", () => {
  assert.equal(validateClientMessage({ type: "stick", p_x: 0.2, p_y: -1 }), null);
  assert.equal(validateClientMessage({ type: "gesture", hand_x: 0.05 }), null);
  assert.equal(validateClientMessage({ type: "button_down" }), null);
  assert.equal(validateClientMessage({ type: "set_mode", mode: "sg" }), null);
  assert.equal(validateClientMessage({ type: "start" }), null);
});

test("schema violations are named", () => {
  assert.match(validateClientMessage({ type: "stick", p_x: 0.2 })!, /p_y/);
  assert.match(validateClientMessage({ type: "stick", p_x: 2, p_y: 0 })!, /\[-1, 1\]/);
  assert.match(validateClientMessage({ type: "set_mode", mode: "xx" })!, /mode/);
  assert.match(validateClientMessage({ type: "teleport" })!, /unknown/);
  assert.match(validateClientMessage("nope")!, /object/);
});

test("encode refuses invalid messages", () => {
  assert.throws(() => encodeClientMessage({ type: "stick", p_x: 5, p_y: 0 } as never),
                /refusing to send/);
  const wire = encodeClientMessage({ type: "stick", p_x: 0.5, p_y: 0.25 });
  assert.deepEqual(JSON.parse(wire), { type: "stick", p_x: 0.5, p_y: 0.25 });
});

test("snapshot frames parse and non-snapshots pass through", () => {
  const snap = parseSnapshot(JSON.stringify(SNAPSHOT));
  assert.ok(snap);
  assert.equal(snap!.tick, 5);
  assert.equal(parseSnapshot('{"type": "ack", "for": "start"}'), null);
  assert.throws(() => parseSnapshot("garbage"), /not JSON/);
  const broken = { ...SNAPSHOT, robot: { x: 1 } };
  assert.throws(() => parseSnapshot(JSON.stringify(broken)), /robot/);
});
