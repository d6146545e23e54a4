/** WebSocket client: validated sends, snapshot dispatch, path reassembly. */

import { ClientMessage, ScenarioMsg, Snapshot, encodeClientMessage,
         parseSnapshot } from "./protocol.js";

export interface NetEvents {
  onSnapshot(snapshot: Snapshot): void;
  onScenario(scenario: ScenarioMsg): void;
  onPath(path: [number, number][]): void;
  onStatus(state: "connecting" | "open" | "closed"): void;
  onError(message: string): void;
}

export class Connection {
  private socket: WebSocket | null = null;

  constructor(private events: NetEvents) {}

  connect(url: string): void {
    this.events.onStatus("connecting");
    const socket = new WebSocket(url);
    this.socket = socket;
    socket.onopen = () => this.events.onStatus("open");
    socket.onclose = () => this.events.onStatus("closed");
    socket.onmessage = (event: MessageEvent) => this.handleFrame(String(event.data));
  }

  private handleFrame(raw: string): void {
    let snapshot: Snapshot | null;
    try {
      snapshot = parseSnapshot(raw);
    } catch (err) {
      this.events.onError(`bad server frame: ${(err as Error).message}`);
      return;
    }
    if (snapshot === null) {
      const frame = JSON.parse(raw) as { type?: string; message?: string };
      if (frame.type === "error") {
        this.events.onError(frame.message ?? "server rejected a message");
      }
      return;
    }
    if (snapshot.scenario) {
      this.events.onScenario(snapshot.scenario);
    }
    if (!snapshot.path_delta && snapshot.path) {
      this.events.onPath(snapshot.path);
    }
    this.events.onSnapshot(snapshot);
  }

  /** Validate and send; invalid messages are reported, never transmitted. */
  send(msg: ClientMessage): boolean {
    if (!this.socket || this.socket.readyState !== 1) {
      this.events.onError("not connected: input dropped");
      return false;
    }
    let encoded: string;
    try {
      encoded = encodeClientMessage(msg);
    } catch (err) {
      this.events.onError((err as Error).message);
      return false;
    }
    this.socket.send(encoded);
    return true;
  }

  close(): void {
    this.socket?.close();
  }
}
