// WebSocket connection with outbound seq numbering and frame callbacks.
// Server address comes from ?server=host:port, defaulting to the page host.

import { decodeFrame, encodeFrame, type Frame, type MessageCode } from "./protocol.js";

export function serverUrl(locationLike: { search: string; host: string; protocol: string }): string {
  const params = new URLSearchParams(locationLike.search);
  const override = params.get("server");
  if (override) {
    return override.includes("://") ? override : `ws://${override}/ws`;
  }
  const scheme = locationLike.protocol === "https:" ? "wss" : "ws";
  return `${scheme}://${locationLike.host}/ws`;
}

export class Connection {
  private socket: WebSocket | null = null;
  private seq = 0;
  onFrame: ((frame: Frame) => void) | null = null;
  onClose: (() => void) | null = null;

  constructor(readonly url: string) {}

  connect(): void {
    this.socket = new WebSocket(this.url);
    this.socket.addEventListener("message", (event) => {
      try {
        const frame = decodeFrame(String(event.data));
        this.onFrame?.(frame);
      } catch (err) {
        console.warn("dropping undecodable frame", err);
      }
    });
    this.socket.addEventListener("close", () => {
      this.onClose?.();
    });
  }

  ready(): boolean {
    return this.socket !== null && this.socket.readyState === WebSocket.OPEN;
  }

  onOpen(handler: () => void): void {
    this.socket?.addEventListener("open", handler);
  }

  send(code: MessageCode, payload: Record<string, unknown>): void {
    if (!this.socket || this.socket.readyState !== WebSocket.OPEN) {
      console.warn(`cannot send ${code}: socket not open`);
      return;
    }
    this.seq += 1;
    this.socket.send(encodeFrame(code, payload, this.seq));
  }

  close(): void {
    this.socket?.close();
  }
}
