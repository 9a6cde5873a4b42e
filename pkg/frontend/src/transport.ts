/** Transports carrying one JSON object per line/frame.
 *
 * The browser build talks WebSocket to `certlog serve --http`; tests and
 * node tooling connect straight to the TCP server. Both deliver whole JSON
 * texts in order; framing is handled here so the client above sees only
 * objects.
 */

import type { Request, Response } from "./protocol.js";

export interface Transport {
  send(req: Request): void;
  onMessage(handler: (resp: Response) => void): void;
  onClose(handler: (reason: string) => void): void;
  close(): void;
}

export class WsTransport implements Transport {
  private ws: WebSocket;
  private messageHandler: ((resp: Response) => void) | null = null;
  private closeHandler: ((reason: string) => void) | null = null;

  private constructor(ws: WebSocket) {
    this.ws = ws;
    ws.onmessage = (ev) => {
      if (this.messageHandler) this.messageHandler(JSON.parse(String(ev.data)));
    };
    ws.onclose = (ev) => {
      if (this.closeHandler) this.closeHandler(ev.reason || "connection closed");
    };
  }

  static connect(url: string): Promise<WsTransport> {
    return new Promise((resolve, reject) => {
      const ws = new WebSocket(url);
      ws.onopen = () => resolve(new WsTransport(ws));
      ws.onerror = () => reject(new Error(`cannot reach ${url}`));
    });
  }

  send(req: Request): void {
    this.ws.send(JSON.stringify(req));
  }

  onMessage(handler: (resp: Response) => void): void {
    this.messageHandler = handler;
  }

  onClose(handler: (reason: string) => void): void {
    this.closeHandler = handler;
  }

  close(): void {
    this.ws.close();
  }
}

/** Newline-delimited JSON over TCP; node only (tests, scripts). */
export class TcpTransport implements Transport {
  private socket: import("node:net").Socket;
  private buffer = "";
  private messageHandler: ((resp: Response) => void) | null = null;
  private closeHandler: ((reason: string) => void) | null = null;

  private constructor(socket: import("node:net").Socket) {
    this.socket = socket;
    socket.setEncoding("utf-8");
    socket.on("data", (chunk: string) => {
      this.buffer += chunk;
      let idx;
      while ((idx = this.buffer.indexOf("\n")) >= 0) {
        const line = this.buffer.slice(0, idx).trim();
        this.buffer = this.buffer.slice(idx + 1);
        if (line && this.messageHandler) this.messageHandler(JSON.parse(line));
      }
    });
    socket.on("close", () => {
      if (this.closeHandler) this.closeHandler("connection closed");
    });
  }

  static async connect(host: string, port: number): Promise<TcpTransport> {
    const net = await import("node:net");
    return new Promise((resolve, reject) => {
      const socket = net.createConnection({ host, port }, () =>
        resolve(new TcpTransport(socket)),
      );
      socket.on("error", reject);
    });
  }

  send(req: Request): void {
    this.socket.write(JSON.stringify(req) + "\n");
  }

  onMessage(handler: (resp: Response) => void): void {
    this.messageHandler = handler;
  }

  onClose(handler: (reason: string) => void): void {
    this.closeHandler = handler;
  }

  close(): void {
    this.socket.end();
  }
}
