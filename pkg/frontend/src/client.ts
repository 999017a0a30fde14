// Service client: command posting over HTTP and the stream socket, with
// both transports injectable so the whole client runs under node tests.

import { DocumentMirror } from './mirror.js';
import { Command, Modality, StreamFrame } from './protocol.js';

export interface FetchLike {
  (url: string, init?: { method?: string; headers?: Record<string, string>;
                         body?: string }): Promise<{
    ok: boolean;
    status: number;
    json(): Promise<unknown>;
  }>;
}

export interface StreamSocket {
  onmessage: ((data: string) => void) | null;
  onclose: (() => void) | null;
  close(): void;
}

export type SocketFactory = (url: string) => StreamSocket;

export interface ClientConfig {
  serviceUrl: string; // e.g. http://127.0.0.1:8077
}

export class ServiceClient {
  sessionId: string | null = null;
  readonly mirror = new DocumentMirror();
  disconnected = false; // drives the reconnect banner
  onChange: (() => void) | null = null;

  private socket: StreamSocket | null = null;

  constructor(private config: ClientConfig,
              private fetchImpl: FetchLike,
              private socketFactory: SocketFactory) {}

  private http(path: string): string {
    return this.config.serviceUrl.replace(/\/$/, '') + path;
  }

  private ws(path: string): string {
    return this.http(path).replace(/^http/, 'ws');
  }

  async createSession(seedIds: string[], topic: string): Promise<string> {
    const response = await this.fetchImpl(this.http('/sessions'), {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify({ seed_ids: seedIds, topic }),
    });
    if (!response.ok) {
      throw new Error('session creation failed: HTTP ' + response.status);
    }
    const body = (await response.json()) as { session_id: string };
    this.sessionId = body.session_id;
    return body.session_id;
  }

  async attach(sessionId: string): Promise<void> {
    this.sessionId = sessionId;
    this.subscribe();
  }

  subscribe(): void {
    if (!this.sessionId) throw new Error('no session to subscribe to');
    this.socket = this.socketFactory(
      this.ws('/sessions/' + this.sessionId + '/stream'));
    this.disconnected = false;
    this.socket.onmessage = (data) => {
      this.mirror.apply(JSON.parse(data) as StreamFrame);
      this.onChange?.();
    };
    this.socket.onclose = () => {
      this.disconnected = true;
      this.onChange?.();
    };
  }

  async send(command: Command,
             modality: Modality): Promise<Record<string, unknown>> {
    if (!this.sessionId) throw new Error('no live session');
    const response = await this.fetchImpl(
      this.http('/sessions/' + this.sessionId + '/commands'), {
        method: 'POST',
        headers: { 'content-type': 'application/json' },
        body: JSON.stringify({ modality, command }),
      });
    const body = (await response.json()) as Record<string, unknown>;
    if (!response.ok) {
      throw new Error('command failed: ' + JSON.stringify(body));
    }
    return (body.result ?? {}) as Record<string, unknown>;
  }

  async fetchGraph(): Promise<unknown> {
    if (!this.sessionId) throw new Error('no live session');
    const response = await this.fetchImpl(
      this.http('/sessions/' + this.sessionId + '/graph'));
    return response.json();
  }

  closeStream(): void {
    this.socket?.close();
    this.socket = null;
  }
}
