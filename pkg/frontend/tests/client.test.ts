import { test } from 'node:test';
import assert from 'node:assert/strict';

import { ServiceClient, StreamSocket } from '../src/client.js';
import { pinNode } from '../src/protocol.js';
import { fourEdgeDocument } from './helpers.js';

class FakeSocket implements StreamSocket {
  onmessage: ((data: string) => void) | null = null;
  onclose: (() => void) | null = null;
  closed = false;

  close(): void {
    this.closed = true;
  }

  push(frame: unknown): void {
    this.onmessage?.(JSON.stringify(frame));
  }
}

function makeClient() {
  const requests: { url: string; body?: string }[] = [];
  const sockets: FakeSocket[] = [];
  const responses: unknown[] = [];
  const client = new ServiceClient(
    { serviceUrl: 'http://svc.test' },
    async (url, init) => {
      requests.push({ url, body: init?.body });
      const payload = responses.shift() ?? { ok: true, result: {} };
      return { ok: true, status: 200, json: async () => payload };
    },
    (url) => {
      const socket = new FakeSocket();
      sockets.push(socket);
      requests.push({ url });
      return socket;
    });
  return { client, requests, sockets, responses };
}

test('createSession posts seeds and remembers the session id', async () => {
  const { client, requests, responses } = makeClient();
  responses.push({ session_id: 'abc123' });
  const sid = await client.createSession(['a', 'b'], 'topic');
  assert.equal(sid, 'abc123');
  assert.equal(requests[0].url, 'http://svc.test/sessions');
  assert.deepEqual(JSON.parse(requests[0].body!),
                   { seed_ids: ['a', 'b'], topic: 'topic' });
});

test('subscribe opens the stream and applies frames to the mirror',
     async () => {
  const { client, sockets, responses } = makeClient();
  responses.push({ session_id: 's1' });
  await client.createSession(['a'], 't');
  client.subscribe();
  assert.equal(sockets.length, 1);
  sockets[0].push({ type: 'graph', doc: fourEdgeDocument() });
  assert.equal(client.mirror.nodes().length, 5);
});

test('socket close raises the reconnect banner flag', async () => {
  const { client, sockets, responses } = makeClient();
  responses.push({ session_id: 's1' });
  await client.createSession(['a'], 't');
  let changes = 0;
  client.onChange = () => { changes += 1; };
  client.subscribe();
  assert.equal(client.disconnected, false);
  sockets[0].onclose?.();
  assert.equal(client.disconnected, true);
  assert.ok(changes >= 1);
});

test('send posts modality plus command and unwraps the result', async () => {
  const { client, requests, responses } = makeClient();
  responses.push({ session_id: 's1' });
  await client.createSession(['a'], 't');
  responses.push({ ok: true, result: { pinned: 'a' } });
  const result = await client.send(pinNode('a', [1, 2, 3]), 'pointer_gesture');
  assert.deepEqual(result, { pinned: 'a' });
  const last = requests[requests.length - 1];
  assert.equal(last.url, 'http://svc.test/sessions/s1/commands');
  assert.deepEqual(JSON.parse(last.body!), {
    modality: 'pointer_gesture',
    command: { type: 'pin', id: 'a', pos: [1, 2, 3] },
  });
});
