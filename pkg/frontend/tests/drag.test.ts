// Acceptance criterion: an automated pointer drag produces throttled move
// commands then a pin, and the next positions frame fixes the node at the
// release point. Dropping onto another node links instead.

import { test } from 'node:test';
import assert from 'node:assert/strict';

import { Camera } from '../src/camera.js';
import { DragController, LINK_CAPTURE_RADIUS } from '../src/drag.js';
import { Command, Vec3 } from '../src/protocol.js';
import { buildScene } from '../src/scene.js';
import { TestClock, fourEdgeDocument, mirrorOf } from './helpers.js';

function setup() {
  const mirror = mirrorOf(fourEdgeDocument());
  const camera = new Camera();
  camera.width = 800;
  camera.height = 600;
  const clock = new TestClock();
  const sent: Command[] = [];
  const drag = new DragController(
    camera, mirror,
    (command, modality) => {
      assert.equal(modality, 'pointer_gesture');
      sent.push(command);
    },
    clock.now);
  return { mirror, camera, clock, sent, drag };
}

function screenOf(camera: Camera, mirror: ReturnType<typeof mirrorOf>,
                  id: string): [number, number] {
  const sphere = buildScene(mirror, camera).spheres.find((s) => s.id === id)!;
  return [sphere.x, sphere.y];
}

test('drag emits throttled moves then a pin at the release point', () => {
  const { mirror, camera, clock, sent, drag } = setup();
  const [sx, sy] = screenOf(camera, mirror, 'b');

  drag.begin('b', sx, sy);
  for (let step = 1; step <= 20; step += 1) {
    clock.advance(25); // 40/s pointer events, must throttle to 10/s
    drag.move(sx + step * 6, sy);
  }
  const outcome = drag.release();

  const moves = sent.filter((c) => c.type === 'move');
  const pins = sent.filter((c) => c.type === 'pin');
  assert.ok(moves.length >= 2, 'drag streams move commands');
  assert.ok(moves.length <= 6, 'moves throttled to 10/s over 0.5s');
  assert.equal(pins.length, 1, 'exactly one pin at release');
  assert.equal(sent[sent.length - 1].type, 'pin');

  assert.equal(outcome.kind, 'pinned');
  const pinned = pins[0] as unknown as { id: string; pos: Vec3 };
  assert.equal(pinned.id, 'b');
  assert.deepEqual(pinned.pos, outcome.position);

  // server echoes a positions frame; the mirror must fix the node there
  mirror.apply({ type: 'positions', alpha: 0.3,
                 positions: { b: pinned.pos } });
  assert.deepEqual(mirror.positionOf('b'), pinned.pos);
});

test('zero-length drag is a selection, no move or pin', () => {
  const { mirror, camera, sent, drag } = setup();
  const [sx, sy] = screenOf(camera, mirror, 'c');
  drag.begin('c', sx, sy);
  drag.move(sx + 1, sy + 1); // within click slop
  const outcome = drag.release();
  assert.equal(outcome.kind, 'selected');
  assert.equal(outcome.nodeId, 'c');
  assert.deepEqual(sent, []);
});

test('release within the capture radius of another node links them', () => {
  const { mirror, camera, clock, sent, drag } = setup();
  // park e almost on top of b, then nudge b onto it
  mirror.doc!.layout.positions.e = [
    30 + LINK_CAPTURE_RADIUS * 0.5, 0, 0];
  const [sx, sy] = screenOf(camera, mirror, 'b');
  drag.begin('b', sx, sy);
  clock.advance(200);
  drag.move(sx + 5, sy); // any real movement, stays near e
  const outcome = drag.release();

  assert.equal(outcome.kind, 'linked');
  assert.equal(outcome.other, 'e');
  const last = sent[sent.length - 1];
  assert.equal(last.type, 'link');
  assert.deepEqual([last.a, last.b], ['b', 'e']);
  assert.ok(!sent.some((c) => c.type === 'pin'), 'link replaces the pin');
});

test('release just outside the capture radius pins instead of linking',
     () => {
  const { mirror, camera, clock, sent, drag } = setup();
  mirror.doc!.layout.positions.e = [60, 0, 0]; // far from everything
  const [sx, sy] = screenOf(camera, mirror, 'e');
  drag.begin('e', sx, sy);
  clock.advance(200);
  drag.move(sx + 4, sy + 4);
  const outcome = drag.release();
  assert.equal(outcome.kind, 'pinned');
  assert.equal(sent[sent.length - 1].type, 'pin');
});

test('optimistic local motion follows the pointer during the drag', () => {
  const { mirror, camera, clock, drag } = setup();
  const before = [...mirror.positionOf('d')!];
  const [sx, sy] = screenOf(camera, mirror, 'd');
  drag.begin('d', sx, sy);
  clock.advance(200);
  drag.move(sx + 40, sy);
  const during = mirror.positionOf('d')!;
  assert.notDeepEqual(during, before);
  drag.release();
});

test('cancel snaps the node back to the last server position', () => {
  const { mirror, camera, clock, drag } = setup();
  const before = [...mirror.positionOf('d')!];
  const [sx, sy] = screenOf(camera, mirror, 'd');
  drag.begin('d', sx, sy);
  clock.advance(200);
  drag.move(sx + 40, sy + 25);
  assert.notDeepEqual(mirror.positionOf('d'), before);
  const outcome = drag.cancel();
  assert.equal(outcome.kind, 'cancelled');
  assert.deepEqual(mirror.positionOf('d'), before);
  assert.equal(drag.active, false);
});
