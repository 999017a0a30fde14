// Pointer-drag interaction: dragging a node moves it on a camera-parallel
// plane with move commands throttled to 10/s, release pins it where it
// sits — unless it lands within the capture radius of another node, which
// becomes a custom link instead. A zero-length drag is a selection.

import { Camera } from './camera.js';
import { DocumentMirror } from './mirror.js';
import {
  Command,
  Vec3,
  linkNodes,
  moveNode,
  pinNode,
} from './protocol.js';
import { NODE_RADIUS } from './scene.js';

export const MOVE_THROTTLE_MS = 100; // 10 move commands per second
export const LINK_CAPTURE_RADIUS = 1.5 * NODE_RADIUS;
export const CLICK_SLOP_PX = 3;

export type CommandSink = (command: Command, modality: 'pointer_gesture') => void;

export interface DragOutcome {
  kind: 'selected' | 'pinned' | 'linked' | 'cancelled';
  nodeId: string;
  other?: string;
  position?: Vec3;
}

export class DragController {
  private nodeId: string | null = null;
  private depth = 0;
  private world: Vec3 = [0, 0, 0];
  private origin: Vec3 = [0, 0, 0]; // last server-confirmed position
  private startScreen: [number, number] = [0, 0];
  private lastScreen: [number, number] = [0, 0];
  private lastMoveSent = -Infinity;
  private moved = false;

  constructor(private camera: Camera,
              private mirror: DocumentMirror,
              private sink: CommandSink,
              private now: () => number = () => Date.now()) {}

  get active(): boolean {
    return this.nodeId !== null;
  }

  begin(nodeId: string, screenX: number, screenY: number): void {
    const world = this.mirror.positionOf(nodeId);
    if (!world) return;
    this.nodeId = nodeId;
    this.world = [...world];
    this.origin = [...world];
    this.depth = this.camera.project(world).depth;
    this.startScreen = [screenX, screenY];
    this.lastScreen = [screenX, screenY];
    this.lastMoveSent = -Infinity;
    this.moved = false;
  }

  move(screenX: number, screenY: number): void {
    if (!this.nodeId) return;
    const dx = screenX - this.lastScreen[0];
    const dy = screenY - this.lastScreen[1];
    this.lastScreen = [screenX, screenY];
    const totalDx = screenX - this.startScreen[0];
    const totalDy = screenY - this.startScreen[1];
    if (Math.hypot(totalDx, totalDy) <= CLICK_SLOP_PX && !this.moved) {
      return; // still within click slop
    }
    this.moved = true;
    const delta = this.camera.screenDeltaToWorld(dx, dy, this.depth);
    this.world = [
      this.world[0] + delta[0],
      this.world[1] + delta[1],
      this.world[2] + delta[2],
    ];
    // optimistic local motion; reconciled by the next positions frame
    if (this.mirror.doc) {
      this.mirror.doc.layout.positions[this.nodeId] = [...this.world];
    }
    const t = this.now();
    if (t - this.lastMoveSent >= MOVE_THROTTLE_MS) {
      this.sink(moveNode(this.nodeId, this.world), 'pointer_gesture');
      this.lastMoveSent = t;
    }
  }

  // Depth adjustment (scroll wheel while dragging): move along the view axis.
  adjustDepth(worldDelta: number): void {
    if (!this.nodeId) return;
    const { forward } = this.camera.basis();
    this.world = [
      this.world[0] + forward[0] * worldDelta,
      this.world[1] + forward[1] * worldDelta,
      this.world[2] + forward[2] * worldDelta,
    ];
    this.moved = true;
  }

  release(): DragOutcome {
    const nodeId = this.nodeId;
    if (!nodeId) return { kind: 'cancelled', nodeId: '' };
    this.nodeId = null;

    if (!this.moved) {
      return { kind: 'selected', nodeId };
    }

    const other = this.captureTarget(nodeId);
    if (other) {
      this.sink(linkNodes(nodeId, other), 'pointer_gesture');
      return { kind: 'linked', nodeId, other };
    }
    this.sink(pinNode(nodeId, this.world), 'pointer_gesture');
    return { kind: 'pinned', nodeId, position: [...this.world] };
  }

  // Abort (command failure or disconnect): the node snaps back to the
  // last server-confirmed position.
  cancel(): DragOutcome {
    const nodeId = this.nodeId ?? '';
    if (nodeId && this.mirror.doc) {
      this.mirror.doc.layout.positions[nodeId] = [...this.origin];
    }
    this.nodeId = null;
    return { kind: 'cancelled', nodeId };
  }

  private captureTarget(nodeId: string): string | null {
    let best: string | null = null;
    let bestDist = LINK_CAPTURE_RADIUS;
    for (const node of this.mirror.nodes()) {
      if (node.id === nodeId) continue;
      const pos = this.mirror.positionOf(node.id);
      if (!pos) continue;
      const dist = Math.hypot(pos[0] - this.world[0],
                              pos[1] - this.world[1],
                              pos[2] - this.world[2]);
      if (dist <= bestDist) {
        best = node.id;
        bestDist = dist;
      }
    }
    return best;
  }
}
