// Perspective camera: orbit pose, world->screen projection, and the
// inverse mapping used for dragging nodes on a camera-parallel plane.

import { Vec3 } from './protocol.js';

export interface Projected {
  x: number;
  y: number;
  depth: number; // distance along the view axis; <= 0 means behind camera
}

const DEG = Math.PI / 180;

function sub(a: Vec3, b: Vec3): Vec3 {
  return [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
}

function cross(a: Vec3, b: Vec3): Vec3 {
  return [
    a[1] * b[2] - a[2] * b[1],
    a[2] * b[0] - a[0] * b[2],
    a[0] * b[1] - a[1] * b[0],
  ];
}

function dot(a: Vec3, b: Vec3): number {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

function norm(a: Vec3): Vec3 {
  const len = Math.hypot(a[0], a[1], a[2]) || 1;
  return [a[0] / len, a[1] / len, a[2] / len];
}

export class Camera {
  target: Vec3 = [0, 0, 0];
  distance = 260;
  yaw = 0.6;
  pitch = 0.35;
  fovDegrees = 55;
  width = 960;
  height = 640;

  position(): Vec3 {
    const cp = Math.cos(this.pitch);
    return [
      this.target[0] + this.distance * cp * Math.sin(this.yaw),
      this.target[1] + this.distance * Math.sin(this.pitch),
      this.target[2] + this.distance * cp * Math.cos(this.yaw),
    ];
  }

  basis(): { forward: Vec3; right: Vec3; up: Vec3 } {
    const forward = norm(sub(this.target, this.position()));
    const right = norm(cross(forward, [0, 1, 0]));
    const up = cross(right, forward);
    return { forward, right, up };
  }

  project(world: Vec3): Projected {
    const { forward, right, up } = this.basis();
    const rel = sub(world, this.position());
    const depth = dot(rel, forward);
    const focal = this.height / 2 / Math.tan((this.fovDegrees / 2) * DEG);
    if (depth <= 1e-6) {
      return { x: Number.NaN, y: Number.NaN, depth };
    }
    return {
      x: this.width / 2 + (dot(rel, right) / depth) * focal,
      y: this.height / 2 - (dot(rel, up) / depth) * focal,
      depth,
    };
  }

  // Screen-pixel delta -> world delta on the plane through `depth`,
  // parallel to the camera; this is what node dragging rides on.
  screenDeltaToWorld(dx: number, dy: number, depth: number): Vec3 {
    const { right, up } = this.basis();
    const focal = this.height / 2 / Math.tan((this.fovDegrees / 2) * DEG);
    const scale = depth / focal;
    return [
      (right[0] * dx - up[0] * dy) * scale,
      (right[1] * dx - up[1] * dy) * scale,
      (right[2] * dx - up[2] * dy) * scale,
    ];
  }

  orbit(dx: number, dy: number): void {
    this.yaw -= dx * 0.008;
    this.pitch = Math.min(1.45, Math.max(-1.45, this.pitch + dy * 0.008));
  }

  zoom(delta: number): void {
    this.distance = Math.min(2000, Math.max(30, this.distance * (1 + delta)));
  }
}
