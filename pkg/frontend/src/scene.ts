// Renderer-agnostic scene description. The canvas adapter (or any other
// backend) draws exactly what this module emits, so edge coloring, seed
// styling and cluster labels are testable without a display.

import { Camera } from './camera.js';
import { DocumentMirror } from './mirror.js';
import { EDGE_COLORS, Vec3 } from './protocol.js';

export const NODE_RADIUS = 3; // world units
export const SEED_RADIUS = 4.5;

export interface SphereSprite {
  id: string;
  world: Vec3;
  x: number;
  y: number;
  radius: number; // screen pixels
  color: string;
  outline: string | null; // seeds get an outline ring
  depth: number;
  isSeed: boolean;
}

export interface LineSprite {
  source: string;
  target: string;
  x1: number;
  y1: number;
  x2: number;
  y2: number;
  color: string;
  depth: number;
}

export interface LabelSprite {
  text: string;
  x: number;
  y: number;
  depth: number;
}

export interface SceneDescription {
  spheres: SphereSprite[];
  lines: LineSprite[];
  labels: LabelSprite[];
  topic: string;
}

const CLUSTER_PALETTE = [
  '#e6194b', '#3cb44b', '#ffe119', '#4363d8',
  '#f58231', '#911eb4', '#46f0f0', '#f032e6',
];
const UNCLUSTERED = '#8c8c8c';

export function buildScene(mirror: DocumentMirror,
                           camera: Camera): SceneDescription {
  const scene: SceneDescription = {
    spheres: [], lines: [], labels: [],
    topic: mirror.doc?.topic ?? '',
  };
  if (!mirror.doc) return scene;

  const clusterColor = new Map<string, string>();
  for (const cluster of mirror.clusters()) {
    const color = CLUSTER_PALETTE[cluster.cluster_id % CLUSTER_PALETTE.length];
    for (const member of cluster.member_ids) clusterColor.set(member, color);
  }

  const focal = camera.height / 2 /
    Math.tan((camera.fovDegrees / 2) * Math.PI / 180);

  for (const node of mirror.nodes()) {
    const world = mirror.positionOf(node.id);
    if (!world) continue;
    const p = camera.project(world);
    if (!(p.depth > 0)) continue;
    const worldRadius = node.is_seed ? SEED_RADIUS : NODE_RADIUS;
    scene.spheres.push({
      id: node.id,
      world,
      x: p.x,
      y: p.y,
      radius: (worldRadius / p.depth) * focal,
      color: clusterColor.get(node.id) ?? UNCLUSTERED,
      outline: node.is_seed ? '#ffffff' : null,
      depth: p.depth,
      isSeed: node.is_seed,
    });
  }

  const byId = new Map(scene.spheres.map((s) => [s.id, s]));
  for (const edge of mirror.edges()) {
    const a = byId.get(edge.source);
    const b = byId.get(edge.target);
    if (!a || !b) continue;
    scene.lines.push({
      source: edge.source,
      target: edge.target,
      x1: a.x, y1: a.y, x2: b.x, y2: b.y,
      color: EDGE_COLORS[edge.kind],
      depth: (a.depth + b.depth) / 2,
    });
  }

  for (const cluster of mirror.clusters()) {
    const p = camera.project(cluster.anchor);
    if (!(p.depth > 0)) continue;
    scene.labels.push({ text: cluster.label, x: p.x, y: p.y, depth: p.depth });
  }

  // painter's order: far things first
  scene.spheres.sort((a, b) => b.depth - a.depth);
  scene.lines.sort((a, b) => b.depth - a.depth);
  return scene;
}

// Topmost sphere whose screen footprint covers the pointer, if any.
export function pickNode(scene: SceneDescription, x: number,
                         y: number): SphereSprite | null {
  let best: SphereSprite | null = null;
  for (const sphere of scene.spheres) {
    const hit = Math.hypot(sphere.x - x, sphere.y - y) <= sphere.radius;
    if (hit && (!best || sphere.depth < best.depth)) best = sphere;
  }
  return best;
}
