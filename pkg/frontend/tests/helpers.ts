// Shared fixtures for the client tests: a small document with one edge of
// every kind, and a clock that only moves when told to.

import { DocumentMirror } from '../src/mirror.js';
import {
  GraphDocument,
  PaperNode,
  TypedEdge,
  Vec3,
} from '../src/protocol.js';

export function paper(id: string, extra: Partial<PaperNode> = {}): PaperNode {
  return {
    id,
    title: 'paper ' + id,
    authors: [{ name: 'Author ' + id, author_id: 'au-' + id }],
    external_ids: {},
    is_seed: false,
    ...extra,
  };
}

export function fourEdgeDocument(): GraphDocument {
  const nodes = [
    paper('a', { is_seed: true }),
    paper('b'),
    paper('c'),
    paper('d'),
    paper('e'),
  ];
  const edges: TypedEdge[] = [
    { source: 'a', target: 'b', kind: 'thematic', weight: 0.8,
      provenance: 'provider_recommendation' },
    { source: 'c', target: 'a', kind: 'citation', weight: 1,
      provenance: 'citation_graph' },
    { source: 'a', target: 'd', kind: 'authorship', weight: 1,
      provenance: 'author_graph' },
    { source: 'd', target: 'e', kind: 'custom', weight: 1,
      provenance: 'user_created' },
  ];
  const positions: Record<string, Vec3> = {
    a: [0, 0, 0],
    b: [30, 0, 0],
    c: [0, 30, 0],
    d: [0, 0, 30],
    e: [-30, 0, 0],
  };
  return {
    schema_version: 1,
    topic: 'fixture topic',
    created_at: 1,
    updated_at: 1,
    nodes,
    edges,
    annotations: [
      { id: 'ann-1', paper_id: 'a', text: 'seed note', created_at: 1 },
    ],
    clusters: [
      { cluster_id: 0, label: 'left theme', member_ids: ['a', 'b'],
        anchor: [40, 0, 0] },
      { cluster_id: 1, label: 'right theme', member_ids: ['c', 'd'],
        anchor: [-40, 0, 0] },
    ],
    layout: {
      alpha: 0.001,
      rng_seed: 7,
      positions,
      velocities: Object.fromEntries(
        Object.keys(positions).map((k) => [k, [0, 0, 0] as Vec3])),
      pins: {},
    },
  };
}

export function mirrorOf(doc: GraphDocument): DocumentMirror {
  const mirror = new DocumentMirror();
  mirror.apply({ type: 'graph', doc });
  return mirror;
}

export class TestClock {
  t = 0;

  now = (): number => this.t;

  advance(ms: number): void {
    this.t += ms;
  }
}
