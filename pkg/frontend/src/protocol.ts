// Wire types for the foraging service: document payloads, stream frames,
// and builders for every command the protocol accepts. Builders are the
// single place command payloads are assembled, contract-tested against
// schemas recorded from the service.

export type Vec3 = [number, number, number];

export type EdgeKind = 'thematic' | 'citation' | 'authorship' | 'custom';

// Fixed display colors, one per edge kind.
export const EDGE_COLORS: Record<EdgeKind, string> = {
  thematic: 'white',
  citation: 'magenta',
  authorship: 'yellow',
  custom: 'green',
};

export interface AuthorRef {
  name: string;
  author_id?: string;
}

export interface PaperNode {
  id: string;
  title: string;
  authors: AuthorRef[];
  abstract?: string;
  year?: number;
  venue?: string;
  citation_count?: number;
  external_ids: Record<string, string>;
  is_seed: boolean;
}

export interface TypedEdge {
  source: string;
  target: string;
  kind: EdgeKind;
  weight: number;
  provenance: string;
}

export interface Annotation {
  id: string;
  paper_id: string;
  text: string;
  created_at: number;
}

export interface ClusterAssignment {
  cluster_id: number;
  label: string;
  member_ids: string[];
  anchor: Vec3;
}

export interface LayoutPayload {
  alpha: number;
  rng_seed: number;
  positions: Record<string, Vec3>;
  velocities: Record<string, Vec3>;
  pins: Record<string, Vec3>;
}

export interface GraphDocument {
  schema_version: number;
  topic?: string;
  created_at: number;
  updated_at: number;
  nodes: PaperNode[];
  edges: TypedEdge[];
  annotations: Annotation[];
  clusters: ClusterAssignment[];
  layout: LayoutPayload;
}

// -- stream frames ----------------------------------------------------------

export interface GraphFrame {
  type: 'graph';
  doc: GraphDocument;
}

export interface PositionsFrame {
  type: 'positions';
  alpha: number;
  positions: Record<string, Vec3>;
}

export interface ClustersFrame {
  type: 'clusters';
  clusters: ClusterAssignment[];
}

export interface EventFrame {
  type: 'event';
  ts: number;
  session_id: string;
  modality: string;
  feature: string;
  action: string;
  payload: Record<string, unknown>;
}

export type StreamFrame =
  | GraphFrame
  | PositionsFrame
  | ClustersFrame
  | EventFrame;

export type Modality = 'menu' | 'pointer_gesture' | 'api';

export interface Command {
  type: string;
  [key: string]: unknown;
}

// -- command builders ---------------------------------------------------------

export function expandThematic(seeds: string[], k: number): Command {
  return { type: 'expand', mode: 'thematic', seeds, k };
}

export function expandCitations(id: string, k: number): Command {
  return { type: 'expand', mode: 'citations', id, k };
}

export function expandReferences(id: string, k: number): Command {
  return { type: 'expand', mode: 'references', id, k };
}

export function expandAuthor(id: string, authorId: string,
                             k: number): Command {
  return { type: 'expand', mode: 'author', id, author_id: authorId, k };
}

export function clusterPapers(k?: number): Command {
  return k === undefined ? { type: 'cluster' } : { type: 'cluster', k };
}

export function pinNode(id: string, pos: Vec3): Command {
  return { type: 'pin', id, pos: [...pos] };
}

export function unpinNode(id: string): Command {
  return { type: 'unpin', id };
}

export function moveNode(id: string, pos: Vec3): Command {
  return { type: 'move', id, pos: [...pos] };
}

export function linkNodes(a: string, b: string): Command {
  return { type: 'link', a, b };
}

export function annotateNode(id: string, text: string): Command {
  return { type: 'annotate', id, text };
}

export function requestTldr(id: string): Command {
  return { type: 'insights', id, kind: 'tldr' };
}

export function requestKeywords(id: string, k: number): Command {
  return { type: 'insights', id, kind: 'keywords', k };
}

export function removeNode(id: string): Command {
  return { type: 'remove', id };
}

// Spoken aliases map one-to-one onto builders so a speech frontend can
// route recognized phrases without bespoke payload code.
export const VOICE_ALIASES: Record<string, (selection: string[]) => Command | null> = {
  'Summarize paper': (sel) => (sel.length ? requestTldr(sel[0]) : null),
  'Recommend papers by thematic similarities':
    (sel) => (sel.length ? expandThematic(sel, 5) : null),
  'Recommend papers by citations':
    (sel) => (sel.length ? expandCitations(sel[0], 5) : null),
  'Recommend papers by references':
    (sel) => (sel.length ? expandReferences(sel[0], 5) : null),
  'Cluster papers': () => clusterPapers(),
};
