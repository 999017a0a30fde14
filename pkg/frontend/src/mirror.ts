// Client-side mirror of the session document: the last graph frame plus
// every positions/clusters frame applied since. The renderer reads only
// from here, so after quiescence the mirror equals GET /graph.

import {
  ClusterAssignment,
  EventFrame,
  GraphDocument,
  PaperNode,
  StreamFrame,
  TypedEdge,
  Vec3,
} from './protocol.js';

export class DocumentMirror {
  doc: GraphDocument | null = null;
  alpha = 0;
  eventLog: EventFrame[] = [];

  apply(frame: StreamFrame): void {
    switch (frame.type) {
      case 'graph':
        this.doc = frame.doc;
        this.alpha = frame.doc.layout.alpha;
        break;
      case 'positions':
        if (this.doc) {
          for (const [id, pos] of Object.entries(frame.positions)) {
            this.doc.layout.positions[id] = pos;
          }
          this.doc.layout.alpha = frame.alpha;
        }
        this.alpha = frame.alpha;
        break;
      case 'clusters':
        if (this.doc) {
          this.doc.clusters = frame.clusters;
        }
        break;
      case 'event':
        this.eventLog.push(frame);
        break;
    }
  }

  nodes(): PaperNode[] {
    return this.doc ? this.doc.nodes : [];
  }

  edges(): TypedEdge[] {
    return this.doc ? this.doc.edges : [];
  }

  clusters(): ClusterAssignment[] {
    return this.doc ? this.doc.clusters : [];
  }

  node(id: string): PaperNode | undefined {
    return this.doc?.nodes.find((n) => n.id === id);
  }

  positionOf(id: string): Vec3 | undefined {
    return this.doc?.layout.positions[id];
  }

  annotationsOf(id: string) {
    return this.doc ? this.doc.annotations.filter((a) => a.paper_id === id)
                    : [];
  }

  // Structural equality with a server document, ignoring transient alpha.
  matchesServer(server: GraphDocument): boolean {
    if (!this.doc) return false;
    const ids = (doc: GraphDocument) => doc.nodes.map((n) => n.id).sort();
    const edgeKeys = (doc: GraphDocument) =>
      doc.edges.map((e) => [e.source, e.target, e.kind].join('|')).sort();
    return (
      JSON.stringify(ids(this.doc)) === JSON.stringify(ids(server)) &&
      JSON.stringify(edgeKeys(this.doc)) === JSON.stringify(edgeKeys(server)) &&
      JSON.stringify(this.doc.layout.positions) ===
        JSON.stringify(server.layout.positions)
    );
  }
}
