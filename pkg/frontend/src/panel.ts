// Hover titles and the per-paper insights panel: metadata, TLDR and
// keyword requests, and the annotation list with a text entry.

import { DocumentMirror } from './mirror.js';
import {
  Command,
  annotateNode,
  requestKeywords,
  requestTldr,
} from './protocol.js';

export interface PanelContent {
  paperId: string;
  title: string;
  authors: string[];
  abstract: string;
  year?: number;
  venue?: string;
  citationCount?: number;
  tldr: string | null;
  keywords: string[];
  annotations: string[];
}

export class PanelState {
  hoverId: string | null = null;
  openId: string | null = null;
  private tldrs = new Map<string, string>();
  private keywords = new Map<string, string[]>();

  constructor(private mirror: DocumentMirror) {}

  hover(nodeId: string | null): string | null {
    this.hoverId = nodeId;
    return nodeId ? this.mirror.node(nodeId)?.title ?? null : null;
  }

  open(nodeId: string): PanelContent | null {
    const node = this.mirror.node(nodeId);
    if (!node) return null;
    this.openId = nodeId;
    return this.content();
  }

  close(): void {
    this.openId = null;
  }

  content(): PanelContent | null {
    if (!this.openId) return null;
    const node = this.mirror.node(this.openId);
    if (!node) return null;
    return {
      paperId: node.id,
      title: node.title,
      authors: node.authors.map((a) => a.name),
      abstract: node.abstract ?? '',
      year: node.year,
      venue: node.venue,
      citationCount: node.citation_count,
      tldr: this.tldrs.get(node.id) ?? null,
      keywords: this.keywords.get(node.id) ?? [],
      annotations: this.mirror.annotationsOf(node.id).map((a) => a.text),
    };
  }

  tldrCommand(): Command | null {
    return this.openId ? requestTldr(this.openId) : null;
  }

  keywordsCommand(k = 5): Command | null {
    return this.openId ? requestKeywords(this.openId, k) : null;
  }

  annotateCommand(text: string): Command | null {
    return this.openId && text.trim() ? annotateNode(this.openId, text) : null;
  }

  acceptInsights(paperId: string,
                 result: { tldr?: string; keywords?: string[] }): void {
    if (result.tldr !== undefined) this.tldrs.set(paperId, result.tldr);
    if (result.keywords !== undefined) {
      this.keywords.set(paperId, result.keywords);
    }
  }
}
