// Docked menu: the WIMP fallback for every feature. Buttons build their
// command payloads through the protocol builders only, and disable
// themselves when their selection requirements are not met.

import { DocumentMirror } from './mirror.js';
import {
  Command,
  clusterPapers,
  expandAuthor,
  expandCitations,
  expandReferences,
  expandThematic,
} from './protocol.js';

export type MenuButtonId =
  | 'recommend_thematic'
  | 'recommend_citations'
  | 'recommend_references'
  | 'recommend_author'
  | 'cluster';

export const MENU_LABELS: Record<MenuButtonId, string> = {
  recommend_thematic: 'Recommend by Thematic Similarities',
  recommend_citations: 'Recommend by Citations',
  recommend_references: 'Recommend by References',
  recommend_author: 'Recommend by Author',
  cluster: 'Cluster Papers',
};

export class MenuModel {
  selection: string[] = [];
  k = 5;
  clusterK: number | undefined = undefined;

  constructor(private mirror: DocumentMirror) {}

  setSelection(ids: string[]): void {
    this.selection = [...ids];
  }

  private selectedAuthorId(): string | null {
    if (this.selection.length !== 1) return null;
    const node = this.mirror.node(this.selection[0]);
    const withId = node?.authors.find((a) => a.author_id);
    return withId?.author_id ?? null;
  }

  enabled(button: MenuButtonId): boolean {
    switch (button) {
      case 'recommend_thematic':
        return this.selection.length >= 1;
      case 'recommend_citations':
      case 'recommend_references':
        return this.selection.length === 1;
      case 'recommend_author':
        return this.selectedAuthorId() !== null;
      case 'cluster':
        return this.mirror.nodes().length > 0;
    }
  }

  // null when the button is disabled; otherwise the exact protocol payload.
  command(button: MenuButtonId): Command | null {
    if (!this.enabled(button)) return null;
    switch (button) {
      case 'recommend_thematic':
        return expandThematic(this.selection, this.k);
      case 'recommend_citations':
        return expandCitations(this.selection[0], this.k);
      case 'recommend_references':
        return expandReferences(this.selection[0], this.k);
      case 'recommend_author':
        return expandAuthor(this.selection[0], this.selectedAuthorId()!,
                            this.k);
      case 'cluster':
        return clusterPapers(this.clusterK);
    }
  }
}
