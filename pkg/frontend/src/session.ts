// UI session state: the loaded document view, selections, the playhead, and
// the revision every pending edit was read at. The UI holds no authoritative
// state; every mutation round-trips a revision and a 409 triggers a reload.

import { ApiClient, ApiError } from "./api.js";
import type { DocumentView } from "./types.js";

export class UiSession {
  view: DocumentView | null = null;
  selectedObject: number | null = null;
  selectedSentence: number | null = null;
  playhead = 0;

  constructor(
    readonly api: ApiClient,
    readonly corpus: string,
    readonly docId: string,
  ) {}

  async reload(): Promise<DocumentView> {
    this.view = await this.api.doc(this.corpus, this.docId);
    return this.view;
  }

  revisionOf(kind: string, id: number): number {
    const rev = this.view?.revisions[`${kind}/${id}`];
    if (rev === undefined) throw new Error(`no revision for ${kind}/${id}`);
    return rev;
  }

  // Runs a mutation; on a stale-revision conflict the document is reloaded
  // and the conflict reported (never silently overwritten).
  async mutate<T>(op: () => Promise<T>, onConflict: (message: string) => void): Promise<T | null> {
    try {
      const result = await op();
      await this.reload();
      return result;
    } catch (err) {
      if (err instanceof ApiError && err.code === "revision_conflict") {
        await this.reload();
        onConflict(err.message);
        return null;
      }
      throw err;
    }
  }

  stepFrames(delta: number): number {
    const limit = this.view?.frame_count;
    this.playhead = Math.max(0, this.playhead + delta);
    if (limit != null && this.playhead >= limit) this.playhead = limit - 1;
    return this.playhead;
  }
}

export function conflictBanner(doc: Document, message: string): HTMLElement {
  const banner = doc.createElement("div");
  banner.className = "conflict-banner";
  banner.textContent = `Edit conflict: ${message} — the document was reloaded, please retry.`;
  return banner;
}
