// Thin typed client over the backend HTTP API. All mutations carry the
// record revision they were read at; the server answers 409 with code
// "revision_conflict" when the revision is stale, which surfaces here as an
// ApiError the views turn into a conflict banner.

import type {
  BoxAtFrame,
  DetectionInfo,
  DocumentView,
  DraftInfo,
  FeInfo,
  FrameInfo,
  LuInfo,
} from "./types.js";

export interface MinimalResponse {
  status: number;
  text(): Promise<string>;
  json(): Promise<unknown>;
}

export type FetchLike = (
  url: string,
  init?: { method?: string; headers?: Record<string, string>; body?: string | Uint8Array },
) => Promise<MinimalResponse>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
    readonly field?: string,
  ) {
    super(message);
  }
}

export class ApiClient {
  private fetchFn: FetchLike;

  constructor(
    readonly base: string,
    fetchFn?: FetchLike,
    readonly token?: string,
  ) {
    this.fetchFn = fetchFn ?? (globalThis.fetch as unknown as FetchLike);
  }

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
    raw?: Uint8Array,
  ): Promise<T> {
    const headers: Record<string, string> = {};
    if (this.token) headers["Authorization"] = `Bearer ${this.token}`;
    let payload: string | Uint8Array | undefined;
    if (raw !== undefined) {
      headers["Content-Type"] = "application/octet-stream";
      payload = raw;
    } else if (body !== undefined) {
      headers["Content-Type"] = "application/json";
      payload = JSON.stringify(body);
    }
    const resp = await this.fetchFn(`${this.base}${path}`, { method, headers, body: payload });
    const text = await resp.text();
    if (resp.status >= 400) {
      let code = "error";
      let message = text;
      let field: string | undefined;
      try {
        const parsed = JSON.parse(text) as { code?: string; message?: string; field?: string };
        code = parsed.code ?? code;
        message = parsed.message ?? message;
        field = parsed.field;
      } catch {
        // non-JSON error body, keep raw text
      }
      throw new ApiError(resp.status, code, message, field);
    }
    return (text ? JSON.parse(text) : null) as T;
  }

  private async requestText(path: string): Promise<string> {
    const headers: Record<string, string> = {};
    if (this.token) headers["Authorization"] = `Bearer ${this.token}`;
    const resp = await this.fetchFn(`${this.base}${path}`, { method: "GET", headers });
    const text = await resp.text();
    if (resp.status >= 400) throw new ApiError(resp.status, "error", text);
    return text;
  }

  ready(): Promise<{ status: string }> {
    return this.request("GET", "/api/v1/ready");
  }

  frames(): Promise<FrameInfo[]> {
    return this.request("GET", "/api/v1/frames");
  }

  frameFes(name: string): Promise<FeInfo[]> {
    return this.request("GET", `/api/v1/frames/${encodeURIComponent(name)}/fes`);
  }

  lus(lemma: string, pos?: string): Promise<LuInfo[]> {
    const suffix = pos ? `&pos=${encodeURIComponent(pos)}` : "";
    return this.request("GET", `/api/v1/lus?lemma=${encodeURIComponent(lemma)}${suffix}`);
  }

  corpora(): Promise<string[]> {
    return this.request("GET", "/api/v1/corpora");
  }

  createCorpus(name: string): Promise<{ name: string }> {
    return this.request("POST", "/api/v1/corpora", { name });
  }

  docs(corpus: string): Promise<string[]> {
    return this.request("GET", `/api/v1/corpora/${corpus}/docs`);
  }

  doc(corpus: string, doc: string): Promise<DocumentView> {
    return this.request("GET", `/api/v1/corpora/${corpus}/docs/${doc}`);
  }

  importStatic(corpus: string, zipBytes: Uint8Array, name = "bundle"): Promise<{ documents: string[] }> {
    return this.request("POST", `/api/v1/corpora/${corpus}/import-static?name=${name}`, undefined, zipBytes);
  }

  importVideo(corpus: string, body: Record<string, unknown>): Promise<{ doc_id: string }> {
    return this.request("POST", `/api/v1/corpora/${corpus}/import-video`, body);
  }

  preannotate(corpus: string, doc: string): Promise<{ targets: number; ambiguous: number }> {
    return this.request("POST", `/api/v1/corpora/${corpus}/docs/${doc}/preannotate`);
  }

  drafts(corpus: string, doc: string): Promise<DraftInfo[]> {
    return this.request("GET", `/api/v1/corpora/${corpus}/docs/${doc}/drafts`);
  }

  editDraft(
    corpus: string,
    doc: string,
    draftId: number,
    body: Record<string, unknown>,
  ): Promise<{ drafts: { draft_id: number; revision: number }[]; sentence_id?: number }> {
    return this.request("PATCH", `/api/v1/corpora/${corpus}/docs/${doc}/drafts/${draftId}`, body);
  }

  detections(corpus: string, doc: string): Promise<DetectionInfo[]> {
    return this.request("GET", `/api/v1/corpora/${corpus}/docs/${doc}/detections`);
  }

  acceptDetection(corpus: string, doc: string, detId: number, revision: number): Promise<{ object_id: number; revision: number }> {
    return this.request("POST", `/api/v1/corpora/${corpus}/docs/${doc}/detections/${detId}/accept`, { revision });
  }

  deleteDetection(corpus: string, doc: string, detId: number, revision: number): Promise<unknown> {
    return this.request("DELETE", `/api/v1/corpora/${corpus}/docs/${doc}/detections/${detId}?revision=${revision}`);
  }

  createObject(
    corpus: string,
    doc: string,
    frameIndex: number,
    box: [number, number, number, number],
    origin = "human",
  ): Promise<{ object_id: number; revision: number }> {
    return this.request("POST", `/api/v1/corpora/${corpus}/docs/${doc}/objects`, {
      frame_index: frameIndex,
      box,
      origin,
    });
  }

  trackOp(
    corpus: string,
    doc: string,
    objectId: number,
    body: Record<string, unknown>,
  ): Promise<{ object_id: number; revision: number }> {
    return this.request("PATCH", `/api/v1/corpora/${corpus}/docs/${doc}/objects/${objectId}`, body);
  }

  deleteObject(corpus: string, doc: string, objectId: number, revision: number): Promise<unknown> {
    return this.request("DELETE", `/api/v1/corpora/${corpus}/docs/${doc}/objects/${objectId}?revision=${revision}`);
  }

  boxesAt(corpus: string, doc: string, frame: number): Promise<BoxAtFrame[]> {
    return this.request("GET", `/api/v1/corpora/${corpus}/docs/${doc}/boxes?frame=${frame}`);
  }

  createAnnotation(corpus: string, doc: string, body: Record<string, unknown>): Promise<{ as_id?: number; ia_id?: number; revision: number }> {
    return this.request("POST", `/api/v1/corpora/${corpus}/docs/${doc}/annotations`, body);
  }

  patchAnnotation(
    corpus: string,
    doc: string,
    asId: number,
    body: Record<string, unknown>,
  ): Promise<{ as_id: number; revision: number }> {
    return this.request("PATCH", `/api/v1/corpora/${corpus}/docs/${doc}/annotations/${asId}`, body);
  }

  addCorrelation(corpus: string, doc: string, body: Record<string, unknown>): Promise<{ corr_id: number; revision: number }> {
    return this.request("POST", `/api/v1/corpora/${corpus}/docs/${doc}/correlations`, body);
  }

  exportXml(corpus: string, doc: string): Promise<string> {
    return this.requestText(`/api/v1/corpora/${corpus}/docs/${doc}/export`);
  }
}
