// The Object panel: frame picker, FE picker and CV Name resolver for the
// selected visual object. The FE dropdown is populated exclusively from
// GET /frames/{name}/fes for the currently chosen frame, so the panel can
// never construct an annotation the backend would reject as fe_not_in_frame;
// switching frames clears the FE selection.

import { ApiClient } from "./api.js";
import type { LuInfo, ObjectAnnotationInfo, ObjectInfo } from "./types.js";

export interface ObjectPanelHooks {
  onSaved?: (result: { ia_id?: number; revision: number }) => void;
  onError?: (message: string) => void;
}

export class ObjectPanel {
  readonly root: HTMLElement;
  readonly frameSelect: HTMLSelectElement;
  readonly feSelect: HTMLSelectElement;
  readonly cvInput: HTMLInputElement;
  readonly cvMatches: HTMLSelectElement;
  readonly saveButton: HTMLButtonElement;
  readonly heading: HTMLElement;
  readonly existing: HTMLElement;
  private objectRef: number | null = null;

  constructor(
    doc: Document,
    private api: ApiClient,
    private corpus: string,
    private docId: string,
    private hooks: ObjectPanelHooks = {},
  ) {
    this.root = doc.createElement("section");
    this.root.className = "panel object-panel";
    this.root.innerHTML = `
      <h3>Object</h3>
      <p class="object-heading">no object selected</p>
      <ul class="existing-annotations"></ul>
      <label>Frame Name
        <select class="frame-select"><option value=""></option></select>
      </label>
      <label>Frame Element
        <select class="fe-select" disabled></select>
      </label>
      <label>CV Name
        <input class="cv-input" placeholder="e.g. glass.n" />
        <select class="cv-matches" size="2"></select>
      </label>
      <button class="save-annotation" disabled>Save annotation</button>
    `;
    this.heading = this.root.querySelector(".object-heading") as HTMLElement;
    this.existing = this.root.querySelector(".existing-annotations") as HTMLElement;
    this.frameSelect = this.root.querySelector(".frame-select") as HTMLSelectElement;
    this.feSelect = this.root.querySelector(".fe-select") as HTMLSelectElement;
    this.cvInput = this.root.querySelector(".cv-input") as HTMLInputElement;
    this.cvMatches = this.root.querySelector(".cv-matches") as HTMLSelectElement;
    this.saveButton = this.root.querySelector(".save-annotation") as HTMLButtonElement;

    this.frameSelect.addEventListener("change", () => void this.loadFes());
    this.cvInput.addEventListener("change", () => void this.resolveCv());
    this.saveButton.addEventListener("click", () => void this.save());
  }

  async init(): Promise<void> {
    const frames = await this.api.frames();
    for (const frame of frames) {
      const opt = this.frameSelect.ownerDocument.createElement("option");
      opt.value = frame.name;
      opt.textContent = frame.name;
      this.frameSelect.appendChild(opt);
    }
  }

  selectObject(obj: ObjectInfo, annotations: ObjectAnnotationInfo[]): void {
    this.objectRef = obj.id;
    const suggestion = obj.cv_suggestion ? ` (suggested CV: ${obj.cv_suggestion})` : "";
    this.heading.textContent = `object ${obj.id} [${obj.entity_type || obj.origin}]${suggestion}`;
    this.existing.innerHTML = "";
    for (const ia of annotations.filter((a) => a.object_ref === obj.id)) {
      const li = this.existing.ownerDocument.createElement("li");
      li.textContent = `${ia.frame} / ${ia.fe}${ia.cv_name ? ` / ${ia.cv_name}` : ""}`;
      this.existing.appendChild(li);
    }
    if (obj.cv_suggestion) this.cvMatches.innerHTML = `<option value="${obj.cv_suggestion}">${obj.cv_suggestion}</option>`;
    this.saveButton.disabled = false;
  }

  feNames(): string[] {
    return Array.from(this.feSelect.options).map((o) => o.value);
  }

  async loadFes(): Promise<void> {
    // switching frames always resets the FE choice
    this.feSelect.innerHTML = "";
    const frame = this.frameSelect.value;
    if (!frame) {
      this.feSelect.disabled = true;
      return;
    }
    const fes = await this.api.frameFes(frame);
    for (const fe of fes) {
      const opt = this.feSelect.ownerDocument.createElement("option");
      opt.value = fe.name;
      opt.textContent = `${fe.name} (${fe.coreness})`;
      this.feSelect.appendChild(opt);
    }
    this.feSelect.disabled = false;
    this.feSelect.selectedIndex = -1;
  }

  async resolveCv(): Promise<void> {
    this.cvMatches.innerHTML = "";
    const raw = this.cvInput.value.trim();
    if (!raw) return;
    const dot = raw.lastIndexOf(".");
    const lemma = dot === -1 ? raw : raw.slice(0, dot);
    const pos = dot === -1 ? undefined : raw.slice(dot + 1);
    const matches: LuInfo[] = await this.api.lus(lemma, pos);
    for (const lu of matches) {
      const opt = this.cvMatches.ownerDocument.createElement("option");
      opt.value = lu.id;
      opt.textContent = `${lu.id} [${lu.language}]`;
      this.cvMatches.appendChild(opt);
    }
    if (matches.length > 0) this.cvMatches.selectedIndex = 0;
  }

  async save(): Promise<void> {
    if (this.objectRef === null) return;
    const frame = this.frameSelect.value;
    const fe = this.feSelect.value;
    if (!frame || !fe) {
      this.hooks.onError?.("choose a frame and a frame element first");
      return;
    }
    const cvName = this.cvMatches.value || null;
    try {
      const result = await this.api.createAnnotation(this.corpus, this.docId, {
        kind: "image",
        object_ref: this.objectRef,
        frame,
        fe,
        cv_name: cvName,
      });
      this.hooks.onSaved?.(result);
    } catch (err) {
      this.hooks.onError?.(err instanceof Error ? err.message : String(err));
    }
  }
}
