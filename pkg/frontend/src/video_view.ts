// Video annotation screen: placeholder frame canvas with server-computed
// boxes, frame stepping (arrows = 1 frame, shift+arrows = 1 s), new-object
// drag, tracking lifecycle buttons, detection review, the sentence strip
// with time alignment, and the shared Object panel.

import { attachDragToDraw, boxElement } from "./boxes.js";
import { ObjectPanel } from "./object_panel.js";
import { conflictBanner, UiSession } from "./session.js";
import { timecode } from "./timecode.js";
import type { Box } from "./types.js";

export class VideoView {
  readonly root: HTMLElement;
  readonly overlay: HTMLElement;
  readonly objectPanel: ObjectPanel;
  private pendingBox: Box | null = null;

  constructor(
    doc: Document,
    readonly session: UiSession,
  ) {
    this.root = doc.createElement("div");
    this.root.className = "screen video-screen";
    this.root.innerHTML = `
      <div class="media-pane">
        <div class="player">
          <div class="frame-placeholder"><div class="overlay"></div></div>
          <div class="player-controls">
            <button class="step-back">◀ frame</button>
            <button class="step-forward">frame ▶</button>
            <span class="playhead-label"></span>
          </div>
          <div class="tracking-controls">
            <button class="new-object">New object</button>
            <button class="start-tracking">Start tracking</button>
            <button class="pause-tracking">Pause tracking</button>
            <button class="end-object">End object</button>
          </div>
        </div>
        <div class="sentence-strip"></div>
        <section class="panel drafts-panel"><h3>Sentence drafts</h3><ul></ul></section>
      </div>
      <div class="side-pane">
        <section class="panel detections-panel"><h3>Detected objects</h3><ul></ul></section>
        <section class="panel objects-panel"><h3>Objects</h3><ul></ul></section>
      </div>
    `;
    this.overlay = this.root.querySelector(".overlay") as HTMLElement;
    this.objectPanel = new ObjectPanel(doc, session.api, session.corpus, session.docId, {
      onSaved: () => void this.refresh(),
      onError: (msg) => this.showError(msg),
    });
    (this.root.querySelector(".side-pane") as HTMLElement).appendChild(this.objectPanel.root);

    (this.root.querySelector(".step-back") as HTMLElement).addEventListener("click", () => void this.step(-1));
    (this.root.querySelector(".step-forward") as HTMLElement).addEventListener("click", () => void this.step(1));
    (this.root.querySelector(".new-object") as HTMLElement).addEventListener("click", () => this.armNewObject());
    (this.root.querySelector(".start-tracking") as HTMLElement).addEventListener("click", () => void this.startTracking());
    (this.root.querySelector(".pause-tracking") as HTMLElement).addEventListener("click", () => void this.pauseTracking());
    (this.root.querySelector(".end-object") as HTMLElement).addEventListener("click", () => void this.endObject());

    this.root.addEventListener("keydown", (ev) => {
      const event = ev as KeyboardEvent;
      const fps = this.session.view?.fps ?? 25;
      if (event.key === "ArrowRight") void this.step(event.shiftKey ? fps : 1);
      if (event.key === "ArrowLeft") void this.step(event.shiftKey ? -fps : -1);
    });
  }

  async init(): Promise<void> {
    await this.objectPanel.init();
    await this.session.reload();
    await this.render();
  }

  async refresh(): Promise<void> {
    await this.session.reload();
    await this.render();
  }

  showError(message: string): void {
    this.root.prepend(conflictBanner(this.root.ownerDocument, message));
  }

  async step(delta: number): Promise<void> {
    this.session.stepFrames(delta);
    await this.render();
  }

  armNewObject(): void {
    const view = this.session.view;
    if (!view) return;
    this.overlay.classList.add("drawing");
    const controller = attachDragToDraw(
      this.overlay,
      view.width ?? 0,
      view.height ?? 0,
      (box) => {
        controller.cancel();
        this.overlay.classList.remove("drawing");
        void this.createObject(box);
      },
    );
  }

  async createObject(box: Box): Promise<void> {
    const made = await this.session.api.createObject(
      this.session.corpus, this.session.docId, this.session.playhead, box);
    this.session.selectedObject = made.object_id;
    await this.refresh();
    this.selectObject(made.object_id);
  }

  async startTracking(): Promise<void> {
    const oid = this.session.selectedObject;
    if (oid === null) return this.showError("select an object first");
    await this.session.mutate(
      () => this.session.api.trackOp(this.session.corpus, this.session.docId, oid, {
        op: "auto_track",
        until_frame: this.session.playhead,
        revision: this.session.revisionOf("object", oid),
      }),
      (msg) => this.showError(msg),
    );
    await this.render();
  }

  async pauseTracking(): Promise<void> {
    const oid = this.session.selectedObject;
    if (oid === null) return this.showError("select an object first");
    await this.session.mutate(
      () => this.session.api.trackOp(this.session.corpus, this.session.docId, oid, {
        op: "pause",
        revision: this.session.revisionOf("object", oid),
      }),
      (msg) => this.showError(msg),
    );
    await this.render();
  }

  async endObject(): Promise<void> {
    const oid = this.session.selectedObject;
    if (oid === null) return this.showError("select an object first");
    await this.session.mutate(
      () => this.session.api.trackOp(this.session.corpus, this.session.docId, oid, {
        op: "end",
        revision: this.session.revisionOf("object", oid),
      }),
      (msg) => this.showError(msg),
    );
    await this.render();
  }

  selectObject(objectId: number): void {
    this.session.selectedObject = objectId;
    const view = this.session.view;
    if (!view) return;
    const obj = view.objects.find((o) => o.id === objectId);
    if (obj) this.objectPanel.selectObject(obj, view.object_annotations);
  }

  async render(): Promise<void> {
    const view = this.session.view;
    if (!view) return;
    const doc = this.root.ownerDocument;
    const frame = this.session.playhead;
    const fps = view.fps ?? 25;

    (this.root.querySelector(".playhead-label") as HTMLElement).textContent =
      `frame ${frame} — ${timecode(frame, fps)}`;

    this.overlay.style.position = "relative";
    this.overlay.style.width = `${view.width ?? 0}px`;
    this.overlay.style.height = `${view.height ?? 0}px`;
    // boxes come from the server's interpolation, never recomputed here
    const boxes = await this.session.api.boxesAt(this.session.corpus, this.session.docId, frame);
    this.overlay.innerHTML = "";
    for (const item of boxes) {
      const el = boxElement(doc, item.box, item.object_id, item.object_id === this.session.selectedObject);
      el.addEventListener("click", () => this.selectObject(item.object_id));
      this.overlay.appendChild(el);
    }

    const objectsList = this.root.querySelector(".objects-panel ul") as HTMLElement;
    objectsList.innerHTML = "";
    for (const obj of view.objects) {
      const li = doc.createElement("li");
      li.dataset.objectId = String(obj.id);
      li.textContent = `object ${obj.id} [${obj.state}]`;
      if (obj.id === this.session.selectedObject) li.className = "selected";
      li.addEventListener("click", () => {
        this.selectObject(obj.id);
        void this.render();
      });
      objectsList.appendChild(li);
    }

    const detList = this.root.querySelector(".detections-panel ul") as HTMLElement;
    detList.innerHTML = "";
    for (const det of view.detections.filter((d) => !d.consumed)) {
      const li = doc.createElement("li");
      li.textContent = `#${det.det_id} ${det.class_label} @${det.frame_index} (${det.confidence.toFixed(2)}) `;
      const accept = doc.createElement("button");
      accept.textContent = "accept";
      accept.className = "accept-detection";
      accept.addEventListener("click", () => void this.acceptDetection(det.det_id));
      const remove = doc.createElement("button");
      remove.textContent = "delete";
      remove.className = "delete-detection";
      remove.addEventListener("click", () => void this.deleteDetection(det.det_id));
      li.append(accept, remove);
      detList.appendChild(li);
    }

    const strip = this.root.querySelector(".sentence-strip") as HTMLElement;
    strip.innerHTML = "";
    const nowMs = (frame * 1000) / fps;
    for (const sentence of view.sentences) {
      const span = doc.createElement("span");
      span.className = "strip-sentence" +
        (sentence.start_ms <= nowMs && nowMs <= sentence.end_ms ? " active" : "");
      span.textContent = `[${(sentence.start_ms / 1000).toFixed(2)}–${(sentence.end_ms / 1000).toFixed(2)}s] ${sentence.text}`;
      strip.appendChild(span);
    }

    const draftsList = this.root.querySelector(".drafts-panel ul") as HTMLElement;
    draftsList.innerHTML = "";
    for (const draft of view.drafts) {
      const li = doc.createElement("li");
      li.dataset.draftId = String(draft.id);
      li.textContent = `draft ${draft.id} (${draft.status}): ${draft.text} `;
      if (draft.status !== "finalized") {
        const btn = doc.createElement("button");
        btn.className = "finalize-draft";
        btn.textContent = "finalize";
        btn.addEventListener("click", () => void this.finalizeDraft(draft.id));
        li.appendChild(btn);
      }
      draftsList.appendChild(li);
    }
  }

  async acceptDetection(detId: number): Promise<void> {
    await this.session.mutate(
      () => this.session.api.acceptDetection(
        this.session.corpus, this.session.docId, detId,
        this.session.revisionOf("detection", detId)),
      (msg) => this.showError(msg),
    );
    await this.render();
  }

  async deleteDetection(detId: number): Promise<void> {
    await this.session.mutate(
      () => this.session.api.deleteDetection(
        this.session.corpus, this.session.docId, detId,
        this.session.revisionOf("detection", detId)),
      (msg) => this.showError(msg),
    );
    await this.render();
  }

  async finalizeDraft(draftId: number): Promise<void> {
    await this.session.mutate(
      () => this.session.api.editDraft(this.session.corpus, this.session.docId, draftId, {
        op: "finalize",
        revision: this.session.revisionOf("draft", draftId),
      }),
      (msg) => this.showError(msg),
    );
    await this.render();
  }
}
