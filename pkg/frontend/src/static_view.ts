// Static annotation screen: image with entity boxes, the Boxes /
// Annotations / Entities panels, the caption with pre-annotation targets,
// and the Object panel for frame + FE (+ CV Name) assignment.

import { boxElement } from "./boxes.js";
import { ObjectPanel } from "./object_panel.js";
import { conflictBanner, UiSession } from "./session.js";
import type { Box, ObjectInfo } from "./types.js";

export class StaticView {
  readonly root: HTMLElement;
  readonly overlay: HTMLElement;
  readonly objectPanel: ObjectPanel;

  constructor(
    doc: Document,
    readonly session: UiSession,
  ) {
    this.root = doc.createElement("div");
    this.root.className = "screen static-screen";
    this.root.innerHTML = `
      <div class="media-pane">
        <div class="image-frame"><div class="overlay"></div></div>
        <p class="sentence-view"></p>
      </div>
      <div class="side-pane">
        <section class="panel boxes-panel"><h3>Boxes</h3><ul></ul></section>
        <section class="panel annotations-panel"><h3>Annotations</h3><ul></ul></section>
        <section class="panel entities-panel"><h3>Entities</h3><ul></ul></section>
      </div>
    `;
    this.overlay = this.root.querySelector(".overlay") as HTMLElement;
    this.objectPanel = new ObjectPanel(doc, session.api, session.corpus, session.docId, {
      onSaved: () => void this.refresh(),
      onError: (msg) => this.showError(msg),
    });
    (this.root.querySelector(".side-pane") as HTMLElement).appendChild(this.objectPanel.root);
  }

  async init(): Promise<void> {
    await this.objectPanel.init();
    await this.session.reload();
    this.render();
  }

  async refresh(): Promise<void> {
    await this.session.reload();
    this.render();
  }

  showError(message: string): void {
    this.root.prepend(conflictBanner(this.root.ownerDocument, message));
  }

  private staticBoxes(obj: ObjectInfo): Box[] {
    return obj.segments.flatMap((seg) => Object.values(seg.keyframes));
  }

  render(): void {
    const view = this.session.view;
    if (!view) return;
    const doc = this.root.ownerDocument;
    this.overlay.style.position = "relative";
    this.overlay.style.width = `${view.width ?? 0}px`;
    this.overlay.style.height = `${view.height ?? 0}px`;
    this.overlay.innerHTML = "";
    for (const obj of view.objects) {
      for (const box of this.staticBoxes(obj)) {
        const el = boxElement(doc, box, obj.id, obj.id === this.session.selectedObject);
        el.addEventListener("click", () => this.selectEntity(obj.id));
        this.overlay.appendChild(el);
      }
    }

    const boxesList = this.root.querySelector(".boxes-panel ul") as HTMLElement;
    boxesList.innerHTML = "";
    for (const obj of view.objects) {
      for (const box of this.staticBoxes(obj)) {
        const li = doc.createElement("li");
        li.textContent = `#${obj.id} [${box.join(", ")}]`;
        boxesList.appendChild(li);
      }
    }

    const sentence = view.sentences[0];
    const annList = this.root.querySelector(".annotations-panel ul") as HTMLElement;
    annList.innerHTML = "";
    for (const corr of view.correlations) {
      const phrase = sentence ? sentence.text.slice(corr.start, corr.end) : "";
      const obj = view.objects.find((o) => o.id === corr.object_ref);
      const li = doc.createElement("li");
      li.textContent = `entity ${corr.object_ref} ↔ "${phrase}" (${obj?.entity_type ?? "?"})`;
      annList.appendChild(li);
    }

    const entitiesList = this.root.querySelector(".entities-panel ul") as HTMLElement;
    entitiesList.innerHTML = "";
    for (const obj of view.objects) {
      const li = doc.createElement("li");
      li.dataset.objectId = String(obj.id);
      li.textContent = `Entity ${obj.id} (${obj.entity_type || obj.origin})`;
      if (obj.id === this.session.selectedObject) li.className = "selected";
      li.addEventListener("click", () => this.selectEntity(obj.id));
      entitiesList.appendChild(li);
    }

    const sentenceView = this.root.querySelector(".sentence-view") as HTMLElement;
    sentenceView.innerHTML = "";
    if (sentence) {
      const marks = [
        ...view.candidates.map((c) => ({ start: c.start, end: c.end, cls: "target", title: c.chosen ?? "" })),
        ...view.correlations
          .filter((c) => c.object_ref === this.session.selectedObject)
          .map((c) => ({ start: c.start, end: c.end, cls: "phrase-highlight", title: "" })),
      ].sort((a, b) => a.start - b.start);
      let cursor = 0;
      for (const mark of marks) {
        if (mark.start < cursor) continue; // overlapping highlight, keep the first
        sentenceView.appendChild(doc.createTextNode(sentence.text.slice(cursor, mark.start)));
        const span = doc.createElement("span");
        span.className = mark.cls;
        span.title = mark.title;
        span.textContent = sentence.text.slice(mark.start, mark.end);
        sentenceView.appendChild(span);
        cursor = mark.end;
      }
      sentenceView.appendChild(doc.createTextNode(sentence.text.slice(cursor)));
    }
  }

  selectEntity(objectId: number): void {
    this.session.selectedObject = objectId;
    const view = this.session.view;
    if (!view) return;
    const obj = view.objects.find((o) => o.id === objectId);
    if (obj) this.objectPanel.selectObject(obj, view.object_annotations);
    this.render();
  }
}
