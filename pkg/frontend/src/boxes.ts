// Box overlay helpers. Boxes render as absolutely positioned divs inside an
// overlay sized at the media's native resolution, so DOM coordinates equal
// image pixels and no client-side geometry math can drift from the server's.

import type { Box } from "./types.js";

export function normalizeDrag(x1: number, y1: number, x2: number, y2: number): Box | null {
  const xmin = Math.round(Math.min(x1, x2));
  const ymin = Math.round(Math.min(y1, y2));
  const xmax = Math.round(Math.max(x1, x2));
  const ymax = Math.round(Math.max(y1, y2));
  if (xmin >= xmax || ymin >= ymax) return null; // zero-area drag
  return [xmin, ymin, xmax, ymax];
}

export function clampBox(box: Box, width: number, height: number): Box {
  const [xmin, ymin, xmax, ymax] = box;
  return [
    Math.max(0, Math.min(xmin, width - 1)),
    Math.max(0, Math.min(ymin, height - 1)),
    Math.max(1, Math.min(xmax, width)),
    Math.max(1, Math.min(ymax, height)),
  ];
}

export function boxElement(doc: Document, box: Box, objectId: number, selected: boolean): HTMLElement {
  const el = doc.createElement("div");
  el.className = selected ? "bbox selected" : "bbox";
  el.dataset.objectId = String(objectId);
  el.style.position = "absolute";
  el.style.left = `${box[0]}px`;
  el.style.top = `${box[1]}px`;
  el.style.width = `${box[2] - box[0]}px`;
  el.style.height = `${box[3] - box[1]}px`;
  const tag = doc.createElement("span");
  tag.className = "bbox-tag";
  tag.textContent = String(objectId);
  el.appendChild(tag);
  return el;
}

export interface DragController {
  cancel(): void;
}

// Wire drag-to-draw on an overlay; onDone receives image-pixel coordinates.
export function attachDragToDraw(
  overlay: HTMLElement,
  width: number,
  height: number,
  onDone: (box: Box) => void,
): DragController {
  let start: { x: number; y: number } | null = null;
  let rubber: HTMLElement | null = null;

  const toLocal = (ev: MouseEvent) => {
    const rect = overlay.getBoundingClientRect();
    return { x: ev.clientX - rect.left, y: ev.clientY - rect.top };
  };

  const onDown = (ev: Event) => {
    start = toLocal(ev as MouseEvent);
    rubber = overlay.ownerDocument.createElement("div");
    rubber.className = "bbox rubber";
    rubber.style.position = "absolute";
    overlay.appendChild(rubber);
  };
  const onMove = (ev: Event) => {
    if (!start || !rubber) return;
    const cur = toLocal(ev as MouseEvent);
    const box = normalizeDrag(start.x, start.y, cur.x, cur.y);
    if (!box) return;
    rubber.style.left = `${box[0]}px`;
    rubber.style.top = `${box[1]}px`;
    rubber.style.width = `${box[2] - box[0]}px`;
    rubber.style.height = `${box[3] - box[1]}px`;
  };
  const onUp = (ev: Event) => {
    if (!start) return;
    const cur = toLocal(ev as MouseEvent);
    const box = normalizeDrag(start.x, start.y, cur.x, cur.y);
    start = null;
    rubber?.remove();
    rubber = null;
    if (box) onDone(clampBox(box, width, height));
  };

  overlay.addEventListener("mousedown", onDown);
  overlay.addEventListener("mousemove", onMove);
  overlay.addEventListener("mouseup", onUp);
  return {
    cancel() {
      overlay.removeEventListener("mousedown", onDown);
      overlay.removeEventListener("mousemove", onMove);
      overlay.removeEventListener("mouseup", onUp);
    },
  };
}
