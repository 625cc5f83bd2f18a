// Entry point: corpus/document chooser that mounts the static or video
// annotation screen for the selected document.

import { ApiClient } from "./api.js";
import { UiSession } from "./session.js";
import { StaticView } from "./static_view.js";
import { VideoView } from "./video_view.js";

export async function mountApp(root: HTMLElement, api: ApiClient): Promise<void> {
  const doc = root.ownerDocument;
  root.innerHTML = `
    <header>
      <h1>charonette</h1>
      <label>Corpus <select class="corpus-select"></select></label>
      <label>Document <select class="doc-select"></select></label>
      <button class="open-doc">Open</button>
    </header>
    <main class="view-slot"></main>
  `;
  const corpusSelect = root.querySelector(".corpus-select") as HTMLSelectElement;
  const docSelect = root.querySelector(".doc-select") as HTMLSelectElement;
  const slot = root.querySelector(".view-slot") as HTMLElement;

  const corpora = await api.corpora();
  for (const name of corpora) {
    const opt = doc.createElement("option");
    opt.value = name;
    opt.textContent = name;
    corpusSelect.appendChild(opt);
  }

  async function loadDocs(): Promise<void> {
    docSelect.innerHTML = "";
    if (!corpusSelect.value) return;
    for (const id of await api.docs(corpusSelect.value)) {
      const opt = doc.createElement("option");
      opt.value = id;
      opt.textContent = id;
      docSelect.appendChild(opt);
    }
  }
  corpusSelect.addEventListener("change", () => void loadDocs());
  await loadDocs();

  (root.querySelector(".open-doc") as HTMLElement).addEventListener("click", async () => {
    if (!corpusSelect.value || !docSelect.value) return;
    const session = new UiSession(api, corpusSelect.value, docSelect.value);
    const view = await api.doc(session.corpus, session.docId);
    slot.innerHTML = "";
    const screen = view.mode === "video" ? new VideoView(doc, session) : new StaticView(doc, session);
    slot.appendChild(screen.root);
    await screen.init();
  });
}

declare global {
  interface Window {
    charonetteMounted?: Promise<void>;
  }
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  window.charonetteMounted = mountApp(
    document.getElementById("app") as HTMLElement,
    new ApiClient(""),
  );
}
