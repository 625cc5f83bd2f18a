"""Document service: the orchestration layer between the domain modules and
the record store.

A document is a set of records under one (corpus, doc) key: a meta record,
sentences, objects (static entity chains and video tracks share one shape),
annotation sets, object annotations, correlations, sentence drafts,
detections and pre-annotation candidates. Static chains are stored as
objects whose keyframes sit at box ordinals 0..n-1, so one export schema
covers both modes.

All mutations validate through the domain modules first, then write with the
caller's expected revision; mutations are serialized per document.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field

from . import annotations as ann
from . import preannotate as pre
from . import static_ingest
from . import video_ingest as vid
from .errors import CharonetteError, ConflictError, NotFoundError
from .geometry import BoxGeometry
from .lexicon import Lexicon
from .store import RecordStore
from .tracking import ObjectTrack, TrackSegment, TrackSet


class DocumentExistsError(ConflictError):
    code = "document_exists"


@dataclass
class SentenceRecord:
    sentence_id: int
    text: str
    start_ms: int = 0
    end_ms: int = 0


@dataclass
class StoredObject:
    track: ObjectTrack
    entity_type: str = ""
    keyframe_labels: dict[int, str] = field(default_factory=dict)
    cv_suggestion: str | None = None

    @property
    def object_id(self) -> int:
        return self.track.object_id


@dataclass
class DocumentView:
    doc_id: str
    mode: str  # "static" | "video"
    media: str = ""
    width: int | None = None
    height: int | None = None
    fps: int | None = None
    frame_count: int | None = None
    first_object_id: int = 1
    sentences: list[SentenceRecord] = field(default_factory=list)
    objects: list[StoredObject] = field(default_factory=list)
    annotation_sets: list[ann.TextAnnotationSet] = field(default_factory=list)
    object_annotations: list[ann.ImageAnnotation] = field(default_factory=list)
    correlations: list[ann.Correlation] = field(default_factory=list)
    drafts: list[vid.SentenceDraft] = field(default_factory=list)
    detections: list[dict] = field(default_factory=list)
    candidates: list[pre.TargetCandidate] = field(default_factory=list)
    revisions: dict[str, int] = field(default_factory=dict)

    def sentence(self, sentence_id: int) -> SentenceRecord:
        for s in self.sentences:
            if s.sentence_id == sentence_id:
                return s
        raise NotFoundError(f"unknown sentence {sentence_id}", field="sentence_ref")

    def object(self, object_id: int) -> StoredObject:
        for o in self.objects:
            if o.object_id == object_id:
                return o
        raise NotFoundError(f"unknown object {object_id}", field="object_ref")


# -- payload (de)serialization ---------------------------------------------------


def _box_to_list(box: BoxGeometry) -> list[int]:
    return [box.xmin, box.ymin, box.xmax, box.ymax]


def _box_from_list(values) -> BoxGeometry:
    return BoxGeometry(*[int(v) for v in values])


def object_to_payload(obj: StoredObject) -> dict:
    return {
        "origin": obj.track.origin,
        "state": obj.track.state,
        "entity_type": obj.entity_type,
        "cv_suggestion": obj.cv_suggestion,
        "segments": [
            {
                "start": seg.start_frame,
                "end": seg.end_frame,
                "keyframes": {str(k): _box_to_list(b) for k, b in sorted(seg.keyframes.items())},
            }
            for seg in obj.track.segments
        ],
        "labels": {str(k): v for k, v in sorted(obj.keyframe_labels.items())},
    }


def object_from_payload(object_id: int, payload: dict) -> StoredObject:
    track = ObjectTrack(
        object_id=object_id,
        origin=payload["origin"],
        state=payload["state"],
        segments=[
            TrackSegment(
                start_frame=seg["start"],
                end_frame=seg["end"],
                keyframes={int(k): _box_from_list(v) for k, v in seg["keyframes"].items()},
            )
            for seg in payload["segments"]
        ],
    )
    return StoredObject(
        track=track,
        entity_type=payload.get("entity_type", ""),
        keyframe_labels={int(k): v for k, v in payload.get("labels", {}).items()},
        cv_suggestion=payload.get("cv_suggestion"),
    )


def aset_to_payload(aset: ann.TextAnnotationSet) -> dict:
    return {
        "sentence_ref": aset.sentence_ref,
        "target_start": aset.target_start,
        "target_end": aset.target_end,
        "frame": aset.frame_id,
        "layers": {
            name: [[lab.start, lab.end, lab.label] for lab in labels]
            for name, labels in aset.layers.items()
        },
        "ni": [[entry.fe, entry.ni_type] for entry in aset.ni_entries],
    }


def aset_from_payload(as_id: int, payload: dict) -> ann.TextAnnotationSet:
    return ann.TextAnnotationSet(
        as_id=as_id,
        sentence_ref=payload["sentence_ref"],
        target_start=payload["target_start"],
        target_end=payload["target_end"],
        frame_id=payload["frame"],
        layers={
            name: [ann.LayerLabel(s, e, lab) for s, e, lab in payload["layers"].get(name, [])]
            for name in ann.LAYER_NAMES
        },
        ni_entries=[ann.NiEntry(fe, t) for fe, t in payload.get("ni", [])],
    )


def draft_to_payload(draft: vid.SentenceDraft) -> dict:
    return {
        "status": draft.status,
        "words": [[w.text, w.start_ms, w.end_ms, w.source] for w in draft.words],
    }


def draft_from_payload(draft_id: int, payload: dict) -> vid.SentenceDraft:
    return vid.SentenceDraft(
        draft_id=draft_id,
        words=[vid.TranscriptWord(t, s, e, src) for t, s, e, src in payload["words"]],
        status=payload["status"],
    )


def candidate_to_payload(cand: pre.TargetCandidate) -> dict:
    return {
        "sentence_ref": cand.sentence_ref,
        "start": cand.start,
        "end": cand.end,
        "lemma": cand.lemma,
        "pos": cand.pos,
        "frames": list(cand.candidate_frames),
        "chosen": cand.chosen_frame,
        "score": cand.score,
        "provenance": cand.provenance,
    }


class AnnotationService:
    """Facade used by the HTTP API, the CLI and the test suite."""

    def __init__(self, store: RecordStore, lexicon: Lexicon):
        self.store = store
        self.lexicon = lexicon
        self._doc_locks: dict[tuple[str, str], threading.Lock] = {}
        self._locks_guard = threading.Lock()

    def _doc_lock(self, corpus: str, doc: str) -> threading.Lock:
        with self._locks_guard:
            return self._doc_locks.setdefault((corpus, doc), threading.Lock())

    # -- corpus / document management ---------------------------------------

    def create_corpus(self, name: str) -> None:
        self.store.create_corpus(name)

    def list_corpora(self) -> list[str]:
        return self.store.list_corpora()

    def list_documents(self, corpus: str) -> list[str]:
        return self.store.list_documents(corpus)

    def _require_new_doc(self, corpus: str, doc_id: str) -> None:
        if self.store.get(corpus, doc_id, "meta", 0) is not None:
            raise DocumentExistsError(f"document {doc_id!r} already exists in {corpus!r}")

    # -- import: static -------------------------------------------------------

    def import_static_bundle(self, corpus: str, zip_bytes: bytes, bundle_name: str = "bundle") -> list[str]:
        bundle = static_ingest.open_bundle(zip_bytes, name=bundle_name)
        documents = static_ingest.link_entities(bundle)
        dims = {img.file_name: (img.width, img.height) for img in bundle.images}
        created = []
        for doc in documents:
            with self._doc_lock(corpus, doc.doc_id):
                self._require_new_doc(corpus, doc.doc_id)
                width, height = dims[doc.image_ref]
                self.store.put(corpus, doc.doc_id, "meta", 0, {
                    "mode": "static",
                    "media": doc.image_ref,
                    "width": width,
                    "height": height,
                    "fps": None,
                    "frame_count": None,
                    "first_object_id": 1,
                    "source_corpus": doc.source_corpus,
                }, 0)
                self.store.put(corpus, doc.doc_id, "sentence", 1,
                               {"text": doc.sentence, "start_ms": 0, "end_ms": 0}, 0)
                corr_id = 0
                for chain in doc.chains:
                    if chain.boxes:
                        keyframes = {i: box.box for i, box in enumerate(chain.boxes)}
                        labels = {
                            i: box.class_label
                            for i, box in enumerate(chain.boxes)
                            if box.class_label
                        }
                        segments = [TrackSegment(0, len(chain.boxes) - 1, keyframes)]
                    else:
                        segments = []  # phrase-only chain: no geometry yet
                        labels = {}
                    mapping = pre.map_cv_class_to_lu(chain.entity_type, self.lexicon)
                    obj = StoredObject(
                        track=ObjectTrack(
                            object_id=chain.entity_id,
                            origin="human",
                            state="ended",
                            segments=segments,
                        ),
                        entity_type=chain.entity_type,
                        keyframe_labels=labels,
                        cv_suggestion=mapping.lu_ref,
                    )
                    self.store.put(corpus, doc.doc_id, "object", chain.entity_id,
                                   object_to_payload(obj), 0)
                    for span in chain.phrase_spans:
                        corr_id += 1
                        corr = ann.correlate(doc.sentence, chain.entity_id, 1, span.start, span.end)
                        self.store.put(corpus, doc.doc_id, "correlation", corr_id, {
                            "object_ref": corr.object_ref,
                            "sentence_ref": corr.sentence_ref,
                            "start": corr.start,
                            "end": corr.end,
                        }, 0)
                created.append(doc.doc_id)
        return created

    # -- import: video ----------------------------------------------------------

    def import_video(self, corpus: str, transcript: bytes, subtitles: bytes,
                     detections: bytes, fps: int = vid.DEFAULT_FPS,
                     width: int = 0, height: int = 0,
                     frame_count: int | None = None, doc_id: str | None = None,
                     media: str = "video", first_object_id: int = 1) -> str:
        if doc_id is None:
            existing = self.store.list_documents(corpus)
            n = 1
            while f"video-{n}" in existing:
                n += 1
            doc_id = f"video-{n}"
        with self._doc_lock(corpus, doc_id):
            self._require_new_doc(corpus, doc_id)
            speech = vid.parse_transcript_file(transcript)
            subs = vid.parse_subtitle_file(subtitles) if subtitles else []
            dets = vid.ingest_detections(detections, width, height) if detections else []
            merged = vid.merge_streams(speech, subs)
            drafts = vid.segment_sentences(merged)
            self.store.put(corpus, doc_id, "meta", 0, {
                "mode": "video",
                "media": media,
                "width": width,
                "height": height,
                "fps": fps,
                "frame_count": frame_count,
                "first_object_id": first_object_id,
                "source_corpus": corpus,
            }, 0)
            for draft in drafts:
                self.store.put(corpus, doc_id, "draft", draft.draft_id,
                               draft_to_payload(draft), 0)
            for det in dets:
                mapping = pre.map_cv_class_to_lu(det.class_label, self.lexicon)
                self.store.put(corpus, doc_id, "detection", det.det_id, {
                    "frame_index": det.frame_index,
                    "box": _box_to_list(det.box),
                    "class_label": det.class_label,
                    "confidence": det.confidence,
                    "consumed": False,
                    "cv_suggestion": mapping.lu_ref,
                }, 0)
        return doc_id

    # -- document loading ----------------------------------------------------------

    def load_view(self, corpus: str, doc: str) -> DocumentView:
        meta_rec = self.store.get(corpus, doc, "meta", 0)
        if meta_rec is None:
            raise NotFoundError(f"unknown document {doc!r} in corpus {corpus!r}", field="doc")
        meta = meta_rec.payload
        view = DocumentView(
            doc_id=doc,
            mode=meta["mode"],
            media=meta.get("media", ""),
            width=meta.get("width"),
            height=meta.get("height"),
            fps=meta.get("fps"),
            frame_count=meta.get("frame_count"),
            first_object_id=meta.get("first_object_id", 1),
        )
        view.revisions["meta/0"] = meta_rec.revision
        for rec in self.store.list_records(corpus, doc):
            view.revisions[f"{rec.kind}/{rec.rec_id}"] = rec.revision
            if rec.kind == "sentence":
                view.sentences.append(SentenceRecord(
                    rec.rec_id, rec.payload["text"],
                    rec.payload.get("start_ms", 0), rec.payload.get("end_ms", 0)))
            elif rec.kind == "object":
                view.objects.append(object_from_payload(rec.rec_id, rec.payload))
            elif rec.kind == "annotation_set":
                view.annotation_sets.append(aset_from_payload(rec.rec_id, rec.payload))
            elif rec.kind == "object_annotation":
                view.object_annotations.append(ann.ImageAnnotation(
                    ia_id=rec.rec_id,
                    object_ref=rec.payload["object_ref"],
                    frame_id=rec.payload["frame"],
                    fe=rec.payload["fe"],
                    cv_name=rec.payload.get("cv_name"),
                    provenance=rec.payload.get("provenance", "human"),
                ))
            elif rec.kind == "correlation":
                view.correlations.append(ann.Correlation(
                    rec.payload["object_ref"], rec.payload["sentence_ref"],
                    rec.payload["start"], rec.payload["end"]))
            elif rec.kind == "draft":
                view.drafts.append(draft_from_payload(rec.rec_id, rec.payload))
            elif rec.kind == "detection":
                view.detections.append({"det_id": rec.rec_id, **rec.payload})
            elif rec.kind == "candidate":
                view.candidates.append(pre.TargetCandidate(
                    sentence_ref=rec.payload["sentence_ref"],
                    start=rec.payload["start"],
                    end=rec.payload["end"],
                    lemma=rec.payload["lemma"],
                    pos=rec.payload["pos"],
                    candidate_frames=tuple(rec.payload["frames"]),
                    chosen_frame=rec.payload.get("chosen"),
                    score=rec.payload.get("score"),
                    provenance=rec.payload.get("provenance", "auto"),
                ))
        view.sentences.sort(key=lambda s: s.sentence_id)
        view.objects.sort(key=lambda o: o.object_id)
        view.annotation_sets.sort(key=lambda a: a.as_id)
        view.object_annotations.sort(key=lambda a: a.ia_id)
        view.drafts.sort(key=lambda d: d.draft_id)
        view.detections.sort(key=lambda d: d["det_id"])
        return view

    def _track_set(self, corpus: str, doc: str, view: DocumentView) -> TrackSet:
        ts = TrackSet(
            width=view.width or None,
            height=view.height or None,
            frame_count=view.frame_count,
            first_object_id=max(view.first_object_id, self.store.next_id(corpus, doc, "object")),
        )
        for obj in view.objects:
            ts.tracks[obj.object_id] = obj.track
        for det in view.detections:
            if det.get("consumed"):
                ts.consumed_detections.add(det["det_id"])
        return ts

    # -- pre-annotation ----------------------------------------------------------

    def preannotate(self, corpus: str, doc: str) -> dict:
        """Run target identification + disambiguation over every sentence,
        replacing earlier auto candidates."""
        with self._doc_lock(corpus, doc):
            view = self.load_view(corpus, doc)
            for rec in self.store.list_records(corpus, doc, "candidate"):
                if rec.payload.get("provenance") == "auto":
                    self.store.delete(corpus, doc, "candidate", rec.rec_id, rec.revision)
            total = 0
            ambiguous = 0
            for sentence in view.sentences:
                targets = pre.identify_targets(sentence.text, self.lexicon, sentence.sentence_id)
                resolved = pre.disambiguate(targets, self.lexicon)
                for cand in resolved:
                    rec_id = self.store.next_id(corpus, doc, "candidate")
                    self.store.put(corpus, doc, "candidate", rec_id,
                                   candidate_to_payload(cand), 0)
                    total += 1
                    if len(cand.candidate_frames) > 1:
                        ambiguous += 1
            return {"targets": total, "ambiguous": ambiguous, "sentences": len(view.sentences)}

    # -- text annotation -----------------------------------------------------------

    def create_text_annotation(self, corpus: str, doc: str, sentence_ref: int,
                               target_start: int, target_end: int, frame: str) -> dict:
        with self._doc_lock(corpus, doc):
            view = self.load_view(corpus, doc)
            sentence = view.sentence(sentence_ref)
            as_id = self.store.next_id(corpus, doc, "annotation_set")
            aset = ann.create_text_as(self.lexicon, sentence.text, sentence_ref,
                                      target_start, target_end, frame, as_id)
            rev = self.store.put(corpus, doc, "annotation_set", as_id, aset_to_payload(aset), 0)
            return {"as_id": as_id, "revision": rev}

    def _load_aset(self, corpus: str, doc: str, as_id: int) -> ann.TextAnnotationSet:
        rec = self.store.get(corpus, doc, "annotation_set", as_id)
        if rec is None:
            raise NotFoundError(f"unknown annotation set {as_id}", field="as_id")
        return aset_from_payload(as_id, rec.payload)

    def set_layer_label(self, corpus: str, doc: str, as_id: int, layer: str,
                        start: int, end: int, label: str, expected_revision: int) -> dict:
        with self._doc_lock(corpus, doc):
            view = self.load_view(corpus, doc)
            aset = self._load_aset(corpus, doc, as_id)
            sentence = view.sentence(aset.sentence_ref)
            ann.set_layer_label(self.lexicon, sentence.text, aset, layer, start, end, label)
            rev = self.store.put(corpus, doc, "annotation_set", as_id,
                                 aset_to_payload(aset), expected_revision)
            return {"as_id": as_id, "revision": rev}

    def mark_ni(self, corpus: str, doc: str, as_id: int, fe: str, ni_type: str,
                expected_revision: int) -> dict:
        with self._doc_lock(corpus, doc):
            aset = self._load_aset(corpus, doc, as_id)
            ann.mark_ni(self.lexicon, aset, fe, ni_type)
            rev = self.store.put(corpus, doc, "annotation_set", as_id,
                                 aset_to_payload(aset), expected_revision)
            return {"as_id": as_id, "revision": rev}

    # -- image annotation ------------------------------------------------------------

    def annotate_object(self, corpus: str, doc: str, object_ref: int, frame: str,
                        fe: str, cv_name: str | None = None,
                        provenance: str = "human") -> dict:
        with self._doc_lock(corpus, doc):
            view = self.load_view(corpus, doc)
            view.object(object_ref)  # must exist
            ia_id = self.store.next_id(corpus, doc, "object_annotation")
            image_annotation = ann.annotate_image_target(
                self.lexicon, object_ref, frame, fe, cv_name, ia_id, provenance)
            rev = self.store.put(corpus, doc, "object_annotation", ia_id, {
                "object_ref": image_annotation.object_ref,
                "frame": image_annotation.frame_id,
                "fe": image_annotation.fe,
                "cv_name": image_annotation.cv_name,
                "provenance": image_annotation.provenance,
            }, 0)
            return {"ia_id": ia_id, "revision": rev}

    def add_correlation(self, corpus: str, doc: str, object_ref: int,
                        sentence_ref: int, start: int, end: int) -> dict:
        with self._doc_lock(corpus, doc):
            view = self.load_view(corpus, doc)
            view.object(object_ref)
            sentence = view.sentence(sentence_ref)
            corr = ann.correlate(sentence.text, object_ref, sentence_ref, start, end)
            corr_id = self.store.next_id(corpus, doc, "correlation")
            rev = self.store.put(corpus, doc, "correlation", corr_id, {
                "object_ref": corr.object_ref,
                "sentence_ref": corr.sentence_ref,
                "start": corr.start,
                "end": corr.end,
            }, 0)
            return {"corr_id": corr_id, "revision": rev}

    # -- tracking ---------------------------------------------------------------------

    def _persist_track(self, corpus: str, doc: str, view: DocumentView,
                       ts: TrackSet, object_id: int, expected_revision: int) -> dict:
        track = ts.tracks[object_id]
        existing = next((o for o in view.objects if o.object_id == object_id), None)
        obj = StoredObject(
            track=track,
            entity_type=existing.entity_type if existing else "",
            keyframe_labels=existing.keyframe_labels if existing else {},
            cv_suggestion=existing.cv_suggestion if existing else None,
        )
        rev = self.store.put(corpus, doc, "object", object_id,
                             object_to_payload(obj), expected_revision)
        return {"object_id": object_id, "revision": rev}

    def create_object(self, corpus: str, doc: str, frame_index: int,
                      box: BoxGeometry, origin: str = "human") -> dict:
        with self._doc_lock(corpus, doc):
            view = self.load_view(corpus, doc)
            ts = self._track_set(corpus, doc, view)
            track = ts.create_object(frame_index, box, origin)
            return self._persist_track(corpus, doc, view, ts, track.object_id, 0)

    def track_op(self, corpus: str, doc: str, object_id: int, op: str,
                 expected_revision: int, frame_index: int | None = None,
                 box: BoxGeometry | None = None, until_frame: int | None = None) -> dict:
        """Apply one lifecycle operation (set_keyframe, auto_track, pause,
        resume, end) to a track and persist it."""
        with self._doc_lock(corpus, doc):
            view = self.load_view(corpus, doc)
            ts = self._track_set(corpus, doc, view)
            if op == "set_keyframe":
                ts.set_keyframe(object_id, _required(frame_index, "frame_index"),
                                _required(box, "box"))
            elif op == "auto_track":
                ts.auto_track(object_id, _required(until_frame, "until_frame"))
            elif op == "pause":
                ts.pause_track(object_id)
            elif op == "resume":
                ts.resume_track(object_id, _required(frame_index, "frame_index"),
                                _required(box, "box"))
            elif op == "end":
                ts.end_track(object_id)
            else:
                raise CharonetteError(f"unknown track operation {op!r}", field="op")
            return self._persist_track(corpus, doc, view, ts, object_id, expected_revision)

    def delete_object(self, corpus: str, doc: str, object_id: int,
                      expected_revision: int) -> dict:
        """Delete a track; its annotations and correlations cascade to
        tombstones for audit."""
        with self._doc_lock(corpus, doc):
            view = self.load_view(corpus, doc)
            view.object(object_id)
            rev = self.store.delete(corpus, doc, "object", object_id, expected_revision)
            for ia in view.object_annotations:
                if ia.object_ref == object_id:
                    self.store.delete(corpus, doc, "object_annotation", ia.ia_id,
                                      view.revisions[f"object_annotation/{ia.ia_id}"])
            for rec in self.store.list_records(corpus, doc, "correlation"):
                if rec.payload["object_ref"] == object_id:
                    self.store.delete(corpus, doc, "correlation", rec.rec_id, rec.revision)
            return {"object_id": object_id, "revision": rev}

    def accept_detection(self, corpus: str, doc: str, det_id: int,
                         expected_revision: int) -> dict:
        with self._doc_lock(corpus, doc):
            view = self.load_view(corpus, doc)
            rec = self.store.get(corpus, doc, "detection", det_id)
            if rec is None:
                raise NotFoundError(f"unknown detection {det_id}", field="det_id")
            ts = self._track_set(corpus, doc, view)
            detection = vid.Detection(
                det_id=det_id,
                frame_index=rec.payload["frame_index"],
                box=_box_from_list(rec.payload["box"]),
                class_label=rec.payload["class_label"],
                confidence=rec.payload["confidence"],
            )
            track = ts.accept_detection(detection)
            self.store.put(corpus, doc, "detection", det_id,
                           {**rec.payload, "consumed": True}, expected_revision)
            # the detector's class label travels onto the new track
            obj = StoredObject(
                track=track,
                keyframe_labels={detection.frame_index: detection.class_label},
                cv_suggestion=rec.payload.get("cv_suggestion"),
            )
            rev = self.store.put(corpus, doc, "object", track.object_id,
                                 object_to_payload(obj), 0)
            return {"object_id": track.object_id, "revision": rev, "det_id": det_id}

    def delete_detection(self, corpus: str, doc: str, det_id: int,
                         expected_revision: int) -> dict:
        with self._doc_lock(corpus, doc):
            rev = self.store.delete(corpus, doc, "detection", det_id, expected_revision)
            return {"det_id": det_id, "revision": rev}

    def boxes_at_frame(self, corpus: str, doc: str, frame_index: int) -> list[dict]:
        view = self.load_view(corpus, doc)
        out = []
        for obj in view.objects:
            box = obj.track.box_at_frame(frame_index)
            if box is not None:
                out.append({"object_id": obj.object_id, "box": _box_to_list(box)})
        return out

    # -- drafts ------------------------------------------------------------------------

    def edit_draft(self, corpus: str, doc: str, draft_id: int, edit: dict,
                   expected_revision: int) -> dict:
        """Apply one draft edit; finalizing also files the draft as a corpus
        sentence."""
        with self._doc_lock(corpus, doc):
            view = self.load_view(corpus, doc)
            ds = vid.DraftSet(view.drafts)
            op = edit.get("op")
            touched: list[vid.SentenceDraft] = []
            removed: list[int] = []
            if op == "split_at":
                head, tail = ds.split_at(draft_id, int(_required(edit.get("word_index"), "word_index")))
                touched = [head, tail]
            elif op == "merge_with_next":
                merged_ids = [d.draft_id for d in ds.drafts]
                draft = ds.merge_with_next(draft_id)
                touched = [draft]
                removed = [i for i in merged_ids if all(d.draft_id != i for d in ds.drafts)]
            elif op == "retime":
                touched = [ds.retime(draft_id, int(_required(edit.get("word_index"), "word_index")),
                                     int(_required(edit.get("start_ms"), "start_ms")),
                                     int(_required(edit.get("end_ms"), "end_ms")))]
            elif op == "set_text":
                touched = [ds.set_text(draft_id, int(_required(edit.get("word_index"), "word_index")),
                                       str(_required(edit.get("text"), "text")))]
            elif op == "finalize":
                touched = [ds.finalize(draft_id)]
            else:
                raise CharonetteError(f"unknown draft operation {op!r}", field="op")

            result: dict = {"drafts": [], "removed": removed}
            for draft in touched:
                key = f"draft/{draft.draft_id}"
                if key in view.revisions:
                    expected = expected_revision if draft.draft_id == draft_id else view.revisions[key]
                else:
                    expected = 0  # new draft produced by a split
                rev = self.store.put(corpus, doc, "draft", draft.draft_id,
                                     draft_to_payload(draft), expected)
                result["drafts"].append({"draft_id": draft.draft_id, "revision": rev})
            for gone in removed:
                self.store.delete(corpus, doc, "draft", gone, view.revisions[f"draft/{gone}"])
            if op == "finalize":
                draft = touched[0]
                sentence_id = self.store.next_id(corpus, doc, "sentence")
                self.store.put(corpus, doc, "sentence", sentence_id, {
                    "text": draft.text,
                    "start_ms": draft.start_ms,
                    "end_ms": draft.end_ms,
                }, 0)
                result["sentence_id"] = sentence_id
            return result

    # -- export / import ------------------------------------------------------------------

    def export_document(self, corpus: str, doc: str) -> bytes:
        from .export_xml import export_view

        return export_view(self.load_view(corpus, doc))

    def import_document(self, corpus: str, xml_bytes: bytes) -> str:
        from .export_xml import parse_document

        view = parse_document(xml_bytes, self.lexicon)
        with self._doc_lock(corpus, view.doc_id):
            self._require_new_doc(corpus, view.doc_id)
            doc = view.doc_id
            self.store.put(corpus, doc, "meta", 0, {
                "mode": view.mode,
                "media": view.media,
                "width": view.width,
                "height": view.height,
                "fps": view.fps,
                "frame_count": view.frame_count,
                "first_object_id": view.first_object_id,
                "source_corpus": corpus,
            }, 0)
            for s in view.sentences:
                self.store.put(corpus, doc, "sentence", s.sentence_id, {
                    "text": s.text, "start_ms": s.start_ms, "end_ms": s.end_ms}, 0)
            for obj in view.objects:
                self.store.put(corpus, doc, "object", obj.object_id,
                               object_to_payload(obj), 0)
            for aset in view.annotation_sets:
                self.store.put(corpus, doc, "annotation_set", aset.as_id,
                               aset_to_payload(aset), 0)
            for ia in view.object_annotations:
                self.store.put(corpus, doc, "object_annotation", ia.ia_id, {
                    "object_ref": ia.object_ref,
                    "frame": ia.frame_id,
                    "fe": ia.fe,
                    "cv_name": ia.cv_name,
                    "provenance": ia.provenance,
                }, 0)
            for i, corr in enumerate(view.correlations, start=1):
                self.store.put(corpus, doc, "correlation", i, {
                    "object_ref": corr.object_ref,
                    "sentence_ref": corr.sentence_ref,
                    "start": corr.start,
                    "end": corr.end,
                }, 0)
        return view.doc_id

    # -- JSON views -----------------------------------------------------------------------

    def document_json(self, corpus: str, doc: str) -> dict:
        view = self.load_view(corpus, doc)
        return {
            "doc_id": view.doc_id,
            "mode": view.mode,
            "media": view.media,
            "width": view.width,
            "height": view.height,
            "fps": view.fps,
            "frame_count": view.frame_count,
            "revisions": view.revisions,
            "sentences": [
                {"id": s.sentence_id, "text": s.text, "start_ms": s.start_ms, "end_ms": s.end_ms}
                for s in view.sentences
            ],
            "objects": [
                {
                    "id": o.object_id,
                    "origin": o.track.origin,
                    "state": o.track.state,
                    "entity_type": o.entity_type,
                    "cv_suggestion": o.cv_suggestion,
                    "segments": [
                        {
                            "start": seg.start_frame,
                            "end": seg.end_frame,
                            "keyframes": {str(k): _box_to_list(b)
                                          for k, b in sorted(seg.keyframes.items())},
                        }
                        for seg in o.track.segments
                    ],
                    "labels": {str(k): v for k, v in sorted(o.keyframe_labels.items())},
                }
                for o in view.objects
            ],
            "annotation_sets": [
                {
                    "id": a.as_id,
                    "sentence_ref": a.sentence_ref,
                    "target_start": a.target_start,
                    "target_end": a.target_end,
                    "frame": a.frame_id,
                    "layers": {
                        name: [{"start": lab.start, "end": lab.end, "label": lab.label}
                               for lab in labels]
                        for name, labels in a.layers.items()
                    },
                    "ni": [{"fe": n.fe, "type": n.ni_type} for n in a.ni_entries],
                }
                for a in view.annotation_sets
            ],
            "object_annotations": [
                {
                    "id": a.ia_id,
                    "object_ref": a.object_ref,
                    "frame": a.frame_id,
                    "fe": a.fe,
                    "cv_name": a.cv_name,
                    "provenance": a.provenance,
                }
                for a in view.object_annotations
            ],
            "correlations": [
                {"object_ref": c.object_ref, "sentence_ref": c.sentence_ref,
                 "start": c.start, "end": c.end}
                for c in view.correlations
            ],
            "drafts": [
                {
                    "id": d.draft_id,
                    "status": d.status,
                    "text": d.text,
                    "start_ms": d.start_ms,
                    "end_ms": d.end_ms,
                    "words": [
                        {"text": w.text, "start_ms": w.start_ms, "end_ms": w.end_ms,
                         "source": w.source}
                        for w in d.words
                    ],
                }
                for d in view.drafts
            ],
            "detections": view.detections,
            "candidates": [
                {
                    "sentence_ref": c.sentence_ref,
                    "start": c.start,
                    "end": c.end,
                    "lemma": c.lemma,
                    "pos": c.pos,
                    "frames": list(c.candidate_frames),
                    "chosen": c.chosen_frame,
                    "score": c.score,
                    "provenance": c.provenance,
                }
                for c in view.candidates
            ],
        }


def _required(value, name: str):
    if value is None:
        raise CharonetteError(f"missing required field {name!r}", field=name)
    return value
