"""Canonical XML export and its round-trip parser.

The document format (version 1) has root ``charonCorpusDoc`` with children
``sentence``, ``annotationSet`` (with ``layer``/``label`` and ``ni``
children), ``object`` (with ``segment``/``keyframe``), ``objectAnnotation``
and ``correlation``. Serialization is canonical: fixed attribute order,
elements sorted by id, two-space indent, UTF-8, LF line endings, so exports
of identical stores are byte-identical and export(import(x)) == x for
canonical input. Optional attributes are omitted entirely when absent.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET

from . import annotations as ann
from .documents import DocumentView, SentenceRecord, StoredObject
from .errors import CharonetteError
from .geometry import BoxGeometry
from .lexicon import Lexicon
from .tracking import ObjectTrack, TrackSegment

FORMAT_VERSION = "1"


class ExportFormatError(CharonetteError):
    code = "export_format"
    status = 400


class ImportValidationError(CharonetteError):
    code = "import_validation"
    status = 422


def _escape(value: str) -> str:
    return (
        value.replace("&", "&amp;")
        .replace("<", "&lt;")
        .replace(">", "&gt;")
        .replace('"', "&quot;")
        .replace("\n", "&#10;")
        .replace("\t", "&#9;")
    )


class _Writer:
    def __init__(self):
        self.lines: list[str] = ['<?xml version="1.0" encoding="UTF-8"?>']
        self.depth = 0

    def open(self, tag: str, attrs: list[tuple[str, str]], self_close: bool = False):
        body = " ".join(f'{k}="{_escape(v)}"' for k, v in attrs)
        pad = "  " * self.depth
        if self_close:
            self.lines.append(f"{pad}<{tag} {body}/>" if body else f"{pad}<{tag}/>")
        else:
            self.lines.append(f"{pad}<{tag} {body}>" if body else f"{pad}<{tag}>")
            self.depth += 1

    def close(self, tag: str):
        self.depth -= 1
        self.lines.append(f"{'  ' * self.depth}</{tag}>")

    def bytes(self) -> bytes:
        return ("\n".join(self.lines) + "\n").encode("utf-8")


def export_view(view: DocumentView) -> bytes:
    w = _Writer()
    root_attrs = [
        ("version", FORMAT_VERSION),
        ("docId", view.doc_id),
        ("mode", view.mode),
        ("media", view.media),
    ]
    for key, value in (
        ("width", view.width),
        ("height", view.height),
        ("fps", view.fps),
        ("frameCount", view.frame_count),
    ):
        if value is not None:
            root_attrs.append((key, str(value)))
    if view.first_object_id != 1:
        root_attrs.append(("firstObjectId", str(view.first_object_id)))
    w.open("charonCorpusDoc", root_attrs)

    for s in sorted(view.sentences, key=lambda s: s.sentence_id):
        w.open("sentence", [
            ("id", str(s.sentence_id)),
            ("startMs", str(s.start_ms)),
            ("endMs", str(s.end_ms)),
            ("text", s.text),
        ], self_close=True)

    for aset in sorted(view.annotation_sets, key=lambda a: a.as_id):
        w.open("annotationSet", [
            ("id", str(aset.as_id)),
            ("sentenceRef", str(aset.sentence_ref)),
            ("targetStart", str(aset.target_start)),
            ("targetEnd", str(aset.target_end)),
            ("frame", aset.frame_id),
        ])
        for layer in ann.LAYER_NAMES:
            labels = aset.layers.get(layer, [])
            if not labels:
                continue
            w.open("layer", [("name", layer)])
            for lab in sorted(labels, key=lambda x: (x.start, x.end)):
                w.open("label", [
                    ("start", str(lab.start)),
                    ("end", str(lab.end)),
                    ("name", lab.label),
                ], self_close=True)
            w.close("layer")
        for entry in sorted(aset.ni_entries, key=lambda n: n.fe):
            w.open("ni", [("fe", entry.fe), ("type", entry.ni_type)], self_close=True)
        w.close("annotationSet")

    for obj in sorted(view.objects, key=lambda o: o.object_id):
        attrs = [
            ("id", str(obj.object_id)),
            ("origin", obj.track.origin),
            ("state", obj.track.state),
        ]
        if obj.entity_type:
            attrs.append(("type", obj.entity_type))
        if obj.cv_suggestion:
            attrs.append(("cvSuggestion", obj.cv_suggestion))
        w.open("object", attrs)
        for seg in obj.track.segments:
            w.open("segment", [("start", str(seg.start_frame)), ("end", str(seg.end_frame))])
            for frame in sorted(seg.keyframes):
                box = seg.keyframes[frame]
                kf_attrs = [
                    ("frame", str(frame)),
                    ("xmin", str(box.xmin)),
                    ("ymin", str(box.ymin)),
                    ("xmax", str(box.xmax)),
                    ("ymax", str(box.ymax)),
                ]
                label = obj.keyframe_labels.get(frame)
                if label:
                    kf_attrs.append(("label", label))
                w.open("keyframe", kf_attrs, self_close=True)
            w.close("segment")
        w.close("object")

    for ia in sorted(view.object_annotations, key=lambda a: a.ia_id):
        attrs = [
            ("objectRef", str(ia.object_ref)),
            ("frame", ia.frame_id),
            ("fe", ia.fe),
        ]
        if ia.cv_name:
            attrs.append(("cvLU", ia.cv_name))
        attrs.append(("provenance", ia.provenance))
        w.open("objectAnnotation", attrs, self_close=True)

    for corr in view.correlations:
        w.open("correlation", [
            ("objectRef", str(corr.object_ref)),
            ("sentenceRef", str(corr.sentence_ref)),
            ("start", str(corr.start)),
            ("end", str(corr.end)),
        ], self_close=True)

    w.close("charonCorpusDoc")
    return w.bytes()


# -- parsing ------------------------------------------------------------------


def _attr(el: ET.Element, name: str, path: str) -> str:
    value = el.get(name)
    if value is None:
        raise ExportFormatError(f"{path}: missing attribute {name!r}")
    return value


def _int_attr(el: ET.Element, name: str, path: str) -> int:
    try:
        return int(_attr(el, name, path))
    except ValueError as exc:
        raise ExportFormatError(f"{path}: attribute {name!r} is not an integer") from exc


def parse_document(xml_bytes: bytes, lex: Lexicon) -> DocumentView:
    """Parse and fully validate an exported document.

    Annotation content is re-validated against the lexicon through the same
    rules the live operations use, so invalid files cannot enter the store.
    """
    try:
        root = ET.fromstring(xml_bytes)
    except ET.ParseError as exc:
        raise ExportFormatError(f"not well-formed XML: {exc}") from exc
    if root.tag != "charonCorpusDoc":
        raise ExportFormatError(f"unexpected root element {root.tag!r}")
    if root.get("version") != FORMAT_VERSION:
        raise ExportFormatError(f"unsupported format version {root.get('version')!r}")

    mode = _attr(root, "mode", "charonCorpusDoc")
    if mode not in ("static", "video"):
        raise ExportFormatError(f"unknown mode {mode!r}")
    view = DocumentView(
        doc_id=_attr(root, "docId", "charonCorpusDoc"),
        mode=mode,
        media=root.get("media", ""),
        width=int(root.get("width")) if root.get("width") else None,
        height=int(root.get("height")) if root.get("height") else None,
        fps=int(root.get("fps")) if root.get("fps") else None,
        frame_count=int(root.get("frameCount")) if root.get("frameCount") else None,
        first_object_id=int(root.get("firstObjectId", "1")),
    )

    for el in root.findall("sentence"):
        path = f"sentence[{el.get('id')}]"
        view.sentences.append(SentenceRecord(
            sentence_id=_int_attr(el, "id", path),
            text=_attr(el, "text", path),
            start_ms=_int_attr(el, "startMs", path),
            end_ms=_int_attr(el, "endMs", path),
        ))
    sentences_by_id = {s.sentence_id: s for s in view.sentences}

    for el in root.findall("object"):
        path = f"object[{el.get('id')}]"
        object_id = _int_attr(el, "id", path)
        segments = []
        labels: dict[int, str] = {}
        for seg_el in el.findall("segment"):
            keyframes: dict[int, BoxGeometry] = {}
            for kf in seg_el.findall("keyframe"):
                frame = _int_attr(kf, "frame", path)
                keyframes[frame] = BoxGeometry(
                    _int_attr(kf, "xmin", path),
                    _int_attr(kf, "ymin", path),
                    _int_attr(kf, "xmax", path),
                    _int_attr(kf, "ymax", path),
                )
                if kf.get("label"):
                    labels[frame] = kf.get("label")
            segments.append(TrackSegment(
                start_frame=_int_attr(seg_el, "start", path),
                end_frame=_int_attr(seg_el, "end", path),
                keyframes=keyframes,
            ))
        track = ObjectTrack(
            object_id=object_id,
            origin=_attr(el, "origin", path),
            state=el.get("state", "ended"),
            segments=segments,
        )
        try:
            track.check_invariants()
        except AssertionError as exc:
            raise ImportValidationError(f"{path}: {exc}") from exc
        view.objects.append(StoredObject(
            track=track,
            entity_type=el.get("type", ""),
            keyframe_labels=labels,
            cv_suggestion=el.get("cvSuggestion"),
        ))
    object_ids = {o.object_id for o in view.objects}

    for el in root.findall("annotationSet"):
        as_id = _int_attr(el, "id", f"annotationSet[{el.get('id')}]")
        path = f"annotationSet[{as_id}]"
        sentence_ref = _int_attr(el, "sentenceRef", path)
        sentence = sentences_by_id.get(sentence_ref)
        if sentence is None:
            raise ImportValidationError(f"{path}: dangling sentenceRef {sentence_ref}")
        try:
            aset = ann.create_text_as(
                lex, sentence.text, sentence_ref,
                _int_attr(el, "targetStart", path),
                _int_attr(el, "targetEnd", path),
                _attr(el, "frame", path), as_id,
            )
            for layer_el in el.findall("layer"):
                layer = _attr(layer_el, "name", path)
                for lab in layer_el.findall("label"):
                    ann.set_layer_label(
                        lex, sentence.text, aset, layer,
                        _int_attr(lab, "start", path),
                        _int_attr(lab, "end", path),
                        _attr(lab, "name", path),
                    )
            for ni_el in el.findall("ni"):
                ann.mark_ni(lex, aset, _attr(ni_el, "fe", path), _attr(ni_el, "type", path))
        except ann.AnnotationError as exc:
            raise ImportValidationError(f"{path}: {exc}") from exc
        view.annotation_sets.append(aset)

    for i, el in enumerate(root.findall("objectAnnotation"), start=1):
        path = f"objectAnnotation[{i}]"
        object_ref = _int_attr(el, "objectRef", path)
        if object_ref not in object_ids:
            raise ImportValidationError(f"{path}: dangling objectRef {object_ref}")
        try:
            view.object_annotations.append(ann.annotate_image_target(
                lex, object_ref,
                _attr(el, "frame", path),
                _attr(el, "fe", path),
                el.get("cvLU"),
                ia_id=i,
                provenance=el.get("provenance", "human"),
            ))
        except ann.AnnotationError as exc:
            raise ImportValidationError(f"{path}: {exc}") from exc

    for i, el in enumerate(root.findall("correlation"), start=1):
        path = f"correlation[{i}]"
        object_ref = _int_attr(el, "objectRef", path)
        sentence_ref = _int_attr(el, "sentenceRef", path)
        if object_ref not in object_ids:
            raise ImportValidationError(f"{path}: dangling objectRef {object_ref}")
        sentence = sentences_by_id.get(sentence_ref)
        if sentence is None:
            raise ImportValidationError(f"{path}: dangling sentenceRef {sentence_ref}")
        try:
            view.correlations.append(ann.correlate(
                sentence.text, object_ref, sentence_ref,
                _int_attr(el, "start", path), _int_attr(el, "end", path),
            ))
        except ann.AnnotationError as exc:
            raise ImportValidationError(f"{path}: {exc}") from exc

    return view
