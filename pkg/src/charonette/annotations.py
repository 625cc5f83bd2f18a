"""Annotation sets and their validation rules.

Text targets get a TextAnnotationSet holding the FE / GF / PT layers plus
null-instantiation entries for core FEs that are inferable but unexpressed.
Visual targets (a static entity chain or a video object track, both addressed
by object id) get ImageAnnotations pairing a frame with one of its FEs and,
optionally, a noun LU as the object's computer-vision name.

Every mutation re-validates against the lexicon and the target sentence, so
no stored annotation can violate an invariant. Char spans are 0-based,
start-inclusive / end-exclusive, counted in Unicode scalar values.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import CharonetteError
from .lexicon import Lexicon

LAYER_NAMES = ("FE", "GF", "PT")


class AnnotationError(CharonetteError):
    status = 422
    code = "annotation_invalid"


class UnknownFrameError(AnnotationError):
    code = "unknown_frame"


class BadSpanError(AnnotationError):
    code = "bad_span"


class UnknownLayerError(AnnotationError):
    code = "unknown_layer"


class InvalidLabelError(AnnotationError):
    code = "invalid_label"


class LayerOverlapError(AnnotationError):
    code = "layer_overlap"


class FeNotInFrameError(AnnotationError):
    code = "fe_not_in_frame"


class NiError(AnnotationError):
    code = "ni_invalid"


class CvNameError(AnnotationError):
    code = "cv_name_not_noun"


@dataclass(frozen=True)
class LayerLabel:
    start: int
    end: int
    label: str


@dataclass(frozen=True)
class NiEntry:
    fe: str  # core FE name of the AS frame
    ni_type: str


@dataclass
class TextAnnotationSet:
    as_id: int
    sentence_ref: int
    target_start: int
    target_end: int
    frame_id: str
    layers: dict[str, list[LayerLabel]] = field(default_factory=lambda: {n: [] for n in LAYER_NAMES})
    ni_entries: list[NiEntry] = field(default_factory=list)

    def fe_layer_labels(self) -> set[str]:
        return {lab.label for lab in self.layers.get("FE", [])}


@dataclass
class ImageAnnotation:
    ia_id: int
    object_ref: int
    frame_id: str
    fe: str  # FE name within frame_id
    cv_name: str | None = None  # LU id
    provenance: str = "human"


@dataclass(frozen=True)
class Correlation:
    object_ref: int
    sentence_ref: int
    start: int
    end: int


def _check_span(start: int, end: int, sentence_text: str) -> None:
    if not (0 <= start < end <= len(sentence_text)):
        raise BadSpanError(
            f"span [{start}, {end}) outside sentence of length {len(sentence_text)}"
        )


def create_text_as(
    lex: Lexicon,
    sentence_text: str,
    sentence_ref: int,
    target_start: int,
    target_end: int,
    frame_name: str,
    as_id: int,
) -> TextAnnotationSet:
    """New annotation set with empty layers for one text target."""
    if lex.frame_by_name(frame_name) is None:
        raise UnknownFrameError(f"unknown frame {frame_name!r}", field="frame")
    _check_span(target_start, target_end, sentence_text)
    return TextAnnotationSet(
        as_id=as_id,
        sentence_ref=sentence_ref,
        target_start=target_start,
        target_end=target_end,
        frame_id=frame_name,
    )


def set_layer_label(
    lex: Lexicon,
    sentence_text: str,
    annotation_set: TextAnnotationSet,
    layer: str,
    start: int,
    end: int,
    label: str,
) -> TextAnnotationSet:
    """Record a label on one of the FE / GF / PT layers.

    FE labels must name an FE of the set's frame; GF and PT labels come from
    the lexicon vocabularies; spans within a layer must not overlap.
    """
    if layer not in LAYER_NAMES:
        raise UnknownLayerError(f"unknown layer {layer!r}", field="layer")
    _check_span(start, end, sentence_text)
    if layer == "FE":
        if lex.fe_of_frame(annotation_set.frame_id, label) is None:
            raise FeNotInFrameError(
                f"{label!r} is not an FE of frame {annotation_set.frame_id!r}", field="label"
            )
        if any(n.fe == label for n in annotation_set.ni_entries):
            raise NiError(f"FE {label!r} is already marked as null-instantiated")
    elif layer == "GF":
        if label not in lex.gf_values:
            raise InvalidLabelError(f"{label!r} is not a grammatical function", field="label")
    else:
        if label not in lex.pt_values:
            raise InvalidLabelError(f"{label!r} is not a phrase type", field="label")
    for existing in annotation_set.layers[layer]:
        if start < existing.end and end > existing.start:
            raise LayerOverlapError(
                f"span [{start}, {end}) overlaps [{existing.start}, {existing.end}) in layer {layer}"
            )
    annotation_set.layers[layer].append(LayerLabel(start, end, label))
    annotation_set.layers[layer].sort(key=lambda lab: (lab.start, lab.end))
    return annotation_set


def mark_ni(
    lex: Lexicon,
    annotation_set: TextAnnotationSet,
    fe_name: str,
    ni_type: str,
) -> TextAnnotationSet:
    """Mark a core FE of the set's frame as null-instantiated.

    Only core FEs that are not labeled in the FE layer qualify.
    """
    fe = lex.fe_of_frame(annotation_set.frame_id, fe_name)
    if fe is None:
        raise FeNotInFrameError(
            f"{fe_name!r} is not an FE of frame {annotation_set.frame_id!r}", field="fe"
        )
    if fe.coreness != "core":
        raise NiError(f"FE {fe_name!r} is not core and cannot be null-instantiated")
    if fe_name in annotation_set.fe_layer_labels():
        raise NiError(f"FE {fe_name!r} is already labeled in the FE layer")
    if any(n.fe == fe_name for n in annotation_set.ni_entries):
        raise NiError(f"FE {fe_name!r} is already marked as null-instantiated")
    if ni_type not in lex.ni_types:
        raise NiError(f"unknown null-instantiation type {ni_type!r}", field="ni_type")
    annotation_set.ni_entries.append(NiEntry(fe_name, ni_type))
    annotation_set.ni_entries.sort(key=lambda n: n.fe)
    return annotation_set


def annotate_image_target(
    lex: Lexicon,
    object_ref: int,
    frame_name: str,
    fe_name: str,
    cv_name: str | None,
    ia_id: int,
    provenance: str = "human",
) -> ImageAnnotation:
    """Attach a frame + FE (and optionally a CV-name LU) to a visual object."""
    if lex.frame_by_name(frame_name) is None:
        raise UnknownFrameError(f"unknown frame {frame_name!r}", field="frame")
    if lex.fe_of_frame(frame_name, fe_name) is None:
        raise FeNotInFrameError(
            f"{fe_name!r} is not an FE of frame {frame_name!r}", field="fe"
        )
    if cv_name is not None:
        lu = lex.lu(cv_name)
        if lu.pos != "n":
            raise CvNameError(f"CV name {cv_name!r} is not a noun LU", field="cv_name")
    return ImageAnnotation(
        ia_id=ia_id,
        object_ref=object_ref,
        frame_id=frame_name,
        fe=fe_name,
        cv_name=cv_name,
        provenance=provenance,
    )


def correlate(
    sentence_text: str,
    object_ref: int,
    sentence_ref: int,
    start: int,
    end: int,
) -> Correlation:
    """Link a visual object to the sentence phrase that co-refers with it."""
    _check_span(start, end, sentence_text)
    return Correlation(object_ref, sentence_ref, start, end)


def sweep_validate(lex: Lexicon, sentences: dict[int, str],
                   annotation_sets: list[TextAnnotationSet],
                   image_annotations: list[ImageAnnotation],
                   known_objects: set[int]) -> list[str]:
    """Whole-store consistency check; returns a list of violations (empty
    when the store is clean). Used by tests and the export path."""
    problems = []
    for aset in annotation_sets:
        text = sentences.get(aset.sentence_ref)
        if text is None:
            problems.append(f"AS {aset.as_id}: dangling sentence {aset.sentence_ref}")
            continue
        if not (0 <= aset.target_start < aset.target_end <= len(text)):
            problems.append(f"AS {aset.as_id}: bad target span")
        if lex.frame_by_name(aset.frame_id) is None:
            problems.append(f"AS {aset.as_id}: unknown frame {aset.frame_id}")
            continue
        for layer, labels in aset.layers.items():
            ordered = sorted(labels, key=lambda lab: (lab.start, lab.end))
            for prev, nxt in zip(ordered, ordered[1:]):
                if nxt.start < prev.end:
                    problems.append(f"AS {aset.as_id}: overlap in layer {layer}")
            if layer == "FE":
                for lab in labels:
                    if lex.fe_of_frame(aset.frame_id, lab.label) is None:
                        problems.append(f"AS {aset.as_id}: FE {lab.label} not in frame")
        labeled = aset.fe_layer_labels()
        for entry in aset.ni_entries:
            fe = lex.fe_of_frame(aset.frame_id, entry.fe)
            if fe is None or fe.coreness != "core":
                problems.append(f"AS {aset.as_id}: NI on non-core FE {entry.fe}")
            if entry.fe in labeled:
                problems.append(f"AS {aset.as_id}: NI on labeled FE {entry.fe}")
    for ia in image_annotations:
        if ia.object_ref not in known_objects:
            problems.append(f"annotation {ia.ia_id}: dangling object {ia.object_ref}")
        if lex.fe_of_frame(ia.frame_id, ia.fe) is None:
            problems.append(f"annotation {ia.ia_id}: FE {ia.fe} not in frame {ia.frame_id}")
    return problems
