"""Automatic pre-annotation ahead of human review.

Targets are found by tokenizing a sentence (whitespace + punctuation), case
folding each token and resolving it through the lexicon's wordform table;
every token whose resolved lemma has at least one lexical unit becomes a
TargetCandidate. A candidate's frame is then chosen by a deterministic
baseline scorer that rewards frames connected by a single relation edge to
candidate frames of the sentence's other targets. The scorer sits behind the
Disambiguator protocol so a stronger implementation can be swapped in.

Computer-vision class labels are mapped to noun LUs by lowercasing and naive
singularization; ambiguous or unknown labels stay unmapped for the human
pass.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from typing import Protocol

from .lexicon import Lexicon

_TOKEN_RE = re.compile(r"\w+", re.UNICODE)


@dataclass(frozen=True)
class TargetCandidate:
    sentence_ref: int
    start: int
    end: int
    lemma: str
    pos: str
    candidate_frames: tuple[str, ...]  # frame ids, sorted by name
    chosen_frame: str | None = None
    score: float | None = None
    provenance: str = "auto"

    @property
    def span(self) -> tuple[int, int]:
        return (self.start, self.end)


@dataclass(frozen=True)
class CvClassMapping:
    class_label: str
    lu_ref: str | None
    status: str  # "mapped" | "unmapped"


def identify_targets(sentence: str, lex: Lexicon, sentence_ref: int = 0) -> list[TargetCandidate]:
    """One candidate per token whose wordform-resolved lemma evokes a frame."""
    candidates = []
    for match in _TOKEN_RE.finditer(sentence):
        token = match.group(0)
        frames: set[str] = set()
        lemma = pos = None
        for entry in lex.resolve_wordform(token):
            if not entry.evoking:
                continue
            lus = lex.lus_by_lemma(entry.lemma, entry.pos)
            if lus and lemma is None:
                lemma, pos = entry.lemma, entry.pos
            frames.update(lu.frame_id for lu in lus)
        if frames:
            candidates.append(
                TargetCandidate(
                    sentence_ref=sentence_ref,
                    start=match.start(),
                    end=match.end(),
                    lemma=lemma,
                    pos=pos,
                    candidate_frames=tuple(sorted(frames)),
                )
            )
    return candidates


def relation_link_count(lex: Lexicon, frame_a: str, frame_b: str) -> int:
    """Number of single relation edges joining two frames, either direction."""
    count = 0
    for rel in lex.relations:
        if {rel.parent, rel.child} == {frame_a, frame_b}:
            count += 1
    return count


class Disambiguator(Protocol):
    def disambiguate(self, candidates: list[TargetCandidate], lex: Lexicon) -> list[TargetCandidate]:
        ...


class RelationAdjacencyDisambiguator:
    """Baseline scorer over the frame-relation graph.

    A single-candidate target scores 1 for its only frame. Otherwise each
    candidate frame scores the count of one-edge relation links between it
    and any candidate frame of any other target in the sentence, normalized
    by the largest count for that target; ties fall to the lexicographically
    smallest frame name.
    """

    def disambiguate(self, candidates: list[TargetCandidate], lex: Lexicon) -> list[TargetCandidate]:
        resolved = []
        for i, cand in enumerate(candidates):
            if len(cand.candidate_frames) == 1:
                resolved.append(replace(cand, chosen_frame=cand.candidate_frames[0], score=1.0))
                continue
            other_frames = [
                frame
                for j, other in enumerate(candidates)
                if j != i
                for frame in other.candidate_frames
            ]
            counts = {
                frame: sum(relation_link_count(lex, frame, g) for g in other_frames)
                for frame in cand.candidate_frames
            }
            max_count = max(counts.values())
            scores = {
                frame: (count / max_count if max_count else 0.0)
                for frame, count in counts.items()
            }
            chosen = min(cand.candidate_frames, key=lambda f: (-scores[f], f))
            resolved.append(replace(cand, chosen_frame=chosen, score=scores[chosen]))
        return resolved


def disambiguate(candidates: list[TargetCandidate], lex: Lexicon) -> list[TargetCandidate]:
    return RelationAdjacencyDisambiguator().disambiguate(candidates, lex)


def _singularize(label: str) -> str:
    if label.endswith("ies") and len(label) > 3:
        return label[:-3] + "y"
    if label.endswith(("ses", "xes", "zes", "ches", "shes")):
        return label[:-2]
    if label.endswith("s") and not label.endswith("ss"):
        return label[:-1]
    return label


def map_cv_class_to_lu(class_label: str, lex: Lexicon, language: str | None = None) -> CvClassMapping:
    """Resolve a detector class label to a noun LU; exactly one match maps."""
    normalized = class_label.strip().casefold()
    for lemma in dict.fromkeys([normalized, _singularize(normalized)]):
        lus = [
            lu
            for lu in lex.lus_by_lemma(lemma, "n")
            if language is None or lu.language == language
        ]
        if len(lus) == 1:
            return CvClassMapping(class_label, lus[0].id, "mapped")
        if len(lus) > 1:
            return CvClassMapping(class_label, None, "unmapped")
    return CvClassMapping(class_label, None, "unmapped")
