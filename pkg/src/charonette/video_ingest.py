"""Time-stamped verbal material for video documents.

Speech transcripts and OCR subtitles arrive as tab-separated files produced
by external services; this module merges them into one word stream, cuts the
stream into sentence drafts at long pauses, and lets a human reshape the
drafts (split, merge, retime, edit, finalize) before they become corpus
sentences. It also owns the canonical time <-> frame-number conversion and
ingestion of per-frame object detections.

Times are integer milliseconds throughout; display layers convert to seconds.
"""

from __future__ import annotations

import csv
import io
import re
from dataclasses import dataclass, field, replace

from .errors import CharonetteError, NotFoundError
from .geometry import BoxGeometry

DEFAULT_FPS = 25
PAUSE_THRESHOLD_MS = 700
SUBTITLE_DUPLICATE_JACCARD = 0.8


class StreamError(CharonetteError):
    code = "stream_invalid"
    status = 422


class DraftError(CharonetteError):
    code = "draft_invalid"
    status = 422


class DraftFinalizedError(CharonetteError):
    code = "draft_finalized"
    status = 409


class DetectionFileError(CharonetteError):
    code = "detections_invalid"
    status = 422


# -- frame stamps ---------------------------------------------------------------


def time_to_frame(time_ms: int, fps: int = DEFAULT_FPS) -> int:
    if time_ms < 0:
        raise StreamError(f"negative time {time_ms}")
    return time_ms * fps // 1000


def frame_to_time(frame_index: int, fps: int = DEFAULT_FPS) -> int:
    """First millisecond belonging to a frame; 40 ms per frame at 25 fps."""
    if frame_index < 0:
        raise StreamError(f"negative frame index {frame_index}")
    return (frame_index * 1000 + fps - 1) // fps


@dataclass(frozen=True)
class FrameStamp:
    frame_index: int
    time_ms: int
    fps: int = DEFAULT_FPS

    @classmethod
    def of_time(cls, time_ms: int, fps: int = DEFAULT_FPS) -> "FrameStamp":
        return cls(time_to_frame(time_ms, fps), time_ms, fps)

    @classmethod
    def of_frame(cls, frame_index: int, fps: int = DEFAULT_FPS) -> "FrameStamp":
        return cls(frame_index, frame_to_time(frame_index, fps), fps)


# -- words, subtitles, merging ----------------------------------------------------


@dataclass(frozen=True)
class TranscriptWord:
    text: str
    start_ms: int
    end_ms: int
    source: str = "speech"  # "speech" | "subtitle"

    def __post_init__(self):
        if not (0 <= self.start_ms < self.end_ms):
            raise StreamError(f"bad word time span [{self.start_ms}, {self.end_ms})")


@dataclass(frozen=True)
class SubtitleLine:
    text: str
    start_ms: int
    end_ms: int

    def __post_init__(self):
        if not (0 <= self.start_ms < self.end_ms):
            raise StreamError(f"bad subtitle time span [{self.start_ms}, {self.end_ms})")


_NORM_RE = re.compile(r"\w+", re.UNICODE)


def _token_set(text: str) -> frozenset[str]:
    return frozenset(t.casefold() for t in _NORM_RE.findall(text))


def _jaccard(a: frozenset[str], b: frozenset[str]) -> float:
    union = a | b
    if not union:
        return 1.0
    return len(a & b) / len(union)


def _require_ordered(starts: list[int], label: str) -> None:
    for prev, nxt in zip(starts, starts[1:]):
        if nxt < prev:
            raise StreamError(f"{label} stream is not time-ordered")


def split_subtitle_line(line: SubtitleLine) -> list[TranscriptWord]:
    """Word-split a subtitle line, apportioning its duration proportionally
    to word character length (cumulative floor rule, so the last word ends
    exactly at the line end)."""
    words = line.text.split()
    if not words:
        return []
    duration = line.end_ms - line.start_ms
    if duration < len(words):
        raise StreamError(f"subtitle line too short to split: {line.text!r}")
    total_chars = sum(len(w) for w in words)
    out = []
    cursor = line.start_ms
    cum = 0
    for i, word in enumerate(words):
        cum += len(word)
        if i == len(words) - 1:
            boundary = line.end_ms
        else:
            boundary = line.start_ms + duration * cum // total_chars
            # keep every word at least 1 ms long, including the ones to come
            boundary = max(boundary, cursor + 1)
            boundary = min(boundary, line.end_ms - (len(words) - 1 - i))
        out.append(TranscriptWord(word, cursor, boundary, source="subtitle"))
        cursor = boundary
    return out


def merge_streams(
    speech: list[TranscriptWord],
    subtitles: list[SubtitleLine],
    duplicate_jaccard: float = SUBTITLE_DUPLICATE_JACCARD,
) -> list[TranscriptWord]:
    """Merge OCR subtitle lines into the speech word stream.

    A subtitle line that overlaps speech in time and repeats it almost
    verbatim (Jaccard similarity of normalized token sets >= the threshold)
    is dropped as a duplicate; every other line is word-split and inserted.
    Speech words pass through unchanged. Output is globally time-ordered.
    """
    _require_ordered([w.start_ms for w in speech], "speech")
    _require_ordered([s.start_ms for s in subtitles], "subtitle")

    merged = list(speech)
    for line in subtitles:
        overlapped = [
            w for w in speech if w.start_ms < line.end_ms and w.end_ms > line.start_ms
        ]
        if overlapped:
            speech_tokens = frozenset().union(*[_token_set(w.text) for w in overlapped])
            if _jaccard(_token_set(line.text), speech_tokens) >= duplicate_jaccard:
                continue  # duplicate of what was already transcribed
        merged.extend(split_subtitle_line(line))
    merged.sort(key=lambda w: (w.start_ms, w.end_ms, w.source, w.text))
    return merged


# -- sentence drafts ---------------------------------------------------------------


@dataclass
class SentenceDraft:
    draft_id: int
    words: list[TranscriptWord]
    status: str = "auto"  # "auto" | "human_edited" | "finalized"

    @property
    def text(self) -> str:
        return " ".join(w.text for w in self.words)

    @property
    def start_ms(self) -> int:
        return self.words[0].start_ms

    @property
    def end_ms(self) -> int:
        return self.words[-1].end_ms

    def check_invariants(self) -> None:
        if not self.words:
            raise DraftError(f"draft {self.draft_id} has no words")
        for prev, nxt in zip(self.words, self.words[1:]):
            if nxt.start_ms < prev.end_ms:
                raise DraftError(
                    f"draft {self.draft_id}: words overlap at {prev.end_ms}..{nxt.start_ms}"
                )


def segment_sentences(
    words: list[TranscriptWord], pause_threshold_ms: int = PAUSE_THRESHOLD_MS
) -> list[SentenceDraft]:
    """First-pass sentence segmentation: a new draft starts wherever the gap
    between consecutive words exceeds the pause threshold."""
    _require_ordered([w.start_ms for w in words], "word")
    drafts: list[SentenceDraft] = []
    current: list[TranscriptWord] = []
    for word in words:
        if current and word.start_ms - current[-1].end_ms > pause_threshold_ms:
            drafts.append(SentenceDraft(len(drafts) + 1, current))
            current = []
        current.append(word)
    if current:
        drafts.append(SentenceDraft(len(drafts) + 1, current))
    return drafts


class DraftSet:
    """Editable collection of sentence drafts for one video document.

    All edits mark the touched drafts human_edited; a finalized draft is
    immutable and ready to become a corpus sentence.
    """

    def __init__(self, drafts: list[SentenceDraft] | None = None):
        self.drafts: list[SentenceDraft] = list(drafts or [])

    def get(self, draft_id: int) -> SentenceDraft:
        for draft in self.drafts:
            if draft.draft_id == draft_id:
                return draft
        raise NotFoundError(f"unknown draft {draft_id}", field="draft_id")

    def _next_id(self) -> int:
        return max((d.draft_id for d in self.drafts), default=0) + 1

    def _editable(self, draft_id: int) -> SentenceDraft:
        draft = self.get(draft_id)
        if draft.status == "finalized":
            raise DraftFinalizedError(f"draft {draft_id} is finalized")
        return draft

    def split_at(self, draft_id: int, word_index: int) -> tuple[SentenceDraft, SentenceDraft]:
        draft = self._editable(draft_id)
        if not 0 < word_index < len(draft.words):
            raise DraftError(f"split index {word_index} out of range")
        tail = SentenceDraft(self._next_id(), draft.words[word_index:], "human_edited")
        draft.words = draft.words[:word_index]
        draft.status = "human_edited"
        self.drafts.insert(self.drafts.index(draft) + 1, tail)
        return draft, tail

    def merge_with_next(self, draft_id: int) -> SentenceDraft:
        draft = self._editable(draft_id)
        idx = self.drafts.index(draft)
        if idx + 1 >= len(self.drafts):
            raise DraftError(f"draft {draft_id} has no successor to merge with")
        nxt = self._editable(self.drafts[idx + 1].draft_id)
        draft.words = draft.words + nxt.words
        draft.status = "human_edited"
        draft.check_invariants()
        self.drafts.pop(idx + 1)
        return draft

    def retime(self, draft_id: int, word_index: int, new_start_ms: int, new_end_ms: int) -> SentenceDraft:
        draft = self._editable(draft_id)
        if not 0 <= word_index < len(draft.words):
            raise DraftError(f"word index {word_index} out of range")
        old = draft.words[word_index]
        candidate = replace(old, start_ms=new_start_ms, end_ms=new_end_ms)
        restore = draft.words[word_index]
        draft.words[word_index] = candidate
        try:
            draft.check_invariants()
        except DraftError:
            draft.words[word_index] = restore
            raise
        draft.status = "human_edited"
        return draft

    def set_text(self, draft_id: int, word_index: int, new_text: str) -> SentenceDraft:
        draft = self._editable(draft_id)
        if not 0 <= word_index < len(draft.words):
            raise DraftError(f"word index {word_index} out of range")
        if not new_text.strip():
            raise DraftError("word text cannot be empty")
        draft.words[word_index] = replace(draft.words[word_index], text=new_text)
        draft.status = "human_edited"
        return draft

    def finalize(self, draft_id: int) -> SentenceDraft:
        draft = self._editable(draft_id)
        draft.check_invariants()
        draft.status = "finalized"
        return draft


# -- detections ---------------------------------------------------------------------


@dataclass(frozen=True)
class Detection:
    det_id: int
    frame_index: int
    box: BoxGeometry
    class_label: str
    confidence: float


def ingest_detections(data: bytes, width: int, height: int) -> list[Detection]:
    """Parse a detection file (one tab-separated record per line:
    frame_index, class_label, confidence, xmin, ymin, xmax, ymax) and return
    validated detections sorted by (frame, confidence desc)."""
    rows = []
    reader = csv.reader(io.StringIO(data.decode("utf-8")), delimiter="\t")
    for lineno, row in enumerate(reader, start=1):
        if not row or (len(row) == 1 and not row[0].strip()) or row[0].lstrip().startswith("#"):
            continue
        if len(row) != 7:
            raise DetectionFileError(f"line {lineno}: expected 7 fields, got {len(row)}")
        try:
            frame_index = int(row[0])
            confidence = float(row[2])
            coords = [int(v) for v in row[3:7]]
        except ValueError as exc:
            raise DetectionFileError(f"line {lineno}: {exc}") from exc
        if frame_index < 0:
            raise DetectionFileError(f"line {lineno}: negative frame index")
        if not 0.0 <= confidence <= 1.0:
            raise DetectionFileError(f"line {lineno}: confidence {confidence} outside [0, 1]")
        box = BoxGeometry(*coords)
        if not box.well_formed(width, height):
            raise DetectionFileError(f"line {lineno}: box {box} out of bounds {width}x{height}")
        rows.append((frame_index, -confidence, row[1], box))
    rows.sort(key=lambda r: (r[0], r[1], r[2]))
    return [
        Detection(i + 1, frame_index, box, label, -neg_conf)
        for i, (frame_index, neg_conf, label, box) in enumerate(rows)
    ]


def parse_transcript_file(data: bytes) -> list[TranscriptWord]:
    """One word per line: start_ms, end_ms, text (tab-separated)."""
    return [
        TranscriptWord(text, start, end, source="speech")
        for start, end, text in _parse_timed_lines(data, "transcript")
    ]


def parse_subtitle_file(data: bytes) -> list[SubtitleLine]:
    """One line per subtitle: start_ms, end_ms, line text (tab-separated)."""
    return [SubtitleLine(text, start, end) for start, end, text in _parse_timed_lines(data, "subtitles")]


def _parse_timed_lines(data: bytes, label: str) -> list[tuple[int, int, str]]:
    out = []
    reader = csv.reader(io.StringIO(data.decode("utf-8")), delimiter="\t")
    for lineno, row in enumerate(reader, start=1):
        if not row or (len(row) == 1 and not row[0].strip()) or row[0].lstrip().startswith("#"):
            continue
        if len(row) < 3:
            raise StreamError(f"{label} line {lineno}: expected start, end, text")
        try:
            start, end = int(row[0]), int(row[1])
        except ValueError as exc:
            raise StreamError(f"{label} line {lineno}: {exc}") from exc
        text = "\t".join(row[2:])
        if not text.strip():
            raise StreamError(f"{label} line {lineno}: empty text")
        out.append((start, end, text))
    return out
