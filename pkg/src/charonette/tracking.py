"""Time-extended visual objects over video.

An ObjectTrack is a sequence of disjoint segments; each segment anchors one
or more keyframed boxes, placed either manually frame by frame or stretched
automatically. Between keyframes the box is linearly interpolated, after the
last keyframe it extrapolates as constant up to the segment end, and during
gaps between segments (pause/resume cut points) the object contributes no
box at all. The interpolating tracker sits behind the Tracker interface so a
vision-based tracker can replace it.

Lifecycle: tracking -> paused -> tracking (new segment) -> ended. Ended
tracks are immutable.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import CharonetteError, NotFoundError
from .geometry import BoxGeometry, interpolate_box, require_box
from .video_ingest import Detection


class TrackStateError(CharonetteError):
    code = "track_state"
    status = 409


class TrackRangeError(CharonetteError):
    code = "track_range"
    status = 422


class DetectionConsumedError(CharonetteError):
    code = "detection_consumed"
    status = 409


@dataclass
class TrackSegment:
    start_frame: int
    end_frame: int
    keyframes: dict[int, BoxGeometry] = field(default_factory=dict)

    def contains(self, frame_index: int) -> bool:
        return self.start_frame <= frame_index <= self.end_frame

    def box_at(self, frame_index: int) -> BoxGeometry | None:
        if not self.contains(frame_index):
            return None
        ordered = sorted(self.keyframes)
        exact = self.keyframes.get(frame_index)
        if exact is not None:
            return exact
        before = [k for k in ordered if k < frame_index]
        after = [k for k in ordered if k > frame_index]
        if before and after:
            k0, k1 = before[-1], after[0]
            t = (frame_index - k0) / (k1 - k0)
            return interpolate_box(self.keyframes[k0], self.keyframes[k1], t)
        if before:
            return self.keyframes[before[-1]]  # constant extrapolation to segment end
        return None  # unreachable for well-formed segments (start is a keyframe)


@dataclass
class ObjectTrack:
    object_id: int
    origin: str  # "detector" | "human"
    state: str = "tracking"  # "tracking" | "paused" | "ended"
    segments: list[TrackSegment] = field(default_factory=list)

    @property
    def last_segment(self) -> TrackSegment:
        return self.segments[-1]

    @property
    def last_keyframe(self) -> int:
        return max(self.last_segment.keyframes)

    def box_at_frame(self, frame_index: int) -> BoxGeometry | None:
        """Box geometry at a frame, or None outside every segment."""
        for segment in self.segments:
            if segment.contains(frame_index):
                return segment.box_at(frame_index)
        return None

    def check_invariants(self) -> None:
        # zero segments is legal only for imported phrase-only entities;
        # live video tracks always open with a keyframed segment
        for seg in self.segments:
            assert seg.keyframes, "segment without keyframes"
            assert seg.start_frame <= seg.end_frame
            assert all(seg.start_frame <= k <= seg.end_frame for k in seg.keyframes)
            assert seg.start_frame in seg.keyframes
        for prev, nxt in zip(self.segments, self.segments[1:]):
            assert prev.end_frame < nxt.start_frame, "segments overlap"


class Tracker:
    """Strategy for filling boxes between human keyframes."""

    def box_between(self, a_frame, a_box, b_frame, b_box, frame_index):
        raise NotImplementedError


class InterpolatingTracker(Tracker):
    def box_between(self, a_frame, a_box, b_frame, b_box, frame_index):
        t = (frame_index - a_frame) / (b_frame - a_frame)
        return interpolate_box(a_box, b_box, t)


class TrackSet:
    """All object tracks of one video document, plus id allocation and
    detection-consumption bookkeeping.

    object ids are unique and strictly increasing; the counter may be seeded
    (e.g. to continue a numbering scheme from an earlier session).
    """

    def __init__(self, width: int | None = None, height: int | None = None,
                 frame_count: int | None = None, first_object_id: int = 1):
        self.width = width
        self.height = height
        self.frame_count = frame_count
        self.first_object_id = first_object_id
        self.tracks: dict[int, ObjectTrack] = {}
        self.consumed_detections: set[int] = set()

    # -- helpers ---------------------------------------------------------

    def _next_object_id(self) -> int:
        return max(max(self.tracks, default=0) + 1, self.first_object_id)

    def _check_frame(self, frame_index: int) -> None:
        if frame_index < 0:
            raise TrackRangeError(f"negative frame index {frame_index}")
        if self.frame_count is not None and frame_index >= self.frame_count:
            raise TrackRangeError(
                f"frame {frame_index} beyond video length {self.frame_count}"
            )

    def get(self, object_id: int) -> ObjectTrack:
        track = self.tracks.get(object_id)
        if track is None:
            raise NotFoundError(f"unknown object {object_id}", field="object_id")
        return track

    def _tracking(self, object_id: int) -> ObjectTrack:
        track = self.get(object_id)
        if track.state != "tracking":
            raise TrackStateError(f"object {object_id} is {track.state}, not tracking")
        return track

    # -- lifecycle ---------------------------------------------------------

    def create_object(self, frame_index: int, box: BoxGeometry, origin: str = "human") -> ObjectTrack:
        self._check_frame(frame_index)
        require_box(box, self.width, self.height)
        track = ObjectTrack(
            object_id=self._next_object_id(),
            origin=origin,
            segments=[TrackSegment(frame_index, frame_index, {frame_index: box})],
        )
        self.tracks[track.object_id] = track
        return track

    def accept_detection(self, detection: Detection) -> ObjectTrack:
        if detection.det_id in self.consumed_detections:
            raise DetectionConsumedError(f"detection {detection.det_id} already accepted")
        track = self.create_object(detection.frame_index, detection.box, origin="detector")
        self.consumed_detections.add(detection.det_id)
        return track

    def set_keyframe(self, object_id: int, frame_index: int, box: BoxGeometry) -> ObjectTrack:
        track = self._tracking(object_id)
        self._check_frame(frame_index)
        require_box(box, self.width, self.height)
        segment = track.last_segment
        if frame_index < segment.start_frame:
            raise TrackRangeError(
                f"keyframe {frame_index} before segment start {segment.start_frame}"
            )
        segment.keyframes[frame_index] = box
        segment.end_frame = max(segment.end_frame, frame_index)
        return track

    def auto_track(self, object_id: int, until_frame: int) -> ObjectTrack:
        """Extend the current segment to until_frame without new keyframes;
        boxes come from interpolation/extrapolation at query time."""
        track = self._tracking(object_id)
        self._check_frame(until_frame)
        if until_frame <= track.last_keyframe:
            raise TrackRangeError(
                f"auto-track target {until_frame} not beyond last keyframe {track.last_keyframe}"
            )
        track.last_segment.end_frame = max(track.last_segment.end_frame, until_frame)
        return track

    def pause_track(self, object_id: int) -> ObjectTrack:
        track = self._tracking(object_id)
        track.state = "paused"
        return track

    def resume_track(self, object_id: int, frame_index: int, box: BoxGeometry) -> ObjectTrack:
        track = self.get(object_id)
        if track.state != "paused":
            raise TrackStateError(f"object {object_id} is {track.state}, not paused")
        self._check_frame(frame_index)
        require_box(box, self.width, self.height)
        if frame_index <= track.last_segment.end_frame:
            raise TrackRangeError(
                f"resume frame {frame_index} overlaps previous segment ending at"
                f" {track.last_segment.end_frame}"
            )
        track.segments.append(TrackSegment(frame_index, frame_index, {frame_index: box}))
        track.state = "tracking"
        return track

    def end_track(self, object_id: int) -> ObjectTrack:
        track = self.get(object_id)
        if track.state == "ended":
            raise TrackStateError(f"object {object_id} already ended")
        track.state = "ended"
        return track

    def delete_track(self, object_id: int) -> None:
        self.get(object_id)
        del self.tracks[object_id]
