import pytest
from hypothesis import given, settings, strategies as st

from charonette.geometry import BoxGeometry
from charonette.video_ingest import (
    Detection,
    DraftError,
    DraftFinalizedError,
    DraftSet,
    StreamError,
    SubtitleLine,
    TranscriptWord,
    frame_to_time,
    ingest_detections,
    merge_streams,
    parse_subtitle_file,
    parse_transcript_file,
    segment_sentences,
    split_subtitle_line,
    time_to_frame,
)


def words(*specs):
    return [TranscriptWord(text, start, end) for text, start, end in specs]


# -- frame stamps ---------------------------------------------------------------


def test_time_zero_is_frame_zero():
    assert time_to_frame(0) == 0


def test_two_seconds_is_frame_fifty():
    assert time_to_frame(2000) == 50


def test_frame_seven_round_trip():
    assert frame_to_time(7) == 280
    assert time_to_frame(280) == 7


def test_negative_inputs_rejected():
    with pytest.raises(StreamError):
        time_to_frame(-1)
    with pytest.raises(StreamError):
        frame_to_time(-5)


@given(st.integers(min_value=0, max_value=10**9))
def test_frame_round_trip(n):
    assert time_to_frame(frame_to_time(n)) == n


@given(st.integers(min_value=0, max_value=10**9), st.integers(min_value=0, max_value=10**6))
def test_time_to_frame_monotone(t, delta):
    assert time_to_frame(t) <= time_to_frame(t + delta)


@given(
    st.integers(min_value=0, max_value=10**6),
    st.integers(min_value=1, max_value=120),
)
def test_round_trip_holds_for_other_rates(n, fps):
    assert time_to_frame(frame_to_time(n, fps), fps) == n


# -- merging ---------------------------------------------------------------------


def test_speech_only_is_identity():
    speech = words(("ola", 0, 400), ("mundo", 450, 800))
    assert merge_streams(speech, []) == speech


def test_exact_duplicate_subtitle_dropped():
    speech = words(("hello", 1000, 1400), ("world", 1450, 1900))
    subs = [SubtitleLine("hello world", 1000, 1900)]
    assert merge_streams(speech, subs) == speech


def test_subtitle_in_silence_is_word_split():
    # 2-word line over 1000 ms; lengths 2 and 5 chars -> first boundary at
    # 5000 + 1000*2//7 = 5285
    subs = [SubtitleLine("hi world", 5000, 6000)]
    merged = merge_streams([], subs)
    assert merged == [
        TranscriptWord("hi", 5000, 5285, source="subtitle"),
        TranscriptWord("world", 5285, 6000, source="subtitle"),
    ]


def test_dissimilar_overlapping_subtitle_kept():
    speech = words(("falando", 100, 600),)
    subs = [SubtitleLine("breaking news banner", 0, 900)]
    merged = merge_streams(speech, subs)
    texts = {w.text for w in merged}
    assert {"falando", "breaking", "news", "banner"} <= texts
    assert merged == sorted(merged, key=lambda w: (w.start_ms, w.end_ms, w.source, w.text))


def test_unordered_speech_rejected():
    speech = words(("b", 500, 700), ("a", 0, 300))
    with pytest.raises(StreamError):
        merge_streams(speech, [])


def test_merge_never_drops_or_edits_speech():
    speech = words(("um", 0, 200), ("dois", 300, 500), ("tres", 900, 1200))
    subs = [SubtitleLine("um dois", 0, 500), SubtitleLine("legenda extra", 1300, 2000)]
    merged = merge_streams(speech, subs)
    kept = [w for w in merged if w.source == "speech"]
    assert kept == speech


@st.composite
def speech_streams(draw):
    n = draw(st.integers(min_value=0, max_value=12))
    gaps = draw(st.lists(st.integers(min_value=0, max_value=900), min_size=n, max_size=n))
    durations = draw(st.lists(st.integers(min_value=1, max_value=400), min_size=n, max_size=n))
    out = []
    t = 0
    for i, (gap, dur) in enumerate(zip(gaps, durations)):
        t += gap
        out.append(TranscriptWord(f"w{i}", t, t + dur))
        t += dur
    return out


@given(speech_streams())
def test_merge_output_is_time_ordered(speech):
    merged = merge_streams(speech, [SubtitleLine("algo diferente aqui", 100, 900)])
    starts = [w.start_ms for w in merged]
    assert starts == sorted(starts)
    assert [w for w in merged if w.source == "speech"] == speech


# -- segmentation ------------------------------------------------------------------


def test_segment_empty():
    assert segment_sentences([]) == []


def test_segment_splits_on_long_gap():
    stream = words(("a", 0, 100), ("b", 200, 300), ("c", 1200, 1300), ("d", 1400, 1500), ("e", 1600, 1700))
    drafts = segment_sentences(stream)
    assert [len(d.words) for d in drafts] == [2, 3]
    assert all(d.status == "auto" for d in drafts)
    assert drafts[0].start_ms == 0 and drafts[0].end_ms == 300
    assert drafts[1].text == "c d e"


def test_segment_single_draft_when_gaps_small():
    stream = words(("a", 0, 100), ("b", 400, 500), ("c", 1100, 1200))
    assert len(segment_sentences(stream)) == 1


@given(speech_streams(), st.integers(min_value=0, max_value=1000))
def test_segmentation_partitions_input(stream, threshold):
    drafts = segment_sentences(stream, pause_threshold_ms=threshold)
    flattened = [w for d in drafts for w in d.words]
    assert flattened == stream
    for d in drafts:
        d.check_invariants()


# -- draft editing ------------------------------------------------------------------


def five_word_draftset():
    stream = words(("a", 0, 100), ("b", 150, 250), ("c", 300, 400), ("d", 450, 550), ("e", 600, 700))
    return DraftSet(segment_sentences(stream))


def test_split_at():
    ds = five_word_draftset()
    first, second = ds.split_at(1, 2)
    assert [len(d.words) for d in ds.drafts] == [2, 3]
    assert first.status == "human_edited" and second.status == "human_edited"
    assert second.draft_id != first.draft_id


def test_merge_with_next():
    ds = five_word_draftset()
    ds.split_at(1, 2)
    merged = ds.merge_with_next(1)
    assert len(merged.words) == 5
    assert len(ds.drafts) == 1


def test_retime_violating_order_rejected():
    ds = five_word_draftset()
    with pytest.raises(DraftError):
        ds.retime(1, 2, 200, 260)  # word c would start before b ends at 250
    # state unchanged after failed retime
    assert ds.get(1).words[2].start_ms == 300


def test_retime_ok_marks_edited():
    ds = five_word_draftset()
    draft = ds.retime(1, 2, 260, 440)
    assert draft.status == "human_edited"
    assert draft.words[2].start_ms == 260


def test_set_text():
    ds = five_word_draftset()
    draft = ds.set_text(1, 0, "hola")
    assert draft.words[0].text == "hola"


def test_finalize_makes_draft_immutable():
    ds = five_word_draftset()
    ds.finalize(1)
    assert ds.get(1).status == "finalized"
    with pytest.raises(DraftFinalizedError):
        ds.set_text(1, 0, "nope")
    with pytest.raises(DraftFinalizedError):
        ds.split_at(1, 2)


def test_bad_indices_rejected():
    ds = five_word_draftset()
    with pytest.raises(DraftError):
        ds.split_at(1, 0)
    with pytest.raises(DraftError):
        ds.split_at(1, 5)
    with pytest.raises(DraftError):
        ds.retime(1, 9, 0, 1)


class EditOp:
    SPLIT, MERGE, RETIME, SET_TEXT, FINALIZE = range(5)


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_random_edit_sequences_preserve_invariants(data):
    stream = [TranscriptWord(f"w{i}", i * 300, i * 300 + 200) for i in range(8)]
    ds = DraftSet(segment_sentences(stream, pause_threshold_ms=50))
    for _ in range(data.draw(st.integers(min_value=0, max_value=12))):
        if not ds.drafts:
            break
        draft = data.draw(st.sampled_from(ds.drafts))
        op = data.draw(st.integers(min_value=0, max_value=4))
        try:
            if op == EditOp.SPLIT and len(draft.words) > 1:
                ds.split_at(draft.draft_id, data.draw(st.integers(1, len(draft.words) - 1)))
            elif op == EditOp.MERGE:
                ds.merge_with_next(draft.draft_id)
            elif op == EditOp.RETIME:
                idx = data.draw(st.integers(0, len(draft.words) - 1))
                ds.retime(draft.draft_id, idx, draft.words[idx].start_ms, draft.words[idx].end_ms + 5)
            elif op == EditOp.SET_TEXT:
                ds.set_text(draft.draft_id, data.draw(st.integers(0, len(draft.words) - 1)), "x")
            elif op == EditOp.FINALIZE:
                ds.finalize(draft.draft_id)
        except (DraftError, DraftFinalizedError):
            pass
        for d in ds.drafts:
            d.check_invariants()
            assert d.status in ("auto", "human_edited", "finalized")
        ids = [d.draft_id for d in ds.drafts]
        assert len(ids) == len(set(ids))


# -- subtitle splitting edge cases ---------------------------------------------------


@given(
    st.lists(st.text(alphabet="abcdefg", min_size=1, max_size=12), min_size=1, max_size=6),
    st.integers(min_value=0, max_value=10000),
    st.integers(min_value=200, max_value=5000),
)
def test_split_subtitle_line_covers_span(word_list, start, duration):
    line = SubtitleLine(" ".join(word_list), start, start + duration)
    parts = split_subtitle_line(line)
    assert len(parts) == len(word_list)
    assert parts[0].start_ms == start
    assert parts[-1].end_ms == start + duration
    for prev, nxt in zip(parts, parts[1:]):
        assert prev.end_ms == nxt.start_ms
    for p in parts:
        assert p.start_ms < p.end_ms


# -- detections -------------------------------------------------------------------


def test_ingest_detections_sorted():
    data = (
        "1\tperson\t0.72\t10\t10\t60\t120\n"
        "0\tglass\t0.90\t5\t5\t25\t40\n"
        "0\tperson\t0.95\t50\t10\t90\t110\n"
    ).encode()
    dets = ingest_detections(data, 200, 200)
    assert [(d.frame_index, d.class_label) for d in dets] == [
        (0, "person"),
        (0, "glass"),
        (1, "person"),
    ]
    assert [d.det_id for d in dets] == [1, 2, 3]


def test_confidence_out_of_range():
    with pytest.raises(Exception, match="confidence"):
        ingest_detections(b"0\tperson\t1.2\t1\t1\t5\t5\n", 10, 10)


def test_empty_detection_file():
    assert ingest_detections(b"", 10, 10) == []
    assert ingest_detections(b"# comment only\n\n", 10, 10) == []


def test_out_of_bounds_detection():
    with pytest.raises(Exception, match="out of bounds"):
        ingest_detections(b"0\tperson\t0.5\t0\t0\t500\t500\n", 100, 100)


def test_transcript_and_subtitle_parsers():
    ws = parse_transcript_file(b"0\t400\tBom\n450\t600\tque\n")
    assert [w.text for w in ws] == ["Bom", "que"]
    subs = parse_subtitle_file("0\t900\tBom que aqui\n".encode())
    assert subs == [SubtitleLine("Bom que aqui", 0, 900)]
    with pytest.raises(StreamError):
        parse_transcript_file(b"oops\t1\tx\n")
