"""Acceptance suite: one test per release criterion, each printing a
PASS/FAIL line (run with `pytest -s tests/test_acceptance.py` to see them).

Dataset-scale corpus results (hundreds of thousands of boxes / tens of
thousands of annotation sets) are out of reach on a workstation; the
contract here is correctness properties plus a bounded synthetic stress
import.
"""

import random
import time

import pytest

from charonette.documents import AnnotationService
from charonette.annotations import NiError
from charonette.geometry import BoxGeometry, round_half_up
from charonette.lexicon import bundled_lexicon_path, load_lexicon_path
from charonette.preannotate import disambiguate, identify_targets
from charonette.static_ingest import (
    BoundingBox,
    CorpusBundle,
    ImageInfo,
    link_entities,
    open_bundle,
    write_bundle,
)
from charonette.store import RecordStore
from charonette.tracking import TrackRangeError, TrackSet, TrackStateError
from charonette.video_ingest import (
    DraftError,
    DraftFinalizedError,
    DraftSet,
    TranscriptWord,
    frame_to_time,
    segment_sentences,
    time_to_frame,
)

GIRL_RAW = (
    "[/EN#1/people A girl] in [/EN#2/clothing a ponytail] is tying "
    "[/EN#3/clothing her shoes] with [/EN#4/bodyparts a bent knee] while on "
    "[/EN#5/scene a grassy field]."
)
DRINKING_SENTENCE = "Bom que aqui a gente bebe e vai esquentando, né?"
DRINKING_TRANSCRIPT = (
    "0\t350\tBom\n400\t600\tque\n650\t900\taqui\n950\t1050\ta\n"
    "1100\t1400\tgente\n1450\t1800\tbebe\n1850\t1950\te\n2000\t2300\tvai\n"
    "2350\t2900\tesquentando\n2950\t3100\tné\n"
).encode()


def report(name):
    print(f"\n[acceptance] PASS: {name}")


@pytest.fixture(scope="module")
def lex():
    return load_lexicon_path(bundled_lexicon_path())


def make_service(tmp_path, lex, corpus="demo"):
    service = AnnotationService(RecordStore(tmp_path / "data"), lex)
    if corpus not in service.list_corpora():
        service.create_corpus(corpus)
    return service


def test_girl_caption_pipeline_yields_five_chains(tmp_path, lex):
    bundle = CorpusBundle(
        name="acceptance",
        images=[ImageInfo("girl.jpg", 640, 480)],
        sentences_raw=[GIRL_RAW],
        boxes_raw=[
            BoundingBox(BoxGeometry(10, 20, 110, 220), "girl.jpg", i, label)
            for i, label in [(1, "people"), (2, "clothing"), (3, "clothing"),
                             (4, "bodyparts"), (5, "scene")]
        ],
    )
    zip_bytes = write_bundle(bundle)
    started = time.perf_counter()
    (doc,) = link_entities(open_bundle(zip_bytes, name="acceptance"))
    elapsed = time.perf_counter() - started
    assert elapsed < 1.0, f"import took {elapsed:.3f}s"
    assert len(doc.chains) == 5
    phrases = [
        doc.sentence[c.phrase_spans[0].start:c.phrase_spans[0].end]
        for c in doc.chains
    ]
    assert phrases == ["A girl", "a ponytail", "her shoes", "a bent knee", "a grassy field"]
    report("picture-caption pipeline builds exactly the five expected entity chains")


def test_drinking_sentence_preannotation(lex):
    started = time.perf_counter()
    resolved = disambiguate(identify_targets(DRINKING_SENTENCE, lex), lex)
    elapsed = time.perf_counter() - started
    assert elapsed < 1.0, f"pre-annotation took {elapsed:.3f}s"
    got = {DRINKING_SENTENCE[t.start:t.end]: t.chosen_frame for t in resolved}
    assert got == {
        "Bom": "Desirability",
        "aqui": "Locative_relation",
        "bebe": "Ingestion",
        "esquentando": "Change_of_temperature",
    }
    report("pre-annotation assigns the expected frame to each of the four targets")


def test_session_replay_objects_323_to_325(tmp_path, lex):
    service = make_service(tmp_path, lex)
    doc = service.import_video(
        "demo", DRINKING_TRANSCRIPT, b"", b"",
        fps=25, width=320, height=240, frame_count=500,
        doc_id="episode-1", media="episode1.mp4", first_object_id=323,
    )
    view = service.document_json("demo", doc)
    rev = view["revisions"]["draft/1"]
    sentence_id = service.edit_draft("demo", doc, 1, {"op": "finalize"}, rev)["sentence_id"]

    first = service.create_object("demo", doc, 0, BoxGeometry(50, 10, 90, 110))
    second = service.create_object("demo", doc, 0, BoxGeometry(100, 15, 140, 115))
    third = service.create_object("demo", doc, 5, BoxGeometry(70, 60, 85, 80))
    assert [first["object_id"], second["object_id"], third["object_id"]] == [323, 324, 325]

    service.annotate_object("demo", doc, 323, "Ingestion", "Ingestor", "People/person.n")
    service.annotate_object("demo", doc, 324, "Ingestion", "Ingestor", "People/person.n")
    service.annotate_object("demo", doc, 325, "Ingestion", "Ingestibles", "Container/glass.n")

    annotations = {
        a["object_ref"]: (a["frame"], a["fe"], a["cv_name"])
        for a in service.document_json("demo", doc)["object_annotations"]
    }
    assert annotations == {
        323: ("Ingestion", "Ingestor", "People/person.n"),
        324: ("Ingestion", "Ingestor", "People/person.n"),
        325: ("Ingestion", "Ingestibles", "Container/glass.n"),
    }

    # null instantiation is rejected on an AS where Ingestibles is labeled,
    # then accepted on the AS where it is not
    text = service.document_json("demo", doc)["sentences"][0]["text"]
    bebe = text.index("bebe")
    labeled = service.create_text_annotation("demo", doc, sentence_id, bebe, bebe + 4, "Ingestion")
    esq = text.index("esquentando")
    rev = service.set_layer_label("demo", doc, labeled["as_id"], "FE", esq, esq + 11,
                                  "Ingestibles", labeled["revision"])["revision"]
    with pytest.raises(NiError):
        service.mark_ni("demo", doc, labeled["as_id"], "Ingestibles", "DNI", rev)

    clean = service.create_text_annotation("demo", doc, sentence_id, bebe, bebe + 4, "Ingestion")
    marked = service.mark_ni("demo", doc, clean["as_id"], "Ingestibles", "DNI",
                             clean["revision"])
    assert marked["revision"] == clean["revision"] + 1
    report("session replay reproduces object annotations 323-325 and the NI rule")


def test_frame_stamp_arithmetic_property():
    rng = random.Random(20260810)
    started = time.perf_counter()
    failures = 0
    for _ in range(100_000):
        n = rng.randrange(0, 10**8)
        if time_to_frame(frame_to_time(n)) != n:
            failures += 1
    previous = -1
    last_frame = -1
    for t in sorted(rng.randrange(0, 10**9) for _ in range(100_000)):
        frame = time_to_frame(t)
        if t >= previous and frame < last_frame:
            failures += 1
        previous, last_frame = t, frame
    elapsed = time.perf_counter() - started
    assert failures == 0
    assert elapsed < 5.0, f"property run took {elapsed:.2f}s"
    report("frame-stamp arithmetic: 1e5 round trips and monotonicity, zero failures")


def test_tracking_against_interpolation_oracle():
    rng = random.Random(987654)
    failures = 0
    for _ in range(1000):
        x0, y0 = rng.randrange(0, 200), rng.randrange(0, 200)
        a = BoxGeometry(x0, y0, x0 + rng.randrange(1, 100), y0 + rng.randrange(1, 100))
        x1, y1 = rng.randrange(0, 200), rng.randrange(0, 200)
        b = BoxGeometry(x1, y1, x1 + rng.randrange(1, 100), y1 + rng.randrange(1, 100))
        f0 = rng.randrange(0, 500)
        f1 = f0 + rng.randrange(1, 200)
        ts = TrackSet(width=1000, height=1000)
        track = ts.create_object(f0, a)
        ts.set_keyframe(track.object_id, f1, b)
        frame = rng.randrange(f0, f1 + 1)
        got = track.box_at_frame(frame)
        t = (frame - f0) / (f1 - f0)
        expected = [
            round_half_up(getattr(a, c) + (getattr(b, c) - getattr(a, c)) * t)
            for c in ("xmin", "ymin", "xmax", "ymax")
        ]
        actual = [got.xmin, got.ymin, got.xmax, got.ymax]
        if any(abs(g - e) > 1 for g, e in zip(actual, expected)):
            failures += 1
    assert failures == 0
    report("tracking: 1e3 random keyframe pairs match the brute-force oracle within 1px")


def test_round_trips_and_generative_invariants(tmp_path, lex):
    from test_export_xml import build_static_doc, build_video_doc

    service = make_service(tmp_path, lex)
    static_doc = build_static_doc(service)
    video_doc = build_video_doc(service)
    service.store.put("demo", "empty-1", "meta", 0, {
        "mode": "static", "media": "none.jpg", "width": 8, "height": 8,
        "fps": None, "frame_count": None, "first_object_id": 1,
        "source_corpus": "demo",
    }, 0)

    service.create_corpus("copy")
    for doc in (static_doc, video_doc, "empty-1"):
        first = service.export_document("demo", doc)
        imported = service.import_document("copy", first)
        second = service.export_document("copy", imported)
        assert first == second, f"round trip not byte-identical for {doc}"

    with open(bundled_lexicon_path(), "rb") as fh:
        data = fh.read()
    from charonette.lexicon import load_lexicon

    assert load_lexicon(data) == load_lexicon(data)

    rng = random.Random(13579)
    sequences = 0
    for _ in range(100):
        stream = [TranscriptWord(f"w{i}", i * 300, i * 300 + 200) for i in range(6)]
        ds = DraftSet(segment_sentences(stream, pause_threshold_ms=50))
        for _ in range(10):
            if not ds.drafts:
                break
            draft = rng.choice(ds.drafts)
            try:
                op = rng.randrange(5)
                if op == 0 and len(draft.words) > 1:
                    ds.split_at(draft.draft_id, rng.randrange(1, len(draft.words)))
                elif op == 1:
                    ds.merge_with_next(draft.draft_id)
                elif op == 2:
                    idx = rng.randrange(len(draft.words))
                    ds.retime(draft.draft_id, idx, draft.words[idx].start_ms,
                              draft.words[idx].end_ms + rng.randrange(10))
                elif op == 3:
                    ds.set_text(draft.draft_id, rng.randrange(len(draft.words)), "x")
                else:
                    ds.finalize(draft.draft_id)
            except (DraftError, DraftFinalizedError):
                pass
            for d in ds.drafts:
                d.check_invariants()
        sequences += 1

    for _ in range(100):
        ts = TrackSet(width=100, height=100, frame_count=400)
        ids = []
        for _ in range(12):
            try:
                op = rng.randrange(6)
                if op == 0 or not ids:
                    ids.append(ts.create_object(rng.randrange(300),
                                                BoxGeometry(1, 1, 20, 20)).object_id)
                else:
                    oid = rng.choice(ids)
                    track = ts.tracks[oid]
                    if op == 1:
                        ts.set_keyframe(oid, track.last_segment.start_frame + rng.randrange(50),
                                        BoxGeometry(2, 2, 30, 30))
                    elif op == 2:
                        ts.auto_track(oid, track.last_keyframe + 1 + rng.randrange(30))
                    elif op == 3:
                        ts.pause_track(oid)
                    elif op == 4:
                        ts.resume_track(oid, track.last_segment.end_frame + 1 + rng.randrange(20),
                                        BoxGeometry(1, 1, 10, 10))
                    else:
                        ts.end_track(oid)
            except (TrackStateError, TrackRangeError):
                continue
            for track in ts.tracks.values():
                track.check_invariants()
        sequences += 1
    assert sequences == 200
    report("round trips byte-identical; lexicon load deterministic; "
           "200/200 generative edit/track sequences preserved invariants")


def test_synthetic_corpus_stress_import(tmp_path, lex):
    """Desk-scale substitute for dataset-scale corpus construction."""
    service = make_service(tmp_path, lex, corpus="stress")
    rng = random.Random(24680)
    images = []
    sentences = []
    boxes = []
    for i in range(50):
        name = f"img{i:03d}.jpg"
        images.append(ImageInfo(name, 320, 240))
        sentences.append(
            f"[/EN#1/people A girl] number {i} near [/EN#2/scene a grassy field]."
        )
        for eid in (1, 2):
            x, y = rng.randrange(0, 200), rng.randrange(0, 140)
            boxes.append(BoundingBox(
                BoxGeometry(x, y, x + rng.randrange(10, 100), y + rng.randrange(10, 90)),
                name, eid, "people" if eid == 1 else "scene"))
    zip_bytes = write_bundle(CorpusBundle("stress", images, sentences, boxes))

    started = time.perf_counter()
    docs = service.import_static_bundle("stress", zip_bytes, "stress")
    elapsed = time.perf_counter() - started
    assert len(docs) == 50
    assert elapsed < 30.0, f"stress import took {elapsed:.2f}s"
    view = service.document_json("stress", docs[17])
    assert len(view["objects"]) == 2
    report(f"50-document synthetic corpus imported in {elapsed:.2f}s (< 30s)")
