#!/usr/bin/env python3
"""End-to-end demo: build a small picture-caption bundle and a video
document, run pre-annotation, replay an annotation session and print the
exported XML for both documents.

Usage: python3 scripts/demo_session.py [workdir]
"""

import sys
import tempfile
from pathlib import Path

from charonette.documents import AnnotationService
from charonette.geometry import BoxGeometry
from charonette.lexicon import bundled_lexicon_path, load_lexicon_path
from charonette.static_ingest import BoundingBox, CorpusBundle, ImageInfo, write_bundle
from charonette.store import RecordStore

GIRL_RAW = (
    "[/EN#1/people A girl] in [/EN#2/clothing a ponytail] is tying "
    "[/EN#3/clothing her shoes] with [/EN#4/bodyparts a bent knee] while on "
    "[/EN#5/scene a grassy field]."
)
TRANSCRIPT = (
    "0\t350\tBom\n400\t600\tque\n650\t900\taqui\n950\t1050\ta\n"
    "1100\t1400\tgente\n1450\t1800\tbebe\n1850\t1950\te\n2000\t2300\tvai\n"
    "2350\t2900\tesquentando\n2950\t3100\tné\n"
).encode()
DETECTIONS = (
    "0\tperson\t0.95\t50\t10\t90\t110\n"
    "0\tperson\t0.90\t100\t15\t140\t115\n"
    "0\tcup\t0.80\t70\t60\t85\t80\n"
).encode()


def main() -> None:
    workdir = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(tempfile.mkdtemp(prefix="charonette-"))
    service = AnnotationService(
        RecordStore(workdir / "data"), load_lexicon_path(bundled_lexicon_path())
    )
    service.create_corpus("demo")

    # static: one picture-caption pair with five entities
    bundle = CorpusBundle(
        name="demo",
        images=[ImageInfo("girl.jpg", 640, 480)],
        sentences_raw=[GIRL_RAW],
        boxes_raw=[
            BoundingBox(BoxGeometry(10, 20, 110, 220), "girl.jpg", 1, "people"),
            BoundingBox(BoxGeometry(120, 30, 180, 80), "girl.jpg", 2, "clothing"),
            BoundingBox(BoxGeometry(200, 300, 300, 400), "girl.jpg", 3, "clothing"),
            BoundingBox(BoxGeometry(220, 200, 320, 280), "girl.jpg", 4, "bodyparts"),
            BoundingBox(BoxGeometry(0, 350, 639, 479), "girl.jpg", 5, "scene"),
        ],
    )
    (static_doc,) = service.import_static_bundle("demo", write_bundle(bundle), "demo")
    print(f"imported static document {static_doc}")
    print("pre-annotation:", service.preannotate("demo", static_doc))
    service.annotate_object("demo", static_doc, 1, "People_by_leisure_activity", "Person",
                            "People/girl.n")

    # video: replay of a tracking-and-annotation session, ids seeded at 323
    video_doc = service.import_video(
        "demo", TRANSCRIPT, b"", DETECTIONS,
        fps=25, width=320, height=240, frame_count=500,
        doc_id="episode-1", media="episode1.mp4", first_object_id=323,
    )
    view = service.document_json("demo", video_doc)
    sentence_id = service.edit_draft(
        "demo", video_doc, 1, {"op": "finalize"}, view["revisions"]["draft/1"]
    )["sentence_id"]
    print(f"imported video document {video_doc}; finalized sentence {sentence_id}")
    print("pre-annotation:", service.preannotate("demo", video_doc))

    men = [
        service.create_object("demo", video_doc, 0, BoxGeometry(50, 10, 90, 110)),
        service.create_object("demo", video_doc, 0, BoxGeometry(100, 15, 140, 115)),
    ]
    glass = service.create_object("demo", video_doc, 5, BoxGeometry(70, 60, 85, 80))
    for made in men:
        service.track_op("demo", video_doc, made["object_id"], "auto_track",
                         made["revision"], until_frame=120)
        service.annotate_object("demo", video_doc, made["object_id"],
                                "Ingestion", "Ingestor", "People/person.n")
    service.annotate_object("demo", video_doc, glass["object_id"],
                            "Ingestion", "Ingestibles", "Container/glass.n")

    text = service.document_json("demo", video_doc)["sentences"][0]["text"]
    span = text.index("a gente")
    for made in men:
        service.add_correlation("demo", video_doc, made["object_id"], sentence_id,
                                span, span + len("a gente"))

    aset = service.create_text_annotation(
        "demo", video_doc, sentence_id, text.index("bebe"), text.index("bebe") + 4, "Ingestion")
    service.set_layer_label("demo", video_doc, aset["as_id"], "FE",
                            span, span + len("a gente"), "Ingestor", aset["revision"])
    service.mark_ni("demo", video_doc, aset["as_id"], "Ingestibles", "DNI",
                    aset["revision"] + 1)

    for doc in (static_doc, video_doc):
        out = workdir / f"{doc}.xml"
        out.write_bytes(service.export_document("demo", doc))
        print(f"\n=== {out} ===")
        print(out.read_text(), end="")


if __name__ == "__main__":
    main()
