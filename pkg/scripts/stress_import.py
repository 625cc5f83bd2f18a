#!/usr/bin/env python3
"""Synthetic-corpus stress import: N picture-caption documents with two
entities each, timed end to end (import + pre-annotation + one export).

Usage: python3 scripts/stress_import.py [n_documents]
"""

import random
import sys
import tempfile
import time
from pathlib import Path

from charonette.documents import AnnotationService
from charonette.geometry import BoxGeometry
from charonette.lexicon import bundled_lexicon_path, load_lexicon_path
from charonette.static_ingest import BoundingBox, CorpusBundle, ImageInfo, write_bundle
from charonette.store import RecordStore


def build_bundle(n_docs: int, rng: random.Random) -> bytes:
    images, sentences, boxes = [], [], []
    for i in range(n_docs):
        name = f"img{i:04d}.jpg"
        images.append(ImageInfo(name, 320, 240))
        sentences.append(
            f"[/EN#1/people A girl] number {i} near [/EN#2/scene a grassy field]."
        )
        for eid, label in ((1, "people"), (2, "scene")):
            x, y = rng.randrange(0, 200), rng.randrange(0, 140)
            boxes.append(BoundingBox(
                BoxGeometry(x, y, x + rng.randrange(10, 100), y + rng.randrange(10, 90)),
                name, eid, label))
    return write_bundle(CorpusBundle("stress", images, sentences, boxes))


def main() -> None:
    n_docs = int(sys.argv[1]) if len(sys.argv) > 1 else 50
    workdir = Path(tempfile.mkdtemp(prefix="charonette-stress-"))
    service = AnnotationService(
        RecordStore(workdir / "data"), load_lexicon_path(bundled_lexicon_path())
    )
    service.create_corpus("stress")
    payload = build_bundle(n_docs, random.Random(24680))

    started = time.perf_counter()
    docs = service.import_static_bundle("stress", payload, "stress")
    import_s = time.perf_counter() - started

    started = time.perf_counter()
    total_targets = sum(service.preannotate("stress", d)["targets"] for d in docs)
    preannotate_s = time.perf_counter() - started

    started = time.perf_counter()
    xml = service.export_document("stress", docs[0])
    export_s = time.perf_counter() - started

    print(f"documents        {len(docs)}")
    print(f"import           {import_s:8.3f} s")
    print(f"preannotate      {preannotate_s:8.3f} s ({total_targets} targets)")
    print(f"first export     {export_s:8.3f} s ({len(xml)} bytes)")
    print(f"data dir         {workdir / 'data'}")


if __name__ == "__main__":
    main()
