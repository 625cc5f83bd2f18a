import pytest

from charonette.export_xml import (
    ExportFormatError,
    ImportValidationError,
    export_view,
    parse_document,
)
from charonette.documents import AnnotationService
from charonette.geometry import BoxGeometry
from charonette.static_ingest import BoundingBox, CorpusBundle, ImageInfo, write_bundle
from charonette.store import RecordStore

DRINKING_SENTENCE = "Bom que aqui a gente bebe e vai esquentando, né?"


@pytest.fixture
def service(tmp_path, lex):
    store = RecordStore(tmp_path / "data")
    store.create_corpus("demo")
    return AnnotationService(store, lex)


def static_fixture_bundle():
    images = [ImageInfo("girl.jpg", 640, 480)]
    sentences = [
        "[/EN#1/people A girl] in [/EN#2/clothing a ponytail] on "
        "[/EN#5/scene a grassy field]."
    ]
    boxes = [
        BoundingBox(BoxGeometry(10, 20, 110, 220), "girl.jpg", 1, "people"),
        BoundingBox(BoxGeometry(30, 40, 90, 120), "girl.jpg", 2, "clothing"),
        BoundingBox(BoxGeometry(0, 300, 639, 479), "girl.jpg", 5, "scene"),
    ]
    return write_bundle(CorpusBundle("fixture", images, sentences, boxes))


def build_static_doc(service):
    (doc_id,) = service.import_static_bundle("demo", static_fixture_bundle(), "fixture")
    sentence = service.document_json("demo", doc_id)["sentences"][0]["text"]
    start = sentence.index("A girl")
    service.create_text_annotation("demo", doc_id, 1, start, start + 6, "People")
    start2 = sentence.index("a grassy field")
    service.create_text_annotation("demo", doc_id, 1, start2, start2 + 14, "Locative_relation")
    service.annotate_object("demo", doc_id, 1, "People_by_leisure_activity", "Person", None)
    return doc_id


def build_video_doc(service):
    transcript = (
        "0\t350\tBom\n400\t600\tque\n650\t900\taqui\n950\t1050\ta\n"
        "1100\t1400\tgente\n1450\t1800\tbebe\n1850\t1950\te\n2000\t2300\tvai\n"
        "2350\t2900\tesquentando\n2950\t3100\tné\n"
    ).encode()
    detections = (
        "0\tperson\t0.95\t50\t10\t90\t110\n"
        "0\tperson\t0.90\t100\t15\t140\t115\n"
        "0\tcup\t0.80\t70\t60\t85\t80\n"
    ).encode()
    doc_id = service.import_video(
        "demo", transcript, b"", detections,
        fps=25, width=320, height=240, frame_count=500,
        doc_id="episode-1", media="episode1.mp4", first_object_id=323,
    )
    view = service.document_json("demo", doc_id)
    draft_id = view["drafts"][0]["id"]
    rev = view["revisions"][f"draft/{draft_id}"]
    result = service.edit_draft("demo", doc_id, draft_id, {"op": "finalize"}, rev)
    sentence_id = result["sentence_id"]

    obj1 = service.create_object("demo", doc_id, 0, BoxGeometry(50, 10, 90, 110))
    obj2 = service.create_object("demo", doc_id, 0, BoxGeometry(100, 15, 140, 115))
    obj3 = service.create_object("demo", doc_id, 5, BoxGeometry(70, 60, 85, 80))
    service.track_op("demo", doc_id, obj1["object_id"], "auto_track",
                     obj1["revision"], until_frame=100)
    service.annotate_object("demo", doc_id, obj1["object_id"], "Ingestion", "Ingestor",
                            "People/person.n")
    service.annotate_object("demo", doc_id, obj3["object_id"], "Ingestion", "Ingestibles",
                            "Container/glass.n")
    text = service.document_json("demo", doc_id)["sentences"][0]["text"]
    span_start = text.index("a gente")
    service.add_correlation("demo", doc_id, obj1["object_id"], sentence_id,
                            span_start, span_start + len("a gente"))
    return doc_id


def test_static_export_element_counts(service):
    doc_id = build_static_doc(service)
    xml = service.export_document("demo", doc_id).decode()
    assert xml.count("<annotationSet ") == 2
    assert xml.count("<objectAnnotation ") == 1
    assert xml.count("<object ") == 3
    assert xml.count("<correlation ") == 3
    assert xml.count("<sentence ") == 1


def test_export_is_deterministic(service):
    doc_id = build_static_doc(service)
    assert service.export_document("demo", doc_id) == service.export_document("demo", doc_id)


def test_empty_document_exports_minimal_xml(service, lex):
    service.store.put("demo", "empty-1", "meta", 0, {
        "mode": "static", "media": "none.jpg", "width": 10, "height": 10,
        "fps": None, "frame_count": None, "first_object_id": 1,
        "source_corpus": "demo",
    }, 0)
    xml = service.export_document("demo", "empty-1").decode()
    assert '<charonCorpusDoc version="1" docId="empty-1"' in xml
    assert xml.endswith("</charonCorpusDoc>\n")
    view = parse_document(xml.encode(), lex)
    assert view.sentences == [] and view.objects == []


def test_static_round_trip_bytes(service):
    doc_id = build_static_doc(service)
    first = service.export_document("demo", doc_id)
    service.store.create_corpus("copy")
    imported = service.import_document("copy", first)
    second = service.export_document("copy", imported)
    assert first == second


def test_video_round_trip_bytes(service):
    doc_id = build_video_doc(service)
    first = service.export_document("demo", doc_id)
    service.store.create_corpus("copy")
    imported = service.import_document("copy", first)
    second = service.export_document("copy", imported)
    assert first == second


def test_import_validates_fe_against_frame(service, lex):
    doc_id = build_static_doc(service)
    xml = service.export_document("demo", doc_id).decode()
    broken = xml.replace('frame="People_by_leisure_activity" fe="Person"',
                         'frame="People_by_leisure_activity" fe="Ingestor"')
    with pytest.raises(ImportValidationError, match="objectAnnotation"):
        parse_document(broken.encode(), lex)


def test_import_rejects_truncated_xml(service, lex):
    doc_id = build_static_doc(service)
    xml = service.export_document("demo", doc_id)
    with pytest.raises(ExportFormatError):
        parse_document(xml[: len(xml) // 2], lex)


def test_import_rejects_unknown_version(lex):
    with pytest.raises(ExportFormatError, match="version"):
        parse_document(b'<charonCorpusDoc version="99" docId="x" mode="static"/>', lex)


def test_import_rejects_dangling_refs(lex):
    xml = (
        '<charonCorpusDoc version="1" docId="x" mode="static" media="a.jpg">\n'
        '  <objectAnnotation objectRef="9" frame="People" fe="Person" provenance="human"/>\n'
        "</charonCorpusDoc>\n"
    )
    with pytest.raises(ImportValidationError, match="dangling objectRef"):
        parse_document(xml.encode(), lex)


def test_export_escapes_special_characters(service, lex):
    service.store.put("demo", "esc-1", "meta", 0, {
        "mode": "static", "media": "a.jpg", "width": 10, "height": 10,
        "fps": None, "frame_count": None, "first_object_id": 1,
        "source_corpus": "demo",
    }, 0)
    tricky = 'he said "x < y & y > z"'
    service.store.put("demo", "esc-1", "sentence", 1,
                      {"text": tricky, "start_ms": 0, "end_ms": 0}, 0)
    xml = service.export_document("demo", "esc-1")
    view = parse_document(xml, lex)
    assert view.sentences[0].text == tricky


def test_reimport_into_same_corpus_conflicts(service):
    doc_id = build_static_doc(service)
    xml = service.export_document("demo", doc_id)
    with pytest.raises(Exception, match="already exists"):
        service.import_document("demo", xml)
