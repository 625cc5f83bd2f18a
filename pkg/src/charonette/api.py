"""HTTP API over the document service.

Every endpoint is a thin adapter onto one service operation: transport adds
only (de)serialization, bearer-token checking and revision plumbing. Domain
errors map 1:1 onto JSON error bodies {"code", "message", "field"} with the
status each exception class declares.

Environment: CHARONETTE_PORT, CHARONETTE_DATA_DIR, CHARONETTE_LEXICON,
CHARONETTE_TOKEN.
"""

from __future__ import annotations

import os
from pathlib import Path

from fastapi import Depends, FastAPI, Request, Response
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from .documents import AnnotationService
from .errors import CharonetteError
from .geometry import BoxGeometry
from .lexicon import Lexicon, bundled_lexicon_path, load_lexicon_path
from .store import RecordStore

API_PREFIX = "/api/v1"


class CharonetteAuthError(CharonetteError):
    code = "unauthorized"
    status = 401


def _frame_json(lex: Lexicon, frame) -> dict:
    return {
        "name": frame.name,
        "definition": frame.definition,
        "core_fes": [lex.fe(i).name for i in frame.core_fes],
        "noncore_fes": [lex.fe(i).name for i in frame.noncore_fes],
    }


def _fe_json(fe) -> dict:
    return {"name": fe.name, "frame": fe.frame_id, "coreness": fe.coreness}


def _box_from_body(values) -> BoxGeometry:
    if not isinstance(values, (list, tuple)) or len(values) != 4:
        raise CharonetteError("box must be [xmin, ymin, xmax, ymax]", field="box")
    return BoxGeometry(*[int(v) for v in values])


def create_app(data_dir: str | Path | None = None,
               lexicon_path: str | Path | None = None,
               token: str | None = None) -> FastAPI:
    data_dir = data_dir or os.environ.get("CHARONETTE_DATA_DIR", "./data")
    lexicon_path = lexicon_path or os.environ.get("CHARONETTE_LEXICON") or bundled_lexicon_path()
    token = token if token is not None else os.environ.get("CHARONETTE_TOKEN")

    app = FastAPI(title="charonette", version="0.1.0")
    state = {"ready": False}

    lexicon = load_lexicon_path(lexicon_path)
    service = AnnotationService(RecordStore(data_dir), lexicon)
    state["ready"] = True
    app.state.service = service
    app.state.lexicon = lexicon

    @app.exception_handler(CharonetteError)
    async def _domain_error(_request: Request, exc: CharonetteError):
        body = {"code": exc.code, "message": str(exc)}
        if exc.field:
            body["field"] = exc.field
        return JSONResponse(status_code=exc.status, content=body)

    async def _auth(request: Request):
        if token and request.url.path != f"{API_PREFIX}/ready":
            header = request.headers.get("authorization", "")
            if header != f"Bearer {token}":
                raise CharonetteAuthError("missing or invalid bearer token")

    dep = [Depends(_auth)]

    @app.get(f"{API_PREFIX}/ready")
    async def ready():
        return {"status": "ok" if state["ready"] else "loading"}

    # -- lexicon -----------------------------------------------------------

    @app.get(f"{API_PREFIX}/frames", dependencies=dep)
    async def frames(name: str | None = None):
        if name is not None:
            frame = lexicon.frame_by_name(name)
            return [_frame_json(lexicon, frame)] if frame else []
        return [_frame_json(lexicon, f) for f in sorted(lexicon.frames, key=lambda f: f.name)]

    @app.get(f"{API_PREFIX}/frames/{{name}}/fes", dependencies=dep)
    async def frame_fes(name: str):
        return [_fe_json(fe) for fe in lexicon.fes_of_frame(name)]

    @app.get(f"{API_PREFIX}/lus", dependencies=dep)
    async def lus(lemma: str, pos: str | None = None):
        return [
            {"id": lu.id, "name": lu.name, "frame": lu.frame_id, "language": lu.language}
            for lu in lexicon.lus_by_lemma(lemma, pos)
        ]

    # -- corpora and documents --------------------------------------------------

    @app.get(f"{API_PREFIX}/corpora", dependencies=dep)
    async def corpora():
        return service.list_corpora()

    @app.post(f"{API_PREFIX}/corpora", dependencies=dep, status_code=201)
    async def create_corpus(body: dict):
        service.create_corpus(str(body.get("name", "")))
        return {"name": body["name"]}

    @app.post(f"{API_PREFIX}/corpora/{{corpus}}/import-static", dependencies=dep, status_code=201)
    async def import_static(corpus: str, request: Request, name: str = "bundle"):
        payload = await request.body()
        docs = service.import_static_bundle(corpus, payload, name)
        return {"documents": docs}

    @app.post(f"{API_PREFIX}/corpora/{{corpus}}/import-video", dependencies=dep, status_code=201)
    async def import_video(corpus: str, body: dict):
        doc_id = service.import_video(
            corpus,
            transcript=str(body.get("transcript", "")).encode(),
            subtitles=str(body.get("subtitles", "")).encode(),
            detections=str(body.get("detections", "")).encode(),
            fps=int(body.get("fps", 25)),
            width=int(body.get("width", 0)),
            height=int(body.get("height", 0)),
            frame_count=body.get("frame_count"),
            doc_id=body.get("doc_id"),
            media=str(body.get("media", "video")),
            first_object_id=int(body.get("first_object_id", 1)),
        )
        return {"doc_id": doc_id}

    @app.post(f"{API_PREFIX}/corpora/{{corpus}}/import", dependencies=dep, status_code=201)
    async def import_document(corpus: str, request: Request):
        doc_id = service.import_document(corpus, await request.body())
        return {"doc_id": doc_id}

    @app.get(f"{API_PREFIX}/corpora/{{corpus}}/docs", dependencies=dep)
    async def documents(corpus: str):
        return service.list_documents(corpus)

    @app.get(f"{API_PREFIX}/corpora/{{corpus}}/docs/{{doc}}", dependencies=dep)
    async def document(corpus: str, doc: str):
        return service.document_json(corpus, doc)

    @app.get(f"{API_PREFIX}/corpora/{{corpus}}/docs/{{doc}}/export", dependencies=dep)
    async def export_document(corpus: str, doc: str):
        return Response(content=service.export_document(corpus, doc),
                        media_type="application/xml")

    @app.post(f"{API_PREFIX}/corpora/{{corpus}}/docs/{{doc}}/preannotate", dependencies=dep)
    async def preannotate(corpus: str, doc: str):
        return service.preannotate(corpus, doc)

    # -- drafts -------------------------------------------------------------------

    @app.get(f"{API_PREFIX}/corpora/{{corpus}}/docs/{{doc}}/drafts", dependencies=dep)
    async def drafts(corpus: str, doc: str):
        return service.document_json(corpus, doc)["drafts"]

    @app.patch(f"{API_PREFIX}/corpora/{{corpus}}/docs/{{doc}}/drafts/{{draft_id}}", dependencies=dep)
    async def edit_draft(corpus: str, doc: str, draft_id: int, body: dict):
        return service.edit_draft(corpus, doc, draft_id, body,
                                  expected_revision=int(body.get("revision", 0)))

    # -- detections ------------------------------------------------------------------

    @app.get(f"{API_PREFIX}/corpora/{{corpus}}/docs/{{doc}}/detections", dependencies=dep)
    async def detections(corpus: str, doc: str):
        return service.document_json(corpus, doc)["detections"]

    @app.post(f"{API_PREFIX}/corpora/{{corpus}}/docs/{{doc}}/detections/{{det_id}}/accept",
              dependencies=dep)
    async def accept_detection(corpus: str, doc: str, det_id: int, body: dict):
        return service.accept_detection(corpus, doc, det_id,
                                        expected_revision=int(body.get("revision", 0)))

    @app.delete(f"{API_PREFIX}/corpora/{{corpus}}/docs/{{doc}}/detections/{{det_id}}",
                dependencies=dep)
    async def delete_detection(corpus: str, doc: str, det_id: int, revision: int):
        return service.delete_detection(corpus, doc, det_id, expected_revision=revision)

    # -- objects / tracking --------------------------------------------------------------

    @app.post(f"{API_PREFIX}/corpora/{{corpus}}/docs/{{doc}}/objects", dependencies=dep,
              status_code=201)
    async def create_object(corpus: str, doc: str, body: dict):
        return service.create_object(
            corpus, doc,
            frame_index=int(body.get("frame_index", 0)),
            box=_box_from_body(body.get("box")),
            origin=str(body.get("origin", "human")),
        )

    @app.patch(f"{API_PREFIX}/corpora/{{corpus}}/docs/{{doc}}/objects/{{object_id}}",
               dependencies=dep)
    async def track_op(corpus: str, doc: str, object_id: int, body: dict):
        box = _box_from_body(body["box"]) if body.get("box") is not None else None
        return service.track_op(
            corpus, doc, object_id,
            op=str(body.get("op", "")),
            expected_revision=int(body.get("revision", 0)),
            frame_index=body.get("frame_index"),
            box=box,
            until_frame=body.get("until_frame"),
        )

    @app.delete(f"{API_PREFIX}/corpora/{{corpus}}/docs/{{doc}}/objects/{{object_id}}",
                dependencies=dep)
    async def delete_object(corpus: str, doc: str, object_id: int, revision: int):
        return service.delete_object(corpus, doc, object_id, expected_revision=revision)

    @app.get(f"{API_PREFIX}/corpora/{{corpus}}/docs/{{doc}}/boxes", dependencies=dep)
    async def boxes_at_frame(corpus: str, doc: str, frame: int):
        return service.boxes_at_frame(corpus, doc, frame)

    # -- annotations -----------------------------------------------------------------------

    @app.post(f"{API_PREFIX}/corpora/{{corpus}}/docs/{{doc}}/annotations", dependencies=dep,
              status_code=201)
    async def create_annotation(corpus: str, doc: str, body: dict):
        kind = body.get("kind", "text")
        if kind == "text":
            return service.create_text_annotation(
                corpus, doc,
                sentence_ref=int(body.get("sentence_ref", 0)),
                target_start=int(body.get("target_start", -1)),
                target_end=int(body.get("target_end", -1)),
                frame=str(body.get("frame", "")),
            )
        if kind == "image":
            return service.annotate_object(
                corpus, doc,
                object_ref=int(body.get("object_ref", 0)),
                frame=str(body.get("frame", "")),
                fe=str(body.get("fe", "")),
                cv_name=body.get("cv_name"),
                provenance=str(body.get("provenance", "human")),
            )
        raise CharonetteError(f"unknown annotation kind {kind!r}", field="kind")

    @app.patch(f"{API_PREFIX}/corpora/{{corpus}}/docs/{{doc}}/annotations/{{as_id}}",
               dependencies=dep)
    async def patch_annotation(corpus: str, doc: str, as_id: int, body: dict):
        op = body.get("op")
        revision = int(body.get("revision", 0))
        if op == "set_layer_label":
            return service.set_layer_label(
                corpus, doc, as_id,
                layer=str(body.get("layer", "")),
                start=int(body.get("start", -1)),
                end=int(body.get("end", -1)),
                label=str(body.get("label", "")),
                expected_revision=revision,
            )
        if op == "mark_ni":
            return service.mark_ni(
                corpus, doc, as_id,
                fe=str(body.get("fe", "")),
                ni_type=str(body.get("ni_type", "")),
                expected_revision=revision,
            )
        raise CharonetteError(f"unknown annotation operation {op!r}", field="op")

    @app.post(f"{API_PREFIX}/corpora/{{corpus}}/docs/{{doc}}/correlations", dependencies=dep,
              status_code=201)
    async def add_correlation(corpus: str, doc: str, body: dict):
        return service.add_correlation(
            corpus, doc,
            object_ref=int(body.get("object_ref", 0)),
            sentence_ref=int(body.get("sentence_ref", 0)),
            start=int(body.get("start", -1)),
            end=int(body.get("end", -1)),
        )

    # serve the companion UI when its build output is present
    for candidate in (Path(__file__).resolve().parents[2] / "frontend" / "dist",
                      Path("frontend/dist")):
        if candidate.is_dir():
            app.mount("/", StaticFiles(directory=str(candidate), html=True), name="ui")
            break

    return app
