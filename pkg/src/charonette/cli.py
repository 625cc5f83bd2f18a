"""Command-line entry point.

Verbs: serve, lexicon validate, import-static, import-video, preannotate,
export, import. Data directory and lexicon default from CHARONETTE_DATA_DIR
and CHARONETTE_LEXICON (falling back to the bundled fixture lexicon).
"""

from __future__ import annotations

import sys

import click

from .documents import AnnotationService
from .errors import CharonetteError
from .lexicon import bundled_lexicon_path, load_lexicon_path
from .store import RecordStore


def _service(data_dir: str, lexicon_path: str | None) -> AnnotationService:
    lexicon = load_lexicon_path(lexicon_path or bundled_lexicon_path())
    return AnnotationService(RecordStore(data_dir), lexicon)


def _ensure_corpus(service: AnnotationService, corpus: str) -> None:
    if not service.store.has_corpus(corpus):
        service.create_corpus(corpus)


data_dir_option = click.option(
    "--data-dir", envvar="CHARONETTE_DATA_DIR", default="./data", show_default=True,
    help="Record store root directory.")
lexicon_option = click.option(
    "--lexicon", "lexicon_path", envvar="CHARONETTE_LEXICON", default=None,
    help="Lexicon file (defaults to the bundled fixture lexicon).")


@click.group()
def main():
    """Frame-semantic annotation backend for picture-caption and video corpora."""


@main.group()
def lexicon():
    """Lexicon utilities."""


@lexicon.command("validate")
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
def lexicon_validate(path):
    """Validate a lexicon file; exit 0 when it loads cleanly."""
    try:
        lex = load_lexicon_path(path)
    except CharonetteError as exc:
        click.echo(f"invalid: {exc}", err=True)
        sys.exit(1)
    click.echo(
        f"ok: {len(lex.frames)} frames, {len(lex.fes)} FEs, {len(lex.lus)} LUs, "
        f"{len(lex.relations)} relations, {len(lex.wordforms)} wordforms"
    )


@main.command("import-static")
@click.argument("bundle", type=click.Path(exists=True, dir_okay=False))
@click.option("--corpus", required=True)
@data_dir_option
@lexicon_option
def import_static(bundle, corpus, data_dir, lexicon_path):
    """Import a picture-caption bundle ZIP into a corpus."""
    service = _service(data_dir, lexicon_path)
    _ensure_corpus(service, corpus)
    with open(bundle, "rb") as fh:
        payload = fh.read()
    try:
        docs = service.import_static_bundle(corpus, payload, bundle_name=corpus)
    except CharonetteError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    for doc in docs:
        click.echo(doc)
    click.echo(f"imported {len(docs)} document(s) into corpus {corpus!r}")


@main.command("import-video")
@click.option("--corpus", required=True)
@click.option("--transcript", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--subtitles", type=click.Path(exists=True, dir_okay=False))
@click.option("--detections", type=click.Path(exists=True, dir_okay=False))
@click.option("--fps", default=25, show_default=True)
@click.option("--width", type=int, required=True)
@click.option("--height", type=int, required=True)
@click.option("--frames", "frame_count", type=int, default=None,
              help="Total frame count, when known.")
@click.option("--doc", "doc_id", default=None, help="Document id (generated when omitted).")
@click.option("--media", default="video")
@click.option("--first-object-id", default=1, show_default=True)
@data_dir_option
@lexicon_option
def import_video(corpus, transcript, subtitles, detections, fps, width, height,
                 frame_count, doc_id, media, first_object_id, data_dir, lexicon_path):
    """Import transcript/subtitle/detection streams as a video document."""
    service = _service(data_dir, lexicon_path)
    _ensure_corpus(service, corpus)

    def read(path):
        if not path:
            return b""
        with open(path, "rb") as fh:
            return fh.read()

    try:
        created = service.import_video(
            corpus, read(transcript), read(subtitles), read(detections),
            fps=fps, width=width, height=height, frame_count=frame_count,
            doc_id=doc_id, media=media, first_object_id=first_object_id,
        )
    except CharonetteError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    click.echo(created)


@main.command("preannotate")
@click.option("--corpus", required=True)
@click.option("--doc", "doc_id", default=None, help="Single document (all when omitted).")
@data_dir_option
@lexicon_option
def preannotate(corpus, doc_id, data_dir, lexicon_path):
    """Identify frame-evoking targets and assign candidate frames."""
    service = _service(data_dir, lexicon_path)
    docs = [doc_id] if doc_id else service.list_documents(corpus)
    click.echo(f"{'document':<24} {'targets':>8} {'ambiguous':>10}")
    totals = {"targets": 0, "ambiguous": 0}
    for doc in docs:
        try:
            summary = service.preannotate(corpus, doc)
        except CharonetteError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(1)
        click.echo(f"{doc:<24} {summary['targets']:>8} {summary['ambiguous']:>10}")
        totals["targets"] += summary["targets"]
        totals["ambiguous"] += summary["ambiguous"]
    click.echo(f"{'total':<24} {totals['targets']:>8} {totals['ambiguous']:>10}")


@main.command("export")
@click.option("--corpus", required=True)
@click.option("--doc", "doc_id", required=True)
@click.option("-o", "--output", type=click.Path(dir_okay=False), required=True)
@data_dir_option
@lexicon_option
def export(corpus, doc_id, output, data_dir, lexicon_path):
    """Export one document as canonical XML."""
    service = _service(data_dir, lexicon_path)
    try:
        payload = service.export_document(corpus, doc_id)
    except CharonetteError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    with open(output, "wb") as fh:
        fh.write(payload)
    click.echo(f"wrote {output} ({len(payload)} bytes)")


@main.command("import")
@click.option("-i", "--input", "input_path", type=click.Path(exists=True, dir_okay=False),
              required=True)
@click.option("--corpus", required=True)
@data_dir_option
@lexicon_option
def import_xml(input_path, corpus, data_dir, lexicon_path):
    """Import a previously exported XML document."""
    service = _service(data_dir, lexicon_path)
    _ensure_corpus(service, corpus)
    with open(input_path, "rb") as fh:
        payload = fh.read()
    try:
        doc_id = service.import_document(corpus, payload)
    except CharonetteError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    click.echo(doc_id)


@main.command("serve")
@click.option("--port", envvar="CHARONETTE_PORT", default=8787, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@data_dir_option
@lexicon_option
def serve(port, host, data_dir, lexicon_path):
    """Run the HTTP API (and the UI, when built)."""
    import uvicorn

    from .api import create_app

    app = create_app(data_dir=data_dir, lexicon_path=lexicon_path)
    uvicorn.run(app, host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()
