"""Durable record store with optimistic concurrency.

Each corpus is a directory holding an append-only JSON-lines log plus
compacted snapshots; the in-memory index is rebuilt from the newest snapshot
and the log tail on open. Every record is addressed by (corpus, document,
kind, id) and carries a revision that increments by exactly one per
successful write; writers must present the current revision (0 to create),
and stale writes fail with a conflict without touching the store. Deletes
are tombstones, so ids are never reused and audits can see removals.

A torn trailing log line (interrupted write) is ignored on recovery, which
gives record-granularity atomicity: a write is either fully applied or
absent.
"""

from __future__ import annotations

import json
import os
import re
import threading
from dataclasses import dataclass
from pathlib import Path

from .errors import CharonetteError, ConflictError, NotFoundError

_CORPUS_NAME_RE = re.compile(r"^[A-Za-z0-9._-]+$")


class StoreError(CharonetteError):
    code = "store_invalid"
    status = 400


@dataclass
class StoredRecord:
    doc: str
    kind: str
    rec_id: int
    revision: int
    payload: dict
    deleted: bool = False

    @property
    def key(self) -> tuple[str, str, int]:
        return (self.doc, self.kind, self.rec_id)


class _CorpusState:
    def __init__(self):
        self.records: dict[tuple[str, str, int], StoredRecord] = {}


class RecordStore:
    """One data directory containing any number of corpora."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._lock = threading.RLock()
        self._corpora: dict[str, _CorpusState] = {}
        for entry in sorted(self.root.iterdir()):
            if entry.is_dir() and (entry / "log.jsonl").exists():
                self._corpora[entry.name] = self._load_corpus(entry)

    # -- corpus management ---------------------------------------------------

    def create_corpus(self, name: str) -> None:
        if not _CORPUS_NAME_RE.match(name or ""):
            raise StoreError(f"invalid corpus name {name!r}")
        with self._lock:
            if name in self._corpora:
                raise ConflictError(f"corpus {name!r} already exists")
            corpus_dir = self.root / name
            (corpus_dir / "snapshots").mkdir(parents=True, exist_ok=True)
            (corpus_dir / "log.jsonl").touch()
            self._corpora[name] = _CorpusState()

    def list_corpora(self) -> list[str]:
        with self._lock:
            return sorted(self._corpora)

    def has_corpus(self, name: str) -> bool:
        return name in self._corpora

    def _corpus(self, name: str) -> _CorpusState:
        state = self._corpora.get(name)
        if state is None:
            raise NotFoundError(f"unknown corpus {name!r}", field="corpus")
        return state

    # -- record access ---------------------------------------------------------

    def get(self, corpus: str, doc: str, kind: str, rec_id: int) -> StoredRecord | None:
        with self._lock:
            record = self._corpus(corpus).records.get((doc, kind, rec_id))
            if record is None or record.deleted:
                return None
            return record

    def get_any(self, corpus: str, doc: str, kind: str, rec_id: int) -> StoredRecord | None:
        """Like get, but tombstones are returned too (audit / recreate path)."""
        with self._lock:
            return self._corpus(corpus).records.get((doc, kind, rec_id))

    def list_records(self, corpus: str, doc: str, kind: str | None = None,
                     include_deleted: bool = False) -> list[StoredRecord]:
        with self._lock:
            out = [
                rec
                for rec in self._corpus(corpus).records.values()
                if rec.doc == doc
                and (kind is None or rec.kind == kind)
                and (include_deleted or not rec.deleted)
            ]
            out.sort(key=lambda r: (r.kind, r.rec_id))
            return out

    def list_documents(self, corpus: str) -> list[str]:
        with self._lock:
            docs = {rec.doc for rec in self._corpus(corpus).records.values() if not rec.deleted}
            return sorted(docs)

    def next_id(self, corpus: str, doc: str, kind: str) -> int:
        """Smallest id above every id ever used for this kind (tombstones
        included, so ids are never reused)."""
        with self._lock:
            used = [
                rec.rec_id
                for rec in self._corpus(corpus).records.values()
                if rec.doc == doc and rec.kind == kind
            ]
            return max(used, default=0) + 1

    # -- writes -------------------------------------------------------------------

    def put(self, corpus: str, doc: str, kind: str, rec_id: int,
            payload: dict, expected_revision: int) -> int:
        with self._lock:
            state = self._corpus(corpus)
            current = state.records.get((doc, kind, rec_id))
            current_rev = current.revision if current else 0
            if expected_revision != current_rev:
                raise ConflictError(
                    f"stale revision for {kind} {rec_id}: expected {current_rev},"
                    f" got {expected_revision}"
                )
            record = StoredRecord(doc, kind, rec_id, current_rev + 1, payload, deleted=False)
            self._append(corpus, record)
            state.records[record.key] = record
            return record.revision

    def delete(self, corpus: str, doc: str, kind: str, rec_id: int,
               expected_revision: int) -> int:
        with self._lock:
            state = self._corpus(corpus)
            current = state.records.get((doc, kind, rec_id))
            if current is None or current.deleted:
                raise NotFoundError(f"no {kind} record {rec_id} to delete")
            if expected_revision != current.revision:
                raise ConflictError(
                    f"stale revision for {kind} {rec_id}: expected {current.revision},"
                    f" got {expected_revision}"
                )
            record = StoredRecord(doc, kind, rec_id, current.revision + 1, {}, deleted=True)
            self._append(corpus, record)
            state.records[record.key] = record
            return record.revision

    # -- durability ------------------------------------------------------------------

    def _log_path(self, corpus: str) -> Path:
        return self.root / corpus / "log.jsonl"

    def _append(self, corpus: str, record: StoredRecord) -> None:
        line = json.dumps(
            {
                "doc": record.doc,
                "kind": record.kind,
                "id": record.rec_id,
                "rev": record.revision,
                "deleted": record.deleted,
                "payload": record.payload,
            },
            ensure_ascii=False,
            sort_keys=True,
        )
        with open(self._log_path(corpus), "a", encoding="utf-8") as fh:
            fh.write(line + "\n")
            fh.flush()
            os.fsync(fh.fileno())

    def _load_corpus(self, corpus_dir: Path) -> _CorpusState:
        state = _CorpusState()
        snapshot = self._latest_snapshot(corpus_dir)
        if snapshot is not None:
            with open(snapshot, encoding="utf-8") as fh:
                for entry in json.load(fh)["records"]:
                    rec = _record_from_entry(entry)
                    state.records[rec.key] = rec
        log_path = corpus_dir / "log.jsonl"
        data = log_path.read_bytes()
        pos = 0
        good = 0
        while pos < len(data):
            newline = data.find(b"\n", pos)
            if newline == -1:
                break  # torn trailing write, no terminator
            try:
                rec = _record_from_entry(json.loads(data[pos:newline].decode("utf-8")))
            except (json.JSONDecodeError, KeyError, UnicodeDecodeError):
                break  # interrupted or corrupt line; everything before it is intact
            state.records[rec.key] = rec
            pos = newline + 1
            good = pos
        if good < len(data):
            # drop the torn tail so later appends start on a clean line
            with open(log_path, "r+b") as fh:
                fh.truncate(good)
        return state

    @staticmethod
    def _latest_snapshot(corpus_dir: Path) -> Path | None:
        snaps = sorted((corpus_dir / "snapshots").glob("snapshot-*.json"))
        return snaps[-1] if snaps else None

    def compact(self, corpus: str) -> Path:
        """Fold the log into a fresh snapshot and truncate the log."""
        with self._lock:
            state = self._corpus(corpus)
            corpus_dir = self.root / corpus
            previous = self._latest_snapshot(corpus_dir)
            seq = 1
            if previous is not None:
                seq = int(previous.stem.split("-")[1]) + 1
            target = corpus_dir / "snapshots" / f"snapshot-{seq:06d}.json"
            body = {
                "records": [
                    {
                        "doc": rec.doc,
                        "kind": rec.kind,
                        "id": rec.rec_id,
                        "rev": rec.revision,
                        "deleted": rec.deleted,
                        "payload": rec.payload,
                    }
                    for key, rec in sorted(state.records.items())
                ]
            }
            tmp = target.with_suffix(".tmp")
            with open(tmp, "w", encoding="utf-8") as fh:
                json.dump(body, fh, ensure_ascii=False, sort_keys=True)
                fh.flush()
                os.fsync(fh.fileno())
            os.replace(tmp, target)
            with open(self._log_path(corpus), "w", encoding="utf-8") as fh:
                fh.truncate(0)
            return target


def _record_from_entry(entry: dict) -> StoredRecord:
    return StoredRecord(
        doc=entry["doc"],
        kind=entry["kind"],
        rec_id=entry["id"],
        revision=entry["rev"],
        payload=entry["payload"],
        deleted=entry["deleted"],
    )
