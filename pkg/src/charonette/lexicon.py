"""Frame-semantic lexicon: frames, frame elements, lexical units and typed
frame relations.

The lexicon is loaded from a single YAML document (sections ``frames``,
``lus``, ``relations``, ``wordforms``, ``label_vocabularies``), fully
validated at load time, and immutable afterwards; reloading produces a new
instance. All annotation operations resolve frame/FE/LU references against
it.

Identifiers are opaque strings derived from names, which are unique by
invariant: a frame id is its name, an FE id is ``<frame>/<fe>``, an LU id is
``<frame>/<lemma>.<pos>``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import yaml

from .errors import CharonetteError, NotFoundError

POS_TAGS = ("v", "n", "a", "adv", "prep", "other")
RELATION_TYPES = (
    "inheritance",
    "precedence",
    "using",
    "subframe",
    "perspective_on",
    "causative_of",
    "inchoative_of",
)
DIRECTIONS = ("as_parent", "as_child")

# Default label vocabularies for the GF / PT annotation layers and for
# null-instantiation types; a lexicon file may override any of them.
DEFAULT_GF_VALUES = ("Ext", "Obj", "Dep")
DEFAULT_PT_VALUES = ("NP", "PP", "VPfin", "VPto", "AJP", "AVP", "Sfin")
DEFAULT_NI_TYPES = ("DNI", "CNI", "INI")


class LexiconParseError(CharonetteError):
    code = "lexicon_parse"
    status = 400


class LexiconIntegrityError(CharonetteError):
    code = "lexicon_integrity"
    status = 422


class LexiconCycleError(CharonetteError):
    code = "lexicon_cycle"
    status = 422


@dataclass(frozen=True)
class FrameElement:
    id: str
    name: str
    frame_id: str
    coreness: str  # "core" | "noncore"


@dataclass(frozen=True)
class Frame:
    id: str
    name: str
    definition: str
    core_fes: tuple[str, ...]  # FE ids, declaration order
    noncore_fes: tuple[str, ...]


@dataclass(frozen=True)
class LexicalUnit:
    id: str
    lemma: str
    pos: str
    frame_id: str
    language: str

    @property
    def name(self) -> str:
        return f"{self.lemma}.{self.pos}"


@dataclass(frozen=True)
class FrameRelation:
    relation_type: str
    parent: str  # frame id
    child: str  # frame id


@dataclass(frozen=True)
class WordformEntry:
    form: str
    lemma: str
    pos: str
    evoking: bool = True


@dataclass(frozen=True)
class Lexicon:
    frames: tuple[Frame, ...]
    fes: tuple[FrameElement, ...]
    lus: tuple[LexicalUnit, ...]
    relations: tuple[FrameRelation, ...]
    wordforms: tuple[WordformEntry, ...]
    gf_values: tuple[str, ...] = DEFAULT_GF_VALUES
    pt_values: tuple[str, ...] = DEFAULT_PT_VALUES
    ni_types: tuple[str, ...] = DEFAULT_NI_TYPES

    # lookup indexes, derived in __post_init__, excluded from equality
    _frames_by_name: dict = field(default_factory=dict, compare=False, repr=False)
    _fes_by_id: dict = field(default_factory=dict, compare=False, repr=False)
    _lus_by_lemma: dict = field(default_factory=dict, compare=False, repr=False)
    _wordforms_by_form: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        self._frames_by_name.update({f.name: f for f in self.frames})
        self._fes_by_id.update({fe.id: fe for fe in self.fes})
        for lu in self.lus:
            self._lus_by_lemma.setdefault(lu.lemma, []).append(lu)
        for wf in self.wordforms:
            self._wordforms_by_form.setdefault(wf.form, []).append(wf)

    # -- queries ------------------------------------------------------------

    def frame_by_name(self, name: str) -> Frame | None:
        """Exact-match frame lookup; None when no frame has that name."""
        return self._frames_by_name.get(name)

    def frame(self, frame_id: str) -> Frame:
        frame = self._frames_by_name.get(frame_id)
        if frame is None:
            raise NotFoundError(f"unknown frame id {frame_id!r}", field="frame")
        return frame

    def fe(self, fe_id: str) -> FrameElement:
        fe = self._fes_by_id.get(fe_id)
        if fe is None:
            raise NotFoundError(f"unknown frame element id {fe_id!r}", field="fe")
        return fe

    def fes_of_frame(self, frame_id: str) -> list[FrameElement]:
        """FEs of a frame, core first, then non-core, in declaration order."""
        frame = self.frame(frame_id)
        return [self._fes_by_id[i] for i in frame.core_fes + frame.noncore_fes]

    def fe_of_frame(self, frame_id: str, fe_name: str) -> FrameElement | None:
        return self._fes_by_id.get(f"{frame_id}/{fe_name}")

    def lus_by_lemma(self, lemma: str, pos: str | None = None) -> list[LexicalUnit]:
        """All LUs with the given lemma (and pos, when given), ordered by
        (frame name, pos)."""
        found = [lu for lu in self._lus_by_lemma.get(lemma, []) if pos is None or lu.pos == pos]
        return sorted(found, key=lambda lu: (lu.frame_id, lu.pos))

    def lu(self, lu_id: str) -> LexicalUnit:
        for lu in self.lus:
            if lu.id == lu_id:
                return lu
        raise NotFoundError(f"unknown lexical unit id {lu_id!r}", field="cv_name")

    def resolve_wordform(self, token: str) -> list[WordformEntry]:
        """Entries for a surface token; lookup is case-insensitive."""
        return list(self._wordforms_by_form.get(token.casefold(), []))

    def related_frames(self, frame_id: str, relation_type: str, direction: str) -> list[Frame]:
        """Frames one edge away from frame_id via the given relation type.

        direction "as_parent" treats frame_id as the parent and returns its
        children; "as_child" returns its parents. Results sorted by name.
        """
        self.frame(frame_id)
        if relation_type not in RELATION_TYPES:
            raise LexiconIntegrityError(f"unknown relation type {relation_type!r}", field="relation_type")
        if direction not in DIRECTIONS:
            raise LexiconIntegrityError(f"unknown direction {direction!r}", field="direction")
        names = set()
        for rel in self.relations:
            if rel.relation_type != relation_type:
                continue
            if direction == "as_parent" and rel.parent == frame_id:
                names.add(rel.child)
            elif direction == "as_child" and rel.child == frame_id:
                names.add(rel.parent)
        return [self._frames_by_name[n] for n in sorted(names)]


# -- loading -----------------------------------------------------------------


def _as_list(doc: dict, key: str) -> list:
    value = doc.get(key) or []
    if not isinstance(value, list):
        raise LexiconParseError(f"section {key!r} must be a list")
    return value


def _require(entry: dict, key: str, where: str) -> object:
    if not isinstance(entry, dict) or key not in entry:
        raise LexiconParseError(f"{where}: missing field {key!r}")
    return entry[key]


def load_lexicon(source: bytes | str) -> Lexicon:
    """Parse and validate a lexicon file, returning an immutable Lexicon.

    Raises LexiconParseError (with line/column for YAML syntax errors),
    LexiconIntegrityError naming any dangling reference, or
    LexiconCycleError listing one inheritance cycle.
    """
    if isinstance(source, bytes):
        source = source.decode("utf-8")
    try:
        doc = yaml.safe_load(source)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f" at line {mark.line + 1}, column {mark.column + 1}" if mark else ""
        raise LexiconParseError(f"invalid lexicon file{where}: {exc}") from exc
    if doc is None:
        doc = {}
    if not isinstance(doc, dict):
        raise LexiconParseError("lexicon file must be a mapping of sections")

    frames: list[Frame] = []
    fes: list[FrameElement] = []
    seen_frames: set[str] = set()
    for i, entry in enumerate(_as_list(doc, "frames")):
        name = str(_require(entry, "name", f"frames[{i}]"))
        if not name:
            raise LexiconParseError(f"frames[{i}]: empty frame name")
        if name in seen_frames:
            raise LexiconIntegrityError(f"duplicate frame name {name!r}")
        seen_frames.add(name)
        core = [str(n) for n in entry.get("core_fes") or []]
        noncore = [str(n) for n in entry.get("noncore_fes") or []]
        dup = set(core) & set(noncore)
        if dup:
            raise LexiconIntegrityError(
                f"frame {name!r}: FEs {sorted(dup)} listed as both core and non-core"
            )
        if len(set(core)) != len(core) or len(set(noncore)) != len(noncore):
            raise LexiconIntegrityError(f"frame {name!r}: duplicate FE name")
        for fe_name in core:
            fes.append(FrameElement(f"{name}/{fe_name}", fe_name, name, "core"))
        for fe_name in noncore:
            fes.append(FrameElement(f"{name}/{fe_name}", fe_name, name, "noncore"))
        frames.append(
            Frame(
                id=name,
                name=name,
                definition=str(entry.get("definition", "")),
                core_fes=tuple(f"{name}/{n}" for n in core),
                noncore_fes=tuple(f"{name}/{n}" for n in noncore),
            )
        )

    lus: list[LexicalUnit] = []
    seen_lus: set[str] = set()
    for i, entry in enumerate(_as_list(doc, "lus")):
        lemma = str(_require(entry, "lemma", f"lus[{i}]"))
        pos = str(_require(entry, "pos", f"lus[{i}]"))
        frame_name = str(_require(entry, "frame", f"lus[{i}]"))
        if lemma != lemma.lower():
            raise LexiconIntegrityError(f"lus[{i}]: lemma {lemma!r} must be lowercase")
        if pos not in POS_TAGS:
            raise LexiconIntegrityError(f"lus[{i}]: unknown pos {pos!r}")
        if frame_name not in seen_frames:
            raise LexiconIntegrityError(
                f"lexical unit {lemma}.{pos} references missing frame id {frame_name!r}"
            )
        lu_id = f"{frame_name}/{lemma}.{pos}"
        if lu_id in seen_lus:
            raise LexiconIntegrityError(f"duplicate lexical unit {lu_id!r}")
        seen_lus.add(lu_id)
        lus.append(LexicalUnit(lu_id, lemma, pos, frame_name, str(entry.get("language", "und"))))

    relations: list[FrameRelation] = []
    for i, entry in enumerate(_as_list(doc, "relations")):
        rel_type = str(_require(entry, "type", f"relations[{i}]"))
        parent = str(_require(entry, "parent", f"relations[{i}]"))
        child = str(_require(entry, "child", f"relations[{i}]"))
        if rel_type not in RELATION_TYPES:
            raise LexiconIntegrityError(f"relations[{i}]: unknown relation type {rel_type!r}")
        if parent == child:
            raise LexiconIntegrityError(f"relations[{i}]: parent and child are both {parent!r}")
        for frame_name in (parent, child):
            if frame_name not in seen_frames:
                raise LexiconIntegrityError(
                    f"relation {rel_type} references missing frame id {frame_name!r}"
                )
        relations.append(FrameRelation(rel_type, parent, child))
    _check_inheritance_acyclic(relations)

    lu_lemmas = {lu.lemma for lu in lus}
    wordforms: list[WordformEntry] = []
    seen_wf: set[tuple] = set()
    for i, entry in enumerate(_as_list(doc, "wordforms")):
        form = str(_require(entry, "form", f"wordforms[{i}]")).casefold()
        lemma = str(_require(entry, "lemma", f"wordforms[{i}]"))
        pos = str(_require(entry, "pos", f"wordforms[{i}]"))
        evoking = not bool(entry.get("non_evoking", False))
        if pos not in POS_TAGS:
            raise LexiconIntegrityError(f"wordforms[{i}]: unknown pos {pos!r}")
        if evoking and lemma not in lu_lemmas:
            raise LexiconIntegrityError(
                f"wordform {form!r} resolves to lemma {lemma!r} with no lexical unit"
                " and is not flagged non-evoking"
            )
        key = (form, lemma, pos)
        if key in seen_wf:
            continue
        seen_wf.add(key)
        wordforms.append(WordformEntry(form, lemma, pos, evoking))

    vocab = doc.get("label_vocabularies") or {}
    if not isinstance(vocab, dict):
        raise LexiconParseError("section 'label_vocabularies' must be a mapping")

    def _vocab(key: str, default: tuple[str, ...]) -> tuple[str, ...]:
        values = vocab.get(key)
        if values is None:
            return default
        if not isinstance(values, list) or not values:
            raise LexiconParseError(f"label_vocabularies.{key} must be a non-empty list")
        return tuple(str(v) for v in values)

    return Lexicon(
        frames=tuple(frames),
        fes=tuple(fes),
        lus=tuple(lus),
        relations=tuple(relations),
        wordforms=tuple(wordforms),
        gf_values=_vocab("gf", DEFAULT_GF_VALUES),
        pt_values=_vocab("pt", DEFAULT_PT_VALUES),
        ni_types=_vocab("ni", DEFAULT_NI_TYPES),
    )


def _check_inheritance_acyclic(relations: list[FrameRelation]) -> None:
    children: dict[str, list[str]] = {}
    for rel in relations:
        if rel.relation_type == "inheritance":
            children.setdefault(rel.parent, []).append(rel.child)

    WHITE, GREY, BLACK = 0, 1, 2
    color: dict[str, int] = {}
    stack_path: list[str] = []

    def visit(node: str) -> None:
        color[node] = GREY
        stack_path.append(node)
        for nxt in children.get(node, []):
            state = color.get(nxt, WHITE)
            if state == GREY:
                cycle = stack_path[stack_path.index(nxt):] + [nxt]
                raise LexiconCycleError("inheritance cycle: " + " -> ".join(cycle))
            if state == WHITE:
                visit(nxt)
        stack_path.pop()
        color[node] = BLACK

    for node in list(children):
        if color.get(node, WHITE) == WHITE:
            visit(node)


def load_lexicon_path(path) -> Lexicon:
    with open(path, "rb") as fh:
        return load_lexicon(fh.read())


def bundled_lexicon_path() -> str:
    """Path of the fixture lexicon shipped with the package."""
    from importlib.resources import files

    return str(files("charonette").joinpath("fixtures/lexicon.yaml"))
