import collections

import pytest
from hypothesis import given, strategies as st

from charonette.errors import NotFoundError
from charonette.lexicon import (
    LexiconCycleError,
    LexiconIntegrityError,
    LexiconParseError,
    bundled_lexicon_path,
    load_lexicon,
    load_lexicon_path,
)

FIXTURE_FRAMES = [
    "Arriving",
    "Departing",
    "Vehicle_landing",
    "Ingestion",
    "People",
    "Container",
    "Desirability",
    "Locative_relation",
    "Change_of_temperature",
    "People_by_leisure_activity",
]


def test_fixture_contains_expected_frames(lex):
    names = {f.name for f in lex.frames}
    assert set(FIXTURE_FRAMES) <= names


def test_empty_lexicon_is_valid():
    lex = load_lexicon(b"frames: []\nlus: []\n")
    assert lex.frames == ()
    assert lex.lus == ()
    assert lex.gf_values == ("Ext", "Obj", "Dep")


def test_lu_referencing_missing_frame_is_integrity_error():
    doc = b"""
frames:
  - name: Arriving
    core_fes: [Theme]
lus:
  - {lemma: arrive, pos: v, frame: Nowhere, language: en}
"""
    with pytest.raises(LexiconIntegrityError) as err:
        load_lexicon(doc)
    assert "Nowhere" in str(err.value)


def test_inheritance_cycle_is_reported_with_path():
    doc = b"""
frames:
  - {name: A}
  - {name: B}
  - {name: C}
relations:
  - {type: inheritance, parent: A, child: B}
  - {type: inheritance, parent: B, child: C}
  - {type: inheritance, parent: C, child: A}
"""
    with pytest.raises(LexiconCycleError) as err:
        load_lexicon(doc)
    assert str(err.value).count("->") >= 3


def test_yaml_syntax_error_carries_position():
    with pytest.raises(LexiconParseError) as err:
        load_lexicon(b"frames:\n  - name: [unclosed\n")
    assert "line" in str(err.value)


def test_core_noncore_overlap_rejected():
    doc = b"""
frames:
  - name: X
    core_fes: [A]
    noncore_fes: [A]
"""
    with pytest.raises(LexiconIntegrityError):
        load_lexicon(doc)


def test_frame_by_name(lex):
    arriving = lex.frame_by_name("Arriving")
    fe_names = [lex.fe(i).name for i in arriving.core_fes]
    assert fe_names == ["Theme", "Goal"]
    assert lex.frame_by_name("") is None
    ingestion = lex.frame_by_name("Ingestion")
    assert [lex.fe(i).name for i in ingestion.core_fes] == ["Ingestor", "Ingestibles"]


def test_frame_by_name_round_trips_every_frame(lex):
    for frame in lex.frames:
        assert lex.frame_by_name(frame.name) is frame


def test_fes_of_frame_core_first(lex):
    fes = lex.fes_of_frame("Ingestion")
    assert [fe.name for fe in fes[:2]] == ["Ingestor", "Ingestibles"]
    assert all(fe.coreness == "noncore" for fe in fes[2:])


def test_fes_of_frame_unknown_id(lex):
    with pytest.raises(NotFoundError):
        lex.fes_of_frame("NoSuchFrame")


def test_fes_of_empty_frame():
    lex = load_lexicon(b"frames:\n  - {name: Bare}\n")
    assert lex.fes_of_frame("Bare") == []


def test_lus_by_lemma(lex):
    assert [lu.frame_id for lu in lex.lus_by_lemma("arrive", "v")] == ["Arriving"]
    assert [lu.id for lu in lex.lus_by_lemma("person", "n")] == ["People/person.n"]
    assert lex.lus_by_lemma("zzz") == []
    # deterministic (frame name, pos) ordering for ambiguous lemmas
    assert [lu.frame_id for lu in lex.lus_by_lemma("land")] == ["Arriving", "Vehicle_landing"]


def test_related_frames(lex):
    assert [f.name for f in lex.related_frames("Arriving", "inheritance", "as_parent")] == ["Vehicle_landing"]
    assert [f.name for f in lex.related_frames("Arriving", "precedence", "as_child")] == ["Departing"]
    assert lex.related_frames("Arriving", "using", "as_parent") == []
    with pytest.raises(NotFoundError):
        lex.related_frames("NoSuchFrame", "inheritance", "as_parent")


def test_related_frames_direction_consistency(lex):
    types = {rel.relation_type for rel in lex.relations}
    for frame in lex.frames:
        for rel_type in types:
            for child in lex.related_frames(frame.id, rel_type, "as_parent"):
                parents = lex.related_frames(child.id, rel_type, "as_child")
                assert frame in parents


def test_every_fe_listed_by_exactly_one_frame(lex):
    counts = collections.Counter()
    for frame in lex.frames:
        for fe_id in frame.core_fes + frame.noncore_fes:
            counts[fe_id] += 1
    assert set(counts) == {fe.id for fe in lex.fes}
    assert all(n == 1 for n in counts.values())


def test_inheritance_topological_sort_succeeds(lex):
    edges = [(r.parent, r.child) for r in lex.relations if r.relation_type == "inheritance"]
    nodes = {f.id for f in lex.frames}
    indeg = {n: 0 for n in nodes}
    for _, child in edges:
        indeg[child] += 1
    queue = [n for n in nodes if indeg[n] == 0]
    seen = 0
    while queue:
        node = queue.pop()
        seen += 1
        for parent, child in edges:
            if parent == node:
                indeg[child] -= 1
                if indeg[child] == 0:
                    queue.append(child)
    assert seen == len(nodes)


def test_load_is_deterministic():
    with open(bundled_lexicon_path(), "rb") as fh:
        data = fh.read()
    assert load_lexicon(data) == load_lexicon(data)


def test_wordform_lookup_folds_case(lex):
    entries = lex.resolve_wordform("Bom")
    assert [(e.lemma, e.pos) for e in entries] == [("bom", "a")]


def test_wordform_with_unknown_lemma_must_be_flagged():
    doc = b"""
frames:
  - {name: F}
wordforms:
  - {form: zork, lemma: zork, pos: n}
"""
    with pytest.raises(LexiconIntegrityError):
        load_lexicon(doc)


@given(st.text(max_size=30))
def test_frame_by_name_never_raises(name):
    lex = load_lexicon_path(bundled_lexicon_path())
    found = lex.frame_by_name(name)
    assert found is None or found.name == name
