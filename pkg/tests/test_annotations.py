import pytest

from charonette.annotations import (
    BadSpanError,
    CvNameError,
    FeNotInFrameError,
    InvalidLabelError,
    LayerOverlapError,
    NiError,
    UnknownFrameError,
    UnknownLayerError,
    annotate_image_target,
    correlate,
    create_text_as,
    mark_ni,
    set_layer_label,
    sweep_validate,
)

ARRIVAL_SENTENCE = "Então, acabei de chegar em Reykjavik, na Islândia."
DRINKING_SENTENCE = "Bom que aqui a gente bebe e vai esquentando, né?"


def span_of(sentence, phrase):
    start = sentence.index(phrase)
    return start, start + len(phrase)


def test_create_as_with_empty_layers(lex):
    start, end = span_of(ARRIVAL_SENTENCE, "chegar")
    aset = create_text_as(lex, ARRIVAL_SENTENCE, 1, start, end, "Arriving", as_id=1)
    assert aset.layers == {"FE": [], "GF": [], "PT": []}
    assert aset.ni_entries == []
    assert aset.frame_id == "Arriving"


def test_create_as_span_out_of_bounds(lex):
    with pytest.raises(BadSpanError):
        create_text_as(lex, "short", 1, 2, 99, "Arriving", as_id=1)
    with pytest.raises(BadSpanError):
        create_text_as(lex, "short", 1, 3, 3, "Arriving", as_id=1)


def test_create_as_unknown_frame(lex):
    with pytest.raises(UnknownFrameError):
        create_text_as(lex, ARRIVAL_SENTENCE, 1, 0, 5, "Zork", as_id=1)


def test_two_sets_on_one_sentence(lex):
    s1 = span_of(ARRIVAL_SENTENCE, "acabei")
    s2 = span_of(ARRIVAL_SENTENCE, "chegar")
    a = create_text_as(lex, ARRIVAL_SENTENCE, 1, *s1, "Activity_finish", as_id=1)
    b = create_text_as(lex, ARRIVAL_SENTENCE, 1, *s2, "Arriving", as_id=2)
    assert a.as_id != b.as_id


def test_fe_label_must_belong_to_frame(lex):
    start, end = span_of(ARRIVAL_SENTENCE, "chegar")
    aset = create_text_as(lex, ARRIVAL_SENTENCE, 1, start, end, "Arriving", as_id=1)
    goal = span_of(ARRIVAL_SENTENCE, "em Reykjavik")
    set_layer_label(lex, ARRIVAL_SENTENCE, aset, "FE", *goal, "Goal")
    assert aset.layers["FE"][0].label == "Goal"
    with pytest.raises(FeNotInFrameError):
        set_layer_label(lex, ARRIVAL_SENTENCE, aset, "FE", 0, 5, "Ingestor")


def test_gf_pt_vocabularies(lex):
    start, end = span_of(ARRIVAL_SENTENCE, "chegar")
    aset = create_text_as(lex, ARRIVAL_SENTENCE, 1, start, end, "Arriving", as_id=1)
    goal = span_of(ARRIVAL_SENTENCE, "em Reykjavik")
    set_layer_label(lex, ARRIVAL_SENTENCE, aset, "GF", *goal, "Dep")
    set_layer_label(lex, ARRIVAL_SENTENCE, aset, "PT", *goal, "PP")
    with pytest.raises(InvalidLabelError):
        set_layer_label(lex, ARRIVAL_SENTENCE, aset, "GF", 0, 5, "Goal")
    with pytest.raises(InvalidLabelError):
        set_layer_label(lex, ARRIVAL_SENTENCE, aset, "PT", 0, 5, "Blob")
    with pytest.raises(UnknownLayerError):
        set_layer_label(lex, ARRIVAL_SENTENCE, aset, "XX", 0, 5, "NP")


def test_overlapping_spans_rejected_per_layer(lex):
    start, end = span_of(ARRIVAL_SENTENCE, "chegar")
    aset = create_text_as(lex, ARRIVAL_SENTENCE, 1, start, end, "Arriving", as_id=1)
    set_layer_label(lex, ARRIVAL_SENTENCE, aset, "PT", 0, 10, "NP")
    with pytest.raises(LayerOverlapError):
        set_layer_label(lex, ARRIVAL_SENTENCE, aset, "PT", 5, 15, "PP")
    # same span on another layer is fine
    set_layer_label(lex, ARRIVAL_SENTENCE, aset, "GF", 5, 15, "Ext")


def test_mark_ni_on_unlabeled_core_fe(lex):
    start, end = span_of(DRINKING_SENTENCE, "bebe")
    aset = create_text_as(lex, DRINKING_SENTENCE, 1, start, end, "Ingestion", as_id=1)
    mark_ni(lex, aset, "Ingestibles", "DNI")
    assert aset.ni_entries[0].fe == "Ingestibles"


def test_mark_ni_rejects_labeled_fe(lex):
    start, end = span_of(DRINKING_SENTENCE, "bebe")
    aset = create_text_as(lex, DRINKING_SENTENCE, 1, start, end, "Ingestion", as_id=1)
    ingestor = span_of(DRINKING_SENTENCE, "a gente")
    set_layer_label(lex, DRINKING_SENTENCE, aset, "FE", *ingestor, "Ingestor")
    with pytest.raises(NiError):
        mark_ni(lex, aset, "Ingestor", "DNI")


def test_mark_ni_rejects_noncore_and_bad_type(lex):
    start, end = span_of(DRINKING_SENTENCE, "bebe")
    aset = create_text_as(lex, DRINKING_SENTENCE, 1, start, end, "Ingestion", as_id=1)
    with pytest.raises(NiError):
        mark_ni(lex, aset, "Manner", "DNI")
    with pytest.raises(NiError):
        mark_ni(lex, aset, "Ingestibles", "XYZ")


def test_fe_label_blocked_after_ni(lex):
    start, end = span_of(DRINKING_SENTENCE, "bebe")
    aset = create_text_as(lex, DRINKING_SENTENCE, 1, start, end, "Ingestion", as_id=1)
    mark_ni(lex, aset, "Ingestibles", "DNI")
    with pytest.raises(NiError):
        set_layer_label(lex, DRINKING_SENTENCE, aset, "FE", 0, 3, "Ingestibles")


def test_annotate_image_target(lex):
    ia = annotate_image_target(lex, 325, "Ingestion", "Ingestibles", "Container/glass.n", ia_id=1)
    assert ia.frame_id == "Ingestion"
    assert ia.fe == "Ingestibles"
    assert ia.cv_name == "Container/glass.n"


def test_annotate_entity_for_leisure_frame(lex):
    ia = annotate_image_target(lex, 1, "People_by_leisure_activity", "Person", None, ia_id=2)
    assert ia.fe == "Person"


def test_fe_frame_mismatch_rejected(lex):
    with pytest.raises(FeNotInFrameError):
        annotate_image_target(lex, 1, "People", "Ingestor", None, ia_id=1)


def test_non_noun_cv_name_rejected(lex):
    with pytest.raises(CvNameError):
        annotate_image_target(lex, 1, "Ingestion", "Ingestor", "Ingestion/drink.v", ia_id=1)


def test_correlate(lex):
    span = span_of(DRINKING_SENTENCE, "a gente")
    corr = correlate(DRINKING_SENTENCE, 323, 1, *span)
    assert (corr.start, corr.end) == span
    with pytest.raises(BadSpanError):
        correlate(DRINKING_SENTENCE, 323, 1, 10, 400)


def test_sweep_validator_clean_and_dirty(lex):
    start, end = span_of(DRINKING_SENTENCE, "bebe")
    aset = create_text_as(lex, DRINKING_SENTENCE, 1, start, end, "Ingestion", as_id=1)
    mark_ni(lex, aset, "Ingestibles", "DNI")
    ia = annotate_image_target(lex, 323, "Ingestion", "Ingestor", None, ia_id=1)
    sentences = {1: DRINKING_SENTENCE}
    assert sweep_validate(lex, sentences, [aset], [ia], known_objects={323}) == []
    # breaking the store by hand must be caught
    aset.frame_id = "People"
    problems = sweep_validate(lex, sentences, [aset], [ia], known_objects=set())
    assert problems  # wrong-frame FE/NI and dangling object
