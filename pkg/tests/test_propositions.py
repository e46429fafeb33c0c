"""Sentence extraction, tuple conversion, and proposition filling."""

import json

import pytest

from dispersion.errors import InputError
from dispersion.model import Document, Proposition, Summary, Topic, normalize_ws
from dispersion.propositions import (
    ExtractionTuple,
    ExtractorConfig,
    TextSpan,
    ensure_propositions,
    extract_sentences,
    tuple_to_proposition,
)


def test_splits_on_terminal_followed_by_uppercase():
    config = ExtractorConfig(min_tokens=1)
    props = extract_sentences("It melted. Seas rose! Why?", config)
    assert [p.text for p in props] == ["It melted.", "Seas rose!", "Why?"]
    assert [p.id for p in props] == ["s0", "s1", "s2"]


def test_abbreviations_do_not_end_sentences():
    config = ExtractorConfig(min_tokens=1)
    props = extract_sentences("Dr. Smith spoke.", config)
    assert [p.text for p in props] == ["Dr. Smith spoke."]


def test_min_tokens_filters_short_sentences():
    config = ExtractorConfig(min_tokens=3)
    assert extract_sentences("Ok.", config) == []


def test_no_split_without_following_uppercase_or_digit():
    config = ExtractorConfig(min_tokens=1)
    props = extract_sentences("pH was 7.4 at night. the lab closed.", config)
    # "night. the" starts lowercase; "7.4" has no whitespace after the dot
    assert len(props) == 1


def test_split_before_digit():
    config = ExtractorConfig(min_tokens=1)
    props = extract_sentences("Results follow. 3 sites melted.", config)
    assert [p.text for p in props] == ["Results follow.", "3 sites melted."]


def test_spans_slice_back_to_the_source_text():
    text = "  Ice melts fast.   Oceans   rise\nquickly. Done.  "
    config = ExtractorConfig(min_tokens=1)
    for prop in extract_sentences(text, config):
        start, end = prop.char_span
        assert normalize_ws(text[start:end]) == prop.text


def test_extraction_is_deterministic():
    text = "One thing here. Another thing there. Dr. Who appears."
    config = ExtractorConfig()
    assert extract_sentences(text, config) == extract_sentences(text, config)


def test_tuple_components_ordered_by_offset():
    tup = ExtractionTuple(
        predicate=TextSpan("urged", 30, 35),
        arguments=(
            TextSpan("Indigenous Arctic people", 0, 24),
            TextSpan("European countries", 40, 58),
        ),
    )
    prop = tuple_to_proposition(tup)
    assert prop.text == "Indigenous Arctic people urged European countries"
    assert prop.char_span == (0, 58)


def test_tuple_single_argument_order():
    tup = ExtractionTuple(
        predicate=TextSpan("pred", 0, 4),
        arguments=(TextSpan("arg", 10, 13),),
    )
    assert tuple_to_proposition(tup).text == "pred arg"


def test_identical_tuples_get_distinct_ids():
    tup = ExtractionTuple(
        predicate=TextSpan("melts", 4, 9), arguments=(TextSpan("ice", 0, 3),)
    )
    a = tuple_to_proposition(tup, prop_id="t0")
    b = tuple_to_proposition(tup, prop_id="t1")
    assert a.text == b.text
    assert a.id != b.id


def test_tuple_missing_offsets_rejected():
    tup = ExtractionTuple(
        predicate=TextSpan("melts", None, None), arguments=()
    )
    with pytest.raises(InputError):
        tuple_to_proposition(tup)


def test_tuple_overlap_flag():
    overlapping = ExtractionTuple(
        predicate=TextSpan("a b", 0, 3), arguments=(TextSpan("b c", 2, 5),)
    )
    clean = ExtractionTuple(
        predicate=TextSpan("a", 0, 1), arguments=(TextSpan("c", 4, 5),)
    )
    assert overlapping.has_overlap()
    assert not clean.has_overlap()


def _raw_topic():
    return Topic(
        topic_id="t",
        documents=(
            Document(doc_id="d0", index=0, text="Ice melts fast. Seas rise now."),
            Document(
                doc_id="d1", index=1,
                propositions=(Proposition(id="x", text="already here"),),
            ),
        ),
        summaries=(
            Summary(summary_id="ref", kind="reference",
                    text="Ice melts fast everywhere."),
        ),
    )


def test_ensure_propositions_leaves_precomputed_topics_unchanged():
    topic = Topic(
        topic_id="t",
        documents=(
            Document(doc_id="d0", index=0,
                     propositions=(Proposition(id="a", text="one fact"),)),
        ),
        summaries=(
            Summary(summary_id="ref", kind="reference",
                    propositions=(Proposition(id="b", text="two facts"),)),
        ),
    )
    assert ensure_propositions(topic, ExtractorConfig()) == topic


def test_ensure_propositions_fills_raw_text_units():
    topic = ensure_propositions(_raw_topic(), ExtractorConfig(min_tokens=1))
    for doc in topic.documents:
        assert doc.propositions is not None
    for summary in topic.summaries:
        assert summary.propositions is not None


def test_ensure_propositions_touches_only_raw_units():
    before = _raw_topic()
    after = ensure_propositions(before, ExtractorConfig(min_tokens=1))
    # field-by-field diff: unit d1 had propositions and must be untouched
    assert after.documents[1] == before.documents[1]
    assert after.documents[0].propositions is not None
    assert after.documents[0].doc_id == before.documents[0].doc_id
    assert after.documents[0].text == before.documents[0].text
    assert after.summaries[0].propositions is not None
    assert after.summaries[0].text == before.summaries[0].text


def test_precomputed_mode_rejects_missing_propositions():
    config = ExtractorConfig(mode="precomputed")
    with pytest.raises(InputError):
        ensure_propositions(_raw_topic(), config)


def test_external_mode_requires_sidecar():
    with pytest.raises(InputError):
        ensure_propositions(_raw_topic(), ExtractorConfig(mode="external"))
    with pytest.raises(InputError, match="not found"):
        ensure_propositions(
            _raw_topic(),
            ExtractorConfig(mode="external", sidecar="/nonexistent/tuples.jsonl"),
        )


def test_external_mode_reads_tuples_from_sidecar(tmp_path):
    sidecar = tmp_path / "tuples.jsonl"
    records = [
        {
            "unit_id": "d0",
            "predicate": {"text": "melts", "start": 4, "end": 9},
            "arguments": [{"text": "Ice", "start": 0, "end": 3}],
        },
        {
            "unit_id": "ref",
            "predicate": {"text": "melts", "start": 4, "end": 9},
            "arguments": [{"text": "Ice", "start": 0, "end": 3},
                          {"text": "fast", "start": 10, "end": 14}],
        },
    ]
    sidecar.write_text("\n".join(json.dumps(r) for r in records) + "\n",
                       encoding="utf-8")
    topic = ensure_propositions(
        _raw_topic(), ExtractorConfig(mode="external", sidecar=sidecar)
    )
    assert [p.text for p in topic.documents[0].propositions] == ["Ice melts"]
    assert topic.documents[1].propositions[0].id == "x"
    assert [p.text for p in topic.summaries[0].propositions] == ["Ice melts fast"]
