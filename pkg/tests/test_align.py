"""Lexical scoring, the score cache, and the remote alignment client."""

import pytest

from dispersion.align import (
    LexicalScorer,
    RemoteScorer,
    ScoreCache,
    ScorerSpec,
    align_topic,
    lexical_score,
)
from dispersion.errors import InputError, ProtocolError, TransportError, ValidationError

from conftest import build_topic


# ---------------------------------------------------------------- lexical

def test_identical_texts_score_one():
    assert lexical_score("arctic ice melts", "arctic ice melts") == 1.0


def test_disjoint_texts_score_zero():
    assert lexical_score("arctic ice", "ocean level") == 0.0


def test_set_f1_hand_enumerated():
    # A = {global, warming, melts, arctic, ice}, B = {arctic, ice, melts}
    score = lexical_score("global warming melts arctic ice", "arctic ice melts")
    assert score == pytest.approx(2 * 3 / (5 + 3))


def test_normalization_ignores_case_and_punctuation():
    assert lexical_score("Arctic ice, melts!", "arctic ice melts") == 1.0


def test_duplicate_tokens_collapse():
    assert lexical_score("ice ice ice", "ice") == 1.0


def test_empty_after_normalization_scores_zero():
    assert lexical_score("...", "ice melts") == 0.0


def test_stopword_removal_changes_sets():
    spec = ScorerSpec(kind="lexical", remove_stopwords=True)
    # {ice, melts} vs {ice, melts} after removing "the"
    assert lexical_score("the ice melts", "ice melts", spec) == 1.0
    assert lexical_score("the ice melts", "ice melts") < 1.0


def test_scorer_spec_validation():
    with pytest.raises(ValidationError):
        ScorerSpec(tau=1.1)
    with pytest.raises(ValidationError):
        ScorerSpec(batch_size=0)
    with pytest.raises(ValidationError):
        ScorerSpec(kind="neural")


# ------------------------------------------------------------ align_topic

class CountingScorer:
    """Wraps the lexical scorer and counts batch invocations and pairs."""

    def __init__(self, spec=None):
        self._inner = LexicalScorer(spec)
        self.spec = self._inner.spec
        self.calls = 0
        self.pairs_scored = 0

    @property
    def scorer_id(self):
        return self._inner.scorer_id

    def score_batch(self, pairs):
        self.calls += 1
        self.pairs_scored += len(pairs)
        return self._inner.score_batch(pairs)


def test_align_topic_scores_every_pair():
    topic, _ = build_topic("t1", [{0, 1, 2}, {0, 1, 2}], m=2)
    # 2 summary props x 2 docs x 3 props each = 12 edges
    relation = align_topic(topic, "ref", LexicalScorer())
    assert len(relation.edges) == 12
    assert relation.scorer_id == "lexical"


def test_align_topic_keeps_subthreshold_scores():
    topic, _ = build_topic("t1", [{0}], m=2)
    relation = align_topic(topic, "ref", LexicalScorer())
    scores = sorted(e.score for e in relation.edges)
    assert scores[0] == 0.0 and scores[-1] == 1.0


def test_cache_soundness_on_equals_off():
    topic, _ = build_topic("t1", [{0, 1}, {1, 2}], m=3)
    without = align_topic(topic, "ref", LexicalScorer(), cache=None)
    with_cache = align_topic(topic, "ref", LexicalScorer(), cache=ScoreCache())
    assert without == with_cache


def test_warm_cache_makes_zero_scorer_calls():
    topic, _ = build_topic("t1", [{0, 1}, {1, 2}], m=3)
    cache = ScoreCache()
    first_scorer = CountingScorer()
    first = align_topic(topic, "ref", first_scorer, cache=cache)
    assert first_scorer.calls > 0
    second_scorer = CountingScorer()
    second = align_topic(topic, "ref", second_scorer, cache=cache)
    assert second_scorer.calls == 0
    assert second_scorer.pairs_scored == 0
    assert first == second


def test_cache_key_survives_id_renumbering_but_not_text_changes():
    a = ScoreCache.key_for("lexical", "ice  melts", "seas rise")
    b = ScoreCache.key_for("lexical", "ice melts", "seas  rise")
    c = ScoreCache.key_for("lexical", "ice melted", "seas rise")
    d = ScoreCache.key_for("other", "ice melts", "seas rise")
    assert a == b
    assert a != c and a != d


def test_align_topic_requires_propositions():
    from dispersion.model import Document, Summary, Topic

    topic = Topic(
        topic_id="t",
        documents=(Document(doc_id="d0", index=0, text="raw"),),
        summaries=(Summary(summary_id="ref", kind="reference", text="raw"),),
    )
    with pytest.raises(InputError):
        align_topic(topic, "ref", LexicalScorer())


# ----------------------------------------------------------------- remote

class FakePost:
    """Scripted transport double: a list of (status, body) or exceptions."""

    def __init__(self, script):
        self.script = list(script)
        self.requests = []

    def __call__(self, url, payload, timeout):
        self.requests.append((url, payload))
        action = self.script.pop(0)
        if isinstance(action, Exception):
            raise action
        return action


def _remote(script, batch_size=128, sleeps=None):
    spec = ScorerSpec(kind="remote", endpoint="http://aligner:9000",
                      batch_size=batch_size)
    recorded = sleeps if sleeps is not None else []
    return RemoteScorer(
        spec, post=FakePost(script), sleep=recorded.append
    ), recorded


def test_remote_scores_positionally():
    scorer, _ = _remote([(200, {"scores": [0.1, 0.2, 0.3]})])
    scores = scorer.score_batch([("a", "x"), ("b", "y"), ("c", "z")])
    assert scores == [0.1, 0.2, 0.3]


def test_remote_request_body_shape():
    post = FakePost([(200, {"scores": [0.5]})])
    spec = ScorerSpec(kind="remote", endpoint="http://aligner:9000")
    scorer = RemoteScorer(spec, post=post, sleep=lambda s: None)
    scorer.score_batch([("summary text", "doc text")])
    url, payload = post.requests[0]
    assert url == "http://aligner:9000/v1/align"
    assert payload == {
        "pairs": [{"summary_prop": "summary text", "doc_prop": "doc text"}]
    }


def test_remote_length_mismatch_is_protocol_error():
    scorer, _ = _remote([(200, {"scores": [0.1, 0.2]})])
    with pytest.raises(ProtocolError, match="3 pairs"):
        scorer.score_batch([("a", "x"), ("b", "y"), ("c", "z")])


def test_remote_out_of_range_score_names_index():
    scorer, _ = _remote([(200, {"scores": [0.1, 1.5, 0.3]})])
    with pytest.raises(ProtocolError, match="index 1"):
        scorer.score_batch([("a", "x"), ("b", "y"), ("c", "z")])


def test_remote_retries_with_exponential_backoff_then_succeeds():
    sleeps = []
    scorer, _ = _remote(
        [ConnectionError("down"), (503, None), (200, {"scores": [0.4]})],
        sleeps=sleeps,
    )
    assert scorer.score_batch([("a", "x")]) == [0.4]
    assert sleeps == [1.0, 2.0]


def test_remote_gives_up_after_three_attempts():
    scorer, sleeps = _remote([(500, None)] * 3)
    with pytest.raises(TransportError, match="after 3 attempts"):
        scorer.score_batch([("a", "x")])
    assert len(sleeps) == 2


def test_remote_chunks_large_requests_and_reassembles_in_order():
    script = [
        (200, {"scores": [0.1, 0.2]}),
        (200, {"scores": [0.3, 0.4]}),
        (200, {"scores": [0.5]}),
    ]
    post = FakePost(script)
    spec = ScorerSpec(kind="remote", endpoint="http://aligner:9000",
                      batch_size=2, max_inflight=1)
    scorer = RemoteScorer(spec, post=post, sleep=lambda s: None)
    pairs = [(f"s{i}", f"d{i}") for i in range(5)]
    assert scorer.score_batch(pairs) == [0.1, 0.2, 0.3, 0.4, 0.5]
    sizes = [len(payload["pairs"]) for _, payload in post.requests]
    assert sizes == [2, 2, 1]


def test_remote_single_batch_size_limit_enforced():
    scorer, _ = _remote([(200, {"scores": []})], batch_size=2)
    with pytest.raises(InputError):
        scorer.score_one_batch(0, [("a", "x")] * 3)
    with pytest.raises(InputError):
        scorer.score_one_batch(0, [])


def test_remote_requires_endpoint():
    with pytest.raises(InputError):
        RemoteScorer(ScorerSpec(kind="remote"))


# -------------------------------------------------------------- invariants

def test_raising_tau_never_adds_binary_edges():
    import random

    from dispersion.coverage import rethreshold

    rng = random.Random(81)
    topic, _ = build_topic("t1", [{0, 1, 2}, {1, 2}], m=3)
    relation = align_topic(topic, "ref", LexicalScorer())
    relation = rethreshold(relation, 0.0)
    previous = None
    for tau in (0.0, 0.2, 0.5, 0.8, 1.0):
        edges = set(rethreshold(relation, tau).binary_edges())
        if previous is not None:
            assert edges <= previous
        previous = edges
