"""Pairwise proposition alignment: a deterministic lexical scorer, a client
for a remote alignment service, and a content-addressed score cache.

Scoring direction is summary proposition -> document proposition; nothing
here assumes the scorer is symmetric.
"""

from __future__ import annotations

import hashlib
import re
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Protocol

import requests

from dispersion.errors import InputError, ProtocolError, TransportError, ValidationError
from dispersion.model import AlignmentEdge, AlignmentRelation, Topic

SCORER_KINDS = ("lexical", "remote", "precomputed")

DEFAULT_TAU = 0.5

# minimal English function-word list for the optional stopword filter
STOPWORDS = frozenset(
    "a an and are as at be by for from has have he in is it its of on or "
    "that the to was were will with".split()
)

_PUNCT = re.compile(r"[^\w\s]")


@dataclass(frozen=True)
class ScorerSpec:
    kind: str = "lexical"
    tau: float = DEFAULT_TAU
    endpoint: str | None = None
    batch_size: int = 128
    remove_stopwords: bool = False
    max_inflight: int = 4

    def __post_init__(self):
        if self.kind not in SCORER_KINDS:
            raise ValidationError(f"scorer kind must be one of {SCORER_KINDS}")
        if not 0.0 <= self.tau <= 1.0:
            raise ValidationError(f"tau must be in [0, 1], got {self.tau}")
        if self.batch_size < 1:
            raise ValidationError("batch_size must be >= 1")
        if self.max_inflight < 1:
            raise ValidationError("max_inflight must be >= 1")


def token_set(text: str, remove_stopwords: bool = False) -> frozenset[str]:
    """Lowercased, punctuation-stripped, deduplicated token set."""
    tokens = _PUNCT.sub(" ", text.lower()).split()
    if remove_stopwords:
        tokens = [t for t in tokens if t not in STOPWORDS]
    return frozenset(tokens)


def lexical_score(a: str, b: str, spec: ScorerSpec | None = None) -> float:
    """Set-F1 token overlap: 2|A&B| / (|A| + |B|), 0 when either set is empty."""
    remove = spec.remove_stopwords if spec is not None else False
    set_a = token_set(a, remove)
    set_b = token_set(b, remove)
    if not set_a or not set_b:
        return 0.0
    return 2 * len(set_a & set_b) / (len(set_a) + len(set_b))


class ScoreCache:
    """Content-addressed score cache keyed on (scorer, text pair) hashes.

    Keys hash whitespace-normalized texts, so the cache survives
    proposition id renumbering. Reads are concurrent; writes take a lock.
    """

    def __init__(self):
        self._scores: dict[str, float] = {}
        self._lock = threading.Lock()

    @staticmethod
    def key_for(scorer_id: str, summary_text: str, doc_text: str) -> str:
        payload = "\x1f".join(
            (scorer_id, " ".join(summary_text.split()), " ".join(doc_text.split()))
        )
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()

    def get(self, key: str) -> float | None:
        return self._scores.get(key)

    def put(self, key: str, score: float) -> None:
        with self._lock:
            self._scores[key] = score

    def __len__(self) -> int:
        return len(self._scores)


class Scorer(Protocol):
    """Anything that can score summary->document proposition text pairs."""

    spec: ScorerSpec

    @property
    def scorer_id(self) -> str: ...

    def score_batch(self, pairs: list[tuple[str, str]]) -> list[float]: ...


class LexicalScorer:
    """Deterministic token-overlap scorer; safe for concurrent use."""

    def __init__(self, spec: ScorerSpec | None = None):
        self.spec = spec or ScorerSpec(kind="lexical")

    @property
    def scorer_id(self) -> str:
        if self.spec.remove_stopwords:
            return "lexical(stopwords=removed)"
        return "lexical"

    def score_batch(self, pairs: list[tuple[str, str]]) -> list[float]:
        return [lexical_score(a, b, self.spec) for a, b in pairs]


def _default_post(url: str, payload: dict, timeout: float) -> tuple[int, object]:
    response = requests.post(url, json=payload, timeout=timeout)
    try:
        body = response.json()
    except ValueError:
        body = None
    return response.status_code, body


def fetch_health(endpoint: str, timeout: float = 10.0) -> dict:
    """GET /v1/health from an alignment service; returns the parsed body."""
    response = requests.get(endpoint.rstrip("/") + "/v1/health", timeout=timeout)
    if response.status_code != 200:
        raise TransportError(
            f"health check against {endpoint} returned {response.status_code}"
        )
    return response.json()


class RemoteScorer:
    """Client for the POST /v1/align wire protocol.

    Batches are capped at spec.batch_size, dispatched with at most
    spec.max_inflight in flight, and retried up to `attempts` times with
    exponential backoff on transport failure. Responses must contain one
    in-range score per requested pair, positionally. Safe to invoke from
    multiple threads; each call manages its own in-flight budget.
    """

    def __init__(self, spec: ScorerSpec, *, model_id: str | None = None,
                 post: Callable[[str, dict, float], tuple[int, object]] | None = None,
                 sleep: Callable[[float], None] = time.sleep,
                 attempts: int = 3, backoff_base: float = 1.0,
                 timeout: float = 60.0):
        if spec.endpoint is None:
            raise InputError("remote scorer requires an endpoint")
        self.spec = spec
        self.model_id = model_id
        self._post = post or _default_post
        self._sleep = sleep
        self._attempts = attempts
        self._backoff_base = backoff_base
        self._timeout = timeout

    @property
    def scorer_id(self) -> str:
        return f"remote:{self.model_id or self.spec.endpoint}"

    @property
    def _align_url(self) -> str:
        return self.spec.endpoint.rstrip("/") + "/v1/align"

    def score_one_batch(self, batch_index: int,
                        pairs: list[tuple[str, str]]) -> list[float]:
        """Score one wire-level batch (at most spec.batch_size pairs)."""
        if not pairs:
            raise InputError("empty batch")
        if len(pairs) > self.spec.batch_size:
            raise InputError(
                f"batch of {len(pairs)} pairs exceeds batch_size "
                f"{self.spec.batch_size}"
            )
        payload = {
            "pairs": [{"summary_prop": a, "doc_prop": b} for a, b in pairs]
        }
        status, body = None, None
        for attempt in range(self._attempts):
            if attempt:
                self._sleep(self._backoff_base * 2 ** (attempt - 1))
            try:
                status, body = self._post(self._align_url, payload, self._timeout)
            except Exception as exc:  # connection-level failure: retry
                status, body = None, exc
                continue
            if 200 <= status < 300:
                break
        else:
            raise TransportError(
                f"batch {batch_index} to {self.spec.endpoint} failed after "
                f"{self._attempts} attempts (last: "
                f"{body if status is None else f'status {status}'})"
            )
        if not isinstance(body, dict) or "scores" not in body:
            raise ProtocolError(
                f"batch {batch_index}: response has no 'scores' field"
            )
        scores = body["scores"]
        if len(scores) != len(pairs):
            raise ProtocolError(
                f"batch {batch_index}: {len(pairs)} pairs sent but "
                f"{len(scores)} scores returned"
            )
        for i, score in enumerate(scores):
            if not isinstance(score, (int, float)) or not 0.0 <= score <= 1.0:
                raise ProtocolError(
                    f"batch {batch_index}: score out of range at index {i}: {score}"
                )
        return [float(s) for s in scores]

    def score_batch(self, pairs: list[tuple[str, str]]) -> list[float]:
        if not pairs:
            return []
        chunks = [
            pairs[i:i + self.spec.batch_size]
            for i in range(0, len(pairs), self.spec.batch_size)
        ]
        if len(chunks) == 1:
            return self.score_one_batch(0, pairs)
        with ThreadPoolExecutor(max_workers=self.spec.max_inflight) as pool:
            results = pool.map(
                lambda item: self.score_one_batch(*item), enumerate(chunks)
            )
            return [score for chunk in results for score in chunk]


def make_scorer(spec: ScorerSpec, **remote_kwargs) -> Scorer:
    if spec.kind == "lexical":
        return LexicalScorer(spec)
    if spec.kind == "remote":
        return RemoteScorer(spec, **remote_kwargs)
    raise InputError(f"scorer kind {spec.kind!r} cannot score pairs directly")


def align_topic(topic: Topic, summary_id: str, scorer: Scorer,
                cache: ScoreCache | None = None) -> AlignmentRelation:
    """Score every (summary proposition, document proposition) pair.

    All scores are stored on the relation, sub-threshold ones included, so
    consumers can re-threshold without rescoring. With a warm cache no
    scorer call is made and the output is identical to a cold run.
    """
    summary = topic.summary_by_id(summary_id)
    if summary.propositions is None:
        raise InputError(
            f"summary {summary_id!r} has no propositions; extract them first"
        )
    for doc in topic.documents:
        if doc.propositions is None:
            raise InputError(
                f"document {doc.doc_id!r} has no propositions; extract them first"
            )

    keys: list[str] = []
    texts: list[tuple[str, str]] = []
    slots: list[tuple[str, str, str]] = []
    for s_prop in summary.propositions:
        for doc in topic.documents:
            for d_prop in doc.propositions:
                slots.append((s_prop.id, doc.doc_id, d_prop.id))
                texts.append((s_prop.text, d_prop.text))
                keys.append(ScoreCache.key_for(scorer.scorer_id, s_prop.text, d_prop.text))

    scores: list[float | None] = [None] * len(slots)
    missing: list[int] = []
    for i, key in enumerate(keys):
        cached = cache.get(key) if cache is not None else None
        if cached is None:
            missing.append(i)
        else:
            scores[i] = cached

    if missing:
        fresh = scorer.score_batch([texts[i] for i in missing])
        if len(fresh) != len(missing):
            raise ProtocolError(
                f"scorer returned {len(fresh)} scores for {len(missing)} pairs"
            )
        for i, score in zip(missing, fresh):
            if not 0.0 <= score <= 1.0:
                raise ProtocolError(f"scorer produced out-of-range score {score}")
            scores[i] = score
            if cache is not None:
                cache.put(keys[i], score)

    edges = tuple(
        AlignmentEdge(s_id, doc_id, d_id, scores[i])
        for i, (s_id, doc_id, d_id) in enumerate(slots)
    )
    return AlignmentRelation(
        topic_id=topic.topic_id,
        summary_id=summary_id,
        edges=edges,
        tau=scorer.spec.tau,
        scorer_id=scorer.scorer_id,
    )
