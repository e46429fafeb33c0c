"""Shared domain types. Pure data: no I/O, no algorithms.

All types are frozen and hold tuples, so instances are safe to share
across worker threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

from dispersion.errors import ValidationError

SUMMARY_KINDS = ("reference", "system")


def normalize_ws(text: str) -> str:
    """Collapse runs of whitespace into single spaces and strip the ends."""
    return " ".join(text.split())


@dataclass(frozen=True)
class Proposition:
    """A minimal information unit extracted from one document or summary."""

    id: str
    text: str
    source_unit: str = ""
    char_span: tuple[int, int] | None = None

    def __post_init__(self):
        if not self.id:
            raise ValidationError("proposition id must be non-empty")
        if not normalize_ws(self.text):
            raise ValidationError(f"proposition {self.id!r}: text is empty")
        if self.char_span is not None:
            start, end = self.char_span
            if start < 0 or end <= start:
                raise ValidationError(
                    f"proposition {self.id!r}: invalid char_span {self.char_span}"
                )


def _check_prop_ids(unit_id: str, propositions: tuple[Proposition, ...]):
    seen = set()
    for prop in propositions:
        if prop.id in seen:
            raise ValidationError(f"unit {unit_id!r}: duplicate proposition id {prop.id!r}")
        seen.add(prop.id)


@dataclass(frozen=True)
class Document:
    """One source document; `index` is its 0-based ingestion position."""

    doc_id: str
    index: int
    text: str | None = None
    propositions: tuple[Proposition, ...] | None = None

    def __post_init__(self):
        if self.index < 0:
            raise ValidationError(f"document {self.doc_id!r}: negative index")
        if self.text is None and self.propositions is None:
            raise ValidationError(
                f"document {self.doc_id!r}: needs text or propositions"
            )
        if self.propositions is not None:
            _check_prop_ids(self.doc_id, self.propositions)


@dataclass(frozen=True)
class Summary:
    """A reference or system summary of one topic."""

    summary_id: str
    kind: str
    system_name: str | None = None
    text: str | None = None
    propositions: tuple[Proposition, ...] | None = None

    def __post_init__(self):
        if self.kind not in SUMMARY_KINDS:
            raise ValidationError(
                f"summary {self.summary_id!r}: kind must be one of {SUMMARY_KINDS}"
            )
        if self.text is None and self.propositions is None:
            raise ValidationError(
                f"summary {self.summary_id!r}: needs text or propositions"
            )
        if self.propositions is not None:
            _check_prop_ids(self.summary_id, self.propositions)


@dataclass(frozen=True)
class Topic:
    """One evaluation unit: ordered source documents plus summaries."""

    topic_id: str
    documents: tuple[Document, ...]
    summaries: tuple[Summary, ...]

    def __post_init__(self):
        if not self.documents:
            raise ValidationError(f"topic {self.topic_id!r}: no documents")
        if not self.summaries:
            raise ValidationError(f"topic {self.topic_id!r}: no summaries")
        doc_ids = [d.doc_id for d in self.documents]
        if len(set(doc_ids)) != len(doc_ids):
            raise ValidationError(f"topic {self.topic_id!r}: duplicate doc_id")
        for pos, doc in enumerate(self.documents):
            if doc.index != pos:
                raise ValidationError(
                    f"topic {self.topic_id!r}: document {doc.doc_id!r} has index "
                    f"{doc.index}, expected {pos}"
                )
        sum_ids = [s.summary_id for s in self.summaries]
        if len(set(sum_ids)) != len(sum_ids):
            raise ValidationError(f"topic {self.topic_id!r}: duplicate summary_id")

    @property
    def n_docs(self) -> int:
        return len(self.documents)

    def document_by_id(self, doc_id: str) -> Document:
        for doc in self.documents:
            if doc.doc_id == doc_id:
                return doc
        raise ValidationError(f"topic {self.topic_id!r}: unknown doc_id {doc_id!r}")

    def summary_by_id(self, summary_id: str) -> Summary:
        for summary in self.summaries:
            if summary.summary_id == summary_id:
                return summary
        raise ValidationError(
            f"topic {self.topic_id!r}: unknown summary_id {summary_id!r}"
        )

    def summaries_of_kind(self, kind: str) -> tuple[Summary, ...]:
        return tuple(s for s in self.summaries if s.kind == kind)


class AlignmentEdge(NamedTuple):
    summary_prop: str
    doc_id: str
    doc_prop: str
    score: float


@dataclass(frozen=True)
class AlignmentRelation:
    """All scored (summary prop, doc prop) pairs for one (topic, summary).

    Every scored pair is kept, including sub-threshold ones; the binary
    relation consumers use is `score >= tau`.
    """

    topic_id: str
    summary_id: str
    edges: tuple[AlignmentEdge, ...]
    tau: float = 0.5
    scorer_id: str = "precomputed"

    def __post_init__(self):
        if not 0.0 <= self.tau <= 1.0:
            raise ValidationError(f"tau must be in [0, 1], got {self.tau}")
        for i, edge in enumerate(self.edges):
            if not 0.0 <= edge.score <= 1.0:
                raise ValidationError(
                    f"edge {i} ({edge.summary_prop!r}, {edge.doc_id!r}, "
                    f"{edge.doc_prop!r}): score {edge.score} outside [0, 1]"
                )

    def binary_edges(self) -> tuple[AlignmentEdge, ...]:
        return tuple(e for e in self.edges if e.score >= self.tau)


@dataclass(frozen=True)
class CoverageCurve:
    """Greedy document order and cov_k for k = 1..n of one (topic, summary)."""

    topic_id: str
    summary_id: str
    greedy_order: tuple[int, ...]
    cov: tuple[float, ...]
    denominator: int

    def __post_init__(self):
        n = len(self.greedy_order)
        if len(self.cov) != n:
            raise ValidationError("cov and greedy_order lengths differ")
        if len(set(self.greedy_order)) != n:
            raise ValidationError("greedy_order contains repeated doc indices")
        if any(b < a for a, b in zip(self.cov, self.cov[1:])):
            raise ValidationError("cov must be non-decreasing")
        if self.denominator > 0 and n and self.cov[-1] != 1.0:
            raise ValidationError(f"cov must end at 1.0, got {self.cov[-1]}")


@dataclass(frozen=True)
class TopicResult:
    """Per-(topic, summary) outcome: curve plus AAC on the percent scale."""

    topic_id: str
    summary_id: str
    n_docs: int
    denominator: int
    curve: CoverageCurve | None = None
    aac: float | None = None
    skipped: bool = False
    skip_reason: str | None = None

    def __post_init__(self):
        if self.skipped != (self.denominator == 0):
            raise ValidationError("skipped must hold exactly when denominator is 0")
        if self.skipped and (self.curve is not None or self.aac is not None):
            raise ValidationError("skipped result cannot carry a curve or AAC")
        if not self.skipped and (self.curve is None or self.aac is None):
            raise ValidationError("evaluated result must carry a curve and AAC")


@dataclass(frozen=True)
class DatasetReport:
    """Dataset-level aggregation of per-topic coverage curves and AAC scores.

    `topics_evaluated`/`topics_skipped` count (topic, summary) evaluation
    units; `per_topic_aac` holds one value per evaluated topic (the mean over
    that topic's evaluated summaries). AAC values are on the percent scale.
    """

    n_max: int
    aggregate_cov: tuple[float, ...]
    dataset_aac: float
    per_topic_aac: tuple[float, ...]
    aac_mean: float
    aac_std: float
    topics_evaluated: int
    topics_skipped: int
    name: str = ""
    scale: str = "percent"
    tau: float | None = None
    scorer_id: str | None = None
    extractor_id: str | None = None

    def __post_init__(self):
        if self.n_max < 1:
            raise ValidationError("n_max must be >= 1")
        if self.per_topic_aac:
            mean = sum(self.per_topic_aac) / len(self.per_topic_aac)
            if abs(self.dataset_aac - mean) > 1e-9:
                raise ValidationError(
                    f"dataset_aac {self.dataset_aac} does not equal the mean "
                    f"of per_topic_aac ({mean})"
                )


@dataclass(frozen=True)
class SubsetTrace:
    """The k maximally-covering documents chosen for one (topic, summary)."""

    topic_id: str
    summary_id: str
    k: int
    doc_ids: tuple[str, ...]
    coverage: float
    fallback: bool = False


@dataclass(frozen=True)
class DatasetManifest:
    """Descriptor written next to exported dataset files."""

    format_version: str
    name: str
    topics: int
    notes: str = ""
