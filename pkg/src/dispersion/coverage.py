"""Coverage math: greedy maximally-covering subsets, coverage curves,
the exhaustive oracle, and AAC aggregation.

AAC is reported on the percent scale: a topic with curve cov_1..cov_n
scores (100 / n_max) * sum(1 - cov_k). The aggregate curve averages
per-topic curves, extending shorter topics with cov_k = 1 beyond their
own document count, which keeps the dataset AAC equal to the mean of
the per-topic AAC scores.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from dispersion import kernels
from dispersion.errors import (
    AllTopicsSkippedError,
    CapExceededError,
    DegenerateTopicError,
    InputError,
    ValidationError,
)
from dispersion.model import (
    AlignmentRelation,
    CoverageCurve,
    DatasetReport,
    Topic,
    TopicResult,
)

DEFAULT_N_MAX = 10
DEFAULT_ENUMERATION_CAP = 2_000_000


@dataclass(frozen=True)
class BinaryCoverageMap:
    """Binarized alignment for one (topic, summary).

    `covered[i]` is the set of summary proposition ids that document index
    i aligns to at score >= tau; `denominator` is the size of the union
    over all documents (the s(D, S) count).
    """

    topic_id: str
    summary_id: str
    covered: tuple[frozenset[str], ...]
    union_props: tuple[str, ...]

    @property
    def n_docs(self) -> int:
        return len(self.covered)

    @property
    def denominator(self) -> int:
        return len(self.union_props)

    @classmethod
    def from_relation(cls, topic: Topic, summary_id: str,
                      relation: AlignmentRelation) -> "BinaryCoverageMap":
        """Bind a relation against its topic, validating every referenced id."""
        if relation.topic_id != topic.topic_id or relation.summary_id != summary_id:
            raise InputError(
                f"relation is for ({relation.topic_id!r}, {relation.summary_id!r}), "
                f"expected ({topic.topic_id!r}, {summary_id!r})"
            )
        summary = topic.summary_by_id(summary_id)
        if summary.propositions is None:
            raise InputError(
                f"summary {summary_id!r} has no propositions; extract them first"
            )
        summary_prop_ids = {p.id for p in summary.propositions}
        doc_index = {d.doc_id: d.index for d in topic.documents}
        doc_prop_ids = {
            d.doc_id: {p.id for p in d.propositions} if d.propositions is not None else None
            for d in topic.documents
        }
        covered: list[set[str]] = [set() for _ in topic.documents]
        for edge in relation.edges:
            if edge.summary_prop not in summary_prop_ids:
                raise InputError(
                    f"topic {topic.topic_id!r}: unknown summary proposition "
                    f"{edge.summary_prop!r} in alignment"
                )
            if edge.doc_id not in doc_index:
                raise InputError(
                    f"topic {topic.topic_id!r}: unknown doc_id {edge.doc_id!r} "
                    f"in alignment"
                )
            known = doc_prop_ids[edge.doc_id]
            if known is None:
                raise InputError(
                    f"topic {topic.topic_id!r}: document {edge.doc_id!r} has no "
                    f"propositions; extract them first"
                )
            if edge.doc_prop not in known:
                raise InputError(
                    f"topic {topic.topic_id!r}: unknown doc proposition "
                    f"{edge.doc_prop!r} for document {edge.doc_id!r}"
                )
            if edge.score >= relation.tau:
                covered[doc_index[edge.doc_id]].add(edge.summary_prop)
        union = set().union(*covered) if covered else set()
        # stable bit positions: summary proposition order
        order = tuple(p.id for p in summary.propositions if p.id in union)
        return cls(
            topic_id=topic.topic_id,
            summary_id=summary_id,
            covered=tuple(frozenset(c) for c in covered),
            union_props=order,
        )

    def incidence(self) -> np.ndarray:
        """Doc-by-proposition 0/1 matrix over the covered union."""
        pos = {prop_id: j for j, prop_id in enumerate(self.union_props)}
        matrix = np.zeros((self.n_docs, len(self.union_props)), dtype=np.uint8)
        for i, props in enumerate(self.covered):
            for prop_id in props:
                matrix[i, pos[prop_id]] = 1
        return matrix


def absolute_coverage(cov_map: BinaryCoverageMap, subset) -> int:
    """Number of summary propositions aligned to some document in `subset`."""
    indices = set(subset)
    for i in indices:
        if not 0 <= i < cov_map.n_docs:
            raise InputError(f"doc index {i} out of range [0, {cov_map.n_docs})")
    if not indices:
        return 0
    return len(frozenset().union(*(cov_map.covered[i] for i in indices)))


def relative_coverage(cov_map: BinaryCoverageMap, subset) -> float:
    """Absolute coverage of `subset` normalized by the all-documents coverage."""
    if cov_map.denominator == 0:
        raise DegenerateTopicError(
            f"topic {cov_map.topic_id!r}, summary {cov_map.summary_id!r}: "
            f"no summary proposition aligns to any document"
        )
    return absolute_coverage(cov_map, subset) / cov_map.denominator


def greedy_curve(cov_map: BinaryCoverageMap) -> CoverageCurve:
    """Greedy maximally-covering document order and its coverage curve.

    Each step adds the document with the largest marginal gain in covered
    summary propositions, breaking ties toward the lowest document index;
    zero-gain documents are appended in index order so cov_k is defined
    for every k <= n.
    """
    if cov_map.denominator == 0:
        raise DegenerateTopicError(
            f"topic {cov_map.topic_id!r}, summary {cov_map.summary_id!r}: "
            f"no summary proposition aligns to any document"
        )
    order, counts = kernels.greedy_cover(cov_map.incidence())
    denom = cov_map.denominator
    return CoverageCurve(
        topic_id=cov_map.topic_id,
        summary_id=cov_map.summary_id,
        greedy_order=tuple(int(i) for i in order),
        cov=tuple(int(c) / denom for c in counts),
        denominator=denom,
    )


def exact_best_coverage(cov_map: BinaryCoverageMap, k: int,
                        cap: int = DEFAULT_ENUMERATION_CAP) -> tuple[tuple[int, ...], float]:
    """Exhaustively optimal size-k subset and its relative coverage.

    Enumerates all C(n, k) subsets; ties resolve to the lexicographically
    smallest index tuple. Refuses (rather than silently degrading) when
    the enumeration would exceed `cap`.
    """
    if cov_map.denominator == 0:
        raise DegenerateTopicError(
            f"topic {cov_map.topic_id!r}, summary {cov_map.summary_id!r}: "
            f"no summary proposition aligns to any document"
        )
    n = cov_map.n_docs
    if not 1 <= k <= n:
        raise InputError(f"k must be in [1, {n}], got {k}")
    n_subsets = math.comb(n, k)
    if n_subsets > cap:
        raise CapExceededError(
            f"C({n}, {k}) = {n_subsets} subsets exceeds the enumeration cap {cap}"
        )
    indices, count = kernels.best_cover(cov_map.incidence(), k)
    return tuple(int(i) for i in indices), int(count) / cov_map.denominator


def curve_aac(cov: tuple[float, ...], n_max: int) -> float:
    """Area above a coverage curve, percent scale, normalized by n_max."""
    return (100.0 / n_max) * sum(1.0 - c for c in cov)


def topic_result(topic: Topic, summary_id: str, relation: AlignmentRelation,
                 n_max: int = DEFAULT_N_MAX) -> TopicResult:
    """Evaluate one (topic, summary) unit; degenerate units come back skipped."""
    cov_map = BinaryCoverageMap.from_relation(topic, summary_id, relation)
    if cov_map.denominator == 0:
        return TopicResult(
            topic_id=topic.topic_id,
            summary_id=summary_id,
            n_docs=topic.n_docs,
            denominator=0,
            skipped=True,
            skip_reason="no summary proposition aligns to any document "
                        f"at tau={relation.tau}",
        )
    curve = greedy_curve(cov_map)
    return TopicResult(
        topic_id=topic.topic_id,
        summary_id=summary_id,
        n_docs=topic.n_docs,
        denominator=cov_map.denominator,
        curve=curve,
        aac=curve_aac(curve.cov, n_max),
    )


def rethreshold(relation: AlignmentRelation, tau: float) -> AlignmentRelation:
    """Same stored scores under a new binarization threshold."""
    if not 0.0 <= tau <= 1.0:
        raise ValidationError(f"tau must be in [0, 1], got {tau}")
    return replace(relation, tau=tau)


def _mean(values) -> float:
    values = list(values)
    return sum(values) / len(values)


def _pstd(values) -> float:
    values = list(values)
    mu = _mean(values)
    return math.sqrt(sum((v - mu) ** 2 for v in values) / len(values))


def aggregate(results, n_max: int = DEFAULT_N_MAX, *, name: str = "",
              tau: float | None = None, scorer_id: str | None = None,
              extractor_id: str | None = None) -> DatasetReport:
    """Aggregate unit results into a DatasetReport.

    Units are grouped by topic; a topic's curve and AAC are the means over
    its evaluated summaries. Topics shorter than the longest one are
    extended with cov_k = 1 beyond their own n, which makes the dataset
    AAC equal the mean of the per-topic AACs. Skipped units are counted
    and excluded from every mean.
    """
    by_topic: dict[str, list[TopicResult]] = {}
    evaluated_units = 0
    skipped_units = 0
    for result in results:
        by_topic.setdefault(result.topic_id, []).append(result)
        if result.skipped:
            skipped_units += 1
        else:
            evaluated_units += 1
    if evaluated_units == 0:
        raise AllTopicsSkippedError(
            "every evaluation unit is degenerate; nothing to aggregate"
        )

    topic_curves: list[list[float]] = []
    per_topic_aac: list[float] = []
    for topic_id, units in by_topic.items():
        live = [u for u in units if not u.skipped]
        if not live:
            continue
        lengths = {len(u.curve.cov) for u in live}
        if len(lengths) != 1:
            raise InputError(
                f"topic {topic_id!r}: summaries disagree on document count"
            )
        n_t = lengths.pop()
        curve = [_mean(u.curve.cov[k] for u in live) for k in range(n_t)]
        topic_curves.append(curve)
        per_topic_aac.append(_mean(u.aac for u in live))

    k_max = max(len(c) for c in topic_curves)
    extended = [c + [1.0] * (k_max - len(c)) for c in topic_curves]
    aggregate_cov = tuple(
        _mean(c[k] for c in extended) for k in range(k_max)
    )
    dataset_aac = curve_aac(aggregate_cov, n_max)
    return DatasetReport(
        n_max=n_max,
        aggregate_cov=aggregate_cov,
        dataset_aac=dataset_aac,
        per_topic_aac=tuple(per_topic_aac),
        aac_mean=_mean(per_topic_aac),
        aac_std=_pstd(per_topic_aac),
        topics_evaluated=evaluated_units,
        topics_skipped=skipped_units,
        name=name,
        tau=tau,
        scorer_id=scorer_id,
        extractor_id=extractor_id,
    )
