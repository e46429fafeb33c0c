"""Shared builders and independent oracles for the test suite.

The oracle implementations here deliberately use plain Python sets and
exhaustive recomputation; they must stay independent of the package's
kernel code paths.
"""

from __future__ import annotations

import random
from itertools import combinations

from dispersion.coverage import BinaryCoverageMap
from dispersion.model import (
    AlignmentEdge,
    AlignmentRelation,
    Document,
    Proposition,
    Summary,
    Topic,
)


def map_from_sets(cover_sets: list[set[int]]) -> BinaryCoverageMap:
    """Coverage map where doc i covers the given summary prop positions."""
    union = sorted(set().union(*cover_sets)) if cover_sets else []
    return BinaryCoverageMap(
        topic_id="t",
        summary_id="s",
        covered=tuple(frozenset(f"p{j}" for j in s) for s in cover_sets),
        union_props=tuple(f"p{j}" for j in union),
    )


def build_topic(topic_id: str, cover_sets: list[set[int]], m: int,
                extra_summaries: int = 0) -> tuple[Topic, list[AlignmentRelation]]:
    """Topic with m summary props; doc i carries (and aligns to) the props
    at the positions in cover_sets[i]. Extra reference summaries share the
    same alignment structure."""
    relations = []
    summaries = []
    for s_idx in range(1 + extra_summaries):
        summary_id = f"ref{s_idx}" if extra_summaries else "ref"
        summaries.append(
            Summary(
                summary_id=summary_id,
                kind="reference",
                propositions=tuple(
                    Proposition(id=f"p{j}", text=f"{topic_id}tok{j}",
                                source_unit=summary_id)
                    for j in range(m)
                ),
            )
        )
    documents = []
    edge_groups: dict[str, list[AlignmentEdge]] = {s.summary_id: [] for s in summaries}
    for d, covered in enumerate(cover_sets):
        doc_id = f"d{d}"
        props = [
            Proposition(id=f"q{j}", text=f"{topic_id}tok{j}", source_unit=doc_id)
            for j in sorted(covered)
        ] or [Proposition(id="q_fill", text=f"{topic_id}fill{d}", source_unit=doc_id)]
        documents.append(Document(doc_id=doc_id, index=d, propositions=tuple(props)))
        for summary in summaries:
            for j in sorted(covered):
                edge_groups[summary.summary_id].append(
                    AlignmentEdge(f"p{j}", doc_id, f"q{j}", 1.0)
                )
    topic = Topic(topic_id=topic_id, documents=tuple(documents),
                  summaries=tuple(summaries))
    for summary in summaries:
        relations.append(
            AlignmentRelation(
                topic_id=topic_id,
                summary_id=summary.summary_id,
                edges=tuple(edge_groups[summary.summary_id]),
                tau=0.5,
                scorer_id="fixture",
            )
        )
    return topic, relations


def oracle_greedy(cover_sets: list[set[int]]) -> tuple[list[int], list[int]]:
    """Greedy order with the marginal gain recomputed from scratch at every
    step; ties to the lowest index."""
    n = len(cover_sets)
    chosen: list[int] = []
    covered: set[int] = set()
    counts: list[int] = []
    while len(chosen) < n:
        best_doc = -1
        best_gain = -1
        for d in range(n):
            if d in chosen:
                continue
            gain = len(covered | cover_sets[d]) - len(covered)
            if gain > best_gain:
                best_gain = gain
                best_doc = d
        chosen.append(best_doc)
        covered |= cover_sets[best_doc]
        counts.append(len(covered))
    return chosen, counts


def oracle_best(cover_sets: list[set[int]], k: int) -> tuple[tuple[int, ...], int]:
    """Exhaustive best size-k subset; first maximum in lexicographic order."""
    best_combo = None
    best_count = -1
    for combo in combinations(range(len(cover_sets)), k):
        count = len(set().union(*(cover_sets[d] for d in combo)))
        if count > best_count:
            best_count = count
            best_combo = combo
    return best_combo, best_count


def random_cover_sets(rng: random.Random, n: int, m: int,
                      density: float = 0.4) -> list[set[int]]:
    """Random doc->prop coverage with a non-empty union."""
    while True:
        sets = [
            {j for j in range(m) if rng.random() < density}
            for _ in range(n)
        ]
        if any(sets):
            return sets
