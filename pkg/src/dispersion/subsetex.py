"""Export reduced datasets keeping only the k maximally-covering documents
per topic, for single/few-document training experiments."""

from __future__ import annotations

import json
from pathlib import Path

from dispersion import coverage, ingest
from dispersion.errors import InputError
from dispersion.model import (
    AlignmentRelation,
    DatasetManifest,
    Document,
    SubsetTrace,
    Topic,
)


def select_topic_subset(topic: Topic, summary_id: str,
                        relation: AlignmentRelation, k: int) -> SubsetTrace:
    """The first min(k, n) documents of the greedy coverage order.

    Degenerate units (nothing aligns) fall back to the first min(k, n)
    documents in ingestion order, flagged `fallback=True`, so exports keep
    every topic.
    """
    if k < 1:
        raise InputError(f"k must be >= 1, got {k}")
    size = min(k, topic.n_docs)
    cov_map = coverage.BinaryCoverageMap.from_relation(topic, summary_id, relation)
    if cov_map.denominator == 0:
        return SubsetTrace(
            topic_id=topic.topic_id,
            summary_id=summary_id,
            k=k,
            doc_ids=tuple(d.doc_id for d in topic.documents[:size]),
            coverage=0.0,
            fallback=True,
        )
    curve = coverage.greedy_curve(cov_map)
    picked = curve.greedy_order[:size]
    return SubsetTrace(
        topic_id=topic.topic_id,
        summary_id=summary_id,
        k=k,
        doc_ids=tuple(topic.documents[i].doc_id for i in picked),
        coverage=curve.cov[size - 1],
        fallback=False,
    )


def _designated_summary(topic: Topic, kind: str, system_name: str | None) -> str:
    if kind == "system":
        for s in topic.summaries:
            if s.kind == "system" and s.system_name == system_name:
                return s.summary_id
        raise InputError(
            f"topic {topic.topic_id!r} has no system summary for {system_name!r}"
        )
    refs = topic.summaries_of_kind("reference")
    if not refs:
        raise InputError(f"topic {topic.topic_id!r} has no reference summary")
    return refs[0].summary_id


def _reduce_topic(topic: Topic, trace: SubsetTrace) -> Topic:
    keep = set(trace.doc_ids)
    kept = [d for d in topic.documents if d.doc_id in keep]
    documents = tuple(
        Document(doc_id=d.doc_id, index=i, text=d.text, propositions=d.propositions)
        for i, d in enumerate(kept)
    )
    return Topic(topic_id=topic.topic_id, documents=documents,
                 summaries=topic.summaries)


def export_reduced_dataset(dataset: list[Topic],
                           relations: list[AlignmentRelation],
                           k: int,
                           out_path: str | Path,
                           *,
                           summary_kind: str = "reference",
                           system_name: str | None = None,
                           name: str = "") -> DatasetManifest:
    """Write the reduced dataset, a per-topic trace sidecar, and a manifest.

    Selection runs against each topic's first reference summary unless a
    system summary is named. Kept documents preserve their original
    relative order and are reindexed from 0.
    """
    out_path = Path(out_path)
    by_unit = {(r.topic_id, r.summary_id): r for r in relations}
    targets = [
        (topic, _designated_summary(topic, summary_kind, system_name))
        for topic in dataset
    ]
    missing = [
        topic.topic_id for topic, summary_id in targets
        if (topic.topic_id, summary_id) not in by_unit
    ]
    if missing:
        raise InputError(
            "no alignment relation for topics: " + ", ".join(missing)
        )
    traces = [
        select_topic_subset(topic, summary_id, by_unit[(topic.topic_id, summary_id)], k)
        for topic, summary_id in targets
    ]
    reduced = [_reduce_topic(topic, trace) for topic, trace in zip(dataset, traces)]
    ingest.write_dataset(reduced, out_path)

    trace_path = trace_sidecar_path(out_path)
    with open(trace_path, "w", encoding="utf-8") as handle:
        for trace in traces:
            handle.write(json.dumps({
                "topic_id": trace.topic_id,
                "summary_id": trace.summary_id,
                "k": trace.k,
                "doc_ids": list(trace.doc_ids),
                "coverage": trace.coverage,
                "fallback": trace.fallback,
            }))
            handle.write("\n")

    manifest = DatasetManifest(
        format_version=ingest.FORMAT_VERSION,
        name=name or out_path.stem,
        topics=len(reduced),
        notes=f"top-{k} coverage subset against {summary_kind} summaries",
    )
    ingest.write_manifest(manifest, manifest_path(out_path))
    return manifest


def trace_sidecar_path(out_path: str | Path) -> Path:
    out_path = Path(out_path)
    return out_path.with_name(out_path.stem + ".traces.jsonl")


def manifest_path(out_path: str | Path) -> Path:
    out_path = Path(out_path)
    return out_path.with_name(out_path.stem + ".manifest.json")


def load_traces(path: str | Path) -> list[SubsetTrace]:
    traces = []
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            if not line.strip():
                continue
            record = json.loads(line)
            traces.append(SubsetTrace(
                topic_id=record["topic_id"],
                summary_id=record["summary_id"],
                k=record["k"],
                doc_ids=tuple(record["doc_ids"]),
                coverage=record["coverage"],
                fallback=record["fallback"],
            ))
    return traces
