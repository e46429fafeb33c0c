"""Canonical file formats: JSONL datasets and alignments, CSV/JSON reports.

Invalid input is rejected with an error naming the offending line, never
repaired. Loading preserves record order; document index equals position
in the record's document array.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Iterable

from dispersion.errors import InputError, ValidationError
from dispersion.model import (
    AlignmentEdge,
    AlignmentRelation,
    DatasetManifest,
    DatasetReport,
    Document,
    Proposition,
    Summary,
    SUMMARY_KINDS,
    Topic,
    TopicResult,
)

FORMAT_VERSION = "1"


def _iter_records(path: str | Path):
    path = Path(path)
    if not path.exists():
        raise InputError(f"no such file: {path}")
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise InputError(f"line {lineno}: invalid JSON: {exc.msg}") from None
            if not isinstance(record, dict):
                raise InputError(f"line {lineno}: record is not an object")
            yield lineno, record


def _require(record: dict, field: str, lineno: int):
    if field not in record:
        raise InputError(f"line {lineno}: missing field {field}")
    return record[field]


def _parse_proposition(raw: dict, lineno: int, unit_id: str) -> Proposition:
    prop_id = _require(raw, "id", lineno)
    text = _require(raw, "text", lineno)
    span = raw.get("span")
    if span is not None:
        if (not isinstance(span, (list, tuple)) or len(span) != 2
                or not all(isinstance(v, int) for v in span)):
            raise InputError(
                f"line {lineno}: proposition {prop_id!r} has malformed span {span!r}"
            )
        span = (span[0], span[1])
    try:
        return Proposition(id=prop_id, text=text, source_unit=unit_id, char_span=span)
    except ValidationError as exc:
        raise InputError(f"line {lineno}: {exc}") from None


def _parse_propositions(raw, lineno: int, unit_id: str):
    if raw is None:
        return None
    if not isinstance(raw, list):
        raise InputError(f"line {lineno}: propositions must be a list")
    return tuple(_parse_proposition(p, lineno, unit_id) for p in raw)


def _check_span_bounds(unit_id: str, text: str | None,
                       props: tuple[Proposition, ...] | None, lineno: int):
    if text is None or not props:
        return
    for prop in props:
        if prop.char_span is not None and prop.char_span[1] > len(text):
            raise InputError(
                f"line {lineno}: proposition {prop.id!r} of {unit_id!r} has span "
                f"{prop.char_span} beyond text length {len(text)}"
            )


def _parse_summary(raw: dict, lineno: int) -> Summary:
    summary_id = _require(raw, "summary_id", lineno)
    kind = _require(raw, "kind", lineno)
    if kind not in SUMMARY_KINDS:
        raise InputError(
            f"line {lineno}: summary {summary_id!r} has unknown kind {kind!r}"
        )
    text = raw.get("text")
    props = _parse_propositions(raw.get("propositions"), lineno, summary_id)
    _check_span_bounds(summary_id, text, props, lineno)
    try:
        return Summary(
            summary_id=summary_id,
            kind=kind,
            system_name=raw.get("system_name"),
            text=text,
            propositions=props,
        )
    except ValidationError as exc:
        raise InputError(f"line {lineno}: {exc}") from None


def _parse_topic(record: dict, lineno: int) -> Topic:
    topic_id = _require(record, "topic_id", lineno)
    raw_docs = _require(record, "documents", lineno)
    raw_summaries = _require(record, "summaries", lineno)
    if not isinstance(raw_docs, list) or not raw_docs:
        raise InputError(f"line {lineno}: documents must be a non-empty list")
    if not isinstance(raw_summaries, list) or not raw_summaries:
        raise InputError(f"line {lineno}: summaries must be a non-empty list")
    documents = []
    for index, raw in enumerate(raw_docs):
        doc_id = _require(raw, "doc_id", lineno)
        text = raw.get("text")
        props = _parse_propositions(raw.get("propositions"), lineno, doc_id)
        _check_span_bounds(doc_id, text, props, lineno)
        try:
            documents.append(
                Document(doc_id=doc_id, index=index, text=text, propositions=props)
            )
        except ValidationError as exc:
            raise InputError(f"line {lineno}: {exc}") from None
    summaries = tuple(_parse_summary(raw, lineno) for raw in raw_summaries)
    try:
        return Topic(topic_id=topic_id, documents=tuple(documents), summaries=summaries)
    except ValidationError as exc:
        raise InputError(f"line {lineno}: {exc}") from None


def load_dataset(path: str | Path, limit: int | None = None) -> list[Topic]:
    """Load topics from a JSONL dataset file, in file order."""
    topics: list[Topic] = []
    seen: set[str] = set()
    for lineno, record in _iter_records(path):
        if limit is not None and len(topics) >= limit:
            break
        topic = _parse_topic(record, lineno)
        if topic.topic_id in seen:
            raise InputError(f"line {lineno}: duplicate topic_id {topic.topic_id!r}")
        seen.add(topic.topic_id)
        topics.append(topic)
    return topics


_EDGE_FIELDS = ("topic_id", "summary_id", "summary_prop", "doc_id", "doc_prop", "score")


def load_alignments(path: str | Path, tau: float = 0.5,
                    scorer_id: str = "precomputed") -> list[AlignmentRelation]:
    """Load one-edge-per-line alignments, grouped by (topic, summary).

    The file carries only scored edges; the binarization threshold is a
    consumer-side parameter, so `tau` is applied at load time.
    """
    groups: dict[tuple[str, str], list[AlignmentEdge]] = {}
    for lineno, record in _iter_records(path):
        for field in _EDGE_FIELDS:
            _require(record, field, lineno)
        unknown = set(record) - set(_EDGE_FIELDS)
        if unknown:
            raise InputError(
                f"line {lineno}: unknown field {sorted(unknown)[0]}"
            )
        score = record["score"]
        if not isinstance(score, (int, float)) or not 0.0 <= score <= 1.0:
            raise InputError(
                f"line {lineno}: edge ({record['summary_prop']!r}, "
                f"{record['doc_id']!r}, {record['doc_prop']!r}) has score "
                f"{score!r} outside [0, 1]"
            )
        key = (record["topic_id"], record["summary_id"])
        groups.setdefault(key, []).append(
            AlignmentEdge(
                summary_prop=record["summary_prop"],
                doc_id=record["doc_id"],
                doc_prop=record["doc_prop"],
                score=float(score),
            )
        )
    return [
        AlignmentRelation(
            topic_id=topic_id,
            summary_id=summary_id,
            edges=tuple(edges),
            tau=tau,
            scorer_id=scorer_id,
        )
        for (topic_id, summary_id), edges in groups.items()
    ]


def load_system_summaries(path: str | Path, dataset: list[Topic]) -> list[Topic]:
    """Attach system summaries from a JSONL file to their topics.

    Each record needs topic_id and system_name plus summary text or
    propositions; summary_id defaults to the system name.
    """
    by_topic: dict[str, list[Summary]] = {}
    unmatched: list[str] = []
    known = {t.topic_id for t in dataset}
    for lineno, record in _iter_records(path):
        topic_id = _require(record, "topic_id", lineno)
        system_name = _require(record, "system_name", lineno)
        if topic_id not in known:
            unmatched.append(topic_id)
            continue
        summary_id = record.get("summary_id", system_name)
        props = _parse_propositions(record.get("propositions"), lineno, summary_id)
        text = record.get("text")
        _check_span_bounds(summary_id, text, props, lineno)
        try:
            summary = Summary(
                summary_id=summary_id,
                kind="system",
                system_name=system_name,
                text=text,
                propositions=props,
            )
        except ValidationError as exc:
            raise InputError(f"line {lineno}: {exc}") from None
        by_topic.setdefault(topic_id, []).append(summary)
    if unmatched:
        raise InputError(
            "system summaries reference unknown topics: "
            + ", ".join(sorted(set(unmatched)))
        )
    out: list[Topic] = []
    for topic in dataset:
        extra = by_topic.get(topic.topic_id, [])
        if not extra:
            out.append(topic)
            continue
        try:
            out.append(
                Topic(
                    topic_id=topic.topic_id,
                    documents=topic.documents,
                    summaries=topic.summaries + tuple(extra),
                )
            )
        except ValidationError as exc:
            raise InputError(f"topic {topic.topic_id!r}: {exc}") from None
    return out


def _prop_to_dict(prop: Proposition) -> dict:
    out: dict = {"id": prop.id, "text": prop.text}
    if prop.char_span is not None:
        out["span"] = list(prop.char_span)
    return out


def _unit_to_dict(unit_id_field: str, unit_id: str, text, props, extra=None) -> dict:
    out = {unit_id_field: unit_id}
    if extra:
        out.update(extra)
    if text is not None:
        out["text"] = text
    if props is not None:
        out["propositions"] = [_prop_to_dict(p) for p in props]
    return out


def topic_to_dict(topic: Topic) -> dict:
    summaries = []
    for s in topic.summaries:
        extra = {"kind": s.kind}
        if s.system_name is not None:
            extra["system_name"] = s.system_name
        summaries.append(
            _unit_to_dict("summary_id", s.summary_id, s.text, s.propositions, extra)
        )
    return {
        "topic_id": topic.topic_id,
        "documents": [
            _unit_to_dict("doc_id", d.doc_id, d.text, d.propositions)
            for d in topic.documents
        ],
        "summaries": summaries,
    }


def _dump_jsonl(records: Iterable[dict], path: str | Path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as handle:
        for record in records:
            handle.write(json.dumps(record, ensure_ascii=False, separators=(",", ":")))
            handle.write("\n")


def write_dataset(topics: Iterable[Topic], path: str | Path) -> None:
    _dump_jsonl((topic_to_dict(t) for t in topics), path)


def write_alignments(relations: Iterable[AlignmentRelation], path: str | Path) -> None:
    def edges():
        for relation in relations:
            for edge in relation.edges:
                yield {
                    "topic_id": relation.topic_id,
                    "summary_id": relation.summary_id,
                    "summary_prop": edge.summary_prop,
                    "doc_id": edge.doc_id,
                    "doc_prop": edge.doc_prop,
                    "score": edge.score,
                }

    _dump_jsonl(edges(), path)


def report_to_dict(report: DatasetReport) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "name": report.name,
        "scale": report.scale,
        "n_max": report.n_max,
        "tau": report.tau,
        "scorer_id": report.scorer_id,
        "extractor_id": report.extractor_id,
        "aggregate_cov": list(report.aggregate_cov),
        "dataset_aac": report.dataset_aac,
        "aac_mean": report.aac_mean,
        "aac_std": report.aac_std,
        "per_topic_aac": list(report.per_topic_aac),
        "topics_evaluated": report.topics_evaluated,
        "topics_skipped": report.topics_skipped,
    }


def report_from_dict(record: dict) -> DatasetReport:
    version = record.get("format_version")
    if version != FORMAT_VERSION:
        raise InputError(f"unsupported report format_version {version!r}")
    return DatasetReport(
        n_max=record["n_max"],
        aggregate_cov=tuple(record["aggregate_cov"]),
        dataset_aac=record["dataset_aac"],
        per_topic_aac=tuple(record["per_topic_aac"]),
        aac_mean=record["aac_mean"],
        aac_std=record["aac_std"],
        topics_evaluated=record["topics_evaluated"],
        topics_skipped=record["topics_skipped"],
        name=record.get("name", ""),
        scale=record.get("scale", "percent"),
        tau=record.get("tau"),
        scorer_id=record.get("scorer_id"),
        extractor_id=record.get("extractor_id"),
    )


def load_report(path: str | Path) -> DatasetReport:
    path = Path(path)
    if not path.exists():
        raise InputError(f"no such file: {path}")
    with open(path, encoding="utf-8") as handle:
        try:
            record = json.load(handle)
        except json.JSONDecodeError as exc:
            raise InputError(f"{path}: invalid JSON: {exc.msg}") from None
    return report_from_dict(record)


def write_curve_csv(cov: Iterable[float], path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["k", "cov_k"])
        for k, value in enumerate(cov, start=1):
            writer.writerow([k, f"{value:.6f}"])


def write_per_topic_csv(results: Iterable[TopicResult], path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(
            ["topic_id", "summary_id", "n_docs", "denominator", "aac", "skipped"]
        )
        for result in results:
            writer.writerow([
                result.topic_id,
                result.summary_id,
                result.n_docs,
                result.denominator,
                "" if result.aac is None else f"{result.aac:.6f}",
                "true" if result.skipped else "false",
            ])


def write_report(report: DatasetReport, results: list[TopicResult],
                 out_dir: str | Path) -> dict[str, Path]:
    """Write report.json, per_topic.csv and curve.csv into out_dir."""
    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise InputError(f"cannot create output directory {out_dir}: {exc}") from None
    paths = {
        "report": out_dir / "report.json",
        "per_topic": out_dir / "per_topic.csv",
        "curve": out_dir / "curve.csv",
    }
    with open(paths["report"], "w", encoding="utf-8") as handle:
        json.dump(report_to_dict(report), handle, indent=2)
        handle.write("\n")
    write_per_topic_csv(results, paths["per_topic"])
    write_curve_csv(report.aggregate_cov, paths["curve"])
    return paths


def write_manifest(manifest: DatasetManifest, path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(
            {
                "format_version": manifest.format_version,
                "name": manifest.name,
                "topics": manifest.topics,
                "notes": manifest.notes,
            },
            handle,
            indent=2,
        )
        handle.write("\n")


def load_manifest(path: str | Path) -> DatasetManifest:
    path = Path(path)
    if not path.exists():
        raise InputError(f"no such file: {path}")
    with open(path, encoding="utf-8") as handle:
        record = json.load(handle)
    version = record.get("format_version")
    if version != FORMAT_VERSION:
        raise InputError(f"unsupported manifest format_version {version!r}")
    return DatasetManifest(
        format_version=version,
        name=record.get("name", ""),
        topics=record.get("topics", 0),
        notes=record.get("notes", ""),
    )
