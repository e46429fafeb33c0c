"""Proposition extraction for units that arrive as raw text.

The builtin extractor is a deterministic sentence splitter; open-IE style
tuples from an external extractor can be converted through
`tuple_to_proposition` or loaded from a sidecar file.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path
from typing import NamedTuple

from dispersion.errors import InputError, ValidationError
from dispersion.model import Document, Proposition, Summary, Topic, normalize_ws

DEFAULT_ABBREVIATIONS = frozenset(
    {"Dr.", "Mr.", "Mrs.", "Ms.", "U.S.", "etc.", "e.g.", "i.e."}
)

EXTRACTOR_MODES = ("sentence", "precomputed", "external")

_TERMINALS = ".!?"


class TextSpan(NamedTuple):
    text: str
    start: int
    end: int


@dataclass(frozen=True)
class ExtractionTuple:
    """An open-IE style tuple: predicate plus arguments, all with offsets."""

    predicate: TextSpan
    arguments: tuple[TextSpan, ...]

    def __post_init__(self):
        if not self.predicate.text.strip():
            raise ValidationError("extraction tuple: empty predicate")

    def components(self) -> tuple[TextSpan, ...]:
        return (self.predicate,) + self.arguments

    def has_overlap(self) -> bool:
        spans = sorted((c.start, c.end) for c in self.components())
        return any(b_start < a_end for (_, a_end), (b_start, _) in zip(spans, spans[1:]))


@dataclass(frozen=True)
class ExtractorConfig:
    mode: str = "sentence"
    abbreviations: frozenset[str] = DEFAULT_ABBREVIATIONS
    min_tokens: int = 3
    sidecar: str | Path | None = None

    def __post_init__(self):
        if self.mode not in EXTRACTOR_MODES:
            raise ValidationError(f"extractor mode must be one of {EXTRACTOR_MODES}")
        if self.min_tokens < 1:
            raise ValidationError("min_tokens must be >= 1")

    @property
    def extractor_id(self) -> str:
        return f"{self.mode}(min_tokens={self.min_tokens})"


def _sentence_boundaries(text: str, abbreviations: frozenset[str]) -> list[int]:
    """End offsets (exclusive) of each sentence in `text`."""
    boundaries = []
    for i, ch in enumerate(text):
        if ch not in _TERMINALS:
            continue
        # the whitespace-delimited token ending at this character
        j = i
        while j > 0 and not text[j - 1].isspace():
            j -= 1
        if text[j:i + 1] in abbreviations:
            continue
        # boundary only if followed by whitespace and an uppercase/digit
        k = i + 1
        while k < len(text) and text[k].isspace():
            k += 1
        if k == i + 1:  # no whitespace after the terminal
            continue
        if k < len(text) and (text[k].isupper() or text[k].isdigit()):
            boundaries.append(i + 1)
    boundaries.append(len(text))
    return boundaries


def extract_sentences(text: str, config: ExtractorConfig,
                      unit_id: str = "") -> list[Proposition]:
    """Split `text` into sentence propositions with ids s0, s1, ...

    Sentences shorter than `config.min_tokens` whitespace tokens are
    dropped; each kept proposition carries the char span of its trimmed
    slice, so `normalize_ws(text[start:end]) == prop.text`.
    """
    props: list[Proposition] = []
    prev = 0
    for boundary in _sentence_boundaries(text, config.abbreviations):
        raw = text[prev:boundary]
        start = prev + (len(raw) - len(raw.lstrip()))
        end = prev + len(raw.rstrip())
        prev = boundary
        if end <= start:
            continue
        sentence = normalize_ws(text[start:end])
        if len(sentence.split()) < config.min_tokens:
            continue
        props.append(
            Proposition(
                id=f"s{len(props)}",
                text=sentence,
                source_unit=unit_id,
                char_span=(start, end),
            )
        )
    return props


def tuple_to_proposition(tup: ExtractionTuple, prop_id: str = "t0",
                         unit_id: str = "") -> Proposition:
    """Render a tuple as a proposition string, components in offset order."""
    for comp in tup.components():
        if comp.start is None or comp.end is None:
            raise InputError("extraction tuple component is missing offsets")
    ordered = sorted(tup.components(), key=lambda c: c.start)
    return Proposition(
        id=prop_id,
        text=" ".join(normalize_ws(c.text) for c in ordered),
        source_unit=unit_id,
        char_span=(min(c.start for c in ordered), max(c.end for c in ordered)),
    )


def _load_sidecar(path: str | Path) -> dict[str, list[ExtractionTuple]]:
    path = Path(path)
    if not path.exists():
        raise InputError(f"tuple sidecar not found: {path}")
    tuples: dict[str, list[ExtractionTuple]] = {}
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise InputError(f"{path}: line {lineno}: invalid JSON: {exc}") from None
            try:
                unit_id = record["unit_id"]
                predicate = TextSpan(**record["predicate"])
                arguments = tuple(TextSpan(**a) for a in record["arguments"])
            except (KeyError, TypeError) as exc:
                raise InputError(f"{path}: line {lineno}: malformed tuple: {exc}") from None
            tuples.setdefault(unit_id, []).append(
                ExtractionTuple(predicate=predicate, arguments=arguments)
            )
    return tuples


def _derive(unit_id: str, text: str | None, config: ExtractorConfig,
            sidecar: dict[str, list[ExtractionTuple]] | None) -> tuple[Proposition, ...]:
    if config.mode == "precomputed":
        raise InputError(
            f"unit {unit_id!r} has no propositions and mode is 'precomputed'"
        )
    if config.mode == "external":
        tuples = (sidecar or {}).get(unit_id, [])
        return tuple(
            tuple_to_proposition(t, prop_id=f"t{i}", unit_id=unit_id)
            for i, t in enumerate(tuples)
        )
    if text is None:
        raise InputError(f"unit {unit_id!r} has neither text nor propositions")
    return tuple(extract_sentences(text, config, unit_id=unit_id))


def ensure_propositions(topic: Topic, config: ExtractorConfig) -> Topic:
    """Return a topic whose every unit carries propositions.

    Units that already have them are returned untouched; the rest are
    filled in according to `config.mode`.
    """
    sidecar = None
    if config.mode == "external":
        if config.sidecar is None:
            raise InputError("external extractor mode requires a sidecar path")
        sidecar = _load_sidecar(config.sidecar)

    def fill_doc(doc: Document) -> Document:
        if doc.propositions is not None:
            return doc
        return replace(doc, propositions=_derive(doc.doc_id, doc.text, config, sidecar))

    def fill_summary(summary: Summary) -> Summary:
        if summary.propositions is not None:
            return summary
        return replace(
            summary,
            propositions=_derive(summary.summary_id, summary.text, config, sidecar),
        )

    return Topic(
        topic_id=topic.topic_id,
        documents=tuple(fill_doc(d) for d in topic.documents),
        summaries=tuple(fill_summary(s) for s in topic.summaries),
    )
