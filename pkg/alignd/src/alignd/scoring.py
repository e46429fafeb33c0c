"""Pair scorers served over the wire protocol.

The stub scorer mirrors the client side's lexical set-F1 formula exactly,
so integration tests can exercise the protocol without model assets.
Model-backed scores are clamped into [0, 1]; every clamp is counted and
logged.
"""

from __future__ import annotations

import logging
import re
import threading

logger = logging.getLogger("alignd")

_PUNCT = re.compile(r"[^\w\s]")


def stub_score(summary_prop: str, doc_prop: str) -> float:
    """Token set-F1: 2|A&B| / (|A| + |B|), 0 when either set is empty."""
    set_a = frozenset(_PUNCT.sub(" ", summary_prop.lower()).split())
    set_b = frozenset(_PUNCT.sub(" ", doc_prop.lower()).split())
    if not set_a or not set_b:
        return 0.0
    return 2 * len(set_a & set_b) / (len(set_a) + len(set_b))


class StubScorer:
    """Deterministic lexical scorer; no model assets required."""

    def __init__(self, model_id: str = "stub-lexical"):
        self.model_id = model_id
        self.clamped = 0

    def score(self, pairs: list[tuple[str, str]]) -> list[float]:
        return [stub_score(a, b) for a, b in pairs]


class ModelScorer:
    """Cross-encoder scorer; inference is serialized behind a lock."""

    def __init__(self, model_id: str):
        from sentence_transformers import CrossEncoder

        self.model_id = model_id
        self._model = CrossEncoder(model_id)
        self._lock = threading.Lock()
        self.clamped = 0

    def _predict(self, pairs: list[tuple[str, str]]) -> list[float]:
        with self._lock:
            return [float(v) for v in self._model.predict(pairs)]

    def score(self, pairs: list[tuple[str, str]]) -> list[float]:
        scores = []
        for raw in self._predict(pairs):
            clamped = min(1.0, max(0.0, raw))
            if clamped != raw:
                self.clamped += 1
                logger.warning(
                    "clamped model score %.6f to %.1f (%d clamps total)",
                    raw, clamped, self.clamped,
                )
            scores.append(clamped)
        return scores


def build_scorer(mode: str, model_id: str | None):
    if mode == "stub":
        return StubScorer(model_id or "stub-lexical")
    if mode == "model":
        if not model_id:
            raise ValueError("model mode requires a model id")
        return ModelScorer(model_id)
    raise ValueError(f"unknown mode {mode!r}")
