"""Pure-Python maximum-coverage kernels.

Reference implementation and fallback for the compiled extension in
`_fastcover.pyx`. Rows of the incidence matrix are packed into integer
bitmasks; both backends must produce identical outputs for identical
inputs (same tie-breaking, same enumeration order).
"""

from __future__ import annotations

from itertools import combinations

import numpy as np


def backend_name() -> str:
    return "pure"


def _pack_rows(incidence) -> list[int]:
    inc = np.ascontiguousarray(incidence, dtype=np.uint8)
    if inc.ndim != 2:
        raise ValueError("incidence must be 2-D")
    masks = []
    for row in inc:
        mask = 0
        for j in np.flatnonzero(row):
            mask |= 1 << int(j)
        masks.append(mask)
    return masks


def greedy_cover(incidence) -> tuple[np.ndarray, np.ndarray]:
    """Greedily order all rows by marginal coverage gain.

    Returns (order, counts): the full row order and the cumulative number
    of covered columns after each pick. Ties break toward the lowest row
    index, so zero-gain rows end up appended in index order.
    """
    masks = _pack_rows(incidence)
    n = len(masks)
    order = np.empty(n, dtype=np.int64)
    counts = np.empty(n, dtype=np.int64)
    covered = 0
    total = 0
    remaining = list(range(n))
    for step in range(n):
        best_gain = -1
        best_doc = -1
        for d in remaining:
            gain = (masks[d] & ~covered).bit_count()
            if gain > best_gain:
                best_gain = gain
                best_doc = d
        remaining.remove(best_doc)
        covered |= masks[best_doc]
        total += best_gain
        order[step] = best_doc
        counts[step] = total
    return order, counts


def best_cover(incidence, k: int) -> tuple[np.ndarray, int]:
    """Exhaustively find the size-k row subset covering the most columns.

    Subsets are enumerated in lexicographic index order and only a strictly
    greater count replaces the incumbent, so ties resolve to the
    lexicographically smallest index tuple.
    """
    masks = _pack_rows(incidence)
    n = len(masks)
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k}")
    best_count = -1
    best_combo = None
    for combo in combinations(range(n), k):
        union = 0
        for d in combo:
            union |= masks[d]
        count = union.bit_count()
        if count > best_count:
            best_count = count
            best_combo = combo
    return np.array(best_combo, dtype=np.int64), best_count
