# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""Compiled maximum-coverage kernels over packed 64-bit bitsets.

Must stay behaviorally identical to `_purecover`: same tie-breaking
(lowest index wins), same lexicographic enumeration order.
"""

from libc.stdint cimport int64_t, uint64_t

import numpy as np

cdef extern from *:
    """
    static inline unsigned long long bitset_popcount(unsigned long long x) {
    #if defined(_MSC_VER)
        unsigned long long c = 0;
        while (x) { x &= x - 1; ++c; }
        return c;
    #else
        return __builtin_popcountll(x);
    #endif
    }
    """
    uint64_t bitset_popcount(uint64_t x) nogil


def backend_name():
    return "compiled"


cdef void _pack(const unsigned char[:, :] incidence, uint64_t[:, ::1] masks) noexcept nogil:
    cdef Py_ssize_t n = incidence.shape[0]
    cdef Py_ssize_t m = incidence.shape[1]
    cdef Py_ssize_t d, j
    for d in range(n):
        for j in range(m):
            if incidence[d, j]:
                masks[d, j >> 6] |= (<uint64_t>1) << (j & 63)


def greedy_cover(incidence):
    """Greedily order all rows by marginal coverage gain.

    Returns (order, counts): the full row order and the cumulative number
    of covered columns after each pick. Ties break toward the lowest row
    index, so zero-gain rows end up appended in index order.
    """
    inc = np.ascontiguousarray(incidence, dtype=np.uint8)
    if inc.ndim != 2:
        raise ValueError("incidence must be 2-D")
    cdef Py_ssize_t n = inc.shape[0]
    cdef Py_ssize_t m = inc.shape[1]
    cdef Py_ssize_t n_words = (m + 63) // 64
    if n_words == 0:
        n_words = 1
    masks_arr = np.zeros((n, n_words), dtype=np.uint64)
    cdef uint64_t[:, ::1] masks = masks_arr
    _pack(inc, masks)

    order_arr = np.empty(n, dtype=np.int64)
    counts_arr = np.empty(n, dtype=np.int64)
    cdef int64_t[::1] order = order_arr
    cdef int64_t[::1] counts = counts_arr
    covered_arr = np.zeros(n_words, dtype=np.uint64)
    cdef uint64_t[::1] covered = covered_arr
    picked_arr = np.zeros(n, dtype=np.uint8)
    cdef unsigned char[::1] picked = picked_arr

    cdef Py_ssize_t step, d, w, best_doc
    cdef int64_t best_gain, gain, total = 0
    with nogil:
        for step in range(n):
            best_gain = -1
            best_doc = -1
            for d in range(n):
                if picked[d]:
                    continue
                gain = 0
                for w in range(n_words):
                    gain += <int64_t>bitset_popcount(masks[d, w] & ~covered[w])
                if gain > best_gain:
                    best_gain = gain
                    best_doc = d
            picked[best_doc] = 1
            for w in range(n_words):
                covered[w] |= masks[best_doc, w]
            total += best_gain
            order[step] = best_doc
            counts[step] = total
    return order_arr, counts_arr


def best_cover(incidence, k):
    """Exhaustively find the size-k row subset covering the most columns.

    Subsets are enumerated in lexicographic index order and only a strictly
    greater count replaces the incumbent, so ties resolve to the
    lexicographically smallest index tuple.
    """
    inc = np.ascontiguousarray(incidence, dtype=np.uint8)
    if inc.ndim != 2:
        raise ValueError("incidence must be 2-D")
    cdef Py_ssize_t n = inc.shape[0]
    cdef Py_ssize_t m = inc.shape[1]
    cdef Py_ssize_t kk = k
    if kk < 1 or kk > n:
        raise ValueError(f"k must be in [1, {n}], got {k}")
    cdef Py_ssize_t n_words = (m + 63) // 64
    if n_words == 0:
        n_words = 1
    masks_arr = np.zeros((n, n_words), dtype=np.uint64)
    cdef uint64_t[:, ::1] masks = masks_arr
    _pack(inc, masks)

    combo_arr = np.empty(kk, dtype=np.int64)
    best_arr = np.empty(kk, dtype=np.int64)
    unions_arr = np.zeros((kk, n_words), dtype=np.uint64)
    cdef int64_t[::1] combo = combo_arr
    cdef int64_t[::1] best = best_arr
    cdef uint64_t[:, ::1] unions = unions_arr

    cdef Py_ssize_t depth, w, i
    cdef int64_t count, best_count = -1
    with nogil:
        for depth in range(kk):
            combo[depth] = depth
        _refill_unions(masks, combo, unions, 0, kk, n_words)
        while True:
            count = 0
            for w in range(n_words):
                count += <int64_t>bitset_popcount(unions[kk - 1, w])
            if count > best_count:
                best_count = count
                for depth in range(kk):
                    best[depth] = combo[depth]
            # advance to the next combination in lexicographic order
            i = kk - 1
            while i >= 0 and combo[i] == n - kk + i:
                i -= 1
            if i < 0:
                break
            combo[i] += 1
            for depth in range(i + 1, kk):
                combo[depth] = combo[depth - 1] + 1
            _refill_unions(masks, combo, unions, i, kk, n_words)
    return best_arr, int(best_count)


cdef void _refill_unions(uint64_t[:, ::1] masks, int64_t[::1] combo,
                         uint64_t[:, ::1] unions, Py_ssize_t start,
                         Py_ssize_t k, Py_ssize_t n_words) noexcept nogil:
    cdef Py_ssize_t depth, w
    for depth in range(start, k):
        if depth == 0:
            for w in range(n_words):
                unions[0, w] = masks[combo[0], w]
        else:
            for w in range(n_words):
                unions[depth, w] = unions[depth - 1, w] | masks[combo[depth], w]
