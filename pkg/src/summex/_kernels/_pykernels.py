"""Pure-numpy bitmap kernels, the fallback when the compiled core is absent.

All bitmaps are little-endian uint64 word arrays: bit ``i`` of the set lives
in ``words[i >> 6]`` at position ``i & 63``.
"""

import numpy as np

BACKEND = "pure"


def popcount(words: np.ndarray) -> int:
    return int(np.bitwise_count(words).sum())


def and_popcount(a: np.ndarray, b: np.ndarray) -> int:
    return int(np.bitwise_count(a & b).sum())


def intersect(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a & b


def is_subset(a: np.ndarray, b: np.ndarray) -> bool:
    """True when every bit of a is set in b."""
    return bool(np.array_equal(a & b, a))


def facet_counts(t: np.ndarray, occ: np.ndarray) -> np.ndarray:
    """Per-row popcount of ``t & occ[j]`` for the (attribute, bin) occurrence
    matrix ``occ`` of shape (n_entries, n_words)."""
    return np.bitwise_count(occ & t[np.newaxis, :]).sum(axis=1, dtype=np.int64)


def superset_scan(
    members: np.ndarray,
    sizes: np.ndarray,
    order: np.ndarray,
    query: np.ndarray,
    query_size: int,
    limit: int,
) -> np.ndarray:
    """Ids of itemsets whose member bitmap strictly contains ``query``.

    ``order`` lists candidate ids sorted by (size asc, id asc); the scan is
    resumed in that order and stops after ``limit`` hits, so the result is
    already in the required order.
    """
    cands = order[sizes[order] > query_size]
    if cands.size == 0:
        return np.empty(0, dtype=np.int64)
    hits = np.all((members[cands] & query) == query, axis=1)
    return cands[hits][:limit].astype(np.int64)
