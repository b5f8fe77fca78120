"""One-shot bootstrap: the k most diverse itemsets above a uniformity floor.

Initialization takes the k most uniform candidates; the scan then walks the
remaining pool in descending uniformity and commits any single replacement
that strictly raises the summary's minimum pairwise distance. Passes repeat
until no replacement improves, so the result is 1-swap locally optimal.
"""

import numpy as np

from .catalog import PatternCatalog
from .metrics import Summary


class SwapError(ValueError):
    pass


def _pairwise_manhattan(vectors: np.ndarray) -> np.ndarray:
    return np.abs(vectors[:, None, :] - vectors[None, :, :]).sum(axis=2)


def _min_div(dist: np.ndarray) -> float:
    k = dist.shape[0]
    if k <= 1:
        return 0.0
    iu = np.triu_indices(k, 1)
    return float(dist[iu].min())


def _exclude_min(dist: np.ndarray) -> np.ndarray:
    """exmin[m] = min pairwise distance among current members without m."""
    k = dist.shape[0]
    out = np.empty(k)
    for m in range(k):
        keep = [i for i in range(k) if i != m]
        out[m] = _min_div(dist[np.ix_(keep, keep)]) if len(keep) > 1 else np.inf
    return out


def catalog_uniformities(catalog: PatternCatalog) -> np.ndarray:
    return catalog.n_attrs / np.maximum(1e-6, catalog.sd_sums)


def swap_summary(catalog: PatternCatalog, k: int = 10, uniformity_threshold: float = 2.0) -> Summary:
    if k < 1:
        raise SwapError("k must be >= 1")
    if uniformity_threshold < 0:
        raise SwapError("uniformity threshold must be >= 0")
    unis = catalog_uniformities(catalog)
    pool = np.flatnonzero(unis >= uniformity_threshold)
    if pool.size == 0:
        raise SwapError(
            f"no itemset reaches uniformity {uniformity_threshold}; lower the threshold"
        )
    order = pool[np.lexsort((pool, -unis[pool]))]  # uniformity desc, id asc
    if pool.size <= k:
        return Summary([int(i) for i in order])
    if k == 1:
        # Diversity of a singleton summary is 0 by definition: no swap can
        # strictly improve it, so the most uniform candidate stands.
        return Summary([int(order[0])])

    members = [int(i) for i in order[:k]]
    vectors = catalog.vector_matrix
    order_list = [int(c) for c in order]

    while True:
        improved = False
        pos = 0
        while True:
            mem_set = set(members)
            dist = _pairwise_manhattan(vectors[members])
            cur = _min_div(dist)
            exmin = _exclude_min(dist)
            pairs = [(p, c) for p, c in enumerate(order_list) if c not in mem_set]
            cpos = np.array([p for p, _ in pairs])
            cand = np.array([c for _, c in pairs])
            # Candidate-to-member distances, and per-candidate row minima
            # with/without the nearest member.
            cdist = np.abs(vectors[cand][:, None, :] - vectors[members][None, :, :]).sum(axis=2)
            min1 = cdist.min(axis=1)
            arg1 = cdist.argmin(axis=1)
            min2 = np.partition(cdist, 1, axis=1)[:, 1] if k > 1 else np.full(len(cand), np.inf)
            row_wo = np.where(np.arange(k)[None, :] == arg1[:, None], min2[:, None], min1[:, None])
            vals = np.minimum(exmin[None, :], row_wo)  # div after replacing member m with c
            best_val = vals.max(axis=1)
            best_m = vals.argmax(axis=1)
            # First improving candidate in scan order at or after pos.
            hits = np.flatnonzero((best_val > cur) & (cpos >= pos))
            if hits.size == 0:
                break
            i = int(hits[0])
            members[int(best_m[i])] = int(cand[i])
            improved = True
            pos = int(cpos[i]) + 1
        if not improved:
            break

    final = sorted(members, key=lambda i: (-unis[i], i))
    return Summary(final)
