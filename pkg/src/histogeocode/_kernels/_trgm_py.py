"""NumPy fallback for the trigram candidate-matching kernel.

Same contract as the compiled version: given CSR posting lists (trigram id
-> object slots), the per-object trigram counts, and the query's trigram
ids, return the slots whose trigram distance to the query is within the
threshold, in ascending slot order, together with the distances.
"""

from __future__ import annotations

import numpy as np


def match_candidates(indptr, ids, sizes, published, query_tids, n_query_trigrams, max_distance):
    empty = (np.empty(0, dtype=np.int64), np.empty(0, dtype=np.float64))
    if published == 0 or len(query_tids) == 0:
        return empty
    parts = [ids[indptr[t] : indptr[t + 1]] for t in query_tids]
    hits = np.concatenate(parts)
    if hits.size == 0:
        return empty
    shared = np.bincount(hits, minlength=len(sizes))
    touched = np.nonzero(shared)[0]
    touched = touched[touched < published]
    if touched.size == 0:
        return empty
    sh = shared[touched].astype(np.float64)
    union = float(n_query_trigrams) + sizes[touched].astype(np.float64) - sh
    dist = 1.0 - sh / union
    keep = dist <= max_distance
    return touched[keep].astype(np.int64), dist[keep]
