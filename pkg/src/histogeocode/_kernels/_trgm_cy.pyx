# Compiled trigram candidate-matching kernel.
#
# Walks CSR posting lists directly instead of concatenating them, tracking
# touched object slots so the distance pass only visits objects that share
# at least one trigram with the query. Must stay bit-compatible with
# _trgm_py.match_candidates (same float64 arithmetic, same ordering).

import numpy as np


def match_candidates(indptr, ids, sizes, published, query_tids, n_query_trigrams, max_distance):
    cdef long long[::1] iv = indptr
    cdef int[::1] idv = ids
    cdef int[::1] sz = sizes
    cdef int[::1] qt = query_tids
    cdef Py_ssize_t nobj = sizes.shape[0]
    cdef Py_ssize_t pub = published
    cdef double nq = n_query_trigrams
    cdef double maxd = max_distance

    if pub == 0 or qt.shape[0] == 0:
        return (np.empty(0, dtype=np.int64), np.empty(0, dtype=np.float64))

    counts_arr = np.zeros(nobj, dtype=np.int32)
    touched_arr = np.empty(nobj, dtype=np.int64)
    cdef int[::1] counts = counts_arr
    cdef long long[::1] touched = touched_arr

    cdef Py_ssize_t nt = 0
    cdef Py_ssize_t i, j, t, o
    cdef int c
    for i in range(qt.shape[0]):
        t = qt[i]
        for j in range(iv[t], iv[t + 1]):
            o = idv[j]
            c = counts[o] + 1
            counts[o] = c
            if c == 1:
                touched[nt] = o
                nt += 1

    touched_arr[:nt].sort()

    out_slots_arr = np.empty(nt, dtype=np.int64)
    out_dist_arr = np.empty(nt, dtype=np.float64)
    cdef long long[::1] out_slots = out_slots_arr
    cdef double[::1] out_dist = out_dist_arr

    cdef Py_ssize_t k = 0
    cdef double shared, union_, dist
    for i in range(nt):
        o = touched[i]
        if o >= pub:
            continue
        shared = counts[o]
        union_ = nq + sz[o] - shared
        dist = 1.0 - shared / union_
        if dist <= maxd:
            out_slots[k] = o
            out_dist[k] = dist
            k += 1
    return out_slots_arr[:k], out_dist_arr[:k]
