# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled top-k temporal neighbour selection (hot path of hypergraph rebuilds)."""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def topk_temporal(D, anchor_t, cand_t, cand_key, K, tau):
    """Same contract as hydg._kernels.knn_python.topk_temporal."""
    cdef cnp.ndarray[cnp.float64_t, ndim=2] Dm = np.ascontiguousarray(D, dtype=np.float64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] at = np.ascontiguousarray(anchor_t, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] ct = np.ascontiguousarray(cand_t, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] ck = np.ascontiguousarray(cand_key, dtype=np.int64)
    cdef Py_ssize_t A = Dm.shape[0]
    cdef Py_ssize_t V = Dm.shape[1]
    cdef Py_ssize_t k = int(K)
    cdef long tau_l = int(tau)

    cdef cnp.ndarray[cnp.int64_t, ndim=2] members = np.full((A, max(k, 0)), -1, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] counts = np.zeros(A, dtype=np.int64)
    if k == 0 or V == 0:
        return members, counts

    # insertion-sorted top-k buffers ordered by (d, |dt|, t, key)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] bd = np.empty(k, dtype=np.float64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] bdt = np.empty(k, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] bt = np.empty(k, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] bk = np.empty(k, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] bi = np.empty(k, dtype=np.int64)

    cdef Py_ssize_t a, j, n, pos, q
    cdef long dt, ta
    cdef double d
    cdef bint worse

    for a in range(A):
        ta = at[a]
        n = 0
        for j in range(V):
            dt = ct[j] - ta
            if dt < 0:
                dt = -dt
            if dt == 0 or dt > tau_l:
                continue
            d = Dm[a, j]
            if n == k:
                # compare against current worst (last slot)
                worse = (d > bd[k - 1]
                         or (d == bd[k - 1] and (dt > bdt[k - 1]
                             or (dt == bdt[k - 1] and (ct[j] > bt[k - 1]
                                 or (ct[j] == bt[k - 1] and ck[j] > bk[k - 1]))))))
                if worse:
                    continue
                pos = k - 1
            else:
                pos = n
                n += 1
            while pos > 0:
                worse = (d < bd[pos - 1]
                         or (d == bd[pos - 1] and (dt < bdt[pos - 1]
                             or (dt == bdt[pos - 1] and (ct[j] < bt[pos - 1]
                                 or (ct[j] == bt[pos - 1] and ck[j] < bk[pos - 1]))))))
                if not worse:
                    break
                bd[pos] = bd[pos - 1]
                bdt[pos] = bdt[pos - 1]
                bt[pos] = bt[pos - 1]
                bk[pos] = bk[pos - 1]
                bi[pos] = bi[pos - 1]
                pos -= 1
            bd[pos] = d
            bdt[pos] = dt
            bt[pos] = ct[j]
            bk[pos] = ck[j]
            bi[pos] = j
        for q in range(n):
            members[a, q] = bi[q]
        counts[a] = n
    return members, counts
