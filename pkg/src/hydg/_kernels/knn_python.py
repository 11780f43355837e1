"""Pure-numpy top-k temporal neighbour selection (fallback backend)."""

import numpy as np


def topk_temporal(D, anchor_t, cand_t, cand_key, K, tau):
    """Pick each anchor's K nearest candidates from other slices within tau.

    D holds precomputed ranking distances, one row per anchor, one column per
    candidate. Candidates in the anchor's own slice are never eligible.
    Ordering: (distance, |slice gap|, slice, key) ascending; ties impossible
    past the key because (slice, key) identifies a candidate.

    Returns (members, counts): members is (A, K) int64 padded with -1, rows
    hold selected candidate columns in rank order.
    """
    D = np.asarray(D, dtype=np.float64)
    anchor_t = np.asarray(anchor_t, dtype=np.int64)
    cand_t = np.asarray(cand_t, dtype=np.int64)
    cand_key = np.asarray(cand_key, dtype=np.int64)
    A, V = D.shape
    K = int(K)
    counts = np.zeros(A, dtype=np.int64)
    members = np.full((A, K), -1, dtype=np.int64)
    if K == 0 or V == 0:
        return members, counts
    for a in range(A):
        dt = np.abs(cand_t - anchor_t[a])
        idx = np.flatnonzero((dt > 0) & (dt <= tau))
        if idx.size == 0:
            continue
        d = D[a, idx]
        if idx.size > K:
            # keep everything tied with the K-th distance, then break ties
            kth = np.partition(d, K - 1)[K - 1]
            keep = d <= kth
            idx, d = idx[keep], d[keep]
        order = np.lexsort((cand_key[idx], cand_t[idx], dt[idx], d))[:K]
        sel = idx[order]
        members[a, : sel.size] = sel
        counts[a] = sel.size
    return members, counts
