"""Brute-force reference computations for the boosted-tree tests.

Deliberately naive: every (feature, midpoint) candidate is scored with
boolean masks and plain sums, no shared code with the implementation.
"""

import numpy as np

PROB_EPS = 1e-15


def initial_gradients(y):
    """Gradients of the first boosting round: constant clamped base-rate prediction."""
    p0 = min(max(float(np.mean(y)), PROB_EPS), 1.0 - PROB_EPS)
    g = np.full(len(y), p0) - y
    h = np.full(len(y), p0 * (1.0 - p0))
    return g, h


def gain_of_partition(g, h, left_mask, l2=0.0):
    gl, hl = float(g[left_mask].sum()), float(h[left_mask].sum())
    gr, hr = float(g[~left_mask].sum()), float(h[~left_mask].sum())
    gt, ht = gl + gr, hl + hr
    return 0.5 * (gl * gl / (hl + l2) + gr * gr / (hr + l2) - gt * gt / (ht + l2))


def all_candidate_gains(X, g, h, min_data, l2=0.0):
    """Every admissible (gain, feature, threshold) candidate, exhaustively."""
    n, d = X.shape
    candidates = []
    for f in range(d):
        values = np.unique(X[:, f])
        for lo, hi in zip(values[:-1], values[1:]):
            thr = (lo + hi) / 2.0
            left = X[:, f] <= thr
            nl = int(left.sum())
            if nl < min_data or n - nl < min_data:
                continue
            candidates.append((gain_of_partition(g, h, left, l2), f, thr))
    return candidates


def best_split(X, g, h, min_data, l2=0.0):
    """Exhaustive best (gain, feature, threshold); gain 0.0 when nothing qualifies.

    Ties break toward the lower feature index, then the lower threshold,
    mirroring the documented contract.
    """
    best_gain = 0.0
    best_key = None
    for gain, f, thr in all_candidate_gains(X, g, h, min_data, l2):
        if gain > best_gain:
            best_gain = gain
            best_key = (f, thr)
    return best_gain, best_key
