"""Exact greedy split search and tree evaluation for second-order boosting.

Split gain for a node with gradient sum G and hessian sum H:

    G_L^2 / (H_L + lam) + G_R^2 / (H_R + lam) - G^2 / (H + lam)

Rows go left when ``x[feature] <= threshold``; thresholds are observed
feature values. Ties keep the lowest feature index, then the lowest
threshold. The loop and vectorized versions perform the same floating
point operations in the same order and return identical results.
"""

import numpy as np


def best_split_loops(X, order, in_node, g, h, cnt, g_tot, h_tot, c_tot, min_leaf, lam):
    """Scan presorted columns. order: (D, N) argsort of each column of X.

    Returns (feature, threshold, gain); feature is -1 when no split has
    positive gain with both children holding at least ``min_leaf`` weight.
    """
    D = order.shape[0]
    N = order.shape[1]
    parent = g_tot * g_tot / (h_tot + lam)
    best_gain = 0.0
    best_f = -1
    best_thr = 0.0
    for f in range(D):
        gl = 0.0
        hl = 0.0
        cl = 0.0
        seen = False
        prev = 0.0
        for k in range(N):
            i = order[f, k]
            if not in_node[i]:
                continue
            v = X[i, f]
            if seen and v > prev:
                cr = c_tot - cl
                if cl >= min_leaf and cr >= min_leaf:
                    gr = g_tot - gl
                    hr = h_tot - hl
                    gain = gl * gl / (hl + lam) + gr * gr / (hr + lam) - parent
                    if gain > best_gain:
                        best_gain = gain
                        best_f = f
                        best_thr = prev
            gl += g[i]
            hl += h[i]
            cl += cnt[i]
            prev = v
            seen = True
    return best_f, best_thr, best_gain


def best_split_numpy(X, order, in_node, g, h, cnt, g_tot, h_tot, c_tot, min_leaf, lam):
    D = order.shape[0]
    n = int(np.count_nonzero(in_node))
    if n < 2:
        return -1, 0.0, 0.0
    # every row keeps exactly n members, so the compressed array reshapes cleanly
    sub = order[in_node[order]].reshape(D, n)
    vals = X[sub, np.arange(D)[:, None]]
    gl = np.cumsum(g[sub], axis=1)[:, :-1]
    hl = np.cumsum(h[sub], axis=1)[:, :-1]
    cl = np.cumsum(cnt[sub], axis=1)[:, :-1]
    cr = c_tot - cl
    legal = (vals[:, 1:] > vals[:, :-1]) & (cl >= min_leaf) & (cr >= min_leaf)
    if not legal.any():
        return -1, 0.0, 0.0
    parent = g_tot * g_tot / (h_tot + lam)
    gr = g_tot - gl
    hr = h_tot - hl
    with np.errstate(invalid="ignore", divide="ignore"):
        gain = gl * gl / (hl + lam) + gr * gr / (hr + lam) - parent
    gain = np.where(legal, gain, -np.inf)
    flat = int(np.argmax(gain))
    f, k = divmod(flat, gain.shape[1])
    if not gain[f, k] > 0.0:
        return -1, 0.0, 0.0
    return f, float(vals[f, k]), float(gain[f, k])


def tree_apply_loops(X, feature, threshold, left, right, value):
    N = X.shape[0]
    out = np.empty(N)
    for r in range(N):
        node = 0
        while feature[node] >= 0:
            if X[r, feature[node]] <= threshold[node]:
                node = left[node]
            else:
                node = right[node]
        out[r] = value[node]
    return out


def tree_apply_numpy(X, feature, threshold, left, right, value):
    node = np.zeros(X.shape[0], dtype=np.int64)
    rows = np.arange(X.shape[0])
    active = feature[node] >= 0
    while active.any():
        idx = rows[active]
        nd = node[idx]
        go_left = X[idx, feature[nd]] <= threshold[nd]
        node[idx] = np.where(go_left, left[nd], right[nd])
        active = feature[node] >= 0
    return value[node]
