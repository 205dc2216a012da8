"""Both kernel backends must agree; the tree kernels are also checked against plain Python oracles."""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dekompost import kernels
from dekompost.kernels import rnn, trees

pytestmark = pytest.mark.skipif(kernels.numba_impl is None, reason="numba not installed")


def test_active_backend_matches_flag():
    assert kernels.BACKEND in ("numba", "numpy")
    if not kernels.USE_NUMBA:
        assert kernels.active is kernels.numpy_impl
        return
    assert kernels.active.best_split is kernels.numba_impl.best_split
    assert kernels.active.tree_apply is kernels.numba_impl.tree_apply
    assert kernels.active.rnn_forward in (kernels.numba_impl.rnn_forward, kernels.numpy_impl.rnn_forward)


@pytest.mark.parametrize("kind", [rnn.VANILLA, rnn.GRU, rnn.LSTM])
def test_rnn_backends_agree(kind):
    rng = np.random.default_rng(kind)
    T, B, E, H = 5, 3, 4, 6
    G = rnn.N_GATES[kind]
    xs = rng.normal(size=(T, B, E))
    W, U, b = rng.normal(size=(G * H, E)) * 0.5, rng.normal(size=(G * H, H)) * 0.5, rng.normal(size=G * H) * 0.1
    dH = rng.normal(size=(T, B, H))
    a = kernels.numpy_impl.rnn_forward(kind, xs, W, U, b)
    n = kernels.numba_impl.rnn_forward(kind, xs, W, U, b)
    for x, y in zip(a, n):
        np.testing.assert_allclose(x, y, rtol=1e-12, atol=1e-13)
    ga = kernels.numpy_impl.rnn_backward(kind, xs, W, U, *a, dH)
    gn = kernels.numba_impl.rnn_backward(kind, xs, W, U, *n, dH)
    for x, y in zip(ga, gn):
        np.testing.assert_allclose(x, y, rtol=1e-11, atol=1e-12)


def oracle_gains(X, rows, g, h, cnt, min_leaf, lam):
    """Gain of every legal (feature, observed value) threshold, in scan order."""
    G, Hs = g[rows].sum(), h[rows].sum()
    parent = G * G / (Hs + lam)
    out = []
    for f in range(X.shape[1]):
        for thr in sorted(set(X[rows, f])):
            left = rows & (X[:, f] <= thr)
            right = rows & ~left
            if not right.any() or cnt[left].sum() < min_leaf or cnt[right].sum() < min_leaf:
                continue
            gl, hl = g[left].sum(), h[left].sum()
            gr, hr = g[right].sum(), h[right].sum()
            out.append(((f, thr), gl * gl / (hl + lam) + gr * gr / (hr + lam) - parent))
    return out


@given(st.integers(0, 10_000), st.integers(4, 40), st.integers(1, 5), st.sampled_from([1.0, 2.0, 5.0]))
def test_best_split_against_oracle(seed, n, d, min_leaf):
    rng = np.random.default_rng(seed)
    X = rng.integers(0, 6, size=(n, d)).astype(np.float64)  # plenty of ties
    g = rng.normal(size=n)
    h = rng.uniform(0.1, 1.0, size=n)
    cnt = rng.choice([1.0, 3.0], size=n)
    rows = rng.random(n) < 0.8
    order = np.ascontiguousarray(np.argsort(X, axis=0, kind="mergesort").T)
    args = (X, order, rows, g, h, cnt, g[rows].sum(), h[rows].sum(), cnt[rows].sum(), min_leaf, 1.0)
    f_np, thr_np, gain_np = kernels.numpy_impl.best_split(*args)
    f_nb, thr_nb, gain_nb = kernels.numba_impl.best_split(*args)
    assert (f_np, thr_np) == (f_nb, thr_nb)
    np.testing.assert_allclose(gain_np, gain_nb, rtol=1e-12)
    gains = oracle_gains(X, rows, g, h, cnt, min_leaf, 1.0)
    best = max((gain for _, gain in gains), default=0.0)
    if best <= 1e-9:
        assert f_np < 0
        return
    chosen = dict(gains)[(f_np, thr_np)]
    np.testing.assert_allclose(chosen, best, rtol=1e-9)
    np.testing.assert_allclose(gain_np, best, rtol=1e-9)
    # ties go to the lowest feature, then the lowest threshold
    earlier = [gain for key, gain in gains if key < (f_np, thr_np)]
    assert all(gain < best * (1 + 1e-9) for gain in earlier)


def test_tree_apply_backends_and_walk():
    rng = np.random.default_rng(1)
    feature = np.array([0, 1, -1, -1, -1])
    threshold = np.array([0.0, 0.5, 0, 0, 0])
    left = np.array([1, 2, -1, -1, -1])
    right = np.array([4, 3, -1, -1, -1])
    value = np.array([0.0, 0.0, 1.0, 2.0, 3.0])
    X = rng.normal(size=(100, 2))
    expect = np.where(X[:, 0] <= 0, np.where(X[:, 1] <= 0.5, 1.0, 2.0), 3.0)
    for impl in (kernels.numpy_impl, kernels.numba_impl):
        np.testing.assert_array_equal(impl.tree_apply(X, feature, threshold, left, right, value), expect)


def test_loops_reference_runs_as_plain_python():
    # the numba source doubles as a readable reference implementation
    X = np.array([[0.0], [1.0], [2.0], [3.0]])
    order = np.argsort(X, axis=0).T.copy()
    g = np.array([1.0, 1.0, -1.0, -1.0])
    h = np.ones(4)
    f, thr, gain = trees.best_split_loops(X, order, np.ones(4, bool), g, h, np.ones(4), 0.0, 4.0, 4.0, 1.0, 1.0)
    assert (f, thr) == (0, 1.0) and gain > 0
