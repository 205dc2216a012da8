"""Compare the numba and pure-numpy kernel backends.

    python benchmarks/bench_kernels.py            # kernel timings
    python benchmarks/bench_kernels.py --e2e      # plus whole training runs per backend

Kernel timings exclude the first (compiling) call. The end-to-end runs start
a fresh interpreter per backend with ``DEKOMPOST_NUMBA`` set accordingly, so
they include import and cached-compile overhead.
"""

from __future__ import annotations

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from dekompost import kernels
from dekompost.kernels import rnn

E2E_SNIPPET = """
import time, numpy as np
from dekompost import kernels
from dekompost.idiom import train_gbdt
from dekompost.neuro import LabelerConfig, make_batch, loss_and_gradients, init_params
rng = np.random.default_rng(0)
X = rng.normal(size=(600, 900)); y = (X[:, 0] + rng.normal(size=600) > 1.2).astype(int)
t = time.perf_counter(); train_gbdt(X, y, n_estimators=50); gbdt = time.perf_counter() - t
vocab = {"<pad>": 0, "<unk>": 1, **{chr(97 + i): i + 2 for i in range(26)}}
cfg = LabelerConfig(vocab=vocab, hidden_dim=256, embed_dim=64)
p = init_params(cfg, seed=0)
seqs = [list(rng.integers(2, 28, size=int(rng.integers(6, 16)))) for _ in range(64)]
b = make_batch(seqs, [[0] * len(s) for s in seqs])
loss_and_gradients(p, cfg, b)
t = time.perf_counter()
for _ in range(5): loss_and_gradients(p, cfg, b)
step = (time.perf_counter() - t) / 5
print(f"{kernels.BACKEND:6s} gbdt_50_rounds={gbdt:.2f}s labeler_batch64_step={step * 1e3:.1f}ms")
"""


def best_of(fn, repeat=5, number=1) -> float:
    return min(timeit.repeat(fn, repeat=repeat, number=number)) / number


def rnn_case(kind, T=14, B=64, E=64, H=256, seed=0):
    rng = np.random.default_rng(seed)
    G = rnn.N_GATES[kind]
    xs = rng.normal(size=(T, B, E))
    W, U = rng.normal(size=(G * H, E)) * 0.1, rng.normal(size=(G * H, H)) * 0.1
    b = np.zeros(G * H)
    dH = rng.normal(size=(T, B, H))
    return xs, W, U, b, dH


def tree_case(n=600, d=900, seed=0):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, d))
    order = np.ascontiguousarray(np.argsort(X, axis=0, kind="mergesort").T)
    g, h = rng.normal(size=n), rng.uniform(0.1, 1.0, size=n)
    cnt = np.ones(n)
    rows = np.ones(n, dtype=bool)
    return X, order, rows, g, h, cnt


def kernel_rows():
    impls = {"numpy": kernels.numpy_impl, "numba": kernels.numba_impl}
    out = []
    for kind, name in ((rnn.VANILLA, "vanilla"), (rnn.GRU, "gru"), (rnn.LSTM, "lstm")):
        xs, W, U, b, dH = rnn_case(kind)
        times = {}
        for label, impl in impls.items():
            fwd = impl.rnn_forward(kind, xs, W, U, b)  # compile / warm up
            impl.rnn_backward(kind, xs, W, U, *fwd, dH)
            times[label] = (
                best_of(lambda: impl.rnn_forward(kind, xs, W, U, b)),
                best_of(lambda: impl.rnn_backward(kind, xs, W, U, *fwd, dH)),
            )
        out.append((f"rnn_forward {name} T14 B64 H256", times["numpy"][0], times["numba"][0]))
        out.append((f"rnn_backward {name} T14 B64 H256", times["numpy"][1], times["numba"][1]))

    X, order, rows, g, h, cnt = tree_case()
    args = (X, order, rows, g, h, cnt, g.sum(), h.sum(), cnt.sum(), 25.0, 1.0)
    times = {}
    for label, impl in impls.items():
        impl.best_split(*args)
        times[label] = best_of(lambda: impl.best_split(*args), repeat=3)
    out.append(("best_split 600x900", times["numpy"], times["numba"]))

    feature = np.array([0, 1, 2, -1, -1, -1, -1])
    threshold = np.array([0.0, 0.5, -0.5, 0, 0, 0, 0])
    left = np.array([1, 3, 5, -1, -1, -1, -1])
    right = np.array([2, 4, 6, -1, -1, -1, -1])
    value = np.arange(7, dtype=float)
    Xa = np.random.default_rng(1).normal(size=(20000, 3))
    for label, impl in impls.items():
        impl.tree_apply(Xa, feature, threshold, left, right, value)
        times[label] = best_of(lambda: impl.tree_apply(Xa, feature, threshold, left, right, value))
    out.append(("tree_apply 20000 rows depth 2", times["numpy"], times["numba"]))
    return out


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--e2e", action="store_true", help="also time whole training runs per backend")
    args = ap.parse_args(argv)
    if kernels.numba_impl is None:
        print("numba is not installed; nothing to compare")
        return 1
    print(f"{'kernel':36s} {'numpy':>10s} {'numba':>10s} {'speedup':>8s}")
    for name, t_np, t_nb in kernel_rows():
        print(f"{name:36s} {t_np * 1e3:9.2f}ms {t_nb * 1e3:9.2f}ms {t_np / t_nb:7.1f}x")
    if args.e2e:
        print()
        for flag in ("0", "1"):
            env = dict(os.environ, DEKOMPOST_NUMBA=flag)
            subprocess.run([sys.executable, "-c", E2E_SNIPPET], env=env, check=True)
    return 0


if __name__ == "__main__":
    sys.exit(main())
