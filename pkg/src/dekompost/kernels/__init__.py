"""Hot numeric kernels with an optional numba backend.

Set ``DEKOMPOST_NUMBA=0`` to run the pure-numpy implementations. Both
backends are importable explicitly through :data:`numba_impl` and
:data:`numpy_impl` for comparison and benchmarking.

With numba enabled, :data:`active` uses the jitted tree kernels but keeps the
numpy recurrences: those are dominated by BLAS calls and ``tanh``, and numpy's
vectorized ``tanh`` beats numba's scalar one unless numba was built with SVML
(see ``benchmarks/bench_kernels.py``).
"""

from __future__ import annotations

import os
from types import SimpleNamespace

from . import rnn, trees

_FLAG = os.environ.get("DEKOMPOST_NUMBA", "1").strip().lower()

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

HAVE_NUMBA = numba is not None
USE_NUMBA = HAVE_NUMBA and _FLAG not in {"0", "false", "no", "off"}

numpy_impl = SimpleNamespace(
    rnn_forward=rnn.rnn_forward,
    rnn_backward=rnn.rnn_backward,
    best_split=trees.best_split_numpy,
    tree_apply=trees.tree_apply_numpy,
)

if HAVE_NUMBA:
    _jit = numba.njit(cache=True, nogil=True)
    numba_impl = SimpleNamespace(
        rnn_forward=_jit(rnn.rnn_forward),
        rnn_backward=_jit(rnn.rnn_backward),
        best_split=_jit(trees.best_split_loops),
        tree_apply=_jit(trees.tree_apply_loops),
    )
else:  # pragma: no cover
    numba_impl = None

if USE_NUMBA:
    _rnn = numba_impl if numba.config.USING_SVML else numpy_impl
    active = SimpleNamespace(
        rnn_forward=_rnn.rnn_forward,
        rnn_backward=_rnn.rnn_backward,
        best_split=numba_impl.best_split,
        tree_apply=numba_impl.tree_apply,
    )
else:
    active = numpy_impl
BACKEND = "numba" if USE_NUMBA else "numpy"

__all__ = ["active", "numpy_impl", "numba_impl", "BACKEND", "USE_NUMBA", "HAVE_NUMBA"]
