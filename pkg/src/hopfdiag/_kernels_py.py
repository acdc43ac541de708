"""Pure numpy version of the contraction kernel."""
from __future__ import annotations

import numpy as np

_LIMIT = 2 ** 62


def contract(state, A, K, R, rows, cols, vals, I):
    """Same contract as the compiled kernel: int64 in, int64 out, no wrap-around."""
    dense = np.zeros((I, K), dtype=np.int64)
    np.add.at(dense, (np.asarray(rows), np.asarray(cols)), np.asarray(vals))
    st = np.asarray(state).reshape(A, K, R)
    bound = int(np.abs(st).max(initial=0)) * int(np.abs(dense).sum(axis=1).max(initial=0))
    if bound >= _LIMIT:
        raise OverflowError("int64 overflow in contraction")
    return np.matmul(dense, st).reshape(-1)


def contract_object(state, A, K, R, dense, I):
    """Arbitrary precision version on object arrays (ints or Fractions)."""
    st = np.asarray(state, dtype=object).reshape(A, K, R)
    return np.matmul(np.asarray(dense, dtype=object), st).reshape(-1)
