from __future__ import annotations

import os
import subprocess
import sys

import numpy as np
import pytest

from hopfdiag import _kernels_py, kernels

try:
    from hopfdiag import _kernels as compiled
except ImportError:
    compiled = None

needs_ext = pytest.mark.skipif(compiled is None, reason="compiled kernel not built")


def _case(rng, A, K, R, I, nnz, lo=-4, hi=5):
    rows = rng.integers(0, I, nnz).astype(np.intp)
    cols = rng.integers(0, K, nnz).astype(np.intp)
    vals = rng.integers(lo, hi, nnz).astype(np.int64)
    state = rng.integers(lo, hi, A * K * R).astype(np.int64)
    return state, A, K, R, rows, cols, vals, I


def _dense(case):
    state, A, K, R, rows, cols, vals, I = case
    m = np.zeros((I, K), dtype=object)
    for r, c, v in zip(rows, cols, vals):
        m[r, c] += int(v)
    return _kernels_py.contract_object(state, A, K, R, m, I)


@pytest.mark.parametrize("shape", [(1, 1, 1, 1), (2, 3, 4, 5), (6, 6, 6, 1), (1, 36, 6, 6), (3, 1, 7, 9)])
def test_fallback_matches_exact(shape):
    rng = np.random.default_rng(1)
    case = _case(rng, *shape, nnz=max(1, shape[1] * shape[3] // 2))
    assert np.array_equal(_kernels_py.contract(*case).astype(object), _dense(case))


@needs_ext
@pytest.mark.parametrize("seed", range(20))
def test_backend_parity(seed):
    rng = np.random.default_rng(seed)
    A, K, R, I = (int(x) for x in rng.integers(1, 7, 4))
    case = _case(rng, A, K, R, I, nnz=int(rng.integers(1, K * I + 1)))
    assert np.array_equal(compiled.contract(*case), _kernels_py.contract(*case))


@needs_ext
def test_duplicate_entries_accumulate():
    case = (np.array([1, 2], dtype=np.int64), 1, 2, 1, np.array([0, 0], dtype=np.intp),
            np.array([1, 1], dtype=np.intp), np.array([3, 4], dtype=np.int64), 1)
    assert compiled.contract(*case).tolist() == _kernels_py.contract(*case).tolist() == [14]


@pytest.mark.parametrize("impl", ["python", "cython"])
def test_overflow_raises(impl):
    if impl == "cython" and compiled is None:
        pytest.skip("compiled kernel not built")
    fn = compiled.contract if impl == "cython" else _kernels_py.contract
    big = np.array([2 ** 62, 2 ** 62], dtype=np.int64)
    case = (big, 1, 2, 1, np.array([0, 0], dtype=np.intp), np.array([0, 1], dtype=np.intp),
            np.array([1, 1], dtype=np.int64), 1)
    with pytest.raises(OverflowError):
        fn(*case)


def test_backend_selected():
    assert kernels.BACKEND == ("cython" if compiled is not None else "python")


def test_env_forces_fallback():
    env = dict(os.environ, HOPFDIAG_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "from hopfdiag import kernels; print(kernels.BACKEND)"],
                         capture_output=True, text=True, env=env, check=True)
    assert out.stdout.strip() == "python"


def test_models_agree_across_backends():
    code = ("from hopfdiag.models import *; from hopfdiag.theories import load_theory; "
            "M = function_algebra(builtin_group('s3'), check=False); "
            "print(sum(int(abs(evaluate(r.lhs_term, M)).sum()) for r in load_theory('HR').rules))")
    outs = set()
    for flag in ("0", "1"):
        env = dict(os.environ, HOPFDIAG_PURE_PYTHON=flag)
        outs.add(subprocess.run([sys.executable, "-c", code], capture_output=True, text=True,
                                env=env, check=True).stdout)
    assert len(outs) == 1
