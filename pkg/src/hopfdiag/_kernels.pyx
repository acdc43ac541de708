# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Sparse int64 contraction of one box into an evaluation state."""
import numpy as np

cdef extern from *:
    """
    static inline int hd_mul_ovf(long long a, long long b, long long *r) {
        return __builtin_mul_overflow(a, b, r);
    }
    static inline int hd_add_ovf(long long a, long long b, long long *r) {
        return __builtin_add_overflow(a, b, r);
    }
    """
    int hd_mul_ovf(long long a, long long b, long long *r) nogil
    int hd_add_ovf(long long a, long long b, long long *r) nogil


def contract(const long long[::1] state, Py_ssize_t A, Py_ssize_t K, Py_ssize_t R,
             const Py_ssize_t[::1] rows, const Py_ssize_t[::1] cols,
             const long long[::1] vals, Py_ssize_t I):
    """out[a, i, r] = sum_k M[i, k] * state[a, k, r] for a sparse M.

    Raises OverflowError instead of wrapping around.
    """
    out = np.zeros(A * I * R, dtype=np.int64)
    cdef long long[::1] o = out
    cdef Py_ssize_t a, n, r, src, dst
    cdef Py_ssize_t nnz = rows.shape[0]
    cdef long long v, p, s
    cdef int bad = 0
    with nogil:
        for a in range(A):
            for n in range(nnz):
                v = vals[n]
                src = (a * K + cols[n]) * R
                dst = (a * I + rows[n]) * R
                for r in range(R):
                    if hd_mul_ovf(v, state[src + r], &p) or hd_add_ovf(o[dst + r], p, &s):
                        bad = 1
                        break
                    o[dst + r] = s
                if bad:
                    break
            if bad:
                break
    if bad:
        raise OverflowError("int64 overflow in contraction")
    return out
