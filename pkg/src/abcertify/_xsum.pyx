# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled left fold of log-domain addition.

Mirrors ``xreal.fold_add_logs_py`` operation for operation: shifted
log-sum-exp with one upward ulp per step (libm exp/log1p/nextafter), so
the result is bit-identical to the pure-Python loop.
"""

from libc.math cimport exp, log1p, nextafter, INFINITY


def fold_logs(double[::1] logs not None):
    """Fold an array of natural-log magnitudes; -inf encodes zero terms."""
    cdef Py_ssize_t i, n = logs.shape[0]
    cdef double acc = -INFINITY
    cdef double hi, lo, v
    for i in range(n):
        v = logs[i]
        if v == -INFINITY:
            continue
        if acc == -INFINITY:
            acc = v
            continue
        if acc >= v:
            hi = acc
            lo = v
        else:
            hi = v
            lo = acc
        acc = nextafter(hi + log1p(exp(lo - hi)), INFINITY)
    return acc
