# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled implementations of the Monte Carlo hot loops.

Mirrors ``filtra._kernels.pure`` exactly; keep both in sync. Loops run
without the GIL and avoid the (n, T) temporaries the numpy fallback
materializes.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY, nextafter

cnp.import_array()

BACKEND = "native"


def path_rewards(const unsigned char[:, ::1] ups,
                 const unsigned char[:, ::1] positions,
                 double up_inc, double down_inc, double rho):
    cdef Py_ssize_t n = ups.shape[0]
    cdef Py_ssize_t n_steps = ups.shape[1]
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i, t
    cdef double total, disc, inc
    with nogil:
        for i in range(n):
            total = 0.0
            disc = 1.0
            for t in range(n_steps):
                inc = up_inc if ups[i, t] else -down_inc
                if positions[i, t]:
                    total += disc * inc
                disc *= rho
            out[i] = total
    return out_arr


def walk_cone_violations(const double[:, ::1] increments, double s0,
                         double down_bound, double up_bound):
    cdef Py_ssize_t n = increments.shape[0]
    cdef Py_ssize_t n_steps = increments.shape[1]
    cdef Py_ssize_t i, t
    cdef double total, price, low, high
    cdef long long violations = 0
    # Accumulate increments first and add s0 last, the same association the
    # numpy fallback uses, so both backends see bit-identical prices.
    with nogil:
        for i in range(n):
            total = 0.0
            for t in range(n_steps):
                total = total + increments[i, t]
                price = s0 + total
                low = s0 - (t + 1) * down_bound
                high = s0 + (t + 1) * up_bound
                if price < low or price > high:
                    violations += 1
    return int(violations)


def walk_prices_at(const double[:, ::1] increments, double s0, Py_ssize_t t):
    cdef Py_ssize_t n = increments.shape[0]
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i, k
    cdef double total
    with nogil:
        for i in range(n):
            total = 0.0
            for k in range(t):
                total = total + increments[i, k]
            out[i] = s0 + total
    return out_arr


def count_in_pieces(const double[::1] values, const double[::1] lows,
                    const unsigned char[::1] lows_closed,
                    const double[::1] highs,
                    const unsigned char[::1] highs_closed):
    cdef Py_ssize_t n = values.shape[0]
    cdef Py_ssize_t m = lows.shape[0]
    cdef Py_ssize_t i, j
    cdef double lo, hi
    cdef long long count = 0
    # An open bound equals the closed bound one ulp inward (doubles are
    # discrete), so the flags fold into the bounds up front; the inner loop
    # is then branchless and auto-vectorizable.
    member_arr = np.zeros(n, dtype=np.uint8)
    cdef unsigned char[::1] member = member_arr
    with nogil:
        for j in range(m):
            lo = lows[j] if lows_closed[j] else nextafter(lows[j], INFINITY)
            hi = highs[j] if highs_closed[j] else nextafter(highs[j], -INFINITY)
            for i in range(n):
                member[i] |= (values[i] >= lo) & (values[i] <= hi)
        for i in range(n):
            count += member[i]
    return int(count)
