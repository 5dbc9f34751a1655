# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled Gauss-Seidel sweep kernels for the builtin N-function shapes.

Mirrors phiharm._kernels_py exactly (same update order, same bisection
termination rule) but dispatches Phi/Phi' on a small kind code instead of a
Python callable:

    0: |x|^p / p      1: |x|^p      2: cosh(x) - 1      3: |x|^p log(1+|x|)

Keep the codes in sync with phiharm.nfunction.KIND_*.
"""

from libc.math cimport fabs, pow, sinh, log1p, INFINITY
from libc.stdint cimport int64_t


cdef inline double _phi(int kind, double p, double x) noexcept nogil:
    cdef double a = fabs(x)
    cdef double s
    if kind == 0:
        return pow(a, p) / p
    if kind == 1:
        return pow(a, p)
    if kind == 2:
        s = sinh(0.5 * x)
        return 2.0 * s * s
    return pow(a, p) * log1p(a)


cdef inline double _dphi(int kind, double p, double x) noexcept nogil:
    cdef double a = fabs(x)
    cdef double v
    if kind == 2:
        return sinh(x)
    if kind == 0:
        v = pow(a, p - 1.0)
    elif kind == 1:
        v = p * pow(a, p - 1.0)
    else:
        v = p * pow(a, p - 1.0) * log1p(a) + pow(a, p) / (1.0 + a)
    return v if x >= 0.0 else -v


cdef inline double _g_plain(double[::1] values, int[:, ::1] nbr,
                            int n_gens, Py_ssize_t x,
                            int kind, double p, double c) noexcept nogil:
    cdef double total = 0.0
    cdef int s
    for s in range(n_gens):
        total += _dphi(kind, p, values[nbr[s, x]] - c)
    return total


def sweep_plain(double[::1] values, int[:, ::1] nbr, int64_t[::1] free_idx,
                int kind, double p, double inner_tol):
    cdef int n_gens = nbr.shape[0]
    cdef double max_change = 0.0
    cdef double lo, hi, v, mid, c, change
    cdef Py_ssize_t i, x
    cdef int s, it
    with nogil:
        for i in range(free_idx.shape[0]):
            x = free_idx[i]
            lo = INFINITY
            hi = -INFINITY
            for s in range(n_gens):
                v = values[nbr[s, x]]
                if v < lo:
                    lo = v
                if v > hi:
                    hi = v
            if hi <= lo:
                c = lo
            else:
                for it in range(200):
                    if hi - lo <= inner_tol * (1.0 + fabs(lo) + fabs(hi)):
                        break
                    mid = 0.5 * (lo + hi)
                    if mid <= lo or mid >= hi:
                        break
                    if _g_plain(values, nbr, n_gens, x, kind, p, mid) > 0.0:
                        lo = mid
                    else:
                        hi = mid
                c = 0.5 * (lo + hi)
            change = fabs(c - values[x])
            if change > max_change:
                max_change = change
            values[x] = c
    return max_change


def residual_plain(double[::1] values, int[:, ::1] nbr, int64_t[::1] free_idx,
                   int kind, double p):
    cdef int n_gens = nbr.shape[0]
    cdef double worst = 0.0
    cdef double total
    cdef Py_ssize_t i, x
    cdef int s
    with nogil:
        for i in range(free_idx.shape[0]):
            x = free_idx[i]
            total = 0.0
            for s in range(n_gens):
                total += _dphi(kind, p, values[nbr[s, x]] - values[x])
            if fabs(total) > worst:
                worst = fabs(total)
    return worst


def energy_plain(double[::1] values, int[:, ::1] nbr, int kind, double p):
    cdef double total = 0.0
    cdef Py_ssize_t x
    cdef int s, j
    with nogil:
        for s in range(nbr.shape[0]):
            for x in range(nbr.shape[1]):
                j = nbr[s, x]
                if j >= 0:
                    total += _phi(kind, p, values[j] - values[x])
    return total


cdef inline double _g_offset(double[::1] values, int[:, ::1] nbr,
                             double[:, ::1] off, int[::1] inv_gen,
                             int n_gens, Py_ssize_t x,
                             int kind, double p, double c) noexcept nogil:
    cdef double total = 0.0
    cdef int s, j, y
    for s in range(n_gens):
        j = nbr[s, x]
        if j >= 0:
            total -= _dphi(kind, p, values[j] - c - off[s, x])
        y = nbr[inv_gen[s], x]
        if y >= 0:
            total += _dphi(kind, p, c - values[y] - off[s, y])
    return total


def sweep_offset(double[::1] values, int[:, ::1] nbr, double[:, ::1] off,
                 int[::1] inv_gen, int64_t[::1] free_idx,
                 int kind, double p, double inner_tol):
    cdef int n_gens = nbr.shape[0]
    cdef double max_change = 0.0
    cdef double lo, hi, z, mid, c, change
    cdef Py_ssize_t i, x
    cdef int s, j, y, it
    with nogil:
        for i in range(free_idx.shape[0]):
            x = free_idx[i]
            lo = INFINITY
            hi = -INFINITY
            for s in range(n_gens):
                j = nbr[s, x]
                if j >= 0:
                    z = values[j] - off[s, x]
                    if z < lo:
                        lo = z
                    if z > hi:
                        hi = z
                y = nbr[inv_gen[s], x]
                if y >= 0:
                    z = values[y] + off[s, y]
                    if z < lo:
                        lo = z
                    if z > hi:
                        hi = z
            if hi <= lo:
                c = lo
            else:
                for it in range(200):
                    if hi - lo <= inner_tol * (1.0 + fabs(lo) + fabs(hi)):
                        break
                    mid = 0.5 * (lo + hi)
                    if mid <= lo or mid >= hi:
                        break
                    if _g_offset(values, nbr, off, inv_gen, n_gens, x,
                                 kind, p, mid) < 0.0:
                        lo = mid
                    else:
                        hi = mid
                c = 0.5 * (lo + hi)
            change = fabs(c - values[x])
            if change > max_change:
                max_change = change
            values[x] = c
    return max_change


def residual_offset(double[::1] values, int[:, ::1] nbr, double[:, ::1] off,
                    int[::1] inv_gen, int64_t[::1] free_idx, int kind, double p):
    cdef int n_gens = nbr.shape[0]
    cdef double worst = 0.0
    cdef double total
    cdef Py_ssize_t i, x
    cdef int s, j, y
    with nogil:
        for i in range(free_idx.shape[0]):
            x = free_idx[i]
            total = 0.0
            for s in range(n_gens):
                j = nbr[s, x]
                if j >= 0:
                    total -= _dphi(kind, p, values[j] - values[x] - off[s, x])
                y = nbr[inv_gen[s], x]
                if y >= 0:
                    total += _dphi(kind, p, values[x] - values[y] - off[s, y])
            if fabs(total) > worst:
                worst = fabs(total)
    return 0.5 * worst


def energy_offset(double[::1] values, int[:, ::1] nbr, double[:, ::1] off,
                  int kind, double p):
    cdef double total = 0.0
    cdef Py_ssize_t x
    cdef int s, j
    with nogil:
        for s in range(nbr.shape[0]):
            for x in range(nbr.shape[1]):
                j = nbr[s, x]
                if j >= 0:
                    total += _phi(kind, p, values[j] - values[x] - off[s, x])
    return total
