# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled fused receiver kernel; same contract as ``_rxkernel_py.window_sums``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport floor, sqrt

cnp.import_array()


def window_sums(const double complex[:, ::1] y, b1, a1, b2, a2, Py_ssize_t ds,
                const long long[::1] starts, Py_ssize_t n_body, Py_ssize_t n_bit,
                Py_ssize_t trim_l, Py_ssize_t trim_r, int adc_bits):
    cdef double[::1] B1 = np.ascontiguousarray(b1, dtype=np.float64) / a1[0]
    cdef double[::1] A1 = np.ascontiguousarray(a1, dtype=np.float64) / a1[0]
    cdef double[::1] B2 = np.ascontiguousarray(b2, dtype=np.float64) / a2[0]
    cdef double[::1] A2 = np.ascontiguousarray(a2, dtype=np.float64) / a2[0]
    cdef Py_ssize_t o1 = B1.shape[0] - 1, o2 = B2.shape[0] - 1
    cdef Py_ssize_t T = y.shape[0], N = y.shape[1]
    cdef Py_ssize_t win = n_body // n_bit
    out_arr = np.zeros((T, n_bit), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef double[::1] zr = np.zeros(max(o1, 1)), zi = np.zeros(max(o1, 1))
    cdef double[::1] z2 = np.zeros(max(o2, 1))
    cdef double[::1] seg = np.zeros(n_body)
    cdef Py_ssize_t t, n, i, m, need, first, last, w
    cdef double xr, xi, yr, yi, mag, e, peak, v, levels = 2.0 ** adc_bits, acc
    if A1.shape[0] != B1.shape[0] or A2.shape[0] != B2.shape[0]:
        raise ValueError("numerator and denominator must have equal length")
    for t in range(T):
        first = starts[t]
        last = first + n_body - 1
        need = last * ds + 1
        if first < 0 or need > N:
            raise ValueError("decision segment exceeds the received samples")
        for i in range(o1):
            zr[i] = 0.0
            zi[i] = 0.0
        for i in range(o2):
            z2[i] = 0.0
        for n in range(need):
            # band-select filter, direct form II transposed, real taps on re/im
            xr = y[t, n].real
            xi = y[t, n].imag
            if o1 > 0:
                yr = B1[0] * xr + zr[0]
                yi = B1[0] * xi + zi[0]
                for i in range(1, o1):
                    zr[i - 1] = B1[i] * xr + zr[i] - A1[i] * yr
                    zi[i - 1] = B1[i] * xi + zi[i] - A1[i] * yi
                zr[o1 - 1] = B1[o1] * xr - A1[o1] * yr
                zi[o1 - 1] = B1[o1] * xi - A1[o1] * yi
            else:
                yr = B1[0] * xr
                yi = B1[0] * xi
            mag = sqrt(yr * yr + yi * yi)
            if o2 > 0:
                e = B2[0] * mag + z2[0]
                for i in range(1, o2):
                    z2[i - 1] = B2[i] * mag + z2[i] - A2[i] * e
                z2[o2 - 1] = B2[o2] * mag - A2[o2] * e
            else:
                e = B2[0] * mag
            if n % ds == 0:
                m = n // ds - first
                if m >= 0:
                    seg[m] = e if e > 0.0 else 0.0
        peak = 0.0
        for m in range(n_body):
            if seg[m] > peak:
                peak = seg[m]
        if peak == 0.0:
            continue
        for w in range(n_bit):
            acc = 0.0
            for m in range(w * win + trim_l, (w + 1) * win - trim_r):
                v = floor(seg[m] / peak * levels)
                if v > levels - 1:
                    v = levels - 1
                acc += (v + 0.5) / levels
            out[t, w] = acc
    return out_arr
