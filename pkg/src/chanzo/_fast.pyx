# cython: boundscheck=False, wraparound=False, cdivision=True
# cython: language_level=3
"""Compiled implementations of the hot numeric kernels.

Same five functions, signatures and semantics as chanzo._kernels_np; the
backend chooser in chanzo.kernels picks this module when it is built.
Keep the two implementations in lockstep.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport cos, sin

cnp.import_array()

cdef double TWO_PI = 6.283185307179586
cdef double complex CJ = 1j


cdef inline double complex cis(double t) noexcept nogil:
    return cos(t) + CJ * sin(t)


def ris_response(coeffs, phases, direct):
    """End-to-end narrowband gain of a phase-controlled reflecting surface:
    direct + sum_m coeffs[m] * exp(j*phases[m])."""
    cdef double complex[::1] c = np.ascontiguousarray(coeffs, dtype=np.complex128)
    cdef double[::1] ph = np.ascontiguousarray(phases, dtype=np.float64)
    cdef double complex acc = direct
    cdef Py_ssize_t m
    for m in range(c.shape[0]):
        acc = acc + c[m] * cis(ph[m])
    return complex(acc)


def ris_response_batch(coeffs, phases_mat, direct):
    """ris_response for each row of phases_mat; returns a complex vector."""
    cdef double complex[::1] c = np.ascontiguousarray(coeffs, dtype=np.complex128)
    cdef double[:, ::1] ph = np.ascontiguousarray(phases_mat, dtype=np.float64)
    cdef Py_ssize_t n_rows = ph.shape[0], m_dim = ph.shape[1]
    out_arr = np.empty(n_rows, dtype=np.complex128)
    cdef double complex[::1] out = out_arr
    cdef double complex d = direct, acc
    cdef Py_ssize_t n, m
    with nogil:
        for n in range(n_rows):
            acc = d
            for m in range(m_dim):
                acc = acc + c[m] * cis(ph[n, m])
            out[n] = acc
    return out_arr


def ma_response(gains, dirs, wavelength, pos):
    """Field-response gain at a 2-D antenna position: sum_k gains[k] *
    exp(j * 2*pi/wavelength * <pos, dirs[k]>)."""
    cdef double complex[::1] g = np.ascontiguousarray(gains, dtype=np.complex128)
    cdef double[:, ::1] u = np.ascontiguousarray(dirs, dtype=np.float64)
    cdef double[::1] p = np.ascontiguousarray(pos, dtype=np.float64)
    cdef double w = TWO_PI / wavelength
    cdef double complex acc = 0
    cdef Py_ssize_t k
    for k in range(g.shape[0]):
        acc = acc + g[k] * cis(w * (u[k, 0] * p[0] + u[k, 1] * p[1]))
    return complex(acc)


def ma_response_batch(gains, dirs, wavelength, positions):
    """ma_response for each row of positions; returns a complex vector."""
    cdef double complex[::1] g = np.ascontiguousarray(gains, dtype=np.complex128)
    cdef double[:, ::1] u = np.ascontiguousarray(dirs, dtype=np.float64)
    cdef double[:, ::1] pts = np.ascontiguousarray(positions, dtype=np.float64)
    cdef Py_ssize_t n_rows = pts.shape[0], k_dim = g.shape[0]
    out_arr = np.empty(n_rows, dtype=np.complex128)
    cdef double complex[::1] out = out_arr
    cdef double w = TWO_PI / wavelength
    cdef double complex acc
    cdef Py_ssize_t n, k
    with nogil:
        for n in range(n_rows):
            acc = 0
            for k in range(k_dim):
                acc = acc + g[k] * cis(w * (u[k, 0] * pts[n, 0] + u[k, 1] * pts[n, 1]))
            out[n] = acc
    return out_arr


def csm_tally(powers, codes, n_values):
    """Conditional power tallies for sample-mean phase selection.

    codes[n, m] is the phase-book index element m used in probe n. Returns
    (sums, counts) of shape (n_values, M): sums[v, m] totals the measured
    power of probes where element m used value v, counts[v, m] how many.
    """
    cdef double[::1] pw = np.ascontiguousarray(powers, dtype=np.float64)
    cdef cnp.int64_t[:, ::1] cd = np.ascontiguousarray(codes, dtype=np.int64)
    cdef Py_ssize_t n_probes = cd.shape[0], n_elem = cd.shape[1]
    sums_arr = np.zeros((n_values, n_elem), dtype=np.float64)
    counts_arr = np.zeros((n_values, n_elem), dtype=np.int64)
    cdef double[:, ::1] sums = sums_arr
    cdef cnp.int64_t[:, ::1] counts = counts_arr
    cdef double p
    cdef Py_ssize_t n, m
    cdef cnp.int64_t v, nv = n_values
    with nogil:
        for n in range(n_probes):
            p = pw[n]
            for m in range(n_elem):
                v = cd[n, m]
                if 0 <= v < nv:
                    sums[v, m] += p
                    counts[v, m] += 1
    return sums_arr, counts_arr
