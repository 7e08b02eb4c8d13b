# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled implementation of the hot loops.

Mirrors :mod:`poincare_kernels._core_py` expression for expression: the same
floating-point operations in the same order (the build disables fused
multiply-add contraction), integer quotients replicate Python's floor
division, and the scalar complex quotient replicates CPython's algorithm.
The sigma <= R membership decisions therefore agree with the fallback to the
last bit.
"""

import numpy as np

from libc.math cimport ceil, fabs, floor, hypot, sqrt

from . import _core_py
from .errors import BudgetExceeded, NoConvergence

__all__ = ["ball_sweep", "pair_arrays", "hyp2f1_series_batch"]

# Above this length numpy's SIMD series loop beats the scalar C loop, so the
# batch evaluator hands large inputs back to the fallback implementation.
DEF SERIES_SIMD_CUTOVER = 512


cdef inline long long _gcd_ll(long long a, long long b) nogil:
    cdef long long t
    while b != 0:
        t = a % b
        a = b
        b = t
    return a


cdef inline long long _floordiv_ll(long long p, long long q) nogil:
    # Python's // floors; C's / truncates toward zero.
    cdef long long t = p / q
    if p % q != 0 and ((p < 0) != (q < 0)):
        t -= 1
    return t


cdef inline void _bezout_ll(long long c, long long d,
                            long long *a0, long long *b0) nogil:
    """(a0, b0) with a0*d - b0*c = 1, assuming gcd(c, d) = 1."""
    cdef long long old_r = d, r = c
    cdef long long old_x = 1, x = 0
    cdef long long old_y = 0, y = 1
    cdef long long q, t
    while r != 0:
        q = _floordiv_ll(old_r, r)
        t = old_r - q * r
        old_r = r
        r = t
        t = old_x - q * x
        old_x = x
        x = t
        t = old_y - q * y
        old_y = y
        y = t
    if old_r < 0:
        old_x = -old_x
        old_y = -old_y
    a0[0] = old_x
    b0[0] = -old_y


cdef inline double _sigma_entry(long long a, long long b, long long c, long long d,
                                double z_re, double z_im,
                                double w_re, double w_im) nogil:
    cdef double dr = c * w_re + d
    cdef double di = c * w_im
    cdef double norm2 = dr * dr + di * di
    cdef double nr = a * w_re + b
    cdef double ni = a * w_im
    cdef double gw_re = (nr * dr + ni * di) / norm2
    cdef double gw_im = w_im / norm2
    cdef double dx = z_re - gw_re
    cdef double dy = z_im - gw_im
    return 1.0 + (dx * dx + dy * dy) / (4.0 * z_im * gw_im)


def ball_sweep(double z_re, double z_im, double w_re, double w_im,
               double R, long long budget):
    """All integer matrices g with det 1 and sigma(z, g w) <= R, canonical order.

    Same sweep as the fallback: bottom rows (c, d) inside the proven bound,
    one Bezout lift per coprime row, and the translate family over the
    n-interval allowed by the displacement bound, each candidate confirmed by
    direct sigma evaluation.  Ordering: (c, d, n) lexicographic.  Raises
    BudgetExceeded past ``budget`` candidates.
    """
    cdef double rr = R * R - R
    if rr < 0.0:
        rr = 0.0
    cdef double t = (2.0 * R - 1.0) + 2.0 * sqrt(rr)
    cdef double b2 = w_im * t / z_im * (1.0 + 1e-12)
    cdef double bmax = sqrt(b2)
    cdef long long cmax = <long long>floor(bmax / w_im + 1e-9)
    cdef list rows = []
    cdef long long candidates = 0
    cdef long long c, d, d_lo, d_hi, n, n_lo, n_hi, a0 = 0, b0 = 0, a, b
    cdef double disc, rad, dr, di, norm2, nr, ni, gw_re, h, disc_n, rad_n
    for c in range(-cmax, cmax + 1):
        disc = b2 - (c * w_im) * (c * w_im)
        if disc < 0.0:
            continue
        rad = sqrt(disc)
        d_lo = <long long>ceil(-c * w_re - rad - 1e-9)
        d_hi = <long long>floor(-c * w_re + rad + 1e-9)
        for d in range(d_lo, d_hi + 1):
            if _gcd_ll(c if c >= 0 else -c, d if d >= 0 else -d) != 1:
                continue
            _bezout_ll(c, d, &a0, &b0)
            dr = c * w_re + d
            di = c * w_im
            norm2 = dr * dr + di * di
            nr = a0 * w_re + b0
            ni = a0 * w_im
            gw_re = (nr * dr + ni * di) / norm2
            h = w_im / norm2
            disc_n = 4.0 * (R - 1.0) * z_im * h - (z_im - h) * (z_im - h)
            if disc_n < 0.0:
                continue
            rad_n = sqrt(disc_n)
            n_lo = <long long>ceil(z_re - gw_re - rad_n - 1e-9)
            n_hi = <long long>floor(z_re - gw_re + rad_n + 1e-9)
            for n in range(n_lo, n_hi + 1):
                candidates += 1
                if candidates > budget:
                    raise BudgetExceeded(
                        f"ball sweep exceeded candidate budget {budget}"
                    )
                a = a0 + n * c
                b = b0 + n * d
                if _sigma_entry(a, b, c, d, z_re, z_im, w_re, w_im) <= R:
                    rows.append((a, b, c, d))
    out = np.array(rows, dtype=np.int64).reshape(-1, 4)
    return out


def pair_arrays(mats, double z_re, double z_im, double w_re, double w_im):
    """Batched displacement/phase data for a stack of integer matrices.

    Returns (sigma, gw_re, gw_im, jw_arg, h_arg); the phase arguments go
    through the same numpy arctan2 ufunc as the fallback, applied to
    bit-identical inputs.
    """
    m = np.asarray(mats, dtype=np.float64)
    cdef double[:, ::1] mv = np.ascontiguousarray(m)
    cdef Py_ssize_t n = mv.shape[0]
    sigma = np.empty(n, dtype=np.float64)
    gw_re = np.empty(n, dtype=np.float64)
    gw_im = np.empty(n, dtype=np.float64)
    dr_arr = np.empty(n, dtype=np.float64)
    di_arr = np.empty(n, dtype=np.float64)
    dx_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] sig_v = sigma
    cdef double[::1] gwr_v = gw_re
    cdef double[::1] gwi_v = gw_im
    cdef double[::1] dr_v = dr_arr
    cdef double[::1] di_v = di_arr
    cdef double[::1] dx_v = dx_arr
    cdef Py_ssize_t i
    cdef double a, b, c, d, dr, di, norm2, nr, ni, gwr, gwi, dx, dy
    for i in range(n):
        a = mv[i, 0]
        b = mv[i, 1]
        c = mv[i, 2]
        d = mv[i, 3]
        dr = c * w_re + d
        di = c * w_im
        norm2 = dr * dr + di * di
        nr = a * w_re + b
        ni = a * w_im
        gwr = (nr * dr + ni * di) / norm2
        gwi = w_im / norm2
        dx = z_re - gwr
        dy = z_im - gwi
        sig_v[i] = 1.0 + (dx * dx + dy * dy) / (4.0 * z_im * gwi)
        gwr_v[i] = gwr
        gwi_v[i] = gwi
        dr_v[i] = dr
        di_v[i] = di
        dx_v[i] = dx
    jw_arg = np.arctan2(di_arr, dr_arr)
    h_arg = np.arctan2(dx_arr, z_im + gw_im)
    return sigma, gw_re, gw_im, jw_arg, h_arg


cdef inline double complex _c_quot(double complex a, double complex b):
    """CPython's complex quotient (Objects/complexobject.c), bit for bit."""
    cdef double areal = a.real, aimag = a.imag
    cdef double breal = b.real, bimag = b.imag
    cdef double abs_breal = fabs(breal)
    cdef double abs_bimag = fabs(bimag)
    cdef double ratio, denom, r_re, r_im
    if abs_breal >= abs_bimag:
        if abs_breal == 0.0:
            raise ZeroDivisionError("complex division by zero")
        ratio = bimag / breal
        denom = breal + bimag * ratio
        r_re = (areal + aimag * ratio) / denom
        r_im = (aimag - areal * ratio) / denom
    else:
        ratio = breal / bimag
        denom = breal * ratio + bimag
        r_re = (areal * ratio + aimag) / denom
        r_im = (aimag * ratio - areal) / denom
    return r_re + r_im * 1j


def hyp2f1_series_batch(a, b, c, x, double rel_tol=1e-15, int max_terms=4096):
    """Gauss series F(a, b; c; x_i) over an array of real arguments |x| < 1.

    Same shared stopping rule as the fallback: two consecutive terms below
    rel_tol relative to the running sum, across every entry at once.  Long
    batches go through the vectorized fallback, short ones through a scalar
    C loop; the split point is the measured crossover of the two.
    """
    x_arr = np.asarray(x, dtype=np.float64)
    cdef Py_ssize_t n = x_arr.shape[0]
    if n == 0:
        return np.zeros(0, dtype=np.complex128)
    if n >= SERIES_SIMD_CUTOVER:
        return _core_py.hyp2f1_series_batch(a, b, c, x_arr, rel_tol, max_terms)
    cdef double complex aa = complex(a)
    cdef double complex bb = complex(b)
    cdef double complex cc = complex(c)
    total = np.ones(n, dtype=np.complex128)
    term = np.ones(n, dtype=np.complex128)
    cdef double complex[::1] tot_v = total
    cdef double complex[::1] term_v = term
    cdef double[::1] x_v = np.ascontiguousarray(x_arr)
    cdef int streak = 0
    cdef Py_ssize_t i
    cdef int j
    cdef double complex ratio
    cdef double abs_tot
    cdef bint all_small
    for j in range(max_terms):
        ratio = _c_quot((aa + j) * (bb + j), (cc + j) * (j + 1.0))
        all_small = True
        for i in range(n):
            term_v[i] = term_v[i] * ratio * x_v[i]
            tot_v[i] = tot_v[i] + term_v[i]
        for i in range(n):
            abs_tot = hypot(tot_v[i].real, tot_v[i].imag)
            if abs_tot < 1e-300:
                abs_tot = 1e-300
            if not (hypot(term_v[i].real, term_v[i].imag) <= rel_tol * abs_tot):
                all_small = False
                break
        if all_small:
            streak += 1
            if streak >= 2:
                return total
        else:
            streak = 0
    raise NoConvergence(
        f"hyp2f1_series_batch: no convergence in {max_terms} terms "
        f"(max |x| = {np.max(np.abs(x_arr)):.6g})"
    )
