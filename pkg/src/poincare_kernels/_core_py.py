"""Numpy/pure-Python implementation of the hot loops.

This is the fallback backend behind :mod:`poincare_kernels.core`; the Cython
extension implements the same functions with the same floating-point
expression order, so the two agree to the last bit on the branch decisions
that matter (the sigma <= R membership filter).
"""

from __future__ import annotations

import math

import numpy as np

from .errors import BudgetExceeded, NoConvergence

__all__ = ["ball_sweep", "pair_arrays", "hyp2f1_series_batch"]


def _bezout(c: int, d: int) -> tuple[int, int]:
    """Return (a0, b0) with a0*d - b0*c = 1, assuming gcd(c, d) = 1."""
    old_r, r = d, c
    old_x, x = 1, 0
    old_y, y = 0, 1
    while r != 0:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_x, x = x, old_x - q * x
        old_y, y = y, old_y - q * y
    # old_x*d + old_y*c = old_r = +-1
    if old_r < 0:
        old_x, old_y = -old_x, -old_y
    return old_x, -old_y


def _sigma_entry(a, b, c, d, z_re, z_im, w_re, w_im):
    # mirrors pair_metrics(z, moebius_act(g, w)) operation for operation
    dr = c * w_re + d
    di = c * w_im
    norm2 = dr * dr + di * di
    nr = a * w_re + b
    ni = a * w_im
    gw_re = (nr * dr + ni * di) / norm2
    gw_im = w_im / norm2
    dx = z_re - gw_re
    dy = z_im - gw_im
    return 1.0 + (dx * dx + dy * dy) / (4.0 * z_im * gw_im)


def ball_sweep(z_re, z_im, w_re, w_im, R, budget):
    """All integer matrices g with det 1 and sigma(z, g w) <= R, canonical order.

    The sweep runs over bottom rows (c, d) inside the proven bound
    |c w + d|^2 <= Im(w) * t / Im(z), t = 2R - 1 + 2 sqrt(R^2 - R), lifts each
    coprime row to one solution of the determinant equation and walks the
    translate family a -> a + n c, b -> b + n d over the n-interval allowed by
    the displacement bound.  Every candidate is confirmed by direct sigma
    evaluation, so the output is exactly the ball.  Ordering: (c, d, n)
    lexicographic.  Raises BudgetExceeded past ``budget`` candidates.
    """
    R = float(R)
    t = (2.0 * R - 1.0) + 2.0 * math.sqrt(max(R * R - R, 0.0))
    b2 = w_im * t / z_im * (1.0 + 1e-12)
    bmax = math.sqrt(b2)
    cmax = int(math.floor(bmax / w_im + 1e-9))
    rows = []
    candidates = 0
    for c in range(-cmax, cmax + 1):
        disc = b2 - (c * w_im) * (c * w_im)
        if disc < 0.0:
            continue
        rad = math.sqrt(disc)
        d_lo = int(math.ceil(-c * w_re - rad - 1e-9))
        d_hi = int(math.floor(-c * w_re + rad + 1e-9))
        for d in range(d_lo, d_hi + 1):
            if math.gcd(abs(c), abs(d)) != 1:
                continue
            a0, b0 = _bezout(c, d)
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
            rad_n = math.sqrt(disc_n)
            n_lo = int(math.ceil(z_re - gw_re - rad_n - 1e-9))
            n_hi = int(math.floor(z_re - gw_re + rad_n + 1e-9))
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


def pair_arrays(mats, z_re, z_im, w_re, w_im):
    """Batched displacement/phase data for a stack of integer matrices.

    Returns (sigma, gw_re, gw_im, jw_arg, h_arg) where jw_arg is the
    principal argument of c*w + d and h_arg the argument of the two-point
    phase numerator 2i Im(g w)/(z - conj(g w)), reduced to
    atan2(Re z - Re(g w), Im z + Im(g w)).
    """
    m = np.asarray(mats, dtype=np.float64)
    a, b, c, d = m[:, 0], m[:, 1], m[:, 2], m[:, 3]
    dr = c * w_re + d
    di = c * w_im
    norm2 = dr * dr + di * di
    nr = a * w_re + b
    ni = a * w_im
    gw_re = (nr * dr + ni * di) / norm2
    gw_im = w_im / norm2
    dx = z_re - gw_re
    dy = z_im - gw_im
    sigma = 1.0 + (dx * dx + dy * dy) / (4.0 * z_im * gw_im)
    jw_arg = np.arctan2(di, dr)
    h_arg = np.arctan2(dx, z_im + gw_im)
    return sigma, gw_re, gw_im, jw_arg, h_arg


def hyp2f1_series_batch(a, b, c, x, rel_tol=1e-15, max_terms=4096):
    """Gauss series F(a, b; c; x_i) over an array of real arguments |x| < 1.

    Parameters are shared complex scalars.  Stops once every entry has had
    two consecutive terms below rel_tol relative to its running sum; raises
    NoConvergence when the budget runs out.
    """
    x = np.asarray(x, dtype=np.float64)
    n = x.shape[0]
    if n == 0:
        return np.zeros(0, dtype=np.complex128)
    a = complex(a)
    b = complex(b)
    c = complex(c)
    total = np.ones(n, dtype=np.complex128)
    term = np.ones(n, dtype=np.complex128)
    streak = 0
    for j in range(max_terms):
        term = term * ((a + j) * (b + j) / ((c + j) * (j + 1.0))) * x
        total += term
        if np.all(np.abs(term) <= rel_tol * np.maximum(np.abs(total), 1e-300)):
            streak += 1
            if streak >= 2:
                return total
        else:
            streak = 0
    raise NoConvergence(
        f"hyp2f1_series_batch: no convergence in {max_terms} terms "
        f"(max |x| = {np.max(np.abs(x)):.6g})"
    )
