"""numba kernels for the state-vector hot loops.

All kernels assume the shared basis convention: bit (i-1) of the index
encodes spin i, bit value 0 means sigma^z = +1. Pair arrays carry 0-based
bit positions with lo < hi. The loops are blocked on the lower bit so the
innermost run is contiguous.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def build_diagonal(n, h_z, pair_lo, pair_hi, pair_j):
    """Diagonal of -sum h sigma^z - sum J sigma^z sigma^z over all 2^n states."""
    dim = 1 << n
    diag = np.zeros(dim)
    for k in range(dim):
        e = 0.0
        for i in range(n):
            sz = 1.0 - 2.0 * ((k >> i) & 1)
            e -= h_z[i] * sz
        for q in range(pair_lo.shape[0]):
            slo = 1.0 - 2.0 * ((k >> pair_lo[q]) & 1)
            shi = 1.0 - 2.0 * ((k >> pair_hi[q]) & 1)
            e -= pair_j[q] * slo * shi
        diag[k] = e
    return diag


@njit(cache=True, fastmath=False)
def apply_h(out, psi, diag, n, x_h, xx_lo, xx_hi, xx_w, yy_lo, yy_hi, yy_w,
            a, b, c):
    """out = H(s) psi for H = a*H_I + c*H_T + b*H_P, matrix-free.

    H_I = -sum_i x_h[i] sigma^x_i, H_T carries the xx weights (J^x * g),
    H_P the diagonal plus yy weights. Works for real and complex psi.
    """
    dim = psi.shape[0]
    for k in range(dim):
        out[k] = b * diag[k] * psi[k]
    for i in range(n):
        w = a * x_h[i]
        if w == 0.0:
            continue
        mask = 1 << i
        for base in range(0, dim, 2 * mask):
            for lo in range(base, base + mask):
                hi = lo | mask
                out[lo] -= w * psi[hi]
                out[hi] -= w * psi[lo]
    for q in range(xx_lo.shape[0]):
        w = c * xx_w[q]
        if w == 0.0:
            continue
        mlo = 1 << xx_lo[q]
        mhi = 1 << xx_hi[q]
        mask = mlo | mhi
        for base in range(0, dim, 2 * mlo):
            for k in range(base, base + mlo):
                p = k ^ mask
                out[k] -= w * psi[p]
                out[p] -= w * psi[k]
    for q in range(yy_lo.shape[0]):
        w = b * yy_w[q]
        if w == 0.0:
            continue
        mlo = 1 << yy_lo[q]
        mhi = 1 << yy_hi[q]
        mask = mlo | mhi
        for base in range(0, dim, 2 * mlo):
            # bit hi is constant over the inner run; sign rule: equal bits
            # give factor -1, differing bits +1
            m = 1.0 if (base & mhi) else -1.0
            for k in range(base, base + mlo):
                p = k ^ mask
                out[k] -= w * m * psi[p]
                out[p] -= w * m * psi[k]
    return out


@njit(cache=True)
def _rot_single(psi, mask, theta):
    """exp(i theta sigma^x) on the bit of ``mask``: cos + i sin mixing."""
    dim = psi.shape[0]
    co = np.cos(theta)
    si = np.sin(theta)
    for base in range(0, dim, 2 * mask):
        for lo in range(base, base + mask):
            hi = lo | mask
            u = psi[lo]
            v = psi[hi]
            psi[lo] = co * u + 1j * si * v
            psi[hi] = co * v + 1j * si * u


@njit(cache=True)
def _rot_pair_xx(psi, mlo, mhi, theta):
    """exp(i theta sigma^x sigma^x) on the two bits."""
    dim = psi.shape[0]
    mask = mlo | mhi
    co = np.cos(theta)
    si = np.sin(theta)
    for base in range(0, dim, 2 * mlo):
        for k in range(base, base + mlo):
            p = k ^ mask
            u = psi[k]
            v = psi[p]
            psi[k] = co * u + 1j * si * v
            psi[p] = co * v + 1j * si * u


@njit(cache=True)
def _rot_pair_yy(psi, mlo, mhi, theta):
    """exp(i theta sigma^y sigma^y) on the two bits.

    sigma^y sigma^y couples the same pairs as sigma^x sigma^x but with the
    matrix element -1 when the two bits agree and +1 when they differ, so
    the rotation angle flips sign on the equal-bits pairs.
    """
    dim = psi.shape[0]
    mask = mlo | mhi
    co = np.cos(theta)
    si = np.sin(theta)
    for base in range(0, dim, 2 * mlo):
        s = si if (base & mhi) else -si
        for k in range(base, base + mlo):
            p = k ^ mask
            u = psi[k]
            v = psi[p]
            psi[k] = co * u + 1j * s * v
            psi[p] = co * v + 1j * s * u


@njit(cache=True)
def _phase_diag(psi, diag, theta):
    """psi[k] *= exp(-i theta diag[k])."""
    for k in range(psi.shape[0]):
        d = theta * diag[k]
        psi[k] *= np.cos(d) - 1j * np.sin(d)


@njit(cache=True)
def trotter_step_inplace(psi, diag, n, x_h, xx_lo, xx_hi, xx_w,
                         yy_lo, yy_hi, yy_w, a, b, c, tau):
    """One symmetric second-order step, coefficients already frozen.

    Factor order in the first half sweep: diagonal, single-x fields in spin
    order, xx pairs in canonical order, yy pairs in canonical order; the
    second half applies the exact reverse. Each factor is an exact unitary:

        exp(-i (tau/2) * (-a x_h sigma^x))        -> _rot_single(+a x_h tau/2)
        exp(-i (tau/2) * (-c w sigma^x sigma^x))  -> _rot_pair_xx(+c w tau/2)
        exp(-i (tau/2) * (-b w sigma^y sigma^y))  -> _rot_pair_yy(+b w tau/2)
        exp(-i (tau/2) * (b diag))                -> _phase_diag
    """
    half = 0.5 * tau
    _phase_diag(psi, diag, half * b)
    for i in range(n):
        if x_h[i] != 0.0:
            _rot_single(psi, 1 << i, half * a * x_h[i])
    for q in range(xx_lo.shape[0]):
        _rot_pair_xx(psi, 1 << xx_lo[q], 1 << xx_hi[q], half * c * xx_w[q])
    for q in range(yy_lo.shape[0]):
        _rot_pair_yy(psi, 1 << yy_lo[q], 1 << yy_hi[q], half * b * yy_w[q])
    for q in range(yy_lo.shape[0] - 1, -1, -1):
        _rot_pair_yy(psi, 1 << yy_lo[q], 1 << yy_hi[q], half * b * yy_w[q])
    for q in range(xx_lo.shape[0] - 1, -1, -1):
        _rot_pair_xx(psi, 1 << xx_lo[q], 1 << xx_hi[q], half * c * xx_w[q])
    for i in range(n - 1, -1, -1):
        if x_h[i] != 0.0:
            _rot_single(psi, 1 << i, half * a * x_h[i])
    _phase_diag(psi, diag, half * b)
