"""Numba kernels for the strided amplitude updates.

Each kernel walks the amplitude pairs (or quartets) selected by the target
wire bits, exactly like the numpy fallbacks in :mod:`qrlnas.qsim`, but
without per-call array-dispatch overhead; on the 16-amplitude states this
package trains on, that overhead dominates everything else.

``amps`` is always (batch, 2**n) complex128 and is updated in place.
"""

from numba import njit


@njit(cache=True)
def apply_1q(amps, m, wire):
    batch, dim = amps.shape
    tk = 1 << wire
    half = dim >> 1
    for b in range(batch):
        for g in range(half):
            i1 = ((g >> wire) << (wire + 1)) | (g & (tk - 1))
            i2 = i1 + tk
            a0 = amps[b, i1]
            a1 = amps[b, i2]
            amps[b, i1] = m[0, 0] * a0 + m[0, 1] * a1
            amps[b, i2] = m[1, 0] * a0 + m[1, 1] * a1


@njit(cache=True)
def apply_1q_per_row(amps, ms, wire):
    batch, dim = amps.shape
    tk = 1 << wire
    half = dim >> 1
    for b in range(batch):
        m00 = ms[b, 0, 0]
        m01 = ms[b, 0, 1]
        m10 = ms[b, 1, 0]
        m11 = ms[b, 1, 1]
        for g in range(half):
            i1 = ((g >> wire) << (wire + 1)) | (g & (tk - 1))
            i2 = i1 + tk
            a0 = amps[b, i1]
            a1 = amps[b, i2]
            amps[b, i1] = m00 * a0 + m01 * a1
            amps[b, i2] = m10 * a0 + m11 * a1


@njit(cache=True)
def apply_2q(amps, m, w0, w1):
    # matrix index = 2*bit(w0) + bit(w1)
    batch, dim = amps.shape
    lo = w0 if w0 < w1 else w1
    hi = w1 if w0 < w1 else w0
    tk0 = 1 << w0
    tk1 = 1 << w1
    tkl = 1 << lo
    tkh = 1 << hi
    quarter = dim >> 2
    for b in range(batch):
        for g in range(quarter):
            i = ((g >> lo) << (lo + 1)) | (g & (tkl - 1))
            i = ((i >> hi) << (hi + 1)) | (i & (tkh - 1))
            i01 = i + tk1
            i10 = i + tk0
            i11 = i + tk0 + tk1
            a00 = amps[b, i]
            a01 = amps[b, i01]
            a10 = amps[b, i10]
            a11 = amps[b, i11]
            amps[b, i] = m[0, 0] * a00 + m[0, 1] * a01 + m[0, 2] * a10 + m[0, 3] * a11
            amps[b, i01] = m[1, 0] * a00 + m[1, 1] * a01 + m[1, 2] * a10 + m[1, 3] * a11
            amps[b, i10] = m[2, 0] * a00 + m[2, 1] * a01 + m[2, 2] * a10 + m[2, 3] * a11
            amps[b, i11] = m[3, 0] * a00 + m[3, 1] * a01 + m[3, 2] * a10 + m[3, 3] * a11


@njit(cache=True)
def overlap_1q(bra, amps, m, wire):
    """sum_b <bra_b| M_wire |amps_b> without materializing M|amps>."""
    batch, dim = bra.shape
    tk = 1 << wire
    half = dim >> 1
    acc = 0.0j
    for b in range(batch):
        for g in range(half):
            i1 = ((g >> wire) << (wire + 1)) | (g & (tk - 1))
            i2 = i1 + tk
            a0 = amps[b, i1]
            a1 = amps[b, i2]
            acc += bra[b, i1].conjugate() * (m[0, 0] * a0 + m[0, 1] * a1)
            acc += bra[b, i2].conjugate() * (m[1, 0] * a0 + m[1, 1] * a1)
    return acc


@njit(cache=True)
def overlap_2q(bra, amps, m, w0, w1):
    batch, dim = bra.shape
    lo = w0 if w0 < w1 else w1
    hi = w1 if w0 < w1 else w0
    tk0 = 1 << w0
    tk1 = 1 << w1
    tkl = 1 << lo
    tkh = 1 << hi
    quarter = dim >> 2
    acc = 0.0j
    for b in range(batch):
        for g in range(quarter):
            i = ((g >> lo) << (lo + 1)) | (g & (tkl - 1))
            i = ((i >> hi) << (hi + 1)) | (i & (tkh - 1))
            i01 = i + tk1
            i10 = i + tk0
            i11 = i + tk0 + tk1
            a00 = amps[b, i]
            a01 = amps[b, i01]
            a10 = amps[b, i10]
            a11 = amps[b, i11]
            acc += bra[b, i].conjugate() * (
                m[0, 0] * a00 + m[0, 1] * a01 + m[0, 2] * a10 + m[0, 3] * a11
            )
            acc += bra[b, i01].conjugate() * (
                m[1, 0] * a00 + m[1, 1] * a01 + m[1, 2] * a10 + m[1, 3] * a11
            )
            acc += bra[b, i10].conjugate() * (
                m[2, 0] * a00 + m[2, 1] * a01 + m[2, 2] * a10 + m[2, 3] * a11
            )
            acc += bra[b, i11].conjugate() * (
                m[3, 0] * a00 + m[3, 1] * a01 + m[3, 2] * a10 + m[3, 3] * a11
            )
    return acc
