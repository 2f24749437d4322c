"""Inner loops that dominate simulation time.

Every kernel exists twice: a numba version (``*_jit``) and a vectorised numpy
version (``*_np``). The public name is bound to one of them at import time
according to :mod:`papr_lab._jit`. All kernels operate row-wise on 2-D arrays
(one signal per row) and never mutate their inputs.
"""
from functools import lru_cache

import numpy as np

from ._jit import USE_NUMBA, njit


@lru_cache(maxsize=32)
def fft_tables(m):
    """Bit-reversal permutation and forward twiddles ``exp(-2j*pi*k/m)``, ``k < m/2``."""
    bits = m.bit_length() - 1
    idx = np.arange(m)
    rev = np.zeros(m, dtype=np.int64)
    for b in range(bits):
        rev |= ((idx >> b) & 1) << (bits - 1 - b)
    twiddle = np.exp(-2j * np.pi * np.arange(m // 2) / m)
    rev.setflags(write=False)
    twiddle.setflags(write=False)
    return rev, twiddle


# --------------------------------------------------------------------------- FFT


@njit
def _fft_rows_jit(x, rev, twiddle, inverse):
    n_rows, m = x.shape
    out = np.empty((n_rows, m), dtype=np.complex128)
    for r in range(n_rows):
        for i in range(m):
            out[r, i] = x[r, rev[i]]
        size = 2
        while size <= m:
            half = size // 2
            stride = m // size
            for start in range(0, m, size):
                for j in range(half):
                    w = twiddle[j * stride]
                    if inverse:
                        w = w.conjugate()
                    a = out[r, start + j]
                    t = w * out[r, start + j + half]
                    out[r, start + j] = a + t
                    out[r, start + j + half] = a - t
            size *= 2
        if inverse:
            for i in range(m):
                out[r, i] = out[r, i] / m
    return out


def _fft_rows_np(x, rev, twiddle, inverse):
    n_rows, m = x.shape
    y = x[:, rev]
    tw = np.conj(twiddle) if inverse else twiddle
    size = 2
    while size <= m:
        half = size // 2
        y = y.reshape(n_rows, m // size, size)
        w = tw[:: m // size][:half]
        a = y[..., :half]
        t = y[..., half:] * w
        y = np.concatenate((a + t, a - t), axis=-1)
        size *= 2
    y = y.reshape(n_rows, m)
    if inverse:
        y = y / m
    return y


def fft_rows(x, inverse=False):
    """Radix-2 DFT of every row of a 2-D complex array.

    Forward is unnormalised; inverse carries the 1/M factor.
    """
    x = np.ascontiguousarray(x, dtype=np.complex128)
    rev, twiddle = fft_tables(x.shape[1])
    if USE_NUMBA:
        return _fft_rows_jit(x, rev, twiddle, bool(inverse))
    return _fft_rows_np(x, rev, twiddle, bool(inverse))


# --------------------------------------------------------------------------- FIR


@njit
def _fir_rows_jit(x, taps, shift):
    n_rows, m = x.shape
    n_taps = taps.shape[0]
    out = np.zeros((n_rows, m), dtype=np.float64)
    for r in range(n_rows):
        for n in range(m):
            acc = 0.0
            # y[n] = sum_i taps[i] * x[n + shift - i], zero outside the buffer
            lo = n + shift - (m - 1)
            if lo < 0:
                lo = 0
            hi = n + shift
            if hi > n_taps - 1:
                hi = n_taps - 1
            for i in range(lo, hi + 1):
                acc += taps[i] * x[r, n + shift - i]
            out[r, n] = acc
    return out


def _fir_rows_np(x, taps, shift):
    n_rows, m = x.shape
    n_taps = taps.shape[0]
    full = np.zeros((n_rows, m + n_taps - 1))
    for i in range(n_taps):
        full[:, i : i + m] += taps[i] * x
    return full[:, shift : shift + m]


def fir_rows(x, taps, shift):
    """Same-length FIR filtering of real rows, output advanced by ``shift`` samples."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    taps = np.ascontiguousarray(taps, dtype=np.float64)
    if USE_NUMBA:
        return _fir_rows_jit(x, taps, int(shift))
    return _fir_rows_np(x, taps, int(shift))


# ------------------------------------------------------------------ biquad cascade


@njit
def _sos_rows_jit(x, sos):
    n_rows, m = x.shape
    n_sec = sos.shape[0]
    out = x.copy()
    for r in range(n_rows):
        for s in range(n_sec):
            b0 = sos[s, 0]
            b1 = sos[s, 1]
            b2 = sos[s, 2]
            a1 = sos[s, 3]
            a2 = sos[s, 4]
            z1 = 0.0
            z2 = 0.0
            for n in range(m):
                xn = out[r, n]
                yn = b0 * xn + z1
                z1 = b1 * xn - a1 * yn + z2
                z2 = b2 * xn - a2 * yn
                out[r, n] = yn
    return out


def _sos_rows_np(x, sos):
    out = x.copy()
    n_rows, m = x.shape
    for b0, b1, b2, a1, a2 in sos:
        z1 = np.zeros(n_rows)
        z2 = np.zeros(n_rows)
        for n in range(m):
            xn = out[:, n].copy()
            yn = b0 * xn + z1
            z1 = b1 * xn - a1 * yn + z2
            z2 = b2 * xn - a2 * yn
            out[:, n] = yn
    return out


def sos_rows(x, sos):
    """Cascade of direct-form-II-transposed biquads, zero initial state, on real rows."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    sos = np.ascontiguousarray(sos, dtype=np.float64)
    if USE_NUMBA:
        return _sos_rows_jit(x, sos)
    return _sos_rows_np(x, sos)


IMPLEMENTATIONS = {
    "fft_rows": (_fft_rows_jit, _fft_rows_np),
    "fir_rows": (_fir_rows_jit, _fir_rows_np),
    "sos_rows": (_sos_rows_jit, _sos_rows_np),
}
