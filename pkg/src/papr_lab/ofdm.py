"""OFDM symbol synthesis, cyclic prefix, and passband conversion.

Arrays are processed along the last axis, so a 2-D array is a batch of
symbols (one per row).
"""
from dataclasses import dataclass

import numpy as np

from .core import fft_array, is_power_of_two
from .errors import ConfigError, LengthError
from .filters import apply_filter


@dataclass(frozen=True)
class OfdmParams:
    n_subcarriers: int = 128
    oversample: int = 8
    cp_len: int = 32
    bandwidth_hz: float = 1e6
    carrier_hz: float = 2e6

    def __post_init__(self):
        if self.oversample < 1:
            raise ConfigError("oversample must be >= 1")
        if not is_power_of_two(self.n_subcarriers) or self.n_subcarriers < 2:
            raise ConfigError("n_subcarriers must be a power of two >= 2")
        if not is_power_of_two(self.fft_size):
            raise ConfigError("n_subcarriers * oversample must be a power of two")
        if self.cp_len < 0:
            raise ConfigError("cp_len must be >= 0")
        if not self.bandwidth_hz > 0:
            raise ConfigError("bandwidth_hz must be positive")

    @property
    def fft_size(self):
        return self.n_subcarriers * self.oversample

    @property
    def sample_rate_hz(self):
        return self.bandwidth_hz * self.oversample

    @property
    def subcarrier_spacing_hz(self):
        return self.bandwidth_hz / self.n_subcarriers

    @property
    def cp_samples(self):
        """Guard length at the oversampled rate (``cp_len`` counts Nyquist-rate samples)."""
        return self.cp_len * self.oversample

    @property
    def carrier_bin(self):
        return self.carrier_hz / self.subcarrier_spacing_hz

    def validate_passband(self):
        fs = self.sample_rate_hz
        if not 0 < self.carrier_hz < fs / 2 - self.bandwidth_hz / 2:
            raise ConfigError(
                f"carrier {self.carrier_hz:g} Hz must lie in (0, fs/2 - BW/2) = (0, {fs / 2 - self.bandwidth_hz / 2:g}) Hz"
            )
        if abs(self.carrier_bin - round(self.carrier_bin)) > 1e-9:
            raise ConfigError("carrier must be an integer multiple of the subcarrier spacing")

    def data_bins(self):
        """Positions of the N data bins inside the N*L grid, in natural X order."""
        n, m = self.n_subcarriers, self.fft_size
        k = np.arange(n)
        return np.where(k <= n // 2, k, m - (n - k))

    def baseband_bin_offsets(self):
        """Signed frequency index (in subcarrier spacings) of each data bin."""
        n = self.n_subcarriers
        k = np.arange(n)
        return np.where(k <= n // 2, k, k - n)


@dataclass
class OfdmSymbol:
    freq_data: np.ndarray
    time_oversampled: np.ndarray = None
    passband: np.ndarray = None


def oversample_spectrum(X, oversample):
    """Insert ``N*(L-1)`` zeros in the middle of the spectrum.

    Bins ``0..N/2`` stay in place; bins ``N/2+1..N-1`` move to the tail.
    """
    if oversample < 1:
        raise ConfigError("oversample must be >= 1")
    X = np.asarray(X, dtype=np.complex128)
    n = X.shape[-1]
    m = n * oversample
    if not is_power_of_two(m):
        raise LengthError(f"N*L = {m} is not a power of two")
    out = np.zeros(X.shape[:-1] + (m,), dtype=np.complex128)
    out[..., : n // 2 + 1] = X[..., : n // 2 + 1]
    if n > 1:
        out[..., m - (n - n // 2 - 1) :] = X[..., n // 2 + 1 :]
    return out


def ofdm_modulate(X_padded, params):
    """``x'[m] = (1/sqrt(LN)) * sum_k X[k] exp(2j*pi*m*k/(LN))``."""
    X_padded = np.asarray(X_padded, dtype=np.complex128)
    m = params.fft_size
    if X_padded.shape[-1] != m:
        raise LengthError(f"expected {m} bins, got {X_padded.shape[-1]}")
    # inverse transform carries 1/M; M / sqrt(M) = sqrt(M)
    return fft_array(X_padded, inverse=True) * np.sqrt(m)


def ofdm_demodulate(x, params):
    """Inverse of :func:`ofdm_modulate` followed by extraction of the N data bins."""
    x = np.asarray(x, dtype=np.complex128)
    m = params.fft_size
    if x.shape[-1] != m:
        raise LengthError(f"expected {m} samples, got {x.shape[-1]}")
    Y = fft_array(x) / np.sqrt(m)
    return Y[..., params.data_bins()]


def synthesize(X, params):
    """Data block(s) -> :class:`OfdmSymbol` with baseband and passband stages filled."""
    X = np.asarray(X, dtype=np.complex128)
    if X.shape[-1] != params.n_subcarriers:
        raise LengthError(f"expected {params.n_subcarriers} data symbols, got {X.shape[-1]}")
    x = ofdm_modulate(oversample_spectrum(X, params.oversample), params)
    params.validate_passband()
    xp = upconvert(x, params.carrier_hz, params.sample_rate_hz, params.bandwidth_hz)
    return OfdmSymbol(X, x, xp)


def add_cyclic_prefix(x, cp_len):
    x = np.asarray(x)
    if cp_len < 0 or cp_len > x.shape[-1]:
        raise LengthError(f"cp_len {cp_len} outside [0, {x.shape[-1]}]")
    if cp_len == 0:
        return x.copy()
    return np.concatenate((x[..., -cp_len:], x), axis=-1)


def remove_cyclic_prefix(x, cp_len):
    x = np.asarray(x)
    if cp_len < 0 or cp_len > x.shape[-1]:
        raise LengthError(f"cp_len {cp_len} outside [0, {x.shape[-1]}]")
    return x[..., cp_len:].copy()


def _carrier(n, carrier_hz, sample_rate_hz, start):
    m = np.arange(start, start + n)
    # reduce the phase modulo one cycle before scaling to keep it exact for long buffers
    cycles = np.mod(m * (carrier_hz / sample_rate_hz), 1.0)
    return np.exp(2j * np.pi * cycles)


def upconvert(x, carrier_hz, sample_rate_hz, bandwidth_hz=None, start=0):
    """``sqrt(2) * Re{x[m] exp(2j*pi*fc*m/fs)}``; mean power is preserved."""
    limit = sample_rate_hz / 2 - (bandwidth_hz or 0.0) / 2
    if not 0 < carrier_hz < limit:
        raise ConfigError(f"carrier {carrier_hz:g} Hz folds over (limit {limit:g} Hz)")
    x = np.asarray(x, dtype=np.complex128)
    c = _carrier(x.shape[-1], carrier_hz, sample_rate_hz, start)
    return np.sqrt(2) * (x * c).real


def downconvert(xp, carrier_hz, sample_rate_hz, lpf, bandwidth_hz=None, start=0):
    """Mix down by ``sqrt(2) exp(-2j*pi*fc*m/fs)`` and lowpass away the ``2*fc`` image.

    ``start`` is the carrier-phase index of the first sample (negative when
    the buffer begins with a cyclic prefix).
    """
    spec = lpf.spec
    if spec is not None:
        if spec.kind != "lowpass":
            raise ConfigError("downconversion filter must be a lowpass")
        cutoff = spec.edges_hz[0]
        bw = bandwidth_hz or 0.0
        if cutoff < bw / 2 or cutoff >= 2 * carrier_hz - bw / 2:
            raise ConfigError(f"lowpass cutoff {cutoff:g} Hz must lie in [BW/2, 2fc - BW/2)")
    if lpf.sample_rate_hz != sample_rate_hz:
        raise ConfigError("filter and signal sample rates differ")
    xp = np.asarray(xp, dtype=np.float64)
    c = _carrier(xp.shape[-1], carrier_hz, sample_rate_hz, start)
    mixed = np.sqrt(2) * xp * np.conj(c)
    return apply_filter(mixed, lpf)
