"""Sample buffers, the radix-2 FFT and basic power statistics."""
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import LengthError

TIME = "time"
FREQUENCY = "frequency"


def is_power_of_two(n):
    return n > 0 and (n & (n - 1)) == 0


def _check_finite(samples):
    if not np.all(np.isfinite(samples)):
        raise ValueError("buffer contains NaN or Inf samples")


@dataclass(frozen=True)
class SignalBuffer:
    """Complex samples tagged with a sample rate and a time/frequency domain."""

    samples: np.ndarray
    sample_rate_hz: float
    domain: str = TIME

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.complex128)
        if samples.size == 0:
            raise LengthError("buffer must be nonempty")
        if not self.sample_rate_hz > 0:
            raise ValueError("sample_rate_hz must be positive")
        if self.domain not in (TIME, FREQUENCY):
            raise ValueError(f"unknown domain {self.domain!r}")
        _check_finite(samples)
        object.__setattr__(self, "samples", samples)

    def __len__(self):
        return self.samples.shape[-1]


@dataclass(frozen=True)
class RealBuffer:
    """Real-valued samples, used for passband signals."""

    samples: np.ndarray
    sample_rate_hz: float

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.size == 0:
            raise LengthError("buffer must be nonempty")
        if not self.sample_rate_hz > 0:
            raise ValueError("sample_rate_hz must be positive")
        _check_finite(samples)
        object.__setattr__(self, "samples", samples)

    def __len__(self):
        return self.samples.shape[-1]


def _samples(buf):
    if isinstance(buf, (SignalBuffer, RealBuffer)):
        return buf.samples
    return np.asarray(buf)


def fft_array(x, inverse=False):
    """DFT along the last axis of a 1-D or 2-D array.

    Forward: ``X[k] = sum_n x[n] exp(-2j*pi*n*k/M)``. Inverse applies ``1/M``.
    """
    x = np.asarray(x)
    m = x.shape[-1] if x.ndim else 0
    if not is_power_of_two(m):
        raise LengthError(f"FFT length must be a power of two, got {m}")
    if x.ndim == 1:
        return kernels.fft_rows(x[None, :], inverse)[0]
    if x.ndim == 2:
        return kernels.fft_rows(x, inverse)
    flat = x.reshape(-1, m)
    return kernels.fft_rows(flat, inverse).reshape(x.shape)


def fft(buf, direction="forward"):
    """Transform a :class:`SignalBuffer`; the returned buffer has its domain tag flipped."""
    if direction not in ("forward", "inverse"):
        raise ValueError("direction must be 'forward' or 'inverse'")
    if not isinstance(buf, SignalBuffer):
        return fft_array(buf, inverse=direction == "inverse")
    out = fft_array(buf.samples, inverse=direction == "inverse")
    domain = FREQUENCY if buf.domain == TIME else TIME
    return SignalBuffer(out, buf.sample_rate_hz, domain)


def mean_power(buf, axis=None):
    """Mean of ``|x|^2``. With ``axis=-1`` a batch of rows gives one value per row."""
    x = _samples(buf)
    if x.size == 0:
        raise LengthError("mean power of an empty buffer is undefined")
    if np.iscomplexobj(x):
        p = x.real**2 + x.imag**2
    else:
        p = x * x
    return np.mean(p, axis=axis)


def rms(buf, axis=None):
    return np.sqrt(mean_power(buf, axis=axis))
