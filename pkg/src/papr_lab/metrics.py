"""PAPR, CCDF, AWGN and bit-error statistics."""
from dataclasses import dataclass
import math

import numpy as np

from .core import mean_power
from .errors import ConfigError, LengthError


def papr_db(x):
    """``10*log10(max|x|^2 / mean|x|^2)`` along the last axis."""
    x = np.asarray(x)
    if x.size == 0:
        raise LengthError("PAPR of an empty buffer is undefined")
    p = x.real**2 + x.imag**2 if np.iscomplexobj(x) else x * x
    avg = np.mean(p, axis=-1)
    if np.any(avg == 0):
        raise ValueError("PAPR of an all-zero signal is undefined")
    return 10 * np.log10(np.max(p, axis=-1) / avg)


@dataclass
class CcdfCurve:
    thresholds_db: np.ndarray
    probabilities: np.ndarray
    sample_count: int

    def papr_at_ccdf(self, p):
        """Threshold where the curve crosses probability ``p`` (linear in dB between grid points)."""
        t, c = self.thresholds_db, self.probabilities
        above = np.nonzero(c > p)[0]
        if len(above) == 0:
            return float(t[0])
        i = above[-1]
        if i == len(t) - 1:
            return float(t[-1])
        c0, c1 = c[i], c[i + 1]
        return float(t[i] + (c0 - p) / (c0 - c1) * (t[i + 1] - t[i]))


def ccdf(papr_samples_db, thresholds_db):
    samples = np.sort(np.asarray(papr_samples_db, dtype=np.float64).ravel())
    if samples.size == 0:
        raise LengthError("CCDF needs at least one sample")
    thresholds = np.asarray(thresholds_db, dtype=np.float64)
    if np.any(np.diff(thresholds) <= 0):
        raise ValueError("thresholds must be strictly ascending")
    exceed = samples.size - np.searchsorted(samples, thresholds, side="right")
    return CcdfCurve(thresholds, exceed / samples.size, int(samples.size))


def noise_variance(signal_power, ebn0_db, bits_per_symbol, code_rate=1.0, oversample=1.0, real=False):
    """Per-sample noise variance giving the requested Eb/N0.

    The data occupy a fraction ``1/oversample`` of the simulated band, so
    ``Es/N0 = oversample * P / N0`` with ``N0`` the complex noise variance. A
    real passband signal of the same power needs half that variance.
    """
    esn0 = 10 ** (np.asarray(ebn0_db, dtype=np.float64) / 10) * bits_per_symbol * code_rate
    n0 = signal_power * oversample / esn0
    return n0 / 2 if real else n0


CALIBRATION = "N0 = P * L / (Eb/N0 * bits_per_symbol * code_rate); real signals get N0/2, complex N0/2 per dimension"


def awgn(x, ebn0_db, bits_per_symbol, code_rate=1.0, samples_per_bit_factor=1.0, rng=None, unit_noise=None,
         power=None):
    """Add white Gaussian noise calibrated against the measured power of ``x``.

    Power is measured along the last axis unless ``power`` supplies it (e.g.
    measured on the symbol without its cyclic prefix). ``unit_noise`` (standard normal,
    complex with unit total variance for complex ``x``) lets callers reuse one
    draw across operating points; otherwise ``rng`` supplies it.
    """
    x = np.asarray(x)
    if power is None:
        power = mean_power(x, axis=-1)
    if np.any(power <= 0):
        raise ValueError("AWGN calibration needs a signal with positive power")
    if np.isinf(ebn0_db):
        return x.copy()
    real = not np.iscomplexobj(x)
    var = noise_variance(power, ebn0_db, bits_per_symbol, code_rate, samples_per_bit_factor, real=real)
    if unit_noise is None:
        rng = np.random.default_rng() if rng is None else rng
        if real:
            unit_noise = rng.standard_normal(x.shape)
        else:
            unit_noise = (rng.standard_normal(x.shape) + 1j * rng.standard_normal(x.shape)) / np.sqrt(2)
    return x + np.sqrt(var)[..., None] * unit_noise if x.ndim > 1 else x + np.sqrt(var) * unit_noise


@dataclass
class BerPoint:
    snr_db: float
    bit_errors: int
    bits_total: int

    @property
    def ber(self):
        return self.bit_errors / self.bits_total if self.bits_total else float("nan")

    def confident(self, min_errors=100):
        return self.bit_errors >= min_errors


def ber_count(tx, rx, snr_db=float("nan")):
    tx = np.asarray(getattr(tx, "bits", tx))
    rx = np.asarray(getattr(rx, "bits", rx))
    if tx.shape != rx.shape:
        raise LengthError(f"bit streams differ in shape: {tx.shape} vs {rx.shape}")
    return BerPoint(snr_db, int(np.count_nonzero(tx != rx)), int(tx.size))


def q_function(x):
    return 0.5 * math.erfc(x / math.sqrt(2))


def analytical_ber(scheme, ebn0_db):
    """Gray-mapped AWGN bit error rate: exact for QPSK, nearest-neighbour for 16-QAM."""
    name = getattr(scheme, "name", scheme)
    name = str(name).upper()
    if ebn0_db == float("inf"):
        return 0.0
    g = 10 ** (ebn0_db / 10)
    if name == "QPSK":
        return q_function(math.sqrt(2 * g))
    if name in ("QAM16", "16QAM"):
        return 0.75 * q_function(math.sqrt(4 * g / 5))
    raise ConfigError(f"no analytical BER for scheme {name!r}")
