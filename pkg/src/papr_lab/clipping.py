"""Clipping and the FFT-domain composed filter (previous vs proposed kernel)."""
from dataclasses import dataclass

import numpy as np

from .core import fft_array, is_power_of_two, rms
from .errors import ConfigError, LengthError
from .filters import FilterSpec, design, frequency_response
from .metrics import papr_db

VARIANTS = ("none", "previous", "proposed")
DEFAULT_CR_LIST = (0.8, 1.0, 1.2, 1.4, 1.6)


@dataclass(frozen=True)
class ClipConfig:
    cr: float
    domain: str = "passband_hard"
    sigma_estimate: str = "per_symbol"

    def __post_init__(self):
        if not self.cr > 0:
            raise ConfigError("clipping ratio must be positive")
        if self.domain not in ("passband_hard", "baseband_polar"):
            raise ConfigError(f"unknown clipping domain {self.domain!r}")
        if self.sigma_estimate not in ("per_symbol", "global"):
            raise ConfigError(f"unknown sigma estimate {self.sigma_estimate!r}")


@dataclass(frozen=True)
class FilterSettings:
    """Kernel and receiver-filter parameters; ``None`` edges derive from the OFDM geometry."""

    previous_order: int = 64
    previous_cutoff_hz: float = None
    proposed_order: int = 1
    proposed_ripple_db: float = 3.0
    proposed_low_hz: float = None
    proposed_high_hz: float = None
    lpf_order: int = 64
    lpf_cutoff_hz: float = None


@dataclass(frozen=True)
class MethodVariant:
    name: str
    composed_kernel: object = None
    final_lpf: object = None

    def __post_init__(self):
        if self.name not in VARIANTS:
            raise ConfigError(f"unknown method variant {self.name!r}")
        if self.name != "none" and self.composed_kernel is None:
            raise ConfigError(f"variant {self.name!r} needs a composed-filter kernel")
        if self.name == "previous" and not self.composed_kernel.is_fir:
            raise ConfigError("previous method uses an FIR kernel")
        if self.name == "proposed" and self.composed_kernel.is_fir:
            raise ConfigError("proposed method uses a Chebyshev IIR kernel")


def lowpass_spec(params, settings=FilterSettings()):
    # window-method edges sit at -6 dB, so the cutoff is placed a full BW out to keep the band flat
    cutoff = settings.lpf_cutoff_hz or params.bandwidth_hz
    return FilterSpec("fir_window", "lowpass", (cutoff,), settings.lpf_order, params.sample_rate_hz)


def kernel_spec(name, params, settings=FilterSettings()):
    fc, bw, fs = params.carrier_hz, params.bandwidth_hz, params.sample_rate_hz
    if name == "previous":
        cutoff = settings.previous_cutoff_hz or fc - bw / 2
        return FilterSpec("fir_window", "highpass", (cutoff,), settings.previous_order, fs)
    if name == "proposed":
        lo = settings.proposed_low_hz or fc - bw / 2
        hi = settings.proposed_high_hz or fc + bw / 2
        return FilterSpec(
            "iir_cheby1", "bandpass", (lo, hi), settings.proposed_order, fs,
            passband_ripple_db=settings.proposed_ripple_db,
        )
    raise ConfigError(f"variant {name!r} has no kernel")


def build_variant(name, params, settings=FilterSettings()):
    lpf = design(lowpass_spec(params, settings))
    kernel = None if name == "none" else design(kernel_spec(name, params, settings))
    return MethodVariant(name, kernel, lpf)


def clipping_level(cr, sigma):
    """Clip amplitude ``A = CR * sigma``."""
    if not cr > 0:
        raise ConfigError("clipping ratio must be positive")
    if np.any(np.asarray(sigma) <= 0):
        raise ConfigError("sigma must be positive")
    return cr * sigma


def clip_baseband(x, A):
    """Limit ``|x|`` to ``A`` keeping the phase."""
    x = np.asarray(x, dtype=np.complex128)
    mag = np.abs(x)
    over = mag > A
    scale = np.where(over, A / np.where(over, mag, 1.0), 1.0)
    return x * scale


def clip_passband(xp, A):
    """Hard-limit a real signal to ``[-A, A]``."""
    xp = np.asarray(xp, dtype=np.float64)
    return np.minimum(np.maximum(xp, -A), A)


def occupied_bins(params):
    """Boolean mask of the passband FFT bins carrying data (both spectral images)."""
    params.validate_passband()
    m = params.fft_size
    c = int(round(params.carrier_bin))
    pos = (c + params.baseband_bin_offsets()) % m
    mask = np.zeros(m, dtype=bool)
    mask[pos] = True
    mask[(-pos) % m] = True
    return mask


def bin_frequencies(m, fs):
    k = np.arange(m)
    return np.where(k < m // 2, k, k - m) * (fs / m)


def composed_response(variant, params):
    """Per-bin complex gain of the composed filter, Hermitian so real input stays real."""
    m = params.fft_size
    mask = occupied_bins(params)
    if variant.name == "none":
        return mask.astype(np.complex128)
    f = bin_frequencies(m, params.sample_rate_hz)
    h = frequency_response(variant.composed_kernel, np.abs(f), compensate_delay=True)
    h = np.where(f < 0, np.conj(h), h)
    return np.where(mask, h, 0.0)


def composed_filter(xc, variant, params, response=None):
    """FFT, weight in-band bins by the kernel response, zero the rest, inverse FFT.

    The ``none`` variant is the identity.
    """
    xc = np.asarray(xc, dtype=np.float64)
    if variant.name == "none":
        return xc.copy()
    if xc.shape[-1] != params.fft_size or not is_power_of_two(xc.shape[-1]):
        raise LengthError(f"composed filter expects {params.fft_size} samples per symbol")
    if response is None:
        response = composed_response(variant, params)
    Y = fft_array(xc) * response
    return fft_array(Y, inverse=True).real


def symbol_sigma(xp, clip, params, symbol_energy=1.0):
    """RMS used to set the clip level: measured per symbol, or the analytic ensemble value."""
    if clip.sigma_estimate == "per_symbol":
        return rms(xp, axis=-1)[..., None] if np.ndim(xp) > 1 else rms(xp)
    # unit-energy data on N of N*L bins: mean power = Es / L at baseband and passband alike
    return np.sqrt(symbol_energy / params.oversample)


@dataclass
class ReductionTelemetry:
    papr_pre_db: np.ndarray
    papr_clip_db: np.ndarray
    papr_filt_db: np.ndarray
    clip_level: np.ndarray


def reduce_papr(passband, clip, variant, params, response=None, symbol_energy=1.0):
    """Clip one or more passband symbols and run the composed filter.

    Returns the filtered signal and PAPR telemetry at the three taps.
    """
    passband = np.asarray(passband, dtype=np.float64)
    sigma = symbol_sigma(passband, clip, params, symbol_energy)
    A = clipping_level(clip.cr, sigma)
    if clip.domain != "passband_hard":
        raise ConfigError("the composed-filter pipeline clips the passband signal")
    clipped = clip_passband(passband, A)
    out = composed_filter(clipped, variant, params, response)
    tel = ReductionTelemetry(
        papr_db(passband), papr_db(clipped), papr_db(out), np.broadcast_to(A, passband.shape[:-1] + (1,))[..., 0]
    )
    return out, tel
