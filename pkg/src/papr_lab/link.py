"""End-to-end transmit and receive paths around the PAPR-reduction stage.

The receiver is matched to the transmitter: it knows the composed-filter
kernel and its own lowpass, so it undoes their per-subcarrier gain and the
timing advance it uses to keep the lowpass transient inside the cyclic
prefix. No channel estimation is performed (the channel is AWGN only).
"""
import numpy as np

from .clipping import composed_response
from .filters import frequency_response
from .modem import decide_labels, get_scheme, labels_to_bits, map_bits
from .ofdm import add_cyclic_prefix, downconvert, ofdm_demodulate, synthesize


def transmit(bits, scheme, params):
    """Bits of shape (symbols, N * bits_per_symbol) -> passband rows of length N*L."""
    X = map_bits(bits, scheme)
    return synthesize(X, params).passband


def frame(passband, params):
    return add_cyclic_prefix(passband, params.cp_samples)


class Receiver:
    """Matched OFDM receiver for one method variant."""

    def __init__(self, params, variant, scheme):
        self.params = params
        self.variant = variant
        self.scheme = get_scheme(scheme)
        m = params.fft_size
        self.shift = min(variant.final_lpf.delay, params.cp_samples // 2)
        k_b = params.baseband_bin_offsets()
        f_b = k_b * params.subcarrier_spacing_hz
        h_lpf = frequency_response(variant.final_lpf, np.abs(f_b), compensate_delay=True)
        # composed-filter gain seen by each subcarrier (positive-frequency image)
        c = int(round(params.carrier_bin))
        h_kernel = composed_response(variant, params)[(c + k_b) % m]
        timing = np.exp(2j * np.pi * params.data_bins() * self.shift / m)
        self.compensation = timing / (h_lpf * h_kernel)
        self.noise_gain = 1.0 / np.abs(h_kernel) ** 2

    def equalized(self, rx_frames):
        """Received frames (CP + symbol, real passband) -> compensated data-bin values."""
        p = self.params
        cp, m = p.cp_samples, p.fft_size
        base = downconvert(rx_frames, p.carrier_hz, p.sample_rate_hz, self.variant.final_lpf,
                           p.bandwidth_hz, start=-cp)
        start = cp - self.shift
        Y = ofdm_demodulate(base[..., start : start + m], p)
        return Y * self.compensation

    def agc(self, Y, noise_var):
        """Per-symbol gain: power estimate less known noise, refined once on hard decisions."""
        pts = self.scheme.points
        es = np.mean(np.abs(pts) ** 2)
        nv = np.mean(self.noise_gain) * np.asarray(noise_var, dtype=np.float64)
        power = np.mean(np.abs(Y) ** 2, axis=-1)
        g = np.sqrt(np.maximum(power - nv, 0.01 * power) / es)
        g = np.where(g > 0, g, 1.0)
        ref = pts[decide_labels(Y / g[..., None], self.scheme)]
        num = np.sum((Y * np.conj(ref)).real, axis=-1)
        den = np.sum(np.abs(ref) ** 2, axis=-1)
        g_dd = num / den
        return np.where(g_dd > 0, g_dd, g)

    def detect(self, rx_frames, noise_var=0.0):
        """Hard-decision bits of shape (symbols, N * bits_per_symbol).

        ``noise_var`` is the complex baseband noise variance per sample
        (twice the real passband variance).
        """
        Y = self.equalized(rx_frames)
        g = self.agc(Y, noise_var)
        labels = decide_labels(Y / g[..., None], self.scheme)
        return labels_to_bits(labels, self.scheme.bits_per_symbol)
