"""FIR (Hamming windowed-sinc) and Chebyshev Type I IIR filter design.

Biquad sections are stored as rows ``(b0, b1, b2, a1, a2)`` with ``a0 = 1``.
"""
from dataclasses import dataclass, field
import hashlib

import numpy as np

from . import kernels
from .errors import ConfigError, NumericalError

FAMILIES = ("fir_window", "iir_cheby1")
KINDS = ("lowpass", "highpass", "bandpass")


@dataclass(frozen=True)
class FilterSpec:
    family: str
    kind: str
    edges_hz: tuple
    order: int
    sample_rate_hz: float
    passband_ripple_db: float = None
    window: str = "hamming"

    def __post_init__(self):
        edges = tuple(float(e) for e in np.atleast_1d(self.edges_hz))
        object.__setattr__(self, "edges_hz", edges)
        if self.family not in FAMILIES:
            raise ConfigError(f"unknown filter family {self.family!r}")
        if self.kind not in KINDS:
            raise ConfigError(f"unknown filter kind {self.kind!r}")
        if not self.sample_rate_hz > 0:
            raise ConfigError("sample_rate_hz must be positive")
        if int(self.order) != self.order or self.order < 1:
            raise ConfigError("filter order must be a positive integer")
        want = 2 if self.kind == "bandpass" else 1
        if len(edges) != want:
            raise ConfigError(f"{self.kind} needs {want} edge frequencies, got {len(edges)}")
        nyq = self.sample_rate_hz / 2
        if any(not 0 < e < nyq for e in edges):
            raise ConfigError(f"edges {edges} must lie strictly inside (0, {nyq:g}) Hz")
        if want == 2 and not edges[0] < edges[1]:
            raise ConfigError("bandpass edges must be increasing")
        if self.family == "iir_cheby1":
            if self.passband_ripple_db is None or not self.passband_ripple_db > 0:
                raise ConfigError("Chebyshev design needs passband_ripple_db > 0")
        elif self.window != "hamming":
            raise ConfigError(f"unsupported window {self.window!r}")


@dataclass(frozen=True)
class DesignedFilter:
    sample_rate_hz: float
    taps: np.ndarray = None
    sos: np.ndarray = None
    spec: FilterSpec = None
    poles: np.ndarray = field(default=None, repr=False)

    @classmethod
    def from_taps(cls, taps, sample_rate_hz):
        return cls(float(sample_rate_hz), taps=np.asarray(taps, dtype=np.float64))

    @property
    def is_fir(self):
        return self.taps is not None

    @property
    def delay(self):
        """Integer group delay removed by :func:`apply_filter` (FIR only)."""
        return (len(self.taps) - 1) // 2 if self.is_fir else 0

    def coefficients(self):
        return self.taps if self.is_fir else self.sos

    def digest(self):
        return hashlib.sha256(np.ascontiguousarray(self.coefficients()).tobytes()).hexdigest()


# ------------------------------------------------------------------------- FIR


def _windowed_sinc_lowpass(cutoff_hz, n_taps, fs):
    fn = cutoff_hz / fs
    n = np.arange(n_taps) - (n_taps - 1) / 2
    h = 2 * fn * np.sinc(2 * fn * n) * np.hamming(n_taps)
    h = 0.5 * (h + h[::-1])
    return h / h.sum()


def design_fir(spec):
    if spec.family != "fir_window":
        raise ConfigError("design_fir needs a fir_window spec")
    n_taps = spec.order + 1
    fs = spec.sample_rate_hz
    if spec.kind == "lowpass":
        taps = _windowed_sinc_lowpass(spec.edges_hz[0], n_taps, fs)
    elif spec.kind == "highpass":
        if n_taps % 2 == 0:
            raise ConfigError("highpass FIR needs an odd tap count (even order)")
        taps = -_windowed_sinc_lowpass(spec.edges_hz[0], n_taps, fs)
        taps[n_taps // 2] += 1.0
    else:
        lo, hi = spec.edges_hz
        taps = _windowed_sinc_lowpass(hi, n_taps, fs) - _windowed_sinc_lowpass(lo, n_taps, fs)
    return DesignedFilter(fs, taps=taps, spec=spec)


# ------------------------------------------------------------------ Chebyshev I


def cheby1_prototype(order, ripple_db):
    """Poles and gain of the normalised analog lowpass (edge at 1 rad/s)."""
    eps = np.sqrt(10 ** (ripple_db / 10) - 1)
    phi = np.arcsinh(1 / eps) / order
    theta = np.pi * (2 * np.arange(1, order + 1) - 1) / (2 * order)
    poles = -np.sinh(phi) * np.sin(theta) + 1j * np.cosh(phi) * np.cos(theta)
    gain = np.prod(-poles).real
    if order % 2 == 0:
        gain /= np.sqrt(1 + eps**2)
    return poles, gain


def _prewarp(f_hz, fs):
    return 2 * fs * np.tan(np.pi * f_hz / fs)


def _pair_poles(poles):
    """Split into one representative per conjugate pair, plus leftover real poles."""
    tol = 1e-10
    upper = sorted((p for p in poles if p.imag > tol), key=lambda p: -abs(p))
    real = sorted((p.real for p in poles if abs(p.imag) <= tol), key=abs, reverse=True)
    n_lower = sum(1 for p in poles if p.imag < -tol)
    if n_lower != len(upper):
        raise NumericalError("pole set is not closed under conjugation")
    return upper, real


def design_cheby1(spec):
    if spec.family != "iir_cheby1":
        raise ConfigError("design_cheby1 needs an iir_cheby1 spec")
    if spec.kind not in ("lowpass", "bandpass"):
        raise ConfigError("Chebyshev design supports lowpass and bandpass only")
    fs = spec.sample_rate_hz
    n = spec.order
    proto, _ = cheby1_prototype(n, spec.passband_ripple_db)

    if spec.kind == "lowpass":
        wc = _prewarp(spec.edges_hz[0], fs)
        s_poles = proto * wc
        n_zeros_dc = 0
        ref_hz = 0.0
    else:
        w1, w2 = (_prewarp(e, fs) for e in spec.edges_hz)
        w0sq = w1 * w2
        bw = w2 - w1
        pb = proto * bw / 2
        disc = np.sqrt(pb**2 - w0sq + 0j)
        s_poles = np.concatenate((pb + disc, pb - disc))
        n_zeros_dc = n
        ref_hz = fs / np.pi * np.arctan(np.sqrt(w0sq) / (2 * fs))

    # bilinear map; analog zeros at infinity land on z = -1, zeros at s = 0 on z = +1
    z_poles = (2 * fs + s_poles) / (2 * fs - s_poles)
    radius = np.abs(z_poles)
    if not np.all(radius < 1 - 1e-9):
        raise NumericalError(
            f"unstable Chebyshev realisation for {spec}: max |pole| = {radius.max():.12f}"
        )

    upper, real = _pair_poles(z_poles)
    n_zeros_nyq = len(z_poles) - n_zeros_dc
    # alternate so every bandpass section gets one zero at DC and one at Nyquist
    zeros = []
    for i in range(max(n_zeros_dc, n_zeros_nyq)):
        if i < n_zeros_dc:
            zeros.append(1.0)
        if i < n_zeros_nyq:
            zeros.append(-1.0)
    sections = []
    for p in upper:
        z_a, z_b = zeros.pop(), zeros.pop()
        sections.append([1.0, -(z_a + z_b), z_a * z_b, -2 * p.real, abs(p) ** 2])
    while real:
        p_a = real.pop(0)
        if real:
            p_b = real.pop(0)
            z_a, z_b = zeros.pop(), zeros.pop()
            sections.append([1.0, -(z_a + z_b), z_a * z_b, -(p_a + p_b), p_a * p_b])
        else:
            z_a = zeros.pop()
            sections.append([1.0, -z_a, 0.0, -p_a, 0.0])
    sos = np.array(sections, dtype=np.float64)

    eps2 = 10 ** (spec.passband_ripple_db / 10) - 1
    target = 1.0 if n % 2 else 1 / np.sqrt(1 + eps2)
    raw = abs(_sos_response(sos, np.array([ref_hz]), fs)[0])
    if not np.isfinite(raw) or raw == 0:
        raise NumericalError(f"degenerate Chebyshev response at reference frequency {ref_hz:g} Hz")
    g = (target / raw) ** (1 / len(sos))
    sos[:, :3] *= g
    return DesignedFilter(fs, sos=sos, spec=spec, poles=z_poles)


def design(spec):
    if spec.family == "fir_window":
        return design_fir(spec)
    return design_cheby1(spec)


# ------------------------------------------------------------- evaluation / use


def _sos_response(sos, freqs_hz, fs):
    zi = np.exp(-2j * np.pi * np.asarray(freqs_hz, dtype=np.float64) / fs)
    h = np.ones(zi.shape, dtype=np.complex128)
    for b0, b1, b2, a1, a2 in sos:
        h *= (b0 + b1 * zi + b2 * zi**2) / (1 + a1 * zi + a2 * zi**2)
    return h


def frequency_response(f, freqs_hz, compensate_delay=False):
    """``H(exp(j*2*pi*f/fs))`` at each frequency.

    ``compensate_delay`` removes the same integer delay :func:`apply_filter`
    removes, giving the response of the aligned FIR path.
    """
    freqs = np.asarray(freqs_hz, dtype=np.float64)
    fs = f.sample_rate_hz
    if f.is_fir:
        w = 2 * np.pi * freqs / fs
        k = np.arange(len(f.taps))
        h = np.exp(-1j * np.multiply.outer(w, k)) @ f.taps
        if compensate_delay:
            h = h * np.exp(1j * w * f.delay)
        return h
    return _sos_response(f.sos, freqs, fs)


def apply_filter(x, f, sample_rate_hz=None):
    """Filter along the last axis.

    FIR: same-length convolution with zero-padded edges, advanced by
    ``f.delay`` samples. IIR: biquad cascade from zero state.
    """
    if sample_rate_hz is not None and sample_rate_hz != f.sample_rate_hz:
        raise ConfigError(f"sample rate {sample_rate_hz:g} Hz does not match filter rate {f.sample_rate_hz:g} Hz")
    x = np.asarray(x)
    shape = x.shape
    rows = x.reshape(-1, shape[-1]) if x.ndim != 1 else x[None, :]

    def run(real_rows):
        if f.is_fir:
            return kernels.fir_rows(real_rows, f.taps, f.delay)
        return kernels.sos_rows(real_rows, f.sos)

    if np.iscomplexobj(rows):
        out = run(rows.real) + 1j * run(rows.imag)
    else:
        out = run(rows)
    return out.reshape(shape)
