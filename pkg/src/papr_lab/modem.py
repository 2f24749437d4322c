"""Bit sources and Gray-coded QPSK / 16-QAM mapping.

Labels are integers whose binary expansion (MSB first) is the bit group.
QPSK: bits (b0, b1) -> ((1 - 2*b0) + 1j*(1 - 2*b1)) / sqrt(2).
16-QAM: (b0, b1) drive the in-phase level and (b2, b3) the quadrature level,
each through the Gray map 00 -> +1, 01 -> +3, 10 -> -1, 11 -> -3, scaled by
1/sqrt(10).
"""
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, LengthError

# Separate random streams derived from one (master_seed, stream_index) pair.
PURPOSE_BITS = 0
PURPOSE_NOISE = 1


def stream_rng(master_seed, stream_index, purpose=PURPOSE_BITS):
    """Independent generator for one stream; identical arguments give identical draws."""
    seq = np.random.SeedSequence([int(master_seed), int(stream_index), int(purpose)])
    return np.random.Generator(np.random.PCG64(seq))


def _gray_axis(b_sign, b_mag):
    return (1 - 2 * b_sign) * (1 + 2 * b_mag)


@dataclass(frozen=True)
class ConstellationScheme:
    name: str
    bits_per_symbol: int
    points: np.ndarray = field(repr=False)

    @property
    def order(self):
        return 1 << self.bits_per_symbol

    def bit_labels(self):
        """Bit table, row ``i`` holding the bits of label ``i``."""
        k = self.bits_per_symbol
        labels = np.arange(self.order)
        return ((labels[:, None] >> np.arange(k - 1, -1, -1)) & 1).astype(np.uint8)


def _qpsk():
    labels = np.arange(4)
    b0, b1 = labels >> 1, labels & 1
    pts = ((1 - 2 * b0) + 1j * (1 - 2 * b1)) / np.sqrt(2)
    return ConstellationScheme("QPSK", 2, pts)


def _qam16():
    labels = np.arange(16)
    b = [(labels >> s) & 1 for s in (3, 2, 1, 0)]
    pts = (_gray_axis(b[0], b[1]) + 1j * _gray_axis(b[2], b[3])) / np.sqrt(10)
    return ConstellationScheme("QAM16", 4, pts)


SCHEMES = {"qpsk": _qpsk(), "qam16": _qam16()}


def get_scheme(name):
    if isinstance(name, ConstellationScheme):
        return name
    key = str(name).lower().replace("-", "")
    if key in ("qam", "16qam"):
        key = "qam16"
    try:
        return SCHEMES[key]
    except KeyError:
        raise ConfigError(f"unsupported modulation scheme {name!r}; choose from {sorted(SCHEMES)}") from None


@dataclass(frozen=True)
class BitStream:
    bits: np.ndarray
    master_seed: int = None
    stream_index: int = None

    def __len__(self):
        return len(self.bits)


def generate_bits(count, master_seed, stream_index):
    if count <= 0:
        raise ValueError("bit count must be positive")
    rng = stream_rng(master_seed, stream_index, PURPOSE_BITS)
    bits = rng.integers(0, 2, size=int(count), dtype=np.uint8)
    return BitStream(bits, int(master_seed), int(stream_index))


def _as_bits(bits):
    if isinstance(bits, BitStream):
        bits = bits.bits
    return np.asarray(bits, dtype=np.uint8)


def bits_to_labels(bits, bits_per_symbol):
    bits = _as_bits(bits)
    if bits.shape[-1] % bits_per_symbol:
        raise LengthError(f"bit count {bits.shape[-1]} is not a multiple of {bits_per_symbol}")
    groups = bits.reshape(bits.shape[:-1] + (-1, bits_per_symbol)).astype(np.int64)
    weights = 1 << np.arange(bits_per_symbol - 1, -1, -1)
    return groups @ weights


def labels_to_bits(labels, bits_per_symbol):
    labels = np.asarray(labels, dtype=np.int64)
    shifts = np.arange(bits_per_symbol - 1, -1, -1)
    bits = (labels[..., None] >> shifts) & 1
    return bits.reshape(labels.shape[:-1] + (-1,)).astype(np.uint8)


def map_bits(bits, scheme):
    """Map a bit array (last axis) to constellation points, ``bits_per_symbol`` bits each."""
    scheme = get_scheme(scheme)
    return scheme.points[bits_to_labels(bits, scheme.bits_per_symbol)]


def decide_labels(symbols, scheme):
    """Minimum-distance labels; exact ties go to the smallest label."""
    scheme = get_scheme(scheme)
    symbols = np.asarray(symbols, dtype=np.complex128)
    if symbols.size == 0:
        raise LengthError("cannot demap an empty symbol sequence")
    d = np.abs(symbols[..., None] - scheme.points) ** 2
    # argmin returns the first minimum, i.e. the lowest label
    return np.argmin(d, axis=-1)


def demap_symbols(symbols, scheme):
    scheme = get_scheme(scheme)
    return labels_to_bits(decide_labels(symbols, scheme), scheme.bits_per_symbol)
