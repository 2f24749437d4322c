import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from papr_lab.errors import ConfigError, LengthError
from papr_lab.modem import (
    SCHEMES,
    demap_symbols,
    generate_bits,
    get_scheme,
    labels_to_bits,
    map_bits,
)

QPSK = SCHEMES["qpsk"]
QAM16 = SCHEMES["qam16"]


def test_generate_bits_deterministic():
    a = generate_bits(500, 7, 3)
    b = generate_bits(500, 7, 3)
    assert np.array_equal(a.bits, b.bits)
    assert (a.master_seed, a.stream_index) == (7, 3)


def test_streams_differ_by_index():
    for idx in range(1, 50):
        assert np.any(generate_bits(64, 7, 0).bits != generate_bits(64, 7, idx).bits)


def test_bits_are_balanced():
    # binomial sd for 1e6 fair bits is 5e-4; the bound is 4 sd
    frac = generate_bits(10**6, 2014, 0).bits.mean()
    assert abs(frac - 0.5) < 0.002


def test_generate_bits_rejects_nonpositive():
    with pytest.raises(ValueError):
        generate_bits(0, 1, 1)


def test_qpsk_convention():
    s = 1 / np.sqrt(2)
    assert map_bits([0, 0], QPSK)[0] == pytest.approx(s + 1j * s)
    assert map_bits([1, 1], QPSK)[0] == pytest.approx(-s - 1j * s)
    assert map_bits([0, 1], QPSK)[0] == pytest.approx(s - 1j * s)


@pytest.mark.parametrize("scheme", [QPSK, QAM16], ids=lambda s: s.name)
def test_unit_average_energy(scheme):
    bits = labels_to_bits(np.arange(scheme.order)[None, :], scheme.bits_per_symbol)[0]
    pts = map_bits(bits, scheme)
    assert abs(np.mean(np.abs(pts) ** 2) - 1.0) < 1e-12
    assert len(set(np.round(pts, 12))) == scheme.order


@pytest.mark.parametrize("scheme", [QPSK, QAM16], ids=lambda s: s.name)
def test_exhaustive_round_trip(scheme):
    labels = np.arange(scheme.order)
    bits = labels_to_bits(labels[None, :], scheme.bits_per_symbol)[0]
    assert np.array_equal(demap_symbols(map_bits(bits, scheme), scheme), bits)


@pytest.mark.parametrize("scheme", [QPSK, QAM16], ids=lambda s: s.name)
def test_gray_neighbours_differ_in_one_bit(scheme):
    pts = scheme.points
    table = scheme.bit_labels()
    spacing = np.min([abs(a - b) for a, b in itertools.combinations(pts, 2)])
    for i, j in itertools.combinations(range(scheme.order), 2):
        d = pts[i] - pts[j]
        axis_neighbour = abs(abs(d) - spacing) < 1e-9 and (abs(d.real) < 1e-9 or abs(d.imag) < 1e-9)
        if axis_neighbour:
            assert np.sum(table[i] != table[j]) == 1


def test_random_round_trip(rng):
    for scheme in (QPSK, QAM16):
        bits = rng.integers(0, 2, 10_000 - 10_000 % scheme.bits_per_symbol, dtype=np.uint8)
        assert np.array_equal(demap_symbols(map_bits(bits, scheme), scheme), bits)


def test_quadrant_decision_and_tie_break():
    assert list(demap_symbols([0.9 + 0.8j], QPSK)) == [0, 0]
    # on the in-phase boundary: labels 00 and 10 tie, lower label wins
    assert list(demap_symbols([0 + 0.5j], QPSK)) == [0, 0]
    assert list(demap_symbols([0j], QPSK)) == [0, 0]
    # the origin is exactly equidistant from the four inner 16-QAM points
    assert list(demap_symbols([0j], QAM16)) == [0, 0, 0, 0]


@given(st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False))
def test_every_point_decides_to_one_label(z):
    for scheme in (QPSK, QAM16):
        bits = demap_symbols([z], scheme)
        assert bits.shape == (scheme.bits_per_symbol,)
        assert set(np.unique(bits)) <= {0, 1}


def test_map_rejects_indivisible_length():
    with pytest.raises(LengthError):
        map_bits([0, 1, 1], QPSK)


def test_demap_rejects_empty():
    with pytest.raises(LengthError):
        demap_symbols([], QPSK)


def test_scheme_lookup():
    assert get_scheme("QAM") is QAM16
    assert get_scheme("16-QAM") is QAM16
    with pytest.raises(ConfigError):
        get_scheme("64qam")
