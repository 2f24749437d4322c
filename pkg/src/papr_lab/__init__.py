"""Clipping-and-filtering PAPR reduction for OFDM: simulation library and CLI."""
__version__ = "0.1.0"
