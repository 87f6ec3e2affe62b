"""Unit-power constellations with Gray-coded bit labels.

Symbols are addressed by *index* into :attr:`Constellation.points`, and the
point tables are laid out so that the index of a point **is** its bit label
(MSB first), i.e. ``labels[i] == i``.  The PSK sets use the standard
DVB-S2 layouts (Gray-coded around the ring); 16APSK is the 4+12 two-ring
layout with the ring ratio used at code rate 3/4.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Constellation",
    "make_constellation",
    "modulate",
    "demap_hard",
    "bit_errors",
]

_RING_RATIO_16APSK = 2.85  # outer/inner radius, DVB-S2 rate 3/4


@dataclass(frozen=True, eq=False)
class Constellation:
    """An indexed symbol alphabet.

    Attributes
    ----------
    name : str
        Canonical lower-case name ("qpsk", "8psk", "16apsk").
    points : numpy.ndarray
        ``complex128`` points with unit average power; ``points[i]`` is the
        point whose bit label is ``i``.
    bits_per_symbol : int
        ``log2(len(points))``.
    labels : numpy.ndarray
        Bit label of each point; a bijection onto ``{0, .., size-1}``.
        Identity by construction, kept explicit so downstream code never
        assumes the layout.
    """

    name: str
    points: np.ndarray
    bits_per_symbol: int
    labels: np.ndarray
    _hamming: np.ndarray = field(repr=False, compare=False, default=None)

    @property
    def size(self) -> int:
        return self.points.shape[0]

    def hamming_table(self) -> np.ndarray:
        """(size, size) table of bit differences between symbol indices."""
        return self._hamming


def _finish(name: str, points: np.ndarray) -> Constellation:
    points = np.asarray(points, dtype=np.complex128)
    size = points.shape[0]
    bps = int(size).bit_length() - 1
    if 2**bps != size:
        raise ValueError(f"constellation size must be a power of two, got {size}")
    labels = np.arange(size, dtype=np.int64)
    ham = np.zeros((size, size), dtype=np.int64)
    for i in range(size):
        for j in range(size):
            ham[i, j] = int(labels[i] ^ labels[j]).bit_count()
    return Constellation(name, points, bps, labels, ham)


def _psk_points(angles_by_label) -> np.ndarray:
    return np.exp(1j * np.asarray(angles_by_label, dtype=np.float64))


def _make_qpsk() -> Constellation:
    # label -> angle: 00 at 45deg and Gray order around the ring.
    angles = np.pi / 4 * np.array([1, -1, 3, -3], dtype=np.float64)
    return _finish("qpsk", _psk_points(angles))


def _make_8psk() -> Constellation:
    angles = np.pi / 4 * np.array([1, 0, 4, 5, 2, 7, 3, 6], dtype=np.float64)
    return _finish("8psk", _psk_points(angles))


def _make_16apsk() -> Constellation:
    gamma = _RING_RATIO_16APSK
    # Unit average power: (4 r1^2 + 12 r2^2) / 16 = 1 with r2 = gamma * r1.
    r1 = 2.0 / np.sqrt(1.0 + 3.0 * gamma**2)
    r2 = gamma * r1
    outer = np.pi / 12 * np.array([3, -3, 9, -9, 1, -1, 11, -11, 5, -5, 7, -7], dtype=np.float64)
    inner = np.pi / 4 * np.array([1, -1, 3, -3], dtype=np.float64)
    points = np.concatenate([r2 * np.exp(1j * outer), r1 * np.exp(1j * inner)])
    return _finish("16apsk", points)


_BUILDERS = {"qpsk": _make_qpsk, "8psk": _make_8psk, "16apsk": _make_16apsk}


def make_constellation(name: str) -> Constellation:
    """Build one of the supported constellations by (case-insensitive) name."""
    key = name.strip().lower()
    if key not in _BUILDERS:
        raise ValueError(
            f"unknown constellation {name!r}; choose from {sorted(_BUILDERS)}"
        )
    return _BUILDERS[key]()


def modulate(c: Constellation, bits) -> np.ndarray:
    """Map a bit array to symbols, ``bits_per_symbol`` bits per point, MSB first."""
    b = np.asarray(bits, dtype=np.int64).ravel()
    if b.size % c.bits_per_symbol:
        raise ValueError(
            f"bit array length {b.size} is not a multiple of {c.bits_per_symbol}"
        )
    if np.any((b < 0) | (b > 1)):
        raise ValueError("bits must be 0 or 1")
    groups = b.reshape(-1, c.bits_per_symbol)
    weights = 1 << np.arange(c.bits_per_symbol - 1, -1, -1, dtype=np.int64)
    idx = groups @ weights
    return c.points[idx]


def demap_hard(c: Constellation, symbols) -> np.ndarray:
    """Nearest-point decision for each symbol; ties go to the lowest index."""
    s = np.asarray(symbols, dtype=np.complex128)
    d = np.abs(s.reshape(-1, 1) - c.points.reshape(1, -1))
    # argmin returns the first (lowest-index) minimizer, which is the
    # documented tie-break.
    return np.argmin(d, axis=1).reshape(s.shape).astype(np.int64)


def bit_errors(c: Constellation, sent, detected) -> int:
    """Total Hamming distance between the labels of two index arrays."""
    a = np.asarray(sent, dtype=np.int64)
    b = np.asarray(detected, dtype=np.int64)
    if a.shape != b.shape:
        raise ValueError("sent and detected index arrays must have equal shape")
    return int(c.hamming_table()[a, b].sum())
