"""Tag-side space-time codebooks and codeword difference matrices.

Codewords are T x L complex matrices (slot-major, one column per tag
antenna). A codebook is normalized so the average codeword energy equals
T, i.e. unit average energy per slot summed over tag antennas; this keeps
SNR definitions comparable across codes.

The difference matrix of a codeword pair is stored L x T (antenna-major,
transposed from codeword orientation) so that entry (l, t) is the symbol
difference of antenna l at slot t. Its per-column support counts and its
rank are what the performance measures consume.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .linalg import DimensionMismatchError, numeric_rank

__all__ = [
    "Codebook",
    "DifferenceMatrix",
    "difference_matrix",
    "pairwise_codebook_from_delta",
    "repetition_bpsk",
    "uncoded_bpsk",
    "EXAMPLE1_DELTA",
    "EXAMPLE3_DELTA",
]

# entries whose magnitude exceeds this count as "nonzero" in support /
# row-occupancy statistics; codebooks here are exact small rationals
SUPPORT_TOL = 1e-12

ENERGY_TOL = 1e-9

# Built-in codeword difference matrices for the stock experiment presets,
# stored antenna-major (L x T).
EXAMPLE1_DELTA = np.array([[1.0, -2.0], [1.5, 2.5]])
EXAMPLE3_DELTA = np.array([[2.0, 2.0]])


@dataclass(frozen=True)
class Codebook:
    """An ordered set of 2**bits_per_block space-time codewords, all T x L."""

    codewords: tuple
    bits_per_block: int

    def __post_init__(self):
        cws = tuple(np.asarray(c, dtype=complex) for c in self.codewords)
        object.__setattr__(self, "codewords", cws)
        if len(cws) < 2:
            raise ValueError("a codebook needs at least 2 codewords")
        shape = cws[0].shape
        if any(c.shape != shape for c in cws):
            raise DimensionMismatchError("codewords must share one shape")
        if len(cws) != 2**self.bits_per_block:
            raise ValueError(
                f"{len(cws)} codewords cannot carry {self.bits_per_block} bits per block"
            )
        avg_energy = np.mean([np.sum(np.abs(c) ** 2) for c in cws])
        if abs(avg_energy - self.T) > ENERGY_TOL:
            raise ValueError(
                f"average codeword energy {avg_energy:.12g} != block length {self.T}"
            )

    @property
    def T(self) -> int:
        return self.codewords[0].shape[0]

    @property
    def L(self) -> int:
        return self.codewords[0].shape[1]

    def __len__(self) -> int:
        return len(self.codewords)


@dataclass(frozen=True)
class DifferenceMatrix:
    """C - C' stored antenna-major, with support counts and numeric rank.

    column_supports[t] counts the tag antennas whose symbols differ at
    slot t; nonzero_rows counts the antennas that differ anywhere in the
    block.
    """

    delta: np.ndarray  # L x T
    column_supports: tuple = field(init=False)
    nonzero_rows: int = field(init=False)
    rank: int = field(init=False)

    def __post_init__(self):
        d = np.asarray(self.delta, dtype=complex)
        if d.ndim != 2:
            raise DimensionMismatchError(f"delta must be 2-D, got shape {d.shape}")
        object.__setattr__(self, "delta", d)
        nz = np.abs(d) > SUPPORT_TOL
        object.__setattr__(self, "column_supports", tuple(int(c) for c in nz.sum(axis=0)))
        object.__setattr__(self, "nonzero_rows", int(np.any(nz, axis=1).sum()))
        object.__setattr__(self, "rank", 0 if not nz.any() else numeric_rank(d))

    @property
    def L(self) -> int:
        return self.delta.shape[0]

    @property
    def T(self) -> int:
        return self.delta.shape[1]


def difference_matrix(C: np.ndarray, C_prime: np.ndarray) -> DifferenceMatrix:
    """Difference of two same-shape T x L codewords, stored L x T."""
    C = np.asarray(C, dtype=complex)
    C_prime = np.asarray(C_prime, dtype=complex)
    if C.shape != C_prime.shape:
        raise DimensionMismatchError(f"codeword shapes differ: {C.shape} vs {C_prime.shape}")
    return DifferenceMatrix((C - C_prime).T)


def pairwise_codebook_from_delta(delta) -> tuple[Codebook, float]:
    """Two antipodal codewords +/- (s/2) delta^T realizing a given delta.

    The scalar s enforces the codebook energy normalization, so the pair's
    actual difference is s * delta. Returns (codebook, s). Pairwise error
    behavior under ML detection of a two-word codebook depends on the
    difference matrix alone, so this is the minimal code exhibiting a
    target delta.
    """
    if isinstance(delta, DifferenceMatrix):
        d = delta.delta
    else:
        d = np.asarray(delta, dtype=complex)
    energy = np.sum(np.abs(d) ** 2)
    if energy <= SUPPORT_TOL**2:
        raise ValueError("delta has no nonzero entries")
    T = d.shape[1]
    scale = float(np.sqrt(T / (energy / 4.0)))
    c0 = (scale / 2.0) * d.T
    return Codebook((c0, -c0), bits_per_block=1), scale


def repetition_bpsk(T: int) -> Codebook:
    """Single-antenna BPSK repeated over T slots: codewords all +1 / all -1."""
    if T < 1:
        raise ValueError(f"T must be >= 1, got {T}")
    ones = np.ones((T, 1), dtype=complex)
    return Codebook((ones, -ones), bits_per_block=1)


def uncoded_bpsk(T: int, L: int) -> Codebook:
    """Every +/-1 pattern over T slots and L antennas, in lexicographic bit order.

    Entries are scaled by 1/sqrt(L) to satisfy the codebook energy
    normalization (for L == 1 this is the plain +/-1 alphabet). Bit value
    0 maps to +, 1 to -, most significant bit first in row-major entry
    order.
    """
    if T < 1 or L < 1:
        raise ValueError(f"T and L must be >= 1, got ({T}, {L})")
    n = T * L
    if n > 16:
        raise ValueError(f"uncoded codebook with T*L = {n} > 16 entries is not enumerable")
    amp = 1.0 / np.sqrt(L)
    words = []
    for bits in product((0, 1), repeat=n):
        symbols = amp * (1.0 - 2.0 * np.asarray(bits, dtype=float))
        words.append(symbols.reshape(T, L).astype(complex))
    return Codebook(tuple(words), bits_per_block=n)
