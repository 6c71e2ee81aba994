"""The M x L x N dyadic backscatter channel.

The reader's M transmit antennas reach the tag's L antennas through the
forward gains H (M x L); the tag's load-modulated reflection reaches the
N receive antennas through the backscatter gains G (L x N). Over a block
of T slots the received matrix is

    R = ((Q H) o C) G + W

with o the entrywise product, C the T x L tag coding matrix and W AWGN.
Fading is quasi-static: one (H, G) realization holds for the whole block.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import DimensionMismatchError, sample_cn_matrix
from .query import query_array

__all__ = [
    "SystemDims",
    "ChannelRealization",
    "sample_channel",
    "effective_signal",
    "backscatter_transmit",
]


@dataclass(frozen=True)
class SystemDims:
    """Antenna counts and block length: M query, L tag, N receive, T slots."""

    M: int
    L: int
    N: int
    T: int

    def __post_init__(self):
        for name in ("M", "L", "N", "T"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1, got {getattr(self, name)}")


@dataclass(frozen=True)
class ChannelRealization:
    """One quasi-static draw of the two fading stages."""

    H: np.ndarray  # M x L forward gains
    G: np.ndarray  # L x N backscatter gains

    def __post_init__(self):
        if self.H.ndim != 2 or self.G.ndim != 2 or self.H.shape[1] != self.G.shape[0]:
            raise DimensionMismatchError(
                f"H {self.H.shape} and G {self.G.shape} disagree on tag antenna count"
            )


def sample_channel(dims: SystemDims, rng: np.random.Generator) -> ChannelRealization:
    """Draw H and G independently with i.i.d. CN(0, 1) entries.

    Both stages are full rank with probability one. The realization is
    meant to be held fixed for all T slots of a block.
    """
    return ChannelRealization(
        H=sample_cn_matrix(dims.M, dims.L, rng),
        G=sample_cn_matrix(dims.L, dims.N, rng),
    )


def effective_signal(q, H: np.ndarray, C: np.ndarray, G: np.ndarray) -> np.ndarray:
    """Noiseless received block S = ((Q H) o C) G, a T x N matrix."""
    Q = query_array(q)
    H = np.asarray(H, dtype=complex)
    C = np.asarray(C, dtype=complex)
    G = np.asarray(G, dtype=complex)
    T, M = Q.shape
    if H.shape[0] != M:
        raise DimensionMismatchError(f"H must have {M} rows, got {H.shape}")
    L = H.shape[1]
    if C.shape != (T, L):
        raise DimensionMismatchError(f"C must be {T}x{L}, got {C.shape}")
    if G.shape[0] != L:
        raise DimensionMismatchError(f"G must have {L} rows, got {G.shape}")
    return ((Q @ H) * C) @ G


def backscatter_transmit(
    q,
    ch: ChannelRealization,
    C: np.ndarray,
    noise_std: float,
    rng: np.random.Generator,
) -> np.ndarray:
    """Send one coded block through the channel: R = S + W.

    W has i.i.d. circularly-symmetric complex Gaussian entries with total
    variance noise_std**2 per entry (noise_std == 0 gives the noiseless
    signal exactly).
    """
    if noise_std < 0:
        raise ValueError(f"noise_std must be >= 0, got {noise_std}")
    s = effective_signal(q, ch.H, C, ch.G)
    if noise_std == 0.0:
        return s
    return s + noise_std * sample_cn_matrix(s.shape[0], s.shape[1], rng)
