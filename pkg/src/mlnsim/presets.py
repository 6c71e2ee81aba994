"""Built-in experiment presets for the three stock antenna/code settings.

Each preset fixes the antenna dimensions, the codeword difference matrix
driving the analytical measures, and the matching codebook used by the
link simulator:

* example1: 2x2x2 channel, two-antenna code with a full-support,
  full-rank difference matrix (unitary query dominates).
* example2: same code on a 2x2x1 channel (measures tie).
* example3: 2x1x2 channel, single-antenna BPSK repeated over two slots
  (unitary query restores the diversity a single-antenna tag loses).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import SystemDims
from .codes import (
    EXAMPLE1_DELTA,
    EXAMPLE3_DELTA,
    Codebook,
    pairwise_codebook_from_delta,
    repetition_bpsk,
)

__all__ = ["Preset", "PRESET_NAMES", "get_preset"]

PRESET_NAMES = ("example1", "example2", "example3")


@dataclass(frozen=True)
class Preset:
    name: str
    dims: SystemDims
    delta: np.ndarray  # L x T difference matrix used by the analyses
    codebook: Codebook
    codebook_name: str


def get_preset(name: str) -> Preset:
    if name == "example1":
        cb, _ = pairwise_codebook_from_delta(EXAMPLE1_DELTA)
        return Preset(name, SystemDims(2, 2, 2, 2), EXAMPLE1_DELTA.copy(), cb, "example1-pair")
    if name == "example2":
        cb, _ = pairwise_codebook_from_delta(EXAMPLE1_DELTA)
        return Preset(name, SystemDims(2, 2, 1, 2), EXAMPLE1_DELTA.copy(), cb, "example1-pair")
    if name == "example3":
        return Preset(
            name, SystemDims(2, 1, 2, 2), EXAMPLE3_DELTA.copy(), repetition_bpsk(2), "repetition-bpsk"
        )
    raise ValueError(f"unknown preset {name!r}; choose from {PRESET_NAMES}")
