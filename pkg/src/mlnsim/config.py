"""Experiment configuration: a flat JSON document plus CLI overrides.

The config file mirrors the ExperimentConfig fields one-to-one. CLI flags
override file values; a preset, when given, fully determines dimensions,
codebook and difference matrix, and conflicting explicit settings are
rejected.

Custom codebooks are inline: ``"codebook": "custom"`` with a
``"codewords"`` list of T x L matrices whose entries are either plain
numbers (real) or two-element [re, im] lists. An explicit ``"delta"``
matrix (L x T, same entry forms) may be supplied for the analytical
commands; otherwise the difference of the first two codewords is used.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field

import numpy as np

from .channel import SystemDims
from .codes import Codebook, difference_matrix, repetition_bpsk, uncoded_bpsk, pairwise_codebook_from_delta, EXAMPLE1_DELTA
from .presets import PRESET_NAMES, get_preset
from .query import UNITARY_KINDS

__all__ = ["ConfigError", "ExperimentConfig", "load_config", "parse_snr_grid"]

COMMANDS = ("measure", "verify-lemmas", "pep", "ber", "reproduce")

DEFAULT_BER_GRID = tuple(float(s) for s in range(0, 41, 2))
DEFAULT_PEP_GRID = tuple(float(s) for s in range(10, 46, 5))
DEFAULT_EXPONENT_GRID = tuple(float(s) for s in range(25, 46, 5))

CODEBOOK_BUILDERS = ("example1-pair", "repetition-bpsk", "uncoded-bpsk", "custom")

_CONFIG_KEYS = {
    "command", "preset", "m", "l", "n", "t", "query", "codebook", "codewords",
    "delta", "snr_grid_db", "seed", "trials", "target_error_events",
    "max_trials_per_point", "out",
}


class ConfigError(ValueError):
    """A configuration value violates an invariant; the message names it."""


def parse_snr_grid(text: str) -> tuple:
    """Parse "A:STEP:B" into an inclusive ascending dB grid."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(f"snr_grid_db: expected A:STEP:B, got {text!r}")
    try:
        a, step, b = (float(p) for p in parts)
    except ValueError:
        raise ConfigError(f"snr_grid_db: non-numeric field in {text!r}") from None
    if step <= 0 or b < a:
        raise ConfigError(f"snr_grid_db: need step > 0 and B >= A in {text!r}")
    n = int(round((b - a) / step))
    return tuple(a + i * step for i in range(n + 1))


def _parse_entry(v):
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, list) and len(v) == 2 and all(isinstance(x, (int, float)) for x in v):
        return complex(v[0], v[1])
    raise ConfigError(f"codewords: matrix entries must be numbers or [re, im] pairs, got {v!r}")


def _parse_matrix(rows, what: str) -> np.ndarray:
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise ConfigError(f"{what}: expected a list of rows")
    width = len(rows[0])
    if width == 0 or any(len(r) != width for r in rows):
        raise ConfigError(f"{what}: rows must be nonempty and equal length")
    return np.array([[_parse_entry(v) for v in r] for r in rows], dtype=complex)


@dataclass(frozen=True)
class ExperimentConfig:
    """A fully validated experiment description."""

    command: str
    preset: str | None
    dims: SystemDims
    query: str  # unitary construction used against the uniform query
    codebook_name: str
    codebook: Codebook
    delta: np.ndarray  # L x T
    snr_grid_db: tuple
    seed: int
    trials: int  # Monte Carlo trials for measure/lemma/pep work
    target_error_events: int
    max_trials_per_point: int
    output_dir: str
    snr_grid_explicit: bool = field(default=False, compare=False)


def _build_codebook(name, values, dims: SystemDims):
    if name == "example1-pair":
        cb, _ = pairwise_codebook_from_delta(EXAMPLE1_DELTA)
        return cb, EXAMPLE1_DELTA.copy()
    if name == "repetition-bpsk":
        cb = repetition_bpsk(dims.T)
        return cb, difference_matrix(cb.codewords[0], cb.codewords[1]).delta
    if name == "uncoded-bpsk":
        cb = uncoded_bpsk(dims.T, dims.L)
        return cb, None
    if name == "custom":
        if not isinstance(values, list) or len(values) < 2:
            raise ConfigError("codewords: custom codebook needs a list of >= 2 codewords")
        words = tuple(_parse_matrix(w, "codewords") for w in values)
        bits = math.log2(len(words))
        if bits != int(bits):
            raise ConfigError(f"codewords: count {len(words)} is not a power of 2")
        try:
            cb = Codebook(words, bits_per_block=int(bits))
        except ValueError as exc:
            raise ConfigError(f"codewords: {exc}") from exc
        return cb, None
    raise ConfigError(f"codebook: unknown name {name!r}; choose from {CODEBOOK_BUILDERS}")


def load_config(path: str | None = None, overrides: dict | None = None) -> ExperimentConfig:
    """Load and validate a config from a JSON file and/or override values.

    Overrides (typically CLI flags) win over file values. Raises
    ConfigError naming the offending field.
    """
    raw: dict = {}
    if path is not None:
        try:
            with open(path, encoding="utf-8") as fh:
                raw = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"config: cannot read {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config: {path} line {exc.lineno}: {exc.msg}") from exc
        if not isinstance(raw, dict):
            raise ConfigError("config: top level must be a JSON object")
    unknown = set(raw) - _CONFIG_KEYS
    if unknown:
        raise ConfigError(f"config: unknown keys {sorted(unknown)}")
    merged = dict(raw)
    for k, v in (overrides or {}).items():
        if v is not None:
            merged[k] = v

    command = merged.get("command")
    if command not in COMMANDS:
        raise ConfigError(f"command: expected one of {COMMANDS}, got {command!r}")

    preset_name = merged.get("preset")
    query = merged.get("query", "dft")
    if query not in UNITARY_KINDS:
        raise ConfigError(
            f"query: comparisons run uniform against a unitary construction; "
            f"expected one of {UNITARY_KINDS}, got {query!r}"
        )

    if preset_name is not None:
        if preset_name not in PRESET_NAMES:
            raise ConfigError(f"preset: unknown {preset_name!r}; choose from {PRESET_NAMES}")
        conflicts = [k for k in ("m", "l", "n", "t", "codebook", "codewords", "delta") if k in merged]
        if conflicts:
            raise ConfigError(f"preset: {preset_name} fixes dims and codebook; remove {conflicts}")
        p = get_preset(preset_name)
        dims, codebook, codebook_name, delta = p.dims, p.codebook, p.codebook_name, p.delta
    else:
        codebook_name = merged.get("codebook")
        if codebook_name is None:
            raise ConfigError("codebook: required when no preset is given")
        try:
            dims = SystemDims(
                int(merged.get("m", 0)), int(merged.get("l", 0)),
                int(merged.get("n", 0)), int(merged.get("t", 0)),
            )
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"dims: m/l/n/t must all be integers >= 1 ({exc})") from None
        codebook, delta = _build_codebook(codebook_name, merged.get("codewords"), dims)
        if "delta" in merged:
            delta = _parse_matrix(merged["delta"], "delta")
        elif delta is None:
            delta = difference_matrix(codebook.codewords[0], codebook.codewords[1]).delta
        if (codebook.T, codebook.L) != (dims.T, dims.L):
            raise ConfigError(
                f"codebook: codewords are {codebook.T}x{codebook.L} but dims give T={dims.T}, L={dims.L}"
            )
        if delta.shape != (dims.L, dims.T):
            raise ConfigError(f"delta: must be L x T = {dims.L}x{dims.T}, got {delta.shape}")

    grid_value = merged.get("snr_grid_db")
    explicit_grid = grid_value is not None
    if isinstance(grid_value, str):
        grid = parse_snr_grid(grid_value)
    elif grid_value is not None:
        grid = tuple(float(s) for s in grid_value)
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ConfigError("snr_grid_db: must be strictly ascending")
    else:
        grid = DEFAULT_BER_GRID if command in ("ber", "reproduce") else DEFAULT_PEP_GRID

    def _positive_int(key, default):
        v = merged.get(key, default)
        try:
            v = int(v)
        except (TypeError, ValueError):
            raise ConfigError(f"{key}: must be an integer, got {merged.get(key)!r}") from None
        if v < 1 and key != "seed":
            raise ConfigError(f"{key}: must be >= 1, got {v}")
        return v

    seed = int(merged.get("seed", 0))
    trials = _positive_int("trials", 100_000 if command in ("pep", "reproduce") else 1000)
    target_events = _positive_int("target_error_events", 200)
    max_trials = _positive_int("max_trials_per_point", 2_000_000)

    out_dir = str(merged.get("out", "mlnsim-out"))
    parent = os.path.dirname(os.path.abspath(out_dir))
    if not os.path.isdir(parent) or not os.access(parent, os.W_OK):
        raise ConfigError(f"out: cannot create output directory under {parent}")

    return ExperimentConfig(
        command=command,
        preset=preset_name,
        dims=dims,
        query=query,
        codebook_name=codebook_name,
        codebook=codebook,
        delta=np.asarray(delta, dtype=complex),
        snr_grid_db=grid,
        seed=seed,
        trials=trials,
        target_error_events=target_events,
        max_trials_per_point=max_trials,
        output_dir=out_dir,
        snr_grid_explicit=explicit_grid,
    )
