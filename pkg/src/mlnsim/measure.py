"""Rank-based performance measure for unitary vs uniform query signaling.

For a codeword difference matrix delta (L x T) and a backscatter stage
G (L x N), the per-slot matrices

    E_t = diag(delta[:, t]) @ G          (L x N)

govern the unitary-query error behavior, and the concatenation

    D = (G_1 delta | ... | G_N delta),   G_n = diag(G[:, n])   (L x N*T)

governs the uniform-query behavior. With probability one over G,

    rank(E_t) = min(N, L*_t)   and   rank(D) = min(N * rank(delta), L*)

where L*_t is the nonzero count of delta's t-th column and L* the number
of nonzero rows. Summing / combining these ranks yields the two scalar
measures whose ordering predicts which query scheme wins at high SNR.
"""

from __future__ import annotations

from dataclasses import dataclass, asdict

import numpy as np

from .codes import DifferenceMatrix
from .linalg import (
    DimensionMismatchError,
    RANK_REL_TOL,
    rank_from_singulars,
    sample_cn_matrix,
)

__all__ = [
    "MeasureReport",
    "RankCheckReport",
    "build_E_t",
    "build_D",
    "r_unitary",
    "r_uniform",
    "compare_queries",
    "report_from_dict",
    "empirical_rank_check",
]

VERDICT_UNITARY = "unitary-dominates"
VERDICT_UNIFORM = "uniform-dominates"
VERDICT_COMPARABLE = "comparable"


def _as_diff(delta) -> DifferenceMatrix:
    if isinstance(delta, DifferenceMatrix):
        return delta
    return DifferenceMatrix(np.asarray(delta, dtype=complex))


def build_E_t(delta, G: np.ndarray, t: int) -> np.ndarray:
    """Per-slot matrix E_t = diag(delta[:, t]) @ G for 1-based slot t.

    Exactly L - L*_t of its rows are identically zero.
    """
    d = _as_diff(delta)
    G = np.asarray(G, dtype=complex)
    if not 1 <= t <= d.T:
        raise IndexError(f"slot index t={t} outside 1..{d.T}")
    if G.ndim != 2 or G.shape[0] != d.L:
        raise DimensionMismatchError(f"G must have {d.L} rows, got shape {G.shape}")
    return d.delta[:, t - 1][:, None] * G


def build_D(delta, G: np.ndarray) -> np.ndarray:
    """Uniform-query matrix D = (G_1 delta | ... | G_N delta), L x (N*T).

    G_n = diag(G[:, n]) scales row l of delta by g_{l,n}, so D regroups
    the columns of (E_1 | ... | E_T) by receive antenna.
    """
    d = _as_diff(delta)
    G = np.asarray(G, dtype=complex)
    if G.ndim != 2 or G.shape[0] != d.L:
        raise DimensionMismatchError(f"G must have {d.L} rows, got shape {G.shape}")
    blocks = [G[:, n][:, None] * d.delta for n in range(G.shape[1])]
    return np.concatenate(blocks, axis=1)


def r_unitary(delta, N: int) -> int:
    """Unitary-query measure: sum over slots of min(N, L*_t)."""
    d = _as_diff(delta)
    return int(sum(min(N, s) for s in d.column_supports))


def r_uniform(delta, N: int) -> int:
    """Uniform-query measure: min(N * rank(delta), nonzero rows of delta)."""
    d = _as_diff(delta)
    return int(min(N * d.rank, d.nonzero_rows))


@dataclass(frozen=True)
class MeasureReport:
    """Both measures plus their ingredients and the comparison verdict."""

    r_unitary: int
    r_uniform: int
    per_slot_ranks: tuple
    rank_delta: int
    nonzero_rows: int
    verdict: str

    def to_dict(self) -> dict:
        d = asdict(self)
        d["per_slot_ranks"] = list(self.per_slot_ranks)
        return d


def report_from_dict(d: dict) -> MeasureReport:
    """Rebuild a MeasureReport from its JSON dictionary form."""
    return MeasureReport(
        r_unitary=int(d["r_unitary"]),
        r_uniform=int(d["r_uniform"]),
        per_slot_ranks=tuple(int(r) for r in d["per_slot_ranks"]),
        rank_delta=int(d["rank_delta"]),
        nonzero_rows=int(d["nonzero_rows"]),
        verdict=str(d["verdict"]),
    )


def compare_queries(delta, N: int) -> MeasureReport:
    """Evaluate both measures for a difference matrix and N receive antennas."""
    d = _as_diff(delta)
    per_slot = tuple(min(N, s) for s in d.column_supports)
    ru = int(sum(per_slot))
    rf = r_uniform(d, N)
    if ru > rf:
        verdict = VERDICT_UNITARY
    elif ru < rf:
        verdict = VERDICT_UNIFORM
    else:
        verdict = VERDICT_COMPARABLE
    return MeasureReport(
        r_unitary=ru,
        r_uniform=rf,
        per_slot_ranks=per_slot,
        rank_delta=d.rank,
        nonzero_rows=d.nonzero_rows,
        verdict=verdict,
    )


@dataclass(frozen=True)
class RankCheckReport:
    """Observed agreement fractions for the almost-sure rank predictions."""

    trials: int
    per_slot_fractions: tuple  # fraction of trials with rank(E_t) as predicted
    d_fraction: float  # fraction of trials with rank(D) as predicted
    passed: bool

    def to_dict(self) -> dict:
        return {
            "trials": self.trials,
            "per_slot_fractions": list(self.per_slot_fractions),
            "d_fraction": self.d_fraction,
            "passed": self.passed,
        }


def empirical_rank_check(
    delta,
    N: int,
    trials: int,
    rng: np.random.Generator,
    rel_tol: float = RANK_REL_TOL,
) -> RankCheckReport:
    """Validate the almost-sure rank predictions on sampled G.

    Draws `trials` independent G matrices and records, for every slot t,
    the fraction of draws with rank(E_t) == min(N, L*_t), and the fraction
    with rank(D) == min(N * rank(delta), nonzero rows). The report passes
    iff every fraction equals 1. Ranks use the same singular-value
    threshold rule as ``numeric_rank``, applied to batched SVDs.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    d = _as_diff(delta)
    L, T = d.L, d.T
    G = sample_cn_matrix(L, N * trials, rng).reshape(L, trials, N).transpose(1, 0, 2)

    slot_fractions = []
    for t in range(T):
        expected = min(N, d.column_supports[t])
        E = d.delta[:, t][None, :, None] * G  # trials x L x N
        if expected == 0:
            hits = np.all(np.abs(E) <= 0.0, axis=(1, 2))
        else:
            s = np.linalg.svd(E, compute_uv=False)
            hits = rank_from_singulars(s, max(L, N), rel_tol) == expected
        slot_fractions.append(float(np.mean(hits)))

    expected_d = min(N * d.rank, d.nonzero_rows)
    blocks = [G[:, :, n][:, :, None] * d.delta[None] for n in range(N)]
    D = np.concatenate(blocks, axis=2)  # trials x L x N*T
    if expected_d == 0:
        d_hits = np.all(np.abs(D) <= 0.0, axis=(1, 2))
    else:
        s = np.linalg.svd(D, compute_uv=False)
        d_hits = rank_from_singulars(s, max(L, N * T), rel_tol) == expected_d
    d_fraction = float(np.mean(d_hits))

    passed = d_fraction == 1.0 and all(f == 1.0 for f in slot_fractions)
    return RankCheckReport(
        trials=trials,
        per_slot_fractions=tuple(slot_fractions),
        d_fraction=d_fraction,
        passed=passed,
    )
