"""Pairwise error probability estimators for the two query schemes.

Two routes are provided for each scheme:

* "q-function-mc": the exact error integral, Monte Carlo averaged over
  both fading stages: mean of Q(sqrt(gbar * Z / 2)) with Z the squared
  codeword distance after the channel.
* "eigen-product-mc": the conditional product prod 1 / (1 + lam*gbar/4)
  over the squared singular values of the per-slot matrices E_t (unitary)
  or of D (uniform), Monte Carlo averaged over the backscatter stage G
  only. The product is the standard Chernoff-style bound on the
  Gaussian-averaged Q function, so it upper-bounds the first route while
  sharing its asymptotic decay.

gbar = 10**(snr_db / 10) throughout. Estimators report the Monte Carlo
standard error alongside the value.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import erfc

from .channel import SystemDims
from .codes import DifferenceMatrix
from .linalg import DimensionMismatchError, sample_cn_matrix
from .measure import build_D, build_E_t

__all__ = [
    "PepEstimate",
    "RatioPoint",
    "DivergentAverageError",
    "squared_distance_unitary",
    "squared_distance_uniform",
    "pep_qfunction_mc",
    "pep_eigen_product_mc",
    "decay_exponent",
    "check_scaled_limit",
    "decay_exponent_checked",
    "pep_ratio_curve",
    "pep_curve_to_csv",
    "pep_curve_from_csv",
    "ratio_curve_to_csv",
    "ratio_curve_from_csv",
]

METHOD_QFUNC = "q-function-mc"
METHOD_EIGEN = "eigen-product-mc"

QUERY_SCHEMES = ("unitary", "uniform")

_IDENTITY_RTOL = 1e-10
_MC_BATCH = 100_000

# A scheme's scaled average gbar**R * pep should flatten out at high SNR;
# growth beyond this factor across the fit window (and beyond 3 sigma)
# marks the limiting expectation as divergent.
_DIVERGENCE_GROWTH = 3.0


@dataclass(frozen=True)
class PepEstimate:
    """One Monte Carlo PEP point."""

    snr_db: float
    value: float
    std_error: float
    trials: int
    method: str


@dataclass(frozen=True)
class RatioPoint:
    """Unitary-to-uniform PEP ratio at one SNR, with propagated error."""

    snr_db: float
    ratio: float
    std_error: float
    censored: bool = False


class DivergentAverageError(RuntimeError):
    """The scaled Monte Carlo average keeps growing instead of converging."""


def _as_diff(delta) -> DifferenceMatrix:
    if isinstance(delta, DifferenceMatrix):
        return delta
    return DifferenceMatrix(np.asarray(delta, dtype=complex))


def _check_scheme(query_kind: str):
    if query_kind not in QUERY_SCHEMES:
        raise ValueError(f"query_kind must be one of {QUERY_SCHEMES}, got {query_kind!r}")


def qfunc(x):
    """Gaussian tail probability Q(x) = P(N(0,1) > x)."""
    return 0.5 * erfc(np.asarray(x) / np.sqrt(2.0))


def squared_distance_unitary(X: np.ndarray, delta, G: np.ndarray) -> float:
    """Z_X = ||(X o delta^T) G||_F^2 for a slot-varying forward process X.

    Computed both directly and as the per-slot sum over x_t diag(delta[:, t]) G;
    the two routes must agree to 1e-10 relative.
    """
    d = _as_diff(delta)
    X = np.asarray(X, dtype=complex)
    G = np.asarray(G, dtype=complex)
    if X.shape != (d.T, d.L):
        raise DimensionMismatchError(f"X must be {d.T}x{d.L}, got {X.shape}")
    if G.ndim != 2 or G.shape[0] != d.L:
        raise DimensionMismatchError(f"G must have {d.L} rows, got {G.shape}")
    direct = float(np.sum(np.abs((X * d.delta.T) @ G) ** 2))
    per_slot = float(
        sum(
            np.sum(np.abs(X[t][None, :] @ build_E_t(d, G, t + 1)) ** 2)
            for t in range(d.T)
        )
    )
    scale = max(direct, per_slot, 1.0)
    assert abs(direct - per_slot) <= _IDENTITY_RTOL * scale, (
        f"distance routes disagree: {direct!r} vs {per_slot!r}"
    )
    return direct


def squared_distance_uniform(y: np.ndarray, delta, G: np.ndarray) -> float:
    """Z_Y = sum_t ||y diag(delta[:, t]) G||_F^2 for a static forward row y.

    Also evaluated as ||y D||_F^2 with D the receive-antenna regrouping;
    the two routes must agree to 1e-10 relative.
    """
    d = _as_diff(delta)
    y = np.asarray(y, dtype=complex).reshape(1, -1)
    G = np.asarray(G, dtype=complex)
    if y.shape[1] != d.L:
        raise DimensionMismatchError(f"y must have {d.L} entries, got {y.shape}")
    if G.ndim != 2 or G.shape[0] != d.L:
        raise DimensionMismatchError(f"G must have {d.L} rows, got {G.shape}")
    e_form = float(
        sum(np.sum(np.abs(y @ build_E_t(d, G, t + 1)) ** 2) for t in range(d.T))
    )
    d_form = float(np.sum(np.abs(y @ build_D(d, G)) ** 2))
    scale = max(e_form, d_form, 1.0)
    assert abs(e_form - d_form) <= _IDENTITY_RTOL * scale, (
        f"distance routes disagree: {e_form!r} vs {d_form!r}"
    )
    return e_form


def _batched_z(query_kind: str, d: DifferenceMatrix, N: int, n: int, rng) -> np.ndarray:
    """n draws of the squared codeword distance Z under either scheme."""
    L, T = d.L, d.T
    if query_kind == "unitary":
        X = sample_cn_matrix(n, T * L, rng).reshape(n, T, L)
    else:
        X = np.broadcast_to(sample_cn_matrix(n, L, rng)[:, None, :], (n, T, L))
    G = sample_cn_matrix(n, L * N, rng).reshape(n, L, N)
    S = np.einsum("ktl,kln->ktn", X * d.delta.T[None], G)
    return np.sum(np.abs(S) ** 2, axis=(1, 2))


def _mc_mean(draw, trials: int) -> tuple[float, float]:
    """Mean and standard error of batched `draw(n)` over `trials` samples."""
    total = 0.0
    total_sq = 0.0
    done = 0
    while done < trials:
        n = min(_MC_BATCH, trials - done)
        v = draw(n)
        total += float(np.sum(v))
        total_sq += float(np.sum(v * v))
        done += n
    mean = total / trials
    var = max(total_sq / trials - mean * mean, 0.0)
    return mean, float(np.sqrt(var / trials))


def pep_qfunction_mc(
    query_kind: str,
    delta,
    dims: SystemDims,
    snr_db: float,
    trials: int,
    rng: np.random.Generator,
) -> PepEstimate:
    """Monte Carlo of the exact pairwise error integral E[Q(sqrt(gbar Z / 2))].

    Both fading stages are redrawn every trial: the forward process enters
    as i.i.d. Gaussian slots (unitary) or one Gaussian row repeated over
    slots (uniform).
    """
    _check_scheme(query_kind)
    d = _as_diff(delta)
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    if (dims.L, dims.T) != (d.L, d.T):
        raise DimensionMismatchError(
            f"delta is {d.L}x{d.T} but dims expect L={dims.L}, T={dims.T}"
        )
    gbar = 10.0 ** (snr_db / 10.0)
    mean, se = _mc_mean(
        lambda n: qfunc(np.sqrt(gbar * _batched_z(query_kind, d, dims.N, n, rng) / 2.0)),
        trials,
    )
    return PepEstimate(float(snr_db), mean, se, trials, METHOD_QFUNC)


def _batched_lambda_product(query_kind, d, N, n, gbar, rng) -> np.ndarray:
    """n draws of prod 1/(1 + lam*gbar/4) over the scheme's eigenvalues."""
    L, T = d.L, d.T
    G = sample_cn_matrix(n, L * N, rng).reshape(n, L, N)
    if query_kind == "unitary":
        out = np.ones(n)
        for t in range(T):
            Et = d.delta[:, t][None, :, None] * G
            lam = np.linalg.svd(Et, compute_uv=False) ** 2
            out *= np.prod(1.0 / (1.0 + lam * gbar / 4.0), axis=1)
        return out
    blocks = [G[:, :, j][:, :, None] * d.delta[None] for j in range(N)]
    D = np.concatenate(blocks, axis=2)
    lam = np.linalg.svd(D, compute_uv=False) ** 2
    return np.prod(1.0 / (1.0 + lam * gbar / 4.0), axis=1)


def pep_eigen_product_mc(
    query_kind: str,
    delta,
    dims: SystemDims,
    snr_db: float,
    trials: int,
    rng: np.random.Generator,
) -> PepEstimate:
    """Monte Carlo over G of the conditional eigenvalue product.

    Zero eigenvalues contribute unit factors, so the product effectively
    runs over the nonzero spectrum of E_t E_t^H (unitary) or D D^H
    (uniform). At gbar = 0 every factor is 1 and the estimate is exactly 1.
    """
    _check_scheme(query_kind)
    d = _as_diff(delta)
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    if (dims.L, dims.T) != (d.L, d.T):
        raise DimensionMismatchError(
            f"delta is {d.L}x{d.T} but dims expect L={dims.L}, T={dims.T}"
        )
    gbar = 10.0 ** (snr_db / 10.0)
    mean, se = _mc_mean(
        lambda n: _batched_lambda_product(query_kind, d, dims.N, n, gbar, rng), trials
    )
    return PepEstimate(float(snr_db), mean, se, trials, METHOD_EIGEN)


def decay_exponent(estimates: list[PepEstimate]) -> float:
    """Least-squares decay exponent R with value ~ gbar**(-R).

    Fits log10(value) against snr_db / 10 and negates the slope. Needs at
    least 3 points spanning at least 10 dB, all with positive values.
    """
    if len(estimates) < 3:
        raise ValueError(f"need >= 3 estimates to fit an exponent, got {len(estimates)}")
    snrs = np.array([e.snr_db for e in estimates], dtype=float)
    if snrs.max() - snrs.min() < 10.0:
        raise ValueError(
            f"estimates span only {snrs.max() - snrs.min():.3g} dB; need >= 10 dB"
        )
    vals = np.array([e.value for e in estimates], dtype=float)
    if np.any(vals <= 0.0):
        bad = snrs[vals <= 0.0]
        raise ValueError(f"nonpositive PEP values at snr_db={bad.tolist()}")
    x = snrs / 10.0
    coeffs = np.polyfit(x, np.log10(vals), 1)
    return float(-coeffs[0])


@dataclass(frozen=True)
class ScaledLimitReport:
    """Behavior of gbar**exponent * value across the estimate window."""

    exponent: int
    growth: float  # last scaled value / first scaled value
    z_score: float  # significance of log-growth vs propagated MC error
    divergent: bool


def check_scaled_limit(estimates: list[PepEstimate], exponent: int) -> ScaledLimitReport:
    """Test whether gbar**exponent * pep converges across the window.

    When the limiting expectation behind the high-SNR constant is finite,
    the scaled sequence flattens; systematic growth (factor above 3,
    significant at 3 sigma) flags a divergent average.
    """
    if len(estimates) < 2:
        raise ValueError("need >= 2 estimates to assess the scaled limit")
    first, last = estimates[0], estimates[-1]
    if first.value <= 0.0 or last.value <= 0.0:
        raise ValueError("scaled-limit check needs positive endpoint values")
    g_first = 10.0 ** (first.snr_db / 10.0)
    g_last = 10.0 ** (last.snr_db / 10.0)
    growth = (last.value * g_last**exponent) / (first.value * g_first**exponent)
    rel_err = np.hypot(first.std_error / first.value, last.std_error / last.value)
    z = np.log(growth) / rel_err if rel_err > 0 else np.inf
    divergent = growth > _DIVERGENCE_GROWTH and z > 3.0
    return ScaledLimitReport(exponent, float(growth), float(z), bool(divergent))


def decay_exponent_checked(estimates: list[PepEstimate], nominal_exponent: int) -> float:
    """Fit the decay exponent after guarding the scaled-limit convergence.

    Raises DivergentAverageError, with the growth evidence in the message,
    when gbar**nominal * pep keeps growing across the window; in that case
    no exponent is reported because the asymptotic constant does not exist
    and the fitted slope would undershoot the nominal measure.
    """
    report = check_scaled_limit(estimates, nominal_exponent)
    if report.divergent:
        raise DivergentAverageError(
            f"scaled average gbar^{nominal_exponent} * pep grew by x{report.growth:.3g} "
            f"({report.z_score:.1f} sigma) across {estimates[0].snr_db:g}-"
            f"{estimates[-1].snr_db:g} dB; limiting expectation diverges, "
            "no exponent reported"
        )
    return decay_exponent(estimates)


PEP_CSV_HEADER = "snr_db,value,std_error,trials,method"
RATIO_CSV_HEADER = "snr_db,ratio,std_error,censored"


def pep_curve_to_csv(estimates: list[PepEstimate]) -> str:
    lines = [PEP_CSV_HEADER]
    for e in estimates:
        lines.append(f"{e.snr_db!r},{e.value!r},{e.std_error!r},{e.trials},{e.method}")
    return "\n".join(lines) + "\n"


def pep_curve_from_csv(text: str) -> list[PepEstimate]:
    lines = [ln for ln in text.strip().splitlines() if ln]
    if not lines or lines[0] != PEP_CSV_HEADER:
        raise ValueError(f"unexpected CSV header: {lines[:1]}")
    out = []
    for ln in lines[1:]:
        f = ln.split(",")
        out.append(PepEstimate(float(f[0]), float(f[1]), float(f[2]), int(f[3]), f[4]))
    return out


def ratio_curve_to_csv(points: list[RatioPoint]) -> str:
    lines = [RATIO_CSV_HEADER]
    for p in points:
        lines.append(f"{p.snr_db!r},{p.ratio!r},{p.std_error!r},{int(p.censored)}")
    return "\n".join(lines) + "\n"


def ratio_curve_from_csv(text: str) -> list[RatioPoint]:
    lines = [ln for ln in text.strip().splitlines() if ln]
    if not lines or lines[0] != RATIO_CSV_HEADER:
        raise ValueError(f"unexpected CSV header: {lines[:1]}")
    out = []
    for ln in lines[1:]:
        f = ln.split(",")
        out.append(RatioPoint(float(f[0]), float(f[1]), float(f[2]), bool(int(f[3]))))
    return out


def pep_ratio_curve(
    delta,
    dims: SystemDims,
    snr_grid: list[float],
    trials: int,
    rng: np.random.Generator,
    method: str = METHOD_EIGEN,
) -> list[RatioPoint]:
    """Unitary-to-uniform PEP ratio across an ascending SNR grid.

    Standard errors are propagated from both estimates. A point whose
    uniform-query estimate is exactly zero cannot form a ratio and is
    reported censored rather than failing the curve.
    """
    snr_grid = [float(s) for s in snr_grid]
    if any(b <= a for a, b in zip(snr_grid, snr_grid[1:])):
        raise ValueError("snr_grid must be strictly ascending")
    estimator = pep_eigen_product_mc if method == METHOD_EIGEN else pep_qfunction_mc
    points = []
    for snr in snr_grid:
        eu = estimator("unitary", delta, dims, snr, trials, rng)
        ef = estimator("uniform", delta, dims, snr, trials, rng)
        if ef.value == 0.0:
            points.append(RatioPoint(snr, float("nan"), float("nan"), censored=True))
            continue
        ratio = eu.value / ef.value
        rel = np.hypot(
            eu.std_error / eu.value if eu.value > 0 else 0.0,
            ef.std_error / ef.value,
        )
        points.append(RatioPoint(snr, float(ratio), float(ratio * rel)))
    return points
