"""Convergence and mixing diagnostics for retained chains.

Numeric outputs only: z-scores, autocorrelations, running-quantile traces.
Plotting is left to the caller; a long-format CSV emitter is provided for
that purpose.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import ChainTooShortError, EmptyChainError
from .sampler import Chain


def _as_matrix(chain) -> tuple[np.ndarray, list]:
    if isinstance(chain, Chain):
        return chain.draws, list(chain.param_names)
    arr = np.asarray(chain, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    return arr, [f"param{j}" for j in range(arr.shape[1])]


@dataclass(frozen=True)
class GewekeResult:
    z_scores: np.ndarray
    param_names: tuple
    window_early: float
    window_late: float


def _batch_means_var_of_mean(xs: np.ndarray) -> np.ndarray:
    """Variance of the window mean via batch means with ceil(sqrt(n)) batches."""
    n = xs.shape[0]
    n_batches = int(np.ceil(np.sqrt(n)))
    size = n // n_batches
    trimmed = xs[: n_batches * size]
    means = trimmed.reshape(n_batches, size, -1).mean(axis=1)
    return means.var(axis=0, ddof=1) / n_batches


def geweke(chain, early: float = 0.1, late: float = 0.5) -> GewekeResult:
    """Z-scores comparing the mean of the first ``early`` fraction of the
    chain against the mean of the last ``late`` fraction, with window
    variances from batch means.
    """
    draws, names = _as_matrix(chain)
    m = draws.shape[0]
    if m < 50:
        raise ChainTooShortError(f"need at least 50 retained draws, got {m}")
    if not (0 < early < 1 and 0 < late < 1 and early + late <= 1):
        raise ChainTooShortError("windows must be disjoint fractions of the chain")
    n_early = int(np.floor(early * m))
    n_late = int(np.floor(late * m))
    head = draws[:n_early]
    tail = draws[m - n_late :]
    diff = head.mean(axis=0) - tail.mean(axis=0)
    var = _batch_means_var_of_mean(head) + _batch_means_var_of_mean(tail)
    z = diff / np.sqrt(var)
    return GewekeResult(z, tuple(names), early, late)


def acf(series: np.ndarray, max_lag: int) -> np.ndarray:
    """Biased-normalized autocorrelation at lags 0..max_lag (acf[0] = 1)."""
    x = np.asarray(series, dtype=float).ravel()
    n = x.size
    if n < 2 or max_lag >= n:
        raise ChainTooShortError(f"series of length {n} too short for max_lag {max_lag}")
    x = x - x.mean()
    c0 = float(x @ x) / n
    out = np.zeros(max_lag + 1)
    out[0] = 1.0
    if c0 == 0.0:
        return out
    for h in range(1, max_lag + 1):
        out[h] = (x[: n - h] @ x[h:]) / n / c0
    return out


def running_quantiles(chain, probs=(0.25, 0.75)) -> np.ndarray:
    """Cumulative quantiles at each retained index.

    Returns an array of shape (M, n_params, len(probs)); row i holds the
    quantiles of the first i+1 retained draws. Stabilizing traces indicate a
    settled chain.
    """
    draws, _ = _as_matrix(chain)
    m, d = draws.shape
    if m == 0:
        raise EmptyChainError("chain has no retained draws")
    probs = tuple(probs)
    out = np.empty((m, d, len(probs)))
    for i in range(m):
        out[i] = np.quantile(draws[: i + 1], probs, axis=0).T
    return out


def write_trace_csv(chain, path) -> None:
    """Emit retained draws in long format (index, parameter, value)."""
    draws, names = _as_matrix(chain)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write("# schema: censar/trace v1\n")
        writer = csv.writer(fh)
        writer.writerow(["index", "parameter", "value"])
        for i, row in enumerate(draws):
            for name, value in zip(names, row):
                writer.writerow([i, name, repr(float(value))])
