"""Core model for censored linear regression with AR(p) errors.

The latent process is ``w_t = x_t @ beta + u_t`` with ``u_t`` a stationary
zero-mean AR(p) driven by Gaussian innovations of variance ``sigma2``; what is
recorded is ``y_t = max(w_t, L)`` (left censoring at a known limit ``L``) or
``y_t = min(w_t, L)`` (right censoring).

This module houses the deterministic pieces: stationarity checks, AR
autocovariances, the banded whitening transform that maps the correlated
series to iid innovations, and the exact Gaussian log likelihood evaluated
through that transform.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.linalg import solve_discrete_lyapunov, toeplitz

from .errors import (
    LengthMismatchError,
    NonPositiveVarianceError,
    NonStationaryError,
)

# Margin on the companion spectral radius; keeps the head-block covariance
# invertible when rho is numerically on the stationarity boundary.
STATIONARITY_MARGIN = 1e-10


class Direction(Enum):
    """Censoring direction: LEFT records max(w, L), RIGHT records min(w, L)."""

    LEFT = "left"
    RIGHT = "right"


@dataclass(frozen=True)
class CensoredSeries:
    """Recorded series with per-point censoring flags.

    Invariants: ``values`` and ``censored`` share length T >= 1; censored
    points sit exactly at ``limit`` and uncensored points lie strictly on the
    observable side of it.
    """

    values: np.ndarray
    censored: np.ndarray
    limit: float
    direction: Direction = Direction.LEFT

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        censored = np.asarray(self.censored, dtype=bool)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "censored", censored)
        object.__setattr__(self, "limit", float(self.limit))
        if values.ndim != 1 or censored.ndim != 1:
            raise LengthMismatchError("values and censored must be 1-d")
        if values.size != censored.size or values.size < 1:
            raise LengthMismatchError(
                f"values (len {values.size}) and censored (len {censored.size}) "
                "must have identical length T >= 1"
            )
        if not np.isfinite(self.limit):
            raise LengthMismatchError("censoring limit must be finite")
        if not np.all(np.isfinite(values)):
            raise LengthMismatchError("series values must be finite")
        at_limit = values[censored]
        clear = values[~censored]
        if at_limit.size and not np.all(at_limit == self.limit):
            raise LengthMismatchError("censored points must sit exactly at the limit")
        if self.direction is Direction.LEFT:
            if clear.size and not np.all(clear > self.limit):
                raise LengthMismatchError(
                    "left censoring requires uncensored values strictly above the limit"
                )
        else:
            if clear.size and not np.all(clear < self.limit):
                raise LengthMismatchError(
                    "right censoring requires uncensored values strictly below the limit"
                )

    def __len__(self) -> int:
        return self.values.size

    @property
    def n_censored(self) -> int:
        return int(self.censored.sum())

    @property
    def censor_rate(self) -> float:
        return self.n_censored / len(self)


def with_intercept(*columns) -> np.ndarray:
    """Stack a leading column of ones with the given regressor columns."""
    cols = [np.asarray(c, dtype=float).ravel() for c in columns]
    if cols:
        t = cols[0].size
        if any(c.size != t for c in cols):
            raise LengthMismatchError("regressor columns differ in length")
        return np.column_stack([np.ones(t)] + cols)
    raise LengthMismatchError("need at least one column; use intercept_design(T)")


def intercept_design(t: int) -> np.ndarray:
    """Design matrix of an intercept-only model: a T x 1 column of ones."""
    if t < 1:
        raise LengthMismatchError("design needs at least one row")
    return np.ones((t, 1))


def validate_design(x: np.ndarray, t: int | None = None) -> np.ndarray:
    """Check the design-matrix contract: 2-d, finite, first column all ones."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 2:
        raise LengthMismatchError("design matrix must be 2-d (T x k)")
    if t is not None and x.shape[0] != t:
        raise LengthMismatchError(
            f"design has {x.shape[0]} rows, series has {t} observations"
        )
    if not np.all(np.isfinite(x)):
        raise LengthMismatchError("design matrix entries must be finite")
    if x.shape[1] < 1 or not np.all(x[:, 0] == 1.0):
        raise LengthMismatchError("first design column must be an all-ones intercept")
    return x


def _companion(rho: np.ndarray) -> np.ndarray:
    p = rho.size
    f = np.zeros((p, p))
    f[0] = rho
    if p > 1:
        f[np.arange(1, p), np.arange(p - 1)] = 1.0
    return f


def _companion_radius(rho: np.ndarray) -> float:
    p = rho.size
    if p == 1:
        return abs(rho[0])
    if p == 2:
        # roots of lambda^2 - rho1*lambda - rho2
        disc = complex(rho[0] * rho[0] + 4.0 * rho[1])
        sq = np.sqrt(disc)
        return max(abs((rho[0] + sq) / 2.0), abs((rho[0] - sq) / 2.0))
    return float(np.max(np.abs(np.linalg.eigvals(_companion(rho)))))


def stationary(rho) -> bool:
    """True iff all roots of 1 - rho_1 z - ... - rho_p z^p lie strictly
    outside the unit circle (companion spectral radius below 1 minus margin).

    Total function: non-finite input simply fails the test. An empty rho
    (p = 0, white noise) is stationary.
    """
    rho = np.atleast_1d(np.asarray(rho, dtype=float))
    if rho.size == 0:
        return True
    if not np.all(np.isfinite(rho)):
        return False
    return _companion_radius(rho) < 1.0 - STATIONARITY_MARGIN


@dataclass(frozen=True)
class ParamDraw:
    """One parameter point (beta, rho, sigma2) with the stationarity invariant."""

    beta: np.ndarray
    rho: np.ndarray
    sigma2: float

    def __post_init__(self):
        object.__setattr__(self, "beta", np.atleast_1d(np.asarray(self.beta, float)))
        object.__setattr__(self, "rho", np.atleast_1d(np.asarray(self.rho, float)))
        object.__setattr__(self, "sigma2", float(self.sigma2))
        if not self.sigma2 > 0:
            raise NonPositiveVarianceError(f"sigma2 must be > 0, got {self.sigma2}")
        if not stationary(self.rho):
            raise NonStationaryError(f"rho {self.rho} outside the stationarity region")

    @property
    def order(self) -> int:
        return self.rho.size


@dataclass(frozen=True)
class ArCovariance:
    """Stationary AR(p) autocovariances scaled to unit innovation variance.

    ``sigma_p`` is the p x p Toeplitz covariance of p consecutive values,
    i.e. the innovation-variance-free head block of the full series
    covariance.
    """

    order: int
    rho: np.ndarray
    gamma: np.ndarray
    sigma_p: np.ndarray

    def extended(self, n: int) -> np.ndarray:
        """Autocovariances gamma_0..gamma_{n-1} via the AR recursion
        gamma_h = rho_1 gamma_{h-1} + ... + rho_p gamma_{h-p}."""
        g = np.zeros(n)
        if n == 0:
            return g
        if self.order == 0:
            g[0] = 1.0
            return g
        m = min(n, self.order)
        g[:m] = self.gamma[:m]
        for h in range(self.order, n):
            g[h] = self.rho @ g[h - self.order : h][::-1]
        return g


def ar_autocovariance(rho) -> ArCovariance:
    """Solve for the stationary autocovariances of an AR(p) with unit
    innovation variance (discrete Lyapunov equation of the companion form).
    """
    rho = np.atleast_1d(np.asarray(rho, dtype=float))
    if not stationary(rho):
        raise NonStationaryError(f"rho {rho} outside the stationarity region")
    p = rho.size
    if p == 0:
        return ArCovariance(0, rho, np.zeros(0), np.zeros((0, 0)))
    if p == 1:
        gamma0 = 1.0 / (1.0 - rho[0] ** 2)
        return ArCovariance(1, rho, np.array([gamma0]), np.array([[gamma0]]))
    if p == 2:
        r1, r2 = rho
        gamma0 = (1.0 - r2) / ((1.0 + r2) * ((1.0 - r2) ** 2 - r1**2))
        gamma1 = r1 * gamma0 / (1.0 - r2)
        gamma = np.array([gamma0, gamma1])
        return ArCovariance(2, rho, gamma, toeplitz(gamma))
    w = np.zeros((p, p))
    w[0, 0] = 1.0
    v = solve_discrete_lyapunov(_companion(rho), w)
    gamma = 0.5 * (v[0] + v[:, 0])
    return ArCovariance(p, rho, gamma, toeplitz(gamma))


@dataclass(frozen=True)
class QTransform:
    """Banded whitening transform for a stationary AR(p).

    Applied to a length-T series it returns iid-innovation residuals: the
    first p entries come from ``head`` (lower triangular, positive diagonal,
    whitening the initial block), the rest are plain AR differences
    ``z_t - rho_1 z_{t-1} - ... - rho_p z_{t-p}``. ``log_abs_det`` is the log
    absolute determinant of the implied T x T matrix, which is the sum of the
    logs of the head diagonal (the remaining rows are unit lower triangular).
    """

    order: int
    head: np.ndarray
    rho: np.ndarray
    log_abs_det: float

    def dense(self, t: int) -> np.ndarray:
        """Materialize the T x T matrix (small-T testing only)."""
        p = self.order
        if t < p:
            raise LengthMismatchError(f"need T >= {p}, got {t}")
        q = np.zeros((t, t))
        q[:p, :p] = self.head
        for row in range(p, t):
            q[row, row] = 1.0
            q[row, row - p : row] = -self.rho[::-1]
        return q


def build_q(rho) -> QTransform:
    """Construct the whitening transform for stationary ``rho``.

    The head block is the unique lower-triangular factor B with positive
    diagonal satisfying B' B = inv(sigma_p), so row t of the head uses only
    the first t series values.
    """
    rho = np.atleast_1d(np.asarray(rho, dtype=float))
    p = rho.size
    if p == 1:
        if not stationary(rho):
            raise NonStationaryError(f"rho {rho} outside the stationarity region")
        q11 = np.sqrt(1.0 - rho[0] ** 2)
        return QTransform(1, np.array([[q11]]), rho, float(np.log(q11)))
    cov = ar_autocovariance(rho)  # raises NonStationaryError
    if p == 0:
        return QTransform(0, np.zeros((0, 0)), rho, 0.0)
    precision = np.linalg.inv(cov.sigma_p)
    precision = 0.5 * (precision + precision.T)
    lower = np.linalg.cholesky(precision)
    # The lower-triangular B with B'B = M is the flipped transpose of the
    # standard Cholesky factor (M is persymmetric, so J M J = M).
    head = lower[::-1, ::-1].T
    log_abs_det = float(np.sum(np.log(np.diag(head))))
    return QTransform(p, head, rho, log_abs_det)


def transform_series(q: QTransform, z: np.ndarray) -> np.ndarray:
    """Apply the whitening transform in O(T p) without the dense matrix."""
    z = np.asarray(z, dtype=float)
    if z.ndim != 1:
        raise LengthMismatchError("series must be 1-d")
    t = z.size
    p = q.order
    if t < p:
        raise LengthMismatchError(f"series length {t} shorter than AR order {p}")
    out = np.empty(t)
    if p:
        out[:p] = q.head @ z[:p]
    tail = z[p:].copy()
    for i in range(1, p + 1):
        tail -= q.rho[i - 1] * z[p - i : t - i]
    out[p:] = tail
    return out


def transform_design(q: QTransform, x: np.ndarray) -> np.ndarray:
    """Whiten every design column, the intercept included.

    Transforming the intercept column exactly (rather than pinning it at
    ones) keeps the coefficient vector's meaning in the untransformed model,
    so the regression intercept stays the process-mean-scale parameter.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 2:
        raise LengthMismatchError("design matrix must be 2-d")
    t = x.shape[0]
    p = q.order
    if t < p:
        raise LengthMismatchError(f"design rows {t} fewer than AR order {p}")
    out = np.empty_like(x)
    if p:
        out[:p] = q.head @ x[:p]
    tail = x[p:].copy()
    for i in range(1, p + 1):
        tail -= q.rho[i - 1] * x[p - i : t - i]
    out[p:] = tail
    return out


def complete_log_likelihood(theta: ParamDraw, z: np.ndarray, x: np.ndarray) -> float:
    """Exact Gaussian log likelihood of the series under (beta, rho, sigma2).

    Evaluated through the whitening transform:
    ``log|Q| - (T/2) log(2 pi sigma2) - (1/(2 sigma2)) sum (z*_t - x*_t beta)^2``,
    which equals the dense multivariate-normal log density with mean
    ``X beta`` and covariance ``sigma2 * Gamma_T``.
    """
    z = np.asarray(z, dtype=float)
    x = np.asarray(x, dtype=float)
    if x.ndim != 2 or x.shape[0] != z.size:
        raise LengthMismatchError("design rows must match series length")
    if theta.beta.size != x.shape[1]:
        raise LengthMismatchError("beta length must match design columns")
    if not theta.sigma2 > 0:
        raise NonPositiveVarianceError("sigma2 must be > 0")
    q = build_q(theta.rho)
    resid = transform_series(q, z) - transform_design(q, x) @ theta.beta
    t = z.size
    return (
        q.log_abs_det
        - 0.5 * t * np.log(2.0 * np.pi * theta.sigma2)
        - 0.5 * float(resid @ resid) / theta.sigma2
    )
