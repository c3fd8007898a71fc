"""Gibbs sampler with multi-sample data augmentation for censored AR regression.

One sweep updates beta (conjugate normal around the feasible-GLS estimate),
sigma2 (inverse gamma), rho (random-walk Metropolis restricted to the
stationarity region), then rebuilds the augmented series by replacing each
censored point with the average of m truncated-normal draws from its one-step
conditional. Retained draws after burn-in and thinning form the posterior
sample; the final augmented series is returned alongside.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_solve, solve_triangular, toeplitz

from .distributions import (
    RngStream,
    _std_upper_block,
    as_stream,
    sample_inverse_gamma,
)
from .errors import (
    ConfigInvalidError,
    DegenerateResidualError,
    EmptyChainError,
    IndexOutOfRangeError,
    NonStationaryError,
    SingularDesignError,
)
from .model import (
    ArCovariance,
    CensoredSeries,
    Direction,
    ParamDraw,
    ar_autocovariance,
    build_q,
    stationary,
    transform_design,
    transform_series,
    validate_design,
)

MH_TARGET_ACCEPTANCE = 0.3


@dataclass(frozen=True)
class ModelSpec:
    """Model structure to fit: the AR order of the error process."""

    ar_order: int

    def __post_init__(self):
        if self.ar_order < 0:
            raise ConfigInvalidError(f"ar_order must be >= 0, got {self.ar_order}")


@dataclass(frozen=True)
class McmcConfig:
    """Sampler settings.

    Defaults follow the reference setup: 4e4 iterations, half burn-in,
    thinning 20 (1000 retained draws), 5 augmentation draws per censored
    point per sweep.
    """

    iterations: int = 40_000
    burn_in: int = 20_000
    thin: int = 20
    augmentation_samples: int = 5
    mh_step_scale: float = 0.1
    adapt_during_burn_in: bool = True
    seed: RngStream | int = 0

    def __post_init__(self):
        if self.iterations < 1:
            raise ConfigInvalidError("iterations must be >= 1")
        if not 0 <= self.burn_in < self.iterations:
            raise ConfigInvalidError("need 0 <= burn_in < iterations")
        if self.thin < 1:
            raise ConfigInvalidError("thin must be >= 1")
        if self.augmentation_samples < 1:
            raise ConfigInvalidError("augmentation_samples must be >= 1")
        if not self.mh_step_scale > 0:
            raise ConfigInvalidError("mh_step_scale must be > 0")
        if self.retained < 1:
            raise ConfigInvalidError("no retained draws: (iterations - burn_in) // thin < 1")

    @property
    def retained(self) -> int:
        return (self.iterations - self.burn_in) // self.thin


@dataclass(frozen=True)
class Chain:
    """Retained posterior draws plus the final augmented series.

    ``draws`` columns are ordered beta_0..beta_{k-1}, rho_1..rho_p, sigma2.
    ``acceptance_rate`` is the Metropolis acceptance fraction over the
    post-burn-in iterations (0.0 when p = 0, where there is no MH step).
    """

    draws: np.ndarray
    augmented: np.ndarray
    acceptance_rate: float
    config: McmcConfig
    n_regressors: int
    ar_order: int
    param_names: tuple = field(default=())

    def __post_init__(self):
        if not self.param_names:
            names = [f"beta{j}" for j in range(self.n_regressors)]
            names += [f"rho{j + 1}" for j in range(self.ar_order)]
            names.append("sigma2")
            object.__setattr__(self, "param_names", tuple(names))

    @property
    def retained(self) -> int:
        return self.draws.shape[0]

    @property
    def beta_draws(self) -> np.ndarray:
        return self.draws[:, : self.n_regressors]

    @property
    def rho_draws(self) -> np.ndarray:
        return self.draws[:, self.n_regressors : self.n_regressors + self.ar_order]

    @property
    def sigma2_draws(self) -> np.ndarray:
        return self.draws[:, -1]

    def param_draw(self, j: int) -> ParamDraw:
        return ParamDraw(self.beta_draws[j], self.rho_draws[j], self.sigma2_draws[j])


def conditional_mean(theta: ParamDraw, z: np.ndarray, x: np.ndarray, t: int) -> float:
    """One-step conditional mean of z_t given the previous p values:
    ``sum_i rho_i z_{t-i} + (x_t - sum_i rho_i x_{t-i}) beta``.

    Requires a full lag window, i.e. 0-based ``t`` in [p, T).
    """
    z = np.asarray(z, dtype=float)
    x = np.asarray(x, dtype=float)
    p = theta.order
    if not p <= t < z.size:
        raise IndexOutOfRangeError(f"t={t} outside [{p}, {z.size})")
    mu = float(x[t] @ theta.beta)
    for i in range(1, p + 1):
        mu += theta.rho[i - 1] * (z[t - i] - float(x[t - i] @ theta.beta))
    return mu


def one_step_moments(
    theta: ParamDraw,
    z: np.ndarray,
    x: np.ndarray,
    t: int,
    cov: ArCovariance | None = None,
) -> tuple[float, float]:
    """Conditional (mean, variance) of z_t given z_0..z_{t-1}.

    For t >= p this is the AR one-step conditional with innovation variance
    sigma2. Inside the initial block (t < p) the exact Gaussian conditional
    from the stationary p-block covariance is used, falling back to the
    stationary marginal at t = 0.
    """
    p = theta.order
    if t >= p:
        return conditional_mean(theta, z, x, t), theta.sigma2
    if cov is None:
        cov = ar_autocovariance(theta.rho)
    gam = cov.sigma_p
    xb_t = float(x[t] @ theta.beta)
    if t == 0:
        return xb_t, theta.sigma2 * float(gam[0, 0])
    r = gam[t, :t]
    coef = np.linalg.solve(gam[:t, :t], r)
    mean = xb_t + float(coef @ (z[:t] - x[:t] @ theta.beta))
    var = theta.sigma2 * float(gam[t, t] - r @ coef)
    return mean, var


def _beta_from_whitened(
    zs: np.ndarray, xs: np.ndarray, sigma2: float, gen: np.random.Generator
) -> np.ndarray:
    xtx = xs.T @ xs
    try:
        low = np.linalg.cholesky(xtx)
    except np.linalg.LinAlgError as exc:
        raise SingularDesignError("X*'X* is singular") from exc
    beta_hat = cho_solve((low, True), xs.T @ zs, check_finite=False)
    noise = solve_triangular(
        low, gen.standard_normal(beta_hat.size), lower=True, trans="T", check_finite=False
    )
    return beta_hat + np.sqrt(sigma2) * noise


def draw_beta(
    sigma2: float, rho, z: np.ndarray, x: np.ndarray, rng: np.random.Generator
) -> np.ndarray:
    """One draw from the beta full conditional: normal centred at the
    feasible-GLS estimate with covariance sigma2 (X*'X*)^-1."""
    q = build_q(rho)
    return _beta_from_whitened(
        transform_series(q, np.asarray(z, float)),
        transform_design(q, np.asarray(x, float)),
        sigma2,
        rng,
    )


def draw_sigma2(
    beta, rho, z: np.ndarray, x: np.ndarray, rng: np.random.Generator
) -> float:
    """One draw from the sigma2 full conditional: IG(T/2, RSS/2) on the
    whitened residuals."""
    q = build_q(rho)
    resid = transform_series(q, np.asarray(z, float)) - transform_design(
        q, np.asarray(x, float)
    ) @ np.asarray(beta, float)
    rss = float(resid @ resid)
    if rss <= 0:
        raise DegenerateResidualError("whitened residual sum of squares is zero")
    t = resid.size
    return float(sample_inverse_gamma(0.5 * t, 0.5 * rss, rng))


def rho_log_target(rho, beta, sigma2: float, z: np.ndarray, x: np.ndarray) -> float:
    """Log of the rho full conditional up to its normalizing constant:
    log|Q(rho)| - RSS(rho)/(2 sigma2), with the stationarity indicator
    handled by the caller."""
    q = build_q(rho)
    resid = transform_series(q, z) - transform_design(q, x) @ beta
    return q.log_abs_det - 0.5 * float(resid @ resid) / sigma2


def draw_rho(
    beta,
    sigma2: float,
    rho_current,
    z: np.ndarray,
    x: np.ndarray,
    rng: np.random.Generator,
    step_scale: float = 0.1,
    proposal: np.ndarray | None = None,
) -> tuple[np.ndarray, bool]:
    """One random-walk Metropolis step on rho within the stationarity region.

    Proposals outside the region are rejected outright. The acceptance ratio
    is the likelihood ratio: the |Q| determinants do not cancel, the sigma2
    powers and 2-pi factors do. ``proposal`` overrides the random-walk
    proposal (testing hook).
    """
    rho_current = np.atleast_1d(np.asarray(rho_current, dtype=float))
    if not stationary(rho_current):
        raise NonStationaryError("current rho outside the stationarity region")
    z = np.asarray(z, dtype=float)
    x = np.asarray(x, dtype=float)
    beta = np.asarray(beta, dtype=float)
    if proposal is None:
        proposal = rho_current + step_scale * rng.standard_normal(rho_current.size)
    else:
        proposal = np.atleast_1d(np.asarray(proposal, dtype=float))
    if not stationary(proposal):
        return rho_current.copy(), False
    log_ratio = rho_log_target(proposal, beta, sigma2, z, x) - rho_log_target(
        rho_current, beta, sigma2, z, x
    )
    if np.log(max(rng.random(), 1e-300)) < log_ratio:
        return proposal, True
    return rho_current.copy(), False


class _AugmentPlan:
    """Dependency waves over the censored points.

    A censored point depends on censored points at most p steps behind it;
    all points whose dependencies are already updated can be imputed in one
    vectorized batch. Wave order reproduces the ascending-t sweep exactly.
    """

    def __init__(self, censored: np.ndarray, p: int):
        idx = np.flatnonzero(censored)
        wave = np.full(censored.size, -1, dtype=int)
        for t in idx:
            w = 0
            for j in range(1, p + 1):
                s = t - j
                if s >= 0 and censored[s]:
                    w = max(w, wave[s] + 1)
            wave[t] = w
        self.waves: list[tuple[np.ndarray, np.ndarray]] = []
        for w in range(wave.max() + 1 if idx.size else 0):
            members = idx[wave[idx] == w]
            self.waves.append((members[members < p], members[members >= p]))


def _augment(
    beta: np.ndarray,
    rho: np.ndarray,
    sigma2: float,
    z_prev: np.ndarray,
    x: np.ndarray,
    series: CensoredSeries,
    m: int,
    gen: np.random.Generator,
    plan: _AugmentPlan,
    cov: ArCovariance,
) -> np.ndarray:
    z = z_prev.copy()
    limit = series.limit
    upper = series.direction is Direction.LEFT
    sig = np.sqrt(sigma2)
    p = rho.size
    xb = x @ beta
    theta = None
    for early, late in plan.waves:
        for t in early:
            if theta is None:
                theta = ParamDraw(beta, rho, sigma2)
            mean, var = one_step_moments(theta, z, x, int(t), cov=cov)
            sd = np.sqrt(var)
            alpha = np.array([(limit - mean) / sd if upper else (mean - limit) / sd])
            std = _std_upper_block(alpha, m, gen).mean()
            z[t] = mean + sd * std if upper else mean - sd * std
        if late.size:
            mu = xb[late].copy()
            for i in range(1, p + 1):
                mu += rho[i - 1] * (z[late - i] - xb[late - i])
            alpha = (limit - mu) / sig if upper else (mu - limit) / sig
            std = _std_upper_block(alpha, m, gen).mean(axis=1)
            z[late] = mu + sig * std if upper else mu - sig * std
    return z


def augment_once(
    theta: ParamDraw,
    z_prev: np.ndarray,
    x: np.ndarray,
    series: CensoredSeries,
    m: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """Rebuild the augmented series for one sweep.

    Censored points become the average of m truncated-normal draws from
    their one-step conditional (already-updated lags feed later points);
    uncensored points are reset to the recorded values.
    """
    if m < 1:
        raise ConfigInvalidError("augmentation sample count m must be >= 1")
    z_prev = np.asarray(z_prev, dtype=float).copy()
    z_prev[~series.censored] = series.values[~series.censored]
    plan = _AugmentPlan(series.censored, theta.order)
    cov = ar_autocovariance(theta.rho)
    return _augment(
        theta.beta, theta.rho, theta.sigma2, z_prev, np.asarray(x, float),
        series, m, rng, plan, cov,
    )


def yule_walker(resid: np.ndarray, p: int) -> np.ndarray:
    """Yule-Walker AR(p) fit to a residual series, shrunk toward zero until
    it lies inside the stationarity region."""
    if p == 0:
        return np.zeros(0)
    e = np.asarray(resid, dtype=float)
    e = e - e.mean()
    t = e.size
    c = np.array([e[: t - h] @ e[h:] for h in range(p + 1)]) / t
    if not c[0] > 0:
        return np.zeros(p)
    try:
        rho = np.linalg.solve(toeplitz(c[:p]), c[1 : p + 1])
    except np.linalg.LinAlgError:
        return np.zeros(p)
    for _ in range(600):
        if stationary(rho):
            return rho
        rho = 0.95 * rho
    return np.zeros(p)


def fgls_init(y: np.ndarray, x: np.ndarray, p: int) -> ParamDraw:
    """Two-pass feasible-GLS starting point: OLS residuals give a Yule-Walker
    rho, then whitened OLS gives beta and sigma2."""
    y = np.asarray(y, dtype=float)
    x = np.asarray(x, dtype=float)
    beta0, *_ = np.linalg.lstsq(x, y, rcond=None)
    rho = yule_walker(y - x @ beta0, p)
    q = build_q(rho)
    ys = transform_series(q, y)
    xs = transform_design(q, x)
    beta, *_ = np.linalg.lstsq(xs, ys, rcond=None)
    r = ys - xs @ beta
    dof = max(y.size - x.shape[1], 1)
    sigma2 = max(float(r @ r) / dof, 1e-12)
    return ParamDraw(beta, rho, sigma2)


def run_gda_msm(
    series: CensoredSeries,
    x: np.ndarray,
    model: ModelSpec,
    config: McmcConfig,
) -> Chain:
    """Run the full sampler and return the retained chain.

    Initializes at the feasible-GLS fit treating censored values as observed,
    sets the augmented series to the recorded one, and sweeps
    beta -> sigma2 -> rho -> augmentation for ``config.iterations``
    iterations. The Metropolis step scale is adapted toward 30% acceptance
    during burn-in (Robbins-Monro on its log) and frozen afterwards.
    """
    x = validate_design(x, len(series))
    p = model.ar_order
    t_len = len(series)
    k = x.shape[1]
    if t_len <= p + k:
        raise ConfigInvalidError(f"need T > p + k, got T={t_len}, p={p}, k={k}")
    if bool(series.censored.all()):
        raise ConfigInvalidError("every point is censored: nothing anchors the likelihood")

    gen = as_stream(config.seed).derive("gibbs").generator()

    theta0 = fgls_init(series.values, x, p)
    beta, rho, sigma2 = theta0.beta, theta0.rho, theta0.sigma2
    z = series.values.astype(float).copy()
    plan = _AugmentPlan(series.censored, p)

    q = build_q(rho)
    xs = transform_design(q, x)
    cov = ar_autocovariance(rho)

    n_keep = config.retained
    draws = np.empty((n_keep, k + p + 1))
    kept = 0
    log_s = np.log(config.mh_step_scale)
    accepted_post = 0
    m = config.augmentation_samples

    for i in range(1, config.iterations + 1):
        zs = transform_series(q, z)
        beta = _beta_from_whitened(zs, xs, sigma2, gen)
        resid = zs - xs @ beta
        rss = float(resid @ resid)
        if rss <= 0:
            raise DegenerateResidualError("whitened residual sum of squares is zero")
        sigma2 = float(sample_inverse_gamma(0.5 * t_len, 0.5 * rss, gen))

        accepted = False
        if p:
            prop = rho + np.exp(log_s) * gen.standard_normal(p)
            if stationary(prop):
                q_prop = build_q(prop)
                xs_prop = transform_design(q_prop, x)
                resid_prop = transform_series(q_prop, z) - xs_prop @ beta
                rss_prop = float(resid_prop @ resid_prop)
                log_ratio = (q_prop.log_abs_det - q.log_abs_det) - 0.5 * (
                    rss_prop - rss
                ) / sigma2
                alpha = np.exp(min(0.0, log_ratio))
                if gen.random() < alpha:
                    rho, q, xs = prop, q_prop, xs_prop
                    cov = ar_autocovariance(rho)
                    accepted = True
            else:
                alpha = 0.0
            if config.adapt_during_burn_in and i <= config.burn_in:
                log_s += (alpha - MH_TARGET_ACCEPTANCE) / i**0.6

        z = _augment(beta, rho, sigma2, z, x, series, m, gen, plan, cov)

        if i > config.burn_in:
            if accepted:
                accepted_post += 1
            if (i - config.burn_in) % config.thin == 0 and kept < n_keep:
                draws[kept, :k] = beta
                draws[kept, k : k + p] = rho
                draws[kept, -1] = sigma2
                kept += 1

    acceptance = accepted_post / max(config.iterations - config.burn_in, 1)
    return Chain(
        draws=draws,
        augmented=z,
        acceptance_rate=acceptance,
        config=config,
        n_regressors=k,
        ar_order=p,
    )


@dataclass(frozen=True)
class ParamSummary:
    mean: float
    median: float
    sd: float
    hpd95: tuple


def hpd_interval(draws: np.ndarray, prob: float = 0.95) -> tuple:
    """Shortest contiguous interval of sorted draws containing ceil(prob*M)
    of them (ties broken toward the earliest window)."""
    s = np.sort(np.asarray(draws, dtype=float))
    m = s.size
    if m < 2:
        raise EmptyChainError("need at least 2 draws for an HPD interval")
    w = int(np.ceil(prob * m))
    if w >= m:
        return float(s[0]), float(s[-1])
    spans = s[w - 1 :] - s[: m - w + 1]
    i = int(np.argmin(spans))
    return float(s[i]), float(s[i + w - 1])


def posterior_summary(chain: Chain) -> dict:
    """Per-parameter mean, median, standard deviation, and 95% HPD interval."""
    if chain.retained < 2:
        raise EmptyChainError("need at least 2 retained draws")
    out = {}
    for name, col in zip(chain.param_names, chain.draws.T):
        out[name] = ParamSummary(
            mean=float(col.mean()),
            median=float(np.median(col)),
            sd=float(col.std(ddof=1)),
            hpd95=hpd_interval(col, 0.95),
        )
    return out
