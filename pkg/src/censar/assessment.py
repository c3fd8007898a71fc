"""Model checking and selection on augmented data.

Leave-future-out one-step residuals: fit once on the full censored series to
get an augmented series z, then refit on expanding prefixes of the raw data
and standardize z_{t+1} against the posterior-predictive mean and variance.
The sum of squared residuals (SSJR), DIC, and WAIC (with its effective
parameter count pw) compare competing AR orders.
"""

from __future__ import annotations

import concurrent.futures
import csv
import json
from dataclasses import dataclass, replace

import numpy as np
from scipy.special import logsumexp

from .distributions import as_stream
from .errors import (
    DegenerateVarianceError,
    EmptyChainError,
    IndexOutOfRangeError,
    NonStationaryMeanError,
    NumericalUnderflowError,
    TrainingTooSmallError,
)
from .model import (
    CensoredSeries,
    ParamDraw,
    ar_autocovariance,
    build_q,
    complete_log_likelihood,
    stationary,
    transform_design,
    transform_series,
    validate_design,
)
from .sampler import Chain, McmcConfig, ModelSpec, one_step_moments, run_gda_msm

#: Shortened chain used for each LFO-CV refit.
DEFAULT_REFIT_CONFIG = dict(iterations=5_000, burn_in=2_500, thin=5)


def predictive_moments(
    chain: Chain, z: np.ndarray, x: np.ndarray, t: int, rng: np.random.Generator
) -> tuple[float, float]:
    """Sample mean and variance (M-1 divisor) of one simulated next value per
    retained draw: z^(j) ~ N(mu_t(theta_j), sigma2_j) with mu_t the one-step
    conditional mean on the supplied history."""
    m = chain.retained
    if m < 2:
        raise EmptyChainError("need at least 2 retained draws")
    z = np.asarray(z, dtype=float)
    x = np.asarray(x, dtype=float)
    if not 0 <= t < x.shape[0]:
        raise IndexOutOfRangeError(f"t={t} outside [0, {x.shape[0]})")
    p = chain.ar_order
    betas = chain.beta_draws
    sig2 = chain.sigma2_draws
    if t >= p:
        xb_t = betas @ x[t]
        if p:
            rhos = chain.rho_draws
            zlags = z[t - p : t][::-1]
            xb_lags = betas @ x[t - p : t][::-1].T
            mu = xb_t + np.einsum("mp,mp->m", rhos, zlags[None, :] - xb_lags)
        else:
            mu = xb_t
        var = sig2
    else:
        mu = np.empty(m)
        var = np.empty(m)
        for j in range(m):
            mu[j], var[j] = one_step_moments(chain.param_draw(j), z, x, t)
    sims = mu + np.sqrt(var) * rng.standard_normal(m)
    return float(sims.mean()), float(sims.var(ddof=1))


@dataclass(frozen=True)
class JackknifeResult:
    residuals: np.ndarray
    indices: np.ndarray
    residual_mean: float
    residual_var: float
    ssjr: float
    training_size: int


def _prefix_series(series: CensoredSeries, rt: int) -> CensoredSeries:
    return CensoredSeries(
        series.values[:rt], series.censored[:rt], series.limit, series.direction
    )


def _fit_prefix(args):
    series, x, model, cfg, rt = args
    return rt, run_gda_msm(_prefix_series(series, rt), x[:rt], model, cfg)


def jackknife_residuals(
    series: CensoredSeries,
    x: np.ndarray,
    model: ModelSpec,
    config: McmcConfig,
    n: int,
    refit_stride: int = 1,
    refit_config: McmcConfig | None = None,
    jobs: int = 1,
    full_chain: Chain | None = None,
) -> JackknifeResult:
    """Leave-future-out one-step residuals for predicted indices n..T-1.

    Refits happen at n, n+stride, ...; between refit points the latest fit is
    carried forward, so every index still gets a residual. Refits across
    prefixes are independent and can run in parallel without changing any
    value (streams are keyed by the prefix length).
    """
    t_len = len(series)
    p = model.ar_order
    if not p < n < t_len:
        raise TrainingTooSmallError(f"need p < n < T, got p={p}, n={n}, T={t_len}")
    if refit_stride < 1:
        raise TrainingTooSmallError("refit_stride must be >= 1")
    x = validate_design(x, t_len)
    if full_chain is None:
        full_chain = run_gda_msm(series, x, model, config)
    z = full_chain.augmented
    base = as_stream(config.seed)
    if refit_config is None:
        refit_config = replace(config, **DEFAULT_REFIT_CONFIG)

    refit_points = list(range(n, t_len, refit_stride))
    tasks = [
        (series, x, model, replace(refit_config, seed=base.derive("lfo-refit", rt)), rt)
        for rt in refit_points
    ]
    if jobs > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
            fits = dict(pool.map(_fit_prefix, tasks))
    else:
        fits = dict(map(_fit_prefix, tasks))

    indices = np.arange(n, t_len)
    residuals = np.empty(indices.size)
    for pos, tau in enumerate(indices):
        rt = n + refit_stride * ((tau - n) // refit_stride)
        gen = base.derive("lfo-predict", int(tau)).generator()
        mean, var = predictive_moments(fits[rt], z, x, int(tau), gen)
        if var < 1e-12:
            raise DegenerateVarianceError(
                f"predictive variance {var} at t={tau} too small to standardize"
            )
        residuals[pos] = (z[tau] - mean) / np.sqrt(var)
    return JackknifeResult(
        residuals=residuals,
        indices=indices,
        residual_mean=float(residuals.mean()),
        residual_var=float(residuals.var(ddof=1)),
        ssjr=float(residuals @ residuals),
        training_size=n,
    )


def _central_theta(chain: Chain) -> tuple[ParamDraw, tuple]:
    """Posterior center: per-parameter mean, switching to the median where
    |skewness| > 1; rho projected into the stationarity region by shrinking."""
    draws = chain.draws
    means = draws.mean(axis=0)
    if draws.shape[0] >= 3:
        medians = np.median(draws, axis=0)
        centered = draws - means
        sd = draws.std(axis=0, ddof=0)
        m3 = (centered**3).mean(axis=0)
        skewness = np.divide(m3, sd**3, out=np.zeros_like(m3), where=sd > 0)
        use_median = np.abs(skewness) > 1.0
        center = np.where(use_median, medians, means)
        rule = tuple("median" if u else "mean" for u in use_median)
    else:
        center = means
        rule = tuple("mean" for _ in means)
    k, p = chain.n_regressors, chain.ar_order
    rho_hat = center[k : k + p]
    for _ in range(600):
        if stationary(rho_hat):
            break
        rho_hat = 0.98 * rho_hat
    else:
        raise NonStationaryMeanError("could not project central rho into the region")
    return ParamDraw(center[:k], rho_hat, center[-1]), rule


def dic(chain: Chain, z: np.ndarray, x: np.ndarray) -> float:
    """Deviance information criterion from the retained draws:
    -4 * mean log-likelihood + 2 * log-likelihood at the posterior center,
    with the augmented series standing in for the data."""
    if chain.retained < 1:
        raise EmptyChainError("chain has no retained draws")
    z = np.asarray(z, dtype=float)
    x = np.asarray(x, dtype=float)
    ll = np.array(
        [
            complete_log_likelihood(chain.param_draw(j), z, x)
            for j in range(chain.retained)
        ]
    )
    theta_hat, _ = _central_theta(chain)
    return -4.0 * float(ll.mean()) + 2.0 * complete_log_likelihood(theta_hat, z, x)


def pointwise_log_likelihood(chain: Chain, z: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Per-draw, per-observation one-step conditional log densities (M x T).

    For t >= p these are the whitened-residual normal densities with
    innovation variance sigma2; the first p points use the exact conditional
    from the stationary block covariance. Rows sum to the joint
    log-likelihood.
    """
    if chain.retained < 1:
        raise EmptyChainError("chain has no retained draws")
    z = np.asarray(z, dtype=float)
    x = np.asarray(x, dtype=float)
    t_len = z.size
    p = chain.ar_order
    out = np.empty((chain.retained, t_len))
    log2pi = np.log(2.0 * np.pi)
    for j in range(chain.retained):
        theta = chain.param_draw(j)
        q = build_q(theta.rho)
        resid = transform_series(q, z) - transform_design(q, x) @ theta.beta
        out[j, p:] = -0.5 * (log2pi + np.log(theta.sigma2)) - 0.5 * resid[p:] ** 2 / theta.sigma2
        if p:
            cov = ar_autocovariance(theta.rho)
            for t in range(p):
                mean, var = one_step_moments(theta, z, x, t, cov=cov)
                out[j, t] = -0.5 * (log2pi + np.log(var)) - 0.5 * (z[t] - mean) ** 2 / var
    return out


def waic(chain: Chain, z: np.ndarray, x: np.ndarray) -> tuple[float, float]:
    """Widely applicable information criterion and its pw correction.

    waic = -2 sum_t log mean_j f(z_t | theta_j) + 2 pw, with
    pw = -2 sum_t (mean_j log f - log mean_j f), both stabilized via
    log-sum-exp. pw is nonnegative up to roundoff.
    """
    ll = pointwise_log_likelihood(chain, z, x)
    m = ll.shape[0]
    lse = logsumexp(ll, axis=0) - np.log(m)
    if not np.all(np.isfinite(lse)):
        raise NumericalUnderflowError("per-observation predictive density underflowed")
    pw = 2.0 * float(np.sum(lse - ll.mean(axis=0)))
    return -2.0 * float(lse.sum()) + 2.0 * pw, pw


@dataclass(frozen=True)
class AssessmentReport:
    """Jackknife residual summary plus the information criteria."""

    residuals: np.ndarray
    indices: np.ndarray
    residual_mean: float
    residual_var: float
    ssjr: float
    dic: float
    waic: float
    pw: float
    training_size: int
    dic_center: tuple

    def to_dict(self) -> dict:
        return {
            "schema_version": 1,
            "training_size": self.training_size,
            "n_residuals": int(self.residuals.size),
            "residual_mean": self.residual_mean,
            "residual_var": self.residual_var,
            "ssjr": self.ssjr,
            "dic": self.dic,
            "waic": self.waic,
            "pw": self.pw,
            "dic_center": list(self.dic_center),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def write_residual_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            fh.write("# schema: censar/residuals v1\n")
            writer = csv.writer(fh)
            writer.writerow(["t", "residual"])
            for t, d in zip(self.indices, self.residuals):
                writer.writerow([int(t), repr(float(d))])


def assess(
    series: CensoredSeries,
    x: np.ndarray,
    model: ModelSpec,
    config: McmcConfig,
    n: int,
    refit_stride: int = 1,
    refit_config: McmcConfig | None = None,
    jobs: int = 1,
) -> AssessmentReport:
    """Full assessment: fit, LFO-CV residuals, DIC and WAIC on augmented data."""
    x = validate_design(x, len(series))
    full_chain = run_gda_msm(series, x, model, config)
    jk = jackknife_residuals(
        series,
        x,
        model,
        config,
        n,
        refit_stride=refit_stride,
        refit_config=refit_config,
        jobs=jobs,
        full_chain=full_chain,
    )
    z = full_chain.augmented
    dic_value = dic(full_chain, z, x)
    _, center_rule = _central_theta(full_chain)
    waic_value, pw = waic(full_chain, z, x)
    return AssessmentReport(
        residuals=jk.residuals,
        indices=jk.indices,
        residual_mean=jk.residual_mean,
        residual_var=jk.residual_var,
        ssjr=jk.ssjr,
        dic=dic_value,
        waic=waic_value,
        pw=pw,
        training_size=n,
        dic_center=center_rule,
    )
