"""Stream determinism and analytic-moment checks for the samplers."""

import mpmath
import numpy as np
import pytest
from scipy.stats import kstest, norm

import censar
from censar.distributions import TAIL_MASS, _std_upper
from censar.errors import InvalidSpecError, NotPositiveDefiniteError


# ------------------------------------------------------------------- streams


def test_stream_determinism():
    a = censar.RngStream(5, 7).generator().standard_normal(64)
    b = censar.RngStream(5, 7).generator().standard_normal(64)
    np.testing.assert_array_equal(a, b)


def test_stream_derivation_stable_and_distinct():
    base = censar.RngStream(5)
    assert base.derive("x", 1) == base.derive("x", 1)
    assert base.derive("x", 1) != base.derive("x", 2)
    assert base.derive("x", 1) != base.derive("y", 1)
    a = base.derive("x", 1).generator().random(16)
    b = base.derive("x", 2).generator().random(16)
    assert not np.allclose(a, b)


def test_stream_rejects_bad_parts():
    with pytest.raises(InvalidSpecError):
        censar.RngStream(1).derive(1.5)


# ------------------------------------------------------------ truncated normal


def _upper_moments(mu, sigma, bound):
    """Analytic mean/variance of N(mu, sigma^2) truncated to (-inf, bound]."""
    alpha = (bound - mu) / sigma
    lam = norm.pdf(alpha) / norm.cdf(alpha)
    mean = mu - sigma * lam
    var = sigma**2 * (1.0 - alpha * lam - lam**2)
    return mean, var


def test_truncnorm_untruncated_limit():
    spec = censar.TruncatedNormalSpec(0.0, 1.0, 1e12, censar.Side.UPPER_BOUNDED)
    gen = censar.RngStream(1).generator()
    draws = censar.sample_truncated_normal(spec, gen, size=100_000)
    assert abs(draws.mean()) < 3.0 / np.sqrt(100_000)


def test_truncnorm_half_normal_mean():
    spec = censar.TruncatedNormalSpec(0.0, 1.0, 0.0, censar.Side.UPPER_BOUNDED)
    gen = censar.RngStream(2).generator()
    draws = censar.sample_truncated_normal(spec, gen, size=100_000)
    se = draws.std(ddof=1) / np.sqrt(draws.size)
    assert draws.mean() == pytest.approx(-np.sqrt(2.0 / np.pi), abs=3 * se)
    assert np.all(draws <= 0.0)


def test_truncnorm_deep_tail_inverse_path():
    # four sigmas below the mean: still inverse-CDF territory, no stalls
    spec = censar.TruncatedNormalSpec(5.0, 2.0, -3.0, censar.Side.UPPER_BOUNDED)
    gen = censar.RngStream(3).generator()
    draws = censar.sample_truncated_normal(spec, gen, size=100_000)
    assert np.all(np.isfinite(draws))
    assert np.all(draws <= -3.0)
    mean, _ = _upper_moments(5.0, 2.0, -3.0)
    se = draws.std(ddof=1) / np.sqrt(draws.size)
    assert draws.mean() == pytest.approx(mean, abs=4 * se)


def test_truncnorm_rejection_tail_path():
    # mass ~ 1e-19 forces the exponential-rejection sampler
    alpha = -9.0
    assert norm.cdf(alpha) < TAIL_MASS
    gen = censar.RngStream(4).generator()
    draws = _std_upper(np.full(50_000, alpha), gen)
    assert np.all(draws <= alpha)
    mean, var = _upper_moments(0.0, 1.0, alpha)
    se = draws.std(ddof=1) / np.sqrt(draws.size)
    assert draws.mean() == pytest.approx(mean, abs=4 * se)
    assert draws.var(ddof=1) == pytest.approx(var, rel=0.1)


@pytest.mark.parametrize("alpha", [-6.0, -2.0, 0.0, 2.0, 6.0])
def test_truncnorm_moments_grid(alpha):
    mu, sigma = 1.3, 0.7
    bound = mu + sigma * alpha
    spec = censar.TruncatedNormalSpec(mu, sigma, bound, censar.Side.UPPER_BOUNDED)
    gen = censar.RngStream(5).derive("grid", str(alpha)).generator()
    draws = censar.sample_truncated_normal(spec, gen, size=100_000)
    mean, var = _upper_moments(mu, sigma, bound)
    n = draws.size
    se_mean = draws.std(ddof=1) / np.sqrt(n)
    centered = (draws - draws.mean()) ** 2
    se_var = centered.std(ddof=1) / np.sqrt(n)
    assert draws.mean() == pytest.approx(mean, abs=4 * se_mean)
    assert draws.var(ddof=1) == pytest.approx(var, abs=4 * se_var)
    assert np.all(draws <= bound)


def test_truncnorm_lower_is_negated_upper():
    gen1 = censar.RngStream(6).generator()
    gen2 = censar.RngStream(6).generator()
    lower = censar.sample_truncated_normal(
        censar.TruncatedNormalSpec(2.0, 1.5, 1.0, censar.Side.LOWER_BOUNDED),
        gen1,
        size=1000,
    )
    upper = censar.sample_truncated_normal(
        censar.TruncatedNormalSpec(-2.0, 1.5, -1.0, censar.Side.UPPER_BOUNDED),
        gen2,
        size=1000,
    )
    np.testing.assert_array_equal(lower, -upper)
    assert np.all(lower >= 1.0)


def test_truncnorm_spec_validation():
    with pytest.raises(InvalidSpecError):
        censar.TruncatedNormalSpec(0.0, 0.0, 1.0)
    with pytest.raises(InvalidSpecError):
        censar.TruncatedNormalSpec(0.0, 1.0, np.inf)


# -------------------------------------------------------------- inverse gamma


def test_inverse_gamma_mean():
    gen = censar.RngStream(7).generator()
    draws = censar.sample_inverse_gamma(3.0, 4.0, gen, size=100_000)
    se = draws.std(ddof=1) / np.sqrt(draws.size)
    assert draws.mean() == pytest.approx(2.0, abs=3 * se)


def test_inverse_gamma_variance():
    shape, rate = 2.5, 1.0
    gen = censar.RngStream(8).generator()
    draws = censar.sample_inverse_gamma(shape, rate, gen, size=100_000)
    target = rate**2 / ((shape - 1.0) ** 2 * (shape - 2.0))
    centered = (draws - draws.mean()) ** 2
    se_var = centered.std(ddof=1) / np.sqrt(draws.size)
    assert draws.var(ddof=1) == pytest.approx(target, abs=4 * se_var)


def test_inverse_gamma_invalid_spec():
    gen = censar.RngStream(9).generator()
    with pytest.raises(InvalidSpecError):
        censar.sample_inverse_gamma(358.0, 0.0, gen)  # zero residual sum
    with pytest.raises(InvalidSpecError):
        censar.sample_inverse_gamma(0.0, 1.0, gen)


# --------------------------------------------------------- multivariate normal


def test_mvn_identity_cov_uncorrelated():
    gen = censar.RngStream(10).generator()
    draws = censar.sample_multivariate_normal([0.0, 0.0], np.eye(2), gen, size=100_000)
    corr = np.corrcoef(draws.T)[0, 1]
    assert abs(corr) < 3.0 / np.sqrt(draws.shape[0])


def test_mvn_covariance_recovery():
    cov = np.array([[2.0, 1.0], [1.0, 2.0]])
    gen = censar.RngStream(11).generator()
    draws = censar.sample_multivariate_normal([1.0, -1.0], cov, gen, size=100_000)
    emp = np.cov(draws.T)
    n = draws.shape[0]
    for i in range(2):
        for j in range(2):
            se = np.sqrt((cov[i, i] * cov[j, j] + cov[i, j] ** 2) / n)
            assert emp[i, j] == pytest.approx(cov[i, j], abs=3 * se)


def test_mvn_1d_matches_scalar_normal():
    gen = censar.RngStream(12).generator()
    draws = censar.sample_multivariate_normal([0.5], [[4.0]], gen, size=10_000)[:, 0]
    stat = kstest(draws, norm(loc=0.5, scale=2.0).cdf)
    assert stat.pvalue > 0.01


def test_mvn_rejects_bad_covariance():
    gen = censar.RngStream(13).generator()
    with pytest.raises(NotPositiveDefiniteError):
        censar.sample_multivariate_normal([0.0, 0.0], [[1.0, 2.0], [2.0, 1.0]], gen)
    with pytest.raises(NotPositiveDefiniteError):
        censar.sample_multivariate_normal([0.0, 0.0], [[1.0, 0.5], [0.1, 1.0]], gen)


# ----------------------------------------------------------------- pdf / cdf


def test_norm_pdf_cdf_values():
    assert censar.norm_cdf(0.0) == 0.5
    assert censar.norm_pdf(0.0) == pytest.approx(0.3989422804014327, abs=1e-12)
    assert censar.norm_cdf(-1.96) == pytest.approx(0.024997895, abs=1e-8)


def test_norm_cdf_accuracy_against_mpmath():
    mpmath.mp.dps = 40
    xs = np.linspace(-8.0, 8.0, 161)
    for x in xs:
        exact = float(mpmath.ncdf(x))
        assert abs(censar.norm_cdf(x) - exact) < 1e-12


def test_norm_cdf_monotone():
    xs = np.linspace(-8.0, 8.0, 4001)
    vals = censar.norm_cdf(xs)
    assert np.all(np.diff(vals) >= 0)
