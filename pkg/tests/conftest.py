import numpy as np
import pytest

import censar


def pacf_to_ar(pac):
    """Map partial autocorrelations in (-1, 1) to stationary AR coefficients
    (Levinson-Durbin recursion); independent stationary-rho generator."""
    pac = np.asarray(pac, dtype=float)
    p = pac.size
    phi = np.zeros((p, p))
    for k in range(p):
        phi[k, k] = pac[k]
        for j in range(k):
            phi[k, j] = phi[k - 1, j] - pac[k] * phi[k - 1, k - 1 - j]
    return phi[p - 1, :p].copy()


def random_stationary_rho(rng, p, max_pac=0.9):
    return pacf_to_ar(rng.uniform(-max_pac, max_pac, size=p))


def yule_walker_autocov_oracle(rho, n):
    """Autocovariances (unit innovation variance) from the explicit
    Yule-Walker linear system plus the extension recursion."""
    rho = np.asarray(rho, dtype=float)
    p = rho.size
    if p == 0:
        out = np.zeros(n)
        out[0] = 1.0
        return out
    a = np.zeros((p + 1, p + 1))
    for h in range(p + 1):
        a[h, h] += 1.0
        for i in range(1, p + 1):
            a[h, abs(h - i)] -= rho[i - 1]
    b = np.zeros(p + 1)
    b[0] = 1.0
    g = np.linalg.solve(a, b)
    out = np.zeros(max(n, p + 1))
    out[: p + 1] = g
    for h in range(p + 1, n):
        out[h] = rho @ out[h - p : h][::-1]
    return out[:n]


@pytest.fixture(scope="session")
def desk_chain():
    """One moderately sized censored fit shared across test modules:
    M2-style data, 20% left censoring, paper-style thinning."""
    scen = censar.Scenario("M2", 0.48, 0.20, 240, replications=1, seed=314)
    stream = censar.RngStream(314).derive("replication", scen.label, 0)
    series, x, w = censar.simulate(scen, stream)
    cfg = censar.McmcConfig(
        iterations=20_000, burn_in=10_000, thin=20, seed=stream.derive("chain")
    )
    chain = censar.run_gda_msm(series, x, censar.ModelSpec(1), cfg)
    return series, x, chain
