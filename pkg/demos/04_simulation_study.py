"""A miniature replication study.

The full design crosses 3 models x 6 correlations x 3 censoring rates x
3 sample sizes with 100 replications per cell (censar.table_grid()); that is
an offline run. Here: two cells, a few replications, desk-scale chains, and
the same summary table layout (mean over replications with its spread).
"""

import censar

scenarios = [
    censar.Scenario("M2", rho1=0.48, censor_rate=0.20, sample_size=200,
                    replications=4, seed=99),
    censar.Scenario("M1", rho1=-0.48, censor_rate=0.05, sample_size=200,
                    replications=4, seed=99),
]

mcmc = censar.McmcConfig(iterations=6_000, burn_in=3_000, thin=3)
table = censar.run_study(scenarios, mcmc=mcmc, jobs=2)

print(censar.study_markdown(table))
print("truth: M2 = (beta0 2, beta1 1, sigma2 2), M1 = (beta0 2, sigma2 2); "
      "rho as listed per block")
print("\nraw table columns:", ", ".join(table.columns))
