"""Synthetic censored AR(1) regression scenarios and the replication harness.

Three parameter sets are studied (M1 intercept-only, M2 with one standard
normal covariate, M3 a small-signal variant), crossed with lag-1 correlations
{-0.8, -0.48, -0.15, 0.15, 0.48, 0.8}, censoring rates {5%, 20%, 40%} and
sample sizes {100, 500, 1000}. The censoring limit is set to the empirical
quantile of the latent path, so every realization hits the target censoring
fraction to within one observation.
"""

from __future__ import annotations

import concurrent.futures
import json
from dataclasses import asdict, dataclass, replace

import numpy as np
import pandas as pd
from scipy.signal import lfilter

from .distributions import RngStream, as_stream
from .errors import InvalidScenarioError
from .model import CensoredSeries, Direction
from .sampler import McmcConfig, ModelSpec, run_gda_msm

#: (beta..., sigma2) per study model; M1 carries no covariate.
MODEL_PARAMS = {
    "M1": ((2.0,), 2.0),
    "M2": ((2.0, 1.0), 2.0),
    "M3": ((0.2, 0.4), 0.607),
}
RHO_GRID = (-0.8, -0.48, -0.15, 0.15, 0.48, 0.8)
CENSOR_GRID = (0.05, 0.20, 0.40)
SIZE_GRID = (100, 500, 1000)


@dataclass(frozen=True)
class Scenario:
    """One cell of the study design (any sample size / censoring in [0, 1))."""

    model: str
    rho1: float
    censor_rate: float
    sample_size: int
    replications: int = 100
    seed: int = 0

    def __post_init__(self):
        if self.model not in MODEL_PARAMS:
            raise InvalidScenarioError(f"unknown model {self.model!r}")
        if not abs(self.rho1) < 1.0:
            raise InvalidScenarioError(f"rho1={self.rho1} is not stationary")
        if not 0.0 <= self.censor_rate < 1.0:
            raise InvalidScenarioError("censor_rate must lie in [0, 1)")
        if self.sample_size < 10:
            raise InvalidScenarioError("sample_size must be at least 10")
        if self.replications < 1:
            raise InvalidScenarioError("need at least one replication")

    @property
    def beta(self) -> np.ndarray:
        return np.asarray(MODEL_PARAMS[self.model][0])

    @property
    def sigma2(self) -> float:
        return MODEL_PARAMS[self.model][1]

    @property
    def label(self) -> str:
        return (
            f"{self.model}_rho{self.rho1:+.2f}_cen{int(round(100 * self.censor_rate))}"
            f"_n{self.sample_size}"
        )


def table_grid(seed: int = 0, replications: int = 100) -> list:
    """The full 162-cell design (3 models x 6 rho x 3 censor x 3 sizes)."""
    return [
        Scenario(m, r, c, n, replications=replications, seed=seed)
        for m in MODEL_PARAMS
        for r in RHO_GRID
        for c in CENSOR_GRID
        for n in SIZE_GRID
    ]


def simulate(scenario: Scenario, rng) -> tuple:
    """Generate one realization: (censored series, design matrix, latent w).

    Covariates come from a stream keyed only by (scenario seed, model, size),
    so they are shared across replications of a scenario; the AR path and
    innovations come from ``rng``. The AR recursion starts from its
    stationary distribution and discards 500 burn-in steps.
    """
    stream = as_stream(rng)
    gen = stream.generator()
    t_len = scenario.sample_size
    beta = scenario.beta
    sigma = np.sqrt(scenario.sigma2)
    rho1 = scenario.rho1

    if beta.size == 1:
        x = np.ones((t_len, 1))
    else:
        xgen = (
            RngStream(scenario.seed)
            .derive("covariates", scenario.model, t_len)
            .generator()
        )
        x = np.column_stack([np.ones(t_len), xgen.standard_normal(t_len)])

    gamma0 = 1.0 / (1.0 - rho1**2)
    u_init = gen.normal(0.0, sigma * np.sqrt(gamma0))
    eps = sigma * gen.standard_normal(500 + t_len)
    u_full, _ = lfilter([1.0], [1.0, -rho1], eps, zi=np.array([rho1 * u_init]))
    u = u_full[500:]
    w = x @ beta + u

    n_cens = int(round(scenario.censor_rate * t_len))
    n_cens = min(n_cens, t_len - 1)
    if n_cens <= 0:
        limit = float(w.min()) - 1.0
        censored = np.zeros(t_len, dtype=bool)
        y = w.copy()
    else:
        limit = float(np.sort(w)[n_cens - 1])
        censored = w <= limit
        y = np.where(censored, limit, w)
    series = CensoredSeries(y, censored, limit, Direction.LEFT)
    return series, x, w


def _replication_task(args):
    index, scenario, rep, mcmc = args
    stream = RngStream(scenario.seed).derive("replication", scenario.label, rep)
    try:
        series, x, _ = simulate(scenario, stream)
        cfg = replace(mcmc, seed=stream.derive("chain"))
        chain = run_gda_msm(series, x, ModelSpec(1), cfg)
        means = dict(zip(chain.param_names, chain.draws.mean(axis=0)))
        return index, rep, means, None
    except Exception as exc:  # recorded per cell, never fatal
        return index, rep, None, f"{type(exc).__name__}: {exc}"


def run_study(
    scenarios, mcmc: McmcConfig | None = None, jobs: int = 1
) -> pd.DataFrame:
    """Run every scenario's replications and summarize posterior means.

    Each row of the result holds, per parameter, the mean and standard
    deviation (over replications) of the posterior means, plus a failure
    count and the first failure message if any replication errored. Results
    are independent of ``jobs``.
    """
    scenarios = list(scenarios)
    if not scenarios:
        raise InvalidScenarioError("no scenarios given")
    if mcmc is None:
        mcmc = McmcConfig()
    tasks = [
        (i, s, r, mcmc) for i, s in enumerate(scenarios) for r in range(s.replications)
    ]
    if jobs > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_replication_task, tasks))
    else:
        results = list(map(_replication_task, tasks))
    results.sort(key=lambda r: (r[0], r[1]))

    rows = []
    for i, scenario in enumerate(scenarios):
        collected: dict[str, list] = {}
        failures = []
        for index, rep, means, err in results:
            if index != i:
                continue
            if err is not None:
                failures.append(f"rep {rep}: {err}")
                continue
            for name, value in means.items():
                collected.setdefault(name, []).append(value)
        row: dict = {
            "model": scenario.model,
            "rho1": scenario.rho1,
            "censor_rate": scenario.censor_rate,
            "sample_size": scenario.sample_size,
            "replications": scenario.replications,
            "failures": len(failures),
            "failure_detail": failures[0] if failures else "",
        }
        for name, values in collected.items():
            arr = np.asarray(values)
            row[f"{name}_mean"] = float(arr.mean())
            row[f"{name}_sd"] = float(arr.std(ddof=1)) if arr.size > 1 else 0.0
        rows.append(row)
    return pd.DataFrame(rows)


def study_markdown(table: pd.DataFrame) -> str:
    """Render the study summary as a markdown table, one block per
    (model, rho1), cells formatted mean (sd)."""
    lines = []
    for (model, rho1), block in table.groupby(["model", "rho1"], sort=True):
        params = sorted(
            {c[: -len("_mean")] for c in block.columns if c.endswith("_mean")},
            key=_param_order,
        )
        lines.append(f"### {model}, rho1 = {rho1}")
        lines.append("")
        header = ["n", "% cens"] + params + ["failures"]
        lines.append("| " + " | ".join(header) + " |")
        lines.append("|" + "---|" * len(header))
        block = block.sort_values(["sample_size", "censor_rate"])
        for _, row in block.iterrows():
            cells = [str(int(row["sample_size"])), f"{100 * row['censor_rate']:.0f}%"]
            for name in params:
                mean = row.get(f"{name}_mean")
                sd = row.get(f"{name}_sd")
                if mean is None or pd.isna(mean):
                    cells.append("-")
                else:
                    cells.append(f"{mean:.3f} ({sd:.3f})")
            cells.append(str(int(row["failures"])))
            lines.append("| " + " | ".join(cells) + " |")
        lines.append("")
    return "\n".join(lines)


def _param_order(name: str) -> tuple:
    for prefix, rank in (("beta", 0), ("rho", 1), ("sigma", 2)):
        if name.startswith(prefix):
            suffix = name[len(prefix) :]
            return rank, int(suffix) if suffix.isdigit() else 0
    return 3, 0


def save_scenarios(scenarios, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump([asdict(s) for s in scenarios], fh, indent=2, sort_keys=True)


def load_scenarios(path) -> list:
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    if not isinstance(raw, list):
        raise InvalidScenarioError("scenario file must hold a JSON list")
    return [Scenario(**item) for item in raw]
