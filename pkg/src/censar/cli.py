"""Command-line front end: simulate | fit | assess | study.

Every run writes a manifest (resolved options, seed, package version) next to
its outputs, so any emitted file can be reproduced exactly. Exit codes:
0 success, 1 argument errors, 2 I/O errors, 3 numerical failures.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .assessment import assess
from .diagnostics import acf, geweke
from .distributions import RngStream
from .errors import CensarError
from .model import CensoredSeries, Direction
from .sampler import McmcConfig, ModelSpec, posterior_summary, run_gda_msm
from .simstudy import Scenario, load_scenarios, run_study, simulate, study_markdown

DATA_SCHEMA = "censar/data v1"
DRAWS_SCHEMA = "censar/draws v1"
AUGMENTED_SCHEMA = "censar/augmented v1"
META_SCHEMA = "censar/meta v1"


class UsageError(Exception):
    """Bad arguments or option values; maps to exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


DEFAULTS = {
    "simulate": {
        "model": "M2",
        "rho": 0.48,
        "n": 500,
        "censor": 0.20,
        "seed": 0,
        "jobs": 1,
        "out_dir": ".",
    },
    "fit": {
        "data": None,
        "meta": None,
        "limit": None,
        "direction": None,
        "p": 1,
        "iterations": 40_000,
        "burn": 20_000,
        "thin": 20,
        "m": 5,
        "seed": 0,
        "log": False,
        "jobs": 1,
        "out_dir": ".",
    },
    "assess": {
        "data": None,
        "meta": None,
        "limit": None,
        "direction": None,
        "p": 1,
        "iterations": 40_000,
        "burn": 20_000,
        "thin": 20,
        "m": 5,
        "n": 600,
        "refit_stride": 1,
        "seed": 0,
        "log": False,
        "jobs": 1,
        "out_dir": ".",
    },
    "study": {
        "scenarios": None,
        "iterations": 40_000,
        "burn": 20_000,
        "thin": 20,
        "m": 5,
        "jobs": 1,
        "out_dir": ".",
    },
}


@dataclass(frozen=True)
class RunConfig:
    """Resolved subcommand options; serializable, round-trip stable."""

    subcommand: str
    options: dict

    def to_json(self) -> str:
        return json.dumps(
            {"subcommand": self.subcommand, "options": self.options},
            indent=2,
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        raw = json.loads(text)
        return cls(subcommand=raw["subcommand"], options=dict(raw["options"]))


def _build_parser() -> _Parser:
    parser = _Parser(prog="censar", description=__doc__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add_common(p):
        p.add_argument("--config", help="JSON config file; flags override its values")
        p.add_argument("--out-dir", dest="out_dir", help="output directory")
        p.add_argument("--seed", type=int, help="base random seed")
        p.add_argument("--jobs", type=int, help="worker parallelism where applicable")

    p_sim = sub.add_parser("simulate", help="generate a censored AR(1) regression dataset")
    add_common(p_sim)
    p_sim.add_argument("--model", choices=["M1", "M2", "M3"])
    p_sim.add_argument("--rho", type=float)
    p_sim.add_argument("--n", type=int, help="sample size")
    p_sim.add_argument("--censor", type=float, help="target censoring fraction")

    def add_fit_inputs(p):
        p.add_argument("--data", help="data CSV (t,y,censored,x2..)")
        p.add_argument("--meta", help="metadata JSON (limit, direction)")
        p.add_argument("--limit", type=float, help="censoring limit (overrides meta)")
        p.add_argument("--direction", choices=["left", "right"])
        p.add_argument("--p", type=int, help="AR order")
        p.add_argument("--N", dest="iterations", type=int, help="MCMC iterations")
        p.add_argument("--burn", type=int, help="burn-in iterations")
        p.add_argument("--thin", type=int)
        p.add_argument("--m", type=int, help="augmentation draws per censored point")
        p.add_argument(
            "--log",
            action="store_const",
            const=True,
            help="log-transform y and the limit before fitting",
        )

    p_fit = sub.add_parser("fit", help="fit the censored AR regression by Gibbs sampling")
    add_common(p_fit)
    add_fit_inputs(p_fit)

    p_ass = sub.add_parser("assess", help="jackknife residuals, DIC, WAIC")
    add_common(p_ass)
    add_fit_inputs(p_ass)
    p_ass.add_argument("--n", type=int, help="initial training size")
    p_ass.add_argument("--refit-stride", dest="refit_stride", type=int)

    p_study = sub.add_parser("study", help="run a replication study from a scenario file")
    add_common(p_study)
    p_study.add_argument("--scenarios", help="scenario JSON file")
    p_study.add_argument("--N", dest="iterations", type=int)
    p_study.add_argument("--burn", type=int)
    p_study.add_argument("--thin", type=int)
    p_study.add_argument("--m", type=int)

    return parser


def _resolve(args: argparse.Namespace) -> RunConfig:
    sub = args.subcommand
    options = dict(DEFAULTS[sub])
    if getattr(args, "config", None):
        try:
            cfg = RunConfig.from_json(Path(args.config).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise UsageError(f"config file is not valid JSON: {exc}") from exc
        if cfg.subcommand != sub:
            raise UsageError(
                f"config file is for {cfg.subcommand!r}, not {sub!r}"
            )
        unknown = set(cfg.options) - set(options)
        if unknown:
            raise UsageError(f"unknown config options: {sorted(unknown)}")
        options.update(cfg.options)
    for key in options:
        value = getattr(args, key, None)
        if value is not None:
            options[key] = value
    if options.get("log") is None:
        options["log"] = False
    return RunConfig(sub, options)


def _write_manifest(out_dir: Path, config: RunConfig) -> None:
    manifest = {
        "package": "censar",
        "version": __version__,
        "subcommand": config.subcommand,
        "options": config.options,
    }
    (out_dir / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def _fmt(value: float) -> str:
    return repr(float(value))


def _write_data_csv(path: Path, series: CensoredSeries, x: np.ndarray) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(f"# schema: {DATA_SCHEMA}\n")
        writer = csv.writer(fh)
        covs = [f"x{j + 2}" for j in range(x.shape[1] - 1)]
        writer.writerow(["t", "y", "censored"] + covs)
        for t in range(len(series)):
            row = [t, _fmt(series.values[t]), int(series.censored[t])]
            row += [_fmt(v) for v in x[t, 1:]]
            writer.writerow(row)


def _read_data_csv(path: Path):
    try:
        lines = [
            line
            for line in path.read_text(encoding="utf-8").splitlines()
            if line and not line.startswith("#")
        ]
    except OSError:
        raise
    rows = list(csv.reader(lines))
    if not rows:
        raise UsageError(f"{path}: empty data file")
    header = rows[0]
    if header[:3] != ["t", "y", "censored"]:
        raise UsageError(f"{path}: expected columns t,y,censored,..., got {header[:3]}")
    body = rows[1:]
    try:
        y = np.array([float(r[1]) for r in body])
        censored = np.array([bool(int(r[2])) for r in body])
        k_extra = len(header) - 3
        x = np.ones((len(body), 1 + k_extra))
        for j in range(k_extra):
            x[:, 1 + j] = [float(r[3 + j]) for r in body]
    except (ValueError, IndexError) as exc:
        raise UsageError(f"{path}: malformed data row: {exc}") from exc
    return y, censored, x


def _load_series(options: dict):
    if not options.get("data"):
        raise UsageError("--data is required")
    data_path = Path(options["data"])
    y, censored, x = _read_data_csv(data_path)

    limit = options.get("limit")
    direction = options.get("direction")
    meta_path = options.get("meta")
    if meta_path is None:
        candidate = data_path.with_name("meta.json")
        meta_path = str(candidate) if candidate.exists() else None
    if meta_path:
        meta = json.loads(Path(meta_path).read_text(encoding="utf-8"))
        if limit is None:
            limit = meta.get("limit")
        if direction is None:
            direction = meta.get("direction")
    if limit is None or direction is None:
        raise UsageError("censoring limit and direction needed (meta file or flags)")
    try:
        direction = Direction(direction)
    except ValueError as exc:
        raise UsageError(f"direction must be 'left' or 'right', got {direction!r}") from exc

    if options.get("log"):
        if np.any(y <= 0) or limit <= 0:
            raise UsageError("--log needs strictly positive values and limit")
        y = np.log(y)
        limit = float(np.log(limit))
    series = CensoredSeries(y, censored, limit, direction)
    return series, x


def _mcmc_config(options: dict) -> McmcConfig:
    try:
        return McmcConfig(
            iterations=options["iterations"],
            burn_in=options["burn"],
            thin=options["thin"],
            augmentation_samples=options["m"],
            seed=RngStream(options.get("seed", 0)),
        )
    except CensarError as exc:
        raise UsageError(str(exc)) from exc


def _cmd_simulate(config: RunConfig) -> None:
    opts = config.options
    if not abs(opts["rho"]) < 1.0:
        raise UsageError(
            f"rho={opts['rho']} violates the stationarity constraint |rho| < 1"
        )
    if not 0.0 <= opts["censor"] < 1.0:
        raise UsageError("censor fraction must lie in [0, 1)")
    try:
        scenario = Scenario(
            model=opts["model"],
            rho1=opts["rho"],
            censor_rate=opts["censor"],
            sample_size=opts["n"],
            replications=1,
            seed=opts["seed"],
        )
    except CensarError as exc:
        raise UsageError(str(exc)) from exc
    stream = RngStream(opts["seed"]).derive("replication", scenario.label, 0)
    series, x, _ = simulate(scenario, stream)

    out_dir = Path(opts["out_dir"])
    out_dir.mkdir(parents=True, exist_ok=True)
    _write_data_csv(out_dir / "data.csv", series, x)
    meta = {
        "schema": META_SCHEMA,
        "limit": series.limit,
        "direction": series.direction.value,
        "model": scenario.model,
        "seed": opts["seed"],
        "target_censor_rate": scenario.censor_rate,
        "realized_censor_rate": series.censor_rate,
        "true": {
            "beta": list(map(float, scenario.beta)),
            "rho": [scenario.rho1],
            "sigma2": scenario.sigma2,
        },
    }
    (out_dir / "meta.json").write_text(
        json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    _write_manifest(out_dir, config)
    print(f"wrote {out_dir / 'data.csv'} ({len(series)} rows, "
          f"{series.n_censored} censored)")


def _write_draws_csv(path: Path, chain) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(f"# schema: {DRAWS_SCHEMA}\n")
        writer = csv.writer(fh)
        writer.writerow(chain.param_names)
        for row in chain.draws:
            writer.writerow([_fmt(v) for v in row])


def _cmd_fit(config: RunConfig) -> None:
    opts = config.options
    series, x = _load_series(opts)
    mcmc = _mcmc_config(opts)
    if opts["p"] < 0:
        raise UsageError("AR order p must be >= 0")
    chain = run_gda_msm(series, x, ModelSpec(opts["p"]), mcmc)

    out_dir = Path(opts["out_dir"])
    out_dir.mkdir(parents=True, exist_ok=True)
    _write_draws_csv(out_dir / "draws.csv", chain)
    with open(out_dir / "augmented.csv", "w", newline="", encoding="utf-8") as fh:
        fh.write(f"# schema: {AUGMENTED_SCHEMA}\n")
        writer = csv.writer(fh)
        writer.writerow(["t", "z"])
        for t, value in enumerate(chain.augmented):
            writer.writerow([t, _fmt(value)])

    summary = posterior_summary(chain)
    gw = geweke(chain)
    summary_doc = {
        "schema": "censar/summary v1",
        "acceptance_rate": chain.acceptance_rate,
        "params": {
            name: {
                "mean": s.mean,
                "median": s.median,
                "sd": s.sd,
                "hpd95": list(s.hpd95),
            }
            for name, s in summary.items()
        },
        "geweke": dict(zip(gw.param_names, map(float, gw.z_scores))),
    }
    (out_dir / "summary.json").write_text(
        json.dumps(summary_doc, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )

    with open(out_dir / "geweke.csv", "w", newline="", encoding="utf-8") as fh:
        fh.write("# schema: censar/geweke v1\n")
        writer = csv.writer(fh)
        writer.writerow(["parameter", "z_score"])
        for name, z in zip(gw.param_names, gw.z_scores):
            writer.writerow([name, _fmt(z)])
    max_lag = min(30, chain.retained - 1)
    with open(out_dir / "acf.csv", "w", newline="", encoding="utf-8") as fh:
        fh.write("# schema: censar/acf v1\n")
        writer = csv.writer(fh)
        writer.writerow(["parameter", "lag", "value"])
        for name, col in zip(chain.param_names, chain.draws.T):
            for lag, value in enumerate(acf(col, max_lag)):
                writer.writerow([name, lag, _fmt(value)])
    _write_manifest(out_dir, config)
    means = ", ".join(
        f"{name}={s.mean:.4f}" for name, s in summary.items()
    )
    print(f"posterior means: {means}; MH acceptance {chain.acceptance_rate:.3f}")


def _cmd_assess(config: RunConfig) -> None:
    opts = config.options
    series, x = _load_series(opts)
    if not opts["n"] < len(series):
        raise UsageError(f"training size n={opts['n']} must be < T={len(series)}")
    if opts["n"] <= opts["p"]:
        raise UsageError("training size n must exceed the AR order")
    mcmc = _mcmc_config(opts)
    report = assess(
        series,
        x,
        ModelSpec(opts["p"]),
        mcmc,
        n=opts["n"],
        refit_stride=opts["refit_stride"],
        jobs=opts["jobs"],
    )
    out_dir = Path(opts["out_dir"])
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "assessment.json").write_text(report.to_json() + "\n", encoding="utf-8")
    report.write_residual_csv(out_dir / "residuals.csv")
    _write_manifest(out_dir, config)
    print(
        f"residual mean {report.residual_mean:.4f}, var {report.residual_var:.4f}, "
        f"SSJR {report.ssjr:.2f}, DIC {report.dic:.2f}, WAIC {report.waic:.2f} "
        f"(pw {report.pw:.2f})"
    )


def _cmd_study(config: RunConfig) -> None:
    opts = config.options
    if not opts.get("scenarios"):
        raise UsageError("--scenarios is required")
    try:
        scenarios = load_scenarios(opts["scenarios"])
    except CensarError as exc:
        raise UsageError(str(exc)) from exc
    if not scenarios:
        raise UsageError("scenario file holds no scenarios")
    mcmc = McmcConfig(
        iterations=opts["iterations"],
        burn_in=opts["burn"],
        thin=opts["thin"],
        augmentation_samples=opts["m"],
    )
    table = run_study(scenarios, mcmc=mcmc, jobs=opts["jobs"])
    out_dir = Path(opts["out_dir"])
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "study.csv", "w", newline="", encoding="utf-8") as fh:
        fh.write("# schema: censar/study v1\n")
        table.to_csv(fh, index=False)
    (out_dir / "study.md").write_text(study_markdown(table), encoding="utf-8")
    _write_manifest(out_dir, config)
    print(f"ran {len(scenarios)} scenario(s); wrote {out_dir / 'study.csv'}")


_HANDLERS = {
    "simulate": _cmd_simulate,
    "fit": _cmd_fit,
    "assess": _cmd_assess,
    "study": _cmd_study,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        config = _resolve(args)
        _HANDLERS[config.subcommand](config)
        return 0
    except UsageError as exc:
        print(f"censar: error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"censar: i/o error: {exc}", file=sys.stderr)
        return 2
    except CensarError as exc:
        print(f"censar: numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
