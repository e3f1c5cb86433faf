"""Experiment harness: configuration, precondition gates, runners, CSV.

Five experiments wire the solver stack to the limit theorems:

  grazing-levy            eps-ladder of Wild runs vs the fractional
                          Fokker-Planck closed form, weight xi^q
  grazing-drift           finite-energy ladder vs the drift closed form,
                          weight xi^2
  fp-longtime             decay of the FP flow toward equilibrium:
                          r(t) = d_q(f(t), M), r(t) e^{2t}, and L1
  equilibrium-attraction  Wild flow at fixed eps vs equilibrium in the
                          d_{q+delta'} metric
  dsmc-crosscheck         particle simulation vs spectral solution and
                          the exact mean-energy exponential

Precondition gates (the hypotheses of the theorems: small-xi limit,
Holder modulus, finite energy) run before any expensive computation and
raise GateError; numerical-tolerance findings are recorded as CheckResult
rows instead.  Re-running a config with the same seed reproduces the CSV
byte for byte.
"""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .analysis import (
    ConditionAError,
    MetricReport,
    alpha_limit,
    holder_modulus,
    l1_distance,
    weighted_gridmax,
)
from .core import (
    InitialDatum,
    ModelParams,
    SpectralDensity,
    XiGrid,
    equilibrium_spectral,
    gaussian,
    interp,
    mixture,
    mp_hat,
    sample_spectral,
)
from .dsmc import sample_initial, step
from .fokker_planck import drift_solution_hat, fp_solution_hat
from .kernels import energy_loss_rate, make_kernel
from .wild import WildConfig, evolve

__all__ = [
    "EXPERIMENTS",
    "GateError",
    "CheckResult",
    "RunResult",
    "ExperimentConfig",
    "run_grazing_levy",
    "run_grazing_drift",
    "run_fp_longtime",
    "run_equilibrium_attraction",
    "run_dsmc_crosscheck",
    "RUNNERS",
    "CSV_COLUMNS",
    "write_csv",
]

EXPERIMENTS = (
    "grazing-levy",
    "grazing-drift",
    "fp-longtime",
    "equilibrium-attraction",
    "dsmc-crosscheck",
)


class GateError(RuntimeError):
    """A precondition of the experiment failed; nothing was computed."""


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


@dataclass
class RunResult:
    config: "ExperimentConfig"
    rows: list
    reports: dict
    checks: list

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    p: float = 1.0
    alpha: float = 1.0
    eps_ladder: tuple = (0.4, 0.2, 0.1)
    times: tuple = (0.25, 0.5, 1.0)
    grid: XiGrid = XiGrid(1e-4, 32.0, 512)
    wild: WildConfig = WildConfig()
    datum: InitialDatum = InitialDatum("mixture")
    n_particles: int = 100_000
    n_seeds: int = 16
    seed: int = 1234

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ValueError(f"unknown experiment {self.experiment!r}")
        ladder = tuple(float(e) for e in self.eps_ladder)
        if any(not 0.0 < e <= 1.0 for e in ladder):
            raise ValueError("eps values must lie in (0, 1]")
        if any(b >= a for a, b in zip(ladder, ladder[1:])):
            raise ValueError("eps_ladder must be strictly decreasing")
        times = tuple(float(t) for t in self.times)
        if not times:
            raise ValueError("need at least one time")
        if any(t < 0.0 for t in times):
            raise ValueError("times must be nonnegative")
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("times must be strictly increasing")
        if self.n_particles < 2:
            raise ValueError("n_particles must be >= 2")
        if self.n_seeds < 1:
            raise ValueError("n_seeds must be >= 1")
        object.__setattr__(self, "eps_ladder", ladder)
        object.__setattr__(self, "times", times)

    @property
    def params(self) -> ModelParams:
        return ModelParams(p=self.p, alpha=self.alpha)

    @classmethod
    def default(cls, experiment: str) -> "ExperimentConfig":
        if experiment == "grazing-levy":
            return cls(
                experiment=experiment,
                p=1.0,
                datum=mixture(),
                grid=XiGrid(1e-4, 32.0, 512),
                wild=WildConfig(terms_per_step=24),
            )
        if experiment == "grazing-drift":
            return cls(
                experiment=experiment,
                p=0.5,
                datum=gaussian(1.0),
                grid=XiGrid(1e-4, 32.0, 512),
                wild=WildConfig(terms_per_step=24),
            )
        if experiment == "fp-longtime":
            return cls(
                experiment=experiment,
                p=1.0,
                eps_ladder=(),
                times=(1.0, 2.0, 3.0, 4.0),
                grid=XiGrid(),
                datum=gaussian(1.0),
            )
        if experiment == "equilibrium-attraction":
            return cls(
                experiment=experiment,
                p=1.0,
                eps_ladder=(0.2,),
                times=(0.5, 1.0, 2.0),
                grid=XiGrid(1e-4, 32.0, 512),
                wild=WildConfig(terms_per_step=30),
                datum=mixture(),
            )
        if experiment == "dsmc-crosscheck":
            return cls(
                experiment=experiment,
                p=1.0,
                eps_ladder=(0.4,),
                times=(0.25, 0.5, 1.0),
                grid=XiGrid(1e-4, 32.0, 512),
                datum=gaussian(1.0),
            )
        raise ValueError(f"unknown experiment {experiment!r}")

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        d = dict(raw)
        experiment = d.pop("experiment", None)
        if experiment is None:
            raise ValueError("config must name an experiment")
        base = cls.default(experiment)
        kwargs = {}
        for key in ("p", "alpha"):
            if key in d:
                kwargs[key] = float(d.pop(key))
        if "eps_ladder" in d:
            kwargs["eps_ladder"] = tuple(float(e) for e in d.pop("eps_ladder"))
        if "times" in d:
            kwargs["times"] = tuple(float(t) for t in d.pop("times"))
        if "grid" in d:
            g = d.pop("grid")
            kwargs["grid"] = XiGrid(
                xi_min=float(g.get("xi_min", base.grid.xi_min)),
                xi_max=float(g.get("xi_max", base.grid.xi_max)),
                count=int(g.get("count", base.grid.count)),
            )
        if "wild" in d:
            w = d.pop("wild")
            kwargs["wild"] = WildConfig(
                terms_per_step=int(w.get("terms", base.wild.terms_per_step)),
                max_sigma_dt=float(w.get("max_sigma_dt", base.wild.max_sigma_dt)),
                tail_tol=float(w.get("tail_tol", base.wild.tail_tol)),
            )
        if "dsmc" in d:
            m = d.pop("dsmc")
            if "n_particles" in m:
                kwargs["n_particles"] = int(m["n_particles"])
            if "n_seeds" in m:
                kwargs["n_seeds"] = int(m["n_seeds"])
        if "datum" in d:
            dd = d.pop("datum")
            kwargs["datum"] = InitialDatum(dd["tag"], **(dd.get("params") or {}))
        if "seed" in d:
            kwargs["seed"] = int(d.pop("seed"))
        if d:
            raise ValueError(f"unknown config keys: {sorted(d)}")
        return replace(base, **kwargs)

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


CSV_COLUMNS = ("experiment", "eps", "t", "xi_max_arg", "metric_value", "exponent", "extra")


def _row(cfg, eps=None, t=None, xi=None, val=None, s=None, extra=""):
    return {
        "experiment": cfg.experiment,
        "eps": eps,
        "t": t,
        "xi_max_arg": xi,
        "metric_value": val,
        "exponent": s,
        "extra": extra,
    }


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    return format(float(x), ".17g")


def write_csv(result: RunResult, path) -> Path:
    path = Path(path)
    if path.parent != Path(""):
        path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for row in result.rows:
            writer.writerow([_fmt(row[col]) for col in CSV_COLUMNS])
    return path


def _gate_condition_a(datum: InitialDatum, params: ModelParams):
    try:
        est = alpha_limit(datum, params)
    except ConditionAError as exc:
        raise GateError(f"condition A violated: {exc}") from exc
    if est.value < 1e-3 or abs(est.value - params.alpha) > 0.05 * params.alpha:
        raise GateError(
            f"condition A violated: small-xi limit estimate {est.value:.6g} "
            f"does not match alpha = {params.alpha:.6g}"
        )
    return est


def _gate_condition_b(datum: InitialDatum, params: ModelParams):
    diag = holder_modulus(datum, params, delta=datum.holder_delta(params), r_max=1.0)
    if not math.isfinite(diag.modulus):
        raise GateError("condition B violated: Holder modulus of F0 is not finite")
    return diag


def _ladder_reports(cfg: ExperimentConfig, reference_hat, s: float, threads: int):
    """Evolve the datum along the eps ladder and measure against a reference.

    reference_hat(t, xi) must return the comparison characteristic function.
    Each ladder point owns its solver state, so points may run concurrently;
    the per-point arithmetic is identical either way.
    """
    params, grid = cfg.params, cfg.grid

    def one_eps(eps: float) -> MetricReport:
        kernel = make_kernel(eps)
        f = sample_spectral(cfg.datum, params, grid)
        table = []
        t_prev = 0.0
        for t in cfg.times:
            f = evolve(f, kernel, params, t - t_prev, cfg.wild)
            t_prev = t
            ref = SpectralDensity(grid, reference_hat(t, grid.nodes), q=params.q)
            val, xi_at = weighted_gridmax(f, ref, s)
            table.append((t, val, xi_at))
        return MetricReport.from_rows(
            s, table, meta={"eps": eps, "sigma": kernel.sigma}
        )

    if threads > 1 and len(cfg.eps_ladder) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            reports = list(pool.map(one_eps, cfg.eps_ladder))
    else:
        reports = [one_eps(eps) for eps in cfg.eps_ladder]
    return dict(zip(cfg.eps_ladder, reports))


def _ladder_result(cfg: ExperimentConfig, reports: dict, s: float) -> RunResult:
    rows, checks = [], []
    for eps in cfg.eps_ladder:
        rep = reports[eps]
        for t, val, xi_at in rep.table:
            rows.append(_row(cfg, eps=eps, t=t, xi=xi_at, val=val, s=s, extra="per-time"))
        rows.append(_row(cfg, eps=eps, t=None, xi=None, val=rep.overall, s=s, extra="ladder-D"))
    if len(cfg.eps_ladder) > 1:
        d_vals = [reports[eps].overall for eps in cfg.eps_ladder]
        monotone = all(b < a for a, b in zip(d_vals, d_vals[1:]))
        detail = ", ".join(
            f"D({eps:g}) = {d:.6g}" for eps, d in zip(cfg.eps_ladder, d_vals)
        )
        checks.append(CheckResult("ladder-monotone-decrease", monotone, detail))
    return RunResult(cfg, rows, reports, checks)


def run_grazing_levy(cfg: ExperimentConfig | None = None, threads: int = 1) -> RunResult:
    """eps-ladder comparison of the Wild flow against the FP closed form."""
    cfg = cfg if cfg is not None else ExperimentConfig.default("grazing-levy")
    params = cfg.params
    _gate_condition_a(cfg.datum, params)
    _gate_condition_b(cfg.datum, params)

    def reference(t, xi):
        return fp_solution_hat(cfg.datum, params, t, xi)

    reports = _ladder_reports(cfg, reference, s=params.q, threads=threads)
    return _ladder_result(cfg, reports, s=params.q)


def run_grazing_drift(cfg: ExperimentConfig | None = None, threads: int = 1) -> RunResult:
    """Finite-energy eps-ladder against the drift closed form, weight xi^2."""
    cfg = cfg if cfg is not None else ExperimentConfig.default("grazing-drift")
    params = cfg.params
    if not cfg.datum.finite_energy:
        raise GateError("finite-energy initial datum required")
    if abs(cfg.datum.energy() - 1.0) > 1e-12:
        raise GateError(f"unit initial energy required, got {cfg.datum.energy():.6g}")

    def reference(t, xi):
        return drift_solution_hat(cfg.datum, params, t, xi)

    reports = _ladder_reports(cfg, reference, s=2.0, threads=threads)
    return _ladder_result(cfg, reports, s=2.0)


def run_fp_longtime(cfg: ExperimentConfig | None = None, threads: int = 1) -> RunResult:
    """Decay of the FP flow toward equilibrium: r(t), r(t) e^{2t}, L1."""
    cfg = cfg if cfg is not None else ExperimentConfig.default("fp-longtime")
    params, grid = cfg.params, cfg.grid
    if cfg.datum.tag != "gaussian":
        raise GateError("Gaussian datum required (zero mean, finite q-th moment)")
    eq = equilibrium_spectral(params, grid)
    rows, table = [], []
    l1_vals = []
    for t in cfg.times:
        fsd = SpectralDensity(
            grid, fp_solution_hat(cfg.datum, params, t, grid.nodes), q=params.q
        )
        r, xi_at = weighted_gridmax(fsd, eq, params.q)
        table.append((t, r, xi_at))
        rows.append(_row(cfg, t=t, xi=xi_at, val=r, s=params.q, extra="r"))
        rows.append(
            _row(cfg, t=t, xi=xi_at, val=r * math.exp(2.0 * t), s=params.q, extra="r-e2t")
        )
        l1 = l1_distance(
            lambda xi, _t=t: fp_solution_hat(cfg.datum, params, _t, xi),
            lambda xi: mp_hat(params, xi),
        )
        l1_vals.append(l1)
        rows.append(_row(cfg, t=t, val=l1, extra="l1"))
    checks = []
    rated = [r * math.exp(2.0 * t) for t, r, _ in table if t >= 1.0]
    if rated:
        factor = max(rated) / min(rated)
        checks.append(
            CheckResult(
                "r-e2t-bounded",
                factor <= 1.5,
                f"max/min of r(t)e^(2t) over t >= 1 is {factor:.4f} (limit 1.5)",
            )
        )
    monotone = all(b < a for a, b in zip(l1_vals, l1_vals[1:]))
    checks.append(
        CheckResult(
            "l1-monotone-decrease",
            monotone,
            ", ".join(f"l1({t:g}) = {v:.6g}" for t, v in zip(cfg.times, l1_vals)),
        )
    )
    report = MetricReport.from_rows(params.q, table, meta={"kind": "fp-longtime"})
    return RunResult(cfg, rows, {"r": report}, checks)


def run_equilibrium_attraction(
    cfg: ExperimentConfig | None = None, threads: int = 1
) -> RunResult:
    """Wild flow at fixed eps vs equilibrium in the d_{q+delta'} metric."""
    cfg = cfg if cfg is not None else ExperimentConfig.default("equilibrium-attraction")
    params, grid = cfg.params, cfg.grid
    _gate_condition_a(cfg.datum, params)
    _gate_condition_b(cfg.datum, params)
    if len(cfg.eps_ladder) != 1:
        raise GateError("equilibrium-attraction runs at one fixed eps, not a ladder")
    eps = cfg.eps_ladder[0]
    # delta' = delta/2 with delta the certified Holder exponent of the datum
    s = params.q + cfg.datum.holder_delta(params) / 2.0
    kernel = make_kernel(eps)
    eq = equilibrium_spectral(params, grid)
    f = sample_spectral(cfg.datum, params, grid)
    rows, table = [], []
    t_prev = 0.0
    for t in cfg.times:
        f = evolve(f, kernel, params, t - t_prev, cfg.wild)
        t_prev = t
        val, xi_at = weighted_gridmax(f, eq, s)
        table.append((t, val, xi_at))
        rows.append(_row(cfg, eps=eps, t=t, xi=xi_at, val=val, s=s, extra="attract"))
    vals = [v for _, v, _ in table]
    monotone = all(b < a for a, b in zip(vals, vals[1:]))
    checks = [
        CheckResult(
            "attraction-monotone-decrease",
            monotone,
            ", ".join(f"d({t:g}) = {v:.6g}" for t, v in zip(cfg.times, vals)),
        )
    ]
    report = MetricReport.from_rows(s, table, meta={"eps": eps})
    return RunResult(cfg, rows, {"attract": report}, checks)


def run_dsmc_crosscheck(
    cfg: ExperimentConfig | None = None, threads: int = 1
) -> RunResult:
    """Particle simulation vs spectral solver and the exact energy decay."""
    cfg = cfg if cfg is not None else ExperimentConfig.default("dsmc-crosscheck")
    params = cfg.params
    if len(cfg.eps_ladder) != 1:
        raise GateError("dsmc-crosscheck runs at one fixed eps")
    eps = cfg.eps_ladder[0]
    kernel = make_kernel(eps)
    n = cfg.n_particles
    bound = 5.0 / math.sqrt(n)
    chf_grid = XiGrid(0.1, 10.0, 48)
    time_points = (0.0,) + cfg.times

    # spectral reference, interpolated at the readout nodes
    refs = {0.0: cfg.datum.hat(params, chf_grid.nodes)}
    f = sample_spectral(cfg.datum, params, cfg.grid)
    t_prev = 0.0
    for t in cfg.times:
        f = evolve(f, kernel, params, t - t_prev, cfg.wild)
        t_prev = t
        refs[t] = interp(f, chf_grid.nodes)

    def advance(seed_offset: int):
        ens = sample_initial(cfg.datum, params, n, seed=cfg.seed + seed_offset)
        energies = [float(np.mean(ens.velocities**2))]
        chfs = []
        if seed_offset == 0:
            chfs.append(np.cos(np.outer(ens.velocities, chf_grid.nodes)).mean(axis=0))
        t_prev = 0.0
        for t in cfg.times:
            step(ens, kernel, params, t - t_prev)
            t_prev = t
            energies.append(float(np.mean(ens.velocities**2)))
            if seed_offset == 0:
                chfs.append(
                    np.cos(np.outer(ens.velocities, chf_grid.nodes)).mean(axis=0)
                )
        return energies, chfs

    if threads > 1 and cfg.n_seeds > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            outcomes = list(pool.map(advance, range(cfg.n_seeds)))
    else:
        outcomes = [advance(k) for k in range(cfg.n_seeds)]

    rows, checks = [], []
    chf_table = []
    chfs = outcomes[0][1]
    for t, emp in zip(time_points, chfs):
        dev = np.abs(emp - refs[t])
        j = int(np.argmax(dev))
        chf_table.append((t, float(dev[j]), float(chf_grid.nodes[j])))
        rows.append(
            _row(
                cfg,
                eps=eps,
                t=t,
                xi=float(chf_grid.nodes[j]),
                val=float(dev[j]),
                extra=f"chf-dev;bound={bound:.6g}",
            )
        )
        checks.append(
            CheckResult(
                f"chf-envelope-t{t:g}",
                float(dev[j]) <= bound,
                f"grid-max |empirical - spectral| = {dev[j]:.6g} vs 5/sqrt(N) = {bound:.6g}",
            )
        )

    reports = {"chf-dev": MetricReport.from_rows(0.0, chf_table, meta={"eps": eps})}

    if cfg.datum.finite_energy:
        loss = energy_loss_rate(kernel, params)
        e0 = cfg.datum.energy()
        energy_mat = np.array([o[0] for o in outcomes])  # seeds x times
        for col, t in enumerate(time_points):
            pooled = float(energy_mat[:, col].mean())
            ref = e0 * math.exp(-loss * t)
            if cfg.n_seeds >= 2:
                se = float(energy_mat[:, col].std(ddof=1) / math.sqrt(cfg.n_seeds))
                extra = f"energy;ref={ref:.6g};se={se:.6g};seeds={cfg.n_seeds}"
            else:
                se = None
                extra = f"energy;ref={ref:.6g};seeds={cfg.n_seeds}"
            rows.append(_row(cfg, eps=eps, t=t, val=pooled, extra=extra))
            if t > 0.0 and se is not None:
                checks.append(
                    CheckResult(
                        f"energy-trace-t{t:g}",
                        abs(pooled - ref) <= 3.0 * se,
                        f"pooled mean energy {pooled:.6g} vs {ref:.6g} "
                        f"(|diff| = {abs(pooled - ref):.3g}, 3 SE = {3.0 * se:.3g})",
                    )
                )
        reports["energy"] = energy_mat

    return RunResult(cfg, rows, reports, checks)


RUNNERS = {
    "grazing-levy": run_grazing_levy,
    "grazing-drift": run_grazing_drift,
    "fp-longtime": run_fp_longtime,
    "equilibrium-attraction": run_equilibrium_attraction,
    "dsmc-crosscheck": run_dsmc_crosscheck,
}
