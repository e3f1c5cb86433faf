"""Figure rendering for experiment reports.

One PNG per run, saved next to the CSV.  The CSV stays the
machine-readable boundary; figures are a human-readable view of the same
rows.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .experiments import RunResult

__all__ = ["render_figure"]


def _rows_with(result: RunResult, tag: str):
    return [r for r in result.rows if str(r["extra"]).split(";")[0] == tag]


def _ladder_figure(result: RunResult):
    cfg = result.config
    fig, (ax_t, ax_d) = plt.subplots(1, 2, figsize=(9.5, 4.0))
    for eps in cfg.eps_ladder:
        pts = [(r["t"], r["metric_value"]) for r in _rows_with(result, "per-time") if r["eps"] == eps]
        if pts:
            ts, vals = zip(*pts)
            ax_t.plot(ts, vals, "o-", label=f"eps = {eps:g}")
    ax_t.set_xlabel("t")
    ax_t.set_ylabel("weighted grid-max distance")
    ax_t.set_title(f"{cfg.experiment}: distance to limit flow")
    ax_t.legend()
    d_rows = _rows_with(result, "ladder-D")
    if d_rows:
        eps_vals = [r["eps"] for r in d_rows]
        d_vals = [r["metric_value"] for r in d_rows]
        ax_d.loglog(eps_vals, d_vals, "s-")
        ax_d.set_xlabel("eps")
        ax_d.set_ylabel("D(eps)")
        ax_d.set_title("ladder supremum")
        ax_d.invert_xaxis()
    fig.tight_layout()
    return fig


def _fp_longtime_figure(result: RunResult):
    fig, (ax_r, ax_l) = plt.subplots(1, 2, figsize=(9.5, 4.0))
    r_rows = _rows_with(result, "r-e2t")
    ax_r.plot([r["t"] for r in r_rows], [r["metric_value"] for r in r_rows], "o-")
    ax_r.set_xlabel("t")
    ax_r.set_ylabel("r(t) e^(2t)")
    ax_r.set_title("normalized equilibrium distance")
    l_rows = _rows_with(result, "l1")
    ax_l.semilogy([r["t"] for r in l_rows], [r["metric_value"] for r in l_rows], "o-")
    ax_l.set_xlabel("t")
    ax_l.set_ylabel("L1 distance to equilibrium")
    ax_l.set_title("L1 decay")
    fig.tight_layout()
    return fig


def _attraction_figure(result: RunResult):
    fig, ax = plt.subplots(figsize=(5.5, 4.0))
    rows = _rows_with(result, "attract")
    ax.semilogy([r["t"] for r in rows], [r["metric_value"] for r in rows], "o-")
    s = rows[0]["exponent"] if rows else None
    ax.set_xlabel("t")
    ax.set_ylabel(f"d_s(f(t), M), s = {s:g}" if s else "distance")
    ax.set_title("attraction to equilibrium")
    fig.tight_layout()
    return fig


def _dsmc_figure(result: RunResult):
    fig, (ax_e, ax_c) = plt.subplots(1, 2, figsize=(9.5, 4.0))
    e_rows = _rows_with(result, "energy")
    if e_rows:
        ts = [r["t"] for r in e_rows]
        ax_e.semilogy(ts, [r["metric_value"] for r in e_rows], "o", label="pooled DSMC")
        refs = []
        for r in e_rows:
            fields = dict(kv.split("=") for kv in str(r["extra"]).split(";")[1:] if "=" in kv)
            refs.append(float(fields["ref"]))
        ax_e.semilogy(ts, refs, "-", label="exp(-L t)")
        ax_e.set_xlabel("t")
        ax_e.set_ylabel("mean energy")
        ax_e.legend()
        ax_e.set_title("energy decay")
    c_rows = _rows_with(result, "chf-dev")
    ts = [r["t"] for r in c_rows]
    devs = [r["metric_value"] for r in c_rows]
    ax_c.plot(ts, devs, "o-", label="grid-max deviation")
    if c_rows:
        fields = dict(kv.split("=") for kv in str(c_rows[0]["extra"]).split(";")[1:] if "=" in kv)
        ax_c.axhline(float(fields["bound"]), color="k", ls="--", label="5/sqrt(N)")
    ax_c.set_xlabel("t")
    ax_c.set_ylabel("|empirical CHF - spectral|")
    ax_c.legend()
    ax_c.set_title("characteristic-function agreement")
    fig.tight_layout()
    return fig


def render_figure(result: RunResult, path) -> Path:
    """Render the run's figure to path (PNG) and return the path."""
    experiment = result.config.experiment
    if experiment in ("grazing-levy", "grazing-drift"):
        fig = _ladder_figure(result)
    elif experiment == "fp-longtime":
        fig = _fp_longtime_figure(result)
    elif experiment == "equilibrium-attraction":
        fig = _attraction_figure(result)
    elif experiment == "dsmc-crosscheck":
        fig = _dsmc_figure(result)
    else:
        raise ValueError(f"no figure defined for {experiment!r}")
    path = Path(path)
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
