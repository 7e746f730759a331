"""Figure rendering for experiment runs and benchmarks.

The CLI writes machine-readable traces (CSV/JSON) and, alongside them,
a small set of PNG figures so a run can be eyeballed without extra
tooling: per-seed convergence curves for the residuals and the
objective, the three link metrics over iterations, and the benchmark's
log-log scaling fit.  Rendering uses the non-interactive Agg backend and
never opens a window.
"""

from __future__ import annotations

import math
from typing import Mapping, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be pinned first)

from .metrics import IterationRecord

__all__ = [
    "RUN_FIGURES",
    "render_run_figures",
    "render_bench_figure",
]

# Figure file names produced by render_run_figures, keyed by the plotted
# quantity.
RUN_FIGURES = {
    "residuals": "fig_residuals.png",
    "objective": "fig_objective.png",
    "sinr_db": "fig_sinr.png",
    "spectral_eff_bits": "fig_spectral_eff.png",
    "radar_mi_bits": "fig_radar_mi.png",
}

_DPI = 130


def _finite(values):
    return [v if math.isfinite(v) else math.nan for v in values]


def _plot_per_seed(ax, traces: Mapping[int, Sequence[IterationRecord]], extract,
                   logscale: bool) -> None:
    many = len(traces) > 6
    for seed, records in sorted(traces.items()):
        iters = [r.iter for r in records]
        vals = _finite([extract(r) for r in records])
        ax.plot(iters, vals, lw=1.2, alpha=0.45 if many else 0.9,
                label=None if many else f"seed {seed}")
    if logscale:
        ax.set_yscale("log")
    ax.set_xlabel("iteration")
    ax.grid(True, which="both", alpha=0.3)
    if not many:
        ax.legend(fontsize=8)


def render_run_figures(traces: Mapping[int, Sequence[IterationRecord]], out_dir) -> list:
    """Render the per-seed convergence and link-metric figures.

    ``traces`` maps master seed to that run's iteration records.  Returns
    the list of file paths written.  Seeds whose traces are empty are
    skipped; if every trace is empty nothing is written.
    """
    panels = [
        ("residuals", lambda r: max(r.r1, r.r2, r.s1, r.s2),
         "max ADMM residual", True),
        ("objective", lambda r: r.objective, "objective", True),
        ("sinr_db", lambda r: r.sinr_db, "communication SINR (dB)", False),
        ("spectral_eff_bits", lambda r: r.spectral_eff_bits,
         "spectral efficiency (bits/s/Hz)", False),
        ("radar_mi_bits", lambda r: r.radar_mi_bits,
         "radar mutual information (bits)", False),
    ]
    traces = {seed: recs for seed, recs in traces.items() if recs}
    written = []
    if not traces:
        return written
    for key, extract, ylabel, logscale in panels:
        fig, ax = plt.subplots(figsize=(6.0, 4.0))
        _plot_per_seed(ax, traces, extract, logscale)
        ax.set_ylabel(ylabel)
        ax.set_title(f"{ylabel} over {len(traces)} run(s)")
        fig.tight_layout()
        path = str(out_dir / RUN_FIGURES[key]) if hasattr(out_dir, "__truediv__") else f"{out_dir}/{RUN_FIGURES[key]}"
        fig.savefig(path, dpi=_DPI)
        plt.close(fig)
        written.append(path)
    return written


def render_bench_figure(sizes: Sequence[int], median_seconds: Sequence[float],
                        slope: float, out_path) -> str:
    """Render the benchmark scaling plot with its fitted power law."""
    fig, ax = plt.subplots(figsize=(5.5, 4.0))
    ax.loglog(sizes, median_seconds, "o-", label="measured")
    # Anchor the fitted power law at the first measured point.
    n0, t0 = sizes[0], median_seconds[0]
    fit = [t0 * (n / n0) ** slope for n in sizes]
    ax.loglog(sizes, fit, "--", label=f"fit: N^{slope:.2f}")
    ax.set_xlabel("problem size N")
    ax.set_ylabel("median seconds per iteration")
    ax.set_title("per-iteration cost scaling")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=9)
    fig.tight_layout()
    fig.savefig(str(out_path), dpi=_DPI)
    plt.close(fig)
    return str(out_path)
