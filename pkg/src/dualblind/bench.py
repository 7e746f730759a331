"""Scaling benchmark for the solver's per-iteration cost.

For each problem size ``N`` a square radar aperture is generated
(``n_tx = n_rx_radar = N``, ``t_symbols = t_factor * N``) and the joint
solver runs for a fixed number of iterations, several repetitions per
size.  Per-iteration wall times come from differencing the cumulative
``elapsed_s`` stamps on the iteration records, so the measurement covers
exactly what one ADMM sweep costs (both linear-system solves, the prox
steps, and the per-iteration metrics).  The headline statistic is the
slope of ``log(median seconds)`` against ``log(N)``: the dominant dense
kernels (Cholesky factorizations of N x N Gram matrices, and the
products that form them) give cubic growth once N is large enough for
the O(N^2) traffic and fixed Python overhead to stop mattering.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .admm import AdmmConfig
from .jrc import solve_jrc
from .simulate import RadarScene, SimConfig, build_instance, solver_init_seed

__all__ = [
    "DEFAULT_SIZES",
    "BenchPoint",
    "BenchReport",
    "run_bench",
]

DEFAULT_SIZES = (32, 64, 128, 256)


@dataclass(frozen=True)
class BenchPoint:
    """Timing measurements for one problem size."""

    n: int
    t_symbols: int
    reps: int
    iters_per_rep: int
    median_iter_seconds: float

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "t_symbols": self.t_symbols,
            "reps": self.reps,
            "iters_per_rep": self.iters_per_rep,
            "median_iter_seconds": self.median_iter_seconds,
        }


@dataclass(frozen=True)
class BenchReport:
    """Per-size timings plus the fitted log-log slope."""

    points: tuple
    slope: float

    def as_dict(self) -> dict:
        return {
            "points": [p.as_dict() for p in self.points],
            "slope": self.slope,
        }


def _time_one_size(n: int, t_factor: int, reps: int, iters: int, seed: int) -> BenchPoint:
    sim = SimConfig(t_symbols=t_factor * n, seed=seed)
    # Tolerance zero so every repetition runs the full iteration budget.
    config = AdmmConfig(max_iter=iters, tol=0.0,
                        init_seed=solver_init_seed(sim))
    deltas: list[float] = []
    for rep in range(reps):
        scene = RadarScene.sample(seed + rep, n_targets=4,
                                  n_tx=n, n_rx_radar=n)
        instance = build_instance(sim, scene)
        result = solve_jrc(instance, config)
        stamps = [rec.elapsed_s for rec in result.records]
        # The first difference includes one-off allocation cost; with
        # iters >= 3 there are still at least two clean gaps per rep.
        deltas.extend(float(b - a) for a, b in zip(stamps, stamps[1:]))
    return BenchPoint(
        n=n,
        t_symbols=t_factor * n,
        reps=reps,
        iters_per_rep=iters,
        median_iter_seconds=float(np.median(deltas)),
    )


def run_bench(sizes=DEFAULT_SIZES, t_factor: int = 2, reps: int = 3,
              iters: int = 6, seed: int = 0, progress=None) -> BenchReport:
    """Measure per-iteration cost over ``sizes`` and fit its growth rate.

    Parameters
    ----------
    sizes : sequence of int
        Problem sizes, strictly ascending.
    t_factor : int
        Symbols per antenna; each instance uses ``t_symbols = t_factor * n``.
    reps : int
        Repetitions per size, at least 3.
    iters : int
        Solver iterations per repetition, at least 3 so every repetition
        contributes clean inter-iteration gaps.
    seed : int
        Base seed for instance generation.
    progress : callable, optional
        Called with each finished BenchPoint, for incremental reporting.

    Returns
    -------
    BenchReport
    """
    sizes = tuple(int(n) for n in sizes)
    if len(sizes) < 2:
        raise ValueError("need at least two sizes to fit a slope")
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise ValueError(f"sizes must be strictly ascending, got {sizes}")
    if reps < 3:
        raise ValueError(f"reps must be at least 3, got {reps}")
    if iters < 3:
        raise ValueError(f"iters must be at least 3, got {iters}")
    points = []
    for n in sizes:
        point = _time_one_size(n, t_factor, reps, iters, seed)
        points.append(point)
        if progress is not None:
            progress(point)
    times = [p.median_iter_seconds for p in points]
    slope = float(np.polyfit(np.log(sizes), np.log(times), 1)[0])
    return BenchReport(points=tuple(points), slope=slope)
