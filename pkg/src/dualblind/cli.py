"""Command line front end: run experiments, benchmark scaling, inspect files.

Three subcommands::

    dualblind run --config cfg.json [--seed N] [--out DIR] [--quiet] [--no-figures]
    dualblind bench [--sizes 32,64,128,256] [--t-factor 2] [--reps 3] [--out DIR]
    dualblind inspect instance.json

``run`` reads a single JSON config document::

    {
      "scenario": { SimConfig fields ...,
                    "scene": { "n_targets": 4, "n_tx": 8, ... } }
                  or { "instance": "path/to/instance.json" },
      "solver":   { "rho": 1.0, "max_iter": 50, "tol": 1e-4, ...,
                    "lambda_radar": 1.0, "lambda_comm": 1.0,
                    "reg_channel": {"type": "frob_ball", ...},
                    "reg_signal":  {"type": "power_ball", ...} },
      "seeds":    [0, 1, 2],
      "output_dir": "runs/out"
    }

Every field has a default; an empty ``scenario``/``solver`` runs the
stock scenario.  For each seed the runner writes ``trace_<seed>.csv``
and ``summary_<seed>.json``, then ``aggregate.json`` with median and
interquartile spread of the final metrics, plus convergence figures
(suppressed by ``--no-figures``).  Outputs are deterministic: rerunning
the same config yields byte-identical CSV and JSON files.

Exit codes: 0 success, 1 config error, 2 solver divergence, 3 I/O error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
from pathlib import Path

import numpy as np

from .admm import AdmmConfig, DivergenceError
from .bench import DEFAULT_SIZES, run_bench
from .jrc import JrcInstance, solve_jrc
from .linalg import IllConditionedSystemError, frob_norm_sq, hermitian, sub_seed
from .metrics import TRACE_COLUMNS, channel_error, tx_power, write_trace
from .regularizers import NotDifferentiableError, Regularizer
from .serialize import instance_from_dict
from .simulate import (
    STREAM_INIT,
    STREAM_SCENE,
    RadarScene,
    SimConfig,
    SteeringImperfection,
    build_instance,
)

__all__ = [
    "EXIT_OK",
    "EXIT_CONFIG",
    "EXIT_DIVERGED",
    "EXIT_IO",
    "ConfigError",
    "parse_run_config",
    "main",
]

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_DIVERGED = 2
EXIT_IO = 3


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending field."""


# Field tables: config key -> expected JSON type.
_SIM_FIELDS = {
    "n_comm_rx": int,
    "t_symbols": int,
    "noise_var": float,
    "power_budget": float,
    "power_fraction": float,
    "delta_g_bound_sq": float,
    "g0_model": str,
    "estimate_delta": bool,
}
_SCENE_FIELDS = {
    "n_targets": int,
    "fov_rad": float,
    "n_tx": int,
    "n_rx_radar": int,
    "carrier_hz": float,
    "wavelength_m": float,
    "element_spacing_wl": float,
    "amplitude_sigma": float,
    "phase_sigma": float,
}
_ADMM_FIELDS = {
    "rho": float,
    "max_iter": int,
    "tol": float,
    "eta_z1": float,
    "eta_z2": float,
    "z_mode": str,
    "init_scale": float,
}


def _typed(value, kind, where: str):
    """Coerce a JSON value, rejecting mismatches with the field path."""
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{where} must be a number, got {type(value).__name__}")
        return float(value)
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{where} must be an integer, got {type(value).__name__}")
        return value
    if kind is bool:
        if not isinstance(value, bool):
            raise ConfigError(f"{where} must be true or false, got {type(value).__name__}")
        return value
    if not isinstance(value, str):
        raise ConfigError(f"{where} must be a string, got {type(value).__name__}")
    return value


def _object(doc, where: str) -> dict:
    if not isinstance(doc, dict):
        raise ConfigError(f"{where} must be an object, got {type(doc).__name__}")
    return doc


def _pick(doc: dict, table: dict, where: str) -> dict:
    return {key: _typed(doc[key], table[key], f"{where}.{key}")
            for key in table if key in doc}


def _reject_unknown(doc: dict, allowed, where: str) -> None:
    unknown = sorted(set(doc) - set(allowed))
    if unknown:
        raise ConfigError(f"unknown field {where}.{unknown[0]}")


@dataclasses.dataclass(frozen=True)
class RunConfig:
    """Parsed and validated ``run`` configuration."""

    sim_fields: dict
    scene_fields: dict
    instance_path: str | None
    admm_fields: dict
    lambda_radar: float | None
    lambda_comm: float | None
    reg_channel: Regularizer | None
    reg_signal: Regularizer | None
    seeds: tuple
    output_dir: str
    echo: dict


def parse_run_config(doc) -> RunConfig:
    """Validate a run config document, naming any offending field."""
    doc = _object(doc, "config")
    _reject_unknown(doc, ("scenario", "solver", "seeds", "output_dir"), "config")

    scenario = _object(doc.get("scenario", {}), "scenario")
    instance_path = None
    sim_fields: dict = {}
    scene_fields: dict = {}
    if "instance" in scenario:
        instance_path = _typed(scenario["instance"], str, "scenario.instance")
        _reject_unknown(scenario, ("instance",), "scenario")
    else:
        _reject_unknown(scenario, tuple(_SIM_FIELDS) + ("scene",), "scenario")
        sim_fields = _pick(scenario, _SIM_FIELDS, "scenario")
        scene = _object(scenario.get("scene", {}), "scenario.scene")
        _reject_unknown(scene, tuple(_SCENE_FIELDS), "scenario.scene")
        scene_fields = _pick(scene, _SCENE_FIELDS, "scenario.scene")

    solver = _object(doc.get("solver", {}), "solver")
    _reject_unknown(solver, tuple(_ADMM_FIELDS) +
                    ("lambda_radar", "lambda_comm", "reg_channel", "reg_signal"),
                    "solver")
    admm_fields = _pick(solver, _ADMM_FIELDS, "solver")
    lambda_radar = (_typed(solver["lambda_radar"], float, "solver.lambda_radar")
                    if "lambda_radar" in solver else None)
    lambda_comm = (_typed(solver["lambda_comm"], float, "solver.lambda_comm")
                   if "lambda_comm" in solver else None)
    regs = {}
    for key in ("reg_channel", "reg_signal"):
        regs[key] = None
        if solver.get(key) is not None:
            try:
                regs[key] = Regularizer.from_dict(_object(solver[key], f"solver.{key}"))
            except ValueError as exc:
                raise ConfigError(f"solver.{key}: {exc}") from exc

    if "seeds" not in doc:
        raise ConfigError("config.seeds is required")
    seeds_doc = doc["seeds"]
    if not isinstance(seeds_doc, list) or not seeds_doc:
        raise ConfigError("config.seeds must be a non-empty list of integers")
    seeds = tuple(_typed(s, int, f"config.seeds[{i}]") for i, s in enumerate(seeds_doc))
    for i, s in enumerate(seeds):
        if s < 0:
            raise ConfigError(f"config.seeds[{i}] must be nonnegative, got {s}")
    if len(set(seeds)) != len(seeds):
        raise ConfigError("config.seeds must be distinct (outputs are per-seed files)")

    output_dir = _typed(doc.get("output_dir", "runs/out"), str, "config.output_dir")

    # Surface bad values now, with their section names, rather than at
    # the first solve.
    try:
        AdmmConfig(**admm_fields)
    except ValueError as exc:
        raise ConfigError(f"solver: {exc}") from exc
    if instance_path is None:
        try:
            SimConfig(**sim_fields)
        except ValueError as exc:
            raise ConfigError(f"scenario: {exc}") from exc

    return RunConfig(
        sim_fields=sim_fields,
        scene_fields=scene_fields,
        instance_path=instance_path,
        admm_fields=admm_fields,
        lambda_radar=lambda_radar,
        lambda_comm=lambda_comm,
        reg_channel=regs["reg_channel"],
        reg_signal=regs["reg_signal"],
        seeds=seeds,
        output_dir=output_dir,
        echo=doc,
    )


def _load_json(path):
    """Load a JSON document; parse failures carry line/column/offset."""
    with open(path) as fh:
        text = fh.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"{path}: invalid JSON at line {exc.lineno} column {exc.colno} "
            f"(char {exc.pos}): {exc.msg}"
        ) from exc


def _write_json(path, doc) -> None:
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _sample_scene(cfg: RunConfig, seed: int) -> RadarScene | None:
    if not cfg.scene_fields:
        return None
    fields = dict(cfg.scene_fields)
    n_targets = fields.pop("n_targets", 4)
    fov_rad = fields.pop("fov_rad", math.pi / 3)
    amp = fields.pop("amplitude_sigma", None)
    phase = fields.pop("phase_sigma", None)
    if amp is not None or phase is not None:
        base = SteeringImperfection()
        fields["imperfection"] = SteeringImperfection(
            amplitude_sigma=base.amplitude_sigma if amp is None else amp,
            phase_sigma=base.phase_sigma if phase is None else phase,
        )
    try:
        return RadarScene.sample(sub_seed(seed, STREAM_SCENE), n_targets, fov_rad, **fields)
    except ValueError as exc:
        raise ConfigError(f"scenario.scene: {exc}") from exc


def _build_for_seed(cfg: RunConfig, seed: int) -> JrcInstance:
    """Materialize the instance this seed solves."""
    if cfg.instance_path is not None:
        doc = _load_json(cfg.instance_path)
        try:
            instance = instance_from_dict(doc)
        except (ValueError, KeyError, TypeError) as exc:
            raise ConfigError(f"{cfg.instance_path}: {exc}") from exc
        overrides = {}
        if cfg.lambda_radar is not None:
            overrides["lambda_radar"] = cfg.lambda_radar
        if cfg.lambda_comm is not None:
            overrides["lambda_comm"] = cfg.lambda_comm
        if cfg.reg_channel is not None:
            overrides["reg_channel"] = cfg.reg_channel
        if cfg.reg_signal is not None:
            overrides["reg_signal"] = cfg.reg_signal
        if overrides:
            instance = dataclasses.replace(instance, **overrides)
        return instance
    sim = SimConfig(seed=seed, **cfg.sim_fields)
    try:
        return build_instance(
            sim,
            _sample_scene(cfg, seed),
            lambda_radar=1.0 if cfg.lambda_radar is None else cfg.lambda_radar,
            lambda_comm=1.0 if cfg.lambda_comm is None else cfg.lambda_comm,
            reg_channel=cfg.reg_channel,
            reg_signal=cfg.reg_signal,
        )
    except ValueError as exc:
        raise ConfigError(f"scenario: {exc}") from exc


def _summarize(seed: int, init_seed: int, result, instance: JrcInstance, echo: dict) -> dict:
    last = result.records[-1] if result.records else None
    final = None
    if last is not None:
        final = {name: getattr(last, name) for name in TRACE_COLUMNS if name != "iter"}
    errors = None
    truth = instance.ground_truth
    if truth is not None:
        g_err = channel_error(result.g_est, truth.g_true)
        x_err = channel_error(result.x_est, truth.x_true)
        errors = {
            "channel_abs": g_err.absolute,
            "channel_rel": g_err.relative,
            "signal_abs": x_err.absolute,
            "signal_rel": x_err.relative,
        }
    return {
        "seed": seed,
        "init_seed": init_seed,
        "n_iterations": len(result.records),
        "stop_reason": result.stop_reason,
        "final": final,
        "errors": errors,
        "estimate_power": tx_power(result.x_est),
        "config": echo,
    }


_AGGREGATE_FIELDS = (
    ("objective", ("final", "objective")),
    ("sinr_db", ("final", "sinr_db")),
    ("spectral_eff_bits", ("final", "spectral_eff_bits")),
    ("radar_mi_bits", ("final", "radar_mi_bits")),
    ("tx_power", ("final", "tx_power")),
    ("n_iterations", ("n_iterations",)),
    ("channel_rel_err", ("errors", "channel_rel")),
    ("signal_rel_err", ("errors", "signal_rel")),
)


def _aggregate(summaries: list) -> dict:
    """Median and interquartile spread of final metrics across seeds."""
    stats = {}
    for name, path in _AGGREGATE_FIELDS:
        values = []
        for summary in summaries:
            node = summary
            for key in path:
                node = node.get(key) if node is not None else None
            if node is not None:
                values.append(float(node))
        if not values:
            continue
        q25, q50, q75 = (float(np.percentile(values, q)) for q in (25, 50, 75))
        stats[name] = {"median": q50, "q25": q25, "q75": q75, "iqr": q75 - q25}
    reasons: dict = {}
    for summary in summaries:
        reasons[summary["stop_reason"]] = reasons.get(summary["stop_reason"], 0) + 1
    return {
        "n_seeds": len(summaries),
        "seeds": [s["seed"] for s in summaries],
        "stop_reasons": dict(sorted(reasons.items())),
        "metrics": stats,
    }


def cmd_run(args) -> int:
    if args.seed is not None and args.seed < 0:
        raise ConfigError(f"--seed must be nonnegative, got {args.seed}")
    cfg = parse_run_config(_load_json(args.config))
    seeds = (args.seed,) if args.seed is not None else cfg.seeds
    out_dir = Path(args.out if args.out is not None else cfg.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    traces = {}
    summaries = []
    for seed in seeds:
        instance = _build_for_seed(cfg, seed)
        init_seed = sub_seed(seed, STREAM_INIT)
        config = AdmmConfig(init_seed=init_seed, **cfg.admm_fields)
        trace_path = out_dir / f"trace_{seed}.csv"
        records = []
        try:
            result = solve_jrc(instance, config, observer=records.append)
        except (DivergenceError, IllConditionedSystemError) as exc:
            # Iterates went non-finite, or grew until a linear system or
            # metric factorization broke down.  Either way, keep what the
            # run produced so the blow-up can be diagnosed.
            write_trace(trace_path, records)
            print(f"seed {seed}: {exc}; partial trace preserved in {trace_path}",
                  file=sys.stderr)
            return EXIT_DIVERGED
        write_trace(trace_path, result.records)
        summary = _summarize(seed, init_seed, result, instance, cfg.echo)
        _write_json(out_dir / f"summary_{seed}.json", summary)
        summaries.append(summary)
        traces[seed] = result.records
        if not args.quiet:
            line = (f"seed {seed}: stop={result.stop_reason} "
                    f"iters={summary['n_iterations']}")
            if summary["final"] is not None:
                line += (f" objective={summary['final']['objective']:.6g}"
                         f" power={summary['final']['tx_power']:.6g}")
            if summary["errors"] is not None:
                line += (f" g_rel={summary['errors']['channel_rel']:.4g}"
                         f" x_rel={summary['errors']['signal_rel']:.4g}")
            print(line)

    _write_json(out_dir / "aggregate.json", _aggregate(summaries))
    n_figures = 0
    if not args.no_figures:
        from .report import render_run_figures

        n_figures = len(render_run_figures(traces, out_dir))
    if not args.quiet:
        print(f"wrote {len(seeds)} run(s), aggregate.json, and "
              f"{n_figures} figure(s) to {out_dir}")
    return EXIT_OK


def cmd_bench(args) -> int:
    try:
        sizes = tuple(int(tok) for tok in args.sizes.split(",") if tok.strip())
    except ValueError as exc:
        raise ConfigError(f"--sizes must be comma-separated integers: {exc}") from exc

    def progress(point):
        if not args.quiet:
            print(f"N={point.n:4d} T={point.t_symbols:4d}: "
                  f"{point.median_iter_seconds * 1e3:9.3f} ms/iteration "
                  f"({point.reps} reps x {point.iters_per_rep} iters)")

    try:
        report = run_bench(sizes=sizes, t_factor=args.t_factor, reps=args.reps,
                           iters=args.iters, seed=args.seed, progress=progress)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if not args.quiet:
        print(f"log-log slope: {report.slope:.3f}")
    if args.out is not None:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        doc = report.as_dict()
        doc["t_factor"] = args.t_factor
        doc["seed"] = args.seed
        _write_json(out_dir / "bench.json", doc)
        if not args.no_figures:
            from .report import render_bench_figure

            render_bench_figure([p.n for p in report.points],
                                [p.median_iter_seconds for p in report.points],
                                report.slope, out_dir / "fig_bench.png")
        if not args.quiet:
            print(f"wrote bench report to {out_dir}")
    return EXIT_OK


def cmd_inspect(args) -> int:
    doc = _load_json(args.path)
    try:
        instance = instance_from_dict(doc)
    except (ValueError, KeyError, TypeError) as exc:
        raise ConfigError(f"{args.path}: {exc}") from exc

    def shape(m) -> str:
        return f"{m.shape[0]} x {m.shape[1]}"

    print(f"format:          {doc.get('format')}")
    print(f"master seed:     {doc.get('master_seed')}")
    print(f"y_radar:         {shape(instance.y_radar)}")
    print(f"y_comm:          {shape(instance.y_comm)}")
    print(f"h_comm:          {shape(instance.h_comm)}")
    if instance.g_nominal is not None:
        print(f"g_nominal:       {shape(instance.g_nominal)} (deviation mode)")
    else:
        print(f"g (estimated):   {instance.n_rx_radar} x {instance.n_tx}")
    print(f"x (estimated):   {instance.n_tx} x {instance.t_symbols}")
    print(f"lambda_radar:    {instance.lambda_radar}")
    print(f"lambda_comm:     {instance.lambda_comm}")
    print(f"noise_var:       {instance.noise_var}")
    print(f"reg_channel:     {instance.reg_channel.to_dict()}")
    print(f"reg_signal:      {instance.reg_signal.to_dict()}")
    h = instance.h_comm
    print(f"cond(H^H H):     {np.linalg.cond(hermitian(h) @ h):.6g}")
    truth = instance.ground_truth
    if truth is None:
        print("ground truth:    absent")
    else:
        x = truth.x_true
        print(f"tx power:        {tx_power(x):.9g}")
        if truth.delta_g is not None:
            print(f"||delta_g||_F^2: {frob_norm_sq(truth.delta_g):.9g}")
        print(f"cond(X X^H):     {np.linalg.cond(x @ hermitian(x)):.6g}")
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    """Argument errors map to the config exit code, not argparse's own."""

    def error(self, message):
        raise ConfigError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="dualblind",
                     description="ADMM dual-blind deconvolution experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="solve configured scenarios and write traces")
    p_run.add_argument("--config", required=True, help="JSON run configuration")
    p_run.add_argument("--seed", type=int, default=None,
                       help="run only this master seed (overrides the config list)")
    p_run.add_argument("--out", default=None,
                       help="output directory (overrides config output_dir)")
    p_run.add_argument("--quiet", action="store_true", help="suppress progress lines")
    p_run.add_argument("--no-figures", action="store_true",
                       help="skip PNG rendering, write only CSV/JSON")
    p_run.set_defaults(func=cmd_run)

    p_bench = sub.add_parser("bench", help="measure per-iteration cost scaling")
    p_bench.add_argument("--sizes", default=",".join(str(n) for n in DEFAULT_SIZES),
                         help="comma-separated ascending problem sizes")
    p_bench.add_argument("--t-factor", type=int, default=2,
                         help="symbols per antenna (T = t_factor * N)")
    p_bench.add_argument("--reps", type=int, default=3, help="repetitions per size")
    p_bench.add_argument("--iters", type=int, default=6,
                         help="solver iterations per repetition")
    p_bench.add_argument("--seed", type=int, default=0, help="instance seed base")
    p_bench.add_argument("--out", default=None,
                         help="directory for bench.json and the scaling figure")
    p_bench.add_argument("--quiet", action="store_true")
    p_bench.add_argument("--no-figures", action="store_true")
    p_bench.set_defaults(func=cmd_bench)

    p_inspect = sub.add_parser("inspect", help="describe a saved instance file")
    p_inspect.add_argument("path", help="instance JSON produced by save_instance")
    p_inspect.set_defaults(func=cmd_inspect)
    return parser


def main(argv=None) -> int:
    try:
        args = _build_parser().parse_args(argv)
        return args.func(args)
    except (ConfigError, NotDifferentiableError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DivergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    except IllConditionedSystemError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
