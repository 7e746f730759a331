"""ADMM engine for dual-blind deconvolution.

The generic problem estimates an unknown channel ``H`` and an unknown
signal ``X`` from one noisy product ``Y ~ H X``:

    minimize  (c/2) ||Y - H X||_F^2 + w1 R(Z1) + w2 C(Z2)
    subject to  H = Z1,  X = Z2

with ``c`` the fidelity weight (``c = 2`` reproduces a plain unweighted
``||Y - H X||_F^2`` objective).  The augmented Lagrangian, using the real
inner product ``<A, B> = Re tr(A^H B)``, is

    L = fidelity + w1 R(Z1) + w2 C(Z2)
        + <mu1, H - Z1> + <mu2, X - Z2>
        + (rho/2) ||H - Z1||_F^2 + (rho/2) ||X - Z2||_F^2.

One iteration runs channel, signal, Z1, Z2, then both dual ascents, in
that Gauss-Seidel order.  The channel and signal blocks are exact
minimizers obtained through Hermitian positive definite solves:

    H  = (c Y X^H   - mu1 + rho Z1) (c X X^H + rho I)^(-1)
    X  = (rho I + c H^H H)^(-1) (c H^H Y - mu2 + rho Z2)

The Z blocks either take one explicit gradient step on their subproblem
("smooth" mode, smooth regularizers only) or solve it exactly through the
proximal map ("prox" mode):

    Z = prox_{(w/rho) reg}(anchor + mu/rho)

where ``anchor`` is the freshly updated primal block.  The dual shift
``mu/rho`` inside the prox argument is what makes the step the exact
subproblem minimizer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from time import perf_counter
from typing import Callable, Sequence

import numpy as np

from .linalg import as_matrix, frob_norm, frob_norm_sq, frob_inner, hermitian, randn_complex, solve_left, solve_right
from .metrics import IterationRecord, comm_sinr_db, radar_mutual_information, spectral_efficiency, tx_power
from .regularizers import Regularizer, reg_eval, reg_grad, reg_prox

__all__ = [
    "Z_MODES",
    "DivergenceError",
    "AdmmConfig",
    "AdmmState",
    "BlindInstance",
    "SolveResult",
    "update_channel",
    "update_signal",
    "update_z_smooth",
    "update_z_prox",
    "update_duals",
    "residuals",
    "lagrangian_eval",
    "initial_state",
    "solve",
]

Z_MODES = ("smooth", "prox")


class DivergenceError(RuntimeError):
    """A solver iterate became non-finite."""

    def __init__(self, iteration: int):
        super().__init__(f"solver diverged: non-finite iterate at iteration {iteration}")
        self.iteration = iteration


@dataclass(frozen=True)
class AdmmConfig:
    """Solver knobs shared by the generic and JRC front ends.

    ``eta_z1``/``eta_z2`` are the smooth-mode gradient step sizes and are
    ignored in prox mode.  ``init_seed`` seeds the small Gaussian signal
    initializer (scale ``init_scale``); the channel always starts at zero.
    A zero ``tol`` disables the early stop (the residual test is strict),
    so the solver always runs the full ``max_iter`` budget.

    ``legacy_prox_no_dual_shift`` drops the ``mu / rho`` offset from the
    proximal auxiliary updates (``prox(anchor)`` instead of
    ``prox(anchor + mu / rho)``).  That variant circulates in some
    write-ups but is not the exact subproblem minimizer, so its fixed
    points are biased; it exists for comparison only and is off by
    default.
    """

    rho: float = 1.0
    max_iter: int = 50
    tol: float = 1e-4
    eta_z1: float = 0.5
    eta_z2: float = 0.5
    z_mode: str = "prox"
    init_seed: int = 0
    init_scale: float = 1e-2
    legacy_prox_no_dual_shift: bool = False

    def __post_init__(self) -> None:
        if not (self.rho > 0.0):
            raise ValueError(f"rho must be positive, got {self.rho}")
        if self.max_iter < 0:
            raise ValueError(f"max_iter must be >= 0, got {self.max_iter}")
        if not (self.tol >= 0.0):
            raise ValueError(f"tol must be >= 0, got {self.tol}")
        if not (self.eta_z1 > 0.0 and self.eta_z2 > 0.0):
            raise ValueError("smooth-mode step sizes must be positive")
        if self.z_mode not in Z_MODES:
            raise ValueError(f"z_mode must be one of {Z_MODES}, got {self.z_mode!r}")
        if not (self.init_scale >= 0.0):
            raise ValueError(f"init_scale must be nonnegative, got {self.init_scale}")


@dataclass(eq=False)
class AdmmState:
    """Primal, auxiliary and dual iterates after ``iter`` iterations."""

    channel: np.ndarray
    signal: np.ndarray
    z1: np.ndarray
    z2: np.ndarray
    mu1: np.ndarray
    mu2: np.ndarray
    iter: int = 0

    def __post_init__(self) -> None:
        for name in ("z1", "mu1"):
            if getattr(self, name).shape != self.channel.shape:
                raise ValueError(f"{name} shape {getattr(self, name).shape} does not match channel {self.channel.shape}")
        for name in ("z2", "mu2"):
            if getattr(self, name).shape != self.signal.shape:
                raise ValueError(f"{name} shape {getattr(self, name).shape} does not match signal {self.signal.shape}")


@dataclass(frozen=True, eq=False)
class BlindInstance:
    """A generic dual-blind problem: one observation ``y ~ channel @ signal``.

    ``inner_dim`` is the shared dimension of the factors (channel columns,
    signal rows); it cannot be inferred from ``y`` alone.  ``noise_var``
    only feeds the informational link metrics on the trace, never the
    updates themselves.
    """

    y: np.ndarray
    inner_dim: int
    reg_channel: Regularizer = field(default_factory=Regularizer.zero)
    reg_signal: Regularizer = field(default_factory=Regularizer.zero)
    fidelity_weight: float = 2.0
    noise_var: float = 1e-3

    def __post_init__(self) -> None:
        object.__setattr__(self, "y", as_matrix(self.y, "y"))
        if self.inner_dim < 1:
            raise ValueError(f"inner_dim must be positive, got {self.inner_dim}")
        if not (self.fidelity_weight > 0.0):
            raise ValueError(f"fidelity weight must be positive, got {self.fidelity_weight}")
        if not (self.noise_var > 0.0):
            raise ValueError(f"noise_var must be positive, got {self.noise_var}")

    def fidelity_value(self, channel: np.ndarray, signal: np.ndarray) -> float:
        return _fidelity_sum([(self.fidelity_weight, channel, self.y)], signal)


@dataclass(frozen=True)
class SolveResult:
    """Final state, per-iteration records, and which stop rule fired."""

    state: AdmmState
    records: list[IterationRecord]
    stop_reason: str


def update_channel(y_eff: np.ndarray, x: np.ndarray, z1: np.ndarray, mu1: np.ndarray,
                   rho: float, c: float) -> np.ndarray:
    """Exact channel-block minimizer.

    Returns ``(c Y X^H - mu1 + rho Z1)(c X X^H + rho I)^(-1)``.  With
    ``c = 0`` or ``X = 0`` the data term vanishes and the update is a pure
    proximal pull toward ``Z1 - mu1/rho``.
    """
    xh = hermitian(x)
    a = c * (x @ xh) + rho * np.eye(x.shape[0], dtype=np.complex128)
    b = c * (y_eff @ xh) - mu1 + rho * z1
    return solve_right(a, b, context="channel update")


def _signal_system(terms: Sequence[tuple[float, np.ndarray, np.ndarray]],
                   z2: np.ndarray, mu2: np.ndarray, rho: float) -> np.ndarray:
    """Solve the shared signal-block system for one or more data terms.

    ``terms`` is a sequence of ``(weight, channel, observation)`` triples;
    the solution minimizes ``sum_k (w_k/2) ||Y_k - H_k X||_F^2`` plus the
    dual and penalty terms.
    """
    a = rho * np.eye(z2.shape[0], dtype=np.complex128)
    b = rho * z2 - mu2
    for weight, channel, obs in terms:
        ch = hermitian(channel)
        a = a + weight * (ch @ channel)
        b = b + weight * (ch @ obs)
    return solve_left(a, b, context="signal update")


def update_signal(h: np.ndarray, y: np.ndarray, z2: np.ndarray, mu2: np.ndarray,
                  rho: float, c: float) -> np.ndarray:
    """Exact signal-block minimizer ``(rho I + c H^H H)^(-1)(c H^H Y - mu2 + rho Z2)``."""
    return _signal_system([(c, h, y)], z2, mu2, rho)


def update_z_smooth(z: np.ndarray, anchor: np.ndarray, mu: np.ndarray,
                    spec: Regularizer, weight: float, rho: float, eta: float) -> np.ndarray:
    """One explicit gradient step on the auxiliary subproblem.

    Returns ``z - eta * (weight * grad reg(z) - mu + rho (z - anchor))``.
    Requires a smooth regularizer.
    """
    grad = weight * reg_grad(spec, z) - mu + rho * (z - anchor)
    return z - eta * grad


def update_z_prox(anchor: np.ndarray, mu: np.ndarray, spec: Regularizer,
                  weight: float, rho: float) -> np.ndarray:
    """Exact auxiliary-subproblem minimizer via the proximal map.

    Returns ``prox_{(weight/rho) reg}(anchor + mu/rho)``, the argmin of
    ``weight*reg(z) - <mu, z> + (rho/2)||anchor - z||_F^2``.
    """
    v = anchor + mu / rho
    if weight == 0.0:
        # A zero weight removes the term entirely, indicators included.
        return v
    return reg_prox(spec, v, weight / rho)


def update_duals(mu: np.ndarray, primal_gap: np.ndarray, rho: float) -> np.ndarray:
    """Dual ascent ``mu + rho * primal_gap``."""
    if mu.shape != primal_gap.shape:
        raise ValueError(f"dual shape {mu.shape} does not match gap shape {primal_gap.shape}")
    return mu + rho * primal_gap


def residuals(state: AdmmState, z1_prev: np.ndarray, z2_prev: np.ndarray,
              rho: float) -> tuple[float, float, float, float]:
    """Primal gaps and scaled auxiliary steps ``(r1, r2, s1, s2)``.

    ``r1 = ||channel - z1||_F``, ``r2 = ||signal - z2||_F``,
    ``s1 = rho ||z1 - z1_prev||_F``, ``s2 = rho ||z2 - z2_prev||_F``.
    """
    r1 = frob_norm(state.channel - state.z1)
    r2 = frob_norm(state.signal - state.z2)
    s1 = rho * frob_norm(state.z1 - z1_prev)
    s2 = rho * frob_norm(state.z2 - z2_prev)
    return r1, r2, s1, s2


def _weighted_reg_sum(pairs: Sequence[tuple[Regularizer, np.ndarray]]) -> float:
    """Sum of ``weight * reg_eval`` terms; ``inf`` as soon as an active
    indicator is infeasible.  Zero-weight terms are skipped entirely."""
    total = 0.0
    for spec, v in pairs:
        if spec.weight == 0.0:
            continue
        value = reg_eval(spec, v)
        if math.isinf(value):
            return math.inf
        total += spec.weight * value
    return total


def lagrangian_eval(instance, state: AdmmState, rho: float) -> float:
    """Full augmented Lagrangian at ``state``.

    Works for any instance exposing ``fidelity_value(channel, signal)``
    plus ``reg_channel``/``reg_signal``.  Returns ``math.inf`` when an
    active indicator regularizer is infeasible at its auxiliary iterate.
    """
    regs = _weighted_reg_sum([(instance.reg_channel, state.z1), (instance.reg_signal, state.z2)])
    if math.isinf(regs):
        return math.inf
    gap1 = state.channel - state.z1
    gap2 = state.signal - state.z2
    return (
        instance.fidelity_value(state.channel, state.signal)
        + regs
        + frob_inner(state.mu1, gap1)
        + frob_inner(state.mu2, gap2)
        + 0.5 * rho * frob_norm_sq(gap1)
        + 0.5 * rho * frob_norm_sq(gap2)
    )


def _fidelity_sum(terms: Sequence[tuple[float, np.ndarray, np.ndarray]], x: np.ndarray) -> float:
    """``sum_k (w_k/2) ||Y_k - H_k X||_F^2`` skipping zero-weight terms."""
    total = 0.0
    for weight, channel, obs in terms:
        if weight == 0.0:
            continue
        total += 0.5 * weight * frob_norm_sq(obs - channel @ x)
    return total


def _make_initial_state(channel_shape: tuple[int, int], signal_shape: tuple[int, int],
                        seed: int, scale: float) -> AdmmState:
    """Default initializer: zero channel, small Gaussian signal, auxiliary
    copies of the primals, zero duals."""
    channel = np.zeros(channel_shape, dtype=np.complex128)
    signal = scale * randn_complex(signal_shape[0], signal_shape[1], seed)
    return AdmmState(
        channel=channel,
        signal=signal,
        z1=channel.copy(),
        z2=signal.copy(),
        mu1=np.zeros(channel_shape, dtype=np.complex128),
        mu2=np.zeros(signal_shape, dtype=np.complex128),
        iter=0,
    )


class _GenericProblem:
    """Adapter binding a :class:`BlindInstance` to the shared loop."""

    def __init__(self, instance: BlindInstance):
        self.instance = instance
        self.reg_channel = instance.reg_channel
        self.reg_signal = instance.reg_signal

    def initial_state(self, seed: int, scale: float) -> AdmmState:
        rows, t = self.instance.y.shape
        return _make_initial_state((rows, self.instance.inner_dim), (self.instance.inner_dim, t), seed, scale)

    def step_channel(self, signal, z1, mu1, rho):
        return update_channel(self.instance.y, signal, z1, mu1, rho, self.instance.fidelity_weight)

    def step_signal(self, channel, z2, mu2, rho):
        return update_signal(channel, self.instance.y, z2, mu2, rho, self.instance.fidelity_weight)

    def objective(self, channel, signal, z1, z2) -> float:
        fid = _fidelity_sum([(self.instance.fidelity_weight, channel, self.instance.y)], signal)
        regs = _weighted_reg_sum([(self.reg_channel, z1), (self.reg_signal, z2)])
        return math.inf if math.isinf(regs) else fid + regs

    def link_metrics(self, channel, signal) -> tuple[float, float, float]:
        # The generic problem has a single link, so the estimated channel
        # stands in for both roles and the efficiency/information columns
        # coincide by construction.
        inst = self.instance
        try:
            sinr = comm_sinr_db(inst.y, channel, signal)
        except ValueError:
            sinr = math.nan
        bits = spectral_efficiency(channel, signal, inst.noise_var, inst.y.shape[1])
        return sinr, bits, bits

    def data_scale(self) -> float:
        return frob_norm(self.instance.y)


def _run_admm(problem, config: AdmmConfig, observer: Callable[[IterationRecord], None] | None,
              init: AdmmState | None) -> SolveResult:
    """Shared iteration loop for the generic and JRC front ends."""
    if config.z_mode == "smooth":
        for spec in (problem.reg_channel, problem.reg_signal):
            reg_grad(spec, np.zeros((1, 1), dtype=np.complex128))  # raises if not smooth
    state = init if init is not None else problem.initial_state(config.init_seed, config.init_scale)
    records: list[IterationRecord] = []
    scale = max(1.0, problem.data_scale())
    stop_reason = "max_iter"
    start = perf_counter()
    for k in range(1, config.max_iter + 1):
        z1_prev = state.z1
        z2_prev = state.z2
        channel = problem.step_channel(state.signal, state.z1, state.mu1, config.rho)
        signal = problem.step_signal(channel, state.z2, state.mu2, config.rho)
        z1 = _z_step(channel, state.z1, state.mu1, problem.reg_channel, config, config.eta_z1)
        z2 = _z_step(signal, state.z2, state.mu2, problem.reg_signal, config, config.eta_z2)
        mu1 = update_duals(state.mu1, channel - z1, config.rho)
        mu2 = update_duals(state.mu2, signal - z2, config.rho)
        state = AdmmState(channel=channel, signal=signal, z1=z1, z2=z2, mu1=mu1, mu2=mu2, iter=k)
        for arr in (channel, signal, z1, z2, mu1, mu2):
            if not np.isfinite(arr).all():
                raise DivergenceError(k)
        r1, r2, s1, s2 = residuals(state, z1_prev, z2_prev, config.rho)
        if not all(math.isfinite(v) for v in (r1, r2, s1, s2)):
            # Entries can stay representable while their energy overflows;
            # that is still a diverged run.
            raise DivergenceError(k)
        sinr, se_bits, mi_bits = problem.link_metrics(channel, signal)
        record = IterationRecord(
            iter=k, r1=r1, r2=r2, s1=s1, s2=s2,
            objective=problem.objective(channel, signal, z1, z2),
            sinr_db=sinr, spectral_eff_bits=se_bits, radar_mi_bits=mi_bits,
            tx_power=tx_power(signal), elapsed_s=perf_counter() - start,
        )
        records.append(record)
        if observer is not None:
            observer(record)
        if max(r1, r2, s1, s2) < config.tol * scale:
            stop_reason = "tol"
            break
    return SolveResult(state=state, records=records, stop_reason=stop_reason)


def _z_step(anchor, z_prev, mu, spec, config: AdmmConfig, eta: float):
    if config.z_mode == "smooth":
        return update_z_smooth(z_prev, anchor, mu, spec, spec.weight, config.rho, eta)
    if config.legacy_prox_no_dual_shift:
        mu = np.zeros_like(mu)
    return update_z_prox(anchor, mu, spec, spec.weight, config.rho)


def initial_state(instance: BlindInstance, seed: int = 0, scale: float = 1e-2) -> AdmmState:
    """Default starting point for :func:`solve` (exposed for custom runs)."""
    return _GenericProblem(instance).initial_state(seed, scale)


def solve(instance: BlindInstance, config: AdmmConfig | None = None,
          observer: Callable[[IterationRecord], None] | None = None,
          init: AdmmState | None = None) -> SolveResult:
    """Run ADMM on a generic dual-blind instance.

    Stops when ``max(r1, r2, s1, s2) < tol * max(1, ||Y||_F)`` or after
    ``max_iter`` iterations, whichever comes first; the result names the
    rule that fired.  ``observer`` is called once per iteration with the
    fresh :class:`IterationRecord` and must not mutate solver state.
    Raises :class:`DivergenceError` when an iterate or residual goes
    non-finite.
    """
    return _run_admm(_GenericProblem(instance), config or AdmmConfig(), observer, init)
