"""Joint radar-communication dual-blind solver.

Extends the generic engine with a second data term: the same unknown
signal ``X`` is observed through the unknown radar channel ``G`` and
through a known communication channel ``H``:

    minimize  (lr/2) ||Y_r - G X||_F^2 + (lc/2) ||Y_c - H X||_F^2
              + w1 R(G or dG) + w2 C(X)
    subject to  G (or dG) = Z1,  X = Z2.

Two channel parameterizations are supported.  In full mode the solver
estimates ``G`` directly.  When a nominal channel ``G0`` is attached the
solver runs in delta mode: the unknown becomes the deviation
``dG = G - G0``, the radar data term is fitted against
``Y_r - G0 X``, and the channel regularizer acts on the deviation, which
is how a bounded-perturbation model (``frob_ball`` on ``dG``) is
expressed.

With ``lambda_comm = 0`` the solver reduces exactly, float for float, to
the generic engine with fidelity weight ``lambda_radar``; with
``lambda_radar = 0`` the signal block reduces to the generic signal update
against the communication data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .admm import (
    AdmmConfig,
    AdmmState,
    SolveResult,
    _fidelity_sum,
    _make_initial_state,
    _run_admm,
    _signal_system,
    _weighted_reg_sum,
    update_channel,
)
from .linalg import as_matrix, frob_norm_sq
from .metrics import IterationRecord, comm_sinr_db, radar_mutual_information, spectral_efficiency
from .regularizers import Regularizer, reg_prox

__all__ = [
    "GroundTruth",
    "JrcInstance",
    "JrcResult",
    "jrc_objective",
    "update_g_jrc",
    "update_x_jrc",
    "solve_jrc",
]


def _default_reg() -> Regularizer:
    return Regularizer.squared_frobenius(0.01)


@dataclass(frozen=True, eq=False)
class GroundTruth:
    """Simulation-only reference values carried along for scoring."""

    g_true: np.ndarray
    x_true: np.ndarray
    delta_g: np.ndarray | None = None


@dataclass(frozen=True, eq=False)
class JrcInstance:
    """One joint radar-communication problem.

    ``y_radar`` is ``n_rx_radar x t``, ``y_comm`` is ``n_comm_rx x t`` and
    ``h_comm`` is ``n_comm_rx x n_tx``; the radar channel being estimated
    is ``n_rx_radar x n_tx``.  A non-None ``g_nominal`` switches the
    solver to delta mode.  ``noise_var`` is metadata for the trace's link
    metrics.
    """

    y_radar: np.ndarray
    y_comm: np.ndarray
    h_comm: np.ndarray
    g_nominal: np.ndarray | None = None
    lambda_radar: float = 1.0
    lambda_comm: float = 1.0
    reg_channel: Regularizer = field(default_factory=_default_reg)
    reg_signal: Regularizer = field(default_factory=_default_reg)
    noise_var: float = 1e-3
    ground_truth: GroundTruth | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "y_radar", as_matrix(self.y_radar, "y_radar"))
        object.__setattr__(self, "y_comm", as_matrix(self.y_comm, "y_comm"))
        object.__setattr__(self, "h_comm", as_matrix(self.h_comm, "h_comm"))
        if self.y_comm.shape[1] != self.y_radar.shape[1]:
            raise ValueError(
                f"observation symbol counts differ: y_radar has {self.y_radar.shape[1]}, "
                f"y_comm has {self.y_comm.shape[1]}"
            )
        if self.h_comm.shape[0] != self.y_comm.shape[0]:
            raise ValueError(
                f"h_comm rows {self.h_comm.shape[0]} do not match y_comm rows {self.y_comm.shape[0]}"
            )
        if self.g_nominal is not None:
            g0 = as_matrix(self.g_nominal, "g_nominal")
            object.__setattr__(self, "g_nominal", g0)
            expected = (self.y_radar.shape[0], self.h_comm.shape[1])
            if g0.shape != expected:
                raise ValueError(f"g_nominal shape {g0.shape} does not match {expected}")
        if self.lambda_radar < 0.0 or self.lambda_comm < 0.0:
            raise ValueError("data-term weights must be nonnegative")
        if self.lambda_radar + self.lambda_comm <= 0.0:
            raise ValueError("at least one data-term weight must be positive")
        if not (self.noise_var > 0.0):
            raise ValueError(f"noise_var must be positive, got {self.noise_var}")

    @property
    def n_tx(self) -> int:
        return self.h_comm.shape[1]

    @property
    def n_rx_radar(self) -> int:
        return self.y_radar.shape[0]

    @property
    def t_symbols(self) -> int:
        return self.y_radar.shape[1]

    @property
    def delta_mode(self) -> bool:
        return self.g_nominal is not None

    def compose_channel(self, channel_iterate: np.ndarray) -> np.ndarray:
        """Physical radar channel for a solver iterate (adds ``G0`` in delta mode)."""
        if self.g_nominal is None:
            return channel_iterate
        return self.g_nominal + channel_iterate

    def fidelity_value(self, channel_iterate: np.ndarray, signal: np.ndarray) -> float:
        return _fidelity_sum(self._data_terms(channel_iterate), signal)

    def _data_terms(self, channel_iterate: np.ndarray) -> list[tuple[float, np.ndarray, np.ndarray]]:
        terms = []
        if self.lambda_radar != 0.0:
            terms.append((self.lambda_radar, self.compose_channel(channel_iterate), self.y_radar))
        if self.lambda_comm != 0.0:
            terms.append((self.lambda_comm, self.h_comm, self.y_comm))
        return terms


@dataclass(frozen=True)
class JrcResult:
    """Channel and signal estimates plus the raw solve result fields.

    ``g_est`` is always the physical radar channel (nominal plus deviation
    in delta mode).  ``x_est`` is the final signal iterate, projected onto
    the power ball once when that constraint is active.
    """

    g_est: np.ndarray
    x_est: np.ndarray
    state: AdmmState
    records: list[IterationRecord]
    stop_reason: str


def jrc_objective(instance: JrcInstance, g: np.ndarray, x: np.ndarray) -> float:
    """Unaugmented objective at a physical channel ``g`` and signal ``x``.

    In delta mode the channel regularizer is evaluated on the deviation
    ``g - g_nominal``.  Returns ``math.inf`` when an active indicator is
    infeasible.
    """
    terms = []
    if instance.lambda_radar != 0.0:
        terms.append((instance.lambda_radar, g, instance.y_radar))
    if instance.lambda_comm != 0.0:
        terms.append((instance.lambda_comm, instance.h_comm, instance.y_comm))
    fid = _fidelity_sum(terms, x)
    reg_arg = g - instance.g_nominal if instance.g_nominal is not None else g
    regs = _weighted_reg_sum([(instance.reg_channel, reg_arg), (instance.reg_signal, x)])
    return math.inf if math.isinf(regs) else fid + regs


def update_g_jrc(instance: JrcInstance, x: np.ndarray, z1: np.ndarray, mu1: np.ndarray,
                 rho: float) -> np.ndarray:
    """Radar-channel block minimizer.

    Fits ``Y_r`` in full mode and the residual ``Y_r - G0 X`` in delta
    mode, so the returned matrix is the channel iterate in the instance's
    own parameterization (``G`` or ``dG``).
    """
    if instance.delta_mode:
        y_eff = instance.y_radar - instance.g_nominal @ x
    else:
        y_eff = instance.y_radar
    return update_channel(y_eff, x, z1, mu1, rho, instance.lambda_radar)


def update_x_jrc(instance: JrcInstance, channel_iterate: np.ndarray, z2: np.ndarray,
                 mu2: np.ndarray, rho: float) -> np.ndarray:
    """Signal block minimizer over both data terms.

    Solves ``(lr G^H G + lc H^H H + rho I) X = lr G^H Y_r + lc H^H Y_c
    - mu2 + rho Z2`` with ``G`` the physical channel for the given
    iterate.  A zero weight drops its term exactly.
    """
    return _signal_system(instance._data_terms(channel_iterate), z2, mu2, rho)


class _JrcProblem:
    """Adapter binding a :class:`JrcInstance` to the shared loop."""

    def __init__(self, instance: JrcInstance):
        self.instance = instance
        self.reg_channel = instance.reg_channel
        self.reg_signal = instance.reg_signal

    def initial_state(self, seed: int, scale: float) -> AdmmState:
        inst = self.instance
        return _make_initial_state(
            (inst.n_rx_radar, inst.n_tx), (inst.n_tx, inst.t_symbols), seed, scale
        )

    def step_channel(self, signal, z1, mu1, rho):
        return update_g_jrc(self.instance, signal, z1, mu1, rho)

    def step_signal(self, channel, z2, mu2, rho):
        return update_x_jrc(self.instance, channel, z2, mu2, rho)

    def objective(self, channel, signal, z1, z2) -> float:
        fid = self.instance.fidelity_value(channel, signal)
        regs = _weighted_reg_sum([(self.reg_channel, z1), (self.reg_signal, z2)])
        return math.inf if math.isinf(regs) else fid + regs

    def link_metrics(self, channel, signal) -> tuple[float, float, float]:
        inst = self.instance
        try:
            sinr = comm_sinr_db(inst.y_comm, inst.h_comm, signal)
        except ValueError:
            sinr = math.nan
        se_bits = spectral_efficiency(inst.h_comm, signal, inst.noise_var, inst.t_symbols)
        mi_bits = radar_mutual_information(
            inst.compose_channel(channel), signal, inst.noise_var, inst.t_symbols
        )
        return sinr, se_bits, mi_bits

    def data_scale(self) -> float:
        # Frobenius norm of the stacked observations, restricted to the
        # active data terms so that dropping one (weight zero) leaves the
        # stopping threshold of the remaining single-term problem.
        inst = self.instance
        total = 0.0
        if inst.lambda_radar != 0.0:
            total += frob_norm_sq(inst.y_radar)
        if inst.lambda_comm != 0.0:
            total += frob_norm_sq(inst.y_comm)
        return math.sqrt(total)


def solve_jrc(instance: JrcInstance, config: AdmmConfig | None = None,
              observer: Callable[[IterationRecord], None] | None = None,
              init: AdmmState | None = None) -> JrcResult:
    """Run ADMM on a joint radar-communication instance.

    Same loop, stopping rule and observer contract as the generic
    :func:`dualblind.admm.solve`; the stopping scale is the Frobenius norm
    of the stacked observations of the active data terms.  The returned
    ``g_est`` is the physical
    channel; ``x_est`` picks up one terminal power-ball projection when
    the signal regularizer is that constraint.
    """
    result = _run_admm(_JrcProblem(instance), config or AdmmConfig(), observer, init)
    g_est = instance.compose_channel(result.state.channel)
    x_est = result.state.signal
    if instance.reg_signal.kind == "power_ball" and instance.reg_signal.weight != 0.0:
        x_est = reg_prox(instance.reg_signal, x_est, 1.0)
    return JrcResult(
        g_est=g_est,
        x_est=x_est,
        state=result.state,
        records=result.records,
        stop_reason=result.stop_reason,
    )
