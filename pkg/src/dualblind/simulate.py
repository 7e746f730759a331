"""mmWave joint radar-communication scenario generator.

Builds synthetic :class:`~dualblind.jrc.JrcInstance` problems: a uniform
linear array illuminates a handful of point targets while the same
transmit signal reaches a small communication receiver.  The radar
channel is a sum of outer products of receive and transmit steering
vectors weighted by complex reflection coefficients; hardware
imperfection enters as small per-element gain and phase errors, and the
channel actually generating the data deviates from the nominal one by a
Frobenius-bounded perturbation.

Every random component draws from its own stream derived from one master
seed via ``SeedSequence(master, spawn_key=(tag,))``.  The tag table:

==== =======================================
0    scene sampling (target angles and RCS)
1    steering-vector imperfections
2    bounded channel perturbation
3    communication channel
4    transmit signal
5    radar observation noise
6    communication observation noise
7    solver signal initializer
==== =======================================

Within the steering stream, target ``i`` uses ``sub_seed(seed, 2*i)`` for
its receive vector and ``sub_seed(seed, 2*i + 1)`` for its transmit
vector.  The perturbation stream draws the Gaussian direction first, then
the uniform radius factor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .jrc import GroundTruth, JrcInstance
from .linalg import as_matrix, frob_norm_sq, hermitian, make_rng, randn_complex, sub_seed
from .regularizers import Regularizer

__all__ = [
    "DEFAULT_REG_WEIGHT",
    "SPEED_OF_LIGHT",
    "STREAM_SCENE",
    "STREAM_STEERING",
    "STREAM_DELTA",
    "STREAM_COMM",
    "STREAM_SIGNAL",
    "STREAM_RADAR_NOISE",
    "STREAM_COMM_NOISE",
    "STREAM_INIT",
    "SteeringImperfection",
    "RadarScene",
    "SimConfig",
    "steering_vector",
    "gen_radar_channel",
    "perturb_channel",
    "gen_comm_channel",
    "gen_signal",
    "observe",
    "build_instance",
    "solver_init_seed",
]

SPEED_OF_LIGHT = 299_792_458.0

(
    STREAM_SCENE,
    STREAM_STEERING,
    STREAM_DELTA,
    STREAM_COMM,
    STREAM_SIGNAL,
    STREAM_RADAR_NOISE,
    STREAM_COMM_NOISE,
    STREAM_INIT,
) = range(8)

G0_MODELS = ("scene", "gaussian")


@dataclass(frozen=True)
class SteeringImperfection:
    """Per-element multiplicative error scales: gain ``1 + a_k`` with
    ``a_k ~ N(0, amplitude_sigma^2)`` and phase rotation ``exp(i phi_k)``
    with ``phi_k ~ N(0, phase_sigma^2)``."""

    amplitude_sigma: float = 0.05
    phase_sigma: float = 0.05

    def __post_init__(self) -> None:
        if self.amplitude_sigma < 0.0 or self.phase_sigma < 0.0:
            raise ValueError("imperfection scales must be nonnegative")

    @property
    def active(self) -> bool:
        return self.amplitude_sigma > 0.0 or self.phase_sigma > 0.0


@dataclass(frozen=True)
class RadarScene:
    """Array geometry plus point targets.

    Angles are in radians off broadside, one per target, each strictly
    inside (-pi/2, pi/2); ``rcs`` holds the matching complex reflection
    coefficients.  ``element_spacing_wl`` is in wavelengths.
    """

    angles_rad: tuple[float, ...]
    rcs: tuple[complex, ...]
    n_tx: int = 8
    n_rx_radar: int = 4
    carrier_hz: float = 28e9
    wavelength_m: float = 0.011
    element_spacing_wl: float = 0.5
    imperfection: SteeringImperfection = field(default_factory=SteeringImperfection)

    def __post_init__(self) -> None:
        object.__setattr__(self, "angles_rad", tuple(float(a) for a in self.angles_rad))
        object.__setattr__(self, "rcs", tuple(complex(s) for s in self.rcs))
        if len(self.angles_rad) != len(self.rcs):
            raise ValueError(
                f"{len(self.angles_rad)} angles but {len(self.rcs)} reflection coefficients"
            )
        for a in self.angles_rad:
            if not (-math.pi / 2 < a < math.pi / 2):
                raise ValueError(f"target angle {a} rad is outside (-pi/2, pi/2)")
        if self.n_tx < 1 or self.n_rx_radar < 1:
            raise ValueError("array sizes must be positive")
        if not (self.carrier_hz > 0.0 and self.wavelength_m > 0.0):
            raise ValueError("carrier and wavelength must be positive")
        nominal = SPEED_OF_LIGHT / self.carrier_hz
        if abs(self.wavelength_m - nominal) > 0.05 * nominal:
            raise ValueError(
                f"wavelength {self.wavelength_m} m is more than 5% away from "
                f"c/carrier = {nominal:.6g} m"
            )
        if not (self.element_spacing_wl > 0.0):
            raise ValueError("element spacing must be positive")

    @property
    def n_targets(self) -> int:
        return len(self.angles_rad)

    @classmethod
    def sample(cls, seed: int, n_targets: int = 4, fov_rad: float = math.pi / 3,
               **overrides) -> "RadarScene":
        """Draw a scene: angles uniform on ``(-fov, +fov)`` (default +-60
        degrees), unit-variance complex Gaussian reflection coefficients."""
        if n_targets < 0:
            raise ValueError(f"n_targets must be >= 0, got {n_targets}")
        rng = make_rng(seed)
        angles = tuple(rng.uniform(-fov_rad, fov_rad, size=n_targets).tolist())
        re = rng.standard_normal(n_targets)
        im = rng.standard_normal(n_targets)
        rcs = tuple((math.sqrt(0.5) * (re + 1j * im)).tolist())
        return cls(angles_rad=angles, rcs=rcs, **overrides)


@dataclass(frozen=True)
class SimConfig:
    """Scenario-level knobs independent of the array geometry.

    ``power_fraction`` places the true signal strictly inside the power
    budget: ``Tr(X X^H) = power_fraction * power_budget``.  With
    ``estimate_delta`` (the default) the built instance carries the
    nominal channel so the solver estimates the bounded deviation rather
    than the full channel; without a nominal anchor the factorization
    ``G X`` is identifiable only up to an invertible mixing on the inner
    dimension, so full-channel recovery from a cold start is not a
    meaningful target.  Set ``estimate_delta=False`` to build an
    instance for that fully blind variant anyway.
    """

    n_comm_rx: int = 2
    t_symbols: int = 16
    noise_var: float = 1e-3
    power_budget: float = 10.0
    power_fraction: float = 0.75
    delta_g_bound_sq: float = 1e-2
    seed: int = 0
    g0_model: str = "scene"
    estimate_delta: bool = True

    def __post_init__(self) -> None:
        if self.n_comm_rx < 1 or self.t_symbols < 1:
            raise ValueError("n_comm_rx and t_symbols must be positive")
        if self.noise_var < 0.0:
            raise ValueError(f"noise_var must be >= 0, got {self.noise_var}")
        if not (self.power_budget > 0.0):
            raise ValueError(f"power_budget must be positive, got {self.power_budget}")
        if not (0.0 < self.power_fraction <= 1.0):
            raise ValueError(f"power_fraction must be in (0, 1], got {self.power_fraction}")
        if self.delta_g_bound_sq < 0.0:
            raise ValueError(f"delta_g_bound_sq must be >= 0, got {self.delta_g_bound_sq}")
        if self.seed < 0:
            raise ValueError(f"seed must be nonnegative, got {self.seed}")
        if self.g0_model not in G0_MODELS:
            raise ValueError(f"g0_model must be one of {G0_MODELS}, got {self.g0_model!r}")


def steering_vector(n_elems: int, angle_rad: float, spacing_wl: float = 0.5,
                    imperfection: SteeringImperfection | None = None,
                    seed: int = 0) -> np.ndarray:
    """Uniform-linear-array steering vector as an ``n_elems x 1`` column.

    Element ``k`` of the ideal vector is
    ``exp(+i 2 pi spacing_wl k sin(angle))``; with active imperfection
    scales each element is multiplied by ``(1 + a_k) exp(i phi_k)`` (gain
    errors drawn before phase errors).  Zero scales return the ideal
    vector regardless of the seed.
    """
    if n_elems < 1:
        raise ValueError(f"n_elems must be positive, got {n_elems}")
    k = np.arange(n_elems, dtype=np.float64)
    v = np.exp(2j * np.pi * spacing_wl * math.sin(angle_rad) * k)
    if imperfection is not None and imperfection.active:
        rng = make_rng(seed)
        gain = 1.0 + imperfection.amplitude_sigma * rng.standard_normal(n_elems)
        phase = imperfection.phase_sigma * rng.standard_normal(n_elems)
        v = v * gain * np.exp(1j * phase)
    return v.reshape(-1, 1)


def gen_radar_channel(scene: RadarScene, seed: int) -> np.ndarray:
    """Nominal radar channel: sum over targets of
    ``rcs_k * a_rx(theta_k) a_tx(theta_k)^H``.

    Zero targets give the zero matrix.  Each steering vector gets its own
    imperfection stream (see the module seed table), so the result is
    invariant to target ordering only when the imperfection scales are
    zero.
    """
    g = np.zeros((scene.n_rx_radar, scene.n_tx), dtype=np.complex128)
    for i, (theta, sigma) in enumerate(zip(scene.angles_rad, scene.rcs)):
        a_rx = steering_vector(scene.n_rx_radar, theta, scene.element_spacing_wl,
                               scene.imperfection, sub_seed(seed, 2 * i))
        a_tx = steering_vector(scene.n_tx, theta, scene.element_spacing_wl,
                               scene.imperfection, sub_seed(seed, 2 * i + 1))
        g = g + sigma * (a_rx @ hermitian(a_tx))
    return g


def perturb_channel(g_nominal: np.ndarray, bound_sq: float, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Apply a Frobenius-bounded random deviation to the nominal channel.

    Draws a complex Gaussian direction, then a radius factor
    ``u ~ Uniform(0, 1]``, and scales the deviation so that
    ``||delta||_F^2 = u * bound_sq`` (never exceeding the bound).  Returns
    ``(g_true, delta)``; a zero bound returns the nominal channel exactly.
    """
    g0 = as_matrix(g_nominal, "g_nominal")
    if bound_sq < 0.0:
        raise ValueError(f"bound_sq must be >= 0, got {bound_sq}")
    if bound_sq == 0.0:
        return g0.copy(), np.zeros_like(g0)
    rng = make_rng(seed)
    re = rng.standard_normal(g0.shape)
    im = rng.standard_normal(g0.shape)
    direction = math.sqrt(0.5) * (re + 1j * im)
    u = 1.0 - rng.random()  # in (0, 1]
    norm_sq = frob_norm_sq(direction)
    if norm_sq == 0.0:
        return g0.copy(), np.zeros_like(g0)
    delta = direction * math.sqrt(u * bound_sq / norm_sq)
    overshoot = frob_norm_sq(delta)
    if overshoot > bound_sq:  # guard the hard bound against roundoff
        delta = delta * math.sqrt(bound_sq / overshoot) * (1.0 - 1e-12)
    return g0 + delta, delta


def gen_comm_channel(n_rx: int, n_tx: int, seed: int) -> np.ndarray:
    """Known communication channel: unit-variance complex Gaussian entries."""
    return randn_complex(n_rx, n_tx, seed)


def gen_signal(n_tx: int, t: int, power_budget: float, seed: int,
               fraction: float = 0.75) -> np.ndarray:
    """Random transmit signal scaled so ``Tr(X X^H) = fraction * power_budget``."""
    if not (power_budget > 0.0):
        raise ValueError(f"power_budget must be positive, got {power_budget}")
    if not (0.0 < fraction <= 1.0):
        raise ValueError(f"fraction must be in (0, 1], got {fraction}")
    x = randn_complex(n_tx, t, seed)
    power = frob_norm_sq(x)
    if power == 0.0:
        raise ValueError("degenerate zero draw for the transmit signal")
    return x * math.sqrt(fraction * power_budget / power)


def observe(channel: np.ndarray, x: np.ndarray, noise_var: float, seed: int) -> np.ndarray:
    """Noisy observation ``channel @ x`` plus circular Gaussian noise of
    per-entry variance ``noise_var`` (exact product when zero)."""
    if noise_var < 0.0:
        raise ValueError(f"noise_var must be >= 0, got {noise_var}")
    y = channel @ x
    if noise_var > 0.0:
        noise = randn_complex(y.shape[0], y.shape[1], seed)
        y = y + math.sqrt(noise_var) * noise
    return y


DEFAULT_REG_WEIGHT = 0.01


def build_instance(sim: SimConfig, scene: RadarScene | None = None, *,
                   lambda_radar: float = 1.0, lambda_comm: float = 1.0,
                   reg_channel: Regularizer | None = None,
                   reg_signal: Regularizer | None = None) -> JrcInstance:
    """Assemble a full problem instance from one master seed.

    When no scene is given, one is sampled from the scene stream with the
    default 8x4 array.  The nominal channel comes from the scene model or
    from a Gaussian draw (``sim.g0_model``); the data-generating channel
    adds the bounded perturbation.  Ground truth rides along for scoring.

    Default regularizers follow the estimation mode.  In delta mode the
    solver enforces the same constraints the scenario obeys: a Frobenius
    ball of radius ``sqrt(delta_g_bound_sq)`` on the channel deviation and
    the transmit power ball on the signal.  In fully blind mode, where no
    constraint sets are implied, both blocks get the squared-Frobenius
    penalty at the same default weight.  Pass explicit specs to override
    either choice.  A noiseless scenario stores a tiny metric noise floor
    (1e-12) on the instance so the informational log-det trace columns
    stay finite.
    """
    master = sim.seed
    if scene is None:
        scene = RadarScene.sample(sub_seed(master, STREAM_SCENE))
    if sim.g0_model == "scene":
        g0 = gen_radar_channel(scene, sub_seed(master, STREAM_STEERING))
    else:
        g0 = randn_complex(scene.n_rx_radar, scene.n_tx, sub_seed(master, STREAM_STEERING))
    g_true, delta = perturb_channel(g0, sim.delta_g_bound_sq, sub_seed(master, STREAM_DELTA))
    h = gen_comm_channel(sim.n_comm_rx, scene.n_tx, sub_seed(master, STREAM_COMM))
    x_true = gen_signal(scene.n_tx, sim.t_symbols, sim.power_budget,
                        sub_seed(master, STREAM_SIGNAL), sim.power_fraction)
    y_radar = observe(g_true, x_true, sim.noise_var, sub_seed(master, STREAM_RADAR_NOISE))
    y_comm = observe(h, x_true, sim.noise_var, sub_seed(master, STREAM_COMM_NOISE))
    if reg_channel is None:
        if sim.estimate_delta:
            reg_channel = Regularizer.frobenius_ball(math.sqrt(sim.delta_g_bound_sq),
                                                     weight=DEFAULT_REG_WEIGHT)
        else:
            reg_channel = Regularizer.squared_frobenius(DEFAULT_REG_WEIGHT)
    if reg_signal is None:
        if sim.estimate_delta:
            reg_signal = Regularizer.power_ball(sim.power_budget, weight=DEFAULT_REG_WEIGHT)
        else:
            reg_signal = Regularizer.squared_frobenius(DEFAULT_REG_WEIGHT)
    return JrcInstance(
        y_radar=y_radar,
        y_comm=y_comm,
        h_comm=h,
        g_nominal=g0 if sim.estimate_delta else None,
        lambda_radar=lambda_radar,
        lambda_comm=lambda_comm,
        reg_channel=reg_channel,
        reg_signal=reg_signal,
        noise_var=sim.noise_var if sim.noise_var > 0.0 else 1e-12,
        ground_truth=GroundTruth(g_true=g_true, x_true=x_true, delta_g=delta),
    )


def solver_init_seed(sim: SimConfig) -> int:
    """Signal-initializer seed derived from the scenario's master seed."""
    return sub_seed(sim.seed, STREAM_INIT)
