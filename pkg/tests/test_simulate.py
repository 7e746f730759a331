"""Scenario generators.

Array responses are checked against hand-computed phase patterns, the
channel factories against their rank and moment structure, and the
instance builder against its documented shapes, defaults, determinism
and stream isolation.
"""

import math

import numpy as np
import pytest

from dualblind.jrc import jrc_objective
from dualblind.linalg import frob_norm_sq, sub_seed
from dualblind.metrics import tx_power
from dualblind.regularizers import Regularizer
from dualblind.simulate import (
    STREAM_INIT,
    RadarScene,
    SimConfig,
    SteeringImperfection,
    build_instance,
    gen_comm_channel,
    gen_radar_channel,
    gen_signal,
    observe,
    perturb_channel,
    solver_init_seed,
    steering_vector,
)

NO_ERRORS = SteeringImperfection(0.0, 0.0)


def test_steering_vector_broadside_is_all_ones():
    np.testing.assert_array_equal(steering_vector(5, 0.0), np.ones((5, 1), dtype=complex))


def test_steering_vector_endfire_alternates_sign():
    # sin(pi/2) = 1 with half-wavelength spacing: pi phase per element.
    got = steering_vector(2, math.pi / 2)
    np.testing.assert_allclose(got, [[1.0], [-1.0]], atol=1e-12)


def test_steering_vector_quarter_turn_per_element():
    # sin(pi/6) = 1/2, so each element advances by pi/2: powers of i.
    got = steering_vector(4, math.pi / 6)
    np.testing.assert_allclose(got, [[1.0], [1.0j], [-1.0], [-1.0j]], atol=1e-12)


def test_steering_vector_ideal_has_unit_magnitudes():
    got = steering_vector(16, 0.7, spacing_wl=0.35)
    np.testing.assert_allclose(np.abs(got), 1.0, atol=1e-12)
    assert got.shape == (16, 1)


def test_steering_vector_zero_scales_ignore_seed():
    a = steering_vector(6, 0.4, imperfection=NO_ERRORS, seed=1)
    b = steering_vector(6, 0.4, imperfection=NO_ERRORS, seed=99)
    np.testing.assert_array_equal(a, b)
    np.testing.assert_array_equal(a, steering_vector(6, 0.4))


def test_steering_vector_imperfection_is_seeded():
    imp = SteeringImperfection(0.1, 0.1)
    a = steering_vector(6, 0.4, imperfection=imp, seed=5)
    b = steering_vector(6, 0.4, imperfection=imp, seed=5)
    c = steering_vector(6, 0.4, imperfection=imp, seed=6)
    np.testing.assert_array_equal(a, b)
    assert np.abs(a - c).max() > 1e-3


def test_steering_vector_rejects_empty_array():
    with pytest.raises(ValueError):
        steering_vector(0, 0.0)


def _clean_scene(angles, rcs, **kw):
    return RadarScene(angles_rad=angles, rcs=rcs, imperfection=NO_ERRORS, **kw)


def test_radar_channel_no_targets_is_zero():
    scene = _clean_scene((), ())
    np.testing.assert_array_equal(gen_radar_channel(scene, 3),
                                  np.zeros((4, 8), dtype=complex))


def test_radar_channel_single_target_outer_product():
    scene = _clean_scene((0.3,), (0.8 - 0.6j,), n_tx=6, n_rx_radar=3)
    g = gen_radar_channel(scene, 0)
    a_rx = steering_vector(3, 0.3)
    a_tx = steering_vector(6, 0.3)
    np.testing.assert_allclose(g, (0.8 - 0.6j) * (a_rx @ a_tx.conj().T), atol=1e-12)
    svals = np.linalg.svd(g, compute_uv=False)
    assert svals[1] <= 1e-10 * svals[0]


def test_radar_channel_rank_bounded_by_target_count():
    scene = RadarScene.sample(17, n_targets=4, n_tx=8, n_rx_radar=6)
    svals = np.linalg.svd(gen_radar_channel(scene, 2), compute_uv=False)
    assert svals[4] <= 1e-10 * svals[0]


def test_radar_channel_order_invariant_without_imperfection():
    angles = (0.2, -0.5, 0.9)
    rcs = (1.0 + 0.5j, -0.3j, 0.4)
    fwd = gen_radar_channel(_clean_scene(angles, rcs), 0)
    rev = gen_radar_channel(_clean_scene(angles[::-1], rcs[::-1]), 0)
    np.testing.assert_allclose(fwd, rev, atol=1e-12)


def test_perturb_channel_zero_bound_exact():
    g0 = gen_comm_channel(3, 4, 8)
    g_true, delta = perturb_channel(g0, 0.0, 5)
    np.testing.assert_array_equal(g_true, g0)
    np.testing.assert_array_equal(delta, np.zeros_like(g0))


def test_perturb_channel_respects_bound():
    g0 = gen_comm_channel(4, 8, 1)
    for seed in range(200):
        g_true, delta = perturb_channel(g0, 1e-2, seed)
        d_sq = frob_norm_sq(delta)
        assert 0.0 < d_sq <= 1e-2
        np.testing.assert_allclose(g_true - g0, delta, atol=1e-15)


def test_perturb_channel_deterministic():
    g0 = gen_comm_channel(2, 3, 2)
    a = perturb_channel(g0, 0.5, 7)
    b = perturb_channel(g0, 0.5, 7)
    c = perturb_channel(g0, 0.5, 8)
    np.testing.assert_array_equal(a[0], b[0])
    assert np.abs(a[1] - c[1]).max() > 1e-6
    with pytest.raises(ValueError):
        perturb_channel(g0, -1.0, 0)


def test_comm_channel_unit_variance():
    h = gen_comm_channel(100, 100, 3)
    assert h.shape == (100, 100)
    assert np.mean(np.abs(h) ** 2) == pytest.approx(1.0, abs=0.05)
    np.testing.assert_array_equal(h, gen_comm_channel(100, 100, 3))


def test_gen_signal_hits_requested_power():
    x = gen_signal(8, 16, 10.0, 4)
    assert tx_power(x) == pytest.approx(7.5, rel=1e-9)
    assert tx_power(x) <= 10.0
    full = gen_signal(8, 16, 10.0, 4, fraction=1.0)
    assert tx_power(full) == pytest.approx(10.0, rel=1e-9)
    np.testing.assert_array_equal(x, gen_signal(8, 16, 10.0, 4))


def test_gen_signal_validation():
    with pytest.raises(ValueError):
        gen_signal(4, 4, 0.0, 0)
    with pytest.raises(ValueError):
        gen_signal(4, 4, 1.0, 0, fraction=0.0)
    with pytest.raises(ValueError):
        gen_signal(4, 4, 1.0, 0, fraction=1.5)


def test_observe_noiseless_is_exact_product():
    g = gen_comm_channel(3, 4, 1)
    x = gen_signal(4, 6, 2.0, 2)
    np.testing.assert_array_equal(observe(g, x, 0.0, 9), g @ x)


def test_observe_noise_second_moment():
    g = gen_comm_channel(6, 4, 5)
    x = gen_signal(4, 10, 5.0, 6)
    clean = g @ x
    var = 0.5
    powers = [frob_norm_sq(observe(g, x, var, seed) - clean) for seed in range(100)]
    expected = var * clean.shape[0] * clean.shape[1]
    assert np.mean(powers) == pytest.approx(expected, rel=0.05)
    np.testing.assert_array_equal(observe(g, x, var, 3), observe(g, x, var, 3))
    with pytest.raises(ValueError):
        observe(g, x, -0.1, 0)


def test_scene_sampling_is_seeded_and_bounded():
    a = RadarScene.sample(12)
    b = RadarScene.sample(12)
    c = RadarScene.sample(13)
    assert a.angles_rad == b.angles_rad and a.rcs == b.rcs
    assert a.angles_rad != c.angles_rad
    assert a.n_targets == 4
    assert all(abs(t) < math.pi / 3 for t in a.angles_rad)
    assert RadarScene.sample(0, n_targets=0).n_targets == 0
    with pytest.raises(ValueError):
        RadarScene.sample(0, n_targets=-1)


def test_scene_validation():
    with pytest.raises(ValueError, match="reflection"):
        RadarScene(angles_rad=(0.1, 0.2), rcs=(1.0,))
    with pytest.raises(ValueError, match="outside"):
        RadarScene(angles_rad=(math.pi / 2,), rcs=(1.0,))
    with pytest.raises(ValueError, match="5%"):
        RadarScene(angles_rad=(), rcs=(), wavelength_m=0.02)
    with pytest.raises(ValueError, match="spacing"):
        RadarScene(angles_rad=(), rcs=(), element_spacing_wl=0.0)
    with pytest.raises(ValueError, match="array sizes"):
        RadarScene(angles_rad=(), rcs=(), n_tx=0)
    with pytest.raises(ValueError):
        SteeringImperfection(-0.1, 0.0)
    assert not NO_ERRORS.active
    assert SteeringImperfection(0.0, 0.01).active


def test_sim_config_validation():
    for kw in ({"n_comm_rx": 0}, {"t_symbols": 0}, {"noise_var": -1.0},
               {"power_budget": 0.0}, {"power_fraction": 0.0}, {"power_fraction": 1.5},
               {"delta_g_bound_sq": -1e-3}, {"seed": -1}, {"g0_model": "fancy"}):
        with pytest.raises(ValueError):
            SimConfig(**kw)


def test_build_instance_default_shapes_and_regularizers():
    inst = build_instance(SimConfig())
    assert inst.y_radar.shape == (4, 16)
    assert inst.y_comm.shape == (2, 16)
    assert inst.h_comm.shape == (2, 8)
    assert inst.g_nominal.shape == (4, 8)
    assert inst.delta_mode
    assert inst.reg_channel.kind == "frob_ball"
    assert inst.reg_channel.radius == pytest.approx(0.1)
    assert inst.reg_channel.weight == 0.01
    assert inst.reg_signal.kind == "power_ball"
    assert inst.reg_signal.budget == 10.0
    truth = inst.ground_truth
    assert frob_norm_sq(truth.delta_g) <= 1e-2
    np.testing.assert_allclose(truth.g_true, inst.g_nominal + truth.delta_g, atol=1e-15)
    assert tx_power(truth.x_true) == pytest.approx(7.5, rel=1e-9)


def test_build_instance_fully_blind_defaults():
    inst = build_instance(SimConfig(estimate_delta=False))
    assert inst.g_nominal is None
    assert inst.reg_channel.kind == "sq_frobenius"
    assert inst.reg_signal.kind == "sq_frobenius"
    assert inst.reg_channel.weight == inst.reg_signal.weight == 0.01


def test_build_instance_noiseless_observations_and_metric_floor():
    inst = build_instance(SimConfig(noise_var=0.0))
    truth = inst.ground_truth
    np.testing.assert_array_equal(inst.y_radar, truth.g_true @ truth.x_true)
    np.testing.assert_array_equal(inst.y_comm, inst.h_comm @ truth.x_true)
    assert inst.noise_var == 1e-12
    clean = build_instance(SimConfig(noise_var=0.0), reg_channel=Regularizer.zero(),
                           reg_signal=Regularizer.zero())
    assert jrc_objective(clean, clean.ground_truth.g_true,
                         clean.ground_truth.x_true) == pytest.approx(0.0, abs=1e-12)


def test_build_instance_deterministic_rebuild():
    a = build_instance(SimConfig(seed=6))
    b = build_instance(SimConfig(seed=6))
    for name in ("y_radar", "y_comm", "h_comm", "g_nominal"):
        np.testing.assert_array_equal(getattr(a, name), getattr(b, name))
    np.testing.assert_array_equal(a.ground_truth.x_true, b.ground_truth.x_true)
    other = build_instance(SimConfig(seed=7))
    assert np.abs(a.y_radar - other.y_radar).max() > 1e-3


def test_build_instance_noise_stream_isolated_from_truth_draws():
    """Changing the noise level leaves every ground-truth draw untouched."""
    quiet = build_instance(SimConfig(seed=9, noise_var=1e-4))
    loud = build_instance(SimConfig(seed=9, noise_var=1.0))
    np.testing.assert_array_equal(quiet.ground_truth.g_true, loud.ground_truth.g_true)
    np.testing.assert_array_equal(quiet.ground_truth.x_true, loud.ground_truth.x_true)
    np.testing.assert_array_equal(quiet.h_comm, loud.h_comm)
    assert np.abs(quiet.y_radar - loud.y_radar).max() > 1e-3


def test_build_instance_gaussian_nominal_channel_is_full_rank():
    inst = build_instance(SimConfig(g0_model="gaussian"))
    svals = np.linalg.svd(inst.g_nominal, compute_uv=False)
    assert svals[-1] > 1e-6  # a scene model with 4 targets would be rank 4


def test_solver_init_seed_matches_stream_table():
    sim = SimConfig(seed=123)
    assert solver_init_seed(sim) == sub_seed(123, STREAM_INIT)
