"""Dual-blind deconvolution solvers for MIMO and joint radar-communication links.

A numpy-based toolkit that jointly recovers an unknown channel and an
unknown transmit signal from noisy matrix products.  The solver is an
alternating-direction method with closed-form channel and signal blocks,
gradient or proximal auxiliary updates, and an optional second data term
that couples radar and communication observations of the same signal.
A scenario generator, link metrics, and a reproducible experiment CLI
round out the package.
"""

from .linalg import (
    IllConditionedSystemError,
    ShapeMismatchError,
    as_matrix,
    frob_inner,
    frob_norm,
    frob_norm_sq,
    hermitian,
    make_rng,
    randn_complex,
    solve_left,
    solve_right,
    sub_seed,
)
from .regularizers import NotDifferentiableError, Regularizer, reg_eval, reg_grad, reg_prox
from .admm import (
    AdmmConfig,
    AdmmState,
    BlindInstance,
    DivergenceError,
    SolveResult,
    initial_state,
    lagrangian_eval,
    residuals,
    solve,
    update_channel,
    update_duals,
    update_signal,
    update_z_prox,
    update_z_smooth,
)
from .jrc import (
    GroundTruth,
    JrcInstance,
    JrcResult,
    jrc_objective,
    solve_jrc,
    update_g_jrc,
    update_x_jrc,
)
from .metrics import (
    TRACE_COLUMNS,
    ErrorNorms,
    IterationRecord,
    channel_error,
    comm_sinr_db,
    radar_mutual_information,
    spectral_efficiency,
    tx_power,
    write_trace,
)
from .simulate import (
    DEFAULT_REG_WEIGHT,
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
from .serialize import (
    instance_from_dict,
    instance_to_dict,
    load_instance,
    save_instance,
)
from .bench import BenchPoint, BenchReport, run_bench

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # linalg
    "ShapeMismatchError", "IllConditionedSystemError", "as_matrix", "hermitian",
    "frob_norm_sq", "frob_norm", "frob_inner", "solve_left", "solve_right",
    "randn_complex", "make_rng", "sub_seed",
    # regularizers
    "NotDifferentiableError", "Regularizer", "reg_eval", "reg_grad", "reg_prox",
    # admm
    "AdmmConfig", "AdmmState", "BlindInstance", "DivergenceError", "SolveResult",
    "initial_state", "lagrangian_eval", "residuals", "solve", "update_channel",
    "update_duals", "update_signal", "update_z_prox", "update_z_smooth",
    # jrc
    "GroundTruth", "JrcInstance", "JrcResult", "jrc_objective", "solve_jrc",
    "update_g_jrc", "update_x_jrc",
    # metrics
    "TRACE_COLUMNS", "ErrorNorms", "IterationRecord", "channel_error",
    "comm_sinr_db", "radar_mutual_information", "spectral_efficiency",
    "tx_power", "write_trace",
    # simulate
    "DEFAULT_REG_WEIGHT", "RadarScene", "SimConfig", "SteeringImperfection", "build_instance",
    "gen_comm_channel", "gen_radar_channel", "gen_signal", "observe",
    "perturb_channel", "solver_init_seed", "steering_vector",
    # serialize
    "instance_from_dict", "instance_to_dict", "load_instance", "save_instance",
    # bench
    "BenchPoint", "BenchReport", "run_bench",
]
