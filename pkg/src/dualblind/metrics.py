"""Link-quality and recovery metrics, plus the per-iteration trace record.

Several of these quantities have no single universal definition, so the
forms used throughout the package are fixed here:

communication SINR (dB)
    ``10 log10(||H X||_F^2 / ||Y - H X||_F^2)`` with the fitted signal
    energy pooled over all receive antennas and symbols, and everything
    not explained by ``H X`` counted as noise-plus-error.  Returns ``+inf``
    for an exact fit of a nonzero signal and ``-inf`` for a zero signal
    against nonzero data; raises on the 0/0 case.

spectral efficiency (bits/s/Hz)
    ``log2 det(I + (1/noise_var) H Q H^H)`` with the empirical input
    covariance ``Q = X X^H / t``.

radar mutual information (bits per channel use)
    The same Gaussian log-det form evaluated with the radar channel.

channel/signal error
    Frobenius distance to the ground truth, reported both absolute and
    relative to the truth's norm.

transmit power
    ``||X||_F^2 = Tr(X X^H)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from typing import NamedTuple

import numpy as np

from .linalg import IllConditionedSystemError, ShapeMismatchError, frob_norm, frob_norm_sq, hermitian

__all__ = [
    "TRACE_COLUMNS",
    "IterationRecord",
    "ErrorNorms",
    "comm_sinr_db",
    "spectral_efficiency",
    "radar_mutual_information",
    "channel_error",
    "tx_power",
    "write_trace",
]

# Column order of the on-disk trace. Wall-clock time is deliberately not
# serialized: trace files must be byte-identical across reruns of the same
# configuration and seed.
TRACE_COLUMNS = (
    "iter",
    "r1",
    "r2",
    "s1",
    "s2",
    "objective",
    "sinr_db",
    "spectral_eff_bits",
    "radar_mi_bits",
    "tx_power",
)


def _fmt(value: float) -> str:
    """Format a float with 9 significant digits."""
    return format(float(value), ".9g")


@dataclass(frozen=True)
class IterationRecord:
    """One solver iteration as seen by observers and trace files.

    ``r1``/``r2`` are the channel and signal consensus gaps, ``s1``/``s2``
    the scaled auxiliary-variable steps.  ``elapsed_s`` is wall-clock time
    since the solve started; it is kept in memory for benchmarking but is
    not part of the serialized trace row.
    """

    iter: int
    r1: float
    r2: float
    s1: float
    s2: float
    objective: float
    sinr_db: float
    spectral_eff_bits: float
    radar_mi_bits: float
    tx_power: float
    elapsed_s: float

    def __post_init__(self) -> None:
        if self.iter < 1:
            raise ValueError(f"iteration index must be >= 1, got {self.iter}")
        for name in ("r1", "r2", "s1", "s2", "tx_power"):
            if not (getattr(self, name) >= 0.0):
                raise ValueError(f"{name} must be nonnegative, got {getattr(self, name)}")

    def trace_row(self) -> str:
        """Serialize to one CSV row in ``TRACE_COLUMNS`` order."""
        vals = [str(self.iter)]
        vals += [_fmt(getattr(self, name)) for name in TRACE_COLUMNS[1:]]
        return ",".join(vals)

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def write_trace(path, records) -> None:
    """Write iteration records as a CSV trace with a fixed header."""
    with open(path, "w", newline="") as fh:
        fh.write(",".join(TRACE_COLUMNS) + "\n")
        for rec in records:
            fh.write(rec.trace_row() + "\n")


class ErrorNorms(NamedTuple):
    absolute: float
    relative: float


def comm_sinr_db(y: np.ndarray, h: np.ndarray, x: np.ndarray) -> float:
    """Pooled SINR of the fitted signal against the residual, in dB."""
    fitted = h @ x
    sig = frob_norm_sq(fitted)
    res = frob_norm_sq(y - fitted)
    if res == 0.0 and sig == 0.0:
        raise ValueError("SINR undefined: both fitted signal and residual are zero")
    if res == 0.0:
        return math.inf
    if sig == 0.0:
        return -math.inf
    return 10.0 * math.log10(sig / res)


def _gaussian_logdet_bits(channel: np.ndarray, x: np.ndarray, noise_var: float, t: int) -> float:
    if not (noise_var > 0.0):
        raise ValueError(f"noise variance must be positive, got {noise_var}")
    if t < 1:
        raise ValueError(f"symbol count must be >= 1, got {t}")
    q = (x @ hermitian(x)) / t
    m = np.eye(channel.shape[0], dtype=np.complex128) + (channel @ q @ hermitian(channel)) / noise_var
    m = 0.5 * (m + hermitian(m))  # kill roundoff asymmetry before factoring
    if not np.isfinite(m).all():
        # LAPACK may factor a small NaN matrix without flagging an error,
        # so overflow has to be rejected before it reaches the Cholesky.
        raise IllConditionedSystemError("log-det argument overflowed")
    try:
        chol = np.linalg.cholesky(m)
    except np.linalg.LinAlgError as exc:
        raise IllConditionedSystemError(
            "log-det argument was not numerically positive definite"
        ) from exc
    # log det M = 2 sum log diag(L); convert nats to bits.
    return float(2.0 * np.sum(np.log(np.real(np.diag(chol)))) / math.log(2.0))


def spectral_efficiency(h: np.ndarray, x: np.ndarray, noise_var: float, t: int) -> float:
    """Gaussian spectral efficiency of the link ``h`` driven by ``x``."""
    return _gaussian_logdet_bits(h, x, noise_var, t)


def radar_mutual_information(g: np.ndarray, x: np.ndarray, noise_var: float, t: int) -> float:
    """Gaussian mutual information of the radar return through ``g``."""
    return _gaussian_logdet_bits(g, x, noise_var, t)


def channel_error(estimate: np.ndarray, truth: np.ndarray) -> ErrorNorms:
    """Frobenius recovery error, absolute and relative to ``||truth||_F``."""
    if estimate.shape != truth.shape:
        raise ShapeMismatchError(
            f"estimate shape {estimate.shape} does not match truth shape {truth.shape}"
        )
    absolute = frob_norm(estimate - truth)
    scale = frob_norm(truth)
    if scale == 0.0:
        relative = 0.0 if absolute == 0.0 else math.inf
    else:
        relative = absolute / scale
    return ErrorNorms(absolute=absolute, relative=relative)


def tx_power(x: np.ndarray) -> float:
    """Transmit power ``Tr(X X^H)``."""
    return frob_norm_sq(x)
