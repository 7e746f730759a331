"""Dense complex linear algebra kernel shared by all solver modules.

Matrices are plain 2-D ``numpy.ndarray`` values with dtype ``complex128``;
:func:`as_matrix` is the validating constructor applied at API boundaries
(instance construction, file loading).  Inner products use the real-trace
convention ``<A, B> = Re tr(A^H B)``, which makes every Lagrangian term
downstream real-valued.

Randomness comes from numpy's PCG64 bit generator (ziggurat-sampled
normals).  :func:`make_rng` and the seed-splitting helper :func:`sub_seed`
are the only RNG constructors in the package, so every draw is
bit-reproducible from a master seed alone.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.linalg import cho_factor, cho_solve

__all__ = [
    "ShapeMismatchError",
    "IllConditionedSystemError",
    "as_matrix",
    "hermitian",
    "frob_norm_sq",
    "frob_norm",
    "frob_inner",
    "solve_left",
    "solve_right",
    "randn_complex",
    "make_rng",
    "sub_seed",
]


class ShapeMismatchError(ValueError):
    """Operands have incompatible shapes."""


class IllConditionedSystemError(RuntimeError):
    """A linear system was numerically singular or not positive definite."""


def as_matrix(value, name: str = "matrix") -> np.ndarray:
    """Validate ``value`` as a nonempty 2-D complex128 matrix.

    Rejects inputs that are not two-dimensional, have an empty axis, or
    contain NaN/Inf entries.  Returns a ``complex128`` array (a view when
    the input already has that dtype).
    """
    m = np.asarray(value, dtype=np.complex128)
    if m.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got ndim={m.ndim}")
    if m.shape[0] < 1 or m.shape[1] < 1:
        raise ValueError(f"{name} must have positive dimensions, got {m.shape}")
    if not np.isfinite(m).all():
        raise ValueError(f"{name} contains non-finite entries")
    return m


def hermitian(a: np.ndarray) -> np.ndarray:
    """Conjugate transpose ``A^H``."""
    return np.conj(a).T


def frob_norm_sq(a: np.ndarray) -> float:
    """Squared Frobenius norm ``sum |a_ij|^2``."""
    return float(np.vdot(a, a).real)


def frob_norm(a: np.ndarray) -> float:
    """Frobenius norm."""
    return math.sqrt(frob_norm_sq(a))


def frob_inner(a: np.ndarray, b: np.ndarray) -> float:
    """Real inner product ``Re tr(A^H B)``.

    Symmetric in its arguments; ``frob_inner(a, a) == frob_norm_sq(a)``.
    """
    if a.shape != b.shape:
        raise ShapeMismatchError(f"inner product needs equal shapes, got {a.shape} and {b.shape}")
    return float(np.vdot(a, b).real)


def solve_left(a: np.ndarray, b: np.ndarray, context: str = "linear solve") -> np.ndarray:
    """Solve ``A X = B`` for Hermitian positive definite ``A``.

    Uses a Cholesky factorization.  ``context`` names the caller in the
    error raised when the factorization fails, so solver diagnostics can
    point at the update that built the system.
    """
    if a.shape[0] != a.shape[1]:
        raise ShapeMismatchError(f"system matrix must be square, got {a.shape}")
    if b.shape[0] != a.shape[0]:
        raise ShapeMismatchError(f"incompatible shapes {a.shape} and {b.shape} in {context}")
    try:
        factor = cho_factor(a, lower=True, check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise IllConditionedSystemError(
            f"Hermitian solve failed in {context}: system matrix is singular "
            "or not positive definite"
        ) from exc
    return cho_solve(factor, b, check_finite=False)


def solve_right(a: np.ndarray, b: np.ndarray, context: str = "linear solve") -> np.ndarray:
    """Solve ``X A = B`` for Hermitian positive definite ``A``.

    Equivalent to ``solve_left(A, B^H)^H`` because ``A^H = A``.
    """
    if a.shape[0] != a.shape[1]:
        raise ShapeMismatchError(f"system matrix must be square, got {a.shape}")
    if b.shape[1] != a.shape[0]:
        raise ShapeMismatchError(f"incompatible shapes {b.shape} and {a.shape} in {context}")
    return hermitian(solve_left(a, hermitian(b), context))


def make_rng(seed: int) -> np.random.Generator:
    """PCG64 generator for a nonnegative integer seed."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


def sub_seed(master_seed: int, tag: int) -> int:
    """Derive an independent component seed from a master seed.

    Uses numpy ``SeedSequence(master_seed, spawn_key=(tag,))`` so distinct
    tags give statistically independent streams and the derivation is
    stable across platforms and runs.
    """
    ss = np.random.SeedSequence(master_seed, spawn_key=(tag,))
    return int(ss.generate_state(1, np.uint64)[0])


def randn_complex(rows: int, cols: int, seed: int) -> np.ndarray:
    """Unit-variance circularly symmetric complex Gaussian matrix.

    Real and imaginary parts are independent ``N(0, 1/2)`` draws, so
    ``E|z_ij|^2 = 1``.  The real-part block is drawn before the imaginary
    one; both come from the PCG64 stream for ``seed``.
    """
    if rows < 1 or cols < 1:
        raise ValueError(f"matrix dimensions must be positive, got {rows}x{cols}")
    rng = make_rng(seed)
    re = rng.standard_normal((rows, cols))
    im = rng.standard_normal((rows, cols))
    return math.sqrt(0.5) * (re + 1j * im)
