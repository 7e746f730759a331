"""Kernel checks: scalar-loop oracles for the norms, residual bounds for
the Hermitian solves, and reproducibility of the seeded Gaussian draws."""

import math

import numpy as np
import pytest

from dualblind.linalg import (
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


def test_hermitian_identity():
    eye = np.eye(3, dtype=np.complex128)
    np.testing.assert_array_equal(hermitian(eye), eye)


def test_hermitian_scalar_conjugate():
    np.testing.assert_array_equal(hermitian(np.array([[2 + 3j]])), np.array([[2 - 3j]]))


def test_hermitian_involution():
    a = randn_complex(3, 2, seed=11)
    np.testing.assert_array_equal(hermitian(hermitian(a)), a)
    assert hermitian(a).shape == (2, 3)


def test_frob_norm_sq_zero():
    assert frob_norm_sq(np.zeros((2, 3), dtype=np.complex128)) == 0.0


def test_frob_norm_sq_three_four():
    assert frob_norm_sq(np.array([[3.0, 4.0j]])) == pytest.approx(25.0, abs=1e-14)


def test_frob_norm_sq_matches_scalar_loop():
    a = randn_complex(4, 4, seed=5)
    total = 0.0
    for i in range(4):
        for j in range(4):
            total += abs(a[i, j]) ** 2
    assert frob_norm_sq(a) == pytest.approx(total, rel=1e-12)
    assert frob_norm(a) == pytest.approx(math.sqrt(total), rel=1e-12)


def test_frob_inner_is_norm_on_diagonal():
    a = randn_complex(3, 5, seed=9)
    assert frob_inner(a, a) == pytest.approx(frob_norm_sq(a), rel=1e-12)


def test_frob_inner_orthogonal_scalars():
    assert frob_inner(np.array([[1.0 + 0j]]), np.array([[1j]])) == pytest.approx(0.0, abs=1e-15)


def test_frob_inner_matches_scalar_loop():
    a = randn_complex(3, 3, seed=1)
    b = randn_complex(3, 3, seed=2)
    total = 0.0
    for i in range(3):
        for j in range(3):
            total += (np.conj(a[i, j]) * b[i, j]).real
    assert frob_inner(a, b) == pytest.approx(total, abs=1e-12)
    assert frob_inner(b, a) == pytest.approx(total, abs=1e-12)


def test_frob_inner_shape_mismatch():
    with pytest.raises(ShapeMismatchError):
        frob_inner(np.zeros((2, 2), dtype=complex), np.zeros((2, 3), dtype=complex))


def _random_hpd(n: int, seed: int) -> np.ndarray:
    m = randn_complex(n, n, seed)
    return m @ hermitian(m) + 0.5 * np.eye(n)


def test_solve_left_identity():
    b = randn_complex(4, 3, seed=21)
    np.testing.assert_allclose(solve_left(np.eye(4, dtype=complex), b), b, atol=1e-14)


def test_solve_left_diagonal():
    a = np.diag([2.0, 4.0]).astype(complex)
    b = np.array([[2.0], [8.0]], dtype=complex)
    np.testing.assert_allclose(solve_left(a, b), [[1.0], [2.0]], atol=1e-14)


def test_solve_right_identity_and_scalar():
    b = randn_complex(2, 4, seed=22)
    np.testing.assert_allclose(solve_right(np.eye(4, dtype=complex), b), b, atol=1e-14)
    np.testing.assert_allclose(solve_right(np.array([[3.0 + 0j]]), np.array([[6.0 + 0j]])),
                               [[2.0]], atol=1e-14)


def test_solve_residual_bounds_on_random_hpd_systems():
    """Both solves meet the 1e-8 relative residual bound on 200 systems."""
    rng = make_rng(777)
    for trial in range(200):
        n = int(rng.integers(1, 17))
        m = int(rng.integers(1, 9))
        a = _random_hpd(n, seed=1000 + trial)
        b = randn_complex(n, m, seed=2000 + trial)
        x = solve_left(a, b, "test")
        assert frob_norm(a @ x - b) <= 1e-8 * max(frob_norm(b), 1e-30)
        c = hermitian(b)
        y = solve_right(a, c, "test")
        assert frob_norm(y @ a - c) <= 1e-8 * max(frob_norm(c), 1e-30)


def test_solve_right_adjoint_identity():
    a = _random_hpd(5, seed=31)
    b = randn_complex(3, 5, seed=32)
    expected = hermitian(solve_left(hermitian(a), hermitian(b), "test"))
    np.testing.assert_allclose(solve_right(a, b, "test"), expected, atol=1e-12)


def test_solve_left_singular_raises_with_context():
    with pytest.raises(IllConditionedSystemError, match="signal update"):
        solve_left(np.zeros((3, 3), dtype=complex), np.ones((3, 1), dtype=complex),
                   context="signal update")


def test_solve_shape_validation():
    a = np.eye(3, dtype=complex)
    with pytest.raises(ShapeMismatchError):
        solve_left(np.zeros((2, 3), dtype=complex), np.zeros((2, 1), dtype=complex))
    with pytest.raises(ShapeMismatchError):
        solve_left(a, np.zeros((2, 1), dtype=complex))
    with pytest.raises(ShapeMismatchError):
        solve_right(a, np.zeros((1, 2), dtype=complex))


def test_as_matrix_rejects_bad_inputs():
    with pytest.raises(ValueError, match="2-D"):
        as_matrix(np.zeros(3))
    with pytest.raises(ValueError, match="positive dimensions"):
        as_matrix(np.zeros((0, 2)))
    with pytest.raises(ValueError, match="non-finite"):
        as_matrix(np.array([[np.inf, 0.0]]))


def test_randn_complex_deterministic():
    a = randn_complex(6, 7, seed=123)
    b = randn_complex(6, 7, seed=123)
    np.testing.assert_array_equal(a, b)


def test_randn_complex_seed_sensitivity():
    a = randn_complex(4, 4, seed=1)
    b = randn_complex(4, 4, seed=2)
    assert np.any(a != b)


def test_randn_complex_unit_variance():
    """Mean squared magnitude over a million entries sits near 1."""
    a = randn_complex(1000, 1000, seed=99)
    assert np.mean(np.abs(a) ** 2) == pytest.approx(1.0, abs=0.01)
    assert np.var(a.real) == pytest.approx(0.5, abs=0.01)
    assert np.var(a.imag) == pytest.approx(0.5, abs=0.01)


def test_randn_complex_rejects_empty():
    with pytest.raises(ValueError):
        randn_complex(0, 3, seed=0)


def test_sub_seed_deterministic_and_distinct():
    seeds = [sub_seed(42, tag) for tag in range(8)]
    assert seeds == [sub_seed(42, tag) for tag in range(8)]
    assert len(set(seeds)) == 8
    assert sub_seed(42, 0) != sub_seed(43, 0)
