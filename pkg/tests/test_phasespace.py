import numpy as np
import pytest

from treverse.phasespace import (
    KIND_ANTISYMMETRIC,
    PhasePoint,
    SymplecticForm,
    TimeReversalOp,
    angular_momentum,
    antisymplectic_residual,
    apply,
    is_antisymplectic,
    is_antisymplectic_matrix,
    is_involution,
    is_orthogonal,
    reverses_angular_momentum,
)


def random_signed_permutation(rng, m):
    perm = rng.permutation(m)
    signs = rng.choice([-1, 1], size=m)
    return TimeReversalOp.from_signed_permutation(perm, signs, kind="general")


def random_orthogonal(rng, m):
    q, r = np.linalg.qr(rng.normal(size=(m, m)))
    return q * np.sign(np.diag(r))


def test_involution_identity():
    assert is_involution(TimeReversalOp(np.eye(3)))


def test_involution_swap_block():
    a = np.array([[0, 1, 0], [1, 0, 0], [0, 0, 1]])
    assert is_involution(TimeReversalOp(a))
    assert np.array_equal(a @ a, np.eye(3, dtype=int))


def test_involution_quantum_block():
    a = np.array([[0, -1], [1, 0]])
    assert not is_involution(TimeReversalOp(a))
    assert is_involution(TimeReversalOp(a, kind=KIND_ANTISYMMETRIC))


def test_symplectic_form():
    omega = SymplecticForm(3).matrix()
    assert np.array_equal(omega.T, -omega)
    assert np.array_equal(omega @ omega, -np.eye(6))


def test_antisymplectic_identity_block():
    assert is_antisymplectic(TimeReversalOp(np.eye(4)))


def test_antisymplectic_random_signed_permutations():
    rng = np.random.default_rng(0)
    for _ in range(50):
        op = random_signed_permutation(rng, int(rng.integers(1, 7)))
        assert is_antisymplectic(op)


def test_momenta_not_flipped_is_not_antisymplectic():
    assert not is_antisymplectic_matrix(np.eye(6))


def test_antisymplectic_iff_block_constraint():
    # for diag(A, D) with orthogonal blocks the condition reads A^T D = -I
    rng = np.random.default_rng(1)
    for _ in range(50):
        m = int(rng.integers(1, 5))
        a = random_orthogonal(rng, m)
        d = random_orthogonal(rng, m)
        full = np.zeros((2 * m, 2 * m))
        full[:m, :m] = a
        full[m:, m:] = d
        lhs = is_antisymplectic_matrix(full, tol=1e-10)
        rhs = np.max(np.abs(a.T @ d + np.eye(m))) <= 1e-10
        assert lhs == rhs


def test_apply_canonical():
    gamma = PhasePoint([1, 2, 3], [4, 5, 6])
    out = apply(TimeReversalOp(np.eye(3)), gamma)
    assert np.array_equal(out.coords, [1, 2, 3])
    assert np.array_equal(out.momenta, [-4, -5, -6])


def test_apply_kawasaki():
    gamma = PhasePoint([1, 2, 3], [4, 5, 6])
    out = apply(TimeReversalOp(np.diag([1.0, -1.0, 1.0])), gamma)
    assert np.array_equal(out.coords, [1, -2, 3])
    assert np.array_equal(out.momenta, [-4, 5, -6])


def test_apply_swap_block():
    a = np.array([[0.0, 1, 0], [1, 0, 0], [0, 0, 1]])
    out = apply(TimeReversalOp(a), PhasePoint([1, 2, 3], [4, 5, 6]))
    assert np.array_equal(out.coords, [2, 1, 3])
    assert np.array_equal(out.momenta, [-5, -4, -6])


def test_apply_dimension_mismatch():
    with pytest.raises(ValueError):
        apply(TimeReversalOp(np.eye(2)), PhasePoint([1, 2, 3], [4, 5, 6]))


def test_apply_twice_is_identity_exactly():
    rng = np.random.default_rng(2)
    for _ in range(200):
        op = random_signed_permutation(rng, 6)
        if not is_involution(op):
            continue
        gamma = PhasePoint(rng.uniform(-1, 1, 6), rng.uniform(-1, 1, 6))
        back = apply(op, apply(op, gamma))
        assert np.array_equal(back.coords, gamma.coords)
        assert np.array_equal(back.momenta, gamma.momenta)


def test_angular_momentum_unit_cross():
    gamma = PhasePoint([1, 0, 0], [0, 1, 0])
    assert np.array_equal(angular_momentum(gamma), [0, 0, 1])


def test_angular_momentum_parallel_vanishes():
    gamma = PhasePoint([0.3, -0.7, 1.1], [0.6, -1.4, 2.2])
    assert np.max(np.abs(angular_momentum(gamma))) < 1e-15


def test_angular_momentum_additive():
    rng = np.random.default_rng(3)
    x1, p1 = rng.normal(size=3), rng.normal(size=3)
    x2, p2 = rng.normal(size=3), rng.normal(size=3)
    combined = PhasePoint(np.concatenate([x1, x2]), np.concatenate([p1, p2]))
    parts = angular_momentum(PhasePoint(x1, p1)) + angular_momentum(PhasePoint(x2, p2))
    assert np.allclose(angular_momentum(combined), parts, atol=1e-14)


def test_angular_momentum_needs_3n():
    with pytest.raises(ValueError):
        angular_momentum(PhasePoint([1, 2], [3, 4]))


def test_reversal_common_block_rotations():
    # the same O(3) block on each particle reverses L covariantly
    rng = np.random.default_rng(4)
    for _ in range(10):
        r = random_orthogonal(rng, 3)
        op = TimeReversalOp(np.kron(np.eye(2), r))
        verdict = reverses_angular_momentum(op, samples=100, seed=5, tol=1e-10)
        assert verdict.always_reversed


def test_reversal_identity():
    verdict = reverses_angular_momentum(TimeReversalOp(np.eye(6)), samples=100, seed=6)
    assert verdict.always_reversed


def test_reversal_cross_particle_swap_counterexample():
    perm = np.arange(6)
    perm[0], perm[5] = 5, 0
    op = TimeReversalOp.from_signed_permutation(perm, np.ones(6, dtype=int))
    verdict = reverses_angular_momentum(op, samples=200, seed=7)
    assert not verdict.always_reversed
    gamma = verdict.counterexample
    got = angular_momentum(apply(op, gamma))
    assert np.max(np.abs(got + angular_momentum(gamma))) > 1e-6


def test_signed_permutation_storage_roundtrip():
    op = TimeReversalOp.from_signed_permutation([1, 0, 2], [1, 1, -1])
    expected = np.array([[0, 1, 0], [1, 0, 0], [0, 0, -1]])
    assert np.array_equal(op.A, expected)
    assert is_orthogonal(op)


def test_per_particle_block_detection():
    r = np.diag([1.0, -1.0, 1.0])
    op = TimeReversalOp(np.kron(np.eye(3), r))
    assert np.array_equal(op.per_particle_block(), r)
    perm = np.arange(6)
    perm[0], perm[5] = 5, 0
    cross = TimeReversalOp.from_signed_permutation(perm, np.ones(6, dtype=int))
    assert cross.per_particle_block() is None


def test_antisymplectic_residual_value():
    assert antisymplectic_residual(np.eye(6)) == 2.0
