import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from floqsim.tensor import (ChainSpec, OperatorError, check_hermitian, check_normalized, embed, expm_hermitian,
                            fidelity, kron, ladder, pauli, principal_log_unitary, unitarity_error)


def random_hermitian(rng, dim, scale=1.0):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return scale * (a + a.conj().T) / 2


def test_chain_dimension():
    assert ChainSpec(4).dim == 16
    assert ChainSpec(3, 3).dim == 27
    assert ChainSpec(2).boundary == "open"
    with pytest.raises(ValueError):
        ChainSpec(0)
    with pytest.raises(ValueError):
        ChainSpec(2, 4)


def test_pauli_matrices():
    np.testing.assert_array_equal(pauli("x"), [[0, 1], [1, 0]])
    np.testing.assert_array_equal(pauli("z"), [[1, 0], [0, -1]])
    np.testing.assert_allclose(pauli("y") @ pauli("y"), np.eye(2))
    with pytest.raises(OperatorError):
        pauli("w")


def test_ladder():
    a, adag = ladder(2)
    np.testing.assert_array_equal(a, [[0, 1], [0, 0]])
    a, adag = ladder(3)
    two = np.array([0, 0, 1.0])
    np.testing.assert_allclose(a @ two, [0, np.sqrt(2), 0])
    np.testing.assert_allclose(adag @ a, np.diag([0, 1, 2]))
    np.testing.assert_array_equal(adag, a.conj().T)
    with pytest.raises(OperatorError):
        ladder(4)


def test_embed_ordering():
    chain = ChainSpec(2)
    np.testing.assert_array_equal(np.diag(embed(pauli("z"), 1, chain)).real, [1, 1, -1, -1])
    np.testing.assert_array_equal(np.diag(embed(pauli("z"), 2, chain)).real, [1, -1, 1, -1])
    np.testing.assert_array_equal(embed(np.eye(2), 2, chain), np.eye(4))
    with pytest.raises(OperatorError):
        embed(pauli("z"), 3, chain)
    with pytest.raises(OperatorError):
        embed(np.eye(3), 1, chain)


def test_embed_commutes_on_distinct_sites():
    chain = ChainSpec(3)
    for i in range(1, 4):
        for j in range(1, 4):
            if i == j:
                continue
            for a in "xyz":
                for b in "xyz":
                    A, B = embed(pauli(a), i, chain), embed(pauli(b), j, chain)
                    assert np.array_equal(A @ B, B @ A)


def test_kron():
    assert kron(np.eye(2), np.eye(3)).shape == (6, 6)
    np.testing.assert_array_equal(kron(np.eye(2), np.eye(2)), np.eye(4))
    xx = kron(pauli("x"), pauli("x"))
    np.testing.assert_array_equal(xx @ xx, np.eye(4))


def test_expm_examples():
    np.testing.assert_allclose(expm_hermitian(pauli("z"), np.pi / 2), np.diag([-1j, 1j]), atol=1e-15)
    rng = np.random.default_rng(1)
    np.testing.assert_allclose(expm_hermitian(random_hermitian(rng, 5), 0.0), np.eye(5), atol=1e-14)
    with pytest.raises(OperatorError):
        expm_hermitian(np.array([[0, 1], [0, 0]]), 1.0)


def test_expm_unitary_random_draws():
    rng = np.random.default_rng(7)
    for _ in range(100):
        dim = int(rng.integers(2, 12))
        u = expm_hermitian(random_hermitian(rng, dim, 3.0), rng.normal())
        assert unitarity_error(u) < 1e-10


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(-3, 3), st.floats(-3, 3))
def test_expm_group_property(seed, s, t):
    h = random_hermitian(np.random.default_rng(seed), 6)
    lhs = expm_hermitian(h, s) @ expm_hermitian(h, t)
    assert np.max(np.abs(lhs - expm_hermitian(h, s + t))) < 1e-9


def test_fidelity_examples():
    zero, one = np.array([1, 0]), np.array([0, 1])
    plus = np.array([1, 1]) / np.sqrt(2)
    assert fidelity(zero, zero) == pytest.approx(1.0)
    assert fidelity(zero, one) == 0.0
    assert fidelity(zero, plus) == pytest.approx(0.5)
    with pytest.raises(OperatorError):
        fidelity(zero, np.ones(3))


def test_principal_log_examples():
    np.testing.assert_allclose(principal_log_unitary(np.eye(3)), np.zeros((3, 3)), atol=1e-15)
    u = expm_hermitian(pauli("z"), 0.3)
    np.testing.assert_allclose(principal_log_unitary(u), 0.3 * pauli("z"), atol=1e-14)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 8))
def test_principal_log_round_trip(seed, dim):
    h = random_hermitian(np.random.default_rng(seed), dim)
    h *= 0.99 / np.linalg.norm(h, 2)
    assert np.max(np.abs(principal_log_unitary(expm_hermitian(h, 1.0)) - h)) < 1e-9


def test_principal_log_errors():
    with pytest.raises(OperatorError):
        principal_log_unitary(np.array([[1, 1], [0, 1]]))
    with pytest.raises(OperatorError, match="branch"):
        principal_log_unitary(expm_hermitian(pauli("z"), np.pi - 0.05))


def test_hermiticity_check():
    check_hermitian(pauli("y"))
    with pytest.raises(OperatorError):
        check_hermitian(np.array([[0, 1], [0, 0]]))
    with pytest.raises(OperatorError):
        check_hermitian(np.ones((2, 3)))


def test_norm_check():
    check_normalized(np.array([0.6, 0.8]))
    with pytest.raises(OperatorError):
        check_normalized(np.array([1.0, 1.0]))
