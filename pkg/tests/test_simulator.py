import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import ghz, random_state, random_unitary
from eigenmps.errors import CapacityError, ShapeError, ValidationError
from eigenmps.simulator import (
    DenseUnitary,
    QubitWindow,
    Statevector,
    apply_block,
    inner_product,
    projector_prob,
    sample_probs,
    zero_state,
)

X = DenseUnitary(np.array([[0, 1], [1, 0]]))
H = DenseUnitary(np.array([[1, 1], [1, -1]]) / np.sqrt(2))


def test_zero_state_basic():
    assert np.array_equal(zero_state(1).amplitudes, [1, 0])
    assert np.array_equal(zero_state(2).amplitudes, [1, 0, 0, 0])
    e0 = np.zeros(8)
    e0[0] = 1
    assert np.array_equal(zero_state(3).amplitudes, e0)


@pytest.mark.parametrize("n", [0, -1, 21])
def test_zero_state_capacity(n):
    with pytest.raises(CapacityError):
        zero_state(n)


def test_identity_block_is_bitwise_noop():
    state = random_state(np.random.default_rng(1), 3)
    eye = DenseUnitary(np.eye(4))
    out = apply_block(state, eye, QubitWindow((0, 2)))
    assert np.max(np.abs(out.amplitudes - state.amplitudes)) < 1e-15


def test_pauli_x_fixes_big_endian_convention():
    # qubit 0 is the most significant bit: X on qubit 0 of |00> gives index 2
    out = apply_block(zero_state(2), X, QubitWindow((0,)))
    assert np.allclose(out.amplitudes, [0, 0, 1, 0])


def test_hadamard_on_single_qubit():
    out = apply_block(zero_state(1), H, QubitWindow((0,)))
    assert np.allclose(out.amplitudes, [1 / np.sqrt(2), 1 / np.sqrt(2)])


def test_apply_block_shape_errors():
    with pytest.raises(ShapeError):
        apply_block(zero_state(2), X, QubitWindow((0, 1)))
    with pytest.raises(ShapeError):
        apply_block(zero_state(2), X, QubitWindow((5,)))


def test_non_unitary_rejected():
    with pytest.raises(ValidationError):
        DenseUnitary(np.array([[1, 0], [0, 2]]))


def test_window_validation():
    with pytest.raises(ValidationError):
        QubitWindow((1, 1))
    with pytest.raises(ValidationError):
        QubitWindow((-1,))


def test_projector_prob_examples():
    for i in range(3):
        assert projector_prob(zero_state(3), i) == pytest.approx(1.0)
    plus = Statevector(1, np.array([1, 1]) / np.sqrt(2))
    assert projector_prob(plus, 0) == pytest.approx(0.5)
    for i in range(3):
        assert projector_prob(ghz(3), i) == pytest.approx(0.5)
    with pytest.raises(ValidationError):
        projector_prob(plus, 1)


def test_inner_product_examples():
    phi = random_state(np.random.default_rng(7), 3)
    assert inner_product(phi, phi) == pytest.approx(1.0)
    flipped = apply_block(zero_state(1), X, QubitWindow((0,)))
    assert inner_product(zero_state(1), flipped) == pytest.approx(0.0)
    rotated = apply_block(zero_state(1), H, QubitWindow((0,)))
    assert inner_product(zero_state(1), rotated) == pytest.approx(1 / np.sqrt(2))
    with pytest.raises(ShapeError):
        inner_product(zero_state(1), zero_state(2))


def test_sample_probs_zero_state_is_exact():
    assert np.array_equal(sample_probs(zero_state(4), 100, seed=3), np.ones(4))


def test_sample_probs_binomial_concentration():
    plus = Statevector(1, np.array([1, 1]) / np.sqrt(2))
    est = sample_probs(plus, 10**6, seed=11)
    assert abs(est[0] - 0.5) < 0.005


def test_sample_probs_deterministic():
    state = random_state(np.random.default_rng(5), 3)
    a = sample_probs(state, 500, seed=42)
    b = sample_probs(state, 500, seed=42)
    assert np.array_equal(a, b)
    with pytest.raises(ValidationError):
        sample_probs(state, 0, seed=1)


@given(st.integers(0, 10**6))
def test_norm_conserved_under_random_blocks(seed):
    rng = np.random.default_rng(seed)
    state = random_state(rng, 4)
    for _ in range(4):
        width = int(rng.integers(1, 3))
        targets = tuple(rng.choice(4, size=width, replace=False))
        u = DenseUnitary(random_unitary(rng, 2**width))
        state = apply_block(state, u, QubitWindow(targets))
    assert abs(state.norm() - 1.0) < 1e-10


@given(st.integers(0, 10**6))
def test_apply_block_is_linear(seed):
    rng = np.random.default_rng(seed)
    a = random_state(rng, 4)
    b = random_state(rng, 4)
    alpha = complex(rng.normal(), rng.normal())
    beta = complex(rng.normal(), rng.normal())
    u = DenseUnitary(random_unitary(rng, 4))
    window = QubitWindow(tuple(rng.choice(4, size=2, replace=False)))
    mixed = Statevector(4, alpha * a.amplitudes + beta * b.amplitudes)
    lhs = apply_block(mixed, u, window).amplitudes
    rhs = (
        alpha * apply_block(a, u, window).amplitudes
        + beta * apply_block(b, u, window).amplitudes
    )
    assert np.max(np.abs(lhs - rhs)) < 1e-12


@given(st.integers(0, 10**6))
def test_block_composition_matches_dense_product(seed):
    rng = np.random.default_rng(seed)
    state = random_state(rng, 4)
    window = QubitWindow(tuple(rng.choice(4, size=2, replace=False)))
    u = random_unitary(rng, 4)
    v = random_unitary(rng, 4)
    stepwise = apply_block(apply_block(state, DenseUnitary(u), window), DenseUnitary(v), window)
    fused = apply_block(state, DenseUnitary(v @ u), window)
    assert np.max(np.abs(stepwise.amplitudes - fused.amplitudes)) < 1e-12


@given(st.integers(0, 10**6))
def test_projector_probs_of_state_and_flipped_state_sum_to_one(seed):
    rng = np.random.default_rng(seed)
    state = random_state(rng, 4)
    i = int(rng.integers(0, 4))
    flipped = apply_block(state, X, QubitWindow((i,)))
    assert projector_prob(state, i) + projector_prob(flipped, i) == pytest.approx(1.0, abs=1e-12)


def test_basis_index_contract():
    # index of bitstring b_0..b_{n-1} is sum b_i 2^(n-1-i)
    n = 4
    for bits in [(1, 0, 0, 0), (0, 1, 1, 0), (1, 0, 1, 1)]:
        state = zero_state(n)
        for i, b in enumerate(bits):
            if b:
                state = apply_block(state, X, QubitWindow((i,)))
        expected = sum(b * 2 ** (n - 1 - i) for i, b in enumerate(bits))
        assert state.amplitudes[expected] == pytest.approx(1.0)
