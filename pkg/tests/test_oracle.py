import numpy as np
import pytest

from conftest import random_state, random_unitary
from eigenmps.ansatz import build_mps_ansatz
from eigenmps.errors import DimacsError, ShapeError, ValidationError
from eigenmps.oracle import (
    SatInstance,
    apply,
    clause_violation_counts,
    default_sat_time,
    from_dense_matrix,
    from_hamiltonian_evolution,
    from_sat_instance,
    parse_dimacs,
    planted_unitary,
    read_dense_matrix_json,
    to_matrix,
)
from eigenmps.simulator import Statevector, zero_state


def brute_force_unsat_count(sat: SatInstance, x: int) -> int:
    """Independent clause-evaluation loop (bit i big-endian = variable i+1)."""
    count = 0
    for clause in sat.clauses:
        satisfied = False
        for lit in clause:
            bit = (x >> (sat.num_vars - abs(lit))) & 1
            if (lit > 0 and bit == 1) or (lit < 0 and bit == 0):
                satisfied = True
                break
        if not satisfied:
            count += 1
    return count


def test_dense_identity():
    q = from_dense_matrix(np.eye(4))
    state = random_state(np.random.default_rng(0), 2)
    assert np.allclose(apply(q, state).amplitudes, state.amplitudes)


def test_dense_pauli_z():
    q = from_dense_matrix(np.diag([1, -1]))
    out = apply(q, Statevector(1, np.array([0.6, 0.8])))
    assert np.allclose(out.amplitudes, [0.6, -0.8])


def test_dense_random_unitary_preserves_norm():
    rng = np.random.default_rng(13)
    q = from_dense_matrix(random_unitary(rng, 8))
    for _ in range(5):
        state = random_state(rng, 3)
        assert abs(apply(q, state).norm() - 1.0) < 1e-10


def test_dense_rejects_non_unitary_with_defect():
    with pytest.raises(ValidationError, match="defect"):
        from_dense_matrix(np.diag([1.0, 2.0]))


def test_dense_vs_matvec():
    rng = np.random.default_rng(17)
    m = random_unitary(rng, 16)
    q = from_dense_matrix(m)
    state = random_state(rng, 4)
    assert np.max(np.abs(apply(q, state).amplitudes - m @ state.amplitudes)) < 1e-12


def test_hamiltonian_evolution_at_zero_time():
    rng = np.random.default_rng(2)
    h = rng.normal(size=(4, 4))
    h = h + h.T
    q = from_hamiltonian_evolution(h, 0.0)
    assert np.allclose(q.matrix, np.eye(4), atol=1e-12)


def test_hamiltonian_evolution_diagonal():
    q = from_hamiltonian_evolution(np.diag([1.0, -1.0]), np.pi / 2)
    expected = np.diag([np.exp(-1j * np.pi / 2), np.exp(1j * np.pi / 2)])
    assert np.allclose(q.matrix, expected, atol=1e-12)


def test_hamiltonian_rejects_non_hermitian():
    with pytest.raises(ValidationError):
        from_hamiltonian_evolution(np.array([[0.0, 1.0], [0.0, 0.0]]), 1.0)


def _tfi_dense(n: int) -> np.ndarray:
    # independent Kronecker construction of -sum Z Z - sum X
    eye, sx, sz = np.eye(2), np.array([[0, 1], [1, 0]]), np.diag([1, -1])

    def op_at(op, site):
        m = np.array([[1.0]])
        for i in range(n):
            m = np.kron(m, op if i == site else eye)
        return m

    h = np.zeros((2**n, 2**n))
    for i in range(n - 1):
        h -= op_at(sz, i) @ op_at(sz, i + 1)
    for i in range(n):
        h -= op_at(sx, i)
    return h


def test_tfi_ground_state_is_oracle_eigenvector():
    h = _tfi_dense(4)
    t = 0.7
    q = from_hamiltonian_evolution(h, t)
    lam, vec = np.linalg.eigh(h)
    ground = Statevector(4, vec[:, 0])
    out = apply(q, ground)
    assert np.max(np.abs(out.amplitudes - np.exp(-1j * lam[0] * t) * ground.amplitudes)) < 1e-10


def test_spectral_consistency_all_eigenpairs():
    rng = np.random.default_rng(23)
    h = rng.normal(size=(16, 16)) + 1j * rng.normal(size=(16, 16))
    h = h + h.conj().T
    t = 0.37
    q = from_hamiltonian_evolution(h, t)
    lam, vec = np.linalg.eigh(h)
    for j in range(16):
        v = Statevector(4, vec[:, j])
        out = apply(q, v)
        assert np.max(np.abs(out.amplitudes - np.exp(-1j * lam[j] * t) * v.amplitudes)) < 1e-8


def test_sat_phase_for_all_false_assignment():
    sat = SatInstance(2, ((1,), (2,)))
    t = 0.9
    q = from_sat_instance(sat, t)
    # |00> is the all-false assignment, so both unit clauses are unsatisfied
    assert q.phases[0] == pytest.approx(np.exp(-2j * t))


def test_sat_satisfying_assignment_has_unit_phase():
    sat = SatInstance(2, ((1, -2), (2,)))
    q = from_sat_instance(sat, 1.3)
    x = 0b11  # both variables true satisfies both clauses
    assert q.phases[x] == pytest.approx(1.0)


def test_sat_counts_match_brute_force():
    rng = np.random.default_rng(31)
    clauses = []
    for _ in range(10):
        variables = rng.choice(6, size=3, replace=False) + 1
        signs = rng.integers(0, 2, size=3) * 2 - 1
        clauses.append(tuple(int(v * s) for v, s in zip(variables, signs)))
    sat = SatInstance(6, tuple(clauses))
    t = 1.0
    q = from_sat_instance(sat, t)
    counts = clause_violation_counts(sat)
    for x in range(64):
        expected = brute_force_unsat_count(sat, x)
        assert counts[x] == expected
        assert q.phases[x] == pytest.approx(np.exp(-1j * t * expected))


def test_sat_basis_states_are_eigenvectors():
    sat = SatInstance(3, ((1, 2, -3),))
    q = from_sat_instance(sat, 0.5)
    amps = np.zeros(8, dtype=complex)
    amps[5] = 1.0
    out = apply(q, Statevector(3, amps))
    assert abs(abs(out.amplitudes[5]) - 1.0) < 1e-12


def test_default_sat_time_avoids_phase_collisions():
    t = default_sat_time(10)
    assert 0 < t < 2 * np.pi / 10


def test_planted_all_zero_phases_gives_identity():
    circuit = build_mps_ansatz(3, 1)
    theta = np.random.default_rng(5).uniform(0, 2 * np.pi, circuit.total_params)
    q = planted_unitary(circuit, theta, np.zeros(8))
    state = random_state(np.random.default_rng(6), 3)
    assert np.max(np.abs(apply(q, state).amplitudes - state.amplitudes)) < 1e-10


def test_planted_zero_state():
    circuit = build_mps_ansatz(3, 0)
    phases = np.random.default_rng(8).uniform(0, 2 * np.pi, 8)
    q = planted_unitary(circuit, np.zeros(6), phases)
    out = apply(q, zero_state(3))
    assert abs(out.amplitudes[0] - np.exp(1j * phases[0])) < 1e-12


def test_planted_eigenvector_recovered_by_dense_eigendecomposition():
    rng = np.random.default_rng(44)
    circuit = build_mps_ansatz(4, 1)
    theta_star = rng.uniform(0, 2 * np.pi, circuit.total_params)
    phases = rng.uniform(0, 2 * np.pi, 16)
    q = planted_unitary(circuit, theta_star, phases)
    dense = to_matrix(q)
    lam, vec = np.linalg.eig(dense)
    overlaps = np.abs(vec.conj().T @ q.planted_state)
    j = int(np.argmax(overlaps))
    assert overlaps[j] > 1 - 1e-8
    assert abs(lam[j] - np.exp(1j * phases[0])) < 1e-8


def test_planted_exactness_and_unitarity():
    rng = np.random.default_rng(45)
    circuit = build_mps_ansatz(4, 1)
    theta_star = rng.uniform(0, 2 * np.pi, circuit.total_params)
    q = planted_unitary(circuit, theta_star, rng.uniform(0, 2 * np.pi, 16))
    planted = Statevector(4, q.planted_state)
    assert abs(abs(np.vdot(planted.amplitudes, apply(q, planted).amplitudes)) - 1.0) < 1e-10
    for _ in range(5):
        state = random_state(rng, 4)
        assert abs(apply(q, state).norm() - 1.0) < 1e-10


def test_apply_shape_mismatch():
    q = from_dense_matrix(np.eye(2))
    with pytest.raises(ShapeError):
        apply(q, zero_state(2))


def test_parse_dimacs_basic():
    sat = parse_dimacs("p cnf 2 1\n1 -2 0\n")
    assert sat.num_vars == 2
    assert sat.clauses == ((1, -2),)


def test_parse_dimacs_header_only():
    sat = parse_dimacs("p cnf 3 0\n")
    assert sat.num_vars == 3
    assert sat.clauses == ()


def test_parse_dimacs_comments_and_multiline_clauses():
    text = "c example\nc another comment\np cnf 3 2\n1 2\n-3 0\n2 3 0\n"
    sat = parse_dimacs(text)
    assert sat.clauses == ((1, 2, -3), (2, 3))


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("p cnf 2 2\n1 0\n", "declares 2"),
        ("1 2 0\n", "header"),
        ("p cnf 2 1\n3 0\n", "exceeds"),
        ("p cnf 2 1\n0\n", "empty clause"),
        ("p cnf 2 1\n1 2\n", "unterminated"),
        ("p cnf 2 1\nx 0\n", "non-integer"),
        ("p cnf 2 1\np cnf 2 1\n", "duplicate"),
    ],
)
def test_parse_dimacs_errors(text, fragment):
    with pytest.raises(DimacsError, match=fragment):
        parse_dimacs(text)


def test_parse_dimacs_error_carries_line_number():
    with pytest.raises(DimacsError) as info:
        parse_dimacs("c ok\np cnf 2 1\n5 0\n")
    assert info.value.line == 3


def test_sat_instance_validation():
    with pytest.raises(ValidationError):
        SatInstance(2, ((0,),))
    with pytest.raises(ValidationError):
        SatInstance(2, ((),))


def test_read_dense_matrix_json():
    obj = {"n": 1, "re": [[0, 1], [1, 0]], "im": [[0, 0], [0, 0]]}
    assert np.allclose(read_dense_matrix_json(obj), [[0, 1], [1, 0]])
    with pytest.raises(ValidationError):
        read_dense_matrix_json({"n": 1, "re": [[1]], "im": [[0]]})
    with pytest.raises(ValidationError):
        read_dense_matrix_json({"n": 1})


def test_diagonal_oracle_applied_without_matrix():
    sat = SatInstance(2, ((1, 2),))
    q = from_sat_instance(sat, 0.4)
    assert q.matrix is None
    state = random_state(np.random.default_rng(9), 2)
    assert np.allclose(apply(q, state).amplitudes, q.phases * state.amplitudes)


def test_every_oracle_kind_preserves_norm():
    rng = np.random.default_rng(55)
    circuit = build_mps_ansatz(3, 1)
    oracles = [
        from_dense_matrix(random_unitary(rng, 8)),
        from_sat_instance(SatInstance(3, ((1, -2), (2, 3))), 0.8),
        planted_unitary(circuit, rng.uniform(0, 2 * np.pi, circuit.total_params),
                        rng.uniform(0, 2 * np.pi, 8)),
    ]
    for q in oracles:
        for _ in range(5):
            state = random_state(rng, 3)
            assert abs(apply(q, state).norm() - 1.0) < 1e-10
