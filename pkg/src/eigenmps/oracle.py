"""Black-box unitary construction and application.

Three oracle kinds are supported: dense matrices, diagonal phase oracles
(stored as a 2^n phase vector, applied elementwise without ever building a
matrix) and planted oracles, where a known ansatz state is made an exact
eigenvector by conjugating a diagonal with a fixed unitary completion of
that state (a Householder reflection mixed with a seeded unitary on the
orthogonal complement).

SAT assignment encoding: qubit i in |0> means variable i+1 is FALSE and |1>
means TRUE, so the all-zero register is the all-false assignment.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .ansatz import AnsatzCircuit, prepare_state
from .errors import CapacityError, DimacsError, ShapeError, ValidationError
from .simulator import Statevector

ORACLE_UNITARY_TOL = 1e-8

# Dense 2^n x 2^n payloads get heavy quickly; 12 qubits is already 268 MB.
MAX_DENSE_QUBITS = 12


@dataclass(frozen=True)
class SatInstance:
    """CNF formula: clauses are tuples of nonzero signed literals (positive = true)."""

    num_vars: int
    clauses: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.num_vars < 0:
            raise ValidationError(f"variable count must be >= 0, got {self.num_vars}")
        clauses = tuple(tuple(int(l) for l in c) for c in self.clauses)
        object.__setattr__(self, "clauses", clauses)
        for idx, clause in enumerate(clauses):
            if not clause:
                raise ValidationError(f"clause {idx} is empty")
            for lit in clause:
                if lit == 0 or abs(lit) > self.num_vars:
                    raise ValidationError(
                        f"clause {idx}: literal {lit} outside [1, {self.num_vars}]"
                    )


@dataclass(frozen=True)
class BlackBoxUnitary:
    """Opaque apply-to-state oracle plus provenance metadata.

    kind is one of "dense", "diagonal-phase" or "planted".  Dense oracles
    store the full matrix; diagonal oracles only the phase vector; planted
    oracles store the completion data (Householder vector plus a mixing
    unitary on the orthogonal complement), the phase vector and the planted
    eigenvector itself (kept for ground-truth checks).
    """

    n: int
    kind: str
    matrix: np.ndarray | None = None
    phases: np.ndarray | None = None
    householder: np.ndarray | None = None
    complement: np.ndarray | None = None
    planted_state: np.ndarray | None = None
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in ("dense", "diagonal-phase", "planted"):
            raise ValidationError(f"unknown oracle kind {self.kind!r}")
        if self.phases is not None:
            drift = float(np.max(np.abs(np.abs(self.phases) - 1.0)))
            if drift > 1e-12:
                raise ValidationError(f"phase vector is not unit modulus: drift {drift:.3e}")


def from_dense_matrix(m: np.ndarray, provenance: dict | None = None) -> BlackBoxUnitary:
    """Oracle whose apply is the matrix-vector product with m."""
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ShapeError(f"oracle matrix must be square, got shape {m.shape}")
    dim = m.shape[0]
    n = int(dim).bit_length() - 1
    if dim != 2**n or n < 1:
        raise ShapeError(f"oracle dimension must be a power of two >= 2, got {dim}")
    if n > MAX_DENSE_QUBITS:
        raise CapacityError(f"dense oracle capped at {MAX_DENSE_QUBITS} qubits, got n={n}")
    defect = float(np.linalg.norm(m.conj().T @ m - np.eye(dim)))
    if defect > ORACLE_UNITARY_TOL:
        raise ValidationError(
            f"oracle matrix is not unitary: Frobenius defect {defect:.3e} > "
            f"{ORACLE_UNITARY_TOL:g}"
        )
    return BlackBoxUnitary(n, "dense", matrix=m, provenance=provenance or {"type": "dense"})


def from_hamiltonian_evolution(h: np.ndarray, t: float) -> BlackBoxUnitary:
    """exp(-i h t) by exact eigendecomposition; eigenvectors coincide with h's."""
    h = np.asarray(h, dtype=np.complex128)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ShapeError(f"Hamiltonian must be square, got shape {h.shape}")
    defect = float(np.linalg.norm(h - h.conj().T))
    if defect > ORACLE_UNITARY_TOL:
        raise ValidationError(
            f"Hamiltonian is not Hermitian: Frobenius defect {defect:.3e} > "
            f"{ORACLE_UNITARY_TOL:g}"
        )
    lam, vec = np.linalg.eigh(h)
    u = (vec * np.exp(-1j * lam * t)) @ vec.conj().T
    return from_dense_matrix(u, provenance={"type": "hamiltonian", "t": float(t)})


def clause_violation_counts(sat: SatInstance) -> np.ndarray:
    """c(x) for every assignment x: the number of clauses x leaves unsatisfied."""
    n = sat.num_vars
    indices = np.arange(2**n, dtype=np.int64)
    counts = np.zeros(2**n, dtype=np.int64)
    for clause in sat.clauses:
        violated = np.ones(2**n, dtype=bool)
        for lit in clause:
            bit = (indices >> (n - abs(lit))) & 1
            # literal is false when a positive variable reads 0 or a negated one reads 1
            violated &= bit == (0 if lit > 0 else 1)
        counts += violated
    return counts


def default_sat_time(num_clauses: int) -> float:
    """Evolution time keeping the integer clause counts on distinct phases."""
    return 2.0 * math.pi / (num_clauses + 1) if num_clauses else 1.0


def from_sat_instance(sat: SatInstance, t: float) -> BlackBoxUnitary:
    """Diagonal-phase oracle exp(-i t c(x)) counting unsatisfied clauses."""
    if sat.num_vars < 1:
        raise ValidationError("SAT oracle needs at least one variable")
    counts = clause_violation_counts(sat)
    phases = np.exp(-1j * t * counts)
    return BlackBoxUnitary(
        sat.num_vars,
        "diagonal-phase",
        phases=phases,
        provenance={
            "type": "sat",
            "t": float(t),
            "num_clauses": len(sat.clauses),
            "clause_counts": counts,
        },
    )


def planted_unitary(
    circuit: AnsatzCircuit,
    theta_star: np.ndarray,
    phases: np.ndarray,
    completion_seed: int = 0,
) -> BlackBoxUnitary:
    """Q = V diag(exp(i phases)) V^dagger with V mapping e_0 to the ansatz state.

    V is a fixed unitary completion of the prepared state: a Householder
    reflection carrying e_0 onto it, composed with a seeded Haar unitary on
    the orthogonal complement.  The mixing step keeps the construction
    deterministic while making the non-planted eigenvectors generic; a pure
    reflection would leave them close to basis states, i.e. accidentally
    low-rank.  prepare_state(circuit, theta_star) is an exact eigenvector of
    Q with eigenvalue exp(i phases[0]).
    """
    phases = np.asarray(phases, dtype=float)
    dim = 2**circuit.n
    if phases.shape != (dim,):
        raise ShapeError(f"expected {dim} phases for n={circuit.n}, got shape {phases.shape}")
    if circuit.n > MAX_DENSE_QUBITS:
        raise CapacityError(
            f"planted completion capped at {MAX_DENSE_QUBITS} qubits, got n={circuit.n}"
        )
    psi = prepare_state(circuit, theta_star).amplitudes
    # Rotate the leading amplitude onto the real axis so the Householder
    # reflection lands exactly on the target direction.
    alpha = -np.angle(psi[0]) if abs(psi[0]) > 0 else 0.0
    target = np.exp(1j * alpha) * psi
    diff = np.zeros(dim, dtype=np.complex128)
    diff[0] = 1.0
    diff -= target
    norm = np.linalg.norm(diff)
    householder = diff / norm if norm > 1e-14 else None
    rng = np.random.default_rng(completion_seed)
    gauss = rng.normal(size=(dim - 1, dim - 1)) + 1j * rng.normal(size=(dim - 1, dim - 1))
    complement, upper = np.linalg.qr(gauss)
    complement = complement * np.sign(np.diagonal(upper).real)
    return BlackBoxUnitary(
        circuit.n,
        "planted",
        phases=np.exp(1j * phases),
        householder=householder,
        complement=complement,
        planted_state=psi,
        provenance={"type": "planted", "k": circuit.k, "completion_seed": completion_seed},
    )


def apply(q: BlackBoxUnitary, state: Statevector) -> Statevector:
    """Q|state>.  Diagonal oracles multiply elementwise without a matrix."""
    if q.n != state.n:
        raise ShapeError(f"oracle on {q.n} qubits applied to {state.n}-qubit state")
    return Statevector(state.n, apply_raw(q, state.amplitudes))


def apply_raw(q: BlackBoxUnitary, amps: np.ndarray) -> np.ndarray:
    """Oracle action on a raw amplitude array (no shape re-validation)."""
    if q.kind == "dense":
        return q.matrix @ amps
    if q.kind == "diagonal-phase":
        return q.phases * amps
    # planted: V diag V^dagger with V = Householder . blkdiag(1, complement)
    out = _reflect(q.householder, amps)
    out = np.concatenate(([out[0]], q.complement.conj().T @ out[1:]))
    out = q.phases * out
    out = np.concatenate(([out[0]], q.complement @ out[1:]))
    return _reflect(q.householder, out)


def _reflect(w: np.ndarray | None, vec: np.ndarray) -> np.ndarray:
    """Householder reflection (I - 2 w w^dagger) vec; identity when w is None."""
    if w is None:
        return vec.copy()
    return vec - 2.0 * w * np.vdot(w, vec)


def to_matrix(q: BlackBoxUnitary) -> np.ndarray:
    """Assemble the dense matrix of any oracle kind (small n only)."""
    if q.n > MAX_DENSE_QUBITS:
        raise CapacityError(f"refusing to materialize a {q.n}-qubit oracle")
    if q.kind == "dense":
        return q.matrix.copy()
    if q.kind == "diagonal-phase":
        return np.diag(q.phases)
    dim = 2**q.n
    mixer = np.eye(dim, dtype=np.complex128)
    mixer[1:, 1:] = q.complement
    house = np.eye(dim, dtype=np.complex128)
    if q.householder is not None:
        house -= 2.0 * np.outer(q.householder, q.householder.conj())
    v = house @ mixer
    return v @ np.diag(q.phases) @ v.conj().T


def parse_dimacs(text: str) -> SatInstance:
    """Parse DIMACS CNF: 'c' comments, one 'p cnf V C' header, 0-terminated clauses."""
    num_vars: int | None = None
    declared_clauses = 0
    clauses: list[tuple[int, ...]] = []
    current: list[int] = []
    lineno = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            if num_vars is not None:
                raise DimacsError("duplicate 'p cnf' header", lineno)
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise DimacsError(f"malformed header {line!r}", lineno)
            try:
                num_vars, declared_clauses = int(parts[2]), int(parts[3])
            except ValueError:
                raise DimacsError(f"non-integer counts in header {line!r}", lineno) from None
            if num_vars < 0 or declared_clauses < 0:
                raise DimacsError("negative counts in header", lineno)
            continue
        if num_vars is None:
            raise DimacsError("clause data before 'p cnf' header", lineno)
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise DimacsError(f"non-integer token {tok!r}", lineno) from None
            if lit == 0:
                if not current:
                    raise DimacsError("empty clause (terminator with no literals)", lineno)
                clauses.append(tuple(current))
                current = []
            else:
                if abs(lit) > num_vars:
                    raise DimacsError(
                        f"literal {lit} exceeds declared variable count {num_vars}", lineno
                    )
                current.append(lit)
    if num_vars is None:
        raise DimacsError("missing 'p cnf' header", lineno)
    if current:
        raise DimacsError("unterminated clause at end of input", lineno)
    if len(clauses) != declared_clauses:
        raise DimacsError(
            f"header declares {declared_clauses} clauses, found {len(clauses)}", lineno
        )
    return SatInstance(num_vars, tuple(clauses))


def read_dense_matrix_json(obj: dict) -> np.ndarray:
    """Decode the {"n", "re", "im"} dense-matrix file format."""
    try:
        n = int(obj["n"])
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj["im"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed dense matrix object: {exc}") from exc
    dim = 2**n
    if re.shape != (dim, dim) or im.shape != (dim, dim):
        raise ValidationError(
            f"dense matrix parts must be {dim}x{dim} for n={n}, "
            f"got {re.shape} and {im.shape}"
        )
    return re + 1j * im
