"""Exact dense statevector simulation for small qubit registers.

Basis convention is big endian throughout the package: qubit 0 is the most
significant bit, so the basis index of bitstring b_0 ... b_{n-1} is
sum_i b_i * 2^(n-1-i).  Reshaping an amplitude vector to one axis per qubit
therefore makes axis i the axis of qubit i.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, ShapeError, ValidationError

# Dense vectors stay cheap well past the scales used here; 2^20 amplitudes
# is 16 MB.  Oracle construction, not the simulator, is the practical limit.
MAX_QUBITS = 20

UNITARY_TOL = 1e-10


@dataclass(frozen=True)
class Statevector:
    """Dense complex amplitude vector for an n-qubit register."""

    n: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        object.__setattr__(self, "amplitudes", amps)
        if self.n < 1:
            raise ValidationError(f"qubit count must be >= 1, got {self.n}")
        if amps.shape != (2**self.n,):
            raise ShapeError(
                f"expected {2**self.n} amplitudes for n={self.n}, got shape {amps.shape}"
            )

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def tensor_view(self) -> np.ndarray:
        """View with one axis per qubit; axis i is qubit i."""
        return self.amplitudes.reshape((2,) * self.n)


@dataclass(frozen=True)
class QubitWindow:
    """Ordered distinct qubit indices a block acts on.

    The order fixes the tensor-index order of the applied block:
    targets[0] is the most significant bit of the block matrix index.
    """

    targets: tuple[int, ...]

    def __post_init__(self):
        targets = tuple(int(t) for t in self.targets)
        object.__setattr__(self, "targets", targets)
        if not targets:
            raise ValidationError("window must contain at least one qubit")
        if len(set(targets)) != len(targets):
            raise ValidationError(f"window qubits must be distinct, got {targets}")
        if min(targets) < 0:
            raise ValidationError(f"window qubits must be non-negative, got {targets}")

    @property
    def width(self) -> int:
        return len(self.targets)


@dataclass(frozen=True)
class DenseUnitary:
    """A 2^w x 2^w unitary block, validated once at construction."""

    entries: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=np.complex128)
        object.__setattr__(self, "entries", m)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ShapeError(f"block matrix must be square, got shape {m.shape}")
        dim = m.shape[0]
        if dim < 2 or dim & (dim - 1):
            raise ShapeError(f"block dimension must be a power of two >= 2, got {dim}")
        defect = float(np.linalg.norm(m.conj().T @ m - np.eye(dim)))
        if defect > UNITARY_TOL:
            raise ValidationError(
                f"matrix is not unitary: Frobenius defect {defect:.3e} > {UNITARY_TOL:g}"
            )

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def width(self) -> int:
        return int(self.dim).bit_length() - 1

    def dagger(self) -> "DenseUnitary":
        return DenseUnitary(self.entries.conj().T)


def zero_state(n: int) -> Statevector:
    """The computational basis state |0...0> on n qubits."""
    if not 1 <= n <= MAX_QUBITS:
        raise CapacityError(f"qubit count must be in [1, {MAX_QUBITS}], got {n}")
    amps = np.zeros(2**n, dtype=np.complex128)
    amps[0] = 1.0
    return Statevector(n, amps)


def apply_matrix_raw(amps: np.ndarray, n: int, matrix: np.ndarray, targets: tuple[int, ...]) -> np.ndarray:
    """Unvalidated kernel behind apply_block, for hot loops on raw arrays."""
    w = len(targets)
    psi = np.moveaxis(amps.reshape((2,) * n), targets, range(w))
    shape = psi.shape
    out = matrix @ psi.reshape(2**w, -1)
    return np.moveaxis(out.reshape(shape), range(w), targets).reshape(-1)


def apply_block(state: Statevector, u: DenseUnitary, window: QubitWindow) -> Statevector:
    """Apply u on the window qubits and the identity everywhere else.

    The window axes are gathered to the front, the 2^w x 2^w matrix is
    applied to every group of non-target indices at once, and the axes are
    moved back.  Pure function: the input state is not modified.
    """
    w = window.width
    if u.dim != 2**w:
        raise ShapeError(f"block of dimension {u.dim} does not fit a {w}-qubit window")
    if max(window.targets) >= state.n:
        raise ShapeError(f"window {window.targets} out of range for n={state.n}")
    return Statevector(state.n, apply_matrix_raw(state.amplitudes, state.n, u.entries, window.targets))


def projector_prob(state: Statevector, i: int) -> float:
    """Probability of measuring qubit i in |0>: sum of |a_x|^2 over bit_i(x) = 0."""
    if not 0 <= i < state.n:
        raise ValidationError(f"qubit index {i} out of range for n={state.n}")
    probs = np.abs(state.tensor_view()) ** 2
    return float(probs.take(0, axis=i).sum())


def inner_product(a: Statevector, b: Statevector) -> complex:
    """<a|b> = sum_x conj(a_x) b_x."""
    if a.n != b.n:
        raise ShapeError(f"qubit counts differ: {a.n} vs {b.n}")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def sample_probs(state: Statevector, shots: int, seed: int) -> np.ndarray:
    """Shot-based estimates of the per-qubit |0> probabilities.

    Draws `shots` full bitstrings from the joint distribution |a_x|^2 with a
    seeded generator and returns, per qubit, the fraction of shots in which
    that qubit read 0.  Reproducible given (seed, shots).
    """
    if shots < 1:
        raise ValidationError(f"shots must be >= 1, got {shots}")
    rng = np.random.default_rng(seed)
    p = np.abs(state.amplitudes) ** 2
    p = p / p.sum()
    outcomes = rng.choice(p.size, size=shots, p=p)
    estimates = np.empty(state.n)
    for i in range(state.n):
        bits = (outcomes >> (state.n - 1 - i)) & 1
        estimates[i] = 1.0 - float(bits.mean())
    return estimates
