"""Staircase circuits that prepare bounded-rank matrix product states.

An ebit budget k >= 1 uses n-k blocks of width k+1; block j acts on the
contiguous qubits [j, j+k] and consecutive blocks overlap on k qubits, which
caps the Schmidt rank at 2^k across every contiguous cut of the output.
Each block is the full special-unitary exponential over the non-identity
Pauli strings of its width (4^(k+1) - 1 real coefficients).

k = 0 is the product-state family with two angles per qubit,
cos(t1)|0> + exp(-i t2) sin(t1)|1>, for 2n parameters in total.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.linalg

from .errors import CapacityError, ShapeError, ValidationError
from .simulator import (
    DenseUnitary,
    QubitWindow,
    Statevector,
    apply_matrix_raw,
    zero_state,
)

# Width-7 generator stacks would already need ~4 GB; anything above this cap
# is far outside desk scale.
MAX_BLOCK_WIDTH = 6

_PAULI = {
    "I": np.eye(2, dtype=np.complex128),
    "X": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    "Z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
}


def pauli_strings(width: int) -> list[str]:
    """Non-identity Pauli strings of the given width, lexicographic in I<X<Y<Z."""
    labels = ["".join(s) for s in itertools.product("IXYZ", repeat=width)]
    return labels[1:]


@lru_cache(maxsize=8)
def _generator_stack(width: int) -> np.ndarray:
    """Stacked (4^w - 1, 2^w, 2^w) array of the non-identity Pauli matrices."""
    if width > MAX_BLOCK_WIDTH:
        raise CapacityError(f"block width {width} exceeds supported cap {MAX_BLOCK_WIDTH}")
    mats = []
    for label in pauli_strings(width):
        m = np.array([[1.0]], dtype=np.complex128)
        for ch in label:
            m = np.kron(m, _PAULI[ch])
        mats.append(m)
    return np.stack(mats)


@dataclass(frozen=True)
class BlockSpec:
    """One parameterized block: its window and its slice of the parameter vector."""

    window: QubitWindow
    param_offset: int
    param_len: int


@dataclass(frozen=True)
class AnsatzCircuit:
    """Ordered staircase of parameterized blocks for an n-qubit, k-ebit family."""

    n: int
    k: int
    blocks: tuple[BlockSpec, ...]
    total_params: int


def build_mps_ansatz(n: int, k: int) -> AnsatzCircuit:
    """Construct the staircase circuit for qubit count n and ebit budget k.

    Valid budgets are 0 <= k <= floor(n/2).  k = 0 yields n single-qubit
    product blocks with 2 parameters each; k >= 1 yields n-k blocks of width
    k+1 with 4^(k+1) - 1 parameters each, applied in order j = 0 .. n-k-1.
    """
    if n < 1:
        raise ValidationError(f"qubit count must be >= 1, got {n}")
    if not 0 <= k <= n // 2:
        raise ValidationError(f"ebit budget k={k} outside valid range [0, {n // 2}] for n={n}")
    if k + 1 > MAX_BLOCK_WIDTH:
        raise CapacityError(f"ebit budget k={k} needs block width {k + 1} > cap {MAX_BLOCK_WIDTH}")
    if k == 0:
        blocks = tuple(BlockSpec(QubitWindow((i,)), 2 * i, 2) for i in range(n))
        return AnsatzCircuit(n, 0, blocks, 2 * n)
    width = k + 1
    per_block = 4**width - 1
    blocks = tuple(
        BlockSpec(QubitWindow(tuple(range(j, j + width))), j * per_block, per_block)
        for j in range(n - k)
    )
    return AnsatzCircuit(n, k, blocks, (n - k) * per_block)


def block_unitary(params: np.ndarray, width: int) -> DenseUnitary:
    """exp(-i H) with H = sum_j params_j G_j over the width-w Pauli strings.

    The generator is Hermitian, so the exponential is computed exactly by
    eigendecomposition and the result is unitary by construction.
    """
    params = np.asarray(params, dtype=float)
    expected = 4**width - 1
    if params.shape != (expected,):
        raise ShapeError(f"expected {expected} parameters for width {width}, got {params.shape}")
    h = np.tensordot(params, _generator_stack(width), axes=1)
    lam, vec = np.linalg.eigh(h)
    u = (vec * np.exp(-1j * lam)) @ vec.conj().T
    return DenseUnitary(u)


def product_qubit_unitary(theta1: float, theta2: float) -> DenseUnitary:
    """2x2 unitary sending |0> to cos(theta1)|0> + exp(-i theta2) sin(theta1)|1>."""
    c, s = math.cos(theta1), math.sin(theta1)
    phase = complex(math.cos(theta2), -math.sin(theta2))
    return DenseUnitary(np.array([[c, -s], [phase * s, phase * c]], dtype=np.complex128))


def block_matrices(circuit: AnsatzCircuit, theta: np.ndarray) -> list[np.ndarray]:
    """Raw block matrices at theta, skipping per-call unitarity validation.

    Both parameterizations are unitary by construction; this is the kernel
    the optimizer loop runs on.  block_unitaries wraps the same matrices in
    validated DenseUnitary objects.
    """
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (circuit.total_params,):
        raise ShapeError(
            f"parameter vector of length {theta.size} does not match "
            f"circuit with {circuit.total_params} parameters"
        )
    mats = []
    for spec in circuit.blocks:
        chunk = theta[spec.param_offset : spec.param_offset + spec.param_len]
        if circuit.k == 0:
            c, s = math.cos(chunk[0]), math.sin(chunk[0])
            phase = complex(math.cos(chunk[1]), -math.sin(chunk[1]))
            mats.append(np.array([[c, -s], [phase * s, phase * c]], dtype=np.complex128))
        else:
            h = np.tensordot(chunk, _generator_stack(spec.window.width), axes=1)
            lam, vec = np.linalg.eigh(h)
            mats.append((vec * np.exp(-1j * lam)) @ vec.conj().T)
    return mats


def block_unitaries(circuit: AnsatzCircuit, theta: np.ndarray) -> list[DenseUnitary]:
    """Materialize every block of the circuit at the given parameter vector."""
    return [DenseUnitary(m) for m in block_matrices(circuit, theta)]


def prepare_state(circuit: AnsatzCircuit, theta: np.ndarray) -> Statevector:
    """U(theta)|0...0>: apply the blocks in staircase order to the zero state."""
    amps = zero_state(circuit.n).amplitudes
    for spec, m in zip(circuit.blocks, block_matrices(circuit, theta)):
        amps = apply_matrix_raw(amps, circuit.n, m, spec.window.targets)
    return Statevector(circuit.n, amps)


def pauli_log_coefficients(u: np.ndarray) -> np.ndarray:
    """Coefficients c with exp(-i sum_j c_j G_j) = u up to a global phase.

    Takes the Hermitian logarithm of the (unitary, hence normal) matrix via a
    complex Schur decomposition and projects it onto the non-identity Pauli
    strings; the identity component is dropped, which only shifts the result
    by a global phase.
    """
    u = np.asarray(u, dtype=np.complex128)
    t, z = scipy.linalg.schur(u, output="complex")
    h = (z * (-np.angle(np.diag(t)))) @ z.conj().T
    h = 0.5 * (h + h.conj().T)
    width = int(u.shape[0]).bit_length() - 1
    stack = _generator_stack(width)
    return np.einsum("kij,ji->k", stack, h).real / u.shape[0]


def embed_parameters(
    prev_circuit: AnsatzCircuit, prev_theta: np.ndarray, circuit: AnsatzCircuit
) -> np.ndarray:
    """Lift optimized (k-1)-budget parameters into the k-budget family.

    Block j of the wider circuit is seeded with the previous block j acting on
    its first k qubits and the identity on the extra qubit; the final wider
    block absorbs the two remaining previous blocks as a single composed
    unitary.  The lifted circuit prepares the same state as the previous one
    up to a global phase, so warm-started sweeps can only improve.
    """
    if prev_circuit.n != circuit.n or prev_circuit.k != circuit.k - 1:
        raise ValidationError(
            f"cannot embed (n={prev_circuit.n}, k={prev_circuit.k}) parameters "
            f"into (n={circuit.n}, k={circuit.k})"
        )
    prev_blocks = block_matrices(prev_circuit, prev_theta)
    eye2 = np.eye(2, dtype=np.complex128)
    params = np.zeros(circuit.total_params)
    last = len(circuit.blocks) - 1
    for j, spec in enumerate(circuit.blocks):
        if j < last:
            target = np.kron(prev_blocks[j], eye2)
        else:
            target = np.kron(eye2, prev_blocks[j + 1]) @ np.kron(prev_blocks[j], eye2)
        params[spec.param_offset : spec.param_offset + spec.param_len] = (
            pauli_log_coefficients(target)
        )
    return params


def cnot_lower_bound(r: int) -> float:
    """Theoretical lower bound on CNOT count to realize a rank-r block: (r^2 - 3 log2 r - 1)/4."""
    if r < 2 or r & (r - 1):
        raise ValidationError(f"rank must be a power of two >= 2, got {r}")
    return (r * r - 3 * math.log2(r) - 1) / 4


def ebit_bound(n: int, m: int) -> int:
    """Entanglement cap of an m-depth circuit on n qubits: min(ceil(n/2), m)."""
    if n < 1:
        raise ValidationError(f"qubit count must be >= 1, got {n}")
    if m < 0:
        raise ValidationError(f"depth must be >= 0, got {m}")
    return min(math.ceil(n / 2), m)


def cost_estimate(n: int, r: int, l: int) -> int:
    """Nominal gate-cost figure of merit l * n * r^2 for reporting."""
    if min(n, r, l) < 1:
        raise ValidationError(f"all inputs must be >= 1, got n={n}, r={r}, l={l}")
    return l * n * r * r
