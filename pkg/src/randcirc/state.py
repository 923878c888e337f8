"""Dense statevector representation and one/two-qubit gate kernels.

Basis convention used throughout the package: qubit ``k`` (1-based,
``1 <= k <= N``) maps to bit position ``N - k`` of the computational basis
index, i.e. qubit 1 is the most significant bit and ``|0...0>`` is index 0.
Equivalently, reshaping the amplitude array to an ``N``-leg tensor puts
qubit ``k`` on axis ``k - 1``.

Gate application never forms a ``2^N x 2^N`` matrix: gates act on the
reshaped tensor via small contractions that touch 4 (or 2) amplitudes per
strided index group.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MIN_QUBITS = 2
MAX_QUBITS = 14  # 2^14 complex amplitudes and full bipartition scans stay desk-sized

_INV_SQRT2 = 1.0 / np.sqrt(2.0)


@dataclass
class StateVector:
    """Normalized complex amplitudes over the 2^N computational basis states.

    A StateVector is owned by a single trajectory; gate kernels mutate the
    amplitude buffer in place and return the same object for chaining.
    """

    num_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        if not MIN_QUBITS <= self.num_qubits <= MAX_QUBITS:
            raise ValueError(
                f"qubit count {self.num_qubits} outside supported range "
                f"[{MIN_QUBITS}, {MAX_QUBITS}]"
            )
        self.amplitudes = np.asarray(self.amplitudes, dtype=np.complex128)
        if self.amplitudes.shape != (2**self.num_qubits,):
            raise ValueError(
                f"amplitude array has shape {self.amplitudes.shape}, "
                f"expected ({2**self.num_qubits},)"
            )

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def copy(self) -> "StateVector":
        return StateVector(self.num_qubits, self.amplitudes.copy())

    def tensor(self) -> np.ndarray:
        """View of the amplitudes as an N-leg tensor (qubit k on axis k-1)."""
        return self.amplitudes.reshape((2,) * self.num_qubits)


def new_basis_state(num_qubits: int, bits: str) -> StateVector:
    """Computational basis state |bits>, with bits[0] the state of qubit 1."""
    if len(bits) != num_qubits or any(b not in "01" for b in bits):
        raise ValueError(f"bits {bits!r} is not a length-{num_qubits} bitstring")
    amplitudes = np.zeros(2**num_qubits, dtype=np.complex128)
    amplitudes[int(bits, 2)] = 1.0
    return StateVector(num_qubits, amplitudes)


def ghz_state(num_qubits: int) -> StateVector:
    """(|0...0> + |1...1>)/sqrt(2)."""
    amplitudes = np.zeros(2**num_qubits, dtype=np.complex128)
    amplitudes[0] = _INV_SQRT2
    amplitudes[-1] = _INV_SQRT2
    return StateVector(num_qubits, amplitudes)


def _check_site(state: StateVector, site: int) -> None:
    if not 1 <= site <= state.num_qubits:
        raise ValueError(f"site {site} out of range 1..{state.num_qubits}")


def apply_one_qubit(
    state: StateVector,
    site: int,
    gate: np.ndarray,
    renormalize: bool = False,
) -> StateVector:
    """Apply a 2x2 gate to one site, mutating the state in place.

    ``renormalize`` rescales the result to unit norm, which is needed when
    the gate is not unitary (e.g. weak-measurement operators).
    """
    _check_site(state, site)
    gate = np.asarray(gate, dtype=np.complex128)
    if gate.shape != (2, 2):
        raise ValueError(f"one-qubit gate has shape {gate.shape}, expected (2, 2)")
    axis = site - 1
    psi = np.tensordot(gate, state.tensor(), axes=([1], [axis]))
    psi = np.moveaxis(psi, 0, axis)
    state.amplitudes = np.ascontiguousarray(psi).reshape(-1)
    if renormalize:
        state.amplitudes /= np.linalg.norm(state.amplitudes)
    return state


def apply_two_qubit(
    state: StateVector,
    site_i: int,
    site_j: int,
    gate: np.ndarray,
    renormalize: bool = False,
) -> StateVector:
    """Apply a 4x4 gate to sites (i, j), mutating the state in place.

    Gate row/column index convention: b = 2*b_i + b_j where b_i, b_j are the
    bits of sites i and j.  Sites are canonicalized to ascending order
    internally (conjugating the gate by SWAP), so (i, j, G) and
    (j, i, SWAP G SWAP) execute identical arithmetic.
    """
    _check_site(state, site_i)
    _check_site(state, site_j)
    if site_i == site_j:
        raise ValueError(f"two-qubit gate needs distinct sites, got {site_i} twice")
    gate = np.asarray(gate, dtype=np.complex128)
    if gate.shape != (4, 4):
        raise ValueError(f"two-qubit gate has shape {gate.shape}, expected (4, 4)")
    if site_i > site_j:
        site_i, site_j = site_j, site_i
        gate = gate.reshape(2, 2, 2, 2).transpose(1, 0, 3, 2).reshape(4, 4)
    ax_i, ax_j = site_i - 1, site_j - 1
    g = gate.reshape(2, 2, 2, 2)
    psi = np.tensordot(g, state.tensor(), axes=([2, 3], [ax_i, ax_j]))
    psi = np.moveaxis(psi, (0, 1), (ax_i, ax_j))
    state.amplitudes = np.ascontiguousarray(psi).reshape(-1)
    if renormalize:
        state.amplitudes /= np.linalg.norm(state.amplitudes)
    return state
