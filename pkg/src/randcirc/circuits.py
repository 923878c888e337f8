"""Layered random-circuit layouts and iteration stepping.

One iteration of the brick-wall layout applies fresh Haar two-qubit
unitaries on the odd bonds (1,2), (3,4), ... and then on the even bonds
(2,3), (4,5), ...; the star layout couples qubit 1 to every other qubit;
the all-pairs layout couples every pair.  The Clifford layout walks the
same brick-wall bond schedule but draws one gate per bond uniformly from
{Hadamard, S, CNOT}, so Haar and Clifford circuits are compared at equal
gate budget.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .sampling import RngStream, haar_unitary, random_clifford_gate
from .state import StateVector, apply_one_qubit, apply_two_qubit

LAYOUTS = ("brick", "star", "allpairs", "clifford")

HADAMARD = np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2.0)
S_GATE = np.array([[1, 0], [0, 1j]], dtype=np.complex128)
CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]],
    dtype=np.complex128,
)


def brick_wall_bonds(num_qubits: int) -> list[tuple[int, int]]:
    """Odd-bond sublayer followed by the even-bond sublayer, N-1 bonds total."""
    odd = [(i, i + 1) for i in range(1, num_qubits, 2)]
    even = [(i, i + 1) for i in range(2, num_qubits, 2)]
    return odd + even


def star_pairs(num_qubits: int) -> list[tuple[int, int]]:
    return [(1, r) for r in range(2, num_qubits + 1)]


def all_pairs(num_qubits: int) -> list[tuple[int, int]]:
    return [
        (i, j)
        for i in range(1, num_qubits + 1)
        for j in range(i + 1, num_qubits + 1)
    ]


def gates_per_iteration(layout: str, num_qubits: int) -> int:
    if layout in ("brick", "star", "clifford"):
        return num_qubits - 1
    if layout == "allpairs":
        return num_qubits * (num_qubits - 1) // 2
    raise ValueError(f"unknown layout {layout!r}")


def _apply_haar_layer(state: StateVector, bonds, rng: RngStream) -> StateVector:
    for i, j in bonds:
        apply_two_qubit(state, i, j, haar_unitary(rng, 4))
    return state


def step_brick_wall(state: StateVector, rng: RngStream) -> StateVector:
    return _apply_haar_layer(state, brick_wall_bonds(state.num_qubits), rng)


def step_star(state: StateVector, rng: RngStream) -> StateVector:
    return _apply_haar_layer(state, star_pairs(state.num_qubits), rng)


def step_all_pairs(state: StateVector, rng: RngStream) -> StateVector:
    return _apply_haar_layer(state, all_pairs(state.num_qubits), rng)


def step_clifford(state: StateVector, rng: RngStream) -> StateVector:
    """One Clifford gate per brick-wall bond: CNOT across the bond with the
    drawn orientation, or H/S on the drawn bond member."""
    for bond in brick_wall_bonds(state.num_qubits):
        tag = random_clifford_gate(rng)
        if tag.kind == "cnot":
            control = bond[tag.orientation]
            target = bond[1 - tag.orientation]
            apply_two_qubit(state, control, target, CNOT)
        elif tag.kind == "hadamard":
            apply_one_qubit(state, bond[tag.orientation], HADAMARD)
        else:
            apply_one_qubit(state, bond[tag.orientation], S_GATE)
    return state


_STEPS: dict[str, Callable[[StateVector, RngStream], StateVector]] = {
    "brick": step_brick_wall,
    "star": step_star,
    "allpairs": step_all_pairs,
    "clifford": step_clifford,
}


def step(layout: str, state: StateVector, rng: RngStream) -> StateVector:
    try:
        return _STEPS[layout](state, rng)
    except KeyError:
        raise ValueError(f"unknown layout {layout!r}, expected one of {LAYOUTS}") from None


@dataclass
class Trajectory:
    """One circuit run: observer results recorded after each full iteration."""

    layout: str
    num_qubits: int
    t_max: int
    records: list = field(default_factory=list)

    def iterations(self) -> np.ndarray:
        return np.arange(1, self.t_max + 1)


def evolve(
    initial: StateVector,
    layout: str,
    t_max: int,
    rng: RngStream,
    observer: Callable[[int, StateVector], object] | None = None,
) -> Trajectory:
    """Apply the layout's step t_max times, recording observer(t, state)
    after each complete iteration.  The state is evolved in place."""
    if t_max < 1:
        raise ValueError(f"t_max must be >= 1, got {t_max}")
    if layout not in _STEPS:
        raise ValueError(f"unknown layout {layout!r}, expected one of {LAYOUTS}")
    traj = Trajectory(layout, initial.num_qubits, t_max)
    state = initial
    for t in range(1, t_max + 1):
        state = step(layout, state, rng)
        if observer is not None:
            traj.records.append(observer(t, state))
    return traj
