"""Seedable sources of Haar unitaries, Ginibre matrices, and Clifford gates.

Every trajectory owns one RngStream keyed by (master_seed, stream_id), so
ensembles reproduce bit-identically regardless of how realizations are
scheduled across workers.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

CLIFFORD_KINDS = ("hadamard", "s", "cnot")


class RngStream:
    """Counter-based random stream; equal (master_seed, stream_id) pairs replay
    the exact same sequence on any thread or worker."""

    def __init__(self, master_seed: int, stream_id: int = 0):
        self.master_seed = int(master_seed)
        self.stream_id = int(stream_id)
        seq = np.random.SeedSequence(entropy=self.master_seed, spawn_key=(self.stream_id,))
        self.gen = np.random.Generator(np.random.Philox(seq))

    def __repr__(self) -> str:
        return f"RngStream(master_seed={self.master_seed}, stream_id={self.stream_id})"


@dataclass(frozen=True)
class CliffordGateTag:
    """One uniformly drawn Clifford gate for a bond.

    ``orientation`` selects which bond member is the CNOT control, or which
    member receives a one-qubit gate (0 = first member, 1 = second).
    """

    kind: str
    orientation: int

    def __post_init__(self) -> None:
        if self.kind not in CLIFFORD_KINDS:
            raise ValueError(f"unknown Clifford gate kind {self.kind!r}")
        if self.orientation not in (0, 1):
            raise ValueError(f"orientation must be 0 or 1, got {self.orientation}")


def ginibre_matrix(rng: RngStream, dim: int) -> np.ndarray:
    """dim x dim matrix of independent standard complex Gaussians
    (unit variance per complex entry)."""
    if dim < 1:
        raise ValueError(f"dimension must be >= 1, got {dim}")
    g = rng.gen
    return (g.standard_normal((dim, dim)) + 1j * g.standard_normal((dim, dim))) / np.sqrt(2.0)


def haar_unitary(rng: RngStream, dim: int) -> np.ndarray:
    """Haar-distributed dim x dim unitary via the Ginibre-QR construction.

    Plain QR of a Ginibre matrix is not Haar; rescaling the Q columns so the
    R diagonal becomes positive real fixes the phase ambiguity.
    """
    z = ginibre_matrix(rng, dim)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    q *= d / np.abs(d)
    return q


def random_clifford_gate(rng: RngStream) -> CliffordGateTag:
    """Kind uniform over {Hadamard, S, CNOT}; orientation uniform and independent."""
    g = rng.gen
    kind = CLIFFORD_KINDS[int(g.integers(3))]
    orientation = int(g.integers(2))
    return CliffordGateTag(kind, orientation)
