"""Random matrix-product states: sampling, contraction, bond-dimension sweeps.

A chain holds one D x D complex matrix per (site, physical index); the
amplitude of a configuration is the trace of the corresponding matrix
product (periodic boundary).  Slices are drawn either as independent Haar
unitaries or as Ginibre matrices; both flavors are contracted to a dense
normalized statevector for the entanglement metrics.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .metrics import MetricSeries, ggm
from .sampling import RngStream, ginibre_matrix, haar_unitary
from .state import StateVector

FLAVORS = ("unitary", "ginibre")
MAX_BOND_DIM = 64


class DegenerateStateError(RuntimeError):
    """The contracted amplitude vector vanished identically."""


@dataclass
class MpsChain:
    num_sites: int
    bond_dim: int
    slices: np.ndarray  # shape (num_sites, 2, D, D)
    flavor: str


def sample_rmps(rng: RngStream, num_sites: int, bond_dim: int, flavor: str = "unitary") -> MpsChain:
    """Draw all 2N slice matrices independently from the requested ensemble."""
    if num_sites < 2:
        raise ValueError(f"need at least 2 sites, got {num_sites}")
    if not 1 <= bond_dim <= MAX_BOND_DIM:
        raise ValueError(f"bond dimension {bond_dim} outside 1..{MAX_BOND_DIM}")
    if flavor not in FLAVORS:
        raise ValueError(f"unknown flavor {flavor!r}, expected one of {FLAVORS}")
    draw = haar_unitary if flavor == "unitary" else ginibre_matrix
    slices = np.empty((num_sites, 2, bond_dim, bond_dim), dtype=np.complex128)
    for k in range(num_sites):
        for phys in range(2):
            slices[k, phys] = draw(rng, bond_dim)
    return MpsChain(num_sites, bond_dim, slices, flavor)


def _half_products(slices: np.ndarray) -> np.ndarray:
    """Matrix products over all configurations of a block of sites.

    Returns shape (2^k, D, D) with the first site as the most significant
    configuration bit, matching the statevector basis convention.
    """
    out = slices[0]
    for k in range(1, slices.shape[0]):
        out = np.matmul(out[:, None, :, :], slices[k][None, :, :, :])
        out = out.reshape(-1, out.shape[-2], out.shape[-1])
    return out


def mps_to_statevector(chain: MpsChain) -> StateVector:
    """Contract the trace formula to a normalized dense statevector.

    Meet-in-the-middle: left products over the first ceil(N/2) sites and
    right products over the rest, then one matrix product pairs every
    left/right configuration (Tr(L R) = sum_ij L[i,j] R[j,i]).
    """
    n, d = chain.num_sites, chain.bond_dim
    half = (n + 1) // 2
    left = _half_products(chain.slices[:half])
    right = _half_products(chain.slices[half:])
    amps = left.reshape(-1, d * d) @ right.transpose(0, 2, 1).reshape(-1, d * d).T
    amps = amps.reshape(-1)
    norm = np.linalg.norm(amps)
    if norm == 0.0:
        raise DegenerateStateError("all contracted amplitudes are zero")
    return StateVector(n, amps / norm)


def ggm_vs_bond_dimension(
    num_sites: int,
    d_grid,
    realizations: int,
    rng: RngStream,
    flavor: str = "unitary",
) -> MetricSeries:
    """Mean multipartite entanglement of freshly sampled chains per bond dimension."""
    d_grid = list(d_grid)
    values = np.empty((len(d_grid), realizations))
    for r in range(realizations):
        for i, d in enumerate(d_grid):
            chain = sample_rmps(rng, num_sites, d, flavor)
            values[i, r] = ggm(mps_to_statevector(chain))
    mean = values.mean(axis=1)
    stderr = (
        values.std(axis=1, ddof=1) / np.sqrt(realizations)
        if realizations > 1
        else np.zeros(len(d_grid))
    )
    return MetricSeries("ggm", np.asarray(d_grid, dtype=float), mean, stderr, realizations)


def match_min_bond_dimension(
    ru_values,
    rmps_d_grid,
    rmps_values,
    tol: float = 1e-2,
) -> list[int | None]:
    """Smallest grid D whose (running-max smoothed) RMPS entanglement lands
    within `tol` of each circuit-curve value; None where no grid D qualifies."""
    ru = np.asarray(ru_values, dtype=float)
    ds = list(rmps_d_grid)
    curve = np.maximum.accumulate(np.asarray(rmps_values, dtype=float))
    if len(ds) == 0 or len(ds) != len(curve):
        raise ValueError("RMPS grid and curve must be nonempty and equal length")
    out: list[int | None] = []
    for g in ru:
        hit = next((ds[i] for i in range(len(ds)) if abs(g - curve[i]) <= tol), None)
        out.append(hit)
    return out
