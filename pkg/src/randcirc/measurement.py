"""Weak (unsharp) single-qubit measurements and entanglement robustness.

The two-outcome pair M±(lambda) = (I ± lambda * sigma_z)/sqrt(2(1+lambda^2))
interpolates between no measurement (lambda -> 0) and a projective
measurement (lambda = 1).  Besides the direct apply-and-renormalize path,
this module has a sweep-optimized evaluator: the measurement operator is
diagonal, so every cut's post-measurement Gram matrix is a closed-form
combination of lambda-independent Grams, and one pass over the cuts serves
all strengths, both outcomes, and all measured sites at once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import metrics
from .circuits import evolve
from .metrics import _cut_matrix, _power_top, _power_top_batch, _require_normalized, _small_side_levels, _top_superset
from .sampling import RngStream
from .state import StateVector, apply_one_qubit, new_basis_state

DEFAULT_LAMBDA_GRID = tuple(round(0.05 * k, 2) for k in range(1, 21))

_SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)


class ExcludedBranchError(RuntimeError):
    """The requested measurement branch has zero Born probability."""


@dataclass(frozen=True)
class WeakMeasurementPair:
    """Operator pair M±(lambda) with the completeness invariant
    M+†M+ + M-†M- = I."""

    lam: float
    m_plus: np.ndarray = field(init=False, repr=False)
    m_minus: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if not 0.0 < self.lam <= 1.0:
            raise ValueError(f"measurement strength must be in (0, 1], got {self.lam}")
        scale = 1.0 / math.sqrt(2.0 * (1.0 + self.lam**2))
        eye = np.eye(2, dtype=np.complex128)
        object.__setattr__(self, "m_plus", (eye + self.lam * _SIGMA_Z) * scale)
        object.__setattr__(self, "m_minus", (eye - self.lam * _SIGMA_Z) * scale)

    def completeness_defect(self) -> float:
        """Max deviation of M+†M+ + M-†M- from the identity."""
        total = self.m_plus.conj().T @ self.m_plus + self.m_minus.conj().T @ self.m_minus
        return float(np.max(np.abs(total - np.eye(2))))


def analytic_ghz_decay(lam: float) -> float:
    """Closed-form post-measurement entanglement of a GHZ state:
    (1-lambda)^2 / (2(1+lambda^2))."""
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"measurement strength must be in [0, 1], got {lam}")
    return (1.0 - lam) ** 2 / (2.0 * (1.0 + lam**2))


def apply_weak_measurement(
    state: StateVector,
    site: int,
    pair: WeakMeasurementPair,
    outcome: str,
) -> tuple[StateVector, float]:
    """Post-measurement state for one outcome and its Born probability.

    The input state is left untouched (a copy is measured) so both branches
    can be evaluated from the same pre-measurement state.
    """
    if outcome not in ("plus", "minus"):
        raise ValueError(f"outcome must be 'plus' or 'minus', got {outcome!r}")
    _require_normalized(state)
    op = pair.m_plus if outcome == "plus" else pair.m_minus
    post = apply_one_qubit(state.copy(), site, op)
    p = float(np.vdot(post.amplitudes, post.amplitudes).real)
    if p <= 1e-14:
        raise ExcludedBranchError(f"outcome {outcome} has zero probability at site {site}")
    post.amplitudes /= math.sqrt(p)
    return post, p


def branch_averaged_ggm(state: StateVector, site: int, lam: float) -> float:
    """Born-probability-weighted entanglement over both outcomes, via the
    direct apply-and-measure path."""
    pair = WeakMeasurementPair(lam)
    total = 0.0
    for outcome in ("plus", "minus"):
        try:
            post, p = apply_weak_measurement(state, site, pair, outcome)
        except ExcludedBranchError:
            continue
        total += p * metrics.ggm(post)
    return total


# -- sweep-optimized evaluation ----------------------------------------------


def weak_branch_tables(state: StateVector, lambdas) -> tuple[np.ndarray, np.ndarray]:
    """Born probabilities and branch entanglements for every (site, strength,
    outcome) at once.

    Returns arrays of shape (N, L, 2) indexed by measured site (0-based),
    lambda-grid position, and outcome (0 = plus, 1 = minus).  Exploits that
    M± is diagonal: per cut, the post-measurement Gram is D H0 D (measured
    site on the row side) or a fixed mixture of two half-column Grams
    (column side), both built from lambda-independent pieces.  Upper bounds
    (Frobenius norm, PSD-order scaling, partial-trace purity doubling) prune
    cuts that cannot host the maximum, leaving the result identical to the
    direct per-branch scan.
    """
    _require_normalized(state)
    n = state.num_qubits
    psi = state.tensor()
    lam = np.asarray(lambdas, dtype=float)
    nl = len(lam)
    # linear diagonal factors of M± per (outcome, qubit bit) and their squares
    # (raw Born weights); the common 1/(2(1+lam^2)) normalization cancels
    lin = np.empty((2, 2, nl))
    lin[0, 0] = 1.0 + lam
    lin[0, 1] = 1.0 - lam
    lin[1, 0] = lin[0, 1]
    lin[1, 1] = lin[0, 0]
    fac = lin**2
    maxfac = np.maximum(fac[:, 0], fac[:, 1])  # (2, L)

    probs = np.abs(psi) ** 2
    w0 = np.array(
        [probs.sum(axis=tuple(a for a in range(n) if a != s))[0] for s in range(n)]
    )
    p_raw = fac[None, :, 0, :] * w0[:, None, None] + fac[None, :, 1, :] * (1.0 - w0)[:, None, None]
    p_safe = np.where(p_raw > 1e-14, p_raw, np.inf)  # excluded branches score 0

    best = np.zeros((n, 2, nl))
    levels = _small_side_levels(n)
    top = max(levels)
    top_frob: dict[tuple[int, ...], float] = {}

    def process_cut(axes: tuple[int, ...], pending: list) -> None:
        s = len(axes)
        rows = set(axes)
        m = _cut_matrix(psi, axes)
        h0 = m @ m.conj().T
        frob0 = math.sqrt(np.einsum("ij,ij->", h0.real, h0.real) + np.einsum("ij,ij->", h0.imag, h0.imag))
        if s == top:
            top_frob[axes] = frob0
        for site in range(n):
            live = maxfac * frob0 / p_safe[site] > best[site]
            if not live.any():
                continue
            if site in rows:
                j = axes.index(site)
                bits = (np.arange(2**s) >> (s - 1 - j)) & 1
                d_rows = lin[:, bits, :]  # (2, m, L)
                oi, li = np.nonzero(live)
                scal = d_rows[oi, :, li]  # (k, m)
                hs = h0[None, :, :] * (scal[:, :, None] * scal[:, None, :])
            else:
                cols = [a for a in range(n) if a not in rows]
                j = cols.index(site)
                lead = 2**j
                m_r = m.reshape(2**s, lead, 2, -1)
                me = m_r[:, :, 0, :].reshape(2**s, -1)
                a_gram = me @ me.conj().T
                c_gram = h0 - a_gram
                aa = float(np.einsum("ij,ij->", a_gram.real, a_gram.real) + np.einsum("ij,ij->", a_gram.imag, a_gram.imag))
                cc = float(np.einsum("ij,ij->", c_gram.real, c_gram.real) + np.einsum("ij,ij->", c_gram.imag, c_gram.imag))
                ac = float(np.einsum("ij,ij->", a_gram.real, c_gram.real) + np.einsum("ij,ij->", a_gram.imag, c_gram.imag))
                f0, f1 = fac[:, 0, :], fac[:, 1, :]
                frob2 = f0**2 * aa + 2.0 * f0 * f1 * ac + f1**2 * cc
                live &= np.sqrt(frob2) / p_safe[site] > best[site]
                if not live.any():
                    continue
                oi, li = np.nonzero(live)
                hs = f0[oi, li][:, None, None] * a_gram[None] + f1[oi, li][:, None, None] * c_gram[None]
            pending.append((site, oi, li, hs))

    def flush(pending: list) -> None:
        if not pending:
            return
        hs = np.concatenate([h for (_, _, _, h) in pending])
        lams = _power_top_batch(hs)
        pos = 0
        for site, oi, li, h in pending:
            k = len(oi)
            vals = lams[pos : pos + k] / p_safe[site][oi, li]
            np.maximum.at(best[site], (oi, li), vals)
            pos += k
        pending.clear()

    cheap = [s for s in (1, 2, 3) if s in levels and s < top]
    for s in cheap:
        pending: list = []
        for axes in levels[s]:
            process_cut(axes, pending)
        flush(pending)
    pending = []
    for axes in levels[top]:
        process_cut(axes, pending)
    flush(pending)
    for s in sorted((s for s in levels if 3 < s < top), reverse=True):
        pending = []
        factor = math.sqrt(2.0 ** (top - s))
        for axes in levels[s]:
            f_top = top_frob[_top_superset(axes, top, n)]
            bound = factor * f_top * maxfac[None, :, :] / p_safe  # (n, 2, L)
            if not (bound > best).any():
                continue
            process_cut(axes, pending)
        flush(pending)

    g_branch = 1.0 - best
    g_branch[p_raw <= 1e-14] = 0.0
    p_branch = p_raw / (2.0 * (1.0 + lam**2))[None, None, :]
    return p_branch.transpose(0, 2, 1), g_branch.transpose(0, 2, 1)


def ensemble_weak_ggm(
    layout: str,
    num_qubits: int,
    t_equil: int,
    lam: float,
    trials: int = 100,
    realizations: int = 200,
    rng: RngStream | None = None,
    mode: str = "independent",
) -> float:
    """Mean post-measurement entanglement of circuit-equilibrated states.

    Each realization evolves |0...0> for `t_equil` iterations; `independent`
    trials each draw a uniform site and contribute the probability-weighted
    average over both outcomes of one measurement on the equilibrated state.
    `sequential` mode instead chains trials on the evolving post-measurement
    state with Born-sampled outcomes (sensitivity analysis only).
    """
    if mode not in ("independent", "sequential"):
        raise ValueError(f"unknown mode {mode!r}")
    if rng is None:
        rng = RngStream(0)
    vals = []
    for _ in range(realizations):
        state = new_basis_state(num_qubits, "0" * num_qubits)
        evolve(state, layout, t_equil, rng)
        if mode == "independent":
            p, g = weak_branch_tables(state, [lam])
            site_vals = (p * g).sum(axis=2)[:, 0]
            draws = rng.gen.integers(num_qubits, size=trials)
            vals.append(float(site_vals[draws].mean()))
        else:
            pair = WeakMeasurementPair(lam)
            cur = state
            tvals = []
            for _ in range(trials):
                site = int(rng.gen.integers(num_qubits)) + 1
                p_plus = _site_plus_probability(cur, site, lam)
                outcome = "plus" if rng.gen.random() < p_plus else "minus"
                cur, _ = apply_weak_measurement(cur, site, pair, outcome)
                tvals.append(metrics.ggm(cur))
            vals.append(float(np.mean(tvals)))
    return float(np.mean(vals))


def _site_plus_probability(state: StateVector, site: int, lam: float) -> float:
    probs = np.abs(state.tensor()) ** 2
    others = tuple(a for a in range(state.num_qubits) if a != site - 1)
    w0 = float(probs.sum(axis=others)[0])
    return ((1.0 + lam) ** 2 * w0 + (1.0 - lam) ** 2 * (1.0 - w0)) / (2.0 * (1.0 + lam**2))
