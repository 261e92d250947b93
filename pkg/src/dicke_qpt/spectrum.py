"""Lowest eigenpair of the sparse Hamiltonian and Fock-cutoff convergence.

The iterative solver is ARPACK's implicitly restarted Lanczos (scipy eigsh)
started from the decoupled ground configuration, which makes runs
deterministic.  In the superradiant regime the even/odd ground doublet is
quasi-degenerate and the full-space eigenvector may mix parities; the driver
then re-solves inside the even-parity block, where the gap is healthy.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import ArpackNoConvergence, eigsh

from . import hilbert
from .errors import DimensionOverflow, NoConvergence
from .hilbert import BasisLayout, assemble_hamiltonian, build_basis, default_cutoffs, hamiltonian_terms, parity_signs
from .model import ModelParams

__all__ = [
    "GroundStateRecord",
    "ground_state",
    "ground_state_even",
    "solve_ground",
    "dense_oracle",
    "converge_cutoff",
]

DENSE_LIMIT = 2000
_FALLBACK_SEED = 20250810
PARITY_TOL = 1e-8


@dataclass
class GroundStateRecord:
    """One computed ground state: energy, unit vector and bookkeeping."""

    energy: float
    vector: np.ndarray
    method: str
    params: ModelParams
    basis: BasisLayout
    residual: float = 0.0
    parity: float | None = None
    even_block: bool = False


def _fix_sign(vector):
    """Make the largest-magnitude component positive (reproducible overlaps)."""
    idx = int(np.argmax(np.abs(vector)))
    if vector[idx] < 0:
        return -vector
    return vector


def _dense_lowest(h):
    w, v = np.linalg.eigh(np.asarray(h.todense()))
    return float(w[0]), _fix_sign(np.ascontiguousarray(v[:, 0]))


def ground_state(h, tol=1e-11, v0=None, ncv=None, maxiter=None):
    """Algebraically smallest eigenpair of a real symmetric sparse matrix.

    Deterministic: the start vector defaults to the first basis state (the
    decoupled ground configuration at flat index 0); on ARPACK stagnation one
    retry runs from a seeded random vector before NoConvergence is raised.
    """
    n = h.shape[0]
    if n < 16:
        return _dense_lowest(h)
    if v0 is None:
        v0 = np.zeros(n)
        v0[0] = 1.0
    if ncv is None:
        ncv = min(n - 1, 48)
    try:
        w, v = eigsh(h, k=1, which="SA", v0=v0, ncv=ncv, tol=tol, maxiter=maxiter)
    except ArpackNoConvergence:
        rng = np.random.default_rng(_FALLBACK_SEED)
        v0 = rng.standard_normal(n)
        try:
            w, v = eigsh(
                h, k=1, which="SA", v0=v0, ncv=min(n - 1, 2 * ncv),
                tol=tol, maxiter=10 * n,
            )
        except ArpackNoConvergence as exc:
            raise NoConvergence(
                f"eigensolver stagnated on a {n}-dimensional operator"
            ) from exc
    return float(w[0]), _fix_sign(np.ascontiguousarray(v[:, 0]))


def ground_state_even(h, signs, tol=1e-11):
    """Lowest eigenpair restricted to the even-parity block, embedded back.

    signs is the +/-1 parity diagonal; the even block contains the decoupled
    ground configuration, so the deterministic start vector survives the
    restriction.
    """
    idx = np.flatnonzero(signs > 0)
    sub = h[idx][:, idx].tocsr()
    energy, v_sub = ground_state(sub, tol=tol)
    vector = np.zeros(h.shape[0])
    vector[idx] = v_sub
    return energy, _fix_sign(vector)


def solve_ground(params, basis, h=None, signs=None, tol=1e-11, parity_tol=PARITY_TOL):
    """Quantum ground state with the parity-purity check and even-block fallback."""
    if h is None:
        h = hilbert.build_hamiltonian(params, basis)
    if signs is None:
        signs = parity_signs(basis)
    energy, vector = ground_state(h, tol=tol)
    parity = float(signs @ (vector * vector))
    even_block = False
    if abs(parity - 1.0) > parity_tol:
        energy, vector = ground_state_even(h, signs, tol=tol)
        parity = float(signs @ (vector * vector))
        even_block = True
    residual = float(np.linalg.norm(h @ vector - energy * vector))
    return GroundStateRecord(
        energy=energy,
        vector=vector,
        method="Quantum",
        params=params,
        basis=basis,
        residual=residual,
        parity=parity,
        even_block=even_block,
    )


def dense_oracle(h, limit=DENSE_LIMIT, return_vectors=False):
    """Full dense spectrum (ascending), for tests and small instances only."""
    n = h.shape[0]
    if n > limit:
        raise DimensionOverflow(f"dense oracle limited to {limit}, got {n}")
    dense = np.asarray(h.todense())
    if return_vectors:
        w, v = np.linalg.eigh(dense)
        return w, v
    return np.linalg.eigvalsh(dense)


def converge_cutoff(
    params,
    tol_e=1e-8,
    step=10,
    start=None,
    dim_limit=hilbert.DIM_LIMIT,
    eig_tol=1e-11,
):
    """Grow all Fock cutoffs by `step` until the ground energy is stable.

    Stops when |E0(nmax) - E0(nmax + step)| < tol_e and returns the larger
    (converged) basis together with its ground-state record.
    """
    if tol_e <= 0:
        raise ValueError("tol_e must be > 0")
    nmax = tuple(start) if start is not None else default_cutoffs(params)
    basis = build_basis(params.two_j, nmax, dim_limit=dim_limit)
    record = solve_ground(params, basis, tol=eig_tol)
    while True:
        nmax_next = tuple(n + step for n in nmax)
        try:
            basis_next = build_basis(params.two_j, nmax_next, dim_limit=dim_limit)
        except DimensionOverflow as exc:
            raise NoConvergence(
                f"cutoff convergence hit the dimension limit {dim_limit} "
                f"before reaching tol_e = {tol_e}"
            ) from exc
        record_next = solve_ground(params, basis_next, tol=eig_tol)
        if abs(record_next.energy - record.energy) < tol_e:
            return basis_next, record_next
        nmax, basis, record = nmax_next, basis_next, record_next
