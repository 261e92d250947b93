"""Truncated Hilbert space (spin sector x Fock modes) and sparse operators.

Basis ordering: the flat index runs over (m_index, nu_1, ..., nu_k) in C
order, spin slowest and the last mode fastest.  With that layout the
matter/field bipartition used by the entanglement entropy is a contiguous
reshape to (2j+1, prod(nmax_i + 1)).

All operators are real in this basis; the Hamiltonian is real symmetric.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce

import numpy as np
from scipy import sparse

from .errors import DimensionMismatch, DimensionOverflow
from .model import ModelParams

__all__ = [
    "DIM_LIMIT",
    "BasisLayout",
    "build_basis",
    "default_cutoffs",
    "op_jz",
    "op_jplus",
    "op_jminus",
    "op_a",
    "op_adag",
    "op_number",
    "build_parity",
    "build_hamiltonian",
    "hamiltonian_terms",
    "assemble_hamiltonian",
    "jz_diagonal",
    "number_diagonal",
    "parity_signs",
]

DIM_LIMIT = 2_000_000


@dataclass(frozen=True)
class BasisLayout:
    """Index codec for the truncated space H_j x F_1 x ... x F_k.

    m_index = 0..2j maps to the magnetic label m = m_index - j, so flat
    index 0 is the decoupled ground configuration (m = -j, all nu_i = 0).
    """

    two_j: int
    nmax: tuple

    def __post_init__(self):
        object.__setattr__(self, "nmax", tuple(int(n) for n in self.nmax))
        if self.two_j < 0:
            raise ValueError("two_j must be >= 0")
        if len(self.nmax) < 1 or any(n < 0 for n in self.nmax):
            raise ValueError("every Fock cutoff must be >= 0")

    @property
    def k(self):
        return len(self.nmax)

    @property
    def spin_dim(self):
        return self.two_j + 1

    @property
    def fock_dims(self):
        return tuple(n + 1 for n in self.nmax)

    @property
    def fock_size(self):
        return math.prod(self.fock_dims)

    @property
    def dim(self):
        return self.spin_dim * self.fock_size

    @property
    def shape(self):
        return (self.spin_dim,) + self.fock_dims

    def index(self, m_index, occupations):
        """Flat index of the basis state (m_index, nu_1, ..., nu_k)."""
        if not 0 <= m_index < self.spin_dim:
            raise IndexError("m_index out of range")
        flat = m_index
        for nu, d in zip(occupations, self.fock_dims, strict=True):
            if not 0 <= nu < d:
                raise IndexError("occupation out of range")
            flat = flat * d + nu
        return flat

    def labels(self, flat):
        """Inverse codec: flat index -> (m_index, (nu_1, ..., nu_k))."""
        if not 0 <= flat < self.dim:
            raise IndexError("flat index out of range")
        occ = []
        for d in reversed(self.fock_dims):
            occ.append(flat % d)
            flat //= d
        return flat, tuple(reversed(occ))

    def m_value(self, m_index):
        return m_index - 0.5 * self.two_j


def build_basis(two_j, nmax, dim_limit=DIM_LIMIT):
    """Construct a BasisLayout, guarding against runaway dimensions."""
    basis = BasisLayout(two_j, tuple(nmax))
    if basis.dim > dim_limit:
        raise DimensionOverflow(
            f"basis dimension {basis.dim} exceeds the limit {dim_limit}"
        )
    return basis


def default_cutoffs(params: ModelParams):
    """Initial per-mode cutoffs, sized to exceed the superradiant occupation.

    ceil(8 j gamma_i^2 / (N Omega_i^2)) + 20 tracks the coherent-state photon
    number scale; the convergence loop in spectrum enlarges it as needed.
    """
    return tuple(
        math.ceil(4.0 * params.two_j * g * g / (params.n_atoms * w * w)) + 20
        for g, w in zip(params.gammas, params.omegas)
    )


def _spin_jz(basis):
    m = np.arange(basis.spin_dim) - 0.5 * basis.two_j
    return sparse.diags(m, format="csr")


def _spin_ladder(basis):
    """J+ on the spin factor: connects m_index -> m_index + 1."""
    j = 0.5 * basis.two_j
    m = np.arange(basis.spin_dim - 1) - j
    coeff = np.sqrt(j * (j + 1) - m * (m + 1))
    return sparse.csr_matrix(
        (coeff, (np.arange(1, basis.spin_dim), np.arange(basis.spin_dim - 1))),
        shape=(basis.spin_dim, basis.spin_dim),
    )


def _mode_a(basis, mode):
    d = basis.fock_dims[mode]
    coeff = np.sqrt(np.arange(1, d))
    return sparse.csr_matrix(
        (coeff, (np.arange(d - 1), np.arange(1, d))), shape=(d, d)
    )


def _embed(basis, spin_mat=None, mode_mats=None):
    """Kronecker chain [spin, mode_1, ..., mode_k] with identities elsewhere."""
    mode_mats = mode_mats or {}
    factors = [spin_mat if spin_mat is not None else sparse.identity(basis.spin_dim, format="csr")]
    for i, d in enumerate(basis.fock_dims):
        factors.append(mode_mats.get(i, sparse.identity(d, format="csr")))
    return reduce(lambda a, b: sparse.kron(a, b, format="csr"), factors)


def _check_mode(basis, mode):
    if not 0 <= mode < basis.k:
        raise IndexError(f"mode {mode} out of range for k = {basis.k}")


def op_jz(basis):
    return _embed(basis, spin_mat=_spin_jz(basis))


def op_jplus(basis):
    return _embed(basis, spin_mat=_spin_ladder(basis))


def op_jminus(basis):
    return _embed(basis, spin_mat=_spin_ladder(basis).T.tocsr())


def op_a(basis, mode):
    _check_mode(basis, mode)
    return _embed(basis, mode_mats={mode: _mode_a(basis, mode)})


def op_adag(basis, mode):
    _check_mode(basis, mode)
    return _embed(basis, mode_mats={mode: _mode_a(basis, mode).T.tocsr()})


def op_number(basis, mode):
    _check_mode(basis, mode)
    return _embed(
        basis,
        mode_mats={mode: sparse.diags(np.arange(basis.fock_dims[mode], dtype=float), format="csr")},
    )


def jz_diagonal(basis):
    """Diagonal of J_z as a dense vector (J_z is diagonal in this basis)."""
    m = np.arange(basis.spin_dim) - 0.5 * basis.two_j
    return np.repeat(m, basis.fock_size)


def number_diagonal(basis, mode):
    """Diagonal of the mode occupation operator as a dense vector."""
    _check_mode(basis, mode)
    out = np.zeros(basis.shape)
    nu = np.arange(basis.fock_dims[mode], dtype=float)
    out += nu.reshape((1,) * (1 + mode) + (-1,) + (1,) * (basis.k - mode - 1))
    return out.ravel()


def parity_signs(basis):
    """(-1)^(j + m + sum nu_i) per basis state, as a +/-1 vector.

    j + m = m_index is a non-negative integer for every allowed j.
    """
    sign_vecs = [(-1.0) ** (np.arange(basis.spin_dim) % 2)]
    sign_vecs += [(-1.0) ** (np.arange(d) % 2) for d in basis.fock_dims]
    return reduce(np.kron, sign_vecs)


def build_parity(basis):
    """Diagonal parity operator exp(i pi Lambda) with entries +/-1."""
    return sparse.diags(parity_signs(basis), format="csr")


class HamiltonianTerms:
    """Precomputed pieces so sweeps can assemble H(x) cheaply per grid point.

    H = omega_a * diag(jz) + sum_i Omega_i * diag(n_i) - sum_i gamma_i * C_i
    with C_i = (1/sqrt(N)) (J+ + J-) (a_i + a_i^dag) already carrying the
    1/sqrt(N) factor.
    """

    def __init__(self, basis: BasisLayout, n_atoms: int):
        self.basis = basis
        self.n_atoms = n_atoms
        self.jz = jz_diagonal(basis)
        self.numbers = [number_diagonal(basis, i) for i in range(basis.k)]
        ladder = _spin_ladder(basis)
        jpm = (ladder + ladder.T).tocsr()
        scale = 1.0 / math.sqrt(n_atoms)
        self.couplings = []
        for i in range(basis.k):
            x_i = _mode_a(basis, i)
            x_i = (x_i + x_i.T).tocsr()
            self.couplings.append(scale * _embed(basis, spin_mat=jpm, mode_mats={i: x_i}))


def hamiltonian_terms(basis, n_atoms):
    return HamiltonianTerms(basis, n_atoms)


def assemble_hamiltonian(params: ModelParams, terms: HamiltonianTerms):
    diag = params.omega_a * terms.jz
    for w, n_diag in zip(params.omegas, terms.numbers):
        diag = diag + w * n_diag
    h = sparse.diags(diag, format="csr")
    for g, c in zip(params.gammas, terms.couplings):
        if g != 0.0:
            h = h - g * c
    return h.tocsr()


def build_hamiltonian(params: ModelParams, basis: BasisLayout):
    """Sparse H = omega_a Jz + sum Omega_i n_i - (1/sqrt(N)) sum gamma_i (J- + J+)(a_i + a_i^dag)."""
    if params.two_j != basis.two_j or params.k != basis.k:
        raise DimensionMismatch(
            "params and basis disagree on the spin sector or mode count"
        )
    return assemble_hamiltonian(params, hamiltonian_terms(basis, params.n_atoms))
