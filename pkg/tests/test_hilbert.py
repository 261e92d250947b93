import numpy as np
import pytest

from dicke_qpt import DimensionOverflow, ModelParams, build_basis, build_hamiltonian, build_parity
from dicke_qpt import hilbert
from dicke_qpt.hilbert import (
    default_cutoffs,
    jz_diagonal,
    number_diagonal,
    op_a,
    op_adag,
    op_jminus,
    op_jplus,
    op_jz,
    parity_signs,
)


def test_dimensions():
    assert build_basis(2, (3, 3)).dim == 3 * 16
    assert build_basis(18, (40, 40)).dim == 19 * 1681 == 31939


def test_dim_limit():
    with pytest.raises(DimensionOverflow):
        build_basis(18, (400, 400), dim_limit=1_000_000)


def test_index_codec_roundtrip():
    basis = build_basis(3, (4, 2, 3))
    for flat in range(basis.dim):
        m, occ = basis.labels(flat)
        assert basis.index(m, occ) == flat
    assert basis.labels(17) == (0, (1, 1, 1))
    assert basis.index(*basis.labels(17)) == 17


def test_spin_half_ladder():
    basis = build_basis(1, (0,))
    jp = op_jplus(basis).toarray()
    # J+ |1/2,-1/2> = |1/2,+1/2> with unit coefficient
    assert jp[1, 0] == pytest.approx(1.0, abs=1e-15)
    assert jp[0, 1] == 0.0


@pytest.mark.parametrize("two_j", [1, 2, 5])
def test_spin_commutator_and_casimir(two_j):
    basis = build_basis(two_j, (2,))
    jp = op_jplus(basis)
    jm = op_jminus(basis)
    jz = op_jz(basis)
    comm = (jp @ jm - jm @ jp - 2.0 * jz).toarray()
    assert np.max(np.abs(comm)) < 1e-13
    j = 0.5 * two_j
    j2 = 0.5 * (jp @ jm + jm @ jp) + jz @ jz
    expected = j * (j + 1) * np.eye(basis.dim)
    assert np.max(np.abs(j2.toarray() - expected)) < 1e-13


def test_mode_operators():
    basis = build_basis(1, (4, 3))
    a1 = op_a(basis, 0)
    ad1 = op_adag(basis, 0)
    # a |0> = 0 in every mode-1 vacuum column
    vac = np.zeros(basis.dim)
    vac[basis.index(0, (0, 0))] = 1.0
    assert np.linalg.norm(a1 @ vac) == 0.0
    # a^dag a is the occupation diagonal
    num = (ad1 @ a1).toarray()
    assert np.allclose(np.diag(num), number_diagonal(basis, 0), atol=1e-14)
    assert np.max(np.abs(num - np.diag(np.diag(num)))) == 0.0
    # different modes commute on the truncated space
    a2d = op_adag(basis, 1)
    comm = (a1 @ a2d - a2d @ a1).toarray()
    assert np.max(np.abs(comm)) == 0.0


def test_truncation_breaks_only_top_row():
    # a a^dag - a^dag a = 1 except on states already at the cutoff
    basis = build_basis(1, (5,))
    a = op_a(basis, 0)
    ad = op_adag(basis, 0)
    comm = (a @ ad - ad @ a).toarray()
    diag = np.diag(comm)
    assert np.max(np.abs(comm - np.diag(diag))) == 0.0
    for flat in range(basis.dim):
        _, (nu,) = basis.labels(flat)
        expected = 1.0 if nu < 5 else -5.0  # top row loses the a^dag channel
        assert diag[flat] == pytest.approx(expected, abs=1e-14)


def test_hamiltonian_decoupled_and_hermitian():
    p = ModelParams(18, 10, 2.0, (2.0, 1.5), (0.0, 0.0))
    basis = build_basis(10, (3, 3))
    h = build_hamiltonian(p, basis)
    dense = h.toarray()
    assert np.max(np.abs(dense - np.diag(np.diag(dense)))) == 0.0
    assert dense[0, 0] == pytest.approx(-10.0, abs=1e-14)  # -j omega_a at (m=-j, 0)
    assert np.min(np.diag(dense)) == pytest.approx(-10.0, abs=1e-14)
    p2 = ModelParams(18, 10, 2.0, (2.0, 1.5), (0.5, 0.8))
    h2 = build_hamiltonian(p2, basis)
    assert abs(h2 - h2.T).max() == 0.0


def test_hamiltonian_matches_hand_assembled_rabi_block():
    # j=1/2, k=1, nmax=1, N=1: four states (m, nu) ordered
    # (-1/2,0), (-1/2,1), (+1/2,0), (+1/2,1)
    omega_a, omega, gamma = 1.3, 0.9, 0.7
    expected = np.array(
        [
            [-0.65, 0.0, 0.0, -0.7],
            [0.0, 0.25, -0.7, 0.0],
            [0.0, -0.7, 0.65, 0.0],
            [-0.7, 0.0, 0.0, 1.55],
        ]
    )
    p = ModelParams(1, 1, omega_a, (omega,), (gamma,))
    h = build_hamiltonian(p, build_basis(1, (1,))).toarray()
    assert np.max(np.abs(h - expected)) < 1e-15


def test_parity_values_and_commutation():
    basis = build_basis(4, (3, 2))
    signs = parity_signs(basis)
    assert signs[basis.index(0, (0, 0))] == 1.0   # lambda = 0
    assert signs[basis.index(1, (0, 0))] == -1.0  # single excitation
    assert signs[basis.index(1, (1, 0))] == 1.0
    p = ModelParams(18, 8, 2.0, (2.0, 1.1), (0.6, 0.9))
    basis = build_basis(8, (4, 5))
    h = build_hamiltonian(p, basis).tocoo()
    signs = parity_signs(basis)
    cross = signs[h.row] != signs[h.col]
    assert not np.any(np.abs(h.data[cross]) > 0.0)


def test_parity_block_structure():
    # reordering by parity makes H block diagonal with exactly two blocks
    p = ModelParams(6, 4, 1.3, (1.0, 2.0), (0.7, 0.4))
    basis = build_basis(4, (3, 3))
    h = build_hamiltonian(p, basis).toarray()
    signs = parity_signs(basis)
    order = np.argsort(-signs, kind="stable")
    n_even = int(np.sum(signs > 0))
    reordered = h[np.ix_(order, order)]
    assert np.max(np.abs(reordered[:n_even, n_even:])) == 0.0
    assert np.max(np.abs(reordered[n_even:, :n_even])) == 0.0
    assert build_parity(basis).diagonal() == pytest.approx(signs)


def test_jz_diagonal_matches_operator():
    basis = build_basis(5, (2, 3))
    assert np.allclose(op_jz(basis).diagonal(), jz_diagonal(basis), atol=0)


def test_default_cutoffs_formula():
    p = ModelParams(18, 18, 2.0, (2.0, 2.0), (0.5, 3.0))
    # ceil(8 j gamma^2 / (N Omega^2)) + 20 = ceil(0.25) + 20, ceil(9) + 20
    assert default_cutoffs(p) == (21, 29)


def test_assemble_matches_direct_build():
    p = ModelParams(12, 6, 1.7, (2.0, 1.2), (0.4, 1.1))
    basis = build_basis(6, (5, 6))
    terms = hilbert.hamiltonian_terms(basis, p.n_atoms)
    h1 = hilbert.assemble_hamiltonian(p, terms)
    h2 = build_hamiltonian(p, basis)
    assert abs(h1 - h2).max() == 0.0
