import numpy as np
import pytest
from scipy import sparse

from dicke_qpt import (
    DimensionOverflow,
    ModelParams,
    NoConvergence,
    build_basis,
    build_hamiltonian,
    converge_cutoff,
    dense_oracle,
    ground_state,
)
from dicke_qpt import spectrum
from dicke_qpt.hilbert import jz_diagonal, number_diagonal, parity_signs
from dicke_qpt.variational import cs_observables


def test_decoupled_ground_state():
    p = ModelParams(18, 14, 2.0, (2.0, 2.0), (0.0, 0.0))
    basis = build_basis(14, (4, 4))
    h = build_hamiltonian(p, basis)
    energy, vector = ground_state(h)
    assert energy == pytest.approx(-14.0, abs=1e-12)
    expected = np.zeros(basis.dim)
    expected[0] = 1.0  # (m = -j, all vacua)
    assert np.linalg.norm(vector - expected) < 1e-10


def test_iterative_matches_dense_oracle_small():
    p = ModelParams(1, 1, 0.9, (1.3,), (0.7,))
    basis = build_basis(1, (4,))
    h = build_hamiltonian(p, basis)
    w = dense_oracle(h)
    energy, vector = ground_state(h)
    assert energy == pytest.approx(w[0], abs=1e-10)
    residual = np.linalg.norm(h @ vector - energy * vector)
    assert residual < 1e-9
    assert np.linalg.norm(vector) == pytest.approx(1.0, abs=1e-12)


def test_dense_oracle_closed_form_2x2():
    a, b, c = 0.7, -0.45, -1.2
    h = sparse.csr_matrix(np.array([[a, b], [b, c]]))
    w = dense_oracle(h)
    mean, radius = 0.5 * (a + c), np.hypot(0.5 * (a - c), b)
    assert w == pytest.approx([mean - radius, mean + radius], abs=1e-14)


def test_dense_oracle_diagonal_spectrum():
    # gamma = 0: spectrum is {omega_a m + sum Omega_i nu_i}
    p = ModelParams(4, 2, 1.1, (0.9, 1.7), (0.0, 0.0))
    basis = build_basis(2, (2, 1))
    h = build_hamiltonian(p, basis)
    w = dense_oracle(h)
    expected = sorted(
        1.1 * basis.m_value(m) + 0.9 * n1 + 1.7 * n2
        for m in range(basis.spin_dim)
        for n1 in range(3)
        for n2 in range(2)
    )
    assert w == pytest.approx(expected, abs=1e-13)


def test_dense_oracle_dim_limit():
    p = ModelParams(18, 10, 2.0, (2.0,), (0.5,))
    basis = build_basis(10, (200,))
    h = build_hamiltonian(p, basis)
    with pytest.raises(DimensionOverflow):
        dense_oracle(h, limit=2000)


def test_iterative_vs_dense_on_random_sparse():
    rng = np.random.default_rng(5)
    for _ in range(5):
        n = 60
        dense = rng.standard_normal((n, n))
        dense = 0.5 * (dense + dense.T)
        dense[np.abs(dense) < 1.0] = 0.0
        h = sparse.csr_matrix(dense)
        w = np.linalg.eigvalsh(dense)
        energy, vector = ground_state(h)
        assert energy == pytest.approx(w[0], abs=1e-10)


def test_ground_state_upper_bounded_by_cs():
    # E0 <= E_CS = -(j omega_a / 2)(1/delta + delta) ~ -40.37
    p = ModelParams(18, 18, 2.0, (2.0, 2.0), (0.5, 2.0))
    e_cs = cs_observables(p).energy
    assert e_cs == pytest.approx(-40.36764705882353, abs=1e-12)
    basis, record = converge_cutoff(p, tol_e=1e-8)
    assert record.energy <= e_cs
    assert abs(record.parity - 1.0) < 1e-8


def test_converge_cutoff_decoupled_stops_immediately():
    p = ModelParams(18, 12, 2.0, (2.0, 2.0), (0.0, 0.0))
    basis, record = converge_cutoff(p, tol_e=1e-8)
    assert record.energy == pytest.approx(-12.0, abs=1e-10)
    assert basis.nmax == (30, 30)  # initial 20 plus one confirmation step


def test_converge_cutoff_tracks_superradiant_occupation():
    # deep superradiant: the converged cutoff must exceed the CS occupation
    p = ModelParams(18, 18, 2.0, (2.0, 2.0), (0.5, 2.0))
    basis, record = converge_cutoff(p, tol_e=1e-8)
    nu_cs = cs_observables(p).nu
    assert basis.nmax[1] > nu_cs[1]
    prob = record.vector**2
    nu_q = number_diagonal(basis, 1) @ prob
    assert basis.nmax[1] > nu_q


def test_converge_cutoff_self_consistent():
    p = ModelParams(18, 10, 2.0, (2.0, 2.0), (0.5, 1.2))
    basis, record = converge_cutoff(p, tol_e=1e-8)
    larger = build_basis(10, tuple(n + 10 for n in basis.nmax))
    h = build_hamiltonian(p, larger)
    energy, _ = ground_state(h)
    assert abs(energy - record.energy) < 1e-8


def test_converge_cutoff_respects_dim_limit():
    p = ModelParams(18, 18, 2.0, (2.0, 2.0), (0.5, 3.0))
    with pytest.raises(NoConvergence):
        converge_cutoff(p, tol_e=1e-12, dim_limit=40_000)


def test_energy_monotone_in_cutoff():
    # enlarging the variational space can only lower the ground energy
    p = ModelParams(18, 10, 2.0, (2.0, 2.0), (0.5, 1.3))
    energies = []
    for n in (8, 14, 20, 26):
        h = build_hamiltonian(p, build_basis(10, (n, n)))
        energies.append(ground_state(h)[0])
    diffs = np.diff(energies)
    assert np.all(diffs <= 1e-9)


def test_even_block_solve_matches_full():
    p = ModelParams(18, 10, 2.0, (2.0, 2.0), (0.5, 1.2))
    basis = build_basis(10, (14, 18))
    h = build_hamiltonian(p, basis)
    signs = parity_signs(basis)
    e_full, v_full = ground_state(h)
    e_even, v_even = spectrum.ground_state_even(h, signs)
    assert e_even == pytest.approx(e_full, abs=1e-9)
    assert abs(abs(np.dot(v_full, v_even)) - 1.0) < 1e-8
    assert signs @ (v_even * v_even) == pytest.approx(1.0, abs=1e-14)


def test_solve_ground_record_invariants():
    p = ModelParams(18, 8, 2.0, (2.0, 2.0), (0.5, 1.4))
    basis = build_basis(8, (12, 16))
    record = spectrum.solve_ground(p, basis)
    assert np.linalg.norm(record.vector) == pytest.approx(1.0, abs=1e-12)
    assert record.residual < 1e-7
    assert abs(record.parity - 1.0) < 1e-8
    assert record.method == "Quantum"
    # expectation of Jz in a basis eigenvector of the decoupled limit
    p0 = ModelParams(18, 8, 2.0, (2.0, 2.0), (0.0, 0.0))
    rec0 = spectrum.solve_ground(p0, basis)
    assert jz_diagonal(basis) @ (rec0.vector**2) == pytest.approx(-4.0, abs=1e-12)
