import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dimerlab.fock import FockBasis, b_parity_transform, build_basis, build_hamiltonian
from dimerlab.model import ModelParams


def dense_oracle_4x4(J, W):
    """Hand-built N_a=N_b=1, U=0 matrix in the (n_L, m_L) row-major order."""
    return np.array(
        [
            [W, -J, -J, 0],
            [-J, 0, 0, -J],
            [-J, 0, 0, -J],
            [0, -J, -J, W],
        ],
        dtype=float,
    )


def single_species_spectrum(N, J, U):
    """Independent one-species dimer diagonalization (oracle for W = 0)."""
    n_L = np.arange(N + 1)
    n_R = N - n_L
    h = np.diag(0.5 * U * (n_L * (n_L - 1) + n_R * (n_R - 1)).astype(float))
    amp = -J * np.sqrt(n_L[1:] * (n_R[1:] + 1.0))
    h[np.arange(1, N + 1), np.arange(N)] = amp
    h[np.arange(N), np.arange(1, N + 1)] = amp
    return np.linalg.eigvalsh(h)


def test_basis_dimensions():
    assert build_basis(1, 1).dim == 4
    assert build_basis(30, 30).dim == 961
    assert build_basis(100, 100).dim == 10201
    with pytest.raises(ValueError):
        build_basis(2000, 2000)  # above the dimension cap


def test_basis_roundtrip_exhaustive():
    basis = build_basis(7, 4)
    seen = set()
    for n_L in range(8):
        for m_L in range(5):
            idx = basis.index(n_L, m_L)
            assert basis.occupations(idx) == (n_L, m_L)
            seen.add(idx)
    assert seen == set(range(basis.dim))
    with pytest.raises(ValueError):
        basis.index(8, 0)
    with pytest.raises(ValueError):
        basis.occupations(basis.dim)


def test_hamiltonian_matches_4x4_oracle():
    p = ModelParams(N_a=1, N_b=1, J_a=1.0, W=0.1)
    H = build_hamiltonian(p, build_basis(1, 1))
    np.testing.assert_allclose(H.to_dense(), dense_oracle_4x4(1.0, 0.1), atol=0)
    # analytic eigenvalues {(W - s)/2, 0, W, (W + s)/2}, s = sqrt(W^2 + 16 J^2)
    s = math.sqrt(0.1**2 + 16.0)
    expected = np.sort([0.0, 0.1, (0.1 - s) / 2, (0.1 + s) / 2])
    np.testing.assert_allclose(np.linalg.eigvalsh(H.to_dense()), expected, atol=1e-14)


def test_single_particle_limit():
    # N_a=1, N_b=0 is not allowed by ModelParams (N_b >= 1), but the two-mode
    # block structure is: N_b=1 with J_b -> the species-a sector acts as +-J_a
    p = ModelParams(N_a=1, N_b=1, J_a=0.7, J_b=0.2, U_a=0.0, W=0.0)
    H = build_hamiltonian(p, build_basis(1, 1)).to_dense()
    vals = np.linalg.eigvalsh(H)
    expected = np.sort([s_a * 0.7 + s_b * 0.2 for s_a in (-1, 1) for s_b in (-1, 1)])
    np.testing.assert_allclose(vals, expected, atol=1e-14)


def test_decoupling_at_zero_coupling():
    # W=0: spectrum is all sums E_a + E_b of the species blocks
    p = ModelParams(N_a=5, N_b=3, J_a=1.0, J_b=0.6, U_a=0.04, U_b=0.01, W=0.0)
    H = build_hamiltonian(p, build_basis(5, 3)).to_dense()
    ea = single_species_spectrum(5, 1.0, 0.04)
    eb = single_species_spectrum(3, 0.6, 0.01)
    expected = np.sort(np.add.outer(ea, eb).ravel())
    np.testing.assert_allclose(np.sort(np.linalg.eigvalsh(H)), expected, atol=1e-10)


def test_matrix_is_exactly_symmetric_and_trace_matches():
    p = ModelParams(N_a=6, N_b=5, J_a=1.0, U_a=0.02, U_b=0.05, W=-0.08)
    H = build_hamiltonian(p, build_basis(6, 5))
    a = H.to_dense()
    assert np.array_equal(a, a.T)
    # trace equals the explicit diagonal formula summed over the basis
    total = 0.0
    for n_L in range(7):
        for m_L in range(6):
            n_R, m_R = 6 - n_L, 5 - m_L
            total += 0.5 * p.U_a * (n_L * (n_L - 1) + n_R * (n_R - 1))
            total += 0.5 * p.U_b * (m_L * (m_L - 1) + m_R * (m_R - 1))
            total += p.W * (n_L * m_L + n_R * m_R)
    assert H.trace() == pytest.approx(total, rel=1e-14)
    assert np.trace(a) == pytest.approx(total, rel=1e-14)


def test_hopping_elements_spot_checked():
    p = ModelParams(N_a=4, N_b=2, J_a=1.3, J_b=0.4, U_a=0.0, W=0.0)
    basis = build_basis(4, 2)
    a = build_hamiltonian(p, basis).to_dense()
    # a-species: <n_L-1, m| H |n_L, m> = -J_a sqrt(n_L (n_R + 1)), n_R = 4 - n_L
    assert a[basis.index(2, 1), basis.index(3, 1)] == pytest.approx(-1.3 * math.sqrt(3 * 2))
    # b-species: <n, m_L-1| H |n, m_L> = -J_b sqrt(m_L (m_R + 1)), m_R = 2 - m_L
    assert a[basis.index(0, 1), basis.index(0, 2)] == pytest.approx(-0.4 * math.sqrt(2 * 1))
    # nothing connects states differing in both species
    assert a[basis.index(1, 1), basis.index(2, 2)] == 0.0


def test_sparse_storage_above_threshold():
    p = ModelParams(N_a=5, N_b=5, J_a=1.0, U_a=0.01, W=0.02)
    basis = build_basis(5, 5)
    dense = build_hamiltonian(p, basis, dense_max=4096)
    sparse = build_hamiltonian(p, basis, dense_max=10)
    assert dense.is_dense and not sparse.is_dense
    np.testing.assert_allclose(sparse.to_dense(), dense.to_dense(), atol=0)
    v = np.linspace(-1, 1, basis.dim)
    np.testing.assert_allclose(sparse.matvec(v), dense.to_dense() @ v, atol=1e-12)


def test_coo_dump_roundtrip():
    p = ModelParams(N_a=2, N_b=2, J_a=1.0, U_a=0.1, W=0.3)
    H = build_hamiltonian(p, build_basis(2, 2))
    buf = io.StringIO()
    H.dump_coo(buf)
    rebuilt = np.zeros((9, 9))
    for line in buf.getvalue().splitlines():
        i, j, v = line.split()
        i, j, v = int(i), int(j), float(v)
        assert i <= j
        rebuilt[i, j] = v
        rebuilt[j, i] = v
    np.testing.assert_allclose(rebuilt, H.to_dense(), rtol=1e-14)


def test_b_parity_is_involutive_and_moves_basis_vectors():
    basis = build_basis(3, 4)
    rng = np.random.default_rng(7)
    v = rng.standard_normal(basis.dim)
    np.testing.assert_array_equal(b_parity_transform(basis, b_parity_transform(basis, v)), v)
    uniform = np.ones(basis.dim)
    np.testing.assert_array_equal(b_parity_transform(basis, uniform), uniform)
    e = np.zeros(basis.dim)
    e[basis.index(0, 4)] = 1.0
    moved = b_parity_transform(basis, e)
    assert moved[basis.index(0, 0)] == 1.0 and moved.sum() == 1.0
    with pytest.raises(ValueError):
        b_parity_transform(basis, np.ones(3))


def test_w_reflection_identity():
    # spectrum(H(-W)) = spectrum(H(W)) - W N_a N_b, via conjugation by b-parity
    p_plus = ModelParams(N_a=8, N_b=8, J_a=1.0, U_a=0.02, W=0.11)
    p_minus = p_plus.replace_W(-0.11)
    basis = build_basis(8, 8)
    ev_plus = np.linalg.eigvalsh(build_hamiltonian(p_plus, basis).to_dense())
    ev_minus = np.linalg.eigvalsh(build_hamiltonian(p_minus, basis).to_dense())
    np.testing.assert_allclose(ev_minus, ev_plus - 0.11 * 64, atol=1e-10)


def test_conjugation_by_parity_maps_w_to_minus_w():
    p = ModelParams(N_a=4, N_b=3, J_a=1.0, J_b=0.7, U_a=0.05, U_b=0.02, W=0.09)
    basis = build_basis(4, 3)
    H_plus = build_hamiltonian(p, basis).to_dense()
    H_minus = build_hamiltonian(p.replace_W(-0.09), basis).to_dense()
    transformed = b_parity_transform(basis, b_parity_transform(basis, H_plus).T).T
    np.testing.assert_allclose(transformed, H_minus + 0.09 * 12 * np.eye(basis.dim), atol=1e-12)


@settings(max_examples=25, deadline=None)
@given(
    N_a=st.integers(min_value=1, max_value=7),
    N_b=st.integers(min_value=1, max_value=7),
    seed=st.integers(min_value=0, max_value=2**31),
)
def test_b_parity_involution_property(N_a, N_b, seed):
    basis = build_basis(N_a, N_b)
    v = np.random.default_rng(seed).standard_normal(basis.dim)
    np.testing.assert_array_equal(b_parity_transform(basis, b_parity_transform(basis, v)), v)
