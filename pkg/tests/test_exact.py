import io
import json
import math

import numpy as np
import pytest

from dimerlab import exact
from dimerlab.fock import build_basis, build_hamiltonian
from dimerlab.model import ModelParams


def binomial_ground_grid(N_a, N_b):
    """U = W = 0 ground state: product of two binomial-squared distributions."""
    pa = np.array([math.comb(N_a, k) for k in range(N_a + 1)], dtype=float) / 2.0**N_a
    pb = np.array([math.comb(N_b, k) for k in range(N_b + 1)], dtype=float) / 2.0**N_b
    return np.outer(pa, pb)


def test_lowest_eigenpairs_4x4_oracle():
    p = ModelParams(N_a=1, N_b=1, J_a=1.0, W=0.1)
    H = build_hamiltonian(p, build_basis(1, 1))
    spec = exact.lowest_eigenpairs(H, 4)
    s = math.sqrt(0.1**2 + 16.0)
    np.testing.assert_allclose(
        spec.eigenvalues, np.sort([(0.1 - s) / 2, 0.0, 0.1, (0.1 + s) / 2]), atol=1e-12
    )
    assert spec.count == 4


def test_scalar_matrix_eigenvalues():
    from dimerlab.fock import SymmetricMatrix

    c = 2.75
    H = SymmetricMatrix(5, np.full(5, c), [], [], [])
    spec = exact.lowest_eigenpairs(H, 3)
    np.testing.assert_allclose(spec.eigenvalues, [c, c, c], rtol=1e-15)


def test_dense_and_lanczos_agree():
    p = ModelParams(N_a=12, N_b=12, J_a=1.0, U_a=0.015, W=0.03)
    basis = build_basis(12, 12)
    dense_spec = exact.lowest_eigenpairs(build_hamiltonian(p, basis), 6, method="dense")
    sparse_H = build_hamiltonian(p, basis, dense_max=10)
    lanczos_spec = exact.lowest_eigenpairs(sparse_H, 6, method="lanczos")
    np.testing.assert_allclose(lanczos_spec.eigenvalues, dense_spec.eigenvalues, atol=1e-9)


def test_eigenvector_invariants():
    p = ModelParams(N_a=10, N_b=9, J_a=1.0, U_a=0.02, W=-0.05)
    H = build_hamiltonian(p, build_basis(10, 9))
    spec = exact.lowest_eigenpairs(H, 8)
    v = spec.eigenvectors
    gram = v.T @ v
    assert np.max(np.abs(gram - np.eye(8))) < 1e-8
    # residual invariant
    res = H.to_dense() @ v - v * spec.eigenvalues
    assert np.max(np.linalg.norm(res, axis=0)) <= 1e-8 * max(1.0, np.max(np.abs(spec.eigenvalues)))
    # sign convention: largest-magnitude component positive
    for j in range(8):
        col = v[:, j]
        assert col[np.argmax(np.abs(col))] > 0.0


def test_variational_bound():
    p = ModelParams(N_a=9, N_b=7, J_a=1.0, U_a=0.03, W=0.07)
    H = build_hamiltonian(p, build_basis(9, 7))
    spec = exact.lowest_eigenpairs(H, 1)
    a = H.to_dense()
    rng = np.random.default_rng(42)
    for _ in range(6):
        t = rng.standard_normal(H.dim)
        rayleigh = t @ a @ t / (t @ t)
        assert spec.ground_energy <= rayleigh + 1e-12


def test_relative_levels():
    p = ModelParams(N_a=1, N_b=1, J_a=1.0, W=0.1)
    H = build_hamiltonian(p, build_basis(1, 1))
    spec = exact.lowest_eigenpairs(H, 4)
    rel = exact.relative_levels(spec)
    assert rel[0] == 0.0
    s = math.sqrt(0.1**2 + 16.0)
    lo = (0.1 - s) / 2
    np.testing.assert_allclose(rel, [0.0, -lo, 0.1 - lo, (0.1 + s) / 2 - lo], atol=1e-12)
    assert np.all(np.diff(rel) >= -1e-15)


def test_w_reflection_of_relative_levels():
    p = ModelParams(N_a=10, N_b=10, J_a=1.0, U_a=0.02)
    basis = build_basis(10, 10)
    rel = {}
    for W in (0.06, -0.06):
        spec = exact.lowest_eigenpairs(build_hamiltonian(p.replace_W(W), basis), 9)
        rel[W] = exact.relative_levels(spec)
    np.testing.assert_allclose(rel[0.06], rel[-0.06], atol=1e-9)


def test_amplitude_grid_binomial_oracle():
    # decoupled dimers at U = W = 0: analytic product-of-binomials ground state
    p = ModelParams(N_a=14, N_b=9, J_a=1.0, J_b=0.5, U_a=0.0, W=0.0)
    basis = build_basis(14, 9)
    spec = exact.lowest_eigenpairs(build_hamiltonian(p, basis), 1)
    grid = exact.amplitude_grid(spec, 0, basis)
    np.testing.assert_allclose(grid.values, binomial_ground_grid(14, 9), atol=1e-10)
    assert grid.values.sum() == pytest.approx(1.0, abs=1e-12)


def test_amplitude_grid_errors():
    p = ModelParams(N_a=2, N_b=2, J_a=1.0)
    basis = build_basis(2, 2)
    spec = exact.lowest_eigenpairs(build_hamiltonian(p, basis), 2)
    with pytest.raises(IndexError):
        exact.amplitude_grid(spec, 5, basis)
    bare = exact.Spectrum(eigenvalues=spec.eigenvalues, eigenvectors=None)
    with pytest.raises(ValueError):
        exact.amplitude_grid(bare, 0, basis)


def test_degenerate_clusters_and_cluster_grid():
    vals = np.array([0.0, 1.0, 1.0 + 1e-12, 2.0])
    assert exact.degenerate_clusters(vals) == [[0], [1, 2], [3]]
    # strong-coupling ground doublet: cluster grid is mixture-independent
    p = ModelParams(N_a=12, N_b=12, J_a=1.0, U_a=0.01, W=1.0)
    basis = build_basis(12, 12)
    spec = exact.lowest_eigenpairs(build_hamiltonian(p, basis), 3)
    clusters = exact.degenerate_clusters(spec.eigenvalues)
    assert clusters[0] == [0, 1]
    grid = exact.cluster_grid(spec, clusters[0], basis)
    assert grid.values.sum() == pytest.approx(1.0, abs=1e-12)
    # two symmetric corner peaks
    np.testing.assert_allclose(grid.values, grid.values[::-1, ::-1].copy(), atol=1e-8)


def test_grid_determinism_under_eigenvector_sign():
    p = ModelParams(N_a=6, N_b=6, J_a=1.0, U_a=0.02, W=0.03)
    basis = build_basis(6, 6)
    H = build_hamiltonian(p, basis)
    g1 = exact.amplitude_grid(exact.lowest_eigenpairs(H, 2), 1, basis)
    g2 = exact.amplitude_grid(exact.lowest_eigenpairs(H, 2), 1, basis)
    np.testing.assert_array_equal(g1.values, g2.values)


def test_spectrum_csv_and_grid_csv(tmp_path):
    p = ModelParams(N_a=2, N_b=2, J_a=1.0, W=0.1)
    basis = build_basis(2, 2)
    spec = exact.lowest_eigenpairs(build_hamiltonian(p, basis), 3)
    buf = io.StringIO()
    exact.spectrum_to_csv(spec, buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "index,energy,relative"
    assert len(lines) == 4
    first = lines[1].split(",")
    assert int(first[0]) == 0 and float(first[2]) == 0.0

    grid = exact.amplitude_grid(spec, 0, basis)
    path = tmp_path / "grid.csv"
    exact.grid_to_csv(grid, str(path), sidecar={"W": 0.1})
    rows = [[float(v) for v in line.split(",")] for line in path.read_text().splitlines()]
    np.testing.assert_allclose(np.array(rows), grid.values, rtol=1e-14)
    meta = json.loads((tmp_path / "grid.json").read_text())
    assert meta["W"] == 0.1


def test_lanczos_failure_is_explicit():
    from dimerlab.fock import SymmetricMatrix

    rng = np.random.default_rng(3)
    dim = 400
    rows, cols = np.triu_indices(dim, k=1)
    vals = rng.standard_normal(rows.size)
    H = SymmetricMatrix(dim, rng.standard_normal(dim), rows, cols, vals, dense_max=10)
    with pytest.raises(exact.EigensolverError, match="did not converge"):
        exact.lowest_eigenpairs(H, 5, method="lanczos", maxiter=1)
