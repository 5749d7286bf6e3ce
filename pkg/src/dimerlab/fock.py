"""Fock basis and exact Hamiltonian matrix of the two-species dimer.

Basis and index conventions
---------------------------
States are labeled by the left-well occupations only, |n_L, m_L>, with
n_R = N_a - n_L and m_R = N_b - m_L implied by number conservation.
The linear index is row-major in (n_L, m_L):

    index(n_L, m_L) = n_L * (N_b + 1) + m_L,   dim = (N_a+1)(N_b+1)

so reshaping a coefficient vector to (N_a+1, N_b+1) gives values[n_L, m_L].

Matrix elements (basis above, energies in units of J_a):
    diagonal   (U_a/2)[n_L(n_L-1) + n_R(n_R-1)]
             + (U_b/2)[m_L(m_L-1) + m_R(m_R-1)]
             + W (n_L m_L + n_R m_R)
    hopping a  -J_a sqrt(n_L (n_R + 1))   between (n_L, m_L) and (n_L-1, m_L)
    hopping b  -J_b sqrt(m_L (m_R + 1))   between (n_L, m_L) and (n_L, m_L-1)

Nothing else: the Hamiltonian conserves both species numbers, so it never
leaves the (N_a, N_b) sector.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TextIO

import numpy as np
import scipy.sparse as sp

from .model import ModelParams

__all__ = [
    "DENSE_DIM_MAX",
    "MAX_BASIS_DIM",
    "FockBasis",
    "SymmetricMatrix",
    "b_parity_transform",
    "build_basis",
    "build_hamiltonian",
]

# dense storage below this dimension, coordinate-sparse above
DENSE_DIM_MAX = 4096
# guard against accidentally huge bases
MAX_BASIS_DIM = 10**6


@dataclass(frozen=True)
class FockBasis:
    """Occupation-number basis at fixed (N_a, N_b)."""

    N_a: int
    N_b: int

    @property
    def dim(self) -> int:
        return (self.N_a + 1) * (self.N_b + 1)

    def index(self, n_L: int, m_L: int) -> int:
        if not (0 <= n_L <= self.N_a and 0 <= m_L <= self.N_b):
            raise ValueError(f"occupations ({n_L}, {m_L}) outside basis")
        return n_L * (self.N_b + 1) + m_L

    def occupations(self, index: int) -> tuple[int, int]:
        if not (0 <= index < self.dim):
            raise ValueError(f"index {index} outside basis of dim {self.dim}")
        return divmod(index, self.N_b + 1)


def build_basis(N_a: int, N_b: int, max_dim: int = MAX_BASIS_DIM) -> FockBasis:
    if N_a < 0 or N_b < 0:
        raise ValueError("boson numbers must be non-negative")
    dim = (N_a + 1) * (N_b + 1)
    if dim > max_dim:
        raise ValueError(f"basis dimension {dim} exceeds cap {max_dim}")
    return FockBasis(N_a=int(N_a), N_b=int(N_b))


class SymmetricMatrix:
    """Real symmetric matrix, dense below DENSE_DIM_MAX and COO-sparse above.

    Built from the diagonal plus each off-diagonal element written once
    (upper triangle) and mirrored, so symmetry is exact by construction.
    """

    def __init__(self, dim: int, diag, rows, cols, vals, dense_max: int = DENSE_DIM_MAX):
        diag = np.asarray(diag, dtype=float)
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        vals = np.asarray(vals, dtype=float)
        if diag.shape != (dim,):
            raise ValueError("diagonal length must equal dim")
        if not (rows.shape == cols.shape == vals.shape):
            raise ValueError("rows/cols/vals must have equal length")
        if rows.size and not np.all(rows < cols):
            raise ValueError("off-diagonal entries must be strictly upper triangular")
        if not (np.all(np.isfinite(diag)) and np.all(np.isfinite(vals))):
            raise ValueError("matrix entries must be finite")
        self.dim = int(dim)
        self._diag = diag
        self._rows = rows
        self._cols = cols
        self._vals = vals
        self.is_dense = dim <= dense_max
        if self.is_dense:
            a = np.zeros((dim, dim))
            a[np.arange(dim), np.arange(dim)] = diag
            a[rows, cols] = vals
            a[cols, rows] = vals
            self._dense = a
            self._sparse = None
        else:
            i = np.concatenate([np.arange(dim), rows, cols])
            j = np.concatenate([np.arange(dim), cols, rows])
            v = np.concatenate([diag, vals, vals])
            self._dense = None
            self._sparse = sp.csr_matrix((v, (i, j)), shape=(dim, dim))

    def to_dense(self) -> np.ndarray:
        if self._dense is not None:
            return self._dense
        return self._sparse.toarray()

    def to_sparse(self) -> sp.csr_matrix:
        if self._sparse is not None:
            return self._sparse
        return sp.csr_matrix(self._dense)

    def matvec(self, v: np.ndarray) -> np.ndarray:
        if self._dense is not None:
            return self._dense @ v
        return self._sparse @ v

    def diagonal(self) -> np.ndarray:
        return self._diag.copy()

    def trace(self) -> float:
        return float(self._diag.sum())

    def dump_coo(self, stream: TextIO) -> None:
        """Write "i j value" triples (0-based, upper triangle incl. diagonal)."""
        for i, v in enumerate(self._diag):
            stream.write(f"{i} {i} {v:.15g}\n")
        for i, j, v in zip(self._rows, self._cols, self._vals):
            stream.write(f"{i} {j} {v:.15g}\n")


def build_hamiltonian(p: ModelParams, basis: FockBasis, dense_max: int = DENSE_DIM_MAX) -> SymmetricMatrix:
    """Assemble the dimer Hamiltonian on the given basis (see module docstring)."""
    if (basis.N_a, basis.N_b) != (p.N_a, p.N_b):
        raise ValueError("basis was built for different boson numbers")
    N_a, N_b = basis.N_a, basis.N_b
    dim = basis.dim
    nb1 = N_b + 1

    n_L = np.repeat(np.arange(N_a + 1), nb1)
    m_L = np.tile(np.arange(nb1), N_a + 1)
    n_R = N_a - n_L
    m_R = N_b - m_L
    diag = (
        0.5 * p.U_a * (n_L * (n_L - 1) + n_R * (n_R - 1))
        + 0.5 * p.U_b * (m_L * (m_L - 1) + m_R * (m_R - 1))
        + p.W * (n_L * m_L + n_R * m_R)
    ).astype(float)

    rows, cols, vals = [], [], []
    # species a: (n_L, m_L) <-> (n_L - 1, m_L); store with row < col
    src = n_L >= 1
    lower = (n_L[src] - 1) * nb1 + m_L[src]
    rows.append(lower)
    cols.append(np.arange(dim)[src])
    vals.append(-p.J_a * np.sqrt(n_L[src] * (n_R[src] + 1.0)))
    # species b: (n_L, m_L) <-> (n_L, m_L - 1)
    src = m_L >= 1
    lower = n_L[src] * nb1 + (m_L[src] - 1)
    rows.append(lower)
    cols.append(np.arange(dim)[src])
    vals.append(-p.J_b * np.sqrt(m_L[src] * (m_R[src] + 1.0)))

    return SymmetricMatrix(
        dim,
        diag,
        np.concatenate(rows),
        np.concatenate(cols),
        np.concatenate(vals),
        dense_max=dense_max,
    )


def b_parity_transform(basis: FockBasis, v: np.ndarray) -> np.ndarray:
    """Swap the wells of species b: component at (n_L, m_L) moves to (n_L, N_b - m_L).

    Involutive.  Conjugating the Hamiltonian with this permutation maps
    W -> -W up to the constant shift W*N_a*N_b, which is the origin of the
    reflection symmetry of the spectrum under sign change of W.
    """
    v = np.asarray(v)
    if v.shape[0] != basis.dim:
        raise ValueError(f"vector length {v.shape[0]} does not match basis dim {basis.dim}")
    grid = v.reshape(basis.N_a + 1, basis.N_b + 1, *v.shape[1:])
    return grid[:, ::-1].reshape(v.shape).copy()
