"""Dense complex Hermitian matrix core for bipartite density matrices.

Matrices are numpy complex128 arrays in row-major order throughout; a
"Hermitian matrix" is any square array M with max|M - M^dagger| below the
hermiticity tolerance.  All entropies and logarithms are base 2 (ebits).

Every operation here is a pure function of its inputs; DensityMatrix and
PureState instances are frozen and their arrays are marked read-only, so
values are safe to share across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT_VALIDATION, ValidationTolerances


def _readonly(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=complex)
    out.setflags(write=False)
    return out


def herm_defect(mat: np.ndarray) -> float:
    """Max elementwise |M - M^dagger|."""
    return float(np.abs(mat - mat.conj().T).max())


def require_hermitian(mat: np.ndarray, tol: float = DEFAULT_VALIDATION.hermiticity) -> None:
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {mat.shape}")
    defect = herm_defect(mat)
    if defect > tol:
        raise ValueError(f"matrix is not Hermitian: max|M - M^dagger| = {defect:.3e} > {tol:.1e}")


@dataclass(frozen=True)
class Spectrum:
    """Spectral decomposition of a Hermitian matrix.

    eigenvalues are real and sorted descending; eigenvectors holds the
    matching orthonormal eigenvectors as columns.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def hermitian_eig(mat: np.ndarray, tol: float = DEFAULT_VALIDATION.hermiticity) -> Spectrum:
    """Eigendecomposition of a Hermitian matrix, eigenvalues descending.

    Raises ValueError for non-square or non-Hermitian input.
    """
    require_hermitian(mat, tol)
    vals, vecs = np.linalg.eigh(mat)
    order = np.argsort(vals)[::-1]
    return Spectrum(eigenvalues=_readonly(vals[order]).real, eigenvectors=_readonly(vecs[:, order]))


def validate_density(dim_a: int, dim_b: int, mat: np.ndarray,
                     tol: ValidationTolerances = DEFAULT_VALIDATION) -> None:
    """Reject matrices that are not valid (dim_a x dim_b) density matrices."""
    if dim_a < 1 or dim_b < 1:
        raise ValueError(f"local dimensions must be positive, got ({dim_a}, {dim_b})")
    dim = dim_a * dim_b
    if mat.shape != (dim, dim):
        raise ValueError(f"matrix shape {mat.shape} does not match dims {dim_a} x {dim_b}")
    require_hermitian(mat, tol.hermiticity)
    tr = complex(np.trace(mat))
    if abs(tr - 1.0) > tol.trace:
        raise ValueError(f"trace {tr:.12g} is not 1 within {tol.trace:.1e}")
    min_eig = float(np.linalg.eigvalsh(mat)[0])
    if min_eig < -tol.positivity:
        raise ValueError(f"minimum eigenvalue {min_eig:.3e} below -{tol.positivity:.1e}")


@dataclass(frozen=True)
class DensityMatrix:
    """Bipartite mixed state with explicit local dimensions.

    The matrix acts on the dim_a * dim_b product space with Alice's index
    major (row index = a * dim_b + b).  Construction validates Hermiticity,
    unit trace, and positivity against the default tolerances.
    """

    dim_a: int
    dim_b: int
    mat: np.ndarray = field(repr=False)

    def __post_init__(self):
        validate_density(self.dim_a, self.dim_b, np.asarray(self.mat, dtype=complex))
        object.__setattr__(self, "mat", _readonly(self.mat))

    @property
    def dim(self) -> int:
        return self.dim_a * self.dim_b

    def purity(self) -> float:
        return float(np.real(np.trace(self.mat @ self.mat)))


@dataclass(frozen=True)
class PureState:
    """Normalized amplitude vector on a dim_a x dim_b product space."""

    dim_a: int
    dim_b: int
    amps: np.ndarray = field(repr=False)

    def __post_init__(self):
        amps = np.asarray(self.amps, dtype=complex).ravel()
        if amps.size != self.dim_a * self.dim_b:
            raise ValueError(f"amplitude count {amps.size} does not match dims "
                             f"{self.dim_a} x {self.dim_b}")
        norm = float(np.linalg.norm(amps))
        if abs(norm - 1.0) > DEFAULT_VALIDATION.norm:
            raise ValueError(f"norm {norm:.12g} is not 1 within {DEFAULT_VALIDATION.norm:.1e}")
        object.__setattr__(self, "amps", _readonly(amps))

    def projector(self) -> DensityMatrix:
        return DensityMatrix(self.dim_a, self.dim_b, np.outer(self.amps, self.amps.conj()))

    def schmidt_values(self) -> np.ndarray:
        """Squared Schmidt coefficients (eigenvalues of either reduced state)."""
        m = self.amps.reshape(self.dim_a, self.dim_b)
        s = np.linalg.svd(m, compute_uv=False)
        return s * s


def psi_plus_amps(d: int) -> np.ndarray:
    """Amplitudes of the maximally entangled vector sum_i |ii> / sqrt(d)."""
    amps = np.zeros(d * d, dtype=complex)
    amps[:: d + 1] = 1.0 / math.sqrt(d)
    return amps


# ---------------------------------------------------------------------------
# tensor products and partial operations
# ---------------------------------------------------------------------------

def regroup_product(mat: np.ndarray, da1: int, db1: int, da2: int, db2: int) -> np.ndarray:
    """Permute kron(x_on_A1B1, y_on_A2B2) from (A1 B1 A2 B2) to (A1 A2 B1 B2).

    Single permutation routine shared by every multi-copy code path.
    """
    t = mat.reshape(da1, db1, da2, db2, da1, db1, da2, db2)
    t = t.transpose(0, 2, 1, 3, 4, 6, 5, 7)
    dim = da1 * db1 * da2 * db2
    return np.ascontiguousarray(t.reshape(dim, dim))


def tensor_product(a: DensityMatrix, b: DensityMatrix) -> DensityMatrix:
    """a tensor b with copies grouped as (A1 A2 | B1 B2)."""
    raw = np.kron(a.mat, b.mat)
    grouped = regroup_product(raw, a.dim_a, a.dim_b, b.dim_a, b.dim_b)
    return DensityMatrix(a.dim_a * b.dim_a, a.dim_b * b.dim_b, grouped)


def pure_tensor(a: PureState, b: PureState) -> PureState:
    """a tensor b with the same (A1 A2 | B1 B2) regrouping as tensor_product."""
    raw = np.kron(a.amps, b.amps).reshape(a.dim_a, a.dim_b, b.dim_a, b.dim_b)
    amps = raw.transpose(0, 2, 1, 3).ravel()
    return PureState(a.dim_a * b.dim_a, a.dim_b * b.dim_b, amps)


def partial_trace(rho: DensityMatrix, party: str) -> DensityMatrix:
    """Trace out one party; the survivor is returned with dim_b = 1."""
    t = rho.mat.reshape(rho.dim_a, rho.dim_b, rho.dim_a, rho.dim_b)
    if party == "B":
        red = np.einsum("ikjk->ij", t)
        return DensityMatrix(rho.dim_a, 1, red)
    if party == "A":
        red = np.einsum("kikj->ij", t)
        return DensityMatrix(rho.dim_b, 1, red)
    raise ValueError(f"party must be 'A' or 'B', got {party!r}")


def partial_transpose(rho: DensityMatrix) -> np.ndarray:
    """Transpose on party B.  Hermitian and trace 1, but possibly indefinite."""
    t = rho.mat.reshape(rho.dim_a, rho.dim_b, rho.dim_a, rho.dim_b)
    return np.ascontiguousarray(t.transpose(0, 3, 2, 1).reshape(rho.dim, rho.dim))


def min_pt_eigenvalue(rho: DensityMatrix) -> float:
    """Smallest eigenvalue of the partial transpose (PPT iff >= -tol)."""
    return float(np.linalg.eigvalsh(partial_transpose(rho))[0])


def trace_distance(a: DensityMatrix, b: DensityMatrix) -> float:
    """(1/2) ||a - b||_1 via the eigenvalues of the Hermitian difference."""
    vals = np.linalg.eigvalsh(a.mat - b.mat)
    return 0.5 * float(np.abs(vals).sum())


# ---------------------------------------------------------------------------
# entropies and fidelity
# ---------------------------------------------------------------------------

def entropy_of_probs(p: np.ndarray) -> float:
    """Shannon entropy in bits with the 0 log 0 = 0 convention."""
    p = np.asarray(p, dtype=float)
    pos = p[p > 0.0]
    return float(max(0.0, -(pos * np.log2(pos)).sum()))


def vn_entropy(rho: DensityMatrix) -> float:
    """von Neumann entropy in bits; always in [0, log2 dim]."""
    vals = np.linalg.eigvalsh(rho.mat)
    return entropy_of_probs(np.clip(vals, 0.0, None))


def relative_entropy(rho: DensityMatrix, sigma: DensityMatrix,
                     support_eps: float = DEFAULT_VALIDATION.support) -> float:
    """Quantum relative entropy S(rho || sigma) in bits.

    Returns math.inf when rho has weight above support_eps outside the
    support of sigma (sigma eigenvalues at or below support_eps count as
    zero).  Regularizing sigma to avoid the sentinel is the caller's job.
    """
    if (rho.dim_a, rho.dim_b) != (sigma.dim_a, sigma.dim_b):
        raise ValueError(f"dimension mismatch: ({rho.dim_a},{rho.dim_b}) vs "
                         f"({sigma.dim_a},{sigma.dim_b})")
    s_vals, s_vecs = np.linalg.eigh(sigma.mat)
    weights = np.real(np.einsum("ij,jk,ki->i", s_vecs.conj().T, rho.mat, s_vecs))
    weights = np.clip(weights, 0.0, None)
    outside = s_vals <= support_eps
    if weights[outside].sum() > support_eps:
        return math.inf
    cross = -(weights[~outside] * np.log2(s_vals[~outside])).sum()
    return float(cross - vn_entropy(rho))


def entangled_fidelity(rho: DensityMatrix) -> float:
    """Overlap <psi_plus(d)| rho |psi_plus(d)> for a square d x d bipartition."""
    if rho.dim_a != rho.dim_b:
        raise ValueError(f"entangled fidelity needs dim_a == dim_b, got "
                         f"({rho.dim_a}, {rho.dim_b})")
    psi = psi_plus_amps(rho.dim_a)
    val = complex(psi.conj() @ rho.mat @ psi)
    if abs(val.imag) > 1e-12:
        raise ValueError(f"fidelity came out non-real: {val!r}")
    return float(val.real)
