"""Constructors and seeded samplers for the state families under test."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import rng as rnd
from .qmat import DensityMatrix, PureState, psi_plus_amps


@dataclass(frozen=True)
class IsotropicParams:
    """Fidelity / mixing-weight parametrization of an isotropic state.

    F is the overlap with the maximally entangled projector; p is the
    derived weight in the projector + white-noise mixture, tied to F by
    F = p + (1 - p) / d^2.
    """

    fidelity: float
    d: int
    p: float

    @classmethod
    def from_fidelity(cls, fidelity: float, d: int) -> "IsotropicParams":
        if d < 2:
            raise ValueError(f"local dimension must be >= 2, got {d}")
        if not 0.0 <= fidelity <= 1.0:
            raise ValueError(f"fidelity must lie in [0, 1], got {fidelity}")
        p = (fidelity * d * d - 1.0) / (d * d - 1.0)
        return cls(fidelity=float(fidelity), d=int(d), p=p)

    def __post_init__(self):
        implied = self.p + (1.0 - self.p) / (self.d * self.d)
        if abs(implied - self.fidelity) > 1e-12:
            raise ValueError(f"inconsistent params: p={self.p} implies F={implied}, "
                             f"got F={self.fidelity}")
        lo = -1.0 / (self.d * self.d - 1.0)
        if not lo - 1e-12 <= self.p <= 1.0 + 1e-12:
            raise ValueError(f"mixing weight p={self.p} outside [{lo}, 1]")


@dataclass(frozen=True)
class BellDiagonalParams:
    """Four Bell-basis probabilities, entangled-fidelity component first."""

    probs: tuple[float, float, float, float]

    def __post_init__(self):
        if len(self.probs) != 4 or min(self.probs) < 0.0:
            raise ValueError(f"need 4 non-negative probabilities, got {self.probs!r}")
        if abs(sum(self.probs) - 1.0) > 1e-12:
            raise ValueError(f"probabilities sum to {sum(self.probs)!r}, not 1")
        object.__setattr__(self, "probs", tuple(float(p) for p in self.probs))


def maximally_entangled(d: int) -> PureState:
    """sum_i |ii> / sqrt(d)."""
    if d < 2:
        raise ValueError(f"local dimension must be >= 2, got {d}")
    return PureState(d, d, psi_plus_amps(d))


def isotropic(fidelity: float, d: int) -> DensityMatrix:
    """Mixture of the maximally entangled projector and white noise with the
    given entangled fidelity.  Eigenvalues are F (once) and (1-F)/(d^2-1)."""
    params = IsotropicParams.from_fidelity(fidelity, d)
    psi = psi_plus_amps(d)
    proj = np.outer(psi, psi.conj())
    dim = d * d
    mat = params.p * proj + (1.0 - params.p) * np.eye(dim) / dim
    return DensityMatrix(d, d, mat)


# Bell vector ordering convention: index 0 is the (|00>+|11>)/sqrt(2) vector
# whose population is the entangled fidelity; 1, 2 are the (|01>+-|10>)
# pair; 3 is (|00>-|11>)/sqrt(2).
_S = 1.0 / math.sqrt(2.0)
BELL_VECTORS = np.array([
    [_S, 0.0, 0.0, _S],
    [0.0, _S, _S, 0.0],
    [0.0, _S, -_S, 0.0],
    [_S, 0.0, 0.0, -_S],
], dtype=complex).T  # columns are the Bell vectors


def bell_diagonal(params: BellDiagonalParams) -> DensityMatrix:
    mat = (BELL_VECTORS * params.probs) @ BELL_VECTORS.conj().T
    return DensityMatrix(2, 2, mat)


def bell_populations(rho: DensityMatrix) -> np.ndarray:
    """Diagonal of a 2x2-bipartite state in the Bell basis."""
    if (rho.dim_a, rho.dim_b) != (2, 2):
        raise ValueError("Bell populations are defined on 2 x 2 states only")
    return np.real(np.einsum("ij,jk,ki->i", BELL_VECTORS.conj().T, rho.mat, BELL_VECTORS))


def random_pure(dim_a: int, dim_b: int, seed: int) -> PureState:
    """Haar-distributed direction: normalized complex Gaussian vector."""
    if dim_a < 1 or dim_b < 1:
        raise ValueError(f"dims must be >= 1, got ({dim_a}, {dim_b})")
    g = rnd.counter_rng(seed)
    z = rnd.complex_normal(g, dim_a * dim_b)
    return PureState(dim_a, dim_b, z / np.linalg.norm(z))


def random_density(dim_a: int, dim_b: int, rank: int, seed: int) -> DensityMatrix:
    """G G^dagger / tr(G G^dagger) for a (dim_a*dim_b) x rank complex Gaussian G."""
    dim = dim_a * dim_b
    if not 1 <= rank <= dim:
        raise ValueError(f"rank must lie in [1, {dim}], got {rank}")
    g = rnd.counter_rng(seed)
    G = rnd.complex_normal(g, (dim, rank))
    m = G @ G.conj().T
    return DensityMatrix(dim_a, dim_b, m / np.trace(m).real)


def random_separable(dim_a: int, dim_b: int, k: int, seed: int) -> DensityMatrix:
    """Mixture of k Haar product pure states with uniform simplex weights."""
    if k < 1:
        raise ValueError(f"need at least one product term, got k={k}")
    g = rnd.counter_rng(seed)
    weights = rnd.dirichlet_uniform(g, k)
    mat = np.zeros((dim_a * dim_b, dim_a * dim_b), dtype=complex)
    for q in weights:
        a = rnd.complex_normal(g, dim_a)
        a /= np.linalg.norm(a)
        b = rnd.complex_normal(g, dim_b)
        b /= np.linalg.norm(b)
        v = np.kron(a, b)
        mat += q * np.outer(v, v.conj())
    return DensityMatrix(dim_a, dim_b, mat)


def tiles_bound_entangled() -> DensityMatrix:
    """The 3x3 tiles state: uniform state on the complement of the five-tile
    unextendible product basis.  PPT yet entangled; its entanglement is taken
    from the literature and not re-proven here."""
    e = np.eye(3, dtype=complex)
    s2 = 1.0 / math.sqrt(2.0)
    s3 = 1.0 / math.sqrt(3.0)
    tiles = [
        np.kron(e[0], s2 * (e[0] - e[1])),
        np.kron(e[2], s2 * (e[1] - e[2])),
        np.kron(s2 * (e[0] - e[1]), e[2]),
        np.kron(s2 * (e[1] - e[2]), e[0]),
        np.kron(s3 * (e[0] + e[1] + e[2]), s3 * (e[0] + e[1] + e[2])),
    ]
    mat = np.eye(9, dtype=complex)
    for v in tiles:
        mat -= np.outer(v, v.conj())
    return DensityMatrix(3, 3, mat / 4.0)
