"""Seeded randomness used by every sampler in the package.

All streams come from numpy's Philox bit generator, a 4x64 counter-based
generator with fixed, published round constants, so a (parameters, seed)
pair always reproduces the same state bit for bit.  Gaussian variates are
produced by an explicit Box-Muller transform on uniforms drawn in a single
fixed-order call, never by the generator's own normal method, so the draw
order is part of the contract.

Derived streams for trial i of a fuzz loop use seed + i.
"""

from __future__ import annotations

import numpy as np


def counter_rng(seed: int) -> np.random.Generator:
    """Fresh deterministic generator for the given 64-bit seed."""
    return np.random.Generator(np.random.Philox(key=int(seed) & (2**64 - 1)))


def normal_pairs(rng: np.random.Generator, n: int) -> np.ndarray:
    """2n standard normals via Box-Muller on 2n uniforms drawn in one call."""
    u = rng.random(2 * n)
    u1 = 1.0 - u[:n]  # move support to (0, 1] so log never sees 0
    u2 = u[n:]
    r = np.sqrt(-2.0 * np.log(u1))
    return np.concatenate([r * np.cos(2.0 * np.pi * u2), r * np.sin(2.0 * np.pi * u2)])


def complex_normal(rng: np.random.Generator, shape: tuple[int, ...] | int) -> np.ndarray:
    """Array of standard complex Gaussians (real and imaginary parts N(0,1))."""
    if isinstance(shape, int):
        shape = (shape,)
    n = int(np.prod(shape))
    z = normal_pairs(rng, 2 * n)
    return (z[: 2 * n : 2] + 1j * z[1 : 2 * n : 2]).reshape(shape)


def haar_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random d x d unitary: QR of a complex Ginibre matrix with the
    diagonal of R normalized to unit modulus (removes the QR phase bias)."""
    g = complex_normal(rng, (d, d))
    q, r = np.linalg.qr(g)
    diag = np.diag(r)
    return q * (diag / np.abs(diag))


def haar_isometry(rows: int, cols: int, rng: np.random.Generator) -> np.ndarray:
    """rows x cols matrix with Haar-random orthonormal columns (rows >= cols)."""
    if rows < cols:
        raise ValueError(f"isometry needs rows >= cols, got {rows} x {cols}")
    u = haar_unitary(rows, rng)
    return u[:, :cols]


def dirichlet_uniform(rng: np.random.Generator, k: int) -> np.ndarray:
    """Uniform point on the k-simplex: normalized exponentials of uniforms."""
    e = -np.log(1.0 - rng.random(k))
    return e / e.sum()
