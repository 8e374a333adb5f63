"""LOCC machinery: one-party Kraus instruments, outcome-conditioned two-round
protocols, trace-preserving wrappers, and twirling (exact and Monte Carlo)."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import rng as rnd
from .qmat import DensityMatrix, entangled_fidelity
from .states import isotropic

COMPLETENESS_TOL = 1e-10
PROB_FLOOR = 1e-12  # branches below this are dropped and mass renormalized


@dataclass(frozen=True)
class LocalInstrument:
    """Outcome-indexed Kraus operators acting on one party.

    Each Kraus operator is d_out x d_in (square for non-dimension-changing
    maps); completeness sum_i K_i^dagger K_i = I is enforced at construction.
    """

    party: str
    kraus: tuple[np.ndarray, ...] = field(repr=False)

    def __post_init__(self):
        if self.party not in ("A", "B"):
            raise ValueError(f"party must be 'A' or 'B', got {self.party!r}")
        if not self.kraus:
            raise ValueError("instrument needs at least one Kraus operator")
        ops = tuple(np.array(k, dtype=complex) for k in self.kraus)
        d_in = ops[0].shape[1]
        if any(k.ndim != 2 or k.shape[1] != d_in for k in ops):
            raise ValueError("all Kraus operators must share the input dimension")
        total = sum(k.conj().T @ k for k in ops)
        defect = float(np.abs(total - np.eye(d_in)).max())
        if defect > COMPLETENESS_TOL:
            raise ValueError(f"completeness violated: max|sum K^dag K - I| = {defect:.3e}")
        for k in ops:
            k.setflags(write=False)
        object.__setattr__(self, "kraus", ops)

    @property
    def dim_in(self) -> int:
        return self.kraus[0].shape[1]


@dataclass(frozen=True)
class LoccProtocol:
    """Two rounds with one-way classical communication: an instrument on A,
    then a round-1-outcome-indexed instrument on B."""

    round1: LocalInstrument
    round2: tuple[LocalInstrument, ...]

    def __post_init__(self):
        if self.round1.party != "A":
            raise ValueError("round 1 must act on party A")
        if len(self.round2) != len(self.round1.kraus):
            raise ValueError(f"round 2 needs one instrument per round-1 outcome "
                             f"({len(self.round1.kraus)}), got {len(self.round2)}")
        if any(inst.party != "B" for inst in self.round2):
            raise ValueError("round 2 instruments must act on party B")


@dataclass(frozen=True)
class OutcomeEnsemble:
    """Probability-weighted post-measurement states."""

    probs: tuple[float, ...]
    states: tuple[DensityMatrix, ...]

    def __post_init__(self):
        if len(self.probs) != len(self.states):
            raise ValueError("probability / state count mismatch")
        total = sum(self.probs)
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"branch probabilities sum to {total!r}, not 1")
        if min(self.probs) < 0.0:
            raise ValueError("negative branch probability")


def _embed(k: np.ndarray, party: str, dim_a: int, dim_b: int) -> np.ndarray:
    if party == "A":
        return np.kron(k, np.eye(dim_b))
    return np.kron(np.eye(dim_a), k)


def _branches(rho: DensityMatrix, inst: LocalInstrument):
    """Kraus-indexed branches above the probability floor, unnormalized mass."""
    d_local = rho.dim_a if inst.party == "A" else rho.dim_b
    if inst.dim_in != d_local:
        raise ValueError(f"instrument acts on dimension {inst.dim_in}, "
                         f"party {inst.party} has dimension {d_local}")
    out = []
    for idx, k in enumerate(inst.kraus):
        big = _embed(k, inst.party, rho.dim_a, rho.dim_b)
        branch = big @ rho.mat @ big.conj().T
        p = float(np.trace(branch).real)
        if p <= PROB_FLOOR:
            continue
        d_out = k.shape[0]
        dims = (d_out, rho.dim_b) if inst.party == "A" else (rho.dim_a, d_out)
        out.append((idx, p, DensityMatrix(dims[0], dims[1], branch / p)))
    return out


def apply_instrument(rho: DensityMatrix, inst: LocalInstrument) -> OutcomeEnsemble:
    """All measurement branches (K_i x I) rho (K_i x I)^dagger, renormalized.

    Branch probabilities are the branch traces; branches below the
    probability floor are dropped and the remaining mass renormalized.
    """
    branches = _branches(rho, inst)
    total = sum(p for _, p, _ in branches)
    return OutcomeEnsemble(tuple(p / total for _, p, _ in branches),
                           tuple(st for _, _, st in branches))


def apply_protocol(rho: DensityMatrix, proto: LoccProtocol) -> OutcomeEnsemble:
    """Joint branches of round 1 on A chained with the round-1-outcome
    conditioned round 2 on B; probabilities multiply along each path."""
    probs, states = [], []
    for idx, p1, mid in _branches(rho, proto.round1):
        for _, p2, out in _branches(mid, proto.round2[idx]):
            probs.append(p1 * p2)
            states.append(out)
    total = sum(probs)
    return OutcomeEnsemble(tuple(p / total for p in probs), tuple(states))


def forget_outcomes(ens: OutcomeEnsemble) -> DensityMatrix:
    """Discard the classical record: sum_i p_i sigma_i."""
    ref = ens.states[0]
    mat = np.zeros_like(ref.mat)
    for p, st in zip(ens.probs, ens.states):
        if (st.dim_a, st.dim_b) != (ref.dim_a, ref.dim_b):
            raise ValueError("cannot average branches with mismatched dimensions")
        mat = mat + p * st.mat
    return DensityMatrix(ref.dim_a, ref.dim_b, mat)


# ---------------------------------------------------------------------------
# twirling onto the isotropic family
# ---------------------------------------------------------------------------

def twirl_exact(rho: DensityMatrix) -> DensityMatrix:
    """Group average over U x conj(U): the isotropic state with the same
    entangled fidelity."""
    if rho.dim_a != rho.dim_b:
        raise ValueError("twirl needs a square bipartition")
    # clamp float noise; a valid state keeps the overlap in [0, 1]
    fid = min(1.0, max(0.0, entangled_fidelity(rho)))
    return isotropic(fid, rho.dim_a)


def twirl_term(rho: DensityMatrix, u: np.ndarray) -> DensityMatrix:
    """One twirl sample (U x conj(U)) rho (U x conj(U))^dagger."""
    big = np.kron(u, u.conj())
    return DensityMatrix(rho.dim_a, rho.dim_b, big @ rho.mat @ big.conj().T)


def twirl_monte_carlo(rho: DensityMatrix, n_samples: int, seed: int) -> DensityMatrix:
    """Empirical twirl over n_samples Haar unitaries (sample i uses seed + i).

    Converges to twirl_exact; the mean is a pairwise sum over the sample
    stack, so it does not depend on evaluation order.
    """
    if rho.dim_a != rho.dim_b:
        raise ValueError("twirl needs a square bipartition")
    samples = np.stack([
        twirl_term(rho, rnd.haar_unitary(rho.dim_a, rnd.counter_rng(seed + i))).mat
        for i in range(n_samples)
    ])
    return DensityMatrix(rho.dim_a, rho.dim_b, samples.sum(axis=0) / n_samples)


def random_local_instrument(party: str, d: int, n_outcomes: int, seed: int) -> LocalInstrument:
    """Kraus set from slicing a Haar-random (n_outcomes*d) x d isometry into
    d x d blocks; completeness holds by construction."""
    if n_outcomes < 1:
        raise ValueError(f"need at least one outcome, got {n_outcomes}")
    iso = rnd.haar_isometry(n_outcomes * d, d, rnd.counter_rng(seed))
    kraus = tuple(iso[i * d:(i + 1) * d, :] for i in range(n_outcomes))
    return LocalInstrument(party=party, kraus=kraus)
