"""Central tolerance tables shared by validation, checks, and reports."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class ValidationTolerances:
    """Numerical tolerances applied when validating matrices and states.

    Overridable per construction call for stress tests; the module-level
    DEFAULT_VALIDATION instance is used everywhere else.
    """

    hermiticity: float = 1e-12   # max elementwise |M - M^dagger|
    trace: float = 1e-10         # |tr(rho) - 1|
    positivity: float = 1e-10    # min eigenvalue >= -positivity
    norm: float = 1e-12          # | ||psi|| - 1 | for pure states
    support: float = 1e-12       # eigenvalues below this count as zero support


DEFAULT_VALIDATION = ValidationTolerances()


@dataclass(frozen=True)
class CheckTolerances:
    """Slack ledger for the axiom checks, keyed by how a value was produced.

    exact          comparisons where both sides are closed-form / spectral
    fw_value       a Frank-Wolfe upper-bound estimate vs. a closed form
    opt_vs_opt     optimizer estimate on both sides (equal budgets)
    separable_exact / separable_opt   vanishing-on-separable thresholds
    """

    exact: float = 1e-9
    fw_value: float = 5e-3
    opt_vs_opt: float = 1e-2
    separable_exact: float = 1e-9
    separable_opt: float = 1e-3

    def as_dict(self) -> dict[str, float]:
        return {
            "exact": self.exact,
            "fw_value": self.fw_value,
            "opt_vs_opt": self.opt_vs_opt,
            "separable_exact": self.separable_exact,
            "separable_opt": self.separable_opt,
        }


DEFAULT_CHECKS = CheckTolerances()
