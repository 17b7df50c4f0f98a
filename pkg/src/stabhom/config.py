"""Central numeric tolerances and search limits.

Every module pulls its comparison thresholds from here so the whole
package can be tightened or relaxed in one place.
"""
from __future__ import annotations

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Tolerances:
    norm: float = 1e-10          # state normalisation / orthogonality / hermiticity
    action: float = 1e-9         # code-space restriction matching
    eigen: float = 1e-8          # eigenvalue accuracy
    assertion: float = 1e-7      # generic numeric comparisons
    claim: float = 1e-6          # catalogued-value comparisons in the audit
    violation: float = 1e-9      # strictness margin for "quantum beats classical"
    converge: float = 1e-10      # alternating-optimisation fixed points
    seesaw: float = 1e-9         # see-saw convergence

    def with_claim(self, claim: float) -> "Tolerances":
        return replace(self, claim=claim)


@dataclass(frozen=True)
class SearchLimits:
    max_width: int = 12          # dense realisation cap (4096 x 4096)
    max_image_width: int = 8     # image-set enumeration cap (4^8 strings)
    max_homomorphism_width: int = 6
    max_settings: int = 24       # deterministic-strategy enumeration cap
    max_nonlinear_settings: int = 20
    max_assignments: int = 100_000  # descendant occurrence-assignment search cap
    separable_restarts: int = 64
    seesaw_restarts: int = 32
    rng_seed: int = 0


TOL = Tolerances()
LIMITS = SearchLimits()
