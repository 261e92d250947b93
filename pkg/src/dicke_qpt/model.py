"""Model parameters of the k-mode Dicke Hamiltonian and derived scalars.

Energies (omega_a, omegas, gammas) are all expressed in one arbitrary unit
with hbar = 1.  The spin sector is labelled by the cooperation number 2j,
stored as the integer ``two_j`` so that half-integer j stays exact.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

from .errors import DegenerateCoupling, ZeroCooperation

__all__ = ["ModelParams", "DerivedScalars", "derived_scalars", "delta"]


@dataclass(frozen=True)
class ModelParams:
    """Immutable parameter set: N atoms, spin sector 2j, k field modes.

    Attributes
    ----------
    n_atoms : int
        Number of two-level atoms N (>= 1).
    two_j : int
        Twice the cooperation label j.  Must satisfy 0 <= 2j <= N with
        N - 2j even, so that j runs over {r, r+1, ..., N/2}.
    omega_a : float
        Atomic level splitting (>= 0).
    omegas : tuple of float
        Mode frequencies, all strictly positive.
    gammas : tuple of float
        Dipolar couplings, all >= 0, one per mode.
    """

    n_atoms: int
    two_j: int
    omega_a: float
    omegas: tuple
    gammas: tuple

    def __post_init__(self):
        object.__setattr__(self, "omegas", tuple(float(w) for w in self.omegas))
        object.__setattr__(self, "gammas", tuple(float(g) for g in self.gammas))
        object.__setattr__(self, "omega_a", float(self.omega_a))
        object.__setattr__(self, "n_atoms", int(self.n_atoms))
        object.__setattr__(self, "two_j", int(self.two_j))
        if self.n_atoms < 1:
            raise ValueError("n_atoms must be >= 1")
        if not 0 <= self.two_j <= self.n_atoms:
            raise ValueError("two_j must satisfy 0 <= 2j <= N")
        if (self.n_atoms - self.two_j) % 2:
            raise ValueError("N - 2j must be even (j in {r, r+1, ..., N/2})")
        if self.omega_a < 0:
            raise ValueError("omega_a must be >= 0")
        if len(self.omegas) < 1 or len(self.omegas) != len(self.gammas):
            raise ValueError("omegas and gammas must be non-empty and equally long")
        if any(w <= 0 for w in self.omegas):
            raise ValueError("all mode frequencies must be > 0")
        if any(g < 0 for g in self.gammas):
            raise ValueError("all couplings must be >= 0")

    @classmethod
    def from_j(cls, n_atoms, j, omega_a, omegas, gammas):
        """Build from the half-integer label j, validating that 2j is integral."""
        two_j = 2 * float(j)
        if abs(two_j - round(two_j)) > 1e-12:
            raise ValueError(f"2j must be an integer, got j = {j}")
        return cls(n_atoms, int(round(two_j)), omega_a, omegas, gammas)

    @property
    def j(self):
        return 0.5 * self.two_j

    @property
    def k(self):
        return len(self.omegas)

    def replace(self, **kwargs):
        return dataclasses.replace(self, **kwargs)


@dataclass(frozen=True)
class DerivedScalars:
    """Scalar combinations entering every closed-form expression.

    varsigma = sum_i gamma_i^2 / Omega_i      (energy units)
    sigma    = sum_i gamma_i^2 / Omega_i^2    (dimensionless)
    delta    = N omega_a / (8 j varsigma)     (dimensionless; None when 2j = 0
               or varsigma = 0)
    epsilon  = exp(-j omega_a sigma / varsigma)  (None under the same conditions)

    The ground state is normal for delta >= 1 and superradiant for delta < 1.
    """

    varsigma: float
    sigma: float
    delta: float | None
    epsilon: float | None

    def require_delta(self):
        """Return delta, raising if it is undefined for these parameters."""
        if self.delta is None:
            if self.varsigma == 0.0:
                raise DegenerateCoupling("delta undefined: all couplings vanish")
            raise ZeroCooperation("delta undefined: cooperation number 2j = 0")
        return self.delta


def derived_scalars(params: ModelParams) -> DerivedScalars:
    """Evaluate varsigma, sigma, delta and epsilon for a parameter set.

    delta and epsilon are left as None (flagged unavailable) when 2j = 0 or
    all couplings vanish; accessing them through ``require_delta`` raises.
    """
    varsigma = sum(g * g / w for g, w in zip(params.gammas, params.omegas))
    sigma = sum(g * g / (w * w) for g, w in zip(params.gammas, params.omegas))
    if params.two_j == 0 or varsigma == 0.0:
        return DerivedScalars(varsigma, sigma, None, None)
    dlt = params.n_atoms * params.omega_a / (4.0 * params.two_j * varsigma)
    eps = math.exp(-0.5 * params.two_j * params.omega_a * sigma / varsigma)
    return DerivedScalars(varsigma, sigma, dlt, eps)


def delta(params: ModelParams) -> float:
    """The transition parameter delta; raises where it is undefined."""
    return derived_scalars(params).require_delta()
