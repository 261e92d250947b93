"""Variational trial states: coherent (CS) and symmetry-adapted (SAS).

CS: a product of field coherent states |alpha_i>, alpha_i = q_i + i p_i, and
an atomic Bloch coherent state labelled by (theta, phi).  SAS: the even
excitation-parity projection of a CS, which restores the Hamiltonian's
conserved parity.  Three approximations derive from them:

* CS    - analytic minimization of the coherent-state surface,
* SASc  - the symmetry-adapted surface evaluated at the CS minimum (analytic),
* SASn  - numerical multi-start simplex minimization of the SAS surface.

Closed forms are expressed through delta = N omega_a / (8 j varsigma); the
normal branch (delta >= 1) has the trivial minimum, the superradiant branch
(delta < 1) carries finite field occupation.
"""

from __future__ import annotations

import math
import warnings
from collections import namedtuple
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import NoConvergence, ProjectionCollapse, TruncationLoss
from .hilbert import BasisLayout, parity_signs
from .model import ModelParams, derived_scalars

__all__ = [
    "VariationalPoint",
    "SasFactors",
    "Observables",
    "sas_factors",
    "cs_energy",
    "sas_energy",
    "cs_critical_point",
    "cs_observables",
    "sasc_observables",
    "sas_observables",
    "sasn_minimize",
    "cs_state_vector",
    "sas_state_vector",
    "sasn_default_seeds",
]

TRUNCATION_TOL = 1e-8
_COLLAPSE_TOL = 1e-12

Observables = namedtuple("Observables", ["energy", "jz", "nu"])


@dataclass(frozen=True)
class VariationalPoint:
    """Real coordinates (q_i, p_i, theta, phi) of a trial state.

    Constructed values are normalized to theta in [0, pi], phi in [0, 2 pi)
    using the Bloch-sphere identification (theta, phi) ~ (2 pi - theta,
    phi + pi), which leaves every energy surface invariant.
    """

    q: tuple
    p: tuple
    theta: float
    phi: float

    def __post_init__(self):
        q = tuple(float(v) for v in self.q)
        p = tuple(float(v) for v in self.p)
        if len(q) != len(p):
            raise ValueError("q and p must have the same length")
        theta = float(self.theta) % (2.0 * math.pi)
        phi = float(self.phi)
        if theta > math.pi:
            theta = 2.0 * math.pi - theta
            phi += math.pi
        phi %= 2.0 * math.pi
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "phi", phi)

    @classmethod
    def zero(cls, k):
        return cls((0.0,) * k, (0.0,) * k, 0.0, 0.0)

    @classmethod
    def from_array(cls, x):
        x = np.asarray(x, dtype=float)
        k = (x.size - 2) // 2
        return cls(tuple(x[:k]), tuple(x[k:2 * k]), x[2 * k], x[2 * k + 1])

    @property
    def k(self):
        return len(self.q)

    def as_array(self):
        return np.array(self.q + self.p + (self.theta, self.phi))

    def alphas(self):
        return np.array([qi + 1j * pi for qi, pi in zip(self.q, self.p)])


@dataclass(frozen=True)
class SasFactors:
    """Overlap factor E = exp(-2 sum |alpha_i|^2) and the even-projection norm."""

    big_e: float
    norm_plus: float


def sas_factors(pt: VariationalPoint, two_j: int) -> SasFactors:
    big_e = math.exp(-2.0 * sum(qi * qi + pi * pi for qi, pi in zip(pt.q, pt.p)))
    overlap = big_e * math.cos(pt.theta) ** two_j
    arg = 2.0 + 2.0 * overlap
    if arg < _COLLAPSE_TOL:
        raise ProjectionCollapse("even projection of the trial state has zero norm")
    return SasFactors(big_e, arg ** -0.5)


def _kernel_args(params: ModelParams):
    return (
        params.two_j,
        params.omega_a,
        math.sqrt(params.n_atoms),
        np.asarray(params.omegas),
        np.asarray(params.gammas),
    )


def cs_energy(params: ModelParams, pt: VariationalPoint) -> float:
    """Coherent-state energy surface.

    -j omega_a cos(theta) + sum_i Omega_i (q_i^2 + p_i^2)
    - (4 j / sqrt(N)) sin(theta) cos(phi) sum_i gamma_i q_i
    """
    return float(_kernels.cs_energy_kernel(pt.as_array(), *_kernel_args(params)))


def sas_energy(params: ModelParams, pt: VariationalPoint) -> float:
    """Symmetry-adapted energy surface (expectation in the even projection)."""
    value = float(_kernels.sas_energy_kernel(pt.as_array(), *_kernel_args(params)))
    if value >= 0.5 * _kernels.COLLAPSE_BARRIER:
        raise ProjectionCollapse("even projection of the trial state has zero norm")
    return value


def cs_critical_point(params: ModelParams) -> VariationalPoint:
    """Analytic minimum of the CS surface.

    Normal phase (delta >= 1, vanishing couplings or 2j = 0): the all-zero
    point.  Superradiant phase: cos(theta_c) = delta, phi_c = 0,
    q_ic = (2 j gamma_i / (Omega_i sqrt(N))) sin(theta_c), p_ic = 0.
    """
    scal = derived_scalars(params)
    k = params.k
    if scal.delta is None or scal.delta >= 1.0:
        return VariationalPoint.zero(k)
    theta = math.acos(scal.delta)
    sin_t = math.sin(theta)
    scale = params.two_j / math.sqrt(params.n_atoms)
    q = tuple(scale * g / w * sin_t for g, w in zip(params.gammas, params.omegas))
    return VariationalPoint(q, (0.0,) * k, theta, 0.0)


def _normal_observables(params):
    j = 0.5 * params.two_j
    return Observables(-j * params.omega_a, -j, (0.0,) * params.k)


def cs_observables(params: ModelParams) -> Observables:
    """Closed-form CS ground-state energy, <Jz> and mode occupations.

    delta >= 1: (-j omega_a, -j, 0).  delta < 1:
    E = -(j omega_a / 2)(1/delta + delta), <Jz> = -j delta,
    <nu_i> = (gamma_i^2/Omega_i^2)(j omega_a / 2 varsigma)(1/delta - delta).
    """
    scal = derived_scalars(params)
    if scal.delta is None or scal.delta >= 1.0:
        return _normal_observables(params)
    j = 0.5 * params.two_j
    d = scal.delta
    energy = -0.5 * j * params.omega_a * (1.0 / d + d)
    jz = -j * d
    occ_scale = 0.5 * j * params.omega_a / scal.varsigma * (1.0 / d - d)
    nu = tuple(occ_scale * g * g / (w * w) for g, w in zip(params.gammas, params.omegas))
    return Observables(energy, jz, nu)


def sasc_observables(params: ModelParams) -> Observables:
    """SASc closed forms: the SAS surface evaluated at the CS minimum.

    The parity-restoration corrections are controlled by the coherent overlap
    at the CS minimum, exp{-(j omega_a sigma / varsigma)(1/delta - delta)},
    times delta^(2j); they vanish both deep in the superradiant phase and at
    the boundary delta -> 1, where SASc joins CS continuously.
    """
    scal = derived_scalars(params)
    if scal.delta is None or scal.delta >= 1.0:
        return _normal_observables(params)
    j = 0.5 * params.two_j
    d = scal.delta
    exponent = j * params.omega_a * scal.sigma / scal.varsigma * (1.0 / d - d)
    e_crit = math.exp(-exponent)
    overlap = e_crit * d ** params.two_j
    cross = d + e_crit * d ** (params.two_j - 1)
    energy = -j * params.omega_a * (cross / (1.0 + overlap) + 0.5 * (1.0 / d - d))
    jz = -j * cross / (1.0 + overlap)
    depletion = (1.0 - overlap) / (1.0 + overlap)
    nu_cs = cs_observables(params).nu
    return Observables(energy, jz, tuple(n * depletion for n in nu_cs))


def sas_observables(params: ModelParams, pt: VariationalPoint) -> Observables:
    """Energy, <Jz> and <nu_i> in the even-projected state at a general point."""
    energy = sas_energy(params, pt)
    two_j = params.two_j
    j = 0.5 * two_j
    c = math.cos(pt.theta)
    big_e = sas_factors(pt, two_j).big_e
    if two_j == 0:
        jz = 0.0
        c2j = 1.0
    else:
        c_pow = c ** (two_j - 1)
        c2j = c_pow * c
        jz = -j * (c + big_e * c_pow) / (1.0 + big_e * c2j)
    den = 1.0 + big_e * c2j
    if den < _COLLAPSE_TOL:
        raise ProjectionCollapse("even projection of the trial state has zero norm")
    depletion = (1.0 - big_e * c2j) / den
    nu = tuple(
        (qi * qi + pi * pi) * depletion for qi, pi in zip(pt.q, pt.p)
    )
    return Observables(energy, jz, nu)


def sasn_default_seeds(params: ModelParams):
    """Multi-start seeds: the all-zero point, the CS minimum and +/-5% theta kicks."""
    crit = cs_critical_point(params)
    seeds = [VariationalPoint.zero(params.k), crit]
    for factor in (1.05, 0.95):
        seeds.append(VariationalPoint(crit.q, crit.p, factor * crit.theta, crit.phi))
    return seeds


def sasn_minimize(params: ModelParams, seeds=None, maxfev=20000, ftol_rel=1e-10):
    """Simplex minimization of the SAS surface from every seed; best result wins.

    Returns (point, energy).  Raises NoConvergence only when no seed meets the
    energy-spread criterion within its evaluation budget.
    """
    if seeds is None:
        seeds = sasn_default_seeds(params)
    if not seeds:
        raise ValueError("seed list must be non-empty")
    args = _kernel_args(params)
    best = None
    seen = set()
    any_converged = False
    for seed in seeds:
        x0 = seed.as_array()
        key = x0.tobytes()
        if key in seen:
            continue
        seen.add(key)
        x, f, _, ok = _kernels.minimize_sas(
            x0, *args, maxfev=maxfev, ftol_rel=ftol_rel
        )
        if not ok:
            continue
        any_converged = True
        if best is None or f < best[1]:
            best = (x, f)
    if not any_converged:
        raise NoConvergence(
            f"no simplex start converged within {maxfev} evaluations"
        )
    point = VariationalPoint.from_array(best[0])
    # simplex parameter noise at ftol_rel ~ 1e-10 sits near 1e-5; a genuine
    # complex-quadrature minimum would show p of order 0.1
    if max((abs(v) for v in point.p), default=0.0) > 1e-3:
        warnings.warn(
            "SAS minimum found at nonzero field momentum p; keeping it",
            stacklevel=2,
        )
    return point, float(best[1])


def sasn_normal_branch_energy(params: ModelParams, maxfev=20000, ftol_rel=1e-10):
    """SAS surface minimized from the normal-phase (all-zero) seed only.

    Tracks the normal-like local minimum while its basin exists and jumps to
    the superradiant branch once it folds; the jump is the energy
    discontinuity used to locate the SASn transition.
    """
    x0 = VariationalPoint.zero(params.k).as_array()
    _, f, _, ok = _kernels.minimize_sas(
        x0, *_kernel_args(params), maxfev=maxfev, ftol_rel=ftol_rel
    )
    if not ok:
        raise NoConvergence(
            f"normal-branch simplex did not converge within {maxfev} evaluations"
        )
    return float(f)


def _fock_amplitudes(alpha, nmax, real):
    """Truncated coherent amplitudes exp(-|alpha|^2/2) alpha^nu / sqrt(nu!)."""
    dtype = np.float64 if real else np.complex128
    out = np.zeros(nmax + 1, dtype=dtype)
    out[0] = math.exp(-0.5 * abs(alpha) ** 2)
    a = alpha.real if real else alpha
    for nu in range(1, nmax + 1):
        out[nu] = out[nu - 1] * a / math.sqrt(nu)
    return out


def _spin_amplitudes(two_j, theta, phi, real):
    """Bloch coherent amplitudes (1+|xi|^2)^-j C(2j,m)^(1/2) xi^m on |j, m-j>."""
    dtype = np.float64 if real else np.complex128
    out = np.zeros(two_j + 1, dtype=dtype)
    half = 0.5 * theta
    t = math.tan(half)
    xi = t if real else t * complex(math.cos(phi), math.sin(phi))
    if real and abs(math.cos(phi) + 1.0) < 1e-12:
        xi = -t
    out[0] = math.cos(half) ** two_j
    for m in range(1, two_j + 1):
        out[m] = out[m - 1] * xi * math.sqrt((two_j - m + 1) / m)
    norm2 = float(np.sum(np.abs(out) ** 2))
    if abs(norm2 - 1.0) > 1e-10:
        raise TruncationLoss(
            "spin amplitudes degenerate (theta too close to pi for this 2j)"
        )
    return out


def _is_real_point(pt):
    if any(abs(pi) > 0.0 for pi in pt.p):
        return False
    s = math.sin(pt.phi)
    c = math.cos(pt.phi)
    return abs(s) < 1e-15 and (abs(c - 1.0) < 1e-12 or abs(c + 1.0) < 1e-12)


def _raw_product_state(pt: VariationalPoint, basis: BasisLayout, truncation_tol):
    if pt.k != basis.k:
        raise ValueError("trial point and basis disagree on the mode count")
    real = _is_real_point(pt)
    spin = _spin_amplitudes(basis.two_j, pt.theta, pt.phi, real)
    vec = spin
    deficit = 0.0
    for alpha, nmax in zip(pt.alphas(), basis.nmax):
        f = _fock_amplitudes(alpha, nmax, real)
        deficit = 1.0 - (1.0 - deficit) * float(np.sum(np.abs(f) ** 2))
        vec = np.kron(vec, f)
    if deficit > truncation_tol:
        raise TruncationLoss(
            f"trial state loses {deficit:.3e} norm to the Fock cutoff "
            f"(tolerance {truncation_tol:.1e}); enlarge nmax"
        )
    return vec


def cs_state_vector(pt: VariationalPoint, basis: BasisLayout, truncation_tol=TRUNCATION_TOL):
    """Expand the coherent product state on the truncated basis (unit norm)."""
    vec = _raw_product_state(pt, basis, truncation_tol)
    return vec / np.linalg.norm(vec)


def sas_state_vector(pt: VariationalPoint, basis: BasisLayout, truncation_tol=TRUNCATION_TOL):
    """Even-parity projection of the coherent product state, renormalized.

    The projection is applied in the basis: the partner expansion at
    (-alpha, -xi) is the parity diagonal acting on the original one.
    """
    vec = _raw_product_state(pt, basis, truncation_tol)
    signs = parity_signs(basis)
    projected = vec + signs * vec
    norm = np.linalg.norm(projected)
    if norm < 1e-7:
        raise ProjectionCollapse("even projection of the trial state has zero norm")
    return projected / norm
