"""Observables, entanglement entropy, fidelity diagnostics and sweeps.

A sweep varies one Hamiltonian parameter (a coupling gamma_i, a mode
frequency Omega_i, or the splitting omega_a) over a strictly increasing grid
and evaluates any subset of the four ground-state methods.  All quantum
points share one basis whose cutoff is converged at the most superradiant
grid point, so fidelities compare vectors in the same space.

Transition locators: the quantum transition is the neighbor-fidelity minimum,
the SASn transition the largest energy second difference (discontinuity
proxy), and CS/SASc transitions are the analytic delta = 1 root.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _kernels, hilbert
from .errors import DimensionMismatch, NoTransitionInRange
from .hilbert import BasisLayout, assemble_hamiltonian, hamiltonian_terms, parity_signs
from .model import ModelParams, derived_scalars
from .spectrum import converge_cutoff, solve_ground
from . import variational
from .variational import (
    VariationalPoint,
    cs_critical_point,
    cs_observables,
    sas_observables,
    sas_state_vector,
    sasc_observables,
    sasn_minimize,
)

__all__ = [
    "METHODS",
    "expectation",
    "entanglement_entropy",
    "fidelity",
    "params_at",
    "axis_names",
    "SweepResult",
    "MethodCurves",
    "TransitionEstimate",
    "run_sweep",
    "neighbor_fidelity_sweep",
    "variational_vs_quantum_fidelity",
    "locate_transition",
    "phase_boundary",
    "PhaseDiagram",
]

METHODS = ("CS", "SASc", "SASn", "Quantum")
OUTPUTS = ("energy", "jz", "nu", "entropy", "fidelity")


# ---------------------------------------------------------------------------
# elementary diagnostics


def expectation(op, state):
    """<state| op |state> for a Hermitian operator (real result)."""
    state = np.asarray(state)
    if op.shape[1] != state.shape[0]:
        raise DimensionMismatch(
            f"operator dim {op.shape[1]} != state dim {state.shape[0]}"
        )
    return float(np.real(np.vdot(state, op @ state)))


def entanglement_entropy(state, basis: BasisLayout):
    """Von Neumann entropy (natural log) of the matter/field bipartition.

    The basis layout makes the split a contiguous reshape; the Schmidt
    coefficients are the singular values of the (2j+1) x prod(nmax_i+1)
    amplitude matrix.
    """
    state = np.asarray(state)
    if state.shape[0] != basis.dim:
        raise DimensionMismatch(
            f"state dim {state.shape[0]} != basis dim {basis.dim}"
        )
    matrix = state.reshape(basis.spin_dim, basis.fock_size)
    s = np.linalg.svd(matrix, compute_uv=False)
    p = s * s
    p = p[p > 1e-300]
    return float(-np.sum(p * np.log(p)))


def fidelity(a, b):
    """Squared overlap |<a|b>|^2; insensitive to global phase and sign."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise DimensionMismatch(f"state dims differ: {a.shape} vs {b.shape}")
    return float(abs(np.vdot(a, b)) ** 2)


# ---------------------------------------------------------------------------
# sweep axes


def axis_names(params: ModelParams):
    names = ["omega_a"]
    names += [f"gamma{i + 1}" for i in range(params.k)]
    names += [f"omega{i + 1}" for i in range(params.k)]
    return tuple(names)


def _parse_axis(params, axis):
    axis = str(axis).strip().lower().replace("_", "")
    if axis in ("omegaa", "wa"):
        return ("omega_a", None)
    for prefix, kind in (("gamma", "gamma"), ("omega", "omega")):
        if axis.startswith(prefix) and axis[len(prefix):].isdigit():
            mode = int(axis[len(prefix):]) - 1
            if not 0 <= mode < params.k:
                raise ValueError(f"axis mode out of range for k = {params.k}: {axis}")
            return (kind, mode)
    raise ValueError(f"unknown sweep axis {axis!r}; use one of {axis_names(params)}")


def _axis_label(kind, mode):
    return "omega_a" if kind == "omega_a" else f"{kind}{mode + 1}"


def params_at(params: ModelParams, axis, value):
    """Template parameters with the swept axis replaced by `value`."""
    kind, mode = _parse_axis(params, axis)
    value = float(value)
    if kind == "omega_a":
        return params.replace(omega_a=value)
    if kind == "gamma":
        gammas = list(params.gammas)
        gammas[mode] = value
        return params.replace(gammas=tuple(gammas))
    omegas = list(params.omegas)
    omegas[mode] = value
    return params.replace(omegas=tuple(omegas))


def _delta_or_inf(params):
    scal = derived_scalars(params)
    return math.inf if scal.delta is None else scal.delta


# ---------------------------------------------------------------------------
# quantum solutions over a grid (shared basis, optional process pool)

_CTX = {}


def _init_worker(ctx):
    _CTX.clear()
    _CTX.update(ctx)


def _quantum_point(x):
    ctx = _CTX
    params = params_at(ctx["params"], ctx["axis"], x)
    h = assemble_hamiltonian(params, ctx["terms"])
    rec = solve_ground(
        params, ctx["basis"], h=h, signs=ctx["signs"], tol=ctx["eig_tol"]
    )
    basis = ctx["basis"]
    prob = rec.vector * rec.vector
    jz = float(ctx["jz_diag"] @ prob)
    nu = tuple(float(d @ prob) for d in ctx["nu_diags"])
    entropy = entanglement_entropy(rec.vector, basis) if ctx["want_entropy"] else math.nan
    return {
        "energy": rec.energy,
        "jz": jz,
        "nu": nu,
        "entropy": entropy,
        "parity": rec.parity,
        "even_block": rec.even_block,
        "residual": rec.residual,
        "vector": rec.vector,
    }


def _quantum_map(params, axis, grid, basis, eig_tol, workers, want_entropy):
    terms = hamiltonian_terms(basis, params.n_atoms)
    ctx = {
        "params": params,
        "axis": axis,
        "basis": basis,
        "terms": terms,
        "signs": parity_signs(basis),
        "jz_diag": hilbert.jz_diagonal(basis),
        "nu_diags": [hilbert.number_diagonal(basis, i) for i in range(basis.k)],
        "eig_tol": eig_tol,
        "want_entropy": want_entropy,
    }
    if workers <= 1:
        _init_worker(ctx)
        return [_quantum_point(x) for x in grid]
    chunk = max(1, len(grid) // (4 * workers))
    with ProcessPoolExecutor(
        max_workers=workers, initializer=_init_worker, initargs=(ctx,)
    ) as pool:
        return list(pool.map(_quantum_point, grid, chunksize=chunk))


def _converged_basis(params, axis, grid, tol_e, eig_tol, dim_limit):
    """Cutoff-converged basis at the most superradiant grid point."""
    deltas = [_delta_or_inf(params_at(params, axis, x)) for x in grid]
    worst = grid[int(np.argmin(deltas))]
    return converge_cutoff(
        params_at(params, axis, worst), tol_e, dim_limit=dim_limit, eig_tol=eig_tol
    )


# ---------------------------------------------------------------------------
# sweep containers


@dataclass
class MethodCurves:
    energy: np.ndarray
    jz: np.ndarray | None = None
    nu: np.ndarray | None = None
    entropy: np.ndarray | None = None
    # SASn only: energy of the minimum continued from the normal-phase seed,
    # whose fold marks the transition
    branch_energy: np.ndarray | None = None


@dataclass(frozen=True)
class TransitionEstimate:
    method: str
    locator: str
    axis: str
    value: float
    half_width: float


@dataclass
class SweepResult:
    axis: str
    grid: np.ndarray
    params: ModelParams
    methods: tuple
    curves: dict
    neighbor_fidelity: np.ndarray | None = None
    transitions: dict = field(default_factory=dict)
    basis: BasisLayout | None = None
    quantum_vectors: list | None = None
    meta: dict = field(default_factory=dict)


def _normalize_methods(methods):
    lookup = {m.lower(): m for m in METHODS}
    chosen = []
    for m in methods:
        tag = lookup.get(str(m).strip().lower())
        if tag is None:
            raise ValueError(f"unknown method {m!r}; choose from {METHODS}")
        if tag not in chosen:
            chosen.append(tag)
    return tuple(m for m in METHODS if m in chosen)


def _normalize_outputs(outputs):
    chosen = []
    for o in outputs:
        o = str(o).strip().lower()
        if o not in OUTPUTS:
            raise ValueError(f"unknown output {o!r}; choose from {OUTPUTS}")
        if o not in chosen:
            chosen.append(o)
    return tuple(o for o in OUTPUTS if o in chosen)


# ---------------------------------------------------------------------------
# the sweep driver


def run_sweep(
    params: ModelParams,
    axis,
    grid,
    methods=METHODS,
    outputs=OUTPUTS,
    *,
    tol_e=1e-8,
    eig_tol=1e-11,
    workers=1,
    nm_maxfev=20000,
    nm_ftol=1e-10,
    dim_limit=hilbert.DIM_LIMIT,
    keep_vectors=False,
):
    """Evaluate the requested methods and outputs over one parameter grid."""
    kind, mode = _parse_axis(params, axis)
    axis = _axis_label(kind, mode)
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 1:
        raise ValueError("grid must be a non-empty 1-d array")
    if np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be strictly increasing")
    methods = _normalize_methods(methods)
    outputs = _normalize_outputs(outputs)
    if not methods:
        raise ValueError("at least one method is required")
    n = grid.size
    k = params.k
    want_entropy = "entropy" in outputs
    want_jz = "jz" in outputs
    want_nu = "nu" in outputs
    want_fid = "fidelity" in outputs and "Quantum" in methods and n >= 2

    need_basis = "Quantum" in methods or (
        want_entropy and ({"SASc", "SASn"} & set(methods))
    )
    basis = None
    meta = {
        "tol_e": tol_e,
        "eig_tol": eig_tol,
        "nm_maxfev": nm_maxfev,
        "nm_ftol": nm_ftol,
        "entropy_log_base": "e",
        "sasn_transition_detector": (
            "max |second difference| of the normal-branch (zero-seeded) energy"
        ),
        "fidelity_transition_locator": "grid argmin of neighbor fidelity (midpoint)",
    }
    if "CS" in methods and want_entropy:
        meta["cs_entropy"] = "exact zero (product state)"
    if need_basis:
        basis, _ = _converged_basis(params, axis, grid, tol_e, eig_tol, dim_limit)
        meta["nmax"] = basis.nmax
        meta["dim"] = basis.dim

    curves = {}
    quantum_vectors = None

    def _point_params(x):
        return params_at(params, axis, x)

    if "CS" in methods:
        obs = [cs_observables(_point_params(x)) for x in grid]
        curves["CS"] = MethodCurves(
            energy=np.array([o.energy for o in obs]),
            jz=np.array([o.jz for o in obs]) if want_jz else None,
            nu=np.array([o.nu for o in obs]) if want_nu else None,
            entropy=np.zeros(n) if want_entropy else None,
        )

    if "SASc" in methods:
        obs = [sasc_observables(_point_params(x)) for x in grid]
        entropy = None
        if want_entropy:
            entropy = np.empty(n)
            for t, x in enumerate(grid):
                pt = cs_critical_point(_point_params(x))
                entropy[t] = entanglement_entropy(sas_state_vector(pt, basis), basis)
        curves["SASc"] = MethodCurves(
            energy=np.array([o.energy for o in obs]),
            jz=np.array([o.jz for o in obs]) if want_jz else None,
            nu=np.array([o.nu for o in obs]) if want_nu else None,
            entropy=entropy,
        )

    if "SASn" in methods:
        _kernels.warmup()
        energy = np.empty(n)
        branch = np.empty(n)
        jz = np.empty(n) if want_jz else None
        nu = np.empty((n, k)) if want_nu else None
        entropy = np.empty(n) if want_entropy else None
        for t, x in enumerate(grid):
            pp = _point_params(x)
            pt, e_min = sasn_minimize(pp, maxfev=nm_maxfev, ftol_rel=nm_ftol)
            energy[t] = e_min
            branch[t] = variational.sasn_normal_branch_energy(
                pp, maxfev=nm_maxfev, ftol_rel=nm_ftol
            )
            if want_jz or want_nu:
                o = sas_observables(pp, pt)
                if want_jz:
                    jz[t] = o.jz
                if want_nu:
                    nu[t] = o.nu
            if want_entropy:
                entropy[t] = entanglement_entropy(sas_state_vector(pt, basis), basis)
        curves["SASn"] = MethodCurves(
            energy=energy, jz=jz, nu=nu, entropy=entropy, branch_energy=branch
        )

    if "Quantum" in methods:
        points = _quantum_map(
            params, axis, grid, basis, eig_tol, workers,
            want_entropy=want_entropy,
        )
        curves["Quantum"] = MethodCurves(
            energy=np.array([p["energy"] for p in points]),
            jz=np.array([p["jz"] for p in points]) if want_jz else None,
            nu=np.array([p["nu"] for p in points]) if want_nu else None,
            entropy=np.array([p["entropy"] for p in points]) if want_entropy else None,
        )
        meta["even_block_points"] = int(sum(p["even_block"] for p in points))
        meta["max_residual"] = float(max(p["residual"] for p in points))
        vectors = [p["vector"] for p in points]
        if keep_vectors:
            quantum_vectors = vectors

    neighbor = None
    if want_fid:
        neighbor = np.array(
            [fidelity(a, b) for a, b in zip(vectors[:-1], vectors[1:])]
        )

    result = SweepResult(
        axis=axis,
        grid=grid,
        params=params,
        methods=methods,
        curves=curves,
        neighbor_fidelity=neighbor,
        basis=basis,
        quantum_vectors=quantum_vectors,
        meta=meta,
    )
    for m in methods:
        try:
            result.transitions[m] = locate_transition(result, m)
        except NoTransitionInRange:
            result.transitions[m] = None
    return result


# ---------------------------------------------------------------------------
# standalone fidelity sweeps


def neighbor_fidelity_sweep(
    params, axis, grid, *, tol_e=1e-8, eig_tol=1e-11, workers=1,
    dim_limit=hilbert.DIM_LIMIT,
):
    """F(psi(x_t), psi(x_{t+1})) between quantum ground states on one basis."""
    grid = np.asarray(grid, dtype=float)
    if grid.size < 2:
        raise ValueError("neighbor fidelity needs at least two grid points")
    basis, _ = _converged_basis(params, axis, grid, tol_e, eig_tol, dim_limit)
    points = _quantum_map(params, axis, grid, basis, eig_tol, workers, False)
    vectors = [p["vector"] for p in points]
    return np.array([fidelity(a, b) for a, b in zip(vectors[:-1], vectors[1:])])


def variational_vs_quantum_fidelity(
    params, axis, grid, method, *, tol_e=1e-8, eig_tol=1e-11, workers=1,
    nm_maxfev=20000, nm_ftol=1e-10, dim_limit=hilbert.DIM_LIMIT,
):
    """Per-point overlap of a variational state with the quantum ground state."""
    method = _normalize_methods([method])[0]
    if method == "Quantum":
        raise ValueError("compare a variational method against Quantum, not itself")
    grid = np.asarray(grid, dtype=float)
    basis, _ = _converged_basis(params, axis, grid, tol_e, eig_tol, dim_limit)
    points = _quantum_map(params, axis, grid, basis, eig_tol, workers, False)
    out = np.empty(grid.size)
    for t, x in enumerate(grid):
        pp = params_at(params, axis, x)
        if method == "CS":
            state = variational.cs_state_vector(cs_critical_point(pp), basis)
        elif method == "SASc":
            state = sas_state_vector(cs_critical_point(pp), basis)
        else:
            pt, _ = sasn_minimize(pp, maxfev=nm_maxfev, ftol_rel=nm_ftol)
            state = sas_state_vector(pt, basis)
        out[t] = fidelity(state, points[t]["vector"])
    return out


# ---------------------------------------------------------------------------
# transition locators


def _delta_one_root(params, axis):
    kind, mode = _parse_axis(params, axis)
    if params.two_j == 0:
        raise NoTransitionInRange("no delta = 1 root: cooperation number is zero")
    need = params.n_atoms * params.omega_a / (4.0 * params.two_j)
    scal = derived_scalars(params)
    if kind == "omega_a":
        return 4.0 * params.two_j * scal.varsigma / params.n_atoms
    if kind == "gamma":
        rest = scal.varsigma - params.gammas[mode] ** 2 / params.omegas[mode]
        if need <= rest:
            raise NoTransitionInRange(
                "delta = 1 unreachable: other couplings alone are supercritical"
            )
        return math.sqrt(params.omegas[mode] * (need - rest))
    rest = scal.varsigma - params.gammas[mode] ** 2 / params.omegas[mode]
    g2 = params.gammas[mode] ** 2
    if need <= rest or g2 == 0.0:
        raise NoTransitionInRange("delta = 1 unreachable along this frequency axis")
    return g2 / (need - rest)


def locate_transition(sweep: SweepResult, method) -> TransitionEstimate:
    """Transition estimate for one method of a computed sweep."""
    method = _normalize_methods([method])[0]
    grid = sweep.grid
    step = float(grid[1] - grid[0]) if grid.size > 1 else 0.0
    if method in ("CS", "SASc"):
        root = _delta_one_root(sweep.params, sweep.axis)
        if not grid[0] < root < grid[-1]:
            raise NoTransitionInRange(
                f"analytic delta = 1 root {root:.6g} outside the sweep range"
            )
        return TransitionEstimate(method, "delta-equals-one", sweep.axis, root, 0.0)
    if method == "Quantum":
        if sweep.neighbor_fidelity is None:
            raise NoTransitionInRange("sweep carries no neighbor fidelities")
        t = int(np.argmin(sweep.neighbor_fidelity))
        if t == 0 or t == sweep.neighbor_fidelity.size - 1:
            raise NoTransitionInRange("fidelity minimum sits on the sweep boundary")
        value = 0.5 * (grid[t] + grid[t + 1])
        return TransitionEstimate(method, "fidelity-minimum", sweep.axis, value, step)
    # SASn: discontinuity proxy on the normal-branch continuation
    if method not in sweep.curves:
        raise NoTransitionInRange("sweep carries no SASn energies")
    curves = sweep.curves["SASn"]
    energy = curves.branch_energy if curves.branch_energy is not None else curves.energy
    if energy.size < 3:
        raise NoTransitionInRange("too few points for a second difference")
    d2 = np.abs(energy[2:] - 2.0 * energy[1:-1] + energy[:-2])
    t = int(np.argmax(d2))
    if t == 0 or t == d2.size - 1:
        raise NoTransitionInRange("second-difference peak sits on the sweep boundary")
    return TransitionEstimate(
        method, "derivative-discontinuity", sweep.axis, float(grid[t + 1]), step
    )


# ---------------------------------------------------------------------------
# phase diagram


@dataclass
class PhaseDiagram:
    x_axis: str
    y_axis: str
    x_grid: np.ndarray
    y_grid: np.ndarray
    delta: np.ndarray            # shape (len(x_grid), len(y_grid)); inf where undefined
    superradiant: np.ndarray     # boolean mask, delta < 1
    boundary: list               # (x, y) points where delta crosses 1 along y


def phase_boundary(params: ModelParams, plane, x_grid, y_grid) -> PhaseDiagram:
    """Normal/superradiant mask over a parameter plane plus the delta = 1 line.

    The boundary polyline interpolates the delta = 1 crossing along each
    y column; delta is monotone in every single parameter, so columnwise
    scanning captures the full separatrix.
    """
    x_axis, y_axis = plane
    kind_x, mode_x = _parse_axis(params, x_axis)
    kind_y, mode_y = _parse_axis(params, y_axis)
    x_axis = _axis_label(kind_x, mode_x)
    y_axis = _axis_label(kind_y, mode_y)
    if x_axis == y_axis:
        raise ValueError("phase-diagram axes must differ")
    x_grid = np.asarray(x_grid, dtype=float)
    y_grid = np.asarray(y_grid, dtype=float)
    delta = np.empty((x_grid.size, y_grid.size))
    for ix, x in enumerate(x_grid):
        px = params_at(params, x_axis, x)
        for iy, y in enumerate(y_grid):
            delta[ix, iy] = _delta_or_inf(params_at(px, y_axis, y))
    boundary = []
    for ix, x in enumerate(x_grid):
        col = delta[ix]
        for iy in range(y_grid.size - 1):
            a, b = col[iy] - 1.0, col[iy + 1] - 1.0
            if not (np.isfinite(a) and np.isfinite(b)):
                continue
            if a == 0.0:
                boundary.append((float(x), float(y_grid[iy])))
            elif a * b < 0.0:
                frac = a / (a - b)
                boundary.append(
                    (float(x), float(y_grid[iy] + frac * (y_grid[iy + 1] - y_grid[iy])))
                )
        if np.isfinite(col[-1]) and col[-1] == 1.0:
            boundary.append((float(x), float(y_grid[-1])))
    return PhaseDiagram(
        x_axis, y_axis, x_grid, y_grid, delta, delta < 1.0, boundary
    )
