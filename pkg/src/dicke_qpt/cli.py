"""Command-line front end: sweeps, phase diagrams, point reports, selfcheck.

CSV output format: '#'-prefixed metadata lines (full run configuration,
cutoffs, tolerances, located transitions), then a header row
``axis,method,energy,jz,nu1,...,nuk,entropy,neighbor_fidelity`` and one data
row per (grid point, method).  Numbers are printed in full-precision
scientific notation so repeated runs with the same configuration are
byte-identical for any worker count.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import __version__, _kernels, analysis, hilbert, spectrum, variational
from .errors import UsageError
from .model import ModelParams, derived_scalars

THREADS_ENV = "DICKE_QPT_THREADS"

__all__ = ["RunConfig", "parse_args", "main", "emit_csv", "selfcheck_report", "run_selfcheck"]


class _Parser(argparse.ArgumentParser):
    """argparse parser that raises UsageError instead of exiting."""

    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


@dataclass
class RunConfig:
    subcommand: str
    params: ModelParams | None = None
    axis: str | None = None
    start: float = 0.0
    stop: float = 0.0
    step: float = 0.0
    methods: tuple = ()
    outputs: tuple = ()
    tol_e: float = 1e-8
    eig_tol: float = 1e-11
    nm_maxfev: int = 20000
    nm_ftol: float = 1e-10
    dim_limit: int = hilbert.DIM_LIMIT
    threads: int = 1
    out: str = "-"
    x_axis: str | None = None
    x_range: tuple = ()
    y_axis: str | None = None
    y_range: tuple = ()

    def grid(self):
        return _build_grid(self.start, self.stop, self.step)


def _build_grid(start, stop, step):
    if step <= 0:
        raise UsageError("--step must be positive")
    if stop < start:
        raise UsageError("--to must be >= --from")
    count = int(round((stop - start) / step)) + 1
    grid = start + step * np.arange(count)
    return grid[grid <= stop + 0.5 * step]


def _csv_list(text):
    return [part.strip() for part in str(text).split(",") if part.strip()]


def _add_param_args(parser):
    group = parser.add_argument_group("model parameters")
    group.add_argument("--n", type=int, default=18, help="number of atoms N (default 18)")
    group.add_argument("--j", type=float, required=True,
                       help="cooperation label j (2j must be an integer)")
    group.add_argument("--omega-a", type=float, default=2.0,
                       help="atomic level splitting (default 2)")
    group.add_argument("--omega", type=str, default="2,2",
                       help="comma-separated mode frequencies (default '2,2')")
    group.add_argument("--gamma", type=str, default="0.5,1",
                       help="comma-separated couplings (default '0.5,1')")
    group.add_argument("--gamma1", type=float, default=None, help="override coupling 1")
    group.add_argument("--gamma2", type=float, default=None, help="override coupling 2")
    group.add_argument("--omega1", type=float, default=None, help="override frequency 1")
    group.add_argument("--omega2", type=float, default=None, help="override frequency 2")


def _add_solver_args(parser):
    group = parser.add_argument_group("numerics")
    group.add_argument("--tol-e", type=float, default=1e-8,
                       help="Fock-cutoff energy convergence tolerance (default 1e-8)")
    group.add_argument("--eig-tol", type=float, default=1e-11,
                       help="eigensolver tolerance (default 1e-11)")
    group.add_argument("--nm-maxfev", type=int, default=20000,
                       help="simplex evaluation budget per seed (default 20000)")
    group.add_argument("--nm-ftol", type=float, default=1e-10,
                       help="relative simplex energy-spread tolerance (default 1e-10)")
    group.add_argument("--dim-limit", type=int, default=hilbert.DIM_LIMIT,
                       help=f"hard Hilbert-space dimension cap (default {hilbert.DIM_LIMIT})")
    group.add_argument("--threads", type=int, default=None,
                       help=f"worker count; the {THREADS_ENV} env var overrides")
    group.add_argument("--out", type=str, default="-",
                       help="output path, '-' for stdout (default)")


def build_parser():
    parser = _Parser(prog="dicke-qpt", description=__doc__)
    parser.add_argument("--version", action="version", version=f"dicke-qpt {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p_sweep = sub.add_parser("sweep", help="sweep one parameter and emit CSV curves")
    _add_param_args(p_sweep)
    p_sweep.add_argument("--axis", required=True,
                         help="swept parameter: gamma<i>, omega<i> or omega_a")
    p_sweep.add_argument("--from", dest="start", type=float, required=True)
    p_sweep.add_argument("--to", dest="stop", type=float, required=True)
    p_sweep.add_argument("--step", type=float, required=True)
    p_sweep.add_argument("--methods", type=str, default="cs,sasc,sasn,quantum")
    p_sweep.add_argument("--outputs", type=str, default="energy,jz,nu,entropy,fidelity")
    _add_solver_args(p_sweep)

    p_point = sub.add_parser("point", help="report all methods at a single parameter point")
    _add_param_args(p_point)
    p_point.add_argument("--methods", type=str, default="cs,sasc,sasn,quantum")
    _add_solver_args(p_point)

    p_phase = sub.add_parser("phase-diagram", help="normal/superradiant mask over a plane")
    _add_param_args(p_phase)
    p_phase.add_argument("--x-axis", required=True)
    p_phase.add_argument("--x-from", dest="x_start", type=float, required=True)
    p_phase.add_argument("--x-to", dest="x_stop", type=float, required=True)
    p_phase.add_argument("--x-step", dest="x_step", type=float, required=True)
    p_phase.add_argument("--y-axis", required=True)
    p_phase.add_argument("--y-from", dest="y_start", type=float, required=True)
    p_phase.add_argument("--y-to", dest="y_stop", type=float, required=True)
    p_phase.add_argument("--y-step", dest="y_step", type=float, required=True)
    p_phase.add_argument("--out", type=str, default="-")

    sub.add_parser("selfcheck", help="run the fast invariant suite")
    return parser


def _params_from_args(args):
    omegas = [float(v) for v in _csv_list(args.omega)]
    gammas = [float(v) for v in _csv_list(args.gamma)]
    if len(omegas) != len(gammas):
        raise UsageError("--omega and --gamma must list the same number of modes")
    for attr, target, label in (
        ("omega1", omegas, "--omega1"), ("omega2", omegas, "--omega2"),
        ("gamma1", gammas, "--gamma1"), ("gamma2", gammas, "--gamma2"),
    ):
        value = getattr(args, attr, None)
        if value is None:
            continue
        index = int(attr[-1]) - 1
        if index >= len(target):
            raise UsageError(f"{label}: only {len(target)} modes configured")
        target[index] = float(value)
    two_j = 2.0 * args.j
    if abs(two_j - round(two_j)) > 1e-9:
        raise UsageError(f"--j: 2j must be an integer (got j = {args.j})")
    try:
        return ModelParams(args.n, int(round(two_j)), args.omega_a,
                           tuple(omegas), tuple(gammas))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _resolve_threads(args):
    env = os.environ.get(THREADS_ENV)
    if env is not None and env.strip():
        try:
            value = int(env)
        except ValueError as exc:
            raise UsageError(f"{THREADS_ENV} must be an integer, got {env!r}") from exc
    elif getattr(args, "threads", None) is not None:
        value = args.threads
    else:
        value = 1
    if value < 1:
        raise UsageError("worker count must be >= 1")
    return value


def parse_args(argv) -> RunConfig:
    """Strict CLI parsing; raises UsageError naming the offending flag."""
    parser = build_parser()
    args = parser.parse_args(argv)
    cfg = RunConfig(subcommand=args.subcommand)
    if args.subcommand == "selfcheck":
        return cfg
    cfg.params = _params_from_args(args)
    if args.subcommand == "phase-diagram":
        cfg.x_axis = args.x_axis
        cfg.x_range = (args.x_start, args.x_stop, args.x_step)
        cfg.y_axis = args.y_axis
        cfg.y_range = (args.y_start, args.y_stop, args.y_step)
        cfg.out = args.out
        analysis.params_at(cfg.params, cfg.x_axis, args.x_start)  # validate axes
        analysis.params_at(cfg.params, cfg.y_axis, args.y_start)
        return cfg
    cfg.methods = tuple(_csv_list(args.methods))
    cfg.tol_e = args.tol_e
    cfg.eig_tol = args.eig_tol
    cfg.nm_maxfev = args.nm_maxfev
    cfg.nm_ftol = args.nm_ftol
    cfg.dim_limit = args.dim_limit
    cfg.threads = _resolve_threads(args)
    cfg.out = args.out
    if args.subcommand == "sweep":
        cfg.axis = args.axis
        cfg.start = args.start
        cfg.stop = args.stop
        cfg.step = args.step
        cfg.outputs = tuple(_csv_list(args.outputs))
        try:
            analysis.params_at(cfg.params, cfg.axis, cfg.start)
        except ValueError as exc:
            raise UsageError(f"--axis: {exc}") from exc
        cfg.grid()  # validates the range early
    else:
        cfg.outputs = ("energy", "jz", "nu", "entropy")
    return cfg


# ---------------------------------------------------------------------------
# CSV emission


def _fmt(value):
    if value is None:
        return ""
    value = float(value)
    if math.isnan(value):
        return ""
    return f"{value:.17e}"


def _meta_lines(result, cfg=None):
    p = result.params
    lines = [
        f"# dicke-qpt {__version__} sweep",
        f"# axis = {result.axis}",
        f"# grid_points = {result.grid.size}",
        f"# grid_start = {_fmt(result.grid[0])}",
        f"# grid_stop = {_fmt(result.grid[-1])}",
        f"# n_atoms = {p.n_atoms}",
        f"# two_j = {p.two_j}",
        f"# omega_a = {_fmt(p.omega_a)}",
        f"# omegas = {','.join(_fmt(w) for w in p.omegas)}",
        f"# gammas = {','.join(_fmt(g) for g in p.gammas)}",
        f"# methods = {','.join(result.methods)}",
        f"# backend = {_kernels.BACKEND}",
    ]
    if cfg is not None:
        lines.append(f"# threads = {cfg.threads}")
        lines.append(f"# grid_step = {_fmt(cfg.step)}")
    for key in sorted(result.meta):
        value = result.meta[key]
        if isinstance(value, float):
            value = _fmt(value)
        elif isinstance(value, tuple):
            value = ",".join(str(v) for v in value)
        lines.append(f"# {key} = {value}")
    for method in result.methods:
        est = result.transitions.get(method)
        if est is None:
            lines.append(f"# transition_{method} = none-in-range")
        else:
            lines.append(
                f"# transition_{method} = {est.locator} at {result.axis} "
                f"= {_fmt(est.value)} +- {_fmt(est.half_width)}"
            )
    return lines


def emit_csv(result, path, cfg=None):
    """Write a SweepResult as CSV; '-' writes to stdout."""
    k = result.params.k
    nu_cols = ",".join(f"nu{i + 1}" for i in range(k))
    header = f"axis,method,energy,jz,{nu_cols},entropy,neighbor_fidelity"
    lines = _meta_lines(result, cfg)
    lines.append(header)
    for t, x in enumerate(result.grid):
        for method in result.methods:
            curves = result.curves[method]
            cells = [_fmt(x), method, _fmt(curves.energy[t])]
            cells.append(_fmt(curves.jz[t]) if curves.jz is not None else "")
            for i in range(k):
                cells.append(_fmt(curves.nu[t, i]) if curves.nu is not None else "")
            cells.append(_fmt(curves.entropy[t]) if curves.entropy is not None else "")
            fid = ""
            if (
                method == "Quantum"
                and result.neighbor_fidelity is not None
                and t < result.neighbor_fidelity.size
            ):
                fid = _fmt(result.neighbor_fidelity[t])
            cells.append(fid)
            lines.append(",".join(cells))
    text = "\n".join(lines) + "\n"
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _emit_phase_csv(diagram, path):
    lines = [
        f"# dicke-qpt {__version__} phase-diagram",
        f"# x_axis = {diagram.x_axis}",
        f"# y_axis = {diagram.y_axis}",
        "# normal region: delta >= 1; superradiant region: delta < 1",
    ]
    for x, y in diagram.boundary:
        lines.append(f"# boundary_point = {_fmt(x)},{_fmt(y)}")
    lines.append("x,y,delta,superradiant")
    for ix, x in enumerate(diagram.x_grid):
        for iy, y in enumerate(diagram.y_grid):
            d = diagram.delta[ix, iy]
            d_txt = _fmt(d) if np.isfinite(d) else "inf"
            lines.append(f"{_fmt(x)},{_fmt(y)},{d_txt},{int(diagram.superradiant[ix, iy])}")
    text = "\n".join(lines) + "\n"
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


# ---------------------------------------------------------------------------
# selfcheck


def check_parity_block_structure(h, signs):
    """Largest |H| entry connecting opposite-parity states (0 for a valid H)."""
    coo = h.tocoo()
    cross = signs[coo.row] != signs[coo.col]
    if not np.any(cross):
        return 0.0
    return float(np.max(np.abs(coo.data[cross])))


def _entropy_both_sides(state, basis):
    rho = np.outer(state, np.conj(state))
    rho = rho.reshape(basis.spin_dim, basis.fock_size, basis.spin_dim, basis.fock_size)
    rho_matter = np.trace(rho, axis1=1, axis2=3)
    rho_field = np.trace(rho, axis1=0, axis2=2)
    out = []
    for reduced in (rho_matter, rho_field):
        w = np.linalg.eigvalsh(reduced)
        w = w[w > 1e-14]
        out.append(float(-np.sum(w * np.log(w))))
    return out


def _fd_gradient(fun, x, h):
    grad = np.empty(x.size)
    for i in range(x.size):
        e = np.zeros(x.size)
        e[i] = 1.0
        # fourth-order central stencil
        grad[i] = (
            -fun(x + 2 * h * e) + 8 * fun(x + h * e)
            - 8 * fun(x - h * e) + fun(x - 2 * h * e)
        ) / (12 * h)
    return grad


def selfcheck_report():
    """Fast invariant suite; returns a list of (name, passed, detail)."""
    report = []

    def record(name, passed, detail):
        report.append((name, bool(passed), detail))

    # 1. parity block structure of the Hamiltonian
    params = ModelParams(4, 2, 1.1, (1.0, 1.3), (0.7, 0.3))
    basis = hilbert.build_basis(2, (3, 4))
    h = hilbert.build_hamiltonian(params, basis)
    signs = hilbert.parity_signs(basis)
    cross = check_parity_block_structure(h, signs)
    record("parity-block-structure", cross == 0.0, f"max cross-parity entry {cross:.1e}")

    # 2. iterative solver against the dense oracle
    params = ModelParams(1, 1, 0.9, (1.3,), (0.7,))
    basis = hilbert.build_basis(1, (4,))
    h = hilbert.build_hamiltonian(params, basis)
    w, v = spectrum.dense_oracle(h, return_vectors=True)
    energy, vector = spectrum.ground_state(h)
    err = abs(energy - w[0])
    infid = 1.0 - analysis.fidelity(vector, v[:, 0])
    ok = err <= 1e-10 and infid <= 1e-10
    record("dense-vs-iterative", ok, f"dE {err:.1e}, 1-F {infid:.1e}")

    # 3. closed forms against synthesized state vectors
    params = ModelParams(18, 6, 2.0, (2.0, 2.0), (1.2, 1.5))
    basis = hilbert.build_basis(6, (25, 25))
    h = hilbert.build_hamiltonian(params, basis)
    crit = variational.cs_critical_point(params)
    cs_vec = variational.cs_state_vector(crit, basis)
    cs_err = abs(analysis.expectation(h, cs_vec) - variational.cs_observables(params).energy)
    sas_vec = variational.sas_state_vector(crit, basis)
    sasc = variational.sasc_observables(params)
    jz_op = hilbert.jz_diagonal(basis)
    sas_err = max(
        abs(analysis.expectation(h, sas_vec) - sasc.energy),
        abs(float(jz_op @ (sas_vec * sas_vec)) - sasc.jz),
        max(
            abs(float(hilbert.number_diagonal(basis, i) @ (sas_vec * sas_vec)) - sasc.nu[i])
            for i in range(2)
        ),
    )
    ok = cs_err <= 1e-7 and sas_err <= 1e-7
    record("closed-form-vs-state", ok, f"CS {cs_err:.1e}, SASc {sas_err:.1e}")

    # 4. entropy symmetry between the matter and field sides
    rng = np.random.default_rng(7)
    basis = hilbert.build_basis(3, (4, 3))
    state = rng.standard_normal(basis.dim)
    state /= np.linalg.norm(state)
    s_matter, s_field = _entropy_both_sides(state, basis)
    s_svd = analysis.entanglement_entropy(state, basis)
    gap = max(abs(s_matter - s_field), abs(s_svd - s_matter))
    record("entropy-symmetry", gap <= 1e-10, f"matter/field gap {gap:.1e}")

    # 5. finite-difference gradients of the surfaces (two-step consistency)
    params = ModelParams(18, 10, 2.0, (2.0, 2.0), (0.5, 1.2))
    args = (params.two_j, params.omega_a, math.sqrt(params.n_atoms),
            np.asarray(params.omegas), np.asarray(params.gammas))
    rng = np.random.default_rng(11)
    worst = 0.0
    for _ in range(5):
        x = rng.uniform([-0.8] * 4 + [0.2, 0.0], [0.8] * 4 + [2.6, 6.2])
        for fun in (
            lambda y: _kernels.cs_energy_kernel(y, *args),
            lambda y: _kernels.sas_energy_kernel(y, *args),
        ):
            g1 = _fd_gradient(fun, x, 1e-4)
            g2 = _fd_gradient(fun, x, 5e-5)
            scale = max(1.0, float(np.max(np.abs(g1))))
            worst = max(worst, float(np.max(np.abs(g1 - g2))) / scale)
    crit = variational.cs_critical_point(params)
    gcrit = _fd_gradient(lambda y: _kernels.cs_energy_kernel(y, *args),
                         crit.as_array(), 1e-4)
    gmax = float(np.max(np.abs(gcrit)))
    ok = worst <= 1e-5 and gmax <= 1e-6
    record("surface-gradients", ok, f"consistency {worst:.1e}, critical {gmax:.1e}")

    # 6. quantum ground state has even parity
    params = ModelParams(18, 8, 2.0, (2.0, 2.0), (0.6, 1.4))
    basis, record_q = spectrum.converge_cutoff(params, tol_e=1e-7)
    gap = abs(record_q.parity - 1.0)
    record("ground-state-parity", gap <= 1e-8, f"|<P> - 1| = {gap:.1e}")

    # 7. zero coupling: every method reproduces the decoupled ground state
    params = ModelParams(18, 10, 2.0, (2.0, 2.0), (0.0, 0.0))
    e_ref = -0.5 * params.two_j * params.omega_a
    basis = hilbert.build_basis(10, (6, 6))
    h = hilbert.build_hamiltonian(params, basis)
    e_q, _ = spectrum.ground_state(h)
    e_cs = variational.cs_observables(params).energy
    e_sasc = variational.sasc_observables(params).energy
    _, e_sasn = variational.sasn_minimize(params)
    worst = max(abs(e - e_ref) for e in (e_q, e_cs, e_sasc, e_sasn))
    record("zero-coupling-agreement", worst <= 1e-9 * abs(e_ref), f"max dev {worst:.1e}")

    return report


def run_selfcheck(stream=None):
    stream = stream or sys.stdout
    report = selfcheck_report()
    failures = 0
    for name, passed, detail in report:
        status = "ok  " if passed else "FAIL"
        stream.write(f"{status} {name}: {detail}\n")
        failures += not passed
    stream.write(f"{len(report) - failures}/{len(report)} checks passed\n")
    return 1 if failures else 0


# ---------------------------------------------------------------------------
# entry point


def _run_sweep_cmd(cfg):
    result = analysis.run_sweep(
        cfg.params, cfg.axis, cfg.grid(),
        methods=cfg.methods, outputs=cfg.outputs,
        tol_e=cfg.tol_e, eig_tol=cfg.eig_tol, workers=cfg.threads,
        nm_maxfev=cfg.nm_maxfev, nm_ftol=cfg.nm_ftol, dim_limit=cfg.dim_limit,
    )
    emit_csv(result, cfg.out, cfg)
    return 0


def _run_point_cmd(cfg):
    params = cfg.params
    methods = analysis._normalize_methods(cfg.methods)
    rows = {}
    basis = None
    if {"SASc", "SASn", "Quantum"} & set(methods):
        basis, record_q = spectrum.converge_cutoff(
            params, cfg.tol_e, dim_limit=cfg.dim_limit, eig_tol=cfg.eig_tol
        )
    if "CS" in methods:
        obs = variational.cs_observables(params)
        rows["CS"] = (obs, 0.0)
    if "SASc" in methods:
        obs = variational.sasc_observables(params)
        vec = variational.sas_state_vector(variational.cs_critical_point(params), basis)
        rows["SASc"] = (obs, analysis.entanglement_entropy(vec, basis))
    if "SASn" in methods:
        pt, energy = variational.sasn_minimize(
            params, maxfev=cfg.nm_maxfev, ftol_rel=cfg.nm_ftol
        )
        obs = variational.sas_observables(params, pt)
        vec = variational.sas_state_vector(pt, basis)
        rows["SASn"] = (obs, analysis.entanglement_entropy(vec, basis))
    if "Quantum" in methods:
        prob = record_q.vector * record_q.vector
        obs = variational.Observables(
            record_q.energy,
            float(hilbert.jz_diagonal(basis) @ prob),
            tuple(float(hilbert.number_diagonal(basis, i) @ prob) for i in range(params.k)),
        )
        rows["Quantum"] = (obs, analysis.entanglement_entropy(record_q.vector, basis))
    nu_head = " ".join(f"{f'nu{i+1}':>12}" for i in range(params.k))
    sys.stdout.write(f"{'method':>8} {'energy':>16} {'jz':>12} {nu_head} {'entropy':>12}\n")
    for method in methods:
        obs, entropy = rows[method]
        nu_txt = " ".join(f"{v:12.6f}" for v in obs.nu)
        sys.stdout.write(
            f"{method:>8} {obs.energy:16.8f} {obs.jz:12.6f} {nu_txt} {entropy:12.6f}\n"
        )
    if basis is not None:
        sys.stdout.write(f"# nmax = {basis.nmax}, dim = {basis.dim}\n")
    return 0


def _run_phase_cmd(cfg):
    x_grid = _build_grid(*cfg.x_range)
    y_grid = _build_grid(*cfg.y_range)
    diagram = analysis.phase_boundary(
        cfg.params, (cfg.x_axis, cfg.y_axis), x_grid, y_grid
    )
    _emit_phase_csv(diagram, cfg.out)
    return 0


def main(argv=None) -> int:
    try:
        cfg = parse_args(sys.argv[1:] if argv is None else argv)
    except UsageError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    if cfg.subcommand == "selfcheck":
        return run_selfcheck()
    if cfg.subcommand == "sweep":
        return _run_sweep_cmd(cfg)
    if cfg.subcommand == "point":
        return _run_point_cmd(cfg)
    return _run_phase_cmd(cfg)


if __name__ == "__main__":
    sys.exit(main())
