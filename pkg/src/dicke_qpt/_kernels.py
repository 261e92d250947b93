"""Hot numeric kernels: variational energy surfaces and the simplex minimizer.

The symmetry-adapted surface is evaluated hundreds of thousands of times per
sweep inside the minimizer, so both the surface and the minimizer loop are
compiled with numba.  Setting DICKE_QPT_BACKEND=numpy selects a pure-python
fallback that runs the identical arithmetic; benchmarks/bench_backends.py
compares the two.

Coordinate packing used throughout: x = [q_1..q_k, p_1..p_k, theta, phi].
"""

import math
import os

import numpy as np

__all__ = [
    "BACKEND",
    "cs_energy_kernel",
    "sas_energy_kernel",
    "minimize_sas",
    "warmup",
]

# Returned by the surface kernel where the even projection has no norm, so the
# minimizer treats that locus as an infinite barrier.
COLLAPSE_BARRIER = 1e300


def _resolve_backend():
    choice = os.environ.get("DICKE_QPT_BACKEND", "auto").strip().lower() or "auto"
    if choice not in ("auto", "numba", "numpy"):
        raise ValueError(
            f"DICKE_QPT_BACKEND must be 'auto', 'numba' or 'numpy', got {choice!r}"
        )
    if choice == "numpy":
        return "numpy"
    try:
        import numba  # noqa: F401
    except ImportError:
        if choice == "numba":
            raise
        return "numpy"
    return "numba"


BACKEND = _resolve_backend()


def _cs_energy(x, two_j, omega_a, sqrt_n, omegas, gammas):
    k = omegas.shape[0]
    j = 0.5 * two_j
    theta = x[2 * k]
    phi = x[2 * k + 1]
    field = 0.0
    drive = 0.0
    for i in range(k):
        q = x[i]
        p = x[k + i]
        field += omegas[i] * (q * q + p * p)
        drive += gammas[i] * q
    return (
        -j * omega_a * math.cos(theta)
        + field
        - (4.0 * j / sqrt_n) * math.sin(theta) * math.cos(phi) * drive
    )


def _sas_energy(x, two_j, omega_a, sqrt_n, omegas, gammas):
    k = omegas.shape[0]
    j = 0.5 * two_j
    theta = x[2 * k]
    phi = x[2 * k + 1]
    c = math.cos(theta)
    s = math.sin(theta)
    norm2 = 0.0
    field = 0.0
    drive_q = 0.0
    drive_p = 0.0
    for i in range(k):
        q = x[i]
        p = x[k + i]
        norm2 += q * q + p * p
        field += omegas[i] * (q * q + p * p)
        drive_q += gammas[i] * q
        drive_p += gammas[i] * p
    big_e = math.exp(-2.0 * norm2)
    if two_j == 0:
        # no spin sector: only the field term survives the projection
        return field * (1.0 - big_e) / (1.0 + big_e)
    # integer exponents keep the sign of cos(theta)^(2j-1) exact for odd 2j
    c_pow = c ** (two_j - 1)
    c2j = c_pow * c
    den = 1.0 + big_e * c2j
    if den < 1e-14:
        return COLLAPSE_BARRIER
    spin = -j * omega_a * (c + big_e * c_pow)
    fld = field * (1.0 - big_e * c2j)
    drv = (
        -(4.0 * j / sqrt_n)
        * s
        * (math.cos(phi) * drive_q - big_e * c_pow * math.sin(phi) * drive_p)
    )
    return (spin + fld + drv) / den


def _make_minimizer(energy):
    """Nelder-Mead specialized to one surface so numba can inline the calls.

    Standard reflection/expansion/contraction/shrink coefficients 1, 2, 0.5,
    0.5; terminates when the simplex energy spread drops below
    ftol_rel * (1 + |f_best|) or the evaluation budget is exhausted.
    """

    def minimize(x0, two_j, omega_a, sqrt_n, omegas, gammas, maxfev, ftol_rel):
        n = x0.shape[0]
        sim = np.empty((n + 1, n))
        fval = np.empty(n + 1)
        for i in range(n):
            sim[0, i] = x0[i]
        for v in range(1, n + 1):
            for i in range(n):
                sim[v, i] = x0[i]
            step = 0.05 * abs(x0[v - 1])
            if step < 1e-8:
                step = 0.1
            sim[v, v - 1] = x0[v - 1] + step
        nfev = 0
        for v in range(n + 1):
            fval[v] = energy(sim[v], two_j, omega_a, sqrt_n, omegas, gammas)
            nfev += 1
        order = np.empty(n + 1, np.int64)
        centroid = np.empty(n)
        xr = np.empty(n)
        xe = np.empty(n)
        xc = np.empty(n)
        converged = False
        while True:
            # stable insertion sort of the vertex order by energy
            for v in range(n + 1):
                order[v] = v
            for v in range(1, n + 1):
                key = order[v]
                w = v - 1
                while w >= 0 and fval[order[w]] > fval[key]:
                    order[w + 1] = order[w]
                    w -= 1
                order[w + 1] = key
            best = order[0]
            second = order[n - 1]
            worst = order[n]
            if fval[worst] - fval[best] <= ftol_rel * (1.0 + abs(fval[best])):
                converged = True
                break
            if nfev >= maxfev:
                break
            for i in range(n):
                acc = 0.0
                for v in range(n):
                    acc += sim[order[v], i]
                centroid[i] = acc / n
            for i in range(n):
                xr[i] = 2.0 * centroid[i] - sim[worst, i]
            fr = energy(xr, two_j, omega_a, sqrt_n, omegas, gammas)
            nfev += 1
            shrink = False
            if fr < fval[best]:
                for i in range(n):
                    xe[i] = 3.0 * centroid[i] - 2.0 * sim[worst, i]
                fe = energy(xe, two_j, omega_a, sqrt_n, omegas, gammas)
                nfev += 1
                if fe < fr:
                    for i in range(n):
                        sim[worst, i] = xe[i]
                    fval[worst] = fe
                else:
                    for i in range(n):
                        sim[worst, i] = xr[i]
                    fval[worst] = fr
            elif fr < fval[second]:
                for i in range(n):
                    sim[worst, i] = xr[i]
                fval[worst] = fr
            elif fr < fval[worst]:
                # outside contraction
                for i in range(n):
                    xc[i] = 1.5 * centroid[i] - 0.5 * sim[worst, i]
                fc = energy(xc, two_j, omega_a, sqrt_n, omegas, gammas)
                nfev += 1
                if fc <= fr:
                    for i in range(n):
                        sim[worst, i] = xc[i]
                    fval[worst] = fc
                else:
                    shrink = True
            else:
                # inside contraction
                for i in range(n):
                    xc[i] = 0.5 * centroid[i] + 0.5 * sim[worst, i]
                fc = energy(xc, two_j, omega_a, sqrt_n, omegas, gammas)
                nfev += 1
                if fc < fval[worst]:
                    for i in range(n):
                        sim[worst, i] = xc[i]
                    fval[worst] = fc
                else:
                    shrink = True
            if shrink:
                for v in range(n + 1):
                    if order[v] == best:
                        continue
                    idx = order[v]
                    for i in range(n):
                        sim[idx, i] = sim[best, i] + 0.5 * (sim[idx, i] - sim[best, i])
                    fval[idx] = energy(sim[idx], two_j, omega_a, sqrt_n, omegas, gammas)
                    nfev += 1
        b = 0
        for v in range(1, n + 1):
            if fval[v] < fval[b]:
                b = v
        return sim[b].copy(), fval[b], nfev, converged

    return minimize


if BACKEND == "numba":
    import numba

    cs_energy_kernel = numba.njit(cache=True)(_cs_energy)
    sas_energy_kernel = numba.njit(cache=True)(_sas_energy)
    # closure over the jitted surface; caching closures is unsupported
    _minimize_sas = numba.njit(cache=False)(_make_minimizer(sas_energy_kernel))
else:
    cs_energy_kernel = _cs_energy
    sas_energy_kernel = _sas_energy
    _minimize_sas = _make_minimizer(_sas_energy)


def minimize_sas(x0, two_j, omega_a, sqrt_n, omegas, gammas, maxfev=20000, ftol_rel=1e-10):
    """Minimize the symmetry-adapted surface from one start point.

    Returns (x_min, f_min, nfev, converged).
    """
    x0 = np.ascontiguousarray(x0, dtype=np.float64)
    omegas = np.ascontiguousarray(omegas, dtype=np.float64)
    gammas = np.ascontiguousarray(gammas, dtype=np.float64)
    x, f, nfev, ok = _minimize_sas(
        x0, int(two_j), float(omega_a), float(sqrt_n), omegas, gammas,
        int(maxfev), float(ftol_rel),
    )
    return x, float(f), int(nfev), bool(ok)


def warmup():
    """Trigger JIT compilation ahead of time (no-op on the numpy backend)."""
    if BACKEND != "numba":
        return
    x = np.zeros(4)
    om = np.array([1.0])
    gm = np.array([0.5])
    cs_energy_kernel(x, 2, 1.0, 2.0, om, gm)
    sas_energy_kernel(x, 2, 1.0, 2.0, om, gm)
    _minimize_sas(x, 2, 1.0, 2.0, om, gm, 50, 1e-6)
