"""Throwaway probe: run the four acceptance windows, print loci."""
import time
import warnings

import numpy as np

warnings.filterwarnings("ignore")
import dicke_qpt as dq


def window(lo, hi):
    n = int(round((hi - lo) / 0.005)) + 1
    return lo + 0.005 * np.arange(n)


p5 = dq.ModelParams(18, 10, 2.0, (2.0, 2.0), (0.5, 1.0))
p9 = dq.ModelParams(18, 18, 2.0, (2.0, 2.0), (0.5, 1.0))

cases = [
    ("j5_gamma2", p5, "gamma2", window(1.0, 2.0), 1.550, 1.485),
    ("j9_gamma2", p9, "gamma2", window(0.7, 1.5), 1.031, 1.015),
    ("j5_omega_a", p5, "omega_a", window(0.4, 1.6), 0.817, 0.975),
    ("j9_omega_a", p9, "omega_a", window(1.4, 2.8), 1.870, 1.965),
]

for name, p, axis, grid, fid_expect, sasn_expect in cases:
    t0 = time.time()
    res = dq.run_sweep(p, axis, grid)
    dt = time.time() - t0
    tq = res.transitions["Quantum"]
    tn = res.transitions["SASn"]
    tc = res.transitions["CS"]
    sq = res.curves["Quantum"].entropy
    s_arg = float(grid[int(np.argmax(sq))])
    fid = res.neighbor_fidelity
    t = int(np.argmin(fid))
    print(
        f"{name}: fid_min={tq.value:.4f} (paper {fid_expect}) | "
        f"sasn={tn.value:.4f} (paper {sasn_expect}) | cs={tc.value:.4f} | "
        f"S_argmax={s_arg:.3f} fid_argmin_pair=({grid[t]:.3f},{grid[t+1]:.3f}) | "
        f"S_edges=({sq[0]:.3f},{sq[-1]:.3f}) S_peak={sq.max():.3f} | "
        f"dim={res.basis.dim} t={dt:.0f}s"
    )
    eq = res.curves["Quantum"].energy
    gaps = [(m, float((res.curves[m].energy - eq).min())) for m in ("CS", "SASc", "SASn")]
    print(f"   ordering min gaps: {gaps}")
    d = float((res.curves["SASn"].energy - res.curves["SASc"].energy).max())
    print(f"   max(E_SASn - E_SASc) = {d:.2e}")
    for m in ("SASc", "SASn"):
        s = res.curves[m].entropy
        print(f"   {m} entropy interior_max={s[1:-1].max():.12f} boundary_max={max(s[0], s[-1]):.12f}")
