#!/usr/bin/env python3
"""Smoke test for the ptosc_py extension module.

Builds the cdylib if needed, loads it, and checks a handful of known
values from each part of the toolkit.
"""

import math
import shutil
import subprocess
import sys
import sysconfig
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def build_and_import():
    subprocess.run(
        ["cargo", "build", "--release", "-p", "ptosc-py"],
        cwd=ROOT,
        check=True,
    )
    lib = ROOT / "target" / "release" / "libptosc_py.so"
    if not lib.exists():  # e.g. macOS
        lib = ROOT / "target" / "release" / "libptosc_py.dylib"
    suffix = sysconfig.get_config_var("EXT_SUFFIX") or ".so"
    stage = Path(tempfile.mkdtemp(prefix="ptosc_py_"))
    shutil.copy(lib, stage / f"ptosc_py{suffix}")
    sys.path.insert(0, str(stage))
    import ptosc_py

    return ptosc_py


def approx(a, b, tol=1e-9):
    assert abs(a - b) <= tol, f"{a} != {b} (tol {tol})"


def main():
    m = build_and_import()

    # effective-gain algebra at the heating-scenario parameters
    p = m.SystemParams(1.0, 0.1, 1e-5, 3.0, 0.04, 1000.0)
    eff = m.effective_params(p)
    approx(eff["gamma_eff"], 1e-5 - 6.4e-4 / 16.01, 1e-15)
    approx(eff["omega_eff"], 1.0 + 0.0128 / 16.01, 1e-12)
    assert p.elimination_trusted()
    gstar = m.balance_coupling(p, 1e-5)
    approx(gstar, math.sqrt(2e-5 * 16.01 / 0.4), 1e-12)
    approx(m.modified_initial_occupation(p, 1000.0), (1 + 0.0128 / 16.01) * 1000.0, 1e-9)

    # round trip: at G* the effective dissipation is -gamma
    eff_star = m.effective_params(p.with_coupling(gstar))
    approx(eff_star["gamma_eff"], -1e-5, 1e-16)

    # full vs eliminated occupation over a short run
    times, n_b, babs, _ = m.evolve_full(p, 1000.0, 50.0, 0.01, 100)
    n_eff, _ = m.evolve_effective(p, 1000.0, times)
    rel = max(abs(a - b) / a for a, b in zip(n_b, n_eff))
    assert rel < 1e-3, f"full vs effective occupation deviate by {rel}"
    assert babs[-1] > babs[0], "gain should grow the amplitude"

    # Gaussian fidelity closed forms
    vac = (0j, 0.0, 0j)
    approx(m.gaussian_fidelity(vac, (1.0 + 0j, 1.0, 1.0 + 0j)), math.exp(-1.0), 1e-12)
    approx(m.gaussian_fidelity(vac, (0j, 1.5, 0j)), 1.0 / 2.5, 1e-12)

    # PT dimer spectrum
    d = m.PtDimerParams(1.0, 0.004, 0.004, 0.02)
    approx(m.exceptional_point(d), 0.002, 1e-18)
    (lp, _), (lm, _) = m.pt_eigenvalues(d)
    split = math.sqrt(0.02**2 - 0.002**2)
    approx(lp, 1.0 + split, 1e-12)
    approx(lm, 1.0 - split, 1e-12)

    # entanglement: TMSV negativity and a protected trace
    approx(m.tmsv_negativity(0.05), 0.1, 1e-12)
    ts, en = m.negativity_trace(d, 0.11, 0.1, 50.0, 0.01, 100)
    approx(en[0], 0.1, 1e-8)
    assert max(en) > 0.1, "balanced gain should transiently raise E_n"

    # OMIT: exact transparency at the modified sideband for balanced gain
    om = m.OmitParams(1.0, 1.0, 0.02, 0.15, 0.02, 0.02, 5e-4, 10.0)
    re, im = m.omit_chi(om, om.omega_m_eff)
    approx(re, 0.0, 1e-12)
    approx(im, -0.15 / 2.0, 1e-12)
    grid = [0.95 + k * 1e-3 for k in range(201)]
    approx(m.omit_window_depth(om, grid), 1.0, 1e-9)
    g_req = m.omit_required_coupling(om, 0.9)
    assert 0 < g_req < 5e-4, f"balanced required coupling {g_req}"

    print("ptosc_py smoke test: all checks passed")


if __name__ == "__main__":
    main()
