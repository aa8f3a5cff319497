#!/usr/bin/env python3
"""Smoke test for the qmm_py extension module.

Builds nothing itself: it locates the compiled cdylib under target/,
copies it into a temp dir under the importable name, and exercises the
simulation class and the oracle wrappers end to end.

Run after `cargo build -p qmm-py` (or `--release`):

    python3 python/smoke_test.py
"""

import math
import shutil
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def locate_cdylib() -> Path:
    for profile in ("release", "debug"):
        for name in ("libqmm_py.so", "libqmm_py.dylib", "qmm_py.dll"):
            p = ROOT / "target" / profile / name
            if p.exists():
                return p
    sys.exit("qmm_py cdylib not found; run `cargo build -p qmm-py` first")


def main() -> None:
    src = locate_cdylib()
    tmp = Path(tempfile.mkdtemp(prefix="qmm_py_"))
    suffix = ".pyd" if src.suffix == ".dll" else ".so"
    shutil.copy2(src, tmp / f"qmm_py{suffix}")
    sys.path.insert(0, str(tmp))
    import qmm_py

    # Free pulse on a small lattice: unitary per-site evolution.
    sim = qmm_py.Simulation(256, 96, 160, 0.05)
    sim.add_pulse(amplitude=0.05, wavenumber=2 * math.pi / 25, omega=0.9,
                  center=40.0, width=15.0)
    steps = sim.run(30.0)
    assert steps == 600, steps
    assert abs(sim.time() - 30.0) < 1e-9
    assert len(sim.field()) == 256
    assert len(sim.populations()) == 64
    assert sim.norm_deviation() < 1e-10, sim.norm_deviation()
    assert sim.energy() > 0.0
    print(f"simulation: {steps} steps, norm deviation {sim.norm_deviation():.2e}")

    # Register setters and frozen mode.
    sim2 = qmm_py.Simulation(256, 96, 160, 0.05)
    sim2.set_register([0.25] * 64)
    sim2.freeze()
    sim2.run(5.0)
    pops = sim2.populations()
    assert all(abs(p - 0.25) < 1e-12 for p in pops), "frozen register drifted"
    print("frozen register: populations pinned at 0.25")

    # Pulse edits after the first run must be rejected.
    try:
        sim.add_pulse(0.01, 0.1, 0.3, 50.0, 10.0)
    except ValueError:
        pass
    else:
        raise AssertionError("late add_pulse was accepted")

    # Charge-basis spectrum: parity selection rule and harmonic limit.
    s = qmm_py.qubit_spectrum(4.0)
    assert abs(s["d01"]) < 1e-10, s["d01"]
    assert abs(s["epsilon_over_omega_j"] - 1.935365590943) < 1e-9
    s50 = qmm_py.qubit_spectrum(50.0, 0.25)
    assert 1.9 <= s50["epsilon_over_omega_j"] <= 2.0
    print(f"qubit spectrum: ratio {s['epsilon_over_omega_j']:.6f}, |d01| {abs(s['d01']):.1e}")

    # Flopping profile: bounded, zero at nodes.
    node = qmm_py.rabi_profile(6.25, 100.0, 0.1, 2 * math.pi / 25)
    assert node == 0.0, node
    anti = qmm_py.rabi_profile(12.5, 100.0, 0.1, 2 * math.pi / 25)
    assert 0.0 <= anti <= 1.0
    print(f"flopping profile: node {node}, antinode sample {anti:.4f}")

    # Band solve against the independently pinned first gap.
    gap = qmm_py.resolve_first_gap(0.05, 0.02, 12.5, v=1.99)
    assert abs(gap["hill"] - 0.0176768558) < 1e-8, gap["hill"]
    assert gap["half_is_primary"]
    bands = qmm_py.bloch_bands([0.0, math.pi / 12.5], 0.05, 0.02, 12.5, v=1.99)
    assert len(bands["k"]) == 2 and len(bands["omegas"][0]) >= 3
    lo, hi = qmm_py.dispersion_perturbative(math.pi / 12.5, 0.05, 0.02, 12.5, v=1.99)
    assert hi > lo > 0.0
    print(f"bands: first gap {gap['hill']:.8f}, perturbative edges ({lo:.6f}, {hi:.6f})")

    # Period estimator on a synthetic pattern.
    pattern = [math.cos(math.pi * j / 12.5) ** 2 for j in range(200)]
    est = qmm_py.modulation_period(pattern)
    assert abs(est["period"] - 12.5) < 0.1, est

    # Unit derivation from fabrication numbers.
    med = qmm_py.derive_medium(5e-4, 1e-5, 1e-5, 4e-7, 4.0,
                               epsilon_over_omega_j=1.935365590943)
    assert abs(med["v_tilde"] - 0.3853125818) < 1e-9
    assert abs(med["r"] - 0.2267568760) < 1e-9
    print(f"derived medium: v {med['v_tilde']:.6f}, coupling {med['r']:.6f}")

    print("smoke test OK")


if __name__ == "__main__":
    main()
