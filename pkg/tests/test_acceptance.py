"""Acceptance suite: every exit criterion at its stated tolerance, one
pass/fail line printed per criterion.

Criteria 6 and 7 run the full-scale simulations (about four minutes
combined); criterion 10 invokes the CLI twice at the reduced scale to
check byte determinism of the reports.
"""

import subprocess
import sys
import time

import numpy as np
from scipy.linalg import expm

from treverse import kubo as kb
from treverse import spin as sp
from treverse import verify as vf

SEED = 42


def report(number, name, passed, detail=""):
    status = "PASS" if passed else "FAIL"
    print(f"[{status}] criterion {number}: {name} {detail}".rstrip())
    assert passed, f"criterion {number} ({name}) failed: {detail}"


def test_criterion_1_counting():
    start = time.perf_counter()
    record = vf.check_counting()
    elapsed = time.perf_counter() - start
    report(1, "counting reproduction", record["passed"] and elapsed < 1.0,
           f"dim3={record['dim3']} runtime={elapsed:.2f}s")


def test_criterion_2_structural_invariants():
    start = time.perf_counter()
    record = vf.check_structural(SEED)
    elapsed = time.perf_counter() - start
    report(2, "structural invariants", record["passed"] and elapsed < 10.0,
           f"antisymplectic={record['antisymplectic_residual']:.2e} "
           f"roundtrip={record['involution_roundtrip']:.1e} runtime={elapsed:.1f}s")


def test_criterion_3_compatibility_equivalence():
    record = vf.check_compat_equivalence(SEED)
    report(3, "A/B compatibility equivalence", record["passed"],
           f"curl={record['worst_compatible_curl']:.2e} "
           f"theta-grid={record['continuous_family_worst']:.2e}")


def test_criterion_4_spin_lift():
    record = vf.check_spin_lift(SEED)
    report(4, "spin lift and sign table", record["passed"],
           f"worst-coupling={record['worst_coupling_residual']:.2e} "
           f"pairs={record['lifted_pairs']}")


def _quadrature_oracle(system, beta, phi, psi, t, npts=128):
    h = system.hamiltonian()
    hs = h - np.linalg.norm(h, 2) * np.eye(h.shape[0])
    x, w = np.polynomial.legendre.leggauss(npts)
    lam = 0.5 * beta * (x + 1.0)
    weights = 0.5 * beta * w
    z = np.trace(expm(-beta * hs)).real
    u = expm(1j * h * t)
    psit = u @ psi @ u.conj().T
    total = sum(ww * np.trace(expm(-(beta - l) * hs) @ phi @ expm(-l * hs) @ psit)
                for l, ww in zip(lam, weights))
    return (total / (beta * z)).real


def test_criterion_5_kubo_correlator():
    start = time.perf_counter()
    rng = np.random.default_rng(SEED)
    worst_imag = 0.0
    worst_quad = 0.0
    for k in range(200):
        n = int(rng.integers(1, 4))
        system = kb.SpinSystem(rng.uniform(-1, 1, (n, 3)), rng.uniform(0.5, 1.5, n),
                               {(0, 1): float(rng.uniform(-0.5, 0.5))} if n > 1 else {})
        dim = system.dim
        raw = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        phi = kb.Observable((raw + raw.conj().T) / 2)
        raw = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        psi = kb.Observable((raw + raw.conj().T) / 2)
        beta = float(rng.uniform(0.2, 2.0))
        t = float(rng.uniform(-2.0, 2.0))
        value = kb.canonical_correlator(system, beta, phi, psi, t)
        worst_imag = max(worst_imag, value.imag_residual)
        if k < 50:        # quadrature oracle on the first fifty systems
            oracle = _quadrature_oracle(system, beta, phi.matrix, psi.matrix, t)
            worst_quad = max(worst_quad, abs(value.value - oracle))
    system = vf.documented_two_spin_system()
    tr = kb.SpinTimeReversal((sp.pauli("x"), sp.pauli("x")))
    phi = kb.Observable(kb.site_operator(sp.pauli("x"), 0, 2))
    psi = kb.Observable(kb.site_operator(sp.pauli("x"), 1, 2))
    symmetry = kb.verify_kubo_symmetry(system, tr, phi, psi,
                                       np.linspace(0.0, 10.0, 16),
                                       beta=1.3, tol=1e-8)
    elapsed = time.perf_counter() - start
    passed = (worst_imag <= 1e-10 and worst_quad <= 1e-8
              and symmetry.passed and elapsed < 30.0)
    report(5, "Kubo correlator", passed,
           f"imag={worst_imag:.1e} quad={worst_quad:.1e} "
           f"symmetry={symmetry.max_deviation:.1e} runtime={elapsed:.1f}s")


def test_criterion_6_md_oracle():
    record = vf.check_md_oracle(SEED, "full")
    report(6, "free-particle correlator oracle", record["passed"],
           f"sigma_xx={record['sigma_xx']:.2f} sigma_xy={record['sigma_xy']:.2f} "
           f"({record['trajectories']} trajectories, {record['lags']} lags)")


def test_criterion_7_diffusion_antisymmetry():
    start = time.perf_counter()
    record = vf.check_diffusion_antisymmetry(SEED, "full")
    elapsed = time.perf_counter() - start
    lines = []
    for name in ("constant-z", "axial-md"):
        d = record[name]
        lines.append(f"{name}: sum={d['sum']:+.4f}+-{d['se']:.4f} ratio={d['ratio']:.3f}")
    report(7, "diffusion tensor antisymmetry", record["passed"] and elapsed < 300.0,
           "; ".join(lines) + f" runtime={elapsed:.0f}s")


def test_criterion_8_conjugacy():
    record = vf.check_conjugacy(SEED)
    ratios = ", ".join(f"{r:.0f}" for r in record["halving_ratios"])
    report(8, "trajectory conjugacy", record["passed"],
           f"free={record['free_deviation']:.1e} halving-ratios=[{ratios}]")


def test_criterion_9_angular_momentum():
    record = vf.check_angular_momentum(SEED)
    report(9, "angular momentum reversal", record["passed"],
           f"catalog-residual={record['catalog_worst_residual']:.1e} "
           f"counterexample={record['cross_swap_counterexample']}")


def test_criterion_10_determinism(tmp_path):
    outputs = []
    for run_dir in ("a", "b"):
        out = tmp_path / run_dir
        proc = subprocess.run(
            [sys.executable, "-m", "treverse.cli", "verify", "--seed", "42",
             "--scale", "quick", "--out", str(out)],
            capture_output=True, text=False)
        assert proc.returncode in (0, 2)
        outputs.append((proc.stdout, (out / "verify-report.json").read_bytes()))
    passed = outputs[0] == outputs[1]
    all_green = outputs[0][0].count(b"[FAIL]") == 0
    report(10, "verify determinism", passed and all_green,
           f"stdout+report byte-identical={passed} quick-suite-green={all_green}")
