"""Acceptance suite: one test per criterion, one printed pass/fail line each.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the report lines.

Criterion 5's baseline-exceedance clause is implemented exactly as stated
and currently fails: the desk-scale search budget cannot reach the winning
region of the coefficient box (see the README's acceptance-status note);
test_deformation_can_beat_baseline shows the region exists.
"""

import json
import signal
import subprocess
import sys
import time

import numpy as np
import pytest

import vortexlab as vl
from vortexlab.cli import main
from vortexlab.madc import madc
from vortexlab.optimizer import StudyConfig, SearchSpace, run_study, sample_qmc
from vortexlab.ring_model import CoefficientTensor, RingConfig, deformation_eval
from vortexlab.spectral import dominant_mode_count, mode_energies
from vortexlab.wave_dynamics import axis_field, integrate_wave_system

from oracles import fd_curvature_torsion, signal_energy_quadrature

DESK = RingConfig(J=4, K=6, n_s=64, n_time=32)
DESK_STUDY = StudyConfig(n_qmc=200, n_refine=20, seed=0)


def report(criterion: str, ok: bool, detail: str) -> bool:
    print(f"[acceptance {criterion}] {'PASS' if ok else 'FAIL'}: {detail}", flush=True)
    return ok


@pytest.fixture(scope="module")
def desk_runs(tmp_path_factory):
    """One full desk study, a repeat, and a kill-at-100-then-resume run."""
    root = tmp_path_factory.mktemp("desk")
    t0 = time.perf_counter()
    result = run_study(DESK_STUDY, DESK, root / "a.jsonl")
    elapsed = time.perf_counter() - t0
    run_study(DESK_STUDY, DESK, root / "b.jsonl")
    run_study(DESK_STUDY, DESK, root / "c.jsonl", limit=100)
    assert sum(1 for _ in open(root / "c.jsonl")) == 100
    run_study(DESK_STUDY, DESK, root / "c.jsonl")
    return {"root": root, "result": result, "elapsed": elapsed}


def test_criterion_1_verification_suite():
    t0 = time.perf_counter()
    code = main(["verify"])
    elapsed = time.perf_counter() - t0
    checks = vl.run_all_checks(seed=0)
    n_pass = sum(r.passed for r in checks)
    ok = code == 0 and elapsed < 10.0 and n_pass == 4
    report("1 derivation suite", ok, f"exit {code}, {n_pass}/4 checks, {elapsed:.2f}s")
    assert code == 0
    assert elapsed < 10.0


def test_criterion_2_wave_equation_oracle():
    t0, t1 = 0.3, 0.3 + 1.0 / 48.0

    def coeff_fn(t):
        return np.array([-np.sin(t) / (2.0 + np.sin(t))]), np.array([0.0])

    def terminal_error(n_steps):
        y0 = np.array([[0.0], [0.0], [2.0 + np.sin(t0)], [np.cos(t0)]])
        states = integrate_wave_system(coeff_fn, t0, t1, n_steps, y0)
        exact = 2.0 + np.sin(t1)
        return abs(states[-1][2, 0] - exact) / exact

    err32 = terminal_error(32)
    # the stated 32-step run sits at the float64 roundoff floor, so the
    # order-4 halving factor is measured where truncation still dominates
    err_coarse, err_half = terminal_error(2), terminal_error(4)
    ratio = err_coarse / err_half
    ok = err32 <= 1e-8 and ratio >= 12.0
    report(
        "2 wave-equation oracle",
        ok,
        f"32-step rel err {err32:.2e} (<= 1e-8), halving 2->4 steps improves {ratio:.1f}x (>= 12)",
    )
    assert err32 <= 1e-8
    assert ratio >= 12.0


def test_criterion_3_geometry_oracle():
    def helix(u):
        return np.array([np.cos(u), np.sin(u), u])

    d1 = np.array([0.0, 1.0, 1.0])
    d2 = np.array([-1.0, 0.0, 0.0])
    d3 = np.array([0.0, -1.0, 0.0])
    kin = vl.frame_from_derivatives(d1, d2, d3)
    closed_ok = abs(kin.kappa - 0.5) <= 1e-8 and abs(kin.torsion - 0.5) <= 1e-8
    kappa_fd, torsion_fd = fd_curvature_torsion(helix, 0.0)
    fd_ok = abs(kin.kappa - kappa_fd) <= 1e-6 and abs(kin.torsion - torsion_fd) <= 1e-6
    report(
        "3 geometry oracle",
        closed_ok and fd_ok,
        f"helix kappa {kin.kappa:.12f} torsion {kin.torsion:.12f} vs 1/2; "
        f"FD oracle gaps {abs(kin.kappa - kappa_fd):.2e}, {abs(kin.torsion - torsion_fd):.2e}",
    )
    assert closed_ok
    assert fd_ok


def test_criterion_4_alignment_construction():
    worst_corr = 0.0
    worst_rate = 0.0
    rng = np.random.default_rng(0)
    flat = rng.uniform(-2.0, 2.0, 4 * (DESK.J + 1) * (DESK.K + 1))
    for tensor in (CoefficientTensor.zeros(DESK.J, DESK.K),
                   CoefficientTensor.from_flat(flat, DESK.J, DESK.K)):
        field = axis_field(tensor, DESK)
        assert field.feasible.any()
        corr0 = field.corr[0, field.feasible]
        worst_corr = max(worst_corr, float(np.max(np.abs(corr0 - 1.0))))
        rate = vl.initial_corr_rate(tensor, DESK)
        worst_rate = max(worst_rate, float(np.nanmax(np.abs(rate))))
    ok = worst_corr <= 1e-12 and worst_rate < 1e-6
    report(
        "4 alignment construction",
        ok,
        f"max |corr(t0) - 1| = {worst_corr:.2e} (<= 1e-12), max |d corr/dt| = {worst_rate:.2e} (< 1e-6)",
    )
    assert worst_corr <= 1e-12
    assert worst_rate < 1e-6


def test_criterion_5_desk_scale_experiment(desk_runs):
    baseline = madc(axis_field(CoefficientTensor.zeros(DESK.J, DESK.K), DESK), DESK).score
    result = desk_runs["result"]
    scores = [rec.score for rec in result.history]
    median10 = float(np.median(scores[:10]))
    best = result.best.score
    runtime_ok = desk_runs["elapsed"] < 300.0
    beats_median = best > median10
    beats_baseline = best > baseline
    report(
        "5 desk-scale experiment",
        beats_baseline and beats_median and runtime_ok,
        f"best {best:.6f}, baseline {baseline:.6f}, median(first 10) {median10:.6f}, "
        f"runtime {desk_runs['elapsed']:.0f}s (< 300s)",
    )
    assert runtime_ok
    assert beats_median
    # Fails as of v0.1: the feasibility fraction is locked at its undeformed
    # value for every in-bounds trial the budgeted search reaches, and the
    # undeformed score is already within 2e-6 of that ceiling (README has
    # the full analysis; the witness test below shows winning deformations
    # exist in-bounds).
    assert beats_baseline


def test_deformation_can_beat_baseline():
    """Witness for the claim behind criterion 5: wavy deformation wins.

    A coefficient tensor whose first-order-in-time row interferes
    constructively near s = 5/8 drives the initial radial velocity negative
    there, unlocking alignment on columns the undeformed ring cannot align,
    and scores strictly above the baseline.
    """
    baseline = madc(axis_field(CoefficientTensor.zeros(DESK.J, DESK.K), DESK), DESK).score
    arr = np.zeros((2, 2, DESK.J + 1, DESK.K + 1))
    s_target = 5.0 / 8.0
    for k in range(DESK.K + 1):
        sin_k, cos_k = np.sin(2 * np.pi * k * s_target), np.cos(2 * np.pi * k * s_target)
        arr[0, 0, 0, k] = -DESK.c_max * np.sign(sin_k) if sin_k != 0.0 else 0.0
        arr[0, 1, 0, k] = -DESK.c_max * np.sign(cos_k)
    witness = CoefficientTensor(arr)
    score = madc(axis_field(witness, DESK), DESK).score
    report(
        "5w deformation witness",
        score > baseline,
        f"witness score {score:.6f} > baseline {baseline:.6f}",
    )
    assert score > baseline


def test_criterion_6_determinism_and_resume(desk_runs):
    root = desk_runs["root"]
    same = (root / "a.jsonl").read_bytes() == (root / "b.jsonl").read_bytes()
    resumed = (root / "c.jsonl").read_bytes() == (root / "a.jsonl").read_bytes()
    report(
        "6 determinism",
        same and resumed,
        f"repeat identical: {same}; kill-at-100 resume identical: {resumed}",
    )
    assert same
    assert resumed


def test_criterion_7_spectral_consistency(desk_runs):
    cfg = RingConfig()  # full-size J, K
    rng = np.random.default_rng(1)
    s_dense = np.arange(4096) / 4096.0
    worst = 0.0
    for _ in range(100):
        flat = rng.uniform(-30, 30, 4 * (cfg.J + 1) * (cfg.K + 1))
        c = CoefficientTensor.from_flat(flat, cfg.J, cfg.K)
        t = rng.uniform(cfg.t0, cfg.t1)
        spec = mode_energies(c, t, cfg, "both")
        d = deformation_eval(t, s_dense, c, cfg)
        direct = signal_energy_quadrature(d.g1) + signal_energy_quadrature(d.g2)
        worst = max(worst, abs(float(spec.energies.sum()) - direct) / max(direct, 1.0))
    arr = np.zeros((2, 2, cfg.J + 1, cfg.K + 1))
    arr[1, 0, 3, 4] = 12.5
    single = dominant_mode_count(mode_energies(CoefficientTensor(arr), cfg.t1, cfg))
    # reported, not asserted: dominant-mode count of the desk-scale optimum
    best = desk_runs["result"].best
    best_tensor = CoefficientTensor.from_flat(np.array(best.coeffs), DESK.J, DESK.K)
    desk_count = dominant_mode_count(mode_energies(best_tensor, DESK.t1, DESK))
    ok = worst <= 1e-8 and single == 1
    report(
        "7 spectral consistency",
        ok,
        f"worst Parseval gap {worst:.2e} (<= 1e-8); single-mode count {single} (== 1); "
        f"desk-scale optimum dominant modes: {desk_count} (reported only)",
    )
    assert worst <= 1e-8
    assert single == 1


def test_criterion_8_full_scale_smoke(tmp_path):
    # the full-scale configuration is accepted outright
    study = StudyConfig(n_qmc=10000, n_refine=50, seed=5)
    space = SearchSpace(J=20, K=10, c_max=30.0)
    assert space.dim == 924
    assert len(sample_qmc(space, 2, seed=5)) == 2

    # and actually runs: launch the full study, wait for >= 50 committed
    # trials, then kill it (everything stays resumable)
    log = tmp_path / "full_scale.jsonl"
    proc = subprocess.Popen(
        [
            sys.executable,
            "-m",
            "vortexlab.cli",
            "optimize",
            "--study",
            str(log),
            "--seed",
            "5",
        ],
        stdout=subprocess.DEVNULL,
        stderr=subprocess.DEVNULL,
    )
    deadline = time.time() + 240.0
    lines = 0
    try:
        while time.time() < deadline:
            if log.exists():
                lines = sum(1 for line in open(log) if line.endswith("\n"))
                if lines >= 50:
                    break
            time.sleep(0.5)
    finally:
        proc.send_signal(signal.SIGKILL)
        proc.wait()
    ok = lines >= 50
    report("8 full-scale smoke", ok, f"{lines} full-scale trials committed within budget")
    assert ok
    records = [json.loads(line) for line in open(log) if line.endswith("\n")]
    assert [rec["trial_id"] for rec in records] == list(range(len(records)))
    assert all(len(rec["coeffs"]) == 924 for rec in records)
