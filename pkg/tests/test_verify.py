import numpy as np
import pytest

from vortexlab.ring_model import CoefficientTensor, RingConfig
from vortexlab.verify import (
    FrameMatrixInput,
    SingularD,
    check_closure_rearrangement,
    check_dinv_expansion,
    check_inverse_matrix,
    check_leibniz_identity,
    leibniz_residual_from_curve,
    run_all_checks,
)

from oracles import dense_inverse_residual


def make_input(rng, with_r=True):
    k, t, a1, a2, da1, da2 = rng.uniform(-2, 2, 6)
    r1, r2 = rng.uniform(-0.1, 0.1, 2) if with_r else (0.0, 0.0)
    return FrameMatrixInput(
        kappa=k, torsion=t, alpha1=a1, alpha2=a2, dz_alpha1=da1, dz_alpha2=da2, R1=r1, R2=r2
    )


def entries(p):
    a = (1 - p.kappa * p.R1) + (p.R1 * p.dz_alpha1 + p.R2 * p.dz_alpha2)
    b = -p.R2 * p.torsion + (p.R1 * p.alpha1 + p.R2 * p.alpha2) * p.kappa
    c = p.R1 * p.torsion
    return a, b, c


def test_inverse_matrix_worked_example():
    # kappa/torsion/R choices realizing A = 1.1, B = 0.2, C = -0.3 with
    # alpha = (0.4, 0.5), hence D = 1.17
    p = FrameMatrixInput(
        kappa=-10.0 / 9.0, torsion=-3.0, alpha1=0.4, alpha2=0.5,
        dz_alpha1=-1.0 / 9.0, dz_alpha2=0.0, R1=0.1, R2=0.1,
    )
    a, b, c = entries(p)
    assert (a, b, c) == pytest.approx((1.1, 0.2, -0.3), abs=1e-14)
    d = a - b * p.alpha1 - c * p.alpha2
    assert d == pytest.approx(1.17, abs=1e-14)
    assert check_inverse_matrix(p) <= 1e-12
    m = np.array([[a, b, c], [p.alpha1, 1, 0], [p.alpha2, 0, 1]])
    assert dense_inverse_residual(m) <= 1e-12


def test_inverse_matrix_identity_case():
    p = FrameMatrixInput(
        kappa=0.0, torsion=0.0, alpha1=0.0, alpha2=0.0, dz_alpha1=0.0, dz_alpha2=0.0,
        R1=0.0, R2=0.0,
    )
    assert check_inverse_matrix(p) == 0.0


def test_inverse_matrix_random_sweep_matches_dense_solve():
    rng = np.random.default_rng(20)
    checked = 0
    while checked < 1000:
        p = make_input(rng)
        a, b, c = entries(p)
        d = a - b * p.alpha1 - c * p.alpha2
        if abs(d) <= 0.1:
            continue
        res = check_inverse_matrix(p)
        assert res <= 1e-12
        m = np.array([[a, b, c], [p.alpha1, 1, 0], [p.alpha2, 0, 1]])
        assert dense_inverse_residual(m) <= 1e-12
        checked += 1


def test_inverse_matrix_singular_d():
    # A = 1, B = 1, alpha1 = 1 makes D = 0
    p = FrameMatrixInput(
        kappa=0.0, torsion=2.0, alpha1=1.0, alpha2=0.0, dz_alpha1=0.0, dz_alpha2=0.0,
        R1=0.0, R2=-0.5,
    )
    with pytest.raises(SingularD):
        check_inverse_matrix(p)


def test_dinv_expansion_slopes():
    rng = np.random.default_rng(21)
    for _ in range(20):
        p = make_input(rng, with_r=False)
        for direction in ((1.0, 0.0), (0.0, 1.0), (1.0, 1.0)):
            slope = check_dinv_expansion(p, direction)
            assert slope >= 1.9


def test_dinv_expansion_degenerate_base_is_exact():
    p = FrameMatrixInput(
        kappa=0.0, torsion=0.0, alpha1=0.0, alpha2=0.0, dz_alpha1=0.0, dz_alpha2=0.0,
        R1=0.0, R2=0.0,
    )
    assert check_dinv_expansion(p) == float("inf")


def test_leibniz_identity_baseline_collinear():
    cfg = RingConfig()
    c = CoefficientTensor.zeros(cfg.J, cfg.K)
    res = check_leibniz_identity(c, cfg, 0.03, 0.3)
    assert res <= 1e-12


def test_leibniz_identity_random_sweep():
    cfg = RingConfig(J=4, K=6, n_s=16)
    rng = np.random.default_rng(22)
    for _ in range(100):
        flat = rng.uniform(-0.5, 0.5, 4 * 5 * 7)
        c = CoefficientTensor.from_flat(flat, 4, 6)
        t = rng.uniform(cfg.t0, cfg.t1)
        s = rng.uniform(0, 1)
        assert check_leibniz_identity(c, cfg, t, s) < 1e-6


def test_leibniz_unit_speed_curve():
    # on a unit-speed circle the identity collapses to d2/dt2 = d2/dz2
    d1 = lambda t: np.array([-np.sin(t), np.cos(t), 0.0])
    d2 = lambda t: np.array([-np.cos(t), -np.sin(t), 0.0])
    res = leibniz_residual_from_curve(d1, d2, 0.4, h=2e-5)
    assert res <= 1e-10


def test_closure_rearrangement_random_sweep():
    rng = np.random.default_rng(23)
    for _ in range(1000):
        v = rng.uniform(0.5, 3.0)
        v_t, v_tt = rng.uniform(-3, 3, 2)
        kappa = abs(rng.uniform(-2, 2))
        kappa_t, torsion, a1, a2 = rng.uniform(-2, 2, 4)
        a1_tt = (v_tt / v) * a1 + 2 * v * kappa_t + 4 * v_t * kappa
        a2_tt = (v_tt / v) * a2
        res1, res2 = check_closure_rearrangement(
            v, v_t, v_tt, kappa, kappa_t, torsion, a1, a2, a1_tt, a2_tt
        )
        assert res1 <= 1e-12
        assert res2 <= 1e-12


def test_closure_flat_case_reduces_to_ratio_equation():
    res1, res2 = check_closure_rearrangement(
        v=2.0, v_t=0.5, v_tt=1.5, kappa=0.0, kappa_t=0.0, torsion=0.7,
        alpha1=1.1, alpha2=-0.8, alpha1_tt=(1.5 / 2.0) * 1.1, alpha2_tt=(1.5 / 2.0) * -0.8,
    )
    assert res1 == 0.0
    assert res2 == 0.0


def test_closure_torsion_cancels_in_second_identity():
    for torsion in (-5.0, 0.0, 3.3):
        _, res2 = check_closure_rearrangement(
            v=1.7, v_t=0.2, v_tt=-0.9, kappa=1.2, kappa_t=0.4, torsion=torsion,
            alpha1=0.3, alpha2=0.6, alpha1_tt=0.0, alpha2_tt=(-0.9 / 1.7) * 0.6,
        )
        assert res2 <= 1e-15


def test_closure_detects_wrong_dynamics():
    res1, _ = check_closure_rearrangement(
        v=2.0, v_t=1.0, v_tt=1.0, kappa=1.0, kappa_t=1.0, torsion=0.0,
        alpha1=1.0, alpha2=0.0, alpha1_tt=0.0, alpha2_tt=0.0,
    )
    assert res1 > 1e-3  # missing forcing shows up immediately


def test_run_all_checks_passes():
    results = run_all_checks(seed=0)
    assert [r.name for r in results] == [
        "inverse_matrix",
        "dinv_expansion",
        "leibniz_identity",
        "closure_rearrangement",
    ]
    assert all(r.passed for r in results)
