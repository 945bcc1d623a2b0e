import numpy as np
import pytest

from vortexlab.ring_model import CoefficientTensor, RingConfig, deformation_eval
from vortexlab.spectral import ModeSpectrum, dominant_mode_count, mode_energies

from oracles import signal_energy_quadrature

S_DENSE = np.arange(4096) / 4096.0


@pytest.fixture
def cfg():
    return RingConfig(J=4, K=6)


def test_single_cosine_mode_carries_all_energy():
    cfg = RingConfig(J=20, K=10)
    arr = np.zeros((2, 2, 21, 11))
    arr[0, 1, 0, 1] = 7.0
    c = CoefficientTensor(arr)
    spec = mode_energies(c, cfg.t1, cfg, component="both")
    assert spec.energies[1] > 0.0
    others = np.delete(spec.energies, 1)
    assert np.all(others == 0.0)
    assert dominant_mode_count(spec) == 1


def test_zero_tensor_empty_spectrum(cfg):
    c = CoefficientTensor.zeros(cfg.J, cfg.K)
    spec = mode_energies(c, cfg.t1, cfg)
    assert np.all(spec.energies == 0.0)
    assert dominant_mode_count(spec) == 0
    assert spec.dominant == frozenset()


def test_all_equal_energies_all_dominant():
    spec = ModeSpectrum(energies=np.full(7, 0.3), dominant=frozenset(range(7)))
    assert dominant_mode_count(spec) == 7
    # and via the real computation: equal cosine coefficients across k
    cfg = RingConfig(J=0, K=6)
    arr = np.zeros((2, 2, 1, 7))
    arr[0, 1, 0, :] = 1.0
    c = CoefficientTensor(arr)
    spec = mode_energies(c, cfg.t1, cfg, component="gamma1")
    # k = 0 carries twice the weight of k >= 1 under the half-weight rule
    assert spec.energies[0] == pytest.approx(2 * spec.energies[1], rel=1e-12)
    assert dominant_mode_count(spec) == 7


def test_parseval_against_quadrature(cfg):
    rng = np.random.default_rng(17)
    for _ in range(100):
        flat = rng.uniform(-30, 30, 4 * (cfg.J + 1) * (cfg.K + 1))
        c = CoefficientTensor.from_flat(flat, cfg.J, cfg.K)
        t = rng.uniform(cfg.t0, cfg.t1)
        spec = mode_energies(c, t, cfg, component="both")
        d = deformation_eval(t, S_DENSE, c, cfg)
        direct = signal_energy_quadrature(d.g1) + signal_energy_quadrature(d.g2)
        assert abs(float(spec.energies.sum()) - direct) <= 1e-8 * max(direct, 1.0)


def test_component_selector(cfg):
    rng = np.random.default_rng(18)
    flat = rng.uniform(-5, 5, 4 * (cfg.J + 1) * (cfg.K + 1))
    c = CoefficientTensor.from_flat(flat, cfg.J, cfg.K)
    both = mode_energies(c, cfg.t1, cfg, "both").energies
    g1 = mode_energies(c, cfg.t1, cfg, "gamma1").energies
    g2 = mode_energies(c, cfg.t1, cfg, "gamma2").energies
    np.testing.assert_allclose(both, g1 + g2, rtol=1e-14)
    with pytest.raises(ValueError):
        mode_energies(c, cfg.t1, cfg, "gamma3")


def test_translation_invariance_of_energies(cfg):
    # rotating the ring phase mixes sine/cosine within a mode, energy is kept
    rng = np.random.default_rng(19)
    flat = rng.uniform(-3, 3, 4 * (cfg.J + 1) * (cfg.K + 1))
    c = CoefficientTensor.from_flat(flat, cfg.J, cfg.K)
    shift = 0.21
    k = np.arange(cfg.K + 1)
    rotated = np.empty_like(c.c)
    cos_r, sin_r = np.cos(2 * np.pi * k * shift), np.sin(2 * np.pi * k * shift)
    # per-mode rotation realizing gamma(s - shift)
    rotated[:, 0] = c.c[:, 0] * cos_r + c.c[:, 1] * sin_r
    rotated[:, 1] = c.c[:, 1] * cos_r - c.c[:, 0] * sin_r
    spec_a = mode_energies(c, cfg.t1, cfg, "both")
    spec_b = mode_energies(CoefficientTensor(rotated), cfg.t1, cfg, "both")
    np.testing.assert_allclose(spec_a.energies, spec_b.energies, rtol=1e-12, atol=1e-16)
    # sanity: the rotation really is an s-translation of the signal
    d_a = deformation_eval(cfg.t1, S_DENSE - shift, c, cfg)
    d_b = deformation_eval(cfg.t1, S_DENSE, CoefficientTensor(rotated), cfg)
    np.testing.assert_allclose(d_a.g1, d_b.g1, atol=1e-12)


def test_dominance_threshold(cfg):
    arr = np.zeros((2, 2, cfg.J + 1, cfg.K + 1))
    arr[0, 1, 0, 1] = 10.0
    arr[0, 1, 0, 2] = 10.0 * np.sqrt(0.05)  # 5% of peak energy: below 10% cut
    arr[0, 1, 0, 3] = 10.0 * np.sqrt(0.2)  # 20%: above
    c = CoefficientTensor(arr)
    spec = mode_energies(c, cfg.t1, cfg, "gamma1")
    assert spec.dominant == frozenset({1, 3})
    assert dominant_mode_count(spec) == 2
