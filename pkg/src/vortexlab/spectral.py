"""Fourier mode-energy analysis of the deformation fields.

At a fixed time the deformation gamma(t, .) is a trigonometric polynomial
with sine/cosine coefficients a_k, b_k (the (K+1)-normalized polynomial sums
of the coefficient tensor).  Mode energies use the convention

    E_0 = b_0**2          (the k=0 sine basis function is identically zero)
    E_k = (a_k**2 + b_k**2) / 2     for k >= 1

so that sum_k E_k equals the s-mean of gamma^2 (Parseval for the real
trigonometric basis).  For the combined selector the gamma1 and gamma2
energies add per mode.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .ring_model import CoefficientTensor, RingConfig, _time_power_table

__all__ = ["ModeSpectrum", "mode_energies", "dominant_mode_count", "write_spectrum_csv"]

DOMINANCE_THRESHOLD = 0.1

_COMPONENTS = ("gamma1", "gamma2", "both")


@dataclass(frozen=True)
class ModeSpectrum:
    """Per-mode energies and the set of dominant modes.

    ``dominant`` holds the k with E_k >= threshold * max(E); empty when the
    spectrum vanishes.
    """

    energies: np.ndarray
    dominant: frozenset
    threshold: float = DOMINANCE_THRESHOLD


def mode_energies(
    c: CoefficientTensor,
    t: float,
    cfg: RingConfig,
    component: str = "both",
    threshold: float = DOMINANCE_THRESHOLD,
) -> ModeSpectrum:
    """Mode energies of the deformation at time t.

    ``component`` selects "gamma1", "gamma2" or "both" (energies added).
    """
    if component not in _COMPONENTS:
        raise ValueError(f"component must be one of {_COMPONENTS}, got {component!r}")

    # amp[l, m, k]: time-collapsed coefficient of the trig basis function
    pows = _time_power_table(t - cfg.t0, c.J)[0]
    amp = np.einsum("j,lmjk->lmk", pows, c.c) / (c.K + 1.0)

    weights = np.full(c.K + 1, 0.5)
    weights[0] = 1.0
    per_component = weights * (amp[:, 1, :] ** 2)  # cosine family
    per_component[:, 1:] += 0.5 * amp[:, 0, 1:] ** 2  # sine family, k >= 1

    if component == "gamma1":
        energies = per_component[0]
    elif component == "gamma2":
        energies = per_component[1]
    else:
        energies = per_component.sum(axis=0)

    peak = energies.max()
    if peak > 0.0:
        dominant = frozenset(int(k) for k in np.flatnonzero(energies >= threshold * peak))
    else:
        dominant = frozenset()
    return ModeSpectrum(energies=energies, dominant=dominant, threshold=threshold)


def dominant_mode_count(spectrum: ModeSpectrum) -> int:
    """Number of modes carrying at least the threshold share of the peak."""
    return len(spectrum.dominant)


def write_spectrum_csv(spectrum: ModeSpectrum, path) -> None:
    """Columns k, E_k, dominant(0/1)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["k", "E_k", "dominant"])
        for k, e in enumerate(spectrum.energies):
            writer.writerow([k, repr(float(e)), int(k in spectrum.dominant)])
