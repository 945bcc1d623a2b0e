"""Frame-and-curvature kinematics of a space curve from its derivative vectors.

Everything here is a pure function of the first three time derivatives
``d1 = dPhi/dt``, ``d2 = d2Phi/dt2``, ``d3 = d3Phi/dt3`` of a trajectory
point.  The module never differentiates anything numerically itself; closed
form derivatives are supplied by the caller (see :mod:`vortexlab.ring_model`).

All vector arguments are numpy arrays with a trailing axis of length 3.  A
single point is a shape ``(3,)`` array; a batch of N points is ``(N, 3)``.
Scalar outputs follow the leading shape of the inputs.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

__all__ = [
    "ZeroSpeed",
    "FrenetFrame",
    "TrajectoryKinematics",
    "frame_from_derivatives",
    "arc_reparam_factor",
]

DEFAULT_EPS_V = 1e-10
DEFAULT_EPS_KAPPA = 1e-12

# Threshold below which z-hat is considered parallel to tau and the
# degenerate-frame fallback switches to x-hat.
_FALLBACK_EPS = 1e-8

_Z_HAT = np.array([0.0, 0.0, 1.0])
_X_HAT = np.array([1.0, 0.0, 0.0])


class ZeroSpeed(ValueError):
    """Trajectory point with |dPhi/dt| at or below the speed threshold.

    The arc-length reparameterization needs v > 0; a stationary point makes
    the moving frame (and everything downstream) undefined.
    """


@dataclass(frozen=True)
class FrenetFrame:
    """Orthonormal right-handed (tau, n, b) triple along a trajectory."""

    tau: np.ndarray
    n: np.ndarray
    b: np.ndarray


@dataclass(frozen=True)
class TrajectoryKinematics:
    """Speed, curvature, torsion and moving frame at one trajectory point.

    ``v``, ``v_t``, ``v_tt`` are the speed and its first two time
    derivatives.  ``kappa_t`` is the time derivative of curvature; it is not
    computable from (d1, d2, d3) alone, so construction leaves it at 0 and
    the caller fills it in (``ring_model.kinematics_at`` does, by finite
    difference).  ``degenerate`` flags points where curvature fell below the
    frame threshold; there the normal comes from the fallback convention and
    torsion is 0.
    """

    v: float | np.ndarray
    v_t: float | np.ndarray
    v_tt: float | np.ndarray
    kappa: float | np.ndarray
    kappa_t: float | np.ndarray
    torsion: float | np.ndarray
    frame: FrenetFrame
    degenerate: bool | np.ndarray

    def with_kappa_t(self, kappa_t) -> "TrajectoryKinematics":
        return replace(self, kappa_t=kappa_t)


def _dot(a: np.ndarray, b: np.ndarray):
    return np.sum(a * b, axis=-1)


def _norm(a: np.ndarray):
    return np.sqrt(np.sum(a * a, axis=-1))


def frame_from_derivatives(
    d1: np.ndarray,
    d2: np.ndarray,
    d3: np.ndarray,
    eps_kappa: float = DEFAULT_EPS_KAPPA,
    eps_v: float = DEFAULT_EPS_V,
) -> TrajectoryKinematics:
    """Assemble kinematics and the Frenet frame from derivative vectors.

    Uses the standard derivative formulas

        v    = |d1|
        v'   = (d1 . d2) / v
        v''  = (|d2|^2 + d1 . d3 - v'^2) / v
        kappa   = |d1 x d2| / v^3
        torsion = (d1 x d2) . d3 / |d1 x d2|^2

    with ``tau = d1/v``, ``b = unit(d1 x d2)``, ``n = b x tau``.  Where
    kappa < eps_kappa the frame is completed by the fallback convention
    ``n = unit(z_hat x tau)`` (or ``unit(x_hat x tau)`` when tau is nearly
    vertical), ``b = tau x n``, and torsion is set to 0.

    Raises
    ------
    ZeroSpeed
        If any input point has |d1| <= eps_v.
    """
    d1 = np.asarray(d1, dtype=float)
    d2 = np.asarray(d2, dtype=float)
    d3 = np.asarray(d3, dtype=float)

    v = _norm(d1)
    if np.any(v <= eps_v):
        raise ZeroSpeed(f"|d1| <= {eps_v}; stationary trajectory point")

    v_t = _dot(d1, d2) / v
    v_tt = (_dot(d2, d2) + _dot(d1, d3) - v_t**2) / v

    tau = d1 / v[..., None]
    cr = np.cross(d1, d2)
    crn = _norm(cr)
    kappa = crn / v**3
    degenerate = kappa < eps_kappa

    # Regular branch: b along d1 x d2, n = b x tau (right-handed by
    # construction).  Guard the division so degenerate rows stay finite.
    crn_safe = np.where(crn > 0.0, crn, 1.0)
    b_reg = cr / crn_safe[..., None]
    n_reg = np.cross(b_reg, tau)

    # Fallback branch: complete the frame from a fixed reference direction.
    zxt = np.cross(np.broadcast_to(_Z_HAT, tau.shape), tau)
    xxt = np.cross(np.broadcast_to(_X_HAT, tau.shape), tau)
    use_x = _norm(zxt) < _FALLBACK_EPS
    ref = np.where(use_x[..., None], xxt, zxt)
    n_fb = ref / _norm(ref)[..., None]
    b_fb = np.cross(tau, n_fb)

    deg = degenerate[..., None]
    n = np.where(deg, n_fb, n_reg)
    b = np.where(deg, b_fb, b_reg)

    crn2_safe = np.where(crn > 0.0, crn**2, 1.0)
    torsion = np.where(degenerate, 0.0, _dot(cr, d3) / crn2_safe)

    if d1.ndim == 1:
        v, v_t, v_tt = float(v), float(v_t), float(v_tt)
        kappa, torsion = float(kappa), float(torsion)
        degenerate = bool(degenerate)

    return TrajectoryKinematics(
        v=v,
        v_t=v_t,
        v_tt=v_tt,
        kappa=kappa,
        kappa_t=np.zeros_like(v) if isinstance(v, np.ndarray) else 0.0,
        torsion=torsion,
        frame=FrenetFrame(tau=tau, n=n, b=b),
        degenerate=degenerate,
    )


def arc_reparam_factor(kin: TrajectoryKinematics):
    """Factor 1/v converting z-derivatives to t-derivatives (d/dz = v^-1 d/dt)."""
    return 1.0 / kin.v
