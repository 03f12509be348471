"""Extended state observer, control law and disturbance ground truth.

The observer estimates, for follower i, the relative velocity to its
predecessor (z1), the acceleration difference (z2) and the lumped unmodeled
term (z3) from the measured relative velocity only. Its model term always uses
the nominal lag ``tau``, even when the true plant pole differs.
"""

from __future__ import annotations

from typing import NamedTuple, Optional

from .config import ControllerGains, EsoGains


class EsoState(NamedTuple):
    z1: float
    z2: float
    z3: float


class ObserverTruth(NamedTuple):
    v_d: float
    a_d: float
    q: float
    w: float


def bandwidth_gains(omega_o: float) -> EsoGains:
    """Observer gains placing all three observer poles at ``-omega_o``."""
    if not omega_o > 0:
        raise ValueError("omega_o must be positive")
    return EsoGains.from_bandwidth(omega_o)


def eso_derivative(z, vd_meas, a_i, u_i, tau, gains: EsoGains) -> EsoState:
    z1, z2, z3 = z
    innov = vd_meas - z1
    return EsoState(
        z2 + gains.beta1 * innov,
        z3 + gains.beta2 * innov + a_i / tau - u_i / tau,
        gains.beta3 * innov,
    )


def control_output(e_i, v_d, a_i, z2, gains: ControllerGains, h):
    """Spacing feedback plus estimated-predecessor-acceleration feedforward."""
    return gains.kp * e_i + gains.kv * (v_d - h * a_i) + gains.ka * (z2 + a_i)


def disturbance_truth(a_prev, u_prev, tau, *, eps_prev: Optional[float] = None,
                      eps_i: Optional[float] = None, a_i=0.0, u_i=0.0):
    """True value of the extended state the observer tracks.

    Nominal plant: ``(u_prev - a_prev) / tau``. If the plant errors are given,
    returns ``b_prev (u_prev - a_prev) + eps_i (a_i - u_i)`` with
    ``b_prev = 1/tau + eps_prev``.
    """
    if not tau > 0:
        raise ValueError("tau must be positive")
    if eps_prev is None and eps_i is None:
        return (u_prev - a_prev) / tau
    b_prev = 1.0 / tau + (eps_prev or 0.0)
    eps_i = eps_i or 0.0
    return b_prev * (u_prev - a_prev) + eps_i * (a_i - u_i)


def disturbance_rate_truth(a_prev, u_prev, du_prev, tau, *, eps_prev=0.0, eps_i=0.0,
                           a_i=0.0, u_i=0.0, du_i=0.0):
    """Time derivative of :func:`disturbance_truth` along the plant dynamics."""
    b_prev = 1.0 / tau + eps_prev
    b_i = 1.0 / tau + eps_i
    da_prev = b_prev * (u_prev - a_prev)
    da_i = b_i * (u_i - a_i)
    return b_prev * (du_prev - da_prev) + eps_i * (da_i - du_i)
