"""Linear state-space form of the physical platoon closed loop.

State ordering (n = 3(N+1) + 3N)::

    [p_0..p_N, v_0..v_N, a_0..a_N, z1_1..z1_N, z2_1..z2_N, z3_1..z3_N]

The leader's command ``u_0`` is the only exogenous input. This realization is
built straight from the vehicle, observer and control equations and is the
ground truth against which the block matrices and transfer functions are
checked.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class StateIndex:
    N: int

    @property
    def n(self):
        return 6 * self.N + 3

    def p(self, i):
        return i

    def v(self, i):
        return self.N + 1 + i

    def a(self, i):
        return 2 * (self.N + 1) + i

    def z(self, k, i):
        """Observer state ``k`` in {1, 2, 3} of follower ``i`` in 1..N."""
        return 3 * (self.N + 1) + (k - 1) * self.N + (i - 1)


def _spacing_row(idx: StateIndex, i, h):
    row = np.zeros(idx.n)
    row[idx.p(i - 1)] += 1.0
    row[idx.p(i)] -= 1.0
    row[idx.v(i)] -= h
    return row


def _reldiff_row(idx, i, which):
    row = np.zeros(idx.n)
    get = idx.v if which == "v" else idx.a
    row[get(i - 1)] += 1.0
    row[get(i)] -= 1.0
    return row


@dataclass(frozen=True)
class PlatoonLTI:
    """``x' = A x + b_u0 u_0 + c`` for the continuous-time closed loop."""

    A: np.ndarray
    b_u0: np.ndarray
    c: np.ndarray
    index: StateIndex
    h: float
    r: float

    def spacing_output(self, i):
        """Row ``C`` and offset ``d`` with ``e_i = C x + d``."""
        return _spacing_row(self.index, i, self.h), -self.r

    def velocity_output(self, i):
        row = np.zeros(self.index.n)
        row[self.index.v(i)] = 1.0
        return row


def control_rows(idx: StateIndex, kp, kv, ka, h):
    """Rows ``K_i`` with ``u_i = K_i x - kp r`` for each follower (index 0 unused)."""
    rows = np.zeros((idx.N + 1, idx.n))
    for i in range(1, idx.N + 1):
        row = kp * _spacing_row(idx, i, h) + kv * _reldiff_row(idx, i, "v")
        row[idx.a(i)] += -kv * h + ka
        row[idx.z(2, i)] += ka
        rows[i] = row
    return rows


def closed_loop(gains, eso, h, tau, epsilons, r=0.0) -> PlatoonLTI:
    N = len(epsilons) - 1
    idx = StateIndex(N)
    n = idx.n
    b = [1.0 / tau + e for e in epsilons]
    kp, kv, ka = gains.kp, gains.kv, gains.ka
    b1, b2, b3 = eso.as_tuple()
    K = control_rows(idx, kp, kv, ka, h)
    A = np.zeros((n, n))
    c = np.zeros(n)
    bu = np.zeros(n)
    for i in range(N + 1):
        A[idx.p(i), idx.v(i)] = 1.0
        A[idx.v(i), idx.a(i)] = 1.0
        A[idx.a(i), idx.a(i)] = -b[i]
        if i == 0:
            bu[idx.a(0)] = b[0]
        else:
            A[idx.a(i)] += b[i] * K[i]
            c[idx.a(i)] = -b[i] * kp * r
    for i in range(1, N + 1):
        innov = _reldiff_row(idx, i, "v")
        innov[idx.z(1, i)] -= 1.0
        A[idx.z(1, i)] += b1 * innov
        A[idx.z(1, i), idx.z(2, i)] += 1.0
        A[idx.z(2, i)] += b2 * innov - K[i] / tau
        A[idx.z(2, i), idx.z(3, i)] += 1.0
        A[idx.z(2, i), idx.a(i)] += 1.0 / tau
        c[idx.z(2, i)] = kp * r / tau
        A[idx.z(3, i)] += b3 * innov
    return PlatoonLTI(A, bu, c, idx, h, r)


@dataclass(frozen=True)
class HeldInputLTI:
    """Open-loop form used when controls and measurements are held.

    ``x' = A x + b_u0 u_0 + B_app u_app + B_y y + B_am a_meas + B_uc u_ctrl``
    where each input vector has one entry per follower.
    """

    A: np.ndarray
    b_u0: np.ndarray
    B_app: np.ndarray
    B_y: np.ndarray
    B_am: np.ndarray
    B_uc: np.ndarray
    index: StateIndex


def held_input_system(eso, tau, epsilons) -> HeldInputLTI:
    N = len(epsilons) - 1
    idx = StateIndex(N)
    n = idx.n
    b = [1.0 / tau + e for e in epsilons]
    b1, b2, b3 = eso.as_tuple()
    A = np.zeros((n, n))
    bu = np.zeros(n)
    B_app = np.zeros((n, N))
    B_y = np.zeros((n, N))
    B_am = np.zeros((n, N))
    B_uc = np.zeros((n, N))
    for i in range(N + 1):
        A[idx.p(i), idx.v(i)] = 1.0
        A[idx.v(i), idx.a(i)] = 1.0
        A[idx.a(i), idx.a(i)] = -b[i]
    bu[idx.a(0)] = b[0]
    for i in range(1, N + 1):
        j = i - 1
        B_app[idx.a(i), j] = b[i]
        for k, beta in ((1, b1), (2, b2), (3, b3)):
            A[idx.z(k, i), idx.z(1, i)] -= beta
            B_y[idx.z(k, i), j] = beta
        A[idx.z(1, i), idx.z(2, i)] = 1.0
        A[idx.z(2, i), idx.z(3, i)] = 1.0
        B_am[idx.z(2, i), j] = 1.0 / tau
        B_uc[idx.z(2, i), j] = -1.0 / tau
    return HeldInputLTI(A, bu, B_app, B_y, B_am, B_uc, idx)


def error_coordinates(lti: PlatoonLTI, gains, tau, epsilons):
    """Map ``W = T x + S u_0`` from physical states to error coordinates.

    ``W = [F_1..F_N, E_1..E_N]`` with ``F_i = (e_i + r, v_{d,i}, a_i)`` and
    ``E_i = (z1-v_d, z2-a_d, z3-q)``. Only the first follower's extended
    state touches the exogenous ``u_0``, through ``S``.
    """
    idx = lti.index
    N = idx.N
    b = [1.0 / tau + e for e in epsilons]
    U = control_rows(idx, gains.kp, gains.kv, gains.ka, lti.h)
    T = np.zeros((6 * N, idx.n))
    S = np.zeros(6 * N)
    for i in range(1, N + 1):
        f = 3 * (i - 1)
        e = 3 * N + 3 * (i - 1)
        T[f] = _spacing_row(idx, i, lti.h)
        T[f + 1] = _reldiff_row(idx, i, "v")
        T[f + 2, idx.a(i)] = 1.0
        T[e] = -T[f + 1]
        T[e, idx.z(1, i)] += 1.0
        T[e + 1] = -_reldiff_row(idx, i, "a")
        T[e + 1, idx.z(2, i)] += 1.0
        q = np.zeros(idx.n)
        q[idx.a(i - 1)] -= b[i - 1]
        if i == 1:
            S[e + 2] = -b[0]
        else:
            q += b[i - 1] * U[i - 1]
        q[idx.a(i)] += epsilons[i]
        q -= epsilons[i] * U[i]
        T[e + 2, idx.z(3, i)] = 1.0
        T[e + 2] -= q
    return T, S
