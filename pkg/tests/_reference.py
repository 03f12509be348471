"""Independent second transcriptions and oracles used by the tests.

Nothing here imports the package: every formula is re-typed from the source
tables in a different layout so that a transcription slip in one copy shows
up as a disagreement.
"""

import math

import numpy as np
import scipy.linalg as sla


# ------------------------------------------------ transfer functions ----

def gei_reference(kp, kv, ka, b1, b2, b3, h, tau):
    """Ascending coefficients of the nominal spacing-error transfer function."""
    n = {
        0: kp * b3,
        1: kp * b2 + kv * b3,
        2: kp * b1 + kv * b2 + ka * b3,
        3: kv * b1 + ka * b2 + kp,
        4: kv,
    }
    d = {
        0: kp * b3,
        1: kp * b2 + (kp * h + kv) * b3,
        2: kp * b1 + (kp * h + kv) * b2 + (1 + kv * h) * b3,
        3: (kp * h + kv) * b1 + (1 + kv * h) * b2 + tau * b3 + kp,
        4: (1 + kv * h) * b1 + tau * b2 + kp * h + kv,
        5: tau * b1 + kv * h + 1,
        6: tau,
    }
    return [n[k] for k in range(5)], [d[k] for k in range(7)]


def gei_uncertain_reference(kp, kv, ka, b1, b2, b3, h, tau, b):
    g = ka / tau - b * ka + b
    num = [b * kp * b3, b * kp * b2 + b * kv * b3, b * kp * b1 + b * kv * b2 + b * ka * b3,
           b * kv * b1 + b * ka * b2 + b * kp, b * kv]
    den = [b * kp * b3,
           b * kp * b2 + (b * kp * h + b * kv) * b3,
           b * kp * b1 + (b * kp * h + b * kv) * b2 + (b + b * kv * h) * b3,
           (b * kp * h + b * kv) * b1 + (b + b * kv * h) * b2 + b3 + b * kp,
           (g + b * kv * h) * b1 + b2 + b * kp * h + b * kv,
           b1 + g + b * kv * h,
           1.0]
    return num, den


# frozen once from the reference gains (8, 40, 1.2), omega_o = 15, h = 0.3, tau = 0.1
# by hand: n0 = 8*3375, d2 = 8*45 + 42.4*675 + 13*3375, d3 = 42.4*45 + 13*675 + 337.5 + 8, ...
GEI_REFERENCE_NUM = [27000.0, 140400.0, 31410.0, 2618.0, 40.0]
GEI_REFERENCE_DEN = [27000.0, 148500.0, 72855.0, 11028.5, 694.9, 17.5, 0.1]


# -------------------------------------------- sufficient-condition tables ----

def theorem2_reference(mp, mv, ma, w, h, tau):
    t2, h2 = tau * tau, h * h
    rho = [3 * t2 * w**2 + 1, 3 * t2 * w**4 + 3 * w**2, t2 * w**6 + 3 * w**4, w**6]
    a1 = h2 * mv * mv
    a2 = 3 * h2 * mv * mv * w**2 + h2 * mp * mp
    a3 = (3 * h2 * mv**2 - 9 * ma**2) * w**4 - 16 * ma * mv * w**3 + (3 * h2 * mp**2 - 6 * mp * ma) * w**2
    a4 = (h2 * mv**2 - ma**2) * w**6 + (3 * h2 * mp**2 + 12 * ma * mp) * w**4
    a5 = (h2 * mp**2 + 2 * ma * mp) * w**6
    c = h * mv - tau * mv - h * tau * mp
    g1 = 2 * (h - tau) * mv - 2 * h * tau * mp
    g2 = (6 * (h - tau) * mv - 6 * h * tau * mp) * w**2 - 2 * mp
    g3 = 6 * c * w**4 - 6 * mp * w**2
    g4 = 2 * c * w**6 - 6 * mp * w**4
    g5 = 2 * mp * w**6
    return dict(rho=rho, alpha=[a1, a2, a3, a4, a5], gamma=[g1, g2, g3, g4, g5])


def theorem3_reference(kp, kv, h, tau, beta2, N, eb):
    Theta = (N * tau + (N - 1) * (tau * beta2 + 2 * tau + kv * h + 1) + (N - 2) * (kp + kv + 2 * kv * h + 2)) / tau**2
    out = {
        "Theta": Theta,
        "Theta1": (kv * h + tau * beta2 + 4 * tau + 1) / tau**2,
        "A1": eb**2 + eb / tau,
        "A2": (2 * N - 5) / tau**2 + (4 * N - 8) * eb**2 + (5 * N - 11) * eb / tau,
        "Y1": kv * h + 1,
        "Y2": kv * h / tau + beta2 + 2,
        "Y3": kp + kv + 5 * kv * h + 5,
        "Y4": (kp + kv + 6 * kv * h + 3) / tau + 3 * beta2 + 6,
        "Y5": (2 * N - 3) * (kp + kv + 2 * kv * h + 2) + (2 * N - 1) * (kv * h + 1),
        "Y6": N * (kv * h / tau + beta2 + 2) + (N - 1) * ((kp + kv + 4 * kv * h + 3) / tau + beta2 + 2)
              + (N - 2) * (4 + 2 * kp + 2 * kv + 4 * kv * h) / tau,
        "Z1": kv * kv * h * h + (2 * kv + kp * kv + kv * kv) * h + kp + kv + 1,
        "Z2": kv * kv * h * h / tau + (kv * kv + kp * kv + kv) * h / tau + kp * h + kv * h + 2 * kp + 2 * kv + 1,
        "Z3": 3 * kv * kv * h * h + (3 * kv * kv + 3 * kp * kv + 6 * kv) * h + 3 * kp + 3 * kv + 3,
        "Z4": 4 * kv * kv * h * h / tau + ((4 * kv * kv + 6 * kv + 4 * kp * kv) * h + 2 * kp + 2 * kv) / tau
              + (3 * kp + 2 * kv) * h + 5 * kp + 6 * kv + 4,
        "Z5": (2 * N - 1) * (kp * kv * h + kp + kv + kv * kv * h + 1 + 2 * kv * h + kv * kv * h * h),
        "Z6": N * ((kp * kv * h + kv * kv * h + kv * h + kv * kv * h * h) / tau + 1 + kv * h + 2 * kp + 2 * kv + kp * h)
              + (N - 1) * ((2 * kv + 2 * kp + 2 * kv * kv * h + 2 * kp * kv * h + 2 * kv * kv * h * h + 4 * kv * h) / tau
                           + kp + kp * h + 2 * kv + 2)
              + (N - 2) * kv / tau,
    }
    return out


# -------------------------------------------------------- block matrix ----

def psi_reference(kp, kv, h, tau, beta, N):
    """Assemble the nominal block matrix entry by entry from its blocks."""
    b1, b2, b3 = beta
    A = [[0, 1, -h], [0, 0, -1], [kp / tau, kv / tau, (-1 - kv * h) / tau]]
    B = [[0, 0, 0], [0, 0, 1], [0, 0, 0]]
    E = [[0, 0, 0], [0, 0, 0], [0, 0, -kv / tau]]
    Hm = [[-b1, 1, 0], [-b2, 0, 1], [-b3, 0, 0]]
    t2 = tau**2
    D = [[0, 0, 0], [0, 0, 0],
         [kp * (1 + kv * h) / t2, (kv + kv * kv * h - kp * tau) / t2,
          (kp * h * tau + kv * tau - 2 * kv * h - kv * kv * h * h - 1) / t2]]
    M = [[0.0] * (6 * N) for _ in range(6 * N)]

    def place(bi, bj, blk):
        for r in range(3):
            for c in range(3):
                M[3 * bi + r][3 * bj + c] = float(blk[r][c])

    for i in range(N):
        place(i, i, A)
        place(N + i, N + i, Hm)
        if i >= 1:
            place(i, i - 1, B)
            place(N + i, i - 1, D)
        if i >= 2:
            place(N + i, i - 2, E)
    return np.array(M)


# ------------------------------------------------------------ oracles ----

def distance_to_instability(A, tol=1e-12):
    """``min_w sigma_min(iwI - A)`` by bisection on Hamiltonian eigenvalues.

    For a stable ``A`` the Hamiltonian ``[[A, -d I], [d I, -A^T]]`` has an
    eigenvalue on the imaginary axis exactly when ``d`` is at least the
    distance to instability.
    """
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    eye = np.eye(n)
    scale = max(1.0, float(np.max(np.abs(A))))

    def crosses(d):
        Hm = np.block([[A, -d * eye], [d * eye, -A.T]])
        ev = sla.eigvals(Hm)
        return bool(np.any(np.abs(ev.real) <= 1e-9 * scale))

    lo = 0.0
    hi = float(np.linalg.svd(A, compute_uv=False)[-1])  # value at w = 0
    while hi - lo > tol * max(hi, 1e-300):
        mid = 0.5 * (lo + hi)
        if crosses(mid):
            hi = mid
        else:
            lo = mid
    return hi


def brute_force_rc(A, fine_step=1e-4, coarse=4001):
    """Minimum of ``sigma_min(iwI - A)`` over the dense grid ``w = k * fine_step``.

    The grid up to ``2 sum|a_ij|`` is far too long to evaluate in full, so
    cells are discarded with the 1-Lipschitz bound
    ``min_[a,b] f >= (f(a) + f(b) - (b - a)) / 2``; a discarded cell cannot
    hold a grid point below the running best, so the result equals the full
    dense-grid minimum.
    """
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    eye = np.eye(n)

    def smin(ws):
        ws = np.asarray(ws, dtype=float)
        out = np.empty(len(ws))
        for i in range(0, len(ws), 4000):
            stack = 1j * ws[i:i + 4000, None, None] * eye - A
            out[i:i + 4000] = np.linalg.svd(stack, compute_uv=False)[:, -1]
        return out

    top = 2.0 * float(np.sum(np.abs(A)))
    kmax = int(math.ceil(top / fine_step))
    knots = np.unique(np.round(np.linspace(0, kmax, coarse)).astype(np.int64))
    vals = smin(knots * fine_step)
    best = float(vals.min())
    cells = [(int(a), int(b), fa, fb) for a, b, fa, fb in zip(knots[:-1], knots[1:], vals[:-1], vals[1:])]
    while cells:
        nxt = []
        mids = []
        for a, b, fa, fb in cells:
            if b - a <= 1 or 0.5 * (fa + fb - (b - a) * fine_step) > best:
                continue
            mids.append((a, b, fa, fb, (a + b) // 2))
        if not mids:
            break
        fm = smin([m[4] * fine_step for m in mids])
        best = min(best, float(fm.min()))
        for (a, b, fa, fb, m), f in zip(mids, fm):
            nxt += [(a, m, fa, f), (m, b, f, fb)]
        cells = nxt
    return best


def routh_reference(c2, c1, c0):
    return [1.0, c2, (c2 * c1 - c0) / c2, c0]


def kv_threshold_bisection(kp, h, tau):
    """Root of ``h kv^2 + (1 + h^2 kp) kv + (h - tau) kp = 0`` by bisection."""
    f = lambda kv: h * kv * kv + (1 + h * h * kp) * kv + (h - tau) * kp
    lo, hi = 0.0, 1.0
    while f(hi) < 0:
        hi *= 2
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if f(mid) < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def polyval_asc(c, s):
    return sum(ck * s**k for k, ck in enumerate(c))


def isclose_rel(a, b, rel):
    return math.isclose(a, b, rel_tol=rel, abs_tol=0.0)
