import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from _reference import (
    brute_force_rc,
    distance_to_instability,
    kv_threshold_bisection,
    psi_reference,
    routh_reference,
    theorem3_reference,
)
from platoon_eso.certify import (
    RC_XTOL,
    build_closed_loop,
    build_psi,
    nominal_blocks,
    psi_hat_norm_bound,
    robust_coefficients,
    routh_column,
    routh_first_column,
    routh_stable,
    spacing_polynomial,
    spectral_abscissa,
    stability_radius_rc,
    sum_abs_bound,
    theta_nominal,
    thm1_check,
    thm1_ka_max,
    thm1_kv_threshold,
    thm3_check,
    thm3_ka_max,
)
from platoon_eso.config import ControllerGains, EsoGains, make_scenario
from platoon_eso.errors import DegenerateRow, EigenFailure, NotStable

G6 = ControllerGains(8.0, 40.0, 1.2)
ESO15 = EsoGains.from_bandwidth(15.0)
TAU = 0.1


# ---------------------------------------------------------------- Routh ----

def test_routh_observer_cubic():
    res = routh_first_column([1, 45, 675, 3375])
    assert res.column == (1.0, 45.0, 600.0, 3375.0)
    assert res.stable
    assert np.all(np.roots([1, 45, 675, 3375]).real < 0)


def test_routh_zero_pivot():
    with pytest.raises(DegenerateRow):
        routh_first_column([1, 0, 1, 1])
    with pytest.raises(DegenerateRow):
        routh_first_column([1, 1, 1, 1])  # s^1 row vanishes
    assert not routh_stable([1, 0, 1, 1])


def test_routh_spacing_cubic():
    poly = spacing_polynomial(8, 40, 0.3, 0.1)
    assert poly == pytest.approx([1, 130, 424, 80])
    assert routh_first_column(poly).stable
    assert np.all(np.roots(poly).real < 0)


def test_routh_normalizes_leading_coefficient():
    assert routh_first_column([2, 90, 1350, 6750]).column == (1.0, 45.0, 600.0, 3375.0)


@given(st.lists(st.floats(-5, 5).filter(lambda x: abs(x) > 1e-3), min_size=3, max_size=3))
def test_routh_cubic_agrees_with_reference_and_roots(c):
    c2, c1, c0 = c
    if c2 * c1 - c0 == 0:
        with pytest.raises(DegenerateRow):
            routh_first_column([1, c2, c1, c0])
        return
    col = routh_first_column([1, c2, c1, c0]).column
    assert np.allclose(col, routh_reference(c2, c1, c0), rtol=1e-12)
    roots = np.roots([1, c2, c1, c0])
    margin = np.max(roots.real)
    if abs(margin) > 1e-6:
        assert routh_first_column([1, c2, c1, c0]).stable == (margin < 0)


@given(st.lists(st.floats(-1.0, 1.0), min_size=1, max_size=7))
def test_general_routh_matches_roots(r):
    roots = np.array(r) - 0.0
    poly = np.poly(roots)
    if np.min(np.abs(roots)) < 1e-3:
        return
    assert routh_stable(poly) == bool(np.all(roots < 0))


def test_routh_column_cubic_matches_table():
    assert routh_column([1, 45, 675, 3375]) == (1.0, 45.0, 600.0, 3375.0)


# ------------------------------------------------------- block matrices ----

def test_psi_n1_is_block_diagonal():
    bl = nominal_blocks(8, 40, 1.2, 0.3, TAU, ESO15.as_tuple())
    psi = build_psi(G6, ESO15, 0.3, TAU, 1).psi
    assert psi.shape == (6, 6)
    assert np.array_equal(psi[:3, :3], bl["A"])
    assert np.array_equal(psi[3:, 3:], bl["H"])
    assert not psi[3:, :3].any() and not psi[:3, 3:].any()


def test_psi_n2_lower_left_has_only_d():
    bl = nominal_blocks(8, 40, 1.2, 0.3, TAU, ESO15.as_tuple())
    psi = build_psi(G6, ESO15, 0.3, TAU, 2).psi
    lower_left = psi[6:, :6]
    assert np.array_equal(lower_left[3:, :3], bl["D"])
    lower_left[3:, :3] = 0
    assert not lower_left.any()


@pytest.mark.parametrize("N", [1, 2, 3, 4, 6])
def test_psi_matches_reference_fixture(N):
    psi = build_psi(G6, ESO15, 0.3, TAU, N).psi
    assert np.array_equal(psi, psi_reference(8, 40, 0.3, TAU, ESO15.as_tuple(), N))


@pytest.mark.parametrize("N", [1, 2, 5])
def test_psi_structure(N):
    psi = build_psi(G6, ESO15, 0.3, TAU, N).psi
    n = 3 * N
    assert psi.shape == (6 * N, 6 * N)
    assert not psi[:n, n:].any()  # upper-right super-block
    assert np.allclose(np.triu(psi[:n, :n], 3), 0)  # Psi_11 block lower triangular


def test_psi_does_not_depend_on_ka():
    a = build_psi(ControllerGains(8, 40, 0.1), ESO15, 0.3, TAU, 4).psi
    b = build_psi(ControllerGains(8, 40, 3.0), ESO15, 0.3, TAU, 4).psi
    assert np.array_equal(a, b)


def test_hat_vanishes_without_ka_for_single_follower():
    bun = build_closed_loop(ControllerGains(8, 40, 0.0), ESO15, 0.3, TAU, 1)
    assert not bun.psi_hat.any()


@pytest.mark.parametrize("N", [1, 2, 3, 5])
def test_robust_with_zero_eps_equals_nominal(N):
    nom = build_closed_loop(G6, ESO15, 0.3, TAU, N)
    rob = build_closed_loop(G6, ESO15, 0.3, TAU, N, epsilons=[0.0] * (N + 1))
    assert np.allclose(rob.closed_loop, nom.closed_loop, rtol=1e-13, atol=1e-9)
    assert np.allclose(rob.psi_hat, nom.psi_hat, rtol=1e-13, atol=1e-9)


def test_reference_closed_loop_is_stable():
    bun = build_closed_loop(G6, ESO15, 0.3, TAU, 5, epsilons=(-0.8, 0.1, 0.5, -0.2, 0.65, -0.3))
    assert spectral_abscissa(bun.closed_loop) < 0
    assert spectral_abscissa(build_closed_loop(G6, ESO15, 0.3, TAU, 5).closed_loop) < 0


@pytest.mark.parametrize("eps", [None, (0.0, 0.0, 0.0, 0.0), (-0.8, 0.1, 0.5, -0.2), (3.0, -4.0, 2.5, 1.0)])
def test_block_matrix_is_similar_to_physical_loop(eps):
    """Error-coordinate matrix reproduces the physical closed loop exactly:
    T A = M T on the autonomous part, so their spectra coincide."""
    from platoon_eso.realization import closed_loop, error_coordinates

    N = 3
    e = (0.0,) * (N + 1) if eps is None else eps
    g = ControllerGains(2.0, 5.0, 0.7)
    eso = EsoGains.from_bandwidth(6.0)
    M = build_closed_loop(g, eso, 0.4, 0.2, N, None if eps is None else e).closed_loop
    lti = closed_loop(g, eso, 0.4, 0.2, e)
    T, _ = error_coordinates(lti, g, 0.2, e)
    idx = lti.index
    # leader states enter only through the forcing; compare on follower columns
    cols = [j for j in range(idx.n) if j not in (idx.p(0), idx.v(0), idx.a(0))]
    lhs = (T @ lti.A)[:, cols]
    rhs = (M @ T)[:, cols]
    assert np.allclose(lhs, rhs, rtol=1e-11, atol=1e-9 * np.abs(lhs).max())


def test_robust_eps_range_checked():
    with pytest.raises(ValueError):
        build_closed_loop(G6, ESO15, 0.3, TAU, 1, epsilons=(0.0, 10.0))
    with pytest.raises(ValueError):
        build_closed_loop(G6, ESO15, 0.3, TAU, 2, epsilons=(0.0, 1.0))


# ----------------------------------------------------- matrix measures ----

def test_spectral_abscissa_examples():
    assert spectral_abscissa([[-1.0]]) == -1.0
    assert spectral_abscissa(np.diag([-1.0, -2.0])) == -1.0
    assert spectral_abscissa([[0, 1], [-2, -3]]) == pytest.approx(-1.0, abs=1e-12)
    with pytest.raises(EigenFailure):
        spectral_abscissa([[np.nan, 0], [0, 1]])


def test_sum_abs_bound_examples():
    assert sum_abs_bound(np.eye(2)) == 2.0
    assert sum_abs_bound([[3.0]]) == 3.0


def test_sum_abs_bound_dominates_two_norm(rng):
    for _ in range(100):
        M = rng.normal(size=(10, 10)) * rng.uniform(0.01, 100)
        assert sum_abs_bound(M) >= np.linalg.norm(M, 2)


def test_rc_trivial_examples():
    rc, w = stability_radius_rc(np.array([[-1.0]]))
    assert rc == pytest.approx(1.0, abs=1e-12) and w == pytest.approx(0.0, abs=1e-6)
    assert stability_radius_rc(np.diag([-1.0, -2.0]))[0] == pytest.approx(1.0, abs=1e-12)


def test_rc_two_by_two_against_oracles():
    A = np.array([[0.0, 1.0], [-2.0, -3.0]])
    rc, w = stability_radius_rc(A)
    assert rc == pytest.approx(brute_force_rc(A), abs=1e-6)
    assert rc == pytest.approx(distance_to_instability(A), abs=1e-9)
    assert np.linalg.svd(1j * w * np.eye(2) - A, compute_uv=False)[-1] == pytest.approx(rc, abs=1e-14)


def test_rc_rejects_unstable():
    with pytest.raises(NotStable):
        stability_radius_rc(np.array([[0.5]]))
    with pytest.raises(NotStable):
        stability_radius_rc(np.array([[0.0, 1.0], [-1.0, 0.0]]))


@pytest.mark.parametrize("N", [1, 2, 3])
def test_rc_psi_against_brute_force(N):
    psi = build_psi(G6, ESO15, 0.3, TAU, N).psi
    rc, _ = stability_radius_rc(psi)
    assert abs(rc - brute_force_rc(psi)) <= 1e-6
    assert rc <= np.linalg.svd(-psi, compute_uv=False)[-1] + 1e-15


def test_rc_random_stable_matrices(rng):
    for n in (2, 3, 4, 6, 8):
        for _ in range(3):
            X = rng.normal(size=(n, n))
            A = X - (max(np.linalg.eigvals(X).real) + rng.uniform(0.05, 1.0)) * np.eye(n)
            rc, w = stability_radius_rc(A)
            assert abs(rc - distance_to_instability(A)) <= 1e-8
            assert rc <= np.linalg.svd(A, compute_uv=False)[-1] + 1e-15


def test_rc_refinement_tolerance_is_tight():
    assert RC_XTOL <= 1e-8


# ----------------------------------------------------- bounds and gains ----

def test_nominal_bound_cases():
    eso = EsoGains.from_bandwidth(15.0)
    assert psi_hat_norm_bound(G6, eso, 0.3, TAU, 1) == pytest.approx(12.0)
    n2 = 1.2 * (40 * 0.3 + TAU * 675 + 4 * TAU + 1) / TAU**2
    assert psi_hat_norm_bound(G6, eso, 0.3, TAU, 2) == pytest.approx(n2)
    th = theta_nominal(8, 40, 0.3, TAU, 675, 5)
    assert psi_hat_norm_bound(G6, eso, 0.3, TAU, 5) == pytest.approx(5 * 1.2**2 / TAU**2 + th * 1.2)


@pytest.mark.parametrize("N", [1, 2, 3, 5])
@pytest.mark.parametrize("eb", [0.0, 0.3, 4.0])
def test_robust_coefficients_match_second_transcription(N, eb):
    got = robust_coefficients(8, 40, 0.3, TAU, 675, N, eb).as_dict()
    ref = theorem3_reference(8, 40, 0.3, TAU, 675, N, eb)
    assert set(got) == set(ref)
    for k in ref:
        assert got[k] == pytest.approx(ref[k], rel=1e-13, abs=1e-13), k


def _rand_gains(rng):
    return (ControllerGains(10 ** rng.uniform(-1, 1.5), 10 ** rng.uniform(-1, 2), 10 ** rng.uniform(-2, 0.5)),
            EsoGains.from_bandwidth(10 ** rng.uniform(0, 1.5)), 10 ** rng.uniform(-2, 0), 10 ** rng.uniform(-1.5, 0))


def test_bound_dominates_constructed_hat_nominal(rng):
    for _ in range(60):
        g, eso, h, tau = _rand_gains(rng)
        N = int(rng.integers(1, 7))
        hat = build_closed_loop(g, eso, h, tau, N).psi_hat
        assert np.linalg.norm(hat, 2) <= psi_hat_norm_bound(g, eso, h, tau, N) * (1 + 1e-12)


def test_bound_dominates_constructed_hat_robust(rng):
    for _ in range(40):
        g, eso, h, tau = _rand_gains(rng)
        N = int(rng.integers(1, 5))
        eb = rng.uniform(0, 0.95) / tau
        bound = psi_hat_norm_bound(g, eso, h, tau, N, eb)
        draws = [np.array(c) * eb for c in itertools.product((-1, 1), repeat=N + 1)]
        draws += [rng.uniform(-eb, eb, N + 1) for _ in range(5)]
        for eps in draws:
            hat = build_closed_loop(g, eso, h, tau, N, eps).psi_hat
            assert np.linalg.norm(hat, 2) <= bound * (1 + 1e-12)


def test_reference_bound_dominates():
    eso = EsoGains.from_bandwidth(15.0)
    hat = build_closed_loop(G6, eso, 0.3, TAU, 5).psi_hat
    assert psi_hat_norm_bound(G6, eso, 0.3, TAU, 5) >= np.linalg.norm(hat, 2)


def test_bound_argument_checks():
    with pytest.raises(ValueError):
        psi_hat_norm_bound(G6, ESO15, 0.3, TAU, 0)
    with pytest.raises(ValueError):
        psi_hat_norm_bound(G6, ESO15, 0.3, TAU, 3, epsbar=10.0)


def test_kv_threshold_examples():
    assert thm1_kv_threshold(8, 0.3, 0.1) == 0.0
    assert thm1_kv_threshold(1e-12, 0.05, 0.1) == pytest.approx(0.0, abs=1e-11)
    kv = thm1_kv_threshold(0.01, 0.01, 0.1)
    assert kv == pytest.approx(9.0e-4, rel=2e-3)
    assert kv == pytest.approx(kv_threshold_bisection(0.01, 0.01, 0.1), rel=1e-12)


@given(st.floats(1e-3, 100), st.floats(1e-3, 0.99), st.floats(0.01, 1.0))
def test_kv_threshold_is_routh_boundary(kp, hfrac, tau):
    h = hfrac * tau
    kv = thm1_kv_threshold(kp, h, tau)
    assert kv == pytest.approx(kv_threshold_bisection(kp, h, tau), rel=1e-9, abs=1e-15)
    col = routh_first_column(spacing_polynomial(kp, kv * 1.01 + 1e-12, h, tau))
    assert col.stable


@pytest.mark.parametrize("N", [1, 2, 3, 6])
def test_ka_max_plug_back(N):
    rc, _ = stability_radius_rc(build_psi(G6, ESO15, 0.3, TAU, N).psi)
    ka = thm1_ka_max(G6, ESO15, 0.3, TAU, N)
    val = psi_hat_norm_bound(ControllerGains(8, 40, ka), ESO15, 0.3, TAU, N)
    tol = 1e-12 if N == 1 else 1e-9
    assert val == pytest.approx(rc, rel=tol)
    if N == 1:
        assert ka == pytest.approx(rc * TAU, rel=1e-14)


def test_ka_max_closed_forms():
    for N in (2, 4):
        rc, _ = stability_radius_rc(build_psi(G6, ESO15, 0.3, TAU, N).psi)
        ka = thm1_ka_max(G6, ESO15, 0.3, TAU, N, r_c=rc)
        if N == 2:
            assert ka == pytest.approx(rc * TAU**2 / (40 * 0.3 + TAU * 675 + 4 * TAU + 1), rel=1e-12)
        else:
            th = theta_nominal(8, 40, 0.3, TAU, 675, N)
            q = 2 * N - 5
            ref = (TAU * math.sqrt(th**2 * TAU**2 + 4 * q * rc) - TAU**2 * th) / (2 * q)
            assert ka == pytest.approx(ref, rel=1e-6)


def test_ka_max_decreases_with_platoon_length():
    vals = [thm1_ka_max(G6, ESO15, 0.3, TAU, N) for N in range(3, 11)]
    assert all(b < a for a, b in zip(vals, vals[1:]))


def test_ka_max_rejects_unstable_psi():
    with pytest.raises(NotStable):
        thm1_ka_max(ControllerGains(0.01, 1e-5, 0.1), ESO15, 0.01, TAU, 2)


def test_thm3_ka_max_degenerates():
    for N in (1, 2, 3, 5):
        assert thm3_ka_max(G6, ESO15, 0.3, TAU, N, 0.0) == pytest.approx(
            thm1_ka_max(G6, ESO15, 0.3, TAU, N), rel=1e-12)


# ------------------------------------------------------------- reports ----

def _scenario(N=2, h=0.3, gains=G6, eso=ESO15, tau=TAU):
    return make_scenario(N, tau, h, gains, eso)


def test_reference_report_records_everything(reference_config):
    rep = thm1_check(reference_config)
    assert rep.intermediates["r_c"] > 0
    assert rep.intermediates["ka_max"] < 1.2
    assert not rep.passed and not rep.check("ka_max").passed
    text = rep.to_text()
    assert "CHECK ka_max: FAIL" in text and "ROUTH spacing" in text
    assert "does not imply instability" in text
    assert all(math.isfinite(v) for v in rep.intermediates.values())


def test_passing_report_implies_stable_loop():
    rc = stability_radius_rc(build_psi(G6, ESO15, 0.3, TAU, 3).psi)
    ka = 0.9 * thm1_ka_max(G6, ESO15, 0.3, TAU, 3, r_c=rc[0])
    g = ControllerGains(8, 40, ka)
    rep = thm1_check(_scenario(3, gains=g), r_c=rc)
    assert rep.passed
    assert spectral_abscissa(build_closed_loop(g, ESO15, 0.3, TAU, 3).closed_loop) < 0


def test_failing_precondition_short_circuits():
    rep = thm1_check(_scenario(2, h=0.01, gains=ControllerGains(0.01, 1e-5, 0.1)))
    assert not rep.passed
    assert not rep.check("kv_threshold").passed
    assert "r_c" not in rep.intermediates


@pytest.mark.parametrize("N", [1, 2, 3, 5])
def test_thm3_at_zero_matches_thm1(N):
    for ka in (1e-6, 1e-3, 1.2):
        cfg = _scenario(N, gains=ControllerGains(8, 40, ka))
        r1, r3 = thm1_check(cfg), thm3_check(cfg, 0.0)
        assert r1.passed == r3.passed
        assert r3.intermediates["ka_max"] == pytest.approx(r1.intermediates["ka_max"], rel=1e-12)
        assert r3.intermediates["psi_hat_bound"] == pytest.approx(r1.intermediates["psi_hat_bound"], rel=1e-12)


def test_thm3_epsbar_range_and_feasibility():
    cfg = _scenario(2)
    assert not thm3_check(cfg, 10.0).passed
    rep = thm3_check(cfg, 9.0)
    assert not rep.check("epsbar_feasibility").passed
    for k in ("Theta", "Theta1", "A1", "A2", "Y1", "Z6"):
        assert k in rep.intermediates


def test_thm3_soundness_on_corners_and_interior(rng):
    """Configs passing the uncertain-plant certificate stay stable for every
    sampled epsilon vector inside the box."""
    found = 0
    g0 = ControllerGains(2.0, 6.0, 1.0)
    for trial in range(40):
        N = int(rng.integers(1, 4))
        tau = 10 ** rng.uniform(-0.5, 0)
        h = 10 ** rng.uniform(-1, 0)
        eso = EsoGains.from_bandwidth(10 ** rng.uniform(0, 1))
        g = ControllerGains(10 ** rng.uniform(-1, 0.5), 10 ** rng.uniform(-0.5, 1), 1.0)
        try:
            rc = stability_radius_rc(build_psi(g, eso, h, tau, N).psi)
        except NotStable:
            continue
        eb = rc[0] * rng.uniform(1e-4, 1e-2)
        try:
            ka_max = thm3_ka_max(g, eso, h, tau, N, eb, r_c=rc[0])
        except NotStable:
            continue
        if ka_max <= 0:
            continue
        g = ControllerGains(g.kp, g.kv, ka_max * rng.uniform(0.1, 0.95))
        rep = thm3_check(make_scenario(N, tau, h, g, eso), eb, r_c=rc)
        if not rep.passed:
            continue
        found += 1
        draws = [np.array(c) * eb for c in itertools.product((-1, 1), repeat=N + 1)]
        draws += [rng.uniform(-eb, eb, N + 1) for _ in range(20)]
        for eps in draws:
            M = build_closed_loop(g, eso, h, tau, N, eps).closed_loop
            assert spectral_abscissa(M) < 0
    assert found >= 10
    assert g0.kp == 2.0
