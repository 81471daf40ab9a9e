"""Comass search, exact 2-form oracle, and the semi-calibration toolkit."""

import math

import numpy as np
import pytest

from caliber.calib import (
    Plane,
    SearchParams,
    batch_evaluate,
    canonical_frame,
    comass_2form_exact,
    comass_search,
    is_calibrated,
    is_pure_type,
    isotropy_of_maximizers,
    reduce_along_line,
    splitting_support,
    transported_semicalibration,
)
from caliber.exterior import AltForm, evaluate, hodge, wedge
from caliber.model import build_hyperkahler_cone, build_twistor_model, default_link_frame

FAST = SearchParams(restarts=60, seed=5)


# -- planes -------------------------------------------------------------------


def test_plane_orthonormalization_preserves_orientation():
    rows = np.array([[2.0, 0, 0, 0], [1.0, 1.0, 0, 0], [0, 1.0, 1.0, 0]])
    P = Plane.from_vectors(rows)
    assert np.allclose(P.frame @ P.frame.T, np.eye(3))
    C = P.frame @ rows.T
    assert np.linalg.det(C) > 0


def test_plane_rejects_rank_deficient():
    with pytest.raises(ValueError):
        Plane.from_vectors([[1.0, 0, 0], [1.0, 1e-13, 0]])


def test_plane_strict_orthonormal_check():
    with pytest.raises(ValueError):
        Plane.from_vectors([[1.0, 1e-3, 0, 0]], orthonormalize=False)


def test_plane_json_roundtrip():
    P = Plane.from_vectors(np.eye(5)[:2])
    assert Plane.from_json(P.to_json()).spans_same_oriented(P)


def test_canonical_frame_is_orientation_safe():
    rng = np.random.default_rng(4)
    for _ in range(20):
        P = Plane.from_vectors(rng.standard_normal((3, 6)))
        W = canonical_frame(P.frame)
        Q = Plane.from_vectors(W, orthonormalize=False)
        assert Q.spans_same_oriented(P)


# -- comass search ------------------------------------------------------------


def test_comass_unit_decomposable():
    f = AltForm.blade(6, [0, 1, 2], 1.0)
    res = comass_search(f, params=SearchParams(restarts=20, seed=1))
    assert abs(res.value - 1.0) < 1e-9
    expect = Plane.from_vectors(np.eye(6)[:3])
    assert res.argmax.spans_same_oriented(expect, 1e-6)
    assert evaluate(f, list(res.argmax.frame)) == pytest.approx(res.value, abs=1e-9)


def test_comass_scaled_blade():
    f = AltForm.blade(5, [0, 1], 3.0)
    assert abs(comass_search(f, params=FAST).value - 3.0) < 1e-9
    assert comass_2form_exact(f) == pytest.approx(3.0)


def test_comass_zero_form():
    res = comass_search(AltForm.zero(5, 2), params=SearchParams(restarts=3, seed=0))
    assert res.value == 0.0


def test_comass_degree_mismatch():
    with pytest.raises(ValueError):
        comass_search(AltForm.blade(5, [0, 1], 1.0), k=3)


def test_comass_rejects_complex():
    tm = build_twistor_model(1)
    with pytest.raises(TypeError):
        comass_search(tm.form("gamma0"))


def test_comass_theta_and_gamma_anchors():
    hk = build_hyperkahler_cone(1)
    assert abs(comass_search(hk.form("theta_I4").to_float(), params=FAST).value - 1.0) < 1e-6
    tm = build_twistor_model(1)
    assert abs(comass_search(tm.form("re_gamma0").to_float(), params=FAST).value - 1.0) < 1e-6


def test_comass_deterministic_given_seed():
    f = build_hyperkahler_cone(1).form("Phi2").to_float()
    r1 = comass_search(f, params=SearchParams(restarts=25, seed=9))
    r2 = comass_search(f, params=SearchParams(restarts=25, seed=9))
    assert r1.value == r2.value
    assert np.array_equal(r1.argmax.frame, r2.argmax.frame)
    assert r1.converged_fraction == r2.converged_fraction


def test_comass_result_invariant():
    f = build_hyperkahler_cone(1).form("theta_I4").to_float()
    res = comass_search(f, params=FAST)
    assert abs(evaluate(f, list(res.argmax.frame)) - res.value) <= 1e-9


def test_hodge_dual_theta_comass_one():
    hk = build_hyperkahler_cone(1)
    dual = hodge(hk.form("theta_I4").to_float())
    assert abs(comass_search(dual, params=FAST).value - 1.0) < 1e-6


# -- 2-form oracle ------------------------------------------------------------


@pytest.mark.parametrize("N", [6, 8, 12])
def test_oracle_agreement_random_skew(N):
    rng = np.random.default_rng(N)
    for trial in range(6):
        A = rng.standard_normal((N, N))
        S = A - A.T
        f = AltForm(N, 2, {(i, j): S[i, j] for i in range(N) for j in range(i + 1, N)})
        exact = comass_2form_exact(f)
        found = comass_search(f, params=SearchParams(restarts=40, seed=trial)).value
        assert abs(exact - found) < 1e-7


def test_oracle_kahler_form():
    hk = build_hyperkahler_cone(1)
    assert comass_2form_exact(hk.form("omega1").to_float()) == pytest.approx(1.0, abs=1e-12)


def test_skew_matrix_wrong_degree():
    with pytest.raises(ValueError):
        comass_2form_exact(AltForm.blade(4, [0, 1, 2], 1.0))


# -- is_calibrated ------------------------------------------------------------


def test_is_calibrated_complex_line():
    hk = build_hyperkahler_cone(1)
    line = Plane.from_vectors([np.eye(8)[0], hk.I1 @ np.eye(8)[0]])
    assert is_calibrated(hk.form("omega1").to_float(), line)
    flipped = Plane.from_vectors([hk.I1 @ np.eye(8)[0], np.eye(8)[0]])
    assert not is_calibrated(hk.form("omega1").to_float(), flipped)


def test_is_calibrated_w_theta():
    from caliber.model import make_W_theta

    tm = build_twistor_model(1)
    assert is_calibrated(tm.form("re_gamma0").to_float(), make_W_theta(1, math.pi / 4), 1e-9)


def test_is_calibrated_degree_mismatch():
    tm = build_twistor_model(1)
    with pytest.raises(ValueError):
        is_calibrated(tm.form("re_gamma0").to_float(), Plane.from_vectors(np.eye(6)[:2]))


# -- reduce_along_line ----------------------------------------------------------


def test_reduce_along_line_blade():
    f = AltForm.blade(6, [0, 1, 2], 1.0)
    e0 = np.eye(6)[0]
    red = reduce_along_line(f, e0)
    # basis completion after e0 is (e1, ..., e5), so alpha = e^{01} downstairs
    assert red.alpha.approx_eq(AltForm.blade(5, [0, 1], 1.0), 1e-12)
    assert red.beta.is_zero()


def test_reduce_along_line_kahler_power_gives_cr_calibration():
    n = 1
    hk = build_hyperkahler_cone(n)
    lf = default_link_frame(n)
    w1 = hk.form("omega1").to_float()
    f = wedge(w1, w1) * 0.5
    x = np.zeros(8)
    x[0] = 1.0
    red = reduce_along_line(f, x, basis=lf.frame.astype(float))
    expect = wedge(lf.form("alpha1").to_float(), lf.form("Omega1").to_float())
    assert red.alpha.approx_eq(expect, 1e-12)


def test_reduce_along_line_upsilon_gives_psi():
    n = 1
    hk = build_hyperkahler_cone(n)
    lf = default_link_frame(n)
    x = np.zeros(8)
    x[0] = 1.0
    red = reduce_along_line(hk.form("upsilon1"), x, basis=lf.frame.astype(float))
    psi = lf.form("psi1")
    assert red.alpha.re.approx_eq(psi.re.to_float(), 1e-12)
    assert red.alpha.im.approx_eq(psi.im.to_float(), 1e-12)


def test_reduce_along_line_candidate_check():
    f = AltForm.blade(6, [0, 1, 2], 1.0)
    red = reduce_along_line(f, np.eye(6)[0], lines_fill_calibrated_planes=True,
                            params=SearchParams(restarts=10, seed=0))
    assert red.alpha_comass is not None
    assert abs(red.alpha_comass.value - 1.0) < 1e-6


def test_reduce_along_line_requires_unit_vector():
    with pytest.raises(ValueError):
        reduce_along_line(AltForm.blade(4, [0, 1], 1.0), [2.0, 0, 0, 0])


# -- transported semi-calibrations ---------------------------------------------


def test_scaling_transport_identity():
    tm = build_twistor_model(1)
    f = tm.form("re_gamma0").to_float()
    moved = transported_semicalibration(f, scaling=(1.0, tm.h_indices))
    assert moved.form.approx_eq(f, 1e-15)


def test_scaling_transport_nearly_kahler_metric():
    tm = build_twistor_model(1)
    f = tm.form("re_gamma0").to_float()
    moved = transported_semicalibration(f, scaling=(math.sqrt(2.0), tm.h_indices))
    # t^m with m = 2 horizontal slots: the doubled 3-form
    assert moved.form.approx_eq(f * 2.0, 1e-12)
    assert moved.metric.t == pytest.approx(math.sqrt(2.0))
    remapped = moved.orthonormal_components()
    res = comass_search(remapped, params=FAST)
    assert res.value <= 1.0 + 1e-6
    assert abs(res.value - 1.0) < 1e-6


def test_scaling_transport_rejects_mixed_split():
    tm = build_twistor_model(1)
    f = tm.form("omega_KE").to_float()  # has both pure-H and pure-V terms
    with pytest.raises(ValueError):
        transported_semicalibration(f, scaling=(2.0, tm.h_indices))


def test_submersion_transport_recovers_link_gamma():
    for n in (1, 2):
        tm = build_twistor_model(n)
        lf = default_link_frame(n)
        p = lf.submersion_to_twistor()
        moved = transported_semicalibration(tm.form("re_gamma0").to_float(), submersion=p)
        expect = lf.form("re_gamma1")
        assert moved.form.approx_eq(expect.to_float() if hasattr(expect, "to_float") else expect, 1e-12)
        res = comass_search(moved.form, params=FAST)
        assert abs(res.value - 1.0) < 1e-6


def test_submersion_transport_rejects_non_submersion():
    tm = build_twistor_model(1)
    bad = np.ones((6, 7))
    with pytest.raises(ValueError):
        transported_semicalibration(tm.form("re_gamma0").to_float(), submersion=bad)


# -- maximizer structure ---------------------------------------------------------


def test_splitting_support_blade():
    f = AltForm.blade(4, [1, 2], 1.0)
    e0 = np.eye(4)[0]
    planes = [Plane.from_vectors(np.eye(4)[1:3])]
    assert splitting_support(f, e0, planes)
    tilted = Plane.from_vectors([[0.6, 0.8, 0, 0], [0, 0, 1, 0]])
    assert not splitting_support(f, e0, [tilted])


def test_splitting_support_precondition():
    f = AltForm.blade(4, [0, 1], 1.0)
    with pytest.raises(ValueError):
        splitting_support(f, np.eye(4)[0], [])


def test_splitting_support_re_gamma1():
    lf = default_link_frame(1)
    f = lf.form("re_gamma1").to_float()
    res = comass_search(f, params=SearchParams(restarts=120, seed=3))
    maxers = res.maximizer_planes(1e-12)
    assert len(maxers) >= 60
    e = np.zeros(7)
    e[0] = 1.0
    assert splitting_support(f, e, maxers, tol=1e-7)


def test_pure_type_projector():
    hk = build_hyperkahler_cone(1)
    assert is_pure_type(hk.form("re_upsilon1").to_float(), hk.I1.astype(float))
    assert is_pure_type(hk.form("omega2").to_float(), hk.I1.astype(float))
    assert not is_pure_type(hk.form("omega1").to_float(), hk.I1.astype(float))
    tm = build_twistor_model(1)
    assert is_pure_type(tm.form("re_gamma0").to_float(), tm.J_minus)


def test_isotropy_of_maximizers_omega2():
    # maximizers of the second Kahler form are its complex lines, on which the
    # first Kahler form vanishes
    hk = build_hyperkahler_cone(1)
    w2 = hk.form("omega2").to_float()
    res = comass_search(w2, params=SearchParams(restarts=120, seed=6))
    maxers = res.maximizer_planes(1e-12)
    assert len(maxers) >= 60
    assert isotropy_of_maximizers(w2, hk.I1.astype(float), hk.form("omega1"), maxers, tol=1e-7)


def test_isotropy_requires_pure_type():
    hk = build_hyperkahler_cone(1)
    with pytest.raises(ValueError):
        isotropy_of_maximizers(hk.form("omega1").to_float(), hk.I1.astype(float), hk.form("omega2"), [])


def test_batch_evaluate_matches_pointwise():
    hk = build_hyperkahler_cone(1)
    f = hk.form("Phi2").to_float()
    rng = np.random.default_rng(12)
    from caliber.planes import batch_random_planes

    frames = batch_random_planes(8, 4, 32, rng)
    vals = batch_evaluate(f, frames)
    for i in (0, 7, 31):
        assert vals[i] == pytest.approx(evaluate(f, list(frames[i])), abs=1e-12)
