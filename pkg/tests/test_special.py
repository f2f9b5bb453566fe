"""Elliptic integrals, hypergeometric bases, connection matrices, continuation."""

import math

import numpy as np
import pytest

from eulertop.special import (
    Arc,
    BranchCutError,
    ComplexPath,
    DivergenceError,
    Line,
    LOG16,
    PathTooCloseError,
    RegionError,
    basis_eval,
    connection,
    continue_frame,
    elliptic_K,
    gauss_ode_residual,
    hyper_F,
    hyper_F_deriv,
    hyper_Fstar,
    hyper_Fstar_deriv,
    phi_value,
)

# Frozen reference values (AGM / series, cross-checked against scipy.special).
K_HALF = 1.8540746773013719
K_MINUS_ONE = 1.3110287771460598
F_03 = 1.0910959103627813
FSTAR_03 = 0.18808374835689526


def test_elliptic_K_at_zero_is_quarter_turn():
    assert elliptic_K(0.0) == pytest.approx(math.pi / 2, rel=1e-15)


def test_elliptic_K_real_values():
    assert elliptic_K(0.5) == pytest.approx(K_HALF, rel=1e-14)
    assert elliptic_K(-1.0) == pytest.approx(K_MINUS_ONE, rel=1e-14)


def test_elliptic_K_complex_argument():
    got = elliptic_K(0.3 + 0.4j)
    assert got == pytest.approx(1.6502419256419398 + 0.20951070412398679j, rel=1e-13)


def test_elliptic_K_diverges_at_one():
    with pytest.raises(DivergenceError):
        elliptic_K(1.0)


def test_elliptic_K_cut_needs_a_side():
    with pytest.raises(BranchCutError):
        elliptic_K(2.0)
    up = elliptic_K(2.0, side=+1)
    down = elliptic_K(2.0, side=-1)
    # Reciprocal-modulus formula: K(1/2)(1 +- i)/sqrt(2) on the two sides.
    want = K_HALF / math.sqrt(2.0)
    assert up == pytest.approx(want + 1j * want, rel=1e-13)
    assert down == pytest.approx(np.conj(up), rel=1e-13)


def test_elliptic_K_sided_matches_offcut_limit():
    eps = 1e-9
    for side in (+1, -1):
        lim = elliptic_K(2.0 + side * 1j * eps)
        assert elliptic_K(2.0, side=side) == pytest.approx(lim, rel=1e-7)


def test_hyper_F_matches_reference():
    assert hyper_F(0.3) == pytest.approx(F_03, rel=1e-14)
    assert hyper_Fstar(0.3) == pytest.approx(FSTAR_03, rel=1e-13)
    # F is (2/pi) K pointwise on the disc.
    z = 0.41 + 0.27j
    assert hyper_F(z) == pytest.approx((2.0 / math.pi) * elliptic_K(z), rel=1e-13)


def test_hyper_F_region_guard():
    with pytest.raises(RegionError):
        hyper_F(1.2)


@pytest.mark.parametrize("func,deriv", [(hyper_F, hyper_F_deriv), (hyper_Fstar, hyper_Fstar_deriv)])
def test_series_derivatives_match_finite_differences(func, deriv):
    z = 0.23 - 0.31j
    h = 1e-6
    fd = (func(z + h) - func(z - h)) / (2.0 * h)
    assert deriv(z) == pytest.approx(fd, rel=1e-8)


@pytest.mark.parametrize(
    "z,side",
    [(2.5, +1), (2.5, -1), (2.5 + 0.3j, +1), (2.5 - 0.3j, -1), (-0.4 + 1.9j, +1), (0.3 + 0.4j, +1)],
)
def test_phi5_combination(z, side):
    lhs = phi_value("phi5", z, side=side)
    rhs = side * 1j * phi_value("phi1", z, side=side) + phi_value("phi3", z, side=side)
    assert lhs == pytest.approx(rhs, rel=1e-13)


@pytest.mark.parametrize("z,side", [(0.3 + 0.4j, +1), (0.3 - 0.4j, -1), (0.6, +1), (0.6, -1)])
def test_phi2s_combination(z, side):
    lhs = phi_value("phi2s", z, side=side)
    rhs = (LOG16 + side * 1j * math.pi) * phi_value("phi1", z, side=side) - math.pi * phi_value(
        "phi5", z, side=side
    )
    assert lhs == pytest.approx(rhs, rel=1e-13)


def test_phi_value_rejects_bad_side_and_name():
    with pytest.raises(ValueError):
        phi_value("phi1", 0.3, side=0)
    with pytest.raises(ValueError):
        phi_value("phi9", 0.3)


def test_basis_eval_regions_are_strict():
    with pytest.raises(RegionError):
        basis_eval("at0", 1.1)
    with pytest.raises(RegionError):
        basis_eval("at1", -0.1)
    with pytest.raises(RegionError):
        basis_eval("atInf", 0.9)
    with pytest.raises(BranchCutError):
        basis_eval("at0", -0.5)
    with pytest.raises(BranchCutError):
        basis_eval("atInf", 2.5)
    with pytest.raises(DivergenceError):
        basis_eval("at0", 0.0)


def test_basis_derivatives_match_finite_differences():
    for basis_id, z in [("at0", 0.3 + 0.2j), ("at1", 0.8 + 0.25j), ("atInf", 1.4 + 0.9j)]:
        frame = basis_eval(basis_id, z)
        h = 1e-6
        up = basis_eval(basis_id, z + h)
        dn = basis_eval(basis_id, z - h)
        for k in range(2):
            fd = (up.values[k] - dn.values[k]) / (2.0 * h)
            assert frame.derivs[k] == pytest.approx(fd, rel=1e-7)


def test_connection_at0_at1_pointwise():
    z = 0.5 + 0.2j
    M = connection("at0", "at1").matrix
    vf = np.array(basis_eval("at0", z).values)
    vt = np.array(basis_eval("at1", z).values)
    np.testing.assert_allclose(vf, M @ vt, rtol=0, atol=1e-13)
    assert np.linalg.det(M) == pytest.approx(-1.0, abs=1e-12)


def test_connection_at1_atInf_pointwise_upper_sheet():
    z = 1.2 + 0.8j
    M = connection("at1", "atInf").matrix
    vf = np.array(basis_eval("at1", z).values)
    vt = np.array(basis_eval("atInf", z).values)
    np.testing.assert_allclose(vf, M @ vt, rtol=0, atol=1e-13)


def test_connection_at0_atInf_via_continuation():
    # The regions do not overlap; the block is the upper-half-plane sheet,
    # so transport the at0 frame across the unit circle and compare there.
    z0, z1 = 0.5 + 0.3j, 1.2 + 0.8j
    got = continue_frame(basis_eval("at0", z0), ComplexPath([Line(z0, z1)]))
    want = connection("at0", "atInf").matrix @ np.array(basis_eval("atInf", z1).values)
    np.testing.assert_allclose(np.array(got.values), want, rtol=0, atol=1e-12)


def test_connection_inverse_and_composition():
    ab = connection("at0", "at1").matrix
    ba = connection("at1", "at0").matrix
    np.testing.assert_allclose(ab @ ba, np.eye(2), rtol=0, atol=1e-14)
    composed = connection("at1", "at0").matrix @ connection("at0", "atInf").matrix
    np.testing.assert_allclose(connection("at1", "atInf").matrix, composed, rtol=0, atol=1e-14)
    with pytest.raises(ValueError):
        connection("at0", "period")


def test_path_segments_must_join():
    with pytest.raises(ValueError):
        ComplexPath([Line(0.0, 1.0), Line(1.1, 2.0)])


def test_path_samples_and_json_roundtrip():
    path = ComplexPath([
        Line(0.3, 0.5 + 0.5j),
        Arc(0.0, abs(0.5 + 0.5j), np.angle(0.5 + 0.5j), np.angle(0.5 + 0.5j) + 2 * np.pi),
        Line(0.5 + 0.5j, 0.3),
    ])
    pts = path.samples(spacing=0.02)
    steps = np.abs(np.diff(pts))
    assert steps.max() <= 0.02 + 1e-12
    back = ComplexPath.from_json_dict(path.to_json_dict())
    np.testing.assert_allclose(back.samples(spacing=0.02), pts, rtol=0, atol=1e-15)


def test_continuation_closes_trivial_loop():
    # The circle must enclose neither singular point for the frame to close.
    z0 = 0.3 + 0.2j
    frame = basis_eval("at0", z0)
    center, r = 0.35 + 0.35j, 0.15
    loop = ComplexPath([
        Line(z0, center + r),
        Arc(center, r, 0.0, 2 * np.pi),
        Line(center + r, z0),
    ])
    out = continue_frame(frame, loop)
    np.testing.assert_allclose(np.array(out.values), np.array(frame.values), rtol=1e-12)
    assert out.branch_log["around0"] == pytest.approx(0.0, abs=1e-9)
    assert out.branch_log["around1"] == pytest.approx(0.0, abs=1e-9)


def test_continuation_records_winding_and_monodromy():
    # One turn around z = 0: f1 is single valued, f2 gains 2 pi i f1.
    z0 = 0.3 + 0.2j
    frame = basis_eval("at0", z0)
    loop = ComplexPath([Arc(0.0, abs(z0), np.angle(z0), np.angle(z0) + 2 * np.pi)])
    out = continue_frame(frame, loop)
    assert out.branch_log["around0"] == pytest.approx(1.0, abs=1e-9)
    f1, f2 = frame.values
    g1, g2 = out.values
    assert g1 == pytest.approx(f1, rel=1e-12)
    assert g2 == pytest.approx(f2 + 2j * np.pi * f1, rel=1e-12)


def test_continuation_taylor_and_ode_agree():
    z0 = 0.3 + 0.2j
    frame = basis_eval("at0", z0)
    mid = 0.5 + 0.5j
    loop = ComplexPath([
        Line(z0, mid),
        Arc(0.0, abs(mid), np.angle(mid), np.angle(mid) + 2 * np.pi),
        Line(mid, z0),
    ])
    taylor = continue_frame(frame, loop, method="taylor")
    ode = continue_frame(frame, loop, method="ode")
    for u, v in zip(taylor.values + taylor.derivs, ode.values + ode.derivs):
        assert abs(u - v) / max(1.0, abs(u)) < 1e-8


def test_continuation_guards():
    z0 = 0.3 + 0.2j
    frame = basis_eval("at0", z0)
    with pytest.raises(ValueError, match="based at"):
        continue_frame(frame, ComplexPath([Line(0.5, 0.7)]))
    with pytest.raises(PathTooCloseError):
        continue_frame(frame, ComplexPath([Line(z0, 1e-9 + 0.0j)]))
    with pytest.raises(ValueError):
        continue_frame(frame, ComplexPath([Line(z0, 0.5)]), method="rk4")


@pytest.mark.parametrize("basis_id,z", [("at0", 0.4 + 0.1j), ("at1", 0.9 - 0.3j), ("atInf", 1.6 + 1.1j)])
def test_basis_solutions_satisfy_the_ode(basis_id, z):
    frame = basis_eval(basis_id, z)
    for k in range(2):
        res = gauss_ode_residual(lambda w, k=k, b=basis_id: basis_eval(b, w).values[k], z)
        assert abs(res) < 1e-8


def test_ode_residual_flags_non_solutions():
    assert abs(gauss_ode_residual(lambda w: w * w, 0.4 + 0.1j)) > 1e-2
