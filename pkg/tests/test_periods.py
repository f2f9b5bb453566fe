"""Period values: closed form, quadratures, covariance, Birkhoff series."""

import math
from fractions import Fraction

import numpy as np
import pytest

from eulertop.core import CoincidentModuliError, DomainError, ModuliPoint
from eulertop.periods import (
    PrecisionError,
    S_closed_form,
    birkhoff_d_of_z,
    birkhoff_normalization,
    birkhoff_series,
    euler_period,
    phi_prime,
    quadrature_sigma_integral,
    quadrature_tau_integral,
    tanh_sinh,
    verify_connection_identity,
    verify_symmetries,
)

BASE = ModuliPoint(3, 2, 1, 2.5, 1.0)

# Frozen anchors, established against independent quadrature and the AGM.
S1 = -0.21243521802276702
S2 = 0.24858306243877654j
S3 = -0.21243521802276696 + 0.2485830624387766j
S_REVERSED = -0.18089288904942458  # at (1, 2, 3, 1.2)


def test_closed_form_at_the_distinguished_corner():
    # d = a makes the elliptic integral complete at modulus zero.
    got = S_closed_form(ModuliPoint(3, 2, 1, 3.0, 1.0))
    assert got.value == pytest.approx(-1.0 / 6.0, rel=1e-14)
    assert not got.branch_flagged


def test_closed_form_base_anchor():
    got = S_closed_form(BASE)
    assert got.value == pytest.approx(S1, rel=1e-14)
    assert not got.branch_flagged
    assert got.cycle_label == "sigma1_axis"


def test_closed_form_reversed_chamber():
    got = S_closed_form(ModuliPoint(1, 2, 3, 1.2, 1.0))
    assert got.value == pytest.approx(S_REVERSED, rel=1e-14)


def test_closed_form_flagged_ordering():
    # Slot order (b, a, c, d): the radicand goes negative and the branch
    # rule resolves the square root; the value is purely imaginary here.
    got = S_closed_form(ModuliPoint(2, 3, 1, 2.5, 1.0))
    assert got.branch_flagged
    assert got.value == pytest.approx(S2, rel=1e-13)


def test_closed_form_scales_with_casimir():
    # S carries the 1/sqrt(l) prefactor.
    quarter = S_closed_form(ModuliPoint(3, 2, 1, 2.5, 4.0))
    assert quarter.value == pytest.approx(S1 / 2.0, rel=1e-13)


def test_closed_form_singular_pairs():
    with pytest.raises(CoincidentModuliError):
        S_closed_form(ModuliPoint(3, 2, 1, 1.0, 1.0))  # d = c
    with pytest.raises(CoincidentModuliError):
        S_closed_form(ModuliPoint(3, 3, 1, 2.5, 1.0))  # b = a
    with pytest.raises(CoincidentModuliError):
        S_closed_form(ModuliPoint(3, 2, 1, 2.0, 1.0))  # d = b: divergence


def test_phi_prime_axes():
    assert phi_prime("p1", BASE).value == pytest.approx(S1, rel=1e-14)
    p2 = phi_prime("p2", BASE)
    assert p2.branch_flagged
    assert p2.value == pytest.approx(-1j * S2, rel=1e-13)
    p3 = phi_prime("p3", ModuliPoint(3, 2, 1, 1.5, 1.0))
    assert p3.value == pytest.approx(S1, rel=1e-13)
    with pytest.raises(ValueError):
        phi_prime("p4", BASE)


def test_euler_period_is_six_pi_S():
    assert euler_period(BASE) == pytest.approx(6.0 * math.pi * abs(S1), rel=1e-14)
    assert euler_period(BASE) == pytest.approx(4.004309521824426, rel=1e-13)


def test_tanh_sinh_endpoint_singularity():
    # Integrand weights receive distances to the endpoints, so inverse
    # square-root singularities integrate cleanly: arcsine mass is pi.
    val = tanh_sinh(lambda x, dlo, dhi: 1.0 / math.sqrt(dlo * dhi), 0.0, 1.0)
    assert val == pytest.approx(math.pi, rel=1e-13)


def test_tanh_sinh_smooth_integrand():
    val = tanh_sinh(lambda x, dlo, dhi: math.exp(x), 0.0, 2.0)
    assert val == pytest.approx(math.exp(2.0) - 1.0, rel=1e-13)


@pytest.mark.parametrize("s", [0.0, 1.0])
def test_sigma_quadrature_matches_closed_form(s):
    got = quadrature_sigma_integral(BASE, s=s)
    assert got.value == pytest.approx(S1, rel=1e-12)


def test_sigma_quadrature_reversed_chamber():
    got = quadrature_sigma_integral(ModuliPoint(1, 2, 3, 1.2, 1.0))
    assert got.value == pytest.approx(S_REVERSED, rel=1e-12)


def test_sigma_quadrature_needs_real_chamber():
    with pytest.raises(DomainError):
        quadrature_sigma_integral(ModuliPoint(3, 2, 1, 2.5 + 1e-3j, 1.0))
    with pytest.raises(DomainError):
        quadrature_sigma_integral(ModuliPoint(3, 2, 1, 1.5, 1.0))  # d below b


def test_tau_quadrature_matches_connecting_value():
    got = quadrature_tau_integral(BASE)
    assert got.value == pytest.approx(S3, rel=1e-12)


def test_tau_quadrature_needs_negative_lambda():
    with pytest.raises(DomainError):
        quadrature_tau_integral(ModuliPoint(3, 2, 1, 1.5, 1.0))


def test_connection_identity_residual():
    assert verify_connection_identity(BASE) < 1e-12
    assert verify_connection_identity(ModuliPoint(3, 2, 1, 2.2, 0.5)) < 1e-12


def test_symmetry_classes_partition():
    rep = verify_symmetries(BASE)
    assert rep.class_sizes == {"S1": 8, "S2": 8, "S3": 8}
    assert rep.max_unflagged_deviation < 1e-12
    assert rep.stabilizer_generators == ("(bc)", "(abdc)")
    assert rep.class_values["S1"] == pytest.approx(S1, rel=1e-12)
    assert rep.class_values["S2"] == pytest.approx(S2, rel=1e-12)
    assert rep.class_values["S3"] == pytest.approx(S3, rel=1e-12)


def test_symmetry_flags_are_cut_crossings():
    rep = verify_symmetries(BASE)
    assert rep.flagged_count == 9
    assert rep.flagged_count <= rep.cut_resolved_count
    per_class = {}
    for row in rep.flagged_rows:
        per_class[row.class_key] = per_class.get(row.class_key, 0) + 1
    assert per_class == {"S2": 4, "S3": 5}
    # the identity class stays on the principal branch throughout
    assert all(row.class_key != "S1" for row in rep.flagged_rows)


def test_birkhoff_polynomials_exact():
    series = birkhoff_series(order=3)
    F = Fraction
    assert series.pn(0) == (F(1),)
    assert series.pn(1) == (F(1), F(1))
    assert series.pn(2) == (F(9, 4), F(3, 2), F(9, 4))
    assert series.pn(3) == (F(25, 4), F(15, 4), F(15, 4), F(25, 4))


def test_birkhoff_palindromes_and_roots():
    series = birkhoff_series(order=12)
    for n in range(13):
        assert series.is_palindromic(n)
    for n in range(1, 9):
        radii = np.abs(series.roots(n))
        np.testing.assert_allclose(radii, 1.0, atol=1e-9)


def test_birkhoff_values_at_rational_shape():
    series = birkhoff_series(s=Fraction(1, 3), order=3)
    assert series.pn_value(1) == Fraction(4, 3)
    assert series.pn_value(2) == Fraction(3)
    assert series.pn_value(3) == Fraction(220, 27)


def test_birkhoff_json_roundtrip():
    series = birkhoff_series(order=5)
    back = type(series).from_json_dict(series.to_json_dict())
    assert back.order == 5
    assert all(back.pn(n) == series.pn(n) for n in range(6))


def test_birkhoff_order_budget():
    with pytest.raises(PrecisionError):
        birkhoff_series(order=33)
    with pytest.raises(PrecisionError):
        birkhoff_series(order=-1)


def test_birkhoff_normalization_values():
    assert birkhoff_normalization(2.0, 1.0, 3.0) == pytest.approx(-1.0 / 6.0, rel=1e-14)
    assert birkhoff_normalization(2.0, 1.0, 3.0, l=4.0) == pytest.approx(-1.0 / 12.0, rel=1e-14)
    with pytest.raises(DomainError):
        birkhoff_normalization(3.0, 2.0, 1.0)


def test_birkhoff_series_matches_closed_form():
    # Near the extreme reciprocal the truncated series reproduces S.
    a, b, c = 2.0, 1.0, 3.0
    s = (a - b) / (c - b)
    C = birkhoff_normalization(a, b, c)
    series = birkhoff_series(s=s, order=12)
    for z, tol in ((0.02, 1e-14), (0.05, 1e-9)):
        d = birkhoff_d_of_z(a, b, c, z)
        want = S_closed_form(ModuliPoint(b, a, c, d, 1.0)).value
        assert C * series.evaluate(z) == pytest.approx(want, abs=tol)
