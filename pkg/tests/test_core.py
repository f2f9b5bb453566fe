"""Moduli bookkeeping: inertia validation, chamber points, permutations."""

import math

import pytest

from eulertop.core import (
    CoincidentModuliError,
    DomainError,
    InertiaSpec,
    ModuliPoint,
    Permutation4,
    all_permutations,
    apply_permutation,
    lambda_proof,
    moduli_from_mechanics,
    mu_main,
)


@pytest.mark.parametrize(
    "moments",
    [(0.0, 1.0, 2.0), (-1.0, 2.0, 3.0), (1.0, float("nan"), 2.0), (1.0, float("inf"), 2.0)],
)
def test_inertia_rejects_nonpositive_or_nonfinite(moments):
    with pytest.raises(DomainError):
        InertiaSpec(*moments)


def test_inertia_rejects_coincident_moments():
    with pytest.raises(DomainError, match="distinct"):
        InertiaSpec(1.0, 1.0, 2.0)
    with pytest.raises(DomainError, match="distinct"):
        InertiaSpec(2.0, 1.0, 2.0)


def test_inertia_reciprocals_and_canonical_flag():
    spec = InertiaSpec(1 / 3, 1 / 2, 1.0)
    assert spec.canonical
    assert spec.reciprocals() == pytest.approx((3.0, 2.0, 1.0))
    assert not InertiaSpec(1.0, 1 / 2, 1 / 3).canonical


def test_inertia_from_reciprocals_roundtrip():
    spec = InertiaSpec.from_reciprocals(3.0, 2.0, 1.0)
    assert spec.reciprocals() == pytest.approx((3.0, 2.0, 1.0))


def test_moduli_from_mechanics_base_chamber():
    m = moduli_from_mechanics(InertiaSpec(1 / 3, 1 / 2, 1.0), l=1.0, h=2.5)
    assert m.coords() == pytest.approx((3.0, 2.0, 1.0, 2.5))
    assert m.l == 1.0
    assert m.h == pytest.approx(2.5)


def test_moduli_rejects_nonpositive_casimir():
    with pytest.raises(DomainError, match="positive"):
        ModuliPoint(3, 2, 1, 2.5, 0.0)


def test_moduli_scale_and_discriminant_distance():
    m = ModuliPoint(3, 2, 1, 2.5, 1.0)
    assert m.scale() == 3.0
    assert m.distance_to_discriminant() == pytest.approx(0.5)
    assert m.is_real()
    assert not ModuliPoint(3, 2, 1, 2.5 + 1e-3j, 1.0).is_real()


def test_moduli_coincident_pairs_and_replace():
    assert ModuliPoint(3, 2, 2, 2.5, 1.0).coincident_pairs() == [("b", "c")]
    assert ModuliPoint(3, 2, 1, 2.5, 1.0).coincident_pairs() == []
    m = ModuliPoint(3, 2, 1, 2.5, 1.0).replace(d=2.7)
    assert m.coords() == pytest.approx((3.0, 2.0, 1.0, 2.7))


def test_moduli_json_roundtrip_preserves_complex_parts():
    m = ModuliPoint(3, 2 - 1e-3j, 1, 2.5, 0.75)
    back = ModuliPoint.from_json_dict(m.to_json_dict())
    assert back.coords() == m.coords()
    assert back.l == m.l


def test_cross_ratio_on_equal_energy_line():
    # d = b puts the main variant at 1; the proof variant degenerates there.
    m = ModuliPoint(3, 2, 1, 2.0, 1.0)
    assert mu_main(m) == pytest.approx(1.0)
    with pytest.raises(CoincidentModuliError) as err:
        lambda_proof(m)
    assert err.value.pair == ("b", "d")


def test_cross_ratio_regular_and_fatal_coincidences():
    # Numerator pairs (d = a, b = c) zero the ratio without leaving the
    # domain; denominator pairs are genuine degenerations.
    assert mu_main(ModuliPoint(3, 2, 1, 3.0, 1.0)) == pytest.approx(0.0)
    assert mu_main(ModuliPoint(3, 2, 2, 2.5, 1.0)) == pytest.approx(0.0)
    with pytest.raises(CoincidentModuliError) as err:
        mu_main(ModuliPoint(3, 2, 1, 1.0, 1.0))
    assert err.value.pair == ("c", "d")
    with pytest.raises(CoincidentModuliError):
        mu_main(ModuliPoint(3, 3, 1, 2.5, 1.0))


@pytest.mark.parametrize("d", [2.4, 2.5 + 0.3j, 1.7 - 0.4j])
def test_mu_is_moebius_image_of_lambda(d):
    m = ModuliPoint(3.1, 2.2, 0.9, d, 1.0)
    lam = lambda_proof(m)
    assert mu_main(m) == pytest.approx(lam / (lam - 1.0))


def test_permutation_cycle_parsing():
    p = Permutation4.from_cycles("(ac)")
    assert p.images == ("c", "b", "a", "d")
    assert p.cycle_notation() == "(ac)"
    assert Permutation4.from_cycles("(abdc)").images == ("b", "d", "a", "c")
    assert Permutation4(("a", "b", "c", "d")).cycle_notation() == "e"


def test_permutation_group_structure():
    perms = all_permutations()
    assert len(perms) == 24
    assert len({p.images for p in perms}) == 24
    identity = Permutation4(("a", "b", "c", "d"))
    for p in perms:
        assert p.compose(p.inverse()).images == identity.images
        # notation roundtrip
        assert Permutation4.from_cycles(p.cycle_notation()).images == p.images


def test_apply_permutation_swaps_slots():
    m = ModuliPoint(3, 2, 1, 2.5, 1.0)
    swapped = apply_permutation(m, Permutation4.from_cycles("(ac)"))
    assert swapped.coords() == pytest.approx((1.0, 2.0, 3.0, 2.5))
    assert swapped.l == m.l


def test_apply_permutation_composes():
    m = ModuliPoint(3.0, 2.0, 1.0, 2.5, 2.0)
    p = Permutation4.from_cycles("(ab)")
    q = Permutation4.from_cycles("(cd)")
    both = apply_permutation(apply_permutation(m, p), q)
    assert both.coords() == apply_permutation(m, p.compose(q)).coords()
