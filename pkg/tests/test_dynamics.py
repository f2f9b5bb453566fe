"""Rigid-body vector field, invariants, equilibria, and return times."""

import math

import numpy as np
import pytest

from eulertop.core import DomainError, InertiaSpec, ModuliPoint
from eulertop.dynamics import (
    MomentumState,
    SeparatrixError,
    classify_equilibria,
    conserved,
    euler_rhs,
    integrate_orbit,
    orbit_period,
)
from eulertop.periods import euler_period

INERTIA = InertiaSpec(1 / 3, 1 / 2, 1.0)


def chamber_state(d: float, l: float = 1.0) -> MomentumState:
    """Point on the p2 = 0 section of the orbit with energy h = d * l."""
    a, b, c = INERTIA.reciprocals()
    p1 = math.sqrt(2 * l * (d - c) / (a - c))
    p3 = math.sqrt(2 * l * (a - d) / (a - c))
    return MomentumState(p1, 0.0, p3)


def test_rhs_matches_cyclic_formula():
    p = np.array([0.7, -1.1, 0.4])
    got = euler_rhs(p, INERTIA)
    a, b, c = INERTIA.reciprocals()
    want = np.array([
        -(b - c) * p[1] * p[2],
        -(c - a) * p[2] * p[0],
        -(a - b) * p[0] * p[1],
    ])
    np.testing.assert_allclose(got, want, rtol=1e-15)


def test_rhs_is_tangent_to_both_invariants():
    rng = np.random.default_rng(7)
    for _ in range(20):
        p = rng.normal(size=3)
        v = euler_rhs(p, INERTIA)
        grad_l = p
        grad_h = p * INERTIA.reciprocals()
        assert abs(v @ grad_l) < 1e-12
        assert abs(v @ grad_h) < 1e-12


def test_conserved_values():
    h, l = conserved(np.array([1.0, 0.0, 1.0]), INERTIA)
    assert h == pytest.approx(2.0)
    assert l == pytest.approx(1.0)


def test_classify_equilibria_axes_and_stability():
    eqs = classify_equilibria(INERTIA, 1.0)
    assert len(eqs) == 6
    by_axis = {}
    for e in eqs:
        by_axis.setdefault(e.axis, []).append(e)
        np.testing.assert_allclose(
            np.linalg.norm(e.state.as_array()), math.sqrt(2.0), rtol=1e-14
        )
        np.testing.assert_allclose(euler_rhs(e.state.as_array(), INERTIA), 0.0, atol=1e-14)
    assert {axis: {e.stability for e in group} for axis, group in by_axis.items()} == {
        "p1": {"elliptic"},
        "p2": {"hyperbolic"},
        "p3": {"elliptic"},
    }


def test_integrate_orbit_conserves_invariants():
    traj = integrate_orbit(chamber_state(2.5), INERTIA, 50.0)
    assert traj.drift_h < 1e-10
    assert traj.drift_l < 1e-10
    assert traj.t[0] == 0.0
    assert traj.t[-1] == pytest.approx(50.0)
    assert traj.p.shape == (len(traj.t), 3)


def test_integrate_orbit_rejects_bad_horizon():
    with pytest.raises(DomainError):
        integrate_orbit(chamber_state(2.5), INERTIA, -1.0)


@pytest.mark.parametrize("d", [2.1, 2.5, 2.9])
def test_orbit_period_matches_closed_form(d):
    period = orbit_period(chamber_state(d), INERTIA)
    want = euler_period(ModuliPoint(3, 2, 1, d, 1.0))
    assert period == pytest.approx(want, rel=1e-9)


def test_orbit_period_frozen_value():
    # 6 pi |S| at the base chamber point.
    assert orbit_period(chamber_state(2.5), INERTIA) == pytest.approx(
        4.004309521824426, rel=1e-10
    )


def test_orbit_period_is_phase_independent():
    d = 2.5
    t0 = orbit_period(chamber_state(d), INERTIA)
    traj = integrate_orbit(chamber_state(d), INERTIA, 0.37, n_samples=11)
    moved = MomentumState(*traj.p[-1])
    t1 = orbit_period(moved, INERTIA)
    assert t1 == pytest.approx(t0, rel=1e-9)


def test_orbit_period_other_family():
    # Same section construction mirrored into the p3-rotation regime.
    state = chamber_state(1.5)
    period = orbit_period(state, INERTIA)
    want = euler_period(ModuliPoint(3, 2, 1, 1.5, 1.0), axis="p3")
    assert period == pytest.approx(want, rel=1e-9)


def test_orbit_period_separatrix_refusal():
    with pytest.raises(SeparatrixError):
        orbit_period(chamber_state(2.0), INERTIA)
    with pytest.raises(SeparatrixError):
        orbit_period(chamber_state(2.0 * (1.0 + 1e-10)), INERTIA)


def test_orbit_period_equilibrium_refusal():
    with pytest.raises(DomainError, match="equilibrium"):
        orbit_period(MomentumState(math.sqrt(2.0), 0.0, 0.0), INERTIA)
    with pytest.raises(DomainError):
        orbit_period(MomentumState(0.0, 0.0, 0.0), INERTIA)
