"""Two-electron collision kinematics: analytic kick bounds and the
batched trajectory integrator."""

import dataclasses
import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from trapcouple.collisions import (
    CollisionConfig,
    KCOUL,
    MU,
    _integrate_batch,
    _sample_initial_state,
    collision_mc,
    gamma_factor,
    kick_bound,
    per_sample_kick_bound,
    rf_phase_scan,
    rutherford_angle,
    static_kick,
    two_electron_trajectory,
)
from trapcouple.constants import EV, M_E
from trapcouple.database import collision_preset


@pytest.fixture(scope="module")
def cfg14(db):
    return collision_preset(db, "fig14")


@pytest.fixture(scope="module")
def cfg15(db):
    return collision_preset(db, "fig15")


# --- analytic pieces ---------------------------------------------------


def test_gamma_factor_anchors():
    # full trap depth and the downselected capture threshold
    assert gamma_factor(1.01, 30.0) == pytest.approx(1.83, rel=5e-3)
    assert gamma_factor(3e-4, 30.0) == pytest.approx(1.01, rel=5e-3)


@given(st.floats(1e-6, 10.0), st.floats(1.0, 100.0))
def test_gamma_factor_formula(e_th, e_p):
    r = math.sqrt(e_th / e_p)
    assert gamma_factor(e_th, e_p) == pytest.approx(1 + 4 * r + 3 * r * r,
                                                    rel=1e-12)


def test_kick_bound_values(cfg14):
    gamma, mean_kick, heating = kick_bound(cfg14)
    assert gamma == pytest.approx(gamma_factor(1.01, 30.0), rel=1e-12)
    assert mean_kick == pytest.approx(gamma * KCOUL / cfg14.beam_radius_r0
                                      / EV, rel=1e-12)
    # cold-target bound: gamma -> 1.0127 at 0.3 meV threshold
    cold = dataclasses.replace(cfg14, e_thresh=3e-4)
    _, mk_cold, _ = kick_bound(cold)
    assert mk_cold / 30.0 == pytest.approx(4.86e-7, rel=0.02)


def test_static_kick_oracle():
    """Closed form vs a sympy evaluation of the head-on-limit algebra."""
    ep, b, k = sp.symbols("ep b k", positive=True)
    x = k / (b * ep)
    expr = ep * x**2 / (1 + x**2)
    for e_p, bb in [(30.0, 1e-9), (30.0, 1e-7), (5.0, 3e-10)]:
        want = float(expr.subs({ep: e_p * EV, b: bb, k: KCOUL})) / EV
        assert static_kick(e_p, bb) == pytest.approx(want, rel=1e-12)


def test_static_kick_limits():
    # b -> 0 transfers the full primary energy; large b falls off as 1/b^2
    assert static_kick(30.0, 1e-15) == pytest.approx(30.0, rel=1e-3)
    far, farther = static_kick(30.0, 1e-5), static_kick(30.0, 2e-5)
    assert far / farther == pytest.approx(4.0, rel=1e-6)


def test_rutherford_angle_oracle():
    # head-on limit -> pi; half-angle tangent identity
    v = math.sqrt(2 * 30.0 * EV / M_E)
    b90 = KCOUL / (MU * v**2)   # 90-degree impact parameter
    assert rutherford_angle(b90, v) == pytest.approx(math.pi / 2, rel=1e-12)
    th = rutherford_angle(3 * b90, v)
    assert math.tan(th / 2) == pytest.approx(1 / 3, rel=1e-12)
    with pytest.raises(ValueError):
        rutherford_angle(-1e-9, v)


def test_per_sample_bound_scalar_and_vector():
    v = math.sqrt(2 * 30.0 * EV / MU)
    one = per_sample_kick_bound(30.0, 0.1, 1e-8, v)
    vec = per_sample_kick_bound(30.0, np.full(3, 0.1), np.full(3, 1e-8),
                                np.full(3, v))
    assert np.all(vec == one)
    # a contact-distance encounter (b^2 clamped to 0) maxes the bound
    d_contact = KCOUL / (0.5 * MU * v**2)
    hard = per_sample_kick_bound(30.0, 0.0, 0.9 * d_contact, v)
    assert hard == pytest.approx(30.0, rel=1e-12)
    # bound decreases with separation
    seps = np.geomspace(1e-9, 1e-6, 8)
    vals = per_sample_kick_bound(30.0, 0.0, seps, np.full(8, v))
    assert np.all(np.diff(vals) < 0)


# --- sampling stream ---------------------------------------------------


def test_sample_initial_state_deterministic(cfg14):
    y_a, e_a, ph_a = _sample_initial_state(cfg14, 17)
    y_b, e_b, ph_b = _sample_initial_state(cfg14, 17)
    assert np.array_equal(y_a, y_b) and e_a == e_b and ph_a == ph_b
    y_c, _, _ = _sample_initial_state(cfg14, 18)
    assert not np.array_equal(y_a, y_c)


def test_sample_initial_state_ranges(cfg14):
    for i in range(64):
        y, e_s, phase = _sample_initial_state(cfg14, i)
        assert 0 <= e_s <= cfg14.u_depth
        b = math.hypot(y[0], y[1])
        assert b <= cfg14.beam_radius_r0
        assert y[2] == cfg14.injection_z
        # drawn secular speed matches the drawn energy
        v = np.linalg.norm(y[9:12])
        assert 0.5 * M_E * v**2 == pytest.approx(e_s * EV, rel=1e-12)
        assert phase == 0.0   # no rf drive in the isotropic preset


# --- integrator oracles ------------------------------------------------


def test_energy_conservation_lone_target(cfg14):
    """Without the primary, the target's total energy in the static trap
    is conserved over many secular periods."""
    w = cfg14.trap_freqs[0]
    traj = two_electron_trajectory(cfg14, target_e0=0.5, phase=0.0,
                                   no_primary=True,
                                   t_end=20 * 2 * math.pi / w)
    assert not traj.failed
    e = traj.target_secular
    assert np.max(np.abs(e - e[0])) / e[0] < 1e-6


def test_time_reversal(cfg14):
    """Integrate an encounter forward, flip velocities, integrate back:
    recovers the initial state."""
    v_p = math.sqrt(2 * cfg14.primary_energy_ep * EV / M_E)
    y0 = np.zeros((1, 13))
    y0[0, 0] = 2e-9
    y0[0, 2] = cfg14.injection_z
    y0[0, 5] = v_p
    t_max = 2 * abs(cfg14.injection_z) / v_p
    fwd = _integrate_batch(cfg14, y0, np.zeros(1), t_max,
                           stop_on_exit=False)
    assert not fwd.failed[0]
    back = fwd.y.copy()
    back[0, 3:6] *= -1
    back[0, 9:12] *= -1
    rev = _integrate_batch(cfg14, back, np.zeros(1), fwd.t[0],
                           stop_on_exit=False)
    assert not rev.failed[0]
    got = rev.y[0]
    got[3:6] *= -1
    got[9:12] *= -1
    # positions to sub-nm on a mm-scale flight, velocities to 1e-5 relative
    assert np.allclose(got[0:3], y0[0, 0:3], atol=2e-10)
    assert np.allclose(got[6:9], y0[0, 6:9], atol=2e-10)
    assert np.allclose(got[3:6], y0[0, 3:6], rtol=0, atol=1e-5 * v_p)
    assert np.allclose(got[9:12], y0[0, 9:12], rtol=0, atol=1e-5 * v_p)


def test_work_matches_static_kick(cfg14):
    """A distant, fast flyby past a cold target reproduces the free-space
    impulsive kick."""
    b = 1e-7
    traj = two_electron_trajectory(cfg14, target_e0=0.0, phase=0.0,
                                   impact_b=b)
    assert not traj.failed
    assert traj.work[-1] == pytest.approx(static_kick(30.0, b), rel=0.05)


# --- Monte Carlo -------------------------------------------------------


def test_collision_mc_deterministic(cfg14):
    a = collision_mc(cfg14, 32)
    b = collision_mc(cfg14, 32)
    assert np.array_equal(a.abs_de, b.abs_de)
    assert a.mean_abs_de == b.mean_abs_de
    c = collision_mc(dataclasses.replace(cfg14, seed=1), 32)
    assert not np.array_equal(a.abs_de, c.abs_de)


def test_collision_mc_small_batch(cfg14):
    hist = collision_mc(cfg14, 200)
    assert hist.rejected_count == 0
    assert hist.sample_count == 200
    assert hist.counts.sum() == 200
    # every sample sits under its own analytic bound
    bound = per_sample_kick_bound(cfg14.primary_energy_ep, hist.e_s0,
                                  hist.min_separation, hist.rel_speed)
    assert np.all(hist.abs_de <= bound * (1 + 1e-9))
    # and under the beam-averaged bound in the mean
    _, mean_bound, _ = kick_bound(cfg14)
    assert hist.mean_abs_de < mean_bound


def test_collision_mc_rejects_rf(cfg15):
    with pytest.raises(ValueError):
        collision_mc(cfg15, 4)


# --- rf phase dynamics -------------------------------------------------


def test_rf_phase_dichotomy(cfg15):
    """At a near-critical beam offset the rf phase decides whether the
    target boils out of the trap or stays confined."""
    escape = two_electron_trajectory(cfg15, target_e0=0.0,
                                     phase=7 * math.pi / 4, impact_b=2.6e-10)
    stay = two_electron_trajectory(cfg15, target_e0=0.0,
                                   phase=3 * math.pi / 4, impact_b=2.6e-10)
    assert escape.escape and not escape.failed
    assert (not stay.escape) and not stay.failed
    assert stay.target_secular[-1] < cfg15.u_depth


def test_rf_phase_scan_row(cfg15):
    rows = rf_phase_scan(cfg15, [1e-9], n_phases=8)
    row = rows[0]
    assert row.e_s_min <= row.e_s_median <= row.e_s_max
    assert row.e_s_final.shape == (8,)
    assert row.primary_e_min <= row.primary_e_max
    # phase scatter of the primary's collision energy is order E_p
    assert (row.primary_e_max - row.primary_e_min) > 0.1 * 30.0


def test_config_validation(cfg14):
    with pytest.raises(ValueError):
        dataclasses.replace(cfg14, u_depth=-1.0)
    with pytest.raises(ValueError):
        dataclasses.replace(cfg14, injection_z=1e-3)
    with pytest.raises(ValueError):
        collision_mc(cfg14, 0)
