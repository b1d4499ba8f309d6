import math
from dataclasses import replace

import pytest
from hypothesis import given, strategies as st

from trapcouple import (FilmWire, angular, critical_current, crosstalk,
                        detection_metrics, hz, mathieu_q, micromotion_limit,
                        parametric_rate, particle_lookup, rf_power_current,
                        trap_depth_and_secular)
from trapcouple.constants import Q_E
from trapcouple.database import get_trap_design, get_wire
from trapcouple.paultrap import is_stable

E = particle_lookup("electron")


@pytest.fixture(scope="module")
def design_a(db):
    return get_trap_design(db, "fig11a")


@pytest.fixture(scope="module")
def design_b(db):
    return get_trap_design(db, "fig11b")


def test_mathieu_q_oracle(design_b):
    # q_m = 8 beta q V / (m d^2 Omega^2), transcribed independently
    t = design_b
    expected = (8 * t.beta_geom * Q_E * t.v_rf
                / (E.mass * t.scale_d ** 2 * t.omega_rf ** 2))
    assert mathieu_q(E, t) == pytest.approx(expected, rel=1e-14)


def test_design_reference_consistency(design_a, design_b):
    for t in (design_a, design_b):
        q_m = mathieu_q(E, t)
        depth_j, w_z = trap_depth_and_secular(t, E)
        assert q_m == pytest.approx(t.reference["q_mathieu"], rel=0.15)
        assert depth_j / Q_E == pytest.approx(t.reference["depth_ev"],
                                              rel=0.15)
        assert hz(w_z) == pytest.approx(t.reference["omega_z_hz"],
                                        rel=0.15)
        assert w_z == pytest.approx(q_m * t.omega_rf / (2 * math.sqrt(2)),
                                    rel=1e-12)


def test_heavy_particle_unstable_drive_raises(design_b):
    # same drive on a deep-q configuration: scaling V up pushes q_m past 1
    hot = replace(design_b, v_rf=100.0)
    assert not is_stable(E, hot)
    with pytest.raises(ValueError, match="unstable"):
        trap_depth_and_secular(hot, E)


def test_critical_current_anchors(db):
    nb = get_wire(db, "nb", 10e-6, 100e-9)
    al = get_wire(db, "al", 10e-6, 100e-9)
    assert critical_current(nb) == pytest.approx(0.221, rel=1e-3)
    assert critical_current(al) == pytest.approx(0.0113, rel=1e-3)


@given(st.floats(min_value=1e-7, max_value=1e-4),
       st.floats(min_value=1e-8, max_value=1e-6))
def test_critical_current_sqrt_area_scaling(w, b):
    wire = FilmWire(width_w=w, thickness_b=b, penetration_lambda=9e-8,
                    critical_density_jc=1.8e12)
    wire4 = FilmWire(width_w=4 * w, thickness_b=b,
                     penetration_lambda=9e-8, critical_density_jc=1.8e12)
    assert critical_current(wire4) == pytest.approx(
        2 * critical_current(wire), rel=1e-12)


def test_rf_drive_current_anchors(design_a, design_b):
    _, i_a = rf_power_current(design_a.omega_rf, design_a.c_trap,
                              design_a.v_rf, 1e4)
    _, i_b = rf_power_current(design_b.omega_rf, design_b.c_trap,
                              design_b.v_rf, 1e4)
    assert i_a == pytest.approx(design_a.reference["i_rf_a"], rel=0.15)
    assert i_b == pytest.approx(design_b.reference["i_rf_a"], rel=0.15)


def test_dissipation_corner(design_b):
    # the sharpest corner of the drive budget: full C_total at the stacked
    # design's drive
    p, _ = rf_power_current(design_b.omega_rf, 150e-15, design_b.v_rf, 1e4)
    assert p <= 2e-3


def test_detection_network_capacitance_exact(design_a, design_b):
    ca, _ = detection_metrics(design_a, E, 1000.0, angular(1e9))
    cb, _ = detection_metrics(design_b, E, 1000.0, angular(1e9))
    # series(c, c) = c/2, checked against hand-reduced network values
    assert ca == pytest.approx(4.6e-15 + 21.3e-15, rel=1e-12)
    assert cb == pytest.approx(35e-15 + 146e-15, rel=1e-12)


def test_detection_linewidth_anchors(design_a, design_b):
    _, lw_a = detection_metrics(design_a, E, 1000.0, angular(1e9))
    _, lw_b = detection_metrics(design_b, E, 1000.0, angular(1e9))
    assert hz(lw_b) == pytest.approx(100e3, rel=0.10)
    assert hz(lw_a) == pytest.approx(0.7e6, rel=0.10)


def test_crosstalk_vanishes_for_symmetric_network(design_b):
    dq_rf, dq_det, eps = crosstalk(design_b, 1e4, 1e3, angular(1e9),
                                   design_b.omega_rf)
    assert eps == 0.0
    assert dq_rf == 0.0 and dq_det == 0.0


def test_crosstalk_small_for_percent_asymmetry(design_b):
    caps = dict(design_b.capacitances)
    caps["c_rf1"] = caps["c_rf1"] * 1.01
    skewed = replace(design_b, capacitances=caps)
    dq_rf, dq_det, eps = crosstalk(skewed, 1e3, 1e3, angular(1e9),
                                   design_b.omega_rf)
    assert 0 < eps < 0.05
    assert abs(dq_rf) < 0.05 and abs(dq_det) < 0.05


def test_parametric_rate_anchors(design_a):
    # evaluated at the design's quoted secular frequencies
    w_x = angular(design_a.reference["omega_xy_hz"])
    w_z = angular(design_a.reference["omega_z_hz"])
    rate1, _, _ = parametric_rate(design_a, E, w_x, w_z, 1.0)
    assert hz(rate1) == pytest.approx(0.92e6, rel=0.05)
    rate109, _, _ = parametric_rate(design_a, E, w_x, w_z, 0.109)
    assert hz(rate109) == pytest.approx(100e3, rel=0.10)


def test_parametric_rate_requires_anharmonic_factor(design_b):
    _, w_z = trap_depth_and_secular(design_b, E)
    with pytest.raises(ValueError, match="anharmonic"):
        parametric_rate(design_b, E, w_z / 2, w_z, 1.0)


def test_micromotion_limit_scaling():
    e_cap = 3e-4 * Q_E  # 0.3 meV capture energy [J]
    x = micromotion_limit(e_cap, 0.4, angular(9e9), E)
    assert x > 0
    x4 = micromotion_limit(4 * e_cap, 0.4, angular(9e9), E)
    assert x4 == pytest.approx(2 * x, rel=1e-12)
