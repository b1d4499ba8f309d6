import math

import pytest
from hypothesis import given, settings, strategies as st

from trapcouple import (Environment, angular, bvd_equivalent,
                        capacitive_coupling, coherence_time, cooling_limit,
                        coupling_degradation, hz, min_quality_factor,
                        particle_bvd, particle_lookup,
                        particle_resonator_coupling, quarterwave_lumped,
                        swap_metric)
from trapcouple.constants import M_E, Q_E

pos = st.floats(min_value=1e-6, max_value=1e6)


# --- Butterworth-Van Dyke equivalence -------------------------------------

def test_bvd_matches_closed_form():
    m, gamma, w0, beta = 1.7e-6, 3.1e-9, angular(9.4e6), 0.021
    b = bvd_equivalent(m, gamma, w0, beta)
    assert b.inductance == pytest.approx(m / beta ** 2, rel=1e-14)
    assert b.resistance == pytest.approx(gamma / beta ** 2, rel=1e-14)
    assert b.capacitance == pytest.approx(beta ** 2 / (m * w0 ** 2),
                                          rel=1e-14)


@given(pos, pos, pos, pos)
def test_bvd_resonance_invariant(m, gamma, f0, beta):
    w0 = angular(f0)
    b = bvd_equivalent(m, gamma, w0, beta)
    assert b.inductance * b.capacitance * w0 ** 2 == pytest.approx(
        1.0, rel=1e-12)


@given(pos, pos, pos)
def test_bvd_beta_scaling(m, f0, beta):
    w0 = angular(f0)
    b1 = bvd_equivalent(m, 0.0, w0, beta)
    b2 = bvd_equivalent(m, 0.0, w0, 2 * beta)
    assert b2.inductance == pytest.approx(b1.inductance / 4, rel=1e-12)
    assert b2.capacitance == pytest.approx(4 * b1.capacitance, rel=1e-12)


def test_lossless_oscillator_has_zero_resistance():
    assert bvd_equivalent(1e-6, 0.0, angular(1e7), 0.01).resistance == 0.0


def test_bvd_rejects_zero_beta():
    with pytest.raises(ValueError):
        bvd_equivalent(1e-6, 0.0, angular(1e7), 0.0)


def test_particle_bvd_inductance_oracle():
    # L_p = m d^2 / (alpha^2 q^2), independent of omega0
    e = particle_lookup("electron")
    d, alpha = 50e-6, 1.0
    b = particle_bvd(e, d, alpha, angular(1.3e9))
    assert b.inductance == pytest.approx(
        M_E * d ** 2 / (alpha ** 2 * Q_E ** 2), rel=1e-14)
    assert b.resistance == 0.0


def test_particle_bvd_ion_capacitance_below_quoted_scale():
    be = particle_lookup("9Be+")
    b = particle_bvd(be, 50e-6, 1.0, angular(10e6))
    assert b.capacitance < 0.2e-18


def test_particle_bvd_alpha_scaling():
    e = particle_lookup("electron")
    b1 = particle_bvd(e, 50e-6, 1.0, angular(1e9))
    bh = particle_bvd(e, 50e-6, 0.5, angular(1e9))
    assert bh.inductance == pytest.approx(4 * b1.inductance, rel=1e-12)


# --- coupling rates --------------------------------------------------------

def test_coupling_formula_oracle():
    # g = (alpha q / 2d) sqrt(N/(m C))
    e = particle_lookup("electron")
    d, c = 50e-6, 50e-15
    g = particle_resonator_coupling(e, d, 1.0, c, angular(1.3e9))
    assert g == pytest.approx(
        Q_E / (2 * d) * math.sqrt(1.0 / (M_E * c)), rel=1e-14)


@given(st.integers(min_value=1, max_value=10000))
def test_ensemble_coupling_scales_sqrt_n(n):
    e = particle_lookup("electron")
    g1 = particle_resonator_coupling(e, 50e-6, 1.0, 50e-15, angular(1e9))
    gn = particle_resonator_coupling(e, 50e-6, 1.0, 50e-15, angular(1e9),
                                     n_particles=n)
    assert gn == pytest.approx(math.sqrt(n) * g1, rel=1e-12)


def test_capacitive_coupling_isolation_limits():
    w0 = angular(1e9)
    assert capacitive_coupling(1e-15, 1e-15, 1e15, w0) < 1e-12 * w0
    # c_shared negligible, c1 = c2: g -> w0/2
    assert capacitive_coupling(1.0, 1.0, 1e-18, w0) == pytest.approx(
        w0 / 2, rel=1e-9)


# --- quarter-wave resonator equivalent -------------------------------------

def test_quarterwave_capacitance_anchor():
    _, c = quarterwave_lumped(50.0, angular(10e6))
    assert c == pytest.approx(250e-12, rel=0.02)


@given(st.floats(min_value=1.0, max_value=1e4),
       st.floats(min_value=1e4, max_value=1e10))
def test_quarterwave_resonates(z0, f0):
    w0 = angular(f0)
    l, c = quarterwave_lumped(z0, w0)
    assert l * c * w0 ** 2 == pytest.approx(1.0, rel=1e-12)


def test_degradation_factor_anchor():
    # quarter-wave C at 10 MHz against the 50 fF shared trap capacitance
    _, c = quarterwave_lumped(50.0, angular(10e6))
    factor = coupling_degradation(c, 50e-15)
    assert factor == pytest.approx(70.0, rel=0.20)


@given(pos, pos)
def test_degradation_definition(c_res, c_trap):
    assert coupling_degradation(c_res, c_trap) == pytest.approx(
        math.sqrt((c_res + c_trap) / c_trap), rel=1e-12)


# --- strong-quantum-regime metrics -----------------------------------------

@settings(max_examples=50)
@given(st.floats(min_value=1.0, max_value=1e7),
       st.floats(min_value=1e6, max_value=1e10),
       st.floats(min_value=0.01, max_value=300.0),
       st.sampled_from(["pi", "two_pi"]),
       st.floats(min_value=0.1, max_value=100.0))
def test_min_quality_factor_roundtrip(gf, f0, t, conv, n_target):
    g, w0, env = angular(gf), angular(f0), Environment(t)
    q = min_quality_factor(g, w0, env, n_target=n_target, convention=conv)
    rep = swap_metric(g, q, w0, env, convention=conv)
    assert rep.n_swap == pytest.approx(n_target, rel=1e-12)


def test_min_quality_factor_linear_in_target():
    g, w0, env = angular(1.2e6), angular(1.3e9), Environment(4.0)
    q1 = min_quality_factor(g, w0, env, n_target=1.0)
    q10 = min_quality_factor(g, w0, env, n_target=10.0)
    assert q10 == pytest.approx(10 * q1, rel=1e-12)


def test_qmin_electron_50mk_anchor():
    g, w0 = angular(1.2e6), angular(1.3e9)
    q = min_quality_factor(g, w0, Environment(0.05), convention="two_pi")
    assert 7e3 / 2 <= q <= 7e3 * 2


def test_qmin_sr_4k_anchor():
    sr = particle_lookup("88Sr+")
    w0 = angular(3.2e6)
    g = particle_resonator_coupling(sr, 50e-6, 1.0, 50e-15, w0)
    q = min_quality_factor(g, w0, Environment(4.0), convention="two_pi")
    assert 176e6 / 2 <= q <= 176e6 * 2


def test_swap_regime_labels():
    g, w0, env = angular(1e3), angular(1e7), Environment(4.0)
    q = min_quality_factor(g, w0, env, n_target=1.0)
    assert swap_metric(g, 100 * q, w0, env).regime == "strong"
    assert swap_metric(g, 2 * q, w0, env).regime == "marginal"
    assert swap_metric(g, 0.5 * q, w0, env).regime == "weak"


# --- swap-cooling limit and coherence --------------------------------------

def test_cooling_limit_anchors():
    g, q = angular(15.0), 1e9
    n4 = cooling_limit(g, q, Environment(4.0))
    n50 = cooling_limit(g, q, Environment(0.05))
    assert 16.0 / 2 <= n4 <= 16.0 * 2
    assert 0.2 / 2 <= n50 <= 0.2 * 2


def test_coherence_time_anchor():
    tau = coherence_time(1e9, Environment(4.0))
    assert tau == pytest.approx(1.9e-3, rel=0.10)
    assert coherence_time(1e9, Environment(0.0)) == math.inf


@given(pos, st.floats(min_value=0.01, max_value=300.0))
def test_cooling_limit_linear_in_temperature(q, t):
    g = angular(15.0)
    n1 = cooling_limit(g, q, Environment(t))
    n2 = cooling_limit(g, q, Environment(2 * t))
    assert n2 == pytest.approx(2 * n1, rel=1e-12)
