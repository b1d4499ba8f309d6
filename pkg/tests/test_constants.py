import math

import pytest
from hypothesis import given, strategies as st
import scipy.constants as sc

from trapcouple import Environment, angular, hz, particle_lookup
from trapcouple.constants import HBAR, K_B, M_E, M_P, Q_E, thermal_occupation


def test_codata_values_match_scipy():
    # the package pins one CODATA release; scipy may ship a newer one, so
    # compare at the level where adjustments cannot matter for this toolkit
    assert Q_E == sc.e
    assert K_B == sc.k
    assert M_E == pytest.approx(sc.m_e, rel=1e-8)
    assert M_P == pytest.approx(sc.m_p, rel=1e-8)
    assert HBAR == pytest.approx(sc.hbar, rel=1e-8)


def test_particle_catalog_masses_and_charges():
    e = particle_lookup("electron")
    assert e.mass == M_E and e.charge == -Q_E
    for name, a in (("9Be+", 9), ("24Mg+", 24), ("40Ca+", 40),
                    ("88Sr+", 88)):
        p = particle_lookup(name)
        assert p.mass == a * M_P
        assert p.charge == Q_E


def test_unknown_particle_raises():
    with pytest.raises(KeyError, match="unknown particle"):
        particle_lookup("muon")


@given(st.floats(min_value=1e3, max_value=1e12))
def test_hz_angular_roundtrip(f):
    assert hz(angular(f)) == pytest.approx(f, rel=1e-14)


def test_thermal_occupation_against_direct_formula():
    w, t = angular(1.3e9), 4.0
    x = HBAR * w / (K_B * t)
    assert thermal_occupation(w, Environment(t)) == pytest.approx(
        1.0 / math.expm1(x), rel=1e-12)


def test_thermal_occupation_limits():
    assert thermal_occupation(angular(1e9), Environment(0.0)) == 0.0
    # high-temperature (Rayleigh-Jeans) limit n -> kT/hbar w
    w = angular(1e6)
    n = thermal_occupation(w, Environment(300.0))
    assert n == pytest.approx(K_B * 300.0 / (HBAR * w), rel=1e-2)


@given(st.floats(min_value=1e4, max_value=1e12),
       st.floats(min_value=1e-3, max_value=300.0),
       st.floats(min_value=1e-3, max_value=300.0))
def test_thermal_occupation_monotone_in_temperature(f, t1, t2):
    w = angular(f)
    lo, hi = sorted((t1, t2))
    assert (thermal_occupation(w, Environment(lo))
            <= thermal_occupation(w, Environment(hi)))


def test_environment_rejects_negative_temperature():
    with pytest.raises(ValueError):
        Environment(-1.0)
