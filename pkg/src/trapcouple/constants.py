"""Physical constants, particle catalog, and thermal-environment helpers.

All frequencies inside the library are angular (rad/s). Use hz()/angular()
at the boundaries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

# CODATA 2018 (SI)
Q_E = 1.602176634e-19      # elementary charge [C]
M_E = 9.1093837015e-31     # electron mass [kg]
M_P = 1.67262192369e-27    # proton mass [kg]
HBAR = 1.054571817e-34     # reduced Planck constant [J s]
K_B = 1.380649e-23         # Boltzmann constant [J/K]
EPS_0 = 8.8541878128e-12   # vacuum permittivity [F/m]
C_LIGHT = 299792458.0      # speed of light [m/s]

EV = Q_E                   # 1 eV in joules
ANGSTROM = 1e-10           # [m]


def angular(f_hz):
    """Convert ordinary frequency [Hz] to angular frequency [rad/s]."""
    return 2 * math.pi * f_hz


def hz(omega):
    """Convert angular frequency [rad/s] to ordinary frequency [Hz]."""
    return omega / (2 * math.pi)


@dataclass(frozen=True)
class Particle:
    """A trapped charged particle."""
    name: str
    mass: float    # [kg]
    charge: float  # [C], signed

    def __post_init__(self):
        if self.mass <= 0:
            raise ValueError(f"mass must be positive, got {self.mass}")
        if self.charge == 0:
            raise ValueError("charge must be nonzero")


@dataclass(frozen=True)
class Environment:
    """Thermal bath the oscillator equilibrates with."""
    temperature: float  # [K]

    def __post_init__(self):
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")


# Ion masses use mass number x proton mass, adequate at the percent level
# for coupling-rate estimates (binding energy and neutron/proton mass
# difference are sub-percent effects).
_CATALOG = {
    "electron": Particle("electron", M_E, -Q_E),
    "9Be+": Particle("9Be+", 9 * M_P, Q_E),
    "24Mg+": Particle("24Mg+", 24 * M_P, Q_E),
    "40Ca+": Particle("40Ca+", 40 * M_P, Q_E),
    "88Sr+": Particle("88Sr+", 88 * M_P, Q_E),
}


def particle_lookup(name):
    """Fetch a particle from the catalog by name."""
    try:
        return _CATALOG[name]
    except KeyError:
        known = ", ".join(sorted(_CATALOG))
        raise KeyError(f"unknown particle {name!r}; known: {known}") from None


def register_particle(p):
    """Add a particle to the catalog (e.g. a molecular ion)."""
    _CATALOG[p.name] = p


def thermal_occupation(omega0, env):
    """Bose-Einstein occupation n = 1/(exp(hbar w/kT) - 1).

    Returns 0 at T=0. No high-T approximation: the exact form is used
    everywhere so swap metrics are consistent across regimes.
    """
    if omega0 <= 0:
        raise ValueError("omega0 must be positive")
    if env.temperature == 0:
        return 0.0
    x = HBAR * omega0 / (K_B * env.temperature)
    if x > 700:  # exp overflow; occupation is indistinguishable from 0
        return 0.0
    return 1.0 / math.expm1(x)
