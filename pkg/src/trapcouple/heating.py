"""Anomalous motional-heating extrapolation between trapped particles.

Measured heating rates scale as (q^2/m) / (d^4 f^(1+alpha)) for surface
electric-field noise from independent patch potentials; this module moves a
measured reference point to another particle, distance, and frequency.
"""

from __future__ import annotations

from dataclasses import dataclass

from .constants import Particle


@dataclass(frozen=True)
class HeatingReference:
    """One measured heating-rate data point."""
    species: Particle
    distance_d: float   # charge-to-electrode [m]
    frequency_f: float  # motional frequency [Hz]
    rate: float         # [quanta/s]
    temperature: float  # electrode temperature [K]
    material: str

    def __post_init__(self):
        if min(self.distance_d, self.frequency_f, self.rate,
               self.temperature) <= 0:
            raise ValueError("all reference fields must be positive")


def extrapolate(ref: HeatingReference, target: Particle, target_d,
                target_f, alpha_exp):
    """Heating rate [quanta/s] for the target particle.

    n_t = n_r * (q_t^2/m_t)/(q_r^2/m_r) * (d_r/d_t)^4 * (f_r/f_t)^(1+alpha).
    """
    if not 0.5 <= alpha_exp <= 2.0:
        raise ValueError("alpha outside the observed range [0.5, 2]")
    if target_d <= 0 or target_f <= 0:
        raise ValueError("distance and frequency must be positive")
    r = ref.species
    charge_mass = ((target.charge ** 2 / target.mass)
                   / (r.charge ** 2 / r.mass))
    return (ref.rate * charge_mass * (ref.distance_d / target_d) ** 4
            * (ref.frequency_f / target_f) ** (1 + alpha_exp))
