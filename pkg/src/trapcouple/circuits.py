"""Equivalent-circuit models and coupling/cooling figures of merit.

A charged harmonic oscillator seen from its pickup electrodes is electrically
indistinguishable from a series RLC branch (motional arm) shunted by the
electrode capacitance. The same algebra covers macroscopic resonators, single
particles, and their couplings.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .constants import HBAR, Environment, Particle, thermal_occupation


@dataclass(frozen=True)
class BVDEquivalent:
    """Series RLC (motional arm) + shunt capacitance."""
    inductance: float   # [H]
    capacitance: float  # [F]
    resistance: float   # [ohm]
    shunt_c: float      # [F]

    @property
    def omega0(self):
        return 1.0 / math.sqrt(self.inductance * self.capacitance)

    @property
    def quality_factor(self):
        if self.resistance == 0:
            return math.inf
        return math.sqrt(self.inductance / self.capacitance) / self.resistance


@dataclass(frozen=True)
class CouplingReport:
    """Swap figures of merit for a pair of resonantly coupled oscillators."""
    g: float              # coupling rate [rad/s]
    n_swap: float         # energy swaps per thermal quantum exchanged
    n_thermal: float      # bath occupation at omega0
    swap_time: float      # time for one full energy exchange [s]
    decoherence_time: float  # time to exchange one quantum with the bath [s]
    regime: str           # "strong" / "marginal" / "weak"


def bvd_equivalent(mass, friction, omega0, beta, shunt_c=0.0):
    """Map a mechanical oscillator to its electrical twin.

    beta is the electromechanical transduction coefficient [C/m]: charge
    induced on the pickup per unit displacement. L = m/beta^2, R = gamma/beta^2,
    C = beta^2/(m w0^2), so LC w0^2 = 1 by construction.
    """
    if mass <= 0 or omega0 <= 0:
        raise ValueError("mass and omega0 must be positive")
    if beta == 0:
        raise ValueError("transduction coefficient beta must be nonzero")
    b2 = beta * beta
    return BVDEquivalent(
        inductance=mass / b2,
        capacitance=b2 / (mass * omega0 ** 2),
        resistance=friction / b2,
        shunt_c=shunt_c,
    )


def particle_bvd(p: Particle, gap_d, alpha, omega0, shunt_c=0.0):
    """BVD branch for a single trapped particle between electrodes.

    A particle displaced by x induces alpha*q*x/d of charge on the pickup
    electrode pair (alpha ~ 1 is the electrode geometry factor), so
    beta = alpha*q/d.
    """
    if gap_d <= 0:
        raise ValueError("electrode gap must be positive")
    beta = alpha * abs(p.charge) / gap_d
    return bvd_equivalent(p.mass, 0.0, omega0, beta, shunt_c)


def spring_coupling(k, omega1, omega2, m1, m2, eta=None):
    """Normal-mode splitting rate of two oscillators sharing a spring k.

    Static spring: g = k/(2 w0 sqrt(m1 m2)) evaluated at w0 = sqrt(w1 w2).
    If eta is given the spring is modulated with depth eta at w1+w2 or
    |w1-w2| (parametric drive), g = eta k/(4 sqrt(w1 w2 m1 m2)).
    """
    if k <= 0 or omega1 <= 0 or omega2 <= 0:
        raise ValueError("spring constant and frequencies must be positive")
    if eta is None:
        return k / (2 * math.sqrt(omega1 * omega2) * math.sqrt(m1 * m2))
    if not 0 < eta <= 1:
        raise ValueError("modulation depth eta must be in (0, 1]")
    return eta * k / (4 * math.sqrt(omega1 * omega2 * m1 * m2))


def capacitive_coupling(c1, c2, c_shared, omega0):
    """Two LC resonators sharing a capacitor c_shared.

    g = (w0/2) sqrt(c1 c2 / ((c1+c)(c2+c))). Monotonic in c_shared -> 0
    (isolation) and saturates at w0/2 for c_shared -> 0 with c1,c2 -> inf.
    """
    if min(c1, c2) <= 0 or c_shared <= 0:
        raise ValueError("capacitances must be positive")
    return 0.5 * omega0 * math.sqrt(
        c1 * c2 / ((c1 + c_shared) * (c2 + c_shared)))


def particle_resonator_coupling(p: Particle, gap_d, alpha, c_trap, omega0,
                                n_particles=1):
    """Coupling of a trapped particle (or N identical ones) to an LC resonator.

    g = (alpha q / 2d) sqrt(N / (m C_trap)), both tuned to omega0.
    The sqrt(N) enhancement applies to the center-of-mass mode.
    """
    if gap_d <= 0 or c_trap <= 0:
        raise ValueError("gap and trap capacitance must be positive")
    if n_particles < 1:
        raise ValueError("need at least one particle")
    return (alpha * abs(p.charge) / (2 * gap_d)) * math.sqrt(
        n_particles / (p.mass * c_trap))


def quarterwave_lumped(z0, omega0):
    """Lumped L, C of a quarter-wave transmission-line resonator.

    C = pi/(4 w0 Z0), L = 1/(w0^2 C).
    """
    if z0 <= 0 or omega0 <= 0:
        raise ValueError("Z0 and omega0 must be positive")
    c = math.pi / (4 * omega0 * z0)
    return 1.0 / (omega0 ** 2 * c), c


def coupling_degradation(c_resonator, c_trap):
    """Factor by which g drops when the resonator's own capacitance loads
    the trap electrodes: sqrt((C + C_trap)/C_trap)."""
    if c_resonator < 0 or c_trap <= 0:
        raise ValueError("bad capacitances")
    return math.sqrt((c_resonator + c_trap) / c_trap)


_CONVENTIONS = {"pi": math.pi, "two_pi": 2 * math.pi}


def swap_metric(g, q_factor, omega0, env: Environment, convention="pi"):
    """Number of coherent energy swaps before one thermal quantum arrives.

    N_swap = g Q / (c (n_th + 1) w0) with c = pi (swap time pi/g) or 2*pi.
    regime: strong for N >= 10, marginal for N >= 1, weak otherwise.
    """
    if g <= 0 or q_factor <= 0 or omega0 <= 0:
        raise ValueError("g, Q, omega0 must be positive")
    c = _CONVENTIONS[convention]
    n_th = thermal_occupation(omega0, env)
    tau_swap = c / g
    tau_dec = q_factor / ((n_th + 1) * omega0)
    n_swap = tau_dec / tau_swap
    if n_swap >= 10:
        regime = "strong"
    elif n_swap >= 1:
        regime = "marginal"
    else:
        regime = "weak"
    return CouplingReport(g=g, n_swap=n_swap, n_thermal=n_th,
                          swap_time=tau_swap, decoherence_time=tau_dec,
                          regime=regime)


def min_quality_factor(g, omega0, env: Environment, n_target=1.0,
                       convention="pi"):
    """Smallest Q for which swap_metric reaches n_target swaps."""
    if n_target <= 0:
        raise ValueError("n_target must be positive")
    c = _CONVENTIONS[convention]
    n_th = thermal_occupation(omega0, env)
    return n_target * c * (n_th + 1) * omega0 / g


def cooling_limit(g, q_factor, env: Environment):
    """Mean occupation reachable by swap cooling against a bath.

    One swap takes pi/g; during it the bath feeds quanta at rate
    k_B T/(hbar Q) (high-occupancy limit), and the exchange recovers a
    fraction 1/e, leaving n = pi (1 - 1/e) k_B T / (hbar g Q).
    """
    from .constants import K_B
    if g <= 0 or q_factor <= 0:
        raise ValueError("g and Q must be positive")
    return math.pi * (1 - 1 / math.e) * K_B * env.temperature / (
        HBAR * g * q_factor)


def coherence_time(q_factor, env: Environment):
    """Time to exchange one thermal quantum: hbar Q / k_B T."""
    from .constants import K_B
    if env.temperature == 0:
        return math.inf
    return HBAR * q_factor / (K_B * env.temperature)
