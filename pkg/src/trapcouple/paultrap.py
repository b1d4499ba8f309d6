"""GHz Paul-trap design math for light charged particles: stability, depth,
secular frequencies, superconducting film current limits, detection-circuit
figures, drive/detection crosstalk, and parametric sideband cooling.

Geometry factors (beta, zeta, capacitances) come from electrostatic
simulation of a concrete design and are shipped as data presets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .constants import EV, HBAR, Particle


@dataclass(frozen=True)
class TrapDesign:
    """One rf trap geometry plus its simulated circuit parameters."""
    name: str
    v_rf: float        # drive amplitude [V]
    omega_rf: float    # drive frequency [rad/s]
    scale_d: float     # characteristic electrode distance [m]
    beta_geom: float   # quadrupole strength prefactor (1 for ideal)
    zeta_depth: float  # depth factor: D = qV q_m / zeta (6 ideal, 404 five-wire)
    alpha: float = 1.0           # pickup geometry factor
    c_trap: float = 0.0          # endcap-to-endcap trap capacitance [F]
    capacitances: dict = field(default_factory=dict)  # c_rf1, c_rf2, c_cap, c_iso1..4
    detection_gap_d: float = None  # electrode gap of the detection pair [m]
    zeta_anharmonic: float = None  # cubic-term factor for parametric coupling
    reference: dict = field(default_factory=dict)  # published target values

    def __post_init__(self):
        if min(self.v_rf, self.omega_rf, self.scale_d) <= 0:
            raise ValueError("v_rf, omega_rf, scale_d must be positive")
        if not 0 < self.beta_geom <= 1:
            raise ValueError("beta_geom must be in (0, 1]")
        if any(v < 0 for v in self.capacitances.values()):
            raise ValueError("capacitances must be >= 0")

    def cap(self, key):
        return self.capacitances[key]


@dataclass(frozen=True)
class FilmWire:
    """Thin superconducting film wire cross-section."""
    width_w: float             # [m]
    thickness_b: float         # [m]
    penetration_lambda: float  # London depth [m]
    critical_density_jc: float  # [A/m^2]

    def __post_init__(self):
        if min(self.width_w, self.thickness_b, self.penetration_lambda,
               self.critical_density_jc) <= 0:
            raise ValueError("all wire parameters must be positive")


def mathieu_q(p: Particle, trap: TrapDesign):
    """Dimensionless rf drive strength q_m = 8 beta q V / (m d^2 Omega^2).

    Stable lowest-order confinement needs q_m < 1 (see is_stable).
    """
    return (8 * trap.beta_geom * abs(p.charge) * trap.v_rf
            / (p.mass * trap.scale_d ** 2 * trap.omega_rf ** 2))


def is_stable(p: Particle, trap: TrapDesign):
    return mathieu_q(p, trap) < 1.0


def trap_depth_and_secular(trap: TrapDesign, p: Particle):
    """Pseudopotential depth [J] and secular frequency [rad/s].

    D = qV q_m / zeta; omega_sec = q_m Omega/(2 sqrt(2)) along the strong
    axis (lowest-order Mathieu), with the two transverse frequencies at
    half that for the cylindrical quadrupole geometry.
    """
    q_m = mathieu_q(p, trap)
    if q_m >= 1:
        raise ValueError(f"unstable drive: q_mathieu = {q_m:.3f} >= 1")
    depth = abs(p.charge) * trap.v_rf * q_m / trap.zeta_depth
    omega_sec = q_m * trap.omega_rf / (2 * math.sqrt(2))
    return depth, omega_sec


def critical_current(wire: FilmWire):
    """DC critical current of a thin film: I_c = Lambda sqrt(w b) J_c / 0.74."""
    return (wire.penetration_lambda
            * math.sqrt(wire.width_w * wire.thickness_b)
            * wire.critical_density_jc / 0.74)


def rf_power_current(omega_rf, c_total, v_rf, q_factor):
    """On-resonance dissipation and peak current of the driven trap tank.

    P = Omega C V^2 / Q; I = Omega C V.
    """
    if min(omega_rf, c_total, v_rf, q_factor) <= 0:
        raise ValueError("all inputs must be positive")
    current = omega_rf * c_total * v_rf
    return current * v_rf / q_factor, current


def _series(c1, c2):
    if c1 == 0 or c2 == 0:
        return 0.0
    return c1 * c2 / (c1 + c2)


def detection_network_capacitance(trap: TrapDesign):
    """Total capacitance across the detection inductor:
    C_cap + series(C_rf1, C_rf2) + series(C_iso1, C_iso2)."""
    c = trap.capacitances
    return (c["c_cap"] + _series(c["c_rf1"], c["c_rf2"])
            + _series(c["c_iso1"], c["c_iso2"]))


def detection_metrics(trap: TrapDesign, p: Particle, q_det, omega0):
    """Signal bandwidth of tank-circuit detection of the trapped particle.

    linewidth = Q_det q^2 alpha^2 / (omega0 C_total m d^2), the damping
    rate of the particle's motional branch by the detection resistance.
    """
    c_total = detection_network_capacitance(trap)
    d = trap.detection_gap_d or trap.scale_d
    linewidth = (q_det * p.charge ** 2 * trap.alpha ** 2
                 / (omega0 * c_total * p.mass * d ** 2))
    return c_total, linewidth


def crosstalk(trap: TrapDesign, q_rf, q_det, omega0, omega_rf):
    """Quality-factor degradation of drive/detection tanks from capacitive
    asymmetry of the trap bridge.

    Returns (dQ_rf/Q_rf, dQ_det/Q_det, epsilon); all vanish for a
    perfectly symmetric network.
    """
    c = trap.capacitances
    eps = ((abs(c["c_rf1"] - c["c_rf2"]) + abs(c["c_iso1"] - c["c_iso2"]))
           / (c["c_rf1"] + c["c_iso1"]))
    denom = c["c_iso1"] + c["c_rf1"] + 2 * c["c_cap"]
    dq_rf = (q_rf * omega0 / (q_det * omega_rf)) * (c["c_cap"] / denom) * eps
    dq_det = (q_det * omega0 / (q_rf * omega_rf)) * (
        (c["c_iso1"] + c["c_rf1"]) / denom) * eps
    return dq_rf, dq_det, eps


def parametric_rate(trap: TrapDesign, p: Particle, omega_x, omega_z,
                    v_drive):
    """Parametric x-z mode coupling driven at 2 omega_x - omega_z.

    The cubic anharmonicity of the pseudopotential converts a dc-electrode
    drive into an x-z exchange at rate
    2 xi alpha = zeta sqrt(2 hbar) q^3 V_rf^2 V_d
    / (m^3.5 Omega^2 omega_x omega_z^2.5 d^7).
    Returns (rate, drive_amplitude, drive_freq): the drive amplitude is the
    harmonic response of the z motion to the drive field at omega_d.
    """
    if trap.zeta_anharmonic is None:
        raise ValueError(f"design {trap.name!r} has no anharmonic factor")
    q = abs(p.charge)
    m = p.mass
    rate = (trap.zeta_anharmonic * math.sqrt(2 * HBAR) * q ** 3
            * trap.v_rf ** 2 * v_drive
            / (m ** 3.5 * trap.omega_rf ** 2 * omega_x * omega_z ** 2.5
               * trap.scale_d ** 7))
    omega_d = 2 * omega_x - omega_z
    amplitude = abs(trap.alpha * q * v_drive
                    / (trap.scale_d * m * (omega_z ** 2 - omega_d ** 2)))
    return rate, amplitude, omega_d


def micromotion_limit(e_capture, q_m, omega_rf, p: Particle):
    """Largest tolerable displacement off the rf null.

    Micromotion velocity at displacement x is v = q_m x Omega / 2; the
    micromotion energy m v^2 must stay below the capture energy, giving
    x = sqrt(E_capture/m) * 2/(q_m Omega).
    """
    if min(e_capture, q_m, omega_rf) <= 0:
        raise ValueError("all inputs must be positive")
    return math.sqrt(e_capture / p.mass) * 2 / (q_m * omega_rf)
