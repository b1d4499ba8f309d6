"""Electron loading kinetics: a low-energy electron beam ionizes helium
vapor inside the trap volume; secondary electrons are trapped, lost to beam
collisions and helium rf-heating, and cooled by the detection circuit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.integrate import solve_ivp

from .constants import ANGSTROM, EPS_0, EV, K_B, M_E, Q_E


@dataclass(frozen=True)
class LoadingConfig:
    current_density_j: float       # primary beam current density [A/m^2]
    beam_radius_r0: float          # [m]
    helium_pressure: float         # [Pa]
    trap_radius_l: float           # spherical trapping volume radius [m]
    trap_depth: float              # [eV]
    gas_temperature: float = 4.0   # [K]
    sigma_ion: float = 0.05 * ANGSTROM ** 2      # ionization cross sect. [m^2]
    sigma_elastic: float = 6.0 * ANGSTROM ** 2   # elastic e-He cross s. [m^2]
    gamma_cool: float = 1e5        # circuit cooling rate [1/s]
    e_init: float = 3e-4           # secondary electron initial energy [eV]
    t_detect: float = 0.0          # detection time per loading attempt [s]

    def __post_init__(self):
        if min(self.beam_radius_r0, self.helium_pressure,
               self.trap_radius_l, self.trap_depth, self.gas_temperature,
               self.gamma_cool, self.e_init) <= 0:
            raise ValueError("physical fields must be positive")
        if self.current_density_j < 0 or self.t_detect < 0:
            raise ValueError("current density and t_detect must be >= 0")
        if self.sigma_ion >= self.sigma_elastic:
            raise ValueError("sigma_ion should be below sigma_elastic")

    @property
    def n_helium(self):
        """Ideal-gas helium number density [1/m^3]."""
        return self.helium_pressure / (K_B * self.gas_temperature)


@dataclass(frozen=True)
class LoadingRates:
    gamma_ion: float   # secondary-electron creation rate [1/s]
    gamma_e: float     # loss rate per trapped electron to the beam [1/s]
    gamma_he: float    # loss rate from helium rf heating [1/s]
    n_steady: float    # steady-state trapped number
    tau_1e: float      # trapped-electron 1/e lifetime [s]


def rates(cfg: LoadingConfig) -> LoadingRates:
    """Closed-form loading/loss rates and their steady state.

    Gamma_ion = (J pi r0^2/q) n_He l sigma_ion (ionizations inside the
    trapping sphere), Gamma_e = J r0 q/(4 eps0 U_d) (kick-out by beam
    electrons), Gamma_He = sigma_el n_He sqrt(2 U_d/m_e)/(3 pi) (rf heating
    by elastic helium collisions at the trap-depth velocity scale).
    """
    n_he = cfg.n_helium
    u_d = cfg.trap_depth * EV
    g_ion = (cfg.current_density_j * math.pi * cfg.beam_radius_r0 ** 2 / Q_E
             * n_he * cfg.trap_radius_l * cfg.sigma_ion)
    g_e = cfg.current_density_j * cfg.beam_radius_r0 * Q_E / (4 * EPS_0 * u_d)
    g_he = cfg.sigma_elastic * n_he * math.sqrt(2 * u_d / M_E) / (3 * math.pi)
    loss = g_e + g_he
    return LoadingRates(gamma_ion=g_ion, gamma_e=g_e, gamma_he=g_he,
                        n_steady=g_ion / loss, tau_1e=1.0 / loss)


def capture_energy(cfg: LoadingConfig):
    """Energy below which circuit cooling wins over helium heating.

    E_capture = (m_e/2)(pi Gamma_cool/(sigma_el n_He))^2 — the exact zero
    of the energy_ode right-hand side. Returns (E_capture, E_thresh) in eV
    with E_thresh = min(E_capture, E_init).
    """
    v_crit = math.pi * cfg.gamma_cool / (cfg.sigma_elastic * cfg.n_helium)
    e_cap = 0.5 * M_E * v_crit ** 2 / EV
    return e_cap, min(e_cap, cfg.e_init)


def energy_rhs(e_ev, cfg: LoadingConfig):
    """dE/dt [eV/s] of a trapped electron: circuit cooling vs helium
    rf heating, -Gamma_cool E + (sigma_el n_He/pi) sqrt(2E/m_e) E."""
    e_j = max(e_ev, 0.0) * EV
    heat = (cfg.sigma_elastic * cfg.n_helium / math.pi
            * math.sqrt(2 * e_j / M_E))
    return (-cfg.gamma_cool + heat) * e_ev


@dataclass(frozen=True)
class EnergyTrajectory:
    times: np.ndarray     # [s]
    energies: np.ndarray  # [eV]
    boil_off_time: float  # [s] or None if never reaching trap depth


def energy_ode(e0, cfg: LoadingConfig, horizon):
    """Integrate the post-loading energy ODE from e0 [eV] over horizon [s]."""
    if not 0 < e0 <= cfg.trap_depth:
        raise ValueError("initial energy must be in (0, trap_depth]")

    def boiled(t, y):
        return y[0] - cfg.trap_depth
    boiled.terminal = True
    boiled.direction = 1

    sol = solve_ivp(lambda t, y: [energy_rhs(y[0], cfg)], (0.0, horizon),
                    [e0], method="RK45", rtol=1e-9, atol=1e-16,
                    dense_output=True, events=boiled)
    if not sol.success:
        raise RuntimeError(f"energy ODE integration failed: {sol.message}")
    boil = float(sol.t_events[0][0]) if len(sol.t_events[0]) else None
    return EnergyTrajectory(times=sol.t, energies=sol.y[0],
                            boil_off_time=boil)


def pulses_needed(cfg: LoadingConfig):
    """Expected loading attempts until one electron lands below threshold.

    Initial energies are uniform on [0, U_d], so a fraction E_thresh/U_d of
    the N_ss trapped electrons is capturable per attempt.
    """
    _, e_thresh = capture_energy(cfg)
    r = rates(cfg)
    if r.n_steady == 0:
        return math.inf
    return (cfg.trap_depth / e_thresh) / r.n_steady


def time_to_trap(cfg: LoadingConfig, j_values, p_values):
    """Sweep beam current density and helium pressure.

    Returns dict of 2D maps (rows: J, cols: P): n_steady, tau_1e, pulses,
    t_total where t_total = pulses * (tau_1e + t_detect).
    """
    j_values = np.asarray(j_values, dtype=float)
    p_values = np.asarray(p_values, dtype=float)
    shape = (len(j_values), len(p_values))
    out = {k: np.empty(shape) for k in
           ("n_steady", "tau_1e", "pulses", "t_total")}
    for i, j in enumerate(j_values):
        for k, p in enumerate(p_values):
            c = replace(cfg, current_density_j=float(j),
                        helium_pressure=float(p))
            r = rates(c)
            n_pulse = pulses_needed(c)
            out["n_steady"][i, k] = r.n_steady
            out["tau_1e"][i, k] = r.tau_1e
            out["pulses"][i, k] = n_pulse
            out["t_total"][i, k] = n_pulse * (r.tau_1e + c.t_detect)
    return out
