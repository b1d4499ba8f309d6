"""Piezoelectric ion-resonator coupling: tensor rotation, overlap integrals,
analytic bounds, and electrode-mediated (shunt/capacitive) coupling.

The ion's Coulomb field reaches into the piezoelectric volume where the
acoustic mode's strain creates a polarization density; their overlap sets
the coupling rate. The field inside the dielectric is modeled as a vacuum
monopole with eps0 replaced by eps_bar = (eps0 + eps_d)/2 (half-space
average); no image-charge correction.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .constants import EPS_0, HBAR, Particle, Q_E
from .modes import ModeModel
from .quadrature import QuadratureSpec, integrate


@dataclass(frozen=True)
class PiezoMaterial:
    """Piezoelectric stress constants and bulk properties."""
    name: str
    e_matrix: tuple      # 3x6, C/m^2 (stress constants, Voigt columns)
    permittivity: float  # dielectric permittivity [F/m]
    density: float       # [kg/m^3]
    sound_speed: float   # quasi-longitudinal [m/s]

    def __post_init__(self):
        e = np.asarray(self.e_matrix, dtype=float)
        if e.shape != (3, 6) or not np.all(np.isfinite(e)):
            raise ValueError("e_matrix must be a finite 3x6 matrix")
        if self.permittivity < EPS_0:
            raise ValueError("permittivity below vacuum")

    @property
    def e(self):
        return np.asarray(self.e_matrix, dtype=float)

    @property
    def eps_bar(self):
        """Half-space averaged permittivity seen by an exterior charge."""
        return 0.5 * (EPS_0 + self.permittivity)

    @property
    def e_max(self):
        """Largest singular value of the coupling matrix."""
        return float(np.linalg.svd(self.e, compute_uv=False)[0])


# Voigt pair ordering for the strain/stress 6-vectors
VOIGT_PAIRS = [(0, 0), (1, 1), (2, 2), (1, 2), (0, 2), (0, 1)]


def _to_tensor(e_matrix):
    t = np.zeros((3, 3, 3))
    for v, (j, k) in enumerate(VOIGT_PAIRS):
        t[:, j, k] = e_matrix[:, v]
        t[:, k, j] = e_matrix[:, v]
    return t


def _to_voigt(t):
    e = np.zeros((3, 6))
    for v, (j, k) in enumerate(VOIGT_PAIRS):
        e[:, v] = t[:, j, k]
    return e


def _rx(a):
    c, s = math.cos(a), math.sin(a)
    return np.array([[1, 0, 0], [0, c, -s], [0, s, c]])


def _rz(a):
    c, s = math.cos(a), math.sin(a)
    return np.array([[c, -s, 0], [s, c, 0], [0, 0, 1]])


def rotate_piezo(e_base, euler_angles):
    """Rotate a 3x6 piezo coupling matrix by Euler angles (phi, theta, psi).

    Convention: R = Rz(psi) @ Rx(theta) @ Rz(phi) — rotate about z by phi,
    then about the new x by theta, then about z by psi. The matrix is
    mapped to its rank-3 tensor, rotated on all indices, and mapped back.
    Doubly-rotated crystal cuts use (phi, theta, 0).
    """
    phi, theta, psi = euler_angles
    r = _rz(psi) @ _rx(theta) @ _rz(phi)
    e = np.asarray(e_base, dtype=float)
    return _to_voigt(np.einsum("ia,jb,kc,abc->ijk", r, r, r, _to_tensor(e)))


def _overlap_integrand_field_gradient(mode, material, p, rion, axis):
    """Ion field-gradient form: dE_i/du . (e s') at each mode point."""
    e_t = material.e.T
    pref = abs(p.charge) / (4 * math.pi * material.eps_bar)

    def f(pts):
        pol = mode.strain(pts) @ e_t       # polarization density, (N,3)
        rv = rion[None, :] - pts
        rn = np.linalg.norm(rv, axis=1)
        rh = rv / rn[:, None]
        proj = np.einsum("ij,ij->i", rh, pol)
        return pref * (pol @ axis - 3 * (rh @ axis) * proj) / rn ** 3

    return f


def _overlap_integrand_dipole(mode, material, p, rion, axis):
    """Dipole-dipole form: the same physics written as the interaction of
    the ion's zero-point dipole with the local piezo polarization dipole,
    divided by hbar."""
    e_t = material.e.T
    zp_ion = math.sqrt(HBAR / (2 * p.mass * mode.omega0))
    zp_mode = math.sqrt(HBAR / (2 * mode.mode_mass * mode.omega0))
    p_ion = abs(p.charge) * zp_ion * axis
    pref = zp_mode / (4 * math.pi * material.eps_bar * HBAR)
    # rescale back to the g normalization used by the field-gradient path
    norm = 2 * mode.omega0 * math.sqrt(mode.mode_mass * p.mass)

    def f(pts):
        pol = mode.strain(pts) @ e_t
        rv = rion[None, :] - pts
        rn = np.linalg.norm(rv, axis=1)
        rh = rv / rn[:, None]
        val = (3 * (rh @ p_ion) * np.einsum("ij,ij->i", rh, pol)
               - pol @ p_ion) / rn ** 3
        return pref * val * norm

    return f


def overlap_coupling(mode: ModeModel, material: PiezoMaterial, p: Particle,
                     ion_position, motion_axis,
                     quad: QuadratureSpec = QuadratureSpec(),
                     formulation="field_gradient"):
    """Ion-mode coupling rate from the strain-polarization overlap integral.

    g = |integral dE_ion/du_i . (e s') dV| / (2 omega0 sqrt(M m_ion)),
    where u_i is the ion displacement along motion_axis. Two independent
    integrand implementations ("field_gradient" and "dipole") are provided;
    they agree to quadrature tolerance.
    """
    if mode.strain is None:
        raise ValueError("mode carries no strain field")
    rion = np.asarray(ion_position, dtype=float)
    axis = np.asarray(motion_axis, dtype=float)
    axis = axis / np.linalg.norm(axis)
    if _inside_volume(mode.volume, rion):
        raise ValueError("ion position must lie outside the resonator")
    if formulation == "field_gradient":
        f = _overlap_integrand_field_gradient(mode, material, p, rion, axis)
    elif formulation == "dipole":
        f = _overlap_integrand_dipole(mode, material, p, rion, axis)
    else:
        raise ValueError(f"unknown formulation {formulation!r}")
    res = integrate(f, mode.volume, quad)
    return abs(float(res.value[0])) / (
        2 * mode.omega0 * math.sqrt(mode.mode_mass * p.mass))


def optimize_ion_position(mode: ModeModel, material: PiezoMaterial,
                          p: Particle, height_h, motion_axis=(1, 0, 0),
                          quad: QuadratureSpec | None = None):
    """Ion position along a beam maximizing the overlap coupling.

    Golden-section search of overlap_coupling over the axial coordinate
    r1 in [0.05 l, l] at fixed height above the beam; returns (r1, g).
    """
    l = mode.meta["length"]
    if quad is None:
        quad = QuadratureSpec()
    res = minimize_scalar(
        lambda r1: -overlap_coupling(mode, material, p,
                                     [r1, 0.0, height_h], motion_axis, quad),
        bounds=(0.05 * l, l), method="bounded",
        options={"xatol": 1e-6 * l})
    return float(res.x), float(-res.fun)


def _inside_volume(vol, point):
    # conservative containment check for the two volume kinds we use
    from .quadrature import BoxVolume, CylinderVolume
    if isinstance(vol, CylinderVolume):
        rel = point - vol.center
        s = rel[vol.axis]
        t1, t2 = vol._trans
        r = math.hypot(rel[t1], rel[t2])
        return vol.span[0] < s < vol.span[1] and r < vol.radius
    if isinstance(vol, BoxVolume):
        return bool(np.all(point > vol.lo) and np.all(point < vol.hi))
    return False


def cs_bound(mode: ModeModel, material: PiezoMaterial, p: Particle,
             height_h, gamma=1.0):
    """Cauchy-Schwarz upper bound on the direct piezo coupling.

    g <= gamma e_max q / (4 pi eps_bar c_s sqrt(m_ion rho h^3)), with the
    order-unity geometric factor gamma fixed to 1.
    """
    if height_h <= 0:
        raise ValueError("height must be positive")
    return (gamma * material.e_max * abs(p.charge)
            / (4 * math.pi * material.eps_bar * material.sound_speed
               * math.sqrt(p.mass * mode.density * height_h ** 3)))


# geometric constant of the aligned-dipole estimate: integral dV/r^3 over
# the near half-space at unit height, evaluated in the source analysis
ALIGNED_GEOMETRY_CONSTANT = 3.2


def aligned_dipole_bound(p: Particle, mode: ModeModel,
                         material: PiezoMaterial, height_h):
    """Upper bound assuming ion dipole and local piezo dipoles are aligned.

    g <= (2 |p_ion| |P_max| / 4 pi hbar eps_bar) * geometric constant, with
    |p_ion| = q sqrt(hbar/2 m omega0) and |P_max| = e_max k_n
    sqrt(hbar/2 M omega0). Applies to standing-wave (plate overtone) modes.
    """
    if "k_n" not in mode.meta:
        raise ValueError("aligned-dipole bound applies to plate overtones")
    if height_h <= 0:
        raise ValueError("height must be positive")
    k_n = mode.meta["k_n"]
    p_ion = abs(p.charge) * math.sqrt(HBAR / (2 * p.mass * mode.omega0))
    p_max = material.e_max * k_n * math.sqrt(
        HBAR / (2 * mode.mode_mass * mode.omega0))
    return (2 * p_ion * p_max * ALIGNED_GEOMETRY_CONSTANT
            / (4 * math.pi * HBAR * material.eps_bar))


def shunt_coupling(p: Particle, trap_gap_dT, e_bar, permittivity,
                   mode: ModeModel, electrode_radius_Le, c_trap):
    """Coupling via a surface electrode shorting piezo charge to the trap.

    The electrode of radius L_e collects the strain-induced surface charge
    (effective coefficient e_bar) and applies it across the trap gap d_T:
    g_c = (4 q e_bar / (eps d_T)) (sigma^2/L_e^2)(1 - exp(-L_e^2/2 sigma^2))
    / (1 + C_trap/C_shunt), C_shunt = eps pi L_e^2 / t;
    g = g_c / (2 omega0 sqrt(M m_ion)).
    """
    if min(trap_gap_dT, electrode_radius_Le, c_trap) <= 0:
        raise ValueError("geometry and capacitance must be positive")
    sigma = mode.meta["sigma"]
    t = mode.meta["thickness"]
    c_shunt = permittivity * math.pi * electrode_radius_Le ** 2 / t
    g_c = (4 * abs(p.charge) * e_bar / (permittivity * trap_gap_dT)
           * (sigma ** 2 / electrode_radius_Le ** 2)
           * (1 - math.exp(-electrode_radius_Le ** 2 / (2 * sigma ** 2)))
           / (1 + c_trap / c_shunt))
    return g_c / (2 * mode.omega0 * math.sqrt(mode.mode_mass * p.mass))


def optimize_electrode(p: Particle, trap_gap_dT, e_bar, permittivity,
                       mode: ModeModel, c_trap):
    """Electrode radius maximizing shunt_coupling; returns (L_e, g)."""
    sigma = mode.meta["sigma"]
    res = minimize_scalar(
        lambda le: -shunt_coupling(p, trap_gap_dT, e_bar, permittivity,
                                   mode, le, c_trap),
        bounds=(0.05 * sigma, 10 * sigma), method="bounded",
        options={"xatol": 1e-6 * sigma})
    return float(res.x), float(-res.fun)


def quartz_capacitive_coupling(c_ion, c_quartz, c_trap, c_shunt, omega0):
    """Electrical coupling of the ion and quartz motional branches through
    the shared electrode network: g = (w0/2) sqrt(C_ion C_quartz)/(C_t+C_s).

    Valid when the static capacitances dominate the motional ones (warns
    otherwise).
    """
    if min(c_ion, c_quartz) < 0 or c_trap + c_shunt <= 0:
        raise ValueError("bad capacitances")
    if c_trap + c_shunt < 10 * max(c_ion, c_quartz):
        warnings.warn("static capacitance does not dominate motional "
                      "capacitances; weak-coupling formula inaccurate",
                      stacklevel=2)
    return 0.5 * omega0 * math.sqrt(c_ion * c_quartz) / (c_trap + c_shunt)
