"""Mechanical mode models: membranes, cantilever beams, plano-convex
acoustic disks.

Each model carries a frequency, an effective mode mass, and a displacement
pattern s(r) normalized to max|s| = 1, so the mode mass is the conventional
antinode effective mass M = rho * integral |s|^2 dV.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .quadrature import (BoxVolume, CylinderVolume, QuadratureSpec,
                         integrate)

# clamped-free Euler-Bernoulli fundamental: root of cosh(x)cos(x) = -1
BEAM_KL = 1.8750104068711961
# section factors for omega0 = sqrt(beta a^2 E / (rho l^4))
BETA_CIRCULAR = 3.09
BETA_HEXAGONAL = 2.57


@dataclass(frozen=True)
class BeamSection:
    """Cross-section of a cantilever beam."""
    shape: str        # "circular" | "hexagonal"
    radius_a: float   # [m]

    def __post_init__(self):
        if self.radius_a <= 0:
            raise ValueError("radius must be positive")
        if self.shape not in ("circular", "hexagonal"):
            raise ValueError(f"unknown section shape {self.shape!r}")

    @property
    def area(self):
        if self.shape == "circular":
            return math.pi * self.radius_a ** 2
        return 1.5 * math.sqrt(3) * self.radius_a ** 2

    @property
    def beta_factor(self):
        return BETA_CIRCULAR if self.shape == "circular" else BETA_HEXAGONAL


@dataclass(frozen=True)
class ModeModel:
    """One mechanical eigenmode of a resonator."""
    name: str
    omega0: float       # [rad/s]
    mode_mass: float    # [kg], closed form
    density: float      # [kg/m^3]
    volume: object      # quadrature volume descriptor
    shape: Callable     # points (N,3) -> displacement (N,3), max|s| = 1
    strain: Optional[Callable] = None  # points (N,3) -> Voigt strain (N,6)
    polarization_axis: Optional[tuple] = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.omega0 <= 0 or self.mode_mass <= 0 or self.density <= 0:
            raise ValueError("omega0, mode_mass, density must be positive")


def membrane_mode(kind, side, thickness, density, omega0):
    """Square membrane mode. omega0 is an input (a measured quantity).

    kind "clamped_drum": fundamental sin(pi x/a) sin(pi y/a), effective
    mass rho t a^2/4. kind "trampoline_com": rigid center-of-mass pad
    motion, |s| = 1 everywhere, mass rho t a^2.
    """
    if min(side, thickness, density) <= 0:
        raise ValueError("side, thickness, density must be positive")
    a, t = side, thickness
    vol = BoxVolume([0, 0, 0], [a, a, t], seed_cells=(3, 3, 1))

    if kind == "clamped_drum":
        def shape(pts):
            s = np.zeros_like(pts)
            s[:, 2] = (np.sin(np.pi * pts[:, 0] / a)
                       * np.sin(np.pi * pts[:, 1] / a))
            return s
        mass = density * t * a * a / 4
    elif kind == "trampoline_com":
        def shape(pts):
            s = np.zeros_like(pts)
            s[:, 2] = 1.0
            return s
        mass = density * t * a * a
    else:
        raise ValueError(f"unknown membrane kind {kind!r}")

    return ModeModel(name=f"membrane-{kind}", omega0=omega0, mode_mass=mass,
                     density=density, volume=vol, shape=shape,
                     meta={"side": a, "thickness": t})


def membrane_coupling(p, bias_u, d0, omega0, mode_mass, alpha=1.0):
    """Electrostatic ion-membrane coupling through a biased gap.

    g = alpha q U / (2 d0^2 omega0 sqrt(m M)): the bias U across gap d0
    turns membrane displacement into a force on the ion and vice versa.
    """
    if d0 <= 0 or omega0 <= 0 or mode_mass <= 0:
        raise ValueError("d0, omega0, mode_mass must be positive")
    if not 0.5 <= alpha <= 1.0:
        raise ValueError("geometry factor alpha expected in [0.5, 1]")
    return (alpha * abs(p.charge) * bias_u
            / (2 * d0 ** 2 * omega0 * math.sqrt(p.mass * mode_mass)))


def _beam_shape_factory(l):
    kl = BEAM_KL
    kappa = kl / l
    s1 = (math.cosh(kl) + math.cos(kl)) / (math.sinh(kl) + math.sin(kl))

    def raw(x):
        kx = kappa * x
        return (np.cosh(kx) - np.cos(kx)) - s1 * (np.sinh(kx) - np.sin(kx))

    def draw(x):
        kx = kappa * x
        return kappa * ((np.sinh(kx) + np.sin(kx))
                        - s1 * (np.cosh(kx) - np.cos(kx)))

    tip = raw(np.array([l]))[0]
    return (lambda x: raw(x) / tip), (lambda x: draw(x) / tip)


def _beam_modal_fraction():
    # integral of the tip-normalized fundamental shape squared over the
    # length, as a fraction of the length (the standard 0.2500 constant)
    s, _ = _beam_shape_factory(1.0)
    x, w = np.polynomial.legendre.leggauss(40)
    xx = 0.5 + 0.5 * x
    return float(np.sum(w * 0.5 * s(xx) ** 2))


_BEAM_MODAL_FRACTION = _beam_modal_fraction()


def cantilever_mode(length_l, section: BeamSection, youngs_e, density):
    """Clamped-free beam flexing along x-hat transverse direction.

    Beam axis along x in [0, l]; tip displacement direction chosen along z.
    omega0 = sqrt(beta a^2 E / (rho l^4)); shape is the Euler-Bernoulli
    fundamental normalized to unit tip displacement. The axial strain
    pattern stored here is the tip-normalized slope (the quantity entering
    the flexure piezo-polarization estimate).
    """
    if min(length_l, youngs_e, density) <= 0:
        raise ValueError("length, modulus, density must be positive")
    l = length_l
    omega0 = math.sqrt(section.beta_factor * section.radius_a ** 2
                       * youngs_e / (density * l ** 4))
    s_of, ds_of = _beam_shape_factory(l)
    # simplified geometry: the beam is modeled as the circular cylinder of
    # radius a (for a hexagon, a is the radius of the smallest enclosing
    # circle), used consistently for both mode mass and overlap integrals
    r_a = section.radius_a
    mass = density * math.pi * r_a ** 2 * l * _BEAM_MODAL_FRACTION
    vol = CylinderVolume(axis=0, radius=r_a, span=(0.0, l),
                         radial_edges=np.linspace(0, r_a, 3),
                         axial_cells=8)

    def shape(pts):
        s = np.zeros_like(pts)
        s[:, 2] = s_of(pts[:, 0])
        return s

    def strain(pts):
        v = np.zeros((len(pts), 6))
        v[:, 4] = ds_of(pts[:, 0])  # flexure slope enters the (x,z) shear slot
        return v

    return ModeModel(name="cantilever", omega0=omega0, mode_mass=mass,
                     density=density, volume=vol, shape=shape, strain=strain,
                     polarization_axis=None,
                     meta={"length": l, "section": section,
                           "modal_fraction": _BEAM_MODAL_FRACTION})


def bva_mode(thickness_t, curvature_r, disk_radius_l, overtone_n, density,
             sound_speed, direction):
    """Gaussian-confined quasi-longitudinal overtone of a plano-convex disk.

    Disk occupies y in [0, t], radius L. sigma = (R t^3/(3 n^2 pi^2))^(1/4),
    omega0 = c_s n pi / t. Displacement u = exp(-(x^2+z^2)/2 sigma^2)
    * cos(k_n y) * n_hat with k_n t = n pi: the cosine axial phase puts the
    strain nodes at the two traction-free faces, which is what a
    free-standing plate supports (a sine phase would put displacement nodes
    there instead and underestimates the surface-integrated strain several
    fold). Mode mass rho pi sigma^2 (t/2)(1 - exp(-L^2/sigma^2)).
    """
    if overtone_n < 3 or overtone_n % 2 == 0:
        raise ValueError("overtone must be an odd integer >= 3")
    if curvature_r < 20 * thickness_t:
        raise ValueError("need curvature radius >> thickness")
    t, n = thickness_t, overtone_n
    nhat = np.asarray(direction, dtype=float)
    nhat = nhat / np.linalg.norm(nhat)
    k = n * math.pi / t
    omega0 = sound_speed * n * math.pi / t
    sigma = (curvature_r * t ** 3 / (3 * n ** 2 * math.pi ** 2)) ** 0.25
    mass = (density * math.pi * sigma ** 2 * (t / 2)
            * (1 - math.exp(-disk_radius_l ** 2 / sigma ** 2)))

    # graded radial seed grid: transverse Gaussian scale sigma plus finer
    # cells near the axis, where an ion above the center drives refinement
    redges = np.concatenate([
        np.linspace(0.0, min(4 * t, disk_radius_l / 2), 9),
        np.geomspace(min(4 * t, disk_radius_l / 2), disk_radius_l, 13)[1:]])
    vol = CylinderVolume(axis=1, radius=disk_radius_l, span=(0.0, t),
                         radial_edges=redges, axial_cells=4 * n,
                         azimuthal_cells=4)

    def envelope(pts):
        return np.exp(-(pts[:, 0] ** 2 + pts[:, 2] ** 2) / (2 * sigma ** 2))

    def shape(pts):
        f = envelope(pts) * np.cos(k * pts[:, 1])
        return f[:, None] * nhat[None, :]

    def strain(pts):
        x, y, z = pts[:, 0], pts[:, 1], pts[:, 2]
        f = envelope(pts)
        s_, c_ = np.sin(k * y), np.cos(k * y)
        fx = -x / sigma ** 2 * f
        fz = -z / sigma ** 2 * f
        v = np.empty((len(pts), 6))
        v[:, 0] = nhat[0] * fx * c_
        v[:, 1] = -nhat[1] * k * f * s_
        v[:, 2] = nhat[2] * fz * c_
        v[:, 3] = -nhat[2] * k * f * s_ + nhat[1] * fz * c_
        v[:, 4] = nhat[0] * fz * c_ + nhat[2] * fx * c_
        v[:, 5] = nhat[1] * fx * c_ - nhat[0] * k * f * s_
        return v

    return ModeModel(name=f"bva-n{n}", omega0=omega0, mode_mass=mass,
                     density=density, volume=vol, shape=shape, strain=strain,
                     polarization_axis=tuple(nhat),
                     meta={"sigma": sigma, "k_n": k, "thickness": t,
                           "overtone": n, "disk_radius": disk_radius_l,
                           "sound_speed": sound_speed})


def mode_mass(mode: ModeModel, quad: QuadratureSpec = None):
    """Effective mode mass rho * integral |s|^2 dV by adaptive quadrature.

    The stored closed form is the fast path; this recomputes it from the
    shape field for cross-checking.
    """
    quad = quad or QuadratureSpec(relative_tolerance=1e-5,
                                  max_subdivisions=10)

    def f(pts):
        s = mode.shape(pts)
        return np.sum(s * s, axis=1)

    res = integrate(f, mode.volume, quad)
    return mode.density * float(res.value[0])
