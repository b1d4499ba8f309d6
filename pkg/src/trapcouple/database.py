"""Loader for the materials / designs / presets database.

The database is a versioned JSON file shipped with the package; an
alternative path can be supplied explicitly or via the TRAPCOUPLE_DATABASE
environment variable.
"""

from __future__ import annotations

import json
import math
import os
from importlib import resources

import numpy as np

from .constants import angular, particle_lookup
from .heating import HeatingReference
from .loading import LoadingConfig
from .modes import BeamSection, bva_mode, cantilever_mode, membrane_mode
from .paultrap import FilmWire, TrapDesign
from .piezo import PiezoMaterial, rotate_piezo

ENV_VAR = "TRAPCOUPLE_DATABASE"
SCHEMA_VERSION = 1


class DatabaseError(ValueError):
    pass


def load_database(path=None):
    """Read and validate the database dict."""
    if path is None:
        path = os.environ.get(ENV_VAR)
    if path is None:
        text = (resources.files("trapcouple") / "data" /
                "database.json").read_text()
    else:
        with open(path) as fh:
            text = fh.read()
    try:
        db = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DatabaseError(f"database is not valid JSON: {exc}") from exc
    if db.get("schema_version") != SCHEMA_VERSION:
        raise DatabaseError(
            f"unsupported database schema_version "
            f"{db.get('schema_version')!r}; expected {SCHEMA_VERSION}")
    return db


def quartz_material(db, rotated=True):
    """Alpha-quartz PiezoMaterial, by default in the rotated-cut frame."""
    m = db["materials"]["alpha-quartz"]
    e11, e14 = m["e11_c_per_m2"], m["e14_c_per_m2"]
    e_base = [
        [e11, -e11, 0.0, e14, 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.0, -e14, -e11],
        [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    ]
    if rotated:
        angles = [math.radians(a) for a in m["cut_angles_deg"]]
        e = rotate_piezo(e_base, tuple(angles))
    else:
        e = np.asarray(e_base)
    return PiezoMaterial(name="alpha-quartz",
                         e_matrix=tuple(map(tuple, e)),
                         permittivity=m["permittivity_f_per_m"],
                         density=m["density_kg_per_m3"],
                         sound_speed=m["sound_speed_m_per_s"])


def quartz_electrode_coefficient(db):
    """Electrode-weighted effective coefficient e_bar of the rotated cut:
    n_y e22 + n_z e24 + n_x e26 for the stored polarization axis."""
    mat = quartz_material(db).e
    n = db["materials"]["alpha-quartz"]["polarization_axis"]
    return abs(n[1] * mat[1, 1] + n[2] * mat[1, 3] + n[0] * mat[1, 5])


def gan_material(db):
    m = db["materials"]["gan"]
    return PiezoMaterial(name="gan",
                         e_matrix=tuple(map(tuple, m["e_matrix_c_per_m2"])),
                         permittivity=m["permittivity_f_per_m"],
                         density=m["density_kg_per_m3"],
                         sound_speed=m["sound_speed_m_per_s"])


def get_mode(db, name, overtone_n=3):
    """Instantiate a mode preset by name."""
    try:
        m = db["modes"][name]
    except KeyError:
        raise DatabaseError(f"unknown mode preset {name!r}; known: "
                            f"{sorted(db['modes'])}") from None
    if name in ("drum-membrane", "trampoline-membrane"):
        return membrane_mode(m["kind"], m["side_m"], m["thickness_m"],
                             m["density_kg_per_m3"],
                             angular(m["frequency_hz"]))
    if name.startswith("gan-beam"):
        # beam radius calibrated so the section formula hits the published
        # flexure frequency
        omega0 = angular(m["frequency_hz"])
        l = m["length_m"]
        rho, e_young = m["density_kg_per_m3"], m["youngs_e_pa"]
        beta = 2.57 if m["section_shape"] == "hexagonal" else 3.09
        radius = omega0 * l ** 2 * math.sqrt(rho / (beta * e_young))
        section = BeamSection(shape=m["section_shape"], radius_a=radius)
        return cantilever_mode(l, section, e_young, rho)
    if name == "bva-disk":
        axis = db["materials"]["alpha-quartz"]["polarization_axis"]
        return bva_mode(m["thickness_m"], m["curvature_m"],
                        m["disk_radius_m"], overtone_n,
                        m["density_kg_per_m3"], m["sound_speed_m_per_s"],
                        axis)
    raise DatabaseError(f"no constructor for mode preset {name!r}")


def get_trap_design(db, name):
    try:
        t = db["trap_designs"][name]
    except KeyError:
        raise DatabaseError(f"unknown trap design {name!r}; known: "
                            f"{sorted(db['trap_designs'])}") from None
    return TrapDesign(
        name=name, v_rf=t["v_rf_v"], omega_rf=angular(t["omega_rf_hz"]),
        scale_d=t["scale_d_m"], beta_geom=t["beta_geom"],
        zeta_depth=t["zeta_depth"], alpha=t["alpha"],
        c_trap=t["c_trap_f"], capacitances=dict(t["capacitances_f"]),
        detection_gap_d=t["detection_gap_d_m"],
        zeta_anharmonic=t["zeta_anharmonic"],
        reference=dict(t["reference"]))


def get_wire(db, material, width_w, thickness_b):
    try:
        s = db["superconductors"][material]
    except KeyError:
        raise DatabaseError(f"unknown superconductor {material!r}; known: "
                            f"{sorted(db['superconductors'])}") from None
    return FilmWire(width_w=width_w, thickness_b=thickness_b,
                    penetration_lambda=s["penetration_lambda_m"],
                    critical_density_jc=s["critical_density_jc_a_per_m2"])


def heating_references(db):
    return [HeatingReference(species=particle_lookup(r["species"]),
                             distance_d=r["distance_m"],
                             frequency_f=r["frequency_hz"],
                             rate=r["rate_quanta_per_s"],
                             temperature=r["temperature_k"],
                             material=r["material"])
            for r in db["heating_references"]]


def loading_preset(db, name="fig9", current_density_j=10.0,
                   helium_pressure=1e-2):
    p = db["loading_presets"][name]
    return LoadingConfig(
        current_density_j=current_density_j,
        beam_radius_r0=p["beam_radius_r0_m"],
        helium_pressure=helium_pressure,
        trap_radius_l=p["trap_radius_l_m"],
        trap_depth=p["trap_depth_ev"],
        gas_temperature=p["gas_temperature_k"],
        gamma_cool=p["gamma_cool_per_s"],
        e_init=p["e_init_ev"],
        t_detect=p["t_detect_s"])


def collision_preset(db, name="fig14", seed=0):
    from .collisions import CollisionConfig, RFDrive
    p = db["collision_presets"][name]
    if "trap_freq_hz" in p:
        w = angular(p["trap_freq_hz"])
        return CollisionConfig(
            beam_radius_r0=p["beam_radius_r0_m"], trap_freqs=(w, w, w),
            trap_volume_l=p["trap_volume_l_m"], u_depth=p["u_depth_ev"],
            primary_energy_ep=p["primary_energy_ep_ev"],
            injection_z=p["injection_z_m"], seed=seed)
    drive = RFDrive(omega_rf=angular(p["omega_rf_hz"]),
                    q_mathieu=p["q_mathieu"])
    q, w = p["q_mathieu"], angular(p["omega_rf_hz"])
    wz = q * w / (2 * math.sqrt(2))
    return CollisionConfig(
        beam_radius_r0=p["beam_radius_r0_m"],
        trap_freqs=(wz / 2, wz / 2, wz),
        trap_volume_l=p["trap_volume_l_m"], u_depth=p["u_depth_ev"],
        primary_energy_ep=p["primary_energy_ep_ev"],
        injection_z=p["injection_z_m"], rf=drive, seed=seed)
