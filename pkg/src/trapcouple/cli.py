"""Scenario runner regenerating the toolkit's reference tables and sweeps.

Each scenario writes a CSV with the data and a JSON sidecar recording every
input (unit-suffixed keys), the seed, the library version, and the operation
each column came from. `--check` additionally evaluates the scenario's
reproduction anchors and exits nonzero on the first tolerance breach.

Exit codes: 0 ok, 1 configuration error, 2 check failure, 3 numerical
failure.
"""

import argparse
import csv
import json
import math
import os
import sys
from dataclasses import asdict, dataclass, replace

import numpy as np

from . import __version__
from .constants import Environment, angular, hz, particle_lookup
from .circuits import (coupling_degradation, min_quality_factor,
                       particle_resonator_coupling, quarterwave_lumped)
from .quadrature import ConvergenceError
from .modes import membrane_coupling, mode_mass
from .piezo import (aligned_dipole_bound, cs_bound, optimize_electrode,
                    optimize_ion_position, overlap_coupling,
                    shunt_coupling)
from .paultrap import (critical_current, detection_metrics, mathieu_q,
                       parametric_rate, rf_power_current,
                       trap_depth_and_secular)
from .loading import capture_energy, rates, time_to_trap
from .collisions import (collision_mc, gamma_factor, kick_bound,
                         per_sample_kick_bound, rf_phase_scan, static_kick,
                         two_electron_trajectory)
from .heating import extrapolate
from . import database as dbm

DB_ENV_VAR = "TRAPCOUPLE_DATABASE"
SCENARIOS = ("table1", "table2", "table5", "fig7", "fig9", "fig10",
             "fig14", "fig15", "custom")


class ConfigError(Exception):
    """Bad arguments, config file, or database content."""


class CheckFailure(Exception):
    """A reproduction anchor missed its tolerance."""


@dataclass
class Check:
    """One reproduction anchor: value must land in [low, high].

    passed is None for documented known deviations that are reported in the
    sidecar but not enforced (see the notes field).
    """
    name: str
    value: float
    target: float
    low: float
    high: float
    passed: bool
    note: str = ""


def _make_check(name, value, target, frac, profile, note=""):
    """Symmetric fractional band around target, halved in strict profile."""
    if profile == "strict":
        frac = frac / 2
    low, high = target * (1 - frac), target * (1 + frac)
    if low > high:
        low, high = high, low
    return Check(name, float(value), float(target), low, high,
                 low <= value <= high, note)


def _range_check(name, value, low, high, note=""):
    return Check(name, float(value), 0.5 * (low + high), low, high,
                 low <= value <= high, note)


def _skip_check(name, value, target, note):
    return Check(name, float(value), float(target), math.nan, math.nan,
                 None, note)


def _fmt(x):
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _write_csv(path, rows):
    if not rows:
        raise ConfigError("scenario produced no rows")
    fields = list(rows[0])
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(fields)
        for r in rows:
            w.writerow([_fmt(r[k]) for k in fields])


def _write_sidecar(path, meta):
    with open(path, "w") as f:
        json.dump(meta, f, indent=2, sort_keys=True)
        f.write("\n")


# ---------------------------------------------------------------------------
# scenarios: each returns (rows, inputs, provenance, checks)

# species, trap frequency [Hz], reference g [Hz], reference Q_min at 4 K and
# 50 mK for the shared 50 um / 50 fF / alpha=1 resonator geometry
_TABLE1 = (
    ("electron", 1.3e9, 1.2e6, 4e5, 7e3),
    ("9Be+", 10e6, 9e3, 56e6, 7e5),
    ("24Mg+", 6e6, 6e3, 92e6, 1.1e6),
    ("40Ca+", 4.7e6, 4e3, 119e6, 1.5e6),
    ("88Sr+", 3.2e6, 3e3, 176e6, 2e6),
)
# the one-digit rounding of the reference column puts these species outside
# the 5% band under any reading of the coupling formula; reported, not
# enforced (see the project decisions ledger)
_TABLE1_KNOWN_OFF = ("24Mg+", "40Ca+")


def _scen_table1(db, params, profile, seed):
    gap_d = params.get("gap_d_m", 50e-6)
    c_trap = params.get("c_trap_f", 50e-15)
    alpha = params.get("alpha", 1.0)
    convention = params.get("convention", "two_pi")
    rows, checks = [], []
    for name, f0, g_ref, qmin4k, qmin50mk in _TABLE1:
        p = particle_lookup(name)
        w0 = angular(f0)
        g = particle_resonator_coupling(p, gap_d, alpha, c_trap, w0)
        q4 = min_quality_factor(g, w0, Environment(4.0),
                                convention=convention)
        q50 = min_quality_factor(g, w0, Environment(0.05),
                                 convention=convention)
        rows.append({"species": name, "trap_frequency_hz": f0,
                     "g_hz": hz(g), "q_min_4k": q4, "q_min_50mk": q50,
                     "swap_convention": convention})
        if name in _TABLE1_KNOWN_OFF:
            checks.append(_skip_check(
                f"g[{name}]", hz(g), g_ref,
                "known one-digit-rounding deviation; reported only"))
        else:
            checks.append(_make_check(f"g[{name}]", hz(g), g_ref, 0.05,
                                      profile))
        checks.append(_make_check(f"q_min_4k[{name}]", q4, qmin4k, 1.0,
                                  profile, "factor-2 band"))
        checks.append(_make_check(f"q_min_50mk[{name}]", q50, qmin50mk,
                                  1.0, profile, "factor-2 band"))
    inputs = {"gap_d_m": gap_d, "c_trap_f": c_trap, "alpha": alpha,
              "swap_convention": convention}
    prov = {"g_hz": "particle_resonator_coupling",
            "q_min_4k": "min_quality_factor",
            "q_min_50mk": "min_quality_factor"}
    return rows, inputs, prov, checks


def _scen_table2(db, params, profile, seed):
    q_det = params.get("q_det", 1000.0)
    q_rf = params.get("q_rf", 1e4)
    f_detect = params.get("detect_frequency_hz", 1e9)
    p = particle_lookup("electron")
    rows, checks = [], []
    for name in ("fig11a", "fig11b"):
        trap = dbm.get_trap_design(db, name)
        q_m = mathieu_q(p, trap)
        depth_j, w_z = trap_depth_and_secular(trap, p)
        depth_ev = depth_j / abs(p.charge)
        p_dis, i_rf = rf_power_current(trap.omega_rf, trap.c_trap,
                                       trap.v_rf, q_rf)
        g = particle_resonator_coupling(p, trap.scale_d, trap.alpha,
                                        trap.c_trap, w_z)
        c_total, linewidth = detection_metrics(trap, p, q_det,
                                               angular(f_detect))
        rows.append({
            "design": name, "v_rf_v": trap.v_rf,
            "drive_frequency_hz": hz(trap.omega_rf),
            "scale_d_m": trap.scale_d, "q_mathieu": q_m,
            "depth_ev": depth_ev, "omega_z_hz": hz(w_z),
            "omega_xy_hz": hz(w_z) / 2, "i_rf_a": i_rf,
            "p_dissipated_w": p_dis, "g_hz": hz(g),
            "c_total_f": c_total, "linewidth_hz": hz(linewidth)})
        ref = trap.reference
        for key, val, frac in (("q_mathieu", q_m, 0.15),
                               ("depth_ev", depth_ev, 0.15),
                               ("omega_z_hz", hz(w_z), 0.15),
                               ("i_rf_a", i_rf, 0.15),
                               ("g_hz", hz(g), 0.15),
                               ("c_total_f", c_total, 0.02),
                               ("linewidth_hz", hz(linewidth), 0.10)):
            checks.append(_make_check(f"{key}[{name}]", val, ref[key],
                                      frac, profile))
    trap_b = dbm.get_trap_design(db, "fig11b")
    p_corner, _ = rf_power_current(trap_b.omega_rf, 150e-15, trap_b.v_rf,
                                   q_rf)
    checks.append(_range_check("p_dissipated_corner_w", p_corner, 0.0,
                               2e-3, "drive-tank budget at C_total=150 fF"))
    nb = critical_current(dbm.get_wire(db, "nb", 10e-6, 100e-9))
    al = critical_current(dbm.get_wire(db, "al", 10e-6, 100e-9))
    checks.append(_make_check("i_c_nb_a", nb, 0.221, 0.01, profile))
    checks.append(_make_check("i_c_al_a", al, 0.0113, 0.01, profile))
    inputs = {"q_det": q_det, "q_rf": q_rf,
              "detect_frequency_hz": f_detect,
              "wire_width_m": 10e-6, "wire_thickness_m": 100e-9}
    prov = {"q_mathieu": "mathieu_q",
            "depth_ev": "trap_depth_and_secular",
            "omega_z_hz": "trap_depth_and_secular",
            "i_rf_a": "rf_power_current",
            "p_dissipated_w": "rf_power_current",
            "g_hz": "particle_resonator_coupling",
            "c_total_f": "detection_metrics",
            "linewidth_hz": "detection_metrics"}
    return rows, inputs, prov, checks


def _scen_table5(db, params, profile, seed):
    height = params.get("ion_height_m",
                        db["modes"]["bva-disk"]["ion_height_m"])
    ion = particle_lookup(params.get("particle", "9Be+"))
    mat = dbm.quartz_material(db)
    refs = db["modes"]["bva-disk"]["reference_g_hz"]
    axes = {"x": (1, 0, 0), "y": (0, 1, 0), "z": (0, 0, 1)}
    rows, checks = [], []
    for n in (3, 5, 7, 9):
        mode = dbm.get_mode(db, "bva-disk", overtone_n=n)
        pos = [0.0, mode.meta["thickness"] + height, 0.0]
        row = {"overtone_n": n, "frequency_hz": hz(mode.omega0)}
        for ax, vec in axes.items():
            g = hz(overlap_coupling(mode, mat, ion, pos, vec))
            row[f"g_{ax}_hz"] = g
            checks.append(_make_check(f"g_{ax}[n={n}]", g,
                                      refs[str(n)][ax], 0.30, profile))
        rows.append(row)
    inputs = {"ion_height_m": height, "particle": ion.name}
    prov = {f"g_{ax}_hz": "overlap_coupling" for ax in axes}
    return rows, inputs, prov, checks


def _scen_fig7(db, params, profile, seed):
    ion = particle_lookup(params.get("particle", "9Be+"))
    mode = dbm.get_mode(db, "gan-beam")
    mat = dbm.gan_material(db)
    l = mode.meta["length"]
    heights = np.asarray(params.get(
        "height_grid_m", np.geomspace(20e-6, 200e-6, 13).tolist()))
    rows = []
    for h in heights:
        g = hz(overlap_coupling(mode, mat, ion, [0.6 * l, 0.0, float(h)],
                                (1, 0, 0)))
        rows.append({"height_m": float(h), "g_hz": g})
    checks = []
    g50 = hz(overlap_coupling(mode, mat, ion, [0.6 * l, 0.0, 50e-6],
                              (1, 0, 0)))
    checks.append(_make_check("g_at_50um_hz", g50, 235.0, 1.0, profile,
                              "factor-2 band"))
    r1, _ = optimize_ion_position(mode, mat, ion, 50e-6)
    checks.append(_make_check("r1_opt_over_l", r1 / l, 0.6, 1 / 6, profile))
    sel = [(h, r["g_hz"]) for h, r in zip(heights, rows)
           if 50e-6 <= h <= 200e-6]
    lh = np.log([h for h, _ in sel])
    lg = np.log([g for _, g in sel])
    slope = float(np.polyfit(lh, lg, 1)[0])
    checks.append(_range_check("loglog_slope", slope, -3.5, -2.5))
    inputs = {"particle": ion.name, "beam_length_m": l,
              "height_grid_m": heights.tolist(),
              "axial_ion_position_over_l": 0.6}
    prov = {"g_hz": "overlap_coupling"}
    return rows, inputs, prov, checks


def _loading_grid(db, params):
    preset = db["loading_presets"]["fig9"]
    cfg = dbm.loading_preset(db)
    n_j = int(params.get("n_j", 21))
    n_p = int(params.get("n_p", 21))
    j_vals = np.geomspace(*preset["j_range_a_per_m2"], n_j)
    p_vals = np.geomspace(*preset["p_range_pa"], n_p)
    return cfg, j_vals, p_vals


def _loading_checks(cfg, profile):
    checks = []
    r = rates(replace(cfg, helium_pressure=0.01))
    checks.append(_make_check("helium_loss_time_s", 1.0 / r.gamma_he,
                              1.3e-6, 0.15, profile))
    # knee: pressure at which the capture energy falls to the injection
    # energy scale (bisection on log P)
    lo, hi = 1e-4, 1e0
    for _ in range(80):
        mid = math.sqrt(lo * hi)
        e_cap, _ = capture_energy(replace(cfg, helium_pressure=mid))
        if e_cap > cfg.e_init:
            lo = mid
        else:
            hi = mid
    checks.append(_make_check("knee_pressure_pa", math.sqrt(lo * hi),
                              0.027, 0.20, profile))
    return checks


def _scen_fig9(db, params, profile, seed):
    cfg, j_vals, p_vals = _loading_grid(db, params)
    maps = time_to_trap(cfg, j_vals, p_vals)
    rows = []
    for i, j in enumerate(j_vals):
        for k, p in enumerate(p_vals):
            rows.append({"current_density_a_per_m2": float(j),
                         "pressure_pa": float(p),
                         "n_steady": maps["n_steady"][i, k],
                         "tau_1e_s": maps["tau_1e"][i, k]})
    checks = _loading_checks(cfg, profile)
    inputs = {"trap_radius_l_m": cfg.trap_radius_l,
              "beam_radius_r0_m": cfg.beam_radius_r0,
              "trap_depth_ev": cfg.trap_depth,
              "gas_temperature_k": cfg.gas_temperature,
              "gamma_cool_per_s": cfg.gamma_cool,
              "e_init_ev": cfg.e_init,
              "j_grid_a_per_m2": j_vals.tolist(),
              "p_grid_pa": p_vals.tolist()}
    prov = {"n_steady": "rates", "tau_1e_s": "rates"}
    return rows, inputs, prov, checks


def _scen_fig10(db, params, profile, seed):
    cfg, j_vals, p_vals = _loading_grid(db, params)
    t_det = params.get("t_detect_s", 10e-6)
    fast = time_to_trap(replace(cfg, t_detect=0.0), j_vals, p_vals)
    slow = time_to_trap(replace(cfg, t_detect=t_det), j_vals, p_vals)
    rows = []
    for i, j in enumerate(j_vals):
        for k, p in enumerate(p_vals):
            rows.append({"current_density_a_per_m2": float(j),
                         "pressure_pa": float(p),
                         "pulses": fast["pulses"][i, k],
                         "t_total_instant_detect_s": fast["t_total"][i, k],
                         "t_total_slow_detect_s": slow["t_total"][i, k]})
    checks = _loading_checks(cfg, profile)
    # beyond the capture knee extra pressure slows loading down again
    mid_j = len(j_vals) // 2
    t_row = slow["t_total"][mid_j]
    k_knee = int(np.searchsorted(p_vals, 0.027))
    checks.append(_range_check(
        "t_total_rises_past_knee",
        float(t_row[-1] / t_row[k_knee]), 1.0, math.inf,
        "loading time at max pressure vs at the knee"))
    inputs = {"t_detect_s": t_det,
              "j_grid_a_per_m2": j_vals.tolist(),
              "p_grid_pa": p_vals.tolist()}
    prov = {"pulses": "time_to_trap", "t_total_instant_detect_s":
            "time_to_trap", "t_total_slow_detect_s": "time_to_trap"}
    return rows, inputs, prov, checks


def _scen_fig14(db, params, profile, seed):
    n_samples = int(params.get("n_samples", 10000))
    cfg = dbm.collision_preset(db, "fig14", seed=seed)
    hist = collision_mc(cfg, n_samples)
    rows = [{"abs_de_ev_lo": float(lo), "abs_de_ev_hi": float(hi),
             "count": int(c)}
            for lo, hi, c in zip(hist.bin_edges[:-1], hist.bin_edges[1:],
                                 hist.counts)]
    _, bound, _ = kick_bound(cfg)
    checks = [
        _range_check("mean_abs_de_ev", hist.mean_abs_de,
                     0.25 * 0.74e-7 * cfg.primary_energy_ep,
                     2.0 * 0.74e-7 * cfg.primary_energy_ep),
        _range_check("rejected_fraction",
                     hist.rejected_count / n_samples, 0.0, 1e-3),
        _range_check("mean_below_bound_ev", hist.mean_abs_de, 0.0, bound),
    ]
    viol = int(np.sum(hist.abs_de > 1.0001 * per_sample_kick_bound(
        cfg.primary_energy_ep, hist.e_s0, hist.min_separation,
        hist.rel_speed)))
    checks.append(_range_check("per_sample_bound_violations", viol, 0, 0))
    inputs = {"n_samples": n_samples, "seed": seed,
              "primary_energy_ep_ev": cfg.primary_energy_ep,
              "u_depth_ev": cfg.u_depth,
              "beam_radius_r0_m": cfg.beam_radius_r0,
              "trap_freqs_hz": [hz(w) for w in cfg.trap_freqs],
              "trap_volume_l_m": cfg.trap_volume_l,
              "injection_z_m": cfg.injection_z,
              "mean_abs_de_ev": hist.mean_abs_de,
              "phase_averaged_bound_ev": bound,
              "sample_count": hist.sample_count,
              "rejected_count": hist.rejected_count}
    prov = {"count": "collision_mc", "mean_abs_de_ev": "collision_mc",
            "phase_averaged_bound_ev": "kick_bound"}
    return rows, inputs, prov, checks


def _fig15_panel_ab(db, params, profile, seed, panel):
    cfg = dbm.collision_preset(db, "fig15", seed=seed)
    # panel a: rf phase for which the passing electron destabilizes the
    # trapped one; panel b: phase for which it stays confined
    phase = params.get("phase_rad",
                       7 * math.pi / 4 if panel == "a" else 3 * math.pi / 4)
    impact_b = params.get("impact_b_m", 2.6e-10)
    traj = two_electron_trajectory(cfg, target_e0=0.0, phase=phase,
                                   impact_b=impact_b)
    rows = []
    for i, t in enumerate(traj.times):
        rows.append({
            "time_s": float(t),
            "target_x_m": float(traj.target_pos[i, 0]),
            "target_y_m": float(traj.target_pos[i, 1]),
            "target_z_m": float(traj.target_pos[i, 2]),
            "target_secular_ev": float(traj.target_secular[i]),
            "primary_kinetic_ev": float(traj.primary_kinetic[i])})
    checks = [_range_check("escape_flag", float(traj.escape),
                           1.0 if panel == "a" else 0.0,
                           1.0 if panel == "a" else 0.0)]
    inputs = {"panel": panel, "phase_rad": phase, "impact_b_m": impact_b,
              "seed": seed, "escape": bool(traj.escape)}
    prov = {"target_secular_ev": "two_electron_trajectory"}
    return rows, inputs, prov, checks


def _fig15_panel_c(db, params, profile, seed):
    cfg = dbm.collision_preset(db, "fig15", seed=seed)
    grid = np.asarray(params.get(
        "impact_grid_m", np.geomspace(1e-10, 1e-4, 7).tolist()))
    n_phases = int(params.get("n_phases", 8))
    scan = rf_phase_scan(cfg, grid, n_phases=n_phases)
    rows, checks = [], []
    for r in scan:
        stat = static_kick(cfg.primary_energy_ep, r.impact_b)
        rows.append({"impact_b_m": r.impact_b,
                     "e_target_min_ev": r.e_s_min,
                     "e_target_median_ev": r.e_s_median,
                     "e_target_max_ev": r.e_s_max,
                     "e_target_phase_avg_ev": r.phase_averaged,
                     "e_target_static_rf_off_ev": stat,
                     "primary_e_min_ev": r.primary_e_min,
                     "primary_e_max_ev": r.primary_e_max})
        checks.append(_range_check(
            f"static_within_envelope[b={r.impact_b:.2e}]",
            stat, r.e_s_min, r.e_s_max))
    fine = rf_phase_scan(cfg, [1e-9], n_phases=24)[0]
    checks.append(_make_check("primary_e_min_ev", fine.primary_e_min,
                              15.0, 0.15, profile))
    checks.append(_make_check("primary_e_max_ev", fine.primary_e_max,
                              46.0, 0.15, profile))
    spread = ((fine.primary_e_max - fine.primary_e_min)
              / (2 * cfg.primary_energy_ep))
    checks.append(_range_check("primary_energy_phase_spread", spread,
                               0.4, 0.8))
    inputs = {"impact_grid_m": grid.tolist(), "n_phases": n_phases,
              "seed": seed,
              "primary_energy_ep_ev": cfg.primary_energy_ep}
    prov = {"e_target_min_ev": "rf_phase_scan",
            "e_target_static_rf_off_ev": "static_kick"}
    return rows, inputs, prov, checks


def _fig15_panel_d(db, params, profile, seed):
    cfg = dbm.collision_preset(db, "fig15", seed=seed)
    radii = np.asarray(params.get(
        "beam_radius_grid_m", np.geomspace(10e-6, 100e-6, 10).tolist()))
    rows = []
    for r0 in radii:
        c_depth = replace(cfg, beam_radius_r0=float(r0))
        c_cold = replace(cfg, beam_radius_r0=float(r0), e_thresh=3e-4)
        rows.append({"beam_radius_m": float(r0),
                     "bound_depth_threshold_ev": kick_bound(c_depth)[1],
                     "bound_cold_threshold_ev": kick_bound(c_cold)[1]})
    checks = [
        _make_check("gamma_depth", gamma_factor(1.01, 30.0), 1.83, 0.01,
                    profile),
        _make_check("gamma_cold", gamma_factor(3e-4, 30.0), 1.01, 0.01,
                    profile),
        _make_check("cold_bound_over_ep",
                    kick_bound(replace(cfg, e_thresh=3e-4))[1]
                    / cfg.primary_energy_ep, 4.8e-7, 0.05, profile),
    ]
    inputs = {"beam_radius_grid_m": radii.tolist(), "seed": seed,
              "u_depth_ev": cfg.u_depth, "cold_e_thresh_ev": 3e-4}
    prov = {"bound_depth_threshold_ev": "kick_bound",
            "bound_cold_threshold_ev": "kick_bound"}
    return rows, inputs, prov, checks


def _scen_fig15(db, params, profile, seed):
    panel = params.get("panel", "c")
    if panel in ("a", "b"):
        return _fig15_panel_ab(db, params, profile, seed, panel)
    if panel == "c":
        return _fig15_panel_c(db, params, profile, seed)
    if panel == "d":
        return _fig15_panel_d(db, params, profile, seed)
    raise ConfigError(f"unknown fig15 panel {panel!r} (want a|b|c|d)")


_SCENARIOS = {"table1": _scen_table1, "table2": _scen_table2,
              "table5": _scen_table5, "fig7": _scen_fig7,
              "fig9": _scen_fig9, "fig10": _scen_fig10,
              "fig14": _scen_fig14, "fig15": _scen_fig15}


# ---------------------------------------------------------------------------
# auxiliary subcommands

def _cmd_modes(db, args):
    names = sorted(db["modes"])
    if args.action == "list":
        for n in names:
            print(n)
        return 0
    name = args.name
    if name not in names:
        raise ConfigError(f"unknown mode {name!r}; known: {names}")
    if name == "bva-disk":
        mode = dbm.get_mode(db, name, overtone_n=args.overtone)
    else:
        mode = dbm.get_mode(db, name)
    info = {"name": mode.name, "frequency_hz": hz(mode.omega0),
            "mode_mass_kg": mode.mode_mass,
            "density_kg_per_m3": mode.density}
    for k, v in mode.meta.items():
        if isinstance(v, (int, float, str)):
            info[k] = v
    ctx = db["modes"][name].get("coupling_context")
    if ctx:
        p = particle_lookup(ctx["particle"])
        g = membrane_coupling(p, ctx["bias_v"], ctx["gap_d0_m"],
                              mode.omega0, mode.mode_mass, ctx["alpha"])
        info["coupling_g_hz"] = hz(g)
        info["coupling_context"] = ctx
    print(json.dumps(info, indent=2, sort_keys=True))
    return 0


def _cmd_quartz_shunt(db, args, profile, out_dir):
    ion = particle_lookup("9Be+")
    mat = dbm.quartz_material(db)
    e_bar = dbm.quartz_electrode_coefficient(db)
    mode = dbm.get_mode(db, "bva-disk", overtone_n=3)
    sigma = mode.meta["sigma"]
    d_t, c_trap = 200e-6, 50e-15
    rows = []
    for le in np.geomspace(0.1, 5.0, 25) * sigma:
        g = shunt_coupling(ion, d_t, e_bar, mat.permittivity, mode,
                           float(le), c_trap)
        rows.append({"electrode_radius_m": float(le),
                     "electrode_radius_over_sigma": float(le / sigma),
                     "g_hz": hz(g)})
    le_opt, g_opt = optimize_electrode(ion, d_t, e_bar, mat.permittivity,
                                       mode, c_trap)
    checks = [
        _make_check("le_opt_over_sigma", le_opt / sigma, 1.05, 0.05,
                    profile),
        _make_check("g_opt_hz", hz(g_opt), 10.0, 0.30, profile),
    ]
    inputs = {"trap_gap_dt_m": d_t, "c_trap_f": c_trap,
              "e_bar_c_per_m2": e_bar, "overtone_n": 3,
              "mode_sigma_m": sigma, "le_opt_m": le_opt,
              "g_opt_hz": hz(g_opt)}
    prov = {"g_hz": "shunt_coupling", "g_opt_hz": "optimize_electrode"}
    _emit(out_dir, "quartz-shunt", rows, inputs, prov, checks, args)
    return _enforce(checks, args.check)


def _cmd_heating(db, args, profile, out_dir):
    refs = dbm.heating_references(db)
    if args.target:
        try:
            sp, d, f, alpha = args.target.split(",")
            target, d, f = particle_lookup(sp), float(d), float(f)
            alpha = float(alpha)
        except (ValueError, KeyError) as e:
            raise ConfigError(f"bad --to spec {args.target!r}: {e}")
    else:
        target, d, f, alpha = particle_lookup("electron"), 50e-6, 1e9, 0.5
    if args.row is not None:
        if not 0 <= args.row < len(refs):
            raise ConfigError(f"--from row out of range 0..{len(refs)-1}")
        refs = [refs[args.row]]
    rows = []
    for ref in refs:
        rate = extrapolate(ref, target, d, f, alpha)
        rows.append({"ref_species": ref.species.name,
                     "ref_distance_m": ref.distance_d,
                     "ref_frequency_hz": ref.frequency_f,
                     "ref_rate_quanta_per_s": ref.rate,
                     "ref_material": ref.material,
                     "target_species": target.name,
                     "target_distance_m": d, "target_frequency_hz": f,
                     "alpha_exp": alpha,
                     "target_rate_quanta_per_s": rate})
    checks = []
    if args.row is None and target.name == "electron" and alpha == 0.5:
        vals = [r["target_rate_quanta_per_s"] for r in rows]
        checks.append(_make_check("band_low_quanta_per_s", min(vals),
                                  30.0, 0.10, profile))
        checks.append(_make_check("band_high_quanta_per_s", max(vals),
                                  160.0, 0.10, profile))
    inputs = {"target_species": target.name, "target_distance_m": d,
              "target_frequency_hz": f, "alpha_exp": alpha}
    prov = {"target_rate_quanta_per_s": "extrapolate"}
    _emit(out_dir, "heating", rows, inputs, prov, checks, args)
    return _enforce(checks, args.check)


def _cmd_trap_check(db, args):
    name = args.design
    if os.path.exists(name):
        try:
            with open(name) as f:
                spec = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"cannot read design file {name!r}: {e}")
        user_db = {"trap_designs": {"user": spec}}
        trap = dbm.get_trap_design(user_db, "user")
    else:
        trap = dbm.get_trap_design(db, name)
    p = particle_lookup("electron")
    q_m = mathieu_q(p, trap)
    report = {"design": trap.name, "q_mathieu": q_m,
              "stable": bool(q_m < 1.0)}
    ok = q_m < 1.0
    if q_m < 1.0:
        depth_j, w_z = trap_depth_and_secular(trap, p)
        report["depth_ev"] = depth_j / abs(p.charge)
        report["omega_z_hz"] = hz(w_z)
        ok = ok and depth_j > 0
    if trap.c_trap > 0:
        q_rf = getattr(args, "q_rf", 1e4)
        p_dis, i_rf = rf_power_current(trap.omega_rf, trap.c_trap,
                                       trap.v_rf, q_rf)
        report["i_rf_a"] = i_rf
        report["p_dissipated_w"] = p_dis
        i_c = critical_current(dbm.get_wire(
            db, args.wire, args.wire_width_m, args.wire_thickness_m))
        report["i_c_a"] = i_c
        report["i_c_margin"] = i_c / i_rf
        ok = ok and i_c > i_rf
        if args.budget_w is not None:
            report["within_power_budget"] = bool(p_dis <= args.budget_w)
            ok = ok and p_dis <= args.budget_w
    report["ok"] = bool(ok)
    print(json.dumps(report, indent=2, sort_keys=True))
    return 0 if ok else 2


# ---------------------------------------------------------------------------
# plumbing

def _emit(out_dir, name, rows, inputs, prov, checks, args):
    os.makedirs(out_dir, exist_ok=True)
    csv_path = os.path.join(out_dir, f"{name}.csv")
    _write_csv(csv_path, rows)
    meta = {"schema_version": 1,
            "library_version": __version__,
            "scenario": name,
            "seed": getattr(args, "seed", 0),
            "tolerance_profile": getattr(args, "tolerance_profile",
                                         "paper"),
            "database": getattr(args, "database", None) or
            os.environ.get(DB_ENV_VAR) or "builtin",
            "inputs": inputs,
            "provenance": prov,
            "checks": [asdict(c) for c in checks]}
    _write_sidecar(os.path.join(out_dir, f"{name}.json"), meta)
    print(f"wrote {csv_path}")


def _enforce(checks, check_mode):
    if not check_mode:
        return 0
    for c in checks:
        if c.passed is False:
            print(f"check failed: {c.name} = {c.value:.6g}, wanted "
                  f"[{c.low:.6g}, {c.high:.6g}] (target {c.target:.6g})",
                  file=sys.stderr)
            return 2
    n = sum(1 for c in checks if c.passed)
    print(f"all {n} enforced checks passed")
    return 0


def _load_custom(path):
    if not path:
        raise ConfigError("scenario 'custom' requires --config FILE")
    try:
        with open(path) as f:
            spec = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"cannot read config {path!r}: {e}")
    if spec.get("schema_version") != 1:
        raise ConfigError("config must declare schema_version: 1")
    kind = spec.get("kind")
    if kind not in _SCENARIOS:
        raise ConfigError(f"config kind must be one of "
                          f"{sorted(_SCENARIOS)}, got {kind!r}")
    params = spec.get("parameters", {})
    if not isinstance(params, dict):
        raise ConfigError("config 'parameters' must be an object")
    return kind, params


def _cmd_run(db, args):
    kind = args.scenario
    params = {}
    if kind == "custom":
        kind, params = _load_custom(args.config)
    elif args.config:
        _, params = _load_custom(args.config)
    if args.panel is not None:
        if args.scenario not in ("fig15", "custom"):
            raise ConfigError("--panel only applies to fig15")
        params["panel"] = args.panel
    if args.samples is not None:
        params["n_samples"] = args.samples
    rows, inputs, prov, checks = _SCENARIOS[kind](
        db, params, args.tolerance_profile, args.seed)
    _emit(args.out, kind if args.scenario != "custom" else "custom",
          rows, inputs, prov, checks, args)
    return _enforce(checks, args.check)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        # argparse defaults to exit code 2, which we reserve for check
        # failures; argument problems are configuration errors
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _add_common(p):
    p.add_argument("--seed", type=int, default=0,
                   help="seed for stochastic scenarios")
    p.add_argument("--check", action="store_true",
                   help="evaluate reproduction anchors; exit 2 on breach")
    p.add_argument("--tolerance-profile", choices=("paper", "strict"),
                   default="paper",
                   help="'strict' halves every fractional tolerance")
    p.add_argument("--database", default=None,
                   help=f"materials database JSON (or ${DB_ENV_VAR})")
    p.add_argument("--out", default=".",
                   help="output directory for CSV/JSON artifacts")


def build_parser():
    top = _Parser(prog="trapcouple",
                  description="Trapped-particle coupling scenario runner")
    top.add_argument("--version", action="version", version=__version__)
    sub = top.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a named scenario",
                         parents=[])
    run.add_argument("scenario", choices=SCENARIOS)
    run.add_argument("--config", default=None,
                     help="JSON parameter overrides (required for custom)")
    run.add_argument("--panel", choices=("a", "b", "c", "d"), default=None,
                     help="fig15 panel selection")
    run.add_argument("--samples", type=int, default=None,
                     help="Monte Carlo sample count (fig14)")
    _add_common(run)

    modes = sub.add_parser("modes", help="inspect mechanical mode presets")
    msub = modes.add_subparsers(dest="action", required=True)
    mlist = msub.add_parser("list")
    mdesc = msub.add_parser("describe")
    mdesc.add_argument("name")
    mdesc.add_argument("--overtone", type=int, default=3)
    for p in (mlist, mdesc):
        p.add_argument("--database", default=None)

    qs = sub.add_parser("quartz-shunt",
                        help="shunt-electrode coupling sweep")
    _add_common(qs)

    trap = sub.add_parser("trap", help="trap design utilities")
    tsub = trap.add_subparsers(dest="action", required=True)
    tcheck = tsub.add_parser("check")
    tcheck.add_argument("design",
                        help="preset name or design JSON file")
    tcheck.add_argument("--budget-w", type=float, default=None,
                        help="cryostat dissipation budget [W]")
    tcheck.add_argument("--wire", choices=("nb", "al"), default="nb",
                        help="superconducting lead material")
    tcheck.add_argument("--wire-width-m", type=float, default=20e-6)
    tcheck.add_argument("--wire-thickness-m", type=float, default=200e-9)
    tcheck.add_argument("--database", default=None)

    heat = sub.add_parser("heating",
                          help="extrapolate measured heating rates")
    heat.add_argument("--from", dest="row", type=int, default=None,
                      help="reference row index (default: all rows)")
    heat.add_argument("--to", dest="target", default=None,
                      help="species,distance_m,frequency_hz,alpha")
    _add_common(heat)
    return top


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        db_path = getattr(args, "database", None) or os.environ.get(
            DB_ENV_VAR)
        db = dbm.load_database(db_path)
        if args.command == "run":
            return _cmd_run(db, args)
        if args.command == "modes":
            return _cmd_modes(db, args)
        if args.command == "quartz-shunt":
            return _cmd_quartz_shunt(db, args, args.tolerance_profile,
                                     args.out)
        if args.command == "trap":
            return _cmd_trap_check(db, args)
        if args.command == "heating":
            return _cmd_heating(db, args, args.tolerance_profile, args.out)
        raise ConfigError(f"unknown command {args.command!r}")
    except (ConfigError, dbm.DatabaseError, KeyError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except ConvergenceError as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return 3
    except (ValueError, FloatingPointError, ArithmeticError) as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
