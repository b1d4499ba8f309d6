"""Electron-electron collisions during loading: Rutherford kinematics,
analytic kick bounds, and direct two-electron Monte Carlo in the trap.

The Monte Carlo integrates both electrons with an adaptive embedded
Runge-Kutta 4(5) pair (unsoftened Coulomb; impact parameters stay >= 1 A).
The target's energy change is accumulated as the work done on it by the
Coulomb force — a separate ODE component — because the kick (~1e-7 of the
primary energy) would otherwise drown in cancellation against the trap
energy. Sample streams come from a counter-based RNG keyed by
(seed, sample index), so results are bit-identical however the batch is
split.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .constants import ANGSTROM, EPS_0, EV, M_E, Q_E

KCOUL = Q_E ** 2 / (4 * math.pi * EPS_0)  # Coulomb energy*distance [J m]
MU = M_E / 2                              # reduced mass of the pair


@dataclass(frozen=True)
class RFDrive:
    """Quadrupole rf drive replacing the static pseudopotential."""
    omega_rf: float        # [rad/s]
    q_mathieu: float       # axial Mathieu q
    initial_phase: float = 0.0


@dataclass(frozen=True)
class CollisionConfig:
    beam_radius_r0: float          # [m]
    trap_freqs: tuple              # secular (wx, wy, wz) [rad/s]
    trap_volume_l: float           # trap-field region radius [m]
    u_depth: float                 # trap depth [eV]
    primary_energy_ep: float = 30.0  # [eV]
    e_thresh: float = None         # capture threshold [eV]; None -> u_depth
    rf: Optional[RFDrive] = None
    injection_z: float = -1e-3     # [m]
    current_density_j: float = 1.0  # [A/m^2], for the beam-heating bound
    seed: int = 0
    rtol: float = 1e-10

    def __post_init__(self):
        if min(self.beam_radius_r0, self.trap_volume_l, self.u_depth,
               self.primary_energy_ep) <= 0:
            raise ValueError("physical fields must be positive")
        if self.injection_z >= 0:
            raise ValueError("primary is injected from negative z")


def rutherford_angle(impact_b, rel_speed_v):
    """Coulomb deflection of the relative coordinate:
    theta = 2 arctan((q^2/4 pi eps0 b)/(mu v^2))."""
    if impact_b <= 0 or rel_speed_v <= 0:
        raise ValueError("impact parameter and speed must be positive")
    return 2 * math.atan(KCOUL / (impact_b * MU * rel_speed_v ** 2))


def gamma_factor(e_thresh_ev, e_p_ev):
    """Velocity-addition factor for a moving target:
    (1 + sqrt(E/E_p))(1 + 3 sqrt(E/E_p))."""
    r = math.sqrt(e_thresh_ev / e_p_ev)
    return (1 + r) * (1 + 3 * r)


def kick_bound(cfg: CollisionConfig):
    """Analytic bounds: (gamma, beam-averaged |dE| bound [eV],
    beam heating rate bound [eV/s]).

    <|dE|> <= gamma q^2/(4 pi eps0 r0); dE/dt <= q J r0/(4 eps0).
    """
    e_th = cfg.e_thresh if cfg.e_thresh is not None else cfg.u_depth
    gamma = gamma_factor(e_th, cfg.primary_energy_ep)
    mean_kick = gamma * KCOUL / cfg.beam_radius_r0 / EV
    heating = (Q_E * cfg.current_density_j * cfg.beam_radius_r0
               / (4 * EPS_0)) / EV
    return gamma, mean_kick, heating


def static_kick(e_p, impact_b):
    """Exact energy [eV] given to a stationary free target by a primary of
    energy e_p [eV] at impact parameter b: E_s = E_p x^2/(1+x^2),
    x = (q^2/4 pi eps0 b)/E_p."""
    if e_p <= 0 or impact_b <= 0:
        raise ValueError("energy and impact parameter must be positive")
    x = KCOUL / (impact_b * e_p * EV)
    return e_p * x * x / (1 + x * x)


def per_sample_kick_bound(e_p_ev, e_s0_ev, min_separation, rel_speed_v):
    """Per-collision bound |dE| <= gamma(E_s) E_p |sin(theta_R/2)|, with the
    effective asymptotic impact parameter recovered from the recorded
    minimum pair separation (valid against a moving target, unlike the
    drawn beam offset)."""
    d = np.asarray(min_separation, dtype=float)
    v = np.asarray(rel_speed_v, dtype=float)
    e_rel = 0.5 * MU * v ** 2
    b2 = d ** 2 * np.maximum(1 - KCOUL / (e_rel * d), 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        x = KCOUL / (np.sqrt(b2) * MU * v ** 2)
        sin_half = np.where(b2 == 0, 1.0, x / np.sqrt(1 + x * x))
    r = np.sqrt(np.asarray(e_s0_ev, dtype=float) / e_p_ev)
    gamma = (1 + r) * (1 + 3 * r)
    return gamma * e_p_ev * sin_half


# ---------------------------------------------------------------------------
# batched adaptive RK4(5) two-electron integrator
# state rows: [rp(3), vp(3), rt(3), vt(3), W]

_RKF_C = np.array([0.0, 0.25, 3 / 8, 12 / 13, 1.0, 0.5])
_RKF_A = [
    np.array([]),
    np.array([0.25]),
    np.array([3 / 32, 9 / 32]),
    np.array([1932 / 2197, -7200 / 2197, 7296 / 2197]),
    np.array([439 / 216, -8.0, 3680 / 513, -845 / 4104]),
    np.array([-8 / 27, 2.0, -3544 / 2565, 1859 / 4104, -11 / 40]),
]
_RKF_B5 = np.array([16 / 135, 0.0, 6656 / 12825, 28561 / 56430, -9 / 50,
                    2 / 55])
_RKF_B4 = np.array([25 / 216, 0.0, 1408 / 2565, 2197 / 4104, -1 / 5, 0.0])

# error-normalization scales per component kind
_ATOL = np.concatenate([
    np.full(3, 1e-12), np.full(3, 3e-5),   # primary pos [m], vel [m/s]
    np.full(3, 1e-12), np.full(3, 3e-5),   # target pos, vel
    np.full(1, 1e-32),                     # work [J]
])

_AX_WEIGHT = np.array([-0.25, -0.25, 0.5])  # rf quadrupole axis weights


def _rf_envelope(r, field_radius):
    """Spatial envelope of the rf quadrupole: full strength inside the
    electrode-bounded region, steep C^1 roll-off outside (the fringe field
    of a bounded electrode stack decays over a small fraction of the gap)."""
    r2 = np.einsum("ij,ij->i", r, r)
    s4 = (r2 / field_radius ** 2) ** 2
    damp = np.ones_like(r2)
    far = s4 > 1.0
    damp[far] = np.exp(np.maximum(8.0 * (1.0 - s4[far]), -700.0))
    return damp


def _trap_acceleration(r, t, cfg, phases):
    """Trap force per mass on an electron at r (N,3).

    The harmonic pseudopotential Phi is capped smoothly at the trap depth
    U_d: for Phi > U_d the potential continues as U_d (2 - U_d/Phi), so the
    force stays continuous (an adaptive integrator cannot cross a force
    discontinuity) while the potential saturates far from the trap. In rf
    mode the quadrupole field is rolled off steeply beyond the
    electrode-bounded field radius l (see _rf_envelope).
    """
    if cfg.rf is None:
        u_cap = cfg.u_depth * EV / M_E   # specific potential cap [J/kg]
        w2 = np.asarray(cfg.trap_freqs) ** 2
        phi = 0.5 * np.einsum("j,ij->i", w2, r ** 2)
        damp = np.ones_like(phi)
        far = phi > u_cap
        damp[far] = (u_cap / phi[far]) ** 2
        return -w2[None, :] * r * damp[:, None]
    coef = (cfg.rf.q_mathieu * cfg.rf.omega_rf ** 2
            * np.cos(cfg.rf.omega_rf * t + phases))
    damp = _rf_envelope(r, cfg.trap_volume_l)
    return coef[:, None] * r * _AX_WEIGHT[None, :] * damp[:, None]


def _deriv(t, y, cfg, phases):
    rp, vp = y[:, 0:3], y[:, 3:6]
    rt, vt = y[:, 6:9], y[:, 9:12]
    rel = rp - rt
    d2 = np.einsum("ij,ij->i", rel, rel)
    inv_d3 = d2 ** -1.5
    coul = (KCOUL / M_E) * rel * inv_d3[:, None]  # accel on primary
    ap = coul + _trap_acceleration(rp, t, cfg, phases)
    at = -coul + _trap_acceleration(rt, t, cfg, phases)
    dy = np.empty_like(y)
    dy[:, 0:3] = vp
    dy[:, 3:6] = ap
    dy[:, 6:9] = vt
    dy[:, 9:12] = at
    # work done on the target by the Coulomb force
    dy[:, 12] = -(KCOUL) * np.einsum("ij,ij->i", rel * inv_d3[:, None], vt)
    return dy


def secular_energy(rt, vt, t, cfg, phases):
    """Secular (trap-frame) energy of the target [J], filtering the
    first-order micromotion velocity in rf mode."""
    rt = np.atleast_2d(rt)
    vt = np.atleast_2d(vt)
    t = np.atleast_1d(t)
    phases = np.atleast_1d(phases)
    if cfg.rf is None:
        w2 = np.asarray(cfg.trap_freqs) ** 2
        phi = 0.5 * M_E * np.einsum("j,ij->i", w2, rt ** 2)
        u_cap = cfg.u_depth * EV
        pot = np.where(phi > u_cap,
                       u_cap * (2 - u_cap / np.maximum(phi, 1e-300)), phi)
        kin = 0.5 * M_E * np.einsum("ij,ij->i", vt, vt)
        return kin + pot
    else:
        q, w = cfg.rf.q_mathieu, cfg.rf.omega_rf
        s = np.sin(w * t + phases)
        # first-order micromotion, rolled off with the rf field envelope
        damp = _rf_envelope(rt, cfg.trap_volume_l)
        vmm = np.empty_like(vt)
        vmm[:, 0] = (q * w / 4) * rt[:, 0] * s * damp
        vmm[:, 1] = (q * w / 4) * rt[:, 1] * s * damp
        vmm[:, 2] = -(q * w / 2) * rt[:, 2] * s * damp
        wsec = np.array([q * w / (4 * math.sqrt(2)),
                         q * w / (4 * math.sqrt(2)),
                         q * w / (2 * math.sqrt(2))])
        vt = vt - vmm
        pot = 0.5 * M_E * np.einsum("j,ij->i", wsec ** 2, rt ** 2)
    r2 = np.einsum("ij,ij->i", rt, rt)
    outside = r2 >= cfg.trap_volume_l ** 2
    # potential plateaus at its boundary value outside the field region
    scale = np.where(outside, cfg.trap_volume_l ** 2 / np.maximum(r2, 1e-300),
                     1.0)
    kin = 0.5 * M_E * np.einsum("ij,ij->i", vt, vt)
    return kin + pot * scale


@dataclass
class _BatchResult:
    y: np.ndarray            # final states (N, 13)
    t: np.ndarray            # final times (N,)
    min_separation: np.ndarray
    primary_min_r: np.ndarray
    primary_ke_at_min: np.ndarray  # [J]
    failed: np.ndarray       # bool per sample
    # trajectory recording (only when record=True, N must be 1)
    rec_t: Optional[np.ndarray] = None
    rec_y: Optional[np.ndarray] = None


def _integrate_batch(cfg, y0, phases, t_max, stop_on_exit=True,
                     record=False):
    y = np.array(y0, dtype=float)
    n = len(y)
    t = np.zeros(n)
    dt = np.full(n, 1e-12)
    exit_r2 = (2 * abs(cfg.injection_z)) ** 2
    active = np.ones(n, dtype=bool)
    failed = np.zeros(n, dtype=bool)
    rel0 = y[:, 0:3] - y[:, 6:9]
    dmin = np.sqrt(np.einsum("ij,ij->i", rel0, rel0))
    rp2 = np.einsum("ij,ij->i", y[:, 0:3], y[:, 0:3])
    prmin = np.sqrt(rp2)
    vp2 = np.einsum("ij,ij->i", y[:, 3:6], y[:, 3:6])
    pke = 0.5 * M_E * vp2 + KCOUL / dmin
    rec_t, rec_y = ([0.0], [y[0].copy()]) if record else (None, None)

    k = np.empty((6, n, 13))
    while active.any():
        ia = np.flatnonzero(active)
        ya, ta = y[ia], t[ia]
        ha = np.minimum(dt[ia], t_max - ta)  # land exactly on t_max
        pha = phases[ia]
        for s in range(6):
            ys = ya.copy()
            for j in range(s):
                ys += (ha * _RKF_A[s][j])[:, None] * k[j, ia]
            k[s, ia] = _deriv(ta + _RKF_C[s] * ha, ys, cfg, pha)
        y5 = ya + ha[:, None] * np.einsum(
            "s,sij->ij", _RKF_B5, k[:, ia])
        y4 = ya + ha[:, None] * np.einsum(
            "s,sij->ij", _RKF_B4, k[:, ia])
        scale = _ATOL[None, :] + cfg.rtol * np.abs(y5)
        err = np.max(np.abs(y5 - y4) / scale, axis=1)
        ok = err <= 1.0
        iok = ia[ok]
        if len(iok):
            y[iok] = y5[ok]
            t[iok] = ta[ok] + ha[ok]
            rel = y[iok, 0:3] - y[iok, 6:9]
            d = np.sqrt(np.einsum("ij,ij->i", rel, rel))
            closer = d < dmin[iok]
            upd = iok[closer]
            dmin[upd] = d[closer]
            # primary energy at the start of the collision: kinetic energy
            # at closest approach plus the pair Coulomb energy there
            pke[upd] = (0.5 * M_E * np.einsum(
                "ij,ij->i", y[upd, 3:6], y[upd, 3:6])
                + KCOUL / d[closer])
            rp = np.sqrt(np.einsum(
                "ij,ij->i", y[iok, 0:3], y[iok, 0:3]))
            prmin[iok] = np.minimum(prmin[iok], rp)
            if record:
                rec_t.append(t[0])
                rec_y.append(y[0].copy())
            if stop_on_exit:
                gone = np.einsum("ij,ij->i", y[iok, 0:3],
                                 y[iok, 0:3]) > exit_r2
                active[iok[gone]] = False
            timeout = t[iok] >= t_max
            if stop_on_exit:
                failed[iok[timeout & ~gone]] = True
            active[iok[timeout]] = False
        # step-size control (both accepted and rejected steps)
        fac = np.clip(0.9 * np.maximum(err, 1e-12) ** -0.2, 0.2, 5.0)
        dt[ia] = ha * fac
        under = (dt[ia] < 1e-20) & active[ia]
        if under.any():
            failed[ia[under]] = True
            active[ia[under]] = False
    res = _BatchResult(y=y, t=t, min_separation=dmin, primary_min_r=prmin,
                       primary_ke_at_min=pke, failed=failed)
    if record:
        res.rec_t = np.asarray(rec_t)
        res.rec_y = np.asarray(rec_y)
    return res


def _sample_initial_state(cfg, index):
    """Deterministic per-sample draws from a counter-based stream."""
    key = ((cfg.seed & 0xFFFFFFFFFFFFFFFF) << 64) | (index & 0xFFFFFFFFFFFFFFFF)
    gen = np.random.Generator(np.random.Philox(key=key))
    u = gen.random(6)
    e_s = u[0] * cfg.u_depth                      # [eV]
    cos_t = 2 * u[1] - 1
    sin_t = math.sqrt(max(1 - cos_t * cos_t, 0.0))
    az = 2 * math.pi * u[2]
    v_s = math.sqrt(2 * e_s * EV / M_E)
    vt = v_s * np.array([sin_t * math.cos(az), sin_t * math.sin(az), cos_t])
    b = cfg.beam_radius_r0 * math.sqrt(u[3])
    psi = 2 * math.pi * u[4]
    rp = np.array([b * math.cos(psi), b * math.sin(psi), cfg.injection_z])
    v_p = math.sqrt(2 * cfg.primary_energy_ep * EV / M_E)
    phase = (cfg.rf.initial_phase + 2 * math.pi * u[5]) if cfg.rf else 0.0
    y0 = np.concatenate([rp, [0.0, 0.0, v_p], np.zeros(3), vt, [0.0]])
    return y0, e_s, phase


@dataclass
class KickHistogram:
    bin_edges: np.ndarray    # [eV]
    counts: np.ndarray
    mean_abs_de: float       # [eV]
    sample_count: int
    seed: int
    rejected_count: int = 0
    abs_de: np.ndarray = None         # per-sample |dE| [eV]
    e_s0: np.ndarray = None           # per-sample initial target energy [eV]
    min_separation: np.ndarray = None
    rel_speed: np.ndarray = None      # initial relative speed [m/s]


def collision_mc(cfg: CollisionConfig, n_samples, n_bins=60,
                 batch_size=2048):
    """Monte Carlo of single primary-target encounters in the static
    pseudopotential; returns the |dE| histogram and per-sample detail."""
    if cfg.rf is not None:
        raise ValueError("collision_mc runs in pseudopotential mode; "
                         "use rf_phase_scan for rf dynamics")
    if n_samples < 1:
        raise ValueError("need at least one sample")
    v_p = math.sqrt(2 * cfg.primary_energy_ep * EV / M_E)
    t_max = 60 * abs(cfg.injection_z) / v_p

    abs_de = np.empty(n_samples)
    e_s0 = np.empty(n_samples)
    dmin = np.empty(n_samples)
    vrel = np.empty(n_samples)
    rejected = 0
    for start in range(0, n_samples, batch_size):
        idx = np.arange(start, min(start + batch_size, n_samples))
        y0 = np.empty((len(idx), 13))
        for row, i in enumerate(idx):
            y0[row], e_s0[i], _ = _sample_initial_state(cfg, int(i))
        rel_v = y0[:, 3:6] - y0[:, 9:12]
        vrel[idx] = np.sqrt(np.einsum("ij,ij->i", rel_v, rel_v))
        res = _integrate_batch(cfg, y0, np.zeros(len(idx)), t_max)
        abs_de[idx] = np.abs(res.y[:, 12]) / EV
        dmin[idx] = res.min_separation
        bad = res.failed
        rejected += int(bad.sum())
        abs_de[idx[bad]] = np.nan
    good = ~np.isnan(abs_de)
    vals = abs_de[good]
    lo = max(vals[vals > 0].min(), 1e-16) if (vals > 0).any() else 1e-16
    edges = np.geomspace(lo * 0.999, max(vals.max(), lo * 10), n_bins + 1)
    counts, _ = np.histogram(vals, bins=edges)
    mean = float(math.fsum(vals) / len(vals))
    return KickHistogram(bin_edges=edges, counts=counts, mean_abs_de=mean,
                         sample_count=int(good.sum()), seed=cfg.seed,
                         rejected_count=rejected, abs_de=abs_de, e_s0=e_s0,
                         min_separation=dmin, rel_speed=vrel)


@dataclass
class PhaseScanRow:
    impact_b: float
    e_s_final: np.ndarray     # per phase [eV]
    e_s_min: float
    e_s_median: float
    e_s_max: float
    phase_averaged: float     # mean over phases [eV]
    primary_e_min: float      # primary KE at closest approach, min [eV]
    primary_e_max: float


def rf_phase_scan(cfg: CollisionConfig, impact_grid, n_phases=24):
    """Sweep rf phase at each beam offset b; target starts at rest at the
    trap center. Returns per-b final target secular energy statistics and
    the primary's kinetic energy at closest approach."""
    if cfg.rf is None:
        raise ValueError("rf drive required")
    v_p = math.sqrt(2 * cfg.primary_energy_ep * EV / M_E)
    t_max = 60 * abs(cfg.injection_z) / v_p
    phases = (cfg.rf.initial_phase
              + 2 * math.pi * np.arange(n_phases) / n_phases)
    rows = []
    for b in impact_grid:
        y0 = np.zeros((n_phases, 13))
        y0[:, 0] = b
        y0[:, 2] = cfg.injection_z
        y0[:, 5] = v_p
        res = _integrate_batch(cfg, y0, phases, t_max)
        e_s = secular_energy(res.y[:, 6:9], res.y[:, 9:12], res.t, cfg,
                             phases) / EV
        p_ke = res.primary_ke_at_min / EV
        rows.append(PhaseScanRow(
            impact_b=float(b), e_s_final=e_s, e_s_min=float(e_s.min()),
            e_s_median=float(np.median(e_s)), e_s_max=float(e_s.max()),
            phase_averaged=float(e_s.mean()),
            primary_e_min=float(p_ke.min()), primary_e_max=float(p_ke.max())))
    return rows


@dataclass
class Trajectory:
    times: np.ndarray
    primary_pos: np.ndarray
    primary_vel: np.ndarray
    target_pos: np.ndarray
    target_vel: np.ndarray
    primary_kinetic: np.ndarray   # [eV]
    target_secular: np.ndarray    # [eV]
    work: np.ndarray              # [eV]
    escape: bool
    failed: bool


def two_electron_trajectory(cfg: CollisionConfig, target_e0, phase,
                            impact_b=None, target_axis=(1.0, 0.0, 0.0),
                            t_end=None, no_primary=False,
                            target_pos=(0.0, 0.0, 0.0)):
    """Full time series of one encounter (or of the lone target when
    no_primary). The primary is injected at (impact_b, 0, injection_z);
    the target starts at target_pos with kinetic energy target_e0 [eV]
    along target_axis."""
    b = cfg.beam_radius_r0 if impact_b is None else impact_b
    v_p = 0.0 if no_primary else math.sqrt(
        2 * cfg.primary_energy_ep * EV / M_E)
    axis = np.asarray(target_axis, dtype=float)
    axis = axis / np.linalg.norm(axis)
    v_t = math.sqrt(2 * target_e0 * EV / M_E)
    y0 = np.zeros((1, 13))
    if no_primary:
        # park the primary far away, at rest: pure single-particle dynamics
        y0[0, 0:3] = (0.0, 0.0, -1e3)
    else:
        y0[0, 0:3] = (b, 0.0, cfg.injection_z)
        y0[0, 5] = v_p
    y0[0, 6:9] = target_pos
    y0[0, 9:12] = v_t * axis
    if t_end is None:
        t_end = 60 * abs(cfg.injection_z) / v_p
    res = _integrate_batch(cfg, y0, np.full(1, phase), t_end,
                           stop_on_exit=not no_primary, record=True)
    ry, rt = res.rec_y, res.rec_t
    pk = 0.5 * M_E * np.einsum("ij,ij->i", ry[:, 3:6], ry[:, 3:6]) / EV
    es = secular_energy(ry[:, 6:9], ry[:, 9:12], rt, cfg,
                        np.full(len(rt), phase)) / EV
    return Trajectory(times=rt, primary_pos=ry[:, 0:3],
                      primary_vel=ry[:, 3:6], target_pos=ry[:, 6:9],
                      target_vel=ry[:, 9:12], primary_kinetic=pk,
                      target_secular=es, work=ry[:, 12] / EV,
                      escape=bool(es[-1] > cfg.u_depth),
                      failed=bool(res.failed[0]))
