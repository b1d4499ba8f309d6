"""Coupling calculations for trapped charged particles, superconducting
circuits, and mechanical resonators: equivalent circuits, piezoelectric and
electrostatic coupling rates, GHz Paul-trap design, electron loading
kinetics, and collision Monte Carlo.
"""

__version__ = "0.1.0"

from .constants import (Environment, Particle, angular, hz, particle_lookup,
                        register_particle, thermal_occupation)
from .circuits import (BVDEquivalent, CouplingReport, bvd_equivalent,
                       capacitive_coupling, coherence_time, cooling_limit,
                       coupling_degradation, min_quality_factor,
                       particle_bvd, particle_resonator_coupling,
                       quarterwave_lumped, spring_coupling, swap_metric)
from .modes import (BeamSection, ModeModel, bva_mode, cantilever_mode,
                    membrane_coupling, membrane_mode, mode_mass)
from .piezo import (PiezoMaterial, aligned_dipole_bound, cs_bound,
                    optimize_electrode, optimize_ion_position,
                    overlap_coupling,
                    quartz_capacitive_coupling, rotate_piezo,
                    shunt_coupling)
from .quadrature import QuadratureSpec
from .paultrap import (FilmWire, TrapDesign, critical_current, crosstalk,
                       detection_metrics, mathieu_q, micromotion_limit,
                       parametric_rate, rf_power_current,
                       trap_depth_and_secular)
from .loading import (LoadingConfig, capture_energy, energy_ode, rates,
                      time_to_trap)
from .collisions import (CollisionConfig, KickHistogram, RFDrive,
                         collision_mc, kick_bound, rf_phase_scan,
                         rutherford_angle, static_kick,
                         two_electron_trajectory)
from .heating import HeatingReference, extrapolate
from .database import load_database
