"""Simulation toolkit for Doppler cloaking with time-modulated metasurfaces."""

from .circuit import (CircuitParams, current_phase, dipole_current, knife_map,
                      phase_shift, rectifying_capacitance)
from .cloak import (CloakPlan, Scenario, cancellation_frequency, evaluate_concealment,
                    plan, spoof_frequency, velocity_sweep)
from .dsp import (DopplerReport, doppler_fft, downsample_for_mti, estimate_velocity,
                  mti_response, mti_two_pulse, process)
from .errors import (CalibrationError, CloakError, DomainError, EdgeOutsideMap,
                     NoDetection, NoRectifyingCapacitance, ParseError)
from .metasurface import (DispersiveCapacitorCurve, SurfaceParams, rectify,
                          reflection_coefficient, surface_phase_map,
                          threshold_capacitance, usable_bandwidth)
from .modulation import (Calibration, ModulationWaveform, VaractorCurve, calibrate,
                         capacitance, waveform)
from .phasemap import PhaseMap, dumps_phase_map, load_phase_map, save_phase_map
from .scene import PulseTrain, RadarConfig, Target, doppler_phase, simulate

__version__ = "0.1.0"
