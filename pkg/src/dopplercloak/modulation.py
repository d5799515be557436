"""Varactor bias, phase calibration and the sawtooth modulation waveform.

The chain is bias voltage -> junction capacitance -> phase shift (one row of
a :class:`PhaseMap`). Calibration sweeps the bias linearly, records the
resulting nonlinear phase and inverts it, so a linear phase ramp can be
requested directly in radians.
"""

from __future__ import annotations

import csv
import io
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import CalibrationError, DomainError

PF = 1e-12


@dataclass(frozen=True)
class VaractorCurve:
    """Clamped junction model ``C(V) = C_j0 / (1 + V/V_j)**M``."""

    c_j0: float
    junction_potential: float
    grading_exponent: float
    v_min: float
    v_max: float
    c_min: float
    c_max: float

    def __post_init__(self):
        if not self.v_min < self.v_max:
            raise DomainError("voltage range must be increasing")
        if not 0 < self.c_min < self.c_max:
            raise DomainError("capacitance clamp must satisfy 0 < c_min < c_max")
        if self.junction_potential <= 0 or self.grading_exponent <= 0:
            raise DomainError("junction potential and grading exponent must be positive")
        if self.v_min <= -self.junction_potential:
            raise DomainError("v_min must stay above the forward-bias limit -V_j")

    @classmethod
    def fit(cls, c_max=2.6 * PF, c_min=0.6 * PF, v_min=0.0, v_max=30.0,
            junction_potential=0.77):
        """Pick ``C_j0`` and ``M`` so the curve hits both datasheet endpoints."""
        ratio = (1 + v_max / junction_potential) / (1 + v_min / junction_potential)
        m = np.log(c_max / c_min) / np.log(ratio)
        c_j0 = c_max * (1 + v_min / junction_potential) ** m
        return cls(float(c_j0), junction_potential, float(m), v_min, v_max, c_min, c_max)

    def capacitance(self, V):
        return capacitance(self, V)

    def voltage(self, C):
        """Bias voltage for capacitance ``C`` (inverse of the unclamped model)."""
        C = np.asarray(C, dtype=float)
        if np.any(C < self.c_min * (1 - 1e-9)) or np.any(C > self.c_max * (1 + 1e-9)):
            raise DomainError("capacitance outside the varactor's range")
        V = self.junction_potential * ((self.c_j0 / C) ** (1 / self.grading_exponent) - 1)
        return np.clip(V, self.v_min, self.v_max)


def default_varactor():
    """0.6-2.6 pF over 0-30 V reverse bias."""
    return VaractorCurve.fit()


def capacitance(curve, V):
    """Junction capacitance at bias ``V``; raises outside the voltage range."""
    V = np.asarray(V, dtype=float)
    if not np.all(np.isfinite(V)):
        raise DomainError("bias voltage must be finite")
    span = curve.v_max - curve.v_min
    if np.any(V < curve.v_min - 1e-9 * span) or np.any(V > curve.v_max + 1e-9 * span):
        raise DomainError(
            f"bias outside [{curve.v_min}, {curve.v_max}] V")
    C = curve.c_j0 / (1 + V / curve.junction_potential) ** curve.grading_exponent
    C = np.clip(C, curve.c_min, curve.c_max)
    return C if C.ndim else float(C)


@dataclass(frozen=True)
class Calibration:
    """Tabulated inverse of the bias-to-phase response at one frequency.

    ``phases`` ascend from 0 to ``span`` and ``voltages`` hold the bias that
    produces each of them. Calling the object maps target phases to voltages.
    """

    frequency: float
    voltages: np.ndarray
    phases: np.ndarray
    curve: VaractorCurve
    capacitance_axis: np.ndarray
    phase_row: np.ndarray
    amplitude_row: np.ndarray
    reference: float

    @property
    def span(self):
        return float(self.phases[-1])

    def __call__(self, phase):
        phase = np.asarray(phase, dtype=float)
        if np.any(phase < -1e-12) or np.any(phase > self.span + 1e-12):
            raise DomainError(f"target phase outside [0, {self.span:.6g}] rad")
        return np.interp(phase, self.phases, self.voltages)

    def phase_of_capacitance(self, C):
        return np.interp(C, self.capacitance_axis, self.phase_row) - self.reference

    def forward(self, V):
        """Phase actually produced by bias ``V`` (through the map row)."""
        return self.phase_of_capacitance(capacitance(self.curve, V))

    def amplitude(self, V):
        return np.interp(capacitance(self.curve, V), self.capacitance_axis, self.amplitude_row)


def calibrate(pmap, curve, f_c, samples=4001):
    """Invert the phase response of ``pmap`` at ``f_c`` over the bias range.

    The bias is swept linearly over the varactor's range, as in a stationary
    calibration run; the recorded phase is referenced to its value at the
    smallest capacitance (highest bias) and must rise strictly with
    capacitance, otherwise :class:`CalibrationError` names the offending bias
    interval.
    """
    cap_axis = pmap.capacitance_axis
    if curve.c_min < cap_axis[0] * (1 - 1e-9) or curve.c_max > cap_axis[-1] * (1 + 1e-9):
        raise CalibrationError("varactor range is not covered by the map's capacitance axis")
    row = pmap.row(f_c)
    amp_row = pmap.amplitude_row(f_c)
    V = np.linspace(curve.v_min, curve.v_max, samples)
    C = capacitance(curve, V)
    raw = np.interp(C, cap_axis, row)
    # phase must fall as bias rises (capacitance falls)
    step = np.diff(raw)
    bad = np.flatnonzero(step >= 0)
    if bad.size:
        k = int(bad[0])
        raise CalibrationError(
            f"phase response is not monotone between {V[k]:.6g} V and {V[k + 1]:.6g} V "
            f"at {f_c:.6g} Hz")
    reference = float(raw[-1])
    phases = (raw - reference)[::-1]
    return Calibration(float(f_c), V[::-1].copy(), phases, curve, cap_axis.copy(),
                       np.asarray(row, float).copy(), np.asarray(amp_row, float).copy(),
                       reference)


@dataclass(frozen=True)
class ModulationWaveform:
    """Bias samples and the sawtooth phase they are meant to produce."""

    sample_times: np.ndarray
    bias_voltage: np.ndarray
    induced_phase: np.ndarray
    modulation_frequency: float
    phase_span: float

    @property
    def sample_rate(self):
        t = self.sample_times
        return (t.size - 1) / (t[-1] - t[0]) if t.size > 1 else np.inf

    @property
    def duration(self):
        return float(self.sample_times[-1] - self.sample_times[0])

    def voltage_at(self, t):
        """Zero-order hold of the bias samples, as a DAC would output them."""
        t = np.asarray(t, dtype=float)
        if np.any(t < self.sample_times[0] - 1e-12) or np.any(t > self.sample_times[-1] + 1e-12):
            raise DomainError("requested time lies outside the waveform")
        idx = np.searchsorted(self.sample_times, t + 1e-12, side="right") - 1
        return self.bias_voltage[np.clip(idx, 0, self.bias_voltage.size - 1)]

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["t_s", "V_volts", "phase_rad"])
        for row in zip(self.sample_times, self.bias_voltage, self.induced_phase):
            writer.writerow([f"{v:.12g}" for v in row])
        return buf.getvalue()


def sawtooth_phase(t, f_m, span):
    """Phase ramp of slope ``f_m * span`` that flies back once per period.

    Positive ``f_m`` ramps up from 0 to ``span``; negative ``f_m`` ramps down
    from ``span`` to 0.
    """
    if f_m == 0:
        return np.zeros_like(np.asarray(t, dtype=float))
    return span * np.mod(f_m * np.asarray(t, dtype=float), 1.0)


def waveform(calibration, f_m, duration, sample_rate, phase_span=None,
             max_doppler=None):
    """Bias waveform that drives a calibrated sawtooth phase ramp.

    ``phase_span`` defaults to the calibration's full span. When
    ``max_doppler`` (Hz) is given, a warning is issued if the imposed
    frequency shift exceeds it.
    """
    if not np.isfinite(f_m):
        raise DomainError("modulation frequency must be finite")
    if not (np.isfinite(sample_rate) and sample_rate > 0):
        raise DomainError("sample rate must be positive")
    if not duration > 0:
        raise DomainError("duration must be positive")
    if sample_rate < 20 * abs(f_m):
        raise DomainError("sample rate must be at least 20 x |f_m|")
    span = calibration.span if phase_span is None else float(phase_span)
    if not 0 < span <= calibration.span + 1e-12:
        raise DomainError("phase span exceeds the calibrated range")
    if max_doppler is not None and abs(f_m) * span / (2 * np.pi) > max_doppler:
        warnings.warn("imposed Doppler shift exceeds the radar's unambiguous span",
                      stacklevel=2)
    n = int(round(duration * sample_rate)) + 1
    t = np.arange(n) / sample_rate
    phase = np.minimum(sawtooth_phase(t, f_m, span), calibration.span)
    return ModulationWaveform(t, calibration(phase), phase, float(f_m), span)
