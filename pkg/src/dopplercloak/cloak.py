"""Doppler cancellation and spoofing controller.

The coating's sawtooth imposes a phase slope ``2 pi f_m * span / (2 pi)``
per second on top of the Doppler phase. With the scene convention
(``phi = -4 pi f_c (r0 + v t) / c``) the Doppler phase rate of a target at
velocity ``v`` is ``-4 pi f_c v / c``, so cancelling it needs
``f_m = 4 pi v f_c / (c * span)``.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import constants

from .dsp import process
from .errors import DomainError
from .metasurface import SurfaceParams, fit_thickness_for_span, surface_phase_map
from .modulation import calibrate, default_varactor, waveform
from .scene import Coating, RadarConfig, Target, doppler_frequency, simulate

C0 = constants.c
EXPERIMENT_SPAN = np.radians(330.0)


def _check_span(span):
    if not (np.isfinite(span) and span > 0):
        raise DomainError("phase span must be positive")


def cancellation_frequency(velocity, f_c, span, c=C0):
    """Modulation frequency whose ramp negates the Doppler phase of ``velocity``."""
    _check_span(span)
    return 4 * np.pi * velocity * f_c / (c * span)


def spoof_frequency(v_true, v_apparent, f_c, span, c=C0):
    """Modulation frequency that makes a target at ``v_true`` look like ``v_apparent``."""
    _check_span(span)
    return 4 * np.pi * f_c * (v_true - v_apparent) / (c * span)


@dataclass(frozen=True)
class CloakPlan:
    velocity: float
    carrier: float
    phase_span: float
    modulation_frequency: float
    predicted_residual: float

    def to_text(self):
        return "".join(f"{k} = {v!r}\n" for k, v in (
            ("velocity_mps", self.velocity), ("carrier_Hz", self.carrier),
            ("phase_span_rad", self.phase_span),
            ("modulation_frequency_Hz", self.modulation_frequency),
            ("predicted_residual_Hz", self.predicted_residual)))


def predicted_residual(velocity, f_c, span, f_m, c=C0):
    """Net phase rate in Hz left after the ramp, ``|f_d + f_m span / 2 pi|``."""
    return abs(doppler_frequency(velocity, f_c, c) + f_m * span / (2 * np.pi))


def plan(velocity, f_c, span, apparent_velocity=0.0, c=C0):
    if not np.isfinite(velocity):
        raise DomainError("velocity must be finite")
    f_m = spoof_frequency(velocity, apparent_velocity, f_c, span, c)
    return CloakPlan(float(velocity), float(f_c), float(span), float(f_m),
                     float(predicted_residual(velocity, f_c, span, f_m, c)))


@dataclass
class Scenario:
    """Radar, coated target and clutter for the moving-cart experiment.

    ``surface`` defaults to the surrogate whose thickness is tuned so the
    varactor range spans 330 degrees at the carrier.
    """

    radar: RadarConfig = field(default_factory=RadarConfig)
    velocity: float = -0.03
    range0: float = 3.0
    reflectivity: float = 1.0
    clutter: tuple = (0.5,)
    surface: SurfaceParams | None = None
    curve: object = None
    target_span: float = EXPERIMENT_SPAN
    waveform_rate: float = 1000.0
    amplitude_ripple: bool = True
    oscillation: tuple = (0.0, 0.0)
    seed: int | None = None
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    @property
    def carrier(self):
        return self.radar.carriers[0]

    def _surface(self):
        if self.surface is None:
            self.surface = fit_thickness_for_span(SurfaceParams(), self.carrier, self.target_span)
        return self.surface

    @property
    def phase_map(self):
        if "map" not in self._cache:
            self._cache["map"] = surface_phase_map(self._surface())
        return self._cache["map"]

    @property
    def varactor(self):
        if self.curve is None:
            self.curve = default_varactor()
        return self.curve

    @property
    def calibration(self):
        if "cal" not in self._cache:
            self._cache["cal"] = calibrate(self.phase_map, self.varactor, self.carrier)
        return self._cache["cal"]

    @property
    def span(self):
        return self.calibration.span

    def coating(self, f_m):
        wf = waveform(self.calibration, f_m, self.radar.duration + 1.0, self.waveform_rate)
        return Coating(self.phase_map, self.varactor, wf, self.amplitude_ripple)

    def target(self, f_m=None, velocity=None):
        """The cart; ``f_m=None`` leaves it uncoated, 0 gives an idle coating."""
        v = self.velocity if velocity is None else velocity
        coat = None if f_m is None else self.coating(f_m)
        return Target(self.range0, v, self.reflectivity, coat, self.oscillation)

    def run(self, f_m=None, velocity=None, seed=None):
        seed = self.seed if seed is None else seed
        return simulate(self.radar, [self.target(f_m, velocity)], self.clutter, seed)[0]

    def plan(self, apparent_velocity=0.0):
        return plan(self.velocity, self.carrier, self.span, apparent_velocity,
                    self.radar.speed_of_light)


@dataclass
class ConcealmentReport:
    plan: CloakPlan
    reference_pre: object
    reference_post: object
    cloaked_pre: object
    cloaked_post: object

    @property
    def attenuation_db(self):
        """Drop of the post-MTI spectral peak from the reference to the cloaked run.

        ``inf`` when the cloaked peak is exactly zero, NaN when both are.
        """
        with np.errstate(divide="ignore", invalid="ignore"):
            return float(20 * np.log10(np.float64(self.reference_post.peak_magnitude)
                                       / self.cloaked_post.peak_magnitude))

    @property
    def residual_velocity(self):
        return self.cloaked_pre.estimated_velocity

    @property
    def velocity_bin(self):
        return self.cloaked_pre.velocity_bin

    def to_text(self):
        return self.plan.to_text() + "".join(f"{k} = {v!r}\n" for k, v in (
            ("attenuation_dB", self.attenuation_db),
            ("v_hat_cloaked_mps", self.residual_velocity),
            ("v_hat_reference_mps", self.reference_pre.estimated_velocity),
            ("velocity_bin_mps", self.velocity_bin),
            ("decimation", self.cloaked_post.decimation)))


def evaluate_concealment(scenario, cloak_plan=None, reference="idle", fft_size=512):
    """Simulate the scene with and without the planned modulation.

    ``reference`` selects the comparison run: ``"idle"`` keeps the coating
    unmodulated (f_m = 0), ``"bare"`` removes it. Both runs share the seed.
    After MTI the samples are decimated for the target's true Doppler.
    """
    if reference not in ("idle", "bare"):
        raise DomainError("reference must be 'idle' or 'bare'")
    cloak_plan = cloak_plan or scenario.plan()
    f_d = abs(doppler_frequency(scenario.velocity, scenario.carrier,
                                scenario.radar.speed_of_light))
    expected = f_d if f_d > 0 else None
    ref = scenario.run(0.0 if reference == "idle" else None)
    cl = scenario.run(cloak_plan.modulation_frequency)
    reports = []
    for train in (ref, cl):
        pre = process(train, fft_size=fft_size)
        post = process(train, mti=True, expected_doppler=expected, fft_size=fft_size)
        reports += [pre, post]
    out = ConcealmentReport(cloak_plan, *reports)
    truth_f = doppler_frequency(scenario.velocity, scenario.carrier, scenario.radar.speed_of_light)
    ref_level = out.reference_post.magnitude_at(truth_f)
    cl_level = out.cloaked_post.magnitude_at(truth_f)
    if ref_level > 0 and cl_level > 0:
        out.cloaked_post.attenuation_at_truth = float(20 * np.log10(ref_level / cl_level))
    return out


@dataclass
class SweepResult:
    """Estimated velocities for every (velocity, modulation frequency) pair."""

    velocities: np.ndarray
    modulation_frequencies: np.ndarray
    estimates: np.ndarray          # shape (len(velocities), len(modulation_frequencies))
    carrier: float
    phase_span: float
    velocity_bin: float
    speed_of_light: float = C0

    def fits(self):
        """Per-velocity least squares ``v_hat = slope * f_m + intercept``.

        Returns an array of rows ``(slope, intercept, r_squared)``.
        """
        out = []
        x = self.modulation_frequencies
        for y in self.estimates:
            slope, icept = np.polyfit(x, y, 1)
            resid = y - (slope * x + icept)
            ss = np.sum((y - y.mean()) ** 2)
            r2 = 1 - np.sum(resid**2) / ss if ss > 0 else 1.0
            out.append((slope, icept, r2))
        return np.array(out)

    def common_slope(self):
        """Slope shared by all velocities, with a separate intercept for each."""
        x = self.modulation_frequencies - self.modulation_frequencies.mean()
        y = self.estimates - self.estimates.mean(axis=1, keepdims=True)
        return float(np.sum(x * y) / (self.estimates.shape[0] * np.sum(x * x)))

    def expected_slope(self):
        return -self.speed_of_light * self.phase_span / (4 * np.pi * self.carrier)

    def invisibility_points(self):
        """Zero crossings ``(v, f_m)`` of the fitted lines."""
        fits = self.fits()
        return np.column_stack([self.velocities, -fits[:, 1] / fits[:, 0]])

    def invisibility_slope(self):
        """Least-squares slope of ``f_m`` against ``v`` through the origin."""
        pts = self.invisibility_points()
        v, fm = pts[:, 0], pts[:, 1]
        return float(np.sum(v * fm) / np.sum(v * v))

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["f_m_Hz", "v_true_mps", "v_hat_mps"])
        for v, row in zip(self.velocities, self.estimates):
            for fm, vh in zip(self.modulation_frequencies, row):
                writer.writerow([f"{fm:.9g}", f"{v:.9g}", f"{vh:.9g}"])
        return buf.getvalue()

    def fits_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["v_true_mps", "slope_mps_per_Hz", "intercept_mps", "r_squared",
                         "f_m_invisible_Hz"])
        for v, (s, b, r2), (_, f0) in zip(self.velocities, self.fits(),
                                         self.invisibility_points()):
            writer.writerow([f"{v:.9g}", f"{s:.9g}", f"{b:.9g}", f"{r2:.9g}", f"{f0:.9g}"])
        return buf.getvalue()


def velocity_sweep(scenario, velocities=(-0.04, -0.02, 0.0, 0.02, 0.04),
                   modulation_frequencies=None, fft_size=512):
    """Pre-MTI velocity estimate over a grid of true velocities and f_m values."""
    if modulation_frequencies is None:
        modulation_frequencies = np.linspace(-0.6, 0.6, 25)
    vs = np.asarray(velocities, dtype=float)
    fms = np.asarray(modulation_frequencies, dtype=float)
    est = np.empty((vs.size, fms.size))
    bin_v = None
    for i, v in enumerate(vs):
        for j, fm in enumerate(fms):
            rep = process(scenario.run(fm, velocity=v), fft_size=fft_size)
            est[i, j] = rep.estimated_velocity
            bin_v = rep.velocity_bin
    return SweepResult(vs, fms, est, scenario.carrier, scenario.span, bin_v,
                       scenario.radar.speed_of_light)


def with_radar(scenario, **changes):
    """Copy of ``scenario`` with radar fields replaced, reusing the fitted surface."""
    new = replace(scenario, radar=replace(scenario.radar, **changes))
    if changes.keys() <= {"snr_db", "num_pulses", "slow_time_interval"}:
        new._cache = scenario._cache
    return new
