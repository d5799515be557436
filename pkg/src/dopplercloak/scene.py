"""Slow-time echo synthesis for a monostatic stepped-frequency radar.

Every carrier of the sweep yields one complex sample per slow-time interval.
A target contributes ``A * m_k * exp(j(phi_doppler + phi_coating))`` where the
coating terms come from a metasurface driven by a bias waveform; static
clutter adds constants and receiver noise is complex circular Gaussian.

Sign convention: the Doppler phase is ``-4 pi f_c (r0 + v t) / c`` and a
negative velocity means the target recedes, so a receding target produces a
rising phase. A positive modulation frequency also produces a rising phase.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np
from scipy import constants

from .errors import DomainError

C0 = constants.c


@dataclass(frozen=True)
class RadarConfig:
    band: tuple = (1.2e9, 1.7e9)
    carriers: tuple = (1.5e9,)
    slow_time_interval: float = 0.05
    num_pulses: int = 512
    snr_db: float | None = None
    speed_of_light: float = C0

    def __post_init__(self):
        if not self.band[0] < self.band[1]:
            raise DomainError("band must satisfy f_start < f_stop")
        if not self.slow_time_interval > 0:
            raise DomainError("slow-time interval must be positive")
        if self.num_pulses < 2:
            raise DomainError("need at least two pulses")
        if len(self.carriers) == 0 or any(f <= 0 for f in self.carriers):
            raise DomainError("carriers must be positive frequencies")
        object.__setattr__(self, "carriers", tuple(float(f) for f in self.carriers))

    @property
    def timestamps(self):
        return np.arange(self.num_pulses) * self.slow_time_interval

    @property
    def duration(self):
        return (self.num_pulses - 1) * self.slow_time_interval


@dataclass(frozen=True)
class Coating:
    """A time-modulated metasurface: phase map, varactor and bias waveform."""

    pmap: object
    curve: object
    waveform: object
    amplitude_ripple: bool = True

    def response(self, f_c, t):
        """Phase shift (rad) and reflection magnitude at carrier ``f_c``, times ``t``."""
        from .modulation import capacitance

        C = capacitance(self.curve, self.waveform.voltage_at(t))
        cap = self.pmap.capacitance_axis
        row = self.pmap.row(f_c)
        # the phase is referenced to the varactor's smallest capacitance
        phase = np.interp(C, cap, row) - np.interp(self.curve.c_min, cap, row)
        if self.amplitude_ripple:
            amp = np.interp(C, cap, self.pmap.amplitude_row(f_c))
        else:
            amp = np.ones_like(phase)
        return phase, amp


@dataclass(frozen=True)
class Target:
    """Point target; ``velocity`` < 0 means moving away from the radar.

    ``oscillation`` = (amplitude_m, frequency_Hz) adds a small sinusoidal
    range wobble of the carrying platform.
    """

    range0: float = 3.0
    velocity: float = 0.0
    reflectivity: float = 1.0
    coating: Coating | None = None
    oscillation: tuple = (0.0, 0.0)


@dataclass
class PulseTrain:
    carrier: float
    samples: np.ndarray
    timestamps: np.ndarray
    truth: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.samples.shape != self.timestamps.shape:
            raise DomainError("samples and timestamps differ in length")
        if not np.all(np.isfinite(self.samples)):
            raise DomainError("non-finite echo samples")

    @property
    def slow_time_interval(self):
        return float(self.timestamps[1] - self.timestamps[0])

    def phase(self):
        """Unwrapped slow-time phase, as a radar would plot it."""
        return np.unwrap(np.angle(self.samples))

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["k", "t_s", "re", "im"])
        for k, (t, x) in enumerate(zip(self.timestamps, self.samples)):
            writer.writerow([k, f"{t:.12g}", f"{x.real:.12g}", f"{x.imag:.12g}"])
        return buf.getvalue()

    def sidecar(self):
        lines = [f"carrier_Hz = {self.carrier!r}"]
        lines += [f"{k} = {v!r}" for k, v in sorted(self.truth.items())]
        return "\n".join(lines) + "\n"


def range_at(target, t):
    amp, freq = target.oscillation
    wobble = amp * np.sin(2 * np.pi * freq * t) if amp else 0.0
    return target.range0 + target.velocity * t + wobble


def doppler_phase(target, f_c, t, c=C0):
    """Two-way propagation phase of ``target`` at carrier ``f_c``."""
    return -4 * np.pi * f_c * range_at(target, np.asarray(t, dtype=float)) / c


def doppler_frequency(velocity, f_c, c=C0):
    """Rate of the Doppler phase in Hz for the convention above (``-2 v f_c / c``)."""
    return -2 * velocity * f_c / c


def target_echo(target, f_c, t, c=C0):
    phase = doppler_phase(target, f_c, t, c)
    amp = np.full_like(phase, target.reflectivity)
    if target.coating is not None:
        coat_phase, ripple = target.coating.response(f_c, t)
        phase = phase + coat_phase
        amp = amp * ripple
    return amp * np.exp(1j * phase)


def simulate(config, targets, clutter_amplitudes=(), seed=None):
    """One :class:`PulseTrain` per carrier of ``config``.

    Noise is added only when ``config.snr_db`` is set; its power is set
    against the strongest target reflectivity. Each carrier draws from its
    own stream spawned from ``seed``, so results do not depend on the number
    of carriers processed before it.
    """
    t = config.timestamps
    for tgt in targets:
        if tgt.coating is not None and tgt.coating.waveform.sample_times[-1] < t[-1] - 1e-12:
            raise DomainError("coating waveform is shorter than the pulse train")
    clutter = np.sum(np.asarray(clutter_amplitudes, dtype=complex)) if len(clutter_amplitudes) else 0.0
    streams = np.random.SeedSequence(seed).spawn(len(config.carriers))
    ref_amp = max((abs(tg.reflectivity) for tg in targets), default=1.0)
    trains = []
    for f_c, ss in zip(config.carriers, streams):
        x = np.zeros(t.size, dtype=complex) + clutter
        for tgt in targets:
            x = x + target_echo(tgt, f_c, t, config.speed_of_light)
        if config.snr_db is not None:
            rng = np.random.default_rng(ss)
            sigma = ref_amp / np.sqrt(10 ** (config.snr_db / 10))
            x = x + sigma / np.sqrt(2) * (rng.standard_normal(t.size)
                                          + 1j * rng.standard_normal(t.size))
        truth = {"velocities_mps": [tg.velocity for tg in targets],
                 "modulation_Hz": [tg.coating.waveform.modulation_frequency
                                   if tg.coating is not None else None for tg in targets]}
        trains.append(PulseTrain(f_c, x, t.copy(), truth))
    return trains
