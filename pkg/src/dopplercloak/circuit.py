"""Lumped-circuit model of a single varactor-loaded dipole.

The dipole is a series R-L branch driving its own capacitance ``C`` with the
varactor ``Cv`` in parallel, excited by a unit voltage source. Everything here
is closed form and vectorised over ``Cv`` and ``f`` by numpy broadcasting.

Phase conventions
-----------------
``current_phase`` is the four-quadrant argument of the complex current. The
real part of the current is always positive, so this argument stays inside
(-pi/2, pi/2) and never needs a branch fix. ``phase_shift`` is the phase lag
introduced by adding ``Cv``, ``arg i(0) - arg i(Cv)``, which lies in [0, pi).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NoRectifyingCapacitance
from .phasemap import PhaseMap

PF = 1e-12


@dataclass(frozen=True)
class CircuitParams:
    """Dipole resistance (ohm), inductance (H) and self-capacitance (F)."""

    R: float = 50.0
    L: float = 0.1e-6
    C: float = 0.1e-12

    def __post_init__(self):
        for name in ("R", "L", "C"):
            value = getattr(self, name)
            if not np.isfinite(value) or value <= 0:
                raise DomainError(f"{name} must be finite and positive, got {value!r}")

    @property
    def resonance(self):
        """Resonant frequency in Hz with the varactor removed."""
        return 1.0 / (2 * np.pi * np.sqrt(self.L * self.C))


def _check(Cv, f):
    Cv = np.asarray(Cv, dtype=float)
    f = np.asarray(f, dtype=float)
    if not (np.all(np.isfinite(Cv)) and np.all(np.isfinite(f))):
        raise DomainError("capacitance and frequency must be finite")
    if np.any(Cv < 0):
        raise DomainError("varactor capacitance must be non-negative")
    if np.any(f <= 0):
        raise DomainError("frequency must be positive")
    return Cv, f


def dipole_current(params, Cv, f):
    """Complex current per volt of drive: ``jwC' / (1 + jwRC' - w^2 L C')``."""
    Cv, f = _check(Cv, f)
    w = 2 * np.pi * f
    Ct = params.C + Cv
    return 1j * w * Ct / (1 + 1j * w * params.R * Ct - w**2 * params.L * Ct)


def current_phase(params, Cv, f):
    """Phase of the dipole current from the ratio Im/Re.

    Equal to ``np.angle(dipole_current(...))`` because Re{i} > 0 everywhere.
    """
    Cv, f = _check(Cv, f)
    w = 2 * np.pi * f
    Ct = params.C + Cv
    return np.arctan((1 - w**2 * params.L * Ct) / (w * params.R * Ct))


def phase_shift(params, Cv, f):
    """Phase lag caused by the varactor, ``arg i(0) - arg i(Cv)``, in [0, pi)."""
    return current_phase(params, 0.0, f) - current_phase(params, Cv, f)


def phase_shift_closed_form(params, Cv, f):
    """Same quantity as :func:`phase_shift`, from the single-arctangent form.

    The numerator ``R Cv w`` is non-negative, so ``arctan2`` lands in [0, pi]
    without any unwrapping.
    """
    Cv, f = _check(Cv, f)
    R, L, C = params.R, params.L, params.C
    w = 2 * np.pi * f
    num = R * Cv * w
    den = (1 + (R**2 * C * (C + Cv) - L * (2 * C + Cv)) * w**2
           + L**2 * C * (C + Cv) * w**4)
    return np.arctan2(num, den)


def rectifying_capacitance(params, f, threshold=np.pi / 4, strict=True):
    """Varactor capacitance at which the phase shift reaches ``threshold``.

    For the default threshold of pi/4 this is the knife-edge capacitance used
    to flatten the map. Solving ``phase_shift(Cv, f) = threshold`` is linear
    in ``Cv``; the solution is rejected when it is not strictly positive.

    With ``strict`` false, frequencies without a solution yield NaN instead of
    raising :class:`NoRectifyingCapacitance`.
    """
    f = np.asarray(f, dtype=float)
    if not np.all(np.isfinite(f)) or np.any(f <= 0):
        raise DomainError("frequency must be finite and positive")
    if not 0 < threshold < np.pi:
        raise DomainError("threshold must lie in (0, pi)")
    R, L, C = params.R, params.L, params.C
    w = 2 * np.pi * f
    x = L * C * w**2
    # numerator is (1 - x)^2 + (RCw)^2, always positive
    num = np.sin(threshold) * (1 + R**2 * C**2 * w**2 + (x - 2) * x)
    den = (np.cos(threshold) * R * C * w
           - np.sin(threshold) * (R**2 * C**2 * w**2 + x * (x - 1)))
    with np.errstate(divide="ignore", invalid="ignore"):
        cw = np.where(den > 0, num / den * C, np.nan)
    missing = ~(cw > 0)
    if strict and np.any(missing):
        raise NoRectifyingCapacitance(float(np.atleast_1d(f)[np.argmax(np.atleast_1d(missing))]))
    return cw if cw.ndim else float(cw)


def default_capacitance_grid():
    """Zero followed by 200 log-spaced points from 0.01 pF to 10 pF."""
    return np.concatenate([[0.0], np.logspace(np.log10(0.01 * PF), np.log10(10 * PF), 200)])


def default_frequency_grid():
    return np.linspace(1.2e9, 1.7e9, 101)


def knife_map(params=None, cap_grid=None, freq_grid=None):
    """Phase shift of the single dipole over a capacitance x frequency grid.

    The first capacitance sample is the reference; with the default grid it is
    zero, so every cell equals :func:`phase_shift`. The amplitude matrix holds
    ``R |i|``, which peaks at 1 on resonance.
    """
    params = params or CircuitParams()
    cap = default_capacitance_grid() if cap_grid is None else np.asarray(cap_grid, float)
    freq = default_frequency_grid() if freq_grid is None else np.asarray(freq_grid, float)
    Cv, f = np.meshgrid(cap, freq, indexing="ij")
    phase = np.unwrap(current_phase(params, Cv, f), axis=0)
    values = phase[:1, :] - phase
    amplitude = params.R * np.abs(dipole_current(params, Cv, f))
    return PhaseMap(cap, freq, values, amplitude=amplitude)
