"""Reflection phase of a varactor-loaded dipole array over a grounded slab.

The array is reduced to a transmission-line surrogate: a resistive/inductive/
capacitive sheet in parallel with the input impedance of a shorted dielectric
slab, seen from free space. This reproduces the 2*pi reflection-phase swing and
the frequency-dependent knife edge without a field solver.

The second half of the module works on any :class:`PhaseMap`, whether it came
from the surrogate, from the single-dipole circuit, or from an external CSV:
knife-edge extraction, rectification with a dispersive capacitance, and the
usable bandwidth of the result.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, replace

import numpy as np
from scipy import constants, optimize

from .errors import DomainError, EdgeOutsideMap, ParseError
from .phasemap import PhaseMap

ETA0 = constants.physical_constants["characteristic impedance of vacuum"][0]
PF = 1e-12

# slab impedance magnitude is capped here when tan() blows up
Z_LIMIT = 1e9


@dataclass(frozen=True)
class SurfaceParams:
    """Substrate and sheet parameters of the surrogate.

    ``sheet_resistance``, ``sheet_inductance`` and ``sheet_capacitance`` are
    fitted so the knife edge sits inside 1.2-1.7 GHz for a 0.6-2.6 pF
    varactor at h = 6 mm (see :func:`fit_sheet_parameters`). The geometry
    fields are descriptive only.
    """

    substrate_thickness: float = 6e-3
    relative_permittivity: float = 4.3
    sheet_resistance: float = 0.5
    sheet_inductance: float = 6.2e-9
    sheet_capacitance: float = 0.005e-12
    cell_period: float = 50e-3
    dipole_length: float = 40e-3
    stub_length: float = 42e-3
    stub_width: float = 10e-3
    width: float = 10e-3

    def __post_init__(self):
        if not self.substrate_thickness > 0:
            raise DomainError("substrate thickness must be positive")
        if not self.relative_permittivity >= 1:
            raise DomainError("relative permittivity must be >= 1")
        if self.sheet_resistance < 0:
            raise DomainError("sheet resistance must be non-negative")
        if not (self.sheet_inductance > 0 and self.sheet_capacitance > 0):
            raise DomainError("sheet inductance and capacitance must be positive")


def slab_impedance(surface, f):
    """Input impedance of the grounded slab and a flag where tan() diverges."""
    f = np.asarray(f, dtype=float)
    n = np.sqrt(surface.relative_permittivity)
    theta = 2 * np.pi * f * n * surface.substrate_thickness / constants.c
    x = ETA0 / n * np.tan(theta)
    flagged = ~(np.abs(x) <= Z_LIMIT)
    x = np.clip(np.nan_to_num(x, nan=Z_LIMIT), -Z_LIMIT, Z_LIMIT)
    return 1j * x, flagged


def reflection_coefficient(surface, Cv, f, return_flags=False):
    """Normal-incidence reflection coefficient of the loaded sheet.

    ``Cv`` and ``f`` broadcast against each other. With ``return_flags`` the
    boolean mask of slab-resonance samples is returned as a second value.
    """
    Cv = np.asarray(Cv, dtype=float)
    f = np.asarray(f, dtype=float)
    if not (np.all(np.isfinite(Cv)) and np.all(np.isfinite(f))):
        raise DomainError("capacitance and frequency must be finite")
    if np.any(Cv < 0) or np.any(f <= 0):
        raise DomainError("need Cv >= 0 and f > 0")
    w = 2 * np.pi * f
    z_sheet = (surface.sheet_resistance
               + 1j * (w * surface.sheet_inductance
                       - 1 / (w * (surface.sheet_capacitance + Cv))))
    z_slab, flagged = slab_impedance(surface, f)
    z = z_sheet * z_slab / (z_sheet + z_slab)
    gamma = (z - ETA0) / (z + ETA0)
    if return_flags:
        return gamma, np.broadcast_to(flagged, np.shape(gamma))
    return gamma


def default_capacitance_grid():
    """201 points across the varactor's 0.6-2.6 pF range."""
    return np.linspace(0.6 * PF, 2.6 * PF, 201)


def default_frequency_grid():
    return np.linspace(1.2e9, 1.7e9, 101)


def surface_phase_map(surface=None, cap_grid=None, freq_grid=None):
    """Reflection phase shift of the surrogate relative to the first capacitance.

    The phase is unwrapped along the capacitance axis and reported as a lag,
    so it grows from zero as the varactor capacitance increases.
    """
    surface = surface or SurfaceParams()
    cap = default_capacitance_grid() if cap_grid is None else np.asarray(cap_grid, float)
    freq = default_frequency_grid() if freq_grid is None else np.asarray(freq_grid, float)
    Cv, f = np.meshgrid(cap, freq, indexing="ij")
    gamma, flagged = reflection_coefficient(surface, Cv, f, return_flags=True)
    phase = np.unwrap(np.angle(gamma), axis=0)
    return PhaseMap(cap, freq, phase[:1, :] - phase,
                    amplitude=np.abs(gamma), flagged=np.array(flagged))


# -- knife-edge analysis ------------------------------------------------------

def _crossing(cap, row, threshold):
    """Linear-interpolated first capacitance where ``row`` reaches ``threshold``."""
    if row[0] >= threshold:
        return cap[0]
    above = np.flatnonzero(row >= threshold)
    if above.size == 0:
        return np.nan
    k = above[0]
    c0, c1 = cap[k - 1], cap[k]
    p0, p1 = row[k - 1], row[k]
    return c0 + (threshold - p0) * (c1 - c0) / (p1 - p0)


def threshold_capacitance(pmap, f, threshold=np.pi / 4):
    """Knife-edge capacitance of ``pmap`` at frequency ``f``."""
    row = pmap.row(f)
    edge = _crossing(pmap.capacitance_axis, row, threshold)
    if np.isnan(edge):
        raise EdgeOutsideMap(pmap.frequency_axis[pmap.column_index(f)], threshold)
    return float(edge)


def threshold_curve(pmap, threshold=np.pi / 4):
    """Edge capacitance for every frequency column; NaN where never reached."""
    return np.array([_crossing(pmap.capacitance_axis, pmap.values[:, j], threshold)
                     for j in range(pmap.frequency_axis.size)])


@dataclass(frozen=True)
class DispersiveCapacitorCurve:
    """Rectifying capacitance per frequency plus the common edge ``C*``."""

    frequency_axis: np.ndarray
    capacitance_values: np.ndarray
    reference_threshold: float

    def __post_init__(self):
        freq = np.asarray(self.frequency_axis, float)
        vals = np.asarray(self.capacitance_values, float)
        if freq.shape != vals.shape:
            raise DomainError("frequency and capacitance arrays differ in length")
        if np.any(np.diff(freq) <= 0):
            raise DomainError("frequency axis is not strictly increasing")
        if np.any(vals < 0):
            raise DomainError("rectifying capacitance must be non-negative")
        object.__setattr__(self, "frequency_axis", freq)
        object.__setattr__(self, "capacitance_values", vals)

    def to_csv(self):
        buf = io.StringIO()
        buf.write(f"# C_star_F = {self.reference_threshold!r}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["f_Hz", "C_omega_F"])
        for f, c in zip(self.frequency_axis, self.capacitance_values):
            writer.writerow([repr(float(f)), f"{c:.9g}"])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text):
        c_star = 0.0
        rows = []
        for n, line in enumerate(text.splitlines(), start=1):
            if line.startswith("#"):
                key, _, value = line[1:].partition("=")
                if key.strip() == "C_star_F":
                    c_star = float(value)
                continue
            if not line.strip() or line.startswith("f_Hz"):
                continue
            parts = line.split(",")
            if len(parts) != 2:
                raise ParseError("expected two columns", n)
            try:
                rows.append((float(parts[0]), float(parts[1])))
            except ValueError:
                raise ParseError("not a number", n) from None
        arr = np.array(rows, dtype=float).reshape(-1, 2)
        return cls(arr[:, 0], arr[:, 1], c_star)


def rectify(pmap, threshold=np.pi / 4):
    """Flatten the knife edge with a frequency-dependent parallel capacitance.

    Each column's edge ``C_th(f)`` is found, ``C* = min C_th`` and
    ``C_omega(f) = C_th(f) - C*``. The rectified map is the original map
    re-read at ``Cv + C_omega(f)`` on the same capacitance grid, so its edge
    sits at ``C*`` in every column. Samples pushed beyond the grid's top end
    take the last grid value (linear interpolation, clamped).

    Returns ``(DispersiveCapacitorCurve, PhaseMap)``.
    """
    edges = threshold_curve(pmap, threshold)
    if np.any(np.isnan(edges)):
        j = int(np.flatnonzero(np.isnan(edges))[0])
        raise EdgeOutsideMap(pmap.frequency_axis[j], threshold)
    c_star = float(edges.min())
    c_omega = edges - c_star
    cap = pmap.capacitance_axis
    values = np.empty_like(pmap.values)
    amp = None if pmap.amplitude is None else np.empty_like(pmap.amplitude)
    for j, shift in enumerate(c_omega):
        values[:, j] = np.interp(cap + shift, cap, pmap.values[:, j])
        if amp is not None:
            amp[:, j] = np.interp(cap + shift, cap, pmap.amplitude[:, j])
    curve = DispersiveCapacitorCurve(pmap.frequency_axis.copy(), c_omega, c_star)
    return curve, PhaseMap(cap.copy(), pmap.frequency_axis.copy(), values, amplitude=amp)


def usable_bandwidth(pmap, flatness_tolerance, threshold=np.pi / 4):
    """Widest contiguous frequency span whose edges agree within the tolerance.

    Columns whose edge lies outside the map break the span. A single usable
    column gives zero bandwidth.
    """
    edges = threshold_curve(pmap, threshold)
    freq = pmap.frequency_axis
    best = 0.0
    n = edges.size
    for i in range(n):
        if np.isnan(edges[i]):
            continue
        lo = hi = edges[i]
        for j in range(i + 1, n):
            if np.isnan(edges[j]):
                break
            lo, hi = min(lo, edges[j]), max(hi, edges[j])
            if hi - lo > flatness_tolerance:
                break
            best = max(best, freq[j] - freq[i])
    return float(best)


# -- fitting utilities --------------------------------------------------------

def _dense_edges(surface, freqs, cap_grid, threshold):
    pmap = surface_phase_map(surface, cap_grid, freqs)
    return threshold_curve(pmap, threshold)


def fit_sheet_parameters(target_freqs, target_edges, surface=None,
                         cap_grid=None, threshold=np.pi / 4):
    """Least-squares fit of sheet inductance and capacitance to edge locations.

    ``target_edges[k]`` is the desired knife-edge capacitance at
    ``target_freqs[k]``. The substrate and sheet resistance of ``surface`` are
    kept; the fitted :class:`SurfaceParams` is returned.
    """
    surface = surface or SurfaceParams()
    freqs = np.asarray(target_freqs, float)
    targets = np.asarray(target_edges, float)
    cap = (np.linspace(0.6 * PF, 2.6 * PF, 801) if cap_grid is None
           else np.asarray(cap_grid, float))
    span = cap[-1] - cap[0]

    def residual(p):
        trial = replace(surface, sheet_inductance=np.exp(p[0]),
                        sheet_capacitance=np.exp(p[1]))
        edges = _dense_edges(trial, freqs, cap, threshold)
        # a missing edge counts as landing one full span away
        edges = np.where(np.isnan(edges), cap[-1] + span, edges)
        return (edges - targets) / PF

    x0 = np.log([surface.sheet_inductance, surface.sheet_capacitance])
    sol = optimize.least_squares(residual, x0, diff_step=1e-3,
                                 bounds=(np.log([1e-11, 1e-16]), np.log([1e-6, 1e-11])))
    return replace(surface, sheet_inductance=float(np.exp(sol.x[0])),
                   sheet_capacitance=float(np.exp(sol.x[1])))


def phase_span(surface, f, cap_range=(0.6 * PF, 2.6 * PF), samples=2001):
    """Phase swing of the surrogate at ``f`` over the varactor range."""
    cap = np.linspace(cap_range[0], cap_range[1], samples)
    row = np.unwrap(np.angle(reflection_coefficient(surface, cap, f)))
    lag = row[0] - row
    return float(lag.max() - lag.min())


def fit_thickness_for_span(surface, f, target_span, cap_range=(0.6 * PF, 2.6 * PF),
                           bracket=(2e-3, 15e-3)):
    """Substrate thickness giving a phase swing of ``target_span`` at ``f``."""
    def gap(h):
        return phase_span(replace(surface, substrate_thickness=h), f, cap_range) - target_span

    lo, hi = bracket
    if gap(lo) * gap(hi) > 0:
        raise DomainError("target span is not reachable inside the thickness bracket")
    h = optimize.brentq(gap, lo, hi, xtol=1e-9)
    return replace(surface, substrate_thickness=float(h))
