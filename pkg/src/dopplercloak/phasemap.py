"""Phase-shift maps over (varactor capacitance x frequency) and their CSV form.

A map stores one column per frequency and one row per capacitance sample,
which is also the on-disk layout: the header row carries the frequency axis
in Hz, the first column the capacitance axis in F, and each cell the phase
shift in radians written with 9 significant digits.
"""

from __future__ import annotations

import csv
import io
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, ParseError

CORNER_LABEL = "C_F\\f_Hz"


@dataclass(frozen=True)
class PhaseMap:
    """Sampled phase shift over capacitance (rows) and frequency (columns).

    ``values[i, j]`` is the phase shift at ``capacitance_axis[i]`` and
    ``frequency_axis[j]``, unwrapped along the capacitance axis.
    ``amplitude`` optionally holds the matching reflection magnitudes and
    ``flagged`` marks samples that hit a model singularity.
    """

    capacitance_axis: np.ndarray
    frequency_axis: np.ndarray
    values: np.ndarray
    amplitude: np.ndarray | None = None
    flagged: np.ndarray | None = field(default=None, compare=False)

    def __post_init__(self):
        cap = np.atleast_1d(np.asarray(self.capacitance_axis, dtype=float))
        freq = np.atleast_1d(np.asarray(self.frequency_axis, dtype=float))
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim < 2 and vals.size == cap.size * freq.size:
            vals = vals.reshape(cap.size, freq.size)
        if vals.shape != (cap.size, freq.size):
            raise DomainError(
                f"values shape {vals.shape} does not match axes "
                f"({cap.size}, {freq.size})")
        for name, axis in (("capacitance", cap), ("frequency", freq)):
            if axis.size == 0:
                raise DomainError(f"{name} axis is empty")
            if not np.all(np.isfinite(axis)):
                raise DomainError(f"{name} axis has non-finite entries")
            if np.any(np.diff(axis) <= 0):
                raise DomainError(f"{name} axis is not strictly increasing")
        object.__setattr__(self, "capacitance_axis", cap)
        object.__setattr__(self, "frequency_axis", freq)
        object.__setattr__(self, "values", vals)
        if self.amplitude is not None:
            amp = np.asarray(self.amplitude, dtype=float)
            if amp.shape != vals.shape:
                raise DomainError("amplitude shape does not match values")
            object.__setattr__(self, "amplitude", amp)
        if self.flagged is not None:
            object.__setattr__(self, "flagged", np.asarray(self.flagged, dtype=bool))

    @property
    def shape(self):
        return self.values.shape

    def column_index(self, f):
        """Index of the frequency sample nearest to ``f``.

        Raises when ``f`` is more than half a grid step away from every
        sample, so a lookup never extrapolates silently.
        """
        freq = self.frequency_axis
        j = int(np.argmin(np.abs(freq - f)))
        if freq.size == 1:
            ok = np.isclose(f, freq[0], rtol=1e-9, atol=0.0)
        else:
            step = np.diff(freq)
            half = 0.5 * (step[j - 1] if j > 0 else step[0])
            if f > freq[j]:
                half = 0.5 * (step[j] if j < step.size else step[-1])
            ok = abs(f - freq[j]) <= half * (1 + 1e-12)
        if not ok:
            raise DomainError(f"frequency {f:.6g} Hz lies outside the map's axis")
        return j

    def row(self, f):
        """Phase shift versus capacitance at the frequency sample nearest ``f``."""
        return self.values[:, self.column_index(f)]

    def amplitude_row(self, f):
        if self.amplitude is None:
            return np.ones(self.capacitance_axis.size)
        return self.amplitude[:, self.column_index(f)]

    def max_swing(self):
        """Per-frequency span of the phase shift (max minus min)."""
        return self.values.max(axis=0) - self.values.min(axis=0)


def _fmt_axis(x):
    return repr(float(x))


def dumps_phase_map(pmap):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([CORNER_LABEL] + [_fmt_axis(f) for f in pmap.frequency_axis])
    for cap, row in zip(pmap.capacitance_axis, pmap.values):
        writer.writerow([_fmt_axis(cap)] + [f"{v:.9g}" for v in row])
    return buf.getvalue()


def save_phase_map(pmap, path):
    with open(path, "w", newline="") as fh:
        fh.write(dumps_phase_map(pmap))


def _parse_float(text, line, column):
    try:
        value = float(text)
    except ValueError:
        raise ParseError(f"not a number: {text!r}", line, column) from None
    if not np.isfinite(value):
        raise ParseError(f"non-finite value {text!r}", line, column)
    return value


def loads_phase_map(text):
    """Parse the CSV form produced by :func:`dumps_phase_map`."""
    rows = [r for r in csv.reader(io.StringIO(text))]
    # keep original line numbers while skipping blank lines
    numbered = [(i + 1, r) for i, r in enumerate(rows) if any(c.strip() for c in r)]
    if not numbered:
        raise ParseError("empty phase map file", 1)
    head_line, header = numbered[0]
    if len(header) < 2:
        raise ParseError("header needs at least one frequency", head_line, 2)
    freq = np.array([_parse_float(c, head_line, k + 2) for k, c in enumerate(header[1:])])
    bad = np.flatnonzero(np.diff(freq) <= 0)
    if bad.size:
        raise ParseError("frequency axis is not strictly increasing",
                         head_line, int(bad[0]) + 3)
    caps, values = [], []
    for line, row in numbered[1:]:
        if len(row) != len(header):
            raise ParseError(
                f"expected {len(header)} fields, found {len(row)}", line,
                min(len(row), len(header)) + 1)
        cap = _parse_float(row[0], line, 1)
        if caps and cap <= caps[-1]:
            raise ParseError("capacitance axis is not strictly increasing", line, 1)
        caps.append(cap)
        values.append([_parse_float(c, line, k + 2) for k, c in enumerate(row[1:])])
    if not caps:
        raise ParseError("no capacitance rows", head_line + 1)
    return PhaseMap(np.array(caps), freq, np.array(values))


def load_phase_map(source):
    """Load a phase map from a path, a file object or CSV text."""
    if hasattr(source, "read"):
        return loads_phase_map(source.read())
    if isinstance(source, (str, os.PathLike)) and os.path.exists(source):
        with open(source, newline="") as fh:
            return loads_phase_map(fh.read())
    if isinstance(source, str) and "\n" in source:
        return loads_phase_map(source)
    raise ParseError(f"cannot read phase map from {source!r}")
