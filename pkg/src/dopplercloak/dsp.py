"""The interrogating radar's slow-time chain: decimation, MTI, Doppler FFT.

Velocities follow the scene convention, ``v = -f * c / (2 f_c)`` for a
spectral line at ``f`` Hz, so an uncloaked target is reported at its true
(signed) velocity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import constants

from .errors import DomainError, NoDetection

C0 = constants.c


def mti_two_pulse(x):
    """Two-pulse canceller ``y_k = x_k - x_{k-1}``."""
    x = np.asarray(x)
    if x.ndim != 1 or x.size < 2:
        raise DomainError("two-pulse canceller needs at least two samples")
    return x[1:] - x[:-1]


def mti_response(w):
    """Magnitude of ``1 - exp(-j w)`` at normalised frequency ``w`` (rad/sample)."""
    return np.abs(1 - np.exp(-1j * np.asarray(w, dtype=float)))


def downsample_for_mti(x, expected_doppler, T_s):
    """Keep every n-th sample so ``expected_doppler`` lands near the MTI peak.

    ``n = round(pi / (2 pi f_d T_s))``, limited to ``[1, len(x) // 4]``.
    Returns ``(decimated, n)``.
    """
    x = np.asarray(x)
    if not expected_doppler > 0:
        raise DomainError("expected Doppler must be positive")
    if not T_s > 0:
        raise DomainError("sample interval must be positive")
    w = 2 * np.pi * expected_doppler * T_s
    factor = int(round(np.pi / w))
    factor = max(1, min(factor, max(1, x.size // 4)))
    nyquist = 1 / (2 * factor * T_s)
    if expected_doppler > nyquist * (1 + 1e-9):
        raise DomainError(
            f"expected Doppler {expected_doppler:.6g} Hz exceeds the decimated "
            f"Nyquist frequency {nyquist:.6g} Hz")
    return x[::factor], factor


def _window(name, n):
    if name in (None, "rect", "rectangular", "none"):
        return np.ones(n)
    if name in ("hann", "hanning"):
        return np.hanning(n)
    raise DomainError(f"unknown window {name!r}")


@dataclass
class DopplerReport:
    frequency_axis: np.ndarray
    velocity_axis: np.ndarray
    spectrum_magnitude: np.ndarray
    peak_bin: int
    peak_frequency: float
    estimated_velocity: float
    carrier: float
    sample_interval: float
    mti_applied: bool = False
    decimation: int = 1
    attenuation_at_truth: float | None = None

    @property
    def fft_size(self):
        return self.spectrum_magnitude.size

    @property
    def bin_width(self):
        """Frequency spacing of the FFT bins in Hz."""
        return 1.0 / (self.fft_size * self.sample_interval)

    @property
    def velocity_bin(self):
        return self.bin_width * C0 / (2 * self.carrier)

    @property
    def peak_magnitude(self):
        return float(self.spectrum_magnitude[self.peak_bin])

    def magnitude_at(self, frequency):
        """Spectrum magnitude in the bin nearest ``frequency`` (aliased)."""
        fs = 1.0 / self.sample_interval
        f = (frequency + fs / 2) % fs - fs / 2
        return float(self.spectrum_magnitude[np.argmin(np.abs(self.frequency_axis - f))])

    def to_csv(self):
        lines = [f"# peak_bin={self.peak_bin} peak_frequency_Hz={self.peak_frequency!r} "
                 f"v_hat_mps={self.estimated_velocity!r} mti={int(self.mti_applied)} "
                 f"decimation={self.decimation}",
                 "f_Hz,v_mps,mag_dB"]
        floor = 1e-300
        for f, v, m in zip(self.frequency_axis, self.velocity_axis, self.spectrum_magnitude):
            lines.append(f"{f:.9g},{v:.9g},{20 * np.log10(max(m, floor)):.6f}")
        return "\n".join(lines) + "\n"


def doppler_fft(x, T_s, fft_size=None, window="rect"):
    """Zero-padded FFT of the slow-time samples.

    Returns ``(frequency_axis, magnitude)`` with bins ordered from negative
    to positive frequency. ``fft_size`` defaults to the larger of 512 and the
    next power of two not below ``len(x)``.
    """
    x = np.asarray(x, dtype=complex)
    if x.size == 0:
        raise DomainError("empty input")
    if fft_size is None:
        fft_size = max(512, 1 << int(np.ceil(np.log2(x.size))))
    if fft_size < x.size:
        raise DomainError("fft_size must be at least the input length")
    spec = np.fft.fft(x * _window(window, x.size), n=fft_size)
    freq = np.fft.fftfreq(fft_size, d=T_s)
    return np.fft.fftshift(freq), np.fft.fftshift(np.abs(spec))


def _parabolic_offset(mag, k):
    """Sub-bin offset of the peak from a parabola through log-magnitudes."""
    n = mag.size
    if n < 3:
        return 0.0
    tiny = mag[k] * 1e-300 if mag[k] > 0 else 1e-300
    a, b, c = np.log(np.maximum(mag[[(k - 1) % n, k, (k + 1) % n]], tiny))
    denom = a - 2 * b + c
    if not np.isfinite(denom) or denom >= 0:
        return 0.0
    return float(np.clip(0.5 * (a - c) / denom, -0.5, 0.5))


def estimate_velocity(report_or_spectrum, f_c=None, T_s=None):
    """Peak frequency and signed velocity with 3-point log-parabolic interpolation.

    Accepts a :class:`DopplerReport` or a ``(frequency_axis, magnitude)``
    pair (then ``f_c`` and ``T_s`` are required). Returns
    ``(peak_bin, peak_frequency, velocity)``.
    """
    if isinstance(report_or_spectrum, DopplerReport):
        freq = report_or_spectrum.frequency_axis
        mag = report_or_spectrum.spectrum_magnitude
        f_c = report_or_spectrum.carrier if f_c is None else f_c
        T_s = report_or_spectrum.sample_interval
    else:
        freq, mag = report_or_spectrum
    if not np.any(mag > 0):
        raise NoDetection("no detection: spectrum is identically zero")
    k = int(np.argmax(mag))
    df = 1.0 / (mag.size * T_s)
    f_peak = float(freq[k] + _parabolic_offset(mag, k) * df)
    return k, f_peak, -f_peak * C0 / (2 * f_c)


def process(train, mti=False, expected_doppler=None, fft_size=512, window="rect",
            downsample=None):
    """Run a :class:`PulseTrain` through the radar chain.

    With ``mti`` set, the samples are first decimated for ``expected_doppler``
    (when given and ``downsample`` is not False) and then passed through the
    two-pulse canceller before the FFT.
    """
    x = train.samples
    T_s = train.slow_time_interval
    factor = 1
    if mti:
        if expected_doppler is not None and downsample is not False:
            x, factor = downsample_for_mti(x, expected_doppler, T_s)
            T_s = T_s * factor
        x = mti_two_pulse(x)
    if fft_size is None or fft_size < x.size:
        fft_size = max(fft_size or 0, 1 << int(np.ceil(np.log2(x.size))))
    freq, mag = doppler_fft(x, T_s, fft_size, window)
    velocity_axis = -freq * C0 / (2 * train.carrier)
    try:
        k, f_peak, v_hat = estimate_velocity((freq, mag), train.carrier, T_s)
    except NoDetection:
        k, f_peak, v_hat = int(np.argmin(np.abs(freq))), 0.0, 0.0
    return DopplerReport(freq, velocity_axis, mag, k, f_peak, v_hat, train.carrier,
                         T_s, mti_applied=bool(mti), decimation=factor)
