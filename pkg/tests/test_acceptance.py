"""Acceptance criteria, each checked at its stated tolerance and runtime."""

import math
import time

import numpy as np

from dopplercloak.circuit import (CircuitParams, dipole_current, knife_map, phase_shift,
                                  rectifying_capacitance)
from dopplercloak.cloak import (Scenario, cancellation_frequency, evaluate_concealment,
                                velocity_sweep, with_radar)
from dopplercloak.dsp import doppler_fft, mti_two_pulse, process
from dopplercloak.metasurface import (PF, rectify, surface_phase_map, threshold_curve,
                                      usable_bandwidth)


def test_1_cancellation_number(criterion):
    fm = cancellation_frequency(0.03, 1.5e9, 5.7596)
    ok = abs(fm - 0.327) < 5e-4 and abs(abs(fm) - 0.33) / 0.33 < 0.02
    criterion(1, "cancellation frequency", ok,
              f"f_m = {fm:.4f} Hz, {100 * abs(abs(fm) - 0.33) / 0.33:.2f}% from 0.33 Hz")


def test_2_end_to_end_concealment(criterion):
    t0 = time.perf_counter()
    sc = Scenario()
    rep = evaluate_concealment(sc)
    sc_noisy = with_radar(sc, snr_db=20.0)
    sc_noisy.seed = 2024
    noisy = evaluate_concealment(sc_noisy).attenuation_db
    elapsed = time.perf_counter() - t0
    checks = {
        "noiseless >= 20 dB": rep.attenuation_db >= 20.0,
        "|v_hat| < bin": abs(rep.residual_velocity) < rep.velocity_bin,
        "20 dB SNR >= 15 dB": noisy >= 15.0,
        "runtime < 5 s": elapsed < 5.0,
    }
    failed = [k for k, v in checks.items() if not v]
    criterion(2, "end-to-end concealment", not failed,
              f"attenuation {rep.attenuation_db:.2f} dB noiseless, {noisy:.2f} dB at 20 dB SNR; "
              f"|v_hat| = {abs(rep.residual_velocity):.5f} m/s vs bin {rep.velocity_bin:.5f}; "
              f"{elapsed:.2f} s" + (f"; failed: {', '.join(failed)}" if failed else ""))


def test_3_rectifying_capacitance_round_trip(criterion):
    p = CircuitParams()
    f = np.linspace(1.2e9, 1.7e9, 50)
    cw = rectifying_capacitance(p, f, strict=False)
    have = np.isfinite(cw)
    err = np.abs(phase_shift(p, cw[have], f[have]) - math.pi / 4)
    criterion(3, "pi/4 round trip", have.sum() > 0 and err.max() < 1e-6,
              f"{have.sum()} of 50 frequencies have C_omega, max error {err.max():.2e} rad")


def test_4_rectified_bandwidth(criterion):
    t0 = time.perf_counter()
    _, rect = rectify(surface_phase_map())
    bw = usable_bandwidth(rect, 0.05 * (2.6 - 0.6) * PF)
    elapsed = time.perf_counter() - t0
    criterion(4, "rectified bandwidth", bw >= 300e6 and bw / 1.45e9 >= 0.2 and elapsed < 10,
              f"{bw / 1e6:.0f} MHz ({100 * bw / 1.45e9:.1f}% of 1.45 GHz), {elapsed:.2f} s")


def test_5_linear_law(criterion):
    t0 = time.perf_counter()
    sc = Scenario()
    res = velocity_sweep(sc)
    elapsed = time.perf_counter() - t0
    fits = res.fits()
    r2 = fits[:, 2].min()
    slope = res.common_slope()
    want = res.expected_slope()
    slope_err = abs(slope / want - 1)
    miss = max(abs(s * cancellation_frequency(v, res.carrier, res.phase_span) + b)
               for v, (s, b, _) in zip(res.velocities, fits))
    checks = {
        "R^2 >= 0.999": r2 >= 0.999,
        "slope within 1%": slope_err <= 0.01,
        "invisibility line within one bin": miss < res.velocity_bin,
        "runtime < 60 s": elapsed < 60,
    }
    failed = [k for k, v in checks.items() if not v]
    criterion(5, "linear velocity law", not failed,
              f"min R^2 {r2:.5f}; slope {slope:.5f} vs {want:.5f} m/s/Hz "
              f"({100 * slope_err:.1f}% off); worst cancel point {miss:.5f} m/s vs bin "
              f"{res.velocity_bin:.5f}; {elapsed:.2f} s"
              + (f"; failed: {', '.join(failed)}" if failed else ""))


def test_6_mti_transfer(criterion):
    w = np.linspace(-np.pi, np.pi, 100)
    k = np.arange(64)
    worst = max(np.max(np.abs(np.abs(mti_two_pulse(np.exp(1j * wi * k))) - 2 * abs(np.sin(wi / 2))))
                for wi in w)
    zeros = all(np.all(mti_two_pulse(np.full(16, c)) == 0) for c in (1.0, 3 - 2j, 1e6j))
    criterion(6, "two-pulse canceller", worst < 1e-9 and zeros,
              f"max |gain error| {worst:.1e} over 100 tones; DC exactly nulled: {zeros}")


def _dft(x, n):
    x = np.concatenate([x, np.zeros(n - x.size)])
    k = np.arange(n)
    return np.array([np.sum(x * np.exp(-2j * np.pi * m * k / n)) for m in range(n)])


def test_7_oracle_suites(criterion):
    import cmath
    p = CircuitParams()
    cap = np.linspace(0, 10 * PF, 100)
    freq = np.linspace(1.2e9, 1.7e9, 100)
    m = knife_map(p, cap, freq)
    oracle = np.empty((100, 100))
    for j, f in enumerate(freq):
        w = 2 * math.pi * f
        arg = [cmath.phase(1j * w * (p.C + c) / (1 + 1j * w * p.R * (p.C + c)
                                                 - w * w * p.L * (p.C + c))) for c in cap]
        oracle[:, j] = np.unwrap(arg[0] - np.array(arg))
    map_err = np.max(np.abs(m.values - oracle))
    i_err = abs(dipole_current(p, 1 * PF, 1.5e9)
                - 1j * 2 * math.pi * 1.5e9 * 1.1e-12
                / (1 + 1j * 2 * math.pi * 1.5e9 * 50 * 1.1e-12
                   - (2 * math.pi * 1.5e9) ** 2 * 0.1e-6 * 1.1e-12))

    rng = np.random.default_rng(1)
    fft_err = 0.0
    for n in (16, 100, 256):
        x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        _, mag = doppler_fft(x, 1.0, n)
        ref = np.fft.fftshift(np.abs(_dft(x, n)))
        fft_err = max(fft_err, np.max(np.abs(mag - ref)) / ref.max())

    km = knife_map()
    cgrid = km.capacitance_axis
    cell_ok = True
    for f, e in zip(km.frequency_axis, threshold_curve(km)):
        cw = rectifying_capacitance(p, f, strict=False)
        if np.isfinite(cw) and cw > cgrid[1]:
            k = np.searchsorted(cgrid, cw)
            cell_ok &= bool(abs(e - cw) <= cgrid[k] - cgrid[k - 1])
    i_err /= abs(dipole_current(p, 1 * PF, 1.5e9))
    ok = map_err < 1e-9 and i_err < 1e-12 and fft_err < 1e-9 and cell_ok
    criterion(7, "oracle suites", ok,
              f"knife map vs complex oracle {map_err:.1e} rad; current {i_err:.1e} rel; FFT vs DFT {fft_err:.1e} rel; "
              f"edge within one cell of closed form: {cell_ok}")


def test_8_spoofing_ordering(criterion):
    t0 = time.perf_counter()
    sc = Scenario(velocity=-0.03)
    base = process(sc.run(None)).estimated_velocity
    up = process(sc.run(0.5)).estimated_velocity
    down = process(sc.run(-0.5)).estimated_velocity
    elapsed = time.perf_counter() - t0
    ok = (abs(up) > 0.03 and np.sign(up) == np.sign(base)
          and np.sign(down) == -np.sign(base) and elapsed < 5)
    criterion(8, "spoofing ordering", ok,
              f"v_hat {base:+.4f} uncloaked, {up:+.4f} at +0.5 Hz, {down:+.4f} at -0.5 Hz; "
              f"{elapsed:.2f} s")
