import numpy as np
import pytest

from dopplercloak.errors import DomainError
from dopplercloak.scene import (C0, PulseTrain, RadarConfig, Target, doppler_frequency,
                                doppler_phase, simulate)

CFG = RadarConfig()


def test_config_validation():
    with pytest.raises(DomainError):
        RadarConfig(band=(1.7e9, 1.2e9))
    with pytest.raises(DomainError):
        RadarConfig(slow_time_interval=0.0)
    with pytest.raises(DomainError):
        RadarConfig(num_pulses=1)
    assert CFG.band == (1.2e9, 1.7e9)
    assert CFG.speed_of_light == pytest.approx(2.998e8, rel=1e-4)


def test_static_target_has_constant_phase():
    t = np.linspace(0, 5, 11)
    ph = doppler_phase(Target(3.0, 0.0), 1.5e9, t)
    assert np.all(ph == ph[0])


def test_doppler_frequency_for_experiment_speed():
    assert abs(doppler_frequency(0.03, 1.5e9)) == pytest.approx(0.300, abs=5e-4)
    ph = doppler_phase(Target(3.0, 0.03), 1.5e9, np.array([0.0, 1.0]))
    assert abs(ph[1] - ph[0]) == pytest.approx(2 * np.pi * 0.3, rel=2e-3)


def test_receding_and_approaching_slopes_are_opposite():
    t = np.array([0.0, 1.0])
    away = np.diff(doppler_phase(Target(3.0, -0.03), 1.5e9, t))[0]
    toward = np.diff(doppler_phase(Target(3.0, 0.03), 1.5e9, t))[0]
    assert away == pytest.approx(-toward)
    assert away > 0   # receding target: rising phase in this convention


def test_static_uncoated_target_gives_identical_samples():
    tr = simulate(CFG, [Target(3.0, 0.0)])[0]
    assert np.all(tr.samples == tr.samples[0])
    assert len(tr.samples) == CFG.num_pulses


def test_moving_target_phase_is_linear():
    tgt = Target(3.0, 0.03)
    tr = simulate(CFG, [tgt])[0]
    want = doppler_phase(tgt, 1.5e9, tr.timestamps)
    got = tr.phase()
    np.testing.assert_allclose(got - got[0], want - want[0], atol=1e-9)


def test_superposition():
    a, b = Target(3.0, 0.02, 1.0), Target(4.0, -0.01, 0.3)
    both = simulate(CFG, [a, b], [0.5])[0].samples
    sa = simulate(CFG, [a])[0].samples
    sb = simulate(CFG, [b])[0].samples
    np.testing.assert_allclose(both, sa + sb + 0.5, atol=1e-12)


def test_superposition_with_coatings(scenario):
    a, b = scenario.target(0.3), scenario.target(-0.2, velocity=0.01)
    both = simulate(CFG, [a, b])[0].samples
    np.testing.assert_allclose(both, simulate(CFG, [a])[0].samples
                               + simulate(CFG, [b])[0].samples, atol=1e-12)


def test_clutter_is_pure_dc():
    tr = simulate(CFG, [], [2.0, 1.5j])[0]
    assert np.all(tr.samples == 2.0 + 1.5j)
    spec = np.abs(np.fft.fft(tr.samples))
    assert np.all(spec[1:] < 1e-9 * spec[0])


def test_determinism_and_seed_dependence():
    cfg = RadarConfig(carriers=(1.3e9, 1.5e9), snr_db=10.0)
    a = simulate(cfg, [Target(3.0, 0.02)], seed=7)
    b = simulate(cfg, [Target(3.0, 0.02)], seed=7)
    c = simulate(cfg, [Target(3.0, 0.02)], seed=8)
    for x, y in zip(a, b):
        assert np.array_equal(x.samples, y.samples)
    assert not np.array_equal(a[0].samples, c[0].samples)


def test_carrier_streams_are_independent_of_order():
    one = simulate(RadarConfig(carriers=(1.5e9,), snr_db=10.0), [Target()], seed=3)[0]
    two = simulate(RadarConfig(carriers=(1.5e9, 1.6e9), snr_db=10.0), [Target()], seed=3)[0]
    assert np.array_equal(one.samples, two.samples)


def test_noise_power_follows_snr():
    cfg = RadarConfig(num_pulses=20000, snr_db=10.0)
    tr = simulate(cfg, [Target(3.0, 0.0, 2.0)], seed=1)[0]
    noise = tr.samples - tr.samples.mean()
    assert np.mean(np.abs(noise) ** 2) == pytest.approx(4 / 10, rel=0.05)


def test_coated_target_with_cancelling_modulation_is_flat(scenario):
    tr = scenario.run(scenario.plan().modulation_frequency)
    bare = scenario.run(None)
    # with the clutter removed, the wrapped phase stays within a fraction of a turn
    flat = np.angle((tr.samples - 0.5) * np.exp(-1j * np.angle(tr.samples[0] - 0.5)))
    assert np.ptp(np.unwrap(flat)) < 2 * np.pi
    assert np.ptp(np.unwrap(np.angle(bare.samples - 0.5))) > 40


def test_amplitude_ripple_toggle(scenario):
    coat = scenario.coating(0.33)
    _, amp = coat.response(1.5e9, np.linspace(0, 3, 50))
    assert amp.min() < 1 and amp.max() <= 1
    from dataclasses import replace
    _, flat = replace(coat, amplitude_ripple=False).response(1.5e9, np.linspace(0, 3, 50))
    assert np.all(flat == 1)


def test_short_waveform_is_rejected(scenario):
    from dopplercloak.modulation import waveform
    from dopplercloak.scene import Coating
    wf = waveform(scenario.calibration, 0.3, 5.0, 100.0)
    tgt = Target(3.0, 0.0, 1.0, Coating(scenario.phase_map, scenario.varactor, wf))
    with pytest.raises(DomainError, match="shorter"):
        simulate(CFG, [tgt])


def test_oscillation_adds_wobble():
    tr = simulate(CFG, [Target(3.0, 0.0, oscillation=(0.002, 0.5))])[0]
    assert np.ptp(tr.phase()) == pytest.approx(4 * np.pi * 1.5e9 * 0.004 / C0, rel=0.02)


def test_pulse_train_csv_and_sidecar():
    tr = simulate(RadarConfig(num_pulses=4), [Target(3.0, 0.01)])[0]
    lines = tr.to_csv().splitlines()
    assert lines[0] == "k,t_s,re,im"
    assert len(lines) == 5
    assert "velocities_mps = [0.01]" in tr.sidecar()
    with pytest.raises(DomainError):
        PulseTrain(1e9, np.array([np.nan, 1.0]), np.array([0.0, 1.0]))
