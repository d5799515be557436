import json

import numpy as np
import pytest

from dopplercloak.cli import main
from dopplercloak.circuit import CircuitParams, rectifying_capacitance
from dopplercloak.metasurface import DispersiveCapacitorCurve, threshold_curve
from dopplercloak.phasemap import load_phase_map


def run(tmp_path, *argv):
    return main(list(argv) + ["--out", str(tmp_path)])


def read(path):
    return path.read_text()


def test_knife_default(tmp_path):
    assert run(tmp_path, "knife") == 0
    m = load_phase_map(tmp_path / "map.csv")
    assert m.shape == (201, 101)
    assert np.all(m.values[0] == 0)
    man = json.loads(read(tmp_path / "manifest.json"))
    assert man["subcommand"] == "knife"
    assert set(man["outputs"]) == {"map.csv", "edge.csv", "summary.txt"}
    assert {"config", "out", "seed", "timestamp"} <= man.keys()


def test_knife_edge_matches_closed_form(tmp_path):
    run(tmp_path, "knife")
    m = load_phase_map(tmp_path / "map.csv")
    cap = m.capacitance_axis
    edges = threshold_curve(m)
    for f, e in zip(m.frequency_axis, edges):
        cw = rectifying_capacitance(CircuitParams(), f, strict=False)
        if np.isfinite(cw) and cw > cap[1]:
            k = np.searchsorted(cap, cw)
            assert abs(e - cw) <= cap[k] - cap[k - 1]


def test_rectify_surrogate(tmp_path):
    assert run(tmp_path, "rectify") == 0
    curve = DispersiveCapacitorCurve.from_csv(read(tmp_path / "c_omega.csv"))
    assert curve.capacitance_values.min() == 0
    summary = read(tmp_path / "bandwidth.txt")
    after = float(summary.split("bandwidth_after_Hz = ")[1].split()[0])
    assert after >= 300e6


def test_rectify_flat_input_map(tmp_path):
    src = tmp_path / "flat.csv"
    src.write_text("x,1e9,2e9\n0,0,0\n1e-12,3,3\n2e-12,3,3\n")
    assert run(tmp_path / "o", "rectify", str(src)) == 0
    curve = DispersiveCapacitorCurve.from_csv(read(tmp_path / "o" / "c_omega.csv"))
    assert np.all(curve.capacitance_values == 0)


def test_phases(tmp_path):
    cfg = tmp_path / "s.cfg"
    cfg.write_text("clutter = none\nmodulation_Hz = bare, cancel\nnum_pulses = 200\n")
    assert run(tmp_path, "phases", "--config", str(cfg)) == 0
    bare = np.loadtxt(tmp_path / "phases_bare.csv", delimiter=",", skiprows=1)
    cancel = np.loadtxt(tmp_path / "phases_cancel.csv", delimiter=",", skiprows=1)
    assert np.ptp(bare[:, 2]) > 10
    assert np.ptp(cancel[:, 2]) < np.ptp(bare[:, 2]) / 5
    assert (tmp_path / "waveform_cancel.csv").exists()
    assert "velocities_mps" in read(tmp_path / "echo_bare.truth.txt")


def test_phases_direction_of_motion(tmp_path):
    # approaching and receding carts give opposite phase slopes
    slopes = {}
    for v in ("0.03", "-0.03"):
        cfg = tmp_path / f"{v}.cfg"
        cfg.write_text(f"velocity_mps = {v}\nclutter = none\nmodulation_Hz = bare\n")
        out = tmp_path / v
        assert main(["phases", "--config", str(cfg), "--out", str(out)]) == 0
        slopes[v] = float(read(out / "summary.txt").split("= ")[1])
    assert slopes["0.03"] == pytest.approx(-slopes["-0.03"])
    assert abs(slopes["0.03"]) == pytest.approx(2 * np.pi * 0.3, rel=0.01)


def test_stationary_ramp_has_ripple(tmp_path):
    cfg = tmp_path / "s.cfg"
    cfg.write_text("velocity_mps = 0\nclutter = none\nmodulation_Hz = 0.33\n")
    assert run(tmp_path, "phases", "--config", str(cfg)) == 0
    data = np.loadtxt(tmp_path / "phases_fm+0.33Hz.csv", delimiter=",", skiprows=1)
    assert np.ptp(data[:, 3]) > 0.01
    slope = np.polyfit(data[:, 1], data[:, 2], 1)[0]
    assert slope > 0


def test_doppler_mti_summary(tmp_path):
    assert run(tmp_path, "doppler", "--mti", "--seed", "3") == 0
    text = read(tmp_path / "summary.txt")
    att = float(text.split("concealment.attenuation_dB = ")[1].split()[0])
    assert att >= 16.0
    assert json.loads(read(tmp_path / "manifest.json"))["seed"] == 3
    head = read(tmp_path / "doppler_cancel.csv").splitlines()[1]
    assert head == "f_Hz,v_mps,mag_dB"


def test_doppler_static_clutter_floor(tmp_path):
    cfg = tmp_path / "s.cfg"
    cfg.write_text("velocity_mps = 0\nmodulation_Hz = bare\nclutter = 4\n")
    assert run(tmp_path, "doppler", "--mti", "--config", str(cfg)) == 0
    peak = float(read(tmp_path / "summary.txt").split("bare.peak_dB = ")[1].split()[0])
    assert peak < -150


def test_doppler_peak_ordering(tmp_path):
    cfg = tmp_path / "s.cfg"
    cfg.write_text("modulation_Hz = -0.5, 0, 0.5\n")
    assert run(tmp_path, "doppler", "--config", str(cfg)) == 0
    text = read(tmp_path / "summary.txt")
    v = {k: float(text.split(f"fm{k}Hz.v_hat_mps = ")[1].split()[0])
         for k in ("-0.5", "+0", "+0.5")}
    assert v["+0.5"] < v["+0"] < 0 < v["-0.5"]


def test_sweep(tmp_path):
    cfg = tmp_path / "s.cfg"
    cfg.write_text("sweep_fm_points = 5\n")
    assert run(tmp_path, "sweep", "--config", str(cfg)) == 0
    rows = read(tmp_path / "sweep.csv").splitlines()
    assert rows[0] == "f_m_Hz,v_true_mps,v_hat_mps"
    assert len(rows) == 26
    data = np.loadtxt(tmp_path / "sweep.csv", delimiter=",", skiprows=1)
    origin = data[(data[:, 0] == 0) & (data[:, 1] == 0)]
    assert abs(origin[0, 2]) < 0.004


def test_reproducible_outputs(tmp_path):
    cfg = tmp_path / "s.cfg"
    cfg.write_text("snr_dB = 15\nmodulation_Hz = cancel\nnum_pulses = 128\n")
    for d in ("a", "b"):
        assert run(tmp_path / d, "doppler", "--config", str(cfg), "--seed", "5") == 0
    for name in ("doppler_cancel.csv", "summary.txt"):
        assert read(tmp_path / "a" / name) == read(tmp_path / "b" / name)


def test_config_error_exit_code(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("velocity_mps = 1\nvelocty = 2\n")
    assert run(tmp_path, "knife", "--config", str(cfg)) == 1
    err = capsys.readouterr().err
    assert "line 2" in err and "velocty" in err


def test_module_error_exit_code(tmp_path, capsys):
    src = tmp_path / "bad.csv"
    src.write_text("x,1e9\n0,0\n1e-12,0.1\n")
    assert run(tmp_path / "o", "rectify", str(src)) == 1
    assert "edge outside map" in capsys.readouterr().err


def test_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["bogus"])
    assert exc.value.code != 0
