"""Flat ``key = value`` configuration files.

One assignment per line; ``#`` starts a comment; blank lines are ignored.
Values are numbers, booleans (``true``/``false``), ``none``, bare words, or
comma-separated lists of those. Unknown keys are rejected with their line
number so typos do not pass silently.

Recognised keys (units in the key name where it matters)::

    # radar
    band_start_Hz, band_stop_Hz, carriers_Hz, slow_time_interval_s,
    num_pulses, snr_dB, fft_size, window
    # scene
    velocity_mps, range_m, reflectivity, clutter, amplitude_ripple,
    oscillation_m, oscillation_Hz, seed, modulation_Hz (list; numbers,
    "cancel" or "bare"), phase_span_deg
    # surface / map
    model (dipole | surface), R_ohm, L_H, C_F, substrate_thickness_m,
    relative_permittivity, sheet_resistance_ohm, sheet_inductance_H,
    sheet_capacitance_F, cap_min_F, cap_max_F, cap_points, cap_spacing
    (log | linear), f_start_Hz, f_stop_Hz, f_points, threshold_rad,
    flatness_tolerance_F
    # varactor
    varactor_c_max_F, varactor_c_min_F, varactor_v_min_V, varactor_v_max_V,
    junction_potential_V
    # sweep
    sweep_velocities_mps, sweep_fm_min_Hz, sweep_fm_max_Hz, sweep_fm_points
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .errors import ParseError

KEYS = {
    "band_start_Hz", "band_stop_Hz", "carriers_Hz", "slow_time_interval_s",
    "num_pulses", "snr_dB", "fft_size", "window",
    "velocity_mps", "range_m", "reflectivity", "clutter", "amplitude_ripple",
    "oscillation_m", "oscillation_Hz", "seed", "modulation_Hz", "phase_span_deg",
    "model", "R_ohm", "L_H", "C_F", "substrate_thickness_m", "relative_permittivity",
    "sheet_resistance_ohm", "sheet_inductance_H", "sheet_capacitance_F",
    "cap_min_F", "cap_max_F", "cap_points", "cap_spacing",
    "f_start_Hz", "f_stop_Hz", "f_points", "threshold_rad", "flatness_tolerance_F",
    "varactor_c_max_F", "varactor_c_min_F", "varactor_v_min_V", "varactor_v_max_V",
    "junction_potential_V",
    "sweep_velocities_mps", "sweep_fm_min_Hz", "sweep_fm_max_Hz", "sweep_fm_points",
}


def _scalar(text):
    low = text.lower()
    if low in ("true", "yes", "on"):
        return True
    if low in ("false", "no", "off"):
        return False
    if low == "none":
        return None
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def parse_config(text):
    """Parse config text into a dict; lists stay lists, scalars stay scalars."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError("expected 'key = value'", lineno, 1)
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise ParseError("missing key", lineno, 1)
        if key not in KEYS:
            raise ParseError(f"unknown key {key!r}", lineno, raw.index(key) + 1)
        if key in out:
            raise ParseError(f"duplicate key {key!r}", lineno, raw.index(key) + 1)
        if value == "":
            raise ParseError(f"missing value for {key!r}", lineno, raw.index("=") + 2)
        if "," in value:
            items = [s.strip() for s in value.split(",")]
            if any(s == "" for s in items):
                raise ParseError(f"empty list item in {key!r}", lineno, raw.index("=") + 2)
            out[key] = [_scalar(s) for s in items]
        else:
            out[key] = _scalar(value)
    return out


def load_config(path):
    if path is None:
        return {}
    return parse_config(Path(path).read_text())


def get_float(cfg, key, default):
    value = cfg.get(key, default)
    if value is None:
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParseError(f"{key} must be a number, got {value!r}")
    return float(value)


def get_int(cfg, key, default):
    value = cfg.get(key, default)
    if isinstance(value, bool) or not isinstance(value, int):
        raise ParseError(f"{key} must be an integer, got {value!r}")
    return value


def get_list(cfg, key, default):
    value = cfg.get(key, default)
    return list(value) if isinstance(value, (list, tuple)) else [value]


def get_floats(cfg, key, default):
    items = get_list(cfg, key, default)
    for v in items:
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ParseError(f"{key} must hold numbers, got {v!r}")
    return [float(v) for v in items]


def get_choice(cfg, key, default, choices):
    value = cfg.get(key, default)
    if value not in choices:
        raise ParseError(f"{key} must be one of {', '.join(choices)}, got {value!r}")
    return value


def get_bool(cfg, key, default):
    value = cfg.get(key, default)
    if not isinstance(value, bool):
        raise ParseError(f"{key} must be true or false, got {value!r}")
    return value


# builders -----------------------------------------------------------------

def radar_config(cfg):
    from .scene import RadarConfig

    return RadarConfig(
        band=(get_float(cfg, "band_start_Hz", 1.2e9), get_float(cfg, "band_stop_Hz", 1.7e9)),
        carriers=tuple(get_floats(cfg, "carriers_Hz", 1.5e9)),
        slow_time_interval=get_float(cfg, "slow_time_interval_s", 0.05),
        num_pulses=get_int(cfg, "num_pulses", 512),
        snr_db=get_float(cfg, "snr_dB", None),
    )


def surface_params(cfg):
    """Surrogate parameters and whether the thickness was given explicitly."""
    from .metasurface import SurfaceParams

    base = SurfaceParams()
    h = get_float(cfg, "substrate_thickness_m", None)
    fields = dict(
        relative_permittivity=get_float(cfg, "relative_permittivity", base.relative_permittivity),
        sheet_resistance=get_float(cfg, "sheet_resistance_ohm", base.sheet_resistance),
        sheet_inductance=get_float(cfg, "sheet_inductance_H", base.sheet_inductance),
        sheet_capacitance=get_float(cfg, "sheet_capacitance_F", base.sheet_capacitance),
    )
    return SurfaceParams(substrate_thickness=h if h is not None else base.substrate_thickness,
                         **fields), h is not None


def varactor(cfg):
    from .modulation import VaractorCurve

    return VaractorCurve.fit(
        c_max=get_float(cfg, "varactor_c_max_F", 2.6e-12),
        c_min=get_float(cfg, "varactor_c_min_F", 0.6e-12),
        v_min=get_float(cfg, "varactor_v_min_V", 0.0),
        v_max=get_float(cfg, "varactor_v_max_V", 30.0),
        junction_potential=get_float(cfg, "junction_potential_V", 0.77),
    )


def scenario(cfg, seed=None):
    """A :class:`~dopplercloak.cloak.Scenario` from config values.

    Without ``substrate_thickness_m`` the slab thickness is fitted so the
    varactor range spans ``phase_span_deg`` (default 330) at the carrier.
    """
    from .cloak import Scenario
    from .metasurface import fit_thickness_for_span

    radar = radar_config(cfg)
    surface, given = surface_params(cfg)
    curve = varactor(cfg)
    span = np.radians(get_float(cfg, "phase_span_deg", 330.0))
    if not given:
        surface = fit_thickness_for_span(surface, radar.carriers[0], span,
                                         cap_range=(curve.c_min, curve.c_max))
    cfg_seed = cfg.get("seed", None)
    if cfg_seed is not None and (isinstance(cfg_seed, bool) or not isinstance(cfg_seed, int)):
        raise ParseError(f"seed must be an integer, got {cfg_seed!r}")
    return Scenario(
        radar=radar,
        velocity=get_float(cfg, "velocity_mps", -0.03),
        range0=get_float(cfg, "range_m", 3.0),
        reflectivity=get_float(cfg, "reflectivity", 1.0),
        clutter=() if "clutter" in cfg and cfg["clutter"] is None
        else tuple(get_floats(cfg, "clutter", 0.5)),
        surface=surface,
        curve=curve,
        target_span=span,
        amplitude_ripple=get_bool(cfg, "amplitude_ripple", True),
        oscillation=(get_float(cfg, "oscillation_m", 0.0), get_float(cfg, "oscillation_Hz", 0.0)),
        seed=seed if seed is not None else cfg_seed,
    )


def grids(cfg, model):
    """Capacitance and frequency grids; defaults depend on the map model."""
    if model == "dipole":
        lo, hi, n, spacing = 0.01e-12, 10e-12, 200, "log"
    else:
        lo, hi, n, spacing = 0.6e-12, 2.6e-12, 201, "linear"
    lo = get_float(cfg, "cap_min_F", lo)
    hi = get_float(cfg, "cap_max_F", hi)
    n = get_int(cfg, "cap_points", n)
    spacing = get_choice(cfg, "cap_spacing", spacing, ("log", "linear"))
    if not (0 < lo < hi) or n < 1:
        raise ParseError("capacitance grid needs 0 < cap_min_F < cap_max_F and cap_points >= 1")
    if spacing == "log":
        cap = np.logspace(np.log10(lo), np.log10(hi), n)
    else:
        cap = np.linspace(lo, hi, n)
    if model == "dipole":
        cap = np.concatenate([[0.0], cap])
    f0 = get_float(cfg, "f_start_Hz", 1.2e9)
    f1 = get_float(cfg, "f_stop_Hz", 1.7e9)
    nf = get_int(cfg, "f_points", 101)
    if not (0 < f0 <= f1) or nf < 1 or (nf > 1 and f0 == f1):
        raise ParseError("frequency grid needs 0 < f_start_Hz < f_stop_Hz and f_points >= 1")
    return cap, np.linspace(f0, f1, nf)


def phase_map(cfg, default_model="dipole"):
    from .circuit import CircuitParams, knife_map
    from .metasurface import surface_phase_map

    model = get_choice(cfg, "model", default_model, ("dipole", "surface"))
    cap, freq = grids(cfg, model)
    if model == "dipole":
        params = CircuitParams(R=get_float(cfg, "R_ohm", 50.0), L=get_float(cfg, "L_H", 0.1e-6),
                               C=get_float(cfg, "C_F", 0.1e-12))
        return knife_map(params, cap, freq)
    surface, _ = surface_params(cfg)
    return surface_phase_map(surface, cap, freq)


def modulation_runs(cfg, default=("bare", "cancel", -0.5, 0.0, 0.5)):
    """Entries of ``modulation_Hz``: floats, ``"cancel"`` or ``"bare"``."""
    runs = get_list(cfg, "modulation_Hz", list(default))
    for r in runs:
        if isinstance(r, bool) or not (isinstance(r, (int, float)) or r in ("cancel", "bare")):
            raise ParseError(f"modulation_Hz entries must be numbers, 'cancel' or 'bare'; got {r!r}")
    return [float(r) if isinstance(r, (int, float)) else r for r in runs]


def sweep_grid(cfg):
    vs = get_floats(cfg, "sweep_velocities_mps", [-0.04, -0.02, 0.0, 0.02, 0.04])
    fms = np.linspace(get_float(cfg, "sweep_fm_min_Hz", -0.6),
                      get_float(cfg, "sweep_fm_max_Hz", 0.6),
                      get_int(cfg, "sweep_fm_points", 25))
    return np.array(vs), fms
