"""Batch front-end: one subcommand per study, CSV artifacts plus a manifest.

Usage::

    dopplercloak knife   [--config FILE] [--out DIR]
    dopplercloak rectify [MAP_CSV] [--config FILE] [--out DIR]
    dopplercloak phases  [--config FILE] [--out DIR] [--seed N]
    dopplercloak doppler [--config FILE] [--out DIR] [--seed N] [--mti]
    dopplercloak sweep   [--config FILE] [--out DIR] [--seed N]

Every run writes ``manifest.json`` next to its outputs. Outputs depend only
on the config and seed; the manifest's timestamp is the one field that
changes between identical runs.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import config as cfgmod
from .cloak import evaluate_concealment, velocity_sweep
from .dsp import process
from .errors import CloakError
from .metasurface import rectify, threshold_curve, usable_bandwidth
from .phasemap import dumps_phase_map, load_phase_map
from .scene import doppler_frequency


@dataclass
class RunManifest:
    subcommand: str
    config: str | None
    out: str
    seed: int | None
    timestamp: str
    outputs: list = field(default_factory=list)


class _Writer:
    """Writes files atomically into ``out`` and records their names."""

    def __init__(self, out):
        self.out = Path(out)
        self.out.mkdir(parents=True, exist_ok=True)
        self.names = []

    def write(self, name, text):
        fd, tmp = tempfile.mkstemp(dir=self.out, prefix=f".{name}.")
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, self.out / name)
        self.names.append(name)


def _label(run):
    if isinstance(run, str):
        return run
    return f"fm{run:+g}Hz"


def _resolve_fm(run, scenario):
    """Modulation frequency for a run entry; None means no coating."""
    if run == "bare":
        return None
    if run == "cancel":
        return scenario.plan().modulation_frequency
    return float(run)


def _summary(pairs):
    return "".join(f"{k} = {v!r}\n" if not isinstance(v, str) else f"{k} = {v}\n"
                   for k, v in pairs)


def cmd_knife(args, cfg, w):
    pmap = cfgmod.phase_map(cfg)
    threshold = cfgmod.get_float(cfg, "threshold_rad", np.pi / 4)
    w.write("map.csv", dumps_phase_map(pmap))
    edges = threshold_curve(pmap, threshold)
    w.write("edge.csv", "f_Hz,C_th_F\n" + "".join(
        f"{f:.9g},{c:.9g}\n" for f, c in zip(pmap.frequency_axis, edges)))
    rows, cols = pmap.shape
    w.write("summary.txt", _summary([("rows", rows), ("columns", cols),
                                     ("max_swing_rad", float(np.max(pmap.max_swing())))]))


def cmd_rectify(args, cfg, w):
    if args.map is not None:
        pmap = load_phase_map(Path(args.map))
    else:
        pmap = cfgmod.phase_map(cfg, default_model="surface")
    threshold = cfgmod.get_float(cfg, "threshold_rad", np.pi / 4)
    tol = cfgmod.get_float(cfg, "flatness_tolerance_F", 0.1e-12)
    curve, rect = rectify(pmap, threshold)
    w.write("c_omega.csv", curve.to_csv())
    w.write("rectified_map.csv", dumps_phase_map(rect))
    w.write("bandwidth.txt", _summary([
        ("flatness_tolerance_F", tol),
        ("bandwidth_before_Hz", usable_bandwidth(pmap, tol, threshold)),
        ("bandwidth_after_Hz", usable_bandwidth(rect, tol, threshold)),
        ("C_star_F", curve.reference_threshold)]))


def cmd_phases(args, cfg, w):
    sc = cfgmod.scenario(cfg, args.seed)
    lines = []
    for run in cfgmod.modulation_runs(cfg):
        label = _label(run)
        f_m = _resolve_fm(run, sc)
        train = sc.run(f_m)
        phase = train.phase()
        amp = np.abs(train.samples)
        w.write(f"phases_{label}.csv", "k,t_s,phase_rad,amplitude\n" + "".join(
            f"{k},{t:.12g},{p:.12g},{a:.12g}\n"
            for k, (t, p, a) in enumerate(zip(train.timestamps, phase, amp))))
        w.write(f"echo_{label}.csv", train.to_csv())
        w.write(f"echo_{label}.truth.txt", train.sidecar())
        if f_m is not None:
            tgt = sc.target(f_m)
            w.write(f"waveform_{label}.csv", tgt.coating.waveform.to_csv())
        slope = np.polyfit(train.timestamps, phase, 1)[0]
        lines.append((f"{label}.phase_slope_rad_per_s", float(slope)))
    w.write("summary.txt", _summary(lines))


def cmd_doppler(args, cfg, w):
    sc = cfgmod.scenario(cfg, args.seed)
    fft_size = cfgmod.get_int(cfg, "fft_size", 512)
    window = cfgmod.get_choice(cfg, "window", "rect", ("rect", "hann"))
    f_d = abs(doppler_frequency(sc.velocity, sc.carrier, sc.radar.speed_of_light))
    expected = f_d if (args.mti and f_d > 0) else None
    lines = [("mti", bool(args.mti))]
    for run in cfgmod.modulation_runs(cfg):
        label = _label(run)
        f_m = _resolve_fm(run, sc)
        rep = process(sc.run(f_m), mti=args.mti, expected_doppler=expected,
                      fft_size=fft_size, window=window)
        w.write(f"doppler_{label}.csv", rep.to_csv())
        lines += [(f"{label}.modulation_Hz", f_m if f_m is not None else "none"),
                  (f"{label}.v_hat_mps", rep.estimated_velocity),
                  (f"{label}.peak_dB", float(20 * np.log10(max(rep.peak_magnitude, 1e-300))))]
    if args.mti:
        rep = evaluate_concealment(sc, fft_size=fft_size)
        lines += [("concealment.attenuation_dB", rep.attenuation_db),
                  ("concealment.v_hat_mps", rep.residual_velocity)]
    w.write("summary.txt", _summary(lines))


def cmd_sweep(args, cfg, w):
    sc = cfgmod.scenario(cfg, args.seed)
    vs, fms = cfgmod.sweep_grid(cfg)
    res = velocity_sweep(sc, vs, fms, fft_size=cfgmod.get_int(cfg, "fft_size", 512))
    w.write("sweep.csv", res.to_csv())
    w.write("sweep_fits.csv", res.fits_csv())
    lines = [("phase_span_rad", res.phase_span),
             ("common_slope_mps_per_Hz", res.common_slope()),
             ("expected_slope_mps_per_Hz", res.expected_slope()),
             ("velocity_bin_mps", res.velocity_bin)]
    if np.count_nonzero(vs) >= 1:
        lines.append(("invisibility_slope_Hz_per_mps", res.invisibility_slope()))
    w.write("summary.txt", _summary(lines))


COMMANDS = {"knife": cmd_knife, "rectify": cmd_rectify, "phases": cmd_phases,
            "doppler": cmd_doppler, "sweep": cmd_sweep}


def build_parser():
    parser = argparse.ArgumentParser(prog="dopplercloak",
                                     description="Doppler cloaking studies with CSV output.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="flat key = value config file")
    common.add_argument("--out", metavar="DIR", default=".", help="output directory")
    common.add_argument("--seed", type=int, default=None, help="noise seed (overrides config)")
    common.add_argument("--format", choices=["csv"], default="csv")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("knife", parents=[common], help="phase map of the dipole or surface")
    p = sub.add_parser("rectify", parents=[common], help="flatten a phase map's knife edge")
    p.add_argument("map", nargs="?", help="phase map CSV (default: surrogate from config)")
    sub.add_parser("phases", parents=[common], help="slow-time phase traces")
    p = sub.add_parser("doppler", parents=[common], help="Doppler spectra")
    p.add_argument("--mti", action="store_true", help="decimate and apply the two-pulse canceller")
    sub.add_parser("sweep", parents=[common], help="velocity estimate over v and f_m")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    args.mti = getattr(args, "mti", False)
    args.map = getattr(args, "map", None)
    try:
        cfg = cfgmod.load_config(args.config)
        seed = args.seed if args.seed is not None else cfg.get("seed")
        writer = _Writer(args.out)
        COMMANDS[args.command](args, cfg, writer)
        manifest = RunManifest(args.command, args.config, str(args.out), seed,
                               datetime.now(timezone.utc).isoformat(timespec="seconds"),
                               list(writer.names))
        writer.write("manifest.json", json.dumps(asdict(manifest), indent=2) + "\n")
    except (CloakError, OSError) as exc:
        print(f"dopplercloak {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
