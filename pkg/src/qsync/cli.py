"""Command-line entry point.

Exit codes: 0 success, 1 a validation check failed, 2 bad configuration.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from contextlib import contextmanager

import jsonschema
import numpy as np

from . import checks
from .config import SPECTROSCOPY_OUTPUT_SCHEMA, SYNC_OUTPUT_SCHEMA, ConfigError, load_config
from .hamiltonian import ControlState
from .oracle import IntegrationError, spectroscopy
from .rwa import Branch, conditional_frequency, rabi_frequency, resonant_frequencies, transition_probability
from .static import static_occupation
from .sweep import Backend, find_sync, sweep

EXIT_OK, EXIT_FAILED, EXIT_CONFIG = 0, 1, 2


def fmt(value) -> str:
    """Locale-independent float with 17 significant digits; NaN/None become empty."""
    if value is None:
        return ""
    value = float(value)
    if math.isnan(value):
        return ""
    return format(value, ".17g")


def write_csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    return buf.getvalue()


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


@contextmanager
def _output(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _time_grid(cfg, period: float) -> np.ndarray:
    section = cfg.raw.get("time")
    if section is None:
        raise ConfigError("this command needs a 'time' section")
    start = section.get("start", 0.0)
    if "stop" in section and "rabi_periods" in section:
        raise ConfigError("give either time.stop or time.rabi_periods, not both")
    if "stop" in section:
        stop = section["stop"]
    elif "rabi_periods" in section:
        stop = start + section["rabi_periods"] * period
    else:
        raise ConfigError("time needs 'stop' or 'rabi_periods'")
    if stop < start:
        raise ConfigError("time.stop must be >= time.start")
    if stop == start:
        return np.array([start])
    return np.linspace(start, stop, section["points"])


def cmd_static_trace(cfg) -> str:
    p = cfg.system
    init = cfg.initial
    # static Rabi period 2 pi / delta_b sets the unit for rabi_periods
    period = 2 * math.pi / abs(p.delta_b) if p.delta_b else math.nan
    times = _time_grid(cfg, period)
    rows = [
        (t, static_occupation(p, ControlState.UP, init, t), static_occupation(p, ControlState.DOWN, init, t))
        for t in times
    ]
    return write_csv(("time", "p_up_control_up", "p_up_control_down"), rows)


def cmd_rwa_trace(cfg) -> str:
    p = cfg.system
    d = cfg.drive_template.resolve(p)
    omega_r = rabi_frequency(p, d.v_b)
    times = _time_grid(cfg, 2 * math.pi / omega_r if omega_r else math.nan)
    env_up = conditional_frequency(p, d, ControlState.UP).amplitude
    env_down = conditional_frequency(p, d, ControlState.DOWN).amplitude
    rows = [
        (
            t,
            transition_probability(p, d, ControlState.UP, t),
            transition_probability(p, d, ControlState.DOWN, t),
            env_up,
            env_down,
        )
        for t in times
    ]
    return write_csv(("time", "p_flip_up", "p_flip_down", "envelope_up", "envelope_down"), rows)


def cmd_sync(cfg) -> str:
    result = find_sync(
        cfg.system,
        cfg.matching,
        backend=cfg.backend,
        branch=Branch(cfg.raw.get("branch", "plus")),
        v_a=cfg.raw.get("drive", {}).get("v_a", 0.0),
        cfg=cfg.integration,
        regime_threshold=cfg.regime_threshold,
    )
    out = result.as_dict()
    jsonschema.validate(out, SYNC_OUTPUT_SCHEMA)
    return dump_json(out)


def cmd_sweep(cfg) -> str:
    result = sweep(cfg.system, cfg.drive_template, cfg.sweep_spec, cfg.integration, n_jobs=cfg.n_jobs)
    return write_csv(result.axis_names + (result.objective,), result.rows())


def cmd_spectroscopy(cfg) -> str:
    section = cfg.raw.get("spectroscopy")
    if section is None:
        raise ConfigError("spectroscopy command needs a 'spectroscopy' section")
    if not section["omega_min"] < section["omega_max"] and section["points"] > 1:
        raise ConfigError("spectroscopy.omega_min must be < omega_max")
    p = cfg.system
    template = cfg.drive_template.resolve(p, omega=0.0)
    omegas = np.linspace(section["omega_min"], section["omega_max"], section["points"])
    result = spectroscopy(
        p,
        template,
        omegas,
        cfg.integration,
        samples=section.get("samples", 200),
        prominence=section.get("prominence", 0.1),
        n_jobs=cfg.n_jobs,
    )
    out = {
        "omega": result.omegas.tolist(),
        "response": result.response.tolist(),
        "peaks": result.peaks.tolist(),
        "peak_heights": result.peak_heights.tolist(),
        "resonances": list(resonant_frequencies(p)),
        "window": result.window,
    }
    jsonschema.validate(out, SPECTROSCOPY_OUTPUT_SCHEMA)
    return dump_json(out)


COMMANDS = {
    "static-trace": cmd_static_trace,
    "rwa-trace": cmd_rwa_trace,
    "sync": cmd_sync,
    "sweep": cmd_sweep,
    "spectroscopy": cmd_spectroscopy,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qsync", description="Conditional oscillations of coupled qubits")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in (*COMMANDS, "validate"):
        cmd = sub.add_parser(name)
        cmd.add_argument("--config", required=True, help="JSON run configuration")
        cmd.add_argument("--out", default="-", help="output file (default: stdout)")
        cmd.add_argument("--backend", choices=[b.value for b in Backend], help="override config backend")
        cmd.add_argument("--seed", type=int, help="override config seed")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.backend is not None:
            cfg.raw["backend"] = args.backend
        if args.seed is not None:
            cfg.raw["seed"] = args.seed
        if args.command == "validate":
            report = checks.run_checks(cfg)
            with _output(args.out) as fh:
                fh.write(report.render())
            return EXIT_OK if report.passed else EXIT_FAILED
        text = COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, IntegrationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    with _output(args.out) as fh:
        fh.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
