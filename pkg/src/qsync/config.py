"""JSON run configuration: schema, validation and conversion to domain objects.

All physical values share one angular-frequency unit (hbar = 1).  Unknown
keys are rejected everywhere.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import jsonschema

from .gates import GateTarget, MatchingIndices
from .hamiltonian import ControlState, SystemParams
from .oracle import IntegrationConfig
from .static import InitialAmplitudes
from .sweep import AXIS_NAMES, Axis, Backend, DriveTemplate, Objective, SweepSpec

DEFAULT_SEED = 20240917


class ConfigError(ValueError):
    """Configuration failed schema or semantic validation."""


_number = {"type": "number"}
_pos_int = {"type": "integer", "minimum": 1}

TIME_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "start": {"type": "number", "minimum": 0},
        "stop": {"type": "number", "minimum": 0},
        "rabi_periods": {"type": "number", "minimum": 0},
        "points": _pos_int,
    },
    "required": ["points"],
}

CONFIG_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "qsync run configuration",
    "type": "object",
    "additionalProperties": False,
    "required": ["system"],
    "properties": {
        "system": {
            "type": "object",
            "additionalProperties": False,
            "required": ["eps_a", "delta_a", "eps_b", "delta_b", "coupling"],
            "properties": {k: _number for k in ("eps_a", "delta_a", "eps_b", "delta_b", "coupling")},
        },
        "drive": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "v_a": _number,
                "v_b": {"oneOf": [_number, {"const": "cnot"}]},
                "omega": {"oneOf": [{"type": "number", "minimum": 0}, {"enum": ["plus", "minus"]}]},
            },
        },
        "matching": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"n": _pos_int, "l": _pos_int, "m": _pos_int},
        },
        "initial": {
            "type": "object",
            "additionalProperties": False,
            "required": ["a", "b"],
            "properties": {"a": _number, "b": _number},
        },
        "time": TIME_SCHEMA,
        "backend": {"enum": ["rwa", "oracle"]},
        "branch": {"enum": ["plus", "minus"]},
        "seed": {"type": "integer"},
        "n_jobs": {"type": "integer"},
        "regime_threshold": {"type": "number", "exclusiveMinimum": 0},
        "integration": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "rtol": {"type": "number", "exclusiveMinimum": 0},
                "atol": {"type": "number", "exclusiveMinimum": 0},
                "max_step_fraction": {"type": "number", "exclusiveMinimum": 0},
                "norm_tol": {"type": "number", "exclusiveMinimum": 0},
            },
        },
        "sweep": {
            "type": "object",
            "additionalProperties": False,
            "required": ["axes"],
            "properties": {
                "axes": {
                    "type": "array",
                    "minItems": 1,
                    "items": {
                        "type": "object",
                        "additionalProperties": False,
                        "required": ["name", "min", "max", "points"],
                        "properties": {
                            "name": {"enum": list(AXIS_NAMES)},
                            "min": _number,
                            "max": _number,
                            "points": _pos_int,
                            "scale": {"enum": ["linear", "log"]},
                        },
                    },
                },
                "objective": {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["kind"],
                    "properties": {
                        "kind": {"enum": ["fidelity", "transition"]},
                        "target": {"enum": [t.value for t in GateTarget]},
                        "control": {"enum": ["up", "down"]},
                    },
                },
                "t": {"type": "number", "minimum": 0},
            },
        },
        "spectroscopy": {
            "type": "object",
            "additionalProperties": False,
            "required": ["omega_min", "omega_max", "points"],
            "properties": {
                "omega_min": {"type": "number", "exclusiveMinimum": 0},
                "omega_max": {"type": "number", "exclusiveMinimum": 0},
                "points": _pos_int,
                "samples": {"type": "integer", "minimum": 2},
                "prominence": {"type": "number", "minimum": 0},
            },
        },
        "validate": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "samples": _pos_int,
                "rwa_error_bound": {"type": "number", "minimum": 0},
                "tolerances": {
                    "type": "object",
                    "additionalProperties": False,
                    "properties": {
                        k: {"type": "number", "minimum": 0}
                        for k in ("static", "rwa_closed_form", "matching", "ratio", "suppression",
                                  "static_oracle", "norm_drift")
                    },
                },
            },
        },
    },
}

SYNC_OUTPUT_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["n", "l", "branch", "v_b", "omega_drive", "omega_r", "omega_nr", "t_op", "fidelity_rwa",
                 "regime_ratios"],
    "properties": {
        "n": _pos_int,
        "l": _pos_int,
        "branch": {"enum": ["plus", "minus"]},
        "v_b": _number,
        "omega_drive": _number,
        "omega_r": _number,
        "omega_nr": _number,
        "t_op": _number,
        "fidelity_rwa": {"type": "number", "minimum": 0, "maximum": 1},
        "fidelity_oracle": {"type": "number", "minimum": 0, "maximum": 1},
        "regime_ratios": {"oneOf": [{"type": "null"}, {"type": "array", "items": _number, "minItems": 3,
                                                       "maxItems": 3}]},
    },
}

SPECTROSCOPY_OUTPUT_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["omega", "response", "peaks", "peak_heights", "resonances", "window"],
    "properties": {
        "omega": {"type": "array", "items": _number},
        "response": {"type": "array", "items": _number},
        "peaks": {"type": "array", "items": _number},
        "peak_heights": {"type": "array", "items": _number},
        "resonances": {"type": "array", "items": _number, "minItems": 2, "maxItems": 2},
        "window": _number,
    },
}


@dataclass(frozen=True)
class RunConfig:
    raw: dict

    @property
    def system(self) -> SystemParams:
        return SystemParams(**self.raw["system"])

    @property
    def matching(self) -> MatchingIndices:
        return MatchingIndices(**self.raw.get("matching", {}))

    @property
    def drive_template(self) -> DriveTemplate:
        drive = self.raw.get("drive", {})
        return DriveTemplate(
            v_a=drive.get("v_a", 0.0),
            v_b=drive.get("v_b", 0.0),
            omega=drive.get("omega", "plus"),
            matching=self.matching,
        )

    @property
    def initial(self) -> InitialAmplitudes:
        init = self.raw.get("initial", {"a": 0.0, "b": 1.0})
        return InitialAmplitudes(init["a"], init["b"])

    @property
    def integration(self) -> IntegrationConfig:
        return IntegrationConfig(**self.raw.get("integration", {}))

    @property
    def backend(self) -> Backend:
        return Backend(self.raw.get("backend", "rwa"))

    @property
    def seed(self) -> int:
        return self.raw.get("seed", DEFAULT_SEED)

    @property
    def n_jobs(self) -> int:
        return self.raw.get("n_jobs", 1)

    @property
    def regime_threshold(self) -> float:
        return self.raw.get("regime_threshold", 0.2)

    @property
    def sweep_spec(self) -> SweepSpec:
        if "sweep" not in self.raw:
            raise ConfigError("sweep command needs a 'sweep' section")
        section = self.raw["sweep"]
        obj = section.get("objective", {"kind": "fidelity"})
        objective = Objective(
            kind=obj["kind"],
            target=GateTarget(obj.get("target", "cnot_plus")),
            control=ControlState.UP if obj.get("control", "up") == "up" else ControlState.DOWN,
        )
        axes = tuple(Axis(a["name"], a["min"], a["max"], a["points"], a.get("scale", "linear"))
                     for a in section["axes"])
        return SweepSpec(axes=axes, backend=self.backend, objective=objective, t=section.get("t"))


def validate_config(raw: dict) -> RunConfig:
    try:
        jsonschema.validate(raw, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(x) for x in exc.absolute_path) or "<root>"
        raise ConfigError(f"config invalid at {where}: {exc.message}") from None
    cfg = RunConfig(raw)
    try:
        # build the eagerly-checkable domain objects so errors surface before any computation
        cfg.system
        cfg.matching
        cfg.integration
        if "initial" in raw:
            cfg.initial
        if "sweep" in raw:
            cfg.sweep_spec
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return cfg


def load_config(path) -> RunConfig:
    try:
        raw = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None
    return validate_config(raw)
