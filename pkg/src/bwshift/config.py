"""Experiment configuration files: schema, loading and bundled presets."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import jsonschema

from .core import BasisVariant, NormKind, ShiftConfig, SpaceParams
from .dynamics import Thresholds
from .errors import ConfigError
from .seqexpr import SequenceSpec, validate_config

PRESETS = ("example_chaotic", "example_supercyclic_only", "bergman", "zero_one_failure",
           "classical_rolewicz")

_PIECES = {
    "type": "array",
    "minItems": 1,
    "items": {
        "type": "object",
        "additionalProperties": False,
        "required": ["where", "expr"],
        "properties": {"where": {"type": "string"}, "expr": {"type": ["string", "number"]}},
    },
}

_VECTOR = {"type": "object", "patternProperties": {"^-?[0-9]+$": {"type": "number"}},
           "additionalProperties": False}

SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["a", "b", "w"],
    "properties": {
        "description": {"type": "string"},
        "p": {"oneOf": [{"type": "number", "minimum": 1}, {"const": "c0"}]},
        "basis_variant": {"enum": [v.value for v in BasisVariant]},
        "a": _PIECES,
        "b": _PIECES,
        "w": _PIECES,
        "b_default_zero": {"type": "boolean"},
        "window": {
            "type": "object", "additionalProperties": False, "required": ["min", "max"],
            "properties": {"min": {"type": "integer"}, "max": {"type": "integer"}},
        },
        "horizon": {"type": "integer", "minimum": 4},
        "n_max": {"type": "integer", "minimum": 1},
        "thresholds": {
            "type": "object", "additionalProperties": False,
            "properties": {k: {"type": "number"} for k in Thresholds().to_dict()},
        },
        "orbit": {
            "type": "object", "additionalProperties": False,
            "properties": {
                "vector": _VECTOR,
                "steps": {"type": "integer", "minimum": 1},
                "schedule": {"enum": ["all", "powers_of_two"]},
                "candidates": {"type": "array", "items": _VECTOR},
                "tolerance": {"type": "number", "exclusiveMinimum": 0},
            },
        },
        "matrix": {
            "type": "object", "additionalProperties": False,
            "properties": {
                "power": {"type": "integer", "minimum": 1},
                "window": {
                    "type": "object", "additionalProperties": False, "required": ["min", "max"],
                    "properties": {"min": {"type": "integer"}, "max": {"type": "integer"}},
                },
                "i_max": {"type": "integer", "minimum": 1},
            },
        },
    },
}


@dataclass
class ExperimentConfig:
    shift: ShiftConfig
    horizon: int = 48
    n_max: int = 8
    thresholds: Thresholds = field(default_factory=Thresholds)
    orbit: dict = field(default_factory=dict)
    matrix: dict = field(default_factory=dict)
    source: str = ""
    raw: dict = field(default_factory=dict)


def _params(doc, window):
    p = doc.get("p", 2)
    if p == "c0":
        kind, p = NormKind.C0, 2.0
    else:
        kind, p = NormKind.LP, float(p)
    return SpaceParams(norm_kind=kind, p=p,
                       basis_variant=BasisVariant(doc.get("basis_variant", BasisVariant.SPLIT.value)),
                       window=window)


def from_dict(doc: dict, source: str = "", window=None, validate: bool = True) -> ExperimentConfig:
    """Build an experiment from a parsed JSON document.

    ``window`` overrides the document's window. Raises ConfigError (or one of
    its subclasses) for anything the user can fix.
    """
    try:
        jsonschema.validate(doc, SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(x) for x in exc.absolute_path) or "<root>"
        raise ConfigError(f"{source or 'config'}: {where}: {exc.message}") from None
    if window is None:
        w = doc.get("window", {"min": -64, "max": 64})
        window = (w["min"], w["max"])
    try:
        params = _params(doc, tuple(window))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    a = SequenceSpec.from_pieces(doc["a"], name="a")
    b = SequenceSpec.from_pieces(doc["b"], default_zero=doc.get("b_default_zero", False), name="b")
    w = SequenceSpec.from_pieces(doc["w"], name="w")
    name = Path(source).stem if source else ""
    cfg = ShiftConfig(a, b, w, params, name=name)
    if validate:
        rep = validate_config(a, b, w, params.window, params.basis_variant)
        cfg._annulus = (rep.r, rep.R)
        cfg._validation = rep
    th = Thresholds(**doc.get("thresholds", {}))
    return ExperimentConfig(cfg, doc.get("horizon", 48), doc.get("n_max", 8), th,
                            dict(doc.get("orbit", {})), dict(doc.get("matrix", {})), source, doc)


def preset_path(name: str):
    return resources.files("bwshift").joinpath("presets", f"{name}.json")


def load_document(ref: str) -> tuple[dict, str]:
    """Read a config by path, or by preset name (with or without .json)."""
    path = Path(ref)
    stem = path.name[:-5] if path.name.endswith(".json") else path.name
    if not path.exists() and stem in PRESETS:
        text = preset_path(stem).read_text()
        source = f"{stem}.json"
    else:
        try:
            text = path.read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read {ref}: {exc.strerror}") from None
        source = str(path)
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{source}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return doc, source


def load(ref: str, window=None, validate: bool = True) -> ExperimentConfig:
    doc, source = load_document(ref)
    return from_dict(doc, source, window, validate)


def load_preset(name: str, window=None) -> ExperimentConfig:
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
    return load(name, window)


def parse_vector(mapping: dict) -> dict:
    """JSON vector {"index": value} to {int: float}."""
    out = {}
    for k, v in mapping.items():
        try:
            out[int(k)] = float(v)
        except (TypeError, ValueError):
            raise ConfigError(f"bad vector entry {k!r}: {v!r}") from None
        if not math.isfinite(out[int(k)]):
            raise ConfigError(f"vector entry {k} is not finite")
    return out
