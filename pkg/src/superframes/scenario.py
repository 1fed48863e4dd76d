"""Scenario files: JSON description of frames, superpositions and simulations.

Angles are degrees in the file and radians in memory; amplitudes are
``{"re": .., "im": ..}`` objects. ``serialize`` writes back the same
document shape so that parse -> serialize -> parse is a fixed point.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import jsonschema
import numpy as np

from .errors import ScenarioError, ValidationError
from .frame_algebra import FrameId, FrameSuperposition
from .schrodinger import EvolutionParams, Potential
from .transforms import EuclideanTransform, rotation_2d, rotation_axis_angle
from .wavefield import GridSpec, WaveField, gaussian, spike

_number = {"type": "number"}
_vector = {"type": "array", "items": _number, "minItems": 1, "maxItems": 3}

SCHEMA: dict[str, Any] = {
    "type": "object",
    "additionalProperties": False,
    "required": ["dimension", "frames", "superpositions"],
    "properties": {
        "dimension": {"enum": [2, 3]},
        "frames": {"type": "array", "items": {"type": "string", "minLength": 1}, "minItems": 2,
                   "uniqueItems": True},
        "superpositions": {
            "type": "array",
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["source", "target", "terms"],
                "properties": {
                    "source": {"type": "string", "minLength": 1},
                    "target": {"type": "string", "minLength": 1},
                    "terms": {
                        "type": "array",
                        "minItems": 1,
                        "items": {
                            "type": "object",
                            "additionalProperties": False,
                            "required": ["amplitude"],
                            "properties": {
                                "rotation": {
                                    "type": "object",
                                    "additionalProperties": False,
                                    "properties": {
                                        "angle_deg": _number,
                                        "axis": {"type": "array", "items": _number,
                                                 "minItems": 3, "maxItems": 3},
                                        "matrix": {"type": "array",
                                                   "items": {"type": "array", "items": _number}},
                                    },
                                },
                                "translation": _vector,
                                "amplitude": {
                                    "type": "object",
                                    "additionalProperties": False,
                                    "required": ["re", "im"],
                                    "properties": {"re": _number, "im": _number},
                                },
                            },
                        },
                    },
                },
            },
        },
        "initial_state": {
            "type": "object",
            "additionalProperties": False,
            "required": ["kind", "grid"],
            "properties": {
                "kind": {"enum": ["gaussian", "spike", "coherent"]},
                "grid": {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["n", "extent"],
                    "properties": {
                        "n": {"type": "array", "items": {"type": "integer", "minimum": 2},
                              "minItems": 2, "maxItems": 2},
                        "extent": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0},
                                   "minItems": 2, "maxItems": 2},
                    },
                },
                "center": _vector,
                "momentum": _vector,
                "width": {"type": "number", "exclusiveMinimum": 0},
                "omega": {"type": "number", "exclusiveMinimum": 0},
                "node": {"type": "array", "items": {"type": "integer", "minimum": 0},
                         "minItems": 2, "maxItems": 2},
            },
        },
        "potential": {
            "type": "object",
            "additionalProperties": False,
            "required": ["kind"],
            "properties": {
                "kind": {"enum": ["free", "isotropic_harmonic", "anisotropic_harmonic",
                                  "pairwise_central"]},
                "omega": {"oneOf": [{"type": "number"},
                                    {"type": "array", "items": _number, "minItems": 1}]},
                "r": {"type": "array", "items": _number},
                "v": {"type": "array", "items": _number},
                "negative_control": {"type": "boolean"},
            },
        },
        "evolution": {
            "type": "object",
            "additionalProperties": False,
            "required": ["dt", "steps"],
            "properties": {
                "dt": {"type": "number", "exclusiveMinimum": 0},
                "steps": {"type": "integer", "minimum": 0},
                "masses": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0}},
            },
        },
        "seed": {"type": "integer", "minimum": 0, "maximum": 2 ** 64 - 1},
        "outputs": {"type": "array", "items": {"enum": ["report", "fields"]}},
    },
}


@dataclass(frozen=True)
class TermSpec:
    """One superposition term as written in the file."""

    amplitude: complex
    translation: tuple[float, ...]
    angle_deg: float | None = None
    axis: tuple[float, ...] | None = None
    matrix: tuple[tuple[float, ...], ...] | None = None

    @property
    def angle(self) -> float:
        return math.radians(self.angle_deg or 0.0)

    def transform(self, dim: int) -> EuclideanTransform:
        if self.matrix is not None:
            rot = np.array(self.matrix, dtype=float)
        elif dim == 2:
            if self.axis is not None:
                raise ValidationError("2-D rotations take angle_deg only, not an axis")
            rot = rotation_2d(self.angle)
        elif self.angle_deg is None:
            rot = np.eye(3)
        else:
            if self.axis is None:
                raise ValidationError("3-D rotations need an axis")
            rot = rotation_axis_angle(self.angle, self.axis)
        trans = self.translation if self.translation else (0.0,) * dim
        if len(trans) != dim or rot.shape != (dim, dim):
            raise ValidationError(f"term does not match dimension {dim}")
        return EuclideanTransform(rot, trans)

    def to_json(self) -> dict:
        out: dict[str, Any] = {}
        rot: dict[str, Any] = {}
        if self.matrix is not None:
            rot["matrix"] = [list(r) for r in self.matrix]
        if self.angle_deg is not None:
            rot["angle_deg"] = self.angle_deg
        if self.axis is not None:
            rot["axis"] = list(self.axis)
        if rot:
            out["rotation"] = rot
        if self.translation:
            out["translation"] = list(self.translation)
        out["amplitude"] = {"re": self.amplitude.real, "im": self.amplitude.imag}
        return out


@dataclass(frozen=True)
class SuperpositionSpec:
    source: str
    target: str
    terms: tuple[TermSpec, ...]

    def build(self, dim: int) -> FrameSuperposition:
        return FrameSuperposition(self.source, self.target,
                                  [(t.transform(dim), t.amplitude) for t in self.terms])


@dataclass(frozen=True, eq=False)
class ScenarioConfig:
    dimension: int
    frames: tuple[FrameId, ...]
    specs: tuple[SuperpositionSpec, ...]
    superpositions: tuple[FrameSuperposition, ...]
    initial_state: dict | None = None
    potential: Potential | None = None
    negative_control: bool = False
    evolution: EvolutionParams | None = None
    seed: int = 0
    outputs: tuple[str, ...] = ("report",)
    source_path: str | None = field(default=None, compare=False)

    def find(self, source: str, target: str) -> FrameSuperposition | None:
        for s in self.superpositions:
            if (s.source.label, s.target.label) == (source, target):
                return s
        return None

    @property
    def field_capable(self) -> bool:
        return (self.dimension == 2 and self.initial_state is not None
                and self.potential is not None and self.evolution is not None)

    def grid(self) -> GridSpec:
        g = self.initial_state["grid"]
        return GridSpec(tuple(g["n"]), tuple(g["extent"]))

    def initial_field(self) -> WaveField:
        st = self.initial_state
        grid = self.grid()
        if st["kind"] == "spike":
            return spike(grid, st.get("node", [n // 2 for n in grid.n]))
        center = st.get("center", [0.0, 0.0])
        momentum = st.get("momentum", [0.0, 0.0])
        width = st.get("width", 1.0)
        if st["kind"] == "coherent":
            width = 1.0 / math.sqrt(st.get("omega", self.potential.omega if self.potential else 1.0))
        return gaussian(grid, center, width, momentum)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ScenarioConfig):
            return NotImplemented
        return serialize(self) == serialize(other)

    __hash__ = None


def _line_of(text: str, path) -> int | None:
    """Best-effort line number of the JSON node at ``path`` (keys and indices)."""
    pos = 0
    found = None
    for part in path:
        if isinstance(part, str):
            i = text.find(f'"{part}"', pos)
            if i < 0:
                break
            pos = i + 1
            found = i
    if found is None:
        return None
    return text.count("\n", 0, found) + 1


def _schema_error(err: jsonschema.ValidationError, text: str | None) -> ScenarioError:
    path = list(err.absolute_path)
    key = next((p for p in reversed(path) if isinstance(p, str)), "<root>")
    if err.validator == "required":
        missing = err.message.split("'")[1] if "'" in err.message else "?"
        key = missing
    elif err.validator == "additionalProperties":
        extra = err.message.split("'")[1] if "'" in err.message else "?"
        key = extra
        path = path + [extra]
    line = _line_of(text, path) if text else None
    where = f" (line {line})" if line else ""
    dotted = ".".join(str(p) for p in err.absolute_path) or "<root>"
    return ScenarioError(f"invalid scenario key '{key}' at {dotted}{where}: {err.message}")


def _term(raw: dict) -> TermSpec:
    rot = raw.get("rotation", {})
    amp = raw["amplitude"]
    return TermSpec(
        amplitude=complex(amp["re"], amp["im"]),
        translation=tuple(float(x) for x in raw.get("translation", ())),
        angle_deg=float(rot["angle_deg"]) if "angle_deg" in rot else None,
        axis=tuple(float(x) for x in rot["axis"]) if "axis" in rot else None,
        matrix=tuple(tuple(float(x) for x in r) for r in rot["matrix"]) if "matrix" in rot else None,
    )


def load_scenario(data: dict, text: str | None = None, source_path: str | None = None) -> ScenarioConfig:
    """Validate a decoded scenario document and build every superposition."""
    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(validator.iter_errors(data), key=lambda e: list(map(str, e.absolute_path)))
    if errors:
        raise _schema_error(errors[0], text)
    dim = data["dimension"]
    frames = tuple(FrameId(f) for f in data["frames"])
    labels = {f.label for f in frames}
    specs = []
    for i, raw in enumerate(data["superpositions"]):
        for end in ("source", "target"):
            if raw[end] not in labels:
                raise ScenarioError(f"superpositions.{i}.{end}: unknown frame {raw[end]!r}")
        specs.append(SuperpositionSpec(raw["source"], raw["target"], tuple(_term(t) for t in raw["terms"])))
    sups = tuple(s.build(dim) for s in specs)
    pot_raw = data.get("potential")
    potential = None
    if pot_raw is not None:
        kind = pot_raw["kind"]
        omega = pot_raw.get("omega", 1.0)
        if kind == "anisotropic_harmonic":
            potential = Potential.anisotropic_harmonic(np.atleast_1d(omega).tolist())
        elif kind == "pairwise_central":
            potential = Potential.pairwise_central(pot_raw.get("r", ()), pot_raw.get("v", ()))
        elif kind == "isotropic_harmonic":
            if isinstance(omega, list):
                raise ScenarioError("potential.omega must be a number for isotropic_harmonic")
            potential = Potential.isotropic_harmonic(omega)
        else:
            potential = Potential.free()
    evo_raw = data.get("evolution")
    evolution = None
    if evo_raw is not None:
        evolution = EvolutionParams(evo_raw["dt"], evo_raw["steps"], tuple(evo_raw.get("masses", ())))
    state = data.get("initial_state")
    if state is not None:
        GridSpec(tuple(state["grid"]["n"]), tuple(state["grid"]["extent"]))
        state = json.loads(json.dumps(state))
    return ScenarioConfig(
        dimension=dim,
        frames=frames,
        specs=tuple(specs),
        superpositions=sups,
        initial_state=state,
        potential=potential,
        negative_control=bool(pot_raw.get("negative_control", False)) if pot_raw else False,
        evolution=evolution,
        seed=int(data.get("seed", 0)),
        outputs=tuple(data.get("outputs", ["report"])),
        source_path=source_path,
    )


def parse_scenario(path: str | Path) -> ScenarioConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(
            f"{path}: malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return load_scenario(data, text, str(path))


def serialize(cfg: ScenarioConfig) -> dict:
    out: dict[str, Any] = {
        "dimension": cfg.dimension,
        "frames": [f.label for f in cfg.frames],
        "superpositions": [
            {"source": s.source, "target": s.target, "terms": [t.to_json() for t in s.terms]}
            for s in cfg.specs
        ],
    }
    if cfg.initial_state is not None:
        out["initial_state"] = cfg.initial_state
    if cfg.potential is not None:
        pot = cfg.potential.describe()
        if cfg.negative_control:
            pot["negative_control"] = True
        out["potential"] = pot
    if cfg.evolution is not None:
        evo: dict[str, Any] = {"dt": cfg.evolution.dt, "steps": cfg.evolution.steps}
        if cfg.evolution.masses:
            evo["masses"] = list(cfg.evolution.masses)
        out["evolution"] = evo
    out["seed"] = cfg.seed
    out["outputs"] = list(cfg.outputs)
    return out


def dumps(cfg: ScenarioConfig) -> str:
    return json.dumps(serialize(cfg), indent=2, sort_keys=True) + "\n"
