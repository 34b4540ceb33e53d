"""Scenario files, run manifests and preset registry.

Scenarios are flat INI-style text (human-diffable research artifacts);
manifests are JSON snapshots of a fully resolved run, embedded in every
CSV header so each output file reproduces itself.
"""
from __future__ import annotations

import configparser
import dataclasses
import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .model import ModelParams, MalformedDelaySpec

SCHEMA_VERSION = 1


class ScenarioError(ValueError):
    pass


class ParseError(ScenarioError):
    pass


class UnknownKey(ScenarioError):
    pass


class VersionMismatch(ScenarioError):
    pass


class ConflictingDelaySpec(ScenarioError):
    pass


_MODEL_KEYS = {
    "omega0", "eps_abs", "eps_phase", "gamma1", "gamma2", "gamma3",
    "gamma_f", "phi", "theta", "theta_opt", "tau", "scale_s", "delta",
    "eps_at_threshold", "eps_above_threshold",
}
_GRID_KEYS = {"omega_min", "omega_max", "omega_points"}
_MAP_KEYS = {"g1tau_min", "g1tau_max", "g1tau_points",
             "alpha_min", "alpha_max", "alpha_points", "interference"}
_SPECTRUM_KEYS = {"eta", "compare_markovian", "both_delta"}
_SECTIONS = {
    "scenario": {"schema_version"},
    "model": _MODEL_KEYS,
    "grid": _GRID_KEYS,
    "map": _MAP_KEYS,
    "spectrum": _SPECTRUM_KEYS,
}


@dataclass(frozen=True)
class GridSpec:
    omega_min: float | None = None
    omega_max: float | None = None
    omega_points: int = 2001

    def to_dict(self):
        return dataclasses.asdict(self)


@dataclass(frozen=True)
class MapSpec:
    g1tau_min: float = 0.05
    g1tau_max: float = 50.0
    g1tau_points: int = 121
    alpha_min: float = -1.0
    alpha_max: float = 4.0
    alpha_points: int = 201
    interference: str = "constructive"

    def to_dict(self):
        return dataclasses.asdict(self)


@dataclass(frozen=True)
class Scenario:
    """Parsed scenario file before CLI overrides are applied.  The pump
    may be deferred ('at threshold' or an offset above it), in which
    case resolve_pump fills eps_abs from the loss rates."""

    model: dict
    grid: GridSpec | None = None
    map_grid: MapSpec | None = None
    eta: float = 1e-6
    compare_markovian: bool = False
    both_delta: bool = False

    def resolve_pump(self) -> dict:
        d = dict(self.model)
        at_thr = d.pop("eps_at_threshold", False)
        above = d.pop("eps_above_threshold", None)
        if sum([at_thr, above is not None, "eps_abs" in d]) != 1:
            raise ScenarioError(
                "specify exactly one of eps_abs, eps_at_threshold, "
                "eps_above_threshold")
        if at_thr or above is not None:
            thr = (d.get("gamma2", 0.0) + d.get("gamma3", 0.0)) / 2.0
            d["eps_abs"] = (1.0 - self.eta) * thr if at_thr else thr + above
        return d

    def model_params(self) -> ModelParams:
        return ModelParams.from_dict(self.resolve_pump())


def _coerce(section: str, key: str, raw: str):
    if key in ("omega_points", "delta", "g1tau_points", "alpha_points",
               "schema_version"):
        return int(raw)
    if key in ("theta_opt", "eps_at_threshold", "compare_markovian",
               "both_delta"):
        low = raw.strip().lower()
        if low in ("true", "yes", "1", "on"):
            return True
        if low in ("false", "no", "0", "off"):
            return False
        raise ParseError(f"[{section}] {key}: expected a boolean, got {raw!r}")
    if key == "interference":
        return raw.strip().lower()
    try:
        return float(raw)
    except ValueError as exc:
        raise ParseError(f"[{section}] {key}: {exc}") from exc


def load_scenario(path) -> Scenario:
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"),
                                   interpolation=None)
    try:
        with open(path) as fh:
            cp.read_file(fh, source=str(path))
    except OSError:
        raise
    except configparser.Error as exc:
        raise ParseError(str(exc)) from exc
    return parse_scenario(cp, source=str(path))


def loads_scenario(text: str, source: str = "<string>") -> Scenario:
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"),
                                   interpolation=None)
    try:
        cp.read_string(text, source=source)
    except configparser.Error as exc:
        raise ParseError(str(exc)) from exc
    return parse_scenario(cp, source=source)


def parse_scenario(cp: configparser.ConfigParser, source: str) -> Scenario:
    for section in cp.sections():
        if section not in _SECTIONS:
            raise UnknownKey(f"{source}: unknown section [{section}]")
        for key in cp[section]:
            if key not in _SECTIONS[section]:
                raise UnknownKey(f"{source}: unknown key {key!r} in [{section}]")

    if "scenario" not in cp or "schema_version" not in cp["scenario"]:
        raise VersionMismatch(f"{source}: missing [scenario] schema_version")
    version = int(cp["scenario"]["schema_version"])
    if version != SCHEMA_VERSION:
        raise VersionMismatch(
            f"{source}: schema_version {version} != supported {SCHEMA_VERSION}; "
            "re-save the scenario with the current release")

    model: dict = {}
    if "model" in cp:
        for key, raw in cp["model"].items():
            name = "scale_S" if key == "scale_s" else key
            model[name] = _coerce("model", key, raw)
    if "tau" in model and ("scale_S" in model or "delta" in model):
        raise ConflictingDelaySpec(
            f"{source}: both raw tau and a scaled delay block given")

    grid = None
    if "grid" in cp:
        grid = GridSpec(**{k: _coerce("grid", k, v) for k, v in cp["grid"].items()})
    map_grid = None
    if "map" in cp:
        map_grid = MapSpec(**{k: _coerce("map", k, v) for k, v in cp["map"].items()})

    spec = {k: _coerce("spectrum", k, v) for k, v in cp["spectrum"].items()} \
        if "spectrum" in cp else {}
    return Scenario(model=model, grid=grid, map_grid=map_grid,
                    eta=spec.get("eta", 1e-6),
                    compare_markovian=spec.get("compare_markovian", False),
                    both_delta=spec.get("both_delta", False))


def save_scenario(scn: Scenario, path) -> None:
    lines = ["[scenario]", f"schema_version = {SCHEMA_VERSION}", "", "[model]"]
    for key in sorted(scn.model):
        name = key  # keep canonical case on disk
        lines.append(f"{name} = {_fmt(scn.model[key])}")
    if scn.grid is not None:
        lines += ["", "[grid]"]
        for k, v in scn.grid.to_dict().items():
            if v is not None:
                lines.append(f"{k} = {_fmt(v)}")
    if scn.map_grid is not None:
        lines += ["", "[map]"]
        for k, v in scn.map_grid.to_dict().items():
            lines.append(f"{k} = {_fmt(v)}")
    lines += ["", "[spectrum]", f"eta = {_fmt(scn.eta)}",
              f"compare_markovian = {_fmt(scn.compare_markovian)}",
              f"both_delta = {_fmt(scn.both_delta)}", ""]
    Path(path).write_text("\n".join(lines))


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


# ---------------------------------------------------------------------------
# Run manifests


@dataclass(frozen=True)
class RunManifest:
    """Everything needed to reproduce one CLI run byte-for-byte."""

    subcommand: str
    model: dict
    schema_version: int = SCHEMA_VERSION
    grid: dict | None = None
    map_grid: dict | None = None
    eta: float = 1e-6
    theta_mode: str = "fixed"
    compare_markovian: bool = False
    with_oracle: bool = False
    plot: bool = False
    outputs: tuple = ()
    dde: dict | None = None

    def to_json(self) -> str:
        d = dataclasses.asdict(self)
        d["outputs"] = list(self.outputs)
        return json.dumps(d, sort_keys=True)


def save_manifest(manifest: RunManifest, path) -> None:
    Path(path).write_text(
        json.dumps(json.loads(manifest.to_json()), sort_keys=True, indent=2)
        + "\n")


def load_manifest(path) -> RunManifest:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    version = data.get("schema_version")
    if version != SCHEMA_VERSION:
        raise VersionMismatch(
            f"{path}: manifest schema_version {version} != supported "
            f"{SCHEMA_VERSION}; regenerate the manifest with this release")
    data["outputs"] = tuple(data.get("outputs", ()))
    return RunManifest(**data)


# ---------------------------------------------------------------------------
# Presets (one checked-in scenario file per figure)

PRESET_NAMES = ("fig3", "fig4", "fig5-g05", "fig5-g3", "fig5-g9",
                "fig2a-map", "fig2b-map")


def preset_path(name: str):
    if name not in PRESET_NAMES:
        raise ScenarioError(
            f"unknown preset {name!r}; available: {', '.join(PRESET_NAMES)}")
    return resources.files("dpofeedback").joinpath(f"presets/{name}.ini")


def load_preset(name: str) -> Scenario:
    with resources.as_file(preset_path(name)) as p:
        return load_scenario(p)
