"""Run configuration: a single JSON document, validated into dataclasses."""

from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .potentials import CUTOFF, PotentialModel, UnitSystem

TASKS = ("observables", "wavefunction", "bound-states", "verify")
FORMATS = ("csv", "json")


class ConfigError(ValueError):
    """Invalid run configuration; ``where`` names the field or source line."""

    def __init__(self, where: str, message: str):
        super().__init__(f"{where}: {message}")
        self.where = where


@dataclass(frozen=True)
class SweepConfig:
    k_min: float
    k_max: float
    n_k: int = 1
    spacing: str = "linear"


@dataclass(frozen=True)
class SolverConfig:
    n_grid: int = 200
    map_scale: float | None = None
    tolerances: dict = field(default_factory=lambda: {
        "unitarity": 1e-8, "optical": 1e-8, "rt": 1e-8, "sigma": 1e-10})


@dataclass(frozen=True)
class BoundConfig:
    E_min: float = -10.0
    E_max: float = -1e-4
    n_scan: int = 200
    n_grid: int = 96


@dataclass(frozen=True)
class WavefunctionConfig:
    k: tuple = ()
    x_min: float | None = None
    x_max: float | None = None
    n_x: int = 601


@dataclass(frozen=True)
class OutputConfig:
    directory: str = "results"
    formats: tuple = ("csv", "json")
    precision: int = 17


@dataclass(frozen=True)
class RunConfig:
    potential: PotentialModel
    sweep: SweepConfig
    solver: SolverConfig
    tasks: tuple
    output: OutputConfig
    bound_states: BoundConfig = BoundConfig()
    wavefunction: WavefunctionConfig = WavefunctionConfig()
    source: dict = field(default_factory=dict, repr=False, compare=False)


def load_document(path) -> dict:
    """Read the JSON document; syntax errors report line and column."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"line {exc.lineno}, column {exc.colno}", exc.msg) from exc
    if not isinstance(doc, dict):
        raise ConfigError("document", "top level must be a JSON object")
    return doc


def apply_overrides(doc: dict, overrides) -> dict:
    """Apply ``path=value`` overrides; values parse as JSON when possible."""
    doc = copy.deepcopy(doc)
    for item in overrides or ():
        if "=" not in item:
            raise ConfigError(f"--set {item}", "expected path=value")
        path, raw = item.split("=", 1)
        keys = [k for k in path.strip().split(".") if k]
        if not keys:
            raise ConfigError(f"--set {item}", "empty field path")
        try:
            value = json.loads(raw)
        except json.JSONDecodeError:
            value = raw
        node = doc
        for key in keys[:-1]:
            child = node.get(key)
            if child is None:
                child = node[key] = {}
            if not isinstance(child, dict):
                raise ConfigError(path, f"'{key}' is not an object")
            node = child
        node[keys[-1]] = value
    return doc


def _number(block: dict, key: str, where: str, default=None, positive=False, integer=False):
    if key not in block:
        if default is None:
            raise ConfigError(f"{where}.{key}", "required field missing")
        return default
    value = block[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where}.{key}", f"expected a number, got {value!r}")
    if integer:
        if int(value) != value:
            raise ConfigError(f"{where}.{key}", f"expected an integer, got {value!r}")
        value = int(value)
    if not math.isfinite(value):
        raise ConfigError(f"{where}.{key}", "must be finite")
    if positive and value <= 0:
        raise ConfigError(f"{where}.{key}", f"must be positive, got {value!r}")
    return value


def _block(doc: dict, key: str, required=False) -> dict:
    if key not in doc:
        if required:
            raise ConfigError(key, "required block missing")
        return {}
    block = doc[key]
    if not isinstance(block, dict):
        raise ConfigError(key, "must be a JSON object")
    return block


def parse_potential(block: dict, base_dir: Path | None = None) -> PotentialModel:
    where = "potential"
    kind = block.get("kind")
    cutoff = _number(block, "cutoff", where, CUTOFF, positive=True)
    if kind == "delta":
        if "v0" in block:
            units = UnitSystem(_number(block, "mass", where, 1.0, positive=True),
                               _number(block, "hbar", where, 1.0, positive=True))
            return PotentialModel.delta(units.to_reduced_strength(_number(block, "v0", where)))
        return PotentialModel.delta(_number(block, "strength", where))
    if kind == "square_well":
        return PotentialModel.square_well(_number(block, "depth", where),
                                          _number(block, "half_width", where, positive=True))
    if kind == "gaussian":
        return PotentialModel.gaussian(_number(block, "amplitude", where),
                                       _number(block, "width", where, positive=True), cutoff)
    if kind == "exponential":
        return PotentialModel.exponential(_number(block, "amplitude", where),
                                          _number(block, "decay", where, positive=True), cutoff)
    if kind == "tabulated":
        if "file" in block:
            path = Path(block["file"])
            if base_dir is not None and not path.is_absolute():
                path = base_dir / path
            try:
                data = np.loadtxt(path, delimiter=",", comments="#", ndmin=2)
            except (OSError, ValueError) as exc:
                raise ConfigError(f"{where}.file", f"cannot read samples: {exc}") from exc
            r, v = data[:, 0], data[:, 1]
        else:
            if "r" not in block or "v" not in block:
                raise ConfigError(where, "tabulated potential needs 'r' and 'v' arrays or 'file'")
            r, v = block["r"], block["v"]
        try:
            return PotentialModel.tabulated(r, v, cutoff)
        except ValueError as exc:
            raise ConfigError(where, str(exc)) from exc
    raise ConfigError(f"{where}.kind", f"unknown potential kind {kind!r}")


def parse_config(doc: dict, base_dir: Path | None = None) -> RunConfig:
    """Validate a raw document into a :class:`RunConfig`."""
    potential = parse_potential(_block(doc, "potential", required=True), base_dir)

    sw = _block(doc, "sweep", required=True)
    k_min = _number(sw, "k_min", "sweep", positive=True)
    n_k = _number(sw, "n_k", "sweep", 1, integer=True)
    if n_k < 1:
        raise ConfigError("sweep.n_k", "must be at least 1")
    k_max = _number(sw, "k_max", "sweep", k_min, positive=True)
    if k_max < k_min:
        raise ConfigError("sweep.k_max", "must not be below k_min")
    spacing = sw.get("spacing", "linear")
    if spacing not in ("linear", "log"):
        raise ConfigError("sweep.spacing", f"expected 'linear' or 'log', got {spacing!r}")
    sweep = SweepConfig(k_min, k_max, n_k, spacing)

    so = _block(doc, "solver")
    n_grid = _number(so, "n_grid", "solver", 200, integer=True)
    if n_grid < 8:
        raise ConfigError("solver.n_grid", "must be at least 8")
    map_scale = so.get("map_scale")
    if map_scale is not None:
        map_scale = _number(so, "map_scale", "solver", positive=True)
    tolerances = dict(SolverConfig().tolerances)
    tol_block = so.get("tolerances", {})
    if not isinstance(tol_block, dict):
        raise ConfigError("solver.tolerances", "must be a JSON object")
    for key in tol_block:
        if key not in tolerances:
            raise ConfigError(f"solver.tolerances.{key}", "unknown tolerance")
        tolerances[key] = _number(tol_block, key, "solver.tolerances", positive=True)
    solver = SolverConfig(n_grid, map_scale, tolerances)

    tasks = doc.get("tasks", ["observables"])
    if not isinstance(tasks, list) or not all(isinstance(t, str) for t in tasks):
        raise ConfigError("tasks", "must be a list of task names")
    if not tasks:
        raise ConfigError("tasks", "no tasks requested")
    for task in tasks:
        if task not in TASKS:
            raise ConfigError("tasks", f"unknown task {task!r}; choose from {', '.join(TASKS)}")

    out = _block(doc, "output")
    formats = out.get("formats", ["csv", "json"])
    if not isinstance(formats, list) or not formats:
        raise ConfigError("output.formats", "output formats must be a nonempty list")
    for fmt in formats:
        if fmt not in FORMATS:
            raise ConfigError("output.formats", f"unknown format {fmt!r}")
    precision = _number(out, "precision", "output", 17, integer=True)
    if not 1 <= precision <= 17:
        raise ConfigError("output.precision", "must lie in 1..17")
    directory = out.get("directory", "results")
    if not isinstance(directory, str) or not directory:
        raise ConfigError("output.directory", "must be a nonempty string")
    output = OutputConfig(directory, tuple(dict.fromkeys(formats)), precision)

    bs = _block(doc, "bound_states")
    defaults = BoundConfig()
    E_min = _number(bs, "E_min", "bound_states", defaults.E_min)
    E_max = _number(bs, "E_max", "bound_states", defaults.E_max)
    if not E_min < E_max < 0:
        raise ConfigError("bound_states", "window must satisfy E_min < E_max < 0")
    bound = BoundConfig(E_min, E_max,
                        _number(bs, "n_scan", "bound_states", defaults.n_scan, integer=True),
                        _number(bs, "n_grid", "bound_states", defaults.n_grid, integer=True))

    wf = _block(doc, "wavefunction")
    ks = wf.get("k", [])
    if isinstance(ks, (int, float)) and not isinstance(ks, bool):
        ks = [ks]
    if not isinstance(ks, list):
        raise ConfigError("wavefunction.k", "expected a number or a list of numbers")
    for value in ks:
        if isinstance(value, bool) or not isinstance(value, (int, float)) or value <= 0:
            raise ConfigError("wavefunction.k", f"momenta must be positive numbers, got {value!r}")
    wave = WavefunctionConfig(tuple(float(v) for v in ks),
                              wf.get("x_min"), wf.get("x_max"),
                              _number(wf, "n_x", "wavefunction", 601, integer=True))

    return RunConfig(potential, sweep, solver, tuple(tasks), output, bound, wave, doc)


def load_config(path, overrides=()) -> RunConfig:
    path = Path(path)
    doc = apply_overrides(load_document(path), overrides)
    return parse_config(doc, path.parent)
