"""
JSON run configuration.

Schema (all keys optional unless noted)::

    {
      "name": "fig1a",
      "scenario": {
        "coupling": {"kind": "quadratic", "g0": 1, "lambda": 1, "sign": "+",
                     "params": {...}, "expr": "..."},
        "delta": 0,                      # or "omega" and "omega_q"
        "dims": {"n_cm": 96, "n_field": 4, "guard_cm": 24, "guard_field": 2}
      },
      "initial": {
        "c_e": [1, 0], "c_g": [0, 0],    # complex values as [re, im]
        "beta": [re, im],                # or "z0" and "p0"
        "field": {"kind": "fock", "value": 0}   # or coherent, value [re, im]
      },
      "times": {"start": 0, "stop": 6, "steps": 120},   # steps = intervals
      "units": {"g_hz": 16e6, "mass_u": 85},
      "method": "all",                   # oracle | decomposed | analytic | all
      "output": "out/fig1a",
      "q_function": {"times": [0, 3, 6], "points": 101},
      "variants": [{"label": "g_plus", "coupling": {"sign": "+"}}, ...]
    }

Every variant is the base config with its ``coupling`` and ``initial``
entries merged over the base ones. Without ``variants`` the run has one
variant labelled ``main``.
"""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any

import numpy as np
from scipy import constants

from .coupling import CouplingSpec
from .dynamics import ScenarioParams
from .hilbert import SpaceDims
from .observables import InitialStateSpec, UnitSystem

METHODS = ("oracle", "decomposed", "analytic")
BUNDLED = ("fig1a", "fig1b", "fig2")

_TOP_KEYS = {"name", "scenario", "initial", "times", "units", "method", "output", "q_function", "variants", "description"}


class ConfigError(ValueError):
    """Validation failure tied to a config field."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


@dataclass(frozen=True)
class QFunctionRequest:
    times: tuple[float, ...] = ()
    points: int = 101


@dataclass(frozen=True)
class Variant:
    label: str
    scenario: ScenarioParams
    initial: InitialStateSpec


@dataclass(frozen=True)
class RunConfig:
    name: str
    variants: tuple[Variant, ...]
    units: UnitSystem = field(default_factory=UnitSystem)
    method: str = "decomposed"
    output: Path = Path("out")
    q_function: QFunctionRequest = field(default_factory=QFunctionRequest)
    raw: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def methods(self) -> tuple[str, ...]:
        return METHODS if self.method == "all" else (self.method,)

    @property
    def scenario(self) -> ScenarioParams:
        return self.variants[0].scenario

    @property
    def initial(self) -> InitialStateSpec:
        return self.variants[0].initial

    def with_method(self, method: str) -> "RunConfig":
        raw = copy.deepcopy(self.raw)
        raw["method"] = method
        return parse_config(raw)

    def with_dims(self, n_cm: int, n_field: int) -> "RunConfig":
        raw = copy.deepcopy(self.raw)
        dims = raw.setdefault("scenario", {}).setdefault("dims", {})
        dims.pop("guard_cm", None)
        dims.update(n_cm=n_cm, n_field=n_field)
        return parse_config(raw)


def _complex(value, path: str) -> complex:
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2 and all(isinstance(v, (int, float)) for v in value):
        return complex(value[0], value[1])
    raise ConfigError(path, f"expected a number or [re, im], got {value!r}")


def _number(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(path, f"expected a number, got {value!r}")
    return float(value)


def _integer(value, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(path, f"expected an integer, got {value!r}")
    return value


def _mapping(value, path: str, allowed: set[str]) -> dict:
    if value is None:
        return {}
    if not isinstance(value, dict):
        raise ConfigError(path, f"expected an object, got {type(value).__name__}")
    extra = sorted(set(value) - allowed)
    if extra:
        raise ConfigError(f"{path}.{extra[0]}", f"unknown key (allowed: {', '.join(sorted(allowed))})")
    return value


def _merge(base: dict, over: dict) -> dict:
    out = copy.deepcopy(base)
    for key, val in over.items():
        if isinstance(val, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], val)
        else:
            out[key] = copy.deepcopy(val)
    return out


def _coupling(d: dict, path: str) -> CouplingSpec:
    d = _mapping(d, path, {"kind", "g0", "lambda", "lam", "sign", "params", "expr"})
    kw: dict[str, Any] = {}
    if "kind" in d:
        kw["kind"] = d["kind"]
    for key in ("g0", "lambda", "lam"):
        if key in d:
            kw["lam" if key != "g0" else "g0"] = _number(d[key], f"{path}.{key}")
    if "sign" in d:
        kw["sign"] = d["sign"]
    if "params" in d:
        params = _mapping(d["params"], f"{path}.params", {"width", "wavenumber"})
        kw["params"] = {k: _number(v, f"{path}.params.{k}") for k, v in params.items()}
    if "expr" in d:
        kw["expr"] = d["expr"]
    try:
        return CouplingSpec(**kw)
    except ValueError as exc:
        raise ConfigError(path, str(exc)) from exc


def _dims(d: dict, path: str) -> SpaceDims:
    d = _mapping(d, path, {"n_cm", "n_field", "guard_cm", "guard_field"})
    kw = {k: _integer(v, f"{path}.{k}") for k, v in d.items()}
    kw.setdefault("n_cm", 48)
    kw.setdefault("n_field", 8)
    try:
        return SpaceDims(**kw)
    except ValueError as exc:
        raise ConfigError(path, str(exc)) from exc


def _times(d: dict, path: str) -> np.ndarray:
    d = _mapping(d, path, {"start", "stop", "steps"})
    start = _number(d.get("start", 0.0), f"{path}.start")
    stop = _number(d.get("stop", 6.0), f"{path}.stop")
    steps = _integer(d.get("steps", 120), f"{path}.steps")
    if steps < 1:
        raise ConfigError(f"{path}.steps", "must be >= 1")
    if stop <= start:
        raise ConfigError(f"{path}.stop", "must exceed start")
    if start < 0:
        raise ConfigError(f"{path}.start", "must be >= 0")
    return np.linspace(start, stop, steps + 1)


def _scenario(d: dict, times: np.ndarray, path: str) -> ScenarioParams:
    d = _mapping(d, path, {"coupling", "delta", "omega", "omega_q", "dims"})
    coupling = _coupling(d.get("coupling", {}), f"{path}.coupling")
    dims = _dims(d.get("dims", {}), f"{path}.dims")
    kw: dict[str, Any] = {}
    if "delta" in d:
        kw["delta"] = _number(d["delta"], f"{path}.delta")
    for key in ("omega", "omega_q"):
        if key in d:
            kw[key] = _number(d[key], f"{path}.{key}")
    if ("omega" in kw) != ("omega_q" in kw):
        raise ConfigError(path, "omega and omega_q must be given together")
    if "delta" in kw and "omega" in kw:
        raise ConfigError(f"{path}.delta", "give either delta or omega/omega_q, not both")
    try:
        return ScenarioParams(coupling, dims, times=times, **kw)
    except ValueError as exc:
        raise ConfigError(path, str(exc)) from exc


def _initial(d: dict, path: str) -> InitialStateSpec:
    d = _mapping(d, path, {"c_e", "c_g", "beta", "z0", "p0", "field"})
    kw: dict[str, Any] = {}
    for key in ("c_e", "c_g"):
        if key in d:
            kw[key] = _complex(d[key], f"{path}.{key}")
    if "beta" in d and ("z0" in d or "p0" in d):
        raise ConfigError(f"{path}.beta", "give either beta or z0/p0, not both")
    if "beta" in d:
        kw["beta"] = _complex(d["beta"], f"{path}.beta")
    elif "z0" in d or "p0" in d:
        z0 = _number(d.get("z0", 0.0), f"{path}.z0")
        p0 = _number(d.get("p0", 0.0), f"{path}.p0")
        kw["beta"] = (z0 + 1j * p0) / np.sqrt(2)
    fld = _mapping(d.get("field", {}), f"{path}.field", {"kind", "value"})
    kind = fld.get("kind", "fock")
    kw["field_kind"] = kind
    if kind == "fock":
        kw["field_value"] = _integer(fld.get("value", 0), f"{path}.field.value")
    elif kind == "coherent":
        kw["field_value"] = _complex(fld.get("value", 0), f"{path}.field.value")
    else:
        raise ConfigError(f"{path}.field.kind", f"expected 'fock' or 'coherent', got {kind!r}")
    try:
        return InitialStateSpec(**kw)
    except ValueError as exc:
        raise ConfigError(path, str(exc)) from exc


def _units(d: dict, path: str) -> UnitSystem:
    d = _mapping(d, path, {"g_hz", "mass_u", "mass_kg"})
    kw = {}
    if "g_hz" in d:
        kw["g_hz"] = _number(d["g_hz"], f"{path}.g_hz")
    if "mass_u" in d and "mass_kg" in d:
        raise ConfigError(path, "give either mass_u or mass_kg")
    if "mass_u" in d:
        kw["mass_kg"] = _number(d["mass_u"], f"{path}.mass_u") * constants.atomic_mass
    if "mass_kg" in d:
        kw["mass_kg"] = _number(d["mass_kg"], f"{path}.mass_kg")
    try:
        return UnitSystem(**kw)
    except ValueError as exc:
        raise ConfigError(path, str(exc)) from exc


def _check_analytic(v: Variant, path: str) -> None:
    if v.scenario.delta != 0:
        raise ConfigError(f"{path}.scenario.delta", "method 'analytic' needs delta = 0")
    if v.scenario.coupling.kind != "quadratic":
        raise ConfigError(f"{path}.scenario.coupling.kind", "method 'analytic' needs a quadratic coupling")


def parse_config(raw: dict) -> RunConfig:
    """Validate a decoded JSON document into a :class:`RunConfig`."""
    raw = _mapping(raw, "config", _TOP_KEYS)
    name = raw.get("name", "run")
    if not isinstance(name, str) or not name:
        raise ConfigError("name", "expected a non-empty string")
    method = raw.get("method", "decomposed")
    if method not in METHODS + ("all",):
        raise ConfigError("method", f"expected one of {METHODS + ('all',)}, got {method!r}")
    times = _times(raw.get("times", {}), "times")
    units = _units(raw.get("units", {}), "units")
    q = _mapping(raw.get("q_function", {}), "q_function", {"times", "points"})
    q_times = q.get("times", [])
    if not isinstance(q_times, list):
        raise ConfigError("q_function.times", "expected a list")
    qreq = QFunctionRequest(
        tuple(_number(t, f"q_function.times[{i}]") for i, t in enumerate(q_times)),
        _integer(q.get("points", 101), "q_function.points"),
    )
    base_scn = raw.get("scenario", {})
    base_ini = raw.get("initial", {})
    var_list = raw.get("variants") or [{"label": "main"}]
    if not isinstance(var_list, list):
        raise ConfigError("variants", "expected a list")
    variants = []
    labels = set()
    for i, v in enumerate(var_list):
        path = f"variants[{i}]"
        v = _mapping(v, path, {"label", "coupling", "initial"})
        label = v.get("label", f"v{i}")
        if not isinstance(label, str) or not label.replace("_", "").replace("-", "").isalnum():
            raise ConfigError(f"{path}.label", f"labels must be alphanumeric (with _ or -), got {label!r}")
        if label in labels:
            raise ConfigError(f"{path}.label", f"duplicate label {label!r}")
        labels.add(label)
        scn = _merge(base_scn, {"coupling": v["coupling"]}) if "coupling" in v else base_scn
        ini = _merge(base_ini, v.get("initial", {}))
        var = Variant(label, _scenario(scn, times, "scenario"), _initial(ini, "initial"))
        if method in ("analytic", "all"):
            _check_analytic(var, path)
        variants.append(var)
    output = raw.get("output", f"out/{name}")
    if not isinstance(output, str):
        raise ConfigError("output", "expected a path string")
    return RunConfig(name, tuple(variants), units, method, Path(output), qreq, copy.deepcopy(raw))


def load_config(source: str | Path) -> RunConfig:
    """Load a config file, or a bundled config by name (``fig1a``, ``fig1b``, ``fig2``)."""
    path = Path(source)
    if not path.exists() and str(source) in BUNDLED:
        text = resources.files("ultracold_jc.configs").joinpath(f"{source}.json").read_text()
    else:
        try:
            text = path.read_text()
        except OSError as exc:
            raise ConfigError("config", f"cannot read {source}: {exc.strerror}") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("config", f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return parse_config(raw)
