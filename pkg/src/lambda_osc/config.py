"""TOML run configuration with strict key checking."""
from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

import numpy as np

from .params import PhysicalParams, thermal_occupancy
from .sweep import AXES, DEFAULT_AXIS, SweepConfig, parse_case

PRESETS = ("fig2", "fig3", "fig4", "fig5")

_PARAM_KEYS = {"omega", "omega23", "omega23_over_2Omega0", "Omega0", "g", "gamma2", "gamma3",
               "gamma", "kappa", "nbar", "reference_rate"}
_SCHEMA = {
    "params": _PARAM_KEYS,
    "thermal": {"omega_si", "T", "hbar_over_kB"},
    "sweep": {"axis", "start", "stop", "points", "values", "case", "conv_tol", "n_max_start",
              "n_max_cap", "jobs"},
    "solver": {"reading", "regime_threshold"},
    "output": {"dir", "name", "format"},
    "validate": {"draws", "n_max", "seed", "tolerance", "ladder_n_max", "ladder_scales"},
}
_REQUIRED_PARAMS = ("omega", "Omega0", "g", "gamma2", "gamma3", "gamma", "kappa")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    params: PhysicalParams
    sweep: SweepConfig
    reading: str = "corrected"
    regime_threshold: float = 5.0
    out_dir: str | None = None
    name: str = "run"
    format: str = "csv"
    validate: dict = field(default_factory=dict)
    source: str | None = None
    defaults_used: list = field(default_factory=list)

    def manifest(self) -> dict:
        s = self.sweep
        return {
            "source": self.source,
            "params": self.params.as_dict(),
            "sweep": {"axis": s.axis, "grid": s.grid, "case": s.case, "conv_tol": s.conv_tol,
                      "n_max_start": s.n_max_start, "n_max_cap": s.n_max_cap, "jobs": s.jobs},
            "solver": {"reading": self.reading, "regime_threshold": self.regime_threshold},
            "validate": self.validate,
            "defaults_used": self.defaults_used,
        }


def _check_keys(doc: dict) -> None:
    for section, body in doc.items():
        if section not in _SCHEMA:
            raise ConfigError(f"unknown section [{section}]; allowed: {sorted(_SCHEMA)}")
        if not isinstance(body, dict):
            raise ConfigError(f"[{section}] must be a table")
        for key in body:
            if key not in _SCHEMA[section]:
                raise ConfigError(f"unknown key '{section}.{key}'; allowed: {sorted(_SCHEMA[section])}")


def _num(section: str, key: str, value) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"'{section}.{key}' must be a number, got {value!r}")
    return float(value)


def _build(doc: dict, source: str | None) -> RunConfig:
    _check_keys(doc)
    defaults = []
    par = dict(doc.get("params", {}))
    par.pop("reference_rate", None)
    missing = [k for k in _REQUIRED_PARAMS if k not in par]
    if missing:
        raise ConfigError(f"missing required key(s) in [params]: {', '.join(missing)}")
    values = {k: _num("params", k, v) for k, v in par.items()}
    if "omega23" in values and "omega23_over_2Omega0" in values:
        raise ConfigError("give only one of 'params.omega23' and 'params.omega23_over_2Omega0'")
    if "omega23_over_2Omega0" in values:
        values["omega23"] = 2.0 * values["Omega0"] * values.pop("omega23_over_2Omega0")
    elif "omega23" not in values:
        values["omega23"] = 0.0
        defaults.append("params.omega23")
    # a direct nbar wins over the thermal table
    if "nbar" not in values:
        th = doc.get("thermal")
        if not th or "omega_si" not in th or "T" not in th:
            raise ConfigError("need 'params.nbar' or [thermal] with omega_si and T")
        kw = {}
        if "hbar_over_kB" in th:
            kw["hbar_over_kB"] = _num("thermal", "hbar_over_kB", th["hbar_over_kB"])
        try:
            values["nbar"] = thermal_occupancy(_num("thermal", "omega_si", th["omega_si"]),
                                               _num("thermal", "T", th["T"]), **kw)
        except ValueError as exc:
            raise ConfigError(f"[thermal]: {exc}") from None
    try:
        params = PhysicalParams(**values)
    except ValueError as exc:
        raise ConfigError(f"[params]: {exc}") from None

    sw = doc.get("sweep", {})
    axis = sw.get("axis", DEFAULT_AXIS)
    if axis not in AXES:
        raise ConfigError(f"'sweep.axis' must be one of {AXES}, got {axis!r}")
    if "values" in sw:
        if any(k in sw for k in ("start", "stop", "points")):
            raise ConfigError("give either 'sweep.values' or start/stop/points")
        grid = [_num("sweep", "values", v) for v in sw["values"]]
    else:
        start = _num("sweep", "start", sw.get("start", 0.0))
        stop = _num("sweep", "stop", sw.get("stop", 2.0))
        points = sw.get("points", 201)
        if not isinstance(points, int) or isinstance(points, bool) or points < 0:
            raise ConfigError(f"'sweep.points' must be a nonnegative integer, got {points!r}")
        for k, v in (("start", 0.0), ("stop", 2.0), ("points", 201)):
            if k not in sw:
                defaults.append(f"sweep.{k}")
        grid = list(np.linspace(start, stop, points))
    case = str(sw.get("case", "1"))
    try:
        parse_case(case)
    except ValueError as exc:
        raise ConfigError(f"'sweep.case': {exc}") from None
    n_max_start = sw.get("n_max_start")
    n_max_cap = sw.get("n_max_cap", 512)
    jobs = sw.get("jobs", 1)
    for k, v in (("n_max_start", n_max_start), ("n_max_cap", n_max_cap), ("jobs", jobs)):
        if v is not None and (not isinstance(v, int) or isinstance(v, bool) or v < 1):
            raise ConfigError(f"'sweep.{k}' must be a positive integer, got {v!r}")
    for k in ("axis", "case", "conv_tol", "n_max_start", "n_max_cap", "jobs"):
        if k not in sw:
            defaults.append(f"sweep.{k}")

    solver = doc.get("solver", {})
    reading = solver.get("reading", "corrected")
    if reading not in ("corrected", "literal"):
        raise ConfigError(f"'solver.reading' must be 'corrected' or 'literal', got {reading!r}")
    threshold = _num("solver", "regime_threshold", solver.get("regime_threshold", 5.0))

    try:
        sweep = SweepConfig(base=params, axis=axis, grid=grid, case=case,
                            conv_tol=_num("sweep", "conv_tol", sw.get("conv_tol", 1e-6)),
                            n_max_start=n_max_start, n_max_cap=n_max_cap, reading=reading, jobs=jobs)
    except ValueError as exc:
        raise ConfigError(f"[sweep]: {exc}") from None

    out = doc.get("output", {})
    fmt = out.get("format", "csv")
    if fmt not in ("csv", "json"):
        raise ConfigError(f"'output.format' must be csv or json, got {fmt!r}")
    validate = validate_settings(doc.get("validate", {}))
    return RunConfig(params=params, sweep=sweep, reading=reading, regime_threshold=threshold,
                     out_dir=out.get("dir"), name=str(out.get("name", "run")), format=fmt,
                     validate=validate, source=source, defaults_used=defaults)


def validate_settings(val: dict | None = None) -> dict:
    """Settings of the ``validate`` command with defaults filled in."""
    val = val or {}
    out = {
        "draws": int(val.get("draws", 5)),
        "n_max": int(val.get("n_max", 16)),
        "seed": val.get("seed"),
        "tolerance": float(val.get("tolerance", 1e-8)),
        "ladder_n_max": int(val.get("ladder_n_max", 12)),
        "ladder_scales": [float(x) for x in val.get("ladder_scales", [1.0, 2.0, 4.0])],
    }
    if out["draws"] < 1:
        raise ConfigError("'validate.draws' must be >= 1")
    if out["n_max"] < 2 or out["ladder_n_max"] < 2:
        raise ConfigError("'validate.n_max' and 'validate.ladder_n_max' must be >= 2")
    return out


def parse_document(text: str, source: str | None = None) -> dict:
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{source or '<config>'}: {exc}") from None
    _check_keys(doc)
    return doc


def read_document(path) -> dict:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_document(text, str(path))


def from_document(doc: dict, source: str | None = None) -> RunConfig:
    return _build(doc, source)


def merge(base: dict, override: dict) -> dict:
    """Table-wise overlay of ``override`` onto ``base``."""
    out = {k: dict(v) for k, v in base.items()}
    for section, body in override.items():
        out.setdefault(section, {}).update(body)
    if "values" in override.get("sweep", {}):
        for k in ("start", "stop", "points"):
            out["sweep"].pop(k, None)
    elif any(k in override.get("sweep", {}) for k in ("start", "stop", "points")):
        out["sweep"].pop("values", None)
    return out


def loads(text: str, source: str | None = None) -> RunConfig:
    return _build(parse_document(text, source), source)


def load(path) -> RunConfig:
    return _build(read_document(path), str(path))


def preset_text(name: str) -> str:
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; choose from {PRESETS}")
    return resources.files("lambda_osc").joinpath("presets", f"{name}.toml").read_text()


def preset_document(name: str) -> dict:
    return parse_document(preset_text(name), f"preset:{name}")


def load_preset(name: str) -> RunConfig:
    return loads(preset_text(name), f"preset:{name}")
