"""Run configuration: JSON schema, validation, normalization, hashing.

A run is described by one JSON object with four sections:

    {
      "model":  {"type": "bd", "rho": 0.5, "beta": 0.5, "b": 0.0},
      "engine": {"n_traj": 1000, "horizon": 1000000, "base_seed": 1, ...},
      "checks": ["lln", {"name": "clt", "tolerance": 0.2}, ...],
      "output": {"dir": "out", "formats": ["json", "csv"]}
    }

Unknown keys are rejected with the dotted path of the offending entry,
as are out-of-range values.  "checks" may be omitted, in which case a
sensible default list for the model is used.  normalized() returns the
fully explicit form (defaults filled in, checks resolved); manifests and
reports embed that form together with its SHA-256 hash so a run can be
reproduced from either.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

from .engine import EnsembleConfig
from .estimators import CHECK_OVERRIDES, default_checks
from .models import (
    BDChainParams,
    HalfLineWalkParams,
    HiddenStateParams,
    NoiseSpec,
    OscDriftParams,
    RdWalkParams,
)

MODEL_TYPES = ("bd", "halfline", "osc", "hidden", "rd")
FORMATS = ("json", "csv")


class ConfigError(ValueError):
    """Invalid configuration; path names the offending entry."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


@dataclass
class RunConfig:
    model_type: str
    model: object
    engine: EnsembleConfig
    checks: list  # resolved [{"name": ..., **overrides}]
    output_dir: str
    formats: list

    def normalized(self) -> dict:
        """Fully explicit configuration dict (reparses to an equal RunConfig)."""
        return {
            "model": _model_dict(self.model_type, self.model),
            "engine": {
                "n_traj": self.engine.n_traj,
                "horizon": self.engine.horizon,
                "base_seed": self.engine.base_seed,
                "grid_points": self.engine.grid_points,
                "record_doob": self.engine.record_doob,
                "record_paths": self.engine.record_paths,
                "record_transitions": self.engine.record_transitions,
                "max_transitions": self.engine.max_transitions,
                "start": self.engine.start,
                "memory_budget_mb": self.engine.memory_budget_mb,
            },
            "checks": [dict(c) for c in self.checks],
            "output": {"dir": self.output_dir, "formats": list(self.formats)},
        }


def config_hash(normalized: dict) -> str:
    """SHA-256 of the canonical JSON encoding of a normalized config."""
    canon = json.dumps(normalized, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()


# ---------------------------------------------------------------------------
# validation helpers


def _expect_mapping(value, path):
    if not isinstance(value, dict):
        raise ConfigError(path, f"expected an object, got {type(value).__name__}")
    return value

def _reject_unknown(data: dict, allowed, path: str):
    for key in data:
        if key not in allowed:
            raise ConfigError(f"{path}.{key}" if path else key, "unknown key")


def _number(data, key, path, default=None, required=False):
    if key not in data:
        if required:
            raise ConfigError(f"{path}.{key}", "missing required value")
        return default
    v = data[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{path}.{key}", f"expected a number, got {v!r}")
    return v


def _integer(data, key, path, default=None, required=False):
    if key not in data:
        if required:
            raise ConfigError(f"{path}.{key}", "missing required value")
        return default
    v = _number(data, key, path, required=True)
    if isinstance(v, float) and not v.is_integer():
        raise ConfigError(f"{path}.{key}", f"expected an integer, got {v!r}")
    return int(v)


def _boolean(data, key, path, default=False):
    v = data.get(key, default)
    if not isinstance(v, bool):
        raise ConfigError(f"{path}.{key}", f"expected true or false, got {v!r}")
    return v


def _string(data, key, path, default=None, required=False):
    if key not in data:
        if required:
            raise ConfigError(f"{path}.{key}", "missing required value")
        return default
    v = data[key]
    if not isinstance(v, str):
        raise ConfigError(f"{path}.{key}", f"expected a string, got {v!r}")
    return v


def _construct(factory, kwargs, path: str, fields):
    # dataclass validators raise ValueError messages that lead with the
    # field name; map them back to a config path
    try:
        return factory(**kwargs)
    except ValueError as exc:
        msg = str(exc)
        for name in fields:
            if msg.startswith(name) or f" {name} " in f" {msg.split(',')[0]} ":
                raise ConfigError(f"{path}.{name}", msg) from None
        raise ConfigError(path, msg) from None


# ---------------------------------------------------------------------------
# section parsers


def _parse_noise(data, path):
    data = _expect_mapping(data, path)
    _reject_unknown(data, {"kind", "sigma", "cap", "tail_index", "scale"}, path)
    kind = _string(data, "kind", path, required=True)
    kwargs = {"kind": kind}
    for key in ("sigma", "cap", "tail_index", "scale"):
        v = _number(data, key, path)
        if v is not None:
            kwargs[key] = float(v)
    return _construct(NoiseSpec, kwargs, path, ("kind", "sigma", "cap", "tail_index", "scale"))


def _parse_model(data):
    data = _expect_mapping(data, "model")
    mtype = _string(data, "type", "model", required=True)
    if mtype not in MODEL_TYPES:
        raise ConfigError("model.type", f"unknown model type {mtype!r}, expected one of {MODEL_TYPES}")
    if mtype == "bd":
        _reject_unknown(data, {"type", "rho", "beta", "b"}, "model")
        kwargs = {
            "rho": float(_number(data, "rho", "model", required=True)),
            "beta": float(_number(data, "beta", "model", required=True)),
            "b": float(_number(data, "b", "model", default=0.0)),
        }
        return mtype, _construct(BDChainParams, kwargs, "model", ("rho", "beta", "b"))
    if mtype == "osc":
        _reject_unknown(data, {"type", "beta", "a", "A"}, "model")
        kwargs = {
            "beta": float(_number(data, "beta", "model", required=True)),
            "a": float(_number(data, "a", "model", required=True)),
            "A": float(_number(data, "A", "model", required=True)),
        }
        return mtype, _construct(OscDriftParams, kwargs, "model", ("beta", "a", "A"))
    if mtype == "halfline":
        _reject_unknown(data, {"type", "rho", "beta", "noise"}, "model")
        kwargs = {
            "rho": float(_number(data, "rho", "model", required=True)),
            "beta": float(_number(data, "beta", "model", required=True)),
        }
        if "noise" in data:
            kwargs["noise"] = _parse_noise(data["noise"], "model.noise")
        return mtype, _construct(HalfLineWalkParams, kwargs, "model", ("rho", "beta"))
    if mtype == "hidden":
        _reject_unknown(data, {"type", "rho", "beta", "sigma0_sq", "sigma1_sq", "p_flip"}, "model")
        kwargs = {
            "rho": float(_number(data, "rho", "model", required=True)),
            "beta": float(_number(data, "beta", "model", required=True)),
            "sigma0_sq": float(_number(data, "sigma0_sq", "model", required=True)),
            "sigma1_sq": float(_number(data, "sigma1_sq", "model", required=True)),
            "p_flip": float(_number(data, "p_flip", "model", required=True)),
        }
        return mtype, _construct(
            HiddenStateParams, kwargs, "model",
            ("rho", "beta", "sigma0_sq", "sigma1_sq", "p_flip"),
        )
    _reject_unknown(data, {"type", "d", "rho", "beta", "noise_sigma"}, "model")
    kwargs = {
        "d": _integer(data, "d", "model", required=True),
        "rho": float(_number(data, "rho", "model", required=True)),
        "beta": float(_number(data, "beta", "model", required=True)),
        "noise_sigma": float(_number(data, "noise_sigma", "model", default=1.0)),
    }
    return mtype, _construct(RdWalkParams, kwargs, "model", ("d", "rho", "beta", "noise_sigma"))


_ENGINE_KEYS = (
    "n_traj", "horizon", "base_seed", "grid_points", "record_doob", "record_paths",
    "record_transitions", "max_transitions", "start", "memory_budget_mb",
)


def _parse_engine(data):
    data = _expect_mapping(data, "engine")
    _reject_unknown(data, set(_ENGINE_KEYS), "engine")
    kwargs = {
        "n_traj": _integer(data, "n_traj", "engine", required=True),
        "horizon": _integer(data, "horizon", "engine", required=True),
        "base_seed": _integer(data, "base_seed", "engine", default=0),
        "grid_points": _integer(data, "grid_points", "engine", default=48),
        "record_doob": _boolean(data, "record_doob", "engine"),
        "record_paths": _integer(data, "record_paths", "engine", default=0),
        "record_transitions": _boolean(data, "record_transitions", "engine"),
        "max_transitions": _integer(data, "max_transitions", "engine", default=2_000_000),
        "start": float(_number(data, "start", "engine", default=0.0)),
        "memory_budget_mb": _integer(data, "memory_budget_mb", "engine", default=512),
    }
    return _construct(EnsembleConfig, kwargs, "engine", _ENGINE_KEYS)


def _parse_checks(data, model, engine):
    if data is None:
        return default_checks(model, engine)
    if not isinstance(data, list):
        raise ConfigError("checks", f"expected a list, got {type(data).__name__}")
    out = []
    for i, entry in enumerate(data):
        path = f"checks[{i}]"
        if isinstance(entry, str):
            entry = {"name": entry}
        entry = _expect_mapping(entry, path)
        name = _string(entry, "name", path, required=True)
        if name not in CHECK_OVERRIDES:
            raise ConfigError(f"{path}.name", f"unknown check {name!r}, expected one of "
                              f"{sorted(CHECK_OVERRIDES)}")
        spec = {"name": name}
        for key, value in entry.items():
            if key == "name":
                continue
            if key not in CHECK_OVERRIDES[name]:
                raise ConfigError(f"{path}.{key}", f"unknown override for check {name!r}")
            if key == "check_rho":
                if not isinstance(value, bool):
                    raise ConfigError(f"{path}.{key}", f"expected true or false, got {value!r}")
                spec[key] = value
            else:
                if isinstance(value, bool) or not isinstance(value, (int, float)):
                    raise ConfigError(f"{path}.{key}", f"expected a number, got {value!r}")
                spec[key] = value
        out.append(spec)
    return out


def _parse_output(data):
    if data is None:
        return "out", ["json"]
    data = _expect_mapping(data, "output")
    _reject_unknown(data, {"dir", "formats"}, "output")
    out_dir = _string(data, "dir", "output", default="out")
    if not out_dir:
        raise ConfigError("output.dir", "must be a nonempty path")
    formats = data.get("formats", ["json"])
    if not isinstance(formats, list) or not formats:
        raise ConfigError("output.formats", "expected a nonempty list")
    seen = []
    for i, f in enumerate(formats):
        if f not in FORMATS:
            raise ConfigError(f"output.formats[{i}]", f"unknown format {f!r}, expected one of {FORMATS}")
        if f not in seen:
            seen.append(f)
    return out_dir, seen


def parse_config(data: dict) -> RunConfig:
    """Validate a configuration mapping and resolve all defaults."""
    data = _expect_mapping(data, "")
    _reject_unknown(data, {"model", "engine", "checks", "output"}, "")
    if "model" not in data:
        raise ConfigError("model", "missing required section")
    if "engine" not in data:
        raise ConfigError("engine", "missing required section")
    model_type, model = _parse_model(data["model"])
    engine = _parse_engine(data["engine"])
    if engine.record_doob and model_type != "bd":
        raise ConfigError(
            "engine.record_doob",
            "decomposition recording needs an exactly computable conditional "
            "drift; only the bd model provides one",
        )
    checks = _parse_checks(data.get("checks"), model, engine)
    out_dir, formats = _parse_output(data.get("output"))
    return RunConfig(
        model_type=model_type,
        model=model,
        engine=engine,
        checks=checks,
        output_dir=out_dir,
        formats=formats,
    )


def load_config(path: str) -> RunConfig:
    """Parse a configuration file; bad JSON is a configuration error."""
    with open(path, "r", encoding="utf-8") as f:
        text = f.read()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("", f"invalid JSON: {exc}") from None
    return parse_config(data)


def _model_dict(model_type: str, model) -> dict:
    if model_type == "bd":
        return {"type": "bd", "rho": model.rho, "beta": model.beta, "b": model.b}
    if model_type == "osc":
        return {"type": "osc", "beta": model.beta, "a": model.a, "A": model.A}
    if model_type == "halfline":
        n = model.noise
        return {
            "type": "halfline", "rho": model.rho, "beta": model.beta,
            "noise": {"kind": n.kind, "sigma": n.sigma, "cap": n.cap,
                      "tail_index": n.tail_index, "scale": n.scale},
        }
    if model_type == "hidden":
        return {
            "type": "hidden", "rho": model.rho, "beta": model.beta,
            "sigma0_sq": model.sigma0_sq, "sigma1_sq": model.sigma1_sq,
            "p_flip": model.p_flip,
        }
    return {"type": "rd", "d": model.d, "rho": model.rho, "beta": model.beta,
            "noise_sigma": model.noise_sigma}
