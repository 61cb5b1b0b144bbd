"""Run configuration: one JSON document, schema-checked, defaults from the
reference experiments (hbar = kB = T = m = omega = 1, beta_p = beta_q = 0.2,
16 levels, 1000 steps of pi/200)."""

import dataclasses
import hashlib
import json
import math
from dataclasses import dataclass, field
from typing import Any

from .errors import ConfigError
from .liouvillian import ModelKind
from .oscillator import OscillatorModel

_MODEL_TAGS = {kind.value for kind in ModelKind}

_INITIAL_KINDS = {"mixed-power-law", "pure-level", "gibbs"}

#: (type, validator, message) per top-level key.
_SCALAR_KEYS: dict[str, tuple] = {
    "hbar": (float, lambda v: v > 0, "must be positive"),
    "kb": (float, lambda v: v > 0, "must be positive"),
    "temperature": (float, lambda v: v > 0, "must be positive"),
    "mass": (float, lambda v: v > 0, "must be positive"),
    "omega": (float, lambda v: v > 0, "must be positive"),
    "beta_p": (float, lambda v: v >= 0, "must be non-negative"),
    "beta_q": (float, lambda v: v >= 0, "must be non-negative"),
    "force": (float, lambda v: True, ""),
    "dim": (int, lambda v: v >= 2, "must be an integer >= 2"),
    "dt": (float, lambda v: v > 0, "must be positive"),
    "steps": (int, lambda v: v >= 1, "must be a positive integer"),
    "gamma0": (float, lambda v: v > 0, "must be positive"),
    "nbar": (float, lambda v: v >= 0, "must be non-negative"),
    "rng_seed": (int, lambda v: v >= 0, "must be a non-negative integer"),
    "emit_precision": (int, lambda v: 1 <= v <= 17, "must be in 1..17"),
}

_SECTION_KEYS = {"initial", "model", "classical", "grid", "sweep"}

_CLASSICAL_KEYS: dict[str, tuple] = {
    "dt": (float, lambda v: v > 0, "must be positive"),
    "n_steps": (int, lambda v: v >= 1, "must be a positive integer"),
    "n_trajectories": (int, lambda v: v >= 2, "must be an integer >= 2"),
    "burn_in_steps": (int, lambda v: v >= 0, "must be non-negative"),
    "n_windows": (int, lambda v: v >= 2, "must be >= 2"),
}

_GRID_KEYS = {"beta_p_values", "beta_q_values", "xi_values", "choi_dt", "boundary_samples"}
_SWEEP_KEYS = {"axis", "values", "jobs"}

DEFAULTS: dict[str, Any] = {
    "hbar": 1.0,
    "kb": 1.0,
    "temperature": 1.0,
    "mass": 1.0,
    "omega": 1.0,
    "beta_p": 0.2,
    "beta_q": 0.2,
    "force": 0.0,
    "dim": 16,
    "dt": math.pi / 200.0,
    "steps": 1000,
    "model": "full-hermitian",
    "initial": {"kind": "mixed-power-law", "f": 1.0},
    "rng_seed": 0,
    "emit_precision": 17,
    "classical": {
        "dt": 0.0025,
        "n_steps": 4000,
        "n_trajectories": 5000,
        "n_windows": 20,
    },
}


@dataclass(frozen=True)
class InitialSpec:
    kind: str
    f: float | None = None
    s: int | None = None

    def as_dict(self) -> dict:
        out: dict[str, Any] = {"kind": self.kind}
        if self.f is not None:
            out["f"] = self.f
        if self.s is not None:
            out["s"] = self.s
        return out

    def label(self) -> str:
        if self.kind == "mixed-power-law":
            return f"f{self.f:g}"
        if self.kind == "pure-level":
            return f"s{self.s}"
        return "gibbs"


@dataclass(frozen=True)
class RunConfig:
    hbar: float
    kb: float
    temperature: float
    mass: float
    omega: float
    beta_p: float
    beta_q: float
    force: float
    dim: int
    dt: float
    steps: int
    model: str
    initial: InitialSpec
    rng_seed: int
    emit_precision: int
    gamma0: float | None = None
    nbar: float | None = None
    classical: dict = field(default_factory=dict)
    grid: dict = field(default_factory=dict)
    sweep: dict = field(default_factory=dict)

    @property
    def kind(self) -> ModelKind:
        return ModelKind(self.model)

    def oscillator(self) -> OscillatorModel:
        return OscillatorModel(
            mass=self.mass,
            omega=self.omega,
            hbar=self.hbar,
            kb=self.kb,
            temperature=self.temperature,
            beta_p=self.beta_p,
            beta_q=self.beta_q,
            force=self.force,
            dim=self.dim,
        )

    def effective_dict(self) -> dict:
        """Plain-dict form with defaults applied; re-parses to the same run."""
        out: dict[str, Any] = {}
        for f_ in dataclasses.fields(self):
            val = getattr(self, f_.name)
            if f_.name == "initial":
                out[f_.name] = val.as_dict()
            elif val is None or (isinstance(val, dict) and not val):
                continue
            else:
                out[f_.name] = val
        return out

    def canonical_json(self) -> str:
        return json.dumps(self.effective_dict(), sort_keys=True, separators=(",", ":"))

    def digest(self) -> str:
        return hashlib.sha256(self.canonical_json().encode()).hexdigest()[:16]

    def replace(self, **kwargs) -> "RunConfig":
        return dataclasses.replace(self, **kwargs)


def _coerce(key: str, value, want_type, check, msg: str):
    if want_type is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"key '{key}': expected a number, got {value!r}")
        value = float(value)
    elif want_type is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"key '{key}': expected an integer, got {value!r}")
    if not check(value):
        raise ConfigError(f"key '{key}': {msg} (got {value!r})")
    return value


def _parse_initial(raw) -> InitialSpec:
    if not isinstance(raw, dict):
        raise ConfigError(f"key 'initial': expected an object, got {raw!r}")
    kind = raw.get("kind")
    if kind not in _INITIAL_KINDS:
        raise ConfigError(f"key 'initial.kind': must be one of {sorted(_INITIAL_KINDS)}")
    extra = set(raw) - {"kind", "f", "s"}
    if extra:
        raise ConfigError(f"key 'initial': unknown keys {sorted(extra)}")
    if kind == "mixed-power-law":
        f = raw.get("f")
        if not isinstance(f, (int, float)) or isinstance(f, bool) or f <= 0:
            raise ConfigError("key 'initial.f': must be a positive number")
        return InitialSpec(kind=kind, f=float(f))
    if kind == "pure-level":
        s = raw.get("s")
        if not isinstance(s, int) or isinstance(s, bool) or s < 1:
            raise ConfigError("key 'initial.s': must be an integer >= 1")
        return InitialSpec(kind=kind, s=s)
    return InitialSpec(kind="gibbs")


def _parse_section(name: str, raw, known: dict) -> dict:
    if not isinstance(raw, dict):
        raise ConfigError(f"key '{name}': expected an object")
    unknown = set(raw) - set(known)
    if unknown:
        raise ConfigError(f"key '{name}': unknown keys {sorted(unknown)}")
    out = dict(DEFAULTS.get(name, {}))
    for key, value in raw.items():
        want_type, check, msg = known[key]
        out[key] = _coerce(f"{name}.{key}", value, want_type, check, msg)
    return out


def build_config(raw: dict | None = None, overrides: dict | None = None) -> RunConfig:
    """Merge defaults, a raw JSON document, and CLI overrides into a RunConfig.

    Unknown keys anywhere are rejected with the offending key named.
    """
    raw = dict(raw or {})
    unknown = set(raw) - set(_SCALAR_KEYS) - _SECTION_KEYS
    if unknown:
        raise ConfigError(f"unknown configuration keys: {sorted(unknown)}")
    merged: dict[str, Any] = {}
    for key, spec in _SCALAR_KEYS.items():
        if key in raw:
            merged[key] = _coerce(key, raw[key], *spec)
        elif key in DEFAULTS:
            merged[key] = DEFAULTS[key]
        else:
            merged[key] = None

    model = raw.get("model", DEFAULTS["model"])
    if model not in _MODEL_TAGS:
        raise ConfigError(f"key 'model': must be one of {sorted(_MODEL_TAGS)}")
    initial = _parse_initial(raw.get("initial", DEFAULTS["initial"]))
    classical = _parse_section("classical", raw.get("classical", {}), _CLASSICAL_KEYS)

    grid = raw.get("grid", {})
    if grid:
        if not isinstance(grid, dict):
            raise ConfigError("key 'grid': expected an object")
        unknown = set(grid) - _GRID_KEYS
        if unknown:
            raise ConfigError(f"key 'grid': unknown keys {sorted(unknown)}")
    sweep = raw.get("sweep", {})
    if sweep:
        if not isinstance(sweep, dict):
            raise ConfigError("key 'sweep': expected an object")
        unknown = set(sweep) - _SWEEP_KEYS
        if unknown:
            raise ConfigError(f"key 'sweep': unknown keys {sorted(unknown)}")

    cfg = RunConfig(
        model=model,
        initial=initial,
        classical=classical,
        grid=dict(grid),
        sweep=dict(sweep),
        **{k: merged[k] for k in _SCALAR_KEYS},
    )
    if overrides:
        cfg = apply_overrides(cfg, overrides)
    return cfg


def apply_overrides(cfg: RunConfig, overrides: dict) -> RunConfig:
    """Apply already-typed CLI overrides (model/dt/steps/dim/seed/initial/out...)."""
    updates: dict[str, Any] = {}
    for key, value in overrides.items():
        if value is None:
            continue
        if key == "model":
            if value not in _MODEL_TAGS:
                raise ConfigError(f"--model: must be one of {sorted(_MODEL_TAGS)}")
            updates["model"] = value
        elif key == "initial":
            updates["initial"] = parse_initial_shorthand(value)
        elif key in _SCALAR_KEYS:
            updates[key] = _coerce(key, value, *_SCALAR_KEYS[key])
        else:
            raise ConfigError(f"unknown override '{key}'")
    return cfg.replace(**updates) if updates else cfg


def parse_initial_shorthand(text: str) -> InitialSpec:
    """Parse the CLI shorthand: 'gibbs', 'f=2', or 's=3'."""
    text = text.strip()
    if text == "gibbs":
        return InitialSpec(kind="gibbs")
    if "=" in text:
        key, _, val = text.partition("=")
        key = key.strip()
        try:
            if key == "f":
                return _parse_initial({"kind": "mixed-power-law", "f": float(val)})
            if key == "s":
                return _parse_initial({"kind": "pure-level", "s": int(val)})
        except ValueError as exc:
            raise ConfigError(f"--initial: {exc}") from exc
    raise ConfigError(f"--initial: expected 'gibbs', 'f=<x>' or 's=<n>', got {text!r}")


def load_config(path: str | None, overrides: dict | None = None) -> RunConfig:
    if path is None:
        return build_config({}, overrides)
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a JSON object")
    return build_config(raw, overrides)
