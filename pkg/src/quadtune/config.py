"""Experiment configuration and its INI-style file format.

Every section and key is optional; anything present must be known, otherwise
loading fails. Example::

    [experiment]
    algorithm = nsbbo
    trials = 5
    seed = 2021

    [bounds]
    kp_phi = 0, 20
"""

from __future__ import annotations

import configparser
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from .archive import ArchiveConfig
from .bbo import BboConfig
from .control import DEFAULT_DT, DEFAULT_T_FINAL, GAIN_NAMES, PdGains, Reference, default_initial_state
from .core import Bounds, DroneProblem
from .dynamics import DroneParams, DroneState
from .objectives import Weights
from .pso import PsoConfig

AGGREGATION = ("bbo", "pso")
PARETO = ("vebbo", "vepso", "nsbbo", "nspso")
ALGORITHMS = AGGREGATION + PARETO

STATE_KEYS = (
    "x", "y", "z", "x_dot", "y_dot", "z_dot",
    "phi", "theta", "psi", "phi_dot", "theta_dot", "psi_dot",
)  # fmt: skip


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    algorithm: str = "bbo"
    trials: int = 5
    seed: int = 0
    workers: int = 1
    seed_with_baseline: bool = True
    dt: float = DEFAULT_DT
    t_final: float = DEFAULT_T_FINAL
    drone: DroneParams = field(default_factory=DroneParams)
    reference: Reference = field(default_factory=Reference)
    initial: DroneState = field(default_factory=default_initial_state)
    bounds: Bounds = field(default_factory=Bounds.pd_default)
    weights: Weights = field(default_factory=Weights)
    pso: PsoConfig = field(default_factory=PsoConfig)
    bbo: BboConfig = field(default_factory=BboConfig)
    archive: ArchiveConfig = field(default_factory=ArchiveConfig)

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ConfigError(f"unknown algorithm {self.algorithm!r}; valid: {', '.join(ALGORITHMS)}")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if not self.dt > 0 or not self.t_final >= self.dt:
            raise ConfigError("need dt > 0 and t_final >= dt")
        if self.bounds.dim != 8:
            raise ConfigError("bounds must cover the 8 PD gains")

    @property
    def is_pareto(self) -> bool:
        return self.algorithm in PARETO

    @property
    def iterations(self) -> int:
        return (self.bbo if self.algorithm.endswith("bbo") else self.pso).iterations

    def problem(self) -> DroneProblem:
        return DroneProblem(
            params=self.drone,
            reference=self.reference,
            initial=self.initial,
            bounds=self.bounds,
            objective_weights=self.weights,
            dt=self.dt,
            t_final=self.t_final,
            workers=self.workers,
        )

    def seed_genes(self):
        return PdGains.conventional() if self.seed_with_baseline else None

    def with_(self, **changes) -> ExperimentConfig:
        return replace(self, **changes)


# --------------------------------------------------------------------------
# file format
# --------------------------------------------------------------------------


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _optional_float(text: str):
    t = text.strip().lower()
    if t in ("", "none"):
        return None
    parts = [float(p) for p in t.split(",")]
    return parts[0] if len(parts) == 1 else tuple(parts)


def _converter(default):
    if isinstance(default, bool):
        return _bool
    if isinstance(default, (int, float, str)):
        return type(default)
    return _optional_float


def _typed_section(section, cls):
    """Keyword arguments for dataclass ``cls`` from an INI section; unknown keys are errors."""
    defaults = cls()
    known = [f.name for f in fields(cls)]
    kwargs = {}
    for key, raw in section.items():
        if key not in known:
            raise ConfigError(f"[{section.name}] unknown key {key!r}; known: {', '.join(known)}")
        try:
            kwargs[key] = _converter(getattr(defaults, key))(raw.strip())
        except ValueError as exc:
            raise ConfigError(f"[{section.name}] {key}: {exc}") from None
    return kwargs


_EXPERIMENT_KEYS = {
    "algorithm": str,
    "trials": int,
    "seed": int,
    "workers": int,
    "seed_with_baseline": _bool,
}
_SECTIONS = ("experiment", "simulation", "drone", "reference", "initial", "bounds", "objective", "pso", "bbo", "archive")


def parse_config(text: str, source: str = "<config>") -> ExperimentConfig:
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    cp.optionxform = str  # keep Ixx etc. case-sensitive
    try:
        cp.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from None

    for name in cp.sections():
        if name not in _SECTIONS:
            raise ConfigError(f"{source}: unknown section [{name}]; known: {', '.join(_SECTIONS)}")

    cfg = {}
    try:
        if cp.has_section("experiment"):
            for key, raw in cp["experiment"].items():
                if key not in _EXPERIMENT_KEYS:
                    raise ConfigError(f"[experiment] unknown key {key!r}")
                cfg[key] = _EXPERIMENT_KEYS[key](raw.strip())
        if cp.has_section("simulation"):
            for key, raw in cp["simulation"].items():
                if key not in ("dt", "t_final"):
                    raise ConfigError(f"[simulation] unknown key {key!r}")
                cfg[key] = float(raw)
        if cp.has_section("drone"):
            cfg["drone"] = DroneParams(**_typed_section(cp["drone"], DroneParams))
        if cp.has_section("reference"):
            cfg["reference"] = Reference(**_typed_section(cp["reference"], Reference))
        if cp.has_section("initial"):
            x = default_initial_state().as_array()
            for key, raw in cp["initial"].items():
                if key not in STATE_KEYS:
                    raise ConfigError(f"[initial] unknown key {key!r}; known: {', '.join(STATE_KEYS)}")
                x[STATE_KEYS.index(key)] = float(raw)
            cfg["initial"] = DroneState.from_array(x)
        if cp.has_section("bounds"):
            b = Bounds.pd_default()
            lo, hi = b.lower.copy(), b.upper.copy()
            for key, raw in cp["bounds"].items():
                if key not in GAIN_NAMES:
                    raise ConfigError(f"[bounds] unknown key {key!r}; known: {', '.join(GAIN_NAMES)}")
                parts = [float(p) for p in raw.split(",")]
                if len(parts) != 2:
                    raise ConfigError(f"[bounds] {key}: expected 'min, max', got {raw!r}")
                i = GAIN_NAMES.index(key)
                lo[i], hi[i] = parts
            cfg["bounds"] = Bounds(lo, hi)
        if cp.has_section("objective"):
            cfg["weights"] = Weights(**_typed_section(cp["objective"], Weights))
        if cp.has_section("pso"):
            cfg["pso"] = PsoConfig(**_typed_section(cp["pso"], PsoConfig))
        if cp.has_section("bbo"):
            cfg["bbo"] = BboConfig(**_typed_section(cp["bbo"], BboConfig))
        if cp.has_section("archive"):
            cfg["archive"] = ArchiveConfig(**_typed_section(cp["archive"], ArchiveConfig))
        return ExperimentConfig(**cfg)
    except ConfigError:
        raise
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"{source}: {exc}") from None


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config(text, source=str(path))


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if v is None:
        return "none"
    if isinstance(v, (tuple, list, np.ndarray)):
        return ", ".join(repr(float(x)) for x in v)
    return str(v)


def dump_config(cfg: ExperimentConfig) -> str:
    """Render ``cfg`` in the file format; ``parse_config(dump_config(c)) == c``."""
    lines = ["[experiment]"]
    lines += [f"{k} = {_fmt(getattr(cfg, k))}" for k in _EXPERIMENT_KEYS]
    lines += ["", "[simulation]", f"dt = {_fmt(cfg.dt)}", f"t_final = {_fmt(cfg.t_final)}"]
    for name, obj in (("drone", cfg.drone), ("reference", cfg.reference), ("objective", cfg.weights)):
        lines += ["", f"[{name}]"] + [f"{k} = {_fmt(v)}" for k, v in asdict(obj).items()]
    lines += ["", "[initial]"]
    lines += [f"{k} = {_fmt(float(v))}" for k, v in zip(STATE_KEYS, cfg.initial.as_array())]
    lines += ["", "[bounds]"]
    lines += [f"{k} = {_fmt(float(lo))}, {_fmt(float(hi))}" for k, lo, hi in zip(GAIN_NAMES, cfg.bounds.lower, cfg.bounds.upper)]
    for name, obj in (("pso", cfg.pso), ("bbo", cfg.bbo), ("archive", cfg.archive)):
        lines += ["", f"[{name}]"] + [f"{k} = {_fmt(v)}" for k, v in asdict(obj).items()]
    return "\n".join(lines) + "\n"
