"""JSON run configuration.

Every section maps onto a frozen dataclass. Unknown keys are rejected,
missing optional keys take the dataclass defaults, and the module-level
invariants (geometry ordering, ``eta`` range, penalty coupling, ...) are
re-validated when the problem is built from the configuration.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Literal


class ConfigError(ValueError):
    """Malformed or invalid configuration."""


@dataclass(frozen=True)
class SystemSection:
    name: str
    params: dict[str, float] = field(default_factory=dict)


@dataclass(frozen=True)
class GeometrySection:
    a: float
    b: float
    c: float
    d: float
    eta: float = 0.5

    def __post_init__(self):
        if not (self.a < self.b < self.c < self.d):
            raise ConfigError(
                "geometry.a < geometry.b < geometry.c < geometry.d violated: "
                f"{self.a}, {self.b}, {self.c}, {self.d}"
            )
        if not (0.0 < self.eta < 1.0):
            raise ConfigError(f"eta must lie in (0,1): got {self.eta}")


@dataclass(frozen=True)
class GridSection:
    n_u: int
    n_v: int

    def __post_init__(self):
        if self.n_u < 4 or self.n_v < 4:
            raise ConfigError(f"grid.n_u and grid.n_v must be at least 4: {self.n_u}, {self.n_v}")


@dataclass(frozen=True)
class InterpolationSection:
    mode: Literal["exact_node", "lagrange"] = "exact_node"
    order: int = 1

    def __post_init__(self):
        if self.mode not in ("exact_node", "lagrange"):
            raise ConfigError(f"interpolation.mode must be 'exact_node' or 'lagrange': {self.mode!r}")
        if self.order < 1:
            raise ConfigError(f"interpolation.order must be positive: {self.order}")


@dataclass(frozen=True)
class PenaltySection:
    kappa: float = 0.0
    M: int = 0
    sigma: float = 1.0

    def __post_init__(self):
        if self.kappa < 0:
            raise ConfigError(f"penalties.kappa must be non-negative: {self.kappa}")
        if self.M < 0:
            raise ConfigError(f"penalties.M must be non-negative: {self.M}")
        if not self.sigma > 0:
            raise ConfigError(f"penalties.sigma must be positive (Sigma_u = sigma I is SPD): {self.sigma}")


@dataclass(frozen=True)
class IntegratorSection:
    t_final: float
    method: Literal["ssprk3", "rk4"] = "ssprk3"
    cfl: float = 0.5
    dt: float | None = None

    def __post_init__(self):
        if self.method not in ("ssprk3", "rk4"):
            raise ConfigError(f"integrator.method must be 'ssprk3' or 'rk4': {self.method!r}")
        if not (0.0 < self.cfl <= 1.0):
            raise ConfigError(f"integrator.cfl must lie in (0,1]: {self.cfl}")
        if self.dt is not None and not self.dt > 0:
            raise ConfigError(f"integrator.dt must be positive: {self.dt}")
        if not self.t_final > 0:
            raise ConfigError(f"integrator.t_final must be positive: {self.t_final}")


@dataclass(frozen=True)
class InitialConditionSection:
    name: str
    params: dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class BCSection:
    kind: Literal["reflective_none", "dirichlet_exact"] = "reflective_none"

    def __post_init__(self):
        if self.kind not in ("reflective_none", "dirichlet_exact"):
            raise ConfigError(f"bc.kind must be 'reflective_none' or 'dirichlet_exact': {self.kind!r}")


@dataclass(frozen=True)
class OutputSection:
    directory: str = "out"
    cadence: int = 1
    figures: bool = True

    def __post_init__(self):
        if self.cadence < 1:
            raise ConfigError(f"output.cadence must be at least 1: {self.cadence}")


@dataclass(frozen=True)
class RunConfig:
    system: SystemSection
    geometry: GeometrySection
    grid: GridSection
    integrator: IntegratorSection
    initial_condition: InitialConditionSection
    interpolation: InterpolationSection = field(default_factory=InterpolationSection)
    penalties: PenaltySection = field(default_factory=PenaltySection)
    bc: BCSection = field(default_factory=BCSection)
    output: OutputSection = field(default_factory=OutputSection)
    seed: int = 0

    def to_dict(self) -> dict[str, Any]:
        return dataclasses.asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def replace(self, **sections: Any) -> RunConfig:
        """Copy with some fields of some sections replaced, e.g.
        ``cfg.replace(grid={"n_u": 80})``."""
        changes = {}
        for name, value in sections.items():
            current = getattr(self, name)
            if isinstance(value, dict) and dataclasses.is_dataclass(current):
                value = dataclasses.replace(current, **value)
            changes[name] = value
        return dataclasses.replace(self, **changes)


_SECTIONS = {
    "system": SystemSection,
    "geometry": GeometrySection,
    "grid": GridSection,
    "integrator": IntegratorSection,
    "initial_condition": InitialConditionSection,
    "interpolation": InterpolationSection,
    "penalties": PenaltySection,
    "bc": BCSection,
    "output": OutputSection,
}

_FLOAT_FIELDS = {"a", "b", "c", "d", "eta", "kappa", "sigma", "t_final", "cfl", "dt"}
_INT_FIELDS = {"n_u", "n_v", "order", "M", "cadence"}


def _coerce(section: str, key: str, value: Any) -> Any:
    where = f"{section}.{key}"
    if key in _FLOAT_FIELDS:
        if value is None and key == "dt":
            return None
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{where} must be a number: {value!r}")
        return float(value)
    if key in _INT_FIELDS:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{where} must be an integer: {value!r}")
        return value
    if key == "figures":
        if not isinstance(value, bool):
            raise ConfigError(f"{where} must be true or false: {value!r}")
        return value
    if key == "params":
        if not isinstance(value, dict):
            raise ConfigError(f"{where} must be an object: {value!r}")
        return dict(value)
    if not isinstance(value, str):
        raise ConfigError(f"{where} must be a string: {value!r}")
    return value


def _section(name: str, data: Any):
    cls = _SECTIONS[name]
    if not isinstance(data, dict):
        raise ConfigError(f"section '{name}' must be an object")

    known = {f.name for f in dataclasses.fields(cls)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigError(f"unknown key(s) in section '{name}': {', '.join(unknown)}")

    kwargs = {k: _coerce(name, k, v) for k, v in data.items()}
    try:
        return cls(**kwargs)
    except TypeError as exc:
        missing = sorted(
            f.name
            for f in dataclasses.fields(cls)
            if f.name not in kwargs
            and f.default is dataclasses.MISSING
            and f.default_factory is dataclasses.MISSING
        )
        raise ConfigError(f"section '{name}' is missing required key(s): {', '.join(missing)}") from exc


def config_from_dict(data: Any) -> RunConfig:
    if not isinstance(data, dict):
        raise ConfigError("configuration must be a JSON object")

    known = set(_SECTIONS) | {"seed"}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigError(f"unknown top-level key(s): {', '.join(unknown)}")

    required = ("system", "geometry", "grid", "integrator", "initial_condition")
    missing = [k for k in required if k not in data]
    if missing:
        raise ConfigError(f"missing section(s): {', '.join(missing)}")

    kwargs: dict[str, Any] = {name: _section(name, data[name]) for name in _SECTIONS if name in data}
    if "seed" in data:
        seed = data["seed"]
        if isinstance(seed, bool) or not isinstance(seed, int):
            raise ConfigError(f"seed must be an integer: {seed!r}")
        kwargs["seed"] = seed

    return RunConfig(**kwargs)


def load_config(path: str | Path) -> RunConfig:
    """Read and validate a JSON configuration file.

    Raises :class:`ConfigError` for syntax errors (with line and column),
    unknown keys and violated invariants, and :class:`OSError` if the file
    cannot be read.
    """
    path = Path(path)
    text = path.read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    return config_from_dict(data)


def dump_config(cfg: RunConfig, path: str | Path) -> Path:
    path = Path(path)
    path.write_text(cfg.to_json())
    return path
