"""Tolerances, scan parameters and the flat ``key = value`` run-config format."""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from .errors import ConfigError


@dataclass(frozen=True)
class Tolerances:
    relation: float = 1e-10       # normalized sextic relation residual
    trapezoid: float = 1e-12      # normalized trapezoid residual
    cayley_menger: float = 1e-10  # |H| / r13**8
    mass: float = 1e-8            # mass-ratio overdetermination
    multiplier: float = 1e-8      # lambda_spread and sigma_spread
    root: float = 1e-13           # relative bracket width for b
    classify: float = 1e-7        # shape classification
    omega: float = 1e-10          # tolerance band on the ordering chain, times the scale
    ordering: float = 1e-10       # mass-ordering theorem checks
    embed: float = 1e-9           # embedding round trip, relative


@dataclass(frozen=True)
class ScanConfig:
    a_fixed: float = 8.0
    c_min: float = 0.5
    c_max: float = 7.9
    c_steps: int = 50
    d_min: float = 6.5
    d_max: float = 8.0
    d_steps: int = 50
    panels: int = 24
    tol: Tolerances = field(default_factory=Tolerances)

    def __post_init__(self):
        if self.a_fixed <= 0:
            raise ConfigError("a_fixed must be positive")
        for lo, hi, n, name in ((self.c_min, self.c_max, self.c_steps, "c"),
                                (self.d_min, self.d_max, self.d_steps, "d")):
            if not (0 < lo <= hi):
                raise ConfigError(f"{name}_min/{name}_max must satisfy 0 < min <= max")
            if n < 1:
                raise ConfigError(f"{name}_steps must be >= 1")
        if self.c_max >= self.a_fixed:
            raise ConfigError("c_max must be below a_fixed (r12 > r34 off the parallelogram strip)")
        if self.panels < 1:
            raise ConfigError("panels must be >= 1")

    def c_values(self):
        return _grid(self.c_min, self.c_max, self.c_steps)

    def d_values(self):
        return _grid(self.d_min, self.d_max, self.d_steps)


def _grid(lo, hi, n):
    if n == 1:
        return [lo]
    return [lo + (hi - lo) * i / (n - 1) for i in range(n)]


@dataclass(frozen=True)
class RunConfig:
    scan: ScanConfig = field(default_factory=ScanConfig)
    workers: int = 1
    csv_path: str | None = None
    summary_path: str | None = None
    format: str = "table"

    @property
    def tol(self) -> Tolerances:
        return self.scan.tol


_SCAN_KEYS = {"a_fixed": float, "c_min": float, "c_max": float, "c_steps": int,
              "d_min": float, "d_max": float, "d_steps": int, "panels": int}
_TOL_KEYS = {f"tol_{f.name}": f.name for f in fields(Tolerances)}
_RUN_KEYS = {"workers": int, "csv_path": str, "summary_path": str, "format": str}
FORMATS = ("json", "csv", "table")


def parse_config_text(text: str, source: str = "<config>") -> RunConfig:
    """Parse flat ``key = value`` text; ``#`` starts a comment. Unknown keys are errors."""
    return config_from_mapping(read_config_mapping(text, source), source)


def read_config_mapping(text: str, source: str = "<config>") -> dict:
    """Raw ``key -> value`` strings, without validation."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",), interpolation=None)
    parser.optionxform = str
    try:
        parser.read_string("[run]\n" + text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from exc
    return dict(parser["run"])


def config_from_mapping(values: dict, source: str = "<config>") -> RunConfig:
    scan_kw, tol_kw, run_kw = {}, {}, {}
    for key, raw in values.items():
        try:
            if key in _SCAN_KEYS:
                scan_kw[key] = _SCAN_KEYS[key](raw)
            elif key in _TOL_KEYS:
                tol_kw[_TOL_KEYS[key]] = float(raw)
            elif key in _RUN_KEYS:
                run_kw[key] = _RUN_KEYS[key](raw)
            else:
                raise ConfigError(f"{source}: unknown key {key!r}")
        except ValueError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"{source}: bad value for {key!r}: {raw!r}") from exc
    if run_kw.get("format", "table") not in FORMATS:
        raise ConfigError(f"{source}: format must be one of {FORMATS}")
    if run_kw.get("workers", 1) < 1:
        raise ConfigError(f"{source}: workers must be >= 1")
    scan = ScanConfig(tol=Tolerances(**tol_kw), **scan_kw)
    return RunConfig(scan=scan, **run_kw)


def read_config_file(path: str | Path) -> dict:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return read_config_mapping(text, source=str(path))


def load_config(path: str | Path) -> RunConfig:
    return config_from_mapping(read_config_file(path), source=str(path))


def with_tolerances(cfg: RunConfig, **overrides) -> RunConfig:
    """Return ``cfg`` with selected tolerance fields replaced (``None`` values ignored)."""
    overrides = {k: v for k, v in overrides.items() if v is not None}
    if not overrides:
        return cfg
    tol = replace(cfg.scan.tol, **overrides)
    return replace(cfg, scan=replace(cfg.scan, tol=tol))
