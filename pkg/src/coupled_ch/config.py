"""
Run configuration: a flat ``key = value`` document with dotted sections.

Grammar (one entry per line)::

    # comment            blank lines and lines starting with '#' are ignored
    key = value          key is [a-z_]+ optionally prefixed by 'section.'

Values are parsed as: ``true``/``false`` -> bool, bracketed comma-separated
lists ``[a, b, c]`` -> list of numbers, anything parseable by ``int`` or
``float`` -> number, otherwise a bare string.  Numbers are written back with
17 significant digits, so parse -> serialize -> parse is exact.

Recognised keys (defaults in parentheses)::

    n (256)  t_end (1.0)  cfl (0.3)  dt_max (1e-3)  dt_min (1e-9)
    slope_threshold (1e4)  dealias (true)  output (out)  output_stride (10)
    track (auto | [x0, ...])  apriori (true)

    initial.kind      sine | bump | fourier | file
    sine:    initial.amp_u initial.amp_v initial.phase_u initial.phase_v initial.mode
    bump:    initial.a initial.kappa initial.center initial.v_mode (zero | equal)
    fourier: initial.u_coeffs initial.v_coeffs   [re0, im0, re1, im1, ...]
    file:    initial.path                         CSV with header x,u,v

    sweep.parameter (initial.kappa)  sweep.min  sweep.max  sweep.count (1)
    sweep.simulate (false)  sweep.workers (1)
"""

from __future__ import annotations

import csv
import math
import re
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from .dynamics import SolutionState
from .evolution import StepControl
from .grid import PeriodicGrid, _is_power_of_two

__all__ = [
    "ConfigError",
    "InitialSpec",
    "SweepSpec",
    "RunConfig",
    "parse_config",
    "serialize_config",
    "load_config",
    "build_initial",
    "format_number",
]

_KEY = re.compile(r"^[a-z_]+(\.[a-z_]+)?$")


class ConfigError(ValueError):
    """Invalid configuration; the message starts with the offending key path."""

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


def format_number(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


@dataclass(frozen=True)
class InitialSpec:
    kind: str = "sine"
    # sine
    amp_u: float = 1.0
    amp_v: float = 0.0
    phase_u: float = 0.0
    phase_v: float = 0.0
    mode: int = 1
    # bump
    a: float = 1.0
    kappa: float = 10.0
    center: float = 0.5
    v_mode: str = "equal"
    # fourier
    u_coeffs: tuple = ()
    v_coeffs: tuple = ()
    # file
    path: str = ""

    _KIND_KEYS = {
        "sine": ("amp_u", "amp_v", "phase_u", "phase_v", "mode"),
        "bump": ("a", "kappa", "center", "v_mode"),
        "fourier": ("u_coeffs", "v_coeffs"),
        "file": ("path",),
    }

    def relevant_keys(self):
        return ("kind",) + self._KIND_KEYS[self.kind]


@dataclass(frozen=True)
class SweepSpec:
    parameter: str = "initial.kappa"
    min: float = 1.0
    max: float = 1.0
    count: int = 1
    simulate: bool = False
    workers: int = 1

    def values(self) -> np.ndarray:
        if self.count == 1:
            return np.array([self.min])
        return np.linspace(self.min, self.max, self.count)


@dataclass(frozen=True)
class RunConfig:
    n: int = 256
    t_end: float = 1.0
    cfl: float = 0.3
    dt_max: float = 1e-3
    dt_min: float = 1e-9
    slope_threshold: float = 1e4
    dealias: bool = True
    output: str = "out"
    output_stride: int = 10
    track: object = "auto"
    apriori: bool = True
    initial: InitialSpec = field(default_factory=InitialSpec)
    sweep: SweepSpec = field(default_factory=SweepSpec)

    def step_control(self) -> StepControl:
        return StepControl(self.cfl, self.dt_max, self.dt_min, self.slope_threshold, self.dealias)

    def grid(self) -> PeriodicGrid:
        return PeriodicGrid(self.n)


# ----------------------------------------------------------------------------
# parsing
# ----------------------------------------------------------------------------


def _parse_scalar(text: str):
    low = text.lower()
    if low == "true":
        return True
    if low == "false":
        return False
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def _parse_value(text: str):
    text = text.strip()
    if text.startswith("[") and text.endswith("]"):
        inner = text[1:-1].strip()
        if not inner:
            return []
        return [_parse_scalar(item.strip()) for item in inner.split(",")]
    return _parse_scalar(text)


def _read_pairs(text: str) -> dict:
    pairs = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}", f"expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not _KEY.match(key):
            raise ConfigError(key, "malformed key")
        if key in pairs:
            raise ConfigError(key, "duplicate key")
        pairs[key] = _parse_value(value)
    return pairs


def _coerce(key: str, value, kind: type):
    if kind is bool:
        if not isinstance(value, bool):
            raise ConfigError(key, f"expected true/false, got {value!r}")
        return value
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(key, f"expected an integer, got {value!r}")
        return value
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(key, f"expected a number, got {value!r}")
        if not math.isfinite(value):
            raise ConfigError(key, "must be finite")
        return float(value)
    if kind is str:
        if not isinstance(value, str):
            raise ConfigError(key, f"expected a string, got {value!r}")
        return value
    if kind is tuple:
        if not isinstance(value, list) or not all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in value
        ):
            raise ConfigError(key, f"expected a list of numbers, got {value!r}")
        return tuple(float(v) for v in value)
    raise AssertionError(kind)


_TOP_TYPES = {
    "n": int,
    "t_end": float,
    "cfl": float,
    "dt_max": float,
    "dt_min": float,
    "slope_threshold": float,
    "dealias": bool,
    "output": str,
    "output_stride": int,
    "apriori": bool,
}
_INITIAL_TYPES = {
    "kind": str,
    "amp_u": float,
    "amp_v": float,
    "phase_u": float,
    "phase_v": float,
    "mode": int,
    "a": float,
    "kappa": float,
    "center": float,
    "v_mode": str,
    "u_coeffs": tuple,
    "v_coeffs": tuple,
    "path": str,
}
_SWEEP_TYPES = {
    "parameter": str,
    "min": float,
    "max": float,
    "count": int,
    "simulate": bool,
    "workers": int,
}


def parse_config(text: str) -> RunConfig:
    pairs = _read_pairs(text)
    top, initial, sweep = {}, {}, {}
    for key, value in pairs.items():
        if key == "track":
            top["track"] = _parse_track(value)
        elif key in _TOP_TYPES:
            top[key] = _coerce(key, value, _TOP_TYPES[key])
        elif key.startswith("initial.") and key[8:] in _INITIAL_TYPES:
            initial[key[8:]] = _coerce(key, value, _INITIAL_TYPES[key[8:]])
        elif key.startswith("sweep.") and key[6:] in _SWEEP_TYPES:
            sweep[key[6:]] = _coerce(key, value, _SWEEP_TYPES[key[6:]])
        else:
            raise ConfigError(key, "unknown key")
    cfg = RunConfig(**top, initial=InitialSpec(**initial), sweep=SweepSpec(**sweep))
    validate(cfg)
    return cfg


def _parse_track(value):
    if value == "auto":
        return "auto"
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        value = [value]
    if isinstance(value, list) and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value):
        return tuple(float(v) for v in value)
    raise ConfigError("track", f"expected 'auto' or a list of positions, got {value!r}")


def validate(cfg: RunConfig) -> None:
    if not _is_power_of_two(cfg.n) or cfg.n < 16:
        raise ConfigError("n", "n must be a power of two >= 16")
    for key in ("t_end", "cfl", "dt_max", "dt_min", "slope_threshold"):
        if not getattr(cfg, key) > 0.0:
            raise ConfigError(key, "must be positive")
    if cfg.cfl > 1.0:
        raise ConfigError("cfl", "must not exceed 1")
    if not cfg.dt_min < cfg.dt_max:
        raise ConfigError("dt_min", "must be smaller than dt_max")
    if cfg.output_stride < 1:
        raise ConfigError("output_stride", "must be positive")
    if cfg.track != "auto" and any(not math.isfinite(x) for x in cfg.track):
        raise ConfigError("track", "positions must be finite")

    ini = cfg.initial
    if ini.kind not in InitialSpec._KIND_KEYS:
        raise ConfigError("initial.kind", f"unknown kind {ini.kind!r}")
    if ini.kind == "bump":
        if not ini.kappa > 0.0:
            raise ConfigError("initial.kappa", "must be positive")
        if ini.v_mode not in ("zero", "equal"):
            raise ConfigError("initial.v_mode", "must be 'zero' or 'equal'")
    if ini.kind == "sine" and ini.mode < 0:
        raise ConfigError("initial.mode", "must be non-negative")
    if ini.kind == "fourier":
        for key in ("u_coeffs", "v_coeffs"):
            coeffs = getattr(ini, key)
            if len(coeffs) % 2:
                raise ConfigError(f"initial.{key}", "needs (re, im) pairs")
            if len(coeffs) >= 2 and coeffs[1] != 0.0:
                raise ConfigError(f"initial.{key}", "mean coefficient must be real (Hermitian symmetry)")
            if len(coeffs) // 2 > cfg.n // 2:
                raise ConfigError(f"initial.{key}", "more modes than the grid resolves")
    if ini.kind == "file" and not ini.path:
        raise ConfigError("initial.path", "required for kind 'file'")

    sw = cfg.sweep
    if sw.count < 1:
        raise ConfigError("sweep.count", "must be at least 1")
    if sw.workers < 1:
        raise ConfigError("sweep.workers", "must be at least 1")
    if sw.parameter not in _sweepable():
        raise ConfigError("sweep.parameter", f"cannot sweep {sw.parameter!r}")


def _sweepable():
    return {f"initial.{k}" for k, t in _INITIAL_TYPES.items() if t is float}


def serialize_config(cfg: RunConfig) -> str:
    lines = []
    for f in fields(RunConfig):
        if f.name in ("initial", "sweep"):
            continue
        value = getattr(cfg, f.name)
        lines.append(f"{f.name} = {_format_value(value)}")
    for key in cfg.initial.relevant_keys():
        lines.append(f"initial.{key} = {_format_value(getattr(cfg.initial, key))}")
    for f in fields(SweepSpec):
        lines.append(f"sweep.{f.name} = {_format_value(getattr(cfg.sweep, f.name))}")
    return "\n".join(lines) + "\n"


def _format_value(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, tuple):
        return "[" + ", ".join(format_number(v) for v in value) + "]"
    return format_number(value)


def load_config(path) -> RunConfig:
    return parse_config(Path(path).read_text())


def with_parameter(cfg: RunConfig, dotted: str, value: float) -> RunConfig:
    """Copy of ``cfg`` with one ``initial.*`` number replaced."""
    section, key = dotted.split(".", 1)
    if section != "initial":
        raise ConfigError(dotted, "only initial.* parameters can be swept")
    return replace(cfg, initial=replace(cfg.initial, **{key: float(value)}))


# ----------------------------------------------------------------------------
# initial data
# ----------------------------------------------------------------------------


def _series(grid: PeriodicGrid, coeffs) -> np.ndarray:
    """c_0 + 2 Re sum_{k>=1} c_k e^{2 pi i k x} from [re0, im0, re1, im1, ...]."""
    x = grid.nodes
    c = np.asarray(coeffs, dtype=float).reshape(-1, 2)
    out = np.full(grid.n, c[0, 0]) if len(c) else np.zeros(grid.n)
    for k in range(1, len(c)):
        z = complex(c[k, 0], c[k, 1])
        out = out + 2.0 * (z * np.exp(2j * np.pi * k * x)).real
    return out


def build_initial(spec: InitialSpec, grid: PeriodicGrid) -> SolutionState:
    x = grid.nodes
    for f in fields(InitialSpec):
        value = getattr(spec, f.name)
        if isinstance(value, float) and not math.isfinite(value):
            raise ConfigError(f"initial.{f.name}", "must be finite")
    if spec.kind == "sine":
        u = spec.amp_u * np.sin(2.0 * np.pi * spec.mode * x + spec.phase_u)
        v = spec.amp_v * np.sin(2.0 * np.pi * spec.mode * x + spec.phase_v)
    elif spec.kind == "bump":
        u = spec.a * np.exp(spec.kappa * (np.cos(2.0 * np.pi * (x - spec.center)) - 1.0))
        v = u.copy() if spec.v_mode == "equal" else np.zeros(grid.n)
    elif spec.kind == "fourier":
        u, v = _series(grid, spec.u_coeffs), _series(grid, spec.v_coeffs)
    elif spec.kind == "file":
        u, v = read_field_file(spec.path, grid)
    else:
        raise ConfigError("initial.kind", f"unknown kind {spec.kind!r}")
    return SolutionState.from_arrays(grid, u, v)


def read_field_file(path, grid: PeriodicGrid):
    """Read a CSV with header ``x,u,v`` whose rows sit on the grid nodes."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or [h.strip() for h in reader.fieldnames] != ["x", "u", "v"]:
            raise ConfigError("initial.path", "field file needs the header x,u,v")
        rows = [(float(r["x"]), float(r["u"]), float(r["v"])) for r in reader]
    if len(rows) != grid.n:
        raise ConfigError("initial.path", f"expected {grid.n} rows, found {len(rows)}")
    data = np.array(rows)
    if not np.allclose(data[:, 0], grid.nodes, atol=1e-12):
        raise ConfigError("initial.path", "x column must list the grid nodes j/n")
    if not np.all(np.isfinite(data)):
        raise ConfigError("initial.path", "non-finite samples")
    return data[:, 1], data[:, 2]


def write_field_file(path, state: SolutionState) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x", "u", "v"])
        for x, u, v in zip(state.grid.nodes, state.u.values, state.v.values):
            w.writerow([format_number(x), format_number(u), format_number(v)])
