"""Run configuration, parameter sweeps and CSV output.

Config grammar (UTF-8 text, one statement per line)::

    # comment; blank lines ignored; trailing "# ..." stripped
    key = value
    sweep.1 = <param>, <start>, <stop>, <count>
    sweep.2 = <param>, <start>, <stop>, <count>

Parameter keys are the SystemParams fields plus two shorthands:
``kappa_c`` (sets kappa_a and kappa_b) and ``e`` (sets e_l and e_r).
Run keys: ``method`` (analytic|master|both), ``modes`` (a, b or both
comma-separated), ``use_optimal_drive`` (false|true|magnitude),
``reverse_field`` (bool), ``truncation`` (2 or 3), ``output`` (path).
"""
from __future__ import annotations

import concurrent.futures
import dataclasses
import itertools
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .errors import BlockadeError, ConfigError, UndefinedCorrelationError
from .liouville import solve_master
from .model import PARAM_FIELDS, SystemParams
from .truncated import closed_form_amplitudes, g2_analytic, optimal_drive

ALIASES = {"kappa_c": ("kappa_a", "kappa_b"), "e": ("e_l", "e_r")}
AXIS_NAMES = PARAM_FIELDS + tuple(ALIASES)
METHODS = ("analytic", "master", "both")
OPTIMAL_MODES = ("false", "true", "magnitude")
_TRUE = {"true", "yes", "on", "1"}
_FALSE = {"false", "no", "off", "0"}


@dataclass(frozen=True)
class SweepAxis:
    name: str
    start: float
    stop: float
    count: int

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.count)


@dataclass(frozen=True)
class RunSpec:
    """Everything needed to reproduce one table.

    ``use_optimal_drive``: ``"false"`` keeps the configured E and phi,
    ``"magnitude"`` replaces E by E_opt at every grid point, ``"true"``
    replaces both E and phi (phi is never overridden when it is swept).
    ``reverse_field`` swaps a and b *after* the drive is fixed, which is what
    flipping the bias field does to a given experiment.
    """

    base: SystemParams = field(default_factory=SystemParams)
    axes: tuple[SweepAxis, ...] = ()
    method: str = "both"
    modes: tuple[str, ...] = ("a", "b")
    use_optimal_drive: str = "false"
    reverse_field: bool = False
    truncation: int = 2
    output: str | None = None

    def __post_init__(self):
        if len(self.axes) > 2:
            raise ConfigError("at most two sweep axes are supported")
        for ax in self.axes:
            if ax.name not in AXIS_NAMES:
                raise ConfigError(f"cannot sweep unknown parameter {ax.name!r}")
            if ax.count < 2:
                raise ConfigError(f"sweep over {ax.name} needs at least 2 points")
        if len({ax.name for ax in self.axes}) != len(self.axes):
            raise ConfigError("the two sweep axes must differ")
        if self.method not in METHODS:
            raise ConfigError(f"method must be one of {METHODS}, got {self.method!r}")
        if not self.modes or any(m not in ("a", "b") for m in self.modes):
            raise ConfigError(f"modes must be a non-empty subset of a, b; got {self.modes}")
        if self.use_optimal_drive not in OPTIMAL_MODES:
            raise ConfigError(f"use_optimal_drive must be one of {OPTIMAL_MODES}")
        if self.truncation not in (2, 3):
            raise ConfigError(f"truncation must be 2 or 3, got {self.truncation}")

    @property
    def methods(self) -> tuple[str, ...]:
        return ("analytic", "master") if self.method == "both" else (self.method,)

    def replace(self, **changes) -> "RunSpec":
        return dataclasses.replace(self, **changes)

    def grid(self) -> list[tuple[float, ...]]:
        """Grid points in row-major order (first axis outermost)."""
        return list(itertools.product(*(ax.values().tolist() for ax in self.axes)))

    def point_params(self, point) -> SystemParams:
        """Canonical params at a grid point, drive resolved, field reversal applied."""
        return self.resolve_point(point)[0]

    def resolve_point(self, point):
        """``(params, drive condition or None)`` for one grid point."""
        params = _apply(self.base, dict(zip((ax.name for ax in self.axes), point)))
        params = params.normalized()
        swept = {ax.name for ax in self.axes}
        cond = None
        if self.use_optimal_drive != "false":
            cond = optimal_drive(params)
            phi = cond.phi_opt if self.use_optimal_drive == "true" and "phi" not in swept else None
            params = params.with_drive(cond.e_opt, phi)
        if self.reverse_field:
            params = params.swapped()
        return params, cond

    def columns(self) -> list[str]:
        cols = [ax.name for ax in self.axes]
        if self.use_optimal_drive != "false":
            cols += ["e_opt", "phi_opt"]
        for method in self.methods:
            for mode in self.modes:
                cols += [f"g2_{mode}_{method}", f"log10_g2_{mode}_{method}"]
                if method == "master":
                    cols.append(f"n_{mode}_master")
        cols.append("status")
        return cols

    def to_config(self) -> str:
        """Normalized config text; parse_config(to_config()) reproduces the spec."""
        lines = []
        for name in PARAM_FIELDS:
            lines.append(f"{name} = {_fmt(getattr(self.base, name))}")
        if self.base.unit_scale_mhz is not None:
            lines.append(f"unit_scale_mhz = {_fmt(self.base.unit_scale_mhz)}")
        for i, ax in enumerate(self.axes, 1):
            lines.append(f"sweep.{i} = {ax.name}, {_fmt(ax.start)}, {_fmt(ax.stop)}, {ax.count}")
        lines.append(f"method = {self.method}")
        lines.append(f"modes = {', '.join(self.modes)}")
        lines.append(f"use_optimal_drive = {self.use_optimal_drive}")
        lines.append(f"reverse_field = {str(self.reverse_field).lower()}")
        lines.append(f"truncation = {self.truncation}")
        if self.output is not None:
            lines.append(f"output = {self.output}")
        return "\n".join(lines) + "\n"


def _apply(params: SystemParams, values: dict) -> SystemParams:
    changes = {}
    for name, value in values.items():
        for target in ALIASES.get(name, (name,)):
            changes[target] = value
    return params.replace(**changes)


def _fmt(x: float) -> str:
    return repr(float(x))


def _number(text: str, key: str, line: int) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ConfigError(f"{key}: expected a number, got {text!r}", line) from None
    if not math.isfinite(value):
        raise ConfigError(f"{key}: value must be finite, got {text!r}", line)
    return value


def _bool(text: str, key: str, line: int) -> bool:
    low = text.lower()
    if low in _TRUE:
        return True
    if low in _FALSE:
        return False
    raise ConfigError(f"{key}: expected true/false, got {text!r}", line)


def parse_config(text: str) -> RunSpec:
    param_values: dict[str, float] = {}
    axes: dict[int, SweepAxis] = {}
    run: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", lineno)
        key, value = (s.strip() for s in line.split("=", 1))
        if key.startswith("sweep."):
            try:
                slot = int(key.split(".", 1)[1])
            except ValueError:
                raise ConfigError(f"bad sweep key {key!r}", lineno) from None
            if slot not in (1, 2):
                raise ConfigError(f"sweep slot must be 1 or 2, got {slot}", lineno)
            parts = [p.strip() for p in value.split(",")]
            if len(parts) != 4:
                raise ConfigError(f"{key}: expected 'name, start, stop, count'", lineno)
            name = parts[0]
            if name not in AXIS_NAMES:
                raise ConfigError(f"{key}: cannot sweep unknown parameter {name!r}", lineno)
            count = _number(parts[3], key, lineno)
            if count != int(count):
                raise ConfigError(f"{key}: count must be an integer", lineno)
            axes[slot] = SweepAxis(name, _number(parts[1], key, lineno),
                                   _number(parts[2], key, lineno), int(count))
        elif key in PARAM_FIELDS or key in ALIASES or key == "unit_scale_mhz":
            param_values[key] = _number(value, key, lineno)
        elif key == "method":
            run["method"] = value.lower()
        elif key == "modes":
            run["modes"] = tuple(m.strip() for m in value.split(",") if m.strip())
        elif key == "use_optimal_drive":
            low = value.lower()
            if low == "magnitude":
                run["use_optimal_drive"] = "magnitude"
            else:
                run["use_optimal_drive"] = "true" if _bool(value, key, lineno) else "false"
        elif key == "reverse_field":
            run["reverse_field"] = _bool(value, key, lineno)
        elif key == "truncation":
            n = _number(value, key, lineno)
            if n != int(n):
                raise ConfigError("truncation must be an integer", lineno)
            run["truncation"] = int(n)
        elif key == "output":
            run["output"] = value
        else:
            raise ConfigError(f"unknown key {key!r}", lineno)

    if 2 in axes and 1 not in axes:
        raise ConfigError("sweep.2 given without sweep.1")
    try:
        # aliases first so an explicit kappa_a/e_l wins over the shorthand
        ordered = {k: v for k, v in param_values.items() if k in ALIASES}
        ordered.update({k: v for k, v in param_values.items() if k not in ALIASES})
        base = _apply(SystemParams(), ordered)
    except BlockadeError as exc:
        raise ConfigError(str(exc)) from None
    return RunSpec(base=base, axes=tuple(axes[k] for k in sorted(axes)), **run)


def load_config(path) -> RunSpec:
    return parse_config(Path(path).read_text(encoding="utf-8"))


@dataclass
class ResultTable:
    columns: list[str]
    rows: list[list]
    provenance: list[str] = field(default_factory=list)

    def __post_init__(self):
        for row in self.rows:
            if len(row) != len(self.columns):
                raise ValueError(f"row length {len(row)} != {len(self.columns)} columns")

    def column(self, name: str) -> np.ndarray:
        """Numeric column as floats; sentinel (None) entries become nan."""
        i = self.columns.index(name)
        return np.array([np.nan if r[i] is None else r[i] for r in self.rows], dtype=float)


def _log10(x):
    return math.log10(x) if x is not None and x > 0 else None


def evaluate_point(spec: RunSpec, point) -> list:
    """One table row. Solver failures go to the status column."""
    row = list(point)
    notes = []
    try:
        params, cond = spec.resolve_point(point)
    except BlockadeError as exc:
        n_obs = len(spec.columns()) - len(row) - 1
        return row + [None] * n_obs + [f"error:{type(exc).__name__}"]
    if cond is not None:
        row += [cond.e_opt, None if cond.degenerate else cond.phi_opt]

    for method in spec.methods:
        if method == "analytic":
            try:
                amps = closed_form_amplitudes(params)
            except BlockadeError as exc:
                amps = None
                notes.append(f"analytic:{type(exc).__name__}")
            for mode in spec.modes:
                g2 = None
                if amps is not None:
                    try:
                        g2 = float(g2_analytic(amps, mode))
                    except UndefinedCorrelationError:
                        notes.append(f"analytic_{mode}:decoupled")
                row += [g2, _log10(g2)]
        else:
            try:
                res = solve_master(params, spec.truncation, spec.modes)
            except BlockadeError as exc:
                res = None
                notes.append(f"master:{type(exc).__name__}")
            for mode in spec.modes:
                if res is None:
                    row += [None, None, None]
                    continue
                g2 = res.g2[mode]
                g2 = None if math.isnan(g2) else float(g2)
                if g2 is None:
                    notes.append(f"master_{mode}:empty")
                row += [g2, _log10(g2), float(res.occupation[mode])]
    row.append(";".join(notes) if notes else "ok")
    return row


def run_sweep(spec: RunSpec, jobs: int = 1) -> ResultTable:
    points = spec.grid()
    if jobs > 1 and len(points) > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(evaluate_point, itertools.repeat(spec), points, chunksize=4))
    else:
        rows = [evaluate_point(spec, p) for p in points]
    provenance = [f"chiralblockade {__version__}", "config:"]
    provenance += ["  " + line for line in spec.to_config().splitlines()]
    return ResultTable(spec.columns(), rows, provenance)


def format_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    # 17 significant digits, always with a decimal point, locale independent
    return format(float(value), ".16e")


def write_csv(table: ResultTable, path) -> None:
    lines = [f"# {p}" for p in table.provenance]
    lines.append(",".join(table.columns))
    for row in table.rows:
        lines.append(",".join(format_value(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_csv(path) -> ResultTable:
    """Inverse of write_csv: numbers back to float, empty fields to None."""
    provenance, header, rows = [], None, []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.startswith("#"):
            provenance.append(line[2:] if line.startswith("# ") else line[1:])
        elif header is None:
            header = line.split(",")
        elif line:
            row = []
            for cell in line.split(","):
                if cell == "":
                    row.append(None)
                else:
                    try:
                        row.append(float(cell))
                    except ValueError:
                        row.append(cell)
            rows.append(row)
    return ResultTable(header or [], rows, provenance)
