"""Scenario runner: config parsing, trajectory + measures execution, CSV
and plot emission.

Configs are flat ``key: value`` text documents (``#`` starts a comment).
Units: frequencies and rates in s^-1, times in s, angles in rad.  Angle
values accept ``pi`` forms (``pi/12``, ``0.5pi``); for the two-level
cavity model, rate values accept coupling multiples (``0.5g``, ``2g``).
"""

from __future__ import annotations

import csv
import dataclasses
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .measures import CorrelationReport, discord
from .models import (
    JcmParams,
    ModelSystem,
    OhPlusParams,
    build_jcm,
    build_ohplus,
    initial_state_jcm,
    initial_state_ohplus,
)
from .solver import (
    DEFAULT_COUPLING_STEP,
    IntegrationConfig,
    InvariantError,
    TrajectoryRecord,
    evolve,
)

MEASURE_NAMES = ("entropy", "concurrence", "mutual_info", "classical_corr", "discord")

# Snapshots from the first-order splitting carry eigenvalue defects up to
# ~1e-4 at the default step sizes, so per-sample measures run with a wide
# clamp; genuinely corrupted states still fail far below this.
TRAJECTORY_CLAMP_FLOOR = -1e-3

# A sweep summary reports when the discord trace has settled below this level.
DISCORD_SETTLE_LEVEL = 0.01

MAX_STEPS = 10**8

_MODEL_KEYS = {
    "jcm": ("hbar", "omega", "g", "gamma", "alpha"),
    "ohplus": (
        "hbar",
        "omega",
        "omega_b",
        "g_b0",
        "g_b1",
        "g_a0",
        "g_a1",
        "gamma",
        "phonon_on_near",
    ),
}
_INTEGRATION_KEYS = ("dt", "t_max", "sample_every", "renormalize")
_OUTPUT_KEYS = ("measures", "measured_side", "csv", "out_dir")
_SWEEP_KEYS = ("axis", "values")

_FLOAT = r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_PI_FORM = re.compile(rf"^(?:({_FLOAT})\s*)?pi(?:\s*/\s*({_FLOAT}))?$")
_COUPLING_FORM = re.compile(rf"^(?:({_FLOAT})\s*)?g$")

# Horizon and stride defaults for the molecular model.  The generic
# coupling-scale step would be hbar*1e-3/g_a0 = 5e-12 s here, a
# thirty-million-step run per trajectory; 1e-10 s still keeps the
# stiffest phase advance at g_a0*dt/hbar = 0.02 per step while making a
# full 0.15 ms horizon take about a million steps.  The stride places
# samples a third of a photon-electron swap half-period apart, so the
# transient entanglement peaks land on the sample grid.
_OHPLUS_DT = 1e-10
_OHPLUS_T_MAX = 1.5e-4
_OHPLUS_SAMPLE_EVERY = 1309

_JCM_SAMPLE_EVERY = 100


class ConfigError(ValueError):
    """Raised for unparseable or invalid scenario configuration."""


@dataclass(frozen=True)
class ScenarioConfig:
    """One fully resolved run: model parameters, integration grid, outputs."""

    model: str
    params: JcmParams | OhPlusParams
    dt: float
    t_max: float
    sample_every: int
    renormalize: bool
    measures: tuple[str, ...]
    measured_side: str
    csv_path: Path | None = None

    def build(self) -> tuple[ModelSystem, np.ndarray, IntegrationConfig]:
        """Materialize the model, initial state, and integration config."""
        if self.model == "jcm":
            system = build_jcm(self.params)
            rho0 = initial_state_jcm(self.params.alpha)
        else:
            system = build_ohplus(self.params)
            rho0 = initial_state_ohplus()
        try:
            integration = IntegrationConfig(
                dt=self.dt,
                t_max=self.t_max,
                sample_every=self.sample_every,
                renormalize=self.renormalize,
                hbar=self.params.hbar,
                g_max=system.g_max,
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        return system, rho0, integration


@dataclass(frozen=True)
class SweepConfig:
    """A family of runs varying one model parameter."""

    base: ScenarioConfig
    axis: str
    values: tuple[float, ...]
    out_dir: Path | None = None

    def runs(self) -> tuple[ScenarioConfig, ...]:
        configs = []
        for value in self.values:
            try:
                params = dataclasses.replace(self.base.params, **{self.axis: value})
            except ValueError as exc:
                raise ConfigError(f"values: {self.axis}={value:g}: {exc}") from exc
            configs.append(
                dataclasses.replace(self.base, params=params, csv_path=None)
            )
        return tuple(configs)


def _parse_scalar(
    key: str, token: str, *, allow_pi: bool = False, coupling: float | None = None
) -> float:
    try:
        return float(token)
    except ValueError:
        pass
    if allow_pi:
        match = _PI_FORM.match(token)
        if match:
            value = np.pi * float(match.group(1) or 1.0)
            if match.group(2):
                value /= float(match.group(2))
            return value
    match = _COUPLING_FORM.match(token)
    if match:
        if coupling is None:
            raise ConfigError(
                f"{key}: coupling multiple '{token}' only applies to the jcm model"
            )
        return float(match.group(1) or 1.0) * coupling
    raise ConfigError(f"{key}: cannot parse number '{token}'")


def _parse_bool(key: str, token: str) -> bool:
    lowered = token.lower()
    if lowered in ("true", "false"):
        return lowered == "true"
    raise ConfigError(f"{key}: expected true or false, got '{token}'")


def _parse_int(key: str, token: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise ConfigError(f"{key}: expected an integer, got '{token}'") from None


def _read_entries(text: str) -> dict[str, tuple[str, int]]:
    entries: dict[str, tuple[str, int]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if ":" not in line:
            raise ConfigError(f"line {lineno}: expected 'key: value', got '{line}'")
        key, value = (part.strip() for part in line.split(":", 1))
        if not key or not value:
            raise ConfigError(f"line {lineno}: expected 'key: value', got '{line}'")
        if key in entries:
            raise ConfigError(f"line {lineno}: duplicate key '{key}'")
        entries[key] = (value, lineno)
    return entries


def parse_config(text: str) -> ScenarioConfig | SweepConfig:
    """Parse a scenario or sweep document, applying model-specific defaults."""
    entries = _read_entries(text)
    if "model" not in entries:
        raise ConfigError("missing required key 'model'")
    model = entries.pop("model")[0]
    if model not in _MODEL_KEYS:
        raise ConfigError(f"model: expected jcm or ohplus, got '{model}'")

    is_sweep = any(key in entries for key in _SWEEP_KEYS)
    known = set(_MODEL_KEYS[model]) | set(_INTEGRATION_KEYS) | set(_OUTPUT_KEYS)
    if is_sweep:
        known |= set(_SWEEP_KEYS)
    for key, (_, lineno) in entries.items():
        if key not in known:
            raise ConfigError(f"line {lineno}: unknown key '{key}' for model {model}")

    def take(key: str) -> str | None:
        return entries[key][0] if key in entries else None

    # Model parameters.  The coupling must be known before rate values can
    # use multiples of it, so resolve it first.
    coupling = None
    if model == "jcm":
        coupling = _parse_scalar("g", take("g") or "1e6")
    kwargs: dict[str, object] = {}
    for key in _MODEL_KEYS[model]:
        token = take(key)
        if token is None:
            continue
        if key == "phonon_on_near":
            kwargs[key] = _parse_bool(key, token)
        else:
            kwargs[key] = _parse_scalar(
                key,
                token,
                allow_pi=key == "alpha",
                coupling=coupling if key == "gamma" else None,
            )
    try:
        params = JcmParams(**kwargs) if model == "jcm" else OhPlusParams(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc

    # Integration grid, with model-specific defaults.
    if model == "jcm":
        default_dt = DEFAULT_COUPLING_STEP * params.hbar / params.g
        default_t_max = 5.0 * np.pi * params.hbar / params.g
        default_stride = _JCM_SAMPLE_EVERY
    else:
        default_dt = _OHPLUS_DT
        default_t_max = _OHPLUS_T_MAX
        default_stride = _OHPLUS_SAMPLE_EVERY
    dt = _parse_scalar("dt", take("dt")) if "dt" in entries else default_dt
    t_max = _parse_scalar("t_max", take("t_max")) if "t_max" in entries else default_t_max
    stride = (
        _parse_int("sample_every", take("sample_every"))
        if "sample_every" in entries
        else default_stride
    )
    renormalize = (
        _parse_bool("renormalize", take("renormalize"))
        if "renormalize" in entries
        else True
    )
    if dt > 0.0 and t_max / dt > MAX_STEPS:
        raise ConfigError(
            f"t_max/dt = {t_max / dt:.3g} steps exceeds the {MAX_STEPS:.0e} cap"
        )

    # Measures and measurement side.
    if "measures" in entries:
        requested = tuple(
            item.strip() for item in take("measures").strip("[]").split(",")
        )
        for name in requested:
            if name not in MEASURE_NAMES:
                raise ConfigError(
                    f"measures: unknown measure '{name}' "
                    f"(choose from {', '.join(MEASURE_NAMES)})"
                )
        measures = tuple(name for name in MEASURE_NAMES if name in requested)
    else:
        measures = MEASURE_NAMES
    if model == "ohplus":
        if "concurrence" in measures:
            if "measures" in entries:
                raise ConfigError(
                    "measures: concurrence requires two two-level parts (jcm)"
                )
            measures = tuple(name for name in measures if name != "concurrence")
    measured_side = take("measured_side") or "A"
    if measured_side not in ("A", "B"):
        raise ConfigError(f"measured_side: expected A or B, got '{measured_side}'")
    if model == "ohplus" and measured_side != "A":
        raise ConfigError(
            "measured_side: only the two-level side A is measurable for ohplus"
        )

    csv_path = Path(take("csv")) if "csv" in entries else None
    scenario = ScenarioConfig(
        model=model,
        params=params,
        dt=dt,
        t_max=t_max,
        sample_every=stride,
        renormalize=renormalize,
        measures=measures,
        measured_side=measured_side,
        csv_path=csv_path,
    )
    scenario.build()  # surface integration-grid problems at parse time

    if not is_sweep:
        return scenario

    for key in _SWEEP_KEYS:
        if key not in entries:
            raise ConfigError(f"sweep document missing required key '{key}'")
    axis = take("axis")
    if axis not in ("alpha", "gamma"):
        raise ConfigError(f"axis: expected alpha or gamma, got '{axis}'")
    if axis == "alpha" and model != "jcm":
        raise ConfigError("axis: alpha only applies to the jcm model")
    if "discord" not in measures:
        raise ConfigError("sweep summary requires the discord measure")
    tokens = [item.strip() for item in take("values").strip("[]").split(",")]
    if not any(tokens):
        raise ConfigError("values: expected a non-empty list")
    values = tuple(
        _parse_scalar(
            "values",
            token,
            allow_pi=axis == "alpha",
            coupling=coupling if axis == "gamma" else None,
        )
        for token in tokens
    )
    out_dir = Path(take("out_dir")) if "out_dir" in entries else None
    sweep = SweepConfig(base=scenario, axis=axis, values=values, out_dir=out_dir)
    for config in sweep.runs():
        config.build()
    return sweep


def run_scenario(
    config: ScenarioConfig,
) -> tuple[TrajectoryRecord, list[CorrelationReport]]:
    """Evolve the configured model and measure every recorded snapshot."""
    system, rho0, integration = config.build()
    record = evolve(rho0, system, integration)
    reports = []
    for index, state in enumerate(record.states):
        try:
            reports.append(
                discord(
                    state,
                    split=system.split,
                    measured=config.measured_side,
                    clamp_floor=TRAJECTORY_CLAMP_FLOOR,
                )
            )
        except ValueError as exc:
            raise InvariantError(
                f"measures failed at sample {index} "
                f"(t={record.times[index]:.6e} s): {exc}"
            ) from exc
    return record, reports


_REPORT_COLUMNS = (
    "S_A",
    "S_B",
    "S_AB",
    "concurrence",
    "mutual_info",
    "classical_corr",
    "discord",
)


def _report_fields(
    report: CorrelationReport, measures: tuple[str, ...]
) -> dict[str, float | None]:
    fields: dict[str, float | None] = dict.fromkeys(_REPORT_COLUMNS)
    if "entropy" in measures:
        fields["S_A"] = report.s_a
        fields["S_B"] = report.s_b
        fields["S_AB"] = report.s_ab
    if "concurrence" in measures:
        fields["concurrence"] = report.concurrence
    if "mutual_info" in measures:
        fields["mutual_info"] = report.mutual_info
    if "classical_corr" in measures:
        fields["classical_corr"] = report.classical_corr
    if "discord" in measures:
        fields["discord"] = report.discord
    return fields


def _format(value: float) -> str:
    return format(value, ".12g")


def write_csv(
    record: TrajectoryRecord,
    reports: list[CorrelationReport],
    path: Path | str,
    measures: tuple[str, ...] = MEASURE_NAMES,
) -> Path:
    """Write one trajectory as CSV: time, populations, then measure columns."""
    if len(reports) != len(record):
        raise ValueError(
            f"got {len(reports)} reports for {len(record)} snapshots"
        )
    path = Path(path)
    if path.parent and not path.parent.exists():
        path.parent.mkdir(parents=True, exist_ok=True)
    header = ("t", *record.basis_labels, *_REPORT_COLUMNS)
    tolerance = abs(TRAJECTORY_CLAMP_FLOOR)
    lines = [",".join(header)]
    for index, report in enumerate(reports):
        report.validate(tolerance)
        populations = record.populations[index]
        if abs(populations.sum() - 1.0) > 1e-6:
            raise InvariantError(
                f"row {index}: populations sum to {populations.sum():.9f}"
            )
        fields = _report_fields(report, measures)
        row = [_format(record.times[index])]
        row.extend(_format(p) for p in populations)
        row.extend(
            "" if fields[name] is None else _format(fields[name])
            for name in _REPORT_COLUMNS
        )
        lines.append(",".join(row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def render_plot(
    csv_path: Path | str, columns: list[str], out_path: Path | str
) -> Path:
    """Plot selected CSV columns against time as a deterministic SVG."""
    if not columns:
        raise ConfigError("no columns selected for plotting")
    csv_path, out_path = Path(csv_path), Path(out_path)
    with open(csv_path, newline="", encoding="utf-8") as handle:
        rows = list(csv.reader(handle))
    if not rows:
        raise ConfigError(f"{csv_path}: empty CSV")
    header, data = rows[0], rows[1:]
    if "t" not in header:
        raise ConfigError(f"{csv_path}: missing time column 't'")
    missing = [name for name in columns if name not in header]
    if missing:
        raise ConfigError(f"{csv_path}: missing columns {', '.join(missing)}")
    time_index = header.index("t")
    series = {}
    for name in columns:
        column = header.index(name)
        points = [
            (float(row[time_index]), float(row[column]))
            for row in data
            if row[column] != ""
        ]
        if not points:
            raise ConfigError(f"{csv_path}: column '{name}' has no data")
        series[name] = points

    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    with plt.rc_context({"svg.hashsalt": "cavityqed"}):
        figure, axes = plt.subplots(figsize=(8.0, 4.5))
        try:
            for name, points in series.items():
                times, values = zip(*points)
                axes.plot(times, values, label=name)
            axes.set_xlabel("t (s)")
            axes.legend()
            axes.grid(True, alpha=0.3)
            figure.tight_layout()
            if out_path.parent and not out_path.parent.exists():
                out_path.parent.mkdir(parents=True, exist_ok=True)
            figure.savefig(out_path, format="svg", metadata={"Date": None})
        finally:
            plt.close(figure)
    return out_path


def settle_time(
    times: np.ndarray, discords: np.ndarray, level: float = DISCORD_SETTLE_LEVEL
) -> float | None:
    """First sampled time after which the discord trace stays below level.

    Returns the first sample time if the trace never reaches the level,
    and None if it is still at or above the level at the final sample.
    """
    above = np.nonzero(discords >= level)[0]
    if len(above) == 0:
        return float(times[0])
    if above[-1] == len(discords) - 1:
        return None
    return float(times[above[-1] + 1])


@dataclass(frozen=True)
class SweepRunResult:
    """Outcome of one sweep member, with its summary statistics."""

    value: float
    csv_path: Path
    record: TrajectoryRecord
    reports: list[CorrelationReport]
    min_discord: float
    settle: float | None


def run_sweep(
    sweep: SweepConfig, out_dir: Path | str | None = None
) -> tuple[list[SweepRunResult], list[tuple[float, Exception]]]:
    """Run every sweep member, write per-run CSVs plus a summary CSV.

    Failed members are collected and returned; surviving members are still
    written.  The summary has one row per surviving member.
    """
    directory = Path(out_dir) if out_dir is not None else sweep.out_dir
    if directory is None:
        raise ConfigError("sweep output directory not set (out_dir)")
    directory.mkdir(parents=True, exist_ok=True)
    results: list[SweepRunResult] = []
    errors: list[tuple[float, Exception]] = []
    for value, config in zip(sweep.values, sweep.runs()):
        try:
            record, reports = run_scenario(config)
            csv_path = directory / f"run_{sweep.axis}_{_format(value)}.csv"
            write_csv(record, reports, csv_path, config.measures)
        except (InvariantError, ValueError) as exc:
            errors.append((value, exc))
            continue
        discords = np.array([report.discord for report in reports])
        results.append(
            SweepRunResult(
                value=value,
                csv_path=csv_path,
                record=record,
                reports=reports,
                min_discord=float(discords.min()),
                settle=settle_time(record.times, discords),
            )
        )
    summary = ["axis_value,min_discord,time_to_discord_below_0.01"]
    for result in results:
        settled = "" if result.settle is None else _format(result.settle)
        summary.append(
            f"{_format(result.value)},{_format(result.min_discord)},{settled}"
        )
    (directory / "summary.csv").write_text("\n".join(summary) + "\n", encoding="utf-8")
    return results, errors
