"""Command-line interface: run scenarios, sweeps, plots, and validation.

Exit codes: 0 success, 1 configuration error, 2 runtime invariant breach,
3 I/O error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .scenarios import (
    ConfigError,
    ScenarioConfig,
    SweepConfig,
    parse_config,
    render_plot,
    run_scenario,
    run_sweep,
    write_csv,
)
from .solver import InvariantError


class _Parser(argparse.ArgumentParser):
    """Argument errors map to the configuration-error exit code."""

    def error(self, message: str):
        raise ConfigError(message)


def _load(path: Path) -> ScenarioConfig | SweepConfig:
    return parse_config(path.read_text(encoding="utf-8"))


def _cmd_run(args: argparse.Namespace) -> int:
    config = _load(args.config)
    if isinstance(config, SweepConfig):
        raise ConfigError(f"{args.config} is a sweep document; use the sweep command")
    out = args.out or config.csv_path
    if out is None:
        raise ConfigError("no output path: set 'csv:' in the config or pass --out")
    record, reports = run_scenario(config)
    path = write_csv(record, reports, out, config.measures)
    print(f"wrote {path} ({len(record)} samples)")
    return 0


def _cmd_sweep(args: argparse.Namespace) -> int:
    config = _load(args.config)
    if isinstance(config, ScenarioConfig):
        raise ConfigError(f"{args.config} is a single-run document; use run")
    results, errors = run_sweep(config, args.out)
    for result in results:
        print(f"wrote {result.csv_path} ({len(result.record)} samples)")
    for value, error in errors:
        print(f"error: {config.axis}={value:g}: {error}", file=sys.stderr)
    return 2 if errors else 0


def _cmd_plot(args: argparse.Namespace) -> int:
    columns = [name.strip() for name in args.columns.split(",") if name.strip()]
    path = render_plot(args.csv, columns, args.out)
    print(f"wrote {path}")
    return 0


def _cmd_validate(args: argparse.Namespace) -> int:
    config = _load(args.config)
    if isinstance(config, SweepConfig):
        base = config.base
        print(
            f"ok: {base.model} sweep over {config.axis} "
            f"({len(config.values)} runs)"
        )
    else:
        _, _, integration = config.build()
        print(
            f"ok: {config.model} scenario, {integration.n_steps} steps, "
            f"{integration.n_steps // config.sample_every + 1} samples"
        )
    return 0


def _build_parser() -> _Parser:
    parser = _Parser(
        prog="cavityqed",
        description="Cavity-field dynamics with per-sample correlation measures.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="run one scenario and write its CSV")
    run.add_argument("config", type=Path, help="scenario config file")
    run.add_argument("--out", type=Path, help="override the CSV output path")
    run.set_defaults(handler=_cmd_run)

    sweep = commands.add_parser("sweep", help="run a parameter sweep")
    sweep.add_argument("config", type=Path, help="sweep config file")
    sweep.add_argument("--out", type=Path, help="override the output directory")
    sweep.set_defaults(handler=_cmd_sweep)

    plot = commands.add_parser("plot", help="plot CSV columns against time")
    plot.add_argument("csv", type=Path, help="trajectory CSV file")
    plot.add_argument(
        "--columns", required=True, help="comma-separated column names"
    )
    plot.add_argument("--out", type=Path, required=True, help="SVG output path")
    plot.set_defaults(handler=_cmd_plot)

    validate = commands.add_parser("validate", help="check a config without running")
    validate.add_argument("config", type=Path, help="config file")
    validate.set_defaults(handler=_cmd_validate)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.handler(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except InvariantError as exc:
        print(f"invariant breach: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
