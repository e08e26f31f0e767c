"""Command-line front end for the sweep experiments.

Subcommands::

    rate-region      achieved (weak, strong) rate pairs vs the rate target
    outage-rate      weak-user outage probability vs the rate target
    rate-antennas    mean strong-user rate vs the relay antenna count
    outage-antennas  weak-user outage probability vs the relay antenna count
    verify           run the package's test suite (needs a source checkout)

Every config-file key (see the harness module docstring for the grammar)
is also settable by a flag, and flags override the file.  ``--out -`` or no
``--out`` prints the CSV to stdout; run summaries go to stderr.

Exit codes: 0 success; 1 configuration error; 2 run flagged (more than 10%
of design trials hit solver errors); 3 output I/O error.
"""

from __future__ import annotations

import argparse
import subprocess
import sys
from pathlib import Path

from .errors import ValidationError
from .harness import build_config, emit_csv, parse_config, run_sweep

__all__ = ["build_parser", "main"]

_KIND_BY_COMMAND = {
    "rate-region": "rate_region",
    "rate-antennas": "rate_vs_antennas",
    "outage-rate": "outage_vs_rate",
    "outage-antennas": "outage_vs_antennas",
}

# (flag, config key, metavar, help)
_VALUE_FLAGS = (
    ("--seed", "seed", "U64", "base seed; trial t uses seed + t"),
    ("--trials", "trials", "N", "channel realizations per grid point"),
    ("--ps-db", "ps_db", "F", "source power budget in dB"),
    ("--rdmin-grid", "rdmin_grid", "A:B:STEP",
     "rate-target grid (start:stop:step or v1,v2,...)"),
    ("--antenna-grid", "antenna_grid", "LIST",
     "relay antenna counts for antenna sweeps (comma list)"),
    ("--rd-min", "rd_min", "F", "fixed rate target for antenna sweeps"),
    ("--schemes", "schemes", "LIST",
     "comma list drawn from optimal,zf,direct"),
    ("--m", "m", "N", "source antennas"),
    ("--n", "n", "N", "relay antennas (rate-target sweeps)"),
    ("--eta", "eta", "F", "energy-harvesting efficiency"),
    ("--sigma-d2", "sigma_d2", "F", "weak-user noise variance"),
    ("--sigma-r2", "sigma_r2", "F", "relay RF-front-end noise variance"),
    ("--sigma-r2-tilde", "sigma_r2_tilde", "F",
     "relay conversion noise variance"),
    ("--pl-sr-db", "pl_sr_db", "F", "source->relay path loss in dB"),
    ("--pl-sd-db", "pl_sd_db", "F", "source->weak-user path loss in dB"),
    ("--pl-rd-db", "pl_rd_db", "F", "relay->weak-user path loss in dB"),
    ("--restarts", "restarts", "N", "receive-filter starts per instance"),
    ("--out", "out", "PATH", "CSV output path ('-' for stdout)"),
)


class _Parser(argparse.ArgumentParser):
    """argparse exits with status 2 on usage errors; this CLI reserves 2
    for flagged runs, so usage errors are remapped to the config-error
    code."""

    def error(self, message: str) -> None:  # noqa: A003 - argparse API
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="noma_relay",
                     description="Transceiver-design sweep experiments for "
                                 "the wireless-powered cooperative relay "
                                 "downlink.")
    sub = parser.add_subparsers(dest="command", required=True)

    common = _Parser(add_help=False)
    common.add_argument("--config", metavar="PATH",
                        help="flat key=value config file")
    for flag, key, metavar, help_text in _VALUE_FLAGS:
        common.add_argument(flag, dest=key, metavar=metavar, help=help_text)
    common.add_argument("--fig2", action="store_true",
                        help="pin every trial to the built-in printed "
                             "channel (defaults trials to 1)")
    common.add_argument("--timing", action="store_true",
                        help="fill the wall_ms column with measured times "
                             "(breaks byte-identical reruns)")

    for command in _KIND_BY_COMMAND:
        sub.add_parser(command, parents=[common],
                       help=f"run the {_KIND_BY_COMMAND[command]} experiment")
    sub.add_parser("verify", help="run the package's test suite")
    return parser


def _overrides(args: argparse.Namespace) -> dict[str, str]:
    values = {key: getattr(args, key)
              for _, key, _, _ in _VALUE_FLAGS
              if getattr(args, key) is not None}
    if args.fig2:
        values["demo_channel"] = "true"
    if args.timing:
        values["timing"] = "true"
    return values


def _run_verify() -> int:
    root = Path(__file__).resolve().parents[2]
    tests = root / "tests"
    if not tests.is_dir():
        print("verify: test suite not found (expected tests/ beside src/); "
              "run from a source checkout", file=sys.stderr)
        return 1
    return subprocess.call([sys.executable, "-m", "pytest", "-q", str(tests)])


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "verify":
        return _run_verify()

    try:
        values = parse_config(args.config) if args.config else {}
        values.update(_overrides(args))
        cfg = build_config(_KIND_BY_COMMAND[args.command], values)
    except ValidationError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1

    result = run_sweep(cfg)
    try:
        emit_csv(result, cfg.out if cfg.out is not None else "-")
    except OSError as exc:
        print(exc, file=sys.stderr)
        return 3

    print(f"{len(result.rows)} rows | failure fraction "
          f"{result.failure_fraction():.3f} | wall {result.wall_s:.1f}s | "
          f"config {result.config_hash}", file=sys.stderr)
    if result.flagged():
        print("warning: more than 10% of design trials hit solver errors; "
              "run flagged", file=sys.stderr)
        return 2
    return 0
