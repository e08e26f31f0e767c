"""Monte Carlo sweep experiments: rate-region and outage curves.

This module turns the per-instance designers into reproducible batch
experiments.  Two sweep families cover the four experiment kinds:

* target-rate sweeps (``rate_region`` / ``outage_vs_rate``): the weak
  user's rate target runs over a grid while the node geometry stays fixed;
* antenna sweeps (``rate_vs_antennas`` / ``outage_vs_antennas``): the relay
  antenna count runs over a grid at a fixed rate target.

Every result row carries the full statistics tuple (mean rates, outage
fraction, failure tally), so the two kinds of each family share one engine
and differ only in which column the caller plots.

Reproducibility contract: trial ``t`` always uses the channel drawn from
seed ``base_seed + t``, all schemes are evaluated on the same channel list
(paired comparisons), and aggregation runs in trial order, so a rerun with
an identical config emits a byte-identical CSV.  For the same reason the
``wall_ms`` column is 0.0 unless timing is explicitly switched on.

Accounting conventions:

* An instance is in *outage* for a scheme when that scheme cannot meet the
  weak user's target on that channel (design problem infeasible; for the
  direct baseline, full-slot rate below target).
* Solver errors are conservative outages and are additionally tallied in
  the ``failures`` column.
* Mean rates average over **all** trials, with an outage trial contributing
  zero rate (nothing is transmitted when the target cannot be met); the
  direct baseline always transmits, so its weak-user rate always counts.

Config-file grammar: flat ``key = value`` lines; ``#`` starts a comment;
blank lines ignored.  Recognized keys (CLI flags override the file)::

    trials = 500           # realizations per grid point
    seed = 7               # base seed; trial t uses seed + t
    ps_db = 30             # source power budget in dB (linear 10^(x/10))
    rd_min = 1.0           # fixed rate target for antenna sweeps (defaults:
                           # 0.5 rate sweep, 1.5 outage sweep, 1 otherwise)
    rdmin_grid = 0:4:0.25  # rate-target grid: start:stop:step or v1,v2,...
    antenna_grid = 1,2,4,8 # relay antenna counts for antenna sweeps
    schemes = optimal,zf,direct
    m = 2                  # source antennas
    n = 4                  # relay antennas (rate-target sweeps)
    eta = 0.8              # energy-harvesting efficiency
    sigma_d2 = 1.0         # weak-user noise variance
    sigma_r2 = 1.0         # relay RF-front-end noise variance
    sigma_r2_tilde = 1.0   # relay conversion noise variance
    pl_sr_db = 10          # per-link average path losses in dB
    pl_sd_db = 30
    pl_rd_db = 25
    demo_channel = false   # pin every trial to the built-in printed channel
    restarts = 1           # receive-filter starts per instance (first one
                           # deterministic, the rest random but seeded)
    timing = false         # fill wall_ms with measured times
    out = results.csv
"""

from __future__ import annotations

import hashlib
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .alternating import alternate, direct_transmission_rate
from .errors import (DegenerateNullSpaceError, InfeasibleError,
                     InternalConsistencyError, NonConvergenceError,
                     ValidationError)
from .model import (ChannelRealization, PathLoss, SystemParams, demo_channel,
                    sample_channel)
from .rates import audit, rate_d, rate_r

__all__ = [
    "KINDS", "SCHEME_CHOICES", "CSV_COLUMNS", "CONFIG_KEYS",
    "ExperimentConfig", "SweepRow", "SweepResult",
    "parse_grid", "parse_config", "build_config", "config_fingerprint",
    "run_sweep", "run_rate_region", "run_outage", "run_rate_vs_antennas",
    "emit_csv",
]

KINDS = ("rate_region", "rate_vs_antennas", "outage_vs_rate",
         "outage_vs_antennas")
SCHEME_CHOICES = ("optimal", "zf", "direct")
CSV_COLUMNS = ("sweep_value", "scheme", "mean_rate_r", "mean_rate_d",
               "outage_prob", "trials", "failures", "wall_ms")

# Errors that mean "the solver broke", as opposed to "the instance is
# genuinely infeasible"; they count as outage AND as a failure.
_SOLVER_ERRORS = (InternalConsistencyError, NonConvergenceError,
                  DegenerateNullSpaceError)


@dataclass(frozen=True)
class ExperimentConfig:
    """Full description of one batch experiment."""

    kind: str
    params: SystemParams
    path_loss: PathLoss
    grid: tuple[float, ...]
    trials: int = 500
    base_seed: int = 0
    schemes: tuple[str, ...] = ("optimal", "zf")
    out: str | None = None
    demo_mode: bool = False     # every trial reuses the printed channel
    restarts: int = 1
    timing: bool = False

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValidationError(
                f"unknown experiment kind {self.kind!r}; expected one of {KINDS}")
        if self.trials < 1:
            raise ValidationError(f"trials must be >= 1, got {self.trials}")
        if self.restarts < 1:
            raise ValidationError(f"restarts must be >= 1, got {self.restarts}")
        if not self.grid:
            raise ValidationError("sweep grid must be nonempty")
        if not self.schemes:
            raise ValidationError("schemes list must be nonempty")
        for s in self.schemes:
            if s not in SCHEME_CHOICES:
                raise ValidationError(
                    f"unknown scheme {s!r}; expected a subset of {SCHEME_CHOICES}")
        if len(set(self.schemes)) != len(self.schemes):
            raise ValidationError(f"duplicate scheme in {self.schemes}")
        if self._antenna_sweep():
            if self.demo_mode:
                raise ValidationError(
                    "the built-in demo channel has a fixed antenna count; "
                    "it cannot drive an antenna sweep")
            for v in self.grid:
                if v != int(v) or v < 1:
                    raise ValidationError(
                        f"antenna grid entries must be positive integers, got {v}")
        else:
            for v in self.grid:
                if v < 0:
                    raise ValidationError(
                        f"rate targets must be >= 0, got {v}")

    def _antenna_sweep(self) -> bool:
        return self.kind in ("rate_vs_antennas", "outage_vs_antennas")


@dataclass(frozen=True)
class SweepRow:
    """Statistics of one (sweep value, scheme) cell."""

    sweep_value: float
    scheme: str
    mean_rate_r: float
    mean_rate_d: float
    outage_prob: float
    trials: int
    failures: int
    wall_ms: float


@dataclass(frozen=True)
class SweepResult:
    """All rows of one experiment plus run metadata (the metadata stays out
    of the CSV so that reruns are byte-identical)."""

    rows: tuple[SweepRow, ...]
    base_seed: int
    config_hash: str
    wall_s: float

    def rows_for(self, scheme: str) -> tuple[SweepRow, ...]:
        return tuple(r for r in self.rows if r.scheme == scheme)

    def failure_fraction(self) -> float:
        """Fraction of design-scheme trials that hit a solver error (the
        direct baseline has no solver and is excluded)."""
        design = [r for r in self.rows if r.scheme != "direct"]
        total = sum(r.trials for r in design)
        if total == 0:
            return 0.0
        return sum(r.failures for r in design) / total

    def flagged(self) -> bool:
        """True when more than 10% of design trials failed."""
        return self.failure_fraction() > 0.10


# ---------------------------------------------------------------------------
# configuration plumbing
# ---------------------------------------------------------------------------

CONFIG_KEYS = frozenset({
    "trials", "seed", "ps_db", "rd_min", "rdmin_grid", "antenna_grid",
    "schemes", "m", "n", "eta", "sigma_d2", "sigma_r2", "sigma_r2_tilde",
    "pl_sr_db", "pl_sd_db", "pl_rd_db", "demo_channel", "restarts",
    "timing", "out",
})

_TRUE_WORDS = ("1", "true", "yes", "on")
_FALSE_WORDS = ("0", "false", "no", "off")


def parse_grid(text: str) -> tuple[float, ...]:
    """Parse a sweep grid: ``start:stop:step`` (inclusive endpoints) or an
    explicit comma list ``v1,v2,...``.  Values are rounded to 12 decimals so
    accumulated float steps print cleanly."""
    s = text.strip()
    if ":" in s:
        parts = s.split(":")
        if len(parts) != 3:
            raise ValidationError(
                f"grid range must be start:stop:step, got {text!r}")
        try:
            a, b, step = (float(x) for x in parts)
        except ValueError:
            raise ValidationError(f"non-numeric grid range {text!r}") from None
        if step <= 0:
            raise ValidationError(f"grid step must be positive, got {step}")
        if b < a:
            raise ValidationError(f"grid stop {b} is below start {a}")
        count = int(round((b - a) / step)) + 1
        vals = [a + i * step for i in range(count)]
        vals = [v for v in vals if v <= b + 1e-9 * max(1.0, abs(b))]
        return tuple(round(v, 12) for v in vals)
    try:
        vals = tuple(float(x) for x in s.split(",") if x.strip())
    except ValueError:
        raise ValidationError(f"non-numeric grid value in {text!r}") from None
    if not vals:
        raise ValidationError("sweep grid must be nonempty")
    return tuple(round(v, 12) for v in vals)


def parse_config(path: str | Path) -> dict[str, str]:
    """Read a flat ``key = value`` config file (grammar in the module
    docstring) into a string-to-string mapping."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read config file {path}: {exc}") from exc
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if not sep or not key or not val:
            raise ValidationError(
                f"{path}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        if key not in CONFIG_KEYS:
            raise ValidationError(
                f"{path}:{lineno}: unknown config key {key!r}")
        values[key] = val
    return values


def _as_float(values: dict[str, str], key: str, default: str) -> float:
    raw = values.get(key, default)
    try:
        return float(raw)
    except ValueError:
        raise ValidationError(f"config key {key} must be a number, got {raw!r}") from None


def _as_int(values: dict[str, str], key: str, default: str) -> int:
    raw = values.get(key, default)
    try:
        return int(raw)
    except ValueError:
        raise ValidationError(f"config key {key} must be an integer, got {raw!r}") from None


def _as_bool(values: dict[str, str], key: str, default: str) -> bool:
    raw = values.get(key, default).lower()
    if raw in _TRUE_WORDS:
        return True
    if raw in _FALSE_WORDS:
        return False
    raise ValidationError(f"config key {key} must be a boolean, got {raw!r}")


def build_config(kind: str, values: dict[str, str]) -> ExperimentConfig:
    """Assemble an ExperimentConfig for one experiment kind from merged
    string values (config file first, CLI overrides already applied)."""
    if kind not in KINDS:
        raise ValidationError(f"unknown experiment kind {kind!r}")
    for key in values:
        if key not in CONFIG_KEYS:
            raise ValidationError(f"unknown config key {key!r}")
    antenna_sweep = kind in ("rate_vs_antennas", "outage_vs_antennas")

    # The fixed rate target only matters for antenna sweeps (rate-target
    # sweeps overwrite it per grid point).  The defaults put each sweep in
    # its informative regime: a low target keeps the rate-vs-antennas curve
    # free of outage distortion so the diminishing returns of array gain
    # show, while a higher target gives the outage-vs-antennas curve its
    # dynamic range.
    default_rd = "0.5" if kind == "rate_vs_antennas" else (
        "1.5" if kind == "outage_vs_antennas" else "1")
    ps = 10.0 ** (_as_float(values, "ps_db", "30") / 10.0)
    params = SystemParams(
        ps=ps,
        sigma_d2=_as_float(values, "sigma_d2", "1"),
        sigma_r2=_as_float(values, "sigma_r2", "1"),
        sigma_r2_tilde=_as_float(values, "sigma_r2_tilde", "1"),
        eta=_as_float(values, "eta", "0.8"),
        rd_min=_as_float(values, "rd_min", default_rd),
        m=_as_int(values, "m", "2"),
        n=_as_int(values, "n", "4"),
    )
    path_loss = PathLoss(
        sr_db=_as_float(values, "pl_sr_db", "10"),
        sd_db=_as_float(values, "pl_sd_db", "30"),
        rd_db=_as_float(values, "pl_rd_db", "25"),
    )
    if antenna_sweep:
        grid = parse_grid(values.get("antenna_grid", "1,2,4,8"))
        default_trials = "200"
        default_schemes = "optimal,zf"
    else:
        grid = parse_grid(values.get("rdmin_grid", "0:4:0.25"))
        default_trials = "500"
        default_schemes = ("optimal,zf" if kind == "rate_region"
                           else "optimal,zf,direct")
    demo_mode = _as_bool(values, "demo_channel", "false")
    if demo_mode and "trials" not in values:
        default_trials = "1"   # the channel is fixed; repetition adds nothing
    base_seed = _as_int(values, "seed", "0")
    if base_seed < 0:
        raise ValidationError(f"seed must be >= 0, got {base_seed}")
    schemes = tuple(s.strip() for s in
                    values.get("schemes", default_schemes).split(",")
                    if s.strip())
    return ExperimentConfig(
        kind=kind,
        params=params,
        path_loss=path_loss,
        grid=grid,
        trials=_as_int(values, "trials", default_trials),
        base_seed=base_seed,
        schemes=schemes,
        out=values.get("out"),
        demo_mode=demo_mode,
        restarts=_as_int(values, "restarts", "1"),
        timing=_as_bool(values, "timing", "false"),
    )


def config_fingerprint(cfg: ExperimentConfig) -> str:
    """Digest of every field that determines the result rows (output path
    and timing flag excluded: they change plumbing, not data)."""
    p, pl = cfg.params, cfg.path_loss
    text = "\n".join([
        f"kind={cfg.kind}",
        f"ps={p.ps!r}", f"sigma_d2={p.sigma_d2!r}", f"sigma_r2={p.sigma_r2!r}",
        f"sigma_r2_tilde={p.sigma_r2_tilde!r}", f"eta={p.eta!r}",
        f"rd_min={p.rd_min!r}", f"m={p.m}", f"n={p.n}",
        f"pl={pl.sr_db!r},{pl.sd_db!r},{pl.rd_db!r}",
        "grid=" + ",".join(repr(v) for v in cfg.grid),
        f"trials={cfg.trials}", f"seed={cfg.base_seed}",
        "schemes=" + ",".join(cfg.schemes),
        f"demo={cfg.demo_mode}", f"restarts={cfg.restarts}",
    ])
    return hashlib.md5(text.encode()).hexdigest()


# ---------------------------------------------------------------------------
# the sweep engine
# ---------------------------------------------------------------------------

def _channel_list(cfg: ExperimentConfig,
                  params: SystemParams) -> list[ChannelRealization]:
    if cfg.demo_mode:
        ch = demo_channel()
        if (params.m, params.n) != (ch.m, ch.n):
            raise ValidationError(
                f"demo channel is {ch.m}x{ch.n} antennas; config asks for "
                f"{params.m}x{params.n}")
        return [ch] * cfg.trials
    return [sample_channel(params, cfg.path_loss, cfg.base_seed + t)
            for t in range(cfg.trials)]


def _random_filter(n: int, trial_seed: int, restart: int) -> np.ndarray:
    rng = np.random.default_rng((trial_seed, restart))
    return rng.standard_normal(n) + 1j * rng.standard_normal(n)


def _design_trial(ch: ChannelRealization, params: SystemParams, scheme: str,
                  cfg: ExperimentConfig, trial: int
                  ) -> tuple[bool, bool, float, float]:
    """Run one (channel, scheme) instance; returns (outage, failure,
    rate_r, rate_d).  With several restarts the best feasible design wins
    and the instance is in outage only if every start fails."""
    best: tuple[float, float] | None = None
    failed = False
    for restart in range(cfg.restarts):
        w0 = (None if restart == 0
              else _random_filter(ch.n, cfg.base_seed + trial, restart))
        try:
            sol, _ = alternate(ch, params, scheme, w0=w0)
        except InfeasibleError:
            continue
        except _SOLVER_ERRORS:
            failed = True
            continue
        if not audit(sol, ch, params).ok():
            failed = True
            continue
        rr = rate_r(sol, ch, params)
        if best is None or rr > best[0]:
            best = (rr, rate_d(sol, ch, params))
    if best is None:
        return True, failed, 0.0, 0.0
    return False, failed, best[0], best[1]


def _grid_cell(cfg: ExperimentConfig, value: float, params: SystemParams,
               channels: list[ChannelRealization],
               direct_rates: list[float]) -> list[SweepRow]:
    rows = []
    for scheme in cfg.schemes:
        t0 = time.perf_counter()
        outages = failures = 0
        sum_rr = sum_rd = 0.0
        for trial, ch in enumerate(channels):
            if scheme == "direct":
                rd = direct_rates[trial]
                outages += rd < params.rd_min
                sum_rd += rd          # the baseline always transmits
            else:
                outage, failure, rr, rd = _design_trial(
                    ch, params, scheme, cfg, trial)
                outages += outage
                failures += failure
                sum_rr += rr
                sum_rd += rd
        wall_ms = ((time.perf_counter() - t0) * 1e3) if cfg.timing else 0.0
        n = len(channels)
        rows.append(SweepRow(
            sweep_value=float(value), scheme=scheme,
            mean_rate_r=sum_rr / n, mean_rate_d=sum_rd / n,
            outage_prob=outages / n, trials=n, failures=failures,
            wall_ms=wall_ms))
    return rows


def run_sweep(cfg: ExperimentConfig) -> SweepResult:
    """Run any experiment kind; rows cover the full grid x scheme product
    in grid-major order."""
    t0 = time.perf_counter()
    rows: list[SweepRow] = []
    if cfg._antenna_sweep():
        for value in cfg.grid:
            params_v = cfg.params.with_antennas(n=int(value))
            channels = _channel_list(cfg, params_v)
            direct = ([direct_transmission_rate(ch, params_v) for ch in channels]
                      if "direct" in cfg.schemes else [0.0] * len(channels))
            rows.extend(_grid_cell(cfg, value, params_v, channels, direct))
    else:
        channels = _channel_list(cfg, cfg.params)
        direct = ([direct_transmission_rate(ch, cfg.params) for ch in channels]
                  if "direct" in cfg.schemes else [0.0] * len(channels))
        for value in cfg.grid:
            params_v = cfg.params.with_rd_min(float(value))
            rows.extend(_grid_cell(cfg, value, params_v, channels, direct))
    return SweepResult(rows=tuple(rows), base_seed=cfg.base_seed,
                       config_hash=config_fingerprint(cfg),
                       wall_s=time.perf_counter() - t0)


def run_rate_region(cfg: ExperimentConfig) -> SweepResult:
    """Achieved (weak-user rate, strong-user rate) pairs over a grid of
    rate targets."""
    if cfg.kind != "rate_region":
        raise ValidationError(f"expected a rate_region config, got {cfg.kind!r}")
    return run_sweep(cfg)


def run_outage(cfg: ExperimentConfig) -> SweepResult:
    """Outage probability of the weak user versus its rate target."""
    if cfg.kind != "outage_vs_rate":
        raise ValidationError(f"expected an outage_vs_rate config, got {cfg.kind!r}")
    return run_sweep(cfg)


def run_rate_vs_antennas(cfg: ExperimentConfig) -> SweepResult:
    """Rate and outage statistics versus the relay antenna count (one run
    produces both curves; consumers pick the column)."""
    if not cfg._antenna_sweep():
        raise ValidationError(f"expected an antenna-sweep config, got {cfg.kind!r}")
    return run_sweep(cfg)


def emit_csv(result: SweepResult, path: str | Path) -> None:
    """Write the result as CSV: a header then one row per (sweep value,
    scheme), floats at 9 significant digits.  Path ``-`` writes to stdout."""
    lines = [",".join(CSV_COLUMNS)]
    for r in result.rows:
        lines.append(
            f"{r.sweep_value:.9g},{r.scheme},{r.mean_rate_r:.9g},"
            f"{r.mean_rate_d:.9g},{r.outage_prob:.9g},{r.trials},"
            f"{r.failures},{r.wall_ms:.9g}")
    text = "\n".join(lines) + "\n"
    if str(path) == "-":
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise OSError(f"could not write CSV to {path}: {exc}") from exc
