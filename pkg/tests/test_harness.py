import textwrap

import numpy as np
import pytest

from noma_relay.errors import ValidationError
from noma_relay.harness import (CSV_COLUMNS, ExperimentConfig, SweepResult,
                                SweepRow, build_config, config_fingerprint,
                                emit_csv, parse_config, parse_grid,
                                run_rate_region, run_sweep)
from noma_relay.model import PathLoss, SystemParams


def small_config(**over):
    base = dict(kind="outage_vs_rate",
                params=SystemParams(ps=1000.0),
                path_loss=PathLoss(),
                grid=(0.0, 1.0),
                trials=4,
                base_seed=3,
                schemes=("optimal", "zf", "direct"))
    base.update(over)
    return ExperimentConfig(**base)


# -- grid / config-file parsing ---------------------------------------------

def test_parse_grid_range_form():
    grid = parse_grid("0:4:0.25")
    assert len(grid) == 17
    assert grid[0] == 0.0 and grid[-1] == 4.0
    assert np.allclose(np.diff(grid), 0.25)


def test_parse_grid_comma_form_and_errors():
    assert parse_grid("1, 2, 4, 8") == (1.0, 2.0, 4.0, 8.0)
    assert parse_grid("2.5") == (2.5,)
    with pytest.raises(ValidationError):
        parse_grid("4:0:0.25")
    with pytest.raises(ValidationError):
        parse_grid("0:4:0")
    with pytest.raises(ValidationError):
        parse_grid("a,b")
    with pytest.raises(ValidationError):
        parse_grid("")


def test_parse_config_roundtrip(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(textwrap.dedent("""\
        # outage sweep, small
        trials = 4
        ps_db = 30   # transmit power
        schemes = optimal,direct
    """))
    values = parse_config(cfg)
    assert values == {"trials": "4", "ps_db": "30", "schemes": "optimal,direct"}


def test_parse_config_rejects_unknown_key_with_location(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("trials = 4\npower = 3\n")
    with pytest.raises(ValidationError) as err:
        parse_config(cfg)
    assert "power" in str(err.value)
    assert ":2" in str(err.value)


def test_parse_config_missing_file(tmp_path):
    with pytest.raises(ValidationError):
        parse_config(tmp_path / "nope.cfg")


def test_build_config_defaults_and_overrides():
    cfg = build_config("outage_vs_rate", {})
    assert cfg.trials == 500
    assert cfg.schemes == ("optimal", "zf", "direct")
    assert len(cfg.grid) == 17
    assert cfg.params.ps == pytest.approx(10.0 ** 3)  # 30 dB default

    cfg2 = build_config("rate_region", {"trials": "7", "ps_db": "20",
                                        "rdmin_grid": "0,1", "seed": "5"})
    assert cfg2.trials == 7 and cfg2.base_seed == 5
    assert cfg2.schemes == ("optimal", "zf")
    assert cfg2.params.ps == pytest.approx(100.0)
    assert cfg2.grid == (0.0, 1.0)

    anten = build_config("rate_vs_antennas", {})
    assert anten.grid == (1.0, 2.0, 4.0, 8.0)
    assert anten.trials == 200

    with pytest.raises(ValidationError):
        build_config("outage_vs_rate", {"seed": "-1"})
    with pytest.raises(ValidationError):
        build_config("outage_vs_rate", {"trials": "x"})
    with pytest.raises(ValidationError):
        build_config("outage_vs_rate", {"demo_channel": "maybe"})


def test_demo_channel_defaults_to_single_trial():
    cfg = build_config("rate_region", {"demo_channel": "true"})
    assert cfg.demo_mode and cfg.trials == 1


def test_config_validation_errors():
    with pytest.raises(ValidationError):
        small_config(kind="bogus")
    with pytest.raises(ValidationError):
        small_config(trials=0)
    with pytest.raises(ValidationError):
        small_config(schemes=("optimal", "optimal"))
    with pytest.raises(ValidationError):
        small_config(schemes=("mrt",))
    with pytest.raises(ValidationError):
        small_config(grid=())
    with pytest.raises(ValidationError):
        small_config(grid=(-0.5, 1.0))
    with pytest.raises(ValidationError):
        small_config(kind="rate_vs_antennas", grid=(1.0, 2.5))
    with pytest.raises(ValidationError):
        small_config(kind="rate_vs_antennas", grid=(1.0, 2.0), demo_mode=True)


def test_fingerprint_ignores_output_path_and_timing():
    a = small_config()
    b = small_config(out="other.csv", timing=True)
    c = small_config(base_seed=4)
    assert config_fingerprint(a) == config_fingerprint(b)
    assert config_fingerprint(a) != config_fingerprint(c)


# -- sweep engine ------------------------------------------------------------

def test_sweep_rows_cover_grid_times_schemes_in_order():
    cfg = small_config(grid=(0.0, 0.5), trials=2)
    result = run_sweep(cfg)
    labels = [(r.sweep_value, r.scheme) for r in result.rows]
    assert labels == [(0.0, "optimal"), (0.0, "zf"), (0.0, "direct"),
                      (0.5, "optimal"), (0.5, "zf"), (0.5, "direct")]
    assert all(r.trials == 2 for r in result.rows)


def test_sweep_is_deterministic():
    cfg = small_config(trials=3)
    assert run_sweep(cfg).rows == run_sweep(cfg).rows


def test_zero_rate_target_has_no_outage():
    cfg = small_config(grid=(0.0,), trials=3)
    result = run_sweep(cfg)
    for row in result.rows:
        assert row.outage_prob == 0.0
        assert row.failures == 0
        assert row.mean_rate_r > 0.0 or row.scheme == "direct"


def test_direct_scheme_outage_counts_rate_below_target():
    # a target high enough that some of the fading draws miss it
    cfg = small_config(grid=(6.0,), trials=8, schemes=("direct",))
    row = run_sweep(cfg).rows[0]
    assert 0.0 <= row.outage_prob <= 1.0
    assert row.failures == 0
    assert row.outage_prob * row.trials == round(row.outage_prob * row.trials)


def test_kind_checked_wrappers():
    cfg = small_config(kind="rate_region", schemes=("optimal",), grid=(0.5,),
                       trials=2)
    assert run_rate_region(cfg).rows
    with pytest.raises(ValidationError):
        run_rate_region(small_config())


def test_failure_fraction_ignores_direct_rows():
    rows = (SweepRow(0.0, "optimal", 1.0, 0.5, 0.0, 10, 2, 0.0),
            SweepRow(0.0, "direct", 1.0, 0.5, 0.0, 10, 9, 0.0))
    result = SweepResult(rows=rows, base_seed=0, config_hash="x", wall_s=0.0)
    assert result.failure_fraction() == pytest.approx(0.2)
    assert result.flagged()
    empty = SweepResult(rows=(), base_seed=0, config_hash="x", wall_s=0.0)
    assert empty.failure_fraction() == 0.0


# -- CSV emission ------------------------------------------------------------

def test_emit_csv_format_and_byte_identity(tmp_path):
    cfg = small_config(grid=(0.5,), trials=2)
    result = run_sweep(cfg)
    p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
    emit_csv(result, p1)
    emit_csv(run_sweep(cfg), p2)
    assert p1.read_bytes() == p2.read_bytes()
    lines = p1.read_text().splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert len(lines) == 1 + len(result.rows)
    for line in lines[1:]:
        assert len(line.split(",")) == len(CSV_COLUMNS)


def test_emit_csv_header_only_when_no_rows(tmp_path):
    result = SweepResult(rows=(), base_seed=0, config_hash="x", wall_s=0.0)
    out = tmp_path / "empty.csv"
    emit_csv(result, out)
    assert out.read_text() == ",".join(CSV_COLUMNS) + "\n"


def test_emit_csv_wraps_write_errors(tmp_path):
    result = SweepResult(rows=(), base_seed=0, config_hash="x", wall_s=0.0)
    with pytest.raises(OSError) as err:
        emit_csv(result, tmp_path / "no" / "such" / "dir.csv")
    assert "could not write CSV" in str(err.value)


def test_wall_ms_zero_without_timing():
    cfg = small_config(grid=(0.5,), trials=2)
    assert all(r.wall_ms == 0.0 for r in run_sweep(cfg).rows)
    timed = small_config(grid=(0.5,), trials=2, timing=True)
    assert any(r.wall_ms > 0.0 for r in run_sweep(timed).rows)
