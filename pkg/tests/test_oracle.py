import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from noma_relay.errors import ValidationError
from noma_relay.model import PathLoss, SystemParams, sample_channel
from noma_relay.oracle import brute_force_transmit, grid_filter, grid_min_rho


def test_grid_min_rho_symmetric_case():
    # b = c: the minimizer is exactly 1/2 with value 4 b
    rho, val = grid_min_rho(2.0, 2.0)
    assert abs(rho - 0.5) < 1e-7
    assert abs(val - 8.0) < 1e-8


def test_grid_min_rho_closed_form_spot_checks():
    # d/drho [b/rho + c/(1-rho)] = 0  =>  rho = sqrt(b) / (sqrt(b) + sqrt(c))
    for b, c in [(1.0, 4.0), (10.0, 0.1), (3.0, 7.0)]:
        rho, val = grid_min_rho(b, c)
        expect = np.sqrt(b) / (np.sqrt(b) + np.sqrt(c))
        assert abs(rho - expect) < 1e-7
        assert abs(val - (np.sqrt(b) + np.sqrt(c)) ** 2) < 1e-7


@given(st.floats(min_value=1e-3, max_value=1e3), st.floats(min_value=1e-3, max_value=1e3))
@settings(deadline=None, max_examples=50)
def test_grid_min_rho_stationary(b, c):
    rho, _ = grid_min_rho(b, c)
    h = 1e-6 * min(rho, 1 - rho)
    f = lambda r: b / r + c / (1 - r)
    assert f(rho) <= f(rho - h) + 1e-12 * f(rho)
    assert f(rho) <= f(rho + h) + 1e-12 * f(rho)


def test_grid_min_rho_rejects_nonpositive():
    with pytest.raises(ValidationError):
        grid_min_rho(0.0, 1.0)
    with pytest.raises(ValidationError):
        grid_min_rho(1.0, -2.0)


def test_grid_filter_prefers_matched_when_unconstrained():
    # with a zero QoS threshold the sweep must land on the matched filter:
    # lam* = alpha^2/(alpha^2+beta^2) and value ||h_own||^2
    params = SystemParams(rd_min=0.0)
    rng = np.random.default_rng(3)
    h1 = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    h2 = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    lam, val = grid_filter(h1, h2, rho=0.5, params=params, n=200_001)
    assert abs(val - np.linalg.norm(h1) ** 2) < 1e-6 * np.linalg.norm(h1) ** 2


def test_grid_filter_reports_infeasible():
    # other-stream vector so weak that no filter can decode it
    params = SystemParams(ps=1e-3)
    h1 = np.array([1.0 + 0j, 0.0, 0.0, 0.0])
    h2 = np.array([1e-6 + 0j, 0.0, 0.0, 0.0])
    assert grid_filter(h1, h2, rho=0.5, params=params, n=10_001) is None
    with pytest.raises(ValidationError):
        grid_filter(h1, np.zeros(4), rho=0.5, params=params)


def test_brute_force_rejects_wide_arrays():
    params = SystemParams(m=3)
    ch = sample_channel(params, PathLoss(), seed=0)
    with pytest.raises(ValidationError):
        brute_force_transmit(ch, np.ones(4) / 2, params)


def test_brute_force_feasible_instance_beats_zero():
    params = SystemParams()
    ch = sample_channel(params, PathLoss(), seed=1)
    g = ch.h_sr.conj().T @ ch.h_sr
    w = np.linalg.eigh(g)[1][:, -1]
    best = brute_force_transmit(ch, w, params, n=8, levels=2)
    assert best is not None and best > 0


def test_brute_force_infeasible_instance_returns_none():
    # crush the source power: no grid point can satisfy the combined QoS
    params = SystemParams(ps=1e-6)
    ch = sample_channel(params, PathLoss(), seed=1)
    g = ch.h_sr.conj().T @ ch.h_sr
    w = np.linalg.eigh(g)[1][:, -1]
    assert brute_force_transmit(ch, w, params, n=6, levels=1) is None
