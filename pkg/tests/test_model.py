import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from noma_relay.errors import ValidationError
from noma_relay.model import (
    ChannelRealization,
    PathLoss,
    SystemParams,
    TxSolution,
    demo_channel,
    effective_channels,
    gamma_threshold,
    sample_channel,
)


def test_gamma_threshold_reference_values():
    assert gamma_threshold(0.0) == 0.0
    assert np.isclose(gamma_threshold(1.0), 3.0)
    assert np.isclose(gamma_threshold(0.5), 1.0)
    assert np.isclose(gamma_threshold(2.0), 15.0)


@given(st.floats(min_value=0.0, max_value=8.0), st.floats(min_value=0.0, max_value=8.0))
def test_gamma_threshold_monotone(r1, r2):
    lo, hi = sorted((r1, r2))
    assert gamma_threshold(lo) <= gamma_threshold(hi)


def test_gamma_threshold_rejects_negative():
    with pytest.raises(ValidationError):
        gamma_threshold(-0.1)


def test_default_params_match_documented_setup():
    p = SystemParams()
    assert p.ps == 1000.0 and p.eta == 0.8 and p.m == 2 and p.n == 4
    assert p.sigma_d2 == p.sigma_r2 == p.sigma_r2_tilde == 1.0
    assert np.isclose(p.gamma_qos, 3.0)
    pl = PathLoss()
    assert np.isclose(pl.var_sr, 0.1)
    assert np.isclose(pl.var_sd, 1e-3)
    assert np.isclose(pl.var_rd, 10 ** -2.5)


def test_params_validation():
    with pytest.raises(ValidationError):
        SystemParams(ps=0.0)
    with pytest.raises(ValidationError):
        SystemParams(eta=0.0)
    with pytest.raises(ValidationError):
        SystemParams(eta=1.5)
    with pytest.raises(ValidationError):
        SystemParams(m=0)
    with pytest.raises(ValidationError):
        SystemParams(sigma_d2=-1.0)


def test_sample_channel_deterministic_and_shaped():
    p = SystemParams()
    pl = PathLoss()
    ch1 = sample_channel(p, pl, seed=42)
    ch2 = sample_channel(p, pl, seed=42)
    ch3 = sample_channel(p, pl, seed=43)
    assert np.array_equal(ch1.h_sr, ch2.h_sr)
    assert np.array_equal(ch1.h_sd, ch2.h_sd)
    assert np.array_equal(ch1.h_rd, ch2.h_rd)
    assert not np.array_equal(ch1.h_sr, ch3.h_sr)
    assert ch1.h_sr.shape == (2, 4) and ch1.h_sd.shape == (2,) and ch1.h_rd.shape == (4,)


def test_sample_channel_variances_law_of_large_numbers():
    # 1e5 draws per entry: sample variance within 2% of 10^(-PL/10)
    p = SystemParams(m=1, n=1)
    pl = PathLoss()
    draws = np.array([sample_channel(p, pl, seed=s).h_sr[0, 0] for s in range(100_000)])
    var = np.mean(np.abs(draws) ** 2)
    assert abs(var - pl.var_sr) < 0.02 * pl.var_sr
    mean = np.mean(draws)
    assert abs(mean) < 0.01  # circular symmetry: zero mean


def test_demo_channel_constants():
    ch = demo_channel()
    assert ch.m == 2 and ch.n == 4
    assert ch.h_sr[0, 0] == 0.4035 + 0.1087j
    assert ch.h_sr[1, 3] == -0.0480 - 0.0131j
    assert ch.h_sd[0] == -0.0137 + 0.0123j
    assert np.allclose(ch.h_rd, np.sqrt(0.0723 / 4) * np.ones(4))
    assert np.isclose(np.linalg.norm(ch.h_rd) ** 2, 0.0723)


def test_channel_realization_shape_validation():
    with pytest.raises(ValidationError):
        ChannelRealization(h_sr=np.zeros((2, 4)), h_sd=np.zeros(3), h_rd=np.zeros(4))
    with pytest.raises(ValidationError):
        ChannelRealization(h_sr=np.zeros((2, 4)), h_sd=np.zeros(2), h_rd=np.zeros(5))


def test_effective_channels_consistency():
    ch = demo_channel()
    w = np.ones(4) / 2.0
    eff = effective_channels(ch, w)
    assert np.allclose(eff.h_eff, ch.h_sr @ w)
    assert np.allclose(eff.outer_eff, np.outer(eff.h_eff, eff.h_eff.conj()))
    assert np.allclose(eff.gram_sr, ch.h_sr @ ch.h_sr.conj().T)
    assert np.isclose(eff.norm_rd2, 0.0723)


def test_effective_channels_requires_unit_filter():
    ch = demo_channel()
    with pytest.raises(ValidationError):
        effective_channels(ch, np.ones(4))
    with pytest.raises(ValidationError):
        effective_channels(ch, np.ones(3) / np.sqrt(3))


@settings(deadline=None, max_examples=20)
@given(st.integers(min_value=0, max_value=10_000))
def test_effective_rotation_invariance(seed):
    # rotating the relay array (unitary on the antenna index) while rotating
    # the filter the same way leaves every effective quantity unchanged
    rng = np.random.default_rng(seed)
    p = SystemParams()
    ch = sample_channel(p, PathLoss(), seed=seed)
    q, _ = np.linalg.qr(rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4)))
    w = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    w /= np.linalg.norm(w)
    ch_rot = ChannelRealization(h_sr=ch.h_sr @ q, h_sd=ch.h_sd, h_rd=q.conj().T @ ch.h_rd)
    eff = effective_channels(ch, w)
    eff_rot = effective_channels(ch_rot, q.conj().T @ w)
    assert np.allclose(eff.h_eff, eff_rot.h_eff, atol=1e-12)
    assert np.allclose(eff.gram_sr, eff_rot.gram_sr, atol=1e-12)
    assert np.isclose(eff.norm_rd2, eff_rot.norm_rd2, atol=1e-12)


def test_tx_solution_rejects_boundary_rho():
    with pytest.raises(ValidationError):
        TxSolution(w1=np.zeros(2), w2=np.zeros(2), rho=1.0, w_r=np.ones(4) / 2)
    with pytest.raises(ValidationError):
        TxSolution(w1=np.zeros(2), w2=np.zeros(2), rho=0.0, w_r=np.ones(4) / 2)
