import numpy as np
import pytest

from noma_relay.alternating import init_receiver
from noma_relay.errors import InfeasibleError, ValidationError
from noma_relay.model import (PathLoss, SystemParams, TxSolution,
                              effective_channels, sample_channel)
from noma_relay.optimal_tx import dinkelbach_optimal
from noma_relay.rates import audit
from noma_relay.zf_tx import dinkelbach_zf, zf_feasible, zf_lift

RD = (0.5, 1.0, 2.0)


def instance(seed, rd_min=1.0):
    params = SystemParams(rd_min=rd_min)
    ch = sample_channel(params, PathLoss(), seed)
    w0 = init_receiver(ch)
    return ch, w0, effective_channels(ch, w0), params


def test_strong_beam_leaks_nothing_to_weak_user():
    for seed in range(6):
        ch, w0, eff, params = instance(seed)
        try:
            design = dinkelbach_zf(ch, w0, params)
        except InfeasibleError:
            continue
        leak = abs(np.vdot(ch.h_sd, design.w1))
        assert leak <= 1e-10 * max(np.linalg.norm(design.w1), 1.0)


def test_lift_basis_is_orthonormal_null_space():
    eff = instance(3)[2]
    lift = zf_lift(eff)
    basis = lift.basis
    assert basis.shape == (2, 1)
    assert np.allclose(basis.conj().T @ basis, np.eye(1), atol=1e-12)
    assert abs(eff.h_sd.conj() @ basis[:, 0]) < 1e-12


def test_zero_forcing_never_beats_unconstrained_design():
    for seed in range(8):
        for rd in RD:
            ch, w0, eff, params = instance(seed, rd)
            try:
                zf = dinkelbach_zf(ch, w0, params)
            except InfeasibleError:
                continue
            full = dinkelbach_optimal(ch, w0, params)  # ZF-feasible => feasible
            assert full.rate_argument >= zf.rate_argument - 1e-6 * (
                1.0 + zf.rate_argument)


def test_zf_design_passes_full_audit():
    for seed in range(6):
        ch, w0, eff, params = instance(seed, 1.0)
        try:
            design = dinkelbach_zf(ch, w0, params)
        except InfeasibleError:
            continue
        sol = TxSolution(w1=design.w1, w2=design.w2, rho=design.rho, w_r=w0)
        assert audit(sol, ch, params).ok()


def test_single_source_antenna_cannot_zero_force():
    params = SystemParams(m=1, n=2)
    ch = sample_channel(params, PathLoss(), 0)
    eff = effective_channels(ch, init_receiver(ch))
    with pytest.raises(ValidationError):
        zf_lift(eff)


def test_zero_target_closed_form_lives_in_null_space():
    ch, w0, eff, params = instance(1, 0.0)
    design = dinkelbach_zf(ch, w0, params)
    assert np.linalg.norm(design.w2) == 0.0
    assert abs(np.linalg.norm(design.w1) - 1.0) < 1e-12
    assert abs(np.vdot(eff.h_sd, design.w1)) < 1e-12
    lift = zf_lift(eff)
    expect = (2.0 * params.ps * float(np.linalg.norm(lift.h_proj) ** 2)
              / (params.sigma_r2 + params.sigma_r2_tilde / design.rho))
    assert abs(design.rate_argument - expect) < 1e-9 * (1.0 + expect)


def test_zf_feasibility_implies_unconstrained_feasibility():
    from noma_relay.optimal_tx import transmit_feasible

    for seed in range(10):
        ch, w0, eff, params = instance(seed, 2.0)
        if zf_feasible(eff, params)[0]:
            assert transmit_feasible(eff, params)[0]
