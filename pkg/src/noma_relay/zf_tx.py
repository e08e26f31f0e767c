"""Zero-forcing transmit design: the strong user's beamformer is confined to
the null space of the weak user's direct channel, which removes the
interference term from the weak user's first-hop SINR.  The weak user's QoS
is then imposed in a combined form that weights the direct hop by the energy
fraction routed to harvesting; this is slightly conservative but jointly
convex, so the design needs no QoS split search — each Dinkelbach iteration
is a single dual solve with three multipliers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._feasibility import splitting_feasible
from .errors import (
    DegenerateNullSpaceError,
    InfeasibleError,
    InternalConsistencyError,
    ValidationError,
)
from .model import ChannelRealization, EffectiveChannels, SystemParams, effective_channels
from .numerics import (
    LmiProgram,
    max_eigenvalue,
    null_space_of_row,
    null_space_unit_vector,
    solve_lmi,
)
from .optimal_tx import TransmitDesign, rho_star

__all__ = [
    "ZfLifted",
    "ZfDualSolution",
    "zf_lift",
    "zf_dual_program",
    "solve_zf_dual",
    "recover_zf_beamformers",
    "zf_feasible",
    "dinkelbach_zf",
]

_MULTIPLIER_FLOOR = 1e-8


@dataclass(frozen=True)
class ZfLifted:
    """Channel forms projected onto the weak user's null space.

    basis      : (m, m-1) orthonormal basis of the directions invisible to
                 the weak user's direct channel.
    h_proj     : (m-1,) effective relay channel expressed in that basis.
    outer_proj : (m-1, m-1) rank-one h_proj h_proj^H.
    gram_proj  : (m-1, m-1) compression of the source array gram matrix.
    """

    basis: np.ndarray
    h_proj: np.ndarray
    outer_proj: np.ndarray
    gram_proj: np.ndarray


@dataclass(frozen=True)
class ZfDualSolution:
    """Optimal multipliers of one Dinkelbach subproblem dual (ZF scheme).

    ``lam`` stacks the SIC, combined-QoS, and transmit-power multipliers;
    ``s`` is the splitting-ratio envelope auxiliary.
    """

    lam: np.ndarray
    s: float
    value: float
    t: float


def zf_lift(eff: EffectiveChannels) -> ZfLifted:
    """Project the transmit-side forms onto the weak user's null space."""
    m = eff.h_eff.shape[0]
    if m < 2:
        raise ValidationError("zero-forcing needs at least two source antennas")
    basis = null_space_of_row(eff.h_sd.conj())
    h_proj = basis.conj().T @ eff.h_eff
    gram_proj = basis.conj().T @ eff.gram_sr @ basis
    return ZfLifted(basis=basis, h_proj=h_proj,
                    outer_proj=np.outer(h_proj, h_proj.conj()),
                    gram_proj=0.5 * (gram_proj + gram_proj.conj().T))


def _zf_ray_checks(eff: EffectiveChannels, params: SystemParams) -> None:
    """Reject subproblems whose dual is unbounded along a single multiplier."""
    two_ps = 2.0 * params.ps
    g = params.gamma_qos
    if two_ps * eff.norm_eff2 <= g * (params.sigma_r2 + params.sigma_r2_tilde):
        raise InfeasibleError("relay cannot decode the weak user's stream")
    combined = two_ps * eff.outer_sd + 2.0 * params.eta * params.ps * eff.norm_rd2 * eff.gram_sr
    if max_eigenvalue(0.5 * (combined + combined.conj().T)) <= g * params.sigma_d2:
        raise InfeasibleError("combined direct and forwarded support cannot meet the QoS")


def zf_dual_program(eff: EffectiveChannels, lift: ZfLifted, params: SystemParams,
                    t: float) -> LmiProgram:
    """Dual of the ZF Dinkelbach subproblem as a minimization over four scalars.

    Variables are (lam_sic, lam_qos, lam_power, s).  The first slack block
    lives in the null-space coordinates (strong user), the second in the full
    transmit space (weak user), and the third is the rotated cone encoding
    the splitting-ratio envelope.
    """
    m = eff.h_eff.shape[0]
    two_ps = 2.0 * params.ps
    g = params.gamma_qos
    nt = params.sigma_r2_tilde
    harvest_gain = 2.0 * params.eta * params.ps * eff.norm_rd2
    eye_p = np.eye(m - 1)
    zero_p = np.zeros((m - 1, m - 1))
    zero = np.zeros((m, m))

    block_a = (two_ps * lift.outer_proj,
               np.stack([-two_ps * g * lift.outer_proj,
                         harvest_gain * lift.gram_proj,
                         -eye_p, zero_p]))
    block_b = (zero.copy(),
               np.stack([two_ps * eff.outer_eff,
                         two_ps * eff.outer_sd + harvest_gain * eff.gram_sr,
                         -np.eye(m), zero]))
    z2 = np.zeros((2, 2))
    cone = (np.array([[-t * nt, 0.0], [0.0, 0.0]]),
            np.stack([np.array([[-g * nt, 0.0], [0.0, 0.0]]),
                      np.array([[0.0, 0.0], [0.0, -g * params.sigma_d2]]),
                      z2,
                      np.array([[0.0, -1.0], [-1.0, 0.0]])]))

    cost = np.array([
        -g * (nt + params.sigma_r2),
        -g * params.sigma_d2,
        1.0,
        -2.0,
    ])
    lower = np.array([0.0, 1e-10, 0.0, 0.0])
    return LmiProgram(c=cost, blocks=[block_a, block_b, cone], lower=lower,
                      c0=-t * (nt + params.sigma_r2))


def _analytic_start(prog: LmiProgram, eff: EffectiveChannels, lift: ZfLifted,
                    params: SystemParams, t: float) -> np.ndarray | None:
    lam = np.array([1e-6, 1e-6, 0.0, 0.0])
    a0 = prog.blocks[0][0] + 1e-6 * (prog.blocks[0][1][0] + prog.blocks[0][1][1])
    b0 = prog.blocks[1][0] + 1e-6 * (prog.blocks[1][1][0] + prog.blocks[1][1][1])
    lam[2] = 1.2 * max(max_eigenvalue(a0), max_eigenvalue(b0), 0.0) + 1.0
    b = (t + lam[0] * params.gamma_qos) * params.sigma_r2_tilde
    c = lam[1] * params.gamma_qos * params.sigma_d2
    lam[3] = 0.5 * np.sqrt(b * c)
    if prog.max_residual(lam) < -1e-9:
        return lam
    return None


def solve_zf_dual(eff: EffectiveChannels, lift: ZfLifted, params: SystemParams,
                  t: float, *, tol: float = 1e-11) -> ZfDualSolution:
    """Solve the ZF Dinkelbach subproblem dual to optimality.

    Raises InfeasibleError when the subproblem admits no primal point.
    """
    if t < 0.0:
        raise ValueError("Dinkelbach parameter must be nonnegative")
    _zf_ray_checks(eff, params)
    prog = zf_dual_program(eff, lift, params, t)
    start = _analytic_start(prog, eff, lift, params, t)
    floor = -1e8 * (1.0 + t) * (params.sigma_r2 + params.sigma_r2_tilde)
    sol = solve_lmi(prog, start=start, tol=tol, floor=floor)
    lam = sol.x[:3].copy()
    if lam[1] <= _MULTIPLIER_FLOOR:
        raise InternalConsistencyError(
            "QoS multiplier vanished although the demand is positive")
    return ZfDualSolution(lam=lam, s=float(sol.x[3]), value=sol.value, t=t)


def recover_zf_beamformers(dual: ZfDualSolution, eff: EffectiveChannels,
                           lift: ZfLifted, params: SystemParams
                           ) -> tuple[np.ndarray, np.ndarray, float, float]:
    """Rank-one primal point from the optimal ZF dual multipliers.

    Mirrors the optimal scheme's recovery: splitting ratio from the tight
    envelope, directions from the active slack blocks (in the null-space
    coordinates the block is 1x1 when the source has two antennas, so the
    direction is trivial), the strong user's power from duality-gap
    tightness, and the weak user's power from whichever of the SIC and
    combined-QoS conditions binds.  Returns (w1, w2, rho, rate_argument).
    """
    lam = dual.lam
    g = params.gamma_qos
    two_ps = 2.0 * params.ps
    b = (dual.t + lam[0] * g) * params.sigma_r2_tilde
    c = max(lam[1] * g * params.sigma_d2, 1e-300)
    rho = rho_star(b, c)
    noise = params.sigma_r2 + params.sigma_r2_tilde / rho
    eta_rd = params.eta * eff.norm_rd2

    m = eff.h_eff.shape[0]
    num1 = dual.value + dual.t * noise
    if num1 <= 1e-9 * (1.0 + abs(dual.value) + dual.t * noise):
        w1 = np.zeros(m, dtype=complex)
        tau1_sq = 0.0
        gain1 = 0.0
        harvest_w1 = 0.0
    else:
        if m - 1 == 1:
            u1 = np.array([1.0 + 0.0j])
        else:
            harvest_gain = 2.0 * params.eta * params.ps * eff.norm_rd2
            mat_a = (two_ps * (1.0 - lam[0] * g) * lift.outer_proj
                     + harvest_gain * lam[1] * lift.gram_proj
                     - lam[2] * np.eye(m - 1))
            mat_a = 0.5 * (mat_a + mat_a.conj().T)
            scale_a = float(np.max(np.abs(mat_a))) + lam[2]
            u1 = null_space_unit_vector(mat_a, scale=scale_a)
        gain1 = abs(np.vdot(lift.h_proj, u1)) ** 2
        if gain1 <= 1e-12 * max(eff.norm_eff2, 1e-300):
            raise InternalConsistencyError(
                "null-space direction is orthogonal to the relay's channel")
        tau1_sq = num1 / (two_ps * gain1)
        w1 = lift.basis @ (np.sqrt(tau1_sq) * u1)
        harvest_w1 = tau1_sq * float(np.real(np.vdot(u1, lift.gram_proj @ u1)))

    harvest_gain = 2.0 * params.eta * params.ps * eff.norm_rd2
    mat_b = (two_ps * lam[0] * eff.outer_eff
             + (two_ps * eff.outer_sd + harvest_gain * eff.gram_sr) * lam[1]
             - lam[2] * np.eye(m))
    mat_b = 0.5 * (mat_b + mat_b.conj().T)
    scale_b = float(np.max(np.abs(mat_b))) + lam[2]
    u2 = null_space_unit_vector(mat_b, scale=scale_b)
    gain2 = abs(np.vdot(eff.h_eff, u2)) ** 2
    if gain2 <= 1e-14 * eff.norm_eff2:
        raise InternalConsistencyError(
            "weak-user direction is orthogonal to the relay's effective channel")
    qos_den = abs(np.vdot(eff.h_sd, u2)) ** 2 + eta_rd * float(
        np.real(np.vdot(u2, eff.gram_sr @ u2)))
    if qos_den <= 1e-14 * max(eff.norm_sd2, max_eigenvalue(eff.gram_sr)):
        raise InternalConsistencyError(
            "weak-user direction supports neither hop of the QoS")
    sic_need = g * (tau1_sq * gain1 + noise / two_ps) / gain2
    qos_need = (g * params.sigma_d2 / (two_ps * (1.0 - rho))
                - eta_rd * harvest_w1) / qos_den
    tau2_sq = max(sic_need, qos_need, 0.0)
    w2 = np.sqrt(tau2_sq) * u2
    rate_argument = two_ps * tau1_sq * gain1 / noise
    return w1, w2, float(rho), float(rate_argument)


def zf_slacks(w1: np.ndarray, w2: np.ndarray, rho: float, eff: EffectiveChannels,
              params: SystemParams) -> tuple[float, float, float]:
    """Normalized slacks of the ZF design constraints at a candidate point.

    Order: SIC at the relay, combined QoS at the weak user, transmit power.
    The combined QoS weights the direct hop by the harvesting fraction, the
    convention under which the ZF design is convex.
    """
    two_ps = 2.0 * params.ps
    g = params.gamma_qos
    noise = params.sigma_r2 + params.sigma_r2_tilde / rho
    own = two_ps * abs(np.vdot(eff.h_eff, w2)) ** 2
    leak = two_ps * abs(np.vdot(eff.h_eff, w1)) ** 2
    sic = (own - g * (leak + noise)) / (1.0 + g * noise)

    forwarded = float(np.real(np.vdot(w1, eff.gram_sr @ w1)
                              + np.vdot(w2, eff.gram_sr @ w2)))
    combined = (two_ps * abs(np.vdot(eff.h_sd, w2)) ** 2
                + 2.0 * params.eta * params.ps * eff.norm_rd2 * forwarded
                - g * params.sigma_d2 / (1.0 - rho))
    qos = combined / (1.0 + g * params.sigma_d2 / (1.0 - rho))

    power = 1.0 - float(np.linalg.norm(w1) ** 2 + np.linalg.norm(w2) ** 2)
    return float(sic), float(qos), float(power)


def zf_feasible(eff: EffectiveChannels, params: SystemParams) -> tuple[bool, float, float]:
    """Decide whether any ZF design meets the constraints at this filter.

    As in the optimal scheme, zeroing the strong user's beamformer is
    lossless for feasibility (its power moves into the weak user's beamformer
    without touching the weak user's hops), leaving two quadratic constraints
    swept over the splitting ratio.
    """
    g = params.gamma_qos
    if g == 0.0:
        return True, 0.5, 0.0
    two_ps = 2.0 * params.ps
    f1 = two_ps * eff.outer_eff
    f1 = 0.5 * (f1 + f1.conj().T)
    combined = two_ps * eff.outer_sd + 2.0 * params.eta * params.ps * eff.norm_rd2 * eff.gram_sr
    combined = 0.5 * (combined + combined.conj().T)

    def forms_at(rho: float):
        c1 = g * (params.sigma_r2 + params.sigma_r2_tilde / rho)
        return f1, c1, (1.0 - rho) * combined, g * params.sigma_d2

    return splitting_feasible(forms_at)


def dinkelbach_zf(ch: ChannelRealization, w_r: np.ndarray, params: SystemParams,
                  *, eps: float = 1e-6, max_iter: int = 50) -> TransmitDesign:
    """Maximize the strong user's SINR under the ZF design at a fixed filter.

    Raises InfeasibleError when the ZF constraints cannot be met at this
    filter.  The returned design's ``split`` field is NaN: the ZF scheme has
    no QoS split.
    """
    eff = effective_channels(ch, w_r)
    lift = zf_lift(eff)
    if params.gamma_qos == 0.0:
        rho = 1.0 - 1e-9
        m = eff.h_eff.shape[0]
        norm = float(np.linalg.norm(lift.h_proj))
        if norm <= 1e-30:
            w1 = np.zeros(m, dtype=complex)
        else:
            w1 = lift.basis @ (lift.h_proj / norm)
        rate_argument = (2.0 * params.ps * norm ** 2
                         / (params.sigma_r2 + params.sigma_r2_tilde / rho))
        return TransmitDesign(w1=w1, w2=np.zeros(m, dtype=complex), rho=rho,
                              rate_argument=float(rate_argument), split=float("nan"),
                              dual_value=float(rate_argument), iterations=0,
                              trace=(float(rate_argument),))
    ok, _, margin = zf_feasible(eff, params)
    if not ok:
        raise InfeasibleError(
            f"no ZF design meets the QoS at this filter (margin {margin:.3e})")
    t = eps
    trace: list[float] = []
    for iteration in range(1, max_iter + 1):
        try:
            dual = solve_zf_dual(eff, lift, params, t)
            w1, w2, rho, t_new = recover_zf_beamformers(dual, eff, lift, params)
        except (InfeasibleError, InternalConsistencyError, DegenerateNullSpaceError) as exc:
            raise InfeasibleError(f"ZF subproblem failed at t={t:.6g}: {exc}") from exc
        if min(zf_slacks(w1, w2, rho, eff, params)) < -1e-6:
            raise InfeasibleError(
                "recovered ZF design violates its constraints; instance treated as outage")
        trace.append(t_new)
        done = abs(t_new - t) <= eps
        t = t_new
        if done:
            return TransmitDesign(w1=w1, w2=w2, rho=rho, rate_argument=t,
                                  split=float("nan"), dual_value=dual.value,
                                  iterations=iteration, trace=tuple(trace))
    raise InternalConsistencyError(
        f"ZF Dinkelbach loop did not settle within {max_iter} iterations")
