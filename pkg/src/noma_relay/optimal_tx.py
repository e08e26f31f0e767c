"""Transmit design for the energy-harvesting relay link: maximize the strong
user's decoding SINR subject to the weak user's QoS, the relay's SIC
condition, the harvested-power recycling budget, and unit transmit power.

The design problem is a linear-fractional semidefinite program after rank
relaxation.  It is solved by a Dinkelbach loop on the fractional objective;
each Dinkelbach subproblem splits the weak user's QoS between the direct hop
and the relayed hop with a scalar ``split`` in [0, gamma_qos), found by
bisection on the subgradient of the subproblem value.  Each (t, split)
subproblem is solved through its Lagrange dual — five scalar multipliers and
two small linear matrix inequalities — and the beamformers are recovered in
closed form from the active dual blocks, which provably admit rank-one
primal solutions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._feasibility import quadrant_witness, splitting_feasible
from .errors import DegenerateNullSpaceError, InfeasibleError, InternalConsistencyError
from .model import ChannelRealization, EffectiveChannels, SystemParams, effective_channels
from .numerics import LmiProgram, max_eigenvalue, null_space_unit_vector, solve_lmi

__all__ = [
    "TransmitDualSolution",
    "SplitProbe",
    "TransmitDesign",
    "rho_star",
    "harvest_demand",
    "dual_matrix_w1",
    "dual_matrix_w2",
    "transmit_dual_program",
    "solve_transmit_dual",
    "recover_beamformers",
    "split_gradient",
    "split_slacks",
    "bisect_split",
    "transmit_feasible",
    "dinkelbach_optimal",
]

#: Multipliers below this are treated as inactive when recovery needs them.
_MULTIPLIER_FLOOR = 1e-8


@dataclass(frozen=True)
class TransmitDualSolution:
    """Optimal multipliers of one (t, split) subproblem dual.

    ``lam`` stacks the multipliers of the SIC constraint, the direct-hop QoS,
    the harvested-power demand, and the transmit-power budget; ``s`` is the
    epigraph auxiliary for the splitting-ratio envelope.
    """

    lam: np.ndarray
    s: float
    value: float
    t: float
    split: float


@dataclass(frozen=True)
class SplitProbe:
    """Recovered primal point and subgradient for one QoS split."""

    dual: TransmitDualSolution
    w1: np.ndarray
    w2: np.ndarray
    rho: float
    rate_argument: float
    gradient: float


@dataclass(frozen=True)
class TransmitDesign:
    """Converged transmit design at a fixed receive filter."""

    w1: np.ndarray
    w2: np.ndarray
    rho: float
    rate_argument: float
    split: float
    dual_value: float
    iterations: int
    trace: tuple[float, ...]


def rho_star(b: float, c: float) -> float:
    """Minimizer of b/rho + c/(1-rho) over (0, 1), i.e. sqrt(b)/(sqrt(b)+sqrt(c))."""
    if b <= 0.0 or c <= 0.0:
        raise ValueError("rho_star needs positive coefficients")
    sb, sc = np.sqrt(b), np.sqrt(c)
    return float(sb / (sb + sc))


def harvest_demand(eff: EffectiveChannels, params: SystemParams, split: float) -> float:
    """Forwarded-power demand (gamma_qos - split) * sigma_d2 / (2 eta ps ||h_rd||^2)."""
    return float((params.gamma_qos - split) * params.sigma_d2
                 / (2.0 * params.eta * params.ps * eff.norm_rd2))


def dual_matrix_w1(eff: EffectiveChannels, params: SystemParams, split: float,
                   lam: np.ndarray) -> np.ndarray:
    """Dual slack block multiplying the strong user's covariance (must be <= 0)."""
    two_ps = 2.0 * params.ps
    mat = (two_ps * (1.0 - lam[0] * params.gamma_qos) * eff.outer_eff
           - two_ps * lam[1] * split * eff.outer_sd
           + lam[2] * eff.gram_sr
           - lam[3] * np.eye(eff.outer_eff.shape[0]))
    return 0.5 * (mat + mat.conj().T)


def dual_matrix_w2(eff: EffectiveChannels, params: SystemParams,
                   lam: np.ndarray) -> np.ndarray:
    """Dual slack block multiplying the weak user's covariance (must be <= 0)."""
    two_ps = 2.0 * params.ps
    mat = (two_ps * lam[0] * eff.outer_eff
           + two_ps * lam[1] * eff.outer_sd
           + lam[2] * eff.gram_sr
           - lam[3] * np.eye(eff.outer_eff.shape[0]))
    return 0.5 * (mat + mat.conj().T)


def _ray_checks(eff: EffectiveChannels, params: SystemParams, split: float,
                demand: float) -> None:
    """Reject subproblems whose dual is unbounded along a single multiplier.

    Each check matches a closed-form primal impossibility: the relay cannot
    decode even with full splitting, the direct hop cannot reach its share of
    the QoS, or the harvested-power demand exceeds what full transmit power
    can deliver.
    """
    two_ps = 2.0 * params.ps
    g = params.gamma_qos
    if two_ps * eff.norm_eff2 <= g * (params.sigma_r2 + params.sigma_r2_tilde):
        raise InfeasibleError("relay cannot decode the weak user's stream")
    if split > 0.0 and two_ps * eff.norm_sd2 <= split * params.sigma_d2:
        raise InfeasibleError("direct hop cannot carry its share of the QoS")
    if demand >= max_eigenvalue(eff.gram_sr):
        raise InfeasibleError("harvested power cannot cover the forwarding demand")


def transmit_dual_program(eff: EffectiveChannels, params: SystemParams,
                          t: float, split: float) -> LmiProgram:
    """Dual of the (t, split) subproblem as a minimization over five scalars.

    Variables are (lam_sic, lam_qos, lam_harvest, lam_power, s).  The two
    slack blocks force the primal covariances' coefficient matrices to be
    negative semidefinite; the third block is the rotated second-order cone
    s^2 <= b c encoding the concave envelope over the splitting ratio.
    """
    m = eff.outer_eff.shape[0]
    two_ps = 2.0 * params.ps
    g = params.gamma_qos
    nt = params.sigma_r2_tilde
    demand = harvest_demand(eff, params, split)
    eye = np.eye(m)
    zero = np.zeros((m, m))

    block_a = (two_ps * eff.outer_eff,
               np.stack([-two_ps * g * eff.outer_eff,
                         -two_ps * split * eff.outer_sd,
                         eff.gram_sr, -eye, zero]))
    block_b = (zero.copy(),
               np.stack([two_ps * eff.outer_eff,
                         two_ps * eff.outer_sd,
                         eff.gram_sr, -eye, zero]))
    z2 = np.zeros((2, 2))
    cone = (np.array([[-t * nt, 0.0], [0.0, 0.0]]),
            np.stack([np.array([[-g * nt, 0.0], [0.0, 0.0]]), z2,
                      np.array([[0.0, 0.0], [0.0, -demand]]), z2,
                      np.array([[0.0, -1.0], [-1.0, 0.0]])]))

    cost = np.array([
        -g * (nt + params.sigma_r2),
        -split * params.sigma_d2,
        -demand,
        1.0,
        -2.0,
    ])
    lower = np.array([0.0, 0.0, 1e-10, 0.0, 0.0])
    return LmiProgram(c=cost, blocks=[block_a, block_b, cone], lower=lower,
                      c0=-t * (nt + params.sigma_r2))


def _analytic_start(prog: LmiProgram, eff: EffectiveChannels, params: SystemParams,
                    t: float, split: float) -> np.ndarray | None:
    """Strictly feasible dual point: tiny multipliers, generous power multiplier."""
    lam = np.array([1e-6, 1e-6, 1e-6, 0.0, 0.0])
    a_part = dual_matrix_w1(eff, params, split, lam)
    b_part = dual_matrix_w2(eff, params, lam)
    lam[3] = 1.2 * max(max_eigenvalue(a_part), max_eigenvalue(b_part), 0.0) + 1.0
    b = (t + lam[0] * params.gamma_qos) * params.sigma_r2_tilde
    c = lam[2] * harvest_demand(eff, params, split)
    lam[4] = 0.5 * np.sqrt(b * c)
    if prog.max_residual(lam) < -1e-9:
        return lam
    return None


def solve_transmit_dual(eff: EffectiveChannels, params: SystemParams,
                        t: float, split: float, *, tol: float = 1e-11) -> TransmitDualSolution:
    """Solve the (t, split) subproblem dual to optimality.

    Raises InfeasibleError when the subproblem admits no primal point (the
    dual is unbounded below), detected either by the closed-form ray checks
    up front or by the solver's descent floor.
    """
    if t < 0.0:
        raise ValueError("Dinkelbach parameter must be nonnegative")
    if not 0.0 <= split < params.gamma_qos:
        raise ValueError("QoS split must lie in [0, gamma_qos)")
    demand = harvest_demand(eff, params, split)
    _ray_checks(eff, params, split, demand)
    prog = transmit_dual_program(eff, params, t, split)
    start = _analytic_start(prog, eff, params, t, split)
    floor = -1e8 * (1.0 + t) * (params.sigma_r2 + params.sigma_r2_tilde)
    sol = solve_lmi(prog, start=start, tol=tol, floor=floor)
    lam = sol.x[:4].copy()
    if lam[2] <= _MULTIPLIER_FLOOR:
        raise InternalConsistencyError(
            "harvest multiplier vanished although the demand is positive")
    return TransmitDualSolution(lam=lam, s=float(sol.x[4]), value=sol.value,
                                t=t, split=split)


def recover_beamformers(dual: TransmitDualSolution, eff: EffectiveChannels,
                        params: SystemParams) -> tuple[np.ndarray, np.ndarray, float, float]:
    """Rank-one primal point (w1, w2, rho) from the optimal dual multipliers.

    The splitting ratio comes from the tight envelope and the beamformer
    directions from the null spaces of the active slack blocks.  The strong
    user's power comes from duality-gap tightness; the weak user's power is
    then the smallest value satisfying both the SIC condition and the
    harvested-power demand, so those two constraints hold exactly or with
    slack by construction.  When the strong user's power is zero its slack
    block need not be singular, so the null space extraction is skipped.
    Returns (w1, w2, rho, rate_argument).
    """
    lam = dual.lam
    g = params.gamma_qos
    two_ps = 2.0 * params.ps
    demand = harvest_demand(eff, params, dual.split)
    b = (dual.t + lam[0] * g) * params.sigma_r2_tilde
    c = max(lam[2] * demand, 1e-300)
    rho = rho_star(b, c)
    noise = params.sigma_r2 + params.sigma_r2_tilde / rho

    m = eff.h_eff.shape[0]
    num1 = dual.value + dual.t * noise
    if num1 <= 1e-9 * (1.0 + abs(dual.value) + dual.t * noise):
        w1 = np.zeros(m, dtype=complex)
        tau1_sq = 0.0
        gain1 = 0.0
        harvest_w1 = 0.0
        leak_sd = 0.0
    else:
        mat_a = dual_matrix_w1(eff, params, dual.split, lam)
        scale_a = float(np.max(np.abs(mat_a))) + lam[3]
        u1 = null_space_unit_vector(mat_a, scale=scale_a)
        den1 = two_ps * abs(np.vdot(eff.h_eff, u1)) ** 2
        if den1 <= 1e-12 * two_ps * eff.norm_eff2:
            raise InternalConsistencyError(
                "strong-user direction is orthogonal to its channel")
        tau1_sq = num1 / den1
        gain1 = abs(np.vdot(eff.h_eff, u1)) ** 2
        w1 = np.sqrt(tau1_sq) * u1
        harvest_w1 = tau1_sq * float(np.real(np.vdot(u1, eff.gram_sr @ u1)))
        leak_sd = two_ps * tau1_sq * abs(np.vdot(eff.h_sd, u1)) ** 2

    mat_b = dual_matrix_w2(eff, params, lam)
    scale_b = float(np.max(np.abs(mat_b))) + lam[3]
    u2 = null_space_unit_vector(mat_b, scale=scale_b)
    gain2 = abs(np.vdot(eff.h_eff, u2)) ** 2
    if gain2 <= 1e-14 * eff.norm_eff2:
        raise InternalConsistencyError(
            "weak-user direction is orthogonal to the relay's effective channel")
    forward2 = float(np.real(np.vdot(u2, eff.gram_sr @ u2)))
    if forward2 <= 1e-14 * max_eigenvalue(eff.gram_sr):
        raise InternalConsistencyError(
            "weak-user direction forwards no power to the relay")
    sic_need = g * (tau1_sq * gain1 + noise / two_ps) / gain2
    eh_need = (demand / (1.0 - rho) - harvest_w1) / forward2
    qos_need = 0.0
    if dual.split > 0.0:
        # The direct-hop share is a third lower bound on the weak user's
        # power.  At a nondegenerate dual optimum complementary slackness
        # already covers it, but at a near-degenerate subproblem (tiny
        # Dinkelbach parameter) the recovered scales drift by more than the
        # probe tolerance unless it is enforced here too.
        required = dual.split * (leak_sd + params.sigma_d2)
        direct_gain2 = abs(np.vdot(eff.h_sd, u2)) ** 2
        qos_need = required / max(two_ps * direct_gain2, 1e-12 * required)
    tau2_sq = max(sic_need, eh_need, qos_need, 0.0)
    w2 = np.sqrt(tau2_sq) * u2
    rate_argument = two_ps * tau1_sq * gain1 / noise
    return w1, w2, float(rho), float(rate_argument)


def split_gradient(dual: TransmitDualSolution, w1: np.ndarray, rho: float,
                   eff: EffectiveChannels, params: SystemParams) -> float:
    """Subgradient of the subproblem value with respect to the QoS split.

    Raising the split tightens the direct-hop constraint (through both the
    interference term and the noise term) and relaxes the forwarded-power
    demand; the three terms below are the corresponding sensitivities.
    """
    lam = dual.lam
    direct_w1 = abs(np.vdot(eff.h_sd, w1)) ** 2
    return float(
        -2.0 * params.ps * lam[1] * direct_w1
        - lam[1] * params.sigma_d2
        + lam[2] * params.sigma_d2
        / (2.0 * params.ps * params.eta * eff.norm_rd2 * (1.0 - rho))
    )


def split_slacks(w1: np.ndarray, w2: np.ndarray, rho: float,
                 eff: EffectiveChannels, params: SystemParams,
                 split: float) -> tuple[float, float, float, float]:
    """Normalized slacks of the four split-form constraints at a candidate point.

    Order: SIC at the relay, direct-hop QoS share, forwarded-power QoS share,
    transmit power.  All must be >= 0 (up to tolerance) for feasibility.
    """
    two_ps = 2.0 * params.ps
    g = params.gamma_qos
    noise = params.sigma_r2 + params.sigma_r2_tilde / rho
    own = two_ps * abs(np.vdot(eff.h_eff, w2)) ** 2
    leak = two_ps * abs(np.vdot(eff.h_eff, w1)) ** 2
    sic = (own - g * (leak + noise)) / (1.0 + g * noise)

    direct = two_ps * abs(np.vdot(eff.h_sd, w2)) ** 2
    direct_leak = two_ps * abs(np.vdot(eff.h_sd, w1)) ** 2
    qos_direct = (direct - split * (direct_leak + params.sigma_d2)) / (1.0 + split)

    forwarded = float(np.real(np.vdot(w1, eff.gram_sr @ w1)
                              + np.vdot(w2, eff.gram_sr @ w2)))
    demand = harvest_demand(eff, params, split)
    qos_forward = ((forwarded - demand / (1.0 - rho))
                   / (1.0 + g - split))

    power = 1.0 - float(np.linalg.norm(w1) ** 2 + np.linalg.norm(w2) ** 2)
    return float(sic), float(qos_direct), float(qos_forward), float(power)


def _probe(eff: EffectiveChannels, params: SystemParams, t: float,
           split: float, *, slack_tol: float = 1e-6) -> SplitProbe | None:
    """Solve one (t, split) subproblem; None when it is infeasible.

    A recovered point that violates the split-form constraints beyond
    tolerance is also treated as infeasible: spurious convergence of the
    dual along an unbounded ray lands exactly here, and the violated
    constraint is the structurally impossible one.  Degenerate recoveries
    (vanishing multipliers or null directions at the bracket endpoints) are
    rejected the same way and left to the bisection's steering rules.
    """
    try:
        dual = solve_transmit_dual(eff, params, t, split)
        w1, w2, rho, rate_argument = recover_beamformers(dual, eff, params)
    except (InfeasibleError, InternalConsistencyError, DegenerateNullSpaceError):
        return None
    if min(split_slacks(w1, w2, rho, eff, params, split)) < -slack_tol:
        return None
    grad = split_gradient(dual, w1, rho, eff, params)
    return SplitProbe(dual=dual, w1=w1, w2=w2, rho=rho,
                      rate_argument=rate_argument, gradient=grad)


def bisect_split(eff: EffectiveChannels, params: SystemParams, t: float,
                 *, delta_frac: float = 1e-4,
                 anchor: float | None = None) -> SplitProbe | None:
    """Maximize the subproblem value over the QoS split by gradient bisection.

    The subgradient is decreasing across the maximizer.  A nonpositive
    gradient at split 0 or a nonnegative one near gamma_qos pins a boundary
    optimum.  The feasible splits form an interval that may exclude BOTH
    endpoints (each hop alone too weak, together strong enough), so when the
    endpoints fail the search needs an interior foothold: the caller-supplied
    ``anchor`` (a split derived from a feasibility witness) or, failing that,
    a uniform scan.  Infeasible midpoints steer the bracket toward the last
    feasible probe.  Returns the probe at the final bracket, or None when no
    feasible split was found anywhere.
    """
    g = params.gamma_qos
    lo, hi = 0.0, g * (1.0 - 1e-6)
    delta = delta_frac * g
    p_lo = _probe(eff, params, t, lo)
    p_hi = _probe(eff, params, t, hi)
    sign_lo = 1.0 if p_lo is None else np.sign(p_lo.gradient)
    sign_hi = -1.0 if p_hi is None else np.sign(p_hi.gradient)
    if sign_lo <= 0.0:
        return p_lo
    if sign_hi >= 0.0:
        return p_hi

    incumbent: SplitProbe | None = None
    inc_split = 0.0
    if p_lo is not None:
        incumbent, inc_split = p_lo, lo
    if p_hi is not None:
        incumbent, inc_split = p_hi, hi
    if incumbent is None and anchor is not None:
        pa = _probe(eff, params, t, anchor)
        if pa is not None:
            incumbent, inc_split = pa, anchor
    if incumbent is None:
        for s in np.linspace(g / 16.0, g * (15.0 / 16.0), 15):
            pa = _probe(eff, params, t, float(s))
            if pa is not None:
                incumbent, inc_split = pa, float(s)
                break
    if incumbent is None:
        return None

    while hi - lo > delta:
        mid = 0.5 * (lo + hi)
        pm = _probe(eff, params, t, mid)
        if pm is None:
            if inc_split < mid:
                hi = mid
            else:
                lo = mid
            continue
        incumbent, inc_split = pm, mid
        if pm.gradient >= 0.0:
            lo = mid
        else:
            hi = mid
    return incumbent


def _qos_forms(eff: EffectiveChannels, params: SystemParams):
    """The two quadratic feasibility forms at a given splitting ratio:
    SIC on the strong stream and the weak user's combined QoS, with the
    strong user's beamformer zeroed out (lossless for feasibility)."""
    g = params.gamma_qos
    two_ps = 2.0 * params.ps
    f1 = two_ps * eff.outer_eff
    f1 = 0.5 * (f1 + f1.conj().T)
    base = two_ps * eff.outer_sd
    gain = 2.0 * params.eta * params.ps * eff.norm_rd2 * eff.gram_sr

    def forms_at(rho: float):
        c1 = g * (params.sigma_r2 + params.sigma_r2_tilde / rho)
        f2 = base + (1.0 - rho) * gain
        return f1, c1, 0.5 * (f2 + f2.conj().T), g * params.sigma_d2

    return forms_at


def transmit_feasible(eff: EffectiveChannels, params: SystemParams) -> tuple[bool, float, float]:
    """Decide whether any transmit design meets the constraints at this filter.

    Zeroing the strong user's beamformer is lossless for feasibility, which
    leaves two quadratic constraints on the weak user's beamformer — the SIC
    condition and the combined-QoS condition — swept over the splitting
    ratio.  Returns (feasible, best splitting ratio, margin).
    """
    if params.gamma_qos == 0.0:
        return True, 0.5, 0.0
    return splitting_feasible(_qos_forms(eff, params))


def _anchor_split(eff: EffectiveChannels, params: SystemParams,
                  rho: float) -> float | None:
    """A feasible QoS split derived from a feasibility witness at the given
    splitting ratio, for seeding the bisection when both endpoint splits are
    infeasible.  The witness beamformer's direct-hop SINR caps the split from
    above and its forwarding budget caps it from below; the midpoint of that
    interval is returned (None when the witness construction fails)."""
    g = params.gamma_qos
    w = quadrant_witness(*_qos_forms(eff, params)(rho))
    if w is None:
        return None
    two_ps = 2.0 * params.ps
    direct = two_ps * float(np.real(w.conj() @ eff.outer_sd @ w)) / params.sigma_d2
    forward = (2.0 * params.eta * (1.0 - rho) * params.ps * eff.norm_rd2
               * float(np.real(w.conj() @ eff.gram_sr @ w)) / params.sigma_d2)
    s = 0.5 * (max(0.0, g - forward) + min(g, direct))
    return min(max(s, 0.0), g * (1.0 - 1e-6))


def dinkelbach_optimal(ch: ChannelRealization, w_r: np.ndarray, params: SystemParams,
                       *, eps: float = 1e-6, max_iter: int = 50) -> TransmitDesign:
    """Globally maximize the strong user's SINR at a fixed receive filter.

    Dinkelbach's method on the fractional SINR: each iterate solves the
    linearized subproblem (maximized over the QoS split by bisection) and
    updates t to the recovered point's SINR until the update stalls.  Raises
    InfeasibleError when the constraints cannot be met at this filter.
    """
    eff = effective_channels(ch, w_r)
    if params.gamma_qos == 0.0:
        rho = 1.0 - 1e-9
        m = eff.h_eff.shape[0]
        norm = np.sqrt(eff.norm_eff2)
        if norm <= 1e-30:
            w1 = np.zeros(m, dtype=complex)
        else:
            w1 = eff.h_eff / norm
        rate_argument = (2.0 * params.ps * eff.norm_eff2
                         / (params.sigma_r2 + params.sigma_r2_tilde / rho))
        return TransmitDesign(w1=w1, w2=np.zeros(m, dtype=complex), rho=rho,
                              rate_argument=float(rate_argument), split=0.0,
                              dual_value=float(rate_argument), iterations=0,
                              trace=(float(rate_argument),))
    ok, rho_best, margin = transmit_feasible(eff, params)
    if not ok:
        raise InfeasibleError(
            f"no transmit design meets the QoS at this filter (margin {margin:.3e})")
    anchor = _anchor_split(eff, params, rho_best)
    t = eps
    trace: list[float] = []
    art: SplitProbe | None = None
    for iteration in range(1, max_iter + 1):
        step = bisect_split(eff, params, t, anchor=anchor)
        if step is None:
            raise InfeasibleError("every QoS split was rejected during bisection")
        art = step
        t_new = step.rate_argument
        trace.append(t_new)
        done = abs(t_new - t) <= eps
        t = t_new
        if done:
            return TransmitDesign(w1=art.w1, w2=art.w2, rho=art.rho,
                                  rate_argument=t, split=art.dual.split,
                                  dual_value=art.dual.value,
                                  iterations=iteration, trace=tuple(trace))
    raise InternalConsistencyError(
        f"Dinkelbach loop did not settle within {max_iter} iterations")
