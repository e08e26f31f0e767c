"""SINRs, achievable rates, and the constraint audit for a transceiver design.

Conventions: both streams are drawn with symbol power 2*ps (the per-phase
budget concentrated in the active half of the signalling), beamformer norms
carry the power shares, and every SINR below already includes the relay's
power-splitting losses where applicable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import ChannelRealization, SystemParams, TxSolution

__all__ = [
    "ConstraintReport",
    "sinr_d_phase1",
    "sinr_r_pair",
    "relay_power",
    "sinr_d_phase2",
    "rate_r",
    "rate_d",
    "audit",
]


def sinr_d_phase1(sol: TxSolution, ch: ChannelRealization, params: SystemParams) -> float:
    """Weak user's direct-link SINR while the relay stream is interference."""
    sig = 2.0 * params.ps * abs(np.vdot(ch.h_sd, sol.w2)) ** 2
    intf = 2.0 * params.ps * abs(np.vdot(ch.h_sd, sol.w1)) ** 2
    return float(sig / (intf + params.sigma_d2))


def sinr_r_pair(sol: TxSolution, ch: ChannelRealization,
                params: SystemParams) -> tuple[float, float]:
    r"""SINRs at the relay: (weak-user stream before SIC, own stream after SIC).

    The relay splits its received power, keeping a fraction ``rho`` for
    decoding; the filtered observation is
    sqrt(rho) * w_r^H (H^H x + antenna noise) + conversion noise, so the
    pre-SIC SINR of the weak user's stream and the post-SIC SINR of the
    relay's own stream share the noise floor rho*sigma_r2 + sigma_r2_tilde.
    """
    h_eff = ch.h_sr @ sol.w_r  # effective source-side vector seen after filtering
    rho = sol.rho
    k = 2.0 * rho * params.ps
    noise = rho * params.sigma_r2 + params.sigma_r2_tilde
    p1 = k * abs(np.vdot(h_eff, sol.w1)) ** 2
    p2 = k * abs(np.vdot(h_eff, sol.w2)) ** 2
    return float(p2 / (p1 + noise)), float(p1 / noise)


def relay_power(sol: TxSolution, ch: ChannelRealization, params: SystemParams) -> float:
    """Phase-two relay transmit power from phase-one harvesting.

    The harvester integrates the full array's received signal power over the
    (1 - rho) split: 2 * eta * (1-rho) * ps * (||H^H w1||^2 + ||H^H w2||^2).
    """
    g1 = float(np.linalg.norm(ch.h_sr.conj().T @ sol.w1) ** 2)
    g2 = float(np.linalg.norm(ch.h_sr.conj().T @ sol.w2) ** 2)
    return 2.0 * params.eta * (1.0 - sol.rho) * params.ps * (g1 + g2)


def sinr_d_phase2(sol: TxSolution, ch: ChannelRealization, params: SystemParams) -> float:
    """Weak user's SINR from the relay retransmission (maximum-ratio transmit
    over h_rd with all harvested power)."""
    pr = relay_power(sol, ch, params)
    return float(pr * np.linalg.norm(ch.h_rd) ** 2 / params.sigma_d2)


def rate_r(sol: TxSolution, ch: ChannelRealization, params: SystemParams) -> float:
    """Strong user's achievable rate (bit/s/Hz, half pre-log for two phases)."""
    _, own = sinr_r_pair(sol, ch, params)
    return 0.5 * float(np.log2(1.0 + own))


def rate_d(sol: TxSolution, ch: ChannelRealization, params: SystemParams) -> float:
    """Weak user's achievable rate after maximum-ratio combining of the direct
    observation and the relay retransmission."""
    total = sinr_d_phase1(sol, ch, params) + sinr_d_phase2(sol, ch, params)
    return 0.5 * float(np.log2(1.0 + total))


@dataclass(frozen=True)
class ConstraintReport:
    """Normalized feasibility slacks of a design point; all must be >= -tol.

    SINR slacks are normalized by (1 + threshold) so a fixed tolerance means
    the same relative accuracy at every QoS level; the power slack is absolute
    (the budget is already order one); ``filter_norm_err`` and ``rho_interior``
    police the unit-filter and open-interval conventions.
    """

    sic_slack: float        # relay decodes weak stream: (pre-SIC SINR - thr)/(1+thr)
    qos_slack: float        # weak user's combined SINR:  (MRC SINR - thr)/(1+thr)
    power_slack: float      # 1 - ||w1||^2 - ||w2||^2
    rho_interior: float     # min(rho, 1 - rho)
    filter_norm_err: float  # | ||w_r|| - 1 |

    def ok(self, tol: float = 1e-6) -> bool:
        return (self.sic_slack >= -tol and self.qos_slack >= -tol
                and self.power_slack >= -tol and self.rho_interior > 0.0
                and self.filter_norm_err <= tol)

    def worst(self) -> float:
        """Most negative margin (>= 0 means clean)."""
        return min(self.sic_slack, self.qos_slack, self.power_slack,
                   -self.filter_norm_err)


def audit(sol: TxSolution, ch: ChannelRealization, params: SystemParams) -> ConstraintReport:
    """Check a design point against every constraint of the design problem."""
    thr = params.gamma_qos
    pre_sic, _ = sinr_r_pair(sol, ch, params)
    mrc = sinr_d_phase1(sol, ch, params) + sinr_d_phase2(sol, ch, params)
    power = float(np.linalg.norm(sol.w1) ** 2 + np.linalg.norm(sol.w2) ** 2)
    return ConstraintReport(
        sic_slack=(pre_sic - thr) / (1.0 + thr),
        qos_slack=(mrc - thr) / (1.0 + thr),
        power_slack=1.0 - power,
        rho_interior=min(sol.rho, 1.0 - sol.rho),
        filter_norm_err=abs(float(np.linalg.norm(sol.w_r)) - 1.0),
    )
