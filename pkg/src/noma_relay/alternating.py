"""Outer loop tying the pieces together: alternate the transmit design
(beamformers and splitting ratio at a fixed receive filter) with the
closed-form receive-filter update until the strong user's rate stalls.

Each filter update keeps the incumbent transmit design feasible while never
reducing its rate, and each transmit re-solve starts from a feasible design,
so the rate trace is nondecreasing and bounded — the loop terminates.  Global
optimality is not claimed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleError, InternalConsistencyError, ValidationError
from .model import ChannelRealization, SystemParams, TxSolution
from .optimal_tx import TransmitDesign, dinkelbach_optimal
from .rx_filter import optimal_receive_filter, stream_channels
from .zf_tx import dinkelbach_zf

__all__ = [
    "IterationTrace",
    "init_receiver",
    "alternate",
    "direct_transmission_rate",
]

SCHEMES = ("optimal", "zf")


@dataclass(frozen=True)
class IterationTrace:
    """Strong-user rates after each transmit solve of the alternation."""

    rates: tuple[float, ...]
    converged: bool

    @property
    def iterations(self) -> int:
        return len(self.rates)


def init_receiver(ch: ChannelRealization) -> np.ndarray:
    """Initial receive filter: dominant right singular vector of the
    source->relay channel (maximizes the array gain before any beamformer
    is known).  Deterministic; unit norm."""
    _, s, vh = np.linalg.svd(ch.h_sr)
    if s.size == 0 or s[0] == 0.0:
        raise ValidationError("source->relay channel is zero")
    w = vh[0].conj()
    return w / np.linalg.norm(w)


def _rate_of(argument: float) -> float:
    return float(0.5 * np.log2(1.0 + argument))


def alternate(ch: ChannelRealization, params: SystemParams, scheme: str = "optimal",
              *, max_iter: int = 15, tol: float = 1e-4,
              w0: np.ndarray | None = None
              ) -> tuple[TxSolution, IterationTrace]:
    """Alternating transceiver design for one channel realization.

    ``scheme`` selects the transmit design ("optimal" or "zf").  ``max_iter``
    counts transmit solves; ``max_iter=1`` is the pure transmit design at the
    initial filter.  ``w0`` overrides the deterministic initial receive
    filter (it is normalized here).  Convergence is declared when the rate
    improves by at most ``tol``; a solve that lands up to ``tol`` BELOW the
    incumbent is the same stall seen through the inner solvers' finite
    accuracy (the split bisection resolves the rate to about 1e-5), so the
    incumbent is kept and convergence declared.  An infeasible FIRST
    transmit solve raises InfeasibleError (the instance is in outage); a
    rate decrease beyond ``tol`` or a later infeasibility raises
    InternalConsistencyError, since the filter update provably preserves
    feasibility.
    """
    if scheme not in SCHEMES:
        raise ValidationError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")
    if max_iter < 1:
        raise ValidationError("max_iter must be at least 1")
    solve = dinkelbach_optimal if scheme == "optimal" else dinkelbach_zf

    if w0 is None:
        w_r = init_receiver(ch)
    else:
        w_r = np.asarray(w0, dtype=np.complex128).reshape(-1)
        if w_r.shape != (ch.n,):
            raise ValidationError(
                f"initial filter must have {ch.n} entries, got {w_r.shape}")
        nrm = float(np.linalg.norm(w_r))
        if nrm <= 0.0:
            raise ValidationError("initial filter must be nonzero")
        w_r = w_r / nrm
    design: TransmitDesign = solve(ch, w_r, params)
    rate = _rate_of(design.rate_argument)
    rates = [rate]
    converged = False
    for _ in range(max_iter - 1):
        g1, g2 = stream_channels(ch, design.w1, design.w2)
        try:
            filt = optimal_receive_filter(g1, g2, design.rho, params)
        except InfeasibleError as exc:
            raise InternalConsistencyError(
                f"filter update reported an unsatisfiable decoding constraint "
                f"although the incumbent filter satisfies it "
                f"(rate trace {rates}): {exc}") from exc
        try:
            new_design = solve(ch, filt.w_r, params)
        except InfeasibleError as exc:
            raise InternalConsistencyError(
                f"transmit design became infeasible after a filter update "
                f"(rate trace {rates}): {exc}") from exc
        new_rate = _rate_of(new_design.rate_argument)
        if new_rate < rate - tol:
            raise InternalConsistencyError(
                f"rate decreased from {rate!r} to {new_rate!r} "
                f"(trace {rates})")
        if new_rate <= rate:
            converged = True      # stalled within inner-solver accuracy
            break
        w_r, design = filt.w_r, new_design
        rates.append(new_rate)
        if new_rate - rate <= tol:
            rate = new_rate
            converged = True
            break
        rate = new_rate
    sol = TxSolution(w1=design.w1, w2=design.w2, rho=design.rho, w_r=w_r)
    return sol, IterationTrace(rates=tuple(rates), converged=converged)


def direct_transmission_rate(ch: ChannelRealization, params: SystemParams) -> float:
    """Baseline with no relay: the source serves the weak user over the whole
    slot with a matched beamformer and full power."""
    gain = float(np.linalg.norm(ch.h_sd) ** 2)
    return float(np.log2(1.0 + params.ps * gain / params.sigma_d2))
