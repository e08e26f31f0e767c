"""Slow, independent reference implementations used to validate the solvers.

Nothing here shares code with the production path: the transmit oracle is a
coarse-to-fine exhaustive grid over the raw design variables, the splitting
oracle is a golden-section line search, and the filter oracle is a dense
one-dimensional sweep.  They are deliberately brute force — their only job is
to be obviously correct.
"""

from __future__ import annotations

import numpy as np

from .errors import ValidationError
from .model import ChannelRealization, SystemParams

__all__ = [
    "grid_min_rho",
    "grid_filter",
    "brute_force_transmit",
]

_INV_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


def grid_min_rho(b: float, c: float, *, tol: float = 1e-10) -> tuple[float, float]:
    """Minimize b/rho + c/(1-rho) over rho in (0, 1) by golden-section search.

    Returns (argmin, min value).  Requires b, c > 0 (the function is then
    strictly convex on (0, 1) with a unique interior minimizer).
    """
    if b <= 0 or c <= 0:
        raise ValidationError(f"golden-section oracle needs b, c > 0, got b={b} c={c}")

    def f(r: float) -> float:
        return b / r + c / (1.0 - r)

    lo, hi = 1e-15, 1.0 - 1e-15
    x1 = hi - _INV_GOLDEN * (hi - lo)
    x2 = lo + _INV_GOLDEN * (hi - lo)
    f1, f2 = f(x1), f(x2)
    while hi - lo > tol:
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _INV_GOLDEN * (hi - lo)
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _INV_GOLDEN * (hi - lo)
            f2 = f(x2)
    arg = 0.5 * (lo + hi)
    return float(arg), float(f(arg))


def grid_filter(h_own: np.ndarray, h_other: np.ndarray, rho: float,
                params: SystemParams, *, n: int = 10 ** 6) -> tuple[float, float] | None:
    r"""Dense sweep for the relay receive-filter problem.

    Given the effective receive-side vectors h_own = h_sr^H w1 (the relay's own
    stream) and h_other = h_sr^H w2 (the weak user's stream, which must stay
    decodable), sweep the mixing weight lam in [0, 1] of the unit filter

        w(lam) = sqrt(lam) * e_par + sqrt(1 - lam) * e_perp,

    where e_par/e_perp are the components of h_own along/orthogonal to h_other
    (the optimal filter provably lives in this phase-aligned plane).  Maximizes
    the own-stream captured power |w^H h_own|^2 subject to the pre-SIC
    decodability of the other stream.  After the full sweep, one refinement
    sweep of the winning cell pins the constrained optimum far below the
    coarse resolution (the captured power can be steep at the constraint
    boundary).  Returns (best lam, best captured power), or None when no grid
    point is feasible.
    """
    h1 = np.asarray(h_own, dtype=np.complex128).reshape(-1)
    h2 = np.asarray(h_other, dtype=np.complex128).reshape(-1)
    n2 = float(np.linalg.norm(h2) ** 2)
    if n2 == 0.0:
        raise ValidationError("grid_filter needs a nonzero other-stream vector")
    par = h2 * (np.vdot(h2, h1) / n2)
    alpha = float(np.linalg.norm(par))
    beta = float(np.linalg.norm(h1 - par))

    k = 2.0 * rho * params.ps
    noise = rho * params.sigma_r2 + params.sigma_r2_tilde
    thr = params.gamma_qos

    def sweep(lo: float, hi: float) -> tuple[float, float] | None:
        lam = np.linspace(lo, hi, n)
        captured = (np.sqrt(lam) * alpha + np.sqrt(1.0 - lam) * beta) ** 2
        feasible = k * lam * n2 >= thr * (k * captured + noise)
        if not feasible.any():
            return None
        masked = np.where(feasible, captured, -1.0)
        j = int(np.argmax(masked))
        return float(lam[j]), float(masked[j])

    coarse = sweep(0.0, 1.0)
    if coarse is None:
        return None
    step = 1.0 / (n - 1)
    fine = sweep(max(coarse[0] - step, 0.0), min(coarse[0] + step, 1.0))
    return fine if fine is not None and fine[1] >= coarse[1] else coarse


def brute_force_transmit(ch: ChannelRealization, w_r: np.ndarray, params: SystemParams,
                         *, n: int = 12, levels: int = 3) -> float | None:
    """Coarse-to-fine exhaustive search of the transmit design at a fixed filter.

    Grids powers (p1, p2), unit beam directions (two angles each via the
    cos/sin-phase parametrization, which covers every two-antenna unit vector
    up to an immaterial global phase), and the splitting ratio rho; checks the
    raw decodability / combined-QoS / power constraints; and returns the best
    post-SIC SINR of the strong user's stream (the rate argument), or None when
    no grid point is feasible.  Each refinement level shrinks the box to twice
    the previous grid spacing around the incumbent.  Two source antennas only.
    """
    if ch.m != 2:
        raise ValidationError("the exhaustive transmit oracle only supports m=2")
    w = np.asarray(w_r, dtype=np.complex128).reshape(-1)
    htil = ch.h_sr @ w
    hsd = ch.h_sd
    hh = ch.h_sr.conj().T  # (n, m): rows are per-relay-antenna source vectors
    hrd2 = float(np.linalg.norm(ch.h_rd) ** 2)
    ps, eta = params.ps, params.eta
    sd2, sr2, srt2 = params.sigma_d2, params.sigma_r2, params.sigma_r2_tilde
    thr = params.gamma_qos

    lob = np.array([0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1e-3])
    upb = np.array([1.0, np.pi / 2, 2 * np.pi, 1.0, np.pi / 2, 2 * np.pi, 1 - 1e-3])
    box_lo, box_hi = lob.copy(), upb.copy()
    best, incumbent = -1.0, None
    found_feasible = False

    for _ in range(levels):
        grids = [np.linspace(box_lo[i], box_hi[i], n) for i in range(7)]
        th1, ph1 = np.meshgrid(grids[1], grids[2], indexing="ij")
        th2, ph2 = np.meshgrid(grids[4], grids[5], indexing="ij")

        def forms(th: np.ndarray, ph: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
            # quadratic forms of the unit direction [cos th, sin th * e^{i ph}]
            wx = np.cos(th.ravel())
            wy = np.sin(th.ravel()) * np.exp(1j * ph.ravel())
            fa = np.abs(htil.conj()[0] * wx + htil.conj()[1] * wy) ** 2
            fb = np.abs(hsd.conj()[0] * wx + hsd.conj()[1] * wy) ** 2
            fe = (np.abs(hh[:, 0][:, None] * wx[None, :]
                         + hh[:, 1][:, None] * wy[None, :]) ** 2).sum(axis=0)
            return fa, fb, fe

        f1a, f1b, f1e = forms(th1, ph1)
        f2a, f2b, f2e = forms(th2, ph2)

        for p1 in grids[0]:
            a1, b1, e1 = p1 * f1a, p1 * f1b, p1 * f1e
            for p2 in grids[3]:
                if p1 + p2 > 1.0 + 1e-12:
                    continue
                a2, b2, e2 = p2 * f2a, p2 * f2b, p2 * f2e
                for rho in grids[6]:
                    k = 2.0 * rho * ps
                    sic = k * a2[None, :] - thr * (k * a1[:, None] + rho * sr2 + srt2)
                    mrc = (2 * ps * b2[None, :] / (2 * ps * b1[:, None] + sd2)
                           + 2 * eta * (1 - rho) * ps * (e1[:, None] + e2[None, :]) * hrd2 / sd2
                           - thr)
                    feas = (sic >= 0) & (mrc >= 0)
                    if not feas.any():
                        continue
                    found_feasible = True
                    own = np.where(feas, k * a1[:, None] / (rho * sr2 + srt2), -1.0)
                    j = np.unravel_index(int(np.argmax(own)), own.shape)
                    if own[j] > best:
                        best = float(own[j])
                        incumbent = np.array([p1, th1.ravel()[j[0]], ph1.ravel()[j[0]],
                                              p2, th2.ravel()[j[1]], ph2.ravel()[j[1]], rho])
        if incumbent is None:
            return best if found_feasible else None
        span = (box_hi - box_lo) / (n - 1) * 2.0
        box_lo = np.maximum(lob, incumbent - span)
        box_hi = np.minimum(upb, incumbent + span)
    return best
