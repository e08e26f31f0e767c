"""Exact feasibility test for 'two Hermitian quadratic forms over the unit
sphere, plus a scalar splitting ratio' — the shape shared by both transmit
schemes once the strong user's beamformer is zeroed out (which is lossless
for pure feasibility: moving its power into the weak user's beamformer can
only improve every constraint while preserving the harvested energy).

For a fixed splitting ratio rho the question is whether a unit vector w
exists with  w^H F1 w >= c1  and  w^H F2 w >= c2.  The joint range
{(w^H F1 w, w^H F2 w) : ||w|| = 1} is a convex, compact subset of the plane
(the numerical range of F1 + i F2), so it misses the closed upper-right
quadrant at (c1, c2) iff some nonnegative mixture separates them:

    exists mu in [0,1]:  lambda_max(mu F1 + (1-mu) F2)  <  mu c1 + (1-mu) c2.

The inner minimand is convex in mu (a max of affine functions minus an affine
one), so golden-section search decides each rho exactly up to roundoff; an
outer scan plus local refinement handles the rho dependence.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from . import _kernels

__all__ = ["support_margin", "splitting_feasible", "quadrant_witness"]

_INV_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


def quadrant_witness(f1: np.ndarray, c1: float, f2: np.ndarray, c2: float,
                     *, iters: int = 80) -> np.ndarray | None:
    """A unit vector w with  w^H F1 w >= c1  and  w^H F2 w >= c2, assuming
    the support margin is nonnegative.  Returns None when roundoff defeats
    the construction — callers must treat that as "try something else",
    never as infeasibility.

    Construction: the top eigenvector of F1 satisfies the first constraint,
    that of F2 the second.  Bisecting the mixture weight finds the
    crossover; there the top eigenspace is (numerically) two-dimensional,
    and on it the two forms trace a segment of the line
    mu*x + (1-mu)*y = lambda_max, which lies above the corner (c1, c2), so
    placing x = c1 on the segment forces y >= c2.
    """
    h1 = 0.5 * (f1 + f1.conj().T)
    h2 = 0.5 * (f2 + f2.conj().T)
    tol1 = 1e-9 * (1.0 + abs(c1))
    tol2 = 1e-9 * (1.0 + abs(c2))

    def top(mu: float) -> np.ndarray:
        _, vecs = _kernels.jacobi_eigh(mu * h1 + (1.0 - mu) * h2)
        return np.ascontiguousarray(vecs[:, -1])

    def quads(w: np.ndarray) -> tuple[float, float]:
        return (float(np.real(w.conj() @ h1 @ w)),
                float(np.real(w.conj() @ h2 @ w)))

    w_hi = top(1.0)
    q1, q2 = quads(w_hi)
    if q1 < c1 - tol1:
        return None          # even lambda_max(F1) misses c1: no margin
    if q2 >= c2 - tol2:
        return w_hi
    w_lo = top(0.0)
    q1, q2 = quads(w_lo)
    if q2 < c2 - tol2:
        return None
    if q1 >= c1 - tol1:
        return w_lo

    mu_lo, mu_hi = 0.0, 1.0
    for _ in range(iters):
        mu = 0.5 * (mu_lo + mu_hi)
        w = top(mu)
        q1, q2 = quads(w)
        if q1 >= c1 - tol1 and q2 >= c2 - tol2:
            return w
        if q1 >= c1:
            mu_hi, w_hi = mu, w
        else:
            mu_lo, w_lo = mu, w
        if mu_hi - mu_lo < 1e-13:
            break

    # Two-dimensional finish in span{w_hi, w_lo}: pick the mix with
    # w^H F1 w = c1 exactly; the segment identity hands over the rest.
    r = w_lo - (w_hi.conj() @ w_lo) * w_hi
    nr = float(np.linalg.norm(r))
    if nr < 1e-9:
        return None
    basis = np.stack([w_hi, r / nr], axis=1)
    a1 = basis.conj().T @ h1 @ basis
    ew, ev = _kernels.jacobi_eigh(0.5 * (a1 + a1.conj().T))
    lam_n, lam_x = float(ew[0]), float(ew[-1])
    if lam_x - lam_n < 1e-15 * (1.0 + abs(lam_x)):
        return None
    frac = min(max((c1 - lam_n) / (lam_x - lam_n), 0.0), 1.0)
    x = np.sqrt(1.0 - frac) * ev[:, 0] + np.sqrt(frac) * ev[:, -1]
    w = basis @ x
    w = w / np.linalg.norm(w)
    q1, q2 = quads(w)
    if q1 >= c1 - 1e-6 * (1.0 + abs(c1)) and q2 >= c2 - 1e-6 * (1.0 + abs(c2)):
        return w
    return None


def support_margin(f1: np.ndarray, c1: float, f2: np.ndarray, c2: float,
                   *, iters: int = 70) -> float:
    """min over mu in [0,1] of lambda_max(mu F1 + (1-mu) F2) - (mu c1 + (1-mu) c2).

    Nonnegative iff some unit vector satisfies both quadratic constraints.
    """

    def val(mu: float) -> float:
        m = mu * f1 + (1.0 - mu) * f2
        w, _ = _kernels.jacobi_eigh(0.5 * (m + m.conj().T))
        return float(w[-1]) - (mu * c1 + (1.0 - mu) * c2)

    lo, hi = 0.0, 1.0
    x1 = hi - _INV_GOLDEN * (hi - lo)
    x2 = lo + _INV_GOLDEN * (hi - lo)
    v1, v2 = val(x1), val(x2)
    for _ in range(iters):
        if v1 <= v2:
            hi, x2, v2 = x2, x1, v1
            x1 = hi - _INV_GOLDEN * (hi - lo)
            v1 = val(x1)
        else:
            lo, x1, v1 = x1, x2, v2
            x2 = lo + _INV_GOLDEN * (hi - lo)
            v2 = val(x2)
    return min(val(0.0), val(1.0), v1, v2)


def splitting_feasible(forms_at: Callable[[float], tuple[np.ndarray, float, np.ndarray, float]],
                       *, coarse: int = 32, refine: int = 40) -> tuple[bool, float, float]:
    """Maximize the support margin over the splitting ratio.

    ``forms_at(rho)`` returns (F1, c1, F2, c2) for that splitting ratio.
    Returns (feasible, best rho, best margin).  The rho axis is scanned on a
    two-sided geometric grid (the binding regimes live near both endpoints)
    and then polished by golden-section around the best cell.
    """
    grid = np.unique(np.concatenate([
        np.geomspace(1e-6, 0.5, coarse),
        1.0 - np.geomspace(1e-6, 0.5, coarse),
    ]))

    def margin(rho: float) -> float:
        f1, c1, f2, c2 = forms_at(float(rho))
        return support_margin(f1, c1, f2, c2)

    vals = np.array([margin(r) for r in grid])
    j = int(np.argmax(vals))
    best_rho, best_val = float(grid[j]), float(vals[j])
    if best_val >= 0.0:
        return True, best_rho, best_val

    lo = grid[max(j - 1, 0)]
    hi = grid[min(j + 1, len(grid) - 1)]
    x1 = hi - _INV_GOLDEN * (hi - lo)
    x2 = lo + _INV_GOLDEN * (hi - lo)
    v1, v2 = margin(x1), margin(x2)
    for _ in range(refine):
        if v1 >= v2:  # maximizing
            hi, x2, v2 = x2, x1, v1
            x1 = hi - _INV_GOLDEN * (hi - lo)
            v1 = margin(x1)
        else:
            lo, x1, v1 = x1, x2, v2
            x2 = lo + _INV_GOLDEN * (hi - lo)
            v2 = margin(x2)
        if max(v1, v2) > best_val:
            best_val = max(v1, v2)
            best_rho = x1 if v1 >= v2 else x2
        if best_val >= 0.0:
            return True, float(best_rho), float(best_val)
    return best_val >= 0.0, float(best_rho), float(best_val)
