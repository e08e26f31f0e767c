"""Low-level numeric kernels (JIT-compiled when numba is available).

Everything in here works on plain ndarrays and scalars so the same source
compiles under numba's nopython mode and also runs as ordinary numpy code
when numba is not installed (or NUMBA_DISABLE_JIT=1).  Matrices are small
(at most 8x8), so the kernels favour explicit loops over LAPACK calls.
"""

from __future__ import annotations

import numpy as np

try:  # pragma: no cover - exercised implicitly by every caller
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def deco(func):
            return func

        return deco


# ---------------------------------------------------------------------------
# Cholesky factorization of a Hermitian positive definite matrix
# ---------------------------------------------------------------------------


@njit(cache=True)
def chol_herm(s, lo):
    """In-place lower Cholesky of Hermitian ``s`` into ``lo``.

    Returns False if a pivot is not strictly positive (i.e. ``s`` is not
    positive definite), in which case ``lo`` is garbage.
    """
    n = s.shape[0]
    for i in range(n):
        for j in range(i + 1):
            acc = s[i, j]
            for t in range(j):
                acc -= lo[i, t] * np.conj(lo[j, t])
            if i == j:
                piv = acc.real
                if piv <= 0.0 or not np.isfinite(piv):
                    return False
                lo[i, i] = np.sqrt(piv)
            else:
                lo[i, j] = acc / lo[j, j]
    return True


@njit(cache=True)
def chol_logdet(lo, n):
    """log det(S) from its Cholesky factor (S = lo @ lo^H)."""
    acc = 0.0
    for i in range(n):
        acc += np.log(lo[i, i].real)
    return 2.0 * acc


@njit(cache=True)
def chol_inverse(lo, out, n):
    """Inverse of S = lo @ lo^H by forward/back substitution, into ``out``."""
    # Solve S x = e_j column by column.
    for j in range(n):
        # forward: lo @ y = e_j
        for i in range(n):
            acc = 1.0 + 0.0j if i == j else 0.0 + 0.0j
            for t in range(i):
                acc -= lo[i, t] * out[t, j]
            out[i, j] = acc / lo[i, i]
        # backward: lo^H @ x = y
        for i in range(n - 1, -1, -1):
            acc = out[i, j]
            for t in range(i + 1, n):
                acc -= np.conj(lo[t, i]) * out[t, j]
            out[i, j] = acc / lo[i, i]


@njit(cache=True)
def _solve_spd_real(h, g, d):
    """Solve h @ d = -g for real symmetric positive definite ``h``.

    Returns False (leaving ``d`` garbage) when a Cholesky pivot is not
    strictly positive, so callers can add diagonal jitter and retry instead
    of catching exceptions.
    """
    n = h.shape[0]
    lo = np.zeros((n, n), dtype=np.float64)
    for i in range(n):
        for j in range(i + 1):
            acc = h[i, j]
            for t in range(j):
                acc -= lo[i, t] * lo[j, t]
            if i == j:
                if acc <= 0.0 or not np.isfinite(acc):
                    return False
                lo[i, i] = np.sqrt(acc)
            else:
                lo[i, j] = acc / lo[j, j]
    # forward: lo @ y = -g
    for i in range(n):
        acc = -g[i]
        for t in range(i):
            acc -= lo[i, t] * d[t]
        d[i] = acc / lo[i, i]
    # backward: lo^T @ d = y
    for i in range(n - 1, -1, -1):
        acc = d[i]
        for t in range(i + 1, n):
            acc -= lo[t, i] * d[t]
        d[i] = acc / lo[i, i]
    return True


# ---------------------------------------------------------------------------
# Cyclic Jacobi eigendecomposition for Hermitian matrices
# ---------------------------------------------------------------------------


@njit(cache=True)
def jacobi_eigh(a_in):
    """Eigen-decomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Returns (w, v) with eigenvalues ``w`` ascending and unit eigenvectors in
    the columns of ``v``.  Deterministic: fixed sweep order, convergence when
    the off-diagonal Frobenius mass falls below 1e-14 times the matrix norm,
    30-sweep cap.
    """
    n = a_in.shape[0]
    a = a_in.copy().astype(np.complex128)
    v = np.eye(n, dtype=np.complex128)
    if n == 1:
        w = np.empty(1, dtype=np.float64)
        w[0] = a[0, 0].real
        return w, v

    norm = 0.0
    for i in range(n):
        for j in range(n):
            norm += abs(a[i, j]) ** 2
    norm = np.sqrt(norm)
    tol = 1e-14 * max(norm, 1e-300)

    for _sweep in range(30):
        off = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                off += abs(a[p, q]) ** 2
        off = np.sqrt(2.0 * off)
        if off <= tol:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                m = abs(apq)
                if m <= 1e-300:
                    continue
                phase = apq / m
                tau = (a[q, q].real - a[p, p].real) / (2.0 * m)
                if tau >= 0.0:
                    t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                # Columns: [ap aq] <- [ap aq] @ [[c, s*phase], [-s*conj(phase), c]]
                for i in range(n):
                    aip = a[i, p]
                    aiq = a[i, q]
                    a[i, p] = c * aip - s * np.conj(phase) * aiq
                    a[i, q] = s * phase * aip + c * aiq
                    vip = v[i, p]
                    viq = v[i, q]
                    v[i, p] = c * vip - s * np.conj(phase) * viq
                    v[i, q] = s * phase * vip + c * viq
                # Rows (conjugate transpose of the same rotation on the left)
                for i in range(n):
                    api = a[p, i]
                    aqi = a[q, i]
                    a[p, i] = c * api - s * phase * aqi
                    a[q, i] = s * np.conj(phase) * api + c * aqi

    w = np.empty(n, dtype=np.float64)
    for i in range(n):
        w[i] = a[i, i].real
    # insertion sort ascending, carrying eigenvector columns along
    for i in range(1, n):
        key = w[i]
        col = v[:, i].copy()
        j = i - 1
        while j >= 0 and w[j] > key:
            w[j + 1] = w[j]
            v[:, j + 1] = v[:, j]
            j -= 1
        w[j + 1] = key
        v[:, j + 1] = col
    # deterministic phase: first non-negligible component real positive
    for j in range(n):
        idx = -1
        for i in range(n):
            if abs(v[i, j]) > 1e-12:
                idx = i
                break
        if idx < 0:
            idx = 0
        piv = v[idx, j]
        m = abs(piv)
        if m > 0.0:
            ph = np.conj(piv) / m
            for i in range(n):
                v[i, j] = v[i, j] * ph
    return w, v


# ---------------------------------------------------------------------------
# Barrier interior-point solver for small linear matrix inequality programs
# ---------------------------------------------------------------------------
#
#   minimize    c @ x
#   subject to  G_j(x) = F0[j] + sum_i x[i] * FC[j, i]  <=  0   (Hermitian PSD order)
#               x[i] >= lb[i]                   (lb[i] <= -1e299 means unbounded)
#
# Log-det barrier with a damped Newton method on the centring problems and a
# fixed multiplicative schedule on the barrier weight.  Status codes:
#   0 converged, 1 infeasible start, 2 stage cap hit, 3 objective below
#   ``floor`` (certifies an unbounded descent ray => primal infeasible for the
#   duals this package builds), 4 early stop (objective below ``stop_below``).

STATUS_OK = 0
STATUS_BAD_START = 1
STATUS_STAGE_CAP = 2
STATUS_UNBOUNDED = 3
STATUS_EARLY = 4


@njit(cache=True)
def _strictly_feasible(x, f0, fc, bsz, lb, lo_work, s_work):
    k = x.shape[0]
    for i in range(k):
        if lb[i] > -1e299 and not (x[i] > lb[i]):
            return False
    nb = f0.shape[0]
    for j in range(nb):
        n = bsz[j]
        for r in range(n):
            for cjj in range(n):
                acc = -f0[j, r, cjj]
                for i in range(k):
                    acc -= x[i] * fc[j, i, r, cjj]
                s_work[r, cjj] = acc
        if not chol_herm(s_work[:n, :n], lo_work[:n, :n]):
            return False
    return True


@njit(cache=True)
def _barrier_value(x, cvec, f0, fc, bsz, lb, mu, lo_work, s_work):
    """f_mu(x) = c@x + mu * Phi(x); returns +inf if x is not strictly feasible."""
    k = x.shape[0]
    val = 0.0
    for i in range(k):
        val += cvec[i] * x[i]
    phi = 0.0
    for i in range(k):
        if lb[i] > -1e299:
            d = x[i] - lb[i]
            if not (d > 0.0):
                return np.inf
            phi -= np.log(d)
    nb = f0.shape[0]
    for j in range(nb):
        n = bsz[j]
        for r in range(n):
            for cjj in range(n):
                acc = -f0[j, r, cjj]
                for i in range(k):
                    acc -= x[i] * fc[j, i, r, cjj]
                s_work[r, cjj] = acc
        if not chol_herm(s_work[:n, :n], lo_work[:n, :n]):
            return np.inf
        phi -= chol_logdet(lo_work[:n, :n], n)
    return val + mu * phi


@njit(cache=True)
def barrier_solve(cvec, f0, fc, bsz, lb, x0, tol, max_outer, max_inner,
                  floor, stop_below):
    """Minimize c@x over the LMI feasible set.  See module comment."""
    k = cvec.shape[0]
    nb = f0.shape[0]
    kmax = f0.shape[1]

    x = x0.copy()
    trace = np.zeros(max_outer, dtype=np.float64)
    ntrace = 0

    lo_work = np.zeros((kmax, kmax), dtype=np.complex128)
    s_work = np.zeros((kmax, kmax), dtype=np.complex128)
    sinv = np.zeros((kmax, kmax), dtype=np.complex128)
    mwork = np.zeros((k, kmax, kmax), dtype=np.complex128)

    if not _strictly_feasible(x, f0, fc, bsz, lb, lo_work, s_work):
        return x, STATUS_BAD_START, trace, 0

    # occupancy mask: which variables touch which block
    occ = np.zeros((nb, k), dtype=np.uint8)
    for j in range(nb):
        n = bsz[j]
        for i in range(k):
            for r in range(n):
                for cjj in range(n):
                    if fc[j, i, r, cjj] != 0.0:
                        occ[j, i] = 1
                        break
                if occ[j, i] == 1:
                    break

    nu = 0.0
    for j in range(nb):
        nu += bsz[j]
    for i in range(k):
        if lb[i] > -1e299:
            nu += 1.0

    f_lin = 0.0
    for i in range(k):
        f_lin += cvec[i] * x[i]
    mu = 0.1 * (1.0 + abs(f_lin)) / nu
    if mu < tol:
        mu = tol

    grad = np.zeros(k, dtype=np.float64)
    hess = np.zeros((k, k), dtype=np.float64)
    status = STATUS_STAGE_CAP

    for _outer in range(max_outer):
        for _inner in range(max_inner):
            # gradient and Hessian of f_mu at x
            for i in range(k):
                grad[i] = cvec[i]
                for l in range(k):
                    hess[i, l] = 0.0
            for i in range(k):
                if lb[i] > -1e299:
                    d = x[i] - lb[i]
                    grad[i] += -mu / d
                    hess[i, i] += mu / (d * d)
            for j in range(nb):
                n = bsz[j]
                for r in range(n):
                    for cjj in range(n):
                        acc = -f0[j, r, cjj]
                        for i in range(k):
                            acc -= x[i] * fc[j, i, r, cjj]
                        s_work[r, cjj] = acc
                if not chol_herm(s_work[:n, :n], lo_work[:n, :n]):
                    # should not happen (we only step inside); bail out
                    return x, STATUS_STAGE_CAP, trace, ntrace
                chol_inverse(lo_work[:n, :n], sinv[:n, :n], n)
                for i in range(k):
                    if occ[j, i] == 0:
                        continue
                    # mwork[i] = sinv @ fc[j, i]
                    for r in range(n):
                        for cjj in range(n):
                            acc = 0.0 + 0.0j
                            for t in range(n):
                                acc += sinv[r, t] * fc[j, i, t, cjj]
                            mwork[i, r, cjj] = acc
                    tr = 0.0
                    for r in range(n):
                        tr += mwork[i, r, r].real
                    grad[i] += mu * tr
                for i in range(k):
                    if occ[j, i] == 0:
                        continue
                    for l in range(i, k):
                        if occ[j, l] == 0:
                            continue
                        tr = 0.0
                        for r in range(n):
                            for t in range(n):
                                tr += (mwork[i, r, t] * mwork[l, t, r]).real
                        hess[i, l] += mu * tr
                        if l != i:
                            hess[l, i] += mu * tr

            # Newton direction with diagonal-jitter fallback for (near-)singular
            # Hessians (possible when two variables share coefficient matrices)
            jitter = 0.0
            ok = False
            d = np.zeros(k, dtype=np.float64)
            for _try in range(8):
                hh = hess.copy()
                if jitter > 0.0:
                    for i in range(k):
                        hh[i, i] += jitter
                if _solve_spd_real(hh, grad, d):
                    fin = True
                    for i in range(k):
                        if not np.isfinite(d[i]):
                            fin = False
                    if fin:
                        ok = True
                        break
                tr = 0.0
                for i in range(k):
                    tr += abs(hess[i, i])
                jitter = max(jitter * 100.0, 1e-12 * (tr / k + 1.0))
            if not ok:
                break

            gtd = 0.0
            for i in range(k):
                gtd += grad[i] * d[i]
            dec = -gtd  # Newton decrement squared (lambda^2)
            fmu = _barrier_value(x, cvec, f0, fc, bsz, lb, mu, lo_work, s_work)
            if dec <= 1e-11 * (1.0 + abs(fmu)):
                break

            # backtracking line search: stay strictly feasible + Armijo
            step = 1.0
            accepted = False
            for _ls in range(60):
                xn = x + step * d
                fn = _barrier_value(xn, cvec, f0, fc, bsz, lb, mu,
                                    lo_work, s_work)
                if np.isfinite(fn) and fn <= fmu + 0.25 * step * gtd:
                    x = xn
                    accepted = True
                    break
                step *= 0.5
            if not accepted:
                break

        f_lin = 0.0
        for i in range(k):
            f_lin += cvec[i] * x[i]
        trace[ntrace] = f_lin
        ntrace += 1
        if f_lin < floor:
            status = STATUS_UNBOUNDED
            break
        if f_lin < stop_below:
            status = STATUS_EARLY
            break
        if mu * nu <= tol * (1.0 + abs(f_lin)):
            status = STATUS_OK
            break
        mu *= 0.2

    return x, status, trace, ntrace
