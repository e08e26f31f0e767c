"""Shared numeric building blocks: Hermitian eigen tools, projections, and a
small interior-point solver for linear matrix inequality (LMI) programs.

All solvers here are deterministic: no randomized pivoting, fixed iteration
orders, fixed schedules.  Matrices are small (dimension <= 8) dense complex
arrays; Hermitian inputs are validated to 1e-12 asymmetry.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import (
    DegenerateNullSpaceError,
    InfeasibleError,
    NonConvergenceError,
    ValidationError,
)

__all__ = [
    "LmiProgram",
    "LmiSolution",
    "ensure_hermitian",
    "max_eigenvalue",
    "eigh_hermitian",
    "null_space_unit_vector",
    "null_space_of_row",
    "project_onto",
    "project_orth",
    "solve_lmi",
]


def ensure_hermitian(mat: np.ndarray, *, tol: float = 1e-12, name: str = "matrix") -> np.ndarray:
    """Validate that ``mat`` is square and Hermitian within ``tol`` (relative).

    Returns the exactly symmetrized matrix (mat + mat^H)/2 as complex128 so
    downstream code can rely on exact Hermitian symmetry.
    """
    a = np.asarray(mat, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValidationError(f"{name} must be square, got shape {a.shape}")
    scale = max(float(np.max(np.abs(a))), 1.0)
    asym = float(np.max(np.abs(a - a.conj().T)))
    if asym > tol * scale:
        raise ValidationError(
            f"{name} is not Hermitian: asymmetry {asym:.3e} exceeds {tol:.1e} * {scale:.3e}"
        )
    return 0.5 * (a + a.conj().T)


def eigh_hermitian(mat: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and unit eigenvectors of a Hermitian matrix.

    Cyclic Jacobi rotations; deterministic including the eigenvector phase
    convention (first component of magnitude > 1e-12 is made real positive).
    """
    a = ensure_hermitian(mat)
    return _kernels.jacobi_eigh(a)


def max_eigenvalue(mat: np.ndarray) -> float:
    """Largest eigenvalue of a Hermitian matrix."""
    w, _ = eigh_hermitian(mat)
    return float(w[-1])


def null_space_unit_vector(mat: np.ndarray, *, scale: float | None = None,
                           rtol: float = 1e-5) -> np.ndarray:
    """Unit vector spanning the (near-)null space of a Hermitian PSD-ordered matrix.

    ``mat`` is expected to be negative semidefinite with exactly one eigenvalue
    at (numerical) zero — the situation produced by the dual solvers, where the
    optimal certificate matrix loses rank by one.  ``scale`` sets the absolute
    magnitude against which "zero" is judged; it defaults to the largest
    absolute eigenvalue of ``mat`` itself, but callers should pass the natural
    scale of the matrix entries when the matrix can be small overall (e.g. a
    1x1 block that is itself zero).  Raises DegenerateNullSpaceError when zero
    or more than one eigenvalue sits inside the tolerance band.
    """
    w, v = eigh_hermitian(mat)
    s = float(max(np.max(np.abs(w)), 1e-300)) if scale is None else float(scale)
    tol = rtol * max(s, 1e-300)
    near = [i for i in range(len(w)) if abs(w[i]) <= tol]
    if len(near) != 1:
        raise DegenerateNullSpaceError(
            f"expected exactly one near-null eigenvalue within {tol:.3e}, "
            f"got {len(near)} (spectrum {np.array2string(w, precision=3)})"
        )
    return v[:, near[0]].copy()


def null_space_of_row(row: np.ndarray) -> np.ndarray:
    """Orthonormal basis (columns) of the orthogonal complement of a vector.

    For a nonzero row vector ``row`` of length m, returns an m x (m-1) matrix
    V with V^H V = I and row @ V = 0.  Deterministic (SVD-based).
    """
    r = np.asarray(row, dtype=np.complex128).reshape(-1)
    nrm = float(np.linalg.norm(r))
    if nrm == 0.0:
        raise ValidationError("cannot take the null space of the zero vector")
    _, _, vh = np.linalg.svd(r.reshape(1, -1))
    basis = vh[1:, :].conj().T
    # deterministic column phases: first significant component real positive
    for j in range(basis.shape[1]):
        col = basis[:, j]
        idx = int(np.argmax(np.abs(col) > 1e-12)) if np.any(np.abs(col) > 1e-12) else 0
        piv = col[idx]
        if abs(piv) > 0:
            basis[:, j] = col * (np.conj(piv) / abs(piv))
    return basis


def project_onto(vec: np.ndarray, direction: np.ndarray) -> np.ndarray:
    """Orthogonal projection of ``vec`` onto the line spanned by ``direction``."""
    d = np.asarray(direction, dtype=np.complex128).reshape(-1)
    v = np.asarray(vec, dtype=np.complex128).reshape(-1)
    den = float(np.real(np.vdot(d, d)))
    if den == 0.0:
        raise ValidationError("cannot project onto the zero vector")
    return d * (np.vdot(d, v) / den)


def project_orth(vec: np.ndarray, direction: np.ndarray) -> np.ndarray:
    """Component of ``vec`` orthogonal to ``direction``."""
    v = np.asarray(vec, dtype=np.complex128).reshape(-1)
    return v - project_onto(v, direction)


# ---------------------------------------------------------------------------
# LMI programs
# ---------------------------------------------------------------------------


@dataclass
class LmiProgram:
    """A small linear-objective program over linear matrix inequalities.

        minimize    c @ x + c0
        subject to  const[j] + sum_i x[i] * coeff[j][i]  <=  0   (PSD order)
                    x[i] >= lower[i]      (use -inf for unbounded entries)

    ``blocks`` is a list of (const, coeff) pairs where ``const`` is (n, n)
    Hermitian and ``coeff`` is (k, n, n) with Hermitian slices.  At most 8
    variables; block sizes at most 8.
    """

    c: np.ndarray
    blocks: list[tuple[np.ndarray, np.ndarray]]
    lower: np.ndarray
    c0: float = 0.0

    def __post_init__(self) -> None:
        self.c = np.asarray(self.c, dtype=np.float64).reshape(-1)
        self.lower = np.asarray(self.lower, dtype=np.float64).reshape(-1)
        k = self.c.shape[0]
        if not 1 <= k <= 8:
            raise ValidationError(f"LmiProgram supports 1..8 variables, got {k}")
        if self.lower.shape[0] != k:
            raise ValidationError("lower bounds length must match variable count")
        if not self.blocks:
            raise ValidationError("LmiProgram needs at least one block")
        checked = []
        for bi, (const, coeff) in enumerate(self.blocks):
            const = ensure_hermitian(const, name=f"block {bi} constant")
            coeff = np.asarray(coeff, dtype=np.complex128)
            if coeff.shape != (k,) + const.shape:
                raise ValidationError(
                    f"block {bi} coefficient tensor must have shape {(k,) + const.shape}"
                )
            if const.shape[0] > 8:
                raise ValidationError("LMI blocks larger than 8x8 are not supported")
            herm = np.empty_like(coeff)
            for i in range(k):
                herm[i] = ensure_hermitian(coeff[i], name=f"block {bi} coefficient {i}")
            checked.append((const, herm))
        self.blocks = checked

    @property
    def num_vars(self) -> int:
        return int(self.c.shape[0])

    def objective(self, x: np.ndarray) -> float:
        return float(self.c @ np.asarray(x, dtype=np.float64)) + self.c0

    def constraint_values(self, x: np.ndarray) -> list[np.ndarray]:
        """The matrices G_j(x); all must be negative semidefinite at a feasible x."""
        x = np.asarray(x, dtype=np.float64)
        out = []
        for const, coeff in self.blocks:
            g = const.copy()
            for i in range(self.num_vars):
                g = g + x[i] * coeff[i]
            out.append(g)
        return out

    def max_residual(self, x: np.ndarray) -> float:
        """Worst feasibility violation: max over blocks of lambda_max(G_j(x)),
        and over bound constraints of lower[i] - x[i].  <= 0 means feasible."""
        res = -np.inf
        for g in self.constraint_values(x):
            res = max(res, max_eigenvalue(g))
        x = np.asarray(x, dtype=np.float64)
        for i in range(self.num_vars):
            if np.isfinite(self.lower[i]):
                res = max(res, float(self.lower[i] - x[i]))
        return float(res)

    def _packed(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        k = self.num_vars
        nb = len(self.blocks)
        kmax = max(const.shape[0] for const, _ in self.blocks)
        f0 = np.zeros((nb, kmax, kmax), dtype=np.complex128)
        fc = np.zeros((nb, k, kmax, kmax), dtype=np.complex128)
        bsz = np.zeros(nb, dtype=np.int64)
        for j, (const, coeff) in enumerate(self.blocks):
            n = const.shape[0]
            bsz[j] = n
            f0[j, :n, :n] = const
            fc[j, :, :n, :n] = coeff
        lb = np.where(np.isfinite(self.lower), self.lower, -1e300)
        return f0, fc, bsz, lb


@dataclass
class LmiSolution:
    """Result of :func:`solve_lmi`."""

    x: np.ndarray
    value: float
    trace: list[float] = field(default_factory=list)
    residual: float = 0.0
    stages: int = 0


def _initial_point(prog: LmiProgram) -> np.ndarray | None:
    """Strictly feasible start via an internal max-eigenvalue relaxation.

    Tries a shifted box point first; if some block is indefinite there, runs a
    short phase-I on an auxiliary slack variable (minimize s subject to
    G_j(x) - s I <= 0), stopping as soon as s < 0.
    """
    k = prog.num_vars
    x = np.where(np.isfinite(prog.lower), prog.lower + 1.0, 0.0)
    if prog.max_residual(x) < 0:
        return x

    # phase I: extra slack variable appended
    f0, fc, bsz, lb = prog._packed()
    nb, kmax = f0.shape[0], f0.shape[1]
    fc1 = np.zeros((nb, k + 1, kmax, kmax), dtype=np.complex128)
    fc1[:, :k] = fc
    for j in range(nb):
        n = int(bsz[j])
        fc1[j, k, :n, :n] = -np.eye(n)
    lb1 = np.concatenate([lb, [-1e300]])
    c1 = np.zeros(k + 1)
    c1[k] = 1.0
    worst = max(max_eigenvalue(g) for g in prog.constraint_values(x))
    x1 = np.concatenate([x, [worst + 1.0]])
    xs, status, _, _ = _kernels.barrier_solve(
        c1, f0, fc1, bsz, lb1, x1, 1e-6, 40, 60, -1e18, -1e-9
    )
    if status in (_kernels.STATUS_EARLY, _kernels.STATUS_OK,
                  _kernels.STATUS_UNBOUNDED) and xs[k] < 0:
        cand = xs[:k].copy()
        if prog.max_residual(cand) < 0:
            return cand
    return None


def solve_lmi(prog: LmiProgram, start: np.ndarray | None = None, *,
              tol: float = 1e-9, floor: float = -1e12,
              max_stages: int = 60) -> LmiSolution:
    """Solve a small LMI program by a log-det barrier / damped Newton method.

    The barrier weight shrinks by 0.2 per stage until the duality-gap bound
    mu * nu drops below ``tol * (1 + |objective|)``.  The per-stage objective
    values are recorded in ``trace`` (non-increasing up to tol).  ``start``
    must be strictly feasible when given; otherwise a phase-I search runs
    first.  Raises InfeasibleError when no strictly feasible point is found
    or when the objective dives below ``floor`` (an unbounded descent ray,
    which for the dual programs in this package certifies primal
    infeasibility), and NonConvergenceError when the stage cap is exhausted.
    """
    f0, fc, bsz, lb = prog._packed()
    if start is None:
        start = _initial_point(prog)
        if start is None:
            raise InfeasibleError("no strictly feasible point found for LMI program")
    else:
        start = np.asarray(start, dtype=np.float64).reshape(-1).copy()
        if start.shape[0] != prog.num_vars:
            raise ValidationError("start has wrong length")
        if prog.max_residual(start) >= 0:
            raise ValidationError("start point is not strictly feasible")

    x, status, trace, ntrace = _kernels.barrier_solve(
        prog.c, f0, fc, bsz, lb, start, tol, max_stages, 60, floor, -np.inf
    )
    values = [float(t) + prog.c0 for t in trace[:ntrace]]
    if status == _kernels.STATUS_UNBOUNDED:
        raise InfeasibleError(
            f"objective descended below floor ({values[-1]:.6g} < {floor + prog.c0:.6g})"
        )
    if status == _kernels.STATUS_BAD_START:
        raise ValidationError("start point is not strictly feasible")
    if status != _kernels.STATUS_OK:
        raise NonConvergenceError(f"barrier stage cap ({max_stages}) exhausted")
    residual = prog.max_residual(x)
    return LmiSolution(x=x, value=prog.objective(x), trace=values,
                       residual=float(residual), stages=int(ntrace))
