import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from noma_relay.errors import InfeasibleError, ValidationError
from noma_relay.numerics import (
    LmiProgram,
    eigh_hermitian,
    ensure_hermitian,
    max_eigenvalue,
    null_space_of_row,
    null_space_unit_vector,
    project_onto,
    project_orth,
    solve_lmi,
)


def random_hermitian(rng, n):
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return 0.5 * (a + a.conj().T)


# ---------------------------------------------------------------------------
# eigendecomposition
# ---------------------------------------------------------------------------


def test_eigh_matches_characteristic_polynomial_roots_3x3():
    # independent oracle: eigenvalues of a 3x3 Hermitian matrix are the roots
    # of its characteristic polynomial
    rng = np.random.default_rng(11)
    for _ in range(40):
        a = random_hermitian(rng, 3)
        w, _ = eigh_hermitian(a)
        c2 = -np.trace(a).real
        c1 = 0.5 * (np.trace(a) ** 2 - np.trace(a @ a)).real
        c0 = -np.linalg.det(a).real
        roots = np.sort(np.roots([1.0, c2, c1, c0]).real)
        assert np.allclose(w, roots, atol=1e-10 * max(1.0, np.abs(w).max()))


def test_eigh_reconstructs_matrix():
    rng = np.random.default_rng(12)
    for n in (1, 2, 4, 6, 8):
        a = random_hermitian(rng, n)
        w, v = eigh_hermitian(a)
        assert np.all(np.diff(w) >= 0)
        assert np.allclose(v @ np.diag(w) @ v.conj().T, a, atol=1e-12 * max(1, np.abs(a).max()))
        assert np.allclose(v.conj().T @ v, np.eye(n), atol=1e-12)


def test_eigh_phase_convention_deterministic():
    rng = np.random.default_rng(13)
    a = random_hermitian(rng, 5)
    _, v1 = eigh_hermitian(a)
    _, v2 = eigh_hermitian(a.copy())
    assert np.array_equal(v1, v2)
    # first significant component of each eigenvector is real positive
    for j in range(5):
        col = v1[:, j]
        lead = col[np.argmax(np.abs(col) > 1e-12)]
        assert abs(lead.imag) < 1e-12 and lead.real > 0


def test_max_eigenvalue_rank_one():
    v = np.array([1.0 + 2.0j, -0.5j, 0.25])
    assert np.isclose(max_eigenvalue(np.outer(v, v.conj())), np.linalg.norm(v) ** 2)


def test_ensure_hermitian_rejects_asymmetric():
    with pytest.raises(ValidationError):
        ensure_hermitian(np.array([[1.0, 2.0], [2.1, 1.0]]))
    with pytest.raises(ValidationError):
        ensure_hermitian(np.zeros((2, 3)))


# ---------------------------------------------------------------------------
# projections and null spaces
# ---------------------------------------------------------------------------


@given(st.integers(min_value=0, max_value=10_000))
@settings(deadline=None, max_examples=25)
def test_projection_split_is_orthogonal(seed):
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    d = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    par = project_onto(v, d)
    perp = project_orth(v, d)
    assert np.allclose(par + perp, v, atol=1e-12)
    assert abs(np.vdot(d, perp)) < 1e-10 * np.linalg.norm(v) * np.linalg.norm(d)
    assert abs(np.vdot(par, perp)) < 1e-10 * np.linalg.norm(v) ** 2


def test_project_onto_zero_direction_rejected():
    with pytest.raises(ValidationError):
        project_onto(np.ones(3), np.zeros(3))


def test_null_space_of_row_orthonormal_complement():
    rng = np.random.default_rng(5)
    for m in (2, 3, 5):
        row = rng.standard_normal(m) + 1j * rng.standard_normal(m)
        basis = null_space_of_row(row)
        assert basis.shape == (m, m - 1)
        assert np.allclose(basis.conj().T @ basis, np.eye(m - 1), atol=1e-12)
        assert np.max(np.abs(row @ basis)) < 1e-12 * np.linalg.norm(row)


def test_null_space_unit_vector_picks_the_zero_mode():
    rng = np.random.default_rng(6)
    q, _ = np.linalg.qr(rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4)))
    w = np.array([-3.0, -2.0, -1.0, 0.0])
    a = q @ np.diag(w) @ q.conj().T
    u = null_space_unit_vector(a, scale=3.0)
    assert np.isclose(np.linalg.norm(u), 1.0)
    assert np.linalg.norm(a @ u) < 1e-8


def test_null_space_unit_vector_degenerate_raises():
    from noma_relay.errors import DegenerateNullSpaceError

    with pytest.raises(DegenerateNullSpaceError):
        null_space_unit_vector(np.diag([-1.0, 0.0, 0.0]), scale=1.0)
    with pytest.raises(DegenerateNullSpaceError):
        null_space_unit_vector(np.diag([-2.0, -1.0, -0.5]), scale=1.0)


# ---------------------------------------------------------------------------
# LMI solver
# ---------------------------------------------------------------------------


def test_solve_lmi_scalar_program():
    # minimize x subject to x >= 3 expressed as the 1x1 LMI 3 - x <= 0
    prog = LmiProgram(
        c=np.array([1.0]),
        blocks=[(np.array([[3.0]]), np.array([[[-1.0]]]))],
        lower=np.array([-np.inf]),
    )
    sol = solve_lmi(prog, np.array([10.0]), tol=1e-10)
    assert abs(sol.value - 3.0) < 1e-7
    assert sol.residual <= 0.0


def test_solve_lmi_max_eigenvalue_variational():
    # minimize t subject to A - t I <= 0 gives t = lambda_max(A)
    rng = np.random.default_rng(21)
    a = random_hermitian(rng, 4)
    prog = LmiProgram(
        c=np.array([1.0]),
        blocks=[(a, -np.eye(4)[None, :, :].astype(complex))],
        lower=np.array([-np.inf]),
    )
    sol = solve_lmi(prog, np.array([np.linalg.eigvalsh(a)[-1] + 1.0]), tol=1e-10)
    assert abs(sol.value - np.linalg.eigvalsh(a)[-1]) < 1e-6


def test_solve_lmi_trace_monotone_and_phase1():
    rng = np.random.default_rng(22)
    a = random_hermitian(rng, 3)
    prog = LmiProgram(
        c=np.array([1.0]),
        blocks=[(a, -np.eye(3)[None, :, :].astype(complex))],
        lower=np.array([-np.inf]),
    )
    sol = solve_lmi(prog, None, tol=1e-10)  # no start: phase-I must find one
    vals = np.array(sol.trace)
    assert np.all(np.diff(vals) <= 1e-8 * (1.0 + np.abs(vals[:-1])))
    assert abs(sol.value - np.linalg.eigvalsh(a)[-1]) < 1e-6


def test_solve_lmi_epigraph_geometric_mean():
    # maximize 2 s - x subject to s^2 <= 4 x (as the 2x2 PSD block
    # [[4 x, s], [s, 1]] >= 0) and x >= 0: s = 2 sqrt(x), and maximizing
    # 4 sqrt(x) - x gives x = 4, s = 4, objective 4 (so the min form is -4).
    prog = LmiProgram(
        c=np.array([1.0, -2.0]),
        blocks=[(
            -np.array([[0.0, 0.0], [0.0, 1.0]], dtype=complex),
            np.array([
                -np.array([[4.0, 0.0], [0.0, 0.0]]),
                -np.array([[0.0, 1.0], [1.0, 0.0]]),
            ], dtype=complex),
        )],
        lower=np.array([0.0, 0.0]),
    )
    sol = solve_lmi(prog, np.array([1.0, 0.5]), tol=1e-11)
    assert abs(sol.value - (-4.0)) < 1e-6
    assert abs(sol.x[0] - 4.0) < 1e-4
    assert abs(sol.x[1] - 4.0) < 1e-4


def test_solve_lmi_unbounded_raises_infeasible():
    # minimize -x with only x >= 0: descends forever; floor must trip
    prog = LmiProgram(
        c=np.array([-1.0]),
        blocks=[(-np.eye(1, dtype=complex), np.zeros((1, 1, 1), dtype=complex))],
        lower=np.array([0.0]),
    )
    with pytest.raises(InfeasibleError):
        solve_lmi(prog, np.array([1.0]), tol=1e-9, floor=-1e6)


def test_solve_lmi_infeasible_program_detected():
    # x <= -1 and x >= 0 cannot hold together; phase-I must fail
    prog = LmiProgram(
        c=np.array([1.0]),
        blocks=[(np.eye(1, dtype=complex), np.eye(1, dtype=complex)[None, :, :])],
        lower=np.array([0.0]),
    )
    with pytest.raises(InfeasibleError):
        solve_lmi(prog, None, tol=1e-9)


def test_solve_lmi_rejects_infeasible_start():
    prog = LmiProgram(
        c=np.array([1.0]),
        blocks=[(np.array([[3.0]]), np.array([[[-1.0]]]))],
        lower=np.array([-np.inf]),
    )
    with pytest.raises(ValidationError):
        solve_lmi(prog, np.array([2.0]))  # 3 - 2 = 1 > 0: not feasible


def test_lmi_program_validation():
    with pytest.raises(ValidationError):
        LmiProgram(c=np.ones(9), blocks=[(np.eye(2, dtype=complex),
                                          np.zeros((9, 2, 2), dtype=complex))],
                   lower=np.zeros(9))
    with pytest.raises(ValidationError):
        LmiProgram(c=np.ones(2), blocks=[], lower=np.zeros(2))
