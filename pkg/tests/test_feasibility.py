import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from noma_relay._feasibility import quadrant_witness, splitting_feasible, support_margin


def random_hermitian(rng, k, psd=False):
    a = rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k))
    h = 0.5 * (a + a.conj().T)
    if psd:
        h = a @ a.conj().T / k
    return h


def quad(h, w):
    return float(np.real(w.conj() @ h @ w))


def test_support_margin_hand_case():
    # q1 = 2|a|^2, q2 = 2|b|^2 on the unit circle: both reach 1 only at the
    # balanced vector, so thresholds (1, 1) sit exactly on the boundary
    f1 = np.diag([2.0, 0.0]).astype(complex)
    f2 = np.diag([0.0, 2.0]).astype(complex)
    assert abs(support_margin(f1, 1.0, f2, 1.0)) < 1e-9
    assert support_margin(f1, 0.9, f2, 0.9) > 0.09
    assert support_margin(f1, 1.1, f2, 1.1) < -0.09


def test_negative_margin_means_no_sampled_point_passes():
    rng = np.random.default_rng(5)
    for _ in range(20):
        f1 = random_hermitian(rng, 3)
        f2 = random_hermitian(rng, 3)
        c1, c2 = rng.uniform(0.5, 2.0, 2)
        margin = support_margin(f1, c1, f2, c2)
        if margin >= -1e-6:
            continue
        w = rng.standard_normal((4000, 3)) + 1j * rng.standard_normal((4000, 3))
        w /= np.linalg.norm(w, axis=1, keepdims=True)
        q1 = np.real(np.einsum("ij,jk,ik->i", w.conj(), f1, w))
        q2 = np.real(np.einsum("ij,jk,ik->i", w.conj(), f2, w))
        assert not np.any((q1 >= c1) & (q2 >= c2))


@settings(deadline=None, max_examples=40)
@given(seed=st.integers(0, 10_000), k=st.integers(2, 5))
def test_witness_satisfies_both_constraints(seed, k):
    # thresholds chosen just below a known point's values, so a witness exists
    rng = np.random.default_rng(seed)
    f1 = random_hermitian(rng, k)
    f2 = random_hermitian(rng, k)
    v = rng.standard_normal(k) + 1j * rng.standard_normal(k)
    v /= np.linalg.norm(v)
    c1 = quad(f1, v) - 1e-3
    c2 = quad(f2, v) - 1e-3
    w = quadrant_witness(f1, c1, f2, c2)
    assert w is not None
    assert abs(np.linalg.norm(w) - 1.0) < 1e-9
    assert quad(f1, w) >= c1 - 1e-6 * (1 + abs(c1))
    assert quad(f2, w) >= c2 - 1e-6 * (1 + abs(c2))


def test_witness_reaches_the_hand_case_corner():
    # only one unit direction (up to phases) satisfies both constraints
    f1 = np.diag([2.0, 0.0]).astype(complex)
    f2 = np.diag([0.0, 2.0]).astype(complex)
    w = quadrant_witness(f1, 1.0 - 1e-9, f2, 1.0 - 1e-9)
    assert w is not None
    assert abs(abs(w[0]) - np.sqrt(0.5)) < 1e-4
    assert abs(abs(w[1]) - np.sqrt(0.5)) < 1e-4


def test_witness_none_when_infeasible():
    f1 = np.diag([2.0, 0.0]).astype(complex)
    f2 = np.diag([0.0, 2.0]).astype(complex)
    assert quadrant_witness(f1, 1.5, f2, 1.5) is None


def test_splitting_feasible_reduces_to_margin_when_rho_free():
    f1 = np.diag([2.0, 0.0]).astype(complex)
    f2 = np.diag([0.0, 2.0]).astype(complex)

    def forms_at(rho):
        return f1, 0.5, f2, 0.5

    ok, rho, margin = splitting_feasible(forms_at)
    assert ok
    assert 0.0 < rho < 1.0
    assert abs(margin - support_margin(f1, 0.5, f2, 0.5)) < 1e-9
