import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from scipy.linalg import expm

from quadsym.errors import ArgumentError, SingularityError
from quadsym.matcore import (
    characteristic_coefficient,
    characteristic_coefficients,
    check_positive_definite,
    commutator_characteristic_coefficient,
    matrix_exponential,
    resymplectify,
    symplectic_defect,
    symplectic_form,
)

finite = st.floats(min_value=-1.0, max_value=1.0, allow_nan=False)


def random_symplectic_matrix(rng, n, scale=0.5):
    K = rng.uniform(-1, 1, (2 * n, 2 * n))
    K = scale * (K + K.T) / 2
    return expm(symplectic_form(n) @ K)


# characteristic coefficients -------------------------------------------------


def test_identity_order_two():
    assert characteristic_coefficient(np.eye(4), 2) == pytest.approx(6.0)


def test_commutator_one_mode_determinant():
    C = -symplectic_form(1) / 2
    assert characteristic_coefficient(C, 2) == pytest.approx(0.25)


def test_order_three_matches_characteristic_polynomial(rng):
    A = rng.normal(size=(4, 4))
    M = A + A.T
    # np.poly: det(x I - M) = x^4 + c1 x^3 + ... ; c_r = (-1)^r C_r
    c = np.poly(M)
    assert characteristic_coefficient(M, 3) == pytest.approx(-c[3], rel=1e-12)


@pytest.mark.parametrize("n", range(1, 9))
def test_all_orders_match_polynomial(rng, n):
    M = rng.normal(size=(n, n))
    c = np.poly(M)
    expected = np.array([(-1) ** r * c[r] for r in range(1, n + 1)])
    np.testing.assert_allclose(characteristic_coefficients(M), expected, rtol=1e-9, atol=1e-9)


def test_extremes_are_trace_and_determinant(rng):
    M = rng.normal(size=(5, 5))
    assert characteristic_coefficient(M, 1) == pytest.approx(np.trace(M))
    assert characteristic_coefficient(M, 5) == pytest.approx(np.linalg.det(M))


@pytest.mark.parametrize("modes", [1, 2, 3])
def test_commutator_closed_form(modes):
    C = -symplectic_form(modes) / 2
    for r in range(1, 2 * modes + 1):
        assert characteristic_coefficient(C, r) == pytest.approx(
            commutator_characteristic_coefficient(modes, r), abs=1e-14
        )


@pytest.mark.parametrize("r", [0, 5, 1.5])
def test_order_out_of_range(r):
    with pytest.raises(ArgumentError):
        characteristic_coefficient(np.eye(4), r)


def test_non_square_rejected():
    with pytest.raises(ArgumentError):
        characteristic_coefficient(np.ones((2, 3)), 1)


def test_nan_rejected():
    M = np.eye(2)
    M[0, 1] = np.nan
    with pytest.raises(ArgumentError):
        characteristic_coefficient(M, 1)


# matrix exponential ------------------------------------------------------------


def test_exp_zero_is_identity():
    np.testing.assert_array_equal(matrix_exponential(np.zeros((3, 3))), np.eye(3))


def test_exp_quarter_rotation():
    M = np.array([[0.0, -1.0], [1.0, 0.0]]) * (np.pi / 2)
    np.testing.assert_allclose(matrix_exponential(M), [[0, -1], [1, 0]], atol=1e-15)


def test_exp_diagonal():
    np.testing.assert_allclose(
        matrix_exponential(np.diag([0.3, -0.3])), np.diag([np.exp(0.3), np.exp(-0.3)]), rtol=1e-15
    )


@pytest.mark.parametrize("n", [2, 4, 6, 8])
def test_exp_relative_accuracy_norm_ten(rng, n):
    for _ in range(10):
        A = rng.normal(size=(n, n))
        A *= 10.0 / np.linalg.norm(A, 2)
        ref = expm(A)
        err = np.linalg.norm(matrix_exponential(A) - ref) / np.linalg.norm(ref)
        assert err < 1e-12


def test_exp_inverse_pair(rng):
    for n in (2, 4, 6):
        for _ in range(10):
            A = rng.normal(size=(n, n))
            A *= rng.uniform(0, 5) / np.linalg.norm(A, 2)
            prod = matrix_exponential(A) @ matrix_exponential(-A)
            assert np.max(np.abs(prod - np.eye(n))) < 1e-11


# symplectic form, defect, resymplectify --------------------------------------


@pytest.mark.parametrize("n", [1, 2, 4])
def test_form_identities(n):
    J = symplectic_form(n)
    np.testing.assert_array_equal(J @ J, -np.eye(2 * n))
    np.testing.assert_array_equal(J.T, -J)
    assert np.linalg.det(J) == pytest.approx(1.0)
    assert symplectic_defect(J) == 0.0


def test_defect_identity_and_scaling():
    assert symplectic_defect(np.eye(4)) == 0.0
    # L J L^T = 2 J
    assert symplectic_defect(np.diag([2.0, 1.0])) == pytest.approx(1.0)


def test_defect_odd_dimension():
    with pytest.raises(ArgumentError):
        symplectic_defect(np.eye(3))


def test_resymplectify_fixed_point(rng):
    for n in (1, 2, 3):
        S = random_symplectic_matrix(rng, n)
        assert np.max(np.abs(resymplectify(S) - S)) < 1e-14 * max(1.0, np.max(np.abs(S)))


def test_resymplectify_reduces_defect(rng):
    for n in (1, 2, 3):
        for _ in range(20):
            S = random_symplectic_matrix(rng, n)
            E = rng.normal(size=S.shape)
            E *= 1e-4 / np.linalg.norm(E, 2)
            L = S + E
            before = symplectic_defect(L)
            after = symplectic_defect(resymplectify(L))
            assert after <= before / 10


def test_resymplectify_small_symmetric_perturbation(rng):
    for n in (1, 2, 3):
        E = rng.normal(size=(2 * n, 2 * n))
        L = np.eye(2 * n) + 1e-6 * (E + E.T)
        assert symplectic_defect(resymplectify(L)) < 1e-9


@settings(max_examples=50, deadline=None)
@given(arrays(np.float64, (4, 4), elements=finite), st.floats(1e-6, 0.05))
def test_resymplectify_never_increases_defect(E, amp):
    S = expm(symplectic_form(2) @ (0.25 * (E + E.T)))
    L = S + amp * E
    if symplectic_defect(L) >= 0.5:
        return
    assert symplectic_defect(resymplectify(L)) <= symplectic_defect(L) + 1e-15


def test_resymplectify_singular():
    with pytest.raises(SingularityError):
        resymplectify(np.zeros((2, 2)))


# positive definiteness -------------------------------------------------------


def test_positive_definite_cases():
    assert check_positive_definite(np.eye(2) / 2)
    assert not check_positive_definite(np.diag([0.5, -0.5]))


def test_positive_definite_asymmetric():
    with pytest.raises(ArgumentError):
        check_positive_definite(np.array([[1.0, 0.1], [0.0, 1.0]]))
