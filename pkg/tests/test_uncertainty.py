import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fock_oracle import squeezed_vacuum_moments
from quadsym.canonical import random_symplectic, rotation_ct, squeeze_ct
from quadsym.errors import ArgumentError
from quadsym.matcore import characteristic_coefficient, symplectic_form
from quadsym.states import (
    GaussianState,
    apply_ct,
    coherent_state,
    fock_state,
    random_valid_state,
)
from quadsym.uncertainty import (
    analyze,
    block_conditions,
    block_determinant,
    block_robertson_margin,
    characteristic_margins,
    commutator_matrix,
    heisenberg_lambda_form,
    normalized_sigma,
    robertson_margin,
    robertson_matrix_defect,
    robertson_minimality,
    schrodinger_margin,
    symplectic_eigenvalues,
    symplectic_sigma_test,
    williamson,
)


def squeezed_fock(n, rng):
    """Equal-occupation Fock state moved by a random symplectic congruence."""
    return apply_ct(fock_state(n), random_symplectic(len(n), rng))


def test_commutator_matrix():
    np.testing.assert_array_equal(commutator_matrix(1), [[0.0, -0.5], [0.5, 0.0]])
    C = commutator_matrix(3)
    np.testing.assert_array_equal(C, -0.5 * symplectic_form(3))
    assert np.linalg.det(C) == pytest.approx(1 / 64)


@pytest.mark.parametrize("modes", [1, 2, 3, 4])
def test_commutator_coefficients(modes):
    C = commutator_matrix(modes)
    for r in range(1, 2 * modes + 1):
        c = characteristic_coefficient(C, r)
        if r % 2:
            assert c == pytest.approx(0.0, abs=1e-15)
        else:
            k = r // 2
            from math import comb

            assert c == pytest.approx(comb(modes, k) / 4**k, rel=1e-12)


# scalar margins --------------------------------------------------------------


def test_robertson_margin_examples():
    assert robertson_margin(coherent_state(2)) == pytest.approx(0.0, abs=1e-15)
    assert robertson_margin(fock_state([1])) == pytest.approx(2.25 - 0.25)
    assert robertson_margin(np.eye(2)) == pytest.approx(0.75)


def test_schrodinger_margin():
    assert schrodinger_margin(coherent_state(1)) == pytest.approx(0.0, abs=1e-15)
    s = apply_ct(coherent_state(1), np.array([[1.0, 0.7], [0.0, 1.0]]))
    assert s.cov[0, 1] != 0
    assert schrodinger_margin(s) == pytest.approx(0.0, abs=1e-14)
    with pytest.raises(ArgumentError):
        schrodinger_margin(coherent_state(2))


def test_characteristic_margins_coherent_two_modes():
    np.testing.assert_allclose(characteristic_margins(coherent_state(2)), [2.0, 1.0, 0.5, 0.0], atol=1e-14)


def test_characteristic_margins_fock():
    m = characteristic_margins(fock_state([1, 1]))
    assert m[3] == pytest.approx(1.5**4 - 1 / 16)
    assert m[0] == pytest.approx(6.0)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 3), st.integers(0, 2**32 - 1), st.sampled_from(["pure", "mixed"]))
def test_characteristic_margins_nonnegative(modes, seed, purity):
    s = random_valid_state(modes, seed, purity)
    m = characteristic_margins(s)
    assert np.all(m >= -1e-9)
    assert m[-1] == pytest.approx(robertson_margin(s), abs=1e-10)


def test_characteristic_coefficients_congruence_invariant_order_2n(rng):
    s = random_valid_state(2, rng, "mixed")
    L = random_symplectic(2, rng)
    out = apply_ct(s, L)
    assert characteristic_coefficient(out.cov, 4) == pytest.approx(characteristic_coefficient(s.cov, 4), rel=1e-10)


# Williamson ------------------------------------------------------------------


def test_williamson_squeezed_diagonal():
    s = apply_ct(coherent_state(1), squeeze_ct([0.7]))
    w = williamson(s)
    np.testing.assert_allclose(w.nu, [0.5], rtol=1e-12)
    assert w.residual(s) < 1e-12
    assert w.S.defect < 1e-12


@pytest.mark.parametrize("n", [[0], [3], [1, 2], [2, 2], [0, 1, 4]])
def test_williamson_fock(n):
    w = williamson(fock_state(n))
    np.testing.assert_allclose(w.nu, np.sort(0.5 + np.array(n, float)), rtol=1e-12)


def test_williamson_degenerate_random_congruence(rng):
    for _ in range(20):
        s = squeezed_fock([2, 2, 2], rng)
        w = williamson(s)
        np.testing.assert_allclose(w.nu, 2.5, rtol=1e-9)
        assert w.residual(s) < 1e-8
        assert w.S.defect < 1e-8


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 3), st.integers(0, 2**32 - 1))
def test_williamson_roundtrip(modes, seed):
    rng = np.random.default_rng(seed)
    nu = np.sort(0.5 + rng.exponential(1.0, modes))
    S = random_symplectic(modes, rng).matrix
    sigma = S @ np.diag(np.concatenate([nu, nu])) @ S.T
    w = williamson(sigma)
    np.testing.assert_allclose(w.nu, nu, rtol=1e-8)
    assert w.residual(sigma) < 1e-8 * max(1.0, np.max(np.abs(sigma)))


def test_williamson_rejects_indefinite():
    with pytest.raises(ArgumentError):
        williamson(np.diag([1.0, -1.0]))


def test_symplectic_eigenvalues_alias():
    np.testing.assert_allclose(symplectic_eigenvalues(np.eye(4)), [1.0, 1.0])


# symplectic sigma ------------------------------------------------------------


def test_normalized_sigma_unit_det(rng):
    s = random_valid_state(3, rng, "mixed")
    assert np.linalg.det(normalized_sigma(s.cov)) == pytest.approx(1.0, rel=1e-10)
    with pytest.raises(ArgumentError):
        normalized_sigma(np.diag([1.0, -1.0]))


def test_sigma_symplectic_for_squeezed_coherent(rng):
    for modes in (1, 2, 3):
        s = random_valid_state(modes, rng, "pure")
        t = symplectic_sigma_test(s)
        assert t.defect < 1e-8
        assert t.products_spread < 1e-8


def test_sigma_symplectic_for_equal_fock(rng):
    s = squeezed_fock([3, 3], rng)
    assert symplectic_sigma_test(s).defect < 1e-8


def test_sigma_not_symplectic_for_unequal_fock(rng):
    assert symplectic_sigma_test(fock_state([0, 1])).defect >= 0.1
    for _ in range(10):
        s = squeezed_fock([0, 1], rng)
        assert symplectic_sigma_test(s).defect > 0.05


def test_mode_products_bounded(rng):
    for _ in range(20):
        s = random_valid_state(2, rng, "mixed")
        assert np.all(symplectic_sigma_test(s).products >= 0.25 - 1e-12)


# block conditions ------------------------------------------------------------


def test_block_conditions_squeezed_coherent(rng):
    for modes in (1, 2, 3):
        s = random_valid_state(modes, rng, "pure")
        first, second = block_conditions(s)
        assert first < 1e-8 and second < 1e-8
        pp, pq, qp, qq = s.blocks()
        np.testing.assert_allclose(pp @ qq - pq @ pq, 0.25 * np.eye(modes), atol=1e-8)


def test_block_conditions_equal_fock(rng):
    s = squeezed_fock([2, 2], rng)
    pp, pq, qp, qq = s.blocks()
    np.testing.assert_allclose(pp @ qq - pq @ pq, 2.5**2 * np.eye(2), atol=1e-8)
    assert block_conditions(s)[1] < 1e-8


def test_block_conditions_fail_for_unequal_fock(rng):
    s = squeezed_fock([0, 2], rng)
    assert max(block_conditions(s)) > 1e-3


def test_block_determinant(rng):
    for modes in (1, 2, 3):
        s = random_valid_state(modes, rng, "mixed")
        assert block_determinant(s) == pytest.approx(np.linalg.det(s.cov), rel=1e-8)
        assert block_robertson_margin(s) == pytest.approx(robertson_margin(s), abs=1e-10)


# Heisenberg quadratic --------------------------------------------------------


def test_heisenberg_coherent():
    h = heisenberg_lambda_form(coherent_state(1), 1)
    assert h.discriminant == pytest.approx(0.0, abs=1e-15)
    assert h.lam_star == pytest.approx(1.0)
    assert h.coefficients == (0.5, -1.0, 0.5)


def test_heisenberg_squeezed_matches_fock_oracle():
    var_p, var_q, _ = squeezed_vacuum_moments(0.5)
    s = apply_ct(coherent_state(1), squeeze_ct([0.5]))
    h = heisenberg_lambda_form(s, 1)
    assert h.lam_star == pytest.approx(1 / (2 * var_q), abs=1e-6)
    assert h.lam_star == pytest.approx(np.exp(-1.0), rel=1e-12)


def test_heisenberg_fock_one():
    h = heisenberg_lambda_form(fock_state([1]), 1)
    assert h.discriminant == pytest.approx(1 - 4 * 2.25)
    assert h.lam_star is None


def test_heisenberg_correlated_pure_is_not_minimal():
    L = rotation_ct([2.0], [1.0], 0.3)
    s = apply_ct(apply_ct(coherent_state(1), squeeze_ct([0.4])), L)
    h = heisenberg_lambda_form(s, 1)
    assert h.discriminant < -1e-6
    assert schrodinger_margin(s) == pytest.approx(0.0, abs=1e-12)


def test_heisenberg_mode_index():
    s = fock_state([0, 3])
    assert heisenberg_lambda_form(s, 2).discriminant == pytest.approx(1 - 4 * 3.5**2)
    for bad in (0, 3, 1.5):
        with pytest.raises(ArgumentError):
            heisenberg_lambda_form(s, bad)


# minimality and report -------------------------------------------------------


def test_minimality(rng):
    assert robertson_minimality(coherent_state(2)).minimal
    assert robertson_minimality(random_valid_state(3, rng, "pure")).minimal
    assert not robertson_minimality(random_valid_state(3, rng, "mixed")).minimal
    assert not robertson_minimality(fock_state([0, 1])).minimal


def test_robertson_matrix_defect_is_report_only():
    # with the unit-determinant commutator part the product comes out as 2J + 2i s
    d = robertson_matrix_defect(coherent_state(1))
    assert d == pytest.approx(2.0)


def test_analyze_keys():
    d = analyze(coherent_state(1)).to_dict()
    assert set(d) == {
        "det_sigma",
        "robertson_margin",
        "char_margins",
        "nu",
        "sympl_defect",
        "block_residuals",
        "minimal",
        "schrodinger_margin",
    }
    assert d["minimal"] is True
    assert set(d["block_residuals"]) == {"o42a", "o42b"}
    assert "schrodinger_margin" not in analyze(coherent_state(2)).to_dict()


def test_analyze_accepts_raw_matrix():
    rep = analyze(np.eye(2))
    assert rep.det_sigma == pytest.approx(1.0)
    assert not rep.is_robertson_minimal
    assert isinstance(coherent_state(1), GaussianState)
