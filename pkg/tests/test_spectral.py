import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from caginalp_galerkin import spectral as sp
from oracles import cos_mode, project

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


def unit_interval(n, **kw):
    return sp.build_basis(sp.BoxDomain((1.0,)), n, **kw)


# --- build_basis -----------------------------------------------------------


def test_unit_interval_eigenpairs():
    b = unit_interval(2)
    np.testing.assert_allclose(b.eigenvalues, [0.0, math.pi**2, 4 * math.pi**2], rtol=1e-15)
    x = b.nodes[:, 0]
    np.testing.assert_allclose(b.values[1], math.sqrt(2) * np.cos(math.pi * x), atol=1e-15)


def test_pi_interval_first_eigenvalue_and_constant_mode():
    b = sp.build_basis(sp.BoxDomain((math.pi,)), 1)
    assert b.eigenvalues[1] == pytest.approx(1.0, rel=1e-15)
    np.testing.assert_allclose(b.values[0], math.pi**-0.5, rtol=1e-15)


def test_unit_square_tensor_eigenvalues():
    b = sp.build_basis(sp.BoxDomain((1.0, 1.0)), 1)
    np.testing.assert_allclose(b.eigenvalues, [0, math.pi**2, math.pi**2, 2 * math.pi**2], rtol=1e-15)
    # ties broken lexicographically
    assert [tuple(m) for m in b.modes] == [(0, 0), (0, 1), (1, 0), (1, 1)]


def test_rectangle_ordering_is_by_eigenvalue():
    b = sp.build_basis(sp.BoxDomain((2.0, 1.0)), 3)
    assert np.all(np.diff(b.eigenvalues) >= 0)
    assert b.size == 16
    assert b.eigenvalues[0] == 0.0


@pytest.mark.parametrize("lengths", [(0.0,), (-1.0,), (1.0, 0.0)])
def test_nonpositive_length_rejected(lengths):
    with pytest.raises(ValueError):
        sp.BoxDomain(lengths)


def test_three_dimensional_box_rejected():
    with pytest.raises(ValueError):
        sp.BoxDomain((1.0, 1.0, 1.0))


def test_quadrature_floor_enforced():
    with pytest.raises(ValueError):
        unit_interval(4, Q=9)
    unit_interval(4, Q=10)


def test_negative_cutoff_rejected():
    with pytest.raises(ValueError):
        unit_interval(-1)


@pytest.mark.parametrize(
    "n, lengths",
    [(n, L) for n in (0, 1, 4, 16, 32) for L in ((1.0,), (2.5,))] + [(n, (1.0, 1.5)) for n in (0, 1, 4, 16)],
)
def test_gram_and_stiffness_at_quadrature_floor(n, lengths):
    b = sp.build_basis(sp.BoxDomain(lengths), n, Q=2 * (n + 1))
    G = sp.gram_matrix(b)
    K = sp.stiffness_matrix(b)
    assert np.abs(G - np.eye(b.size)).max() < 1e-12
    assert np.abs(K - np.diag(b.eigenvalues)).max() < 1e-10 * max(1.0, b.eigenvalues.max())


def test_gauss_legendre_rule_is_available_and_converges():
    b = unit_interval(4, rule="gauss-legendre", Q=40)
    assert np.abs(sp.gram_matrix(b) - np.eye(b.size)).max() < 1e-12


# --- analyze / synthesize --------------------------------------------------


def test_analyze_single_mode():
    b = unit_interval(6)
    c = sp.analyze(b, b.values[1])
    np.testing.assert_allclose(c, b.unit_mode(1), atol=1e-14)


def test_analyze_constant_on_unit_interval():
    b = unit_interval(6)
    c = sp.analyze(b, np.full(b.nodes.shape[0], 3.5))
    assert c[0] == pytest.approx(3.5, abs=1e-14)
    assert np.abs(c[1:]).max() < 1e-14


def test_analyze_product_matches_adaptive_quadrature():
    b = unit_interval(8)
    e1, _ = cos_mode(1.0, 1)
    e2, _ = cos_mode(1.0, 2)
    c = sp.analyze(b, b.values[1] * b.values[2])
    ref = [project(1.0, lambda x: e1(x) * e2(x), j) for j in range(b.size)]
    np.testing.assert_allclose(c, ref, atol=1e-10)


def test_analyze_rejects_non_finite_sample():
    b = unit_interval(2)
    v = np.zeros(b.nodes.shape[0])
    v[3] = np.nan
    with pytest.raises(ValueError):
        sp.analyze(b, v)


def test_synthesize_unit_mode_and_zero():
    b = unit_interval(5)
    x = b.nodes[:, 0]
    np.testing.assert_allclose(sp.synthesize(b, b.unit_mode(1)), math.sqrt(2) * np.cos(math.pi * x), atol=1e-15)
    assert not np.any(sp.synthesize(b, np.zeros(b.size)))


def test_synthesize_length_mismatch():
    b = unit_interval(5)
    with pytest.raises(ValueError):
        sp.synthesize(b, np.zeros(b.size + 1))


@settings(max_examples=50, deadline=None)
@given(arrays(np.float64, 9, elements=finite))
def test_round_trip_1d(c):
    b = unit_interval(8)
    np.testing.assert_allclose(sp.analyze(b, sp.synthesize(b, c)), c, atol=1e-12 * max(1.0, np.abs(c).max()))


@settings(max_examples=25, deadline=None)
@given(arrays(np.float64, 16, elements=finite))
def test_round_trip_2d(c):
    b = sp.build_basis(sp.BoxDomain((1.0, 2.0)), 3)
    np.testing.assert_allclose(sp.analyze(b, sp.synthesize(b, c)), c, atol=1e-12 * max(1.0, np.abs(c).max()))


# --- project_pn / restrict -------------------------------------------------


def test_project_kills_higher_mode():
    b = unit_interval(6)
    c = sp.analyze(b, math.sqrt(2) * np.cos(3 * math.pi * b.nodes[:, 0]))
    assert np.abs(sp.project_pn(b, c, 2)).max() < 1e-14


def test_project_full_cutoff_is_identity():
    b = unit_interval(6)
    c = np.arange(7.0)
    np.testing.assert_array_equal(sp.project_pn(b, c, 6), c)


def test_project_negative_cutoff():
    with pytest.raises(ValueError):
        sp.project_pn(unit_interval(3), np.zeros(4), -1)


@settings(max_examples=100, deadline=None)
@given(arrays(np.float64, 16, elements=finite), st.integers(0, 3))
def test_project_idempotent_and_nonexpansive(c, m):
    b = sp.build_basis(sp.BoxDomain((1.0, 1.0)), 3)
    p = sp.project_pn(b, c, m)
    np.testing.assert_array_equal(sp.project_pn(b, p, m), p)
    assert sp.h_norm(p) <= sp.h_norm(c) + 1e-15


def test_restrict_matches_projection_layout():
    fine = sp.build_basis(sp.BoxDomain((1.0, 1.0)), 4)
    coarse = sp.build_basis(sp.BoxDomain((1.0, 1.0)), 2)
    c = np.random.default_rng(3).normal(size=fine.size)
    r = sp.restrict(fine, c, coarse)
    p = sp.project_pn(fine, c, 2)
    assert sp.h_norm(r) == pytest.approx(sp.h_norm(p), rel=1e-15)
    for j, m in enumerate(coarse.modes):
        assert r[j] == c[fine.mode_index[tuple(m)]]


def test_restrict_refuses_finer_target():
    with pytest.raises(ValueError):
        sp.restrict(unit_interval(2), np.zeros(3), unit_interval(4))


# --- mean value and 𝒩 ------------------------------------------------------


def test_mean_value_examples():
    b = unit_interval(4)
    assert sp.mean_value(b, np.array([2.0, 0, 0, 0, 0])) == 2.0
    assert sp.mean_value(b, b.unit_mode(1)) == 0.0


@settings(max_examples=50, deadline=None)
@given(arrays(np.float64, 12, elements=finite))
def test_mean_value_matches_quadrature(c):
    b = sp.build_basis(sp.BoxDomain((2.0, 1.5)), 3)
    c = np.concatenate([c, [0.0] * (b.size - len(c))])
    quad = float(np.dot(b.weights, sp.synthesize(b, c))) / b.domain.volume
    assert sp.mean_value(b, c) == pytest.approx(quad, abs=1e-12 * max(1.0, np.abs(c).max()))


def test_inverse_laplacian_examples():
    b = unit_interval(4)
    np.testing.assert_allclose(sp.inverse_neumann_laplacian(b, b.unit_mode(1)), b.unit_mode(1) / math.pi**2)
    two = b.unit_mode(1) + b.unit_mode(2)
    expected = b.unit_mode(1) / math.pi**2 + b.unit_mode(2) / (4 * math.pi**2)
    np.testing.assert_allclose(sp.inverse_neumann_laplacian(b, two), expected, rtol=1e-15)


def test_inverse_laplacian_rejects_constant():
    b = unit_interval(4)
    with pytest.raises(ValueError):
        sp.inverse_neumann_laplacian(b, b.unit_mode(0))


def test_inverse_laplacian_tolerance_is_relative():
    b = unit_interval(4)
    c = 1e8 * b.unit_mode(2)
    c[0] = 1e-3  # 1e-11 relative to the field
    sp.inverse_neumann_laplacian(b, c)


@settings(max_examples=50, deadline=None)
@given(arrays(np.float64, 15, elements=finite))
def test_inverse_is_two_sided_on_zero_mean(c):
    b = sp.build_basis(sp.BoxDomain((1.0, 3.0)), 3)
    c = np.concatenate([[0.0], c])
    np.testing.assert_allclose(sp.laplacian(b, sp.inverse_neumann_laplacian(b, c)), c, atol=1e-12 * max(1, np.abs(c).max()))
    np.testing.assert_allclose(sp.inverse_neumann_laplacian(b, sp.laplacian(b, c)), c, atol=1e-12 * max(1, np.abs(c).max()))


# --- norms -----------------------------------------------------------------


def test_norms_of_first_mode():
    b = unit_interval(3)
    H, V, W, dual = sp.norms(b, b.unit_mode(1))
    assert H == 1.0
    assert V == pytest.approx(math.pi, rel=1e-15)
    assert W == pytest.approx(math.pi**2, rel=1e-15)
    assert dual == pytest.approx(1 / math.pi, rel=1e-15)


def test_norms_of_zero_field():
    assert sp.norms(unit_interval(3), np.zeros(4)) == (0.0, 0.0, 0.0, 0.0)


def test_seminorms_match_quadrature_of_gradient():
    b = sp.build_basis(sp.BoxDomain((1.0, 2.0)), 4)
    c = np.random.default_rng(0).normal(size=b.size)
    grad = np.einsum("j,ajq->aq", c, b.gradient_values())
    quad = math.sqrt(float(np.dot(b.weights, np.sum(grad**2, axis=0))))
    assert sp.norms(b, c)[1] == pytest.approx(quad, rel=1e-12)


@settings(max_examples=100, deadline=None)
@given(arrays(np.float64, 16, elements=finite))
def test_interpolation_inequality(c):
    b = sp.build_basis(sp.BoxDomain((1.0, 2.0)), 3)
    c = np.concatenate([[0.0], c[1:]])
    grad = sp.norms(b, c)[1]
    grad_n = sp.norms(b, sp.inverse_neumann_laplacian(b, c))[1]
    assert sp.h_norm(c) <= math.sqrt(grad * grad_n) * (1 + 1e-12) + 1e-300
