"""Canonical homogeneous norm, straightening map, and pulled-back algebra."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from homquant import (
    DiscreteDilation,
    FundamentalDomain,
    HomNormConfig,
    NegativeInputError,
    ZeroVectorError,
    distance_bound_alpha1,
    distance_bound_alpha2,
    hom_inner,
    hom_norm,
    hom_norm_many,
    hom_project,
    make_dilation,
    matrix_tilde_apply,
    phi,
    phi_inv,
    phi_many,
    projection_index,
    tilde_add,
    tilde_scale,
)

from conftest import GENERATORS

coords = st.floats(min_value=-50.0, max_value=50.0, allow_nan=False)


def vectors(dim):
    return st.lists(coords, min_size=dim, max_size=dim).map(np.array).filter(
        lambda v: np.linalg.norm(v) > 1e-3)


# ------------------------------------------------------------------- hom norm

@pytest.mark.parametrize("label", sorted(GENERATORS))
@settings(max_examples=150, deadline=None)
@given(data=st.data())
def test_defining_equation(label, data):
    """|exp(-ln(r) G) x|_P = 1 with r the homogeneous norm."""
    d = make_dilation(GENERATORS[label])
    x = data.draw(vectors(d.dim))
    r = hom_norm(d, x)
    assert abs(d.weighted_norm(d.apply(-math.log(r), x)) - 1.0) <= 1e-12


@pytest.mark.parametrize("label", sorted(GENERATORS))
@settings(max_examples=150, deadline=None)
@given(s=st.floats(min_value=-3.0, max_value=3.0), data=st.data())
def test_norm_homogeneity(label, s, data):
    d = make_dilation(GENERATORS[label])
    x = data.draw(vectors(d.dim))
    r = hom_norm(d, x)
    assert hom_norm(d, d.apply(s, x)) == pytest.approx(math.exp(s) * r, rel=1e-7)


def test_analytic_values(diag321):
    # weight-3 axis: e^(3s) * 1 = 8  =>  r = e^s = 2
    assert hom_norm(diag321, [8.0, 0.0, 0.0]) == pytest.approx(2.0, rel=1e-12)
    # weight-2 axis: e^(2s) * 1 = 9  =>  r = 3
    assert hom_norm(diag321, [0.0, 9.0, 0.0]) == pytest.approx(3.0, rel=1e-12)
    # weight-1 axis coincides with the Euclidean norm
    assert hom_norm(diag321, [0.0, 0.0, 5.0]) == pytest.approx(5.0, rel=1e-12)


def test_identity_dilation_reduces_to_euclidean(rng):
    d = make_dilation(np.eye(2))
    for _ in range(25):
        x = rng.standard_normal(2) * 10.0
        assert hom_norm(d, x) == pytest.approx(np.linalg.norm(x), rel=1e-12)


def test_unit_sphere_agreement(any_dilation, rng):
    """On the weighted unit sphere every homogeneous norm equals one."""
    for _ in range(25):
        x = rng.standard_normal(any_dilation.dim)
        x = x / any_dilation.weighted_norm(x)
        assert hom_norm(any_dilation, x) == pytest.approx(1.0, abs=1e-12)


def test_zero_maps_to_zero(diag321):
    assert hom_norm(diag321, np.zeros(3)) == 0.0
    assert np.array_equal(phi(diag321, np.zeros(3)), np.zeros(3))
    assert np.array_equal(phi_inv(diag321, np.zeros(3)), np.zeros(3))


def test_extreme_radii(diag321):
    u = np.array([1.0, 1.0, 1.0]) / math.sqrt(3.0)
    for s in (-30.0, -5.0, 5.0, 30.0):
        x = diag321.apply(s, u)
        assert hom_norm(diag321, x) == pytest.approx(math.exp(s), rel=1e-9)


def test_hom_norm_many_matches_scalar(any_dilation, rng):
    xs = rng.standard_normal((60, any_dilation.dim)) * 5.0
    xs[7] = 0.0  # exercise the zero row
    many = hom_norm_many(any_dilation, xs)
    for row, r in zip(xs, many):
        assert r == pytest.approx(hom_norm(any_dilation, row), rel=1e-11, abs=1e-13)


def test_max_iter_budget_respected(diag321):
    cfg = HomNormConfig(rel_tol=1e-12, max_iter=1)
    from homquant.errors import NoConvergenceError
    with pytest.raises(NoConvergenceError):
        hom_norm(diag321, [3.0, -2.0, 1.0], cfg)


def test_config_validation():
    with pytest.raises(ValueError):
        HomNormConfig(rel_tol=0.0)
    with pytest.raises(ValueError):
        HomNormConfig(max_iter=0)
    with pytest.raises(ValueError):
        HomNormConfig(zero_threshold=-1.0)


# ----------------------------------------------------------------- projection

def test_projection_is_unit_and_scale_invariant(any_dilation, rng):
    for _ in range(25):
        x = rng.standard_normal(any_dilation.dim) * 3.0
        y = hom_project(any_dilation, x)
        assert any_dilation.weighted_norm(y) == pytest.approx(1.0, abs=1e-12)
        scaled = any_dilation.apply(1.3, x)
        assert np.allclose(hom_project(any_dilation, scaled), y, atol=1e-9)


def test_projection_rejects_origin(diag321):
    with pytest.raises(ZeroVectorError):
        hom_project(diag321, np.zeros(3))


# ----------------------------------------------------------- straightening map

def test_phi_preserves_norm(any_dilation, rng):
    for _ in range(25):
        x = rng.standard_normal(any_dilation.dim) * 4.0
        z = phi(any_dilation, x)
        assert any_dilation.weighted_norm(z) == pytest.approx(
            hom_norm(any_dilation, x), rel=1e-11)


def test_phi_roundtrip(any_dilation, rng):
    for _ in range(25):
        x = rng.standard_normal(any_dilation.dim) * 4.0
        back = phi_inv(any_dilation, phi(any_dilation, x))
        assert np.allclose(back, x, rtol=1e-9, atol=1e-12)


def test_phi_many_matches_scalar(diag321, rng):
    xs = rng.standard_normal((40, 3)) * 2.0
    xs[3] = 0.0
    many = phi_many(diag321, xs)
    for row, z in zip(xs, many):
        assert np.allclose(z, phi(diag321, row), rtol=1e-10, atol=1e-13)


def test_phi_example(diag321):
    # (8, 0, 0) has homogeneous norm 2 and projects to the first basis vector.
    z = phi(diag321, [8.0, 0.0, 0.0])
    assert np.allclose(z, [2.0, 0.0, 0.0], atol=1e-12)


# ------------------------------------------------------------ pulled-back ops

def test_tilde_add_is_addition_in_phi_coordinates(any_dilation, rng):
    for _ in range(15):
        x = rng.standard_normal(any_dilation.dim)
        y = rng.standard_normal(any_dilation.dim)
        lhs = phi(any_dilation, tilde_add(any_dilation, x, y))
        rhs = phi(any_dilation, x) + phi(any_dilation, y)
        assert np.allclose(lhs, rhs, rtol=1e-8, atol=1e-10)


def test_tilde_add_commutes_and_has_identity(diag321, rng):
    x = rng.standard_normal(3)
    y = rng.standard_normal(3)
    assert np.allclose(tilde_add(diag321, x, y), tilde_add(diag321, y, x), atol=1e-10)
    assert np.allclose(tilde_add(diag321, x, np.zeros(3)), x, rtol=1e-10, atol=1e-12)


def test_tilde_scale(diag321):
    x = np.array([8.0, 0.0, 0.0])
    # e^(3 ln 2) * 8 = 64 on the weight-3 axis
    assert np.allclose(tilde_scale(diag321, 2.0, x), [64.0, 0.0, 0.0], rtol=1e-12)
    assert np.allclose(tilde_scale(diag321, -2.0, x), [-64.0, 0.0, 0.0], rtol=1e-12)
    assert np.array_equal(tilde_scale(diag321, 0.0, x), np.zeros(3))


def test_tilde_scale_inverse_element(any_dilation, rng):
    x = rng.standard_normal(any_dilation.dim)
    neg = tilde_scale(any_dilation, -1.0, x)
    total = tilde_add(any_dilation, x, neg)
    assert np.linalg.norm(total) <= 1e-9 * max(1.0, np.linalg.norm(x))


def test_tilde_scale_matches_phi_scaling(any_dilation, rng):
    for lam in (0.3, -1.7, 4.2):
        x = rng.standard_normal(any_dilation.dim)
        lhs = phi(any_dilation, tilde_scale(any_dilation, lam, x))
        rhs = lam * phi(any_dilation, x)
        assert np.allclose(lhs, rhs, rtol=1e-9, atol=1e-11)


def test_hom_inner(any_dilation, rng):
    x = rng.standard_normal(any_dilation.dim)
    y = rng.standard_normal(any_dilation.dim)
    assert hom_inner(any_dilation, x, y) == pytest.approx(
        hom_inner(any_dilation, y, x), rel=1e-12)
    assert hom_inner(any_dilation, x, x) == pytest.approx(
        hom_norm(any_dilation, x) ** 2, rel=1e-10)


def test_matrix_tilde_apply(diag321, rng):
    h = rng.standard_normal((3, 3))
    x = rng.standard_normal(3)
    lhs = phi(diag321, matrix_tilde_apply(diag321, h, x))
    rhs = h @ phi(diag321, x)
    assert np.allclose(lhs, rhs, rtol=1e-9, atol=1e-11)


# ----------------------------------------------------------- fundamental domain

@settings(max_examples=300, deadline=None)
@given(
    r=st.floats(min_value=1e-6, max_value=1e6),
    a=st.floats(min_value=0.05, max_value=2.5),
    rho=st.floats(min_value=0.25, max_value=4.0),
)
def test_projection_index_membership(r, a, rho):
    d = make_dilation(np.diag([3.0, 2.0, 1.0]))
    fd = FundamentalDomain(DiscreteDilation(d, a), rho=rho)
    x = d.apply(math.log(r), np.array([0.0, 0.0, 1.0]))
    k = projection_index(fd, x)
    folded = hom_norm(d, x) * math.exp(-k * a)
    # A draw landing exactly on a cell edge may fold onto the boundary float,
    # so the half-open bracket is only required up to a sliver of roundoff.
    assert rho * (1.0 - 1e-13) <= folded < rho * math.exp(a) * (1.0 + 1e-13)


def test_projection_index_interior_cell(diag321):
    fd = FundamentalDomain(DiscreteDilation(diag321, math.log(2.0)), rho=1.0)
    # homogeneous norm 4 * e^0.1 sits strictly inside cell k = 2.
    u = np.array([0.3, -0.8, 0.52])
    u /= np.linalg.norm(u)
    x = diag321.apply(math.log(4.0) + 0.1, u)
    assert projection_index(fd, x) == 2


def test_projection_index_near_cell_edge(diag321):
    """A point whose radius lands on a cell edge folds into one of the two
    adjacent cells, and the membership inequality still holds exactly."""
    a = math.log(2.0)
    fd = FundamentalDomain(DiscreteDilation(diag321, a), rho=1.0)
    x = np.array([64.0, 0.0, 0.0])  # homogeneous norm 4 up to solver roundoff
    k = projection_index(fd, x)
    assert k in (1, 2)
    folded = hom_norm(diag321, x) * math.exp(-k * a)
    assert 1.0 <= folded < math.exp(a)


def test_projection_index_rejects_origin(diag321):
    fd = FundamentalDomain(DiscreteDilation(diag321, 1.0))
    with pytest.raises(ZeroVectorError):
        projection_index(fd, np.zeros(3))


def test_fundamental_domain_validation(diag321):
    with pytest.raises(ValueError):
        FundamentalDomain(DiscreteDilation(diag321, 1.0), rho=0.0)


# ------------------------------------------------------------- distance bounds

def test_alpha1_shape(diag321):
    assert distance_bound_alpha1(diag321, 0.0) == 0.0
    grid = np.linspace(0.0, 3.0, 40)
    vals = [distance_bound_alpha1(diag321, t) for t in grid]
    assert all(b >= a - 1e-15 for a, b in zip(vals, vals[1:]))
    assert all(v > 0 for v in vals[1:])
    with pytest.raises(NegativeInputError):
        distance_bound_alpha1(diag321, -0.1)


def test_alpha1_dominates_sampled_distances(diag321, rng):
    """The bound must cover the actual homogeneous distance growth."""
    for _ in range(200):
        x = rng.standard_normal(3) * 2.0
        y = rng.standard_normal(3) * 2.0
        px, py = phi(diag321, x), phi(diag321, y)
        denom = diag321.weighted_norm(px)
        theta = diag321.weighted_norm(py - px) / denom
        gap = tilde_add(diag321, y, tilde_scale(diag321, -1.0, x))
        bound = distance_bound_alpha1(diag321, theta) * (1.0 + 1e-9)
        assert (hom_norm(diag321, gap) / hom_norm(diag321, x)) ** 2 <= bound
        # the bound also covers the plain coordinate difference
        assert (hom_norm(diag321, y - x) / hom_norm(diag321, x)) ** 2 <= bound


def test_alpha2_is_nonpositive_diagnostic(diag321):
    for t in (0.0, 0.1, 1.0, 5.0):
        assert distance_bound_alpha2(diag321, t) <= 0.0
    with pytest.raises(NegativeInputError):
        distance_bound_alpha2(diag321, -1.0)
