import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from mmllab.errors import NumericalGuardError
from mmllab.lattice import GridSpec, sample
from mmllab.sobolev import (SobolevOrder, bracket, bracket_constant, bracket_integral, condition_A,
                            dyadic_piece, linf_dyadic_bound, product_sobolev_norm, sample_on_frame)
from mmllab.symbols import ball_bump, constant, make_sharpness_psi, mikhlin_symbol

G1 = GridSpec(1, 256, 16.0)
TOL = 1e-30  # Gaussians are not compactly supported


def gauss(xi):
    return np.exp(-np.pi * np.sum(xi**2, -1))


def test_bracket():
    assert bracket(0.0) == 1.0
    assert bracket(np.array([3.0, 4.0])) == pytest.approx(math.sqrt(26))


def test_order_validation():
    with pytest.raises(ValueError):
        SobolevOrder((-1.0,))
    assert SobolevOrder((1, 0.6)).supercritical(1)
    assert not SobolevOrder((1, 0.5)).supercritical(1)


def test_gaussian_l2_norm():
    assert product_sobolev_norm(sample(gauss, G1), SobolevOrder((0,)), edge_tol=TOL) == pytest.approx(2**-0.25, abs=1e-12)


def test_gaussian_weighted_norm_closed_form():
    # int e^{-2 pi y^2} (1 + y^2) dy = 2^{-1/2} (1 + 1/(4 pi))
    exact = math.sqrt(2**-0.5 * (1 + 1 / (4 * math.pi)))
    assert product_sobolev_norm(sample(gauss, G1), SobolevOrder((1,)), edge_tol=TOL) == pytest.approx(exact, rel=1e-12)


def test_product_weight_factorizes():
    g2 = GridSpec(2, 128, 12.0)
    v = product_sobolev_norm(sample(gauss, g2), SobolevOrder((1, 2)), n=1, edge_tol=TOL)
    one = lambda s: sum(2**-0.5 * c for c in [1, s / (4 * math.pi), 3 * s * (s - 1) / (2 * (4 * math.pi) ** 2)][: s + 1])
    assert v == pytest.approx(math.sqrt(one(1) * one(2)), rel=1e-10)


@given(st.floats(-3, 3), st.floats(0.3, 1.5))
def test_frame_norm_is_translation_invariant_and_matches_box(c, scale):
    order = SobolevOrder((1.5,))
    frame_a = (np.array([0.0]), np.array([[scale * 4]]))
    frame_b = (np.array([c]), np.array([[scale * 4]]))
    f = lambda xi: np.exp(-np.pi * ((xi[..., 0] - 0) / scale) ** 2)
    g = lambda xi: np.exp(-np.pi * ((xi[..., 0] - c) / scale) ** 2)
    a = product_sobolev_norm(sample_on_frame(f, frame_a, 256), order, frame=frame_a, edge_tol=TOL)
    b = product_sobolev_norm(sample_on_frame(g, frame_b, 256), order, frame=frame_b, edge_tol=TOL)
    assert a == pytest.approx(b, rel=1e-10)
    box = GridSpec(1, 256, 16 * scale)
    assert product_sobolev_norm(sample(f, box), order, edge_tol=TOL) == pytest.approx(a, rel=1e-8)


def test_edge_guard():
    with pytest.raises(NumericalGuardError):
        product_sobolev_norm(sample(lambda xi: np.ones(xi.shape[:-1]), G1), SobolevOrder((0,)))
    with pytest.raises(ValueError):
        product_sobolev_norm(sample(gauss, G1), SobolevOrder((1, 1)))


def test_condition_A_frozen_values():
    s = SobolevOrder((1, 1))
    assert condition_A(mikhlin_symbol(2, 1), s).A == pytest.approx(0.8362794814657463, rel=1e-12)
    assert condition_A(constant(2, 1), s).A == pytest.approx(2.2684988082544586, rel=1e-12)


def test_dilation_invariance_of_homogeneous_symbol():
    r = condition_A(mikhlin_symbol(2, 1), SobolevOrder((1, 1)), (-3, 3))
    vals = [v for _, v in r.per_j]
    np.testing.assert_allclose(vals, vals[0], rtol=1e-12)
    lines = r.to_csv().splitlines()
    assert lines[0] == "j,norm" and len(lines) == 8


def test_radially_disjoint_pieces_are_exact_zeros():
    sigma = ball_bump(0.1, 0.2, 2, 1)
    piece = dyadic_piece(sigma, 0, make_sharpness_psi(2))
    assert piece.zero and np.all(piece.values.samples == 0)


def test_bracket_integral_and_constant():
    assert bracket_integral(1, 1) == pytest.approx(math.pi, rel=1e-12)
    assert bracket_integral(2, 3) == pytest.approx(math.pi**2, rel=1e-10)
    with pytest.raises(ValueError):
        bracket_integral(0.5, 1)
    assert bracket_constant(SobolevOrder((1, 1)), 1) == pytest.approx(math.pi, rel=1e-12)


def test_linf_bound_holds_for_mikhlin():
    rng = np.random.default_rng(1)
    b = linf_dyadic_bound(mikhlin_symbol(2, 1), SobolevOrder((1, 1)), rng.normal(size=(500, 2)), (-2, 2))
    assert b.holds
    with pytest.raises(ValueError):
        linf_dyadic_bound(mikhlin_symbol(2, 1), SobolevOrder((0.5, 1)), np.zeros((1, 2)))
