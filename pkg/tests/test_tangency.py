import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, seed, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from resonance_lab.errors import NotSimple
from resonance_lab.tangency import (
    lax_flow, lax_tangency_check, reparametrize, resonant_curve, restart_difference,
    tangency_order, verify_tangency_theorems,
)
from resonance_lab.utils import norm

from conftest import OFFDIAG, random_hermitian


def test_rank_one_curve(rank_one):
    curve = resonant_curve(rank_one.z0, rank_one.n0, rank_one.w)
    # s(v) = −v
    assert_allclose(curve.taylor_s, [0.0, -1.0, 0.0], atol=1e-10)
    assert curve.residual < 1e-9

    report = tangency_order(curve)
    assert report.tangency_order == 1
    assert report.standard_flag


def test_branching_curve(branching):
    curve = resonant_curve(branching.z0, branching.n0, branching.w)
    # s(v) = −v²/2
    assert_allclose(curve.taylor_s, [0.0, 0.0, -0.5, 0.0], atol=1e-10)
    assert curve.s_at(0.1) == pytest.approx(-0.005, abs=1e-10)
    assert tangency_order(curve).tangency_order == 2


def test_depth_two_curve(depth_two):
    curve = resonant_curve(depth_two.z0, depth_two.n0, depth_two.w)
    # s(v) = 2v³/(1 + v²)
    assert_allclose(curve.taylor_s[:4], [0.0, 0.0, 0.0, 2.0], atol=1e-8)
    assert tangency_order(curve).tangency_order == 3


def test_zero_direction_curve(rank_one):
    curve = resonant_curve(rank_one.z0, rank_one.n0, np.zeros((2, 2)), v_grid=np.linspace(0, 1, 5))
    assert_allclose(curve.grid_s, np.zeros(5))
    assert tangency_order(curve).tangency_order == 0


def test_curve_on_grid(branching):
    grid = np.linspace(-0.2, 0.2, 9)
    curve = resonant_curve(branching.z0, branching.n0, branching.w, v_grid=grid)
    assert_allclose(curve.grid_s, -grid ** 2 / 2, atol=1e-9)
    assert len(curve.samples) == 9


def test_curve_is_unique(branching):
    curve = resonant_curve(branching.z0, branching.n0, branching.w)
    assert restart_difference(curve) < 1e-9


def test_reparametrization_keeps_order(branching):
    curve = resonant_curve(branching.z0, branching.n0, branching.w)
    moved = reparametrize(curve, 2.0, 0.3)

    report = tangency_order(moved)
    assert report.tangency_order == 2
    assert not report.standard_flag
    assert moved.taylor_s[2] == pytest.approx(-2.0, abs=1e-9)


def test_reparametrization_needs_linear_term(branching):
    curve = resonant_curve(branching.z0, branching.n0, branching.w)
    with pytest.raises(ValueError):
        reparametrize(curve, 0.0)


def test_simple_eigenvalue_required():
    with pytest.raises(NotSimple):
        resonant_curve(1.0, np.diag([1.0, 1.0, 3.0]), np.eye(3))


@pytest.mark.parametrize('fixture, order', [('rank_one', 1), ('branching', 2), ('depth_two', 3)])
def test_tangency_theorems(request, fixture, order):
    triple = request.getfixturevalue(fixture)
    report = verify_tangency_theorems(triple.z0, triple.n0, triple.w)
    assert report.tangency_order == order
    assert report.depth == order - 1
    assert report.path_order == order
    assert report.passed, report


def test_lax_commutator_pairing(branching):
    report = lax_tangency_check(branching.n0, branching.w)
    assert branching.n0 @ OFFDIAG - OFFDIAG @ branching.n0 == pytest.approx(np.array([[0, 2], [-2, 0]]))
    assert report.pairing_residual < 1e-12
    assert report.drift < 1e-10
    assert report.passed


def test_lax_flow_matches_conjugation(branching):
    flowed = lax_flow(branching.n0, branching.w, 0.5, 200)
    assert_allclose(np.sort(np.linalg.eigvals(flowed).real), [-1.0, 1.0], atol=1e-9)


@pytest.mark.parametrize('steps', [1, 200])
def test_lax_flow_adapts_its_steps(branching, steps):
    exact = scipy.linalg.expm(-0.5 * branching.w) @ branching.n0 @ scipy.linalg.expm(0.5 * branching.w)
    assert_allclose(lax_flow(branching.n0, branching.w, 0.5, steps), exact, atol=1e-10)


def test_lax_check_needs_simple_spectrum():
    with pytest.raises(NotSimple):
        lax_tangency_check(np.diag([1.0, 1.0, 3.0]), np.ones((3, 3)))


@seed(20261018)
@settings(max_examples=10, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1), st.integers(min_value=2, max_value=5))
def test_lax_flow_is_isospectral(instance_seed, n):
    rng = np.random.default_rng(instance_seed)
    n0 = random_hermitian(rng, n)
    w = random_hermitian(rng, n)
    w /= norm(w)

    report = lax_tangency_check(n0, w)
    assert report.pairing_residual < 1e-8
    assert report.drift < 1e-8
    assert report.oracle_residual < 1e-8
