import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, seed, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from resonance_lab.errors import PreconditionViolated, SingularShift
from resonance_lab.operator_space import (
    AffinePoint, MatrixOperator, resolvent, resonance_points_at, spectral_data,
)

from conftest import OFFDIAG, random_hermitian


def test_resolvent_of_diagonal():
    r = resolvent(MatrixOperator.of(np.diag([1.0, 2.0])), 0.0)
    assert_allclose(r.entries, np.diag([1.0, 0.5]), atol=1e-14)


def test_resolvent_of_coupled_pair():
    n = MatrixOperator.of(np.diag([1.0, -1.0]) + 0.5 * OFFDIAG)
    assert_allclose(resolvent(n, 1.0).entries, [[8, 2], [2, 0]], atol=1e-12)


def test_resolvent_at_eigenvalue_raises():
    with pytest.raises(SingularShift):
        resolvent(MatrixOperator.of(np.diag([1.0, 2.0])), 1.0)


@seed(20261018)
@settings(max_examples=20, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1), st.integers(min_value=1, max_value=6))
def test_second_resolvent_identity(instance_seed, n):
    rng = np.random.default_rng(instance_seed)
    h = MatrixOperator.of(random_hermitian(rng, n))
    z, w = 0.3 + 1.1j, -0.7 + 0.4j
    rz = resolvent(h, z).entries
    rw = resolvent(h, w).entries
    assert_allclose(rz - rw, (z - w) * rz @ rw, atol=1e-10)


@seed(20261018)
@settings(max_examples=20, deadline=None)
@given(
    st.integers(min_value=0, max_value=2**32 - 1),
    st.integers(min_value=1, max_value=6),
    st.floats(min_value=-2.0, max_value=2.0),
    st.floats(min_value=-2.0, max_value=2.0),
)
def test_coupling_resolvent_identity(instance_seed, n, u, v):
    rng = np.random.default_rng(instance_seed)
    n0 = random_hermitian(rng, n)
    w = random_hermitian(rng, n)
    z = complex(rng.standard_normal(), rng.uniform(0.5, 2.0))

    ru = resolvent(MatrixOperator.of(n0 + u * w), z).entries
    rv = resolvent(MatrixOperator.of(n0 + v * w), z).entries
    scale = max(np.linalg.norm(ru), np.linalg.norm(rv)) ** 2 * max(np.linalg.norm(w), 1.0)
    assert_allclose(rv - ru, (u - v) * rv @ w @ ru, atol=1e-12 * scale)


def test_matrix_operator_flags():
    assert MatrixOperator.of(OFFDIAG).hermitian
    assert not MatrixOperator.of([[0, 1], [0, 0]]).hermitian
    with pytest.raises(PreconditionViolated):
        MatrixOperator(np.array([[0, 1], [0, 0]]), hermitian=True)
    with pytest.raises(PreconditionViolated):
        MatrixOperator(np.zeros((2, 3)))


def test_affine_point_realizes_line():
    point = AffinePoint(MatrixOperator.of(np.diag([1.0, -1.0])), MatrixOperator.of(OFFDIAG), 0.5)
    assert_allclose(point.realize().entries, [[1, 0.5], [0.5, -1]])
    assert_allclose(point.moved(2.0).realize().entries, [[1, 2], [2, -1]])


def test_affine_point_requires_selfadjoint_direction():
    with pytest.raises(PreconditionViolated):
        AffinePoint(MatrixOperator.of(np.eye(2)), MatrixOperator.of([[0, 1], [0, 0]]))


def test_spectral_data_of_nilpotent(nilpotent):
    data = spectral_data(MatrixOperator.of(nilpotent))
    assert data.algebraic_multiplicities == [2]
    assert data.geometric_multiplicities == [1]
    assert abs(data.eigenvalues[0]) < 1e-6


def test_spectral_data_of_diagonal():
    data = spectral_data(MatrixOperator.of(np.diag([3.0, 1.0, 1.0])))
    assert_allclose(data.eigenvalues, [1.0, 3.0], atol=1e-12)
    assert data.algebraic_multiplicities == [2, 1]
    assert data.geometric_multiplicities == [2, 1]
    assert data.cluster_at(1.0 + 1e-9) is data.clusters[0]
    assert data.cluster_at(2.0) is None


def test_resonance_point_of_rank_one_direction():
    [point] = resonance_points_at(
        0.0,
        MatrixOperator.of(np.diag([1.0, 2.0])),
        MatrixOperator.of(np.diag([1.0, 0.0])),
    )
    assert point.s == pytest.approx(-1.0)
    assert point.multiplicity == 1
    assert point.residual < 1e-12


def test_resonance_points_sorted_by_magnitude():
    points = resonance_points_at(
        1.5,
        MatrixOperator.of(np.diag([0.0, 2.0])),
        MatrixOperator.of(-np.eye(2)),
    )
    assert [p.s for p in points] == [pytest.approx(0.5), pytest.approx(-1.5)]


def test_resonance_points_of_branching_pair():
    points = resonance_points_at(
        3.0,
        MatrixOperator.of(np.diag([1.0, -1.0])),
        MatrixOperator.of(OFFDIAG),
    )
    assert [p.s for p in points] == [pytest.approx(math.sqrt(8)), pytest.approx(-math.sqrt(8))]


@seed(20261018)
@settings(max_examples=20, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1), st.integers(min_value=1, max_value=5))
def test_resonance_points_match_determinant_roots(instance_seed, n):
    rng = np.random.default_rng(instance_seed)
    h0 = random_hermitian(rng, n)
    v = random_hermitian(rng, n)
    z = complex(rng.standard_normal(), 0.5 + rng.random())

    points = resonance_points_at(z, MatrixOperator.of(h0), MatrixOperator.of(v), merge=False)
    roots = scipy.linalg.eigvals(h0 - z * np.eye(n), -v)
    roots = roots[np.isfinite(roots)]

    assert len(points) == len(roots)
    for p in points:
        distance = np.min(np.abs(roots - p.s))
        assert distance <= 1e-7 * max(1.0, abs(p.s))
