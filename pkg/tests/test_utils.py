import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from resonance_lab.errors import RankDecisionAmbiguous
from resonance_lab.utils import (
    circle_nodes, cluster_values, match_values, membership_residual, min_pairwise_distance, null_space,
    numerical_rank, permutation_cycles, range_space, rank_cut, riesz_projection, subspace_angle,
    taylor_coefficients,
)


def test_rank_cut():
    assert rank_cut(np.array([2.0, 1.0, 1e-14]), 2.0) == 2
    assert rank_cut(np.array([1.0]), 0.0) == 0
    with pytest.raises(RankDecisionAmbiguous):
        rank_cut(np.array([1.0, 1e-8]), 1.0, tolerance=1e-8, gap=10.0)


def test_rank_and_spaces():
    a = np.array([[1, 1], [1, 1]], dtype=complex)
    assert numerical_rank(a) == 1

    kernel = null_space(a)
    assert kernel.shape == (2, 1)
    assert_allclose(a @ kernel, 0, atol=1e-12)

    image = range_space(a)
    assert membership_residual(image, np.array([1, 1], dtype=complex)) < 1e-12
    assert membership_residual(image, np.array([1, -1], dtype=complex)) == pytest.approx(1.0)


def test_subspace_angle():
    x = np.array([[1], [0]], dtype=complex)
    y = np.array([[1], [1]], dtype=complex) / math.sqrt(2)
    assert subspace_angle(x, y) == pytest.approx(math.pi / 4)
    assert subspace_angle(x, np.eye(2)) == pytest.approx(math.pi / 2)


def test_taylor_coefficients_of_exponential():
    nodes = circle_nodes(0.5, 32)
    coefficients = taylor_coefficients(np.exp(nodes), nodes, 0.0, 4)
    assert_allclose(coefficients, [1.0, 1.0, 0.5, 1 / 6], atol=1e-12)


def test_riesz_projection():
    a = np.diag([1.0, 3.0]).astype(complex)
    assert_allclose(riesz_projection(a, 1.0, 1.0), np.diag([1.0, 0.0]), atol=1e-12)


def test_cluster_values():
    assert cluster_values([0.0, 1.0, 1e-9, 1.0 + 5e-7, 2.0], 1e-6) == [[0, 2], [1, 3], [4]]


def test_cluster_values_chain_and_edge_cases():
    # single linkage: neighbours within tolerance join even when the ends are farther apart
    assert cluster_values([0.0, 0.6e-6, 1.2e-6], 1e-6) == [[0, 1, 2]]
    assert cluster_values([1j, 0.0, 0.5e-6j], 1e-6) == [[0], [1, 2]]
    assert cluster_values([], 1e-6) == []
    assert cluster_values([3.0], 1e-6) == [[0]]


def test_match_values():
    permutation = match_values([1.0, 2.0, 3.0], [2.1, 2.9, 0.9])
    assert list(permutation) == [2, 0, 1]


def test_min_pairwise_distance():
    assert min_pairwise_distance([0.0, 1j, 3.0]) == pytest.approx(1.0)
    assert min_pairwise_distance([1.0]) == math.inf


def test_permutation_cycles():
    assert permutation_cycles([1, 0, 2, 4, 5, 3]) == [[0, 1], [2], [3, 4, 5]]
