import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from resonance_lab.errors import NotResonanceVector, ProbeAtResonance
from resonance_lab.laurent import laurent_coefficients, resonance_operators
from resonance_lab.resonance_structure import (
    depth, eigenspace_angle, jordan_structure, semisimplicity_check, structure_report,
    upsilon_filtration,
)
from resonance_lab.utils import membership_residual

from conftest import e


def _structure(triple):
    series = laurent_coefficients(triple.z0, triple.n0, triple.w)
    ops = resonance_operators(series, triple.w)
    filtration = upsilon_filtration(triple.z0, triple.n0, triple.w)
    return series, ops, filtration


def test_rank_one_filtration(rank_one):
    _series, ops, filtration = _structure(rank_one)
    assert filtration.dims == [1]
    assert filtration.m == 1
    assert filtration.n == 1
    assert membership_residual(filtration.level(1), e(0)) < 1e-8
    assert jordan_structure(ops, filtration).block_sizes == [1]
    assert depth(e(0), ops) == 0


def test_branching_filtration(branching):
    series, ops, filtration = _structure(branching)
    assert filtration.dims == [1, 2]
    assert filtration.order_d == series.pole_order == 2
    assert membership_residual(filtration.level(1), e(0)) < 1e-8
    assert filtration.level(0).shape == (2, 0)
    assert filtration.level(5).shape == (2, 2)

    jordan = jordan_structure(ops, filtration)
    assert jordan.block_sizes == [2]
    assert jordan.nilpotency_index == 2
    assert jordan.chain_residual(ops.A) < 1e-8


def test_depth_two_filtration(depth_two):
    series, ops, filtration = _structure(depth_two)
    assert filtration.dims == [1, 2, 3]
    assert jordan_structure(ops, filtration).block_sizes == [3]
    assert depth(e(0, 3), ops) == 2


def test_two_blocks_of_size_one(two_blocks):
    series, ops, filtration = _structure(two_blocks)
    assert series.pole_order == 1
    assert_allclose(ops.P, np.eye(2), atol=1e-10)
    assert_allclose(ops.A, np.zeros((2, 2)), atol=1e-10)
    assert filtration.dims == [2]
    assert filtration.m == filtration.n == 2

    jordan = jordan_structure(ops, filtration)
    assert jordan.block_sizes == [1, 1]
    assert jordan.ranks == [2, 0]
    assert len(jordan.chains) == 2


def test_mixed_block_sizes(mixed_blocks):
    series, ops, filtration = _structure(mixed_blocks)
    assert series.pole_order == 2
    assert filtration.dims == [2, 3]
    assert membership_residual(filtration.level(1), e(0, 3)) < 1e-8
    assert membership_residual(filtration.level(1), e(2, 3)) < 1e-8
    assert membership_residual(filtration.level(1), e(1, 3)) > 0.5

    jordan = jordan_structure(ops, filtration)
    assert jordan.block_sizes == [2, 1]
    assert jordan.ranks == [3, 1, 0]
    assert jordan.chain_residual(ops.A) < 1e-8
    assert sorted(chain.shape[1] for chain in jordan.chains) == [1, 2]

    assert depth(e(0, 3), ops) == 1
    assert depth(e(1, 3), ops) == 0
    assert depth(e(2, 3), ops) == 0


@pytest.mark.parametrize('fixture', ['rank_one', 'branching', 'depth_two', 'two_blocks', 'mixed_blocks'])
def test_kernel_is_inverse_coupling_eigenspace(request, fixture):
    triple = request.getfixturevalue(fixture)
    v = 0.05 * np.exp(0.7j)
    assert eigenspace_angle(triple.z0, triple.n0, triple.w, v) < 1e-8


def test_eigenspace_identity_for_complex_coupling():
    rng = np.random.default_rng(11)
    a = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    w = (a + a.conj().T) / 2.0
    n0 = np.diag([0.0, 1.0, 2.0, 3.0]) + 0.3j * w
    z0 = complex(np.linalg.eigvals(n0)[0])
    assert eigenspace_angle(z0, n0, w, 0.01 * np.exp(0.4j)) < 1e-6


def test_eigenspace_needs_nonzero_coupling(rank_one):
    with pytest.raises(ProbeAtResonance):
        eigenspace_angle(rank_one.z0, rank_one.n0, rank_one.w, 0.0)


def test_depth_along_chain(branching):
    _series, ops, _filtration = _structure(branching)
    assert depth(e(0), ops) == 1
    assert depth(e(1), ops) == 0
    assert depth(np.zeros(2), ops) == math.inf


def test_depth_outside_resonance_space(rank_one):
    _series, ops, _filtration = _structure(rank_one)
    with pytest.raises(NotResonanceVector):
        depth(e(1), ops)


def test_probe_at_resonance_raises():
    with pytest.raises(ProbeAtResonance):
        upsilon_filtration(1.0, np.diag([1.0, 2.0]), np.eye(2), v_probe=-1.0)


def test_structure_report_passes(rank_one, branching, depth_two, two_blocks, mixed_blocks):
    for triple in (rank_one, branching, depth_two, two_blocks, mixed_blocks):
        series, ops, filtration = _structure(triple)
        report = structure_report(triple.n0, triple.w, series, ops, filtration)
        assert report.passed, report


def test_semisimple_eigenvalue(branching):
    report = semisimplicity_check(branching.z0, branching.n0)
    assert report.semisimple
    assert report.gram_invertible
    assert report.consistent
    assert_allclose(report.E, np.diag([1.0, 0.0]), atol=1e-10)
    assert_allclose(report.D, np.zeros((2, 2)), atol=1e-10)


def test_non_semisimple_eigenvalue(nilpotent):
    report = semisimplicity_check(0.0, nilpotent)
    assert not report.semisimple
    assert not report.gram_invertible
    assert report.consistent
    assert_allclose(report.E, np.eye(2), atol=1e-8)
    assert_allclose(report.D, nilpotent, atol=1e-6)


def test_derogatory_eigenvalue_is_semisimple():
    report = semisimplicity_check(1.0, np.diag([1.0, 1.0, 3.0]))
    assert report.semisimple
    assert report.gram_invertible
