import numpy as np
import pytest
from numpy.testing import assert_allclose

from resonance_lab.errors import AssumptionViolated, BranchingDetected, NotSimple
from resonance_lab.eigenpath import (
    assumption_check, branching_report, chain_residuals, conjugate_paths, monodromy_cycles,
    order_criteria, path_order, trace_eigenpaths,
)
from resonance_lab.laurent import laurent_coefficients, resonance_operators

from conftest import OFFDIAG


def _normalized(path):
    """Taylor coefficients with φ(0) scaled to have a unit first component."""
    return path.phi_taylor / path.phi_taylor[0][0]


def test_rank_one_path(rank_one):
    [path] = trace_eigenpaths(rank_one.z0, rank_one.n0, rank_one.w)
    assert path.gauge == 'conjugate'
    assert path.multiplicity == 1
    assert_allclose(path.z_taylor[:3], [1.0, 1.0, 0.0], atol=1e-10)
    assert path.analyticity_residual < 1e-8
    assert path.eigen_residual < 1e-10

    [conj] = conjugate_paths([path])
    assert conj.pairing_residual < 1e-10
    assert path_order(path, conj) == 1


def test_branching_path(branching):
    [path] = trace_eigenpaths(branching.z0, branching.n0, branching.w)
    # z(v) = √(1 + v²)
    assert_allclose(path.z_taylor[:4], [1.0, 0.0, 0.5, 0.0], atol=1e-10)
    assert_allclose(path.z_derivatives[2], 1.0, atol=1e-10)

    phi = _normalized(path)
    assert_allclose(phi[0], [1.0, 0.0], atol=1e-10)
    assert_allclose(phi[1], [0.0, 0.5], atol=1e-10)

    [conj] = conjugate_paths([path])
    assert conj.antiholomorphy_residual < 1e-8
    assert order_criteria(path, conj) == {'derivative': 2, 'orthogonality': 2, 'conjugate': 2}
    assert path_order(path, conj) == 2


def test_branching_chain(branching):
    [path] = trace_eigenpaths(branching.z0, branching.n0, branching.w)
    ops = resonance_operators(laurent_coefficients(branching.z0, branching.n0, branching.w), branching.w)
    residuals = chain_residuals(path, ops, 2)
    assert residuals['nilpotent_chain'] < 1e-8
    assert residuals['equation_chain'] < 1e-8


def test_depth_two_path_order(depth_two):
    [path] = trace_eigenpaths(depth_two.z0, depth_two.n0, depth_two.w)
    [conj] = conjugate_paths([path])
    assert path_order(path, conj) == 3
    assert_allclose(path.z_taylor[3], -2.0, atol=1e-8)


def test_pinned_gauge_for_nilpotent(nilpotent):
    [path] = trace_eigenpaths(0.0, nilpotent, np.eye(2))
    assert path.gauge == 'pinned'
    assert path.multiplicity == 2
    with pytest.raises(AssumptionViolated):
        conjugate_paths([path])


def test_branching_for_nilpotent(nilpotent):
    with pytest.raises(BranchingDetected):
        trace_eigenpaths(0.0, nilpotent, OFFDIAG)

    report = assumption_check(0.0, nilpotent, OFFDIAG)
    assert not report.passed
    assert not report.no_branching
    assert not report.semisimple
    assert report.diagnostics


def test_assumption_holds_for_semisimple(branching):
    report = assumption_check(branching.z0, branching.n0, branching.w)
    assert report.passed
    assert report.diagnostics == []


def test_monodromy_of_branching_point(branching):
    cycles = monodromy_cycles(branching.z0, branching.n0, branching.w)
    assert cycles.periods == [2]
    assert not cycles.trivial
    assert cycles.matches([2], [2])


def test_monodromy_of_transversal_point(rank_one):
    cycles = monodromy_cycles(rank_one.z0, rank_one.n0, rank_one.w)
    assert cycles.periods == [1]
    assert cycles.trivial


def test_monodromy_of_depth_two_point(depth_two):
    cycles = monodromy_cycles(depth_two.z0, depth_two.n0, depth_two.w)
    assert cycles.periods == [3]
    assert sorted(cycles.monodromy_permutation) == [0, 1, 2]


def test_branching_criteria_all_hold(branching):
    report = branching_report(branching.z0, 0.0, branching.n0, branching.w)
    assert report.agree
    assert report.branching
    assert all(report.criteria.values())
    assert len(report.criteria) == 7
    assert report.order == 2
    assert report.derivative_formula_residual < 1e-8


def test_branching_criteria_all_fail(rank_one):
    report = branching_report(rank_one.z0, 0.0, rank_one.n0, rank_one.w)
    assert report.agree
    assert not any(report.criteria.values())
    assert report.derivative == pytest.approx(1.0)
    assert report.pairing == pytest.approx(1.0)


def test_branching_criteria_off_the_base_point(flow_pair):
    h0, v = flow_pair
    report = branching_report(0.0, 0.0, h0, v)
    assert report.agree
    assert not any(report.criteria.values())
    assert report.derivative == pytest.approx(-1.0)


def test_branching_criteria_need_simple_eigenvalue():
    with pytest.raises(NotSimple):
        branching_report(1.0, 0.0, np.diag([1.0, 1.0, 3.0]), np.eye(3))
