import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import assume, given, seed, settings
from hypothesis import strategies as st

from resonance_lab.errors import BirmanSchwingerSetting, CrossingAtEndpoint, EndpointResonance, PreconditionViolated
from resonance_lab.spectral_flow import (
    birman_schwinger_count, calibrate_ssf_sign, counting_difference, default_y_sequence, flow_crossings,
    half_plane_counts, lambda_grid, real_resonance_points, resonance_index,
    spectral_flow_oracle, ssf_report, total_resonance_index,
)

from conftest import random_hermitian


def test_downward_crossing(flow_pair):
    h0, v = flow_pair
    assert real_resonance_points(1.5, h0, v, (0.0, 1.0)) == [pytest.approx(0.5)]
    assert resonance_index(1.5, 0.5, h0, v) == -1
    assert total_resonance_index(1.5, h0, v) == -1
    assert spectral_flow_oracle(1.5, h0, v) == -1


def test_upward_crossing(flow_pair):
    h0, _v = flow_pair
    v = np.eye(2, dtype=complex)
    assert total_resonance_index(2.5, h0, v) == 1

    [crossing] = flow_crossings(2.5, h0, v)
    assert crossing.sign == 1
    assert crossing.r == pytest.approx(0.5, abs=1e-9)


def test_half_plane_counts_settle(flow_pair):
    h0, v = flow_pair
    history = half_plane_counts(1.5, 0.5, h0, v)
    assert history[-1] == (0, 1)
    assert half_plane_counts(1.5, 0.25, h0, v)[-1] == (0, 0)


def test_zero_resonance_point_is_rejected(flow_pair):
    h0, v = flow_pair
    with pytest.raises(PreconditionViolated):
        half_plane_counts(1.5, 0.0, h0, v)


def test_resonance_at_endpoint_raises(flow_pair):
    h0, v = flow_pair
    with pytest.raises(EndpointResonance):
        real_resonance_points(1.0, h0, v, (0.0, 1.0))


def test_crossing_at_endpoint_raises(flow_pair):
    h0, v = flow_pair
    with pytest.raises(CrossingAtEndpoint):
        ssf_report(1.0, h0, v)


@pytest.mark.parametrize('lam, count', [(-0.5, 1), (-3.0, 0), (-2.0, 0)])
def test_birman_schwinger_count(flow_pair, lam, count):
    h0, v = flow_pair
    assert birman_schwinger_count(lam, h0, v) == count


def test_birman_schwinger_at_eigenvalue_raises(flow_pair):
    h0, v = flow_pair
    # λ = −1 is an eigenvalue of H0 + V
    with pytest.raises(BirmanSchwingerSetting):
        birman_schwinger_count(-1.0, h0, v)


def test_birman_schwinger_setting_violations(flow_pair):
    h0, v = flow_pair
    with pytest.raises(BirmanSchwingerSetting):
        birman_schwinger_count(-0.5, h0, -v)
    with pytest.raises(BirmanSchwingerSetting):
        birman_schwinger_count(0.5, h0, v)


def test_ssf_report_below_spectrum(flow_pair):
    h0, v = flow_pair
    report = ssf_report(-0.5, h0, v)
    assert report.bs_count == 1
    assert report.ssf_value == -1
    assert report.oracle_value == -1
    assert report.flow_value == -1
    assert report.agree


def test_ssf_report_inside_spectrum(flow_pair):
    h0, v = flow_pair
    report = ssf_report(1.5, h0, v)
    assert report.real_resonance_points == [(pytest.approx(0.5), -1)]
    assert report.bs_count is None
    assert report.agree
    assert report.calibration.sign == 1
    assert report.calibration.residual < 1e-6


def test_counting_difference(flow_pair):
    h0, v = flow_pair
    assert counting_difference(1.5, h0, h0 + v) == -1
    assert counting_difference(5.0, h0, h0 + v) == 0


def test_calibration_matches_trace_formula(flow_pair):
    h0, v = flow_pair
    calibration = calibrate_ssf_sign(h0, h0 + v)
    assert calibration.sign == 1
    assert calibration.residual < 1e-6


def test_lambda_grid_avoids_spectra(flow_pair):
    h0, v = flow_pair
    grid = lambda_grid(h0, v, 9)
    assert len(grid) == 9
    values = np.concatenate([scipy.linalg.eigvalsh(h0), scipy.linalg.eigvalsh(h0 + v)])
    for lam in grid:
        assert np.min(np.abs(values - lam)) > 1e-4


@seed(20261018)
@settings(max_examples=15, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1), st.integers(min_value=1, max_value=5))
def test_total_index_equals_spectral_shift(instance_seed, n):
    rng = np.random.default_rng(instance_seed)
    h0 = random_hermitian(rng, n)
    v = random_hermitian(rng, n)
    values = np.sort(np.concatenate([scipy.linalg.eigvalsh(h0), scipy.linalg.eigvalsh(h0 + v)]))
    lam = float(0.5 * (values[n - 1] + values[n]))

    report = ssf_report(lam, h0, v)
    assert report.agree, report


def _negative_definite(rng, n):
    b = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return -(b.conj().T @ b) / n - 0.1 * np.eye(n)


@seed(20261018)
@settings(max_examples=50, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1), st.integers(min_value=1, max_value=5))
def test_birman_schwinger_count_below_spectrum(instance_seed, n):
    rng = np.random.default_rng(instance_seed)
    h0 = random_hermitian(rng, n)
    v = _negative_definite(rng, n)
    bottom = scipy.linalg.eigvalsh(h0)[0]
    moved = scipy.linalg.eigvalsh(h0 + v)

    # λ sits in a gap of σ(H0 + V) below σ(H0); the count is the number of eigenvalues passed
    edges = np.concatenate([[moved[0] - 1.0], moved[moved < bottom], [bottom]])
    gaps = np.diff(edges)
    assume(np.min(gaps) > 1e-2)
    count = int(rng.integers(len(gaps)))
    lam = float(0.5 * (edges[count] + edges[count + 1]))

    assert birman_schwinger_count(lam, h0, v) == count
    report = ssf_report(lam, h0, v)
    assert report.bs_count == count
    assert report.ssf_value == -count
    assert report.agree, report


def _real_points(lam, h0, v):
    return [r for r in real_resonance_points(lam, h0, v, (-20.0, 20.0)) if abs(r) > 1e-6]


@seed(20261018)
@settings(max_examples=15, deadline=None)
@given(
    st.integers(min_value=0, max_value=2**32 - 1),
    st.integers(min_value=1, max_value=5),
    st.sampled_from([1.0, -1.0]),
)
def test_sign_definite_coupling_stays_in_one_half_plane(instance_seed, n, sign):
    rng = np.random.default_rng(instance_seed)
    h0 = random_hermitian(rng, n)
    v = -sign * _negative_definite(rng, n)
    values = scipy.linalg.eigvalsh(h0)
    lam = float(values[0] + 0.5 * (values[-1] - values[0]) + 0.1)
    assume(np.min(np.abs(values - lam)) > 1e-2)

    for r in _real_points(lam, h0, v):
        history = half_plane_counts(lam, r, h0, v)
        assert all(n_plus * n_minus == 0 for n_plus, n_minus in history)
        index = resonance_index(lam, r, h0, v)
        assert index * sign >= 0


@seed(20261018)
@settings(max_examples=10, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1), st.integers(min_value=1, max_value=4))
def test_resonance_index_survives_y_refinement(instance_seed, n):
    rng = np.random.default_rng(instance_seed)
    h0 = random_hermitian(rng, n)
    v = random_hermitian(rng, n)
    values = np.sort(np.concatenate([scipy.linalg.eigvalsh(h0), scipy.linalg.eigvalsh(h0 + v)]))
    lam = float(0.5 * (values[n - 1] + values[n]))
    assume(np.min(np.abs(values - lam)) > 1e-2)

    ys = default_y_sequence()
    refined = sorted({*ys, *(y / math.sqrt(2.0) for y in ys)}, reverse=True)
    for r in _real_points(lam, h0, v):
        assert resonance_index(lam, r, h0, v, refined) == resonance_index(lam, r, h0, v)
