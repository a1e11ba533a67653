import json

import numpy as np
import pytest

from resonance_lab.laurent import laurent_coefficients
from resonance_lab.scenarios import (
    EXIT_OK, Scenario, ScenarioCommand, SweepKind, run_scenario, sweep_instance, sweep_point,
)
from resonance_lab.settings import RlInvalidSettingValueError


@pytest.mark.parametrize('seed, kind, order', [
    (0, SweepKind.GENERIC, 1),
    (1, SweepKind.BRANCHING, 2),
    (2, SweepKind.COMPLEX_COUPLING, 1),
    (3, SweepKind.THIRD_ORDER, 3),
])
def test_sweep_points_rotate_through_kinds(seed, kind, order):
    point = sweep_point(seed, 4)
    assert point.kind == kind
    assert point.expected_order == order
    assert laurent_coefficients(point.z0, point.n0, point.v).pole_order == order
    if kind == SweepKind.COMPLEX_COUPLING:
        assert point.s0.imag > 0
    else:
        assert point.s0 == 0


def test_sweep_points_are_reproducible():
    first = sweep_point(7, 5)
    second = sweep_point(7, 5)
    assert first.kind == second.kind
    assert first.z0 == second.z0
    np.testing.assert_array_equal(first.v, second.v)


@pytest.mark.parametrize('seed, n, kind', [
    (3, 2, SweepKind.BRANCHING),
    (3, 1, SweepKind.GENERIC),
    (1, 1, SweepKind.GENERIC),
    (2, 1, SweepKind.COMPLEX_COUPLING),
])
def test_small_dimensions_fall_back(seed, n, kind):
    assert sweep_point(seed, n).kind == kind


def test_planting_can_be_switched_off(reset_settings):
    reset_settings.set('scenario/planted', False)
    for seed in range(4):
        point = sweep_point(seed, 4)
        assert point.kind == SweepKind.GENERIC
        assert point.expected_order == 1


def test_planting_from_environment(reset_settings):
    reset_settings.apply_environment({'RESONANCE_LAB_PLANTED': 'off'})
    assert reset_settings.get('scenario/planted') is False
    assert sweep_point(3, 4).kind == SweepKind.GENERIC

    with pytest.raises(RlInvalidSettingValueError):
        reset_settings.apply_environment({'RESONANCE_LAB_PLANTED': 'sometimes'})


def test_sweep_instance_records_kind():
    result = sweep_instance(3, 4)
    assert result.kind == SweepKind.THIRD_ORDER
    assert all(result.properties.values()), result.errors
    doc = result.to_dict()
    assert doc['kind'] == 'third-order'
    assert doc['order'] is True


def test_acceptance_sweep(tmp_path):
    out = tmp_path / 'sweep.json'
    scenario = Scenario(command=ScenarioCommand.SWEEP, count=200, n=4, output_path=str(out))
    assert run_scenario(scenario) == EXIT_OK

    report = json.loads(out.read_text(encoding='utf-8'))
    assert report['kinds'] == {kind: 50 for kind in ('generic', 'branching', 'complex-coupling', 'third-order')}
    assert report['passed_counts'] == {
        name: 200 for name in ('laurent', 'order', 'theorem', 'triple', 'flow', 'tangency')
    }
    assert report['failures'] == []
