import pytest

from resonance_lab.settings import (
    RlBooleanSetting, RlFloatSetting, RlIntegerSetting, RlInvalidSettingPathError,
    RlInvalidSettingValueError, RlSettingAlreadyExistsError, RlSettings, RlUnknownSettingError,
)


@pytest.fixture
def settings():
    settings = RlSettings()
    with settings.section('solver') as S:
        S.register('nodes', RlIntegerSetting, default=64, minimum=16)
        S.register('tolerance', RlFloatSetting, default=1e-8, positive=True)
        S.register('verbose', RlBooleanSetting, default=False)
    settings.bind_environment('SOLVER_NODES', 'solver/nodes')
    settings.bind_environment('SOLVER_VERBOSE', 'solver/verbose')
    return settings


def test_defaults_and_labels(settings):
    assert settings.get('solver/nodes') == 64
    assert settings['solver/tolerance'].label == 'Tolerance'
    assert settings.is_default('solver/nodes')
    assert [s.path for s in settings.section('solver')] == [
        'solver/nodes', 'solver/tolerance', 'solver/verbose',
    ]


def test_set_and_reset(settings):
    settings.set('solver/nodes', 128)
    assert settings.get('solver/nodes') == 128
    assert not settings.is_default('solver/nodes')
    settings.reset('solver/nodes')
    assert settings.get('solver/nodes') == 64


@pytest.mark.parametrize('path, value', [
    ('solver/nodes', 8),
    ('solver/nodes', 1.5),
    ('solver/nodes', True),
    ('solver/tolerance', 0.0),
    ('solver/verbose', 1),
])
def test_invalid_values(settings, path, value):
    with pytest.raises(RlInvalidSettingValueError):
        settings.set(path, value)


def test_registration_errors(settings):
    with pytest.raises(RlSettingAlreadyExistsError):
        settings.register('solver/nodes', RlIntegerSetting)
    with pytest.raises(RlInvalidSettingPathError):
        settings.register('nodes', RlIntegerSetting)
    with pytest.raises(RlUnknownSettingError):
        settings.get('solver/missing')
    with pytest.raises(RlUnknownSettingError):
        settings.bind_environment('MISSING', 'solver/missing')


def test_apply_environment(settings):
    settings.apply_environment({'SOLVER_NODES': ' 32 ', 'SOLVER_VERBOSE': 'yes'})
    assert settings.get('solver/nodes') == 32
    assert settings.get('solver/verbose') is True


def test_empty_environment_is_ignored(settings):
    settings.apply_environment({'SOLVER_NODES': '  '})
    assert settings.get('solver/nodes') == 64


@pytest.mark.parametrize('environ', [{'SOLVER_NODES': 'many'}, {'SOLVER_NODES': '4'}, {'SOLVER_VERBOSE': 'maybe'}])
def test_invalid_environment(settings, environ):
    with pytest.raises(RlInvalidSettingValueError):
        settings.apply_environment(environ)


def test_thread_count_from_environment(reset_settings):
    reset_settings.apply_environment({'RESONANCE_LAB_THREADS': '4'})
    assert reset_settings.get('tasks/threads') == 4
