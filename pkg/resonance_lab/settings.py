import collections
import logging
import os
from collections.abc import Mapping
from typing import Any, override, get_args


log = logging.getLogger(__name__)


def humanize(s: str) -> str:
    parts = s.split('_')
    parts[0] = parts[0].capitalize()
    return ' '.join(parts)


class RlSetting[T]:
    def __init__(
        self,
        path: str,
        label: str | None = None,
        description: str | None = None,
        default: T | None = None,
    ):
        self._path: str = path
        self._value: T | None = None
        self._label: str | None = label
        self._description: str | None = description
        self._default: T | None = default

    @property
    def type(self) -> type:
        return get_args(self.__orig_bases__[0])[0]

    @property
    def path(self) -> str:
        return self._path

    @property
    def label(self) -> str | None:
        return self._label

    @property
    def description(self) -> str | None:
        return self._description

    @property
    def value(self) -> T:
        if self._value is None:
            return self.default  # type: ignore[return-value]
        return self._value

    @value.setter
    def value(self, value: T):
        if self._value == value:
            return

        error = self.validate(value)
        if error is not None:
            raise RlInvalidSettingValueError(self._path, error)
        self._value = value

    def reset(self):
        self._value = None

    @property
    def default(self) -> T | None:
        return self._default

    def parse(self, text: str) -> T:
        raise NotImplementedError()

    def validate(self, _data: object) -> str | None:
        raise NotImplementedError()


class RlIntegerSetting(RlSetting[int]):
    def __init__(
        self,
        *args,
        minimum: int | None = None,
        maximum: int | None = None,
        **kwargs
    ):
        super().__init__(*args, **kwargs)
        self._minimum: int | None = minimum
        self._maximum: int | None = maximum

    @property
    def minimum(self) -> int | None:
        return self._minimum

    @property
    def maximum(self) -> int | None:
        return self._maximum

    @override
    def parse(self, text: str) -> int:
        try:
            return int(text.strip())
        except ValueError:
            raise RlInvalidSettingValueError(self.path, f'{text!r} is not an integer')

    @override
    def validate(self, value: object) -> str | None:
        if not isinstance(value, int) or isinstance(value, bool):
            return 'Value is not an integer'
        if self.minimum is not None and value < self.minimum:
            return f'Value should not be less than {self.minimum}'
        if self.maximum is not None and value > self.maximum:
            return f'Value should not be greater than {self.maximum}'
        return None

    @override
    def __str__(self):
        return 'INTEGER'


class RlFloatSetting(RlSetting[float]):
    def __init__(
        self,
        *args,
        minimum: float | None = None,
        maximum: float | None = None,
        positive: bool = False,
        **kwargs
    ):
        super().__init__(*args, **kwargs)
        self._minimum: float | None = minimum
        self._maximum: float | None = maximum
        self._positive: bool = positive

    @property
    def minimum(self) -> float | None:
        return self._minimum

    @property
    def maximum(self) -> float | None:
        return self._maximum

    @override
    def parse(self, text: str) -> float:
        try:
            return float(text.strip())
        except ValueError:
            raise RlInvalidSettingValueError(self.path, f'{text!r} is not a number')

    @override
    def validate(self, value: object) -> str | None:
        if not isinstance(value, float):
            return 'Value is not a float'
        if self._positive and not value > 0.0:
            return 'Value should be positive'
        if self.minimum is not None and value < self.minimum:
            return f'Value should not be less than {self.minimum}'
        if self.maximum is not None and value > self.maximum:
            return f'Value should not be greater than {self.maximum}'
        return None

    @override
    def __str__(self):
        return 'FLOAT'


class RlBooleanSetting(RlSetting[bool]):
    @override
    def parse(self, text: str) -> bool:
        match text.strip().lower():
            case '1' | 'true' | 'yes' | 'on':
                return True
            case '0' | 'false' | 'no' | 'off':
                return False
        raise RlInvalidSettingValueError(self.path, f'{text!r} is not a boolean')

    @override
    def validate(self, data: object) -> str | None:
        return None if isinstance(data, bool) else 'Value is not a boolean'

    @override
    def __str__(self):
        return 'BOOLEAN'


class RlSettingError(Exception):
    pass


class RlSettingAlreadyExistsError(RlSettingError):
    def __init__(self, path: str):
        super().__init__(f'Setting {path} already exists')
        self.path: str = path


class RlUnknownSettingError(RlSettingError):
    def __init__(self, path: str):
        super().__init__(f'Unknown setting {path}')
        self.path: str = path


class RlInvalidSettingPathError(RlSettingError):
    def __init__(self, path: str):
        super().__init__(f'Setting path should have at least one "/": {path}')
        self.path: str = path


class RlInvalidSettingValueError(RlSettingError):
    def __init__(self, path: str, error: str):
        super().__init__(f'Value for {path} is invalid: {error}')
        self.path: str = path
        self.error: str = error


class RlSectionSettings:
    def __init__(self, settings: 'RlSettings', path: str):
        self._settings: RlSettings = settings
        self._path: str = path
        if self._path.endswith('/'):
            self._path = self._path[:-1]

    def __enter__(self):
        return self

    def __exit__(self, _exc_type, _exc_value, _traceback):
        pass

    def _make_path(self, path: str) -> str:
        return f'{self._path}/{path}'

    def register[S: RlSetting](
        self,
        path: str,
        type: type[S],
        *args,
        **kwargs
    ) -> S:
        return self._settings.register(self._make_path(path), type, *args, **kwargs)

    def __getitem__(self, path: str) -> RlSetting:
        return self._settings[self._make_path(path)]

    def get(self, path: str | RlSetting) -> Any:
        if isinstance(path, str):
            path = self._make_path(path)
        return self._settings.get(path)

    def set(self, path: str | RlSetting, value: Any):
        if isinstance(path, str):
            path = self._make_path(path)
        self._settings.set(path, value)

    def __iter__(self):
        prefix = f'{self._path}/'
        for v in self._settings:
            if v.path.startswith(prefix):
                yield v


class RlSettings:
    def __init__(self):
        self._settings = collections.OrderedDict[str, RlSetting]()
        self._environment: dict[str, str] = {}

    def section(self, path: str) -> RlSectionSettings:
        return RlSectionSettings(self, path)

    def register[S: RlSetting](
        self,
        path: str,
        setting_type: type[S],
        *args,
        label: str | None = None,
        description: str | None = None,
        default: object | None = None,
        **kwargs
    ) -> S:
        if path in self._settings:
            raise RlSettingAlreadyExistsError(path)

        parts = path.split('/')
        if len(parts) < 2:
            raise RlInvalidSettingPathError(path)

        if label is None:
            label = humanize(parts[-1])

        setting = setting_type(
            path, *args, label=label, description=description,
            default=default, **kwargs
        )
        self._settings[path] = setting
        return setting

    def bind_environment(self, variable: str, path: str):
        if path not in self._settings:
            raise RlUnknownSettingError(path)
        self._environment[variable] = path

    def apply_environment(self, environ: Mapping[str, str] | None = None):
        if environ is None:
            environ = os.environ

        for variable, path in self._environment.items():
            text = environ.get(variable)
            if text is None or text.strip() == '':
                continue
            setting = self._settings[path]
            self.set(path, setting.parse(text))
            log.debug('Setting %s = %r from %s', path, setting.value, variable)

    def __getitem__(self, path: str) -> RlSetting:
        return self._settings[path]

    def __contains__(self, path: str | RlSetting):
        if isinstance(path, RlSetting):
            path = path.path

        return path in self._settings

    def get(self, path: str | RlSetting) -> Any:
        if isinstance(path, RlSetting):
            path = path.path

        setting = self._settings.get(path, None)
        if setting is None:
            raise RlUnknownSettingError(path)

        return setting.value

    def set(self, path: str | RlSetting, value: Any):
        if isinstance(path, RlSetting):
            path = path.path

        setting = self._settings.get(path, None)
        if setting is None:
            raise RlUnknownSettingError(path)

        error = setting.validate(value)
        if error is not None:
            raise RlInvalidSettingValueError(path, error)

        setting.value = value

    def reset(self, path: str | RlSetting):
        if isinstance(path, RlSetting):
            path = path.path

        setting = self._settings.get(path, None)
        if setting is None:
            raise RlUnknownSettingError(path)
        setting.reset()

    def is_default(self, path: str | RlSetting) -> bool:
        if isinstance(path, RlSetting):
            path = path.path

        if path not in self._settings:
            raise RlUnknownSettingError(path)

        setting = self._settings[path]
        return setting.value == setting.default

    def __iter__(self):
        yield from self._settings.values()


# Settings
SETTINGS = RlSettings()

with SETTINGS.section('general') as S:
    S.register(
        'rank_tolerance', RlFloatSetting, default=1e-8, positive=True,
        description='Relative singular value cut for rank and kernel decisions',
    )
    S.register(
        'gap_factor', RlFloatSetting, default=10.0, minimum=1.0,
        description='Required gap around every rank or order cut',
    )
    S.register(
        'cluster_tolerance', RlFloatSetting, default=1e-6, positive=True,
        description='Relative distance below which eigenvalues are merged',
    )

with SETTINGS.section('tasks') as S:
    S.register('threads', RlIntegerSetting, default=1, minimum=1, maximum=256)

SETTINGS.bind_environment('RESONANCE_LAB_THREADS', 'tasks/threads')
