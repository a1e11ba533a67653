import enum
import json
import logging
import sys
from dataclasses import dataclass

import numpy as np

from resonance_lab.errors import InstanceFormatError, PreconditionViolated
from resonance_lab.operator_space import MatrixOperator


log = logging.getLogger(__name__)


class InstanceKind(enum.StrEnum):
    HERMITIAN_PAIR = 'hermitian-pair'
    WITH_DIRECTION = 'with-direction'


@dataclass(frozen=True, eq=False)
class Instance:
    h0: MatrixOperator
    v: MatrixOperator
    w: MatrixOperator | None = None

    def __post_init__(self):
        sizes = {self.h0.n, self.v.n} | ({self.w.n} if self.w is not None else set())
        if len(sizes) != 1:
            raise PreconditionViolated(f'Operator dimensions differ: {sorted(sizes)}')

    @property
    def n(self) -> int:
        return self.h0.n

    @property
    def direction(self) -> MatrixOperator:
        """W when given, otherwise V."""
        return self.w if self.w is not None else self.v

    def base(self, s0: complex = 0.0) -> MatrixOperator:
        return MatrixOperator.of(self.h0.entries + s0 * self.v.entries)


def _decode_entry(value, location: str) -> complex:
    match value:
        case [re, im] if all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in (re, im)):
            return complex(re, im)
        case int() | float() if not isinstance(value, bool):
            return complex(value)
    raise InstanceFormatError(location, f'Expected [re, im], got {value!r}')


def _decode_matrix(data, n: int, name: str) -> MatrixOperator:
    if not isinstance(data, list) or len(data) != n:
        raise InstanceFormatError(name, f'Expected {n} rows')

    entries = np.zeros((n, n), dtype=complex)
    for i, row in enumerate(data):
        if not isinstance(row, list) or len(row) != n:
            raise InstanceFormatError(f'{name}[{i}]', f'Expected {n} entries')
        for j, value in enumerate(row):
            entries[i, j] = _decode_entry(value, f'{name}[{i}][{j}]')

    try:
        return MatrixOperator.of(entries)
    except PreconditionViolated as e:
        raise InstanceFormatError(name, str(e))


def _encode_matrix(operator: MatrixOperator) -> list[list[list[float]]]:
    return [
        [[float(x.real), float(x.imag)] for x in row]
        for row in operator.entries
    ]


def instance_from_dict(doc) -> Instance:
    if not isinstance(doc, dict):
        raise InstanceFormatError(None, 'Instance must be a JSON object')

    n = doc.get('n')
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise InstanceFormatError('n', f'Expected a positive integer, got {n!r}')

    for name in ('H0', 'V'):
        if name not in doc:
            raise InstanceFormatError(name, 'Missing operator')

    h0 = _decode_matrix(doc['H0'], n, 'H0')
    v = _decode_matrix(doc['V'], n, 'V')
    w = _decode_matrix(doc['W'], n, 'W') if doc.get('W') is not None else None
    if not v.hermitian:
        raise InstanceFormatError('V', 'Perturbation must be self-adjoint')
    if w is not None and not w.hermitian:
        raise InstanceFormatError('W', 'Direction must be self-adjoint')
    return Instance(h0, v, w)


def instance_to_dict(instance: Instance) -> dict:
    doc = {
        'version': 1,
        'n': instance.n,
        'H0': _encode_matrix(instance.h0),
        'V': _encode_matrix(instance.v),
    }
    if instance.w is not None:
        doc['W'] = _encode_matrix(instance.w)
    return doc


def parse_instance(text: str) -> Instance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise InstanceFormatError(f'line {e.lineno} column {e.colno}', e.msg)
    return instance_from_dict(doc)


def load_instance(path: str) -> Instance:
    try:
        with open(path, 'r', encoding='utf-8') as f:
            text = f.read()
    except OSError as e:
        raise InstanceFormatError(path, e.strerror or str(e))
    instance = parse_instance(text)
    log.debug('Loaded %d×%d instance from %s', instance.n, instance.n, path)
    return instance


def save_instance(instance: Instance, path: str | None) -> None:
    """Writes the instance as JSON; `path` None writes to stdout."""
    if path is None:
        json.dump(instance_to_dict(instance), sys.stdout, indent=2)
        sys.stdout.write('\n')
        return

    with open(path, 'w', encoding='utf-8') as f:
        json.dump(instance_to_dict(instance), f, indent=2)
        f.write('\n')


def _gaussian_hermitian(rng: np.random.Generator, n: int) -> np.ndarray:
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (a + a.conj().T) / 2.0


def generate_instance(n: int, seed: int, kind: InstanceKind | str = InstanceKind.HERMITIAN_PAIR) -> Instance:
    """Gaussian hermitian H0 and V, and W for the `with-direction` kind, deterministic in `seed`."""
    if n < 1:
        raise PreconditionViolated(f'Instance dimension must be positive, got {n}')
    kind = InstanceKind(kind)

    rng = np.random.default_rng(seed)
    h0 = _gaussian_hermitian(rng, n)
    v = _gaussian_hermitian(rng, n)
    w = _gaussian_hermitian(rng, n) if kind == InstanceKind.WITH_DIRECTION else None
    return Instance(
        MatrixOperator(h0, True),
        MatrixOperator(v, True),
        MatrixOperator(w, True) if w is not None else None,
    )
