import json
from dataclasses import dataclass

import numpy as np
import pytest

from resonance_lab.settings import SETTINGS


@dataclass(frozen=True, eq=False)
class Triple:
    z0: complex
    n0: np.ndarray
    w: np.ndarray


def e(i: int, n: int = 2) -> np.ndarray:
    return np.eye(n, dtype=complex)[:, i]


OFFDIAG = np.array([[0, 1], [1, 0]], dtype=complex)


def random_hermitian(rng: np.random.Generator, n: int) -> np.ndarray:
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (a + a.conj().T) / 2.0


def instance_doc(h0: np.ndarray, v: np.ndarray, w: np.ndarray | None = None) -> dict:
    def encode(a):
        return [[[float(x.real), float(x.imag)] for x in row] for row in np.asarray(a, dtype=complex)]

    doc = {'n': len(h0), 'H0': encode(h0), 'V': encode(v)}
    if w is not None:
        doc['W'] = encode(w)
    return doc


@pytest.fixture
def rank_one() -> Triple:
    """z0 = 1 of diag(1, 2) moved along e1e1ᵀ: a simple, transversal crossing."""
    return Triple(1.0, np.diag([1.0, 2.0]).astype(complex), np.outer(e(0), e(0)))


@pytest.fixture
def branching() -> Triple:
    """z0 = 1 of diag(1, −1) along offdiag(1, 1): z(v) = √(1 + v²)."""
    return Triple(1.0, np.diag([1.0, -1.0]).astype(complex), OFFDIAG.copy())


@pytest.fixture
def nilpotent() -> np.ndarray:
    return np.array([[1, 1j], [1j, -1]], dtype=complex)


@pytest.fixture
def depth_two() -> Triple:
    """Simple z0 = 0 with z(v) = O(v³)."""
    return Triple(
        0.0,
        np.diag([0.0, 1.0, -1.0]).astype(complex),
        (np.ones((3, 3)) - np.eye(3)).astype(complex),
    )


@pytest.fixture
def two_blocks() -> Triple:
    """z0 = 3 of 3I₂ along W = I: R(v) = I/v, two blocks of size 1."""
    return Triple(3.0, 3.0 * np.eye(2, dtype=complex), np.eye(2, dtype=complex))


@pytest.fixture
def two_cycles() -> Triple:
    """z0 = 3 of 3I₂ along diag(1, 2): two period-1 cycles with different speeds."""
    return Triple(3.0, 3.0 * np.eye(2, dtype=complex), np.diag([1.0, 2.0]).astype(complex))


@pytest.fixture
def mixed_blocks() -> Triple:
    """The branching pair plus a transversal crossing at the same z0 = 1: blocks [2, 1]."""
    w = np.zeros((3, 3), dtype=complex)
    w[:2, :2] = OFFDIAG
    w[2, 2] = 1.0
    return Triple(1.0, np.diag([1.0, -1.0, 1.0]).astype(complex), w)


@pytest.fixture
def disjoint_rank_one() -> tuple[np.ndarray, np.ndarray]:
    """H0 = diag(1, 2, 5) and V = diag(1, 1, 0): rank-one resonances at z0 = 1 and z0 = 2."""
    return np.diag([1.0, 2.0, 5.0]).astype(complex), np.diag([1.0, 1.0, 0.0]).astype(complex)


@pytest.fixture
def flow_pair() -> tuple[np.ndarray, np.ndarray]:
    """H0 = diag(0, 2) and V = −I."""
    return np.diag([0.0, 2.0]).astype(complex), -np.eye(2, dtype=complex)


@pytest.fixture
def write_instance(tmp_path):
    def write(h0, v, w=None, name='instance.json') -> str:
        path = tmp_path / name
        path.write_text(json.dumps(instance_doc(h0, v, w)), encoding='utf-8')
        return str(path)
    return write


@pytest.fixture
def reset_settings():
    yield SETTINGS
    for setting in SETTINGS:
        setting.reset()
