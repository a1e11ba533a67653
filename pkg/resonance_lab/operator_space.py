"""Operators, resolvents, spectral data and coupling resonance points."""
import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from resonance_lab.errors import AmbiguousClustering, PreconditionViolated, SingularShift
from resonance_lab.settings import SETTINGS, RlFloatSetting
from resonance_lab.utils import (
    cluster_values, hermitian_part_residual, identity, norm, null_space, numerical_rank,
)


log = logging.getLogger(__name__)

with SETTINGS.section('operators') as S:
    HERMITIAN_TOLERANCE = S.register(
        'hermitian_tolerance', RlFloatSetting, default=1e-12, positive=True,
    )
    RESONANCE_TOLERANCE = S.register(
        'resonance_tolerance', RlFloatSetting, default=1e-10, positive=True,
        description='Eigenvalues of R_z(H0)V below this magnitude are resonance points at infinity',
    )


@dataclass(frozen=True, eq=False)
class MatrixOperator:
    entries: np.ndarray
    hermitian: bool = False

    def __post_init__(self):
        entries = np.array(self.entries, dtype=complex)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1] or entries.shape[0] < 1:
            raise PreconditionViolated(f'Operator must be a non-empty square matrix, got {entries.shape}')
        entries.setflags(write=False)
        object.__setattr__(self, 'entries', entries)
        if self.hermitian and hermitian_part_residual(entries) > HERMITIAN_TOLERANCE.value:
            raise PreconditionViolated('Operator is flagged self-adjoint but is not')

    @classmethod
    def of(cls, entries) -> 'MatrixOperator':
        """Wraps `entries`, setting the self-adjoint flag when it holds."""
        if isinstance(entries, MatrixOperator):
            return entries
        entries = np.array(entries, dtype=complex)
        return cls(entries, hermitian_part_residual(entries) <= HERMITIAN_TOLERANCE.value)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def norm(self) -> float:
        return norm(self.entries)

    @property
    def rank(self) -> int:
        return numerical_rank(self.entries)

    def adjoint(self) -> 'MatrixOperator':
        return MatrixOperator(self.entries.conj().T, self.hermitian)

    def __add__(self, other: 'MatrixOperator') -> 'MatrixOperator':
        return MatrixOperator(self.entries + other.entries, self.hermitian and other.hermitian)

    def __mul__(self, scalar: complex) -> 'MatrixOperator':
        return MatrixOperator(
            self.entries * scalar,
            self.hermitian and complex(scalar).imag == 0.0,
        )

    __rmul__ = __mul__

    def __matmul__(self, other: 'MatrixOperator') -> 'MatrixOperator':
        return MatrixOperator.of(self.entries @ other.entries)


def as_array(operator: 'MatrixOperator | np.ndarray') -> np.ndarray:
    if isinstance(operator, MatrixOperator):
        return operator.entries
    return np.asarray(operator, dtype=complex)


@dataclass(frozen=True, eq=False)
class AffinePoint:
    base: MatrixOperator
    direction: MatrixOperator
    coupling: complex = 0.0

    def __post_init__(self):
        if not self.direction.hermitian:
            raise PreconditionViolated('Perturbation direction must be self-adjoint')
        if self.base.n != self.direction.n:
            raise PreconditionViolated('Base and direction dimensions differ')

    def realize(self) -> MatrixOperator:
        return MatrixOperator.of(self.base.entries + self.coupling * self.direction.entries)

    def moved(self, coupling: complex) -> 'AffinePoint':
        return AffinePoint(self.base, self.direction, coupling)


@dataclass(frozen=True, eq=False)
class SpectralCluster:
    value: complex
    algebraic: int
    geometric: int
    right_vectors: np.ndarray
    left_vectors: np.ndarray
    residual: float


@dataclass(frozen=True, eq=False)
class SpectralData:
    clusters: list[SpectralCluster]
    cluster_tolerance: float

    @property
    def eigenvalues(self) -> list[complex]:
        return [c.value for c in self.clusters]

    @property
    def algebraic_multiplicities(self) -> list[int]:
        return [c.algebraic for c in self.clusters]

    @property
    def geometric_multiplicities(self) -> list[int]:
        return [c.geometric for c in self.clusters]

    def cluster_at(self, z: complex) -> SpectralCluster | None:
        nearest = min(self.clusters, key=lambda c: abs(c.value - z))
        if abs(nearest.value - z) < self.cluster_tolerance:
            return nearest
        return None


def shift_singular_value(n: np.ndarray, z: complex) -> tuple[float, float]:
    """Smallest and largest singular values of N − z."""
    values = scipy.linalg.svdvals(n - z * identity(n.shape[0]))
    return float(values[-1]), float(values[0])


def is_eigenvalue(n: np.ndarray, z: complex, tolerance: float | None = None) -> bool:
    if tolerance is None:
        tolerance = SETTINGS.get('general/rank_tolerance')
    smallest, _largest = shift_singular_value(n, z)
    return smallest <= tolerance * max(norm(n), 1.0)


def resolvent_array(n: np.ndarray, z: complex) -> np.ndarray:
    shifted = n - z * identity(n.shape[0])
    smallest, largest = shift_singular_value(n, z)
    if smallest <= n.shape[0] * np.finfo(float).eps * largest:
        raise SingularShift(z, smallest)
    return np.linalg.solve(shifted, identity(n.shape[0]))


def resolvent(n: MatrixOperator, z: complex) -> MatrixOperator:
    """(N − z)⁻¹; raises SingularShift when z is numerically in the spectrum."""
    return MatrixOperator.of(resolvent_array(n.entries, z))


def spectral_data(n: MatrixOperator, cluster_tol: float | None = None) -> SpectralData:
    if cluster_tol is None:
        cluster_tol = SETTINGS.get('general/cluster_tolerance') * max(n.norm, 1.0)
    if cluster_tol <= 0:
        raise PreconditionViolated('Cluster tolerance must be positive')

    entries = n.entries
    eigenvalues = scipy.linalg.eigvals(entries)
    groups = cluster_values(eigenvalues, cluster_tol)
    centers = [complex(np.mean(eigenvalues[g])) for g in groups]

    for i in range(len(centers)):
        for j in range(i + 1, len(centers)):
            if abs(centers[i] - centers[j]) < 2 * cluster_tol:
                raise AmbiguousClustering(centers[i], centers[j], cluster_tol)

    scale = max(n.norm, 1.0)
    clusters = []
    for group, center in sorted(zip(groups, centers), key=lambda gc: (gc[1].real, gc[1].imag)):
        shifted = entries - center * identity(n.n)
        right = null_space(shifted, scale, cluster_tol / scale)
        left = null_space(shifted.conj().T, scale, cluster_tol / scale)
        residual = norm(shifted @ right) / scale if right.shape[1] else 0.0
        clusters.append(SpectralCluster(
            value=center,
            algebraic=len(group),
            geometric=max(min(right.shape[1], len(group)), 1),
            right_vectors=right,
            left_vectors=left,
            residual=residual,
        ))
    log.debug('Spectral data: %s', [(c.value, c.algebraic, c.geometric) for c in clusters])
    return SpectralData(clusters, cluster_tol)


@dataclass(frozen=True)
class ResonancePoint:
    s: complex
    multiplicity: int
    residual: float = field(default=0.0, compare=False)


def resonance_points_at(
    z: complex,
    h0: MatrixOperator,
    v: MatrixOperator,
    tol: float | None = None,
    merge: bool = True,
) -> list[ResonancePoint]:
    """Points s with z ∈ σ(H0 + sV), from the eigenvalues μ of R_z(H0)V via s = −1/μ.

    With `merge` off every eigenvalue μ gives its own point of multiplicity one.
    """
    if tol is None:
        tol = RESONANCE_TOLERANCE.value

    r = resolvent_array(h0.entries, z)
    scale = max(norm(r) * v.norm, np.finfo(float).tiny)
    mu = scipy.linalg.eigvals(r @ v.entries)
    mu = mu[np.abs(mu) > tol * scale]
    if len(mu) == 0:
        return []

    s_values = -1.0 / mu
    if merge:
        tolerance = SETTINGS.get('general/cluster_tolerance') * max(1.0, float(np.max(np.abs(s_values))))
        groups = cluster_values(s_values, tolerance)
    else:
        groups = [[i] for i in range(len(s_values))]

    points = []
    for group in groups:
        s = complex(np.mean(s_values[group]))
        realized = h0.entries + s * v.entries - z * identity(h0.n)
        residual = float(scipy.linalg.svdvals(realized)[-1]) / max(norm(realized), 1.0)
        points.append(ResonancePoint(s, len(group), residual))

    points.sort(key=lambda p: (abs(p.s), np.angle(p.s)))
    return points
