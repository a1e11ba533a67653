"""Resonance space filtration, depth, Jordan structure of 𝐀 and semisimplicity."""
import cmath
import logging
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from resonance_lab.errors import (
    ContourHitsSpectrum, CriteriaDisagree, FiltrationProbeMismatch, NotAnEigenvalue,
    NotResonanceVector, ProbeAtResonance,
)
from resonance_lab.laurent import LaurentSeries, ResonanceOperators, default_radius
from resonance_lab.operator_space import MatrixOperator, as_array, resolvent_array, shift_singular_value
from resonance_lab.settings import SETTINGS, RlFloatSetting, RlIntegerSetting
from resonance_lab.utils import (
    circle_nodes, identity, membership_residual, norm, null_space, numerical_rank,
    orthonormal, range_space, subspace_angle,
)


log = logging.getLogger(__name__)

with SETTINGS.section('structure') as S:
    PROBE_FRACTION = S.register(
        'probe_fraction', RlFloatSetting, default=0.7, positive=True, maximum=1.0,
        description='Probe distance as a fraction of the contour radius',
    )
    PROBE_ANGLE = S.register('probe_angle', RlFloatSetting, default=1.0)
    ANGLE_TOLERANCE = S.register('angle_tolerance', RlFloatSetting, default=1e-6, positive=True)
    MEMBERSHIP_TOLERANCE = S.register('membership_tolerance', RlFloatSetting, default=1e-6, positive=True)
    SEMISIMPLE_TOLERANCE = S.register('semisimple_tolerance', RlFloatSetting, default=1e-6, positive=True)
    GRAM_TOLERANCE = S.register('gram_tolerance', RlFloatSetting, default=1e-6, positive=True)
    GROUP_TOLERANCE = S.register(
        'group_tolerance', RlFloatSetting, default=1e-3, positive=True,
        description='Eigenvalues closer than this (relative) to z0 form its group',
    )
    CONTOUR_NODES = S.register('contour_nodes', RlIntegerSetting, default=128, minimum=16)


@dataclass(frozen=True, eq=False)
class UpsilonFiltration:
    z0: complex
    bases: list[np.ndarray]
    dims: list[int]
    probe: complex
    probe_angle: float = 0.0

    @property
    def m(self) -> int:
        return self.dims[0] if self.dims else 0

    @property
    def n(self) -> int:
        return self.dims[-1] if self.dims else 0

    @property
    def order_d(self) -> int:
        return len(self.dims)

    def level(self, k: int) -> np.ndarray:
        """Orthonormal basis of Υᵏ; Υ⁰ = {0} and Υᵏ = Υᵈ for k ≥ d."""
        if k <= 0 or not self.bases:
            size = self.bases[0].shape[0] if self.bases else 0
            return np.zeros((size, 0), dtype=complex)
        return self.bases[min(k, len(self.bases)) - 1]


@dataclass(frozen=True, eq=False)
class JordanData:
    block_sizes: list[int]
    chains: list[np.ndarray]
    ranks: list[int]

    @property
    def nilpotency_index(self) -> int:
        return max(self.block_sizes, default=0)

    def chain_residual(self, a: np.ndarray) -> float:
        """Largest ‖𝐀c_j − c_{j−1}‖ along the chains, with c_{−1} = 0."""
        residual = 0.0
        for chain in self.chains:
            scale = max(norm(chain), 1e-300)
            for j in range(chain.shape[1]):
                target = chain[:, j - 1] if j > 0 else np.zeros(chain.shape[0])
                residual = max(residual, norm(a @ chain[:, j] - target) / scale)
        return residual


@dataclass(frozen=True, eq=False)
class SemisimplicityReport:
    E: np.ndarray
    D: np.ndarray
    semisimple: bool
    gram_smallest_singular_value: float
    gram_invertible: bool
    radius: float

    @property
    def consistent(self) -> bool:
        return self.semisimple == self.gram_invertible


def _kernel_chain(z0: complex, n0: np.ndarray, w: np.ndarray, v: complex) -> list[np.ndarray]:
    n = n0.shape[0]
    r = resolvent_array(n0 + v * w, z0)
    m = identity(n) - v * (r @ w)
    m_norm = max(norm(m), 1.0)

    bases: list[np.ndarray] = []
    power = identity(n)
    for k in range(1, n + 1):
        power = power @ m
        basis = null_space(power, m_norm ** k)
        previous = bases[-1].shape[1] if bases else 0
        if basis.shape[1] == previous:
            break
        bases.append(basis)
        if basis.shape[1] == n:
            break
    return bases


def upsilon_filtration(
    z0: complex,
    n0: MatrixOperator | np.ndarray,
    w: MatrixOperator | np.ndarray,
    v_probe: complex | None = None,
    tol: float | None = None,
) -> UpsilonFiltration:
    """Υᵏ = ker[1 − vR_{z0}(N_v)W]ᵏ, cross-checked at a second probe."""
    n0 = as_array(n0)
    w = as_array(w)
    if tol is None:
        tol = ANGLE_TOLERANCE.value

    if v_probe is None:
        radius = default_radius(z0, n0, w)
        v_probe = PROBE_FRACTION.value * radius * cmath.exp(1j * PROBE_ANGLE.value)

    for probe in (v_probe, 0.5 * v_probe * cmath.exp(0.5j)):
        smallest, largest = shift_singular_value(n0 + probe * w, z0)
        if smallest <= 1e-10 * largest:
            raise ProbeAtResonance(probe)

    bases = _kernel_chain(z0, n0, w, v_probe)
    second = _kernel_chain(z0, n0, w, 0.5 * v_probe * cmath.exp(0.5j))

    angle = 0.0
    for k in range(max(len(bases), len(second))):
        a = bases[min(k, len(bases) - 1)] if bases else np.zeros((n0.shape[0], 0))
        b = second[min(k, len(second) - 1)] if second else np.zeros((n0.shape[0], 0))
        angle = max(angle, subspace_angle(a, b))
        if angle > tol:
            raise FiltrationProbeMismatch(k + 1, angle)

    dims = [b.shape[1] for b in bases]
    log.debug('Resonance filtration at %s: dims %s', z0, dims)
    return UpsilonFiltration(complex(z0), bases, dims, complex(v_probe), angle)


def depth(phi: np.ndarray, ops: ResonanceOperators, tol: float | None = None) -> int | float:
    """Largest k with φ ∈ im 𝐀ᵏ; the zero vector has infinite depth."""
    if tol is None:
        tol = MEMBERSHIP_TOLERANCE.value

    phi = np.asarray(phi, dtype=complex)
    size = norm(phi)
    if size == 0.0:
        return math.inf

    residual = norm(ops.P @ phi - phi) / size
    if residual > tol:
        raise NotResonanceVector(residual)

    k = 0
    for a_power in ops.A_powers:
        image = range_space(a_power, ops.scale)
        if membership_residual(image, phi) > tol:
            break
        k += 1
    return k


def _group_radius(eigenvalues: np.ndarray, z0: complex, scale: float) -> tuple[np.ndarray, float]:
    distances = np.abs(eigenvalues - z0)
    group = distances <= GROUP_TOLERANCE.value * scale
    others = distances[~group]
    radius = 0.5 * float(np.min(others)) if len(others) else scale
    return group, radius


def semisimplicity_check(
    z0: complex,
    n0: MatrixOperator | np.ndarray,
    contour_radius: float | None = None,
    tol: float | None = None,
) -> SemisimplicityReport:
    n0 = as_array(n0)
    n = n0.shape[0]
    if tol is None:
        tol = SEMISIMPLE_TOLERANCE.value
    scale = max(norm(n0), 1.0)

    eigenvalues = scipy.linalg.eigvals(n0)
    group, radius = _group_radius(eigenvalues, z0, scale)
    if not np.any(group):
        raise NotAnEigenvalue(z0, shift_singular_value(n0, z0)[0])

    if contour_radius is not None:
        radius = contour_radius
    for value in eigenvalues:
        distance = abs(value - z0)
        inside = distance < radius
        if abs(distance - radius) < 0.05 * radius or (inside and distance > GROUP_TOLERANCE.value * scale):
            raise ContourHitsSpectrum(radius, complex(value))

    nodes = circle_nodes(radius, CONTOUR_NODES.value, z0, phase=math.pi / CONTOUR_NODES.value)
    e = np.zeros((n, n), dtype=complex)
    d = np.zeros((n, n), dtype=complex)
    for zeta in nodes:
        r = np.linalg.solve(zeta * identity(n) - n0, identity(n)) * (zeta - z0)
        e += r
        d += r * (zeta - z0)
    e /= len(nodes)
    d /= len(nodes)

    semisimple = norm(d) <= tol * scale

    shifted = n0 - z0 * identity(n)
    right = null_space(shifted, scale)
    left = null_space(shifted.conj().T, scale)
    if right.shape[1] == 0 or right.shape[1] != left.shape[1]:
        smallest = 0.0
    else:
        smallest = float(scipy.linalg.svdvals(left.conj().T @ right)[-1])
    gram_invertible = smallest > GRAM_TOLERANCE.value

    if semisimple != gram_invertible:
        log.warning('Semisimplicity at %s: nilpotent says %s, kernel pairing says %s', z0, semisimple, gram_invertible)
    return SemisimplicityReport(e, d, semisimple, smallest, gram_invertible, float(radius))


def eigenspace_angle(
    z0: complex,
    n0: MatrixOperator | np.ndarray,
    w: MatrixOperator | np.ndarray,
    v: complex,
) -> float:
    """Principal angle between ker(N0 − z0) and the 1/v eigenspace of R_{z0}(N_v)W."""
    n0 = as_array(n0)
    w = as_array(w)
    n = n0.shape[0]
    if v == 0:
        raise ProbeAtResonance(v)

    kernel = null_space(n0 - z0 * identity(n), max(norm(n0), abs(z0), 1.0))
    sandwich = resolvent_array(n0 + v * w, z0) @ w
    shifted = sandwich - identity(n) / v
    eigenspace = null_space(shifted, max(norm(sandwich), 1.0 / abs(v)))
    return subspace_angle(kernel, eigenspace)


def _ranks(a: np.ndarray, limit: int, dim: int, scale: float) -> list[int]:
    # powers are cut against scale^k with scale ≥ ‖P‖ ≥ 1, so a quadrature-noise 𝐀 has rank 0
    ranks = [dim]
    power = np.eye(a.shape[0], dtype=complex)
    for k in range(1, limit + 2):
        power = power @ a
        ranks.append(numerical_rank(power, scale ** k))
        if ranks[-1] == 0:
            break
    return ranks


def jordan_structure(
    ops: ResonanceOperators,
    filtration: UpsilonFiltration,
    tol: float | None = None,
) -> JordanData:
    """Block sizes of 𝐀 on Υ from the rank sequence, and chains pulled back level by level."""
    a = ops.A
    ranks = _ranks(a, filtration.order_d, filtration.n, ops.scale)

    sizes: list[int] = []
    for s in range(1, len(ranks)):
        at_least = ranks[s - 1] - ranks[s]
        longer = ranks[s] - ranks[s + 1] if s + 1 < len(ranks) else 0
        sizes.extend([s] * (at_least - longer))
    sizes.sort(reverse=True)

    if sum(sizes) != filtration.n or len(sizes) != filtration.m:
        raise CriteriaDisagree({
            'sum_block_sizes': sum(sizes),
            'dim_resonance_space': filtration.n,
            'block_count': len(sizes),
            'dim_kernel': filtration.m,
        })

    chains: list[np.ndarray] = []
    covered = np.zeros((a.shape[0], 0), dtype=complex)
    for s in sorted(set(sizes), reverse=True):
        count = sizes.count(s)
        level = filtration.level(s)
        spanned = orthonormal(np.hstack([filtration.level(s - 1), covered]))
        remainder = level - spanned @ (spanned.conj().T @ level)
        _u, _sv, vh = scipy.linalg.svd(remainder)
        for top in (level @ vh[:count].conj().T).T:
            chain = [top]
            for _ in range(s - 1):
                chain.append(a @ chain[-1])
            chain_matrix = np.array(chain[::-1]).T
            chain_matrix /= norm(chain_matrix[:, 0])
            chains.append(chain_matrix)
            covered = np.hstack([covered, chain_matrix])

    log.debug('Jordan blocks of the resonance nilpotent at %s: %s', ops.z0, sizes)
    return JordanData(sizes, chains, ranks)


@dataclass(frozen=True)
class StructureReport:
    image_k0_angle: float
    upsilon_angle: float
    eigenspace_angle: float
    nilpotent_step_residual: float
    conjugate_dims_equal: bool
    order_matches_pole: bool
    tolerance: float

    @property
    def passed(self) -> bool:
        return (
            self.image_k0_angle <= self.tolerance
            and self.upsilon_angle <= self.tolerance
            and self.eigenspace_angle <= self.tolerance
            and self.nilpotent_step_residual <= self.tolerance
            and self.conjugate_dims_equal
            and self.order_matches_pole
        )


def structure_report(
    n0: MatrixOperator | np.ndarray,
    w: MatrixOperator | np.ndarray,
    series: LaurentSeries,
    ops: ResonanceOperators,
    filtration: UpsilonFiltration,
    tol: float | None = None,
) -> StructureReport:
    """im K0 = im P = Υ, 𝐀Υᵏ ⊆ Υᵏ⁻¹ and equal dimensions for the conjugate triple."""
    if tol is None:
        tol = ANGLE_TOLERANCE.value
    n0 = as_array(n0)
    w = as_array(w)

    image_p = range_space(ops.P, max(norm(ops.P), 1.0))
    image_k0 = range_space(ops.K0, norm(ops.K0))
    top = filtration.level(filtration.order_d)

    # 𝐀Υᵏ ⊆ Υᵏ⁻¹; equality needs every Jordan block to reach level k
    step = 0.0
    for k in range(1, filtration.order_d + 1):
        image = range_space(ops.A @ filtration.level(k), ops.scale)
        lower = filtration.level(k - 1)
        step = max([step] + [membership_residual(lower, x) for x in image.T])

    conjugate = upsilon_filtration(series.z0.conjugate(), n0.conj().T, w)
    return StructureReport(
        image_k0_angle=subspace_angle(image_k0, image_p),
        upsilon_angle=subspace_angle(top, image_p),
        eigenspace_angle=eigenspace_angle(series.z0, n0, w, filtration.probe),
        nilpotent_step_residual=step,
        conjugate_dims_equal=conjugate.dims == filtration.dims,
        order_matches_pole=filtration.order_d == series.pole_order,
        tolerance=tol,
    )
