import logging
import math
from collections.abc import Sequence

import numpy as np
import scipy.linalg
from scipy.cluster.hierarchy import fcluster, linkage
from scipy.optimize import linear_sum_assignment

from resonance_lab.errors import RankDecisionAmbiguous
from resonance_lab.settings import SETTINGS


log = logging.getLogger(__name__)

RANK_TOLERANCE = SETTINGS['general/rank_tolerance']
GAP_FACTOR = SETTINGS['general/gap_factor']


def norm(a: np.ndarray) -> float:
    if a.size == 0:
        return 0.0
    if a.ndim == 1:
        return float(np.linalg.norm(a))
    return float(np.linalg.norm(a, 2))


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=complex)


def circle_nodes(radius: float, count: int, center: complex = 0.0, phase: float = 0.0) -> np.ndarray:
    angles = 2.0 * np.pi * np.arange(count) / count + phase
    return center + radius * np.exp(1j * angles)


def taylor_coefficients(samples: np.ndarray, nodes: np.ndarray, center: complex, orders: int) -> np.ndarray:
    """Taylor coefficients c_0..c_{orders-1} of a function analytic inside the circle.

    `samples` has the node axis first; trapezoidal rule for
    (2πi)⁻¹∮f(v)(v−c)^{−j−1}dv on equispaced nodes.
    """
    offsets = nodes - center
    coefficients = []
    for j in range(orders):
        weights = offsets ** (-j)
        coefficients.append(np.tensordot(weights, samples, axes=(0, 0)) / len(nodes))
    return np.array(coefficients)


def negative_coefficient_residual(samples: np.ndarray, nodes: np.ndarray, center: complex, orders: int = 4) -> float:
    """Largest scaled negative-frequency coefficient; zero for analytic samples."""
    offsets = nodes - center
    radius = float(np.abs(offsets[0]))
    scale = max(float(np.max(np.abs(samples))), np.finfo(float).tiny)
    residual = 0.0
    for j in range(1, orders + 1):
        weights = offsets ** j
        c = np.tensordot(weights, samples, axes=(0, 0)) / len(nodes)
        residual = max(residual, float(np.max(np.abs(c))) / radius ** j / scale)
    return residual


def singular_values(a: np.ndarray) -> np.ndarray:
    if a.size == 0:
        return np.zeros(0)
    return scipy.linalg.svdvals(a)


def rank_cut(
    values: np.ndarray,
    scale: float,
    tolerance: float | None = None,
    gap: float | None = None,
) -> int:
    """Number of singular values above tolerance·scale, failing loudly without a gap."""
    if tolerance is None:
        tolerance = RANK_TOLERANCE.value
    if gap is None:
        gap = GAP_FACTOR.value

    if scale <= 0.0:
        return 0

    cut = tolerance * scale
    ambiguous = [float(s) for s in values if cut / gap < s < cut * gap]
    if ambiguous:
        raise RankDecisionAmbiguous(ambiguous, cut)

    rank = int(np.sum(values > cut))
    log.debug('Rank cut %.3e over %s -> %d', cut, np.array2string(values, precision=3), rank)
    return rank


def numerical_rank(a: np.ndarray, scale: float | None = None, tolerance: float | None = None) -> int:
    values = singular_values(a)
    if scale is None:
        scale = float(values[0]) if len(values) else 0.0
    return rank_cut(values, scale, tolerance)


def null_space(a: np.ndarray, scale: float | None = None, tolerance: float | None = None) -> np.ndarray:
    n = a.shape[1]
    if a.size == 0:
        return identity(n)
    u, s, vh = scipy.linalg.svd(a)
    if scale is None:
        scale = float(s[0]) if len(s) else 0.0
    rank = rank_cut(s, scale, tolerance)
    return vh[rank:].conj().T


def range_space(a: np.ndarray, scale: float | None = None, tolerance: float | None = None) -> np.ndarray:
    if a.size == 0:
        return np.zeros((a.shape[0], 0), dtype=complex)
    u, s, _vh = scipy.linalg.svd(a)
    if scale is None:
        scale = float(s[0]) if len(s) else 0.0
    rank = rank_cut(s, scale, tolerance)
    return u[:, :rank]


def orthonormal(vectors: np.ndarray) -> np.ndarray:
    if vectors.shape[1] == 0:
        return vectors.astype(complex)
    return scipy.linalg.orth(vectors)


def subspace_angle(a: np.ndarray, b: np.ndarray) -> float:
    """Largest principal angle; π/2 when the dimensions differ."""
    if a.shape[1] != b.shape[1]:
        return math.pi / 2
    if a.shape[1] == 0:
        return 0.0
    return float(np.max(scipy.linalg.subspace_angles(a, b)))


def membership_residual(basis: np.ndarray, vector: np.ndarray) -> float:
    """Relative distance of `vector` to the span of the orthonormal `basis`."""
    size = norm(vector)
    if size == 0.0:
        return 0.0
    if basis.shape[1] == 0:
        return 1.0
    projected = basis @ (basis.conj().T @ vector)
    return norm(vector - projected) / size


def riesz_projection(a: np.ndarray, center: complex, radius: float, nodes: int = 64) -> np.ndarray:
    """(2πi)⁻¹∮(ζ − A)⁻¹dζ over the circle |ζ − center| = radius."""
    n = a.shape[0]
    result = np.zeros((n, n), dtype=complex)
    for zeta in circle_nodes(radius, nodes, center, phase=np.pi / nodes):
        result += np.linalg.solve(zeta * identity(n) - a, identity(n)) * (zeta - center)
    return result / nodes


def cluster_values(values: Sequence[complex], tolerance: float) -> list[list[int]]:
    """Single-linkage groups of indices whose values chain within `tolerance`, in order of first index."""
    values = np.asarray(values, dtype=complex)
    if len(values) < 2:
        return [[i] for i in range(len(values))]
    points = np.column_stack([values.real, values.imag])
    labels = fcluster(linkage(points, method='single'), t=tolerance, criterion='distance')
    groups: dict[int, list[int]] = {}
    for i, label in enumerate(labels):
        groups.setdefault(int(label), []).append(i)
    return list(groups.values())


def match_values(previous: Sequence[complex], current: Sequence[complex]) -> np.ndarray:
    """Permutation p with current[p[i]] continuing previous[i]."""
    cost = np.abs(np.subtract.outer(np.asarray(previous), np.asarray(current)))
    rows, cols = linear_sum_assignment(cost)
    permutation = np.empty(len(previous), dtype=int)
    permutation[rows] = cols
    return permutation


def min_pairwise_distance(values: Sequence[complex]) -> float:
    values = np.asarray(values)
    if len(values) < 2:
        return math.inf
    distances = np.abs(np.subtract.outer(values, values))
    distances[np.diag_indices(len(values))] = math.inf
    return float(np.min(distances))


def permutation_cycles(permutation: Sequence[int]) -> list[list[int]]:
    seen = [False] * len(permutation)
    cycles = []
    for start in range(len(permutation)):
        if seen[start]:
            continue
        cycle = []
        i = start
        while not seen[i]:
            seen[i] = True
            cycle.append(i)
            i = permutation[i]
        cycles.append(cycle)
    return cycles


def hermitian_part_residual(a: np.ndarray) -> float:
    scale = float(np.max(np.abs(a))) if a.size else 0.0
    if scale == 0.0:
        return 0.0
    return float(np.max(np.abs(a - a.conj().T))) / scale
