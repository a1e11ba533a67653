"""Laurent coefficients of v ↦ R_{z0}(N0 + vW) and the operators built from them."""
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from resonance_lab.errors import (
    ContourTooLarge, NotAnEigenvalue, PoleOrderMismatch, PreconditionViolated,
    QuadratureDivergence, ResonantDirection, ThresholdAmbiguous, ZeroDirection,
)
from resonance_lab.operator_space import (
    MatrixOperator, as_array, is_eigenvalue, resonance_points_at, shift_singular_value,
)
from resonance_lab.settings import SETTINGS, RlFloatSetting, RlIntegerSetting
from resonance_lab.utils import circle_nodes, identity, norm, numerical_rank


log = logging.getLogger(__name__)

with SETTINGS.section('laurent') as S:
    NODES = S.register('nodes', RlIntegerSetting, default=64, minimum=16)
    MAX_NODES = S.register('max_nodes', RlIntegerSetting, default=4096, minimum=16)
    J_MAX = S.register(
        'j_max', RlIntegerSetting, default=4, minimum=1,
        description='Highest positive coefficient index computed',
    )
    STABLE_CHANGE = S.register(
        'stable_change', RlFloatSetting, default=1e-10, positive=True,
        description='Relative change under node doubling accepted as converged',
    )
    DIVERGENCE_CHANGE = S.register('divergence_change', RlFloatSetting, default=1e-6, positive=True)
    POLE_THRESHOLD = S.register('pole_threshold', RlFloatSetting, default=1e-7, positive=True)
    RADIUS_FRACTION = S.register(
        'radius_fraction', RlFloatSetting, default=0.5, positive=True, maximum=1.0,
        description='Default radius as a fraction of the distance to the nearest other resonance point',
    )
    ZERO_CLUSTER = S.register(
        'zero_cluster', RlFloatSetting, default=1e-3, positive=True,
        description='Resonance points closer than this (relative) to v=0 belong to the center',
    )
    IDENTITY_TOLERANCE = S.register('identity_tolerance', RlFloatSetting, default=1e-8, positive=True)


@dataclass(frozen=True, eq=False)
class LaurentSeries:
    z0: complex
    coefficients: dict[int, np.ndarray]
    pole_order: int
    contour_radius: float
    node_count: int
    truncation_residual: float
    scale: float
    rank_bound: int
    other_points: list[complex] = field(default_factory=list)

    def __getitem__(self, j: int) -> np.ndarray:
        return self.coefficients[j]

    def __contains__(self, j: int) -> bool:
        return j in self.coefficients

    @property
    def j_min(self) -> int:
        return min(self.coefficients)

    @property
    def j_max(self) -> int:
        return max(self.coefficients)

    @property
    def n(self) -> int:
        return self.coefficients[0].shape[0]

    def evaluate(self, v: complex) -> np.ndarray:
        """Truncated Σ_j v^{j−1} K_j."""
        return sum(v ** (j - 1) * k for j, k in self.coefficients.items())

    @property
    def exceeds_rank_bound(self) -> bool:
        return self.pole_order > self.rank_bound


@dataclass(frozen=True, eq=False)
class ResonanceOperators:
    z0: complex
    P: np.ndarray
    Q: np.ndarray
    K0: np.ndarray
    A_powers: list[np.ndarray]
    B_powers: list[np.ndarray]

    @property
    def order(self) -> int:
        return len(self.A_powers)

    @property
    def A(self) -> np.ndarray:
        return self.A_powers[0]

    @property
    def B(self) -> np.ndarray:
        return self.B_powers[0]

    @property
    def scale(self) -> float:
        return max(norm(self.P), norm(self.A), 1e-300)


def _v_scale(n0: np.ndarray, w: np.ndarray) -> float:
    return max(norm(n0), 1.0) / norm(w)


def other_resonance_points(z0: complex, n0: np.ndarray, w: np.ndarray) -> list[complex]:
    """Resonance points v ≠ 0 of z0 along N0 + vW, nearest first."""
    v_scale = _v_scale(n0, w)
    base = None
    for k in range(8):
        candidate = v_scale * (0.37 + 0.11 * k) * complex(math.cos(1.1 + k), math.sin(1.1 + k))
        smallest, largest = shift_singular_value(n0 + candidate * w, z0)
        if smallest > 1e-6 * largest:
            base = candidate
            break
    if base is None:
        raise ResonantDirection(z0)

    shifted = MatrixOperator.of(n0 + base * w)
    points = [
        base + p.s
        for p in resonance_points_at(z0, shifted, MatrixOperator.of(w))
    ]
    cut = ZERO_CLUSTER.value * v_scale
    others = sorted((complex(v) for v in points if abs(v) > cut), key=abs)
    log.debug('Other resonance points of %s: %s', z0, others)
    return others


def default_radius(z0: complex, n0: np.ndarray, w: np.ndarray) -> float:
    others = other_resonance_points(z0, n0, w)
    cap = _v_scale(n0, w)
    if not others:
        return cap
    return min(RADIUS_FRACTION.value * abs(others[0]), cap)


def _resolvent_samples(z0: complex, n0: np.ndarray, w: np.ndarray, nodes: np.ndarray) -> np.ndarray:
    n = n0.shape[0]
    shifted = n0 - z0 * identity(n)
    return np.array([np.linalg.solve(shifted + v * w, identity(n)) for v in nodes])


def _coefficients(samples: np.ndarray, nodes: np.ndarray, indices: range) -> dict[int, np.ndarray]:
    # K_j = (2πi)⁻¹∮R(v)v^{−j}dv, dv = iv dθ
    return {
        j: np.tensordot(nodes ** (1 - j), samples, axes=(0, 0)) / len(nodes)
        for j in indices
    }


def laurent_coefficients(
    z0: complex,
    n0: MatrixOperator | np.ndarray,
    w: MatrixOperator | np.ndarray,
    radius: float | None = None,
    nodes: int | None = None,
    j_range: tuple[int, int] | None = None,
    require_eigenvalue: bool = True,
) -> LaurentSeries:
    n0 = as_array(n0)
    w = as_array(w)
    if norm(w) == 0.0:
        raise ZeroDirection()

    if require_eigenvalue and not is_eigenvalue(n0, z0):
        raise NotAnEigenvalue(z0, shift_singular_value(n0, z0)[0])

    if nodes is None:
        nodes = NODES.value
    if nodes < 16:
        raise PreconditionViolated(f'At least 16 quadrature nodes are required, got {nodes}')

    others = other_resonance_points(z0, n0, w)
    if radius is None:
        radius = default_radius(z0, n0, w)
    elif others and abs(others[0]) <= radius:
        raise ContourTooLarge(radius, others[0])
    if radius <= 0:
        raise PreconditionViolated('Contour radius must be positive')

    rank_bound = numerical_rank(w)
    if j_range is None:
        j_range = (-(rank_bound + 1), J_MAX.value)
    indices = range(j_range[0], j_range[1] + 1)
    if 0 not in indices or 1 not in indices:
        raise PreconditionViolated('Coefficient range must contain 0 and 1')

    points = circle_nodes(radius, nodes)
    samples = _resolvent_samples(z0, n0, w, points)
    coefficients = _coefficients(samples, points, indices)

    while True:
        doubled = circle_nodes(radius, 2 * len(points))
        doubled_samples = np.empty((len(doubled),) + samples.shape[1:], dtype=complex)
        doubled_samples[0::2] = samples
        doubled_samples[1::2] = _resolvent_samples(z0, n0, w, doubled[1::2])
        refined = _coefficients(doubled_samples, doubled, indices)

        scale = max(max(norm(k) for k in refined.values()), np.finfo(float).tiny)
        change = max(norm(refined[j] - coefficients[j]) for j in indices) / scale
        log.debug('Quadrature with %d nodes changed by %.3e', len(doubled), change)

        points, samples, coefficients = doubled, doubled_samples, refined
        if change <= STABLE_CHANGE.value:
            break
        if 2 * len(points) > MAX_NODES.value:
            if change > DIVERGENCE_CHANGE.value:
                raise QuadratureDivergence(len(points), change)
            break

    scale = max(norm(coefficients[0]), norm(coefficients[1]), np.finfo(float).tiny)

    # off-node points on a smaller circle, where the truncated series converges fastest
    probes = circle_nodes(0.5 * radius, 7, phase=math.pi / 7)
    truncation = 0.0
    for v, exact in zip(probes, _resolvent_samples(z0, n0, w, probes)):
        approx = sum(v ** (j - 1) * coefficients[j] for j in indices)
        truncation = max(truncation, norm(exact - approx) / max(norm(exact), scale))

    d = _decide_pole_order(coefficients, None, POLE_THRESHOLD.value, scale)
    if d > rank_bound:
        log.warning('Pole order %d at %s exceeds rank(W) = %d', d, z0, rank_bound)

    log.debug('Laurent series at %s: radius %.3e, %d nodes, pole order %d', z0, radius, len(points), d)
    return LaurentSeries(
        z0=complex(z0),
        coefficients=coefficients,
        pole_order=d,
        contour_radius=float(radius),
        node_count=len(points),
        truncation_residual=float(truncation),
        scale=float(scale),
        rank_bound=rank_bound,
        other_points=others,
    )


def _decide_pole_order(
    coefficients: dict[int, np.ndarray],
    w: np.ndarray | None,
    threshold: float,
    scale: float | None = None,
) -> int:
    def size(j):
        k = coefficients[j]
        return norm(k if w is None else k @ w)

    if scale is None:
        scale = max(size(0), size(1), np.finfo(float).tiny)

    cut = threshold * scale
    ks = [k for k in range(0, -min(coefficients) + 1)]
    norms = [size(-k) for k in ks]

    ambiguous = [x for x in norms if cut / 10 < x < cut * 10]
    if ambiguous:
        raise ThresholdAmbiguous(norms, cut)

    nonzero = [k for k, x in zip(ks, norms) if x > cut]
    if not nonzero:
        return 0
    return 1 + max(nonzero)


def pole_order(series: LaurentSeries, w: MatrixOperator | np.ndarray | None = None, threshold: float | None = None) -> int:
    """Order of the pole of R_{z0}(N_v) at v=0: one more than the lowest index of a nonzero K_{−k}.

    When `w` is given, the pole order of R_{z0}(N_v)W is computed too and
    both must agree.
    """
    if threshold is None:
        threshold = POLE_THRESHOLD.value

    d = _decide_pole_order(series.coefficients, None, threshold, series.scale)
    if w is not None:
        w = as_array(w)
        product_order = _decide_pole_order(series.coefficients, w, threshold)
        if product_order != d:
            raise PoleOrderMismatch(d, product_order)
    return d


def resonance_operators(series: LaurentSeries, w: MatrixOperator | np.ndarray) -> ResonanceOperators:
    w = as_array(w)
    d = series.pole_order
    if d < 1:
        raise PreconditionViolated(f'{series.z0} is not a resonance point of the triple')

    k0 = series[0]
    return ResonanceOperators(
        z0=series.z0,
        P=k0 @ w,
        Q=w @ k0,
        K0=k0,
        A_powers=[series[-k] @ w for k in range(1, d + 1)],
        B_powers=[w @ series[-k] for k in range(1, d + 1)],
    )


@dataclass(frozen=True)
class IdentityReport:
    residuals: dict[str, float]
    tolerance: float

    @property
    def passed(self) -> bool:
        return all(r <= self.tolerance for r in self.residuals.values())

    @property
    def failures(self) -> list[str]:
        return [name for name, r in self.residuals.items() if r > self.tolerance]


def verify_laurent_identities(
    series: LaurentSeries,
    w: MatrixOperator | np.ndarray,
    tol: float | None = None,
) -> IdentityReport:
    """Residuals of the product identities between Laurent coefficients, per family."""
    if tol is None:
        tol = IDENTITY_TOLERANCE.value
    w = as_array(w)
    w_norm = norm(w)
    floor = series.scale * max(1.0, series.scale * w_norm)
    k = series.coefficients

    def relative(lhs: np.ndarray, rhs: np.ndarray, size: float) -> float:
        return norm(lhs - rhs) / max(size, norm(rhs), floor)

    def product(a: int, b: int) -> tuple[np.ndarray, float]:
        return k[a] @ w @ k[b], norm(k[a]) * w_norm * norm(k[b])

    residuals = {
        'nonpositive_products': 0.0,
        'mixed_sign_products': 0.0,
        'positive_products': 0.0,
        'nilpotent_from_k0': 0.0,
        'a_powers': 0.0,
        'b_powers': 0.0,
        'k0_from_b': 0.0,
        'p_idempotent': 0.0,
        'q_idempotent': 0.0,
    }
    lowest = series.j_min
    highest = series.j_max

    for a in range(0, -lowest + 1):
        for b in range(0, -lowest - a + 1):
            value, size = product(-a, -b)
            residuals['nonpositive_products'] = max(
                residuals['nonpositive_products'], relative(value, k[-a - b], size))

    for a in range(0, -lowest + 1):
        for b in range(1, highest + 1):
            for value, size in (product(-a, b), product(b, -a)):
                residuals['mixed_sign_products'] = max(
                    residuals['mixed_sign_products'], relative(value, np.zeros_like(value), size))

    for a in range(1, highest + 1):
        for b in range(1, highest - a + 1):
            value, size = product(a, b)
            residuals['positive_products'] = max(
                residuals['positive_products'], relative(value, -k[a + b], size))

    a_op = k[-1] @ w
    b_op = w @ k[-1]
    for power in range(1, -lowest + 1):
        a_power = np.linalg.matrix_power(a_op, power)
        b_power = np.linalg.matrix_power(b_op, power)
        residuals['nilpotent_from_k0'] = max(
            residuals['nilpotent_from_k0'],
            relative(a_power @ k[0], k[-power], norm(a_power) * norm(k[0])))
        residuals['k0_from_b'] = max(
            residuals['k0_from_b'],
            relative(k[0] @ b_power, k[-power], norm(b_power) * norm(k[0])))

    for a in range(1, -lowest + 1):
        for b in range(1, -lowest - a + 1):
            lhs = k[-a] @ w @ k[-b] @ w
            residuals['a_powers'] = max(
                residuals['a_powers'],
                relative(lhs, k[-a - b] @ w, norm(k[-a]) * norm(k[-b]) * w_norm ** 2) / max(w_norm, 1.0))
            lhs = w @ k[-a] @ w @ k[-b]
            residuals['b_powers'] = max(
                residuals['b_powers'],
                relative(lhs, w @ k[-a - b], norm(k[-a]) * norm(k[-b]) * w_norm ** 2) / max(w_norm, 1.0))

    p = k[0] @ w
    q = w @ k[0]
    residuals['p_idempotent'] = norm(p @ p - p) / max(norm(p), 1.0)
    residuals['q_idempotent'] = norm(q @ q - q) / max(norm(q), 1.0)

    report = IdentityReport(residuals, tol)
    if not report.passed:
        log.warning('Laurent identities fail at %s: %s', series.z0, report.failures)
    return report


def conjugate_series(series: LaurentSeries, n0: MatrixOperator | np.ndarray, w: MatrixOperator | np.ndarray) -> LaurentSeries:
    """Series of the conjugate triple (z̄0, N0*, W) on the same contour."""
    n0 = as_array(n0)
    return laurent_coefficients(
        series.z0.conjugate(), n0.conj().T, w,
        radius=series.contour_radius,
        nodes=series.node_count,
        j_range=(series.j_min, series.j_max),
        require_eigenvalue=False,
    )


def adjoint_symmetry_residual(series: LaurentSeries, conjugate: LaurentSeries) -> float:
    """max_j ‖K_j(z̄0, N0*, W) − K_j(z0, N0, W)*‖, relative to the series scale."""
    return max(
        norm(conjugate[j] - series[j].conj().T)
        for j in series.coefficients
        if j in conjugate
    ) / max(series.scale, np.finfo(float).tiny)


def pairing_residual(series: LaurentSeries, conjugate: LaurentSeries, w: MatrixOperator | np.ndarray) -> float:
    """‖𝐀(z̄0, N0*, W)* W − W 𝐀(z0, N0, W)‖, i.e. ⟨𝐀'f, Wg⟩ = ⟨f, W𝐀g⟩ for all f, g."""
    w = as_array(w)
    a = series[-1] @ w
    a_conjugate = conjugate[-1] @ w
    size = max(norm(a) * norm(w), series.scale * norm(w) ** 2, np.finfo(float).tiny)
    return norm(a_conjugate.conj().T @ w - w @ a) / size
