"""Cycle projections P^{[τ]} and the Hankel pairing between path and conjugate derivatives."""
import logging
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from scipy.optimize import linear_sum_assignment

from resonance_lab.eigenpath import ConjugatePath, CycleDecomposition, Eigenpath, monodromy_cycles, path_order
from resonance_lab.errors import ExtrapolationUnstable, PreconditionViolated, SingularBeta
from resonance_lab.laurent import ResonanceOperators
from resonance_lab.operator_space import MatrixOperator, as_array, resolvent_array
from resonance_lab.settings import SETTINGS, RlFloatSetting, RlIntegerSetting
from resonance_lab.utils import (
    circle_nodes, identity, membership_residual, norm, null_space, numerical_rank, orthonormal,
    range_space, riesz_projection, taylor_coefficients,
)


log = logging.getLogger(__name__)

with SETTINGS.section('projection') as S:
    RIESZ_FRACTION = S.register(
        'riesz_fraction', RlFloatSetting, default=0.3, positive=True, maximum=0.5,
        description='Riesz circle radius as a fraction of the distance to the nearest other eigenvalue',
    )
    RIESZ_NODES = S.register('riesz_nodes', RlIntegerSetting, default=64, minimum=16)
    EXTRAPOLATION_TOLERANCE = S.register('extrapolation_tolerance', RlFloatSetting, default=1e-8, positive=True)
    PROJECTION_TOLERANCE = S.register('projection_tolerance', RlFloatSetting, default=1e-8, positive=True)
    HANKEL_TOLERANCE = S.register('hankel_tolerance', RlFloatSetting, default=1e-8, positive=True)
    BETA_CONDITION = S.register('beta_condition', RlFloatSetting, default=1e10, positive=True)
    ORACLE_NODES = S.register(
        'oracle_nodes', RlIntegerSetting, default=32, minimum=16,
        description='Sample points on the v circle for the projection rebuild of the pairing matrix',
    )


@dataclass(frozen=True, eq=False)
class CycleProjection:
    tau: int
    cycle: list[int]
    P_tau: np.ndarray
    extrapolation_difference: float
    span_basis: np.ndarray | None = None
    checks: dict[str, float] = field(default_factory=dict)

    @property
    def period(self) -> int:
        return len(self.cycle)

    @property
    def rank(self) -> int:
        return numerical_rank(self.P_tau, max(norm(self.P_tau), 1.0))


def _cycle_value(
    n0: np.ndarray,
    w: np.ndarray,
    s0: complex,
    decomposition: CycleDecomposition,
    cycle: list[int],
) -> np.ndarray:
    """Mean of P_z^{[τ]} over the loop, i.e. its value at the loop center."""
    n = n0.shape[0]
    total = np.zeros((n, n), dtype=complex)
    for k, z in enumerate(decomposition.loop_nodes):
        a = resolvent_array(n0, z) @ w
        spectrum = scipy.linalg.eigvals(a)
        for j in cycle:
            mu = -1.0 / (decomposition.tracks[k, j] - s0)
            index = int(np.argmin(np.abs(spectrum - mu)))
            center = spectrum[index]
            others = np.delete(spectrum, index)
            gap = float(np.min(np.abs(others - center))) if len(others) else abs(center)
            total += riesz_projection(a, center, RIESZ_FRACTION.value * gap, RIESZ_NODES.value)
    return total / len(decomposition.loop_nodes)


def _intersection_dimension(a: np.ndarray, b: np.ndarray) -> int:
    if a.shape[1] == 0 or b.shape[1] == 0:
        return 0
    joined = np.hstack([a, b])
    return a.shape[1] + b.shape[1] - numerical_rank(joined, 1.0)


def _projection_checks(p_tau: np.ndarray, period: int, z0: complex, n0: np.ndarray, ops: ResonanceOperators | None) -> dict[str, float]:
    n = n0.shape[0]
    scale = max(norm(p_tau), 1.0)
    image = range_space(p_tau, scale)
    kernel = null_space(n0 - z0 * identity(n), max(norm(n0), 1.0))
    checks = {
        'idempotent': norm(p_tau @ p_tau - p_tau) / scale,
        'trace': abs(np.trace(p_tau) - period),
        'rank': float(image.shape[1] - period),
        'kernel_intersection': float(_intersection_dimension(image, kernel) - 1),
    }
    if ops is not None:
        a = ops.A
        checks['commutator'] = norm(p_tau @ a - a @ p_tau) / max(norm(a), 1.0)
        # one Jordan cell: 𝐀^{d−1} ≠ 0 and 𝐀^d = 0 on im P_τ
        top = np.linalg.matrix_power(a, period - 1) @ p_tau
        checks['single_cell'] = float(numerical_rank(top, max(norm(a), 1.0) ** (period - 1) * scale) - 1)
        checks['nilpotent'] = norm(np.linalg.matrix_power(a, period) @ p_tau) / (max(norm(a), 1.0) ** period * scale)
    return checks


def cycle_projections(
    z0: complex,
    h0: MatrixOperator | np.ndarray,
    v: MatrixOperator | np.ndarray,
    s0: complex = 0.0,
    loop_radius: float | None = None,
    steps: int | None = None,
    ops: ResonanceOperators | None = None,
    paths: list[Eigenpath] | None = None,
    tol: float | None = None,
) -> list[CycleProjection]:
    """P^{[τ]} at z0 for every monodromy cycle of the resonance points near s0.

    Each P^{[τ]}(z) sums the Riesz projections of R_z(N0)V at μ = −1/(s_j(z) − s0)
    over the cycle; the value at z0 is the Cauchy mean over the loop, repeated
    on a loop of half the radius as a stability check.
    """
    if tol is None:
        tol = EXTRAPOLATION_TOLERANCE.value
    h0 = as_array(h0)
    v = as_array(v)
    n0 = h0 + s0 * v

    outer = monodromy_cycles(z0, h0, v, loop_radius=loop_radius, steps=steps, s0=s0)
    radius = abs(outer.loop_nodes[0] - z0)
    inner = monodromy_cycles(z0, h0, v, loop_radius=0.5 * radius, steps=steps, s0=s0)
    if sorted(outer.periods) != sorted(inner.periods):
        raise ExtrapolationUnstable(math.inf)

    outer_values = [_cycle_value(n0, v, s0, outer, c) for c in outer.cycles]
    inner_values = [_cycle_value(n0, v, s0, inner, c) for c in inner.cycles]

    cost = np.array([
        [
            norm(a - b) if len(ca) == len(cb) else math.inf
            for b, cb in zip(inner_values, inner.cycles)
        ]
        for a, ca in zip(outer_values, outer.cycles)
    ])
    rows, cols = linear_sum_assignment(np.where(np.isinf(cost), 1e300, cost))

    projections = []
    for tau, (i, j) in enumerate(zip(rows, cols)):
        value = outer_values[i]
        difference = norm(value - inner_values[j]) / max(norm(value), 1.0)
        if difference > tol:
            raise ExtrapolationUnstable(difference)

        period = len(outer.cycles[i])
        span = None
        if paths is not None:
            span = _cycle_span(value, period, paths)
        projections.append(CycleProjection(
            tau=tau,
            cycle=outer.cycles[i],
            P_tau=value,
            extrapolation_difference=difference,
            span_basis=span,
            checks=_projection_checks(value, period, z0, n0, ops),
        ))
        log.debug('Cycle %d of period %d: checks %s', tau, period, projections[-1].checks)
    return projections


def _cycle_span(p_tau: np.ndarray, period: int, paths: list[Eigenpath]) -> np.ndarray | None:
    """Taylor coefficients φ_j, j < d_τ, of the path whose generating vector lies in im P_τ."""
    image = range_space(p_tau, max(norm(p_tau), 1.0))
    best = min(paths, key=lambda p: membership_residual(image, p.phi_taylor[0]))
    if membership_residual(image, best.phi_taylor[0]) > PROJECTION_TOLERANCE.value ** 0.5:
        return None
    return np.array(best.phi_taylor[:period]).T


@dataclass(frozen=True)
class ProjectionReport:
    idempotent: float
    orthogonality: float
    sum_residual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return max(self.idempotent, self.orthogonality, self.sum_residual) <= self.tolerance


def projection_report(projections: list[CycleProjection], ops: ResonanceOperators, tol: float | None = None) -> ProjectionReport:
    """P_τ² = P_τ, P_τP_μ = 0 for τ ≠ μ and Σ_τ P_τ = P."""
    if tol is None:
        tol = PROJECTION_TOLERANCE.value
    scale = max(norm(ops.P), 1.0)
    idempotent = max((norm(p.P_tau @ p.P_tau - p.P_tau) for p in projections), default=0.0) / scale
    orthogonality = max(
        (
            norm(a.P_tau @ b.P_tau)
            for a in projections
            for b in projections
            if a is not b
        ),
        default=0.0,
    ) / scale
    total = sum((p.P_tau for p in projections), np.zeros_like(ops.P))
    return ProjectionReport(idempotent, orthogonality, norm(total - ops.P) / scale, tol)


@dataclass(frozen=True, eq=False)
class HankelPair:
    beta: np.ndarray
    alpha: np.ndarray
    orders: list[int]
    branch_ids: list[int]
    cross_residual: float
    hankel_residual: float

    @property
    def offsets(self) -> list[int]:
        return [int(x) for x in np.cumsum([0] + self.orders)]

    def block(self, tau: int, which: str = 'beta') -> np.ndarray:
        matrix = self.beta if which == 'beta' else self.alpha
        start, stop = self.offsets[tau], self.offsets[tau + 1]
        return matrix[start:stop, start:stop]

    @property
    def inverse_residual(self) -> float:
        """‖αᵀβ − 1‖ over the whole block-diagonal matrix."""
        size = sum(self.orders)
        return norm(self.alpha.T @ self.beta - np.eye(size))


def _pairing_block(conj: ConjugatePath, path: Eigenpath, w: np.ndarray, rows: int, cols: int) -> np.ndarray:
    # (1/k!j!)⟨∂ᵏφ*(0), W∂ʲφ(0)⟩ = ψ_kᵀWφ_j with ψ the holomorphic conjugate of φ*
    psi = conj.psi_taylor[:rows]
    phi = path.phi_taylor[:cols]
    return psi @ w @ phi.T


def _hankel_residual(block: np.ndarray) -> float:
    d = block.shape[0]
    residual = 0.0
    for k in range(d):
        for j in range(d):
            if k > 0 and j + 1 < d:
                residual = max(residual, abs(block[k, j] - block[k - 1, j + 1]))
            if k + j <= d - 2:
                residual = max(residual, abs(block[k, j]))
    return residual


def beta_alpha(
    paths: list[Eigenpath],
    conjugates: list[ConjugatePath],
    w: MatrixOperator | np.ndarray,
    orders: list[int] | None = None,
    tol: float | None = None,
) -> HankelPair:
    """Block-diagonal β of derivative pairings and α = β^{−T}, inverted block by block."""
    if tol is None:
        tol = HANKEL_TOLERANCE.value
    w = as_array(w)
    if orders is None:
        orders = [path_order(p, c) for p, c in zip(paths, conjugates)]
    if any(d < 1 for d in orders):
        raise PreconditionViolated(f'Every path needs a positive order, got {orders}')
    for path, d in zip(paths, orders):
        if len(path.phi_taylor) < d:
            raise PreconditionViolated(f'Path {path.branch_id} carries fewer than {d} Taylor coefficients')

    size = sum(orders)
    offsets = np.cumsum([0] + orders)
    beta = np.zeros((size, size), dtype=complex)
    alpha = np.zeros((size, size), dtype=complex)
    cross = 0.0
    hankel = 0.0
    scale = max(
        max(norm(c.psi_taylor[0]) * norm(p.phi_taylor[0]) for p, c in zip(paths, conjugates)) * norm(w),
        np.finfo(float).tiny,
    )

    for mu, (conj, d_mu) in enumerate(zip(conjugates, orders)):
        for tau, (path, d_tau) in enumerate(zip(paths, orders)):
            block = _pairing_block(conj, path, w, d_mu, d_tau)
            if mu != tau:
                cross = max(cross, float(np.max(np.abs(block))) / scale)
                continue

            hankel = max(hankel, _hankel_residual(block) / scale)
            condition = float(np.linalg.cond(block))
            if not math.isfinite(condition) or condition > BETA_CONDITION.value:
                raise SingularBeta(tau, condition)
            start, stop = offsets[tau], offsets[tau + 1]
            beta[start:stop, start:stop] = block
            alpha[start:stop, start:stop] = np.linalg.inv(block).T

    if cross > tol or hankel > tol:
        log.warning('Pairing matrix pattern residuals: cross-block %.3e, Hankel %.3e', cross, hankel)
    return HankelPair(beta, alpha, list(orders), [p.branch_id for p in paths], cross, hankel)


def schmidt_reconstruction(
    pair: HankelPair,
    paths: list[Eigenpath],
    conjugates: list[ConjugatePath],
    w: MatrixOperator | np.ndarray,
) -> np.ndarray:
    """Σ_τ Σ_{k,j} α_τ^{kj} φ_{τ,j} (ψ_{τ,k}ᵀW), to be compared with P = K0W."""
    w = as_array(w)
    n = w.shape[0]
    result = np.zeros((n, n), dtype=complex)
    for tau, (path, conj, d) in enumerate(zip(paths, conjugates, pair.orders)):
        alpha = pair.block(tau, 'alpha')
        for k in range(d):
            row = conj.psi_taylor[k] @ w
            for j in range(d):
                result += alpha[k, j] * np.outer(path.phi_taylor[j], row)
    return result


def _cluster_pairing(
    members: list[Eigenpath],
    w: np.ndarray,
    points: np.ndarray,
    count: int,
) -> tuple[np.ndarray, np.ndarray] | None:
    """Taylor coefficients of Φ(v) and Ψ(v) for one cluster, from its eigenprojection E(v)."""
    lead = members[0]
    n0 = lead.n0
    size = len(members) * lead.multiplicity
    projections = []
    for v in points:
        shifted = n0 + v * w
        center = complex(np.polyval(lead.z_taylor[::-1], v))
        distances = np.sort(np.abs(scipy.linalg.eigvals(shifted) - center))
        inner = distances[size - 1]
        outer = distances[size] if size < len(distances) else max(norm(shifted), 1.0)
        if inner > 0.25 * outer:
            return None
        projections.append(riesz_projection(shifted, center, 0.5 * outer, RIESZ_NODES.value))
    projections = np.array(projections)

    # conjugate gauge: Ψ0ᵀΦ(v) = 1 with Φ(0) the generating vectors and E(0) = Φ(0)Ψ0ᵀ
    phi0 = np.array([p.phi_taylor[0] for p in members]).T
    psi0 = (np.linalg.pinv(phi0) @ projections.mean(axis=0)).T
    phi = np.array([e @ phi0 @ np.linalg.inv(psi0.T @ e @ phi0) for e in projections])
    psi = np.array([e.T @ psi0 for e in projections])
    return taylor_coefficients(phi, points, 0.0, count), taylor_coefficients(psi, points, 0.0, count)


def beta_oracle(
    paths: list[Eigenpath],
    pair: HankelPair,
    radius_factor: float = 0.5,
    nodes: int | None = None,
) -> float:
    """Relative distance from β to the pairing rebuilt out of eigenprojections of N0 + vW.

    Each cluster's projection E(v) is integrated from the resolvent on a circle
    around its eigenvalue at every sample v. In the conjugate gauge the paths are
    Φ(v) = E(v)Φ0(Ψ0ᵀE(v)Φ0)⁻¹ and Ψ(v) = E(v)ᵀΨ0, so only φ(0) is taken from
    the traced paths.
    """
    if not paths:
        return 0.0
    if any(p.gauge != 'conjugate' for p in paths):
        raise PreconditionViolated('Pairing matrices are compared in the conjugate gauge only')
    if nodes is None:
        nodes = ORACLE_NODES.value
    first = paths[0]
    w = first.w
    points = circle_nodes(radius_factor * first.radius, nodes)
    count = max(pair.orders)

    phi_taylor: dict[int, np.ndarray] = {}
    psi_taylor: dict[int, np.ndarray] = {}
    for cluster in sorted({p.cluster for p in paths}):
        members = sorted((p for p in paths if p.cluster == cluster), key=lambda p: p.column)
        coefficients = _cluster_pairing(members, w, points, count)
        if coefficients is None:
            return math.inf
        phi, psi = coefficients
        for p in members:
            phi_taylor[p.branch_id] = phi[:, :, p.column]
            psi_taylor[p.branch_id] = psi[:, :, p.column]

    beta = np.zeros_like(pair.beta)
    offsets = pair.offsets
    for tau, (path, d) in enumerate(zip(paths, pair.orders)):
        start, stop = offsets[tau], offsets[tau + 1]
        beta[start:stop, start:stop] = psi_taylor[path.branch_id][:d] @ w @ phi_taylor[path.branch_id][:d].T
    difference = norm(beta - pair.beta) / max(norm(pair.beta), np.finfo(float).tiny)
    log.debug('Pairing matrix differs from its projection rebuild by %.3e', difference)
    return difference


def span_angle(projection: CycleProjection) -> float:
    """Largest principal angle between im P_τ and the span of its path's Taylor coefficients."""
    if projection.span_basis is None:
        return math.pi / 2
    image = range_space(projection.P_tau, max(norm(projection.P_tau), 1.0))
    span = orthonormal(projection.span_basis)
    if span.shape[1] != image.shape[1]:
        return math.pi / 2
    return float(np.max(scipy.linalg.subspace_angles(image, span)))
