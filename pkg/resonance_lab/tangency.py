"""The resonant curve through N0 for a simple eigenvalue, tangency orders and the Lax flow check."""
import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.integrate
import scipy.linalg
from scipy.optimize import linear_sum_assignment

from resonance_lab.eigenpath import chain_residuals, conjugate_paths, path_order, trace_eigenpaths
from resonance_lab.errors import (
    FlowIntegrationFailed, MultiplicityCollision, NewtonDiverged, NotAnEigenvalue, NotSimple, ResonantDirection,
)
from resonance_lab.laurent import laurent_coefficients, resonance_operators
from resonance_lab.operator_space import (
    MatrixOperator, as_array, is_eigenvalue, shift_singular_value, spectral_data,
)
from resonance_lab.resonance_structure import depth
from resonance_lab.settings import SETTINGS, RlFloatSetting, RlIntegerSetting
from resonance_lab.utils import circle_nodes, identity, norm, numerical_rank, taylor_coefficients


log = logging.getLogger(__name__)

with SETTINGS.section('tangency') as S:
    NODES = S.register('nodes', RlIntegerSetting, default=64, minimum=16)
    RADIUS_FRACTION = S.register('radius_fraction', RlFloatSetting, default=0.25, positive=True, maximum=1.0)
    RAY_STEPS = S.register(
        'ray_steps', RlIntegerSetting, default=8, minimum=1,
        description='Newton continuation steps from v=0 out to the sampling circle',
    )
    NEWTON_ITERATIONS = S.register('newton_iterations', RlIntegerSetting, default=50, minimum=1)
    NEWTON_TOLERANCE = S.register('newton_tolerance', RlFloatSetting, default=1e-12, positive=True)
    COLLISION_FRACTION = S.register(
        'collision_fraction', RlFloatSetting, default=0.1, positive=True,
        description='A second eigenvalue closer to z0 than this fraction of the initial gap stops the solve',
    )
    ORDER_TOLERANCE = S.register('order_tolerance', RlFloatSetting, default=1e-6, positive=True)
    STANDARD_TOLERANCE = S.register('standard_tolerance', RlFloatSetting, default=1e-8, positive=True)
    RESIDUAL_TOLERANCE = S.register('residual_tolerance', RlFloatSetting, default=1e-9, positive=True)
    CHAIN_TOLERANCE = S.register('chain_tolerance', RlFloatSetting, default=1e-6, positive=True)
    LAX_STEPS = S.register(
        'lax_steps', RlIntegerSetting, default=1000, minimum=1,
        description='Lower bound on the number of integration steps of the Lax flow',
    )
    LAX_TOLERANCE = S.register('lax_tolerance', RlFloatSetting, default=1e-12, positive=True)
    LAX_TIME = S.register('lax_time', RlFloatSetting, default=1.0, positive=True)
    DRIFT_TOLERANCE = S.register('drift_tolerance', RlFloatSetting, default=1e-6, positive=True)


@dataclass(frozen=True, eq=False)
class ResonantCurve:
    z0: complex
    n0: np.ndarray
    w: np.ndarray
    w0: np.ndarray
    chi: np.ndarray
    radius: float
    nodes: np.ndarray
    s_samples: np.ndarray
    taylor_s: np.ndarray
    taylor_alpha: np.ndarray
    taylor_phi: np.ndarray
    grid: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=complex))
    grid_s: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=complex))
    residual: float = 0.0

    @property
    def samples(self) -> list[tuple[complex, complex]]:
        if len(self.grid):
            return [(complex(v), complex(s)) for v, s in zip(self.grid, self.grid_s)]
        return [(complex(v), complex(s)) for v, s in zip(self.nodes, self.s_samples)]

    def realize(self, v: complex, s: complex) -> np.ndarray:
        return self.n0 + v * self.w + s * self.w0

    def s_at(self, v: complex) -> complex:
        return complex(sum(c * v ** j for j, c in enumerate(self.taylor_s)))


def _tracked_eigen(n: np.ndarray, z0: complex) -> tuple[complex, np.ndarray, np.ndarray, float]:
    """Eigenvalue nearest z0 with its right and left vectors, and the distance of the next one."""
    values, left, right = scipy.linalg.eig(n, left=True, right=True)
    order = np.argsort(np.abs(values - z0))
    i = order[0]
    second = float(np.abs(values[order[1]] - z0)) if len(values) > 1 else math.inf
    return complex(values[i]), right[:, i], left[:, i], second


class _CurveSolver:
    def __init__(self, z0: complex, n0: np.ndarray, w: np.ndarray, w0: np.ndarray, gap: float):
        self.z0 = z0
        self.n0 = n0
        self.w = w
        self.w0 = w0
        self.scale = max(norm(n0), 1.0)
        self.collision = COLLISION_FRACTION.value * gap

    def solve(self, v: complex, start: complex) -> complex:
        s = complex(start)
        residual = math.inf
        for _ in range(NEWTON_ITERATIONS.value):
            value, right, left, second = _tracked_eigen(self.n0 + v * self.w + s * self.w0, self.z0)
            if second < self.collision:
                raise MultiplicityCollision(v, second)
            residual = abs(value - self.z0)
            if residual <= NEWTON_TOLERANCE.value * self.scale:
                return s
            # ∂z/∂s = ⟨l, W0 r⟩ / ⟨l, r⟩
            slope = np.vdot(left, self.w0 @ right) / np.vdot(left, right)
            if slope == 0:
                break
            step = (value - self.z0) / slope
            s -= step
            if abs(step) <= 1e-15 * max(1.0, abs(s)):
                value = _tracked_eigen(self.n0 + v * self.w + s * self.w0, self.z0)[0]
                if abs(value - self.z0) <= 1e3 * NEWTON_TOLERANCE.value * self.scale:
                    return s
                break
        raise NewtonDiverged(v, residual)


def _simple_eigenvector(z0: complex, n0: np.ndarray) -> tuple[np.ndarray, np.ndarray, float]:
    data = spectral_data(MatrixOperator.of(n0))
    cluster = data.cluster_at(z0)
    if cluster is None:
        raise NotAnEigenvalue(z0, shift_singular_value(n0, z0)[0])
    if cluster.algebraic != 1 or cluster.geometric != 1:
        raise NotSimple(z0, max(cluster.algebraic, cluster.geometric))

    chi = cluster.right_vectors[:, 0]
    chi = chi / norm(chi)
    star = cluster.left_vectors[:, 0]
    star = star / np.conj(np.vdot(star, chi))
    gaps = [abs(c.value - z0) for c in data.clusters if c is not cluster]
    return chi, star, min(gaps, default=max(norm(n0), 1.0))


def resonant_curve(
    z0: complex,
    n0: MatrixOperator | np.ndarray,
    w: MatrixOperator | np.ndarray,
    v_grid: np.ndarray | None = None,
    radius: float | None = None,
    nodes: int | None = None,
) -> ResonantCurve:
    """s(v) with z0 ∈ σ(N0 + vW + s(v)W0), W0 = ⟨χ,·⟩χ, solved by Newton and expanded by Cauchy integrals."""
    n0 = as_array(n0)
    w = as_array(w)
    n = n0.shape[0]
    chi, star, gap = _simple_eigenvector(z0, n0)
    w0 = np.outer(chi, chi.conj())
    scale = max(norm(n0), 1.0)
    if nodes is None:
        nodes = NODES.value
    count = numerical_rank(w) + 2 if norm(w) > 0 else 2

    if norm(w) == 0.0:
        zeros = np.zeros(count, dtype=complex)
        grid = np.zeros(0, dtype=complex) if v_grid is None else np.asarray(v_grid, dtype=complex)
        return ResonantCurve(
            z0=complex(z0), n0=n0, w=w, w0=w0, chi=chi,
            radius=0.0, nodes=np.zeros(0, dtype=complex), s_samples=np.zeros(0, dtype=complex),
            taylor_s=zeros, taylor_alpha=np.array([0.0, 1.0], dtype=complex),
            taylor_phi=np.vstack([chi[None, :], np.zeros((count - 1, n), dtype=complex)]),
            grid=grid, grid_s=np.zeros(len(grid), dtype=complex),
        )

    probe = 0.37 * scale / norm(w) * complex(math.cos(1.1), math.sin(1.1))
    if is_eigenvalue(n0 + probe * w, z0) and is_eigenvalue(n0 + 0.5j * probe * w, z0):
        raise ResonantDirection(z0)

    if radius is None:
        radius = RADIUS_FRACTION.value * min(gap, scale) / norm(w)
    solver = _CurveSolver(z0, n0, w, w0, gap)

    s = 0j
    for k in range(1, RAY_STEPS.value + 1):
        s = solver.solve(radius * k / RAY_STEPS.value, s)

    points = circle_nodes(radius, nodes)
    s_samples = np.empty(nodes, dtype=complex)
    for k, v in enumerate(points):
        s = solver.solve(v, s)
        s_samples[k] = s

    vectors = []
    for v, s in zip(points, s_samples):
        _value, right, _left, _second = _tracked_eigen(n0 + v * w + s * w0, z0)
        vectors.append(right / np.vdot(star, right))
    taylor_s = taylor_coefficients(s_samples, points, 0.0, count)
    taylor_phi = taylor_coefficients(np.array(vectors), points, 0.0, count)
    taylor_alpha = np.zeros(count, dtype=complex)
    taylor_alpha[1] = 1.0

    grid = np.zeros(0, dtype=complex)
    grid_s = np.zeros(0, dtype=complex)
    if v_grid is not None:
        grid = np.asarray(v_grid, dtype=complex)
        values = []
        previous = 0j
        for v in grid:
            guess = sum(c * v ** j for j, c in enumerate(taylor_s)) if abs(v) < radius else previous
            previous = solver.solve(v, guess)
            values.append(previous)
        grid_s = np.array(values, dtype=complex)

    residual = 0.0
    for v, s in list(zip(points, s_samples)) + list(zip(grid, grid_s)):
        residual = max(residual, shift_singular_value(n0 + v * w + s * w0, z0)[0] / scale)
    if residual > RESIDUAL_TOLERANCE.value:
        log.warning('Resonant curve at %s leaves the resonance set (residual %.3e)', z0, residual)

    log.debug('Resonant curve at %s: radius %.3e, s coefficients %s', z0, radius, np.round(taylor_s, 12))
    return ResonantCurve(
        z0=complex(z0), n0=n0, w=w, w0=w0, chi=chi,
        radius=float(radius), nodes=points, s_samples=s_samples,
        taylor_s=taylor_s, taylor_alpha=taylor_alpha, taylor_phi=taylor_phi,
        grid=grid, grid_s=grid_s, residual=residual,
    )


def restart_difference(curve: ResonantCurve, offset: float = 1e-3) -> float:
    """Largest change of s(v) when every sample is solved again from a perturbed start."""
    if curve.radius == 0.0:
        return 0.0
    _chi, _star, gap = _simple_eigenvector(curve.z0, curve.n0)
    solver = _CurveSolver(curve.z0, curve.n0, curve.w, curve.w0, gap)
    size = offset * curve.radius * norm(curve.w)
    return max(
        abs(solver.solve(v, s + size) - s)
        for v, s in zip(curve.nodes, curve.s_samples)
    )


def _compose(coefficients: np.ndarray, inner: np.ndarray) -> np.ndarray:
    """Taylor coefficients of f(g(u)) for f given by `coefficients` and g(0) = 0, truncated."""
    count = len(coefficients)
    inner = np.asarray(inner, dtype=complex)[:count]
    result = np.zeros_like(np.asarray(coefficients, dtype=complex))
    power = np.zeros(count, dtype=complex)
    power[0] = 1.0
    for c in coefficients:
        result += np.tensordot(power, c, axes=0) if np.ndim(c) else power * c
        power = np.convolve(power, inner)[:count]
    return result


def reparametrize(curve: ResonantCurve, c: complex, e: complex = 0.0) -> ResonantCurve:
    """The same curve traversed as v = cu + eu²."""
    if c == 0:
        raise ValueError('Reparametrization must have a nonzero linear term')
    count = len(curve.taylor_s)
    inner = np.zeros(count, dtype=complex)
    inner[1] = c
    if count > 2:
        inner[2] = e
    return replace(
        curve,
        taylor_s=_compose(curve.taylor_s, inner),
        taylor_alpha=_compose(curve.taylor_alpha, inner),
        taylor_phi=_compose(curve.taylor_phi, inner),
        radius=curve.radius / abs(c),
        grid=np.zeros(0, dtype=complex),
        grid_s=np.zeros(0, dtype=complex),
    )


@dataclass(frozen=True, eq=False)
class TangencyReport:
    tangency_order: int
    standard_flag: bool
    chain_vectors: np.ndarray
    s_coefficients: np.ndarray


def tangency_order(curve: ResonantCurve, tol: float | None = None) -> TangencyReport:
    """Order of contact between the curve and the line N0 + vW, read from the s(v) coefficients."""
    if tol is None:
        tol = ORDER_TOLERANCE.value

    order = 0
    if curve.radius > 0.0:
        # reparametrized curves rescale the radius, keeping |s_j|ρʲ comparable
        floor = tol * curve.radius * max(abs(curve.taylor_alpha[1]), 1.0) * norm(curve.w)
        for j in range(1, len(curve.taylor_s)):
            if abs(curve.taylor_s[j]) * curve.radius ** j > floor:
                order = j
                break

    alpha = curve.taylor_alpha
    standard = abs(alpha[1] - 1.0) <= STANDARD_TOLERANCE.value and all(
        abs(a) <= STANDARD_TOLERANCE.value for a in alpha[2:]
    )
    return TangencyReport(order, bool(standard), curve.taylor_phi[:max(order, 1)], curve.taylor_s)


@dataclass(frozen=True)
class TangencyTheoremReport:
    tangency_order: int
    depth: int | float
    path_order: int
    chain_residual: float
    equation_residual: float
    s_derivative: complex
    tolerance: float

    @property
    def orders_agree(self) -> bool:
        return self.tangency_order == self.depth + 1 == self.path_order

    @property
    def passed(self) -> bool:
        return (
            self.orders_agree
            and self.chain_residual <= self.tolerance
            and self.equation_residual <= self.tolerance
            and (self.tangency_order >= 2) == (abs(self.s_derivative) <= self.tolerance)
        )


def verify_tangency_theorems(
    z0: complex,
    n0: MatrixOperator | np.ndarray,
    w: MatrixOperator | np.ndarray,
    tol: float | None = None,
) -> TangencyTheoremReport:
    """tangency order = 1 + depth(χ0) = order of the eigenpath along W, plus the chain 𝐀χ_j = χ_{j−1}."""
    if tol is None:
        tol = CHAIN_TOLERANCE.value
    n0 = as_array(n0)
    w = as_array(w)

    curve = resonant_curve(z0, n0, w)
    report = tangency_order(curve)
    series = laurent_coefficients(z0, n0, w)
    ops = resonance_operators(series, w)
    chi_depth = depth(curve.taylor_phi[0], ops)

    [path] = trace_eigenpaths(z0, n0, w)
    [conj] = conjugate_paths([path])
    k = path_order(path, conj)

    a = ops.A
    shifted = n0 - z0 * identity(n0.shape[0])
    chain = 0.0
    equation = 0.0
    chi = curve.taylor_phi
    for j in range(1, min(report.tangency_order, len(chi))):
        chain = max(chain, norm(a @ chi[j] - chi[j - 1]) / max(norm(chi[j - 1]), norm(a) * norm(chi[j])))
        equation = max(
            equation,
            norm(shifted @ chi[j] + w @ chi[j - 1]) / max(norm(shifted) * norm(chi[j]), norm(w) * norm(chi[j - 1])),
        )
    residuals = chain_residuals(path, ops, k)
    result = TangencyTheoremReport(
        tangency_order=report.tangency_order,
        depth=chi_depth,
        path_order=k,
        chain_residual=max(chain, residuals['nilpotent_chain']),
        equation_residual=max(equation, residuals['equation_chain']),
        s_derivative=complex(curve.taylor_s[1]),
        tolerance=tol,
    )
    if not result.passed:
        log.warning('Tangency theorems fail at %s: %s', z0, result)
    return result


@dataclass(frozen=True, eq=False)
class LaxReport:
    pairings: list[complex]
    drift: float
    oracle_residual: float
    time: float
    tolerance: float

    @property
    def pairing_residual(self) -> float:
        return max((abs(p) for p in self.pairings), default=0.0)

    @property
    def passed(self) -> bool:
        return self.pairing_residual <= self.tolerance and self.drift <= DRIFT_TOLERANCE.value


def _lax_field(n: np.ndarray, w: np.ndarray) -> np.ndarray:
    return n @ w - w @ n


def lax_flow(n0: np.ndarray, w: np.ndarray, time: float, steps: int) -> np.ndarray:
    """Integrates dN/dt = [N, W] with an eighth-order Dormand-Prince scheme; `steps` bounds the step size."""
    n = n0.astype(complex)
    shape = n.shape

    def rhs(_t: float, y: np.ndarray) -> np.ndarray:
        return _lax_field(y.reshape(shape), w).ravel()

    solution = scipy.integrate.solve_ivp(
        rhs, (0.0, time), n.ravel(),
        method='DOP853', rtol=LAX_TOLERANCE.value, atol=LAX_TOLERANCE.value * max(norm(n), 1.0),
        max_step=time / steps,
    )
    if not solution.success:
        raise FlowIntegrationFailed(time, solution.message)
    return solution.y[:, -1].reshape(shape)


def lax_tangency_check(
    n0: MatrixOperator | np.ndarray,
    w: MatrixOperator | np.ndarray,
    tol: float | None = None,
    time: float | None = None,
    steps: int | None = None,
) -> LaxReport:
    """⟨φ*, [N0, W]φ⟩ for every simple eigenvalue and eigenvalue drift along the Lax flow."""
    n0 = as_array(n0)
    w = as_array(w)
    if tol is None:
        tol = ORDER_TOLERANCE.value
    if time is None:
        time = LAX_TIME.value
    if steps is None:
        steps = LAX_STEPS.value

    data = spectral_data(MatrixOperator.of(n0))
    for cluster in data.clusters:
        if cluster.algebraic != 1:
            raise NotSimple(cluster.value, cluster.algebraic)

    scale = max(norm(n0) * norm(w), np.finfo(float).tiny)
    commutator = _lax_field(n0, w)
    pairings = []
    for cluster in data.clusters:
        phi = cluster.right_vectors[:, 0]
        star = cluster.left_vectors[:, 0]
        star = star / np.conj(np.vdot(star, phi))
        pairings.append(complex(np.vdot(star, commutator @ phi)) / scale)

    flowed = lax_flow(n0, w, time, steps)
    exact = scipy.linalg.expm(-time * w) @ n0 @ scipy.linalg.expm(time * w)
    start = scipy.linalg.eigvals(n0)
    end = scipy.linalg.eigvals(flowed)
    cost = np.abs(np.subtract.outer(start, end))
    rows, cols = linear_sum_assignment(cost)
    drift = float(np.max(cost[rows, cols])) / max(norm(n0), 1.0)

    report = LaxReport(
        pairings=pairings,
        drift=drift,
        oracle_residual=norm(flowed - exact) / max(norm(n0), 1.0),
        time=float(time),
        tolerance=tol,
    )
    log.debug('Lax flow: pairing residual %.3e, drift %.3e', report.pairing_residual, drift)
    return report
